mod common;

use std::f64::consts::PI;

use finite_proxy::inverse::{
    chain_to_jacobi, eigen_tridiagonal, jacobi_to_chain, lanczos_reconstruct, persymmetric_weights, reconstruct_chain,
    string_spectrum, JacobiMatrix, Spectrum, SpringMassChain, WeightVector,
};
use finite_proxy::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn spectrum_strategy() -> impl Strategy<Value = Vec<f64>> {
    (2usize..=24, any::<u64>()).prop_map(|(n, seed)| common::random_spectrum(&mut ChaCha8Rng::seed_from_u64(seed), n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reconstruction_is_isospectral_and_persymmetric(values in spectrum_strategy(), mass in 0.1..10.0f64) {
        let spec = Spectrum::new(values).unwrap();
        let rec = reconstruct_chain(&spec, mass).unwrap();
        prop_assert!(rec.jacobi.is_persymmetric(1e-9));
        prop_assert!(rec.chain.is_persymmetric(1e-9));
        prop_assert!((rec.chain.total_mass() - mass).abs() < 1e-12 * mass);
        prop_assert!(rec.chain.masses().iter().chain(rec.chain.springs()).all(|v| *v > 0.0));
        let back = eigen_tridiagonal(&chain_to_jacobi(&rec.chain).unwrap(), false).spectrum().unwrap();
        prop_assert!(back.max_relative_error(&spec).unwrap() < 1e-10);
    }

    #[test]
    fn weights_are_the_first_eigenvector_components(values in spectrum_strategy()) {
        let spec = Spectrum::new(values).unwrap();
        let w = persymmetric_weights(&spec).unwrap();
        let j = lanczos_reconstruct(&spec, &w).unwrap();
        let e = eigen_tridiagonal(&j, true);
        for (a, b) in e.first_components().unwrap().iter().zip(w.values()) {
            prop_assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn persymmetric_chain_survives_round_trip(half in prop::collection::vec(0.2..3.0f64, 1..8), springs in prop::collection::vec(0.2..3.0f64, 1..9)) {
        // mirror the drawn halves into a persymmetric chain
        let n = half.len() * 2;
        let masses: Vec<f64> = half.iter().chain(half.iter().rev()).copied().collect();
        let mut ks: Vec<f64> = springs.iter().cycle().take(half.len() + 1).copied().collect();
        let mirrored: Vec<f64> = ks.iter().rev().skip(1).copied().collect();
        ks.extend(mirrored);
        prop_assert_eq!(ks.len(), n + 1);
        let chain = SpringMassChain::new(masses, ks).unwrap();
        let j = chain_to_jacobi(&chain).unwrap();
        let back = jacobi_to_chain(&j, chain.total_mass()).unwrap();
        for (a, b) in back.masses().iter().zip(chain.masses()) {
            prop_assert!((a - b).abs() < 1e-9 * b);
        }
        for (a, b) in back.springs().iter().zip(chain.springs()) {
            prop_assert!((a - b).abs() < 1e-9 * b);
        }
    }
}

#[test]
fn bisection_matches_dense_eigensolver() {
    let j = JacobiMatrix::new(vec![2.0, 3.0, 1.5, 4.0], vec![0.5, 1.0, 0.25]).unwrap();
    let mut dense: Vec<f64> = j.to_dense().symmetric_eigenvalues().iter().copied().collect();
    dense.sort_by(f64::total_cmp);
    for (a, b) in j.eigenvalues().iter().zip(&dense) {
        assert!((a - b).abs() < 1e-13);
    }
}

#[test]
fn long_string_spectrum_reconstructs() {
    let spec = string_spectrum(64, PI).unwrap();
    let rec = reconstruct_chain(&spec, 2.0).unwrap();
    let back = eigen_tridiagonal(&chain_to_jacobi(&rec.chain).unwrap(), false).spectrum().unwrap();
    assert!(back.max_relative_error(&spec).unwrap() < 1e-10);
    // masses stay unequal as N grows: the ends carry more than the middle
    let m = rec.chain.masses();
    assert!(m[0] > 1.2 * m[32]);
}

#[test]
fn invalid_inputs() {
    assert!(matches!(Spectrum::new(vec![1.0, 1.0]), Err(Error::Degenerate(_))));
    assert!(WeightVector::new(vec![1.0, -1.0]).is_err());
    let spec = Spectrum::new(vec![1.0, 2.0]).unwrap();
    let short = WeightVector::new(vec![1.0]).unwrap();
    assert!(matches!(lanczos_reconstruct(&spec, &short), Err(Error::Dimension(_))));
    assert!(reconstruct_chain(&spec, -1.0).is_err());
}
