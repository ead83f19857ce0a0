use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::config::RunConfig;
use super::report::{Criterion, PlotSeries, Provenance, RunReport, Stage, StageReport, StageStatus, Table, TableRow, SCHEMA};
use crate::dynamics::{build_modal_map, modal_compare, simulate_with_map, ChainState, SimulationOptions};
use crate::error::{Error, Result};
use crate::inverse::{
    chain_to_jacobi, eigen_tridiagonal, equal_mass_chain_spectrum, reconstruct_chain, string_spectrum,
    ChainReconstruction, SpringMassChain, Spectrum,
};
use crate::reduction::{
    functional_i_and_n, reconstruct_full_solution, reduced_gradient_fd, solve_reduced, uniform_points, Nonlinearity,
    NonlinearitySpec, ProblemKind, ReductionResult,
};
use crate::spectral::{Part, SpatialBasis};

/// Tolerance on each component of the weak residual of a reduced solution.
const WEAK_RESIDUAL_TOL: f64 = 1e-8;
/// Slack on the observed tail contraction ratio above `C / |tail symbol|`.
const RATIO_SLACK: f64 = 0.05;
const ACTION_IDENTITY_TOL: f64 = 1e-10;
const GRADIENT_TOL: f64 = 1e-5;
const GRADIENT_STEP: f64 = 1e-4;
const PROFILE_TOL: f64 = 1e-6;
const PROFILE_POINTS: usize = 512;
const ISOSPECTRAL_TOL: f64 = 1e-10;
const PERSYMMETRY_TABLE_TOL: f64 = 1e-9;
const ENERGY_TOL: f64 = 1e-6;
const LEAKAGE_TOL: f64 = 1e-8;
const EQUAL_MASS_TOL: f64 = 1e-10;
/// Smallest chain size given a `4/pi^2` limit table; the ratio approaches
/// the limit like `1 + 2/N`, so small chains say nothing about it.
const RATIO_MIN_SIZE: usize = 25;
/// Number of chain mode shapes written as plot series.
const SHAPES_PLOTTED: usize = 5;

/// `4 / pi^2`, the limit of the top equal-mass to string eigenvalue ratio.
pub fn ratio_limit() -> f64 {
    4.0 / (PI * PI)
}

/// Outputs kept between stages.
#[derive(Default)]
struct Context {
    static_result: Option<ReductionResult>,
    wave_result: Option<ReductionResult>,
    chain: Option<ChainReconstruction>,
}

struct StageOutput {
    summary: BTreeMap<String, Value>,
    tables: Vec<Table>,
    plots: Vec<PlotSeries>,
}

impl StageOutput {
    fn new() -> Self {
        Self { summary: BTreeMap::new(), tables: Vec::new(), plots: Vec::new() }
    }

    fn put(&mut self, key: &str, value: impl serde::Serialize) {
        self.summary.insert(key.into(), serde_json::to_value(value).expect("summary value serialises"));
    }
}

/// Run `stages` (deduplicated, in pipeline order) and collect the report.
///
/// `simulate-chain` needs `reconstruct-chain` in the same run. `compare-spectra`
/// stands alone; with a reconstructed chain and a reduced solution of matching
/// size it adds the modal comparison.
pub fn run_pipeline(config: &RunConfig, stages: &[Stage]) -> Result<RunReport> {
    let mut order: Vec<Stage> = stages.to_vec();
    order.sort();
    order.dedup();
    if order.contains(&Stage::SimulateChain) && !order.contains(&Stage::ReconstructChain) {
        return Err(Error::Config("stage simulate-chain requires reconstruct-chain".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut ctx = Context::default();
    let mut report = RunReport {
        provenance: Provenance {
            schema: SCHEMA.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config_hash: config.hash(),
            seed: config.seed,
            generated_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        },
        stages: Vec::new(),
        tables: Vec::new(),
        plots: Vec::new(),
        passed: true,
    };
    for stage in order {
        let out = match stage {
            Stage::ReduceStatic => reduce(config, &mut ctx, &mut rng, ProblemKind::Static),
            Stage::ReduceWave => reduce(config, &mut ctx, &mut rng, ProblemKind::Wave),
            Stage::ReconstructChain => reconstruct(config, &mut ctx),
            Stage::SimulateChain => simulate(config, &ctx),
            Stage::CompareSpectra => compare(config, &ctx),
        }
        .map_err(|e| Error::Stage { stage: stage.name().into(), source: Box::new(e) })?;
        report.stages.push(StageReport { stage, status: StageStatus::Ok, summary: out.summary });
        report.tables.extend(out.tables);
        report.plots.extend(out.plots);
    }
    report.passed = report.tables.iter().all(|t| t.passed);
    Ok(report)
}

fn reduce(config: &RunConfig, ctx: &mut Context, rng: &mut ChaCha8Rng, kind: ProblemKind) -> Result<StageOutput> {
    let (stage, prefix, geometry) = match kind {
        ProblemKind::Static => (Stage::ReduceStatic, "static", config.static_geometry()?),
        ProblemKind::Wave => (Stage::ReduceWave, "wave", config.wave_geometry()?),
    };
    let problem = config.problem(&geometry)?;
    let res = solve_reduced(&problem)?;
    let modes = problem.modes();
    let mut out = StageOutput::new();
    out.put("cutoff", modes.cutoff());
    out.put("k_max", modes.k_max());
    if kind == ProblemKind::Wave {
        out.put("j_max", modes.j_max());
    }
    out.put("lipschitz", problem.nonlinearity().lipschitz());
    out.put("lipschitz_estimated", problem.nonlinearity().lipschitz_is_estimated());
    out.put("composition", kind.composition());
    out.put("contraction_ratio_theoretical", res.contraction_ratio_theoretical);
    out.put("contraction_ratio_observed", res.contraction_ratio_observed);
    out.put("method", res.method);
    out.put("iterations", res.iterations);
    out.put("residual_trace", &res.trace);
    out.put("residual_core", res.residual_core);
    out.put("residual_tail", res.residual_tail);
    out.put("weak_residual", &res.weak_residual);
    out.put("last_band_norm", res.last_band_norm);
    out.put("tail_iterations", res.tail_log.iterations);
    let core: Vec<f64> = modes.core_indices().iter().map(|&i| res.solution.coeffs()[i]).collect();
    out.put("core_coefficients", &core);

    let ratios: Vec<TableRow> = res
        .tail_log
        .ratios
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, r)| TableRow::new(i + 2, *r, res.contraction_ratio_theoretical))
        .collect();
    out.tables.push(Table::new(
        format!("{prefix}-tail-contraction"),
        stage,
        "observed step ratio of the tail iteration (index: iteration) against C / |tail symbol|",
        Criterion::UpperBound,
        RATIO_SLACK,
        ratios,
    ));

    let r = res.solution.apply_operator(problem.symbol())?.sub(&problem.nemitski(&res.solution)?)?;
    out.tables.push(Table::new(
        format!("{prefix}-weak-residual"),
        stage,
        "weak residual of the truncated equation per retained mode (index: flat coefficient index + 1)",
        Criterion::Absolute,
        WEAK_RESIDUAL_TOL,
        r.coeffs().iter().enumerate().map(|(i, v)| TableRow::new(i + 1, *v, 0.0)).collect(),
    ));

    let mut identity = Vec::with_capacity(config.property_samples);
    for s in 0..config.property_samples {
        let mut mu = problem.zero_field();
        for i in modes.core_indices() {
            mu.coeffs_mut()[i] = rng.gen_range(-1.0..1.0);
        }
        let a = functional_i_and_n(&problem, &mu)?;
        identity.push(TableRow::new(s + 1, a.i, a.direct));
    }
    out.tables.push(Table::new(
        format!("{prefix}-action-identity"),
        stage,
        "harmonic action plus coupling against J[mu + eta(mu)] at seeded random core points",
        Criterion::Absolute,
        ACTION_IDENTITY_TOL,
        identity,
    ));

    let grad = reduced_gradient_fd(&problem, &res.mu, GRADIENT_STEP)?;
    out.put("gradient_norm", grad.iter().map(|g| g * g).sum::<f64>().sqrt());
    out.tables.push(Table::new(
        format!("{prefix}-gradient"),
        stage,
        "central-difference gradient of the reduced action at the solution (index: core slot + 1)",
        Criterion::Absolute,
        GRADIENT_TOL,
        grad.iter().enumerate().map(|(i, g)| TableRow::new(i + 1, *g, 0.0)).collect(),
    ));

    let length = geometry.length();
    match kind {
        ProblemKind::Static => {
            let rec = reconstruct_full_solution(&res, &uniform_points(length, 0.0, PROFILE_POINTS))?;
            let profile: Vec<(f64, f64)> = rec.points.iter().map(|p| p.1).zip(rec.values.iter().copied()).collect();
            if let Some(c) = constant_source(problem.nonlinearity()) {
                let rows = profile
                    .iter()
                    .enumerate()
                    .map(|(i, (x, u))| TableRow::new(i, *u, 0.5 * c * x * (length - x)))
                    .collect();
                out.tables.push(Table::new(
                    "static-profile-analytic",
                    stage,
                    "u on a uniform grid against c x (L - x) / 2 for a constant source c",
                    Criterion::Absolute,
                    PROFILE_TOL,
                    rows,
                ));
            }
            out.put("h_norm", rec.h_norm);
            out.plots.push(PlotSeries::new("static-solution", "static solution u(x)", ("x", "u"), profile));
        }
        ProblemKind::Wave => {
            let t = geometry.horizon().unwrap_or(0.0);
            let rec = reconstruct_full_solution(&res, &uniform_points(length, 0.5 * t, PROFILE_POINTS))?;
            out.put("h_norm", rec.h_norm);
            out.plots.push(PlotSeries::new(
                "wave-mid-time",
                "wave solution u(T/2, x)",
                ("x", "u"),
                rec.points.iter().map(|p| p.1).zip(rec.values.iter().copied()).collect(),
            ));
            let ns = modes.n_space();
            let omega: Vec<f64> = (1..=modes.j_max()).map(|j| geometry.temporal_frequency(j)).collect();
            let times: Vec<f64> = (0..=200).map(|a| t * a as f64 / 200.0).collect();
            for s in 0..modes.ell() {
                let (k, part) = modes.space_slot(s);
                let series = times
                    .iter()
                    .map(|&tt| {
                        let v = omega.iter().enumerate().map(|(j, w)| res.mu.coeffs()[j * ns + s] * (w * tt).sin()).sum();
                        (tt, v)
                    })
                    .collect();
                out.plots.push(PlotSeries::new(
                    format!("wave-core-profile-{}-{k}", part_tag(part)),
                    "core profiles mu_k(t)",
                    ("t", "mu_k"),
                    series,
                ));
            }
        }
    }
    out.plots.push(PlotSeries::new(
        format!("{prefix}-tail-steps"),
        "tail iteration steps",
        ("iteration", "step"),
        res.tail_log.steps.iter().enumerate().map(|(i, s)| ((i + 1) as f64, *s)).collect(),
    ));

    match kind {
        ProblemKind::Static => ctx.static_result = Some(res),
        ProblemKind::Wave => ctx.wave_result = Some(res),
    }
    Ok(out)
}

fn part_tag(part: Part) -> &'static str {
    match part {
        Part::Sin => "sin",
        Part::Cos => "cos",
    }
}

fn constant_source(nl: &Nonlinearity) -> Option<f64> {
    match NonlinearitySpec::from(nl.clone()) {
        NonlinearitySpec::Zero => Some(0.0),
        NonlinearitySpec::Constant { value } => Some(value),
        _ => None,
    }
}

fn reconstruct(config: &RunConfig, ctx: &mut Context) -> Result<StageOutput> {
    let stage = Stage::ReconstructChain;
    let spectrum = match &config.chain.spectrum {
        Some(values) => Spectrum::new(values.clone())?,
        None => string_spectrum(config.chain.n, config.chain_length())?,
    };
    let rec = reconstruct_chain(&spectrum, config.chain.total_mass)?;
    let chain = &rec.chain;
    let mut out = StageOutput::new();
    out.put("n", chain.n());
    out.put("total_mass", chain.total_mass());
    out.put("masses", chain.masses());
    out.put("springs", chain.springs());
    out.put("weights", rec.weights.values());
    out.put("jacobi_diag", rec.jacobi.diag());
    out.put("jacobi_offdiag", rec.jacobi.offdiag());
    out.put("persymmetry_defect", chain.persymmetry_defect());
    let map = build_modal_map(chain)?;
    out.put("mass_orthonormality_defect", map.mass_orthonormality_defect());

    let forward = eigen_tridiagonal(&chain_to_jacobi(chain)?, false).values;
    out.tables.push(Table::new(
        "chain-eigenvalues",
        stage,
        "eigenvalues of the reconstructed chain against the target spectrum",
        Criterion::Relative,
        ISOSPECTRAL_TOL,
        forward.iter().zip(spectrum.values()).enumerate().map(|(i, (v, r))| TableRow::new(i + 1, *v, *r)).collect(),
    ));
    out.tables.push(mirror_table("chain-masses", "masses against their mirror images", chain.masses()));
    out.tables.push(mirror_table("chain-springs", "springs against their mirror images", chain.springs()));

    let profile = |v: &[f64]| v.iter().enumerate().map(|(i, m)| ((i + 1) as f64, *m)).collect();
    out.plots.push(PlotSeries::new("chain-masses", "mass profile", ("bead", "mass"), profile(chain.masses())));
    out.plots.push(PlotSeries::new("chain-springs", "spring profile", ("spring", "stiffness"), profile(chain.springs())));
    for k in 0..chain.n().min(SHAPES_PLOTTED) {
        out.plots.push(PlotSeries::new(
            format!("chain-mode-shape-{}", k + 1),
            "chain mode shapes",
            ("bead", "displacement"),
            profile(&map.mode_shape(k)),
        ));
    }
    ctx.chain = Some(rec);
    Ok(out)
}

fn mirror_table(name: &str, description: &str, v: &[f64]) -> Table {
    let rows = v.iter().zip(v.iter().rev()).enumerate().map(|(i, (a, b))| TableRow::new(i + 1, *a, *b)).collect();
    Table::new(name, Stage::ReconstructChain, description, Criterion::Relative, PERSYMMETRY_TABLE_TOL, rows)
}

fn simulate(config: &RunConfig, ctx: &Context) -> Result<StageOutput> {
    let stage = Stage::SimulateChain;
    let chain: &SpringMassChain = &ctx.chain.as_ref().ok_or_else(|| Error::Config("no reconstructed chain".into()))?.chain;
    let c = &config.chain;
    let map = build_modal_map(chain)?;
    let excited = c.initial_mode - 1;
    let init = ChainState {
        positions: map.mode_shape(excited).iter().map(|v| c.amplitude * v).collect(),
        velocities: vec![0.0; chain.n()],
    };
    let nl = if c.linear { Nonlinearity::zero() } else { config.nonlinearity.clone() };
    let opts = SimulationOptions { sample_every: c.sample_every, integrator: c.integrator, ..SimulationOptions::new(c.dt, c.steps) };
    let rec = simulate_with_map(chain, &map, &nl, &init, &opts)?;

    let mut out = StageOutput::new();
    out.put("integrator", c.integrator);
    out.put("dt", c.dt);
    out.put("steps", c.steps);
    out.put("linear", c.linear);
    out.put("relative_energy_drift", rec.relative_energy_drift());
    let e0 = rec.energies[0];
    out.tables.push(Table::new(
        "chain-energy",
        stage,
        "total energy at each sample (index: sample) against the initial energy",
        Criterion::Relative,
        ENERGY_TOL,
        rec.energies.iter().enumerate().map(|(i, e)| TableRow::new(i, *e, e0)).collect(),
    ));
    let leakage: Vec<TableRow> = (0..chain.n())
        .filter(|k| *k != excited)
        .map(|k| TableRow::new(k + 1, rec.modal.iter().map(|q| q[k].abs()).fold(0.0, f64::max), 0.0))
        .collect();
    out.put("max_leakage", leakage.iter().map(|r| r.abs_err).fold(0.0, f64::max));
    out.tables.push(Table::new(
        "chain-modal-leakage",
        stage,
        "largest modal amplitude reached by each mode that was not excited",
        Criterion::Absolute,
        LEAKAGE_TOL,
        leakage,
    ));

    out.plots.push(PlotSeries::new(
        "chain-energy",
        "chain energy",
        ("t", "E"),
        rec.times.iter().copied().zip(rec.energies.iter().copied()).collect(),
    ));
    for k in 0..chain.n() {
        out.plots.push(PlotSeries::new(
            format!("chain-modal-{}", k + 1),
            "chain modal trajectories",
            ("t", "q_k"),
            rec.times.iter().copied().zip(rec.modal.iter().map(|q| q[k])).collect(),
        ));
    }
    for i in 0..chain.n() {
        out.plots.push(PlotSeries::new(
            format!("chain-bead-{}", i + 1),
            "chain bead trajectories",
            ("t", "u_i"),
            rec.times.iter().copied().zip(rec.states.iter().map(|s| s.positions[i])).collect(),
        ));
    }
    Ok(out)
}

fn compare(config: &RunConfig, ctx: &Context) -> Result<StageOutput> {
    let stage = Stage::CompareSpectra;
    let length = config.chain_length();
    let limit = ratio_limit();
    let mut out = StageOutput::new();
    let mut ratios = BTreeMap::new();
    for &n in &config.compare.sizes {
        let string = string_spectrum(n, length)?;
        let formula = equal_mass_chain_spectrum(n, length)?;
        let numeric = eigen_tridiagonal(&chain_to_jacobi(&SpringMassChain::equal_mass(n, length)?)?, false).values;
        out.tables.push(Table::new(
            format!("equal-mass-N{n}"),
            stage,
            "equal-mass chain eigenvalues by bisection against the closed form",
            Criterion::Relative,
            EQUAL_MASS_TOL,
            numeric.iter().zip(formula.values()).enumerate().map(|(i, (v, r))| TableRow::new(i + 1, *v, *r)).collect(),
        ));
        out.tables.push(Table::new(
            format!("string-vs-equal-mass-N{n}"),
            stage,
            "equal-mass chain eigenvalues against the string; the gap never exceeds 1 - 4/pi^2",
            Criterion::Relative,
            1.0 - limit,
            formula.values().iter().zip(string.values()).enumerate().map(|(i, (v, r))| TableRow::new(i + 1, *v, *r)).collect(),
        ));
        let top = formula.values()[n - 1] / string.values()[n - 1];
        ratios.insert(format!("N{n}"), top);
        if n >= RATIO_MIN_SIZE {
            out.tables.push(Table::new(
                format!("ratio-limit-N{n}"),
                stage,
                "top equal-mass to string eigenvalue ratio against 4/pi^2",
                Criterion::Relative,
                if n >= 200 { 0.01 } else { 0.05 },
                vec![TableRow::new(n, top, limit)],
            ));
        }
        let panel = format!("first {n} eigenvalues");
        let series = |v: &[f64]| v.iter().enumerate().map(|(i, l)| ((i + 1) as f64, *l)).collect();
        out.plots.push(PlotSeries::new(format!("spectra-N{n}-string"), panel.clone(), ("k", "lambda"), series(string.values())));
        out.plots.push(PlotSeries::new(format!("spectra-N{n}-equal-mass"), panel, ("k", "lambda"), series(formula.values())));
        out.plots.push(PlotSeries::new(
            format!("spectra-N{n}-ratio"),
            format!("eigenvalue ratio, N = {n}"),
            ("k", "ratio"),
            formula.values().iter().zip(string.values()).enumerate().map(|(i, (a, b))| ((i + 1) as f64, a / b)).collect(),
        ));
    }
    out.put("top_ratio", ratios);
    out.put("ratio_limit", limit);

    let reduced = ctx
        .wave_result
        .as_ref()
        .filter(|r| r.solution.modes().spatial() == SpatialBasis::Fixed)
        .or(ctx.static_result.as_ref());
    match (&ctx.chain, reduced) {
        (Some(rec), Some(res)) if rec.chain.n() == res.solution.modes().ell() => {
            let map = build_modal_map(&rec.chain)?;
            let cmp = modal_compare(&rec.chain, res, &map)?;
            out.put("modal_comparison", json!({ "kind": res.kind, "max_rel_frequency_error": cmp.max_rel_frequency_error }));
            out.tables.push(Table::new(
                "modal-frequencies",
                stage,
                "chain eigenvalues against the squared frequencies of the retained continuum modes",
                Criterion::Relative,
                ISOSPECTRAL_TOL,
                cmp.frequencies.iter().map(|r| TableRow::new(r.mode, r.chain, r.reference)).collect(),
            ));
            if let Some(tr) = cmp.trajectory {
                out.tables.push(Table::new(
                    "modal-trajectory",
                    stage,
                    "sup over time of chain modal motion minus mu_k(t); zero for linear problems, otherwise the nonlinear coupling",
                    Criterion::Absolute,
                    LEAKAGE_TOL,
                    tr.per_mode_sup.iter().enumerate().map(|(s, d)| TableRow::new(s + 1, *d, 0.0)).collect(),
                ));
                for s in 0..tr.per_mode_sup.len() {
                    out.plots.push(PlotSeries::new(
                        format!("modal-trajectory-{}-chain", s + 1),
                        "chain against reduced modal trajectories",
                        ("t", "q_k"),
                        tr.times.iter().copied().zip(tr.chain.iter().map(|q| q[s])).collect(),
                    ));
                    out.plots.push(PlotSeries::new(
                        format!("modal-trajectory-{}-reduced", s + 1),
                        "chain against reduced modal trajectories",
                        ("t", "mu_k"),
                        tr.times.iter().copied().zip(tr.reduced.iter().map(|q| q[s])).collect(),
                    ));
                }
            }
        }
        (Some(rec), Some(res)) => out.put(
            "modal_comparison",
            format!("skipped: chain has {} beads, reduced core has {} spatial modes", rec.chain.n(), res.solution.modes().ell()),
        ),
        _ => out.put("modal_comparison", "skipped: needs reconstruct-chain and a reduce stage"),
    }
    Ok(out)
}
