use super::nonlinearity::Nonlinearity;
use crate::error::Result;
use crate::spectral::{Resolution, SpaceTimeField, Transform};

/// Expansion of `f(u)` over the modes of `field`: synthesize on the grid,
/// apply `f` pointwise, project back.
///
/// The grid must oversample the highest retained mode at least four times.
pub fn apply_nemitski(nl: &Nonlinearity, field: &SpaceTimeField, resolution: Resolution) -> Result<SpaceTimeField> {
    let transform = Transform::new(field.geometry(), field.modes(), resolution)?;
    nemitski_on(nl, field, &transform)
}

pub(crate) fn nemitski_on(nl: &Nonlinearity, field: &SpaceTimeField, transform: &Transform) -> Result<SpaceTimeField> {
    let mut values = transform.synthesize(field.coeffs());
    for v in &mut values {
        *v = nl.eval(*v);
    }
    SpaceTimeField::from_coeffs(field.geometry(), field.modes(), transform.project(&values))
}
