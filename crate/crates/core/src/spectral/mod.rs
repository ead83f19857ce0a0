//! Spectral bases, operator symbols and the grid transform shared by the
//! static and wave reductions.

mod field;
mod geometry;
mod modes;
mod symbol;
mod transform;

pub use field::{SpaceTimeField, Synthesis};
pub use geometry::{Geometry, SpatialBasis};
pub use modes::{Mode, ModeSet, Part};
pub use symbol::{
    dalembert_symbol, select_cutoff, string_eigenpair, OperatorSymbol, StringMode, SymbolKind,
    DEFAULT_SIGMA_MIN,
};
pub use transform::{GridValues, Resolution, Transform, MIN_OVERSAMPLING};

