//! Motion of spring–mass chains in physical and modal coordinates, and their
//! comparison with the reduced continuum system.

mod compare;
mod modal;
mod simulate;

pub use compare::{modal_compare, FrequencyRow, ModalComparison, TrajectoryDiscrepancy};
pub use modal::{build_modal_map, ModalMap};
pub use simulate::{
    simulate_chain, simulate_with_map, total_energy, ChainState, Integrator, SimulationOptions, TrajectoryRecord,
    STEP_GUARD,
};
