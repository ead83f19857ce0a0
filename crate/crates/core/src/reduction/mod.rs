//! Core/tail splitting of the static and wave problems: the tail is solved by
//! a contraction, leaving a finite bifurcation equation on the core.

mod functional;
mod nemitski;
mod nonlinearity;
mod phi;
mod problem;
mod reconstruct;
mod solve;
mod tail;

pub use functional::{
    functional_i_and_n, functional_j, quadratic_action, reduced_action, reduced_gradient_fd, ReducedAction,
};
pub use nemitski::apply_nemitski;
pub use nonlinearity::{Nonlinearity, NonlinearitySpec};
pub use phi::{reduced_rhs_phi, PhiTable};
pub use problem::{Discretisation, ProblemKind, ReductionProblem, Tolerances, DEFAULT_WAVE_K_MAX};
pub use reconstruct::{reconstruct_full_solution, uniform_points, Reconstruction};
pub use solve::{
    bifurcation_residual, solve_reduced, solve_static_reduced, solve_wave_reduced, weak_residual, ReductionResult,
    SolveMethod, WeakResidual,
};
pub use tail::{tail_fixed_point, tail_fixed_point_from, tail_residual, FixedPointLog};
