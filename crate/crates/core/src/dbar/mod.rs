//! The ∂̄-problem ∂̄u = ρ: densities on mapped patches, singular-kernel
//! quadrature, four explicit solvers and their numerical certificates.

mod density;
mod patch;
mod quadrature;
mod residual;
mod solvers;

pub use density::{CorridorGrid, DensityField, Support};
pub use patch::{graded_breaks, theta_top, uniform_breaks, Patch, PatchDensity, PatchMap};
pub use quadrature::{AreaQuadrature, NodeRef, QNode, QuadratureSpec};
pub use residual::{
    cr_residual, dbar_residual, fd_dbar, scaled_cr_residual, plateau_from_rings, plateau_scan, PlateauLevel, PlateauReport, PlateauSpec,
    ResidualReport,
};
pub use solvers::{
    jones_alpha_inverse, jones_solution, standard_cauchy_solution, tangential_contour_term, tangential_solution,
    transversal_correction, transversal_solution, AlphaReport, JonesConfig, SolutionField, SolutionMeta, SolverKind,
    TangentialConfig,
};
