//! The refinement driver: hierarchical refinement of restricted edges,
//! triangles and tets, with topological-disk repair, encroachment
//! cascades, rollback of topology-changing insertions, acute-apex collars
//! and an optional frontal mode with size-optimal off-centres.

mod audit;
mod bad;
mod bounds;
mod config;
mod driver;
mod maintain;
mod offcentre;
mod protect;
mod queue;
mod steps;

use thiserror::Error;

pub use audit::{audit, AuditReport, Certificate};
pub use bad::{bad_simplex_1, bad_simplex_2, bad_simplex_3, rho_2, rho_3};
pub use bounds::{check_termination_bounds, TerminationBounds};
pub use config::{ConfigError, Mode, RefineConfig, SizingField, SizingGrid};
pub use driver::{refine, PhaseTimings, RefineStats, Refiner, RollbackRecord, Status};
pub use offcentre::{
    select_refinement_point, solve_length, type2_offcentre_edge, type2_offcentre_tet, type2_offcentre_tri, Kind,
    OffCentre,
};
pub use protect::{protect_sharp_angles, ProtectError, ProtectedFeature};
pub use queue::{Priority, RefineQueue};

use crate::delaunay::KernelError;
use crate::oracle::ComplexError;

#[derive(Debug, Error)]
pub enum RefineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Protect(#[from] ProtectError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("triangulation failure: {0}")]
    Kernel(#[from] KernelError),
}
