//! Numerical diagnostics: `eta` curves, Carleson sums, profiles, narrowness probes and
//! the evidence report.
//!
//! Work over probe grids is split into fixed chunks and reduced in chunk order, so
//! results do not depend on the size of the thread pool.

pub mod carleson;
pub mod eta;
pub mod mesh;
pub mod narrow;
pub mod profiles;
pub mod report;

pub use carleson::{box_sup, cn_constant, cn_rows, s_t_sum};
pub use eta::{eta_curve, kappa, uniform_t_grid, EtaCurve, EtaSample, DEFAULT_R_MAX};
pub use mesh::HyperbolicMesh;
pub use narrow::{narrowness_probe, NarrowMode, NarrowResult, NarrowSearch};
pub use profiles::{separation_profile, thin_profile, ThinEntry};
pub use report::{classify, ClassifyConfig, Evidence, Report, Verdict};
