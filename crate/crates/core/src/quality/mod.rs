//! Element quality measures and their aggregation into reports.
//!
//! Area-length and volume-length ratios are normalised so that equilateral
//! triangles and regular tets score one.

mod metrics;
mod report;

pub use metrics::{area_length, dihedral_angles, relative_edge_length, triangle_angles, volume_length};
pub use report::{build_report, relative_lengths, Metric, Histogram, QualityReport, Summary, BINS};
