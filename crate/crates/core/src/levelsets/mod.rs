//! Scalar fields on grids, isocontour extraction and path components.

mod approx;
mod components;
mod field;
mod marching;
mod region;

pub use approx::{eps_a_approximates, max_deviation};
pub use components::{classify_component, link_components, Classification, LevelComponent, Polyline};
pub use field::{sample_grid, sample_grid_3d, ScalarField, ScalarField3};
pub use marching::{marching_squares, Contour, Segment, LEVEL_NUDGE};
pub use region::{region_components, region_components_3d, RegionComponents, RegionInfo};
