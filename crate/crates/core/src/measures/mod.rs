//! Lebesgue, Gaussian and density measures of bodies, with error estimates,
//! and probes for density properties.

mod density;
mod estimate;
mod measure;
mod volume;

pub use density::{
    ball_volume, is_beta_concave, is_radially_decreasing, sphere_area, AxisDensity, Concavity, MeasureSpec,
    ProbeReport, RadialDensity,
};
pub use estimate::{Estimate, McBudget, Method};
pub use measure::{
    as_box, density_measure, gaussian_measure, gaussian_measure_mc, polygon_product_mass, polygon_radial_mass,
    QUAD_TOL,
};
pub use volume::{volume, volume_exact, volume_mc, MEMBERSHIP_TOL};
