//! Simulated computed-tomography problems: phantom, forward operator, noisy
//! data and the cross-validation split.

pub mod io;
mod phantom;
mod radon;
mod sinogram;

pub use phantom::{render_ellipses, shepp_logan, Ellipse, SHEPP_LOGAN};
pub use radon::{
    build_radon, radon_from_rays, trace_ray, Geometry, GeometryKind, MIN_INTERSECTION,
};
pub use sinogram::{add_noise, split_cv, Sinogram};
