//! Exact expected hypervolume improvement (EHVI) for multiobjective
//! Bayesian optimization, in two and three objectives.
//!
//! Given a mutually non-dominated front P with reference point r and an
//! independent Gaussian predictive distribution (μ, σ), the EHVI is the
//! expectation of the hypervolume improvement of a draw from that
//! distribution — the standard infill criterion of hypervolume-based
//! efficient global optimization. This crate computes it exactly:
//!
//! * 2-D: [`ehvi_2d_fast`] in O(n²) with constant-time correction updates,
//!   next to the [`ehvi_2d_naive`] baseline it is validated against.
//! * 3-D: four exact schemes that decompose the integral over grid cells —
//!   [`ehvi_3d_8term`], [`ehvi_3d_5term`], [`ehvi_3d_2term`] and the O(n³)
//!   [`ehvi_3d_slice`] — plus [`ehvi_3d_batch`] to amortize the geometry
//!   across many candidates.
//! * Cross-validation oracles: seeded Monte Carlo ([`ehvi_mc`]) and a
//!   deterministic tensor-grid quadrature ([`ehvi_quadrature`]).
//! * Exact hypervolume and hypervolume-improvement primitives in 2-D/3-D.
//!
//! The `ehvi` binary exposes all of it as a workbench CLI (`compute`,
//! `verify`, `bench`, `gen`).
//!
//! ```
//! use ehvi::{validate_front, GaussianPredictor, Point};
//!
//! let front = validate_front(
//!     vec![
//!         Point::new(vec![1.0, 2.0, 3.0]).unwrap(),
//!         Point::new(vec![2.0, 3.0, 1.0]).unwrap(),
//!         Point::new(vec![3.0, 1.0, 2.0]).unwrap(),
//!     ],
//!     Point::new(vec![0.0, 0.0, 0.0]).unwrap(),
//! )
//! .unwrap();
//! let g = GaussianPredictor::new(vec![3.0; 3], vec![2.0; 3]).unwrap();
//! let value = ehvi::ehvi_3d_slice(&front, &g);
//! assert!((ehvi::ehvi_3d_8term(&front, &g) - value).abs() <= 1e-12 * value);
//! ```

mod ehvi2d;
mod ehvi3d;
mod hypervolume;
mod kahan;
mod normal;
mod oracle;
mod types;
pub mod workbench;

pub use ehvi2d::{ehvi_2d_fast, ehvi_2d_naive};
pub use ehvi3d::{
    build_height_arrays, ehvi_3d_2term, ehvi_3d_5term, ehvi_3d_8term, ehvi_3d_batch,
    ehvi_3d_slice, CellGrid3, HeightArrays, Scheme3, SliceLayer,
};
pub use hypervolume::{
    clipped_dominated_area_2d, hypervolume_2d, hypervolume_3d, hypervolume_improvement,
    BoxError, ClippedBox,
};
pub use normal::{partial_ei_1d, psi, std_normal_cdf, std_normal_pdf};
pub use oracle::{ehvi_mc, ehvi_quadrature, ConvergenceFailure, McResult};
pub use types::{
    dominates, validate_front, Front, FrontError, GaussianPredictor, Point, PredictorError,
};
