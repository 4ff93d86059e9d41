//! Independent estimators used to validate the exact schemes: seeded Monte
//! Carlo integration and a deterministic tensor-grid quadrature.
//!
//! Both evaluate the integrand HI(p)·PDF(p) directly through the geometric
//! hypervolume-improvement routine and never touch the ψ-based cell
//! decompositions, so agreement with the exact schemes checks two genuinely
//! different computation paths against each other.

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::hypervolume::ImprovementEval;
use crate::kahan::KahanSum;
use crate::normal::std_normal_pdf;
use crate::types::{Front, GaussianPredictor};

/// Result of a Monte Carlo EHVI estimation.
#[derive(Debug, Clone, PartialEq)]
pub struct McResult {
    pub estimate: f64,
    pub trials: u64,
    /// Sample standard deviation of the per-trial improvements over √trials;
    /// 0 for a single trial.
    pub standard_error: f64,
    pub seed: u64,
}

/// Monte Carlo EHVI: mean hypervolume improvement over normal draws from the
/// predictor. ChaCha12 seeded with `seed`; coordinates are drawn
/// dimension-major per trial, so identical inputs reproduce bit-identical
/// results. Samples falling below the reference are clipped to zero
/// improvement by the improvement routine itself.
pub fn ehvi_mc(front: &Front, g: &GaussianPredictor, trials: u64, seed: u64) -> McResult {
    assert!(trials >= 1, "ehvi_mc requires at least one trial");
    let m = front.dim();
    assert_eq!(g.dim(), m, "predictor dimension must match the front");
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut eval = ImprovementEval::new(front);
    let (mu, sigma) = (g.mu(), g.sigma());
    let mut sample = vec![0.0; m];
    // Welford accumulation of mean and M2.
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for k in 1..=trials {
        for d in 0..m {
            let z: f64 = rng.sample(StandardNormal);
            sample[d] = mu[d] + sigma[d] * z;
        }
        let imp = eval.eval(&sample);
        let delta = imp - mean;
        mean += delta / k as f64;
        m2 += delta * (imp - mean);
    }
    let standard_error = if trials > 1 {
        (m2 / (trials - 1) as f64 / trials as f64).sqrt()
    } else {
        0.0
    };
    McResult {
        estimate: mean,
        trials,
        standard_error,
        seed,
    }
}

/// Quadrature refinement stalled before meeting the tolerance at the
/// cells-per-dimension cap; carries the last two extrapolated estimates.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("ConvergenceFailure: quadrature stalled at {last} (previous {previous})")]
pub struct ConvergenceFailure {
    pub last: f64,
    pub previous: f64,
}

/// Relative tolerance on successive refinements.
const QUAD_TOL: f64 = 1e-7;
/// Extrapolation depth; midpoint error expands in even powers of h, so a few
/// Richardson columns reach machine level long before the cell cap.
const MAX_COLUMNS: usize = 4;

/// Per-dimension composite grid: breakpoints at the front coordinates keep
/// the integrand smooth inside every cell, which the extrapolation needs.
struct Axis {
    /// Segment boundaries covering [max(r, μ−8σ), μ+8σ].
    breaks: Vec<f64>,
    /// Base cell count per segment (doubled at every refinement level).
    cells: Vec<usize>,
}

fn axis(front: &Front, g: &GaussianPredictor, d: usize) -> Option<Axis> {
    let r = front.reference()[d];
    let lo = r.max(g.mu()[d] - 8.0 * g.sigma()[d]);
    let hi = g.mu()[d] + 8.0 * g.sigma()[d];
    if hi <= lo {
        return None; // predictive mass lies entirely below the reference
    }
    let mut breaks = vec![lo];
    let mut inner: Vec<f64> = front
        .points()
        .iter()
        .map(|p| p[d])
        .filter(|&c| c > lo && c < hi)
        .collect();
    inner.sort_unstable_by(f64::total_cmp);
    inner.dedup();
    breaks.extend(inner);
    breaks.push(hi);
    let total: f64 = hi - lo;
    let base = 16.0;
    let cells = breaks
        .windows(2)
        .map(|w| (base * (w[1] - w[0]) / total).round().max(1.0) as usize)
        .collect();
    Some(Axis { breaks, cells })
}

impl Axis {
    fn cells_at(&self, level: u32) -> usize {
        self.cells.iter().map(|&c| c << level).sum()
    }

    /// Midpoint nodes and weights φ_{μ,σ}(x)·Δx at the given level.
    fn nodes(&self, level: u32, mu: f64, sigma: f64) -> (Vec<f64>, Vec<f64>) {
        let mut xs = Vec::with_capacity(self.cells_at(level));
        let mut ws = Vec::with_capacity(xs.capacity());
        for (w, &c0) in self.breaks.windows(2).zip(&self.cells) {
            let k = c0 << level;
            let h = (w[1] - w[0]) / k as f64;
            for i in 0..k {
                let x = w[0] + (i as f64 + 0.5) * h;
                xs.push(x);
                ws.push(h * std_normal_pdf((x - mu) / sigma) / sigma);
            }
        }
        (xs, ws)
    }
}

fn midpoint_estimate(
    axes: &[Axis],
    g: &GaussianPredictor,
    eval: &mut ImprovementEval,
    level: u32,
) -> f64 {
    let per_dim: Vec<(Vec<f64>, Vec<f64>)> = axes
        .iter()
        .enumerate()
        .map(|(d, ax)| ax.nodes(level, g.mu()[d], g.sigma()[d]))
        .collect();
    let mut total = KahanSum::new();
    if axes.len() == 2 {
        let (xs, wx) = &per_dim[0];
        let (ys, wy) = &per_dim[1];
        for (x, wx) in xs.iter().zip(wx) {
            for (y, wy) in ys.iter().zip(wy) {
                let hi = eval.eval(&[*x, *y]);
                if hi > 0.0 {
                    total.add(hi * wx * wy);
                }
            }
        }
    } else {
        let (xs, wx) = &per_dim[0];
        let (ys, wy) = &per_dim[1];
        let (zs, wz) = &per_dim[2];
        for (x, wx) in xs.iter().zip(wx) {
            for (y, wy) in ys.iter().zip(wy) {
                let wxy = wx * wy;
                for (z, wz) in zs.iter().zip(wz) {
                    let hi = eval.eval(&[*x, *y, *z]);
                    if hi > 0.0 {
                        total.add(hi * wxy * wz);
                    }
                }
            }
        }
    }
    total.value()
}

/// Deterministic EHVI oracle: tensor-product midpoint integration of
/// HI(p)·PDF(p) over [μ − 8σ, μ + 8σ] clipped below by the reference, with
/// Richardson extrapolation across grid doublings. Refinement stops when
/// successive estimates agree to 1e−7 relative or `cells_per_dim` would be
/// exceeded; the latter without convergence is a [`ConvergenceFailure`].
pub fn ehvi_quadrature(
    front: &Front,
    g: &GaussianPredictor,
    cells_per_dim: usize,
) -> Result<f64, ConvergenceFailure> {
    let m = front.dim();
    assert!(m == 2 || m == 3, "quadrature supports m in {{2, 3}}");
    assert_eq!(g.dim(), m, "predictor dimension must match the front");
    assert!(cells_per_dim >= 16, "cells_per_dim must be at least 16");
    let mut axes = Vec::with_capacity(m);
    for d in 0..m {
        match axis(front, g, d) {
            Some(ax) => axes.push(ax),
            None => return Ok(0.0),
        }
    }
    let mut eval = ImprovementEval::new(front);
    // Romberg over doubling levels: row[q] holds the q-fold extrapolation,
    // `estimates` the successive diagonal values. The first two levels always
    // run so a failure can report a pair; the cap limits refinement beyond.
    let mut prev_row: Vec<f64> = Vec::new();
    let mut estimates: Vec<f64> = Vec::new();
    for level in 0u32.. {
        if level >= 2 && axes.iter().any(|ax| ax.cells_at(level) > cells_per_dim) {
            return Err(ConvergenceFailure {
                last: estimates[estimates.len() - 1],
                previous: estimates[estimates.len() - 2],
            });
        }
        let mut row = vec![midpoint_estimate(&axes, g, &mut eval, level)];
        for q in 1..=prev_row.len().min(MAX_COLUMNS - 1) {
            let pow = 4f64.powi(q as i32);
            row.push(row[q - 1] + (row[q - 1] - prev_row[q - 1]) / (pow - 1.0));
        }
        let diag = *row.last().unwrap();
        if let Some(&prev) = estimates.last() {
            let denom = diag.abs().max(f64::MIN_POSITIVE);
            if (diag - prev).abs() <= QUAD_TOL * denom {
                return Ok(diag);
            }
        }
        estimates.push(diag);
        prev_row = row;
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ehvi2d::ehvi_2d_fast;
    use crate::types::{validate_front, Point};

    fn pt(coords: &[f64]) -> Point {
        Point::new(coords.to_vec()).unwrap()
    }

    fn front(points: &[&[f64]], r: &[f64]) -> Front {
        validate_front(points.iter().map(|c| pt(c)).collect(), pt(r)).unwrap()
    }

    fn pred(mu: &[f64], sigma: &[f64]) -> GaussianPredictor {
        GaussianPredictor::new(mu.to_vec(), sigma.to_vec()).unwrap()
    }

    const V2: f64 = 1.9117554424878822;
    const V3: f64 = 21.812862141400096;

    #[test]
    fn mc_is_deterministic_per_seed() {
        let f = front(&[&[1.0, 2.0], &[2.0, 1.0]], &[0.0, 0.0]);
        let g = pred(&[2.0, 2.0], &[1.0, 1.0]);
        let a = ehvi_mc(&f, &g, 10_000, 42);
        let b = ehvi_mc(&f, &g, 10_000, 42);
        assert_eq!(a, b);
        let c = ehvi_mc(&f, &g, 10_000, 43);
        assert_ne!(a.estimate, c.estimate);
    }

    #[test]
    fn mc_all_samples_dominated_is_exactly_zero() {
        let f = front(&[&[1.0, 2.0], &[2.0, 1.0]], &[0.0, 0.0]);
        let g = pred(&[-100.0, -100.0], &[1.0, 1.0]);
        let r = ehvi_mc(&f, &g, 50_000, 7);
        assert_eq!(r.estimate, 0.0);
        assert_eq!(r.standard_error, 0.0);
    }

    #[test]
    fn mc_matches_exact_value_within_four_se() {
        let f = front(
            &[&[1.0, 2.0, 3.0], &[2.0, 3.0, 1.0], &[3.0, 1.0, 2.0]],
            &[0.0, 0.0, 0.0],
        );
        let g = pred(&[3.0, 3.0, 3.0], &[2.0, 2.0, 2.0]);
        let r = ehvi_mc(&f, &g, 1_000_000, 1);
        assert!(
            (r.estimate - V3).abs() <= 4.0 * r.standard_error,
            "estimate {} se {}",
            r.estimate,
            r.standard_error
        );
    }

    #[test]
    fn quadrature_empty_front_closed_form() {
        let f = front(&[], &[0.0, 0.0]);
        let g = pred(&[0.0, 0.0], &[1.0, 1.0]);
        let v = ehvi_quadrature(&f, &g, 4096).unwrap();
        let want = 1.0 / std::f64::consts::TAU;
        assert!((v - want).abs() <= 1e-6 * want, "{v}");
    }

    #[test]
    fn quadrature_matches_exact_2d() {
        let f = front(&[&[1.0, 2.0], &[2.0, 1.0]], &[0.0, 0.0]);
        let g = pred(&[2.0, 2.0], &[1.0, 1.0]);
        let v = ehvi_quadrature(&f, &g, 4096).unwrap();
        assert!((v - V2).abs() <= 1e-6 * V2, "{v}");
        let exact = ehvi_2d_fast(&f, &g);
        assert!((v - exact).abs() <= 1e-6 * exact);
    }

    #[test]
    fn quadrature_matches_exact_3d() {
        let f = front(
            &[&[1.0, 2.0, 3.0], &[2.0, 3.0, 1.0], &[3.0, 1.0, 2.0]],
            &[0.0, 0.0, 0.0],
        );
        let g = pred(&[3.0, 3.0, 3.0], &[2.0, 2.0, 2.0]);
        let v = ehvi_quadrature(&f, &g, 1024).unwrap();
        assert!((v - V3).abs() <= 1e-6 * V3, "{v}");
    }

    #[test]
    fn quadrature_mass_below_reference_is_zero() {
        let f = front(&[&[1.0, 2.0], &[2.0, 1.0]], &[0.0, 0.0]);
        let g = pred(&[-100.0, -100.0], &[1.0, 1.0]);
        assert!(ehvi_quadrature(&f, &g, 1024).unwrap().abs() <= 1e-10);
    }

    #[test]
    #[should_panic(expected = "at least 16")]
    fn quadrature_rejects_tiny_cap() {
        let f = front(&[], &[0.0, 0.0]);
        let g = pred(&[0.0, 0.0], &[1.0, 1.0]);
        let _ = ehvi_quadrature(&f, &g, 8);
    }

    #[test]
    fn quadrature_cap_failure_carries_estimates() {
        // A cap of 16 allows only the base level: no second estimate to
        // compare against, so refinement must report failure.
        let f = front(&[&[1.0, 2.0], &[2.0, 1.0]], &[0.0, 0.0]);
        let g = pred(&[2.0, 2.0], &[1.0, 1.0]);
        let err = ehvi_quadrature(&f, &g, 16).unwrap_err();
        assert!(err.last.is_finite() && err.previous.is_finite());
        assert_ne!(err.last, err.previous);
    }
}
