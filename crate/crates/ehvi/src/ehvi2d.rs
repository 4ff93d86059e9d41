//! Bi-objective expected hypervolume improvement.
//!
//! Both algorithms integrate over the grid cells spanned by the front and the
//! reference point. A cell's contribution is
//!
//!   (Δψ_x · Δψ_y) − S_minus · (ΔΦ_x · ΔΦ_y)
//!
//! with Δψ taken against the cell-local reference `v` and S_minus the
//! dominated area of the points weakly dominated by the cell's lower corner,
//! measured from `v`. The naive algorithm recomputes S_minus per cell from
//! scratch; the fast one sweeps rows and grows S_minus by one rectangular
//! strip per step, which brings the total work down to O(n²).

use crate::kahan::KahanSum;
use crate::normal::{psi, std_normal_cdf};
use crate::types::{Front, GaussianPredictor};

/// Sentinel-extended point list Q = P ∪ {(r_x, ∞)} ∪ {(∞, r_y)} sorted by
/// ascending x. Mutual non-domination makes this simultaneously descending in
/// y, so index k in x-order is index n+1-k in y-order.
fn extended_sorted(front: &Front) -> Vec<(f64, f64)> {
    let r = front.reference();
    let mut q = Vec::with_capacity(front.len() + 2);
    q.push((r[0], f64::INFINITY));
    let mut pts: Vec<(f64, f64)> = front
        .points()
        .iter()
        .map(|p| (p[0], p[1]))
        .collect();
    pts.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
    q.extend(pts);
    q.push((f64::INFINITY, r[1]));
    q
}

struct Tables {
    dphi: [Vec<f64>; 2],
}

fn phi_tables(qx: &[(f64, f64)], g: &GaussianPredictor) -> Tables {
    let n = qx.len() - 2;
    let (mu, sigma) = (g.mu(), g.sigma());
    // Interval CDF masses per dimension; x intervals indexed by a, y by b.
    let mut dphi_x = Vec::with_capacity(n + 1);
    let mut dphi_y = Vec::with_capacity(n + 1);
    for a in 0..=n {
        let l = qx[a].0;
        let u = qx[a + 1].0;
        dphi_x.push(std_normal_cdf((u - mu[0]) / sigma[0]) - std_normal_cdf((l - mu[0]) / sigma[0]));
    }
    for b in 0..=n {
        let l = qx[n + 1 - b].1;
        let u = qx[n - b].1;
        dphi_y.push(std_normal_cdf((u - mu[1]) / sigma[1]) - std_normal_cdf((l - mu[1]) / sigma[1]));
    }
    Tables {
        dphi: [dphi_x, dphi_y],
    }
}

fn check_inputs(front: &Front, g: &GaussianPredictor) {
    assert_eq!(front.dim(), 2, "2-D EHVI requires a 2-D front");
    assert_eq!(g.dim(), 2, "2-D EHVI requires a 2-D predictor");
}

/// Contribution of the cell with corners l, u and local reference v.
#[inline]
fn cell_contribution(
    l: (f64, f64),
    u: (f64, f64),
    v: (f64, f64),
    s_minus: f64,
    dphi: (f64, f64),
    g: &GaussianPredictor,
) -> f64 {
    let (mu, sigma) = (g.mu(), g.sigma());
    let dpsi_x = psi(v.0, l.0, mu[0], sigma[0]) - psi(v.0, u.0, mu[0], sigma[0]);
    let dpsi_y = psi(v.1, l.1, mu[1], sigma[1]) - psi(v.1, u.1, mu[1], sigma[1]);
    dpsi_x * dpsi_y - s_minus * dphi.0 * dphi.1
}

/// Baseline algorithm: every cell is classified geometrically and its
/// S_minus found by filtering the front and running a fresh dominated-area
/// computation, as in the O(n³ log n) reference implementation.
pub fn ehvi_2d_naive(front: &Front, g: &GaussianPredictor) -> f64 {
    check_inputs(front, g);
    let qx = extended_sorted(front);
    let n = front.len();
    let tab = phi_tables(&qx, g);
    let mut total = KahanSum::new();
    for b in 0..=n {
        for a in 0..=n {
            let u = (qx[a + 1].0, qx[n - b].1);
            // Skip cells whose upper corner is weakly dominated.
            if qx[1..=n]
                .iter()
                .any(|p| p.0 >= u.0 && p.1 >= u.1)
            {
                continue;
            }
            let l = (qx[a].0, qx[n + 1 - b].1);
            let v = (qx[n - b].0, qx[a + 1].1);
            // Points weakly dominated by the lower corner, in ascending x.
            let mut s_minus = 0.0;
            let mut prev_x = v.0;
            for p in &qx[1..=n] {
                if p.0 <= l.0 && p.1 <= l.1 {
                    s_minus += (p.0 - prev_x) * (p.1 - v.1);
                    prev_x = p.0;
                }
            }
            total.add(cell_contribution(l, u, v, s_minus, (tab.dphi[0][a], tab.dphi[1][b]), g));
        }
    }
    total.value()
}

/// O(n²) algorithm: rows are visited bottom-up, each row starting at the
/// first staircase cell (where S is empty), and S_minus grows by exactly one
/// rectangular strip per step within the row.
pub fn ehvi_2d_fast(front: &Front, g: &GaussianPredictor) -> f64 {
    check_inputs(front, g);
    let qx = extended_sorted(front);
    let n = front.len();
    let tab = phi_tables(&qx, g);
    let mut total = KahanSum::new();
    for b in 0..=n {
        let mut s_minus = 0.0;
        for a in (n - b)..=n {
            if a > n - b {
                // Point qx[a] joined S; its strip spans from the row anchor
                // qx[n-b] to itself, above its right neighbour's height.
                s_minus += (qx[a].0 - qx[n - b].0) * (qx[a].1 - qx[a + 1].1);
            }
            let l = (qx[a].0, qx[n + 1 - b].1);
            let u = (qx[a + 1].0, qx[n - b].1);
            let v = (qx[n - b].0, qx[a + 1].1);
            debug_assert!(
                !qx[1..=n].iter().any(|p| p.0 >= u.0 && p.1 >= u.1),
                "staircase cell unexpectedly dominated"
            );
            total.add(cell_contribution(l, u, v, s_minus, (tab.dphi[0][a], tab.dphi[1][b]), g));
        }
    }
    total.value()
}
