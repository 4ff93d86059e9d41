//! Tri-objective expected hypervolume improvement: four exact schemes.
//!
//! The objective space is cut into (n+1)³ half-open cells by the coordinate
//! hyperplanes through the front and the reference point. Per non-dominated
//! cell the integral factorizes into products of 1-D improvement terms (ψ
//! differences) and interval masses (Φ differences), times geometric
//! correction constants:
//!
//! * `ehvi_3d_8term` — global reference r; one product term plus seven
//!   dominated-measure corrections (one volume, three areas, three heights),
//!   each recomputed per cell.
//! * `ehvi_3d_5term` — cell-local reference v built from the height arrays,
//!   which zeroes the three height corrections.
//! * `ehvi_3d_2term` — one dominated-volume call at the cell's center of
//!   mass; the entire correction collapses into a single constant.
//! * `ehvi_3d_slice` — 8-term structure with all corrections answered in
//!   O(1) from per-layer slice volumes and zslice areas, O(n³) total.
//!
//! Batch evaluation shares the geometry pass across predictors for the
//! schemes whose corrections do not depend on the predictor.

use crate::hypervolume::{dominated_volume_clipped, staircase_area_desc, Staircase2};
use crate::kahan::KahanSum;
use crate::normal::{psi, std_normal_cdf};
use crate::types::{Front, GaussianPredictor};

/// Scheme selector for [`ehvi_3d_batch`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme3 {
    EightTerm,
    FiveTerm,
    TwoTerm,
    Slice,
}

/// Sorted per-dimension cell boundaries of P' = {r} ∪ P ∪ {(∞,∞,∞)}.
/// `coords(d)` has length n+2: coords(d)[0] = r_d, coords(d)[n+1] = +∞;
/// duplicates are kept, so zero-width cells are representable.
#[derive(Debug, Clone)]
pub struct CellGrid3 {
    s: [Vec<f64>; 3],
    n: usize,
}

impl CellGrid3 {
    pub fn new(front: &Front) -> Self {
        assert_eq!(front.dim(), 3, "CellGrid3 requires a 3-D front");
        let n = front.len();
        let r = front.reference();
        let s = [0, 1, 2].map(|d| {
            let mut v = Vec::with_capacity(n + 2);
            v.push(r[d]);
            let mut coords: Vec<f64> = front.points().iter().map(|p| p[d]).collect();
            coords.sort_unstable_by(f64::total_cmp);
            v.extend(coords);
            v.push(f64::INFINITY);
            v
        });
        CellGrid3 { s, n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coords(&self, d: usize) -> &[f64] {
        &self.s[d]
    }

    #[inline]
    fn lower(&self, d: usize, a: usize) -> f64 {
        self.s[d][a]
    }

    #[inline]
    fn upper(&self, d: usize, a: usize) -> f64 {
        self.s[d][a + 1]
    }
}

/// (n+1) × (n+1) array of reals.
#[derive(Debug, Clone)]
struct Grid2 {
    stride: usize,
    data: Vec<f64>,
}

impl Grid2 {
    fn new(n: usize, fill: f64) -> Self {
        Grid2 {
            stride: n + 1,
            data: vec![fill; (n + 1) * (n + 1)],
        }
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.stride + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.stride + j] = v;
    }
}

/// Per-axis height arrays. `hz(a1, a2)` is the largest z among points with
/// q_x ≥ s_x[a1+1] and q_y ≥ s_y[a2+1] (floor r_z); cell C(a1,a2,a3) is
/// dominated iff hz(a1,a2) ≥ s_z[a3+1]. `hx`/`hy` are the axis rotations.
#[derive(Debug, Clone)]
pub struct HeightArrays {
    hz: Grid2,
    hy: Grid2,
    hx: Grid2,
}

impl HeightArrays {
    pub fn hz(&self, a1: usize, a2: usize) -> f64 {
        self.hz.get(a1, a2)
    }

    pub fn hy(&self, a1: usize, a3: usize) -> f64 {
        self.hy.get(a1, a3)
    }

    pub fn hx(&self, a2: usize, a3: usize) -> f64 {
        self.hx.get(a2, a3)
    }

    /// O(1) cell-domination test.
    pub fn dominated(&self, grid: &CellGrid3, a1: usize, a2: usize, a3: usize) -> bool {
        self.hz(a1, a2) >= grid.upper(2, a3)
    }
}

/// One routine fills all three arrays with axes permuted: iterate points in
/// ascending `dk` order, overwriting the rectangle of index pairs whose cell
/// upper corner the point covers in dimensions `di`, `dj`.
fn build_height(front: &Front, grid: &CellGrid3, di: usize, dj: usize, dk: usize) -> Grid2 {
    let n = grid.n();
    let mut h = Grid2::new(n, front.reference()[dk]);
    let mut order: Vec<usize> = (0..front.len()).collect();
    order.sort_unstable_by(|&a, &b| front.coord(a, dk).total_cmp(&front.coord(b, dk)));
    for &q in &order {
        // q covers index a iff q_d >= s_d[a+1]; ranks count boundary values <= q_d.
        let ri = grid.s[di].partition_point(|&x| x <= front.coord(q, di));
        let rj = grid.s[dj].partition_point(|&x| x <= front.coord(q, dj));
        let z = front.coord(q, dk);
        for i in 0..ri.saturating_sub(1) {
            for j in 0..rj.saturating_sub(1) {
                h.set(i, j, z);
            }
        }
    }
    h
}

pub fn build_height_arrays(front: &Front, grid: &CellGrid3) -> HeightArrays {
    HeightArrays {
        hz: build_height(front, grid, 0, 1, 2),
        hy: build_height(front, grid, 0, 2, 1),
        hx: build_height(front, grid, 1, 2, 0),
    }
}

/// Immutable geometry shared by every predictor in a batch.
struct Geometry3 {
    grid: CellGrid3,
    h: HeightArrays,
    r: [f64; 3],
    by_x_desc: Vec<[f64; 3]>,
    by_y_desc: Vec<[f64; 3]>,
    by_z_desc: Vec<[f64; 3]>,
}

impl Geometry3 {
    fn new(front: &Front) -> Self {
        let grid = CellGrid3::new(front);
        let h = build_height_arrays(front, &grid);
        let r = [0, 1, 2].map(|d| front.reference()[d]);
        let sorted_desc = |d: usize| {
            let mut pts: Vec<[f64; 3]> = front
                .points()
                .iter()
                .map(|p| [p[0], p[1], p[2]])
                .collect();
            pts.sort_unstable_by(|a, b| b[d].total_cmp(&a[d]));
            pts
        };
        Geometry3 {
            grid,
            h,
            r,
            by_x_desc: sorted_desc(0),
            by_y_desc: sorted_desc(1),
            by_z_desc: sorted_desc(2),
        }
    }

    /// First layer index a3 for which C(a1,a2,a3) is not dominated.
    fn first_free_layer(&self, a1: usize, a2: usize) -> usize {
        let hz = self.h.hz(a1, a2);
        self.grid.s[2][1..].partition_point(|&z| z <= hz)
    }
}

/// Per-predictor 1-D tables over the grid intervals: dpsi0[d][k] is the
/// expected improvement of coordinate d over interval k with baseline at the
/// interval's lower bound, dphi[d][k] the interval's probability mass.
struct Tables3 {
    dpsi0: [Vec<f64>; 3],
    dphi: [Vec<f64>; 3],
}

fn interval_tables(grid: &CellGrid3, g: &GaussianPredictor) -> Tables3 {
    let n = grid.n();
    let build = |d: usize| {
        let (mu, sigma) = (g.mu()[d], g.sigma()[d]);
        let mut dpsi0 = Vec::with_capacity(n + 1);
        let mut dphi = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let l = grid.lower(d, k);
            let u = grid.upper(d, k);
            dpsi0.push(psi(l, l, mu, sigma) - psi(l, u, mu, sigma));
            dphi.push(std_normal_cdf((u - mu) / sigma) - std_normal_cdf((l - mu) / sigma));
        }
        (dpsi0, dphi)
    };
    let (p0, f0) = build(0);
    let (p1, f1) = build(1);
    let (p2, f2) = build(2);
    Tables3 {
        dpsi0: [p0, p1, p2],
        dphi: [f0, f1, f2],
    }
}

fn check_inputs(front: &Front, g: &GaussianPredictor) {
    assert_eq!(front.dim(), 3, "3-D EHVI requires a 3-D front");
    assert_eq!(g.dim(), 3, "3-D EHVI requires a 3-D predictor");
}

/// Eight-term cell formula shared by the direct and slice schemes.
/// `lr` is l − r; `s` holds the seven dominated-measure corrections.
#[inline]
#[allow(clippy::too_many_arguments)]
fn eight_term_cell(
    dps: [f64; 3],
    dph: [f64; 3],
    lr: [f64; 3],
    s_empty: f64,
    s_x: f64,
    s_y: f64,
    s_z: f64,
    s_xy: f64,
    s_xz: f64,
    s_yz: f64,
) -> f64 {
    dps[0] * dps[1] * dps[2]
        + dph[0] * dph[1] * dph[2] * (lr[0] * lr[1] * lr[2] - s_empty)
        + dps[0] * dph[1] * dph[2] * (lr[1] * lr[2] - s_x)
        + dps[1] * dph[0] * dph[2] * (lr[0] * lr[2] - s_y)
        + dps[2] * dph[0] * dph[1] * (lr[0] * lr[1] - s_z)
        + dps[0] * dps[1] * dph[2] * (lr[2] - s_xy)
        + dps[0] * dps[2] * dph[1] * (lr[1] - s_xz)
        + dps[1] * dps[2] * dph[0] * (lr[0] - s_yz)
}

/// A predictor contributes nothing on a cell when, in some dimension, both
/// the improvement term and the interval mass underflow to exactly zero;
/// every term then carries a zero factor.
#[inline]
fn inactive(t: &Tables3, a: [usize; 3]) -> bool {
    (0..3).any(|d| t.dpsi0[d][a[d]] == 0.0 && t.dphi[d][a[d]] == 0.0)
}

/// Direct per-cell evaluation: the 8-term scheme, or the 5-term scheme when
/// `five_term` is set. Corrections are recomputed from the point set for
/// every cell; only the height terms come from the precomputed arrays.
fn eval_direct(front: &Front, preds: &[GaussianPredictor], five_term: bool) -> Vec<f64> {
    if preds.is_empty() {
        return Vec::new();
    }
    let geo = Geometry3::new(front);
    let n = geo.grid.n();
    let r = geo.r;
    let tabs: Vec<Tables3> = preds.iter().map(|g| interval_tables(&geo.grid, g)).collect();
    let mut totals = vec![KahanSum::new(); preds.len()];
    let mut scratch = Staircase2::new();
    for a1 in 0..=n {
        for a2 in 0..=n {
            for a3 in geo.first_free_layer(a1, a2)..=n {
                let a = [a1, a2, a3];
                let l = [0, 1, 2].map(|d| geo.grid.lower(d, a[d]));
                let u = [0, 1, 2].map(|d| geo.grid.upper(d, a[d]));
                if l[0] == u[0] || l[1] == u[1] || l[2] == u[2] {
                    continue; // zero-width cell, zero mass
                }
                if tabs.iter().all(|t| inactive(t, a)) {
                    continue;
                }
                // Local reference: r for the 8-term scheme, the height-array
                // point v for the 5-term scheme.
                let v = if five_term {
                    [geo.h.hx(a2, a3), geo.h.hy(a1, a3), geo.h.hz(a1, a2)]
                } else {
                    r
                };
                let s_empty =
                    dominated_volume_clipped(&geo.by_z_desc, v, l, &mut scratch);
                let s_x = staircase_area_desc(
                    geo.by_y_desc
                        .iter()
                        .filter(|q| q[0] >= u[0])
                        .map(|q| (q[1], q[2])),
                    (v[1], v[2]),
                    (l[1], l[2]),
                );
                let s_y = staircase_area_desc(
                    geo.by_x_desc
                        .iter()
                        .filter(|q| q[1] >= u[1])
                        .map(|q| (q[0], q[2])),
                    (v[0], v[2]),
                    (l[0], l[2]),
                );
                let s_z = staircase_area_desc(
                    geo.by_x_desc
                        .iter()
                        .filter(|q| q[2] >= u[2])
                        .map(|q| (q[0], q[1])),
                    (v[0], v[1]),
                    (l[0], l[1]),
                );
                for (t, total) in tabs.iter().zip(&mut totals) {
                    if inactive(t, a) {
                        continue;
                    }
                    let dps = [0, 1, 2].map(|d| t.dpsi0[d][a[d]]);
                    let dph = [0, 1, 2].map(|d| t.dphi[d][a[d]]);
                    let contribution = if five_term {
                        // Shift the improvement baseline from l down to v.
                        let dpsv = [0, 1, 2].map(|d| dps[d] + dph[d] * (l[d] - v[d]));
                        dpsv[0] * dpsv[1] * dpsv[2]
                            - s_empty * dph[0] * dph[1] * dph[2]
                            - dps[0] * s_x * dph[1] * dph[2]
                            - dps[1] * s_y * dph[0] * dph[2]
                            - dps[2] * s_z * dph[0] * dph[1]
                    } else {
                        let lr = [0, 1, 2].map(|d| l[d] - r[d]);
                        let s_xy = geo.h.hz(a1, a2).min(l[2]) - r[2];
                        let s_xz = geo.h.hy(a1, a3).min(l[1]) - r[1];
                        let s_yz = geo.h.hx(a2, a3).min(l[0]) - r[0];
                        eight_term_cell(dps, dph, lr, s_empty, s_x, s_y, s_z, s_xy, s_xz, s_yz)
                    };
                    total.add(contribution);
                }
            }
        }
    }
    totals.iter().map(KahanSum::value).collect()
}

/// 2-term scheme: per active cell one dominated-volume evaluation at the
/// cell's center of mass p̄. The correction depends on the predictor, so
/// batches cannot share it.
fn eval_2term(front: &Front, g: &GaussianPredictor) -> f64 {
    let geo = Geometry3::new(front);
    let n = geo.grid.n();
    let r = geo.r;
    let (mu, sigma) = (g.mu(), g.sigma());
    // Improvement tables with the global reference as baseline.
    let mut dpsir: [Vec<f64>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    let mut dphi: [Vec<f64>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for d in 0..3 {
        for k in 0..=n {
            let l = geo.grid.lower(d, k);
            let u = geo.grid.upper(d, k);
            dpsir[d].push(psi(r[d], l, mu[d], sigma[d]) - psi(r[d], u, mu[d], sigma[d]));
            dphi[d].push(
                std_normal_cdf((u - mu[d]) / sigma[d]) - std_normal_cdf((l - mu[d]) / sigma[d]),
            );
        }
    }
    let mut total = KahanSum::new();
    let mut scratch = Staircase2::new();
    for a1 in 0..=n {
        for a2 in 0..=n {
            for a3 in geo.first_free_layer(a1, a2)..=n {
                let a = [a1, a2, a3];
                let dph = [0, 1, 2].map(|d| dphi[d][a[d]]);
                if dph.iter().any(|&x| x == 0.0) {
                    continue; // mass below double-precision resolution
                }
                let dpr = [0, 1, 2].map(|d| dpsir[d][a[d]]);
                let pbar = [0, 1, 2].map(|d| r[d] + dpr[d] / dph[d]);
                let s_minus = dominated_volume_clipped(&geo.by_z_desc, r, pbar, &mut scratch);
                total.add(dpr[0] * dpr[1] * dpr[2] - s_minus * dph[0] * dph[1] * dph[2]);
            }
        }
    }
    total.value()
}

/// Slice volumes and zslice areas of one z-layer of the cell grid.
///
/// For the layer at index a3, `svol(a1, a2)` is Vol(DomSet(P) ∩ [r, l]) with
/// l the lower corner of C(a1,a2,a3), and `zslice(a1, a2)` is the dominated
/// area of the z-filtered xy-projection clipped to [r_xy, l_xy]. Layers
/// advance in ascending a3 carrying O(n²) state:
/// svol(a3+1) = svol(a3) + zslice(a3)·(s_z[a3+1] − s_z[a3]).
#[derive(Debug, Clone)]
pub struct SliceLayer {
    a3: usize,
    svol: Grid2,
    zsl: Grid2,
}

impl SliceLayer {
    /// Layer a3 = 0. Slice volumes are identically zero there.
    pub fn first(grid: &CellGrid3, h: &HeightArrays) -> Self {
        let n = grid.n();
        let mut layer = SliceLayer {
            a3: 0,
            svol: Grid2::new(n, 0.0),
            zsl: Grid2::new(n, 0.0),
        };
        layer.fill_zslice(grid, h);
        layer
    }

    /// Advance to layer a3 + 1.
    pub fn advance(&mut self, grid: &CellGrid3, h: &HeightArrays) {
        let n = grid.n();
        assert!(self.a3 < n, "cannot advance past the last layer");
        let dz = grid.s[2][self.a3 + 1] - grid.s[2][self.a3];
        for idx in 0..self.svol.data.len() {
            self.svol.data[idx] += self.zsl.data[idx] * dz;
        }
        self.a3 += 1;
        self.fill_zslice(grid, h);
    }

    /// zslice recurrence: zero on the a1 = 0 / a2 = 0 borders; the full
    /// rectangle when the diagonal neighbour cell is dominated at this
    /// layer; otherwise inclusion-exclusion of the three neighbours.
    fn fill_zslice(&mut self, grid: &CellGrid3, h: &HeightArrays) {
        let n = grid.n();
        let uz = grid.upper(2, self.a3);
        let (rx, ry) = (grid.s[0][0], grid.s[1][0]);
        for a1 in 0..=n {
            for a2 in 0..=n {
                let v = if a1 == 0 || a2 == 0 {
                    0.0
                } else if h.hz(a1 - 1, a2 - 1) >= uz {
                    (grid.s[0][a1] - rx) * (grid.s[1][a2] - ry)
                } else {
                    self.zsl.get(a1 - 1, a2) + self.zsl.get(a1, a2 - 1)
                        - self.zsl.get(a1 - 1, a2 - 1)
                };
                self.zsl.set(a1, a2, v);
            }
        }
    }

    pub fn layer(&self) -> usize {
        self.a3
    }

    pub fn svol(&self, a1: usize, a2: usize) -> f64 {
        self.svol.get(a1, a2)
    }

    pub fn zslice(&self, a1: usize, a2: usize) -> f64 {
        self.zsl.get(a1, a2)
    }
}

/// Slice-update scheme: per-layer recurrences answer every correction in
/// O(1), so the whole computation is O(n³) with O(n²) extra memory.
fn eval_slice(front: &Front, preds: &[GaussianPredictor]) -> Vec<f64> {
    if preds.is_empty() {
        return Vec::new();
    }
    let grid = CellGrid3::new(front);
    let h = build_height_arrays(front, &grid);
    let n = grid.n();
    let r = [grid.s[0][0], grid.s[1][0], grid.s[2][0]];
    let tabs: Vec<Tables3> = preds.iter().map(|g| interval_tables(&grid, g)).collect();
    let mut totals = vec![KahanSum::new(); preds.len()];
    let mut layer = SliceLayer::first(&grid, &h);
    for a3 in 0..=n {
        if a3 > 0 {
            layer.advance(&grid, &h);
        }
        let uz = grid.upper(2, a3);
        let lz = grid.lower(2, a3);
        if lz == uz {
            continue; // zero-width layer
        }
        for a1 in 0..=n {
            let lx = grid.lower(0, a1);
            let ux = grid.upper(0, a1);
            if lx == ux {
                continue;
            }
            for a2 in 0..=n {
                if h.hz(a1, a2) >= uz {
                    continue; // dominated
                }
                let ly = grid.lower(1, a2);
                let uy = grid.upper(1, a2);
                if ly == uy {
                    continue;
                }
                let a = [a1, a2, a3];
                let l = [lx, ly, lz];
                let lr = [lx - r[0], ly - r[1], lz - r[2]];
                let s_empty = layer.svol(a1, a2);
                let s_x = if a1 == n {
                    0.0
                } else {
                    (layer.svol(a1 + 1, a2) - s_empty) / (ux - lx)
                };
                let s_y = if a2 == n {
                    0.0
                } else {
                    (layer.svol(a1, a2 + 1) - s_empty) / (uy - ly)
                };
                let s_z = layer.zslice(a1, a2);
                let s_xy = h.hz(a1, a2).min(l[2]) - r[2];
                let s_xz = h.hy(a1, a3).min(l[1]) - r[1];
                let s_yz = h.hx(a2, a3).min(l[0]) - r[0];
                for (t, total) in tabs.iter().zip(&mut totals) {
                    if inactive(t, a) {
                        continue;
                    }
                    let dps = [0, 1, 2].map(|d| t.dpsi0[d][a[d]]);
                    let dph = [0, 1, 2].map(|d| t.dphi[d][a[d]]);
                    total.add(eight_term_cell(
                        dps, dph, lr, s_empty, s_x, s_y, s_z, s_xy, s_xz, s_yz,
                    ));
                }
            }
        }
    }
    totals.iter().map(KahanSum::value).collect()
}

/// 8-term scheme (global reference, per-cell corrections).
pub fn ehvi_3d_8term(front: &Front, g: &GaussianPredictor) -> f64 {
    check_inputs(front, g);
    eval_direct(front, std::slice::from_ref(g), false)[0]
}

/// 5-term scheme (cell-local reference from the height arrays).
pub fn ehvi_3d_5term(front: &Front, g: &GaussianPredictor) -> f64 {
    check_inputs(front, g);
    eval_direct(front, std::slice::from_ref(g), true)[0]
}

/// 2-term scheme (center-of-mass correction).
pub fn ehvi_3d_2term(front: &Front, g: &GaussianPredictor) -> f64 {
    check_inputs(front, g);
    eval_2term(front, g)
}

/// Slice-update scheme, O(n³).
pub fn ehvi_3d_slice(front: &Front, g: &GaussianPredictor) -> f64 {
    check_inputs(front, g);
    eval_slice(front, std::slice::from_ref(g))[0]
}

/// Evaluate many predictors against one front. For the 8-term, 5-term and
/// slice schemes the geometry pass (grid, height arrays, per-cell
/// corrections) runs once and is shared; the 2-term scheme cannot share its
/// correction and simply maps the single-candidate path.
pub fn ehvi_3d_batch(front: &Front, gs: &[GaussianPredictor], scheme: Scheme3) -> Vec<f64> {
    assert_eq!(front.dim(), 3, "3-D EHVI requires a 3-D front");
    for g in gs {
        assert_eq!(g.dim(), 3, "3-D EHVI requires 3-D predictors");
    }
    match scheme {
        Scheme3::EightTerm => eval_direct(front, gs, false),
        Scheme3::FiveTerm => eval_direct(front, gs, true),
        Scheme3::Slice => eval_slice(front, gs),
        Scheme3::TwoTerm => gs.iter().map(|g| eval_2term(front, g)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{validate_front, Point};

    fn pt(coords: &[f64]) -> Point {
        Point::new(coords.to_vec()).unwrap()
    }

    fn front3(points: &[[f64; 3]], r: [f64; 3]) -> Front {
        validate_front(points.iter().map(|c| pt(c)).collect(), pt(&r)).unwrap()
    }

    fn pred3(mu: [f64; 3], sigma: [f64; 3]) -> GaussianPredictor {
        GaussianPredictor::new(mu.to_vec(), sigma.to_vec()).unwrap()
    }

    fn paper3() -> Front {
        front3(
            &[[1.0, 2.0, 3.0], [2.0, 3.0, 1.0], [3.0, 1.0, 2.0]],
            [0.0, 0.0, 0.0],
        )
    }

    fn all_schemes(f: &Front, g: &GaussianPredictor) -> [f64; 4] {
        [
            ehvi_3d_8term(f, g),
            ehvi_3d_5term(f, g),
            ehvi_3d_2term(f, g),
            ehvi_3d_slice(f, g),
        ]
    }

    /// Max pairwise deviation relative to the common magnitude, with a small
    /// absolute floor so near-zero instances compare absolutely.
    fn assert_agree(vals: &[f64], tol: f64) {
        let scale = vals[0].abs().max(1e-6);
        for (i, v) in vals.iter().enumerate() {
            assert!(
                (v - vals[0]).abs() <= tol * scale,
                "scheme {i} diverges: {vals:?}"
            );
        }
    }

    const EMPTY3: f64 = 0.06349363593424097; // (2*pi)^(-3/2)
    /// Frozen from the independent oracle: P = paper3, mu=(3,3,3), sigma=(2,2,2).
    const V3: f64 = 21.812862141400096;
    /// Monte Carlo oracle, 1e8 trials.
    const V3_MC: f64 = 21.810568153139013;
    const V3_MC_SE: f64 = 0.0033076799634361173;

    #[test]
    fn empty_front_closed_form() {
        let f = front3(&[], [0.0, 0.0, 0.0]);
        let g = pred3([0.0, 0.0, 0.0], [1.0, 1.0, 1.0]);
        for v in all_schemes(&f, &g) {
            assert!((v - EMPTY3).abs() < 1e-15, "{v}");
        }
    }

    #[test]
    fn paper3_value_within_mc_oracle_band() {
        let f = paper3();
        let g = pred3([3.0, 3.0, 3.0], [2.0, 2.0, 2.0]);
        let vals = all_schemes(&f, &g);
        for v in vals {
            assert!(
                (v - V3_MC).abs() <= 4.0 * V3_MC_SE,
                "{v} outside 4 standard errors of the MC oracle"
            );
            assert!((v - V3).abs() <= 1e-12 * V3);
        }
        assert_agree(&vals, 1e-12);
    }

    #[test]
    fn mass_below_reference_is_zero() {
        let f = paper3();
        let g = pred3([-50.0, -50.0, -50.0], [1.0, 1.0, 1.0]);
        for v in all_schemes(&f, &g) {
            assert!(v.abs() <= 1e-12, "{v}");
        }
    }

    #[test]
    fn height_array_single_point() {
        let f = front3(&[[2.0, 2.0, 2.0]], [0.0, 0.0, 0.0]);
        let grid = CellGrid3::new(&f);
        let h = build_height_arrays(&f, &grid);
        assert_eq!(h.hz(0, 0), 2.0);
        assert_eq!(h.hz(1, 0), 0.0);
        assert_eq!(h.hz(0, 1), 0.0);
        assert_eq!(h.hz(1, 1), 0.0);
        assert!(h.dominated(&grid, 0, 0, 0));
        assert!(!h.dominated(&grid, 0, 0, 1));
    }

    #[test]
    fn height_array_matches_brute_force() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(5);
        for _ in 0..30 {
            let f = random_front(&mut rng, 8);
            let grid = CellGrid3::new(&f);
            let h = build_height_arrays(&f, &grid);
            let n = grid.n();
            for a1 in 0..=n {
                for a2 in 0..=n {
                    let mut want = f.reference()[2];
                    for p in f.points() {
                        if p[0] >= grid.upper(0, a1) && p[1] >= grid.upper(1, a2) {
                            want = want.max(p[2]);
                        }
                    }
                    assert_eq!(h.hz(a1, a2), want);
                }
            }
        }
    }

    #[test]
    fn outermost_cells_never_dominated() {
        let f = paper3();
        let grid = CellGrid3::new(&f);
        let h = build_height_arrays(&f, &grid);
        let n = grid.n();
        for k in 0..=n {
            for a3 in 0..=n {
                assert!(!h.dominated(&grid, n, k, a3));
                assert!(!h.dominated(&grid, k, n, a3));
            }
            // top layer is open in z
            for a1 in 0..=n {
                assert!(!h.dominated(&grid, a1, k, n));
            }
        }
    }

    fn random_front(rng: &mut impl rand::Rng, n: usize) -> Front {
        let mut pts: Vec<[f64; 3]> = Vec::new();
        while pts.len() < n {
            let c = [
                rng.random_range(0.2..4.0),
                rng.random_range(0.2..4.0),
                rng.random_range(0.2..4.0),
            ];
            let clash = pts.iter().any(|q| {
                let ge = (0..3).all(|d| q[d] >= c[d]);
                let le = (0..3).all(|d| q[d] <= c[d]);
                ge || le
            });
            if !clash {
                pts.push(c);
            }
        }
        front3(&pts, [0.0, 0.0, 0.0])
    }

    #[test]
    fn four_way_agreement_on_random_fronts() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(41);
        for trial in 0..40 {
            let n = [1, 2, 5, 10][trial % 4];
            let f = random_front(&mut rng, n);
            let g = pred3(
                [
                    rng.random_range(0.5..4.5),
                    rng.random_range(0.5..4.5),
                    rng.random_range(0.5..4.5),
                ],
                [
                    rng.random_range(0.3..2.0),
                    rng.random_range(0.3..2.0),
                    rng.random_range(0.3..2.0),
                ],
            );
            let vals = all_schemes(&f, &g);
            assert_agree(&vals, 1e-12);
            assert!(vals[0] >= 0.0);
        }
    }

    #[test]
    fn zero_width_cells_agree() {
        // Shared coordinate values in y and z create zero-width cells.
        let f = front3(
            &[
                [1.0, 2.0, 3.0],
                [2.0, 3.0, 1.0],
                [3.0, 1.0, 2.0],
                [2.5, 2.6, 1.0],
                [3.2, 0.5, 3.0],
                [0.5, 3.0, 2.0],
            ],
            [0.0, 0.0, 0.0],
        );
        let g = pred3([3.0, 3.0, 3.0], [2.0, 2.0, 2.0]);
        let vals = all_schemes(&f, &g);
        for v in vals {
            assert!(v.is_finite());
        }
        assert_agree(&vals, 1e-12);
    }

    /// Inclusion-exclusion volume of DomSet(P) ∩ [lo, hi]; independent oracle.
    fn ie_clipped_volume(f: &Front, lo: [f64; 3], hi: [f64; 3]) -> f64 {
        let pts: Vec<[f64; 3]> = f.points().iter().map(|p| [p[0], p[1], p[2]]).collect();
        let n = pts.len();
        let mut total = 0.0;
        for mask in 1u32..(1 << n) {
            let mut vol = 1.0;
            for d in 0..3 {
                let mut mn = f64::INFINITY;
                for (i, p) in pts.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        mn = mn.min(p[d]);
                    }
                }
                vol *= (mn.min(hi[d]) - lo[d]).max(0.0);
            }
            if mask.count_ones() % 2 == 1 {
                total += vol;
            } else {
                total -= vol;
            }
        }
        total
    }

    #[test]
    fn slice_layer_recurrences_match_direct_volumes() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(17);
        for _ in 0..10 {
            let f = random_front(&mut rng, 10);
            let grid = CellGrid3::new(&f);
            let h = build_height_arrays(&f, &grid);
            let n = grid.n();
            let r = [grid.s[0][0], grid.s[1][0], grid.s[2][0]];
            let mut layer = SliceLayer::first(&grid, &h);
            for a3 in 0..=n {
                if a3 > 0 {
                    layer.advance(&grid, &h);
                }
                for a1 in 0..=n {
                    for a2 in 0..=n {
                        let l = [grid.lower(0, a1), grid.lower(1, a2), grid.lower(2, a3)];
                        let want_vol = ie_clipped_volume(&f, r, l);
                        assert!(
                            (layer.svol(a1, a2) - want_vol).abs()
                                <= 1e-12 * want_vol.max(1.0),
                            "svol({a1},{a2}) at layer {a3}"
                        );
                        // zslice against the clipped projected area oracle
                        let uz = grid.upper(2, a3);
                        let want_zsl = staircase_area_desc(
                            {
                                let mut sel: Vec<(f64, f64)> = f
                                    .points()
                                    .iter()
                                    .filter(|p| p[2] >= uz)
                                    .map(|p| (p[0], p[1]))
                                    .collect();
                                sel.sort_unstable_by(|a, b| b.0.total_cmp(&a.0));
                                sel
                            },
                            (r[0], r[1]),
                            (l[0], l[1]),
                        );
                        assert!(
                            (layer.zslice(a1, a2) - want_zsl).abs()
                                <= 1e-12 * want_zsl.max(1.0),
                            "zslice({a1},{a2}) at layer {a3}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn batch_matches_single_evaluation() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(29);
        let f = random_front(&mut rng, 12);
        let gs: Vec<GaussianPredictor> = (0..7)
            .map(|_| {
                pred3(
                    [
                        rng.random_range(0.5..4.5),
                        rng.random_range(0.5..4.5),
                        rng.random_range(0.5..4.5),
                    ],
                    [
                        rng.random_range(0.3..2.0),
                        rng.random_range(0.3..2.0),
                        rng.random_range(0.3..2.0),
                    ],
                )
            })
            .collect();
        for scheme in [
            Scheme3::EightTerm,
            Scheme3::FiveTerm,
            Scheme3::TwoTerm,
            Scheme3::Slice,
        ] {
            let batch = ehvi_3d_batch(&f, &gs, scheme);
            assert_eq!(batch.len(), gs.len());
            for (b, g) in batch.iter().zip(&gs) {
                let single = match scheme {
                    Scheme3::EightTerm => ehvi_3d_8term(&f, g),
                    Scheme3::FiveTerm => ehvi_3d_5term(&f, g),
                    Scheme3::TwoTerm => ehvi_3d_2term(&f, g),
                    Scheme3::Slice => ehvi_3d_slice(&f, g),
                };
                assert!((b - single).abs() <= 1e-12 * single.max(1.0));
            }
        }
        // duplicate predictors give identical values
        let twice = ehvi_3d_batch(&f, &[gs[0].clone(), gs[0].clone()], Scheme3::Slice);
        assert_eq!(twice[0], twice[1]);
        // empty batch
        assert!(ehvi_3d_batch(&f, &[], Scheme3::Slice).is_empty());
    }

    #[test]
    fn dirac_limit_approaches_hypervolume_improvement() {
        use crate::hypervolume::hypervolume_improvement;
        let f = paper3();
        let mu = [3.5, 3.5, 3.5];
        let g = pred3(mu, [1e-6, 1e-6, 1e-6]);
        let want = hypervolume_improvement(&pt(&mu), &f);
        for v in all_schemes(&f, &g) {
            assert!(
                (v - want).abs() <= 1e-4 * want,
                "{v} vs deterministic improvement {want}"
            );
        }
    }
}
