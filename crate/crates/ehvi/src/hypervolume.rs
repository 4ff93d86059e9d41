//! Exact dominated-hypervolume computation in 2-D and 3-D.
//!
//! Two kernels carry everything: a right-to-left staircase pass for clipped
//! dominated areas, and a z-sweep over an incrementally maintained 2-D
//! staircase for volumes. Both accept arbitrary (possibly mutually dominated)
//! point sets, because the EHVI schemes feed them clipped selections.

use crate::types::{Front, Point};

use thiserror::Error;

/// Axis-aligned half-open box [lower, upper) used to clip dominated regions.
#[derive(Debug, Clone, PartialEq)]
pub struct ClippedBox {
    lower: Point,
    upper: Point,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoxError {
    #[error("DimensionMismatch: lower has {lower} coordinates, upper has {upper}")]
    DimensionMismatch { lower: usize, upper: usize },
    #[error("MalformedBox: lower[{dim}] exceeds upper[{dim}]")]
    Inverted { dim: usize },
}

impl ClippedBox {
    pub fn new(lower: Point, upper: Point) -> Result<Self, BoxError> {
        if lower.dim() != upper.dim() {
            return Err(BoxError::DimensionMismatch {
                lower: lower.dim(),
                upper: upper.dim(),
            });
        }
        for d in 0..lower.dim() {
            if lower[d] > upper[d] {
                return Err(BoxError::Inverted { dim: d });
            }
        }
        Ok(ClippedBox { lower, upper })
    }

    pub fn lower(&self) -> &Point {
        &self.lower
    }

    pub fn upper(&self) -> &Point {
        &self.upper
    }
}

/// Area of the region dominated by `pts` inside [lo, up], maximization.
///
/// `pts` must be sorted by descending first coordinate; points are clipped to
/// `up` and points at or below `lo` in either coordinate contribute nothing.
/// Single pass: each point extends the covered region by the rectangle above
/// the best height seen so far.
pub(crate) fn staircase_area_desc(
    pts_desc_w: impl IntoIterator<Item = (f64, f64)>,
    lo: (f64, f64),
    up: (f64, f64),
) -> f64 {
    let mut best = lo.1;
    let mut area = 0.0;
    for (w, h) in pts_desc_w {
        let wc = w.min(up.0);
        let hc = h.min(up.1);
        if wc <= lo.0 || hc <= best {
            continue;
        }
        area += (wc - lo.0) * (hc - best);
        best = hc;
    }
    area
}

/// 2-D staircase with incremental area maintenance. Points are kept mutually
/// non-dominated, sorted by ascending x (hence strictly descending y); the
/// running area is the measure of the dominated region above `(ref_x, ref_y)`.
#[derive(Debug, Default)]
pub(crate) struct Staircase2 {
    pts: Vec<(f64, f64)>,
    ref_x: f64,
    ref_y: f64,
    area: f64,
}

impl Staircase2 {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn reset(&mut self, ref_x: f64, ref_y: f64) {
        self.pts.clear();
        self.ref_x = ref_x;
        self.ref_y = ref_y;
        self.area = 0.0;
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    /// Insert a point, discarding it if dominated and evicting any points it
    /// dominates. Amortized O(log n) plus the shift cost of the backing Vec.
    pub fn insert(&mut self, px: f64, py: f64) {
        if px <= self.ref_x || py <= self.ref_y {
            return;
        }
        let len = self.pts.len();
        let j = self.pts.partition_point(|p| p.0 < px);
        if j < len && self.pts[j].1 >= py {
            return; // weakly dominated by the element at or right of px
        }
        // Elements with x <= px and y <= py form the contiguous range
        // lo..hi_excl; they are dominated by the new point.
        let hi_excl = if j < len && self.pts[j].0 == px { j + 1 } else { j };
        let lo = self.pts.partition_point(|p| p.1 > py);
        debug_assert!(lo <= hi_excl);
        let x_left = if lo > 0 { self.pts[lo - 1].0 } else { self.ref_x };
        let mut prev = x_left;
        for &(x, y) in &self.pts[lo..hi_excl] {
            self.area -= (x - prev) * (y - self.ref_y);
            prev = x;
        }
        self.area += (px - x_left) * (py - self.ref_y);
        if hi_excl < len {
            // The old right neighbour's strip now starts at px.
            self.area -= (px - prev) * (self.pts[hi_excl].1 - self.ref_y);
        }
        self.pts.splice(lo..hi_excl, std::iter::once((px, py)));
    }
}

/// Volume of the region dominated by `pts` inside [lo, up].
///
/// `pts` must be sorted by descending z (clipping preserves that order).
/// Sweeps z downward, accumulating staircase-area times slab height.
pub(crate) fn dominated_volume_clipped(
    pts_desc_z: &[[f64; 3]],
    lo: [f64; 3],
    up: [f64; 3],
    stair: &mut Staircase2,
) -> f64 {
    stair.reset(lo[0], lo[1]);
    let mut vol = 0.0;
    let mut prev_z = f64::NAN;
    for &[x, y, z] in pts_desc_z {
        let cx = x.min(up[0]);
        let cy = y.min(up[1]);
        let cz = z.min(up[2]);
        if cx <= lo[0] || cy <= lo[1] || cz <= lo[2] {
            continue;
        }
        if prev_z.is_nan() {
            prev_z = cz;
        } else if prev_z > cz {
            vol += stair.area() * (prev_z - cz);
            prev_z = cz;
        }
        stair.insert(cx, cy);
    }
    if !prev_z.is_nan() {
        vol += stair.area() * (prev_z - lo[2]);
    }
    vol
}

fn desc_by(points: &[Point], d: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_unstable_by(|&a, &b| points[b][d].total_cmp(&points[a][d]));
    idx
}

/// Dominated area of a 2-D front above its reference point. Θ(n log n).
pub fn hypervolume_2d(front: &Front) -> f64 {
    assert_eq!(front.dim(), 2, "hypervolume_2d requires a 2-D front");
    let r = front.reference();
    let order = desc_by(front.points(), 0);
    staircase_area_desc(
        order.iter().map(|&i| (front.coord(i, 0), front.coord(i, 1))),
        (r[0], r[1]),
        (f64::INFINITY, f64::INFINITY),
    )
}

/// Dominated volume of a 3-D front above its reference point. O(n log n)
/// sweep along z over an incrementally maintained staircase.
pub fn hypervolume_3d(front: &Front) -> f64 {
    assert_eq!(front.dim(), 3, "hypervolume_3d requires a 3-D front");
    let r = front.reference();
    let order = desc_by(front.points(), 2);
    let pts: Vec<[f64; 3]> = order
        .iter()
        .map(|&i| [front.coord(i, 0), front.coord(i, 1), front.coord(i, 2)])
        .collect();
    let mut stair = Staircase2::new();
    dominated_volume_clipped(
        &pts,
        [r[0], r[1], r[2]],
        [f64::INFINITY; 3],
        &mut stair,
    )
}

/// Reusable hypervolume-improvement evaluator: sorts the front once so that
/// repeated candidate evaluations (Monte Carlo trials, quadrature nodes) skip
/// per-call sorting. [`hypervolume_improvement`] is its one-shot wrapper.
pub(crate) struct ImprovementEval {
    m: usize,
    r: Vec<f64>,
    pts2_desc_x: Vec<(f64, f64)>,
    pts3_desc_z: Vec<[f64; 3]>,
    scratch: Staircase2,
}

impl ImprovementEval {
    pub fn new(front: &Front) -> Self {
        let m = front.dim();
        assert!(
            m == 2 || m == 3,
            "hypervolume improvement supports m in {{2, 3}}"
        );
        let r = front.reference().coords().to_vec();
        let mut pts2_desc_x = Vec::new();
        let mut pts3_desc_z = Vec::new();
        if m == 2 {
            pts2_desc_x = front.points().iter().map(|p| (p[0], p[1])).collect();
            pts2_desc_x.sort_unstable_by(|a, b| b.0.total_cmp(&a.0));
        } else {
            pts3_desc_z = front.points().iter().map(|p| [p[0], p[1], p[2]]).collect();
            pts3_desc_z.sort_unstable_by(|a, b| b[2].total_cmp(&a[2]));
        }
        ImprovementEval {
            m,
            r,
            pts2_desc_x,
            pts3_desc_z,
            scratch: Staircase2::new(),
        }
    }

    /// HV(P ∪ {c}) − HV(P); exactly 0 for weakly dominated candidates and for
    /// candidates at or below the reference in some coordinate.
    pub fn eval(&mut self, c: &[f64]) -> f64 {
        debug_assert_eq!(c.len(), self.m);
        let mut box_vol = 1.0;
        for d in 0..self.m {
            let side = c[d] - self.r[d];
            if side <= 0.0 {
                return 0.0;
            }
            box_vol *= side;
        }
        let dominated = if self.m == 2 {
            if self.pts2_desc_x.iter().any(|q| q.0 >= c[0] && q.1 >= c[1]) {
                return 0.0;
            }
            staircase_area_desc(
                self.pts2_desc_x.iter().copied(),
                (self.r[0], self.r[1]),
                (c[0], c[1]),
            )
        } else {
            if self
                .pts3_desc_z
                .iter()
                .any(|q| q[0] >= c[0] && q[1] >= c[1] && q[2] >= c[2])
            {
                return 0.0;
            }
            dominated_volume_clipped(
                &self.pts3_desc_z,
                [self.r[0], self.r[1], self.r[2]],
                [c[0], c[1], c[2]],
                &mut self.scratch,
            )
        };
        (box_vol - dominated).max(0.0)
    }
}

/// Hypervolume gained by adding `p` to the front: HV(P ∪ {p}) − HV(P).
///
/// Exactly 0 when `p` is weakly dominated by a member of P or falls at or
/// below the reference in some coordinate (the candidate box is clipped to
/// the reference box first).
pub fn hypervolume_improvement(p: &Point, front: &Front) -> f64 {
    assert_eq!(
        p.dim(),
        front.dim(),
        "hypervolume_improvement: dimension mismatch"
    );
    ImprovementEval::new(front).eval(p.coords())
}

/// Area of DomSet(points) ∩ box, measured relative to `box.lower`.
pub fn clipped_dominated_area_2d(points: &[Point], clip: &ClippedBox) -> f64 {
    assert_eq!(clip.lower.dim(), 2, "clipped_dominated_area_2d is 2-D");
    for p in points {
        assert_eq!(p.dim(), 2, "clipped_dominated_area_2d is 2-D");
    }
    let mut pts: Vec<(f64, f64)> = points.iter().map(|p| (p[0], p[1])).collect();
    pts.sort_unstable_by(|a, b| b.0.total_cmp(&a.0));
    staircase_area_desc(
        pts,
        (clip.lower[0], clip.lower[1]),
        (clip.upper[0], clip.upper[1]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{dominates_slice, validate_front};

    fn pt(coords: &[f64]) -> Point {
        Point::new(coords.to_vec()).unwrap()
    }

    fn front(points: &[&[f64]], reference: &[f64]) -> Front {
        validate_front(
            points.iter().map(|c| pt(c)).collect(),
            pt(reference),
        )
        .unwrap()
    }

    /// Inclusion-exclusion oracle over all 2^n - 1 box intersections.
    fn hv_inclusion_exclusion(points: &[Vec<f64>], r: &[f64]) -> f64 {
        let n = points.len();
        let m = r.len();
        let mut total = 0.0;
        for mask in 1u32..(1 << n) {
            let mut vol = 1.0;
            for d in 0..m {
                let mut mn = f64::INFINITY;
                for (i, p) in points.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        mn = mn.min(p[d]);
                    }
                }
                vol *= (mn - r[d]).max(0.0);
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
    fn hv2d_examples() {
        assert_eq!(hypervolume_2d(&front(&[&[1.0, 2.0], &[2.0, 1.0]], &[0.0, 0.0])), 3.0);
        assert_eq!(hypervolume_2d(&front(&[&[3.0, 3.0]], &[0.0, 0.0])), 9.0);
        assert_eq!(hypervolume_2d(&front(&[], &[0.0, 0.0])), 0.0);
    }

    #[test]
    fn hv3d_examples() {
        let f = front(
            &[&[1.0, 2.0, 3.0], &[2.0, 3.0, 1.0], &[3.0, 1.0, 2.0]],
            &[0.0, 0.0, 0.0],
        );
        assert_eq!(hypervolume_3d(&f), 13.0);
        assert_eq!(
            hypervolume_3d(&front(&[&[2.0, 2.0, 2.0]], &[1.0, 1.0, 1.0])),
            1.0
        );
        assert_eq!(hypervolume_3d(&front(&[], &[0.0, 0.0, 0.0])), 0.0);
    }

    #[test]
    fn hv3d_matches_inclusion_exclusion_on_random_sets() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(7);
        for trial in 0..300 {
            let n = rng.random_range(1..=8);
            let mut pts = Vec::new();
            while pts.len() < n {
                let c: Vec<f64> = (0..3).map(|_| rng.random_range(0.1..4.0)).collect();
                // only mutually non-dominated additions, to form a valid front
                if !pts
                    .iter()
                    .any(|q: &Vec<f64>| dominates_slice(q, &c) || dominates_slice(&c, q) || *q == c)
                {
                    pts.push(c);
                }
            }
            let f = validate_front(
                pts.iter().map(|c| pt(c)).collect(),
                pt(&[0.0, 0.0, 0.0]),
            )
            .unwrap();
            let got = hypervolume_3d(&f);
            let want = hv_inclusion_exclusion(&pts, &[0.0, 0.0, 0.0]);
            assert!(
                (got - want).abs() <= 1e-12 * want.max(1.0),
                "trial {trial}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn improvement_examples() {
        let f2 = front(&[&[1.0, 2.0], &[2.0, 1.0]], &[0.0, 0.0]);
        assert_eq!(hypervolume_improvement(&pt(&[2.0, 2.0]), &f2), 1.0);
        assert_eq!(hypervolume_improvement(&pt(&[1.0, 1.0]), &f2), 0.0);
        assert_eq!(hypervolume_improvement(&pt(&[1.0, 2.0]), &f2), 0.0); // equal member
        assert_eq!(hypervolume_improvement(&pt(&[-1.0, 5.0]), &f2), 0.0); // below reference

        let f3 = front(
            &[&[1.0, 2.0, 3.0], &[2.0, 3.0, 1.0], &[3.0, 1.0, 2.0]],
            &[0.0, 0.0, 0.0],
        );
        assert_eq!(hypervolume_improvement(&pt(&[3.0, 3.0, 3.0]), &f3), 14.0);
    }

    #[test]
    fn clipped_area_examples() {
        let unit = ClippedBox::new(pt(&[0.0, 0.0]), pt(&[1.0, 1.0])).unwrap();
        assert_eq!(clipped_dominated_area_2d(&[pt(&[2.0, 2.0])], &unit), 1.0);
        assert_eq!(clipped_dominated_area_2d(&[], &unit), 0.0);
        let two = ClippedBox::new(pt(&[0.0, 0.0]), pt(&[2.0, 2.0])).unwrap();
        assert_eq!(
            clipped_dominated_area_2d(&[pt(&[1.0, 3.0]), pt(&[3.0, 1.0])], &two),
            3.0
        );
    }

    #[test]
    fn malformed_box_is_rejected() {
        assert_eq!(
            ClippedBox::new(pt(&[1.0, 0.0]), pt(&[0.0, 1.0])).unwrap_err(),
            BoxError::Inverted { dim: 0 }
        );
        assert!(matches!(
            ClippedBox::new(pt(&[0.0]), pt(&[1.0, 1.0])).unwrap_err(),
            BoxError::DimensionMismatch { .. }
        ));
    }

    #[test]
    fn staircase_handles_dominated_and_duplicate_inserts() {
        let mut s = Staircase2::new();
        s.reset(0.0, 0.0);
        s.insert(2.0, 2.0);
        s.insert(1.0, 3.0);
        s.insert(3.0, 1.0);
        assert_eq!(s.area(), 6.0);
        s.insert(2.5, 2.5); // evicts (2,2)
        assert_eq!(s.area(), 7.25);
        s.insert(2.0, 2.0); // dominated, no change
        s.insert(1.0, 3.0); // duplicate, no change
        assert_eq!(s.area(), 7.25);
    }

    #[test]
    fn translation_and_scale_properties_2d_3d() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(11);
        for _ in 0..50 {
            let n = rng.random_range(1..=10);
            let mut pts: Vec<Vec<f64>> = Vec::new();
            while pts.len() < n {
                let c: Vec<f64> = (0..3).map(|_| rng.random_range(0.5..5.0)).collect();
                if !pts
                    .iter()
                    .any(|q| dominates_slice(q, &c) || dominates_slice(&c, q) || *q == c)
                {
                    pts.push(c);
                }
            }
            let r = vec![0.0, 0.0, 0.0];
            let base = hypervolume_3d(
                &validate_front(pts.iter().map(|c| pt(c)).collect(), pt(&r)).unwrap(),
            );
            let t = [1.5, -0.75, 2.25];
            let shifted = hypervolume_3d(
                &validate_front(
                    pts.iter()
                        .map(|c| pt(&[c[0] + t[0], c[1] + t[1], c[2] + t[2]]))
                        .collect(),
                    pt(&[t[0], t[1], t[2]]),
                )
                .unwrap(),
            );
            assert!((base - shifted).abs() <= 1e-12 * base.max(1.0));
            let s = [2.0, 0.5, 3.0];
            let scaled = hypervolume_3d(
                &validate_front(
                    pts.iter()
                        .map(|c| pt(&[c[0] * s[0], c[1] * s[1], c[2] * s[2]]))
                        .collect(),
                    pt(&[0.0, 0.0, 0.0]),
                )
                .unwrap(),
            );
            let factor = s[0] * s[1] * s[2];
            assert!((scaled - base * factor).abs() <= 1e-12 * (base * factor).max(1.0));
        }
    }

    #[test]
    fn improvement_zero_iff_weakly_dominated() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(23);
        let f = front(
            &[&[1.0, 2.0, 3.0], &[2.0, 3.0, 1.0], &[3.0, 1.0, 2.0]],
            &[0.0, 0.0, 0.0],
        );
        for _ in 0..500 {
            let c = pt(&[
                rng.random_range(-0.5..4.0),
                rng.random_range(-0.5..4.0),
                rng.random_range(-0.5..4.0),
            ]);
            let weakly_dominated = f
                .points()
                .iter()
                .any(|q| (0..3).all(|d| q[d] >= c[d]))
                || (0..3).any(|d| c[d] <= 0.0);
            let imp = hypervolume_improvement(&c, &f);
            if weakly_dominated {
                assert_eq!(imp, 0.0);
            } else {
                assert!(imp > 0.0, "expected positive improvement for {c:?}");
            }
        }
    }
}
