//! Domain types: objective-space points, validated Pareto front approximations
//! and independent Gaussian predictors.
//!
//! Orientation is maximization throughout. A [`Front`] owns a set of mutually
//! non-dominated points together with a reference point that every member
//! strictly dominates; all exact algorithms take these invariants for granted,
//! so the only way to build a `Front` is through [`validate_front`] /
//! [`Front::new`].

use std::fmt;
use std::ops::Index;

use thiserror::Error;

/// A point in m-dimensional objective space. Coordinates are finite; infinite
/// sentinel coordinates exist only inside the algorithms, never in a `Point`.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    /// Build a point, rejecting non-finite coordinates.
    pub fn new(coords: Vec<f64>) -> Result<Self, FrontError> {
        if let Some(d) = coords.iter().position(|c| !c.is_finite()) {
            return Err(FrontError::NonFinite { dim: d });
        }
        Ok(Point { coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

impl Index<usize> for Point {
    type Output = f64;

    fn index(&self, d: usize) -> &f64 {
        &self.coords[d]
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for c in &self.coords {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
            first = false;
        }
        Ok(())
    }
}

/// Pareto dominance under maximization: `p` dominates `q` iff `p >= q`
/// componentwise with at least one strict inequality. Identical points do not
/// dominate each other.
///
/// Panics if the dimensions differ.
pub fn dominates(p: &Point, q: &Point) -> bool {
    assert_eq!(p.dim(), q.dim(), "dominance requires equal dimensionality");
    dominates_slice(p.coords(), q.coords())
}

pub(crate) fn dominates_slice(p: &[f64], q: &[f64]) -> bool {
    let mut strict = false;
    for (a, b) in p.iter().zip(q) {
        if a < b {
            return false;
        }
        if a > b {
            strict = true;
        }
    }
    strict
}

/// Errors raised while validating fronts and points. The variant name is the
/// contract surfaced to CLI users (`DominatedMember`, ...).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrontError {
    #[error("DimensionMismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("NonFinite: coordinate {dim} is not a finite number")]
    NonFinite { dim: usize },
    #[error("DuplicatePoint: points {a} and {b} are identical")]
    DuplicatePoint { a: usize, b: usize },
    #[error("DominatedMember: point {dominated} is dominated by point {by}")]
    DominatedMember { dominated: usize, by: usize },
    #[error(
        "ReferenceNotDominated: point {point} does not strictly dominate the reference in dimension {dim}"
    )]
    ReferenceNotDominated { point: usize, dim: usize },
}

/// A validated Pareto front approximation: mutually non-dominated points, all
/// strictly dominating the reference point. The point list may be empty.
/// Input order is preserved.
#[derive(Debug, Clone, PartialEq)]
pub struct Front {
    points: Vec<Point>,
    reference: Point,
}

impl Front {
    /// See [`validate_front`].
    pub fn new(points: Vec<Point>, reference: Point) -> Result<Self, FrontError> {
        validate_front(points, reference)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn reference(&self) -> &Point {
        &self.reference
    }

    /// Objective-space dimensionality.
    pub fn dim(&self) -> usize {
        self.reference.dim()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Coordinates of point `i` in dimension `d` without bounds ceremony.
    pub(crate) fn coord(&self, i: usize, d: usize) -> f64 {
        self.points[i][d]
    }
}

/// Validate a candidate front: equal dimensionality, no exact duplicates, no
/// dominated members, and a reference strictly dominated by every point.
pub fn validate_front(points: Vec<Point>, reference: Point) -> Result<Front, FrontError> {
    let m = reference.dim();
    for p in &points {
        if p.dim() != m {
            return Err(FrontError::DimensionMismatch {
                expected: m,
                got: p.dim(),
            });
        }
    }
    for (i, p) in points.iter().enumerate() {
        for d in 0..m {
            if p[d] <= reference[d] {
                return Err(FrontError::ReferenceNotDominated { point: i, dim: d });
            }
        }
    }
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            if points[i] == points[j] {
                return Err(FrontError::DuplicatePoint { a: i, b: j });
            }
            if dominates(&points[i], &points[j]) {
                return Err(FrontError::DominatedMember { dominated: j, by: i });
            }
            if dominates(&points[j], &points[i]) {
                return Err(FrontError::DominatedMember { dominated: i, by: j });
            }
        }
    }
    Ok(Front { points, reference })
}

/// Errors raised while validating Gaussian predictors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PredictorError {
    #[error("DimensionMismatch: mu has {mu} entries, sigma has {sigma}")]
    DimensionMismatch { mu: usize, sigma: usize },
    #[error("NonFinite: predictor parameter in dimension {dim} is not finite")]
    NonFinite { dim: usize },
    #[error("NonPositiveSigma: sigma[{dim}] = {value} must be strictly positive")]
    NonPositiveSigma { dim: usize, value: f64 },
}

/// Per-dimension mean and standard deviation of an independent multivariate
/// Gaussian predictive distribution. Standard deviations are strictly
/// positive: deterministic candidates are served by
/// [`crate::hypervolume::hypervolume_improvement`] instead.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianPredictor {
    mu: Vec<f64>,
    sigma: Vec<f64>,
}

impl GaussianPredictor {
    pub fn new(mu: Vec<f64>, sigma: Vec<f64>) -> Result<Self, PredictorError> {
        if mu.len() != sigma.len() {
            return Err(PredictorError::DimensionMismatch {
                mu: mu.len(),
                sigma: sigma.len(),
            });
        }
        for (d, (&m, &s)) in mu.iter().zip(&sigma).enumerate() {
            if !m.is_finite() || !s.is_finite() {
                return Err(PredictorError::NonFinite { dim: d });
            }
            if s <= 0.0 {
                return Err(PredictorError::NonPositiveSigma { dim: d, value: s });
            }
        }
        Ok(GaussianPredictor { mu, sigma })
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(coords: &[f64]) -> Point {
        Point::new(coords.to_vec()).unwrap()
    }

    #[test]
    fn dominance_definition() {
        assert!(dominates(&pt(&[2.0, 3.0]), &pt(&[1.0, 3.0])));
        assert!(!dominates(&pt(&[1.0, 2.0]), &pt(&[2.0, 1.0])));
        assert!(!dominates(&pt(&[2.0, 1.0]), &pt(&[1.0, 2.0])));
        assert!(!dominates(&pt(&[1.0, 1.0]), &pt(&[1.0, 1.0])));
    }

    #[test]
    #[should_panic(expected = "equal dimensionality")]
    fn dominance_dimension_mismatch_panics() {
        dominates(&pt(&[1.0, 2.0]), &pt(&[1.0, 2.0, 3.0]));
    }

    #[test]
    fn validate_accepts_valid_front() {
        let f = validate_front(
            vec![pt(&[1.0, 2.0]), pt(&[2.0, 1.0])],
            pt(&[0.0, 0.0]),
        )
        .unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f.dim(), 2);
    }

    #[test]
    fn validate_rejects_dominated_member() {
        let err = validate_front(
            vec![pt(&[1.0, 2.0]), pt(&[2.0, 3.0])],
            pt(&[0.0, 0.0]),
        )
        .unwrap_err();
        assert_eq!(err, FrontError::DominatedMember { dominated: 0, by: 1 });
    }

    #[test]
    fn validate_rejects_reference_tie() {
        // r_x equals p_x: strict dominance of the reference is violated.
        let err = validate_front(vec![pt(&[1.0, 2.0])], pt(&[1.0, 0.0])).unwrap_err();
        assert_eq!(err, FrontError::ReferenceNotDominated { point: 0, dim: 0 });
    }

    #[test]
    fn validate_rejects_duplicates_and_mismatched_dims() {
        let err = validate_front(
            vec![pt(&[1.0, 2.0]), pt(&[1.0, 2.0])],
            pt(&[0.0, 0.0]),
        )
        .unwrap_err();
        assert_eq!(err, FrontError::DuplicatePoint { a: 0, b: 1 });

        let err = validate_front(vec![pt(&[1.0, 2.0, 3.0])], pt(&[0.0, 0.0])).unwrap_err();
        assert!(matches!(err, FrontError::DimensionMismatch { .. }));
    }

    #[test]
    fn empty_front_is_permitted() {
        let f = validate_front(vec![], pt(&[0.0, 0.0, 0.0])).unwrap();
        assert!(f.is_empty());
    }

    #[test]
    fn point_rejects_non_finite() {
        assert!(Point::new(vec![1.0, f64::INFINITY]).is_err());
        assert!(Point::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn predictor_validation() {
        assert!(GaussianPredictor::new(vec![0.0, 1.0], vec![1.0, 2.0]).is_ok());
        assert_eq!(
            GaussianPredictor::new(vec![0.0], vec![0.0]).unwrap_err(),
            PredictorError::NonPositiveSigma { dim: 0, value: 0.0 }
        );
        assert!(matches!(
            GaussianPredictor::new(vec![0.0, 1.0], vec![1.0]).unwrap_err(),
            PredictorError::DimensionMismatch { .. }
        ));
    }
}
