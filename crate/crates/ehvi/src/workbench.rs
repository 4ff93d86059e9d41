//! Workbench plumbing behind the CLI: test-front generators, CSV/JSON
//! formats, scheme dispatch, the verification gate and the timing harness.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::Deserialize;
use thiserror::Error;

use crate::ehvi2d::{ehvi_2d_fast, ehvi_2d_naive};
use crate::ehvi3d::{ehvi_3d_batch, Scheme3};
use crate::oracle::{ehvi_mc, ehvi_quadrature, ConvergenceFailure, McResult};
use crate::types::{
    validate_front, Front, FrontError, GaussianPredictor, Point, PredictorError,
};

/// Default refinement cap handed to the quadrature oracle by the CLI.
pub const DEFAULT_QUAD_CELLS: usize = 4096;

#[derive(Debug, Error)]
pub enum WorkbenchError {
    #[error("{0}")]
    Front(#[from] FrontError),
    #[error("{0}")]
    Predictor(#[from] PredictorError),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

fn invalid(msg: impl Into<String>) -> WorkbenchError {
    WorkbenchError::Invalid(msg.into())
}

// ---------------------------------------------------------------------------
// generators

/// `n` points uniformly distributed on the positive octant of the sphere of
/// the given radius: sample standard 3-D Gaussians, take absolute values,
/// normalize, scale. Distinct points on the octant are mutually
/// non-dominated; the reference is the origin.
pub fn gen_sphere_front(n: usize, radius: f64, seed: u64) -> Front {
    assert!(radius > 0.0, "radius must be positive");
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut points: Vec<Point> = Vec::with_capacity(n);
    while points.len() < n {
        let g: [f64; 3] = std::array::from_fn(|_| {
            let z: f64 = rng.sample(StandardNormal);
            z.abs()
        });
        let norm = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
        if norm == 0.0 || g.iter().any(|&c| c == 0.0) {
            continue; // origin must stay strictly dominated
        }
        let p = Point::new(g.iter().map(|&c| radius * c / norm).collect()).unwrap();
        if points.contains(&p) {
            continue;
        }
        points.push(p);
    }
    validate_front(points, Point::new(vec![0.0, 0.0, 0.0]).unwrap())
        .expect("sphere points are mutually non-dominated")
}

/// Diagonal 2-D front {(i, n+1−i) : i = 1..n} with reference (0, 0). The
/// construction is deterministic; the seed is accepted for interface
/// symmetry with the other generators.
pub fn gen_diagonal_front_2d(n: usize, _seed: u64) -> Front {
    let points = (1..=n)
        .map(|i| Point::new(vec![i as f64, (n + 1 - i) as f64]).unwrap())
        .collect();
    validate_front(points, Point::new(vec![0.0, 0.0]).unwrap())
        .expect("diagonal points are mutually non-dominated")
}

/// The built-in three-point test population with reference (0,0,0).
pub fn paper3_front() -> Front {
    let points = [[1.0, 2.0, 3.0], [2.0, 3.0, 1.0], [3.0, 1.0, 2.0]]
        .iter()
        .map(|c| Point::new(c.to_vec()).unwrap())
        .collect();
    validate_front(points, Point::new(vec![0.0, 0.0, 0.0]).unwrap()).unwrap()
}

// ---------------------------------------------------------------------------
// schemes

/// All computation schemes reachable from the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    TwoDNaive,
    TwoDFast,
    EightTerm,
    FiveTerm,
    TwoTerm,
    Slice,
    Mc,
    Quadrature,
}

impl Scheme {
    pub const ALL: [Scheme; 8] = [
        Scheme::TwoDNaive,
        Scheme::TwoDFast,
        Scheme::EightTerm,
        Scheme::FiveTerm,
        Scheme::TwoTerm,
        Scheme::Slice,
        Scheme::Mc,
        Scheme::Quadrature,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::TwoDNaive => "2d-naive",
            Scheme::TwoDFast => "2d-fast",
            Scheme::EightTerm => "8term",
            Scheme::FiveTerm => "5term",
            Scheme::TwoTerm => "2term",
            Scheme::Slice => "slice",
            Scheme::Mc => "mc",
            Scheme::Quadrature => "quadrature",
        }
    }

    /// Objective-space dimensionality the scheme accepts; None = 2 or 3.
    pub fn dimensionality(&self) -> Option<usize> {
        match self {
            Scheme::TwoDNaive | Scheme::TwoDFast => Some(2),
            Scheme::EightTerm | Scheme::FiveTerm | Scheme::TwoTerm | Scheme::Slice => Some(3),
            Scheme::Mc | Scheme::Quadrature => None,
        }
    }

    /// The exact schemes applicable to fronts of dimension `m`.
    pub fn exact_for_dim(m: usize) -> &'static [Scheme] {
        match m {
            2 => &[Scheme::TwoDNaive, Scheme::TwoDFast],
            3 => &[
                Scheme::EightTerm,
                Scheme::FiveTerm,
                Scheme::TwoTerm,
                Scheme::Slice,
            ],
            _ => &[],
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = WorkbenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scheme::ALL
            .iter()
            .copied()
            .find(|sch| sch.name() == s)
            .ok_or_else(|| invalid(format!("unknown scheme '{s}'")))
    }
}

// ---------------------------------------------------------------------------
// file formats

/// Serialize a front: one point per line, 17-significant-digit fields,
/// preceded by a `# reference:` header. The decimal formatting round-trips
/// f64 bit-exactly.
pub fn front_to_csv(front: &Front) -> String {
    let fmt_coords =
        |c: &[f64]| c.iter().map(|v| format!("{v:.16e}")).collect::<Vec<_>>().join(",");
    let mut out = format!("# reference: {}\n", fmt_coords(front.reference().coords()));
    for p in front.points() {
        out.push_str(&fmt_coords(p.coords()));
        out.push('\n');
    }
    out
}

/// Parse the raw CSV content: point rows plus the reference, which comes
/// from the `# reference:` header or from `reference_override`, the latter
/// winning on conflict. Reports the offending line on parse failures.
fn parse_front_csv(
    text: &str,
    reference_override: Option<&[f64]>,
) -> Result<(Vec<Point>, Point), WorkbenchError> {
    let mut reference: Option<Vec<f64>> = reference_override.map(|r| r.to_vec());
    let mut points: Vec<Point> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if reference_override.is_none() {
                if let Some(spec) = rest.trim().strip_prefix("reference:") {
                    reference = Some(parse_f64_list(spec).map_err(|message| {
                        WorkbenchError::Parse { line: line_no, message }
                    })?);
                }
            }
            continue;
        }
        let coords = parse_f64_list(line)
            .map_err(|message| WorkbenchError::Parse { line: line_no, message })?;
        points.push(Point::new(coords).map_err(|e| WorkbenchError::Parse {
            line: line_no,
            message: e.to_string(),
        })?);
    }
    let reference = reference.ok_or_else(|| {
        invalid("no reference point: add a '# reference:' header or pass --ref")
    })?;
    Ok((points, Point::new(reference)?))
}

/// Parse and validate a front CSV. See [`front_to_csv`] for the format.
pub fn front_from_csv(
    text: &str,
    reference_override: Option<&[f64]>,
) -> Result<Front, WorkbenchError> {
    let (points, reference) = parse_front_csv(text, reference_override)?;
    Ok(validate_front(points, reference)?)
}

/// Comma-separated f64 list, e.g. "1,2.5,3e-1".
pub fn parse_f64_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|tok| {
            let tok = tok.trim();
            tok.parse::<f64>()
                .map_err(|_| format!("'{tok}' is not a number"))
        })
        .collect()
}

#[derive(Debug, Deserialize)]
struct PredictorSpec {
    mu: Vec<f64>,
    sigma: Vec<f64>,
}

/// Parse predictor JSON: either one `{"mu": [...], "sigma": [...]}` object
/// or an array of them (batch mode).
pub fn predictors_from_json(text: &str) -> Result<Vec<GaussianPredictor>, WorkbenchError> {
    let specs: Vec<PredictorSpec> = if text.trim_start().starts_with('[') {
        serde_json::from_str(text).map_err(|e| invalid(format!("predictor JSON: {e}")))?
    } else {
        vec![serde_json::from_str(text).map_err(|e| invalid(format!("predictor JSON: {e}")))?]
    };
    specs
        .into_iter()
        .map(|s| Ok(GaussianPredictor::new(s.mu, s.sigma)?))
        .collect()
}

/// Resolve a front source: `paper3`, `diag:N`, `sphere:N[:RADIUS]`, or a CSV
/// file path. `minimize` negates every coordinate (points and reference)
/// before validation, so minimization data enters the maximization pipeline.
pub fn front_from_spec(
    spec: &str,
    seed: u64,
    reference_override: Option<&[f64]>,
    minimize: bool,
) -> Result<Front, WorkbenchError> {
    let orient = |points: Vec<Point>, reference: Point| -> Result<Front, WorkbenchError> {
        if !minimize {
            return Ok(validate_front(points, reference)?);
        }
        let points = points
            .into_iter()
            .map(|p| Point::new(p.coords().iter().map(|c| -c).collect()).unwrap())
            .collect();
        let reference = Point::new(reference.coords().iter().map(|c| -c).collect()).unwrap();
        Ok(validate_front(points, reference)?)
    };
    let generated = if spec == "paper3" {
        Some(paper3_front())
    } else if let Some(rest) = spec.strip_prefix("diag:") {
        let n: usize = rest
            .parse()
            .map_err(|_| invalid(format!("bad generator spec '{spec}'")))?;
        Some(gen_diagonal_front_2d(n, seed))
    } else if let Some(rest) = spec.strip_prefix("sphere:") {
        let mut parts = rest.split(':');
        let n: usize = parts
            .next()
            .unwrap_or("")
            .parse()
            .map_err(|_| invalid(format!("bad generator spec '{spec}'")))?;
        let radius: f64 = match parts.next() {
            Some(r) => r
                .parse()
                .map_err(|_| invalid(format!("bad radius in '{spec}'")))?,
            None => 1.0,
        };
        Some(gen_sphere_front(n, radius, seed))
    } else {
        None
    };
    match generated {
        Some(f) => {
            let reference = f.reference().clone();
            orient(f.points().to_vec(), reference)
        }
        None => {
            let text = std::fs::read_to_string(spec)?;
            let (points, reference) = parse_front_csv(&text, reference_override)?;
            orient(points, reference)
        }
    }
}

// ---------------------------------------------------------------------------
// compute

/// A fully resolved computation request (front already oriented for
/// maximization, predictors validated).
#[derive(Debug, Clone)]
pub struct ComputeRequest {
    pub front: Front,
    pub predictors: Vec<GaussianPredictor>,
    pub scheme: Scheme,
    pub trials: u64,
    pub seed: u64,
}

/// One output record per predictor.
#[derive(Debug, Clone)]
pub struct ComputeRecord {
    pub value: f64,
    pub mc: Option<McResult>,
}

pub struct ComputeOutput {
    pub scheme: Scheme,
    pub n: usize,
    pub records: Vec<ComputeRecord>,
}

impl ComputeOutput {
    /// Textual report: one value per predictor with 17 significant digits.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for rec in &self.records {
            match &rec.mc {
                Some(mc) => out.push_str(&format!(
                    "scheme={} n={} value={:.16e} trials={} seed={} se={:.16e}\n",
                    self.scheme, self.n, rec.value, mc.trials, mc.seed, mc.standard_error
                )),
                None => out.push_str(&format!(
                    "scheme={} n={} value={:.16e}\n",
                    self.scheme, self.n, rec.value
                )),
            }
        }
        out
    }
}

/// Quadrature failures carry their own exit code, so they surface as a
/// dedicated variant rather than a generic error string.
#[derive(Debug, Error)]
pub enum ComputeError {
    #[error("{0}")]
    Invalid(#[from] WorkbenchError),
    #[error("{0}")]
    Quadrature(#[from] ConvergenceFailure),
}

pub fn run_compute(req: &ComputeRequest) -> Result<ComputeOutput, ComputeError> {
    let m = req.front.dim();
    if let Some(want) = req.scheme.dimensionality() {
        if want != m {
            return Err(invalid(format!(
                "scheme {} requires {}-D fronts, got {}-D",
                req.scheme, want, m
            ))
            .into());
        }
    }
    if !(m == 2 || m == 3) {
        return Err(invalid(format!("unsupported dimensionality {m}")).into());
    }
    if req.predictors.is_empty() {
        return Err(invalid("no predictors given").into());
    }
    for g in &req.predictors {
        if g.dim() != m {
            return Err(invalid(format!(
                "predictor dimensionality {} does not match the {}-D front",
                g.dim(),
                m
            ))
            .into());
        }
    }
    let records = match req.scheme {
        Scheme::TwoDNaive => values_to_records(
            req.predictors.iter().map(|g| ehvi_2d_naive(&req.front, g)),
        ),
        Scheme::TwoDFast => values_to_records(
            req.predictors.iter().map(|g| ehvi_2d_fast(&req.front, g)),
        ),
        Scheme::EightTerm | Scheme::FiveTerm | Scheme::TwoTerm | Scheme::Slice => {
            let scheme3 = match req.scheme {
                Scheme::EightTerm => Scheme3::EightTerm,
                Scheme::FiveTerm => Scheme3::FiveTerm,
                Scheme::TwoTerm => Scheme3::TwoTerm,
                _ => Scheme3::Slice,
            };
            values_to_records(ehvi_3d_batch(&req.front, &req.predictors, scheme3).into_iter())
        }
        Scheme::Mc => req
            .predictors
            .iter()
            .map(|g| {
                let mc = ehvi_mc(&req.front, g, req.trials, req.seed);
                ComputeRecord {
                    value: mc.estimate,
                    mc: Some(mc),
                }
            })
            .collect(),
        Scheme::Quadrature => {
            let mut recs = Vec::with_capacity(req.predictors.len());
            for g in &req.predictors {
                let value = ehvi_quadrature(&req.front, g, DEFAULT_QUAD_CELLS)?;
                recs.push(ComputeRecord { value, mc: None });
            }
            recs
        }
    };
    Ok(ComputeOutput {
        scheme: req.scheme,
        n: req.front.len(),
        records,
    })
}

fn values_to_records(values: impl Iterator<Item = f64>) -> Vec<ComputeRecord> {
    values.map(|value| ComputeRecord { value, mc: None }).collect()
}

// ---------------------------------------------------------------------------
// verify

pub const VERIFY_MAX_REL_DEV: f64 = 1e-12;
pub const VERIFY_MAX_Z: f64 = 4.0;

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub scheme_values: Vec<(Scheme, f64)>,
    pub max_rel_deviation: f64,
    pub mc: McResult,
    pub z_score: f64,
    pub pass: bool,
}

impl VerifyReport {
    /// Gate decision from already-computed values; split out so the
    /// threshold logic is testable against deliberately corrupted inputs.
    pub fn assess(scheme_values: Vec<(Scheme, f64)>, mc: McResult) -> VerifyReport {
        let mut max_rel_deviation = 0.0f64;
        for (i, &(_, a)) in scheme_values.iter().enumerate() {
            for &(_, b) in &scheme_values[i + 1..] {
                let denom = a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
                max_rel_deviation = max_rel_deviation.max((a - b).abs() / denom);
            }
        }
        let reference = scheme_values[0].1;
        let z_score = if mc.standard_error > 0.0 {
            (mc.estimate - reference) / mc.standard_error
        } else if mc.estimate == reference {
            0.0
        } else {
            f64::INFINITY
        };
        let pass = max_rel_deviation <= VERIFY_MAX_REL_DEV && z_score.abs() <= VERIFY_MAX_Z;
        VerifyReport {
            scheme_values,
            max_rel_deviation,
            mc,
            z_score,
            pass,
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (scheme, value) in &self.scheme_values {
            out.push_str(&format!("scheme={scheme} value={value:.16e}\n"));
        }
        out.push_str(&format!(
            "mc estimate={:.16e} trials={} seed={} se={:.16e}\n",
            self.mc.estimate, self.mc.trials, self.mc.seed, self.mc.standard_error
        ));
        out.push_str(&format!(
            "max_rel_deviation={:.3e} z={:.3} verdict={}\n",
            self.max_rel_deviation,
            self.z_score,
            if self.pass { "PASS" } else { "FAIL" }
        ));
        out
    }
}

/// Run every exact scheme applicable to the front plus Monte Carlo, and gate
/// on cross-scheme agreement (≤ 1e−12 relative) and the MC z-score (|z| ≤ 4).
pub fn run_verify(
    front: &Front,
    g: &GaussianPredictor,
    trials: u64,
    seed: u64,
) -> Result<VerifyReport, WorkbenchError> {
    let m = front.dim();
    if g.dim() != m {
        return Err(invalid("predictor dimensionality does not match the front"));
    }
    let schemes = Scheme::exact_for_dim(m);
    if schemes.is_empty() {
        return Err(invalid(format!("unsupported dimensionality {m}")));
    }
    let mut scheme_values = Vec::with_capacity(schemes.len());
    for &scheme in schemes {
        let req = ComputeRequest {
            front: front.clone(),
            predictors: vec![g.clone()],
            scheme,
            trials,
            seed,
        };
        let out = run_compute(&req).map_err(|e| invalid(e.to_string()))?;
        scheme_values.push((scheme, out.records[0].value));
    }
    let mc = ehvi_mc(front, g, trials, seed);
    Ok(VerifyReport::assess(scheme_values, mc))
}

// ---------------------------------------------------------------------------
// bench

#[derive(Debug, Clone)]
pub struct BenchRecord {
    pub scheme: Scheme,
    pub n: usize,
    pub repetitions: usize,
    pub mean_seconds: f64,
    pub min_seconds: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Default)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("scheme,n,repetitions,mean_seconds,min_seconds,value\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{:.9e},{:.9e},{:.16e}\n",
                r.scheme, r.n, r.repetitions, r.mean_seconds, r.min_seconds, r.value
            ));
        }
        out
    }
}

/// Default bench predictor: mean at the upper corner of the front's bounding
/// region, spread wide enough to cover many cells.
fn bench_predictor(front: &Front) -> GaussianPredictor {
    let n = front.len().max(1) as f64;
    match front.dim() {
        2 => GaussianPredictor::new(vec![n / 2.0, n / 2.0], vec![n / 4.0, n / 4.0]).unwrap(),
        _ => GaussianPredictor::new(vec![1.0, 1.0, 1.0], vec![0.5, 0.5, 0.5]).unwrap(),
    }
}

/// Time every (scheme, n) pair. Fronts are generated once per size —
/// diagonal for the 2-D schemes, spherical for the rest — and generation is
/// excluded from the measured interval.
pub fn run_bench(
    sizes: &[usize],
    schemes: &[Scheme],
    repetitions: usize,
    seed: u64,
    trials: u64,
) -> Result<BenchReport, WorkbenchError> {
    if sizes.is_empty() {
        return Err(invalid("--sizes must be nonempty"));
    }
    if repetitions == 0 {
        return Err(invalid("--reps must be at least 1"));
    }
    let mut report = BenchReport::default();
    for &n in sizes {
        let front2 = gen_diagonal_front_2d(n, seed);
        let front3 = gen_sphere_front(n, 1.0, seed);
        for &scheme in schemes {
            let front = match scheme.dimensionality() {
                Some(2) => &front2,
                _ => &front3,
            };
            let g = bench_predictor(front);
            let req = ComputeRequest {
                front: front.clone(),
                predictors: vec![g],
                scheme,
                trials,
                seed,
            };
            let mut times = Vec::with_capacity(repetitions);
            let mut value = 0.0;
            for _ in 0..repetitions {
                let t0 = Instant::now();
                let out = run_compute(&req).map_err(|e| invalid(e.to_string()))?;
                times.push(t0.elapsed().as_secs_f64());
                value = out.records[0].value;
            }
            let mean = times.iter().sum::<f64>() / times.len() as f64;
            let min = times.iter().copied().fold(f64::INFINITY, f64::min);
            report.records.push(BenchRecord {
                scheme,
                n,
                repetitions,
                mean_seconds: mean,
                min_seconds: min,
                value,
            });
        }
    }
    Ok(report)
}
