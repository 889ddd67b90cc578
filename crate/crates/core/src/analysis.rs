//! Error measurement and empirical convergence orders.
//!
//! For each (initial condition, operator) pair the sup-norm error
//! `d_n = max_k |u_n(t, x_k) − u(t, x_k)|` is recorded for n = 1..n_max and
//! `ln d` is regressed on `ln n`; the negated slope is the empirical order.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::chernoff::{evaluate_approximation, ShiftChernoffOperator};
use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::functions::{catalog_entry, exact_solution, ReferenceSolution, ScalarFunction};
use crate::grid::{Grid, DEFAULT_GRID_COUNT};

/// Minimum number of points for any regression.
pub const MIN_FIT_POINTS: usize = 3;

/// `max_k |approx[k] − reference[k]|`.
pub fn sup_error(approx: &[f64], reference: &[f64]) -> Result<f64> {
    if approx.len() != reference.len() {
        return Err(Error::ShapeMismatch {
            left: approx.len(),
            right: reference.len(),
        });
    }
    if approx.is_empty() {
        return Err(Error::EmptyGrid);
    }
    Ok(approx
        .iter()
        .zip(reference)
        .map(|(a, r)| (a - r).abs())
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub n: usize,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorCurve {
    pub condition: String,
    pub operator: String,
    pub t: f64,
    pub points: Vec<CurvePoint>,
}

impl ErrorCurve {
    pub fn pairs(&self) -> Vec<(usize, f64)> {
        self.points.iter().map(|p| (p.n, p.error)).collect()
    }

    pub fn fit(&self, excluded_n: &BTreeSet<usize>) -> Result<RegressionFit> {
        ols_fit(&self.pairs(), excluded_n)
    }
}

fn validate_n_range(n_range: &[usize]) -> Result<()> {
    if n_range.is_empty() {
        return Err(Error::InvalidConfig("empty n range".into()));
    }
    let distinct: BTreeSet<usize> = n_range.iter().copied().collect();
    if distinct.len() != n_range.len() || distinct.contains(&0) {
        return Err(Error::InvalidConfig(format!(
            "n values must be distinct and >= 1, got {n_range:?}"
        )));
    }
    Ok(())
}

/// Error curve on the default 1000-point grid over `u0`'s comparison interval.
pub fn error_curve(
    op: &ShiftChernoffOperator,
    u0: &ScalarFunction,
    t: f64,
    n_range: &[usize],
) -> Result<ErrorCurve> {
    validate_n_range(n_range)?;
    let grid = Grid::from_interval(u0.comparison_interval(), DEFAULT_GRID_COUNT)?;
    let reference =
        exact_solution(u0, t, &grid).map_err(|e| e.annotate(u0.name(), op.name(), None))?;
    error_curve_on(op, u0, &grid, &reference, n_range)
}

/// Error curve against a precomputed reference solution on `grid`.
pub fn error_curve_on(
    op: &ShiftChernoffOperator,
    u0: &ScalarFunction,
    grid: &Grid,
    reference: &ReferenceSolution,
    n_range: &[usize],
) -> Result<ErrorCurve> {
    validate_n_range(n_range)?;
    let t = reference.t;
    let points = n_range
        .iter()
        .map(|&n| {
            let annotate = |e: Error| e.annotate(u0.name(), op.name(), Some(n));
            let approx = evaluate_approximation(op, t, n, u0, grid.points()).map_err(annotate)?;
            let error = sup_error(&approx, &reference.values).map_err(annotate)?;
            Ok(CurvePoint { n, error })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ErrorCurve {
        condition: u0.name().to_string(),
        operator: op.name().to_string(),
        t,
        points,
    })
}

/// Ordinary least squares `y = slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// `1 − SS_res/SS_tot`, mean-centred.
    pub r2: f64,
    pub points: usize,
}

pub fn linear_fit(points: &[(f64, f64)]) -> Result<LineFit> {
    let count = points.len();
    if count < MIN_FIT_POINTS {
        return Err(Error::InsufficientData {
            needed: MIN_FIT_POINTS,
            got: count,
        });
    }
    let nf = count as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (dx, dy) = (x - mean_x, y - mean_y);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::InsufficientData { needed: 2, got: 1 });
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = points
        .iter()
        .map(|&(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    let r2 = if ss_res == 0.0 || syy == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(LineFit {
        slope,
        intercept,
        r2,
        points: count,
    })
}

/// Log-log fit of an error curve.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub excluded_n: BTreeSet<usize>,
}

/// Fits `ln d = slope·ln n + intercept` over the points whose n is not excluded.
pub fn ols_fit(points: &[(usize, f64)], excluded_n: &BTreeSet<usize>) -> Result<RegressionFit> {
    let mut logs = Vec::with_capacity(points.len());
    for &(n, d) in points.iter().filter(|(n, _)| !excluded_n.contains(n)) {
        if !(d > 0.0 && d.is_finite()) || n == 0 {
            return Err(Error::LogDomain { n, error: d });
        }
        logs.push(((n as f64).ln(), d.ln()));
    }
    let line = linear_fit(&logs)?;
    Ok(RegressionFit {
        slope: line.slope,
        intercept: line.intercept,
        r2: line.r2,
        excluded_n: excluded_n.clone(),
    })
}

/// Outcome for one (condition, operator) pair. A failed curve leaves the
/// fit failed with the same error.
#[derive(Debug, Clone)]
pub struct PairResult {
    pub condition: String,
    pub operator: String,
    pub excluded_n: BTreeSet<usize>,
    pub curve: Result<ErrorCurve>,
    pub fit: Result<RegressionFit>,
}

impl PairResult {
    pub fn is_ok(&self) -> bool {
        self.curve.is_ok() && self.fit.is_ok()
    }

    pub fn error(&self) -> Option<&Error> {
        self.curve.as_ref().err().or(self.fit.as_ref().err())
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub t: f64,
    pub results: Vec<PairResult>,
}

impl ExperimentReport {
    pub fn get(&self, condition: &str, operator: &str) -> Option<&PairResult> {
        self.results
            .iter()
            .find(|r| r.condition == condition && r.operator == operator)
    }

    pub fn all_ok(&self) -> bool {
        self.results.iter().all(PairResult::is_ok)
    }

    /// `(α, slope)` for every successful `|sin x|^α` fit with the given operator.
    pub fn holder_points(&self, operator: &str) -> Vec<(f64, f64)> {
        self.results
            .iter()
            .filter(|r| r.operator == operator && r.condition.starts_with("abs-sin-"))
            .filter_map(|r| {
                let alpha = catalog_entry(&r.condition).ok()?.smoothness_exponent()?;
                let fit = r.fit.as_ref().ok()?;
                Some((alpha, fit.slope))
            })
            .collect()
    }
}

/// Runs every (condition, operator) pair of `config`. Numerical failures are
/// recorded per pair; only an invalid configuration fails the whole run.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let conditions = config
        .conditions
        .iter()
        .map(|name| catalog_entry(name))
        .collect::<Result<Vec<_>>>()?;
    let operators = config
        .operators
        .iter()
        .map(|name| ShiftChernoffOperator::by_name(name))
        .collect::<Result<Vec<_>>>()?;
    let n_range: Vec<usize> = (1..=config.n_max).collect();

    let references: Vec<(Result<Grid>, Result<ReferenceSolution>)> = conditions
        .par_iter()
        .map(|u0| {
            let grid = Grid::from_interval(u0.comparison_interval(), config.grid_count);
            let reference = match &grid {
                Ok(g) => exact_solution(u0, config.t, g),
                Err(e) => Err(e.clone()),
            };
            (grid, reference)
        })
        .collect();

    let jobs: Vec<(usize, &ShiftChernoffOperator)> = (0..conditions.len())
        .flat_map(|c| operators.iter().map(move |op| (c, op)))
        .collect();

    let results = jobs
        .par_iter()
        .map(|&(c, op)| {
            let u0 = &conditions[c];
            let excluded_n = config.exclusions_for(u0.name(), op.name());
            let curve = match &references[c] {
                (Ok(grid), Ok(reference)) => error_curve_on(op, u0, grid, reference, &n_range),
                (Err(e), _) | (_, Err(e)) => Err(e.clone().annotate(u0.name(), op.name(), None)),
            };
            let fit = match &curve {
                Ok(curve) => curve
                    .fit(&excluded_n)
                    .map_err(|e| e.annotate(u0.name(), op.name(), None)),
                Err(e) => Err(e.clone()),
            };
            PairResult {
                condition: u0.name().to_string(),
                operator: op.name().to_string(),
                excluded_n,
                curve,
                fit,
            }
        })
        .collect();

    Ok(ExperimentReport {
        t: config.t,
        results,
    })
}

/// Regression of operator slope against smoothness exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct HolderFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub points: usize,
    pub excluded_alpha: Vec<f64>,
}

/// Exponents dropped from the meta-regression by default.
pub const DEFAULT_META_EXCLUDED: [f64; 1] = [2.5];
/// Largest exponent considered by the meta-regression.
pub const META_MAX_ALPHA: f64 = 2.5;
/// Fitted line `slope·α + intercept` reported for the published run.
pub const REFERENCE_HOLDER_LINE: (f64, f64) = (-0.684, -0.4467);

/// Fits `slope = a·α + b` over points with `α ≤ 5/2` not in `excluded`.
pub fn holder_meta_regression(points: &[(f64, f64)], excluded: &[f64]) -> Result<HolderFit> {
    let used: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|(a, _)| *a <= META_MAX_ALPHA && !excluded.iter().any(|e| (e - a).abs() < 1e-12))
        .collect();
    let line = linear_fit(&used)?;
    Ok(HolderFit {
        slope: line.slope,
        intercept: line.intercept,
        r2: line.r2,
        points: line.points,
        excluded_alpha: excluded.to_vec(),
    })
}
