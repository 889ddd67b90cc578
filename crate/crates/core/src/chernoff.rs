//! Translation-type Chernoff functions `(C(t)f)(x) = Σ w_i f(x + c_i√t)`.
//!
//! `C(t/n)^n` is never applied by repeated function composition. Instead the
//! operator is folded into a [`PointMassState`]: a discrete measure on offsets
//! such that `(C(τ)^m f)(x) = Σ weight · f(x + offset)`. For the symmetric
//! three-point operators the masses sit on a lattice, so the state has
//! `2m + 1` entries and evaluation costs O(m) per point instead of O(3^m).

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::functions::ScalarFunction;
use crate::grid::Grid;

/// Offsets closer than this are merged during composition.
pub const MERGE_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_STATE_CAP: usize = 1_000_000;
/// Largest n accepted by [`evaluate_naive`].
pub const NAIVE_MAX_STEPS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftTerm {
    pub weight: f64,
    /// Displacement per unit √t.
    pub shift: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftChernoffOperator {
    name: String,
    terms: Vec<ShiftTerm>,
}

impl ShiftChernoffOperator {
    /// Validates that the weights are non-negative and sum to one, and that
    /// shifts are pairwise distinct. Together these give `C(0) = I` and
    /// `‖C(t)‖ ≤ 1`.
    pub fn new(name: impl Into<String>, terms: Vec<ShiftTerm>) -> Result<Self> {
        let name = name.into();
        let invalid = |reason: String| Error::InvalidOperator {
            name: name.clone(),
            reason,
        };
        if terms.is_empty() {
            return Err(invalid("no terms".into()));
        }
        if let Some(t) = terms
            .iter()
            .find(|t| !(t.weight >= 0.0 && t.weight.is_finite()))
        {
            return Err(invalid(format!(
                "weight {} is negative or not finite",
                t.weight
            )));
        }
        if let Some(t) = terms.iter().find(|t| !t.shift.is_finite()) {
            return Err(invalid(format!("shift {} is not finite", t.shift)));
        }
        let total = ascending_sum(terms.iter().map(|t| t.weight));
        if (total - 1.0).abs() > 1e-15 {
            return Err(invalid(format!("weights sum to {total}, expected 1")));
        }
        for (i, a) in terms.iter().enumerate() {
            if terms[i + 1..].iter().any(|b| b.shift == a.shift) {
                return Err(invalid(format!("shift {} appears twice", a.shift)));
            }
        }
        Ok(Self { name, terms })
    }

    /// `(G(t)f)(x) = ½f(x) + ¼f(x + 2√t) + ¼f(x − 2√t)`, first-order tangent.
    pub fn g() -> Self {
        Self::new(
            "G",
            vec![
                ShiftTerm {
                    weight: 0.5,
                    shift: 0.0,
                },
                ShiftTerm {
                    weight: 0.25,
                    shift: 2.0,
                },
                ShiftTerm {
                    weight: 0.25,
                    shift: -2.0,
                },
            ],
        )
        .expect("G is a valid operator")
    }

    /// `(S(t)f)(x) = ⅔f(x) + ⅙f(x + √(6t)) + ⅙f(x − √(6t))`, second-order tangent.
    pub fn s() -> Self {
        let c = 6f64.sqrt();
        Self::new(
            "S",
            vec![
                ShiftTerm {
                    weight: 2.0 / 3.0,
                    shift: 0.0,
                },
                ShiftTerm {
                    weight: 1.0 / 6.0,
                    shift: c,
                },
                ShiftTerm {
                    weight: 1.0 / 6.0,
                    shift: -c,
                },
            ],
        )
        .expect("S is a valid operator")
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "G" | "g" => Ok(Self::g()),
            "S" | "s" => Ok(Self::s()),
            other => Err(Error::UnknownOperator(other.to_string())),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn terms(&self) -> &[ShiftTerm] {
        &self.terms
    }

    /// `(C(t)f)(x)`.
    pub fn apply_once(&self, t: f64, f: &ScalarFunction, x: f64) -> f64 {
        let root = t.sqrt();
        self.terms
            .iter()
            .map(|term| term.weight * f.eval(x + term.shift * root))
            .sum()
    }

    /// `C(t) sin = A(t)·sin + B(t)·cos`; returns `(A, B)`. For operators with
    /// symmetric shifts `B = 0` and `A` is the eigenvalue on `sin`.
    pub fn sine_response(&self, t: f64) -> (f64, f64) {
        let root = t.sqrt();
        let a = self
            .terms
            .iter()
            .map(|s| s.weight * (s.shift * root).cos())
            .sum();
        let b = self
            .terms
            .iter()
            .map(|s| s.weight * (s.shift * root).sin())
            .sum();
        (a, b)
    }

    /// Folds the operator `m` times at step `tau`, merging coincident offsets.
    pub fn compose(&self, tau: f64, m: usize) -> Result<PointMassState> {
        self.compose_with_cap(tau, m, DEFAULT_STATE_CAP)
    }

    pub fn compose_with_cap(&self, tau: f64, m: usize, cap: usize) -> Result<PointMassState> {
        if m == 0 {
            return Err(Error::ZeroSteps);
        }
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(Error::InvalidTime(tau));
        }
        let root = tau.sqrt();
        let mut state = vec![PointMass {
            offset: 0.0,
            weight: 1.0,
        }];
        for _ in 0..m {
            let mut spawned = Vec::with_capacity(state.len() * self.terms.len());
            for mass in &state {
                for term in &self.terms {
                    spawned.push(PointMass {
                        offset: mass.offset + term.shift * root,
                        weight: mass.weight * term.weight,
                    });
                }
            }
            state = merge(spawned);
            if state.len() > cap {
                return Err(Error::StateExplosion {
                    size: state.len(),
                    cap,
                });
            }
        }
        Ok(PointMassState { masses: state })
    }
}

fn merge(mut masses: Vec<PointMass>) -> Vec<PointMass> {
    masses.sort_by(|a, b| a.offset.total_cmp(&b.offset));
    let mut out: Vec<PointMass> = Vec::with_capacity(masses.len());
    for m in masses {
        match out.last_mut() {
            Some(last) if (m.offset - last.offset).abs() <= MERGE_TOLERANCE => {
                last.weight += m.weight
            }
            _ => out.push(m),
        }
    }
    out
}

fn ascending_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    v.iter().sum()
}

/// `G` and `S`.
pub fn builtin_operators() -> (ShiftChernoffOperator, ShiftChernoffOperator) {
    (ShiftChernoffOperator::g(), ShiftChernoffOperator::s())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointMass {
    pub offset: f64,
    pub weight: f64,
}

/// Discrete measure representing `C(τ)^m`, sorted by offset.
#[derive(Debug, Clone, PartialEq)]
pub struct PointMassState {
    masses: Vec<PointMass>,
}

impl PointMassState {
    pub fn masses(&self) -> &[PointMass] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.masses.iter().map(|m| m.weight).sum()
    }

    pub fn apply(&self, f: &ScalarFunction, x: f64) -> f64 {
        self.masses
            .iter()
            .map(|m| m.weight * f.eval(x + m.offset))
            .sum()
    }
}

/// `u_n(t, x) = (C(t/n)^n u0)(x)` at every `x` in `xs`.
pub fn evaluate_approximation(
    op: &ShiftChernoffOperator,
    t: f64,
    n: usize,
    u0: &ScalarFunction,
    xs: &[f64],
) -> Result<Vec<f64>> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidTime(t));
    }
    let state = op.compose(t / n.max(1) as f64, n)?;
    Ok(xs.iter().map(|&x| state.apply(u0, x)).collect())
}

/// Same quantity as [`evaluate_approximation`] by brute-force recursion over
/// all `terms^n` shift sequences, without merging. Cost grows as `3^n`.
pub fn evaluate_naive(
    op: &ShiftChernoffOperator,
    t: f64,
    n: usize,
    u0: &ScalarFunction,
    x: f64,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::ZeroSteps);
    }
    if n > NAIVE_MAX_STEPS {
        return Err(Error::NaiveBudget {
            n,
            max: NAIVE_MAX_STEPS,
        });
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidTime(t));
    }
    let root = (t / n as f64).sqrt();

    fn recurse(terms: &[ShiftTerm], root: f64, depth: usize, u0: &ScalarFunction, x: f64) -> f64 {
        if depth == 0 {
            return u0.eval(x);
        }
        terms
            .iter()
            .map(|term| term.weight * recurse(terms, root, depth - 1, u0, x + term.shift * root))
            .sum()
    }

    Ok(recurse(op.terms(), root, n, u0, x))
}

/// Small-time steps used by default when checking tangency order.
pub const DEFAULT_TANGENCY_TIMES: [f64; 5] = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6];

const TANGENCY_GRID_COUNT: usize = 1000;

/// Moment mismatches below this relative size are rounding, not a defect of
/// the operator.
const MOMENT_SNAP: f64 = 1e-13;

/// `sup_x |(C(t) sin)(x) − Σ_{j≤k} (t^j/j!)(L^j sin)(x)| / t^k` with `L = d²/dx²`,
/// over 1000 points of `[−π, π]`.
///
/// Evaluated through the moment expansion
/// `Σ_i w_i cos(c_i√t) = Σ_m (−t)^m μ_m`, `μ_m = Σ_i w_i c_i^{2m} / (2m)!`,
/// so the Taylor part cancels coefficient by coefficient instead of after
/// multiplying by `t^m`.
pub fn tangency_residual(op: &ShiftChernoffOperator, k: usize, t: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidOrder);
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidTime(t));
    }
    let terms = op.terms();
    // c^{2m}/(2m)! and c^{2m+1}/(2m+1)!
    let mut even_moments: Vec<f64> = terms.iter().map(|_| 1.0).collect();
    let mut odd_moments: Vec<f64> = terms.iter().map(|s| s.shift).collect();
    let mut inv_factorial = 1.0;
    let mut power = t.powi(-(k as i32));
    // even part: coefficient of sin x, odd part: coefficient of cos x
    let mut even = 0.0;
    let mut odd = 0.0;
    for m in 0..400usize {
        if m > 0 {
            let (a, b) = ((2 * m - 1) as f64, (2 * m) as f64);
            for (e, s) in even_moments.iter_mut().zip(terms) {
                *e *= s.shift * s.shift / (a * b);
            }
            for (o, s) in odd_moments.iter_mut().zip(terms) {
                *o *= s.shift * s.shift / (b * (b + 1.0));
            }
            inv_factorial /= m as f64;
            power *= t;
        }
        let mu = ascending_sum(terms.iter().zip(&even_moments).map(|(s, e)| s.weight * e));
        let nu = ascending_sum(terms.iter().zip(&odd_moments).map(|(s, o)| s.weight * o));
        let mut defect = mu;
        if m <= k {
            defect -= inv_factorial;
            if defect.abs() <= MOMENT_SNAP * inv_factorial {
                defect = 0.0;
            }
        }
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        even += sign * defect * power;
        odd += sign * nu * power * t.sqrt();
        let magnitude = even_moments
            .iter()
            .chain(&odd_moments)
            .fold(0.0f64, |acc, v| acc.max(v.abs()));
        if m > k + 1 && magnitude * power <= 1e-18 * (even.abs() + odd.abs()).max(f64::MIN_POSITIVE)
        {
            break;
        }
    }
    Ok(sup_on_tangency_grid(|x| even * x.sin() + odd * x.cos()))
}

/// [`tangency_residual`] by direct subtraction on the grid. Loses all
/// significant digits once `t^{k+1}` approaches machine epsilon.
pub fn tangency_residual_direct(op: &ShiftChernoffOperator, k: usize, t: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidOrder);
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidTime(t));
    }
    let sine = crate::functions::sine();
    let mut taylor = 0.0;
    let mut term = 1.0;
    for j in 0..=k {
        if j > 0 {
            term *= -t / j as f64;
        }
        taylor += term;
    }
    let tk = t.powi(k as i32);
    Ok(sup_on_tangency_grid(|x| {
        (op.apply_once(t, &sine, x) - taylor * x.sin()) / tk
    }))
}

fn sup_on_tangency_grid(f: impl Fn(f64) -> f64) -> f64 {
    let grid = Grid::new(-PI, PI, TANGENCY_GRID_COUNT).expect("static grid");
    grid.points()
        .iter()
        .map(|&x| f(x).abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TangencyReport {
    pub operator: String,
    pub order: usize,
    /// `(t, residual)` with t decreasing.
    pub residuals: Vec<(f64, f64)>,
    pub pass: bool,
}

impl TangencyReport {
    /// Residual at the smallest t.
    pub fn limit(&self) -> f64 {
        self.residuals.last().map(|r| r.1).unwrap_or(f64::NAN)
    }
}

/// Evaluates the residual along `times` (sorted into decreasing order) and
/// passes when it falls by at least a factor of 2 per decade of t.
pub fn check_tangency(
    op: &ShiftChernoffOperator,
    k: usize,
    times: &[f64],
) -> Result<TangencyReport> {
    if times.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: times.len(),
        });
    }
    let mut ts = times.to_vec();
    ts.sort_by(|a, b| b.total_cmp(a));
    ts.dedup();
    let residuals = ts
        .iter()
        .map(|&t| tangency_residual(op, k, t).map(|r| (t, r)))
        .collect::<Result<Vec<_>>>()?;
    let pass = residuals.windows(2).all(|w| {
        let ((t0, r0), (t1, r1)) = (w[0], w[1]);
        if r0 == 0.0 && r1 == 0.0 {
            return true;
        }
        let decades = (t0 / t1).log10();
        r1 > 0.0 && r0 / r1 >= 2f64.powf(decades)
    });
    Ok(TangencyReport {
        operator: op.name().to_string(),
        order: k,
        residuals,
        pass,
    })
}
