//! Initial conditions and reference solutions of the heat Cauchy problem
//! `u_t = u_xx`, `u(0, x) = u0(x)` on the whole line.
//!
//! The reference solution is the convolution of `u0` with the heat kernel
//! `Φ(x, t) = (2√(πt))⁻¹ exp(−x²/4t)`. Conditions with a known closed form
//! (`sin`, `e^{−|x|}`, constants) use it; everything else is integrated with
//! adaptive Gauss–Legendre quadrature over `|x − y| ≤ W√t`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::quadrature::{integrate_adaptive, AdaptiveSettings, GaussLegendre};

pub type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Points where an initial condition is not smooth.
#[derive(Debug, Clone, PartialEq)]
pub enum Kinks {
    None,
    /// `origin + k·spacing` for every integer k.
    Lattice {
        origin: f64,
        spacing: f64,
    },
    Points(Vec<f64>),
}

impl Kinks {
    /// Kink locations inside the closed interval `[lo, hi]`, ascending.
    pub fn within(&self, lo: f64, hi: f64) -> Vec<f64> {
        match self {
            Kinks::None => Vec::new(),
            Kinks::Lattice { origin, spacing } => {
                let first = ((lo - origin) / spacing).ceil() as i64;
                let last = ((hi - origin) / spacing).floor() as i64;
                (first..=last)
                    .map(|k| origin + k as f64 * spacing)
                    .collect()
            }
            Kinks::Points(points) => {
                let mut v: Vec<f64> = points
                    .iter()
                    .copied()
                    .filter(|p| (lo..=hi).contains(p))
                    .collect();
                v.sort_by(f64::total_cmp);
                v
            }
        }
    }
}

/// Known analytic solutions of the heat equation for particular initial data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedForm {
    /// `sin x ↦ e^{−t} sin x`
    Sine,
    /// `e^{−|x|}`, see [`closed_form_exp_abs`].
    ExpAbs,
    /// Constants are fixed points of the heat semigroup.
    Constant(f64),
}

impl ClosedForm {
    fn evaluate(&self, t: f64, x: f64) -> f64 {
        match *self {
            ClosedForm::Sine => (-t).exp() * x.sin(),
            ClosedForm::ExpAbs => exp_abs_solution(t, x),
            ClosedForm::Constant(c) => c,
        }
    }
}

/// A bounded real function on ℝ together with the metadata the experiments
/// need: where to measure errors, periodicity and regularity.
#[derive(Clone)]
pub struct ScalarFunction {
    name: String,
    evaluator: Evaluator,
    comparison_interval: (f64, f64),
    period: Option<f64>,
    smoothness_label: String,
    smoothness_exponent: Option<f64>,
    bound: f64,
    kinks: Kinks,
    closed_form: Option<ClosedForm>,
}

impl fmt::Debug for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarFunction")
            .field("name", &self.name)
            .field("comparison_interval", &self.comparison_interval)
            .field("period", &self.period)
            .field("smoothness_label", &self.smoothness_label)
            .field("bound", &self.bound)
            .finish_non_exhaustive()
    }
}

impl ScalarFunction {
    /// A function with no metadata beyond its name. Defaults: comparison
    /// interval `[−π, π]`, not periodic, bound 1, no known kinks.
    pub fn new<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            evaluator: Arc::new(f),
            comparison_interval: (-PI, PI),
            period: None,
            smoothness_label: String::from("unspecified"),
            smoothness_exponent: None,
            bound: 1.0,
            kinks: Kinks::None,
            closed_form: None,
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("const-{c}"), move |_| c)
            .with_bound(c.abs())
            .with_smoothness("C-infinity", None)
            .with_closed_form(ClosedForm::Constant(c))
    }

    /// `a·f + b·g`. The result keeps `f`'s interval and drops closed forms.
    pub fn linear_combination(a: f64, f: &ScalarFunction, b: f64, g: &ScalarFunction) -> Self {
        let (ef, eg) = (f.evaluator.clone(), g.evaluator.clone());
        let mut kinks = f.kinks.clone();
        if kinks != g.kinks {
            kinks = Kinks::None;
        }
        let mut h = Self::new(format!("{a}*{}+{b}*{}", f.name, g.name), move |x| {
            a * ef(x) + b * eg(x)
        })
        .with_interval(f.comparison_interval.0, f.comparison_interval.1)
        .with_bound(a.abs() * f.bound + b.abs() * g.bound)
        .with_kinks(kinks);
        if let (Some(p), Some(q)) = (f.period, g.period) {
            if p == q {
                h = h.with_period(p);
            }
        }
        h
    }

    pub fn with_interval(mut self, a: f64, b: f64) -> Self {
        self.comparison_interval = (a, b);
        self
    }

    pub fn with_period(mut self, period: f64) -> Self {
        self.period = Some(period);
        self
    }

    pub fn with_bound(mut self, bound: f64) -> Self {
        self.bound = bound;
        self
    }

    pub fn with_smoothness(mut self, label: impl Into<String>, exponent: Option<f64>) -> Self {
        self.smoothness_label = label.into();
        self.smoothness_exponent = exponent;
        self
    }

    pub fn with_kinks(mut self, kinks: Kinks) -> Self {
        self.kinks = kinks;
        self
    }

    pub fn with_closed_form(mut self, form: ClosedForm) -> Self {
        self.closed_form = Some(form);
        self
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.evaluator)(x)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn comparison_interval(&self) -> (f64, f64) {
        self.comparison_interval
    }

    pub fn is_periodic(&self) -> bool {
        self.period.is_some()
    }

    pub fn period(&self) -> Option<f64> {
        self.period
    }

    pub fn smoothness_label(&self) -> &str {
        &self.smoothness_label
    }

    /// The exponent α for `|sin x|^α`, if this is such a condition.
    pub fn smoothness_exponent(&self) -> Option<f64> {
        self.smoothness_exponent
    }

    /// `sup |f|`.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn kinks(&self) -> &Kinks {
        &self.kinks
    }

    pub fn closed_form(&self) -> Option<ClosedForm> {
        self.closed_form
    }
}

/// Exponents of the `|sin x|^α` family, ascending.
pub const ABS_SIN_POWERS: [(f64, &str); 8] = [
    (0.25, "1/4"),
    (0.5, "1/2"),
    (0.75, "3/4"),
    (1.0, "1"),
    (1.5, "3/2"),
    (2.5, "5/2"),
    (3.5, "7/2"),
    (4.5, "9/2"),
];

pub fn sine() -> ScalarFunction {
    ScalarFunction::new("sin", f64::sin)
        .with_interval(-PI, PI)
        .with_period(2.0 * PI)
        .with_smoothness("C-infinity", None)
        .with_closed_form(ClosedForm::Sine)
}

/// `|sin x|^alpha`; `label` is the exponent as written in the name.
pub fn abs_sin_power(alpha: f64, label: &str) -> ScalarFunction {
    let smoothness = if alpha <= 1.0 {
        format!("Holder-{label}")
    } else {
        let whole = alpha.floor();
        let frac = alpha - whole;
        if frac == 0.0 {
            format!("C{whole}")
        } else {
            format!("C{whole}+Holder-{frac}")
        }
    };
    ScalarFunction::new(format!("abs-sin-{label}"), move |x: f64| {
        let s = x.sin().abs();
        if s == 0.0 {
            0.0
        } else {
            s.powf(alpha)
        }
    })
    .with_interval(-PI, PI)
    .with_period(PI)
    .with_smoothness(smoothness, Some(alpha))
    .with_kinks(Kinks::Lattice {
        origin: 0.0,
        spacing: PI,
    })
}

pub fn exp_abs() -> ScalarFunction {
    ScalarFunction::new("exp-abs", |x: f64| (-x.abs()).exp())
        .with_interval(-10.0, 10.0)
        .with_smoothness("Holder-1", Some(1.0))
        .with_kinks(Kinks::Points(vec![0.0]))
        .with_closed_form(ClosedForm::ExpAbs)
}

/// The ten initial conditions of the experiment, in presentation order.
pub fn catalog() -> Vec<ScalarFunction> {
    let mut out = Vec::with_capacity(10);
    out.push(sine());
    out.extend(ABS_SIN_POWERS.iter().map(|&(a, l)| abs_sin_power(a, l)));
    out.push(exp_abs());
    out
}

pub fn catalog_entry(name: &str) -> Result<ScalarFunction> {
    catalog()
        .into_iter()
        .find(|f| f.name() == name)
        .ok_or_else(|| Error::UnknownCondition(name.to_string()))
}

/// The heat kernel `Φ(x, t)`.
pub fn heat_kernel(x: f64, t: f64) -> Result<f64> {
    check_time(t)?;
    Ok(kernel(x, t))
}

#[inline]
fn kernel(x: f64, t: f64) -> f64 {
    (-x * x / (4.0 * t)).exp() / (2.0 * (PI * t).sqrt())
}

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidTime(t))
    }
}

/// Analytic heat evolution of `e^{−|x|}`:
/// `(e^t/2)·[e^{−x} erfc((2t−x)/(2√t)) + e^{x} erfc((2t+x)/(2√t))]`.
pub fn closed_form_exp_abs(t: f64, x: f64) -> Result<f64> {
    check_time(t)?;
    Ok(exp_abs_solution(t, x))
}

fn exp_abs_solution(t: f64, x: f64) -> f64 {
    0.5 * (shifted_erfc_term(t, x) + shifted_erfc_term(t, -x))
}

/// `e^{t+x}·erfc((2t+x)/(2√t))` without overflow: for large arguments the
/// exponents combine to `erfcx(z)·e^{−x²/4t}`.
fn shifted_erfc_term(t: f64, x: f64) -> f64 {
    let z = (2.0 * t + x) / (2.0 * t.sqrt());
    if z < 5.0 {
        (t + x).exp() * libm::erfc(z)
    } else {
        erfcx(z) * (-x * x / (4.0 * t)).exp()
    }
}

/// Scaled complementary error function `e^{z²} erfc(z)` for `z ≥ 5`.
fn erfcx(z: f64) -> f64 {
    if z < 25.0 {
        (z * z).exp() * libm::erfc(z)
    } else {
        // asymptotic series; the first omitted term is below 1e-17 here
        let inv2 = 1.0 / (2.0 * z * z);
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..6 {
            term *= -((2 * k - 1) as f64) * inv2;
            sum += term;
        }
        sum / (z * PI.sqrt())
    }
}

/// How a [`ReferenceSolution`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionSource {
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone)]
pub struct ReferenceSolution {
    pub source: SolutionSource,
    pub values: Vec<f64>,
    pub t: f64,
}

/// Quadrature parameters for the convolution integral.
#[derive(Debug, Clone, Copy)]
pub struct ConvolutionSettings {
    /// Half-width of the integration window in units of √t.
    pub width: f64,
    pub adaptive: AdaptiveSettings,
}

impl Default for ConvolutionSettings {
    fn default() -> Self {
        Self {
            width: 16.0,
            adaptive: AdaptiveSettings::default(),
        }
    }
}

/// Reference solution on `grid`, using a closed form when `u0` has one.
pub fn exact_solution(u0: &ScalarFunction, t: f64, grid: &Grid) -> Result<ReferenceSolution> {
    check_time(t)?;
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    match u0.closed_form() {
        Some(form) => Ok(ReferenceSolution {
            source: SolutionSource::ClosedForm,
            values: grid.points().iter().map(|&x| form.evaluate(t, x)).collect(),
            t,
        }),
        None => quadrature_solution(u0, t, grid, &ConvolutionSettings::default()),
    }
}

/// Reference solution on `grid` by quadrature, ignoring any closed form.
pub fn quadrature_solution(
    u0: &ScalarFunction,
    t: f64,
    grid: &Grid,
    settings: &ConvolutionSettings,
) -> Result<ReferenceSolution> {
    check_time(t)?;
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let rule = GaussLegendre::new(settings.adaptive.nodes);
    let values = grid
        .points()
        .par_iter()
        .map(|&x| convolve_at(u0, t, x, &rule, settings))
        .collect::<Result<Vec<_>>>()?;
    Ok(ReferenceSolution {
        source: SolutionSource::Quadrature,
        values,
        t,
    })
}

/// `∫ Φ(s, t) u0(x − s) ds` over `|s| ≤ W√t` at a single point.
pub fn convolution_at(
    u0: &ScalarFunction,
    t: f64,
    x: f64,
    settings: &ConvolutionSettings,
) -> Result<f64> {
    check_time(t)?;
    let rule = GaussLegendre::new(settings.adaptive.nodes);
    convolve_at(u0, t, x, &rule, settings)
}

fn convolve_at(
    u0: &ScalarFunction,
    t: f64,
    x: f64,
    rule: &GaussLegendre,
    settings: &ConvolutionSettings,
) -> Result<f64> {
    let half = settings.width * t.sqrt();
    // kinks of u0 at y become kinks of the integrand at s = x − y
    let breaks: Vec<f64> = u0
        .kinks()
        .within(x - half, x + half)
        .iter()
        .map(|y| x - y)
        .collect();
    let integrand = |s: f64| kernel(s, t) * u0.eval(x - s);
    integrate_adaptive(&integrand, -half, half, &breaks, rule, &settings.adaptive).map_err(|e| {
        Error::Quadrature {
            x,
            residual: e.residual,
            tolerance: settings.adaptive.tolerance,
            panels: e.panels,
        }
    })
}
