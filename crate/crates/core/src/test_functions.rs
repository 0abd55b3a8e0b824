//! Box-bounded scalar test functions and registries of their known optima.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};

/// Axis-aligned box of feasible points.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDomain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::InvalidDomain(format!(
                "need matching non-empty bounds, got {} lower / {} upper",
                lower.len(),
                upper.len()
            )));
        }
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo < hi) {
                return Err(Error::InvalidDomain(format!(
                    "lower[{i}] = {lo} must be < upper[{i}] = {hi}"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(xi, (lo, hi))| *xi >= *lo && *xi <= *hi)
    }

    pub fn volume(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| hi - lo)
            .product()
    }

    /// Clamps `x` coordinate-wise into the box.
    pub fn clamp(&self, x: &mut [f64]) {
        for (xi, (lo, hi)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *xi = xi.clamp(*lo, *hi);
        }
    }

    /// Draws a point uniformly inside the box.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| rng.random_range(*lo..*hi))
            .collect()
    }
}

/// Coefficients of the Branin-Hoo function
/// `a(x2 - b*x1^2 + c*x1 - r)^2 + s(1 - t)cos(x1) + s`.
#[derive(Debug, Clone, PartialEq)]
pub struct BraninParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub r: f64,
    pub s: f64,
    pub t: f64,
}

impl Default for BraninParams {
    fn default() -> Self {
        Self {
            a: 1.0,
            b: 5.1 / (4.0 * PI * PI),
            c: 5.0 / PI,
            r: 6.0,
            s: 10.0,
            t: 1.0 / (8.0 * PI),
        }
    }
}

/// One known optimum of a test function, labelled 1-based.
#[derive(Debug, Clone, PartialEq)]
pub struct KnownOptimum {
    pub location: Vec<f64>,
    pub value: f64,
    pub label: usize,
}

/// Shared evaluator closure behind an [`ObjectiveFunction`].
pub(crate) type Evaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A bounded objective with an evaluation counter.
///
/// The evaluator itself is pure; the counter is the only mutable state and
/// each optimization run owns its own instance (see [`fresh`](Self::fresh)).
pub struct ObjectiveFunction {
    name: String,
    domain: BoxDomain,
    evaluator: Evaluator,
    eval_count: u64,
}

impl ObjectiveFunction {
    pub fn new<F>(name: impl Into<String>, domain: BoxDomain, evaluator: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            domain,
            evaluator: Arc::new(evaluator),
            eval_count: 0,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    /// Evaluates the objective, incrementing the counter.
    pub fn evaluate(&mut self, x: &[f64]) -> f64 {
        self.eval_count += 1;
        (self.evaluator)(x)
    }

    pub fn eval_count(&self) -> u64 {
        self.eval_count
    }

    pub fn reset_count(&mut self) {
        self.eval_count = 0;
    }

    /// A copy sharing the same evaluator but with a zeroed counter.
    pub fn fresh(&self) -> Self {
        Self {
            name: self.name.clone(),
            domain: self.domain.clone(),
            evaluator: Arc::clone(&self.evaluator),
            eval_count: 0,
        }
    }

    pub(crate) fn evaluator(&self) -> Evaluator {
        Arc::clone(&self.evaluator)
    }
}

impl std::fmt::Debug for ObjectiveFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ObjectiveFunction")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("eval_count", &self.eval_count)
            .finish()
    }
}

/// Branin-Hoo value at `x` with the given coefficients.
pub fn branin_hoo(x: [f64; 2], params: &BraninParams) -> f64 {
    let [x1, x2] = x;
    let inner = x2 - params.b * x1 * x1 + params.c * x1 - params.r;
    params.a * inner * inner + params.s * (1.0 - params.t) * x1.cos() + params.s
}

/// The Branin-Hoo objective on `[-5, 10] x [0, 15]` together with its three
/// global optima.
///
/// Optimum locations are stored at the conventional printed precision and
/// each registered `value` is the function evaluated at the stored location,
/// so value and stationarity checks are self-consistent.
pub fn branin_registry() -> (ObjectiveFunction, Vec<KnownOptimum>) {
    let params = BraninParams::default();
    let domain = BoxDomain::new(vec![-5.0, 0.0], vec![10.0, 15.0]).expect("static bounds");
    let objective = ObjectiveFunction::new("branin", domain, move |x: &[f64]| {
        branin_hoo([x[0], x[1]], &params)
    });

    let params = BraninParams::default();
    let locations = [[-PI, 12.275], [PI, 2.275], [9.42478, 2.475]];
    let optima = locations
        .iter()
        .enumerate()
        .map(|(i, loc)| KnownOptimum {
            location: loc.to_vec(),
            value: branin_hoo(*loc, &params),
            label: i + 1,
        })
        .collect();

    (objective, optima)
}

/// Names of the test functions the registry ships.
pub fn registry_names() -> &'static [&'static str] {
    &["branin"]
}

/// Looks up a registered test function by name.
pub fn registry_by_name(name: &str) -> Option<(ObjectiveFunction, Vec<KnownOptimum>)> {
    match name {
        "branin" => Some(branin_registry()),
        _ => None,
    }
}

/// Euclidean distance between two points of equal dimension.
pub fn euclidean_distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(ai, bi)| (ai - bi) * (ai - bi))
        .sum::<f64>()
        .sqrt()
}
