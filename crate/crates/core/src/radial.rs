//! K-radial functions on R^n, represented by their profile `f0(r) = f(r, 0, ..., 0)`.
//!
//! A [`RadialFunction`] is an immutable, cheaply clonable handle. Profiles are
//! built-in closed forms, sampled tables, or lazy operator chains over other
//! radial functions (translations, spherical differences, measure actions).
//! Only `|r|` is ever consulted, so every profile is even.

use std::collections::HashMap;
use std::fmt;
use std::io::Read;
use std::path::Path;
use std::sync::{Arc, RwLock};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bessel::{MonomialGenerator, SphericalFunction};
use crate::error::{Error, Result};
use crate::measure::RadialMeasureExpr;
use crate::ops::SphericalDifference;
use crate::quadrature::SphereAverageRule;

pub const DEFAULT_DEPTH_CAP: usize = 3;

#[derive(Clone, Debug, PartialEq)]
pub enum Builtin {
    Constant(Complex64),
    /// `exp(-(r / sigma)^2)`
    Gaussian { sigma: f64 },
    /// `exp(1 - 1 / (1 - (r/a)^2))` on `r < a`, zero outside.
    Bump { radius: f64 },
    /// `sum_k c_k r^k`
    Polynomial(Vec<Complex64>),
    Spherical(SphericalFunction),
    Monomial(MonomialGenerator),
}

impl Builtin {
    fn eval(&self, r: f64) -> Result<Complex64> {
        let one = Complex64::new(1.0, 0.0);
        Ok(match self {
            Builtin::Constant(c) => *c,
            Builtin::Gaussian { sigma } => {
                let u = r / sigma;
                one * (-u * u).exp()
            }
            Builtin::Bump { radius } => {
                let u = r / radius;
                if u < 1.0 {
                    one * (1.0 - 1.0 / (1.0 - u * u)).exp()
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            Builtin::Polynomial(coeffs) => coeffs
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * r + c),
            Builtin::Spherical(s) => s.eval(r)?,
            Builtin::Monomial(g) => g.eval(r)?,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    #[default]
    Linear,
    /// Natural cubic spline, applied to real and imaginary parts separately.
    Cubic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampledProfile {
    radii: Vec<f64>,
    values: Vec<Complex64>,
    interpolation: Interpolation,
    /// Second derivatives at the knots (cubic only).
    second: Vec<Complex64>,
}

impl SampledProfile {
    pub fn new(radii: Vec<f64>, values: Vec<Complex64>, interpolation: Interpolation) -> Result<Self> {
        if radii.len() != values.len() {
            return Err(Error::InvalidArgument(format!(
                "{} radii but {} values",
                radii.len(),
                values.len()
            )));
        }
        if radii.len() < 2 {
            return Err(Error::InvalidArgument("a sampled profile needs at least two points".into()));
        }
        if radii.iter().any(|r| !r.is_finite() || *r < 0.0) {
            return Err(Error::InvalidArgument("sample radii must be finite and nonnegative".into()));
        }
        if radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("sample radii must be strictly increasing".into()));
        }
        let second = match interpolation {
            Interpolation::Linear => Vec::new(),
            Interpolation::Cubic => natural_spline_second_derivatives(&radii, &values),
        };
        Ok(SampledProfile {
            radii,
            values,
            interpolation,
            second,
        })
    }

    /// Reads `radius, re[, im]` rows. A non-numeric first row is taken as a header.
    pub fn from_csv_reader<R: Read>(reader: R, interpolation: Interpolation) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(reader);
        let mut radii = Vec::new();
        let mut values = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record?;
            if record.len() < 2 || record.len() > 3 {
                return Err(Error::InvalidArgument(format!(
                    "csv row {}: expected 2 or 3 columns, found {}",
                    line + 1,
                    record.len()
                )));
            }
            let parsed: std::result::Result<Vec<f64>, _> =
                record.iter().map(str::parse::<f64>).collect();
            match parsed {
                Ok(cols) => {
                    radii.push(cols[0]);
                    values.push(Complex64::new(cols[1], cols.get(2).copied().unwrap_or(0.0)));
                }
                Err(_) if line == 0 => continue,
                Err(e) => {
                    return Err(Error::InvalidArgument(format!("csv row {}: {e}", line + 1)));
                }
            }
        }
        SampledProfile::new(radii, values, interpolation)
    }

    pub fn from_csv_path(path: &Path, interpolation: Interpolation) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        SampledProfile::from_csv_reader(file, interpolation)
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    fn eval(&self, r: f64) -> Result<Complex64> {
        let (lo, hi) = (self.radii[0], *self.radii.last().unwrap());
        if r < lo || r > hi {
            return Err(Error::OutOfSampledRange { radius: r, lo, hi });
        }
        // Index of the interval [x_i, x_{i+1}] containing r.
        let i = match self.radii.partition_point(|&x| x <= r) {
            0 => 0,
            p => (p - 1).min(self.radii.len() - 2),
        };
        let (x0, x1) = (self.radii[i], self.radii[i + 1]);
        let h = x1 - x0;
        let a = (x1 - r) / h;
        let b = (r - x0) / h;
        let linear = self.values[i] * a + self.values[i + 1] * b;
        Ok(match self.interpolation {
            Interpolation::Linear => linear,
            Interpolation::Cubic => {
                let (m0, m1) = (self.second[i], self.second[i + 1]);
                linear + (m0 * (a * a * a - a) + m1 * (b * b * b - b)) * (h * h / 6.0)
            }
        })
    }
}

fn natural_spline_second_derivatives(x: &[f64], y: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    let zero = Complex64::new(0.0, 0.0);
    let mut m = vec![zero; n];
    if n < 3 {
        return m;
    }
    // Thomas algorithm on the interior equations.
    let mut c_prime = vec![0.0; n];
    let mut d_prime = vec![zero; n];
    for i in 1..n - 1 {
        let h0 = x[i] - x[i - 1];
        let h1 = x[i + 1] - x[i];
        let a = h0 / 6.0;
        let b = (h0 + h1) / 3.0;
        let c = h1 / 6.0;
        let d = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
        let denom = b - a * c_prime[i - 1];
        c_prime[i] = c / denom;
        d_prime[i] = (d - d_prime[i - 1] * a) / denom;
    }
    for i in (1..n - 1).rev() {
        m[i] = d_prime[i] - m[i + 1] * c_prime[i];
    }
    m
}

/// Lazy operators producing new radial functions.
#[derive(Clone, Debug)]
pub enum Operator {
    /// `rho -> (tau_y f)(x)` with `|x| = rho`, `|y| = radius`.
    Translate {
        inner: RadialFunction,
        radius: f64,
        rule: Arc<SphereAverageRule>,
    },
    /// Modified spherical difference `tau_y f - s(y) f`.
    Difference {
        inner: RadialFunction,
        difference: SphericalDifference,
        /// `s(|y|)`, fixed at construction.
        scalar: Complex64,
        rule: Arc<SphereAverageRule>,
    },
    /// Action `mu * f` of a radial measure expression.
    Act {
        inner: RadialFunction,
        measure: RadialMeasureExpr,
        rule: Arc<SphereAverageRule>,
    },
    Combination(Vec<(Complex64, RadialFunction)>),
}

#[derive(Debug)]
enum Kind {
    Builtin(Builtin),
    Sampled(SampledProfile),
    Composed(Operator),
}

struct Node {
    dim: usize,
    depth: usize,
    kind: Kind,
    // Grid samples of composed functions, keyed by the radius bits.
    memo: RwLock<HashMap<u64, Complex64>>,
}

#[derive(Clone)]
pub struct RadialFunction {
    node: Arc<Node>,
}

impl fmt::Debug for RadialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialFunction")
            .field("dim", &self.node.dim)
            .field("depth", &self.node.depth)
            .field("kind", &self.node.kind)
            .finish()
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::UnsupportedDimension(dim));
    }
    Ok(())
}

impl RadialFunction {
    fn from_kind(dim: usize, depth: usize, kind: Kind) -> Self {
        RadialFunction {
            node: Arc::new(Node {
                dim,
                depth,
                kind,
                memo: RwLock::new(HashMap::new()),
            }),
        }
    }

    pub fn builtin(dim: usize, builtin: Builtin) -> Result<Self> {
        check_dim(dim)?;
        let dim_of = |s: &SphericalFunction| s.dim();
        match &builtin {
            Builtin::Gaussian { sigma } if !(*sigma > 0.0 && sigma.is_finite()) => {
                return Err(Error::InvalidArgument(format!("gaussian width must be positive, got {sigma}")));
            }
            Builtin::Bump { radius } if !(*radius > 0.0 && radius.is_finite()) => {
                return Err(Error::InvalidArgument(format!("bump radius must be positive, got {radius}")));
            }
            Builtin::Spherical(s) if dim_of(s) != dim => {
                return Err(Error::InvalidArgument("spherical function dimension mismatch".into()));
            }
            Builtin::Monomial(g) if dim_of(g.base()) != dim => {
                return Err(Error::InvalidArgument("monomial dimension mismatch".into()));
            }
            _ => {}
        }
        Ok(RadialFunction::from_kind(dim, 0, Kind::Builtin(builtin)))
    }

    pub fn gaussian(dim: usize, sigma: f64) -> Result<Self> {
        RadialFunction::builtin(dim, Builtin::Gaussian { sigma })
    }

    pub fn constant(dim: usize, value: Complex64) -> Result<Self> {
        RadialFunction::builtin(dim, Builtin::Constant(value))
    }

    pub fn spherical(s: SphericalFunction) -> Self {
        RadialFunction::from_kind(s.dim(), 0, Kind::Builtin(Builtin::Spherical(s)))
    }

    pub fn monomial(g: MonomialGenerator) -> Self {
        RadialFunction::from_kind(g.base().dim(), 0, Kind::Builtin(Builtin::Monomial(g)))
    }

    pub fn sampled(dim: usize, profile: SampledProfile) -> Result<Self> {
        check_dim(dim)?;
        Ok(RadialFunction::from_kind(dim, 0, Kind::Sampled(profile)))
    }

    /// Builds a composed function, refusing chains deeper than `depth_cap`.
    pub fn composed(op: Operator, depth_cap: usize) -> Result<Self> {
        let (dim, depth) = match &op {
            Operator::Translate { inner, rule, .. } | Operator::Difference { inner, rule, .. } => {
                check_rule(inner, rule)?;
                (inner.dim(), inner.depth() + 1)
            }
            Operator::Act {
                inner,
                measure,
                rule,
            } => {
                check_rule(inner, rule)?;
                (inner.dim(), inner.depth() + measure.max_word_len())
            }
            Operator::Combination(parts) => {
                let first = parts.first().ok_or_else(|| {
                    Error::InvalidArgument("a combination needs at least one term".into())
                })?;
                let dim = first.1.dim();
                if parts.iter().any(|(_, f)| f.dim() != dim) {
                    return Err(Error::InvalidArgument("combination mixes dimensions".into()));
                }
                (dim, parts.iter().map(|(_, f)| f.depth()).max().unwrap_or(0))
            }
        };
        if depth > depth_cap {
            return Err(Error::DepthCapExceeded {
                depth,
                cap: depth_cap,
            });
        }
        Ok(RadialFunction::from_kind(dim, depth, Kind::Composed(op)))
    }

    pub fn dim(&self) -> usize {
        self.node.dim
    }

    /// Number of nested sphere averages behind one evaluation.
    pub fn depth(&self) -> usize {
        self.node.depth
    }

    pub fn is_composed(&self) -> bool {
        matches!(self.node.kind, Kind::Composed(_))
    }

    /// Profile value `f0(|r|)`.
    pub fn eval(&self, r: f64) -> Result<Complex64> {
        let r = r.abs();
        match &self.node.kind {
            Kind::Builtin(b) => b.eval(r),
            Kind::Sampled(p) => p.eval(r),
            Kind::Composed(op) => eval_operator(op, r),
        }
    }

    /// Profile values on `grid`. Composed functions are evaluated in parallel
    /// and memoized per grid point.
    pub fn sample(&self, grid: &[f64]) -> Result<Vec<Complex64>> {
        if !self.is_composed() {
            return grid.iter().map(|&r| self.eval(r)).collect();
        }
        let memo = &self.node.memo;
        grid.par_iter()
            .map(|&r| {
                let key = r.abs().to_bits();
                if let Some(v) = memo.read().unwrap().get(&key) {
                    return Ok(*v);
                }
                let v = self.eval(r)?;
                memo.write().unwrap().insert(key, v);
                Ok(v)
            })
            .collect()
    }

    /// `max_i |f0(grid_i)|`
    pub fn sup_norm(&self, grid: &[f64]) -> Result<f64> {
        Ok(self
            .sample(grid)?
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max))
    }
}

fn check_rule(inner: &RadialFunction, rule: &SphereAverageRule) -> Result<()> {
    if inner.dim() != rule.dim() {
        return Err(Error::InvalidArgument(format!(
            "rule built for dimension {} applied to a function on dimension {}",
            rule.dim(),
            inner.dim()
        )));
    }
    Ok(())
}

fn eval_operator(op: &Operator, r: f64) -> Result<Complex64> {
    match op {
        Operator::Translate {
            inner,
            radius,
            rule,
        } => rule.sphere_average(|t| inner.eval(t), r, *radius),
        Operator::Difference {
            inner,
            difference,
            scalar,
            rule,
        } => {
            let translated = rule.sphere_average(|t| inner.eval(t), r, difference.rho())?;
            Ok(translated - scalar * inner.eval(r)?)
        }
        Operator::Act {
            inner,
            measure,
            rule,
        } => {
            let mut acc = Complex64::new(0.0, 0.0);
            for term in measure.terms() {
                acc += term.w * iterated_average(inner, &term.word, r, rule)?;
            }
            Ok(acc)
        }
        Operator::Combination(parts) => {
            let mut acc = Complex64::new(0.0, 0.0);
            for (w, f) in parts {
                acc += w * f.eval(r)?;
            }
            Ok(acc)
        }
    }
}

/// Translates `f` successively by the radii of `word` and evaluates at `rho`.
pub(crate) fn iterated_average(
    f: &RadialFunction,
    word: &[f64],
    rho: f64,
    rule: &SphereAverageRule,
) -> Result<Complex64> {
    match word.split_first() {
        None => f.eval(rho),
        Some((&first, rest)) => {
            rule.sphere_average(|t| iterated_average(f, rest, t, rule), rho, first)
        }
    }
}
