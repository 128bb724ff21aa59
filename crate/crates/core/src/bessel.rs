//! Spherical functions of (R^n, SO(n)) and their lambda-derivatives.
//!
//! The spherical function with eigenvalue `lambda` is the radial profile
//!
//! ```text
//! J_lambda(r) = Gamma(n/2) * sum_k lambda^k / (k! Gamma(k + n/2)) * (r/2)^(2k)
//! ```
//!
//! the regular even solution of `phi'' + (n-1)/r phi' = lambda phi` with
//! `phi(0) = 1`. The m-th derivative in `lambda` is summed term-wise and serves
//! as the degree-m spherical monomial generator.
//!
//! Terms are produced by their exact ratio
//! `t_{k+1} / t_k = lambda (r/2)^2 / ((k - m + 1)(k + n/2))`, so Gamma never
//! appears per term. Evaluation runs in `f64` first; when the sum of term
//! magnitudes dwarfs the result (oscillatory regime, `lambda` far from the
//! positive axis) it is redone in double-double.

use std::ops::Add;

use num_complex::Complex64;

use crate::dd::{ComplexDd, Dd};
use crate::error::{Error, Result};

pub const DEFAULT_SERIES_TOL: f64 = 1e-16;
pub const DEFAULT_MAX_TERMS: usize = 200;

/// Above this ratio of term mass to `max(|value|, 1)` the `f64` sum is
/// discarded and the series is re-summed in double-double.
const F64_MASS_RATIO: f64 = 16.0;
/// Largest tolerated absolute rounding estimate of the double-double sum,
/// relative to `max(|value|, 1)`.
const DD_ABS_TOL: f64 = 1e-9;
/// Truncation tolerance used when derivatives are taken by finite differences.
const FD_SERIES_TOL: f64 = 1e-32;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphericalFunction {
    lambda: Complex64,
    dim: usize,
    series_tol: f64,
    max_terms: usize,
}

impl SphericalFunction {
    pub fn new(lambda: Complex64, dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::UnsupportedDimension(dim));
        }
        if !(lambda.re.is_finite() && lambda.im.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "eigenvalue must be finite, got {lambda}"
            )));
        }
        Ok(SphericalFunction {
            lambda,
            dim,
            series_tol: DEFAULT_SERIES_TOL,
            max_terms: DEFAULT_MAX_TERMS,
        })
    }

    pub fn with_series(mut self, series_tol: f64, max_terms: usize) -> Result<Self> {
        if !(series_tol > 0.0 && series_tol.is_finite()) || max_terms == 0 {
            return Err(Error::InvalidArgument(format!(
                "series tolerance and term cap must be positive (got {series_tol}, {max_terms})"
            )));
        }
        self.series_tol = series_tol;
        self.max_terms = max_terms;
        Ok(self)
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn series_tol(&self) -> f64 {
        self.series_tol
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }

    /// Same dimension and series settings, different eigenvalue.
    pub fn with_lambda(&self, lambda: Complex64) -> Result<Self> {
        SphericalFunction::new(lambda, self.dim)?.with_series(self.series_tol, self.max_terms)
    }

    /// `J_lambda(|r|)`.
    pub fn eval(&self, r: f64) -> Result<Complex64> {
        self.eval_derivative(0, r)
    }

    /// `d^m/d lambda^m J_lambda(|r|)`.
    pub fn eval_derivative(&self, m: usize, r: f64) -> Result<Complex64> {
        if !r.is_finite() {
            return Err(Error::InvalidArgument(format!("radius must be finite, got {r}")));
        }
        let half_r = 0.5 * r.abs();
        let q = half_r * half_r;
        let kernel = self.kernel(m, self.series_tol);
        let (value, mass) = kernel.sum::<Complex64>(q, Dd::square(half_r))?;
        if mass <= F64_MASS_RATIO * value.norm().max(1.0) {
            return Ok(value);
        }
        let (value, mass) = kernel.sum::<ComplexDd>(q, Dd::square(half_r))?;
        checked_dd(value, mass).map(ComplexDd::to_complex)
    }

    /// Residual of the radial Laplace eigen-equation at `r`, using fourth-order
    /// central differences with step `h`:
    /// `|D2 phi + (n-1)/r D1 phi - lambda phi|`.
    ///
    /// Profile values and stencil arithmetic are carried in double-double so the
    /// result reflects the discretization error rather than cancellation.
    pub fn laplacian_residual(&self, r: f64, h: f64) -> Result<f64> {
        if !(h > 0.0 && r.is_finite() && r > 2.0 * h) {
            return Err(Error::InvalidArgument(format!(
                "laplacian residual needs r > 2h > 0 (r = {r}, h = {h})"
            )));
        }
        let kernel = self.kernel(0, self.series_tol.min(FD_SERIES_TOL));
        let mut f = [ComplexDd::ZERO; 5];
        for (slot, j) in f.iter_mut().zip(-2i32..=2) {
            // r + j h is carried exactly.
            let pos = Dd::from_f64(r) + Dd::from_f64(j as f64 * h);
            let half = pos.mul_f64(0.5);
            let q = half * half;
            let (value, mass) = kernel.sum::<ComplexDd>(q.to_f64(), q)?;
            *slot = checked_dd(value, mass)?;
        }
        let [fm2, fm1, f0, fp1, fp2] = f;
        let d1 = (fm2 - fp2 + (fp1 - fm1).mul_f64(8.0))
            .div_f64(12.0)
            .div_f64(h);
        let d2 = (fp1 + fm1).mul_f64(16.0) - (fp2 + fm2) - f0.mul_f64(30.0);
        let d2 = d2.div_f64(12.0).div_f64(h).div_f64(h);
        let lap = d2 + d1.mul_f64((self.dim - 1) as f64).div_f64(r);
        Ok((lap - ComplexDd::from_complex(self.lambda) * f0).norm())
    }

    fn kernel(&self, degree: usize, tol: f64) -> SeriesKernel {
        SeriesKernel {
            lambda: self.lambda,
            half_n: 0.5 * self.dim as f64,
            degree,
            tol,
            max_terms: self.max_terms,
        }
    }
}

fn checked_dd(value: ComplexDd, mass: f64) -> Result<ComplexDd> {
    let v = value.norm();
    if mass * Dd::EPSILON > DD_ABS_TOL * v.max(1.0) {
        return Err(Error::PrecisionLoss {
            term_mass: mass,
            value: v,
        });
    }
    Ok(value)
}

/// A spherical monomial generator: the `degree`-th lambda-derivative of `base`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonomialGenerator {
    base: SphericalFunction,
    degree: usize,
}

impl MonomialGenerator {
    pub fn new(base: SphericalFunction, degree: usize) -> Self {
        MonomialGenerator { base, degree }
    }

    pub fn base(&self) -> &SphericalFunction {
        &self.base
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn eval(&self, r: f64) -> Result<Complex64> {
        self.base.eval_derivative(self.degree, r)
    }
}

pub fn eval_spherical(s: &SphericalFunction, r: f64) -> Result<Complex64> {
    s.eval(r)
}

pub fn eval_monomial(g: &MonomialGenerator, r: f64) -> Result<Complex64> {
    g.eval(r)
}

pub fn laplacian_residual(s: &SphericalFunction, r: f64, h: f64) -> Result<f64> {
    s.laplacian_residual(r, h)
}

/// Scalar type the series is accumulated in.
trait SeriesNum: Copy + Add<Output = Self> {
    /// Unit roundoff.
    const EPS: f64;
    fn one() -> Self;
    /// Multiply by `(r/2)^2`, given in `f64` and double-double.
    fn scale_q(self, q: f64, q_dd: Dd) -> Self;
    fn mul_lambda(self, lambda: Complex64) -> Self;
    fn div_exact(self, d: f64) -> Self;
    fn modulus(self) -> f64;
}

impl SeriesNum for Complex64 {
    const EPS: f64 = f64::EPSILON * 0.5;
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn scale_q(self, q: f64, _: Dd) -> Self {
        self * q
    }
    fn mul_lambda(self, lambda: Complex64) -> Self {
        self * lambda
    }
    fn div_exact(self, d: f64) -> Self {
        self / d
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
}

impl SeriesNum for ComplexDd {
    const EPS: f64 = Dd::EPSILON;
    fn one() -> Self {
        ComplexDd::from_complex(Complex64::new(1.0, 0.0))
    }
    fn scale_q(self, _: f64, q: Dd) -> Self {
        self.scale(q)
    }
    fn mul_lambda(self, lambda: Complex64) -> Self {
        self * ComplexDd::from_complex(lambda)
    }
    fn div_exact(self, d: f64) -> Self {
        self.div_f64(d)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
}

struct SeriesKernel {
    lambda: Complex64,
    half_n: f64,
    degree: usize,
    tol: f64,
    max_terms: usize,
}

impl SeriesKernel {
    /// Returns the truncated sum and the accumulated term magnitudes.
    fn sum<T: SeriesNum>(&self, q: f64, q_dd: Dd) -> Result<(T, f64)> {
        let m = self.degree;
        // First surviving term: (r/2)^(2m) / prod_{j<m} (j + n/2).
        let mut term = T::one();
        for j in 0..m {
            term = term.scale_q(q, q_dd).div_exact(j as f64 + self.half_n);
        }
        let mut sum = term;
        let mut mass = term.modulus();
        let ratio_scale = self.lambda.norm() * q;
        let mut used = 1usize;
        loop {
            let i = used - 1;
            let k = m + i;
            let denom = (i + 1) as f64 * (k as f64 + self.half_n);
            let next = term.mul_lambda(self.lambda).scale_q(q, q_dd).div_exact(denom);
            let next_abs = next.modulus();
            if !next_abs.is_finite() {
                return Err(Error::SeriesBudgetExceeded {
                    max_terms: self.max_terms,
                    last_term: next_abs,
                });
            }
            // Every later term ratio is bounded by this one.
            let ratio_bound = ratio_scale / ((i + 2) as f64 * ((k + 1) as f64 + self.half_n));
            let scale = sum.modulus().max(T::EPS * mass);
            if ratio_bound < 0.5 && 2.0 * next_abs <= self.tol * scale {
                return Ok((sum, mass));
            }
            if used >= self.max_terms {
                return Err(Error::SeriesBudgetExceeded {
                    max_terms: self.max_terms,
                    last_term: next_abs,
                });
            }
            sum = sum + next;
            mass += next_abs;
            term = next;
            used += 1;
        }
    }
}
