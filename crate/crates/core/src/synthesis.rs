//! Least-squares synthesis of radial functions on a ball from spherical
//! monomial dictionaries (Fourier–Bessel modes and their lambda-derivatives).

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::bessel::{MonomialGenerator, SphericalFunction};
use crate::error::{Error, Result};
use crate::radial::RadialFunction;

/// Collocation points per dictionary column when unspecified.
pub const DEFAULT_COLLOCATION_FACTOR: usize = 8;
/// Dense evaluation grid size relative to the collocation count.
pub const DENSE_FACTOR: usize = 4;
/// Ridge used by the automatic fallback, relative to the largest singular value.
pub const FALLBACK_RIDGE: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct SynthesisProblem {
    pub dim: usize,
    pub radius: f64,
    pub target: RadialFunction,
    pub spectrum: Vec<Complex64>,
    pub max_degree: usize,
    /// Number of collocation radii; `None` means 8x the dictionary size.
    pub collocation: Option<usize>,
    pub ridge: f64,
    /// Retry a rank-deficient unregularized solve with a small ridge instead of failing.
    pub auto_ridge: bool,
}

impl SynthesisProblem {
    pub fn new(dim: usize, radius: f64, target: RadialFunction, spectrum: Vec<Complex64>) -> Self {
        SynthesisProblem {
            dim,
            radius,
            target,
            spectrum,
            max_degree: 0,
            collocation: None,
            ridge: 0.0,
            auto_ridge: false,
        }
    }

    pub fn dictionary_size(&self) -> usize {
        self.spectrum.len() * (self.max_degree + 1)
    }

    pub fn collocation_count(&self) -> usize {
        self.collocation
            .unwrap_or(DEFAULT_COLLOCATION_FACTOR * self.dictionary_size())
    }

    fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::UnsupportedDimension(self.dim));
        }
        if self.target.dim() != self.dim {
            return Err(Error::InvalidArgument(format!(
                "target lives in dimension {}, problem in {}",
                self.target.dim(),
                self.dim
            )));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::InvalidArgument(format!("ball radius must be positive, got {}", self.radius)));
        }
        if self.spectrum.is_empty() {
            return Err(Error::InvalidArgument("spectrum is empty".into()));
        }
        if !(self.ridge >= 0.0 && self.ridge.is_finite()) {
            return Err(Error::InvalidArgument(format!("ridge must be nonnegative, got {}", self.ridge)));
        }
        let n = self.collocation_count();
        if n < self.dictionary_size() || n < 2 {
            return Err(Error::InvalidArgument(format!(
                "{n} collocation points cannot determine {} coefficients",
                self.dictionary_size()
            )));
        }
        Ok(())
    }
}

/// Positive zeros of the dimension-`dim` spherical profile `J_{-1}`, ascending.
pub fn profile_zeros(dim: usize, count: usize) -> Result<Vec<f64>> {
    let s = SphericalFunction::new(Complex64::new(-1.0, 0.0), dim)?;
    let f = |t: f64| s.eval(t).map(|v| v.re);
    let step = 0.25;
    let mut zeros = Vec::with_capacity(count);
    let mut a = step;
    let mut fa = f(a)?;
    while zeros.len() < count {
        let b = a + step;
        let fb = f(b)?;
        if fa == 0.0 {
            zeros.push(a);
        } else if fa * fb < 0.0 {
            zeros.push(bisect(&f, a, b, fa)?);
        }
        a = b;
        fa = fb;
    }
    Ok(zeros)
}

fn bisect<F: Fn(f64) -> Result<f64>>(f: &F, mut lo: f64, mut hi: f64, mut f_lo: f64) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Fourier–Bessel eigenvalues `-(z_j / R)^2` for the first `modes` profile zeros.
pub fn fourier_bessel_spectrum(dim: usize, radius: f64, modes: usize) -> Result<Vec<Complex64>> {
    Ok(profile_zeros(dim, modes)?
        .into_iter()
        .map(|z| Complex64::new(-(z / radius).powi(2), 0.0))
        .collect())
}

/// Default automatic spectrum: the constant mode `lambda = 0` followed by
/// `modes` Fourier–Bessel modes. The Fourier–Bessel columns all vanish at the
/// boundary, so without the constant mode a target that is nonzero at `R` has
/// an error floor there.
pub fn auto_spectrum(dim: usize, radius: f64, modes: usize) -> Result<Vec<Complex64>> {
    let mut spectrum = vec![Complex64::new(0.0, 0.0)];
    spectrum.extend(fourier_bessel_spectrum(dim, radius, modes)?);
    Ok(spectrum)
}

/// Chebyshev–Lobatto radii on [0, R], ascending, both endpoints included.
pub fn chebyshev_radii(radius: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![0.5 * radius];
    }
    (0..count)
        .map(|i| 0.5 * radius * (1.0 - (PI * i as f64 / (count - 1) as f64).cos()))
        .collect()
}

/// Equispaced radii on [0, R], both endpoints included.
pub fn dense_radii(radius: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| radius * i as f64 / (count - 1) as f64)
        .collect()
}

#[derive(Clone, Debug)]
pub struct Dictionary {
    pub generators: Vec<MonomialGenerator>,
    pub radii: Vec<f64>,
    /// Collocation matrix with unit max-norm columns.
    pub matrix: DMatrix<Complex64>,
    /// Multipliers applied to each raw column (`1 / max |column|`).
    pub scales: Vec<f64>,
}

impl Dictionary {
    /// `sum_j c_j scale_j g_j(r)`
    pub fn eval(&self, coefficients: &[Complex64], r: f64) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for ((g, &s), &c) in self.generators.iter().zip(&self.scales).zip(coefficients) {
            acc += c * s * g.eval(r)?;
        }
        Ok(acc)
    }
}

pub fn build_dictionary(p: &SynthesisProblem) -> Result<Dictionary> {
    p.validate()?;
    let mut generators = Vec::with_capacity(p.dictionary_size());
    for &lambda in &p.spectrum {
        let s = SphericalFunction::new(lambda, p.dim)?;
        for m in 0..=p.max_degree {
            generators.push(MonomialGenerator::new(s, m));
        }
    }
    let radii = chebyshev_radii(p.radius, p.collocation_count());
    let columns: Vec<Vec<Complex64>> = generators
        .par_iter()
        .map(|g| radii.iter().map(|&r| g.eval(r)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let mut scales = Vec::with_capacity(columns.len());
    let mut matrix = DMatrix::zeros(radii.len(), columns.len());
    for (j, col) in columns.iter().enumerate() {
        let max = col.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let scale = if max > 0.0 { 1.0 / max } else { 1.0 };
        scales.push(scale);
        for (i, v) in col.iter().enumerate() {
            matrix[(i, j)] = v * scale;
        }
    }
    Ok(Dictionary {
        generators,
        radii,
        matrix,
        scales,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FitResult {
    /// Labels `(lambda, degree)` of the dictionary columns.
    pub columns: Vec<(Complex64, usize)>,
    /// Coefficients of the unit max-norm columns.
    pub coefficients: Vec<Complex64>,
    pub scales: Vec<f64>,
    pub sup_error: f64,
    /// Root-mean-square error on the dense grid.
    pub l2_error: f64,
    /// Euclidean residual on the collocation set (ridge rows excluded).
    pub collocation_residual: f64,
    pub condition_estimate: f64,
    pub ridge_used: f64,
    pub collocation_points: usize,
    pub dense_points: usize,
    #[serde(skip)]
    pub table: Vec<ResidualRow>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResidualRow {
    pub radius: f64,
    pub target: Complex64,
    pub fit: Complex64,
    pub residual: f64,
}

impl FitResult {
    /// Coefficients of the raw (unscaled) monomial generators.
    pub fn raw_coefficients(&self) -> Vec<Complex64> {
        self.coefficients
            .iter()
            .zip(&self.scales)
            .map(|(c, s)| c * s)
            .collect()
    }

    pub fn write_residual_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["radius", "target_re", "target_im", "fit_re", "fit_im", "residual"])?;
        for row in &self.table {
            w.write_record([
                row.radius.to_string(),
                row.target.re.to_string(),
                row.target.im.to_string(),
                row.fit.re.to_string(),
                row.fit.im.to_string(),
                row.residual.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }
}

/// Solves `min |A c - b|^2 + ridge |c|^2` by Householder QR on the
/// (ridge-augmented) collocation system and reports errors on a dense grid.
pub fn fit(p: &SynthesisProblem) -> Result<FitResult> {
    let dict = build_dictionary(p)?;
    let a = &dict.matrix;
    let (rows, cols) = a.shape();
    let b = DVector::from_vec(
        dict.radii
            .iter()
            .map(|&r| p.target.eval(r))
            .collect::<Result<Vec<_>>>()?,
    );

    let singular = a.clone().singular_values();
    let s_max = singular.max();
    let s_min = singular.min();
    let condition = if s_min > 0.0 { s_max / s_min } else { f64::INFINITY };
    let rank_tol = rows.max(cols) as f64 * f64::EPSILON * s_max;

    let mut ridge = p.ridge;
    if ridge == 0.0 && s_min <= rank_tol {
        if !p.auto_ridge {
            return Err(Error::Conditioning { condition });
        }
        ridge = FALLBACK_RIDGE * s_max;
    }

    let coefficients = solve_least_squares(a, &b, ridge)?;
    let residual_vec = a * &coefficients - &b;
    let collocation_residual = residual_vec.norm();
    let coefficients: Vec<Complex64> = coefficients.iter().copied().collect();

    let dense = dense_radii(p.radius, DENSE_FACTOR * rows);
    let table = dense
        .par_iter()
        .map(|&r| {
            let target = p.target.eval(r)?;
            let fit = dict.eval(&coefficients, r)?;
            Ok(ResidualRow {
                radius: r,
                target,
                fit,
                residual: (fit - target).norm(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let sup_error = table.iter().map(|row| row.residual).fold(0.0, f64::max);
    let l2_error = (table.iter().map(|row| row.residual * row.residual).sum::<f64>() / table.len() as f64).sqrt();

    Ok(FitResult {
        columns: dict
            .generators
            .iter()
            .map(|g| (g.base().lambda(), g.degree()))
            .collect(),
        coefficients,
        scales: dict.scales,
        sup_error,
        l2_error,
        collocation_residual,
        condition_estimate: condition,
        ridge_used: ridge,
        collocation_points: rows,
        dense_points: dense.len(),
        table,
    })
}

fn solve_least_squares(a: &DMatrix<Complex64>, b: &DVector<Complex64>, ridge: f64) -> Result<DVector<Complex64>> {
    let (rows, cols) = a.shape();
    let (a_aug, b_aug) = if ridge > 0.0 {
        let mut a_aug = DMatrix::zeros(rows + cols, cols);
        a_aug.view_mut((0, 0), (rows, cols)).copy_from(a);
        let root = ridge.sqrt();
        for j in 0..cols {
            a_aug[(rows + j, j)] = Complex64::new(root, 0.0);
        }
        let mut b_aug = DVector::zeros(rows + cols);
        b_aug.rows_mut(0, rows).copy_from(b);
        (a_aug, b_aug)
    } else {
        (a.clone(), b.clone())
    };
    let qr = a_aug.qr();
    let rhs = qr.q().adjoint() * b_aug;
    qr.r()
        .solve_upper_triangular(&rhs)
        .ok_or(Error::Conditioning {
            condition: f64::INFINITY,
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::Operator;

    fn real(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn classical_bessel_zeros() {
        let z = profile_zeros(2, 5).unwrap();
        let table = [
            2.404_825_557_695_773,
            5.520_078_110_286_311,
            8.653_727_912_911_012,
            11.791_534_439_014_282,
            14.930_917_708_487_786,
        ];
        for (a, b) in z.iter().zip(table) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
        // n = 3: sin(t)/t vanishes at k pi.
        for (k, z) in profile_zeros(3, 4).unwrap().iter().enumerate() {
            assert!((z - PI * (k + 1) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_dictionary() {
        let target = RadialFunction::gaussian(2, 1.0).unwrap();
        let p = SynthesisProblem::new(2, 1.0, target, vec![real(0.0)]);
        let d = build_dictionary(&p).unwrap();
        assert_eq!(d.matrix.ncols(), 1);
        assert!(d.matrix.iter().all(|v| *v == real(1.0)));
    }

    #[test]
    fn fourier_bessel_columns_are_classical() {
        let r = 2.0;
        let target = RadialFunction::gaussian(2, 1.0).unwrap();
        let p = SynthesisProblem::new(2, r, target, fourier_bessel_spectrum(2, r, 3).unwrap());
        let d = build_dictionary(&p).unwrap();
        assert_eq!(d.matrix.ncols(), 3);
        // Every column vanishes at the boundary (last collocation radius is R).
        for j in 0..3 {
            assert!(d.matrix[(d.radii.len() - 1, j)].norm() < 1e-12);
        }
    }

    #[test]
    fn derivative_enrichment_doubles_columns() {
        let target = RadialFunction::gaussian(3, 1.0).unwrap();
        let mut p = SynthesisProblem::new(3, 2.0, target, vec![real(-1.0), real(-4.0), real(-9.0)]);
        p.max_degree = 1;
        assert_eq!(build_dictionary(&p).unwrap().matrix.ncols(), 6);
    }

    #[test]
    fn reproduces_dictionary_member() {
        let lambda0 = real(-3.0);
        let s = SphericalFunction::new(lambda0, 2).unwrap();
        let p = SynthesisProblem::new(2, 3.0, RadialFunction::spherical(s), vec![real(-1.0), lambda0, real(-6.0)]);
        let out = fit(&p).unwrap();
        assert!(out.sup_error <= 1e-10, "{}", out.sup_error);
        let inv_scale = 1.0 / out.scales[1];
        assert!((out.coefficients[1] - inv_scale).norm() <= 1e-8 * inv_scale);
        assert!(out.coefficients[0].norm() <= 1e-8);
        assert!(out.coefficients[2].norm() <= 1e-8);
    }

    #[test]
    fn reproduces_first_monomial() {
        let s = SphericalFunction::new(Complex64::new(-2.0, 0.5), 3).unwrap();
        let target = RadialFunction::monomial(MonomialGenerator::new(s, 1));
        let mut p = SynthesisProblem::new(3, 2.5, target, vec![s.lambda()]);
        p.max_degree = 1;
        assert!(fit(&p).unwrap().sup_error <= 1e-9);
    }

    #[test]
    fn duplicate_spectrum_needs_ridge() {
        let target = RadialFunction::gaussian(2, 1.0).unwrap();
        let mut p = SynthesisProblem::new(2, 3.0, target, vec![real(-1.0), real(-1.0)]);
        assert!(matches!(fit(&p), Err(Error::Conditioning { .. })));
        p.ridge = 1e-8;
        assert!(fit(&p).is_ok());
        p.ridge = 0.0;
        p.auto_ridge = true;
        let out = fit(&p).unwrap();
        assert!(out.ridge_used > 0.0);
    }

    #[test]
    fn rejects_underdetermined_collocation() {
        let target = RadialFunction::gaussian(2, 1.0).unwrap();
        let mut p = SynthesisProblem::new(2, 3.0, target, vec![real(-1.0), real(-2.0), real(-3.0)]);
        p.collocation = Some(2);
        assert!(matches!(fit(&p), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn recovers_combination_coefficients() {
        let spectrum = vec![real(-1.0), real(-5.0), Complex64::new(-2.0, 1.0)];
        let weights = [real(0.5), real(-1.25), Complex64::new(0.3, 0.7)];
        let parts = spectrum
            .iter()
            .zip(weights)
            .map(|(&l, w)| (w, RadialFunction::spherical(SphericalFunction::new(l, 4).unwrap())))
            .collect();
        let target = RadialFunction::composed(Operator::Combination(parts), 3).unwrap();
        let out = fit(&SynthesisProblem::new(4, 2.0, target, spectrum)).unwrap();
        assert!(out.sup_error <= 1e-9);
        for (got, want) in out.raw_coefficients().iter().zip(weights) {
            assert!((got - want).norm() <= 1e-6 * want.norm());
        }
    }
}
