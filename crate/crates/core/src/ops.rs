//! Operator calculus on radial functions: K-translation, modified spherical
//! differences, the product-formula residual and spherical-monomial degrees.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bessel::SphericalFunction;
use crate::error::{Error, Result};
use crate::quadrature::SphereAverageRule;
use crate::radial::{Operator, RadialFunction};

pub const DEFAULT_DIFFERENCE_RADII: [f64; 2] = [0.7, 1.3];
pub const DEFAULT_DEGREE_TOL: f64 = 1e-7;

/// 33 equispaced radii on [0, 4].
pub fn default_grid() -> Vec<f64> {
    (0..33).map(|i| 4.0 * i as f64 / 32.0).collect()
}

/// `count` radii drawn uniformly from [0.5, 2.0] with a seeded generator.
pub fn random_radii(seed: u64, count: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.random_range(0.5..2.0)).collect()
}

/// `(tau_y f)(x)` for `|x| = rho_base`, `|y| = r_trans`.
pub fn k_translate(
    f: &RadialFunction,
    rho_base: f64,
    r_trans: f64,
    rule: &SphereAverageRule,
) -> Result<Complex64> {
    rule.sphere_average(|t| f.eval(t), rho_base, r_trans)
}

/// The modified spherical difference `delta_y^# - s(y) delta_e`, stored by
/// `|y|` only: the sphere of radius `|y|` is symmetric, so `y` and `y^{-1}`
/// give the same radial atom.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphericalDifference {
    s: SphericalFunction,
    rho: f64,
}

impl SphericalDifference {
    pub fn new(s: SphericalFunction, rho: f64) -> Result<Self> {
        if !rho.is_finite() {
            return Err(Error::InvalidArgument(format!("difference radius must be finite, got {rho}")));
        }
        Ok(SphericalDifference { s, rho: rho.abs() })
    }

    pub fn spherical(&self) -> &SphericalFunction {
        &self.s
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }
}

pub fn apply_difference(
    d: &SphericalDifference,
    f: &RadialFunction,
    rule: &Arc<SphereAverageRule>,
    depth_cap: usize,
) -> Result<RadialFunction> {
    let scalar = d.s.eval(d.rho)?;
    RadialFunction::composed(
        Operator::Difference {
            inner: f.clone(),
            difference: *d,
            scalar,
            rule: rule.clone(),
        },
        depth_cap,
    )
}

/// `|tau_r J(rho) - J(rho) J(r)|`
pub fn check_product_formula(
    s: &SphericalFunction,
    rho: f64,
    r: f64,
    rule: &SphereAverageRule,
) -> Result<f64> {
    let translated = rule.sphere_average(|t| s.eval(t), rho, r)?;
    Ok((translated - s.eval(rho)? * s.eval(r)?).norm())
}

#[derive(Clone, Debug, PartialEq)]
pub struct DegreeCheck {
    pub max_deg: usize,
    pub radii: Vec<f64>,
    pub grid: Vec<f64>,
    pub tol: f64,
    pub depth_cap: usize,
}

impl Default for DegreeCheck {
    fn default() -> Self {
        DegreeCheck {
            max_deg: 2,
            radii: DEFAULT_DIFFERENCE_RADII.to_vec(),
            grid: default_grid(),
            tol: DEFAULT_DEGREE_TOL,
            depth_cap: crate::radial::DEFAULT_DEPTH_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum DegreeOutcome {
    Exact {
        degree: usize,
        /// Largest sup-norm among the `degree`-fold compositions.
        witness: f64,
        /// Largest sup-norm among the `(degree + 1)`-fold compositions.
        residual: f64,
    },
    ExceedsMaxDegree {
        max_deg: usize,
        /// A `(max_deg + 1)`-fold composition that stays above `tol`.
        residual: f64,
    },
}

impl DegreeOutcome {
    pub fn degree(&self) -> Option<usize> {
        match self {
            DegreeOutcome::Exact { degree, .. } => Some(*degree),
            DegreeOutcome::ExceedsMaxDegree { .. } => None,
        }
    }
}

/// Least `m` such that every product of `m + 1` differences `D_{s; rho_i}`
/// (radii drawn with repetition from `check.radii`) annihilates `f` on the
/// grid, while some `m`-fold product leaves a function above `10 tol`.
///
/// Differences commute, so compositions are enumerated as multisets.
pub fn monomial_degree(
    f: &RadialFunction,
    s: &SphericalFunction,
    check: &DegreeCheck,
    rule: &Arc<SphereAverageRule>,
) -> Result<DegreeOutcome> {
    if check.radii.is_empty() || check.grid.is_empty() {
        return Err(Error::InvalidArgument("degree check needs radii and a grid".into()));
    }
    if check.radii.iter().any(|&r| !(r > 0.0 && r.is_finite())) {
        return Err(Error::InvalidArgument("difference radii must be positive".into()));
    }
    let mut sorted = check.radii.clone();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidArgument("difference radii must be distinct".into()));
    }
    let differences = check
        .radii
        .iter()
        .map(|&r| SphericalDifference::new(*s, r))
        .collect::<Result<Vec<_>>>()?;
    let tol = check.tol;

    // (function, index of the last difference applied)
    let mut level: Vec<(RadialFunction, usize)> = vec![(f.clone(), 0)];
    let mut level_max = f.sup_norm(&check.grid)?;
    for m in 0..=check.max_deg {
        let mut next = Vec::new();
        for (g, last) in &level {
            for (i, d) in differences.iter().enumerate().skip(*last) {
                next.push((apply_difference(d, g, rule, check.depth_cap)?, i));
            }
        }
        let mut max = 0.0f64;
        let mut all_ambiguous = true;
        for (g, _) in &next {
            let sup = g.sup_norm(&check.grid)?;
            max = max.max(sup);
            all_ambiguous &= sup > tol && sup <= 10.0 * tol;
            if sup > 10.0 * tol {
                // Not annihilated at this level and a witness exists for the next.
                break;
            }
        }
        if max <= tol {
            if level_max > 10.0 * tol {
                return Ok(DegreeOutcome::Exact {
                    degree: m,
                    witness: level_max,
                    residual: max,
                });
            }
            return Err(Error::IllConditioned {
                level: m,
                max: level_max,
                tol,
            });
        }
        if all_ambiguous {
            return Err(Error::IllConditioned {
                level: m + 1,
                max,
                tol,
            });
        }
        if m == check.max_deg {
            return Ok(DegreeOutcome::ExceedsMaxDegree {
                max_deg: check.max_deg,
                residual: max,
            });
        }
        level = next;
        level_max = max;
    }
    unreachable!("loop returns at m == max_deg")
}
