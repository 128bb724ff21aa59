//! Finite K-radial measure expressions and their pairing with radial functions.
//!
//! A [`RadialMeasureExpr`] is a weighted sum of words; the word `[r1, ..., rk]`
//! stands for the convolution of the radial atoms `delta_{r1}^# * ... *
//! delta_{rk}^#` (uniform probability measures on spheres) and the empty word
//! for the unit `delta_e`. Convolutions of atoms are never materialized as
//! densities: only their pairings are computed, by iterated sphere averages.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::SphereAverageRule;
use crate::radial::{iterated_average, Operator, RadialFunction};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureTerm {
    pub w: Complex64,
    pub word: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
pub struct RadialMeasureExpr {
    terms: Vec<MeasureTerm>,
}

impl RadialMeasureExpr {
    pub fn new(terms: Vec<MeasureTerm>) -> Result<Self> {
        for t in &terms {
            if t.word.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
                return Err(Error::InvalidArgument(format!(
                    "word radii must be finite and nonnegative, got {:?}",
                    t.word
                )));
            }
        }
        Ok(RadialMeasureExpr { terms })
    }

    /// `delta_e`
    pub fn unit() -> Self {
        RadialMeasureExpr {
            terms: vec![MeasureTerm {
                w: Complex64::new(1.0, 0.0),
                word: Vec::new(),
            }],
        }
    }

    /// `delta_r^#`; the atom at radius zero is the unit.
    pub fn atom(r: f64) -> Result<Self> {
        RadialMeasureExpr::word(&[r])
    }

    /// `delta_{r1}^# * ... * delta_{rk}^#` with unit weight. Zero radii are dropped.
    pub fn word(radii: &[f64]) -> Result<Self> {
        let word = radii.iter().copied().filter(|&r| r != 0.0).collect();
        RadialMeasureExpr::new(vec![MeasureTerm {
            w: Complex64::new(1.0, 0.0),
            word,
        }])
    }

    /// The modified spherical difference `delta_rho^# - s(rho) delta_e`.
    pub fn difference(rho: f64, s_value: Complex64) -> Result<Self> {
        let mut expr = RadialMeasureExpr::atom(rho)?;
        expr.terms.push(MeasureTerm {
            w: -s_value,
            word: Vec::new(),
        });
        Ok(expr)
    }

    pub fn terms(&self) -> &[MeasureTerm] {
        &self.terms
    }

    pub fn max_word_len(&self) -> usize {
        self.terms.iter().map(|t| t.word.len()).max().unwrap_or(0)
    }

    pub fn scaled(&self, k: Complex64) -> Self {
        RadialMeasureExpr {
            terms: self
                .terms
                .iter()
                .map(|t| MeasureTerm {
                    w: t.w * k,
                    word: t.word.clone(),
                })
                .collect(),
        }
    }

    pub fn plus(&self, other: &RadialMeasureExpr) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        RadialMeasureExpr { terms }
    }

    /// Bilinear concatenation of words with multiplied weights.
    pub fn convolve(&self, other: &RadialMeasureExpr, depth_cap: usize) -> Result<Self> {
        let depth = self.max_word_len() + other.max_word_len();
        if depth > depth_cap {
            return Err(Error::DepthCapExceeded {
                depth,
                cap: depth_cap,
            });
        }
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let mut word = a.word.clone();
                word.extend_from_slice(&b.word);
                terms.push(MeasureTerm { w: a.w * b.w, word });
            }
        }
        Ok(RadialMeasureExpr { terms })
    }

    /// `<mu, f>`: each word is paired by averaging outward from the origin,
    /// one sphere per letter.
    pub fn pair(&self, f: &RadialFunction, rule: &SphereAverageRule, depth_cap: usize) -> Result<Complex64> {
        self.check_depth(depth_cap)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            acc += t.w * iterated_average(f, &t.word, 0.0, rule)?;
        }
        Ok(acc)
    }

    /// `mu * f` as a lazy radial function.
    pub fn act_on_function(
        &self,
        f: &RadialFunction,
        rule: &Arc<SphereAverageRule>,
        depth_cap: usize,
    ) -> Result<RadialFunction> {
        RadialFunction::composed(
            Operator::Act {
                inner: f.clone(),
                measure: self.clone(),
                rule: rule.clone(),
            },
            depth_cap,
        )
    }

    fn check_depth(&self, depth_cap: usize) -> Result<()> {
        let depth = self.max_word_len();
        if depth > depth_cap {
            return Err(Error::DepthCapExceeded {
                depth,
                cap: depth_cap,
            });
        }
        Ok(())
    }
}

pub fn pair(mu: &RadialMeasureExpr, f: &RadialFunction, rule: &SphereAverageRule, depth_cap: usize) -> Result<Complex64> {
    mu.pair(f, rule, depth_cap)
}

pub fn convolve(mu: &RadialMeasureExpr, nu: &RadialMeasureExpr, depth_cap: usize) -> Result<RadialMeasureExpr> {
    mu.convolve(nu, depth_cap)
}

pub fn act_on_function(
    mu: &RadialMeasureExpr,
    f: &RadialFunction,
    rule: &Arc<SphereAverageRule>,
    depth_cap: usize,
) -> Result<RadialFunction> {
    mu.act_on_function(f, rule, depth_cap)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineAtom {
    pub t: f64,
    pub w: Complex64,
}

/// A finitely supported measure on the real line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
pub struct LineMeasure {
    pub atoms: Vec<LineAtom>,
}

impl LineMeasure {
    pub fn dirac(t: f64) -> Self {
        LineMeasure {
            atoms: vec![LineAtom {
                t,
                w: Complex64::new(1.0, 0.0),
            }],
        }
    }

    /// One-dimensional convolution: atom positions add, weights multiply.
    pub fn convolve(&self, other: &LineMeasure) -> LineMeasure {
        let mut atoms = Vec::with_capacity(self.atoms.len() * other.atoms.len());
        for a in &self.atoms {
            for b in &other.atoms {
                atoms.push(LineAtom {
                    t: a.t + b.t,
                    w: a.w * b.w,
                });
            }
        }
        LineMeasure { atoms }
    }

    /// `sum_i w_i f0(t_i)`
    pub fn pair_profile(&self, f: &RadialFunction) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for a in &self.atoms {
            acc += a.w * f.eval(a.t)?;
        }
        Ok(acc)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LiftSemantics {
    /// `<mu_K, f> = <mu, f0>` with one-dimensional convolution as product.
    Axis,
    /// `mu_K = sum_i w_i delta_{|t_i|}^#` with the radial-measure convolution.
    Sphere,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LiftedMeasure {
    Axis(LineMeasure),
    Sphere(RadialMeasureExpr),
}

impl LiftedMeasure {
    pub fn pair(&self, f: &RadialFunction, rule: &SphereAverageRule, depth_cap: usize) -> Result<Complex64> {
        match self {
            LiftedMeasure::Axis(m) => m.pair_profile(f),
            LiftedMeasure::Sphere(e) => e.pair(f, rule, depth_cap),
        }
    }

    /// Product in the algebra the lift lands in.
    pub fn product(&self, other: &LiftedMeasure, depth_cap: usize) -> Result<LiftedMeasure> {
        match (self, other) {
            (LiftedMeasure::Axis(a), LiftedMeasure::Axis(b)) => Ok(LiftedMeasure::Axis(a.convolve(b))),
            (LiftedMeasure::Sphere(a), LiftedMeasure::Sphere(b)) => {
                Ok(LiftedMeasure::Sphere(a.convolve(b, depth_cap)?))
            }
            _ => Err(Error::InvalidArgument("cannot multiply lifts with different semantics".into())),
        }
    }
}

pub fn lift(mu: &LineMeasure, semantics: LiftSemantics) -> LiftedMeasure {
    match semantics {
        LiftSemantics::Axis => LiftedMeasure::Axis(mu.clone()),
        LiftSemantics::Sphere => {
            let terms = mu
                .atoms
                .iter()
                .map(|a| MeasureTerm {
                    w: a.w,
                    word: if a.t == 0.0 { Vec::new() } else { vec![a.t.abs()] },
                })
                .collect();
            LiftedMeasure::Sphere(RadialMeasureExpr { terms })
        }
    }
}

/// `|<lift(mu * nu), f> - <lift(mu) * lift(nu), f>|`
pub fn homomorphism_residual(
    mu: &LineMeasure,
    nu: &LineMeasure,
    f: &RadialFunction,
    semantics: LiftSemantics,
    rule: &SphereAverageRule,
    depth_cap: usize,
) -> Result<f64> {
    let lifted_product = lift(&mu.convolve(nu), semantics).pair(f, rule, depth_cap)?;
    let product_of_lifts = lift(mu, semantics)
        .product(&lift(nu, semantics), depth_cap)?
        .pair(f, rule, depth_cap)?;
    Ok((lifted_product - product_of_lifts).norm())
}
