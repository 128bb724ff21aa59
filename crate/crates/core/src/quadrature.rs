//! Sphere averages over SO(n) orbits as one-dimensional angular quadrature.
//!
//! For a radial profile `f0`, averaging `f(x + k y)` over the rotation group
//! only sees the angle `theta` between `x` and `k y`, distributed with density
//! proportional to `sin^{n-2}(theta)` on `[0, pi]`. The rule below uses
//! Gauss–Legendre nodes in `theta` and folds the density into the weights,
//! which are then renormalized to sum to one.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gamma::sphere_weight_normalizer;

pub const DEFAULT_ORDER: usize = 64;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Normalized Haar average over SO(n), reduced to the angle between the base
/// point and the rotated translation vector.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SphereAverageRule {
    dim: usize,
    order: usize,
    /// Angles in (0, pi), ascending.
    nodes: Vec<f64>,
    weights: Vec<f64>,
    #[serde(skip)]
    cos_half_sq: Vec<f64>,
    /// Weight mass before renormalization; approximates Z_n.
    raw_mass: f64,
}

impl SphereAverageRule {
    pub fn new(dim: usize, order: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::UnsupportedDimension(dim));
        }
        if order == 0 {
            return Err(Error::InvalidArgument("quadrature order must be at least 1".into()));
        }
        let (x, w) = gauss_legendre(order);
        let nodes: Vec<f64> = x.iter().map(|&t| 0.5 * PI * (t + 1.0)).collect();
        let mut weights: Vec<f64> = nodes
            .iter()
            .zip(&w)
            .map(|(&theta, &wi)| 0.5 * PI * wi * theta.sin().powi(dim as i32 - 2))
            .collect();
        let raw_mass: f64 = weights.iter().sum();
        for wi in &mut weights {
            *wi /= raw_mass;
        }
        let cos_half_sq = nodes.iter().map(|&t| (0.5 * t).cos().powi(2)).collect();
        Ok(SphereAverageRule {
            dim,
            order,
            nodes,
            weights,
            cos_half_sq,
            raw_mass,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn raw_mass(&self) -> f64 {
        self.raw_mass
    }

    /// Exact value of the normalizing constant, for comparison with `raw_mass`.
    pub fn normalizer(&self) -> f64 {
        sphere_weight_normalizer(self.dim)
    }

    /// `sum_i w_i g(theta_i)`.
    pub fn integrate<F>(&self, mut g: F) -> Complex64
    where
        F: FnMut(f64) -> Complex64,
    {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&theta, &w)| g(theta) * w)
            .sum()
    }

    /// Radii `|x + k y|` visited by the rule for `|x| = rho`, `|y| = r`.
    ///
    /// Uses `(rho - r)^2 + 4 rho r cos^2(theta/2)`, which stays accurate near
    /// the antipodal node when `rho` is close to `r`.
    pub fn orbit_radii(&self, rho: f64, r: f64) -> impl Iterator<Item = f64> + '_ {
        let (rho, r) = (rho.abs(), r.abs());
        let diff_sq = (rho - r) * (rho - r);
        let prod = 4.0 * rho * r;
        self.cos_half_sq
            .iter()
            .map(move |&c| (diff_sq + prod * c).sqrt())
    }

    /// Average of the radial function with profile `f0` over the sphere of
    /// radius `r` centred at a point of norm `rho`.
    pub fn sphere_average<F>(&self, f0: F, rho: f64, r: f64) -> Result<Complex64>
    where
        F: Fn(f64) -> Result<Complex64>,
    {
        let (rho, r) = (rho.abs(), r.abs());
        if rho == 0.0 || r == 0.0 {
            return f0(rho + r);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (t, &w) in self.orbit_radii(rho, r).zip(&self.weights) {
            acc += f0(t)? * w;
        }
        Ok(acc)
    }
}

pub fn build_rule(dim: usize, order: usize) -> Result<SphereAverageRule> {
    SphereAverageRule::new(dim, order)
}

pub fn sphere_average<F>(rule: &SphereAverageRule, f0: F, rho: f64, r: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    rule.sphere_average(f0, rho, r)
}
