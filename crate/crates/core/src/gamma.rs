//! Lanczos approximation of the gamma function for real arguments.

use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;

#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function via the Lanczos series (g = 7, n = 9), with the reflection
/// formula below 1/2. Relative accuracy is around 1e-15 on the positive axis.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEFFS[0];
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
}

/// Normalizing constant of the sphere-average weight sin^{n-2}(theta) on [0, pi]:
/// Z_n = sqrt(pi) Gamma((n-1)/2) / Gamma(n/2).
pub fn sphere_weight_normalizer(dim: usize) -> f64 {
    let n = dim as f64;
    PI.sqrt() * gamma((n - 1.0) / 2.0) / gamma(n / 2.0)
}
