//! Run configuration, value parsers and the JSON problem/target descriptors.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bessel::{MonomialGenerator, SphericalFunction, DEFAULT_MAX_TERMS, DEFAULT_SERIES_TOL};
use crate::error::{Error, Result};
use crate::quadrature::DEFAULT_ORDER;
use crate::radial::{Builtin, Interpolation, Operator, RadialFunction, SampledProfile, DEFAULT_DEPTH_CAP};
use crate::synthesis::{auto_spectrum, SynthesisProblem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

/// Default tolerances of the check suites.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub product_formula: f64,
    pub laplacian: f64,
    pub laplacian_step: f64,
    pub richardson_min: f64,
    pub richardson_max: f64,
    pub degree: f64,
    pub degree_witness: f64,
    pub commutativity: f64,
    pub eigenfunction: f64,
    pub axis_lift: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            product_formula: 1e-8,
            laplacian: 1e-5,
            laplacian_step: 1e-3,
            richardson_min: 12.0,
            richardson_max: 20.0,
            degree: 1e-7,
            degree_witness: 1e-3,
            commutativity: 1e-9,
            eigenfunction: 1e-8,
            axis_lift: 1e-14,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub quad_order: usize,
    pub series_tol: f64,
    pub max_terms: usize,
    pub depth_cap: usize,
    pub grid: GridSpec,
    pub seed: u64,
    pub format: OutputFormat,
    pub tolerances: Tolerances,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            quad_order: DEFAULT_ORDER,
            series_tol: DEFAULT_SERIES_TOL,
            max_terms: DEFAULT_MAX_TERMS,
            depth_cap: DEFAULT_DEPTH_CAP,
            grid: GridSpec {
                lo: 0.0,
                hi: 4.0,
                step: 0.125,
            },
            seed: 20_240_917,
            format: OutputFormat::Json,
            tolerances: Tolerances::default(),
        }
    }
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.tolerances;
        let positives = [
            ("series_tol", self.series_tol),
            ("tolerances.product_formula", t.product_formula),
            ("tolerances.laplacian", t.laplacian),
            ("tolerances.laplacian_step", t.laplacian_step),
            ("tolerances.richardson_min", t.richardson_min),
            ("tolerances.richardson_max", t.richardson_max),
            ("tolerances.degree", t.degree),
            ("tolerances.degree_witness", t.degree_witness),
            ("tolerances.commutativity", t.commutativity),
            ("tolerances.eigenfunction", t.eigenfunction),
            ("tolerances.axis_lift", t.axis_lift),
        ];
        for (name, v) in positives {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        if self.quad_order == 0 || self.max_terms == 0 || self.depth_cap == 0 {
            return Err(Error::InvalidArgument(
                "quad_order, max_terms and depth_cap must be positive".into(),
            ));
        }
        self.grid.points().map(|_| ())
    }

    pub fn spherical(&self, lambda: Complex64, dim: usize) -> Result<SphericalFunction> {
        SphericalFunction::new(lambda, dim)?.with_series(self.series_tol, self.max_terms)
    }
}

/// Inclusive grid `lo:hi:step`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn points(&self) -> Result<Vec<f64>> {
        if !(self.step > 0.0 && self.lo.is_finite() && self.hi.is_finite() && self.hi >= self.lo) {
            return Err(Error::InvalidArgument(format!(
                "grid needs lo <= hi and step > 0, got {self}"
            )));
        }
        let n = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize + 1;
        Ok((0..n).map(|i| self.lo + i as f64 * self.step).collect())
    }
}

impl std::fmt::Display for GridSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.step)
    }
}

impl std::str::FromStr for GridSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::InvalidArgument(format!("grid must be lo:hi:step, got {s:?}"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let num = |p: &str| p.trim().parse::<f64>().map_err(|_| bad());
        let g = GridSpec {
            lo: num(parts[0])?,
            hi: num(parts[1])?,
            step: num(parts[2])?,
        };
        g.points()?;
        Ok(g)
    }
}

impl Serialize for GridSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GridSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses `a`, `bi`, `a+bi`, `a-bi` (also with `j`).
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::InvalidArgument(format!("cannot parse complex number {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix('i').or_else(|| s.strip_suffix('j')) else {
        return s.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // Split before the sign that starts the imaginary part (not an exponent sign).
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re_part, im_part) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im_part {
        "" | "+" => 1.0,
        "-" => -1.0,
        p => p.parse::<f64>().map_err(|_| bad())?,
    };
    let re = re_part.parse::<f64>().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

pub fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// A complex number in JSON: `[re, im]`, a bare real, or an `"a+bi"` string.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexValue(pub Complex64);

impl Serialize for ComplexValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Pair([f64; 2]),
            Real(f64),
            Text(String),
        }
        Ok(ComplexValue(match Repr::deserialize(d)? {
            Repr::Pair([re, im]) => Complex64::new(re, im),
            Repr::Real(re) => Complex64::new(re, 0.0),
            Repr::Text(t) => parse_complex(&t).map_err(serde::de::Error::custom)?,
        }))
    }
}

/// JSON descriptor of a radial target.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    Constant {
        value: ComplexValue,
    },
    Gaussian {
        sigma: f64,
    },
    Bump {
        radius: f64,
    },
    Polynomial {
        coeffs: Vec<ComplexValue>,
    },
    Spherical {
        lambda: ComplexValue,
        #[serde(default)]
        degree: usize,
    },
    Sampled {
        path: PathBuf,
        #[serde(default)]
        interpolation: Interpolation,
    },
    Combination {
        terms: Vec<WeightedProfile>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedProfile {
    pub w: ComplexValue,
    pub profile: ProfileSpec,
}

impl ProfileSpec {
    /// `base_dir` resolves relative sample paths.
    pub fn build(&self, dim: usize, base_dir: Option<&Path>) -> Result<RadialFunction> {
        match self {
            ProfileSpec::Constant { value } => RadialFunction::constant(dim, value.0),
            ProfileSpec::Gaussian { sigma } => RadialFunction::gaussian(dim, *sigma),
            ProfileSpec::Bump { radius } => RadialFunction::builtin(dim, Builtin::Bump { radius: *radius }),
            ProfileSpec::Polynomial { coeffs } => {
                RadialFunction::builtin(dim, Builtin::Polynomial(coeffs.iter().map(|c| c.0).collect()))
            }
            ProfileSpec::Spherical { lambda, degree } => {
                let s = SphericalFunction::new(lambda.0, dim)?;
                Ok(if *degree == 0 {
                    RadialFunction::spherical(s)
                } else {
                    RadialFunction::monomial(MonomialGenerator::new(s, *degree))
                })
            }
            ProfileSpec::Sampled { path, interpolation } => {
                let resolved = match base_dir {
                    Some(dir) if path.is_relative() => dir.join(path),
                    _ => path.clone(),
                };
                RadialFunction::sampled(dim, SampledProfile::from_csv_path(&resolved, *interpolation)?)
            }
            ProfileSpec::Combination { terms } => {
                let parts = terms
                    .iter()
                    .map(|t| Ok((t.w.0, t.profile.build(dim, base_dir)?)))
                    .collect::<Result<Vec<_>>>()?;
                RadialFunction::composed(Operator::Combination(parts), 0)
            }
        }
    }
}

/// `"auto:modes=k"` or an explicit list of eigenvalues.
#[derive(Clone, Debug, PartialEq)]
pub enum SpectrumSpec {
    Auto { modes: usize },
    Explicit(Vec<Complex64>),
}

impl SpectrumSpec {
    pub fn resolve(&self, dim: usize, radius: f64) -> Result<Vec<Complex64>> {
        match self {
            SpectrumSpec::Auto { modes } => auto_spectrum(dim, radius, *modes),
            SpectrumSpec::Explicit(v) => Ok(v.clone()),
        }
    }
}

impl std::str::FromStr for SpectrumSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let modes = s
            .strip_prefix("auto:modes=")
            .and_then(|m| m.parse::<usize>().ok())
            .ok_or_else(|| Error::InvalidArgument(format!("spectrum must be \"auto:modes=<k>\" or a list, got {s:?}")))?;
        Ok(SpectrumSpec::Auto { modes })
    }
}

impl Serialize for SpectrumSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SpectrumSpec::Auto { modes } => s.serialize_str(&format!("auto:modes={modes}")),
            SpectrumSpec::Explicit(v) => v.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for SpectrumSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            List(Vec<ComplexValue>),
        }
        match Repr::deserialize(d)? {
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
            Repr::List(v) => Ok(SpectrumSpec::Explicit(v.into_iter().map(|c| c.0).collect())),
        }
    }
}

/// JSON input of the `synthesize` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub dim: usize,
    #[serde(alias = "R")]
    pub radius: f64,
    pub target: ProfileSpec,
    pub spectrum: SpectrumSpec,
    #[serde(default)]
    pub max_degree: usize,
    #[serde(default)]
    pub collocation: Option<usize>,
    #[serde(default)]
    pub ridge: f64,
    #[serde(default)]
    pub auto_ridge: bool,
}

impl ProblemSpec {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn build(&self, base_dir: Option<&Path>) -> Result<SynthesisProblem> {
        let target = self.target.build(self.dim, base_dir)?;
        let spectrum = self.spectrum.resolve(self.dim, self.radius)?;
        let mut p = SynthesisProblem::new(self.dim, self.radius, target, spectrum);
        p.max_degree = self.max_degree;
        p.collocation = self.collocation;
        p.ridge = self.ridge;
        p.auto_ridge = self.auto_ridge;
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        let cases = [
            ("2", Complex64::new(2.0, 0.0)),
            ("-1", Complex64::new(-1.0, 0.0)),
            ("1+1i", Complex64::new(1.0, 1.0)),
            ("1-2.5i", Complex64::new(1.0, -2.5)),
            ("3i", Complex64::new(0.0, 3.0)),
            ("-i", Complex64::new(0.0, -1.0)),
            ("1e-3+2e-1i", Complex64::new(1e-3, 0.2)),
            ("-2.5e+1-1j", Complex64::new(-25.0, -1.0)),
        ];
        for (text, want) in cases {
            assert_eq!(parse_complex(text).unwrap(), want, "{text}");
        }
        for bad in ["", "x", "1+i2", "1++2i"] {
            assert!(parse_complex(bad).is_err(), "{bad}");
        }
        assert_eq!(parse_complex(&format_complex(Complex64::new(0.5, -0.25))).unwrap(), Complex64::new(0.5, -0.25));
    }

    #[test]
    fn grids_are_inclusive() {
        let g: GridSpec = "0:5:0.5".parse().unwrap();
        let p = g.points().unwrap();
        assert_eq!(p.len(), 11);
        assert_eq!(p[10], 5.0);
        assert_eq!(RunConfig::default().grid.points().unwrap().len(), 33);
        assert!("1:0:0.1".parse::<GridSpec>().is_err());
        assert!("0:1".parse::<GridSpec>().is_err());
    }

    #[test]
    fn config_file_overrides_defaults_partially() {
        let cfg: RunConfig = serde_json::from_str(r#"{"quad_order": 128, "tolerances": {"laplacian": 1e-6}}"#).unwrap();
        assert_eq!(cfg.quad_order, 128);
        assert_eq!(cfg.tolerances.laplacian, 1e-6);
        assert_eq!(cfg.tolerances.product_formula, 1e-8);
        assert_eq!(cfg.depth_cap, 3);
        assert!(serde_json::from_str::<RunConfig>(r#"{"quad_ordr": 1}"#).is_err());
        let bad = RunConfig {
            series_tol: -1.0,
            ..RunConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn problem_spec_forms() {
        let p: ProblemSpec = serde_json::from_str(
            r#"{"dim":2,"R":3.0,"target":{"kind":"gaussian","sigma":1.0},"spectrum":"auto:modes=4"}"#,
        )
        .unwrap();
        assert_eq!(p.spectrum, SpectrumSpec::Auto { modes: 4 });
        assert_eq!(p.build(None).unwrap().spectrum.len(), 5);
        let q: ProblemSpec = serde_json::from_str(
            r#"{"dim":3,"radius":2.0,"target":{"kind":"spherical","lambda":"1+1i","degree":1},
                "spectrum":[[1.0,1.0],-2,"3-1i"],"max_degree":1,"ridge":1e-10}"#,
        )
        .unwrap();
        assert_eq!(
            q.spectrum,
            SpectrumSpec::Explicit(vec![Complex64::new(1.0, 1.0), Complex64::new(-2.0, 0.0), Complex64::new(3.0, -1.0)])
        );
        assert!(serde_json::from_str::<ProblemSpec>(r#"{"dim":2,"radius":1,"target":{"kind":"gaussian","sigma":1},"spectrum":"auto"}"#).is_err());
    }
}
