//! Orbifold input documents (TOML or JSON, chosen by file extension).

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context};
use num_rational::Rational64;
use serde::Deserialize;

use ruelle_zero::funceq::{ScatteringData, TwistedSurface};
use ruelle_zero::model::{Angle, MultiplierSystem, OrbifoldSignature};
use ruelle_zero::special::{FactoredMagnitude, SignedMagnitude};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbifoldDoc {
    pub schema_version: u32,
    pub genus: u32,
    #[serde(default)]
    pub cusps: u32,
    #[serde(default)]
    pub elliptic_orders: Vec<u32>,
    pub dim: u32,
    pub weight: Number,
    #[serde(default)]
    pub residues: Vec<Vec<u32>>,
    #[serde(default)]
    pub parabolic_angles: Vec<Vec<Number>>,
    /// Required when there are cusps.
    pub scattering: Option<ScatteringDoc>,
    /// Points s = [re, im] at which to report H(s) and H₁(s).
    #[serde(default)]
    pub samples: Vec<[f64; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScatteringDoc {
    pub n0: i64,
    pub a_n0: MagnitudeDoc,
    #[serde(default)]
    pub d1: Option<MagnitudeDoc>,
    #[serde(default)]
    pub c1: f64,
    pub half_trace_exponent: Option<i64>,
}

/// A rational written as a string ("1/3") or a plain number. Decimals
/// become inexact angles.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Number {
    fn rational(&self, field: &str) -> anyhow::Result<Rational64> {
        match self {
            Number::Int(n) => Ok(Rational64::from_integer(*n)),
            Number::Text(s) => Rational64::from_str(s.trim()).map_err(|_| anyhow!("{field}: '{s}' is not a rational")),
            Number::Float(x) => bail!("{field}: {x} must be exact (an integer or a string like \"1/3\")"),
        }
    }

    fn angle(&self, field: &str) -> anyhow::Result<Angle> {
        match self {
            Number::Float(x) => Ok(Angle::Real(*x)),
            _ => Ok(Angle::Exact(self.rational(field)?)),
        }
    }
}

/// A real number, or an exact product {sign, factors} whose keys are
/// "pi", a positive integer, "log(n)" or "sin_pi(a/b)", with rational
/// exponents.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum MagnitudeDoc {
    Real(f64),
    Factored(FactoredDoc),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactoredDoc {
    pub sign: Option<i8>,
    pub factors: BTreeMap<String, Number>,
}

fn atom(key: &str) -> anyhow::Result<FactoredMagnitude> {
    let inner = |prefix: &str| key.strip_prefix(prefix).and_then(|r| r.strip_suffix(')'));
    if key == "pi" {
        return Ok(FactoredMagnitude::pi());
    }
    if let Some(n) = inner("log(") {
        return Ok(FactoredMagnitude::log_int(n.trim().parse()?)?);
    }
    if let Some(q) = inner("sin_pi(") {
        let q = Rational64::from_str(q.trim()).map_err(|_| anyhow!("bad rational in '{key}'"))?;
        return Ok(FactoredMagnitude::sin_pi(q)?);
    }
    let n: u64 = key.parse().map_err(|_| anyhow!("unknown factor '{key}'"))?;
    Ok(FactoredMagnitude::integer(n)?)
}

impl MagnitudeDoc {
    pub fn build(&self, field: &str) -> anyhow::Result<SignedMagnitude> {
        match self {
            MagnitudeDoc::Real(x) => SignedMagnitude::from_real(*x).with_context(|| format!("{field}: {x}")),
            MagnitudeDoc::Factored(f) => {
                if let Some(s) = f.sign {
                    if s != 1 && s != -1 {
                        bail!("{field}.sign must be 1 or -1, got {s}");
                    }
                }
                let mut m = FactoredMagnitude::one();
                for (k, e) in &f.factors {
                    let e = e.rational(&format!("{field}.factors.{k}"))?;
                    m = m * atom(k).with_context(|| format!("{field}.factors"))?.pow(e);
                }
                Ok(SignedMagnitude { sign: f.sign, magnitude: m })
            }
        }
    }
}

impl OrbifoldDoc {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let doc: OrbifoldDoc = match path.extension().and_then(|e| e.to_str()) {
            Some("json") => serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?,
            Some("toml") => toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?,
            _ => bail!("{}: expected a .toml or .json document", path.display()),
        };
        if doc.schema_version != SCHEMA_VERSION {
            bail!("schema_version: {} is not supported (expected {SCHEMA_VERSION})", doc.schema_version);
        }
        Ok(doc)
    }

    pub fn surface(&self) -> anyhow::Result<TwistedSurface> {
        let sig = OrbifoldSignature::new(self.genus, self.cusps, self.elliptic_orders.clone()).context("signature")?;
        let weight = self.weight.rational("weight")?;
        let angles = self
            .parabolic_angles
            .iter()
            .enumerate()
            .map(|(j, row)| row.iter().map(|b| b.angle(&format!("parabolic_angles[{j}]"))).collect())
            .collect::<anyhow::Result<Vec<Vec<Angle>>>>()?;
        let ms = MultiplierSystem::new(&sig, self.dim, weight, self.residues.clone(), angles).context("multiplier system")?;
        let data = match (&self.scattering, self.cusps) {
            (None, 0) => ScatteringData::compact(),
            (None, _) => bail!("scattering: required when cusps > 0"),
            (Some(s), _) => ScatteringData {
                n0: s.n0,
                a_n0: s.a_n0.build("scattering.a_n0")?,
                d1: match &s.d1 {
                    Some(d) => d.build("scattering.d1")?,
                    None => SignedMagnitude::one(),
                },
                c1: s.c1,
                half_trace_exponent: s.half_trace_exponent,
                phi: None,
            },
        };
        Ok(TwistedSurface::new(sig, ms, data).context("surface")?)
    }
}
