use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Div, Mul};

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::{Error, Result};

/// Reference to |L(s, ψ)| for a primitive Dirichlet character ψ, identified
/// by its conductor and exponent vector on the canonical generators. The
/// numeric value travels with the key; equality ignores it.
#[derive(Clone, Debug)]
pub struct LValueKey {
    pub s: u8,
    pub conductor: u64,
    pub exponents: Vec<u64>,
    pub value: f64,
}

impl LValueKey {
    fn id(&self) -> (u8, u64, &[u64]) {
        (self.s, self.conductor, &self.exponents)
    }
}

impl PartialEq for LValueKey {
    fn eq(&self, other: &Self) -> bool {
        self.id() == other.id()
    }
}
impl Eq for LValueKey {}
impl PartialOrd for LValueKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for LValueKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.id().cmp(&other.id())
    }
}

/// Atomic positive factor.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Atom {
    /// A prime p (integers are stored through their factorization).
    Prime(u64),
    Pi,
    /// |sin(πq)| with q canonicalized into (0, 1/2).
    SinPi(Rational64),
    /// log n for an integer n ≥ 2.
    Log(u64),
    LValue(LValueKey),
    /// A positive real known only numerically; stored by its bit pattern.
    Residue(u64),
}

impl Atom {
    pub fn ln_value(&self) -> f64 {
        match self {
            Atom::Prime(p) => (*p as f64).ln(),
            Atom::Pi => std::f64::consts::PI.ln(),
            Atom::SinPi(q) => (std::f64::consts::PI * ratio_f64(*q)).sin().ln(),
            Atom::Log(n) => (*n as f64).ln().ln(),
            Atom::LValue(k) => k.value.ln(),
            Atom::Residue(bits) => f64::from_bits(*bits).ln(),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Prime(p) => write!(f, "{p}"),
            Atom::Pi => write!(f, "π"),
            Atom::SinPi(q) => write!(f, "sin(π·{q})"),
            Atom::Log(n) => write!(f, "log({n})"),
            Atom::LValue(k) => {
                let e: Vec<String> = k.exponents.iter().map(|x| x.to_string()).collect();
                write!(f, "|L({}, χ[{};{}])|", k.s, k.conductor, e.join(","))
            }
            Atom::Residue(bits) => write!(f, "⟨{:.15e}⟩", f64::from_bits(*bits)),
        }
    }
}

pub(crate) fn ratio_f64(q: Rational64) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// Exact product ∏ atom^exponent of positive factors with rational exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FactoredMagnitude {
    atoms: BTreeMap<Atom, Rational64>,
}

impl FactoredMagnitude {
    pub fn one() -> Self {
        Self::default()
    }

    fn from_atom(atom: Atom, e: Rational64) -> Self {
        let mut out = Self::one();
        out.push(atom, e);
        out
    }

    fn push(&mut self, atom: Atom, e: Rational64) {
        if e.is_zero() {
            return;
        }
        let entry = self.atoms.entry(atom.clone()).or_insert_with(Rational64::zero);
        *entry += e;
        if entry.is_zero() {
            self.atoms.remove(&atom);
        }
    }

    /// A positive integer, stored by prime factorization.
    pub fn integer(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("magnitude of zero".into()));
        }
        let mut out = Self::one();
        for (p, e) in factorize(n) {
            out.push(Atom::Prime(p), Rational64::from_integer(e as i64));
        }
        Ok(out)
    }

    /// |num/den| for nonzero integers.
    pub fn rational(num: i64, den: i64) -> Result<Self> {
        Ok(Self::integer(num.unsigned_abs())? / Self::integer(den.unsigned_abs())?)
    }

    pub fn pi() -> Self {
        Self::from_atom(Atom::Pi, Rational64::one())
    }

    /// |sin(πq)| for rational q ∉ ℤ. Values at multiples of π/6 and π/4 are
    /// rewritten in terms of primes.
    pub fn sin_pi(q: Rational64) -> Result<Self> {
        let mut r = q - q.floor();
        if r.is_zero() {
            return Err(Error::InvalidInput(format!("sin(π·{q}) vanishes")));
        }
        let half = Rational64::new(1, 2);
        if r > half {
            r = Rational64::one() - r;
        }
        let h = |n, d| Rational64::new(n, d);
        Ok(if r == half {
            Self::one()
        } else if r == h(1, 6) {
            Self::from_atom(Atom::Prime(2), h(-1, 1))
        } else if r == h(1, 4) {
            Self::from_atom(Atom::Prime(2), h(-1, 2))
        } else if r == h(1, 3) {
            let mut m = Self::from_atom(Atom::Prime(3), h(1, 2));
            m.push(Atom::Prime(2), h(-1, 1));
            m
        } else {
            Self::from_atom(Atom::SinPi(r), Rational64::one())
        })
    }

    /// log n for n ≥ 2.
    pub fn log_int(n: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("log({n}) is not a positive magnitude atom")));
        }
        Ok(Self::from_atom(Atom::Log(n), Rational64::one()))
    }

    pub fn lvalue(key: LValueKey) -> Result<Self> {
        if !(key.value > 0.0) || !key.value.is_finite() {
            return Err(Error::InvalidInput(format!("L-value magnitude {} not positive", key.value)));
        }
        Ok(Self::from_atom(Atom::LValue(key), Rational64::one()))
    }

    /// A positive real carried numerically.
    pub fn residue(x: f64) -> Result<Self> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::InvalidInput(format!("numeric residue {x} not positive")));
        }
        if x == 1.0 {
            return Ok(Self::one());
        }
        Ok(Self::from_atom(Atom::Residue(x.to_bits()), Rational64::one()))
    }

    pub fn pow(&self, e: Rational64) -> Self {
        let mut out = Self::one();
        for (a, x) in &self.atoms {
            out.push(a.clone(), *x * e);
        }
        out
    }

    pub fn powi(&self, e: i64) -> Self {
        self.pow(Rational64::from_integer(e))
    }

    pub fn inv(&self) -> Self {
        self.powi(-1)
    }

    pub fn sqrt(&self) -> Self {
        self.pow(Rational64::new(1, 2))
    }

    pub fn ln_eval(&self) -> f64 {
        let mut sum = 0.0;
        let mut comp = 0.0;
        for (a, e) in &self.atoms {
            let term = a.ln_value() * ratio_f64(*e);
            let t = sum + term;
            comp += if f64::abs(sum) >= term.abs() { (sum - t) + term } else { (term - t) + sum };
            sum = t;
        }
        sum + comp
    }

    pub fn eval(&self) -> f64 {
        self.ln_eval().exp()
    }

    /// True when no numeric residue or L-value atom is present.
    pub fn is_closed_form(&self) -> bool {
        !self.atoms.keys().any(|a| matches!(a, Atom::Residue(_) | Atom::LValue(_)))
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&Atom, &Rational64)> {
        self.atoms.iter()
    }

    pub fn exponent_of(&self, atom: &Atom) -> Rational64 {
        self.atoms.get(atom).copied().unwrap_or_else(Rational64::zero)
    }

    pub fn is_one(&self) -> bool {
        self.atoms.is_empty()
    }
}

impl Mul for FactoredMagnitude {
    type Output = Self;
    fn mul(mut self, rhs: Self) -> Self {
        for (a, e) in rhs.atoms {
            self.push(a, e);
        }
        self
    }
}

impl Mul<&FactoredMagnitude> for &FactoredMagnitude {
    type Output = FactoredMagnitude;
    fn mul(self, rhs: &FactoredMagnitude) -> FactoredMagnitude {
        self.clone() * rhs.clone()
    }
}

impl Div for FactoredMagnitude {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        self * rhs.inv()
    }
}

impl std::iter::Product for FactoredMagnitude {
    fn product<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::one(), |a, b| a * b)
    }
}

impl fmt::Display for FactoredMagnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .atoms
            .iter()
            .map(|(a, e)| {
                if e.is_one() {
                    a.to_string()
                } else if e.is_integer() && e.is_positive() {
                    format!("{a}^{e}")
                } else {
                    format!("{a}^({e})")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" · "))
    }
}

struct Factors<'a>(&'a BTreeMap<Atom, Rational64>);

impl Serialize for Factors<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (a, e) in self.0 {
            map.serialize_entry(&a.to_string(), &e.to_string())?;
        }
        map.end()
    }
}

impl Serialize for FactoredMagnitude {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("FactoredMagnitude", 3)?;
        st.serialize_field("symbolic", &self.to_string())?;
        st.serialize_field("factors", &Factors(&self.atoms))?;
        st.serialize_field("value", &self.eval())?;
        st.end()
    }
}

/// A magnitude together with a sign that may be unknown.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SignedMagnitude {
    pub sign: Option<i8>,
    pub magnitude: FactoredMagnitude,
}

impl SignedMagnitude {
    pub fn one() -> Self {
        Self { sign: Some(1), magnitude: FactoredMagnitude::one() }
    }

    /// A nonzero real carried numerically, sign included.
    pub fn from_real(x: f64) -> Result<Self> {
        if x == 0.0 || !x.is_finite() {
            return Err(Error::InvalidInput(format!("expected a nonzero real, got {x}")));
        }
        Ok(Self { sign: Some(if x > 0.0 { 1 } else { -1 }), magnitude: FactoredMagnitude::residue(x.abs())? })
    }

    pub fn value(&self) -> Option<f64> {
        self.sign.map(|s| s as f64 * self.magnitude.eval())
    }
}

impl Mul for SignedMagnitude {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let sign = match (self.sign, rhs.sign) {
            (Some(a), Some(b)) => Some(a * b),
            _ => None,
        };
        Self { sign, magnitude: self.magnitude * rhs.magnitude }
    }
}

/// Trial-division factorization, ascending primes.
pub(crate) fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}
