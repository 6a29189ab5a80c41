//! Value rings for evaluations.
//!
//! The classical backend computes in exact rationals. The root-of-unity
//! backend computes in complex doubles; every closed form it produces is real,
//! but the complex carrier keeps the physical inner product honest.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default absolute tolerance for comparing quantum values.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Which specialization of the recoupling parameter to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "backend", content = "r", rename_all = "snake_case")]
pub enum QParam {
    /// `[n] = n`, `Δ_n = (-1)^n (n+1)`.
    Classical,
    /// `q = exp(iπ/r)`, so `[n] = sin(nπ/r) / sin(π/r)`.
    RootOfUnity(u64),
}

impl QParam {
    pub fn validate(self) -> Result<Self> {
        match self {
            QParam::RootOfUnity(r) if r < 3 => Err(Error::InvalidParam(format!(
                "root-of-unity level must be at least 3, got {r}"
            ))),
            p => Ok(p),
        }
    }

    /// Largest usable color, if the backend bounds it.
    pub fn max_color(self) -> Option<u32> {
        match self {
            QParam::Classical => None,
            QParam::RootOfUnity(r) => Some(u32::try_from(r - 2).unwrap_or(u32::MAX)),
        }
    }

    pub fn is_classical(self) -> bool {
        matches!(self, QParam::Classical)
    }
}

impl fmt::Display for QParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QParam::Classical => write!(f, "classical"),
            QParam::RootOfUnity(r) => write!(f, "quantum(r={r})"),
        }
    }
}

/// Arithmetic needed by the recoupling formulas and the evaluator.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    fn from_i64(v: i64) -> Self;

    /// `[n]` for this backend.
    fn quantum_int(n: u32, p: QParam) -> Self;

    /// Value of a single closed strand, `-(q + q^-1)`.
    fn loop_value(p: QParam) -> Self;

    fn into_qscalar(self) -> QScalar;

    /// Recover a value of this ring from the public wrapper.
    fn from_qscalar(v: &QScalar) -> Option<Self>;

    /// Squared modulus, as a float.
    fn norm_sqr_f64(&self) -> f64;

    /// Sum a slice in a fixed, reproducible order.
    fn sum_all(values: &[Self]) -> Self {
        pairwise_sum(values)
    }
}

impl Scalar for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn quantum_int(n: u32, _p: QParam) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn loop_value(_p: QParam) -> Self {
        BigRational::from_i64(-2)
    }

    fn into_qscalar(self) -> QScalar {
        QScalar::Exact(self)
    }

    fn from_qscalar(v: &QScalar) -> Option<Self> {
        match v {
            QScalar::Exact(r) => Some(r.clone()),
            QScalar::Float(_) => None,
        }
    }

    fn norm_sqr_f64(&self) -> f64 {
        (self * self).to_f64().unwrap_or(f64::INFINITY)
    }
}

impl Scalar for Complex64 {
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }

    fn quantum_int(n: u32, p: QParam) -> Self {
        match p {
            QParam::Classical => Complex64::new(n as f64, 0.0),
            QParam::RootOfUnity(r) => {
                let r = r as f64;
                let v =
                    (n as f64 * std::f64::consts::PI / r).sin() / (std::f64::consts::PI / r).sin();
                Complex64::new(v, 0.0)
            }
        }
    }

    fn loop_value(p: QParam) -> Self {
        match p {
            QParam::Classical => Complex64::new(-2.0, 0.0),
            QParam::RootOfUnity(r) => {
                Complex64::new(-2.0 * (std::f64::consts::PI / r as f64).cos(), 0.0)
            }
        }
    }

    fn into_qscalar(self) -> QScalar {
        QScalar::Float(self)
    }

    fn from_qscalar(v: &QScalar) -> Option<Self> {
        match v {
            QScalar::Float(c) => Some(*c),
            QScalar::Exact(_) => None,
        }
    }

    fn norm_sqr_f64(&self) -> f64 {
        self.norm_sqr()
    }
}

/// Sum by recursive halving so that float results do not depend on how work
/// was split upstream.
pub fn pairwise_sum<S: Scalar>(values: &[S]) -> S {
    match values.len() {
        0 => S::zero(),
        1 => values[0].clone(),
        n => {
            let (l, r) = values.split_at(n / 2);
            pairwise_sum(l) + pairwise_sum(r)
        }
    }
}

/// Pairwise sum of plain floats.
pub fn pairwise_sum_f64(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let (l, r) = values.split_at(values.len() / 2);
    pairwise_sum_f64(l) + pairwise_sum_f64(r)
}

/// An evaluation result from either backend.
#[derive(Debug, Clone, PartialEq)]
pub enum QScalar {
    Exact(BigRational),
    Float(Complex64),
}

impl QScalar {
    pub fn zero_for(p: QParam) -> Self {
        match p {
            QParam::Classical => QScalar::Exact(BigRational::zero()),
            QParam::RootOfUnity(_) => QScalar::Float(Complex64::zero()),
        }
    }

    pub fn from_int(v: i64) -> Self {
        QScalar::Exact(BigRational::from_i64(v))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            QScalar::Exact(r) => r.is_zero(),
            QScalar::Float(c) => c.is_zero(),
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            QScalar::Exact(r) => Some(r),
            QScalar::Float(_) => None,
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            QScalar::Exact(r) => Complex64::new(r.to_f64().unwrap_or(f64::NAN), 0.0),
            QScalar::Float(c) => *c,
        }
    }

    /// `|x|^2`, exact for rationals.
    pub fn norm_sqr(&self) -> QScalar {
        match self {
            QScalar::Exact(r) => QScalar::Exact(r * r),
            QScalar::Float(c) => QScalar::Float(Complex64::new(c.norm_sqr(), 0.0)),
        }
    }

    pub fn norm_sqr_f64(&self) -> f64 {
        match self {
            QScalar::Exact(r) => r.norm_sqr_f64(),
            QScalar::Float(c) => c.norm_sqr(),
        }
    }

    pub fn conj(&self) -> QScalar {
        match self {
            QScalar::Exact(r) => QScalar::Exact(r.clone()),
            QScalar::Float(c) => QScalar::Float(c.conj()),
        }
    }

    /// Product, promoting to complex if the backends differ.
    pub fn mul(&self, other: &QScalar) -> QScalar {
        match (self, other) {
            (QScalar::Exact(a), QScalar::Exact(b)) => QScalar::Exact(a * b),
            _ => QScalar::Float(self.to_complex() * other.to_complex()),
        }
    }

    /// Equality with an absolute tolerance on the float side; exact otherwise.
    pub fn approx_eq(&self, other: &QScalar, tol: f64) -> bool {
        match (self, other) {
            (QScalar::Exact(a), QScalar::Exact(b)) => a == b,
            _ => (self.to_complex() - other.to_complex()).norm() <= tol,
        }
    }

    /// Relative distance `|a-b| / max(|a|,|b|)`, 0 when both vanish.
    pub fn relative_diff(&self, other: &QScalar) -> f64 {
        let a = self.to_complex();
        let b = other.to_complex();
        let scale = a.norm().max(b.norm());
        if scale == 0.0 {
            0.0
        } else {
            (a - b).norm() / scale
        }
    }

    /// Parse either `"num/den"`, an integer, or `"re,im"`.
    pub fn parse(text: &str) -> Result<QScalar> {
        let t = text.trim();
        if let Some((re, im)) = t.split_once(',') {
            let re: f64 = re
                .trim()
                .trim_start_matches('[')
                .parse()
                .map_err(|_| bad_scalar(t))?;
            let im: f64 = im
                .trim()
                .trim_end_matches(']')
                .parse()
                .map_err(|_| bad_scalar(t))?;
            return Ok(QScalar::Float(Complex64::new(re, im)));
        }
        let (num, den) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let num: BigInt = num.parse().map_err(|_| bad_scalar(t))?;
        let den: BigInt = den.parse().map_err(|_| bad_scalar(t))?;
        if den.is_zero() {
            return Err(bad_scalar(t));
        }
        Ok(QScalar::Exact(BigRational::new(num, den)))
    }
}

fn bad_scalar(t: &str) -> Error {
    Error::Parse(format!("not a scalar: {t:?}"))
}

impl fmt::Display for QScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QScalar::Exact(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            QScalar::Float(c) => write!(f, "[{:e}, {:e}]", c.re, c.im),
        }
    }
}

impl Serialize for QScalar {
    fn serialize<Se: Serializer>(&self, s: Se) -> std::result::Result<Se::Ok, Se::Error> {
        match self {
            QScalar::Exact(_) => s.serialize_str(&self.to_string()),
            QScalar::Float(c) => [c.re, c.im].serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for QScalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Pair([f64; 2]),
        }
        match Raw::deserialize(d)? {
            Raw::Text(t) => QScalar::parse(&t).map_err(serde::de::Error::custom),
            Raw::Pair([re, im]) => Ok(QScalar::Float(Complex64::new(re, im))),
        }
    }
}
