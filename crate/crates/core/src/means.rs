//! Symmetric, repetition-invariant means and their weighted forms `M_F`.
//!
//! Mean values are computed in 128-bit binary floating point and rounded to
//! `f64` at the end. Certificates never depend on these values. Means whose
//! value is a rational function of the inputs (power means of order ±1 and
//! the Gini means with integer parameters one apart) also have an exact path,
//! see [`evaluate_weighted_exact`].

use std::fmt;
use std::str::FromStr;

use rug::ops::Pow;
use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational};

/// Working precision (in bits) of floating mean evaluation.
pub const PRECISION: u32 = 128;

/// Built-in generators `f` of quasiarithmetic means `f⁻¹((Σ f(x_s)) / n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generator {
    /// `π_p(x) = x^p` (`ln x` when `p = 0`).
    Power(Rational),
    Log,
    Exp,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MeanSpec {
    Power(Rational),
    Gini(Rational, Rational),
    QuasiArithmetic(Generator),
    Min,
    Max,
}

impl MeanSpec {
    pub fn power(p: i64) -> Self {
        MeanSpec::Power(Rational::from(p))
    }

    pub fn gini(p: i64, q: i64) -> Self {
        MeanSpec::Gini(Rational::from(p), Rational::from(q))
    }

    /// Rewrites quasiarithmetic means with a power or log generator as the
    /// power mean they coincide with.
    pub fn canonical(&self) -> MeanSpec {
        match self {
            MeanSpec::QuasiArithmetic(Generator::Power(p)) => MeanSpec::Power(p.clone()),
            MeanSpec::QuasiArithmetic(Generator::Log) => MeanSpec::Power(Rational::new()),
            other => other.clone(),
        }
    }

    fn domain(&self) -> Domain {
        match self.canonical() {
            MeanSpec::Power(p) if p > 0 => Domain::NonNegative,
            MeanSpec::Power(_) | MeanSpec::Gini(..) => Domain::Positive,
            _ => Domain::Real,
        }
    }
}

impl fmt::Display for MeanSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeanSpec::Power(p) => write!(f, "power:{}", format_rational(p)),
            MeanSpec::Gini(p, q) => {
                write!(f, "gini:{},{}", format_rational(p), format_rational(q))
            }
            MeanSpec::QuasiArithmetic(Generator::Power(p)) => {
                write!(f, "qa:power:{}", format_rational(p))
            }
            MeanSpec::QuasiArithmetic(Generator::Log) => f.write_str("qa:log"),
            MeanSpec::QuasiArithmetic(Generator::Exp) => f.write_str("qa:exp"),
            MeanSpec::Min => f.write_str("min"),
            MeanSpec::Max => f.write_str("max"),
        }
    }
}

impl FromStr for MeanSpec {
    type Err = Error;

    /// `power:1`, `power:-1/2`, `gini:2,0`, `qa:log`, `qa:exp`, `qa:power:3`,
    /// `min`, `max`.
    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let bad = || Error::Parse(format!("unknown mean {text:?}"));
        let (kind, params) = text.split_once(':').unwrap_or((text, ""));
        match (kind, params) {
            ("min", "") => Ok(MeanSpec::Min),
            ("max", "") => Ok(MeanSpec::Max),
            ("power", p) => Ok(MeanSpec::Power(parse_rational(p)?)),
            ("gini", pq) => {
                let (p, q) = pq.split_once(',').ok_or_else(bad)?;
                Ok(MeanSpec::Gini(parse_rational(p)?, parse_rational(q)?))
            }
            ("qa", "log") => Ok(MeanSpec::QuasiArithmetic(Generator::Log)),
            ("qa", "exp") => Ok(MeanSpec::QuasiArithmetic(Generator::Exp)),
            ("qa", g) => match g.split_once(':') {
                Some(("power", p)) => Ok(MeanSpec::QuasiArithmetic(Generator::Power(
                    parse_rational(p)?,
                ))),
                _ => Err(bad()),
            },
            _ => Err(bad()),
        }
    }
}

/// A non-identically-zero function `N_n → N_0`, stored as its value vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct WeightFunction {
    weights: Vec<u64>,
}

impl WeightFunction {
    pub fn new(weights: Vec<u64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyInput);
        }
        if weights.iter().all(|&w| w == 0) {
            return Err(Error::AllZeroWeights);
        }
        Ok(WeightFunction { weights })
    }

    /// Indicator of `support` (0-based indices) inside `N_n`.
    pub fn indicator(n: usize, support: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut weights = vec![0; n];
        for s in support {
            let slot = weights
                .get_mut(s)
                .ok_or_else(|| Error::OutOfRange(format!("index {s} outside N_{n}")))?;
            *slot = 1;
        }
        WeightFunction::new(weights)
    }

    pub fn ones(n: usize) -> Result<Self> {
        WeightFunction::new(vec![1; n])
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.weights.iter().sum()
    }

    pub fn scaled(&self, factor: u64) -> Result<Self> {
        WeightFunction::new(self.weights.iter().map(|w| w * factor).collect())
    }

    /// `x_s` repeated `F(s)` times.
    pub fn repeat<T: Clone>(&self, x: &[T]) -> Vec<T> {
        self.weights
            .iter()
            .zip(x)
            .flat_map(|(&w, v)| std::iter::repeat_n(v.clone(), w as usize))
            .collect()
    }
}

impl TryFrom<Vec<u64>> for WeightFunction {
    type Error = Error;

    fn try_from(weights: Vec<u64>) -> Result<Self> {
        WeightFunction::new(weights)
    }
}

impl From<WeightFunction> for Vec<u64> {
    fn from(value: WeightFunction) -> Self {
        value.weights
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Domain {
    Real,
    NonNegative,
    Positive,
}

impl Domain {
    fn admits(self, x: f64) -> bool {
        x.is_finite()
            && match self {
                Domain::Real => true,
                Domain::NonNegative => x >= 0.0,
                Domain::Positive => x > 0.0,
            }
    }
}

pub fn evaluate_mean(spec: &MeanSpec, x: &[f64]) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    let pairs: Vec<(u64, f64)> = x.iter().map(|&v| (1, v)).collect();
    evaluate_pairs(spec, &pairs)
}

/// `M_F(x)`: the mean of `x_s` repeated `F(s)` times.
pub fn evaluate_weighted(spec: &MeanSpec, weights: &WeightFunction, x: &[f64]) -> Result<f64> {
    if weights.len() != x.len() {
        return Err(Error::LengthMismatch {
            expected: weights.len(),
            actual: x.len(),
        });
    }
    let pairs: Vec<(u64, f64)> = weights
        .weights()
        .iter()
        .zip(x)
        .filter(|(&w, _)| w > 0)
        .map(|(&w, &v)| (w, v))
        .collect();
    if pairs.is_empty() {
        return Err(Error::AllZeroWeights);
    }
    evaluate_pairs(spec, &pairs)
}

fn evaluate_pairs(spec: &MeanSpec, pairs: &[(u64, f64)]) -> Result<f64> {
    let domain = spec.domain();
    if let Some(&(_, bad)) = pairs.iter().find(|(_, v)| !domain.admits(*v)) {
        return Err(Error::NonPositiveInput(format!(
            "{spec} is undefined at {bad}"
        )));
    }
    let lo = pairs.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let hi = pairs.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let value = match spec.canonical() {
        MeanSpec::Min => return Ok(lo),
        MeanSpec::Max => return Ok(hi),
        MeanSpec::Power(p) => power_mean(&p, pairs),
        MeanSpec::Gini(p, q) => gini_mean(&p, &q, pairs),
        MeanSpec::QuasiArithmetic(Generator::Exp) => {
            let avg = weighted_average(pairs, |x| x.exp());
            avg.ln().to_f64()
        }
        MeanSpec::QuasiArithmetic(_) => unreachable!("canonical form"),
    };
    // Rounding can push the value a hair outside [min, max].
    Ok(value.clamp(lo, hi))
}

fn float(x: f64) -> Float {
    Float::with_val(PRECISION, x)
}

fn weighted_sum(pairs: &[(u64, f64)], f: impl Fn(Float) -> Float) -> Float {
    let mut acc = Float::new(PRECISION);
    for &(w, x) in pairs {
        acc += f(float(x)) * w;
    }
    acc
}

fn weighted_average(pairs: &[(u64, f64)], f: impl Fn(Float) -> Float) -> Float {
    let total: u64 = pairs.iter().map(|p| p.0).sum();
    weighted_sum(pairs, f) / total
}

fn power_mean(p: &Rational, pairs: &[(u64, f64)]) -> f64 {
    if *p == 0 {
        return weighted_average(pairs, |x| x.ln()).exp().to_f64();
    }
    let exponent = Float::with_val(PRECISION, p);
    let avg = weighted_average(pairs, |x| x.pow(&exponent));
    let inverse = Float::with_val(PRECISION, p.clone().recip());
    avg.pow(&inverse).to_f64()
}

/// `(Σ x^p / Σ x^q)^(1/(p−q))`, and `exp(Σ x^p ln x / Σ x^p)` when `p = q`.
fn gini_mean(p: &Rational, q: &Rational, pairs: &[(u64, f64)]) -> f64 {
    let ep = Float::with_val(PRECISION, p);
    if p == q {
        let num = weighted_sum(pairs, |x| {
            let ln = x.clone().ln();
            x.pow(&ep) * ln
        });
        let den = weighted_sum(pairs, |x| x.pow(&ep));
        return (num / den).exp().to_f64();
    }
    let eq = Float::with_val(PRECISION, q);
    let num = weighted_sum(pairs, |x| x.pow(&ep));
    let den = weighted_sum(pairs, |x| x.pow(&eq));
    let inverse = Float::with_val(PRECISION, Rational::from(p - q).recip());
    (num / den).pow(&inverse).to_f64()
}

/// Exact `M_F(x)` over rationals when the mean is a rational function of its
/// arguments; `Ok(None)` for every other mean.
pub fn evaluate_weighted_exact(
    spec: &MeanSpec,
    weights: &WeightFunction,
    x: &[Rational],
) -> Result<Option<Rational>> {
    if weights.len() != x.len() {
        return Err(Error::LengthMismatch {
            expected: weights.len(),
            actual: x.len(),
        });
    }
    let support: Vec<(u64, &Rational)> = weights
        .weights()
        .iter()
        .zip(x)
        .filter(|(&w, _)| w > 0)
        .map(|(&w, v)| (w, v))
        .collect();
    let value = match spec.canonical() {
        MeanSpec::Min => support.iter().map(|p| p.1).min().cloned(),
        MeanSpec::Max => support.iter().map(|p| p.1).max().cloned(),
        MeanSpec::Power(p) => exact_gini(&p, &Rational::new(), &support)?,
        MeanSpec::Gini(p, q) => exact_gini(&p, &q, &support)?,
        MeanSpec::QuasiArithmetic(_) => None,
    };
    Ok(value)
}

fn exact_gini(
    p: &Rational,
    q: &Rational,
    support: &[(u64, &Rational)],
) -> Result<Option<Rational>> {
    let gap = Rational::from(p - q);
    if !(p.is_integer() && q.is_integer() && (gap == 1 || gap == -1)) {
        return Ok(None);
    }
    let (Some(pe), Some(qe)) = (p.numer().to_i32(), q.numer().to_i32()) else {
        return Ok(None);
    };
    if let Some((_, bad)) = support.iter().find(|(_, v)| **v <= 0) {
        return Err(Error::NonPositiveInput(format!(
            "exact mean undefined at {bad}"
        )));
    }
    let moment = |e: i32| {
        support.iter().fold(Rational::new(), |acc, (w, v)| {
            acc + Rational::from((*v).pow(e)) * *w
        })
    };
    let ratio = moment(pe) / moment(qe);
    Ok(Some(if gap == 1 { ratio } else { ratio.recip() }))
}
