//! Rational probability distributions over `N_n`, sequences of them, and
//! exact verification of transition matrices.
//!
//! Indices are 0-based throughout the API: `P.get(i)` is the `(i+1)`-th
//! distribution of a sequence, and `d.mass()[t]` the mass of the point `t+1`.

use std::fmt;

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::means::WeightFunction;
use crate::rational::{self, lcm_of_denominators, RatStr};

/// An element of `Π_n(Q)`: nonnegative rationals summing to exactly 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<RatStr>", into = "Vec<RatStr>")]
pub struct ProbDist {
    mass: Vec<Rational>,
}

impl ProbDist {
    pub fn new(mass: Vec<Rational>) -> Result<Self> {
        if mass.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some(t) = mass.iter().position(|m| *m < 0) {
            return Err(Error::InvalidDistribution(format!(
                "negative mass {} at {t}",
                mass[t]
            )));
        }
        let total: Rational = mass.iter().sum();
        if total != 1 {
            return Err(Error::InvalidDistribution(format!("masses sum to {total}")));
        }
        Ok(ProbDist { mass })
    }

    pub fn point_mass(n: usize, at: usize) -> Result<Self> {
        if at >= n {
            return Err(Error::OutOfRange(format!("point {at} outside N_{n}")));
        }
        let mut mass = vec![Rational::new(); n];
        mass[at] = Rational::from(1);
        Ok(ProbDist { mass })
    }

    /// Uniform distribution on `support` (0-based, duplicates ignored).
    pub fn uniform_on(n: usize, support: impl IntoIterator<Item = usize>) -> Result<Self> {
        let indicator = WeightFunction::indicator(n, support)?;
        Ok(uniform_on_support(&indicator))
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn mass(&self) -> &[Rational] {
        &self.mass
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.mass
            .iter()
            .enumerate()
            .filter(|(_, m)| **m > 0)
            .map(|(t, _)| t)
    }

    /// The smallest integer weight function `W` with `D_W = self`.
    pub fn to_weights(&self) -> Result<WeightFunction> {
        let scale = lcm_of_denominators(&self.mass);
        let scaled: Vec<Integer> = self
            .mass
            .iter()
            .map(|m| m.numer() * Integer::from(&scale / m.denom()))
            .collect();
        let gcd = scaled.iter().fold(Integer::new(), |acc, v| acc.gcd(v));
        let weights = scaled
            .into_iter()
            .map(|v| {
                (v / &gcd)
                    .to_u64()
                    .ok_or_else(|| Error::OutOfRange("weight exceeds u64".into()))
            })
            .collect::<Result<Vec<u64>>>()?;
        WeightFunction::new(weights)
    }
}

impl TryFrom<Vec<RatStr>> for ProbDist {
    type Error = Error;

    fn try_from(raw: Vec<RatStr>) -> Result<Self> {
        ProbDist::new(raw.into_iter().map(Rational::from).collect())
    }
}

impl From<ProbDist> for Vec<RatStr> {
    fn from(value: ProbDist) -> Self {
        value.mass.into_iter().map(RatStr).collect()
    }
}

impl fmt::Display for ProbDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (t, m) in self.mass.iter().enumerate() {
            if t > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str(")")
    }
}

/// `D_W`: entry `s` is `W(s) / ΣW`.
pub fn dist_from_weights(weights: &WeightFunction) -> ProbDist {
    let total = weights.total();
    let mass = weights
        .weights()
        .iter()
        .map(|&w| Rational::from((w, total)))
        .collect();
    ProbDist { mass }
}

/// Mass `1/|supp W|` on every `s` with `W(s) > 0`.
pub fn uniform_on_support(weights: &WeightFunction) -> ProbDist {
    let size = weights.weights().iter().filter(|&&w| w > 0).count() as u64;
    let mass = weights
        .weights()
        .iter()
        .map(|&w| {
            if w > 0 {
                Rational::from((1, size))
            } else {
                Rational::new()
            }
        })
        .collect();
    ProbDist { mass }
}

/// A nonempty sequence of distributions over a common `N_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<ProbDist>", into = "Vec<ProbDist>")]
pub struct DistSequence {
    items: Vec<ProbDist>,
}

impl DistSequence {
    pub fn new(items: Vec<ProbDist>) -> Result<Self> {
        let first = items.first().ok_or(Error::EmptyInput)?;
        let n = first.len();
        if let Some(bad) = items.iter().position(|d| d.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "item {bad} has {} points, expected {n}",
                items[bad].len()
            )));
        }
        Ok(DistSequence { items })
    }

    pub fn from_weights(weights: &[WeightFunction]) -> Result<Self> {
        DistSequence::new(weights.iter().map(dist_from_weights).collect())
    }

    pub fn n(&self) -> usize {
        self.items[0].len()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, i: usize) -> &ProbDist {
        &self.items[i]
    }

    pub fn items(&self) -> &[ProbDist] {
        &self.items
    }

    /// `(1/k) Σ_i P_i`.
    pub fn average(&self) -> Vec<Rational> {
        let k = self.items.len() as u64;
        (0..self.n())
            .map(|t| {
                let sum: Rational = self.items.iter().map(|d| &d.mass[t]).sum();
                sum / k
            })
            .collect()
    }

    /// Minimal integer weight functions `F_i` with `D_{F_i} = P_i`.
    pub fn to_weights(&self) -> Result<Vec<WeightFunction>> {
        self.items.iter().map(ProbDist::to_weights).collect()
    }
}

impl TryFrom<Vec<ProbDist>> for DistSequence {
    type Error = Error;

    fn try_from(items: Vec<ProbDist>) -> Result<Self> {
        DistSequence::new(items)
    }
}

impl From<DistSequence> for Vec<ProbDist> {
    fn from(value: DistSequence) -> Self {
        value.items
    }
}

/// A `k × m` grid of distributions over a common `N_n`, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<ProbDist>>", into = "Vec<Vec<ProbDist>>")]
pub struct TransitionMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<ProbDist>,
}

impl TransitionMatrix {
    pub fn new(grid: Vec<Vec<ProbDist>>) -> Result<Self> {
        let rows = grid.len();
        let cols = grid.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyInput);
        }
        if let Some(bad) = grid.iter().position(|row| row.len() != cols) {
            return Err(Error::DimensionMismatch(format!(
                "row {bad} has {} entries, expected {cols}",
                grid[bad].len()
            )));
        }
        let entries: Vec<ProbDist> = grid.into_iter().flatten().collect();
        let n = entries[0].len();
        if entries.iter().any(|d| d.len() != n) {
            return Err(Error::DimensionMismatch(
                "entries are distributions over different N_n".into(),
            ));
        }
        Ok(TransitionMatrix {
            rows,
            cols,
            entries,
        })
    }

    /// Builds a `rows × cols` matrix from `entry(i, j)`.
    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut entry: impl FnMut(usize, usize) -> Result<ProbDist>,
    ) -> Result<Self> {
        let grid = (0..rows)
            .map(|i| (0..cols).map(|j| entry(i, j)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        TransitionMatrix::new(grid)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn n(&self) -> usize {
        self.entries[0].len()
    }

    pub fn get(&self, i: usize, j: usize) -> &ProbDist {
        &self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> impl Iterator<Item = &ProbDist> {
        self.entries.iter()
    }

    /// `(1/m) Σ_j R_{i,j}`.
    pub fn row_marginal(&self, i: usize) -> Vec<Rational> {
        let m = self.cols as u64;
        (0..self.n())
            .map(|t| {
                let sum: Rational = (0..self.cols).map(|j| &self.get(i, j).mass[t]).sum();
                sum / m
            })
            .collect()
    }

    /// `(1/k) Σ_i R_{i,j}`.
    pub fn col_marginal(&self, j: usize) -> Vec<Rational> {
        let k = self.rows as u64;
        (0..self.n())
            .map(|t| {
                let sum: Rational = (0..self.rows).map(|i| &self.get(i, j).mass[t]).sum();
                sum / k
            })
            .collect()
    }

    pub fn row_marginals(&self) -> Result<DistSequence> {
        DistSequence::new(
            (0..self.rows)
                .map(|i| ProbDist::new(self.row_marginal(i)))
                .collect::<Result<_>>()?,
        )
    }

    pub fn col_marginals(&self) -> Result<DistSequence> {
        DistSequence::new(
            (0..self.cols)
                .map(|j| ProbDist::new(self.col_marginal(j)))
                .collect::<Result<_>>()?,
        )
    }

    /// The `m × k` matrix with `R^T_{j,i} = R_{i,j}`, a transition between
    /// the swapped pair.
    pub fn transpose(&self) -> TransitionMatrix {
        let entries = (0..self.cols)
            .flat_map(|j| (0..self.rows).map(move |i| (i, j)))
            .map(|(i, j)| self.get(i, j).clone())
            .collect();
        TransitionMatrix {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    pub fn to_grid(&self) -> Vec<Vec<ProbDist>> {
        self.entries
            .chunks(self.cols)
            .map(|row| row.to_vec())
            .collect()
    }

    /// One line per row, one cell per distribution, masses joined by `|`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.entries.chunks(self.cols) {
            let cells: Vec<String> = row
                .iter()
                .map(|d| {
                    d.mass
                        .iter()
                        .map(rational::format_rational)
                        .collect::<Vec<_>>()
                        .join("|")
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let grid = text
            .lines()
            .filter(|line| !line.trim().is_empty())
            .map(|line| {
                line.split(',')
                    .map(|cell| {
                        let mass = cell
                            .split('|')
                            .map(rational::parse_rational)
                            .collect::<Result<Vec<_>>>()?;
                        ProbDist::new(mass)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        TransitionMatrix::new(grid)
    }
}

impl TryFrom<Vec<Vec<ProbDist>>> for TransitionMatrix {
    type Error = Error;

    fn try_from(grid: Vec<Vec<ProbDist>>) -> Result<Self> {
        TransitionMatrix::new(grid)
    }
}

impl From<TransitionMatrix> for Vec<Vec<ProbDist>> {
    fn from(value: TransitionMatrix) -> Self {
        value.to_grid()
    }
}

/// Where an exact identity failed. All indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Location {
    /// `P_i(t) = (1/m) Σ_j R_{i,j}(t)`.
    RowMarginal { i: usize, t: usize },
    /// `Q_j(t) = (1/k) Σ_i R_{i,j}(t)`.
    ColumnMarginal { j: usize, t: usize },
    /// A profile entry is negative.
    ProfileEntry { i: usize, j: usize },
    /// Profile condition (i): column `j` sums to 1.
    ProfileColumnSum { j: usize },
    /// Profile condition (ii): row `i` sums to `n/k`.
    ProfileRowSum { i: usize },
    /// Profile condition (iii): the `j`-th wrapped diagonal sums to `n/l` or 0.
    ProfileDiagonal { j: usize },
    /// Count of symbol `s` in expansion row `row`.
    ExpansionRow { row: usize, s: usize },
    /// Count of symbol `s` in expansion column `col`.
    ExpansionColumn { col: usize, s: usize },
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::RowMarginal { i, t } => write!(f, "P[{i}]({t})"),
            Location::ColumnMarginal { j, t } => write!(f, "Q[{j}]({t})"),
            Location::ProfileEntry { i, j } => write!(f, "A[{i},{j}] >= 0"),
            Location::ProfileColumnSum { j } => write!(f, "column {j} sum"),
            Location::ProfileRowSum { i } => write!(f, "row {i} sum"),
            Location::ProfileDiagonal { j } => write!(f, "diagonal {j} sum"),
            Location::ExpansionRow { row, s } => write!(f, "count of {s} in row {row}"),
            Location::ExpansionColumn { col, s } => write!(f, "count of {s} in column {col}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub location: Location,
    #[serde(with = "rational::one")]
    pub expected: Rational,
    #[serde(with = "rational::one")]
    pub actual: Rational,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: expected {}, got {}",
            self.location, self.expected, self.actual
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Valid,
    Invalid,
}

/// Outcome of an exact verifier; valid iff no failures were recorded.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawCertificate")]
pub struct Certificate {
    verdict: Verdict,
    failures: Vec<Failure>,
}

#[derive(Deserialize)]
struct RawCertificate {
    verdict: Verdict,
    failures: Vec<Failure>,
}

impl TryFrom<RawCertificate> for Certificate {
    type Error = Error;

    fn try_from(raw: RawCertificate) -> Result<Self> {
        let cert = Certificate::from_failures(raw.failures);
        if cert.verdict != raw.verdict {
            return Err(Error::Parse("verdict disagrees with failure list".into()));
        }
        Ok(cert)
    }
}

impl Certificate {
    pub fn from_failures(failures: Vec<Failure>) -> Self {
        let verdict = if failures.is_empty() {
            Verdict::Valid
        } else {
            Verdict::Invalid
        };
        Certificate { verdict, failures }
    }

    pub fn verdict(&self) -> Verdict {
        self.verdict
    }

    pub fn is_valid(&self) -> bool {
        self.verdict == Verdict::Valid
    }

    pub fn failures(&self) -> &[Failure] {
        &self.failures
    }
}

/// Collects a failure whenever `actual != expected`.
pub(crate) fn check(
    failures: &mut Vec<Failure>,
    location: Location,
    expected: Rational,
    actual: Rational,
) {
    if expected != actual {
        failures.push(Failure {
            location,
            expected,
            actual,
        });
    }
}

/// Checks `P_i = (1/m) Σ_j R_{i,j}` and `Q_j = (1/k) Σ_i R_{i,j}` exactly.
pub fn verify_transition(
    p: &DistSequence,
    q: &DistSequence,
    r: &TransitionMatrix,
) -> Result<Certificate> {
    if r.rows() != p.len() || r.cols() != q.len() {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{}, sequences have lengths {} and {}",
            r.rows(),
            r.cols(),
            p.len(),
            q.len()
        )));
    }
    if p.n() != q.n() || r.n() != p.n() {
        return Err(Error::DimensionMismatch(format!(
            "distributions over N_{}, N_{} and N_{}",
            p.n(),
            q.n(),
            r.n()
        )));
    }
    let mut failures = Vec::new();
    for i in 0..r.rows() {
        for (t, actual) in r.row_marginal(i).into_iter().enumerate() {
            let expected = p.get(i).mass()[t].clone();
            check(
                &mut failures,
                Location::RowMarginal { i, t },
                expected,
                actual,
            );
        }
    }
    for j in 0..r.cols() {
        for (t, actual) in r.col_marginal(j).into_iter().enumerate() {
            let expected = q.get(j).mass()[t].clone();
            check(
                &mut failures,
                Location::ColumnMarginal { j, t },
                expected,
                actual,
            );
        }
    }
    Ok(Certificate::from_failures(failures))
}

/// `(1/k) Σ P_i = (1/m) Σ Q_j`, necessary for conjugacy.
pub fn necessary_condition(p: &DistSequence, q: &DistSequence) -> Result<bool> {
    if p.n() != q.n() {
        return Err(Error::DimensionMismatch(format!(
            "distributions over N_{} and N_{}",
            p.n(),
            q.n()
        )));
    }
    Ok(p.average() == q.average())
}
