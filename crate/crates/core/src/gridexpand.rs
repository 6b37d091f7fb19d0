//! Integer repetition matrices realizing a rational transition matrix.
//!
//! A transition matrix `R` between `(D_{F_i})` and `(D_{G_j})` with common
//! denominator `ℓ` becomes an `ℓk × ℓm` matrix of labels in `N_n`: block
//! `(i, j)` is a doubly balanced `ℓ × ℓ` grid in which label `s` fills
//! `ℓ·R_{i,j}(s)` cells of every row and of every column. Each row of block
//! row `i` then holds `s` in proportion to `F_i(s)`, and each column of block
//! column `j` in proportion to `G_j(s)`.
//!
//! Labels are 1-based (`1..=n`) throughout this module.

use std::fmt;

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::distributions::{
    check, dist_from_weights, verify_transition, Certificate, DistSequence, Location,
    TransitionMatrix,
};
use crate::error::{Error, Result};
use crate::means::{evaluate_mean, MeanSpec, WeightFunction};
use crate::rational::lcm_of_denominators;

/// A `q × q` grid whose cells carry labels `1..=p.len()` or nothing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridPartition {
    pub q: usize,
    pub labels: Vec<Vec<Option<usize>>>,
}

impl GridPartition {
    pub fn is_full(&self) -> bool {
        self.labels.iter().flatten().all(Option::is_some)
    }
}

/// Band construction: in row `r` (0-based) label `k` occupies the `p_k`
/// cyclically consecutive columns starting at `r + 1 + P_{k−1}` (mod `q`),
/// where `P_k = p_1 + … + p_k`.
pub fn proportional_partition(q: usize, p: &[u64]) -> Result<GridPartition> {
    if q == 0 {
        return Err(Error::OutOfRange("grid size q must be positive".into()));
    }
    let sum: u64 = p.iter().sum();
    if sum > q as u64 {
        return Err(Error::OverfullWeights { sum, q: q as u64 });
    }
    let mut labels = vec![vec![None; q]; q];
    for (r, row) in labels.iter_mut().enumerate() {
        let mut start = r + 1;
        for (k, &count) in p.iter().enumerate() {
            for d in 0..count as usize {
                row[(start + d) % q] = Some(k + 1);
            }
            start += count as usize;
        }
    }
    Ok(GridPartition { q, labels })
}

/// `ℓk × ℓm` matrix of labels in `1..=n`; block `(i, j)` is the `ℓ × ℓ`
/// submatrix at rows `iℓ..(i+1)ℓ` and columns `jℓ..(j+1)ℓ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawExpansion", into = "RawExpansion")]
pub struct ExpansionMatrix {
    n: usize,
    ell: usize,
    k: usize,
    m: usize,
    entries: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct RawExpansion {
    n: usize,
    ell: usize,
    k: usize,
    m: usize,
    entries: Vec<Vec<usize>>,
}

impl TryFrom<RawExpansion> for ExpansionMatrix {
    type Error = Error;

    fn try_from(raw: RawExpansion) -> Result<Self> {
        ExpansionMatrix::new(raw.n, raw.ell, raw.k, raw.m, raw.entries)
    }
}

impl From<ExpansionMatrix> for RawExpansion {
    fn from(e: ExpansionMatrix) -> Self {
        RawExpansion {
            n: e.n,
            ell: e.ell,
            k: e.k,
            m: e.m,
            entries: e.entries,
        }
    }
}

impl ExpansionMatrix {
    pub fn new(n: usize, ell: usize, k: usize, m: usize, entries: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 || ell == 0 || k == 0 || m == 0 {
            return Err(Error::OutOfRange("n, ell, k and m must be positive".into()));
        }
        if entries.len() != ell * k || entries.iter().any(|row| row.len() != ell * m) {
            return Err(Error::DimensionMismatch(format!(
                "expansion with ell={ell}, k={k}, m={m} must be {}x{}",
                ell * k,
                ell * m
            )));
        }
        if let Some(bad) = entries.iter().flatten().find(|&&s| s == 0 || s > n) {
            return Err(Error::OutOfRange(format!("label {bad} is outside 1..={n}")));
        }
        Ok(ExpansionMatrix {
            n,
            ell,
            k,
            m,
            entries,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn entries(&self) -> &[Vec<usize>] {
        &self.entries
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.entries[0].len()
    }

    /// `counts[r][s-1]` is the number of cells of row `r` labelled `s`.
    pub fn row_counts(&self) -> Vec<Vec<u64>> {
        self.entries
            .iter()
            .map(|row| {
                let mut counts = vec![0u64; self.n];
                for &s in row {
                    counts[s - 1] += 1;
                }
                counts
            })
            .collect()
    }

    pub fn col_counts(&self) -> Vec<Vec<u64>> {
        let mut counts = vec![vec![0u64; self.n]; self.cols()];
        for row in &self.entries {
            for (c, &s) in row.iter().enumerate() {
                counts[c][s - 1] += 1;
            }
        }
        counts
    }

    /// Number of cells of block `(i, j)` labelled `s`.
    pub fn block_count(&self, i: usize, j: usize, s: usize) -> u64 {
        let ell = self.ell;
        self.entries[i * ell..(i + 1) * ell]
            .iter()
            .flat_map(|row| &row[j * ell..(j + 1) * ell])
            .filter(|&&v| v == s)
            .count() as u64
    }
}

/// Whitespace-aligned integer grid, one matrix row per line.
impl fmt::Display for ExpansionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.n.to_string().len();
        for row in &self.entries {
            let cells: Vec<String> = row.iter().map(|s| format!("{s:>width$}")).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

fn dist_family(weights: &[WeightFunction]) -> Result<DistSequence> {
    DistSequence::new(weights.iter().map(dist_from_weights).collect())
}

/// Expands `R` into an integer repetition matrix with `ℓ` the least common
/// denominator of all masses of `R`.
pub fn expand_transition(
    f: &[WeightFunction],
    g: &[WeightFunction],
    r: &TransitionMatrix,
) -> Result<ExpansionMatrix> {
    let not_transition = |e: Error| Error::NotATransition(e.to_string());
    let p = dist_family(f).map_err(not_transition)?;
    let q = dist_family(g).map_err(not_transition)?;
    let cert = verify_transition(&p, &q, r).map_err(not_transition)?;
    if let Some(first) = cert.failures().first() {
        return Err(Error::NotATransition(first.to_string()));
    }
    let ell_int: Integer = lcm_of_denominators(r.entries().flat_map(|d| d.mass()));
    let ell = ell_int
        .to_usize()
        .ok_or_else(|| Error::OutOfRange(format!("common denominator {ell_int} is too large")))?;
    let (k, m, n) = (r.rows(), r.cols(), r.n());
    let mut entries = vec![vec![0usize; ell * m]; ell * k];
    for i in 0..k {
        for j in 0..m {
            let counts: Vec<u64> = r
                .get(i, j)
                .mass()
                .iter()
                .map(|v| {
                    let scaled = Rational::from(v * &ell_int);
                    scaled.numer().to_u64().expect("count fits in the grid")
                })
                .collect();
            let block = proportional_partition(ell, &counts)?;
            for (a, row) in block.labels.iter().enumerate() {
                for (b, label) in row.iter().enumerate() {
                    entries[i * ell + a][j * ell + b] = label.expect("masses sum to 1");
                }
            }
        }
    }
    ExpansionMatrix::new(n, ell, k, m, entries)
}

fn check_shapes(e: &ExpansionMatrix, f: &[WeightFunction], g: &[WeightFunction]) -> Result<()> {
    if f.len() != e.k || g.len() != e.m {
        return Err(Error::DimensionMismatch(format!(
            "expansion has k={}, m={} but {} F and {} G profiles were given",
            e.k,
            e.m,
            f.len(),
            g.len()
        )));
    }
    if let Some(w) = f.iter().chain(g).find(|w| w.len() != e.n) {
        return Err(Error::DimensionMismatch(format!(
            "weight function of length {} for labels in 1..={}",
            w.len(),
            e.n
        )));
    }
    Ok(())
}

/// Checks the count identities: row `r` of block row `i` holds label `s`
/// exactly `ℓm·F_i(s)/ΣF_i` times, column `c` of block column `j` exactly
/// `ℓk·G_j(s)/ΣG_j` times.
pub fn verify_expansion(
    e: &ExpansionMatrix,
    f: &[WeightFunction],
    g: &[WeightFunction],
) -> Result<Certificate> {
    check_shapes(e, f, g)?;
    let mut failures = Vec::new();
    let expected = |w: &WeightFunction, span: usize, s: usize| {
        Rational::from((span as u64 * w.weights()[s], w.total()))
    };
    for (row, counts) in e.row_counts().iter().enumerate() {
        let w = &f[row / e.ell];
        for (s, &count) in counts.iter().enumerate() {
            check(
                &mut failures,
                Location::ExpansionRow { row, s: s + 1 },
                expected(w, e.ell * e.m, s),
                Rational::from(count),
            );
        }
    }
    for (col, counts) in e.col_counts().iter().enumerate() {
        let w = &g[col / e.ell];
        for (s, &count) in counts.iter().enumerate() {
            check(
                &mut failures,
                Location::ExpansionColumn { col, s: s + 1 },
                expected(w, e.ell * e.k, s),
                Rational::from(count),
            );
        }
    }
    Ok(Certificate::from_failures(failures))
}

/// Both sides of the Ingham–Jessen inequality on `X = (x_{a_{b,c}})`:
/// `(N over rows of M(row), M over columns of N(column))`.
pub fn chained_means(
    e: &ExpansionMatrix,
    inner: &MeanSpec,
    outer: &MeanSpec,
    x: &[f64],
) -> Result<(f64, f64)> {
    if x.len() != e.n {
        return Err(Error::LengthMismatch {
            expected: e.n,
            actual: x.len(),
        });
    }
    let row_values = e
        .entries
        .iter()
        .map(|row| {
            let values: Vec<f64> = row.iter().map(|&s| x[s - 1]).collect();
            evaluate_mean(inner, &values)
        })
        .collect::<Result<Vec<_>>>()?;
    let col_values = (0..e.cols())
        .map(|c| {
            let values: Vec<f64> = e.entries.iter().map(|row| x[row[c] - 1]).collect();
            evaluate_mean(outer, &values)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((
        evaluate_mean(outer, &row_values)?,
        evaluate_mean(inner, &col_values)?,
    ))
}
