//! Cyclic window families `O_n^k` and the `k × n` profile matrices that
//! encode rotation-invariant transition matrices between them.
//!
//! Indices are 0-based: item `i` of `O_n^k` is uniform on the window
//! `{i, i+1, …, i+k−1}` taken mod `n`. In this indexing a profile `A` must
//! satisfy
//!
//! * `A[i][j] >= 0`;
//! * (i) every column sums to 1;
//! * (ii) every row sums to `n/k`;
//! * (iii) the wrapped diagonal `Σ_i A[i][(i+j) mod n]` is `n/l` for `j < l`
//!   and 0 for `j >= l`.

use rug::Rational;
use serde::{Deserialize, Serialize};

use super::pochhammer::falling;
use crate::distributions::{
    check, verify_transition, Certificate, DistSequence, Location, ProbDist, TransitionMatrix,
};
use crate::error::{Error, Result};
use crate::means::WeightFunction;
use crate::rational::{self, binomial};

/// Reduces `v` into `0..n`.
pub(crate) fn wrap(n: usize, v: i64) -> usize {
    v.rem_euclid(n as i64) as usize
}

fn check_window(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::OutOfRange(format!(
            "need 1 <= k <= n, got n={n}, k={k}"
        )));
    }
    Ok(())
}

fn check_pair(n: usize, k: usize, l: usize) -> Result<()> {
    if k == 0 || k > l || l > n {
        return Err(Error::OutOfRange(format!(
            "need 1 <= k <= l <= n, got n={n}, k={k}, l={l}"
        )));
    }
    Ok(())
}

/// Indicators of the `n` cyclic windows of length `k`.
pub fn cyclic_weights(n: usize, k: usize) -> Result<Vec<WeightFunction>> {
    check_window(n, k)?;
    (0..n)
        .map(|i| WeightFunction::indicator(n, (i..i + k).map(|s| s % n)))
        .collect()
}

/// `O_n^k`.
pub fn cyclic_family(n: usize, k: usize) -> Result<DistSequence> {
    DistSequence::from_weights(&cyclic_weights(n, k)?)
}

/// A `k × n` rational matrix tagged with the `(n, k, l)` it is meant for.
/// Shape is checked on construction; conditions (i)–(iii) are checked by
/// [`verify_cyclic_profile`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawProfile", into = "RawProfile")]
pub struct ProfileMatrix {
    n: usize,
    k: usize,
    l: usize,
    entries: Vec<Vec<Rational>>,
}

#[derive(Serialize, Deserialize)]
struct RawProfile {
    n: usize,
    k: usize,
    l: usize,
    #[serde(with = "rational::grid")]
    entries: Vec<Vec<Rational>>,
}

impl TryFrom<RawProfile> for ProfileMatrix {
    type Error = Error;

    fn try_from(raw: RawProfile) -> Result<Self> {
        ProfileMatrix::new(raw.n, raw.k, raw.l, raw.entries)
    }
}

impl From<ProfileMatrix> for RawProfile {
    fn from(p: ProfileMatrix) -> Self {
        RawProfile {
            n: p.n,
            k: p.k,
            l: p.l,
            entries: p.entries,
        }
    }
}

impl ProfileMatrix {
    pub fn new(n: usize, k: usize, l: usize, entries: Vec<Vec<Rational>>) -> Result<Self> {
        check_pair(n, k, l)?;
        if entries.len() != k || entries.iter().any(|row| row.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "profile for (n,k,l)=({n},{k},{l}) must be {k}x{n}"
            )));
        }
        Ok(ProfileMatrix { n, k, l, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn entries(&self) -> &[Vec<Rational>] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i][j]
    }

    /// `A[i][j]` with the zero fill for `i >= k`.
    fn filled(&self, i: usize, j: usize) -> Rational {
        self.entries
            .get(i)
            .map_or_else(Rational::new, |row| row[j].clone())
    }

    /// Header line `n,k,l` followed by one comma-separated row per line.
    pub fn to_csv(&self) -> String {
        let mut out = format!("{},{},{}\n", self.n, self.k, self.l);
        for row in &self.entries {
            let cells: Vec<String> = row.iter().map(rational::format_rational).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// The closed-form profile for `l = n − k + 1`:
///
/// ```text
/// A_{i,j} = C(k−1, i−1) · (j−1)↓(i−1) · (n−j)↓(k−i) / (n−1)↓(k−1)
/// ```
///
/// (1-based). When `k > n − k + 1` the roles are swapped, so the returned
/// profile always has `k <= l`.
pub fn cyclic_profile_explicit(n: usize, k: usize) -> Result<ProfileMatrix> {
    check_window(n, k)?;
    let (k, l) = (k.min(n - k + 1), k.max(n - k + 1));
    let denominator = falling(&Rational::from(n - 1), (k - 1) as u32);
    let entries = (1..=k)
        .map(|i| {
            (1..=n)
                .map(|j| {
                    let upper = falling(&Rational::from(j - 1), (i - 1) as u32);
                    let lower = falling(&Rational::from(n - j), (k - i) as u32);
                    Rational::from(binomial((k - 1) as u32, (i - 1) as u32)) * upper * lower
                        / &denominator
                })
                .collect()
        })
        .collect();
    ProfileMatrix::new(n, k, l, entries)
}

/// Checks nonnegativity and conditions (i)–(iii) exactly.
pub fn verify_cyclic_profile(
    n: usize,
    k: usize,
    l: usize,
    profile: &ProfileMatrix,
) -> Result<Certificate> {
    if (profile.n, profile.k, profile.l) != (n, k, l) {
        return Err(Error::DimensionMismatch(format!(
            "profile is for (n,k,l)=({},{},{}), not ({n},{k},{l})",
            profile.n, profile.k, profile.l
        )));
    }
    let a = &profile.entries;
    let mut failures = Vec::new();
    for (i, row) in a.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if *v < 0 {
                check(
                    &mut failures,
                    Location::ProfileEntry { i, j },
                    Rational::new(),
                    v.clone(),
                );
            }
        }
    }
    for j in 0..n {
        let sum: Rational = a.iter().map(|row| &row[j]).sum();
        check(
            &mut failures,
            Location::ProfileColumnSum { j },
            Rational::from(1),
            sum,
        );
    }
    let row_target = Rational::from((n, k));
    for (i, row) in a.iter().enumerate() {
        let sum: Rational = row.iter().sum();
        check(
            &mut failures,
            Location::ProfileRowSum { i },
            row_target.clone(),
            sum,
        );
    }
    let diagonal_target = Rational::from((n, l));
    for j in 0..n {
        let sum: Rational = a.iter().enumerate().map(|(i, row)| &row[(i + j) % n]).sum();
        let expected = if j < l {
            diagonal_target.clone()
        } else {
            Rational::new()
        };
        check(
            &mut failures,
            Location::ProfileDiagonal { j },
            expected,
            sum,
        );
    }
    Ok(Certificate::from_failures(failures))
}

/// Lifts a valid profile to a rotation-invariant transition matrix between
/// `O_n^k` and `O_n^l`:
///
/// ```text
/// R_{i,j}(s) = A[(s − i) mod n][(j − i + l − 1) mod n]
/// ```
///
/// with `A` zero-filled below row `k`.
pub fn lift_cyclic_profile(
    n: usize,
    k: usize,
    l: usize,
    profile: &ProfileMatrix,
) -> Result<TransitionMatrix> {
    let cert = verify_cyclic_profile(n, k, l, profile)?;
    if let Some(first) = cert.failures().first() {
        return Err(Error::InvalidProfile(first.to_string()));
    }
    TransitionMatrix::from_fn(n, n, |i, j| {
        let column = wrap(n, j as i64 - i as i64 + l as i64 - 1);
        let mass = (0..n)
            .map(|s| profile.filled(wrap(n, s as i64 - i as i64), column))
            .collect();
        ProbDist::new(mass)
    })
}

/// The rotation `F(R)_{i,j}(s) = R_{i+1,j+1}(s+1)` (indices mod `n`).
pub fn rotate_transition(r: &TransitionMatrix) -> Result<TransitionMatrix> {
    let n = r.n();
    if r.rows() != n || r.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "rotation needs an {n}x{n} matrix, got {}x{}",
            r.rows(),
            r.cols()
        )));
    }
    TransitionMatrix::from_fn(n, n, |i, j| {
        let source = r.get((i + 1) % n, (j + 1) % n);
        ProbDist::new((0..n).map(|s| source.mass()[(s + 1) % n].clone()).collect())
    })
}

/// Recovers a profile from any transition matrix between `O_n^k` and
/// `O_n^l`: average `R` over all `n` rotations, then read
/// `A[i][j] = q_{0, (j − l + 1) mod n}(i)`.
pub fn extract_cyclic_profile(
    n: usize,
    k: usize,
    l: usize,
    r: &TransitionMatrix,
) -> Result<ProfileMatrix> {
    check_pair(n, k, l)?;
    let p = cyclic_family(n, k)?;
    let q = cyclic_family(n, l)?;
    let cert = verify_transition(&p, &q, r).map_err(|e| Error::NotATransition(e.to_string()))?;
    if let Some(first) = cert.failures().first() {
        return Err(Error::NotATransition(first.to_string()));
    }
    // Only the first row of the rotation average is needed.
    let averaged_first_row = |c: usize, t: usize| -> Rational {
        let sum: Rational = (0..n)
            .map(|alpha| &r.get(alpha, (c + alpha) % n).mass()[(t + alpha) % n])
            .sum();
        sum / n as u64
    };
    let entries = (0..k)
        .map(|i| {
            (0..n)
                .map(|j| averaged_first_row(wrap(n, j as i64 - l as i64 + 1), i))
                .collect()
        })
        .collect();
    ProfileMatrix::new(n, k, l, entries)
}
