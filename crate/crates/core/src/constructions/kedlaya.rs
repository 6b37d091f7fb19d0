use rug::{Integer, Rational};

use crate::distributions::{DistSequence, ProbDist, TransitionMatrix};
use crate::error::{Error, Result};
use crate::means::WeightFunction;

/// Indicators of the prefixes `N_1, …, N_n`.
pub fn kedlaya_weights(n: usize) -> Result<Vec<WeightFunction>> {
    if n == 0 {
        return Err(Error::OutOfRange("n must be at least 1".into()));
    }
    (1..=n)
        .map(|i| WeightFunction::indicator(n, 0..i))
        .collect()
}

/// `((1/i) 1_{N_i})_{i=1..n}`.
pub fn kedlaya_family(n: usize) -> Result<DistSequence> {
    DistSequence::from_weights(&kedlaya_weights(n)?)
}

/// The selfconjugacy certificate of [`kedlaya_family`]:
///
/// ```text
/// r_{i,j}(k) = (n−i)!(n−j)!(i−1)!(j−1)! / ((n−1)!(k−1)!(n−i−j+k)!(i−k)!(j−k)!)
/// ```
///
/// with 1-based `i, j, k`. A term whose denominator would contain the
/// factorial of a negative integer is 0.
pub fn kedlaya_transition(n: usize) -> Result<TransitionMatrix> {
    if n == 0 {
        return Err(Error::OutOfRange("n must be at least 1".into()));
    }
    let fact: Vec<Integer> = std::iter::once(Integer::from(1))
        .chain((1..=n as u32).scan(Integer::from(1), |acc, v| {
            *acc *= v;
            Some(acc.clone())
        }))
        .collect();
    // Out-of-table arguments only occur alongside a negative one.
    let f = |v: i64| -> Option<&Integer> { usize::try_from(v).ok().and_then(|v| fact.get(v)) };
    let n_ = n as i64;
    TransitionMatrix::from_fn(n, n, |i0, j0| {
        let (i, j) = (i0 as i64 + 1, j0 as i64 + 1);
        let mass = (1..=n_)
            .map(|k| {
                let den = [f(n_ - 1), f(k - 1), f(n_ - i - j + k), f(i - k), f(j - k)];
                if den.iter().any(Option::is_none) {
                    return Rational::new();
                }
                let num = Integer::from(&fact[(n_ - i) as usize] * &fact[(n_ - j) as usize])
                    * &fact[(i - 1) as usize]
                    * &fact[(j - 1) as usize];
                let den = den
                    .into_iter()
                    .flatten()
                    .fold(Integer::from(1), |acc, v| acc * v);
                Rational::from((num, den))
            })
            .collect();
        ProbDist::new(mass)
    })
}
