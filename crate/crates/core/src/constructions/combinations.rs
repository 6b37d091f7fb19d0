use itertools::Itertools;

use crate::distributions::{uniform_on_support, DistSequence, ProbDist, TransitionMatrix};
use crate::error::{Error, Result};
use crate::means::WeightFunction;

fn check_range(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::OutOfRange(format!(
            "need 1 <= k <= n, got n={n}, k={k}"
        )));
    }
    Ok(())
}

/// All `k`-subsets of `{0..n}` as sorted tuples in lexicographic order.
pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0..n).combinations(k).collect()
}

/// Indicators of the `k`-subsets of `N_n`, lexicographically ordered.
pub fn combinations_weights(n: usize, k: usize) -> Result<Vec<WeightFunction>> {
    check_range(n, k)?;
    k_subsets(n, k)
        .into_iter()
        .map(|subset| WeightFunction::indicator(n, subset))
        .collect()
}

/// `C_n^k`: normalized indicators of all `k`-subsets of `N_n`.
pub fn combinations_family(n: usize, k: usize) -> Result<DistSequence> {
    DistSequence::from_weights(&combinations_weights(n, k)?)
}

/// Transition matrix between `C_n^k` and `C_n^l` whose `(i, j)` entry is
/// uniform on the intersection of the `i`-th `k`-subset and the `j`-th
/// `l`-subset. Requires `max(k, l) <= n <= k + l − 1`, which keeps every
/// intersection nonempty.
pub fn combinations_transition(n: usize, k: usize, l: usize) -> Result<TransitionMatrix> {
    check_range(n, k)?;
    check_range(n, l)?;
    if n > k + l - 1 || n < k.max(l) {
        return Err(Error::HypothesisViolated(format!(
            "combinations need max(k,l) <= n <= k+l-1, got n={n}, k={k}, l={l}"
        )));
    }
    let rows = combinations_weights(n, k)?;
    let cols = combinations_weights(n, l)?;
    TransitionMatrix::from_fn(rows.len(), cols.len(), |i, j| {
        let product: Vec<u64> = rows[i]
            .weights()
            .iter()
            .zip(cols[j].weights())
            .map(|(a, b)| a * b)
            .collect();
        Ok::<ProbDist, Error>(uniform_on_support(&WeightFunction::new(product)?))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::verify_transition;
    use crate::rational::{int, rat};

    #[test]
    fn families() {
        let c21 = combinations_family(2, 1).unwrap();
        assert_eq!(c21.get(0).mass(), &[int(1), int(0)]);
        assert_eq!(c21.get(1).mass(), &[int(0), int(1)]);
        let c32 = combinations_family(3, 2).unwrap();
        let expected = [
            [rat(1, 2), rat(1, 2), int(0)],
            [rat(1, 2), int(0), rat(1, 2)],
            [int(0), rat(1, 2), rat(1, 2)],
        ];
        for (d, e) in c32.items().iter().zip(&expected) {
            assert_eq!(d.mass(), e);
        }
        assert_eq!(combinations_family(3, 3).unwrap().items().len(), 1);
        assert!(matches!(
            combinations_family(3, 4),
            Err(Error::OutOfRange(_))
        ));
        assert!(matches!(
            combinations_family(3, 0),
            Err(Error::OutOfRange(_))
        ));
    }

    #[test]
    fn n3_k2_l2_entries() {
        let r = combinations_transition(3, 2, 2).unwrap();
        // ({1,2},{1,3}) intersect in {1}; ({1,2},{1,2}) in {1,2}.
        assert_eq!(r.get(0, 1).mass(), &[int(1), int(0), int(0)]);
        assert_eq!(r.get(0, 0).mass(), &[rat(1, 2), rat(1, 2), int(0)]);
        assert_eq!(r.row_marginal(0), vec![rat(1, 2), rat(1, 2), int(0)]);
    }

    #[test]
    fn hypothesis_is_enforced() {
        assert!(matches!(
            combinations_transition(4, 2, 2),
            Err(Error::HypothesisViolated(_))
        ));
        assert!(matches!(
            combinations_transition(5, 2, 3),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn conjugacy_small() {
        for n in 1..=6 {
            for k in 1..=n {
                for l in 1..=n {
                    if n > k + l - 1 {
                        continue;
                    }
                    let r = combinations_transition(n, k, l).unwrap();
                    let p = combinations_family(n, k).unwrap();
                    let q = combinations_family(n, l).unwrap();
                    assert!(
                        verify_transition(&p, &q, &r).unwrap().is_valid(),
                        "{n} {k} {l}"
                    );
                }
            }
        }
    }
}
