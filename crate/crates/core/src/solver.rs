//! Exact feasibility of `{A x = b, x >= 0}` over the rationals.
//!
//! The solver is a phase-1 simplex on a dense tableau with one artificial
//! variable per equality, Bland's smallest-index rule for both entering and
//! leaving variables, and no floating point anywhere. A feasible outcome is a
//! basic solution; an infeasible one carries the (strictly positive) optimal
//! sum of artificials.

use rug::Rational;
use serde::{Deserialize, Serialize};

use crate::constructions::{cyclic_family, ProfileMatrix};
use crate::distributions::{DistSequence, ProbDist, TransitionMatrix};
use crate::error::{Error, Result};
use crate::rational;

/// `Σ coef · x_var = rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equality {
    pub terms: Vec<(usize, Rational)>,
    pub rhs: Rational,
}

/// Equalities over `num_vars` nonnegative variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearSystem {
    num_vars: usize,
    equalities: Vec<Equality>,
}

impl LinearSystem {
    pub fn new(num_vars: usize) -> Self {
        LinearSystem {
            num_vars,
            equalities: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn equalities(&self) -> &[Equality] {
        &self.equalities
    }

    /// Appends an equality. Repeated variables are summed; zero coefficients
    /// are dropped.
    pub fn add_equality(
        &mut self,
        terms: impl IntoIterator<Item = (usize, Rational)>,
        rhs: Rational,
    ) -> Result<()> {
        let mut merged: Vec<(usize, Rational)> = Vec::new();
        for (var, coef) in terms {
            if var >= self.num_vars {
                return Err(Error::OutOfRange(format!(
                    "variable {var} is not declared (system has {})",
                    self.num_vars
                )));
            }
            match merged.iter_mut().find(|(v, _)| *v == var) {
                Some((_, c)) => *c += coef,
                None => merged.push((var, coef)),
            }
        }
        merged.retain(|(_, c)| *c != 0);
        merged.sort_by_key(|(v, _)| *v);
        self.equalities.push(Equality { terms: merged, rhs });
        Ok(())
    }

    /// Exact check of every equality and of nonnegativity.
    pub fn is_satisfied_by(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars
            && x.iter().all(|v| *v >= 0)
            && self.equalities.iter().all(|eq| {
                let lhs: Rational = eq
                    .terms
                    .iter()
                    .map(|(v, c)| Rational::from(c * &x[*v]))
                    .sum();
                lhs == eq.rhs
            })
    }
}

/// Result of a feasibility solve, generic over the certificate shape.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Solved<T> {
    Feasible {
        certificate: T,
    },
    Infeasible {
        #[serde(with = "rational::one")]
        phase_one_optimum: Rational,
    },
}

impl<T> Solved<T> {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Solved::Feasible { .. })
    }

    pub fn feasible(self) -> Option<T> {
        match self {
            Solved::Feasible { certificate } => Some(certificate),
            Solved::Infeasible { .. } => None,
        }
    }

    fn map<U>(self, f: impl FnOnce(T) -> Result<U>) -> Result<Solved<U>> {
        Ok(match self {
            Solved::Feasible { certificate } => Solved::Feasible {
                certificate: f(certificate)?,
            },
            Solved::Infeasible { phase_one_optimum } => Solved::Infeasible { phase_one_optimum },
        })
    }
}

/// Assignment to the variables of a [`LinearSystem`], or infeasibility.
pub type SolveOutcome = Solved<Vec<Rational>>;

struct Tableau {
    /// `rows[r]` holds the coefficients of the original variables followed
    /// by the right-hand side.
    rows: Vec<Vec<Rational>>,
    /// Reduced costs of the original variables, then minus the objective.
    cost: Vec<Rational>,
    /// Basic variable of each row; `num_vars + r` is the artificial of row `r`.
    basis: Vec<usize>,
    num_vars: usize,
}

impl Tableau {
    fn new(sys: &LinearSystem) -> Self {
        let n = sys.num_vars;
        let width = n + 1;
        let mut rows = Vec::with_capacity(sys.equalities.len());
        for eq in &sys.equalities {
            let mut row = vec![Rational::new(); width];
            let flip = eq.rhs < 0;
            for (v, c) in &eq.terms {
                row[*v] = if flip { Rational::from(-c) } else { c.clone() };
            }
            row[n] = if flip {
                Rational::from(-&eq.rhs)
            } else {
                eq.rhs.clone()
            };
            rows.push(row);
        }
        let mut cost = vec![Rational::new(); width];
        for row in &rows {
            for (c, v) in cost.iter_mut().zip(row) {
                if *v != 0 {
                    *c -= v;
                }
            }
        }
        let basis = (0..rows.len()).map(|r| n + r).collect();
        Tableau {
            rows,
            cost,
            basis,
            num_vars: n,
        }
    }

    fn entering(&self) -> Option<usize> {
        (0..self.num_vars).find(|&j| self.cost[j] < 0)
    }

    fn leaving(&self, col: usize) -> Option<usize> {
        let rhs = self.num_vars;
        let mut best: Option<(usize, Rational)> = None;
        for (r, row) in self.rows.iter().enumerate() {
            if row[col] <= 0 {
                continue;
            }
            let ratio = Rational::from(&row[rhs] / &row[col]);
            let better = match &best {
                None => true,
                Some((b, value)) => {
                    ratio < *value || (ratio == *value && self.basis[r] < self.basis[*b])
                }
            };
            if better {
                best = Some((r, ratio));
            }
        }
        best.map(|(r, _)| r)
    }

    fn pivot(&mut self, p: usize, col: usize) {
        let pivot_value = self.rows[p][col].clone();
        for v in self.rows[p].iter_mut() {
            if *v != 0 {
                *v /= &pivot_value;
            }
        }
        let pivot_row = std::mem::take(&mut self.rows[p]);
        let support: Vec<usize> = (0..pivot_row.len())
            .filter(|&c| pivot_row[c] != 0)
            .collect();
        let eliminate = |row: &mut Vec<Rational>| {
            if row[col] == 0 {
                return;
            }
            let factor = row[col].clone();
            for &c in &support {
                let delta = Rational::from(&factor * &pivot_row[c]);
                row[c] -= delta;
            }
        };
        for row in self.rows.iter_mut() {
            if !row.is_empty() {
                eliminate(row);
            }
        }
        eliminate(&mut self.cost);
        self.rows[p] = pivot_row;
        self.basis[p] = col;
    }

    fn run(mut self) -> SolveOutcome {
        while let Some(col) = self.entering() {
            // Phase-1 objective is bounded below by 0, so some ratio exists.
            let p = self
                .leaving(col)
                .expect("phase-1 objective is bounded below");
            self.pivot(p, col);
        }
        let optimum = Rational::from(-&self.cost[self.num_vars]);
        if optimum > 0 {
            return Solved::Infeasible {
                phase_one_optimum: optimum,
            };
        }
        let mut x = vec![Rational::new(); self.num_vars];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if b < self.num_vars {
                x[b] = row[self.num_vars].clone();
            }
        }
        Solved::Feasible { certificate: x }
    }
}

/// Decides feasibility of `sys` exactly. Identical systems give identical
/// outcomes.
pub fn solve_feasibility(sys: &LinearSystem) -> SolveOutcome {
    Tableau::new(sys).run()
}

/// `(i, j, t)` position of a variable in a transition matrix.
pub type Cell = (usize, usize, usize);

/// Builds the conjugacy system for `(P, Q)` over the variables
/// `x_{i,j,t} = R_{i,j}(t)` that can be nonzero, i.e. with `P_i(t) > 0` and
/// `Q_j(t) > 0`. Returns the system and the `(i, j, t)` of each variable.
pub fn transition_system(p: &DistSequence, q: &DistSequence) -> Result<(LinearSystem, Vec<Cell>)> {
    let n = p.n();
    if q.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "left family lives on N_{n}, right family on N_{}",
            q.n()
        )));
    }
    let (k, m) = (p.len(), q.len());
    let mut index = vec![None; k * m * n];
    let mut vars = Vec::new();
    for i in 0..k {
        for j in 0..m {
            for t in 0..n {
                if p.get(i).mass()[t] != 0 && q.get(j).mass()[t] != 0 {
                    index[(i * m + j) * n + t] = Some(vars.len());
                    vars.push((i, j, t));
                }
            }
        }
    }
    let var = |i: usize, j: usize, t: usize| index[(i * m + j) * n + t];
    let one = || Rational::from(1);
    let mut sys = LinearSystem::new(vars.len());
    let mut push = |terms: Vec<(usize, Rational)>, rhs: Rational| -> Result<()> {
        if terms.is_empty() && rhs == 0 {
            return Ok(());
        }
        sys.add_equality(terms, rhs)
    };
    for i in 0..k {
        for j in 0..m {
            let terms = (0..n)
                .filter_map(|t| var(i, j, t))
                .map(|v| (v, one()))
                .collect();
            push(terms, one())?;
        }
    }
    for i in 0..k {
        for t in 0..n {
            let terms = (0..m)
                .filter_map(|j| var(i, j, t))
                .map(|v| (v, one()))
                .collect();
            push(terms, Rational::from(&p.get(i).mass()[t] * m as u64))?;
        }
    }
    for j in 0..m {
        for t in 0..n {
            let terms = (0..k)
                .filter_map(|i| var(i, j, t))
                .map(|v| (v, one()))
                .collect();
            push(terms, Rational::from(&q.get(j).mass()[t] * k as u64))?;
        }
    }
    Ok((sys, vars))
}

/// Finds a transition matrix between `P` and `Q`, or proves none exists.
pub fn solve_transition(p: &DistSequence, q: &DistSequence) -> Result<Solved<TransitionMatrix>> {
    let (sys, vars) = transition_system(p, q)?;
    let n = p.n();
    let m = q.len();
    solve_feasibility(&sys).map(|x| {
        let mut cells = vec![vec![Rational::new(); n]; p.len() * m];
        for ((i, j, t), value) in vars.into_iter().zip(x) {
            cells[i * m + j][t] = value;
        }
        TransitionMatrix::from_fn(p.len(), m, |i, j| {
            ProbDist::new(std::mem::take(&mut cells[i * m + j]))
        })
    })
}

/// The system of conditions (i)–(iii) on a `k × n` profile, variable
/// `A[i][j]` at index `i·n + j`.
pub fn cyclic_profile_system(n: usize, k: usize, l: usize) -> Result<LinearSystem> {
    if k == 0 || k > l || l > n {
        return Err(Error::OutOfRange(format!(
            "need 1 <= k <= l <= n, got n={n}, k={k}, l={l}"
        )));
    }
    let one = || Rational::from(1);
    let mut sys = LinearSystem::new(k * n);
    for j in 0..n {
        sys.add_equality((0..k).map(|i| (i * n + j, one())), one())?;
    }
    for i in 0..k {
        sys.add_equality((0..n).map(|j| (i * n + j, one())), Rational::from((n, k)))?;
    }
    for j in 0..n {
        let rhs = if j < l {
            Rational::from((n, l))
        } else {
            Rational::new()
        };
        sys.add_equality((0..k).map(|i| (i * n + (i + j) % n, one())), rhs)?;
    }
    Ok(sys)
}

/// Finds a profile matrix for `(n, k, l)`, or proves none exists.
pub fn solve_cyclic_profile(n: usize, k: usize, l: usize) -> Result<Solved<ProfileMatrix>> {
    let sys = cyclic_profile_system(n, k, l)?;
    solve_feasibility(&sys).map(|x| {
        let entries = x.chunks(n).map(<[Rational]>::to_vec).collect();
        ProfileMatrix::new(n, k, l, entries)
    })
}

/// Convenience: are `O_n^k` and `O_n^l` conjugated, decided through the full
/// transition system rather than the profile.
pub fn cyclic_families_conjugated(n: usize, k: usize, l: usize) -> Result<bool> {
    Ok(solve_transition(&cyclic_family(n, k)?, &cyclic_family(n, l)?)?.is_feasible())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{combinations_family, kedlaya_family, verify_cyclic_profile};
    use crate::distributions::verify_transition;
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    #[test]
    fn single_variable() {
        let mut sys = LinearSystem::new(1);
        sys.add_equality([(0, int(1))], rat(1, 3)).unwrap();
        let out = solve_feasibility(&sys);
        assert_eq!(
            out,
            Solved::Feasible {
                certificate: vec![rat(1, 3)]
            }
        );
    }

    #[test]
    fn forced_negative_is_infeasible() {
        let mut sys = LinearSystem::new(2);
        sys.add_equality([(0, int(1)), (1, int(1))], int(1))
            .unwrap();
        sys.add_equality([(0, int(1)), (1, int(-1))], int(3))
            .unwrap();
        match solve_feasibility(&sys) {
            Solved::Infeasible { phase_one_optimum } => assert!(phase_one_optimum > 0),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn empty_row_with_nonzero_rhs_is_infeasible() {
        let mut sys = LinearSystem::new(1);
        sys.add_equality([], int(2)).unwrap();
        assert!(!solve_feasibility(&sys).is_feasible());
    }

    #[test]
    fn negative_rhs_and_redundant_rows() {
        let mut sys = LinearSystem::new(3);
        sys.add_equality([(0, int(-1)), (1, int(-1))], int(-2))
            .unwrap();
        sys.add_equality([(0, int(2)), (1, int(2))], int(4))
            .unwrap();
        sys.add_equality([(1, int(1)), (2, int(1))], rat(1, 2))
            .unwrap();
        let x = solve_feasibility(&sys).feasible().unwrap();
        assert!(sys.is_satisfied_by(&x));
    }

    #[test]
    fn undeclared_variable_is_rejected() {
        let mut sys = LinearSystem::new(1);
        assert!(matches!(
            sys.add_equality([(1, int(1))], int(1)),
            Err(Error::OutOfRange(_))
        ));
    }

    #[test]
    fn transition_examples() {
        let d = ProbDist::new(vec![rat(1, 3), rat(2, 3)]).unwrap();
        let single = DistSequence::new(vec![d.clone()]).unwrap();
        let r = solve_transition(&single, &single)
            .unwrap()
            .feasible()
            .unwrap();
        assert_eq!(r.get(0, 0), &d);

        let left = DistSequence::new(vec![ProbDist::point_mass(2, 0).unwrap()]).unwrap();
        let right = DistSequence::new(vec![ProbDist::point_mass(2, 1).unwrap()]).unwrap();
        assert!(!solve_transition(&left, &right).unwrap().is_feasible());

        let k4 = kedlaya_family(4).unwrap();
        let r = solve_transition(&k4, &k4).unwrap().feasible().unwrap();
        assert!(verify_transition(&k4, &k4, &r).unwrap().is_valid());

        let short = DistSequence::new(vec![ProbDist::point_mass(3, 0).unwrap()]).unwrap();
        assert!(matches!(
            solve_transition(&left, &short),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn cyclic_examples() {
        let o73 = cyclic_family(7, 3).unwrap();
        let o75 = cyclic_family(7, 5).unwrap();
        let r = solve_transition(&o73, &o75).unwrap().feasible().unwrap();
        assert!(verify_transition(&o73, &o75, &r).unwrap().is_valid());

        let a = solve_cyclic_profile(7, 4, 5).unwrap().feasible().unwrap();
        assert!(verify_cyclic_profile(7, 4, 5, &a).unwrap().is_valid());
        assert!(!solve_cyclic_profile(4, 2, 2).unwrap().is_feasible());
        assert!(!cyclic_families_conjugated(4, 2, 2).unwrap());

        for n in 1..=5 {
            // The uniform profile is feasible; for n >= 3 it is not a vertex,
            // so the solver may return a different one.
            let a = solve_cyclic_profile(n, n, n).unwrap().feasible().unwrap();
            assert!(verify_cyclic_profile(n, n, n, &a).unwrap().is_valid());
            let uniform = vec![vec![rat(1, n as i64); n]; n];
            let x: Vec<Rational> = uniform.iter().flatten().cloned().collect();
            assert!(cyclic_profile_system(n, n, n).unwrap().is_satisfied_by(&x));
        }
        assert!(matches!(
            solve_cyclic_profile(4, 3, 2),
            Err(Error::OutOfRange(_))
        ));
    }

    #[test]
    fn small_scale_completeness() {
        for n in 1..=6 {
            for k in 1..=n {
                for l in k..=n {
                    let a = solve_cyclic_profile(n, k, l).unwrap();
                    assert_eq!(a.is_feasible(), n < k + l, "{n} {k} {l}");
                    if let Some(a) = a.feasible() {
                        assert!(verify_cyclic_profile(n, k, l, &a).unwrap().is_valid());
                    }
                }
            }
        }
        for n in 1..=4 {
            let family = kedlaya_family(n).unwrap();
            assert!(solve_transition(&family, &family).unwrap().is_feasible());
            for k in 1..=n {
                for l in 1..=n {
                    if n < k + l {
                        let p = combinations_family(n, k).unwrap();
                        let q = combinations_family(n, l).unwrap();
                        let r = solve_transition(&p, &q).unwrap().feasible().unwrap();
                        assert!(verify_transition(&p, &q, &r).unwrap().is_valid());
                    }
                }
            }
        }
    }

    #[test]
    fn deterministic() {
        let p = cyclic_family(6, 3).unwrap();
        let q = cyclic_family(6, 4).unwrap();
        assert_eq!(
            solve_transition(&p, &q).unwrap(),
            solve_transition(&p, &q).unwrap()
        );
    }

    #[test]
    fn outcome_json() {
        let out: Solved<Vec<u8>> = Solved::Infeasible {
            phase_one_optimum: rat(1, 2),
        };
        let json = serde_json::to_string(&out).unwrap();
        assert_eq!(json, r#"{"status":"infeasible","phase_one_optimum":"1/2"}"#);
        assert_eq!(serde_json::from_str::<Solved<Vec<u8>>>(&json).unwrap(), out);
    }

    fn random_system() -> impl Strategy<Value = (LinearSystem, Option<Vec<Rational>>)> {
        (1usize..6, 1usize..5, any::<bool>()).prop_flat_map(|(vars, rows, planted)| {
            (
                proptest::collection::vec(proptest::collection::vec(-3i64..4, vars), rows),
                proptest::collection::vec((0i64..5, 1i64..4), vars),
                proptest::collection::vec(-6i64..7, rows),
            )
                .prop_map(move |(coefs, point, rhs)| {
                    let point: Vec<Rational> = point.iter().map(|&(a, b)| rat(a, b)).collect();
                    let mut sys = LinearSystem::new(vars);
                    for (row, r) in coefs.iter().zip(&rhs) {
                        let terms: Vec<(usize, Rational)> =
                            row.iter().enumerate().map(|(v, &c)| (v, int(c))).collect();
                        let value = if planted {
                            terms
                                .iter()
                                .map(|(v, c)| Rational::from(c * &point[*v]))
                                .sum()
                        } else {
                            int(*r)
                        };
                        sys.add_equality(terms, value).unwrap();
                    }
                    (sys, planted.then_some(point))
                })
        })
    }

    // Brute-force oracle for tiny systems: a feasible system has a basic
    // solution supported on a set of linearly independent columns, so
    // enumerate supports and solve each by Gaussian elimination.
    fn brute_force_feasible(sys: &LinearSystem) -> bool {
        let n = sys.num_vars();
        let rows: Vec<Vec<Rational>> = sys
            .equalities()
            .iter()
            .map(|eq| {
                let mut row = vec![Rational::new(); n + 1];
                for (v, c) in &eq.terms {
                    row[*v] = c.clone();
                }
                row[n] = eq.rhs.clone();
                row
            })
            .collect();
        (0u32..1 << n).any(|mask| {
            let cols: Vec<usize> = (0..n).filter(|v| mask >> v & 1 == 1).collect();
            let mut m: Vec<Vec<Rational>> = rows
                .iter()
                .map(|r| {
                    cols.iter()
                        .map(|&c| r[c].clone())
                        .chain([r[n].clone()])
                        .collect()
                })
                .collect();
            let width = cols.len();
            let mut pivots = Vec::new();
            let mut r0 = 0;
            for c in 0..width {
                let Some(p) = (r0..m.len()).find(|&r| m[r][c] != 0) else {
                    continue;
                };
                m.swap(r0, p);
                let pv = m[r0][c].clone();
                for v in m[r0].iter_mut() {
                    *v /= &pv;
                }
                for r in 0..m.len() {
                    if r != r0 && m[r][c] != 0 {
                        let f = m[r][c].clone();
                        let pivot_row = m[r0].clone();
                        for (cell, p) in m[r].iter_mut().zip(&pivot_row) {
                            *cell -= Rational::from(&f * p);
                        }
                    }
                }
                pivots.push(c);
                r0 += 1;
            }
            if m[r0..].iter().any(|row| row[width] != 0) || pivots.len() != width {
                return false;
            }
            (0..width).all(|r| m[r][width] >= 0)
        })
    }

    proptest! {
        #[test]
        fn agrees_with_brute_force((sys, planted) in random_system()) {
            let out = solve_feasibility(&sys);
            match &out {
                Solved::Feasible { certificate } => prop_assert!(sys.is_satisfied_by(certificate)),
                Solved::Infeasible { phase_one_optimum } => {
                    prop_assert!(*phase_one_optimum > 0);
                    prop_assert!(planted.is_none());
                }
            }
            prop_assert_eq!(out.is_feasible(), brute_force_feasible(&sys));
        }
    }
}
