//! Numeric instantiation of the mixed-mean inequality
//! `N(M_{F_1}(x), …, M_{F_k}(x)) <= M(N_{G_1}(x), …, N_{G_m}(x))`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::Rational;
use serde::{Deserialize, Serialize};

use crate::distributions::{dist_from_weights, verify_transition, DistSequence, TransitionMatrix};
use crate::error::{Error, Result};
use crate::means::{evaluate_mean, evaluate_weighted, MeanSpec, WeightFunction};
use crate::solver::solve_transition;

/// Relative tolerance on the slack.
pub const TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IjStatus {
    IsPair,
    NotPair,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IJPairVerdict {
    pub status: IjStatus,
    pub criterion: String,
}

impl IJPairVerdict {
    fn decided(holds: bool, criterion: &str) -> Self {
        IJPairVerdict {
            status: if holds {
                IjStatus::IsPair
            } else {
                IjStatus::NotPair
            },
            criterion: criterion.into(),
        }
    }
}

const POWER_RULE: &str = "power means (P_p, P_q): pair iff p <= q";
const GINI_RULE: &str =
    "Gini means (G_{p,q}, G_{r,s}): pair iff pqrs = 0 and min(p,q) <= min(r,s) <= max(p,q) <= max(r,s)";

fn gini_params(spec: &MeanSpec) -> Option<(Rational, Rational)> {
    match spec {
        MeanSpec::Gini(p, q) => Some((p.clone(), q.clone())),
        MeanSpec::Power(p) => Some((p.clone(), Rational::new())),
        _ => None,
    }
}

/// Decides whether `(M, N)` is an Ingham–Jessen pair by the known criteria.
/// Quasiarithmetic means with power or log generators are treated as the
/// power means they equal, and `P_p` as `G_{p,0}` against a Gini mean.
pub fn is_ij_pair(m: &MeanSpec, n: &MeanSpec) -> IJPairVerdict {
    let (m, n) = (m.canonical(), n.canonical());
    match (&m, &n) {
        (MeanSpec::Min, _) => IJPairVerdict::decided(
            true,
            "M = min: N(min of rows) <= N(column) for every column",
        ),
        (_, MeanSpec::Max) => {
            IJPairVerdict::decided(true, "N = max: M(row) <= M(column maxima) for every row")
        }
        (MeanSpec::Power(p), MeanSpec::Power(q)) => IJPairVerdict::decided(p <= q, POWER_RULE),
        _ => match (gini_params(&m), gini_params(&n)) {
            (Some((p, q)), Some((r, s))) => {
                let product_zero = p == 0 || q == 0 || r == 0 || s == 0;
                let (lo_m, hi_m) = if p <= q { (p, q) } else { (q, p) };
                let (lo_n, hi_n) = if r <= s { (r, s) } else { (s, r) };
                let chain = lo_m <= lo_n && lo_n <= hi_m && hi_m <= hi_n;
                IJPairVerdict::decided(product_zero && chain, GINI_RULE)
            }
            _ => IJPairVerdict {
                status: IjStatus::Unknown,
                criterion: "no criterion covers this combination".into(),
            },
        },
    }
}

/// Relative-tolerance test on `rhs − lhs`.
pub fn within_tolerance(lhs: f64, rhs: f64) -> bool {
    rhs - lhs >= -TOLERANCE * scale(lhs, rhs)
}

fn scale(lhs: f64, rhs: f64) -> f64 {
    lhs.abs().max(rhs.abs()).max(1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`.
    pub slack: f64,
    pub holds: bool,
    pub x: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub families: Option<String>,
}

impl InequalityReport {
    /// `slack / max(|lhs|, |rhs|, 1)`.
    pub fn relative_slack(&self) -> f64 {
        self.slack / scale(self.lhs, self.rhs)
    }
}

fn check_lengths(f: &[WeightFunction], g: &[WeightFunction], n: usize) -> Result<()> {
    if f.is_empty() || g.is_empty() {
        return Err(Error::EmptyInput);
    }
    match f.iter().chain(g).find(|w| w.len() != n) {
        Some(w) => Err(Error::LengthMismatch {
            expected: n,
            actual: w.len(),
        }),
        None => Ok(()),
    }
}

/// Evaluates both sides at `x`.
pub fn check_mixed_inequality(
    m: &MeanSpec,
    n: &MeanSpec,
    f: &[WeightFunction],
    g: &[WeightFunction],
    x: &[f64],
) -> Result<InequalityReport> {
    check_lengths(f, g, x.len())?;
    let inner = f
        .iter()
        .map(|w| evaluate_weighted(m, w, x))
        .collect::<Result<Vec<_>>>()?;
    let outer = g
        .iter()
        .map(|w| evaluate_weighted(n, w, x))
        .collect::<Result<Vec<_>>>()?;
    let lhs = evaluate_mean(n, &inner)?;
    let rhs = evaluate_mean(m, &outer)?;
    Ok(InequalityReport {
        lhs,
        rhs,
        slack: rhs - lhs,
        holds: within_tolerance(lhs, rhs),
        x: x.to_vec(),
        seed: None,
        families: None,
    })
}

/// Seeded log-uniform sampler: sample `i` draws every coordinate from
/// `exp(U[ln low, ln high])` using ChaCha8 stream `i` of `seed`, so samples
/// are independent of evaluation order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sampler {
    pub count: usize,
    pub seed: u64,
    pub low: f64,
    pub high: f64,
}

impl Sampler {
    pub fn new(count: usize, seed: u64) -> Self {
        Sampler {
            count,
            seed,
            low: 1e-3,
            high: 1e3,
        }
    }

    pub fn sample(&self, index: usize, n: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        let (a, b) = (self.low.ln(), self.high.ln());
        (0..n).map(|_| rng.random_range(a..=b).exp()).collect()
    }

    fn check(&self) -> Result<()> {
        if !(self.low > 0.0 && self.low <= self.high && self.high.is_finite()) {
            return Err(Error::OutOfRange(format!(
                "sampler range [{}, {}] must satisfy 0 < low <= high < inf",
                self.low, self.high
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub count: usize,
    pub failures: usize,
    /// Smallest relative slack `(rhs − lhs) / max(|lhs|, |rhs|, 1)`.
    pub min_slack: f64,
    pub argmin_x: Vec<f64>,
    pub seed: u64,
    pub pair: IJPairVerdict,
}

/// Runs [`check_mixed_inequality`] on `sampler.count` seeded vectors.
///
/// `(M, N)` must be a known Ingham–Jessen pair unless `force` is set, and
/// `(D_F, D_G)` must be conjugated: a supplied certificate is verified
/// exactly, otherwise one is solved for.
pub fn random_suite(
    m: &MeanSpec,
    n: &MeanSpec,
    f: &[WeightFunction],
    g: &[WeightFunction],
    sampler: &Sampler,
    certificate: Option<&TransitionMatrix>,
    force: bool,
) -> Result<SuiteReport> {
    sampler.check()?;
    let pair = is_ij_pair(m, n);
    if pair.status != IjStatus::IsPair && !force {
        return Err(Error::NotIjPair {
            m: m.to_string(),
            n: n.to_string(),
            reason: pair.criterion,
        });
    }
    let dim = f.first().map_or(0, WeightFunction::len);
    check_lengths(f, g, dim)?;
    let p = DistSequence::new(f.iter().map(dist_from_weights).collect())?;
    let q = DistSequence::new(g.iter().map(dist_from_weights).collect())?;
    let certified = match certificate {
        Some(r) => verify_transition(&p, &q, r).is_ok_and(|c| c.is_valid()),
        None => solve_transition(&p, &q)?.is_feasible(),
    };
    if !certified {
        return Err(Error::UncertifiedFamilies);
    }
    let reports = (0..sampler.count)
        .into_par_iter()
        .map(|i| check_mixed_inequality(m, n, f, g, &sampler.sample(i, dim)))
        .collect::<Result<Vec<_>>>()?;
    let failures = reports.iter().filter(|r| !r.holds).count();
    let worst = reports
        .iter()
        .min_by(|a, b| a.relative_slack().total_cmp(&b.relative_slack()));
    Ok(SuiteReport {
        count: sampler.count,
        failures,
        min_slack: worst.map_or(f64::INFINITY, InequalityReport::relative_slack),
        argmin_x: worst.map(|r| r.x.clone()).unwrap_or_default(),
        seed: sampler.seed,
        pair,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{
        cyclic_profile_explicit, cyclic_weights, kedlaya_transition, kedlaya_weights,
        lift_cyclic_profile,
    };
    use proptest::prelude::*;

    fn mean(text: &str) -> MeanSpec {
        text.parse().unwrap()
    }

    #[test]
    fn pair_examples() {
        assert_eq!(
            is_ij_pair(&MeanSpec::power(0), &MeanSpec::power(1)).status,
            IjStatus::IsPair
        );
        assert_eq!(
            is_ij_pair(&MeanSpec::power(2), &MeanSpec::power(1)).status,
            IjStatus::NotPair
        );
        assert_eq!(
            is_ij_pair(&MeanSpec::gini(0, 1), &MeanSpec::gini(0, 2)).status,
            IjStatus::IsPair
        );
        assert_eq!(
            is_ij_pair(&MeanSpec::gini(1, 2), &MeanSpec::gini(1, 3)).status,
            IjStatus::NotPair
        );
        assert_eq!(
            is_ij_pair(&mean("qa:log"), &mean("qa:power:1")).status,
            IjStatus::IsPair
        );
        assert_eq!(
            is_ij_pair(&MeanSpec::power(-1), &MeanSpec::gini(0, 1)).status,
            IjStatus::IsPair
        );
        assert_eq!(
            is_ij_pair(&MeanSpec::Min, &mean("qa:exp")).status,
            IjStatus::IsPair
        );
        assert_eq!(
            is_ij_pair(&mean("qa:exp"), &MeanSpec::Max).status,
            IjStatus::IsPair
        );
        assert_eq!(
            is_ij_pair(&mean("qa:exp"), &MeanSpec::power(1)).status,
            IjStatus::Unknown
        );
        assert_eq!(
            is_ij_pair(&MeanSpec::Max, &MeanSpec::Min).status,
            IjStatus::Unknown
        );
    }

    fn small_param() -> impl Strategy<Value = Rational> {
        (-6i64..7, 1i64..3).prop_map(|(a, b)| Rational::from((a, b)))
    }

    proptest! {
        #[test]
        fn pair_order_sensitivity(p in small_param(), q in small_param(), r in small_param(), s in small_param()) {
            let cases = [
                (MeanSpec::Power(p.clone()), MeanSpec::Power(q.clone()), p == q),
                (MeanSpec::Gini(p.clone(), q.clone()), MeanSpec::Gini(r.clone(), s.clone()), {
                    let mut a = [p.clone(), q.clone()];
                    let mut b = [r.clone(), s.clone()];
                    a.sort();
                    b.sort();
                    a == b
                }),
            ];
            for (m, n, same) in cases {
                let both = is_ij_pair(&m, &n).status == IjStatus::IsPair
                    && is_ij_pair(&n, &m).status == IjStatus::IsPair;
                if both {
                    prop_assert!(same, "{m} {n}");
                }
            }
        }
    }

    #[test]
    fn kedlaya_two_example() {
        let w = kedlaya_weights(2).unwrap();
        let r = check_mixed_inequality(
            &MeanSpec::power(0),
            &MeanSpec::power(1),
            &w,
            &w,
            &[1.0, 4.0],
        )
        .unwrap();
        assert!((r.lhs - 1.5).abs() < 1e-15);
        assert!((r.rhs - 2.5f64.sqrt()).abs() < 1e-15);
        assert!(r.holds);
    }

    #[test]
    fn degenerations() {
        let one = [WeightFunction::ones(2).unwrap()];
        let r = check_mixed_inequality(
            &MeanSpec::power(0),
            &MeanSpec::power(1),
            &one,
            &one,
            &[1.0, 4.0],
        )
        .unwrap();
        assert!((r.lhs - 2.0).abs() < 1e-15 && (r.rhs - 2.5).abs() < 1e-15 && r.holds);

        let points: Vec<WeightFunction> = (0..3)
            .map(|i| WeightFunction::indicator(3, [i]).unwrap())
            .collect();
        let x = [1.0, 4.0, 9.0];
        let r = check_mixed_inequality(
            &MeanSpec::power(0),
            &MeanSpec::power(1),
            &points,
            &points,
            &x,
        )
        .unwrap();
        assert!((r.lhs - 14.0 / 3.0).abs() < 1e-12);
        assert!((r.rhs - 36f64.cbrt()).abs() < 1e-12);
        assert!(!r.holds);
    }

    #[test]
    fn constant_vector_ties() {
        let w = kedlaya_weights(3).unwrap();
        let specs = [
            "power:0", "power:1", "power:-2", "gini:1,0", "qa:exp", "min", "max",
        ];
        for m in specs {
            for n in specs {
                let r = check_mixed_inequality(&mean(m), &mean(n), &w, &w, &[2.5; 3]).unwrap();
                assert!(
                    (r.lhs - 2.5).abs() < 1e-14 && (r.rhs - 2.5).abs() < 1e-14,
                    "{m} {n}"
                );
            }
        }
    }

    #[test]
    fn input_errors() {
        let w = kedlaya_weights(2).unwrap();
        let (m, n) = (MeanSpec::power(0), MeanSpec::power(1));
        assert!(matches!(
            check_mixed_inequality(&m, &n, &w, &w, &[1.0, 2.0, 3.0]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            check_mixed_inequality(&m, &n, &w, &w, &[1.0, -2.0]),
            Err(Error::NonPositiveInput(_))
        ));
    }

    #[test]
    fn sampler_is_reproducible() {
        let s = Sampler::new(10, 42);
        assert_eq!(s.sample(3, 5), s.sample(3, 5));
        assert_ne!(s.sample(3, 5), s.sample(4, 5));
        assert!(s.sample(0, 100).iter().all(|&v| (1e-3..=1e3).contains(&v)));
    }

    #[test]
    fn cyclic_suite() {
        let profile = cyclic_profile_explicit(7, 3).unwrap();
        let r = lift_cyclic_profile(7, 3, 5, &profile).unwrap();
        let (f, g) = (cyclic_weights(7, 3).unwrap(), cyclic_weights(7, 5).unwrap());
        let sampler = Sampler::new(300, 42);
        let (m, n) = (MeanSpec::power(0), MeanSpec::power(1));
        let report = random_suite(&m, &n, &f, &g, &sampler, Some(&r), false).unwrap();
        assert_eq!(report.failures, 0);
        assert_eq!(
            report,
            random_suite(&m, &n, &f, &g, &sampler, Some(&r), false).unwrap()
        );
        assert_eq!(
            report,
            random_suite(&m, &n, &f, &g, &sampler, None, false).unwrap()
        );
    }

    #[test]
    fn suite_guards() {
        let w = kedlaya_weights(3).unwrap();
        let r = kedlaya_transition(3).unwrap();
        let sampler = Sampler::new(200, 7);
        let (m, n) = (MeanSpec::power(1), MeanSpec::power(0));
        assert!(matches!(
            random_suite(&m, &n, &w, &w, &sampler, Some(&r), false),
            Err(Error::NotIjPair { .. })
        ));
        let reversed = random_suite(&m, &n, &w, &w, &sampler, Some(&r), true).unwrap();
        assert!(reversed.failures > 0);

        let points: Vec<WeightFunction> = (0..3)
            .map(|i| WeightFunction::indicator(3, [i]).unwrap())
            .collect();
        assert!(matches!(
            random_suite(&n, &m, &points, &points, &sampler, None, false),
            Err(Error::UncertifiedFamilies)
        ));
        let transposed = kedlaya_transition(3).unwrap().transpose();
        let forward = random_suite(&n, &m, &w, &w, &sampler, Some(&transposed), false).unwrap();
        assert_eq!(forward.failures, 0);
    }

    #[test]
    fn report_json() {
        let w = kedlaya_weights(2).unwrap();
        let mut r = check_mixed_inequality(
            &MeanSpec::power(1),
            &MeanSpec::power(1),
            &w,
            &w,
            &[1.0, 1.0],
        )
        .unwrap();
        r.seed = Some(3);
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(
            json,
            r#"{"lhs":1.0,"rhs":1.0,"slack":0.0,"holds":true,"x":[1.0,1.0],"seed":3}"#
        );
    }
}
