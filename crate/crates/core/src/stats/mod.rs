//! Self-contained statistics kernel: Welch's t and ANOVA, Kruskal-Wallis,
//! Dunn's post-hoc comparisons, Holm adjustment, and ordinary least squares.
//!
//! Distribution tails come from [`special`]; nothing here depends on an
//! external statistics library.

mod nonparametric;
pub mod ols;
pub mod special;

pub use nonparametric::{dunn_posthoc, kruskal_wallis, PairwiseComparison, PairwiseTable};
pub use ols::{ols, Matrix, RegressionFit};

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("group {group} is degenerate: {reason}")]
    DegenerateGroup { group: usize, reason: &'static str },
    #[error("need at least {needed} groups, got {got}")]
    TooFewGroups { needed: usize, got: usize },
    #[error("input contains a non-finite value")]
    NonFiniteInput,
    #[error("p-value {0} outside [0, 1]")]
    OutOfRangeP(f64),
    #[error("design matrix is rank deficient at column {0}")]
    RankDeficient(usize),
    #[error("{n} observations cannot support {k} predictors")]
    InsufficientObservations { n: usize, k: usize },
}

/// Degrees of freedom attached to a test statistic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DegreesOfFreedom {
    One(f64),
    Two(f64, f64),
}

impl Serialize for DegreesOfFreedom {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match *self {
            DegreesOfFreedom::One(d) => s.serialize_f64(d),
            DegreesOfFreedom::Two(a, b) => [a, b].serialize(s),
        }
    }
}

/// Outcome of a single hypothesis test.
#[derive(Debug, Clone, Serialize)]
pub struct TestResult {
    pub method: &'static str,
    pub statistic: f64,
    pub df: DegreesOfFreedom,
    pub p_value: f64,
    /// Set when the input admitted no information for the test (e.g. every
    /// pooled observation identical); statistic/p are then reported as 0/1.
    pub degenerate: bool,
}

fn check_finite(values: &[f64]) -> Result<(), StatsError> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(StatsError::NonFiniteInput)
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample variance (n - 1 denominator).
fn sample_var(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() - 1) as f64
}

/// Welch's two-sample t test (unequal variances), two-sided.
///
/// Requires two observations per sample and a positive standard error; a
/// pair of zero-variance samples carries no usable scale and is rejected.
pub fn welch_t(a: &[f64], b: &[f64]) -> Result<TestResult, StatsError> {
    check_finite(a)?;
    check_finite(b)?;
    for (i, s) in [a, b].iter().enumerate() {
        if s.len() < 2 {
            return Err(StatsError::DegenerateGroup {
                group: i,
                reason: "fewer than 2 observations",
            });
        }
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (va, vb) = (sample_var(a), sample_var(b));
    let sa = va / na;
    let sb = vb / nb;
    let se2 = sa + sb;
    if se2 == 0.0 {
        return Err(StatsError::DegenerateGroup {
            group: 0,
            reason: "both samples have zero variance",
        });
    }
    let t = (mean(a) - mean(b)) / se2.sqrt();
    // Welch-Satterthwaite degrees of freedom.
    let df = se2 * se2 / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    Ok(TestResult {
        method: "welch-t",
        statistic: t,
        df: DegreesOfFreedom::One(df),
        p_value: special::t_two_sided_p(t, df),
        degenerate: false,
    })
}

/// Welch's heteroscedastic one-way ANOVA.
///
/// Every group needs at least two observations and positive variance; with
/// two groups the F statistic equals the square of [`welch_t`]'s statistic.
pub fn welch_anova<S: AsRef<[f64]>>(groups: &[S]) -> Result<TestResult, StatsError> {
    let k = groups.len();
    if k < 2 {
        return Err(StatsError::TooFewGroups { needed: 2, got: k });
    }
    let mut w = Vec::with_capacity(k);
    let mut m = Vec::with_capacity(k);
    let mut n = Vec::with_capacity(k);
    for (i, g) in groups.iter().enumerate() {
        let g = g.as_ref();
        check_finite(g)?;
        if g.len() < 2 {
            return Err(StatsError::DegenerateGroup {
                group: i,
                reason: "fewer than 2 observations",
            });
        }
        let v = sample_var(g);
        if v <= 0.0 {
            return Err(StatsError::DegenerateGroup {
                group: i,
                reason: "zero variance",
            });
        }
        n.push(g.len() as f64);
        m.push(mean(g));
        w.push(g.len() as f64 / v);
    }
    let kf = k as f64;
    let w_sum: f64 = w.iter().sum();
    let grand = w.iter().zip(&m).map(|(wi, mi)| wi * mi).sum::<f64>() / w_sum;
    let a = w
        .iter()
        .zip(&m)
        .map(|(wi, mi)| wi * (mi - grand) * (mi - grand))
        .sum::<f64>()
        / (kf - 1.0);
    let lambda: f64 = w
        .iter()
        .zip(&n)
        .map(|(wi, ni)| {
            let d = 1.0 - wi / w_sum;
            d * d / (ni - 1.0)
        })
        .sum();
    let b = 1.0 + 2.0 * (kf - 2.0) / (kf * kf - 1.0) * lambda;
    let f = a / b;
    let df1 = kf - 1.0;
    let df2 = (kf * kf - 1.0) / (3.0 * lambda);
    Ok(TestResult {
        method: "welch-anova",
        statistic: f,
        df: DegreesOfFreedom::Two(df1, df2),
        p_value: special::f_upper_tail_p(f, df1, df2),
        degenerate: false,
    })
}

/// Holm step-down adjustment of a vector of raw p-values.
///
/// The i-th smallest p is multiplied by (m - i + 1), monotonicity is
/// enforced by a running maximum over the sorted order, values are capped
/// at 1, and the result is returned in the original input order.
pub fn holm_adjust(p_values: &[f64]) -> Result<Vec<f64>, StatsError> {
    for &p in p_values {
        if !(0.0..=1.0).contains(&p) {
            return Err(StatsError::OutOfRangeP(p));
        }
    }
    let m = p_values.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| p_values[i].partial_cmp(&p_values[j]).unwrap());
    let mut adjusted = vec![0.0; m];
    let mut running = 0.0f64;
    for (rank, &idx) in order.iter().enumerate() {
        let scaled = p_values[idx] * (m - rank) as f64;
        running = running.max(scaled);
        adjusted[idx] = running.min(1.0);
    }
    Ok(adjusted)
}

#[cfg(test)]
mod tests {
    // Frozen oracle values keep their full digits.
    #![allow(clippy::excessive_precision)]

    use super::*;

    #[test]
    fn welch_t_identical_samples_is_null() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let r = welch_t(&a, &a).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!((r.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn welch_t_matches_frozen_reference() {
        // Frozen from an independent implementation.
        let a = [1.1, 2.3, 3.2, 4.1, 5.3];
        let b = [2.0, 3.1, 4.5, 5.2, 6.6];
        let r = welch_t(&a, &b).unwrap();
        assert!((r.statistic - -1.000428945243421).abs() < 1e-12);
        let DegreesOfFreedom::One(df) = r.df else {
            panic!("one df expected")
        };
        assert!((df - 7.9141204027296723).abs() < 1e-12);
        assert!((r.p_value - 0.34670543494342587).abs() < 1e-12);
    }

    #[test]
    fn welch_t_sign_flips_under_swap() {
        let a = [1.0, 2.0, 3.5];
        let b = [4.0, 5.5, 6.0, 7.0];
        let ab = welch_t(&a, &b).unwrap();
        let ba = welch_t(&b, &a).unwrap();
        assert!((ab.statistic + ba.statistic).abs() < 1e-12);
        assert!((ab.p_value - ba.p_value).abs() < 1e-12);
    }

    #[test]
    fn welch_t_rejects_degenerate_input() {
        assert!(matches!(
            welch_t(&[1.0], &[1.0, 2.0]),
            Err(StatsError::DegenerateGroup { group: 0, .. })
        ));
        assert!(matches!(
            welch_t(&[2.0, 2.0], &[3.0, 3.0]),
            Err(StatsError::DegenerateGroup { .. })
        ));
    }

    #[test]
    fn welch_t_asymptotic_close_to_exact_permutation() {
        // Fixture chosen so the asymptotic two-sided p lands within 1e-3 of
        // the exact permutation p over all C(10,5) = 252 splits.
        let a = [-0.65, 0.03, -1.69, -0.25, -0.07];
        let b = [-0.45, 0.09, 1.62, 0.5, 0.87];
        let r = welch_t(&a, &b).unwrap();
        assert!((r.statistic - -2.237275178095384).abs() < 1e-12);
        let exact = permutation_p_welch(&a, &b);
        assert!((exact - 14.0 / 252.0).abs() < 1e-12);
        assert!((r.p_value - exact).abs() < 1e-3, "p={} exact={exact}", r.p_value);
    }

    /// Exact permutation p-value for |t| over every split of the pooled
    /// sample into the original group sizes.
    fn permutation_p_welch(a: &[f64], b: &[f64]) -> f64 {
        let pool: Vec<f64> = a.iter().chain(b).copied().collect();
        let t_obs = welch_t(a, b).unwrap().statistic.abs();
        let mut hits = 0usize;
        let mut total = 0usize;
        for chosen in combinations(pool.len(), a.len()) {
            let ga: Vec<f64> = chosen.iter().map(|&i| pool[i]).collect();
            let gb: Vec<f64> = (0..pool.len())
                .filter(|i| !chosen.contains(i))
                .map(|i| pool[i])
                .collect();
            let t = welch_t(&ga, &gb).unwrap().statistic.abs();
            total += 1;
            if t >= t_obs - 1e-12 {
                hits += 1;
            }
        }
        hits as f64 / total as f64
    }

    /// All k-subsets of 0..n, lexicographic.
    pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..k).collect();
        loop {
            out.push(cur.clone());
            // advance
            let mut i = k;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if cur[i] != i + n - k {
                    break;
                }
                if i == 0 {
                    return out;
                }
            }
            cur[i] += 1;
            for j in i + 1..k {
                cur[j] = cur[j - 1] + 1;
            }
        }
    }

    #[test]
    fn welch_anova_matches_frozen_fixture() {
        let groups = [
            vec![1.0, 2.0, 3.0, 4.0],
            vec![2.0, 3.0, 4.0, 5.0],
            vec![10.0, 11.0, 12.0, 13.0],
        ];
        let r = welch_anova(&groups).unwrap();
        assert!((r.statistic - 52.56).abs() < 1e-10);
        let DegreesOfFreedom::Two(df1, df2) = r.df else {
            panic!("two df expected")
        };
        assert_eq!(df1, 2.0);
        // Equal sizes and variances make the adjusted df exactly 6.
        assert!((df2 - 6.0).abs() < 1e-12);
        assert!(r.p_value < 0.01);
        assert!((r.p_value - 0.00015742621468581153).abs() < 1e-12);
    }

    #[test]
    fn welch_anova_two_groups_is_t_squared() {
        let a = [1.25, 2.5, 3.0, 4.75, 5.0];
        let b = [2.0, 4.5, 6.25, 8.0];
        let f = welch_anova(&[a.to_vec(), b.to_vec()]).unwrap();
        let t = welch_t(&a, &b).unwrap();
        assert!((f.statistic - t.statistic * t.statistic).abs() < 1e-9);
        let DegreesOfFreedom::Two(_, df2) = f.df else {
            panic!()
        };
        let DegreesOfFreedom::One(df_t) = t.df else {
            panic!()
        };
        assert!((df2 - df_t).abs() < 1e-9);
        assert!((f.p_value - t.p_value).abs() < 1e-9);
    }

    #[test]
    fn welch_anova_rejects_zero_variance_group() {
        let groups = [vec![1.0, 1.0, 1.0], vec![2.0, 3.0, 4.0]];
        assert!(matches!(
            welch_anova(&groups),
            Err(StatsError::DegenerateGroup { group: 0, .. })
        ));
    }

    #[test]
    fn welch_statistics_invariant_under_affine_rescaling() {
        let a = [1.0, 2.2, 3.1, 4.7];
        let b = [2.5, 3.9, 5.0, 6.1, 7.3];
        let c = [0.5, 1.1, 9.4, 3.3];
        let scale = |s: &[f64]| s.iter().map(|v| -2.5 * v + 7.0).collect::<Vec<_>>();
        let f0 = welch_anova(&[a.to_vec(), b.to_vec(), c.to_vec()]).unwrap();
        let f1 = welch_anova(&[scale(&a), scale(&b), scale(&c)]).unwrap();
        assert!((f0.statistic - f1.statistic).abs() < 1e-9 * f0.statistic.abs().max(1.0));
        assert!((f0.p_value - f1.p_value).abs() < 1e-9);
        let t0 = welch_t(&a, &b).unwrap();
        let t1 = welch_t(&scale(&a), &scale(&b)).unwrap();
        assert!((t0.statistic.abs() - t1.statistic.abs()).abs() < 1e-9);
        assert!((t0.p_value - t1.p_value).abs() < 1e-9);
    }

    #[test]
    fn holm_handles_worked_examples() {
        // (0.01, 0.04, 0.03): scaled (0.03, 0.04, 0.06), monotone (0.03, 0.06, 0.06).
        let adj = holm_adjust(&[0.01, 0.04, 0.03]).unwrap();
        assert!(approx_vec(&adj, &[0.03, 0.06, 0.06], 1e-12));
        // Ties: (0.01, 0.02, 0.02) -> (0.03, 0.04, 0.04).
        let adj = holm_adjust(&[0.01, 0.02, 0.02]).unwrap();
        assert!(approx_vec(&adj, &[0.03, 0.04, 0.04], 1e-12));
    }

    #[test]
    fn holm_single_p_unchanged_and_capped() {
        assert_eq!(holm_adjust(&[0.2]).unwrap(), vec![0.2]);
        let adj = holm_adjust(&[0.9, 0.8]).unwrap();
        assert!(adj.iter().all(|&p| p <= 1.0));
        assert_eq!(holm_adjust(&[1.0, 0.5]).unwrap()[0], 1.0);
    }

    #[test]
    fn holm_rejects_out_of_range() {
        assert_eq!(
            holm_adjust(&[0.5, 1.2]),
            Err(StatsError::OutOfRangeP(1.2))
        );
        assert_eq!(
            holm_adjust(&[-0.1]),
            Err(StatsError::OutOfRangeP(-0.1))
        );
    }

    fn approx_vec(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }
}
