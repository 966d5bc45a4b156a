//! Entropies, mutual information and divergences. All values are in nats.

use crate::error::{Error, Result};
use crate::optim::golden_section_min;
use crate::pmf::{JointPmf, Source};

/// Bracket width for the Chernoff golden-section search.
pub const CHERNOFF_ALPHA_TOL: f64 = 1e-12;

/// Converts nats to bits.
pub fn to_bits(nats: f64) -> f64 {
    nats / std::f64::consts::LN_2
}

fn check_pmf(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidPmf("empty vector".into()));
    }
    if let Some(v) = p.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(Error::InvalidPmf(format!("entry {v} is not a probability")));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidPmf(format!("sums to {s}")));
    }
    Ok(())
}

fn check_pair(p: &[f64], q: &[f64]) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::AlphabetMismatch(format!(
            "pmfs have {} and {} entries",
            p.len(),
            q.len()
        )));
    }
    check_pmf(p)?;
    check_pmf(q)
}

#[inline]
fn xlnx(v: f64) -> f64 {
    if v > 0.0 {
        v * v.ln()
    } else {
        0.0
    }
}

/// Shannon entropy.
pub fn entropy(p: &[f64]) -> Result<f64> {
    check_pmf(p)?;
    Ok(entropy_unchecked(p))
}

pub(crate) fn entropy_unchecked(p: &[f64]) -> f64 {
    -p.iter().map(|&v| xlnx(v)).sum::<f64>()
}

/// Binary entropy `h(p)`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange { name: "p", value: p });
    }
    Ok(h(p))
}

/// Binary entropy for arguments already known to lie in `[0, 1]`.
#[inline]
pub(crate) fn h(p: f64) -> f64 {
    -xlnx(p) - xlnx(1.0 - p)
}

/// `I(X;Y)`.
pub fn mutual_information(p: &JointPmf) -> f64 {
    let px = p.x_marginal();
    let py = p.y_marginal();
    let mut acc = 0.0;
    for x in 0..p.nx() {
        for y in 0..p.ny() {
            let v = p.get(x, y);
            if v > 0.0 {
                acc += v * (v / (px[x] * py[y])).ln();
            }
        }
    }
    acc.max(0.0)
}

/// `I(X;Y|Z)` for the joint law `p_XY p_{Z|XY}`.
pub fn conditional_mutual_information(source: &Source) -> f64 {
    let joint = source.joint();
    let eve = source.eve_channel();
    let (nx, ny, nz) = (joint.nx(), joint.ny(), eve.n_outputs());
    let mut pz = vec![0.0; nz];
    let mut pxz = vec![0.0; nx * nz];
    let mut pyz = vec![0.0; ny * nz];
    for x in 0..nx {
        for y in 0..ny {
            let w = joint.get(x, y);
            for z in 0..nz {
                let v = w * eve.get(x * ny + y, z);
                pz[z] += v;
                pxz[x * nz + z] += v;
                pyz[y * nz + z] += v;
            }
        }
    }
    let mut acc = 0.0;
    for x in 0..nx {
        for y in 0..ny {
            let w = joint.get(x, y);
            for z in 0..nz {
                let v = w * eve.get(x * ny + y, z);
                if v > 0.0 {
                    acc += v * (v * pz[z] / (pxz[x * nz + z] * pyz[y * nz + z])).ln();
                }
            }
        }
    }
    acc.max(0.0)
}

/// `ln Σ p^α q^(1−α)` over the common support, or `-inf` when it is empty.
fn log_affinity(p: &[f64], q: &[f64], alpha: f64) -> f64 {
    let terms: Vec<f64> = p
        .iter()
        .zip(q)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0)
        .map(|(a, b)| alpha * a.ln() + (1.0 - alpha) * b.ln())
        .collect();
    log_sum_exp(&terms)
}

pub(crate) fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

/// Rényi divergence `D_α(p‖q)` for `α ∈ [0, ∞]`.
///
/// `α = 1` is the Kullback–Leibler divergence and `α = ∞` is
/// `ln max p/q`. Returns `+inf` when the divergence is unbounded.
pub fn renyi_divergence(p: &[f64], q: &[f64], alpha: f64) -> Result<f64> {
    check_pair(p, q)?;
    renyi_unchecked(p, q, alpha)
}

pub(crate) fn renyi_unchecked(p: &[f64], q: &[f64], alpha: f64) -> Result<f64> {
    if alpha.is_nan() || alpha < 0.0 {
        return Err(Error::InvalidAlpha(alpha));
    }
    let escapes = p.iter().zip(q).any(|(a, b)| *a > 0.0 && *b == 0.0);
    let d = if alpha == f64::INFINITY {
        if escapes {
            f64::INFINITY
        } else {
            p.iter()
                .zip(q)
                .filter(|(a, _)| **a > 0.0)
                .map(|(a, b)| a.ln() - b.ln())
                .fold(f64::NEG_INFINITY, f64::max)
        }
    } else if alpha == 1.0 {
        if escapes {
            f64::INFINITY
        } else {
            p.iter()
                .zip(q)
                .filter(|(a, _)| **a > 0.0)
                .map(|(a, b)| a * (a.ln() - b.ln()))
                .sum()
        }
    } else if alpha > 1.0 && escapes {
        f64::INFINITY
    } else if alpha == 0.0 {
        let mass: f64 = p
            .iter()
            .zip(q)
            .filter(|(a, _)| **a > 0.0)
            .map(|(_, b)| b)
            .sum();
        -mass.ln()
    } else {
        let la = log_affinity(p, q, alpha);
        if la == f64::NEG_INFINITY {
            f64::INFINITY
        } else {
            la / (alpha - 1.0)
        }
    };
    Ok(d.max(0.0))
}

/// Chernoff information together with the minimizing order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chernoff {
    pub value: f64,
    pub alpha: f64,
}

/// `C(p‖q) = −ln min_α Σ p^α q^(1−α)`, summing over the common support.
pub fn chernoff_information(p: &[f64], q: &[f64]) -> Result<f64> {
    check_pair(p, q)?;
    Ok(chernoff_unchecked(p, q).value)
}

pub(crate) fn chernoff_unchecked(p: &[f64], q: &[f64]) -> Chernoff {
    let support: Vec<(f64, f64)> = p
        .iter()
        .zip(q)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    if support.is_empty() {
        return Chernoff {
            value: f64::INFINITY,
            alpha: 0.5,
        };
    }
    let f = |alpha: f64| {
        let terms: Vec<f64> = support
            .iter()
            .map(|(lp, lq)| alpha * lp + (1.0 - alpha) * lq)
            .collect();
        log_sum_exp(&terms)
    };
    let (alpha, fmin) = golden_section_min(f, 0.0, 1.0, CHERNOFF_ALPHA_TOL);
    Chernoff {
        value: (-fmin).max(0.0),
        alpha,
    }
}

/// Total variation distance.
pub fn tv_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    check_pair(p, q)?;
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pmf::build_erasure_source;
    use proptest::prelude::*;
    use std::f64::consts::LN_2;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn entropy_examples() {
        assert!(close(entropy(&[0.5, 0.5]).unwrap(), LN_2, 1e-15));
        assert_eq!(entropy(&[1.0, 0.0]).unwrap(), 0.0);
        let oracle = -(0.4f64 * 0.4f64.ln() + 0.6 * 0.6f64.ln());
        assert!(close(entropy(&[0.4, 0.6]).unwrap(), oracle, 1e-15));
        assert!(close(oracle, 0.67301, 1e-5));
        assert!(entropy(&[0.5, 0.6]).is_err());
    }

    #[test]
    fn binary_entropy_examples() {
        assert!(close(binary_entropy(0.5).unwrap(), LN_2, 1e-15));
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!(close(binary_entropy(0.4).unwrap(), 0.67301, 1e-5));
        assert!(binary_entropy(-0.1).is_err());
    }

    #[test]
    fn mutual_information_examples() {
        let prod = JointPmf::product(&[0.3, 0.7], &[0.6, 0.4]).unwrap();
        assert!(mutual_information(&prod).abs() < 1e-15);
        let eq = JointPmf::from_rows(&[vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        assert!(close(mutual_information(&eq), LN_2, 1e-15));
        let dsbs = JointPmf::from_rows(&[vec![0.3, 0.2], vec![0.2, 0.3]]).unwrap();
        let oracle = LN_2 + 0.4f64 * 0.4f64.ln() + 0.6 * 0.6f64.ln();
        assert!(close(mutual_information(&dsbs), oracle, 1e-15));
        assert!(close(oracle, 0.02013, 1e-5));
    }

    #[test]
    fn conditional_mi_erasure_extremes() {
        let dsbs = JointPmf::from_rows(&[vec![0.3, 0.2], vec![0.2, 0.3]]).unwrap();
        let i = mutual_information(&dsbs);
        let s1 = build_erasure_source(dsbs.clone(), 1.0).unwrap();
        assert!(close(conditional_mutual_information(&s1), i, 1e-15));
        let s0 = build_erasure_source(dsbs.clone(), 0.0).unwrap();
        assert_eq!(conditional_mutual_information(&s0), 0.0);
        let s = build_erasure_source(dsbs, 0.37).unwrap();
        assert!(close(conditional_mutual_information(&s), 0.37 * i, 1e-15));
    }

    #[test]
    fn renyi_examples() {
        let p = [0.5, 0.5];
        let q = [0.25, 0.75];
        for a in [0.0, 0.5, 1.0, 2.0, f64::INFINITY] {
            assert!(renyi_divergence(&p, &p, a).unwrap().abs() < 1e-15);
        }
        let kl = 0.5 * LN_2 + 0.5 * (2.0f64 / 3.0).ln();
        assert!(close(renyi_divergence(&p, &q, 1.0).unwrap(), kl, 1e-15));
        assert!(close(kl, 0.14384, 1e-5));
        assert!(close(
            renyi_divergence(&p, &q, f64::INFINITY).unwrap(),
            LN_2,
            1e-15
        ));
        assert_eq!(
            renyi_divergence(&[0.5, 0.5], &[1.0, 0.0], 2.0).unwrap(),
            f64::INFINITY
        );
        assert!(renyi_divergence(&p, &[1.0], 2.0).is_err());
        assert!(renyi_divergence(&p, &q, -1.0).is_err());
    }

    #[test]
    fn chernoff_examples() {
        let p = [0.2, 0.3, 0.5];
        assert!(chernoff_information(&p, &p).unwrap().abs() < 1e-15);
        assert_eq!(
            chernoff_information(&[1.0, 0.0], &[0.0, 1.0]).unwrap(),
            f64::INFINITY
        );
        // two erasure conditionals: only the erasure atom is shared
        let eps: f64 = 0.7;
        let a = [eps, 1.0 - eps, 0.0];
        let b = [eps, 0.0, 1.0 - eps];
        let grid_min = (1..1000)
            .map(|i| {
                let t = i as f64 / 1000.0;
                log_affinity(&a, &b, t)
            })
            .fold(f64::INFINITY, f64::min);
        let c = chernoff_information(&a, &b).unwrap();
        assert!(close(c, -eps.ln(), 1e-14));
        assert!(close(c, -grid_min, 1e-14));
    }

    #[test]
    fn tv_examples() {
        assert_eq!(tv_distance(&[0.5, 0.5], &[0.5, 0.5]).unwrap(), 0.0);
        assert_eq!(tv_distance(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert!(close(
            tv_distance(&[0.5, 0.5], &[0.25, 0.75]).unwrap(),
            0.25,
            1e-15
        ));
    }

    fn pmf(n: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.01f64..1.0, n).prop_map(|v| {
            let s: f64 = v.iter().sum();
            v.into_iter().map(|x| x / s).collect()
        })
    }

    fn pmf_pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (2usize..6).prop_flat_map(|n| (pmf(n), pmf(n)))
    }

    proptest! {
        #[test]
        fn renyi_monotone_in_alpha((p, q) in pmf_pair()) {
            let grid = [0.0, 0.1, 0.3, 0.5, 0.8, 1.0, 1.5, 2.0, 4.0, 10.0, f64::INFINITY];
            let vals: Vec<f64> = grid
                .iter()
                .map(|&a| renyi_divergence(&p, &q, a).unwrap())
                .collect();
            for w in vals.windows(2) {
                prop_assert!(w[0] <= w[1] + 1e-10, "{:?}", vals);
            }
        }

        #[test]
        fn chernoff_symmetric((p, q) in pmf_pair()) {
            let a = chernoff_information(&p, &q).unwrap();
            let b = chernoff_information(&q, &p).unwrap();
            prop_assert!((a - b).abs() <= 1e-9);
        }

        #[test]
        fn chernoff_below_tv_bound((p, q) in pmf_pair()) {
            let c = chernoff_information(&p, &q).unwrap();
            let tv = tv_distance(&p, &q).unwrap();
            prop_assert!(c <= -(1.0 - tv).ln() + 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]
        #[test]
        fn chernoff_matches_dense_grid((p, q) in pmf_pair()) {
            let c = chernoff_information(&p, &q).unwrap();
            let grid_min = (1..1_000_000)
                .map(|i| log_affinity(&p, &q, i as f64 * 1e-6))
                .fold(f64::INFINITY, f64::min);
            prop_assert!((c + grid_min).abs() <= 1e-8);
        }
    }
}
