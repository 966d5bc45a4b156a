//! Closed forms and curves for the doubly symmetric binary source with an
//! erasure eavesdropper, DSBE(p, ε). Rates returned here are in bits.

use std::collections::BTreeMap;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::info::{h, mutual_information, to_bits};
use crate::optim::{golden_section_min, nelder_mead, NelderMead};
use crate::pmf::JointPmf;

/// Values below this many nats are reported as exactly zero by the
/// search-based [`s_ow_lower_bound`].
pub const SEARCH_NOISE_FLOOR: f64 = 1e-13;

/// Validated DSBE parameters with `p` folded into `(0, 0.5]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DsbeParams {
    pub p: f64,
    pub epsilon: f64,
}

impl DsbeParams {
    pub fn new(p: f64, epsilon: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::OutOfRange { name: "p", value: p });
        }
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::EpsilonOutOfRange(epsilon));
        }
        Ok(DsbeParams {
            p: p.min(1.0 - p),
            epsilon,
        })
    }
}

/// `[[(1−p)/2, p/2], [p/2, (1−p)/2]]`.
pub fn dsbe_pmf(p: f64) -> Result<JointPmf> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange { name: "p", value: p });
    }
    JointPmf::from_rows(&[
        vec![(1.0 - p) / 2.0, p / 2.0],
        vec![p / 2.0, (1.0 - p) / 2.0],
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DsbeThresholds {
    /// `min(p, 1−p) / max(p, 1−p)`.
    pub eps2: f64,
    /// `4 p (1−p)`.
    pub oneway: f64,
}

pub fn dsbe_thresholds(p: f64) -> Result<DsbeThresholds> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange { name: "p", value: p });
    }
    let lo = p.min(1.0 - p);
    let hi = p.max(1.0 - p);
    let t = DsbeThresholds {
        eps2: lo / hi,
        oneway: 4.0 * p * (1.0 - p),
    };
    debug_assert!(t.eps2 <= t.oneway + 1e-15);
    Ok(t)
}

/// Binary entropy in bits.
fn h2(q: f64) -> f64 {
    to_bits(h(q))
}

/// `ln 2 − h((1−u)/2)`, accurate for small `u`.
fn ln2_minus_h(u: f64) -> f64 {
    let u = u.abs().min(1.0);
    let term = |v: f64| if v == -1.0 { 0.0 } else { (1.0 + v) * v.ln_1p() };
    (0.5 * (term(u) + term(-u))).max(0.0)
}

/// Rate of the `N`-fold repetition protocol,
/// `((p^N + (1−p)^N)/N) · max(0, ε^N − h(p^N/(p^N + (1−p)^N)))`, in bits.
pub fn repetition_rate(p: f64, epsilon: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::OutOfRange { name: "N", value: 0.0 });
    }
    let params = DsbeParams::new(p, epsilon)?;
    let (p, eps) = (params.p, params.epsilon);
    let a = p.powi(n as i32);
    let b = (1.0 - p).powi(n as i32);
    let s = a + b;
    Ok((s / n as f64) * (eps.powi(n as i32) - h2(a / s)).max(0.0))
}

/// `I(X;Y|J)` in nats where `J` keeps a revealed diagonal pair with
/// probability `1 − t` and maps everything else to the erasure symbol.
/// `t = 0` is the plain table: `J = 0` on `Z = (0,0)`, `J = 1` on
/// `Z = (1,1)`, `J = e` otherwise.
pub fn b0_sub_at(params: DsbeParams, t: f64) -> f64 {
    let (p, eps) = (params.p, params.epsilon);
    // masses of each diagonal and each off-diagonal cell inside J = e
    let d = 0.5 * (1.0 - p) * (eps + (1.0 - eps) * t);
    let o = 0.5 * p;
    if d + o == 0.0 {
        return 0.0;
    }
    // given J = e the pair is a DSBS with crossover o/(d+o)
    let u = (d - o) / (d + o);
    2.0 * (d + o) * ln2_minus_h(u)
}

/// `min_t I(X;Y|J_t)` in bits over the family of [`b0_sub_at`].
///
/// When `ε ≤ p/(1−p)` some `t` makes the pair independent given `J = e`
/// and the value is zero; above that point `t = 0` is optimal, which the
/// golden-section pass confirms numerically.
pub fn b0_sub(p: f64, epsilon: f64) -> Result<f64> {
    let params = DsbeParams::new(p, epsilon)?;
    let (p, eps) = (params.p, params.epsilon);
    let ratio = p / (1.0 - p);
    if eps <= ratio {
        return Ok(0.0);
    }
    let at_zero = b0_sub_at(params, 0.0);
    let (_, searched) = golden_section_min(|t| b0_sub_at(params, t), 0.0, 1.0, 1e-10);
    Ok(to_bits(at_zero.min(searched)))
}

/// Mutual information of a 2×2 joint pmf `[[a, b], [c, d]]` in nats.
fn mi2(m: [f64; 4]) -> f64 {
    let rows = [m[0] + m[1], m[2] + m[3]];
    let cols = [m[0] + m[2], m[1] + m[3]];
    let mut acc = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let v = m[2 * i + j];
            if v > 0.0 {
                acc += v * (v / (rows[i] * cols[j])).ln();
            }
        }
    }
    acc.max(0.0)
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// `I(U;Y|V=v) − (1−ε) I(U;X|V=v)` in nats for a binary `X` with
/// `P(X=0) = s` and `P(U=0|X=x) = (a, b)`.
fn branch(p: f64, eps: f64, s: f64, a: f64, b: f64) -> f64 {
    let ux = [s * a, (1.0 - s) * b, s * (1.0 - a), (1.0 - s) * (1.0 - b)];
    // P(Y=0|X) = (1−p, p)
    let y0 = [1.0 - p, p];
    let px = [s, 1.0 - s];
    let pu_x = [[a, 1.0 - a], [b, 1.0 - b]];
    let mut uy = [0.0; 4];
    for x in 0..2 {
        for u in 0..2 {
            let w = px[x] * pu_x[x][u];
            uy[2 * u] += w * y0[x];
            uy[2 * u + 1] += w * (1.0 - y0[x]);
        }
    }
    mi2(uy) - (1.0 - eps) * mi2(ux)
}

/// Objective for `|V| = |U| = 2` with uniform `X`, in nats.
fn s_ow_objective(p: f64, eps: f64, z: &[f64]) -> f64 {
    let w = sigmoid(z[0]);
    let s0 = sigmoid(z[1]);
    let s1 = (0.5 - w * s0) / (1.0 - w);
    if !(0.0..=1.0).contains(&s1) {
        return 0.0;
    }
    w * branch(p, eps, s0, sigmoid(z[2]), sigmoid(z[3]))
        + (1.0 - w) * branch(p, eps, s1, sigmoid(z[4]), sigmoid(z[5]))
}

/// Lower bound on the one-way key rate in bits, from a search over
/// `V → U → X` with `|V|, |U| ≤ 2` and the erasure identity
/// `I(U;Z|V) = (1−ε) I(U;X|V)`.
pub fn s_ow_lower_bound(p: f64, epsilon: f64) -> Result<f64> {
    let params = DsbeParams::new(p, epsilon)?;
    let (p, eps) = (params.p, params.epsilon);

    // U = X through a BSC(δ), V constant
    let mut best = (0..=2000)
        .map(|i| {
            let delta = i as f64 / 4000.0;
            branch(p, eps, 0.5, 1.0 - delta, delta)
        })
        .fold(0.0f64, f64::max);

    let mut rng = ChaCha8Rng::seed_from_u64(0x50f);
    let mut starts: Vec<Vec<f64>> = vec![
        vec![0.0, 0.0, 3.0, -3.0, 3.0, -3.0],
        vec![0.0, 0.0, 1.0, -1.0, 1.0, -1.0],
        vec![0.0, 0.0, 0.2, -0.2, 0.2, -0.2],
    ];
    while starts.len() < 16 {
        starts.push((0..6).map(|_| rng.random_range(-4.0..4.0)).collect());
    }
    let opts = NelderMead {
        initial_step: 1.0,
        max_iter: 800,
        f_tol: 1e-15,
    };
    let searched = starts
        .iter()
        .map(|z0| -nelder_mead(|z| -s_ow_objective(p, eps, z), z0, opts).1)
        .fold(0.0f64, f64::max);
    best = best.max(searched);
    Ok(if best <= SEARCH_NOISE_FLOOR { 0.0 } else { to_bits(best) })
}

/// One row of the curve family, in bits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub epsilon: f64,
    pub i_xy_given_z: f64,
    pub b0_sub: f64,
    pub s_ow_lb: f64,
    /// Repetition rates keyed by `N`.
    pub r_n: BTreeMap<usize, f64>,
}

/// Evaluates all curves on `eps_grid`; rows come back sorted by `ε`.
pub fn emit_curves(p: f64, eps_grid: &[f64], n_max_repetition: usize) -> Result<Vec<CurvePoint>> {
    if let Some(&bad) = eps_grid.iter().find(|e| !(0.0..=1.0).contains(*e)) {
        return Err(Error::EpsilonOutOfRange(bad));
    }
    DsbeParams::new(p, 0.0)?;
    let i_xy = to_bits(mutual_information(&dsbe_pmf(p)?));
    let mut grid = eps_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.par_iter()
        .map(|&eps| {
            let mut r_n = BTreeMap::new();
            for n in 2..=n_max_repetition {
                r_n.insert(n, repetition_rate(p, eps, n)?);
            }
            Ok(CurvePoint {
                epsilon: eps,
                i_xy_given_z: eps * i_xy,
                b0_sub: b0_sub(p, eps)?,
                s_ow_lb: s_ow_lower_bound(p, eps)?,
                r_n,
            })
        })
        .collect()
}

/// `steps` evenly spaced points on `[lo, hi]` (just `lo` when `steps == 1`).
pub fn linear_grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..steps)
            .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
            .collect(),
    }
}

/// Writes `epsilon,i_xy_given_z,b0_sub,s_ow,r_2,...` rows.
pub fn write_curves_csv<W: Write>(points: &[CurvePoint], n_max_repetition: usize, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![
        "epsilon".to_string(),
        "i_xy_given_z".to_string(),
        "b0_sub".to_string(),
        "s_ow".to_string(),
    ];
    header.extend((2..=n_max_repetition).map(|n| format!("r_{n}")));
    w.write_record(&header)?;
    for pt in points {
        let mut rec = vec![
            format_sig(pt.epsilon),
            format_sig(pt.i_xy_given_z),
            format_sig(pt.b0_sub),
            format_sig(pt.s_ow_lb),
        ];
        rec.extend((2..=n_max_repetition).map(|n| format_sig(pt.r_n.get(&n).copied().unwrap_or(0.0))));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Formats with 9 significant digits; non-finite values become `inf`,
/// `-inf` or `nan`.
pub fn format_sig(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let s = format!("{:.8e}", v);
    let parsed: f64 = s.parse().unwrap_or(v);
    let mag = parsed.abs().log10().floor() as i32;
    if (-5..9).contains(&mag) {
        let decimals = (8 - mag).max(0) as usize;
        let mut t = format!("{:.*}", decimals, parsed);
        if t.contains('.') {
            while t.ends_with('0') {
                t.pop();
            }
            if t.ends_with('.') {
                t.pop();
            }
        }
        t
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::conditional_mutual_information;
    use crate::pmf::{Channel, Source};

    #[test]
    fn pmf_examples() {
        assert_eq!(dsbe_pmf(0.5).unwrap().probs(), &[0.25; 4]);
        assert_eq!(dsbe_pmf(0.4).unwrap().to_rows(), vec![vec![0.3, 0.2], vec![0.2, 0.3]]);
        assert_eq!(dsbe_pmf(0.0).unwrap().probs(), &[0.5, 0.0, 0.0, 0.5]);
        assert!(dsbe_pmf(1.5).is_err());
    }

    #[test]
    fn threshold_examples() {
        let t = dsbe_thresholds(0.4).unwrap();
        assert!((t.eps2 - 2.0 / 3.0).abs() < 1e-15);
        assert!((t.oneway - 0.96).abs() < 1e-15);
        assert_eq!(dsbe_thresholds(0.5).unwrap(), DsbeThresholds { eps2: 1.0, oneway: 1.0 });
        let t = dsbe_thresholds(1e-12).unwrap();
        assert!(t.eps2 < 1e-11 && t.oneway < 1e-11);
    }

    #[test]
    fn thresholds_ordered_on_dense_grid() {
        for i in 1..1000 {
            let p = i as f64 / 1000.0;
            let t = dsbe_thresholds(p).unwrap();
            if i == 500 {
                assert!((t.oneway - t.eps2).abs() < 1e-15);
            } else {
                assert!(t.oneway > t.eps2);
            }
        }
    }

    #[test]
    fn repetition_examples() {
        assert_eq!(repetition_rate(0.4, 0.0, 3).unwrap(), 0.0);
        let h04 = -(0.4f64 * 0.4f64.log2() + 0.6 * 0.6f64.log2());
        let r = repetition_rate(0.4, 1.0, 1).unwrap();
        assert!((r - (1.0 - h04)).abs() < 1e-14);
        assert!((r - 0.02905).abs() < 1e-5);

        // spreadsheet-style recomputation
        let (a, b) = (0.4f64.powi(4), 0.6f64.powi(4));
        let q = a / (a + b);
        assert!((q - 0.16495).abs() < 1e-5);
        let hq = -(q * q.log2() + (1.0 - q) * (1.0 - q).log2());
        let expected = (a + b) / 4.0 * (0.9f64.powi(4) - hq).max(0.0);
        assert!((repetition_rate(0.4, 0.9, 4).unwrap() - expected).abs() < 1e-15);
    }

    /// `I(X;Y|J)` by building the `J` channel and enumerating.
    fn b0_enumerated(p: f64, eps: f64, t: f64) -> f64 {
        let keep = (1.0 - eps) * (1.0 - t);
        let rows = vec![
            vec![keep, 0.0, 1.0 - keep],
            vec![0.0, 0.0, 1.0],
            vec![0.0, 0.0, 1.0],
            vec![0.0, keep, 1.0 - keep],
        ];
        let ch = Channel::from_rows(&rows).unwrap();
        let s = Source::general(dsbe_pmf(p).unwrap(), ch).unwrap();
        conditional_mutual_information(&s)
    }

    #[test]
    fn b0_matches_enumeration() {
        for &(p, eps, t) in &[(0.4, 0.9, 0.0), (0.4, 0.5, 0.0), (0.3, 0.7, 0.4), (0.1, 0.2, 0.9)] {
            let params = DsbeParams::new(p, eps).unwrap();
            assert!((b0_sub_at(params, t) - b0_enumerated(p, eps, t)).abs() < 1e-14);
        }
    }

    #[test]
    fn b0_examples() {
        let i = to_bits(mutual_information(&dsbe_pmf(0.4).unwrap()));
        assert!((b0_sub(0.4, 1.0).unwrap() - i).abs() < 1e-14);
        assert_eq!(b0_sub(0.4, 0.5).unwrap(), 0.0);
        let v = b0_sub(0.4, 0.9).unwrap();
        assert!(v > 0.0);
        assert!((v - to_bits(b0_enumerated(0.4, 0.9, 0.0))).abs() < 1e-14);
    }

    #[test]
    fn b0_minimum_over_t_grid() {
        for &(p, eps) in &[(0.4, 0.8), (0.2, 0.5), (0.45, 0.95)] {
            let params = DsbeParams::new(p, eps).unwrap();
            let grid = (0..=1000)
                .map(|i| b0_sub_at(params, i as f64 / 1000.0))
                .fold(f64::INFINITY, f64::min);
            assert!((b0_sub(p, eps).unwrap() - to_bits(grid)).abs() < 1e-12);
        }
    }

    #[test]
    fn b0_transition() {
        for k in 2..10 {
            let p = k as f64 * 0.05;
            let r = p / (1.0 - p);
            for i in 0..=100 {
                let eps = i as f64 / 100.0;
                let v = b0_sub(p, eps).unwrap();
                if eps <= r {
                    assert_eq!(v, 0.0);
                } else if eps > r + 1e-6 {
                    assert!(v > 0.0, "p={p} eps={eps}");
                }
            }
            assert!(b0_sub(p, r + 2e-6).unwrap() > 0.0);
        }
    }

    #[test]
    fn s_ow_examples() {
        assert_eq!(s_ow_lower_bound(0.4, 0.9).unwrap(), 0.0);
        let i = to_bits(mutual_information(&dsbe_pmf(0.4).unwrap()));
        assert!((s_ow_lower_bound(0.4, 1.0).unwrap() - i).abs() < 1e-9);
        assert!(s_ow_lower_bound(0.4, 0.98).unwrap() > 0.0);
    }

    #[test]
    fn s_ow_transition() {
        for k in [2, 4, 6, 8] {
            let p = k as f64 * 0.05;
            let t = 4.0 * p * (1.0 - p);
            for eps in [t - 0.05, t - 0.01, t - 0.001] {
                if eps >= 0.0 {
                    assert_eq!(s_ow_lower_bound(p, eps).unwrap(), 0.0, "p={p} eps={eps}");
                }
            }
            for eps in [t + 0.011, t + 0.02] {
                if eps <= 1.0 {
                    assert!(s_ow_lower_bound(p, eps).unwrap() > 0.0, "p={p} eps={eps}");
                }
            }
        }
    }

    #[test]
    fn curve_grid_rows() {
        let pts = emit_curves(0.4, &[1.0, 0.0, 0.5], 6).unwrap();
        assert_eq!(pts.iter().map(|p| p.epsilon).collect::<Vec<_>>(), vec![0.0, 0.5, 1.0]);
        let first = &pts[0];
        assert_eq!(first.i_xy_given_z, 0.0);
        assert_eq!(first.b0_sub, 0.0);
        assert_eq!(first.s_ow_lb, 0.0);
        assert!(first.r_n.values().all(|&v| v == 0.0));
        let last = &pts[2];
        assert!((last.i_xy_given_z - last.b0_sub).abs() < 1e-12);
        assert!((last.i_xy_given_z - 0.02905).abs() < 1e-5);
        for pt in &pts {
            for v in pt.r_n.values() {
                assert!(*v <= pt.i_xy_given_z + 1e-9);
            }
        }
        assert!(emit_curves(0.4, &[1.2], 6).is_err());
    }

    #[test]
    fn csv_header_and_rows() {
        let pts = emit_curves(0.4, &linear_grid(0.0, 1.0, 3), 6).unwrap();
        let mut buf = Vec::new();
        write_curves_csv(&pts, 6, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "epsilon,i_xy_given_z,b0_sub,s_ow,r_2,r_3,r_4,r_5,r_6");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0,0,0,0"));
    }

    #[test]
    fn sig_formatting() {
        assert_eq!(format_sig(2.0 / 3.0), "0.666666667");
        assert_eq!(format_sig(0.96), "0.96");
        assert_eq!(format_sig(f64::INFINITY), "inf");
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(1234.5), "1234.5");
        assert_eq!(format_sig(1.5e-7), "1.50000000e-7");
        assert_eq!(format_sig(-0.25), "-0.25");
    }
}
