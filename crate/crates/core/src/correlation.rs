//! Maximal correlation, the η envelope, `J_α`, Doeblin's coefficient and
//! the erasure degradation construction.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::info::renyi_unchecked;
use crate::optim::{logits, nelder_mead, softmax, NelderMead};
use crate::pmf::{Channel, JointPmf, ERASURE_LABEL};

/// Number of local searches used by [`eta`].
pub const ETA_STARTS: usize = 32;

/// Result of the η search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationReport {
    /// `ρ_m` at the maximizing input.
    pub rho_m: f64,
    pub eta: f64,
    pub input_pmf_at_max: Vec<f64>,
}

/// Second singular value of `p(x,y)/sqrt(p(x)p(y))` on the support.
pub fn maximal_correlation(p: &JointPmf) -> f64 {
    let s = p.restrict_to_support();
    if s.nx() < 2 || s.ny() < 2 {
        return 0.0;
    }
    let px = s.x_marginal();
    let py = s.y_marginal();
    let q = DMatrix::from_fn(s.nx(), s.ny(), |x, y| s.get(x, y) / (px[x] * py[y]).sqrt());
    let mut sv: Vec<f64> = q.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv[1].clamp(0.0, 1.0)
}

fn rho_sq_for_input(channel: &Channel, px: &[f64]) -> f64 {
    match channel.joint_with_input(px) {
        Ok(j) => maximal_correlation(&j).powi(2),
        Err(_) => 0.0,
    }
}

/// Starting points for a search over an `n`-point simplex: the uniform pmf,
/// every two-vertex blend, vertex-heavy points, then seeded random points.
pub(crate) fn simplex_starts(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut starts = vec![vec![1.0 / n as f64; n]];
    for i in 0..n {
        for j in (i + 1)..n {
            let mut v = vec![0.0; n];
            v[i] = 0.5;
            v[j] = 0.5;
            starts.push(v);
        }
    }
    for i in 0..n {
        let mut v = vec![0.1 / n as f64; n];
        v[i] += 0.9;
        starts.push(v);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while starts.len() < count {
        let v: Vec<f64> = (0..n).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
        let s: f64 = v.iter().sum();
        starts.push(v.into_iter().map(|x| x / s).collect());
    }
    starts
}

/// `η(p_{Y|X}) = max_{p_X} ρ_m²` by multi-start Nelder–Mead over softmax
/// logits. The value is a lower bound on the true maximum.
pub fn eta(channel: &Channel) -> CorrelationReport {
    let n = channel.n_inputs();
    if n < 2 {
        return CorrelationReport {
            rho_m: 0.0,
            eta: 0.0,
            input_pmf_at_max: vec![1.0; n],
        };
    }
    let starts = simplex_starts(n, ETA_STARTS, 0x05ee_de7a);
    let opts = NelderMead {
        initial_step: 1.0,
        max_iter: 400,
        f_tol: 1e-12,
    };
    let results: Vec<(f64, Vec<f64>)> = starts
        .par_iter()
        .map(|start| {
            let objective = |z: &[f64]| -rho_sq_for_input(channel, &softmax(z));
            let (z, fz) = nelder_mead(objective, &logits(start), opts);
            let x = softmax(&z);
            let f0 = rho_sq_for_input(channel, start);
            if f0 >= -fz {
                (f0, start.clone())
            } else {
                (-fz, x)
            }
        })
        .collect();
    // first maximum in start order, independent of scheduling
    let (best, px) = results
        .into_iter()
        .fold((f64::NEG_INFINITY, Vec::new()), |acc, r| {
            if r.0 > acc.0 {
                r
            } else {
                acc
            }
        });
    let eta = best.clamp(0.0, 1.0);
    CorrelationReport {
        rho_m: eta.sqrt(),
        eta,
        input_pmf_at_max: px,
    }
}

/// The pair `(q, r)` with `q = p(x1,y1)p(x2,y2)` and `r = p(x1,y2)p(x2,y1)`,
/// indexed `((x1*ny + y1)*nx + x2)*ny + y2`.
fn swap_pair(p: &JointPmf) -> (Vec<f64>, Vec<f64>) {
    let (nx, ny) = (p.nx(), p.ny());
    let mut q = Vec::with_capacity(nx * nx * ny * ny);
    let mut r = Vec::with_capacity(nx * nx * ny * ny);
    for x1 in 0..nx {
        for y1 in 0..ny {
            for x2 in 0..nx {
                for y2 in 0..ny {
                    q.push(p.get(x1, y1) * p.get(x2, y2));
                    r.push(p.get(x1, y2) * p.get(x2, y1));
                }
            }
        }
    }
    (q, r)
}

/// `J_α(X;Y) = D_α(q‖r)` for `α ∈ (0, ∞]`.
pub fn j_alpha(p: &JointPmf, alpha: f64) -> Result<f64> {
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(Error::InvalidAlpha(alpha));
    }
    if alpha == f64::INFINITY {
        return Ok(j_infinity(p));
    }
    let (q, r) = swap_pair(p);
    renyi_unchecked(&q, &r, alpha)
}

/// Log cross ratio with `0/0 := 1`.
pub(crate) fn log_cross_ratio(num: [f64; 2], den: [f64; 2]) -> f64 {
    let nz = num.iter().filter(|v| **v == 0.0).count();
    let dz = den.iter().filter(|v| **v == 0.0).count();
    match (nz > 0, dz > 0) {
        (true, true) => 0.0,
        (true, false) => f64::NEG_INFINITY,
        (false, true) => f64::INFINITY,
        (false, false) => num[0].ln() + num[1].ln() - den[0].ln() - den[1].ln(),
    }
}

/// `ln max p(x1,y1)p(x2,y2) / (p(x1,y2)p(x2,y1))` over `x1≠x2, y1≠y2`.
/// Equals `2 ln(1/ε₂)`.
pub fn j_infinity(p: &JointPmf) -> f64 {
    let mut best = 0.0f64;
    for x1 in 0..p.nx() {
        for x2 in 0..p.nx() {
            if x1 == x2 {
                continue;
            }
            for y1 in 0..p.ny() {
                for y2 in 0..p.ny() {
                    if y1 == y2 {
                        continue;
                    }
                    let v = log_cross_ratio(
                        [p.get(x1, y1), p.get(x2, y2)],
                        [p.get(x1, y2), p.get(x2, y1)],
                    );
                    best = best.max(v);
                }
            }
        }
    }
    best
}

/// `Σ_r min_a q(r|a)`.
pub fn doeblin_coefficient(channel: &Channel) -> f64 {
    (0..channel.n_outputs())
        .map(|r| {
            (0..channel.n_inputs())
                .map(|a| channel.get(a, r))
                .fold(f64::INFINITY, f64::min)
        })
        .sum::<f64>()
        .clamp(0.0, 1.0)
}

/// Outcome of [`erasure_degradation_channel`].
#[derive(Debug, Clone)]
pub enum Degradation {
    /// `p_{R|B}` with inputs `A ∪ {e}` (erasure row last) and the weights
    /// `λ(r)` used to build it.
    Feasible { channel: Channel, lambda: Vec<f64> },
    Infeasible { doeblin: f64 },
}

impl Degradation {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Degradation::Feasible { .. })
    }
}

/// Realizes `q_{R|A}` as `p_{R|B}` applied to an erasure observation `B` of
/// `A` with erasure probability `epsilon`, when Doeblin's coefficient allows.
///
/// `p_a` defaults to uniform and must be strictly positive.
pub fn erasure_degradation_channel(
    q: &Channel,
    epsilon: f64,
    p_a: Option<&[f64]>,
) -> Result<Degradation> {
    if !(0.0..=1.0).contains(&epsilon) || epsilon.is_nan() {
        return Err(Error::EpsilonOutOfRange(epsilon));
    }
    let na = q.n_inputs();
    let nr = q.n_outputs();
    let uniform = vec![1.0 / na as f64; na];
    let p_a = p_a.unwrap_or(&uniform);
    if p_a.len() != na {
        return Err(Error::DimensionMismatch(
            "reference pmf must cover the channel inputs".into(),
        ));
    }
    if p_a.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidPmf("reference pmf must be strictly positive".into()));
    }
    let doeblin = doeblin_coefficient(q);
    if doeblin < epsilon {
        return Ok(Degradation::Infeasible { doeblin });
    }

    let q_r: Vec<f64> = (0..nr)
        .map(|r| (0..na).map(|a| p_a[a] * q.get(a, r)).sum())
        .collect();
    let mut remaining = epsilon;
    let mut mass = vec![0.0; nr]; // q_R(r) λ(r)
    for r in 0..nr {
        let floor = (0..na).map(|a| q.get(a, r)).fold(f64::INFINITY, f64::min);
        let take = floor.min(remaining).max(0.0);
        mass[r] = take;
        remaining -= take;
    }
    let lambda: Vec<f64> = mass
        .iter()
        .zip(&q_r)
        .map(|(m, qr)| if *qr > 0.0 { m / qr } else { 0.0 })
        .collect();

    let mut rows: Vec<Vec<f64>> = (0..na)
        .map(|a| {
            if epsilon < 1.0 {
                (0..nr)
                    .map(|r| ((q.get(a, r) - mass[r]) / (1.0 - epsilon)).max(0.0))
                    .collect()
            } else {
                q.row(a).to_vec()
            }
        })
        .collect();
    rows.push(if epsilon > 0.0 {
        mass.iter().map(|m| m / epsilon).collect()
    } else {
        vec![1.0 / nr as f64; nr]
    });
    // absorb rounding so rows pass validation
    for row in &mut rows {
        let s: f64 = row.iter().sum();
        if s > 0.0 {
            row.iter_mut().for_each(|v| *v /= s);
        }
    }
    let mut inputs = q.input_alphabet().to_vec();
    inputs.push(ERASURE_LABEL.to_string());
    let channel = Channel::new(&rows, &inputs, q.output_alphabet())?;
    Ok(Degradation::Feasible { channel, lambda })
}

/// Largest gap `|Σ_b p(a,b) p(r|b) − p_A(a) q(r|a)|` for a degradation
/// channel, with `p(a,b)` the erasure channel applied to `p_A`.
pub fn degradation_marginal_gap(
    q: &Channel,
    degraded: &Channel,
    epsilon: f64,
    p_a: &[f64],
) -> f64 {
    let na = q.n_inputs();
    let mut gap = 0.0f64;
    for a in 0..na {
        for r in 0..q.n_outputs() {
            let lhs = p_a[a] * ((1.0 - epsilon) * degraded.get(a, r) + epsilon * degraded.get(na, r));
            gap = gap.max((lhs - p_a[a] * q.get(a, r)).abs());
        }
    }
    gap
}

/// Exponent `n · J_∞(p_{Y|X}, X)` of the uncertainty product bound, using
/// the uniform input on the full input alphabet.
pub fn uncertainty_product_bound(channel: &Channel, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::OutOfRange {
            name: "n",
            value: 0.0,
        });
    }
    let k = channel.n_inputs();
    let joint = channel.joint_with_input(&vec![1.0 / k as f64; k])?;
    let j = j_infinity(&joint);
    Ok(if j == 0.0 { 0.0 } else { n as f64 * j })
}

/// Checks that a decoding matrix `p_{M̂|M}` (square, rows indexed by `M`)
/// satisfies the uncertainty product bound with the given exponent.
pub fn uncertainty_product_holds(confusion: &Channel, exponent: f64) -> bool {
    let k = confusion.n_inputs();
    for m1 in 0..k {
        for m2 in 0..k {
            if m1 == m2 {
                continue;
            }
            let v = log_cross_ratio(
                [confusion.get(m1, m1), confusion.get(m2, m2)],
                [confusion.get(m1, m2), confusion.get(m2, m1)],
            );
            if v > exponent + 1e-12 {
                return false;
            }
        }
    }
    true
}
