//! Chernoff-information feasibility tests and the block-swap construction.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::correlation::log_cross_ratio;
use crate::error::{Error, Result};
use crate::info::{chernoff_unchecked, h};
use crate::pmf::{Channel, Eve, Source};

/// `(3 − √5) / 8`, the constant appearing in the Δ-based feasibility
/// condition. No procedure for Δ itself is provided.
pub const DELTA_CONSTANT: f64 = 0.095_491_502_812_526_3;

/// Largest outcome space enumerated by [`set_test`] and
/// [`exact_eve_error`].
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

/// Blocks per random stream in [`monte_carlo_protocol`].
pub const MC_CHUNK: u64 = 1 << 16;

/// What a positive verdict points at.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Indices `(x1, x2, y1, y2)`.
    Symbols { x1: usize, x2: usize, y1: usize, y2: usize },
    /// The caller's sets `A1, A2, B1, B2` at block length `n`.
    Sets { n: usize },
}

/// Outcome of a feasibility test, with both sides of the inequality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityVerdict {
    pub positive: bool,
    pub witness: Option<Witness>,
    pub lhs_chernoff: f64,
    pub rhs_half_log_ratio: f64,
}

fn margin(lhs: f64, rhs: f64) -> f64 {
    let m = rhs - lhs;
    if m.is_nan() {
        f64::NEG_INFINITY
    } else {
        m
    }
}

/// Chernoff information between two eavesdropper rows.
fn eve_chernoff(source: &Source, eve: &Channel, i: usize, j: usize) -> f64 {
    match source.eve() {
        // only the erasure atom is shared between distinct inputs
        Eve::Erasure { epsilon } if i != j => -epsilon.ln(),
        Eve::Erasure { .. } => 0.0,
        Eve::General { .. } => chernoff_unchecked(eve.row(i), eve.row(j)).value,
    }
}

/// Searches for `x1≠x2, y1≠y2` with
/// `C(p_{Z|x1y1} ‖ p_{Z|x2y2}) < ½ ln(p11 p22 / (p12 p21))`.
///
/// Returns the first witness in `(x1, x2, y1, y2)` order. A negative
/// verdict reports the sides of the pair with the largest margin.
pub fn corollary1_test(source: &Source) -> FeasibilityVerdict {
    let p = source.joint();
    let eve = source.eve_channel();
    let ny = p.ny();
    let mut best: Option<(f64, f64, f64)> = None;
    for x1 in 0..p.nx() {
        for x2 in 0..p.nx() {
            if x1 == x2 {
                continue;
            }
            for y1 in 0..ny {
                for y2 in 0..ny {
                    if y1 == y2 {
                        continue;
                    }
                    let rhs = 0.5
                        * log_cross_ratio(
                            [p.get(x1, y1), p.get(x2, y2)],
                            [p.get(x1, y2), p.get(x2, y1)],
                        );
                    let lhs = eve_chernoff(source, &eve, x1 * ny + y1, x2 * ny + y2);
                    if lhs < rhs {
                        return FeasibilityVerdict {
                            positive: true,
                            witness: Some(Witness::Symbols { x1, x2, y1, y2 }),
                            lhs_chernoff: lhs,
                            rhs_half_log_ratio: rhs,
                        };
                    }
                    let m = margin(lhs, rhs);
                    if best.is_none_or(|b| m > b.0) {
                        best = Some((m, lhs, rhs));
                    }
                }
            }
        }
    }
    let (_, lhs, rhs) = best.unwrap_or((f64::NEG_INFINITY, f64::INFINITY, 0.0));
    FeasibilityVerdict {
        positive: false,
        witness: None,
        lhs_chernoff: lhs,
        rhs_half_log_ratio: rhs,
    }
}

fn check_strings(set: &[Vec<usize>], n: usize, alphabet: usize) -> Result<()> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    for s in set {
        if s.len() != n {
            return Err(Error::StringLength {
                expected: n,
                got: s.len(),
            });
        }
        if let Some(&v) = s.iter().find(|&&v| v >= alphabet) {
            return Err(Error::UnknownSymbol(v.to_string()));
        }
    }
    Ok(())
}

fn disjoint(a: &[Vec<usize>], b: &[Vec<usize>]) -> bool {
    a.iter().all(|s| !b.contains(s))
}

/// Pair-cell indices `x*ny + y` and block probability for every
/// `(a, b) ∈ A × B`.
fn block_pairs(
    source: &Source,
    a_set: &[Vec<usize>],
    b_set: &[Vec<usize>],
) -> Vec<(Vec<usize>, f64)> {
    let p = source.joint();
    let ny = p.ny();
    let mut out = Vec::with_capacity(a_set.len() * b_set.len());
    for a in a_set {
        for b in b_set {
            let cells: Vec<usize> = a.iter().zip(b).map(|(x, y)| x * ny + y).collect();
            let prob = cells.iter().map(|&c| p.probs()[c]).product();
            out.push((cells, prob));
        }
    }
    out
}

fn guard(states: u128) -> Result<()> {
    if states > ENUMERATION_LIMIT {
        return Err(Error::EnumerationTooLarge {
            states,
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(())
}

/// Law of `Z^n` given the block hypothesis set, over `|Z|^n` outcomes.
fn general_block_law(eve: &Channel, pairs: &[(Vec<usize>, f64)], n: usize) -> Vec<f64> {
    let nz = eve.n_outputs();
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    let mut law = vec![0.0; nz.pow(n as u32)];
    for (cells, prob) in pairs {
        if *prob == 0.0 {
            continue;
        }
        let mut v = vec![prob / total];
        for &c in cells {
            let row = eve.row(c);
            let mut next = Vec::with_capacity(v.len() * nz);
            for &w in &v {
                next.extend(row.iter().map(|r| w * r));
            }
            v = next;
        }
        for (acc, w) in law.iter_mut().zip(&v) {
            *acc += w;
        }
    }
    law
}

/// Law of Eve's erasure pattern and revealed content, keyed by
/// `(pattern, content)`.
fn erasure_block_law(
    epsilon: f64,
    pairs: &[(Vec<usize>, f64)],
    n: usize,
) -> HashMap<(u64, Vec<usize>), f64> {
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    let mut law = HashMap::new();
    for mask in 0u64..(1u64 << n) {
        let revealed = mask.count_ones() as i32;
        let w = epsilon.powi(n as i32 - revealed) * (1.0 - epsilon).powi(revealed);
        if w == 0.0 {
            continue;
        }
        for (cells, prob) in pairs {
            if *prob == 0.0 {
                continue;
            }
            let content: Vec<usize> = (0..n)
                .filter(|k| mask >> k & 1 == 1)
                .map(|k| cells[k])
                .collect();
            *law.entry((mask, content)).or_insert(0.0) += w * prob / total;
        }
    }
    law
}

/// Block-level test: is
/// `C(p(z^n | X^n∈A1, Y^n∈B1) ‖ p(z^n | X^n∈A2, Y^n∈B2))` below
/// `½ ln(P11 P22 / (P12 P21))`, with `Pij = P(X^n∈Ai, Y^n∈Bj)`?
///
/// Strings are given as symbol indices. Erasure eavesdroppers are handled
/// through the erasure pattern, so their cost is `2^n` per string pair
/// rather than `|Z|^n`.
pub fn set_test(
    source: &Source,
    a1: &[Vec<usize>],
    a2: &[Vec<usize>],
    b1: &[Vec<usize>],
    b2: &[Vec<usize>],
    n: usize,
) -> Result<FeasibilityVerdict> {
    if n == 0 {
        return Err(Error::InvalidBlockLength(n));
    }
    let p = source.joint();
    for s in [a1, a2] {
        check_strings(s, n, p.nx())?;
    }
    for s in [b1, b2] {
        check_strings(s, n, p.ny())?;
    }
    if !disjoint(a1, a2) || !disjoint(b1, b2) {
        return Err(Error::SetsNotDisjoint);
    }
    let per_hypothesis = (a1.len() * b1.len() + a2.len() * b2.len()) as u128;
    let eve = source.eve_channel();
    let states = match source.eve() {
        Eve::Erasure { .. } => 1u128.checked_shl(n as u32).unwrap_or(u128::MAX),
        Eve::General { .. } => (eve.n_outputs() as u128)
            .checked_pow(n as u32)
            .unwrap_or(u128::MAX),
    };
    guard(states.saturating_mul(per_hypothesis))?;

    let h11 = block_pairs(source, a1, b1);
    let h22 = block_pairs(source, a2, b2);
    let h12 = block_pairs(source, a1, b2);
    let h21 = block_pairs(source, a2, b1);
    let mass = |v: &[(Vec<usize>, f64)]| v.iter().map(|p| p.1).sum::<f64>();
    let rhs = 0.5 * log_cross_ratio([mass(&h11), mass(&h22)], [mass(&h12), mass(&h21)]);

    let lhs = if mass(&h11) == 0.0 || mass(&h22) == 0.0 {
        // a hypothesis that never occurs cannot be tested against
        f64::INFINITY
    } else {
        match source.eve() {
            Eve::General { .. } => {
                let l1 = general_block_law(&eve, &h11, n);
                let l2 = general_block_law(&eve, &h22, n);
                chernoff_unchecked(&l1, &l2).value
            }
            Eve::Erasure { epsilon } => {
                let l1 = erasure_block_law(*epsilon, &h11, n);
                let l2 = erasure_block_law(*epsilon, &h22, n);
                let mut keys: Vec<&(u64, Vec<usize>)> = l1.keys().chain(l2.keys()).collect();
                keys.sort();
                keys.dedup();
                let v1: Vec<f64> = keys.iter().map(|k| *l1.get(*k).unwrap_or(&0.0)).collect();
                let v2: Vec<f64> = keys.iter().map(|k| *l2.get(*k).unwrap_or(&0.0)).collect();
                chernoff_unchecked(&v1, &v2).value
            }
        }
    };
    let positive = lhs < rhs;
    Ok(FeasibilityVerdict {
        positive,
        witness: positive.then_some(Witness::Sets { n }),
        lhs_chernoff: lhs,
        rhs_half_log_ratio: rhs,
    })
}

/// Strings `x1^(n/2) x2^(n/2)` and its swap.
pub fn swap_strings(s1: usize, s2: usize, n: usize) -> [Vec<usize>; 2] {
    let half = n / 2;
    let mut first = vec![s1; half];
    first.extend(std::iter::repeat_n(s2, half));
    let mut second = vec![s2; half];
    second.extend(std::iter::repeat_n(s1, half));
    [first, second]
}

/// Source, symbols `(x1, y1, x2, y2)` and even block length for the swap
/// construction.
#[derive(Debug, Clone)]
pub struct SwapInstance {
    source: Source,
    pair: [usize; 4],
    n: usize,
}

impl SwapInstance {
    pub fn new(source: Source, x1: usize, y1: usize, x2: usize, y2: usize, n: usize) -> Result<Self> {
        if n == 0 || n % 2 == 1 {
            return Err(Error::InvalidBlockLength(n));
        }
        let p = source.joint();
        if x1 >= p.nx() || x2 >= p.nx() {
            return Err(Error::UnknownSymbol(format!("x index {}", x1.max(x2))));
        }
        if y1 >= p.ny() || y2 >= p.ny() {
            return Err(Error::UnknownSymbol(format!("y index {}", y1.max(y2))));
        }
        if x1 == x2 || y1 == y2 {
            return Err(Error::PairsCollide);
        }
        let inst = SwapInstance {
            source,
            pair: [x1, y1, x2, y2],
            n,
        };
        let [p11, p12, p21, p22] = inst.cells();
        if p11 * p22 == 0.0 && p12 * p21 == 0.0 {
            return Err(Error::ZeroAcceptance);
        }
        Ok(inst)
    }

    pub fn source(&self) -> &Source {
        &self.source
    }

    /// `(x1, y1, x2, y2)`.
    pub fn pair(&self) -> [usize; 4] {
        self.pair
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `[p11, p12, p21, p22]` with `pij = p(x_i, y_j)`.
    pub fn cells(&self) -> [f64; 4] {
        let p = self.source.joint();
        let [x1, y1, x2, y2] = self.pair;
        [p.get(x1, y1), p.get(x1, y2), p.get(x2, y1), p.get(x2, y2)]
    }

    /// `ln(p11 p22)^(n/2)` and `ln(p12 p21)^(n/2)`.
    fn log_block_probs(&self) -> (f64, f64) {
        let [p11, p12, p21, p22] = self.cells();
        let half = (self.n / 2) as f64;
        let lg = |v: f64| if v > 0.0 { v.ln() } else { f64::NEG_INFINITY };
        (half * (lg(p11) + lg(p22)), half * (lg(p12) + lg(p21)))
    }

    /// Probability that a block is kept by both parties,
    /// `2((p11 p22)^(n/2) + (p12 p21)^(n/2))`.
    pub fn acceptance_probability(&self) -> f64 {
        let (a, b) = self.log_block_probs();
        2.0 * (a.exp() + b.exp())
    }

    /// Swap strings `[x_1, x_2]` for Alice and `[y_1, y_2]` for Bob.
    pub fn strings(&self) -> ([Vec<usize>; 2], [Vec<usize>; 2]) {
        let [x1, y1, x2, y2] = self.pair;
        (swap_strings(x1, x2, self.n), swap_strings(y1, y2, self.n))
    }
}

/// Probability that the parties agree on a kept block,
/// `(p11 p22)^(n/2) / ((p11 p22)^(n/2) + (p12 p21)^(n/2))`.
pub fn tilde_p(instance: &SwapInstance) -> f64 {
    let (a, b) = instance.log_block_probs();
    if a == f64::NEG_INFINITY {
        return 0.0;
    }
    if b == f64::NEG_INFINITY {
        return 1.0;
    }
    1.0 / (1.0 + (b - a).exp())
}

/// `H(X^n,Y^n | Z^n, kept) − 2 h(p̃_n)` for an erasure eavesdropper.
///
/// Any revealed coordinate identifies which of the four kept pairs occurred,
/// so the first term is `ε^n (ln 2 + h(p̃_n))`.
pub fn swap_advantage_lb(instance: &SwapInstance) -> Result<f64> {
    let epsilon = instance
        .source
        .erasure_probability()
        .ok_or(Error::NotErasureSource)?;
    let t = tilde_p(instance);
    let ht = h(t);
    let hidden = epsilon.powi(instance.n as i32);
    Ok(hidden * (std::f64::consts::LN_2 + ht) - 2.0 * ht)
}

/// Statistics of the simulated block protocol.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McStats {
    pub blocks: u64,
    pub accepted: u64,
    /// Kept blocks where `(X^n, Y^n)` is a diagonal pair, i.e. the parties
    /// agree.
    pub agreed: u64,
    pub eve_errors: u64,
    pub acceptance_rate: f64,
    pub empirical_tilde_p: f64,
    /// Error rate of Eve's MAP guess between the two diagonal hypotheses.
    pub empirical_eve_error: f64,
}

#[derive(Default, Clone, Copy)]
struct Counts {
    accepted: u64,
    agreed: u64,
    eve_errors: u64,
}

impl std::ops::Add for Counts {
    type Output = Counts;
    fn add(self, o: Counts) -> Counts {
        Counts {
            accepted: self.accepted + o.accepted,
            agreed: self.agreed + o.agreed,
            eve_errors: self.eve_errors + o.eve_errors,
        }
    }
}

fn cdf(weights: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    weights
        .iter()
        .map(|w| {
            acc += w;
            acc
        })
        .collect()
}

fn draw(cdf: &[f64], u: f64) -> usize {
    let total = *cdf.last().unwrap_or(&1.0);
    let target = u * total;
    cdf.iter()
        .position(|&c| target < c)
        .unwrap_or(cdf.len() - 1)
}

/// Simulates `blocks` independent blocks of the swap protocol.
///
/// Blocks are split into chunks of [`MC_CHUNK`]; chunk `c` draws from a
/// ChaCha8 stream seeded by `seed` with stream id `c`, so the output does
/// not depend on the number of threads.
pub fn monte_carlo_protocol(instance: &SwapInstance, blocks: u64, seed: u64) -> Result<McStats> {
    if blocks == 0 {
        return Err(Error::NoBlocks);
    }
    let p = instance.source.joint();
    let ny = p.ny();
    let eve = instance.source.eve_channel();
    let joint_cdf = cdf(p.probs());
    let eve_cdfs: Vec<Vec<f64>> = (0..eve.n_inputs()).map(|i| cdf(eve.row(i))).collect();
    let log_eve: Vec<Vec<f64>> = (0..eve.n_inputs())
        .map(|i| eve.row(i).iter().map(|v| v.ln()).collect())
        .collect();
    let n = instance.n;
    let half = n / 2;
    let [x1, y1, x2, y2] = instance.pair;
    // cells seen by Eve in the first half under the two diagonal hypotheses
    let (c11, c22) = (x1 * ny + y1, x2 * ny + y2);

    let chunks = blocks.div_ceil(MC_CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let len = MC_CHUNK.min(blocks - chunk * MC_CHUNK);
            let mut c = Counts::default();
            let mut xs = vec![0usize; n];
            let mut ys = vec![0usize; n];
            for _ in 0..len {
                for k in 0..n {
                    let cell = draw(&joint_cdf, rng.random::<f64>());
                    xs[k] = cell / ny;
                    ys[k] = cell % ny;
                }
                let which = |v: &[usize], s1: usize, s2: usize| -> Option<usize> {
                    if v[..half].iter().all(|&a| a == s1) && v[half..].iter().all(|&a| a == s2) {
                        Some(1)
                    } else if v[..half].iter().all(|&a| a == s2) && v[half..].iter().all(|&a| a == s1) {
                        Some(2)
                    } else {
                        None
                    }
                };
                let (Some(i), Some(j)) = (which(&xs, x1, x2), which(&ys, y1, y2)) else {
                    continue;
                };
                c.accepted += 1;
                if i != j {
                    continue;
                }
                c.agreed += 1;
                // log-likelihoods of Z^n under hypotheses 1 and 2
                let (mut l1, mut l2) = (0.0, 0.0);
                for k in 0..n {
                    let cell = xs[k] * ny + ys[k];
                    let z = draw(&eve_cdfs[cell], rng.random::<f64>());
                    let (h1, h2) = if k < half { (c11, c22) } else { (c22, c11) };
                    l1 += log_eve[h1][z];
                    l2 += log_eve[h2][z];
                }
                let guess = if l1 >= l2 { 1 } else { 2 };
                if guess != i {
                    c.eve_errors += 1;
                }
            }
            c
        })
        .reduce(Counts::default, |a, b| a + b);

    let ratio = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    Ok(McStats {
        blocks,
        accepted: counts.accepted,
        agreed: counts.agreed,
        eve_errors: counts.eve_errors,
        acceptance_rate: ratio(counts.accepted, blocks),
        empirical_tilde_p: ratio(counts.agreed, counts.accepted),
        empirical_eve_error: ratio(counts.eve_errors, counts.agreed),
    })
}

/// Exact error of Eve's MAP rule between the two diagonal hypotheses, with
/// ties resolved toward the first. For an erasure eavesdropper this is
/// `ε^n / 2`.
pub fn exact_eve_error(instance: &SwapInstance) -> Result<f64> {
    let n = instance.n;
    if let Some(epsilon) = instance.source.erasure_probability() {
        return Ok(0.5 * epsilon.powi(n as i32));
    }
    let eve = instance.source.eve_channel();
    let nz = eve.n_outputs();
    guard((nz as u128).checked_pow(n as u32).unwrap_or(u128::MAX))?;
    let ny = instance.source.joint().ny();
    let [x1, y1, x2, y2] = instance.pair;
    let (c11, c22) = (x1 * ny + y1, x2 * ny + y2);
    let h1: Vec<usize> = (0..n).map(|k| if k < n / 2 { c11 } else { c22 }).collect();
    let h2: Vec<usize> = (0..n).map(|k| if k < n / 2 { c22 } else { c11 }).collect();
    let l1 = general_block_law(&eve, &[(h1, 1.0)], n);
    let l2 = general_block_law(&eve, &[(h2, 1.0)], n);
    Ok(0.5
        * l1
            .iter()
            .zip(&l2)
            .map(|(a, b)| if a >= b { *b } else { *a })
            .sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pmf::{build_erasure_source, JointPmf};

    fn dsbs(p: f64) -> JointPmf {
        JointPmf::from_rows(&[
            vec![(1.0 - p) / 2.0, p / 2.0],
            vec![p / 2.0, (1.0 - p) / 2.0],
        ])
        .unwrap()
    }

    fn dsbe(p: f64, eps: f64) -> Source {
        build_erasure_source(dsbs(p), eps).unwrap()
    }

    #[test]
    fn delta_constant_value() {
        assert!((DELTA_CONSTANT - (3.0 - 5f64.sqrt()) / 8.0).abs() < 1e-16);
    }

    #[test]
    fn corollary1_examples() {
        let v = corollary1_test(&dsbe(0.4, 0.8));
        assert!(v.positive);
        assert!((v.lhs_chernoff + 0.8f64.ln()).abs() < 1e-12);
        assert!((v.rhs_half_log_ratio - 1.5f64.ln()).abs() < 1e-12);
        match v.witness {
            Some(Witness::Symbols { x1, x2, y1, y2 }) => {
                assert_eq!((x1, y1), (0, 0));
                assert_eq!((x2, y2), (1, 1));
            }
            other => panic!("unexpected witness {other:?}"),
        }

        let v = corollary1_test(&dsbe(0.4, 0.5));
        assert!(!v.positive);
        assert!(v.witness.is_none());
        assert!((v.lhs_chernoff + 0.5f64.ln()).abs() < 1e-12);

        let v = corollary1_test(&dsbe(0.4, 1.0));
        assert!(v.positive);
        assert_eq!(v.lhs_chernoff, 0.0);
    }

    #[test]
    fn corollary1_general_eve_matches_erasure() {
        let s = dsbe(0.3, 0.6);
        let g = Source::general(s.joint().clone(), s.eve_channel()).unwrap();
        let a = corollary1_test(&s);
        let b = corollary1_test(&g);
        assert_eq!(a.positive, b.positive);
        assert!((a.lhs_chernoff - b.lhs_chernoff).abs() < 1e-12);
    }

    #[test]
    fn set_test_singletons_reduce_to_corollary1() {
        for eps in [0.3, 0.5, 0.7, 0.9] {
            let s = dsbe(0.35, eps);
            let c = corollary1_test(&s);
            let v = set_test(&s, &[vec![0]], &[vec![1]], &[vec![0]], &[vec![1]], 1).unwrap();
            assert_eq!(v.positive, c.positive);
            assert!((v.lhs_chernoff - c.lhs_chernoff).abs() < 1e-12);
            assert!((v.rhs_half_log_ratio - c.rhs_half_log_ratio).abs() < 1e-12);
        }
    }

    #[test]
    fn set_test_swap_sets() {
        let s = dsbe(0.4, 0.8);
        let n = 4;
        let [xa, xb] = swap_strings(0, 1, n);
        let [ya, yb] = swap_strings(0, 1, n);
        let v = set_test(&s, &[xa.clone()], &[xb.clone()], &[ya.clone()], &[yb.clone()], n).unwrap();
        // both sides scale with n
        assert!((v.lhs_chernoff + n as f64 * 0.8f64.ln()).abs() < 1e-12);
        let p11n = (0.3f64 * 0.3).powi(2);
        let p12n = (0.2f64 * 0.2).powi(2);
        assert!((v.rhs_half_log_ratio - 0.5 * (p11n * p11n / (p12n * p12n)).ln()).abs() < 1e-12);
        assert!(v.positive);

        let g = Source::general(s.joint().clone(), s.eve_channel()).unwrap();
        let w = set_test(&g, &[xa], &[xb], &[ya], &[yb], n).unwrap();
        assert!((w.lhs_chernoff - v.lhs_chernoff).abs() < 1e-9);
        assert_eq!(w.positive, v.positive);
    }

    #[test]
    fn set_test_errors() {
        let s = dsbe(0.4, 0.8);
        assert!(matches!(
            set_test(&s, &[vec![0]], &[vec![0]], &[vec![0]], &[vec![1]], 1).unwrap_err(),
            Error::SetsNotDisjoint
        ));
        assert!(matches!(
            set_test(&s, &[], &[vec![0]], &[vec![0]], &[vec![1]], 1).unwrap_err(),
            Error::EmptySet
        ));
        assert!(matches!(
            set_test(&s, &[vec![0, 1]], &[vec![1]], &[vec![0]], &[vec![1]], 1).unwrap_err(),
            Error::StringLength { .. }
        ));
        let g = Source::general(s.joint().clone(), s.eve_channel()).unwrap();
        let long = vec![0usize; 12];
        let other = vec![1usize; 12];
        let err = set_test(&g, &[long.clone()], &[other.clone()], &[long], &[other], 12).unwrap_err();
        assert!(err.is_guard());
    }

    #[test]
    fn tilde_p_examples() {
        let independent = JointPmf::product(&[0.4, 0.6], &[0.3, 0.7]).unwrap();
        for n in [2, 4, 10] {
            let inst = SwapInstance::new(build_erasure_source(independent.clone(), 0.5).unwrap(), 0, 0, 1, 1, n).unwrap();
            assert!((tilde_p(&inst) - 0.5).abs() < 1e-12);
        }
        let inst = SwapInstance::new(dsbe(0.4, 0.8), 0, 0, 1, 1, 2).unwrap();
        assert!((tilde_p(&inst) - 0.09 / 0.13).abs() < 1e-12);
        let mut last = 0.5;
        for n in (2..200).step_by(2) {
            let t = tilde_p(&SwapInstance::new(dsbe(0.4, 0.8), 0, 0, 1, 1, n).unwrap());
            assert!(t > last || (1.0 - t < 1e-12 && t >= last - 1e-15), "n={n} t={t} last={last}");
            last = t;
        }
        assert!(last < 1.0 + 1e-15);
    }

    #[test]
    fn swap_instance_errors() {
        assert!(matches!(
            SwapInstance::new(dsbe(0.4, 0.8), 0, 0, 1, 1, 3).unwrap_err(),
            Error::InvalidBlockLength(3)
        ));
        assert!(matches!(
            SwapInstance::new(dsbe(0.4, 0.8), 0, 0, 0, 1, 2).unwrap_err(),
            Error::PairsCollide
        ));
    }

    #[test]
    fn swap_advantage_endpoints() {
        for n in [2, 6, 20] {
            let inst = SwapInstance::new(dsbe(0.4, 1.0), 0, 0, 1, 1, n).unwrap();
            let t = tilde_p(&inst);
            let lb = swap_advantage_lb(&inst).unwrap();
            assert!((lb - (std::f64::consts::LN_2 - h(t))).abs() < 1e-14);
            assert!(lb > 0.0);
            let inst = SwapInstance::new(dsbe(0.4, 0.0), 0, 0, 1, 1, n).unwrap();
            assert!((swap_advantage_lb(&inst).unwrap() + 2.0 * h(t)).abs() < 1e-14);
        }
        let found = (2..=200)
            .step_by(2)
            .any(|n| swap_advantage_lb(&SwapInstance::new(dsbe(0.4, 0.8), 0, 0, 1, 1, n).unwrap()).unwrap() > 0.0);
        assert!(found);
    }

    #[test]
    fn monte_carlo_small_run_is_deterministic() {
        let inst = SwapInstance::new(dsbe(0.4, 0.8), 0, 0, 1, 1, 4).unwrap();
        let a = monte_carlo_protocol(&inst, 200_000, 7).unwrap();
        let b = monte_carlo_protocol(&inst, 200_000, 7).unwrap();
        assert_eq!(a, b);
        let c = monte_carlo_protocol(&inst, 200_000, 8).unwrap();
        assert_ne!(a, c);
        let pa = inst.acceptance_probability();
        let sigma = (pa * (1.0 - pa) / 200_000.0).sqrt();
        assert!((a.acceptance_rate - pa).abs() < 4.0 * sigma);
        assert!(matches!(
            monte_carlo_protocol(&inst, 0, 1).unwrap_err(),
            Error::NoBlocks
        ));
    }

    #[test]
    fn monte_carlo_independent_of_thread_count() {
        let inst = SwapInstance::new(dsbe(0.3, 0.7), 0, 0, 1, 1, 2).unwrap();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| monte_carlo_protocol(&inst, 300_000, 99).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn exact_eve_error_general_matches_erasure() {
        let s = dsbe(0.4, 0.7);
        let g = Source::general(s.joint().clone(), s.eve_channel()).unwrap();
        let a = exact_eve_error(&SwapInstance::new(s, 0, 0, 1, 1, 4).unwrap()).unwrap();
        let b = exact_eve_error(&SwapInstance::new(g, 0, 0, 1, 1, 4).unwrap()).unwrap();
        assert!((a - 0.5 * 0.7f64.powi(4)).abs() < 1e-15);
        assert!((a - b).abs() < 1e-12);
    }
}
