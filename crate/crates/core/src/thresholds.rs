//! Erasure thresholds `ε₁`, `ε₂`, a certified lower bound on `ε₃`, and the
//! one-way and `L̄` vanishing thresholds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::correlation::{eta, log_cross_ratio, maximal_correlation};
use crate::error::{Error, Result};
use crate::optim::{nelder_mead, NelderMead};
use crate::pmf::{Channel, JointPmf, Source};

/// Largest `min(|X|, |Y|)` accepted by [`epsilon1_paths`].
pub const PATH_ENUMERATION_LIMIT: usize = 8;

/// Width at which the `ε₁` binary search stops, in log units.
pub const LP_TOL: f64 = 1e-10;

/// Number of local searches used by [`lbar_zero_threshold`].
pub const LBAR_STARTS: usize = 64;

/// Alternating cycle `x1 → y1 → x2 → … → yk → x1` over distinct indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Path {
    pub xs: Vec<usize>,
    pub ys: Vec<usize>,
}

impl Path {
    pub fn new(xs: Vec<usize>, ys: Vec<usize>) -> Result<Self> {
        let path = Path { xs, ys };
        path.check()?;
        Ok(path)
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    fn check(&self) -> Result<()> {
        if self.xs.is_empty() || self.xs.len() != self.ys.len() {
            return Err(Error::InvalidPath(format!(
                "{} x-indices and {} y-indices",
                self.xs.len(),
                self.ys.len()
            )));
        }
        let distinct = |v: &[usize]| {
            let mut s = v.to_vec();
            s.sort_unstable();
            s.windows(2).all(|w| w[0] != w[1])
        };
        if !distinct(&self.xs) || !distinct(&self.ys) {
            return Err(Error::InvalidPath("indices must be distinct".into()));
        }
        Ok(())
    }
}

/// Running product of a path in log space, tracking zero factors.
#[derive(Debug, Clone, Copy, Default)]
struct Ratio {
    num_log: f64,
    den_log: f64,
    num_zeros: u32,
    den_zeros: u32,
}

impl Ratio {
    fn mul_num(mut self, v: f64) -> Self {
        if v > 0.0 {
            self.num_log += v.ln();
        } else {
            self.num_zeros += 1;
        }
        self
    }

    fn mul_den(mut self, v: f64) -> Self {
        if v > 0.0 {
            self.den_log += v.ln();
        } else {
            self.den_zeros += 1;
        }
        self
    }

    /// `(num/den)^(1/k)` with `0/0 := 1`.
    fn value(&self, k: usize) -> f64 {
        match (self.num_zeros > 0, self.den_zeros > 0) {
            (true, true) => 1.0,
            (true, false) => 0.0,
            (false, true) => f64::INFINITY,
            (false, false) => ((self.num_log - self.den_log) / k as f64).exp(),
        }
    }
}

/// Value assigned to a path: the geometric mean of
/// `p(x_i, y_i) / p(x_i, y_{i-1})` around the cycle.
pub fn path_value(p: &JointPmf, path: &Path) -> Result<f64> {
    path.check()?;
    if path.xs.iter().any(|&x| x >= p.nx()) || path.ys.iter().any(|&y| y >= p.ny()) {
        return Err(Error::InvalidPath("index outside the alphabet".into()));
    }
    let k = path.len();
    let mut r = Ratio::default();
    for i in 0..k {
        let prev = if i == 0 { path.ys[k - 1] } else { path.ys[i - 1] };
        r = r.mul_num(p.get(path.xs[i], path.ys[i]));
        r = r.mul_den(p.get(path.xs[i], prev));
    }
    Ok(r.value(k))
}

/// Indices of rows and columns with positive marginal mass.
fn support_indices(p: &JointPmf) -> (Vec<usize>, Vec<usize>) {
    let px = p.x_marginal();
    let py = p.y_marginal();
    (
        (0..p.nx()).filter(|&x| px[x] > 0.0).collect(),
        (0..p.ny()).filter(|&y| py[y] > 0.0).collect(),
    )
}

struct Dfs<'a> {
    p: &'a JointPmf,
    xs: Vec<usize>,
    ys: Vec<usize>,
    used_x: Vec<bool>,
    used_y: Vec<bool>,
    best: f64,
    best_path: Option<Path>,
}

impl Dfs<'_> {
    /// Extends a path whose last entry is `ys.last()`; `open` excludes the
    /// closing denominator `p(x1, y_k)`.
    fn extend(&mut self, open: Ratio) {
        let k = self.xs.len();
        let closed = open.mul_den(self.p.get(self.xs[0], self.ys[k - 1]));
        let v = closed.value(k);
        if v < self.best {
            self.best = v;
            self.best_path = Some(Path {
                xs: self.xs.clone(),
                ys: self.ys.clone(),
            });
        }
        if self.best == 0.0 {
            return;
        }
        let y_prev = self.ys[k - 1];
        for x in (self.xs[0] + 1)..self.p.nx() {
            if self.used_x[x] {
                continue;
            }
            let with_x = open.mul_den(self.p.get(x, y_prev));
            self.used_x[x] = true;
            self.xs.push(x);
            for y in 0..self.p.ny() {
                if self.used_y[y] {
                    continue;
                }
                self.used_y[y] = true;
                self.ys.push(y);
                self.extend(with_x.mul_num(self.p.get(x, y)));
                self.ys.pop();
                self.used_y[y] = false;
            }
            self.xs.pop();
            self.used_x[x] = false;
        }
    }
}

/// `ε₁` as the minimum path value, by exhaustive enumeration.
///
/// Rows and columns without mass are dropped first. Since a path's value is
/// invariant under rotation, only paths starting at their smallest x-index
/// are visited. Ties keep the first minimizer in enumeration order.
pub fn epsilon1_paths(p: &JointPmf) -> Result<(f64, Path)> {
    let (sx, sy) = support_indices(p);
    let size = sx.len().min(sy.len());
    if size > PATH_ENUMERATION_LIMIT {
        return Err(Error::AlphabetTooLarge {
            size,
            limit: PATH_ENUMERATION_LIMIT,
        });
    }
    let s = p.restrict_to_support();
    let starts: Vec<(usize, usize)> = (0..s.nx())
        .flat_map(|x| (0..s.ny()).map(move |y| (x, y)))
        .collect();
    let results: Vec<(f64, Option<Path>)> = starts
        .par_iter()
        .map(|&(x, y)| {
            let mut dfs = Dfs {
                p: &s,
                xs: vec![x],
                ys: vec![y],
                used_x: (0..s.nx()).map(|i| i == x).collect(),
                used_y: (0..s.ny()).map(|j| j == y).collect(),
                best: f64::INFINITY,
                best_path: None,
            };
            dfs.extend(Ratio::default().mul_num(s.get(x, y)));
            (dfs.best, dfs.best_path)
        })
        .collect();
    let (value, path) = results
        .into_iter()
        .fold((f64::INFINITY, None), |acc, r| if r.0 < acc.0 { r } else { acc });
    let path = path.expect("support is non-empty");
    let path = Path {
        xs: path.xs.iter().map(|&i| sx[i]).collect(),
        ys: path.ys.iter().map(|&j| sy[j]).collect(),
    };
    Ok((value, path))
}

/// Rank-one matrix `M(x,y) = exp(m(x) + n(y))` over a support rectangle.
#[derive(Debug, Clone)]
pub struct RankOneFloor {
    /// Largest `c` found with `c·p ≤ M` on the support.
    pub floor: f64,
    pub m: Vec<f64>,
    pub n: Vec<f64>,
    /// Path certifying that no larger floor exists, when one was found.
    pub witness: Option<Path>,
}

impl RankOneFloor {
    pub fn entry(&self, x: usize, y: usize) -> f64 {
        (self.m[x] + self.n[y]).exp()
    }
}

/// Bellman–Ford on the bipartite difference-constraint graph.
///
/// Nodes `0..nx` carry `m(x)`, nodes `nx..nx+ny` carry `n'(y) = −n(y)`.
/// Edges `n'(y) → m(x)` weigh `ln R(x,y)` and edges `m(x) → n'(y)` weigh
/// `A − ln p(x,y)`. Returns potentials, or a negative cycle as node list.
fn difference_system(
    log_r: &[f64],
    log_p: &[f64],
    nx: usize,
    ny: usize,
    a: f64,
) -> std::result::Result<Vec<f64>, Vec<usize>> {
    let nv = nx + ny;
    let mut edges = Vec::with_capacity(2 * nx * ny);
    for x in 0..nx {
        for y in 0..ny {
            edges.push((nx + y, x, log_r[x * ny + y]));
            edges.push((x, nx + y, a - log_p[x * ny + y]));
        }
    }
    let mut dist = vec![0.0; nv];
    let mut pred = vec![usize::MAX; nv];
    let mut last = None;
    for _ in 0..nv {
        last = None;
        for &(u, v, w) in &edges {
            let cand = dist[u] + w;
            if cand < dist[v] - 1e-13 * (1.0 + dist[v].abs()) {
                dist[v] = cand;
                pred[v] = u;
                last = Some(v);
            }
        }
        if last.is_none() {
            return Ok(dist);
        }
    }
    let mut v = last.expect("relaxed on the final pass");
    for _ in 0..nv {
        v = pred[v];
    }
    let start = v;
    let mut cycle = vec![start];
    let mut u = pred[start];
    while u != start {
        cycle.push(u);
        u = pred[u];
    }
    cycle.reverse();
    Err(cycle)
}

/// Converts a negative cycle (forward node order) into a [`Path`].
fn cycle_to_path(cycle: &[usize], nx: usize) -> Option<Path> {
    let first_y = cycle.iter().position(|&v| v >= nx)?;
    let k = cycle.len();
    let rotated: Vec<usize> = (0..k).map(|i| cycle[(first_y + i) % k]).collect();
    let mut pairs: Vec<(usize, usize)> = rotated
        .chunks(2)
        .filter(|c| c.len() == 2)
        .map(|c| (c[1], c[0] - nx))
        .collect();
    pairs.reverse();
    let (xs, ys) = pairs.into_iter().unzip();
    Path::new(xs, ys).ok()
}

/// Maximizes `c` such that a rank-one `M` satisfies `M ≤ R` and `M ≥ c·p`
/// cellwise, for strictly positive `R` and `p` (row-major, `nx × ny`).
///
/// Solved by bisection on `A = −ln c` with a negative-cycle feasibility
/// test; `R = p` gives `ε₁`.
pub fn rank_one_floor(r: &[f64], p: &[f64], nx: usize, ny: usize) -> RankOneFloor {
    let log_r: Vec<f64> = r.iter().map(|v| v.ln()).collect();
    let log_p: Vec<f64> = p.iter().map(|v| v.ln()).collect();
    // m(x) = min_y ln R(x,y), n = 0 is feasible for this A
    let mut hi = 0.0f64;
    for x in 0..nx {
        let row_min = (0..ny).map(|y| log_r[x * ny + y]).fold(f64::INFINITY, f64::min);
        for y in 0..ny {
            hi = hi.max(log_p[x * ny + y] - row_min);
        }
    }
    let mut lo = 0.0;
    let mut potentials = match difference_system(&log_r, &log_p, nx, ny, lo) {
        Ok(d) => {
            return finish_floor(d, p, nx, ny, None);
        }
        Err(_) => difference_system(&log_r, &log_p, nx, ny, hi)
            .or_else(|_| difference_system(&log_r, &log_p, nx, ny, hi + 1e-9))
            .expect("upper bracket is feasible"),
    };
    let mut cycle = None;
    while hi - lo > LP_TOL {
        let mid = 0.5 * (lo + hi);
        match difference_system(&log_r, &log_p, nx, ny, mid) {
            Ok(d) => {
                hi = mid;
                potentials = d;
            }
            Err(c) => {
                lo = mid;
                cycle = Some(c);
            }
        }
    }
    if cycle.is_none() {
        cycle = difference_system(&log_r, &log_p, nx, ny, lo).err();
    }
    let witness = cycle.and_then(|c| cycle_to_path(&c, nx));
    finish_floor(potentials, p, nx, ny, witness)
}

fn finish_floor(dist: Vec<f64>, p: &[f64], nx: usize, ny: usize, witness: Option<Path>) -> RankOneFloor {
    let m = dist[..nx].to_vec();
    let n: Vec<f64> = dist[nx..].iter().map(|v| -v).collect();
    let mut out = RankOneFloor {
        floor: 0.0,
        m,
        n,
        witness,
    };
    out.floor = (0..nx)
        .flat_map(|x| (0..ny).map(move |y| (x, y)))
        .map(|(x, y)| out.entry(x, y) / p[x * ny + y])
        .fold(f64::INFINITY, f64::min);
    out
}

/// `ε₁` through the max-min rank-one characterization and its LP.
pub fn epsilon1_lp(p: &JointPmf) -> f64 {
    epsilon1_lp_detail(p).map_or(0.0, |(f, _, _)| f.floor.min(1.0))
}

/// Optimal rank-one floor on the support of `p`, or `None` for pmfs with a
/// zero cell (where `ε₁ = 0`).
fn epsilon1_lp_detail(p: &JointPmf) -> Option<(RankOneFloor, Vec<usize>, Vec<usize>)> {
    let (sx, sy) = support_indices(p);
    let s = p.restrict_to_support();
    if s.probs().iter().any(|&v| v == 0.0) {
        return None;
    }
    let f = rank_one_floor(s.probs(), s.probs(), s.nx(), s.ny());
    Some((f, sx, sy))
}

/// `ε₁` via the LP together with a cycle witness mapped to the original
/// indices (none for product pmfs or zero cells).
pub fn epsilon1_lp_with_witness(p: &JointPmf) -> (f64, Option<Path>) {
    match epsilon1_lp_detail(p) {
        None => (0.0, zero_cell_path(p)),
        Some((f, sx, sy)) => {
            let w = f.witness.map(|path| Path {
                xs: path.xs.iter().map(|&i| sx[i]).collect(),
                ys: path.ys.iter().map(|&j| sy[j]).collect(),
            });
            (f.floor.min(1.0), w)
        }
    }
}

/// A length-four path through a zero cell with positive marginals; its
/// value is 0.
fn zero_cell_path(p: &JointPmf) -> Option<Path> {
    let px = p.x_marginal();
    let py = p.y_marginal();
    for x in 0..p.nx() {
        for y in 0..p.ny() {
            if p.get(x, y) > 0.0 || px[x] == 0.0 || py[y] == 0.0 {
                continue;
            }
            let y2 = (0..p.ny()).find(|&j| p.get(x, j) > 0.0)?;
            let x2 = (0..p.nx()).find(|&i| p.get(i, y) > 0.0)?;
            return Path::new(vec![x, x2], vec![y, y2]).ok();
        }
    }
    None
}

/// `ε₂ = min (p(x1,y1)p(x2,y2) / (p(x1,y2)p(x2,y1)))^(1/2)` over
/// `x1≠x2, y1≠y2`, capped at 1. The witness is `(x1, x2, y1, y2)`.
pub fn epsilon2(p: &JointPmf) -> (f64, Option<[usize; 4]>) {
    let mut best = 1.0;
    let mut witness = None;
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
                    let l = log_cross_ratio(
                        [p.get(x1, y1), p.get(x2, y2)],
                        [p.get(x1, y2), p.get(x2, y1)],
                    );
                    let v = (0.5 * l).exp();
                    if witness.is_none() || v < best {
                        best = v.min(1.0);
                        witness = Some([x1, x2, y1, y2]);
                    }
                }
            }
        }
    }
    (best, witness)
}

/// Layers `δ_t` (row-major over the full alphabet) certifying a lower bound
/// on `ε₃`.
#[derive(Debug, Clone)]
pub struct Epsilon3Bound {
    pub value: f64,
    pub layers: Vec<Vec<f64>>,
}

/// Checks the constraints on `δ` layers and returns `Σ_t min δ_t` over the
/// support of `p`: each `[p δ_t]` has rank one (2×2 minors within 1e-8),
/// entries are nonnegative and `Σ_t δ_t = 1` within 1e-8 on the support.
pub fn certify_layers(p: &JointPmf, layers: &[Vec<f64>]) -> Option<f64> {
    let (nx, ny) = (p.nx(), p.ny());
    let support: Vec<usize> = (0..nx * ny).filter(|&i| p.probs()[i] > 0.0).collect();
    let mut total = 0.0;
    let mut sums = vec![0.0; nx * ny];
    for d in layers {
        if d.len() != nx * ny || d.iter().any(|v| !(*v >= -1e-12)) {
            return None;
        }
        let w: Vec<f64> = (0..nx * ny).map(|i| p.probs()[i] * d[i]).collect();
        for x1 in 0..nx {
            for x2 in (x1 + 1)..nx {
                for y1 in 0..ny {
                    for y2 in (y1 + 1)..ny {
                        let minor = w[x1 * ny + y1] * w[x2 * ny + y2]
                            - w[x1 * ny + y2] * w[x2 * ny + y1];
                        if minor.abs() > 1e-8 {
                            return None;
                        }
                    }
                }
            }
        }
        for &i in &support {
            sums[i] += d[i];
        }
        total += support.iter().map(|&i| d[i]).fold(f64::INFINITY, f64::min);
    }
    if support.iter().any(|&i| (sums[i] - 1.0).abs() > 1e-8) {
        return None;
    }
    Some(total.max(0.0))
}

/// Greedy peeling: the first layer is `scale` times the `ε₁`-optimal layer,
/// then each further layer is the optimal rank-one floor under the residual.
/// The leftover mass goes into single-cell layers.
fn peel(s: &JointPmf, first: &RankOneFloor, scale: f64, max_layers: usize) -> Vec<Vec<f64>> {
    let (nx, ny) = (s.nx(), s.ny());
    let p = s.probs();
    let mut residual = p.to_vec();
    let mut layers = Vec::new();
    let mut push = |m: Vec<f64>, residual: &mut Vec<f64>| {
        let d: Vec<f64> = (0..nx * ny).map(|i| (m[i] / p[i]).min(residual[i] / p[i])).collect();
        for i in 0..nx * ny {
            residual[i] = (residual[i] - p[i] * d[i]).max(0.0);
        }
        layers.push(d);
    };
    let m0: Vec<f64> = (0..nx * ny)
        .map(|i| scale * first.entry(i / ny, i % ny))
        .collect();
    push(m0, &mut residual);
    for _ in 1..max_layers {
        if residual.iter().any(|&v| v <= 1e-300) {
            break;
        }
        let f = rank_one_floor(&residual, p, nx, ny);
        if !(f.floor > 1e-12) {
            break;
        }
        let m: Vec<f64> = (0..nx * ny).map(|i| f.entry(i / ny, i % ny)).collect();
        push(m, &mut residual);
    }
    // the clip in `push` only bites at rounding level, well inside the
    // rank-one tolerance of `certify_layers`
    for i in 0..nx * ny {
        if residual[i] > 0.0 {
            let mut d = vec![0.0; nx * ny];
            d[i] = residual[i] / p[i];
            layers.push(d);
        }
    }
    layers
}

/// Certified lower bound on `ε₃`.
///
/// Starts from the layer construction built on the `ε₁`-optimal rank-one
/// matrix and tries a few peeling splits; only candidates that pass
/// [`certify_layers`] are kept.
pub fn epsilon3_lower_bound(p: &JointPmf) -> Epsilon3Bound {
    let (nx, ny) = (p.nx(), p.ny());
    let indicator_only = || {
        let layers: Vec<Vec<f64>> = (0..nx * ny)
            .filter(|&i| p.probs()[i] > 0.0)
            .map(|i| {
                let mut d = vec![0.0; nx * ny];
                d[i] = 1.0;
                d
            })
            .collect();
        let value = certify_layers(p, &layers).unwrap_or(0.0);
        Epsilon3Bound { value, layers }
    };
    let Some((first, sx, sy)) = epsilon1_lp_detail(p) else {
        return indicator_only();
    };
    let s = p.restrict_to_support();
    let lift = |d: &[f64]| -> Vec<f64> {
        let mut full = vec![0.0; nx * ny];
        for (i, &x) in sx.iter().enumerate() {
            for (j, &y) in sy.iter().enumerate() {
                full[x * ny + y] = d[i * sy.len() + j];
            }
        }
        full
    };

    let max_layers = (s.nx() * s.ny()).max(2);
    let mut scales = vec![1.0, 0.75, 0.5, 0.25];
    let mut rng = ChaCha8Rng::seed_from_u64(0xe3);
    scales.extend((0..4).map(|_| rng.random_range(0.05..0.95)));

    let mut best = indicator_only();
    for scale in scales {
        let layers: Vec<Vec<f64>> = peel(&s, &first, scale, max_layers)
            .iter()
            .map(|d| lift(d))
            .collect();
        if let Some(v) = certify_layers(p, &layers) {
            if v > best.value {
                best = Epsilon3Bound { value: v.min(1.0), layers };
            }
        }
    }
    best
}

/// `1 − η(p_{Y|X})`.
pub fn oneway_zero_threshold(channel: &Channel) -> f64 {
    (1.0 - eta(channel).eta).clamp(0.0, 1.0)
}

/// Result of the `L̄` threshold search.
#[derive(Debug, Clone, Serialize)]
pub struct LbarThreshold {
    /// `1 − max ρ_m²(q)` over the explored `q ⪯ p`; an upper bound on the
    /// true threshold.
    pub value: f64,
    pub rho_m_sq: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

fn reweighted(p: &JointPmf, a: &[f64], b: &[f64]) -> Option<JointPmf> {
    let rows: Vec<Vec<f64>> = (0..p.nx())
        .map(|x| (0..p.ny()).map(|y| a[x] * b[y] * p.get(x, y)).collect())
        .collect();
    let total: f64 = rows.iter().flatten().sum();
    if !(total > 0.0) || !total.is_finite() {
        return None;
    }
    let rows: Vec<Vec<f64>> = rows
        .into_iter()
        .map(|r| r.into_iter().map(|v| v / total).collect())
        .collect();
    JointPmf::from_rows(&rows).ok()
}

/// `1 − max_{q ⪯ p} ρ_m²(q)` by multi-start search over `q ∝ a(x) b(y) p`.
pub fn lbar_zero_threshold(p: &JointPmf) -> LbarThreshold {
    let (nx, ny) = (p.nx(), p.ny());
    let dim = nx + ny;
    let split = |z: &[f64]| -> (Vec<f64>, Vec<f64>) {
        let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = z.iter().map(|v| (v - m).clamp(-60.0, 0.0).exp()).collect();
        (w[..nx].to_vec(), w[nx..].to_vec())
    };
    let objective = |z: &[f64]| -> f64 {
        let (a, b) = split(z);
        reweighted(p, &a, &b).map_or(0.0, |q| maximal_correlation(&q).powi(2))
    };

    let mut starts: Vec<Vec<f64>> = vec![vec![0.0; dim]];
    for i in 0..dim {
        let mut z = vec![0.0; dim];
        z[i] = -3.0;
        starts.push(z);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x1ba2);
    while starts.len() < LBAR_STARTS {
        starts.push((0..dim).map(|_| rng.random_range(-3.0..3.0)).collect());
    }
    let opts = NelderMead {
        initial_step: 1.0,
        max_iter: 600,
        f_tol: 1e-12,
    };
    let results: Vec<(f64, Vec<f64>)> = starts
        .par_iter()
        .map(|z0| {
            let (z, fz) = nelder_mead(|z| -objective(z), z0, opts);
            let f0 = objective(z0);
            if f0 >= -fz {
                (f0, z0.clone())
            } else {
                (-fz, z)
            }
        })
        .collect();
    let (best, z) = results
        .into_iter()
        .fold((f64::NEG_INFINITY, Vec::new()), |acc, r| if r.0 > acc.0 { r } else { acc });
    let (a, b) = split(&z);
    let rho_m_sq = best.clamp(0.0, 1.0);
    LbarThreshold {
        value: 1.0 - rho_m_sq,
        rho_m_sq,
        a,
        b,
    }
}

/// Feasibility verdict for an erasure source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// `ε ≤ ε₁`: the key capacity is zero.
    Zero,
    /// `ε > ε₂`: the key capacity is positive.
    Positive,
    Indeterminate,
}

/// Thresholds and verdict for an erasure source.
#[derive(Debug, Clone, Serialize)]
pub struct ThresholdReport {
    pub epsilon1: f64,
    pub epsilon2: f64,
    pub epsilon3_lb: f64,
    pub oneway_threshold: f64,
    pub lbar_threshold: f64,
    pub verdict: Verdict,
    pub witness_path: Option<Path>,
    /// `(x1, x2, y1, y2)`.
    pub witness_pair: Option<[usize; 4]>,
    /// `lbar_threshold` comes from a heuristic maximization.
    #[serde(skip)]
    pub lbar_heuristic: bool,
    /// `X` or `Y` is binary, so `ε₁ = ε₂` and the verdict is never
    /// indeterminate.
    #[serde(skip)]
    pub binary_tight: bool,
}

/// Assembles all thresholds for an erasure source.
pub fn threshold_report(source: &Source) -> Result<ThresholdReport> {
    let epsilon = source.erasure_probability().ok_or(Error::NotErasureSource)?;
    let p = source.joint();
    let (sx, sy) = support_indices(p);
    let (epsilon1, witness_path) = if sx.len().min(sy.len()) <= PATH_ENUMERATION_LIMIT {
        let (v, path) = epsilon1_paths(p)?;
        (v, Some(path))
    } else {
        epsilon1_lp_with_witness(p)
    };
    let (epsilon2, witness_pair) = epsilon2(p);
    let binary_tight = sx.len().min(sy.len()) <= 2;
    let epsilon2 = if binary_tight { epsilon1 } else { epsilon2 };
    let epsilon3_lb = epsilon3_lower_bound(p).value.max(epsilon1);
    let oneway_threshold = oneway_zero_threshold(&p.conditional_y_given_x());
    let lbar_threshold = lbar_zero_threshold(p).value;
    let verdict = if epsilon <= epsilon1 {
        Verdict::Zero
    } else if epsilon > epsilon2 {
        Verdict::Positive
    } else {
        Verdict::Indeterminate
    };
    Ok(ThresholdReport {
        epsilon1,
        epsilon2,
        epsilon3_lb,
        oneway_threshold,
        lbar_threshold,
        verdict,
        witness_path,
        witness_pair,
        lbar_heuristic: true,
        binary_tight,
    })
}
