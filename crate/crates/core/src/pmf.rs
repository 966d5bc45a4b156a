//! Joint distributions, channels and sources.
//!
//! All containers are dense and immutable after construction. Matrices are
//! stored row-major; for a [`JointPmf`] rows are indexed by `X` and columns
//! by `Y`, for a [`Channel`] rows are inputs and columns are outputs.

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed on a row or matrix sum before renormalization is refused.
pub const NORMALIZATION_SLACK: f64 = 1e-9;

/// Label used for the erasure output of an erasure eavesdropper.
pub const ERASURE_LABEL: &str = "e";

fn check_labels(labels: &[String]) -> Result<()> {
    if labels.is_empty() {
        return Err(Error::EmptyAlphabet);
    }
    let mut seen = HashSet::with_capacity(labels.len());
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(Error::DuplicateLabel(l.clone()));
        }
    }
    Ok(())
}

fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

fn check_entries(matrix: &[Vec<f64>], cols: usize) -> Result<()> {
    for (r, row) in matrix.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::DimensionMismatch(format!(
                "row {r} has {} entries, expected {cols}",
                row.len()
            )));
        }
        for (c, &v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { row: r, col: c });
            }
            if v < 0.0 {
                return Err(Error::NegativeEntry { row: r, col: c, value: v });
            }
        }
    }
    Ok(())
}

/// Finite joint pmf `p_XY`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    x_alphabet: Vec<String>,
    y_alphabet: Vec<String>,
    probs: Vec<f64>,
}

/// Validates a raw matrix and labels into a [`JointPmf`].
///
/// The matrix is renormalized when its total is within
/// [`NORMALIZATION_SLACK`] of one and rejected otherwise.
pub fn validate_joint(
    matrix: &[Vec<f64>],
    x_labels: &[String],
    y_labels: &[String],
) -> Result<JointPmf> {
    check_labels(x_labels)?;
    check_labels(y_labels)?;
    if matrix.len() != x_labels.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} rows for {} x-labels",
            matrix.len(),
            x_labels.len()
        )));
    }
    check_entries(matrix, y_labels.len())?;
    let sum: f64 = matrix.iter().flatten().sum();
    if (sum - 1.0).abs() > NORMALIZATION_SLACK {
        return Err(Error::NotNormalized { sum });
    }
    let probs = matrix.iter().flatten().map(|v| v / sum).collect();
    Ok(JointPmf {
        x_alphabet: x_labels.to_vec(),
        y_alphabet: y_labels.to_vec(),
        probs,
    })
}

impl JointPmf {
    /// Builds a pmf with labels `"0", "1", ...` on both sides.
    pub fn from_rows(matrix: &[Vec<f64>]) -> Result<Self> {
        let nx = matrix.len();
        let ny = matrix.first().map_or(0, Vec::len);
        validate_joint(matrix, &default_labels(nx), &default_labels(ny))
    }

    /// Builds a pmf from a row-major buffer without renormalizing beyond the
    /// usual slack.
    pub fn from_flat(nx: usize, ny: usize, probs: &[f64]) -> Result<Self> {
        if probs.len() != nx * ny {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {nx}x{ny} matrix",
                probs.len()
            )));
        }
        let rows: Vec<Vec<f64>> = probs.chunks(ny.max(1)).map(<[f64]>::to_vec).collect();
        Self::from_rows(&rows)
    }

    /// Product pmf `p_X(x) p_Y(y)`.
    pub fn product(px: &[f64], py: &[f64]) -> Result<Self> {
        let rows: Vec<Vec<f64>> = px
            .iter()
            .map(|&a| py.iter().map(|&b| a * b).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn nx(&self) -> usize {
        self.x_alphabet.len()
    }

    pub fn ny(&self) -> usize {
        self.y_alphabet.len()
    }

    pub fn x_alphabet(&self) -> &[String] {
        &self.x_alphabet
    }

    pub fn y_alphabet(&self) -> &[String] {
        &self.y_alphabet
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.probs[x * self.ny() + y]
    }

    /// Row-major probabilities.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn row(&self, x: usize) -> &[f64] {
        let ny = self.ny();
        &self.probs[x * ny..(x + 1) * ny]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.nx()).map(|x| self.row(x).to_vec()).collect()
    }

    pub fn x_marginal(&self) -> Vec<f64> {
        (0..self.nx()).map(|x| self.row(x).iter().sum()).collect()
    }

    pub fn y_marginal(&self) -> Vec<f64> {
        let mut py = vec![0.0; self.ny()];
        for x in 0..self.nx() {
            for (acc, v) in py.iter_mut().zip(self.row(x)) {
                *acc += v;
            }
        }
        py
    }

    pub fn x_index(&self, label: &str) -> Result<usize> {
        self.x_alphabet
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownSymbol(label.to_string()))
    }

    pub fn y_index(&self, label: &str) -> Result<usize> {
        self.y_alphabet
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownSymbol(label.to_string()))
    }

    /// Swaps the roles of `X` and `Y`.
    pub fn transpose(&self) -> JointPmf {
        let (nx, ny) = (self.nx(), self.ny());
        let mut probs = vec![0.0; nx * ny];
        for x in 0..nx {
            for y in 0..ny {
                probs[y * nx + x] = self.get(x, y);
            }
        }
        JointPmf {
            x_alphabet: self.y_alphabet.clone(),
            y_alphabet: self.x_alphabet.clone(),
            probs,
        }
    }

    /// Drops rows and columns with zero marginal mass.
    pub fn restrict_to_support(&self) -> JointPmf {
        let px = self.x_marginal();
        let py = self.y_marginal();
        let xs: Vec<usize> = (0..self.nx()).filter(|&x| px[x] > 0.0).collect();
        let ys: Vec<usize> = (0..self.ny()).filter(|&y| py[y] > 0.0).collect();
        self.submatrix(&xs, &ys)
    }

    fn submatrix(&self, xs: &[usize], ys: &[usize]) -> JointPmf {
        let probs = xs
            .iter()
            .flat_map(|&x| ys.iter().map(move |&y| (x, y)))
            .map(|(x, y)| self.get(x, y))
            .collect();
        JointPmf {
            x_alphabet: xs.iter().map(|&x| self.x_alphabet[x].clone()).collect(),
            y_alphabet: ys.iter().map(|&y| self.y_alphabet[y].clone()).collect(),
            probs,
        }
    }

    /// True when some cell is zero while its row and column carry mass.
    pub fn has_interior_zero(&self) -> bool {
        let px = self.x_marginal();
        let py = self.y_marginal();
        (0..self.nx()).any(|x| {
            px[x] > 0.0 && (0..self.ny()).any(|y| py[y] > 0.0 && self.get(x, y) == 0.0)
        })
    }

    /// Conditional `p_{Y|X}`. Rows with zero mass become uniform.
    pub fn conditional_y_given_x(&self) -> Channel {
        let ny = self.ny();
        let rows: Vec<Vec<f64>> = (0..self.nx())
            .map(|x| {
                let row = self.row(x);
                let s: f64 = row.iter().sum();
                if s > 0.0 {
                    row.iter().map(|v| v / s).collect()
                } else {
                    vec![1.0 / ny as f64; ny]
                }
            })
            .collect();
        Channel {
            input_alphabet: self.x_alphabet.clone(),
            output_alphabet: self.y_alphabet.clone(),
            probs: rows.concat(),
        }
    }

    /// Pushes `X` through `channel_x` and `Y` through `channel_y`.
    pub fn post_process(&self, channel_x: &Channel, channel_y: &Channel) -> Result<JointPmf> {
        if channel_x.n_inputs() != self.nx() || channel_y.n_inputs() != self.ny() {
            return Err(Error::DimensionMismatch(
                "post-processing channels must accept the pmf alphabets".into(),
            ));
        }
        let (na, nb) = (channel_x.n_outputs(), channel_y.n_outputs());
        let mut out = vec![0.0; na * nb];
        for x in 0..self.nx() {
            for y in 0..self.ny() {
                let p = self.get(x, y);
                if p == 0.0 {
                    continue;
                }
                for a in 0..na {
                    let pa = p * channel_x.get(x, a);
                    for b in 0..nb {
                        out[a * nb + b] += pa * channel_y.get(y, b);
                    }
                }
            }
        }
        let rows: Vec<Vec<f64>> = out.chunks(nb).map(<[f64]>::to_vec).collect();
        validate_joint(&rows, channel_x.output_alphabet(), channel_y.output_alphabet())
    }

    /// Joint pmf of `(X1 X2, Y1 Y2)` for independent pairs.
    pub fn tensor(&self, other: &JointPmf) -> JointPmf {
        let (nx1, ny1, nx2, ny2) = (self.nx(), self.ny(), other.nx(), other.ny());
        let ny = ny1 * ny2;
        let mut probs = vec![0.0; nx1 * nx2 * ny];
        for x1 in 0..nx1 {
            for x2 in 0..nx2 {
                for y1 in 0..ny1 {
                    for y2 in 0..ny2 {
                        probs[(x1 * nx2 + x2) * ny + y1 * ny2 + y2] =
                            self.get(x1, y1) * other.get(x2, y2);
                    }
                }
            }
        }
        let pair = |a: &[String], b: &[String]| -> Vec<String> {
            a.iter()
                .flat_map(|u| b.iter().map(move |v| format!("{u}{v}")))
                .collect()
        };
        JointPmf {
            x_alphabet: pair(&self.x_alphabet, &other.x_alphabet),
            y_alphabet: pair(&self.y_alphabet, &other.y_alphabet),
            probs,
        }
    }
}

/// Conditional pmf with one row per input symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    input_alphabet: Vec<String>,
    output_alphabet: Vec<String>,
    probs: Vec<f64>,
}

impl Channel {
    /// Validates rows; each row is renormalized when within
    /// [`NORMALIZATION_SLACK`] of summing to one.
    pub fn new(
        matrix: &[Vec<f64>],
        input_labels: &[String],
        output_labels: &[String],
    ) -> Result<Self> {
        check_labels(input_labels)?;
        check_labels(output_labels)?;
        if matrix.len() != input_labels.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} rows for {} input labels",
                matrix.len(),
                input_labels.len()
            )));
        }
        check_entries(matrix, output_labels.len())?;
        let mut probs = Vec::with_capacity(matrix.len() * output_labels.len());
        for row in matrix {
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > NORMALIZATION_SLACK {
                return Err(Error::NotNormalized { sum: s });
            }
            probs.extend(row.iter().map(|v| v / s));
        }
        Ok(Channel {
            input_alphabet: input_labels.to_vec(),
            output_alphabet: output_labels.to_vec(),
            probs,
        })
    }

    pub fn from_rows(matrix: &[Vec<f64>]) -> Result<Self> {
        let ni = matrix.len();
        let no = matrix.first().map_or(0, Vec::len);
        Self::new(matrix, &default_labels(ni), &default_labels(no))
    }

    pub fn identity(n: usize) -> Result<Self> {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn binary_symmetric(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::OutOfRange { name: "p", value: p });
        }
        Self::from_rows(&[vec![1.0 - p, p], vec![p, 1.0 - p]])
    }

    /// Erasure channel on `n` inputs; output `n` is the erasure symbol.
    pub fn erasure(n: usize, epsilon: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::EpsilonOutOfRange(epsilon));
        }
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut r = vec![0.0; n + 1];
                r[i] = 1.0 - epsilon;
                r[n] = epsilon;
                r
            })
            .collect();
        let mut out = default_labels(n);
        out.push(ERASURE_LABEL.to_string());
        Self::new(&rows, &default_labels(n), &out)
    }

    pub fn n_inputs(&self) -> usize {
        self.input_alphabet.len()
    }

    pub fn n_outputs(&self) -> usize {
        self.output_alphabet.len()
    }

    pub fn input_alphabet(&self) -> &[String] {
        &self.input_alphabet
    }

    pub fn output_alphabet(&self) -> &[String] {
        &self.output_alphabet
    }

    #[inline]
    pub fn get(&self, input: usize, output: usize) -> f64 {
        self.probs[input * self.n_outputs() + output]
    }

    pub fn row(&self, input: usize) -> &[f64] {
        let no = self.n_outputs();
        &self.probs[input * no..(input + 1) * no]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n_inputs()).map(|a| self.row(a).to_vec()).collect()
    }

    /// Joint pmf `p_X(x) p(y|x)`.
    pub fn joint_with_input(&self, px: &[f64]) -> Result<JointPmf> {
        if px.len() != self.n_inputs() {
            return Err(Error::DimensionMismatch(format!(
                "input pmf has {} entries, channel has {} inputs",
                px.len(),
                self.n_inputs()
            )));
        }
        let rows: Vec<Vec<f64>> = px
            .iter()
            .enumerate()
            .map(|(a, &w)| self.row(a).iter().map(|v| w * v).collect())
            .collect();
        validate_joint(&rows, &self.input_alphabet, &self.output_alphabet)
    }

    /// Cascade `self` followed by `next`.
    pub fn compose(&self, next: &Channel) -> Result<Channel> {
        if next.n_inputs() != self.n_outputs() {
            return Err(Error::DimensionMismatch(
                "cascade alphabets do not line up".into(),
            ));
        }
        let rows: Vec<Vec<f64>> = (0..self.n_inputs())
            .map(|a| {
                (0..next.n_outputs())
                    .map(|c| {
                        (0..self.n_outputs())
                            .map(|b| self.get(a, b) * next.get(b, c))
                            .sum()
                    })
                    .collect()
            })
            .collect();
        Channel::new(&rows, &self.input_alphabet, &next.output_alphabet)
    }
}

/// Eavesdropper model attached to a source.
#[derive(Debug, Clone, PartialEq)]
pub enum Eve {
    /// `Z = (X, Y)` with probability `1 - epsilon`, otherwise the erasure symbol.
    Erasure { epsilon: f64 },
    /// Arbitrary `p_{Z|XY}` with inputs ordered x-major.
    General { channel: Channel },
}

/// Source `p_XY p_{Z|XY}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Source {
    joint: JointPmf,
    eve: Eve,
}

/// Attaches an erasure eavesdropper with erasure probability `epsilon`.
pub fn build_erasure_source(joint: JointPmf, epsilon: f64) -> Result<Source> {
    if !(0.0..=1.0).contains(&epsilon) || epsilon.is_nan() {
        return Err(Error::EpsilonOutOfRange(epsilon));
    }
    Ok(Source {
        joint,
        eve: Eve::Erasure { epsilon },
    })
}

fn pair_labels(joint: &JointPmf) -> Vec<String> {
    joint
        .x_alphabet()
        .iter()
        .flat_map(|x| joint.y_alphabet().iter().map(move |y| format!("({x},{y})")))
        .collect()
}

impl Source {
    /// Source with an arbitrary eavesdropper channel over `X x Y`.
    pub fn general(joint: JointPmf, channel: Channel) -> Result<Self> {
        if channel.n_inputs() != joint.nx() * joint.ny() {
            return Err(Error::DimensionMismatch(format!(
                "eve channel has {} inputs, expected |X||Y|={}",
                channel.n_inputs(),
                joint.nx() * joint.ny()
            )));
        }
        Ok(Source {
            joint,
            eve: Eve::General { channel },
        })
    }

    pub fn joint(&self) -> &JointPmf {
        &self.joint
    }

    pub fn eve(&self) -> &Eve {
        &self.eve
    }

    pub fn erasure_probability(&self) -> Option<f64> {
        match self.eve {
            Eve::Erasure { epsilon } => Some(epsilon),
            Eve::General { .. } => None,
        }
    }

    /// Materializes `p_{Z|XY}`. For an erasure eavesdropper the output
    /// alphabet is the erasure symbol followed by the pairs, x-major.
    pub fn eve_channel(&self) -> Channel {
        match &self.eve {
            Eve::General { channel } => channel.clone(),
            Eve::Erasure { epsilon } => {
                let n = self.joint.nx() * self.joint.ny();
                let mut probs = vec![0.0; n * (n + 1)];
                for i in 0..n {
                    probs[i * (n + 1)] = *epsilon;
                    probs[i * (n + 1) + 1 + i] = 1.0 - epsilon;
                }
                let labels = pair_labels(&self.joint);
                let mut out = Vec::with_capacity(n + 1);
                out.push(ERASURE_LABEL.to_string());
                out.extend(labels.iter().cloned());
                Channel {
                    input_alphabet: labels,
                    output_alphabet: out,
                    probs,
                }
            }
        }
    }

    /// Parses the JSON source format.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: SourceFile = serde_json::from_str(s)?;
        file.into_source()
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&SourceFile::from(self))?)
    }
}

/// On-disk source description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SourceFile {
    pub x_alphabet: Vec<String>,
    pub y_alphabet: Vec<String>,
    pub p_xy: Vec<Vec<f64>>,
    pub eve: EveSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum EveSpec {
    Erasure {
        epsilon: f64,
    },
    General {
        z_alphabet: Vec<String>,
        p_z_given_xy: Vec<Vec<f64>>,
    },
}

impl SourceFile {
    pub fn into_source(self) -> Result<Source> {
        let joint = validate_joint(&self.p_xy, &self.x_alphabet, &self.y_alphabet)?;
        match self.eve {
            EveSpec::Erasure { epsilon } => build_erasure_source(joint, epsilon),
            EveSpec::General {
                z_alphabet,
                p_z_given_xy,
            } => {
                let inputs = pair_labels(&joint);
                let channel = Channel::new(&p_z_given_xy, &inputs, &z_alphabet)?;
                Source::general(joint, channel)
            }
        }
    }
}

impl From<&Source> for SourceFile {
    fn from(s: &Source) -> Self {
        let eve = match &s.eve {
            Eve::Erasure { epsilon } => EveSpec::Erasure { epsilon: *epsilon },
            Eve::General { channel } => EveSpec::General {
                z_alphabet: channel.output_alphabet().to_vec(),
                p_z_given_xy: channel.to_rows(),
            },
        };
        SourceFile {
            x_alphabet: s.joint.x_alphabet().to_vec(),
            y_alphabet: s.joint.y_alphabet().to_vec(),
            p_xy: s.joint.to_rows(),
            eve,
        }
    }
}

/// Weights `(a, b)` certifying `q(x,y) = a(x) b(y) p(x,y)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreceqWitness {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl PreceqWitness {
    /// `a(x) b(y) p(x,y)` as a row-major buffer.
    pub fn reconstruct(&self, p: &JointPmf) -> Vec<f64> {
        let ny = p.ny();
        (0..p.nx() * ny)
            .map(|i| self.a[i / ny] * self.b[i % ny] * p.probs()[i])
            .collect()
    }
}

const WITNESS_TOL: f64 = 1e-10;

/// Decides whether `q ⪯ p` and returns the weights when it does.
///
/// Rows and columns where `q` has no mass get zero weight. On the remaining
/// rectangle every cell supported by `p` must be supported by `q`, and the
/// log-ratio `ln q - ln p` must split as `alpha(x) + beta(y)`; this is solved
/// by BFS over the bipartite support graph with `beta = 0` at the first
/// column reached in each component.
pub fn preceq_check(q: &JointPmf, p: &JointPmf) -> Result<Option<PreceqWitness>> {
    if q.x_alphabet() != p.x_alphabet() || q.y_alphabet() != p.y_alphabet() {
        return Err(Error::AlphabetMismatch(
            "q and p must share both alphabets".into(),
        ));
    }
    let (nx, ny) = (p.nx(), p.ny());
    if (0..nx * ny).any(|i| q.probs()[i] > 0.0 && p.probs()[i] == 0.0) {
        return Ok(None);
    }
    let qx = q.x_marginal();
    let qy = q.y_marginal();
    let active_x: Vec<bool> = qx.iter().map(|&v| v > 0.0).collect();
    let active_y: Vec<bool> = qy.iter().map(|&v| v > 0.0).collect();

    // Inside the active rectangle a(x) b(y) > 0, so p > 0 forces q > 0.
    for x in (0..nx).filter(|&x| active_x[x]) {
        for y in (0..ny).filter(|&y| active_y[y]) {
            if p.get(x, y) > 0.0 && q.get(x, y) == 0.0 {
                return Ok(None);
            }
        }
    }

    let mut alpha: Vec<Option<f64>> = vec![None; nx];
    let mut beta: Vec<Option<f64>> = vec![None; ny];
    let edge = |x: usize, y: usize| active_x[x] && active_y[y] && p.get(x, y) > 0.0;
    let log_ratio = |x: usize, y: usize| q.get(x, y).ln() - p.get(x, y).ln();

    // Nodes 0..ny are columns, ny..ny+nx are rows.
    let mut queue = VecDeque::new();
    for start in 0..ny {
        if !active_y[start] || beta[start].is_some() {
            continue;
        }
        beta[start] = Some(0.0);
        queue.push_back(start);
        while let Some(node) = queue.pop_front() {
            if node < ny {
                let y = node;
                let b = beta[y].unwrap();
                for x in 0..nx {
                    if edge(x, y) && alpha[x].is_none() {
                        alpha[x] = Some(log_ratio(x, y) - b);
                        queue.push_back(ny + x);
                    }
                }
            } else {
                let x = node - ny;
                let a = alpha[x].unwrap();
                for y in 0..ny {
                    if edge(x, y) && beta[y].is_none() {
                        beta[y] = Some(log_ratio(x, y) - a);
                        queue.push_back(y);
                    }
                }
            }
        }
    }

    let witness = PreceqWitness {
        a: alpha.iter().map(|v| v.map_or(0.0, f64::exp)).collect(),
        b: beta.iter().map(|v| v.map_or(0.0, f64::exp)).collect(),
    };
    let rebuilt = witness.reconstruct(p);
    let consistent = rebuilt
        .iter()
        .zip(q.probs())
        .all(|(r, t)| (r - t).abs() <= WITNESS_TOL);
    Ok(consistent.then_some(witness))
}

/// Local acceptance channels that let the parties simulate `q = a b p` from
/// `p` by public selection.
#[derive(Debug, Clone)]
pub struct SimulationChannels {
    /// `p_{X'|X}` over outputs `{"0", "1"}`; output `0` means accept.
    pub alice: Channel,
    /// `p_{Y'|Y}` over outputs `{"0", "1"}`.
    pub bob: Channel,
    /// `P(X'=0, Y'=0) = 1 / (max a * max b)`.
    pub acceptance_probability: f64,
}

impl SimulationChannels {
    /// Law of `(X, Y, Z)` conditioned on both parties accepting, indexed
    /// `[(x * ny + y) * nz + z]`.
    pub fn conditional_law(&self, source: &Source) -> Vec<f64> {
        let joint = source.joint();
        let eve = source.eve_channel();
        let (nx, ny, nz) = (joint.nx(), joint.ny(), eve.n_outputs());
        let mut law = vec![0.0; nx * ny * nz];
        let mut total = 0.0;
        for x in 0..nx {
            for y in 0..ny {
                let w = self.alice.get(x, 0) * self.bob.get(y, 0) * joint.get(x, y);
                for z in 0..nz {
                    let v = w * eve.get(x * ny + y, z);
                    law[(x * ny + y) * nz + z] = v;
                    total += v;
                }
            }
        }
        if total > 0.0 {
            law.iter_mut().for_each(|v| *v /= total);
        }
        law
    }
}

/// Builds the acceptance channels `a(x)/max a` and `b(y)/max b`.
pub fn preceq_simulation_channels(
    source: &Source,
    witness: &PreceqWitness,
) -> Result<SimulationChannels> {
    let joint = source.joint();
    if witness.a.len() != joint.nx() || witness.b.len() != joint.ny() {
        return Err(Error::DimensionMismatch(
            "witness lengths must match the alphabets".into(),
        ));
    }
    let a_max = witness.a.iter().copied().fold(0.0, f64::max);
    let b_max = witness.b.iter().copied().fold(0.0, f64::max);
    if a_max <= 0.0 || b_max <= 0.0 {
        return Err(Error::DegenerateWitness);
    }
    let accept = |w: &[f64], max: f64, labels: &[String]| -> Result<Channel> {
        let rows: Vec<Vec<f64>> = w
            .iter()
            .map(|&v| {
                let keep = (v / max).clamp(0.0, 1.0);
                vec![keep, 1.0 - keep]
            })
            .collect();
        Channel::new(&rows, labels, &default_labels(2))
    };
    Ok(SimulationChannels {
        alice: accept(&witness.a, a_max, joint.x_alphabet())?,
        bob: accept(&witness.b, b_max, joint.y_alphabet())?,
        acceptance_probability: 1.0 / (a_max * b_max),
    })
}
