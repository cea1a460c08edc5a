//! Generators for the hypothesis classes under study.
//!
//! Finite classes over the sign cube {±1}ⁿ:
//!
//! * `parities` — all 2ⁿ parity characters χ_S(x) = ∏_{i∈S} x_i, whose
//!   weighted class matrix is a scaled Hadamard matrix with orthonormal rows.
//! * `one_sparse` — the n coordinate projections h_i(x) = x_i.
//! * `pattern_decision_list` — h(x) = −1 iff the largest index i of a block
//!   of h matching the corresponding block of x is odd (+1 if none match).
//!
//! Functional classes over Gaussian inputs:
//!
//! * the anchored zigzag ψ_a, an odd, 1-Lipschitz, [−1,1]-bounded triangle
//!   wave with flat ±1 tails outside [−a, a], together with its exact
//!   decomposition into a+2 ReLU neurons with coefficients of magnitude ≤ 2;
//! * ReLU neuron classes [⟨w,x⟩+b]_+ under norm/bias budgets;
//! * sampled zigzag classes {ψ_a(⟨u,x⟩)} with ‖u‖₂ = n and a = 6n²+1.
//!
//! Bridging operations: Monte Carlo correlation estimates under the standard
//! Gaussian input law, linear combination / scaling of classes, and finite
//! restriction of a functional class to sampled points.
//!
//! Cube encoding convention: domain point `j` has coordinate i equal to +1
//! when bit i of `j` is clear and −1 when it is set.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::core::{CoreError, DistributionOverX, FiniteHypothesisClass, LabelKind};
use crate::matrix::{dot, norm2, Matrix};
use crate::rng::indexed_rng;

/// Largest supported cube dimension (2¹² = 4096 points/hypotheses).
pub const MAX_CUBE_BITS: usize = 12;

/// Errors raised by class generators.
#[derive(Debug, Error)]
pub enum ConstructionError {
    #[error("{what} = {value} is outside 1..={max}")]
    SizeOutOfRange {
        what: &'static str,
        value: usize,
        max: usize,
    },
    #[error("zigzag parameter a = {0} must be odd")]
    EvenZigzagParameter(u64),
    #[error("unknown hypothesis id '{0}' in combination")]
    UnknownHypothesis(String),
    #[error("combination coefficients have Σa² = {sum_sq}, exceeding the budget {budget}")]
    CoefficientBudgetExceeded { sum_sq: f64, budget: f64 },
    #[error("input dimension mismatch: {left} vs {right}")]
    InputDimMismatch { left: usize, right: usize },
    #[error("ReLU neuron {index} violates its budget: ‖w‖ = {norm} (W = {weight_bound}), |b| = {bias} (B = {bias_bound})")]
    ReluBudgetViolation {
        index: usize,
        norm: f64,
        weight_bound: f64,
        bias: f64,
        bias_bound: f64,
    },
    #[error("zigzag weight {index} has norm {norm}, expected {expected} within 1e-9")]
    ZigzagNormViolation {
        index: usize,
        norm: f64,
        expected: f64,
    },
    #[error("combination is empty")]
    EmptyCombination,
    #[error(transparent)]
    Core(#[from] CoreError),
}

/// Sign of coordinate `i` of cube point `mask`: +1 when the bit is clear.
pub fn cube_coordinate(mask: usize, i: usize) -> f64 {
    if mask >> i & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// The full sign vector of cube point `mask` in an `n`-bit cube.
pub fn cube_point(mask: usize, n: usize) -> Vec<f64> {
    (0..n).map(|i| cube_coordinate(mask, i)).collect()
}

fn check_cube_bits(what: &'static str, n: usize) -> Result<(), ConstructionError> {
    if n < 1 || n > MAX_CUBE_BITS {
        return Err(ConstructionError::SizeOutOfRange {
            what,
            value: n,
            max: MAX_CUBE_BITS,
        });
    }
    Ok(())
}

/// All 2ⁿ parity functions over the n-bit sign cube: hypothesis `S{s}` has
/// value (−1)^popcount(s AND j) at point `x{j}` — the ±1 character table.
///
/// Distinct parities are orthogonal under the uniform distribution, so the
/// weighted class matrix has all singular values equal to 1.
pub fn parities(n: usize) -> Result<FiniteHypothesisClass, ConstructionError> {
    check_cube_bits("n", n)?;
    let size = 1usize << n;
    let mut m = Matrix::zeros(size, size);
    for s in 0..size {
        for j in 0..size {
            m[(s, j)] = if (s & j).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
        }
    }
    let domain = (0..size).map(|j| format!("x{j}")).collect();
    let hyps = (0..size).map(|s| format!("S{s}")).collect();
    Ok(FiniteHypothesisClass::new(
        domain,
        hyps,
        m,
        LabelKind::Binary,
    )?)
}

/// The n coordinate projections h_i(x) = x_i over the n-bit sign cube
/// (hypothesis ids `coord1..coordn`, 1-based like the coordinates).
pub fn one_sparse(n: usize) -> Result<FiniteHypothesisClass, ConstructionError> {
    check_cube_bits("n", n)?;
    let size = 1usize << n;
    let mut m = Matrix::zeros(n, size);
    for i in 0..n {
        for j in 0..size {
            m[(i, j)] = cube_coordinate(j, i);
        }
    }
    let domain = (0..size).map(|j| format!("x{j}")).collect();
    let hyps = (1..=n).map(|i| format!("coord{i}")).collect();
    Ok(FiniteHypothesisClass::new(
        domain,
        hyps,
        m,
        LabelKind::Binary,
    )?)
}

/// Pattern decision lists with k blocks of p bits (n = k·p total bits):
/// hypothesis h outputs −1 on x iff some block of h equals the matching
/// block of x and the largest such block index (1-based) is odd; +1 when no
/// block matches.
pub fn pattern_decision_list(
    k: usize,
    p: usize,
) -> Result<FiniteHypothesisClass, ConstructionError> {
    let n = k.checked_mul(p).unwrap_or(usize::MAX);
    check_cube_bits("k·p", n)?;
    let size = 1usize << n;
    let block_mask = (1usize << p) - 1;
    let mut m = Matrix::zeros(size, size);
    for h in 0..size {
        for x in 0..size {
            let diff = h ^ x;
            let mut largest = 0usize;
            for i in 1..=k {
                if diff >> ((i - 1) * p) & block_mask == 0 {
                    largest = i;
                }
            }
            m[(h, x)] = if largest % 2 == 1 { -1.0 } else { 1.0 };
        }
    }
    let domain = (0..size).map(|j| format!("x{j}")).collect();
    let hyps = (0..size).map(|h| format!("h{h}")).collect();
    Ok(FiniteHypothesisClass::new(
        domain,
        hyps,
        m,
        LabelKind::Binary,
    )?)
}

// ---------------------------------------------------------------------------
// The anchored zigzag ψ_a and its ReLU decomposition
// ---------------------------------------------------------------------------

/// Zigzag steepness parameter for input dimension n: a = 6n² + 1 (odd).
pub fn zigzag_parameter(n: usize) -> u64 {
    6 * (n as u64) * (n as u64) + 1
}

/// Parameter budget (W, B) for a ReLU class large enough to host the
/// alternating-ReLU decomposition of every radius-n zigzag hypothesis with
/// slack: W = 14n³ on weight norms, B = 98n⁴ on biases.
pub fn relu_parameter_bounds(n: usize) -> (f64, f64) {
    let nf = n as f64;
    (14.0 * nf.powi(3), 98.0 * nf.powi(4))
}

/// The anchored zigzag: odd, 1-Lipschitz, piecewise-linear with slopes ±1,
/// anchored at ψ_a(a) = 1, alternating through every odd integer in
/// (−a, a), and constant ±1 outside [−a, a].
///
/// Closed form on |z| < a: with q = (a − z)/2 and j = ⌊q⌋,
/// ψ_a(z) = (−1)^j · (1 − 2(q − j)).
pub fn psi(a: u64, z: f64) -> Result<f64, ConstructionError> {
    if a % 2 == 0 {
        return Err(ConstructionError::EvenZigzagParameter(a));
    }
    Ok(psi_unchecked(a, z))
}

fn psi_unchecked(a: u64, z: f64) -> f64 {
    let af = a as f64;
    if z >= af {
        return 1.0;
    }
    if z <= -af {
        return -1.0;
    }
    let q = (af - z) / 2.0;
    let j = q.floor();
    let frac = q - j;
    let sign = if (j as i64) % 2 == 0 { 1.0 } else { -1.0 };
    sign * (1.0 - 2.0 * frac)
}

/// One term of the 1-D ReLU decomposition: `coefficient · [weight·z + bias]₊`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReluTerm {
    pub coefficient: f64,
    pub weight: f64,
    pub bias: f64,
}

/// Exact decomposition of ψ_a into a+2 ReLU terms:
///
/// ```text
/// ψ_a(z) = −[1]₊ + [z+a]₊ + Σ_{i=1}^{a−1} 2(−1)^i·[z+a−2i]₊ − [z−a]₊
/// ```
///
/// Every coefficient has magnitude ≤ 2 and the squared-coefficient sum is
/// 4a − 1. For a = 6n²+1 this is 6n²+3 terms.
pub fn psi_relu_terms(a: u64) -> Result<Vec<ReluTerm>, ConstructionError> {
    if a % 2 == 0 {
        return Err(ConstructionError::EvenZigzagParameter(a));
    }
    let af = a as f64;
    let mut terms = Vec::with_capacity(a as usize + 2);
    terms.push(ReluTerm {
        coefficient: -1.0,
        weight: 0.0,
        bias: 1.0,
    });
    terms.push(ReluTerm {
        coefficient: 1.0,
        weight: 1.0,
        bias: af,
    });
    for i in 1..a {
        terms.push(ReluTerm {
            coefficient: if i % 2 == 1 { -2.0 } else { 2.0 },
            weight: 1.0,
            bias: af - 2.0 * i as f64,
        });
    }
    terms.push(ReluTerm {
        coefficient: -1.0,
        weight: 1.0,
        bias: -af,
    });
    Ok(terms)
}

/// Sum of the ReLU terms at z (test oracle for the closed form).
pub fn psi_from_relu_terms(terms: &[ReluTerm], z: f64) -> f64 {
    terms
        .iter()
        .map(|t| t.coefficient * (t.weight * z + t.bias).max(0.0))
        .sum()
}

// ---------------------------------------------------------------------------
// Functional classes over Gaussian inputs
// ---------------------------------------------------------------------------

/// Hypothesis parameters of a functional (infinite-domain) class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FunctionalParams {
    /// Bare ReLU neurons x ↦ [⟨w,x⟩ + b]₊ under budgets ‖w‖ ≤ W, |b| ≤ B.
    Relu {
        neurons: Vec<(Vec<f64>, f64)>,
        weight_bound: f64,
        bias_bound: f64,
    },
    /// Zigzag hypotheses x ↦ ψ_a(⟨u,x⟩) with ‖u‖₂ = input_dim, a = 6n²+1.
    Zigzag { weights: Vec<Vec<f64>>, a: u64 },
    /// Scaled linear combinations over a base class:
    /// x ↦ scale · Σ_i a_i · base_{idx_i}(x).
    Combined {
        base: Box<FunctionalClass>,
        combos: Vec<Vec<(usize, f64)>>,
        scale: f64,
    },
}

/// A class of real-valued functions on Rⁿ given by parameters, evaluated on
/// demand (never tabulated unless explicitly restricted).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalClass {
    pub input_dim: usize,
    pub params: FunctionalParams,
}

impl FunctionalClass {
    /// ReLU neuron class with budget validation.
    pub fn relu(
        input_dim: usize,
        neurons: Vec<(Vec<f64>, f64)>,
        weight_bound: f64,
        bias_bound: f64,
    ) -> Result<Self, ConstructionError> {
        for (i, (w, b)) in neurons.iter().enumerate() {
            if w.len() != input_dim {
                return Err(ConstructionError::InputDimMismatch {
                    left: w.len(),
                    right: input_dim,
                });
            }
            let norm = norm2(w);
            if norm > weight_bound + 1e-9 || b.abs() > bias_bound + 1e-9 {
                return Err(ConstructionError::ReluBudgetViolation {
                    index: i,
                    norm,
                    weight_bound,
                    bias: b.abs(),
                    bias_bound,
                });
            }
        }
        Ok(Self {
            input_dim,
            params: FunctionalParams::Relu {
                neurons,
                weight_bound,
                bias_bound,
            },
        })
    }

    /// Zigzag class: every weight must have norm exactly `input_dim` (the
    /// radius-n sphere), a = 6n²+1.
    pub fn zigzag(input_dim: usize, weights: Vec<Vec<f64>>) -> Result<Self, ConstructionError> {
        let expected = input_dim as f64;
        for (i, u) in weights.iter().enumerate() {
            if u.len() != input_dim {
                return Err(ConstructionError::InputDimMismatch {
                    left: u.len(),
                    right: input_dim,
                });
            }
            let norm = norm2(u);
            if (norm - expected).abs() > 1e-9 {
                return Err(ConstructionError::ZigzagNormViolation {
                    index: i,
                    norm,
                    expected,
                });
            }
        }
        Ok(Self {
            input_dim,
            params: FunctionalParams::Zigzag {
                weights,
                a: zigzag_parameter(input_dim),
            },
        })
    }

    pub fn num_hypotheses(&self) -> usize {
        match &self.params {
            FunctionalParams::Relu { neurons, .. } => neurons.len(),
            FunctionalParams::Zigzag { weights, .. } => weights.len(),
            FunctionalParams::Combined { combos, .. } => combos.len(),
        }
    }

    /// Hypothesis ids, prefix-coded by kind.
    pub fn hypothesis_labels(&self) -> Vec<String> {
        let prefix = match &self.params {
            FunctionalParams::Relu { .. } => "relu",
            FunctionalParams::Zigzag { .. } => "zig",
            FunctionalParams::Combined { .. } => "comb",
        };
        (0..self.num_hypotheses())
            .map(|i| format!("{prefix}{i}"))
            .collect()
    }

    /// Evaluate hypothesis `index` at point `x`. Panics on an out-of-range
    /// index or wrong input dimension (use ids + `hypothesis_labels` for
    /// checked lookups).
    pub fn evaluate(&self, index: usize, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.input_dim, "input dimension mismatch");
        assert!(index < self.num_hypotheses(), "hypothesis index out of range");
        match &self.params {
            FunctionalParams::Relu { neurons, .. } => {
                let (w, b) = &neurons[index];
                (dot(w, x) + b).max(0.0)
            }
            FunctionalParams::Zigzag { weights, a } => {
                psi_unchecked(*a, dot(&weights[index], x))
            }
            FunctionalParams::Combined {
                base,
                combos,
                scale,
            } => {
                let sum: f64 = combos[index]
                    .iter()
                    .map(|&(i, a)| a * base.evaluate(i, x))
                    .sum();
                scale * sum
            }
        }
    }
}

/// Sample a zigzag class: `t` weight vectors uniform on the radius-n sphere
/// (Gaussian draws normalized to norm n; draws below norm 1e-12 rejected),
/// deterministic per seed.
pub fn zigzag_class_sample(n: usize, t: usize, seed: u64) -> FunctionalClass {
    assert!(n >= 1 && t >= 1, "need n ≥ 1 and t ≥ 1");
    let mut weights = Vec::with_capacity(t);
    for i in 0..t {
        let mut rng = indexed_rng(seed, "zigzag-weights", i as u64);
        let u = loop {
            let raw: Vec<f64> = (0..n)
                .map(|_| StandardNormal.sample(&mut rng))
                .collect();
            let norm = norm2(&raw);
            if norm > 1e-12 {
                let scale = n as f64 / norm;
                break raw.iter().map(|v| v * scale).collect::<Vec<f64>>();
            }
        };
        weights.push(u);
    }
    FunctionalClass::zigzag(n, weights).expect("sampled weights have exact norm n")
}

/// The ReLU-neuron decomposition of x ↦ ψ_a(⟨u,x⟩): neuron i has weight
/// vector `term_i.weight · u` and bias `term_i.bias`; returns the neurons
/// and the matching coefficients.
pub fn zigzag_relu_neurons(
    u: &[f64],
    a: u64,
) -> Result<(Vec<(Vec<f64>, f64)>, Vec<f64>), ConstructionError> {
    let terms = psi_relu_terms(a)?;
    let neurons = terms
        .iter()
        .map(|t| (u.iter().map(|v| v * t.weight).collect(), t.bias))
        .collect();
    let coefficients = terms.iter().map(|t| t.coefficient).collect();
    Ok((neurons, coefficients))
}

// ---------------------------------------------------------------------------
// Monte Carlo correlation under the Gaussian input law
// ---------------------------------------------------------------------------

/// A checked (class, hypothesis index) handle.
#[derive(Debug, Clone, Copy)]
pub struct FunctionalHypothesis<'a> {
    pub class: &'a FunctionalClass,
    pub index: usize,
}

impl<'a> FunctionalHypothesis<'a> {
    pub fn new(class: &'a FunctionalClass, index: usize) -> Result<Self, ConstructionError> {
        if index >= class.num_hypotheses() {
            return Err(ConstructionError::UnknownHypothesis(format!(
                "index {index} of {}",
                class.num_hypotheses()
            )));
        }
        Ok(Self { class, index })
    }
}

/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GramEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Monte Carlo estimate of ⟨f,g⟩ = E[f(x)·g(x)] for x ~ N(0, Iₙ):
/// plain sample mean over `samples` i.i.d. draws, standard error from the
/// unbiased sample variance. Deterministic per seed (per-sample child
/// streams, fixed-order accumulation).
pub fn gaussian_gram_estimate(
    f: &FunctionalHypothesis,
    g: &FunctionalHypothesis,
    samples: usize,
    seed: u64,
) -> Result<GramEstimate, ConstructionError> {
    if f.class.input_dim != g.class.input_dim {
        return Err(ConstructionError::InputDimMismatch {
            left: f.class.input_dim,
            right: g.class.input_dim,
        });
    }
    assert!(samples >= 1, "need at least one sample");
    let n = f.class.input_dim;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for i in 0..samples {
        let mut rng = indexed_rng(seed, "gaussian-gram", i as u64);
        let x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let v = f.class.evaluate(f.index, &x) * g.class.evaluate(g.index, &x);
        sum += v;
        sum_sq += v * v;
    }
    let mean = sum / samples as f64;
    let std_error = if samples < 2 {
        0.0
    } else {
        let var = ((sum_sq - samples as f64 * mean * mean) / (samples as f64 - 1.0)).max(0.0);
        (var / samples as f64).sqrt()
    };
    Ok(GramEstimate {
        mean,
        std_error,
        samples,
    })
}

// ---------------------------------------------------------------------------
// Combinations, scaling, finite restriction
// ---------------------------------------------------------------------------

/// Base class of a combination: finite table or functional parameters.
#[derive(Debug, Clone)]
pub enum CombinationBase {
    Finite(FiniteHypothesisClass),
    Functional(FunctionalClass),
}

/// One combined hypothesis: Σ coefficient · base hypothesis, by id.
#[derive(Debug, Clone)]
pub struct CombinationTerm {
    pub coefficients: Vec<(String, f64)>,
}

/// Specification of a scaled linear-combination class
/// {scale · Σ a_i h_i : each combination has Σ a_i² ≤ coefficient_budget}.
#[derive(Debug, Clone)]
pub struct CombinationSpec {
    pub base: CombinationBase,
    pub terms: Vec<CombinationTerm>,
    pub scale: f64,
    pub coefficient_budget: f64,
}

/// Result of building a combination: same kind as the base.
#[derive(Debug, Clone)]
pub enum BuiltClass {
    Finite(FiniteHypothesisClass),
    Functional(FunctionalClass),
}

/// Build the combination class. Finite bases are evaluated exactly into a
/// new table; functional bases stay parameterized.
pub fn build_combination(spec: &CombinationSpec) -> Result<BuiltClass, ConstructionError> {
    if spec.terms.is_empty() {
        return Err(ConstructionError::EmptyCombination);
    }
    for term in &spec.terms {
        let sum_sq: f64 = term.coefficients.iter().map(|(_, a)| a * a).sum();
        if sum_sq > spec.coefficient_budget + 1e-9 {
            return Err(ConstructionError::CoefficientBudgetExceeded {
                sum_sq,
                budget: spec.coefficient_budget,
            });
        }
    }
    match &spec.base {
        CombinationBase::Finite(base) => {
            let cols = base.num_points();
            let mut m = Matrix::zeros(spec.terms.len(), cols);
            for (t, term) in spec.terms.iter().enumerate() {
                for (id, a) in &term.coefficients {
                    let row = base
                        .hypothesis_index(id)
                        .ok_or_else(|| ConstructionError::UnknownHypothesis(id.clone()))?;
                    for j in 0..cols {
                        m[(t, j)] += a * base.value(row, j);
                    }
                }
                for j in 0..cols {
                    m[(t, j)] *= spec.scale;
                }
            }
            let hyps = (0..spec.terms.len()).map(|t| format!("c{t}")).collect();
            Ok(BuiltClass::Finite(FiniteHypothesisClass::new(
                base.domain_labels().to_vec(),
                hyps,
                m,
                LabelKind::Real,
            )?))
        }
        CombinationBase::Functional(base) => {
            let labels = base.hypothesis_labels();
            let mut combos = Vec::with_capacity(spec.terms.len());
            for term in &spec.terms {
                let mut combo = Vec::with_capacity(term.coefficients.len());
                for (id, a) in &term.coefficients {
                    let idx = labels
                        .iter()
                        .position(|l| l == id)
                        .ok_or_else(|| ConstructionError::UnknownHypothesis(id.clone()))?;
                    combo.push((idx, *a));
                }
                combos.push(combo);
            }
            Ok(BuiltClass::Functional(FunctionalClass {
                input_dim: base.input_dim,
                params: FunctionalParams::Combined {
                    base: Box::new(base.clone()),
                    combos,
                    scale: spec.scale,
                },
            }))
        }
    }
}

/// The `m` standard-Gaussian points used by `finite_restriction` for a
/// given seed (exposed so callers can re-derive the sampled inputs).
pub fn gaussian_points(n: usize, m: usize, seed: u64) -> Vec<Vec<f64>> {
    (0..m)
        .map(|i| {
            let mut rng = indexed_rng(seed, "gaussian-domain", i as u64);
            (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
        })
        .collect()
}

/// Restrict a functional class to `m_points` sampled standard-Gaussian
/// inputs: tabulate every hypothesis and return the finite class with the
/// uniform empirical distribution. Deterministic per seed.
pub fn finite_restriction(
    f: &FunctionalClass,
    m_points: usize,
    seed: u64,
) -> Result<(FiniteHypothesisClass, DistributionOverX), ConstructionError> {
    if m_points < 1 {
        return Err(ConstructionError::SizeOutOfRange {
            what: "m_points",
            value: m_points,
            max: usize::MAX,
        });
    }
    let points = gaussian_points(f.input_dim, m_points, seed);
    let t = f.num_hypotheses();
    let mut m = Matrix::zeros(t, m_points);
    for h in 0..t {
        for (j, x) in points.iter().enumerate() {
            m[(h, j)] = f.evaluate(h, x);
        }
    }
    let domain = (0..m_points).map(|j| format!("g{j}")).collect();
    let class = FiniteHypothesisClass::new(domain, f.hypothesis_labels(), m, LabelKind::Real)?;
    Ok((class, DistributionOverX::uniform(m_points)))
}

/// Convenience: draw a single standard-Gaussian input point from an
/// arbitrary generator (used by Monte Carlo loops elsewhere).
pub fn gaussian_input(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}
