//! Domain vocabulary: finite hypothesis classes, distributions, losses.
//!
//! A finite class over a finite domain is stored as a dense real matrix with
//! one row per hypothesis and one column per domain point, so a class *is*
//! its sign/value matrix. A distribution is a probability vector aligned with
//! the domain columns, and the four supported losses are
//!
//! ```text
//! zero_one(ŷ, y) = 1{ŷ·y ≤ 0}          (a prediction of exactly 0 counts as an error)
//! margin(ŷ, y)   = 1{ŷ·y ≤ 1}
//! hinge(ŷ, y)    = max(0, 1 − ŷ·y)
//! squared(ŷ, y)  = ½·(ŷ − y)²
//! ```
//!
//! For ±1-valued predictions and targets the squared loss is exactly twice
//! the 0/1 loss pointwise, which several dimension arguments in `measures`
//! rely on. Everything here is immutable after construction and every
//! operation is a pure function.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::Matrix;

/// Equality tolerance for probability sums and norm checks.
pub const NORM_TOL: f64 = 1e-9;

/// Largest supported side length of a class matrix (desk-scale guard).
pub const MAX_SIDE: usize = 4096;

/// Errors raised by the domain layer.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid class: {0}")]
    InvalidClass(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("loss {loss} requires a ±1 target, got y = {y}")]
    NonBinaryTarget { loss: &'static str, y: f64 },
    #[error("length mismatch: predictions {predictions}, weights {weights}, targets {targets}")]
    LengthMismatch {
        predictions: usize,
        weights: usize,
        targets: usize,
    },
    #[error("hypothesis '{id}' (row {row}) has zero norm under the distribution")]
    DegenerateHypothesis { id: String, row: usize },
    #[error("malformed JSON: {0}")]
    Json(String),
}

/// Whether a class is ±1-valued or real-valued.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelKind {
    Binary,
    Real,
}

/// A finite hypothesis class: one matrix row per hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteHypothesisClass {
    domain_labels: Vec<String>,
    hypothesis_labels: Vec<String>,
    values: Matrix,
    label_kind: LabelKind,
}

fn has_duplicates(labels: &[String]) -> Option<&str> {
    let mut seen = std::collections::BTreeSet::new();
    labels.iter().find(|l| !seen.insert(l.as_str())).map(|s| s.as_str())
}

impl FiniteHypothesisClass {
    /// Validated constructor: shapes, finiteness, ±1 entries for binary
    /// classes, duplicate-free labels, desk-scale side lengths.
    pub fn new(
        domain_labels: Vec<String>,
        hypothesis_labels: Vec<String>,
        values: Matrix,
        label_kind: LabelKind,
    ) -> Result<Self, CoreError> {
        if values.rows() != hypothesis_labels.len() {
            return Err(CoreError::InvalidClass(format!(
                "{} hypothesis labels but {} matrix rows",
                hypothesis_labels.len(),
                values.rows()
            )));
        }
        if values.cols() != domain_labels.len() {
            return Err(CoreError::InvalidClass(format!(
                "{} domain labels but {} matrix columns",
                domain_labels.len(),
                values.cols()
            )));
        }
        if domain_labels.is_empty() || hypothesis_labels.is_empty() {
            return Err(CoreError::InvalidClass(
                "class needs at least one hypothesis and one domain point".into(),
            ));
        }
        if values.rows() > MAX_SIDE || values.cols() > MAX_SIDE {
            return Err(CoreError::InvalidClass(format!(
                "class is {}x{}, which exceeds the supported {}x{} desk scale",
                values.rows(),
                values.cols(),
                MAX_SIDE,
                MAX_SIDE
            )));
        }
        if !values.all_finite() {
            return Err(CoreError::InvalidClass("non-finite matrix entry".into()));
        }
        if label_kind == LabelKind::Binary {
            if let Some(bad) = values.data().iter().find(|v| v.abs() != 1.0) {
                return Err(CoreError::InvalidClass(format!(
                    "binary class contains non-±1 entry {bad}"
                )));
            }
        }
        if let Some(d) = has_duplicates(&domain_labels) {
            return Err(CoreError::InvalidClass(format!("duplicate domain label '{d}'")));
        }
        if let Some(d) = has_duplicates(&hypothesis_labels) {
            return Err(CoreError::InvalidClass(format!(
                "duplicate hypothesis label '{d}'"
            )));
        }
        Ok(Self {
            domain_labels,
            hypothesis_labels,
            values,
            label_kind,
        })
    }

    /// Convenience constructor with numbered labels `x0..` / `h0..`.
    pub fn from_matrix(values: Matrix, label_kind: LabelKind) -> Result<Self, CoreError> {
        let domain = (0..values.cols()).map(|j| format!("x{j}")).collect();
        let hyps = (0..values.rows()).map(|i| format!("h{i}")).collect();
        Self::new(domain, hyps, values, label_kind)
    }

    pub fn domain_labels(&self) -> &[String] {
        &self.domain_labels
    }

    pub fn hypothesis_labels(&self) -> &[String] {
        &self.hypothesis_labels
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn label_kind(&self) -> LabelKind {
        self.label_kind
    }

    /// Number of hypotheses (matrix rows).
    pub fn num_hypotheses(&self) -> usize {
        self.values.rows()
    }

    /// Number of domain points (matrix columns).
    pub fn num_points(&self) -> usize {
        self.values.cols()
    }

    /// Value h(x) by row/column index.
    pub fn value(&self, h: usize, x: usize) -> f64 {
        self.values[(h, x)]
    }

    /// Row index of a hypothesis id, if present.
    pub fn hypothesis_index(&self, id: &str) -> Option<usize> {
        self.hypothesis_labels.iter().position(|l| l == id)
    }

    /// Column index of a domain id, if present.
    pub fn domain_index(&self, id: &str) -> Option<usize> {
        self.domain_labels.iter().position(|l| l == id)
    }

    /// Serialize to the normative JSON file format.
    pub fn to_json(&self) -> String {
        let file = ClassFile {
            domain: self.domain_labels.clone(),
            hypotheses: self.hypothesis_labels.clone(),
            label_kind: self.label_kind,
            values: (0..self.values.rows())
                .map(|i| self.values.row(i).to_vec())
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("class serialization cannot fail")
    }

    /// Parse and validate the normative JSON file format.
    pub fn from_json(text: &str) -> Result<Self, CoreError> {
        let file: ClassFile =
            serde_json::from_str(text).map_err(|e| CoreError::Json(e.to_string()))?;
        let rows = file.values.len();
        let cols = file.values.first().map_or(0, Vec::len);
        if file.values.iter().any(|r| r.len() != cols) {
            return Err(CoreError::Json("ragged values matrix".into()));
        }
        let values = Matrix::from_vec(rows, cols, file.values.into_iter().flatten().collect());
        Self::new(file.domain, file.hypotheses, values, file.label_kind)
    }
}

/// Normative on-disk shape of a class file.
#[derive(Serialize, Deserialize)]
struct ClassFile {
    domain: Vec<String>,
    hypotheses: Vec<String>,
    label_kind: LabelKind,
    values: Vec<Vec<f64>>,
}

/// A probability distribution over the domain points of a class.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionOverX {
    probabilities: Vec<f64>,
}

impl DistributionOverX {
    /// Validated constructor: nonnegative entries summing to 1 within 1e-9.
    pub fn new(probabilities: Vec<f64>) -> Result<Self, CoreError> {
        if probabilities.is_empty() {
            return Err(CoreError::InvalidDistribution("empty support".into()));
        }
        if let Some(bad) = probabilities.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(CoreError::InvalidDistribution(format!(
                "entry {bad} is negative or non-finite"
            )));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(CoreError::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self { probabilities })
    }

    /// Uniform distribution on `n` points.
    pub fn uniform(n: usize) -> Self {
        Self {
            probabilities: vec![1.0 / n as f64; n],
        }
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    /// Inverse-CDF sample of a single point index.
    pub fn sample_index(&self, rng: &mut impl rand::Rng) -> usize {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (i, p) in self.probabilities.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        self.probabilities.len() - 1
    }

    /// Serialize to the normative JSON file format, aligned to `domain`.
    pub fn to_json(&self, domain: &[String]) -> String {
        let file = DistributionFile {
            domain: domain.to_vec(),
            p: self.probabilities.clone(),
        };
        serde_json::to_string_pretty(&file).expect("distribution serialization cannot fail")
    }

    /// Parse the normative JSON format, checking alignment with `domain`.
    pub fn from_json(text: &str, domain: &[String]) -> Result<Self, CoreError> {
        let file: DistributionFile =
            serde_json::from_str(text).map_err(|e| CoreError::Json(e.to_string()))?;
        if file.domain != domain {
            return Err(CoreError::InvalidDistribution(
                "distribution domain ids do not match the class domain".into(),
            ));
        }
        if file.p.len() != domain.len() {
            return Err(CoreError::InvalidDistribution(format!(
                "{} probabilities for {} domain points",
                file.p.len(),
                domain.len()
            )));
        }
        Self::new(file.p)
    }
}

/// Normative on-disk shape of a distribution file.
#[derive(Serialize, Deserialize)]
struct DistributionFile {
    domain: Vec<String>,
    p: Vec<f64>,
}

/// Loss function selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    ZeroOne,
    Margin,
    Hinge,
    Squared,
}

impl LossKind {
    pub fn name(self) -> &'static str {
        match self {
            LossKind::ZeroOne => "zero_one",
            LossKind::Margin => "margin",
            LossKind::Hinge => "hinge",
            LossKind::Squared => "squared",
        }
    }
}

/// A loss together with the constants its dimension/margin transfer bounds
/// use: `c_dc` multiplies the √(dim/m) term and `c_mc` the norm/√m term in
/// the generalization bounds of `learners`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossSpec {
    pub kind: LossKind,
    /// Lipschitz constant of ŷ ↦ ℓ(ŷ, y); 0 marks a non-Lipschitz loss.
    pub lipschitz_l: f64,
    /// Constant in the dimension-based generalization term c_dc·√(dim/m).
    pub c_dc: f64,
    /// Constant in the norm-based generalization term c_mc·R/√m.
    pub c_mc: f64,
}

impl LossSpec {
    /// 0/1 loss: bounded by 1, not Lipschitz.
    pub fn zero_one() -> Self {
        Self {
            kind: LossKind::ZeroOne,
            lipschitz_l: 0.0,
            c_dc: 1.0,
            c_mc: 2.0,
        }
    }

    /// Margin loss 1{ŷ·y ≤ 1}: bounded by 1, not Lipschitz.
    pub fn margin() -> Self {
        Self {
            kind: LossKind::Margin,
            lipschitz_l: 0.0,
            c_dc: 1.0,
            c_mc: 2.0,
        }
    }

    /// Hinge loss: 1-Lipschitz; its norm constant is twice the Lipschitz
    /// constant.
    pub fn hinge() -> Self {
        Self {
            kind: LossKind::Hinge,
            lipschitz_l: 1.0,
            c_dc: 1.0,
            c_mc: 2.0,
        }
    }

    /// Squared loss ½(ŷ−y)²: 2-Lipschitz on predictions in [−1, 1] against
    /// ±1 targets.
    pub fn squared() -> Self {
        Self {
            kind: LossKind::Squared,
            lipschitz_l: 2.0,
            c_dc: 2.0,
            c_mc: 4.0,
        }
    }

    /// The four standard specs by kind.
    pub fn standard(kind: LossKind) -> Self {
        match kind {
            LossKind::ZeroOne => Self::zero_one(),
            LossKind::Margin => Self::margin(),
            LossKind::Hinge => Self::hinge(),
            LossKind::Squared => Self::squared(),
        }
    }
}

/// A class whose every row has unit norm under a distribution, packaged with
/// that distribution.
#[derive(Debug, Clone)]
pub struct NormalizedClass {
    pub class: FiniteHypothesisClass,
    pub distribution: DistributionOverX,
}

/// Specification of a realizable sample: `sample_size` points drawn i.i.d.
/// from `distribution` and labeled by the target hypothesis.
#[derive(Debug, Clone)]
pub struct RealizableSampleSpec {
    pub class: FiniteHypothesisClass,
    pub target_hypothesis: String,
    pub distribution: DistributionOverX,
    pub sample_size: usize,
    pub seed: u64,
}

impl RealizableSampleSpec {
    pub fn new(
        class: FiniteHypothesisClass,
        target_hypothesis: impl Into<String>,
        distribution: DistributionOverX,
        sample_size: usize,
        seed: u64,
    ) -> Result<Self, CoreError> {
        let target_hypothesis = target_hypothesis.into();
        if class.hypothesis_index(&target_hypothesis).is_none() {
            return Err(CoreError::InvalidClass(format!(
                "target hypothesis '{target_hypothesis}' is not in the class"
            )));
        }
        if sample_size == 0 {
            return Err(CoreError::InvalidClass("sample_size must be ≥ 1".into()));
        }
        if distribution.len() != class.num_points() {
            return Err(CoreError::InvalidDistribution(format!(
                "distribution has {} entries for a {}-point domain",
                distribution.len(),
                class.num_points()
            )));
        }
        Ok(Self {
            class,
            target_hypothesis,
            distribution,
            sample_size,
            seed,
        })
    }

    /// Row index of the target hypothesis.
    pub fn target_row(&self) -> usize {
        self.class
            .hypothesis_index(&self.target_hypothesis)
            .expect("validated at construction")
    }
}

/// Evaluate a single loss value ℓ(ŷ, y).
///
/// The 0/1 and margin losses use weak inequalities, so a raw prediction of
/// exactly 0 (or a margin of exactly 1) counts as a loss of 1.
pub fn eval_loss(loss: &LossSpec, yhat: f64, y: f64) -> Result<f64, CoreError> {
    let needs_binary = matches!(
        loss.kind,
        LossKind::ZeroOne | LossKind::Margin | LossKind::Hinge
    );
    if needs_binary && y.abs() != 1.0 {
        return Err(CoreError::NonBinaryTarget {
            loss: loss.kind.name(),
            y,
        });
    }
    if !y.is_finite() {
        return Err(CoreError::NonBinaryTarget {
            loss: loss.kind.name(),
            y,
        });
    }
    Ok(match loss.kind {
        LossKind::ZeroOne => {
            if yhat * y <= 0.0 {
                1.0
            } else {
                0.0
            }
        }
        LossKind::Margin => {
            if yhat * y <= 1.0 {
                1.0
            } else {
                0.0
            }
        }
        LossKind::Hinge => (1.0 - yhat * y).max(0.0),
        LossKind::Squared => 0.5 * (yhat - y) * (yhat - y),
    })
}

/// Weighted average loss Σ_x w(x)·ℓ(pred(x), target(x)).
///
/// With a probability vector this is the population loss; with uniform
/// weights over a sample it is the empirical loss; with a point mass it
/// reduces to `eval_loss` at that point.
pub fn expected_loss(
    predictions: &[f64],
    weights: &[f64],
    targets: &[f64],
    loss: &LossSpec,
) -> Result<f64, CoreError> {
    if predictions.len() != weights.len() || predictions.len() != targets.len() {
        return Err(CoreError::LengthMismatch {
            predictions: predictions.len(),
            weights: weights.len(),
            targets: targets.len(),
        });
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > NORM_TOL {
        return Err(CoreError::InvalidDistribution(format!(
            "weights sum to {total}, not 1"
        )));
    }
    let mut acc = 0.0;
    for i in 0..predictions.len() {
        if weights[i] == 0.0 {
            continue;
        }
        acc += weights[i] * eval_loss(loss, predictions[i], targets[i])?;
    }
    Ok(acc)
}

/// Rescale every row of a class to unit norm under `d`:
/// h ↦ h / √(Σ_x D(x)·h(x)²).
///
/// Already-normalized classes (such as any ±1-valued class under any
/// distribution with full support) pass through unchanged up to rounding,
/// which makes the operation idempotent.
pub fn normalize_class(
    class: &FiniteHypothesisClass,
    d: &DistributionOverX,
) -> Result<NormalizedClass, CoreError> {
    if d.len() != class.num_points() {
        return Err(CoreError::InvalidDistribution(format!(
            "distribution has {} entries for a {}-point domain",
            d.len(),
            class.num_points()
        )));
    }
    let mut values = class.values().clone();
    for i in 0..values.rows() {
        let norm_sq: f64 = values
            .row(i)
            .iter()
            .zip(d.probabilities())
            .map(|(v, p)| p * v * v)
            .sum();
        if norm_sq <= 0.0 {
            return Err(CoreError::DegenerateHypothesis {
                id: class.hypothesis_labels()[i].clone(),
                row: i,
            });
        }
        let inv = 1.0 / norm_sq.sqrt();
        for v in values.row_mut(i) {
            *v *= inv;
        }
    }
    // Normalization generally leaves the ±1 grid, so the result is real-valued.
    let class = FiniteHypothesisClass::new(
        class.domain_labels().to_vec(),
        class.hypothesis_labels().to_vec(),
        values,
        LabelKind::Real,
    )?;
    Ok(NormalizedClass {
        class,
        distribution: d.clone(),
    })
}
