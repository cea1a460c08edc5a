//! Feature embeddings and their transformers.
//!
//! An embedding assigns each domain point a d-dimensional feature vector.
//! Tabular embeddings store one feature column per point of a finite
//! domain; linear-map embeddings apply a fixed matrix to real input vectors.
//!
//! Four constructions are provided:
//!
//! * `jl_project` — composition with a seeded dense Gaussian projection
//!   (entries i.i.d. N(0, 1/d_target)), the Johnson–Lindenstrauss route to
//!   dimension reduction: inner products are preserved in expectation with
//!   O(‖u‖‖v‖/√d) fluctuations.
//! * `greedy_cover` — a disagreement cover of a binary class; the cover
//!   elements' rows become feature coordinates and each hypothesis gets a
//!   one-hot weight vector selecting its nearest cover element, so the pair
//!   predicts every hypothesis within the cover radius under the 0/1 loss.
//! * `representer_reduce` — orthogonal projection of an embedding onto the
//!   span of the feature vectors of a sample, in an orthonormal basis built
//!   by modified Gram–Schmidt. Predictions on the sample are invariant:
//!   ⟨w, φ(x_i)⟩ = ⟨Qᵀw, Qᵀφ(x_i)⟩ because φ(x_i) lies in the span.
//! * `sample_embedding` — realize a draw from an embedding family
//!   (identity one-hots, seeded Gaussian projections, the truncated-SVD
//!   optimal family, or a greedy-cover prefix), deterministic per
//!   (master seed, index) through splittable child streams.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::core::{
    CoreError, DistributionOverX, FiniteHypothesisClass, LabelKind, NormalizedClass,
};
use crate::matrix::{dot, norm2, Matrix};
use crate::rng::{child_seed, stream_rng, stream_seed};
use crate::spectral::WeightedClassMatrix;
use rand_distr::{Distribution, StandardNormal};

/// Residual-norm threshold below which a feature vector is treated as
/// linearly dependent during orthonormalization.
pub const SPAN_DROP_TOL: f64 = 1e-10;

/// Errors raised by the embedding layer.
#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("operation requires a tabular embedding over a finite domain")]
    NotTabular,
    #[error("unknown domain point id '{0}'")]
    UnknownPoint(String),
    #[error("unknown hypothesis id '{0}'")]
    UnknownHypothesis(String),
    #[error("cover requires a binary (±1) class")]
    NotBinary,
    #[error("eps = {0} is outside (0, 1)")]
    EpsOutOfRange(f64),
    #[error("d_target must be ≥ 1")]
    ZeroTargetDimension,
    #[error("sample is empty")]
    EmptySample,
    #[error("weight vector for '{id}' has length {got}, embedding dimension is {want}")]
    WeightLengthMismatch {
        id: String,
        got: usize,
        want: usize,
    },
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}

/// How an embedding produces features.
#[derive(Debug, Clone, PartialEq)]
pub enum EmbeddingFlavor {
    /// One feature column per domain point: features is d × |X|.
    Tabular {
        features: Matrix,
        domain_labels: Vec<String>,
    },
    /// φ(x) = W·x for real input vectors (W is d × n).
    LinearMap { matrix: Matrix },
}

/// A feature map into R^d.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub dimension: usize,
    pub flavor: EmbeddingFlavor,
}

impl Embedding {
    /// Tabular embedding from a d × |X| feature matrix.
    pub fn tabular(features: Matrix, domain_labels: Vec<String>) -> Result<Self, EmbeddingError> {
        if features.cols() != domain_labels.len() {
            return Err(EmbeddingError::Json(format!(
                "{} feature columns for {} domain points",
                features.cols(),
                domain_labels.len()
            )));
        }
        if !features.all_finite() {
            return Err(EmbeddingError::Json("non-finite feature entry".into()));
        }
        Ok(Self {
            dimension: features.rows(),
            flavor: EmbeddingFlavor::Tabular {
                features,
                domain_labels,
            },
        })
    }

    /// Linear-map embedding φ(x) = W·x.
    pub fn linear_map(matrix: Matrix) -> Self {
        Self {
            dimension: matrix.rows(),
            flavor: EmbeddingFlavor::LinearMap { matrix },
        }
    }

    /// One-hot tabular embedding of dimension |X|.
    pub fn identity_onehot(domain_labels: Vec<String>) -> Self {
        let n = domain_labels.len();
        Self {
            dimension: n,
            flavor: EmbeddingFlavor::Tabular {
                features: Matrix::identity(n),
                domain_labels,
            },
        }
    }

    /// Feature vector of the point in column `col` (tabular only).
    pub fn feature_column(&self, col: usize) -> Result<Vec<f64>, EmbeddingError> {
        match &self.flavor {
            EmbeddingFlavor::Tabular { features, .. } => Ok(features.col(col)),
            EmbeddingFlavor::LinearMap { .. } => Err(EmbeddingError::NotTabular),
        }
    }

    /// Feature vector by domain point id (tabular only).
    pub fn feature_of(&self, point_id: &str) -> Result<Vec<f64>, EmbeddingError> {
        match &self.flavor {
            EmbeddingFlavor::Tabular {
                features,
                domain_labels,
            } => {
                let col = domain_labels
                    .iter()
                    .position(|l| l == point_id)
                    .ok_or_else(|| EmbeddingError::UnknownPoint(point_id.to_string()))?;
                Ok(features.col(col))
            }
            EmbeddingFlavor::LinearMap { .. } => Err(EmbeddingError::NotTabular),
        }
    }

    /// Apply a linear-map embedding to an input vector.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>, EmbeddingError> {
        match &self.flavor {
            EmbeddingFlavor::LinearMap { matrix } => Ok(matrix.matvec(x)),
            EmbeddingFlavor::Tabular { .. } => Err(EmbeddingError::NotTabular),
        }
    }

    /// Largest feature norm max_x ‖φ(x)‖₂ (exact for tabular embeddings).
    pub fn sup_norm(&self) -> Result<f64, EmbeddingError> {
        match &self.flavor {
            EmbeddingFlavor::Tabular { features, .. } => {
                let mut best = 0.0f64;
                for j in 0..features.cols() {
                    best = best.max(norm2(&features.col(j)));
                }
                Ok(best)
            }
            EmbeddingFlavor::LinearMap { .. } => Err(EmbeddingError::NotTabular),
        }
    }

    /// Serialize a tabular embedding to the JSON matrix format (class format
    /// plus a "dimension" field; rows are feature coordinates).
    pub fn to_json(&self) -> Result<String, EmbeddingError> {
        match &self.flavor {
            EmbeddingFlavor::Tabular {
                features,
                domain_labels,
            } => {
                let file = EmbeddingFile {
                    domain: domain_labels.clone(),
                    dimension: self.dimension,
                    values: (0..features.rows()).map(|i| features.row(i).to_vec()).collect(),
                };
                Ok(serde_json::to_string_pretty(&file).expect("serialization cannot fail"))
            }
            EmbeddingFlavor::LinearMap { .. } => Err(EmbeddingError::NotTabular),
        }
    }

    /// Parse the tabular JSON format.
    pub fn from_json(text: &str) -> Result<Self, EmbeddingError> {
        let file: EmbeddingFile =
            serde_json::from_str(text).map_err(|e| EmbeddingError::Json(e.to_string()))?;
        let rows = file.values.len();
        let cols = file.values.first().map_or(0, Vec::len);
        if file.values.iter().any(|r| r.len() != cols) {
            return Err(EmbeddingError::Json("ragged values matrix".into()));
        }
        if rows != file.dimension {
            return Err(EmbeddingError::Json(format!(
                "dimension field {} does not match {} feature rows",
                file.dimension, rows
            )));
        }
        let features = Matrix::from_vec(rows, cols, file.values.into_iter().flatten().collect());
        Embedding::tabular(features, file.domain)
    }
}

/// Normative on-disk shape of a tabular embedding.
#[derive(Serialize, Deserialize)]
struct EmbeddingFile {
    domain: Vec<String>,
    dimension: usize,
    values: Vec<Vec<f64>>,
}

/// An embedding together with one weight vector per hypothesis, predicting
/// h(x) ≈ ⟨w(h), φ(x)⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingWeightPair {
    pub embedding: Embedding,
    /// (hypothesis id, weight vector), in class hypothesis order.
    pub weights: Vec<(String, Vec<f64>)>,
}

impl EmbeddingWeightPair {
    pub fn new(
        embedding: Embedding,
        weights: Vec<(String, Vec<f64>)>,
    ) -> Result<Self, EmbeddingError> {
        let d = embedding.dimension;
        for (id, w) in &weights {
            if w.len() != d {
                return Err(EmbeddingError::WeightLengthMismatch {
                    id: id.clone(),
                    got: w.len(),
                    want: d,
                });
            }
        }
        Ok(Self { embedding, weights })
    }

    /// Weight vector of a hypothesis id.
    pub fn weight_of(&self, id: &str) -> Option<&[f64]> {
        self.weights
            .iter()
            .find(|(l, _)| l == id)
            .map(|(_, w)| w.as_slice())
    }

    /// Rescale features by `feature_scale` and weights by `weight_scale`
    /// (predictions scale by the product; with reciprocal scales they are
    /// unchanged, trading feature norm against weight norm).
    pub fn rescaled(&self, feature_scale: f64, weight_scale: f64) -> Result<Self, EmbeddingError> {
        let embedding = match &self.embedding.flavor {
            EmbeddingFlavor::Tabular {
                features,
                domain_labels,
            } => {
                let mut f = features.clone();
                for i in 0..f.rows() {
                    for v in f.row_mut(i) {
                        *v *= feature_scale;
                    }
                }
                Embedding::tabular(f, domain_labels.clone())?
            }
            EmbeddingFlavor::LinearMap { matrix } => {
                let mut m = matrix.clone();
                for i in 0..m.rows() {
                    for v in m.row_mut(i) {
                        *v *= feature_scale;
                    }
                }
                Embedding::linear_map(m)
            }
        };
        let weights = self
            .weights
            .iter()
            .map(|(id, w)| (id.clone(), w.iter().map(|v| v * weight_scale).collect()))
            .collect();
        Ok(Self { embedding, weights })
    }
}

// ---------------------------------------------------------------------------
// Johnson–Lindenstrauss projection
// ---------------------------------------------------------------------------

/// Seeded dense Gaussian projection matrix: d_target × d_in with i.i.d.
/// N(0, 1/d_target) entries, generated row-major for determinism.
pub fn gaussian_projection_matrix(d_target: usize, d_in: usize, seed: u64) -> Matrix {
    let mut rng = stream_rng(seed, "jl-project");
    let scale = 1.0 / (d_target as f64).sqrt();
    let mut p = Matrix::zeros(d_target, d_in);
    for i in 0..d_target {
        for j in 0..d_in {
            let g: f64 = StandardNormal.sample(&mut rng);
            p[(i, j)] = g * scale;
        }
    }
    p
}

/// Compose an embedding with a seeded Gaussian projection down (or up) to
/// `d_target` dimensions. Inner products are preserved in expectation.
pub fn jl_project(
    phi: &Embedding,
    d_target: usize,
    seed: u64,
) -> Result<Embedding, EmbeddingError> {
    if d_target == 0 {
        return Err(EmbeddingError::ZeroTargetDimension);
    }
    let p = gaussian_projection_matrix(d_target, phi.dimension, seed);
    Ok(match &phi.flavor {
        EmbeddingFlavor::Tabular {
            features,
            domain_labels,
        } => Embedding::tabular(p.matmul(features), domain_labels.clone())?,
        EmbeddingFlavor::LinearMap { matrix } => Embedding::linear_map(p.matmul(matrix)),
    })
}

// ---------------------------------------------------------------------------
// Greedy disagreement cover
// ---------------------------------------------------------------------------

/// Result of a cover construction: the chosen cover ids and the realized
/// embedding/weight pair (one feature coordinate per cover element, one-hot
/// weights selecting each hypothesis's nearest cover element).
pub fn greedy_cover(
    class: &FiniteHypothesisClass,
    d: &DistributionOverX,
    eps: f64,
) -> Result<(Vec<String>, EmbeddingWeightPair), EmbeddingError> {
    if class.label_kind() != LabelKind::Binary {
        return Err(EmbeddingError::NotBinary);
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(EmbeddingError::EpsOutOfRange(eps));
    }
    let n = class.num_hypotheses();
    let probs = d.probabilities();
    if probs.len() != class.num_points() {
        return Err(EmbeddingError::Core(CoreError::InvalidDistribution(format!(
            "distribution has {} entries for a {}-point domain",
            probs.len(),
            class.num_points()
        ))));
    }

    // Pairwise D-weighted disagreement, computed once.
    let mut dis = Matrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let mut acc = 0.0;
            for (x, p) in probs.iter().enumerate() {
                if class.value(i, x) != class.value(j, x) {
                    acc += p;
                }
            }
            dis[(i, j)] = acc;
            dis[(j, i)] = acc;
        }
    }

    // Greedy max-coverage: repeatedly add the hypothesis covering the most
    // still-uncovered hypotheses within eps (ties to the lowest index).
    let slack = 1e-12;
    let mut covered = vec![false; n];
    let mut cover_rows: Vec<usize> = Vec::new();
    while covered.iter().any(|c| !c) {
        let mut best_row = 0;
        let mut best_count = 0usize;
        for c in 0..n {
            let count = (0..n)
                .filter(|&h| !covered[h] && dis[(c, h)] <= eps + slack)
                .count();
            if count > best_count {
                best_count = count;
                best_row = c;
            }
        }
        cover_rows.push(best_row);
        for h in 0..n {
            if dis[(best_row, h)] <= eps + slack {
                covered[h] = true;
            }
        }
    }

    // Features: one row per cover element (its value row), so
    // φ(x) = (c(x))_{c ∈ cover}.
    let mut features = Matrix::zeros(cover_rows.len(), class.num_points());
    for (k, &row) in cover_rows.iter().enumerate() {
        for x in 0..class.num_points() {
            features[(k, x)] = class.value(row, x);
        }
    }
    let embedding = Embedding::tabular(features, class.domain_labels().to_vec())?;

    // One-hot weights: each hypothesis points at its nearest cover element.
    let mut weights = Vec::with_capacity(n);
    for h in 0..n {
        let mut best_k = 0;
        let mut best_d = f64::INFINITY;
        for (k, &row) in cover_rows.iter().enumerate() {
            if dis[(row, h)] < best_d {
                best_d = dis[(row, h)];
                best_k = k;
            }
        }
        debug_assert!(best_d <= eps + slack, "greedy cover left a hypothesis uncovered");
        let mut w = vec![0.0; cover_rows.len()];
        w[best_k] = 1.0;
        weights.push((class.hypothesis_labels()[h].clone(), w));
    }

    let cover_ids = cover_rows
        .iter()
        .map(|&r| class.hypothesis_labels()[r].clone())
        .collect();
    Ok((cover_ids, EmbeddingWeightPair::new(embedding, weights)?))
}

/// Exhaustive cover-validity check: max over hypotheses of the distance to
/// the nearest cover element (must be ≤ eps for a valid cover).
pub fn cover_radius(
    class: &FiniteHypothesisClass,
    d: &DistributionOverX,
    cover_ids: &[String],
) -> Result<f64, EmbeddingError> {
    let probs = d.probabilities();
    let cover_rows: Vec<usize> = cover_ids
        .iter()
        .map(|id| {
            class
                .hypothesis_index(id)
                .ok_or_else(|| EmbeddingError::UnknownHypothesis(id.clone()))
        })
        .collect::<Result<_, _>>()?;
    let mut worst = 0.0f64;
    for h in 0..class.num_hypotheses() {
        let mut best = f64::INFINITY;
        for &c in &cover_rows {
            let mut acc = 0.0;
            for (x, p) in probs.iter().enumerate() {
                if class.value(h, x) != class.value(c, x) {
                    acc += p;
                }
            }
            best = best.min(acc);
        }
        worst = worst.max(best);
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// Representer reduction
// ---------------------------------------------------------------------------

/// The linear map w ↦ Qᵀw induced by an orthonormal basis Q of the sample
/// span; applies to weights and (via `representer_reduce`) to features.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionMap {
    /// d × r matrix with orthonormal columns spanning the sample features.
    pub basis: Matrix,
}

impl ProjectionMap {
    /// Coordinates of the projection of `w` onto the span, in the basis.
    pub fn project(&self, w: &[f64]) -> Vec<f64> {
        let d = self.basis.rows();
        let r = self.basis.cols();
        assert_eq!(w.len(), d, "weight has length {} for ambient dim {}", w.len(), d);
        (0..r).map(|k| (0..d).map(|i| self.basis[(i, k)] * w[i]).sum()).collect()
    }
}

/// Orthonormal basis of the span of `vectors` (modified Gram–Schmidt with a
/// re-orthogonalization pass; residuals below `SPAN_DROP_TOL` are dropped).
fn orthonormal_span_basis(vectors: &[Vec<f64>], ambient: usize) -> Matrix {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut r = v.clone();
        // Two MGS passes keep orthogonality near machine precision even for
        // nearly dependent inputs.
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&r, b);
                for (ri, bi) in r.iter_mut().zip(b) {
                    *ri -= c * bi;
                }
            }
        }
        let n = norm2(&r);
        if n > SPAN_DROP_TOL {
            for ri in r.iter_mut() {
                *ri /= n;
            }
            basis.push(r);
        }
    }
    let mut q = Matrix::zeros(ambient, basis.len());
    for (k, b) in basis.iter().enumerate() {
        for i in 0..ambient {
            q[(i, k)] = b[i];
        }
    }
    q
}

/// Project an embedding onto the span of the feature vectors of the sample
/// points: returns the reduced embedding ψ(x) = Qᵀφ(x) (dimension = span
/// rank ≤ m) and the matching weight projection map.
///
/// For every weight w and every sample point x_i, ⟨w, φ(x_i)⟩ =
/// ⟨project(w), ψ(x_i)⟩ exactly up to rounding, because φ(x_i) lies in the
/// span and the projection is orthogonal.
pub fn representer_reduce(
    phi: &Embedding,
    sample_points: &[String],
) -> Result<(Embedding, ProjectionMap), EmbeddingError> {
    if sample_points.is_empty() {
        return Err(EmbeddingError::EmptySample);
    }
    let (features, domain_labels) = match &phi.flavor {
        EmbeddingFlavor::Tabular {
            features,
            domain_labels,
        } => (features, domain_labels),
        EmbeddingFlavor::LinearMap { .. } => return Err(EmbeddingError::NotTabular),
    };
    let sample_vectors: Vec<Vec<f64>> = sample_points
        .iter()
        .map(|id| phi.feature_of(id))
        .collect::<Result<_, _>>()?;
    let q = orthonormal_span_basis(&sample_vectors, phi.dimension);
    let reduced = q.transpose().matmul(features);
    Ok((
        Embedding::tabular(reduced, domain_labels.clone())?,
        ProjectionMap { basis: q },
    ))
}

// ---------------------------------------------------------------------------
// Embedding families
// ---------------------------------------------------------------------------

/// A distribution over embeddings, sampled by index for reproducibility.
#[derive(Debug, Clone)]
pub struct EmbeddingFamily {
    pub kind: FamilyKind,
    pub master_seed: u64,
}

/// Supported family kinds. `Identity`, `SvdOptimal`, and `CoverPrefix` are
/// point masses (every index yields the same embedding); `JlGaussian` draws
/// an independent projection per index.
#[derive(Debug, Clone)]
pub enum FamilyKind {
    /// One-hot features over a finite domain (dimension |X|).
    Identity { domain_labels: Vec<String> },
    /// Gaussian projection of a fixed base embedding to d_target dims.
    JlGaussian {
        base: Box<Embedding>,
        d_target: usize,
    },
    /// Top-d right-singular-direction features of the weighted class
    /// matrix: φ(x)_i = v_i(x)/√D(x) (0 where D(x) = 0). Least-squares
    /// predictions over this embedding attain the rank-d optimum.
    SvdOptimal { class: NormalizedClass, d: usize },
    /// The first d elements of the greedy disagreement cover at radius eps
    /// (all elements if the cover is smaller).
    CoverPrefix {
        class: FiniteHypothesisClass,
        distribution: DistributionOverX,
        eps: f64,
        d: usize,
    },
}

/// Realize the `index`-th draw from the family. Equal (master seed, index)
/// yields a bit-identical embedding; JL indices use independent child
/// streams derived by the 64-bit finalizer mix.
pub fn sample_embedding(
    family: &EmbeddingFamily,
    index: u64,
) -> Result<Embedding, EmbeddingError> {
    match &family.kind {
        FamilyKind::Identity { domain_labels } => {
            Ok(Embedding::identity_onehot(domain_labels.clone()))
        }
        FamilyKind::JlGaussian { base, d_target } => {
            let seed = child_seed(stream_seed(family.master_seed, "family-jl"), index);
            jl_project(base, *d_target, seed)
        }
        FamilyKind::SvdOptimal { class, d } => svd_optimal_embedding(class, *d),
        FamilyKind::CoverPrefix {
            class,
            distribution,
            eps,
            d,
        } => {
            let (_, pair) = greedy_cover(class, distribution, *eps)?;
            match pair.embedding.flavor {
                EmbeddingFlavor::Tabular {
                    features,
                    domain_labels,
                } => {
                    let keep = (*d).min(features.rows()).max(1);
                    let mut trimmed = Matrix::zeros(keep, features.cols());
                    for i in 0..keep {
                        for j in 0..features.cols() {
                            trimmed[(i, j)] = features[(i, j)];
                        }
                    }
                    Ok(Embedding::tabular(trimmed, domain_labels)?)
                }
                EmbeddingFlavor::LinearMap { .. } => unreachable!("covers are tabular"),
            }
        }
    }
}

/// The rank-d optimal feature map of a normalized class: coordinates are
/// the top-d right singular directions of M(h,x) = √D(x)h(x), rescaled by
/// 1/√D(x) so that weighted least squares over it attains the Eckart–Young
/// optimum.
pub fn svd_optimal_embedding(
    class: &NormalizedClass,
    d: usize,
) -> Result<Embedding, EmbeddingError> {
    let wcm = WeightedClassMatrix::from_normalized(class);
    let (_, v) = wcm.domain_side_eigen();
    let probs = class.distribution.probabilities();
    let points = class.class.num_points();
    let keep = d.min(points);
    let mut features = Matrix::zeros(keep, points);
    for i in 0..keep {
        for x in 0..points {
            features[(i, x)] = if probs[x] > 0.0 {
                v[(x, i)] / probs[x].sqrt()
            } else {
                0.0
            };
        }
    }
    Ok(Embedding::tabular(
        features,
        class.class.domain_labels().to_vec(),
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::parities;
    use crate::core::normalize_class;

    fn labels(prefix: &str, n: usize) -> Vec<String> {
        (0..n).map(|i| format!("{prefix}{i}")).collect()
    }

    #[test]
    fn jl_of_zero_embedding_is_zero() {
        let phi = Embedding::tabular(Matrix::zeros(3, 2), labels("x", 2)).unwrap();
        let proj = jl_project(&phi, 5, 42).unwrap();
        assert_eq!(proj.dimension, 5);
        assert!(proj.sup_norm().unwrap() == 0.0, "0 maps to 0 under any linear map");
    }

    #[test]
    fn jl_preserves_inner_products_on_average() {
        // u = (1,0), v = (1/2, √3/2): unit vectors with ⟨u,v⟩ = 1/2.
        let features = Matrix::from_rows(&[vec![1.0, 0.5], vec![0.0, 0.75f64.sqrt()]]);
        let phi = Embedding::tabular(features, labels("x", 2)).unwrap();
        let d_target = 2048;
        let mut abs_err_sum = 0.0;
        let seeds = 500u64;
        for seed in 0..seeds {
            let proj = jl_project(&phi, d_target, seed).unwrap();
            let pu = proj.feature_column(0).unwrap();
            let pv = proj.feature_column(1).unwrap();
            abs_err_sum += (dot(&pu, &pv) - 0.5).abs();
        }
        let mean_abs_err = abs_err_sum / seeds as f64;
        assert!(
            mean_abs_err <= 3.0 / (d_target as f64).sqrt(),
            "mean |⟨πu,πv⟩ − 1/2| = {mean_abs_err} exceeds the O(1/√d) budget"
        );
    }

    #[test]
    fn jl_preserves_norms_on_average() {
        let features = Matrix::from_rows(&[vec![1.0], vec![0.0]]);
        let phi = Embedding::tabular(features, labels("x", 1)).unwrap();
        let d_target = 64;
        let seeds = 10_000u64;
        let mut sum = 0.0;
        for seed in 0..seeds {
            let proj = jl_project(&phi, d_target, seed).unwrap();
            let pu = proj.feature_column(0).unwrap();
            sum += dot(&pu, &pu);
        }
        let mean = sum / seeds as f64;
        assert!(
            (mean - 1.0).abs() < 0.02,
            "E‖πu‖² should be ‖u‖² = 1 within 2%, got {mean}"
        );
    }

    #[test]
    fn jl_is_deterministic_per_seed() {
        let features = Matrix::from_rows(&[vec![1.0, -1.0], vec![0.5, 2.0]]);
        let phi = Embedding::tabular(features, labels("x", 2)).unwrap();
        let a = jl_project(&phi, 7, 123).unwrap();
        let b = jl_project(&phi, 7, 123).unwrap();
        assert_eq!(a, b, "same seed must give a bit-identical projection");
        let c = jl_project(&phi, 7, 124).unwrap();
        assert_ne!(a, c, "different seeds should differ");
    }

    #[test]
    fn cover_of_singleton_class_has_size_one() {
        let m = Matrix::from_rows(&[vec![1.0, -1.0, 1.0]]);
        let class = FiniteHypothesisClass::from_matrix(m, LabelKind::Binary).unwrap();
        let d = DistributionOverX::uniform(3);
        let (cover, pair) = greedy_cover(&class, &d, 0.3).unwrap();
        assert_eq!(cover.len(), 1);
        assert_eq!(pair.embedding.dimension, 1);
    }

    #[test]
    fn cover_of_parities_at_quarter_radius_is_everything() {
        // Distinct parities disagree on exactly half the uniform mass, so at
        // eps = 0.25 no hypothesis covers another.
        let class = parities(2).unwrap();
        let d = DistributionOverX::uniform(4);
        let (cover, _) = greedy_cover(&class, &d, 0.25).unwrap();
        assert_eq!(cover.len(), 4);
        assert!(cover_radius(&class, &d, &cover).unwrap() <= 0.25);
    }

    #[test]
    fn close_pair_is_covered_by_one_element() {
        // Two hypotheses disagreeing on a single point of mass 0.1.
        let m = Matrix::from_rows(&[
            vec![1.0, 1.0, 1.0],
            vec![-1.0, 1.0, 1.0],
        ]);
        let class = FiniteHypothesisClass::from_matrix(m, LabelKind::Binary).unwrap();
        let d = DistributionOverX::new(vec![0.1, 0.4, 0.5]).unwrap();
        let (cover, _) = greedy_cover(&class, &d, 0.2).unwrap();
        assert_eq!(cover.len(), 1, "disagreement 0.1 ≤ eps 0.2");
    }

    #[test]
    fn cover_pair_predicts_every_hypothesis_within_eps() {
        let class = parities(2).unwrap();
        let d = DistributionOverX::uniform(4);
        let eps = 0.6;
        let (cover, pair) = greedy_cover(&class, &d, eps).unwrap();
        assert!(cover_radius(&class, &d, &cover).unwrap() <= eps + 1e-12);
        // sign(⟨w(h), φ(x)⟩) = nearest cover element's value; its 0/1 error
        // under D is at most eps for every hypothesis.
        for (h, (id, w)) in pair.weights.iter().enumerate() {
            let mut err = 0.0;
            for (x, p) in d.probabilities().iter().enumerate() {
                let feat = pair.embedding.feature_column(x).unwrap();
                let pred = dot(w, &feat);
                if pred * class.value(h, x) <= 0.0 {
                    err += p;
                }
            }
            assert!(err <= eps + 1e-12, "hypothesis {id} has cover error {err} > {eps}");
        }
    }

    #[test]
    fn cover_rejects_bad_inputs() {
        let m = Matrix::from_rows(&[vec![0.5, 1.0]]);
        let real = FiniteHypothesisClass::from_matrix(m, LabelKind::Real).unwrap();
        let d = DistributionOverX::uniform(2);
        assert!(matches!(
            greedy_cover(&real, &d, 0.2),
            Err(EmbeddingError::NotBinary)
        ));
        let class = parities(1).unwrap();
        for eps in [0.0, 1.0, -0.3] {
            assert!(matches!(
                greedy_cover(&class, &DistributionOverX::uniform(2), eps),
                Err(EmbeddingError::EpsOutOfRange(_))
            ));
        }
    }

    #[test]
    fn representer_single_point_reduces_to_one_dimension() {
        let features = Matrix::from_rows(&[
            vec![1.0, 0.0, 2.0],
            vec![2.0, 1.0, 0.0],
            vec![0.0, -1.0, 1.0],
        ]);
        let phi = Embedding::tabular(features, labels("x", 3)).unwrap();
        let (psi, map) = representer_reduce(&phi, &["x1".into()]).unwrap();
        assert_eq!(psi.dimension, 1, "span of one vector is one-dimensional");
        // Prediction on the sample point is preserved for any weight.
        let w = vec![0.3, -1.2, 0.7];
        let before = dot(&w, &phi.feature_of("x1").unwrap());
        let after = dot(&map.project(&w), &psi.feature_of("x1").unwrap());
        assert!((before - after).abs() < 1e-9, "{before} vs {after}");
    }

    #[test]
    fn representer_preserves_sample_predictions_generally() {
        let features = Matrix::from_rows(&[
            vec![1.0, 0.3, -1.0, 0.4],
            vec![0.0, 1.5, 2.0, -0.7],
            vec![2.0, 0.1, 0.0, 1.1],
        ]);
        let phi = Embedding::tabular(features, labels("x", 4)).unwrap();
        let sample: Vec<String> = vec!["x0".into(), "x2".into(), "x0".into()];
        let (psi, map) = representer_reduce(&phi, &sample).unwrap();
        let mut state = 5u64;
        for _ in 0..10 {
            state = crate::rng::mix64(state);
            let w: Vec<f64> = (0..3)
                .map(|i| ((state >> (i * 8)) & 0xFF) as f64 / 64.0 - 2.0)
                .collect();
            let pw = map.project(&w);
            for id in &sample {
                let before = dot(&w, &phi.feature_of(id).unwrap());
                let after = dot(&pw, &psi.feature_of(id).unwrap());
                assert!(
                    (before - after).abs() < 1e-9,
                    "sample prediction must be invariant: {before} vs {after}"
                );
            }
        }
    }

    #[test]
    fn representer_full_span_preserves_all_predictions() {
        // Sample features span R²: projection is the identity on weights.
        let features = Matrix::from_rows(&[vec![1.0, 0.0, 0.5], vec![0.0, 1.0, -0.5]]);
        let phi = Embedding::tabular(features, labels("x", 3)).unwrap();
        let (psi, map) = representer_reduce(&phi, &["x0".into(), "x1".into()]).unwrap();
        assert_eq!(psi.dimension, 2);
        let w = vec![0.8, -0.6];
        let pw = map.project(&w);
        for id in ["x0", "x1", "x2"] {
            let before = dot(&w, &phi.feature_of(id).unwrap());
            let after = dot(&pw, &psi.feature_of(id).unwrap());
            assert!(
                (before - after).abs() < 1e-9,
                "full span: predictions preserved on all of X"
            );
        }
    }

    #[test]
    fn representer_reduction_is_idempotent() {
        let features = Matrix::from_rows(&[
            vec![1.0, 1.0, 0.0],
            vec![1.0, -1.0, 0.0],
            vec![1.0, 0.0, 1.0],
        ]);
        let phi = Embedding::tabular(features, labels("x", 3)).unwrap();
        let sample: Vec<String> = vec!["x0".into(), "x1".into()];
        let (once, map1) = representer_reduce(&phi, &sample).unwrap();
        let (twice, map2) = representer_reduce(&once, &sample).unwrap();
        assert_eq!(
            once.dimension, twice.dimension,
            "second reduction cannot shrink the span"
        );
        // Predictions agree everywhere after the second (orthogonal change
        // of basis) reduction.
        let w = vec![0.2, -0.4, 1.5];
        let w1 = map1.project(&w);
        let w2 = map2.project(&w1);
        for id in ["x0", "x1", "x2"] {
            let a = dot(&w1, &once.feature_of(id).unwrap());
            let b = dot(&w2, &twice.feature_of(id).unwrap());
            assert!((a - b).abs() < 1e-9, "idempotence up to orthogonal basis change");
        }
    }

    #[test]
    fn identity_family_yields_onehots() {
        let fam = EmbeddingFamily {
            kind: FamilyKind::Identity {
                domain_labels: labels("x", 3),
            },
            master_seed: 9,
        };
        let e = sample_embedding(&fam, 4).unwrap();
        assert_eq!(e.dimension, 3);
        for j in 0..3 {
            let col = e.feature_column(j).unwrap();
            let mut expected = vec![0.0; 3];
            expected[j] = 1.0;
            assert_eq!(col, expected, "column {j} must be the {j}-th one-hot");
        }
    }

    #[test]
    fn jl_family_children_are_deterministic_and_distinct() {
        let base = Embedding::tabular(
            Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]),
            labels("x", 2),
        )
        .unwrap();
        let fam = EmbeddingFamily {
            kind: FamilyKind::JlGaussian {
                base: Box::new(base),
                d_target: 4,
            },
            master_seed: 11,
        };
        let a = sample_embedding(&fam, 0).unwrap();
        let b = sample_embedding(&fam, 0).unwrap();
        let c = sample_embedding(&fam, 1).unwrap();
        assert_eq!(a, b, "same (seed, index) must be bit-identical");
        assert_ne!(a, c, "distinct indices must draw distinct projections");
    }

    #[test]
    fn svd_family_features_are_weighted_orthonormal() {
        let class = parities(2).unwrap();
        let d = DistributionOverX::uniform(4);
        let h = normalize_class(&class, &d).unwrap();
        let e = svd_optimal_embedding(&h, 3).unwrap();
        assert_eq!(e.dimension, 3);
        // Σ_x D(x)·φ_i(x)·φ_j(x) = δ_ij: the weighted features are the
        // orthonormal right singular directions.
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = 0.0;
                for (x, p) in d.probabilities().iter().enumerate() {
                    let fx = e.feature_column(x).unwrap();
                    acc += p * fx[i] * fx[j];
                }
                let want = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (acc - want).abs() < 1e-9,
                    "weighted feature Gram ({i},{j}) = {acc}, want {want}"
                );
            }
        }
    }

    #[test]
    fn embedding_json_round_trip() {
        let phi = Embedding::tabular(
            Matrix::from_rows(&[vec![1.0, -0.5], vec![0.25, 2.0]]),
            labels("x", 2),
        )
        .unwrap();
        let text = phi.to_json().unwrap();
        assert!(text.contains("\"dimension\""));
        let back = Embedding::from_json(&text).unwrap();
        assert_eq!(back, phi);
    }

    #[test]
    fn rescaled_pair_trades_feature_norm_for_weight_norm() {
        let class = parities(1).unwrap();
        let d = DistributionOverX::uniform(2);
        let (_, pair) = greedy_cover(&class, &d, 0.25).unwrap();
        let k = pair.embedding.dimension as f64;
        let scaled = pair.rescaled(1.0 / k.sqrt(), k.sqrt()).unwrap();
        // Predictions are unchanged; feature sup-norm shrinks to 1.
        for (x, _) in d.probabilities().iter().enumerate() {
            let f0 = pair.embedding.feature_column(x).unwrap();
            let f1 = scaled.embedding.feature_column(x).unwrap();
            for ((_, w0), (_, w1)) in pair.weights.iter().zip(&scaled.weights) {
                let a = dot(w0, &f0);
                let b = dot(w1, &f1);
                assert!((a - b).abs() < 1e-12, "rescaling must preserve predictions");
            }
        }
        let sup = scaled.embedding.sup_norm().unwrap();
        assert!((sup - 1.0).abs() < 1e-12, "±1 cover features scaled to unit norm");
    }
}
