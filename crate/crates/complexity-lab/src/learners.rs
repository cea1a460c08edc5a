//! Empirical risk minimization and Monte Carlo learning simulations.
//!
//! Solvers:
//!
//! * squared loss — exact minimum-norm least squares through a spectral
//!   pseudoinverse (singular values below a relative cutoff are dropped);
//! * hinge loss — deterministic full-batch subgradient descent with a
//!   1/√t step schedule, iterate averaging, multiple restarts, and a
//!   closing one-dimensional scale polish (the loss is convex along rays);
//! * 0/1 and margin losses — exact subset enumeration on small instances
//!   (feasibility of each candidate correct-set is decided through the
//!   support characterization of minimum-norm separators), and the hinge
//!   surrogate with true-loss reporting otherwise.
//!
//! The simulator draws realizable samples, fits the mode's ERM, and scores
//! the learned weights exactly over the finite domain. Guaranteed modes add
//! a dimension- or norm-based deviation term; kernel modes with the margin
//! loss score the population 0/1 error of the margin solution. Every random
//! draw derives from (master seed, stream label, job index), so reports are
//! bit-reproducible and trials can run in parallel with a fixed-order
//! reduction.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::core::{
    eval_loss, CoreError, DistributionOverX, FiniteHypothesisClass, LossKind, LossSpec,
};
use crate::embeddings::{sample_embedding, Embedding, EmbeddingError, EmbeddingFamily};
use crate::matrix::{dot, norm2, Matrix};
use crate::rng::{child_seed, indexed_rng, stream_seed};
use crate::spectral::symmetric_eigen;
use rand::Rng;

/// Errors raised by solvers and simulations.
#[derive(Debug, Error)]
pub enum LearnerError {
    #[error("features contain a non-finite entry")]
    NonFiniteInput,
    #[error("features must have at least one row and one column")]
    EmptyInput,
    #[error("{rows} feature rows but {labels} labels")]
    LabelLengthMismatch { rows: usize, labels: usize },
    #[error("norm-constrained ERM requires a positive radius")]
    RadiusRequired,
    #[error("{0}")]
    InvalidLoss(String),
    #[error("{0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    Core(#[from] CoreError),
}

/// Solver configuration.
#[derive(Debug, Clone)]
pub struct ErmOptions {
    /// Subgradient iterations per restart.
    pub max_iterations: usize,
    /// Also consider the running average of iterates as a candidate.
    pub averaging: bool,
    /// Relative spectral cutoff for the least-squares pseudoinverse.
    pub ridge: f64,
    /// Exact 0/1-and-margin enumeration only when the sample is this small.
    pub enumeration_cap_m: usize,
    /// ... and the feature dimension is this small.
    pub enumeration_cap_d: usize,
    /// Number of subgradient restarts (first starts from the origin).
    pub restarts: usize,
    /// Restart-consistency certificate tolerance for convex objectives.
    pub certificate_tol: f64,
}

impl Default for ErmOptions {
    fn default() -> Self {
        Self {
            max_iterations: 10_000,
            averaging: true,
            ridge: 1e-10,
            enumeration_cap_m: 16,
            enumeration_cap_d: 3,
            restarts: 5,
            certificate_tol: 1e-3,
        }
    }
}

/// Outcome of an ERM call.
#[derive(Debug, Clone)]
pub struct ErmResult {
    pub weights: Vec<f64>,
    /// Average of the requested loss over the sample, at `weights`.
    pub empirical_loss: f64,
    /// True when a hinge surrogate produced the weights for a 0/1 or margin
    /// objective (the reported loss is still the requested one).
    pub surrogate_used: bool,
    /// True for closed-form least squares and exhaustive enumeration.
    pub exact: bool,
    /// Spread of best losses across subgradient restarts (0 for exact
    /// paths); small values certify convergence of the convex solver.
    pub certificate_gap: f64,
}

fn validate_instance(features: &Matrix, labels: &[f64]) -> Result<(), LearnerError> {
    if features.rows() == 0 || features.cols() == 0 {
        return Err(LearnerError::EmptyInput);
    }
    if !features.all_finite() || labels.iter().any(|y| !y.is_finite()) {
        return Err(LearnerError::NonFiniteInput);
    }
    if features.rows() != labels.len() {
        return Err(LearnerError::LabelLengthMismatch {
            rows: features.rows(),
            labels: labels.len(),
        });
    }
    Ok(())
}

/// Average of `loss` over the sample at weights `w`.
pub fn empirical_loss(
    features: &Matrix,
    labels: &[f64],
    w: &[f64],
    loss: &LossSpec,
) -> Result<f64, LearnerError> {
    let m = features.rows();
    let mut acc = 0.0;
    for i in 0..m {
        acc += eval_loss(loss, dot(features.row(i), w), labels[i])?;
    }
    Ok(acc / m as f64)
}

/// Row-weighted loss Σ_i weight_i·ℓ(⟨w, x_i⟩, y_i); rows with zero weight
/// are skipped. Weights are expected to sum to 1.
pub(crate) fn weighted_loss(
    features: &Matrix,
    labels: &[f64],
    row_weights: &[f64],
    w: &[f64],
    loss: &LossSpec,
) -> Result<f64, LearnerError> {
    let mut acc = 0.0;
    for i in 0..features.rows() {
        if row_weights[i] == 0.0 {
            continue;
        }
        acc += row_weights[i] * eval_loss(loss, dot(features.row(i), w), labels[i])?;
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Exact least squares
// ---------------------------------------------------------------------------

/// Minimum-norm least-squares weights: the spectral pseudoinverse applied on
/// whichever side of the instance is smaller.
pub(crate) fn min_norm_least_squares(features: &Matrix, labels: &[f64], cutoff_rel: f64) -> Vec<f64> {
    let m = features.rows();
    let d = features.cols();
    if d <= m {
        // w = (XᵀX)⁺ Xᵀ y
        let xt = features.transpose();
        let a = xt.gram_rows(); // (Xᵀ)(Xᵀ)ᵀ = XᵀX, d×d
        let b = xt.matvec(labels);
        pinv_solve(&a, &b, cutoff_rel)
    } else {
        // w = Xᵀ (XXᵀ)⁺ y
        let k = features.gram_rows(); // m×m
        let alpha = pinv_solve(&k, labels, cutoff_rel);
        features.transpose().matvec(&alpha)
    }
}

/// Solve A⁺ b for symmetric PSD A through its eigendecomposition, dropping
/// eigenvalues below `cutoff_rel`·λ_max.
pub(crate) fn pinv_solve(a: &Matrix, b: &[f64], cutoff_rel: f64) -> Vec<f64> {
    let n = a.rows();
    let (vals, vecs) = symmetric_eigen(a);
    let lam_max = vals.first().copied().unwrap_or(0.0).max(0.0);
    let cutoff = cutoff_rel * lam_max;
    let mut out = vec![0.0; n];
    for (k, &lam) in vals.iter().enumerate() {
        if lam <= cutoff || lam <= 0.0 {
            continue;
        }
        let vk: Vec<f64> = (0..n).map(|i| vecs[(i, k)]).collect();
        let coef = dot(&vk, b) / lam;
        for i in 0..n {
            out[i] += coef * vk[i];
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Subgradient descent (hinge and squared objectives)
// ---------------------------------------------------------------------------

/// Full-batch subgradient of the row-weighted objective at `w`, written
/// into `grad`.
fn subgradient(
    features: &Matrix,
    labels: &[f64],
    row_weights: &[f64],
    w: &[f64],
    kind: LossKind,
    grad: &mut [f64],
) {
    let m = features.rows();
    grad.iter_mut().for_each(|g| *g = 0.0);
    for i in 0..m {
        let weight = row_weights[i];
        if weight == 0.0 {
            continue;
        }
        let row = features.row(i);
        let yhat = dot(row, w);
        let y = labels[i];
        match kind {
            LossKind::Hinge => {
                if yhat * y <= 1.0 {
                    for (g, xi) in grad.iter_mut().zip(row) {
                        *g -= y * xi * weight;
                    }
                }
            }
            LossKind::Squared => {
                let r = (yhat - y) * weight;
                for (g, xi) in grad.iter_mut().zip(row) {
                    *g += r * xi;
                }
            }
            LossKind::ZeroOne | LossKind::Margin => {
                unreachable!("non-convex losses are optimized through the hinge surrogate")
            }
        }
    }
}

/// Best loss-minimizing rescale of `w` along its own ray, capped at c_max.
/// Both convex objectives are convex along rays; squared has a closed form
/// and hinge is handled by ternary search.
fn polish_scale(
    features: &Matrix,
    labels: &[f64],
    row_weights: &[f64],
    w: &mut Vec<f64>,
    kind: LossKind,
    c_max: f64,
) {
    let norm = norm2(w);
    if norm == 0.0 || !c_max.is_finite() {
        return;
    }
    let eval = |c: f64| -> f64 {
        let m = features.rows();
        let mut acc = 0.0;
        for i in 0..m {
            if row_weights[i] == 0.0 {
                continue;
            }
            let yhat = c * dot(features.row(i), w);
            acc += row_weights[i]
                * match kind {
                    LossKind::Hinge => (1.0 - yhat * labels[i]).max(0.0),
                    LossKind::Squared => 0.5 * (yhat - labels[i]).powi(2),
                    _ => unreachable!(),
                };
        }
        acc
    };
    let best_c = match kind {
        LossKind::Squared => {
            // minimize ½·Σ r_i(c·p_i − y_i)²  ⇒  c* = ⟨p,y⟩_r/⟨p,p⟩_r
            let mut pp = 0.0;
            let mut py = 0.0;
            for i in 0..features.rows() {
                let p = dot(features.row(i), w);
                pp += row_weights[i] * p * p;
                py += row_weights[i] * p * labels[i];
            }
            if pp > 0.0 {
                (py / pp).clamp(0.0, c_max)
            } else {
                1.0
            }
        }
        LossKind::Hinge => {
            let (mut lo, mut hi) = (0.0f64, c_max.min(1e6));
            for _ in 0..200 {
                let a = lo + (hi - lo) / 3.0;
                let b = hi - (hi - lo) / 3.0;
                if eval(a) <= eval(b) {
                    hi = b;
                } else {
                    lo = a;
                }
            }
            let mid = 0.5 * (lo + hi);
            if eval(mid) <= eval(1.0) {
                mid
            } else {
                1.0
            }
        }
        _ => unreachable!(),
    };
    if (best_c - 1.0).abs() > 1e-15 {
        for v in w.iter_mut() {
            *v *= best_c;
        }
    }
}

/// Subgradient descent on the row-weighted convex objective `kind`,
/// optionally projected onto the ball of radius `radius`. Deterministic
/// given `seed`. Returns the best candidate weights, their loss, and the
/// spread across restarts. Weights must sum to 1 (uniform 1/m recovers the
/// plain empirical objective).
pub(crate) fn subgradient_minimize(
    features: &Matrix,
    labels: &[f64],
    row_weights: &[f64],
    kind: LossKind,
    radius: Option<f64>,
    opts: &ErmOptions,
    seed: u64,
) -> Result<(Vec<f64>, f64, f64), LearnerError> {
    let loss = LossSpec::standard(kind);
    let m = features.rows();
    let d = features.cols();
    let mut row_norm_max = 0.0f64;
    for i in 0..m {
        row_norm_max = row_norm_max.max(norm2(features.row(i)));
    }
    let y_max = labels.iter().fold(0.0f64, |a, y| a.max(y.abs()));
    // Subgradient norm bound: hinge ≤ max‖x‖; squared ≤ (R·max‖x‖ + max|y|)·max‖x‖.
    let ref_radius = radius.unwrap_or(1.0 + y_max / row_norm_max.max(1e-12));
    let g_bound = match kind {
        LossKind::Hinge => row_norm_max,
        LossKind::Squared => (ref_radius * row_norm_max + y_max) * row_norm_max,
        _ => unreachable!(),
    }
    .max(1e-12);
    let step0 = ref_radius / g_bound;

    let restarts = opts.restarts.max(1);
    let mut best_w: Vec<f64> = vec![0.0; d];
    let mut best_loss = f64::INFINITY;
    let mut restart_bests: Vec<f64> = Vec::with_capacity(restarts);
    let mut grad = vec![0.0; d];

    for r in 0..restarts {
        let mut w: Vec<f64> = if r == 0 {
            vec![0.0; d]
        } else {
            let mut rng = indexed_rng(seed, "erm-restart", r as u64);
            let raw: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let n = norm2(&raw);
            let scale = if n > 0.0 { ref_radius / n } else { 0.0 };
            raw.into_iter().map(|v| v * scale).collect()
        };
        if let Some(rad) = radius {
            project_ball(&mut w, rad);
        }
        let mut avg = vec![0.0; d];
        let mut local_best = weighted_loss(features, labels, row_weights, &w, &loss)?;
        let mut local_best_w = w.clone();
        for t in 1..=opts.max_iterations {
            subgradient(features, labels, row_weights, &w, kind, &mut grad);
            let eta = step0 / (t as f64).sqrt();
            for (wi, gi) in w.iter_mut().zip(&grad) {
                *wi -= eta * gi;
            }
            if let Some(rad) = radius {
                project_ball(&mut w, rad);
            }
            let cur = weighted_loss(features, labels, row_weights, &w, &loss)?;
            if cur < local_best {
                local_best = cur;
                local_best_w.copy_from_slice(&w);
            }
            if opts.averaging {
                let k = t as f64;
                for (ai, wi) in avg.iter_mut().zip(&w) {
                    *ai += (wi - *ai) / k;
                }
            }
        }
        if opts.averaging {
            let avg_loss = weighted_loss(features, labels, row_weights, &avg, &loss)?;
            if avg_loss < local_best {
                local_best = avg_loss;
                local_best_w = avg.clone();
            }
        }
        // Convex along rays: close with the optimal rescale of the winner.
        let c_max = radius.map_or(1e6, |rad| {
            let n = norm2(&local_best_w);
            if n > 0.0 {
                rad / n
            } else {
                1.0
            }
        });
        polish_scale(features, labels, row_weights, &mut local_best_w, kind, c_max);
        let polished = weighted_loss(features, labels, row_weights, &local_best_w, &loss)?;
        let restart_best = polished.min(local_best);
        if polished <= local_best {
            local_best_w = local_best_w.clone();
        }
        restart_bests.push(restart_best);
        if restart_best < best_loss {
            best_loss = restart_best;
            best_w = local_best_w;
        }
    }
    let spread = restart_bests.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - restart_bests.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok((best_w, best_loss, spread.max(0.0)))
}

fn project_ball(w: &mut [f64], radius: f64) {
    let n = norm2(w);
    if n > radius {
        let s = radius / n;
        for v in w.iter_mut() {
            *v *= s;
        }
    }
}

// ---------------------------------------------------------------------------
// Exact enumeration for 0/1 and margin objectives
// ---------------------------------------------------------------------------

/// Decide whether some w satisfies y_i⟨w, x_i⟩ ≥ 1 on every index of `t`,
/// and return such a w when one exists.
///
/// If the system is feasible, the minimum-norm feasible point lies in the
/// span of its tight constraints and solves them with equality, so it is
/// recovered by scanning minimum-norm solutions of equality systems over
/// subsets of at most `dim` constraints (larger tight sets are redundant:
/// a linearly independent subset spans the same row space and produces the
/// same minimum-norm solution).
fn separating_weights(
    features: &Matrix,
    labels: &[f64],
    t: &[usize],
    dim: usize,
) -> Option<Vec<f64>> {
    if t.is_empty() {
        return Some(vec![0.0; features.cols()]);
    }
    let d = features.cols();
    let rows: Vec<Vec<f64>> = t
        .iter()
        .map(|&i| features.row(i).iter().map(|x| x * labels[i]).collect())
        .collect();
    let k_max = dim.min(t.len());
    let mut subset: Vec<usize> = Vec::new();
    fn rec(
        rows: &[Vec<f64>],
        d: usize,
        k_max: usize,
        start: usize,
        subset: &mut Vec<usize>,
        found: &mut Option<Vec<f64>>,
    ) {
        if found.is_some() {
            return;
        }
        if !subset.is_empty() {
            // Min-norm solution of a_j·w = 1 for j in subset:
            // w = Aᵀ(AAᵀ)⁺1.
            let k = subset.len();
            let mut gram = Matrix::zeros(k, k);
            for (p, &i) in subset.iter().enumerate() {
                for (q, &j) in subset.iter().enumerate() {
                    gram[(p, q)] = dot(&rows[i], &rows[j]);
                }
            }
            let alpha = pinv_solve(&gram, &vec![1.0; k], 1e-10);
            let mut w = vec![0.0; d];
            for (p, &i) in subset.iter().enumerate() {
                for (wi, ai) in w.iter_mut().zip(&rows[i]) {
                    *wi += alpha[p] * ai;
                }
            }
            if rows.iter().all(|a| dot(a, &w) >= 1.0 - 1e-9) {
                // Rescale so every margin strictly exceeds 1 (covers the
                // weak-inequality margin loss and the 0/1 sign condition).
                let min_m = rows.iter().map(|a| dot(a, &w)).fold(f64::INFINITY, f64::min);
                let scale = (1.0 + 1e-6) / min_m.max(1e-12);
                for wi in w.iter_mut() {
                    *wi *= scale.max(1.0);
                }
                *found = Some(w);
                return;
            }
        }
        if subset.len() == k_max {
            return;
        }
        for next in start..rows.len() {
            subset.push(next);
            rec(rows, d, k_max, next + 1, subset, found);
            subset.pop();
            if found.is_some() {
                return;
            }
        }
    }
    let mut found = None;
    rec(&rows, d, k_max, 0, &mut subset, &mut found);
    found
}

/// Exact ERM for the 0/1 or margin objective by enumerating candidate
/// mistake sets in increasing size and testing separability of the rest.
fn exact_discrete_erm(
    features: &Matrix,
    labels: &[f64],
    loss: &LossSpec,
) -> Result<ErmResult, LearnerError> {
    let m = features.rows();
    let d = features.cols();
    debug_assert!(m <= 20, "enumeration is exponential in m");
    let mut masks_by_popcount: Vec<Vec<u32>> = vec![Vec::new(); m + 1];
    for mask in 0u32..(1u32 << m) {
        masks_by_popcount[mask.count_ones() as usize].push(mask);
    }
    for k in 0..=m {
        for &mistake_mask in &masks_by_popcount[k] {
            let t: Vec<usize> = (0..m).filter(|i| mistake_mask & (1 << i) == 0).collect();
            if let Some(w) = separating_weights(features, labels, &t, d) {
                let achieved = empirical_loss(features, labels, &w, loss)?;
                debug_assert!(achieved <= k as f64 / m as f64 + 1e-12);
                return Ok(ErmResult {
                    weights: w,
                    empirical_loss: achieved,
                    surrogate_used: false,
                    exact: true,
                    certificate_gap: 0.0,
                });
            }
        }
    }
    // k = m always succeeds with w = 0, so this is unreachable.
    unreachable!("the empty constraint set is always separable");
}

// ---------------------------------------------------------------------------
// Public solvers
// ---------------------------------------------------------------------------

/// Unconstrained empirical risk minimization over linear predictors.
///
/// Squared loss is solved exactly (minimum-norm least squares). Hinge runs
/// restarted subgradient descent. The 0/1 and margin objectives are solved
/// exactly by enumeration when the instance fits the caps, and through the
/// hinge surrogate (with the true loss reported) otherwise.
pub fn linear_erm(
    features: &Matrix,
    labels: &[f64],
    loss: &LossSpec,
    opts: &ErmOptions,
) -> Result<ErmResult, LearnerError> {
    linear_erm_seeded(features, labels, loss, opts, 0)
}

/// `linear_erm` with an explicit seed for the subgradient restarts.
pub fn linear_erm_seeded(
    features: &Matrix,
    labels: &[f64],
    loss: &LossSpec,
    opts: &ErmOptions,
    seed: u64,
) -> Result<ErmResult, LearnerError> {
    validate_instance(features, labels)?;
    match loss.kind {
        LossKind::Squared => {
            let w = min_norm_least_squares(features, labels, opts.ridge);
            let achieved = empirical_loss(features, labels, &w, loss)?;
            Ok(ErmResult {
                weights: w,
                empirical_loss: achieved,
                surrogate_used: false,
                exact: true,
                certificate_gap: 0.0,
            })
        }
        LossKind::Hinge => {
            let uniform = vec![1.0 / features.rows() as f64; features.rows()];
            let (w, achieved, gap) =
                subgradient_minimize(features, labels, &uniform, LossKind::Hinge, None, opts, seed)?;
            Ok(ErmResult {
                weights: w,
                empirical_loss: achieved,
                surrogate_used: false,
                exact: false,
                certificate_gap: gap,
            })
        }
        LossKind::ZeroOne | LossKind::Margin => {
            if features.rows() <= opts.enumeration_cap_m && features.cols() <= opts.enumeration_cap_d
            {
                exact_discrete_erm(features, labels, loss)
            } else {
                let uniform = vec![1.0 / features.rows() as f64; features.rows()];
                let (w, _, gap) =
                    subgradient_minimize(features, labels, &uniform, LossKind::Hinge, None, opts, seed)?;
                let achieved = empirical_loss(features, labels, &w, loss)?;
                Ok(ErmResult {
                    weights: w,
                    empirical_loss: achieved,
                    surrogate_used: true,
                    exact: false,
                    certificate_gap: gap,
                })
            }
        }
    }
}

/// Empirical risk minimization restricted to the ball ‖w‖₂ ≤ R, by projected
/// subgradient descent. Hinge and squared objectives are supported directly;
/// the margin objective runs the hinge surrogate and reports its true loss.
pub fn norm_constrained_erm(
    features: &Matrix,
    labels: &[f64],
    radius: f64,
    loss: &LossSpec,
    opts: &ErmOptions,
) -> Result<ErmResult, LearnerError> {
    norm_constrained_erm_seeded(features, labels, radius, loss, opts, 0)
}

/// `norm_constrained_erm` with an explicit seed for the restarts.
pub fn norm_constrained_erm_seeded(
    features: &Matrix,
    labels: &[f64],
    radius: f64,
    loss: &LossSpec,
    opts: &ErmOptions,
    seed: u64,
) -> Result<ErmResult, LearnerError> {
    validate_instance(features, labels)?;
    if !(radius > 0.0) {
        return Err(LearnerError::RadiusRequired);
    }
    let (run_kind, surrogate) = match loss.kind {
        LossKind::Hinge => (LossKind::Hinge, false),
        LossKind::Squared => (LossKind::Squared, false),
        LossKind::Margin => (LossKind::Hinge, true),
        LossKind::ZeroOne => {
            return Err(LearnerError::InvalidLoss(
                "norm-constrained ERM needs a convex objective (hinge or squared) \
                 or the margin loss via its hinge surrogate"
                    .into(),
            ))
        }
    };
    let uniform = vec![1.0 / features.rows() as f64; features.rows()];
    let (mut w, _, gap) =
        subgradient_minimize(features, labels, &uniform, run_kind, Some(radius), opts, seed)?;
    project_ball(&mut w, radius);
    let achieved = empirical_loss(features, labels, &w, loss)?;
    Ok(ErmResult {
        weights: w,
        empirical_loss: achieved,
        surrogate_used: surrogate,
        exact: false,
        certificate_gap: gap,
    })
}

// ---------------------------------------------------------------------------
// Generalization bounds
// ---------------------------------------------------------------------------

/// Which deviation bound to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// c_dc·√(d/m): dimension-based uniform deviation.
    Dimension,
    /// c_mc·R/√m: norm-based deviation over the radius-R ball.
    Norm,
}

/// Evaluate the deviation term added by the guaranteed learning modes.
pub fn generalization_bound(kind: BoundKind, loss: &LossSpec, d_or_r: f64, m: usize) -> f64 {
    assert!(m >= 1, "sample size must be at least 1");
    let m = m as f64;
    match kind {
        BoundKind::Dimension => loss.c_dc * (d_or_r / m).sqrt(),
        BoundKind::Norm => loss.c_mc * d_or_r / m.sqrt(),
    }
}

// ---------------------------------------------------------------------------
// Learning simulations
// ---------------------------------------------------------------------------

/// The four simulated learning modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LearningMode {
    /// Unconstrained linear ERM, scored by exact population loss.
    Lin,
    /// Lin plus the dimension-based deviation term.
    #[serde(rename = "gLin")]
    GLin,
    /// Norm-constrained ERM, scored by exact population loss (margin loss
    /// is scored by the population 0/1 error of the margin solution).
    Ker,
    /// Ker plus the norm-based deviation term.
    #[serde(rename = "gKer")]
    GKer,
}

impl LearningMode {
    pub fn name(self) -> &'static str {
        match self {
            LearningMode::Lin => "Lin",
            LearningMode::GLin => "gLin",
            LearningMode::Ker => "Ker",
            LearningMode::GKer => "gKer",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "Lin" | "lin" => Some(LearningMode::Lin),
            "gLin" | "glin" => Some(LearningMode::GLin),
            "Ker" | "ker" => Some(LearningMode::Ker),
            "gKer" | "gker" => Some(LearningMode::GKer),
            _ => None,
        }
    }

    fn constrained(self) -> bool {
        matches!(self, LearningMode::Ker | LearningMode::GKer)
    }
}

/// Specification of one Monte Carlo learning experiment.
#[derive(Debug, Clone)]
pub struct LearningSimSpec {
    pub mode: LearningMode,
    pub class: FiniteHypothesisClass,
    pub distribution: DistributionOverX,
    pub loss: LossSpec,
    pub family: EmbeddingFamily,
    pub sample_size: usize,
    pub trials: usize,
    /// Ball radius; required by the constrained modes.
    pub radius: Option<f64>,
    pub seed: u64,
    pub erm: ErmOptions,
}

/// One (target hypothesis, trial) outcome.
#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub mode: LearningMode,
    pub sample_size: usize,
    pub trial: usize,
    pub hypothesis_id: String,
    pub empirical_loss: f64,
    /// Exact population score of the learned weights, plus the mode's
    /// deviation term for guaranteed modes.
    pub population_criterion: f64,
    /// The added deviation term (0 for the plain modes).
    pub bound_term: f64,
    /// Per-trial derived seed, for standalone reproduction.
    pub seed: u64,
}

/// Per-target-hypothesis aggregate.
#[derive(Debug, Clone, Serialize)]
pub struct HypothesisSummary {
    pub hypothesis_id: String,
    pub mean_criterion: f64,
    pub std_error: f64,
}

/// Full simulation outcome: per-trial records in (hypothesis, trial) order,
/// per-hypothesis means, and the worst (largest) mean with its uncertainty.
#[derive(Debug, Clone, Serialize)]
pub struct SimulationReport {
    pub mode: LearningMode,
    pub sample_size: usize,
    pub trials: usize,
    pub records: Vec<TrialRecord>,
    pub summaries: Vec<HypothesisSummary>,
    pub max_mean_criterion: f64,
    pub max_hypothesis_id: String,
    pub max_std_error: f64,
}

fn validate_spec(spec: &LearningSimSpec) -> Result<(), LearnerError> {
    if spec.sample_size < 1 {
        return Err(LearnerError::InvalidSpec("sample size must be ≥ 1".into()));
    }
    if spec.trials < 1 {
        return Err(LearnerError::InvalidSpec("trials must be ≥ 1".into()));
    }
    if spec.mode.constrained() {
        match spec.radius {
            Some(r) if r > 0.0 => {}
            _ => return Err(LearnerError::RadiusRequired),
        }
    }
    if spec.distribution.len() != spec.class.num_points() {
        return Err(LearnerError::InvalidSpec(format!(
            "distribution has {} entries for a {}-point domain",
            spec.distribution.len(),
            spec.class.num_points()
        )));
    }
    Ok(())
}

/// Feature rows of the sampled points under a tabular embedding whose
/// domain matches the class domain.
fn embedded_rows(
    phi: &Embedding,
    class: &FiniteHypothesisClass,
    sample: &[usize],
) -> Result<Matrix, LearnerError> {
    // Classes over functional domains must be finitely restricted before
    // simulation; only tabular embeddings can be indexed by domain points.
    let cols: Vec<Vec<f64>> = match &phi.flavor {
        crate::embeddings::EmbeddingFlavor::Tabular { domain_labels, .. } => {
            if domain_labels != class.domain_labels() {
                return Err(LearnerError::InvalidSpec(
                    "embedding domain does not match the class domain".into(),
                ));
            }
            sample
                .iter()
                .map(|&x| phi.feature_column(x))
                .collect::<Result<_, _>>()?
        }
        crate::embeddings::EmbeddingFlavor::LinearMap { .. } => {
            return Err(LearnerError::InvalidSpec(
                "simulation needs a tabular embedding over the finite domain; \
                 restrict functional classes first"
                    .into(),
            ))
        }
    };
    let d = phi.dimension;
    let mut features = Matrix::zeros(sample.len(), d);
    for (i, col) in cols.iter().enumerate() {
        for j in 0..d {
            features[(i, j)] = col[j];
        }
    }
    Ok(features)
}

/// Exact population score of learned weights over the finite domain.
fn population_loss(
    phi: &Embedding,
    class: &FiniteHypothesisClass,
    d: &DistributionOverX,
    target: usize,
    w: &[f64],
    loss: &LossSpec,
) -> Result<f64, LearnerError> {
    let probs = d.probabilities();
    let mut acc = 0.0;
    for x in 0..class.num_points() {
        if probs[x] == 0.0 {
            continue;
        }
        let feat = phi.feature_column(x)?;
        acc += probs[x] * eval_loss(loss, dot(w, &feat), class.value(target, x))?;
    }
    Ok(acc)
}

/// Run one (target, trial) job.
fn run_trial(
    spec: &LearningSimSpec,
    target: usize,
    trial: usize,
    job: u64,
) -> Result<TrialRecord, LearnerError> {
    let trial_seed = child_seed(stream_seed(spec.seed, "sim-trial"), job);
    let phi = sample_embedding(&spec.family, job)?;
    let mut rng = indexed_rng(spec.seed, "sim-sample", job);
    let sample: Vec<usize> = (0..spec.sample_size)
        .map(|_| spec.distribution.sample_index(&mut rng))
        .collect();
    let features = embedded_rows(&phi, &spec.class, &sample)?;
    let labels: Vec<f64> = sample.iter().map(|&x| spec.class.value(target, x)).collect();

    let erm = if spec.mode.constrained() {
        norm_constrained_erm_seeded(
            &features,
            &labels,
            spec.radius.expect("validated"),
            &spec.loss,
            &spec.erm,
            trial_seed,
        )?
    } else {
        linear_erm_seeded(&features, &labels, &spec.loss, &spec.erm, trial_seed)?
    };

    // Constrained modes with the margin objective are scored by the
    // population 0/1 error of the margin solution.
    let score_loss = if spec.mode.constrained() && spec.loss.kind == LossKind::Margin {
        LossSpec::zero_one()
    } else {
        spec.loss.clone()
    };
    let pop = population_loss(
        &phi,
        &spec.class,
        &spec.distribution,
        target,
        &erm.weights,
        &score_loss,
    )?;
    let bound_term = match spec.mode {
        LearningMode::Lin | LearningMode::Ker => 0.0,
        LearningMode::GLin => generalization_bound(
            BoundKind::Dimension,
            &spec.loss,
            phi.dimension as f64,
            spec.sample_size,
        ),
        LearningMode::GKer => generalization_bound(
            BoundKind::Norm,
            &spec.loss,
            spec.radius.expect("validated"),
            spec.sample_size,
        ),
    };
    Ok(TrialRecord {
        mode: spec.mode,
        sample_size: spec.sample_size,
        trial,
        hypothesis_id: spec.class.hypothesis_labels()[target].clone(),
        empirical_loss: erm.empirical_loss,
        population_criterion: pop + bound_term,
        bound_term,
        seed: trial_seed,
    })
}

/// Monte Carlo estimate of the mode's learning criterion: for every target
/// hypothesis, draw realizable samples, fit the mode's ERM, and score it.
/// Trials run in parallel; records are reduced in fixed (hypothesis, trial)
/// order, so equal specs produce identical reports.
pub fn simulate_learning(spec: &LearningSimSpec) -> Result<SimulationReport, LearnerError> {
    validate_spec(spec)?;
    let n = spec.class.num_hypotheses();
    let trials = spec.trials;
    let jobs: Vec<(usize, usize)> = (0..n)
        .flat_map(|h| (0..trials).map(move |t| (h, t)))
        .collect();
    let records: Vec<TrialRecord> = jobs
        .par_iter()
        .map(|&(h, t)| run_trial(spec, h, t, (h * trials + t) as u64))
        .collect::<Result<_, _>>()?;

    let mut summaries = Vec::with_capacity(n);
    let mut max_mean = f64::NEG_INFINITY;
    let mut max_id = String::new();
    let mut max_se = 0.0;
    for h in 0..n {
        let vals: Vec<f64> = records[h * trials..(h + 1) * trials]
            .iter()
            .map(|r| r.population_criterion)
            .collect();
        let mean = vals.iter().sum::<f64>() / trials as f64;
        let se = if trials >= 2 {
            let var =
                vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (trials as f64 - 1.0);
            (var / trials as f64).sqrt()
        } else {
            0.0
        };
        let id = spec.class.hypothesis_labels()[h].clone();
        if mean > max_mean {
            max_mean = mean;
            max_id = id.clone();
            max_se = se;
        }
        summaries.push(HypothesisSummary {
            hypothesis_id: id,
            mean_criterion: mean,
            std_error: se,
        });
    }
    Ok(SimulationReport {
        mode: spec.mode,
        sample_size: spec.sample_size,
        trials,
        records,
        summaries,
        max_mean_criterion: max_mean,
        max_hypothesis_id: max_id,
        max_std_error: max_se,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::parities;
    use crate::core::LabelKind;
    use crate::embeddings::{representer_reduce, FamilyKind};

    fn opts() -> ErmOptions {
        ErmOptions::default()
    }

    #[test]
    fn squared_erm_interpolates_realizable_data() {
        // Invertible features: exact interpolation, loss 0.
        let x = Matrix::from_rows(&[vec![1.0, 0.0], vec![1.0, 1.0]]);
        let y = vec![1.0, -1.0];
        let r = linear_erm(&x, &y, &LossSpec::squared(), &opts()).unwrap();
        assert!(r.exact);
        assert!(r.empirical_loss < 1e-9, "loss {}", r.empirical_loss);
    }

    #[test]
    fn squared_erm_matches_closed_form_mean() {
        // One constant feature, labels {1, 3}: least squares gives w = 2 and
        // loss ½·mean{(2−1)², (2−3)²} = 0.5.
        let x = Matrix::from_rows(&[vec![1.0], vec![1.0]]);
        let y = vec![1.0, 3.0];
        let r = linear_erm(&x, &y, &LossSpec::squared(), &opts()).unwrap();
        assert!((r.weights[0] - 2.0).abs() < 1e-9);
        assert!((r.empirical_loss - 0.5).abs() < 1e-9);
    }

    #[test]
    fn hinge_erm_solves_separable_data() {
        // Margin 1 is achievable with w = (0.5, 0): subgradient + scale
        // polish must drive the hinge loss to ≈ 0.
        let x = Matrix::from_rows(&[vec![2.0, 0.3], vec![-2.0, 0.1]]);
        let y = vec![1.0, -1.0];
        let r = linear_erm(&x, &y, &LossSpec::hinge(), &opts()).unwrap();
        assert!(r.empirical_loss <= 1e-3, "hinge loss {}", r.empirical_loss);
        assert!(r.certificate_gap <= 1e-3, "restarts disagree: {}", r.certificate_gap);
    }

    #[test]
    fn exact_zero_one_erm_on_conflicting_points() {
        // One feature, both points positive, opposite labels: one mistake is
        // unavoidable and the enumerator must find exactly one.
        let x = Matrix::from_rows(&[vec![1.0], vec![2.0]]);
        let y = vec![1.0, -1.0];
        let r = linear_erm(&x, &y, &LossSpec::zero_one(), &opts()).unwrap();
        assert!(r.exact, "m=2 ≤ 16, d=1 ≤ 3 must take the exact path");
        assert!((r.empirical_loss - 0.5).abs() < 1e-12);
    }

    #[test]
    fn exact_margin_erm_respects_weak_inequality() {
        // Realizable with margin; the returned weights must give margins
        // strictly above 1 so the weak-inequality margin loss reads 0.
        let x = Matrix::from_rows(&[vec![1.0, 1.0], vec![-1.0, 1.0], vec![0.0, -2.0]]);
        let y = vec![1.0, -1.0, -1.0];
        let r = linear_erm(&x, &y, &LossSpec::margin(), &opts()).unwrap();
        assert!(r.exact);
        assert!(r.empirical_loss < 1e-12, "margin loss {}", r.empirical_loss);
        for i in 0..3 {
            let margin = dot(x.row(i), &r.weights) * y[i];
            assert!(margin > 1.0, "margin {margin} must strictly exceed 1");
        }
    }

    #[test]
    fn surrogate_path_reports_true_loss() {
        // d = 4 exceeds the enumeration cap: hinge surrogate, but the
        // reported number is the true 0/1 loss.
        let x = Matrix::identity(4);
        let y = vec![1.0, -1.0, 1.0, -1.0];
        let r = linear_erm(&x, &y, &LossSpec::zero_one(), &opts()).unwrap();
        assert!(r.surrogate_used);
        assert!(r.empirical_loss < 1e-12, "one-hots are separable");
    }

    #[test]
    fn norm_constrained_tiny_radius_behaves_like_zero_weights() {
        let x = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        let y = vec![1.0, -1.0];
        for loss in [LossSpec::hinge(), LossSpec::squared()] {
            let r = norm_constrained_erm(&x, &y, 1e-12, &loss, &opts()).unwrap();
            assert!(norm2(&r.weights) <= 1e-12 + 1e-9);
            // mean ℓ(0, y): hinge → 1; squared → ½·1 = 0.5.
            let zero_loss = match loss.kind {
                LossKind::Hinge => 1.0,
                LossKind::Squared => 0.5,
                _ => unreachable!(),
            };
            assert!(
                (r.empirical_loss - zero_loss).abs() < 1e-6,
                "{:?}: {} vs {}",
                loss.kind,
                r.empirical_loss,
                zero_loss
            );
        }
    }

    #[test]
    fn norm_constrained_matches_unconstrained_when_radius_is_loose() {
        let x = Matrix::from_rows(&[
            vec![1.0, 0.2, -0.5],
            vec![-0.3, 1.0, 0.4],
            vec![0.6, -0.8, 1.0],
            vec![0.1, 0.1, -1.0],
        ]);
        let y = vec![1.0, -1.0, 1.0, 1.0];
        let exact = linear_erm(&x, &y, &LossSpec::squared(), &opts()).unwrap();
        let r_needed = norm2(&exact.weights);
        let constrained =
            norm_constrained_erm(&x, &y, r_needed * 2.0, &LossSpec::squared(), &opts()).unwrap();
        assert!(
            (constrained.empirical_loss - exact.empirical_loss).abs() <= 1e-3,
            "constrained {} vs exact {}",
            constrained.empirical_loss,
            exact.empirical_loss
        );
    }

    #[test]
    fn norm_constrained_realizable_at_witness_radius() {
        // Planted separator w* = (1.2, -0.9), margins ≥ 1.2; the witness
        // radius R = ‖w*‖ suffices for hinge loss ≈ 0.
        let w_star = [1.2, -0.9];
        let pts = [
            vec![1.0, 0.0],
            vec![0.0, -1.2],
            vec![1.1, -0.4],
            vec![-1.0, -0.4],
        ];
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for p in &pts {
            let margin: f64 = dot(&w_star.to_vec(), p);
            let label = margin.signum();
            let scale = 1.2 / margin.abs();
            rows.push(p.iter().map(|v| v * scale).collect::<Vec<_>>());
            y.push(label);
        }
        let x = Matrix::from_rows(&rows);
        let radius = norm2(&w_star.to_vec());
        let r = norm_constrained_erm(&x, &y, radius, &LossSpec::hinge(), &opts()).unwrap();
        assert!(norm2(&r.weights) <= radius + 1e-9, "ball constraint violated");
        assert!(r.empirical_loss <= 1e-3, "hinge {}", r.empirical_loss);
    }

    #[test]
    fn constrained_output_never_exceeds_radius() {
        let x = Matrix::from_rows(&[vec![5.0, -3.0], vec![2.0, 8.0], vec![-4.0, 1.0]]);
        let y = vec![1.0, -1.0, 1.0];
        for radius in [0.1, 1.0, 7.5] {
            for loss in [LossSpec::hinge(), LossSpec::squared(), LossSpec::margin()] {
                let r = norm_constrained_erm(&x, &y, radius, &loss, &opts()).unwrap();
                assert!(
                    norm2(&r.weights) <= radius + 1e-9,
                    "‖w‖ = {} > R = {radius}",
                    norm2(&r.weights)
                );
            }
        }
    }

    #[test]
    fn zero_one_rejected_by_norm_constrained_erm() {
        let x = Matrix::identity(2);
        let y = vec![1.0, -1.0];
        assert!(matches!(
            norm_constrained_erm(&x, &y, 1.0, &LossSpec::zero_one(), &opts()),
            Err(LearnerError::InvalidLoss(_))
        ));
    }

    #[test]
    fn generalization_bound_spot_values() {
        // dimension: c_dc = 1, d = 4, m = 16 → √(4/16) = 0.5
        let b = generalization_bound(BoundKind::Dimension, &LossSpec::zero_one(), 4.0, 16);
        assert!((b - 0.5).abs() < 1e-15);
        // norm: hinge (c_mc = 2), R = 2, m = 16 → 2·2/4 = 1.0
        let b = generalization_bound(BoundKind::Norm, &LossSpec::hinge(), 2.0, 16);
        assert!((b - 1.0).abs() < 1e-15);
        // margin variant: constant 2, R = 1, m = 4 → 2·1/2 = 1.0
        let b = generalization_bound(BoundKind::Norm, &LossSpec::margin(), 1.0, 4);
        assert!((b - 1.0).abs() < 1e-15);
    }

    #[test]
    fn min_norm_solution_never_exceeds_alternative_minimizers() {
        // Rank-deficient instance: 1 sample in 3 dims. Any w + null-space
        // shift is also an empirical minimizer; the reported population-style
        // score of the canonical (minimum-norm) solution must be a lower
        // bound on the sup over perturbed minimizers.
        let x = Matrix::from_rows(&[vec![1.0, 2.0, -1.0]]);
        let y = vec![3.0];
        let r = linear_erm(&x, &y, &LossSpec::squared(), &opts()).unwrap();
        assert!(r.empirical_loss < 1e-18);
        // Null space of X: eigenvectors of XᵀX with eigenvalue ~0.
        let xtx = x.transpose().gram_rows();
        let (vals, vecs) = symmetric_eigen(&xtx);
        let null: Vec<Vec<f64>> = (0..3)
            .filter(|&k| vals[k] < 1e-12)
            .map(|k| (0..3).map(|i| vecs[(i, k)]).collect())
            .collect();
        assert_eq!(null.len(), 2, "rank-1 instance has a 2-dim null space");
        // Score = squared loss against a fixed probe target on a probe point
        // outside the sample row space.
        let probe = vec![0.0, 0.0, 1.0];
        let score = |w: &[f64]| 0.5 * (dot(w, &probe) - 1.0).powi(2);
        let reported = score(&r.weights);
        let mut sup = reported;
        let mut state = 99u64;
        for _ in 0..100 {
            let mut w = r.weights.clone();
            for b in &null {
                state = crate::rng::mix64(state);
                let c = (state % 2001) as f64 / 1000.0 - 1.0;
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi += c * bi;
                }
            }
            // Still an empirical minimizer:
            let el = empirical_loss(&x, &y, &w, &LossSpec::squared()).unwrap();
            assert!(el < 1e-15, "null-space shift changed the empirical loss");
            sup = sup.max(score(&w));
        }
        assert!(
            reported <= sup + 1e-12,
            "canonical solution must lower-bound the sup over minimizers"
        );
    }

    #[test]
    fn representer_reduction_preserves_erm_losses() {
        // Project features onto the sample span before ERM: empirical
        // predictions (hence losses) are unchanged.
        let feats = Matrix::from_rows(&[
            vec![1.0, 0.2, -0.3, 0.8],
            vec![0.0, 1.0, 0.5, -0.2],
            vec![0.4, -0.6, 1.0, 0.0],
            vec![-0.1, 0.3, 0.0, 1.0],
            vec![0.7, 0.7, -0.7, 0.1],
        ]);
        let phi = Embedding::tabular(feats, (0..4).map(|j| format!("x{j}")).collect()).unwrap();
        let sample_ids: Vec<String> = vec!["x0".into(), "x2".into(), "x3".into()];
        let (psi, _) = representer_reduce(&phi, &sample_ids).unwrap();
        assert!(psi.dimension <= 3);
        let y = vec![1.0, -1.0, 1.0];
        let full_rows: Vec<Vec<f64>> =
            sample_ids.iter().map(|id| phi.feature_of(id).unwrap()).collect();
        let red_rows: Vec<Vec<f64>> =
            sample_ids.iter().map(|id| psi.feature_of(id).unwrap()).collect();
        let full = linear_erm(
            &Matrix::from_rows(&full_rows),
            &y,
            &LossSpec::squared(),
            &opts(),
        )
        .unwrap();
        let reduced = linear_erm(
            &Matrix::from_rows(&red_rows),
            &y,
            &LossSpec::squared(),
            &opts(),
        )
        .unwrap();
        assert!(
            (full.empirical_loss - reduced.empirical_loss).abs() < 1e-9,
            "{} vs {}",
            full.empirical_loss,
            reduced.empirical_loss
        );
    }

    fn identity_family(class: &FiniteHypothesisClass, seed: u64) -> EmbeddingFamily {
        EmbeddingFamily {
            kind: FamilyKind::Identity {
                domain_labels: class.domain_labels().to_vec(),
            },
            master_seed: seed,
        }
    }

    #[test]
    fn simulation_interpolates_on_full_support() {
        // Identity features, squared loss, m large enough that every point
        // is seen: population criterion ≈ 0.
        let class = parities(2).unwrap();
        let d = DistributionOverX::uniform(4);
        let spec = LearningSimSpec {
            mode: LearningMode::Lin,
            family: identity_family(&class, 42),
            class,
            distribution: d,
            loss: LossSpec::squared(),
            sample_size: 48,
            trials: 3,
            radius: None,
            seed: 42,
            erm: opts(),
        };
        let report = simulate_learning(&spec).unwrap();
        assert!(
            report.max_mean_criterion < 0.05,
            "interpolation should drive the criterion to ~0, got {}",
            report.max_mean_criterion
        );
    }

    #[test]
    fn guaranteed_linear_criterion_is_bound_plus_zero_on_easy_instance() {
        // One-hot features with m = 64 over four points: every point is seen
        // and every sign is recovered, so the exact population 0/1 term is 0
        // and the criterion equals the analytic deviation term √(4/64) = 0.25.
        let class = parities(2).unwrap();
        let d = DistributionOverX::uniform(4);
        let spec = LearningSimSpec {
            mode: LearningMode::GLin,
            family: identity_family(&class, 42),
            class,
            distribution: d,
            loss: LossSpec::zero_one(),
            sample_size: 64,
            trials: 2,
            radius: None,
            seed: 42,
            erm: opts(),
        };
        let report = simulate_learning(&spec).unwrap();
        for r in &report.records {
            assert!((r.bound_term - 0.25).abs() < 1e-12);
            assert!(
                (r.population_criterion - 0.25).abs() < 1e-9,
                "criterion {} should equal the bound term exactly",
                r.population_criterion
            );
        }
    }

    #[test]
    fn guaranteed_mode_dominates_plain_mode_trialwise() {
        // Same seed → identical (embedding, sample) streams; the guaranteed
        // criterion adds a nonnegative term.
        let class = parities(2).unwrap();
        let d = DistributionOverX::uniform(4);
        let base = LearningSimSpec {
            mode: LearningMode::Lin,
            family: identity_family(&class, 7),
            class,
            distribution: d,
            loss: LossSpec::squared(),
            sample_size: 3,
            trials: 4,
            radius: None,
            seed: 7,
            erm: opts(),
        };
        let mut gspec = base.clone();
        gspec.mode = LearningMode::GLin;
        let plain = simulate_learning(&base).unwrap();
        let guaranteed = simulate_learning(&gspec).unwrap();
        for (p, g) in plain.records.iter().zip(&guaranteed.records) {
            assert_eq!(p.hypothesis_id, g.hypothesis_id);
            assert_eq!(p.seed, g.seed, "streams must be identical across modes");
            assert!(
                g.population_criterion >= p.population_criterion - 1e-12,
                "guaranteed {} < plain {}",
                g.population_criterion,
                p.population_criterion
            );
        }
    }

    #[test]
    fn constrained_mode_feels_a_binding_radius() {
        // Sign class over two points with one-hot features: margins scale
        // with R/√2. R = 1 leaves hinge ≈ 1 − 1/√2 ≈ 0.29; R = 2.5 fits.
        let m = Matrix::from_rows(&[vec![-1.0, 1.0]]);
        let class = FiniteHypothesisClass::from_matrix(m, LabelKind::Binary).unwrap();
        let d = DistributionOverX::uniform(2);
        let tight = LearningSimSpec {
            mode: LearningMode::Ker,
            family: identity_family(&class, 5),
            class: class.clone(),
            distribution: d.clone(),
            loss: LossSpec::hinge(),
            sample_size: 16,
            trials: 2,
            radius: Some(1.0),
            seed: 5,
            erm: opts(),
        };
        let mut loose = tight.clone();
        loose.radius = Some(2.5);
        let r_tight = simulate_learning(&tight).unwrap();
        let r_loose = simulate_learning(&loose).unwrap();
        assert!(
            r_tight.max_mean_criterion >= 0.25,
            "binding radius must keep the criterion away from 0, got {}",
            r_tight.max_mean_criterion
        );
        assert!(
            r_loose.max_mean_criterion <= 0.05,
            "loose radius should fit, got {}",
            r_loose.max_mean_criterion
        );
    }

    #[test]
    fn simulation_is_deterministic() {
        let class = parities(2).unwrap();
        let d = DistributionOverX::uniform(4);
        let spec = LearningSimSpec {
            mode: LearningMode::GKer,
            family: identity_family(&class, 11),
            class,
            distribution: d,
            loss: LossSpec::margin(),
            sample_size: 8,
            trials: 3,
            radius: Some(3.0),
            seed: 11,
            erm: opts(),
        };
        let a = simulate_learning(&spec).unwrap();
        let b = simulate_learning(&spec).unwrap();
        assert_eq!(a.records.len(), b.records.len());
        for (x, y) in a.records.iter().zip(&b.records) {
            assert_eq!(x.population_criterion.to_bits(), y.population_criterion.to_bits());
            assert_eq!(x.empirical_loss.to_bits(), y.empirical_loss.to_bits());
        }
    }

    #[test]
    fn kernel_margin_mode_scores_population_zero_one() {
        // With a radius large enough to place every margin above 1, the
        // margin-mode criterion is the population 0/1 error of the margin
        // solution, which is 0 — even though the margin loss of a smaller-R
        // run would be 1.
        let class = parities(1).unwrap();
        let d = DistributionOverX::uniform(2);
        let spec = LearningSimSpec {
            mode: LearningMode::Ker,
            family: identity_family(&class, 13),
            class,
            distribution: d,
            loss: LossSpec::margin(),
            sample_size: 24,
            trials: 2,
            radius: Some(4.0),
            seed: 13,
            erm: opts(),
        };
        let report = simulate_learning(&spec).unwrap();
        assert!(
            report.max_mean_criterion < 0.05,
            "signs are recoverable at R = 4, got {}",
            report.max_mean_criterion
        );
    }

    #[test]
    fn invalid_specs_are_rejected()
    {
        let class = parities(1).unwrap();
        let d = DistributionOverX::uniform(2);
        let mut spec = LearningSimSpec {
            mode: LearningMode::Ker,
            family: identity_family(&class, 1),
            class,
            distribution: d,
            loss: LossSpec::hinge(),
            sample_size: 4,
            trials: 1,
            radius: None,
            seed: 1,
            erm: opts(),
        };
        assert!(matches!(
            simulate_learning(&spec),
            Err(LearnerError::RadiusRequired)
        ));
        spec.radius = Some(1.0);
        spec.trials = 0;
        assert!(matches!(
            simulate_learning(&spec),
            Err(LearnerError::InvalidSpec(_))
        ));
    }
}
