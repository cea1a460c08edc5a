//! Gram-matrix machinery: SQ-dimension, minimum-eigenvalue dimension, the
//! Gershgorin bound, and the optimal average rank-d approximation error.
//!
//! For a class normalized against a distribution D, the Gram matrix of a
//! hypothesis subset is G(i,j) = Σ_x D(x)·h_i(x)·h_j(x) = ⟨h_i, h_j⟩_D, and
//! the weighted class matrix is M(h,x) = √D(x)·h(x), so that M·Mᵀ = G.
//!
//! Two combinatorial dimensions are computed over subsets of hypotheses:
//!
//! * SQ-dimension: the largest t such that some t-subset is near-orthogonal,
//!   |⟨h_i,h_j⟩_D| ≤ 1/2t for all pairs (the magnitude convention; a signed
//!   variant and a fixed threshold γ are available as options).
//! * minEV-dimension at level λ: the largest t such that some t-subset has
//!   Gram λ_min ≥ λ.
//!
//! Both searches exploit Cauchy eigenvalue interlacing — every principal
//! submatrix of a symmetric matrix has λ_min at least that of the full
//! matrix — so feasibility is downward closed and branch-and-bound can prune
//! whole subtrees. Exact search is capped at `exact_cap` hypotheses (default
//! 20); larger classes fall back to a deterministic greedy whose result is a
//! witnessed lower bound.
//!
//! The average rank error uses the Eckart–Young theorem: the minimum
//! hypothesis-averaged squared loss achievable by any rank-d linear
//! predictor family equals ½·Σ_{i>d} σ_i(M)² / |H|, a tail sum of squared
//! singular values.
//!
//! All eigensolves go through a fixed-order cyclic Jacobi iteration:
//! deterministic by construction, with eigenvalue ties broken by original
//! index, so repeated runs produce byte-identical output.

use serde::Serialize;
use thiserror::Error;

use crate::core::{DistributionOverX, NormalizedClass};
use crate::matrix::Matrix;

/// PSD tolerance: Gram matrices may have λ_min ≥ −1e-8 from rounding.
pub const PSD_TOL: f64 = 1e-8;

/// Symmetry / unit-diagonal tolerance for Gram validation.
pub const GRAM_TOL: f64 = 1e-9;

/// Feasibility slack for subset threshold comparisons (absorbs fp noise in
/// Gram assembly without changing any exact desk-scale answer).
const FEAS_TOL: f64 = 1e-9;

/// Errors raised by the spectral layer.
#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("unknown hypothesis id '{0}'")]
    UnknownHypothesis(String),
    #[error("hypothesis subset is empty")]
    EmptySubset,
    #[error("class is not normalized against the supplied distribution: Gram diagonal entry {index} is {value}")]
    NotNormalized { index: usize, value: f64 },
    #[error("Gram matrix is not positive semidefinite: λ_min = {lambda_min}")]
    NotPositiveSemidefinite { lambda_min: f64 },
    #[error("λ = {0} is outside (0, 1]")]
    LambdaOutOfRange(f64),
    #[error("rank d = {d} is outside 0..={max}")]
    RankOutOfRange { d: usize, max: usize },
    #[error("distribution has {dist} entries for a {points}-point domain")]
    DistributionMismatch { dist: usize, points: usize },
}

/// How subset-dimension searches run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DimSearchMode {
    pub kind: SearchKind,
    /// Largest class size for which exhaustive search is attempted; larger
    /// classes silently fall back to greedy (and are labeled inexact).
    pub exact_cap: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchKind {
    Exact,
    Greedy,
}

impl Default for DimSearchMode {
    fn default() -> Self {
        Self {
            kind: SearchKind::Exact,
            exact_cap: 20,
        }
    }
}

impl DimSearchMode {
    pub fn exact() -> Self {
        Self::default()
    }

    pub fn greedy() -> Self {
        Self {
            kind: SearchKind::Greedy,
            exact_cap: 20,
        }
    }
}

/// Pairwise-threshold convention for the SQ-dimension.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SqConvention {
    /// `false` (default): require |⟨h_i,h_j⟩| ≤ threshold, the reading that
    /// makes the Gershgorin argument sound. `true`: require only the signed
    /// value ⟨h_i,h_j⟩ ≤ threshold.
    pub signed: bool,
    /// Fixed threshold γ; `None` (default) uses the size-coupled 1/(2t).
    pub gamma: Option<f64>,
}

/// A dimension value together with the hypothesis subset that witnesses it.
/// `exact = false` marks a greedy result, which is only a lower bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DimWitness {
    pub dim: usize,
    pub witness: Vec<String>,
    pub exact: bool,
}

/// Gram matrix of a hypothesis subset under a distribution, with its
/// smallest eigenvalue cached from validation.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    pub matrix: Matrix,
    pub subset: Vec<String>,
    pub distribution: DistributionOverX,
    pub min_eigenvalue: f64,
}

/// The matrix M(h,x) = √D(x)·h(x) with its singular values (descending).
#[derive(Debug, Clone)]
pub struct WeightedClassMatrix {
    pub matrix: Matrix,
    pub singular_values: Vec<f64>,
}

// ---------------------------------------------------------------------------
// Deterministic symmetric eigensolver
// ---------------------------------------------------------------------------

/// Eigendecomposition of a symmetric matrix by fixed-order cyclic Jacobi
/// rotations.
///
/// Returns eigenvalues sorted descending, ties broken by ascending original
/// index (the sort is stable), and the matching eigenvector columns. The
/// sweep order is fixed, so the output is bit-for-bit reproducible; in
/// particular a diagonal input performs zero rotations and returns exact
/// coordinate eigenvectors.
pub fn symmetric_eigen(a: &Matrix) -> (Vec<f64>, Matrix) {
    let n = a.rows();
    assert_eq!(n, a.cols(), "eigensolver needs a square matrix");
    let mut m = a.clone();
    let mut v = Matrix::identity(n);
    let frob = m.frobenius_sq().sqrt().max(f64::MIN_POSITIVE);

    for _sweep in 0..100 {
        let mut off_sq = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off_sq += m[(i, j)] * m[(i, j)];
            }
        }
        if off_sq.sqrt() <= 1e-14 * frob {
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                // Skip rotations that cannot change the diagonal at machine
                // precision; without this guard, denormal couplings can spin.
                if apq.abs() <= f64::EPSILON * 1e-2 * (app.abs() + aqq.abs() + frob) {
                    m[(p, q)] = 0.0;
                    m[(q, p)] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // A ← A·J (columns p,q), then A ← Jᵀ·A (rows p,q).
                for i in 0..n {
                    let aip = m[(i, p)];
                    let aiq = m[(i, q)];
                    m[(i, p)] = c * aip - s * aiq;
                    m[(i, q)] = s * aip + c * aiq;
                }
                for i in 0..n {
                    let api = m[(p, i)];
                    let aqi = m[(q, i)];
                    m[(p, i)] = c * api - s * aqi;
                    m[(q, i)] = s * api + c * aqi;
                }
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                // V ← V·J accumulates eigenvectors as columns.
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = c * vip - s * viq;
                    v[(i, q)] = s * vip + c * viq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort by descending eigenvalue keeps ascending-index tie order.
    order.sort_by(|&i, &j| {
        m[(j, j)]
            .partial_cmp(&m[(i, i)])
            .expect("eigenvalues are finite")
    });
    let values: Vec<f64> = order.iter().map(|&i| m[(i, i)]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, new_col)] = v[(i, old_col)];
        }
    }
    (values, vectors)
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(a: &Matrix) -> f64 {
    *symmetric_eigen(a)
        .0
        .last()
        .expect("matrix has at least one eigenvalue")
}

// ---------------------------------------------------------------------------
// Gram assembly
// ---------------------------------------------------------------------------

fn resolve_subset(h: &NormalizedClass, subset: &[String]) -> Result<Vec<usize>, SpectralError> {
    if subset.is_empty() {
        return Err(SpectralError::EmptySubset);
    }
    subset
        .iter()
        .map(|id| {
            h.class
                .hypothesis_index(id)
                .ok_or_else(|| SpectralError::UnknownHypothesis(id.clone()))
        })
        .collect()
}

fn check_distribution(
    h: &NormalizedClass,
    d: &DistributionOverX,
) -> Result<(), SpectralError> {
    if d.len() != h.class.num_points() {
        return Err(SpectralError::DistributionMismatch {
            dist: d.len(),
            points: h.class.num_points(),
        });
    }
    Ok(())
}

fn gram_of_rows(h: &NormalizedClass, rows: &[usize], d: &DistributionOverX) -> Matrix {
    let t = rows.len();
    let mut g = Matrix::zeros(t, t);
    for a in 0..t {
        for b in a..t {
            let mut acc = 0.0;
            for (x, p) in d.probabilities().iter().enumerate() {
                acc += p * h.class.value(rows[a], x) * h.class.value(rows[b], x);
            }
            g[(a, b)] = acc;
            g[(b, a)] = acc;
        }
    }
    g
}

/// Gram matrix G(i,j) = Σ_x D(x)·h_i(x)·h_j(x) of the selected subset.
///
/// Fails if an id is unknown, if the class is not actually normalized
/// against `d` (unit diagonal within 1e-9), or if rounding noise pushes the
/// matrix below PSD tolerance.
pub fn gram_matrix(
    h: &NormalizedClass,
    subset: &[String],
    d: &DistributionOverX,
) -> Result<GramMatrix, SpectralError> {
    check_distribution(h, d)?;
    let rows = resolve_subset(h, subset)?;
    let g = gram_of_rows(h, &rows, d);
    for i in 0..g.rows() {
        if (g[(i, i)] - 1.0).abs() > GRAM_TOL {
            return Err(SpectralError::NotNormalized {
                index: i,
                value: g[(i, i)],
            });
        }
    }
    let lambda_min = min_eigenvalue(&g);
    if lambda_min < -PSD_TOL {
        return Err(SpectralError::NotPositiveSemidefinite {
            lambda_min,
        });
    }
    Ok(GramMatrix {
        matrix: g,
        subset: subset.to_vec(),
        distribution: d.clone(),
        min_eigenvalue: lambda_min,
    })
}

/// Gershgorin circle bound: min_i (G_ii − Σ_{j≠i} |G_ij|), a certified lower
/// bound on the smallest eigenvalue.
pub fn gershgorin_bound(g: &GramMatrix) -> f64 {
    let m = &g.matrix;
    let n = m.rows();
    let mut best = f64::INFINITY;
    for i in 0..n {
        let mut radius = 0.0;
        for j in 0..n {
            if j != i {
                radius += m[(i, j)].abs();
            }
        }
        best = best.min(m[(i, i)] - radius);
    }
    best
}

// ---------------------------------------------------------------------------
// Subset dimension searches
// ---------------------------------------------------------------------------

/// Find a clique of size ≥ `target` in the compatibility graph, by
/// branch-and-bound over candidates in ascending index order.
fn clique_of_size(adj: &[Vec<bool>], target: usize) -> Option<Vec<usize>> {
    fn extend(
        adj: &[Vec<bool>],
        candidates: &[usize],
        current: &mut Vec<usize>,
        target: usize,
    ) -> bool {
        if current.len() >= target {
            return true;
        }
        for (k, &c) in candidates.iter().enumerate() {
            if current.len() + (candidates.len() - k) < target {
                return false;
            }
            current.push(c);
            let next: Vec<usize> = candidates[k + 1..]
                .iter()
                .copied()
                .filter(|&x| adj[c][x])
                .collect();
            if extend(adj, &next, current, target) {
                return true;
            }
            current.pop();
        }
        false
    }

    if target == 0 {
        return Some(vec![]);
    }
    let all: Vec<usize> = (0..adj.len()).collect();
    let mut current = Vec::new();
    if extend(adj, &all, &mut current, target) {
        Some(current)
    } else {
        None
    }
}

/// Greedy clique in ascending index order (deterministic lower bound).
fn greedy_clique(adj: &[Vec<bool>]) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    for c in 0..adj.len() {
        if chosen.iter().all(|&x| adj[c][x]) {
            chosen.push(c);
        }
    }
    chosen
}

/// SQ-dimension: the largest t such that some t-subset of hypotheses is
/// pairwise near-orthogonal, |⟨h_i,h_j⟩_D| ≤ 1/2t (default convention).
///
/// Greedy mode (or any class larger than `exact_cap`) returns a witnessed
/// lower bound with `exact = false`.
pub fn sq_dimension(
    h: &NormalizedClass,
    d: &DistributionOverX,
    mode: &DimSearchMode,
    convention: &SqConvention,
) -> Result<DimWitness, SpectralError> {
    let ids = h.class.hypothesis_labels().to_vec();
    let g = full_validated_gram(h, d)?;
    let n = ids.len();
    let exact = mode.kind == SearchKind::Exact && n <= mode.exact_cap;

    for t in (1..=n).rev() {
        let threshold = convention.gamma.unwrap_or(1.0 / (2.0 * t as f64));
        let adj: Vec<Vec<bool>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            return false;
                        }
                        let v = g[(i, j)];
                        if convention.signed {
                            v <= threshold + FEAS_TOL
                        } else {
                            v.abs() <= threshold + FEAS_TOL
                        }
                    })
                    .collect()
            })
            .collect();
        let witness = if exact {
            clique_of_size(&adj, t)
        } else {
            let c = greedy_clique(&adj);
            if c.len() >= t {
                Some(c[..t].to_vec())
            } else {
                None
            }
        };
        if let Some(w) = witness {
            return Ok(DimWitness {
                dim: t,
                witness: w.iter().map(|&i| ids[i].clone()).collect(),
                exact,
            });
        }
    }
    unreachable!("t = 1 is always feasible: a single hypothesis has no pairs")
}

/// Full-class Gram with normalization and PSD validation, as a raw matrix.
fn full_validated_gram(
    h: &NormalizedClass,
    d: &DistributionOverX,
) -> Result<Matrix, SpectralError> {
    check_distribution(h, d)?;
    let rows: Vec<usize> = (0..h.class.num_hypotheses()).collect();
    let g = gram_of_rows(h, &rows, d);
    for i in 0..g.rows() {
        if (g[(i, i)] - 1.0).abs() > GRAM_TOL {
            return Err(SpectralError::NotNormalized {
                index: i,
                value: g[(i, i)],
            });
        }
    }
    Ok(g)
}

/// minEV-dimension: the largest t such that some t-subset's Gram matrix has
/// λ_min ≥ λ.
///
/// Exact search is a branch-and-bound over index-ordered subsets, pruning by
/// eigenvalue interlacing (an infeasible set has no feasible superset).
/// Greedy mode repeatedly inserts the candidate that keeps the running
/// λ_min largest; its result is a witnessed lower bound.
pub fn min_ev_dimension(
    h: &NormalizedClass,
    d: &DistributionOverX,
    lambda: f64,
    mode: &DimSearchMode,
) -> Result<DimWitness, SpectralError> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(SpectralError::LambdaOutOfRange(lambda));
    }
    let ids = h.class.hypothesis_labels().to_vec();
    let g = full_validated_gram(h, d)?;
    let n = ids.len();

    // If the whole class is feasible, interlacing makes every subset
    // feasible; the answer is n for exact and greedy alike.
    if min_eigenvalue(&g) >= lambda - FEAS_TOL {
        return Ok(DimWitness {
            dim: n,
            witness: ids,
            exact: true,
        });
    }

    let exact = mode.kind == SearchKind::Exact && n <= mode.exact_cap;
    let witness_rows = if exact {
        best_minev_subset(&g, lambda)
    } else {
        greedy_minev_subset(&g, lambda)
    };
    Ok(DimWitness {
        dim: witness_rows.len(),
        witness: witness_rows.iter().map(|&i| ids[i].clone()).collect(),
        exact,
    })
}

fn best_minev_subset(g: &Matrix, lambda: f64) -> Vec<usize> {
    fn extend(
        g: &Matrix,
        lambda: f64,
        start: usize,
        current: &mut Vec<usize>,
        best: &mut Vec<usize>,
    ) {
        if current.len() > best.len() {
            *best = current.clone();
        }
        let n = g.rows();
        for c in start..n {
            if current.len() + (n - c) <= best.len() {
                break;
            }
            current.push(c);
            let sub = g.principal_submatrix(current);
            if min_eigenvalue(&sub) >= lambda - FEAS_TOL {
                extend(g, lambda, c + 1, current, best);
            }
            current.pop();
        }
    }

    let mut best = Vec::new();
    let mut current = Vec::new();
    extend(g, lambda, 0, &mut current, &mut best);
    best
}

fn greedy_minev_subset(g: &Matrix, lambda: f64) -> Vec<usize> {
    let n = g.rows();
    let mut chosen: Vec<usize> = Vec::new();
    let mut remaining: Vec<usize> = (0..n).collect();
    loop {
        let mut best: Option<(usize, f64)> = None;
        for &c in &remaining {
            let mut trial = chosen.clone();
            trial.push(c);
            let lm = min_eigenvalue(&g.principal_submatrix(&trial));
            // Strict > keeps the lowest index on ties.
            if best.map_or(true, |(_, b)| lm > b) {
                best = Some((c, lm));
            }
        }
        match best {
            Some((c, lm)) if lm >= lambda - FEAS_TOL => {
                chosen.push(c);
                chosen.sort_unstable();
                remaining.retain(|&x| x != c);
            }
            _ => break,
        }
    }
    chosen
}

// ---------------------------------------------------------------------------
// Weighted class matrix and the rank-error oracle
// ---------------------------------------------------------------------------

impl WeightedClassMatrix {
    /// Build M(h,x) = √D(x)·h(x) from a normalized class, caching singular
    /// values (descending) via the smaller-side Gram eigensolve.
    pub fn from_normalized(h: &NormalizedClass) -> Self {
        let class = &h.class;
        let d = &h.distribution;
        let mut m = class.values().clone();
        for i in 0..m.rows() {
            for (j, p) in d.probabilities().iter().enumerate() {
                m[(i, j)] *= p.sqrt();
            }
        }
        let gram = if m.rows() <= m.cols() {
            m.gram_rows()
        } else {
            m.transpose().gram_rows()
        };
        let (eigs, _) = symmetric_eigen(&gram);
        let singular_values = eigs.iter().map(|&l| l.max(0.0).sqrt()).collect();
        Self {
            matrix: m,
            singular_values,
        }
    }

    /// Number of hypotheses (rows of M).
    pub fn num_hypotheses(&self) -> usize {
        self.matrix.rows()
    }

    /// Squared singular values, descending.
    pub fn squared_singular_values(&self) -> Vec<f64> {
        self.singular_values.iter().map(|s| s * s).collect()
    }

    /// Eigendecomposition of the domain-side Gram MᵀM: eigenvalues
    /// descending with matching right-singular-vector columns.
    pub fn domain_side_eigen(&self) -> (Vec<f64>, Matrix) {
        let g = self.matrix.transpose().gram_rows();
        symmetric_eigen(&g)
    }
}

/// Minimum hypothesis-averaged squared loss of any rank-d linear predictor
/// family: ½·Σ_{i>d} σ_i(M)² / |H| (Eckart–Young optimum).
pub fn avg_rank_error_oracle(
    h: &NormalizedClass,
    d: &DistributionOverX,
    rank: usize,
) -> Result<f64, SpectralError> {
    check_distribution(h, d)?;
    let wcm = WeightedClassMatrix::from_normalized(&NormalizedClass {
        class: h.class.clone(),
        distribution: d.clone(),
    });
    let max_rank = h.class.num_hypotheses().min(h.class.num_points());
    if rank > max_rank {
        return Err(SpectralError::RankOutOfRange {
            d: rank,
            max: max_rank,
        });
    }
    let tail: f64 = wcm
        .squared_singular_values()
        .iter()
        .skip(rank)
        .sum();
    Ok(0.5 * tail / h.class.num_hypotheses() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{normalize_class, FiniteHypothesisClass, LabelKind};

    /// ±1 parity class on n bits: row S, column j has value
    /// (−1)^popcount(S AND j). Rows are pairwise orthogonal under the
    /// uniform distribution.
    fn parity_class(n: usize) -> NormalizedClass {
        let size = 1usize << n;
        let mut m = Matrix::zeros(size, size);
        for s in 0..size {
            for j in 0..size {
                m[(s, j)] = if (s & j).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            }
        }
        let class = FiniteHypothesisClass::from_matrix(m, LabelKind::Binary).unwrap();
        let d = DistributionOverX::uniform(size);
        normalize_class(&class, &d).unwrap()
    }

    /// 6-hypothesis ±1 class on 8 points with known subset dimensions.
    fn six_class() -> NormalizedClass {
        let rows = vec![
            vec![1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0],
            vec![1.0, 1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0],
            vec![1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0],
            vec![1.0, 1.0, 1.0, -1.0, -1.0, 1.0, -1.0, -1.0],
            vec![1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0, 1.0],
            vec![-1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0],
        ];
        let class =
            FiniteHypothesisClass::from_matrix(Matrix::from_rows(&rows), LabelKind::Binary)
                .unwrap();
        let d = DistributionOverX::uniform(8);
        normalize_class(&class, &d).unwrap()
    }

    fn ids(h: &NormalizedClass) -> Vec<String> {
        h.class.hypothesis_labels().to_vec()
    }

    #[test]
    fn jacobi_matches_frozen_3x3() {
        let a = Matrix::from_rows(&[
            vec![2.0, 1.0, 0.0],
            vec![1.0, 3.0, 0.5],
            vec![0.0, 0.5, 1.0],
        ]);
        let (vals, vecs) = symmetric_eigen(&a);
        let expected = [3.686140661634507, 1.5, 0.813859338365493];
        for (v, e) in vals.iter().zip(expected) {
            assert!((v - e).abs() < 1e-10, "eigenvalue {v} vs expected {e}");
        }
        // Residual ‖A·v − λ·v‖ per pair.
        for k in 0..3 {
            let v: Vec<f64> = (0..3).map(|i| vecs[(i, k)]).collect();
            let av = a.matvec(&v);
            for i in 0..3 {
                assert!(
                    (av[i] - vals[k] * v[i]).abs() < 1e-10,
                    "eigenpair {k} residual too large"
                );
            }
        }
    }

    #[test]
    fn jacobi_matches_frozen_4x4() {
        let a = Matrix::from_rows(&[
            vec![4.0, 1.0, -2.0, 2.0],
            vec![1.0, 2.0, 0.0, 1.0],
            vec![-2.0, 0.0, 3.0, -2.0],
            vec![2.0, 1.0, -2.0, -1.0],
        ]);
        let (vals, _) = symmetric_eigen(&a);
        let expected = [
            6.844621107234966,
            2.2685314064312423,
            1.0843644637732177,
            -2.197516977439427,
        ];
        for (v, e) in vals.iter().zip(expected) {
            assert!((v - e).abs() < 1e-10, "eigenvalue {v} vs expected {e}");
        }
    }

    #[test]
    fn jacobi_eigenvectors_are_orthonormal() {
        let a = Matrix::from_rows(&[
            vec![1.0, 0.25, -0.1],
            vec![0.25, 1.0, 0.3],
            vec![-0.1, 0.3, 1.0],
        ]);
        let (_, vecs) = symmetric_eigen(&a);
        let vtv = vecs.transpose().matmul(&vecs);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (vtv[(i, j)] - want).abs() < 1e-12,
                    "VᵀV should be the identity"
                );
            }
        }
    }

    #[test]
    fn jacobi_on_diagonal_input_is_exact_identity_permutation() {
        // A diagonal matrix triggers zero rotations; with the stable
        // descending sort, equal eigenvalues keep ascending index order.
        let a = Matrix::identity(5);
        let (vals, vecs) = symmetric_eigen(&a);
        assert_eq!(vals, vec![1.0; 5]);
        assert_eq!(vecs, Matrix::identity(5), "ties must preserve index order exactly");
    }

    #[test]
    fn gram_of_parities_is_identity() {
        let h = parity_class(2);
        let d = DistributionOverX::uniform(4);
        let g = gram_matrix(&h, &ids(&h), &d).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (g.matrix[(i, j)] - want).abs() < 1e-12,
                    "distinct parities are orthogonal"
                );
            }
        }
    }

    #[test]
    fn gram_with_duplicated_hypothesis_is_all_ones() {
        let h = parity_class(1);
        let d = DistributionOverX::uniform(2);
        let id = h.class.hypothesis_labels()[1].clone();
        let g = gram_matrix(&h, &[id.clone(), id], &d).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((g.matrix[(i, j)] - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gram_orthogonal_pair_off_diagonal_zero() {
        let m = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, -1.0]]);
        let class = FiniteHypothesisClass::from_matrix(m, LabelKind::Real).unwrap();
        let d = DistributionOverX::new(vec![0.5, 0.5]).unwrap();
        let h = normalize_class(&class, &d).unwrap();
        let g = gram_matrix(&h, &ids(&h), &d).unwrap();
        assert!(g.matrix[(0, 1)].abs() < 1e-12, "⟨(1,1),(1,−1)⟩_D = 0");
    }

    #[test]
    fn gram_rejects_unknown_id_and_unnormalized_class() {
        let h = parity_class(1);
        let d = DistributionOverX::uniform(2);
        assert!(matches!(
            gram_matrix(&h, &["nope".into()], &d),
            Err(SpectralError::UnknownHypothesis(_))
        ));
        // A skewed distribution breaks the unit diagonal of a ±1 class
        // normalized under the uniform one? No: ±1 rows have unit norm under
        // every distribution. Scale a row instead.
        let m = Matrix::from_rows(&[vec![2.0, 2.0]]);
        let class = FiniteHypothesisClass::from_matrix(m, LabelKind::Real).unwrap();
        let fake = NormalizedClass {
            class,
            distribution: d.clone(),
        };
        assert!(matches!(
            gram_matrix(&fake, &["h0".into()], &d),
            Err(SpectralError::NotNormalized { .. })
        ));
    }

    #[test]
    fn gershgorin_spot_values() {
        let h = parity_class(2);
        let d = DistributionOverX::uniform(4);
        let g = gram_matrix(&h, &ids(&h), &d).unwrap();
        assert!((gershgorin_bound(&g) - 1.0).abs() < 1e-12, "identity → 1");

        let mut g2 = g.clone();
        g2.matrix = Matrix::from_rows(&[vec![1.0, 0.25], vec![0.25, 1.0]]);
        assert!((gershgorin_bound(&g2) - 0.75).abs() < 1e-12, "1 − 0.25");
    }

    #[test]
    fn gershgorin_bound_of_small_off_diagonals_is_at_least_half() {
        // t×t with all off-diagonal entries exactly 1/2t in magnitude:
        // bound = 1 − (t−1)/(2t) = (t+1)/(2t) > 1/2.
        for t in 2..8 {
            let mut m = Matrix::identity(t);
            for i in 0..t {
                for j in 0..t {
                    if i != j {
                        m[(i, j)] = 1.0 / (2.0 * t as f64) * if (i + j) % 2 == 0 { -1.0 } else { 1.0 };
                    }
                }
            }
            let g = GramMatrix {
                matrix: m,
                subset: vec![],
                distribution: DistributionOverX::uniform(2),
                min_eigenvalue: 0.0,
            };
            assert!(
                gershgorin_bound(&g) >= 0.5,
                "off-diagonals ≤ 1/2t must give a bound ≥ 1/2"
            );
        }
    }

    #[test]
    fn gershgorin_is_sound_against_eigensolve() {
        // Seeded pseudo-random symmetric matrices: bound ≤ λ_min + 1e-8.
        let mut state = 0x12345u64;
        let mut next = move || {
            state = crate::rng::mix64(state);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for _ in 0..20 {
            let n = 4;
            let mut m = Matrix::zeros(n, n);
            for i in 0..n {
                for j in i..n {
                    let v = next();
                    m[(i, j)] = v;
                    m[(j, i)] = v;
                }
            }
            let lm = min_eigenvalue(&m);
            let g = GramMatrix {
                matrix: m,
                subset: vec![],
                distribution: DistributionOverX::uniform(2),
                min_eigenvalue: lm,
            };
            assert!(
                gershgorin_bound(&g) <= lm + 1e-8,
                "Gershgorin must lower-bound the smallest eigenvalue"
            );
        }
    }

    #[test]
    fn sq_dimension_of_parities_is_class_size() {
        let h = parity_class(3);
        let d = DistributionOverX::uniform(8);
        let w = sq_dimension(&h, &d, &DimSearchMode::exact(), &SqConvention::default()).unwrap();
        assert_eq!(w.dim, 8, "orthogonal class: every subset qualifies");
        assert!(w.exact);
        assert_eq!(w.witness.len(), 8);
    }

    #[test]
    fn sq_dimension_of_identical_pair_is_one() {
        let m = Matrix::from_rows(&[vec![1.0, -1.0], vec![1.0, -1.0]]);
        let class = FiniteHypothesisClass::from_matrix(m, LabelKind::Binary).unwrap();
        let d = DistributionOverX::uniform(2);
        let h = normalize_class(&class, &d).unwrap();
        let w = sq_dimension(&h, &d, &DimSearchMode::exact(), &SqConvention::default()).unwrap();
        assert_eq!(w.dim, 1, "⟨h,h⟩ = 1 > 1/4 kills every pair");
    }

    /// Naive all-subsets reference for the SQ-dimension.
    fn sq_dim_naive(g: &Matrix, signed: bool) -> usize {
        let n = g.rows();
        let mut best = 0;
        for mask in 1u32..(1 << n) {
            let subset: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let t = subset.len();
            let thr = 1.0 / (2.0 * t as f64);
            let ok = subset.iter().enumerate().all(|(a, &i)| {
                subset[a + 1..].iter().all(|&j| {
                    let v = g[(i, j)];
                    if signed {
                        v <= thr + 1e-9
                    } else {
                        v.abs() <= thr + 1e-9
                    }
                })
            });
            if ok {
                best = best.max(t);
            }
        }
        best
    }

    /// Naive all-subsets reference for the minEV-dimension.
    fn minev_naive(g: &Matrix, lambda: f64) -> usize {
        let n = g.rows();
        let mut best = 0;
        for mask in 1u32..(1 << n) {
            let subset: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            if min_eigenvalue(&g.principal_submatrix(&subset)) >= lambda - 1e-9 {
                best = best.max(subset.len());
            }
        }
        best
    }

    #[test]
    fn six_class_dimensions_match_frozen_and_naive_values() {
        let h = six_class();
        let d = DistributionOverX::uniform(8);
        let g = full_validated_gram(&h, &d).unwrap();

        let mag = sq_dimension(&h, &d, &DimSearchMode::exact(), &SqConvention::default()).unwrap();
        assert_eq!(mag.dim, 4, "magnitude convention");
        assert_eq!(mag.dim, sq_dim_naive(&g, false), "exact search = exhaustive");

        let signed = sq_dimension(
            &h,
            &d,
            &DimSearchMode::exact(),
            &SqConvention {
                signed: true,
                gamma: None,
            },
        )
        .unwrap();
        assert_eq!(signed.dim, 5, "signed convention admits large negative overlaps");
        assert_eq!(signed.dim, sq_dim_naive(&g, true));

        for lambda in [0.5, 0.75, 1.0] {
            let w = min_ev_dimension(&h, &d, lambda, &DimSearchMode::exact()).unwrap();
            assert_eq!(w.dim, 4, "λ = {lambda}");
            assert_eq!(w.dim, minev_naive(&g, lambda), "exact search = exhaustive at λ = {lambda}");
        }
    }

    #[test]
    fn random_six_hypothesis_class_matches_naive_search() {
        // Pseudo-random ±1 class; exact searches must agree with the
        // all-subsets reference.
        let mut state = 99u64;
        let mut next_sign = move || {
            state = crate::rng::mix64(state);
            if state & 1 == 0 {
                1.0
            } else {
                -1.0
            }
        };
        let mut rows = Vec::new();
        for _ in 0..6 {
            rows.push((0..10).map(|_| next_sign()).collect::<Vec<f64>>());
        }
        let class =
            FiniteHypothesisClass::from_matrix(Matrix::from_rows(&rows), LabelKind::Binary)
                .unwrap();
        let d = DistributionOverX::uniform(10);
        let h = normalize_class(&class, &d).unwrap();
        let g = full_validated_gram(&h, &d).unwrap();

        let sq = sq_dimension(&h, &d, &DimSearchMode::exact(), &SqConvention::default()).unwrap();
        assert_eq!(sq.dim, sq_dim_naive(&g, false));

        let mv = min_ev_dimension(&h, &d, 0.5, &DimSearchMode::exact()).unwrap();
        assert_eq!(mv.dim, minev_naive(&g, 0.5));
    }

    #[test]
    fn greedy_results_are_witnessed_lower_bounds() {
        let h = six_class();
        let d = DistributionOverX::uniform(8);
        let exact =
            sq_dimension(&h, &d, &DimSearchMode::exact(), &SqConvention::default()).unwrap();
        let greedy =
            sq_dimension(&h, &d, &DimSearchMode::greedy(), &SqConvention::default()).unwrap();
        assert!(!greedy.exact);
        assert!(greedy.dim <= exact.dim, "greedy can never exceed exact");
        assert_eq!(greedy.witness.len(), greedy.dim);

        let eg = min_ev_dimension(&h, &d, 0.75, &DimSearchMode::exact()).unwrap();
        let gg = min_ev_dimension(&h, &d, 0.75, &DimSearchMode::greedy()).unwrap();
        assert!(gg.dim <= eg.dim);
        // The greedy witness must itself be feasible.
        let gw = gram_matrix(&h, &gg.witness, &d).unwrap();
        assert!(gw.min_eigenvalue >= 0.75 - 1e-9);
    }

    #[test]
    fn min_ev_dimension_of_parities_at_lambda_one_is_class_size() {
        let h = parity_class(3);
        let d = DistributionOverX::uniform(8);
        let w = min_ev_dimension(&h, &d, 1.0, &DimSearchMode::exact()).unwrap();
        assert_eq!(w.dim, 8, "identity Gram: λ_min = 1 for every subset");
    }

    #[test]
    fn min_ev_dimension_singleton_is_one() {
        let m = Matrix::from_rows(&[vec![1.0, -1.0]]);
        let class = FiniteHypothesisClass::from_matrix(m, LabelKind::Binary).unwrap();
        let d = DistributionOverX::uniform(2);
        let h = normalize_class(&class, &d).unwrap();
        for lambda in [0.1, 0.5, 1.0] {
            let w = min_ev_dimension(&h, &d, lambda, &DimSearchMode::exact()).unwrap();
            assert_eq!(w.dim, 1, "G = [1] is feasible at every λ ≤ 1");
        }
    }

    #[test]
    fn min_ev_dimension_rejects_bad_lambda() {
        let h = parity_class(1);
        let d = DistributionOverX::uniform(2);
        for lambda in [0.0, -0.5, 1.5] {
            assert!(matches!(
                min_ev_dimension(&h, &d, lambda, &DimSearchMode::exact()),
                Err(SpectralError::LambdaOutOfRange(_))
            ));
        }
    }

    #[test]
    fn interlacing_submatrix_min_eigenvalue_dominates_full() {
        let mut state = 0xABCu64;
        let mut next = move || {
            state = crate::rng::mix64(state);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for _ in 0..10 {
            let n = 5;
            let mut m = Matrix::zeros(n, n);
            for i in 0..n {
                for j in i..n {
                    let v = next();
                    m[(i, j)] = v;
                    m[(j, i)] = v;
                }
            }
            let full = min_eigenvalue(&m);
            let sub = min_eigenvalue(&m.principal_submatrix(&[0, 2, 4]));
            assert!(
                sub >= full - 1e-10,
                "interlacing: submatrix λ_min ≥ full λ_min"
            );
        }
    }

    #[test]
    fn weighted_matrix_times_transpose_equals_gram() {
        let h = six_class();
        let d = DistributionOverX::uniform(8);
        let wcm = WeightedClassMatrix::from_normalized(&h);
        let mmt = wcm.matrix.gram_rows();
        let g = gram_matrix(&h, &ids(&h), &d).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                assert!(
                    (mmt[(i, j)] - g.matrix[(i, j)]).abs() < 1e-8,
                    "M·Mᵀ must reproduce the Gram matrix"
                );
            }
        }
    }

    #[test]
    fn avg_rank_error_of_parities_is_half_tail_fraction() {
        for n in 1..=4usize {
            let size = 1usize << n;
            let h = parity_class(n);
            let d = DistributionOverX::uniform(size);
            for rank in 0..=size {
                let e = avg_rank_error_oracle(&h, &d, rank).unwrap();
                let want = 0.5 * (1.0 - rank as f64 / size as f64);
                assert!(
                    (e - want).abs() < 1e-9,
                    "parities n={n}, d={rank}: got {e}, want {want}"
                );
            }
        }
    }

    #[test]
    fn avg_rank_error_matches_frozen_4x6_values() {
        let rows = vec![
            vec![1.0, 1.0, 1.0, -1.0, -1.0, 1.0],
            vec![1.0, -1.0, 1.0, 1.0, -1.0, -1.0],
            vec![-1.0, 1.0, 1.0, 1.0, 1.0, -1.0],
            vec![1.0, 1.0, -1.0, 1.0, -1.0, -1.0],
        ];
        let class =
            FiniteHypothesisClass::from_matrix(Matrix::from_rows(&rows), LabelKind::Binary)
                .unwrap();
        let d = DistributionOverX::uniform(6);
        let h = normalize_class(&class, &d).unwrap();
        let wcm = WeightedClassMatrix::from_normalized(&h);
        let expected_sv = [
            1.1547005383792517,
            1.1547005383792517,
            0.8164965809277261,
            0.8164965809277261,
        ];
        for (s, e) in wcm.singular_values.iter().zip(expected_sv) {
            assert!((s - e).abs() < 1e-10, "singular value {s} vs {e}");
        }
        let expected_err = [0.5, 1.0 / 3.0, 1.0 / 6.0, 1.0 / 12.0, 0.0];
        for (rank, want) in expected_err.iter().enumerate() {
            let e = avg_rank_error_oracle(&h, &d, rank).unwrap();
            assert!((e - want).abs() < 1e-10, "rank {rank}: got {e}, want {want}");
        }
    }

    #[test]
    fn avg_rank_error_monotone_convex_and_bounded() {
        let h = six_class();
        let d = DistributionOverX::uniform(8);
        let errs: Vec<f64> = (0..=6)
            .map(|r| avg_rank_error_oracle(&h, &d, r).unwrap())
            .collect();
        let full = avg_rank_error_oracle(&h, &d, 0).unwrap();
        assert!((full - 0.5 * 6.0 / 6.0).abs() < 1e-9, "d=0 is ½‖M‖²_F/|H| = ½ here");
        for w in errs.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "nonincreasing in d");
        }
        for w in errs.windows(3) {
            assert!(
                w[0] - 2.0 * w[1] + w[2] >= -1e-9,
                "second differences of a sorted tail sum are nonnegative"
            );
        }
        assert!(errs[6].abs() < 1e-12, "zero error at full rank");
    }

    #[test]
    fn avg_rank_error_rejects_out_of_range_rank() {
        let h = parity_class(2);
        let d = DistributionOverX::uniform(4);
        assert!(matches!(
            avg_rank_error_oracle(&h, &d, 5),
            Err(SpectralError::RankOutOfRange { .. })
        ));
    }

    #[test]
    fn proposition_gershgorin_links_sq_dim_to_minev_dim() {
        // If the SQ-dimension (magnitude convention) is t, the witnessing
        // subset's Gram has off-diagonals ≤ 1/2t, so Gershgorin gives
        // λ_min ≥ 1 − (t−1)/2t > 1/2, hence minEV-dim(½) ≥ t.
        for h in [parity_class(2), six_class()] {
            let d = h.distribution.clone();
            let sq =
                sq_dimension(&h, &d, &DimSearchMode::exact(), &SqConvention::default()).unwrap();
            let mv = min_ev_dimension(&h, &d, 0.5, &DimSearchMode::exact()).unwrap();
            assert!(
                mv.dim >= sq.dim,
                "minEV-dim(1/2) = {} must be ≥ SQ-dim = {}",
                mv.dim,
                sq.dim
            );
        }
    }
}
