//! Self-check suites: each property exercises one library guarantee against
//! an independent computation (brute force, closed form, or a redundant
//! route) and reports pass/fail with a one-line measurement. All randomness
//! is derived from the run seed through named streams, so a given seed
//! always checks the same instances.

use complexity_lab::constructions::{
    finite_restriction, gaussian_gram_estimate, gaussian_points, parities, pattern_decision_list,
    psi, zigzag_class_sample, zigzag_relu_neurons, FunctionalHypothesis,
};
use complexity_lab::core::{
    DistributionOverX, FiniteHypothesisClass, LabelKind, LossKind, LossSpec, NormalizedClass,
};
use complexity_lab::embeddings::{
    cover_radius, gaussian_projection_matrix, greedy_cover, representer_reduce, sample_embedding,
    svd_optimal_embedding, Embedding, EmbeddingFamily, FamilyKind,
};
use complexity_lab::learners::{
    empirical_loss, generalization_bound, linear_erm_seeded, norm_constrained_erm_seeded,
    simulate_learning, BoundKind, ErmOptions, LearningMode, LearningSimSpec,
};
use complexity_lab::matrix::{dot, Matrix};
use complexity_lab::measures::{
    binary_entropy, margin_to_dimension_transfer, mc_upper_heuristic, min_ev_dc_lower_bound,
    pair_family_distributional_criterion, parity_margin_coefficient, pointwise_dc_criterion,
    sign_matrix_log_count_bound, sq_dim_dc_lower_bound, vc_dimension, LogBase, VcResult,
};
use complexity_lab::rng::{indexed_rng, stream_seed};
use complexity_lab::spectral::{
    avg_rank_error_oracle, gershgorin_bound, gram_matrix, min_eigenvalue, min_ev_dimension,
    sq_dimension, symmetric_eigen, DimSearchMode, SqConvention,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// One property outcome; `detail` carries the measured quantities so a
/// failing run is diagnosable from the report alone.
#[derive(Debug, Clone, Serialize)]
pub struct PropertyResult {
    pub suite: &'static str,
    pub property: &'static str,
    pub pass: bool,
    pub detail: String,
}

pub const SUITES: [&str; 5] = [
    "spectral",
    "embeddings",
    "learners",
    "measures",
    "constructions",
];

/// Run one named suite (or "all"); `None` for an unknown name.
pub fn run(which: &str, seed: u64) -> Option<Vec<PropertyResult>> {
    let mut rows = Vec::new();
    match which {
        "all" => {
            spectral_suite(seed, &mut rows);
            embeddings_suite(seed, &mut rows);
            learners_suite(seed, &mut rows);
            measures_suite(seed, &mut rows);
            constructions_suite(seed, &mut rows);
        }
        "spectral" => spectral_suite(seed, &mut rows),
        "embeddings" => embeddings_suite(seed, &mut rows),
        "learners" => learners_suite(seed, &mut rows),
        "measures" => measures_suite(seed, &mut rows),
        "constructions" => constructions_suite(seed, &mut rows),
        _ => return None,
    }
    Some(rows)
}

fn push(
    rows: &mut Vec<PropertyResult>,
    suite: &'static str,
    property: &'static str,
    pass: bool,
    detail: String,
) {
    rows.push(PropertyResult {
        suite,
        property,
        pass,
        detail,
    });
}

fn prop_rng(seed: u64, label: &str, index: u64) -> ChaCha8Rng {
    indexed_rng(stream_seed(seed, label), "verify", index)
}

/// Random ±1 class with distinct hypothesis rows (rejection-sampled).
fn random_binary_class(rng: &mut ChaCha8Rng, max_h: usize, max_x: usize) -> FiniteHypothesisClass {
    loop {
        let n_h = rng.gen_range(2..=max_h);
        let n_x = rng.gen_range(n_h.max(2)..=max_x.max(n_h.max(2)));
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n_h);
        for _ in 0..n_h {
            rows.push(
                (0..n_x)
                    .map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 })
                    .collect(),
            );
        }
        let mut sorted = rows.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        sorted.dedup();
        if sorted.len() < n_h {
            continue;
        }
        if let Ok(class) =
            FiniteHypothesisClass::from_matrix(Matrix::from_rows(&rows), LabelKind::Binary)
        {
            return class;
        }
    }
}

/// Random full-support distribution over `n` points.
fn random_distribution(rng: &mut ChaCha8Rng, n: usize) -> DistributionOverX {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    DistributionOverX::new(raw.into_iter().map(|p| p / total).collect()).unwrap()
}

fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = rng.gen_range(-2.0..2.0);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

// ---------------------------------------------------------------------------
// spectral
// ---------------------------------------------------------------------------

fn spectral_suite(seed: u64, rows: &mut Vec<PropertyResult>) {
    const S: &str = "spectral";

    // Eigendecomposition reconstructs the matrix; eigenvectors orthonormal;
    // eigenvalues sorted descending.
    {
        let mut worst_recon = 0.0f64;
        let mut worst_ortho = 0.0f64;
        let mut sorted = true;
        for i in 0..25u64 {
            let mut rng = prop_rng(seed, "verify-spectral-eigen", i);
            let n = rng.gen_range(2..=8);
            let a = random_symmetric(&mut rng, n);
            let (evals, q) = symmetric_eigen(&a);
            sorted &= evals.windows(2).all(|w| w[0] >= w[1] - 1e-12);
            for r in 0..n {
                for c in 0..n {
                    let mut v = 0.0;
                    for (k, lam) in evals.iter().enumerate() {
                        v += q[(r, k)] * lam * q[(c, k)];
                    }
                    worst_recon = worst_recon.max((v - a[(r, c)]).abs());
                }
            }
            for r in 0..n {
                for c in 0..n {
                    let mut v = 0.0;
                    for k in 0..n {
                        v += q[(k, r)] * q[(k, c)];
                    }
                    let target = if r == c { 1.0 } else { 0.0 };
                    worst_ortho = worst_ortho.max((v - target).abs());
                }
            }
        }
        let pass = worst_recon <= 1e-8 && worst_ortho <= 1e-8 && sorted;
        push(
            rows,
            S,
            "eigen_reconstructs_matrix",
            pass,
            format!(
                "25 random symmetric matrices (n≤8): max reconstruction error {worst_recon:.2e}, max orthonormality error {worst_ortho:.2e}, sorted={sorted}"
            ),
        );
    }

    // Diagonal input: eigenvalues are exactly the sorted diagonal and the
    // eigenvectors are exact signed coordinate vectors.
    {
        let mut exact = true;
        for i in 0..10u64 {
            let mut rng = prop_rng(seed, "verify-spectral-diag", i);
            let n = rng.gen_range(2..=8);
            let mut d = Matrix::zeros(n, n);
            let mut diag: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
            for (k, v) in diag.iter().enumerate() {
                d[(k, k)] = *v;
            }
            let (evals, q) = symmetric_eigen(&d);
            diag.sort_by(|a, b| b.partial_cmp(a).unwrap());
            exact &= evals == diag;
            for c in 0..n {
                let col: Vec<f64> = (0..n).map(|r| q[(r, c)]).collect();
                let ones = col.iter().filter(|v| v.abs() == 1.0).count();
                let zeros = col.iter().filter(|v| **v == 0.0).count();
                exact &= ones == 1 && zeros == n - 1;
            }
        }
        push(
            rows,
            S,
            "eigen_diagonal_exact",
            exact,
            "10 random diagonal matrices: eigenvalues bitwise equal to sorted diagonal, eigenvectors exact coordinate vectors".into(),
        );
    }

    // Gershgorin bound never exceeds the true minimum eigenvalue, and a
    // deliberately corrupted bound (off-diagonal signs flipped to +) is
    // caught violating on at least one instance — proof the check has teeth.
    {
        let mut worst_gap = f64::INFINITY;
        let mut ok = true;
        let mut corrupted_violations = 0usize;
        for i in 0..100u64 {
            let mut rng = prop_rng(seed, "verify-spectral-gersh", i);
            let class = random_binary_class(&mut rng, 8, 12);
            let dist = random_distribution(&mut rng, class.num_points());
            let subset = class.hypothesis_labels().to_vec();
            let h = NormalizedClass {
                class,
                distribution: dist.clone(),
            };
            let gram = match gram_matrix(&h, &subset, &dist) {
                Ok(g) => g,
                Err(_) => continue,
            };
            let lo = gershgorin_bound(&gram);
            let lam_min = min_eigenvalue(&gram.matrix);
            ok &= lam_min >= lo - 1e-8;
            worst_gap = worst_gap.min(lam_min - lo);
            let n = gram.matrix.rows();
            let mut corrupted = f64::INFINITY;
            for r in 0..n {
                let mut v = gram.matrix[(r, r)];
                for c in 0..n {
                    if c != r {
                        v += gram.matrix[(r, c)].abs();
                    }
                }
                corrupted = corrupted.min(v);
            }
            if corrupted > lam_min + 1e-6 {
                corrupted_violations += 1;
            }
        }
        let pass = ok && corrupted_violations >= 1;
        push(
            rows,
            S,
            "gershgorin_lower_bounds_min_eigenvalue",
            pass,
            format!(
                "100 random classes: bound holds={ok} (smallest slack {worst_gap:.3e}); corrupted bound caught on {corrupted_violations} instances"
            ),
        );
    }

    // A size-t subset with unit-eigenvalue Gram certifies min-eigenvalue
    // dimension ≥ t at threshold 1/2.
    {
        let mut ok = true;
        let mut checked = 0usize;
        for i in 0..40u64 {
            let mut rng = prop_rng(seed, "verify-spectral-chain", i);
            let class = random_binary_class(&mut rng, 6, 10);
            let dist = random_distribution(&mut rng, class.num_points());
            let h = NormalizedClass {
                class,
                distribution: dist.clone(),
            };
            let mode = DimSearchMode::exact();
            let sq = sq_dimension(&h, &dist, &mode, &SqConvention::default()).unwrap();
            let mev = min_ev_dimension(&h, &dist, 0.5, &mode).unwrap();
            ok &= mev.dim >= sq.dim;
            checked += 1;
        }
        push(
            rows,
            S,
            "square_dimension_implies_min_ev_dimension",
            ok,
            format!("{checked} random classes: min-eigenvalue dimension at λ=1/2 ≥ square dimension in every case"),
        );
    }

    // Rank-error oracle: nonincreasing in the rank, exactly 1/2 at rank 0
    // for ±1 classes, 0 at full rank.
    {
        let mut ok = true;
        let mut worst_zero = 0.0f64;
        let mut worst_full = 0.0f64;
        for i in 0..20u64 {
            let mut rng = prop_rng(seed, "verify-spectral-rankerr", i);
            let class = random_binary_class(&mut rng, 6, 10);
            let dist = random_distribution(&mut rng, class.num_points());
            let h = NormalizedClass {
                class,
                distribution: dist.clone(),
            };
            let full = h.class.num_hypotheses().min(h.class.num_points());
            let mut prev = f64::INFINITY;
            for d in 0..=full {
                let e = avg_rank_error_oracle(&h, &dist, d).unwrap();
                ok &= e <= prev + 1e-12;
                prev = e;
                if d == 0 {
                    worst_zero = worst_zero.max((e - 0.5).abs());
                }
                if d == full {
                    worst_full = worst_full.max(e.abs());
                }
            }
        }
        let pass = ok && worst_zero <= 1e-9 && worst_full <= 1e-9;
        push(
            rows,
            S,
            "rank_error_oracle_monotone_with_endpoints",
            pass,
            format!(
                "20 random ±1 classes: nonincreasing={ok}, |rank-0 error − 1/2| ≤ {worst_zero:.2e}, full-rank error ≤ {worst_full:.2e}"
            ),
        );
    }

    // The spectral rank-d error is optimal: no random rank-2 factorization
    // of the weighted class matrix does better.
    {
        let mut ok = true;
        let mut best_margin = f64::INFINITY;
        for i in 0..10u64 {
            let mut rng = prop_rng(seed, "verify-spectral-lowrank", i);
            let n_h = 4;
            let n_x = 6;
            let values: Vec<Vec<f64>> = (0..n_h)
                .map(|_| (0..n_x).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect();
            let class =
                FiniteHypothesisClass::from_matrix(Matrix::from_rows(&values), LabelKind::Real)
                    .unwrap();
            let dist = random_distribution(&mut rng, n_x);
            let h = NormalizedClass {
                class,
                distribution: dist.clone(),
            };
            let oracle = avg_rank_error_oracle(&h, &dist, 2).unwrap();
            // independent route: random rank-2 factorizations, scored by
            // the same distribution-weighted average.
            let probs = dist.probabilities().to_vec();
            let mut best = f64::INFINITY;
            for _ in 0..300 {
                let u: Vec<Vec<f64>> = (0..n_h)
                    .map(|_| (0..2).map(|_| rng.gen_range(-1.5..1.5)).collect())
                    .collect();
                let v: Vec<Vec<f64>> = (0..2)
                    .map(|_| (0..n_x).map(|_| rng.gen_range(-1.5..1.5)).collect())
                    .collect();
                let mut err = 0.0;
                for r in 0..n_h {
                    for c in 0..n_x {
                        let approx = u[r][0] * v[0][c] + u[r][1] * v[1][c];
                        let diff = values[r][c] - approx;
                        err += 0.5 * probs[c] * diff * diff;
                    }
                }
                best = best.min(err / n_h as f64);
            }
            ok &= oracle <= best + 1e-9;
            best_margin = best_margin.min(best - oracle);
        }
        push(
            rows,
            S,
            "rank_error_oracle_beats_random_factorizations",
            ok,
            format!("10 weighted 4×6 matrices × 300 random rank-2 factorizations: oracle optimal in all (smallest lead {best_margin:.3e})"),
        );
    }
}

// ---------------------------------------------------------------------------
// embeddings
// ---------------------------------------------------------------------------

fn embeddings_suite(seed: u64, rows: &mut Vec<PropertyResult>) {
    const S: &str = "embeddings";

    // Gaussian projections approximately preserve inner products and norms
    // of unit vectors (tolerance ≈ 5.6 standard deviations at d_target=512).
    {
        let d_in = 32;
        let d_target = 512;
        let mut worst_ip = 0.0f64;
        let mut worst_norm = 0.0f64;
        for i in 0..20u64 {
            let mut rng = prop_rng(seed, "verify-embed-jl", i);
            let p = gaussian_projection_matrix(d_target, d_in, rng.gen());
            let unit = |rng: &mut ChaCha8Rng| -> Vec<f64> {
                let v: Vec<f64> = (0..d_in).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let n = norm_of(&v);
                v.into_iter().map(|x| x / n).collect()
            };
            let u = unit(&mut rng);
            let v = unit(&mut rng);
            let pu = p.matvec(&u);
            let pv = p.matvec(&v);
            let ip_in = dot(&u, &v);
            let ip_out = dot(&pu, &pv);
            worst_ip = worst_ip.max((ip_out - ip_in).abs());
            let nu = dot(&pu, &pu);
            worst_norm = worst_norm.max((nu - 1.0).abs());
        }
        let pass = worst_ip <= 0.35 && worst_norm <= 0.35;
        push(
            rows,
            S,
            "gaussian_projection_preserves_geometry",
            pass,
            format!(
                "20 unit-vector pairs, 32→512 dims: max inner-product drift {worst_ip:.4}, max squared-norm drift {worst_norm:.4} (5σ ≈ 0.31)"
            ),
        );
    }

    // Greedy covers are valid: radius within eps, elements drawn from the
    // class itself.
    {
        let mut ok = true;
        let mut worst_radius = 0.0f64;
        for i in 0..20u64 {
            let mut rng = prop_rng(seed, "verify-embed-cover", i);
            let class = random_binary_class(&mut rng, 8, 12);
            let dist = random_distribution(&mut rng, class.num_points());
            for eps in [0.1, 0.25] {
                let (elements, _) = greedy_cover(&class, &dist, eps).unwrap();
                let r = cover_radius(&class, &dist, &elements).unwrap();
                ok &= r <= eps + 1e-12;
                worst_radius = worst_radius.max(r);
                ok &= elements
                    .iter()
                    .all(|e| class.hypothesis_labels().contains(e));
            }
        }
        push(
            rows,
            S,
            "greedy_cover_within_radius",
            ok,
            format!("20 random classes × eps ∈ {{0.1, 0.25}}: cover radius ≤ eps in all (max radius {worst_radius:.4})"),
        );
    }

    // Orthogonal parity classes cannot be covered coarsely: at eps below
    // the mutual disagreement 1/2, the cover needs every hypothesis.
    {
        let class = parities(2).unwrap();
        let dist = DistributionOverX::uniform(class.num_points());
        let (elements, _) = greedy_cover(&class, &dist, 0.25).unwrap();
        let pass = elements.len() == 4;
        push(
            rows,
            S,
            "parity_cover_is_the_whole_class",
            pass,
            format!(
                "2-bit parity class at eps=0.25: cover size {} (expected 4)",
                elements.len()
            ),
        );
    }

    // Representer reduction preserves sample predictions exactly.
    {
        let mut worst = 0.0f64;
        for i in 0..20u64 {
            let mut rng = prop_rng(seed, "verify-embed-representer", i);
            let n_x = rng.gen_range(4..=12);
            let d = rng.gen_range(2..=8);
            let features: Vec<Vec<f64>> = (0..n_x)
                .map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect();
            let labels: Vec<String> = (0..n_x).map(|j| format!("x{j}")).collect();
            // tabular features are d × |X| (one column per point)
            let phi = Embedding::tabular(Matrix::from_rows(&features).transpose(), labels.clone())
                .unwrap();
            let m = rng.gen_range(1..=n_x);
            let sample: Vec<String> = labels.iter().take(m).cloned().collect();
            let (reduced, proj) = representer_reduce(&phi, &sample).unwrap();
            let w: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let wp = proj.project(&w);
            for x in &sample {
                let a = dot(&phi.feature_of(x).unwrap(), &w);
                let b = dot(&reduced.feature_of(x).unwrap(), &wp);
                worst = worst.max((a - b).abs());
            }
        }
        let pass = worst <= 1e-9;
        push(
            rows,
            S,
            "representer_preserves_sample_predictions",
            pass,
            format!("20 random embeddings: max prediction drift after reduction {worst:.2e}"),
        );
    }

    // One-hot identity features interpolate any class exactly with the
    // value rows as weights.
    {
        let mut rng = prop_rng(seed, "verify-embed-identity", 0);
        let class = random_binary_class(&mut rng, 8, 12);
        let phi = Embedding::identity_onehot(class.domain_labels().to_vec());
        let mut worst = 0.0f64;
        for h in 0..class.num_hypotheses() {
            let w: Vec<f64> = (0..class.num_points()).map(|x| class.value(h, x)).collect();
            for (x, lab) in class.domain_labels().iter().enumerate() {
                let pred = dot(&phi.feature_of(lab).unwrap(), &w);
                worst = worst.max((pred - class.value(h, x)).abs());
            }
        }
        let pass = worst <= 1e-12;
        push(
            rows,
            S,
            "identity_features_interpolate",
            pass,
            format!("random class, one-hot features, value-row weights: max error {worst:.2e}"),
        );
    }

    // Least squares over the top-d spectral features attains the rank-d
    // oracle error.
    {
        let mut worst = 0.0f64;
        for i in 0..5u64 {
            let mut rng = prop_rng(seed, "verify-embed-svd", i);
            let class = random_binary_class(&mut rng, 6, 8);
            let dist = random_distribution(&mut rng, class.num_points());
            let h = NormalizedClass {
                class,
                distribution: dist.clone(),
            };
            let d = 2;
            let oracle = avg_rank_error_oracle(&h, &dist, d).unwrap();
            let phi = svd_optimal_embedding(&h, d).unwrap();
            let probs = dist.probabilities().to_vec();
            let n_x = h.class.num_points();
            let feats: Vec<Vec<f64>> = h
                .class
                .domain_labels()
                .iter()
                .map(|lab| phi.feature_of(lab).unwrap())
                .collect();
            let mut total = 0.0;
            for hh in 0..h.class.num_hypotheses() {
                // normal equations in d dims: (Φᵀ D Φ) w = Φᵀ D y, solved
                // through the eigendecomposition of the d×d system.
                let mut a = Matrix::zeros(d, d);
                let mut b = vec![0.0; d];
                for x in 0..n_x {
                    for r in 0..d {
                        b[r] += probs[x] * feats[x][r] * h.class.value(hh, x);
                        for c in 0..d {
                            a[(r, c)] += probs[x] * feats[x][r] * feats[x][c];
                        }
                    }
                }
                let (evals, q) = symmetric_eigen(&a);
                let mut w = vec![0.0; d];
                for (k, lam) in evals.iter().enumerate() {
                    if *lam > 1e-12 {
                        let qk: Vec<f64> = (0..d).map(|r| q[(r, k)]).collect();
                        let coef = dot(&qk, &b) / lam;
                        for r in 0..d {
                            w[r] += coef * qk[r];
                        }
                    }
                }
                let mut err = 0.0;
                for x in 0..n_x {
                    let diff = dot(&feats[x], &w) - h.class.value(hh, x);
                    err += 0.5 * probs[x] * diff * diff;
                }
                total += err;
            }
            total /= h.class.num_hypotheses() as f64;
            worst = worst.max((total - oracle).abs());
        }
        let pass = worst <= 1e-8;
        push(
            rows,
            S,
            "spectral_features_attain_rank_error_oracle",
            pass,
            format!("5 random classes, rank 2: |least-squares error − oracle| ≤ {worst:.2e}"),
        );
    }

    // Family sampling is deterministic in the index and varies across
    // indices for the Gaussian family.
    {
        let class = parities(2).unwrap();
        let base = Embedding::identity_onehot(class.domain_labels().to_vec());
        let family = EmbeddingFamily {
            kind: FamilyKind::JlGaussian {
                base: Box::new(base),
                d_target: 3,
            },
            master_seed: stream_seed(seed, "verify-embed-family"),
        };
        let a1 = sample_embedding(&family, 7).unwrap().to_json().unwrap();
        let a2 = sample_embedding(&family, 7).unwrap().to_json().unwrap();
        let b = sample_embedding(&family, 8).unwrap().to_json().unwrap();
        let pass = a1 == a2 && a1 != b;
        push(
            rows,
            S,
            "family_sampling_deterministic_per_index",
            pass,
            format!(
                "same index ⇒ identical embedding: {}; different index ⇒ different draw: {}",
                a1 == a2,
                a1 != b
            ),
        );
    }
}

fn norm_of(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

// ---------------------------------------------------------------------------
// learners
// ---------------------------------------------------------------------------

fn learners_suite(seed: u64, rows: &mut Vec<PropertyResult>) {
    const S: &str = "learners";
    let opts = ErmOptions::default();

    // Squared-loss ERM interpolates realizable instances (m ≤ d, generic
    // features) to numerical precision.
    {
        let mut worst = 0.0f64;
        for i in 0..20u64 {
            let mut rng = prop_rng(seed, "verify-learn-squared", i);
            let d = rng.gen_range(2..=8);
            let m = rng.gen_range(1..=d);
            let features: Vec<Vec<f64>> = (0..m)
                .map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect();
            let w_star: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let labels: Vec<f64> = features.iter().map(|x| dot(x, &w_star)).collect();
            let feats = Matrix::from_rows(&features);
            let res = linear_erm_seeded(
                &feats,
                &labels,
                &LossSpec::standard(LossKind::Squared),
                &opts,
                rng.gen(),
            )
            .unwrap();
            worst = worst.max(res.empirical_loss);
        }
        let pass = worst <= 1e-8;
        push(
            rows,
            S,
            "squared_erm_interpolates_realizable",
            pass,
            format!("20 realizable instances (m ≤ d): max residual squared loss {worst:.2e}"),
        );
    }

    // Norm-constrained ERM returns weights inside the ball.
    {
        let mut worst = f64::NEG_INFINITY;
        let mut ok = true;
        for i in 0..20u64 {
            let mut rng = prop_rng(seed, "verify-learn-ball", i);
            let d = rng.gen_range(2..=6);
            let m = rng.gen_range(3..=10);
            let features: Vec<Vec<f64>> = (0..m)
                .map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect();
            let labels: Vec<f64> = (0..m)
                .map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 })
                .collect();
            let radius = rng.gen_range(0.5..3.0);
            let feats = Matrix::from_rows(&features);
            let res = norm_constrained_erm_seeded(
                &feats,
                &labels,
                radius,
                &LossSpec::standard(LossKind::Hinge),
                &opts,
                rng.gen(),
            )
            .unwrap();
            let norm = norm_of(&res.weights);
            ok &= norm <= radius + 1e-9 && res.empirical_loss.is_finite();
            worst = worst.max(norm - radius);
        }
        push(
            rows,
            S,
            "constrained_erm_respects_radius",
            ok,
            format!("20 random hinge instances: max norm excess over radius {worst:.2e}"),
        );
    }

    // The subgradient solver matches a known zero-loss teacher on
    // separable hinge instances.
    {
        let mut worst = 0.0f64;
        for i in 0..10u64 {
            let mut rng = prop_rng(seed, "verify-learn-hinge", i);
            let d = rng.gen_range(2..=4);
            let m = rng.gen_range(4..=12);
            let w_star: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut features = Vec::with_capacity(m);
            let mut labels = Vec::with_capacity(m);
            for _ in 0..m {
                loop {
                    let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let z = dot(&x, &w_star);
                    if z.abs() > 0.2 {
                        // rescale so the teacher margin is exactly 2
                        labels.push(z.signum());
                        features.push(x.iter().map(|v| v * 2.0 / z.abs()).collect::<Vec<f64>>());
                        break;
                    }
                }
            }
            let feats = Matrix::from_rows(&features);
            let res = linear_erm_seeded(
                &feats,
                &labels,
                &LossSpec::standard(LossKind::Hinge),
                &opts,
                rng.gen(),
            )
            .unwrap();
            worst = worst.max(res.empirical_loss);
        }
        let pass = worst <= 0.05;
        push(
            rows,
            S,
            "hinge_erm_finds_separators",
            pass,
            format!("10 separable instances with zero-hinge teachers: max achieved hinge loss {worst:.3}"),
        );
    }

    // Deviation-term formulas: dimension route c·√(d/m), norm route
    // c·R/√m, both exact, and the term shrinks like 1/√m.
    {
        let l01 = LossSpec::standard(LossKind::ZeroOne);
        let hinge = LossSpec::standard(LossKind::Hinge);
        let a = generalization_bound(BoundKind::Dimension, &l01, 4.0, 64);
        let b = generalization_bound(BoundKind::Norm, &hinge, 3.0, 36);
        let ratio = generalization_bound(BoundKind::Dimension, &l01, 4.0, 16)
            / generalization_bound(BoundKind::Dimension, &l01, 4.0, 64);
        let pass =
            (a - 0.25).abs() <= 1e-15 && (b - 1.0).abs() <= 1e-15 && (ratio - 2.0).abs() <= 1e-12;
        push(
            rows,
            S,
            "deviation_term_closed_forms",
            pass,
            format!("dimension term(d=4,m=64)={a} (expect 0.25), norm term(R=3,m=36)={b} (expect 1), m:16→64 ratio={ratio} (expect 2)"),
        );
    }

    // Guaranteed modes report exactly the plain score plus a positive
    // deviation term: pairwise per-trial dominance.
    {
        let class = parities(2).unwrap();
        let dist = DistributionOverX::uniform(class.num_points());
        let family = EmbeddingFamily {
            kind: FamilyKind::Identity {
                domain_labels: class.domain_labels().to_vec(),
            },
            master_seed: stream_seed(seed, "verify-learn-modes"),
        };
        let spec = |mode: LearningMode| LearningSimSpec {
            mode,
            class: class.clone(),
            distribution: dist.clone(),
            loss: LossSpec::standard(LossKind::Squared),
            family: family.clone(),
            sample_size: 8,
            trials: 3,
            radius: None,
            seed: stream_seed(seed, "verify-learn-modes"),
            erm: ErmOptions::default(),
        };
        let plain = simulate_learning(&spec(LearningMode::Lin)).unwrap();
        let guarded = simulate_learning(&spec(LearningMode::GLin)).unwrap();
        let mut ok = plain.records.len() == guarded.records.len();
        let mut min_gap = f64::INFINITY;
        if ok {
            for (p, g) in plain.records.iter().zip(&guarded.records) {
                ok &= p.hypothesis_id == g.hypothesis_id && p.trial == g.trial;
                ok &= g.population_criterion >= p.population_criterion - 1e-12;
                ok &= g.bound_term > 0.0 && p.bound_term == 0.0;
                min_gap = min_gap.min(g.population_criterion - p.population_criterion);
            }
        }
        push(
            rows,
            S,
            "guaranteed_mode_adds_deviation_term",
            ok,
            format!("paired trials on the 2-bit parity class: guarded − plain ≥ {min_gap:.3} in every record"),
        );
    }

    // Simulation is a pure function of its spec (bitwise repeatable).
    {
        let class = parities(2).unwrap();
        let dist = DistributionOverX::uniform(class.num_points());
        let family = EmbeddingFamily {
            kind: FamilyKind::Identity {
                domain_labels: class.domain_labels().to_vec(),
            },
            master_seed: stream_seed(seed, "verify-learn-det"),
        };
        let spec = LearningSimSpec {
            mode: LearningMode::Lin,
            class,
            distribution: dist,
            loss: LossSpec::standard(LossKind::Squared),
            family,
            sample_size: 6,
            trials: 2,
            radius: None,
            seed: stream_seed(seed, "verify-learn-det"),
            erm: ErmOptions::default(),
        };
        let a = serde_json::to_string(&simulate_learning(&spec).unwrap()).unwrap();
        let b = serde_json::to_string(&simulate_learning(&spec).unwrap()).unwrap();
        let pass = a == b;
        push(
            rows,
            S,
            "simulation_bitwise_repeatable",
            pass,
            format!("two runs of one spec serialize identically: {pass}"),
        );
    }

    // Empirical loss agrees with a direct per-point tally.
    {
        let mut rng = prop_rng(seed, "verify-learn-emp", 0);
        let d = 3;
        let m = 7;
        let features: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let labels: Vec<f64> = (0..m)
            .map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 })
            .collect();
        let w: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let feats = Matrix::from_rows(&features);
        let lib = empirical_loss(&feats, &labels, &w, &LossSpec::standard(LossKind::ZeroOne))
            .unwrap();
        let direct = features
            .iter()
            .zip(&labels)
            .filter(|(x, y)| dot(x, &w) * **y <= 0.0)
            .count() as f64
            / m as f64;
        let pass = (lib - direct).abs() <= 1e-15;
        push(
            rows,
            S,
            "empirical_loss_matches_direct_tally",
            pass,
            format!("0/1 loss: library {lib} vs direct count {direct}"),
        );
    }
}

// ---------------------------------------------------------------------------
// measures
// ---------------------------------------------------------------------------

fn measures_suite(seed: u64, rows: &mut Vec<PropertyResult>) {
    const S: &str = "measures";

    // Worst-cell criterion dominates every distribution-averaged criterion
    // for the same predictor family.
    {
        let mut ok = true;
        let mut min_slack = f64::INFINITY;
        for i in 0..10u64 {
            let mut rng = prop_rng(seed, "verify-meas-sandwich", i);
            let class = random_binary_class(&mut rng, 6, 8);
            let dist = random_distribution(&mut rng, class.num_points());
            let (_, pair) = greedy_cover(&class, &dist, 0.25).unwrap();
            let pairs = vec![(pair, 1.0)];
            let pw = pointwise_dc_criterion(&pairs, &class).unwrap();
            for _ in 0..5 {
                let d2 = random_distribution(&mut rng, class.num_points());
                let avg = pair_family_distributional_criterion(&pairs, &class, &d2).unwrap();
                ok &= avg <= pw + 1e-9;
                min_slack = min_slack.min(pw - avg);
            }
        }
        push(
            rows,
            S,
            "worst_cell_dominates_average",
            ok,
            format!("10 classes × 5 random distributions: average ≤ worst-cell in all (min slack {min_slack:.3e})"),
        );
    }

    // The min-eigenvalue dimension bound is sound: approximating the
    // witness subclass below the certified dimension must incur error > eps.
    {
        let mut ok = true;
        let mut checked = 0usize;
        for i in 0..4u64 {
            let mut rng = prop_rng(seed, "verify-meas-minev", i);
            let class = random_binary_class(&mut rng, 6, 8);
            let dist = random_distribution(&mut rng, class.num_points());
            let h = NormalizedClass {
                class,
                distribution: dist.clone(),
            };
            let eps = 0.1;
            let report =
                min_ev_dc_lower_bound(&h, eps, &[0.5, 1.0], &DimSearchMode::exact()).unwrap();
            if report.value < 1.0 {
                continue;
            }
            let witness_rows: Vec<Vec<f64>> = report
                .witness
                .iter()
                .map(|lab| {
                    let idx = h.class.hypothesis_index(lab).unwrap();
                    (0..h.class.num_points())
                        .map(|x| h.class.value(idx, x))
                        .collect()
                })
                .collect();
            let sub = NormalizedClass {
                class: FiniteHypothesisClass::from_matrix(
                    Matrix::from_rows(&witness_rows),
                    LabelKind::Real,
                )
                .unwrap(),
                distribution: dist.clone(),
            };
            let max_d = report.value.ceil() as usize;
            for d in 0..max_d {
                let err = avg_rank_error_oracle(&sub, &dist, d).unwrap();
                ok &= err > eps;
                checked += 1;
            }
        }
        push(
            rows,
            S,
            "min_ev_bound_sound_against_oracle",
            ok && checked > 0,
            format!("{checked} (class, dimension) pairs below the certified bound: oracle error > eps in every case"),
        );
    }

    // The square-dimension route never beats the min-eigenvalue route when
    // the latter's grid includes λ = 1/2.
    {
        let mut ok = true;
        for i in 0..6u64 {
            let mut rng = prop_rng(seed, "verify-meas-sqvsev", i);
            let class = random_binary_class(&mut rng, 6, 8);
            let dist = random_distribution(&mut rng, class.num_points());
            let h = NormalizedClass {
                class,
                distribution: dist,
            };
            let eps = 0.1;
            let mode = DimSearchMode::exact();
            let sq = sq_dim_dc_lower_bound(&h, eps, &mode, &SqConvention::default()).unwrap();
            let ev = min_ev_dc_lower_bound(&h, eps, &[0.5, 0.75, 1.0], &mode).unwrap();
            ok &= sq.value <= ev.value + 1e-9;
        }
        push(
            rows,
            S,
            "square_route_below_min_ev_route",
            ok,
            "6 random classes at eps=0.1: square-dimension bound ≤ min-eigenvalue bound (grid includes λ=1/2)"
                .into(),
        );
    }

    // Margin-coefficient formula against an inline independent derivation.
    {
        let eps = 0.25f64;
        let h = binary_entropy(eps).unwrap();
        let expected = (1.0 - h) / (4.0 * ((16.0 * std::f64::consts::E) / (1.0 - h)).log2());
        let got = parity_margin_coefficient(eps, LogBase::Two).unwrap();
        let vac = parity_margin_coefficient(0.5, LogBase::Two).unwrap();
        let mono = parity_margin_coefficient(0.1, LogBase::Two).unwrap()
            > parity_margin_coefficient(0.2, LogBase::Two).unwrap();
        let pass = (got - expected).abs() <= 1e-12 && vac == 0.0 && mono;
        push(
            rows,
            S,
            "margin_coefficient_matches_rederivation",
            pass,
            format!(
                "eps=0.25: coefficient {got:.12} vs independent {expected:.12}; vacuous at 1/2: {}; decreasing: {mono}",
                vac == 0.0
            ),
        );
    }

    // Margin→dimension transfer closed forms across a parameter grid.
    {
        let mut ok = true;
        for (r, eta) in [(2.0, 0.1), (4.0, 0.1), (3.0, 0.05)] {
            let zo =
                margin_to_dimension_transfer(r, 0.0, eta, LossKind::ZeroOne, 1.0, 8.0).unwrap();
            let expect_zo = (8.0 * r * r * (1.0 / eta).ln()).ceil() as u64;
            ok &= zo == expect_zo;
            let hg = margin_to_dimension_transfer(r, 0.0, eta, LossKind::Hinge, 1.0, 8.0).unwrap();
            let expect_hg = (8.0 * (r / eta) * (r / eta)).ceil() as u64;
            ok &= hg == expect_hg;
            let sq =
                margin_to_dimension_transfer(r, 0.05, eta, LossKind::Squared, 2.0, 8.0).unwrap();
            let expect_sq = (8.0 * r * r * (0.05 + eta) / (eta * eta)).ceil() as u64;
            ok &= sq == expect_sq;
        }
        push(
            rows,
            S,
            "dimension_transfer_closed_forms",
            ok,
            "0/1, hinge, and squared transfer formulas match independent evaluation on a 3-point grid"
                .into(),
        );
    }

    // Shattering dimension spot values and the log₂|H| ceiling.
    {
        let p2 = vc_dimension(&parities(2).unwrap(), 10).unwrap();
        let mut ok = p2 == VcResult::Exact(2);
        let mut rng = prop_rng(seed, "verify-meas-vc", 0);
        for _ in 0..10 {
            let class = random_binary_class(&mut rng, 8, 12);
            let cap = (class.num_hypotheses() as f64).log2().floor() as usize;
            let v = vc_dimension(&class, 10).unwrap();
            ok &= v.value() <= cap;
        }
        push(
            rows,
            S,
            "shattering_dimension_spot_values",
            ok,
            format!("2-bit parities shatter exactly 2 points: {p2:?}; 10 random classes respect the log₂|H| ceiling"),
        );
    }

    // Norm-complexity search returns a verified factorization within the
    // √min(|H|,|X|) baseline guarantee.
    {
        let class = parities(2).unwrap();
        let res = mc_upper_heuristic(&class, 4, stream_seed(seed, "verify-meas-mc")).unwrap();
        let pass = res.radius <= 2.0 + 1e-9 && res.min_margin >= 1.0 - 1e-9;
        push(
            rows,
            S,
            "norm_complexity_witness_verified",
            pass,
            format!(
                "2-bit parity class: radius {:.6} (baseline 2), re-checked margin {:.9}",
                res.radius, res.min_margin
            ),
        );
    }

    // Entropy and counting formulas.
    {
        let h_half = binary_entropy(0.5).unwrap();
        let mut sym = true;
        for k in 1..10 {
            let p = k as f64 / 20.0;
            sym &= (binary_entropy(p).unwrap() - binary_entropy(1.0 - p).unwrap()).abs() <= 1e-12;
        }
        let count = sign_matrix_log_count_bound(2, 2).unwrap();
        let direct = 2.0 * 2.0 * 2.0 * (8.0 * std::f64::consts::E * 2.0 / 2.0).log2();
        let pass = h_half == 1.0 && sym && (count - direct).abs() <= 1e-12;
        push(
            rows,
            S,
            "entropy_and_count_formulas",
            pass,
            format!("h(1/2)={h_half} (exact 1), symmetric on a 9-point grid: {sym}, sign-pattern log-count(2,2)={count:.6} vs direct {direct:.6}"),
        );
    }
}

// ---------------------------------------------------------------------------
// constructions
// ---------------------------------------------------------------------------

fn constructions_suite(seed: u64, rows: &mut Vec<PropertyResult>) {
    const S: &str = "constructions";

    // Shape of the capped triangle wave: odd, bounded by 1, 1-Lipschitz,
    // exactly ±1 beyond ±a.
    {
        let mut ok = true;
        for a in [1u64, 3, 5, 7] {
            let hi = a as f64 + 2.0;
            let steps = (2.0 * hi / 0.01) as i64;
            let mut prev: Option<(f64, f64)> = None;
            for s in 0..=steps {
                let z = -hi + s as f64 * 0.01;
                let v = psi(a, z).unwrap();
                ok &= v.abs() <= 1.0 + 1e-12;
                ok &= (v + psi(a, -z).unwrap()).abs() <= 1e-12;
                if z >= a as f64 {
                    ok &= v == 1.0;
                }
                if z <= -(a as f64) {
                    ok &= v == -1.0;
                }
                if let Some((pz, pv)) = prev {
                    ok &= (v - pv).abs() <= (z - pz).abs() + 1e-9;
                }
                prev = Some((z, v));
            }
        }
        push(
            rows,
            S,
            "triangle_wave_shape",
            ok,
            "a ∈ {1,3,5,7}, grid step 0.01: odd, |ψ|≤1, 1-Lipschitz, tails exactly ±1 beyond ±a"
                .into(),
        );
    }

    // The ReLU decomposition reproduces ψ_a(⟨u, x⟩) with a+2 neurons and
    // coefficients bounded by 2.
    {
        let mut ok = true;
        let mut worst = 0.0f64;
        for (i, a) in [1u64, 3, 7].iter().enumerate() {
            let mut rng = prop_rng(seed, "verify-cons-relu", i as u64);
            let dim = 3;
            let u: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.5..1.5)).collect();
            let (neurons, coefs) = zigzag_relu_neurons(&u, *a).unwrap();
            ok &= neurons.len() == (*a as usize) + 2 && coefs.len() == neurons.len();
            ok &= coefs.iter().all(|c| c.abs() <= 2.0 + 1e-12);
            for _ in 0..50 {
                let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-8.0..8.0)).collect();
                let direct = psi(*a, dot(&u, &x)).unwrap();
                let mut sum = 0.0;
                for ((w, b), c) in neurons.iter().zip(&coefs) {
                    sum += c * (dot(w, &x) + b).max(0.0);
                }
                worst = worst.max((sum - direct).abs());
            }
        }
        let pass = ok && worst <= 1e-9;
        push(
            rows,
            S,
            "relu_decomposition_reproduces_wave",
            pass,
            format!("a ∈ {{1,3,7}}, 50 random points each: a+2 neurons, |coef| ≤ 2, max reconstruction error {worst:.2e}"),
        );
    }

    // Parity classes are exactly orthonormal under the uniform law.
    {
        let class = parities(3).unwrap();
        let dist = DistributionOverX::uniform(class.num_points());
        let subset = class.hypothesis_labels().to_vec();
        let h = NormalizedClass {
            class,
            distribution: dist.clone(),
        };
        let gram = gram_matrix(&h, &subset, &dist).unwrap();
        let mut worst = 0.0f64;
        let n = gram.matrix.rows();
        for r in 0..n {
            for c in 0..n {
                let target = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((gram.matrix[(r, c)] - target).abs());
            }
        }
        let pass = worst <= 1e-12 && n == 8;
        push(
            rows,
            S,
            "parity_class_orthonormal",
            pass,
            format!("3-bit parities under uniform law: 8×8 correlation matrix within {worst:.2e} of identity"),
        );
    }

    // Decision-list pattern class fingerprint: ±1 entries with fixed row
    // and column sums.
    {
        let class = pattern_decision_list(2, 2).unwrap();
        let v = class.values();
        let mut ok = v.rows() == 16 && v.cols() == 16;
        let mut total = 0.0;
        for r in 0..v.rows() {
            let mut row_sum = 0.0;
            for c in 0..v.cols() {
                let x = v[(r, c)];
                ok &= x == 1.0 || x == -1.0;
                row_sum += x;
                total += x;
            }
            ok &= row_sum == 10.0;
        }
        for c in 0..v.cols() {
            let mut col_sum = 0.0;
            for r in 0..v.rows() {
                col_sum += v[(r, c)];
            }
            ok &= col_sum == 10.0;
        }
        ok &= total == 160.0;
        push(
            rows,
            S,
            "decision_list_fingerprint",
            ok,
            "2-bit, depth-2 pattern lists: 16×16 ±1 table, every row and column sums to 10, total 160"
                .into(),
        );
    }

    // Sampled wave classes: outputs stay in [−1, 1] and each hypothesis has
    // non-vanishing self-correlation under the Gaussian input law.
    {
        let mut ok = true;
        let mut min_self = f64::INFINITY;
        for (i, n) in [2usize, 4].iter().enumerate() {
            let fc = zigzag_class_sample(*n, 3, stream_seed(seed, "verify-cons-zigzag") ^ i as u64);
            for t in 0..fc.num_hypotheses() {
                let h = FunctionalHypothesis::new(&fc, t).unwrap();
                let mc_seed =
                    stream_seed(seed, "verify-cons-zigzag-mc") ^ ((i as u64) << 8) ^ t as u64;
                let est = gaussian_gram_estimate(&h, &h, 10_000, mc_seed).unwrap();
                min_self = min_self.min(est.mean);
                ok &= est.mean >= 0.05;
            }
            let pts = gaussian_points(*n, 50, stream_seed(seed, "verify-cons-zigzag-pts"));
            for t in 0..fc.num_hypotheses() {
                for x in &pts {
                    let v = fc.evaluate(t, x);
                    ok &= v.abs() <= 1.0 + 1e-12;
                }
            }
        }
        push(
            rows,
            S,
            "sampled_wave_class_properties",
            ok,
            format!("n ∈ {{2,4}}, 3 hypotheses each: outputs within [−1,1]; smallest self-correlation {min_self:.3} (10⁴ samples, threshold 0.05)"),
        );
    }

    // Restricting a functional class to sampled points reproduces direct
    // evaluation on the same points.
    {
        let fc = zigzag_class_sample(3, 2, stream_seed(seed, "verify-cons-restrict"));
        let m = 40;
        let point_seed = stream_seed(seed, "verify-cons-restrict-points");
        let (class, dist) = finite_restriction(&fc, m, point_seed).unwrap();
        let pts = gaussian_points(fc.input_dim, m, point_seed);
        let mut worst = 0.0f64;
        for t in 0..fc.num_hypotheses() {
            for (j, x) in pts.iter().enumerate() {
                worst = worst.max((class.value(t, j) - fc.evaluate(t, x)).abs());
            }
        }
        let uniform = dist
            .probabilities()
            .iter()
            .all(|p| (p - 1.0 / m as f64).abs() <= 1e-15);
        let pass = worst <= 1e-12 && uniform && class.num_points() == m;
        push(
            rows,
            S,
            "finite_restriction_consistent",
            pass,
            format!("40-point restriction: max value drift {worst:.2e}; induced law uniform: {uniform}"),
        );
    }
}
