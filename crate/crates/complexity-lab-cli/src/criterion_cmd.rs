//! The `criterion` command: distributional criterion of an embedding family
//! (optionally a minimal-dimension search), and the exact point-wise
//! criterion of a committed pair family.

use std::fs;

use clap::{Args, Subcommand};
use serde_json::{json, Value};

use complexity_lab::core::FiniteHypothesisClass;
use complexity_lab::embeddings::{greedy_cover, Embedding, EmbeddingWeightPair};
use complexity_lab::measures::{
    distributional_dc_criterion, min_dim_for_criterion, pair_family_distributional_criterion,
    pointwise_dc_criterion, CriterionReport,
};

use crate::report::{fmt17, Table};
use crate::sources::{
    build_family, build_family_generator, load_class, load_dist, parse_loss, Ctx,
};
use crate::CliError;

#[derive(Args, Debug)]
pub struct CriterionArgs {
    #[command(subcommand)]
    pub which: CriterionCmd,
}

#[derive(Subcommand, Debug)]
pub enum CriterionCmd {
    /// Distributional criterion: expected best-response population loss per
    /// hypothesis over embedding draws. With --search-eps and --d-hi, scans
    /// for the smallest passing family dimension instead (exit 3 if none).
    Dc {
        #[arg(long)]
        class: Option<String>,
        #[arg(long)]
        dist: Option<String>,
        /// Loss: zero-one | margin | hinge | squared.
        #[arg(long)]
        loss: Option<String>,
        /// Family: identity | svd:D | jl:D | cover:EPS,D. For searches,
        /// omit D: svd | jl | cover:EPS.
        #[arg(long)]
        family: Option<String>,
        /// Embedding draws per dimension (default 1; deterministic
        /// families need only 1).
        #[arg(long)]
        draws: Option<usize>,
        /// Target ε: switches to minimal-dimension search.
        #[arg(long)]
        search_eps: Option<f64>,
        /// Smallest dimension to scan (default 1).
        #[arg(long)]
        d_lo: Option<usize>,
        /// Largest dimension to scan (required for searches).
        #[arg(long)]
        d_hi: Option<usize>,
    },
    /// Point-wise criterion: exact sup over (hypothesis, point) of expected
    /// 0/1 loss of a pair family. Default family: the greedy ε-cover pair.
    Pointwise {
        #[arg(long)]
        class: Option<String>,
        #[arg(long)]
        dist: Option<String>,
        /// Cover radius for the default greedy-cover pair family.
        #[arg(long)]
        eps: Option<f64>,
        /// Explicit pair-family JSON file (overrides --eps).
        #[arg(long)]
        pairs: Option<String>,
        /// Also evaluate the distributional criterion of the same pairs.
        #[arg(long)]
        with_distributional: bool,
    },
}

fn criterion_table(report: &CriterionReport) -> Table {
    Table {
        header: vec!["hypothesis".into(), "mean".into(), "std_error".into()],
        rows: report
            .per_hypothesis
            .iter()
            .map(|h| {
                vec![
                    h.hypothesis_id.clone(),
                    fmt17(h.mean),
                    fmt17(h.std_error),
                ]
            })
            .collect(),
    }
}

fn load_pairs(
    path: &str,
    class: &FiniteHypothesisClass,
) -> Result<Vec<(EmbeddingWeightPair, f64)>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {path}: {e}")))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("{path}: malformed JSON: {e}")))?;
    let entries = value
        .get("pairs")
        .and_then(Value::as_array)
        .ok_or_else(|| CliError::Validation(format!("{path}: missing \"pairs\" array")))?;
    let mut out = Vec::new();
    for (i, entry) in entries.iter().enumerate() {
        let prob = entry
            .get("probability")
            .and_then(Value::as_f64)
            .ok_or_else(|| {
                CliError::Validation(format!("{path}: pair {i} missing \"probability\""))
            })?;
        let embedding_value = entry
            .get("embedding")
            .ok_or_else(|| CliError::Validation(format!("{path}: pair {i} missing \"embedding\"")))?;
        let embedding = Embedding::from_json(&embedding_value.to_string())
            .map_err(|e| CliError::Validation(format!("{path}: pair {i}: {e}")))?;
        let weights_obj = entry
            .get("weights")
            .and_then(Value::as_object)
            .ok_or_else(|| CliError::Validation(format!("{path}: pair {i} missing \"weights\"")))?;
        let mut weights = Vec::new();
        for id in class.hypothesis_labels() {
            let w = weights_obj
                .get(id)
                .and_then(Value::as_array)
                .ok_or_else(|| {
                    CliError::Validation(format!("{path}: pair {i} missing weights for '{id}'"))
                })?
                .iter()
                .map(|v| v.as_f64().unwrap_or(f64::NAN))
                .collect::<Vec<f64>>();
            weights.push((id.clone(), w));
        }
        let pair = EmbeddingWeightPair::new(embedding, weights)
            .map_err(|e| CliError::Validation(format!("{path}: pair {i}: {e}")))?;
        out.push((pair, prob));
    }
    Ok(out)
}

pub fn run(ctx: &Ctx, cmd: &CriterionCmd) -> Result<(Value, Option<Table>), CliError> {
    match cmd {
        CriterionCmd::Dc {
            class,
            dist,
            loss,
            family,
            draws,
            search_eps,
            d_lo,
            d_hi,
        } => {
            let (class, induced) = load_class(&ctx.req_str("class", class)?)?;
            let dist = load_dist(&class, induced, &ctx.str_opt("dist", dist))?;
            let loss = parse_loss(&ctx.req_str("loss", loss)?)?;
            let family_spec = ctx.req_str("family", family)?;
            let draws = ctx.usize_or("draws", *draws, 1);
            let seed = ctx.seed_required("criterion dc")?;

            if let Some(eps) = ctx.f64_opt("search-eps", *search_eps) {
                let d_lo = ctx.usize_or("d-lo", *d_lo, 1);
                let d_hi = ctx.req_usize("d-hi", *d_hi)?;
                let generator = build_family_generator(&family_spec, &class, &dist, seed)?;
                let result = min_dim_for_criterion(
                    |d| generator(d),
                    &class,
                    &dist,
                    &loss,
                    eps,
                    d_lo,
                    d_hi,
                    draws,
                    seed,
                )
                .map_err(|e| CliError::Validation(e.to_string()))?;
                let found = result.dimension.is_some();
                let table = criterion_table(&result.report);
                if !found {
                    return Err(CliError::NotFound(format!(
                        "no dimension in [{d_lo}, {d_hi}] meets criterion ≤ {eps} \
                         (best: {} at dimension {})",
                        result.best_criterion, result.best_dimension
                    )));
                }
                return Ok((json!(result), Some(table)));
            }

            let family = build_family(&family_spec, &class, &dist, seed)?;
            let report = distributional_dc_criterion(&family, &class, &dist, &loss, draws, seed)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            let table = criterion_table(&report);
            Ok((json!(report), Some(table)))
        }
        CriterionCmd::Pointwise {
            class,
            dist,
            eps,
            pairs,
            with_distributional,
        } => {
            let (class, induced) = load_class(&ctx.req_str("class", class)?)?;
            let dist = load_dist(&class, induced, &ctx.str_opt("dist", dist))?;
            let pair_family = match ctx.str_opt("pairs", pairs) {
                Some(path) => load_pairs(&path, &class)?,
                None => {
                    let eps = ctx.req_f64("eps", *eps)?;
                    let (_, pair) = greedy_cover(&class, &dist, eps)
                        .map_err(|e| CliError::Validation(e.to_string()))?;
                    vec![(pair, 1.0)]
                }
            };
            let pointwise = pointwise_dc_criterion(&pair_family, &class)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            let mut results = json!({
                "pointwise_criterion": pointwise,
                "pairs": pair_family.len(),
            });
            let mut rows = vec![vec![
                "pointwise".into(),
                fmt17(pair_family.len() as f64),
                fmt17(pointwise),
                String::new(),
            ]];
            if ctx.bool_or("with-distributional", *with_distributional, false) {
                let dist_val = pair_family_distributional_criterion(&pair_family, &class, &dist)
                    .map_err(|e| CliError::Validation(e.to_string()))?;
                results["distributional_criterion"] = json!(dist_val);
                rows.push(vec![
                    "distributional".into(),
                    fmt17(pair_family.len() as f64),
                    fmt17(dist_val),
                    String::new(),
                ]);
            }
            let table = Table {
                header: vec![
                    "bound".into(),
                    "param".into(),
                    "value".into(),
                    "witness".into(),
                ],
                rows,
            };
            Ok((results, Some(table)))
        }
    }
}
