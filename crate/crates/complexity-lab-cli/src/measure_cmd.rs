//! The `measure` command: spectral dimensions, closed-form lower bounds,
//! covers, margin factorizations, VC dimension, and formula calculators.

use clap::{Args, Subcommand};
use serde_json::{json, Value};

use complexity_lab::core::normalize_class;
use complexity_lab::embeddings::{cover_radius, greedy_cover};
use complexity_lab::measures::{
    margin_to_dimension_transfer, mc_upper_heuristic, min_ev_dc_lower_bound,
    parities_margin_dc_lower_bound, sign_matrix_log_count_bound, sq_dim_dc_lower_bound,
    vc_dimension, BoundReport, LogBase, VcResult,
};
use complexity_lab::spectral::{
    avg_rank_error_oracle, min_ev_dimension, sq_dimension, DimSearchMode, SqConvention,
};

use crate::report::{fmt17, Table};
use crate::sources::{load_class, load_dist, loss_kind_of, Ctx};
use crate::CliError;

#[derive(Args, Debug)]
pub struct MeasureArgs {
    #[command(subcommand)]
    pub which: MeasureCmd,
}

#[derive(Args, Debug)]
pub struct ClassDistArgs {
    /// Class source: inline spec (parities:N, one-sparse:N, decision-list:N,K,
    /// zigzag-restriction:N,T,POINTS,SEED) or a JSON file path.
    #[arg(long)]
    pub class: Option<String>,
    /// Distribution: uniform (default), induced, or a JSON file path.
    #[arg(long)]
    pub dist: Option<String>,
}

#[derive(Args, Debug)]
pub struct SearchModeArgs {
    /// Subset search mode for the combinatorial dimensions.
    #[arg(long, value_parser = ["exact", "greedy"])]
    pub mode: Option<String>,
    /// Cap above which exact search falls back to greedy.
    #[arg(long)]
    pub exact_cap: Option<usize>,
}

impl SearchModeArgs {
    fn resolve(&self, ctx: &Ctx) -> Result<DimSearchMode, CliError> {
        let name = ctx
            .str_opt("mode", &self.mode)
            .unwrap_or_else(|| "exact".into());
        let mut mode = match name.as_str() {
            "exact" => DimSearchMode::exact(),
            "greedy" => DimSearchMode::greedy(),
            other => {
                return Err(CliError::Validation(format!(
                    "unknown search mode '{other}': expected exact | greedy"
                )))
            }
        };
        if let Some(cap) = ctx.usize_opt("exact-cap", self.exact_cap) {
            mode.exact_cap = cap;
        }
        Ok(mode)
    }
}

#[derive(Subcommand, Debug)]
pub enum MeasureCmd {
    /// Statistical-query dimension: largest near-orthogonal subset.
    Sqdim {
        #[command(flatten)]
        cd: ClassDistArgs,
        #[command(flatten)]
        search: SearchModeArgs,
        /// Use the signed threshold convention instead of magnitudes.
        #[arg(long)]
        signed: bool,
        /// Fixed correlation threshold (default: size-coupled 1/(2t)).
        #[arg(long)]
        gamma: Option<f64>,
    },
    /// Minimum-eigenvalue dimension at a given λ.
    Minev {
        #[command(flatten)]
        cd: ClassDistArgs,
        #[command(flatten)]
        search: SearchModeArgs,
        /// Eigenvalue threshold λ in (0, 1].
        #[arg(long)]
        lambda: Option<f64>,
    },
    /// Dimension-complexity lower bound from the min-eigenvalue dimension,
    /// maximized over a λ grid: max (1 − 2ε/λ)·minEV-dim(λ).
    MinevLb {
        #[command(flatten)]
        cd: ClassDistArgs,
        #[command(flatten)]
        search: SearchModeArgs,
        /// Accuracy ε.
        #[arg(long)]
        eps: Option<f64>,
        /// Sweep over several ε values (comma-separated); overrides --eps.
        #[arg(long)]
        eps_grid: Option<String>,
        /// λ grid, comma-separated (default 0.25,0.5,0.75,1.0).
        #[arg(long)]
        lambda_grid: Option<String>,
    },
    /// Dimension-complexity lower bound from the SQ-dimension:
    /// (1 − 4ε)·SQ-dim.
    SqdimLb {
        #[command(flatten)]
        cd: ClassDistArgs,
        #[command(flatten)]
        search: SearchModeArgs,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        eps_grid: Option<String>,
    },
    /// Margin-loss dimension-complexity lower bound for n-bit parities:
    /// n·(1 − h(ε)) / (4·log(16e/(1 − h(ε)))).
    MarginLb {
        /// Number of parity bits n.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        eps: Option<f64>,
        /// Logarithm base in the denominator: 2 (default) or e.
        #[arg(long)]
        log_base: Option<String>,
    },
    /// Dimension sufficient to carry a radius-R margin solution through a
    /// Gaussian projection at extra error η.
    DimTransfer {
        /// Weight-vector radius R.
        #[arg(long)]
        radius: Option<f64>,
        /// Base error ε (used by the squared-loss route).
        #[arg(long)]
        eps: Option<f64>,
        /// Extra error budget η.
        #[arg(long)]
        eta: Option<f64>,
        /// Loss: zero-one | margin | hinge | squared.
        #[arg(long)]
        loss: Option<String>,
        /// Lipschitz constant (hinge route).
        #[arg(long)]
        lipschitz: Option<f64>,
        /// Explicit calibration constant (default 8).
        #[arg(long)]
        transfer_c: Option<f64>,
    },
    /// Greedy ε-cover of the class under the distribution.
    Cover {
        #[command(flatten)]
        cd: ClassDistArgs,
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Heuristic upper bound on margin complexity (verified witness).
    McUpper {
        #[command(flatten)]
        cd: ClassDistArgs,
        /// Alternating-ascent restarts (default 4).
        #[arg(long)]
        restarts: Option<usize>,
    },
    /// Exact VC dimension by shattering search.
    Vc {
        #[command(flatten)]
        cd: ClassDistArgs,
        /// Search cap (default 10).
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Optimal average rank-d squared error (spectral oracle).
    AvgRank {
        #[command(flatten)]
        cd: ClassDistArgs,
        /// Rank d.
        #[arg(long)]
        rank: Option<usize>,
        /// Sweep over several ranks, comma-separated; overrides --rank.
        #[arg(long)]
        rank_grid: Option<String>,
    },
    /// log₂ of the counting bound (8en/d)^(2dn) on realizable n×n sign
    /// matrices in dimension d.
    SmLogCount {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
    },
}

fn bound_row(report: &BoundReport, param: f64) -> Vec<String> {
    vec![
        report.name.clone(),
        fmt17(param),
        fmt17(report.value),
        report.witness.join(";"),
    ]
}

fn bound_table(rows: Vec<Vec<String>>) -> Table {
    Table {
        header: vec![
            "bound".into(),
            "param".into(),
            "value".into(),
            "witness".into(),
        ],
        rows,
    }
}

fn validation<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Validation(e.to_string())
}

/// Run a measure subcommand; returns (results payload, CSV table).
pub fn run(ctx: &Ctx, cmd: &MeasureCmd) -> Result<(Value, Option<Table>), CliError> {
    match cmd {
        MeasureCmd::Sqdim {
            cd,
            search,
            signed,
            gamma,
        } => {
            let (class, induced) = load_class(&ctx.req_str("class", &cd.class)?)?;
            let dist = load_dist(&class, induced, &ctx.str_opt("dist", &cd.dist))?;
            let mode = search.resolve(ctx)?;
            let convention = SqConvention {
                signed: ctx.bool_or("signed", *signed, false),
                gamma: ctx.f64_opt("gamma", *gamma),
            };
            let h = normalize_class(&class, &dist).map_err(validation)?;
            let witness = sq_dimension(&h, &dist, &mode, &convention).map_err(validation)?;
            let rows = vec![vec![
                "sqdim".into(),
                fmt17(convention.gamma.unwrap_or(f64::NAN)),
                fmt17(witness.dim as f64),
                witness.witness.join(";"),
            ]];
            Ok((json!(witness), Some(bound_table(rows))))
        }
        MeasureCmd::Minev { cd, search, lambda } => {
            let (class, induced) = load_class(&ctx.req_str("class", &cd.class)?)?;
            let dist = load_dist(&class, induced, &ctx.str_opt("dist", &cd.dist))?;
            let mode = search.resolve(ctx)?;
            let lambda = ctx.req_f64("lambda", *lambda)?;
            let h = normalize_class(&class, &dist).map_err(validation)?;
            let witness = min_ev_dimension(&h, &dist, lambda, &mode).map_err(validation)?;
            let rows = vec![vec![
                "minev".into(),
                fmt17(lambda),
                fmt17(witness.dim as f64),
                witness.witness.join(";"),
            ]];
            Ok((json!(witness), Some(bound_table(rows))))
        }
        MeasureCmd::MinevLb {
            cd,
            search,
            eps,
            eps_grid,
            lambda_grid,
        } => {
            let (class, induced) = load_class(&ctx.req_str("class", &cd.class)?)?;
            let dist = load_dist(&class, induced, &ctx.str_opt("dist", &cd.dist))?;
            let mode = search.resolve(ctx)?;
            let lambda_grid = ctx
                .f64_list_opt("lambda-grid", lambda_grid)?
                .unwrap_or_else(|| vec![0.25, 0.5, 0.75, 1.0]);
            let eps_values = match ctx.f64_list_opt("eps-grid", eps_grid)? {
                Some(grid) => grid,
                None => vec![ctx.req_f64("eps", *eps)?],
            };
            let h = normalize_class(&class, &dist).map_err(validation)?;
            let mut reports = Vec::new();
            let mut rows = Vec::new();
            for &e in &eps_values {
                let report =
                    min_ev_dc_lower_bound(&h, e, &lambda_grid, &mode).map_err(validation)?;
                rows.push(bound_row(&report, e));
                reports.push(report);
            }
            let results = if reports.len() == 1 {
                json!(reports[0])
            } else {
                json!(reports)
            };
            Ok((results, Some(bound_table(rows))))
        }
        MeasureCmd::SqdimLb {
            cd,
            search,
            eps,
            eps_grid,
        } => {
            let (class, induced) = load_class(&ctx.req_str("class", &cd.class)?)?;
            let dist = load_dist(&class, induced, &ctx.str_opt("dist", &cd.dist))?;
            let mode = search.resolve(ctx)?;
            let eps_values = match ctx.f64_list_opt("eps-grid", eps_grid)? {
                Some(grid) => grid,
                None => vec![ctx.req_f64("eps", *eps)?],
            };
            let h = normalize_class(&class, &dist).map_err(validation)?;
            let convention = SqConvention::default();
            let mut reports = Vec::new();
            let mut rows = Vec::new();
            for &e in &eps_values {
                let report =
                    sq_dim_dc_lower_bound(&h, e, &mode, &convention).map_err(validation)?;
                rows.push(bound_row(&report, e));
                reports.push(report);
            }
            let results = if reports.len() == 1 {
                json!(reports[0])
            } else {
                json!(reports)
            };
            Ok((results, Some(bound_table(rows))))
        }
        MeasureCmd::MarginLb { n, eps, log_base } => {
            let n = ctx.req_usize("n", *n)?;
            let eps = ctx.req_f64("eps", *eps)?;
            let base = match ctx
                .str_opt("log-base", log_base)
                .unwrap_or_else(|| "2".into())
                .as_str()
            {
                "2" | "two" => LogBase::Two,
                "e" => LogBase::E,
                other => {
                    return Err(CliError::Validation(format!(
                        "unknown log base '{other}': expected 2 | e"
                    )))
                }
            };
            let report = parities_margin_dc_lower_bound(n, eps, base).map_err(validation)?;
            let rows = vec![bound_row(&report, eps)];
            Ok((json!(report), Some(bound_table(rows))))
        }
        MeasureCmd::DimTransfer {
            radius,
            eps,
            eta,
            loss,
            lipschitz,
            transfer_c,
        } => {
            let radius = ctx.req_f64("radius", *radius)?;
            let eps = ctx.f64_or("eps", *eps, 0.0);
            let eta = ctx.req_f64("eta", *eta)?;
            let kind = loss_kind_of(&ctx.req_str("loss", loss)?)?;
            let lipschitz = ctx.f64_or(
                "lipschitz",
                *lipschitz,
                complexity_lab::core::LossSpec::standard(kind).lipschitz_l,
            );
            let c = ctx.f64_or("transfer-c", *transfer_c, 8.0);
            let dim = margin_to_dimension_transfer(radius, eps, eta, kind, lipschitz, c)
                .map_err(validation)?;
            let results = json!({
                "name": "dimension-transfer",
                "dimension": dim,
                "inputs": {
                    "radius": radius, "eps": eps, "eta": eta,
                    "loss": format!("{kind:?}"), "lipschitz": lipschitz, "transfer_c": c,
                },
            });
            let rows = vec![vec![
                "dimension-transfer".into(),
                fmt17(eta),
                fmt17(dim as f64),
                String::new(),
            ]];
            Ok((results, Some(bound_table(rows))))
        }
        MeasureCmd::Cover { cd, eps } => {
            let (class, induced) = load_class(&ctx.req_str("class", &cd.class)?)?;
            let dist = load_dist(&class, induced, &ctx.str_opt("dist", &cd.dist))?;
            let eps = ctx.req_f64("eps", *eps)?;
            let (elements, pair) = greedy_cover(&class, &dist, eps).map_err(validation)?;
            let radius = cover_radius(&class, &dist, &elements).map_err(validation)?;
            let results = json!({
                "eps": eps,
                "size": elements.len(),
                "elements": elements,
                "radius": radius,
                "embedding_dimension": pair.embedding.dimension,
            });
            let rows = vec![vec![
                "cover-size".into(),
                fmt17(eps),
                fmt17(elements.len() as f64),
                elements.join(";"),
            ]];
            Ok((results, Some(bound_table(rows))))
        }
        MeasureCmd::McUpper { cd, restarts } => {
            let (class, induced) = load_class(&ctx.req_str("class", &cd.class)?)?;
            let _dist = load_dist(&class, induced, &ctx.str_opt("dist", &cd.dist))?;
            let restarts = ctx.usize_or("restarts", *restarts, 4);
            let seed = ctx.seed_required("measure mc-upper")?;
            let result = mc_upper_heuristic(&class, restarts, seed).map_err(validation)?;
            let results = json!({
                "radius": result.radius,
                "min_margin": result.min_margin,
                "embedding_dimension": result.pair.embedding.dimension,
                "restarts": restarts,
            });
            let rows = vec![vec![
                "mc-upper".into(),
                fmt17(restarts as f64),
                fmt17(result.radius),
                String::new(),
            ]];
            Ok((results, Some(bound_table(rows))))
        }
        MeasureCmd::Vc { cd, cap } => {
            let (class, induced) = load_class(&ctx.req_str("class", &cd.class)?)?;
            let _dist = load_dist(&class, induced, &ctx.str_opt("dist", &cd.dist))?;
            let cap = ctx.usize_or("cap", *cap, 10);
            let result = vc_dimension(&class, cap).map_err(validation)?;
            let exact = matches!(result, VcResult::Exact(_));
            let results = json!({"vc": result.value(), "exact": exact, "cap": cap});
            let rows = vec![vec![
                "vc".into(),
                fmt17(cap as f64),
                fmt17(result.value() as f64),
                String::new(),
            ]];
            Ok((results, Some(bound_table(rows))))
        }
        MeasureCmd::AvgRank {
            cd,
            rank,
            rank_grid,
        } => {
            let (class, induced) = load_class(&ctx.req_str("class", &cd.class)?)?;
            let dist = load_dist(&class, induced, &ctx.str_opt("dist", &cd.dist))?;
            let ranks = match ctx.f64_list_opt("rank-grid", rank_grid)? {
                Some(grid) => grid.into_iter().map(|x| x as usize).collect(),
                None => vec![ctx.req_usize("rank", *rank)?],
            };
            let h = normalize_class(&class, &dist).map_err(validation)?;
            let mut entries = Vec::new();
            let mut rows = Vec::new();
            for &d in &ranks {
                let error = avg_rank_error_oracle(&h, &dist, d).map_err(validation)?;
                entries.push(json!({"rank": d, "error": error}));
                rows.push(vec![
                    "avg-rank-error".into(),
                    fmt17(d as f64),
                    fmt17(error),
                    String::new(),
                ]);
            }
            let results = if entries.len() == 1 {
                entries.pop().unwrap()
            } else {
                json!(entries)
            };
            Ok((results, Some(bound_table(rows))))
        }
        MeasureCmd::SmLogCount { n, d } => {
            let n = ctx.req_usize("n", *n)?;
            let d = ctx.req_usize("d", *d)?;
            let value = sign_matrix_log_count_bound(n, d).map_err(validation)?;
            let results = json!({"name": "sign-matrix-log-count", "n": n, "d": d, "value": value});
            let rows = vec![vec![
                "sign-matrix-log-count".into(),
                fmt17(d as f64),
                fmt17(value),
                String::new(),
            ]];
            Ok((results, Some(bound_table(rows))))
        }
    }
}
