//! The `learn` command: Monte Carlo simulation of the four learning modes
//! over random realizable samples.

use clap::Args;
use serde_json::{json, Value};

use complexity_lab::learners::{simulate_learning, ErmOptions, LearningMode, LearningSimSpec};

use crate::report::{fmt17, Table};
use crate::sources::{build_family, load_class, load_dist, parse_loss, Ctx};
use crate::CliError;

#[derive(Args, Debug)]
pub struct LearnArgs {
    /// Learning mode: Lin | gLin | Ker | gKer.
    #[arg(long)]
    pub mode: Option<String>,
    /// Class source (inline spec or JSON file).
    #[arg(long)]
    pub class: Option<String>,
    /// Distribution: uniform (default), induced, or JSON file.
    #[arg(long)]
    pub dist: Option<String>,
    /// Loss: zero-one | margin | hinge | squared.
    #[arg(long)]
    pub loss: Option<String>,
    /// Embedding family: identity | svd:D | jl:D | cover:EPS,D.
    #[arg(long)]
    pub family: Option<String>,
    /// Sample size m.
    #[arg(long)]
    pub m: Option<usize>,
    /// Trials per target hypothesis.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Weight-ball radius (required by Ker and gKer).
    #[arg(long)]
    pub radius: Option<f64>,
    /// Subgradient restarts for surrogate solvers.
    #[arg(long)]
    pub erm_restarts: Option<usize>,
    /// Subgradient iteration budget.
    #[arg(long)]
    pub erm_iterations: Option<usize>,
}

pub fn run(ctx: &Ctx, args: &LearnArgs) -> Result<(Value, Option<Table>, f64, f64), CliError> {
    let mode_name = ctx.req_str("mode", &args.mode)?;
    let mode = LearningMode::parse(&mode_name).ok_or_else(|| {
        CliError::Validation(format!(
            "unknown mode '{mode_name}': expected Lin | gLin | Ker | gKer"
        ))
    })?;
    let (class, induced) = load_class(&ctx.req_str("class", &args.class)?)?;
    let dist = load_dist(&class, induced, &ctx.str_opt("dist", &args.dist))?;
    let loss = parse_loss(&ctx.req_str("loss", &args.loss)?)?;
    let seed = ctx.seed_required("learn")?;
    let family = build_family(
        &ctx.req_str("family", &args.family)?,
        &class,
        &dist,
        seed,
    )?;
    let sample_size = ctx.req_usize("m", args.m)?;
    let trials = ctx.usize_or("trials", args.trials, 20);
    let radius = ctx.f64_opt("radius", args.radius);

    let mut erm = ErmOptions::default();
    if let Some(r) = ctx.usize_opt("erm-restarts", args.erm_restarts) {
        erm.restarts = r;
    }
    if let Some(iters) = ctx.usize_opt("erm-iterations", args.erm_iterations) {
        erm.max_iterations = iters;
    }

    let spec = LearningSimSpec {
        mode,
        class,
        distribution: dist,
        loss: loss.clone(),
        family,
        sample_size,
        trials,
        radius,
        seed,
        erm,
    };
    let report = simulate_learning(&spec).map_err(|e| CliError::Validation(e.to_string()))?;

    let rows = report
        .records
        .iter()
        .map(|r| {
            vec![
                r.mode.name().to_string(),
                r.sample_size.to_string(),
                r.trial.to_string(),
                r.hypothesis_id.clone(),
                fmt17(r.empirical_loss),
                fmt17(r.population_criterion),
                fmt17(r.bound_term),
                r.seed.to_string(),
            ]
        })
        .collect();
    let table = Table {
        header: vec![
            "mode".into(),
            "sample_size".into(),
            "trial".into(),
            "hypothesis".into(),
            "empirical_loss".into(),
            "population_criterion".into(),
            "bound_term".into(),
            "seed".into(),
        ],
        rows,
    };
    Ok((json!(report), Some(table), loss.c_dc, loss.c_mc))
}
