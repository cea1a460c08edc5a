//! The `construct` command: build a hypothesis class and emit its JSON
//! table (reloadable by every other command).

use clap::Args;
use serde_json::{json, Value};

use crate::report::{fmt17, Table};
use crate::sources::{load_class, Ctx};
use crate::CliError;

#[derive(Args, Debug)]
pub struct ConstructArgs {
    /// Class name or inline spec: parities, one-sparse, decision-list,
    /// zigzag-restriction — with parameters either inline (parities:3) or
    /// via the flags below.
    #[arg(long)]
    pub class: Option<String>,
    /// Bit count / input dimension N.
    #[arg(long)]
    pub n: Option<usize>,
    /// Decision-list length K.
    #[arg(long)]
    pub k: Option<usize>,
    /// Sampled hypothesis count T (zigzag-restriction).
    #[arg(long)]
    pub t: Option<usize>,
    /// Restriction point count (zigzag-restriction).
    #[arg(long)]
    pub points: Option<usize>,
}

/// Assemble an inline spec from the name plus parameter flags, so
/// `construct --class parities --n 3` and `--class parities:3` agree.
fn assemble_spec(ctx: &Ctx, args: &ConstructArgs) -> Result<String, CliError> {
    let name = ctx.req_str("class", &args.class)?;
    if name.contains(':') {
        return Ok(name);
    }
    match name.as_str() {
        "parities" | "one-sparse" => {
            let n = ctx.req_usize("n", args.n)?;
            Ok(format!("{name}:{n}"))
        }
        "decision-list" => {
            let n = ctx.req_usize("n", args.n)?;
            let k = ctx.req_usize("k", args.k)?;
            Ok(format!("{name}:{n},{k}"))
        }
        "zigzag-restriction" => {
            let n = ctx.req_usize("n", args.n)?;
            let t = ctx.req_usize("t", args.t)?;
            let points = ctx.req_usize("points", args.points)?;
            let seed = ctx.seed_required("construct zigzag-restriction")?;
            Ok(format!("{name}:{n},{t},{points},{seed}"))
        }
        other => Err(CliError::Validation(format!(
            "unknown class '{other}': expected parities | one-sparse | \
             decision-list | zigzag-restriction (or an inline spec / file path)"
        ))),
    }
}

pub fn run(ctx: &Ctx, args: &ConstructArgs) -> Result<(Value, Option<Table>), CliError> {
    let spec = assemble_spec(ctx, args)?;
    let (class, _induced) = load_class(&spec)?;
    let payload: Value = serde_json::from_str(&class.to_json())
        .map_err(|e| CliError::Validation(format!("class serialization failed: {e}")))?;

    let mut header = vec!["hypothesis".to_string()];
    header.extend(class.domain_labels().iter().cloned());
    let rows = (0..class.num_hypotheses())
        .map(|h| {
            let mut row = vec![class.hypothesis_labels()[h].clone()];
            row.extend((0..class.num_points()).map(|x| fmt17(class.value(h, x))));
            row
        })
        .collect();
    let table = Table { header, rows };
    Ok((json!(payload), Some(table)))
}
