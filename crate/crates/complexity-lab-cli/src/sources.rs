//! Input resolution: the flag/config-file merge, and parsers for class,
//! distribution, loss, and embedding-family sources (inline specs or JSON
//! files).

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use complexity_lab::constructions::{
    finite_restriction, one_sparse, parities, pattern_decision_list, zigzag_class_sample,
};
use complexity_lab::core::{
    normalize_class, DistributionOverX, FiniteHypothesisClass, LossKind, LossSpec,
};
use complexity_lab::embeddings::{Embedding, EmbeddingFamily, FamilyKind};

use crate::CliError;

/// Resolved run context: configuration-file values (lowest precedence),
/// with command-line flags layered on top by the accessor methods.
pub struct Ctx {
    cfg: Map<String, Value>,
    pub out: Option<PathBuf>,
    pub format: crate::report::Format,
    seed: Option<u64>,
    /// Echo of every parameter a command actually resolved.
    echo: std::cell::RefCell<Map<String, Value>>,
}

impl Ctx {
    pub fn new(
        config_path: &Option<PathBuf>,
        out: Option<PathBuf>,
        format: Option<crate::report::Format>,
        seed: Option<u64>,
    ) -> Result<Self, CliError> {
        let cfg = match config_path {
            None => Map::new(),
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    CliError::Validation(format!("cannot read config {}: {e}", path.display()))
                })?;
                let value: Value = serde_json::from_str(&text).map_err(|e| {
                    CliError::Validation(format!(
                        "malformed config {}: line {} column {}: {e}",
                        path.display(),
                        e.line(),
                        e.column()
                    ))
                })?;
                match value {
                    Value::Object(map) => map,
                    _ => {
                        return Err(CliError::Validation(format!(
                            "config {} must be a JSON object",
                            path.display()
                        )))
                    }
                }
            }
        };
        let out = out.or_else(|| {
            cfg.get("out")
                .and_then(Value::as_str)
                .map(PathBuf::from)
        });
        let format = format
            .or_else(|| match cfg.get("format").and_then(Value::as_str) {
                Some("json") => Some(crate::report::Format::Json),
                Some("csv") => Some(crate::report::Format::Csv),
                _ => None,
            })
            .unwrap_or(crate::report::Format::Json);
        let seed = seed.or_else(|| cfg.get("seed").and_then(Value::as_u64));
        Ok(Self {
            cfg,
            out,
            format,
            seed,
            echo: std::cell::RefCell::new(Map::new()),
        })
    }

    fn note(&self, key: &str, value: Value) {
        self.echo.borrow_mut().insert(key.to_string(), value);
    }

    /// The resolved-parameter echo for the report.
    pub fn config_echo(&self) -> Value {
        Value::Object(self.echo.borrow().clone())
    }

    pub fn str_opt(&self, key: &str, flag: &Option<String>) -> Option<String> {
        let v = flag
            .clone()
            .or_else(|| self.cfg.get(key).and_then(Value::as_str).map(String::from));
        if let Some(ref s) = v {
            self.note(key, Value::String(s.clone()));
        }
        v
    }

    pub fn req_str(&self, key: &str, flag: &Option<String>) -> Result<String, CliError> {
        self.str_opt(key, flag)
            .ok_or_else(|| CliError::Validation(format!("missing required --{key} (flag or config field \"{key}\")")))
    }

    pub fn f64_opt(&self, key: &str, flag: Option<f64>) -> Option<f64> {
        let v = flag.or_else(|| self.cfg.get(key).and_then(Value::as_f64));
        if let Some(x) = v {
            self.note(key, serde_json::json!(x));
        }
        v
    }

    pub fn req_f64(&self, key: &str, flag: Option<f64>) -> Result<f64, CliError> {
        self.f64_opt(key, flag)
            .ok_or_else(|| CliError::Validation(format!("missing required --{key} (flag or config field \"{key}\")")))
    }

    pub fn f64_or(&self, key: &str, flag: Option<f64>, default: f64) -> f64 {
        let v = self.f64_opt(key, flag).unwrap_or(default);
        self.note(key, serde_json::json!(v));
        v
    }

    pub fn usize_opt(&self, key: &str, flag: Option<usize>) -> Option<usize> {
        let v = flag.or_else(|| {
            self.cfg
                .get(key)
                .and_then(Value::as_u64)
                .map(|u| u as usize)
        });
        if let Some(x) = v {
            self.note(key, serde_json::json!(x));
        }
        v
    }

    pub fn req_usize(&self, key: &str, flag: Option<usize>) -> Result<usize, CliError> {
        self.usize_opt(key, flag)
            .ok_or_else(|| CliError::Validation(format!("missing required --{key} (flag or config field \"{key}\")")))
    }

    pub fn usize_or(&self, key: &str, flag: Option<usize>, default: usize) -> usize {
        let v = self.usize_opt(key, flag).unwrap_or(default);
        self.note(key, serde_json::json!(v));
        v
    }

    pub fn bool_or(&self, key: &str, flag: bool, default: bool) -> bool {
        let v = if flag {
            true
        } else {
            self.cfg
                .get(key)
                .and_then(Value::as_bool)
                .unwrap_or(default)
        };
        self.note(key, Value::Bool(v));
        v
    }

    /// Comma-separated float list, e.g. `--lambda-grid 0.5,0.75,1.0`.
    pub fn f64_list_opt(
        &self,
        key: &str,
        flag: &Option<String>,
    ) -> Result<Option<Vec<f64>>, CliError> {
        let raw = match flag.clone().or_else(|| {
            self.cfg.get(key).and_then(|v| match v {
                Value::String(s) => Some(s.clone()),
                Value::Array(items) => Some(
                    items
                        .iter()
                        .filter_map(Value::as_f64)
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(","),
                ),
                _ => None,
            })
        }) {
            None => return Ok(None),
            Some(r) => r,
        };
        let mut out = Vec::new();
        for part in raw.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            out.push(part.parse::<f64>().map_err(|_| {
                CliError::Validation(format!("--{key}: cannot parse '{part}' as a number"))
            })?);
        }
        if out.is_empty() {
            return Err(CliError::Validation(format!("--{key}: empty list")));
        }
        self.note(key, serde_json::json!(out));
        Ok(Some(out))
    }

    /// The master seed; an error for stochastic commands when absent.
    pub fn seed_required(&self, command: &str) -> Result<u64, CliError> {
        match self.seed {
            Some(s) => {
                self.note("seed", serde_json::json!(s));
                Ok(s)
            }
            None => Err(CliError::Validation(format!(
                "{command} is stochastic: a --seed is required"
            ))),
        }
    }

    pub fn seed_opt(&self) -> Option<u64> {
        if let Some(s) = self.seed {
            self.note("seed", serde_json::json!(s));
        }
        self.seed
    }
}

// ---------------------------------------------------------------------------
// Class and distribution sources
// ---------------------------------------------------------------------------

fn parse_args(spec: &str) -> (String, Vec<String>) {
    match spec.split_once(':') {
        None => (spec.to_string(), Vec::new()),
        Some((name, rest)) => (
            name.to_string(),
            rest.split(',').map(|s| s.trim().to_string()).collect(),
        ),
    }
}

fn arg_usize(args: &[String], i: usize, what: &str, spec: &str) -> Result<usize, CliError> {
    args.get(i)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| CliError::Validation(format!("{spec}: missing or bad {what}")))
}

fn arg_u64(args: &[String], i: usize, what: &str, spec: &str) -> Result<u64, CliError> {
    args.get(i)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| CliError::Validation(format!("{spec}: missing or bad {what}")))
}

/// Load a class from an inline constructor spec or a JSON file. Inline
/// forms: `parities:N`, `one-sparse:N`, `decision-list:N,K`,
/// `zigzag-restriction:N,T,POINTS,SEED`. A file may be either a bare class
/// file or a report produced by `construct` (its `results` field is used).
/// The second component is a distribution induced by the construction, if
/// any.
pub fn load_class(
    spec: &str,
) -> Result<(FiniteHypothesisClass, Option<DistributionOverX>), CliError> {
    if Path::new(spec).exists() {
        let text = fs::read_to_string(spec)
            .map_err(|e| CliError::Validation(format!("cannot read {spec}: {e}")))?;
        let value: Value = serde_json::from_str(&text).map_err(|e| {
            CliError::Validation(format!(
                "{spec}: malformed JSON at line {} column {}: {e}",
                e.line(),
                e.column()
            ))
        })?;
        let payload = match value.get("results") {
            Some(results) => serde_json::to_string(results)
                .map_err(|e| CliError::Validation(format!("{spec}: {e}")))?,
            None => text,
        };
        let class = FiniteHypothesisClass::from_json(&payload)
            .map_err(|e| CliError::Validation(format!("{spec}: {e}")))?;
        return Ok((class, None));
    }

    let (name, args) = parse_args(spec);
    match name.as_str() {
        "parities" => {
            let n = arg_usize(&args, 0, "bit count N (parities:N)", spec)?;
            Ok((parities(n).map_err(validation)?, None))
        }
        "one-sparse" => {
            let n = arg_usize(&args, 0, "dimension N (one-sparse:N)", spec)?;
            Ok((one_sparse(n).map_err(validation)?, None))
        }
        "decision-list" => {
            let n = arg_usize(&args, 0, "bit count N (decision-list:N,K)", spec)?;
            let k = arg_usize(&args, 1, "list length K (decision-list:N,K)", spec)?;
            Ok((pattern_decision_list(n, k).map_err(validation)?, None))
        }
        "zigzag-restriction" => {
            let n = arg_usize(&args, 0, "input dimension N", spec)?;
            let t = arg_usize(&args, 1, "hypothesis count T", spec)?;
            let points = arg_usize(&args, 2, "point count POINTS", spec)?;
            let seed = arg_u64(&args, 3, "seed SEED", spec)?;
            let f = zigzag_class_sample(n, t, seed);
            let (class, dist) = finite_restriction(&f, points, seed).map_err(validation)?;
            Ok((class, Some(dist)))
        }
        other => Err(CliError::Validation(format!(
            "unknown class '{other}': expected a file path or one of \
             parities:N, one-sparse:N, decision-list:N,K, zigzag-restriction:N,T,POINTS,SEED"
        ))),
    }
}

fn validation<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Validation(e.to_string())
}

/// Load a distribution: `uniform` (default), or a JSON file aligned to the
/// class domain. `induced` is the construction-provided distribution, used
/// when the spec is absent or explicitly `induced`.
pub fn load_dist(
    class: &FiniteHypothesisClass,
    induced: Option<DistributionOverX>,
    spec: &Option<String>,
) -> Result<DistributionOverX, CliError> {
    match spec.as_deref() {
        None => Ok(induced.unwrap_or_else(|| DistributionOverX::uniform(class.num_points()))),
        Some("uniform") => Ok(DistributionOverX::uniform(class.num_points())),
        Some("induced") => induced.ok_or_else(|| {
            CliError::Validation("this class source does not induce a distribution".into())
        }),
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Validation(format!("cannot read {path}: {e}")))?;
            DistributionOverX::from_json(&text, class.domain_labels()).map_err(validation)
        }
    }
}

/// Parse a loss name.
pub fn parse_loss(name: &str) -> Result<LossSpec, CliError> {
    match name.to_ascii_lowercase().replace('_', "-").as_str() {
        "zero-one" | "zeroone" | "01" => Ok(LossSpec::zero_one()),
        "margin" => Ok(LossSpec::margin()),
        "hinge" => Ok(LossSpec::hinge()),
        "squared" => Ok(LossSpec::squared()),
        other => Err(CliError::Validation(format!(
            "unknown loss '{other}': expected zero-one | margin | hinge | squared"
        ))),
    }
}

pub fn loss_kind_of(name: &str) -> Result<LossKind, CliError> {
    Ok(parse_loss(name)?.kind)
}

/// Build an embedding family from an inline spec: `identity`, `svd:D`,
/// `jl:D`, or `cover:EPS,D`.
pub fn build_family(
    spec: &str,
    class: &FiniteHypothesisClass,
    dist: &DistributionOverX,
    master_seed: u64,
) -> Result<EmbeddingFamily, CliError> {
    let (name, args) = parse_args(spec);
    let kind = match name.as_str() {
        "identity" => FamilyKind::Identity {
            domain_labels: class.domain_labels().to_vec(),
        },
        "svd" => {
            let d = arg_usize(&args, 0, "target dimension D (svd:D)", spec)?;
            FamilyKind::SvdOptimal {
                class: normalize_class(class, dist).map_err(validation)?,
                d,
            }
        }
        "jl" => {
            let d = arg_usize(&args, 0, "target dimension D (jl:D)", spec)?;
            FamilyKind::JlGaussian {
                base: Box::new(Embedding::identity_onehot(class.domain_labels().to_vec())),
                d_target: d,
            }
        }
        "cover" => {
            let eps: f64 = args
                .first()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| CliError::Validation(format!("{spec}: missing or bad EPS")))?;
            let d = arg_usize(&args, 1, "prefix length D (cover:EPS,D)", spec)?;
            FamilyKind::CoverPrefix {
                class: class.clone(),
                distribution: dist.clone(),
                eps,
                d,
            }
        }
        other => {
            return Err(CliError::Validation(format!(
                "unknown family '{other}': expected identity | svd:D | jl:D | cover:EPS,D"
            )))
        }
    };
    Ok(EmbeddingFamily { kind, master_seed })
}

/// Build a dimension-indexed family generator for minimal-dimension
/// searches: `svd`, `jl`, or `cover:EPS` (no fixed D).
pub fn build_family_generator(
    spec: &str,
    class: &FiniteHypothesisClass,
    dist: &DistributionOverX,
    master_seed: u64,
) -> Result<Box<dyn Fn(usize) -> EmbeddingFamily>, CliError> {
    let (name, args) = parse_args(spec);
    match name.as_str() {
        "svd" => {
            let normalized = normalize_class(class, dist).map_err(validation)?;
            Ok(Box::new(move |d| EmbeddingFamily {
                kind: FamilyKind::SvdOptimal {
                    class: normalized.clone(),
                    d,
                },
                master_seed,
            }))
        }
        "jl" => {
            let base = Embedding::identity_onehot(class.domain_labels().to_vec());
            Ok(Box::new(move |d| EmbeddingFamily {
                kind: FamilyKind::JlGaussian {
                    base: Box::new(base.clone()),
                    d_target: d,
                },
                master_seed,
            }))
        }
        "cover" => {
            let eps: f64 = args
                .first()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| CliError::Validation(format!("{spec}: missing or bad EPS")))?;
            let class = class.clone();
            let dist = dist.clone();
            Ok(Box::new(move |d| EmbeddingFamily {
                kind: FamilyKind::CoverPrefix {
                    class: class.clone(),
                    distribution: dist.clone(),
                    eps,
                    d,
                },
                master_seed,
            }))
        }
        other => Err(CliError::Validation(format!(
            "family '{other}' cannot be dimension-swept: expected svd | jl | cover:EPS"
        ))),
    }
}
