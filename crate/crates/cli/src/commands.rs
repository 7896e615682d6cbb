use std::io::Read;
use std::process::ExitCode;

use affrank::classify::{
    classify_r1, core_space, equiv_decide, kw_invariant, reduce_to_canonical, rough_reduce, EquivOptions,
};
use affrank::oracle::{
    verify_bound, verify_classification, verify_facts, verify_maximality, verify_nonisotropy, DEFAULT_ORACLE_BUDGET,
};
use affrank::quadform::DEFAULT_SEARCH_BUDGET;
use affrank::space::{
    alternate_space, construct_canonical, construct_intro_example, embed_inp, vee, DEFAULT_LRK_BUDGET,
};
use affrank::{AffineSubspace, CanonicalFamilySpec, Error, FieldSpec, Matrix, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::output::{emit, report_error, usage_error, EXIT_INCONCLUSIVE, EXIT_OK, EXIT_USAGE};
use crate::{Cli, Command, ConstructKind, VerifyTarget};

/// A failure before any computation: bad flags rather than bad data.
struct Usage(String);

enum Failure {
    Usage(Usage),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<Usage> for Failure {
    fn from(u: Usage) -> Self {
        Failure::Usage(u)
    }
}

/// Output value plus the exit code to use (nonzero for partial reports).
type Outcome = std::result::Result<(Value, u8), Failure>;

fn need(v: Option<usize>, flag: &str) -> std::result::Result<usize, Usage> {
    v.ok_or_else(|| Usage(format!("missing required flag {flag}")))
}

fn budget(cli: &Cli, default: u64) -> u64 {
    cli.budget.unwrap_or(default)
}

fn read_input(cli: &Cli) -> Result<String> {
    let mut s = String::new();
    match &cli.input {
        Some(path) => {
            s = std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?
        }
        None => {
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Error::InvalidInput(format!("cannot read stdin: {e}")))?;
        }
    }
    Ok(s)
}

fn read_space(cli: &Cli) -> Result<AffineSubspace> {
    AffineSubspace::from_json(&read_input(cli)?)
}

fn read_pair(cli: &Cli) -> Result<(AffineSubspace, AffineSubspace)> {
    let pair: Vec<AffineSubspace> = serde_json::from_str(&read_input(cli)?)?;
    match <[AffineSubspace; 2]>::try_from(pair) {
        Ok([a, b]) => Ok((a, b)),
        Err(v) => Err(Error::InvalidInput(format!("expected a JSON array of 2 spaces, got {}", v.len()))),
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

pub fn run(cli: &Cli) -> ExitCode {
    let outcome = FieldSpec::new(cli.field).map_err(Failure::from).and_then(|f| dispatch(cli, f));
    match outcome {
        Ok((value, code)) => {
            emit(&value, cli.table);
            ExitCode::from(code)
        }
        Err(Failure::Usage(Usage(msg))) => {
            usage_error(&msg);
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Lib(e)) => ExitCode::from(report_error(&e)),
    }
}

fn dispatch(cli: &Cli, f: FieldSpec) -> Outcome {
    match &cli.command {
        Command::Construct(a) => {
            let space = match a.kind {
                ConstructKind::Canonical => {
                    if a.parts.is_empty() {
                        return Err(Usage("construct canonical needs --parts".into()).into());
                    }
                    let b = budget(cli, DEFAULT_SEARCH_BUDGET);
                    construct_canonical(&CanonicalFamilySpec::from_parts(&a.parts, None, f, b)?, b)?
                }
                ConstructKind::Intro => construct_intro_example(need(a.n, "--n")?, need(a.p, "--p")?, need(a.r, "--r")?, f)?,
                ConstructKind::Alternate => alternate_space(need(a.n, "--n")?, f),
                ConstructKind::Vee => {
                    let (x, y) = read_pair(cli)?;
                    vee(&x, &y)?
                }
                ConstructKind::Embed => {
                    let (n, p) = (need(a.n, "--n")?, need(a.p, "--p")?);
                    embed_inp(&read_space(cli)?, n, p)?
                }
            };
            Ok((to_value(&space)?, EXIT_OK))
        }
        Command::Analyze(a) => analyze(cli, read_space(cli)?, a.r),
        Command::Classify(a) => {
            let v = read_space(cli)?;
            let b = budget(cli, DEFAULT_LRK_BUDGET);
            let r = match a.r {
                Some(r) => r,
                None => v.lrk(b)?,
            };
            if r == 1 && v.rows().min(v.cols()) > 1 {
                if v.lrk(b)? != 1 {
                    return Err(Error::NotExtremal("lower rank is not 1".into()).into());
                }
                return Ok((to_value(&classify_r1(&v)?)?, EXIT_OK));
            }
            let witness = reduce_to_canonical(&v, r, b)?;
            Ok((to_value(&witness)?, EXIT_OK))
        }
        Command::Verify(a) => {
            let b = budget(cli, DEFAULT_ORACLE_BUDGET);
            let value = match a.target {
                VerifyTarget::Bound => to_value(&verify_bound(need(a.n, "--n")?, need(a.p, "--p")?, need(a.r, "--r")?, f, b)?)?,
                VerifyTarget::Classification => {
                    to_value(&verify_classification(need(a.n, "--n")?, need(a.p, "--p")?, need(a.r, "--r")?, f, b)?)?
                }
                VerifyTarget::Maximality => to_value(&verify_maximality(need(a.r, "--r")?, f, b)?)?,
                VerifyTarget::Facts => to_value(&verify_facts(need(a.n, "--n")?, f, a.samples, cli.seed, b)?)?,
                VerifyTarget::Nonisotropy => to_value(&verify_nonisotropy(need(a.n, "--n")?, f, b)?)?,
            };
            Ok((value, EXIT_OK))
        }
        Command::Shuffle => {
            let v = read_space(cli)?;
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let p = Matrix::random_invertible(v.field(), v.rows(), &mut rng);
            let q = Matrix::random_invertible(v.field(), v.cols(), &mut rng);
            Ok((to_value(&v.transform(&p, &q)?)?, EXIT_OK))
        }
        Command::Equiv => {
            let (s, t) = read_pair(cli)?;
            let opts = EquivOptions { budget: budget(cli, DEFAULT_SEARCH_BUDGET), prefilter: true };
            let value = match equiv_decide(&s, &t, opts)? {
                Some((p, q)) => json!({ "equivalent": true, "P": p, "Q": q }),
                None => json!({ "equivalent": false }),
            };
            Ok((value, EXIT_OK))
        }
    }
}

/// Full invariant report. A budget overrun still prints what was computed,
/// flagged `inconclusive`, and exits 3.
fn analyze(cli: &Cli, v: AffineSubspace, r: Option<usize>) -> Outcome {
    let b = budget(cli, DEFAULT_LRK_BUDGET);
    let mut report = json!({
        "field": v.field().order(),
        "rows": v.rows(),
        "cols": v.cols(),
        "dim": v.dim(),
        "codim": v.codim(),
        "linear": v.is_linear(),
        "kw_dim": kw_invariant(&v.translation()).dim(),
        "kw_transpose_dim": kw_invariant(&v.transpose().translation()).dim(),
    });
    let mut inconclusive = false;
    let lrk = match v.lrk(b) {
        Ok(l) => {
            report["lrk"] = json!(l);
            Some(l)
        }
        Err(Error::LrkBudgetExceeded { upper_bound, .. }) => {
            inconclusive = true;
            report["lrk"] = Value::Null;
            report["lrk_upper_bound"] = json!(upper_bound);
            None
        }
        Err(e) => return Err(e.into()),
    };
    match (v.rank_histogram(b), v.translation().rank_histogram(b)) {
        (Ok(h), Ok(t)) => {
            report["rank_counts"] = json!(h);
            report["translation_rank_counts"] = json!(t);
        }
        _ => {
            inconclusive = true;
            report["rank_counts"] = Value::Null;
            report["translation_rank_counts"] = Value::Null;
        }
    }
    match r.or(lrk).filter(|&r| r > 0) {
        Some(r) => match rough_reduce(&v, r, b).and_then(|red| core_space(&red.reduced, r)) {
            Ok(core) => report["core"] = json!({ "r": r, "dim_core": core.dim_core, "dim_h": core.dim_h }),
            Err(e @ (Error::BudgetExceeded { .. } | Error::Inconclusive { .. })) => {
                inconclusive = true;
                report["core"] = json!({ "r": r, "error": e.kind() });
            }
            Err(e) => report["core"] = json!({ "r": r, "error": e.kind(), "message": e.to_string() }),
        },
        None => report["core"] = Value::Null,
    }
    report["inconclusive"] = json!(inconclusive);
    Ok((report, if inconclusive { EXIT_INCONCLUSIVE } else { EXIT_OK }))
}
