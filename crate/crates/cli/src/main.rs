use clap::{Args, Parser, Subcommand, ValueEnum};
use qslocc4::classifier::{Classifier, Verdict};
use qslocc4::covariants::Catalog;
use qslocc4::invariants::DEFAULT_TOL;
use qslocc4::normal_forms::{specialize, FamilyId, Specialization};
use qslocc4::oracles::{selftest, KNOWN_CONFLICTS};
use qslocc4::report::{invariants_any, pretty_type, strata_any};
use qslocc4::scalar::{Backend, Scalar};
use qslocc4::state::{parse_state, AnyState};
use qslocc4::Error;
use rayon::prelude::*;
use serde_json::{json, Value};
use std::process::ExitCode;

/// Exact SLOCC classification of four-qubit states.
#[derive(Parser)]
#[command(name = "qslocc4", version)]
struct Cli {
    /// Arithmetic backend; exact is used whenever the input parses exactly.
    #[arg(long, global = true, value_enum)]
    backend: Option<BackendArg>,
    /// Relative zero tolerance of the float backend.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Exact,
    Float,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Pretty,
}

#[derive(Subcommand)]
enum Command {
    /// Verstraete type with the decision trace.
    Classify(Input),
    /// Generator and derived invariants, quartics and root profiles.
    Invariants(Input),
    /// Dual-variety strata, multirank and so(8) identity checks.
    Strata(Input),
    /// Generate a normal form: `gen G 1 0 0 1`, `gen L_abc2 1 2 --spec c=b`.
    Gen {
        family: String,
        #[arg(allow_negative_numbers = true)]
        params: Vec<String>,
        /// Specialization constraint such as `c=d` or `a=b=0`; repeatable.
        #[arg(long = "spec")]
        spec: Vec<String>,
    },
    /// SLOCC equivalence up to qubit permutation.
    Equiv {
        /// First state: a JSON literal or a file path.
        first: String,
        /// Second state: a JSON literal or a file path.
        second: String,
    },
    /// Run the embedded oracle suites.
    Selftest,
}

#[derive(Args)]
struct Input {
    /// State file (or `-` for stdin), or a JSON literal.
    path: Option<String>,
    /// State given inline as JSON.
    #[arg(long, conflicts_with_all = ["path", "batch"])]
    inline: Option<String>,
    /// File with one JSON state per line; results are printed in input order.
    #[arg(long, conflicts_with = "path")]
    batch: Option<String>,
}

/// Failure kinds, mapped to exit codes 1 and 2.
enum Failure {
    Classification(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NoMatch(_) | Error::Unsupported(_) => Failure::Classification(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn read_source(src: &str) -> Result<String, Failure> {
    if src.trim_start().starts_with('{') {
        return Ok(src.to_string());
    }
    if src == "-" {
        let mut buf = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut buf)
            .map_err(|e| Failure::Usage(format!("stdin: {e}")))?;
        return Ok(buf);
    }
    std::fs::read_to_string(src).map_err(|e| Failure::Usage(format!("cannot read {src}: {e}")))
}

fn backend(cli: &Cli) -> Option<Backend> {
    cli.backend.map(|b| match b {
        BackendArg::Exact => Backend::Exact,
        BackendArg::Float => Backend::Float,
    })
}

fn parse(cli: &Cli, text: &str) -> Result<AnyState, Failure> {
    Ok(parse_state(text.trim(), backend(cli))?)
}

fn emit(cli: &Cli, v: &Value) {
    match cli.format {
        Format::Json => println!("{v}"),
        Format::Pretty => println!("{}", serde_json::to_string_pretty(v).expect("serializable")),
    }
}

fn classifier(cli: &Cli) -> Result<Classifier, Failure> {
    let catalog = Catalog::load().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(Classifier::new(catalog, cli.tol))
}

fn analyse(cli: &Cli, c: Option<&Classifier>, state: &AnyState) -> Result<(Value, String), Failure> {
    match &cli.command {
        Command::Classify(_) => {
            let r = c.expect("classifier loaded").classify_any(state)?;
            Ok((serde_json::to_value(&r).expect("serializable"), pretty_type(&r)))
        }
        Command::Invariants(_) => {
            let v = invariants_any(state, cli.tol);
            let text = serde_json::to_string_pretty(&v).expect("serializable");
            Ok((v, text))
        }
        _ => {
            let v = strata_any(state, cli.tol);
            let text = serde_json::to_string_pretty(&v).expect("serializable");
            Ok((v, text))
        }
    }
}

fn run_input(cli: &Cli, input: &Input) -> Result<(), Failure> {
    let c = match cli.command {
        Command::Classify(_) => Some(classifier(cli)?),
        _ => None,
    };
    if let Some(batch) = &input.batch {
        let text = read_source(batch)?;
        let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
        let results: Vec<Result<Value, Failure>> =
            lines.par_iter().map(|line| analyse(cli, c.as_ref(), &parse(cli, line)?).map(|(v, _)| v)).collect();
        let mut worst = None;
        for r in results {
            match r {
                Ok(v) => println!("{v}"),
                Err(Failure::Classification(e)) => {
                    println!("{}", json!({ "error": e }));
                    worst.get_or_insert(Failure::Classification(e.clone()));
                }
                Err(Failure::Usage(e)) => {
                    println!("{}", json!({ "error": e }));
                    worst = Some(Failure::Usage(e));
                }
            }
        }
        return worst.map_or(Ok(()), Err);
    }
    let text = match (&input.inline, &input.path) {
        (Some(t), _) => t.clone(),
        (None, Some(p)) => read_source(p)?,
        (None, None) => return Err(Failure::Usage("expected a state: a path, --inline or --batch".into())),
    };
    let (v, pretty) = analyse(cli, c.as_ref(), &parse(cli, &text)?)?;
    match cli.format {
        Format::Json => println!("{v}"),
        Format::Pretty => print!("{pretty}"),
    }
    Ok(())
}

fn gen(cli: &Cli, family: &str, params: &[String], spec: &[String]) -> Result<(), Failure> {
    let id = FamilyId::parse(family)?;
    let spec = Specialization(spec.to_vec());
    let b = backend(cli).unwrap_or(Backend::Exact);
    let scalars = params.iter().map(|p| Scalar::parse(p, b)).collect::<Result<Vec<_>, _>>()?;
    let state = match b {
        Backend::Exact => {
            let v: Vec<_> = scalars
                .into_iter()
                .map(|s| match s {
                    Scalar::Exact(g) => g,
                    Scalar::Float(_) => unreachable!("parsed exactly"),
                })
                .collect();
            AnyState::Exact(specialize(id, &spec, &v)?)
        }
        Backend::Float => {
            let v: Vec<_> = scalars.iter().map(|s| s.to_complex()).collect();
            AnyState::Float(specialize(id, &spec, &v)?)
        }
    };
    emit(cli, &state.to_json());
    Ok(())
}

fn equiv(cli: &Cli, first: &str, second: &str) -> Result<(), Failure> {
    let c = classifier(cli)?;
    let s = parse(cli, &read_source(first)?)?;
    let t = parse(cli, &read_source(second)?)?;
    let e = match (&s, &t) {
        (AnyState::Exact(s), AnyState::Exact(t)) => c.equivalent(s, t)?,
        _ => c.equivalent(&s.to_float(), &t.to_float())?,
    };
    let v = json!({
        "equivalent": match e.verdict {
            Verdict::Equivalent => json!(true),
            Verdict::Inequivalent => json!(false),
            Verdict::Undecided => Value::Null,
        },
        "verdict": e.verdict,
        "reason": e.reason,
        "permutation": e.permutation,
    });
    match cli.format {
        Format::Json => println!("{v}"),
        Format::Pretty => println!("{:?}: {}", e.verdict, e.reason),
    }
    Ok(())
}

fn run_selftest(cli: &Cli) -> Result<(), Failure> {
    let c = classifier(cli)?;
    let r = selftest(&c);
    let known: Vec<Value> =
        KNOWN_CONFLICTS.iter().map(|(case, label, why)| json!({ "case": case, "row": label, "reason": why })).collect();
    match cli.format {
        Format::Json => {
            println!("{}", json!({ "suites": r.suites, "known_conflicts": known, "passed": r.all_passed() }))
        }
        Format::Pretty => {
            for s in &r.suites {
                println!("{:<24} {:>4} passed {:>3} failed", s.name, s.passed, s.failed);
                for f in &s.failures {
                    println!("    FAIL {f}");
                }
                for k in &s.known {
                    println!("    known conflict: {k}");
                }
            }
        }
    }
    if r.all_passed() {
        Ok(())
    } else {
        Err(Failure::Classification("self-test failures".into()))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Classify(i) | Command::Invariants(i) | Command::Strata(i) => run_input(&cli, i),
        Command::Gen { family, params, spec } => gen(&cli, family, params, spec),
        Command::Equiv { first, second } => equiv(&cli, first, second),
        Command::Selftest => run_selftest(&cli),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Classification(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
