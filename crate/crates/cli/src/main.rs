use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use qp_conformal::orthogonal::orbit_classify;
use qp_conformal::padic::DEFAULT_PRECISION;
use qp_conformal::symmetry::{
    chain_descent, conformal_symmetry_verdict, CharacterChooser, FromList, MassiveAt, NullFirst,
};
use qp_conformal::verify::{run_suites, Suite};
use qp_conformal::{Error, Qp, QuadSpace};

const SCHEMA: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "qpconf", version, about = "p-adic quadratic spaces, orbits and conformal-symmetry checks")]
struct Cli {
    /// The prime p.
    #[arg(long, global = true, default_value_t = 5)]
    prime: u64,
    /// Working precision in p-adic digits.
    #[arg(long, global = true, env = "PADIC_PRECISION", default_value_t = DEFAULT_PRECISION)]
    precision: u32,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Samples per sampled identity.
    #[arg(long, global = true, default_value_t = 500)]
    samples: usize,
    /// Write JSON here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Orbit class of a vector under SO(V).
    Classify {
        /// Diagonal entries "a1,a2,..." as rationals n/d, or "anisotropic4".
        #[arg(long, default_value = "1,-1,1", allow_hyphen_values = true)]
        space: String,
        #[arg(long, allow_hyphen_values = true)]
        vec: String,
    },
    /// Run identity suites.
    Verify {
        /// cocycle, multiplier, embed, spin, chart, galilean, orbit, symmetry or all.
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Descend through stabilizers of chosen characters.
    Chain {
        #[arg(long, default_value = "1,-1,1,-1,1,-1,1,-1", allow_hyphen_values = true)]
        space: String,
        /// null-first, massive-at-K, or from-file:PATH (one vector per line).
        #[arg(long, default_value = "null-first")]
        chooser: String,
    },
}

enum Failure {
    Usage(String),
    Math(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(m) => Failure::Usage(m),
            e @ (Error::NotPrime(_) | Error::PrecisionTooSmall(..)) => Failure::Usage(e.to_string()),
            other => Failure::Math(other),
        }
    }
}

fn parse_space(qp: &Qp, s: &str) -> Result<QuadSpace, Failure> {
    if s.trim() == "anisotropic4" {
        return Ok(QuadSpace::anisotropic_quaternary(qp)?);
    }
    let diag = qp.parse_list(s)?;
    if diag.is_empty() {
        return Err(Failure::Usage("empty --space".into()));
    }
    Ok(QuadSpace::new(qp, diag)?)
}

fn parse_chooser(qp: &Qp, s: &str) -> Result<(Box<dyn CharacterChooser>, String), Failure> {
    if s == "null-first" {
        return Ok((Box::new(NullFirst), s.to_string()));
    }
    if let Some(k) = s.strip_prefix("massive-at-") {
        let k: usize = k
            .parse()
            .map_err(|_| Failure::Usage(format!("bad stage in chooser {s:?}")))?;
        return Ok((Box::new(MassiveAt(k)), s.to_string()));
    }
    if let Some(path) = s.strip_prefix("from-file:") {
        let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{path}: {e}")))?;
        let choices = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| qp.parse_list(l))
            .collect::<Result<Vec<_>, _>>()?;
        return Ok((Box::new(FromList(choices)), "from-file".to_string()));
    }
    Err(Failure::Usage(format!("unknown chooser {s:?}")))
}

fn header(cli: &Cli, command: &str) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("schema".into(), json!(SCHEMA));
    m.insert("command".into(), json!(command));
    m.insert("prime".into(), json!(cli.prime));
    m.insert("precision".into(), json!(cli.precision));
    m
}

fn strings(xs: &[qp_conformal::Padic]) -> Vec<String> {
    xs.iter().map(ToString::to_string).collect()
}

/// Returns the report and whether every identity held.
fn run(cli: &Cli) -> Result<(Value, bool), Failure> {
    let qp = Qp::new(cli.prime, cli.precision)?;
    match &cli.command {
        Command::Classify { space, vec } => {
            let space = parse_space(&qp, space)?;
            let v = qp.parse_list(vec)?;
            if v.len() != space.dim() {
                return Err(Failure::Usage(format!(
                    "--vec has {} entries but the space has dimension {}",
                    v.len(),
                    space.dim()
                )));
            }
            let class = orbit_classify(&space, &v)?;
            let mut out = header(cli, "classify");
            out.insert("space".into(), json!(strings(space.diag())));
            out.insert("vec".into(), json!(strings(&v)));
            if let Value::Object(fields) = serde_json::to_value(&class).expect("serializable") {
                out.extend(fields);
            }
            Ok((Value::Object(out), true))
        }
        Command::Verify { suite } => {
            let suites = Suite::parse(suite)?;
            let reports = run_suites(&qp, &suites, cli.seed, cli.samples)?;
            let passed = reports.iter().all(|r| r.passed);
            let mut warnings = Vec::new();
            if cli.samples == 0 {
                warnings.push("samples = 0: sampled identities were not exercised");
            }
            let mut out = header(cli, "verify");
            out.insert("seed".into(), json!(cli.seed));
            out.insert("samples".into(), json!(cli.samples));
            out.insert("passed".into(), json!(passed));
            out.insert("warnings".into(), json!(warnings));
            out.insert("suites".into(), serde_json::to_value(&reports).expect("serializable"));
            Ok((Value::Object(out), passed))
        }
        Command::Chain { space, chooser } => {
            let space = parse_space(&qp, space)?;
            let (mut ch, label) = parse_chooser(&qp, chooser)?;
            let report = chain_descent(&space, ch.as_mut())?;
            let mut out = header(cli, "chain");
            out.insert("chooser".into(), json!(label));
            out.insert("verdict".into(), json!(report.verdict));
            out.insert("descents".into(), json!(report.descents));
            out.insert("conformal_symmetry".into(), json!(conformal_symmetry_verdict(&report)));
            out.insert("stages".into(), serde_json::to_value(&report.stages).expect("serializable"));
            Ok((Value::Object(out), true))
        }
    }
}

fn emit(cli: &Cli, v: &Value) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(v).expect("serializable");
    text.push('\n');
    match &cli.out {
        Some(path) => fs::write(path, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((report, passed)) => {
            if let Err(e) = emit(&cli, &report) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Math(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
