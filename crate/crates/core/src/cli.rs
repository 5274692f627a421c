//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a checked property failed, 2 inconclusive (search
//! or budget exhausted), 3 usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::audit::{self, AuditConfig, Lemma};
use crate::conjugacy::{self, default_quotient};
use crate::enumeration::{self, GrowthTable};
use crate::error::Error;
use crate::group::Group;
use crate::width::{self, FactorSet, ProductSearch, SearchBudget, WidthOutcome};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "griglab",
    version,
    about = "Growth, conjugacy and width computations in self-similar groups"
)]
pub struct Cli {
    /// Preset name (`grigorchuk`) or path to a preset JSON file.
    #[arg(long, global = true, default_value = "grigorchuk")]
    pub group: String,
    #[arg(long, global = true)]
    pub max_length: Option<usize>,
    /// Invariant depth (conjgrowth, audits) or action depth (growth).
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Conjugator or entry radius.
    #[arg(long, global = true)]
    pub radius: Option<usize>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[arg(long, global = true, env = "GRIGLAB_CACHE")]
    pub cache_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true)]
    pub budget_seconds: Option<u64>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WidthMode {
    Conjugates,
    Commutators,
    Palindromes,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Word growth γ(n).
    Growth,
    /// Certified bracket on conjugacy growth f(n).
    Conjgrowth,
    /// Run a lemma audit and print its JSON report.
    Audit {
        /// subwords, comm-k, comm-g, bcw-rewrite, palindrome, dihedral,
        /// recursion, assembly or all.
        lemma: String,
    },
    /// Decompose one element into conjugates, commutators or palindromes.
    Width {
        #[arg(long)]
        target: String,
        #[arg(long, value_enum)]
        mode: WidthMode,
        /// Conjugate bases: a single label such as `a`, or `all`.
        #[arg(long, default_value = "all")]
        bases: String,
        /// Largest number of factors.
        #[arg(long)]
        factors: Option<usize>,
    },
}

struct Output {
    text: String,
    code: i32,
}

fn exit_for(e: &Error) -> i32 {
    match e {
        Error::UnknownPreset(_)
        | Error::WordParse { .. }
        | Error::Validation { .. }
        | Error::Precondition(_)
        | Error::InvalidPath { .. } => EXIT_USAGE,
        Error::Budget(_)
        | Error::BallBudget { .. }
        | Error::Undecided(_)
        | Error::Unstabilized(_)
        | Error::LiftUnavailable(_)
        | Error::NotInBall(_) => EXIT_INCONCLUSIVE,
        _ => EXIT_FAILED,
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code. Output goes to `out`, diagnostics to `err`.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    match pool.install(|| execute(&cli)) {
        Ok(o) => {
            let written = match &cli.output {
                Some(path) => std::fs::write(path, &o.text).map_err(Error::from),
                None => out.write_all(o.text.as_bytes()).map_err(Error::from),
            };
            if let Err(e) = written {
                let _ = writeln!(err, "error: {e}");
                return EXIT_FAILED;
            }
            o.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_for(&e)
        }
    }
}

pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

fn execute(cli: &Cli) -> crate::Result<Output> {
    let group = Group::load(&cli.group)?;
    let deadline = cli
        .budget_seconds
        .map(|s| Instant::now() + Duration::from_secs(s));
    for (name, v) in [("depth", cli.depth), ("radius", cli.radius)] {
        if v == Some(0) {
            return Err(Error::Precondition(format!("--{name} must be positive")));
        }
    }
    match &cli.command {
        Command::Growth => growth(cli, &group),
        Command::Conjgrowth => conjgrowth(cli, &group),
        Command::Audit { lemma } => {
            let lemma: Lemma = lemma.parse().map_err(Error::Precondition)?;
            let cfg = AuditConfig {
                max_length: cli.max_length,
                depth: cli.depth,
                radius: cli.radius,
                seed: cli.seed,
                deadline,
            };
            let reports = audit::run(&group, lemma, &cfg)?;
            let code = audit::exit_code(&reports);
            let text = if reports.len() == 1 {
                to_json(&reports[0])
            } else {
                to_json(&reports)
            };
            Ok(Output { text, code })
        }
        Command::Width {
            target,
            mode,
            bases,
            factors,
        } => width_cmd(cli, &group, target, *mode, bases, *factors, deadline),
    }
}

fn growth(cli: &Cli, group: &Group) -> crate::Result<Output> {
    let n = cli.max_length.unwrap_or(8);
    let table = match &cli.cache_dir {
        Some(dir) => {
            let ball = enumeration::ball_cached(group, n, Some(dir))?;
            GrowthTable {
                rows: (0..=n).map(|k| (k, ball.gamma(k) as u64)).collect(),
                action_depth: 0,
            }
        }
        None => {
            let depth = cli
                .depth
                .unwrap_or_else(|| enumeration::default_action_depth(n));
            enumeration::growth_table_at(group, n, depth)?.0
        }
    };
    let text = match cli.format {
        Format::Csv => table.to_csv(),
        Format::Json => to_json(
            &table
                .rows
                .iter()
                .map(|&(n, g)| json!({"n": n, "gamma": g}))
                .collect::<Vec<_>>(),
        ),
    };
    Ok(Output {
        text,
        code: EXIT_OK,
    })
}

fn conjgrowth(cli: &Cli, group: &Group) -> crate::Result<Output> {
    let n = cli.max_length.unwrap_or(8);
    let depth = cli.depth.unwrap_or_else(|| conjugacy::default_depth(n));
    let radius = cli.radius.unwrap_or(6);
    let ball = enumeration::ball_cached(group, n, cli.cache_dir.as_deref())?;
    let q = default_quotient(group);
    let rows = conjugacy::conj_growth_table(group, &ball, depth, radius, q.as_ref())?;
    let text = match cli.format {
        Format::Csv => conjugacy::rows_to_csv(&rows),
        Format::Json => to_json(&rows),
    };
    Ok(Output {
        text,
        code: EXIT_OK,
    })
}

fn width_cmd(
    cli: &Cli,
    group: &Group,
    target: &str,
    mode: WidthMode,
    bases: &str,
    factors: Option<usize>,
    deadline: Option<Instant>,
) -> crate::Result<Output> {
    let word = group.reduce(&group.parse_word(target)?)?;
    let element = group.eval(&word)?;
    let radius = cli.radius.unwrap_or(4);
    let budget = |k_max| SearchBudget {
        radius,
        k_max: factors.unwrap_or(k_max),
        deadline,
        ..Default::default()
    };
    let outcome = match mode {
        WidthMode::Conjugates => {
            let labels: Vec<u8> = if bases == "all" {
                let mut l = group.labels();
                l.sort_unstable();
                l
            } else {
                bases.bytes().collect()
            };
            width::conjugate_width(group, &element, &labels, budget(4))?
        }
        WidthMode::Commutators => width::commutator_width(group, &element, &word, budget(2))?,
        WidthMode::Palindromes => {
            let set = FactorSet::palindromes(group, radius)?;
            let search = ProductSearch::new(group, &set, budget(5))?;
            width::palindromic_width(group, &element, &word, &search)?
        }
    };
    let code = if outcome.is_confirmed() {
        EXIT_OK
    } else {
        EXIT_INCONCLUSIVE
    };
    let text = match cli.format {
        Format::Csv => {
            let (status, factors, witness) = match &outcome {
                WidthOutcome::Confirmed { expression } => (
                    "confirmed",
                    expression.len().to_string(),
                    expression.to_string(),
                ),
                WidthOutcome::Inconclusive { .. } => ("inconclusive", String::new(), String::new()),
            };
            format!(
                "length,element,status,factors,witness\n{},{word},{status},{factors},{witness}\n",
                word.len()
            )
        }
        Format::Json => to_json(&json!({
            "length": word.len(),
            "element": word,
            "outcome": outcome,
        })),
    };
    Ok(Output { text, code })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with(
            std::iter::once("griglab").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap())
    }

    #[test]
    fn growth_rows() {
        let (code, out) = run(&["growth", "--max-length", "6"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 8);
        assert!(out.contains("\n1,5\n"));
    }

    #[test]
    fn width_modes() {
        let (code, out) = run(&["width", "--target", "a", "--mode", "conjugates"]);
        assert_eq!(code, 0);
        assert!(out.contains("1,a,confirmed,1,a\n"), "{out}");
        let (code, out) = run(&["width", "--target", "", "--mode", "conjugates"]);
        assert_eq!(code, 0);
        assert!(out.contains("0,,confirmed,0,1\n"), "{out}");
        let (code, out) = run(&[
            "width",
            "--target",
            "[a,b]",
            "--mode",
            "commutators",
            "--radius",
            "2",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains(",confirmed,1,"), "{out}");
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run(&["audit", "nope"]).0, EXIT_USAGE);
        assert_eq!(run(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run(&["--group", "missing", "growth"]).0, EXIT_USAGE);
        assert_eq!(
            run(&["width", "--target", "(a", "--mode", "conjugates"]).0,
            EXIT_USAGE
        );
        assert_eq!(
            run(&["width", "--target", "a", "--mode", "commutators"]).0,
            EXIT_USAGE
        );
    }
}
