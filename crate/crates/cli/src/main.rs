//! `hvlie` command-line entry point.
//!
//! Exit codes: 0 all checks passed, 1 a check failed, 2 usage error,
//! 3 malformed rational, 4 window violation, 5 other invalid input,
//! 6 unreadable or malformed config file.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hvlie::classify::VirCase;
use hvlie::families::ModuleSpec;
use hvlie::harness::{self, Command, Format, RunConfig};
use hvlie::{Error, Mutation, ParseError, Scalar};
use serde::Deserialize;

const SEED_ENV: &str = "HVLIE_SEED";

#[derive(Debug, Parser)]
#[command(name = "hvlie", version, about = "Exact verification harness for the twisted Heisenberg-Virasoro algebra")]
struct Cli {
    /// Output format for the report on stdout.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// TOML file supplying defaults; flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// RNG seed for sampled instances; overrides the config file and HVLIE_SEED.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Flip the sign of the [L, I] bracket and the anomaly term; suites must then fail.
    #[arg(long, global = true)]
    mutate: bool,
    #[command(subcommand)]
    command: Option<Sub>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Text => Format::Text,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Bracket axioms and anomaly closed forms.
    VerifyAlgebra(IndexArgs),
    /// Free-boson realization and its central charges.
    VerifyBoson(IndexArgs),
    /// Module axioms for every family.
    VerifyFamilies(FamilyArgs),
    /// Simplicity predicate against the truncated submodule scan.
    ScanSubmodules(FamilyArgs),
    /// Isomorphism and subquotient witnesses.
    CheckIntertwiners(WindowArgs),
    /// Solve the structure equations for rank-one extensions.
    Classify(ClassifyArgs),
    /// Confirm that planted mutations are detected.
    SelfTest,
}

#[derive(Debug, Args)]
struct IndexArgs {
    /// Largest |index| in sampled basis elements.
    #[arg(long)]
    max_index: Option<i64>,
}

#[derive(Debug, Args)]
struct WindowArgs {
    /// Half-width of the weight window.
    #[arg(long = "N")]
    n: Option<i64>,
    /// Largest |index| of acting generators.
    #[arg(long = "G")]
    g: Option<i64>,
}

#[derive(Debug, Args)]
struct FamilyArgs {
    /// Family such as `A[a=1/3,b=2,c=5]`; repeatable.
    #[arg(long = "family", value_name = "SPEC")]
    families: Vec<String>,
    #[command(flatten)]
    window: WindowArgs,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    /// Case tag (I, II, III, IV) or a full form such as `CaseI(a=1/3,b=0)`.
    #[arg(long)]
    case: Option<String>,
    /// Rational parameter a.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    /// Rational parameter b.
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    #[command(flatten)]
    window: WindowArgs,
}

/// Keys accepted in the `--config` file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    command: Option<String>,
    format: Option<String>,
    seed: Option<u64>,
    #[serde(rename = "N")]
    n: Option<i64>,
    #[serde(rename = "G")]
    g: Option<i64>,
    max_index: Option<i64>,
    #[serde(default)]
    families: Vec<String>,
    #[serde(default)]
    cases: Vec<String>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Config(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Lib(Error::Parse(ParseError::Rational(_))) => 3,
            Failure::Lib(Error::Window(_)) => 4,
            Failure::Lib(_) => 5,
            Failure::Config(_) => 6,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => format!("usage error: {m}"),
            Failure::Config(m) => format!("config error: {m}"),
            Failure::Lib(e) => format!("error: {e}"),
        }
    }
}

fn read_config(path: &PathBuf) -> Result<FileConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn parse_format(s: &str) -> Result<Format, Failure> {
    match s {
        "text" => Ok(Format::Text),
        "json" => Ok(Format::Json),
        _ => Err(Failure::Config(format!("unknown format `{s}`"))),
    }
}

fn parse_scalar(s: &str) -> Result<Scalar, Failure> {
    s.trim().parse::<Scalar>().map_err(|e| Failure::Lib(e.into()))
}

fn parse_families(items: &[String]) -> Result<Vec<ModuleSpec>, Failure> {
    items.iter().map(|s| Ok(s.parse::<ModuleSpec>()?)).collect()
}

fn parse_case(args: &ClassifyArgs) -> Result<Option<VirCase>, Failure> {
    let a = args.a.as_deref().map(parse_scalar).transpose()?;
    let b = args.b.as_deref().map(parse_scalar).transpose()?;
    match args.case.as_deref() {
        None if a.is_none() && b.is_none() => Ok(None),
        None => Err(Failure::Usage("--a/--b require --case".into())),
        Some(c) if c.contains('(') => {
            if a.is_some() || b.is_some() {
                return Err(Failure::Usage("--a/--b conflict with a parenthesized --case".into()));
            }
            Ok(Some(c.parse::<VirCase>()?))
        }
        Some(c) => {
            let tag = c.trim().strip_prefix("Case").unwrap_or(c.trim());
            Ok(Some(VirCase::from_parts(tag, a, b)?))
        }
    }
}

fn build_config(cli: Cli) -> Result<RunConfig, Failure> {
    let file = match &cli.config {
        Some(p) => read_config(p)?,
        None => FileConfig::default(),
    };
    let command = match (&cli.command, &file.command) {
        (Some(sub), _) => sub_command(sub),
        (None, Some(name)) => name
            .parse::<Command>()
            .map_err(|e| Failure::Usage(e.to_string()))?,
        (None, None) => return Err(Failure::Usage("no command given".into())),
    };
    let mut cfg = RunConfig::new(command);
    cfg.window = file.n;
    cfg.gen_bound = file.g;
    cfg.max_index = file.max_index;
    cfg.families = parse_families(&file.families)?;
    cfg.cases = file
        .cases
        .iter()
        .map(|s| Ok(s.parse::<VirCase>()?))
        .collect::<Result<_, Failure>>()?;
    if let Some(f) = &file.format {
        cfg.format = parse_format(f)?;
    }
    if let Some(s) = file.seed {
        cfg.seed = s;
    }
    if let Ok(s) = std::env::var(SEED_ENV) {
        cfg.seed = s
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("{SEED_ENV}=`{s}` is not an unsigned integer")))?;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(f) = cli.format {
        cfg.format = f.into();
    }
    if cli.mutate {
        cfg.mutation = Mutation::SignFlip;
    }
    match &cli.command {
        Some(Sub::VerifyAlgebra(x) | Sub::VerifyBoson(x)) => {
            cfg.max_index = x.max_index.or(cfg.max_index);
        }
        Some(Sub::VerifyFamilies(x) | Sub::ScanSubmodules(x)) => {
            apply_window(&mut cfg, &x.window);
            if !x.families.is_empty() {
                cfg.families = parse_families(&x.families)?;
            }
        }
        Some(Sub::CheckIntertwiners(w)) => apply_window(&mut cfg, w),
        Some(Sub::Classify(x)) => {
            apply_window(&mut cfg, &x.window);
            if let Some(case) = parse_case(x)? {
                cfg.cases = vec![case];
            }
        }
        Some(Sub::SelfTest) | None => {}
    }
    Ok(cfg)
}

fn apply_window(cfg: &mut RunConfig, w: &WindowArgs) {
    cfg.window = w.n.or(cfg.window);
    cfg.gen_bound = w.g.or(cfg.gen_bound);
}

fn sub_command(sub: &Sub) -> Command {
    match sub {
        Sub::VerifyAlgebra(_) => Command::VerifyAlgebra,
        Sub::VerifyBoson(_) => Command::VerifyBoson,
        Sub::VerifyFamilies(_) => Command::VerifyFamilies,
        Sub::ScanSubmodules(_) => Command::ScanSubmodules,
        Sub::CheckIntertwiners(_) => Command::CheckIntertwiners,
        Sub::Classify(_) => Command::Classify,
        Sub::SelfTest => Command::SelfTest,
    }
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let cfg = build_config(cli)?;
    let start = Instant::now();
    let report = harness::run_command(&cfg)?;
    print!("{}", harness::emit_report(&report, cfg.format));
    eprintln!("elapsed {:.3}s", start.elapsed().as_secs_f64());
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("{}", f.message());
            ExitCode::from(f.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(args: &[&str]) -> Result<RunConfig, Failure> {
        build_config(Cli::try_parse_from(std::iter::once("hvlie").chain(args.iter().copied())).expect("parses"))
    }

    #[test]
    fn flags_map_onto_run_config() {
        let cfg = config(&["classify", "--case", "I", "--a", "1/3", "--b", "-5", "--N", "9", "--G", "3"]).unwrap();
        assert_eq!(cfg.command, Command::Classify);
        assert_eq!((cfg.window, cfg.gen_bound), (Some(9), Some(3)));
        assert_eq!(cfg.cases, vec!["CaseI(a=1/3,b=-5)".parse::<VirCase>().unwrap()]);
        assert_eq!(cfg.mutation, Mutation::None);
    }

    #[test]
    fn case_parameters_need_a_case() {
        assert_eq!(config(&["classify", "--a", "1"]).unwrap_err().code(), 2);
        assert_eq!(config(&["classify", "--case", "CaseII(a=1)", "--a", "1"]).unwrap_err().code(), 2);
        assert_eq!(config(&["classify", "--case", "I", "--a", "1"]).unwrap_err().code(), 5);
    }

    #[test]
    fn repeated_families_are_kept_in_order() {
        let cfg = config(&["scan-submodules", "--family", "VirA[a=2,b=0]", "--family", "B[a=1/2,d=3]"]).unwrap();
        let names: Vec<String> = cfg.families.iter().map(|f| f.to_string()).collect();
        assert_eq!(names, ["VirA[a=2,b=0]", "B[a=1/2,d=3]"]);
    }

    #[test]
    fn global_flags_follow_the_subcommand() {
        let cfg = config(&["verify-algebra", "--format", "json", "--seed", "5", "--mutate"]).unwrap();
        assert_eq!((cfg.format, cfg.seed, cfg.mutation), (Format::Json, 5, Mutation::SignFlip));
    }
}
