//! Command-line shell: argument parsing, orchestration, and exit codes.
//!
//! Three subcommands: `test` runs a calibrated test battery on curve and
//! response files, `simulate` estimates rejection rates over scenario files,
//! and `report` re-renders saved result documents as text tables. Exit code
//! 0 on success, 2 for configuration problems, 3 for data problems.

pub mod document;
pub mod ingest;
pub mod table;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::bootstrap::{
    supports, CalibrationKind, CalibrationMethod, Multiplier, PValueMode, VarianceMode,
};
use crate::error::{Error, Result};
use crate::fpca::{decompose, DEFAULT_RANK_TOLERANCE};
use crate::simgen::{load_scenarios, run_scenario};
use crate::stats::StatisticKind;
use document::{DocumentKind, InputDigest, ResultDocument, TestRecord, Timing};

#[derive(Debug, Parser)]
#[command(
    name = "flindep",
    version,
    about = "Tests for lack of linear dependence between a functional covariate and a scalar response"
)]
pub struct Cli {
    /// Worker threads for dataset and replicate parallelism (default: all cores).
    #[arg(long, global = true, value_name = "INT")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run calibrated tests on a curve file and a response file.
    Test(TestArgs),
    /// Run simulation scenarios and estimate rejection rates.
    Simulate(SimulateArgs),
    /// Re-render saved result documents as aligned text tables.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StatisticArg {
    T1,
    T2,
    T3,
    T3s,
    /// Every statistic the chosen method supports.
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    /// N(0,2) reference for t1.
    Asymptotic,
    /// Paired resampling for t3/t3s.
    Naive,
    /// Multiplier bootstrap for every statistic.
    Wild,
    /// Resampled curve means calibrating t3s.
    Precursor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MultiplierArg {
    Gaussian,
    Rademacher,
    Mammen,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VarianceArg {
    /// Recompute the variance from each resample.
    Bootstrapped,
    /// Reuse the observed variance in every replicate.
    Fixed,
}

impl MethodArg {
    fn kind(self) -> CalibrationKind {
        match self {
            MethodArg::Asymptotic => CalibrationKind::AsymptoticN02,
            MethodArg::Naive => CalibrationKind::Naive,
            MethodArg::Wild => CalibrationKind::Wild,
            MethodArg::Precursor => CalibrationKind::Precursor,
        }
    }
}

impl MultiplierArg {
    fn law(self) -> Multiplier {
        match self {
            MultiplierArg::Gaussian => Multiplier::Gaussian,
            MultiplierArg::Rademacher => Multiplier::Rademacher,
            MultiplierArg::Mammen => Multiplier::Mammen,
        }
    }
}

impl VarianceArg {
    fn mode(self) -> VarianceMode {
        match self {
            VarianceArg::Bootstrapped => VarianceMode::Bootstrapped,
            VarianceArg::Fixed => VarianceMode::Fixed,
        }
    }
}

#[derive(Debug, Args)]
pub struct TestArgs {
    /// Comma-separated curve table: header row = grid points, one curve per row.
    #[arg(long, value_name = "PATH")]
    pub curves: PathBuf,

    /// Response file with one number per line, aligned with the curve rows.
    #[arg(long, value_name = "PATH")]
    pub responses: PathBuf,

    /// Statistic to calibrate.
    #[arg(long, value_enum, default_value_t = StatisticArg::All)]
    pub statistic: StatisticArg,

    /// Calibration method.
    #[arg(long, value_enum, default_value_t = MethodArg::Wild)]
    pub method: MethodArg,

    /// Multiplier law for wild replicates.
    #[arg(long, value_enum, default_value_t = MultiplierArg::Gaussian)]
    pub multiplier: MultiplierArg,

    /// Component counts for t1/t2, e.g. `--kn 5,10,20`.
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    pub kn: Vec<usize>,

    /// Bootstrap replicates.
    #[arg(long = "B", value_name = "INT", default_value_t = 1000)]
    pub replicates: usize,

    /// Seed for the replicate streams.
    #[arg(long, value_name = "U64", default_value_t = 0)]
    pub seed: u64,

    /// Variance handling in studentized wild replicates.
    #[arg(long, value_enum, default_value_t = VarianceArg::Bootstrapped)]
    pub variance_mode: VarianceArg,

    /// Use the (1 + count)/(B + 1) p-value instead of count/B.
    #[arg(long)]
    pub add_one: bool,

    /// Significance level; adds a reject/keep decision to each test.
    #[arg(long, value_name = "FLOAT")]
    pub alpha: Option<f64>,

    /// Write the JSON document here and print the table to stdout.
    /// Without it the JSON goes to stdout and the table to stderr.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scenario file with one or more [[scenario]] blocks.
    #[arg(value_name = "SPEC")]
    pub spec: PathBuf,

    /// Write the JSON document here and print the tables to stdout.
    /// Without it the JSON goes to stdout and the tables to stderr.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Result documents (JSON) produced by `test` or `simulate`.
    #[arg(required = true, value_name = "PATH")]
    pub documents: Vec<PathBuf>,

    /// Write the tables here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

/// Entry point used by the binary: parse, dispatch, map errors to exit codes.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version are successes; usage problems are exit 2.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(threads) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(command: &Command) -> Result<()> {
    match command {
        Command::Test(args) => {
            let doc = cmd_test(args)?;
            write_document(&doc, args.out.as_deref())
        }
        Command::Simulate(args) => {
            let doc = cmd_simulate(args)?;
            write_document(&doc, args.out.as_deref())
        }
        Command::Report(args) => {
            let mut parts = Vec::new();
            for path in &args.documents {
                let text = ingest::read_to_string(path)?;
                let doc = ResultDocument::from_json(&text, &path.display().to_string())?;
                parts.push(table::document_tables(&doc));
            }
            let rendered = parts.join("\n");
            match &args.out {
                Some(path) => write_file(path, &rendered),
                None => {
                    print!("{rendered}");
                    Ok(())
                }
            }
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// JSON to `out` (tables to stdout) or JSON to stdout (tables to stderr),
/// so machine output stays parseable either way.
fn write_document(doc: &ResultDocument, out: Option<&Path>) -> Result<()> {
    let json = doc.to_json();
    let tables = table::document_tables(doc);
    match out {
        Some(path) => {
            write_file(path, &json)?;
            print!("{tables}");
        }
        None => {
            print!("{json}");
            eprint!("{tables}");
        }
    }
    Ok(())
}

/// The statistics a battery runs: an explicit choice, or every statistic the
/// method supports when `all` is requested.
fn statistics_for(statistic: StatisticArg, method: CalibrationKind) -> Result<Vec<StatisticKind>> {
    let all = [
        StatisticKind::T1,
        StatisticKind::T2,
        StatisticKind::T3,
        StatisticKind::T3s,
    ];
    let chosen: Vec<StatisticKind> = match statistic {
        StatisticArg::T1 => vec![StatisticKind::T1],
        StatisticArg::T2 => vec![StatisticKind::T2],
        StatisticArg::T3 => vec![StatisticKind::T3],
        StatisticArg::T3s => vec![StatisticKind::T3s],
        StatisticArg::All => all.into_iter().filter(|s| supports(method, *s)).collect(),
    };
    if let [single] = chosen.as_slice() {
        if !supports(method, *single) {
            return Err(Error::config(format!(
                "calibration {method} does not apply to statistic {single}"
            )));
        }
    }
    Ok(chosen)
}

fn cmd_test(args: &TestArgs) -> Result<ResultDocument> {
    let start = Instant::now();
    if let Some(alpha) = args.alpha {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::config(format!("alpha {alpha} is outside (0, 1)")));
        }
    }

    let curves_text = ingest::read_to_string(&args.curves)?;
    let responses_text = ingest::read_to_string(&args.responses)?;
    let sample = ingest::ingest_strings(
        &curves_text,
        &args.curves.display().to_string(),
        &responses_text,
        &args.responses.display().to_string(),
    )?;

    let statistics = statistics_for(args.statistic, args.method.kind())?;
    let method = CalibrationMethod {
        kind: args.method.kind(),
        multiplier: args.multiplier.law(),
        replicates: args.replicates,
        seed: args.seed,
        variance_mode: args.variance_mode.mode(),
        p_value_mode: if args.add_one {
            PValueMode::AddOne
        } else {
            PValueMode::Proportion
        },
    };

    let mut kns: Vec<usize> = args.kn.clone();
    kns.sort_unstable();
    kns.dedup();
    let needs_kn = statistics.iter().any(|s| s.needs_kn());
    if needs_kn && kns.is_empty() {
        let first = statistics
            .iter()
            .find(|s| s.needs_kn())
            .expect("needs_kn implies a component statistic");
        return Err(Error::config(format!("statistic {first} requires --kn")));
    }
    let dec = if needs_kn {
        Some(decompose(&sample, DEFAULT_RANK_TOLERANCE)?)
    } else {
        None
    };

    let mut tests = Vec::new();
    for &kind in &statistics {
        if kind.needs_kn() {
            for &kn in &kns {
                let outcome = crate::bootstrap::run_test_with_decomposition(
                    &sample,
                    dec.as_ref(),
                    kind,
                    &method,
                    Some(kn),
                )?;
                tests.push(TestRecord::from_outcome(&outcome, args.alpha));
            }
        } else {
            let outcome = crate::bootstrap::run_test_with_decomposition(
                &sample, None, kind, &method, None,
            )?;
            tests.push(TestRecord::from_outcome(&outcome, args.alpha));
        }
    }

    Ok(ResultDocument {
        kind: DocumentKind::Test,
        inputs: vec![
            InputDigest::new(
                "curves",
                args.curves.display().to_string(),
                curves_text.as_bytes(),
            ),
            InputDigest::new(
                "responses",
                args.responses.display().to_string(),
                responses_text.as_bytes(),
            ),
        ],
        config: json!({
            "statistic": format!("{:?}", args.statistic).to_lowercase(),
            "method": method.kind,
            "multiplier": method.multiplier,
            "kn": kns,
            "replicates": method.replicates,
            "seed": method.seed,
            "variance-mode": method.variance_mode,
            "p-value-mode": method.p_value_mode,
            "alpha": args.alpha,
        }),
        tests,
        scenarios: Vec::new(),
        timing: Timing {
            seconds: start.elapsed().as_secs_f64(),
        },
    })
}

fn cmd_simulate(args: &SimulateArgs) -> Result<ResultDocument> {
    let start = Instant::now();
    let text = ingest::read_to_string(&args.spec)?;
    let specs = load_scenarios(&text)?;
    let scenarios = specs
        .iter()
        .map(run_scenario)
        .collect::<Result<Vec<_>>>()?;
    Ok(ResultDocument {
        kind: DocumentKind::Simulate,
        inputs: vec![InputDigest::new(
            "scenarios",
            args.spec.display().to_string(),
            text.as_bytes(),
        )],
        config: json!({
            "source": args.spec.display().to_string(),
            "scenarios": specs.iter().map(|s| s.name.clone()).collect::<Vec<_>>(),
        }),
        tests: Vec::new(),
        scenarios,
        timing: Timing {
            seconds: start.elapsed().as_secs_f64(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(args).unwrap()
    }

    #[test]
    fn test_flags_parse() {
        let cli = parse(&[
            "flindep",
            "test",
            "--curves",
            "c.csv",
            "--responses",
            "r.txt",
            "--statistic",
            "t1",
            "--method",
            "wild",
            "--multiplier",
            "rademacher",
            "--kn",
            "5,10,20",
            "--B",
            "250",
            "--seed",
            "7",
            "--variance-mode",
            "fixed",
            "--add-one",
            "--threads",
            "2",
        ]);
        assert_eq!(cli.threads, Some(2));
        let Command::Test(args) = cli.command else {
            panic!("expected test subcommand");
        };
        assert_eq!(args.statistic, StatisticArg::T1);
        assert_eq!(args.method, MethodArg::Wild);
        assert_eq!(args.multiplier, MultiplierArg::Rademacher);
        assert_eq!(args.kn, vec![5, 10, 20]);
        assert_eq!(args.replicates, 250);
        assert_eq!(args.seed, 7);
        assert_eq!(args.variance_mode, VarianceArg::Fixed);
        assert!(args.add_one);
    }

    #[test]
    fn unknown_statistic_is_a_usage_error() {
        assert!(Cli::try_parse_from(["flindep", "test", "--curves", "c", "--responses", "r", "--statistic", "t9"]).is_err());
    }

    #[test]
    fn all_expands_to_the_supported_statistics() {
        use CalibrationKind::*;
        use StatisticKind::*;
        assert_eq!(
            statistics_for(StatisticArg::All, Wild).unwrap(),
            vec![T1, T2, T3, T3s]
        );
        assert_eq!(
            statistics_for(StatisticArg::All, Naive).unwrap(),
            vec![T3, T3s]
        );
        assert_eq!(
            statistics_for(StatisticArg::All, AsymptoticN02).unwrap(),
            vec![T1]
        );
        assert_eq!(
            statistics_for(StatisticArg::All, Precursor).unwrap(),
            vec![T3s]
        );
        assert!(statistics_for(StatisticArg::T2, Naive).is_err());
        assert_eq!(
            statistics_for(StatisticArg::T3s, Precursor).unwrap(),
            vec![T3s]
        );
    }

    #[test]
    fn battery_runs_on_files_end_to_end() {
        let dir = tempfile::tempdir().unwrap();
        let curves = dir.path().join("curves.csv");
        let responses = dir.path().join("responses.txt");
        let grid = crate::hilbert::Grid::uniform(0.0, 1.0, 12).unwrap();
        let mut rng = crate::rng::substream(33, 0);
        let rows: Vec<Vec<f64>> = (0..15)
            .map(|_| {
                crate::simgen::brownian_path(&grid, &mut rng)
                    .into_values()
            })
            .collect();
        let responses_vec: Vec<f64> = (0..15)
            .map(|_| rand::Rng::gen_range(&mut rng, -1.0..1.0))
            .collect();
        let sample =
            crate::hilbert::FunctionalSample::from_rows(grid, rows, responses_vec).unwrap();
        std::fs::write(&curves, ingest::emit_curves(&sample)).unwrap();
        std::fs::write(&responses, ingest::emit_responses(&sample)).unwrap();

        let args = TestArgs {
            curves: curves.clone(),
            responses: responses.clone(),
            statistic: StatisticArg::All,
            method: MethodArg::Wild,
            multiplier: MultiplierArg::Gaussian,
            kn: vec![2, 4],
            replicates: 50,
            seed: 9,
            variance_mode: VarianceArg::Bootstrapped,
            add_one: false,
            alpha: Some(0.05),
            out: None,
        };
        let doc = cmd_test(&args).unwrap();
        // t1 and t2 at two kn each, plus t3 and t3s.
        assert_eq!(doc.tests.len(), 6);
        for test in &doc.tests {
            assert!((0.0..=1.0).contains(&test.p_value));
            assert!(test.reject.is_some());
        }
        let again = cmd_test(&args).unwrap();
        let strip = |d: &ResultDocument| {
            let mut v: serde_json::Value = serde_json::from_str(&d.to_json()).unwrap();
            v.as_object_mut().unwrap().remove("timing");
            v
        };
        assert_eq!(strip(&doc), strip(&again));

        // Missing --kn while t1 is requested is a configuration error.
        let bad = TestArgs { kn: vec![], ..args };
        let err = cmd_test(&bad).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("--kn"));
    }

    #[test]
    fn simulate_runs_a_scenario_file() {
        let dir = tempfile::tempdir().unwrap();
        let spec = dir.path().join("tiny.spec");
        std::fs::write(
            &spec,
            r#"
            [[scenario]]
            name = "tiny"
            n = 12
            p = 10
            datasets = 3
            seed = 5
            theta = "zero"
            sigma0 = 1.0
            alphas = [0.2]
            replicates = 30

            [[scenario.methods]]
            statistic = "t3s"
            calibration = "wild"
            "#,
        )
        .unwrap();
        let args = SimulateArgs {
            spec: spec.clone(),
            out: None,
        };
        let doc = cmd_simulate(&args).unwrap();
        assert_eq!(doc.scenarios.len(), 1);
        assert_eq!(doc.scenarios[0].cells.len(), 1);
        let rendered = table::document_tables(&doc);
        assert!(rendered.contains("scenario tiny"));
        assert!(rendered.contains("t3s-wild-boot"));

        let missing = SimulateArgs {
            spec: dir.path().join("nope.spec"),
            out: None,
        };
        assert_eq!(cmd_simulate(&missing).unwrap_err().exit_code(), 3);
    }
}
