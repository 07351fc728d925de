//! End-to-end smoke test of every CLI path at reduced size: all three
//! subcommands, both output modes, and the full exit-code contract
//! (0 success, 2 configuration error, 3 data error).

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use flindep::bootstrap::PValueMode;
use flindep::cli::ingest::{emit_curves, emit_responses};
use flindep::simgen::{generate_dataset, ScenarioSpec, ThetaSpec};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flindep"))
        .args(args)
        .output()
        .unwrap()
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("process not killed by signal")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).unwrap()
}

fn parse_document(text: &str) -> serde_json::Value {
    serde_json::from_str(text).expect("stdout is a JSON document")
}

fn smoke_spec_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/smoke.spec")
}

fn write_dataset(dir: &Path) -> (PathBuf, PathBuf) {
    let spec = ScenarioSpec {
        name: "smoke-data".to_string(),
        n: 20,
        p: 20,
        datasets: 1,
        seed: 314,
        theta: ThetaSpec::SinCubed,
        sigma0: None,
        r: Some(1.0),
        local: None,
        intercept: 0.25,
        alphas: vec![0.05],
        kn: vec![],
        replicates: 200,
        p_value_mode: PValueMode::Proportion,
        methods: Vec::new(),
    };
    let sample = generate_dataset(&spec, 0).unwrap();
    let curves = dir.join("curves.csv");
    let responses = dir.join("responses.csv");
    std::fs::write(&curves, emit_curves(&sample)).unwrap();
    std::fs::write(&responses, emit_responses(&sample)).unwrap();
    (curves, responses)
}

#[test]
fn every_cli_path_at_reduced_size() {
    let dir = tempfile::tempdir().unwrap();
    let (curves, responses) = write_dataset(dir.path());
    let curves = curves.to_str().unwrap();
    let responses = responses.to_str().unwrap();

    // Help and version succeed without doing work.
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
    assert_eq!(code(&run(&["test", "--help"])), 0);

    // Default battery: all statistics under the wild bootstrap. Without
    // --out the document goes to stdout and the table to stderr.
    let out = run(&[
        "--threads", "1", "test", "--curves", curves, "--responses", responses,
        "--kn", "3", "--B", "200", "--seed", "1",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let doc = parse_document(&stdout(&out));
    assert_eq!(doc["kind"], "test");
    assert_eq!(doc["tests"].as_array().unwrap().len(), 4);
    assert!(stderr(&out).contains("statistic"), "table goes to stderr");

    // Each bootstrap family runs on its supported statistic.
    for method_args in [
        &["--statistic", "t3s", "--method", "naive"][..],
        &["--statistic", "t3s", "--method", "precursor"][..],
        &["--statistic", "t3", "--method", "wild", "--multiplier", "rademacher"][..],
        &["--statistic", "t1", "--method", "asymptotic", "--kn", "2"][..],
    ] {
        let mut args = vec!["test", "--curves", curves, "--responses", responses, "--B", "200"];
        args.extend_from_slice(method_args);
        let out = run(&args);
        assert_eq!(code(&out), 0, "args {method_args:?}, stderr: {}", stderr(&out));
    }

    // Full flag surface with --out: JSON lands in the file, the table on
    // stdout, and --alpha adds decisions.
    let test_doc = dir.path().join("test.json");
    let out = run(&[
        "test", "--curves", curves, "--responses", responses,
        "--statistic", "t1", "--method", "wild", "--variance-mode", "fixed",
        "--multiplier", "mammen", "--kn", "2,4", "--B", "200", "--seed", "9",
        "--add-one", "--alpha", "0.05", "--out", test_doc.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("decision"));
    let saved: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&test_doc).unwrap()).unwrap();
    let tests = saved["tests"].as_array().unwrap();
    assert_eq!(tests.len(), 2, "one record per kn");
    assert!(tests.iter().all(|t| t["reject"].is_boolean()));
    assert!(tests.iter().all(|t| t["method"].as_str().unwrap().contains("mammen")));

    // Configuration errors exit 2.
    let missing_kn = run(&["test", "--curves", curves, "--responses", responses,
        "--statistic", "t1", "--method", "wild"]);
    assert_eq!(code(&missing_kn), 2);
    assert!(stderr(&missing_kn).contains("--kn"));
    let incompatible = run(&["test", "--curves", curves, "--responses", responses,
        "--statistic", "t2", "--method", "asymptotic", "--kn", "2"]);
    assert_eq!(code(&incompatible), 2);
    let bad_alpha = run(&["test", "--curves", curves, "--responses", responses,
        "--alpha", "1.5", "--kn", "2"]);
    assert_eq!(code(&bad_alpha), 2);
    assert_eq!(code(&run(&["test", "--curves", curves, "--responses", responses,
        "--statistic", "t9", "--kn", "2"])), 2, "clap rejects unknown values");
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["--no-such-flag"])), 2);

    // Data errors exit 3 and carry coordinates where applicable.
    let broken = dir.path().join("broken.csv");
    let mut text = std::fs::read_to_string(curves).unwrap();
    text = text.replacen(",", ",oops", 1);
    std::fs::write(&broken, text).unwrap();
    let bad_cell = run(&["test", "--curves", broken.to_str().unwrap(),
        "--responses", responses, "--kn", "2"]);
    assert_eq!(code(&bad_cell), 3);
    assert!(stderr(&bad_cell).contains("row"), "stderr: {}", stderr(&bad_cell));

    let short = dir.path().join("short.csv");
    let all = std::fs::read_to_string(responses).unwrap();
    let truncated: Vec<&str> = all.lines().take(10).collect();
    std::fs::write(&short, truncated.join("\n")).unwrap();
    assert_eq!(code(&run(&["test", "--curves", curves,
        "--responses", short.to_str().unwrap(), "--kn", "2"])), 3);
    assert_eq!(code(&run(&["test", "--curves", "/nonexistent/curves.csv",
        "--responses", responses, "--kn", "2"])), 3);

    // Simulate: the bundled smoke scenario, with and without --out.
    let spec = smoke_spec_path();
    let spec = spec.to_str().unwrap();
    let sim_doc = dir.path().join("sim.json");
    let out = run(&["--threads", "1", "simulate", spec, "--out", sim_doc.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("alpha"), "table goes to stdout with --out");
    let saved: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&sim_doc).unwrap()).unwrap();
    assert_eq!(saved["kind"], "simulate");
    assert_eq!(saved["scenarios"].as_array().unwrap().len(), 2);

    let piped = run(&["simulate", spec]);
    assert_eq!(code(&piped), 0);
    assert_eq!(parse_document(&stdout(&piped))["kind"], "simulate");

    // An invalid scenario exits 2 and lists every problem at once.
    let bad_spec = dir.path().join("bad.spec");
    std::fs::write(
        &bad_spec,
        "[[scenario]]\nname = \"bad\"\nn = 20\np = 20\ndatasets = 0\nseed = 1\n\
         theta = \"zero\"\nr = 1.0\nalphas = [0.05]\nkn = [30]\nreplicates = 200\n\n\
         [[scenario.methods]]\nstatistic = \"t1\"\ncalibration = \"wild\"\n",
    )
    .unwrap();
    let invalid = run(&["simulate", bad_spec.to_str().unwrap()]);
    assert_eq!(code(&invalid), 2);
    let message = stderr(&invalid);
    for fragment in ["datasets", "sigma0", "kn"] {
        assert!(message.contains(fragment), "missing {fragment:?} in: {message}");
    }
    assert_eq!(code(&run(&["simulate", "/nonexistent.spec"])), 3);

    // Report re-renders saved documents of either kind.
    let report = run(&["report", test_doc.to_str().unwrap(), sim_doc.to_str().unwrap()]);
    assert_eq!(code(&report), 0);
    let text = stdout(&report);
    assert!(text.contains("decision") && text.contains("alpha"));
    let report_out = dir.path().join("combined.txt");
    assert_eq!(code(&run(&["report", sim_doc.to_str().unwrap(),
        "--out", report_out.to_str().unwrap()])), 0);
    assert!(std::fs::read_to_string(&report_out).unwrap().contains("alpha"));

    let not_json = dir.path().join("not.json");
    std::fs::write(&not_json, "not a document").unwrap();
    assert_eq!(code(&run(&["report", not_json.to_str().unwrap()])), 3);
}
