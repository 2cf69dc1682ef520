use std::path::Path;
use std::process::Command;

use ldgm::cli;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["ldgm".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn gen_encode_decode_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let code = dir.path().join("code.ldgm");
    let src = dir.path().join("y.txt");
    let x = dir.path().join("x.txt");
    let yhat = dir.path().join("yhat.txt");
    let stats = dir.path().join("stats.json");
    let trace = dir.path().join("trace.csv");

    let (rc, out, err) = run(&["gen", "--n", "500", "--rate", "0.5", "--seed", "3", "--out", p(&code)]);
    assert_eq!(rc, 0, "{err}");
    assert!(out.contains("n=500 m=250"), "{out}");

    let y = ldgm::bench::random_source(500, 8);
    ldgm::code::write_bits(&src, &y).unwrap();
    let (rc, out, err) = run(&[
        "encode", "--code", p(&code), "--in", p(&src), "--out", p(&x), "--stats", p(&stats), "--trace", p(&trace),
    ]);
    assert_eq!(rc, 0, "{err}");
    let reported: f64 = out.trim().strip_prefix("distortion ").unwrap().parse().unwrap();

    let (rc, _, err) = run(&["decode", "--code", p(&code), "--in", p(&x), "--out", p(&yhat)]);
    assert_eq!(rc, 0, "{err}");
    let yh = ldgm::code::read_bits(&yhat).unwrap();
    assert_eq!(ldgm::distortion(&y, &yh).unwrap(), reported);

    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&stats).unwrap()).unwrap();
    assert_eq!(json["distortion"].as_f64().unwrap(), reported);
    let trace = std::fs::read_to_string(&trace).unwrap();
    assert!(trace.starts_with("round,iter,residual\n"));
    assert!(trace.lines().count() > 1);

    // the same pipeline in-process gives the same bits
    let loaded = ldgm::code::load_code(&code).unwrap();
    let dist = ldgm::bench::default_distribution(0.5).unwrap();
    assert_eq!(loaded, ldgm::generate_code(500, 0.5, &dist, 3).unwrap());
    let (xr, _) = ldgm::encode(
        &loaded,
        &y,
        &ldgm::Weights::for_rate(0.5),
        &ldgm::MpParams::default(),
        &ldgm::DecimationPolicy::default(),
        0,
    )
    .unwrap();
    assert_eq!(ldgm::code::read_bits(&x).unwrap(), xr);
}

#[test]
fn decode_of_zero_word_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let code = dir.path().join("code.ldgm");
    let x = dir.path().join("x.txt");
    let y = dir.path().join("y.txt");
    run(&["gen", "--n", "60", "--rate", "0.5", "--out", p(&code)]);
    std::fs::write(&x, "0".repeat(30)).unwrap();
    let (rc, _, err) = run(&["decode", "--code", p(&code), "--in", p(&x), "--out", p(&y)]);
    assert_eq!(rc, 0, "{err}");
    assert_eq!(ldgm::code::read_bits(&y).unwrap(), vec![0; 60]);
}

#[test]
fn verify_single_check() {
    let dir = tempfile::tempdir().unwrap();
    let code = dir.path().join("one.ldgm");
    std::fs::write(&code, "LDGM v1 n=1 m=3\n0 1 2\n").unwrap();

    let (rc, out, _) = run(&["verify", "--code", p(&code), "--assignment", "*|***"]);
    assert_eq!(rc, 0);
    assert_eq!(out, "check 0: Free\nvalid\n");

    let (rc, out, _) = run(&["verify", "--code", p(&code), "--assignment", "0|000"]);
    assert_eq!(rc, 0);
    assert!(out.ends_with("invalid\n"), "{out}");

    let file = dir.path().join("asg.txt");
    std::fs::write(&file, "0|110\n").unwrap();
    let (rc, out, _) = run(&["verify", "--code", p(&code), "--assignment", p(&file)]);
    assert_eq!(rc, 0);
    assert!(out.starts_with("check 0: Forcing"), "{out}");

    let (rc, _, err) = run(&["verify", "--code", p(&code), "--assignment", "*|**"]);
    assert_eq!(rc, 1, "{err}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (rc, _, _) = run(&["gen", "--n", "10", "--rate", "1.5", "--out", p(&dir.path().join("c"))]);
    assert_eq!(rc, 1);
    let (rc, _, _) = run(&["decode", "--code", p(&dir.path().join("missing")), "--in", "x", "--out", "y"]);
    assert_eq!(rc, 1);
    let (rc, _, _) = run(&["frobnicate"]);
    assert_eq!(rc, 1);
    let (rc, out, _) = run(&["--help"]);
    assert_eq!(rc, 0);
    assert!(out.is_empty());

    let status = Command::new(env!("CARGO_BIN_EXE_ldgm")).args(["encode", "--alpha", "2"]).output().unwrap();
    assert_eq!(status.status.code(), Some(1));
}

#[test]
fn bench_is_reproducible_and_honours_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bench.cfg");
    std::fs::write(&cfg, "rates=0.5\nn=400\ntrials=2\nseed=9\nthreads=2\n").unwrap();
    let (t1, s1) = (dir.path().join("t1.csv"), dir.path().join("s1.csv"));
    let (rc, _, err) = run(&["bench", "--config", p(&cfg), "--out", p(&t1), "--summary", p(&s1)]);
    assert_eq!(rc, 0, "{err}");
    let trials = std::fs::read_to_string(&t1).unwrap();
    assert!(trials.starts_with(ldgm::bench::TRIALS_HEADER));
    assert_eq!(trials.lines().count(), 3);
    assert!(trials.lines().nth(1).unwrap().starts_with("0.5,400,"));

    let (rc, out, _) = run(&["bench", "--config", p(&cfg), "--threads", "1"]);
    assert_eq!(rc, 0);
    let summary = std::fs::read_to_string(&s1).unwrap();
    assert_eq!(out, format!("{trials}{summary}"));
}
