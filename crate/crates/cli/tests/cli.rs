use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ejs_sim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ejs-sim")).args(args).output().expect("binary runs")
}

fn data_rows(path: &Path) -> Vec<String> {
    fs::read_to_string(path).unwrap().lines().filter(|l| !l.starts_with('#')).skip(1).map(String::from).collect()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn grid_run_writes_one_row_per_cell() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = ejs_sim(&[
        "--channel", "bsc:0.1", "--scheme", "alg2,ghbz,pm", "--messages", "4,16", "--epsilon", "1e-2,1e-3",
        "--trials", "10000", "--seed", "7", "--out", out,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = data_rows(&dir.path().join("summary.csv"));
    assert_eq!(rows.len(), 12);
    let text = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert!(text.starts_with("# ejs-sim "));
    assert!(text.contains("sha256="));
    assert!(text.contains("# seed 7"));
}

#[test]
fn malformed_channel_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let ch = dir.path().join("bad.json");
    fs::write(&ch, r#"{"inputs": 2, "outputs": 2, "rows": [[0.9, 0.1], [0.5, 0.4]]}"#).unwrap();
    let o = ejs_sim(&["--channel", ch.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("channel-invalid"), "{}", stderr(&o));
}

#[test]
fn channel_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let ch = dir.path().join("bsc.json");
    fs::write(&ch, r#"{"inputs": 2, "outputs": 2, "rows": [[0.9, 0.1], [0.1, 0.9]]}"#).unwrap();
    let o = ejs_sim(&[
        "--channel", ch.to_str().unwrap(), "--messages", "4", "--trials", "50",
        "--out", dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn broken_scheme_fails_the_audit() {
    let dir = tempfile::tempdir().unwrap();
    let o = ejs_sim(&[
        "--channel", "bsc:0.1", "--scheme", "const", "--messages", "4", "--trials", "2", "--max-steps", "20",
        "--audit", "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(4));
    let err = stderr(&o);
    assert!(err.contains("rate-floor violated at step 0"), "{err}");
}

#[test]
fn scheme_channel_mismatch_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = ejs_sim(&["--channel", "kary:3:0.1", "--scheme", "ghbz", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("scheme-channel-mismatch"));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    for args in [
        vec!["--channel", "bsc:0.1", "--scheme", "nope", "--out", out],
        vec!["--channel", "bsc:0.1", "--epsilon", "2", "--out", out],
        vec!["--channel", "missing.json", "--out", out],
        vec!["--channel", "bsc:0.1", "--trials", "x", "--out", out],
        vec!["--channel", "bsc:0.1", "--sweep", "epsilon", "--epsilon", "1e-2", "--out", out],
    ] {
        let o = ejs_sim(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn same_seed_gives_identical_files() {
    let run = |dir: &Path| {
        let o = ejs_sim(&[
            "--channel", "bsc:0.1", "--scheme", "alg2,bz-prop", "--messages", "8", "--epsilon", "1e-2",
            "--trials", "300", "--seed", "42", "--audit", "--traces", "--out", dir.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    };
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run(a.path());
    run(b.path());
    let mut names: Vec<_> = walk(a.path());
    names.sort();
    assert!(names.len() >= 6);
    for rel in names {
        assert_eq!(fs::read(a.path().join(&rel)).unwrap(), fs::read(b.path().join(&rel)).unwrap(), "{rel}");
    }
}

fn walk(root: &Path) -> Vec<String> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push(p.strip_prefix(root).unwrap().to_string_lossy().into_owned());
            }
        }
    }
    out
}

#[test]
fn summary_is_reproducible_from_exported_trials_and_traces() {
    let dir = tempfile::tempdir().unwrap();
    let o = ejs_sim(&[
        "--channel", "bsc:0.1", "--scheme", "alg2", "--messages", "8", "--epsilon", "1e-2", "--trials", "400",
        "--seed", "3", "--traces", "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let summary = data_rows(&dir.path().join("summary.csv"));
    let cols: Vec<&str> = summary[0].split(',').collect();
    let (mean_tau, pe): (f64, f64) = (cols[3].parse().unwrap(), cols[5].parse().unwrap());

    let trials = data_rows(&dir.path().join("cells/alg2_M8_eps1e-2_trials.csv"));
    let taus: Vec<usize> = trials.iter().map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect();
    let errors = trials.iter().filter(|l| l.split(',').nth(4) == Some("false")).count();
    assert!((taus.iter().sum::<usize>() as f64 / taus.len() as f64 - mean_tau).abs() < 1e-9);
    assert_eq!(errors as f64 / trials.len() as f64, pe);

    let traces = data_rows(&dir.path().join("cells/alg2_M8_eps1e-2_traces.csv"));
    let mut steps = vec![0usize; trials.len()];
    for l in &traces {
        steps[l.split(',').next().unwrap().parse::<usize>().unwrap()] += 1;
    }
    assert_eq!(steps, taus);
}

#[test]
fn sweeps_emit_frontier_columns() {
    let dir = tempfile::tempdir().unwrap();
    let o = ejs_sim(&[
        "--channel", "bsc:0.1", "--scheme", "alg2", "--messages", "16", "--epsilon", "1e-1,1e-2,1e-3,1e-4",
        "--trials", "500", "--sweep", "epsilon", "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert!(text.contains("# slope alg2 "));
    let rows = data_rows(&dir.path().join("sweep.csv"));
    assert_eq!(rows.len(), 4);
    let taus: Vec<f64> = rows.iter().map(|r| r.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert!(taus.windows(2).all(|w| w[0] < w[1]));

    let dir = tempfile::tempdir().unwrap();
    let o = ejs_sim(&[
        "--channel", "bsc:0.1", "--messages", "2,4,8,16", "--epsilon", "1e-2", "--trials", "300",
        "--sweep", "M", "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(data_rows(&dir.path().join("sweep.csv")).len(), 4);
}
