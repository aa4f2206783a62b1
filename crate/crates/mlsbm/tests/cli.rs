//! End-to-end runs of the binary: outputs, determinism and exit codes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const TINY: &str = "# two communities, three layers\nn = 16\nK = 2\nL = 3\nB = 0.9, 0.1; 0.1, 0.9\nrho_grid = 0.5, 1.0\ntrials = 2\nmethods = sum, sos_debias\nbase_seed = 0x2a\n";

fn mlsbm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mlsbm")).args(args).output().expect("spawn mlsbm")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn simulate_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "tiny.cfg", TINY);
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for out in [&a, &b] {
        let o = mlsbm(&["simulate", "--config", s(&cfg), "--out", s(out)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (a, b) = (fs::read(a).unwrap(), fs::read(b).unwrap());
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("rho,L,n,K,method,weighted,trial,seed,misclustered,rate\n"));
    assert_eq!(text.lines().count(), 1 + 2 * 2 * 2);
}

#[test]
fn plot_from_simulation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "tiny.cfg", TINY);
    let csv = dir.path().join("r.csv");
    assert!(mlsbm(&["simulate", "--config", s(&cfg), "--out", s(&csv)]).status.success());
    let svg = dir.path().join("r.svg");
    let args = ["plot", "--csv", s(&csv), "--x", "rho", "--y", "rate", "--series", "method", "--out", s(&svg)];
    assert!(mlsbm(&args).status.success());
    let text = fs::read_to_string(&svg).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("<polyline")).count(), 2);

    let missing = ["plot", "--csv", s(&csv), "--x", "rho", "--y", "nope", "--out", s(&svg)];
    assert_eq!(mlsbm(&missing).status.code(), Some(1));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o.csv");
    let bad = write(dir.path(), "bad.cfg", "n = 4\nK = 5\nL = 1\nB = 0.5\nrho_grid = 0.5\n");
    let unknown = write(dir.path(), "unknown.cfg", "colour = blue\n");
    let cases: [(Vec<&str>, i32); 6] = [
        (vec!["simulate", "--config", s(&bad), "--out", s(&out)], 1),
        (vec!["simulate", "--config", s(&unknown), "--out", s(&out)], 1),
        (vec!["figure", "fig9", "--out-dir", s(dir.path())], 1),
        (vec!["frobnicate"], 1),
        (vec!["simulate", "--config", "/nonexistent/x.cfg", "--out", s(&out)], 2),
        (vec!["--help"], 0),
    ];
    for (args, code) in cases {
        let o = mlsbm(&args);
        assert_eq!(o.status.code(), Some(code), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    assert!(!out.exists());
}

#[test]
fn unwritable_output_is_a_runtime_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "tiny.cfg", TINY);
    let o = mlsbm(&["simulate", "--config", s(&cfg), "--out", "/nonexistent/dir/out.csv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn concentration_reports_slopes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg =
        write(dir.path(), "mc.cfg", "statistic = s1\nn = 20\nL_grid = 2, 4, 8\nrho_grid = 0.2\nreps = 5\nseed = 3\n");
    let out = dir.path().join("mc.csv");
    let o = mlsbm(&["concentration", "--config", s(&cfg), "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("rho=0.2 slope="));
    let text = fs::read_to_string(out).unwrap();
    assert!(text.starts_with("statistic,n,L,rho,rep,seed,value\n"));
    assert_eq!(text.lines().count(), 1 + 3 * 5);
}

#[test]
fn pipeline_on_fixture() {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/expression");
    let dir = tempfile::tempdir().unwrap();
    let layers: Vec<PathBuf> = (1..=3).map(|l| fixtures.join(format!("layer{l}.csv"))).collect();
    let mut args = vec!["pipeline", "--layers"];
    args.extend(layers.iter().map(|p| s(p)));
    args.extend(["--tau", "0.72", "--min-degree", "90", "--k", "2", "--out-dir", s(dir.path())]);
    let o = mlsbm(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let diag = fs::read_to_string(dir.path().join("diagnostics.csv")).unwrap();
    assert!(diag.starts_with("layer,nodes,edges,components,max_degree,median_degree,powerlaw_stat\n"));
    assert_eq!(diag.lines().count(), 4);
    assert_eq!(fs::read_to_string(dir.path().join("genes.csv")).unwrap().lines().count(), 121);
    assert_eq!(fs::read_to_string(dir.path().join("membership.csv")).unwrap().lines().count(), 121);
    for l in 0..3 {
        let edges = fs::read_to_string(dir.path().join(format!("layer_{l}.edges"))).unwrap();
        for line in edges.lines() {
            let (i, j) = line.split_once(',').unwrap();
            assert!(i.parse::<usize>().unwrap() < j.parse::<usize>().unwrap());
        }
    }

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "a,b\n1,\n2,3\n4,5\n").unwrap();
    let o = mlsbm(&["pipeline", "--layers", s(&bad), "--out-dir", s(dir.path())]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn fig5_figure() {
    let dir = tempfile::tempdir().unwrap();
    let o = mlsbm(&["figure", "fig5", "--out-dir", s(dir.path()), "--seed", "4"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["fig5_degrees.csv", "fig5_summary.csv", "fig5.svg"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}
