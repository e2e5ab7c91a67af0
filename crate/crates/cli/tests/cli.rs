use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const TWISTED_CUBIC: &str =
    r#"{"schema_version":1,"system":{"kind":"projective","n":1,"b_degrees":[0],"l_degree":3}}"#;

fn koszul(dir: &Path, config: &str, args: &[&str]) -> Output {
    let path = dir.join("run.json");
    fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_koszul"))
        .args(args)
        .arg("--config")
        .arg(&path)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn betti_csv_for_twisted_cubic() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("betti.csv");
    let o = koszul(
        dir.path(),
        TWISTED_CUBIC,
        &["betti", "--out", csv.to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("p,q,dim\n"));
    for row in ["0,0,1", "1,1,3", "2,1,2", "3,1,0", "1,2,0"] {
        assert!(text.lines().any(|l| l == row), "missing {row}");
    }
    assert!(stdout(&o).contains("total: 1 3 2"));
}

#[test]
fn empty_q_range_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"schema_version":1,"system":{"kind":"projective","n":1,"b_degrees":[0],"l_degree":3},
                  "betti":{"q_min":2,"q_max":1}}"#;
    assert_eq!(koszul(dir.path(), cfg, &["betti"]).status.code(), Some(2));
}

#[test]
fn malformed_config_exits_2() {
    let dir = TempDir::new().unwrap();
    assert_eq!(koszul(dir.path(), "{", &["betti"]).status.code(), Some(2));
    let cfg = r#"{"schema_version":1,"extra":0,"system":{"kind":"projective","n":1,"b_degrees":[0],"l_degree":3}}"#;
    assert_eq!(koszul(dir.path(), cfg, &["betti"]).status.code(), Some(2));
}

#[test]
fn oversized_p_max_is_clipped_with_a_warning() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"schema_version":1,"system":{"kind":"projective","n":1,"b_degrees":[0],"l_degree":3},
                  "betti":{"p_max":9}}"#;
    let o = koszul(dir.path(), cfg, &["betti"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("clipped"));
    assert!(!stdout(&o).contains("\n5,0,"));
}

#[test]
fn oracle_compare_agrees() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"schema_version":1,"system":{"kind":"projective","n":2,"b_degrees":[0],"l_degree":2}}"#;
    let o = koszul(dir.path(), cfg, &["oracle-compare"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0 disagreements"));
}

#[test]
fn insufficient_degree_bound_is_refused() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"schema_version":1,"system":{"kind":"projective","n":1,"b_degrees":[0],"l_degree":3},
                  "oracle":{"p_max":3,"degree_bound":5}}"#;
    let o = koszul(dir.path(), cfg, &["oracle-compare"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn duality_on_rational_normal_quartic() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"schema_version":1,"system":{"kind":"projective","n":1,"b_degrees":[0],"l_degree":4}}"#;
    let o = koszul(dir.path(), cfg, &["duality"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("K_{3,1}(B,L) = 3 vs K_{0,1}(B*+K,L) = 3: agree"));
    assert!(!out.contains(": disagree"));
}

#[test]
fn duality_refuses_polytopes() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"schema_version":1,"system":{"kind":"polytope","variety_dim":1,
                  "l_points":[[0],[1],[2]],"b_points":[[[0]]]}}"#;
    assert_eq!(koszul(dir.path(), cfg, &["duality"]).status.code(), Some(2));
}

#[test]
fn sweep_and_fit() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"schema_version":1,"system":{"kind":"projective","n":1,"b_degrees":[0],"l_degree":1},
                  "family":{"a_degrees":[1],"p_degrees":[1]},
                  "sweep":{"p":1,"q":1,"d_from":1,"d_to":6},
                  "fit":{"train":[1,4],"holdout":[4,6]}}"#;
    let o = koszul(dir.path(), cfg, &["sweep"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().skip_while(|l| *l != "d,dim").skip(1).collect();
    assert_eq!(rows, ["1,1", "2,3", "3,6", "4,10", "5,15", "6,21"]);

    // Train and holdout may not overlap.
    assert_eq!(koszul(dir.path(), cfg, &["fit"]).status.code(), Some(2));
    let cfg = cfg.replace("[4,6]", "[5,6]");
    let o = koszul(dir.path(), &cfg, &["fit"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("verdict: validated"));
}

#[test]
fn equivariant_small_case() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"schema_version":1,"system":{"kind":"projective","n":1,"b_degrees":[0],"l_degree":3},
                  "equivariant":{"n":2}}"#;
    let o = koszul(dir.path(), cfg, &["equivariant"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("q=1: invariant complex 3, K_{1,1} = 3: equal"));
    assert!(!out.contains("DIFFERENT"));
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"schema_version":1,"system":{"kind":"projective","n":2,"b_degrees":[0],"l_degree":2}}"#;
    let one = koszul(dir.path(), cfg, &["betti", "--threads", "1"]);
    let four = koszul(dir.path(), cfg, &["betti", "--threads", "4"]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    let one = koszul(dir.path(), cfg, &["oracle-compare", "--threads", "1"]);
    let four = koszul(dir.path(), cfg, &["oracle-compare", "--threads", "4", "--certify"]);
    assert_eq!(one.stdout, four.stdout);
}
