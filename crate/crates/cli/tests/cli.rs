use std::process::Command;

use ptolemy_cli::{run, Outcome};
use ptolemy_core::frieze::FriezeGrid;
use ptolemy_core::hyperbolic::DecoratedIdealPolygon;
use ptolemy_core::seed::ExchangeGraphExport;
use ptolemy_core::{EdgeValues, Quiver, Seed, Triangulation};

const A2: &str = r#"{"n":2,"b":[[0,1],[-1,0]]}"#;
const OCTAGON: &str = "8\n1 3\n3 8\n4 8\n4 6\n4 7\n";

fn lab(args: &[&str], stdin: &str) -> Outcome {
    let mut argv = vec!["ptolemy-lab"];
    argv.extend_from_slice(args);
    run(argv, &mut stdin.as_bytes())
}

fn ok(args: &[&str], stdin: &str) -> String {
    let out = lab(args, stdin);
    assert_eq!(out.code, 0, "{args:?}: {}{}", out.stdout, out.stderr);
    out.stdout
}

fn file(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn explore_a2() {
    let out = ok(&["explore"], A2);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("nodes=5 edges=5 variables=5 complete=true"));
    let vars: Vec<&str> = lines.collect();
    assert_eq!(vars.len(), 5);
    assert!(vars.contains(&"x1^-1*x2 + x1^-1"));
    assert!(vars.contains(&"x2^-1 + x1^-1 + x1^-1*x2^-1"));
}

#[test]
fn explore_ignores_input_labeling() {
    let a3 = Quiver::path(3);
    let reference = ok(&["explore"], &a3.to_json());
    for perm in [[1, 0, 2], [2, 1, 0], [0, 2, 1], [1, 2, 0]] {
        assert_eq!(ok(&["explore"], &a3.permuted(&perm).to_json()), reference, "{perm:?}");
    }
    assert!(reference.starts_with("nodes=14 edges=21 variables=9 complete=true\n"));
}

#[test]
fn explore_json_export_reparses() {
    let out = ok(&["--format", "json", "explore"], &Quiver::path(3).to_json());
    let export: ExchangeGraphExport = serde_json::from_str(&out).unwrap();
    assert_eq!(export.nodes.len(), 14);
    assert_eq!(export.edges.len(), 21);
    for node in export.nodes {
        let seed = Seed::try_from(node.seed.clone()).unwrap();
        assert_eq!(Seed::parse(&seed.to_json()).unwrap(), seed);
    }
}

#[test]
fn quiver_mutate_three_cycle() {
    let cycle = r#"{"n":3,"b":[[0,1,-1],[-1,0,1],[1,-1,0]]}"#;
    let out = ok(&["quiver-mutate", "--k", "2"], cycle);
    let q: Quiver = serde_json::from_str(&out).unwrap();
    assert_eq!(q.b(0, 2), 0);
    assert_eq!(q.b(0, 1), -1);
    assert_eq!(q.b(1, 2), -1);
    let back = ok(&["quiver-mutate", "--k", "2"], &out);
    assert_eq!(serde_json::from_str::<Quiver>(&back).unwrap(), serde_json::from_str::<Quiver>(cycle).unwrap());
}

#[test]
fn seed_mutate_round_trips() {
    let text = ok(&["seed-mutate", "--k", "1,2,1"], A2);
    let expected = Seed::initial(Quiver::path(2)).mutate_sequence(&[0, 1, 0]).unwrap();
    assert_eq!(Seed::parse(&text).unwrap(), expected);
    let json = ok(&["--format", "json", "seed-mutate", "-k", "1", "-k", "2", "-k", "1"], A2);
    assert_eq!(Seed::parse(&json).unwrap(), expected);
    // mutating the printed seed again continues from it
    let further = ok(&["seed-mutate", "--k", "2,1"], &text);
    assert!(Seed::parse(&further).unwrap().equal_up_to_permutation(&Seed::initial(Quiver::path(2))).is_some());
}

#[test]
fn octagon_frieze() {
    let dir = tempfile::tempdir().unwrap();
    let t = file(&dir, "octagon.txt", OCTAGON);
    let out = ok(&["frieze-gen", "--m", "8", "--triangulation", &t], "");
    let grid = FriezeGrid::parse(&out).unwrap();
    assert_eq!(grid.to_text(), out);
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows[0], "8");
    assert_eq!(rows[2], " 1 3 4 1 2 2 3 2");
    assert_eq!(rows[3], "1 2 11 3 1 3 5 5");
    assert_eq!(rows[4], " 1 7 8 2 1 7 8 2");
    assert_eq!(rows[5], "1 3 5 5 1 2 11 3");
    assert_eq!(rows[6], " 2 2 3 2 1 3 4 1");

    assert!(ok(&["frieze-check"], &out).starts_with("ok=true"));
    let unitary = ok(&["frieze-unitary"], &out);
    let cert = unitary.strip_prefix("unitary=true\n").unwrap();
    assert_eq!(Triangulation::parse(cert).unwrap(), Triangulation::parse(OCTAGON).unwrap());

    let json = ok(&["--format", "json", "frieze-gen", "--triangulation", &t], "");
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["quiddity"], serde_json::json!(["2", "1", "3", "4", "1", "2", "2", "3"]));
    assert_eq!(v["values"]["2-5"], "11");
    assert!(ok(&["frieze-check"], &json).starts_with("ok=true"));
}

#[test]
fn rational_frieze_from_values() {
    let dir = tempfile::tempdir().unwrap();
    let t = file(&dir, "t.txt", "5\n1 3\n1 4\n");
    let vals = file(&dir, "v.txt", "1-3 2\n1-4 3/2\n");
    let out = ok(&["frieze-gen", "--triangulation", &t, "--values", &vals], "");
    assert!(out.contains("3/2"));
    let report = ok(&["frieze-check"], &out);
    assert!(report.contains("integer=false"), "{report}");
    assert_eq!(ok(&["frieze-unitary"], &out), "unitary=false\n");
}

#[test]
fn random_frieze_is_seeded() {
    let a = ok(&["frieze-gen", "--m", "9", "--seed", "4"], "");
    assert_eq!(a, ok(&["frieze-gen", "--m", "9", "--seed", "4"], ""));
    assert!(ok(&["frieze-check"], &a).starts_with("ok=true"));
    let distinct: std::collections::BTreeSet<String> =
        (0..8).map(|s| ok(&["frieze-gen", "--m", "9", "--seed", &s.to_string()], "")).collect();
    assert!(distinct.len() > 1);
}

#[test]
fn broken_frieze_fails_the_check() {
    let out = lab(&["frieze-check"], "4\n1 1 1 1\n 1 3 1 2\n1 1 1 1\n");
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("ok=false") && out.stdout.contains("violation"), "{}", out.stdout);
}

#[test]
fn pluecker_round_trips() {
    let text = ok(&["pluecker"], "1 0 -1 2\n0 1 3 1/2\n");
    let json = ok(&["--format", "json", "pluecker"], "1 0 -1 2\n0 1 3 1/2\n");
    let p = EdgeValues::parse(&text).unwrap();
    assert_eq!(EdgeValues::parse(&json).unwrap(), p);
    assert_eq!(p.to_text(), text);
    assert_eq!(p.len(), 6);
    assert_eq!(ok(&["pluecker-verify"], &text), "n=4 checked=1 violations=0\n");

    let mut broken = p.clone();
    broken.insert("1-3".parse().unwrap(), "17".parse().unwrap());
    let out = lab(&["pluecker-verify"], &broken.to_text());
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("violation 1 2 3 4"));
}

#[test]
fn random_pluecker_is_seeded() {
    let a = ok(&["pluecker", "--random", "7", "--seed", "3"], "");
    assert_eq!(a, ok(&["pluecker", "--random", "7", "--seed", "3"], ""));
    assert_ne!(a, ok(&["pluecker", "--random", "7", "--seed", "4"], ""));
    assert!(ok(&["pluecker-verify"], &a).ends_with("violations=0\n"));
}

#[test]
fn euclidean_ptolemy() {
    let out = ok(&["ptolemy-euclid", "--inline", "0 0 1 0 1 1 0 1"], "");
    assert!(out.ends_with("cyclic=true\n"), "{out}");
    let out = ok(&["--format", "json", "ptolemy-euclid"], "0 0\n1 0\n1 1\n0 2\n");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["cyclic"], false);
    assert!(v["residual"].as_f64().unwrap() > 0.0);
}

#[test]
fn realize_then_lambda() {
    let dir = tempfile::tempdir().unwrap();
    let t = file(&dir, "oct.txt", OCTAGON);
    let text = ok(&["realize", "--triangulation", &t], "");
    let polygon = DecoratedIdealPolygon::parse(&text).unwrap();
    assert_eq!(polygon.to_text(), text);
    let json = ok(&["--format", "json", "realize", "--triangulation", &t], "");
    assert_eq!(DecoratedIdealPolygon::parse(&json).unwrap().to_text(), text);

    let lambdas = ok(&["lambda"], &text);
    assert!(lambdas.lines().any(|l| l == "2-5 11.0000000000"), "{lambdas}");
    let map: std::collections::BTreeMap<String, f64> =
        serde_json::from_str(&ok(&["--format", "json", "lambda"], &json)).unwrap();
    assert_eq!(map.len(), 28);
    assert!((map["2-5"] - 11.0).abs() < 1e-9);
}

#[test]
fn domain_errors_exit_1() {
    for (args, stdin, kind) in [
        (&["quiver-mutate", "--k", "3"][..], A2, "InvalidVertex"),
        (&["seed-mutate", "--k", "2"][..], r#"{"n":2,"frozen":[2],"b":[[0,1],[-1,0]]}"#, "FrozenVertex"),
        (&["pluecker"][..], "1 2 3\n2 4 6\n", "DegenerateSubspace"),
        (&["ptolemy-euclid"][..], "0 0 0 0 1 1 0 1", "CoincidentPoints"),
    ] {
        let out = lab(args, stdin);
        assert_eq!(out.code, 1, "{args:?}: {}", out.stdout);
        assert!(out.stdout.starts_with(&format!("error: {kind}: ")), "{}", out.stdout);
    }
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let crossing = file(&dir, "x.txt", "6\n1 4\n2 5\n3 6\n");
    for (args, stdin) in [
        (vec!["quiver-mutate", "--k", "1"], "{oops"),
        (vec!["quiver-mutate", "--k", "1"], r#"{"n":2,"b":[[0,1],[1,0]]}"#),
        (vec!["seed-mutate", "--k", "1"], "{\"n\":2,\"b\":[[0,1],[-1,0]]}\nx1\nx3*\n"),
        (vec!["frieze-gen", "--triangulation", crossing.as_str()], ""),
        (vec!["frieze-gen", "--triangulation", "/nonexistent/file"], ""),
        (vec!["frieze-gen"], ""),
        (vec!["frieze-check"], "4\n1 1 1\n 1 1\n"),
        (vec!["pluecker"], "1 2\n3\n"),
        (vec!["lambda"], "inf 1\ninf 1\n0 1\n"),
        (vec!["ptolemy-euclid"], "1 2 3"),
        (vec!["explore", "--max-nodes", "lots"], A2),
    ] {
        let out = lab(&args, stdin);
        assert_eq!(out.code, 2, "{args:?} on {stdin:?}: {}", out.stdout);
        assert!(out.stdout.starts_with("error: "));
    }
}

#[test]
fn output_is_deterministic() {
    let q = Quiver::path(4).to_json();
    let a = ok(&["--format", "json", "explore"], &q);
    for _ in 0..3 {
        assert_eq!(ok(&["--format", "json", "explore"], &q), a);
    }
}

#[test]
fn dot_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.dot");
    ok(&["explore", "--dot", path.to_str().unwrap()], A2);
    let dot = std::fs::read_to_string(&path).unwrap();
    assert!(dot.starts_with("graph exchange {"));
    assert_eq!(dot.matches(" -- ").count(), 5);

    let qpath = dir.path().join("q.dot");
    ok(&["quiver-mutate", "--k", "1", "--dot", qpath.to_str().unwrap()], A2);
    assert!(std::fs::read_to_string(&qpath).unwrap().starts_with("digraph"));
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ptolemy-lab"))
}

fn with_stdin(mut cmd: Command, stdin: &str) -> std::process::Output {
    use std::io::Write;
    use std::process::Stdio;
    let mut child = cmd.stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

#[test]
fn max_nodes_flag_beats_env_beats_default() {
    let a3 = Quiver::path(3).to_json();

    let mut cmd = binary();
    cmd.arg("explore").env("PTOLEMY_LAB_MAX_NODES", "3");
    let out = with_stdin(cmd, &a3);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("nodes=3 "));

    let mut cmd = binary();
    cmd.args(["explore", "--max-nodes", "100"]).env("PTOLEMY_LAB_MAX_NODES", "3");
    let out = with_stdin(cmd, &a3);
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("nodes=14 edges=21 variables=9 complete=true"));

    let mut cmd = binary();
    cmd.arg("explore").env_remove("PTOLEMY_LAB_MAX_NODES");
    let out = with_stdin(cmd, &a3);
    assert!(String::from_utf8(out.stdout).unwrap().contains("complete=true"));

    let mut cmd = binary();
    cmd.arg("explore").env("PTOLEMY_LAB_MAX_NODES", "many");
    assert_eq!(with_stdin(cmd, &a3).status.code(), Some(2));
}

#[test]
fn binary_exit_codes() {
    let mut cmd = binary();
    cmd.args(["quiver-mutate", "--k", "9"]);
    let out = with_stdin(cmd, A2);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("error: InvalidVertex"));
}
