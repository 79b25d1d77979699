use std::fs;
use std::path::{Path, PathBuf};

use tca_core::fixtures::{f1, f9, f9d, single_block, F7_SOURCE, ZENO_SOURCE};
use tca_core::io::graph_to_json;
use tca_core::TcaGraph;

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn tca(args: &[&str]) -> Out {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = tca_cli::run(std::iter::once("tca").chain(args.iter().copied()), &mut out, &mut err);
    Out {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn put(dir: &Path, g: &TcaGraph) -> String {
    let p = dir.join(format!("{}.tca", g.name));
    fs::write(&p, graph_to_json(g)).unwrap();
    p.to_str().unwrap().to_string()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn version_lists_formats() {
    let o = tca(&["--version"]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.contains("graph format 1, schedule format 1"), "{}", o.stdout);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(tca(&[]).code, 2);
    assert_eq!(tca(&["schedule", "x.tca"]).code, 2);
    assert_eq!(tca(&["schedule", "x.tca", "--horizon", "-1"]).code, 2);
    let o = tca(&["schedule", "/nonexistent.tca", "--horizon", "10"]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("/nonexistent.tca"));
}

#[test]
fn schedule_then_validate() {
    let d = tempfile::tempdir().unwrap();
    let g = put(d.path(), &f1());
    let s = path(d.path(), "f1.schedule");
    let o = tca(&["schedule", &g, "--horizon", "10", "-o", &s]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(fs::read_to_string(&s).unwrap().contains(r#""status": "ok""#));
    let v = tca(&["validate", &s, "--against", &g]);
    assert_eq!((v.code, v.stdout.as_str()), (0, "valid\n"));
}

#[test]
fn validate_reports_tampered_schedule() {
    let d = tempfile::tempdir().unwrap();
    let g = put(d.path(), &f1());
    let s = path(d.path(), "f1.schedule");
    tca(&["schedule", &g, "--horizon", "10", "-o", &s]);
    // Shift the whole d segment before its sync date.
    let text = fs::read_to_string(&s).unwrap().replacen(r#""start": "7""#, r#""start": "6""#, 1);
    fs::write(&s, text).unwrap();
    assert_eq!(tca(&["validate", &s, "--against", &g]).code, 1);
}

#[test]
fn overload_is_infeasible() {
    let d = tempfile::tempdir().unwrap();
    let g = put(d.path(), &single_block("overload", 4, 3));
    let verdict = path(d.path(), "v.json");
    let o = tca(&["feasible", &g, "--horizon", "3", "-o", &verdict]);
    assert_eq!(o.code, 1);
    assert!(o.stdout.starts_with("infeasible\n"), "{}", o.stdout);
    assert!(fs::read_to_string(&verdict).unwrap().contains("certificate"));
    let ok = put(d.path(), &single_block("fits", 3, 3));
    assert_eq!(tca(&["feasible", &ok, "--horizon", "3"]).stdout, "feasible\n");
}

#[test]
fn schedule_miss_exits_1() {
    let d = tempfile::tempdir().unwrap();
    let g = put(d.path(), &single_block("overload", 4, 3));
    let o = tca(&["schedule", &g, "--horizon", "5", "--miss-policy", "record"]);
    assert_eq!(o.code, 1);
    assert!(o.stdout.contains(r#""status": "deadline-miss""#), "{}", o.stdout);
}

#[test]
fn gantt_text_and_svg() {
    let d = tempfile::tempdir().unwrap();
    let g = put(d.path(), &f1());
    let s = path(d.path(), "f1.schedule");
    tca(&["schedule", &g, "--horizon", "10", "-o", &s]);
    let t = tca(&["gantt", &s]);
    assert_eq!(t.code, 0);
    assert_eq!(t.stdout.lines().nth(1), Some("f1    . a b b c . . d d ."));
    let svg = tca(&["gantt", &s, "--format", "svg", "--px-per-tick", "10"]);
    assert!(svg.stdout.starts_with("<svg") && svg.stdout.contains("polygon"));
}

#[test]
fn choice_script_picks_branch() {
    let d = tempfile::tempdir().unwrap();
    let (a, b) = (put(d.path(), &f9()), put(d.path(), &f9d()));
    let script = path(d.path(), "u.txt");
    fs::write(&script, "f9 0 1\n").unwrap();
    let o = tca(&["schedule", &a, &b, "--horizon", "8", "--choices", &script]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(o.stdout.contains(r#""block": "c""#));
    assert!(!o.stdout.contains(r#""block": "b""#));

    fs::write(&script, "").unwrap();
    let o = tca(&["schedule", &a, &b, "--horizon", "8", "--choices", &script]);
    assert!(o.stdout.contains(r#""block": "b""#));

    fs::write(&script, "f9 0 5\n").unwrap();
    assert_eq!(tca(&["schedule", &a, &b, "--horizon", "8", "--choices", &script]).code, 2);
    fs::write(&script, "f9 zero 1\n").unwrap();
    assert_eq!(tca(&["schedule", &a, &b, "--horizon", "8", "--choices", &script]).code, 2);
}

#[test]
fn choices_all_lists_branches() {
    let d = tempfile::tempdir().unwrap();
    let (a, b) = (put(d.path(), &f9()), put(d.path(), &f9d()));
    let o = tca(&["schedule", &a, &b, "--horizon", "8", "--choices-all"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["branches"].as_array().unwrap().len(), 2);
    assert_eq!(o.stderr.lines().count(), 2);
}

#[test]
fn compile_writes_agents_and_renders_errors() {
    let d = tempfile::tempdir().unwrap();
    let src = path(d.path(), "f7.psi");
    fs::write(&src, F7_SOURCE).unwrap();
    let o = tca(&["compile", &src, "-o", d.path().to_str().unwrap()]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(PathBuf::from(path(d.path(), "f7.tca")).exists());

    let z = path(d.path(), "z.psi");
    fs::write(&z, ZENO_SOURCE).unwrap();
    let o = tca(&["compile", &z]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("z.psi:1:11:"), "{}", o.stderr);
    assert!(o.stderr.contains('^'));
}

#[test]
fn unfold_and_cdi_write_graphs() {
    let d = tempfile::tempdir().unwrap();
    let src = path(d.path(), "f7.psi");
    fs::write(&src, F7_SOURCE).unwrap();
    tca(&["compile", &src, "-o", d.path().to_str().unwrap()]);
    let g = path(d.path(), "f7.tca");
    let t = path(d.path(), "tree.tca");
    assert_eq!(tca(&["unfold", &g, "--horizon", "3", "-o", &t]).code, 0);
    let o = tca(&["cdi", &t]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(o.stdout.contains("\"labeling\": \"absolute\""), "{}", o.stdout);
    assert_eq!(tca(&["simplify", &g]).code, 0);
}

#[test]
fn visibility_manifest() {
    let d = tempfile::tempdir().unwrap();
    let (a, b) = (put(d.path(), &single_block("s", 1, 3)), put(d.path(), &single_block("r", 1, 8)));
    let m = path(d.path(), "links.json");
    fs::write(
        &m,
        r#"{"sender": {"agent": "s", "block": "x"}, "receiver": {"agent": "r", "block": "x"}, "visibility": 3}"#,
    )
    .unwrap();
    // The receiver may start at 0, before the sender's deadline.
    let o = tca(&["visibility", &m, &a, &b, "--horizon", "10"]);
    assert_eq!(o.code, 1, "{}{}", o.stdout, o.stderr);
    assert!(o.stdout.contains("receiver may start at 0"), "{}", o.stdout);
}

#[test]
fn corpus_is_reproducible() {
    let d = tempfile::tempdir().unwrap();
    let (x, y) = (path(d.path(), "x"), path(d.path(), "y"));
    assert_eq!(tca(&["corpus", "--seed", "7", "--count", "3", "-o", &x]).code, 0);
    tca(&["corpus", "--seed", "7", "--count", "3", "-o", &y]);
    for i in ["0000", "0001", "0002"] {
        let a = fs::read_to_string(Path::new(&x).join(i).join("horizon")).unwrap();
        let b = fs::read_to_string(Path::new(&y).join(i).join("horizon")).unwrap();
        assert_eq!(a, b);
    }
}
