use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use motion_code::MotionCode;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_motion-code"))
}

fn run(args: &[&str], stdin: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout_of(args: &[&str], stdin: &str) -> String {
    let out = run(args, stdin);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// Compares against `tests/golden/<name>`; set UPDATE_GOLDEN=1 to rewrite.
fn golden(name: &str, actual: &str) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("{}: {e} (run with UPDATE_GOLDEN=1)", path.display()));
    assert_eq!(actual, expected, "golden mismatch for {name}");
}

#[test]
fn parse_golden() {
    golden("parse_flip.txt", &stdout_of(&["parse", "101-0-01-01-0"], ""));
    golden(
        "parse_mix.json",
        &stdout_of(&["--format", "json", "parse", "111-1-11-00-0"], ""),
    );
}

#[test]
fn enumerate_golden() {
    let text = stdout_of(&["enumerate"], "");
    assert_eq!(text.lines().count(), 180);
    for line in text.lines() {
        MotionCode::parse(line).unwrap();
    }
    golden("enumerate.txt", &text);
}

#[test]
fn nearest_golden() {
    golden("nearest_pick.txt", &stdout_of(&["nearest", "100-0-01-00-0"], ""));
}

#[test]
fn dist_json() {
    assert_eq!(
        stdout_of(&["--format", "json", "dist", "100-1-01-11-0", "111-1-01-11-0"], ""),
        "{\n  \"components\": 1,\n  \"hamming\": 2\n}\n"
    );
}

#[test]
fn wizard_script_golden() {
    let script = "# flip\ny\nrigid\ncontinuous\nacyclic\n1\n1\nn\n\n\
                  # unlisted\ny\nsoft\ncontinuous\ncyclic\n1\n0\nn\n";
    golden("wizard_script.txt", &stdout_of(&["wizard", "--script", "-"], script));
}

#[test]
fn codebook_export_golden() {
    let exported = stdout_of(&["codebook", "export"], "");
    golden("codebook_export.json", &exported);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("book.json");
    std::fs::write(&path, &exported).unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(stdout_of(&["codebook", "validate", p], ""), "ok: 20 entries, 49 verbs\n");
    assert_eq!(
        stdout_of(&["--codebook", p, "parse", "000-0-00-01-0"], "").lines().last(),
        Some("verbs        pour")
    );
}

#[test]
fn bad_inputs_exit_nonzero() {
    let out = run(&["parse", "1010-01-01-0"], "");
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert_eq!(run(&["nearest"], "").status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dup.json");
    std::fs::write(
        &path,
        r#"[{"code":"000-0-00-01-0","verbs":["pour"]},{"code":"000-0-00-01-0","verbs":["tip"]}]"#,
    )
    .unwrap();
    let out = run(&["codebook", "validate", path.to_str().unwrap()], "");
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("000-0-00-01-0"));
}

fn pipeline(dir: &Path) -> (String, String) {
    let p = |name: &str| -> String { dir.join(name).to_str().unwrap().to_string() };
    stdout_of(
        &["synth", "--n", "240", "--sigma", "0.3", "--seed", "5", "--output", &p("data.jsonl"),
          "--embeddings-out", &p("emb.txt")],
        "",
    );
    let trace = stdout_of(
        &["train", "--data", &p("data.jsonl"), "--embeddings", &p("emb.txt"), "--use-nouns",
          "--epochs", "4", "--seed", "3", "--output", &p("model.json")],
        "",
    );
    let report = stdout_of(
        &["--format", "json", "eval", "--model", &p("model.json"), "--data", &p("data.jsonl"),
          "--embeddings", &p("emb.txt")],
        "",
    );
    (trace, report)
}

#[test]
fn train_eval_is_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (trace_a, report_a) = pipeline(a.path());
    let (trace_b, report_b) = pipeline(b.path());
    assert_eq!(trace_a, trace_b);
    assert_eq!(report_a, report_b);
    assert_eq!(trace_a.lines().count(), 5);
    assert_eq!(
        std::fs::read(a.path().join("model.json")).unwrap(),
        std::fs::read(b.path().join("model.json")).unwrap()
    );
    let report: serde_json::Value = serde_json::from_str(&report_a).unwrap();
    assert_eq!(report["fused"]["n_samples"], 240);

    let model = a.path().join("model.json");
    let data = a.path().join("data.jsonl");
    let out = run(
        &["eval", "--model", model.to_str().unwrap(), "--data", data.to_str().unwrap()],
        "",
    );
    assert_eq!(out.status.code(), Some(1), "noun model without embeddings");

    let predictions = stdout_of(
        &["predict", "--model", model.to_str().unwrap(), "--data", data.to_str().unwrap(),
          "--embeddings", a.path().join("emb.txt").to_str().unwrap()],
        "",
    );
    assert_eq!(predictions.lines().count(), 240);
    let first: serde_json::Value = serde_json::from_str(predictions.lines().next().unwrap()).unwrap();
    assert_eq!(first["id"], "synth-000");
    MotionCode::parse(first["fused"].as_str().unwrap()).unwrap();
}

#[test]
fn noise_changes_requested_fraction() {
    let dir = tempfile::tempdir().unwrap();
    let data: PathBuf = dir.path().join("d.jsonl");
    let emb = dir.path().join("e.txt");
    stdout_of(
        &["synth", "--n", "50", "--output", data.to_str().unwrap(), "--embeddings-out",
          emb.to_str().unwrap()],
        "",
    );
    let noisy = stdout_of(
        &["noise", "--data", data.to_str().unwrap(), "--embeddings", emb.to_str().unwrap(),
          "--rho", "0.3", "--seed", "2"],
        "",
    );
    let clean = std::fs::read_to_string(&data).unwrap();
    let changed = clean.lines().zip(noisy.lines()).filter(|(a, b)| a != b).count();
    assert_eq!(changed, 15);
}
