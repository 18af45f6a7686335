//! End-to-end runs of the `openbook-kit` binary: exit codes, summaries and
//! file outputs.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use openbook_core::{
    CurveKind, CurveRef, LinkComponent, LinkPlacement, OpenBook, Sign, Surface,
};

use openbook_cli::{emit, parse, Document};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_openbook-kit"));
    cmd.env_remove("OPENBOOK_KIT_SEED");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn planar_placement(orientations: &[Sign], framing_offset: i64) -> LinkPlacement {
    let boundary = orientations.len() + 1;
    let page = Surface::new(0, boundary).unwrap();
    let ob = OpenBook::with_default_bindings(page.clone());
    let components = orientations
        .iter()
        .enumerate()
        .map(|(i, &orientation)| {
            let mut homology = vec![0; page.dim()];
            homology[i] = 2 * orientation.as_i64();
            LinkComponent {
                id: format!("K{}", i + 1),
                curve: CurveRef {
                    id: format!("k{}", i + 1),
                    homology,
                    kind: CurveKind::LinkComponent,
                    orientation,
                },
                orientation,
                parallel_class: format!("p{}", i + 1),
                class_index: 1,
                nearest_binding: format!("B{}", i + 1),
                framing_offset,
                null_homologous: true,
                tb: Some(-1),
                rot: Some(0),
            }
        })
        .collect();
    LinkPlacement {
        open_book: ob,
        components,
    }
}

fn write_placement(dir: &Path, name: &str, placement: &LinkPlacement) -> std::path::PathBuf {
    let path = dir.join(name);
    let text = emit(&Document::Placement(placement.clone())).unwrap();
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn new_disk_open_book() {
    let output = run(&["new", "--genus", "0", "--boundary", "1"]);
    assert!(output.status.success());
    match parse(&stdout(&output)).unwrap() {
        Document::OpenBook(ob) => {
            assert_eq!(ob.page.genus(), 0);
            assert_eq!(ob.page.boundary_count(), 1);
            assert!(ob.monodromy.is_empty());
        }
        other => panic!("expected an open book, got {}", other.kind()),
    }
}

#[test]
fn new_with_word() {
    let output = run(&["new", "--genus", "1", "--boundary", "2", "--word", "+a1"]);
    assert!(output.status.success());
    match parse(&stdout(&output)).unwrap() {
        Document::OpenBook(ob) => {
            assert_eq!((ob.page.genus(), ob.page.boundary_count()), (1, 2));
            assert_eq!(ob.monodromy.len(), 1);
            assert_eq!(ob.monodromy.twists[0].sign, Sign::Plus);
        }
        other => panic!("expected an open book, got {}", other.kind()),
    }
}

#[test]
fn new_negative_genus_is_usage_error() {
    let output = run(&["new", "--genus", "-1", "--boundary", "1"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn new_malformed_word_reports_position() {
    let output = run(&["new", "--genus", "1", "--boundary", "1", "--word", "+a1,q9"]);
    assert_eq!(output.status.code(), Some(2));
    let err = stderr(&output);
    assert!(err.contains("line 1 column 5"), "stderr: {err}");
}

#[test]
fn pushoff_c1a_summary_and_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let placement = planar_placement(&[Sign::Plus, Sign::Plus, Sign::Plus], 0);
    let input = write_placement(dir.path(), "hopf.obk", &placement);

    let output = run(&["pushoff", input.to_str().unwrap()]);
    assert!(output.status.success(), "stderr: {}", stderr(&output));
    assert_eq!(
        stdout(&output).trim(),
        "case=1a steps=3 aux=0 order_free=true"
    );

    let cert_text = std::fs::read_to_string(dir.path().join("hopf.cert.obk")).unwrap();
    let book_text = std::fs::read_to_string(dir.path().join("hopf.book.obk")).unwrap();
    let cert = match parse(&cert_text).unwrap() {
        Document::Certificate(cert) => cert,
        other => panic!("expected a certificate, got {}", other.kind()),
    };
    assert_eq!(cert.steps.len(), 3);
    match parse(&book_text).unwrap() {
        Document::OpenBook(ob) => {
            assert_eq!(ob.page.boundary_count(), 7);
            assert_eq!(ob.sub_binding_marks.len(), 3);
        }
        other => panic!("expected an open book, got {}", other.kind()),
    }
}

#[test]
fn pushoff_mixed_orientation_counts_aux_steps() {
    let dir = tempfile::tempdir().unwrap();
    let mut placement = planar_placement(&[Sign::Plus, Sign::Plus, Sign::Minus], 0);
    // One class of three with an orientation reversal.
    for (i, c) in placement.components.iter_mut().enumerate() {
        c.parallel_class = "p1".into();
        c.class_index = i as u32 + 1;
        c.nearest_binding = "B1".into();
        c.curve.homology = vec![2 * c.orientation.as_i64(), 0, 0];
    }
    let input = write_placement(dir.path(), "mixed.obk", &placement);

    let output = run(&["pushoff", input.to_str().unwrap()]);
    assert!(output.status.success(), "stderr: {}", stderr(&output));
    let summary = stdout(&output);
    assert!(summary.contains("case=1bii"), "summary: {summary}");
    assert!(summary.contains("aux=1"), "summary: {summary}");
    assert!(summary.contains("order_free=false"), "summary: {summary}");
}

#[test]
fn pushoff_rejects_nonzero_framing_offset() {
    let dir = tempfile::tempdir().unwrap();
    let placement = planar_placement(&[Sign::Plus], -1);
    let input = write_placement(dir.path(), "offset.obk", &placement);

    let output = run(&["pushoff", input.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    assert!(
        stderr(&output).contains("framing offset must be zero"),
        "stderr: {}",
        stderr(&output)
    );
}

#[test]
fn render_disk_and_unsupported_kind() {
    let dir = tempfile::tempdir().unwrap();
    let disk = dir.path().join("disk.obk");
    let new_out = run(&[
        "new",
        "--genus",
        "0",
        "--boundary",
        "1",
        "--out",
        disk.to_str().unwrap(),
    ]);
    assert!(new_out.status.success());

    let output = run(&["render", disk.to_str().unwrap()]);
    assert!(output.status.success());
    let svg = stdout(&output);
    assert_eq!(svg.matches("class=\"boundary\"").count(), 1);
    assert_eq!(svg.matches("class=\"handle\"").count(), 0);

    // Rendering is deterministic.
    assert_eq!(stdout(&run(&["render", disk.to_str().unwrap()])), svg);
}

#[test]
fn render_certificate_labels_every_step() {
    let dir = tempfile::tempdir().unwrap();
    let placement = planar_placement(&[Sign::Plus, Sign::Plus], 0);
    let input = write_placement(dir.path(), "two.obk", &placement);
    assert!(run(&["pushoff", input.to_str().unwrap()]).status.success());

    let cert = dir.path().join("two.cert.obk");
    let output = run(&["render", cert.to_str().unwrap()]);
    assert!(output.status.success());
    let svg = stdout(&output);
    assert_eq!(svg.matches("class=\"step-label\"").count(), 2);
}

#[test]
fn check_passes_on_fresh_outputs_and_fails_on_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let placement = planar_placement(&[Sign::Plus, Sign::Plus], 0);
    let input = write_placement(dir.path(), "pair.obk", &placement);
    assert!(run(&["pushoff", input.to_str().unwrap()]).status.success());
    let cert = dir.path().join("pair.cert.obk");

    let output = run(&[
        "check",
        input.to_str().unwrap(),
        cert.to_str().unwrap(),
        "--permutations",
        "all",
    ]);
    assert!(output.status.success(), "stdout: {}", stdout(&output));
    assert!(!stdout(&output).contains("FAIL"));

    // Tamper with one ledger row.
    let text = std::fs::read_to_string(&cert).unwrap();
    let tampered = text.replace("ledger 1 genus=0 boundary=4", "ledger 1 genus=0 boundary=9");
    assert_ne!(text, tampered);
    std::fs::write(&cert, tampered).unwrap();

    let output = run(&["check", cert.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    assert!(
        stdout(&output).contains("ledger replay mismatch"),
        "stdout: {}",
        stdout(&output)
    );
}

#[test]
fn repository_fixtures_all_pass() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    let mut files: Vec<String> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path().to_str().unwrap().to_string())
        .collect();
    files.sort();
    assert!(!files.is_empty());

    let mut args = vec!["check".to_string()];
    args.extend(files.iter().cloned());
    args.push("--permutations".into());
    args.push("all".into());
    let output = bin().args(&args).output().unwrap();
    assert!(output.status.success(), "stdout: {}", stdout(&output));

    // Checked-in fixtures are canonical bytes.
    for file in &files {
        let text = std::fs::read_to_string(file).unwrap();
        let doc = parse(&text).unwrap();
        assert_eq!(emit(&doc).unwrap(), text, "{file} is not canonical");
    }
}

#[test]
fn check_seed_env_is_validated() {
    let output = bin()
        .args(["check"])
        .env("OPENBOOK_KIT_SEED", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));

    let output = bin()
        .args(["check"])
        .env("OPENBOOK_KIT_SEED", "12345")
        .output()
        .unwrap();
    assert!(output.status.success(), "stdout: {}", stdout(&output));
}
