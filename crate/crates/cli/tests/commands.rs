use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::Parser;
use reebforge_cli::*;
use reebforge_core::AssembleOptions;

const THETA: &str = r#"{"vertices":[{"id":"a","value":"0"},{"id":"b","value":"1"}],
  "edges":[{"u":"a","v":"b","r":-1},{"u":"a","v":"b","r":-1}]}"#;
const MINIMAL: &str = r#"{"vertices":[{"id":"lo","value":"0"},{"id":"hi","value":"1"}],
  "edges":[{"u":"lo","v":"hi","r":0}]}"#;
const ODD_LEAF: &str = r#"{"vertices":[{"id":"a","value":"0"},{"id":"b","value":"1"},{"id":"c","value":"2"}],
  "edges":[{"u":"a","v":"b","r":-1},{"u":"b","v":"c","r":-1},{"u":"a","v":"c","r":0}]}"#;

fn file(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn capture(f: impl FnOnce(&mut Vec<u8>) -> i32) -> (i32, String) {
    let mut out = Vec::new();
    let code = f(&mut out);
    (code, String::from_utf8(out).unwrap())
}

#[test]
fn check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let theta = file(dir.path(), "theta.json", THETA);
    assert_eq!(capture(|o| cmd_check(&theta, false, o)).0, EXIT_OK);
    let bad = file(dir.path(), "bad.json", ODD_LEAF);
    let (code, text) = capture(|o| cmd_check(&bad, false, o));
    assert_eq!(code, EXIT_REJECTED);
    assert!(
        text.contains("vertex `a`") && text.contains("vertex `c`"),
        "{text}"
    );
    let broken = file(dir.path(), "broken.json", "{\"vertices\": [");
    assert_eq!(capture(|o| cmd_check(&broken, false, o)).0, EXIT_INPUT);
    assert_eq!(
        capture(|o| cmd_check(&dir.path().join("missing.json"), false, o)).0,
        EXIT_INPUT
    );
}

#[test]
fn build_writes_manifold() {
    let dir = tempfile::tempdir().unwrap();
    let minimal = file(dir.path(), "min.json", MINIMAL);
    let dest = dir.path().join("m.json");
    let (code, text) = capture(|o| cmd_build(&minimal, 1, Some(&dest), o));
    assert_eq!(code, EXIT_OK, "{text}");
    let m = reebforge_core::Manifold3::from_json(&fs::read_to_string(&dest).unwrap()).unwrap();
    assert!(m.mesh.tets.len() < 10_000);
    let (code, text) = capture(|o| cmd_extract(&dest, false, None, o));
    assert_eq!(code, EXIT_OK);
    assert!(
        text.contains("\"r\": 0") || text.contains("\"r\":0"),
        "{text}"
    );

    let bad = file(dir.path(), "bad.json", ODD_LEAF);
    let none = dir.path().join("none.json");
    assert_eq!(
        capture(|o| cmd_build(&bad, 1, Some(&none), o)).0,
        EXIT_REJECTED
    );
    assert!(!none.exists());
}

#[test]
fn verify_round_trip_and_mislabel() {
    let dir = tempfile::tempdir().unwrap();
    let minimal = file(dir.path(), "min.json", MINIMAL);
    let start = Instant::now();
    assert_eq!(
        capture(|o| cmd_verify(&minimal, &AssembleOptions::default(), false, 0, o)).0,
        EXIT_OK
    );
    assert!(start.elapsed() < Duration::from_secs(5));
    let theta = file(dir.path(), "theta.json", THETA);
    let options = AssembleOptions {
        mislabel_edge: Some(0),
        ..Default::default()
    };
    let (code, text) = capture(|o| cmd_verify(&theta, &options, false, 0, o));
    assert_eq!(code, EXIT_VERIFY);
    assert!(
        text.contains("mismatch") && text.contains("graph G") && text.contains("graph R"),
        "{text}"
    );
}

#[test]
fn surface_commands() {
    let dir = tempfile::tempdir().unwrap();
    let klein = dir.path().join("k.json");
    assert_eq!(
        capture(|o| cmd_surface_gen(-2, 1, MeshFormat::Json, Some(&klein), o)).0,
        EXIT_OK
    );
    assert_eq!(
        capture(|o| cmd_surface_classify(&klein, o)),
        (EXIT_OK, "r=-2\n".into())
    );
    let g3 = dir.path().join("g3.json");
    cmd_surface_gen(3, 2, MeshFormat::Json, Some(&g3), &mut Vec::new());
    assert_eq!(capture(|o| cmd_surface_classify(&g3, o)).1, "r=3\n");
    let nm = file(
        dir.path(),
        "nm.json",
        r#"{"vertices":[0,1,2,3,4],"triangles":[[0,1,2],[0,1,3],[0,1,4]]}"#,
    );
    let (code, text) = capture(|o| cmd_surface_classify(&nm, o));
    assert_eq!(code, EXIT_REJECTED);
    assert!(text.contains("in 3 triangles"), "{text}");
    let off = capture(|o| cmd_surface_gen(0, 1, MeshFormat::Off, None, o)).1;
    assert!(off.starts_with("OFF\n6 8 0\n"));
}

#[test]
fn junction_and_corpus() {
    assert_eq!(
        capture(|o| cmd_junction("-1,-1", "-2", false, 0, o)).0,
        EXIT_OK
    );
    assert_eq!(
        capture(|o| cmd_junction("-1", "0", false, 0, o)).0,
        EXIT_REJECTED
    );
    assert_eq!(
        capture(|o| cmd_junction("x", "0", false, 0, o)).0,
        EXIT_INPUT
    );
    assert_eq!(capture(|o| cmd_corpus(3, 2, true, None, 1, o)).0, EXIT_OK);
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        capture(|o| cmd_corpus(3, 2, false, Some(dir.path()), 1, o)).0,
        EXIT_OK
    );
    assert!(dir.path().join("graph_001.json").exists());
}

#[test]
fn argument_parsing() {
    let cli =
        Cli::try_parse_from(["reebforge", "verify", "g.json", "--refinement", "2", "-v"]).unwrap();
    assert_eq!(cli.verbose, 1);
    assert!(matches!(cli.command, Command::Verify { refinement: 2, .. }));
    assert!(Cli::try_parse_from(["reebforge", "build", "g.json", "--refinement", "0"]).is_err());
    let cli = Cli::try_parse_from(["reebforge", "surface", "gen", "-2", "1"]).unwrap();
    assert!(matches!(
        cli.command,
        Command::Surface {
            command: SurfaceCommand::Gen {
                label: -2,
                refinement: 1,
                ..
            }
        }
    ));
}
