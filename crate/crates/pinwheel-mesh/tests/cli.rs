//! End-to-end tests of the `pinwheel-mesh` binary: exit codes, output
//! formats and byte-reproducibility.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pinwheel-mesh"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(path: &Path, content: &str) {
    std::fs::write(path, content).unwrap();
}

const COARSE_12_RECT: &str = "4 2\n0 0\n2 0\n2 1\n0 1\n0 1 2\n0 2 3\n";

#[test]
fn mesh_from_coarse_writes_outputs_and_validates() {
    let dir = tempfile::tempdir().unwrap();
    let coarse = dir.path().join("rect.txt");
    write(&coarse, COARSE_12_RECT);
    let out = dir.path().join("mesh");
    let res = run(&[
        "mesh",
        "--coarse",
        coarse.to_str().unwrap(),
        "--h",
        "0.2",
        "--out",
        out.to_str().unwrap(),
        "--formats",
        "node-ele,off,svg,report",
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    for ext in ["node", "off", "svg", "report.json"] {
        assert!(dir.path().join(format!("mesh.{ext}")).exists(), "missing {ext}");
    }
    // the emitted mesh passes the validate subcommand
    let node = dir.path().join("mesh.node");
    let res = run(&["validate", "--mesh", node.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("mesh.report.json")).unwrap())
            .unwrap();
    assert!(report["quality"]["triangle_count"].as_u64().unwrap() > 0);
    assert!(report["quality"]["min_angle"].as_f64().unwrap() > 0.0);
}

#[test]
fn mesh_outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let coarse = dir.path().join("rect.txt");
    write(&coarse, COARSE_12_RECT);
    let mut blobs = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let res = run(&[
            "mesh",
            "--coarse",
            coarse.to_str().unwrap(),
            "--h",
            "0.17",
            "--seed",
            "5",
            "--out",
            out.to_str().unwrap(),
            "--formats",
            "node-ele,svg,report",
        ]);
        assert!(res.status.success());
        blobs.push((
            std::fs::read(dir.path().join(format!("{name}.node"))).unwrap(),
            std::fs::read(dir.path().join(format!("{name}.svg"))).unwrap(),
            std::fs::read(dir.path().join(format!("{name}.report.json"))).unwrap(),
        ));
    }
    assert_eq!(blobs[0], blobs[1]);
}

#[test]
fn mesh_from_polygon_fallback() {
    let dir = tempfile::tempdir().unwrap();
    let poly = dir.path().join("poly.txt");
    write(&poly, "5\n0 0\n2 0\n2.5 1.2\n1 2\n-0.5 1\n");
    let out = dir.path().join("pmesh");
    let res = run(&[
        "mesh",
        "--polygon",
        poly.to_str().unwrap(),
        "--h",
        "0.25",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let res = run(&["validate", "--mesh", dir.path().join("pmesh.node").to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(0));
}

#[test]
fn classic_mesh_tile_count() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("classic");
    let res = run(&[
        "mesh",
        "--classic",
        "--levels",
        "4",
        "--rect12",
        "--out",
        out.to_str().unwrap(),
        "--formats",
        "node-ele",
    ]);
    assert!(res.status.success());
    let stderr = String::from_utf8_lossy(&res.stderr);
    assert!(stderr.contains("1250 tiles"), "stderr: {stderr}");
}

#[test]
fn measure_classic_csv_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let csv1 = dir.path().join("a.csv");
    let csv2 = dir.path().join("b.csv");
    for csv in [&csv1, &csv2] {
        let res = run(&[
            "measure",
            "--classic",
            "--levels",
            "1..2",
            "--l",
            "1",
            "--out",
            csv.to_str().unwrap(),
        ]);
        assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    }
    let a = std::fs::read_to_string(&csv1).unwrap();
    let b = std::fs::read_to_string(&csv2).unwrap();
    assert_eq!(a, b);
    let lines: Vec<&str> = a.lines().collect();
    assert_eq!(
        lines[0],
        "level_or_target,vertices,edges,deviation_ratio,witness_p,witness_q,seconds"
    );
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("1,") && lines[1].contains("1.341641"));
    assert!(lines[2].starts_with("2,") && lines[2].contains("1.1947"));
    // deterministic outputs carry a zero seconds column
    assert!(lines[1].ends_with(",0.000"));
}

#[test]
fn measure_baseline_and_witness_svg() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("witness.svg");
    let res = run(&[
        "measure",
        "--baseline",
        "grid",
        "--n",
        "8",
        "--l",
        "1",
        "--witness-svg",
        svg.to_str().unwrap(),
    ]);
    assert!(res.status.success());
    let csv = String::from_utf8_lossy(&res.stdout).to_string();
    assert!(csv.contains("grid-8,81,"), "csv: {csv}");
    assert!(csv.contains("1.414214"));
    let svg_text = std::fs::read_to_string(&svg).unwrap();
    assert!(svg_text.contains("<polyline"));
}

#[test]
fn render_with_highlight_path() {
    let dir = tempfile::tempdir().unwrap();
    let node = dir.path().join("m.node");
    write(&node, "4 2\n0 0\n1 0\n1 1\n0 1\n0 1 2\n0 2 3\n");
    let svg = dir.path().join("m.svg");
    let res = run(&[
        "render",
        "--mesh",
        node.to_str().unwrap(),
        "--out",
        svg.to_str().unwrap(),
        "--highlight-path",
        "1,3",
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let text = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(text.matches("<polygon").count(), 2);
    assert!(text.contains("<polyline"));
    // byte-identical on rerun
    let svg2 = dir.path().join("m2.svg");
    let res = run(&[
        "render",
        "--mesh",
        node.to_str().unwrap(),
        "--out",
        svg2.to_str().unwrap(),
        "--highlight-path",
        "1,3",
    ]);
    assert!(res.status.success());
    assert_eq!(text, std::fs::read_to_string(&svg2).unwrap());
}

#[test]
fn validation_failures_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    // non-conforming coarse mesh: node 3 hangs on the 0-1 edge
    let bad = dir.path().join("bad.txt");
    write(&bad, "5 3\n0 0\n2 0\n1 1\n1 0\n1 -1\n0 1 2\n0 4 3\n3 4 1\n");
    let res = run(&["validate", "--coarse", bad.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&res.stderr);
    assert!(msg.contains("edge 0-1"), "message should name the edge: {msg}");

    // refinement target too deep
    let coarse = dir.path().join("rect.txt");
    write(&coarse, COARSE_12_RECT);
    let res = run(&[
        "mesh",
        "--coarse",
        coarse.to_str().unwrap(),
        "--h",
        "1e-12",
        "--out",
        dir.path().join("x").to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("refinement_too_deep"));

    // measure with l too large
    let res = run(&["measure", "--baseline", "grid", "--n", "4", "--l", "99"]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("l_too_large"));

    // unknown config
    let res = run(&["mesh", "--classic", "--out", "/tmp/nope"]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn threads_flag_gives_same_results() {
    let dir = tempfile::tempdir().unwrap();
    let mut outs = Vec::new();
    for threads in ["1", "4"] {
        let csv = dir.path().join(format!("t{threads}.csv"));
        let res = run(&[
            "measure",
            "--baseline",
            "cross",
            "--n",
            "6",
            "--l",
            "1",
            "--threads",
            threads,
            "--out",
            csv.to_str().unwrap(),
        ]);
        assert!(res.status.success());
        outs.push(std::fs::read_to_string(&csv).unwrap());
    }
    assert_eq!(outs[0], outs[1]);
}

#[test]
fn dynamic_delta_mode_runs() {
    let dir = tempfile::tempdir().unwrap();
    let coarse = dir.path().join("rect.txt");
    write(&coarse, COARSE_12_RECT);
    let res = run(&[
        "mesh",
        "--coarse",
        coarse.to_str().unwrap(),
        "--h",
        "0.2",
        "--delta-mode",
        "dynamic:0.05",
        "--out",
        dir.path().join("dyn").to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let stderr = String::from_utf8_lossy(&res.stderr);
    assert!(stderr.contains("collapses"), "stderr: {stderr}");
}

#[test]
fn dynamic_mode_report_carries_collapse_counts() {
    let dir = tempfile::tempdir().unwrap();
    let coarse = dir.path().join("rect.txt");
    write(&coarse, COARSE_12_RECT);
    let out = dir.path().join("dynrep");
    let res = run(&[
        "mesh",
        "--coarse",
        coarse.to_str().unwrap(),
        "--h",
        "0.1",
        "--delta-mode",
        "dynamic:0.05",
        "--out",
        out.to_str().unwrap(),
        "--formats",
        "report",
    ]);
    assert!(res.status.success());
    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("dynrep.report.json")).unwrap(),
    )
    .unwrap();
    assert!(report["run"]["collapses_accepted"].as_u64().unwrap() > 0);
    assert!(report["run"]["collapses_rejected"].is_u64());
}

#[test]
fn plain_dynamic_mode_uses_default_eta() {
    let dir = tempfile::tempdir().unwrap();
    let coarse = dir.path().join("rect.txt");
    write(&coarse, COARSE_12_RECT);
    let res = run(&[
        "mesh",
        "--coarse",
        coarse.to_str().unwrap(),
        "--h",
        "0.2",
        "--delta-mode",
        "dynamic",
        "--out",
        dir.path().join("d").to_str().unwrap(),
        "--formats",
        "report",
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    assert!(String::from_utf8_lossy(&res.stderr).contains("eta 0.05"));
}
