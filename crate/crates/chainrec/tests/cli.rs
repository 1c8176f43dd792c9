use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use chainrec::commands::{self, EVENTS, PLOTDATA, RASTER, SUMMARY};
use chainrec::config;
use chainrec::raster::Raster;
use chainrec_core::explosion_scan::profile;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chainrec"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn run(cmd: &mut Command) -> (i32, String, String) {
    let Output { status, stdout, stderr } = cmd.output().unwrap();
    (
        status.code().unwrap_or(-1),
        String::from_utf8_lossy(&stdout).into_owned(),
        String::from_utf8_lossy(&stderr).into_owned(),
    )
}

const PERIOD3_SMALL: &str = r#"
[family]
kind = "logistic"
window = [3.8, 3.86]
[grid]
lo = 3.82
hi = 3.84
count = 21
[resolution]
n_boxes = 4096
"#;

#[test]
fn scan_output_is_independent_of_worker_count() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "p3.toml", PERIOD3_SMALL);
    let mut outs = Vec::new();
    for w in [1, 3] {
        let out = tmp.path().join(format!("w{w}"));
        let (code, _, err) = run(bin()
            .arg("scan")
            .arg("--config")
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .arg("--workers")
            .arg(w.to_string()));
        assert_eq!(code, 0, "{err}");
        outs.push(out);
    }
    for f in [EVENTS, RASTER, SUMMARY] {
        let a = fs::read(outs[0].join(f)).unwrap();
        let b = fs::read(outs[1].join(f)).unwrap();
        assert!(a == b, "{f} differs between 1 and 3 workers");
    }
    let events: serde_json::Value = serde_json::from_slice(&fs::read(outs[0].join(EVENTS)).unwrap()).unwrap();
    assert!(!events.as_array().unwrap().is_empty());
}

#[test]
fn raster_matches_core_coverings_and_plotdata_rows() {
    let tmp = TempDir::new().unwrap();
    let text = format!("{PERIOD3_SMALL}\n[output]\ndir = \"{}\"\n", tmp.path().join("chain").display());
    let mut cfg = config::parse(&text).unwrap();
    cfg.grid = vec![3.8, 3.83, 3.85];
    commands::cmd_chain(&cfg).unwrap();
    let raster = Raster::from_bytes(&fs::read(cfg.out_dir.join(RASTER)).unwrap()).unwrap();
    assert_eq!(raster.rows.len(), 3);
    assert_eq!(raster.n_boxes as usize, cfg.resolution.final_boxes());
    let mut total = 0;
    for (row, &l) in raster.rows.iter().zip(&cfg.grid) {
        let p = profile(&cfg.family, l, &cfg.resolution);
        let c = p.covering.expect("covering");
        let expect: Vec<u32> = c.recurrent_indices().map(|i| i as u32).collect();
        assert_eq!(row.lambda, l);
        assert_eq!(row.boxes().collect::<Vec<_>>(), expect);
        total += expect.len();
    }
    let plot_dir = tmp.path().join("plot");
    let (code, _, err) = run(bin().arg("plotdata").arg(cfg.out_dir.join(RASTER)).arg("--out").arg(&plot_dir));
    assert_eq!(code, 0, "{err}");
    let csv = fs::read_to_string(plot_dir.join(PLOTDATA)).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("lambda,box_lo,box_hi"));
    assert_eq!(lines.count(), total);
}

#[test]
fn plotdata_to_stdout_matches_file() {
    let tmp = TempDir::new().unwrap();
    let r = Raster {
        n_boxes: 8,
        a: 0.0,
        b: 1.0,
        rows: vec![chainrec::raster::RasterRow { lambda: 2.5, runs: vec![(1, 2), (6, 1)] }],
    };
    let path = tmp.path().join("r.chxr");
    fs::write(&path, r.to_bytes()).unwrap();
    let (code, out, _) = run(bin().arg("plotdata").arg(&path));
    assert_eq!(code, 0);
    assert_eq!(out, "lambda,box_lo,box_hi\n2.5,0.125,0.25\n2.5,0.25,0.375\n2.5,0.75,0.875\n");
}

#[test]
fn empty_raster_gives_header_only() {
    let tmp = TempDir::new().unwrap();
    let r = Raster { n_boxes: 16, a: 0.0, b: 1.0, rows: vec![] };
    let path = tmp.path().join("empty.chxr");
    fs::write(&path, r.to_bytes()).unwrap();
    let (code, _, _) = run(bin().arg("plotdata").arg(&path).arg("--out").arg(tmp.path()));
    assert_eq!(code, 0);
    assert_eq!(fs::read_to_string(tmp.path().join(PLOTDATA)).unwrap(), "lambda,box_lo,box_hi\n");
}

#[test]
fn truncated_raster_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let r = Raster {
        n_boxes: 16,
        a: 0.0,
        b: 1.0,
        rows: vec![chainrec::raster::RasterRow { lambda: 3.0, runs: vec![(0, 4)] }],
    };
    let bytes = r.to_bytes();
    let path = tmp.path().join("cut.chxr");
    fs::write(&path, &bytes[..bytes.len() - 3]).unwrap();
    let (code, _, err) = run(bin().arg("plotdata").arg(&path));
    assert_eq!(code, 1);
    assert!(err.contains("unexpected EOF in raster"), "{err}");
}

#[test]
fn bad_box_count_is_a_config_error() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "bad.toml",
        "[family]\nkind = \"logistic\"\nwindow = [3, 4]\n[resolution]\nn_boxes = 1000\n",
    );
    let (code, _, err) = run(bin().arg("chain").arg("--config").arg(&cfg).arg("--out").arg(tmp.path()));
    assert_eq!(code, 1);
    assert!(err.contains("n_boxes must be a power of two"), "{err}");
    assert!(err.contains("line 5"), "{err}");
}

#[test]
fn unknown_key_is_a_config_error() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "typo.toml", "[family]\nkind = \"logistic\"\nwindw = [3, 4]\n");
    let (code, _, err) = run(bin().arg("chain").arg("--config").arg(&cfg));
    assert_eq!(code, 1);
    assert!(err.contains("windw"), "{err}");
}

#[test]
fn two_profiles_are_a_numerical_error() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "two.toml",
        "[family]\nkind = \"logistic\"\nwindow = [3.8, 3.86]\n[grid]\nvalues = [3.8, 3.81]\n",
    );
    let (code, _, err) = run(bin().arg("scan").arg("--config").arg(&cfg).arg("--out").arg(tmp.path()));
    assert_eq!(code, 2, "{err}");
    assert!(err.contains("need"), "{err}");
}

#[test]
fn hyperbolic_window_scans_clean() {
    let tmp = TempDir::new().unwrap();
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/hyperbolic.toml");
    let (code, out, err) = run(bin().arg("scan").arg("--config").arg(&cfg).arg("--out").arg(tmp.path()));
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("0 events, 0 unclassified"), "{out}");
    let events: serde_json::Value = serde_json::from_slice(&fs::read(tmp.path().join(EVENTS)).unwrap()).unwrap();
    assert_eq!(events, serde_json::json!([]));
}

#[test]
fn starved_classifier_exits_three() {
    // with only fixed points available neither cause can be found
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "p3.toml",
        &format!("{PERIOD3_SMALL}\n[tolerances]\nperiod_max = 1\n"),
    );
    let (code, out, err) = run(bin().arg("scan").arg("--config").arg(&cfg).arg("--out").arg(tmp.path()));
    assert_eq!(code, 3, "{out}{err}");
    let summary: serde_json::Value = serde_json::from_slice(&fs::read(tmp.path().join(SUMMARY)).unwrap()).unwrap();
    assert!(summary["unclassified"].as_u64().unwrap() > 0);
}

#[test]
fn tangency_at_full_map() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "full.toml", "[family]\nkind = \"logistic\"\nwindow = [3, 4]\n");
    let (code, out, err) = run(bin()
        .arg("tangency")
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(tmp.path())
        .arg("--lambda")
        .arg("4"));
    assert_eq!(code, 0, "{err}");
    let first: serde_json::Value = serde_json::from_str(out.lines().next().unwrap()).unwrap();
    assert_eq!(first["w"], 0.5);
    assert_eq!(first["x0"], 0.0);
    let (code, _, err) = run(bin()
        .arg("tangency")
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(tmp.path())
        .arg("--lambda")
        .arg("4.5"));
    assert_eq!(code, 1);
    assert!(err.contains("outside the family window"), "{err}");
}

#[test]
fn usage_errors_exit_one() {
    let (code, _, _) = run(bin().arg("scan"));
    assert_eq!(code, 1);
    let (code, out, _) = run(bin().arg("--help"));
    assert_eq!(code, 0);
    assert!(out.contains("plotdata"));
}
