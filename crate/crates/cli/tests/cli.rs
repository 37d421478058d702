use std::path::{Path, PathBuf};
use std::process::Command;

use knot_energy_cli::{config_hash, ExperimentConfig};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_knot-energy"))
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

const CIRCLE: &str = r#"
[curve]
id = "circle"
n = 128

[curve.family]
kind = "circle"
radius = 0.15915494309189535
"#;

fn write_config(dir: &Path, name: &str, experiment: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, format!("{CIRCLE}\n{experiment}")).unwrap();
    path
}

const DECOMPOSE: &str = r#"
[experiment]
kind = "decompose"

[experiment.quadrature]
n_x = 128
n_w = 128
policy = "exclude-band"
band = 1
tolerance = 1e-2
"#;

fn data_rows(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn shipped_configs_round_trip() {
    let mut seen = 0;
    for entry in std::fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("toml") {
            continue;
        }
        let cfg = ExperimentConfig::load(&path).unwrap();
        let again = ExperimentConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, again, "{}", path.display());
        assert_eq!(config_hash(&cfg), config_hash(&again));
        seen += 1;
    }
    assert!(seen >= 8);
}

#[test]
fn decompose_circle_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", DECOMPOSE);
    let mut outputs = Vec::new();
    for run in 0..2 {
        let out = dir.path().join(format!("out{run}"));
        let st = bin()
            .args(["decompose", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert_eq!(st.code(), Some(0));
        outputs.push(std::fs::read(out.join("circle-decompose.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let text = String::from_utf8(outputs[0].clone()).unwrap();
    assert!(text.starts_with("# knot-energy "));
    assert!(text.lines().next().unwrap().contains("config_hash="));
    let path = dir.path().join("out0/circle-decompose.csv");
    let rows = data_rows(&path);
    assert_eq!(rows.len(), 1);
    let e_mob: f64 = rows[0][3].parse().unwrap();
    let e1: f64 = rows[0][4].parse().unwrap();
    let residual: f64 = rows[0][6].parse().unwrap();
    assert!((e_mob - 4.0).abs() < 1e-2);
    assert!((e1 - 2.0 * std::f64::consts::PI.powi(2)).abs() < 1e-3);
    assert!(residual.abs() <= 1e-2);
}

#[test]
fn mollify_sweep_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "m.toml",
        "[experiment]\nkind = \"mollify-sweep\"\neps = [0.2, 0.1, 0.05]\n",
    );
    let st = bin().args(["mollify-sweep", "--config"]).arg(&cfg).arg("--out").arg(dir.path()).status().unwrap();
    assert_eq!(st.code(), Some(0));
    let rows = data_rows(&dir.path().join("circle-mollify-sweep.csv"));
    assert_eq!(rows.len(), 3);
    let dev: Vec<f64> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(dev[0] > dev[1] && dev[1] > dev[2]);
}

#[test]
fn validation_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write_config(dir.path(), "u.toml", "[experiment]\nkind = \"levitate\"\n");
    let out = bin().args(["run", "--config"]).arg(&unknown).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let bad_eps = write_config(
        dir.path(),
        "e.toml",
        "[experiment]\nkind = \"mollify-sweep\"\neps = [0.2, 0.7]\n",
    );
    let out = bin().args(["mollify-sweep", "--config"]).arg(&bad_eps).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("experiment.eps[1]"));
    let typo = write_config(dir.path(), "t.toml", &DECOMPOSE.replace("n_w", "n_ww"));
    let out = bin().args(["decompose", "--config"]).arg(&typo).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
    let mismatch = write_config(dir.path(), "d.toml", DECOMPOSE);
    let out = bin().args(["sobolev", "--config"]).arg(&mismatch).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["teleport", "--config"]).arg(&mismatch).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let strict = write_config(
        dir.path(),
        "s.toml",
        &DECOMPOSE.replace("decompose", "energy").replace("tolerance = 1e-2", "tolerance = 1e-12"),
    );
    let out = bin().args(["energy", "--config"]).arg(&strict).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    let invert = write_config(
        dir.path(),
        "i.toml",
        r#"
[experiment]
kind = "invert"
radius = 0.2
rdom = 1e6
samples = 101
tolerance = 2e-2

[experiment.center]
on_curve = 0.0

[experiment.quadrature]
n_x = 64
n_w = 64
policy = "exclude-band"
band = 1
tolerance = 1e-2
"#,
    );
    let out = bin().args(["invert", "--config"]).arg(&invert).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("window"));
}

#[test]
fn inscribe_flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "i.toml",
        "[experiment]\nkind = \"inscribe\"\nn = 3\nx0 = 0.0\ntolerance = 1e-9\n",
    );
    let st = bin()
        .args(["inscribe", "--n", "4", "--x0", "0.125", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    let rows = data_rows(&dir.path().join("circle-inscribe.csv"));
    assert_eq!(rows[0][0], "4");
    let side: f64 = rows[0][2].parse().unwrap();
    assert!((side - 2f64.sqrt() / (2.0 * std::f64::consts::PI)).abs() < 1e-9);
    let polygon = data_rows(&dir.path().join("circle-inscribe-polygon.csv"));
    assert_eq!(polygon.len(), 4);
}

#[test]
fn invert_line_image() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "i.toml",
        r#"
[experiment]
kind = "invert"
radius = 0.2
rdom = 1.0
samples = 201
tolerance = 2e-2

[experiment.center]
on_curve = 0.0

[experiment.quadrature]
n_x = 128
n_w = 128
policy = "exclude-band"
band = 1
tolerance = 1e-2
"#,
    );
    let out = bin()
        .args(["invert", "--center", "on-curve:0.25", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = data_rows(&dir.path().join("circle-invert-identities.csv"));
    let e1 = rows.iter().find(|r| r[0] == "e1").unwrap();
    let image: f64 = e1[2].parse().unwrap();
    assert!(image.abs() < 1e-9);
}
