use std::path::Path;
use std::process::{Command, Output};

use qsunif_tools::pipeline::RunReport;
use qsunif_tools::{io, run, RunConfig};
use serde_json::Value;

fn qsunif(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsunif")).args(args).current_dir(dir).output().unwrap()
}

fn stderr_json(o: &Output) -> Value {
    serde_json::from_slice(o.stderr.trim_ascii()).unwrap()
}

#[test]
fn verify_passes_on_defaults() {
    let d = tempfile::tempdir().unwrap();
    let o = qsunif(&["verify", "--out", "out"], d.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r: RunReport = io::read_json(&d.path().join("out/verify.json")).unwrap();
    assert_eq!(r.results["verify"]["failed"], Value::Array(vec![]));
    assert!(d.path().join("out/verify.timings.json").exists());
}

#[test]
fn exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let o = qsunif(&["gen", "--q", "0.5"], d.path());
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "ConfigInvalid");

    let o = qsunif(&["gen", "--config", "missing.json"], d.path());
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "FileMissing");

    std::fs::write(d.path().join("bad.json"), r#"{"levels": [1, 2], "colour": 3}"#).unwrap();
    let o = qsunif(&["gen", "--config", "bad.json"], d.path());
    assert_eq!(o.status.code(), Some(2));

    std::fs::write(d.path().join("broken.off"), "OFF\n3 1 0\n0 0 1\n1 0 0\n").unwrap();
    std::fs::write(d.path().join("mesh.json"), r#"{"space": {"kind": "mesh", "path": "broken.off"}, "levels": [0, 0]}"#).unwrap();
    let o = qsunif(&["gen", "--config", "mesh.json"], d.path());
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stderr_json(&o)["exit_code"], 3);

    let o = qsunif(&["frobnicate"], d.path());
    assert!(!o.status.success());
}

#[test]
fn mesh_files_round_trip_through_gen() {
    let d = tempfile::tempdir().unwrap();
    let cfg = RunConfig { levels: [0, 1], sample_level: Some(2), out: d.path().join("a"), ..RunConfig::default() };
    run(cfg, qsunif_tools::Command::Gen).unwrap();
    let off = d.path().join("a/space.off");
    let (c, t) = io::read_off(&io::read_file(&off).unwrap()).unwrap();
    assert_eq!((c.len(), t.len()), (162, 320));

    let text = format!(r#"{{"space": {{"kind": "mesh", "path": {:?}}}, "levels": [0, 0], "out": {:?}}}"#, off, d.path().join("b"));
    let cfg = RunConfig::from_json(&text).unwrap();
    let r = run(cfg, qsunif_tools::Command::Approx).unwrap();
    assert_eq!(r.results["approx"]["levels"][0]["vertices"], 162);
}

#[test]
fn snowball_gen_writes_exact_squares() {
    let d = tempfile::tempdir().unwrap();
    let cfg = RunConfig::from_json(&format!(r#"{{"space": {{"kind": "snowball"}}, "levels": [0, 1], "out": {:?}}}"#, d.path())).unwrap();
    let r = run(cfg, qsunif_tools::Command::Gen).unwrap();
    assert_eq!(r.results["gen"]["vertex_counts"].as_array().unwrap().len(), 3);
    let f: io::SnowballFile = io::read_json(&d.path().join("snowball.json")).unwrap();
    let c = io::snowball_from_file(&f).unwrap();
    assert_eq!(c.squares(2).len(), 5046);
    c.check_embedded(2).unwrap();
}

#[test]
fn reports_reload_bit_exactly() {
    let d = tempfile::tempdir().unwrap();
    let cfg = RunConfig { levels: [1, 1], seed: 4, out: d.path().to_path_buf(), ..RunConfig::default() };
    let r = run(cfg, qsunif_tools::Command::Uniformize).unwrap();
    let back: RunReport = io::read_json(&d.path().join("uniformize.json")).unwrap();
    assert_eq!(back, r);
    let dev = &r.results["uniformize"]["levels"][0]["deviation_0.1_10"];
    assert!(dev.as_f64().unwrap() < 0.05);
}
