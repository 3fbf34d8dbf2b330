use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_commtower"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

fn constant(n: &str) -> String {
    if n == "0" {
        r#"{"num_vars":0,"trunc_degree":0,"terms":[]}"#.to_string()
    } else {
        format!(r#"{{"num_vars":0,"trunc_degree":0,"terms":[{{"exp":[],"n":"{n}","d":"1"}}]}}"#)
    }
}

fn matrix2(e: [&str; 4]) -> String {
    format!(
        r#"{{"m":2,"entries":[[{},{}],[{},{}]]}}"#,
        constant(e[0]),
        constant(e[1]),
        constant(e[2]),
        constant(e[3])
    )
}

fn write_a(dir: &TempDir) -> String {
    let p = path(dir, "a.json");
    let text = format!(
        r#"{{"m":2,"z_trunc":2,"coeffs":[{},{},{}]}}"#,
        matrix2(["2", "1", "1", "1"]),
        matrix2(["0", "-1", "3", "1"]),
        matrix2(["1", "0", "2", "-2"])
    );
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn dim_one_diag_seed() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "d1.json");
    let o = run(&["seed", "--kind", "diag", "--m", "1", "--vars", "1", "--deg", "5", "--window", "4", "--out", &out]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains("\"window_B\": 4"));
    assert!(Path::new(&format!("{out}.provenance.json")).exists());
    let o = run(&["verify", "--all", &out]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn random_orbit_is_deterministic_and_valid() {
    let dir = TempDir::new().unwrap();
    let a = path(&dir, "a.json");
    let b = path(&dir, "b.json");
    assert_eq!(code(&run(&["seed", "--kind", "random-orbit", "--rng", "42", "--out", &a])), 0);
    assert_eq!(code(&run(&["seed", "--kind", "random-orbit", "--rng", "42", "--out", &b])), 0);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(
        fs::read(format!("{a}.provenance.json")).unwrap(),
        fs::read(format!("{b}.provenance.json")).unwrap()
    );
    assert_eq!(code(&run(&["verify", &a, "--master", "--loopspace"])), 0);
}

#[test]
fn perturbed_tower_fails_with_location() {
    let dir = TempDir::new().unwrap();
    let t = path(&dir, "t.json");
    assert_eq!(code(&run(&["seed", "--m", "2", "--deg", "4", "--window", "3", "--out", &t])), 0);
    let text = fs::read_to_string(&t).unwrap();
    // the first cell of sum 1 is (0,1); give its (1,2) entry a constant term
    let marker = "\"a\": 0,\n      \"b\": 1";
    let at = text.find(marker).expect("cell (0,1)");
    let entry = text[at..].find("\"terms\": []").expect("zero entry") + at;
    let mut bad = text.clone();
    bad.replace_range(entry..entry + "\"terms\": []".len(), r#""terms": [{"exp": [0, 0], "n": "1", "d": "1"}]"#);
    let p = path(&dir, "bad.json");
    fs::write(&p, bad).unwrap();
    let o = run(&["--json", "verify", "--master", &p]);
    assert_eq!(code(&o), 1);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("\"status\": \"fail\""));
    assert!(stdout.contains("entry"));
}

#[test]
fn usage_errors() {
    let dir = TempDir::new().unwrap();
    let t = path(&dir, "t.json");
    assert_eq!(code(&run(&["seed", "--out", &t])), 0);
    assert_eq!(code(&run(&["verify", "--unknown", &t])), 2);
    assert_eq!(code(&run(&["verify", &path(&dir, "missing.json")])), 2);
    let junk = path(&dir, "junk.json");
    fs::write(&junk, "{\"m\": 2}").unwrap();
    assert_eq!(code(&run(&["verify", &junk])), 2);
    assert_eq!(code(&run(&["seed", "--m", "3", "--vars", "2"])), 2);
}

#[test]
fn act_with_zero_element() {
    let dir = TempDir::new().unwrap();
    let t = path(&dir, "t.json");
    assert_eq!(code(&run(&["seed", "--kind", "random-orbit", "--rng", "5", "--out", &t])), 0);
    let e = path(&dir, "e.json");
    fs::write(&e, r#"{"kind":"gplus","coeffs":[]}"#).unwrap();
    let out = path(&dir, "out.json");
    assert_eq!(code(&run(&["act", "--tower", &t, "--element", &e, "--exp", "--out", &out])), 0);
    assert_eq!(fs::read(&t).unwrap(), fs::read(&out).unwrap());
}

#[test]
fn act_then_verify() {
    let dir = TempDir::new().unwrap();
    let t = path(&dir, "t.json");
    assert_eq!(code(&run(&["seed", "--kind", "random-orbit", "--rng", "6", "--out", &t])), 0);
    let e = path(&dir, "e.json");
    fs::write(&e, format!(r#"{{"kind":"gminus","coeffs":[{{"l":1,"matrix":{}}}]}}"#, matrix2(["1", "2", "0", "-1"]))).unwrap();
    let out = path(&dir, "out.json");
    assert_eq!(code(&run(&["act", "--tower", &t, "--element", &e, "--exp", "--out", &out])), 0);
    assert_eq!(code(&run(&["verify", "--master", &out])), 0);
    let p = path(&dir, "p.json");
    fs::write(&p, format!(r#"{{"kind":"gl","coeffs":[{{"l":0,"matrix":{}}}]}}"#, matrix2(["1", "1", "0", "1"]))).unwrap();
    assert_eq!(code(&run(&["act", "--tower", &out, "--element", &p, "--out", &out])), 0);
    assert_eq!(code(&run(&["verify", &out])), 0);
}

#[test]
fn normalize_random_orbit() {
    let dir = TempDir::new().unwrap();
    let t = path(&dir, "t.json");
    assert_eq!(code(&run(&["seed", "--kind", "random-orbit", "--rng", "7", "--out", &t])), 0);
    let out = path(&dir, "n.json");
    let o = run(&["normalize", "--tower", &t, "--out", &out]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("recovered canonical form: true"));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains("\"recovered_canonical_form\": true"));
}

#[test]
fn kp_sign_theorem() {
    let dir = TempDir::new().unwrap();
    let a = write_a(&dir);
    let out = path(&dir, "lp.json");
    let o = run(&["kp", "--a", &a, "--window", "3", "--deg", "4", "--check-sign", "2", "--out", &out]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(code(&run(&["verify", "--master", &out])), 0);
    let r = path(&dir, "r.json");
    fs::write(&r, matrix2(["0", "1", "-2", "3"])).unwrap();
    let o = run(&["kp", "--a", &a, "--check-sign", "3", "--r", &r]);
    assert_eq!(code(&o), 0);
    assert_eq!(code(&run(&["kp", "--a", &a, "--window", "2", "--check-sign", "3"])), 2);
}

#[test]
fn kp_singular_a0() {
    let dir = TempDir::new().unwrap();
    let p = path(&dir, "a.json");
    fs::write(&p, format!(r#"{{"m":2,"z_trunc":0,"coeffs":[{}]}}"#, matrix2(["1", "2", "2", "4"]))).unwrap();
    assert_eq!(code(&run(&["kp", "--a", &p])), 2);
}
