use std::path::Path;
use std::process::Command;

fn trawl(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_trawl")).args(args).output().expect("spawn trawl")
}

fn scenario(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name).to_string_lossy().into_owned()
}

#[test]
fn verify_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = trawl(&["verify", &scenario("c2_acf.toml"), "--paths", "500", "--out", out, "--plotdata"]);
    assert!(matches!(o.status.code(), Some(0 | 1)), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("c2_acf.csv")).unwrap();
    assert!(csv.starts_with("scenario,n,delta,metric,value,se,target,pass\n"));
    assert_eq!(csv.lines().count(), 4);
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("c2_acf.json")).unwrap()).unwrap();
    assert_eq!(json["kind"], "acf");
    assert!(dir.path().join("c2_acf.plot.csv").exists());
}

#[test]
fn bad_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "name = \"x\"\n").unwrap();
    assert_eq!(trawl(&["verify", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(trawl(&["verify", "/nonexistent.toml"]).status.code(), Some(2));
    assert_eq!(trawl(&["--threads", "0", "moment4", &scenario("c3_fourth_moment.toml")]).status.code(), Some(2));
    assert_eq!(trawl(&["constants", &scenario("c2_acf.toml")]).status.code(), Some(2));
}

#[test]
fn simulate_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let bin = dir.path().join("paths.bin");
    let o = trawl(&["simulate", &scenario("c5_short_memory.toml"), "--paths", "7", "--out", bin.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let side: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("paths.bin.json")).unwrap()).unwrap();
    assert_eq!(side["num_paths"], 7);
    assert_eq!(std::fs::metadata(&bin).unwrap().len(), 7 * 256 * 8);
    let csv = dir.path().join("paths.csv");
    assert!(trawl(&["simulate", &scenario("c5_short_memory.toml"), "--paths", "7", "--out", csv.to_str().unwrap()]).status.success());
}

#[test]
fn info_commands() {
    let o = trawl(&["moment4", &scenario("c3_fourth_moment.toml")]);
    assert_eq!(String::from_utf8_lossy(&o.stdout), "cumulant_form,14\ndisplayed_form,6\n");
    let o = trawl(&["acf", &scenario("c2_acf.toml"), "--lags", "2"]);
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 4);
    let o = trawl(&["constants", &scenario("c7_long_memory_gauss.toml")]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["hurst"], 0.75);
}
