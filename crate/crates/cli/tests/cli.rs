use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn scratch_cache(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("theta-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn run_in(cache: &PathBuf, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_theta-orbits"))
        .args(args)
        .env("THETA_ORBIT_CACHE", cache)
        .output()
        .expect("binary runs")
}

fn run(args: &[&str]) -> Output {
    run_in(&scratch_cache("default"), args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON")
}

#[test]
fn expand_theta_leads_with_eighth_power() {
    let o = run(&["expand", "theta", "--prec", "2", "--no-cache"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("q^{1/8}("), "{text}");
    assert!(
        text.contains("ζ^{1/2}") && text.contains("ζ^{-1/2}"),
        "{text}"
    );
}

#[test]
fn expand_phi01_constant_row() {
    let o = run(&["expand", "phi_0_1", "--prec", "1", "--no-cache"]);
    assert_eq!(stdout(&o).trim(), "ζ^-1 + 10 + ζ + O(q)");
}

#[test]
fn expand_index_two_eisenstein_is_normalized() {
    let o = run(&["expand", "E4,2", "--prec", "1", "--no-cache"]);
    assert_eq!(stdout(&o).trim(), "1 + O(q)");
}

#[test]
fn expand_json_is_deterministic_and_cache_transparent() {
    let cache = scratch_cache("transparent");
    let args = ["--json", "expand", "xi00", "--prec", "3"];
    let cold = run_in(&cache, &args);
    let warm = run_in(&cache, &args);
    let bypass = run_in(
        &cache,
        &["--json", "expand", "xi00", "--prec", "3", "--no-cache"],
    );
    assert_eq!(cold.stdout, warm.stdout);
    assert_eq!(cold.stdout, bypass.stdout);
    let v = json(&cold);
    assert_eq!(v["prec"], "3");
    assert!(v["series"]["terms"]
        .as_array()
        .is_some_and(|t| !t.is_empty()));
    let _ = std::fs::remove_dir_all(&cache);
}

#[test]
fn cache_round_trip_and_corruption_fallback() {
    let cache = scratch_cache("roundtrip");
    let fresh = run_in(&cache, &["--json", "expand", "eta", "--prec", "5"]);
    let stats = json(&run_in(&cache, &["--json", "cache", "stats"]));
    assert_eq!(stats["entries"], 1);
    for entry in std::fs::read_dir(&cache).unwrap() {
        std::fs::write(
            entry.unwrap().path(),
            "{\"version\":1,\"payload\":\"garbage\"}",
        )
        .unwrap();
    }
    let recomputed = run_in(&cache, &["--json", "expand", "eta", "--prec", "5"]);
    assert_eq!(fresh.stdout, recomputed.stdout);
    let cleared = json(&run_in(&cache, &["--json", "cache", "clear"]));
    assert_eq!(cleared["removed"], 1);
    assert_eq!(
        json(&run_in(&cache, &["--json", "cache", "stats"]))["entries"],
        0
    );
    let _ = std::fs::remove_dir_all(&cache);
}

#[test]
fn verify_c00_passes() {
    let o = run(&["--json", "verify", "--id", "c00"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["status"], "PASS");
    assert_eq!(v["identities"][0]["status"], "PASS");
    assert_eq!(
        v["identities"][0]["prec_used"],
        serde_json::json!(["4", "6"])
    );
}

#[test]
fn verify_reports_the_passing_reading() {
    let o = run(&["--json", "verify", "--id", "tr2_11_4_1_0"]);
    assert_eq!(o.status.code(), Some(0));
    let reading = json(&o)["identities"][0]["reading"]
        .as_str()
        .unwrap()
        .to_string();
    assert!(reading.contains("th00^11"), "{reading}");
}

#[test]
fn search_order_two_finds_both_zeros() {
    let o = run(&[
        "--json",
        "search",
        "--N",
        "2",
        "--max-weight",
        "2",
        "--max-index",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let zeros: Vec<String> = json(&o)["findings"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|f| f["status"] == "ZERO")
        .map(|f| f["id"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(zeros, ["tr2_2_2_0_0", "tr2_4_0_0_0"]);
}

#[test]
fn spaces_weight_four_index_one() {
    let o = run(&[
        "--json",
        "spaces",
        "--weight",
        "4",
        "--index",
        "1",
        "--holomorphic",
    ]);
    assert_eq!(json(&o)["dimension"], 1);
}

#[test]
fn decompose_recovers_discriminant_multiple() {
    let o = run(&["--json", "decompose", "--target", "tr3_21_3_0_0"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let coeffs: Vec<(String, String)> = v["coefficients"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| {
            (
                c["basis"].as_str().unwrap().to_string(),
                c["coefficient"].as_str().unwrap().to_string(),
            )
        })
        .collect();
    // 756Δ·φ = (7/16)(E4³ − E6²)·φ since 1728Δ = E4³ − E6².
    assert_eq!(coeffs.len(), 2);
    assert!(
        coeffs
            .iter()
            .any(|(b, c)| b.contains("E4^3") && c == "7/16"),
        "{coeffs:?}"
    );
    assert!(
        coeffs
            .iter()
            .any(|(b, c)| b.contains("E6^2") && c == "-7/16"),
        "{coeffs:?}"
    );
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["expand", "nonsense_name"]).status.code(), Some(2));
    assert_eq!(
        run(&["verify", "--id", "no_such_identity"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["verify"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--bogus-flag"]).status.code(), Some(2));
    assert_eq!(
        run(&["spaces", "--weight", "4", "--index", "1/3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["search", "--N", "1", "--max-weight", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["verify", "--id", "c01", "--id", "c00"]).status.code(),
        Some(0)
    );
}
