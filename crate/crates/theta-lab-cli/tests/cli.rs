use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_theta-lab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn alcove_example() {
    assert_eq!(stdout(&["alcove", "--p", "11", "--weight", "2,1"]), "C0\n");
}

#[test]
fn golden_outputs() {
    let cases: [(&[&str], &str); 6] = [
        (&["entail", "--p", "11", "--weight", "2,1", "--format", "json"], "entail_p11_2_1.json"),
        (&["link", "--p", "11", "--weight", "2,1", "--format", "json"], "link_p11_2_1.json"),
        (&["companion", "--k", "4", "--l", "3", "--p", "11", "--format", "json"], "companion_p11_4_3.json"),
        (
            &["herzig", "--case", "endoscopic", "--k", "11", "--l", "7", "--p", "23", "--format", "json"],
            "herzig_endoscopic_p23_11_7.json",
        ),
        (&["recipe", "--k", "5", "--l", "4", "--p", "11"], "recipe_p11_5_4.txt"),
        (&["tame", "--case", "irred-s0s1", "--k", "4", "--l", "3", "--p", "7", "--format", "json"], "tame_irred_p7_4_3.json"),
    ];
    for (args, file) in cases {
        assert_eq!(stdout(args), golden(file), "{args:?}");
    }
}

#[test]
fn entail_json_shape() {
    let v: serde_json::Value =
        serde_json::from_str(&stdout(&["entail", "--p", "11", "--weight", "2,1", "--format", "json"])).unwrap();
    assert_eq!(v, serde_json::json!({"lambda1": [7, 6], "lambda2": [11, 6]}));
}

#[test]
fn theta_verify_example_passes() {
    let out = stdout(&["theta-verify", "--p", "5", "--trials", "100", "--max-deg", "4", "--seed", "42"]);
    assert_eq!(out.lines().count(), 11);
    assert!(out.lines().all(|l| l.starts_with("PASS ")), "{out}");
}

#[test]
fn seeded_commands_are_byte_identical() {
    let commands: [&[&str]; 3] = [
        &["theta", "--op", "Theta", "--k", "5", "--l", "3", "--p", "7", "--max-deg", "2", "--seed", "9", "--format", "json"],
        &["theta-verify", "--p", "3", "--trials", "20", "--max-deg", "2", "--seed", "5", "--format", "json"],
        &["cycle", "--k", "4", "--l", "2", "--p", "7", "--seed", "3", "--format", "json"],
    ];
    for args in commands {
        assert_eq!(stdout(args), stdout(args), "{args:?}");
    }
    let a = stdout(&["theta", "--op", "theta1", "--k", "5", "--l", "3", "--p", "7", "--seed", "1", "--format", "json"]);
    let b = stdout(&["theta", "--op", "theta1", "--k", "5", "--l", "3", "--p", "7", "--seed", "2", "--format", "json"]);
    assert_ne!(a, b);
}

#[test]
fn verify_all_quick_passes_and_ignores_worker_count() {
    let args = ["verify-all", "--p", "5", "--quick", "--format", "json"];
    let one = bin().args(args).env("THETA_LAB_WORKERS", "1").output().unwrap();
    let four = bin().args(args).env("THETA_LAB_WORKERS", "4").output().unwrap();
    assert!(one.status.success(), "{}", String::from_utf8_lossy(&one.stdout));
    assert_eq!(one.stdout, four.stdout);
    let reports: Vec<serde_json::Value> = serde_json::from_slice(&one.stdout).unwrap();
    assert_eq!(reports.len(), 15);
    assert!(reports.iter().all(|r| r["status"] != "fail"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["alcove", "--p", "11"][..],
        &["alcove", "--p", "11", "--weight", "2"][..],
        &["tame", "--case", "nonsense", "--k", "5", "--l", "4", "--p", "11"][..],
        &["entail", "--p", "11", "--weight", "2,0"][..],
        &["frobnicate"][..],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let out = bin().args(["alcove", "--p", "11", "--weight", "2,1"]).env("THETA_LAB_WORKERS", "many").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failed_checks_exit_1() {
    let out = run(&["recipe", "--path", "/dev/null", "--weight", "5,4", "--p", "11"]);
    assert_eq!(out.status.code(), Some(2));
    let dir = std::env::temp_dir().join(format!("theta-lab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("path.json");
    std::fs::write(&path, r#"[{"step":"theta_cycle","dir":"apply"}]"#).unwrap();
    let p = path.to_str().unwrap();
    let ok = run(&["recipe", "--path", p, "--weight", "5,4", "--k", "19", "--l", "4", "--p", "11"]);
    assert_eq!(ok.status.code(), Some(0));
    let miss = run(&["recipe", "--path", p, "--weight", "5,4", "--k", "20", "--l", "4", "--p", "11"]);
    assert_eq!(miss.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("theta-lab-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("alcove.txt");
    let out = run(&["alcove", "--p", "11", "--weight", "7,6", "--out", file.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&file).unwrap(), "C1\n");
    std::fs::remove_dir_all(&dir).unwrap();
}
