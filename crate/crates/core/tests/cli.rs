use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_jacobi-mv"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("jacobi-mv-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

const TWO_ATOMS: &str = r#"{"d":2,"atoms":[{"x":["0","0"],"w":"1/2"},{"x":["1","1"],"w":"1/2"}]}"#;

#[test]
fn hermite_omega_in_paper_convention() {
    let o = run(&["omega", "--family", "hermite", "--d", "2", "--max-level", "2", "--convention", "paper"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let omega = &v["levels"][2]["omega"];
    assert_eq!(omega[0][0], "1/2*pi^(1)");
    assert_eq!(omega[1][1], "1/4*pi^(1)");
    assert_eq!(omega[2][2], "1/2*pi^(1)");
    assert_eq!(omega[0][1], "0");
    assert_eq!(v["mass_factor"]["pi_pow"], "1");
}

#[test]
fn normalized_omega_as_csv() {
    let o = run(&["omega", "--family", "legendre", "--d", "1", "--max-level", "2", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "n,class,omega\n0,0,1\n1,1,1/3\n2,2,4/45\n");
}

#[test]
fn atoms_on_two_point_measure() {
    let p = scratch("two_atoms.json", TWO_ATOMS);
    let o = run(&["atoms", "--measure", p.to_str().unwrap(), "--max-level", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["n0"], 2);
    assert_eq!(v["atom_bound"], 3);
}

#[test]
fn atoms_inconclusive_for_continuous_measure() {
    let o = run(&["atoms", "--family", "hermite", "--d", "1", "--max-level", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["n0"].is_null());
    assert_eq!(v["inconclusive_up_to"], 3);
}

#[test]
fn verify_exit_codes() {
    let ok = run(&["verify", "--family", "laguerre", "--alpha", "0,0", "--d", "2", "--max-level", "3"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stderr(&ok));
    let master = run(&["verify", "--family", "legendre", "--d", "1", "--max-level", "3"]);
    assert_eq!(master.status.code(), Some(0));
    let stated = run(&["verify", "--family", "legendre", "--d", "1", "--max-level", "3", "--against", "stated"]);
    assert_eq!(stated.status.code(), Some(1));
}

#[test]
fn reconstruct_round_trip() {
    let o = run(&["reconstruct", "--family", "laguerre", "--alpha", "0,1/2", "--max-level", "4", "--beta", "2,2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["moments"][0]["match"], true);
    assert_eq!(v["moments"][0]["moment"], "15/2");
}

#[test]
fn input_errors_exit_two_with_distinct_messages() {
    let missing = run(&["omega", "--measure", "/nonexistent/measure.json", "--max-level", "2"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(stderr(&missing).contains("No such file"), "{}", stderr(&missing));

    let bad = scratch("bad.json", "{not json");
    let malformed = run(&["omega", "--measure", bad.to_str().unwrap(), "--max-level", "2"]);
    assert_eq!(malformed.status.code(), Some(2));
    assert!(stderr(&malformed).contains("malformed"), "{}", stderr(&malformed));

    let table = scratch(
        "table.json",
        r#"{"d":1,"max_degree":2,"moments":[{"beta":[0],"value":"1"},{"beta":[1],"value":"0"},{"beta":[2],"value":"1"}]}"#,
    );
    let short = run(&["omega", "--moments", table.to_str().unwrap(), "--max-level", "3"]);
    assert_eq!(short.status.code(), Some(2));
    assert!(stderr(&short).contains("insufficient moments"), "{}", stderr(&short));

    let param = run(&["omega", "--family", "laguerre", "--alpha", "-1", "--max-level", "1"]);
    assert_eq!(param.status.code(), Some(2));

    let csv = run(&["cap", "--family", "hermite", "--d", "1", "--max-degree", "2", "--format", "csv"]);
    assert_eq!(csv.status.code(), Some(2));

    let two_sources = run(&["omega", "--family", "hermite", "--measure", "x.json", "--max-level", "1"]);
    assert_eq!(two_sources.status.code(), Some(2));
}

#[test]
fn output_is_deterministic_across_runs_and_thread_counts() {
    let args = ["alpha", "--family", "jacobi", "--a", "0,1", "--b", "1,0", "--max-level", "3"];
    let first = run(&args);
    let again = run(&args);
    let single = bin().args(args).env("JACOBI_MV_THREADS", "1").output().unwrap();
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    assert_eq!(first.stdout, again.stdout);
    assert_eq!(first.stdout, single.stdout);
}

#[test]
fn writes_to_output_file() {
    let p = scratch("decompose.json", "");
    let o = run(&["decompose", "--family", "hermite", "--d", "1", "--max-degree", "2", "--output", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    assert_eq!(v["degrees"][2]["gram"][0][0], "1/2");
}
