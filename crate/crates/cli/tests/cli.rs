use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn spec(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../specs").join(name)
}

fn csynth(args: &[&str]) -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_csynth"));
    c.args(args).env_remove("CSYNTH_OUT_DIR");
    c
}

fn run(c: &mut Command) -> Output {
    c.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn listing(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> =
        fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    names.sort();
    names
}

fn synthesize(name: &str, extra: &[&str], out: &Path) -> Output {
    let path = spec(name);
    let mut args = vec!["synthesize", path.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&mut csynth(&args))
}

#[test]
fn fig1_writes_machine_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let o = synthesize("fig1.spec", &[], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(listing(dir.path()), ["fig1.dot", "fig1.report.json", "fig1.report.txt"]);
    assert!(stdout(&o).starts_with("realizable: 3 states"));
    let dot = fs::read_to_string(dir.path().join("fig1.dot")).unwrap();
    assert!(dot.contains("\"s1\" -> \"s3\" [label=\"!a | b\"]"));
}

#[test]
fn voting_writes_contract() {
    let dir = tempfile::tempdir().unwrap();
    let sig = spec("voting.sig.json");
    let o = synthesize("voting.spec", &["--signatures", sig.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        listing(dir.path()),
        ["Voting.manifest.json", "Voting.sol", "voting.dot", "voting.report.json", "voting.report.txt"]
    );
    let sol = fs::read_to_string(dir.path().join("Voting.sol")).unwrap();
    assert!(sol.contains("contract Voting {"));
}

#[test]
fn erc20_writes_split_machines() {
    let dir = tempfile::tempdir().unwrap();
    let sig = spec("erc20_extended.sig.json");
    let o = synthesize("erc20_extended.spec", &["--signatures", sig.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let files = listing(dir.path());
    for f in [
        "Token.sol",
        "Token.manifest.json",
        "erc20_extended.dot",
        "erc20_extended.empty.dot",
        "erc20_extended.m.dot",
        "erc20_extended.m_n.dot",
    ] {
        assert!(files.iter().any(|n| n == f), "{f} missing from {files:?}");
    }
    let root = fs::read_to_string(dir.path().join("erc20_extended.empty.dot")).unwrap();
    assert!(root.contains("K = {s1, s2}"));
}

#[test]
fn optional_outputs_can_be_suppressed() {
    let dir = tempfile::tempdir().unwrap();
    let sig = spec("voting.sig.json");
    let o = synthesize(
        "voting.spec",
        &["--signatures", sig.to_str().unwrap(), "--no-dot", "--no-solidity", "--dump-bdd"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(listing(dir.path()), ["voting.bdd.txt", "voting.report.json", "voting.report.txt"]);
    let dir = tempfile::tempdir().unwrap();
    let o = synthesize("voting.spec", &["--signatures", sig.to_str().unwrap(), "--analysis-only"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(!listing(dir.path()).iter().any(|f| f.ends_with(".sol")));
}

#[test]
fn unrealizable_exits_three_without_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let o = synthesize("unrealizable.spec", &[], dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(listing(dir.path()).is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("unrealizable"));
}

#[test]
fn syntax_error_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.spec");
    fs::write(&bad, "#input_props a\n#require\nG(a &&\n").unwrap();
    let o = run(&mut csynth(&["check", bad.to_str().unwrap()]));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("3:"));
}

#[test]
fn requirement_violation_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("local.spec");
    // The update is over m but the method has no parameters.
    fs::write(&path, "#params m\n#methods go\n#cells c(m)\n#functions f/1\n#obligation\nG(go -> [[c(m) <- f(c(m))]])\n")
        .unwrap();
    let out = dir.path().join("out");
    let o = run(&mut csynth(&["synthesize", path.to_str().unwrap(), "--out", out.to_str().unwrap()]));
    assert_eq!(o.status.code(), Some(4));
    let text = fs::read_to_string(out.join("local.requirements.txt")).unwrap();
    assert!(text.contains("LocalUpdates"), "{text}");
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let path = spec("fig1.spec");
    let o = run(csynth(&["synthesize", path.to_str().unwrap()]).env("CSYNTH_OUT_DIR", dir.path()));
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("fig1.dot").is_file());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let sig = spec("erc20_extended.sig.json");
    for d in [&a, &b] {
        let o = synthesize("erc20_extended.spec", &["--signatures", sig.to_str().unwrap()], d.path());
        assert_eq!(o.status.code(), Some(0));
    }
    let files = listing(a.path());
    assert_eq!(files, listing(b.path()));
    for f in files {
        assert_eq!(fs::read(a.path().join(&f)).unwrap(), fs::read(b.path().join(&f)).unwrap(), "{f}");
    }
}

#[test]
fn check_reports_free_choices_and_deadlocks() {
    let path = spec("fig1.spec");
    let o = run(&mut csynth(&["check", path.to_str().unwrap()]));
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("free choices: 1 state(s)"), "{text}");

    let path = spec("voting.spec");
    let o = run(&mut csynth(&["check", path.to_str().unwrap(), "--json", "--determined", "time > cTime()=constant"]));
    assert_eq!(o.status.code(), Some(0));
    let json = stdout(&o);
    assert!(json.contains("\"deadlocks\": []"), "{json}");

    let o = run(&mut csynth(&["check", path.to_str().unwrap(), "--determined", "nope=constant"]));
    assert_eq!(o.status.code(), Some(1));
    let o = run(&mut csynth(&["check", path.to_str().unwrap(), "--policy", "reject"]));
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn reject_policy_fails_on_free_choice() {
    let path = spec("fig1.spec");
    let o = run(&mut csynth(&["check", path.to_str().unwrap(), "--policy", "reject"]));
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("free choice"));
}

#[test]
fn oracle_verdicts() {
    let path = spec("erc20_extended.spec");
    let p = path.to_str().unwrap();
    let o = run(&mut csynth(&["oracle", p]));
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "equivalent (4 instances, 16 configurations)\n");

    let o = run(&mut csynth(&["oracle", p, "--domain", "1"]));
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("equivalent (1 instances"));

    let o = run(&mut csynth(&["oracle", p, "--set-knowledge", "{}:q2=s1,s4"]));
    assert_eq!(o.status.code(), Some(6));
    assert!(stdout(&o).starts_with("witness for instance"));

    let o = run(&mut csynth(&["oracle", p, "--set-knowledge", "garbage"]));
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn emit_writes_only_the_contract() {
    let dir = tempfile::tempdir().unwrap();
    let path = spec("param_voting.spec");
    let sig = spec("param_voting.sig.json");
    let o = run(&mut csynth(&[
        "emit",
        path.to_str().unwrap(),
        "--signatures",
        sig.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(listing(dir.path()), ["ParamVoting.manifest.json", "ParamVoting.sol"]);
}

#[test]
fn bad_arguments_are_rejected() {
    let path = spec("fig1.spec");
    let o = run(&mut csynth(&["check", path.to_str().unwrap(), "--state-cap", "0"]));
    assert_eq!(o.status.code(), Some(2));
    let o = run(&mut csynth(&["check", "/nonexistent.spec"]));
    assert_eq!(o.status.code(), Some(1));
}
