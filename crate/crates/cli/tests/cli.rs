use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn sample(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../samples").join(name)
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mk-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn mk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mk")).args(args).env_remove("MK_COLOR").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn palindrome_answers() {
    let p = sample("palindrome.mk");
    let o = mk(&["run", p.to_str().unwrap(), "--answers", "4"]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout(&o),
        "x = Nil\n;;\nx = Cons(_0, Nil)\n;;\nx = Cons(_0, Cons(_0, Nil))\n;;\nx = Cons(_0, Cons(_1, Cons(_0, Nil)))\nbudget-exhausted\n"
    );
}

#[test]
fn failing_query_is_complete() {
    let o = mk(&["run", sample("fail.mk").to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "complete\n");
}

#[test]
fn cut_sample_gives_one_answer() {
    let o = mk(&["run", sample("cut.mk").to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "q = A\ncomplete\n");
    let o = mk(&["run", sample("cut.mk").to_str().unwrap(), "--mode", "interleaving"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn no_variables_prints_yes() {
    let p = scratch("ground.mk", "? A === A \\/ A === A");
    let o = mk(&["run", p.to_str().unwrap()]);
    assert_eq!(stdout(&o), "yes\n;;\nyes\ncomplete\n");
}

fn json_answers(o: &Output) -> (Vec<Value>, String) {
    let text = stdout(o);
    let (array, status) = text.trim_end().rsplit_once('\n').unwrap();
    let v: Value = serde_json::from_str(array).unwrap();
    (v.as_array().unwrap().clone(), status.to_string())
}

#[test]
fn json_streams_with_increasing_steps() {
    let p = sample("append.mk");
    let o = mk(&["run", p.to_str().unwrap(), "--answers", "6", "--json"]);
    assert_eq!(code(&o), 0);
    let (answers, status) = json_answers(&o);
    assert_eq!(status, "budget-exhausted");
    assert_eq!(answers.len(), 6);
    let steps: Vec<u64> = answers.iter().map(|a| a["steps"].as_u64().unwrap()).collect();
    assert!(steps.windows(2).all(|w| w[0] < w[1]), "{steps:?}");

    // Asking for fewer answers stops earlier with the same prefix.
    let o = mk(&["run", p.to_str().unwrap(), "--answers", "3", "--json"]);
    let (prefix, _) = json_answers(&o);
    assert_eq!(prefix[..], answers[..3]);
}

#[test]
fn json_and_text_agree() {
    let p = sample("append.mk");
    let text = stdout(&mk(&["run", p.to_str().unwrap(), "--answers", "5"]));
    let (answers, _) = json_answers(&mk(&["run", p.to_str().unwrap(), "--answers", "5", "--json"]));
    let from_json: Vec<String> = answers
        .iter()
        .map(|a| {
            let b = a["bindings"].as_object().unwrap();
            b.iter().map(|(k, v)| format!("{k} = {}\n", v.as_str().unwrap())).collect::<String>()
        })
        .collect();
    let from_text: Vec<String> =
        text.trim_end().rsplit_once('\n').unwrap().0.split(";;\n").map(|s| s.to_string()).collect();
    let from_text: Vec<String> =
        from_text.iter().map(|s| if s.ends_with('\n') { s.clone() } else { format!("{s}\n") }).collect();
    assert_eq!(from_json, from_text);
}

#[test]
fn step_budget_is_respected() {
    let p = sample("divergence.mk");
    let o = mk(&["run", p.to_str().unwrap(), "--mode", "sld", "--max-steps", "1000"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "budget-exhausted\n");
    let o = mk(&["run", p.to_str().unwrap(), "--answers", "1"]);
    assert_eq!(stdout(&o), "q = A\nbudget-exhausted\n");
}

#[test]
fn trace_lines() {
    let p = scratch("unify.mk", "? Nil === Nil");
    let out = stdout(&mk(&["trace", p.to_str().unwrap()]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 1);
    assert!(lines[0].starts_with("1 UnifySuccess"), "{out}");

    let p = scratch("clash.mk", "? A === B");
    let out = stdout(&mk(&["trace", p.to_str().unwrap()]));
    assert_eq!(out.lines().count(), 1);
    assert!(out.starts_with("1 UnifyFail"), "{out}");

    let p = scratch("disj.mk", "? x === A \\/ x === B");
    let out = stdout(&mk(&["trace", p.to_str().unwrap()]));
    let rules: Vec<&str> = out.lines().map(|l| l.split(' ').nth(1).unwrap()).collect();
    assert_eq!(rules[0], "Disj");
    assert!(rules[1].starts_with("Sum"), "{out}");
}

#[test]
fn trace_marks_cut_answers() {
    let out = stdout(&mk(&["trace", sample("cut.mk").to_str().unwrap()]));
    assert!(out.lines().any(|l| l.ends_with(" cut") || l.contains(" cut ")), "{out}");
}

#[test]
fn check_passes_on_samples() {
    let o = mk(&["check", sample("palindrome.mk").to_str().unwrap(), "--depth", "2", "--index", "6"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = mk(&["check", sample("append.mk").to_str().unwrap(), "--depth", "2", "--index", "4"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn check_json_lists_violations() {
    let o = mk(&["check", sample("divergence.mk").to_str().unwrap(), "--mode", "sld", "--json"]);
    assert_eq!(code(&o), 5);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["kind"], "completeness");
    assert_eq!(v[0]["witness"], "q = A");
    let o = mk(&["check", sample("append.mk").to_str().unwrap(), "--json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(serde_json::from_str::<Value>(&stdout(&o)).unwrap(), Value::Array(vec![]));
}

#[test]
fn mutated_engine_is_caught() {
    for name in ["append.mk", "append_ground.mk"] {
        let o = mk(&["check", sample(name).to_str().unwrap(), "--depth", "2", "--index", "4", "--mutate", "drop-composition"]);
        assert_eq!(code(&o), 5, "{name}: {}", stdout(&o));
    }
}

#[test]
fn exit_codes() {
    assert_eq!(code(&mk(&["run", "/nonexistent/file.mk"])), 1);
    let p = scratch("syntax.mk", "? x === ");
    assert_eq!(code(&mk(&["run", p.to_str().unwrap()])), 2);
    assert_eq!(code(&mk(&["parse", p.to_str().unwrap()])), 2);
    let p = scratch("unbound.mk", "r x = x === y;\n? r q");
    assert_eq!(code(&mk(&["run", p.to_str().unwrap()])), 3);
    assert_eq!(code(&mk(&["trace", p.to_str().unwrap()])), 3);
    let p = scratch("empty.mk", "? S(x) === y");
    assert_eq!(code(&mk(&["check", p.to_str().unwrap()])), 4);
    assert_eq!(code(&mk(&["check", sample("cut.mk").to_str().unwrap()])), 3);
    assert_eq!(code(&mk(&["parse", sample("palindrome.mk").to_str().unwrap()])), 0);
}

#[test]
fn parse_prints_a_reparsable_spec() {
    let first = stdout(&mk(&["parse", sample("palindrome.mk").to_str().unwrap()]));
    let p = scratch("printed.mk", &first);
    let second = stdout(&mk(&["parse", p.to_str().unwrap()]));
    assert_eq!(first, second);
}

#[test]
fn color_is_opt_in() {
    let p = sample("fail.mk");
    let o = Command::new(env!("CARGO_BIN_EXE_mk")).args(["run", p.to_str().unwrap()]).env("MK_COLOR", "1").output().unwrap();
    assert!(stdout(&o).contains("\x1b["));
    assert!(!stdout(&mk(&["run", p.to_str().unwrap()])).contains('\x1b'));
}
