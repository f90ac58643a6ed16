use ssrt::cli::dispatch;

fn call(args: &[&str]) -> (i32, String) {
    let mut buf = Vec::new();
    let code = dispatch(
        std::iter::once("ssrt").chain(args.iter().copied()),
        &mut buf,
    );
    (code, String::from_utf8(buf).unwrap())
}

#[test]
fn run_examples() {
    assert_eq!(
        call(&["run", "identity_or_reverse", "a:d1 a:d2 b:d3 c:d4"]),
        (0, "c:d4@4 b:d3@3 a:d2@2 a:d1@1\n".into())
    );
    assert_eq!(
        call(&["run", "identity_or_reverse", "a:d1 b:d2 a:d1"]),
        (0, "a:d1@1 b:d2@2 a:d1@3\n".into())
    );
    assert_eq!(
        call(&["run", "identity_or_reverse", "EPS"]),
        (0, "EPS\n".into())
    );
    assert_eq!(call(&["run", "identity", "z:d1"]).0, 0);
}

#[test]
fn malformed_input_exits_2() {
    assert_eq!(call(&["run", "identity", "a:x"]).0, 2);
    assert_eq!(call(&["run", "identity", "a:D1"]).0, 2);
    assert_eq!(call(&["run", "no_such_machine", "a:d1"]).0, 2);
    assert_eq!(call(&["factor", "identity", "a:d1", "3", "L"]).0, 2);
    assert_eq!(call(&["factor", "identity", "a:d1", "1", "Q"]).0, 2);
    assert_eq!(
        call(&["analyze", "identity", "a:d1", "--fresh-values", "1"]).0,
        2
    );
    assert_eq!(call(&[]).0, 2);
}

#[test]
fn factor_and_analyze() {
    assert_eq!(
        call(&[
            "factor",
            "identity_or_reverse",
            "a:d1 a:d2 b:d3 c:d4",
            "2,3",
            "L"
        ]),
        (0, "c:d4@4 b:d3@3 *L\n".into())
    );
    assert_eq!(
        call(&["factor", "identity", "a:d1 a:d1 a:d1 b:d1", "3", "L", "-2"]),
        (0, "*L b:d1@2\n".into())
    );
    let (code, out) = call(&["analyze", "identity_or_reverse", "a:d1 a:d2 a:d3"]);
    assert_eq!(code, 0);
    assert!(out.contains("MEMORABLE d1 WITNESS v=[a:d1]"), "{out}");
    assert!(out.contains("AIFL [d1:vm]"), "{out}");
}

#[test]
fn validate_files() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("copying.ssrt");
    std::fs::write(
        &bad,
        "[alphabets]\ninput = a\noutput = a\n[states]\nq initial\n[vars]\nx\n[output]\nq = {x}\n[transitions]\nq a [true] -> q do x := {x} {x}\n",
    )
    .unwrap();
    let (code, out) = call(&["validate", bad.to_str().unwrap()]);
    assert_eq!(code, 1, "{out}");
    let junk = dir.path().join("junk.ssrt");
    std::fs::write(&junk, "[states\n").unwrap();
    assert_eq!(call(&["validate", junk.to_str().unwrap()]).0, 2);
    assert_eq!(call(&["validate", "double_gate"]), (0, "VALID\n".into()));
}

#[test]
fn verify_exit_codes() {
    assert_eq!(
        call(&["verify", "identity_or_reverse", "identity_or_reverse"]),
        (0, "AGREE 291 words\n".into())
    );
    let (code, out) = call(&["verify", "reverse", "identity"]);
    assert_eq!(code, 1);
    assert!(out.starts_with("MISMATCH"), "{out}");
}

#[test]
fn synth_writes_a_valid_machine() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("id.ssrt");
    let p = path.to_str().unwrap();
    let (code, out) = call(&["synth", "identity", "-o", p]);
    assert_eq!(code, 0, "{out}");
    assert!(out.starts_with("SYNTH states=3"), "{out}");
    assert_eq!(call(&["validate", p]), (0, "VALID\n".into()));
    assert_eq!(call(&["verify", p, "identity"]).0, 0);
    let (code, tracker) = call(&["synth", "identity", "--tracker"]);
    assert_eq!(code, 0);
    assert!(tracker.contains("[transitions]"));
}

#[test]
fn tree_demo_and_fixtures() {
    let (code, out) = call(&["tree", "demo", "identity", "a:d1 a:d2"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(out.matches("COMPLETE yes").count(), 2);
    assert_eq!(out.matches("REDUCED yes").count(), 2);
    let (code, out) = call(&["fixtures"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 6);
    assert!(out.starts_with("identity_or_reverse pair "));
}

#[test]
fn reports_are_byte_stable() {
    for args in [
        &["analyze", "double_gate", "a:d1 a:d2 a:d3"][..],
        &["tree", "demo", "identity_or_reverse", "a:d1 b:d2"][..],
        &["synth", "reverse"][..],
    ] {
        assert_eq!(call(args), call(args), "{args:?}");
    }
}
