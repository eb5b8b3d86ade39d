use std::process::Command;

use lambda_forge::arith::rat::int;
use lambda_forge_cli::expr::{parse, ExprAst};
use proptest::prelude::*;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lambda-forge"))
}

fn run(args: &[&str]) -> (i32, Vec<u8>, String) {
    let out = bin().args(args).env("LAMBDAFORGE_THREADS", "2").output().unwrap();
    (out.status.code().unwrap_or(-1), out.stdout, String::from_utf8_lossy(&out.stderr).into_owned())
}

fn ast() -> impl Strategy<Value = ExprAst> {
    let leaf = prop_oneof![
        (0i64..20).prop_map(|k| ExprAst::Num(int(k))),
        prop::sample::select(vec!["d", "l", "mu", "L", "e", "Delta", "alpha"]).prop_map(|s| ExprAst::Ident(s.into())),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| ExprAst::Neg(Box::new(a))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ExprAst::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ExprAst::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ExprAst::Mul(Box::new(a), Box::new(b))),
            (inner, 0u32..4).prop_map(|(a, k)| ExprAst::Pow(Box::new(a), k)),
        ]
    })
}

proptest! {
    #[test]
    fn expressions_round_trip(e in ast()) {
        let shown = e.to_string();
        let back = parse(&shown).unwrap();
        prop_assert_eq!(&back, &e, "{}", shown);
        prop_assert_eq!(back.to_string(), shown);
    }
}

#[test]
fn json_output_is_deterministic() {
    for args in [
        &["--json", "cohom", "virasoro", "--nmax", "3", "--wmax", "6", "--reps"][..],
        &["--json", "dist", "virasoro", "--window", "8", "--samples", "3", "--seed", "7"][..],
        &["--json", "check", "sl2", "--module", "adjoint"][..],
        &["--json", "modes", "sl2", "--window", "2"][..],
    ] {
        let (c1, a, _) = run(args);
        let (c2, b, _) = run(args);
        assert_eq!((c1, c2), (0, 0), "{args:?}");
        assert_eq!(a, b, "{args:?}");
        serde_json::from_slice::<serde_json::Value>(&a).unwrap();
    }
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["check", "virasoro"]).0, 0);
    let (code, _, err) = run(&["check", "no-such-algebra"]);
    assert_eq!(code, 2);
    assert!(err.contains("no-such-algebra"), "{err}");
    let (code, _, err) = run(&["bracket", "virasoro", "L", "Q"]);
    assert_eq!(code, 2);
    assert!(err.contains("`Q`"), "{err}");
    assert_eq!(run(&["frobnicate"]).0, 2);

    let path = std::env::temp_dir().join(format!("lambda-forge-cli-{}.json", std::process::id()));
    std::fs::write(
        &path,
        r#"{"name":"broken","kind":"lie","generators":[{"name":"L","weight":2}],
           "table":[{"left":"L","right":"L","value":"(d + 3*l)*L"}]}"#,
    )
    .unwrap();
    let (code, out, _) = run(&["check", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(code, 1, "{}", String::from_utf8_lossy(&out));
}

#[test]
fn show_reproduces_presets() {
    let (code, out, _) = run(&["show", "virasoro"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
    assert_eq!(v["table"][0]["value"], "(d + 2*l)*L");
}
