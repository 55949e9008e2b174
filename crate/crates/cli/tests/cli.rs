use std::process::Command;

use enriched_sites::Limits;
use enriched_sites_cli::instance::{canonical, load, parse_raw};
use enriched_sites_cli::{source, BUILTINS};

fn enrich(args: &[&str]) -> (String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_enrich")).args(args).output().expect("binary runs");
    (String::from_utf8(out.stdout).unwrap(), out.status.code().unwrap_or(-1))
}

#[test]
fn builtins_load_and_round_trip() {
    for (name, src) in BUILTINS {
        let inst = load(src, &Limits::default()).unwrap_or_else(|e| panic!("{name}: {e}"));
        let again = canonical(&parse_raw(&canonical(&inst.raw)).unwrap());
        assert_eq!(again, canonical(&inst.raw), "{name}");
        assert_eq!(source(&format!("builtin:{name}")).unwrap(), src);
    }
}

#[test]
fn parse_errors_carry_positions() {
    let e = load("[quantale.Q]\nkind = \"two_element\"\n\n[category.c]\nbase = \"Q\"\nobjects = [\"a\"\n", &Limits::default()).unwrap_err();
    assert!(e.line.is_some() && e.column.is_some(), "{e}");
    assert!(e.to_string().starts_with("line "), "{e}");

    let e = load("[quantale.Q]\nkind = \"two_element\"\nbogus = 1\n", &Limits::default()).unwrap_err();
    assert_eq!(e.line, Some(3), "{e}");

    let src = "[quantale.Q]\nkind = \"two_element\"\n\n[category.c]\nbase = \"Q\"\nobjects = [\"a\"]\nhom = [[\"2\"]]\n";
    let e = load(src, &Limits::default()).unwrap_err();
    assert_eq!(e.line, Some(4), "{e}");
    assert!(e.message.contains("[category.c]"), "{e}");
}

#[test]
fn unknown_names_are_reported() {
    let src = "[quantale.Q]\nkind = \"two_element\"\n\n[category.c]\nbase = \"R\"\nobjects = [\"a\"]\nhom = [[\"1\"]]\n";
    let e = load(src, &Limits::default()).unwrap_err();
    assert!(e.message.contains('R'), "{e}");
}

#[test]
fn validate_suite_passes() {
    let (out, code) = enrich(&["validate", "suite"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("[pass] coverage P2_half: coverage on P2"));
    assert!(out.contains("summary: 36 passed, 0 failed, 0 not checked"), "{out}");
}

#[test]
fn localize_reports_the_ring_of_fractions() {
    let (out, code) = enrich(&["localize", "zmod6-S13"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("S13: I_min = (3), t(A) = (2)"));
    assert!(out.contains("A_R ≅ zmod2; oracle A[S^{-1}] ≅ zmod2; isomorphic: yes"));
}

#[test]
fn injectivity_output() {
    let (out, code) = enrich(&["injectivity", "chain3-into-exp"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("sieves enumerated: 9; images distinct: 9"));
    assert!(out.contains("coverages enumerated: 24; images distinct: 24"));
    assert!(out.contains("images failing T1 or T2: 23 of 24"));
}

#[test]
fn refused_maps_are_not_checked() {
    let (out, code) = enrich(&["injectivity", "suite", "--map", "collapse", "--category", "P2"]);
    assert_ne!(code, 0);
    assert!(out.contains("[not-checked] collapse on P2: sieve change of base is injective"));
    assert!(out.contains("sieves enumerated: 22; images distinct: 4"));
}

#[test]
fn pullback_records_the_literal_formula() {
    let (out, code) = enrich(&["pullback", "suite", "P2_max_x", "--along", "y", "--value", "2"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("result on y {x: 1, y: 0}"));
    assert!(out.contains("pointwise metric formula gives on y {x: 0, y: 1}, not a sieve: bound fails at x"));
}

#[test]
fn counterexample_and_caps() {
    let (out, code) = enrich(&["counterexample", "--dmax", "3"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("separating ideal: <x^3> in H_S: yes, in H_T: no"));
    let (out, code) = enrich(&["coverage-check", "suite", "--cap", "10"]);
    assert_ne!(code, 0, "{out}");
}

#[test]
fn machine_format_and_errors() {
    let (out, code) = enrich(&["--format", "machine", "gabriel-check", "suite", "--topology", "Z6_S13"]);
    assert_eq!(code, 0);
    assert!(out.contains("check.1.status=pass\n"));
    assert!(out.ends_with("summary.pass=1\nsummary.fail=0\nsummary.not_checked=0\n"));
    let (_, code) = enrich(&["validate", "/nonexistent/file.toml"]);
    assert_eq!(code, 2);
}

#[test]
fn output_is_deterministic() {
    for args in [&["validate", "suite"][..], &["injectivity", "suite"], &["localize", "suite"], &["canonical", "suite"]] {
        assert_eq!(enrich(args), enrich(args), "{args:?}");
    }
}
