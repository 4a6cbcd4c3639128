//! Golden-output tests: the committed reference reports for the default
//! configs. The eval report must match bit-for-bit; the degeneration
//! table is compared entry-by-entry at 1e-12.

use std::process::Command;

fn run(args: &[&str]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_qtau"))
        .args(args)
        .env_remove("QTAU_PROD_TAIL_TOL")
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(0), "{:?}", out);
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn eval_default_matches_golden_bit_for_bit() {
    let golden = include_str!("golden/eval_default.json");
    let actual = run(&["eval", "--single-thread"]);
    assert_eq!(actual, golden, "default eval output drifted from golden");
}

#[test]
fn degenerate_default_matches_golden_numerically() {
    let golden = include_str!("golden/degenerate_default.csv");
    let actual = run(&["degenerate", "--single-thread", "--format", "csv"]);
    let (g_lines, a_lines): (Vec<&str>, Vec<&str>) =
        (golden.lines().collect(), actual.lines().collect());
    assert_eq!(g_lines.len(), a_lines.len(), "row count changed");
    assert_eq!(g_lines[0], a_lines[0], "header changed");
    for (g, a) in g_lines.iter().zip(&a_lines).skip(1) {
        for (gf, af) in g.split(',').zip(a.split(',')) {
            match (gf.parse::<f64>(), af.parse::<f64>()) {
                (Ok(gv), Ok(av)) => {
                    let scale = gv.abs().max(av.abs()).max(1e-300);
                    assert!(
                        (gv - av).abs() / scale <= 1e-12,
                        "entry {gf} vs {af} differs beyond 1e-12"
                    );
                }
                _ => assert_eq!(gf, af, "non-numeric entry changed"),
            }
        }
    }
}
