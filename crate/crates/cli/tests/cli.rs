use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use toricgm::exact_arith::Rat;
use toricgm::model_core::build_graph_matrix;
use toricgm::poly_engine::{ideal_equal, Binomial, Polynomial};
use toricgm::toric::ToricBasis;
use toricgm_cli::commands::{BasisResults, CheckResults, EvidenceOut, GraphResults, IpsResults, MleResults, ModelResults};
use toricgm_cli::formats::{to_json, BasisFile, GraphFile, MatrixFile};
use toricgm_cli::RunReport;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toricgm")).args(args).output().expect("binary runs")
}

fn ok<T: for<'de> serde::Deserialize<'de>>(args: &[&str]) -> RunReport<T> {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("report parses")
}

fn fails(args: &[&str], code: i32) -> String {
    let out = run(args);
    assert_eq!(out.status.code(), Some(code), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stderr).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

// Four-cycle matrix rows as printed, blocks {1,2}, {2,3}, {3,4}, {1,4}.
const FOUR_CYCLE_ROWS: [&str; 16] = [
    "1111000000000000",
    "0000111100000000",
    "0000000011110000",
    "0000000000001111",
    "1100000011000000",
    "0011000000110000",
    "0000110000001100",
    "0000001100000011",
    "1000100010001000",
    "0100010001000100",
    "0010001000100010",
    "0001000100010001",
    "1010101000000000",
    "0101010100000000",
    "0000000010101010",
    "0000000001010101",
];

const NO_THREE_WAY_ROWS: [&str; 12] = [
    "11000000", "00110000", "00001100", "00000011", "10001000", "01000100", "00100010", "00010001", "10100000",
    "01010000", "00001010", "00000101",
];

fn digits(s: &str) -> Vec<i64> {
    s.bytes().map(|b| i64::from(b - b'0')).collect()
}

#[test]
fn four_cycle_matrix_matches_printed_rows_in_clique_order() {
    let r: RunReport<ModelResults> = ok(&["model", "--graph", path(&data("four_cycle.json"))]);
    // cliques come out lexicographically: {1,2}, {1,4}, {2,3}, {3,4}
    let blocks = [0, 3, 1, 2];
    let want: Vec<Vec<i64>> = blocks.iter().flat_map(|&b| (0..4).map(move |k| digits(FOUR_CYCLE_ROWS[4 * b + k]))).collect();
    let got: Vec<Vec<i64>> = r.results.matrix.rows.iter().map(|row| row.entries.clone()).collect();
    assert_eq!(got, want);
    assert_eq!(r.results.matrix.rows[4].label, "{X1,X4}=00");
    assert_eq!(r.results.matrix.columns[11], "1011");
    assert_eq!((r.results.d, r.results.m, r.results.column_sum), (16, 16, 4));
}

#[test]
fn no_three_way_generators_give_the_printed_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.json");
    let r: RunReport<ModelResults> =
        ok(&["model", "--generators", path(&data("no_three_way.json")), "--out", path(&out)]);
    let want: Vec<Vec<i64>> = NO_THREE_WAY_ROWS.iter().map(|s| digits(s)).collect();
    let got: Vec<Vec<i64>> = r.results.matrix.rows.iter().map(|row| row.entries.clone()).collect();
    assert_eq!(got, want);
    let written: MatrixFile = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(written, r.results.matrix);
}

#[test]
fn unequal_column_sums_are_rejected() {
    let err = fails(&["model", "--matrix", path(&data("unequal_columns.json"))], 2);
    assert!(err.contains("column sums differ"), "{err}");
}

#[test]
fn parse_errors_carry_line_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"variables\": [\n    {\"name\": \"X1\", \"levels\": }\n  ]\n}\n").unwrap();
    let err = fails(&["model", "--graph", path(&bad)], 2);
    assert!(err.contains("line 3 column"), "{err}");
}

#[test]
fn model_requires_exactly_one_source() {
    fails(&["model"], 2);
    fails(&["model", "--graph", path(&data("chain3.json")), "--matrix", path(&data("chain3.json"))], 2);
}

#[test]
fn three_chain_basis_has_two_binomials() {
    let r: RunReport<BasisResults> = ok(&["basis", "--model", path(&data("chain3.json"))]);
    let mut texts: Vec<String> = r.results.basis.binomials.iter().map(|b| b.text.clone()).collect();
    texts.sort();
    assert_eq!(texts, vec!["p001*p100 - p000*p101", "p011*p110 - p010*p111"]);
    assert!(r.results.quadratic);
}

/// The printed four-cycle generators, pairwise then quartic.
const FOUR_CYCLE_PRINTED: [(&str, &str); 16] = [
    ("1011 1110", "1010 1111"),
    ("0111 1101", "0101 1111"),
    ("1001 1100", "1000 1101"),
    ("0110 1100", "0100 1110"),
    ("0011 1001", "0001 1011"),
    ("0011 0110", "0010 0111"),
    ("0001 0100", "0000 0101"),
    ("0010 1000", "0000 1010"),
    ("0100 0111 1001 1010", "0101 0110 1000 1011"),
    ("0010 0101 1011 1100", "0011 0100 1010 1101"),
    ("0001 0110 1010 1101", "0010 0101 1001 1110"),
    ("0001 0111 1010 1100", "0011 0101 1000 1110"),
    ("0000 0011 1101 1110", "0001 0010 1100 1111"),
    ("0000 0111 1001 1110", "0001 0110 1000 1111"),
    ("0000 0111 1011 1100", "0011 0100 1000 1111"),
    ("0000 0110 1011 1101", "0010 0100 1001 1111"),
];

fn exps(cells: &str) -> Vec<u32> {
    let mut e = vec![0; 16];
    for c in cells.split(' ') {
        e[usize::from_str_radix(c, 2).unwrap()] += 1;
    }
    e
}

fn load_basis(file: &BasisFile) -> ToricBasis {
    let a = build_graph_matrix(&GraphFile::to_graph(&serde_json::from_str(&std::fs::read_to_string(data("four_cycle.json")).unwrap()).unwrap()).unwrap()).unwrap();
    file.to_basis(&a).unwrap()
}

#[test]
fn four_cycle_basis_is_ideal_equal_to_printed_generators_with_and_without_seeding() {
    let plain: RunReport<BasisResults> = ok(&["basis", "--model", path(&data("four_cycle.json"))]);
    let seeded: RunReport<BasisResults> =
        ok(&["basis", "--model", path(&data("four_cycle.json")), "--seed-pairwise"]);
    assert_eq!(plain.results.basis, seeded.results.basis);
    assert!(!plain.results.quadratic);
    let basis = load_basis(&plain.results.basis);
    let order = basis.order().clone();
    let printed: Vec<Polynomial> = FOUR_CYCLE_PRINTED
        .iter()
        .map(|(u, v)| Polynomial::from_binomial(&Binomial::from_exponents(exps(u), exps(v)), &order))
        .collect();
    assert!(ideal_equal(&basis.polynomials(), &printed, &order).unwrap());
}

#[test]
fn seeding_needs_a_graph_model() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.json");
    ok::<ModelResults>(&["model", "--graph", path(&data("chain3.json")), "--out", path(&m)]);
    let err = fails(&["basis", "--model", path(&m), "--seed-pairwise"], 2);
    assert!(err.contains("graph"), "{err}");
}

#[test]
fn saturated_model_has_an_empty_basis() {
    let r: RunReport<BasisResults> = ok(&["basis", "--model", path(&data("triangle.json"))]);
    assert!(r.results.basis.binomials.is_empty());
}

#[test]
fn exhausted_budget_exits_with_three() {
    let err = fails(&["basis", "--model", path(&data("four_cycle.json")), "--budget", "1"], 3);
    assert!(err.contains("budget"), "{err}");
}

fn four_cycle_basis_file(dir: &Path) -> PathBuf {
    let out = dir.join("basis.json");
    ok::<BasisResults>(&["basis", "--model", path(&data("four_cycle.json")), "--out", path(&out)]);
    out
}

fn check(dist: &str, dir: &Path) -> CheckResults {
    let b = four_cycle_basis_file(dir);
    ok::<CheckResults>(&["check", "--model", path(&data("four_cycle.json")), "--basis", path(&b), "--dist", path(&data(dist))])
        .results
}

#[test]
fn moussouris_point_is_limit_only() {
    let dir = tempfile::tempdir().unwrap();
    let r = check("moussouris.json", dir.path());
    assert_eq!(r.verdict, "limit_only");
    match r.evidence {
        EvidenceOut::InfeasibleColumn { covered_rows, .. } => assert_eq!(covered_rows, (0..16).collect::<Vec<_>>()),
        other => panic!("unexpected evidence {other:?}"),
    }
    assert!(r.kernel_oracle_in_variety);
    assert!(r.facial_certificate.is_some());
}

#[test]
fn example_eight_point_is_outside_by_the_quartic() {
    let dir = tempfile::tempdir().unwrap();
    let r = check("off_face.json", dir.path());
    assert_eq!(r.verdict, "outside");
    let EvidenceOut::FailedBinomial { binomial, value, .. } = r.evidence else { panic!("no failing binomial") };
    let sides: Vec<&str> = binomial.split(" - ").collect();
    let mut sides = [sides[0], sides[1]];
    sides.sort();
    assert_eq!(sides, ["p0100*p0111*p1001*p1010", "p0101*p0110*p1000*p1011"]);
    assert!(value == "1/256" || value == "-1/256", "{value}");
    assert!(!r.kernel_oracle_in_variety);
}

#[test]
fn uniform_decimal_point_factors_and_normalizes() {
    let dir = tempfile::tempdir().unwrap();
    let b = four_cycle_basis_file(dir.path());
    let r: RunReport<CheckResults> = ok(&[
        "check",
        "--model",
        path(&data("four_cycle.json")),
        "--basis",
        path(&b),
        "--dist",
        path(&data("uniform.json")),
        "--normalize",
    ]);
    assert_eq!(r.results.verdict, "factors");
    assert_eq!(r.results.evidence, EvidenceOut::None);
    assert_eq!(r.results.distribution.unwrap().values, vec!["1/16"; 16]);
}

#[test]
fn distribution_length_must_match() {
    let dir = tempfile::tempdir().unwrap();
    let b = four_cycle_basis_file(dir.path());
    let err = fails(
        &["check", "--model", path(&data("four_cycle.json")), "--basis", path(&b), "--dist", path(&data("counts_chain3.json"))],
        2,
    );
    assert!(err.contains("dimension mismatch"), "{err}");
}

#[test]
fn ips_reproduces_the_fitted_cell() {
    let r: RunReport<IpsResults> =
        ok(&["ips", "--model", path(&data("four_cycle.json")), "--counts", path(&data("counts_four_cycle.json"))]);
    assert!((r.results.fitted[11] - 1.76).abs() < 0.01);
    assert_eq!(r.results.dropped, vec!["1100", "1101", "1110", "1111"]);
    assert!(r.results.max_error <= 1e-9);
}

#[test]
fn ips_nonconvergence_exits_with_four() {
    fails(
        &["ips", "--model", path(&data("four_cycle.json")), "--counts", path(&data("counts_four_cycle.json")), "--max-cycles", "1"],
        4,
    );
}

#[test]
fn exact_mle_reports_psi_as_strings() {
    let out = run(&["mle-exact", "--model", path(&data("four_cycle.json")), "--counts", path(&data("counts_four_cycle.json"))]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let r: RunReport<MleResults> = serde_json::from_str(&text).unwrap();
    assert_eq!(r.results.psi, vec!["1", "-362/39", "6713/351", "110/9", "-2368/39", "480/13"]);
    assert_eq!(r.results.psi_variable, "1011");
    assert_eq!(r.results.method, "shape");
    assert!(r.results.rational_roots.is_empty());
    assert!(!r.results.rational_mle);
    assert!((r.results.estimate.unwrap()[11] - 1.76).abs() < 0.01);
    let compact: String = text.split_whitespace().collect();
    assert!(compact.contains(r#""psi":["1","-362/39","6713/351","110/9","-2368/39","480/13"]"#));
}

#[test]
fn decomposable_exact_mle_is_the_closed_form() {
    let r: RunReport<MleResults> =
        ok(&["mle-exact", "--model", path(&data("chain3.json")), "--counts", path(&data("counts_chain3.json"))]);
    let n = [3i64, 1, 4, 1, 5, 9, 2, 6];
    // n_{ij+} n_{+jk} / n_{+j+}
    let want: Vec<String> = (0..8)
        .map(|c| {
            let (i, j, k) = (c >> 2, (c >> 1) & 1, c & 1);
            let nij: i64 = (0..2).map(|kk| n[i << 2 | j << 1 | kk]).sum();
            let njk: i64 = (0..2).map(|ii| n[ii << 2 | j << 1 | k]).sum();
            let nj: i64 = (0..4).map(|t| n[(t >> 1) << 2 | j << 1 | (t & 1)]).sum();
            Rat::new((nij * njk).into(), nj.into()).to_string()
        })
        .collect();
    assert!(r.results.rational_mle);
    assert_eq!(r.results.degree, 1);
    assert_eq!(r.results.exact_estimate.unwrap(), want);
}

#[test]
fn full_four_cycle_elimination_is_opt_in() {
    let err = fails(&["mle-exact", "--model", path(&data("four_cycle.json")), "--counts", path(&data("counts_positive.json"))], 2);
    assert!(err.contains("--heavy"), "{err}");
    let r: RunReport<MleResults> = ok(&[
        "mle-exact",
        "--model",
        path(&data("four_cycle.json")),
        "--counts",
        path(&data("counts_positive.json")),
        "--heavy",
    ]);
    assert_eq!(r.results.degree, 13);
    assert_eq!(r.results.method, "shape");
    assert!(r.results.rational_roots.is_empty());
    assert_eq!(r.results.estimate.map(|e| e.len()), Some(16));
}

#[test]
fn graph_reports() {
    let cyc: RunReport<GraphResults> = ok(&["graph", "--graph", path(&data("four_cycle.json"))]);
    assert!(!cyc.results.chordal);
    let p = cyc.results.partition.unwrap();
    for block in [&p.a, &p.b, &p.c, &p.d] {
        assert_eq!(block.len(), 1);
    }
    assert!(p.e.is_empty());

    let chain: RunReport<GraphResults> = ok(&["graph", "--graph", path(&data("chain4.json"))]);
    assert!(chain.results.chordal);
    assert_eq!(chain.results.elimination_order.as_ref().map(Vec::len), Some(4));
    assert!(chain.results.partition.is_none());

    let oct: RunReport<GraphResults> = ok(&["graph", "--graph", path(&data("octahedron.json"))]);
    let tri = |t: [u8; 3]| t.iter().map(|i| format!("X{i}")).collect::<Vec<_>>();
    let want: Vec<Vec<String>> =
        [[1, 2, 3], [1, 2, 6], [1, 3, 5], [1, 5, 6], [2, 3, 4], [2, 4, 6], [3, 4, 5], [4, 5, 6]].into_iter().map(tri).collect();
    assert_eq!(oct.results.cliques, want);
    assert!(!oct.results.chordal);
}

fn without_timing(s: &[u8]) -> String {
    String::from_utf8_lossy(s).lines().filter(|l| !l.trim_start().starts_with("\"timing_ms\"")).collect::<Vec<_>>().join("\n")
}

#[test]
fn reports_are_deterministic_apart_from_timing() {
    let (cycle, counts) = (data("four_cycle.json"), data("counts_four_cycle.json"));
    let args = ["basis", "--model", path(&cycle)];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(without_timing(&a.stdout), without_timing(&b.stdout));
    let mle = ["mle-exact", "--model", path(&cycle), "--counts", path(&counts)];
    assert_eq!(without_timing(&run(&mle).stdout), without_timing(&run(&mle).stdout));
}

#[test]
fn reports_round_trip() {
    let out = run(&["graph", "--graph", path(&data("octahedron.json"))]);
    let r: RunReport<GraphResults> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(to_json(&r).as_bytes(), &out.stdout[..]);
    let out = run(&["check", "--model", path(&data("four_cycle.json")), "--basis", path(&four_cycle_basis_file(tempfile::tempdir().unwrap().path())), "--dist", path(&data("off_face.json"))]);
    let r: RunReport<CheckResults> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(to_json(&r).as_bytes(), &out.stdout[..]);
}
