//! Desk-scale verification gate: ten checks, each printing one line
//! (visible with `cargo test --test acceptance -- --nocapture`).

mod common;

use fibpart::cluster::{analyze_row, extract_slopes, kmeans};
use fibpart::dsl::check_corpus;
use fibpart::gbs::{verify_partition, GbsBlock, PartitionSpec};
use fibpart::golden::{parse_int_grid, MATRIX_20X20, MATRIX_4X4, OA_9X4};
use fibpart::mex::{
    avoided_set, coverage_report, generate_reference, verify_row2_structure, MexMatrix,
};
use fibpart::oa::{dm_to_oa, field_dm, verify_difference_matrix, verify_oa, OrthogonalArray};
use fibpart::oeis::{builtin_manifest, crosscheck_all, BfileCache};
use fibpart::perm::{builtin, compose_eval, detect_order, OrderOutcome};
use fibpart::wythoff::fib;
use rand::rngs::StdRng;
use rand::SeedableRng;
use std::collections::BTreeSet;
use std::sync::OnceLock;
use std::time::Instant;

const BIG_COLS: usize = 100_001;
const SMALL_COLS: usize = 10_000;
const MATRIX_ROWS: usize = 7;

static BIG: OnceLock<(MexMatrix, f64)> = OnceLock::new();
static SMALL: OnceLock<MexMatrix> = OnceLock::new();

fn big() -> &'static (MexMatrix, f64) {
    BIG.get_or_init(|| {
        let t = Instant::now();
        let m = MexMatrix::generate(MATRIX_ROWS, BIG_COLS);
        (m, t.elapsed().as_secs_f64())
    })
}

fn small() -> &'static MexMatrix {
    SMALL.get_or_init(|| MexMatrix::generate(MATRIX_ROWS, SMALL_COLS))
}

fn criterion(n: u32, budget_secs: f64, label: &str, body: impl FnOnce() -> Result<String, String>) {
    let t = Instant::now();
    let outcome = body();
    let secs = t.elapsed().as_secs_f64();
    match outcome {
        Ok(detail) => {
            if secs > budget_secs {
                println!("criterion {n}: FAIL ({secs:.2}s, budget {budget_secs}s) {label}: over budget; {detail}");
                panic!("criterion {n} exceeded its {budget_secs}s budget: {secs:.2}s");
            }
            println!("criterion {n}: PASS ({secs:.2}s) {label}: {detail}");
        }
        Err(why) => {
            println!("criterion {n}: FAIL ({secs:.2}s) {label}: {why}");
            panic!("criterion {n} failed: {why}");
        }
    }
}

macro_rules! check {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

#[test]
fn criterion_01_golden_matrices() {
    criterion(1, 1.0, "stored matrices reproduced bit-exactly", || {
        for (text, rows, cols) in [(MATRIX_4X4, 4usize, 4usize), (MATRIX_20X20, 20, 20)] {
            let want = parse_int_grid(text).map_err(|e| e.to_string())?;
            let got = MexMatrix::generate(rows, cols);
            check!(got.as_rows() == &want[..], "{rows}x{cols} grid differs");
        }
        Ok("4x4 and 20x20 both match".into())
    });
}

#[test]
fn criterion_02_row2_oracle_equivalence() {
    let (m, _) = big();
    criterion(2, 30.0, "row 2 against its closed form", || {
        let report = verify_row2_structure(m.row(2)).map_err(|e| e.to_string())?;
        if let Some((name, w)) = report.identities.first_counterexample() {
            return Err(format!("{name} fails at {}: {}", w.input, w.detail));
        }
        check!(report.identities.identities.len() == 3, "expected three outcomes");
        check!(
            report.covered_prefix >= 61_000,
            "covered prefix {} below expectation",
            report.covered_prefix
        );
        check!(
            report.diff_radius >= 30_000,
            "difference radius {} below expectation",
            report.diff_radius
        );
        Ok(format!(
            "closed form, involution and distinct differences on {} columns; value prefix {}, difference radius {}",
            m.cols(),
            report.covered_prefix,
            report.diff_radius
        ))
    });
}

#[test]
fn criterion_03_avoided_set_oracle() {
    criterion(3, 10.0, "bitset engine against the literal definition", || {
        let fast = MexMatrix::generate(6, 301);
        let slow = generate_reference(6, 301);
        check!(fast.as_rows() == slow.as_rows(), "engine and reference differ");

        let pinned: &[(usize, usize, &[i64])] = &[
            (1, 1, &[0]),
            (1, 2, &[0, 1]),
            (1, 3, &[0, 1, 2]),
            (2, 1, &[0, 1]),
            (2, 2, &[0, 2, 3]),
            (2, 3, &[0, 1, 2, 3, 4]),
            (3, 1, &[0, 1, 2]),
            (3, 2, &[0, 1, 2, 3, 4]),
            (3, 3, &[0, 3, 5, 6, 9]),
        ];
        for &(i, j, want) in pinned {
            let got = avoided_set(&fast, i, j);
            let want: BTreeSet<i64> = want.iter().copied().collect();
            check!(got == want, "avoided set at ({i},{j}) is {got:?}, expected {want:?}");
        }
        Ok("rows 0..5, columns 0..300 identical; pinned avoided sets match".into())
    });
}

#[test]
fn criterion_04_identity_corpus() {
    criterion(4, 10.0, "claim corpus at the full bound", || {
        let corpus = include_str!("../corpus/identities.txt");
        let report = check_corpus(corpus, 100_000).map_err(|e| e.to_string())?;
        if let Some((name, w)) = report.first_counterexample() {
            return Err(format!("{name} fails at n = {}: {}", w.input, w.detail));
        }
        let checked: u64 = report.identities.iter().map(|o| o.passed).sum();
        Ok(format!(
            "{} claims, {} guarded evaluations, zero counterexamples",
            report.identities.len(),
            checked
        ))
    });
}

#[test]
fn criterion_05_partitions() {
    criterion(5, 30.0, "block families tile their domains", || {
        for k in 1..=10u32 {
            let spec = PartitionSpec::first_kind(k).map_err(|e| e.to_string())?;
            let report = verify_partition(&spec, 100_000).map_err(|e| e.to_string())?;
            check!(report.is_pass(), "first kind k = {k} fails: {:?}", report.first_counterexample());
        }
        for k in 3..=8u32 {
            let spec = PartitionSpec::second_kind(k).map_err(|e| e.to_string())?;
            let report = verify_partition(&spec, 100_000).map_err(|e| e.to_string())?;
            check!(report.is_pass(), "second kind k = {k} fails: {:?}", report.first_counterexample());
        }
        let four = PartitionSpec::custom(vec![(1, 0), (2, 0), (2, 2), (3, 1)], 1);
        let report = verify_partition(&four, 100_000).map_err(|e| e.to_string())?;
        check!(report.is_pass(), "four-block split fails: {:?}", report.first_counterexample());

        let prefixes: &[(u32, i64, [i128; 10])] = &[
            (1, 0, [2, 5, 7, 10, 13, 15, 18, 20, 23, 26]),
            (2, 0, [3, 8, 11, 16, 21, 24, 29, 32, 37, 42]),
            (2, 2, [1, 6, 9, 14, 19, 22, 27, 30, 35, 40]),
            (3, 1, [4, 12, 17, 25, 33, 38, 46, 51, 59, 67]),
            (2, -2, [5, 10, 13, 18, 23, 26, 31, 34, 39, 44]),
            (2, -3, [6, 11, 14, 19, 24, 27, 32, 35, 40, 45]),
            (2, -4, [7, 12, 15, 20, 25, 28, 33, 36, 41, 46]),
            (3, -3, [8, 16, 21, 29, 37, 42, 50, 55, 63, 71]),
            (3, -4, [9, 17, 22, 30, 38, 43, 51, 56, 64, 72]),
        ];
        for &(i, j, want) in prefixes {
            let block = GbsBlock::new(i, j);
            for (n, &w) in (1i128..).zip(want.iter()) {
                let got = block.eval(n).map_err(|e| e.to_string())?;
                check!(got == w, "R[{i},{j}] term {n} is {got}, expected {w}");
            }
        }
        Ok("first kind k <= 10, second kind k <= 8, the four-block split, and nine set prefixes".into())
    });
}

#[test]
fn criterion_06_permutations() {
    criterion(6, 30.0, "piecewise permutation catalog", || {
        let first20: &[(&str, [i128; 20])] = &[
            ("f", [2, 1, 5, 7, 3, 10, 4, 13, 15, 6, 18, 20, 8, 23, 9, 26, 28, 11, 31, 12]),
            ("g", [2, 1, 4, 3, 6, 5, 9, 12, 7, 14, 17, 8, 19, 10, 22, 25, 11, 27, 13, 30]),
            ("h", [2, 3, 4, 1, 8, 5, 11, 12, 7, 16, 17, 6, 21, 10, 24, 25, 9, 29, 13, 32]),
            ("h2", [3, 4, 1, 2, 12, 8, 17, 6, 11, 25, 9, 5, 33, 16, 38, 14, 7, 46, 21, 51]),
            ("h3", [4, 1, 2, 3, 6, 12, 9, 5, 17, 14, 7, 8, 19, 25, 22, 10, 11, 27, 33, 30]),
            ("i", [2, 3, 1, 8, 11, 5, 16, 4, 7, 24, 6, 21, 32, 10, 37, 9, 29, 45, 13, 50]),
            ("i2", [3, 1, 2, 4, 6, 11, 9, 8, 16, 14, 5, 12, 19, 24, 22, 7, 17, 27, 32, 30]),
            ("i3", [1, 2, 3, 8, 5, 6, 7, 4, 9, 10, 11, 21, 13, 14, 15, 16, 29, 18, 19, 20]),
            ("i4", [2, 3, 1, 4, 11, 5, 16, 8, 7, 24, 6, 12, 32, 10, 37, 9, 17, 45, 13, 50]),
            ("i5", [3, 1, 2, 8, 6, 11, 9, 4, 16, 14, 5, 21, 19, 24, 22, 7, 29, 27, 32, 30]),
            ("j", [1, 2, 5, 3, 7, 4, 10, 13, 6, 15, 18, 8, 20, 9, 23, 26, 11, 28, 12, 31]),
            ("jinv", [1, 2, 4, 6, 3, 9, 5, 12, 14, 7, 17, 19, 8, 22, 10, 25, 27, 11, 30, 13]),
        ];
        for &(name, want) in first20 {
            let p = builtin(name).ok_or_else(|| format!("missing builtin {name}"))?;
            for (n, &w) in (1i128..).zip(want.iter()) {
                let got = p.eval(n).map_err(|e| e.to_string())?;
                check!(got == w, "{name}({n}) = {got}, expected {w}");
            }
        }

        for (name, want) in [("f", 2u32), ("g", 2), ("h", 4), ("i", 6)] {
            let p = builtin(name).unwrap();
            let got = detect_order(p, 10_000, 8).map_err(|e| e.to_string())?;
            check!(
                got == OrderOutcome::DividesInto(want),
                "{name}: order check gave {got:?}, expected {want}"
            );
        }

        let f = builtin("f").unwrap();
        let j = builtin("j").unwrap();
        let jinv = builtin("jinv").unwrap();
        for n in 1..=100_000i128 {
            let lhs = compose_eval(f, j, n).map_err(|e| e.to_string())?;
            let rhs = compose_eval(jinv, f, n).map_err(|e| e.to_string())?;
            check!(lhs == rhs, "conjugation mismatch at n = {n}: {lhs} vs {rhs}");
        }

        let mut x = 3i128;
        for n in 1..=80u32 {
            x = j.eval(x).map_err(|e| e.to_string())?;
            let want = fib(n + 3).map_err(|e| e.to_string())? + 2;
            check!(x == want, "orbit term {n} is {x}, expected {want}");
        }
        Ok("twelve 20-term tables, orders 2/2/4/6, conjugation on 1..100000, 80 orbit terms".into())
    });
}

#[test]
fn criterion_07_designs() {
    criterion(7, 10.0, "orthogonal arrays and difference matrices", || {
        let grid = parse_int_grid(OA_9X4).map_err(|e| e.to_string())?;
        let oa = OrthogonalArray::from_grid(3, &grid).map_err(|e| e.to_string())?;
        let chk = verify_oa(&oa, 2).map_err(|e| e.to_string())?;
        check!(chk.is_pass() && chk.lambda == 1, "stored 9x4 array fails strength 2");

        for p in [2u32, 3, 5, 7] {
            let dm = field_dm(p, p.min(4)).map_err(|e| e.to_string())?;
            check!(
                verify_difference_matrix(&dm).map_err(|e| e.to_string())?.is_pass(),
                "multiplication table modulo {p} rejected"
            );
            let oa = dm_to_oa(&dm);
            let chk = verify_oa(&oa, 2).map_err(|e| e.to_string())?;
            check!(chk.is_pass(), "development modulo {p} fails strength 2");
        }

        let mut rng = StdRng::seed_from_u64(0xacce97);
        for trial in 0..100 {
            let dm = common::random_passing_dm(&mut rng);
            check!(
                verify_difference_matrix(&dm).map_err(|e| e.to_string())?.is_pass(),
                "trial {trial}: randomized matrix rejected"
            );
            let chk = verify_oa(&dm_to_oa(&dm), 2).map_err(|e| e.to_string())?;
            check!(chk.is_pass(), "trial {trial}: development fails strength 2");
        }
        Ok("stored array, four prime moduli, 100 randomized develop-and-verify trials".into())
    });
}

#[test]
fn criterion_08_coverage_evidence() {
    let (m, gen_secs) = big();
    criterion(8, 120.0, "coverage at the desk-scale column budget", || {
        check!(
            *gen_secs < 120.0,
            "generating {MATRIX_ROWS} rows x {BIG_COLS} columns took {gen_secs:.1}s"
        );
        let large = coverage_report(m);
        let smaller = coverage_report(small());

        for row in large.rows.iter().skip(1) {
            check!(row.distinct, "row {} repeats a value", row.row);
            check!(row.covered_prefix > 0, "row {} has an empty prefix", row.row);
        }
        let mut min_radius = i64::MAX;
        for (l, s) in large.pairs.iter().zip(&smaller.pairs) {
            check!(l.distinct, "pair ({}, {}) repeats a difference", l.row_low, l.row_high);
            if l.row_low >= 1 {
                check!(
                    l.radius > 0,
                    "pair ({}, {}) has no symmetric coverage",
                    l.row_low,
                    l.row_high
                );
                check!(
                    l.radius > s.radius,
                    "pair ({}, {}) radius did not grow: {} vs {}",
                    l.row_low,
                    l.row_high,
                    s.radius,
                    l.radius
                );
                min_radius = min_radius.min(l.radius);
            }
        }
        let min_prefix = large.rows[1..]
            .iter()
            .map(|r| r.covered_prefix)
            .min()
            .unwrap();
        Ok(format!(
            "generated in {gen_secs:.1}s; rows and pairs distinct; min row prefix {min_prefix}, min pair radius {min_radius}, both above the {SMALL_COLS}-column run"
        ))
    });
}

#[test]
fn criterion_09_slope_clusters() {
    let (m, _) = big();
    criterion(9, 60.0, "slope clustering against the reference table", || {
        let window = 10_000;

        let slopes2 = extract_slopes(m.row(2), window).map_err(|e| e.to_string())?;
        let two = kmeans(&slopes2, 2, 4, 2026).map_err(|e| e.to_string())?;
        let want2 = [0.6180338, 1.6180343];
        for (got, want) in two.centers.iter().zip(want2) {
            check!(
                (got - want).abs() < 1e-4,
                "row 2 center {got:.7} is off the reference {want}"
            );
        }

        let slopes3 = extract_slopes(m.row(3), window).map_err(|e| e.to_string())?;
        let three = kmeans(&slopes3, 3, 4, 2026).map_err(|e| e.to_string())?;
        let want3 = [0.6157, 1.5377, 1.9331];
        for (got, want) in three.centers.iter().zip(want3) {
            check!(
                (got - want).abs() < 5e-3,
                "row 3 center {got:.7} is off the reference {want}"
            );
        }

        // soft comparison: counts chosen by silhouette, against the
        // reference counts observed at a tenfold column budget
        let reference = [2usize, 3, 5, 9, 12];
        let mut chosen = Vec::new();
        for (row, want) in (2..=6).zip(reference) {
            let report =
                analyze_row(row, m.row(row), window, 13, 2026).map_err(|e| e.to_string())?;
            let mark = if report.chosen_k == want { "=" } else { "!" };
            chosen.push(format!("row {row}: {}{mark}{want}", report.chosen_k));
        }
        Ok(format!(
            "row-2 centers within 1e-4, row-3 within 5e-3; counts (ours vs reference) {}",
            chosen.join(", ")
        ))
    });
}

#[test]
fn criterion_10_sequence_crosschecks() {
    criterion(10, 5.0, "offline catalog comparison", || {
        let manifest = builtin_manifest().map_err(|e| e.to_string())?;
        let cache = BfileCache::builtin_only();
        let reports = crosscheck_all(&manifest, &cache, 50).map_err(|e| e.to_string())?;
        check!(reports.len() == 30, "expected 30 cases, ran {}", reports.len());
        for r in &reports {
            check!(r.is_pass(), "{} diverges: {:?}", r.id, r.outcome);
            check!(r.terms_compared >= 50, "{} compared only {} terms", r.id, r.terms_compared);
        }
        Ok("30 catalog cases, each matching on at least 50 terms".into())
    });
}
