mod common;

use common::random_passing_dm;
use fibpart::golden::{parse_int_grid, OA_9X4};
use fibpart::mex::MexMatrix;
use fibpart::oa::{
    dm_to_oa, field_dm, integer_prefix_check, verify_difference_matrix, verify_oa,
    DifferenceMatrix, OaError, OrthogonalArray,
};
use rand::rngs::StdRng;
use rand::SeedableRng;

#[test]
fn the_stored_nine_run_array_is_a_strength_two_design() {
    let grid = parse_int_grid(OA_9X4).unwrap();
    let oa = OrthogonalArray::from_grid(3, &grid).unwrap();
    assert_eq!((oa.runs(), oa.factors()), (9, 4));
    for strength in [1, 2] {
        let check = verify_oa(&oa, strength).unwrap();
        assert!(check.is_pass(), "strength {strength}: {:?}", check.violations);
    }
}

#[test]
fn multiplication_tables_over_prime_moduli_are_difference_matrices() {
    for p in [2u32, 3, 5, 7] {
        for rows in 2..=p.min(4) {
            let dm = field_dm(p, rows).unwrap();
            let check = verify_difference_matrix(&dm).unwrap();
            assert!(check.is_pass(), "p = {p}, rows = {rows}");
            let oa = dm_to_oa(&dm);
            assert_eq!(oa.runs() as u32, p * p);
            assert!(verify_oa(&oa, 2).unwrap().is_pass(), "p = {p}, rows = {rows}");
        }
    }
}

#[test]
fn randomized_valid_difference_matrices_always_develop_into_arrays() {
    let mut rng = StdRng::seed_from_u64(0x5eed_d1f5);
    for trial in 0..60 {
        let dm = random_passing_dm(&mut rng);
        let dm_check = verify_difference_matrix(&dm).unwrap();
        assert!(dm_check.is_pass(), "trial {trial}: {:?}", dm_check.violations);
        let oa = dm_to_oa(&dm);
        let oa_check = verify_oa(&oa, 2).unwrap();
        assert!(oa_check.is_pass(), "trial {trial}: {:?}", oa_check.violations);
    }
}

#[test]
fn corrupting_one_entry_is_always_caught() {
    let mut rng = StdRng::seed_from_u64(7);
    for trial in 0..20 {
        let dm = random_passing_dm(&mut rng);
        if dm.row_count() < 2 {
            continue;
        }
        let mut rows = dm.rows().to_vec();
        let old = rows[1][0];
        rows[1][0] = (old + 1) % dm.modulus();
        let broken = DifferenceMatrix::new(dm.modulus(), rows).unwrap();
        let check = verify_difference_matrix(&broken).unwrap();
        assert!(!check.is_pass(), "trial {trial} went undetected");
        assert!(!check.violations.is_empty());
    }
}

#[test]
fn greedy_matrix_rows_are_not_cyclic_difference_rows() {
    let m = MexMatrix::generate(4, 40);
    // entries exceed any modulus small enough for the row count
    let err = DifferenceMatrix::from_grid(5, &m.as_rows()[1..3].to_vec()).unwrap_err();
    assert!(matches!(err, OaError::EntryRange { .. }));
}

#[test]
fn integer_prefix_mode_reports_distinctness_and_radius_only() {
    let m = MexMatrix::generate(4, 3_000);
    let checks = integer_prefix_check(&m.as_rows()[1..]);
    assert_eq!(checks.len(), 3);
    for c in &checks {
        assert!(c.distinct, "rows ({}, {})", c.row_a, c.row_b);
        assert!(c.first_repeat.is_none());
        assert!(c.radius > 0, "rows ({}, {}): {}", c.row_a, c.row_b, c.radius);
    }
}
