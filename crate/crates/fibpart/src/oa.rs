//! Orthogonal arrays and difference matrices over cyclic groups.
//!
//! A difference matrix with `m` rows and `lambda * n` columns over `Z_n`
//! has the property that any two rows, subtracted columnwise, cover every
//! residue exactly `lambda` times.  Developing such a matrix over the
//! group yields an orthogonal array of strength 2.  The checks here also
//! run in a prefix mode against integer rows (such as rows of the greedy
//! mex matrix), where they establish distinctness of differences and a
//! coverage radius on the finite prefix only, never a claim about the
//! infinite object.

use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OaError {
    #[error("array must not be empty")]
    Empty,
    #[error("row {row} has {found} entries, expected {want}")]
    Ragged { row: usize, want: usize, found: usize },
    #[error("entry {value} at ({row}, {col}) is outside 0..{bound}")]
    EntryRange {
        row: usize,
        col: usize,
        value: i64,
        bound: u32,
    },
    #[error("{runs} runs is not a multiple of {levels}^{strength}")]
    RunCount { runs: usize, levels: u32, strength: u32 },
    #[error("{cols} columns is not a multiple of the modulus {modulus}")]
    ColumnCount { cols: usize, modulus: u32 },
    #[error("strength {0} is outside the supported range 1..=3")]
    Strength(u32),
    #[error("strength {strength} exceeds the {factors} factors")]
    TooFewFactors { strength: u32, factors: usize },
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("requested {want} rows but the field has {have} elements")]
    TooManyRows { want: u32, have: u32 },
    #[error("modulus must be at least 1")]
    ZeroModulus,
}

fn check_grid(rows: &[Vec<u32>], bound: u32) -> Result<(), OaError> {
    let Some(first) = rows.first() else {
        return Err(OaError::Empty);
    };
    if first.is_empty() {
        return Err(OaError::Empty);
    }
    for (r, row) in rows.iter().enumerate() {
        if row.len() != first.len() {
            return Err(OaError::Ragged {
                row: r,
                want: first.len(),
                found: row.len(),
            });
        }
        for (c, &v) in row.iter().enumerate() {
            if v >= bound {
                return Err(OaError::EntryRange {
                    row: r,
                    col: c,
                    value: v as i64,
                    bound,
                });
            }
        }
    }
    Ok(())
}

/// Runs-by-factors array with entries in `0..levels`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrthogonalArray {
    levels: u32,
    runs: Vec<Vec<u32>>,
}

impl OrthogonalArray {
    pub fn new(levels: u32, runs: Vec<Vec<u32>>) -> Result<Self, OaError> {
        if levels == 0 {
            return Err(OaError::ZeroModulus);
        }
        check_grid(&runs, levels)?;
        Ok(OrthogonalArray { levels, runs })
    }

    /// Converts a signed grid (as parsed from text) into an array.
    pub fn from_grid(levels: u32, grid: &[Vec<i64>]) -> Result<Self, OaError> {
        let mut runs = Vec::with_capacity(grid.len());
        for (r, row) in grid.iter().enumerate() {
            let mut out = Vec::with_capacity(row.len());
            for (c, &v) in row.iter().enumerate() {
                let ok = u32::try_from(v).ok().filter(|&u| u < levels);
                match ok {
                    Some(u) => out.push(u),
                    None => {
                        return Err(OaError::EntryRange {
                            row: r,
                            col: c,
                            value: v,
                            bound: levels,
                        })
                    }
                }
            }
            runs.push(out);
        }
        OrthogonalArray::new(levels, runs)
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn runs(&self) -> usize {
        self.runs.len()
    }

    pub fn factors(&self) -> usize {
        self.runs.first().map_or(0, Vec::len)
    }

    pub fn run(&self, r: usize) -> &[u32] {
        &self.runs[r]
    }
}

/// A column tuple that does not appear the required number of times.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OaViolation {
    pub columns: Vec<usize>,
    pub tuple: Vec<u32>,
    pub count: usize,
    pub expected: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct OaCheck {
    pub runs: usize,
    pub factors: usize,
    pub levels: u32,
    pub strength: u32,
    pub lambda: usize,
    /// Capped at [`OaCheck::VIOLATION_CAP`] entries.
    pub violations: Vec<OaViolation>,
    pub violation_count: u64,
}

impl OaCheck {
    pub const VIOLATION_CAP: usize = 20;

    pub fn is_pass(&self) -> bool {
        self.violation_count == 0
    }
}

fn column_subsets(factors: usize, strength: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(strength);
    fn recurse(start: usize, factors: usize, left: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(current.clone());
            return;
        }
        for c in start..=factors - left {
            current.push(c);
            recurse(c + 1, factors, left - 1, current, out);
            current.pop();
        }
    }
    recurse(0, factors, strength, &mut current, &mut out);
    out
}

/// Checks that every tuple over every `strength`-subset of factors appears
/// equally often.
pub fn verify_oa(oa: &OrthogonalArray, strength: u32) -> Result<OaCheck, OaError> {
    if !(1..=3).contains(&strength) {
        return Err(OaError::Strength(strength));
    }
    let factors = oa.factors();
    if (strength as usize) > factors {
        return Err(OaError::TooFewFactors { strength, factors });
    }
    let tuple_count = (oa.levels as usize).pow(strength);
    if oa.runs() % tuple_count != 0 {
        return Err(OaError::RunCount {
            runs: oa.runs(),
            levels: oa.levels,
            strength,
        });
    }
    let lambda = oa.runs() / tuple_count;
    let mut violations = Vec::new();
    let mut violation_count = 0u64;
    for columns in column_subsets(factors, strength as usize) {
        let mut counts: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
        for run in &oa.runs {
            let tuple: Vec<u32> = columns.iter().map(|&c| run[c]).collect();
            *counts.entry(tuple).or_default() += 1;
        }
        let mut flag = |tuple: Vec<u32>, count: usize| {
            violation_count += 1;
            if violations.len() < OaCheck::VIOLATION_CAP {
                violations.push(OaViolation {
                    columns: columns.clone(),
                    tuple,
                    count,
                    expected: lambda,
                });
            }
        };
        if counts.len() < tuple_count {
            let mut tuple = vec![0u32; strength as usize];
            loop {
                if !counts.contains_key(&tuple) {
                    flag(tuple.clone(), 0);
                }
                let mut pos = strength as usize;
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    tuple[pos] += 1;
                    if tuple[pos] < oa.levels {
                        break;
                    }
                    tuple[pos] = 0;
                }
                if tuple.iter().all(|&v| v == 0) {
                    break;
                }
            }
        }
        for (tuple, count) in counts {
            if count != lambda {
                flag(tuple, count);
            }
        }
    }
    Ok(OaCheck {
        runs: oa.runs(),
        factors,
        levels: oa.levels,
        strength,
        lambda,
        violations,
        violation_count,
    })
}

/// Rows-by-columns matrix over `Z_modulus`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DifferenceMatrix {
    modulus: u32,
    rows: Vec<Vec<u32>>,
}

impl DifferenceMatrix {
    pub fn new(modulus: u32, rows: Vec<Vec<u32>>) -> Result<Self, OaError> {
        if modulus == 0 {
            return Err(OaError::ZeroModulus);
        }
        check_grid(&rows, modulus)?;
        Ok(DifferenceMatrix { modulus, rows })
    }

    pub fn from_grid(modulus: u32, grid: &[Vec<i64>]) -> Result<Self, OaError> {
        let oa = OrthogonalArray::from_grid(modulus, grid)?;
        Ok(DifferenceMatrix {
            modulus,
            rows: oa.runs,
        })
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn col_count(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }
}

/// A residue whose multiplicity among the differences of one row pair is
/// off.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DmViolation {
    pub row_a: usize,
    pub row_b: usize,
    pub residue: u32,
    pub count: usize,
    pub expected: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct DmCheck {
    pub modulus: u32,
    pub rows: usize,
    pub cols: usize,
    pub lambda: usize,
    pub violations: Vec<DmViolation>,
    pub violation_count: u64,
}

impl DmCheck {
    pub const VIOLATION_CAP: usize = 20;

    pub fn is_pass(&self) -> bool {
        self.violation_count == 0
    }
}

/// Checks the defining property: for each pair of distinct rows the
/// columnwise differences cover each residue `cols / modulus` times.
pub fn verify_difference_matrix(dm: &DifferenceMatrix) -> Result<DmCheck, OaError> {
    let n = dm.modulus;
    let cols = dm.col_count();
    if cols % n as usize != 0 {
        return Err(OaError::ColumnCount { cols, modulus: n });
    }
    let lambda = cols / n as usize;
    let mut violations = Vec::new();
    let mut violation_count = 0u64;
    for a in 0..dm.row_count() {
        for b in a + 1..dm.row_count() {
            let mut counts = vec![0usize; n as usize];
            for j in 0..cols {
                let d = (dm.rows[a][j] + n - dm.rows[b][j]) % n;
                counts[d as usize] += 1;
            }
            for (residue, &count) in counts.iter().enumerate() {
                if count != lambda {
                    violation_count += 1;
                    if violations.len() < DmCheck::VIOLATION_CAP {
                        violations.push(DmViolation {
                            row_a: a,
                            row_b: b,
                            residue: residue as u32,
                            count,
                            expected: lambda,
                        });
                    }
                }
            }
        }
    }
    Ok(DmCheck {
        modulus: n,
        rows: dm.row_count(),
        cols,
        lambda,
        violations,
        violation_count,
    })
}

/// Develops a difference matrix over its group: one array run per
/// (column, group element) pair, columns outermost, with the matrix rows
/// becoming the factors.
pub fn dm_to_oa(dm: &DifferenceMatrix) -> OrthogonalArray {
    let n = dm.modulus;
    let mut runs = Vec::with_capacity(dm.col_count() * n as usize);
    for j in 0..dm.col_count() {
        for g in 0..n {
            runs.push(
                dm.rows()
                    .iter()
                    .map(|row| (row[j] + g) % n)
                    .collect::<Vec<u32>>(),
            );
        }
    }
    OrthogonalArray { levels: n, runs }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Multiplication-table difference matrix over a prime field: entry
/// `(i, j)` is `i * j mod p`, with `rows` rows and `p` columns.
pub fn field_dm(p: u32, rows: u32) -> Result<DifferenceMatrix, OaError> {
    if !is_prime(p) {
        return Err(OaError::NotPrime(p));
    }
    if rows > p {
        return Err(OaError::TooManyRows { want: rows, have: p });
    }
    let grid = (0..rows)
        .map(|i| (0..p).map(|j| (i as u64 * j as u64 % p as u64) as u32).collect())
        .collect();
    Ok(DifferenceMatrix { modulus: p, rows: grid })
}

/// Prefix-mode result for one pair of integer rows: all differences
/// distinct, plus the symmetric window of integers the differences cover.
/// Says nothing beyond the columns supplied.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntegerPairCheck {
    pub row_a: usize,
    pub row_b: usize,
    pub distinct: bool,
    pub radius: i64,
    /// Two columns with the same difference, if any.
    pub first_repeat: Option<(usize, usize, i64)>,
}

/// Treats integer rows as a would-be difference matrix over the integers
/// and checks each pair on the supplied prefix.
pub fn integer_prefix_check(rows: &[Vec<i64>]) -> Vec<IntegerPairCheck> {
    let mut out = Vec::new();
    for a in 0..rows.len() {
        for b in a + 1..rows.len() {
            let cols = rows[a].len().min(rows[b].len());
            let mut diffs: Vec<(i64, usize)> =
                (0..cols).map(|j| (rows[b][j] - rows[a][j], j)).collect();
            diffs.sort_unstable();
            let mut first_repeat = None;
            for w in diffs.windows(2) {
                if w[0].0 == w[1].0 {
                    first_repeat = Some((w[0].1, w[1].1, w[0].0));
                    break;
                }
            }
            let values: Vec<i64> = diffs.iter().map(|&(d, _)| d).collect();
            let mut radius = -1;
            if values.binary_search(&0).is_ok() {
                radius = 0;
                while values.binary_search(&(radius + 1)).is_ok()
                    && values.binary_search(&(-(radius + 1))).is_ok()
                {
                    radius += 1;
                }
            }
            out.push(IntegerPairCheck {
                row_a: a,
                row_b: b,
                distinct: first_repeat.is_none(),
                radius,
                first_repeat,
            });
        }
    }
    out
}
