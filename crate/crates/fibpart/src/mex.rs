//! The greedy mex matrix.
//!
//! Entry `q[i][j]` is the least non-negative integer not of the form
//! `q[i][k] + q[l][j] - q[l][k]` with `l < i`, `k < j`.  Row 0 is all
//! zeros, row 1 is the identity, and row 2 turns out to be the exchange
//! permutation of the two Wythoff sequences.  Any set of rows forms a
//! difference-matrix-like prefix: within each row pair the columnwise
//! differences are pairwise distinct.
//!
//! The generator keeps, for every earlier row `l`, the set
//! `{q[i][k] - q[l][k] : k < j}` in an offset bitset, so a column is
//! filled by OR-ing one 64-bit window per earlier row and scanning for
//! the first zero bit.

use crate::report::{IdentityOutcome, IdentityReport};
use crate::wythoff::{is_lower_member, lower_wythoff, ArithError};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeSet;
use std::io::{Read, Write};
use std::path::Path;
use thiserror::Error;

/// A set of `i64` values backed by a bit vector with a movable origin.
#[derive(Debug, Clone, Default)]
struct OffsetBitset {
    words: Vec<u64>,
    /// Value represented by bit 0 of `words[0]`.
    base: i64,
}

impl OffsetBitset {
    fn new() -> Self {
        OffsetBitset::default()
    }

    fn grow_front(&mut self, need_words: usize) {
        let add = need_words.max(self.words.len()).max(4);
        let mut words = vec![0u64; add + self.words.len()];
        words[add..].copy_from_slice(&self.words);
        self.words = words;
        self.base -= add as i64 * 64;
    }

    fn insert(&mut self, v: i64) {
        if self.words.is_empty() {
            self.base = v.div_euclid(64) * 64;
            self.words.push(0);
        }
        let mut off = v - self.base;
        if off < 0 {
            self.grow_front(((-off) as usize).div_ceil(64));
            off = v - self.base;
        }
        let idx = (off / 64) as usize;
        if idx >= self.words.len() {
            self.words.resize(idx + 1, 0);
        }
        self.words[idx] |= 1 << (off % 64);
    }

    #[cfg(test)]
    fn contains(&self, v: i64) -> bool {
        let off = v - self.base;
        if off < 0 {
            return false;
        }
        let idx = (off / 64) as usize;
        idx < self.words.len() && self.words[idx] & (1 << (off % 64)) != 0
    }

    fn word_at(&self, w: i64) -> u64 {
        if w < 0 || w >= self.words.len() as i64 {
            0
        } else {
            self.words[w as usize]
        }
    }

    /// The 64 bits for values `start..start + 64`, bit `t` = membership of
    /// `start + t`.
    fn window(&self, start: i64) -> u64 {
        let off = start - self.base;
        let w = off.div_euclid(64);
        let r = off.rem_euclid(64) as u32;
        let lo = self.word_at(w);
        if r == 0 {
            lo
        } else {
            (lo >> r) | (self.word_at(w + 1) << (64 - r))
        }
    }
}

/// The matrix of greedily chosen entries, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MexMatrix {
    rows: Vec<Vec<i64>>,
}

impl MexMatrix {
    pub fn generate(rows: usize, cols: usize) -> MexMatrix {
        let mut m = MexMatrix { rows: Vec::new() };
        m.extend_to(rows, cols);
        m
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.rows[i][j]
    }

    pub fn as_rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    /// Grows the matrix in place to at least `rows x cols`.  Existing
    /// entries never change: the greedy rule is deterministic and depends
    /// only on entries above and to the left.
    pub fn extend_to(&mut self, rows: usize, cols: usize) {
        let rows = rows.max(self.rows.len());
        let cols = cols.max(self.cols());
        for i in 0..rows {
            if i == self.rows.len() {
                self.rows.push(Vec::with_capacity(cols));
            }
            let (prev, tail) = self.rows.split_at_mut(i);
            let row = &mut tail[0];
            let mut diffs: Vec<OffsetBitset> = (0..i).map(|_| OffsetBitset::new()).collect();
            for (l, d) in diffs.iter_mut().enumerate() {
                for k in 0..row.len() {
                    d.insert(row[k] - prev[l][k]);
                }
            }
            for j in row.len()..cols {
                let mut v0 = 0i64;
                let q = loop {
                    let mut occ = 0u64;
                    for l in 0..i {
                        occ |= diffs[l].window(v0 - prev[l][j]);
                        if occ == u64::MAX {
                            break;
                        }
                    }
                    if occ != u64::MAX {
                        break v0 + (!occ).trailing_zeros() as i64;
                    }
                    v0 += 64;
                };
                row.push(q);
                for l in 0..i {
                    diffs[l].insert(q - prev[l][j]);
                }
            }
        }
    }
}

/// Least non-negative integer not in the set.
pub fn mex_of_set(set: &BTreeSet<i64>) -> i64 {
    let mut v = 0;
    for &x in set.range(0..) {
        if x == v {
            v += 1;
        } else {
            break;
        }
    }
    v
}

/// The set `{q[i][k] + q[l][j] - q[l][k] : l < i, k < j}` computed by the
/// literal triple loop.  Reference implementation; quadratic per entry.
pub fn avoided_set(m: &MexMatrix, i: usize, j: usize) -> BTreeSet<i64> {
    let mut s = BTreeSet::new();
    for l in 0..i {
        for k in 0..j {
            s.insert(m.get(i, k) + m.get(l, j) - m.get(l, k));
        }
    }
    s
}

/// Generates the matrix straight from the defining rule, without the
/// bitset machinery.  Only suitable for small sizes.
pub fn generate_reference(rows: usize, cols: usize) -> MexMatrix {
    let mut m = MexMatrix {
        rows: vec![Vec::with_capacity(cols); rows],
    };
    for j in 0..cols {
        for i in 0..rows {
            let q = mex_of_set(&avoided_set(&m, i, j));
            m.rows[i].push(q);
        }
    }
    m
}

/// Closed form for row 2: `0` at `j = 0`, `a(j) + 1` on the lower Wythoff
/// sequence, `a(j) - j` on the upper.
pub fn row2_closed_form(j: i64) -> Result<i64, ArithError> {
    if j == 0 {
        return Ok(0);
    }
    let j = j as i128;
    let a = lower_wythoff(j)?;
    let v = if is_lower_member(j)? { a + 1 } else { a - j };
    Ok(v as i64)
}

/// The lexicographically least sequence of distinct positive integers whose
/// n-th term minus n is always a new difference.  Independent of the matrix
/// machinery; term `n` equals row 2's entry at `n` plus one.
pub fn greedy_distinct_difference(len: usize) -> Vec<i64> {
    let mut used = BTreeSet::new();
    let mut diffs = BTreeSet::new();
    let mut out = Vec::with_capacity(len);
    for n in 1..=len as i64 {
        let mut v = 1;
        while used.contains(&v) || diffs.contains(&(v - n)) {
            v += 1;
        }
        used.insert(v);
        diffs.insert(v - n);
        out.push(v);
    }
    out
}

/// Largest `c >= 0` such that every integer in `1..=c` occurs in `sorted`
/// (which must be ascending).
fn covered_prefix_of_sorted(sorted: &[i64]) -> i64 {
    let mut c = 0;
    for &v in sorted {
        match v.cmp(&(c + 1)) {
            std::cmp::Ordering::Less => {}
            std::cmp::Ordering::Equal => c += 1,
            std::cmp::Ordering::Greater => break,
        }
    }
    c
}

/// Largest `r >= 0` such that every integer with absolute value `<= r`
/// occurs in `sorted`, or `-1` if 0 itself is missing.
fn symmetric_radius_of_sorted(sorted: &[i64]) -> i64 {
    if sorted.binary_search(&0).is_err() {
        return -1;
    }
    let mut r = 0;
    while sorted.binary_search(&(r + 1)).is_ok() && sorted.binary_search(&(-(r + 1))).is_ok() {
        r += 1;
    }
    r
}

/// What a scan of row 2 established.
#[derive(Debug, Clone, Serialize)]
pub struct Row2Report {
    pub identities: IdentityReport,
    /// Every integer of absolute value up to this occurs as `q[j] - j`.
    pub diff_radius: i64,
    /// Every positive integer up to this occurs among `q[1..]`.
    pub covered_prefix: i64,
}

impl Row2Report {
    pub fn is_pass(&self) -> bool {
        self.identities.is_pass()
    }
}

/// Checks row 2 of the matrix against its closed form, self-inverseness and
/// the distinct-difference property.
pub fn verify_row2_structure(row: &[i64]) -> Result<Row2Report, ArithError> {
    let cols = row.len() as i64;
    let mut report = IdentityReport::new(cols as i128);

    let mut closed = IdentityOutcome::new("row 2 matches the Wythoff closed form");
    for (j, &q) in row.iter().enumerate() {
        let want = row2_closed_form(j as i64)?;
        if q == want {
            closed.record_pass();
        } else {
            closed.record_failure(j as i128, format!("q = {q}, closed form gives {want}"));
        }
    }
    report.push(closed);

    let mut involution = IdentityOutcome::new("row 2 is a self-inverse permutation");
    for (j, &q) in row.iter().enumerate() {
        if (0..cols).contains(&q) {
            if row[q as usize] == j as i64 {
                involution.record_pass();
            } else {
                involution.record_failure(
                    j as i128,
                    format!("q[{j}] = {q} but q[{q}] = {}", row[q as usize]),
                );
            }
        }
    }
    report.push(involution);

    let mut distinct = IdentityOutcome::new("row 2 differences j -> q[j] - j are distinct");
    let mut diffs: Vec<(i64, i64)> = row
        .iter()
        .enumerate()
        .map(|(j, &q)| (q - j as i64, j as i64))
        .collect();
    diffs.sort_unstable();
    let mut clean = true;
    for w in diffs.windows(2) {
        if w[0].0 == w[1].0 {
            distinct.record_failure(
                w[0].1 as i128,
                format!("difference {} repeats at j = {} and j = {}", w[0].0, w[0].1, w[1].1),
            );
            clean = false;
        }
    }
    if clean {
        distinct.record_pass();
    }
    report.push(distinct);

    let diff_values: Vec<i64> = diffs.iter().map(|&(d, _)| d).collect();
    let mut values: Vec<i64> = row[1.min(row.len())..].to_vec();
    values.sort_unstable();

    Ok(Row2Report {
        identities: report,
        diff_radius: symmetric_radius_of_sorted(&diff_values),
        covered_prefix: covered_prefix_of_sorted(&values),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RowCoverage {
    pub row: usize,
    pub distinct: bool,
    /// Every positive integer up to this occurs in the row.
    pub covered_prefix: i64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairCoverage {
    pub row_low: usize,
    pub row_high: usize,
    /// No columnwise difference repeats.
    pub distinct: bool,
    /// Every integer of absolute value up to this occurs as a difference.
    pub radius: i64,
}

/// Coverage accounting for all rows and row pairs of a matrix prefix.
#[derive(Debug, Clone, Serialize)]
pub struct CoverageReport {
    pub cols: usize,
    pub rows: Vec<RowCoverage>,
    pub pairs: Vec<PairCoverage>,
}

pub fn coverage_report(m: &MexMatrix) -> CoverageReport {
    let cols = m.cols();
    let mut rows = Vec::new();
    for i in 0..m.rows() {
        let mut v = m.row(i).to_vec();
        v.sort_unstable();
        let distinct = v.windows(2).all(|w| w[0] != w[1]);
        rows.push(RowCoverage {
            row: i,
            distinct,
            covered_prefix: covered_prefix_of_sorted(&v),
        });
    }
    let mut pairs = Vec::new();
    for i in 1..m.rows() {
        for l in 0..i {
            let mut d: Vec<i64> = (0..cols).map(|j| m.get(i, j) - m.get(l, j)).collect();
            d.sort_unstable();
            let distinct = d.windows(2).all(|w| w[0] != w[1]);
            pairs.push(PairCoverage {
                row_low: l,
                row_high: i,
                distinct,
                radius: symmetric_radius_of_sorted(&d),
            });
        }
    }
    CoverageReport { cols, rows, pairs }
}

#[derive(Debug, Error)]
pub enum PersistError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("bad json in {path}: {reason}")]
    BadSidecar { path: String, reason: String },
    #[error("row {row}: unsupported format {found:?}")]
    Version { row: usize, found: String },
    #[error("row {row}: checksum mismatch")]
    Checksum { row: usize },
    #[error("row {row}: payload holds {found} values, sidecar says {want}")]
    CountMismatch { row: usize, want: usize, found: usize },
    #[error("no row files found in {dir}")]
    Empty { dir: String },
    #[error("rows have differing lengths ({0} vs {1})")]
    NonRectangular(usize, usize),
}

const ROW_FORMAT: &str = "mexrow/1";

#[derive(Serialize, Deserialize)]
struct RowSidecar {
    format: String,
    row: usize,
    count: usize,
    checksum: String,
}

fn row_paths(dir: &Path, i: usize) -> (std::path::PathBuf, std::path::PathBuf) {
    (
        dir.join(format!("row_{i:04}.bin")),
        dir.join(format!("row_{i:04}.json")),
    )
}

/// Writes each row as little-endian 64-bit values plus a sidecar with a
/// checksum, so long-running generations can be resumed and audited.
pub fn save_rows(dir: &Path, m: &MexMatrix) -> Result<(), PersistError> {
    std::fs::create_dir_all(dir)?;
    for (i, row) in m.as_rows().iter().enumerate() {
        let mut bytes = Vec::with_capacity(row.len() * 8);
        for &v in row {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        let sidecar = RowSidecar {
            format: ROW_FORMAT.into(),
            row: i,
            count: row.len(),
            checksum: hex::encode(Sha256::digest(&bytes)),
        };
        let (bin, json) = row_paths(dir, i);
        std::fs::write(&bin, &bytes)?;
        let mut f = std::fs::File::create(&json)?;
        f.write_all(serde_json::to_string_pretty(&sidecar).unwrap().as_bytes())?;
    }
    Ok(())
}

/// Loads rows `0, 1, ...` until a sidecar is missing, validating checksums
/// and rectangularity.
pub fn load_rows(dir: &Path) -> Result<MexMatrix, PersistError> {
    let mut rows = Vec::new();
    loop {
        let i = rows.len();
        let (bin, json) = row_paths(dir, i);
        if !json.exists() {
            break;
        }
        let sidecar_text = std::fs::read_to_string(&json)?;
        let sidecar: RowSidecar =
            serde_json::from_str(&sidecar_text).map_err(|e| PersistError::BadSidecar {
                path: json.display().to_string(),
                reason: e.to_string(),
            })?;
        if sidecar.format != ROW_FORMAT {
            return Err(PersistError::Version {
                row: i,
                found: sidecar.format,
            });
        }
        let mut bytes = Vec::new();
        std::fs::File::open(&bin)?.read_to_end(&mut bytes)?;
        if hex::encode(Sha256::digest(&bytes)) != sidecar.checksum {
            return Err(PersistError::Checksum { row: i });
        }
        if bytes.len() % 8 != 0 || bytes.len() / 8 != sidecar.count {
            return Err(PersistError::CountMismatch {
                row: i,
                want: sidecar.count,
                found: bytes.len() / 8,
            });
        }
        let row: Vec<i64> = bytes
            .chunks_exact(8)
            .map(|c| i64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        if let Some(first) = rows.first().map(Vec::len) {
            if row.len() != first {
                return Err(PersistError::NonRectangular(first, row.len()));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(PersistError::Empty {
            dir: dir.display().to_string(),
        });
    }
    Ok(MexMatrix { rows })
}
