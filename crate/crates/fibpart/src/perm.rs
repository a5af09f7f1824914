//! Piecewise permutations of the natural numbers.
//!
//! A permutation is given by 5-tuples `(a, b, c, i, j)`: on the range
//! `R[i,j]` it acts as `n -> floor((a*phi + b)*n + c)`.  The ranges of the
//! tuples must tile the naturals, which the constructor checks on a prefix.
//!
//! The built-in catalog contains the involutions `f` and `g`, the order-4
//! element `h` with its powers, the order-6 element `i` with its powers,
//! and the infinite-order element `j` with its inverse.  `f` and `j`
//! generate an infinite dihedral group: `f j = j^-1 f`.

use crate::gbs::{verify_partition, GbsBlock, GbsError, PartitionSpec};
use crate::wythoff::{eval_affine_golden, ArithError};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("gbs failure: {0}")]
    Gbs(#[from] GbsError),
    #[error("no piece covers {n}")]
    Uncovered { n: i128 },
    #[error("{count} pieces cover {n}")]
    Overlap { n: i128, count: usize },
    #[error("piece ranges do not tile 1..={checked}; first bad point {witness}")]
    NotAPartition { checked: i128, witness: i128 },
    #[error("value {value} at {n} is not a natural number")]
    OutOfCodomain { n: i128, value: i128 },
    #[error("tuple list syntax error at {pos}: {reason}")]
    Syntax { pos: usize, reason: String },
}

/// One affine golden piece together with the range it acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PieceTuple {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub block: GbsBlock,
}

impl PieceTuple {
    pub fn new(a: i64, b: i64, c: i64, i: u32, j: i64) -> Self {
        PieceTuple {
            a,
            b,
            c,
            block: GbsBlock::new(i, j),
        }
    }

    pub fn eval(&self, n: i128) -> Result<i128, ArithError> {
        eval_affine_golden(self.a as i128, self.b as i128, self.c as i128, n)
    }
}

impl fmt::Display for PieceTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{},{},{},{})",
            self.a, self.b, self.c, self.block.i, self.block.j
        )
    }
}

/// Parses the interchange form `"(a,b,c,i,j);(a,b,c,i,j);..."`.
/// Whitespace around numbers and separators is allowed.
pub fn parse_tuple_list(text: &str) -> Result<Vec<PieceTuple>, PermError> {
    let mut pieces = Vec::new();
    let mut rest = text.trim();
    let mut offset = text.len() - rest.len();
    loop {
        if !rest.starts_with('(') {
            return Err(PermError::Syntax {
                pos: offset,
                reason: "expected '('".into(),
            });
        }
        let close = rest.find(')').ok_or(PermError::Syntax {
            pos: offset,
            reason: "unclosed '('".into(),
        })?;
        let inner = &rest[1..close];
        let nums: Result<Vec<i64>, _> = inner.split(',').map(|s| s.trim().parse()).collect();
        let nums = nums.map_err(|e| PermError::Syntax {
            pos: offset + 1,
            reason: e.to_string(),
        })?;
        let [a, b, c, i, j] = nums[..] else {
            return Err(PermError::Syntax {
                pos: offset + 1,
                reason: format!("expected 5 entries, got {}", nums.len()),
            });
        };
        let i = u32::try_from(i).map_err(|_| PermError::Syntax {
            pos: offset + 1,
            reason: format!("block index i must be >= 0, got {i}"),
        })?;
        pieces.push(PieceTuple::new(a, b, c, i, j));
        rest = rest[close + 1..].trim_start();
        offset = text.len() - rest.len();
        if rest.is_empty() {
            return Ok(pieces);
        }
        if !rest.starts_with(';') {
            return Err(PermError::Syntax {
                pos: offset,
                reason: "expected ';' between tuples".into(),
            });
        }
        rest = rest[1..].trim_start();
        offset = text.len() - rest.len();
    }
}

/// Renders pieces in the same form [`parse_tuple_list`] accepts.
pub fn format_tuple_list(pieces: &[PieceTuple]) -> String {
    pieces
        .iter()
        .map(PieceTuple::to_string)
        .collect::<Vec<_>>()
        .join(";")
}

/// How far constructors check that piece ranges tile the naturals.
pub const DEFAULT_PARTITION_CHECK: i128 = 1000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewisePermutation {
    pieces: Vec<PieceTuple>,
}

impl PiecewisePermutation {
    /// Builds a permutation after verifying that the piece ranges tile
    /// `1..=check_n` (each point covered exactly once).
    pub fn new(pieces: Vec<PieceTuple>, check_n: i128) -> Result<Self, PermError> {
        let spec = PartitionSpec::custom(
            pieces.iter().map(|p| (p.block.i, p.block.j)).collect(),
            1,
        );
        let report = verify_partition(&spec, check_n)?;
        if let Some((_, w)) = report.first_counterexample() {
            return Err(PermError::NotAPartition {
                checked: check_n,
                witness: w.input,
            });
        }
        Ok(PiecewisePermutation { pieces })
    }

    pub fn from_tuple_list(text: &str, check_n: i128) -> Result<Self, PermError> {
        Self::new(parse_tuple_list(text)?, check_n)
    }

    pub fn pieces(&self) -> &[PieceTuple] {
        &self.pieces
    }

    /// Applies the permutation.  Every piece is consulted so that a
    /// malformed piece list surfaces as an error even past the prefix the
    /// constructor verified.
    pub fn eval(&self, n: i128) -> Result<i128, PermError> {
        let mut hit = None;
        let mut count = 0;
        for piece in &self.pieces {
            if piece.block.range_contains(n)?.is_some() {
                count += 1;
                hit = Some(piece);
            }
        }
        match (hit, count) {
            (Some(piece), 1) => {
                let v = piece.eval(n)?;
                if v < 1 {
                    return Err(PermError::OutOfCodomain { n, value: v });
                }
                Ok(v)
            }
            (None, _) => Err(PermError::Uncovered { n }),
            (_, count) => Err(PermError::Overlap { n, count }),
        }
    }

    /// `self^k(n)` by repeated application.
    pub fn eval_pow(&self, n: i128, k: u32) -> Result<i128, PermError> {
        let mut v = n;
        for _ in 0..k {
            v = self.eval(v)?;
        }
        Ok(v)
    }
}

/// `p(q(n))`.
pub fn compose_eval(
    p: &PiecewisePermutation,
    q: &PiecewisePermutation,
    n: i128,
) -> Result<i128, PermError> {
    p.eval(q.eval(n)?)
}

/// Result of scanning a permutation's values on `1..=n_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BijectionReport {
    pub checked: i128,
    /// Two inputs with the same image, if any.
    pub duplicate: Option<(i128, i128, i128)>,
    /// Largest `m` such that `1..=m` is contained in the image.
    pub covered_prefix: i128,
}

impl BijectionReport {
    pub fn is_injective(&self) -> bool {
        self.duplicate.is_none()
    }
}

/// Evaluates the permutation on `1..=n_max` and reports injectivity plus the
/// covered prefix of the image.
pub fn verify_bijection_prefix(
    perm: &PiecewisePermutation,
    n_max: i128,
) -> Result<BijectionReport, PermError> {
    let mut values: Vec<(i128, i128)> = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        values.push((perm.eval(n)?, n));
    }
    values.sort_unstable();
    let mut duplicate = None;
    for w in values.windows(2) {
        if w[0].0 == w[1].0 {
            duplicate = Some((w[0].1, w[1].1, w[0].0));
            break;
        }
    }
    let mut covered_prefix = 0i128;
    for &(v, _) in &values {
        match v.cmp(&(covered_prefix + 1)) {
            std::cmp::Ordering::Less => {}
            std::cmp::Ordering::Equal => covered_prefix += 1,
            std::cmp::Ordering::Greater => break,
        }
    }
    Ok(BijectionReport {
        checked: n_max,
        duplicate,
        covered_prefix,
    })
}

/// Outcome of bounded order detection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderOutcome {
    /// `perm^k` is the identity on the checked prefix and no smaller power is.
    DividesInto(u32),
    /// No power up to the bound acts as the identity on the prefix.
    ExceedsBound,
}

/// Finds the least `k <= max_order` with `perm^k(n) = n` for all
/// `n in 1..=n_max`.  This is evidence about the order, not a proof: a
/// permutation of infinite order can only ever report `ExceedsBound`.
pub fn detect_order(
    perm: &PiecewisePermutation,
    n_max: i128,
    max_order: u32,
) -> Result<OrderOutcome, PermError> {
    let mut current: Vec<i128> = (1..=n_max).collect();
    for k in 1..=max_order {
        for v in current.iter_mut() {
            *v = perm.eval(*v)?;
        }
        if current.iter().zip(1..).all(|(&v, n)| v == n) {
            return Ok(OrderOutcome::DividesInto(k));
        }
    }
    Ok(OrderOutcome::ExceedsBound)
}

macro_rules! builtin {
    ($($name:literal => $tuples:literal),+ $(,)?) => {
        &[$(($name, $tuples)),+]
    };
}

/// Tuple tables of the built-in permutations, in catalog order.
pub const BUILTIN_TABLES: &[(&str, &str)] = builtin![
    "f" => "(1,0,1,0,0);(1,-1,0,1,0)",
    "g" => "(1,0,0,2,0);(1,0,-2,1,0);(1,-1,2,2,2);(1,-1,1,3,1)",
    "h" => "(1,0,0,2,0);(1,0,0,1,0);(1,-1,2,2,2);(1,-1,-1,3,1)",
    "h2" => "(1,1,-1,1,0);(0,1,2,2,2);(0,1,-2,2,0);(-1,2,1,3,1)",
    "h3" => "(1,0,3,2,2);(1,0,-2,1,0);(1,-1,1,3,1);(1,-1,1,2,0)",
    "i" => "(1,1,-2,1,0);(1,0,2,3,1);(1,-1,2,2,2);(1,-1,0,2,0)",
    "i2" => "(1,0,2,2,2);(1,0,-2,1,0);(0,1,0,4,0);(0,1,0,3,1);(-1,2,1,3,2)",
    "i3" => "(1,0,2,3,1);(1,-1,0,4,0);(0,1,0,3,2);(0,1,0,2,2);(0,1,0,1,0)",
    "i4" => "(1,1,-2,1,0);(1,-1,2,2,2);(1,-1,0,3,2);(0,1,0,4,0);(0,1,0,3,1)",
    "i5" => "(1,0,2,1,1);(1,0,-2,1,0);(1,-1,0,4,0);(-1,2,1,3,2)",
    "j" => "(1,0,1,2,0);(1,0,-1,1,0);(1,-1,1,1,1)",
    "jinv" => "(1,0,0,2,0);(1,0,0,1,1);(1,-1,1,2,1);(1,-1,0,3,0)",
];

fn catalog() -> &'static Vec<(&'static str, PiecewisePermutation)> {
    static CATALOG: OnceLock<Vec<(&'static str, PiecewisePermutation)>> = OnceLock::new();
    CATALOG.get_or_init(|| {
        BUILTIN_TABLES
            .iter()
            .map(|&(name, tuples)| {
                let p = PiecewisePermutation::from_tuple_list(tuples, DEFAULT_PARTITION_CHECK)
                    .unwrap_or_else(|e| panic!("builtin {name} is malformed: {e}"));
                (name, p)
            })
            .collect()
    })
}

/// Names of the built-in permutations, in catalog order.
pub fn builtin_names() -> Vec<&'static str> {
    catalog().iter().map(|&(name, _)| name).collect()
}

/// Looks up a built-in permutation by name (`"f"`, `"h2"`, `"jinv"`, ...).
pub fn builtin(name: &str) -> Option<&'static PiecewisePermutation> {
    catalog()
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, p)| p)
}

impl FromStr for PiecewisePermutation {
    type Err = PermError;

    /// Accepts either a built-in name or a tuple list.
    fn from_str(s: &str) -> Result<Self, PermError> {
        if let Some(p) = builtin(s.trim()) {
            return Ok(p.clone());
        }
        PiecewisePermutation::from_tuple_list(s, DEFAULT_PARTITION_CHECK)
    }
}
