//! Generalized Beatty sequences and Fibonacci-like partitions.
//!
//! For `i >= 0` and any integer `j`, the sequence
//! `f[i,j](n) = F(i+1)*a(n) + F(i)*n - j` is strictly increasing on
//! `n >= 1`; its range is written `R[i,j]`.  Ranges bifurcate:
//!
//! ```text
//! R[i,j] = R[i+1, F(i+1)+j]  disjoint-union  R[i+2, j]
//! ```
//!
//! because `f[i+1,F(i+1)+j](n) = f[i,j](a(n))` and
//! `f[i+2,j](n) = f[i,j](b(n))`.  Starting from the Wythoff partition
//! `{R[0,0], R[1,0]}` this produces, for each `k >= 3`, a partition of the
//! natural numbers into `F(k)` ranges (the first kind), and a second family
//! partitions `{ n : n >= F(k) }` using negative offsets `j`.

use crate::report::{IdentityOutcome, IdentityReport, FAILURE_CAP};
use crate::wythoff::{fib, floor_phi_mul, lower_wythoff, upper_wythoff, ArithError};
use rayon::prelude::*;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GbsError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("second-kind partitions need k >= 3, got {0}")]
    SecondKindTooSmall(u32),
    #[error("first-kind partitions need k >= 1, got {0}")]
    FirstKindTooSmall(u32),
}

/// One generalized Beatty sequence, identified by its two indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GbsBlock {
    pub i: u32,
    pub j: i64,
}

impl GbsBlock {
    pub fn new(i: u32, j: i64) -> Self {
        GbsBlock { i, j }
    }

    /// `f[i,j](n)` for `n >= 1`.
    pub fn eval(&self, n: i128) -> Result<i128, GbsError> {
        if n < 1 {
            return Err(ArithError::NotPositive(n).into());
        }
        let fi1 = fib(self.i + 1)?;
        let fi = fib(self.i)?;
        let a = floor_phi_mul(n)?;
        let v = fi1
            .checked_mul(a)
            .and_then(|x| fi.checked_mul(n).and_then(|y| x.checked_add(y)))
            .and_then(|x| x.checked_sub(self.j as i128))
            .ok_or(ArithError::Overflow("GbsBlock::eval"))?;
        Ok(v)
    }

    /// If `m` is in `R[i,j]`, returns the unique `n` with `f[i,j](n) = m`.
    ///
    /// Binary search over the strictly increasing `f[i,j]`.
    pub fn range_contains(&self, m: i128) -> Result<Option<i128>, GbsError> {
        if self.eval(1)? > m {
            return Ok(None);
        }
        let mut lo = 1i128;
        let mut hi = 2i128;
        while self.eval(hi)? < m {
            lo = hi;
            hi = hi
                .checked_mul(2)
                .ok_or(ArithError::Overflow("range_contains"))?;
        }
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if self.eval(mid)? < m {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        Ok(if self.eval(lo)? == m { Some(lo) } else { None })
    }

    /// Splits the range into its two bifurcation children
    /// `(R[i+1, F(i+1)+j], R[i+2, j])`.
    pub fn bifurcate(&self) -> Result<(GbsBlock, GbsBlock), GbsError> {
        let shift = fib(self.i + 1)?;
        let j1 = i128::checked_add(shift, self.j as i128)
            .ok_or(ArithError::Overflow("bifurcate"))?;
        let j1 = i64::try_from(j1).map_err(|_| ArithError::Overflow("bifurcate"))?;
        Ok((GbsBlock::new(self.i + 1, j1), GbsBlock::new(self.i + 2, self.j)))
    }
}

/// A part of a partition: either a generalized Beatty range or all of the
/// natural numbers (the single part of the two trivial partitions).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Block {
    Whole,
    Gbs(GbsBlock),
}

impl Block {
    /// Membership with preimage, mirroring [`GbsBlock::range_contains`];
    /// for [`Block::Whole`] every `m >= 1` is its own preimage.
    pub fn range_contains(&self, m: i128) -> Result<Option<i128>, GbsError> {
        match self {
            Block::Whole => Ok((m >= 1).then_some(m)),
            Block::Gbs(g) => g.range_contains(m),
        }
    }
}

impl Serialize for Block {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Block::Whole => "N".serialize(s),
            Block::Gbs(g) => (g.i, g.j).serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Block {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Pair(u32, i64),
            Name(String),
        }
        match Repr::deserialize(d)? {
            Repr::Pair(i, j) => Ok(Block::Gbs(GbsBlock::new(i, j))),
            Repr::Name(s) if s == "N" => Ok(Block::Whole),
            Repr::Name(s) => Err(D::Error::custom(format!(
                "unknown block {s:?}; expected \"N\" or [i, j]"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartitionKind {
    First,
    Second,
    Custom,
}

/// A claimed partition: a block list together with the start of the domain
/// it is supposed to tile.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionSpec {
    pub kind: PartitionKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    pub blocks: Vec<Block>,
    pub domain_start: i128,
}

impl PartitionSpec {
    /// `k`-th standard partition of the first kind: for `k >= 3` and
    /// `i = k-3` the blocks are `R[i, 0..F(i+2)]` and `R[i+1, 0..F(i+1)]`;
    /// for `k = 1, 2` the single part is all of the naturals.
    pub fn first_kind(k: u32) -> Result<PartitionSpec, GbsError> {
        if k == 0 {
            return Err(GbsError::FirstKindTooSmall(k));
        }
        let blocks = if k <= 2 {
            vec![Block::Whole]
        } else {
            let i = k - 3;
            let mut blocks = Vec::new();
            for j in 0..fib(i + 2)? {
                blocks.push(Block::Gbs(GbsBlock::new(i, j as i64)));
            }
            for j in 0..fib(i + 1)? {
                blocks.push(Block::Gbs(GbsBlock::new(i + 1, j as i64)));
            }
            blocks
        };
        Ok(PartitionSpec {
            kind: PartitionKind::First,
            k: Some(k),
            blocks,
            domain_start: 1,
        })
    }

    /// `k`-th standard partition of the second kind (`k >= 3`): blocks
    /// `R[i,j]` for `k-3 <= i <= k-2` and `-F(i+1) >= j >= 1-F(k)`, tiling
    /// `{ n : n >= F(k) }`.  Blocks are ordered by `i` ascending then `j`
    /// descending.
    pub fn second_kind(k: u32) -> Result<PartitionSpec, GbsError> {
        if k < 3 {
            return Err(GbsError::SecondKindTooSmall(k));
        }
        let fk = fib(k)?;
        let mut blocks = Vec::new();
        for i in (k - 3)..=(k - 2) {
            let mut j = -fib(i + 1)?;
            while j >= 1 - fk {
                blocks.push(Block::Gbs(GbsBlock::new(
                    i,
                    i64::try_from(j).map_err(|_| ArithError::Overflow("second_kind"))?,
                )));
                j -= 1;
            }
        }
        Ok(PartitionSpec {
            kind: PartitionKind::Second,
            k: Some(k),
            blocks,
            domain_start: fk,
        })
    }

    pub fn custom(blocks: Vec<(u32, i64)>, domain_start: i128) -> PartitionSpec {
        PartitionSpec {
            kind: PartitionKind::Custom,
            k: None,
            blocks: blocks
                .into_iter()
                .map(|(i, j)| Block::Gbs(GbsBlock::new(i, j)))
                .collect(),
            domain_start,
        }
    }
}

/// Verifies that the blocks tile `domain_start..=n_max`: every `m` in that
/// range must lie in exactly one block.  Violations carry the offending
/// block list; the witness list is capped, the violation count is not.
pub fn verify_partition(spec: &PartitionSpec, n_max: i128) -> Result<IdentityReport, GbsError> {
    let name = "every m is in exactly one block";
    let chunk = 4096i128;
    let starts: Vec<i128> = (spec.domain_start..=n_max).step_by(chunk as usize).collect();
    let partial: Result<Vec<IdentityOutcome>, GbsError> = starts
        .into_par_iter()
        .map(|start| {
            let mut out = IdentityOutcome::new(name);
            let end = (start + chunk - 1).min(n_max);
            for m in start..=end {
                let mut owners = Vec::new();
                for block in &spec.blocks {
                    if block.range_contains(m)?.is_some() {
                        owners.push(*block);
                    }
                }
                if owners.len() == 1 {
                    out.record_pass();
                } else {
                    out.record_failure(m, format!("blocks containing it: {owners:?}"));
                }
            }
            Ok(out)
        })
        .collect();
    let mut merged = IdentityOutcome::new(name);
    for part in partial? {
        merged.absorb(part);
    }
    merged.failures.truncate(FAILURE_CAP);
    let mut report = IdentityReport::new(n_max);
    report.push(merged);
    Ok(report)
}

/// Checks, for `n in 1..=n_max`, the five successor identities that drive the
/// first-kind partition at level `k` (with `i = k-3`) and the four that drive
/// the second-kind partition at the same level.
pub fn verify_block_identities(k: u32, n_max: i128) -> Result<IdentityReport, GbsError> {
    if k < 3 {
        return Err(GbsError::SecondKindTooSmall(k));
    }
    let i = k - 3;
    let f = |i: u32, j: i128| -> Result<_, GbsError> {
        Ok(GbsBlock::new(
            i,
            i64::try_from(j).map_err(|_| ArithError::Overflow("verify_block_identities"))?,
        ))
    };
    let fi1 = fib(i + 1)?;
    let fi2 = fib(i + 2)?;
    let fk = fib(k)?;
    let fk1 = fib(k - 1)?;
    let fk2 = fib(k - 2)?;

    // (lhs block, lhs argument, rhs block, rhs argument, +1 side)
    enum Arg {
        N,
        AofN,
        BofN,
        BofNPlus1,
        AofNPlus1,
    }
    use Arg::*;
    let mut checks: Vec<(String, GbsBlock, Arg, GbsBlock, Arg)> = vec![
        (
            format!("f[{i},0](n) + 1 = f[{i},-1](n)"),
            f(i, 0)?,
            N,
            f(i, -1)?,
            N,
        ),
        (
            format!("f[{},0](n) + 1 = f[{},-1](n)", i + 1, i + 1),
            f(i + 1, 0)?,
            N,
            f(i + 1, -1)?,
            N,
        ),
        (
            format!("f[{i},0](a(n)) + 1 = f[{},{}](n)", i + 1, fi1 - 1),
            f(i, 0)?,
            AofN,
            f(i + 1, fi1 - 1)?,
            N,
        ),
        (
            format!("f[{i},0](b(n)) + 1 = f[{i},{}](b(n)+1)", fi2 - 1),
            f(i, 0)?,
            BofN,
            f(i, fi2 - 1)?,
            BofNPlus1,
        ),
        (
            format!("f[{},0](n) + 1 = f[{i},{}](a(n)+1)", i + 1, fi2 - 1),
            f(i + 1, 0)?,
            N,
            f(i, fi2 - 1)?,
            AofNPlus1,
        ),
    ];
    for bi in (k - 3)..=(k - 2) {
        let mut j = -fib(bi + 1)?;
        while j >= 2 - fk {
            checks.push((
                format!("f[{bi},{j}](n) + 1 = f[{bi},{}](n)", j - 1),
                f(bi, j)?,
                N,
                f(bi, j - 1)?,
                N,
            ));
            j -= 1;
        }
    }
    checks.push((
        format!("f[{},{}](a(n)) + 1 = f[{},{}](n)", k - 3, 1 - fk, k - 2, -fk1),
        f(k - 3, 1 - fk)?,
        AofN,
        f(k - 2, -fk1)?,
        N,
    ));
    checks.push((
        format!(
            "f[{},{}](b(n)) + 1 = f[{},{}](b(n)+1)",
            k - 3,
            1 - fk,
            k - 3,
            -fk2
        ),
        f(k - 3, 1 - fk)?,
        BofN,
        f(k - 3, -fk2)?,
        BofNPlus1,
    ));
    checks.push((
        format!(
            "f[{},{}](n) + 1 = f[{},{}](a(n)+1)",
            k - 2,
            1 - fk,
            k - 3,
            -fk2
        ),
        f(k - 2, 1 - fk)?,
        N,
        f(k - 3, -fk2)?,
        AofNPlus1,
    ));

    let mut report = IdentityReport::new(n_max);
    for (name, lb, larg, rb, rarg) in checks {
        let mut out = IdentityOutcome::new(name);
        for n in 1..=n_max {
            let arg_of = |arg: &Arg| -> Result<i128, GbsError> {
                Ok(match arg {
                    N => n,
                    AofN => lower_wythoff(n)?,
                    BofN => upper_wythoff(n)?,
                    BofNPlus1 => upper_wythoff(n)? + 1,
                    AofNPlus1 => lower_wythoff(n)? + 1,
                })
            };
            let lhs = lb.eval(arg_of(&larg)?)? + 1;
            let rhs = rb.eval(arg_of(&rarg)?)?;
            if lhs == rhs {
                out.record_pass();
            } else {
                out.record_failure(n, format!("lhs={lhs} rhs={rhs}"));
            }
        }
        report.push(out);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(i: u32, j: i64, len: usize) -> Vec<i128> {
        (1..=len as i128)
            .map(|n| GbsBlock::new(i, j).eval(n).unwrap())
            .collect()
    }

    #[test]
    fn block_prefixes_match_known_sequences() {
        assert_eq!(seq(0, 0, 10), [1, 3, 4, 6, 8, 9, 11, 12, 14, 16]);
        assert_eq!(seq(1, 0, 10), [2, 5, 7, 10, 13, 15, 18, 20, 23, 26]);
        assert_eq!(seq(1, 1, 10), [1, 4, 6, 9, 12, 14, 17, 19, 22, 25]);
        assert_eq!(seq(2, 0, 4), [3, 8, 11, 16]);
        assert_eq!(seq(2, 1, 10), [2, 7, 10, 15, 20, 23, 28, 31, 36, 41]);
        assert_eq!(seq(3, 0, 10), [5, 13, 18, 26, 34, 39, 47, 52, 60, 68]);
        assert_eq!(seq(3, 1, 10), [4, 12, 17, 25, 33, 38, 46, 51, 59, 67]);
        assert_eq!(seq(2, 2, 10), [1, 6, 9, 14, 19, 22, 27, 30, 35, 40]);
        assert_eq!(GbsBlock::new(1, 1).eval(1).unwrap(), 1);
    }

    #[test]
    fn second_kind_block_prefixes() {
        assert_eq!(seq(2, -2, 10), [5, 10, 13, 18, 23, 26, 31, 34, 39, 44]);
        assert_eq!(seq(2, -3, 10), [6, 11, 14, 19, 24, 27, 32, 35, 40, 45]);
        assert_eq!(seq(2, -4, 10), [7, 12, 15, 20, 25, 28, 33, 36, 41, 46]);
        assert_eq!(seq(3, -3, 10), [8, 16, 21, 29, 37, 42, 50, 55, 63, 71]);
        assert_eq!(seq(3, -4, 10), [9, 17, 22, 30, 38, 43, 51, 56, 64, 72]);
    }

    #[test]
    fn contains_inverts_eval() {
        for &(i, j) in &[(0u32, 0i64), (1, 0), (2, 2), (3, -4), (5, 7)] {
            let block = GbsBlock::new(i, j);
            for n in 1..300 {
                let v = block.eval(n).unwrap();
                assert_eq!(block.range_contains(v).unwrap(), Some(n));
                assert_eq!(block.range_contains(v + 1).unwrap().map(|_| ()).is_some(),
                    block.eval(n + 1).unwrap() == v + 1);
            }
        }
    }

    #[test]
    fn bifurcation_children() {
        let (left, right) = GbsBlock::new(0, 0).bifurcate().unwrap();
        assert_eq!((left.i, left.j), (1, 1));
        assert_eq!((right.i, right.j), (2, 0));
        let (left, right) = GbsBlock::new(1, 1).bifurcate().unwrap();
        assert_eq!((left.i, left.j), (2, 2));
        assert_eq!((right.i, right.j), (3, 1));
        let (left, right) = GbsBlock::new(1, 0).bifurcate().unwrap();
        assert_eq!((left.i, left.j), (2, 1));
        assert_eq!((right.i, right.j), (3, 0));
    }

    #[test]
    fn bifurcation_is_a_disjoint_split() {
        for &(i, j) in &[(0u32, 0i64), (1, 0), (2, 2), (1, -3)] {
            let parent = GbsBlock::new(i, j);
            let (left, right) = parent.bifurcate().unwrap();
            for m in parent.eval(1).unwrap()..400 {
                let p = parent.range_contains(m).unwrap().is_some();
                let l = left.range_contains(m).unwrap().is_some();
                let r = right.range_contains(m).unwrap().is_some();
                assert_eq!(p, l || r, "m={m} in R[{i},{j}]");
                assert!(!(l && r), "m={m} in both children of R[{i},{j}]");
            }
        }
    }

    #[test]
    fn bifurcation_composition_identities() {
        for &(i, j) in &[(0u32, 0i64), (1, 2), (2, -1), (4, 3)] {
            let parent = GbsBlock::new(i, j);
            let (left, right) = parent.bifurcate().unwrap();
            for n in 1..500 {
                let a = lower_wythoff(n).unwrap();
                let b = upper_wythoff(n).unwrap();
                assert_eq!(left.eval(n).unwrap(), parent.eval(a).unwrap());
                assert_eq!(right.eval(n).unwrap(), parent.eval(b).unwrap());
            }
        }
    }

    #[test]
    fn standard_partition_shapes() {
        let p3 = PartitionSpec::first_kind(3).unwrap();
        assert_eq!(
            p3.blocks,
            vec![
                Block::Gbs(GbsBlock::new(0, 0)),
                Block::Gbs(GbsBlock::new(1, 0))
            ]
        );
        let p4 = PartitionSpec::first_kind(4).unwrap();
        assert_eq!(
            p4.blocks,
            vec![
                Block::Gbs(GbsBlock::new(1, 0)),
                Block::Gbs(GbsBlock::new(1, 1)),
                Block::Gbs(GbsBlock::new(2, 0))
            ]
        );
        for k in 3..=10 {
            let p = PartitionSpec::first_kind(k).unwrap();
            assert_eq!(p.blocks.len() as i128, fib(k).unwrap());
        }
        let p1 = PartitionSpec::first_kind(1).unwrap();
        assert_eq!(p1.blocks, vec![Block::Whole]);
    }

    #[test]
    fn second_kind_shapes() {
        let p = PartitionSpec::second_kind(5).unwrap();
        let want: Vec<Block> = [(2, -2), (2, -3), (2, -4), (3, -3), (3, -4)]
            .iter()
            .map(|&(i, j)| Block::Gbs(GbsBlock::new(i, j)))
            .collect();
        assert_eq!(p.blocks, want);
        assert_eq!(p.domain_start, 5);
        let p3 = PartitionSpec::second_kind(3).unwrap();
        assert_eq!(
            p3.blocks,
            vec![
                Block::Gbs(GbsBlock::new(0, -1)),
                Block::Gbs(GbsBlock::new(1, -1))
            ]
        );
        assert_eq!(p3.domain_start, 2);
        assert!(matches!(
            PartitionSpec::second_kind(2),
            Err(GbsError::SecondKindTooSmall(2))
        ));
        for k in 3..=8 {
            let p = PartitionSpec::second_kind(k).unwrap();
            assert_eq!(p.blocks.len() as i128, fib(k).unwrap());
        }
    }

    #[test]
    fn partitions_verify_on_prefix() {
        for k in 1..=8 {
            let p = PartitionSpec::first_kind(k).unwrap();
            let r = verify_partition(&p, 3000).unwrap();
            assert!(r.is_pass(), "first kind k={k}: {:?}", r.first_counterexample());
        }
        for k in 3..=7 {
            let p = PartitionSpec::second_kind(k).unwrap();
            let r = verify_partition(&p, 3000).unwrap();
            assert!(r.is_pass(), "second kind k={k}: {:?}", r.first_counterexample());
        }
        let ex = PartitionSpec::custom(vec![(1, 0), (2, 0), (2, 2), (3, 1)], 1);
        assert!(verify_partition(&ex, 3000).unwrap().is_pass());
    }

    #[test]
    fn broken_partition_reports_witness() {
        // two copies of the same block: every member is double-covered
        let bad = PartitionSpec::custom(vec![(0, 0), (0, 0)], 1);
        let r = verify_partition(&bad, 50).unwrap();
        assert!(!r.is_pass());
        let out = &r.identities[0];
        assert_eq!(out.failures[0].input, 1);
        assert!(out.failures[0].detail.contains("GbsBlock"));
        // missing block: 2 (in R[1,0]) is uncovered
        let gap = PartitionSpec::custom(vec![(0, 0)], 1);
        let r = verify_partition(&gap, 50).unwrap();
        assert_eq!(r.identities[0].failures[0].input, 2);
    }

    #[test]
    fn block_identities_hold_for_low_k() {
        for k in 3..=6 {
            let r = verify_block_identities(k, 1500).unwrap();
            assert!(r.is_pass(), "k={k}: {:?}", r.first_counterexample());
        }
        // k=5 has 3 successor identities of the second kind plus 3 linking
        // ones plus the 5 first-kind ones
        let r = verify_block_identities(5, 10).unwrap();
        assert_eq!(r.identities.len(), 5 + 3 + 3);
    }

    #[test]
    fn partition_spec_json_round_trip() {
        let p = PartitionSpec::first_kind(4).unwrap();
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(
            text,
            r#"{"kind":"first","k":4,"blocks":[[1,0],[1,1],[2,0]],"domain_start":1}"#
        );
        let back: PartitionSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);

        let trivial = PartitionSpec::first_kind(2).unwrap();
        let text = serde_json::to_string(&trivial).unwrap();
        assert_eq!(
            text,
            r#"{"kind":"first","k":2,"blocks":["N"],"domain_start":1}"#
        );
        let back: PartitionSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, trivial);

        assert!(serde_json::from_str::<PartitionSpec>(
            r#"{"kind":"custom","blocks":["Q"],"domain_start":1}"#
        )
        .is_err());
    }
}
