//! Exact integer kernel for floors of golden-ratio multiples.
//!
//! With `phi = (1 + sqrt 5)/2`, the lower Wythoff sequence is
//! `a(n) = floor(n*phi)` and the upper one is `b(n) = floor(n*phi^2)`.
//! Both are computed here without floating point, via
//!
//! ```text
//! floor(n*phi)   = (n + isqrt(5*n^2)) div 2      for n >= 0
//! floor(n*phi^2) = (3*n + isqrt(5*n^2)) div 2    for n >= 0
//! ```
//!
//! which are exact because `5*n^2` is never a perfect square for `n >= 1`.
//! Negative arguments use `floor(m*phi) = -floor(-m*phi) - 1`, valid since
//! `m*phi` is irrational for `m != 0`.  All arithmetic is checked `i128`:
//! a range that cannot be represented is reported as an error, never wrapped.

use crate::report::{IdentityOutcome, IdentityReport};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error("argument must be positive, got {0}")]
    NotPositive(i128),
    #[error("Fibonacci index {0} out of range (supported: 0..={MAX_FIB_INDEX})")]
    FibIndexOutOfRange(u32),
}

/// Largest `n` for which `F(n)` fits in an `i128`.
pub const MAX_FIB_INDEX: u32 = 184;

/// Floor of the square root, exact for all of `u128`.
///
/// A floating-point estimate seeds a Newton iteration; the final clamp makes
/// the result exact even where `f64` has too few mantissa bits.
pub fn isqrt_u128(x: u128) -> u128 {
    if x < 2 {
        return x;
    }
    let mut r = (x as f64).sqrt() as u128;
    // Newton steps converge to within one of the root from any positive seed.
    loop {
        let next = (r + x / r) / 2;
        if next >= r {
            break;
        }
        r = next;
    }
    while r.checked_mul(r).map_or(true, |sq| sq > x) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= x) {
        r += 1;
    }
    r
}

/// `F(n)` with `F(1) = F(2) = 1`.  Indices above [`MAX_FIB_INDEX`] overflow
/// `i128` and are rejected.
pub fn fib(n: u32) -> Result<i128, ArithError> {
    if n > MAX_FIB_INDEX {
        return Err(ArithError::FibIndexOutOfRange(n));
    }
    if n == 0 {
        return Ok(0);
    }
    // stop at F(n): F(n + 1) may not fit even when F(n) does
    let (mut a, mut b) = (0i128, 1i128);
    for _ in 1..n {
        let next = a + b;
        a = b;
        b = next;
    }
    Ok(b)
}

/// `floor(m*phi)` for any integer `m`.
pub fn floor_phi_mul(m: i128) -> Result<i128, ArithError> {
    if m < 0 {
        let neg = m.checked_neg().ok_or(ArithError::Overflow("floor_phi_mul"))?;
        return Ok(-floor_phi_mul(neg)? - 1);
    }
    let m = m as u128;
    let sq = m
        .checked_mul(m)
        .and_then(|s| s.checked_mul(5))
        .ok_or(ArithError::Overflow("floor_phi_mul"))?;
    let v = (m + isqrt_u128(sq)) / 2;
    i128::try_from(v).map_err(|_| ArithError::Overflow("floor_phi_mul"))
}

/// `floor(m*phi^2)` for any integer `m`, computed directly rather than as
/// `floor(m*phi) + m` so the two routes can be played against each other.
pub fn floor_phi_sq_mul(m: i128) -> Result<i128, ArithError> {
    if m < 0 {
        let neg = m
            .checked_neg()
            .ok_or(ArithError::Overflow("floor_phi_sq_mul"))?;
        return Ok(-floor_phi_sq_mul(neg)? - 1);
    }
    let m = m as u128;
    let sq = m
        .checked_mul(m)
        .and_then(|s| s.checked_mul(5))
        .ok_or(ArithError::Overflow("floor_phi_sq_mul"))?;
    let v = (3u128
        .checked_mul(m)
        .ok_or(ArithError::Overflow("floor_phi_sq_mul"))?
        + isqrt_u128(sq))
        / 2;
    i128::try_from(v).map_err(|_| ArithError::Overflow("floor_phi_sq_mul"))
}

/// `a(n) = floor(n*phi)`, defined for `n >= 1`.
pub fn lower_wythoff(n: i128) -> Result<i128, ArithError> {
    if n < 1 {
        return Err(ArithError::NotPositive(n));
    }
    floor_phi_mul(n)
}

/// `b(n) = floor(n*phi^2) = a(n) + n`, defined for `n >= 1`.
pub fn upper_wythoff(n: i128) -> Result<i128, ArithError> {
    if n < 1 {
        return Err(ArithError::NotPositive(n));
    }
    let a = floor_phi_mul(n)?;
    a.checked_add(n).ok_or(ArithError::Overflow("upper_wythoff"))
}

/// `floor((a*phi + b)*n + c)` evaluated exactly as `b*n + c + floor(a*n*phi)`.
pub fn eval_affine_golden(a: i128, b: i128, c: i128, n: i128) -> Result<i128, ArithError> {
    let lin = b
        .checked_mul(n)
        .and_then(|v| v.checked_add(c))
        .ok_or(ArithError::Overflow("eval_affine_golden"))?;
    let arg = a
        .checked_mul(n)
        .ok_or(ArithError::Overflow("eval_affine_golden"))?;
    lin.checked_add(floor_phi_mul(arg)?)
        .ok_or(ArithError::Overflow("eval_affine_golden"))
}

/// Does `m` lie in `A = {a(n)}`?  Uses the Beatty inverse
/// `n = floor((m+1)*phi) - (m+1)`, so membership costs one kernel call.
pub fn is_lower_member(m: i128) -> Result<bool, ArithError> {
    if m < 1 {
        return Ok(false);
    }
    let n = floor_phi_mul(m + 1)? - (m + 1);
    Ok(n >= 1 && floor_phi_mul(n)? == m)
}

/// Does `m` lie in `B = {b(n)}`?  Independent of [`is_lower_member`]: it
/// inverts `b` via `k = 2*(m+1) - a(m+1) - 1` and re-evaluates.
pub fn is_upper_member(m: i128) -> Result<bool, ArithError> {
    if m < 2 {
        return Ok(false);
    }
    let k = 2 * (m + 1) - floor_phi_mul(m + 1)? - 1;
    Ok(k >= 1 && upper_wythoff(k)? == m)
}

/// One index `n` together with `a(n)` and `b(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WythoffPoint {
    pub n: i128,
    pub a: i128,
    pub b: i128,
}

impl WythoffPoint {
    pub fn new(n: i128) -> Result<Self, ArithError> {
        let a = lower_wythoff(n)?;
        let b = a.checked_add(n).ok_or(ArithError::Overflow("WythoffPoint"))?;
        Ok(WythoffPoint { n, a, b })
    }
}

/// Checks the basic composition identities of `a` and `b` for every
/// `n in 1..=n_max`, reporting per-identity pass counts and counterexamples.
///
/// The list covers: the three compositions `a(a(n))`, `a(b(n))` and the
/// decomposition of `b`; the two inverse-golden shifts; the complement
/// return `a(a(n)) + 1 - a(n) = n`; the upper difference
/// `floor((phi-1)*b(n)) - b(n) = -n`; the step sizes of `a` after members of
/// `A` and of `B`; the six `m(x) = a(x) - x + 1` compositions through
/// `b`, `b - 1` and `2a + n`; and the fact that `A` and `B` tile the
/// positive integers (each `m` is in exactly one, by the two independent
/// inverse formulas).
pub fn verify_core_identities(n_max: i128) -> Result<IdentityReport, ArithError> {
    let mut report = IdentityReport::new(n_max);

    let mut by_n: Vec<IdentityOutcome> = [
        "a(a(n)) = a(n) + n - 1",
        "a(b(n)) = 2a(n) + n",
        "floor(n phi^2) = a(n) + n",
        "a(a(n)+n) - a(n) - n = a(n)",
        "a(b(n)+1) - b(n) - 1 = a(n)",
        "a(a(n)) + 1 - a(n) = n",
        "floor((phi-1) b(n)) - b(n) = -n",
        "m(b(a(n))) = b(n)",
        "m(b(b(n))) + 1 = b(a(n)+1)",
        "m(b(a(n))-1) + 1 = b(n)",
        "m(b(b(n))-1) + 2 = b(a(n)+1)",
        "m(2a(a(n))+a(n)) + 3 = b(a(n)+1)",
        "m(2a(b(n))+b(n)) + 2 = b(b(n)+1)",
    ]
    .iter()
    .map(|name| IdentityOutcome::new(*name))
    .collect();

    let m_of = |x: i128| -> Result<i128, ArithError> { Ok(floor_phi_mul(x)? - x + 1) };

    for n in 1..=n_max {
        let a = floor_phi_mul(n)?;
        let b = a + n;
        let checks: [(i128, i128); 13] = [
            (floor_phi_mul(a)?, a + n - 1),
            (floor_phi_mul(b)?, 2 * a + n),
            (floor_phi_sq_mul(n)?, a + n),
            (floor_phi_mul(a + n)? - a - n, a),
            (floor_phi_mul(b + 1)? - b - 1, a),
            (floor_phi_mul(a)? + 1 - a, n),
            (floor_phi_mul(b)? - 2 * b, -n),
            (m_of(upper_wythoff(a)?)?, b),
            (m_of(upper_wythoff(b)?)? + 1, upper_wythoff(a + 1)?),
            (m_of(upper_wythoff(a)? - 1)? + 1, b),
            (m_of(upper_wythoff(b)? - 1)? + 2, upper_wythoff(a + 1)?),
            (m_of(2 * floor_phi_mul(a)? + a)? + 3, upper_wythoff(a + 1)?),
            (m_of(2 * floor_phi_mul(b)? + b)? + 2, upper_wythoff(b + 1)?),
        ];
        for (outcome, (lhs, rhs)) in by_n.iter_mut().zip(checks) {
            if lhs == rhs {
                outcome.record_pass();
            } else {
                outcome.record_failure(n, format!("lhs={lhs} rhs={rhs}"));
            }
        }
    }

    let mut step_a = IdentityOutcome::new("a(n+1) = a(n) + 2 when n in A");
    let mut step_b = IdentityOutcome::new("a(n+1) = a(n) + 1 when n in B");
    for n in 1..=n_max {
        let step = floor_phi_mul(n + 1)? - floor_phi_mul(n)?;
        if is_lower_member(n)? {
            if step == 2 {
                step_a.record_pass();
            } else {
                step_a.record_failure(n, format!("step={step}"));
            }
        } else if step == 1 {
            step_b.record_pass();
        } else {
            step_b.record_failure(n, format!("step={step}"));
        }
    }

    let mut tiling = IdentityOutcome::new("each m >= 1 is in exactly one of A, B");
    for m in 1..=n_max {
        let la = is_lower_member(m)?;
        let lb = is_upper_member(m)?;
        if la != lb {
            tiling.record_pass();
        } else {
            tiling.record_failure(m, format!("in A: {la}, in B: {lb}"));
        }
    }

    for outcome in by_n {
        report.push(outcome);
    }
    report.push(step_a);
    report.push(step_b);
    report.push(tiling);
    Ok(report)
}
