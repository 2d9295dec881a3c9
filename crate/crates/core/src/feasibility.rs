//! Feasibility predicates gating the completion drivers.
//!
//! Strict-mode gates are evaluated in exact rational arithmetic: the
//! square-root conditions `A >= c * sqrt(R)` are decided as
//! `A >= 0 && A^2 >= c^2 * R`, with no floating point anywhere.

use num::{BigInt, BigRational, FromPrimitive, Zero};

fn rat(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn rat_u(x: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// Parses a decimal string (`"9.8e-5"`, `"0.0001"`, `"1/6000"`) into an
/// exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: i64 = num.trim().parse().ok()?;
        let d: i64 = den.trim().parse().ok()?;
        if d == 0 {
            return None;
        }
        return Some(rat(n) / rat(d));
    }
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    let digits = format!("{}{}", int_part, frac_part);
    let digits = if digits.is_empty() || digits == "-" { return None } else { digits };
    let value: BigInt = digits.parse().ok()?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut r = BigRational::from_integer(value);
    if scale >= 0 {
        r *= BigRational::from_integer(ten.pow(scale as u32));
    } else {
        r /= BigRational::from_integer(ten.pow((-scale) as u32));
    }
    Some(r)
}

/// `lhs >= coeff * sqrt(radicand)`, exactly, for `radicand >= 0`.
fn ge_sqrt(lhs: &BigRational, coeff: u64, radicand: &BigRational) -> bool {
    if radicand < &BigRational::zero() {
        return lhs >= &BigRational::zero();
    }
    if lhs < &BigRational::zero() {
        return false;
    }
    lhs * lhs >= rat_u(coeff * coeff) * radicand
}

/// Deterministic completion gate:
/// `20 <= n - 12 * sqrt(69 delta n^2 + 3n + 7) - 12 eps n`.
pub fn thm1_feasible(n: usize, eps: &BigRational, delta: &BigRational) -> bool {
    let nn = rat_u(n as u64);
    let lhs = &nn - rat(20) - rat(12) * eps * &nn;
    let radicand = rat(69) * delta * &nn * &nn + rat(3) * &nn + rat(7);
    ge_sqrt(&lhs, 12, &radicand)
}

/// Integer-count form of [`thm1_feasible`] with `eps = max_usage / n`,
/// `delta = fill / n^2`. This is the strict-mode gate on an instance.
pub fn thm1_feasible_counts(n: usize, max_line_usage: usize, fill: usize) -> bool {
    let eps = rat_u(max_line_usage as u64) / rat_u(n as u64);
    let delta = rat_u(fill as u64) / (rat_u(n as u64) * rat_u(n as u64));
    thm1_feasible(n, &eps, &delta)
}

/// Randomized completion gate:
/// `12 <= n - 12 n sqrt(36 d + 198 d/n + 5346 e/n + 1518/(100 n) + 10956 e^2) - 12 e n`.
pub fn probthm1_feasible(n: usize, eps: &BigRational, delta: &BigRational) -> bool {
    let nn = rat_u(n as u64);
    let lhs = &nn - rat(12) - rat(12) * eps * &nn;
    let inner = rat(36) * delta
        + rat(198) * delta / &nn
        + rat(5346) * eps / &nn
        + rat(1518) / (rat(100) * &nn)
        + rat(10956) * eps * eps;
    // 12 n sqrt(inner) = 12 sqrt(n^2 * inner).
    let radicand = &nn * &nn * inner;
    ge_sqrt(&lhs, 12, &radicand)
}

pub fn probthm1_feasible_counts(n: usize, max_line_usage: usize, fill: usize) -> bool {
    let eps = rat_u(max_line_usage as u64) / rat_u(n as u64);
    let delta = rat_u(fill as u64) / (rat_u(n as u64) * rat_u(n as u64));
    probthm1_feasible(n, &eps, &delta)
}

/// Per-fix feasibility: `20 <= n - 12 sqrt(T) - 12 max_usage` where `T`
/// is the disturbed-cell count with headroom. Pure integers.
pub fn fix_feasible(n: usize, max_line_usage: usize, disturbed_with_headroom: u64) -> bool {
    let a = n as i128 - 20 - 12 * max_line_usage as i128;
    a >= 0 && a * a >= 144 * disturbed_with_headroom as i128
}

/// Parameters of the in-row/in-column swap feasibility check.
#[derive(Debug, Clone, Copy)]
pub struct FeasibilityParams {
    pub n: usize,
    /// Instance density (max line usage / n).
    pub eps: f64,
    /// Fill fraction of the instance; informational.
    pub delta: f64,
    /// Overload threshold fraction.
    pub d: f64,
    /// Number of avoided symbols.
    pub a: usize,
    /// Disturbed-cell fraction of the working square.
    pub kappa: f64,
}

/// The two linear swap-feasibility conditions:
/// `3 <= n - 4 (kappa/d) n - 6 d n - 6 eps n - 3a` and
/// `12 <= n - 12 d n - 12 eps n - 4a`.
pub fn lemma2_feasible(p: &FeasibilityParams) -> bool {
    let n = p.n as f64;
    let first = n - 4.0 * (p.kappa / p.d) * n - 6.0 * p.d * n - 6.0 * p.eps * n - 3.0 * p.a as f64;
    let second = n - 12.0 * p.d * n - 12.0 * p.eps * n - 4.0 * p.a as f64;
    first >= 3.0 && second >= 12.0
}
