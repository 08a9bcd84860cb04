//! Closed-form counting formulas, evaluated exactly.
//!
//! All arguments use the `(n+2)`-gon convention: `n` is the polygon size minus two and
//! `m` the number of cells.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Binomial coefficient extended to the degenerate arguments the formulas reach:
/// `C(a, 0) = 1` for every `a` and `C(a, b) = 0` for `b < 0`. A negative top with a
/// positive bottom never arises in the formulas and is rejected by assertion.
pub fn binomial(a: i64, b: i64) -> BigUint {
    if b < 0 {
        return BigUint::zero();
    }
    if b == 0 {
        return BigUint::one();
    }
    assert!(
        a >= 0,
        "binomial({a}, {b}) with negative top is outside the supported domain"
    );
    if a < b {
        return BigUint::zero();
    }
    let b = b.min(a - b);
    let mut acc = BigUint::one();
    for i in 0..b {
        acc *= BigUint::from((a - i) as u64);
        acc /= BigUint::from((i + 1) as u64);
    }
    acc
}

fn nonnegative(name: &str, v: i64) -> Result<()> {
    if v < 0 {
        Err(Error::InvalidArgument(format!(
            "{name} must be nonnegative, got {v}"
        )))
    } else {
        Ok(())
    }
}

fn exact_div(num: BigUint, den: u64) -> BigUint {
    let (q, r) = num.div_rem(&BigUint::from(den));
    assert!(r.is_zero(), "formula produced a non-integer");
    q
}

/// Triangulations of the `(n+2)`-gon: `C(2n, n) / (n+1)`.
pub fn catalan(n: i64) -> Result<BigUint> {
    nonnegative("n", n)?;
    Ok(exact_div(binomial(2 * n, n), (n + 1) as u64))
}

/// Dissections of the `(n+2)`-gon into `m` cells: `C(n-1, m-1) C(n+m, m) / (n+1)`, with
/// the 2-gon counted once with no cells.
pub fn kirkman_cayley(n: i64, m: i64) -> Result<BigUint> {
    nonnegative("n", n)?;
    nonnegative("m", m)?;
    if n == 0 {
        return Ok(if m == 0 {
            BigUint::one()
        } else {
            BigUint::zero()
        });
    }
    Ok(exact_div(
        binomial(n - 1, m - 1) * binomial(n + m, m),
        (n + 1) as u64,
    ))
}

/// Dissections of the `(n+2)`-gon into `m` cells of equal size: `C(n+m, m) / (n+1)`.
pub fn fuss(n: i64, m: i64) -> Result<BigUint> {
    nonnegative("n", n)?;
    if m < 1 {
        return Err(Error::InvalidArgument(format!(
            "m must be at least 1, got {m}"
        )));
    }
    if n % m != 0 {
        return Err(Error::InvalidArgument(format!(
            "n = {n} must be a multiple of m = {m}"
        )));
    }
    Ok(exact_div(binomial(n + m, m), (n + 1) as u64))
}

/// `ell`-periodic dissections of the `(n+2)`-gon into `m` cells.
pub fn ell_periodic_count(n: i64, m: i64, ell: i64) -> Result<BigUint> {
    nonnegative("n", n)?;
    if m < 1 || ell < 1 {
        return Err(Error::InvalidArgument(format!(
            "need m >= 1 and ell >= 1, got m = {m}, ell = {ell}"
        )));
    }
    if m > n || (n - m) % ell != 0 {
        return Ok(BigUint::zero());
    }
    let top = m - 1 + (n - m) / ell;
    Ok(exact_div(
        binomial(top, m - 1) * binomial(n + m, m),
        (n + 1) as u64,
    ))
}

/// Dissections of the `(n+2)`-gon into `m` triangles and quadrilaterals.
pub fn tri_quad_count(n: i64, m: i64) -> Result<BigUint> {
    nonnegative("n", n)?;
    if m < 1 {
        return Err(Error::InvalidArgument(format!(
            "m must be at least 1, got {m}"
        )));
    }
    if n < m || n - m > m {
        return Ok(BigUint::zero());
    }
    Ok(exact_div(
        binomial(m, n - m) * binomial(n + m, m),
        (n + 1) as u64,
    ))
}

/// Distinct quiddities of 3-periodic dissections of the `(n+2)`-gon into `m` cells.
/// Each summand is rational; the total is asserted to be an integer. `(0, 0)` follows
/// the 2-gon convention and gives 1.
pub fn quiddity_count_3periodic(n: i64, m: i64) -> Result<BigUint> {
    nonnegative("n", n)?;
    nonnegative("m", m)?;
    if m == 0 {
        return Ok(if n == 0 {
            BigUint::one()
        } else {
            BigUint::zero()
        });
    }
    if m > n || (n - m) % 3 != 0 {
        return Ok(BigUint::zero());
    }
    let mut total = BigRational::zero();
    for s in 0..=(n - m) / 3 {
        let weight = BigRational::new(BigInt::from(n - m - 3 * s + 2), BigInt::from(n - s + 1));
        let binoms = BigInt::from(binomial(m + s - 2, s) * binomial(n + m - s - 1, m - 1));
        total += weight * BigRational::from_integer(binoms);
    }
    assert!(
        total.is_integer(),
        "quiddity count at ({n}, {m}) is not an integer: {total}"
    );
    let value = total.to_integer();
    assert!(!value.is_negative());
    Ok(value.magnitude().clone())
}
