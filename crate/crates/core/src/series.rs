//! Truncated bivariate power series in `z` and `w` over the integers, a fixed-point
//! solver for the dissection functional equations, and Lagrange inversion.
//!
//! [`BivariateSeries`] stores only monomials `z^n w^m` with `m <= n <= order`; every
//! series the equations produce lives in that triangle because each cell contributes at
//! least one power of `z`.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BivariateSeries {
    order: usize,
    /// `coeffs[n][m]` is the coefficient of `z^n w^m`.
    coeffs: Vec<Vec<BigInt>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeriesTerm {
    pub n: usize,
    pub m: usize,
    pub coeff: String,
}

impl BivariateSeries {
    pub fn zero(order: usize) -> Self {
        Self {
            order,
            coeffs: (0..=order).map(|n| vec![BigInt::zero(); n + 1]).collect(),
        }
    }

    pub fn one(order: usize) -> Self {
        Self::monomial(order, 0, 0, BigInt::one())
    }

    /// `coeff * z^n w^m`, or zero if the monomial lies beyond the truncation.
    pub fn monomial(order: usize, n: usize, m: usize, coeff: BigInt) -> Self {
        assert!(
            m <= n,
            "monomial z^{n} w^{m} lies outside the stored triangle"
        );
        let mut s = Self::zero(order);
        if n <= order {
            s.coeffs[n][m] = coeff;
        }
        s
    }

    /// Builds a series from `(n, m, coeff)` triples; later entries overwrite earlier ones.
    pub fn from_terms(
        order: usize,
        terms: impl IntoIterator<Item = (usize, usize, BigInt)>,
    ) -> Self {
        let mut s = Self::zero(order);
        for (n, m, c) in terms {
            assert!(m <= n);
            if n <= order {
                s.coeffs[n][m] = c;
            }
        }
        s
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coefficient(&self, n: usize, m: usize) -> Result<BigInt> {
        if n > self.order || m > n {
            return Err(Error::InvalidArgument(format!(
                "coefficient ({n}, {m}) outside 0 <= m <= n <= {}",
                self.order
            )));
        }
        Ok(self.coeffs[n][m].clone())
    }

    /// `[z^n]` as a dense polynomial in `w`.
    pub fn z_slice(&self, n: usize) -> &[BigInt] {
        &self.coeffs[n]
    }

    pub fn terms(&self) -> Vec<SeriesTerm> {
        self.coeffs
            .iter()
            .enumerate()
            .flat_map(|(n, row)| {
                row.iter().enumerate().map(move |(m, c)| SeriesTerm {
                    n,
                    m,
                    coeff: c.to_string(),
                })
            })
            .collect()
    }

    fn same_order(&self, other: &Self) {
        assert_eq!(
            self.order, other.order,
            "series truncated at different orders"
        );
    }

    /// Smallest `n` with a nonzero `[z^n]`, or `None` for the zero series.
    pub fn z_valuation(&self) -> Option<usize> {
        self.coeffs
            .iter()
            .position(|row| row.iter().any(|c| !c.is_zero()))
    }

    /// Multiplies by `z^k w^j`.
    pub fn shift(&self, k: usize, j: usize) -> Self {
        assert!(j <= k, "shift by z^{k} w^{j} leaves the stored triangle");
        let mut out = Self::zero(self.order);
        for n in 0..=self.order.saturating_sub(k) {
            if n + k > self.order {
                break;
            }
            for (m, c) in self.coeffs[n].iter().enumerate() {
                out.coeffs[n + k][m + j] = c.clone();
            }
        }
        out
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self {
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .map(|r| r.iter().map(|x| x * c).collect())
                .collect(),
        }
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::one(self.order);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// `1 / (1 - x) = 1 + x + x^2 + ...` for `x` without constant term.
    pub fn geometric(x: &Self) -> Self {
        assert!(
            x.coeffs[0][0].is_zero(),
            "geometric series needs a zero constant term"
        );
        let Some(v) = x.z_valuation() else {
            return Self::one(x.order);
        };
        let mut acc = Self::one(x.order);
        // Horner: every pass fixes v more orders in z.
        for _ in 0..x.order.div_ceil(v) {
            acc = &Self::one(x.order) + &(x * &acc);
        }
        acc
    }
}

impl Add for &BivariateSeries {
    type Output = BivariateSeries;
    fn add(self, rhs: &BivariateSeries) -> BivariateSeries {
        self.same_order(rhs);
        BivariateSeries {
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
                .collect(),
        }
    }
}

impl Sub for &BivariateSeries {
    type Output = BivariateSeries;
    fn sub(self, rhs: &BivariateSeries) -> BivariateSeries {
        self.same_order(rhs);
        BivariateSeries {
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
                .collect(),
        }
    }
}

impl Mul for &BivariateSeries {
    type Output = BivariateSeries;
    fn mul(self, rhs: &BivariateSeries) -> BivariateSeries {
        self.same_order(rhs);
        let mut out = BivariateSeries::zero(self.order);
        for (n1, a) in self.coeffs.iter().enumerate() {
            for (m1, x) in a.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (n2, b) in rhs.coeffs[..=self.order - n1].iter().enumerate() {
                    let row = &mut out.coeffs[n1 + n2];
                    for (m2, y) in b.iter().enumerate() {
                        if !y.is_zero() {
                            row[m1 + m2] += x * y;
                        }
                    }
                }
            }
        }
        out
    }
}

/// The functional equations `S = F(S)` solved by [`solve_fixed_point`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EquationSpec {
    /// `C = 1 + z C^2`, carried at `w^0`.
    Catalan,
    /// `D = 1 + w z D^2 / (1 - z D)`.
    KirkmanCayley,
    /// `L = 1 + w z L^2 / (1 - z^ell L^ell)`.
    EllPeriodic(usize),
    /// `D = 1 + w z D^2 + w z^2 D^3`.
    TriQuad,
    /// `P = 1 + w z P^2 / (1 - z^3 P^2)`.
    P,
}

impl fmt::Display for EquationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EquationSpec::Catalan => f.write_str("catalan"),
            EquationSpec::KirkmanCayley => f.write_str("kirkman-cayley"),
            EquationSpec::EllPeriodic(l) => write!(f, "ell-periodic({l})"),
            EquationSpec::TriQuad => f.write_str("tri-quad"),
            EquationSpec::P => f.write_str("p"),
        }
    }
}

impl EquationSpec {
    /// Evaluates the right-hand side `F(s)`.
    pub fn apply(&self, s: &BivariateSeries) -> BivariateSeries {
        let order = s.order();
        let one = BivariateSeries::one(order);
        let s2 = s * s;
        match *self {
            EquationSpec::Catalan => &one + &s2.shift(1, 0),
            EquationSpec::KirkmanCayley => {
                let denom = BivariateSeries::geometric(&s.shift(1, 0));
                &one + &(&s2.shift(1, 1) * &denom)
            }
            EquationSpec::EllPeriodic(ell) => {
                assert!(ell >= 1, "ell must be at least 1");
                let denom = BivariateSeries::geometric(&s.pow(ell).shift(ell, 0));
                &one + &(&s2.shift(1, 1) * &denom)
            }
            EquationSpec::TriQuad => {
                let s3 = &s2 * s;
                &(&one + &s2.shift(1, 1)) + &s3.shift(2, 1)
            }
            EquationSpec::P => {
                let denom = BivariateSeries::geometric(&s2.shift(3, 0));
                &one + &(&s2.shift(1, 1) * &denom)
            }
        }
    }
}

/// Iterates `S <- F(S)` from `S = 1`; each pass fixes at least one more order in `z`.
pub fn solve_fixed_point(spec: EquationSpec, max_z_order: usize) -> Result<BivariateSeries> {
    if let EquationSpec::EllPeriodic(0) = spec {
        return Err(Error::InvalidArgument("ell must be at least 1".into()));
    }
    let mut s = BivariateSeries::one(max_z_order);
    for _ in 0..=max_z_order {
        s = spec.apply(&s);
    }
    let again = spec.apply(&s);
    if again != s {
        return Err(Error::NonConvergence(format!(
            "{spec} at order {max_z_order}"
        )));
    }
    Ok(s)
}

/// `Q = 1 + w z P^2 / (1 - z^3 P^3)`, where `P` must solve [`EquationSpec::P`] at its
/// own truncation order.
pub fn compose_q(p: &BivariateSeries) -> Result<BivariateSeries> {
    if &EquationSpec::P.apply(p) != p {
        return Err(Error::InvalidArgument(format!(
            "argument does not solve the P equation at order {}",
            p.order()
        )));
    }
    let order = p.order();
    let p2 = p * p;
    let p3 = &p2 * p;
    let denom = BivariateSeries::geometric(&p3.shift(3, 0));
    Ok(&BivariateSeries::one(order) + &(&p2.shift(1, 1) * &denom))
}

/// Dense polynomial in `w`; trailing zeros are not significant.
pub type WPoly = Vec<BigInt>;

fn poly_trim(mut p: WPoly) -> WPoly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> WPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    poly_trim(out)
}

fn poly_add(a: &[BigInt], b: &[BigInt]) -> WPoly {
    let mut out = vec![BigInt::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] += y;
    }
    poly_trim(out)
}

/// Truncated power series in one variable `y` with coefficients in `Z[w]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct YSeries {
    order: usize,
    coeffs: Vec<WPoly>,
}

impl YSeries {
    pub fn from_coeffs(order: usize, coeffs: impl IntoIterator<Item = WPoly>) -> Self {
        let mut c: Vec<WPoly> = coeffs.into_iter().take(order + 1).map(poly_trim).collect();
        c.resize(order + 1, Vec::new());
        Self { order, coeffs: c }
    }

    pub fn one(order: usize) -> Self {
        Self::from_coeffs(order, [vec![BigInt::one()]])
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coefficient(&self, k: usize) -> &[BigInt] {
        &self.coeffs[k]
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.order, other.order);
        let mut out = vec![Vec::new(); self.order + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs[..=self.order - i].iter().enumerate() {
                out[i + j] = poly_add(&out[i + j], &poly_mul(a, b));
            }
        }
        Self {
            order: self.order,
            coeffs: out,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.order, other.order);
        Self {
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| poly_add(a, b))
                .collect(),
        }
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::one(self.order);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }
}

/// `phi(y) = 1 + w y / (1 - y - w y)`, whose inversion gives `y = z D(z, w)`.
pub fn kirkman_cayley_phi(order: usize) -> YSeries {
    // w y * sum_k (1 + w)^k y^k
    let mut coeffs = vec![vec![BigInt::one()]];
    let mut binom_row: WPoly = vec![BigInt::one()];
    for _k in 1..=order {
        coeffs.push(
            std::iter::once(BigInt::zero())
                .chain(binom_row.iter().cloned())
                .collect(),
        );
        binom_row = poly_mul(&binom_row, &[BigInt::one(), BigInt::one()]);
    }
    YSeries::from_coeffs(order, coeffs)
}

/// `phi(y) = 1 / (1 - y)`, whose inversion gives `y = z C(z)`.
pub fn catalan_phi(order: usize) -> YSeries {
    YSeries::from_coeffs(order, (0..=order).map(|_| vec![BigInt::one()]))
}

/// `[z^n] y` for the series `y(z)` solving `z = y / phi(y)`, computed as
/// `[y^(n-1)] phi^n / n`.
pub fn lagrange_invert(phi: &YSeries, n: usize) -> Result<WPoly> {
    if n < 1 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if phi.coefficient(0).is_empty() {
        return Err(Error::InvalidArgument(
            "phi must have a nonzero constant term".into(),
        ));
    }
    if phi.order() + 1 < n {
        return Err(Error::InvalidArgument(format!(
            "phi is known to order {} but order {} is needed",
            phi.order(),
            n - 1
        )));
    }
    let trunc = YSeries::from_coeffs(n - 1, phi.coeffs.iter().cloned());
    let power = trunc.pow(n);
    let divisor = BigInt::from(n);
    Ok(power
        .coefficient(n - 1)
        .iter()
        .map(|c| {
            let (q, r) = c.div_rem(&divisor);
            assert!(r.is_zero(), "Lagrange coefficient {c} not divisible by {n}");
            q
        })
        .collect())
}
