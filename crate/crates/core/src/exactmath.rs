//! Exact rational arithmetic and fraction-preserving linear solves.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("cannot parse rational from {0:?}")]
    Parse(String),
}

/// Canonical fraction `p/q` with `q > 0` and `gcd(|p|, q) = 1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self, ExactError> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(ExactError::ZeroDenominator);
        }
        Ok(Rational(BigRational::new(numer.into(), denom)))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Rational(self.0.recip()))
        }
    }

    /// Renders as a mixed number, e.g. `34 1/13` or `-1 1/2`. Integers and
    /// proper fractions render as in [`Display`](fmt::Display).
    pub fn to_mixed_string(&self) -> String {
        if self.is_integer() {
            return self.to_string();
        }
        let numer = self.numer().abs();
        let (whole, rem) = numer.div_rem(self.denom());
        let sign = if self.is_negative() { "-" } else { "" };
        if whole.is_zero() {
            format!("{sign}{rem}/{}", self.denom())
        } else {
            format!("{sign}{whole} {rem}/{}", self.denom())
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Rational {
    type Err = ExactError;

    /// Accepts `n`, `p/q` and the mixed form `w r/q`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ExactError::Parse(s.to_string());
        let trimmed = s.trim();
        if let Some((whole, frac)) = trimmed.split_once(' ') {
            let whole: BigInt = whole.parse().map_err(|_| err())?;
            let frac: Rational = frac.trim().parse()?;
            if frac.is_negative() || frac >= Rational::one() {
                return Err(err());
            }
            let frac = if whole.is_negative() || trimmed.starts_with('-') { -frac } else { frac };
            return Ok(Rational::from_integer(whole) + frac);
        }
        match trimmed.split_once('/') {
            Some((p, q)) => {
                let p: BigInt = p.trim().parse().map_err(|_| err())?;
                let q: BigInt = q.trim().parse().map_err(|_| err())?;
                Rational::new(p, q)
            }
            None => Ok(Rational::from_integer(trimmed.parse::<BigInt>().map_err(|_| err())?)),
        }
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<u64> for Rational {
    fn from(n: u64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<i32> for Rational {
    fn from(n: i32) -> Self {
        Rational::from_integer(n)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $tr<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl<'a> $tr<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

/// Panics on division by zero, like the integer types. Use
/// [`Rational::recip`] where the divisor can be zero.
impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero rational");
        Rational(self.0 / rhs.0)
    }
}

impl<'a> Div<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn div(self, rhs: &'a Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero rational");
        Rational(&self.0 / &rhs.0)
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        self.0 += rhs.0;
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> std::iter::Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct RationalVisitor;

        impl Visitor<'_> for RationalVisitor {
            type Value = Rational;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a rational string such as \"3\" or \"1/2\"")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rational, E> {
                Ok(Rational::from(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rational, E> {
                Ok(Rational::from(v))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Rational, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(RationalVisitor)
    }
}

/// Square system `a·x = b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSystem {
    a: Vec<Vec<Rational>>,
    b: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("system is not square: {rows} rows, row {row} has {len} coefficients, {rhs} right-hand sides")]
    NotSquare { rows: usize, row: usize, len: usize, rhs: usize },
    #[error("singular matrix: rank {rank} < {size}, system has infinitely many solutions")]
    Singular { rank: usize, size: usize },
    #[error("inconsistent system: no solution exists")]
    Inconsistent,
}

impl LinearSystem {
    pub fn new(a: Vec<Vec<Rational>>, b: Vec<Rational>) -> Result<Self, SolveError> {
        let rows = a.len();
        for (row, coeffs) in a.iter().enumerate() {
            if coeffs.len() != rows {
                return Err(SolveError::NotSquare { rows, row, len: coeffs.len(), rhs: b.len() });
            }
        }
        if b.len() != rows {
            return Err(SolveError::NotSquare { rows, row: 0, len: rows, rhs: b.len() });
        }
        Ok(LinearSystem { a, b })
    }

    /// Integer coefficients convenience constructor.
    pub fn from_integers(a: &[Vec<i64>], b: &[i64]) -> Result<Self, SolveError> {
        LinearSystem::new(
            a.iter().map(|row| row.iter().map(|&v| Rational::from(v)).collect()).collect(),
            b.iter().map(|&v| Rational::from(v)).collect(),
        )
    }

    pub fn size(&self) -> usize {
        self.b.len()
    }

    pub fn coefficients(&self) -> &[Vec<Rational>] {
        &self.a
    }

    pub fn rhs(&self) -> &[Rational] {
        &self.b
    }

    /// `a·x − b`, computed directly.
    pub fn residual(&self, x: &[Rational]) -> Vec<Rational> {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(row, rhs)| row.iter().zip(x).map(|(c, v)| c * v).sum::<Rational>() - rhs)
            .collect()
    }
}

impl fmt::Display for LinearSystem {
    /// One equation per line, `1x_1 - 11x_2 - 10x_3 = -10` style.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (row, rhs) in self.a.iter().zip(&self.b) {
            writeln!(f, "{} = {}", render_linear_form(row, None), rhs)?;
        }
        Ok(())
    }
}

/// Renders `Σ c_j x_{j+1} (+ constant)` skipping zero terms.
pub fn render_linear_form(coeffs: &[Rational], constant: Option<&Rational>) -> String {
    let vars: Vec<usize> = (1..=coeffs.len()).collect();
    render_linear_form_over(coeffs, &vars, constant)
}

/// Like [`render_linear_form`], with `coeffs[j]` multiplying `x_{vars[j]}`.
pub fn render_linear_form_over(coeffs: &[Rational], vars: &[usize], constant: Option<&Rational>) -> String {
    let mut out = String::new();
    let mut push = |negative: bool, body: String| {
        if out.is_empty() {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        out.push_str(&body);
    };
    for (c, var) in coeffs.iter().zip(vars) {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        let body = if mag == Rational::one() { format!("x_{var}") } else { format!("{mag}x_{var}") };
        push(c.is_negative(), body);
    }
    if let Some(k) = constant {
        if !k.is_zero() {
            push(k.is_negative(), k.abs().to_string());
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Gauss-Jordan elimination on the augmented matrix. The pivot is the first
/// nonzero entry in row order below the current row.
pub fn solve_linear_system(system: &LinearSystem) -> Result<Vec<Rational>, SolveError> {
    let n = system.size();
    let mut aug: Vec<Vec<Rational>> = system
        .a
        .iter()
        .zip(&system.b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();

    let mut rank = 0;
    let mut pivot_cols = Vec::with_capacity(n);
    for col in 0..n {
        let Some(p) = (rank..n).find(|&r| !aug[r][col].is_zero()) else {
            continue;
        };
        aug.swap(rank, p);
        let inv = aug[rank][col].recip().expect("pivot is nonzero");
        for v in aug[rank].iter_mut() {
            *v = &*v * &inv;
        }
        let pivot_row = aug[rank].clone();
        for (r, row) in aug.iter_mut().enumerate() {
            if r == rank || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v = &*v - &(&factor * pv);
            }
        }
        pivot_cols.push(col);
        rank += 1;
    }

    if rank < n {
        // Rows past the rank have an all-zero coefficient part.
        if aug[rank..].iter().any(|row| !row[n].is_zero()) {
            return Err(SolveError::Inconsistent);
        }
        return Err(SolveError::Singular { rank, size: n });
    }

    let mut x = vec![Rational::zero(); n];
    for (r, &col) in pivot_cols.iter().enumerate() {
        x[col] = aug[r][n].clone();
    }
    Ok(x)
}
