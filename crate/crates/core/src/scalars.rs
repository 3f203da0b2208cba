//! Truncated hbar-adic scalars over the rationals and q-combinatorics on q = exp(hbar).

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num::{BigInt, BigRational, One, Zero};

use crate::error::{Error, Result};

/// Exact rational numbers.
pub type Q = BigRational;

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(a: i64, b: i64) -> Q {
    Q::new(BigInt::from(a), BigInt::from(b))
}

pub(crate) fn factorial(k: usize) -> Q {
    let mut acc = BigInt::one();
    for j in 2..=k {
        acc *= BigInt::from(j);
    }
    Q::from_integer(acc)
}

/// Generalized binomial coefficient binom(x, k) for rational x.
pub fn binom_q(x: &Q, k: usize) -> Q {
    let mut acc = Q::one();
    for j in 0..k {
        acc *= x - qi(j as i64);
    }
    acc / factorial(k)
}

pub fn binom_i(n: i64, k: usize) -> Q {
    binom_q(&qi(n), k)
}

/// An element c_0 + c_1 ħ + ... + c_{N-1} ħ^{N-1} of Q[[ħ]]/(ħ^N).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HbarScalar {
    coeffs: Vec<Q>,
}

impl HbarScalar {
    pub fn zero(order: usize) -> Self {
        assert!(order >= 1, "hbar order must be positive");
        HbarScalar {
            coeffs: vec![Q::zero(); order],
        }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Q::one(), order)
    }

    pub fn constant(c: Q, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    pub fn from_int(c: i64, order: usize) -> Self {
        Self::constant(qi(c), order)
    }

    /// c ħ^k, zero when k is past the truncation.
    pub fn monomial(c: Q, k: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if k < order {
            s.coeffs[k] = c;
        }
        s
    }

    pub fn hbar(order: usize) -> Self {
        Self::monomial(Q::one(), 1, order)
    }

    /// Builds from coefficients, padding or truncating to `order`.
    pub fn from_coeffs(mut coeffs: Vec<Q>, order: usize) -> Self {
        coeffs.resize(order, Q::zero());
        HbarScalar { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Q {
        self.coeffs.get(k).cloned().unwrap_or_else(Q::zero)
    }

    pub(crate) fn set_coeff(&mut self, k: usize, c: Q) {
        if k < self.coeffs.len() {
            self.coeffs[k] = c;
        }
    }

    pub fn classical(&self) -> &Q {
        &self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    pub fn is_invertible(&self) -> bool {
        !self.coeffs[0].is_zero()
    }

    /// Lowest ħ-order with nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::from_coeffs(self.coeffs[..order.min(self.order())].to_vec(), order.min(self.order()))
    }

    /// Equality on the common truncation.
    pub fn agrees(&self, other: &Self) -> bool {
        let n = self.order().min(other.order());
        self.coeffs[..n] == other.coeffs[..n]
    }

    pub fn scale(&self, c: &Q) -> Self {
        HbarScalar {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn mul_hbar(&self) -> Self {
        let n = self.order();
        let mut out = Self::zero(n);
        for k in 1..n {
            out.coeffs[k] = self.coeffs[k - 1].clone();
        }
        out
    }

    /// Exact division by ħ; the order drops by one.
    pub fn div_hbar(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::NotDivisible);
        }
        if self.order() < 2 {
            return Err(Error::WindowOverflow {
                needed_m_z: 0,
                needed_n_hbar: 2,
            });
        }
        Ok(HbarScalar {
            coeffs: self.coeffs[1..].to_vec(),
        })
    }

    pub fn inverse(&self) -> Result<Self> {
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(Error::NotInvertible(format!("{self}")));
        }
        let n = self.order();
        let inv0 = a0.recip();
        let mut b = vec![Q::zero(); n];
        b[0] = inv0.clone();
        for m in 1..n {
            let mut acc = Q::zero();
            for k in 1..=m {
                acc += &self.coeffs[k] * &b[m - k];
            }
            b[m] = -acc * &inv0;
        }
        Ok(HbarScalar { coeffs: b })
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut acc = Self::one(self.order());
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    pub fn exp_series(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::NotNilpotent);
        }
        let n = self.order();
        let mut acc = Self::one(n);
        let mut term = Self::one(n);
        for k in 1..n {
            term = (&term * self).scale(&qf(1, k as i64));
            acc += &term;
        }
        Ok(acc)
    }

    pub fn log_series(&self) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(Error::LogDomain);
        }
        let n = self.order();
        let v = self - &Self::one(n);
        let mut acc = Self::zero(n);
        let mut pow = Self::one(n);
        for k in 1..n {
            pow = &pow * &v;
            let c = if k % 2 == 1 { qf(1, k as i64) } else { qf(-1, k as i64) };
            acc += &pow.scale(&c);
        }
        Ok(acc)
    }

    /// Square root of a scalar with constant term 1, principal branch.
    pub fn sqrt_unit(&self) -> Result<Self> {
        self.log_series()?.scale(&qf(1, 2)).exp_series()
    }

    /// Evaluates the truncated polynomial in ħ with ħ replaced by a multiple of ħ.
    pub fn rescale_hbar(&self, c: &Q) -> Self {
        let mut pow = Q::one();
        let mut out = Vec::with_capacity(self.order());
        for a in &self.coeffs {
            out.push(a * &pow);
            pow *= c;
        }
        HbarScalar { coeffs: out }
    }
}

impl fmt::Display for HbarScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c} * ħ^{k}")?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl<'a> Add<&'a HbarScalar> for &'a HbarScalar {
    type Output = HbarScalar;
    fn add(self, rhs: &HbarScalar) -> HbarScalar {
        let n = self.order().min(rhs.order());
        HbarScalar {
            coeffs: (0..n).map(|k| &self.coeffs[k] + &rhs.coeffs[k]).collect(),
        }
    }
}

impl<'a> Sub<&'a HbarScalar> for &'a HbarScalar {
    type Output = HbarScalar;
    fn sub(self, rhs: &HbarScalar) -> HbarScalar {
        let n = self.order().min(rhs.order());
        HbarScalar {
            coeffs: (0..n).map(|k| &self.coeffs[k] - &rhs.coeffs[k]).collect(),
        }
    }
}

impl<'a> Mul<&'a HbarScalar> for &'a HbarScalar {
    type Output = HbarScalar;
    fn mul(self, rhs: &HbarScalar) -> HbarScalar {
        let n = self.order().min(rhs.order());
        let mut out = vec![Q::zero(); n];
        for (i, a) in self.coeffs[..n].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs[..n - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        HbarScalar { coeffs: out }
    }
}

impl Neg for &HbarScalar {
    type Output = HbarScalar;
    fn neg(self) -> HbarScalar {
        HbarScalar {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for HbarScalar {
    type Output = HbarScalar;
    fn neg(self) -> HbarScalar {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<HbarScalar> for HbarScalar {
            type Output = HbarScalar;
            fn $m(self, rhs: HbarScalar) -> HbarScalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a HbarScalar> for HbarScalar {
            type Output = HbarScalar;
            fn $m(self, rhs: &HbarScalar) -> HbarScalar {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl AddAssign<&HbarScalar> for HbarScalar {
    fn add_assign(&mut self, rhs: &HbarScalar) {
        let n = self.order().min(rhs.order());
        self.coeffs.truncate(n);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl SubAssign<&HbarScalar> for HbarScalar {
    fn sub_assign(&mut self, rhs: &HbarScalar) {
        let n = self.order().min(rhs.order());
        self.coeffs.truncate(n);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
    }
}

impl MulAssign<&HbarScalar> for HbarScalar {
    fn mul_assign(&mut self, rhs: &HbarScalar) {
        *self = &*self * rhs;
    }
}

/// q^x = exp(x ħ).
pub fn q_pow(x: &Q, order: usize) -> HbarScalar {
    let mut coeffs = Vec::with_capacity(order);
    let mut pow = Q::one();
    for k in 0..order {
        coeffs.push(&pow / factorial(k));
        pow *= x;
    }
    HbarScalar::from_coeffs(coeffs, order)
}

/// sinh(xħ)/ħ, the hbar-divided numerator shared by q-integers and F.
fn sinh_over_hbar(x: &Q, order: usize) -> HbarScalar {
    let mut coeffs = vec![Q::zero(); order];
    for (k, c) in coeffs.iter_mut().enumerate() {
        if k % 2 == 0 {
            *c = x.pow((k + 1) as i32) / factorial(k + 1);
        }
    }
    HbarScalar::from_coeffs(coeffs, order)
}

/// [x]_{q^r} = (q^{rx} - q^{-rx}) / (q^r - q^{-r}) for rational x and r != 0.
pub fn q_int_base(x: &Q, r: &Q, order: usize) -> HbarScalar {
    assert!(!r.is_zero(), "q-integer base exponent must be nonzero");
    let num = sinh_over_hbar(&(x * r), order);
    let den = sinh_over_hbar(r, order);
    &num * &den.inverse().expect("sinh quotient has unit constant term")
}

/// [x]_q for rational x.
pub fn q_int_rational(x: &Q, order: usize) -> HbarScalar {
    q_int_base(x, &Q::one(), order)
}

/// [m]_q = (q^m - q^{-m}) / (q - q^{-1}).
pub fn q_int(m: i64, order: usize) -> HbarScalar {
    q_int_rational(&qi(m), order)
}

pub fn q_factorial(n: i64, r: i64, order: usize) -> HbarScalar {
    let mut acc = HbarScalar::one(order);
    for m in 1..=n {
        acc = &acc * &q_int_base(&qi(m), &qi(r), order);
    }
    acc
}

/// q-binomial in base q_i = q^{r_i}.
pub fn q_binom(n: i64, k: i64, r_i: i64, order: usize) -> Result<HbarScalar> {
    if k < 0 || k > n {
        return Err(Error::InvalidConfig(format!("q_binom needs 0 <= k <= n, got n={n}, k={k}")));
    }
    let den = &q_factorial(k, r_i, order) * &q_factorial(n - k, r_i, order);
    Ok(&q_factorial(n, r_i, order) * &den.inverse()?)
}

/// F(x) = (q^x - q^{-x}) / x, with F(0) = 2ħ.
pub fn f_scalar(x: &Q, order: usize) -> HbarScalar {
    let mut coeffs = vec![Q::zero(); order];
    for (k, c) in coeffs.iter_mut().enumerate() {
        if k % 2 == 1 {
            *c = qi(2) * x.pow((k - 1) as i32) / factorial(k);
        }
    }
    HbarScalar::from_coeffs(coeffs, order)
}

/// u(x) with F(x) = 2ħ u(x); constant term 1.
pub fn f_unit(x: &Q, order: usize) -> HbarScalar {
    let mut coeffs = vec![Q::zero(); order];
    for (k, c) in coeffs.iter_mut().enumerate() {
        if k % 2 == 0 {
            *c = x.pow(k as i32) / factorial(k + 1);
        }
    }
    HbarScalar::from_coeffs(coeffs, order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[i64], n: usize) -> HbarScalar {
        HbarScalar::from_coeffs(v.iter().map(|&c| qi(c)).collect(), n)
    }

    #[test]
    fn exp_of_hbar_is_taylor() {
        let e = HbarScalar::hbar(6).exp_series().unwrap();
        for k in 0..6 {
            assert_eq!(e.coeff(k), factorial(k).recip());
        }
        assert!(HbarScalar::zero(6).exp_series().unwrap().is_one());
        assert_eq!(e.log_series().unwrap(), HbarScalar::hbar(6));
    }

    #[test]
    fn exp_rejects_unit() {
        assert_eq!(HbarScalar::one(4).exp_series(), Err(Error::NotNilpotent));
        assert_eq!(HbarScalar::from_int(2, 4).log_series(), Err(Error::LogDomain));
    }

    #[test]
    fn mercator() {
        let l = s(&[1, 1], 6).log_series().unwrap();
        for k in 1..6 {
            let sign = if k % 2 == 1 { 1 } else { -1 };
            assert_eq!(l.coeff(k), qf(sign, k as i64));
        }
        assert!(HbarScalar::one(6).log_series().unwrap().is_zero());
        let u = s(&[1, 1, 1], 6);
        assert_eq!(u.log_series().unwrap().exp_series().unwrap(), u);
    }

    #[test]
    fn q_int_two_matches_q_plus_q_inverse() {
        let n = 6;
        let q = HbarScalar::hbar(n).exp_series().unwrap();
        let qinv = (-HbarScalar::hbar(n)).exp_series().unwrap();
        assert_eq!(q_int(2, n), &q + &qinv);
        assert_eq!(q_int(2, n).coeff(2), qi(1));
        assert_eq!(q_int(2, n).coeff(4), qf(1, 12));
        assert!(q_int(1, n).is_one());
        assert!(q_int(0, n).is_zero());
    }

    #[test]
    fn q_int_odd_and_classical() {
        for m in -5..=5 {
            assert_eq!(q_int(-m, 7), -q_int(m, 7));
            assert_eq!(*q_int(m, 7).classical(), qi(m));
        }
    }

    #[test]
    fn q_binom_small() {
        assert_eq!(q_binom(2, 1, 1, 6).unwrap(), q_int(2, 6));
        assert!(q_binom(3, 0, 2, 6).unwrap().is_one());
        assert_eq!(*q_binom(4, 2, 1, 6).unwrap().classical(), qi(6));
        assert!(q_binom(2, 3, 1, 6).is_err());
    }

    #[test]
    fn f_scalar_values() {
        assert_eq!(f_scalar(&qi(0), 6), s(&[0, 2], 6));
        let x = qi(3);
        let direct = &q_pow(&x, 7) - &q_pow(&-x.clone(), 7);
        assert_eq!(f_scalar(&x, 7), direct.scale(&x.recip()));
        assert_eq!(f_scalar(&x, 7), f_unit(&x, 7).mul_hbar().scale(&qi(2)));
    }

    #[test]
    fn div_hbar_lowers_order() {
        let a = s(&[0, 3, 1], 4);
        assert_eq!(a.div_hbar().unwrap(), s(&[3, 1, 0], 3));
        assert_eq!(s(&[1], 3).div_hbar(), Err(Error::NotDivisible));
    }

    #[test]
    fn generalized_binomial() {
        assert_eq!(binom_i(-1, 3), qi(-1));
        assert_eq!(binom_i(5, 2), qi(10));
        assert_eq!(binom_q(&qf(1, 2), 2), qf(-1, 8));
    }
}
