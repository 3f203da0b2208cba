use std::fmt;

use num::{One, Zero};

use crate::error::Result;
use crate::scalars::{qi, HbarScalar, Q};
use crate::series::laurent::{LaurentSeries, Var};

/// Polynomial Σ c_k w^k with ħ-adic coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<HbarScalar>,
    n_hbar: usize,
}

impl Poly {
    pub fn new(coeffs: Vec<HbarScalar>, n_hbar: usize) -> Self {
        let mut p = Poly {
            coeffs: coeffs.into_iter().map(|c| c.truncate(n_hbar)).collect(),
            n_hbar,
        };
        p.trim();
        p
    }

    pub fn from_rationals(coeffs: Vec<Q>, n_hbar: usize) -> Self {
        Self::new(
            coeffs
                .into_iter()
                .map(|c| HbarScalar::constant(c, n_hbar))
                .collect(),
            n_hbar,
        )
    }

    pub fn from_ints(coeffs: &[i64], n_hbar: usize) -> Self {
        Self::from_rationals(coeffs.iter().map(|&c| qi(c)).collect(), n_hbar)
    }

    pub fn constant(c: HbarScalar) -> Self {
        let n = c.order();
        Self::new(vec![c], n)
    }

    pub fn one(n_hbar: usize) -> Self {
        Self::constant(HbarScalar::one(n_hbar))
    }

    pub fn zero(n_hbar: usize) -> Self {
        Self::new(Vec::new(), n_hbar)
    }

    /// c w^k.
    pub fn monomial(c: HbarScalar, k: usize) -> Self {
        let n = c.order();
        let mut cs = vec![HbarScalar::zero(n); k];
        cs.push(c);
        Self::new(cs, n)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn n_hbar(&self) -> usize {
        self.n_hbar
    }

    pub fn coeffs(&self) -> &[HbarScalar] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> HbarScalar {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| HbarScalar::zero(self.n_hbar))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&HbarScalar> {
        self.coeffs.last()
    }

    /// Order of vanishing at w = 0.
    pub fn low_degree(&self) -> usize {
        self.coeffs.iter().position(|c| !c.is_zero()).unwrap_or(0)
    }

    pub fn is_classical(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.coeffs()[1..].iter().all(|x| x.is_zero()))
    }

    pub fn classical_part(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .map(|c| HbarScalar::constant(c.classical().clone(), self.n_hbar))
                .collect(),
            self.n_hbar,
        )
    }

    /// Coefficients of ħ^k as a classical polynomial.
    pub fn hbar_component(&self, k: usize) -> Vec<Q> {
        trim_q(self.coeffs.iter().map(|c| c.coeff(k)).collect())
    }

    /// Reassembles from the ħ-components.
    pub fn from_components(parts: &[Vec<Q>], n_hbar: usize) -> Self {
        let len = parts.iter().map(|p| p.len()).max().unwrap_or(0);
        let cs = (0..len)
            .map(|d| {
                HbarScalar::from_coeffs(
                    (0..n_hbar)
                        .map(|k| parts.get(k).and_then(|p| p.get(d)).cloned().unwrap_or_else(Q::zero))
                        .collect(),
                    n_hbar,
                )
            })
            .collect();
        Self::new(cs, n_hbar)
    }

    /// Exact division by a classical polynomial, component by component.
    pub fn div_classical(&self, g: &[Q]) -> Self {
        let parts: Vec<Vec<Q>> = (0..self.n_hbar)
            .map(|k| divrem_q(&self.hbar_component(k), g).0)
            .collect();
        Self::from_components(&parts, self.n_hbar)
    }

    pub fn classical_coeffs(&self) -> Vec<Q> {
        self.coeffs.iter().map(|c| c.classical().clone()).collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.n_hbar.min(other.n_hbar);
        let len = self.coeffs.len().max(other.coeffs.len());
        Self::new(
            (0..len)
                .map(|k| (&self.coeff(k) + &other.coeff(k)).truncate(n))
                .collect(),
            n,
        )
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| -c).collect(), self.n_hbar)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n_hbar.min(other.n_hbar);
        if self.is_zero() || other.is_zero() {
            return Self::zero(n);
        }
        let mut cs = vec![HbarScalar::zero(n); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                cs[i + j] += &(a * b);
            }
        }
        Self::new(cs, n)
    }

    pub fn scale(&self, c: &HbarScalar) -> Self {
        let n = self.n_hbar.min(c.order());
        Self::new(self.coeffs.iter().map(|x| x * c).collect(), n)
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::one(self.n_hbar);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.scale(&qi(k as i64)))
                .collect(),
            self.n_hbar,
        )
    }

    /// w d/dw.
    pub fn euler(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c.scale(&qi(k as i64)))
                .collect(),
            self.n_hbar,
        )
    }

    /// w -> c w.
    pub fn scale_var(&self, c: &HbarScalar) -> Self {
        let mut pow = HbarScalar::one(self.n_hbar);
        let mut cs = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            cs.push(a * &pow);
            pow = &pow * c;
        }
        Self::new(cs, self.n_hbar.min(c.order()))
    }

    /// w^d p(1/w) for d >= degree.
    pub fn reversed(&self, d: usize) -> Self {
        let mut cs = vec![HbarScalar::zero(self.n_hbar); d + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            cs[d - k] = c.clone();
        }
        Self::new(cs, self.n_hbar)
    }

    pub fn eval(&self, x: &HbarScalar) -> HbarScalar {
        let mut acc = HbarScalar::zero(self.n_hbar.min(x.order()));
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    /// Composition p(s) for a series s.
    pub fn eval_series(&self, s: &LaurentSeries) -> LaurentSeries {
        let mut acc = LaurentSeries::zero(s.var(), self.n_hbar.min(s.n_hbar()));
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * s) + &LaurentSeries::constant(s.var(), c.clone());
        }
        acc
    }

    /// The polynomial as an exact series in `var`.
    pub fn to_series(&self, var: Var) -> LaurentSeries {
        LaurentSeries::new(var, 0, self.coeffs.clone(), None, self.n_hbar)
    }

    /// Divides out the leading coefficient when it is a unit; returns the factor.
    pub fn make_monic(&self) -> Result<(Self, HbarScalar)> {
        let lead = self.coeffs.last().cloned().unwrap_or_else(|| HbarScalar::one(self.n_hbar));
        let inv = lead.inverse()?;
        Ok((self.scale(&inv), lead))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| format!("({c}) w^{k}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Classical polynomial division over Q: (quotient, remainder).
pub fn divrem_q(a: &[Q], b: &[Q]) -> (Vec<Q>, Vec<Q>) {
    let b = trim_q(b.to_vec());
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut r = trim_q(a.to_vec());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut quot = vec![Q::zero(); r.len() - b.len() + 1];
    let lead = b.last().unwrap().clone();
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let c = r.last().unwrap() / &lead;
        for (k, bk) in b.iter().enumerate() {
            r[shift + k] -= &c * bk;
        }
        quot[shift] = c;
        r.pop();
        r = trim_q(r);
    }
    (trim_q(quot), r)
}

pub fn trim_q(mut v: Vec<Q>) -> Vec<Q> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

/// Monic gcd over Q.
pub fn gcd_q(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut x = trim_q(a.to_vec());
    let mut y = trim_q(b.to_vec());
    while !y.is_empty() {
        let (_, r) = divrem_q(&x, &y);
        x = y;
        y = r;
    }
    if let Some(l) = x.last().cloned() {
        for c in &mut x {
            *c /= &l;
        }
    }
    if x.is_empty() {
        x.push(Q::one());
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gcd_of_shared_factor() {
        let a = vec![qi(-1), qi(0), qi(1)];
        let b = vec![qi(-1), qi(1)];
        assert_eq!(gcd_q(&a, &b), vec![qi(-1), qi(1)]);
        let (q, r) = divrem_q(&a, &b);
        assert_eq!(q, vec![qi(1), qi(1)]);
        assert!(r.is_empty());
    }

    #[test]
    fn reverse_and_scale() {
        let p = Poly::from_ints(&[1, 2, 3], 3);
        assert_eq!(p.reversed(2), Poly::from_ints(&[3, 2, 1], 3));
        assert_eq!(p.scale_var(&HbarScalar::from_int(2, 3)), Poly::from_ints(&[1, 4, 12], 3));
        assert_eq!(p.euler(), Poly::from_ints(&[0, 2, 6], 3));
    }
}
