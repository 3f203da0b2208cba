use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::integer::Integer;
use num::{BigInt, One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalars::{factorial, qi, HbarScalar, Q};

/// Tag of the formal variable; `inverted` marks expansions in the reciprocal variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Var {
    pub name: &'static str,
    pub inverted: bool,
}

impl Var {
    pub const fn new(name: &'static str) -> Self {
        Var {
            name,
            inverted: false,
        }
    }

    pub fn reciprocal(self) -> Self {
        Var {
            name: self.name,
            inverted: !self.inverted,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverted {
            write!(f, "(1/{})", self.name)
        } else {
            write!(f, "{}", self.name)
        }
    }
}

pub const Z: Var = Var::new("z");
pub const W: Var = Var::new("w");
pub const X: Var = Var::new("x");

pub(crate) fn prec_min(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (None, p) | (p, None) => p,
        (Some(x), Some(y)) => Some(x.min(y)),
    }
}

/// First coefficient where two series disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub z_exp: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z2_exp: Option<i64>,
    pub hbar_exp: usize,
    pub left: String,
    pub right: String,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.z2_exp {
            Some(b) => write!(
                f,
                "z1^{} z2^{} ħ^{}: {} vs {}",
                self.z_exp, b, self.hbar_exp, self.left, self.right
            ),
            None => write!(
                f,
                "z^{} ħ^{}: {} vs {}",
                self.z_exp, self.hbar_exp, self.left, self.right
            ),
        }
    }
}

/// Truncated element of Q((z))[[ħ]].
///
/// Each ħ-order k carries its own precision: the ħ^k coefficients are known for exponents
/// below `precs[k]`, and `None` means that order is exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentSeries {
    var: Var,
    lo: i64,
    precs: Vec<Option<i64>>,
    coeffs: Vec<HbarScalar>,
    n_hbar: usize,
}

impl LaurentSeries {
    pub fn zero(var: Var, n_hbar: usize) -> Self {
        LaurentSeries {
            var,
            lo: 0,
            precs: vec![None; n_hbar],
            coeffs: Vec::new(),
            n_hbar,
        }
    }

    pub fn one(var: Var, n_hbar: usize) -> Self {
        Self::monomial(var, HbarScalar::one(n_hbar), 0)
    }

    pub fn constant(var: Var, c: HbarScalar) -> Self {
        Self::monomial(var, c, 0)
    }

    pub fn monomial(var: Var, c: HbarScalar, e: i64) -> Self {
        let n = c.order();
        Self::new(var, e, vec![c], None, n)
    }

    /// c z^e with rational c.
    pub fn term(var: Var, c: Q, e: i64, n_hbar: usize) -> Self {
        Self::monomial(var, HbarScalar::constant(c, n_hbar), e)
    }

    pub fn new(var: Var, lo: i64, coeffs: Vec<HbarScalar>, prec: Option<i64>, n_hbar: usize) -> Self {
        Self::with_precs(var, lo, coeffs, vec![prec; n_hbar], n_hbar)
    }

    pub(crate) fn with_precs(var: Var, lo: i64, coeffs: Vec<HbarScalar>, precs: Vec<Option<i64>>, n_hbar: usize) -> Self {
        debug_assert_eq!(precs.len(), n_hbar);
        let mut s = LaurentSeries {
            var,
            lo,
            precs,
            coeffs: coeffs.into_iter().map(|c| c.truncate(n_hbar)).collect(),
            n_hbar,
        };
        for c in &s.coeffs {
            assert_eq!(c.order(), n_hbar, "coefficient order below series hbar order");
        }
        s.normalize();
        s
    }

    /// Series with classical coefficients c_0, c_1, ... starting at `lo`.
    pub fn from_rationals(var: Var, lo: i64, coeffs: Vec<Q>, prec: Option<i64>, n_hbar: usize) -> Self {
        let cs = coeffs
            .into_iter()
            .map(|c| HbarScalar::constant(c, n_hbar))
            .collect();
        Self::new(var, lo, cs, prec, n_hbar)
    }

    fn normalize(&mut self) {
        if let Some(pmax) = self.max_prec() {
            let keep = (pmax - self.lo).max(0) as usize;
            if self.coeffs.len() > keep {
                self.coeffs.truncate(keep);
            }
        }
        for (k, p) in self.precs.iter().enumerate() {
            if let Some(p) = *p {
                let start = (p - self.lo).max(0) as usize;
                for c in self.coeffs.iter_mut().skip(start) {
                    if !c.coeff(k).is_zero() {
                        c.set_coeff(k, Q::zero());
                    }
                }
            }
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().position(|c| !c.is_zero());
        match lead {
            None => {
                self.coeffs.clear();
                self.lo = 0;
            }
            Some(k) => {
                self.coeffs.drain(..k);
                self.lo += k as i64;
            }
        }
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn with_var(mut self, var: Var) -> Self {
        self.var = var;
        self
    }

    pub fn n_hbar(&self) -> usize {
        self.n_hbar
    }

    /// Precision of the least precise ħ-order; None when exact.
    pub fn prec(&self) -> Option<i64> {
        self.precs.iter().flatten().copied().min()
    }

    pub fn precs(&self) -> &[Option<i64>] {
        &self.precs
    }

    fn max_prec(&self) -> Option<i64> {
        if self.precs.iter().any(|p| p.is_none()) {
            None
        } else {
            self.precs.iter().flatten().copied().max()
        }
    }

    pub fn is_exact(&self) -> bool {
        self.precs.iter().all(|p| p.is_none())
    }

    fn map_precs(&self, f: impl Fn(i64) -> i64) -> Vec<Option<i64>> {
        self.precs.iter().map(|p| p.map(&f)).collect()
    }

    /// Lowest exponent where the ħ^k component may be nonzero, bounded by its precision.
    fn order_valuation(&self, k: usize) -> Option<i64> {
        let stored = self.coeffs.iter().position(|c| !c.coeff(k).is_zero()).map(|i| self.lo + i as i64);
        match (stored, self.precs[k]) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (Some(a), None) => Some(a),
            (None, b) => b,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest exponent with a nonzero coefficient (the precision for a truncated zero).
    pub fn valuation(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            self.prec()
        } else {
            Some(self.lo)
        }
    }

    /// Highest stored exponent plus one.
    pub fn hi(&self) -> i64 {
        self.lo + self.coeffs.len() as i64
    }

    /// Coefficient of z^e, or None past the precision.
    pub fn coeff(&self, e: i64) -> Option<HbarScalar> {
        if self.prec().is_some_and(|p| e >= p) {
            return None;
        }
        Some(self.coeff_or_zero(e))
    }

    pub(crate) fn coeff_or_zero(&self, e: i64) -> HbarScalar {
        if e < self.lo || e >= self.hi() {
            HbarScalar::zero(self.n_hbar)
        } else {
            self.coeffs[(e - self.lo) as usize].clone()
        }
    }

    pub(crate) fn coeff_ref(&self, e: i64) -> Option<&HbarScalar> {
        if e < self.lo || e >= self.hi() {
            None
        } else {
            Some(&self.coeffs[(e - self.lo) as usize])
        }
    }

    /// Iterates over stored (exponent, coefficient) pairs.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &HbarScalar)> {
        let lo = self.lo;
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(k, c)| (lo + k as i64, c))
            .filter(|(_, c)| !c.is_zero())
    }

    pub fn truncate_prec(&self, p: i64) -> Self {
        let mut s = self.clone();
        for q in &mut s.precs {
            *q = prec_min(*q, Some(p));
        }
        s.normalize();
        s
    }

    pub fn truncate_hbar(&self, n: usize) -> Self {
        let n = n.min(self.n_hbar);
        let cs = self.coeffs.iter().map(|c| c.truncate(n)).collect();
        Self::with_precs(self.var, self.lo, cs, self.precs[..n].to_vec(), n)
    }

    pub fn scale(&self, c: &HbarScalar) -> Self {
        let n = self.n_hbar.min(c.order());
        let cs = self.coeffs.iter().map(|x| (x * c).truncate(n)).collect();
        let precs = (0..n)
            .map(|k| {
                (0..=k)
                    .filter(|&j| !c.coeff(k - j).is_zero())
                    .fold(None, |acc, j| prec_min(acc, self.precs[j]))
            })
            .collect();
        Self::with_precs(self.var, self.lo, cs, precs, n)
    }

    pub fn scale_q(&self, c: &Q) -> Self {
        let cs = self.coeffs.iter().map(|x| x.scale(c)).collect();
        Self::with_precs(self.var, self.lo, cs, self.precs.clone(), self.n_hbar)
    }

    /// Exact division by ħ; the ħ-order drops by one.
    pub fn div_hbar(&self) -> Result<Self> {
        if self.n_hbar < 2 {
            return Err(Error::WindowOverflow {
                needed_m_z: 0,
                needed_n_hbar: 2,
            });
        }
        let cs = self
            .coeffs
            .iter()
            .map(|c| c.div_hbar())
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::with_precs(self.var, self.lo, cs, self.precs[1..].to_vec(), self.n_hbar - 1))
    }

    /// Multiplication by z^k.
    pub fn shift(&self, k: i64) -> Self {
        let mut s = self.clone();
        if !s.coeffs.is_empty() {
            s.lo += k;
        }
        s.precs = s.map_precs(|p| p + k);
        s
    }

    /// ħ = 0 part, kept at the same ħ-order.
    pub fn classical_part(&self) -> Self {
        let cs = self
            .coeffs
            .iter()
            .map(|c| HbarScalar::constant(c.classical().clone(), self.n_hbar))
            .collect();
        let mut precs = vec![None; self.n_hbar];
        precs[0] = self.precs[0];
        Self::with_precs(self.var, self.lo, cs, precs, self.n_hbar)
    }

    /// Coefficient series of ħ^k as a series with classical coefficients.
    pub fn hbar_component(&self, k: usize) -> Self {
        let cs = self
            .coeffs
            .iter()
            .map(|c| HbarScalar::constant(c.coeff(k), self.n_hbar))
            .collect();
        let mut precs = vec![None; self.n_hbar];
        precs[0] = self.precs.get(k).copied().flatten();
        Self::with_precs(self.var, self.lo, cs, precs, self.n_hbar)
    }

    pub fn derivative(&self) -> Self {
        let cs = (self.lo..self.hi())
            .map(|e| self.coeff_or_zero(e).scale(&qi(e)))
            .collect::<Vec<_>>();
        Self::with_precs(self.var, self.lo - 1, cs, self.map_precs(|p| p - 1), self.n_hbar)
    }

    /// z -> -z.
    pub fn reflect(&self) -> Self {
        let cs = (self.lo..self.hi())
            .map(|e| {
                let c = self.coeff_or_zero(e);
                if e.rem_euclid(2) == 1 {
                    -c
                } else {
                    c
                }
            })
            .collect();
        Self::with_precs(self.var, self.lo, cs, self.precs.clone(), self.n_hbar)
    }

    /// Coefficient of z^{-1}.
    pub fn res(&self) -> Result<HbarScalar> {
        self.coeff(-1).ok_or(Error::WindowOverflow {
            needed_m_z: 0,
            needed_n_hbar: self.n_hbar,
        })
    }

    /// Negative-exponent part.
    pub fn sing(&self) -> Self {
        let cs = (self.lo..self.hi().min(0)).map(|e| self.coeff_or_zero(e)).collect();
        let precs = self.precs.iter().map(|p| p.filter(|&p| p < 0)).collect();
        Self::with_precs(self.var, self.lo, cs, precs, self.n_hbar)
    }

    /// Nonnegative-exponent part.
    pub fn regular(&self) -> Self {
        let start = self.lo.max(0);
        let cs = (start..self.hi()).map(|e| self.coeff_or_zero(e)).collect();
        Self::with_precs(self.var, start, cs, self.precs.clone(), self.n_hbar)
    }

    /// e^{c z} truncated below `cap`.
    pub fn exp_linear(var: Var, c: &Q, cap: i64, n_hbar: usize) -> Self {
        let mut cs = Vec::new();
        let mut pow = Q::one();
        for k in 0..cap.max(0) {
            cs.push(&pow / factorial(k as usize));
            pow *= c;
        }
        Self::from_rationals(var, 0, cs, Some(cap.max(0)), n_hbar)
    }

    /// Multiplicative inverse; the classical part must be nonzero.
    pub fn inverse(&self, cap: i64) -> Result<Self> {
        let u0 = self.classical_part();
        if u0.is_zero() {
            return Err(Error::NotInvertible(format!("series with zero classical part: {self}")));
        }
        let rest = self - &u0;
        let b = u0.invert_unit_leading(cap + self.pole_boost(&u0, &rest))?;
        if rest.is_zero() && rest.is_exact() {
            return Ok(b.truncate_prec(cap));
        }
        let v = &b * &rest;
        let mut acc = Self::one(self.var, self.n_hbar);
        let mut pow = Self::one(self.var, self.n_hbar);
        let neg_v = -&v;
        for _ in 1..self.n_hbar {
            pow = &pow * &neg_v;
            acc = &acc + &pow;
        }
        Ok((&b * &acc).truncate_prec(cap))
    }

    /// Extra working precision absorbing the principal parts created by ħ-corrections.
    fn pole_boost(&self, u0: &Self, rest: &Self) -> i64 {
        let v0 = u0.lo;
        let depth = match rest.valuation() {
            Some(r) if !rest.is_zero() => (v0 - r).max(0),
            _ => 0,
        };
        self.n_hbar as i64 * depth + 2 * v0.abs() + 2
    }

    /// Long division when the lowest coefficient is a unit.
    fn invert_unit_leading(&self, cap: i64) -> Result<Self> {
        let v = self.lo;
        let lead_inv = self.coeffs[0].inverse()?;
        if self.precs[0].is_none() && self.coeffs.len() == 1 {
            return Ok(Self::monomial(self.var, lead_inv, -v));
        }
        let target = match self.precs[0] {
            Some(p) => (p - 2 * v).min(cap),
            None => cap,
        };
        let len = (target + v).max(0) as usize;
        let mut b: Vec<HbarScalar> = Vec::with_capacity(len);
        for m in 0..len {
            let mut acc = if m == 0 {
                HbarScalar::one(self.n_hbar)
            } else {
                HbarScalar::zero(self.n_hbar)
            };
            for k in 1..=m.min(self.coeffs.len().saturating_sub(1)) {
                acc -= &(&self.coeffs[k] * &b[m - k]);
            }
            b.push(&acc * &lead_inv);
        }
        let mut precs = vec![None; self.n_hbar];
        precs[0] = Some(target);
        Ok(Self::with_precs(self.var, -v, b, precs, self.n_hbar))
    }

    /// Series quotient self / other.
    pub fn div(&self, other: &Self, cap: i64) -> Result<Self> {
        Ok(self * &other.inverse(cap)?)
    }

    pub fn pow(&self, e: i64, cap: i64) -> Result<Self> {
        let base = if e < 0 { self.inverse(cap)? } else { self.clone() };
        let mut acc = Self::one(self.var, self.n_hbar);
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    /// exp of a series with vanishing classical part.
    pub fn exp(&self) -> Result<Self> {
        if !self.classical_part().is_zero() {
            return Err(Error::NotNilpotent);
        }
        let mut acc = Self::one(self.var, self.n_hbar);
        let mut term = Self::one(self.var, self.n_hbar);
        for k in 1..self.n_hbar {
            term = (&term * self).scale_q(&Q::new(1.into(), (k as i64).into()));
            acc = &acc + &term;
        }
        Ok(acc)
    }

    /// log of a series whose classical part is 1 + O(z).
    pub fn log(&self, cap: i64) -> Result<Self> {
        let u0 = self.classical_part();
        if u0.valuation() != Some(0) || !u0.coeff_or_zero(0).is_one() {
            return Err(Error::LogNonUnit);
        }
        let rest = self - &u0;
        let u0_inv = u0.inverse(cap + self.pole_boost(&u0, &rest))?;
        let dlog = &u0.derivative() * &u0_inv;
        if dlog.lo < 0 && !dlog.is_zero() {
            return Err(Error::LogNonUnit);
        }
        let log0 = dlog.integrate_regular();
        let v = &u0_inv * &rest;
        let mut acc = log0;
        let mut pow = Self::one(self.var, self.n_hbar);
        for k in 1..self.n_hbar {
            pow = &pow * &v;
            let c = if k % 2 == 1 { qi(1) } else { qi(-1) } / qi(k as i64);
            acc = &acc + &pow.scale_q(&c);
        }
        Ok(acc.truncate_prec(cap))
    }

    /// Antiderivative with zero constant term, for series without z^{-1} term and no pole.
    fn integrate_regular(&self) -> Self {
        let cs = (0..self.hi().max(0))
            .map(|e| self.coeff_or_zero(e).scale(&Q::new(1.into(), (e + 1).into())))
            .collect();
        Self::with_precs(self.var, 1, cs, self.map_precs(|p| p + 1), self.n_hbar)
    }

    /// Substitutes z = c ħ into a series with no principal part.
    pub fn eval_at_hbar_multiple(&self, c: &Q) -> Result<HbarScalar> {
        if !self.is_zero() && self.lo < 0 {
            return Err(Error::PoleStructure(format!(
                "evaluation at z = {c} ħ needs a power series, lowest exponent {}",
                self.lo
            )));
        }
        let n = self.n_hbar as i64;
        for (k, p) in self.precs.iter().enumerate() {
            if p.is_some_and(|p| p < n - k as i64) {
                return Err(Error::WindowOverflow {
                    needed_m_z: n,
                    needed_n_hbar: self.n_hbar,
                });
            }
        }
        let mut acc = HbarScalar::zero(self.n_hbar);
        for (e, coeff) in self.terms() {
            if e >= n {
                break;
            }
            let m = HbarScalar::monomial(c.pow(e as i32), e as usize, self.n_hbar);
            acc += &(coeff * &m);
        }
        Ok(acc)
    }

    /// Substitutes z -> c z.
    pub fn scale_var(&self, c: &Q) -> Self {
        let cs = (self.lo..self.hi())
            .map(|e| self.coeff_or_zero(e).scale(&c.pow(e as i32)))
            .collect();
        Self::with_precs(self.var, self.lo, cs, self.precs.clone(), self.n_hbar)
    }

    /// Compares all coefficients with exponent <= `upto`.
    pub fn first_difference(&self, other: &Self, upto: i64) -> Result<Option<Witness>> {
        let need = upto + 1;
        let n = self.n_hbar.min(other.n_hbar);
        let used = self.precs[..n].iter().chain(other.precs[..n].iter());
        for p in used.flatten().copied() {
            if p < need {
                return Err(Error::WindowOverflow {
                    needed_m_z: upto + (need - p),
                    needed_n_hbar: self.n_hbar,
                });
            }
        }
        let start = self.lo.min(other.lo);
        let end = self.hi().max(other.hi()).min(need);
        for e in start..end {
            let a = self.coeff_or_zero(e);
            let b = other.coeff_or_zero(e);
            for k in 0..n {
                let (x, y) = (a.coeff(k), b.coeff(k));
                if x != y {
                    return Ok(Some(Witness {
                        z_exp: e,
                        z2_exp: None,
                        hbar_exp: k,
                        left: x.to_string(),
                        right: y.to_string(),
                    }));
                }
            }
        }
        Ok(None)
    }

    /// Equality up to z-exponent `upto`, treating missing precision as overflow.
    pub fn agrees_upto(&self, other: &Self, upto: i64) -> Result<bool> {
        Ok(self.first_difference(other, upto)?.is_none())
    }

    pub fn canonical_text(&self) -> String {
        let mut items: Vec<(usize, i64, Q)> = Vec::new();
        for (e, c) in self.terms() {
            for (k, a) in c.coeffs().iter().enumerate() {
                if !a.is_zero() {
                    items.push((k, e, a.clone()));
                }
            }
        }
        items.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
        if items.is_empty() {
            return "0".to_string();
        }
        items
            .iter()
            .map(|(k, e, a)| format!("{a} * {}^{e} * ħ^{k}", self.var))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical_text())?;
        if let Some(p) = self.prec() {
            write!(f, " + O({}^{p})", self.var)?;
        }
        Ok(())
    }
}

fn check_var(a: &LaurentSeries, b: &LaurentSeries) {
    assert_eq!(a.var, b.var, "series in different variables");
}

impl<'a> Add<&'a LaurentSeries> for &'a LaurentSeries {
    type Output = LaurentSeries;
    fn add(self, rhs: &LaurentSeries) -> LaurentSeries {
        check_var(self, rhs);
        let n = self.n_hbar.min(rhs.n_hbar);
        if self.is_zero() && self.is_exact() {
            return rhs.truncate_hbar(n);
        }
        if rhs.is_zero() && rhs.is_exact() {
            return self.truncate_hbar(n);
        }
        let lo = match (self.is_zero(), rhs.is_zero()) {
            (true, _) => rhs.lo,
            (_, true) => self.lo,
            _ => self.lo.min(rhs.lo),
        };
        let hi = self.hi().max(rhs.hi());
        let cs = (lo..hi)
            .map(|e| match (self.coeff_ref(e), rhs.coeff_ref(e)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.truncate(n),
                (None, Some(b)) => b.truncate(n),
                (None, None) => HbarScalar::zero(n),
            })
            .collect();
        let precs = (0..n).map(|k| prec_min(self.precs[k], rhs.precs[k])).collect();
        LaurentSeries::with_precs(self.var, lo, cs, precs, n)
    }
}

impl Neg for &LaurentSeries {
    type Output = LaurentSeries;
    fn neg(self) -> LaurentSeries {
        let mut s = self.clone();
        for c in &mut s.coeffs {
            *c = -&*c;
        }
        s
    }
}

impl Neg for LaurentSeries {
    type Output = LaurentSeries;
    fn neg(self) -> LaurentSeries {
        -&self
    }
}

impl<'a> Sub<&'a LaurentSeries> for &'a LaurentSeries {
    type Output = LaurentSeries;
    fn sub(self, rhs: &LaurentSeries) -> LaurentSeries {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a LaurentSeries> for &'a LaurentSeries {
    type Output = LaurentSeries;
    fn mul(self, rhs: &LaurentSeries) -> LaurentSeries {
        check_var(self, rhs);
        let n = self.n_hbar.min(rhs.n_hbar);
        if (self.is_zero() && self.is_exact()) || (rhs.is_zero() && rhs.is_exact()) {
            return LaurentSeries::zero(self.var, n);
        }
        let va: Vec<Option<i64>> = (0..n).map(|k| self.order_valuation(k)).collect();
        let vb: Vec<Option<i64>> = (0..n).map(|k| rhs.order_valuation(k)).collect();
        let bound = |p: Option<i64>, v: Option<i64>| match (p, v) {
            (Some(p), Some(v)) => Some(p + v),
            _ => None,
        };
        let precs: Vec<Option<i64>> = (0..n)
            .map(|k| {
                (0..=k).fold(None, |acc, i| {
                    let j = k - i;
                    let t = prec_min(bound(self.precs[i], vb[j]), bound(rhs.precs[j], va[i]));
                    prec_min(acc, t)
                })
            })
            .collect();
        if self.is_zero() || rhs.is_zero() {
            let mut z = LaurentSeries::zero(self.var, n);
            z.precs = precs;
            return z;
        }
        let lo = self.lo + rhs.lo;
        let mut hi = self.hi() + rhs.hi() - 1;
        if precs.iter().all(|p| p.is_some()) {
            hi = hi.min(precs.iter().flatten().copied().max().unwrap());
        }
        let len = (hi - lo).max(0) as usize;
        let cs = convolve(&self.coeffs, &rhs.coeffs, len, n);
        LaurentSeries::with_precs(self.var, lo, cs, precs, n)
    }
}

/// Integer numerators over one common denominator, indexed [exponent][ħ-order].
fn integer_grid(cs: &[HbarScalar], n: usize) -> (Vec<Vec<BigInt>>, BigInt) {
    let mut den = BigInt::one();
    for c in cs {
        for q in &c.coeffs()[..n] {
            if !q.is_zero() && !q.denom().is_one() {
                den = den.lcm(q.denom());
            }
        }
    }
    let grid = cs
        .iter()
        .map(|c| {
            c.coeffs()[..n]
                .iter()
                .map(|q| {
                    if q.is_zero() {
                        BigInt::zero()
                    } else {
                        q.numer() * (&den / q.denom())
                    }
                })
                .collect()
        })
        .collect();
    (grid, den)
}

/// Truncated product of coefficient lists, the first `len` terms.
fn convolve(a: &[HbarScalar], b: &[HbarScalar], len: usize, n: usize) -> Vec<HbarScalar> {
    let (ga, da) = integer_grid(a, n);
    let (gb, db) = integer_grid(b, n);
    let mut out = vec![vec![BigInt::zero(); n]; len];
    for (i, x) in ga.iter().enumerate() {
        if i >= len {
            break;
        }
        let xs: Vec<(usize, &BigInt)> = x.iter().enumerate().filter(|(_, v)| !v.is_zero()).collect();
        if xs.is_empty() {
            continue;
        }
        for (j, y) in gb.iter().enumerate() {
            if i + j >= len {
                break;
            }
            let row = &mut out[i + j];
            for (k1, u) in &xs {
                for (k2, v) in y[..n - k1].iter().enumerate() {
                    if !v.is_zero() {
                        row[k1 + k2] += *u * v;
                    }
                }
            }
        }
    }
    let den = da * db;
    out.into_iter()
        .map(|row| {
            HbarScalar::from_coeffs(
                row.into_iter()
                    .map(|v| if v.is_zero() { Q::zero() } else { Q::new(v, den.clone()) })
                    .collect(),
                n,
            )
        })
        .collect()
}

macro_rules! forward_owned_series {
    ($tr:ident, $m:ident) => {
        impl $tr<LaurentSeries> for LaurentSeries {
            type Output = LaurentSeries;
            fn $m(self, rhs: LaurentSeries) -> LaurentSeries {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a LaurentSeries> for LaurentSeries {
            type Output = LaurentSeries;
            fn $m(self, rhs: &LaurentSeries) -> LaurentSeries {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned_series!(Add, add);
forward_owned_series!(Sub, sub);
forward_owned_series!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::qf;

    fn t(c: i64, e: i64) -> LaurentSeries {
        LaurentSeries::term(Z, qi(c), e, 4)
    }

    #[test]
    fn res_and_sing() {
        assert!(t(1, -1).res().unwrap().is_one());
        let s = &(&t(1, -2) + &t(3, 0)) + &t(1, 1);
        assert_eq!(s.sing(), t(1, -2));
        let d = LaurentSeries::exp_linear(Z, &qi(2), 10, 4).shift(-3).derivative();
        assert!(d.res().unwrap().is_zero());
    }

    #[test]
    fn geometric_inverse() {
        let one_minus = &t(1, 0) - &t(1, 1);
        let inv = one_minus.inverse(8).unwrap();
        assert_eq!(inv.prec(), Some(8));
        for e in 0..8 {
            assert!(inv.coeff(e).unwrap().is_one());
        }
        assert_eq!(inv.coeff(8), None);
    }

    #[test]
    fn inverse_with_hbar_pole() {
        let h = HbarScalar::hbar(4);
        let u = &LaurentSeries::monomial(Z, h, -3) + &t(1, -1);
        let inv = u.inverse(10).unwrap();
        let prod = &u * &inv;
        assert!(prod.agrees_upto(&LaurentSeries::one(Z, 4), 5).unwrap());
    }

    #[test]
    fn exp_log_round_trip() {
        let s = LaurentSeries::monomial(Z, HbarScalar::hbar(5), -2);
        let e = s.exp().unwrap();
        assert!(e.log(12).unwrap().agrees_upto(&s, 11).unwrap());
        let u = LaurentSeries::exp_linear(Z, &qi(1), 10, 5);
        let l = u.log(10).unwrap();
        assert!(l.agrees_upto(&t(1, 1).truncate_hbar(5), 8).unwrap());
        assert_eq!(t(2, 0).log(5), Err(Error::LogNonUnit));
    }

    #[test]
    fn precision_bookkeeping() {
        let a = LaurentSeries::exp_linear(Z, &qi(1), 6, 3).shift(-2);
        let b = t(1, -1).truncate_hbar(3);
        let p = &a * &b;
        assert_eq!(p.prec(), Some(3));
        assert!(p.first_difference(&a, 4).is_err());
    }

    #[test]
    fn canonical_text_order() {
        let s = &LaurentSeries::monomial(Z, HbarScalar::hbar(3), -1) + &t(2, 1).truncate_hbar(3);
        assert_eq!(s.canonical_text(), "2 * z^1 * ħ^0 + 1 * z^-1 * ħ^1");
    }

    #[test]
    fn eval_at_hbar() {
        let s = LaurentSeries::exp_linear(Z, &qi(1), 10, 4);
        let v = s.eval_at_hbar_multiple(&qf(1, 2)).unwrap();
        assert_eq!(v, crate::scalars::q_pow(&qf(1, 2), 4));
    }
}
