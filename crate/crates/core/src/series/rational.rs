use std::fmt;

use num::Zero;

use crate::error::{Error, Result};
use crate::scalars::{qi, HbarScalar, Q};
use crate::series::laurent::{LaurentSeries, Var, W, Z};
use crate::series::poly::{divrem_q, gcd_q, Poly};

/// Expansion region for rational functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Nonnegative powers of the variable (expansion around 0).
    ZAdic,
    /// Nonnegative powers of the reciprocal (expansion around infinity).
    InverseZAdic,
}

/// Sign in e^{±z}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_q(self) -> Q {
        match self {
            Sign::Plus => qi(1),
            Sign::Minus => qi(-1),
        }
    }
}

/// Quotient num/den of polynomials in w with ħ-adic coefficients.
#[derive(Clone, Debug)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl PartialEq for RationalFunction {
    fn eq(&self, other: &Self) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

impl RationalFunction {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::NotInvertible("zero denominator".into()));
        }
        let mut f = RationalFunction { num, den };
        f.reduce();
        Ok(f)
    }

    fn reduce(&mut self) {
        let n = self.num.n_hbar().min(self.den.n_hbar());
        if self.num.is_zero() {
            self.den = Poly::one(n);
            return;
        }
        if self.den.is_classical() {
            let mut g = self.den.classical_coeffs();
            for k in 0..n {
                let part = self.num.hbar_component(k);
                if !part.is_empty() {
                    g = gcd_q(&g, &part);
                }
            }
            if g.len() > 1 {
                self.num = self.num.div_classical(&g);
                self.den = self.den.div_classical(&g);
            }
        } else {
            let k = self.num.low_degree().min(self.den.low_degree());
            if k > 0 {
                self.num = Poly::new(self.num.coeffs()[k..].to_vec(), n);
                self.den = Poly::new(self.den.coeffs()[k..].to_vec(), n);
            }
        }
        if let Ok((den, lead)) = self.den.make_monic() {
            let inv = lead.inverse().expect("unit leading coefficient");
            self.num = self.num.scale(&inv);
            self.den = den;
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        let n = p.n_hbar();
        Self::new(p, Poly::one(n)).expect("unit denominator")
    }

    pub fn constant(c: HbarScalar) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn one(n_hbar: usize) -> Self {
        Self::constant(HbarScalar::one(n_hbar))
    }

    /// The variable w itself.
    pub fn w(n_hbar: usize) -> Self {
        Self::from_poly(Poly::monomial(HbarScalar::one(n_hbar), 1))
    }

    /// Convenience constructor from integer coefficient lists.
    pub fn from_ints(num: &[i64], den: &[i64], n_hbar: usize) -> Result<Self> {
        Self::new(Poly::from_ints(num, n_hbar), Poly::from_ints(den, n_hbar))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn n_hbar(&self) -> usize {
        self.num.n_hbar().min(self.den.n_hbar())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
        .expect("product of nonzero denominators")
    }

    pub fn neg(&self) -> Self {
        RationalFunction {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(self.num.mul(&other.num), self.den.mul(&other.den))
            .expect("product of nonzero denominators")
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Self::new(self.num.mul(&other.den), self.den.mul(&other.num))
    }

    pub fn scale(&self, c: &HbarScalar) -> Self {
        Self::new(self.num.scale(c), self.den.clone()).expect("denominator unchanged")
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 {
            Self::one(self.n_hbar()).div(self)?
        } else {
            self.clone()
        };
        let mut acc = Self::one(self.n_hbar());
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    pub fn derivative(&self) -> Self {
        if self.den.is_classical() {
            let d = self.den.classical_coeffs();
            let dd = self.den.derivative().classical_coeffs();
            if dd.is_empty() {
                return Self::new(self.num.derivative(), self.den.clone()).expect("nonzero denominator");
            }
            let g = gcd_q(&d, &dd);
            let h = Poly::from_rationals(divrem_q(&d, &g).0, self.n_hbar());
            let k = Poly::from_rationals(divrem_q(&dd, &g).0, self.n_hbar());
            let num = self.num.derivative().mul(&h).sub(&self.num.mul(&k));
            return Self::new(num, self.den.mul(&h)).expect("nonzero denominator");
        }
        let num = self
            .num
            .derivative()
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative()));
        Self::new(num, self.den.mul(&self.den)).expect("nonzero denominator")
    }

    /// w d/dw.
    pub fn euler(&self) -> Self {
        self.derivative().mul(&Self::w(self.n_hbar()))
    }

    /// w -> c w.
    pub fn scale_var(&self, c: &HbarScalar) -> Self {
        Self::new(self.num.scale_var(c), self.den.scale_var(c)).expect("unit scaling keeps denominator nonzero")
    }

    /// w -> 1/w.
    pub fn invert_var(&self) -> Self {
        let dn = self.num.degree().unwrap_or(0);
        let dd = self.den.degree().unwrap_or(0);
        let d = dn.max(dd);
        Self::new(self.num.reversed(d), self.den.reversed(d)).expect("reversed denominator nonzero")
    }

    /// Evaluation at a scalar point with invertible denominator value.
    pub fn eval(&self, x: &HbarScalar) -> Result<HbarScalar> {
        Ok(&self.num.eval(x) * &self.den.eval(x).inverse()?)
    }

    /// ħ = 0 reduction.
    pub fn classical_part(&self) -> Result<Self> {
        Self::new(self.num.classical_part(), self.den.classical_part())
    }

    /// Exponents (a, b) with classical den = const · w^a (1-w)^b, if of that shape.
    pub fn pole_orders(&self) -> Option<(usize, usize)> {
        let mut d = self.den.classical_coeffs();
        let a = d.iter().position(|c| !c.is_zero())?;
        d.drain(..a);
        let lin = vec![qi(-1), qi(1)];
        let mut b = 0;
        loop {
            if d.len() <= 1 {
                return Some((a, b));
            }
            let (q, r) = divrem_q(&d, &lin);
            if !r.is_empty() {
                return None;
            }
            d = q;
            b += 1;
        }
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] / [{}]", self.num, self.den)
    }
}

/// Expansion of f in the given direction, in the variable `w` or its reciprocal.
pub fn iota_expand(f: &RationalFunction, direction: Direction, cap: i64) -> Result<LaurentSeries> {
    iota_expand_in(f, direction, W, cap)
}

pub fn iota_expand_in(f: &RationalFunction, direction: Direction, var: Var, cap: i64) -> Result<LaurentSeries> {
    match direction {
        Direction::ZAdic => {
            let den = f.den.to_series(var).inverse(cap)?;
            Ok((&f.num.to_series(var) * &den).truncate_prec(cap))
        }
        Direction::InverseZAdic => iota_expand_in(&f.invert_var(), Direction::ZAdic, var.reciprocal(), cap),
    }
}

/// f(e^{±z}) as a Laurent series in z, exact below `cap`.
pub fn exp_substitute(f: &RationalFunction, sign: Sign, cap: i64) -> Result<LaurentSeries> {
    let deg = f.den.degree().unwrap_or(0) as i64;
    let n = f.n_hbar();
    let work = cap + 2 * deg + 2 + deg * n as i64;
    let e = LaurentSeries::exp_linear(Z, &sign.as_q(), work, n);
    let den = f.den.eval_series(&e);
    if den.classical_part().is_zero() {
        return Err(Error::PoleStructure(format!("denominator vanishes classically: {f}")));
    }
    if den.valuation().is_some_and(|v| v > cap) {
        return Err(Error::PoleStructure(format!("pole order exceeds window: {f}")));
    }
    let num = f.num.eval_series(&e);
    let out = &num * &den.inverse(work)?;
    if out.prec().is_some_and(|p| p < cap) {
        return Err(Error::WindowOverflow {
            needed_m_z: cap + (cap - out.prec().unwrap()),
            needed_n_hbar: n,
        });
    }
    Ok(out.truncate_prec(cap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::qf;

    #[test]
    fn geometric_both_ways() {
        let f = RationalFunction::from_ints(&[1], &[1, -1], 4).unwrap();
        let a = iota_expand(&f, Direction::ZAdic, 8).unwrap();
        for n in 0..8 {
            assert!(a.coeff(n).unwrap().is_one());
        }
        let b = iota_expand(&f, Direction::InverseZAdic, 8).unwrap();
        assert!(b.coeff(0).unwrap().is_zero());
        for n in 1..8 {
            assert_eq!(b.coeff(n).unwrap(), HbarScalar::from_int(-1, 4));
        }
        assert!(b.var().inverted);
    }

    #[test]
    fn reduction_is_canonical() {
        let f = RationalFunction::from_ints(&[-1, 0, 1], &[-2, 2], 3).unwrap();
        assert_eq!(f.num(), &Poly::from_rationals(vec![qf(1, 2), qf(1, 2)], 3));
        assert_eq!(f.den(), &Poly::from_ints(&[1], 3));
        assert_eq!(f.pole_orders(), Some((0, 0)));
    }

    #[test]
    fn exp_substitute_double_pole() {
        let f = RationalFunction::from_ints(&[0, 1], &[1, -2, 1], 3).unwrap();
        let s = exp_substitute(&f, Sign::Minus, 6).unwrap();
        assert!(s.coeff(-2).unwrap().is_one());
        assert!(s.coeff(-1).unwrap().is_zero());
        assert_eq!(s.coeff(0).unwrap(), HbarScalar::constant(qf(-1, 12), 3));
        assert_eq!(s.coeff(2).unwrap(), HbarScalar::constant(qf(1, 240), 3));
    }

    #[test]
    fn invert_var_round_trip() {
        let f = RationalFunction::from_ints(&[1, 3], &[2, 0, 5], 3).unwrap();
        assert_eq!(f.invert_var().invert_var(), f);
        assert!(RationalFunction::one(3).eval(&HbarScalar::zero(3)).unwrap().is_one());
    }
}
