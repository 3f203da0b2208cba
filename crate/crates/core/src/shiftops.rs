//! Truncated power series in a derivation D with ħ-adic coefficients.
//!
//! Two pictures are kept apart at the type level: `Additive` (D = d/dz) and
//! `Euler` (D = z d/dz). Moving between them goes through [`DiffOperator::bridge`].

use std::fmt;
use std::marker::PhantomData;

use num::One;

use crate::error::{Error, Result};
use crate::scalars::{factorial, q_int_rational, qi, HbarScalar, Q};
use crate::series::{LaurentSeries, RationalFunction};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Additive;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Euler;

pub trait Picture: Copy {
    const SYMBOL: &'static str;
}

impl Picture for Additive {
    const SYMBOL: &'static str = "∂";
}

impl Picture for Euler {
    const SYMBOL: &'static str = "z∂";
}

/// Σ_k c_k D^k.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffOperator<P: Picture> {
    coeffs: Vec<HbarScalar>,
    n_hbar: usize,
    _picture: PhantomData<P>,
}

impl<P: Picture> DiffOperator<P> {
    pub fn new(coeffs: Vec<HbarScalar>, n_hbar: usize) -> Self {
        let mut op = DiffOperator {
            coeffs: coeffs.into_iter().map(|c| c.truncate(n_hbar)).collect(),
            n_hbar,
            _picture: PhantomData,
        };
        while op.coeffs.last().is_some_and(|c| c.is_zero()) {
            op.coeffs.pop();
        }
        op
    }

    pub fn identity(n_hbar: usize) -> Self {
        Self::scalar(HbarScalar::one(n_hbar))
    }

    pub fn scalar(c: HbarScalar) -> Self {
        let n = c.order();
        Self::new(vec![c], n)
    }

    /// The bare derivation D.
    pub fn d(n_hbar: usize) -> Self {
        Self::new(vec![HbarScalar::zero(n_hbar), HbarScalar::one(n_hbar)], n_hbar)
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

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// exp(c ħ D), realizing z -> z + cħ in the additive picture.
    pub fn shift_op(c: &Q, n_hbar: usize) -> Self {
        let cs = (0..n_hbar)
            .map(|k| HbarScalar::monomial(c.pow(k as i32) / factorial(k), k, n_hbar))
            .collect();
        Self::new(cs, n_hbar)
    }

    /// [a]_{q^D} = (q^{aD} − q^{−aD}) / (q^D − q^{−D}).
    pub fn q_int_op(a: &Q, n_hbar: usize) -> Self {
        let ratio = q_int_rational(a, n_hbar);
        let cs = (0..n_hbar)
            .map(|k| HbarScalar::monomial(ratio.coeff(k), k, n_hbar))
            .collect();
        Self::new(cs, n_hbar)
    }

    /// q^{aD} − q^{−aD}.
    pub fn q_diff_op(a: &Q, n_hbar: usize) -> Self {
        Self::shift_op(a, n_hbar).sub(&Self::shift_op(&-a, n_hbar))
    }

    /// F(D) = (q^D − q^{−D})/D = 2 Σ_j ħ^{2j+1} D^{2j}/(2j+1)!.
    pub fn f_op(n_hbar: usize) -> Self {
        let cs = (0..n_hbar)
            .map(|k| {
                if k % 2 == 0 {
                    HbarScalar::monomial(qi(2) / factorial(k + 1), k + 1, n_hbar)
                } else {
                    HbarScalar::zero(n_hbar)
                }
            })
            .collect();
        Self::new(cs, n_hbar)
    }

    /// u(D) with F(D) = 2ħ u(D).
    pub fn f_unit_op(n_hbar: usize) -> Self {
        let cs = (0..n_hbar)
            .map(|k| {
                if k % 2 == 0 {
                    HbarScalar::monomial(factorial(k + 1).recip(), k, n_hbar)
                } else {
                    HbarScalar::zero(n_hbar)
                }
            })
            .collect();
        Self::new(cs, n_hbar)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.n_hbar.min(other.n_hbar);
        let len = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..len).map(|k| &self.coeff(k) + &other.coeff(k)).collect(), n)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&HbarScalar::from_int(-1, other.n_hbar)))
    }

    pub fn scale(&self, c: &HbarScalar) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect(), self.n_hbar.min(c.order()))
    }

    pub fn compose(&self, other: &Self) -> Self {
        let n = self.n_hbar.min(other.n_hbar);
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::new(Vec::new(), n);
        }
        let mut cs = vec![HbarScalar::zero(n); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                cs[i + j] += &(a * b);
            }
        }
        Self::new(cs, n)
    }

    /// Inverse as a power series in D; each D^k must carry ħ^k for the result to terminate.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = self.coeff(0);
        let inv0 = c0.inverse()?;
        if self.coeffs.iter().enumerate().any(|(k, c)| c.valuation().is_some_and(|v| v < k)) {
            return Err(Error::NotInvertible("operator not ħ-graded".into()));
        }
        let n = self.n_hbar;
        let mut b: Vec<HbarScalar> = Vec::with_capacity(n);
        for m in 0..n {
            let mut acc = if m == 0 {
                HbarScalar::one(n)
            } else {
                HbarScalar::zero(n)
            };
            for k in 1..=m {
                acc -= &(&self.coeff(k) * &b[m - k]);
            }
            b.push(&acc * &inv0);
        }
        Ok(Self::new(b, n))
    }

    /// Symbol evaluated at D = x.
    pub fn eval(&self, x: &Q) -> HbarScalar {
        let mut acc = HbarScalar::zero(self.n_hbar);
        let mut pow = Q::one();
        for c in &self.coeffs {
            acc += &c.scale(&pow);
            pow *= x;
        }
        acc
    }
}

impl DiffOperator<Additive> {
    /// Σ c_k d^k/dz^k applied termwise.
    pub fn apply(&self, s: &LaurentSeries) -> LaurentSeries {
        let mut acc = LaurentSeries::zero(s.var(), self.n_hbar.min(s.n_hbar()));
        let mut d = s.clone();
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                d = d.derivative();
            }
            if !c.is_zero() {
                acc = &acc + &d.scale(c);
            }
        }
        acc
    }

    /// Same operator seen on functions of w = e^{εz}, where d/dz = ε w d/dw.
    pub fn bridge(&self, eps: &Q) -> DiffOperator<Euler> {
        let mut pow = Q::one();
        let mut cs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            cs.push(c.scale(&pow));
            pow *= eps;
        }
        DiffOperator::new(cs, self.n_hbar)
    }

    /// F(∂)^{-1} s = u(∂)^{-1} s / (2ħ).
    pub fn f_inverse(s: &LaurentSeries) -> Result<LaurentSeries> {
        let u_inv = Self::f_unit_op(s.n_hbar()).inverse()?;
        u_inv.apply(s).scale_q(&Q::new(1.into(), 2.into())).div_hbar()
    }
}

impl DiffOperator<Euler> {
    /// Acts on z^n by the eigenvalue Σ c_k n^k.
    pub fn apply(&self, s: &LaurentSeries) -> LaurentSeries {
        let n = self.n_hbar.min(s.n_hbar());
        let cs = (s.valuation().unwrap_or(0)..s.hi())
            .map(|e| &s.coeff_or_zero(e) * &self.eval(&qi(e)))
            .collect::<Vec<_>>();
        LaurentSeries::new(s.var(), s.valuation().unwrap_or(0), cs, s.prec(), n)
    }

    /// Action on a rational function by iterating w d/dw.
    pub fn apply_rational(&self, f: &RationalFunction) -> RationalFunction {
        let mut acc = RationalFunction::constant(HbarScalar::zero(self.n_hbar));
        let mut d = f.clone();
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                d = d.euler();
            }
            if !c.is_zero() {
                acc = acc.add(&d.scale(c));
            }
        }
        acc
    }

    /// F(z∂z)^{-1} s = u(z∂z)^{-1} s / (2ħ).
    pub fn f_inverse(s: &LaurentSeries) -> Result<LaurentSeries> {
        let u_inv = Self::f_unit_op(s.n_hbar()).inverse()?;
        u_inv.apply(s).scale_q(&Q::new(1.into(), 2.into())).div_hbar()
    }
}

impl<P: Picture> fmt::Display for DiffOperator<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| format!("({c}) {}^{k}", P::SYMBOL))
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{binom_i, qf};
    use num::Zero;
    use crate::series::{exp_substitute, Sign, Z};

    type Op = DiffOperator<Additive>;

    #[test]
    fn shift_of_z() {
        let s = LaurentSeries::term(Z, qi(1), 1, 4);
        let out = Op::shift_op(&qi(1), 4).apply(&s);
        let expect = &s + &LaurentSeries::monomial(Z, HbarScalar::hbar(4), 0);
        assert_eq!(out, expect);
    }

    #[test]
    fn shift_of_pole_is_binomial() {
        let n = 6;
        let c = qf(3, 2);
        let out = Op::shift_op(&c, n).apply(&LaurentSeries::term(Z, qi(1), -1, n));
        for k in 0..n {
            let expect = HbarScalar::monomial(binom_i(-1, k) * c.pow(k as i32), k, n);
            assert_eq!(out.coeff(-1 - k as i64).unwrap(), expect);
        }
    }

    #[test]
    fn group_law_and_classical_limits() {
        let n = 6;
        let c = qi(3);
        let id = Op::shift_op(&c, n).compose(&Op::shift_op(&-c.clone(), n));
        assert_eq!(id, Op::identity(n));
        let qa = Op::q_int_op(&qi(5), n);
        assert_eq!(*qa.coeff(0).classical(), qi(5));
        assert!(qa.coeffs().iter().skip(1).all(|c| c.classical().is_zero()));
    }

    #[test]
    fn q_int_times_denominator() {
        let n = 7;
        for a in [-3, 0, 2, 5] {
            let a = qi(a);
            let lhs = Op::q_int_op(&a, n).compose(&Op::q_diff_op(&qi(1), n));
            assert_eq!(lhs, Op::q_diff_op(&a, n));
        }
    }

    #[test]
    fn f_op_properties() {
        let n = 6;
        let z = LaurentSeries::term(Z, qi(1), 1, n);
        assert_eq!(Op::f_op(n).apply(&z), z.scale(&HbarScalar::monomial(qi(2), 1, n)));
        assert_eq!(Op::f_op(n).compose(&Op::d(n)), Op::q_diff_op(&qi(1), n));
        assert_eq!(Op::f_op(n).eval(&qi(0)), crate::scalars::f_scalar(&qi(0), n));
    }

    #[test]
    fn f_inverse_round_trip() {
        let n = 6;
        let s = LaurentSeries::term(Z, qi(1), -2, n).scale(&HbarScalar::hbar(n));
        let back = Op::f_inverse(&s).unwrap();
        assert_eq!(back.n_hbar(), n - 1);
        let again = Op::f_op(n - 1).apply(&back);
        assert!(again.agrees_upto(&s.truncate_hbar(n - 1), 10).unwrap());
    }

    #[test]
    fn euler_matches_additive_under_exp_substitution() {
        let n = 5;
        let f = RationalFunction::from_ints(&[0, 1], &[1, -2, 1], n).unwrap();
        let op = Op::q_int_op(&qi(2), n).compose(&Op::shift_op(&qi(1), n));
        for sign in [Sign::Plus, Sign::Minus] {
            let lhs = op.apply(&exp_substitute(&f, sign, 14).unwrap());
            let e = op.bridge(&sign.as_q());
            let rhs = exp_substitute(&e.apply_rational(&f), sign, 14).unwrap();
            assert!(lhs.agrees_upto(&rhs, 6).unwrap());
        }
    }

    #[test]
    fn euler_diagonal() {
        let n = 4;
        let op = DiffOperator::<Euler>::shift_op(&qi(1), n);
        let s = LaurentSeries::term(Z, qi(1), 3, n);
        assert_eq!(op.apply(&s), s.scale(&crate::scalars::q_pow(&qi(3), n)));
    }
}
