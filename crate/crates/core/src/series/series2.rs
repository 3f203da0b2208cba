use std::fmt;

use crate::error::{Error, Result};
use crate::scalars::{factorial, HbarScalar};
use crate::series::laurent::{prec_min, LaurentSeries, Var, Witness};

/// Two-variable series: rows indexed by the outer exponent, each a Laurent series in the inner variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series2 {
    outer: Var,
    inner: Var,
    lo: i64,
    prec: Option<i64>,
    rows: Vec<LaurentSeries>,
    n_hbar: usize,
}

impl Series2 {
    pub fn zero(outer: Var, inner: Var, n_hbar: usize) -> Self {
        Series2 {
            outer,
            inner,
            lo: 0,
            prec: None,
            rows: Vec::new(),
            n_hbar,
        }
    }

    pub fn new(outer: Var, inner: Var, lo: i64, rows: Vec<LaurentSeries>, prec: Option<i64>) -> Self {
        let n_hbar = rows.iter().map(|r| r.n_hbar()).min().unwrap_or(1);
        let mut s = Series2 {
            outer,
            inner,
            lo,
            prec,
            rows,
            n_hbar,
        };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        if let Some(p) = self.prec {
            let keep = (p - self.lo).max(0) as usize;
            self.rows.truncate(keep);
        }
        while self.rows.last().is_some_and(|r| r.is_zero() && r.is_exact()) {
            self.rows.pop();
        }
        let lead = self.rows.iter().position(|r| !(r.is_zero() && r.is_exact()));
        match lead {
            None => {
                self.rows.clear();
                self.lo = 0;
            }
            Some(k) => {
                self.rows.drain(..k);
                self.lo += k as i64;
            }
        }
    }

    /// s(inner) placed at outer exponent 0.
    pub fn from_inner(outer: Var, s: &LaurentSeries) -> Self {
        Self::new(outer, s.var(), 0, vec![s.clone()], None)
    }

    /// s(outer) with constant rows.
    pub fn from_outer(inner: Var, s: &LaurentSeries) -> Self {
        let n = s.n_hbar();
        let lo = s.valuation().unwrap_or(0).min(s.hi());
        let rows = (lo..s.hi())
            .map(|e| LaurentSeries::constant(inner, s.coeff_or_zero(e)))
            .collect();
        let mut out = Self::new(s.var(), inner, lo, rows, s.prec());
        out.n_hbar = n;
        out
    }

    /// s(inner + outer) = Σ_j outer^j s^{(j)}(inner)/j!, below outer exponent `cap`.
    pub fn shifted_argument(outer: Var, s: &LaurentSeries, cap: i64) -> Self {
        let mut rows = Vec::new();
        let mut d = s.clone();
        for j in 0..cap.max(0) {
            rows.push(d.scale_q(&factorial(j as usize).recip()));
            d = d.derivative();
        }
        Self::new(outer, s.var(), 0, rows, Some(cap.max(0)))
    }

    pub fn outer_var(&self) -> Var {
        self.outer
    }

    pub fn inner_var(&self) -> Var {
        self.inner
    }

    pub fn prec(&self) -> Option<i64> {
        self.prec
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.rows.len() as i64
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn row(&self, e: i64) -> LaurentSeries {
        if e < self.lo || e >= self.hi() {
            LaurentSeries::zero(self.inner, self.n_hbar)
        } else {
            self.rows[(e - self.lo) as usize].clone()
        }
    }

    fn valuation(&self) -> i64 {
        if self.rows.is_empty() {
            self.prec.unwrap_or(0)
        } else {
            self.lo
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        let rows = (lo..hi).map(|e| &self.row(e) + &other.row(e)).collect();
        Self::new(self.outer, self.inner, lo, rows, prec_min(self.prec, other.prec))
    }

    pub fn neg(&self) -> Self {
        let rows = self.rows.iter().map(|r| -r).collect();
        Self::new(self.outer, self.inner, self.lo, rows, self.prec)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let prec = prec_min(
            self.prec.map(|p| p + other.valuation()),
            other.prec.map(|p| p + self.valuation()),
        );
        if self.rows.is_empty() || other.rows.is_empty() {
            let mut z = Self::zero(self.outer, self.inner, self.n_hbar.min(other.n_hbar));
            z.prec = prec;
            return z;
        }
        let lo = self.lo + other.lo;
        let mut hi = self.hi() + other.hi() - 1;
        if let Some(p) = prec {
            hi = hi.min(p);
        }
        let n = self.n_hbar.min(other.n_hbar);
        let mut rows = vec![LaurentSeries::zero(self.inner, n); (hi - lo).max(0) as usize];
        for (i, a) in self.rows.iter().enumerate() {
            for (j, b) in other.rows.iter().enumerate() {
                if i + j >= rows.len() {
                    break;
                }
                rows[i + j] = &rows[i + j] + &(a * b);
            }
        }
        Self::new(self.outer, self.inner, lo, rows, prec)
    }

    pub fn scale(&self, c: &HbarScalar) -> Self {
        let rows = self.rows.iter().map(|r| r.scale(c)).collect();
        Self::new(self.outer, self.inner, self.lo, rows, self.prec)
    }

    /// Applies a map to each row.
    pub fn map_rows(&self, f: impl Fn(&LaurentSeries) -> LaurentSeries) -> Self {
        let rows = self.rows.iter().map(f).collect();
        Self::new(self.outer, self.inner, self.lo, rows, self.prec)
    }

    /// Negative outer-exponent part.
    pub fn sing_outer(&self) -> Self {
        let rows = (self.lo..self.hi().min(0)).map(|e| self.row(e)).collect();
        let prec = match self.prec {
            Some(p) if p < 0 => Some(p),
            _ => None,
        };
        Self::new(self.outer, self.inner, self.lo, rows, prec)
    }

    /// Compares rows with outer exponent <= `outer_upto` on inner exponents <= `inner_upto`.
    pub fn first_difference(&self, other: &Self, outer_upto: i64, inner_upto: i64) -> Result<Option<Witness>> {
        for p in [self.prec, other.prec].into_iter().flatten() {
            if p <= outer_upto {
                return Err(Error::WindowOverflow {
                    needed_m_z: outer_upto + 1,
                    needed_n_hbar: self.n_hbar,
                });
            }
        }
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi()).min(outer_upto + 1);
        for e in lo..hi {
            if let Some(mut w) = self.row(e).first_difference(&other.row(e), inner_upto)? {
                w.z2_exp = Some(w.z_exp);
                w.z_exp = e;
                return Ok(Some(w));
            }
        }
        Ok(None)
    }
}

impl fmt::Display for Series2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, r) in self.rows.iter().enumerate() {
            if r.is_zero() {
                continue;
            }
            writeln!(f, "{}^{}: {}", self.outer, self.lo + k as i64, r)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::qi;
    use crate::series::laurent::Var;

    const Z1: Var = Var::new("z1");
    const Z2: Var = Var::new("z2");

    #[test]
    fn shifted_pole_matches_binomial() {
        let s = LaurentSeries::term(Z1, qi(1), -1, 2);
        let t = Series2::shifted_argument(Z2, &s, 5);
        for j in 0..5 {
            let sign = if j % 2 == 0 { 1 } else { -1 };
            assert_eq!(t.row(j), LaurentSeries::term(Z1, qi(sign), -1 - j, 2));
        }
    }

    #[test]
    fn product_of_separated_factors() {
        let a = Series2::from_inner(Z2, &LaurentSeries::term(Z1, qi(2), 1, 2));
        let b = Series2::from_outer(Z1, &LaurentSeries::term(Z2, qi(3), -2, 2));
        let p = a.mul(&b);
        assert_eq!(p.row(-2), LaurentSeries::term(Z1, qi(6), 1, 2));
        assert!(p.sing_outer().row(-2).agrees_upto(&p.row(-2), 4).unwrap());
    }
}
