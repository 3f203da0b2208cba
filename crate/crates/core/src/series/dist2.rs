use std::fmt;

use crate::error::{Error, Result};
use crate::scalars::{binom_i, qi, HbarScalar};
use crate::series::laurent::{LaurentSeries, Witness};
use crate::series::rational::{iota_expand, Direction, RationalFunction};

/// Coefficients of z1^a z2^b for a, b in [-m, m].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distribution2 {
    m: i64,
    n_hbar: usize,
    cells: Vec<HbarScalar>,
}

impl Distribution2 {
    pub fn zero(m: i64, n_hbar: usize) -> Self {
        let side = (2 * m + 1) as usize;
        Distribution2 {
            m,
            n_hbar,
            cells: vec![HbarScalar::zero(n_hbar); side * side],
        }
    }

    pub fn window(&self) -> i64 {
        self.m
    }

    pub fn n_hbar(&self) -> usize {
        self.n_hbar
    }

    fn index(&self, a: i64, b: i64) -> Option<usize> {
        if a.abs() > self.m || b.abs() > self.m {
            return None;
        }
        let side = 2 * self.m + 1;
        Some(((a + self.m) * side + (b + self.m)) as usize)
    }

    pub fn get(&self, a: i64, b: i64) -> HbarScalar {
        self.index(a, b)
            .map(|i| self.cells[i].clone())
            .unwrap_or_else(|| HbarScalar::zero(self.n_hbar))
    }

    /// Adds c to the cell, ignoring cells outside the window.
    pub fn add_at(&mut self, a: i64, b: i64, c: &HbarScalar) {
        if let Some(i) = self.index(a, b) {
            self.cells[i] += c;
        }
    }

    pub fn cells(&self) -> impl Iterator<Item = (i64, i64, &HbarScalar)> {
        let m = self.m;
        let side = 2 * m + 1;
        self.cells
            .iter()
            .enumerate()
            .map(move |(i, c)| (i as i64 / side - m, i as i64 % side - m, c))
    }

    pub fn is_zero(&self) -> bool {
        self.cells.iter().all(|c| c.is_zero())
    }

    /// Restriction to a smaller window.
    pub fn restrict(&self, m: i64) -> Self {
        let mut out = Self::zero(m.min(self.m), self.n_hbar);
        for (a, b, c) in self.cells() {
            out.add_at(a, b, c);
        }
        out
    }

    fn combine(&self, other: &Self, sign: i64) -> Self {
        let m = self.m.min(other.m);
        let mut out = self.restrict(m);
        for (a, b, c) in other.cells() {
            out.add_at(a, b, &c.scale(&qi(sign)));
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, -1)
    }

    pub fn scale(&self, c: &HbarScalar) -> Self {
        let mut out = self.clone();
        for x in &mut out.cells {
            *x = &*x * c;
        }
        out
    }

    /// Multiplication by z1^da z2^db; the window shrinks so every cell stays determined.
    pub fn mul_monomial(&self, da: i64, db: i64) -> Self {
        let m = self.m - da.abs().max(db.abs());
        let mut out = Self::zero(m.max(0), self.n_hbar);
        for a in -m..=m {
            for b in -m..=m {
                out.add_at(a, b, &self.get(a - da, b - db));
            }
        }
        out
    }

    /// z2 d/dz2.
    pub fn euler_z2(&self) -> Self {
        let mut out = self.clone();
        for (i, x) in out.cells.iter_mut().enumerate() {
            let b = i as i64 % (2 * self.m + 1) - self.m;
            *x = x.scale(&qi(b));
        }
        out
    }

    /// d/dz2; the window shrinks by one.
    pub fn d_z2(&self) -> Self {
        let m = self.m - 1;
        let mut out = Self::zero(m, self.n_hbar);
        for a in -m..=m {
            for b in -m..=m {
                out.add_at(a, b, &self.get(a, b + 1).scale(&qi(b + 1)));
            }
        }
        out
    }

    pub fn first_difference(&self, other: &Self) -> Option<Witness> {
        let m = self.m.min(other.m);
        for a in -m..=m {
            for b in -m..=m {
                let (x, y) = (self.get(a, b), other.get(a, b));
                let n = x.order().min(y.order());
                for k in 0..n {
                    if x.coeff(k) != y.coeff(k) {
                        return Some(Witness {
                            z_exp: a,
                            z2_exp: Some(b),
                            hbar_exp: k,
                            left: x.coeff(k).to_string(),
                            right: y.coeff(k).to_string(),
                        });
                    }
                }
            }
        }
        None
    }
}

impl fmt::Display for Distribution2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (a, b, c) in self.cells() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c}) z1^{a} z2^{b}")?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// The formal delta δ(z2/z1) = Σ_n z1^{-n} z2^n on the window.
pub fn delta_grid(m: i64, n_hbar: usize) -> Distribution2 {
    let mut d = Distribution2::zero(m, n_hbar);
    for n in -m..=m {
        d.add_at(-n, n, &HbarScalar::one(n_hbar));
    }
    d
}

/// ι_{z1,z2} f(z2/z1) − ι_{z2,z1} f(z2/z1) on the window of radius m.
pub fn delta_pair(f: &RationalFunction, m: i64) -> Result<Distribution2> {
    if f.pole_orders().is_none() {
        return Err(Error::PoleStructure(format!(
            "poles away from w = 0, 1, infinity: {f}"
        )));
    }
    let near = iota_expand(f, Direction::ZAdic, m + 1)?;
    let far = iota_expand(f, Direction::InverseZAdic, m + 1)?;
    let mut out = Distribution2::zero(m, f.n_hbar());
    for n in -m..=m {
        let c = &near.coeff_or_zero(n) - &far.coeff_or_zero(-n);
        out.add_at(-n, n, &c);
    }
    Ok(out)
}

/// ι expansion of s(z1 − z2) on the window; `ZAdic` is ι_{z1,z2}.
pub fn iota_additive(s: &LaurentSeries, direction: Direction, m: i64) -> Result<Distribution2> {
    if s.prec().is_some_and(|p| p <= 2 * m) {
        return Err(Error::WindowOverflow {
            needed_m_z: 2 * m + 1,
            needed_n_hbar: s.n_hbar(),
        });
    }
    let mut out = Distribution2::zero(m, s.n_hbar());
    for (e, c) in s.terms() {
        if e < -m || e > 2 * m {
            continue;
        }
        for j in 0..=(2 * m + e.abs()) as usize {
            let bj = binom_i(e, j);
            let sj = if j % 2 == 0 { bj } else { -bj };
            if sj == qi(0) && e >= 0 {
                continue;
            }
            let coeff = c.scale(&sj);
            let j = j as i64;
            match direction {
                Direction::ZAdic => out.add_at(e - j, j, &coeff),
                Direction::InverseZAdic => {
                    let sign = if e.rem_euclid(2) == 0 { 1 } else { -1 };
                    out.add_at(j, e - j, &coeff.scale(&qi(sign)))
                }
            }
        }
    }
    Ok(out)
}

/// ι_{z1,z2} s(z1 − z2) − ι_{z2,z1} s(−z2 + z1), the additive analogue of `delta_pair`.
pub fn delta_pair_additive(s: &LaurentSeries, m: i64) -> Result<Distribution2> {
    Ok(iota_additive(s, Direction::ZAdic, m)?.sub(&iota_additive(s, Direction::InverseZAdic, m)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::laurent::Z;

    #[test]
    fn geometric_delta() {
        let f = RationalFunction::from_ints(&[1], &[1, -1], 3).unwrap();
        let d = delta_pair(&f, 5).unwrap();
        assert_eq!(d, delta_grid(5, 3));
        let g = RationalFunction::one(3);
        assert!(delta_pair(&g, 5).unwrap().is_zero());
    }

    #[test]
    fn substitution_property() {
        let d = delta_grid(6, 2);
        let lhs = d.mul_monomial(1, 0).sub(&d.mul_monomial(0, 1));
        assert!(lhs.is_zero());
    }

    #[test]
    fn additive_delta_simple_pole() {
        let s = LaurentSeries::term(Z, qi(1), -1, 2);
        let d = delta_pair_additive(&s, 4).unwrap();
        assert_eq!(d.restrict(3), delta_grid(4, 2).mul_monomial(-1, 0));
    }

    #[test]
    fn rejects_other_poles() {
        let f = RationalFunction::from_ints(&[1], &[2, -1], 3).unwrap();
        assert!(delta_pair(&f, 3).is_err());
    }
}
