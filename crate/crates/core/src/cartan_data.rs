//! Symmetrizable generalized Cartan matrices and the structure functions built from them.

use std::fmt;
use std::str::FromStr;

use num::{Integer, One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalars::{q_pow, qf, qi, HbarScalar, Q};
use crate::series::{exp_substitute, LaurentSeries, Poly, RationalFunction, Sign, Z};

/// A symmetrizable generalized Cartan matrix with its minimal symmetrizer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Gcm {
    name: String,
    a: Vec<Vec<i64>>,
    r: Vec<i64>,
    r_lcm: i64,
}

/// How a Cartan matrix is given in configuration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GcmSpec {
    Preset(String),
    Matrix {
        matrix: Vec<Vec<i64>>,
        #[serde(default)]
        symmetrizers: Option<Vec<i64>>,
    },
}

impl GcmSpec {
    pub fn build(&self) -> Result<Gcm> {
        match self {
            GcmSpec::Preset(name) => name.parse(),
            GcmSpec::Matrix {
                matrix,
                symmetrizers,
            } => Gcm::new("custom", matrix.clone(), symmetrizers.clone()),
        }
    }
}

impl Gcm {
    pub fn new(name: &str, a: Vec<Vec<i64>>, r: Option<Vec<i64>>) -> Result<Self> {
        let n = a.len();
        if n == 0 {
            return Err(Error::InvalidGcm("empty matrix".into()));
        }
        if a.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidGcm("matrix is not square".into()));
        }
        for i in 0..n {
            if a[i][i] != 2 {
                return Err(Error::InvalidGcm(format!("a_{i}{i} = {} != 2", a[i][i])));
            }
            for j in 0..n {
                if i != j && a[i][j] > 0 {
                    return Err(Error::InvalidGcm(format!("a_{i}{j} = {} > 0", a[i][j])));
                }
                if (a[i][j] == 0) != (a[j][i] == 0) {
                    return Err(Error::InvalidGcm(format!("a_{i}{j} and a_{j}{i} not both zero")));
                }
            }
        }
        let r = match r {
            Some(r) => {
                if r.len() != n || r.iter().any(|&x| x <= 0) {
                    return Err(Error::InvalidGcm("symmetrizers must be positive, one per row".into()));
                }
                r
            }
            None => minimal_symmetrizer(&a)?,
        };
        for i in 0..n {
            for j in 0..n {
                if r[i] * a[i][j] != r[j] * a[j][i] {
                    return Err(Error::InvalidGcm(format!(
                        "r_{i} a_{i}{j} != r_{j} a_{j}{i} with r = {r:?}"
                    )));
                }
            }
        }
        let r_lcm = r.iter().fold(1i64, |acc, &x| acc.lcm(&x));
        Ok(Gcm {
            name: name.to_string(),
            a,
            r,
            r_lcm,
        })
    }

    pub fn a1() -> Self {
        Self::new("A1", vec![vec![2]], None).expect("valid preset")
    }

    pub fn a2() -> Self {
        Self::new("A2", vec![vec![2, -1], vec![-1, 2]], None).expect("valid preset")
    }

    pub fn b2() -> Self {
        Self::new("B2", vec![vec![2, -2], vec![-1, 2]], None).expect("valid preset")
    }

    pub fn a1xa1() -> Self {
        Self::new("A1xA1", vec![vec![2, 0], vec![0, 2]], None).expect("valid preset")
    }

    pub fn a1_affine() -> Self {
        Self::new("A1^(1)", vec![vec![2, -2], vec![-2, 2]], None).expect("valid preset")
    }

    pub fn presets() -> Vec<Gcm> {
        vec![Self::a1(), Self::a2(), Self::b2(), Self::a1xa1(), Self::a1_affine()]
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> usize {
        self.a.len()
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.a
    }

    pub fn a(&self, i: usize, j: usize) -> i64 {
        self.a[i][j]
    }

    pub fn r(&self, i: usize) -> i64 {
        self.r[i]
    }

    pub fn symmetrizers(&self) -> &[i64] {
        &self.r
    }

    pub fn r_lcm(&self) -> i64 {
        self.r_lcm
    }

    /// r_i a_ij.
    pub fn sym(&self, i: usize, j: usize) -> i64 {
        self.r[i] * self.a[i][j]
    }

    pub fn delta(i: usize, j: usize) -> i64 {
        i64::from(i == j)
    }

    /// n_ij = 1 − δ_ij.
    pub fn n_ij(&self, i: usize, j: usize) -> i64 {
        1 - Self::delta(i, j)
    }

    /// m_ij = 1 − a_ij, defined when a_ij < 0.
    pub fn m_ij(&self, i: usize, j: usize) -> Option<i64> {
        (self.a[i][j] < 0).then(|| 1 - self.a[i][j])
    }

    /// C_ij = −(−1)^{δ_ij}.
    pub fn c_ij(&self, i: usize, j: usize) -> i64 {
        if i == j {
            1
        } else {
            -1
        }
    }

    /// n when the matrix is A_n in the given index order.
    pub fn type_a_rank(&self) -> Option<usize> {
        let n = self.rank();
        let chain = (0..n).all(|i| {
            (0..n).all(|j| {
                let expected = match i.abs_diff(j) {
                    0 => 2,
                    1 => -1,
                    _ => 0,
                };
                self.a[i][j] == expected
            })
        });
        (chain && n > 0).then_some(n)
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let n = self.rank();
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect()
    }
}

impl fmt::Display for Gcm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

impl FromStr for Gcm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace(['_', ' ', '(', ')', '^'], "");
        match key.as_str() {
            "a1" => Ok(Self::a1()),
            "a2" => Ok(Self::a2()),
            "b2" => Ok(Self::b2()),
            "a1xa1" | "a1a1" => Ok(Self::a1xa1()),
            "a11" | "a1affine" | "affinea1" => Ok(Self::a1_affine()),
            _ => {
                let trimmed = s.trim();
                if trimmed.starts_with('[') || trimmed.starts_with('{') {
                    let spec: GcmSpec = if trimmed.starts_with('[') {
                        let m: Vec<Vec<i64>> = serde_json::from_str(trimmed)
                            .map_err(|e| Error::InvalidGcm(e.to_string()))?;
                        GcmSpec::Matrix {
                            matrix: m,
                            symmetrizers: None,
                        }
                    } else {
                        serde_json::from_str(trimmed).map_err(|e| Error::InvalidGcm(e.to_string()))?
                    };
                    if let GcmSpec::Preset(p) = &spec {
                        return Err(Error::InvalidGcm(format!("unknown preset {p}")));
                    }
                    spec.build()
                } else {
                    Err(Error::InvalidGcm(format!("unknown preset {s}")))
                }
            }
        }
    }
}

/// Smallest positive integer symmetrizer, normalized per connected component.
fn minimal_symmetrizer(a: &[Vec<i64>]) -> Result<Vec<i64>> {
    let n = a.len();
    let mut r: Vec<Option<Q>> = vec![None; n];
    for start in 0..n {
        if r[start].is_some() {
            continue;
        }
        let mut component = vec![start];
        r[start] = Some(Q::one());
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if i == j || a[i][j] == 0 {
                    continue;
                }
                let rj = r[i].clone().unwrap() * qi(a[i][j]) / qi(a[j][i]);
                match &r[j] {
                    Some(existing) if *existing != rj => {
                        return Err(Error::InvalidGcm("matrix is not symmetrizable".into()))
                    }
                    Some(_) => {}
                    None => {
                        r[j] = Some(rj);
                        component.push(j);
                        stack.push(j);
                    }
                }
            }
        }
        let denom_lcm = component
            .iter()
            .fold(num::BigInt::one(), |acc, &k| acc.lcm(r[k].as_ref().unwrap().denom()));
        let ints: Vec<num::BigInt> = component
            .iter()
            .map(|&k| (r[k].clone().unwrap() * Q::from_integer(denom_lcm.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(num::BigInt::zero(), |acc, x| acc.gcd(x));
        for (&k, v) in component.iter().zip(ints) {
            r[k] = Some(Q::from_integer(v / &g));
        }
    }
    r.into_iter()
        .map(|x| {
            let v = x.unwrap().to_integer();
            i64::try_from(v).map_err(|_| Error::InvalidGcm("symmetrizer overflow".into()))
        })
        .collect()
}

/// Level ℓ and the derived shift r ℓ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Level {
    pub ell: Q,
}

impl Level {
    pub fn new(ell: Q) -> Self {
        Level { ell }
    }

    pub fn int(ell: i64) -> Self {
        Level { ell: qi(ell) }
    }

    /// r ℓ.
    pub fn r_ell(&self, gcm: &Gcm) -> Q {
        &self.ell * qi(gcm.r_lcm())
    }

    pub fn is_integral_shift(&self, gcm: &Gcm) -> bool {
        self.r_ell(gcm).is_integer()
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.ell)
    }
}

impl FromStr for Level {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let q = if let Some((a, b)) = s.split_once('/') {
            let a: i64 = a.trim().parse().map_err(|_| Error::InvalidConfig(format!("bad level {s}")))?;
            let b: i64 = b.trim().parse().map_err(|_| Error::InvalidConfig(format!("bad level {s}")))?;
            if b == 0 {
                return Err(Error::InvalidConfig("level denominator is zero".into()));
            }
            qf(a, b)
        } else {
            qi(s.parse().map_err(|_| Error::InvalidConfig(format!("bad level {s}")))?)
        };
        Ok(Level::new(q))
    }
}

/// q_i^{a_ij} = q^{r_i a_ij}.
pub fn q_sym(gcm: &Gcm, i: usize, j: usize, n_hbar: usize) -> HbarScalar {
    q_pow(&qi(gcm.sym(i, j)), n_hbar)
}

/// g_{ij,q}(w) = (q_i^{a_ij} − w) / (1 − q_i^{a_ij} w).
pub fn g_q(gcm: &Gcm, i: usize, j: usize, n_hbar: usize) -> RationalFunction {
    let qa = q_sym(gcm, i, j, n_hbar);
    let one = HbarScalar::one(n_hbar);
    let num = Poly::new(vec![qa.clone(), -&one], n_hbar);
    let den = Poly::new(vec![one, -qa], n_hbar);
    RationalFunction::new(num, den).expect("nonzero denominator")
}

/// One-variable part of f_{ij,q}(z1, z2) at w = z2/z1: (1 − q_i^{a_ij} w)(1 − w)^{−δ_ij}.
pub fn f_q(gcm: &Gcm, i: usize, j: usize, n_hbar: usize) -> RationalFunction {
    let qa = q_sym(gcm, i, j, n_hbar);
    let one = HbarScalar::one(n_hbar);
    let num = Poly::new(vec![one.clone(), -qa], n_hbar);
    let den = if i == j {
        Poly::new(vec![one.clone(), -one], n_hbar)
    } else {
        Poly::one(n_hbar)
    };
    RationalFunction::new(num, den).expect("nonzero denominator")
}

/// g_{ij,ħ}(z) = (1 − q_i^{a_ij} e^{−z}) / (q_i^{a_ij} − e^{−z}) = g_{ij,q}(e^z).
pub fn g_hbar(gcm: &Gcm, i: usize, j: usize, n_hbar: usize, cap: i64) -> Result<LaurentSeries> {
    exp_substitute(&g_q(gcm, i, j, n_hbar), Sign::Plus, cap)
}

/// X_t(z) = q_i^{−t} e^{z/2} − q_i^{t} e^{−z/2}.
pub fn x_t(gcm: &Gcm, i: usize, t: &Q, n_hbar: usize, cap: i64) -> LaurentSeries {
    let ri = qi(gcm.r(i));
    let a = LaurentSeries::exp_linear(Z, &qf(1, 2), cap, n_hbar).scale(&q_pow(&(-(&ri * t)), n_hbar));
    let b = LaurentSeries::exp_linear(Z, &qf(-1, 2), cap, n_hbar).scale(&q_pow(&(&ri * t), n_hbar));
    &a - &b
}

/// f_{ij,ħ}(z) = X_{a_ij/2}(z) / (e^{z/2} − e^{−z/2})^{δ_ij}.
pub fn f_hbar(gcm: &Gcm, i: usize, j: usize, n_hbar: usize, cap: i64) -> Result<LaurentSeries> {
    let work = cap + 4;
    let num = x_t(gcm, i, &qf(gcm.a(i, j), 2), n_hbar, work);
    if i != j {
        return Ok(num.truncate_prec(cap));
    }
    let den = &LaurentSeries::exp_linear(Z, &qf(1, 2), work, n_hbar)
        - &LaurentSeries::exp_linear(Z, &qf(-1, 2), work, n_hbar);
    Ok(num.div(&den, work)?.truncate_prec(cap))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid() {
        assert_eq!(Gcm::b2().symmetrizers(), &[1, 2]);
        assert_eq!(Gcm::b2().r_lcm(), 2);
        assert_eq!(Gcm::a2().symmetrizers(), &[1, 1]);
        assert_eq!(Gcm::a1_affine().symmetrizers(), &[1, 1]);
        assert_eq!(Gcm::a1xa1().symmetrizers(), &[1, 1]);
        assert_eq!(Gcm::a2().m_ij(0, 1), Some(2));
        assert_eq!(Gcm::a2().m_ij(0, 0), None);
        assert_eq!(Gcm::a2().c_ij(0, 0), 1);
        assert_eq!(Gcm::a2().c_ij(0, 1), -1);
    }

    #[test]
    fn invalid_matrices_rejected() {
        assert!(Gcm::new("x", vec![vec![2, 1], vec![-1, 2]], None).is_err());
        assert!(Gcm::new("x", vec![vec![2, 0], vec![-1, 2]], None).is_err());
        assert!(Gcm::new("x", vec![vec![3]], None).is_err());
        assert!(Gcm::new("x", vec![vec![2, -1], vec![-1, 2]], Some(vec![1, 2])).is_err());
        let cyc = vec![vec![2, -1, -1], vec![-2, 2, -1], vec![-1, -1, 2]];
        assert!(Gcm::new("x", cyc, None).is_err());
    }

    #[test]
    fn parse_presets_and_inline() {
        assert_eq!("A2".parse::<Gcm>().unwrap().rank(), 2);
        assert_eq!("A1^(1)".parse::<Gcm>().unwrap(), Gcm::a1_affine());
        let g: Gcm = "[[2,-3],[-1,2]]".parse().unwrap();
        assert_eq!(g.symmetrizers(), &[1, 3]);
        let h: Gcm = r#"{"matrix": [[2,-1],[-2,2]], "symmetrizers": [2,1]}"#.parse().unwrap();
        assert_eq!(h.symmetrizers(), &[2, 1]);
        assert!("E9".parse::<Gcm>().is_err());
    }

    #[test]
    fn g_q_values() {
        let g = Gcm::a2();
        let f = g_q(&g, 0, 1, 4);
        assert_eq!(f.eval(&HbarScalar::zero(4)).unwrap(), q_pow(&qi(-1), 4));
        assert_eq!(f.classical_part().unwrap(), RationalFunction::one(4));
        assert_eq!(f_q(&g, 0, 0, 4).den().degree(), Some(1));
        assert_eq!(f_q(&g, 0, 1, 4).den().degree(), Some(0));
    }

    fn g_hbar_direct(gcm: &Gcm, i: usize, j: usize, n: usize, cap: i64) -> LaurentSeries {
        let work = cap + 6;
        let qa = LaurentSeries::constant(Z, q_sym(gcm, i, j, n));
        let em = LaurentSeries::exp_linear(Z, &qi(-1), work, n);
        let num = &LaurentSeries::one(Z, n) - &(&qa * &em);
        let den = &qa - &em;
        num.div(&den, work).unwrap().truncate_prec(cap)
    }

    #[test]
    fn g_hbar_matches_direct_expansion() {
        for gcm in Gcm::presets() {
            for (i, j) in gcm.pairs() {
                let a = g_hbar(&gcm, i, j, 4, 8).unwrap();
                let b = g_hbar_direct(&gcm, i, j, 4, 8);
                assert!(a.agrees_upto(&b, 7).unwrap(), "{gcm} {i}{j}");
                let m = exp_substitute(&g_q(&gcm, i, j, 4), Sign::Minus, 8).unwrap();
                assert!(m.agrees_upto(&a.reflect(), 7).unwrap());
                let wide = g_hbar(&gcm, i, j, 4, 14).unwrap();
                let prod = &wide * &wide.reflect();
                assert!(prod.agrees_upto(&LaurentSeries::one(Z, 4), 7).unwrap());
            }
        }
    }

    #[test]
    fn f_hbar_swap_identity() {
        for gcm in Gcm::presets() {
            for (i, j) in gcm.pairs() {
                let lhs = f_hbar(&gcm, i, j, 4, 8).unwrap();
                let g = g_hbar(&gcm, i, j, 4, 16).unwrap();
                let rhs = (&g * &f_hbar(&gcm, j, i, 4, 16).unwrap().reflect())
                    .scale_q(&qi(gcm.c_ij(i, j)));
                assert!(lhs.agrees_upto(&rhs, 7).unwrap(), "{gcm} {i}{j}");
            }
        }
    }

    #[test]
    fn zero_entry_gives_trivial_functions() {
        let gcm = Gcm::a1xa1();
        assert!(g_hbar(&gcm, 0, 1, 4, 8).unwrap().agrees_upto(&LaurentSeries::one(Z, 4), 7).unwrap());
        let f = f_hbar(&gcm, 0, 1, 4, 8).unwrap();
        let ex = &LaurentSeries::exp_linear(Z, &qf(1, 2), 8, 4) - &LaurentSeries::exp_linear(Z, &qf(-1, 2), 8, 4);
        assert!(f.agrees_upto(&ex, 7).unwrap());
    }

    #[test]
    fn f_hbar_classical_limit() {
        let gcm = Gcm::a2();
        let f = f_hbar(&gcm, 0, 0, 3, 6).unwrap();
        assert_eq!(f.coeff(0).unwrap().classical(), &qi(1));
        assert!(f.coeff(-1).unwrap().classical().is_zero());
        assert!(!f.coeff(-1).unwrap().is_zero());
    }
}
