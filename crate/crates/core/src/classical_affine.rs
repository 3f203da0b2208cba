//! Classical ground truth: sl_{n+1} in its matrix realization, the affine Lie algebra of
//! its modes and the graded vacuum module V(ℓ, 0).
//!
//! Normalization: h_i = E_ii − E_{i+1,i+1}, x_i^+ = E_{i,i+1}, x_i^- = E_{i+1,i} and
//! ⟨a, b⟩ = tr(ab). With r_i = r = 1 the mode bracket
//! [a(m), b(n)] = [a, b](m+n) + m δ_{m+n,0} ⟨a, b⟩ r c reproduces the three defining
//! relations verbatim; `check_defining_relations` tests this.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use num::{One, Zero};
use rand::Rng;

use crate::cartan_data::{Gcm, Level};
use crate::error::{Error, Result};
use crate::report::{Check, Entry, Report};
use crate::scalars::{binom_i, factorial, qi, Q};
use crate::series::Sign;
use crate::Trunc;

pub type Mat = Vec<Vec<Q>>;

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| &a[i][k] * &b[k][j]).sum()).collect())
        .collect()
}

fn commutator(a: &Mat, b: &Mat) -> Mat {
    let (ab, ba) = (mat_mul(a, b), mat_mul(b, a));
    ab.iter()
        .zip(&ba)
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p - q).collect())
        .collect()
}

fn unit(n: usize, a: usize, b: usize) -> Mat {
    let mut m = vec![vec![Q::zero(); n]; n];
    m[a][b] = Q::one();
    m
}

/// sl_{n+1}: Cartan elements h_1..h_n first, then the matrix units E_ab with a ≠ b.
#[derive(Clone, Debug)]
pub struct MatrixLie {
    size: usize,
    names: Vec<String>,
    mats: Vec<Mat>,
    units: HashMap<(usize, usize), usize>,
    brackets: Vec<Vec<Vec<(usize, Q)>>>,
    forms: Vec<Vec<Q>>,
}

impl MatrixLie {
    pub fn sl(size: usize) -> Self {
        let mut names = Vec::new();
        let mut mats = Vec::new();
        for i in 0..size - 1 {
            let mut m = unit(size, i, i);
            m[i + 1][i + 1] = -Q::one();
            names.push(format!("h{i}"));
            mats.push(m);
        }
        let mut units = HashMap::new();
        for a in 0..size {
            for b in 0..size {
                if a != b {
                    units.insert((a, b), mats.len());
                    names.push(format!("e{a}{b}"));
                    mats.push(unit(size, a, b));
                }
            }
        }
        let mut lie = MatrixLie {
            size,
            names,
            mats,
            units,
            brackets: Vec::new(),
            forms: Vec::new(),
        };
        let d = lie.dim();
        lie.brackets = (0..d)
            .map(|p| (0..d).map(|q| lie.decompose(&commutator(&lie.mats[p], &lie.mats[q]))).collect())
            .collect();
        lie.forms = (0..d)
            .map(|p| {
                (0..d)
                    .map(|q| {
                        let m = mat_mul(&lie.mats[p], &lie.mats[q]);
                        (0..size).map(|i| m[i][i].clone()).sum()
                    })
                    .collect()
            })
            .collect();
        lie
    }

    /// Coordinates of a trace-zero matrix in the basis.
    pub fn decompose(&self, m: &Mat) -> Vec<(usize, Q)> {
        let mut out = Vec::new();
        let mut running = Q::zero();
        for i in 0..self.size - 1 {
            running += &m[i][i];
            if !running.is_zero() {
                out.push((i, running.clone()));
            }
        }
        for a in 0..self.size {
            for b in 0..self.size {
                if a != b && !m[a][b].is_zero() {
                    out.push((self.units[&(a, b)], m[a][b].clone()));
                }
            }
        }
        out.sort_by_key(|(k, _)| *k);
        out
    }

    pub fn dim(&self) -> usize {
        self.mats.len()
    }

    pub fn rank(&self) -> usize {
        self.size - 1
    }

    pub fn name(&self, p: usize) -> &str {
        &self.names[p]
    }

    pub fn matrix(&self, p: usize) -> &Mat {
        &self.mats[p]
    }

    pub fn bracket(&self, p: usize, q: usize) -> &[(usize, Q)] {
        &self.brackets[p][q]
    }

    pub fn form(&self, p: usize, q: usize) -> &Q {
        &self.forms[p][q]
    }

    pub fn h(&self, i: usize) -> usize {
        i
    }

    pub fn x(&self, s: Sign, i: usize) -> usize {
        match s {
            Sign::Plus => self.units[&(i, i + 1)],
            Sign::Minus => self.units[&(i + 1, i)],
        }
    }
}

/// Finite combination of modes a(n) plus a multiple of the central element.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ModeComb {
    pub modes: BTreeMap<(usize, i64), Q>,
    pub central: Q,
}

impl ModeComb {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn mode(b: usize, n: i64) -> Self {
        let mut m = Self::zero();
        m.modes.insert((b, n), Q::one());
        m
    }

    pub fn central(c: Q) -> Self {
        ModeComb {
            modes: BTreeMap::new(),
            central: c,
        }
    }

    pub fn add_mode(&mut self, b: usize, n: i64, c: &Q) {
        let e = self.modes.entry((b, n)).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.modes.remove(&(b, n));
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((b, n), c) in &other.modes {
            out.add_mode(*b, *n, c);
        }
        out.central += &other.central;
        out
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        ModeComb {
            modes: self.modes.iter().map(|(k, v)| (*k, v * c)).collect(),
            central: &self.central * c,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.modes.is_empty() && self.central.is_zero()
    }
}

/// Loop algebra of sl_{n+1} with central extension, for a type A Cartan matrix.
#[derive(Clone, Debug)]
pub struct AffineAlgebra {
    gcm: Gcm,
    lie: MatrixLie,
    r: i64,
}

impl AffineAlgebra {
    pub fn new(gcm: &Gcm) -> Result<Self> {
        let n = gcm
            .type_a_rank()
            .filter(|_| gcm.symmetrizers().iter().all(|r| *r == 1))
            .ok_or_else(|| Error::InvalidGcm(format!("{} has no matrix realization (type A with r_i = 1 only)", gcm.name())))?;
        Ok(AffineAlgebra {
            gcm: gcm.clone(),
            lie: MatrixLie::sl(n + 1),
            r: gcm.r_lcm(),
        })
    }

    pub fn lie(&self) -> &MatrixLie {
        &self.lie
    }

    pub fn gcm(&self) -> &Gcm {
        &self.gcm
    }

    /// [a(m), b(n)].
    pub fn bracket_modes(&self, a: usize, m: i64, b: usize, n: i64) -> ModeComb {
        let mut out = ModeComb::zero();
        for (c, k) in self.lie.bracket(a, b) {
            out.add_mode(*c, m + n, k);
        }
        if m + n == 0 {
            out.central = self.lie.form(a, b) * qi(m * self.r);
        }
        out
    }

    pub fn bracket(&self, x: &ModeComb, y: &ModeComb) -> ModeComb {
        let mut out = ModeComb::zero();
        for ((a, m), c) in &x.modes {
            for ((b, n), d) in &y.modes {
                out = out.add(&self.bracket_modes(*a, *m, *b, *n).scale(&(c * d)));
            }
        }
        out
    }

    /// u_k v for basis elements: [u, v] at k = 0, ⟨u, v⟩ r K at k = 1.
    pub fn product(&self, u: usize, k: u32, v: usize) -> ConfElem {
        let mut e = ConfElem::default();
        match k {
            0 => {
                for (c, x) in self.lie.bracket(u, v) {
                    e.terms.insert((*c, 0), x.clone());
                }
            }
            1 => e.k = self.lie.form(u, v) * qi(self.r),
            _ => {}
        }
        e
    }

    /// The mode expansion of a conformal element: (T^j a)(n) = (−1)^j n(n−1)⋯(n−j+1) a(n−j), K(n) = δ_{n,−1} c.
    pub fn conf_mode(&self, e: &ConfElem, n: i64) -> ModeComb {
        let mut out = ModeComb::zero();
        for ((a, j), c) in &e.terms {
            let falling: i64 = (0..*j as i64).map(|t| n - t).product();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            out.add_mode(*a, n - *j as i64, &(c * qi(sign * falling)));
        }
        if n == -1 {
            out.central += &e.k;
        }
        out
    }

    /// [u(m), v(n)] = Σ_k binom(m, k) (u_k v)(m + n − k).
    pub fn coefficient_bracket(&self, u: usize, m: i64, v: usize, n: i64) -> ModeComb {
        let mut out = ModeComb::zero();
        for k in 0..2u32 {
            let prod = self.product(u, k, v);
            out = out.add(&self.conf_mode(&prod, m + n - k as i64).scale(&binom_i(m, k as usize)));
        }
        out
    }

    /// u_k v = Σ_j (−1)^{k+j+1} T^j (v_{k+j} u)/j! for every k.
    pub fn skew_symmetry_holds(&self, u: usize, v: usize) -> bool {
        (0..3u32).all(|k| {
            let lhs = self.product(u, k, v);
            let mut rhs = ConfElem::default();
            for j in 0..3u32 {
                let sign = if (k + j + 1) % 2 == 0 { 1 } else { -1 };
                let c = qi(sign) / factorial(j as usize);
                rhs = rhs.add(&self.product(v, k + j, u).t_pow(j).scale(&c));
            }
            lhs == rhs
        })
    }
}

/// Element of g[T] ⊕ C K: coefficients on T^j a, and on K (with T K = 0).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConfElem {
    pub terms: BTreeMap<(usize, u32), Q>,
    pub k: Q,
}

impl ConfElem {
    fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (key, c) in &other.terms {
            let e = out.terms.entry(*key).or_insert_with(Q::zero);
            *e += c;
            if e.is_zero() {
                out.terms.remove(key);
            }
        }
        out.k += &other.k;
        out
    }

    fn scale(&self, c: &Q) -> Self {
        ConfElem {
            terms: self.terms.iter().filter(|_| !c.is_zero()).map(|(k, v)| (*k, v * c)).collect(),
            k: &self.k * c,
        }
    }

    fn t_pow(&self, j: u32) -> Self {
        ConfElem {
            terms: self.terms.iter().map(|((a, p), c)| ((*a, p + j), c.clone())).collect(),
            k: if j == 0 { self.k.clone() } else { Q::zero() },
        }
    }
}

/// PBW monomial b_1(−n_1)⋯b_k(−n_k)·vac stored as sorted (b, n) with n ≥ 1.
pub type Monomial = Vec<(usize, i64)>;

fn weight(m: &[(usize, i64)]) -> i64 {
    m.iter().map(|(_, n)| n).sum()
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FockState {
    terms: BTreeMap<Monomial, Q>,
}

impl FockState {
    pub fn vacuum() -> Self {
        Self::monomial(Vec::new())
    }

    pub fn monomial(m: Monomial) -> Self {
        let mut s = Self::default();
        s.terms.insert(m, Q::one());
        s
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &[(usize, i64)]) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add_scaled(&mut self, other: &Self, c: &Q) {
        if c.is_zero() {
            return;
        }
        for (m, x) in &other.terms {
            let e = self.terms.entry(m.clone()).or_insert_with(Q::zero);
            *e += x * c;
            if e.is_zero() {
                self.terms.remove(m);
            }
        }
    }

    pub fn scale_by(&self, c: &Q) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &-Q::one());
        out
    }

    /// Largest weight among the monomials.
    pub fn weight(&self) -> Option<i64> {
        self.terms.keys().map(|m| weight(m)).max()
    }
}

/// The vacuum module U(ĝ) ⊗ C_ℓ truncated at a weight cap.
pub struct FockSpace {
    alg: AffineAlgebra,
    level: Q,
    cap: u32,
    cache: RefCell<HashMap<(usize, i64, Monomial), FockState>>,
}

impl FockSpace {
    pub fn new(alg: AffineAlgebra, level: &Level, cap: u32) -> Self {
        FockSpace {
            alg,
            level: level.ell.clone(),
            cap,
            cache: RefCell::new(HashMap::new()),
        }
    }

    pub fn algebra(&self) -> &AffineAlgebra {
        &self.alg
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    /// b(m) acting on a state.
    pub fn act(&self, b: usize, m: i64, s: &FockState) -> Result<FockState> {
        let mut out = FockState::zero();
        for (mono, c) in &s.terms {
            out.add_scaled(&self.mul_left(b, m, mono)?, c);
        }
        Ok(out)
    }

    pub fn act_comb(&self, x: &ModeComb, s: &FockState) -> Result<FockState> {
        let mut out = FockState::zero();
        for ((b, m), c) in &x.modes {
            out.add_scaled(&self.act(*b, *m, s)?, c);
        }
        out.add_scaled(s, &(&x.central * &self.level));
        Ok(out)
    }

    fn mul_left(&self, b: usize, m: i64, mono: &[(usize, i64)]) -> Result<FockState> {
        let w = weight(mono) - m;
        if w < 0 {
            return Ok(FockState::zero());
        }
        if w > self.cap as i64 {
            return Err(Error::WeightOverflow {
                weight: w as u32,
                cap: self.cap,
            });
        }
        if mono.is_empty() {
            return Ok(if m < 0 {
                FockState::monomial(vec![(b, -m)])
            } else {
                FockState::zero()
            });
        }
        if m < 0 && (b, -m) <= mono[0] {
            let mut v = Vec::with_capacity(mono.len() + 1);
            v.push((b, -m));
            v.extend_from_slice(mono);
            return Ok(FockState::monomial(v));
        }
        let key = (b, m, mono.to_vec());
        if let Some(s) = self.cache.borrow().get(&key) {
            return Ok(s.clone());
        }
        let (c, k) = mono[0];
        let rest = &mono[1..];
        // b(m) c(−k) rest = c(−k) b(m) rest + [b(m), c(−k)] rest.
        let inner = self.mul_left(b, m, rest)?;
        let mut out = self.act(c, -k, &inner)?;
        let br = self.alg.bracket_modes(b, m, c, -k);
        out.add_scaled(&self.act_comb(&br, &FockState::monomial(rest.to_vec()))?, &Q::one());
        self.cache.borrow_mut().insert(key, out.clone());
        Ok(out)
    }

    /// PBW monomials of weight `w`.
    pub fn basis(&self, w: u32) -> Vec<Monomial> {
        let d = self.alg.lie.dim();
        let mut out = Vec::new();
        fn rec(d: usize, left: i64, min: (usize, i64), cur: &mut Monomial, out: &mut Vec<Monomial>) {
            if left == 0 {
                out.push(cur.clone());
                return;
            }
            for b in min.0..d {
                let lo = if b == min.0 { min.1 } else { 1 };
                for n in lo..=left {
                    cur.push((b, n));
                    rec(d, left - n, (b, n), cur, out);
                    cur.pop();
                }
            }
        }
        rec(d, w as i64, (0, 1), &mut Vec::new(), &mut out);
        out
    }

    pub fn graded_dim(&self, w: u32) -> usize {
        self.basis(w).len()
    }

    /// Σ_i (−1)^i binom(N, i) [a(n−i), b(m+i)] on every basis state up to the cap, for every
    /// window of modes keeping intermediate states within the space. Returns the first
    /// nonzero instance.
    pub fn locality_violation(&self, a: usize, b: usize, order: u32, state_cap: u32) -> Result<Option<String>> {
        let room = self.cap as i64 - state_cap as i64;
        for w in 0..=state_cap {
            for mono in self.basis(w) {
                let v = FockState::monomial(mono.clone());
                let w = w as i64;
                for s in (w - state_cap as i64)..=w {
                    for n in -room..=(state_cap as i64 + 1 + order as i64) {
                        let m = s - n;
                        let mut total = FockState::zero();
                        let mut inside = true;
                        for i in 0..=order as i64 {
                            let (p, q) = (n - i, m + i);
                            if w - p > self.cap as i64 || w - q > self.cap as i64 {
                                inside = false;
                                break;
                            }
                            let ab = self.act(a, p, &self.act(b, q, &v)?)?;
                            let ba = self.act(b, q, &self.act(a, p, &v)?)?;
                            let sign = if i % 2 == 0 { 1 } else { -1 };
                            total.add_scaled(&ab.sub(&ba), &(binom_i(order as i64, i as usize) * qi(sign)));
                        }
                        if inside && !total.is_zero() {
                            return Ok(Some(format!(
                                "n={n} m={m} on {}",
                                self.describe(&mono)
                            )));
                        }
                    }
                }
            }
        }
        Ok(None)
    }

    pub fn describe(&self, mono: &[(usize, i64)]) -> String {
        if mono.is_empty() {
            return "vac".into();
        }
        mono.iter()
            .map(|(b, n)| format!("{}(-{n})", self.alg.lie.name(*b)))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Coefficient of q^w in Π_{n≥1} (1 − q^n)^{−d}.
pub fn pbw_generating_count(d: usize, w: u32) -> u128 {
    let w = w as usize;
    let mut series = vec![0u128; w + 1];
    series[0] = 1;
    for n in 1..=w {
        for _ in 0..d {
            // Multiply by 1/(1 − q^n).
            for k in n..=w {
                series[k] += series[k - n];
            }
        }
    }
    series[w]
}

/// (L1)–(L3) on modes, read off from the matrix realization.
pub fn check_defining_relations(alg: &AffineAlgebra, window: i64) -> Vec<Check> {
    let gcm = alg.gcm();
    let lie = alg.lie();
    let r = gcm.r_lcm();
    let mut checks = Vec::new();
    for (i, j) in gcm.pairs() {
        let (mut l1, mut l2, mut l3) = (true, true, true);
        for m in -window..=window {
            for n in -window..=window {
                let d = i64::from(m + n == 0);
                let got = alg.bracket_modes(lie.h(i), m, lie.h(j), n);
                l1 &= got == ModeComb::central(qi(gcm.sym(i, j) * r * m * d));
                for s in [Sign::Plus, Sign::Minus] {
                    let got = alg.bracket_modes(lie.h(i), m, lie.x(s, j), n);
                    let want = ModeComb::mode(lie.x(s, j), m + n).scale(&(s.as_q() * qi(gcm.sym(i, j))));
                    l2 &= got == want;
                }
                let got = alg.bracket_modes(lie.x(Sign::Plus, i), m, lie.x(Sign::Minus, j), n);
                let want = if i == j {
                    let ri = qi(gcm.r(i));
                    ModeComb::mode(lie.h(i), m + n)
                        .add(&ModeComb::central(qi(r * m * d)))
                        .scale(&ri.recip())
                } else {
                    ModeComb::zero()
                };
                l3 &= got == want;
            }
        }
        let lbl = format!("({i},{j})");
        checks.push(Check::from_bool(format!("L1 {lbl}"), l1, "h-h bracket differs"));
        checks.push(Check::from_bool(format!("L2 {lbl}"), l2, "h-x bracket differs"));
        checks.push(Check::from_bool(format!("L3 {lbl}"), l3, "x+-x- bracket differs"));
    }
    checks
}

fn random_comb<R: Rng>(rng: &mut R, d: usize) -> ModeComb {
    let mut m = ModeComb::zero();
    for _ in 0..rng.gen_range(1..=2) {
        m.add_mode(rng.gen_range(0..d), rng.gen_range(-4..=4), &qi(rng.gen_range(1..=3)));
    }
    if rng.gen_bool(0.1) {
        m.central = qi(1);
    }
    m
}

/// Jacobi identity on random mode combinations; returns the first failing triple.
pub fn jacobi_violation<R: Rng>(alg: &AffineAlgebra, samples: usize, rng: &mut R) -> Option<String> {
    let d = alg.lie().dim();
    for _ in 0..samples {
        let (x, y, z) = (random_comb(rng, d), random_comb(rng, d), random_comb(rng, d));
        let s = alg
            .bracket(&x, &alg.bracket(&y, &z))
            .add(&alg.bracket(&y, &alg.bracket(&z, &x)))
            .add(&alg.bracket(&z, &alg.bracket(&x, &y)));
        if !s.is_zero() {
            return Some(format!("{x:?} {y:?} {z:?}"));
        }
    }
    None
}

/// Graded dimensions, defining relations, locality, Jacobi and conformal skew-symmetry.
pub fn check_classical<R: Rng>(gcm: &Gcm, level: &Level, trunc: Trunc, weight_cap: u32, jacobi_samples: usize, rng: &mut R) -> Result<Report> {
    let alg = AffineAlgebra::new(gcm)?;
    let lie = alg.lie().clone();
    let mut entries = Vec::new();

    let dims_space = FockSpace::new(alg.clone(), level, weight_cap);
    let mut dims = Vec::new();
    for w in 0..=weight_cap {
        let count = dims_space.graded_dim(w);
        let oracle = pbw_generating_count(lie.dim(), w);
        dims.push(Check::from_bool(
            format!("graded dim {w} = {count}"),
            count as u128 == oracle,
            format!("generating function gives {oracle}"),
        ));
    }
    entries.push(Entry::new("graded dimensions", dims));

    entries.push(Entry::new("defining relations", check_defining_relations(&alg, 4)));

    let mut br = Vec::new();
    let mut skew = true;
    for p in 0..lie.dim() {
        for q in 0..lie.dim() {
            skew &= alg.skew_symmetry_holds(p, q);
            for m in -3..=3 {
                for n in -3..=3 {
                    if alg.coefficient_bracket(p, m, q, n) != alg.bracket_modes(p, m, q, n) {
                        br.push(format!("{}({m}) {}({n})", lie.name(p), lie.name(q)));
                    }
                }
            }
        }
    }
    entries.push(Entry::new(
        "conformal data",
        vec![
            Check::from_bool("coefficient bracket", br.is_empty(), br.first().cloned().unwrap_or_default()),
            Check::from_bool("skew-symmetry", skew, "u_k v differs from its skew expansion"),
        ],
    ));

    // Locality on states to the cap, with room for intermediate states.
    let space = FockSpace::new(alg.clone(), level, weight_cap + 3);
    let mut loc = Vec::new();
    for i in 0..lie.rank() {
        let pairs = [
            ("h,h", lie.h(i), lie.h(i), 2u32),
            ("x+,x-", lie.x(Sign::Plus, i), lie.x(Sign::Minus, i), 2),
            ("h,x+", lie.h(i), lie.x(Sign::Plus, i), 1),
            ("x+,x+", lie.x(Sign::Plus, i), lie.x(Sign::Plus, i), 0),
        ];
        for (name, a, b, order) in pairs {
            let v = space.locality_violation(a, b, order, weight_cap)?;
            loc.push(Check::from_bool(format!("N({name}) = {order} at {i}"), v.is_none(), v.unwrap_or_default()));
            if order > 0 {
                let v = space.locality_violation(a, b, order - 1, weight_cap)?;
                loc.push(Check::from_bool(
                    format!("N({name}) = {order} sharp at {i}"),
                    v.is_some(),
                    "lower order already annihilates",
                ));
            }
        }
    }
    entries.push(Entry::new("locality", loc));

    let jac = jacobi_violation(&alg, jacobi_samples, rng);
    entries.push(Entry::new(
        "jacobi",
        vec![Check::from_bool(format!("jacobi on {jacobi_samples} triples"), jac.is_none(), jac.unwrap_or_default())],
    ));

    Ok(Report::new("classical-affine", gcm.name(), &level.to_string(), trunc.n_hbar, trunc.m_z, entries)
        .with_weight_cap(weight_cap))
}

/// Classical Cartan bracket [h_i(m), h_j(−m)] = r_i a_ij r ℓ m on the vacuum module.
pub fn cartan_bracket_on_vacuum(gcm: &Gcm, level: &Level, i: usize, j: usize, m: i64) -> Result<Q> {
    let alg = AffineAlgebra::new(gcm)?;
    let (hi, hj) = (alg.lie().h(i), alg.lie().h(j));
    let space = FockSpace::new(alg, level, m.unsigned_abs() as u32);
    let v = FockState::vacuum();
    let lhs = space.act(hi, m, &space.act(hj, -m, &v)?)?;
    let rhs = space.act(hj, -m, &space.act(hi, m, &v)?)?;
    let diff = lhs.sub(&rhs);
    if diff.terms.keys().any(|k| !k.is_empty()) {
        return Err(Error::Mismatch("Cartan bracket leaves the vacuum line".into()));
    }
    Ok(diff.coeff(&[]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sl2() -> AffineAlgebra {
        AffineAlgebra::new(&Gcm::a1()).unwrap()
    }

    #[test]
    fn sl2_graded_dims() {
        let s = FockSpace::new(sl2(), &Level::int(1), 6);
        let dims: Vec<usize> = (0..=4).map(|w| s.graded_dim(w)).collect();
        assert_eq!(dims, vec![1, 3, 9, 22, 51]);
        for w in 0..=6 {
            assert_eq!(s.graded_dim(w) as u128, pbw_generating_count(3, w));
        }
    }

    #[test]
    fn sample_actions() {
        let alg = sl2();
        let lie = alg.lie().clone();
        let s = FockSpace::new(alg, &Level::int(1), 4);
        let vac = FockState::vacuum();
        let h1 = s.act(lie.h(0), -1, &vac).unwrap();
        assert_eq!(h1, FockState::monomial(vec![(lie.h(0), 1)]));
        let back = s.act(lie.h(0), 1, &h1).unwrap();
        assert_eq!(back, FockState::vacuum().scale_by(&qi(2)));
        assert!(s.act(lie.x(Sign::Plus, 0), 0, &vac).unwrap().is_zero());
        let xm = s.act(lie.x(Sign::Minus, 0), -1, &vac).unwrap();
        let r = s.act(lie.x(Sign::Plus, 0), 1, &xm).unwrap();
        assert_eq!(r, FockState::vacuum());
        // [h(0), x^±(n)] = ±2 x^±(n).
        let br = s.algebra().bracket_modes(lie.h(0), 0, lie.x(Sign::Minus, 0), 3);
        assert_eq!(br, ModeComb::mode(lie.x(Sign::Minus, 0), 3).scale(&qi(-2)));
    }

    #[test]
    fn straightening_respects_bracket() {
        let alg = sl2();
        let d = alg.lie().dim();
        let s = FockSpace::new(alg.clone(), &Level::int(2), 5);
        for mono in s.basis(2) {
            let v = FockState::monomial(mono);
            for a in 0..d {
                for b in 0..d {
                    for (m, n) in [(1, -2), (2, -1), (0, -1), (1, 1), (-1, 2)] {
                        let lhs = s.act(a, m, &s.act(b, n, &v).unwrap()).unwrap().sub(&s.act(b, n, &s.act(a, m, &v).unwrap()).unwrap());
                        let rhs = s.act_comb(&alg.bracket_modes(a, m, b, n), &v).unwrap();
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn sl3_relations_and_jacobi() {
        let alg = AffineAlgebra::new(&Gcm::a2()).unwrap();
        assert_eq!(alg.lie().dim(), 8);
        assert!(check_defining_relations(&alg, 3).iter().all(|c| c.pass));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert_eq!(jacobi_violation(&alg, 100, &mut rng), None);
    }

    #[test]
    fn non_type_a_rejected() {
        assert!(AffineAlgebra::new(&Gcm::b2()).is_err());
    }

    #[test]
    fn locality_orders_small() {
        let alg = sl2();
        let lie = alg.lie().clone();
        let s = FockSpace::new(alg, &Level::int(1), 5);
        assert_eq!(s.locality_violation(lie.h(0), lie.h(0), 2, 2).unwrap(), None);
        assert!(s.locality_violation(lie.h(0), lie.h(0), 1, 2).unwrap().is_some());
    }

    #[test]
    fn cartan_bracket_value() {
        assert_eq!(cartan_bracket_on_vacuum(&Gcm::a1(), &Level::int(1), 0, 0, 1).unwrap(), qi(2));
        assert_eq!(cartan_bracket_on_vacuum(&Gcm::a2(), &Level::int(3), 0, 1, 2).unwrap(), qi(-6));
    }
}
