//! Quantum Heisenberg sector: structure constants read off the ψψ relation, the Fock
//! module on creation modes, linear fields, their exponentials, and the identities of the
//! Cartan sector (exchange relation, the E-field identity, the deformed Cartan commutator).
//!
//! Mode conventions are stored per field: ψ_i(z) = Σ ψ_i(n) z^{-n} for the quantum fields
//! and h_i(z) = Σ h_i(n) z^{-n-1} for the classical ones.

use std::collections::BTreeMap;
use std::fmt;

use num::Zero;

use crate::cartan_data::{g_q, Gcm, Level};
use crate::classical_affine::cartan_bracket_on_vacuum;
use crate::error::{Error, Result};
use crate::report::{Check, Entry, Report};
use crate::scalars::{f_unit, q_int_base, q_pow, qf, qi, HbarScalar, Q};
use crate::series::{
    exp_substitute, iota_additive, iota_expand, Direction, Distribution2, LaurentSeries, ModeConvention,
    RationalFunction, Sign,
};
use crate::shiftops::{DiffOperator, Euler};
use crate::tau_group::{PaperTau, TauTuple};
use crate::Trunc;

type Op = DiffOperator<Euler>;

/// Right side of the ψψ relation on the grid of radius m: cell (a, b) holds the
/// coefficient of z1^a z2^b.
pub fn relation_grid(gcm: &Gcm, level: &Level, i: usize, j: usize, m: i64, n_hbar: usize) -> Result<Distribution2> {
    let kernel = RationalFunction::from_ints(&[0, 1], &[1, -2, 1], n_hbar)?;
    let near = iota_expand(&kernel, Direction::ZAdic, m + 1)?;
    let far = iota_expand(&kernel, Direction::InverseZAdic, m + 1)?;
    let rl = level.r_ell(gcm);
    let ints = Op::q_int_op(&qi(gcm.sym(i, j)), n_hbar).compose(&Op::q_int_op(&rl, n_hbar));
    let near_op = ints.compose(&Op::shift_op(&-&rl, n_hbar));
    let far_op = ints.compose(&Op::shift_op(&rl, n_hbar));
    let mut out = Distribution2::zero(m, n_hbar);
    for k in -m..=m {
        // z2∂z2 acts on (z2/z1)^k by k.
        let x = qi(k);
        let c = &(&near.coeff_or_zero(k) * &near_op.eval(&x)) - &(&far.coeff_or_zero(-k) * &far_op.eval(&x));
        out.add_at(-k, k, &c);
    }
    Ok(out)
}

/// κ_{ij,m} = m [r_i a_ij]_{q^m} [rℓ]_{q^m} q^{-rℓ|m|}.
pub fn kappa_closed_form(gcm: &Gcm, level: &Level, i: usize, j: usize, m: i64, n_hbar: usize) -> HbarScalar {
    if m == 0 {
        return HbarScalar::zero(n_hbar);
    }
    let rl = level.r_ell(gcm);
    let base = qi(m);
    let a = q_int_base(&qi(gcm.sym(i, j)), &base, n_hbar);
    let b = q_int_base(&rl, &base, n_hbar);
    let shift = q_pow(&(-&rl * qi(m.abs())), n_hbar);
    (&(&a * &b) * &shift).scale(&qi(m))
}

/// Creation monomial ψ_{i_1}(-n_1)⋯ψ_{i_k}(-n_k)·vac, sorted, n ≥ 1.
pub type QMonomial = Vec<(usize, i64)>;

fn weight(m: &[(usize, i64)]) -> i64 {
    m.iter().map(|(_, n)| n).sum()
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QFockState {
    terms: BTreeMap<QMonomial, HbarScalar>,
}

impl QFockState {
    pub fn vacuum(n_hbar: usize) -> Self {
        Self::monomial(Vec::new(), HbarScalar::one(n_hbar))
    }

    pub fn monomial(m: QMonomial, c: HbarScalar) -> Self {
        let mut s = Self::default();
        s.add_term(m, &c);
        s
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&QMonomial, &HbarScalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &[(usize, i64)]) -> Option<&HbarScalar> {
        self.terms.get(m)
    }

    fn add_term(&mut self, m: QMonomial, c: &HbarScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Self, c: &HbarScalar) {
        for (m, x) in &other.terms {
            self.add_term(m.clone(), &(x * c));
        }
    }

    pub fn add(&mut self, other: &Self) {
        for (m, x) in &other.terms {
            self.add_term(m.clone(), x);
        }
    }

    pub fn scale(&self, c: &HbarScalar) -> Self {
        let mut out = Self::default();
        out.add_scaled(self, c);
        out
    }

    pub fn scale_q(&self, c: &Q) -> Self {
        let mut out = Self::default();
        for (m, x) in &self.terms {
            out.add_term(m.clone(), &x.scale(c));
        }
        out
    }

    pub fn weight(&self) -> Option<i64> {
        self.terms.keys().map(|m| weight(m)).max()
    }
}

/// Heisenberg algebra [ψ_i(m), ψ_j(n)] = δ_{m+n,0} κ_{ij,m} acting on its Fock module.
#[derive(Clone, Debug)]
pub struct Heisenberg {
    rank: usize,
    n_hbar: usize,
    window: i64,
    convention: ModeConvention,
    kappa: Vec<Vec<Vec<HbarScalar>>>,
}

impl Heisenberg {
    /// Structure constants read off the ψψ relation for |m| ≤ window.
    pub fn from_relation(gcm: &Gcm, level: &Level, n_hbar: usize, window: i64) -> Result<Self> {
        let n = gcm.rank();
        let mut kappa = vec![vec![Vec::new(); n]; n];
        for (i, j) in gcm.pairs() {
            let grid = relation_grid(gcm, level, i, j, window, n_hbar)?;
            kappa[i][j] = (-window..=window).map(|m| grid.get(-m, m)).collect();
        }
        Ok(Heisenberg {
            rank: n,
            n_hbar,
            window,
            convention: ModeConvention::Plain,
            kappa,
        })
    }

    /// The Cartan sector of the classical affine algebra: κ_{ij,m} = r_i a_ij rℓ m.
    pub fn classical(gcm: &Gcm, level: &Level, n_hbar: usize, window: i64) -> Self {
        let n = gcm.rank();
        let rl = level.r_ell(gcm);
        let mut kappa = vec![vec![Vec::new(); n]; n];
        for (i, j) in gcm.pairs() {
            kappa[i][j] = (-window..=window)
                .map(|m| HbarScalar::constant(qi(gcm.sym(i, j) * m) * &rl, n_hbar))
                .collect();
        }
        Heisenberg {
            rank: n,
            n_hbar,
            window,
            convention: ModeConvention::ShiftedByOne,
            kappa,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn n_hbar(&self) -> usize {
        self.n_hbar
    }

    pub fn window(&self) -> i64 {
        self.window
    }

    pub fn convention(&self) -> ModeConvention {
        self.convention
    }

    pub fn kappa(&self, i: usize, j: usize, m: i64) -> Result<&HbarScalar> {
        if m.abs() > self.window {
            return Err(Error::WindowOverflow {
                needed_m_z: m.abs(),
                needed_n_hbar: self.n_hbar,
            });
        }
        Ok(&self.kappa[i][j][(m + self.window) as usize])
    }

    /// ψ_i(n) on a state; creations landing above `cap` are dropped.
    pub fn act(&self, i: usize, n: i64, s: &QFockState, cap: u32) -> Result<QFockState> {
        let mut out = QFockState::default();
        if n == 0 {
            return Ok(out);
        }
        for (mono, c) in &s.terms {
            if n < 0 {
                if weight(mono) - n > cap as i64 {
                    continue;
                }
                let mut m = mono.clone();
                let key = (i, -n);
                let pos = m.partition_point(|x| *x < key);
                m.insert(pos, key);
                out.add_term(m, c);
            } else {
                for (p, (j, k)) in mono.iter().enumerate() {
                    if *k == n {
                        let mut m = mono.clone();
                        m.remove(p);
                        out.add_term(m, &(c * self.kappa(i, *j, n)?));
                    }
                }
            }
        }
        Ok(out)
    }

    /// The derivation dual to ψ_j(-n): removes one factor ψ_j(-n).
    pub fn derivation(&self, j: usize, n: i64, s: &QFockState) -> QFockState {
        let mut out = QFockState::default();
        for (mono, c) in &s.terms {
            for (p, x) in mono.iter().enumerate() {
                if *x == (j, n) {
                    let mut m = mono.clone();
                    m.remove(p);
                    out.add_term(m, c);
                }
            }
        }
        out
    }

    /// Monomials of weight `w`.
    pub fn basis(&self, w: u32) -> Vec<QMonomial> {
        let mut out = Vec::new();
        fn rec(d: usize, left: i64, min: (usize, i64), cur: &mut QMonomial, out: &mut Vec<QMonomial>) {
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
        rec(self.rank, w as i64, (0, 1), &mut Vec::new(), &mut out);
        out
    }

    /// All monomials up to weight `cap`.
    pub fn basis_upto(&self, cap: u32) -> Vec<QMonomial> {
        (0..=cap).flat_map(|w| self.basis(w)).collect()
    }

    pub fn describe(mono: &[(usize, i64)]) -> String {
        if mono.is_empty() {
            return "vac".into();
        }
        mono.iter().map(|(i, n)| format!("psi{i}(-{n})")).collect::<Vec<_>>().join(" ")
    }
}

/// Σ_n c_n ψ_i(n) z^{e(n)} for a finite set of modes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinField {
    pub index: usize,
    pub convention: ModeConvention,
    pub coeffs: BTreeMap<i64, HbarScalar>,
}

impl LinField {
    pub fn from_modes(index: usize, convention: ModeConvention, modes: impl IntoIterator<Item = i64>, n_hbar: usize) -> Self {
        LinField {
            index,
            convention,
            coeffs: modes.into_iter().map(|n| (n, HbarScalar::one(n_hbar))).collect(),
        }
    }

    /// ψ_i(z) with |n| ≤ window.
    pub fn full(index: usize, convention: ModeConvention, window: i64, n_hbar: usize) -> Self {
        Self::from_modes(index, convention, -window..=window, n_hbar)
    }

    /// ψ_i^±(z): the modes of sign ± plus half of ψ_i(0).
    pub fn half(index: usize, sign: Sign, window: i64, n_hbar: usize) -> Self {
        let modes: Vec<i64> = match sign {
            Sign::Plus => (1..=window).collect(),
            Sign::Minus => (-window..=-1).collect(),
        };
        let mut f = Self::from_modes(index, ModeConvention::Plain, modes, n_hbar);
        f.coeffs.insert(0, HbarScalar::constant(qf(1, 2), n_hbar));
        f
    }

    pub fn exponent(&self, n: i64) -> i64 {
        self.convention.exponent(n)
    }

    /// f(z) -> f(z q^c).
    pub fn substitute(&self, c: &Q) -> Self {
        let n_hbar = self.n_hbar();
        self.map(|n, x| x * &q_pow(&(c * qi(self.exponent(n))), n_hbar))
    }

    /// An Euler-picture operator applied to the field as a function of z.
    pub fn apply_euler(&self, op: &Op) -> Self {
        self.map(|n, x| x * &op.eval(&qi(self.exponent(n))))
    }

    pub fn scale(&self, c: &HbarScalar) -> Self {
        self.map(|_, x| x * c)
    }

    fn map(&self, f: impl Fn(i64, &HbarScalar) -> HbarScalar) -> Self {
        LinField {
            index: self.index,
            convention: self.convention,
            coeffs: self.coeffs.iter().map(|(n, x)| (*n, f(*n, x))).collect(),
        }
    }

    fn n_hbar(&self) -> usize {
        self.coeffs.values().map(|c| c.order()).min().unwrap_or(1)
    }
}

/// Σ_{j,n} s_{j,n}(z) ∂/∂ψ_j(-n): a derivation of the Fock module with series coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DerivField {
    pub terms: Vec<(usize, i64, Vec<(i64, HbarScalar)>)>,
}

impl DerivField {
    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|(_, _, cs)| cs.iter().all(|(_, c)| c.is_zero()))
    }
}

/// Which formal variable a field is evaluated at.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    First,
    Second,
}

/// Σ z1^a z2^b |state⟩.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StateSeries {
    terms: BTreeMap<(i64, i64), QFockState>,
}

impl StateSeries {
    pub fn from_state(s: QFockState) -> Self {
        let mut out = Self::default();
        out.add_at((0, 0), &s);
        out
    }

    pub fn add_at(&mut self, key: (i64, i64), s: &QFockState) {
        let e = self.terms.entry(key).or_default();
        e.add(s);
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&mut self, other: &Self) {
        for (k, s) in &other.terms {
            self.add_at(*k, s);
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, s) in &other.terms {
            let neg = s.scale_q(&qi(-1));
            out.add_at(*k, &neg);
        }
        out
    }

    pub fn scale(&self, c: &HbarScalar) -> Self {
        let mut out = Self::default();
        for (k, s) in &self.terms {
            out.add_at(*k, &s.scale(c));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, a: i64, b: i64) -> QFockState {
        self.terms.get(&(a, b)).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i64, i64), &QFockState)> {
        self.terms.iter()
    }

    /// Multiplies by Σ_k r_k (z2/z1)^k, keeping z2-exponents ≤ max_b.
    pub fn mul_ratio(&self, r: &LaurentSeries, max_b: i64) -> Self {
        let mut out = Self::default();
        for ((a, b), s) in &self.terms {
            for (k, c) in r.terms() {
                if b + k <= max_b {
                    out.add_at((a - k, b + k), &s.scale(c));
                }
            }
        }
        out
    }

    /// Keeps z2-exponents ≤ max_b.
    pub fn restrict_second(&self, max_b: i64) -> Self {
        StateSeries {
            terms: self.terms.iter().filter(|((_, b), _)| *b <= max_b).map(|(k, s)| (*k, s.clone())).collect(),
        }
    }

    /// Drops states above the weight cap.
    pub fn project(&self, cap: u32) -> Self {
        let mut out = Self::default();
        for (k, s) in &self.terms {
            let mut p = QFockState::default();
            for (m, c) in s.terms() {
                if weight(m) <= cap as i64 {
                    p.add_term(m.clone(), c);
                }
            }
            out.add_at(*k, &p);
        }
        out
    }

    /// First cell where the two series differ.
    pub fn first_difference(&self, other: &Self) -> Option<String> {
        let d = self.sub(other);
        d.terms.iter().next().map(|((a, b), s)| {
            let (m, c) = s.terms().next().expect("nonzero cell");
            format!("z1^{a} z2^{b} on {}: {c}", Heisenberg::describe(m))
        })
    }
}

fn bump(key: (i64, i64), slot: Slot, e: i64) -> (i64, i64) {
    match slot {
        Slot::First => (key.0 + e, key.1),
        Slot::Second => (key.0, key.1 + e),
    }
}

impl Heisenberg {
    pub fn apply(&self, f: &LinField, slot: Slot, s: &StateSeries, cap: u32) -> Result<StateSeries> {
        let mut out = StateSeries::default();
        for (key, state) in &s.terms {
            for (n, c) in &f.coeffs {
                let moved = self.act(f.index, *n, state, cap)?;
                if !moved.is_zero() {
                    out.add_at(bump(*key, slot, f.exponent(*n)), &moved.scale(c));
                }
            }
        }
        Ok(out)
    }

    pub fn apply_deriv(&self, d: &DerivField, slot: Slot, s: &StateSeries) -> StateSeries {
        let mut out = StateSeries::default();
        for (key, state) in &s.terms {
            for (j, n, cs) in &d.terms {
                let moved = self.derivation(*j, *n, state);
                if moved.is_zero() {
                    continue;
                }
                for (e, c) in cs {
                    out.add_at(bump(*key, slot, *e), &moved.scale(c));
                }
            }
        }
        out
    }

    /// exp(f) applied to a state series; terminates through ħ-adic or weight nilpotence.
    pub fn apply_exp(&self, f: &LinField, slot: Slot, s: &StateSeries, cap: u32) -> Result<StateSeries> {
        let mut out = s.clone();
        let mut term = s.clone();
        let limit = self.n_hbar as i64 + 2 * cap as i64 + 2;
        for k in 1..=limit {
            term = self.apply(f, slot, &term, cap)?;
            if term.is_zero() {
                return Ok(out);
            }
            let mut t = StateSeries::default();
            for (key, st) in &term.terms {
                t.add_at(*key, &st.scale_q(&Q::new(1.into(), k.into())));
            }
            term = t;
            out.add(&term);
        }
        Err(Error::Mismatch("exponential did not terminate".into()))
    }
}

/// Field flavors with an explicit matrix realization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    Psi,
    PsiPlus,
    PsiMinus,
    /// φ_i^+(z) = exp(F(z∂) ψ_i^+(z q^{-rℓ/2})).
    PhiPlus,
    /// φ_i^-(z) = exp(-F(z∂) ψ_i^-(z q^{rℓ/2})).
    PhiMinus,
    /// E(ψ_i(z)).
    E,
}

/// Matrix entries (row, column) of a field on the basis up to a weight cap.
pub type FieldMatrix = BTreeMap<(QMonomial, QMonomial), LaurentSeries>;

/// Exponents of the two Drinfeld currents, built by argument substitution.
fn phi_exponent(h: &Heisenberg, i: usize, sign: Sign, rl: &Q, outer: &Q, window: i64) -> LinField {
    let n = h.n_hbar();
    let half = rl / qi(2);
    let f = Op::f_op(n);
    match sign {
        Sign::Plus => LinField::half(i, Sign::Plus, window, n).substitute(&-&half).apply_euler(&f).substitute(outer),
        Sign::Minus => LinField::half(i, Sign::Minus, window, n)
            .substitute(&half)
            .apply_euler(&f)
            .substitute(outer)
            .scale(&HbarScalar::from_int(-1, n)),
    }
}

/// φ̃_i^± = -q^{-rℓ z∂} F(z∂) ψ_i^±.
fn tilde_exponent(h: &Heisenberg, i: usize, sign: Sign, rl: &Q, window: i64) -> LinField {
    let n = h.n_hbar();
    let op = Op::shift_op(&-rl, n).compose(&Op::f_op(n));
    LinField::half(i, sign, window, n)
        .apply_euler(&op)
        .scale(&HbarScalar::from_int(-1, n))
}

/// γ(x) = (q^{a x∂} − q^{-a x∂})(q^{-2rℓ x∂} − 1) log(1 − x) with a = r_i a_ii.
pub fn gamma_rational(gcm: &Gcm, level: &Level, i: usize, n_hbar: usize) -> Result<RationalFunction> {
    let rl = level.r_ell(gcm);
    let a = qi(gcm.sym(i, i));
    let op = Op::q_diff_op(&a, n_hbar).compose(&Op::shift_op(&(qi(-2) * &rl), n_hbar).sub(&Op::identity(n_hbar)));
    // The operator has no constant term; peel one x∂ onto log(1 − x), giving −x/(1 − x).
    if !op.coeff(0).is_zero() {
        return Err(Error::Mismatch("γ operator has a constant term".into()));
    }
    let reduced = Op::new(op.coeffs().iter().skip(1).cloned().collect(), n_hbar);
    let base = RationalFunction::from_ints(&[0, -1], &[1, -1], n_hbar)?;
    Ok(reduced.apply_rational(&base))
}

/// Res_z z^{-1} γ(e^{-z}).
pub fn gamma_residue(gcm: &Gcm, level: &Level, i: usize, n_hbar: usize) -> Result<HbarScalar> {
    let g = gamma_rational(gcm, level, i, n_hbar)?;
    let s = exp_substitute(&g, Sign::Minus, n_hbar as i64 + 4)?;
    s.coeff(0).ok_or(Error::WindowOverflow {
        needed_m_z: 1,
        needed_n_hbar: n_hbar,
    })
}

/// log(F(r_i − rℓ)/F(r_i + rℓ)).
pub fn log_f_ratio(gcm: &Gcm, level: &Level, i: usize, n_hbar: usize) -> Result<HbarScalar> {
    let (ri, rl) = (qi(gcm.r(i)), level.r_ell(gcm));
    let ratio = &f_unit(&(&ri - &rl), n_hbar) * &f_unit(&(&ri + &rl), n_hbar).inverse()?;
    ratio.log_series()
}

/// The prefactor (F(r_i + rℓ)/F(r_i − rℓ))^{1/2} of the E-field.
pub fn e_prefactor(gcm: &Gcm, level: &Level, i: usize, n_hbar: usize) -> Result<HbarScalar> {
    let (ri, rl) = (qi(gcm.r(i)), level.r_ell(gcm));
    (&f_unit(&(&ri + &rl), n_hbar) * &f_unit(&(&ri - &rl), n_hbar).inverse()?).sqrt_unit()
}

/// Σ_n (x + ρ d/dx)^n/n! applied to 1, i.e. the coefficients c_k of :A^k: in
/// exp(A_{-1}) 1 when the single contraction of A with itself contributes ρ.
pub fn normal_ordered_exp(rho: &HbarScalar, terms: usize) -> Vec<HbarScalar> {
    let n = rho.order();
    let mut p = vec![HbarScalar::one(n)];
    let mut total = p.clone();
    for step in 1..terms {
        let mut next = vec![HbarScalar::zero(n); p.len() + 1];
        for (k, c) in p.iter().enumerate() {
            next[k + 1] += c;
            if k > 0 {
                next[k - 1] += &(c * rho).scale(&qi(k as i64));
            }
        }
        p = next;
        let inv = Q::new(1.into(), step.into());
        p = p.iter().map(|c| c.scale(&inv)).collect();
        total.resize(p.len(), HbarScalar::zero(n));
        for (k, c) in p.iter().enumerate() {
            total[k] += c;
        }
    }
    total
}

impl Heisenberg {
    /// Σ_k c_k :(α + β)^k: on a state, with every β to the left of every α.
    fn normal_ordered(&self, coeffs: &[HbarScalar], alpha: &LinField, beta: &LinField, v: &StateSeries, cap: u32) -> Result<StateSeries> {
        let mut alpha_pows = vec![v.clone()];
        for _ in 1..coeffs.len() {
            let next = self.apply(alpha, Slot::First, alpha_pows.last().unwrap(), cap)?;
            alpha_pows.push(next);
        }
        let mut out = StateSeries::default();
        for (k, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (j, base) in alpha_pows.iter().enumerate().take(k + 1) {
                // β^{k-j} α^j with multiplicity binom(k, j).
                let mut s = base.clone();
                for _ in 0..k - j {
                    s = self.apply(beta, Slot::First, &s, cap)?;
                }
                let mult = crate::scalars::binom_i(k as i64, j);
                out.add(&s.scale(&c.scale(&mult)));
            }
        }
        Ok(out)
    }

    /// Matrix of a field on the basis up to `cap`.
    pub fn field_matrix(&self, gcm: &Gcm, level: &Level, i: usize, flavor: Flavor, cap: u32) -> Result<FieldMatrix> {
        let window = cap as i64;
        let n = self.n_hbar;
        let rl = level.r_ell(gcm);
        let mut out = FieldMatrix::new();
        for col in self.basis_upto(cap) {
            let v = StateSeries::from_state(QFockState::monomial(col.clone(), HbarScalar::one(n)));
            let image = match flavor {
                Flavor::Psi => self.apply(&LinField::full(i, self.convention, window, n), Slot::First, &v, cap)?,
                Flavor::PsiPlus => self.apply(&LinField::half(i, Sign::Plus, window, n), Slot::First, &v, cap)?,
                Flavor::PsiMinus => self.apply(&LinField::half(i, Sign::Minus, window, n), Slot::First, &v, cap)?,
                Flavor::PhiPlus => self.apply_exp(&phi_exponent(self, i, Sign::Plus, &rl, &Q::zero(), window), Slot::First, &v, cap)?,
                Flavor::PhiMinus => self.apply_exp(&phi_exponent(self, i, Sign::Minus, &rl, &Q::zero(), window), Slot::First, &v, cap)?,
                Flavor::E => self.e_field(gcm, level, i, &v, cap)?,
            };
            for ((a, _), st) in image.project(cap).terms() {
                for (row, c) in st.terms() {
                    let e = out
                        .entry((row.clone(), col.clone()))
                        .or_insert_with(|| LaurentSeries::zero(crate::series::Z, n));
                    *e = &*e + &LaurentSeries::monomial(crate::series::Z, c.clone(), *a);
                }
            }
        }
        Ok(out)
    }

    /// E(ψ_i(z)) on a state via the contraction split of the (−1)-product exponential.
    pub fn e_field(&self, gcm: &Gcm, level: &Level, i: usize, v: &StateSeries, cap: u32) -> Result<StateSeries> {
        let n = self.n_hbar;
        let rl = level.r_ell(gcm);
        let window = cap as i64;
        let alpha = tilde_exponent(self, i, Sign::Plus, &rl, window);
        let beta = tilde_exponent(self, i, Sign::Minus, &rl, window);
        let rho = gamma_residue(gcm, level, i, n)?;
        let coeffs = normal_ordered_exp(&rho, n);
        let pre = e_prefactor(gcm, level, i, n)?;
        Ok(self.normal_ordered(&coeffs, &alpha, &beta, v, cap)?.scale(&pre))
    }
}

fn level_notes(gcm: &Gcm, level: &Level) -> Vec<String> {
    let mut notes = vec![
        "mode convention: psi_i(z) = sum psi_i(n) z^-n, classical h_i(z) = sum h_i(n) z^-n-1; classical limit of kappa_ij,m equals [h_i(m), h_j(-m)] with relative factor 1".to_string(),
    ];
    if !level.is_integral_shift(gcm) {
        notes.push(format!("r*level = {} is not an integer; q-shifts use exp(r*level*hbar) series", level.r_ell(gcm)));
    }
    notes
}

fn with_notes(mut r: Report, notes: Vec<String>) -> Report {
    for n in notes {
        r = r.with_note(n);
    }
    r
}

/// ι_{z1,z2} g_{ij,q}(q^{rℓ}x)^{-1} g_{ij,q}(q^{-rℓ}x) as a series in x = z2/z1.
pub fn exchange_ratio(gcm: &Gcm, level: &Level, i: usize, j: usize, n_hbar: usize, cap: i64) -> Result<LaurentSeries> {
    let rl = level.r_ell(gcm);
    let g = g_q(gcm, i, j, n_hbar);
    let up = g.scale_var(&q_pow(&rl, n_hbar));
    let down = g.scale_var(&q_pow(&-rl, n_hbar));
    iota_expand(&down.div(&up)?, Direction::ZAdic, cap + 1)
}

/// Structure constants, their classical limit, mode commutation on states and the
/// exchange relation of the Drinfeld currents.
pub fn check_qheisenberg(gcm: &Gcm, level: &Level, trunc: Trunc, weight_cap: u32, kappa_window: i64) -> Result<Report> {
    let n = trunc.n_hbar;
    let window = kappa_window.max(2 * weight_cap as i64 + 1);
    let h = Heisenberg::from_relation(gcm, level, n, window)?;
    let rl = level.r_ell(gcm);
    let typed = crate::classical_affine::AffineAlgebra::new(gcm).is_ok();
    let mut entries = Vec::new();
    for (i, j) in gcm.pairs() {
        let mut checks = Vec::new();
        let mut grid_bad = None;
        let mut anti_bad = None;
        for m in -kappa_window..=kappa_window {
            let k = h.kappa(i, j, m)?;
            if *k != kappa_closed_form(gcm, level, i, j, m, n) {
                grid_bad.get_or_insert(format!("m={m}: grid {k}"));
            }
            if *k != -(h.kappa(j, i, -m)?.clone()) {
                anti_bad.get_or_insert(format!("m={m}"));
            }
        }
        checks.push(Check::from_bool(format!("kappa grid = closed form |m|<={kappa_window}"), grid_bad.is_none(), grid_bad.unwrap_or_default()));
        checks.push(Check::from_bool("kappa antisymmetry", anti_bad.is_none(), anti_bad.unwrap_or_default()));
        checks.push(Check::from_bool("kappa at m=0 vanishes", h.kappa(i, j, 0)?.is_zero(), "nonzero"));
        let mut lim_bad = None;
        for m in 1..=3i64 {
            for m in [m, -m] {
                let cl = h.kappa(i, j, m)?.classical().clone();
                let want = qi(gcm.sym(i, j) * m) * &rl;
                if cl != want {
                    lim_bad.get_or_insert(format!("m={m}: {cl} vs {want}"));
                }
                if typed {
                    let aff = cartan_bracket_on_vacuum(gcm, level, i, j, m)?;
                    if cl != aff {
                        lim_bad.get_or_insert(format!("m={m}: {cl} vs affine bracket {aff}"));
                    }
                }
            }
        }
        let name = if typed { "classical limit = affine Cartan bracket" } else { "classical limit = r_i a_ij r l m" };
        checks.push(Check::from_bool(name, lim_bad.is_none(), lim_bad.unwrap_or_default()));
        checks.push(exchange_check(&h, gcm, level, i, j, weight_cap)?);
        entries.push(Entry::pair(i, j, checks));
    }
    entries.push(Entry::new("mode commutation", vec![mode_commutation(&h, weight_cap)?]));
    let r = Report::new("qheisenberg", gcm.name(), &level.to_string(), trunc.n_hbar, trunc.m_z, entries).with_weight_cap(weight_cap);
    Ok(with_notes(r, level_notes(gcm, level)))
}

/// [ψ_i(m), ψ_j(n)] = δ_{m+n,0} κ_{ij,m} on every basis state.
fn mode_commutation(h: &Heisenberg, cap: u32) -> Result<Check> {
    let big = 2 * cap;
    let w = cap as i64;
    for mono in h.basis_upto(cap) {
        let v = QFockState::monomial(mono.clone(), HbarScalar::one(h.n_hbar));
        for i in 0..h.rank {
            for j in 0..h.rank {
                for m in -w..=w {
                    for k in -w..=w {
                        let ab = h.act(i, m, &h.act(j, k, &v, big)?, big)?;
                        let ba = h.act(j, k, &h.act(i, m, &v, big)?, big)?;
                        let mut diff = ab;
                        diff.add_scaled(&ba, &HbarScalar::from_int(-1, h.n_hbar));
                        let mut want = QFockState::default();
                        if m + k == 0 {
                            want.add_scaled(&v, h.kappa(i, j, m)?);
                        }
                        if diff != want {
                            return Ok(Check::fail(
                                "[psi_i(m), psi_j(n)] on states",
                                format!("i={i} j={j} m={m} n={k} on {}", Heisenberg::describe(&mono)),
                            ));
                        }
                    }
                }
            }
        }
    }
    Ok(Check::pass("[psi_i(m), psi_j(n)] on states"))
}

/// φ_i^+(z1) φ_j^-(z2) = φ_j^-(z2) φ_i^+(z1) ι g(q^{rℓ}z2/z1)^{-1} g(q^{-rℓ}z2/z1) on states,
/// compared for z2-exponents up to the weight cap.
fn exchange_check(h: &Heisenberg, gcm: &Gcm, level: &Level, i: usize, j: usize, cap: u32) -> Result<Check> {
    let n = h.n_hbar;
    let rl = level.r_ell(gcm);
    let m = cap as i64;
    let inner = 2 * cap;
    let plus = phi_exponent(h, i, Sign::Plus, &rl, &Q::zero(), inner as i64);
    let minus = phi_exponent(h, j, Sign::Minus, &rl, &Q::zero(), m);
    let ratio = exchange_ratio(gcm, level, i, j, n, m)?;
    let name = "exchange relation of phi+ and phi-";
    for mono in h.basis_upto(cap) {
        let v = StateSeries::from_state(QFockState::monomial(mono.clone(), HbarScalar::one(n)));
        let lhs = h
            .apply_exp(&plus, Slot::First, &h.apply_exp(&minus, Slot::Second, &v, inner)?, inner)?
            .restrict_second(m);
        let rhs = h
            .apply_exp(&minus, Slot::Second, &h.apply_exp(&plus, Slot::First, &v, inner)?, inner)?
            .mul_ratio(&ratio, m);
        if let Some(w) = lhs.first_difference(&rhs) {
            return Ok(Check::fail(name, format!("on {}: {w}", Heisenberg::describe(&mono))));
        }
    }
    Ok(Check::pass(name))
}

/// Contraction, residue and prefactor identities, the split of the (−1)-product exponential,
/// and E(ψ_i(z)) = φ_i^-(zq^{-3rℓ/2}) φ_i^+(zq^{-rℓ/2})^{-1} on states.
pub fn check_exp_field(gcm: &Gcm, level: &Level, trunc: Trunc, weight_cap: u32) -> Result<Report> {
    let n = trunc.n_hbar;
    let cap = weight_cap;
    let window = cap as i64;
    let h = Heisenberg::from_relation(gcm, level, n, window.max(1))?;
    let rl = level.r_ell(gcm);
    let half = &rl / qi(2);
    let mut entries = Vec::new();
    for i in 0..gcm.rank() {
        let mut checks = Vec::new();
        let alpha = tilde_exponent(&h, i, Sign::Plus, &rl, window);
        let beta = tilde_exponent(&h, i, Sign::Minus, &rl, window);

        // [α(z1), β(z2)] read off the vacuum against ι_{z1,z2} γ(z2/z1).
        let gamma = gamma_rational(gcm, level, i, n)?;
        let series = iota_expand(&gamma, Direction::ZAdic, window + 1)?;
        let vac = StateSeries::from_state(QFockState::vacuum(n));
        let both = h.apply(&alpha, Slot::First, &h.apply(&beta, Slot::Second, &vac, cap)?, cap)?;
        let mut bad = None;
        for k in 0..=window {
            let got = both.get(-k, k).coeff(&[]).cloned().unwrap_or_else(|| HbarScalar::zero(n));
            if got != series.coeff_or_zero(k) {
                bad.get_or_insert(format!("x^{k}: {got} vs {}", series.coeff_or_zero(k)));
            }
        }
        checks.push(Check::from_bool("contraction = iota gamma", bad.is_none(), bad.unwrap_or_default()));

        let rho = gamma_residue(gcm, level, i, n)?;
        let logf = log_f_ratio(gcm, level, i, n)?;
        checks.push(Check::from_bool(
            "Res z^-1 gamma(e^-z) = log F(r_i-rl)/F(r_i+rl)",
            rho == logf,
            format!("{rho} vs {logf}"),
        ));
        let pre = e_prefactor(gcm, level, i, n)?;
        let half_rho = rho.scale(&qf(1, 2)).exp_series()?;
        checks.push(Check::from_bool("prefactor cancels exp(Res/2)", (&pre * &half_rho).is_one(), "product is not 1"));

        let coeffs = normal_ordered_exp(&rho, n);
        let lower = phi_exponent(&h, i, Sign::Minus, &rl, &(qi(-3) * &half), window);
        let upper_inv = phi_exponent(&h, i, Sign::Plus, &rl, &-&half, window).scale(&HbarScalar::from_int(-1, n));
        let (mut split_bad, mut e_bad) = (None, None);
        for mono in h.basis_upto(cap) {
            let v = StateSeries::from_state(QFockState::monomial(mono.clone(), HbarScalar::one(n)));
            let split = h.normal_ordered(&coeffs, &alpha, &beta, &v, cap)?.project(cap);
            let direct = h
                .apply_exp(&beta, Slot::First, &h.apply_exp(&alpha, Slot::First, &v, cap)?, cap)?
                .scale(&half_rho)
                .project(cap);
            if let Some(w) = split.first_difference(&direct) {
                split_bad.get_or_insert(format!("on {}: {w}", Heisenberg::describe(&mono)));
            }
            let e = split.scale(&pre);
            let currents = h
                .apply_exp(&lower, Slot::First, &h.apply_exp(&upper_inv, Slot::First, &v, cap)?, cap)?
                .project(cap);
            if let Some(w) = e.first_difference(&currents) {
                e_bad.get_or_insert(format!("on {}: {w}", Heisenberg::describe(&mono)));
            }
        }
        checks.push(Check::from_bool("exp((a+b)_-1)1 = exp(b)exp(a)exp(Res/2)", split_bad.is_none(), split_bad.unwrap_or_default()));
        checks.push(Check::from_bool("E(phi_i) = phi-(zq^-3rl/2) phi+(zq^-rl/2)^-1", e_bad.is_none(), e_bad.unwrap_or_default()));
        let mut e = Entry::new(format!("({i})"), checks);
        e.i = Some(i);
        entries.push(e);
    }
    let r = Report::new("lemma-exp", gcm.name(), &level.to_string(), trunc.n_hbar, trunc.m_z, entries).with_weight_cap(weight_cap);
    Ok(with_notes(r, level_notes(gcm, level)))
}

/// σ_i(z) = Σ_{j,n} (−1)^{n−1} τ_ij^{(n−1)}(z)/(n−1)! ∂/∂h_j(−n), with z-exponents in [−m, m].
pub fn sigma_field(t: &TauTuple, i: usize, max_mode: i64, m: i64) -> Result<DerivField> {
    let mut terms = Vec::new();
    for j in 0..t.gcm().rank() {
        let mut d = t.scalar(i, j).clone();
        let mut fact = Q::from_integer(1.into());
        for nn in 1..=max_mode {
            if nn > 1 {
                d = d.derivative();
                fact *= qi(nn - 1);
            }
            let sign = if (nn - 1) % 2 == 0 { qi(1) } else { qi(-1) };
            let c = sign / &fact;
            let mut cs = Vec::new();
            for e in -m..=m {
                let x = d.coeff(e).ok_or(Error::WindowOverflow {
                    needed_m_z: e + nn,
                    needed_n_hbar: t.trunc().n_hbar,
                })?;
                if !x.is_zero() {
                    cs.push((e, x.scale(&c)));
                }
            }
            terms.push((j, nn, cs));
        }
    }
    Ok(DerivField { terms })
}

/// r_i a_ij rℓ ∂_{z2} z1^{-1}δ(z2/z1) + ι_{z1,z2}τ_ij(z1 − z2) − ι_{z2,z1}τ_ji(z2 − z1).
pub fn deformed_relation(t: &TauTuple, i: usize, j: usize, m: i64) -> Result<Distribution2> {
    let gcm = t.gcm();
    let n = t.trunc().n_hbar;
    let c = qi(gcm.sym(i, j)) * t.level().r_ell(gcm);
    let mut out = iota_additive(t.scalar(i, j), Direction::ZAdic, m)?
        .sub(&iota_additive(&t.scalar(j, i).reflect(), Direction::InverseZAdic, m)?);
    for b in -m..=m {
        out.add_at(-2 - b, b, &HbarScalar::constant(&c * qi(b + 1), n));
    }
    Ok(out)
}

struct Deformed<'a> {
    h: &'a Heisenberg,
    fields: Vec<LinField>,
    sigmas: Vec<DerivField>,
    cap: u32,
}

impl Deformed<'_> {
    fn apply(&self, i: usize, slot: Slot, s: &StateSeries) -> Result<StateSeries> {
        let mut out = self.h.apply(&self.fields[i], slot, s, self.cap)?;
        out.add(&self.h.apply_deriv(&self.sigmas[i], slot, s));
        Ok(out)
    }

    fn commutator(&self, i: usize, j: usize, v: &StateSeries) -> Result<StateSeries> {
        let ij = self.apply(i, Slot::First, &self.apply(j, Slot::Second, v)?)?;
        let ji = self.apply(j, Slot::Second, &self.apply(i, Slot::First, v)?)?;
        Ok(ij.sub(&ji))
    }
}

fn swap(s: &StateSeries) -> StateSeries {
    let mut out = StateSeries::default();
    for ((a, b), st) in s.terms() {
        out.add_at((*b, *a), st);
    }
    out
}

fn deformed<'a>(h: &'a Heisenberg, t: &TauTuple, m: i64, cap: u32) -> Result<Deformed<'a>> {
    let n = t.trunc().n_hbar;
    let rank = t.gcm().rank();
    let conv = ModeConvention::ShiftedByOne;
    let fields = (0..rank)
        .map(|i| LinField::from_modes(i, conv, (-m..=m).map(|e| conv.mode(e)), n))
        .collect();
    let sigmas = (0..rank)
        .map(|i| sigma_field(t, i, cap as i64, m))
        .collect::<Result<Vec<_>>>()?;
    Ok(Deformed { h, fields, sigmas, cap })
}

/// The deformed Cartan fields h_i(z) + σ_i(z) against the τ-deformed commutator relation,
/// plus the degeneration at the identity tuple.
pub fn check_deformation_cartan(gcm: &Gcm, level: &Level, trunc: Trunc, weight_cap: u32) -> Result<Report> {
    let n = trunc.n_hbar;
    let m = (trunc.m_z / 2).max(1);
    let inner = weight_cap + m as u32 + 1;
    let h = Heisenberg::classical(gcm, level, n, inner as i64 + m);
    let special = PaperTau::new(gcm, level, trunc)?;
    let eps = TauTuple::identity(gcm, level, trunc);
    let def = deformed(&h, special.tuple(), m, inner)?;
    let plain = deformed(&h, &eps, m, inner)?;
    let basis = h.basis_upto(weight_cap);
    let mut entries = Vec::new();
    for (i, j) in gcm.pairs() {
        let rel = deformed_relation(special.tuple(), i, j, m)?;
        let rel_eps = deformed_relation(&eps, i, j, m)?;
        let (mut bad, mut anti, mut bad_eps) = (None, None, None);
        for mono in &basis {
            let v = StateSeries::from_state(QFockState::monomial(mono.clone(), HbarScalar::one(n)));
            let got = def.commutator(i, j, &v)?;
            let want = scalar_times(&rel, &v);
            if let Some(w) = got.first_difference(&want) {
                bad.get_or_insert(format!("on {}: {w}", Heisenberg::describe(mono)));
            }
            let back = swap(&def.commutator(j, i, &v)?).scale(&HbarScalar::from_int(-1, n));
            if let Some(w) = got.first_difference(&back) {
                anti.get_or_insert(format!("on {}: {w}", Heisenberg::describe(mono)));
            }
            let got_eps = plain.commutator(i, j, &v)?;
            if let Some(w) = got_eps.first_difference(&scalar_times(&rel_eps, &v)) {
                bad_eps.get_or_insert(format!("on {}: {w}", Heisenberg::describe(mono)));
            }
        }
        entries.push(Entry::pair(
            i,
            j,
            vec![
                Check::from_bool("deformed commutator = tau relation", bad.is_none(), bad.unwrap_or_default()),
                Check::from_bool("commutator antisymmetry", anti.is_none(), anti.unwrap_or_default()),
                Check::from_bool("identity tuple gives classical commutator", bad_eps.is_none(), bad_eps.unwrap_or_default()),
            ],
        ));
    }
    let eps_zero = plain.sigmas.iter().all(|s| s.is_zero());
    entries.push(Entry::new(
        "identity tuple",
        vec![Check::from_bool("deformed field equals classical field", eps_zero, "nonzero correction")],
    ));
    let r = Report::new("deformation-cartan", gcm.name(), &level.to_string(), trunc.n_hbar, trunc.m_z, entries).with_weight_cap(weight_cap);
    Ok(with_notes(r, level_notes(gcm, level)))
}

fn scalar_times(d: &Distribution2, v: &StateSeries) -> StateSeries {
    let mut out = StateSeries::default();
    for (a, b, c) in d.cells() {
        if !c.is_zero() {
            out.add_at((a, b), &v.get(0, 0).scale(c));
        }
    }
    out
}

impl fmt::Display for QFockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(m, c)| format!("({c}) {}", Heisenberg::describe(m))).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::q_int;

    #[test]
    fn kappa_a1_m1() {
        let (g, l) = (Gcm::a1(), Level::int(1));
        let h = Heisenberg::from_relation(&g, &l, 5, 3).unwrap();
        let want = &(&q_int(2, 5) * &q_int(1, 5)) * &q_pow(&qi(-1), 5);
        assert_eq!(*h.kappa(0, 0, 1).unwrap(), want);
        assert!(h.kappa(0, 0, 0).unwrap().is_zero());
        assert_eq!(h.kappa(0, 0, 2).unwrap().classical(), &qi(4));
    }

    #[test]
    fn annihilation_is_contraction() {
        let h = Heisenberg::classical(&Gcm::a1(), &Level::int(1), 2, 4);
        let v = QFockState::monomial(vec![(0, 1), (0, 1), (0, 2)], HbarScalar::one(2));
        let out = h.act(0, 1, &v, 4).unwrap();
        // Two factors of h(-1), each contracting to 2.
        assert_eq!(out, QFockState::monomial(vec![(0, 1), (0, 2)], HbarScalar::from_int(4, 2)));
        assert!(h.act(0, 3, &v, 4).unwrap().is_zero());
        assert_eq!(h.basis(3).len(), 3);
    }

    #[test]
    fn psi_on_vacuum_creates() {
        let (g, l) = (Gcm::a1(), Level::int(1));
        let h = Heisenberg::from_relation(&g, &l, 3, 3).unwrap();
        let m = h.field_matrix(&g, &l, 0, Flavor::Psi, 3).unwrap();
        for ((_, col), s) in &m {
            if col.is_empty() {
                assert!(s.valuation().unwrap() > 0);
            }
        }
    }

    #[test]
    fn phi_plus_classically_identity() {
        let (g, l) = (Gcm::a1(), Level::int(1));
        let h = Heisenberg::from_relation(&g, &l, 1, 3).unwrap();
        let m = h.field_matrix(&g, &l, 0, Flavor::PhiPlus, 3).unwrap();
        for ((row, col), s) in &m {
            let want = if row == col { LaurentSeries::one(crate::series::Z, 1) } else { LaurentSeries::zero(crate::series::Z, 1) };
            assert_eq!(*s, want);
        }
    }

    #[test]
    fn residue_matches_f_ratio() {
        for (g, l) in [(Gcm::a1(), 1), (Gcm::a1(), 2), (Gcm::b2(), 1)] {
            let l = Level::int(l);
            for i in 0..g.rank() {
                assert_eq!(gamma_residue(&g, &l, i, 6).unwrap(), log_f_ratio(&g, &l, i, 6).unwrap());
            }
        }
    }

    #[test]
    fn wick_exponential() {
        let rho = HbarScalar::monomial(qi(3), 2, 6);
        let c = normal_ordered_exp(&rho, 6);
        // exp(x + ρ/2 ...) => c_0 = exp(ρ/2), c_1 = exp(ρ/2).
        let e = rho.scale(&qf(1, 2)).exp_series().unwrap();
        assert_eq!(c[0], e);
        assert_eq!(c[1], e);
    }

    #[test]
    fn exp_field_a1_small() {
        let r = check_exp_field(&Gcm::a1(), &Level::int(1), Trunc::new(4, 8), 3).unwrap();
        assert!(r.pass, "{r}");
    }

    #[test]
    fn heisenberg_suite_a1_small() {
        let r = check_qheisenberg(&Gcm::a1(), &Level::int(1), Trunc::new(4, 8), 3, 8).unwrap();
        assert!(r.pass, "{r}");
    }

    #[test]
    fn deformation_a1_small() {
        let r = check_deformation_cartan(&Gcm::a1(), &Level::int(1), Trunc::new(3, 6), 2).unwrap();
        assert!(r.pass, "{r}");
    }

    #[test]
    fn exchange_needs_the_ratio() {
        let (g, l) = (Gcm::a1(), Level::int(1));
        let h = Heisenberg::from_relation(&g, &l, 4, 6).unwrap();
        let rl = l.r_ell(&g);
        let plus = phi_exponent(&h, 0, Sign::Plus, &rl, &Q::zero(), 6);
        let minus = phi_exponent(&h, 0, Sign::Minus, &rl, &Q::zero(), 3);
        let v = StateSeries::from_state(QFockState::vacuum(4));
        let lhs = h.apply_exp(&plus, Slot::First, &h.apply_exp(&minus, Slot::Second, &v, 6).unwrap(), 6).unwrap().restrict_second(3);
        let rhs = h.apply_exp(&minus, Slot::Second, &h.apply_exp(&plus, Slot::First, &v, 6).unwrap(), 6).unwrap().restrict_second(3);
        assert!(lhs.first_difference(&rhs).is_some());
    }

    #[test]
    fn deformation_is_nontrivial() {
        let (g, l, t) = (Gcm::a1(), Level::int(1), Trunc::new(4, 8));
        let special = PaperTau::new(&g, &l, t).unwrap();
        let eps = TauTuple::identity(&g, &l, t);
        assert!(!sigma_field(special.tuple(), 0, 3, 4).unwrap().is_zero());
        let a = deformed_relation(special.tuple(), 0, 0, 4).unwrap();
        let b = deformed_relation(&eps, 0, 0, 4).unwrap();
        assert!(a.first_difference(&b).is_some());
    }
}
