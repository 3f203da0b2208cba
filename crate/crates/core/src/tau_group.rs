//! The abelian group of deformation tuples and the distinguished tuple defining the
//! quantum affine vertex algebra.

use num::Zero;
use rand::Rng;
use rayon::prelude::*;

use crate::cartan_data::{f_hbar, g_hbar, Gcm, Level};
use crate::error::{Error, Result};
use crate::report::{Check, Entry, Report};
use crate::scalars::{qi, HbarScalar, Q};
use crate::series::{exp_substitute, LaurentSeries, RationalFunction, Sign, Z};
use crate::shiftops::{Additive, DiffOperator};
use crate::Trunc;

type Op = DiffOperator<Additive>;
type Table = Vec<Vec<LaurentSeries>>;

pub const SIGNS: [Sign; 2] = [Sign::Plus, Sign::Minus];

pub(crate) fn sidx(s: Sign) -> usize {
    match s {
        Sign::Plus => 0,
        Sign::Minus => 1,
    }
}

pub fn sname(s: Sign) -> &'static str {
    match s {
        Sign::Plus => "+",
        Sign::Minus => "-",
    }
}

/// A tuple of series indexed by pairs (i, j): one additive family, two signed additive
/// families and four multiplicative families.
#[derive(Clone, Debug)]
pub struct TauTuple {
    gcm: Gcm,
    level: Level,
    trunc: Trunc,
    cap: i64,
    scalar: Table,
    first: [Table; 2],
    second: [Table; 2],
    mult: [[Table; 2]; 2],
}

fn table(n: usize, f: impl Fn(usize, usize) -> LaurentSeries) -> Table {
    (0..n).map(|i| (0..n).map(|j| f(i, j)).collect()).collect()
}

fn try_table(n: usize, f: impl Fn(usize, usize) -> Result<LaurentSeries> + Sync) -> Result<Table> {
    (0..n)
        .into_par_iter()
        .map(|i| (0..n).map(|j| f(i, j)).collect::<Result<Vec<_>>>())
        .collect()
}

impl TauTuple {
    /// The identity element: zero additive parts, unit multiplicative parts.
    pub fn identity(gcm: &Gcm, level: &Level, trunc: Trunc) -> Self {
        let n = gcm.rank();
        let nh = trunc.n_hbar;
        let zero = || table(n, |_, _| LaurentSeries::zero(Z, nh));
        let one = || table(n, |_, _| LaurentSeries::one(Z, nh));
        TauTuple {
            gcm: gcm.clone(),
            level: level.clone(),
            trunc,
            cap: trunc.work(),
            scalar: zero(),
            first: [zero(), zero()],
            second: [zero(), zero()],
            mult: [[one(), one()], [one(), one()]],
        }
    }

    /// Assembles a tuple from its families; `mult[e1][e2]` uses sign indices (+ = 0).
    pub fn from_parts(
        gcm: &Gcm,
        level: &Level,
        trunc: Trunc,
        scalar: Table,
        first: [Table; 2],
        second: [Table; 2],
        mult: [[Table; 2]; 2],
    ) -> Result<Self> {
        let n = gcm.rank();
        let shaped = |t: &Table| t.len() == n && t.iter().all(|r| r.len() == n);
        let ok = shaped(&scalar)
            && first.iter().all(shaped)
            && second.iter().all(shaped)
            && mult.iter().flatten().all(shaped);
        if !ok {
            return Err(Error::Mismatch("tuple tables must be rank x rank".into()));
        }
        for t in mult.iter().flatten().flatten().flatten() {
            if t.classical_part().is_zero() {
                return Err(Error::NotInvertible("multiplicative entry with zero classical part".into()));
            }
        }
        Ok(TauTuple {
            gcm: gcm.clone(),
            level: level.clone(),
            trunc,
            cap: trunc.work(),
            scalar,
            first,
            second,
            mult,
        })
    }

    pub fn gcm(&self) -> &Gcm {
        &self.gcm
    }

    pub fn level(&self) -> &Level {
        &self.level
    }

    pub fn trunc(&self) -> Trunc {
        self.trunc
    }

    /// Working precision of the stored series.
    pub fn cap(&self) -> i64 {
        self.cap
    }

    pub fn scalar(&self, i: usize, j: usize) -> &LaurentSeries {
        &self.scalar[i][j]
    }

    pub fn first(&self, s: Sign, i: usize, j: usize) -> &LaurentSeries {
        &self.first[sidx(s)][i][j]
    }

    pub fn second(&self, s: Sign, i: usize, j: usize) -> &LaurentSeries {
        &self.second[sidx(s)][i][j]
    }

    pub fn mult(&self, e1: Sign, e2: Sign, i: usize, j: usize) -> &LaurentSeries {
        &self.mult[sidx(e1)][sidx(e2)][i][j]
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.gcm != other.gcm || self.level != other.level || self.trunc != other.trunc {
            return Err(Error::Mismatch(format!(
                "tuples over ({}, {}) and ({}, {})",
                self.gcm, self.level, other.gcm, other.level
            )));
        }
        Ok(())
    }

    fn zip(&self, other: &Self, add: impl Fn(&LaurentSeries, &LaurentSeries) -> LaurentSeries, mul: impl Fn(&LaurentSeries, &LaurentSeries) -> LaurentSeries) -> Self {
        let n = self.gcm.rank();
        let a = |x: &Table, y: &Table| table(n, |i, j| add(&x[i][j], &y[i][j]));
        let m = |x: &Table, y: &Table| table(n, |i, j| mul(&x[i][j], &y[i][j]));
        TauTuple {
            gcm: self.gcm.clone(),
            level: self.level.clone(),
            trunc: self.trunc,
            cap: self.cap.min(other.cap),
            scalar: a(&self.scalar, &other.scalar),
            first: [a(&self.first[0], &other.first[0]), a(&self.first[1], &other.first[1])],
            second: [a(&self.second[0], &other.second[0]), a(&self.second[1], &other.second[1])],
            mult: [
                [m(&self.mult[0][0], &other.mult[0][0]), m(&self.mult[0][1], &other.mult[0][1])],
                [m(&self.mult[1][0], &other.mult[1][0]), m(&self.mult[1][1], &other.mult[1][1])],
            ],
        }
    }

    /// Group law: sums of additive parts, products of multiplicative parts.
    pub fn star(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        Ok(self.zip(other, |a, b| a + b, |a, b| a * b))
    }

    pub fn inverse(&self) -> Result<Self> {
        let n = self.gcm.rank();
        let neg = |t: &Table| table(n, |i, j| -&t[i][j]);
        let cap = self.cap;
        let inv = |t: &Table| try_table(n, |i, j| t[i][j].inverse(cap));
        Ok(TauTuple {
            gcm: self.gcm.clone(),
            level: self.level.clone(),
            trunc: self.trunc,
            cap,
            scalar: neg(&self.scalar),
            first: [neg(&self.first[0]), neg(&self.first[1])],
            second: [neg(&self.second[0]), neg(&self.second[1])],
            mult: [
                [inv(&self.mult[0][0])?, inv(&self.mult[0][1])?],
                [inv(&self.mult[1][0])?, inv(&self.mult[1][1])?],
            ],
        })
    }

    /// First disagreement below `upto` across all families, if any.
    pub fn first_difference(&self, other: &Self, upto: i64) -> Result<Option<(String, crate::series::Witness)>> {
        self.compatible(other)?;
        let n = self.gcm.rank();
        let mut fams: Vec<(String, &Table, &Table)> = vec![("scalar".into(), &self.scalar, &other.scalar)];
        for s in SIGNS {
            fams.push((format!("first{}", sname(s)), &self.first[sidx(s)], &other.first[sidx(s)]));
            fams.push((format!("second{}", sname(s)), &self.second[sidx(s)], &other.second[sidx(s)]));
        }
        for e1 in SIGNS {
            for e2 in SIGNS {
                fams.push((
                    format!("mult{}{}", sname(e1), sname(e2)),
                    &self.mult[sidx(e1)][sidx(e2)],
                    &other.mult[sidx(e1)][sidx(e2)],
                ));
            }
        }
        for (name, x, y) in fams {
            for i in 0..n {
                for j in 0..n {
                    if let Some(w) = x[i][j].first_difference(&y[i][j], upto)? {
                        return Ok(Some((format!("{name}[{i}][{j}]"), w)));
                    }
                }
            }
        }
        Ok(None)
    }

    pub fn agrees(&self, other: &Self, upto: i64) -> Result<bool> {
        Ok(self.first_difference(other, upto)?.is_none())
    }

    /// Classical-limit conditions defining membership in the group.
    pub fn membership(&self) -> Vec<Check> {
        let n = self.gcm.rank();
        let upto = self.trunc.m_z;
        let mut checks = Vec::new();
        let cl = |s: &LaurentSeries| s.classical_part();
        let cmp = |name: String, a: LaurentSeries, b: LaurentSeries| match a.first_difference(&b, upto) {
            Ok(w) => Check::from_witness(name, w),
            Err(e) => Check::fail(name, e.to_string()),
        };
        for i in 0..n {
            for j in 0..n {
                checks.push(cmp(
                    format!("scalar({i},{j}) classical symmetry"),
                    cl(&self.scalar[i][j]),
                    cl(&self.scalar[j][i]).reflect(),
                ));
                for s in SIGNS {
                    checks.push(cmp(
                        format!("first{}({i},{j}) classical antisymmetry", sname(s)),
                        cl(self.first(s, i, j)),
                        -cl(self.second(s, j, i)).reflect(),
                    ));
                }
                for e1 in SIGNS {
                    for e2 in SIGNS {
                        let name = format!("mult{}{}({i},{j})", sname(e1), sname(e2));
                        let a = cl(self.mult(e1, e2, i, j));
                        checks.push(cmp(
                            format!("{name} classical symmetry"),
                            a.clone(),
                            cl(self.mult(e2, e1, j, i)).reflect(),
                        ));
                        let unit = a.valuation() == Some(0) && !a.coeff_or_zero(0).is_zero();
                        checks.push(Check::from_bool(
                            format!("{name} classical unit"),
                            unit,
                            format!("classical part {a}"),
                        ));
                    }
                }
            }
        }
        checks
    }

    /// Random tuple satisfying the membership conditions; entries are exact Laurent polynomials.
    pub fn random<R: Rng>(gcm: &Gcm, level: &Level, trunc: Trunc, rng: &mut R) -> Self {
        let n = gcm.rank();
        let nh = trunc.n_hbar;
        let empty = || table(n, |_, _| LaurentSeries::zero(Z, nh));
        // Classical data related by z -> -z (times `sign`) between (i, j) in `a` and (j, i) in `b`.
        let paired = |rng: &mut R, a: &mut Table, b: &mut Table, sign: i64, unit: bool| {
            for i in 0..n {
                for j in 0..n {
                    let (lo, len) = if unit { (0, 3) } else { (-2, 5) };
                    let mut c = random_laurent(rng, lo, len, nh, false);
                    if unit {
                        let k = if rng.gen() { 5 } else { -5 };
                        c = &c + &LaurentSeries::constant(Z, HbarScalar::from_int(k, nh));
                    }
                    let hb_lo = if unit { 0 } else { -2 };
                    a[i][j] = &c + &random_laurent(rng, hb_lo, 4, nh, true);
                    b[j][i] = &c.reflect().scale_q(&qi(sign)) + &random_laurent(rng, hb_lo, 4, nh, true);
                }
            }
        };
        let mut scalar = empty();
        let mut partner = empty();
        paired(rng, &mut scalar, &mut partner, 1, false);
        let scalar = merge_upper(&scalar, &partner);
        let (mut f0, mut s0, mut f1, mut s1) = (empty(), empty(), empty(), empty());
        paired(rng, &mut f0, &mut s0, -1, false);
        paired(rng, &mut f1, &mut s1, -1, false);
        let (mut pp, mut pp2, mut mm, mut mm2) = (empty(), empty(), empty(), empty());
        paired(rng, &mut pp, &mut pp2, 1, true);
        paired(rng, &mut mm, &mut mm2, 1, true);
        let (mut pm, mut mp) = (empty(), empty());
        paired(rng, &mut pm, &mut mp, 1, true);
        let mult = [[merge_upper(&pp, &pp2), pm], [mp, merge_upper(&mm, &mm2)]];
        TauTuple::from_parts(gcm, level, trunc, scalar, [f0, f1], [s0, s1], mult).expect("unit classical parts")
    }
}

/// Entries on and above the diagonal from `a`, below from `b`; diagonal classical parts are symmetrized.
fn merge_upper(a: &Table, b: &Table) -> Table {
    let n = a.len();
    table(n, |i, j| {
        if i < j {
            a[i][j].clone()
        } else if i > j {
            b[i][j].clone()
        } else {
            let c = a[i][i].classical_part();
            let even = (&c + &c.reflect()).scale_q(&crate::scalars::qf(1, 2));
            &even + &(&a[i][i] - &c)
        }
    })
}

fn random_laurent<R: Rng>(rng: &mut R, lo: i64, len: usize, nh: usize, hbar_only: bool) -> LaurentSeries {
    let cs = (0..len)
        .map(|_| {
            HbarScalar::from_coeffs(
                (0..nh)
                    .map(|k| {
                        if (k == 0) == hbar_only {
                            Q::zero()
                        } else {
                            qi(rng.gen_range(-3..=3))
                        }
                    })
                    .collect(),
                nh,
            )
        })
        .collect();
    LaurentSeries::new(Z, lo, cs, None, nh)
}

/// exp_substitute of a fixed rational function at e^{−z}.
fn at_exp_minus(num: &[i64], den: &[i64], nh: usize, cap: i64) -> Result<LaurentSeries> {
    exp_substitute(&RationalFunction::from_ints(num, den, nh)?, Sign::Minus, cap)
}

/// e^{−z}/(1 − e^{−z})².
pub fn double_pole_kernel(nh: usize, cap: i64) -> Result<LaurentSeries> {
    at_exp_minus(&[0, 1], &[1, -2, 1], nh, cap)
}

/// (1 + e^{−z})/(2 − 2e^{−z}).
pub fn simple_pole_kernel(nh: usize, cap: i64) -> Result<LaurentSeries> {
    at_exp_minus(&[1, 1], &[2, -2], nh, cap)
}

/// The distinguished tuple together with the operators used to build it.
#[derive(Clone, Debug)]
pub struct PaperTau {
    tuple: TauTuple,
    double_kernel: LaurentSeries,
    simple_kernel: LaurentSeries,
}

impl PaperTau {
    pub fn new(gcm: &Gcm, level: &Level, trunc: Trunc) -> Result<Self> {
        let n = gcm.rank();
        let nh = trunc.n_hbar;
        let cap = trunc.work();
        let rl = level.r_ell(gcm);
        let e_ker = double_pole_kernel(nh, cap + nh as i64)?;
        let k_ker = simple_pole_kernel(nh, cap + nh as i64)?;
        let shift = Op::shift_op(&rl, nh);
        let q_rl = Op::q_int_op(&rl, nh);

        let scalar = try_table(n, |i, j| {
            let a = qi(gcm.sym(i, j));
            let op = Op::q_int_op(&a, nh).compose(&q_rl).compose(&shift);
            let counter = LaurentSeries::term(Z, -(&a * &rl), -2, nh);
            let t = (&op.apply(&e_ker) + &counter).truncate_prec(cap);
            if t.classical_part().valuation().is_some_and(|v| v < 0) {
                return Err(Error::PoleStructure(format!("classical pole survives in scalar({i},{j})")));
            }
            Ok(t)
        })?;
        let first = try_table(n, |i, j| {
            let a = qi(gcm.sym(i, j));
            let op = Op::q_int_op(&a, nh).compose(&shift);
            let counter = LaurentSeries::term(Z, -a, -1, nh);
            let t = (&op.apply(&k_ker) + &counter).truncate_prec(cap);
            if t.classical_part().valuation().is_some_and(|v| v < 0) {
                return Err(Error::PoleStructure(format!("classical pole survives in first({i},{j})")));
            }
            Ok(t)
        })?;
        let diag = try_table(n, |i, j| Ok(f_hbar(gcm, i, j, nh, cap + 2)?.shift(-gcm.n_ij(i, j)).truncate_prec(cap)))?;
        let two_rl_hbar = |sign: i64| {
            &LaurentSeries::one(Z, nh)
                + &LaurentSeries::monomial(Z, HbarScalar::monomial(&rl * qi(2 * sign), 1, nh), -1)
        };
        let plus_minus = table(n, |i, j| if i == j { two_rl_hbar(1) } else { LaurentSeries::one(Z, nh) });
        let minus_plus = try_table(n, |i, j| {
            let g_inv = g_hbar(gcm, i, j, nh, cap)?.inverse(cap)?;
            let t = if i == j { &two_rl_hbar(-1) * &g_inv } else { g_inv };
            Ok(t.truncate_prec(cap))
        })?;
        let tuple = TauTuple {
            gcm: gcm.clone(),
            level: level.clone(),
            trunc,
            cap,
            scalar,
            second: [first.clone(), first.clone()],
            first: [first.clone(), first],
            mult: [[diag.clone(), plus_minus], [minus_plus, diag]],
        };
        Ok(PaperTau {
            tuple,
            double_kernel: e_ker,
            simple_kernel: k_ker,
        })
    }

    pub fn tuple(&self) -> &TauTuple {
        &self.tuple
    }

    pub fn gcm(&self) -> &Gcm {
        &self.tuple.gcm
    }

    pub fn level(&self) -> &Level {
        &self.tuple.level
    }

    pub fn trunc(&self) -> Trunc {
        self.tuple.trunc
    }

    pub fn double_kernel(&self) -> &LaurentSeries {
        &self.double_kernel
    }

    pub fn simple_kernel(&self) -> &LaurentSeries {
        &self.simple_kernel
    }

    fn rl(&self) -> Q {
        self.tuple.level.r_ell(&self.tuple.gcm)
    }

    fn nh(&self) -> usize {
        self.tuple.trunc.n_hbar
    }

    /// q^{rℓ∂} − q^{−rℓ∂}.
    pub fn level_difference(&self) -> Op {
        Op::q_diff_op(&self.rl(), self.nh())
    }

    fn report(&self, suite: &str, pairs: Vec<Entry>) -> Report {
        let t = &self.tuple;
        let mut r = Report::new(suite, t.gcm.name(), &t.level.to_string(), t.trunc.n_hbar, t.trunc.m_z, pairs);
        if !t.level.is_integral_shift(&t.gcm) {
            r = r.with_note(format!("non-integral shift r*level = {}", self.rl()));
        }
        r
    }

    fn pairs_par(&self, f: impl Fn(usize, usize) -> Result<Vec<Check>> + Sync) -> Result<Vec<Entry>> {
        self.tuple
            .gcm
            .pairs()
            .into_par_iter()
            .map(|(i, j)| Ok(Entry::pair(i, j, f(i, j)?)))
            .collect()
    }

    /// Scalar, mixed and multiplicative exchange identities for every pair.
    pub fn check_tech0(&self) -> Result<Report> {
        let t = &self.tuple;
        let upto = t.trunc.m_z;
        let nh = self.nh();
        let diff = self.level_difference();
        let q_rl = Op::q_int_op(&self.rl(), nh);
        let pairs = self.pairs_par(|i, j| {
            let a = qi(t.gcm.sym(i, j));
            let qa = Op::q_int_op(&a, nh);
            let mut checks = Vec::new();
            let lhs = t.scalar(i, j) - &t.scalar(j, i).reflect();
            let rhs = qa.compose(&q_rl).compose(&diff).apply(&self.double_kernel);
            checks.push(Check::series("scalar difference", &lhs, &rhs, upto)?);
            let rhs = qa.compose(&diff).apply(&self.simple_kernel);
            for s in SIGNS {
                let lhs = t.first(s, i, j) + &t.second(s, j, i).reflect();
                checks.push(Check::series(format!("mixed sum {}", sname(s)), &lhs, &rhs, upto)?);
            }
            let g = g_hbar(&t.gcm, i, j, nh, t.cap)?;
            let cap = t.cap;
            for e in SIGNS {
                let lhs = t.mult(e, e, i, j).div(&t.mult(e, e, j, i).reflect(), cap)?;
                checks.push(Check::series(format!("ratio {0}{0} is g", sname(e)), &lhs, &g, upto)?);
                let f = if e == Sign::Plus { Sign::Minus } else { Sign::Plus };
                let lhs = t.mult(f, e, j, i).reflect().div(t.mult(e, f, i, j), cap)?;
                checks.push(Check::series(format!("ratio {}{} is g", sname(e), sname(f)), &lhs, &g, upto)?);
            }
            Ok(checks)
        })?;
        Ok(self.report("tau-tech0", pairs))
    }

    /// The identities obtained by applying F(∂) to the additive differences.
    pub fn check_tech1(&self) -> Result<Report> {
        let t = &self.tuple;
        let upto = t.trunc.m_z;
        let nh = self.nh();
        let diff = self.level_difference();
        let f_op = Op::f_op(nh);
        let pairs = self.pairs_par(|i, j| {
            let mut checks = Vec::new();
            let lhs = f_op.apply(&(t.scalar(i, j) - &t.scalar(j, i).reflect()));
            let mixed_plus = t.first(Sign::Plus, i, j) + &t.second(Sign::Plus, j, i).reflect();
            let rhs = (-&diff.apply(&mixed_plus)).truncate_hbar(nh);
            checks.push(Check::series("F on scalar difference", &lhs, &rhs, upto)?);
            for s in SIGNS {
                let mixed = t.first(s, i, j) + &t.second(s, j, i).reflect();
                let lhs = f_op.apply(&mixed);
                let ratio = t.mult(Sign::Plus, s, i, j).div(&t.mult(s, Sign::Plus, j, i).reflect(), t.cap)?;
                let log = ratio.log(t.cap)?;
                let rhs = diff.apply(&log).scale_q(&-s.as_q());
                checks.push(Check::series(format!("F on mixed sum {}", sname(s)), &lhs, &rhs, upto)?);
            }
            Ok(checks)
        })?;
        Ok(self.report("tau-tech1", pairs))
    }

    /// Membership plus the classical-limit shape of the distinguished tuple.
    pub fn check_classical_limit(&self) -> Report {
        let t = &self.tuple;
        let upto = t.trunc.m_z;
        let n = t.gcm.rank();
        let mut entries = vec![Entry::new("membership", t.membership())];
        for i in 0..n {
            for j in 0..n {
                let mut checks = Vec::new();
                let s = t.scalar(i, j).classical_part();
                checks.push(Check::from_witness(
                    "classical scalar is even",
                    s.first_difference(&s.reflect(), upto).ok().flatten(),
                ));
                for sg in SIGNS {
                    let m = (t.first(sg, i, j) + &t.second(sg, j, i).reflect()).classical_part();
                    checks.push(Check::from_bool(
                        format!("classical mixed sum {} vanishes", sname(sg)),
                        m.first_difference(&LaurentSeries::zero(Z, m.n_hbar()), upto).ok().flatten().is_none(),
                        m.to_string(),
                    ));
                }
                for e1 in SIGNS {
                    for e2 in SIGNS {
                        let c = t.mult(e1, e2, i, j).classical_part();
                        let ok = c.valuation() == Some(0) && c.coeff_or_zero(0).is_one();
                        checks.push(Check::from_bool(
                            format!("classical mult{}{} is 1 at 0", sname(e1), sname(e2)),
                            ok,
                            c.to_string(),
                        ));
                    }
                }
                entries.push(Entry::pair(i, j, checks));
            }
        }
        self.report("tau-group-membership", entries)
    }
}

/// Group axioms on `samples` random tuples plus membership of the distinguished tuple.
pub fn check_group<R: Rng>(gcm: &Gcm, level: &Level, trunc: Trunc, samples: usize, rng: &mut R) -> Result<Report> {
    let upto = trunc.m_z;
    let id = TauTuple::identity(gcm, level, trunc);
    let mut entries = Vec::new();
    let tuples: Vec<TauTuple> = (0..samples + 1).map(|_| TauTuple::random(gcm, level, trunc, rng)).collect();
    let results: Vec<Result<Entry>> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let (a, b) = (&tuples[k], &tuples[k + 1]);
            let diff = |x: &TauTuple, y: &TauTuple, name: &str| -> Result<Check> {
                Ok(match x.first_difference(y, upto)? {
                    None => Check::pass(name),
                    Some((fam, w)) => Check::from_witness(name, Some(w)).with_detail(fam),
                })
            };
            let mut checks = vec![
                diff(&a.star(&id)?, a, "right identity")?,
                diff(&a.star(&a.inverse()?)?, &id, "right inverse")?,
                diff(&a.star(b)?, &b.star(a)?, "commutativity")?,
            ];
            let members = a.membership().into_iter().all(|c| c.pass);
            checks.push(Check::from_bool("random tuple is a member", members, "membership failed"));
            let prod_members = a.star(b)?.membership().into_iter().all(|c| c.pass);
            checks.push(Check::from_bool("product is a member", prod_members, "membership failed"));
            Ok(Entry::new(format!("sample {k}"), checks))
        })
        .collect();
    for r in results {
        entries.push(r?);
    }
    let special = PaperTau::new(gcm, level, trunc)?;
    entries.extend(special.check_classical_limit().pairs);
    let doubled = special.tuple().star(special.tuple())?;
    let n = gcm.rank();
    let mut dbl = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let twice = special.tuple().scalar(i, j).scale_q(&qi(2));
            dbl.push(Check::series(format!("scalar({i},{j}) doubles"), doubled.scalar(i, j), &twice, upto)?);
        }
    }
    entries.push(Entry::new("square of distinguished tuple", dbl));
    let mut r = Report::new("tau-group", gcm.name(), &level.to_string(), trunc.n_hbar, trunc.m_z, entries);
    r = r.with_note(format!("{samples} random tuples"));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small() -> Trunc {
        Trunc::new(4, 6)
    }

    #[test]
    fn kernels_have_expected_principal_parts() {
        let e = double_pole_kernel(3, 6).unwrap();
        assert!(e.coeff(-2).unwrap().is_one());
        assert_eq!(e.coeff(0).unwrap().classical(), &crate::scalars::qf(-1, 12));
        let k = simple_pole_kernel(3, 6).unwrap();
        assert!(k.coeff(-1).unwrap().is_one());
        assert_eq!(k.coeff(1).unwrap().classical(), &crate::scalars::qf(1, 12));
    }

    #[test]
    fn a1_identities_hold() {
        let p = PaperTau::new(&Gcm::a1(), &Level::int(1), small()).unwrap();
        let r0 = p.check_tech0().unwrap();
        assert!(r0.pass, "{r0}");
        let r1 = p.check_tech1().unwrap();
        assert!(r1.pass, "{r1}");
        assert!(p.check_classical_limit().pass);
    }

    #[test]
    fn level_zero_scalar_parts_vanish() {
        let p = PaperTau::new(&Gcm::a2(), &Level::int(0), small()).unwrap();
        for (i, j) in Gcm::a2().pairs() {
            assert!(p.tuple().scalar(i, j).is_zero());
        }
        assert!(p.check_tech0().unwrap().pass);
    }

    #[test]
    fn group_laws_on_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let r = check_group(&Gcm::a2(), &Level::int(1), small(), 4, &mut rng).unwrap();
        assert!(r.pass, "{r}");
    }

    #[test]
    fn mismatched_tuples_rejected() {
        let a = TauTuple::identity(&Gcm::a1(), &Level::int(1), small());
        let b = TauTuple::identity(&Gcm::a1(), &Level::int(2), small());
        assert!(a.star(&b).is_err());
    }
}
