//! The bridge between the multiplicative picture (delta distributions in z2/z1) and the
//! additive one (poles at z1 = z2) through w = e^z.

use rand::Rng;

use crate::error::Result;
use crate::report::{Check, Entry, Report};
use crate::scalars::{binom_i, qf, HbarScalar};
use crate::series::{
    delta_grid, delta_pair, delta_pair_additive, exp_substitute, Distribution2, Poly, RationalFunction, Sign,
};
use crate::Trunc;

/// f_{-i}(w) = (1/(2 i!)) (−w d/dw)^i (w + 1)/(w − 1).
pub fn bridge_function(i: u32, n_hbar: usize) -> Result<RationalFunction> {
    let mut f = RationalFunction::from_ints(&[1, 1], &[-1, 1], n_hbar)?;
    let mut fact = 1i64;
    for k in 1..=i {
        f = f.euler().neg();
        fact *= k as i64;
    }
    Ok(f.scale(&HbarScalar::constant(qf(1, 2 * fact), n_hbar)))
}

/// (1/i!) (z2∂z2)^i δ(z2/z1) on the window.
pub fn delta_derivative(i: u32, m: i64, n_hbar: usize) -> Distribution2 {
    let mut d = delta_grid(m, n_hbar);
    let mut fact = 1i64;
    for k in 1..=i {
        d = d.euler_z2();
        fact *= k as i64;
    }
    d.scale(&HbarScalar::constant(qf(1, fact), n_hbar))
}

/// (1/i!) ∂_{z2}^i z1^{-1} δ(z2/z1): the additive delta, cell (a, b) = binom(b + i, i) at a + b = −1 − i.
pub fn additive_delta_derivative(i: u32, m: i64, n_hbar: usize) -> Distribution2 {
    let mut d = Distribution2::zero(m, n_hbar);
    let i = i as i64;
    for b in -m..=m {
        let a = -1 - i - b;
        if a.abs() <= m {
            d.add_at(a, b, &HbarScalar::constant(binom_i(b + i, i as usize), n_hbar));
        }
    }
    d
}

/// A rational function with denominator (w − 1)^k (1 + c w), k ≤ 2, and a small numerator.
pub fn random_rational<R: Rng>(rng: &mut R, n_hbar: usize) -> Result<RationalFunction> {
    let k = rng.gen_range(0..=2usize);
    let c = loop {
        let c: i64 = rng.gen_range(-3..=3);
        if c != -1 {
            break c;
        }
    };
    let den = Poly::from_ints(&[-1, 1], n_hbar).pow(k).mul(&Poly::from_ints(&[1, c], n_hbar));
    let deg = rng.gen_range(0..=3usize);
    let mut coeffs = Vec::with_capacity(deg + 1);
    for _ in 0..=deg {
        let mut parts = Vec::with_capacity(n_hbar);
        for _ in 0..n_hbar {
            parts.push(qf(rng.gen_range(-4..=4), rng.gen_range(1..=3)));
        }
        coeffs.push(HbarScalar::from_coeffs(parts, n_hbar));
    }
    RationalFunction::new(Poly::new(coeffs, n_hbar), den)
}

/// Delta identities for i ≤ max_i and the ring-homomorphism property of w ↦ e^z on random pairs.
pub fn check_bridge<R: Rng>(trunc: Trunc, max_i: u32, samples: usize, rng: &mut R) -> Result<Report> {
    let n = trunc.n_hbar;
    let m = trunc.m_z;
    let mut entries = Vec::new();
    for i in 0..=max_i {
        let f = bridge_function(i, n)?;
        let mult = delta_pair(&f.invert_var(), m)?;
        let add = delta_pair_additive(&exp_substitute(&f, Sign::Plus, 2 * m + 2)?, m)?;
        entries.push(Entry::new(
            format!("f_-{i}"),
            vec![
                Check::from_witness("multiplicative delta = (z2 d/dz2)^i delta / i!", mult.first_difference(&delta_derivative(i, m, n))),
                Check::from_witness("additive delta = d^i/dz2^i delta / i!", add.first_difference(&additive_delta_derivative(i, m, n))),
            ],
        ));
    }
    let cap = m + 6;
    let (mut sum_bad, mut prod_bad) = (None, None);
    for s in 0..samples {
        let f = random_rational(rng, n)?;
        let g = random_rational(rng, n)?;
        let (ef, eg) = (exp_substitute(&f, Sign::Plus, cap)?, exp_substitute(&g, Sign::Plus, cap)?);
        let sum = exp_substitute(&f.add(&g), Sign::Plus, cap)?;
        if let Some(w) = (&ef + &eg).first_difference(&sum, m)? {
            sum_bad.get_or_insert(format!("sample {s}: {f} + {g} at z^{}", w.z_exp));
        }
        let prod = exp_substitute(&f.mul(&g), Sign::Plus, cap)?;
        if let Some(w) = (&ef * &eg).first_difference(&prod, m)? {
            prod_bad.get_or_insert(format!("sample {s}: {f} * {g} at z^{}", w.z_exp));
        }
    }
    entries.push(Entry::new(
        "exp substitution",
        vec![
            Check::from_bool(format!("additive on {samples} pairs"), sum_bad.is_none(), sum_bad.unwrap_or_default()),
            Check::from_bool(format!("multiplicative on {samples} pairs"), prod_bad.is_none(), prod_bad.unwrap_or_default()),
        ],
    ));
    Ok(Report::new("bridge-vacom", "-", "-", n, m, entries)
        .with_note("the second expansion uses g_-i = f_-i; both sides of each delta identity are compared cell by cell"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zeroth_function_gives_delta() {
        let f = bridge_function(0, 2).unwrap();
        assert_eq!(delta_pair(&f.invert_var(), 4).unwrap(), delta_grid(4, 2));
    }

    #[test]
    fn bridge_suite_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let r = check_bridge(Trunc::new(3, 6), 3, 10, &mut rng).unwrap();
        assert!(r.pass, "{r}");
    }
}
