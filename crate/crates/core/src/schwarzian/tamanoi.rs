//! Tamanoi Schwarzian derivatives `S_n[f]` of virtual order `n` and the
//! Aharonov invariants `ψ_n[f]`, each by independent routes.
//!
//! `S_n` is defined by the generating expansion
//!
//! ```text
//! f'(z)(f(z+w)−f(z)) / (½f''(z)(f(z+w)−f(z)) + f'(z)²) = Σ S_n[f](z) wⁿ⁺¹/(n+1)!
//! ```
//!
//! with `S₀ = 1`, `S₁ = 0`, `S₂ = Sf`, satisfies the recursion
//! `S_n = S_{n−1}' + ½S₂ Σ_k C(n,k) S_{k−1} S_{n−k−1}` (n ≥ 3), and equals
//! `P_n(q₁, …, q_n)` with `q_k = f^{(k+1)}/f'`.
//!
//! `ψ_n` comes from `f'(z)/(f(z+w)−f(z)) = 1/w − Σ ψ_n[f](z) w^{n−1}` and is
//! tied to `S_n` by `σ_n = ψ_n + Σ_{k=2}^{n−2} ψ_k σ_{n−k}` with
//! `σ_n = S_n/(n+1)!`. The `w⁰` term forces `ψ₁ = f''/(2f')`; the displayed
//! lists usually start at `ψ₂`.

use num_complex::Complex64;

use super::{prepared_jet, sf_jet1_from, Fun, ORDER_MARGIN};
use crate::jet::Jet1;
use crate::poly;
use crate::{Error, Result};

/// Route for [`tamanoi_s`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TamanoiRoute {
    /// Recursion on jets of `S_m[f]`.
    Recursion,
    /// `P_n(q₁,…,q_n)` with exact polynomial coefficients.
    Poly,
    /// Coefficient extraction from the generating expansion.
    Series,
}

/// Route for [`aharonov_psi`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PsiRoute {
    /// Laurent expansion of `f'(z)/(f(z+w)−f(z))`.
    Series,
    /// Recursive inversion of the `σ_n ↔ ψ_n` relation.
    Relation,
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn binom(n: u32, k: u32) -> f64 {
    let mut v = 1.0;
    for i in 0..k.min(n - k) {
        v = v * (n - i) as f64 / (i + 1) as f64;
    }
    v
}

/// `S_n[f](z)` by the chosen route. All routes agree to 1e−9 relative on
/// smooth inputs; `n = 0, 1` are the constants `1, 0`.
pub fn tamanoi_s(f: &Fun, n: u32, z: Complex64, route: TamanoiRoute) -> Result<Complex64> {
    if n == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if n == 1 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let len = n as usize + 1 + ORDER_MARGIN;
    let (jet, _) = prepared_jet(f, z, len)?;
    match route {
        TamanoiRoute::Poly => tamanoi_poly(&jet, n),
        TamanoiRoute::Series => tamanoi_series(&jet, n),
        TamanoiRoute::Recursion => Ok(tamanoi_recursion_jets(&jet, n)?[n as usize]
            .value()
            .expect("S_n jets are finite")),
    }
}

fn tamanoi_poly(jet: &Jet1, n: u32) -> Result<Complex64> {
    if jet.len() < n as usize + 2 {
        return Err(Error::OrderTooLow {
            op: "tamanoi_s(poly)",
            needed: n as usize + 2,
            got: jet.len(),
        });
    }
    let c1 = jet.coeff(1);
    let args: Vec<Complex64> = (1..=n)
        .map(|k| jet.coeff(k as i32 + 1) * factorial(k + 1) / c1)
        .collect();
    poly::gen_p(n)?.eval(&args)
}

fn tamanoi_series(jet: &Jet1, n: u32) -> Result<Complex64> {
    if jet.len() < n as usize + 3 {
        return Err(Error::OrderTooLow {
            op: "tamanoi_s(series)",
            needed: n as usize + 3,
            got: jet.len(),
        });
    }
    let c1 = jet.coeff(1);
    let c2 = jet.coeff(2);
    let g = jet.add_scalar(-jet.value().expect("prepared jets are finite"));
    let num = g.scale(c1);
    let den = g.scale(c2).add_scalar(c1 * c1);
    let q = num.div(&den)?;
    Ok(q.coeff(n as i32 + 1) * factorial(n + 1))
}

/// Jets of `S_0[f], …, S_n[f]` at the base of `jet`, via the recursion; each
/// step consumes one derivative, so `S_m` keeps `jet.len() − m − 1` known
/// coefficients.
fn tamanoi_recursion_jets(jet: &Jet1, n: u32) -> Result<Vec<Jet1>> {
    let base = jet.base();
    let s2 = sf_jet1_from(jet)?;
    let len = s2.len();
    let mut s: Vec<Jet1> = vec![
        Jet1::constant(base, Complex64::new(1.0, 0.0), len),
        Jet1::constant(base, Complex64::new(0.0, 0.0), len),
        s2,
    ];
    for m in 3..=n {
        let prev = &s[(m - 1) as usize];
        let mut conv = Jet1::constant(base, Complex64::new(0.0, 0.0), prev.len());
        for k in 1..m {
            let term = s[(k - 1) as usize].mul(&s[(m - k - 1) as usize])?;
            conv = conv.add(&term.scale(Complex64::new(binom(m, k), 0.0)))?;
        }
        let sm = prev
            .deriv()?
            .add(&s[2].mul(&conv)?.scale(Complex64::new(0.5, 0.0)))?;
        s.push(sm);
    }
    Ok(s)
}

/// `ψ_n[f](z)` for `n ≥ 1`. Both routes require `f(z) ≠ ∞` (after the pole
/// flip) and `f'(z) ≠ 0`; the flip changes `ψ₁` but no `ψ_n` with `n ≥ 2`.
pub fn aharonov_psi(f: &Fun, n: u32, z: Complex64, route: PsiRoute) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::Unsupported("ψ_n is defined for n ≥ 1".into()));
    }
    match route {
        PsiRoute::Series => Ok(aharonov_psi_upto(f, z, n)?[n as usize - 1]),
        PsiRoute::Relation => {
            let len = n as usize + 1 + ORDER_MARGIN;
            let (jet, _) = prepared_jet(f, z, len)?;
            // σ_m = S_m/(m+1)! from the polynomial route, then invert the
            // relation σ_m = ψ_m + Σ_{k=2}^{m−2} ψ_k σ_{m−k}.
            let mut sigma = vec![Complex64::new(0.0, 0.0); n as usize + 1];
            sigma[0] = Complex64::new(1.0, 0.0);
            for m in 2..=n {
                sigma[m as usize] = tamanoi_poly(&jet, m)? / factorial(m + 1);
            }
            let mut psi = vec![Complex64::new(0.0, 0.0); n as usize + 1];
            if n >= 1 {
                psi[1] = jet.coeff(2) / jet.coeff(1); // f''/(2f')
            }
            for m in 2..=n {
                let mut s = sigma[m as usize];
                for k in 2..=m.saturating_sub(2) {
                    s -= psi[k as usize] * sigma[(m - k) as usize];
                }
                psi[m as usize] = s;
            }
            Ok(psi[n as usize])
        }
    }
}

/// `ψ_1, …, ψ_nmax` in one series expansion (single jet evaluation).
pub fn aharonov_psi_upto(f: &Fun, z: Complex64, nmax: u32) -> Result<Vec<Complex64>> {
    let len = nmax as usize + 2 + ORDER_MARGIN;
    let (jet, _) = prepared_jet(f, z, len)?;
    let c1 = jet.coeff(1);
    let g = jet.add_scalar(-jet.value().expect("prepared jets are finite"));
    let inv = g.invert()?.scale(c1);
    debug_assert!(
        (inv.coeff(-1) - Complex64::new(1.0, 0.0)).norm() < 1e-9,
        "leading Laurent coefficient of f'/(f(z+w)−f(z)) must be 1"
    );
    Ok((1..=nmax).map(|n| -inv.coeff(n as i32 - 1)).collect())
}
