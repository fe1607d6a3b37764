//! Projective Schwarzian derivatives: the covariant chain
//! `𝔇ⁿf = Λ_ρ^{n−2}(Sf)` and `Vⁿf = T_n(𝔇²f,…,𝔇ⁿf)`, plus the cross-module
//! identity checks (the order-2 and order-3 relations between `Σⁿ` and the
//! projective quantities, and the cocycle rule for compositions).

use num_complex::Complex64;

use super::{classical_s, pm_q, prepared_jet, sf_jet1_from, Fun, ORDER_MARGIN};
use crate::jet::Jet2;
use crate::metric::{lambda_cov_jet, theta, theta_n, Metric};
use crate::poly;
use crate::{Error, Result};

/// Jets of `𝔇²f, …, 𝔇ⁿf` at `z` with respect to the source metric `ρ`.
/// `𝔇² = Sf` and `𝔇^{k+1} = Λ_ρ(𝔇^k)` with differential order `k`.
pub fn dproj_jets(
    f: &Fun,
    n: u32,
    z: Complex64,
    rho: &Metric,
    extra_order: usize,
) -> Result<Vec<Jet2>> {
    if n < 2 {
        return Err(Error::Unsupported("𝔇ⁿ is defined for n ≥ 2".into()));
    }
    if !rho.domain_contains(z) {
        return Err(Error::DomainViolation(z));
    }
    let len = n as usize + 1 + ORDER_MARGIN + extra_order;
    let (jet, _) = prepared_jet(f, z, len)?;
    let sf = sf_jet1_from(&jet)?;
    let mut d = Jet2::from_jet1(&sf, sf.len() - 1)?;
    let mut out = vec![d.clone()];
    for k in 2..n {
        d = lambda_cov_jet(rho, &d, k)?;
        out.push(d.clone());
    }
    Ok(out)
}

/// `𝔇ⁿf(z)` for `n ≥ 2` (`𝔇²f = Sf`).
pub fn projective_d(f: &Fun, n: u32, z: Complex64, rho: &Metric) -> Result<Complex64> {
    Ok(dproj_jets(f, n, z, rho, 0)?
        .last()
        .expect("n >= 2 yields at least one jet")
        .value())
}

/// Projective Schwarzian `Vⁿf(z) = T_n(𝔇²f,…,𝔇ⁿf)` for `n ≥ 2`
/// (`V²f = Sf`, independent of the metric).
pub fn projective_v(f: &Fun, n: u32, z: Complex64, rho: &Metric) -> Result<Complex64> {
    let jets = dproj_jets(f, n, z, rho, 0)?;
    // T_n lives in x₂..x_n; x₁ never occurs, pass a placeholder.
    let mut args = vec![Complex64::new(0.0, 0.0); n as usize];
    for (k, jet) in jets.iter().enumerate() {
        args[k + 1] = jet.value();
    }
    poly::gen_t(n)?.eval(&args)
}

/// Two sides of a checked identity.
#[derive(Clone, Copy, Debug)]
pub struct IdentityReport {
    pub lhs: Complex64,
    pub rhs: Complex64,
}

impl IdentityReport {
    pub fn residual(&self) -> f64 {
        (self.lhs - self.rhs).norm()
    }

    pub fn relative_residual(&self) -> f64 {
        self.residual() / self.lhs.norm().max(self.rhs.norm()).max(1.0)
    }
}

/// Which identity to evaluate at a point.
#[derive(Clone, Debug)]
pub enum IdentityCheck<'a> {
    /// `Σf = ρ^{−2}[Sf + (Θ_σ∘f)(f')² − Θ_ρ]` (order 2).
    Thm46 {
        f: &'a Fun,
        rho: &'a Metric,
        sigma: &'a Metric,
    },
    /// `Σ³f = ρ^{−3}[V³f + (Θ³_σ∘f)(f')³ − Θ³_ρ] + 2ρ^{−2}(Θ_σ∘f)(f')²Q¹f`
    /// (order 3).
    Thm54 {
        f: &'a Fun,
        rho: &'a Metric,
        sigma: &'a Metric,
    },
    /// `S(g∘f) = (Sg)∘f·(f')² + Sf`.
    Composition { g: &'a Fun, f: &'a Fun },
}

/// Evaluate both sides of the chosen identity at `z`, by independent routes.
pub fn identity_check(check: &IdentityCheck, z: Complex64) -> Result<IdentityReport> {
    match check {
        IdentityCheck::Thm46 { f, rho, sigma } => residual_thm46(f, z, rho, sigma),
        IdentityCheck::Thm54 { f, rho, sigma } => residual_thm54(f, z, rho, sigma),
        IdentityCheck::Composition { g, f } => residual_composition(g, f, z),
    }
}

fn value_and_derivative(f: &Fun, z: Complex64) -> Result<(Complex64, Complex64)> {
    let jet = f.jet1(z, 3)?;
    match jet.value() {
        Some(v) => Ok((v, jet.coeff(1))),
        None => Err(Error::PoleInput {
            op: "identity check at a pole of f",
        }),
    }
}

/// Order-2 identity relating `Σf` to `Sf` and the metric Schwarzians.
pub fn residual_thm46(
    f: &Fun,
    z: Complex64,
    rho: &Metric,
    sigma: &Metric,
) -> Result<IdentityReport> {
    let lhs = super::invariant_sigma(f, 2, z, rho, sigma, super::SigmaRoute::Poly)?;
    let (w, fp) = value_and_derivative(f, z)?;
    let sf = classical_s(f, z)?;
    let th_s = theta(sigma, w)?;
    let th_r = theta(rho, z)?;
    let r = rho.density(z)?;
    let rhs = (sf + th_s * fp * fp - th_r) / (r * r);
    Ok(IdentityReport { lhs, rhs })
}

/// Order-3 identity relating `Σ³f` to `V³f`, the iterated metric
/// Schwarzians, and `Q¹f`.
pub fn residual_thm54(
    f: &Fun,
    z: Complex64,
    rho: &Metric,
    sigma: &Metric,
) -> Result<IdentityReport> {
    let lhs = super::invariant_sigma(f, 3, z, rho, sigma, super::SigmaRoute::Poly)?;
    let (w, fp) = value_and_derivative(f, z)?;
    let v3 = projective_v(f, 3, z, rho)?;
    let th3_s = theta_n(sigma, 3, w)?;
    let th3_r = theta_n(rho, 3, z)?;
    let th_s = theta(sigma, w)?;
    let q1 = pm_q(f, 1, z, rho, sigma)?;
    let r = rho.density(z)?;
    let rhs = (v3 + th3_s * fp.powi(3) - th3_r) / (r * r * r)
        + 2.0 * th_s * fp * fp * q1 / (r * r);
    Ok(IdentityReport { lhs, rhs })
}

/// Cocycle rule for the classical Schwarzian under composition.
pub fn residual_composition(g: &Fun, f: &Fun, z: Complex64) -> Result<IdentityReport> {
    let comp = Fun::compose(g.clone(), f.clone());
    let lhs = classical_s(&comp, z)?;
    let (w, fp) = value_and_derivative(f, z)?;
    let rhs = classical_s(g, w)? * fp * fp + classical_s(f, z)?;
    Ok(IdentityReport { lhs, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::metric::{log_deriv, LogDerivKind, Mobius};
    use crate::schwarzian::{tamanoi_s, TamanoiRoute};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_close(a: Complex64, b: Complex64, tol: f64) {
        assert!(
            (a - b).norm() <= tol,
            "expected {b}, got {a} (diff {})",
            (a - b).norm()
        );
    }

    #[test]
    fn d2_is_classical_schwarzian() {
        let f = corpus::koebe();
        let z = c(0.2, 0.3);
        for rho in [Metric::hyperbolic(), Metric::euclidean()] {
            let d2 = projective_d(&f, 2, z, &rho).unwrap();
            assert_close(d2, classical_s(&f, z).unwrap(), 1e-12);
            let v2 = projective_v(&f, 2, z, &rho).unwrap();
            assert_close(v2, d2, 1e-12);
        }
    }

    #[test]
    fn euclidean_chain_is_plain_derivatives() {
        // ρ = λ₀: 𝔇ⁿf = (Sf)^{(n−2)} and Vⁿf = S_n[f]
        let f = corpus::ell();
        let rho = Metric::euclidean();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..6 {
            let z = corpus::sample_disk(&mut rng, 0.8);
            let sf = crate::schwarzian::sf_jet1(&f, z, 4).unwrap();
            for n in 2..=5u32 {
                let d = projective_d(&f, n, z, &rho).unwrap();
                let expect = sf.derivative_at_base(n as usize - 2).unwrap();
                assert_close(d, expect, 1e-8 * expect.norm().max(1.0));
                let v = projective_v(&f, n, z, &rho).unwrap();
                let sn = tamanoi_s(&f, n, z, TamanoiRoute::Poly).unwrap();
                assert_close(v, sn, 1e-8 * sn.norm().max(1.0));
            }
        }
    }

    #[test]
    fn hyperbolic_v3_matches_closed_form() {
        // Vf = (Sf)' − 4z̄(1−|z|²)^{−1}Sf on the disk
        let f = corpus::koebe();
        let rho = Metric::hyperbolic();
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..10 {
            let z = corpus::sample_disk(&mut rng, 0.85);
            let sf = crate::schwarzian::sf_jet1(&f, z, 2).unwrap();
            let expect = sf.derivative_at_base(1).unwrap()
                - 4.0 * z.conj() / (1.0 - z.norm_sqr()) * sf.value().unwrap();
            let v3 = projective_v(&f, 3, z, &rho).unwrap();
            assert_close(v3, expect, 1e-8 * expect.norm().max(1.0));
        }
    }

    #[test]
    fn dproj3_closed_form_for_unit_coefficient_schwarzian() {
        // Sf = (1−z²)^{−2}: Vf(z) = 8i·Im z/((1−|z|²)(1−z²)³); at i/2 the
        // value is 1024i/375
        let f = corpus::unit_coefficient_schwarzian();
        let rho = Metric::hyperbolic();
        let z = c(0.0, 0.5);
        let v = projective_d(&f, 3, z, &rho).unwrap();
        assert_close(v, c(0.0, 1024.0 / 375.0), 1e-9);
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        for _ in 0..8 {
            let z = corpus::sample_disk(&mut rng, 0.8);
            let v = projective_v(&f, 3, z, &rho).unwrap();
            let expect = 8.0 * Complex64::i() * z.im
                / ((1.0 - z.norm_sqr()) * (1.0 - z * z).powi(3));
            assert_close(v, expect, 1e-9 * expect.norm().max(1.0));
        }
    }

    #[test]
    fn v4_explicit_formula() {
        // V⁴f = S₄ − 10(∂ρ/ρ)S₃ + 4[7(∂ρ/ρ)² − ∂²ρ/ρ]S₂
        let f = corpus::koebe();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for rho in [
            Metric::hyperbolic(),
            Metric::custom("exp((z+zbar)/2)").unwrap(),
        ] {
            for _ in 0..6 {
                let z = corpus::sample_disk(&mut rng, 0.75);
                let v4 = projective_v(&f, 4, z, &rho).unwrap();
                let s2 = tamanoi_s(&f, 2, z, TamanoiRoute::Poly).unwrap();
                let s3 = tamanoi_s(&f, 3, z, TamanoiRoute::Poly).unwrap();
                let s4 = tamanoi_s(&f, 4, z, TamanoiRoute::Poly).unwrap();
                // ∂ρ/ρ = ∂ log ρ and ∂²ρ/ρ = ∂² log ρ + (∂ log ρ)²
                let dl = log_deriv(&rho, z, LogDerivKind::Dz).unwrap();
                let d2l = log_deriv(&rho, z, LogDerivKind::Dzz).unwrap();
                let d2rho_over_rho = d2l + dl * dl;
                let expect = s4 - 10.0 * dl * s3 + 4.0 * (7.0 * dl * dl - d2rho_over_rho) * s2;
                assert_close(v4, expect, 1e-7 * expect.norm().max(1.0));
            }
        }
    }

    #[test]
    fn v3_at_origin_is_s3_and_24_psi3() {
        // Vf(0) = S₃[f](0) = 24ψ₃[f](0) for f finite at 0
        let f = corpus::koebe();
        let rho = Metric::hyperbolic();
        let v = projective_v(&f, 3, c(0.0, 0.0), &rho).unwrap();
        let s3 = tamanoi_s(&f, 3, c(0.0, 0.0), TamanoiRoute::Series).unwrap();
        let p3 =
            crate::schwarzian::aharonov_psi(&f, 3, c(0.0, 0.0), crate::schwarzian::PsiRoute::Series)
                .unwrap();
        assert_close(v, s3, 1e-10);
        assert_close(v, 24.0 * p3, 1e-10);
    }

    #[test]
    fn thm46_reduces_to_sf_for_euclidean_metrics() {
        let f = corpus::koebe();
        let rho = Metric::euclidean();
        let z = c(0.3, 0.1);
        let rep = residual_thm46(&f, z, &rho, &rho).unwrap();
        assert!(rep.relative_residual() < 1e-10);
        assert_close(rep.rhs, classical_s(&f, z).unwrap(), 1e-10);
    }

    #[test]
    fn thm46_with_standard_and_custom_targets() {
        let f = corpus::koebe();
        let rho = Metric::hyperbolic();
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for sigma in [
            Metric::spherical(),
            Metric::custom("exp((z+zbar)/2)").unwrap(),
        ] {
            for _ in 0..10 {
                let z = corpus::sample_disk(&mut rng, 0.8);
                let rep = residual_thm46(&f, z, &rho, &sigma).unwrap();
                assert!(
                    rep.residual() < 1e-8 * rep.lhs.norm().max(1.0),
                    "thm46 residual {} at {z} with σ = {}",
                    rep.residual(),
                    sigma.name()
                );
            }
        }
    }

    #[test]
    fn thm54_with_standard_and_custom_targets() {
        let f = corpus::koebe();
        let rho = Metric::hyperbolic();
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        for sigma in [
            Metric::spherical(),
            Metric::custom("exp((z+zbar)/2)").unwrap(),
        ] {
            for _ in 0..10 {
                let z = corpus::sample_disk(&mut rng, 0.75);
                let rep = residual_thm54(&f, z, &rho, &sigma).unwrap();
                assert!(
                    rep.residual() < 1e-7 * rep.lhs.norm().max(1.0),
                    "thm54 residual {} at {z} with σ = {}",
                    rep.residual(),
                    sigma.name()
                );
            }
        }
    }

    #[test]
    fn sigma3_equals_weighted_v3_for_standard_metrics() {
        // Σ³f = λ₋₁^{−3} V³f for f: 𝔻 → ℂ̂ with standard metrics
        let f = corpus::ell();
        let rho = Metric::hyperbolic();
        let sig = Metric::spherical();
        let z = c(0.4, 0.2);
        let lhs = crate::schwarzian::invariant_sigma(
            &f,
            3,
            z,
            &rho,
            &sig,
            crate::schwarzian::SigmaRoute::Poly,
        )
        .unwrap();
        let lam = rho.density(z).unwrap();
        let rhs = projective_v(&f, 3, z, &rho).unwrap() / (lam * lam * lam);
        assert_close(lhs, rhs, 1e-9 * rhs.norm().max(1.0));
    }

    #[test]
    fn composition_rule_for_exp_after_koebe() {
        let f = corpus::koebe();
        let g = Fun::parse("exp(z)").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..20 {
            let z = corpus::sample_disk(&mut rng, 0.7);
            let rep = residual_composition(&g, &f, z).unwrap();
            assert!(
                rep.residual() <= 1e-7 * rep.rhs.norm().max(1.0),
                "composition residual {} at {z}",
                rep.residual()
            );
        }
    }

    #[test]
    fn projective_transformation_rule() {
        // V̂ⁿ(h∘f∘g)(ẑ) = (Vⁿf)(g(ẑ))·g'(ẑ)ⁿ with ρ̂ = g*ρ, Möbius g and h
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        let f = corpus::koebe();
        for rho in [
            Metric::hyperbolic(),
            Metric::custom("exp((z+zbar)/2)").unwrap(),
        ] {
            for _ in 0..5 {
                let g = corpus::random_disk_auto(&mut rng, 0.4);
                let h = corpus::random_mobius(&mut rng);
                let rho_hat = Metric::pullback(rho.clone(), g);
                let comp = f.clone().pre_mobius(g).post_mobius(h);
                let zh = corpus::sample_disk(&mut rng, 0.5);
                let w = g.apply(zh);
                let gp = g.derivative(zh);
                for n in 2..=4u32 {
                    let lhs = projective_v(&comp, n, zh, &rho_hat).unwrap();
                    let rhs = projective_v(&f, n, w, &rho).unwrap() * gp.powi(n as i32);
                    assert!(
                        (lhs - rhs).norm() <= 1e-7 * rhs.norm().max(1.0),
                        "V^{n} rule at {zh} for ρ = {}: {lhs} vs {rhs}",
                        rho.name()
                    );
                }
            }
        }
    }

    #[test]
    fn mobius_has_zero_projective_schwarzian() {
        let m = Mobius::disk_auto(c(0.3, -0.2)).unwrap();
        let f = Fun::mobius(m);
        let rho = Metric::hyperbolic();
        for n in 2..=5u32 {
            let v = projective_v(&f, n, c(0.5, 0.0), &rho).unwrap();
            assert!(v.norm() < 1e-9, "V^{n} of a Möbius map = {v}");
        }
    }
}
