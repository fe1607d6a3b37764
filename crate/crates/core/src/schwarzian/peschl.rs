//! Peschl–Minda derivatives `Dⁿf`, the ratios `Qⁿf = D^{n+1}f/D¹f`, and the
//! invariant Schwarzian `Σⁿf = P_n(Q¹f,…,Qⁿf)` for a holomorphic map between
//! plane domains with conformal metrics `ρ` (source) and `σ` (target).
//!
//! The recursion
//!
//! ```text
//! D¹f = (σ∘f/ρ)·f',   D^{n+1}f = [∂_ρ − n ∂_ρ(log ρ) + (∂_σ log σ)∘f · D¹f] Dⁿf
//! ```
//!
//! is propagated on bivariate jets, so `∂_ρ = ρ^{−1}∂` is a genuine operator
//! application on the full non-holomorphic expression rather than a
//! hand-coded formula per order.

use num_complex::Complex64;

use super::{check_not_critical, Fun, ORDER_MARGIN};
use crate::jet::Jet2;
use crate::metric::Metric;
use crate::poly;
use crate::{Error, Result};

/// Route for [`invariant_sigma`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SigmaRoute {
    /// `P_n(Q¹f,…,Qⁿf)` with exact polynomial coefficients.
    Poly,
    /// Jet recursion `Σⁿ = (∂_ρ − (n−1)∂_ρ log ρ)Σ^{n−1} + ½Σ² Σ C(n,k)Σ^{k−1}Σ^{n−k−1}`.
    Recursion,
}

/// Precomputed jets for the `D`-chain at one point.
pub(crate) struct PmJets {
    /// `d[i]` is the jet of `D^{i+1}f`; the order drops by one per level.
    pub d: Vec<Jet2>,
    /// `ρ` density jet.
    pub rho: Jet2,
    /// `∂_ρ log ρ` jet.
    pub drho_logrho: Jet2,
}

impl PmJets {
    /// `Qⁿ = D^{n+1}/D¹` as a jet; requires `d` built to level `n+1`.
    pub fn q_jet(&self, n: u32) -> Result<Jet2> {
        self.d[n as usize].div(&self.d[0])
    }

    /// `∂_ρ X = ρ^{−1} ∂X`.
    pub fn d_rho(&self, x: &Jet2) -> Result<Jet2> {
        x.dz()?.div(&self.rho)
    }
}

/// Build the `D¹..D^{nmax}` jets at `z` with base order `order`.
///
/// A pole of `f` at `z` is flipped through `w ↦ 1/w` only when the target
/// metric is spherical (the inversion is then a `σ`-isometry and `Dⁿ/Qⁿ/Σⁿ`
/// are unchanged); otherwise the point is outside the target domain.
pub(crate) fn pm_jets(
    f: &Fun,
    z: Complex64,
    rho: &Metric,
    sigma: &Metric,
    nmax: u32,
    order: usize,
) -> Result<PmJets> {
    if !rho.domain_contains(z) {
        return Err(Error::DomainViolation(z));
    }
    let mut fjet = f.jet1(z, order + 2)?;
    if fjet.is_pole() || fjet.value().map_or(true, |v| v.norm() > 1e8) {
        if sigma.is_spherical() {
            fjet = fjet.invert()?;
        } else {
            return Err(Error::DomainViolation(z));
        }
    }
    check_not_critical(&fjet, z)?;
    let w0 = fjet.value().expect("flipped jet is finite");
    if !sigma.domain_contains(w0) {
        return Err(Error::DomainViolation(w0));
    }

    let rho2 = rho.density_jet2(z, order)?;
    let dlogrho = rho2.log()?.dz()?;
    let drho_logrho = dlogrho.div(&rho2)?;

    let sig2 = sigma.density_jet2(w0, order)?;
    // (∂_σ log σ) ∘ f as a jet in z
    let dsig_logsig_w = sig2.log()?.dz()?.div(&sig2)?;
    let a = dsig_logsig_w.compose_holo(&fjet)?;

    let sof = sig2.compose_holo(&fjet)?;
    let fp = Jet2::from_jet1(&fjet.deriv()?, order)?;
    let d1 = sof.mul(&fp)?.div(&rho2)?;

    let mut d = vec![d1];
    for m in 1..nmax {
        let dm = &d[(m - 1) as usize];
        let next = dm
            .dz()?
            .div(&rho2)?
            .sub(&drho_logrho.mul(dm)?.scale(Complex64::new(m as f64, 0.0)))?
            .add(&a.mul(&d[0])?.mul(dm)?)?;
        d.push(next);
    }
    Ok(PmJets {
        d,
        rho: rho2,
        drho_logrho,
    })
}

/// Peschl–Minda derivative `Dⁿf(z)` for `n ≥ 1`.
pub fn pm_d(f: &Fun, n: u32, z: Complex64, rho: &Metric, sigma: &Metric) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::Unsupported("Dⁿ is defined for n ≥ 1".into()));
    }
    let order = n as usize + ORDER_MARGIN;
    let jets = pm_jets(f, z, rho, sigma, n, order)?;
    Ok(jets.d[n as usize - 1].value())
}

/// `Qⁿf(z) = D^{n+1}f/D¹f` for `n ≥ 1`; requires `D¹f(z) ≠ 0`.
pub fn pm_q(f: &Fun, n: u32, z: Complex64, rho: &Metric, sigma: &Metric) -> Result<Complex64> {
    Ok(pm_q_jet(f, n, z, rho, sigma, 0)?.value())
}

/// `Qⁿf` as a bivariate jet with `extra_order` spare orders (used to apply
/// `∂_ρ` on top, e.g. when checking the recursion
/// `∂_ρ(Qⁿf) = Q^{n+1}f − [Q¹f − n ∂_ρ log ρ]Qⁿf`).
pub fn pm_q_jet(
    f: &Fun,
    n: u32,
    z: Complex64,
    rho: &Metric,
    sigma: &Metric,
    extra_order: usize,
) -> Result<Jet2> {
    if n == 0 {
        return Err(Error::Unsupported("Qⁿ is defined for n ≥ 1".into()));
    }
    let order = (n as usize + 1) + ORDER_MARGIN + extra_order;
    let jets = pm_jets(f, z, rho, sigma, n + 1, order)?;
    jets.q_jet(n)
}

/// Invariant Schwarzian `Σⁿf(z) = P_n(Q¹f,…,Qⁿf)` of virtual order `n`.
pub fn invariant_sigma(
    f: &Fun,
    n: u32,
    z: Complex64,
    rho: &Metric,
    sigma: &Metric,
    route: SigmaRoute,
) -> Result<Complex64> {
    if n == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if n == 1 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let order = n as usize + 1 + ORDER_MARGIN;
    let jets = pm_jets(f, z, rho, sigma, n + 1, order)?;
    match route {
        SigmaRoute::Poly => {
            let args: Vec<Complex64> = (1..=n)
                .map(|k| jets.q_jet(k).map(|q| q.value()))
                .collect::<Result<_>>()?;
            poly::gen_p(n)?.eval(&args)
        }
        SigmaRoute::Recursion => {
            let base = jets.d[0].base();
            let top = jets.q_jet(1)?.order();
            let q1 = jets.q_jet(1)?;
            let q2 = jets.q_jet(2)?;
            // Σ² = Q² − (3/2)(Q¹)²
            let sigma2 = q2.sub(&q1.mul(&q1)?.scale(Complex64::new(1.5, 0.0)))?;
            let mut s: Vec<Jet2> = vec![
                Jet2::constant(base, Complex64::new(1.0, 0.0), top),
                Jet2::constant(base, Complex64::new(0.0, 0.0), top),
                sigma2,
            ];
            for m in 3..=n {
                let prev = &s[(m - 1) as usize];
                let lead = jets.d_rho(prev)?.sub(
                    &jets
                        .drho_logrho
                        .mul(prev)?
                        .scale(Complex64::new((m - 1) as f64, 0.0)),
                )?;
                let mut conv = Jet2::constant(base, Complex64::new(0.0, 0.0), lead.order());
                for k in 1..m {
                    let term = s[(k - 1) as usize].mul(&s[(m - k - 1) as usize])?;
                    let b = {
                        let mut v = 1.0;
                        for i in 0..k.min(m - k) {
                            v = v * (m - i) as f64 / (i + 1) as f64;
                        }
                        v
                    };
                    conv = conv.add(&term.scale(Complex64::new(b, 0.0)))?;
                }
                let sm = lead.add(&s[2].mul(&conv)?.scale(Complex64::new(0.5, 0.0)))?;
                s.push(sm);
            }
            Ok(s[n as usize].value())
        }
    }
}
