//! Conformal metrics `ρ(z)|dz|` on plane domains and Möbius transformations.
//!
//! The three standard metrics are `λ_δ = (1 + δ|z|²)^{−1}|dz|` for
//! `δ ∈ {+1, 0, −1}` (spherical, Euclidean, hyperbolic) with constant
//! Gaussian curvature `4δ`. Custom metrics are closed-form densities in
//! `z`, `zbar`; pull-backs `g*ρ = ρ(g(z))|g'(z)|` along Möbius maps are
//! first-class so transformation rules can be tested through the same
//! machinery.
//!
//! On top of densities this module provides the log-derivatives, the
//! curvature `κ_ρ = −4 ∂∂̄ log ρ / ρ²`, the metric Schwarzian
//! `Θ = 2∂² log ρ − 2(∂ log ρ)²`, the covariant derivative
//! `Λ_ρ(φ) = ∂φ − 2n(∂ log ρ)φ` on `n`-differentials, and the iterates
//! `Θⁿ = Λ_ρ^{n−2}(Θ)`.

use num_complex::Complex64;

use crate::expr::{self, ExprAst};
use crate::jet::{Jet1, Jet2};
use crate::{Error, Result};

const I_TOL: f64 = 1e-10;

/// Fractional-linear map `z ↦ (az + b)/(cz + d)`, normalized to `ad − bc = 1`
/// on construction.
#[derive(Clone, Copy, Debug)]
pub struct Mobius {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Mobius {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let det = a * d - b * c;
        if det.norm() < 1e-14 {
            return Err(Error::DegenerateMobius);
        }
        let s = det.sqrt();
        Ok(Mobius {
            a: a / s,
            b: b / s,
            c: c / s,
            d: d / s,
        })
    }

    pub fn identity() -> Self {
        Mobius {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
            c: Complex64::new(0.0, 0.0),
            d: Complex64::new(1.0, 0.0),
        }
    }

    /// The inversion `w ↦ 1/w`.
    pub fn inversion() -> Self {
        Mobius::new(
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        )
        .unwrap()
    }

    /// Disk automorphism `T(z) = (z + a)/(1 + āz)` with `T(0) = a`.
    pub fn disk_auto(a: Complex64) -> Result<Self> {
        if a.norm() >= 1.0 {
            return Err(Error::DomainViolation(a));
        }
        Mobius::new(
            Complex64::new(1.0, 0.0),
            a,
            a.conj(),
            Complex64::new(1.0, 0.0),
        )
    }

    /// Rotation of the sphere `(aw + b)/(−b̄w + ā)`, an isometry of the
    /// spherical metric.
    pub fn sphere_rotation(a: Complex64, b: Complex64) -> Result<Self> {
        Mobius::new(a, b, -b.conj(), a.conj())
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        // with ad − bc = 1
        let den = self.c * z + self.d;
        1.0 / (den * den)
    }

    /// Pole of the map (preimage of ∞), if the map is not affine.
    pub fn pole(&self) -> Option<Complex64> {
        if self.c.norm() < 1e-300 {
            None
        } else {
            Some(-self.d / self.c)
        }
    }

    /// Matrix product = composition `self ∘ rhs`.
    pub fn compose(&self, rhs: &Mobius) -> Mobius {
        Mobius {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }

    pub fn inverse(&self) -> Mobius {
        Mobius {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// Jet at `z0` with `len` known coefficients; a Laurent jet at the pole.
    pub fn jet1(&self, z0: Complex64, len: usize) -> Result<Jet1> {
        let zj = Jet1::variable(z0, len);
        let num = zj.scale(self.a).add_scalar(self.b);
        let den = zj.scale(self.c).add_scalar(self.d);
        num.div(&den)
    }
}

/// A smooth positive conformal density, evaluable as a [`Jet2`] at any
/// interior point.
#[derive(Clone, Debug)]
pub enum Metric {
    /// `λ_δ = (1 + δ|z|²)^{−1}`, `δ ∈ {−1, 0, +1}`.
    Standard(i8),
    /// Closed-form density in `z`, `zbar` (must evaluate to a positive real).
    Custom { name: String, ast: ExprAst },
    /// Pull-back `g*ρ` with density `ρ(g(z))·|g'(z)|` along a Möbius map.
    Pullback { inner: Box<Metric>, map: Mobius },
}

impl Metric {
    pub fn hyperbolic() -> Self {
        Metric::Standard(-1)
    }

    pub fn euclidean() -> Self {
        Metric::Standard(0)
    }

    pub fn spherical() -> Self {
        Metric::Standard(1)
    }

    /// Parse a metric name as accepted by the CLI: `hyperbolic`,
    /// `euclidean`, `spherical`, or `custom:<expr in z, zbar>`.
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "hyperbolic" => Ok(Metric::hyperbolic()),
            "euclidean" => Ok(Metric::euclidean()),
            "spherical" => Ok(Metric::spherical()),
            other => {
                if let Some(src) = other.strip_prefix("custom:") {
                    Ok(Metric::Custom {
                        name: src.trim().to_owned(),
                        ast: expr::parse(src)?,
                    })
                } else {
                    Err(Error::Usage(format!(
                        "unknown metric `{other}`; expected hyperbolic, euclidean, spherical, or custom:<expr>"
                    )))
                }
            }
        }
    }

    pub fn custom(src: &str) -> Result<Self> {
        Ok(Metric::Custom {
            name: src.to_owned(),
            ast: expr::parse(src)?,
        })
    }

    pub fn pullback(inner: Metric, map: Mobius) -> Self {
        Metric::Pullback {
            inner: Box::new(inner),
            map,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Metric::Standard(-1) => "hyperbolic".into(),
            Metric::Standard(0) => "euclidean".into(),
            Metric::Standard(1) => "spherical".into(),
            Metric::Standard(d) => format!("standard({d})"),
            Metric::Custom { name, .. } => format!("custom:{name}"),
            Metric::Pullback { inner, .. } => format!("pullback({})", inner.name()),
        }
    }

    pub fn is_spherical(&self) -> bool {
        matches!(self, Metric::Standard(1))
    }

    pub fn domain_contains(&self, z: Complex64) -> bool {
        match self {
            Metric::Standard(-1) => z.norm_sqr() < 1.0,
            Metric::Standard(_) => true,
            Metric::Custom { ast, .. } => match expr::eval_point(ast, z) {
                Ok(Some(v)) => v.im.abs() <= I_TOL * (1.0 + v.re.abs()) && v.re > 0.0,
                _ => false,
            },
            Metric::Pullback { inner, map } => {
                map.pole().map_or(true, |p| (z - p).norm() > 1e-14)
                    && inner.domain_contains(map.apply(z))
            }
        }
    }

    /// Scalar density value (checked positive real).
    pub fn density(&self, z: Complex64) -> Result<f64> {
        let v = self.density_jet2(z, 0)?.value();
        Ok(v.re)
    }

    /// Density as a bivariate jet at `z`, with positivity check at the point.
    pub fn density_jet2(&self, z: Complex64, order: usize) -> Result<Jet2> {
        let jet = match self {
            Metric::Standard(delta) => {
                let d = *delta as f64;
                if *delta == -1 && z.norm_sqr() >= 1.0 {
                    return Err(Error::DomainViolation(z));
                }
                let zz = Jet2::variable_z(z, order).mul(&Jet2::variable_zbar(z, order))?;
                zz.scale(Complex64::new(d, 0.0))
                    .add_scalar(Complex64::new(1.0, 0.0))
                    .invert()?
            }
            Metric::Custom { ast, .. } => expr::eval_jet2(ast, z, order)?,
            Metric::Pullback { inner, map } => {
                if let Some(p) = map.pole() {
                    if (z - p).norm() <= 1e-14 {
                        return Err(Error::DomainViolation(z));
                    }
                }
                let gj = map.jet1(z, order + 1)?;
                // expand the inner density at the jet's own value so the
                // composition base matches bit-for-bit
                let w0 = gj.value().ok_or(Error::DomainViolation(z))?;
                let inner_jet = inner.density_jet2(w0, order)?;
                let composed = inner_jet.compose_holo(&gj)?;
                // |g'| = |cz + d|^{−2} for a det-1 matrix
                let den = Jet1::variable(z, order + 1)
                    .scale(map.c)
                    .add_scalar(map.d);
                let a = Jet2::from_jet1(&den, order)?;
                let abs_sq = a.mul(&a.conj())?;
                composed.mul(&abs_sq.invert()?)?
            }
        };
        let v = jet.value();
        if v.im.abs() > I_TOL * (1.0 + v.re.abs()) || v.re <= 0.0 {
            return Err(Error::NonPositiveDensity(z, v));
        }
        Ok(jet)
    }

    /// Jet of `log ρ` at `z`.
    pub fn log_density_jet2(&self, z: Complex64, order: usize) -> Result<Jet2> {
        self.density_jet2(z, order)?.log()
    }
}

/// Which Wirtinger derivative of `log ρ` to extract.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LogDerivKind {
    /// `∂ log ρ`
    Dz,
    /// `∂² log ρ`
    Dzz,
    /// `∂̄∂ log ρ`
    DzbarDz,
}

/// A requested Wirtinger derivative of `log ρ` at a point.
pub fn log_deriv(m: &Metric, z: Complex64, kind: LogDerivKind) -> Result<Complex64> {
    if !m.domain_contains(z) {
        return Err(Error::DomainViolation(z));
    }
    let l = m.log_density_jet2(z, 2)?;
    Ok(match kind {
        LogDerivKind::Dz => l.dz()?.value(),
        LogDerivKind::Dzz => l.dz()?.dz()?.value(),
        LogDerivKind::DzbarDz => l.dz()?.dzbar()?.value(),
    })
}

/// Gaussian curvature `κ_ρ = −4 ∂∂̄ log ρ / ρ²`. The imaginary residual must
/// be below 1e−10 (curvature is real by construction); it is asserted and
/// discarded.
pub fn curvature(m: &Metric, z: Complex64) -> Result<f64> {
    if !m.domain_contains(z) {
        return Err(Error::DomainViolation(z));
    }
    let rho = m.density_jet2(z, 2)?;
    let lap = rho.log()?.dz()?.dzbar()?.value();
    let rho0 = rho.value();
    let kappa = -4.0 * lap / (rho0 * rho0);
    if kappa.im.abs() > I_TOL * (1.0 + kappa.re.abs()) {
        return Err(Error::NonPositiveDensity(z, kappa));
    }
    Ok(kappa.re)
}

/// Metric Schwarzian `Θ_{R,ρ} = 2∂² log ρ − 2(∂ log ρ)²` at a point, in the
/// natural coordinate of the plane domain.
pub fn theta(m: &Metric, z: Complex64) -> Result<Complex64> {
    Ok(theta_jet2(m, z, 0)?.value())
}

/// `Θ` as a jet (for covariant iteration and pull-back tests).
pub fn theta_jet2(m: &Metric, z: Complex64, order: usize) -> Result<Jet2> {
    if !m.domain_contains(z) {
        return Err(Error::DomainViolation(z));
    }
    let l = m.log_density_jet2(z, order + 2)?;
    let dl = l.dz()?;
    let d2l = dl.dz()?;
    d2l.scale(Complex64::new(2.0, 0.0))
        .sub(&dl.mul(&dl)?.scale(Complex64::new(2.0, 0.0)))
}

/// Covariant derivative `Λ_ρ(φ) = ∂φ − 2n(∂ log ρ)φ` of an `n`-differential
/// given as a jet; the result is an `(n+1)`-differential jet of one lower
/// order.
pub fn lambda_cov_jet(m: &Metric, phi: &Jet2, n: u32) -> Result<Jet2> {
    if phi.order() == 0 {
        return Err(Error::OrderTooLow {
            op: "lambda_cov",
            needed: 1,
            got: 0,
        });
    }
    let dlog = m.log_density_jet2(phi.base(), phi.order())?.dz()?;
    phi.dz()?
        .sub(&dlog.mul(phi)?.scale(Complex64::new(2.0 * n as f64, 0.0)))
}

/// Value of `Λ_ρ(φ)` at `z` for an evaluator producing `φ` as a jet.
pub fn lambda_cov(
    m: &Metric,
    phi: impl FnOnce(Complex64, usize) -> Result<Jet2>,
    n: u32,
    z: Complex64,
    order: usize,
) -> Result<Complex64> {
    let jet = phi(z, order.max(1))?;
    Ok(lambda_cov_jet(m, &jet, n)?.value())
}

/// Iterated metric Schwarzian `Θⁿ = Λ_ρ^{n−2}(Θ)` for `n ≥ 2`.
pub fn theta_n(m: &Metric, n: u32, z: Complex64) -> Result<Complex64> {
    Ok(theta_n_jet2(m, n, z, 0)?.value())
}

pub fn theta_n_jet2(m: &Metric, n: u32, z: Complex64, order: usize) -> Result<Jet2> {
    if n < 2 {
        return Err(Error::Unsupported(format!(
            "theta_n is defined for n >= 2, got {n}"
        )));
    }
    let mut t = theta_jet2(m, z, order + (n as usize - 2))?;
    for k in 2..n {
        t = lambda_cov_jet(m, &t, k)?;
    }
    Ok(t)
}
