//! The derivative-operator hierarchy: classical `Sf`, Tamanoi `S_n[f]`,
//! Aharonov `ψ_n[f]`, Peschl–Minda `Dⁿf`/`Qⁿf`, invariant `Σⁿf`, and
//! projective `𝔇ⁿf`/`Vⁿf`.
//!
//! Every operator is available by at least two independent computational
//! routes (series expansion, recursion on jets, polynomial substitution), so
//! the routes validate one another; see the route enums on each operation.

mod peschl;
mod projective;
mod tamanoi;

pub use peschl::{invariant_sigma, pm_d, pm_q, pm_q_jet, SigmaRoute};
pub use projective::{
    dproj_jets, identity_check, projective_d, projective_v, residual_composition, residual_thm46,
    residual_thm54, IdentityCheck, IdentityReport,
};
pub use tamanoi::{aharonov_psi, aharonov_psi_upto, tamanoi_s, PsiRoute, TamanoiRoute};

use num_complex::Complex64;

use crate::expr::{self, ExprAst};
use crate::jet::Jet1;
use crate::metric::Mobius;
use crate::{Error, Result};

/// Default headroom added to the virtual order when sizing the underlying
/// function jet (`Vⁿ` consumes `f`-derivatives through order `n+1`; the rest
/// is margin for cross-checks).
pub(crate) const ORDER_MARGIN: usize = 4;

/// Relative tolerance for declaring `f'(z) = 0` a critical point.
const CRITICAL_TOL: f64 = 1e-12;

/// A function handle: a parsed expression, a Möbius map, or a composition of
/// handles. Evaluation always goes through jets, so poles are tracked.
#[derive(Clone, Debug)]
pub enum Fun {
    Expr(ExprAst),
    Mob(Mobius),
    /// `Compose(outer, inner)` is `outer ∘ inner`.
    Compose(Box<Fun>, Box<Fun>),
}

impl Fun {
    pub fn parse(src: &str) -> Result<Fun> {
        let ast = expr::parse(src)?;
        if ast.contains_zbar() {
            return Err(Error::NonHolomorphic);
        }
        Ok(Fun::Expr(ast))
    }

    pub fn mobius(m: Mobius) -> Fun {
        Fun::Mob(m)
    }

    pub fn compose(outer: Fun, inner: Fun) -> Fun {
        Fun::Compose(Box::new(outer), Box::new(inner))
    }

    /// `M ∘ self`.
    pub fn post_mobius(self, m: Mobius) -> Fun {
        Fun::compose(Fun::Mob(m), self)
    }

    /// `self ∘ T`.
    pub fn pre_mobius(self, t: Mobius) -> Fun {
        Fun::compose(self, Fun::Mob(t))
    }

    pub fn describe(&self) -> String {
        match self {
            Fun::Expr(ast) => ast.to_string(),
            Fun::Mob(m) => format!("mobius[{};{};{};{}]", m.a, m.b, m.c, m.d),
            Fun::Compose(outer, inner) => {
                format!("({}) ∘ ({})", outer.describe(), inner.describe())
            }
        }
    }

    /// Jet with `len` known coefficients at `z0`; Laurent-flagged at poles.
    pub fn jet1(&self, z0: Complex64, len: usize) -> Result<Jet1> {
        match self {
            Fun::Expr(ast) => expr::eval_jet(ast, z0, len.max(1) - 1),
            Fun::Mob(m) => m.jet1(z0, len),
            Fun::Compose(outer, inner) => {
                let ij = inner.jet1(z0, len)?;
                if ij.is_pole() {
                    // M ∘ f = (M ∘ inv) ∘ (1/f): finite route through the pole
                    if let Fun::Mob(m) = outer.as_ref() {
                        let m2 = m.compose(&Mobius::inversion());
                        let flipped = ij.invert()?;
                        let oj = m2.jet1(flipped.value().unwrap(), len)?;
                        return Jet1::compose(&oj, &flipped);
                    }
                    return Err(Error::PoleInput {
                        op: "composition through a pole of the inner function",
                    });
                }
                let oj = outer.jet1(ij.value().unwrap(), len)?;
                Jet1::compose(&oj, &ij)
            }
        }
    }

    /// Point value; `None` at a pole.
    pub fn eval(&self, z: Complex64) -> Result<Option<Complex64>> {
        let j = self.jet1(z, 3)?;
        Ok(j.value())
    }
}

/// Check the noncritical-point precondition on a prepared (finite) jet:
/// `|f'(z)| ≥ 1e−12 · max(1, |f''(z)|)`.
pub(crate) fn check_not_critical(jet: &Jet1, z: Complex64) -> Result<()> {
    let c1 = jet.coeff(1);
    let scale = if jet.len() >= 3 {
        (2.0 * jet.coeff(2)).norm().max(1.0)
    } else {
        1.0
    };
    if c1.norm() < CRITICAL_TOL * scale {
        return Err(Error::CriticalPoint(z));
    }
    Ok(())
}

/// Evaluate `f` as a jet, apply the pole flip `w ↦ 1/w` when needed, and
/// check the critical-point precondition. Returns the jet and whether the
/// flip happened (Schwarzian-type outputs are invariant under it).
pub(crate) fn prepared_jet(f: &Fun, z: Complex64, len: usize) -> Result<(Jet1, bool)> {
    let raw = f.jet1(z, len)?;
    let (jet, flipped) = raw.pole_normalize()?;
    if !jet.is_finite() {
        return Err(Error::Unsupported(format!(
            "function jet is not finite at {z}"
        )));
    }
    check_not_critical(&jet, z)?;
    Ok((jet, flipped))
}

/// Jet of `Sf = (f''/f')' − ½(f''/f')²` from a jet of `f`; the output has
/// three fewer known coefficients.
pub(crate) fn sf_jet1_from(fjet: &Jet1) -> Result<Jet1> {
    if fjet.len() < 4 {
        return Err(Error::OrderTooLow {
            op: "schwarzian",
            needed: 4,
            got: fjet.len(),
        });
    }
    let d1 = fjet.deriv()?;
    let d2 = d1.deriv()?;
    let u = d2.div(&d1)?;
    let half = Complex64::new(0.5, 0.0);
    u.deriv()?.sub(&u.mul(&u)?.scale(half))
}

/// Jet of `Sf` at `z` with `out_len` known coefficients (so derivatives of
/// `Sf` through order `out_len − 1` are available).
pub fn sf_jet1(f: &Fun, z: Complex64, out_len: usize) -> Result<Jet1> {
    let (jet, _) = prepared_jet(f, z, out_len + 3)?;
    sf_jet1_from(&jet)
}

/// Classical Schwarzian derivative `Sf(z)`.
pub fn classical_s(f: &Fun, z: Complex64) -> Result<Complex64> {
    let sf = sf_jet1(f, z, 1 + ORDER_MARGIN - 2)?;
    Ok(sf.value().expect("Sf jet is finite by construction"))
}
