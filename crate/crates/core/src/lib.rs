//! Schwarzian-type derivatives on plane domains, with conformal-metric
//! invariants and univalence criteria on the unit disk.
//!
//! The crate is organized around a truncated-series engine:
//!
//! * [`jet`] — univariate Taylor/Laurent jets ([`jet::Jet1`]) and bivariate
//!   Wirtinger jets ([`jet::Jet2`]) with exact truncated arithmetic,
//!   composition, and the `∂`, `∂̄` operators.
//! * [`expr`] — a small expression language for meromorphic functions of `z`
//!   (and densities of `z`, `zbar`), evaluated directly into jets.
//! * [`poly`] — the weighted polynomial families `P_n` and `T_n` in exact
//!   rational arithmetic.
//! * [`metric`] — conformal metrics, Möbius maps, Gaussian curvature, the
//!   metric Schwarzian `Θ`, and the covariant derivative `Λ_ρ`.
//! * [`schwarzian`] — the operator hierarchy: classical `Sf`, Tamanoi `S_n`,
//!   Aharonov `ψ_n`, Peschl–Minda `Dⁿ`/`Qⁿ`, invariant `Σⁿ`, and projective
//!   `𝔇ⁿ`/`Vⁿ`, each by independent routes.
//! * [`norm`] — weighted sup-norms `‖φ‖_c = sup (1−|z|²)^c |φ(z)|` over the
//!   unit disk with grid search and local refinement.
//! * [`criteria`] — univalence verdicts, Aharonov partial sums, the integral
//!   representation of `Sf` from `Vf`, and the related sharp constants.
//! * [`verify`] — a self-check suite over the library's pinned constants.
//! * [`cli`] — the `schwarz` command-line front end.

pub mod cli;
pub mod corpus;
pub mod criteria;
pub mod expr;
pub mod jet;
pub mod metric;
pub mod norm;
pub mod poly;
pub mod schwarzian;
pub mod verify;

pub use num_complex::Complex64;

/// Serde adapters for foreign types.
pub mod serde_util {
    /// Serialize a complex number as `{"re": …, "im": …}`.
    pub mod complex {
        use num_complex::Complex64;
        use serde::ser::SerializeStruct;

        pub fn serialize<S: serde::Serializer>(
            v: &Complex64,
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            let mut st = s.serialize_struct("Complex", 2)?;
            st.serialize_field("re", &v.re)?;
            st.serialize_field("im", &v.im)?;
            st.end()
        }

        #[derive(serde::Deserialize)]
        struct Parts {
            re: f64,
            im: f64,
        }

        pub fn deserialize<'de, D: serde::Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Complex64, D::Error> {
            let c: Parts = serde::Deserialize::deserialize(d)?;
            Ok(Complex64::new(c.re, c.im))
        }
    }
}

/// Crate-wide error type; variants are tagged by the module that raised them.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("jet: base point mismatch ({0} vs {1})")]
    BaseMismatch(Complex64, Complex64),
    #[error("jet: division by a jet that vanishes to full order (indeterminate at point)")]
    IndeterminateDivision,
    #[error("jet: operation `{op}` needs {needed} known coefficients, got {got}")]
    OrderTooLow {
        op: &'static str,
        needed: usize,
        got: usize,
    },
    #[error("jet: composition chain mismatch: inner value {0} != outer base {1}")]
    ComposeMismatch(Complex64, Complex64),
    #[error("jet: `{op}` applied to a jet with a pole at the base point")]
    PoleInput { op: &'static str },
    #[error("jet: `{op}` hit a zero or the branch-cut ray at the expansion point")]
    BranchPoint { op: &'static str },
    #[error("expr: syntax error at byte {offset}: expected {expected}")]
    Syntax { offset: usize, expected: String },
    #[error("expr: {reason} in subexpression `{subexpr}`")]
    Branch { subexpr: String, reason: String },
    #[error("expr: `zbar` is not allowed in a holomorphic expression")]
    NonHolomorphic,
    #[error("poly: generation order {0} exceeds the cap {1}")]
    PolyOrderTooLarge(u32, u32),
    #[error("poly: evaluation needs {needed} arguments, got {got}")]
    InsufficientArgs { needed: usize, got: usize },
    #[error("metric: point {0} outside the metric domain")]
    DomainViolation(Complex64),
    #[error("metric: density not positive at {0} (value {1})")]
    NonPositiveDensity(Complex64, Complex64),
    #[error("metric: degenerate Möbius matrix (det = 0)")]
    DegenerateMobius,
    #[error("schwarzian: critical point (f'(z) = 0 to tolerance) at {0}")]
    CriticalPoint(Complex64),
    #[error("schwarzian: {0}")]
    Unsupported(String),
    #[error("norm: evaluator failed on {failed} of {total} grid points")]
    GridFailure { failed: usize, total: usize },
    #[error("norm: {0}")]
    NonConvergence(String),
    #[error("quadrature: {0}")]
    QuadratureFailure(String),
    #[error("criteria: precondition violated: {0}")]
    Precondition(String),
    #[error("cli: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;
