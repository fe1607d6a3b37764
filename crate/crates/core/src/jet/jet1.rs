use num_complex::Complex64;

use super::{ONE, POLE_FLIP_THRESHOLD, ZERO};
use crate::{Error, Result};

/// Truncated expansion of a function of one complex variable about a base
/// point: `Σ coeffs[i] · (z − base)^(lead + i)`.
///
/// Ordinary (finite-valued) jets have `lead == 0` and `coeffs.len()` equal to
/// `order + 1`. A jet with a pole at the base carries `lead < 0` with a
/// nonzero leading Laurent coefficient; the principal part is part of the
/// stored window.
#[derive(Clone, Debug)]
pub struct Jet1 {
    base: Complex64,
    lead: i32,
    coeffs: Vec<Complex64>,
}

impl Jet1 {
    fn raw(base: Complex64, lead: i32, coeffs: Vec<Complex64>) -> Self {
        debug_assert!(!coeffs.is_empty());
        Jet1 { base, lead, coeffs }.normalized()
    }

    /// Drop leading exact zeros of a Laurent jet; pad with known zeros if the
    /// lowest stored exponent ends up positive.
    fn normalized(mut self) -> Self {
        while self.lead < 0 && self.coeffs.len() > 1 && self.coeffs[0] == ZERO {
            self.coeffs.remove(0);
            self.lead += 1;
        }
        if self.lead < 0 && self.coeffs[0] == ZERO {
            self.lead = 0;
        }
        if self.lead > 0 {
            let mut padded = vec![ZERO; self.lead as usize];
            padded.extend_from_slice(&self.coeffs);
            self.coeffs = padded;
            self.lead = 0;
        }
        self
    }

    /// Jet of the constant `v`, with `len` known coefficients.
    pub fn constant(base: Complex64, v: Complex64, len: usize) -> Self {
        let mut coeffs = vec![ZERO; len.max(1)];
        coeffs[0] = v;
        Jet1 {
            base,
            lead: 0,
            coeffs,
        }
    }

    /// Jet of the identity function `z` at `base`.
    pub fn variable(base: Complex64, len: usize) -> Self {
        let mut coeffs = vec![ZERO; len.max(1)];
        coeffs[0] = base;
        if len > 1 {
            coeffs[1] = ONE;
        }
        Jet1 {
            base,
            lead: 0,
            coeffs,
        }
    }

    /// Ordinary jet from Taylor coefficients `c_0, …, c_N`.
    pub fn from_coeffs(base: Complex64, coeffs: Vec<Complex64>) -> Self {
        Self::raw(base, 0, coeffs)
    }

    /// Laurent jet with lowest exponent `lead`.
    pub fn laurent(base: Complex64, lead: i32, coeffs: Vec<Complex64>) -> Self {
        Self::raw(base, lead, coeffs)
    }

    pub fn base(&self) -> Complex64 {
        self.base
    }

    /// Number of known coefficients.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Lowest stored exponent (`< 0` exactly when the jet has a pole).
    pub fn lead(&self) -> i32 {
        self.lead
    }

    /// Highest known exponent.
    pub fn hi(&self) -> i32 {
        self.lead + self.coeffs.len() as i32 - 1
    }

    pub fn is_pole(&self) -> bool {
        self.lead < 0
    }

    /// Order of the pole at the base (0 for finite jets).
    pub fn pole_order(&self) -> u32 {
        (-self.lead.min(0)) as u32
    }

    /// Value at the base point; `None` at a pole.
    pub fn value(&self) -> Option<Complex64> {
        if self.is_pole() {
            None
        } else {
            Some(self.coeffs[0])
        }
    }

    /// Coefficient of `(z − base)^e`; exponents below the stored window are
    /// genuine zeros, exponents above it are unknown.
    pub fn coeff(&self, e: i32) -> Complex64 {
        debug_assert!(e <= self.hi(), "coefficient {e} beyond known window");
        if e < self.lead {
            ZERO
        } else {
            self.coeffs[(e - self.lead) as usize]
        }
    }

    /// Taylor coefficients of an ordinary jet.
    pub fn taylor_coeffs(&self) -> Result<&[Complex64]> {
        if self.is_pole() {
            return Err(Error::PoleInput {
                op: "taylor_coeffs",
            });
        }
        Ok(&self.coeffs)
    }

    /// `f^{(k)}(base) = k! · c_k` for an ordinary jet.
    pub fn derivative_at_base(&self, k: usize) -> Result<Complex64> {
        if self.is_pole() {
            return Err(Error::PoleInput {
                op: "derivative_at_base",
            });
        }
        if k >= self.coeffs.len() {
            return Err(Error::OrderTooLow {
                op: "derivative_at_base",
                needed: k + 1,
                got: self.coeffs.len(),
            });
        }
        let mut fact = 1.0;
        for i in 1..=k {
            fact *= i as f64;
        }
        Ok(self.coeffs[k] * fact)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    fn check_base(&self, rhs: &Jet1) -> Result<()> {
        if self.base != rhs.base {
            return Err(Error::BaseMismatch(self.base, rhs.base));
        }
        Ok(())
    }

    /// Keep at most `len` known coefficients.
    pub fn truncate(&self, len: usize) -> Jet1 {
        let mut coeffs = self.coeffs.clone();
        coeffs.truncate(len.max(1));
        Jet1 {
            base: self.base,
            lead: self.lead,
            coeffs,
        }
    }

    pub fn neg(&self) -> Jet1 {
        self.scale(-ONE)
    }

    pub fn scale(&self, s: Complex64) -> Jet1 {
        Jet1::raw(
            self.base,
            self.lead,
            self.coeffs.iter().map(|c| c * s).collect(),
        )
    }

    pub fn add_scalar(&self, s: Complex64) -> Jet1 {
        if self.lead <= 0 {
            let mut coeffs = self.coeffs.clone();
            let i = (-self.lead) as usize;
            if i < coeffs.len() {
                coeffs[i] += s;
            }
            Jet1::raw(self.base, self.lead, coeffs)
        } else {
            unreachable!("normalized jets have lead <= 0")
        }
    }

    pub fn add(&self, rhs: &Jet1) -> Result<Jet1> {
        self.check_base(rhs)?;
        let lo = self.lead.min(rhs.lead);
        let hi = self.hi().min(rhs.hi());
        if hi < lo {
            return Err(Error::OrderTooLow {
                op: "add",
                needed: 1,
                got: 0,
            });
        }
        let coeffs = (lo..=hi)
            .map(|e| self.coeff_in_window(e) + rhs.coeff_in_window(e))
            .collect();
        Ok(Jet1::raw(self.base, lo, coeffs))
    }

    fn coeff_in_window(&self, e: i32) -> Complex64 {
        if e < self.lead || e > self.hi() {
            ZERO
        } else {
            self.coeffs[(e - self.lead) as usize]
        }
    }

    pub fn sub(&self, rhs: &Jet1) -> Result<Jet1> {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Jet1) -> Result<Jet1> {
        self.check_base(rhs)?;
        let n = self.coeffs.len().min(rhs.coeffs.len());
        let mut out = vec![ZERO; n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= n {
                break;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if i + j >= n {
                    break;
                }
                out[i + j] += a * b;
            }
        }
        Ok(Jet1::raw(self.base, self.lead + rhs.lead, out))
    }

    /// Multiplicative inverse; a zero of order `m` at the base becomes a pole
    /// of order `m` (Laurent inversion). Errors if the jet vanishes to full
    /// order.
    pub fn invert(&self) -> Result<Jet1> {
        let m = match self.coeffs.iter().position(|c| *c != ZERO) {
            Some(m) => m,
            None => return Err(Error::IndeterminateDivision),
        };
        let h = &self.coeffs[m..];
        let mut out = vec![ZERO; h.len()];
        out[0] = ONE / h[0];
        for k in 1..h.len() {
            let mut s = ZERO;
            for j in 1..=k {
                s += h[j] * out[k - j];
            }
            out[k] = -s / h[0];
        }
        Ok(Jet1::raw(self.base, -(self.lead + m as i32), out))
    }

    pub fn div(&self, rhs: &Jet1) -> Result<Jet1> {
        self.mul(&rhs.invert()?)
    }

    /// Derivative with respect to `z`.
    pub fn deriv(&self) -> Result<Jet1> {
        if self.lead == 0 {
            if self.coeffs.len() < 2 {
                return Err(Error::OrderTooLow {
                    op: "deriv",
                    needed: 2,
                    got: self.coeffs.len(),
                });
            }
            let coeffs = (1..self.coeffs.len())
                .map(|k| self.coeffs[k] * k as f64)
                .collect();
            Ok(Jet1::raw(self.base, 0, coeffs))
        } else {
            let coeffs = self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c * (self.lead + i as i32) as f64)
                .collect();
            Ok(Jet1::raw(self.base, self.lead - 1, coeffs))
        }
    }

    /// Integer power by binary exponentiation; negative powers go through
    /// [`Jet1::invert`] and may produce Laurent jets.
    pub fn powi(&self, k: i32) -> Result<Jet1> {
        if k < 0 {
            return self.invert()?.powi(-k);
        }
        let mut acc = Jet1::constant(self.base, ONE, self.coeffs.len());
        let mut sq = self.clone();
        let mut k = k as u32;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&sq)?;
            }
            k >>= 1;
            if k > 0 {
                sq = sq.mul(&sq)?;
            }
        }
        Ok(acc)
    }

    /// Composition `outer ∘ inner` at `inner.base()`. The inner jet must be
    /// finite with value equal to `outer.base()`; the outer jet may have a
    /// pole there (the composite then has a pole, provided the inner function
    /// takes the value to first order).
    pub fn compose(outer: &Jet1, inner: &Jet1) -> Result<Jet1> {
        if inner.is_pole() {
            return Err(Error::PoleInput {
                op: "compose (inner)",
            });
        }
        let v = inner.coeffs[0];
        if v != outer.base {
            return Err(Error::ComposeMismatch(v, outer.base));
        }
        let len = inner.coeffs.len().min(outer.coeffs.len());
        let mut f = inner.truncate(len);
        f.coeffs[0] = ZERO;

        // Regular part by Horner.
        let hi = outer.hi();
        let mut acc = Jet1::constant(inner.base, ZERO, len);
        if hi >= 0 {
            acc = Jet1::constant(inner.base, outer.coeff_in_window(hi), len);
            let mut e = hi - 1;
            while e >= 0 {
                acc = acc.mul(&f)?.truncate(len).add_scalar(outer.coeff_in_window(e));
                e -= 1;
            }
        }

        // Principal part: outer has a pole at the composition point.
        if outer.lead < 0 {
            if len < 2 || f.coeffs[1] == ZERO {
                return Err(Error::Unsupported(
                    "composition with a pole through a critical point".into(),
                ));
            }
            let finv = f.invert()?;
            for e in outer.lead..0 {
                let c = outer.coeff_in_window(e);
                if c != ZERO {
                    acc = acc.add(&finv.powi(-e)?.scale(c))?;
                }
            }
        }
        Ok(acc)
    }

    /// Flip `f ↦ 1/f` when the jet has a pole or an oversized value at the
    /// base. Returns the (possibly flipped) jet and whether the flip was
    /// applied; Schwarzian-type outputs are unchanged under the flip.
    pub fn pole_normalize(&self) -> Result<(Jet1, bool)> {
        if self.is_pole() {
            return Ok((self.invert()?, true));
        }
        if self.coeffs[0].norm() > POLE_FLIP_THRESHOLD {
            return Ok((self.invert()?, true));
        }
        Ok((self.clone(), false))
    }

    fn require_finite(&self, op: &'static str) -> Result<()> {
        if self.is_pole() {
            return Err(Error::PoleInput { op });
        }
        Ok(())
    }

    pub fn exp(&self) -> Result<Jet1> {
        self.require_finite("exp")?;
        let a = &self.coeffs;
        let mut e = vec![ZERO; a.len()];
        e[0] = a[0].exp();
        for k in 1..a.len() {
            let mut s = ZERO;
            for j in 1..=k {
                s += a[j] * e[k - j] * j as f64;
            }
            e[k] = s / k as f64;
        }
        Ok(Jet1::raw(self.base, 0, e))
    }

    /// Principal-branch logarithm; errors at a zero or on the cut `(−∞, 0]`.
    pub fn log(&self) -> Result<Jet1> {
        self.require_finite("log")?;
        let a = &self.coeffs;
        if a[0] == ZERO || (a[0].im == 0.0 && a[0].re < 0.0) {
            return Err(Error::BranchPoint { op: "log" });
        }
        let mut l = vec![ZERO; a.len()];
        l[0] = a[0].ln();
        for k in 1..a.len() {
            let mut s = ZERO;
            for j in 1..k {
                s += l[j] * a[k - j] * j as f64;
            }
            l[k] = (a[k] - s / k as f64) / a[0];
        }
        Ok(Jet1::raw(self.base, 0, l))
    }

    /// Principal-branch square root; errors at a zero (branch point) or on
    /// the cut.
    pub fn sqrt(&self) -> Result<Jet1> {
        self.require_finite("sqrt")?;
        let a = &self.coeffs;
        if a[0] == ZERO || (a[0].im == 0.0 && a[0].re < 0.0) {
            return Err(Error::BranchPoint { op: "sqrt" });
        }
        let mut s = vec![ZERO; a.len()];
        s[0] = a[0].sqrt();
        for k in 1..a.len() {
            let mut acc = ZERO;
            for j in 1..k {
                acc += s[j] * s[k - j];
            }
            s[k] = (a[k] - acc) / (2.0 * s[0]);
        }
        Ok(Jet1::raw(self.base, 0, s))
    }

    pub fn sin(&self) -> Result<Jet1> {
        Ok(self.sin_cos()?.0)
    }

    pub fn cos(&self) -> Result<Jet1> {
        Ok(self.sin_cos()?.1)
    }

    pub fn sin_cos(&self) -> Result<(Jet1, Jet1)> {
        self.require_finite("sin/cos")?;
        let a = &self.coeffs;
        let mut s = vec![ZERO; a.len()];
        let mut c = vec![ZERO; a.len()];
        s[0] = a[0].sin();
        c[0] = a[0].cos();
        for k in 1..a.len() {
            let mut ds = ZERO;
            let mut dc = ZERO;
            for j in 1..=k {
                ds += a[j] * c[k - j] * j as f64;
                dc += a[j] * s[k - j] * j as f64;
            }
            s[k] = ds / k as f64;
            c[k] = -dc / k as f64;
        }
        Ok((
            Jet1::raw(self.base, 0, s),
            Jet1::raw(self.base, 0, c),
        ))
    }

    /// General power `self^e = exp(e · log self)` on the principal branch.
    pub fn powc(&self, e: Complex64) -> Result<Jet1> {
        self.log()?.scale(e).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

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
    fn square_of_one_plus_w_is_exact() {
        // (1+w)·(1+w) at 0, order 2 → 1 + 2w + w²
        let a = Jet1::from_coeffs(c(0.0, 0.0), vec![ONE, ONE, ZERO]);
        let p = a.mul(&a).unwrap();
        assert_eq!(p.taylor_coeffs().unwrap(), &[ONE, c(2.0, 0.0), ONE]);
    }

    #[test]
    fn f_over_f_is_one() {
        let f = Jet1::variable(c(0.4, 0.1), 5).exp().unwrap();
        let q = f.div(&f).unwrap();
        let t = q.taylor_coeffs().unwrap();
        assert_close(t[0], ONE, 1e-15);
        for &ck in &t[1..] {
            assert_close(ck, ZERO, 1e-15);
        }
    }

    #[test]
    fn geometric_series_inverse() {
        // 1/(1−w) at 0, order 3 → 1 + w + w² + w³
        let den = Jet1::from_coeffs(c(0.0, 0.0), vec![ONE, -ONE, ZERO, ZERO]);
        let inv = den.invert().unwrap();
        assert_eq!(inv.lead(), 0);
        for k in 0..4 {
            assert_close(inv.coeff(k), ONE, 1e-15);
        }
    }

    #[test]
    fn division_by_fully_vanishing_jet_is_indeterminate() {
        let z = Jet1::constant(c(0.0, 0.0), ZERO, 4);
        assert!(matches!(z.invert(), Err(Error::IndeterminateDivision)));
    }

    #[test]
    fn base_mismatch_is_rejected() {
        let a = Jet1::variable(c(0.0, 0.0), 3);
        let b = Jet1::variable(c(1.0, 0.0), 3);
        assert!(matches!(a.add(&b), Err(Error::BaseMismatch(_, _))));
    }

    #[test]
    fn compose_with_identity_outer() {
        let inner = Jet1::variable(c(0.3, 0.0), 4).exp().unwrap();
        let outer = Jet1::variable(inner.value().unwrap(), 4);
        let comp = Jet1::compose(&outer, &inner).unwrap();
        for k in 0..4 {
            assert_close(comp.coeff(k), inner.coeff(k), 1e-15);
        }
    }

    #[test]
    fn exp_of_log_round_trips() {
        // exp∘log applied to the jet of 1+w at 0, order 4 → 1 + w
        let a = Jet1::from_coeffs(c(0.0, 0.0), vec![ONE, ONE, ZERO, ZERO, ZERO]);
        let r = a.log().unwrap().exp().unwrap();
        assert_close(r.coeff(0), ONE, 1e-15);
        assert_close(r.coeff(1), ONE, 1e-14);
        for k in 2..5 {
            assert_close(r.coeff(k), ZERO, 1e-14);
        }
    }

    #[test]
    fn laurent_inversion_of_simple_zero() {
        // 1/(w·(1+w)) at 0 → w⁻¹ − 1 + w − w² …
        let a = Jet1::from_coeffs(c(0.0, 0.0), vec![ZERO, ONE, ONE, ZERO, ZERO]);
        let inv = a.invert().unwrap();
        assert_eq!(inv.lead(), -1);
        assert!(inv.is_pole());
        assert_close(inv.coeff(-1), ONE, 1e-15);
        assert_close(inv.coeff(0), -ONE, 1e-15);
        assert_close(inv.coeff(1), ONE, 1e-15);
    }

    #[test]
    fn pole_normalize_flips_pole_to_simple_zero() {
        let a = Jet1::laurent(c(0.0, 0.0), -1, vec![ONE, ZERO, ONE, ZERO]);
        let (flipped, did) = a.pole_normalize().unwrap();
        assert!(did);
        assert!(!flipped.is_pole());
        assert_close(flipped.value().unwrap(), ZERO, 1e-15);
        assert!(flipped.coeff(1) != ZERO);
    }

    #[test]
    fn derivative_shifts_and_scales() {
        let a = Jet1::from_coeffs(c(0.0, 0.0), vec![c(5.0, 0.0), c(3.0, 0.0), c(2.0, 0.0)]);
        let d = a.deriv().unwrap();
        assert_eq!(d.taylor_coeffs().unwrap(), &[c(3.0, 0.0), c(4.0, 0.0)]);
    }

    #[test]
    fn laurent_derivative() {
        // d/dw (w⁻¹ + 2 + 3w) = −w⁻² + 3
        let a = Jet1::laurent(c(0.0, 0.0), -1, vec![ONE, c(2.0, 0.0), c(3.0, 0.0)]);
        let d = a.deriv().unwrap();
        assert_eq!(d.lead(), -2);
        assert_close(d.coeff(-2), -ONE, 1e-15);
        assert_close(d.coeff(-1), ZERO, 1e-15);
        assert_close(d.coeff(0), c(3.0, 0.0), 1e-15);
    }

    #[test]
    fn integer_polynomial_arithmetic_is_exact() {
        // (1 + 2w + 3w²)(4 + 5w) = 4 + 13w + 22w² + O(w³)
        let a = Jet1::from_coeffs(c(0.0, 0.0), vec![ONE, c(2.0, 0.0), c(3.0, 0.0)]);
        let b = Jet1::from_coeffs(c(0.0, 0.0), vec![c(4.0, 0.0), c(5.0, 0.0), ZERO]);
        let p = a.mul(&b).unwrap();
        assert_eq!(
            p.taylor_coeffs().unwrap(),
            &[c(4.0, 0.0), c(13.0, 0.0), c(22.0, 0.0)]
        );
    }

    /// Jets vs central finite differences with Richardson extrapolation, for
    /// each implemented elementary function.
    #[test]
    fn elementary_jets_match_finite_differences() {
        type Scalar = fn(Complex64) -> Complex64;
        type JetFn = fn(&Jet1) -> Result<Jet1>;
        let cases: Vec<(Scalar, JetFn, Complex64)> = vec![
            (|z| z.exp(), |j| j.exp(), c(0.3, 0.2)),
            (|z| z.ln(), |j| j.log(), c(1.2, 0.4)),
            (|z| z.sin(), |j| j.sin(), c(0.5, -0.3)),
            (|z| z.cos(), |j| j.cos(), c(-0.2, 0.6)),
            (|z| z.sqrt(), |j| j.sqrt(), c(1.5, 0.7)),
        ];
        for (scalar, jetfn, z0) in cases {
            let jet = jetfn(&Jet1::variable(z0, 6)).unwrap();
            // first and second derivatives via central differences at two
            // steps, Richardson-combined assuming O(h²) truncation; the
            // second difference loses ~6 digits to cancellation at h = 1e−5,
            // which sets its tolerance
            for k in [1usize, 2] {
                let fd = |h: f64| -> Complex64 {
                    let hh = Complex64::new(h, 0.0);
                    if k == 1 {
                        (scalar(z0 + hh) - scalar(z0 - hh)) / (2.0 * h)
                    } else {
                        (scalar(z0 + hh) - 2.0 * scalar(z0) + scalar(z0 - hh)) / (h * h)
                    }
                };
                let d1 = fd(1e-4);
                let d2 = fd(1e-5);
                let richardson = (d2 * 100.0 - d1) / 99.0;
                let exact = jet.derivative_at_base(k).unwrap();
                let (rel, abs) = if k == 1 { (1e-8, 1e-10) } else { (1e-5, 1e-6) };
                assert_relative_eq!(richardson.re, exact.re, max_relative = rel, epsilon = abs);
                assert_relative_eq!(richardson.im, exact.im, max_relative = rel, epsilon = abs);
            }
        }
    }

    #[test]
    fn log_on_branch_cut_is_rejected() {
        let a = Jet1::constant(c(0.0, 0.0), c(-2.0, 0.0), 3);
        assert!(matches!(a.log(), Err(Error::BranchPoint { .. })));
        assert!(matches!(a.sqrt(), Err(Error::BranchPoint { .. })));
    }

    #[test]
    fn powi_negative_builds_laurent() {
        // (w)^−2 at 0: Laurent lead −2
        let w = Jet1::from_coeffs(c(0.0, 0.0), vec![ZERO, ONE, ZERO, ZERO]);
        let p = w.powi(-2).unwrap();
        assert_eq!(p.lead(), -2);
        assert_close(p.coeff(-2), ONE, 1e-15);
    }
}
