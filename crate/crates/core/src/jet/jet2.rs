use num_complex::Complex64;

use super::{Jet1, ONE, ZERO};
use crate::{Error, Result};

/// Truncated bivariate Wirtinger expansion about a base point:
/// `Σ_{j+k ≤ order} c_{j,k} (z − base)^j (z̄ − basē)^k`.
///
/// Holomorphic functions lift to jets with `c_{j,k} = 0` for `k > 0`;
/// conjugation maps `c_{j,k} ↦ conj(c_{k,j})`.
#[derive(Clone, Debug)]
pub struct Jet2 {
    base: Complex64,
    order: usize,
    coeffs: Vec<Complex64>,
}

fn tri_len(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

impl Jet2 {
    #[inline]
    fn idx(&self, j: usize, k: usize) -> usize {
        debug_assert!(j + k <= self.order);
        j * (self.order + 1) - j * j.saturating_sub(1) / 2 + k
    }

    pub fn constant(base: Complex64, v: Complex64, order: usize) -> Self {
        let mut coeffs = vec![ZERO; tri_len(order)];
        coeffs[0] = v;
        Jet2 {
            base,
            order,
            coeffs,
        }
    }

    /// Jet of the coordinate function `z`.
    pub fn variable_z(base: Complex64, order: usize) -> Self {
        let mut j = Self::constant(base, base, order);
        if order >= 1 {
            let i = j.idx(1, 0);
            j.coeffs[i] = ONE;
        }
        j
    }

    /// Jet of the conjugate coordinate `z̄`.
    pub fn variable_zbar(base: Complex64, order: usize) -> Self {
        let mut j = Self::constant(base, base.conj(), order);
        if order >= 1 {
            let i = j.idx(0, 1);
            j.coeffs[i] = ONE;
        }
        j
    }

    /// Lift an ordinary univariate jet: `c_{j,0} = c_j`, `c_{j,k} = 0` for
    /// `k > 0`.
    pub fn from_jet1(f: &Jet1, order: usize) -> Result<Self> {
        if f.is_pole() {
            return Err(Error::PoleInput { op: "from_jet1" });
        }
        if f.len() < order + 1 {
            return Err(Error::OrderTooLow {
                op: "from_jet1",
                needed: order + 1,
                got: f.len(),
            });
        }
        let mut out = Self::constant(f.base(), ZERO, order);
        for j in 0..=order {
            let i = out.idx(j, 0);
            out.coeffs[i] = f.coeff(j as i32);
        }
        Ok(out)
    }

    /// Lift the conjugate of a univariate jet: `c_{0,k} = conj(c_k)`.
    pub fn conj_from_jet1(f: &Jet1, order: usize) -> Result<Self> {
        Ok(Self::from_jet1(f, order)?.conj())
    }

    pub fn base(&self) -> Complex64 {
        self.base
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Value at the base point.
    pub fn value(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn coeff(&self, j: usize, k: usize) -> Complex64 {
        self.coeffs[self.idx(j, k)]
    }

    /// Complex conjugate of the represented function.
    pub fn conj(&self) -> Jet2 {
        let mut out = Self::constant(self.base, ZERO, self.order);
        for j in 0..=self.order {
            for k in 0..=(self.order - j) {
                let i = out.idx(j, k);
                out.coeffs[i] = self.coeff(k, j).conj();
            }
        }
        out
    }

    pub fn truncate(&self, order: usize) -> Jet2 {
        if order >= self.order {
            return self.clone();
        }
        let mut out = Self::constant(self.base, ZERO, order);
        for j in 0..=order {
            for k in 0..=(order - j) {
                let i = out.idx(j, k);
                out.coeffs[i] = self.coeff(j, k);
            }
        }
        out
    }

    fn check_base(&self, rhs: &Jet2) -> Result<()> {
        if self.base != rhs.base {
            return Err(Error::BaseMismatch(self.base, rhs.base));
        }
        Ok(())
    }

    pub fn neg(&self) -> Jet2 {
        self.scale(-ONE)
    }

    pub fn scale(&self, s: Complex64) -> Jet2 {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c *= s;
        }
        out
    }

    pub fn add_scalar(&self, s: Complex64) -> Jet2 {
        let mut out = self.clone();
        out.coeffs[0] += s;
        out
    }

    pub fn add(&self, rhs: &Jet2) -> Result<Jet2> {
        self.check_base(rhs)?;
        let order = self.order.min(rhs.order);
        let mut out = Self::constant(self.base, ZERO, order);
        for j in 0..=order {
            for k in 0..=(order - j) {
                let i = out.idx(j, k);
                out.coeffs[i] = self.coeff(j, k) + rhs.coeff(j, k);
            }
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &Jet2) -> Result<Jet2> {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Jet2) -> Result<Jet2> {
        self.check_base(rhs)?;
        let order = self.order.min(rhs.order);
        let mut out = Self::constant(self.base, ZERO, order);
        for j1 in 0..=self.order.min(order) {
            for k1 in 0..=(self.order - j1).min(order - j1) {
                let a = self.coeff(j1, k1);
                if a == ZERO {
                    continue;
                }
                let rem = order - j1 - k1;
                for j2 in 0..=rhs.order.min(rem) {
                    for k2 in 0..=(rhs.order - j2).min(rem - j2) {
                        let b = rhs.coeff(j2, k2);
                        if b == ZERO {
                            continue;
                        }
                        let i = out.idx(j1 + j2, k1 + k2);
                        out.coeffs[i] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Multiplicative inverse via the Neumann series; requires a nonzero
    /// constant term.
    pub fn invert(&self) -> Result<Jet2> {
        let c0 = self.coeffs[0];
        if c0 == ZERO {
            return Err(Error::IndeterminateDivision);
        }
        // u = self/c0 − 1 has no constant term; 1/self = (Σ (−u)^m) / c0.
        let u = self.scale(ONE / c0).add_scalar(-ONE);
        let mut acc = Self::constant(self.base, ONE, self.order);
        for _ in 0..self.order {
            acc = u.mul(&acc)?.neg().add_scalar(ONE);
        }
        Ok(acc.scale(ONE / c0))
    }

    pub fn div(&self, rhs: &Jet2) -> Result<Jet2> {
        self.mul(&rhs.invert()?)
    }

    /// Wirtinger derivative `∂ = ∂/∂z`; the order drops by one.
    pub fn dz(&self) -> Result<Jet2> {
        if self.order == 0 {
            return Err(Error::OrderTooLow {
                op: "dz",
                needed: 1,
                got: 0,
            });
        }
        let order = self.order - 1;
        let mut out = Self::constant(self.base, ZERO, order);
        for j in 0..=order {
            for k in 0..=(order - j) {
                let i = out.idx(j, k);
                out.coeffs[i] = self.coeff(j + 1, k) * (j + 1) as f64;
            }
        }
        Ok(out)
    }

    /// Wirtinger derivative `∂̄ = ∂/∂z̄`; the order drops by one.
    pub fn dzbar(&self) -> Result<Jet2> {
        if self.order == 0 {
            return Err(Error::OrderTooLow {
                op: "dzbar",
                needed: 1,
                got: 0,
            });
        }
        let order = self.order - 1;
        let mut out = Self::constant(self.base, ZERO, order);
        for j in 0..=order {
            for k in 0..=(order - j) {
                let i = out.idx(j, k);
                out.coeffs[i] = self.coeff(j, k + 1) * (k + 1) as f64;
            }
        }
        Ok(out)
    }

    /// Apply a univariate analytic function given by its Taylor jet `g` at
    /// `self.value()`: returns `g(self)`.
    pub fn apply_univariate(&self, g: &Jet1) -> Result<Jet2> {
        if g.is_pole() {
            return Err(Error::PoleInput {
                op: "apply_univariate",
            });
        }
        if g.base() != self.value() {
            return Err(Error::ComposeMismatch(self.value(), g.base()));
        }
        if g.len() < self.order + 1 {
            return Err(Error::OrderTooLow {
                op: "apply_univariate",
                needed: self.order + 1,
                got: g.len(),
            });
        }
        let u = self.add_scalar(-self.coeffs[0]);
        let mut acc = Self::constant(self.base, g.coeff(self.order as i32), self.order);
        for m in (0..self.order).rev() {
            acc = acc.mul(&u)?.add_scalar(g.coeff(m as i32));
        }
        Ok(acc)
    }

    pub fn exp(&self) -> Result<Jet2> {
        let g = Jet1::variable(self.value(), self.order + 1).exp()?;
        self.apply_univariate(&g)
    }

    pub fn log(&self) -> Result<Jet2> {
        let g = Jet1::variable(self.value(), self.order + 1).log()?;
        self.apply_univariate(&g)
    }

    pub fn sqrt(&self) -> Result<Jet2> {
        let g = Jet1::variable(self.value(), self.order + 1).sqrt()?;
        self.apply_univariate(&g)
    }

    pub fn sin(&self) -> Result<Jet2> {
        let g = Jet1::variable(self.value(), self.order + 1).sin()?;
        self.apply_univariate(&g)
    }

    pub fn cos(&self) -> Result<Jet2> {
        let g = Jet1::variable(self.value(), self.order + 1).cos()?;
        self.apply_univariate(&g)
    }

    pub fn powc(&self, e: Complex64) -> Result<Jet2> {
        self.log()?.scale(e).exp()
    }

    pub fn powi(&self, k: i32) -> Result<Jet2> {
        if k < 0 {
            return self.invert()?.powi(-k);
        }
        let mut acc = Self::constant(self.base, ONE, self.order);
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

    /// Substitute a holomorphic map for the variable: with `self` a jet in
    /// `(w, w̄)` at `w₀` and `f` a finite univariate jet with `f(z₀) = w₀`,
    /// returns the jet of `self ∘ f` in `(z, z̄)` at `z₀`.
    pub fn compose_holo(&self, f: &Jet1) -> Result<Jet2> {
        if f.is_pole() {
            return Err(Error::PoleInput {
                op: "compose_holo",
            });
        }
        if f.value() != Some(self.base) {
            return Err(Error::ComposeMismatch(
                f.value().unwrap_or(self.base),
                self.base,
            ));
        }
        let order = self.order.min(f.len() - 1);
        let n = order + 1;
        // Powers of F = f − w₀ as truncated univariate series in (z − z₀).
        let mut fpow: Vec<Vec<Complex64>> = Vec::with_capacity(n);
        let mut e0 = vec![ZERO; n];
        e0[0] = ONE;
        fpow.push(e0);
        let mut fc = vec![ZERO; n];
        for (a, fc_a) in fc.iter_mut().enumerate().skip(1) {
            *fc_a = f.coeff(a as i32);
        }
        for _ in 1..n {
            let prev = fpow.last().unwrap();
            let mut next = vec![ZERO; n];
            for a in 0..n {
                if prev[a] == ZERO {
                    continue;
                }
                for (b, fc_b) in fc.iter().enumerate().take(n - a) {
                    next[a + b] += prev[a] * fc_b;
                }
            }
            fpow.push(next);
        }
        let mut out = Self::constant(f.base(), ZERO, order);
        for j in 0..=self.order.min(order) {
            for k in 0..=(self.order - j).min(order - j) {
                let t = self.coeff(j, k);
                if t == ZERO {
                    continue;
                }
                // F^j contributes from degree j in z, conj(F)^k from degree k
                // in z̄.
                for a in j..=order {
                    let fa = fpow[j][a];
                    if fa == ZERO {
                        continue;
                    }
                    for b in k..=(order - a) {
                        let gb = fpow[k][b].conj();
                        if gb == ZERO {
                            continue;
                        }
                        let i = out.idx(a, b);
                        out.coeffs[i] += t * fa * gb;
                    }
                }
            }
        }
        Ok(out)
    }
}
