//! The weighted polynomial families `P_n(x₁,…,x_n)` and `T_n(x₂,…,x_n)` in
//! exact rational arithmetic.
//!
//! `P_n` is generated by `P₀ = 1`, `P₁ = 0`, `P₂ = x₂ − (3/2)x₁²` and
//!
//! ```text
//! P_n = Σ_{k=1}^{n−1} (x_{k+1} − x₁x_k) ∂P_{n−1}/∂x_k
//!     + ½ P₂ Σ_{k=1}^{n−1} C(n,k) P_{k−1} P_{n−k−1}     (n ≥ 3)
//! ```
//!
//! `T_n` by `T₀ = 1`, `T₁ = 0`, `T₂ = x₂` and
//!
//! ```text
//! T_n = Σ_{k=2}^{n−1} ∂T_{n−1}/∂x_k · x_{k+1}
//!     + (x₂/2) Σ_{k=1}^{n−1} C(n,k) T_{k−1} T_{n−k−1}    (n ≥ 3)
//! ```
//!
//! Every monomial `x_{j₁}⋯x_{j_m}` of `P_n`/`T_n` has weight
//! `j₁ + ⋯ + j_m = n`; `T_n` has integer coefficients. Generation is memoized
//! behind a process-wide cache.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Default cap on the generated order; term counts grow quickly beyond it.
pub const MAX_ORDER: u32 = 12;

/// Exponent vector for `x₁^{e₁} x₂^{e₂} ⋯`, trailing zeros trimmed.
pub type Monomial = Vec<u32>;

/// Weight-homogeneous multivariate polynomial with exact rational
/// coefficients. The weight of `x_k` is `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedPoly {
    weight: u32,
    terms: BTreeMap<Monomial, BigRational>,
}

fn monomial_weight(m: &Monomial) -> u32 {
    m.iter()
        .enumerate()
        .map(|(i, e)| (i as u32 + 1) * e)
        .sum()
}

fn trim(mut m: Monomial) -> Monomial {
    while m.last() == Some(&0) {
        m.pop();
    }
    m
}

impl WeightedPoly {
    pub fn zero(weight: u32) -> Self {
        WeightedPoly {
            weight,
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Vec::new(), BigRational::one());
        WeightedPoly { weight: 0, terms }
    }

    /// The indeterminate `x_k` (1-indexed).
    pub fn var(k: u32) -> Self {
        assert!(k >= 1);
        let mut m = vec![0u32; k as usize];
        m[k as usize - 1] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(m, BigRational::one());
        WeightedPoly { weight: k, terms }
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Iterate terms in canonical (lexicographic exponent) order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    /// Highest indeterminate index that actually occurs.
    pub fn max_var(&self) -> usize {
        self.terms.keys().map(|m| m.len()).max().unwrap_or(0)
    }

    fn insert(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let m = trim(m);
        debug_assert!(
            monomial_weight(&m) == self.weight,
            "weight {} monomial in weight-{} polynomial",
            monomial_weight(&m),
            self.weight
        );
        let entry = self.terms.entry(m).or_insert_with(BigRational::zero);
        *entry += c;
        let dead = entry.is_zero();
        if dead {
            // remove cancelled terms so no zero coefficients are stored
            let key = self
                .terms
                .iter()
                .find(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone());
            if let Some(k) = key {
                self.terms.remove(&k);
            }
        }
    }

    pub fn add(&self, rhs: &WeightedPoly) -> WeightedPoly {
        assert_eq!(self.weight, rhs.weight, "weight mismatch in add");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, s: &BigRational) -> WeightedPoly {
        if s.is_zero() {
            return WeightedPoly::zero(self.weight);
        }
        WeightedPoly {
            weight: self.weight,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c * s))
                .collect(),
        }
    }

    pub fn mul(&self, rhs: &WeightedPoly) -> WeightedPoly {
        let mut out = WeightedPoly::zero(self.weight + rhs.weight);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let mut m = vec![0u32; ma.len().max(mb.len())];
                for (i, e) in ma.iter().enumerate() {
                    m[i] += e;
                }
                for (i, e) in mb.iter().enumerate() {
                    m[i] += e;
                }
                out.insert(m, ca * cb);
            }
        }
        out
    }

    /// Partial derivative with respect to `x_k` (1-indexed). The result has
    /// weight `self.weight − k`.
    pub fn partial(&self, k: u32) -> WeightedPoly {
        assert!(k >= 1);
        let i = (k - 1) as usize;
        let mut out = WeightedPoly::zero(self.weight.saturating_sub(k));
        for (m, c) in &self.terms {
            let e = m.get(i).copied().unwrap_or(0);
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2[i] -= 1;
            out.insert(m2, c * BigRational::from(BigInt::from(e)));
        }
        out
    }

    /// Exact-coefficient evaluation at complex arguments (`args[k−1]` is the
    /// value of `x_k`).
    pub fn eval(&self, args: &[Complex64]) -> Result<Complex64> {
        let needed = self.max_var();
        if args.len() < needed {
            return Err(Error::InsufficientArgs {
                needed,
                got: args.len(),
            });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = Complex64::new(rational_to_f64(c), 0.0);
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    t *= args[i].powi(e as i32);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// True when every coefficient is an integer.
    pub fn has_integer_coeffs(&self) -> bool {
        self.terms.values().all(|c| c.denom().abs().is_one())
    }

    /// Canonical printable form, e.g. `x3 - 4*x1*x2 + 3*x1^3`.
    pub fn to_canonical_string(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_owned();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c < &BigRational::zero();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || m.iter().all(|&e| e == 0) {
                factors.push(if abs.denom().is_one() {
                    abs.numer().to_string()
                } else {
                    format!("{}/{}", abs.numer(), abs.denom())
                });
            }
            for (idx, &e) in m.iter().enumerate() {
                if e == 1 {
                    factors.push(format!("x{}", idx + 1));
                } else if e > 1 {
                    factors.push(format!("x{}^{}", idx + 1, e));
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

fn binomial(n: u32, k: u32) -> BigRational {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k.min(n - k) {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    BigRational::new(num, den)
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Family {
    P,
    T,
}

fn cache() -> &'static Mutex<HashMap<(Family, u32), Arc<WeightedPoly>>> {
    static CACHE: OnceLock<Mutex<HashMap<(Family, u32), Arc<WeightedPoly>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Generate `P_n` (memoized, exact).
pub fn gen_p(n: u32) -> Result<Arc<WeightedPoly>> {
    gen(Family::P, n)
}

/// Generate `T_n` (memoized, exact, integer coefficients).
pub fn gen_t(n: u32) -> Result<Arc<WeightedPoly>> {
    gen(Family::T, n)
}

pub fn gen(family: Family, n: u32) -> Result<Arc<WeightedPoly>> {
    if n > MAX_ORDER {
        return Err(Error::PolyOrderTooLarge(n, MAX_ORDER));
    }
    if let Some(p) = cache().lock().unwrap().get(&(family, n)) {
        return Ok(p.clone());
    }
    // Build all orders up to n without holding the lock across generation.
    let mut built: Vec<Arc<WeightedPoly>> = Vec::with_capacity(n as usize + 1);
    for m in 0..=n {
        let cached = cache().lock().unwrap().get(&(family, m)).cloned();
        let poly = match cached {
            Some(p) => p,
            None => {
                let p = Arc::new(generate_order(family, m, &built));
                cache().lock().unwrap().insert((family, m), p.clone());
                p
            }
        };
        built.push(poly);
    }
    Ok(built.pop().unwrap())
}

fn generate_order(family: Family, n: u32, lower: &[Arc<WeightedPoly>]) -> WeightedPoly {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    match (family, n) {
        (_, 0) => WeightedPoly::one(),
        (_, 1) => WeightedPoly::zero(1),
        (Family::P, 2) => {
            // x₂ − (3/2)x₁²
            let x1 = WeightedPoly::var(1);
            let x1sq = x1.mul(&x1);
            WeightedPoly::var(2).add(&x1sq.scale(&BigRational::new(
                BigInt::from(-3),
                BigInt::from(2),
            )))
        }
        (Family::T, 2) => WeightedPoly::var(2),
        (Family::P, _) => {
            let prev = &lower[(n - 1) as usize];
            let mut out = WeightedPoly::zero(n);
            for k in 1..n {
                let d = prev.partial(k);
                if d.is_zero() {
                    continue;
                }
                // (x_{k+1} − x₁ x_k) ∂P_{n−1}/∂x_k
                let shift = WeightedPoly::var(k + 1).add(
                    &WeightedPoly::var(1)
                        .mul(&WeightedPoly::var(k))
                        .scale(&-BigRational::one()),
                );
                out = out.add(&shift.mul(&d));
            }
            let p2 = &lower[2];
            let mut conv = WeightedPoly::zero(n - 2);
            for k in 1..n {
                let prod = lower[(k - 1) as usize].mul(&lower[(n - k - 1) as usize]);
                conv = conv.add(&prod.scale(&binomial(n, k)));
            }
            out.add(&p2.mul(&conv).scale(&half))
        }
        (Family::T, _) => {
            let prev = &lower[(n - 1) as usize];
            let mut out = WeightedPoly::zero(n);
            for k in 2..n {
                let d = prev.partial(k);
                if d.is_zero() {
                    continue;
                }
                out = out.add(&d.mul(&WeightedPoly::var(k + 1)));
            }
            let mut conv = WeightedPoly::zero(n - 2);
            for k in 1..n {
                let prod = lower[(k - 1) as usize].mul(&lower[(n - k - 1) as usize]);
                conv = conv.add(&prod.scale(&binomial(n, k)));
            }
            let out = out.add(&WeightedPoly::var(2).mul(&conv).scale(&half));
            debug_assert!(out.has_integer_coeffs(), "T_{n} must have integer coefficients");
            out
        }
    }
}
