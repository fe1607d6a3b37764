//! Weighted sup-norms `‖φ‖_c = sup_{z∈𝔻} (1−|z|²)^c |φ(z)|`.
//!
//! The estimator samples a polar grid (Chebyshev-spaced radii, uniform
//! angles), refines radially by golden-section search along the best ray,
//! then polishes with a two-dimensional Nelder–Mead step. Refinement is
//! monotone: no stage can lower the reported value. Grid evaluation fans out
//! across points; the max reduction is associative and ties break by grid
//! index, so the result is identical under any thread count.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::metric::{Metric, Mobius};
use crate::schwarzian::{projective_v, Fun};
use crate::{Error, Result};

/// Polar-grid and refinement parameters.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct GridConfig {
    pub n_r: usize,
    pub n_theta: usize,
    pub r_max: f64,
    pub rel_tol: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            n_r: 256,
            n_theta: 512,
            r_max: 1.0 - 1e-4,
            rel_tol: 1e-7,
        }
    }
}

impl GridConfig {
    /// Coarsen the grid (and the refinement budget with it) by an integer
    /// factor; used for sensitivity runs.
    pub fn scaled_down(&self, factor: usize) -> GridConfig {
        let f = factor.max(1);
        GridConfig {
            n_r: (self.n_r / f).max(8),
            n_theta: (self.n_theta / f).max(16),
            r_max: self.r_max,
            rel_tol: self.rel_tol * (f * f) as f64,
        }
    }
}

/// Result of a sup-norm estimation.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct NormEstimate {
    /// Best weighted sample on the raw grid (a lower bound for the sup).
    pub value: f64,
    /// Value after radial and 2-D refinement (still a lower bound).
    pub refined: f64,
    /// Point where `refined` is attained.
    #[serde(with = "crate::serde_util::complex")]
    pub argmax: Complex64,
    pub n_r: usize,
    pub n_theta: usize,
    /// Two successive refinements agreed within `rel_tol` and the weighted
    /// profile is not still growing at the boundary.
    pub converged: bool,
    /// The weighted profile keeps increasing towards `|z| = 1`; the true sup
    /// is probably infinite.
    pub likely_unbounded: bool,
    /// Grid points skipped because the evaluator failed there.
    pub skipped: usize,
}

fn weighted<F>(phi: &F, c: f64, z: Complex64) -> Option<f64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let w = (1.0 - z.norm_sqr()).max(0.0).powf(c);
    match phi(z) {
        Ok(v) if v.re.is_finite() && v.im.is_finite() => Some(w * v.norm()),
        _ => None,
    }
}

/// Chebyshev-spaced radii on `[0, r_max]`, clustered at both ends.
fn radii(cfg: &GridConfig) -> Vec<f64> {
    let n = cfg.n_r.max(2);
    (0..n)
        .map(|i| cfg.r_max * 0.5 * (1.0 - (std::f64::consts::PI * i as f64 / (n - 1) as f64).cos()))
        .collect()
}

/// Golden-section maximization on `[a, b]`.
fn golden_max(f: impl Fn(f64) -> f64, a: f64, b: f64, iters: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (a.min(b), a.max(b));
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if (b - a).abs() < 1e-14 {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Nelder–Mead maximization in the plane, constrained to `|z| ≤ rmax` (the
/// sampled domain; growth beyond it is the boundary check's business).
fn nelder_max(
    f: impl Fn(Complex64) -> f64,
    start: Complex64,
    scale: f64,
    rmax: f64,
    iters: usize,
    ftol: f64,
) -> (Complex64, f64) {
    let clamp = |p: Complex64| -> Complex64 {
        let r = p.norm();
        if r > rmax {
            p * (rmax / r)
        } else {
            p
        }
    };
    let mut simplex = vec![
        clamp(start),
        clamp(start + Complex64::new(scale, 0.0)),
        clamp(start + Complex64::new(0.0, scale)),
    ];
    let mut values: Vec<f64> = simplex.iter().map(|&p| f(p)).collect();
    for _ in 0..iters {
        // order descending (best first); we maximize
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&i, &j| values[j].partial_cmp(&values[i]).unwrap());
        let (best, mid, worst) = (idx[0], idx[1], idx[2]);
        if (values[best] - values[worst]).abs() <= ftol * values[best].abs().max(1e-300) {
            break;
        }
        let centroid = (simplex[best] + simplex[mid]) * 0.5;
        let reflected = clamp(centroid + (centroid - simplex[worst]));
        let fr = f(reflected);
        if fr > values[best] {
            let expanded = clamp(centroid + (centroid - simplex[worst]) * 2.0);
            let fe = f(expanded);
            if fe > fr {
                simplex[worst] = expanded;
                values[worst] = fe;
            } else {
                simplex[worst] = reflected;
                values[worst] = fr;
            }
        } else if fr > values[mid] {
            simplex[worst] = reflected;
            values[worst] = fr;
        } else {
            let contracted = clamp(centroid + (simplex[worst] - centroid) * 0.5);
            let fc = f(contracted);
            if fc > values[worst] {
                simplex[worst] = contracted;
                values[worst] = fc;
            } else {
                // shrink towards the best vertex
                for i in [mid, worst] {
                    simplex[i] = clamp(simplex[best] + (simplex[i] - simplex[best]) * 0.5);
                    values[i] = f(simplex[i]);
                }
            }
        }
    }
    let mut bi = 0;
    for i in 1..3 {
        if values[i] > values[bi] {
            bi = i;
        }
    }
    (simplex[bi], values[bi])
}

/// Estimate `‖φ‖_c` over the unit disk.
///
/// The evaluator may fail at finitely many points (they are skipped); if it
/// fails on more than 10% of the grid the estimate is an error.
pub fn sup_norm<F>(phi: &F, c: f64, cfg: &GridConfig) -> Result<NormEstimate>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    let rs = radii(cfg);
    let n_theta = cfg.n_theta.max(4);
    let total = rs.len() * n_theta;

    // Stage 0: polar grid, parallel over rays of constant radius.
    let per_ring: Vec<(usize, f64, usize)> = rs
        .par_iter()
        .enumerate()
        .map(|(i, &r)| {
            let mut best = f64::NEG_INFINITY;
            let mut best_j = 0usize;
            let mut skipped = 0usize;
            for j in 0..n_theta {
                let th = std::f64::consts::TAU * j as f64 / n_theta as f64;
                match weighted(phi, c, Complex64::from_polar(r, th)) {
                    Some(v) => {
                        if v > best {
                            best = v;
                            best_j = j;
                        }
                    }
                    None => skipped += 1,
                }
            }
            (i, best, best_j * 1_000_000 + skipped)
        })
        .collect();

    let skipped: usize = per_ring.iter().map(|&(_, _, enc)| enc % 1_000_000).sum();
    if skipped * 10 > total {
        return Err(Error::GridFailure {
            failed: skipped,
            total,
        });
    }
    let mut best_i = 0usize;
    let mut best_v = f64::NEG_INFINITY;
    for &(i, v, _) in &per_ring {
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    if !best_v.is_finite() {
        return Err(Error::GridFailure {
            failed: skipped,
            total,
        });
    }
    let best_j = per_ring[best_i].2 / 1_000_000;
    let theta_star = std::f64::consts::TAU * best_j as f64 / n_theta as f64;
    let grid_value = best_v;

    // Stage 1: golden-section refinement in r along the best ray.
    let ray = |r: f64| -> f64 {
        weighted(phi, c, Complex64::from_polar(r, theta_star)).unwrap_or(f64::NEG_INFINITY)
    };
    let lo = if best_i == 0 { 0.0 } else { rs[best_i - 1] };
    let hi = if best_i + 1 < rs.len() {
        rs[best_i + 1]
    } else {
        cfg.r_max
    };
    let (r1, v_golden) = golden_max(ray, lo, hi, 90);
    let v1 = v_golden.max(grid_value);
    let p1 = if v_golden >= grid_value {
        Complex64::from_polar(r1, theta_star)
    } else {
        Complex64::from_polar(rs[best_i], theta_star)
    };

    // Stage 2: local 2-D polish.
    let point_fn = |z: Complex64| weighted(phi, c, z).unwrap_or(f64::NEG_INFINITY);
    let local_scale = ((hi - lo).abs()).max(std::f64::consts::TAU * p1.norm() / n_theta as f64);
    let (p2, v_nelder) = nelder_max(point_fn, p1, local_scale, cfg.r_max, 250, cfg.rel_tol * 1e-2);
    let (v2, p2) = if v_nelder >= v1 { (v_nelder, p2) } else { (v1, p1) };

    // Stage 3: restart the polish with a smaller simplex; convergence means
    // the last two refinements agree to rel_tol.
    let (p3, v_restart) =
        nelder_max(point_fn, p2, local_scale * 1e-2, cfg.r_max, 250, cfg.rel_tol * 1e-3);
    let (v3, p3) = if v_restart >= v2 { (v_restart, p3) } else { (v2, p2) };

    // absolute floor: refinement differences at rounding level count as
    // agreement (the zero function polishes to ~1e−16 noise)
    let mut converged = (v3 - v2).abs() <= (cfg.rel_tol * v3.abs()).max(1e-15);

    // Boundary behaviour: compare the weighted circle profile close to the rim.
    let profile = |r: f64| -> f64 {
        let mut best = f64::NEG_INFINITY;
        for j in 0..n_theta {
            let th = std::f64::consts::TAU * j as f64 / n_theta as f64;
            if let Some(v) = weighted(phi, c, Complex64::from_polar(r, th)) {
                best = best.max(v);
            }
        }
        best
    };
    let pa = profile(1.0 - 1e-3);
    let pb = profile(1.0 - 1e-5);
    let pc = profile(1.0 - 1e-6);
    // absolute floor keeps rounding noise on an (essentially) zero function
    // from reading as boundary growth
    const FLOOR: f64 = 1e-12;
    let likely_unbounded = pb.is_finite()
        && pa.is_finite()
        && pb > pa * 1.01 + FLOOR
        && pb > v3 * (1.0 + 10.0 * cfg.rel_tol) + FLOOR;
    if likely_unbounded {
        converged = false;
    }
    // still growing at r = 1 − 1e−6 above everything found inside
    if pc.is_finite() && pc > v3 * (1.0 + 10.0 * cfg.rel_tol) + FLOOR {
        converged = false;
    }

    Ok(NormEstimate {
        value: grid_value,
        refined: v3,
        argmax: p3,
        n_r: rs.len(),
        n_theta,
        converged,
        likely_unbounded,
        skipped,
    })
}

/// `(1−r²)^c · max_θ |φ(re^{iθ})|` with the maximizing angle.
pub fn circle_profile<F>(
    phi: &F,
    c: f64,
    r: f64,
    n_theta: usize,
) -> Result<(f64, f64)>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Precondition(format!(
            "circle_profile needs 0 <= r < 1, got {r}"
        )));
    }
    let n = n_theta.max(8);
    let mut best = f64::NEG_INFINITY;
    let mut best_j = 0usize;
    let mut skipped = 0usize;
    for j in 0..n {
        let th = std::f64::consts::TAU * j as f64 / n as f64;
        match weighted(phi, c, Complex64::from_polar(r, th)) {
            Some(v) => {
                if v > best {
                    best = v;
                    best_j = j;
                }
            }
            None => skipped += 1,
        }
    }
    if skipped * 10 > n {
        return Err(Error::GridFailure {
            failed: skipped,
            total: n,
        });
    }
    let step = std::f64::consts::TAU / n as f64;
    let th0 = step * best_j as f64;
    let (th, v) = golden_max(
        |t| weighted(phi, c, Complex64::from_polar(r, t)).unwrap_or(f64::NEG_INFINITY),
        th0 - step,
        th0 + step,
        80,
    );
    if v >= best {
        Ok((v, th.rem_euclid(std::f64::consts::TAU)))
    } else {
        Ok((best, th0))
    }
}

/// Norm-invariance check for `Vⁿ` under `f ↦ M∘f∘T`: compares
/// `‖Vⁿ(M∘f∘T)‖_n` with `‖Vⁿf‖_n` (two independent estimates) and the
/// pointwise transformation rule `Vⁿ(M∘f∘T)(z) = Vⁿf(T(z))·T'(z)ⁿ` at the
/// given sample points. `Vⁿ` is taken with the hyperbolic metric.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct InvarianceReport {
    pub norm_composed: f64,
    pub norm_original: f64,
    pub norm_diff: f64,
    pub pointwise_max_residual: f64,
    pub converged: bool,
}

pub fn invariance_check(
    f: &Fun,
    n: u32,
    t: &Mobius,
    m: &Mobius,
    cfg: &GridConfig,
    sample_points: &[Complex64],
) -> Result<InvarianceReport> {
    let rho = Metric::hyperbolic();
    let composed = f.clone().pre_mobius(*t).post_mobius(*m);
    let phi_a = |z: Complex64| projective_v(&composed, n, z, &rho);
    let phi_b = |z: Complex64| projective_v(f, n, z, &rho);
    let ea = sup_norm(&phi_a, n as f64, cfg)?;
    let eb = sup_norm(&phi_b, n as f64, cfg)?;
    if !(ea.converged && eb.converged) {
        return Err(Error::NonConvergence(
            "one of the two sup-norm estimates did not converge".into(),
        ));
    }
    let mut pointwise: f64 = 0.0;
    for &z in sample_points {
        let lhs = projective_v(&composed, n, z, &rho)?;
        let tz = t.apply(z);
        let tp = t.derivative(z);
        let rhs = projective_v(f, n, tz, &rho)? * tp.powi(n as i32);
        pointwise = pointwise.max((lhs - rhs).norm());
    }
    Ok(InvarianceReport {
        norm_composed: ea.refined,
        norm_original: eb.refined,
        norm_diff: (ea.refined - eb.refined).abs(),
        pointwise_max_residual: pointwise,
        converged: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::schwarzian::classical_s;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn quick() -> GridConfig {
        GridConfig {
            n_r: 96,
            n_theta: 128,
            ..GridConfig::default()
        }
    }

    #[test]
    fn constant_function_norm() {
        let phi = |_z: Complex64| Ok(Complex64::new(1.0, 0.0));
        let e = sup_norm(&phi, 0.0, &quick()).unwrap();
        assert!((e.refined - 1.0).abs() < 1e-12);
        assert!(e.converged);
        assert!(!e.likely_unbounded);
    }

    #[test]
    fn zero_function_norm_is_degenerate_pass() {
        let phi = |_z: Complex64| Ok(Complex64::new(0.0, 0.0));
        let e = sup_norm(&phi, 2.0, &quick()).unwrap();
        assert_eq!(e.refined, 0.0);
        assert!(e.converged);
    }

    #[test]
    fn koebe_schwarzian_norm_is_six() {
        let k = corpus::koebe();
        let phi = |z: Complex64| classical_s(&k, z);
        let e = sup_norm(&phi, 2.0, &quick()).unwrap();
        assert!(
            (e.refined - 6.0).abs() <= 6.0 * 1e-5,
            "‖Sk‖₂ = {} (expected 6)",
            e.refined
        );
        assert!(e.converged, "estimate should converge: {e:?}");
    }

    #[test]
    fn refinement_is_monotone() {
        let l = corpus::ell();
        let phi = |z: Complex64| classical_s(&l, z);
        let e = sup_norm(&phi, 2.0, &quick()).unwrap();
        assert!(e.refined >= e.value - 1e-15);
        assert!((e.refined - 2.0).abs() <= 2.0 * 1e-5);
    }

    #[test]
    fn profile_consistency_with_sup() {
        // sup over circle profiles equals the overall estimate
        let k = corpus::koebe();
        let rho = Metric::hyperbolic();
        let phi = |z: Complex64| projective_v(&k, 3, z, &rho);
        let cfg = quick();
        let e = sup_norm(&phi, 3.0, &cfg).unwrap();
        let mut best = 0.0f64;
        for i in 0..64 {
            let r = cfg.r_max * (i as f64 + 0.5) / 64.0;
            let (v, _) = circle_profile(&phi, 3.0, r, 128).unwrap();
            best = best.max(v);
        }
        assert!(
            (best - e.refined).abs() <= 2e-3 * e.refined,
            "profile sup {best} vs estimate {}",
            e.refined
        );
    }

    #[test]
    fn unbounded_profile_is_flagged() {
        // φ = 1/(1−|z|²)³ with weight c = 2 has (1−r²)^{−1} growth
        let phi = |z: Complex64| {
            Ok(Complex64::new(
                1.0 / (1.0 - z.norm_sqr()).powi(3),
                0.0,
            ))
        };
        let e = sup_norm(&phi, 2.0, &quick()).unwrap();
        assert!(e.likely_unbounded);
        assert!(!e.converged);
    }

    #[test]
    fn conjugation_symmetry_validated_not_assumed() {
        // for φ with φ(z̄) = conj(φ(z)) the upper-half-disk max equals the
        // full-disk max
        let k = corpus::koebe();
        let phi = |z: Complex64| classical_s(&k, z);
        let cfg = quick();
        let full = sup_norm(&phi, 2.0, &cfg).unwrap();
        // restrict to the upper half disk by reflecting the evaluation
        let phi_upper = |z: Complex64| {
            let w = if z.im < 0.0 { z.conj() } else { z };
            classical_s(&k, w)
        };
        let upper = sup_norm(&phi_upper, 2.0, &cfg).unwrap();
        assert!(
            (full.refined - upper.refined).abs() <= 1e-6 * full.refined.max(1.0),
            "{} vs {}",
            full.refined,
            upper.refined
        );
    }

    #[test]
    fn evaluator_failures_are_skipped_until_ten_percent() {
        // fail on an annulus wider than the radial grid spacing: those
        // points are skipped but the estimate is still usable
        let phi = |z: Complex64| {
            let r = z.norm();
            if (0.5..0.55).contains(&r) {
                Err(Error::Unsupported("synthetic failure".into()))
            } else {
                Ok(Complex64::new(1.0, 0.0))
            }
        };
        let e = sup_norm(&phi, 0.0, &quick()).unwrap();
        assert!(e.skipped > 0);
        assert!((e.refined - 1.0).abs() < 1e-9);
        // fail everywhere: hard error
        let bad = |_z: Complex64| -> Result<Complex64> {
            Err(Error::Unsupported("synthetic failure".into()))
        };
        assert!(matches!(
            sup_norm(&bad, 0.0, &quick()),
            Err(Error::GridFailure { .. })
        ));
    }

    #[test]
    fn invariance_under_disk_automorphism() {
        let k = corpus::koebe();
        let t = Mobius::disk_auto(Complex64::new(0.3, 0.1)).unwrap();
        let m = Mobius::inversion();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let pts: Vec<Complex64> = (0..20).map(|_| corpus::sample_disk(&mut rng, 0.7)).collect();
        let rep = invariance_check(&k, 3, &t, &m, &quick(), &pts).unwrap();
        assert!(
            rep.norm_diff <= 1e-5 * rep.norm_original.max(1.0),
            "norm difference {} ({} vs {})",
            rep.norm_diff,
            rep.norm_composed,
            rep.norm_original
        );
        assert!(
            rep.pointwise_max_residual <= 1e-8 * rep.norm_original.max(1.0),
            "pointwise residual {}",
            rep.pointwise_max_residual
        );
        // identity transforms give exactly equal estimates
        let id = Mobius::identity();
        let rep = invariance_check(&k, 3, &id, &id, &quick(), &pts[..4]).unwrap();
        assert!(rep.norm_diff <= 1e-12);
        assert!(rep.pointwise_max_residual <= 1e-12);
    }
}
