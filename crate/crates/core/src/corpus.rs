//! Named test functions and seeded samplers shared by the verification suite
//! and the tests.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::metric::Mobius;
use crate::schwarzian::Fun;

/// Koebe function `k(z) = z/(1−z)²`.
pub fn koebe() -> Fun {
    Fun::parse("z/(1-z)^2").unwrap()
}

/// `l(z) = log((1+z)/(1−z))`, with `Sl = 2(1−z²)^{−2}`.
pub fn ell() -> Fun {
    Fun::parse("log((1+z)/(1-z))").unwrap()
}

/// `e^{az}` for real `a`.
pub fn exp_az(a: f64) -> Fun {
    Fun::parse(&format!("exp({a}*z)")).unwrap()
}

/// `z + z³/7` (locally univalent on the disk).
pub fn cubic() -> Fun {
    Fun::parse("z+z^3/7").unwrap()
}

/// `f(w) = w(1−w³)^{−2/3}`, the extremal for `|ψ₃[f](0)| = 2/3`.
pub fn extremal_psi3() -> Fun {
    Fun::parse("z*(1-z^3)^(-(2/3))").unwrap()
}

/// A function with `Sf = (1−z²)^{−2}`: `((1+z)/(1−z))^{1/√2}`.
pub fn unit_coefficient_schwarzian() -> Fun {
    Fun::parse(&format!("((1+z)/(1-z))^{:?}", 0.5f64.sqrt())).unwrap()
}

/// Uniform sample from the closed disk of radius `rmax`.
pub fn sample_disk(rng: &mut ChaCha8Rng, rmax: f64) -> Complex64 {
    let r = rmax * rng.gen_range(0.0f64..1.0).sqrt();
    let th = rng.gen_range(0.0..std::f64::consts::TAU);
    Complex64::from_polar(r, th)
}

/// Random well-conditioned Möbius transformation.
pub fn random_mobius(rng: &mut ChaCha8Rng) -> Mobius {
    loop {
        let e = |rng: &mut ChaCha8Rng| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        };
        let (a, b, c, d) = (e(rng), e(rng), e(rng), e(rng));
        if (a * d - b * c).norm() > 0.3 {
            return Mobius::new(a, b, c, d).unwrap();
        }
    }
}

/// Random disk automorphism `T(z) = (z+a)/(1+āz)` with `|a| ≤ rmax`.
pub fn random_disk_auto(rng: &mut ChaCha8Rng, rmax: f64) -> Mobius {
    Mobius::disk_auto(sample_disk(rng, rmax)).unwrap()
}

/// Random rotation of the sphere (isometry of the spherical metric).
pub fn random_sphere_rotation(rng: &mut ChaCha8Rng) -> Mobius {
    let a = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let b = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let n = (a.norm_sqr() + b.norm_sqr()).sqrt().max(1e-3);
    Mobius::sphere_rotation(a / n, b / n).unwrap()
}

/// The corpus used for the two-sided norm bounds: `k`, `l`, `e^{2z}`,
/// `e^{3z}`, `z + z³/7`, plus three seeded Möbius-composed variants
/// `M ∘ f ∘ T`.
pub fn proposition_corpus(seed: u64) -> Vec<(String, Fun)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<(String, Fun)> = vec![
        ("k".into(), koebe()),
        ("l".into(), ell()),
        ("exp(2z)".into(), exp_az(2.0)),
        ("exp(3z)".into(), exp_az(3.0)),
        ("z+z^3/7".into(), cubic()),
    ];
    for (name, f) in [
        ("M∘k∘T", koebe()),
        ("M∘l∘T", ell()),
        ("M∘(z+z^3/7)∘T", cubic()),
    ] {
        let t = random_disk_auto(&mut rng, 0.5);
        let m = random_mobius(&mut rng);
        out.push((name.into(), f.pre_mobius(t).post_mobius(m)));
    }
    out
}
