//! Self-verification suite: recomputes every pinned constant and identity
//! the library is built around and reports one row per check. The CLI
//! `verify` subcommand formats these rows; a nonzero exit signals failures.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus;
use crate::criteria::{
    self, aharonov_partial_sum, integral_representation, midpoint_integral, proposition_bounds,
    univalence_check, wirths_check, Conclusion, QuadConfig,
};
use crate::metric::{self, theta, theta_n, LogDerivKind, Metric, Mobius};
use crate::norm::{circle_profile, sup_norm, GridConfig};
use crate::poly;
use crate::schwarzian::{
    aharonov_psi, classical_s, identity_check, invariant_sigma, pm_d, pm_q, pm_q_jet,
    projective_d, projective_v, tamanoi_s, Fun, IdentityCheck, PsiRoute, SigmaRoute, TamanoiRoute,
};

/// One verification row.
#[derive(Clone, Debug, serde::Serialize)]
pub struct VerifyRow {
    pub module: &'static str,
    pub name: String,
    pub expected: String,
    pub computed: String,
    pub tolerance: String,
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Restrict to one module (`polynomials`, `metric`, `schwarzian`,
    /// `norm`, `criteria`).
    pub only: Option<String>,
    /// Divide the norm grids by this factor (sensitivity runs).
    pub grid_scale: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            only: None,
            grid_scale: 1,
            seed: 0xC0FFEE,
        }
    }
}

struct Suite {
    rows: Vec<VerifyRow>,
    only: Option<String>,
}

impl Suite {
    fn wants(&self, module: &str) -> bool {
        self.only.as_deref().map_or(true, |m| m == module)
    }

    fn push(
        &mut self,
        module: &'static str,
        name: &str,
        expected: impl std::fmt::Display,
        computed: impl std::fmt::Display,
        tolerance: &str,
        passed: bool,
    ) {
        self.rows.push(VerifyRow {
            module,
            name: name.to_owned(),
            expected: expected.to_string(),
            computed: computed.to_string(),
            tolerance: tolerance.to_owned(),
            passed,
        });
    }

    fn value(
        &mut self,
        module: &'static str,
        name: &str,
        expected: Complex64,
        computed: crate::Result<Complex64>,
        tol: f64,
    ) {
        match computed {
            Ok(v) => {
                let passed = (v - expected).norm() <= tol * expected.norm().max(1.0);
                self.push(module, name, expected, v, &format!("{tol:.0e} rel"), passed);
            }
            Err(e) => self.push(module, name, expected, format!("error: {e}"), "-", false),
        }
    }

    fn real(
        &mut self,
        module: &'static str,
        name: &str,
        expected: f64,
        computed: crate::Result<f64>,
        tol: f64,
    ) {
        self.value(
            module,
            name,
            Complex64::new(expected, 0.0),
            computed.map(|v| Complex64::new(v, 0.0)),
            tol,
        );
    }

    fn residual(&mut self, module: &'static str, name: &str, residual: crate::Result<f64>, tol: f64) {
        match residual {
            Ok(r) => self.push(
                module,
                name,
                format!("|residual| < {tol:.0e}"),
                format!("{r:.3e}"),
                &format!("{tol:.0e} abs"),
                r < tol,
            ),
            Err(e) => self.push(module, name, "residual", format!("error: {e}"), "-", false),
        }
    }
}

/// Run the suite; rows are deterministic for a fixed seed and grid scale.
pub fn run_verify(opts: &VerifyOptions) -> Vec<VerifyRow> {
    let mut s = Suite {
        rows: Vec::new(),
        only: opts.only.clone(),
    };
    let grid = GridConfig::default().scaled_down(opts.grid_scale);

    if s.wants("polynomials") {
        polynomial_rows(&mut s);
    }
    if s.wants("metric") {
        metric_rows(&mut s, opts.seed);
    }
    if s.wants("schwarzian") {
        schwarzian_rows(&mut s, opts.seed);
    }
    if s.wants("norm") {
        norm_rows(&mut s, &grid, opts.seed);
    }
    if s.wants("criteria") {
        criteria_rows(&mut s, &grid, opts.seed);
    }
    s.rows
}

fn polynomial_rows(s: &mut Suite) {
    const M: &str = "polynomials";
    let cases = [
        ("P1", poly::gen_p(1), "0"),
        ("P2", poly::gen_p(2), "x2 - 3/2*x1^2"),
        ("P3", poly::gen_p(3), "x3 - 4*x1*x2 + 3*x1^3"),
        ("T0", poly::gen_t(0), "1"),
        ("T1", poly::gen_t(1), "0"),
        ("T3", poly::gen_t(3), "x3"),
        ("T4", poly::gen_t(4), "x4 + 4*x2^2"),
        ("T5", poly::gen_t(5), "x5 + 13*x2*x3"),
    ];
    for (name, p, expected) in cases {
        match p {
            Ok(p) => {
                let got = p.to_canonical_string();
                let passed = got == expected;
                s.push(M, name, expected, got, "exact", passed);
            }
            Err(e) => s.push(M, name, expected, format!("error: {e}"), "-", false),
        }
    }
    for n in 0..=8u32 {
        let t = poly::gen_t(n).unwrap();
        s.push(
            M,
            &format!("T{n} integer coefficients"),
            "true",
            t.has_integer_coeffs(),
            "exact",
            t.has_integer_coeffs(),
        );
        let p = poly::gen_p(n).unwrap();
        let homogeneous = p.weight() == n && t.weight() == n;
        s.push(
            M,
            &format!("P{n}, T{n} weight-homogeneous"),
            "true",
            homogeneous,
            "exact",
            homogeneous,
        );
    }
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    s.value(
        M,
        "P2(0, 5) = 5",
        Complex64::new(5.0, 0.0),
        poly::gen_p(2)
            .and_then(|p| p.eval(&[zero, Complex64::new(5.0, 0.0)])),
        1e-15,
    );
    s.value(
        M,
        "T4(x2=1) = 4",
        Complex64::new(4.0, 0.0),
        poly::gen_t(4).and_then(|p| p.eval(&[zero, one, zero, zero])),
        1e-15,
    );
    s.value(
        M,
        "P3(1,1,1) = 0",
        zero,
        poly::gen_p(3).and_then(|p| p.eval(&[one, one, one])),
        1e-15,
    );
}

fn metric_rows(s: &mut Suite, seed: u64) {
    const M: &str = "metric";
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x11);
    for (m, delta) in [
        (Metric::hyperbolic(), -1.0),
        (Metric::euclidean(), 0.0),
        (Metric::spherical(), 1.0),
    ] {
        let mut worst: f64 = 0.0;
        let mut worst_theta: f64 = 0.0;
        for _ in 0..1000 {
            let z = corpus::sample_disk(&mut rng, 0.95);
            worst = worst.max((metric::curvature(&m, z).unwrap() - 4.0 * delta).abs());
            worst_theta = worst_theta.max(theta(&m, z).unwrap().norm());
        }
        s.residual(M, &format!("curvature({}) = 4δ", m.name()), Ok(worst), 1e-10);
        s.residual(M, &format!("Θ({}) = 0", m.name()), Ok(worst_theta), 1e-10);
    }
    s.value(
        M,
        "∂log λ₊₁ at 0.5 = −0.4",
        Complex64::new(-0.4, 0.0),
        metric::log_deriv(
            &Metric::spherical(),
            Complex64::new(0.5, 0.0),
            LogDerivKind::Dz,
        ),
        1e-12,
    );
    let z = corpus::sample_disk(&mut rng, 0.9);
    s.value(
        M,
        "∂log λ₋₁ = z̄/(1−|z|²)",
        z.conj() / (1.0 - z.norm_sqr()),
        metric::log_deriv(&Metric::hyperbolic(), z, LogDerivKind::Dz),
        1e-11,
    );
    let exp_re = Metric::custom("exp((z+zbar)/2)").unwrap();
    s.value(
        M,
        "Θ(e^{Re z}) = −1/2",
        Complex64::new(-0.5, 0.0),
        theta(&exp_re, corpus::sample_disk(&mut rng, 0.8)),
        1e-11,
    );
    s.value(
        M,
        "Θ³(e^{Re z}) = 1",
        Complex64::new(1.0, 0.0),
        theta_n(&exp_re, 3, corpus::sample_disk(&mut rng, 0.8)),
        1e-10,
    );
    // |T'(z)|(1−|z|²) = 1−|T(z)|²
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let t = corpus::random_disk_auto(&mut rng, 0.8);
        let z = corpus::sample_disk(&mut rng, 0.95);
        let lhs = t.derivative(z).norm() * (1.0 - z.norm_sqr());
        let rhs = 1.0 - t.apply(z).norm_sqr();
        worst = worst.max((lhs - rhs).abs());
    }
    s.residual(M, "|T'|(1−|z|²) = 1−|T|²", Ok(worst), 1e-11);
    // ∂̄Θ = −ρ²∂κ/2 for constant-curvature deviation witness e^{|z|²}
    let bump = Metric::custom("exp(z*zbar)").unwrap();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let z = corpus::sample_disk(&mut rng, 0.9);
        let dbar = metric::theta_jet2(&bump, z, 1)
            .and_then(|t| t.dzbar())
            .map(|j| j.value())
            .unwrap();
        let rho = bump.density(z).unwrap();
        let dk = {
            let r = bump.density_jet2(z, 3).unwrap();
            let lap = r.log().unwrap().dz().unwrap().dzbar().unwrap();
            lap.scale(Complex64::new(-4.0, 0.0))
                .div(&r.mul(&r).unwrap())
                .unwrap()
                .dz()
                .unwrap()
                .value()
        };
        worst = worst.max((dbar + rho * rho * dk / 2.0).norm());
    }
    s.residual(M, "∂̄Θ = −ρ²∂κ/2 (e^{|z|²})", Ok(worst), 1e-8);
}

fn schwarzian_rows(s: &mut Suite, seed: u64) {
    const M: &str = "schwarzian";
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x22);
    let k = corpus::koebe();
    let l = corpus::ell();
    let e2 = corpus::exp_az(2.0);
    let origin = Complex64::new(0.0, 0.0);
    let hyp = Metric::hyperbolic();
    let sph = Metric::spherical();
    let euc = Metric::euclidean();

    s.value(M, "Sk(0) = −6", Complex64::new(-6.0, 0.0), classical_s(&k, origin), 1e-11);
    s.value(M, "Sl(0) = 2", Complex64::new(2.0, 0.0), classical_s(&l, origin), 1e-11);
    s.value(
        M,
        "S(e^{2z}) = −2",
        Complex64::new(-2.0, 0.0),
        classical_s(&e2, corpus::sample_disk(&mut rng, 0.8)),
        1e-10,
    );
    let mob = Fun::mobius(corpus::random_mobius(&mut rng));
    s.value(
        M,
        "S(Möbius) = 0",
        Complex64::new(0.0, 0.0),
        classical_s(&mob, corpus::sample_disk(&mut rng, 0.5)),
        1e-9,
    );
    s.value(
        M,
        "S₀[f] = 1",
        Complex64::new(1.0, 0.0),
        tamanoi_s(&k, 0, origin, TamanoiRoute::Series),
        1e-14,
    );
    s.value(
        M,
        "S₁[f] = 0",
        Complex64::new(0.0, 0.0),
        tamanoi_s(&k, 1, origin, TamanoiRoute::Series),
        1e-14,
    );
    s.value(
        M,
        "S₃[e^{2z}] = 0",
        Complex64::new(0.0, 0.0),
        tamanoi_s(&e2, 3, corpus::sample_disk(&mut rng, 0.7), TamanoiRoute::Series),
        1e-10,
    );
    // 3!ψ₂ = Sf and 4!ψ₃ = (Sf)'
    let z = corpus::sample_disk(&mut rng, 0.8);
    let sf_jet = crate::schwarzian::sf_jet1(&k, z, 2).unwrap();
    s.value(
        M,
        "6ψ₂[k] = Sk",
        sf_jet.value().unwrap(),
        aharonov_psi(&k, 2, z, PsiRoute::Series).map(|p| p * 6.0),
        1e-10,
    );
    s.value(
        M,
        "24ψ₃[k] = (Sk)'",
        sf_jet.deriv().unwrap().value().unwrap(),
        aharonov_psi(&k, 3, z, PsiRoute::Series).map(|p| p * 24.0),
        1e-9,
    );
    // extremal ψ₃ and the sharp 16
    let extremal = corpus::extremal_psi3();
    s.value(
        M,
        "ψ₃[extremal](0) = 2/3",
        Complex64::new(2.0 / 3.0, 0.0),
        aharonov_psi(&extremal, 3, origin, PsiRoute::Series),
        1e-9,
    );
    s.real(
        M,
        "|V(extremal)(0)| = 16",
        16.0,
        projective_v(&extremal, 3, origin, &hyp).map(|v| v.norm()),
        1e-8,
    );
    // route agreement
    let mut worst = 0.0f64;
    for f in [&k, &l, &e2, &corpus::cubic()] {
        for _ in 0..8 {
            let z = corpus::sample_disk(&mut rng, 0.8);
            for n in 2..=6 {
                let a = tamanoi_s(f, n, z, TamanoiRoute::Recursion).unwrap();
                let b = tamanoi_s(f, n, z, TamanoiRoute::Poly).unwrap();
                let c = tamanoi_s(f, n, z, TamanoiRoute::Series).unwrap();
                let scale = a.norm().max(1.0);
                worst = worst.max((a - b).norm() / scale).max((a - c).norm() / scale);
            }
        }
    }
    s.residual(M, "S_n route agreement (rel)", Ok(worst), 1e-9);
    let mut worst = 0.0f64;
    for f in [&k, &l, &corpus::cubic()] {
        for _ in 0..8 {
            let z = corpus::sample_disk(&mut rng, 0.8);
            for n in 1..=6 {
                let a = aharonov_psi(f, n, z, PsiRoute::Series).unwrap();
                let b = aharonov_psi(f, n, z, PsiRoute::Relation).unwrap();
                worst = worst.max((a - b).norm() / a.norm().max(1.0));
            }
        }
    }
    s.residual(M, "ψ_n route agreement (rel)", Ok(worst), 1e-9);
    // Möbius post-invariance
    let mut worst = 0.0f64;
    for _ in 0..6 {
        let m = corpus::random_mobius(&mut rng);
        let mf = k.clone().post_mobius(m);
        let z = corpus::sample_disk(&mut rng, 0.7);
        for n in 2..=5 {
            let a = tamanoi_s(&k, n, z, TamanoiRoute::Poly).unwrap();
            let b = tamanoi_s(&mf, n, z, TamanoiRoute::Poly).unwrap();
            worst = worst.max((a - b).norm() / a.norm().max(1.0));
        }
    }
    s.residual(M, "S_n[M∘f] = S_n[f] (rel)", Ok(worst), 1e-7);
    // Peschl–Minda: identity map is a local isometry
    let idf = Fun::parse("z").unwrap();
    s.value(
        M,
        "D¹(id) = 1 (λ₋₁ → λ₋₁)",
        Complex64::new(1.0, 0.0),
        pm_d(&idf, 1, corpus::sample_disk(&mut rng, 0.8), &hyp, &hyp),
        1e-12,
    );
    let mut worst = 0.0f64;
    for n in 2..=4 {
        let z = corpus::sample_disk(&mut rng, 0.8);
        worst = worst.max(pm_d(&idf, n, z, &hyp, &hyp).unwrap().norm());
        worst = worst.max(
            invariant_sigma(&idf, n, z, &hyp, &hyp, SigmaRoute::Poly)
                .unwrap()
                .norm(),
        );
    }
    s.residual(M, "Dⁿ(id) = Σⁿ(id) = 0, n ≥ 2", Ok(worst), 1e-10);
    // Q¹ explicit formula
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let z = corpus::sample_disk(&mut rng, 0.8);
        let q1 = pm_q(&k, 1, z, &hyp, &sph).unwrap();
        let jet = k.jet1(z, 4).unwrap();
        let fp = jet.derivative_at_base(1).unwrap();
        let fpp = jet.derivative_at_base(2).unwrap();
        let dls = metric::log_deriv(&sph, jet.value().unwrap(), LogDerivKind::Dz).unwrap();
        let dlr = metric::log_deriv(&hyp, z, LogDerivKind::Dz).unwrap();
        let expect = (2.0 * dls * fp + fpp / fp - 2.0 * dlr) / hyp.density(z).unwrap();
        worst = worst.max((q1 - expect).norm() / expect.norm().max(1.0));
    }
    s.residual(M, "Q¹ explicit form (rel)", Ok(worst), 1e-9);
    // Lemma dQ recursion residual
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let z = corpus::sample_disk(&mut rng, 0.75);
        for n in 1..=4u32 {
            let qn = pm_q_jet(&k, n, z, &hyp, &sph, 1).unwrap();
            let rho_jet = hyp.density_jet2(z, qn.order()).unwrap();
            let lhs = qn.dz().unwrap().div(&rho_jet).unwrap().value();
            let q1 = pm_q(&k, 1, z, &hyp, &sph).unwrap();
            let qn1 = pm_q(&k, n + 1, z, &hyp, &sph).unwrap();
            let dl = metric::log_deriv(&hyp, z, LogDerivKind::Dz).unwrap()
                / hyp.density(z).unwrap();
            let rhs = qn1 - (q1 - n as f64 * dl) * qn.value();
            worst = worst.max((lhs - rhs).norm());
        }
    }
    s.residual(M, "∂_ρQⁿ recursion residual", Ok(worst), 1e-8);
    // Σ vs classical
    s.value(
        M,
        "Σk(0) = Sk(0) = −6",
        Complex64::new(-6.0, 0.0),
        invariant_sigma(&k, 2, origin, &hyp, &sph, SigmaRoute::Poly),
        1e-9,
    );
    let z34 = Complex64::new(0.4, 0.2);
    let lam = hyp.density(z34).unwrap();
    s.value(
        M,
        "Σ³l = λ₋₁^{−3}V³l at 0.4+0.2i",
        projective_v(&l, 3, z34, &hyp).unwrap() / (lam * lam * lam),
        invariant_sigma(&l, 3, z34, &hyp, &sph, SigmaRoute::Poly),
        1e-9,
    );
    // projective chain
    let z = corpus::sample_disk(&mut rng, 0.8);
    s.value(
        M,
        "𝔇²f = Sf",
        classical_s(&k, z).unwrap(),
        projective_d(&k, 2, z, &hyp),
        1e-11,
    );
    let sf = crate::schwarzian::sf_jet1(&l, z, 4).unwrap();
    let mut worst = 0.0f64;
    for n in 2..=5u32 {
        let d = projective_d(&l, n, z, &euc).unwrap();
        let expect = sf.derivative_at_base(n as usize - 2).unwrap();
        worst = worst.max((d - expect).norm() / expect.norm().max(1.0));
        let v = projective_v(&l, n, z, &euc).unwrap();
        let sn = tamanoi_s(&l, n, z, TamanoiRoute::Poly).unwrap();
        worst = worst.max((v - sn).norm() / sn.norm().max(1.0));
    }
    s.residual(M, "λ₀: 𝔇ⁿ = (Sf)^{(n−2)}, Vⁿ = S_n (rel)", Ok(worst), 1e-8);
    let ucs = corpus::unit_coefficient_schwarzian();
    s.value(
        M,
        "𝔇³ at i/2 for Sf = (1−z²)^{−2}",
        Complex64::new(0.0, 1024.0 / 375.0),
        projective_d(&ucs, 3, Complex64::new(0.0, 0.5), &hyp),
        1e-9,
    );
    // Eq. for V³ on the disk
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let z = corpus::sample_disk(&mut rng, 0.85);
        let sfj = crate::schwarzian::sf_jet1(&k, z, 2).unwrap();
        let expect = sfj.deriv().unwrap().value().unwrap()
            - 4.0 * z.conj() / (1.0 - z.norm_sqr()) * sfj.value().unwrap();
        let v3 = projective_v(&k, 3, z, &hyp).unwrap();
        worst = worst.max((v3 - expect).norm() / expect.norm().max(1.0));
    }
    s.residual(M, "V³ = (Sf)' − 4z̄(1−|z|²)^{−1}Sf (rel)", Ok(worst), 1e-9);
    s.value(
        M,
        "Vf(0) = S₃[f](0) = 24ψ₃[f](0)",
        tamanoi_s(&k, 3, origin, TamanoiRoute::Series).unwrap(),
        projective_v(&k, 3, origin, &hyp),
        1e-10,
    );
    // identity suites
    let exp_re = Metric::custom("exp((z+zbar)/2)").unwrap();
    for (name, sigma) in [("λ₊₁", sph.clone()), ("e^{Re w}", exp_re.clone())] {
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let z = corpus::sample_disk(&mut rng, 0.8);
            let rep = identity_check(&IdentityCheck::Thm46 { f: &k, rho: &hyp, sigma: &sigma }, z)
                .unwrap();
            worst = worst.max(rep.residual());
        }
        s.residual(M, &format!("Σf identity (σ = {name})"), Ok(worst), 1e-7);
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let z = corpus::sample_disk(&mut rng, 0.8);
            let rep = identity_check(&IdentityCheck::Thm54 { f: &k, rho: &hyp, sigma: &sigma }, z)
                .unwrap();
            worst = worst.max(rep.residual());
        }
        s.residual(M, &format!("Σ³f identity (σ = {name})"), Ok(worst), 1e-7);
    }
    let g = Fun::parse("exp(z)").unwrap();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let z = corpus::sample_disk(&mut rng, 0.8);
        let rep = identity_check(&IdentityCheck::Composition { g: &g, f: &k }, z).unwrap();
        worst = worst.max(rep.residual());
    }
    s.residual(M, "S(g∘f) cocycle residual", Ok(worst), 1e-7);
    // transformation rules
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let gmap = corpus::random_disk_auto(&mut rng, 0.4);
        let h = corpus::random_sphere_rotation(&mut rng);
        let rho_hat = Metric::pullback(hyp.clone(), gmap);
        let sigma = Metric::pullback(sph.clone(), h);
        let comp = k.clone().pre_mobius(gmap).post_mobius(h);
        let zh = corpus::sample_disk(&mut rng, 0.5);
        let w = gmap.apply(zh);
        let gp = gmap.derivative(zh);
        let unit = gp / gp.norm();
        for n in 2..=3u32 {
            let lhs = invariant_sigma(&comp, n, zh, &rho_hat, &sph, SigmaRoute::Poly).unwrap();
            let rhs = invariant_sigma(&k, n, w, &hyp, &sigma, SigmaRoute::Poly).unwrap()
                * unit.powi(n as i32);
            worst = worst.max((lhs - rhs).norm());
        }
    }
    s.residual(M, "Σⁿ transformation rule", Ok(worst), 1e-8);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let gmap = corpus::random_disk_auto(&mut rng, 0.4);
        let h = corpus::random_mobius(&mut rng);
        let rho_hat = Metric::pullback(hyp.clone(), gmap);
        let comp = k.clone().pre_mobius(gmap).post_mobius(h);
        let zh = corpus::sample_disk(&mut rng, 0.5);
        let w = gmap.apply(zh);
        let gp = gmap.derivative(zh);
        for n in 2..=4u32 {
            let lhs = projective_v(&comp, n, zh, &rho_hat).unwrap();
            let rhs = projective_v(&k, n, w, &hyp).unwrap() * gp.powi(n as i32);
            worst = worst.max((lhs - rhs).norm());
        }
    }
    s.residual(M, "Vⁿ transformation rule", Ok(worst), 1e-7);
}

fn norm_rows(s: &mut Suite, grid: &GridConfig, seed: u64) {
    const M: &str = "norm";
    let hyp = Metric::hyperbolic();
    let k = corpus::koebe();
    let l = corpus::ell();
    let sqrt3 = 3.0f64.sqrt();

    let sk = |z: Complex64| classical_s(&k, z);
    s.real(M, "‖Sk‖₂ = 6", 6.0, sup_norm(&sk, 2.0, grid).map(|e| e.refined), 1e-5);
    let sl = |z: Complex64| classical_s(&l, z);
    s.real(M, "‖Sl‖₂ = 2", 2.0, sup_norm(&sl, 2.0, grid).map(|e| e.refined), 1e-5);
    let vk = |z: Complex64| projective_v(&k, 3, z, &hyp);
    s.real(
        M,
        "‖Vk‖₃ = 16√3/3",
        16.0 * sqrt3 / 3.0,
        sup_norm(&vk, 3.0, grid).map(|e| e.refined),
        1e-5,
    );
    let vl = |z: Complex64| projective_v(&l, 3, z, &hyp);
    s.real(
        M,
        "‖Vl‖₃ = 16√3/9",
        16.0 * sqrt3 / 9.0,
        sup_norm(&vl, 3.0, grid).map(|e| e.refined),
        1e-5,
    );
    let ucs = corpus::unit_coefficient_schwarzian();
    let vu = |z: Complex64| projective_v(&ucs, 3, z, &hyp);
    s.real(
        M,
        "‖Vf‖₃ = 8√3/9 for Sf = (1−z²)^{−2}",
        8.0 * sqrt3 / 9.0,
        sup_norm(&vu, 3.0, grid).map(|e| e.refined),
        1e-5,
    );
    // two-regime profile of the closing computation
    let regime = 8.0 / (3.0 * sqrt3);
    for r in [0.45, 0.7, 0.9] {
        match circle_profile(&vu, 3.0, r, grid.n_theta) {
            Ok((v, th)) => {
                let ok_v = (v - regime).abs() <= 1e-5 * regime;
                let sin_expected = (1.0 - r * r) / (2.0 * 2.0f64.sqrt() * r);
                let ok_th = (th.sin().abs() - sin_expected).abs() <= 1e-4
                    || ((std::f64::consts::PI - th).sin().abs() - sin_expected).abs() <= 1e-4;
                s.push(
                    M,
                    &format!("profile(Vf, r={r}) = 8/(3√3), sinθ* = (1−r²)/(2√2r)"),
                    format!("{regime:.9}"),
                    format!("{v:.9} (θ* = {th:.6})"),
                    "1e-5 rel",
                    ok_v && ok_th,
                );
            }
            Err(e) => s.push(M, "profile(Vf)", regime, format!("error: {e}"), "-", false),
        }
    }
    s.real(
        M,
        "profile(Vf, r=0) = 0",
        0.0,
        circle_profile(&vu, 3.0, 0.0, grid.n_theta).map(|(v, _)| v),
        1e-12,
    );
    // norm invariance under M∘f∘T
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x33);
    let t = Mobius::disk_auto(Complex64::new(0.3, 0.1)).unwrap();
    let minv = Mobius::inversion();
    let pts: Vec<Complex64> = (0..20).map(|_| corpus::sample_disk(&mut rng, 0.7)).collect();
    match crate::norm::invariance_check(&k, 3, &t, &minv, grid, &pts) {
        Ok(rep) => {
            s.push(
                M,
                "‖V³(M∘k∘T)‖₃ = ‖V³k‖₃",
                format!("{:.7}", rep.norm_original),
                format!("{:.7}", rep.norm_composed),
                "1e-6 abs diff",
                rep.norm_diff < 1e-6 * rep.norm_original.max(1.0),
            );
            s.residual(M, "pointwise V³ cocycle", Ok(rep.pointwise_max_residual), 1e-8);
        }
        Err(e) => s.push(M, "norm invariance", "-", format!("error: {e}"), "-", false),
    }
}

fn criteria_rows(s: &mut Suite, grid: &GridConfig, seed: u64) {
    const M: &str = "criteria";
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x44);
    // verdicts
    let cases = [
        (
            "Möbius → univalent",
            Fun::mobius(corpus::random_disk_auto(&mut rng, 0.5)),
            Conclusion::Univalent,
        ),
        ("e^{4z} → not univalent", corpus::exp_az(4.0), Conclusion::NotUnivalent),
        ("Koebe → indeterminate", corpus::koebe(), Conclusion::Indeterminate),
    ];
    for (name, f, expected) in cases {
        match univalence_check(&f, grid) {
            Ok(v) => s.push(
                M,
                name,
                format!("{expected:?}"),
                format!("{:?} (‖Sf‖₂={:.4}, ‖Vf‖₃={:.4})", v.conclusion, v.s2_norm, v.v3_norm),
                "-",
                v.conclusion == expected,
            ),
            Err(e) => s.push(M, name, format!("{expected:?}"), format!("error: {e}"), "-", false),
        }
    }
    // Kraus–Nehari first term
    let k = corpus::koebe();
    let z = corpus::sample_disk(&mut rng, 0.8);
    let sf = classical_s(&k, z).unwrap();
    s.real(
        M,
        "first Aharonov term = [(1−|z|²)²|Sf|/6]²",
        ((1.0 - z.norm_sqr()).powi(2) * sf.norm() / 6.0).powi(2),
        aharonov_partial_sum(&k, z, 1),
        1e-9,
    );
    // second-term bound on univalent samples
    let mut worst = 0.0f64;
    let hyp = Metric::hyperbolic();
    for f in [&k, &corpus::ell()] {
        for _ in 0..50 {
            let z = corpus::sample_disk(&mut rng, 0.85);
            let vf = projective_v(f, 3, z, &hyp).unwrap();
            worst = worst.max((1.0 - z.norm_sqr()).powi(3) * vf.norm() / 24.0);
        }
    }
    s.push(
        M,
        "(1−|z|²)³|Vf|/24 ≤ 1/√2 on univalent samples",
        format!("≤ {:.6}", 1.0 / 2.0f64.sqrt()),
        format!("max {worst:.6}"),
        "-",
        worst <= 1.0 / 2.0f64.sqrt() + 1e-9,
    );
    // partial sums bounded by 1 on the univalent corpus
    let univalent = [
        corpus::koebe(),
        corpus::ell(),
        Fun::mobius(corpus::random_disk_auto(&mut rng, 0.6)),
        Fun::parse("z+z^2/4").unwrap(),
    ];
    let mut worst = 0.0f64;
    for f in &univalent {
        for _ in 0..12 {
            let z = corpus::sample_disk(&mut rng, 0.8);
            worst = worst.max(aharonov_partial_sum(f, z, 6).unwrap());
        }
    }
    s.push(
        M,
        "Aharonov partial sums ≤ 1 (univalent corpus)",
        "≤ 1",
        format!("max {worst:.8}"),
        "1e-6 slack",
        worst <= 1.0 + 1e-6,
    );
    // two-sided norm bounds on the corpus
    for (name, f) in corpus::proposition_corpus(seed) {
        match proposition_bounds(&f, grid) {
            Ok(rep) => s.push(
                M,
                &format!("norm bounds hold for {name}"),
                "slacks ≥ 0",
                format!(
                    "lower {:.4}, upper {:.4} (‖Sf‖₂={:.4}, ‖Vf‖₃={:.4})",
                    rep.lower_slack, rep.upper_slack, rep.s2_norm, rep.v3_norm
                ),
                "-",
                rep.holds,
            ),
            Err(e) => s.push(M, &format!("norm bounds for {name}"), "-", format!("error: {e}"), "-", false),
        }
    }
    // 4/3 radial constant by the quadrature's own midpoint rule
    s.real(
        M,
        "2∫₀¹(1−r²)dr = 4/3",
        4.0 / 3.0,
        Ok(2.0 * midpoint_integral(|r| 1.0 - r * r, 0.0, 1.0, 4096)),
        1e-7,
    );
    // Wirths equality case
    let g = Fun::parse("(25*sqrt(5)/16)*z").unwrap();
    match wirths_check(&g, &GridConfig::default()) {
        Ok(rep) => {
            s.push(
                M,
                "‖(25√5/16)z‖₂ = 1",
                "1",
                format!("{:.9}", rep.g2_norm),
                "1e-7 abs",
                (rep.g2_norm - 1.0).abs() < 1e-7,
            );
            s.push(
                M,
                "|g'(0)| = 25√5/16",
                format!("{:.12}", criteria::wirths_bound()),
                format!("{:.12}", rep.gprime0),
                "1e-12 abs",
                (rep.gprime0 - criteria::wirths_bound()).abs() < 1e-12,
            );
        }
        Err(e) => s.push(M, "Wirths equality case", "-", format!("error: {e}"), "-", false),
    }
    // integral representation (two spot reconstructions; the full set runs in
    // the acceptance suite)
    let quad = QuadConfig::default();
    s.value(
        M,
        "Sl(0) reconstructed from Vl",
        Complex64::new(2.0, 0.0),
        integral_representation(&corpus::ell(), Complex64::new(0.0, 0.0), &quad)
            .map(|r| r.reconstructed),
        1e-3,
    );
    let z02 = Complex64::new(0.2, 0.0);
    s.value(
        M,
        "Sk(0.2) reconstructed from Vk",
        Complex64::new(-6.0 / (1.0f64 - 0.04).powi(2), 0.0),
        integral_representation(&k, z02, &quad).map(|r| r.reconstructed),
        1e-3,
    );
}
