//! Command-line front end for the `schwarz` binary.
//!
//! Subcommands: `eval` (one operator at one point), `norm` (weighted
//! sup-norm), `check` (univalence verdict), `repr` (reconstruction of `Sf`
//! from `Vf`), `poly dump` (exact polynomial families), and `verify` (the
//! pinned-constant suite). Every report embeds the fully resolved
//! configuration, so JSON output is self-describing; `SCHWARZ_THREADS` caps
//! the worker pool.
//!
//! Exit codes: 0 success, 1 computation error, 2 usage error.

use std::str::FromStr;

use clap::{Parser, Subcommand};
use num_complex::Complex64;

use crate::criteria::{integral_representation, univalence_check, QuadConfig};
use crate::metric::Metric;
use crate::norm::{sup_norm, GridConfig};
use crate::poly;
use crate::schwarzian::{
    aharonov_psi, classical_s, invariant_sigma, pm_d, pm_q, projective_d, projective_v, Fun,
    PsiRoute, SigmaRoute, TamanoiRoute,
};
use crate::verify::{run_verify, VerifyOptions, VerifyRow};
use crate::{Error, Result};

/// Operator spec, e.g. `S`, `Sn:4`, `psi:3`, `D:2`, `Q:2`, `Sigma:3`,
/// `Dproj:3`, `V:3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpSpec {
    S,
    Sn(u32),
    Psi(u32),
    D(u32),
    Q(u32),
    Sigma(u32),
    Dproj(u32),
    V(u32),
}

const VALID_OPS: &str = "S, Sn:<n>, psi:<n>, D:<n>, Q:<n>, Sigma:<n>, Dproj:<n>, V:<n>";

impl FromStr for OpSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let n = |missing_ok: bool| -> Result<u32> {
            match arg {
                Some(a) => a.parse::<u32>().map_err(|_| {
                    Error::Usage(format!("bad operator order `{a}`; valid operators: {VALID_OPS}"))
                }),
                None if missing_ok => Ok(0),
                None => Err(Error::Usage(format!(
                    "operator `{s}` needs an order; valid operators: {VALID_OPS}"
                ))),
            }
        };
        match head {
            "S" if arg.is_none() => Ok(OpSpec::S),
            "Sn" => Ok(OpSpec::Sn(n(false)?)),
            "psi" => Ok(OpSpec::Psi(n(false)?)),
            "D" => Ok(OpSpec::D(n(false)?)),
            "Q" => Ok(OpSpec::Q(n(false)?)),
            "Sigma" => Ok(OpSpec::Sigma(n(false)?)),
            "Dproj" => Ok(OpSpec::Dproj(n(false)?)),
            "V" => Ok(OpSpec::V(n(false)?)),
            _ => Err(Error::Usage(format!(
                "unknown operator `{s}`; valid operators: {VALID_OPS}"
            ))),
        }
    }
}

impl std::fmt::Display for OpSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OpSpec::S => write!(f, "S"),
            OpSpec::Sn(n) => write!(f, "Sn:{n}"),
            OpSpec::Psi(n) => write!(f, "psi:{n}"),
            OpSpec::D(n) => write!(f, "D:{n}"),
            OpSpec::Q(n) => write!(f, "Q:{n}"),
            OpSpec::Sigma(n) => write!(f, "Sigma:{n}"),
            OpSpec::Dproj(n) => write!(f, "Dproj:{n}"),
            OpSpec::V(n) => write!(f, "V:{n}"),
        }
    }
}

/// Parse a complex literal like `0.3+0.4i`, `-2i`, `0.5`, `i`, with optional
/// surrounding parentheses.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let t = s.trim();
    let t = t
        .strip_prefix('(')
        .and_then(|u| u.strip_suffix(')'))
        .unwrap_or(t)
        .trim();
    let ast = crate::expr::parse(t)?;
    match crate::expr::eval_point(&ast, Complex64::new(0.0, 0.0))? {
        Some(v) if !matches!(ast, crate::expr::ExprAst::Z) && !ast.contains_zbar() => Ok(v),
        _ => Err(Error::Usage(format!("`{s}` is not a complex literal"))),
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "schwarz",
    about = "Schwarzian-type derivatives, metric invariants, weighted norms, and univalence checks on the unit disk",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate one operator at one point.
    Eval {
        /// Expression in z, e.g. "z/(1-z)^2".
        #[arg(long)]
        expr: String,
        /// Operator spec (S, Sn:<n>, psi:<n>, D:<n>, Q:<n>, Sigma:<n>, Dproj:<n>, V:<n>).
        #[arg(long)]
        op: String,
        /// Evaluation point, e.g. "0.3+0.4i".
        #[arg(long)]
        at: String,
        /// Source metric (hyperbolic, euclidean, spherical, custom:<expr>).
        #[arg(long, default_value = "hyperbolic")]
        metric: String,
        /// Target metric for D/Q/Sigma.
        #[arg(long, default_value = "spherical")]
        target_metric: String,
        #[arg(long)]
        json: bool,
    },
    /// Estimate a weighted sup-norm over the unit disk.
    Norm {
        #[arg(long)]
        expr: String,
        #[arg(long, default_value = "V:3")]
        op: String,
        /// Weight c in (1−|z|²)^c; defaults to the operator's natural weight.
        #[arg(long)]
        weight: Option<f64>,
        #[arg(long, default_value = "hyperbolic")]
        metric: String,
        #[arg(long, default_value = "spherical")]
        target_metric: String,
        #[arg(long, default_value_t = 256)]
        nr: usize,
        #[arg(long, default_value_t = 512)]
        ntheta: usize,
        #[arg(long)]
        json: bool,
    },
    /// Univalence verdict from the weighted norms of Sf and Vf.
    Check {
        #[arg(long)]
        expr: String,
        #[arg(long, default_value_t = 256)]
        nr: usize,
        #[arg(long, default_value_t = 512)]
        ntheta: usize,
        #[arg(long)]
        json: bool,
    },
    /// Reconstruct Sf(z) from Vf by the disk integral and compare.
    Repr {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        at: String,
        #[arg(long)]
        json: bool,
    },
    /// Exact polynomial families.
    Poly {
        #[command(subcommand)]
        action: PolyAction,
    },
    /// Recompute the pinned constants and identities; nonzero exit on any
    /// failure.
    Verify {
        /// Restrict to one module (polynomials, metric, schwarzian, norm, criteria).
        #[arg(long)]
        only: Option<String>,
        /// Coarsen the norm grids by this factor (sensitivity run).
        #[arg(long, default_value_t = 1)]
        grid_scale: usize,
        #[arg(long, default_value_t = 0xC0FFEE)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand, Debug)]
enum PolyAction {
    /// Print the canonical sorted monomial list of P_n or T_n.
    Dump {
        /// Family: P or T.
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: u32,
    },
}

#[derive(serde::Serialize)]
struct EvalReport {
    command: &'static str,
    expr: String,
    op: String,
    #[serde(with = "crate::serde_util::complex")]
    at: Complex64,
    metric: String,
    target_metric: String,
    #[serde(with = "crate::serde_util::complex")]
    value: Complex64,
}

#[derive(serde::Serialize)]
struct NormReport {
    command: &'static str,
    expr: String,
    op: String,
    weight: f64,
    metric: String,
    target_metric: String,
    grid: GridConfig,
    value: f64,
    #[serde(with = "crate::serde_util::complex")]
    argmax: Complex64,
    converged: bool,
    likely_unbounded: bool,
}

fn op_value(
    op: OpSpec,
    f: &Fun,
    z: Complex64,
    rho: &Metric,
    sigma: &Metric,
) -> Result<Complex64> {
    match op {
        OpSpec::S => classical_s(f, z),
        OpSpec::Sn(n) => tamanoi_all_routes(f, n, z),
        OpSpec::Psi(n) => aharonov_psi(f, n, z, PsiRoute::Series),
        OpSpec::D(n) => pm_d(f, n, z, rho, sigma),
        OpSpec::Q(n) => pm_q(f, n, z, rho, sigma),
        OpSpec::Sigma(n) => invariant_sigma(f, n, z, rho, sigma, SigmaRoute::Poly),
        OpSpec::Dproj(n) => projective_d(f, n, z, rho),
        OpSpec::V(n) => projective_v(f, n, z, rho),
    }
}

/// `S_n` through the polynomial route, cross-checked against the series
/// route so a user-visible value never rests on a single code path.
fn tamanoi_all_routes(f: &Fun, n: u32, z: Complex64) -> Result<Complex64> {
    let a = crate::schwarzian::tamanoi_s(f, n, z, TamanoiRoute::Poly)?;
    let b = crate::schwarzian::tamanoi_s(f, n, z, TamanoiRoute::Series)?;
    if (a - b).norm() > 1e-6 * a.norm().max(1.0) {
        return Err(Error::NonConvergence(format!(
            "S_{n} routes disagree: {a} vs {b}"
        )));
    }
    Ok(a)
}

fn default_weight(op: OpSpec) -> f64 {
    match op {
        OpSpec::S => 2.0,
        OpSpec::Sn(n) | OpSpec::Psi(n) | OpSpec::D(n) | OpSpec::Q(n) | OpSpec::Sigma(n)
        | OpSpec::Dproj(n) | OpSpec::V(n) => n as f64,
    }
}

fn dispatch(cmd: Command) -> Result<String> {
    match cmd {
        Command::Eval {
            expr,
            op,
            at,
            metric,
            target_metric,
            json,
        } => {
            let f = Fun::parse(&expr)?;
            let opspec: OpSpec = op.parse()?;
            let z = parse_complex(&at)?;
            let rho = Metric::from_name(&metric)?;
            let sigma = Metric::from_name(&target_metric)?;
            let value = op_value(opspec, &f, z, &rho, &sigma)?;
            let report = EvalReport {
                command: "eval",
                expr,
                op: opspec.to_string(),
                at: z,
                metric: rho.name(),
                target_metric: sigma.name(),
                value,
            };
            if json {
                Ok(serde_json::to_string_pretty(&report).unwrap())
            } else {
                Ok(format!(
                    "{}[{}] at {} = {}",
                    report.op, report.expr, report.at, report.value
                ))
            }
        }
        Command::Norm {
            expr,
            op,
            weight,
            metric,
            target_metric,
            nr,
            ntheta,
            json,
        } => {
            let f = Fun::parse(&expr)?;
            let opspec: OpSpec = op.parse()?;
            let rho = Metric::from_name(&metric)?;
            let sigma = Metric::from_name(&target_metric)?;
            let c = weight.unwrap_or_else(|| default_weight(opspec));
            let cfg = GridConfig {
                n_r: nr,
                n_theta: ntheta,
                ..GridConfig::default()
            };
            let phi = |z: Complex64| op_value(opspec, &f, z, &rho, &sigma);
            let e = sup_norm(&phi, c, &cfg)?;
            let report = NormReport {
                command: "norm",
                expr,
                op: opspec.to_string(),
                weight: c,
                metric: rho.name(),
                target_metric: sigma.name(),
                grid: cfg,
                value: e.refined,
                argmax: e.argmax,
                converged: e.converged,
                likely_unbounded: e.likely_unbounded,
            };
            if json {
                Ok(serde_json::to_string_pretty(&report).unwrap())
            } else {
                Ok(format!(
                    "‖{}[{}]‖_{} = {:.9}  (argmax {}, converged: {}{})",
                    report.op,
                    report.expr,
                    report.weight,
                    report.value,
                    report.argmax,
                    report.converged,
                    if report.likely_unbounded {
                        ", likely unbounded"
                    } else {
                        ""
                    }
                ))
            }
        }
        Command::Check {
            expr,
            nr,
            ntheta,
            json,
        } => {
            let f = Fun::parse(&expr)?;
            let cfg = GridConfig {
                n_r: nr,
                n_theta: ntheta,
                ..GridConfig::default()
            };
            let verdict = univalence_check(&f, &cfg)?;
            if json {
                #[derive(serde::Serialize)]
                struct CheckReport<'a> {
                    command: &'static str,
                    expr: &'a str,
                    grid: GridConfig,
                    verdict: &'a crate::criteria::Verdict,
                }
                Ok(serde_json::to_string_pretty(&CheckReport {
                    command: "check",
                    expr: &expr,
                    grid: cfg,
                    verdict: &verdict,
                })
                .unwrap())
            } else {
                Ok(format!(
                    "{expr}: {:?}  (‖Sf‖₂ = {:.6} [nec ≤ 6: {}, suf ≤ 2: {}], ‖Vf‖₃ = {:.6} [nec ≤ 16: {}, suf ≤ 3/2: {}])",
                    verdict.conclusion,
                    verdict.s2_norm,
                    verdict.necessary_s2,
                    verdict.sufficient_s2,
                    verdict.v3_norm,
                    verdict.necessary_v3,
                    verdict.sufficient_v3,
                ))
            }
        }
        Command::Repr { expr, at, json } => {
            let f = Fun::parse(&expr)?;
            let z = parse_complex(&at)?;
            let quad = QuadConfig::default();
            let rep = integral_representation(&f, z, &quad)?;
            if json {
                #[derive(serde::Serialize)]
                struct Report<'a> {
                    command: &'static str,
                    expr: &'a str,
                    #[serde(with = "crate::serde_util::complex")]
                    at: Complex64,
                    quad: QuadConfig,
                    #[serde(flatten)]
                    result: crate::criteria::ReprReport,
                }
                Ok(serde_json::to_string_pretty(&Report {
                    command: "repr",
                    expr: &expr,
                    at: z,
                    quad,
                    result: rep,
                })
                .unwrap())
            } else {
                Ok(format!(
                    "Sf({z}) reconstructed = {}  direct = {}  |error| = {:.3e}  (grid {}×{})",
                    rep.reconstructed, rep.direct, rep.abs_error, rep.n_phi, rep.n_s
                ))
            }
        }
        Command::Poly { action } => match action {
            PolyAction::Dump { family, n } => {
                let fam = match family.as_str() {
                    "P" | "p" => poly::Family::P,
                    "T" | "t" => poly::Family::T,
                    other => {
                        return Err(Error::Usage(format!(
                            "unknown family `{other}`; expected P or T"
                        )))
                    }
                };
                let p = poly::gen(fam, n)?;
                Ok(format!("{family}_{n} = {}", p.to_canonical_string()))
            }
        },
        Command::Verify {
            only,
            grid_scale,
            seed,
            json,
        } => {
            let rows = run_verify(&VerifyOptions {
                only,
                grid_scale,
                seed,
            });
            let failed = rows.iter().filter(|r| !r.passed).count();
            let out = if json {
                serde_json::to_string_pretty(&rows).unwrap()
            } else {
                format_verify_table(&rows)
            };
            if failed > 0 {
                Err(Error::NonConvergence(format!(
                    "{out}\n{failed} of {} checks failed",
                    rows.len()
                )))
            } else {
                Ok(format!("{out}\nall {} checks passed", rows.len()))
            }
        }
    }
}

fn format_verify_table(rows: &[VerifyRow]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<12} {:<52} {:<28} {:<34} {:<12} {}\n",
        "module", "check", "expected", "computed", "tolerance", "status"
    ));
    for r in rows {
        out.push_str(&format!(
            "{:<12} {:<52} {:<28} {:<34} {:<12} {}\n",
            r.module,
            truncate(&r.name, 52),
            truncate(&r.expected, 28),
            truncate(&r.computed, 34),
            r.tolerance,
            if r.passed { "pass" } else { "FAIL" }
        ));
    }
    out
}

fn truncate(s: &str, n: usize) -> String {
    if s.chars().count() <= n {
        s.to_owned()
    } else {
        let cut: String = s.chars().take(n - 1).collect();
        format!("{cut}…")
    }
}

/// Entry point for the binary; returns the process exit code.
pub fn run() -> i32 {
    if let Ok(threads) = std::env::var("SCHWARZ_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap handles --help/--version as "errors" with success status
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(report) => {
            println!("{report}");
            0
        }
        Err(Error::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn op_spec_parsing() {
        assert_eq!("S".parse::<OpSpec>().unwrap(), OpSpec::S);
        assert_eq!("Sn:4".parse::<OpSpec>().unwrap(), OpSpec::Sn(4));
        assert_eq!("psi:3".parse::<OpSpec>().unwrap(), OpSpec::Psi(3));
        assert_eq!("V:3".parse::<OpSpec>().unwrap(), OpSpec::V(3));
        let err = "X:2".parse::<OpSpec>().unwrap_err();
        assert!(err.to_string().contains("valid operators"), "{err}");
    }

    #[test]
    fn complex_literals() {
        assert_eq!(
            parse_complex("0.3+0.4i").unwrap(),
            Complex64::new(0.3, 0.4)
        );
        assert_eq!(
            parse_complex("(0.3-0.4i)").unwrap(),
            Complex64::new(0.3, -0.4)
        );
        assert_eq!(parse_complex("-2i").unwrap(), Complex64::new(0.0, -2.0));
        assert_eq!(parse_complex("i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(parse_complex("0.5").unwrap(), Complex64::new(0.5, 0.0));
        assert!(parse_complex("z").is_err());
    }

    #[test]
    fn eval_dispatch_matches_library() {
        let out = dispatch(Command::Eval {
            expr: "z/(1-z)^2".into(),
            op: "S".into(),
            at: "0".into(),
            metric: "hyperbolic".into(),
            target_metric: "spherical".into(),
            json: true,
        })
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["command"], "eval");
        assert!((v["value"]["re"].as_f64().unwrap() + 6.0).abs() < 1e-9);
        // JSON round-trips through the schema
        let reser = serde_json::to_string(&v).unwrap();
        let v2: serde_json::Value = serde_json::from_str(&reser).unwrap();
        assert_eq!(v, v2);
    }

    #[test]
    fn mobius_v3_is_zero_through_cli() {
        let out = dispatch(Command::Eval {
            expr: "z".into(),
            op: "V:3".into(),
            at: "0.5".into(),
            metric: "hyperbolic".into(),
            target_metric: "spherical".into(),
            json: true,
        })
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(v["value"]["re"].as_f64().unwrap().abs() < 1e-10);
        assert!(v["value"]["im"].as_f64().unwrap().abs() < 1e-10);
    }

    #[test]
    fn poly_dump_canonical() {
        let out = dispatch(Command::Poly {
            action: PolyAction::Dump {
                family: "P".into(),
                n: 3,
            },
        })
        .unwrap();
        assert_eq!(out, "P_3 = x3 - 4*x1*x2 + 3*x1^3");
    }
}
