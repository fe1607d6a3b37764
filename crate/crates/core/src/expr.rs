//! Expression language for meromorphic functions of `z` (and, for metric
//! densities, of `z` and `zbar`), parsed into an AST and evaluated directly
//! as jets.
//!
//! Grammar (whitespace insensitive):
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := '-' factor | power
//! power  := atom ('^' factor)?
//! atom   := number | 'z' | 'zbar' | ident '(' expr (',' expr)* ')' | '(' expr ')'
//! number := digits ['.' digits] [('e'|'E') ['+'|'-'] digits] ['i']
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-z^2`
//! is `−(z²)` and `z^-2` parses. The identifiers `i`, `pi`, `e` are reserved
//! constants; the functions are `exp`, `log`, `sin`, `cos`, `sqrt` and the
//! two-argument `pow(base, exponent)`. `log`, `sqrt` and non-integer powers
//! use the principal branch with cut `(−∞, 0]`; evaluation fails if an inner
//! value lands on the cut ray.

use num_complex::Complex64;

use crate::jet::{Jet1, Jet2};
use crate::{Error, Result};

/// Built-in single-argument functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Sqrt,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
        }
    }
}

/// Parsed expression. Integer exponents are stored exactly in [`ExprAst::PowInt`].
#[derive(Clone, Debug, PartialEq)]
pub enum ExprAst {
    Const(Complex64),
    Z,
    Zbar,
    Neg(Box<ExprAst>),
    Add(Box<ExprAst>, Box<ExprAst>),
    Sub(Box<ExprAst>, Box<ExprAst>),
    Mul(Box<ExprAst>, Box<ExprAst>),
    Div(Box<ExprAst>, Box<ExprAst>),
    PowInt(Box<ExprAst>, i32),
    Pow(Box<ExprAst>, Box<ExprAst>),
    Call(Func, Box<ExprAst>),
}

/// Parse a source string into an AST.
pub fn parse(src: &str) -> Result<ExprAst> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
    };
    p.skip_ws();
    let ast = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(Error::Syntax {
            offset: p.pos,
            expected: "end of input".into(),
        });
    }
    Ok(ast)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            self.skip_ws();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, b: u8) -> Result<()> {
        if self.eat(b) {
            Ok(())
        } else {
            Err(Error::Syntax {
                offset: self.pos,
                expected: format!("\"{}\"", b as char),
            })
        }
    }

    fn expr(&mut self) -> Result<ExprAst> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                let rhs = self.term()?;
                lhs = ExprAst::Add(Box::new(lhs), Box::new(rhs));
            } else if self.eat(b'-') {
                let rhs = self.term()?;
                lhs = ExprAst::Sub(Box::new(lhs), Box::new(rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<ExprAst> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat(b'*') {
                let rhs = self.factor()?;
                lhs = ExprAst::Mul(Box::new(lhs), Box::new(rhs));
            } else if self.eat(b'/') {
                let rhs = self.factor()?;
                lhs = ExprAst::Div(Box::new(lhs), Box::new(rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<ExprAst> {
        if self.eat(b'-') {
            let inner = self.factor()?;
            return Ok(negate(inner));
        }
        self.power()
    }

    fn power(&mut self) -> Result<ExprAst> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let exponent = self.factor()?;
            return Ok(make_pow(base, exponent));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ExprAst> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                self.skip_ws();
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            _ => Err(Error::Syntax {
                offset: self.pos,
                expected: "number, \"z\", function call, or \"(\"".into(),
            }),
        }
    }

    fn number(&mut self) -> Result<ExprAst> {
        let start = self.pos;
        while self.peek().map_or(false, |c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.peek() == Some(b'.') {
            self.pos += 1;
            while self.peek().map_or(false, |c| c.is_ascii_digit()) {
                self.pos += 1;
            }
        }
        if matches!(self.peek(), Some(b'e') | Some(b'E')) {
            // Exponent only when followed by digits (with optional sign);
            // otherwise the `e` is the Euler constant identifier.
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+') | Some(b'-')) {
                self.pos += 1;
            }
            if self.peek().map_or(false, |c| c.is_ascii_digit()) {
                while self.peek().map_or(false, |c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
            } else {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let v: f64 = text.parse().map_err(|_| Error::Syntax {
            offset: start,
            expected: "a decimal number".into(),
        })?;
        let imaginary = self.peek() == Some(b'i')
            && !self
                .src
                .get(self.pos + 1)
                .map_or(false, |c| c.is_ascii_alphanumeric());
        let value = if imaginary {
            self.pos += 1;
            Complex64::new(0.0, v)
        } else {
            Complex64::new(v, 0.0)
        };
        self.skip_ws();
        Ok(ExprAst::Const(value))
    }

    fn ident(&mut self) -> Result<ExprAst> {
        let start = self.pos;
        while self
            .peek()
            .map_or(false, |c| c.is_ascii_alphanumeric() || c == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_owned();
        self.skip_ws();
        match name.as_str() {
            "z" => Ok(ExprAst::Z),
            "zbar" => Ok(ExprAst::Zbar),
            "i" => Ok(ExprAst::Const(Complex64::new(0.0, 1.0))),
            "pi" => Ok(ExprAst::Const(Complex64::new(std::f64::consts::PI, 0.0))),
            "e" => Ok(ExprAst::Const(Complex64::new(std::f64::consts::E, 0.0))),
            "exp" | "log" | "sin" | "cos" | "sqrt" => {
                self.expect(b'(')?;
                let arg = self.expr()?;
                self.expect(b')')?;
                let f = match name.as_str() {
                    "exp" => Func::Exp,
                    "log" => Func::Log,
                    "sin" => Func::Sin,
                    "cos" => Func::Cos,
                    _ => Func::Sqrt,
                };
                Ok(ExprAst::Call(f, Box::new(arg)))
            }
            "pow" => {
                self.expect(b'(')?;
                let base = self.expr()?;
                self.expect(b',')?;
                let exponent = self.expr()?;
                self.expect(b')')?;
                Ok(make_pow(base, exponent))
            }
            _ => Err(Error::Syntax {
                offset: start,
                expected: "one of z, zbar, i, pi, e, exp, log, sin, cos, sqrt, pow".into(),
            }),
        }
    }
}

/// Fold `Neg(Const)` into a signed literal so the canonical form is unique.
fn negate(e: ExprAst) -> ExprAst {
    match e {
        ExprAst::Const(c) => ExprAst::Const(-c),
        other => ExprAst::Neg(Box::new(other)),
    }
}

/// Canonicalize a power: constant integer exponents are stored exactly as
/// [`ExprAst::PowInt`]; other constant exponents fold to a literal.
fn make_pow(base: ExprAst, exponent: ExprAst) -> ExprAst {
    if let Some(c) = const_fold(&exponent) {
        if c.im == 0.0 && c.re.fract() == 0.0 && c.re.abs() <= i32::MAX as f64 {
            return ExprAst::PowInt(Box::new(base), c.re as i32);
        }
        return ExprAst::Pow(Box::new(base), Box::new(ExprAst::Const(c)));
    }
    ExprAst::Pow(Box::new(base), Box::new(exponent))
}

/// Evaluate a constant subtree, if it is one. Function calls are left alone
/// so that e.g. `sqrt(5)` stays symbolic in the AST.
fn const_fold(e: &ExprAst) -> Option<Complex64> {
    match e {
        ExprAst::Const(c) => Some(*c),
        ExprAst::Neg(a) => const_fold(a).map(|c| -c),
        ExprAst::Add(a, b) => Some(const_fold(a)? + const_fold(b)?),
        ExprAst::Sub(a, b) => Some(const_fold(a)? - const_fold(b)?),
        ExprAst::Mul(a, b) => Some(const_fold(a)? * const_fold(b)?),
        ExprAst::Div(a, b) => Some(const_fold(a)? / const_fold(b)?),
        ExprAst::PowInt(a, k) => Some(const_fold(a)?.powi(*k)),
        _ => None,
    }
}

// Precedence levels for serialization.
fn prec(e: &ExprAst) -> u8 {
    match e {
        ExprAst::Add(..) | ExprAst::Sub(..) => 1,
        ExprAst::Mul(..) | ExprAst::Div(..) => 2,
        ExprAst::Neg(..) => 3,
        ExprAst::Pow(..) | ExprAst::PowInt(..) => 4,
        ExprAst::Const(c) => {
            if (c.re != 0.0 && c.im != 0.0) || (c.re == 0.0 && c.im == 0.0) {
                5
            } else if (c.re != 0.0 && c.re < 0.0) || (c.im != 0.0 && c.im < 0.0) {
                3 // prints with a leading minus, parenthesize like a negation
            } else {
                5
            }
        }
        _ => 5,
    }
}

fn fmt_f64(v: f64) -> String {
    // `{:?}` prints the shortest digits that round-trip; normalize the
    // integral case to avoid a trailing ".0" that the grammar also accepts.
    let s = format!("{v:?}");
    match s.strip_suffix(".0") {
        Some(head) => head.to_owned(),
        None => s,
    }
}

fn fmt_const(c: Complex64) -> String {
    if c.im == 0.0 {
        fmt_f64(c.re)
    } else if c.re == 0.0 {
        format!("{}i", fmt_f64(c.im))
    } else if c.im < 0.0 {
        format!("({}-{}i)", fmt_f64(c.re), fmt_f64(-c.im))
    } else {
        format!("({}+{}i)", fmt_f64(c.re), fmt_f64(c.im))
    }
}

fn serialize_into(e: &ExprAst, out: &mut String, parent_prec: u8) {
    let p = prec(e);
    let needs_parens = p < parent_prec;
    if needs_parens {
        out.push('(');
    }
    match e {
        ExprAst::Const(c) => out.push_str(&fmt_const(*c)),
        ExprAst::Z => out.push('z'),
        ExprAst::Zbar => out.push_str("zbar"),
        ExprAst::Neg(a) => {
            out.push('-');
            serialize_into(a, out, 3);
        }
        ExprAst::Add(a, b) => {
            serialize_into(a, out, 1);
            out.push('+');
            serialize_into(b, out, 2);
        }
        ExprAst::Sub(a, b) => {
            serialize_into(a, out, 1);
            out.push('-');
            serialize_into(b, out, 2);
        }
        ExprAst::Mul(a, b) => {
            serialize_into(a, out, 2);
            out.push('*');
            serialize_into(b, out, 3);
        }
        ExprAst::Div(a, b) => {
            serialize_into(a, out, 2);
            out.push('/');
            serialize_into(b, out, 3);
        }
        ExprAst::PowInt(base, k) => {
            serialize_into(base, out, 5);
            out.push('^');
            if *k < 0 {
                out.push_str(&format!("({k})"));
            } else {
                out.push_str(&k.to_string());
            }
        }
        ExprAst::Pow(base, exponent) => {
            serialize_into(base, out, 5);
            out.push('^');
            serialize_into(exponent, out, 4);
        }
        ExprAst::Call(f, arg) => {
            out.push_str(f.name());
            out.push('(');
            serialize_into(arg, out, 0);
            out.push(')');
        }
    }
    if needs_parens {
        out.push(')');
    }
}

/// Canonical string form; reparsing yields an equal AST.
pub fn serialize(e: &ExprAst) -> String {
    let mut out = String::new();
    serialize_into(e, &mut out, 0);
    out
}

impl std::fmt::Display for ExprAst {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&serialize(self))
    }
}

impl ExprAst {
    pub fn contains_zbar(&self) -> bool {
        match self {
            ExprAst::Zbar => true,
            ExprAst::Const(_) | ExprAst::Z => false,
            ExprAst::Neg(a) | ExprAst::PowInt(a, _) | ExprAst::Call(_, a) => a.contains_zbar(),
            ExprAst::Add(a, b)
            | ExprAst::Sub(a, b)
            | ExprAst::Mul(a, b)
            | ExprAst::Div(a, b)
            | ExprAst::Pow(a, b) => a.contains_zbar() || b.contains_zbar(),
        }
    }
}

fn branch_err(node: &ExprAst, err: Error) -> Error {
    match err {
        Error::BranchPoint { op } => Error::Branch {
            subexpr: serialize(node),
            reason: format!("`{op}` hit a zero or the branch-cut ray"),
        },
        other => other,
    }
}

/// Evaluate an expression as a univariate jet of the requested order at `z0`.
/// Poles of rational subexpressions produce pole-flagged (Laurent) jets;
/// `zbar` is rejected.
pub fn eval_jet(ast: &ExprAst, z0: Complex64, order: usize) -> Result<Jet1> {
    let len = order + 1;
    match ast {
        ExprAst::Const(c) => Ok(Jet1::constant(z0, *c, len)),
        ExprAst::Z => Ok(Jet1::variable(z0, len)),
        ExprAst::Zbar => Err(Error::NonHolomorphic),
        ExprAst::Neg(a) => Ok(eval_jet(a, z0, order)?.neg()),
        ExprAst::Add(a, b) => eval_jet(a, z0, order)?.add(&eval_jet(b, z0, order)?),
        ExprAst::Sub(a, b) => eval_jet(a, z0, order)?.sub(&eval_jet(b, z0, order)?),
        ExprAst::Mul(a, b) => eval_jet(a, z0, order)?.mul(&eval_jet(b, z0, order)?),
        ExprAst::Div(a, b) => eval_jet(a, z0, order)?.div(&eval_jet(b, z0, order)?),
        ExprAst::PowInt(a, k) => eval_jet(a, z0, order)?.powi(*k),
        ExprAst::Pow(a, b) => {
            let base = eval_jet(a, z0, order)?;
            let exponent = eval_jet(b, z0, order)?;
            if exponent.is_pole() {
                return Err(Error::PoleInput { op: "pow exponent" });
            }
            let log = base.log().map_err(|e| branch_err(a, e))?;
            log.mul(&exponent)?.exp()
        }
        ExprAst::Call(f, a) => {
            let arg = eval_jet(a, z0, order)?;
            let r = match f {
                Func::Exp => arg.exp(),
                Func::Log => arg.log(),
                Func::Sin => arg.sin(),
                Func::Cos => arg.cos(),
                Func::Sqrt => arg.sqrt(),
            };
            r.map_err(|e| branch_err(a, e))
        }
    }
}

/// Evaluate an expression in `z`, `zbar` as a bivariate Wirtinger jet.
/// Division requires a nonzero value at the point (no Laurent form in two
/// variables).
pub fn eval_jet2(ast: &ExprAst, z0: Complex64, order: usize) -> Result<Jet2> {
    match ast {
        ExprAst::Const(c) => Ok(Jet2::constant(z0, *c, order)),
        ExprAst::Z => Ok(Jet2::variable_z(z0, order)),
        ExprAst::Zbar => Ok(Jet2::variable_zbar(z0, order)),
        ExprAst::Neg(a) => Ok(eval_jet2(a, z0, order)?.neg()),
        ExprAst::Add(a, b) => eval_jet2(a, z0, order)?.add(&eval_jet2(b, z0, order)?),
        ExprAst::Sub(a, b) => eval_jet2(a, z0, order)?.sub(&eval_jet2(b, z0, order)?),
        ExprAst::Mul(a, b) => eval_jet2(a, z0, order)?.mul(&eval_jet2(b, z0, order)?),
        ExprAst::Div(a, b) => eval_jet2(a, z0, order)?.div(&eval_jet2(b, z0, order)?),
        ExprAst::PowInt(a, k) => eval_jet2(a, z0, order)?.powi(*k),
        ExprAst::Pow(a, b) => {
            let base = eval_jet2(a, z0, order)?;
            let exponent = eval_jet2(b, z0, order)?;
            let log = base.log().map_err(|e| branch_err(a, e))?;
            log.mul(&exponent)?.exp()
        }
        ExprAst::Call(f, a) => {
            let arg = eval_jet2(a, z0, order)?;
            let r = match f {
                Func::Exp => arg.exp(),
                Func::Log => arg.log(),
                Func::Sin => arg.sin(),
                Func::Cos => arg.cos(),
                Func::Sqrt => arg.sqrt(),
            };
            r.map_err(|e| branch_err(a, e))
        }
    }
}

/// Direct scalar evaluation (independent of the jet path). Returns `None`
/// when the value is infinite (a pole of a rational subexpression).
pub fn eval_point(ast: &ExprAst, z: Complex64) -> Result<Option<Complex64>> {
    fn finite(c: Complex64) -> Option<Complex64> {
        if c.re.is_finite() && c.im.is_finite() {
            Some(c)
        } else {
            None
        }
    }
    Ok(match ast {
        ExprAst::Const(c) => Some(*c),
        ExprAst::Z => Some(z),
        ExprAst::Zbar => Some(z.conj()),
        ExprAst::Neg(a) => eval_point(a, z)?.map(|c| -c),
        ExprAst::Add(a, b) => match (eval_point(a, z)?, eval_point(b, z)?) {
            (Some(x), Some(y)) => finite(x + y),
            _ => None,
        },
        ExprAst::Sub(a, b) => match (eval_point(a, z)?, eval_point(b, z)?) {
            (Some(x), Some(y)) => finite(x - y),
            _ => None,
        },
        ExprAst::Mul(a, b) => match (eval_point(a, z)?, eval_point(b, z)?) {
            (Some(x), Some(y)) => finite(x * y),
            _ => None,
        },
        ExprAst::Div(a, b) => match (eval_point(a, z)?, eval_point(b, z)?) {
            (Some(x), Some(y)) => {
                if y == Complex64::new(0.0, 0.0) {
                    None
                } else {
                    finite(x / y)
                }
            }
            _ => None,
        },
        ExprAst::PowInt(a, k) => match eval_point(a, z)? {
            Some(x) => {
                if *k < 0 && x == Complex64::new(0.0, 0.0) {
                    None
                } else {
                    finite(x.powi(*k))
                }
            }
            None => None,
        },
        ExprAst::Pow(a, b) => match (eval_point(a, z)?, eval_point(b, z)?) {
            (Some(x), Some(y)) => {
                if x == Complex64::new(0.0, 0.0) || (x.im == 0.0 && x.re < 0.0) {
                    return Err(Error::Branch {
                        subexpr: serialize(a),
                        reason: "power base at a zero or on the branch-cut ray".into(),
                    });
                }
                finite((y * x.ln()).exp())
            }
            _ => None,
        },
        ExprAst::Call(f, a) => match eval_point(a, z)? {
            Some(x) => match f {
                Func::Exp => finite(x.exp()),
                Func::Sin => finite(x.sin()),
                Func::Cos => finite(x.cos()),
                Func::Log => {
                    if x == Complex64::new(0.0, 0.0) || (x.im == 0.0 && x.re < 0.0) {
                        return Err(Error::Branch {
                            subexpr: serialize(a),
                            reason: "log at a zero or on the branch-cut ray".into(),
                        });
                    }
                    finite(x.ln())
                }
                Func::Sqrt => {
                    if x == Complex64::new(0.0, 0.0) || (x.im == 0.0 && x.re < 0.0) {
                        return Err(Error::Branch {
                            subexpr: serialize(a),
                            reason: "sqrt at a zero or on the branch-cut ray".into(),
                        });
                    }
                    finite(x.sqrt())
                }
            },
            None => None,
        },
    })
}
