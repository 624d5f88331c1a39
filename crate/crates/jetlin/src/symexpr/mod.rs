//! Exact symbolic expression kernel.
//!
//! Expression trees carry arbitrary-precision rational constants, named variables,
//! field operations, integer powers, and the four primitives `exp`, `log`, `sin`,
//! `cos`. The kernel supplies exact differentiation, evaluation over any
//! [`Scalar`](crate::scalar::Scalar), substitution, a canonical rational normal
//! form ([`poly`]), and a zero test with a seeded sampling fallback ([`zero`]).
//!
//! Text syntax (both for [`parse`] and for `Display`):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | power
//! power  := atom ('^' ['-'] INTEGER)*
//! atom   := INTEGER | IDENT | IDENT '(' expr ')' | '(' expr ')'
//! ```
//!
//! Identifiers match `[a-zA-Z][a-zA-Z0-9]*`; `exp`, `log`, `sin`, `cos` are the
//! only function names. Integers are unbounded. Rational literals are written
//! `p/q` and fold exactly (division of constants). There are no decimal
//! literals; write `3/10`, not `0.3`. Exponents are integer literals, possibly
//! negative (`x^-2`); a chain `x^2^3` associates as `(x^2)^3`. Unary minus binds
//! looser than `^`, so `-2^2 = -(2^2)`.

pub mod parse;
pub mod poly;
pub mod zero;

pub use parse::parse;
pub use poly::{normalize, Atom, Monomial, NormalForm, Poly};
pub use zero::{is_zero, is_zero_with, Verdict, ZeroConfig};

use crate::error::{Error, Result};
use crate::scalar::{powi, Func, Scalar};
use crate::Rat;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeSet, HashMap};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Const(Rat),
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn int(n: i64) -> Expr {
        Expr::Const(Rat::from_integer(n.into()))
    }

    pub fn rational(q: Rat) -> Expr {
        Expr::Const(q)
    }

    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn is_zero_const(&self) -> bool {
        matches!(self, Expr::Const(q) if q.is_zero())
    }

    pub fn is_one_const(&self) -> bool {
        matches!(self, Expr::Const(q) if q.is_one())
    }

    /// Integer power with light folding; `e^0 = 1`, `e^1 = e`.
    pub fn pow(self, n: i32) -> Expr {
        match (&self, n) {
            (_, 0) => Expr::one(),
            (_, 1) => self,
            (Expr::Const(q), _) if !q.is_zero() || n > 0 => {
                let mut acc = Rat::one();
                for _ in 0..n.unsigned_abs() {
                    acc *= q.clone();
                }
                if n < 0 {
                    Expr::Const(acc.recip())
                } else {
                    Expr::Const(acc)
                }
            }
            _ => Expr::Pow(Box::new(self), n),
        }
    }

    pub fn call(f: Func, arg: Expr) -> Expr {
        Expr::Call(f, Box::new(arg))
    }

    /// Free variables, sorted.
    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(v) => {
                out.insert(v.clone());
            }
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.collect_vars(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Exact partial derivative with respect to `var`.
    pub fn diff(&self, var: &str) -> Expr {
        match self {
            Expr::Const(_) => Expr::zero(),
            Expr::Var(v) => {
                if v == var {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Expr::Neg(a) => -a.diff(var),
            Expr::Add(a, b) => a.diff(var) + b.diff(var),
            Expr::Sub(a, b) => a.diff(var) - b.diff(var),
            Expr::Mul(a, b) => a.diff(var) * (**b).clone() + (**a).clone() * b.diff(var),
            Expr::Div(a, b) => {
                (a.diff(var) * (**b).clone() - (**a).clone() * b.diff(var))
                    / (**b).clone().pow(2)
            }
            Expr::Pow(a, n) => {
                Expr::int(*n as i64) * (**a).clone().pow(n - 1) * a.diff(var)
            }
            Expr::Call(f, a) => {
                let outer = match f {
                    Func::Exp => Expr::call(Func::Exp, (**a).clone()),
                    Func::Log => Expr::one() / (**a).clone(),
                    Func::Sin => Expr::call(Func::Cos, (**a).clone()),
                    Func::Cos => -Expr::call(Func::Sin, (**a).clone()),
                };
                outer * a.diff(var)
            }
        }
    }

    /// Iterated partial derivative: `orders` pairs of (variable, count).
    pub fn diff_many(&self, orders: &[(&str, usize)]) -> Expr {
        let mut e = self.clone();
        for (v, n) in orders {
            for _ in 0..*n {
                e = e.diff(v);
            }
        }
        e
    }

    /// Evaluates over any scalar lane. Exact on rationals when the expression is
    /// rational; transcendental primitives refuse the exact lane.
    pub fn eval<T: Scalar>(&self, env: &HashMap<String, T>) -> Result<T> {
        let v = self.eval_inner(env)?;
        if !v.is_finite_scalar() {
            return Err(Error::Singular {
                subexpr: self.to_string(),
                message: "non-finite value".into(),
            });
        }
        Ok(v)
    }

    fn eval_inner<T: Scalar>(&self, env: &HashMap<String, T>) -> Result<T> {
        match self {
            Expr::Const(q) => Ok(T::from_rational(q)),
            Expr::Var(v) => env.get(v).cloned().ok_or_else(|| Error::Invalid(format!(
                "unbound variable `{v}` in evaluation"
            ))),
            Expr::Neg(a) => Ok(-a.eval_inner(env)?),
            Expr::Add(a, b) => Ok(a.eval_inner(env)? + b.eval_inner(env)?),
            Expr::Sub(a, b) => Ok(a.eval_inner(env)? - b.eval_inner(env)?),
            Expr::Mul(a, b) => Ok(a.eval_inner(env)? * b.eval_inner(env)?),
            Expr::Div(a, b) => {
                let den = b.eval_inner(env)?;
                if den.is_zero() {
                    return Err(Error::Singular {
                        subexpr: self.to_string(),
                        message: "division by zero".into(),
                    });
                }
                Ok(a.eval_inner(env)? / den)
            }
            Expr::Pow(a, n) => {
                let base = a.eval_inner(env)?;
                powi(&base, *n).ok_or_else(|| Error::Singular {
                    subexpr: self.to_string(),
                    message: "zero base with negative exponent".into(),
                })
            }
            Expr::Call(f, a) => {
                let x = a.eval_inner(env)?;
                T::call(*f, &x).ok_or_else(|| {
                    if T::EXACT {
                        Error::NonRational {
                            subexpr: self.to_string(),
                        }
                    } else {
                        Error::Singular {
                            subexpr: self.to_string(),
                            message: format!("{} outside domain", f.name()),
                        }
                    }
                })
            }
        }
    }

    /// Replaces variables by expressions, simultaneously.
    pub fn substitute(&self, map: &HashMap<String, Expr>) -> Expr {
        match self {
            Expr::Const(_) => self.clone(),
            Expr::Var(v) => map.get(v).cloned().unwrap_or_else(|| self.clone()),
            Expr::Neg(a) => -a.substitute(map),
            Expr::Add(a, b) => a.substitute(map) + b.substitute(map),
            Expr::Sub(a, b) => a.substitute(map) - b.substitute(map),
            Expr::Mul(a, b) => a.substitute(map) * b.substitute(map),
            Expr::Div(a, b) => a.substitute(map) / b.substitute(map),
            Expr::Pow(a, n) => a.substitute(map).pow(*n),
            Expr::Call(f, a) => Expr::call(*f, a.substitute(map)),
        }
    }

    /// Renames variables, simultaneously.
    pub fn rename(&self, renames: &HashMap<String, String>) -> Expr {
        let m: HashMap<String, Expr> =
            renames.iter().map(|(k, v)| (k.clone(), Expr::var(v))).collect();
        self.substitute(&m)
    }

    fn prec(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) | Expr::Neg(..) => 1,
            Expr::Const(q) if q.is_negative() => 1,
            Expr::Const(q) if !q.denom().is_one() => 2,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Pow(..) => 3,
            _ => 4,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.prec() < min {
            write!(f, "(")?;
            self.fmt_prec(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Expr::Const(q) => {
                if q.denom().is_one() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Neg(a) => {
                write!(f, "-")?;
                a.fmt_prec(f, 2)
            }
            Expr::Add(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " + ")?;
                b.fmt_prec(f, 2)
            }
            Expr::Sub(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " - ")?;
                b.fmt_prec(f, 2)
            }
            Expr::Mul(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, "*")?;
                b.fmt_prec(f, 3)
            }
            Expr::Div(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, "/")?;
                b.fmt_prec(f, 3)
            }
            Expr::Pow(a, n) => {
                a.fmt_prec(f, 4)?;
                write!(f, "^{n}")
            }
            Expr::Call(func, a) => {
                write!(f, "{}(", func.name())?;
                a.fmt_prec(f, 0)?;
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

// Operator overloads fold neutral elements and constants so derivative trees stay
// reasonably small without a full simplifier.

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        match (&self, &rhs) {
            (a, _) if a.is_zero_const() => rhs,
            (_, b) if b.is_zero_const() => self,
            (Expr::Const(a), Expr::Const(b)) => Expr::Const(a + b),
            _ => Expr::Add(Box::new(self), Box::new(rhs)),
        }
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        match (&self, &rhs) {
            (_, b) if b.is_zero_const() => self,
            (a, _) if a.is_zero_const() => -rhs,
            (Expr::Const(a), Expr::Const(b)) => Expr::Const(a - b),
            _ => Expr::Sub(Box::new(self), Box::new(rhs)),
        }
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        match (&self, &rhs) {
            (a, _) if a.is_zero_const() => Expr::zero(),
            (_, b) if b.is_zero_const() => Expr::zero(),
            (a, _) if a.is_one_const() => rhs,
            (_, b) if b.is_one_const() => self,
            (Expr::Const(a), _) if (-a).is_one() => -rhs,
            (_, Expr::Const(b)) if (-b).is_one() => -self,
            (Expr::Const(a), Expr::Const(b)) => Expr::Const(a * b),
            _ => Expr::Mul(Box::new(self), Box::new(rhs)),
        }
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        match (&self, &rhs) {
            (_, b) if b.is_one_const() => self,
            (Expr::Const(a), Expr::Const(b)) if !b.is_zero() => Expr::Const(a / b),
            (a, b) if a.is_zero_const() && !b.is_zero_const() => Expr::zero(),
            _ => Expr::Div(Box::new(self), Box::new(rhs)),
        }
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        match self {
            Expr::Const(q) => Expr::Const(-q),
            Expr::Neg(a) => *a,
            other => Expr::Neg(Box::new(other)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn env64(pairs: &[(&str, f64)]) -> HashMap<String, f64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    fn envq(pairs: &[(&str, Rat)]) -> HashMap<String, Rat> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    #[test]
    fn eval_exact_rational() {
        // (3*x + 1/2)^2 / y at x=2/3, y=5: hand-expanded: (2 + 1/2)^2 / 5 = 25/4/5 = 5/4
        let e = (Expr::int(3) * Expr::var("x") + Expr::rational(rat(1, 2)))
            .pow(2)
            / Expr::var("y");
        let v = e
            .eval(&envq(&[("x", rat(2, 3)), ("y", rat(5, 1))]))
            .unwrap();
        assert_eq!(v, rat(5, 4));
    }

    #[test]
    fn eval_degree_five_hand_expanded() {
        // q(x,y) = x^5 - 2*x^3*y + 7*y^2 - 1/3
        let q = Expr::var("x").pow(5) - Expr::int(2) * Expr::var("x").pow(3) * Expr::var("y")
            + Expr::int(7) * Expr::var("y").pow(2)
            - Expr::rational(rat(1, 3));
        // at (1, 1): 1 - 2 + 7 - 1/3 = 17/3
        assert_eq!(q.eval(&envq(&[("x", rat(1, 1)), ("y", rat(1, 1))])).unwrap(), rat(17, 3));
        // at (2, -1/2): 32 - 2*8*(-1/2) + 7/4 - 1/3 = 32 + 8 + 7/4 - 1/3 = 497/12
        assert_eq!(
            q.eval(&envq(&[("x", rat(2, 1)), ("y", rat(-1, 2))])).unwrap(),
            rat(497, 12)
        );
        // at (-1/3, 3): -1/243 + 2/9 + 63 - 1/3 = (-1 + 54 + 15309 - 81)/243 = 15281/243
        assert_eq!(
            q.eval(&envq(&[("x", rat(-1, 3)), ("y", rat(3, 1))])).unwrap(),
            rat(15281, 243)
        );
    }

    #[test]
    fn transcendental_refused_on_exact_lane() {
        let e = Expr::call(Func::Exp, Expr::var("x"));
        let err = e.eval(&envq(&[("x", rat(0, 1))])).unwrap_err();
        assert!(matches!(err, Error::NonRational { .. }));
        let v = e.eval(&env64(&[("x", 0.0)])).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn division_by_zero_reports_subexpression() {
        let e = Expr::one() / (Expr::var("x") - Expr::int(2));
        let err = e.eval(&envq(&[("x", rat(2, 1))])).unwrap_err();
        match err {
            Error::Singular { subexpr, .. } => assert!(subexpr.contains("x - 2")),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn diff_matches_finite_differences() {
        // d/dx of x^3*y - sin(x) at several points, 5-point stencil, rel tol 1e-6
        let e = Expr::var("x").pow(3) * Expr::var("y") - Expr::call(Func::Sin, Expr::var("x"));
        let d = e.diff("x");
        let h = 1e-4;
        for (x, y) in [(0.7, 1.3), (-1.2, 0.4), (2.1, -0.9)] {
            let f = |xx: f64| e.eval(&env64(&[("x", xx), ("y", y)])).unwrap();
            let fd = (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h))
                / (12.0 * h);
            let ex = d.eval(&env64(&[("x", x), ("y", y)])).unwrap();
            assert!((fd - ex).abs() <= 1e-6 * ex.abs().max(1.0), "{fd} vs {ex}");
        }
    }

    #[test]
    fn diff_quotient_and_log() {
        // d/dx log(x/y) = 1/x
        let e = Expr::call(Func::Log, Expr::var("x") / Expr::var("y"));
        let d = e.diff("x");
        let v = d.eval(&env64(&[("x", 2.0), ("y", 7.0)])).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
    }

    #[test]
    fn render_round_trips_through_parser() {
        let cases = [
            Expr::var("x") - (Expr::var("y") - Expr::int(1)),
            (Expr::int(-2)).pow(2) * Expr::var("x"),
            Expr::rational(rat(3, 4)).pow(2) + Expr::var("x").pow(-2),
            -(Expr::var("x") * Expr::var("y")) + Expr::call(Func::Exp, Expr::var("x")),
        ];
        for e in cases {
            let text = e.to_string();
            let back = parse(&text, &["x", "y"]).unwrap();
            let diffp = normalize(&(e.clone() - back)).unwrap();
            assert!(diffp.num.is_zero(), "round trip changed value of {text}");
        }
    }
}
