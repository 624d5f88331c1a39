//! Canonical rational normal form.
//!
//! An expression is expanded into a quotient of multivariate polynomials over the
//! rationals. Polynomial variables ("atoms") are either named variables or whole
//! transcendental subtrees, which stay opaque: `exp`, `log`, `sin`, `cos` are
//! never rewritten (no `sin^2 + cos^2` collapsing), but their arguments are
//! normalized recursively, so `exp(x + x)` and `exp(2*x)` become the same atom.
//!
//! Monomials are ordered graded-lexicographically (total degree first, then
//! lexicographic in the atom order), which fixes a canonical term order. The
//! quotient is canonicalized by cancelling the common monomial content and
//! scaling the denominator's leading coefficient to one. Two normal forms are
//! structurally comparable; equality of rational expressions is decidable via
//! `num`-zero checks on cross-multiplied differences.

use super::Expr;
use crate::error::{Error, Result};
use crate::scalar::Func;
use crate::Rat;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Polynomial variable: a named variable or an opaque transcendental subtree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Atom {
    Var(String),
    Call(Func, Box<NormalForm>),
}

impl Atom {
    pub fn to_expr(&self) -> Expr {
        match self {
            Atom::Var(v) => Expr::var(v.clone()),
            Atom::Call(f, arg) => Expr::call(*f, arg.to_expr()),
        }
    }

    pub fn is_call(&self) -> bool {
        matches!(self, Atom::Call(..))
    }
}

/// Exponent map; absent atoms have exponent zero. The empty monomial is 1.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Monomial(pub BTreeMap<Atom, u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn of(atom: Atom) -> Self {
        let mut m = BTreeMap::new();
        m.insert(atom, 1);
        Monomial(m)
    }

    pub fn degree(&self) -> u32 {
        self.0.values().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.0.clone();
        for (a, e) in &other.0 {
            *out.entry(a.clone()).or_insert(0) += e;
        }
        Monomial(out)
    }

    fn exponent(&self, atom: &Atom) -> u32 {
        self.0.get(atom).copied().unwrap_or(0)
    }
}

impl Ord for Monomial {
    // graded lex: total degree first, then lexicographic in atom order with the
    // earlier atom's higher exponent winning
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        let mut a = self.0.iter();
        let mut b = other.0.iter();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some((ka, ea)), Some((kb, eb))) => match ka.cmp(kb) {
                    // the smaller atom comes first; owning it means being larger in lex
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => match ea.cmp(eb) {
                        Ordering::Equal => continue,
                        o => return o,
                    },
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Expanded multivariate polynomial with rational coefficients; zero coefficients
/// are never stored.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Poly {
    pub terms: BTreeMap<Monomial, Rat>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn constant(q: Rat) -> Poly {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(Monomial::one(), q);
        }
        Poly { terms }
    }

    pub fn one() -> Poly {
        Poly::constant(Rat::one())
    }

    pub fn atom(a: Atom) -> Poly {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::of(a), Rat::one());
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&Monomial::one())
                .map(|c| c.is_one())
                .unwrap_or(false)
    }

    /// The constant value if the polynomial has degree 0.
    pub fn as_constant(&self) -> Option<Rat> {
        if self.is_zero() {
            return Some(Rat::zero());
        }
        if self.terms.len() == 1 {
            if let Some(c) = self.terms.get(&Monomial::one()) {
                return Some(c.clone());
            }
        }
        None
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.terms.clone();
        for (m, c) in &other.terms {
            let entry = out.entry(m.clone()).or_insert_with(Rat::zero);
            *entry += c.clone();
            if entry.is_zero() {
                out.remove(m);
            }
        }
        Poly { terms: out }
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out: BTreeMap<Monomial, Rat> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                let entry = out.entry(m.clone()).or_insert_with(Rat::zero);
                *entry += ca.clone() * cb.clone();
                if entry.is_zero() {
                    out.remove(&m);
                }
            }
        }
        Poly { terms: out }
    }

    pub fn scale(&self, q: &Rat) -> Poly {
        if q.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.clone() * q.clone())).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn degree_in(&self, atom: &Atom) -> u32 {
        self.terms.keys().map(|m| m.exponent(atom)).max().unwrap_or(0)
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    /// Collects the coefficient of `atom^k` as a polynomial in the other atoms.
    pub fn coeff_of_power(&self, atom: &Atom, k: u32) -> Poly {
        let mut out: BTreeMap<Monomial, Rat> = BTreeMap::new();
        for (m, c) in &self.terms {
            if m.exponent(atom) == k {
                let mut reduced = m.0.clone();
                reduced.remove(atom);
                out.insert(Monomial(reduced), c.clone());
            }
        }
        Poly { terms: out }
    }

    /// True when any atom, at any nesting depth, is a transcendental call.
    pub fn has_call_atoms(&self) -> bool {
        self.terms.keys().any(|m| m.0.keys().any(|a| a.is_call()))
    }

    /// Substitutes exact values for some atoms; untouched atoms remain symbolic.
    pub fn substitute_values(&self, vals: &BTreeMap<Atom, Rat>) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut rest = BTreeMap::new();
            for (a, e) in &m.0 {
                if let Some(v) = vals.get(a) {
                    for _ in 0..*e {
                        coeff *= v.clone();
                    }
                } else {
                    rest.insert(a.clone(), *e);
                }
            }
            if !coeff.is_zero() {
                out = out.add(&Poly {
                    terms: [(Monomial(rest), coeff)].into_iter().collect(),
                });
            }
        }
        out
    }

    /// Reads a polynomial of total degree <= 1 as (constant, linear coefficients).
    pub fn as_linear(&self) -> Option<(Rat, BTreeMap<Atom, Rat>)> {
        let mut constant = Rat::zero();
        let mut linear = BTreeMap::new();
        for (m, c) in &self.terms {
            match m.degree() {
                0 => constant = c.clone(),
                1 => {
                    let atom = m.0.keys().next().unwrap().clone();
                    linear.insert(atom, c.clone());
                }
                _ => return None,
            }
        }
        Some((constant, linear))
    }

    pub fn to_expr(&self) -> Expr {
        if self.is_zero() {
            return Expr::zero();
        }
        let mut out = Expr::zero();
        // descending order renders the leading term first
        for (m, c) in self.terms.iter().rev() {
            let mut term = Expr::rational(c.clone());
            for (a, e) in &m.0 {
                term = term * a.to_expr().pow(*e as i32);
            }
            out = out + term;
        }
        out
    }

    fn leading(&self) -> Option<(&Monomial, &Rat)> {
        self.terms.iter().next_back()
    }

    /// Per-atom minimum exponent over all terms (the monomial content).
    fn content(&self) -> BTreeMap<Atom, u32> {
        let mut content: Option<BTreeMap<Atom, u32>> = None;
        for m in self.terms.keys() {
            content = Some(match content {
                None => m.0.clone(),
                Some(prev) => {
                    let mut next = BTreeMap::new();
                    for (a, e) in prev {
                        let here = m.exponent(&a);
                        let min = e.min(here);
                        if min > 0 {
                            next.insert(a, min);
                        }
                    }
                    next
                }
            });
        }
        content.unwrap_or_default()
    }

    fn divide_content(&self, content: &BTreeMap<Atom, u32>) -> Poly {
        if content.is_empty() {
            return self.clone();
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut reduced = m.0.clone();
                for (a, e) in content {
                    let cur = reduced.get(a).copied().unwrap_or(0);
                    debug_assert!(cur >= *e);
                    if cur == *e {
                        reduced.remove(a);
                    } else {
                        reduced.insert(a.clone(), cur - e);
                    }
                }
                (Monomial(reduced), c.clone())
            })
            .collect();
        Poly { terms }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr())
    }
}

/// Canonical quotient of polynomials; the denominator is nonzero, shares no
/// monomial content with the numerator, and has leading coefficient one.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct NormalForm {
    pub num: Poly,
    pub den: Poly,
}

impl NormalForm {
    pub fn from_poly(p: Poly) -> NormalForm {
        NormalForm { num: p, den: Poly::one() }.canonical()
    }

    fn canonical(mut self) -> NormalForm {
        if self.num.is_zero() {
            return NormalForm { num: Poly::zero(), den: Poly::one() };
        }
        let mut joint: BTreeMap<Atom, u32> = BTreeMap::new();
        let cn = self.num.content();
        let cd = self.den.content();
        for (a, e) in &cn {
            if let Some(e2) = cd.get(a) {
                joint.insert(a.clone(), *e.min(e2));
            }
        }
        self.num = self.num.divide_content(&joint);
        self.den = self.den.divide_content(&joint);
        let lead = self.den.leading().map(|(_, c)| c.clone()).unwrap();
        let inv = lead.recip();
        NormalForm {
            num: self.num.scale(&inv),
            den: self.den.scale(&inv),
        }
    }

    pub fn add(&self, other: &NormalForm) -> NormalForm {
        NormalForm {
            num: self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            den: self.den.mul(&other.den),
        }
        .canonical()
    }

    pub fn sub(&self, other: &NormalForm) -> NormalForm {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> NormalForm {
        NormalForm { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn mul(&self, other: &NormalForm) -> NormalForm {
        NormalForm {
            num: self.num.mul(&other.num),
            den: self.den.mul(&other.den),
        }
        .canonical()
    }

    pub fn div(&self, other: &NormalForm, at: &Expr) -> Result<NormalForm> {
        if other.num.is_zero() {
            return Err(Error::ZeroDenominator(at.to_string()));
        }
        Ok(NormalForm {
            num: self.num.mul(&other.den),
            den: self.den.mul(&other.num),
        }
        .canonical())
    }

    pub fn pow(&self, n: i32, at: &Expr) -> Result<NormalForm> {
        if n >= 0 {
            Ok(NormalForm {
                num: self.num.pow(n as u32),
                den: self.den.pow(n as u32),
            }
            .canonical())
        } else {
            if self.num.is_zero() {
                return Err(Error::ZeroDenominator(at.to_string()));
            }
            Ok(NormalForm {
                num: self.den.pow((-n) as u32),
                den: self.num.pow((-n) as u32),
            }
            .canonical())
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn to_expr(&self) -> Expr {
        if self.den.is_one() {
            self.num.to_expr()
        } else {
            self.num.to_expr() / self.den.to_expr()
        }
    }

    pub fn has_call_atoms(&self) -> bool {
        self.num.has_call_atoms() || self.den.has_call_atoms()
    }
}

/// Expands an expression into its canonical normal form. Fails only when a
/// denominator is identically zero.
pub fn normalize(e: &Expr) -> Result<NormalForm> {
    match e {
        Expr::Const(q) => Ok(NormalForm::from_poly(Poly::constant(q.clone()))),
        Expr::Var(v) => Ok(NormalForm::from_poly(Poly::atom(Atom::Var(v.clone())))),
        Expr::Neg(a) => Ok(normalize(a)?.neg()),
        Expr::Add(a, b) => Ok(normalize(a)?.add(&normalize(b)?)),
        Expr::Sub(a, b) => Ok(normalize(a)?.sub(&normalize(b)?)),
        Expr::Mul(a, b) => Ok(normalize(a)?.mul(&normalize(b)?)),
        Expr::Div(a, b) => normalize(a)?.div(&normalize(b)?, e),
        Expr::Pow(a, n) => normalize(a)?.pow(*n, e),
        Expr::Call(f, a) => {
            let arg = normalize(a)?;
            Ok(NormalForm::from_poly(Poly::atom(Atom::Call(*f, Box::new(arg)))))
        }
    }
}

/// Convenience: canonical expanded rendering of an expression.
pub fn canonical_expr(e: &Expr) -> Result<Expr> {
    Ok(normalize(e)?.to_expr())
}

pub fn leading_coefficient_positive(p: &Poly) -> bool {
    p.leading().map(|(_, c)| c.is_positive()).unwrap_or(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;
    use crate::symexpr::parse;

    fn nf(s: &str, vars: &[&str]) -> NormalForm {
        normalize(&parse(s, vars).unwrap()).unwrap()
    }

    #[test]
    fn binomial_square_normal_form() {
        let a = nf("(x + y)^2", &["x", "y"]);
        let b = nf("x^2 + 2*x*y + y^2", &["x", "y"]);
        assert_eq!(a, b);
    }

    #[test]
    fn idempotent() {
        let a = nf("(x - 1)*(x + 1)/(y*y)", &["x", "y"]);
        let again = normalize(&a.to_expr()).unwrap();
        assert_eq!(a, again);
    }

    #[test]
    fn quotient_cancels_monomial_content() {
        // x2 / (x2)^2 -> 1 / x2
        let a = nf("x2/(x2*x2)", &["x2"]);
        assert_eq!(a.to_expr().to_string(), "1/x2");
    }

    #[test]
    fn transcendental_atoms_merge_on_equal_arguments() {
        let a = nf("exp(x + x) - exp(2*x)", &["x"]);
        assert!(a.is_zero());
        let b = nf("sin(x)^2 + cos(x)^2", &["x"]);
        assert!(!b.is_zero(), "no trigonometric identities are applied");
    }

    #[test]
    fn zero_denominator_detected() {
        let e = parse("1/(x - x)", &["x"]).unwrap();
        assert!(matches!(normalize(&e), Err(crate::Error::ZeroDenominator(_))));
    }

    #[test]
    fn graded_lex_order() {
        let x = Monomial::of(Atom::Var("x".into()));
        let y = Monomial::of(Atom::Var("y".into()));
        let x2 = x.mul(&x);
        let xy = x.mul(&y);
        assert!(x2 > xy, "x^2 > x*y in lex with x before y");
        assert!(xy > y.mul(&y));
        assert!(x2 > y, "degree dominates");
    }

    #[test]
    fn linear_reading() {
        let p = nf("3*x + 2*y - 7/2", &["x", "y"]).num;
        let (c, lin) = p.as_linear().unwrap();
        assert_eq!(c, rat(-7, 2));
        assert_eq!(lin[&Atom::Var("x".into())], rat(3, 1));
        assert_eq!(lin[&Atom::Var("y".into())], rat(2, 1));
        let q = nf("x*y", &["x", "y"]).num;
        assert!(q.as_linear().is_none());
    }
}
