//! Jet coordinates for plane ODEs cubic in the first derivative.
//!
//! An equation y'' = u0(x) + u1(x) q + u2(x) q^2 + u3(x) q^3 (q = y', x the
//! base point in the plane) is a section of a rank-4 bundle over the plane: the
//! four coefficient functions u0..u3. Its k-jet at a point collects the base
//! point together with all partial derivatives of the four coefficients up to
//! order k. Multi-indices are pairs (r1, r2) counting derivatives in the two
//! base directions; a k-jet has 4 * (k+1)(k+2)/2 fiber coordinates.
//!
//! Jet coordinates get stable textual names (`u2d112` is the coefficient u2
//! differentiated once along x1 and twice along x2, digits sorted), which is
//! how linear systems over jet variables and the JSON interchange format refer
//! to them.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::{expr_series, factorial, multi_indices, tri_idx, tri_len, Series2};
use crate::symexpr::{self, Expr};
use crate::Rat;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::str::FromStr;

/// Fiber dimension of the k-jet bundle: four coefficients, each with all
/// partials of order <= k.
pub fn fiber_dim(order: usize) -> usize {
    4 * tri_len(order)
}

/// Dimension of the k-jet space itself (two base coordinates plus the fiber).
pub fn total_dim(order: usize) -> usize {
    2 + fiber_dim(order)
}

/// Canonical digit string of a multi-index: r1 ones then r2 twos ("" at order 0).
pub fn sigma_digits(r1: usize, r2: usize) -> String {
    let mut s = String::with_capacity(r1 + r2);
    for _ in 0..r1 {
        s.push('1');
    }
    for _ in 0..r2 {
        s.push('2');
    }
    s
}

/// Reads a digit string back into (r1, r2); digit order is not significant.
pub fn parse_sigma(digits: &str) -> Option<(usize, usize)> {
    let mut r1 = 0;
    let mut r2 = 0;
    for c in digits.chars() {
        match c {
            '1' => r1 += 1,
            '2' => r2 += 1,
            _ => return None,
        }
    }
    Some((r1, r2))
}

/// Name of the jet coordinate for coefficient i differentiated by (r1, r2).
pub fn u_var_name(i: usize, r1: usize, r2: usize) -> String {
    debug_assert!(i < 4);
    if r1 + r2 == 0 {
        format!("u{i}")
    } else {
        format!("u{i}d{}", sigma_digits(r1, r2))
    }
}

/// Name of a plane-map component jet variable (i is 1 or 2).
pub fn x_var_name(i: usize, r1: usize, r2: usize) -> String {
    debug_assert!(i == 1 || i == 2);
    if r1 + r2 == 0 {
        format!("X{i}")
    } else {
        format!("X{i}d{}", sigma_digits(r1, r2))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JetVarKind {
    /// Equation coefficient derivative u{i}d{...}.
    U,
    /// Plane-map component derivative X{i}d{...}.
    X,
}

/// Splits a jet variable name into kind, component index and multi-index.
pub fn parse_jet_var(name: &str) -> Option<(JetVarKind, usize, usize, usize)> {
    let mut chars = name.chars();
    let kind = match chars.next()? {
        'u' => JetVarKind::U,
        'X' => JetVarKind::X,
        _ => return None,
    };
    let i = chars.next()?.to_digit(10)? as usize;
    match kind {
        JetVarKind::U if i > 3 => return None,
        JetVarKind::X if !(1..=2).contains(&i) => return None,
        _ => {}
    }
    let rest: String = chars.collect();
    let (r1, r2) = if rest.is_empty() {
        (0, 0)
    } else {
        let digits = rest.strip_prefix('d')?;
        if digits.is_empty() {
            return None;
        }
        parse_sigma(digits)?
    };
    Some((kind, i, r1, r2))
}

/// An equation cubic in the first derivative, presented by its four
/// coefficient functions of the base coordinates x1, x2.
#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub u: [Expr; 4],
}

impl Section {
    pub fn new(u: [Expr; 4]) -> Result<Section> {
        for e in &u {
            for v in e.vars() {
                if v != "x1" && v != "x2" {
                    return Err(Error::Invalid(format!(
                        "coefficient depends on unknown variable {v}"
                    )));
                }
            }
        }
        Ok(Section { u })
    }

    pub fn zero() -> Section {
        Section { u: [Expr::zero(), Expr::zero(), Expr::zero(), Expr::zero()] }
    }

    /// The k-jet at a base point: all coefficient partials up to order k.
    pub fn jet_at<T: Scalar>(&self, base: &[T; 2], order: usize) -> Result<JetPoint<T>> {
        let mut jet = JetPoint::zero(order, base.clone());
        for i in 0..4 {
            let series = expr_series(&self.u[i], base, order)?;
            for (r1, r2) in multi_indices(order) {
                jet.set(i, r1, r2, series.derivative_value(r1, r2));
            }
        }
        Ok(jet)
    }

    /// True when every coefficient is rational in x1, x2 (no transcendental
    /// calls), so exact jets exist at rational base points.
    pub fn is_rational(&self) -> bool {
        fn calls(e: &Expr) -> bool {
            match e {
                Expr::Call(..) => true,
                Expr::Const(_) | Expr::Var(_) => false,
                Expr::Neg(a) => calls(a),
                Expr::Pow(a, _) => calls(a),
                Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                    calls(a) || calls(b)
                }
            }
        }
        !self.u.iter().any(calls)
    }
}

/// Parses the right-hand side of y'' = rhs(x, y, p), p standing for y', and
/// splits it into the four coefficient functions. The denominator must not
/// involve p (after cancelling common monomial factors) and the numerator must
/// have degree at most 3 in p.
pub fn rhs_to_section(text: &str) -> Result<Section> {
    let raw = symexpr::parse(text, &["x", "y", "p"])?;
    let renames: HashMap<String, String> =
        [("x".to_string(), "x1".to_string()), ("y".to_string(), "x2".to_string())]
            .into_iter()
            .collect();
    let e = raw.rename(&renames);
    let nf = symexpr::normalize(&e)?;
    let p = symexpr::Atom::Var("p".into());
    if nf.den.degree_in(&p) > 0 {
        return Err(Error::NotCubic(format!(
            "denominator involves the first derivative: {}",
            nf.den
        )));
    }
    let deg = nf.num.degree_in(&p);
    if deg > 3 {
        return Err(Error::NotCubic(format!("degree {deg} in the first derivative")));
    }
    let den = nf.den.to_expr();
    let den_is_one = nf.den.is_one();
    let mut u: [Expr; 4] = [Expr::zero(), Expr::zero(), Expr::zero(), Expr::zero()];
    for (beta, slot) in u.iter_mut().enumerate() {
        let c = nf.num.coeff_of_power(&p, beta as u32);
        if c.is_zero() {
            continue;
        }
        *slot = if den_is_one { c.to_expr() } else { c.to_expr() / den.clone() };
    }
    Section::new(u)
}

/// A k-jet of a section: base point plus all coefficient partials up to
/// order k, stored per coefficient in triangular layout.
#[derive(Debug, Clone, PartialEq)]
pub struct JetPoint<T> {
    pub order: usize,
    pub base: [T; 2],
    coords: Vec<T>,
}

impl<T: Scalar> JetPoint<T> {
    pub fn zero(order: usize, base: [T; 2]) -> Self {
        JetPoint { order, base, coords: vec![T::zero(); fiber_dim(order)] }
    }

    fn idx(&self, i: usize, r1: usize, r2: usize) -> usize {
        debug_assert!(i < 4 && r1 + r2 <= self.order);
        i * tri_len(self.order) + tri_idx(r1, r2)
    }

    pub fn get(&self, i: usize, r1: usize, r2: usize) -> &T {
        &self.coords[self.idx(i, r1, r2)]
    }

    pub fn set(&mut self, i: usize, r1: usize, r2: usize, v: T) {
        let idx = self.idx(i, r1, r2);
        self.coords[idx] = v;
    }

    pub fn require_order(&self, need: usize) -> Result<()> {
        if self.order < need {
            return Err(Error::Order { need, got: self.order });
        }
        Ok(())
    }

    /// Forgets derivatives above the given order.
    pub fn project(&self, order: usize) -> Self {
        assert!(order <= self.order);
        let mut out = Self::zero(order, self.base.clone());
        for i in 0..4 {
            for (r1, r2) in multi_indices(order) {
                out.set(i, r1, r2, self.get(i, r1, r2).clone());
            }
        }
        out
    }

    /// The Taylor series (monomial coefficients) of coefficient i encoded by
    /// this jet, as a series in the displacement from the base point.
    pub fn coefficient_series(&self, i: usize) -> Series2<T> {
        Series2::from_derivatives(self.order, |r1, r2| self.get(i, r1, r2).clone())
    }

    /// Substitution environment mapping jet variable names to values.
    pub fn env(&self) -> HashMap<String, T> {
        let mut env = HashMap::new();
        for i in 0..4 {
            for (r1, r2) in multi_indices(self.order) {
                env.insert(u_var_name(i, r1, r2), self.get(i, r1, r2).clone());
            }
        }
        env
    }

    pub fn approx(&self) -> JetPoint<f64> {
        JetPoint {
            order: self.order,
            base: [self.base[0].approx(), self.base[1].approx()],
            coords: self.coords.iter().map(|c| c.approx()).collect(),
        }
    }
}

impl JetPoint<Rat> {
    /// The polynomial section whose k-jet at the base point is exactly this
    /// jet: each coefficient is its own truncated Taylor polynomial.
    pub fn representative_section(&self) -> Section {
        let h1 = Expr::var("x1") - Expr::rational(self.base[0].clone());
        let h2 = Expr::var("x2") - Expr::rational(self.base[1].clone());
        let mut u: [Expr; 4] = [Expr::zero(), Expr::zero(), Expr::zero(), Expr::zero()];
        for (i, slot) in u.iter_mut().enumerate() {
            let mut acc = Expr::zero();
            for (r1, r2) in multi_indices(self.order) {
                let v = self.get(i, r1, r2);
                if v.is_zero() {
                    continue;
                }
                let c = v / (factorial::<Rat>(r1) * factorial::<Rat>(r2));
                acc = acc
                    + Expr::rational(c) * h1.clone().pow(r1 as i32) * h2.clone().pow(r2 as i32);
            }
            *slot = acc;
        }
        Section { u }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let mut coords = Vec::new();
        for i in 0..4 {
            for (r1, r2) in multi_indices(self.order) {
                let v = self.get(i, r1, r2);
                if v.is_zero() {
                    continue;
                }
                coords.push(CoordRepr {
                    i,
                    sigma: sigma_digits(r1, r2),
                    value: v.to_string(),
                });
            }
        }
        let repr = JetPointRepr {
            order: self.order,
            base: [self.base[0].to_string(), self.base[1].to_string()],
            coords,
        };
        serde_json::to_value(repr).expect("jet serialization cannot fail")
    }

    pub fn to_json_string(&self) -> String {
        self.to_json_value().to_string()
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<Self> {
        let repr: JetPointRepr = serde_json::from_value(v.clone())?;
        let base = [parse_rat(&repr.base[0])?, parse_rat(&repr.base[1])?];
        let mut jet = JetPoint::zero(repr.order, base);
        for c in &repr.coords {
            if c.i >= 4 {
                return Err(Error::Invalid(format!("coefficient index {} out of range", c.i)));
            }
            let (r1, r2) = parse_sigma(&c.sigma)
                .ok_or_else(|| Error::Invalid(format!("bad multi-index {:?}", c.sigma)))?;
            if r1 + r2 > repr.order {
                return Err(Error::Order { need: r1 + r2, got: repr.order });
            }
            jet.set(c.i, r1, r2, parse_rat(&c.value)?);
        }
        Ok(jet)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Self::from_json_value(&serde_json::from_str(s)?)
    }
}

/// Multi-indexed coordinates are serialized sparsely: absent entries are zero.
#[derive(Serialize, Deserialize)]
struct JetPointRepr {
    order: usize,
    base: [String; 2],
    coords: Vec<CoordRepr>,
}

#[derive(Serialize, Deserialize)]
struct CoordRepr {
    i: usize,
    sigma: String,
    value: String,
}

pub(crate) fn parse_rat(s: &str) -> Result<Rat> {
    Rat::from_str(s.trim())
        .map_err(|e| Error::Invalid(format!("bad rational {s:?}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rat, rat_int};

    #[test]
    fn dimensions() {
        assert_eq!(fiber_dim(0), 4);
        assert_eq!(fiber_dim(1), 12);
        assert_eq!(fiber_dim(2), 24);
        assert_eq!(total_dim(2), 26);
        assert_eq!(total_dim(3), 42);
    }

    #[test]
    fn coordinate_names() {
        assert_eq!(u_var_name(0, 0, 0), "u0");
        assert_eq!(u_var_name(2, 1, 2), "u2d122");
        assert_eq!(u_var_name(3, 2, 0), "u3d11");
        assert_eq!(x_var_name(1, 0, 0), "X1");
        assert_eq!(x_var_name(2, 2, 1), "X2d112");
        assert_eq!(parse_sigma("112"), Some((2, 1)));
        assert_eq!(parse_sigma(""), Some((0, 0)));
        assert_eq!(parse_sigma("3"), None);
    }

    #[test]
    fn jet_var_names_round_trip() {
        assert_eq!(parse_jet_var("u0"), Some((JetVarKind::U, 0, 0, 0)));
        assert_eq!(parse_jet_var("u3d122"), Some((JetVarKind::U, 3, 1, 2)));
        assert_eq!(parse_jet_var("X2d11"), Some((JetVarKind::X, 2, 2, 0)));
        assert_eq!(parse_jet_var("X1"), Some((JetVarKind::X, 1, 0, 0)));
        assert_eq!(parse_jet_var("u4"), None);
        assert_eq!(parse_jet_var("X3"), None);
        assert_eq!(parse_jet_var("X1d"), None);
        assert_eq!(parse_jet_var("x1"), None);
    }

    #[test]
    fn rhs_splitting() {
        let s = rhs_to_section("y*y").unwrap();
        assert_eq!(s.u[0].to_string(), "x2^2");
        assert_eq!(s.u[1], Expr::zero());

        let s = rhs_to_section("6*y*y + x").unwrap();
        assert_eq!(s.u[0].to_string(), "6*x2^2 + x1");

        let s = rhs_to_section("y*p^3 + x*p - 1/2").unwrap();
        assert_eq!(s.u[0], Expr::rational(rat(-1, 2)));
        assert_eq!(s.u[1].to_string(), "x1");
        assert_eq!(s.u[2], Expr::zero());
        assert_eq!(s.u[3].to_string(), "x2");
    }

    #[test]
    fn rhs_with_denominator() {
        let s = rhs_to_section("(y + p)/x").unwrap();
        assert_eq!(s.u[0].to_string(), "x2/x1");
        assert_eq!(s.u[1].to_string(), "1/x1");
    }

    #[test]
    fn rhs_cancels_monomial_content_before_judging() {
        // p^4/p is cubic after cancellation
        let s = rhs_to_section("(p^4 + p)/p").unwrap();
        assert_eq!(s.u[3].to_string(), "1");
        assert_eq!(s.u[0].to_string(), "1");
    }

    #[test]
    fn rhs_rejects_quartic_and_rational_in_p() {
        assert!(matches!(rhs_to_section("p^4"), Err(Error::NotCubic(_))));
        assert!(matches!(rhs_to_section("1/(1 + p)"), Err(Error::NotCubic(_))));
    }

    #[test]
    fn jet_of_polynomial_section() {
        let s = Section::new([
            symexpr::parse("x1^2*x2", &["x1", "x2"]).unwrap(),
            Expr::zero(),
            Expr::zero(),
            Expr::zero(),
        ])
        .unwrap();
        let jet = s.jet_at(&[rat_int(1), rat_int(2)], 2).unwrap();
        assert_eq!(*jet.get(0, 0, 0), rat_int(2));
        assert_eq!(*jet.get(0, 1, 0), rat_int(4)); // 2 x1 x2
        assert_eq!(*jet.get(0, 0, 1), rat_int(1)); // x1^2
        assert_eq!(*jet.get(0, 2, 0), rat_int(4)); // 2 x2
        assert_eq!(*jet.get(0, 1, 1), rat_int(2)); // 2 x1
        assert_eq!(*jet.get(0, 0, 2), rat_int(0));
    }

    #[test]
    fn representative_section_reproduces_its_jet() {
        let mut jet = JetPoint::zero(2, [rat(1, 2), rat_int(-1)]);
        let mut v = 1i64;
        for i in 0..4 {
            for (r1, r2) in multi_indices(2) {
                jet.set(i, r1, r2, rat(v, 3));
                v += 1;
            }
        }
        let s = jet.representative_section();
        let back = s.jet_at(&jet.base, 2).unwrap();
        assert_eq!(back, jet);
    }

    #[test]
    fn json_round_trip_and_sparsity() {
        let mut jet = JetPoint::zero(1, [rat(2, 3), rat_int(0)]);
        jet.set(0, 1, 0, rat(-5, 7));
        jet.set(3, 0, 0, rat_int(4));
        let text = jet.to_json_string();
        let back = JetPoint::from_json_str(&text).unwrap();
        assert_eq!(back, jet);

        let sparse = r#"{"order": 1, "base": ["0", "0"], "coords": [{"i": 2, "sigma": "2", "value": "7/3"}]}"#;
        let j = JetPoint::from_json_str(sparse).unwrap();
        assert_eq!(*j.get(2, 0, 1), rat(7, 3));
        assert_eq!(*j.get(0, 0, 0), rat_int(0));

        let bad = r#"{"order": 0, "base": ["0", "0"], "coords": [{"i": 0, "sigma": "x", "value": "1"}]}"#;
        assert!(JetPoint::from_json_str(bad).is_err());
        let overflow = r#"{"order": 0, "base": ["0", "0"], "coords": [{"i": 0, "sigma": "1", "value": "1"}]}"#;
        assert!(matches!(
            JetPoint::from_json_str(overflow),
            Err(Error::Order { need: 1, got: 0 })
        ));
    }

    #[test]
    fn exact_jets_refuse_transcendental_sections() {
        let s = Section::new([
            symexpr::parse("exp(x1)", &["x1", "x2"]).unwrap(),
            Expr::zero(),
            Expr::zero(),
            Expr::zero(),
        ])
        .unwrap();
        assert!(!s.is_rational());
        assert!(s.jet_at(&[rat_int(0), rat_int(0)], 1).is_err());
        assert!(s.jet_at(&[0.0f64, 0.0], 1).is_ok());
    }
}
