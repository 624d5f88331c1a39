//! Point transformations of the plane and their action on equations.
//!
//! A point transformation sends (x1, x2) to (f1(x1,x2), f2(x1,x2)). Solution
//! graphs of an equation cubic in the first derivative map to solution graphs
//! of another such equation; the chain rule on graph curves gives the
//! transformed coefficients in closed form. Writing q for the first
//! derivative, N1 = f1_1 + f1_2 q, N2 = f2_1 + f2_2 q, J = f1_1 f2_2 -
//! f1_2 f2_1, and Pi = fi_11 + 2 fi_12 q + fi_22 q^2, the image equation
//! satisfies, as cubics in q,
//!
//!   sum_a (ut_a o f) (qf1_1 - f2_1)^a (f2_2 - qf1_2)^(3-a)
//!     = J * sum_b u_b q^b + coefficients of P2 N1 - P1 N2,
//!
//! all divided by J^3 (the source form, no inverse map needed), and dually,
//! with g the inverse map,
//!
//!   ut_a = [ sum_b (u_b o g) coeff_a((g2_1 + g2_2 q)^b (g1_1 + g1_2 q)^(3-b))
//!            - coeff_a(A_g) ] / J_g.
//!
//! Both kernels are written once over an abstract coefficient ring, so the
//! same formula produces exact values, floats, formal expressions, and
//! truncated Taylor series (which is how whole jets are transported).

use crate::error::{Error, Result};
use crate::jetspace::{JetPoint, Section};
use crate::numeric::{apply_weights, fd_weights, rk4_path};
use crate::scalar::Scalar;
use crate::series::{
    expr_series, inverse_map_jet, multi_indices, CoeffRing, MapJet, Series2,
};
use crate::symexpr::{self, normalize, Atom, Expr};
use crate::Rat;
use num_traits::Zero;
use std::collections::HashMap;

/// A transformation of the plane given by two component expressions in x1, x2.
/// An explicit inverse may be attached when known.
#[derive(Debug, Clone, PartialEq)]
pub struct PointTransform {
    pub f: [Expr; 2],
    pub inverse: Option<[Expr; 2]>,
}

impl PointTransform {
    pub fn new(f1: Expr, f2: Expr) -> Result<PointTransform> {
        for e in [&f1, &f2] {
            for v in e.vars() {
                if v != "x1" && v != "x2" {
                    return Err(Error::Invalid(format!(
                        "transform component depends on unknown variable {v}"
                    )));
                }
            }
        }
        Ok(PointTransform { f: [f1, f2], inverse: None })
    }

    /// Parses the two components; `x`/`y` are accepted as synonyms for
    /// `x1`/`x2`.
    pub fn parse(f1: &str, f2: &str) -> Result<PointTransform> {
        let renames: HashMap<String, String> =
            [("x".to_string(), "x1".to_string()), ("y".to_string(), "x2".to_string())]
                .into_iter()
                .collect();
        let vars = ["x", "y", "x1", "x2"];
        let e1 = symexpr::parse(f1, &vars)?.rename(&renames);
        let e2 = symexpr::parse(f2, &vars)?.rename(&renames);
        PointTransform::new(e1, e2)
    }

    pub fn identity() -> PointTransform {
        PointTransform { f: [Expr::var("x1"), Expr::var("x2")], inverse: None }
    }

    pub fn swap() -> PointTransform {
        PointTransform {
            f: [Expr::var("x2"), Expr::var("x1")],
            inverse: Some([Expr::var("x2"), Expr::var("x1")]),
        }
    }

    /// x -> M x + t with rational entries.
    pub fn affine(m: [[Rat; 2]; 2], t: [Rat; 2]) -> PointTransform {
        let comp = |row: &[Rat; 2], c: &Rat| {
            Expr::rational(row[0].clone()) * Expr::var("x1")
                + Expr::rational(row[1].clone()) * Expr::var("x2")
                + Expr::rational(c.clone())
        };
        PointTransform {
            f: [comp(&m[0], &t[0]), comp(&m[1], &t[1])],
            inverse: None,
        }
    }

    pub fn with_inverse(mut self, g1: Expr, g2: Expr) -> PointTransform {
        self.inverse = Some([g1, g2]);
        self
    }

    /// The composite map sending x to self(inner(x)).
    pub fn compose(&self, inner: &PointTransform) -> PointTransform {
        let sub: HashMap<String, Expr> = [
            ("x1".to_string(), inner.f[0].clone()),
            ("x2".to_string(), inner.f[1].clone()),
        ]
        .into_iter()
        .collect();
        PointTransform {
            f: [self.f[0].substitute(&sub), self.f[1].substitute(&sub)],
            inverse: None,
        }
    }

    pub fn apply<T: Scalar>(&self, p: &[T; 2]) -> Result<[T; 2]> {
        let env: HashMap<String, T> =
            [("x1".to_string(), p[0].clone()), ("x2".to_string(), p[1].clone())]
                .into_iter()
                .collect();
        Ok([self.f[0].eval(&env)?, self.f[1].eval(&env)?])
    }

    /// All first and second partials as expressions.
    pub fn partials_exprs(&self) -> PartialData<Expr> {
        let d = |i: usize, v: &str| self.f[i].diff(v);
        let d1 = [
            [d(0, "x1"), d(0, "x2")],
            [d(1, "x1"), d(1, "x2")],
        ];
        let d2 = [
            [d1[0][0].diff("x1"), d1[0][0].diff("x2"), d1[0][1].diff("x2")],
            [d1[1][0].diff("x1"), d1[1][0].diff("x2"), d1[1][1].diff("x2")],
        ];
        PartialData { d: d1, d2 }
    }

    pub fn partials_at<T: Scalar>(&self, p: &[T; 2]) -> Result<PartialData<T>> {
        let env: HashMap<String, T> =
            [("x1".to_string(), p[0].clone()), ("x2".to_string(), p[1].clone())]
                .into_iter()
                .collect();
        let pe = self.partials_exprs();
        Ok(PartialData {
            d: [
                [pe.d[0][0].eval(&env)?, pe.d[0][1].eval(&env)?],
                [pe.d[1][0].eval(&env)?, pe.d[1][1].eval(&env)?],
            ],
            d2: [
                [pe.d2[0][0].eval(&env)?, pe.d2[0][1].eval(&env)?, pe.d2[0][2].eval(&env)?],
                [pe.d2[1][0].eval(&env)?, pe.d2[1][1].eval(&env)?, pe.d2[1][2].eval(&env)?],
            ],
        })
    }

    pub fn jacobian<T: Scalar>(&self, p: &[T; 2]) -> Result<[[T; 2]; 2]> {
        Ok(self.partials_at(p)?.d)
    }

    /// Taylor jet of the map at a point, as two series in the displacement.
    pub fn map_jet<T: Scalar>(&self, p: &[T; 2], order: usize) -> Result<MapJet<T>> {
        Ok(MapJet {
            comps: [
                expr_series(&self.f[0], p, order)?,
                expr_series(&self.f[1], p, order)?,
            ],
        })
    }

    /// The attached inverse if present, otherwise a symbolic inversion attempt.
    pub fn resolved_inverse(&self) -> Result<PointTransform> {
        if let Some([g1, g2]) = &self.inverse {
            return PointTransform::new(g1.clone(), g2.clone());
        }
        self.try_symbolic_inverse().ok_or(Error::InverseUnavailable)
    }

    /// Attempts to invert the map in closed form. Covers affine maps and
    /// triangular shapes whose univariate part is a chain of linear maps,
    /// exp, log and reciprocals, plus either map composed with the coordinate
    /// swap. Every returned inverse has been checked against the identity
    /// (exactly for rational maps, by sampling otherwise).
    pub fn try_symbolic_inverse(&self) -> Option<PointTransform> {
        self.symbolic_inverse_inner(true)
    }

    fn symbolic_inverse_inner(&self, allow_swap: bool) -> Option<PointTransform> {
        if let Some(g) = self.invert_affine() {
            return self.verified(g);
        }
        // lower triangular: f1 depends on x1 only
        if only_var(&self.f[0], "x1") {
            if let Some(w) = univariate_inverse(&self.f[0], "x1") {
                let g1 = subst_w(&w, &Expr::var("x1"));
                if let Some(g2) = invert_second_given_first(&self.f[1], &g1, "x1", "x2") {
                    if let Ok(g) = PointTransform::new(g1, g2) {
                        if let Some(v) = self.verified(g) {
                            return Some(v);
                        }
                    }
                }
            }
        }
        // upper triangular: f2 depends on x2 only
        if only_var(&self.f[1], "x2") {
            if let Some(w) = univariate_inverse(&self.f[1], "x2") {
                let g2 = subst_w(&w, &Expr::var("x2"));
                if let Some(g1) = invert_second_given_first(&self.f[0], &g2, "x2", "x1") {
                    if let Ok(g) = PointTransform::new(g1, g2) {
                        if let Some(v) = self.verified(g) {
                            return Some(v);
                        }
                    }
                }
            }
        }
        if allow_swap {
            // f = swap o f', so f^-1 = f'^-1 o swap
            let swapped = PointTransform {
                f: [self.f[1].clone(), self.f[0].clone()],
                inverse: None,
            };
            if let Some(gp) = swapped.symbolic_inverse_inner(false) {
                let sw: HashMap<String, String> =
                    [("x1".to_string(), "x2".to_string()), ("x2".to_string(), "x1".to_string())]
                        .into_iter()
                        .collect();
                let g = PointTransform {
                    f: [gp.f[0].rename(&sw), gp.f[1].rename(&sw)],
                    inverse: None,
                };
                return self.verified(g);
            }
        }
        None
    }

    fn invert_affine(&self) -> Option<PointTransform> {
        let mut m = [[Rat::zero(), Rat::zero()], [Rat::zero(), Rat::zero()]];
        let mut t = [Rat::zero(), Rat::zero()];
        for i in 0..2 {
            let nf = normalize(&self.f[i]).ok()?;
            let den = nf.den.as_constant()?;
            if nf.num.has_call_atoms() || nf.num.max_degree() > 1 {
                return None;
            }
            let (c, lin) = nf.num.as_linear()?;
            t[i] = c / den.clone();
            for (atom, coef) in lin {
                match atom {
                    Atom::Var(v) if v == "x1" => m[i][0] = coef / den.clone(),
                    Atom::Var(v) if v == "x2" => m[i][1] = coef / den.clone(),
                    _ => return None,
                }
            }
        }
        let det = m[0][0].clone() * m[1][1].clone() - m[0][1].clone() * m[1][0].clone();
        if det.is_zero() {
            return None;
        }
        let inv = [
            [m[1][1].clone() / det.clone(), -m[0][1].clone() / det.clone()],
            [-m[1][0].clone() / det.clone(), m[0][0].clone() / det.clone()],
        ];
        let comp = |row: &[Rat; 2]| {
            Expr::rational(row[0].clone()) * (Expr::var("x1") - Expr::rational(t[0].clone()))
                + Expr::rational(row[1].clone())
                    * (Expr::var("x2") - Expr::rational(t[1].clone()))
        };
        Some(PointTransform { f: [comp(&inv[0]), comp(&inv[1])], inverse: None })
    }

    /// Accepts a candidate inverse only if g o f is the identity (proven or
    /// numerically on sampled points).
    fn verified(&self, g: PointTransform) -> Option<PointTransform> {
        let gf = g.compose(self);
        for (comp, var) in gf.f.iter().zip(["x1", "x2"]) {
            let residual = comp.clone() - Expr::var(var);
            match symexpr::is_zero(&residual) {
                Ok(v) if v.is_zero_like() => {}
                _ => return None,
            }
        }
        Some(g)
    }
}

fn only_var(e: &Expr, v: &str) -> bool {
    e.vars().iter().all(|w| w == v)
}

fn subst_w(w_expr: &Expr, replacement: &Expr) -> Expr {
    let sub: HashMap<String, Expr> =
        [("w".to_string(), replacement.clone())].into_iter().collect();
    w_expr.substitute(&sub)
}

fn const_value(e: &Expr) -> Option<Rat> {
    if !e.vars().is_empty() {
        return None;
    }
    e.eval::<Rat>(&HashMap::new()).ok()
}

/// Inverse of a univariate chain built from linear maps, exp, log, negation
/// and reciprocals, returned as an expression in the placeholder variable `w`.
fn univariate_inverse(e: &Expr, var: &str) -> Option<Expr> {
    let w = Expr::var("w");
    match e {
        Expr::Var(v) if v == var => Some(w),
        Expr::Neg(a) => {
            let inner = univariate_inverse(a, var)?;
            Some(subst_w(&inner, &(-w)))
        }
        Expr::Add(a, b) => {
            if let Some(c) = const_value(b) {
                let inner = univariate_inverse(a, var)?;
                return Some(subst_w(&inner, &(w - Expr::rational(c))));
            }
            if let Some(c) = const_value(a) {
                let inner = univariate_inverse(b, var)?;
                return Some(subst_w(&inner, &(w - Expr::rational(c))));
            }
            None
        }
        Expr::Sub(a, b) => {
            if let Some(c) = const_value(b) {
                let inner = univariate_inverse(a, var)?;
                return Some(subst_w(&inner, &(w + Expr::rational(c))));
            }
            if let Some(c) = const_value(a) {
                // c - inner(x) = w  =>  inner(x) = c - w
                let inner = univariate_inverse(b, var)?;
                return Some(subst_w(&inner, &(Expr::rational(c) - w)));
            }
            None
        }
        Expr::Mul(a, b) => {
            if let Some(c) = const_value(a).filter(|c| !c.is_zero()) {
                let inner = univariate_inverse(b, var)?;
                return Some(subst_w(&inner, &(w / Expr::rational(c))));
            }
            if let Some(c) = const_value(b).filter(|c| !c.is_zero()) {
                let inner = univariate_inverse(a, var)?;
                return Some(subst_w(&inner, &(w / Expr::rational(c))));
            }
            None
        }
        Expr::Div(a, b) => {
            if let Some(c) = const_value(b).filter(|c| !c.is_zero()) {
                let inner = univariate_inverse(a, var)?;
                return Some(subst_w(&inner, &(w * Expr::rational(c))));
            }
            if let Some(c) = const_value(a).filter(|c| !c.is_zero()) {
                // c / inner(x) = w  =>  inner(x) = c / w
                let inner = univariate_inverse(b, var)?;
                return Some(subst_w(&inner, &(Expr::rational(c) / w)));
            }
            None
        }
        Expr::Pow(a, -1) => {
            let inner = univariate_inverse(a, var)?;
            Some(subst_w(&inner, &(Expr::one() / w)))
        }
        Expr::Call(crate::scalar::Func::Exp, a) => {
            let inner = univariate_inverse(a, var)?;
            Some(subst_w(&inner, &Expr::call(crate::scalar::Func::Log, w)))
        }
        Expr::Call(crate::scalar::Func::Log, a) => {
            let inner = univariate_inverse(a, var)?;
            Some(subst_w(&inner, &Expr::call(crate::scalar::Func::Exp, w)))
        }
        _ => None,
    }
}

/// Given g_first inverting the triangular component in `first_var`, solves the
/// remaining component for `second_var`. Handles components affine in the
/// second variable (with coefficients in the first) and additive splits
/// F(second) + G(first) with F an invertible chain.
fn invert_second_given_first(
    f2: &Expr,
    g_first: &Expr,
    first_var: &str,
    second_var: &str,
) -> Option<Expr> {
    let sub_first: HashMap<String, Expr> =
        [(first_var.to_string(), g_first.clone())].into_iter().collect();
    // pure chain in the second variable
    if only_var(f2, second_var) {
        let w = univariate_inverse(f2, second_var)?;
        return Some(subst_w(&w, &Expr::var(second_var)));
    }
    let nf = normalize(f2).ok()?;
    let second_atom = Atom::Var(second_var.to_string());
    let involves_second = |p: &crate::symexpr::Poly| {
        p.to_expr().vars().contains(second_var)
    };
    // affine in the second variable: (A(first) * second + B(first)) / D(first)
    if !involves_second(&nf.den) && nf.num.degree_in(&second_atom) <= 1 {
        let a = nf.num.coeff_of_power(&second_atom, 1);
        let b = nf.num.coeff_of_power(&second_atom, 0);
        if !a.is_zero() && !involves_second(&a) && !involves_second(&b) {
            let den = nf.den.to_expr();
            let a_expr = (a.to_expr() / den.clone()).substitute(&sub_first);
            let b_expr = (b.to_expr() / den).substitute(&sub_first);
            return Some((Expr::var(second_var) - b_expr) / a_expr);
        }
    }
    // additive split with a constant denominator: (P(first) + Q(second)) / c
    if let Some(c) = nf.den.as_constant() {
        let mut p_part = crate::symexpr::Poly::zero();
        let mut q_part = crate::symexpr::Poly::zero();
        for (mono, coef) in &nf.num.terms {
            let term = crate::symexpr::Poly {
                terms: [(mono.clone(), coef.clone())].into_iter().collect(),
            };
            if involves_second(&term) {
                q_part = q_part.add(&term);
            } else {
                p_part = p_part.add(&term);
            }
        }
        let q_expr = q_part.to_expr() / Expr::rational(c.clone());
        let p_expr = p_part.to_expr() / Expr::rational(c);
        if only_var(&q_expr, second_var) {
            if let Some(w) = univariate_inverse(&q_expr, second_var) {
                let target = Expr::var(second_var) - p_expr.substitute(&sub_first);
                return Some(subst_w(&w, &target));
            }
        }
    }
    None
}

/// First and second partial derivatives of a plane map, over any coefficient
/// ring: d[i][j] is the j-th partial of component i, d2[i] lists the second
/// partials (11, 12, 22) of component i.
#[derive(Debug, Clone)]
pub struct PartialData<R> {
    pub d: [[R; 2]; 2],
    pub d2: [[R; 3]; 2],
}

impl<R: CoeffRing> PartialData<R> {
    pub fn jacobian_det(&self) -> R {
        self.d[0][0].mul(&self.d[1][1]).sub(&self.d[0][1].mul(&self.d[1][0]))
    }
}

/// Polynomial in the first-derivative variable q with ring coefficients.
struct QPoly<R> {
    c: Vec<R>,
}

impl<R: CoeffRing> QPoly<R> {
    fn new(c: Vec<R>) -> Self {
        QPoly { c }
    }

    fn coeff(&self, k: usize, ctx: &R) -> R {
        self.c.get(k).cloned().unwrap_or_else(|| ctx.zero_like())
    }

    fn add(&self, o: &QPoly<R>, ctx: &R) -> QPoly<R> {
        let n = self.c.len().max(o.c.len());
        QPoly::new((0..n).map(|k| self.coeff(k, ctx).add(&o.coeff(k, ctx))).collect())
    }

    fn sub(&self, o: &QPoly<R>, ctx: &R) -> QPoly<R> {
        let n = self.c.len().max(o.c.len());
        QPoly::new((0..n).map(|k| self.coeff(k, ctx).sub(&o.coeff(k, ctx))).collect())
    }

    fn mul(&self, o: &QPoly<R>, ctx: &R) -> QPoly<R> {
        if self.c.is_empty() || o.c.is_empty() {
            return QPoly::new(vec![]);
        }
        let n = self.c.len() + o.c.len() - 1;
        let mut out = vec![ctx.zero_like(); n];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        QPoly::new(out)
    }

    fn scale(&self, r: &R) -> QPoly<R> {
        QPoly::new(self.c.iter().map(|a| a.mul(r)).collect())
    }

    fn pow(&self, n: usize, ctx: &R) -> QPoly<R> {
        let mut acc = QPoly::new(vec![ctx.one_like()]);
        for _ in 0..n {
            acc = acc.mul(self, ctx);
        }
        acc
    }
}

/// The curvature part P2 N1 - P1 N2 as a cubic in q.
fn curvature_qpoly<R: CoeffRing>(pd: &PartialData<R>, ctx: &R) -> QPoly<R> {
    let n1 = QPoly::new(vec![pd.d[0][0].clone(), pd.d[0][1].clone()]);
    let n2 = QPoly::new(vec![pd.d[1][0].clone(), pd.d[1][1].clone()]);
    let p1 = QPoly::new(vec![
        pd.d2[0][0].clone(),
        pd.d2[0][1].scale_int(2),
        pd.d2[0][2].clone(),
    ]);
    let p2 = QPoly::new(vec![
        pd.d2[1][0].clone(),
        pd.d2[1][1].scale_int(2),
        pd.d2[1][2].clone(),
    ]);
    p2.mul(&n1, ctx).sub(&p1.mul(&n2, ctx), ctx)
}

/// Transformed coefficients from the partials of the *inverse* map g and the
/// source coefficients evaluated along g.
pub fn transformed_coeffs_target<R: CoeffRing>(
    g: &PartialData<R>,
    u_at_g: &[R; 4],
) -> Result<[R; 4]> {
    let ctx = &g.d[0][0];
    let n1 = QPoly::new(vec![g.d[0][0].clone(), g.d[0][1].clone()]);
    let n2 = QPoly::new(vec![g.d[1][0].clone(), g.d[1][1].clone()]);
    let jg = g.jacobian_det();
    let a = curvature_qpoly(g, ctx);
    let mut total = QPoly::new(vec![ctx.zero_like(); 4]);
    for (beta, u) in u_at_g.iter().enumerate() {
        let basis = n2.pow(beta, ctx).mul(&n1.pow(3 - beta, ctx), ctx);
        total = total.add(&basis.scale(u), ctx);
    }
    let mut out = Vec::with_capacity(4);
    for alpha in 0..4 {
        out.push(total.coeff(alpha, ctx).sub(&a.coeff(alpha, ctx)).div(&jg)?);
    }
    Ok(out.try_into().ok().unwrap())
}

/// Transformed coefficients pulled back to the source: entry a is the function
/// (transformed a-th coefficient) composed with f, from the partials of f
/// itself and the source coefficients at the same point.
pub fn transformed_coeffs_source<R: CoeffRing>(
    f: &PartialData<R>,
    u: &[R; 4],
) -> Result<[R; 4]> {
    let ctx = &f.d[0][0];
    let jf = f.jacobian_det();
    // q expressed through the image slope s: q = (s f1_1 - f2_1)/(f2_2 - s f1_2)
    let qq = QPoly::new(vec![f.d[1][0].neg(), f.d[0][0].clone()]);
    let rr = QPoly::new(vec![f.d[1][1].clone(), f.d[0][1].neg()]);
    let a = curvature_qpoly(f, ctx);
    let mut sum1 = QPoly::new(vec![ctx.zero_like(); 4]);
    for (beta, ub) in u.iter().enumerate() {
        let basis = qq.pow(beta, ctx).mul(&rr.pow(3 - beta, ctx), ctx);
        sum1 = sum1.add(&basis.scale(ub), ctx);
    }
    let mut sum2 = QPoly::new(vec![ctx.zero_like(); 4]);
    for m in 0..4 {
        let basis = qq.pow(m, ctx).mul(&rr.pow(3 - m, ctx), ctx);
        sum2 = sum2.add(&basis.scale(&a.coeff(m, ctx)), ctx);
    }
    let jf3 = jf.mul(&jf).mul(&jf);
    let mut out = Vec::with_capacity(4);
    for alpha in 0..4 {
        let num = jf.mul(&sum1.coeff(alpha, ctx)).add(&sum2.coeff(alpha, ctx));
        out.push(num.div(&jf3)?);
    }
    Ok(out.try_into().ok().unwrap())
}

/// The transformed equation in target coordinates. Needs an inverse of the
/// map (attached or found symbolically); returns it alongside the section.
pub fn pushforward_equation(
    f: &PointTransform,
    s: &Section,
) -> Result<(Section, PointTransform)> {
    let g = f.resolved_inverse()?;
    let pd = g.partials_exprs();
    let sub: HashMap<String, Expr> = [
        ("x1".to_string(), g.f[0].clone()),
        ("x2".to_string(), g.f[1].clone()),
    ]
    .into_iter()
    .collect();
    let u_at_g: [Expr; 4] = [
        s.u[0].substitute(&sub),
        s.u[1].substitute(&sub),
        s.u[2].substitute(&sub),
        s.u[3].substitute(&sub),
    ];
    let raw = transformed_coeffs_target(&pd, &u_at_g)?;
    let mut tidy: [Expr; 4] = [Expr::zero(), Expr::zero(), Expr::zero(), Expr::zero()];
    for (slot, e) in tidy.iter_mut().zip(raw) {
        *slot = symexpr::poly::canonical_expr(&e)?;
    }
    Ok((Section::new(tidy)?, g))
}

/// The transformed coefficients as functions on the *source* plane: entry a
/// is (transformed coefficient a) composed with f. Works for any map with
/// nonvanishing Jacobian; no inverse is required.
pub fn pushforward_coeffs_source(f: &PointTransform, s: &Section) -> Result<[Expr; 4]> {
    let pd = f.partials_exprs();
    transformed_coeffs_source(&pd, &s.u)
}

/// Pointwise transformed coefficients: the image point and the values of the
/// transformed coefficients there.
pub fn transformed_coeffs_at<T: Scalar + CoeffRing>(
    f: &PointTransform,
    s: &Section,
    p: &[T; 2],
) -> Result<([T; 2], [T; 4])> {
    let image = f.apply(p)?;
    let pd = f.partials_at(p)?;
    let env: HashMap<String, T> =
        [("x1".to_string(), p[0].clone()), ("x2".to_string(), p[1].clone())]
            .into_iter()
            .collect();
    let u = [
        s.u[0].eval(&env)?,
        s.u[1].eval(&env)?,
        s.u[2].eval(&env)?,
        s.u[3].eval(&env)?,
    ];
    let out = transformed_coeffs_source(&pd, &u)?;
    Ok((image, out))
}

/// Transports a whole jet: the k-jet of the transformed equation at the image
/// point, computed by inverting the map jet of f at the base point and running
/// the coefficient transformation over truncated series. Exact on exact jets.
pub fn lift_jet<T: Scalar + CoeffRing>(
    f: &PointTransform,
    theta: &JetPoint<T>,
) -> Result<JetPoint<T>> {
    let k = theta.order;
    let fj = f.map_jet(&theta.base, k + 2)?;
    let g = inverse_map_jet(&fj, &theta.base)?;
    let image = fj.image();
    let d = |i: usize, j: usize| g.comps[i].derivative(j);
    let pd: PartialData<Series2<T>> = PartialData {
        d: [
            [d(0, 1).truncate(k), d(0, 2).truncate(k)],
            [d(1, 1).truncate(k), d(1, 2).truncate(k)],
        ],
        d2: [
            [
                d(0, 1).derivative(1).truncate(k),
                d(0, 1).derivative(2).truncate(k),
                d(0, 2).derivative(2).truncate(k),
            ],
            [
                d(1, 1).derivative(1).truncate(k),
                d(1, 1).derivative(2).truncate(k),
                d(1, 2).derivative(2).truncate(k),
            ],
        ],
    };
    let [a1, a2] = {
        let mut disp = [g.comps[0].truncate(k), g.comps[1].truncate(k)];
        disp[0].coeffs[0] = T::zero();
        disp[1].coeffs[0] = T::zero();
        disp
    };
    let u_at_g: [Series2<T>; 4] = [
        theta.coefficient_series(0).compose(&a1, &a2),
        theta.coefficient_series(1).compose(&a1, &a2),
        theta.coefficient_series(2).compose(&a1, &a2),
        theta.coefficient_series(3).compose(&a1, &a2),
    ];
    let out = transformed_coeffs_target(&pd, &u_at_g)?;
    let mut lifted = JetPoint::zero(k, image);
    for (i, series) in out.iter().enumerate() {
        for (r1, r2) in multi_indices(k) {
            lifted.set(i, r1, r2, series.derivative_value(r1, r2));
        }
    }
    Ok(lifted)
}

/// Settings for the solution-curve consistency check.
#[derive(Debug, Clone)]
pub struct CurveOracle {
    /// Width of the x-interval integrated around the start point.
    pub span: f64,
    /// Runge-Kutta steps across the span.
    pub steps: usize,
    /// Number of interior points where the transformed equation is tested.
    pub probes: usize,
}

impl Default for CurveOracle {
    fn default() -> Self {
        CurveOracle { span: 1.0, steps: 10_000, probes: 10 }
    }
}

#[derive(Debug, Clone)]
pub struct CurveReport {
    pub max_residual: f64,
    pub probes: usize,
    /// Smallest spacing of the mapped graph abscissa actually used.
    pub min_dx: f64,
}

/// Integrates one solution of the source equation, maps the solution curve
/// through f, and measures how well the mapped curve satisfies the transformed
/// equation: finite-difference second derivative of the image graph against
/// the transformed cubic evaluated on the image slope. `start` is
/// (x, y(x), y'(x)).
pub fn solution_curve_oracle(
    f: &PointTransform,
    s: &Section,
    start: [f64; 3],
    cfg: &CurveOracle,
) -> Result<CurveReport> {
    let rhs = |x: f64, st: &[f64]| -> Vec<f64> {
        let env: HashMap<String, f64> =
            [("x1".to_string(), x), ("x2".to_string(), st[0])].into_iter().collect();
        let q = st[1];
        let mut acc = 0.0;
        let mut qp = 1.0;
        for i in 0..4 {
            match s.u[i].eval(&env) {
                Ok(v) => acc += v * qp,
                Err(_) => return vec![f64::NAN, f64::NAN],
            }
            qp *= q;
        }
        vec![q, acc]
    };
    let half = cfg.steps / 2;
    let back = rk4_path(
        rhs,
        vec![start[1], start[2]],
        start[0],
        start[0] - cfg.span / 2.0,
        half.max(1),
    );
    let fwd = rk4_path(
        rhs,
        vec![start[1], start[2]],
        start[0],
        start[0] + cfg.span / 2.0,
        half.max(1),
    );
    let mut samples: Vec<(f64, f64)> = back.iter().skip(1).rev().map(|(x, st)| (*x, st[0])).collect();
    samples.extend(fwd.iter().map(|(x, st)| (*x, st[0])));
    if samples.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::FlowEscaped);
    }

    let mapped: Vec<[f64; 2]> = samples
        .iter()
        .map(|(x, y)| f.apply(&[*x, *y]))
        .collect::<Result<_>>()?;
    if mapped.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
        return Err(Error::FlowEscaped);
    }
    // the image must stay a graph over its first coordinate
    let mut min_dx = f64::INFINITY;
    let dir = (mapped[1][0] - mapped[0][0]).signum();
    for w in mapped.windows(2) {
        let dx = w[1][0] - w[0][0];
        if dx * dir <= 0.0 {
            return Err(Error::GraphCondition(dx));
        }
        min_dx = min_dx.min(dx.abs());
    }

    // widen the stencil to keep the second-derivative roundoff well under the
    // integration accuracy
    let stride = (cfg.steps / 500).max(1);
    let n = mapped.len();
    if n < 4 * stride + 1 {
        return Err(Error::Invalid("too few samples for the stencil".into()));
    }
    let lo = 2 * stride;
    let hi = n - 1 - 2 * stride;
    let mut max_residual = 0.0f64;
    for p in 0..cfg.probes {
        let j = lo + (hi - lo) * p / cfg.probes.max(1);
        let idx = [j - 2 * stride, j - stride, j, j + stride, j + 2 * stride];
        let nodes: Vec<f64> = idx.iter().map(|&i| mapped[i][0]).collect();
        let vals: Vec<f64> = idx.iter().map(|&i| mapped[i][1]).collect();
        let w = fd_weights(mapped[j][0], &nodes, 2);
        let d1 = apply_weights(&w[1], &vals);
        let d2 = apply_weights(&w[2], &vals);
        let (x, y) = samples[j];
        let (_, ut) = transformed_coeffs_at::<f64>(f, s, &[x, y])?;
        let mut rhs_val = 0.0;
        let mut qp = 1.0;
        for coeff in &ut {
            rhs_val += coeff * qp;
            qp *= d1;
        }
        let residual = (d2 - rhs_val).abs();
        if !residual.is_finite() {
            return Err(Error::FlowEscaped);
        }
        max_residual = max_residual.max(residual);
    }
    Ok(CurveReport { max_residual, probes: cfg.probes, min_dx })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetspace::rhs_to_section;
    use crate::{rat, rat_int};

    fn pt(f1: &str, f2: &str) -> PointTransform {
        PointTransform::parse(f1, f2).unwrap()
    }

    fn zero_section() -> Section {
        Section::zero()
    }

    #[test]
    fn apply_and_jacobian() {
        let f = pt("x + y^2", "y - x^2");
        let p = [rat_int(1), rat_int(2)];
        assert_eq!(f.apply(&p).unwrap(), [rat_int(5), rat_int(1)]);
        let j = f.jacobian(&p).unwrap();
        assert_eq!(j, [[rat_int(1), rat_int(4)], [rat_int(-2), rat_int(1)]]);
    }

    #[test]
    fn symbolic_inverse_affine() {
        let f = pt("2*x + y + 1", "x - y");
        let g = f.try_symbolic_inverse().unwrap();
        let gf = g.compose(&f);
        for (comp, var) in gf.f.iter().zip(["x1", "x2"]) {
            symexpr::zero::assert_proven_zero(&(comp.clone() - Expr::var(var)));
        }
        let fg = f.compose(&g);
        for (comp, var) in fg.f.iter().zip(["x1", "x2"]) {
            symexpr::zero::assert_proven_zero(&(comp.clone() - Expr::var(var)));
        }
    }

    #[test]
    fn symbolic_inverse_triangular_shapes() {
        // additive shear
        let f = pt("x", "y + x^2");
        let g = f.try_symbolic_inverse().unwrap();
        assert_eq!(
            symexpr::poly::canonical_expr(&g.f[1]).unwrap().to_string(),
            "-x1^2 + x2"
        );
        // exponential in the second slot
        let f = pt("x", "exp(y)");
        let g = f.try_symbolic_inverse().unwrap();
        assert_eq!(g.f[1].to_string(), "log(x2)");
        // swapped exponential
        let f = pt("exp(y)", "x");
        let g = f.try_symbolic_inverse().unwrap();
        assert_eq!(g.f[1].to_string(), "log(x1)");
        assert_eq!(g.f[0].to_string(), "x2");
        // scaling with an x1-dependent coefficient on x2
        let f = pt("x", "x*y");
        let g = f.try_symbolic_inverse().unwrap();
        let gf = g.compose(&f);
        let v = symexpr::is_zero(&(gf.f[1].clone() - Expr::var("x2"))).unwrap();
        assert!(v.is_zero_like());
        // chain: 1 / (y + 1) with a reciprocal
        let f = pt("x", "1/(y + 1)");
        let g = f.try_symbolic_inverse().unwrap();
        let gf = g.compose(&f);
        let v = symexpr::is_zero(&(gf.f[1].clone() - Expr::var("x2"))).unwrap();
        assert!(v.is_zero_like());
        // genuinely entangled map has no symbolic inverse here
        let f = pt("x + y^2", "y + x^2");
        assert!(f.try_symbolic_inverse().is_none());
    }

    #[test]
    fn swap_anchors_both_kernels() {
        // under (x1, x2) -> (x2, x1) the coefficients reverse with a sign
        let f = PointTransform::swap();
        let pd = f.partials_at(&[rat_int(0), rat_int(0)]).unwrap();
        let u = [rat_int(2), rat_int(3), rat_int(5), rat_int(7)];
        let out = transformed_coeffs_source(&pd, &u).unwrap();
        assert_eq!(out, [rat_int(-7), rat_int(-5), rat_int(-3), rat_int(-2)]);

        let g = f.resolved_inverse().unwrap();
        let pdg = g.partials_at(&[rat_int(0), rat_int(0)]).unwrap();
        let out2 = transformed_coeffs_target(&pdg, &u).unwrap();
        assert_eq!(out2, [rat_int(-7), rat_int(-5), rat_int(-3), rat_int(-2)]);
    }

    #[test]
    fn pushforward_of_flat_equation_under_exp() {
        // mapping (x, y) -> (x, e^y) turns y'' = 0 into y'' = y'^2 / x2
        let f = pt("x", "exp(y)");
        let (s, g) = pushforward_equation(&f, &zero_section()).unwrap();
        assert_eq!(g.f[1].to_string(), "log(x2)");
        assert_eq!(s.u[0], Expr::zero());
        assert_eq!(s.u[1], Expr::zero());
        assert_eq!(s.u[2].to_string(), "1/x2");
        assert_eq!(s.u[3], Expr::zero());
    }

    #[test]
    fn pushforward_of_flat_equation_under_shear() {
        // (x, y + x^2): lines become parabolas, y'' = 2
        let f = pt("x", "y + x^2");
        let (s, _) = pushforward_equation(&f, &zero_section()).unwrap();
        assert_eq!(s.u[0].to_string(), "2");
        assert_eq!(s.u[1], Expr::zero());
        assert_eq!(s.u[2], Expr::zero());
        assert_eq!(s.u[3], Expr::zero());
    }

    #[test]
    fn source_and_target_kernels_agree_pointwise() {
        let f = pt("x + y^2/4", "y - x^3/8");
        let s = rhs_to_section("y*y + x*p - p*p*p/2").unwrap();
        let p = [rat(1, 2), rat(1, 3)];
        // source route: values of the transformed coefficients at f(p)
        let (image, via_source) = transformed_coeffs_at::<Rat>(&f, &s, &p).unwrap();
        // jet route at order 0 must give the same four numbers
        let theta = s.jet_at(&p, 0).unwrap();
        let lifted = lift_jet(&f, &theta).unwrap();
        assert_eq!(lifted.base, image);
        for i in 0..4 {
            assert_eq!(*lifted.get(i, 0, 0), via_source[i]);
        }
    }

    #[test]
    fn lift_jet_matches_symbolic_pushforward() {
        // with a symbolic inverse available, transporting the jet through
        // series must match taking the jet of the transformed equation
        for (f1, f2) in [("2*x", "y + x"), ("x", "y + x^2"), ("y", "x")] {
            let f = pt(f1, f2);
            let s = rhs_to_section("y*y + x*p").unwrap();
            let (pushed, _) = pushforward_equation(&f, &s).unwrap();
            let p = [rat(1, 3), rat(-1, 2)];
            let theta = s.jet_at(&p, 2).unwrap();
            let lifted = lift_jet(&f, &theta).unwrap();
            let direct = pushed.jet_at(&lifted.base, 2).unwrap();
            assert_eq!(lifted, direct, "mismatch for ({f1}, {f2})");
        }
    }

    #[test]
    fn lift_jet_rejects_singular_points() {
        let f = pt("x*x", "y");
        let s = zero_section();
        let theta = s.jet_at(&[rat_int(0), rat_int(1)], 1).unwrap();
        assert!(matches!(lift_jet(&f, &theta), Err(Error::SingularJacobian)));
    }

    #[test]
    fn curve_oracle_flat_line_under_exp() {
        let f = pt("x", "exp(y)");
        let report = solution_curve_oracle(
            &f,
            &zero_section(),
            [0.0, 0.3, -0.2],
            &CurveOracle::default(),
        )
        .unwrap();
        assert!(report.max_residual < 1e-6, "residual {}", report.max_residual);
    }

    #[test]
    fn curve_oracle_detects_graph_violation() {
        // swapping coordinates on a horizontal line: the image is vertical
        let f = PointTransform::swap();
        let err = solution_curve_oracle(
            &f,
            &zero_section(),
            [0.0, 0.5, 0.0],
            &CurveOracle::default(),
        );
        assert!(matches!(err, Err(Error::GraphCondition(_))));
    }

    #[test]
    fn curve_oracle_nonlinear_equation_swap() {
        // y'' = x under the swap; slopes stay near 1 so the image is a graph
        let f = PointTransform::swap();
        let s = rhs_to_section("x").unwrap();
        let report = solution_curve_oracle(&f, &s, [0.0, 0.0, 1.0], &CurveOracle::default())
            .unwrap();
        assert!(report.max_residual < 1e-6, "residual {}", report.max_residual);
    }
}
