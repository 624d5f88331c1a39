//! Lifting plane vector fields to jet space.
//!
//! A vector field X = X1 d1 + X2 d2 on the plane flows points, hence flows
//! equations, hence flows jets of equations. Differentiating that action at
//! t = 0 gives a vector field on each jet space whose fiber components are
//! linear in the derivatives of X. The whole structure is generated by four
//! expressions psi0..psi3: psi_i is the t-derivative, at a fixed plane point,
//! of the i-th coefficient of the transported equation, and depends on the
//! 1-jet of the coefficients and the 2-jet of X. Higher fiber components are
//! total derivatives of the psi, plus the transport term moving the base
//! point:
//!
//!   (lift X) u_i_sigma  =  X1 u_i_(sigma,1) + X2 u_i_(sigma,2) + D_sigma psi_i.
//!
//! The formal total derivative D_j acts on jet variables by appending a
//! derivative index, so D_sigma psi_i is again a polynomial in jet variables,
//! linear in the X-variables.

use crate::error::{Error, Result};
use crate::jetspace::{
    parse_jet_var, sigma_digits, u_var_name, x_var_name, JetPoint, JetVarKind, Section,
};
use crate::numeric::rk4;
use crate::pointmap::{transformed_coeffs_source, PartialData};
use crate::scalar::Scalar;
use crate::series::{expr_series, multi_indices, tri_idx, tri_len, MapJet, Series2};
use crate::symexpr::Expr;
use crate::Rat;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// Jet of a plane vector field at a point: all partials of both components up
/// to the stored order.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFieldJet<T> {
    pub order: usize,
    pub base: [T; 2],
    comps: Vec<T>,
}

impl<T: Scalar> VectorFieldJet<T> {
    pub fn zero(order: usize, base: [T; 2]) -> Self {
        VectorFieldJet { order, base, comps: vec![T::zero(); 2 * tri_len(order)] }
    }

    fn idx(&self, i: usize, r1: usize, r2: usize) -> usize {
        debug_assert!((1..=2).contains(&i) && r1 + r2 <= self.order);
        (i - 1) * tri_len(self.order) + tri_idx(r1, r2)
    }

    /// Component index i is 1 or 2, matching the variable names X1, X2.
    pub fn get(&self, i: usize, r1: usize, r2: usize) -> &T {
        &self.comps[self.idx(i, r1, r2)]
    }

    pub fn set(&mut self, i: usize, r1: usize, r2: usize, v: T) {
        let idx = self.idx(i, r1, r2);
        self.comps[idx] = v;
    }

    /// Jet of a concrete vector field with expression components in x1, x2.
    pub fn of_field(x: &[Expr; 2], base: &[T; 2], order: usize) -> Result<Self> {
        let mut out = Self::zero(order, base.clone());
        for i in 1..=2 {
            let s = expr_series(&x[i - 1], base, order)?;
            for (r1, r2) in multi_indices(order) {
                out.set(i, r1, r2, s.derivative_value(r1, r2));
            }
        }
        Ok(out)
    }

    /// The value of the field at the base point.
    pub fn at_base(&self) -> [T; 2] {
        [self.get(1, 0, 0).clone(), self.get(2, 0, 0).clone()]
    }

    /// Taylor series of one component (monomial coefficients).
    pub fn component_series(&self, i: usize) -> Series2<T> {
        Series2::from_derivatives(self.order, |r1, r2| self.get(i, r1, r2).clone())
    }

    /// Substitution environment mapping X-variable names to values.
    pub fn env(&self) -> HashMap<String, T> {
        let mut env = HashMap::new();
        for i in 1..=2 {
            for (r1, r2) in multi_indices(self.order) {
                env.insert(x_var_name(i, r1, r2), self.get(i, r1, r2).clone());
            }
        }
        env
    }

    /// Forgets derivatives above the given order.
    pub fn project(&self, order: usize) -> Self {
        assert!(order <= self.order);
        let mut out = Self::zero(order, self.base.clone());
        for i in 1..=2 {
            for (r1, r2) in multi_indices(order) {
                out.set(i, r1, r2, self.get(i, r1, r2).clone());
            }
        }
        out
    }

    /// Zero-pads derivatives above the stored order.
    pub fn extend(&self, order: usize) -> Self {
        assert!(order >= self.order);
        let mut out = Self::zero(order, self.base.clone());
        for i in 1..=2 {
            for (r1, r2) in multi_indices(self.order) {
                out.set(i, r1, r2, self.get(i, r1, r2).clone());
            }
        }
        out
    }

    pub fn approx(&self) -> VectorFieldJet<f64> {
        VectorFieldJet {
            order: self.order,
            base: [self.base[0].approx(), self.base[1].approx()],
            comps: self.comps.iter().map(|c| c.approx()).collect(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct FieldJetRepr {
    order: usize,
    base: [String; 2],
    comps: Vec<FieldCoordRepr>,
}

#[derive(Serialize, Deserialize)]
struct FieldCoordRepr {
    i: usize,
    sigma: String,
    value: String,
}

impl VectorFieldJet<Rat> {
    pub fn to_json_value(&self) -> serde_json::Value {
        let mut comps = Vec::new();
        for i in 1..=2 {
            for (r1, r2) in multi_indices(self.order) {
                let v = self.get(i, r1, r2);
                if num_traits::Zero::is_zero(v) {
                    continue;
                }
                comps.push(FieldCoordRepr { i, sigma: sigma_digits(r1, r2), value: v.to_string() });
            }
        }
        let repr = FieldJetRepr {
            order: self.order,
            base: [self.base[0].to_string(), self.base[1].to_string()],
            comps,
        };
        serde_json::to_value(repr).expect("field jet serialization cannot fail")
    }

    pub fn to_json_string(&self) -> String {
        self.to_json_value().to_string()
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<Self> {
        let repr: FieldJetRepr = serde_json::from_value(v.clone())?;
        let base = [
            crate::jetspace::parse_rat(&repr.base[0])?,
            crate::jetspace::parse_rat(&repr.base[1])?,
        ];
        let mut out = VectorFieldJet::zero(repr.order, base);
        for c in &repr.comps {
            if !(1..=2).contains(&c.i) {
                return Err(Error::Invalid(format!("component index {} out of range", c.i)));
            }
            let (r1, r2) = crate::jetspace::parse_sigma(&c.sigma)
                .ok_or_else(|| Error::Invalid(format!("bad multi-index {:?}", c.sigma)))?;
            if r1 + r2 > repr.order {
                return Err(Error::Order { need: r1 + r2, got: repr.order });
            }
            out.set(c.i, r1, r2, crate::jetspace::parse_rat(&c.value)?);
        }
        Ok(out)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Self::from_json_value(&serde_json::from_str(s)?)
    }
}

fn build_psi() -> [Expr; 4] {
    let u = |i: usize| Expr::var(u_var_name(i, 0, 0));
    let ud = |i: usize, r1: usize, r2: usize| Expr::var(u_var_name(i, r1, r2));
    let x = |i: usize| Expr::var(x_var_name(i, 0, 0));
    let xd = |i: usize, r1: usize, r2: usize| Expr::var(x_var_name(i, r1, r2));
    let c = Expr::int;
    [
        // psi0
        -ud(0, 1, 0) * x(1) - ud(0, 0, 1) * x(2) - c(2) * u(0) * xd(1, 1, 0)
            + u(0) * xd(2, 0, 1)
            - u(1) * xd(2, 1, 0)
            + xd(2, 2, 0),
        // psi1
        -ud(1, 1, 0) * x(1) - ud(1, 0, 1) * x(2) - c(3) * u(0) * xd(1, 0, 1)
            - u(1) * xd(1, 1, 0)
            - c(2) * u(2) * xd(2, 1, 0)
            - xd(1, 2, 0)
            + c(2) * xd(2, 1, 1),
        // psi2
        -ud(2, 1, 0) * x(1) - ud(2, 0, 1) * x(2) - c(2) * u(1) * xd(1, 0, 1)
            - u(2) * xd(2, 0, 1)
            - c(3) * u(3) * xd(2, 1, 0)
            - c(2) * xd(1, 1, 1)
            + xd(2, 0, 2),
        // psi3
        -ud(3, 1, 0) * x(1) - ud(3, 0, 1) * x(2) - u(2) * xd(1, 0, 1) + u(3) * xd(1, 1, 0)
            - c(2) * u(3) * xd(2, 0, 1)
            - xd(1, 0, 2),
    ]
}

/// The four generating expressions, in jet variables u{i}d{...} (1-jet of the
/// coefficients) and X{i}d{...} (2-jet of the field).
pub fn psi_exprs() -> &'static [Expr; 4] {
    static PSI: OnceLock<[Expr; 4]> = OnceLock::new();
    PSI.get_or_init(build_psi)
}

/// The jet variable obtained by one more derivative in direction j.
fn successor_var(name: &str, j: usize) -> String {
    let (kind, i, r1, r2) = parse_jet_var(name)
        .unwrap_or_else(|| panic!("total derivative of a non-jet variable {name}"));
    let (r1, r2) = if j == 1 { (r1 + 1, r2) } else { (r1, r2 + 1) };
    match kind {
        JetVarKind::U => u_var_name(i, r1, r2),
        JetVarKind::X => x_var_name(i, r1, r2),
    }
}

/// Formal total derivative in base direction j of an expression in jet
/// variables: chain rule, sending each jet variable to its successor.
pub fn total_derivative(e: &Expr, j: usize) -> Expr {
    assert!(j == 1 || j == 2);
    let mut out = Expr::zero();
    for v in e.vars() {
        out = out + e.diff(&v) * Expr::var(successor_var(&v, j));
    }
    out
}

/// D_sigma psi_i, memoized. Linear in the X-variables (orders 0 to
/// |sigma| + 2), with coefficients in the u-variables (orders to |sigma| + 1).
pub fn d_sigma_psi(i: usize, r1: usize, r2: usize) -> Expr {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize, usize), Expr>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(e) = cache.lock().unwrap().get(&(i, r1, r2)).cloned() {
        return e;
    }
    let e = if r1 == 0 && r2 == 0 {
        psi_exprs()[i].clone()
    } else if r1 > 0 {
        total_derivative(&d_sigma_psi(i, r1 - 1, r2), 1)
    } else {
        total_derivative(&d_sigma_psi(i, r1, r2 - 1), 2)
    };
    cache.lock().unwrap().insert((i, r1, r2), e.clone());
    e
}

/// Full fiber component of the lifted field on the sigma-th derivative of
/// coefficient i: transport term plus D_sigma psi_i.
pub fn lift_component_expr(i: usize, r1: usize, r2: usize) -> Expr {
    Expr::var(x_var_name(1, 0, 0)) * Expr::var(u_var_name(i, r1 + 1, r2))
        + Expr::var(x_var_name(2, 0, 0)) * Expr::var(u_var_name(i, r1, r2 + 1))
        + d_sigma_psi(i, r1, r2)
}

/// Value of the four generating expressions on a concrete field jet and
/// coefficient jet at the same base point.
pub fn psi_value<T: Scalar>(x: &VectorFieldJet<T>, theta: &JetPoint<T>) -> Result<[T; 4]> {
    if x.base != theta.base {
        return Err(Error::BaseMismatch);
    }
    x_order_check(x, 2)?;
    theta.require_order(1)?;
    let mut env = theta.env();
    env.extend(x.env());
    let mut out = Vec::with_capacity(4);
    for e in psi_exprs() {
        out.push(e.eval(&env)?);
    }
    Ok(out.try_into().ok().unwrap())
}

fn x_order_check<T: Scalar>(x: &VectorFieldJet<T>, need: usize) -> Result<()> {
    if x.order < need {
        return Err(Error::Order { need, got: x.order });
    }
    Ok(())
}

/// The lifted vector at a jet: base motion plus one fiber component per jet
/// coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedVector<T> {
    pub dx: [T; 2],
    /// Fiber components, stored with the same indexing as a jet.
    pub du: JetPoint<T>,
}

/// Evaluates the lifted field at a jet of the same order. The component
/// expressions formally mention coefficient derivatives one order above the
/// jet, but their net coefficient cancels between the transport term and
/// D_sigma psi, so the lift is well defined on the jet itself; the phantom
/// variables are bound to zero. Needs the field to order theta.order + 2.
pub fn lift_field<T: Scalar>(
    x: &VectorFieldJet<T>,
    theta: &JetPoint<T>,
) -> Result<LiftedVector<T>> {
    if x.base != theta.base {
        return Err(Error::BaseMismatch);
    }
    let k = theta.order;
    x_order_check(x, k + 2)?;
    let mut env = theta.env();
    for i in 0..4 {
        for r2 in 0..=k + 1 {
            env.insert(u_var_name(i, k + 1 - r2, r2), T::zero());
        }
    }
    env.extend(x.env());
    let mut du = JetPoint::zero(k, theta.base.clone());
    for i in 0..4 {
        for (r1, r2) in multi_indices(k) {
            du.set(i, r1, r2, lift_component_expr(i, r1, r2).eval(&env)?);
        }
    }
    Ok(LiftedVector { dx: x.at_base(), du })
}

/// Lie bracket of two field jets at the same point; the result is one order
/// lower.
pub fn bracket<T: Scalar>(
    x: &VectorFieldJet<T>,
    y: &VectorFieldJet<T>,
) -> Result<VectorFieldJet<T>> {
    if x.base != y.base {
        return Err(Error::BaseMismatch);
    }
    let m = x.order.min(y.order);
    if m == 0 {
        return Err(Error::Order { need: 1, got: 0 });
    }
    let xs = [x.component_series(1).truncate(m), x.component_series(2).truncate(m)];
    let ys = [y.component_series(1).truncate(m), y.component_series(2).truncate(m)];
    let mut out = VectorFieldJet::zero(m - 1, x.base.clone());
    for i in 1..=2 {
        let mut comp = Series2::zero(m - 1);
        for j in 0..2 {
            let xy = xs[j].truncate(m - 1).mul(&ys[i - 1].derivative(j + 1));
            let yx = ys[j].truncate(m - 1).mul(&xs[i - 1].derivative(j + 1));
            comp = comp.add(&xy).sub(&yx);
        }
        for (r1, r2) in multi_indices(m - 1) {
            out.set(i, r1, r2, comp.derivative_value(r1, r2));
        }
    }
    Ok(out)
}

/// Integrates the time-t flow of the field as a map jet at `p`: the truncated
/// Taylor expansion F(h, t) of the flow map around p, obeying dF/dt = X(F).
pub fn flow_map_jet(
    x: &[Expr; 2],
    p: [f64; 2],
    t: f64,
    order: usize,
    steps: usize,
) -> Result<MapJet<f64>> {
    let len = tri_len(order);
    let unpack = |state: &[f64]| MapJet::<f64> {
        comps: [
            Series2::from_coeffs(order, state[..len].to_vec()),
            Series2::from_coeffs(order, state[len..].to_vec()),
        ],
    };
    let deriv = |_: f64, state: &[f64]| -> Vec<f64> {
        let fj = unpack(state);
        let base = fj.image();
        let [d1, d2] = fj.displacement();
        let mut out = Vec::with_capacity(2 * len);
        for comp in &x[..] {
            match expr_series::<f64>(comp, &base, order) {
                Ok(s) => out.extend(s.compose(&d1, &d2).coeffs),
                Err(_) => return vec![f64::NAN; 2 * len],
            }
        }
        out
    };
    let id = MapJet::identity(order, &p);
    let mut state = id.comps[0].coeffs.clone();
    state.extend(id.comps[1].coeffs.clone());
    let end = rk4(deriv, state, 0.0, t, steps.max(1));
    if end.iter().any(|v| !v.is_finite()) {
        return Err(Error::FlowEscaped);
    }
    Ok(unpack(&end))
}

/// Flow steps used by the finite-difference generator check.
const FLOW_STEPS: usize = 200;

/// Finite-difference check value for the generating expressions: transports
/// the equation by the time t flow for t = +-dt, evaluates the transported
/// coefficients at the fixed point p via the source-form kernel at the
/// backward point, and takes the symmetric difference quotient.
pub fn flow_oracle(
    x: &[Expr; 2],
    s: &Section,
    p: [f64; 2],
    dt: f64,
) -> Result<[f64; 4]> {
    let point_flow = |t: f64| -> Result<[f64; 2]> {
        let deriv = |_: f64, st: &[f64]| -> Vec<f64> {
            let env: HashMap<String, f64> =
                [("x1".to_string(), st[0]), ("x2".to_string(), st[1])].into_iter().collect();
            match (x[0].eval(&env), x[1].eval(&env)) {
                (Ok(a), Ok(b)) => vec![a, b],
                _ => vec![f64::NAN, f64::NAN],
            }
        };
        let end = rk4(deriv, vec![p[0], p[1]], 0.0, t, FLOW_STEPS);
        if end.iter().any(|v| !v.is_finite()) {
            return Err(Error::FlowEscaped);
        }
        Ok([end[0], end[1]])
    };
    let coeffs_at_fixed_point = |t: f64| -> Result<[f64; 4]> {
        // the source point carried to p by the time-t flow
        let b = point_flow(-t)?;
        let fj = flow_map_jet(x, b, t, 2, FLOW_STEPS)?;
        let pd = PartialData {
            d: [
                [fj.comps[0].derivative_value(1, 0), fj.comps[0].derivative_value(0, 1)],
                [fj.comps[1].derivative_value(1, 0), fj.comps[1].derivative_value(0, 1)],
            ],
            d2: [
                [
                    fj.comps[0].derivative_value(2, 0),
                    fj.comps[0].derivative_value(1, 1),
                    fj.comps[0].derivative_value(0, 2),
                ],
                [
                    fj.comps[1].derivative_value(2, 0),
                    fj.comps[1].derivative_value(1, 1),
                    fj.comps[1].derivative_value(0, 2),
                ],
            ],
        };
        let env: HashMap<String, f64> =
            [("x1".to_string(), b[0]), ("x2".to_string(), b[1])].into_iter().collect();
        let u = [
            s.u[0].eval(&env)?,
            s.u[1].eval(&env)?,
            s.u[2].eval(&env)?,
            s.u[3].eval(&env)?,
        ];
        transformed_coeffs_source(&pd, &u)
    };
    // five-point stencil: the plain symmetric quotient's dt^2 truncation term
    // is comparable to the tolerance the oracle is held to
    let p1 = coeffs_at_fixed_point(dt)?;
    let m1 = coeffs_at_fixed_point(-dt)?;
    let p2 = coeffs_at_fixed_point(2.0 * dt)?;
    let m2 = coeffs_at_fixed_point(-2.0 * dt)?;
    let mut out = [0.0; 4];
    for i in 0..4 {
        out[i] = (8.0 * (p1[i] - m1[i]) - (p2[i] - m2[i])) / (12.0 * dt);
        if !out[i].is_finite() {
            return Err(Error::FlowEscaped);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::{self, parse};
    use crate::{rat, rat_int};

    fn xfield() -> [Expr; 2] {
        [
            parse("x1 + 2*x2", &["x1", "x2"]).unwrap(),
            parse("x1^2 - x2", &["x1", "x2"]).unwrap(),
        ]
    }

    #[test]
    fn generating_expressions_on_hand_jets() {
        let base = [rat_int(0), rat_int(0)];
        let x = VectorFieldJet::of_field(&xfield(), &base, 2).unwrap();
        // only the first derivative of the zeroth coefficient is nonzero
        let mut theta = JetPoint::zero(1, base.clone());
        theta.set(0, 1, 0, rat_int(5));
        let v = psi_value(&x, &theta).unwrap();
        assert_eq!(v, [rat_int(2), rat_int(0), rat_int(0), rat_int(0)]);

        // coefficient values u0 = 3, u1 = 4 switch on the order-one terms
        let mut theta = JetPoint::zero(1, base.clone());
        theta.set(0, 0, 0, rat_int(3));
        theta.set(1, 0, 0, rat_int(4));
        let v = psi_value(&x, &theta).unwrap();
        assert_eq!(v, [rat_int(-7), rat_int(-22), rat_int(-16), rat_int(0)]);
    }

    #[test]
    fn total_derivative_is_a_derivation() {
        let e = Expr::var("u0") * Expr::var("X1");
        let d = total_derivative(&e, 1);
        let expect = parse("u0d1*X1 + u0*X1d1", &["u0d1", "X1", "u0", "X1d1"]).unwrap();
        assert_eq!(
            symexpr::normalize(&(d - expect)).unwrap().is_zero(),
            true
        );
        // indices accumulate in sorted form
        let d2 = total_derivative(&Expr::var("u2d2"), 1);
        assert_eq!(d2.to_string(), "u2d12");
    }

    #[test]
    fn lift_respects_order_contracts() {
        let base = [rat_int(0), rat_int(0)];
        let x = VectorFieldJet::of_field(&xfield(), &base, 4).unwrap();
        let mut theta = JetPoint::zero(2, base.clone());
        theta.set(0, 1, 0, rat_int(5));
        let lifted = lift_field(&x, &theta).unwrap();
        assert_eq!(lifted.du.order, 2);
        assert_eq!(lifted.dx, [rat_int(0), rat_int(0)]);
        // order-0 component = X . grad u0 + psi0; the base value of X vanishes
        assert_eq!(*lifted.du.get(0, 0, 0), rat_int(2));

        let too_low = VectorFieldJet::of_field(&xfield(), &base, 3).unwrap();
        assert!(matches!(
            lift_field(&too_low, &theta),
            Err(Error::Order { need: 4, got: 3 })
        ));
    }

    #[test]
    fn zero_extension_does_not_change_the_lift() {
        // the lift components must not depend on X-derivatives above the
        // honest requirement even when the field jet carries them
        let base = [rat(1, 2), rat(-1, 3)];
        let x = VectorFieldJet::of_field(&xfield(), &base, 4).unwrap();
        let mut theta = JetPoint::zero(2, base.clone());
        let mut v = 1i64;
        for i in 0..4 {
            for (r1, r2) in multi_indices(2) {
                theta.set(i, r1, r2, rat(v, 7));
                v += 1;
            }
        }
        let a = lift_field(&x, &theta).unwrap();
        let b = lift_field(&x.extend(6), &theta).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn top_order_jet_values_cancel_out_of_the_lift() {
        // the raw component expression mentions coefficient derivatives one
        // order above sigma, but the transport term and D_sigma psi carry them
        // with opposite signs
        for i in 0..4 {
            for (r1, r2) in [(1usize, 0usize), (0, 1), (2, 0), (1, 1)] {
                let nf = symexpr::normalize(&lift_component_expr(i, r1, r2)).unwrap();
                let top: Vec<String> = nf
                    .to_expr()
                    .vars()
                    .into_iter()
                    .filter(|v| {
                        matches!(parse_jet_var(v), Some((JetVarKind::U, _, s1, s2)) if s1 + s2 > r1 + r2)
                    })
                    .collect();
                assert!(top.is_empty(), "component {i} {r1}{r2} keeps {top:?}");
            }
        }
    }

    #[test]
    fn bracket_of_simple_fields() {
        let base = [rat_int(0), rat_int(0)];
        let x = VectorFieldJet::of_field(
            &[Expr::one(), Expr::zero()],
            &base,
            2,
        )
        .unwrap();
        let y = VectorFieldJet::of_field(
            &[Expr::zero(), Expr::var("x1")],
            &base,
            2,
        )
        .unwrap();
        let b = bracket(&x, &y).unwrap();
        assert_eq!(b.order, 1);
        assert_eq!(*b.get(2, 0, 0), rat_int(1));
        assert_eq!(*b.get(1, 0, 0), rat_int(0));
        assert_eq!(*b.get(2, 1, 0), rat_int(0));
    }

    #[test]
    fn flow_oracle_matches_generating_expressions() {
        let s = Section::new([
            parse("3 + 5*x1", &["x1", "x2"]).unwrap(),
            Expr::int(4),
            Expr::zero(),
            Expr::zero(),
        ])
        .unwrap();
        let p = [0.0, 0.0];
        let numeric = flow_oracle(&xfield(), &s, p, 1e-3).unwrap();
        let x = VectorFieldJet::of_field(&xfield(), &p, 2).unwrap();
        let theta = s.jet_at(&p, 1).unwrap();
        let exact = psi_value(&x, &theta).unwrap();
        let expect = [-7.0, -22.0, -16.0, 0.0];
        for i in 0..4 {
            assert!((exact[i] - expect[i]).abs() < 1e-12, "psi[{i}] = {}", exact[i]);
            assert!(
                (numeric[i] - expect[i]).abs() < 1e-5,
                "flow[{i}] = {} vs {}",
                numeric[i],
                expect[i]
            );
        }
    }

    #[test]
    fn field_jet_json_round_trip() {
        let base = [rat(1, 2), rat_int(3)];
        let x = VectorFieldJet::of_field(&xfield(), &base, 2).unwrap();
        let text = x.to_json_string();
        let back = VectorFieldJet::from_json_str(&text).unwrap();
        assert_eq!(back, x);
    }
}
