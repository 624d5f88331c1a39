//! The curvature of the canonical horizontal directions along an equation
//! jet, and the two scalar functions F1, F2 it reduces to.
//!
//! For each base direction r there is a distinguished field jet E_r: value
//! e_r, first derivatives zero, higher derivatives chosen so the generating
//! expressions (and, at the next level, their first total derivatives)
//! vanish. The symmetry normalization at level one and the vanishing of the
//! first symbol prolongation at level two make these choices unique. The
//! mismatch
//!
//!   B_i_jk = f_i_(jk1),2 - f_i_(jk2),1
//!
//! between the two level-two frames lies in the two-dimensional symbol space,
//! and 3/2 times its extreme components are the functions F1, F2. An equation
//! is linearizable by point transformations exactly when both vanish
//! identically.

use crate::error::{Error, Result};
use crate::isotropy::{
    affine_row_poly, equation_poly, solve_unique, symbol_g, u_values_zero_extended,
    x_unknown_list, EqKind, RatMatrix,
};
use crate::jetspace::{x_var_name, JetPoint, Section};
use crate::pointmap::{pushforward_coeffs_source, PointTransform};
use crate::scalar::Scalar;
use crate::symexpr::poly::canonical_expr;
use crate::symexpr::zero::sample_rational;
use crate::symexpr::{is_zero_with, Atom, Expr, Verdict, ZeroConfig};
use crate::Rat;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, HashMap};

/// Chosen second derivatives of the two horizontal direction fields:
/// `f[i-1][jk][r-1]` with jk indexing 11, 12, 22.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame1<T> {
    pub f: [[[T; 2]; 3]; 2],
}

/// Third derivatives of the horizontal direction fields:
/// `f[i-1][jkl][r-1]` with jkl indexing 111, 112, 122, 222.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame2<T> {
    pub f: [[[T; 2]; 4]; 2],
}

/// Closed form of the level-one frame. Fully symmetric in the three lower
/// indices; each entry is a first derivative of a coefficient or a short
/// combination of two.
pub fn frame1_closed<T: Scalar>(theta: &JetPoint<T>) -> Result<Frame1<T>> {
    theta.require_order(1)?;
    let u = |i: usize, a: usize, b: usize| theta.get(i, a, b).clone();
    let two = T::from_i64(2);
    let third = |e: T| e / T::from_i64(3);
    let f = [
        // component i = 1, entries [jk][r]
        [
            [
                two.clone() * u(0, 0, 1) - u(1, 1, 0),
                third(u(1, 0, 1) - two.clone() * u(2, 1, 0)),
            ],
            [third(u(1, 0, 1) - two.clone() * u(2, 1, 0)), -u(3, 1, 0)],
            [-u(3, 1, 0), -u(3, 0, 1)],
        ],
        // component i = 2
        [
            [u(0, 1, 0), u(0, 0, 1)],
            [u(0, 0, 1), third(two.clone() * u(1, 0, 1) - u(2, 1, 0))],
            [
                third(two.clone() * u(1, 0, 1) - u(2, 1, 0)),
                u(2, 0, 1) - two * u(3, 1, 0),
            ],
        ],
    ];
    Ok(Frame1 { f })
}

/// Substitution entries pinning the direction field E_r at the point: value
/// e_r, first derivatives zero.
fn direction_values(values: &mut BTreeMap<Atom, Rat>, r: usize) {
    let delta = |k: usize| if k == r { Rat::one() } else { Rat::zero() };
    values.insert(Atom::Var(x_var_name(1, 0, 0)), delta(1));
    values.insert(Atom::Var(x_var_name(2, 0, 0)), delta(2));
    for name in x_unknown_list(1, 1) {
        values.insert(Atom::Var(name), Rat::zero());
    }
}

fn zero_frame1() -> Frame1<Rat> {
    Frame1 {
        f: std::array::from_fn(|_| std::array::from_fn(|_| std::array::from_fn(|_| Rat::zero()))),
    }
}

fn zero_frame2() -> Frame2<Rat> {
    Frame2 {
        f: std::array::from_fn(|_| std::array::from_fn(|_| std::array::from_fn(|_| Rat::zero()))),
    }
}

/// Level-one frame by solving its defining system: the eight vanishing
/// conditions for the generating expressions on E_1 and E_2 plus the four
/// symmetry identifications, twelve equations in twelve unknowns.
pub fn frame1_constructive(theta: &JetPoint<Rat>) -> Result<Frame1<Rat>> {
    theta.require_order(1)?;
    let grade2 = x_unknown_list(2, 2);
    let cols = 2 * grade2.len();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for r in 1..=2usize {
        let mut values = u_values_zero_extended(theta, 1);
        direction_values(&mut values, r);
        for i in 0..4 {
            let eq = equation_poly(EqKind::DPsi, i, 0, 0);
            let (row6, c) = affine_row_poly(&eq.0, &eq.1, &grade2, &values)?;
            let mut row = vec![Rat::zero(); cols];
            for (k, v) in row6.into_iter().enumerate() {
                row[(r - 1) * grade2.len() + k] = v;
            }
            rows.push(row);
            rhs.push(-c);
        }
    }
    // position of X{i}d{jk} inside one direction block
    let pos = |i: usize, jk: usize| (i - 1) * 3 + jk;
    for i in 1..=2usize {
        for (left, right) in [(0usize, 1usize), (1, 2)] {
            // entry jk = left of E_2 equals entry jk = right of E_1
            let mut row = vec![Rat::zero(); cols];
            row[grade2.len() + pos(i, left)] = Rat::one();
            row[pos(i, right)] = -Rat::one();
            rows.push(row);
            rhs.push(Rat::zero());
        }
    }
    let x = solve_unique(&RatMatrix::from_rows(rows), &rhs)?;
    let mut out = zero_frame1();
    for i in 1..=2usize {
        for jk in 0..3 {
            for r in 1..=2usize {
                out.f[i - 1][jk][r - 1] = x[(r - 1) * grade2.len() + pos(i, jk)].clone();
            }
        }
    }
    Ok(out)
}

/// Level-two frame: for each direction the eight first total derivatives of
/// the generating expressions vanish on E_r, an eight-by-eight system on the
/// third derivatives. Unique because the symbol has no first prolongation.
pub fn frame2(theta: &JetPoint<Rat>) -> Result<Frame2<Rat>> {
    theta.require_order(2)?;
    let f1 = frame1_closed(theta)?;
    let grade3 = x_unknown_list(3, 3);
    let jk_rs = [(2usize, 0usize), (1, 1), (0, 2)];
    let mut out = zero_frame2();
    for r in 1..=2usize {
        let mut values = u_values_zero_extended(theta, 2);
        direction_values(&mut values, r);
        for i in 1..=2usize {
            for (jk, &(a, b)) in jk_rs.iter().enumerate() {
                values.insert(Atom::Var(x_var_name(i, a, b)), f1.f[i - 1][jk][r - 1].clone());
            }
        }
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for sigma in [(1usize, 0usize), (0, 1)] {
            for i in 0..4 {
                let eq = equation_poly(EqKind::DPsi, i, sigma.0, sigma.1);
                let (row, c) = affine_row_poly(&eq.0, &eq.1, &grade3, &values)?;
                rows.push(row);
                rhs.push(-c);
            }
        }
        let x = solve_unique(&RatMatrix::from_rows(rows), &rhs)?;
        for i in 1..=2usize {
            for jkl in 0..4 {
                out.f[i - 1][jkl][r - 1] = x[(i - 1) * 4 + jkl].clone();
            }
        }
    }
    Ok(out)
}

/// The two scalar invariants straight from the second jet of the
/// coefficients.
pub fn invariants_closed_form<T: Scalar>(theta: &JetPoint<T>) -> Result<[T; 2]> {
    theta.require_order(2)?;
    let u = |i: usize, a: usize, b: usize| theta.get(i, a, b).clone();
    let c = |n: i64| T::from_i64(n);
    let f1 = c(3) * u(0, 0, 2) - c(2) * u(1, 1, 1) + u(2, 2, 0)
        + c(3) * u(3, 0, 0) * u(0, 1, 0)
        - c(3) * u(2, 0, 0) * u(0, 0, 1)
        + c(2) * u(1, 0, 0) * u(1, 0, 1)
        - u(1, 0, 0) * u(2, 1, 0)
        - c(3) * u(0, 0, 0) * u(2, 0, 1)
        + c(6) * u(0, 0, 0) * u(3, 1, 0);
    let f2 = u(1, 0, 2) - c(2) * u(2, 1, 1) + c(3) * u(3, 2, 0)
        - c(3) * u(0, 0, 0) * u(3, 0, 1)
        + c(3) * u(1, 0, 0) * u(3, 1, 0)
        - c(2) * u(2, 0, 0) * u(2, 1, 0)
        + u(2, 0, 0) * u(1, 0, 1)
        + c(3) * u(3, 0, 0) * u(1, 1, 0)
        - c(6) * u(3, 0, 0) * u(0, 0, 1);
    Ok([f1, f2])
}

/// The obstruction at a second-order jet, computed twice: once through the
/// level-two frames and once through the closed forms. The routes must agree
/// exactly and the mismatch tensor must lie in the symbol space.
#[derive(Debug, Clone, PartialEq)]
pub struct ObstructionData {
    pub f: [Rat; 2],
    /// Components of the mismatch tensor over X1d11, X1d12, X1d22, X2d11,
    /// X2d12, X2d22.
    pub tensor: Vec<Rat>,
    /// Coordinates of the tensor against the two pinned symbol generators.
    pub symbol_coords: [Rat; 2],
}

pub fn obstruction_at(theta: &JetPoint<Rat>) -> Result<ObstructionData> {
    theta.require_order(2)?;
    let constructive = frame1_constructive(theta)?;
    let closed = frame1_closed(theta)?;
    if constructive != closed {
        return Err(Error::Invalid("level-one frame routes disagree".into()));
    }
    let f2 = frame2(theta)?;
    // sorted index pairs after appending 1 respectively 2 to jk
    let appended = [(0usize, 1usize), (1, 2), (2, 3)];
    let mut tensor = Vec::with_capacity(6);
    for i in 0..2 {
        for &(app1, app2) in &appended {
            tensor.push(f2.f[i][app1][1].clone() - f2.f[i][app2][0].clone());
        }
    }
    let symbol = symbol_g();
    let coords = symbol
        .coordinates_of(&tensor)
        .ok_or_else(|| Error::Invalid("obstruction tensor escaped the symbol space".into()))?;
    let half3 = Rat::new(3.into(), 2.into());
    let from_frames = [half3.clone() * tensor[0].clone(), half3 * tensor[5].clone()];
    let from_closed = invariants_closed_form(theta)?;
    if from_frames != from_closed {
        return Err(Error::Invalid("invariant routes disagree".into()));
    }
    Ok(ObstructionData {
        f: from_closed,
        tensor,
        symbol_coords: [coords[0].clone(), coords[1].clone()],
    })
}

/// The closed forms with the derivative operators abstracted, so the same
/// skeleton serves both coordinate systems.
fn curvature_scalars(
    u: &[Expr; 4],
    d1: &dyn Fn(&Expr) -> Expr,
    d2: &dyn Fn(&Expr) -> Expr,
) -> (Expr, Expr) {
    let c = |n: i64| Expr::int(n);
    let f1 = c(3) * d2(&d2(&u[0])) - c(2) * d1(&d2(&u[1])) + d1(&d1(&u[2]))
        + c(3) * u[3].clone() * d1(&u[0])
        - c(3) * u[2].clone() * d2(&u[0])
        + c(2) * u[1].clone() * d2(&u[1])
        - u[1].clone() * d1(&u[2])
        - c(3) * u[0].clone() * d2(&u[2])
        + c(6) * u[0].clone() * d1(&u[3]);
    let f2 = d2(&d2(&u[1])) - c(2) * d1(&d2(&u[2])) + c(3) * d1(&d1(&u[3]))
        - c(3) * u[0].clone() * d2(&u[3])
        + c(3) * u[1].clone() * d1(&u[3])
        - c(2) * u[2].clone() * d1(&u[2])
        + u[2].clone() * d2(&u[1])
        + c(3) * u[3].clone() * d1(&u[1])
        - c(6) * u[3].clone() * d2(&u[0]);
    (f1, f2)
}

/// The two invariants of an equation as functions on the plane.
pub fn obstruction_form(s: &Section) -> Result<(Expr, Expr)> {
    Ok(curvature_scalars(&s.u, &|e| e.diff("x1"), &|e| e.diff("x2")))
}

/// The invariants of the transformed equation, expressed in the source
/// coordinates (each returned expression is the target-side function composed
/// with the map). No inverse of the map is needed: the transformed
/// coefficients composed with f are rational in f's partials, and the
/// target-side coordinate derivatives pull back to the twisted operators
///
///   Dt1 = (f2_2 d1 - f2_1 d2) / J,   Dt2 = (-f1_2 d1 + f1_1 d2) / J.
pub fn obstruction_pullback(f: &PointTransform, s: &Section) -> Result<(Expr, Expr)> {
    let w = pushforward_coeffs_source(f, s)?;
    let pd = f.partials_exprs();
    let jac = pd.d[0][0].clone() * pd.d[1][1].clone() - pd.d[0][1].clone() * pd.d[1][0].clone();
    let f22 = pd.d[1][1].clone();
    let f21 = pd.d[1][0].clone();
    let f12 = pd.d[0][1].clone();
    let f11 = pd.d[0][0].clone();
    let j1 = jac.clone();
    let d1 = move |e: &Expr| (f22.clone() * e.diff("x1") - f21.clone() * e.diff("x2")) / j1.clone();
    let d2 = move |e: &Expr| {
        (f11.clone() * e.diff("x2") - f12.clone() * e.diff("x1")) / jac.clone()
    };
    Ok(curvature_scalars(&w, &d1, &d2))
}

/// Predicted invariants at the image of a jet from the invariants at the jet
/// and the Jacobian of the map there: the mismatch tensor transforms as a
/// tensor with one upper and two lower slots, scaled by the inverse Jacobian
/// determinant.
pub fn tensor_transform(f: &[Rat; 2], l: &[[Rat; 2]; 2]) -> Result<[Rat; 2]> {
    let det = l[0][0].clone() * l[1][1].clone() - l[0][1].clone() * l[1][0].clone();
    if det.is_zero() {
        return Err(Error::SingularJacobian);
    }
    let linv = [
        [l[1][1].clone() / det.clone(), -l[0][1].clone() / det.clone()],
        [-l[1][0].clone() / det.clone(), l[0][0].clone() / det.clone()],
    ];
    let third = Rat::new(1.into(), 3.into());
    let two_thirds = Rat::new(2.into(), 3.into());
    // B = (f1 e1 + f2 e2) / 3 over the symmetric slots (11, 12, 22)
    let b = [
        [
            two_thirds.clone() * f[0].clone(),
            third.clone() * f[1].clone(),
            Rat::zero(),
        ],
        [
            Rat::zero(),
            third * f[0].clone(),
            two_thirds * f[1].clone(),
        ],
    ];
    let slot = |j: usize, k: usize| j + k; // 0-based symmetric pair index
    let mut bt = [[Rat::zero(), Rat::zero(), Rat::zero()], [
        Rat::zero(),
        Rat::zero(),
        Rat::zero(),
    ]];
    for i in 0..2 {
        for (j, k) in [(0usize, 0usize), (0, 1), (1, 1)] {
            let mut acc = Rat::zero();
            for a in 0..2 {
                for bb in 0..2 {
                    for cc in 0..2 {
                        acc += l[i][a].clone()
                            * b[a][slot(bb, cc)].clone()
                            * linv[bb][j].clone()
                            * linv[cc][k].clone();
                    }
                }
            }
            bt[i][slot(j, k)] = acc / det.clone();
        }
    }
    let tensor = vec![
        bt[0][0].clone(),
        bt[0][1].clone(),
        bt[0][2].clone(),
        bt[1][0].clone(),
        bt[1][1].clone(),
        bt[1][2].clone(),
    ];
    let coords = symbol_g()
        .coordinates_of(&tensor)
        .ok_or_else(|| Error::Invalid("transformed tensor escaped the symbol space".into()))?;
    let three = Rat::new(3.into(), 1.into());
    Ok([three.clone() * coords[0].clone(), three * coords[1].clone()])
}

#[derive(Debug, Clone, PartialEq)]
pub enum LinearizabilityVerdict {
    /// Both invariants are identically zero as exact rational functions.
    Linearizable,
    /// Zero at every sample, but transcendental atoms blocked an exact proof.
    NumericallyLinearizable,
    /// At least one invariant is a nonzero rational function.
    NotLinearizable,
}

/// An exact rational point where one invariant provably does not vanish.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub point: [Rat; 2],
    /// 1 or 2.
    pub component: usize,
    pub value: Rat,
}

#[derive(Debug, Clone)]
pub struct LinearizabilityReport {
    pub f: (Expr, Expr),
    pub verdicts: [Verdict; 2],
    pub verdict: LinearizabilityVerdict,
    pub witness: Option<Witness>,
}

pub fn linearizable(s: &Section) -> Result<LinearizabilityReport> {
    linearizable_with(s, &ZeroConfig::default())
}

pub fn linearizable_with(s: &Section, cfg: &ZeroConfig) -> Result<LinearizabilityReport> {
    let (f1, f2) = obstruction_form(s)?;
    let v1 = is_zero_with(&f1, cfg)?;
    let v2 = is_zero_with(&f2, cfg)?;
    let any_nonzero = matches!(v1, Verdict::ProvenNonZero) || matches!(v2, Verdict::ProvenNonZero);
    let all_proven = matches!(v1, Verdict::ProvenZero) && matches!(v2, Verdict::ProvenZero);
    let verdict = if any_nonzero {
        LinearizabilityVerdict::NotLinearizable
    } else if all_proven {
        LinearizabilityVerdict::Linearizable
    } else {
        LinearizabilityVerdict::NumericallyLinearizable
    };
    let witness = if any_nonzero && s.is_rational() {
        rational_witness(&[&f1, &f2], &[&v1, &v2], cfg)
    } else {
        None
    };
    Ok(LinearizabilityReport {
        f: (canonical_expr(&f1)?, canonical_expr(&f2)?),
        verdicts: [v1, v2],
        verdict,
        witness,
    })
}

fn rational_witness(f: &[&Expr; 2], verdicts: &[&Verdict; 2], cfg: &ZeroConfig) -> Option<Witness> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.samples * 20 + 100 {
        let p = [sample_rational(&mut rng, cfg), sample_rational(&mut rng, cfg)];
        let env: HashMap<String, Rat> =
            [("x1".to_string(), p[0].clone()), ("x2".to_string(), p[1].clone())]
                .into_iter()
                .collect();
        for (k, e) in f.iter().enumerate() {
            if !matches!(verdicts[k], Verdict::ProvenNonZero) {
                continue;
            }
            if let Ok(v) = e.eval::<Rat>(&env) {
                if !v.is_zero() {
                    return Some(Witness { point: p, component: k + 1, value: v });
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetspace::rhs_to_section;
    use crate::symexpr::zero::assert_proven_zero;
    use crate::symexpr::parse;
    use crate::{rat, rat_int};

    fn jet_of(rhs: &str, p: [i64; 2], order: usize) -> JetPoint<Rat> {
        rhs_to_section(rhs)
            .unwrap()
            .jet_at(&[rat_int(p[0]), rat_int(p[1])], order)
            .unwrap()
    }

    #[test]
    fn frame_routes_agree_on_sample_jets() {
        for (rhs, p) in [
            ("y*y", [1i64, 2i64]),
            ("y*p^3 + x*p - 1/2", [2, -1]),
            ("6*y*y + x", [0, 3]),
        ] {
            let theta = jet_of(rhs, p, 1);
            assert_eq!(frame1_constructive(&theta).unwrap(), frame1_closed(&theta).unwrap());
        }
    }

    #[test]
    fn frame_values_on_a_known_jet() {
        // second derivative = square of the value, at the point (1, 2)
        let theta = jet_of("y*y", [1, 2], 1);
        let f = frame1_closed(&theta).unwrap();
        // u0 = x2^2 there: u0_1 = 0, u0_2 = 4, everything else zero
        assert_eq!(f.f[1][0][0], rat_int(0)); // f2_11,1 = u0_1
        assert_eq!(f.f[1][0][1], rat_int(4)); // f2_11,2 = u0_2
        assert_eq!(f.f[0][0][0], rat_int(8)); // f1_11,1 = 2 u0_2 - u1_1
        assert_eq!(f.f[0][0][1], rat_int(0));
        assert_eq!(f.f[0][2][1], rat_int(0));
        assert_eq!(f.f[1][2][1], rat_int(0));
    }

    #[test]
    fn known_equations_have_frozen_invariants() {
        let d = obstruction_at(&jet_of("y*y", [1, 2], 2)).unwrap();
        assert_eq!(d.f, [rat_int(6), rat_int(0)]);
        assert_eq!(d.symbol_coords, [rat_int(2), rat_int(0)]);
        assert_eq!(
            d.tensor,
            vec![rat_int(4), rat_int(0), rat_int(0), rat_int(0), rat_int(2), rat_int(0)]
        );

        let d = obstruction_at(&jet_of("6*y*y + x", [0, 3], 2)).unwrap();
        assert_eq!(d.f, [rat_int(36), rat_int(0)]);

        let d = obstruction_at(&jet_of("0", [5, -2], 2)).unwrap();
        assert_eq!(d.f, [rat_int(0), rat_int(0)]);
    }

    #[test]
    fn symbolic_form_matches_the_pointwise_value() {
        let s = rhs_to_section("y*p^3 + x*p - 1/2").unwrap();
        let (f1, f2) = obstruction_form(&s).unwrap();
        let p = [rat(1, 3), rat(-1, 2)];
        let env: HashMap<String, Rat> =
            [("x1".to_string(), p[0].clone()), ("x2".to_string(), p[1].clone())]
                .into_iter()
                .collect();
        let theta = s.jet_at(&p, 2).unwrap();
        let exact = invariants_closed_form(&theta).unwrap();
        assert_eq!(f1.eval::<Rat>(&env).unwrap(), exact[0]);
        assert_eq!(f2.eval::<Rat>(&env).unwrap(), exact[1]);
        assert_eq!(obstruction_at(&theta).unwrap().f, exact);
    }

    #[test]
    fn pullback_agrees_with_the_target_side_form() {
        let f = PointTransform::parse("x", "y + x^2").unwrap();
        let s = rhs_to_section("y*y").unwrap();
        let (tilde_s, _g) = crate::pointmap::pushforward_equation(&f, &s).unwrap();
        let (t1, t2) = obstruction_form(&tilde_s).unwrap();
        let subs: HashMap<String, Expr> = [
            ("x1".to_string(), f.f[0].clone()),
            ("x2".to_string(), f.f[1].clone()),
        ]
        .into_iter()
        .collect();
        let (p1, p2) = obstruction_pullback(&f, &s).unwrap();
        assert_proven_zero(&(t1.substitute(&subs) - p1));
        assert_proven_zero(&(t2.substitute(&subs) - p2));
    }

    #[test]
    fn pullback_of_the_flat_equation_is_flat() {
        let f = PointTransform::parse("x + y^2/4", "y - x^3/8").unwrap();
        let s = Section::zero();
        let (p1, p2) = obstruction_pullback(&f, &s).unwrap();
        assert_proven_zero(&p1);
        assert_proven_zero(&p2);
    }

    #[test]
    fn tensor_law_on_identity_and_swap() {
        let f = [rat_int(6), rat_int(0)];
        let id = [[rat_int(1), rat_int(0)], [rat_int(0), rat_int(1)]];
        assert_eq!(tensor_transform(&f, &id).unwrap(), f);
        let swap = [[rat_int(0), rat_int(1)], [rat_int(1), rat_int(0)]];
        assert_eq!(tensor_transform(&f, &swap).unwrap(), [rat_int(0), rat_int(-6)]);
        let singular = [[rat_int(1), rat_int(1)], [rat_int(2), rat_int(2)]];
        assert!(matches!(tensor_transform(&f, &singular), Err(Error::SingularJacobian)));
    }

    #[test]
    fn verdicts_on_known_sections() {
        let report = linearizable(&rhs_to_section("y*y").unwrap()).unwrap();
        assert_eq!(report.verdict, LinearizabilityVerdict::NotLinearizable);
        let w = report.witness.expect("rational witness");
        assert_eq!(w.component, 1);
        assert!(!w.value.is_zero());

        let report = linearizable(&Section::zero()).unwrap();
        assert_eq!(report.verdict, LinearizabilityVerdict::Linearizable);

        // the image of the flat equation under (x, e^y): u2 = 1/x2
        let s = Section::new([
            Expr::zero(),
            Expr::zero(),
            parse("1/x2", &["x2"]).unwrap(),
            Expr::zero(),
        ])
        .unwrap();
        let report = linearizable(&s).unwrap();
        assert_eq!(report.verdict, LinearizabilityVerdict::Linearizable);
    }

    #[test]
    fn transcendental_image_of_flat_is_numerically_linearizable() {
        // push the flat equation through (x, y cos x) and test the image
        let f = PointTransform::parse("x", "y*cos(x)").unwrap();
        let (tilde_s, _g) = crate::pointmap::pushforward_equation(&f, &Section::zero()).unwrap();
        let report = linearizable(&tilde_s).unwrap();
        assert!(matches!(
            report.verdict,
            LinearizabilityVerdict::Linearizable | LinearizabilityVerdict::NumericallyLinearizable
        ));
        assert_ne!(report.verdict, LinearizabilityVerdict::NotLinearizable);
    }

    #[test]
    fn order_contract_is_enforced() {
        let theta = jet_of("y*y", [1, 2], 1);
        assert!(matches!(
            obstruction_at(&theta),
            Err(Error::Order { need: 2, got: 1 })
        ));
    }
}
