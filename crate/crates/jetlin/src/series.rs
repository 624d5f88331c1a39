//! Truncated bivariate power series and plane map jets.
//!
//! A `Series2` holds the coefficients of a polynomial in two displacement
//! variables h1, h2 up to a fixed total degree, in dense triangular layout.
//! Coefficients are *monomial* coefficients: the stored value at (r1, r2) is
//! the coefficient of h1^r1 h2^r2, which is the corresponding partial
//! derivative divided by r1! r2!. Arithmetic (including multiplication,
//! division by a unit, and composition) truncates at the fixed order, so on an
//! exact scalar every operation is exact jet arithmetic.
//!
//! A `MapJet` is a pair of series: the jet of a plane map at a point,
//! expressed as series in the displacement from that point. Map jets compose,
//! and a map jet with invertible linear part inverts degree by degree.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::symexpr::Expr;
use crate::Rat;
use num_traits::Zero;

/// Number of monomials of total degree <= order in two variables.
pub fn tri_len(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

/// Dense index of the monomial h1^r1 h2^r2: degrees are laid out consecutively,
/// within a degree r2 ascends.
pub fn tri_idx(r1: usize, r2: usize) -> usize {
    let d = r1 + r2;
    d * (d + 1) / 2 + r2
}

/// Enumerates (r1, r2) in storage order up to the given total degree.
pub fn multi_indices(order: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..=order).flat_map(|d| (0..=d).map(move |r2| (d - r2, r2)))
}

pub fn factorial<T: Scalar>(n: usize) -> T {
    let mut acc: i64 = 1;
    for k in 2..=n as i64 {
        acc *= k;
    }
    T::from_i64(acc)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series2<T> {
    pub order: usize,
    pub coeffs: Vec<T>,
}

impl<T: Scalar> Series2<T> {
    pub fn zero(order: usize) -> Self {
        Series2 { order, coeffs: vec![T::zero(); tri_len(order)] }
    }

    pub fn constant(order: usize, c: T) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// The series of the displacement coordinate h_j itself (j is 1 or 2).
    pub fn variable(order: usize, j: usize) -> Self {
        assert!(j == 1 || j == 2);
        assert!(order >= 1);
        let mut s = Self::zero(order);
        let idx = if j == 1 { tri_idx(1, 0) } else { tri_idx(0, 1) };
        s.coeffs[idx] = T::one();
        s
    }

    pub fn from_coeffs(order: usize, coeffs: Vec<T>) -> Self {
        assert_eq!(coeffs.len(), tri_len(order));
        Series2 { order, coeffs }
    }

    pub fn get(&self, r1: usize, r2: usize) -> &T {
        &self.coeffs[tri_idx(r1, r2)]
    }

    pub fn set(&mut self, r1: usize, r2: usize, v: T) {
        self.coeffs[tri_idx(r1, r2)] = v;
    }

    pub fn constant_term(&self) -> &T {
        &self.coeffs[0]
    }

    /// Builds a series from derivative data: `deriv(r1, r2)` is the partial
    /// derivative of the represented function, which is divided by r1! r2!.
    pub fn from_derivatives(order: usize, mut deriv: impl FnMut(usize, usize) -> T) -> Self {
        let mut s = Self::zero(order);
        for (r1, r2) in multi_indices(order) {
            let fact = factorial::<T>(r1) * factorial::<T>(r2);
            s.set(r1, r2, deriv(r1, r2) / fact);
        }
        s
    }

    /// The partial derivative value encoded at (r1, r2): coefficient times r1! r2!.
    pub fn derivative_value(&self, r1: usize, r2: usize) -> T {
        self.get(r1, r2).clone() * factorial::<T>(r1) * factorial::<T>(r2)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.order, other.order);
        Series2 {
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Series2 {
            order: self.order,
            coeffs: self.coeffs.iter().map(|a| T::zero() - a.clone()).collect(),
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        Series2 {
            order: self.order,
            coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.order, other.order);
        let mut out = Self::zero(self.order);
        for (a1, a2) in multi_indices(self.order) {
            let ca = self.get(a1, a2);
            if ca.is_zero() {
                continue;
            }
            for (b1, b2) in multi_indices(self.order - (a1 + a2)) {
                let cb = other.get(b1, b2);
                if cb.is_zero() {
                    continue;
                }
                let idx = tri_idx(a1 + b1, a2 + b2);
                out.coeffs[idx] = out.coeffs[idx].clone() + ca.clone() * cb.clone();
            }
        }
        out
    }

    /// Division by a series whose constant term is nonzero, solved degree by
    /// degree from `self = out * other`.
    pub fn div(&self, other: &Self) -> Result<Self> {
        assert_eq!(self.order, other.order);
        let c0 = other.constant_term().clone();
        if c0.is_zero() {
            return Err(Error::ZeroDenominator("series with zero constant term".into()));
        }
        let mut out = Self::zero(self.order);
        for (s1, s2) in multi_indices(self.order) {
            // out[s] * c0 = self[s] - sum over strictly smaller tau of out[tau] * other[s - tau]
            let mut acc = self.get(s1, s2).clone();
            for (t1, t2) in multi_indices(s1 + s2) {
                if t1 > s1 || t2 > s2 || (t1 == s1 && t2 == s2) {
                    continue;
                }
                acc = acc - out.get(t1, t2).clone() * other.get(s1 - t1, s2 - t2).clone();
            }
            out.set(s1, s2, acc / c0.clone());
        }
        Ok(out)
    }

    /// Substitutes the two argument series (each with zero constant term) for
    /// h1 and h2, truncating at the common order.
    pub fn compose(&self, a1: &Self, a2: &Self) -> Self {
        assert_eq!(self.order, a1.order);
        assert_eq!(self.order, a2.order);
        assert!(a1.constant_term().is_zero() && a2.constant_term().is_zero());
        let m = self.order;
        // powers of the arguments up to the order; higher powers vanish after
        // truncation because the arguments have no constant term
        let mut p1: Vec<Series2<T>> = Vec::with_capacity(m + 1);
        let mut p2: Vec<Series2<T>> = Vec::with_capacity(m + 1);
        p1.push(Self::constant(m, T::one()));
        p2.push(Self::constant(m, T::one()));
        for k in 1..=m {
            p1.push(p1[k - 1].mul(a1));
            p2.push(p2[k - 1].mul(a2));
        }
        let mut out = Self::zero(m);
        for (r1, r2) in multi_indices(m) {
            let c = self.get(r1, r2);
            if c.is_zero() {
                continue;
            }
            out = out.add(&p1[r1].mul(&p2[r2]).scale(c));
        }
        out
    }

    /// Formal partial derivative with respect to h_j; the order drops by one.
    pub fn derivative(&self, j: usize) -> Self {
        assert!(j == 1 || j == 2);
        assert!(self.order >= 1);
        let mut out = Self::zero(self.order - 1);
        for (r1, r2) in multi_indices(self.order - 1) {
            let (s1, s2) = if j == 1 { (r1 + 1, r2) } else { (r1, r2 + 1) };
            let mult = T::from_i64(if j == 1 { s1 as i64 } else { s2 as i64 });
            out.set(r1, r2, self.get(s1, s2).clone() * mult);
        }
        out
    }

    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order);
        Series2 { order, coeffs: self.coeffs[..tri_len(order)].to_vec() }
    }

    pub fn extend(&self, order: usize) -> Self {
        assert!(order >= self.order);
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(tri_len(order), T::zero());
        Series2 { order, coeffs }
    }

    /// Keeps only the total-degree-d coefficients.
    pub fn homogeneous_part(&self, d: usize) -> Self {
        let mut out = Self::zero(self.order);
        for (r1, r2) in multi_indices(self.order) {
            if r1 + r2 == d {
                out.set(r1, r2, self.get(r1, r2).clone());
            }
        }
        out
    }

    pub fn eval(&self, h1: &T, h2: &T) -> T {
        let mut acc = T::zero();
        for (r1, r2) in multi_indices(self.order) {
            let c = self.get(r1, r2);
            if c.is_zero() {
                continue;
            }
            let mut term = c.clone();
            for _ in 0..r1 {
                term = term * h1.clone();
            }
            for _ in 0..r2 {
                term = term * h2.clone();
            }
            acc = acc + term;
        }
        acc
    }

    pub fn is_zero_series(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

/// Jet of a plane map at a point: two series in the displacement from the
/// source point. The constant terms form the image point.
#[derive(Debug, Clone, PartialEq)]
pub struct MapJet<T> {
    pub comps: [Series2<T>; 2],
}

impl<T: Scalar> MapJet<T> {
    pub fn order(&self) -> usize {
        self.comps[0].order
    }

    pub fn identity(order: usize, center: &[T; 2]) -> Self {
        let mut c1 = Series2::constant(order, center[0].clone());
        let mut c2 = Series2::constant(order, center[1].clone());
        c1.set(1, 0, T::one());
        c2.set(0, 1, T::one());
        MapJet { comps: [c1, c2] }
    }

    pub fn image(&self) -> [T; 2] {
        [
            self.comps[0].constant_term().clone(),
            self.comps[1].constant_term().clone(),
        ]
    }

    /// linear()[i][j] is the coefficient of h_{j+1} in component i+1.
    pub fn linear(&self) -> [[T; 2]; 2] {
        [
            [self.comps[0].get(1, 0).clone(), self.comps[0].get(0, 1).clone()],
            [self.comps[1].get(1, 0).clone(), self.comps[1].get(0, 1).clone()],
        ]
    }

    /// Components with the constant term removed.
    pub fn displacement(&self) -> [Series2<T>; 2] {
        let mut d = self.comps.clone();
        d[0].coeffs[0] = T::zero();
        d[1].coeffs[0] = T::zero();
        d
    }

    /// Jet of `after` following `self`: requires `after` to be the jet of the
    /// second map at this map's image point.
    pub fn then(&self, after: &MapJet<T>) -> MapJet<T> {
        let [d1, d2] = self.displacement();
        MapJet {
            comps: [
                after.comps[0].compose(&d1, &d2),
                after.comps[1].compose(&d1, &d2),
            ],
        }
    }
}

/// Taylor series of an expression in x1, x2 at a base point, as a series in
/// the displacement. Exact on the exact scalar for rational expressions.
pub fn expr_series<T: Scalar>(e: &Expr, base: &[T; 2], order: usize) -> Result<Series2<T>> {
    use std::collections::HashMap;
    let env: HashMap<String, T> =
        [("x1".to_string(), base[0].clone()), ("x2".to_string(), base[1].clone())]
            .into_iter()
            .collect();
    // derivative expressions filled degree by degree
    let mut table: Vec<Expr> = vec![Expr::zero(); tri_len(order)];
    table[0] = e.clone();
    for (r1, r2) in multi_indices(order) {
        if r1 + r2 == 0 {
            continue;
        }
        table[tri_idx(r1, r2)] = if r1 > 0 {
            table[tri_idx(r1 - 1, r2)].diff("x1")
        } else {
            table[tri_idx(r1, r2 - 1)].diff("x2")
        };
    }
    let mut values: Vec<T> = Vec::with_capacity(tri_len(order));
    for (r1, r2) in multi_indices(order) {
        values.push(table[tri_idx(r1, r2)].eval(&env)?);
    }
    Ok(Series2::from_derivatives(order, |r1, r2| {
        values[tri_idx(r1, r2)].clone()
    }))
}

/// Inverts a 2x2 matrix of scalars.
pub fn invert_2x2<T: Scalar>(m: &[[T; 2]; 2]) -> Result<[[T; 2]; 2]> {
    let det = m[0][0].clone() * m[1][1].clone() - m[0][1].clone() * m[1][0].clone();
    if det.is_zero() {
        return Err(Error::SingularJacobian);
    }
    Ok([
        [m[1][1].clone() / det.clone(), T::zero() - m[0][1].clone() / det.clone()],
        [T::zero() - m[1][0].clone() / det.clone(), m[0][0].clone() / det.clone()],
    ])
}

/// Inverts a map jet degree by degree. `center` is the source point of `f`;
/// the result is the jet at `f`'s image point of the inverse map, satisfying
/// `f.then(&g) == identity at center` through the full order. Fails when the
/// linear part is singular.
pub fn inverse_map_jet<T: Scalar>(f: &MapJet<T>, center: &[T; 2]) -> Result<MapJet<T>> {
    let m = f.order();
    assert!(m >= 1, "inversion needs at least the linear part");
    let linv = invert_2x2(&f.linear())?;
    let mut g = MapJet {
        comps: [
            Series2::constant(m, center[0].clone()),
            Series2::constant(m, center[1].clone()),
        ],
    };
    for i in 0..2 {
        g.comps[i].set(1, 0, linv[i][0].clone());
        g.comps[i].set(0, 1, linv[i][1].clone());
    }
    if m >= 2 {
        let id = MapJet::identity(m, center);
        // the linear substitution k -> Linv k used to push corrections back
        // through the leading part of f
        let lin1 = Series2::variable(m, 1).scale(&linv[0][0]).add(&Series2::variable(m, 2).scale(&linv[0][1]));
        let lin2 = Series2::variable(m, 1).scale(&linv[1][0]).add(&Series2::variable(m, 2).scale(&linv[1][1]));
        for d in 2..=m {
            let err = f.then(&g);
            for i in 0..2 {
                let e_d = err.comps[i].sub(&id.comps[i]).homogeneous_part(d);
                if e_d.is_zero_series() {
                    continue;
                }
                let delta = e_d.compose(&lin1, &lin2).homogeneous_part(d).neg();
                g.comps[i] = g.comps[i].add(&delta);
            }
        }
    }
    if T::EXACT {
        let id = MapJet::identity(m, center);
        let check = f.then(&g);
        if check != id {
            return Err(Error::Invalid("map jet inversion failed to verify".into()));
        }
    }
    Ok(g)
}

/// Minimal commutative-ring interface shared by exact scalars, floats, formal
/// expressions and truncated series, so coefficient-transformation kernels can
/// be written once. `*_like` constructors take shape (for series: the order)
/// from an existing element.
pub trait CoeffRing: Clone {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale_int(&self, n: i64) -> Self;
    fn div(&self, o: &Self) -> Result<Self>;
}

impl CoeffRing for Rat {
    fn zero_like(&self) -> Self {
        <Rat as Zero>::zero()
    }
    fn one_like(&self) -> Self {
        <Rat as num_traits::One>::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale_int(&self, n: i64) -> Self {
        self * Rat::from_integer(n.into())
    }
    fn div(&self, o: &Self) -> Result<Self> {
        if o.is_zero() {
            return Err(Error::ZeroDenominator("rational division".into()));
        }
        Ok(self / o)
    }
}

impl CoeffRing for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn one_like(&self) -> Self {
        1.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale_int(&self, n: i64) -> Self {
        self * n as f64
    }
    fn div(&self, o: &Self) -> Result<Self> {
        if *o == 0.0 {
            return Err(Error::ZeroDenominator("float division".into()));
        }
        Ok(self / o)
    }
}

impl CoeffRing for Expr {
    fn zero_like(&self) -> Self {
        Expr::zero()
    }
    fn one_like(&self) -> Self {
        Expr::one()
    }
    fn add(&self, o: &Self) -> Self {
        self.clone() + o.clone()
    }
    fn sub(&self, o: &Self) -> Self {
        self.clone() - o.clone()
    }
    fn mul(&self, o: &Self) -> Self {
        self.clone() * o.clone()
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn scale_int(&self, n: i64) -> Self {
        Expr::int(n) * self.clone()
    }
    fn div(&self, o: &Self) -> Result<Self> {
        // formal quotient; an identically zero denominator surfaces later,
        // when the expression is normalized or evaluated
        Ok(self.clone() / o.clone())
    }
}

impl<T: Scalar> CoeffRing for Series2<T> {
    fn zero_like(&self) -> Self {
        Series2::zero(self.order)
    }
    fn one_like(&self) -> Self {
        Series2::constant(self.order, T::one())
    }
    fn add(&self, o: &Self) -> Self {
        Series2::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Series2::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        Series2::mul(self, o)
    }
    fn neg(&self) -> Self {
        Series2::neg(self)
    }
    fn scale_int(&self, n: i64) -> Self {
        self.scale(&T::from_i64(n))
    }
    fn div(&self, o: &Self) -> Result<Self> {
        Series2::div(self, o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rat, rat_int, Rat};

    fn s(order: usize, entries: &[(usize, usize, i64)]) -> Series2<Rat> {
        let mut out = Series2::zero(order);
        for (r1, r2, v) in entries {
            out.set(*r1, *r2, rat_int(*v));
        }
        out
    }

    #[test]
    fn layout_is_triangular() {
        assert_eq!(tri_len(2), 6);
        assert_eq!(tri_idx(0, 0), 0);
        assert_eq!(tri_idx(1, 0), 1);
        assert_eq!(tri_idx(0, 1), 2);
        assert_eq!(tri_idx(2, 0), 3);
        assert_eq!(tri_idx(1, 1), 4);
        assert_eq!(tri_idx(0, 2), 5);
        let idx: Vec<_> = multi_indices(2).collect();
        assert_eq!(idx, vec![(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]);
    }

    #[test]
    fn truncated_product() {
        // (1 + h1 + h2)^2 to order 2
        let a = s(2, &[(0, 0, 1), (1, 0, 1), (0, 1, 1)]);
        let sq = a.mul(&a);
        assert_eq!(sq, s(2, &[(0, 0, 1), (1, 0, 2), (0, 1, 2), (2, 0, 1), (1, 1, 2), (0, 2, 1)]));
    }

    #[test]
    fn geometric_series_by_division() {
        // 1 / (1 - h1) = 1 + h1 + h1^2 + h1^3
        let one = Series2::constant(3, rat_int(1));
        let den = s(3, &[(0, 0, 1), (1, 0, -1)]);
        let q = one.div(&den).unwrap();
        assert_eq!(q, s(3, &[(0, 0, 1), (1, 0, 1), (2, 0, 1), (3, 0, 1)]));
        assert_eq!(q.mul(&den), one.extend(3));
    }

    #[test]
    fn division_needs_a_unit() {
        let one = Series2::constant(2, rat_int(1));
        let h1 = Series2::variable(2, 1);
        assert!(one.div(&h1).is_err());
    }

    #[test]
    fn composition_substitutes() {
        // w(h) = h1^2 + h2 composed with a1 = h1 + h2, a2 = h1*h2:
        // (h1+h2)^2 + h1 h2 = h1^2 + 3 h1 h2 + h2^2
        let w = s(2, &[(2, 0, 1), (0, 1, 1)]);
        let a1 = s(2, &[(1, 0, 1), (0, 1, 1)]);
        let a2 = s(2, &[(1, 1, 1)]);
        let c = w.compose(&a1, &a2);
        assert_eq!(c, s(2, &[(2, 0, 1), (1, 1, 3), (0, 2, 1)]));
    }

    #[test]
    fn derivative_shifts_and_scales() {
        // d/dh1 of (3 h1^2 h2) = 6 h1 h2
        let a = s(3, &[(2, 1, 3)]);
        assert_eq!(a.derivative(1), s(2, &[(1, 1, 6)]));
        assert_eq!(a.derivative(2), s(2, &[(2, 0, 3)]));
    }

    #[test]
    fn derivative_value_round_trip() {
        let f = Series2::from_derivatives(3, |r1, r2| rat_int((r1 * 10 + r2 + 1) as i64));
        for (r1, r2) in multi_indices(3) {
            assert_eq!(f.derivative_value(r1, r2), rat_int((r1 * 10 + r2 + 1) as i64));
        }
        // the coefficient at (3,0) is value / 3!
        assert_eq!(*f.get(3, 0), rat(31, 6));
    }

    #[test]
    fn map_jet_inversion_round_trip() {
        // f(x) = (x1 + x2^2, x2 - x1^2) at the origin
        let order = 4;
        let center = [rat_int(0), rat_int(0)];
        let f = MapJet {
            comps: [
                s(order, &[(1, 0, 1), (0, 2, 1)]),
                s(order, &[(0, 1, 1), (2, 0, -1)]),
            ],
        };
        let g = inverse_map_jet(&f, &center).unwrap();
        assert_eq!(f.then(&g), MapJet::identity(order, &center));
        // inverse of the inverse recovers f (both centers are the origin here)
        let back = inverse_map_jet(&g, &f.image()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn map_jet_inversion_off_origin() {
        // f(x) = (2 x1 + x2 + x1 x2, x2 - x1^2) as a jet at (1, 2)
        // partials enter the series through the displacement expansion
        let order = 3;
        let center = [rat_int(1), rat_int(2)];
        // f1 = 2(1+h1) + (2+h2) + (1+h1)(2+h2) = 6 + 4 h1 + 2 h2 + h1 h2
        // f2 = (2+h2) - (1+h1)^2 = 1 - 2 h1 + h2 - h1^2
        let f = MapJet {
            comps: [
                s(order, &[(0, 0, 6), (1, 0, 4), (0, 1, 2), (1, 1, 1)]),
                s(order, &[(0, 0, 1), (1, 0, -2), (0, 1, 1), (2, 0, -1)]),
            ],
        };
        let g = inverse_map_jet(&f, &center).unwrap();
        assert_eq!(g.image(), center);
        assert_eq!(f.then(&g), MapJet::identity(order, &center));
    }

    #[test]
    fn singular_linear_part_is_rejected() {
        let f = MapJet {
            comps: [s(2, &[(1, 0, 1), (0, 1, 1)]), s(2, &[(1, 0, 2), (0, 1, 2)])],
        };
        assert!(matches!(
            inverse_map_jet(&f, &[rat_int(0), rat_int(0)]),
            Err(Error::SingularJacobian)
        ));
    }

    #[test]
    fn eval_is_polynomial_evaluation() {
        let a = s(2, &[(0, 0, 1), (1, 0, 2), (0, 2, 3)]);
        // 1 + 2*(1/2) + 3*(1/3)^2 = 1 + 1 + 1/3
        assert_eq!(a.eval(&rat(1, 2), &rat(1, 3)), rat(7, 3));
    }
}
