//! Stabilizers of equation jets inside the jets of plane vector fields.
//!
//! Every computation here is a kernel of an exact rational linear system: the
//! lift components are linear in the X-variables, so fixing an equation jet
//! theta turns "the lift vanishes" into rows over the X-jet coordinates.
//! Unknowns are always ordered component index first (X1 before X2), then
//! total derivative order, then the second index r2; nullspace bases follow
//! the reduced-echelon convention (one basis vector per free column, with a 1
//! in that column and zeros in the other free columns), which makes every
//! basis this module produces canonical.

use crate::error::{Error, Result};
use crate::fieldlift::{d_sigma_psi, lift_component_expr, VectorFieldJet};
use crate::jetspace::{parse_jet_var, u_var_name, x_var_name, JetPoint, JetVarKind};
use crate::series::multi_indices;
use crate::symexpr::poly::{Atom, Poly};
use crate::symexpr::{self, Expr};
use crate::Rat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

/// Dense row-major matrix over the rationals.
#[derive(Debug, Clone, PartialEq)]
pub struct RatMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Rat>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let cols = rows.first().map(|r| r.len()).unwrap_or(0);
        assert!(rows.iter().all(|r| r.len() == cols));
        let r = rows.len();
        RatMatrix { rows: r, cols, data: rows.into_iter().flatten().collect() }
    }

    pub fn at(&self, r: usize, c: usize) -> &Rat {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rat) {
        self.data[r * self.cols + c] = v;
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Reduces in place to reduced row echelon form; returns the pivot
    /// columns, one per nonzero row, in order.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(pr) = (row..self.rows).find(|&r| !self.at(r, col).is_zero()) else {
                continue;
            };
            self.swap_rows(row, pr);
            let inv = self.at(row, col).recip();
            for c in col..self.cols {
                let v = self.at(row, c).clone() * inv.clone();
                self.set(row, c, v);
            }
            for r in 0..self.rows {
                if r != row && !self.at(r, col).is_zero() {
                    let f = self.at(r, col).clone();
                    for c in col..self.cols {
                        let v = self.at(r, c).clone() - f.clone() * self.at(row, c).clone();
                        self.set(r, c, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Canonical kernel basis: one vector per free column, ordered by that
    /// column.
    pub fn nullspace(&self) -> Vec<Vec<Rat>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for f in 0..self.cols {
            if is_pivot[f] {
                continue;
            }
            let mut v = vec![Rat::zero(); self.cols];
            v[f] = Rat::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m.at(r, f).clone();
            }
            basis.push(v);
        }
        basis
    }

    pub fn matmul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = RatMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                if self.at(r, k).is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let v = out.at(r, c).clone() + self.at(r, k).clone() * other.at(k, c).clone();
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }
}

/// Exact solution of m x = rhs when it is unique; reports the kernel
/// dimension when it is not, and rejects inconsistent systems.
pub fn solve_unique(m: &RatMatrix, rhs: &[Rat]) -> Result<Vec<Rat>> {
    assert_eq!(m.rows, rhs.len());
    let mut aug = RatMatrix::zeros(m.rows, m.cols + 1);
    for r in 0..m.rows {
        for c in 0..m.cols {
            aug.set(r, c, m.at(r, c).clone());
        }
        aug.set(r, m.cols, rhs[r].clone());
    }
    let pivots = aug.rref();
    if pivots.contains(&m.cols) {
        return Err(Error::Invalid("inconsistent linear system".into()));
    }
    let nullity = m.cols - pivots.len();
    if nullity > 0 {
        return Err(Error::NotUnique { nullity });
    }
    let mut x = vec![Rat::zero(); m.cols];
    for (row, &pc) in pivots.iter().enumerate() {
        x[pc] = aug.at(row, m.cols).clone();
    }
    Ok(x)
}

/// A linear subspace of X-jet coordinates: named coordinates plus a basis of
/// coefficient vectors over them.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    pub unknowns: Vec<String>,
    pub basis: Vec<Vec<Rat>>,
}

impl SubspaceBasis {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coefficients of v in the basis, or None when v lies outside the span.
    pub fn coordinates_of(&self, v: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(v.len(), self.unknowns.len());
        let k = self.basis.len();
        let mut m = RatMatrix::zeros(self.unknowns.len(), k + 1);
        for (j, b) in self.basis.iter().enumerate() {
            for (r, val) in b.iter().enumerate() {
                m.set(r, j, val.clone());
            }
        }
        for (r, val) in v.iter().enumerate() {
            m.set(r, k, val.clone());
        }
        let pivots = m.rref();
        if pivots.contains(&k) {
            return None;
        }
        let mut coords = vec![Rat::zero(); k];
        for (row, &pc) in pivots.iter().enumerate() {
            coords[pc] = m.at(row, k).clone();
        }
        Some(coords)
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        self.coordinates_of(v).is_some()
    }

    /// Value of the named coordinate inside one basis vector.
    pub fn entry(&self, which: usize, name: &str) -> &Rat {
        let idx = self
            .unknowns
            .iter()
            .position(|u| u == name)
            .unwrap_or_else(|| panic!("no coordinate named {name}"));
        &self.basis[which][idx]
    }
}

/// The whole space of one X-derivative grade, with the identity basis.
pub fn full_grade_space(grade: usize) -> SubspaceBasis {
    let unknowns = x_unknown_list(grade, grade);
    let n = unknowns.len();
    SubspaceBasis {
        unknowns,
        basis: (0..n)
            .map(|k| {
                let mut v = vec![Rat::zero(); n];
                v[k] = Rat::one();
                v
            })
            .collect(),
    }
}

/// X-jet coordinate names with derivative orders in `min_order..=max_order`,
/// in the documented unknown order.
pub fn x_unknown_list(min_order: usize, max_order: usize) -> Vec<String> {
    let mut out = Vec::new();
    for i in 1..=2 {
        for d in min_order..=max_order {
            for r2 in 0..=d {
                out.push(x_var_name(i, d - r2, r2));
            }
        }
    }
    out
}

/// The u-variable values a jet pins down, as exact atom substitutions,
/// extended by zeros up to `to_order`.
pub(crate) fn u_values_zero_extended(theta: &JetPoint<Rat>, to_order: usize) -> BTreeMap<Atom, Rat> {
    let mut vals = BTreeMap::new();
    for i in 0..4 {
        for (r1, r2) in multi_indices(to_order) {
            let v = if r1 + r2 <= theta.order {
                theta.get(i, r1, r2).clone()
            } else {
                Rat::zero()
            };
            vals.insert(Atom::Var(u_var_name(i, r1, r2)), v);
        }
    }
    vals
}

/// Which family an equation expression comes from; both are polynomial in
/// the jet variables, so their expanded forms are cached process-wide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum EqKind {
    /// D_sigma psi_i; sigma = (0, 0) gives the generating expressions.
    DPsi,
    /// Full lift component: transport term plus D_sigma psi_i.
    LiftComp,
}

/// Expanded numerator and constant denominator of a cached equation.
pub(crate) fn equation_poly(kind: EqKind, i: usize, r1: usize, r2: usize) -> Arc<(Poly, Rat)> {
    static CACHE: OnceLock<Mutex<HashMap<(EqKind, usize, usize, usize), Arc<(Poly, Rat)>>>> =
        OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&(kind, i, r1, r2)).cloned() {
        return hit;
    }
    let e = match kind {
        EqKind::DPsi => d_sigma_psi(i, r1, r2),
        EqKind::LiftComp => lift_component_expr(i, r1, r2),
    };
    let nf = symexpr::normalize(&e).expect("equation expressions are polynomial");
    let den = nf.den.as_constant().expect("equation denominators are constant");
    let entry = Arc::new((nf.num, den));
    cache.lock().unwrap().insert((kind, i, r1, r2), entry.clone());
    entry
}

/// One row of an affine system from an expanded equation: substitutes the
/// pinned values and reads off the coefficient of each unknown plus the
/// constant part. Fails if anything nonlinear or unlisted survives.
pub(crate) fn affine_row_poly(
    num: &Poly,
    den: &Rat,
    unknowns: &[String],
    values: &BTreeMap<Atom, Rat>,
) -> Result<(Vec<Rat>, Rat)> {
    let p = num.substitute_values(values);
    let (c, lin) = p
        .as_linear()
        .ok_or_else(|| Error::Invalid("equation is not linear in the unknowns".into()))?;
    let mut row = Vec::with_capacity(unknowns.len());
    let mut seen = 0usize;
    for name in unknowns {
        match lin.get(&Atom::Var(name.clone())) {
            Some(v) => {
                seen += 1;
                row.push(v.clone() / den.clone());
            }
            None => row.push(Rat::zero()),
        }
    }
    if seen != lin.len() {
        return Err(Error::Invalid(
            "equation involves coordinates outside the declared unknowns".into(),
        ));
    }
    Ok((row, c / den.clone()))
}

/// `affine_row_poly` on a raw expression.
pub(crate) fn affine_row(
    eq: &Expr,
    unknowns: &[String],
    values: &BTreeMap<Atom, Rat>,
) -> Result<(Vec<Rat>, Rat)> {
    let nf = symexpr::normalize(eq)?;
    let den = nf
        .den
        .as_constant()
        .ok_or_else(|| Error::Invalid(format!("non-constant denominator in equation {eq}")))?;
    affine_row_poly(&nf.num, &den, unknowns, values)
}

fn linear_row_cached(
    kind: EqKind,
    i: usize,
    sigma: (usize, usize),
    unknowns: &[String],
    values: &BTreeMap<Atom, Rat>,
) -> Result<Vec<Rat>> {
    let eq = equation_poly(kind, i, sigma.0, sigma.1);
    let (row, c) = affine_row_poly(&eq.0, &eq.1, unknowns, values)?;
    if !c.is_zero() {
        return Err(Error::NotHomogeneous);
    }
    Ok(row)
}

fn kernel_rows(rows: Vec<Vec<Rat>>, unknowns: Vec<String>) -> SubspaceBasis {
    let mut m = RatMatrix::from_rows(rows);
    if m.cols == 0 {
        m.cols = unknowns.len();
    }
    SubspaceBasis { basis: m.nullspace(), unknowns }
}

/// Field jets that fix theta infinitesimally while fixing the base point:
/// X vanishes at the point, so only the D_sigma psi rows survive. Unknowns
/// are the X-derivatives of orders 1 to theta.order + 2. Because the point is
/// fixed, coefficient derivatives above theta's order never enter (they only
/// appear against the order-zero X values), so theta determines the system.
pub fn isotropy_algebra(theta: &JetPoint<Rat>) -> Result<SubspaceBasis> {
    let k = theta.order;
    let unknowns = x_unknown_list(1, k + 2);
    let mut values = u_values_zero_extended(theta, k + 1);
    values.insert(Atom::Var(x_var_name(1, 0, 0)), Rat::zero());
    values.insert(Atom::Var(x_var_name(2, 0, 0)), Rat::zero());
    let mut rows = Vec::new();
    for (r1, r2) in multi_indices(k) {
        for i in 0..4 {
            rows.push(linear_row_cached(EqKind::DPsi, i, (r1, r2), &unknowns, &values)?);
        }
    }
    Ok(kernel_rows(rows, unknowns))
}

/// Field jets whose lift is tangent to the horizontal directions theta picks
/// out: the vertical part of the lift — the derivatives of the generating
/// expressions through one order below theta — vanishes at theta. Unlike the
/// point-fixing stabilizer, base motion stays free.
pub fn isotropy_space(theta: &JetPoint<Rat>) -> Result<SubspaceBasis> {
    theta.require_order(1)?;
    let k = theta.order - 1;
    let unknowns = x_unknown_list(0, k + 2);
    let values = u_values_zero_extended(theta, theta.order);
    let mut rows = Vec::new();
    for (r1, r2) in multi_indices(k) {
        for i in 0..4 {
            rows.push(linear_row_cached(EqKind::DPsi, i, (r1, r2), &unknowns, &values)?);
        }
    }
    Ok(kernel_rows(rows, unknowns))
}

/// Rescales to the primitive integer vector with positive leading entry.
fn primitive_integer(v: &[Rat]) -> Vec<Rat> {
    let mut lcm = BigInt::one();
    for x in v {
        if !x.is_zero() {
            lcm = lcm.lcm(x.denom());
        }
    }
    let mut gcd = BigInt::zero();
    for x in v {
        gcd = gcd.gcd(&(x.numer() * &lcm / x.denom()));
    }
    if gcd.is_zero() {
        return v.to_vec();
    }
    let mut scale = Rat::new(lcm, gcd);
    if let Some(first) = v.iter().find(|x| !x.is_zero()) {
        if (first.clone() * scale.clone()).is_negative() {
            scale = -scale;
        }
    }
    v.iter().map(|x| x.clone() * scale.clone()).collect()
}

/// The top-grade part of the stabilizer system: pure second-derivative
/// X-coordinates subject to the four generating expressions with everything
/// of lower grade frozen. Independent of the equation jet. The two basis
/// vectors are scaled to primitive integer form; the obstruction components
/// are reported against exactly this basis.
pub fn symbol_g() -> SubspaceBasis {
    let unknowns = x_unknown_list(2, 2);
    let mut values = BTreeMap::new();
    for i in 0..4 {
        for (r1, r2) in multi_indices(1) {
            values.insert(Atom::Var(u_var_name(i, r1, r2)), Rat::zero());
        }
    }
    for name in x_unknown_list(0, 1) {
        values.insert(Atom::Var(name), Rat::zero());
    }
    let rows: Vec<Vec<Rat>> = (0..4)
        .map(|i| {
            linear_row_cached(EqKind::DPsi, i, (0, 0), &unknowns, &values)
                .expect("constant-coefficient system")
        })
        .collect();
    let mut space = kernel_rows(rows, unknowns);
    space.basis = space.basis.iter().map(|v| primitive_integer(v)).collect();
    space
}

/// Common derivative order of a space's unknowns; all must be X-coordinates
/// of one grade.
fn grade_of(space: &SubspaceBasis) -> Result<usize> {
    let mut grade = None;
    for name in &space.unknowns {
        match parse_jet_var(name) {
            Some((JetVarKind::X, _, r1, r2)) => match grade {
                None => grade = Some(r1 + r2),
                Some(g) if g == r1 + r2 => {}
                Some(_) => return Err(Error::NotHomogeneous),
            },
            _ => {
                return Err(Error::Invalid(format!(
                    "coordinate {name} is not an X-jet coordinate"
                )))
            }
        }
    }
    grade.ok_or(Error::NotHomogeneous)
}

/// Formal derivative in direction j of a homogeneous X-coefficient vector:
/// grade drops by one, (D_j v) at sigma reads v at sigma + e_j.
fn formal_derivative(grade: usize, v: &[Rat], names: &[String], j: usize) -> Vec<Rat> {
    assert!(grade >= 1);
    let target = x_unknown_list(grade - 1, grade - 1);
    let index: BTreeMap<&str, usize> =
        names.iter().enumerate().map(|(k, n)| (n.as_str(), k)).collect();
    let mut out = Vec::with_capacity(target.len());
    for name in &target {
        let (_, i, r1, r2) = parse_jet_var(name).expect("x name");
        let src = if j == 1 { x_var_name(i, r1 + 1, r2) } else { x_var_name(i, r1, r2 + 1) };
        out.push(v[index[src.as_str()]].clone());
    }
    out
}

/// First prolongation: the vectors one grade up whose two formal derivatives
/// both land in the given span. Computed through the annihilator of the span.
pub fn prolong(space: &SubspaceBasis) -> Result<SubspaceBasis> {
    let grade = grade_of(space)?;
    let n = space.unknowns.len();
    let span = RatMatrix::from_rows(space.basis.clone());
    let annihilator = if space.basis.is_empty() {
        // empty span: every coordinate functional annihilates
        (0..n)
            .map(|k| {
                let mut v = vec![Rat::zero(); n];
                v[k] = Rat::one();
                v
            })
            .collect()
    } else {
        span.nullspace()
    };
    let unknowns = x_unknown_list(grade + 1, grade + 1);
    let index: BTreeMap<&str, usize> =
        unknowns.iter().enumerate().map(|(k, s)| (s.as_str(), k)).collect();
    let mut rows = Vec::new();
    for j in 1..=2 {
        for phi in &annihilator {
            let mut row = vec![Rat::zero(); unknowns.len()];
            for (pos, name) in space.unknowns.iter().enumerate() {
                if phi[pos].is_zero() {
                    continue;
                }
                let (_, i, r1, r2) = parse_jet_var(name).expect("x name");
                let src =
                    if j == 1 { x_var_name(i, r1 + 1, r2) } else { x_var_name(i, r1, r2 + 1) };
                row[index[src.as_str()]] = phi[pos].clone();
            }
            rows.push(row);
        }
    }
    let basis = if rows.is_empty() {
        RatMatrix::zeros(0, unknowns.len()).nullspace()
    } else {
        RatMatrix::from_rows(rows).nullspace()
    };
    Ok(SubspaceBasis { basis, unknowns })
}

/// Ranks and homology of the three-term complex
///
///   top --> mid (x) V* --> bottom,
///
/// where the first arrow sends xi to its pair of formal derivatives and the
/// second sends (eta1, eta2) to D1 eta2 - D2 eta1. Grades must descend by one
/// at each step and every derivative must land in the stated space.
#[derive(Debug, Clone, PartialEq)]
pub struct SpencerReport {
    pub dims: [usize; 3],
    pub rank1: usize,
    pub rank2: usize,
    pub injective2: bool,
    pub homology_middle: usize,
    pub composes_to_zero: bool,
}

pub fn spencer_complex(
    top: &SubspaceBasis,
    mid: &SubspaceBasis,
    bottom: &SubspaceBasis,
) -> Result<SpencerReport> {
    let g_top = grade_of(top)?;
    let g_mid = grade_of(mid)?;
    let g_bot = grade_of(bottom)?;
    if g_top != g_mid + 1 || g_mid != g_bot + 1 {
        return Err(Error::GradeCompat);
    }
    let coords_in = |space: &SubspaceBasis, v: &[Rat]| -> Result<Vec<Rat>> {
        space.coordinates_of(v).ok_or(Error::GradeCompat)
    };
    let dm = mid.dim();
    // first arrow, columns indexed by top basis vectors
    let mut map1 = RatMatrix::zeros(2 * dm, top.dim());
    for (col, xi) in top.basis.iter().enumerate() {
        for j in 1..=2 {
            let d = formal_derivative(g_top, xi, &top.unknowns, j);
            let c = coords_in(mid, &d)?;
            for (r, val) in c.into_iter().enumerate() {
                map1.set((j - 1) * dm + r, col, val);
            }
        }
    }
    // second arrow, domain basis (b, 0) then (0, b)
    let mut map2 = RatMatrix::zeros(bottom.dim(), 2 * dm);
    for (which, b) in mid.basis.iter().enumerate() {
        let d1 = coords_in(bottom, &formal_derivative(g_mid, b, &mid.unknowns, 1))?;
        let d2 = coords_in(bottom, &formal_derivative(g_mid, b, &mid.unknowns, 2))?;
        for (r, val) in d2.into_iter().enumerate() {
            map2.set(r, which, -val);
        }
        for (r, val) in d1.into_iter().enumerate() {
            map2.set(r, dm + which, val);
        }
    }
    let rank1 = map1.rank();
    let rank2 = map2.rank();
    Ok(SpencerReport {
        dims: [top.dim(), 2 * dm, bottom.dim()],
        rank1,
        rank2,
        injective2: rank2 == 2 * dm,
        homology_middle: (2 * dm - rank2) - rank1,
        composes_to_zero: map2.matmul(&map1).is_zero_matrix(),
    })
}

/// Dimension of the orbit of theta under the lifted action: the rank of the
/// linear map sending an X-jet of order theta.order + 2 to its base motion
/// together with all lift components at theta.
pub fn orbit_dimension(theta: &JetPoint<Rat>) -> Result<usize> {
    let k = theta.order;
    let unknowns = x_unknown_list(0, k + 2);
    let values = u_values_zero_extended(theta, k + 1);
    let mut rows = Vec::new();
    for i in 1..=2 {
        let (row, c) = affine_row(&Expr::var(x_var_name(i, 0, 0)), &unknowns, &values)?;
        debug_assert!(c.is_zero());
        rows.push(row);
    }
    for (r1, r2) in multi_indices(k) {
        for i in 0..4 {
            rows.push(linear_row_cached(EqKind::LiftComp, i, (r1, r2), &unknowns, &values)?);
        }
    }
    Ok(RatMatrix::from_rows(rows).rank())
}

/// Flattens a field jet onto the documented unknown order for the given
/// window of derivative orders.
pub fn coords_from_field_jet(
    x: &VectorFieldJet<Rat>,
    min_order: usize,
    max_order: usize,
) -> Vec<Rat> {
    assert!(max_order <= x.order);
    x_unknown_list(min_order, max_order)
        .iter()
        .map(|name| {
            let (_, i, r1, r2) = parse_jet_var(name).expect("x name");
            x.get(i, r1, r2).clone()
        })
        .collect()
}

/// Packs a coefficient vector over named X-coordinates into a field jet;
/// coordinates the names do not mention stay zero.
pub fn field_jet_from_coords(
    unknowns: &[String],
    v: &[Rat],
    order: usize,
    base: &[Rat; 2],
) -> Result<VectorFieldJet<Rat>> {
    assert_eq!(unknowns.len(), v.len());
    let mut x = VectorFieldJet::zero(order, base.clone());
    for (name, val) in unknowns.iter().zip(v) {
        if val.is_zero() {
            continue;
        }
        match parse_jet_var(name) {
            Some((JetVarKind::X, i, r1, r2)) if r1 + r2 <= order => x.set(i, r1, r2, val.clone()),
            Some((JetVarKind::X, ..)) => {
                return Err(Error::Order { need: order, got: order + 1 })
            }
            _ => return Err(Error::Invalid(format!("{name} is not an X-jet coordinate"))),
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldlift::psi_value;
    use crate::jetspace::rhs_to_section;
    use crate::{rat, rat_int};

    #[test]
    fn echelon_and_kernel_conventions() {
        let m = RatMatrix::from_rows(vec![
            vec![rat_int(1), rat_int(2), rat_int(3)],
            vec![rat_int(2), rat_int(4), rat_int(6)],
        ]);
        assert_eq!(m.rank(), 1);
        let ns = m.nullspace();
        assert_eq!(
            ns,
            vec![
                vec![rat_int(-2), rat_int(1), rat_int(0)],
                vec![rat_int(-3), rat_int(0), rat_int(1)],
            ]
        );

        let a = RatMatrix::from_rows(vec![
            vec![rat_int(1), rat_int(1)],
            vec![rat_int(1), rat_int(-1)],
        ]);
        assert_eq!(
            solve_unique(&a, &[rat_int(3), rat_int(1)]).unwrap(),
            vec![rat_int(2), rat_int(1)]
        );
        assert!(matches!(
            solve_unique(&m, &[rat_int(1), rat_int(3)]),
            Err(Error::Invalid(_))
        ));
        assert!(matches!(
            solve_unique(&m, &[rat_int(1), rat_int(2)]),
            Err(Error::NotUnique { nullity: 2 })
        ));
    }

    #[test]
    fn symbol_generators_are_pinned() {
        let g = symbol_g();
        assert_eq!(
            g.unknowns,
            vec!["X1d11", "X1d12", "X1d22", "X2d11", "X2d12", "X2d22"]
        );
        assert_eq!(g.dim(), 2);
        assert_eq!(
            g.basis[0],
            vec![rat_int(2), rat_int(0), rat_int(0), rat_int(0), rat_int(1), rat_int(0)]
        );
        assert_eq!(
            g.basis[1],
            vec![rat_int(0), rat_int(1), rat_int(0), rat_int(0), rat_int(0), rat_int(2)]
        );
    }

    #[test]
    fn prolongation_dimensions() {
        let g = symbol_g();
        let g1 = prolong(&g).unwrap();
        assert_eq!(g1.dim(), 0);
        assert_eq!(g1.unknowns, x_unknown_list(3, 3));

        // the full first-grade space prolongs to the full second-grade space
        assert_eq!(prolong(&full_grade_space(1)).unwrap().dim(), 6);

        let mixed = SubspaceBasis { unknowns: x_unknown_list(1, 2), basis: vec![] };
        assert!(matches!(prolong(&mixed), Err(Error::NotHomogeneous)));
    }

    #[test]
    fn spencer_complex_of_the_symbol() {
        let g = symbol_g();
        let g1 = prolong(&g).unwrap();
        let report = spencer_complex(&g1, &g, &full_grade_space(1)).unwrap();
        assert_eq!(report.dims, [0, 4, 4]);
        assert_eq!(report.rank1, 0);
        assert_eq!(report.rank2, 4);
        assert!(report.injective2);
        assert_eq!(report.homology_middle, 0);
        assert!(report.composes_to_zero);
    }

    fn sample_theta0() -> JetPoint<Rat> {
        let mut theta = JetPoint::zero(0, [rat_int(1), rat_int(2)]);
        for i in 0..4 {
            theta.set(i, 0, 0, rat_int(i as i64 + 1));
        }
        theta
    }

    #[test]
    fn stabilizer_dimensions_on_sample_jets() {
        assert_eq!(isotropy_algebra(&sample_theta0()).unwrap().dim(), 6);

        let zero2 = JetPoint::zero(2, [rat_int(0), rat_int(0)]);
        assert_eq!(isotropy_algebra(&zero2).unwrap().dim(), 6);

        let mut theta1 = JetPoint::zero(1, [rat_int(1), rat_int(2)]);
        for i in 0..4 {
            theta1.set(i, 0, 0, rat_int(i as i64 + 1));
            theta1.set(i, 1, 0, rat(1, 2 + i as i64));
            theta1.set(i, 0, 1, rat(-1, 3 + i as i64));
        }
        assert_eq!(isotropy_space(&theta1).unwrap().dim(), 8);

        // the flat jet's orbit misses exactly the two invariant directions;
        // generic jets move everywhere
        let flat2 = JetPoint::zero(2, [rat_int(0), rat_int(0)]);
        assert_eq!(orbit_dimension(&flat2).unwrap(), 24);
        let s = rhs_to_section("y*y + x*p").unwrap();
        let theta2 = s.jet_at(&[rat_int(1), rat_int(2)], 2).unwrap();
        assert_eq!(orbit_dimension(&theta2).unwrap(), 26);
        assert_eq!(x_unknown_list(0, 4).len(), 30);
    }

    #[test]
    fn algebra_elements_kill_the_generating_expressions() {
        let theta0 = sample_theta0();
        let alg = isotropy_algebra(&theta0).unwrap();
        assert_eq!(alg.unknowns, x_unknown_list(1, 2));
        // the algebra was computed against the zero extension of theta0
        let mut theta1 = JetPoint::zero(1, theta0.base.clone());
        for i in 0..4 {
            theta1.set(i, 0, 0, theta0.get(i, 0, 0).clone());
        }
        for v in &alg.basis {
            let x = field_jet_from_coords(&alg.unknowns, v, 2, &theta0.base).unwrap();
            assert_eq!(
                psi_value(&x, &theta1).unwrap(),
                [Rat::zero(), Rat::zero(), Rat::zero(), Rat::zero()]
            );
        }
    }

    #[test]
    fn point_fixing_stabilizer_sits_inside_the_jet_stabilizer() {
        let theta0 = sample_theta0();
        let alg = isotropy_algebra(&theta0).unwrap();
        let mut theta1 = JetPoint::zero(1, theta0.base.clone());
        for i in 0..4 {
            theta1.set(i, 0, 0, theta0.get(i, 0, 0).clone());
        }
        let space = isotropy_space(&theta1).unwrap();
        assert_eq!(space.dim(), 8);
        for v in &alg.basis {
            // pad with zero order-0 components, aligning by name
            let padded: Vec<Rat> = space
                .unknowns
                .iter()
                .map(|name| {
                    alg.unknowns
                        .iter()
                        .position(|u| u == name)
                        .map(|k| v[k].clone())
                        .unwrap_or_else(Rat::zero)
                })
                .collect();
            assert!(space.contains(&padded));
        }
    }

    #[test]
    fn field_jet_coordinate_round_trip() {
        let unknowns = x_unknown_list(0, 2);
        let v: Vec<Rat> = (0..unknowns.len()).map(|k| rat_int(k as i64 - 5)).collect();
        let x = field_jet_from_coords(&unknowns, &v, 2, &[rat_int(0), rat_int(1)]).unwrap();
        assert_eq!(coords_from_field_jet(&x, 0, 2), v);
        assert_eq!(*x.get(1, 0, 0), rat_int(-5));
    }
}
