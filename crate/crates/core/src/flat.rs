//! The flat model: the quaternionic Heisenberg group `H^n × Im H` with its
//! contact forms, Reeb fields and the twistor CR structure on `M × S^2`.
//!
//! Coordinates on `M` are `u = (x_0, …, x_{4n-1}, t_1, t_2, t_3)`, where
//! `x_{4b..4b+4}` are the real components `(w, x, y, z)` of the `b`-th
//! quaternion. `I_a` acts on `D ≅ H^n` by left multiplication by `i_a`.
//!
//! The exact part works in rationals. The Levi form and the integrability
//! residuals are measured numerically with central-difference brackets.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use serde::Serialize;

use crate::check::ExactCheck;
use crate::error::{Error, Result};
use crate::forms::{PolyForm, Polynomial, VectorField};
use crate::g0::TwistorPoint;
use crate::matrix::{nullspace, Matrix};
use crate::sampling::{small_rational, sphere_point};
use crate::scalar::{int, to_f64, Quaternion, Rational, Scalar};

pub type RMatrix = Matrix<Rational>;

/// Coefficient `λ` in `η^a = dt^a + λ Σ_{r,s} (L_a)_{sr} x_r dx_s`, fixed by
/// [`solve_bilinear_coefficient`].
pub const ETA_BILINEAR_COEFFICIENT: i64 = 1;

/// Real `4n × 4n` matrix of `v ↦ q v` on `H^n`.
pub fn left_mult_matrix(q: &Quaternion, n: usize) -> RMatrix {
    let mut m = RMatrix::zeros(4 * n, 4 * n);
    for b in 0..n {
        for c in 0..4 {
            let basis = if c == 0 { Quaternion::one() } else { Quaternion::unit(c) };
            let image = q.clone() * basis;
            for (r, v) in image.components().into_iter().enumerate() {
                m[(4 * b + r, 4 * b + c)] = v.clone();
            }
        }
    }
    m
}

fn to_f64_matrix(m: &RMatrix) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |r, c| to_f64(&m[(r, c)]))
}

/// `η^a` for a given bilinear coefficient.
pub fn contact_form(n: usize, a: usize, coefficient: &Rational) -> PolyForm {
    let nv = 4 * n + 3;
    let l = left_mult_matrix(&Quaternion::unit(a + 1), n);
    let mut eta = PolyForm::basis(nv, &[4 * n + a]);
    for (s, r, v) in l.nonzero_entries() {
        let term = PolyForm::basis(nv, &[s]).mul_function(&Polynomial::var(nv, r)).scale(&(v * coefficient));
        eta = eta.add(&term);
    }
    eta
}

/// Solves `dη^a(u, v) = 2 g(I_a u, v)` for the bilinear coefficient `λ`.
///
/// `dη^a` is linear in `λ`, so `λ` is the ratio of the target to the value of
/// the `λ = 1` form on every coordinate pair of `D` at the origin, where `D`
/// is spanned by `∂_{x_r}`. Returns an error if the ratios disagree.
pub fn solve_bilinear_coefficient(n: usize) -> Result<Rational> {
    let nv = 4 * n + 3;
    let origin = vec![Rational::zero(); nv];
    let mut solved: Option<Rational> = None;
    for a in 0..3 {
        let l = left_mult_matrix(&Quaternion::unit(a + 1), n);
        let deta = contact_form(n, a, &Rational::one()).d();
        for r in 0..4 * n {
            for s in 0..4 * n {
                let unit = deta
                    .evaluate(&[VectorField::coordinate(nv, r), VectorField::coordinate(nv, s)])
                    .eval(&origin);
                let target = int(2) * &l[(s, r)];
                match (unit.is_zero(), target.is_zero()) {
                    (true, true) => {}
                    (true, false) => {
                        return Err(Error::InvalidConfig(format!("no λ matches pair ({r}, {s}) of η^{}", a + 1)))
                    }
                    (false, _) => {
                        let lambda = target / unit;
                        if solved.as_ref().is_some_and(|prev| *prev != lambda) {
                            return Err(Error::InvalidConfig("inconsistent bilinear coefficient".into()));
                        }
                        solved = Some(lambda);
                    }
                }
            }
        }
    }
    solved.ok_or_else(|| Error::InvalidConfig("no constraint on the bilinear coefficient".into()))
}

/// The flat qc structure on `H^n × Im H`.
#[derive(Clone, Debug)]
pub struct FlatQC {
    n: usize,
    eta: [PolyForm; 3],
    reeb: [VectorField; 3],
    frame: Vec<VectorField>,
    complex_structures: [RMatrix; 3],
}

pub fn build_flat_qc(n: usize) -> Result<FlatQC> {
    if n == 0 {
        return Err(Error::InvalidConfig("n must be at least 1".into()));
    }
    let nv = 4 * n + 3;
    let coefficient = int(ETA_BILINEAR_COEFFICIENT);
    let eta = [0, 1, 2].map(|a| contact_form(n, a, &coefficient));
    let reeb = [0, 1, 2].map(|a| VectorField::coordinate(nv, 4 * n + a));
    let complex_structures = [1, 2, 3].map(|a| left_mult_matrix(&Quaternion::unit(a), n));
    // X_r = ∂_{x_r} - λ Σ_a (L_a x)_r ∂_{t_a}
    let frame = (0..4 * n)
        .map(|r| {
            let mut comps: Vec<Polynomial> = (0..nv)
                .map(|v| if v == r { Polynomial::one(nv) } else { Polynomial::zero(nv) })
                .collect();
            for (a, l) in complex_structures.iter().enumerate() {
                let row: Vec<Rational> = (0..nv)
                    .map(|c| if c < 4 * n { -(&l[(r, c)] * &coefficient) } else { Rational::zero() })
                    .collect();
                comps[4 * n + a] = Polynomial::linear(&row);
            }
            VectorField::new(comps)
        })
        .collect();
    Ok(FlatQC { n, eta, reeb, frame, complex_structures })
}

impl FlatQC {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nvars(&self) -> usize {
        4 * self.n + 3
    }

    pub fn eta(&self, a: usize) -> &PolyForm {
        &self.eta[a]
    }

    pub fn reeb(&self, a: usize) -> &VectorField {
        &self.reeb[a]
    }

    /// Global frame `X_0, …, X_{4n-1}` of `D`, orthonormal for `g`.
    pub fn horizontal_frame(&self) -> &[VectorField] {
        &self.frame
    }

    /// Matrix of `I_a` (`a = 0, 1, 2`) in the frame of `D`.
    pub fn complex_structure(&self, a: usize) -> &RMatrix {
        &self.complex_structures[a]
    }

    /// `Σ_a c_a I_a` for a point of `S^2`.
    pub fn complex_structure_at(&self, point: &TwistorPoint) -> RMatrix {
        left_mult_matrix(point.quaternion(), self.n)
    }

    /// The same structure with `η^a` and `η^b` exchanged.
    pub fn with_swapped_forms(&self, a: usize, b: usize) -> FlatQC {
        let mut out = self.clone();
        out.eta.swap(a, b);
        out
    }
}

/// `dη^a(X_r, X_s) = 2 g(I_a X_r, X_s)` as polynomial identities, plus
/// `η^a(X_r) = 0`.
pub fn check_structure_equation(flat: &FlatQC) -> ExactCheck {
    let nv = flat.nvars();
    let mut out = ExactCheck::default();
    for a in 0..3 {
        let deta = flat.eta[a].d();
        let l = &flat.complex_structures[a];
        for (r, xr) in flat.frame.iter().enumerate() {
            let annihilates = flat.eta[a].evaluate(std::slice::from_ref(xr));
            out.record(annihilates.is_zero(), || format!("η^{}(X_{r}) = {annihilates}", a + 1));
            for (s, xs) in flat.frame.iter().enumerate() {
                let lhs = deta.evaluate(&[xr.clone(), xs.clone()]);
                let rhs = Polynomial::constant(nv, int(2) * &l[(s, r)]);
                out.record(lhs == rhs, || format!("dη^{}(X_{r}, X_{s}) = {lhs}, expected {rhs}", a + 1));
            }
        }
    }
    out
}

/// `ξ_a ⌟ η^b = δ_a^b` and `(ξ_a ⌟ dη^b)|_D = -(ξ_b ⌟ dη^a)|_D`.
pub fn check_reeb_conditions(flat: &FlatQC) -> ExactCheck {
    let nv = flat.nvars();
    let mut out = ExactCheck::default();
    for a in 0..3 {
        for b in 0..3 {
            let v = flat.eta[b].evaluate(std::slice::from_ref(&flat.reeb[a]));
            let expected = if a == b { Polynomial::one(nv) } else { Polynomial::zero(nv) };
            out.record(v == expected, || format!("ξ_{} ⌟ η^{} = {v}", a + 1, b + 1));
            let ab = flat.eta[b].d().interior(&flat.reeb[a]);
            let ba = flat.eta[a].d().interior(&flat.reeb[b]);
            for (r, xr) in flat.frame.iter().enumerate() {
                let lhs = ab.evaluate(std::slice::from_ref(xr));
                let rhs = ba.evaluate(std::slice::from_ref(xr)).neg();
                out.record(lhs == rhs, || format!("(ξ_{} ⌟ dη^{})(X_{r}) = {lhs} vs {rhs}", a + 1, b + 1));
            }
        }
    }
    out
}

/// `d(dη^a) = 0`.
pub fn check_closed(flat: &FlatQC) -> ExactCheck {
    let mut out = ExactCheck::default();
    for a in 0..3 {
        let dd = flat.eta[a].d().d();
        out.record(dd.is_zero(), || format!("d(dη^{}) = {dd}", a + 1));
    }
    out
}

/// Quaternion relations `I_a^2 = -1`, `I_1 I_2 = I_3` and orthogonality
/// `g(I_a u, I_a v) = g(u, v)`.
pub fn check_quaternion_relations(flat: &FlatQC) -> ExactCheck {
    let id = RMatrix::identity(4 * flat.n);
    let minus_id = -&id;
    let [i1, i2, i3] = &flat.complex_structures;
    let mut out = ExactCheck::default();
    for (a, l) in flat.complex_structures.iter().enumerate() {
        out.record(&(l * l) == &minus_id, || format!("I_{}^2 != -1", a + 1));
        out.record(&(&l.transpose() * l) == &id, || format!("I_{} not orthogonal", a + 1));
    }
    out.record(&(i1 * i2) == i3, || "I_1 I_2 != I_3".into());
    out.record(&(i2 * i3) == i1, || "I_2 I_3 != I_1".into());
    out.record(&(i3 * i1) == i2, || "I_3 I_1 != I_2".into());
    out
}

/// Dimension of `D = ∩ ker η^a` at a rational point.
pub fn distribution_rank_at(flat: &FlatQC, point: &[Rational]) -> usize {
    let nv = flat.nvars();
    let rows: Vec<Vec<Rational>> = flat
        .eta
        .iter()
        .map(|eta| (0..nv).map(|v| eta.coefficient(&[v]).eval(point)).collect())
        .collect();
    nullspace(&rows, nv).len()
}

/// Outcome of the `n = 1` orthonormal-oriented check on `dη^a|_D`.
#[derive(Clone, Debug, Serialize)]
pub struct DucheminReport {
    /// Gram matrix in the inner product with `|e^{rs}| = 1` for `r < s`.
    pub gram: Vec<Vec<String>>,
    /// Common squared norm when the Gram matrix is a positive multiple of `Id`.
    pub norm_sqr: Option<String>,
    /// Sign of the coefficient determinant against `(e^{01}+e^{23}, e^{02}+e^{31}, e^{03}+e^{12})`.
    pub orientation: i32,
    pub self_dual: [bool; 3],
}

impl DucheminReport {
    pub fn passed(&self) -> bool {
        self.norm_sqr.is_some() && self.orientation > 0 && self.self_dual.iter().all(|&b| b)
    }
}

type TwoForm4 = [[Rational; 4]; 4];

fn levi_civita4(p: [usize; 4]) -> i32 {
    let mut idx = p;
    let mut sign = 1;
    for i in 0..4 {
        for j in 0..3 - i {
            if idx[j] > idx[j + 1] {
                idx.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    if idx == [0, 1, 2, 3] {
        sign
    } else {
        0
    }
}

fn hodge_star4(w: &TwoForm4) -> TwoForm4 {
    let mut out: TwoForm4 = Default::default();
    for r in 0..4 {
        for s in 0..4 {
            let mut acc = Rational::zero();
            for p in 0..4 {
                for q in p + 1..4 {
                    acc += Rational::from_integer(levi_civita4([p, q, r, s]).into()) * &w[p][q];
                }
            }
            out[r][s] = acc;
        }
    }
    out
}

fn inner4(a: &TwoForm4, b: &TwoForm4) -> Rational {
    let mut acc = Rational::zero();
    for r in 0..4 {
        for s in r + 1..4 {
            acc += &a[r][s] * &b[r][s];
        }
    }
    acc
}

fn det3(m: &[[Rational; 3]; 3]) -> Rational {
    &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1]) - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
        + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
}

/// Checks that `dη^1|_D, dη^2|_D, dη^3|_D` are self-dual, mutually orthogonal
/// with equal norms, and positively oriented in `Λ^2_+ D^*`. `D` carries the
/// orientation of `(1, i, j, k)`. The forms are evaluated at the origin; the
/// structure is left-invariant.
pub fn duchemin_check(flat: &FlatQC) -> Result<DucheminReport> {
    if flat.n != 1 {
        return Err(Error::WrongDimension { required: 1, found: flat.n });
    }
    let origin = vec![Rational::zero(); flat.nvars()];
    let forms: Vec<TwoForm4> = flat
        .eta
        .iter()
        .map(|eta| {
            let deta = eta.d();
            let mut w: TwoForm4 = Default::default();
            for (r, row) in w.iter_mut().enumerate() {
                for (s, entry) in row.iter_mut().enumerate() {
                    *entry = deta.evaluate(&[flat.frame[r].clone(), flat.frame[s].clone()]).eval(&origin);
                }
            }
            w
        })
        .collect();
    let gram: Vec<Vec<Rational>> = forms.iter().map(|a| forms.iter().map(|b| inner4(a, b)).collect()).collect();
    let diag = gram[0][0].clone();
    let is_scalar = (0..3).all(|a| (0..3).all(|b| gram[a][b] == if a == b { diag.clone() } else { Rational::zero() }));
    let norm_sqr = (is_scalar && diag > Rational::zero()).then(|| diag.to_string());

    let reference: Vec<TwoForm4> = [(0, 1, 2, 3), (0, 2, 3, 1), (0, 3, 1, 2)]
        .into_iter()
        .map(|(p, q, r, s)| {
            let mut w: TwoForm4 = Default::default();
            for (x, y) in [(p, q), (r, s)] {
                w[x][y] = Rational::one();
                w[y][x] = -Rational::one();
            }
            w
        })
        .collect();
    let mut coeffs: [[Rational; 3]; 3] = Default::default();
    for (a, w) in forms.iter().enumerate() {
        for (b, e) in reference.iter().enumerate() {
            coeffs[a][b] = inner4(w, e) / inner4(e, e);
        }
    }
    let det = det3(&coeffs);
    let orientation = if det > Rational::zero() {
        1
    } else if det < Rational::zero() {
        -1
    } else {
        0
    };
    let self_dual = [0, 1, 2].map(|a| hodge_star4(&forms[a]) == forms[a]);
    Ok(DucheminReport {
        gram: gram.iter().map(|row| row.iter().map(ToString::to_string).collect()).collect(),
        norm_sqr,
        orientation,
        self_dual,
    })
}

/// Stereographic chart of the fibre `S^2`. `North` projects from `-e_1` and
/// covers `a_1 ≠ -1`; `South` projects from `+e_1` and covers `a_1 ≠ 1`.
/// On the overlap the transition is `w ↦ w / |w|^2`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FiberChart {
    North,
    South,
}

impl FiberChart {
    pub fn for_point(a: &[Rational; 3]) -> FiberChart {
        if a[0] >= Rational::zero() {
            FiberChart::North
        } else {
            FiberChart::South
        }
    }

    fn pole_sign(self) -> i64 {
        match self {
            FiberChart::North => 1,
            FiberChart::South => -1,
        }
    }

    pub fn project(self, a: &[Rational; 3]) -> Result<[Rational; 2]> {
        let denom = Rational::one() + &a[0] * int(self.pole_sign());
        if denom.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok([&a[1] / &denom, &a[2] / &denom])
    }

    pub fn unproject(self, w: &[Rational; 2]) -> [Rational; 3] {
        let s = &w[0] * &w[0] + &w[1] * &w[1];
        let d = Rational::one() + &s;
        [
            (Rational::one() - &s) / &d * int(self.pole_sign()),
            int(2) * &w[0] / &d,
            int(2) * &w[1] / &d,
        ]
    }

    /// Columns `∂a/∂w_1`, `∂a/∂w_2`.
    pub fn jacobian(self, w: &[Rational; 2]) -> [[Rational; 3]; 2] {
        let s = &w[0] * &w[0] + &w[1] * &w[1];
        let d = Rational::one() + &s;
        let d2 = &d * &d;
        [0, 1].map(|k| {
            let mut col: [Rational; 3] = Default::default();
            col[0] = int(-4 * self.pole_sign()) * &w[k] / &d2;
            for j in 0..2 {
                let delta = if j == k { int(2) / &d } else { Rational::zero() };
                col[j + 1] = delta - int(4) * &w[j] * &w[k] / &d2;
            }
            col
        })
    }

    /// Matrix of `V ↦ a × V` on `T_a S^2` in the coordinate basis `∂_{w_1}, ∂_{w_2}`.
    pub fn rotation_matrix(self, w: &[Rational; 2]) -> [[Rational; 2]; 2] {
        let a = self.unproject(w);
        let p = self.jacobian(w);
        let norm = dot3(&p[0], &p[0]);
        let mut out: [[Rational; 2]; 2] = Default::default();
        for (c, col) in p.iter().enumerate() {
            let image = cross3(&a, col);
            for r in 0..2 {
                out[r][c] = dot3(&p[r], &image) / &norm;
            }
        }
        out
    }
}

pub fn cross3(a: &[Rational; 3], b: &[Rational; 3]) -> [Rational; 3] {
    [
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

pub fn dot3(a: &[Rational; 3], b: &[Rational; 3]) -> Rational {
    &a[0] * &b[0] + &a[1] * &b[1] + &a[2] * &b[2]
}

/// `J^Z` on the Reeb part: `v ↦ a × v` for `v ⊥ a`.
pub fn rotate_reeb(point: &TwistorPoint, v: &[Rational; 3]) -> Result<[Rational; 3]> {
    let a = point.coefficients();
    if !dot3(&a, v).is_zero() {
        return Err(Error::InvalidConfig("Reeb vector is not orthogonal to ξ_I".into()));
    }
    Ok(cross3(&a, v))
}

/// Index `k` of the first axis among `e_2, e_3, e_1` not parallel to `a`.
pub fn reference_axis(a: &[Rational; 3]) -> usize {
    [1, 2, 0]
        .into_iter()
        .find(|&k| {
            let mut e: [Rational; 3] = Default::default();
            e[k] = Rational::one();
            cross3(a, &e).iter().any(|v| !v.is_zero())
        })
        .expect("a unit vector is parallel to at most one axis")
}

/// A point of the twistor space with a fibre chart around it.
#[derive(Clone, Debug)]
pub struct TwistorChart {
    pub base: Vec<Rational>,
    pub point: TwistorPoint,
    pub chart: FiberChart,
    /// Axis `e` with `a × e ≠ 0`; the Reeb part of `H` is spanned by
    /// `b = a × e` and `c = a × b`.
    pub axis: usize,
}

impl TwistorChart {
    pub fn new(flat: &FlatQC, base: Vec<Rational>, point: TwistorPoint) -> Result<Self> {
        if base.len() != flat.nvars() {
            return Err(Error::SizeMismatch { expected: flat.nvars(), found: base.len() });
        }
        let a = point.coefficients();
        Ok(TwistorChart { base, chart: FiberChart::for_point(&a), axis: reference_axis(&a), point })
    }

    pub fn fiber_coordinates(&self) -> [Rational; 2] {
        self.chart.project(&self.point.coefficients()).expect("chart chosen to contain the point")
    }

    pub fn reeb_basis(&self) -> [[Rational; 3]; 2] {
        let a = self.point.coefficients();
        let mut e: [Rational; 3] = Default::default();
        e[self.axis] = Rational::one();
        let b = cross3(&a, &e);
        let c = cross3(&a, &b);
        [b, c]
    }
}

/// `H_I` at a chart point: basis vectors in `T M ⊕ R^3` (the fibre tangent
/// embedded in `R^3`) and the matrix of `J^Z` in that basis.
#[derive(Clone, Debug)]
pub struct CrStructure {
    pub basis: Vec<Vec<Rational>>,
    pub j: RMatrix,
}

const ROTATION: [[i64; 2]; 2] = [[0, -1], [1, 0]];

/// Builds `H_I = D^∇ ⊕ (ξ_I^⊥)^∇ ⊕ Ver` and `J^Z`: `I` on `D`, `v ↦ a × v`
/// on `ξ_I^⊥` and on `Ver`. The connection is flat in the left-invariant frame,
/// so horizontal lifts have no fibre component.
pub fn cr_structure_at(flat: &FlatQC, chart: &TwistorChart) -> CrStructure {
    let n = flat.n;
    let nv = flat.nvars();
    let dim = nv + 3;
    let mut basis = Vec::with_capacity(4 * n + 4);
    for x in &flat.frame {
        let mut v: Vec<Rational> = (0..nv).map(|c| x.component(c).eval(&chart.base)).collect();
        v.extend([Rational::zero(), Rational::zero(), Rational::zero()]);
        basis.push(v);
    }
    let [b, c] = chart.reeb_basis();
    for u in [&b, &c] {
        let mut v = vec![Rational::zero(); dim];
        v[4 * n..4 * n + 3].clone_from_slice(u);
        basis.push(v);
    }
    for u in [&b, &c] {
        let mut v = vec![Rational::zero(); dim];
        v[nv..].clone_from_slice(u);
        basis.push(v);
    }
    let l = flat.complex_structure_at(&chart.point);
    let mut j = RMatrix::zeros(4 * n + 4, 4 * n + 4);
    for r in 0..4 * n {
        for s in 0..4 * n {
            j[(r, s)] = l[(r, s)].clone();
        }
    }
    for block in [4 * n, 4 * n + 2] {
        for r in 0..2 {
            for s in 0..2 {
                j[(block + r, block + s)] = int(ROTATION[r][s]);
            }
        }
    }
    CrStructure { basis, j }
}

impl CrStructure {
    pub fn rank(&self) -> usize {
        crate::matrix::rank(&self.basis)
    }

    pub fn squares_to_minus_identity(&self) -> bool {
        let size = self.j.rows();
        &self.j * &self.j == -&RMatrix::identity(size)
    }

    /// Applies `J^Z` to an ambient vector of `H_I`.
    pub fn apply(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        let coords = self.coordinates(v)?;
        let image = self.j.mul_vec(&coords);
        let dim = v.len();
        Ok((0..dim)
            .map(|k| image.iter().zip(&self.basis).fold(Rational::zero(), |acc, (c, b)| acc + c * &b[k]))
            .collect())
    }

    /// Coordinates of `v` in the basis of `H_I`.
    pub fn coordinates(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        let m = self.basis.len();
        // Kernel of [basis | v]; a vector with nonzero last entry gives v.
        let rows: Vec<Vec<Rational>> = (0..v.len())
            .map(|k| self.basis.iter().map(|b| b[k].clone()).chain(std::iter::once(v[k].clone())).collect())
            .collect();
        let ker = nullspace(&rows, m + 1);
        let sol = ker
            .iter()
            .find(|k| !k[m].is_zero())
            .ok_or_else(|| Error::InvalidConfig("vector is not in H_I".into()))?;
        let scale = -sol[m].recip();
        Ok(sol[..m].iter().map(|c| c * &scale).collect())
    }
}

/// Checks that `J^Z` on `Ver` agrees in both stereographic charts at a point
/// of their overlap: `dτ ∘ J_N = J_S ∘ dτ` for `τ(w) = w / |w|^2`.
pub fn chart_overlap_consistent(point: &TwistorPoint) -> Result<bool> {
    let a = point.coefficients();
    let wn = FiberChart::North.project(&a)?;
    let ws = FiberChart::South.project(&a)?;
    let jn = FiberChart::North.rotation_matrix(&wn);
    let js = FiberChart::South.rotation_matrix(&ws);
    let s = &wn[0] * &wn[0] + &wn[1] * &wn[1];
    let s2 = &s * &s;
    let dtau: [[Rational; 2]; 2] =
        [0, 1].map(|r| [0, 1].map(|c| (if r == c { s.clone() } else { Rational::zero() } - int(2) * &wn[r] * &wn[c]) / &s2));
    let mul = |x: &[[Rational; 2]; 2], y: &[[Rational; 2]; 2]| -> [[Rational; 2]; 2] {
        [0, 1].map(|r| [0, 1].map(|c| &x[r][0] * &y[0][c] + &x[r][1] * &y[1][c]))
    };
    Ok(mul(&dtau, &jn) == mul(&js, &dtau))
}

/// Random base point with small rational coordinates.
pub fn sample_base_point(rng: &mut impl Rng, n: usize) -> Vec<Rational> {
    (0..4 * n + 3).map(|_| small_rational(rng)).collect()
}

pub fn sample_chart(rng: &mut impl Rng, flat: &FlatQC) -> TwistorChart {
    let base = sample_base_point(rng, flat.n);
    let point = TwistorPoint::new(sphere_point(rng)).expect("sphere sampler yields unit imaginary quaternions");
    TwistorChart::new(flat, base, point).expect("base point has the right length")
}

/// Tolerances for the numeric twistor checks.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct NumericConfig {
    pub fd_step: f64,
    pub residual_tol: f64,
    pub eig_floor: f64,
}

impl Default for NumericConfig {
    fn default() -> Self {
        NumericConfig { fd_step: 1e-5, residual_tol: 1e-6, eig_floor: 1e-8 }
    }
}

/// The twistor CR structure near a chart point as smooth data on the
/// coordinates `p = (x, t, w)` of `M × (chart)`, dimension `4n + 5`.
///
/// Frame of `H`: `X_r` for `r < 4n`, then `B = (a × e)·∂_t`, `C = (a × B)·∂_t`,
/// then `∂_{w_1}`, `∂_{w_2}`.
pub struct NumericTwistor {
    n: usize,
    chart: FiberChart,
    axis: [f64; 3],
    coefficient: f64,
    structures: [DMatrix<f64>; 3],
    theta_sign: f64,
    perturbation: f64,
}

fn cross_f(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot_f(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

impl NumericTwistor {
    pub fn new(flat: &FlatQC, chart: &TwistorChart) -> Self {
        let mut axis = [0.0; 3];
        axis[chart.axis] = 1.0;
        NumericTwistor {
            n: flat.n,
            chart: chart.chart,
            axis,
            coefficient: ETA_BILINEAR_COEFFICIENT as f64,
            structures: [0, 1, 2].map(|a| to_f64_matrix(&flat.complex_structures[a])),
            theta_sign: 1.0,
            perturbation: 0.0,
        }
    }

    /// Uses `-θ` as the defining form.
    pub fn with_theta_sign(mut self, sign: f64) -> Self {
        self.theta_sign = sign;
        self
    }

    /// Replaces `J` by `J + ε E`, where `E` sends `X_0` to `B` and `C` to `X_1`.
    pub fn with_perturbation(mut self, eps: f64) -> Self {
        self.perturbation = eps;
        self
    }

    pub fn dim(&self) -> usize {
        4 * self.n + 5
    }

    pub fn rank(&self) -> usize {
        4 * self.n + 4
    }

    /// Chart coordinates of a chart point.
    pub fn coordinates(&self, chart: &TwistorChart) -> Vec<f64> {
        let mut p: Vec<f64> = chart.base.iter().map(to_f64).collect();
        p.extend(chart.fiber_coordinates().iter().map(to_f64));
        p
    }

    fn fiber(&self, p: &[f64]) -> [f64; 3] {
        let w = [p[4 * self.n + 3], p[4 * self.n + 4]];
        let s = w[0] * w[0] + w[1] * w[1];
        let d = 1.0 + s;
        let sign = match self.chart {
            FiberChart::North => 1.0,
            FiberChart::South => -1.0,
        };
        [sign * (1.0 - s) / d, 2.0 * w[0] / d, 2.0 * w[1] / d]
    }

    fn fiber_jacobian(&self, p: &[f64]) -> [[f64; 3]; 2] {
        let w = [p[4 * self.n + 3], p[4 * self.n + 4]];
        let s = w[0] * w[0] + w[1] * w[1];
        let d = 1.0 + s;
        let sign = match self.chart {
            FiberChart::North => 1.0,
            FiberChart::South => -1.0,
        };
        [0, 1].map(|k| {
            let mut col = [0.0; 3];
            col[0] = -4.0 * sign * w[k] / (d * d);
            for j in 0..2 {
                let delta = if j == k { 2.0 / d } else { 0.0 };
                col[j + 1] = delta - 4.0 * w[j] * w[k] / (d * d);
            }
            col
        })
    }

    fn reeb_pair(&self, p: &[f64]) -> ([f64; 3], [f64; 3]) {
        let a = self.fiber(p);
        let b = cross_f(&a, &self.axis);
        let c = cross_f(&a, &b);
        (b, c)
    }

    /// Frame field `k` at `p`.
    pub fn frame(&self, k: usize, p: &[f64]) -> Vec<f64> {
        let n4 = 4 * self.n;
        let mut v = vec![0.0; self.dim()];
        if k < n4 {
            v[k] = 1.0;
            for (a, l) in self.structures.iter().enumerate() {
                let lx: f64 = (0..n4).map(|c| l[(k, c)] * p[c]).sum();
                v[n4 + a] = -self.coefficient * lx;
            }
        } else if k < n4 + 2 {
            let (b, c) = self.reeb_pair(p);
            let u = if k == n4 { b } else { c };
            v[n4..n4 + 3].copy_from_slice(&u);
        } else {
            v[n4 + 3 + (k - n4 - 2)] = 1.0;
        }
        v
    }

    /// Matrix of `J` in the frame at `p`.
    pub fn j_matrix(&self, p: &[f64]) -> DMatrix<f64> {
        let n4 = 4 * self.n;
        let r = self.rank();
        let a = self.fiber(p);
        let mut j = DMatrix::zeros(r, r);
        let l = &self.structures[0] * a[0] + &self.structures[1] * a[1] + &self.structures[2] * a[2];
        j.view_mut((0, 0), (n4, n4)).copy_from(&l);
        j[(n4 + 1, n4)] = 1.0;
        j[(n4, n4 + 1)] = -1.0;
        let cols = self.fiber_jacobian(p);
        let norm = dot_f(&cols[0], &cols[0]);
        for (c, col) in cols.iter().enumerate() {
            let image = cross_f(&a, col);
            for (rr, row) in cols.iter().enumerate() {
                j[(n4 + 2 + rr, n4 + 2 + c)] = dot_f(row, &image) / norm;
            }
        }
        if self.perturbation != 0.0 {
            j[(n4, 0)] += self.perturbation;
            j[(1, n4 + 1)] += self.perturbation;
        }
        j
    }

    /// `J` applied to frame field `k` at `p`.
    pub fn j_frame(&self, k: usize, p: &[f64]) -> Vec<f64> {
        let j = self.j_matrix(p);
        let mut out = vec![0.0; self.dim()];
        for m in 0..self.rank() {
            let c = j[(m, k)];
            if c != 0.0 {
                for (o, f) in out.iter_mut().zip(self.frame(m, p)) {
                    *o += c * f;
                }
            }
        }
        out
    }

    /// `θ = Σ a_a η^a` applied to a tangent vector at `p`.
    pub fn theta(&self, p: &[f64], v: &[f64]) -> f64 {
        let n4 = 4 * self.n;
        let a = self.fiber(p);
        let mut acc = 0.0;
        for (idx, l) in self.structures.iter().enumerate() {
            // η^a(v) = v_{t_a} + λ (L_a x) · v_x
            let mut eta = v[n4 + idx];
            for s in 0..n4 {
                let lx: f64 = (0..n4).map(|r| l[(s, r)] * p[r]).sum();
                eta += self.coefficient * lx * v[s];
            }
            acc += a[idx] * eta;
        }
        self.theta_sign * acc
    }

    fn xi(&self, p: &[f64]) -> Vec<f64> {
        let mut v = vec![0.0; self.dim()];
        v[4 * self.n..4 * self.n + 3].copy_from_slice(&self.fiber(p));
        v
    }

    /// Central-difference Lie bracket of two vector fields at `p`.
    pub fn bracket(
        &self,
        x: &dyn Fn(&[f64]) -> Vec<f64>,
        y: &dyn Fn(&[f64]) -> Vec<f64>,
        p: &[f64],
        h: f64,
    ) -> Vec<f64> {
        let directional = |f: &dyn Fn(&[f64]) -> Vec<f64>, dir: &[f64]| -> Vec<f64> {
            let plus: Vec<f64> = p.iter().zip(dir).map(|(a, d)| a + h * d).collect();
            let minus: Vec<f64> = p.iter().zip(dir).map(|(a, d)| a - h * d).collect();
            f(&plus).iter().zip(f(&minus)).map(|(a, b)| (a - b) / (2.0 * h)).collect()
        };
        let xp = x(p);
        let yp = y(p);
        directional(y, &xp).iter().zip(directional(x, &yp)).map(|(a, b)| a - b).collect()
    }

    /// Symmetrized Levi form `L_{pq} = -θ([E_p, J E_q])` in the frame.
    pub fn levi_form(&self, p: &[f64], h: f64) -> DMatrix<f64> {
        let r = self.rank();
        let mut l = DMatrix::zeros(r, r);
        for a in 0..r {
            for b in 0..r {
                let ea = |q: &[f64]| self.frame(a, q);
                let jeb = |q: &[f64]| self.j_frame(b, q);
                l[(a, b)] = -self.theta(p, &self.bracket(&ea, &jeb, p, h));
            }
        }
        (&l + l.transpose()) * 0.5
    }

    /// Largest partial-integrability and Nijenhuis residuals over frame pairs.
    pub fn integrability_residuals(&self, p: &[f64], h: f64) -> (f64, f64) {
        let r = self.rank();
        let dim = self.dim();
        let mut frame_cols = DMatrix::zeros(dim, dim);
        let mut j_cols = DMatrix::zeros(dim, dim);
        for k in 0..r {
            frame_cols.set_column(k, &DVector::from_vec(self.frame(k, p)));
            j_cols.set_column(k, &DVector::from_vec(self.j_frame(k, p)));
        }
        frame_cols.set_column(r, &DVector::from_vec(self.xi(p)));
        let j_full = match frame_cols.try_inverse() {
            Some(inv) => j_cols * inv,
            None => return (f64::INFINITY, f64::INFINITY),
        };
        let xi = self.xi(p);
        let project = |v: Vec<f64>| -> DVector<f64> {
            let t = self.theta(p, &v) * self.theta_sign;
            DVector::from_iterator(dim, v.iter().zip(&xi).map(|(a, b)| a - t * b))
        };
        let (mut partial, mut nijenhuis) = (0.0f64, 0.0f64);
        for a in 0..r {
            for b in a..r {
                let x = |q: &[f64]| self.frame(a, q);
                let y = |q: &[f64]| self.frame(b, q);
                let jx = |q: &[f64]| self.j_frame(a, q);
                let jy = |q: &[f64]| self.j_frame(b, q);
                let xy = self.bracket(&x, &y, p, h);
                let jxjy = self.bracket(&jx, &jy, p, h);
                let w: Vec<f64> = xy.iter().zip(&jxjy).map(|(u, v)| u - v).collect();
                let z: Vec<f64> = self
                    .bracket(&jx, &y, p, h)
                    .iter()
                    .zip(self.bracket(&x, &jy, p, h))
                    .map(|(u, v)| u + v)
                    .collect();
                partial = partial.max(self.theta(p, &w).abs());
                let diff = &j_full * project(w) - project(z);
                nijenhuis = nijenhuis.max(diff.amax());
            }
        }
        (partial, nijenhuis)
    }
}

/// One sampled point of the twistor space.
#[derive(Clone, Debug, Serialize)]
pub struct SampleRow {
    pub point: Vec<f64>,
    pub fiber: [f64; 3],
    pub chart: FiberChart,
    pub signature: (usize, usize),
    pub min_eig: f64,
    pub degenerate: bool,
    pub residuals: Residuals,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Residuals {
    pub partial: f64,
    pub nijenhuis: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.partial.max(self.nijenhuis)
    }
}

/// Positive and negative eigenvalue counts and the smallest `|λ|`.
pub fn signature_of(m: &DMatrix<f64>, floor: f64) -> ((usize, usize), f64) {
    let eig = SymmetricEigen::new(m.clone());
    let pos = eig.eigenvalues.iter().filter(|&&v| v > floor).count();
    let neg = eig.eigenvalues.iter().filter(|&&v| v < -floor).count();
    let min = eig.eigenvalues.iter().fold(f64::INFINITY, |acc, v| acc.min(v.abs()));
    ((pos, neg), min)
}

/// Levi signature and integrability residuals at one chart point.
pub fn analyze_sample(flat: &FlatQC, chart: &TwistorChart, cfg: &NumericConfig) -> SampleRow {
    let model = NumericTwistor::new(flat, chart);
    let p = model.coordinates(chart);
    let (signature, min_eig) = signature_of(&model.levi_form(&p, cfg.fd_step), cfg.eig_floor);
    let (partial, nijenhuis) = model.integrability_residuals(&p, cfg.fd_step);
    SampleRow {
        point: chart.base.iter().map(to_f64).collect(),
        fiber: chart.point.to_f64(),
        chart: chart.chart,
        signature,
        min_eig,
        degenerate: !(min_eig > cfg.eig_floor),
        residuals: Residuals { partial, nijenhuis },
    }
}

/// Summary over a batch of samples.
#[derive(Clone, Debug, Serialize)]
pub struct LeviSummary {
    pub expected: (usize, usize),
    pub rows: Vec<SampleRow>,
    pub mismatched: usize,
    pub degenerate: usize,
    pub min_eig: f64,
}

impl LeviSummary {
    pub fn passed(&self) -> bool {
        self.mismatched == 0 && self.degenerate == 0 && !self.rows.is_empty()
    }
}

/// Levi signature at each chart, expected to be `(4n + 2, 2)`. Degenerate
/// samples are kept and counted.
pub fn levi_signature(flat: &FlatQC, charts: &[TwistorChart], cfg: &NumericConfig) -> Result<LeviSummary> {
    validate_numeric(cfg)?;
    let expected = (4 * flat.n + 2, 2);
    let rows: Vec<SampleRow> = charts.iter().map(|c| analyze_sample(flat, c, cfg)).collect();
    let mismatched = rows.iter().filter(|r| r.signature != expected).count();
    let degenerate = rows.iter().filter(|r| r.degenerate).count();
    let min_eig = rows.iter().fold(f64::INFINITY, |acc, r| acc.min(r.min_eig));
    Ok(LeviSummary { expected, rows, mismatched, degenerate, min_eig })
}

/// Largest integrability residual over the charts, for `J` or `J + εE`.
pub fn integrability_residual(
    flat: &FlatQC,
    charts: &[TwistorChart],
    cfg: &NumericConfig,
    perturbation: f64,
) -> Result<f64> {
    validate_numeric(cfg)?;
    Ok(charts
        .iter()
        .map(|c| {
            let model = NumericTwistor::new(flat, c).with_perturbation(perturbation);
            let p = model.coordinates(c);
            let (a, b) = model.integrability_residuals(&p, cfg.fd_step);
            a.max(b)
        })
        .fold(0.0, f64::max))
}

pub fn validate_numeric(cfg: &NumericConfig) -> Result<()> {
    for (name, v) in [("fd_step", cfg.fd_step), ("residual_tol", cfg.residual_tol), ("eig_floor", cfg.eig_floor)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidConfig(format!("{name} must be a positive finite number, got {v}")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::rng_from_seed;
    use crate::scalar::rat;

    #[test]
    fn bilinear_coefficient_matches_golden_value() {
        for n in 1..=2 {
            assert_eq!(solve_bilinear_coefficient(n).unwrap(), int(ETA_BILINEAR_COEFFICIENT));
        }
    }

    #[test]
    fn structure_equation_on_a_unit_vector() {
        let flat = build_flat_qc(1).unwrap();
        let nv = flat.nvars();
        let e1 = &flat.horizontal_frame()[0];
        // I_1 X_0 = X_1 in the frame
        let i1e1 = &flat.horizontal_frame()[1];
        let v = flat.eta(0).d().evaluate(&[e1.clone(), i1e1.clone()]);
        assert_eq!(v, Polynomial::constant(nv, int(2)));
    }

    #[test]
    fn exact_identities_hold() {
        for n in 1..=2 {
            let flat = build_flat_qc(n).unwrap();
            assert!(check_structure_equation(&flat).passed());
            assert!(check_reeb_conditions(&flat).passed());
            assert!(check_closed(&flat).passed());
            assert!(check_quaternion_relations(&flat).passed());
        }
    }

    #[test]
    fn wrong_coefficient_breaks_structure_equation() {
        let mut flat = build_flat_qc(1).unwrap();
        flat.eta[1] = contact_form(1, 1, &int(2));
        assert!(!check_structure_equation(&flat).passed());
    }

    #[test]
    fn distribution_has_rank_4n() {
        let flat = build_flat_qc(2).unwrap();
        let mut rng = rng_from_seed(1);
        let p = sample_base_point(&mut rng, 2);
        assert_eq!(distribution_rank_at(&flat, &p), 8);
    }

    #[test]
    fn duchemin_passes_and_swap_flips_orientation() {
        let flat = build_flat_qc(1).unwrap();
        let report = duchemin_check(&flat).unwrap();
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.norm_sqr.as_deref(), Some("8"));
        let swapped = duchemin_check(&flat.with_swapped_forms(0, 1)).unwrap();
        assert_eq!(swapped.orientation, -1);
        assert!(!swapped.passed());
        assert!(matches!(
            duchemin_check(&build_flat_qc(2).unwrap()),
            Err(Error::WrongDimension { required: 1, found: 2 })
        ));
    }

    #[test]
    fn hodge_star_is_an_involution_on_two_forms() {
        let mut w: TwoForm4 = Default::default();
        let mut k = 1;
        for r in 0..4 {
            for s in r + 1..4 {
                w[r][s] = int(k);
                w[s][r] = int(-k);
                k += 1;
            }
        }
        assert_eq!(hodge_star4(&hodge_star4(&w)), w);
    }

    #[test]
    fn north_pole_structure() {
        let flat = build_flat_qc(1).unwrap();
        let chart = TwistorChart::new(&flat, vec![Rational::zero(); 7], TwistorPoint::base()).unwrap();
        let cr = cr_structure_at(&flat, &chart);
        assert_eq!(cr.rank(), 8);
        assert!(cr.squares_to_minus_identity());
        assert_eq!(flat.complex_structure_at(&chart.point), *flat.complex_structure(0));
        // ξ_2 ↦ ξ_3
        let mut xi2 = vec![Rational::zero(); 10];
        xi2[5] = Rational::one();
        let mut xi3 = vec![Rational::zero(); 10];
        xi3[6] = Rational::one();
        assert_eq!(cr.apply(&xi2).unwrap(), xi3);
    }

    #[test]
    fn rotated_point_reeb_action() {
        let p = TwistorPoint::from_coefficients([rat(-7, 25), int(0), rat(-24, 25)]).unwrap();
        let image = rotate_reeb(&p, &[int(0), int(1), int(0)]).unwrap();
        assert_eq!(image, [rat(24, 25), int(0), rat(-7, 25)]);
        let flat = build_flat_qc(1).unwrap();
        let chart = TwistorChart::new(&flat, vec![int(1); 7], p).unwrap();
        let cr = cr_structure_at(&flat, &chart);
        let mut v = vec![Rational::zero(); 10];
        v[5] = Rational::one();
        let mut expected = vec![Rational::zero(); 10];
        expected[4..7].clone_from_slice(&image);
        assert_eq!(cr.apply(&v).unwrap(), expected);
    }

    #[test]
    fn charts_agree_on_overlap() {
        let mut rng = rng_from_seed(5);
        for _ in 0..20 {
            let p = TwistorPoint::new(sphere_point(&mut rng)).unwrap();
            let a = p.coefficients();
            if a[0] == Rational::one() || a[0] == -Rational::one() {
                continue;
            }
            assert!(chart_overlap_consistent(&p).unwrap());
        }
    }

    #[test]
    fn stereographic_round_trip() {
        let a = [rat(-7, 25), int(0), rat(-24, 25)];
        for chart in [FiberChart::North, FiberChart::South] {
            let w = chart.project(&a).unwrap();
            assert_eq!(chart.unproject(&w), a);
        }
        assert!(FiberChart::North.project(&[int(-1), int(0), int(0)]).is_err());
    }

    #[test]
    fn levi_signature_small_batch() {
        let flat = build_flat_qc(1).unwrap();
        let mut rng = rng_from_seed(11);
        let charts: Vec<TwistorChart> = (0..5).map(|_| sample_chart(&mut rng, &flat)).collect();
        let cfg = NumericConfig::default();
        let summary = levi_signature(&flat, &charts, &cfg).unwrap();
        assert!(summary.passed(), "{:?}", summary.rows);
        for row in &summary.rows {
            assert!(row.residuals.max() < 1e-6, "{row:?}");
        }
        let probe = integrability_residual(&flat, &charts, &cfg, 0.1).unwrap();
        assert!(probe > 1e-3, "probe residual {probe}");
    }

    #[test]
    fn negated_theta_swaps_counts() {
        let flat = build_flat_qc(1).unwrap();
        let mut rng = rng_from_seed(2);
        let chart = sample_chart(&mut rng, &flat);
        let model = NumericTwistor::new(&flat, &chart).with_theta_sign(-1.0);
        let p = model.coordinates(&chart);
        let (sig, _) = signature_of(&model.levi_form(&p, 1e-5), 1e-8);
        assert_eq!(sig, (2, 6));
    }

    #[test]
    fn tiny_step_is_reported_degenerate() {
        let flat = build_flat_qc(1).unwrap();
        let mut rng = rng_from_seed(3);
        let charts = vec![sample_chart(&mut rng, &flat)];
        let cfg = NumericConfig { fd_step: 1e-30, ..NumericConfig::default() };
        let summary = levi_signature(&flat, &charts, &cfg).unwrap();
        assert_eq!(summary.degenerate, 1);
        assert!(!summary.passed());
    }

    #[test]
    fn equal_fields_have_zero_residual() {
        let flat = build_flat_qc(1).unwrap();
        let mut rng = rng_from_seed(4);
        let chart = sample_chart(&mut rng, &flat);
        let model = NumericTwistor::new(&flat, &chart);
        let p = model.coordinates(&chart);
        for k in 0..model.rank() {
            let x = |q: &[f64]| model.frame(k, q);
            let b = model.bracket(&x, &x, &p, 1e-5);
            assert!(b.iter().all(|&v| v == 0.0));
        }
    }
}
