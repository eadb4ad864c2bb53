//! Matrix realizations of `g = sp(Q)` (quaternionic, size `n+2`) and
//! `g~ = su(Q~)` (complex, size `2n+4`), their contact gradings and brackets.
//!
//! Grades are the eigenvalues of `ad(E)` for a real diagonal grading element
//! `E`, so the grade of entry `(r, c)` is `w_r - w_c` for the diagonal weights
//! `w`. For `g` the weights are `(1, 0, ..., 0, -1)`. For `g~` the complex
//! coordinates are ordered `(y_0..y_{n+1}, z_0..z_{n+1})` and only `y_0`,
//! `y_{n+1}` carry weight `1`, `-1`.
//!
//! Elements of `g` follow the block form
//!
//! ```text
//!   [ a     z     q   ]
//!   [ x̄     A0   -z̄ᵗ  ]
//!   [ p̄    -xᵗ   -ā   ]
//! ```
//!
//! and the slot constructors take the *matrix entry* as argument: the element
//! written `[p̄]_{-2}` is built by `minus2(n, p̄)`, never by re-conjugating.

use std::fmt;


use crate::error::{Error, Result};
use crate::matrix::{nullspace, rank, Matrix};
use crate::scalar::{int, Complex, Quaternion, Rational, Scalar};

pub type QMatrix = Matrix<Quaternion>;
pub type CMatrix = Matrix<Complex>;

pub const MIN_GRADE: i32 = -2;
pub const MAX_GRADE: i32 = 2;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum AlgebraTag {
    /// `sp(Q)` on `H^{n+2}`.
    Sp,
    /// `su(Q~)` on `C^{2n+4}`.
    Su,
}

impl AlgebraTag {
    pub fn name(self) -> &'static str {
        match self {
            AlgebraTag::Sp => "sp(Q)",
            AlgebraTag::Su => "su(Q~)",
        }
    }
}

/// Entry type of one of the two matrix algebras.
pub trait AlgebraScalar: Scalar {
    const TAG: AlgebraTag;
    /// Real dimension of the scalar field.
    const REAL_DIM: usize;

    /// Matrix size for the qc dimension parameter `n`.
    fn size_for(n: usize) -> usize;
    /// Inverse of [`AlgebraScalar::size_for`].
    fn n_for(size: usize) -> Result<usize>;
    /// Diagonal weights of the grading element.
    fn weights(n: usize) -> Vec<i32>;
    fn real_coords(&self) -> Vec<Rational>;
    fn from_real_coords(c: &[Rational]) -> Self;
    /// Extra linear conditions beyond skewness (the trace for `su`).
    fn trace_condition(m: &Matrix<Self>) -> Vec<Rational>;
}

impl AlgebraScalar for Quaternion {
    const TAG: AlgebraTag = AlgebraTag::Sp;
    const REAL_DIM: usize = 4;

    fn size_for(n: usize) -> usize {
        n + 2
    }
    fn n_for(size: usize) -> Result<usize> {
        if size < 3 {
            return Err(Error::SizeMismatch { expected: 3, found: size });
        }
        Ok(size - 2)
    }
    fn weights(n: usize) -> Vec<i32> {
        let mut w = vec![0; n + 2];
        w[0] = 1;
        w[n + 1] = -1;
        w
    }
    fn real_coords(&self) -> Vec<Rational> {
        self.components().into_iter().cloned().collect()
    }
    fn from_real_coords(c: &[Rational]) -> Self {
        Quaternion::new(c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone())
    }
    fn trace_condition(_: &Matrix<Self>) -> Vec<Rational> {
        Vec::new()
    }
}

impl AlgebraScalar for Complex {
    const TAG: AlgebraTag = AlgebraTag::Su;
    const REAL_DIM: usize = 2;

    fn size_for(n: usize) -> usize {
        2 * n + 4
    }
    fn n_for(size: usize) -> Result<usize> {
        if size < 6 || size % 2 != 0 {
            return Err(Error::SizeMismatch { expected: 6, found: size });
        }
        Ok(size / 2 - 2)
    }
    fn weights(n: usize) -> Vec<i32> {
        let mut w = vec![0; 2 * n + 4];
        w[0] = 1;
        w[n + 1] = -1;
        w
    }
    fn real_coords(&self) -> Vec<Rational> {
        vec![self.re.clone(), self.im.clone()]
    }
    fn from_real_coords(c: &[Rational]) -> Self {
        Complex::new(c[0].clone(), c[1].clone())
    }
    fn trace_condition(m: &Matrix<Self>) -> Vec<Rational> {
        let t = m.trace();
        vec![t.re, t.im]
    }
}

/// Non-degenerate hermitian form given by its Gram matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct HermForm<T> {
    gram: Matrix<T>,
}

impl<T: AlgebraScalar> HermForm<T> {
    /// The form `Q` (for quaternions) or `Q~` (for complex numbers): slots
    /// `0` and `n+1` of each block paired antidiagonally, identity elsewhere.
    pub fn standard(n: usize) -> Self {
        let size = T::size_for(n);
        let block = n + 2;
        let gram = Matrix::from_fn(size, size, |r, c| {
            let (br, rr) = (r / block, r % block);
            let (bc, cc) = (c / block, c % block);
            let pairs = br == bc
                && ((rr == 0 && cc == n + 1)
                    || (rr == n + 1 && cc == 0)
                    || (rr == cc && rr != 0 && rr != n + 1));
            if pairs {
                T::one()
            } else {
                T::zero()
            }
        });
        HermForm { gram }
    }

    pub fn gram(&self) -> &Matrix<T> {
        &self.gram
    }

    /// `sum_{r,c} x_r H_{rc} conj(y_c)`.
    pub fn polar(&self, x: &[T], y: &[T]) -> T {
        let mut acc = T::zero();
        for (r, xr) in x.iter().enumerate() {
            for (c, yc) in y.iter().enumerate() {
                let h = &self.gram[(r, c)];
                if !h.is_zero() {
                    acc = acc + xr.clone() * h * &yc.conj();
                }
            }
        }
        acc
    }

    pub fn value(&self, x: &[T]) -> T {
        self.polar(x, x)
    }

    pub fn is_hermitian(&self) -> bool {
        self.gram.adjoint() == self.gram
    }

    /// `M* H + H M`, which vanishes exactly on the Lie algebra of the form.
    pub fn skewness(&self, m: &Matrix<T>) -> Matrix<T> {
        &(&m.adjoint() * &self.gram) + &(&self.gram * m)
    }
}

/// Diagonal matrix of grading weights.
pub fn grading_element<T: AlgebraScalar>(n: usize) -> Matrix<T> {
    let w: Vec<T> = T::weights(n).into_iter().map(|k| T::one().scale(&int(k as i64))).collect();
    Matrix::diagonal(&w)
}

fn check_square<T: AlgebraScalar>(m: &Matrix<T>) -> Result<usize> {
    if !m.is_square() {
        return Err(Error::SizeMismatch { expected: m.rows(), found: m.cols() });
    }
    T::n_for(m.rows())
}

/// Membership test for `sp(Q)` resp. `su(Q~)`.
pub fn in_algebra<T: AlgebraScalar>(m: &Matrix<T>) -> Result<bool> {
    let n = check_square(m)?;
    let form = HermForm::<T>::standard(n);
    Ok(form.skewness(m).is_zero() && T::trace_condition(m).iter().all(Scalar::is_zero))
}

/// Grade `k` component of an arbitrary square matrix.
pub fn grade_component<T: AlgebraScalar>(m: &Matrix<T>, k: i32) -> Result<Matrix<T>> {
    if !(MIN_GRADE..=MAX_GRADE).contains(&k) {
        return Err(Error::GradeOutOfRange(k));
    }
    let n = check_square(m)?;
    let w = T::weights(n);
    Ok(Matrix::from_fn(m.rows(), m.cols(), |r, c| {
        if w[r] - w[c] == k {
            m[(r, c)].clone()
        } else {
            T::zero()
        }
    }))
}

/// Lowest grade with a non-zero component; the zero matrix has degree `2`.
pub fn matrix_filtration_degree<T: AlgebraScalar>(m: &Matrix<T>) -> Result<i32> {
    let n = check_square(m)?;
    let w = T::weights(n);
    Ok(m.nonzero_entries().map(|(r, c, _)| w[r] - w[c]).min().unwrap_or(MAX_GRADE))
}

/// Does `m` map the base line (spanned by the first basis vector) into itself?
pub fn stabilizes_base_line<T: AlgebraScalar>(m: &Matrix<T>) -> bool {
    (1..m.rows()).all(|r| m[(r, 0)].is_zero())
}

/// Element of `sp(Q)` or `su(Q~)`.
#[derive(Clone, PartialEq, Debug)]
pub struct GradedElement<T> {
    matrix: Matrix<T>,
    n: usize,
}

pub type SpElement = GradedElement<Quaternion>;
pub type SuElement = GradedElement<Complex>;

impl<T: AlgebraScalar> GradedElement<T> {
    pub fn new(matrix: Matrix<T>) -> Result<Self> {
        let n = check_square(&matrix)?;
        if !in_algebra(&matrix)? {
            return Err(Error::NotInAlgebra(T::TAG.name()));
        }
        Ok(GradedElement { matrix, n })
    }

    pub fn zero(n: usize) -> Self {
        let s = T::size_for(n);
        GradedElement { matrix: Matrix::zeros(s, s), n }
    }

    pub fn grading_element(n: usize) -> Self {
        GradedElement { matrix: grading_element(n), n }
    }

    pub fn tag(&self) -> AlgebraTag {
        T::TAG
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.matrix
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    /// `MN - NM`.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::SizeMismatch { expected: self.n, found: other.n });
        }
        Ok(GradedElement { matrix: self.matrix.commutator(&other.matrix), n: self.n })
    }

    pub fn grade_project(&self, k: i32) -> Result<Self> {
        Ok(GradedElement { matrix: grade_component(&self.matrix, k)?, n: self.n })
    }

    pub fn components(&self) -> Vec<(i32, Self)> {
        (MIN_GRADE..=MAX_GRADE)
            .map(|k| (k, self.grade_project(k).expect("grade in range")))
            .collect()
    }

    pub fn filtration_degree(&self) -> i32 {
        matrix_filtration_degree(&self.matrix).expect("validated size")
    }

    /// In the parabolic subalgebra (filtration degree `>= 0`).
    pub fn in_parabolic(&self) -> bool {
        self.filtration_degree() >= 0
    }

    /// In the nilradical `p_+` (filtration degree `>= 1`).
    pub fn in_nilradical(&self) -> bool {
        self.filtration_degree() >= 1
    }

    pub fn add(&self, other: &Self) -> Self {
        GradedElement { matrix: &self.matrix + &other.matrix, n: self.n }
    }

    pub fn sub(&self, other: &Self) -> Self {
        GradedElement { matrix: &self.matrix - &other.matrix, n: self.n }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        GradedElement { matrix: self.matrix.scale(r), n: self.n }
    }

    /// Conjugation `g M g^{-1}` by an invertible matrix; the caller is
    /// responsible for `g` preserving the form.
    pub(crate) fn conjugated(&self, g: &Matrix<T>, g_inv: &Matrix<T>) -> Self {
        GradedElement { matrix: &(g * &self.matrix) * g_inv, n: self.n }
    }

    pub(crate) fn from_parts_unchecked(matrix: Matrix<T>, n: usize) -> Self {
        GradedElement { matrix, n }
    }
}

impl<T: AlgebraScalar> fmt::Display for GradedElement<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.matrix)
    }
}

/// Slot-wise description of an element of `sp(Q)`; all fields are the
/// literal matrix entries of the block form.
#[derive(Clone, PartialEq, Debug)]
pub struct SpParts {
    pub n: usize,
    /// Entry `(n+1, 0)`, purely imaginary.
    pub p_bar: Quaternion,
    /// Entries `(a, 0)` for `a = 1..=n`.
    pub x_bar: Vec<Quaternion>,
    /// Entry `(0, 0)`.
    pub a: Quaternion,
    /// Middle `n x n` block, in `sp(n)`.
    pub a0: QMatrix,
    /// Entries `(0, a)` for `a = 1..=n`.
    pub z: Vec<Quaternion>,
    /// Entry `(0, n+1)`, purely imaginary.
    pub q: Quaternion,
}

impl SpParts {
    pub fn zero(n: usize) -> Self {
        SpParts {
            n,
            p_bar: Quaternion::zero(),
            x_bar: vec![Quaternion::zero(); n],
            a: Quaternion::zero(),
            a0: Matrix::zeros(n, n),
            z: vec![Quaternion::zero(); n],
            q: Quaternion::zero(),
        }
    }

    pub fn assemble(&self) -> Result<SpElement> {
        let n = self.n;
        if self.x_bar.len() != n || self.z.len() != n {
            return Err(Error::SizeMismatch { expected: n, found: self.x_bar.len().min(self.z.len()) });
        }
        if self.a0.rows() != n || self.a0.cols() != n {
            return Err(Error::SizeMismatch { expected: n, found: self.a0.rows() });
        }
        for v in [&self.p_bar, &self.q] {
            if !v.is_imaginary() {
                return Err(Error::NotImaginary(v.to_string()));
            }
        }
        let mut m = Matrix::zeros(n + 2, n + 2);
        m[(0, 0)] = self.a.clone();
        m[(n + 1, n + 1)] = -self.a.conj();
        m[(n + 1, 0)] = self.p_bar.clone();
        m[(0, n + 1)] = self.q.clone();
        for i in 0..n {
            m[(i + 1, 0)] = self.x_bar[i].clone();
            m[(n + 1, i + 1)] = -self.x_bar[i].conj();
            m[(0, i + 1)] = self.z[i].clone();
            m[(i + 1, n + 1)] = -self.z[i].conj();
            for j in 0..n {
                m[(i + 1, j + 1)] = self.a0[(i, j)].clone();
            }
        }
        GradedElement::new(m)
    }

    /// Reads the slots back from a member of `sp(Q)`.
    pub fn decompose(m: &SpElement) -> Self {
        let n = m.n();
        let mat = m.matrix();
        SpParts {
            n,
            p_bar: mat[(n + 1, 0)].clone(),
            x_bar: (1..=n).map(|i| mat[(i, 0)].clone()).collect(),
            a: mat[(0, 0)].clone(),
            a0: Matrix::from_fn(n, n, |r, c| mat[(r + 1, c + 1)].clone()),
            z: (1..=n).map(|i| mat[(0, i)].clone()).collect(),
            q: mat[(0, n + 1)].clone(),
        }
    }
}

/// `[p̄]_{-2}`: the element whose only block entry is `p_bar`.
pub fn minus2(n: usize, p_bar: Quaternion) -> Result<SpElement> {
    SpParts { p_bar, ..SpParts::zero(n) }.assemble()
}

/// `[x̄]_{-1}` with `x_bar` the column of entries `(a, 0)`.
pub fn minus1(x_bar: Vec<Quaternion>) -> Result<SpElement> {
    let n = x_bar.len();
    SpParts { x_bar, ..SpParts::zero(n) }.assemble()
}

/// `[(a, A0)]_0`.
pub fn grade0(a: Quaternion, a0: QMatrix) -> Result<SpElement> {
    let n = a0.rows();
    SpParts { a, a0, ..SpParts::zero(n) }.assemble()
}

/// `[z]_1` with `z` the row of entries `(0, a)`.
pub fn plus1(z: Vec<Quaternion>) -> Result<SpElement> {
    let n = z.len();
    SpParts { z, ..SpParts::zero(n) }.assemble()
}

/// `[q]_2`.
pub fn plus2(n: usize, q: Quaternion) -> Result<SpElement> {
    SpParts { q, ..SpParts::zero(n) }.assemble()
}

/// Grade of the block containing entry `(r, c)` in the displayed `3 x 3`
/// block form of `sp(Q)`, read off the layout rather than from weights.
pub fn sp_block_grade(n: usize, r: usize, c: usize) -> i32 {
    let block = |i: usize| if i == 0 { 0 } else if i == n + 1 { 2 } else { 1 };
    const TABLE: [[i32; 3]; 3] = [[0, 1, 2], [-1, 0, 1], [-2, -1, 0]];
    TABLE[block(r)][block(c)]
}

/// One slot of the block form: a matrix position holding a free parameter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slot {
    pub label: String,
    pub row: usize,
    pub col: usize,
    pub grade: i32,
    /// Whether only imaginary values are allowed in the slot.
    pub imaginary: bool,
}

/// Free slots of `sp(Q)`, ordered by grade.
pub fn sp_slots(n: usize) -> Vec<Slot> {
    let mut out = Vec::new();
    let mut push = |label: String, row, col, grade, imaginary| {
        out.push(Slot { label, row, col, grade, imaginary })
    };
    push("p".into(), n + 1, 0, -2, true);
    for a in 1..=n {
        push(format!("x{a}"), a, 0, -1, false);
    }
    push("a".into(), 0, 0, 0, false);
    for r in 1..=n {
        for c in r..=n {
            push(format!("A{r}{c}"), r, c, 0, r == c);
        }
    }
    for a in 1..=n {
        push(format!("z{a}"), 0, a, 1, false);
    }
    push("q".into(), 0, n + 1, 2, true);
    out
}

/// Element of a real basis of `sp(Q)`.
#[derive(Clone, Debug)]
pub struct BasisElement {
    pub label: String,
    pub slot: usize,
    pub element: SpElement,
}

/// Real basis of `sp(Q)`: one element per slot and admissible real
/// direction `1, i, j, k` of the slot value.
pub fn sp_basis(n: usize) -> Vec<BasisElement> {
    let units = ["1", "i", "j", "k"];
    let mut out = Vec::new();
    for (si, slot) in sp_slots(n).iter().enumerate() {
        let first = if slot.imaginary { 1 } else { 0 };
        for (u, name) in units.iter().enumerate().skip(first) {
            let mut c = vec![Rational::zero(); 4];
            c[u] = int(1);
            let value = Quaternion::from_real_coords(&c);
            let mut parts = SpParts::zero(n);
            set_slot(&mut parts, slot, value);
            out.push(BasisElement {
                label: format!("{}.{}", slot.label, name),
                slot: si,
                element: parts.assemble().expect("basis element lies in sp(Q)"),
            });
        }
    }
    out
}

fn set_slot(parts: &mut SpParts, slot: &Slot, value: Quaternion) {
    let n = parts.n;
    match (slot.row, slot.col) {
        (r, 0) if r == n + 1 => parts.p_bar = value,
        (0, 0) => parts.a = value,
        (0, c) if c == n + 1 => parts.q = value,
        (r, 0) => parts.x_bar[r - 1] = value,
        (0, c) => parts.z[c - 1] = value,
        (r, c) => {
            parts.a0[(c - 1, r - 1)] = -value.conj();
            parts.a0[(r - 1, c - 1)] = value;
        }
    }
}

/// Slot values of a member of `sp(Q)`, in [`sp_slots`] order.
pub fn slot_values(m: &SpElement) -> Vec<Quaternion> {
    sp_slots(m.n()).iter().map(|s| m.matrix()[(s.row, s.col)].clone()).collect()
}

/// Rebuilds an element from its slot values.
pub fn from_slot_values(n: usize, values: &[Quaternion]) -> Result<SpElement> {
    let slots = sp_slots(n);
    if values.len() != slots.len() {
        return Err(Error::SizeMismatch { expected: slots.len(), found: values.len() });
    }
    let mut parts = SpParts::zero(n);
    for (slot, v) in slots.iter().zip(values) {
        set_slot(&mut parts, slot, v.clone());
    }
    parts.assemble()
}

/// One structure-constant row: `[b_i, b_j]` has value `coeff` in slot `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct BracketRow {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub coeff: Quaternion,
}

/// Structure constants of `sp(Q)` in the slot basis, for all ordered pairs
/// `i != j` with non-zero bracket.
pub fn bracket_table(n: usize) -> Vec<BracketRow> {
    let basis = sp_basis(n);
    let mut rows = Vec::new();
    for (i, bi) in basis.iter().enumerate() {
        for (j, bj) in basis.iter().enumerate() {
            if i == j {
                continue;
            }
            let br = bi.element.bracket(&bj.element).expect("same n");
            for (k, v) in slot_values(&br).into_iter().enumerate() {
                if !v.is_zero() {
                    rows.push(BracketRow { i, j, k, coeff: v });
                }
            }
        }
    }
    rows
}

/// Real dimension of each grade component `(k, dim g_k)` of the full
/// algebra, computed as a kernel of the defining linear conditions.
pub fn graded_dimensions<T: AlgebraScalar>(n: usize) -> Vec<(i32, usize)> {
    let basis = algebra_kernel_basis::<T>(n);
    let size = T::size_for(n);
    let w = T::weights(n);
    (MIN_GRADE..=MAX_GRADE)
        .map(|k| {
            let projected: Vec<Vec<Rational>> = basis
                .iter()
                .map(|v| {
                    v.iter()
                        .enumerate()
                        .map(|(idx, x)| {
                            let e = idx / T::REAL_DIM;
                            let (r, c) = (e / size, e % size);
                            if w[r] - w[c] == k {
                                x.clone()
                            } else {
                                Rational::zero()
                            }
                        })
                        .collect()
                })
                .collect();
            (k, rank(&projected))
        })
        .collect()
}

/// Real basis (as coordinate vectors) of the algebra defined by the form.
pub fn algebra_kernel_basis<T: AlgebraScalar>(n: usize) -> Vec<Vec<Rational>> {
    let size = T::size_for(n);
    let unknowns = size * size * T::REAL_DIM;
    let form = HermForm::<T>::standard(n);
    let columns: Vec<Vec<Rational>> = (0..unknowns)
        .map(|u| {
            let m = unit_matrix::<T>(size, u);
            let mut col = matrix_coords(&form.skewness(&m));
            col.extend(T::trace_condition(&m));
            col
        })
        .collect();
    let nrows = columns[0].len();
    let rows: Vec<Vec<Rational>> =
        (0..nrows).map(|r| columns.iter().map(|c| c[r].clone()).collect()).collect();
    nullspace(&rows, unknowns)
}

/// Matrix with a single real coordinate set to one.
pub fn unit_matrix<T: AlgebraScalar>(size: usize, coord: usize) -> Matrix<T> {
    let entry = coord / T::REAL_DIM;
    let mut c = vec![Rational::zero(); T::REAL_DIM];
    c[coord % T::REAL_DIM] = int(1);
    let mut m = Matrix::zeros(size, size);
    m[(entry / size, entry % size)] = T::from_real_coords(&c);
    m
}

/// Matrix from a real coordinate vector (entries row major).
pub fn matrix_from_coords<T: AlgebraScalar>(size: usize, coords: &[Rational]) -> Matrix<T> {
    Matrix::from_fn(size, size, |r, c| {
        let base = (r * size + c) * T::REAL_DIM;
        T::from_real_coords(&coords[base..base + T::REAL_DIM])
    })
}

/// Real coordinates of all entries, row major.
pub fn matrix_coords<T: AlgebraScalar>(m: &Matrix<T>) -> Vec<Rational> {
    let mut out = Vec::with_capacity(m.rows() * m.cols() * T::REAL_DIM);
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            out.extend(m[(r, c)].real_coords());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn q(w: i64, x: i64, y: i64, z: i64) -> Quaternion {
        Quaternion::from_ints(w, x, y, z)
    }

    #[test]
    fn form_reproduces_displayed_quadratic() {
        let n = 2;
        let form = HermForm::<Quaternion>::standard(n);
        assert!(form.is_hermitian());
        let x = vec![q(1, 2, 0, -1), q(0, 1, 1, 0), q(3, 0, 0, 1), q(-1, 1, 2, 2)];
        let mut expected = x[0].clone() * x[3].conj() + x[3].clone() * x[0].conj();
        for a in 1..=n {
            expected = expected + x[a].clone() * x[a].conj();
        }
        assert_eq!(form.value(&x), expected);

        let cform = HermForm::<Complex>::standard(1);
        assert!(cform.is_hermitian());
        let y: Vec<Complex> = (0..6).map(|i| Complex::from_ints(i, 1 - i)).collect();
        let mut expected = Complex::zero();
        for off in [0, 3] {
            expected = expected
                + y[off].clone() * y[off + 2].conj()
                + y[off + 1].clone() * y[off + 1].conj()
                + y[off + 2].clone() * y[off].conj();
        }
        assert_eq!(cform.value(&y), expected);
    }

    #[test]
    fn membership_examples() {
        for n in 1..=3 {
            assert!(in_algebra(&grading_element::<Quaternion>(n)).unwrap());
            assert!(in_algebra(&grading_element::<Complex>(n)).unwrap());
            assert!(!in_algebra(&QMatrix::identity(n + 2)).unwrap());
            assert!(!in_algebra(&CMatrix::identity(2 * n + 4)).unwrap());
        }
        // i * Id is skew for Q~ but has trace 6i
        let m = CMatrix::diagonal(&vec![Complex::i(); 6]);
        assert!(HermForm::<Complex>::standard(1).skewness(&m).is_zero());
        assert!(!in_algebra(&m).unwrap());
        assert!(in_algebra(&QMatrix::zeros(2, 3)).is_err());
        assert!(in_algebra(&CMatrix::zeros(5, 5)).is_err());
    }

    #[test]
    fn bracket_of_two_minus_one_elements() {
        let x = minus1(vec![Quaternion::one()]).unwrap();
        let y = minus1(vec![-Quaternion::i()]).unwrap();
        let br = x.bracket(&y).unwrap();
        assert_eq!(br, minus2(1, q(0, 2, 0, 0)).unwrap());
        assert!(in_algebra(br.matrix()).unwrap());
    }

    #[test]
    fn bracket_with_grading_element() {
        let e = SpElement::grading_element(1);
        let x = minus1(vec![q(1, -1, 2, 0)]).unwrap();
        assert_eq!(e.bracket(&x).unwrap(), x.scale(&int(-1)));
        assert!(x.bracket(&x).unwrap().is_zero());
        assert!(x.bracket(&SpElement::zero(2)).is_err());
    }

    #[test]
    fn grade_projection() {
        let p = minus2(2, q(0, 1, -3, 2)).unwrap();
        assert_eq!(p.grade_project(-2).unwrap(), p);
        let e = SpElement::grading_element(2);
        assert_eq!(e.grade_project(0).unwrap(), e);
        assert!(matches!(e.grade_project(3), Err(Error::GradeOutOfRange(3))));
    }

    #[test]
    fn filtration_degrees() {
        let x = minus1(vec![q(0, 0, 1, 0)]).unwrap();
        assert_eq!(x.filtration_degree(), -1);
        let mixed = minus2(1, Quaternion::i())
            .unwrap()
            .add(&grade0(q(1, 2, 0, 0), QMatrix::diagonal(&[Quaternion::k()])).unwrap());
        assert_eq!(mixed.filtration_degree(), -2);
        assert_eq!(SpElement::zero(1).filtration_degree(), 2);
        assert!(plus1(vec![Quaternion::j()]).unwrap().in_nilradical());
        assert!(!SpElement::grading_element(1).in_nilradical());
        assert!(SpElement::grading_element(1).in_parabolic());
    }

    #[test]
    fn block_layout_matches_weights() {
        for n in 1..=3 {
            let w = Quaternion::weights(n);
            for r in 0..n + 2 {
                for c in 0..n + 2 {
                    assert_eq!(sp_block_grade(n, r, c), w[r] - w[c]);
                }
            }
        }
    }

    #[test]
    fn basis_size_is_dimension_of_sp() {
        for n in 1..=3 {
            assert_eq!(sp_basis(n).len(), (n + 2) * (2 * n + 5));
        }
    }

    #[test]
    fn slot_round_trip() {
        let parts = SpParts {
            n: 2,
            p_bar: q(0, 1, 0, -1),
            x_bar: vec![q(1, 2, 3, 4), q(0, 0, 1, 0)],
            a: q(2, -1, 0, 1),
            a0: Matrix::from_fn(2, 2, |r, c| match (r, c) {
                (0, 0) => q(0, 1, 0, 0),
                (0, 1) => q(1, 1, 0, 2),
                (1, 0) => q(-1, 1, 0, 2),
                _ => q(0, 0, 0, -3),
            }),
            z: vec![q(0, 1, 1, 1), q(5, 0, 0, 0)],
            q: q(0, 0, 7, 0),
        };
        let m = parts.assemble().unwrap();
        assert_eq!(SpParts::decompose(&m), parts);
        assert_eq!(from_slot_values(2, &slot_values(&m)).unwrap(), m);
    }

    #[test]
    fn non_imaginary_slot_is_rejected() {
        assert!(matches!(minus2(1, q(1, 0, 0, 0)), Err(Error::NotImaginary(_))));
    }

    #[test]
    fn dimensions_n1() {
        let dims: Vec<usize> = graded_dimensions::<Quaternion>(1).into_iter().map(|d| d.1).collect();
        assert_eq!(dims, vec![3, 4, 7, 4, 3]);
        let dims: Vec<usize> = graded_dimensions::<Complex>(1).into_iter().map(|d| d.1).collect();
        // su(2,4): dim 35 = 1 + 8 + 17 + 8 + 1
        assert_eq!(dims, vec![1, 8, 17, 8, 1]);
    }

    #[test]
    fn rational_scaling_stays_in_algebra() {
        let x = minus1(vec![q(1, 0, 2, 0)]).unwrap().scale(&rat(-3, 7));
        assert!(in_algebra(x.matrix()).unwrap());
    }
}
