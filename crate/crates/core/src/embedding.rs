//! The inclusion `phi: gl(n+2, H) -> gl(2n+4, C)`, its restriction to the
//! grade `-1` part of `su(Q~)`, and the row-vector codec `(y, z_-, z, z_+)`.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graded::{
    algebra_kernel_basis, grade_component, matrix_filtration_degree, sp_basis, CMatrix, QMatrix,
    SpElement, SpParts, SuElement,
};
use crate::matrix::{nullspace, Matrix};
use crate::sampling;
use crate::scalar::{Complex, Quaternion, Rational, Scalar};

/// `U + jV ↦ [[U, -conj(V)], [V, conj(U)]]`, compatible with the
/// identification `y + jz ↦ (y, z)`.
pub fn phi(m: &QMatrix) -> CMatrix {
    let s = m.rows();
    assert!(m.is_square(), "phi expects a square matrix");
    let mut out = CMatrix::zeros(2 * s, 2 * s);
    for r in 0..s {
        for c in 0..s {
            let (u, v) = m[(r, c)].split();
            out[(r + s, c + s)] = u.conj();
            out[(r, c + s)] = -v.conj();
            out[(r + s, c)] = v;
            out[(r, c)] = u;
        }
    }
    out
}

/// Group version: same block formula applied to a matrix representative.
pub fn phi_group(g: &QMatrix) -> CMatrix {
    phi(g)
}

/// Image of an element of `sp(Q)`, as an element of `su(Q~)`.
pub fn phi_element(m: &SpElement) -> SuElement {
    SuElement::from_parts_unchecked(phi(m.matrix()), m.n())
}

/// Representatives of `G = Sp(Q)/{±Id}` (or of `G~`) are equal in the
/// quotient iff they agree up to sign.
pub fn equal_mod_sign<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> bool {
    a == b || *a == -b
}

/// Element `(y, z_-, z, z_+)` of the grade `-1` part of `su(Q~)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Row4 {
    pub y: Vec<Complex>,
    pub z_minus: Complex,
    pub z: Vec<Complex>,
    pub z_plus: Complex,
}

impl Row4 {
    pub fn zero(n: usize) -> Self {
        Row4 { y: vec![Complex::zero(); n], z_minus: Complex::zero(), z: vec![Complex::zero(); n], z_plus: Complex::zero() }
    }

    /// `(0, z_-, 0, z_+)`.
    pub fn reeb(n: usize, z_minus: Complex, z_plus: Complex) -> Self {
        Row4 { z_minus, z_plus, ..Row4::zero(n) }
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn is_zero(&self) -> bool {
        self.components().all(Complex::is_zero)
    }

    pub fn components(&self) -> impl Iterator<Item = &Complex> {
        self.y.iter().chain(std::iter::once(&self.z_minus)).chain(&self.z).chain(std::iter::once(&self.z_plus))
    }

    /// Component-wise multiplication by a complex scalar.
    pub fn mul_scalar(&self, c: &Complex) -> Self {
        self.map(|v| v.clone() * c)
    }

    pub fn map(&self, f: impl Fn(&Complex) -> Complex) -> Self {
        Row4 {
            y: self.y.iter().map(&f).collect(),
            z_minus: f(&self.z_minus),
            z: self.z.iter().map(&f).collect(),
            z_plus: f(&self.z_plus),
        }
    }

    pub fn add(&self, o: &Row4) -> Row4 {
        Row4 {
            y: self.y.iter().zip(&o.y).map(|(a, b)| a + b).collect(),
            z_minus: &self.z_minus + &o.z_minus,
            z: self.z.iter().zip(&o.z).map(|(a, b)| a + b).collect(),
            z_plus: &self.z_plus + &o.z_plus,
        }
    }

    pub fn neg(&self) -> Row4 {
        self.map(|v| -v)
    }
}

impl fmt::Display for Row4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[Complex]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ");
        write!(f, "(({}), {}, ({}), {})", join(&self.y), self.z_minus, join(&self.z), self.z_plus)
    }
}

/// Matrix of the grade `-1` part of `su(Q~)` encoded by `row`.
pub fn row4_encode(row: &Row4) -> CMatrix {
    let n = row.n();
    assert_eq!(row.z.len(), n, "y and z must have equal length");
    let size = 2 * n + 4;
    let (ylast, z0, zlast) = (n + 1, n + 2, 2 * n + 3);
    let mut m = CMatrix::zeros(size, size);
    for a in 1..=n {
        m[(a, 0)] = row.y[a - 1].clone();
        m[(ylast, a)] = -row.y[a - 1].conj();
        m[(z0 + a, 0)] = row.z[a - 1].clone();
        m[(ylast, z0 + a)] = -row.z[a - 1].conj();
    }
    m[(z0, 0)] = row.z_minus.clone();
    m[(zlast, 0)] = row.z_plus.clone();
    m[(ylast, z0)] = -row.z_plus.conj();
    m[(ylast, zlast)] = -row.z_minus.conj();
    m
}

/// Inverse of [`row4_encode`]; rejects matrices with entries off the pattern.
pub fn row4_decode(m: &CMatrix) -> Result<Row4> {
    if !m.is_square() || m.rows() < 6 || m.rows() % 2 != 0 {
        return Err(Error::SizeMismatch { expected: 6, found: m.rows() });
    }
    let n = m.rows() / 2 - 2;
    let z0 = n + 2;
    let row = Row4 {
        y: (1..=n).map(|a| m[(a, 0)].clone()).collect(),
        z_minus: m[(z0, 0)].clone(),
        z: (1..=n).map(|a| m[(z0 + a, 0)].clone()).collect(),
        z_plus: m[(2 * n + 3, 0)].clone(),
    };
    let back = row4_encode(&row);
    if &back != m {
        let diff = &back - m;
        let (r, c, v) = diff.nonzero_entries().next().expect("matrices differ");
        return Err(Error::NotRow4Shape(format!("entry ({r}, {c}) off by {v}")));
    }
    Ok(row)
}

/// `proj_{g~_{-1}} ∘ phi`, computed literally.
pub fn phi_minus1_via_projection(m: &SpElement) -> Row4 {
    let proj = grade_component(&phi(m.matrix()), -1).expect("size checked");
    row4_decode(&proj).expect("grade -1 part of su(Q~) has row shape")
}

/// Closed form of `phi_{-1}`, summed over the grade components of `m`:
/// `[p̄]_{-2} ↦ (0,0,0,-p_v)`, `[x̄]_{-1} ↦ (conj(x)_u, 0, -x_v, 0)`,
/// `[(a, A0)]_0 ↦ (0, a_v, 0, 0)`, positive grades ↦ 0.
pub fn phi_minus1(m: &SpElement) -> Row4 {
    let parts = SpParts::decompose(m);
    let p = parts.p_bar.conj();
    let (_, p_v) = p.split();
    let (_, a_v) = parts.a.split();
    let mut row = Row4::reeb(parts.n, a_v, -p_v);
    for (idx, xb) in parts.x_bar.iter().enumerate() {
        let x = xb.conj();
        let (_, x_v) = x.split();
        let (xbar_u, _) = xb.split();
        row.y[idx] = xbar_u;
        row.z[idx] = -x_v;
    }
    row
}

/// Outcome of the sampled filtration-compatibility checks.
#[derive(Clone, Debug, Default)]
pub struct FiltrationReport {
    pub trials: usize,
    /// `(check name, offending matrix)`.
    pub counterexamples: Vec<(String, String)>,
}

impl FiltrationReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Samples `phi(p_+) ⊂ p~`, `phi(g^{-1}) ⊂ g~^{-1}`, and
/// `phi(M) ∈ p~ ⇒ M ∈ p`.
pub fn filtration_compat_check(rng: &mut impl Rng, n: usize, trials: usize) -> FiltrationReport {
    let mut report = FiltrationReport { trials, ..Default::default() };
    let degree = |m: &SpElement| matrix_filtration_degree(&phi(m.matrix())).expect("square");
    for _ in 0..trials {
        let m = sampling::sp_in_filtration(rng, n, 1);
        if degree(&m) < 0 {
            report.counterexamples.push(("phi(p+) in p~".into(), m.to_string()));
        }
        let m = sampling::sp_in_filtration(rng, n, -1);
        if degree(&m) < -1 {
            report.counterexamples.push(("phi(g^-1) in g~^-1".into(), m.to_string()));
        }
        let m = sampling::sp_sparse_negative(rng, n);
        if degree(&m) >= 0 && !m.in_parabolic() {
            report.counterexamples.push(("phi^-1(p~) in p".into(), m.to_string()));
        }
    }
    report
}

/// Basis of the real subspace `{M ∈ sp(Q) : phi(M) ∈ p~}`, computed exactly.
pub fn parabolic_preimage_basis(n: usize) -> Vec<SpElement> {
    let basis = sp_basis(n);
    let images: Vec<CMatrix> = basis.iter().map(|b| phi(b.element.matrix())).collect();
    let size = 2 * n + 4;
    let w = <Complex as crate::graded::AlgebraScalar>::weights(n);
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for r in 0..size {
        for c in 0..size {
            if w[r] - w[c] >= 0 {
                continue;
            }
            for part in 0..2 {
                rows.push(
                    images
                        .iter()
                        .map(|m| if part == 0 { m[(r, c)].re.clone() } else { m[(r, c)].im.clone() })
                        .collect(),
                );
            }
        }
    }
    nullspace(&rows, basis.len())
        .into_iter()
        .map(|coeffs| {
            basis
                .iter()
                .zip(&coeffs)
                .fold(SpElement::zero(n), |acc, (b, c)| acc.add(&b.element.scale(c)))
        })
        .collect()
}

/// Real dimension of `su(Q~)`, as a cross-check on the kernel computation.
pub fn su_dimension(n: usize) -> usize {
    algebra_kernel_basis::<Complex>(n).len()
}

/// Applies `phi` to a quaternionic column vector through the identification.
pub fn phi_on_vector(m: &QMatrix, v: &[Quaternion]) -> Result<Vec<Complex>> {
    let c = crate::scalar::identify_vector(v, m.cols())?;
    Ok(phi(m).mul_vec(&c))
}
