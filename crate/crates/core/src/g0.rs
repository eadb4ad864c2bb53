//! The Levi factor `G_0 = CSp(1)Sp(n)` and its actions.
//!
//! A `G0Element` `(s, z, A)` is realized as `diag(s z, A, s^{-1} z)` in
//! `Sp(Q)`. With `Ad(g) M = g M g^{-1}` the induced actions on the negative
//! grades are `x̄ ↦ s^{-1} A x̄ z̄` and `p̄ ↦ s^{-2} z p̄ z̄`, and `Sp(1)Sp(n)`
//! acts on the sphere of unit imaginary quaternions by `q ↦ z q z̄`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{One, Signed, ToPrimitive};

use crate::embedding::phi_group;
use crate::error::{Error, Result};
use crate::graded::{stabilizes_base_line, QMatrix, SpElement};
use crate::scalar::{Complex, Quaternion, Rational, Scalar};

/// Largest integer for which the sum-of-two-squares search in
/// [`solve_z_i`] is attempted.
const TWO_SQUARES_SEARCH_LIMIT: u128 = 1 << 44;

#[derive(Clone, PartialEq, Debug)]
pub struct G0Element {
    s: Rational,
    z: Quaternion,
    a: QMatrix,
}

impl G0Element {
    /// Validates `s > 0`, `|z| = 1` and `A* A = Id`.
    pub fn new(s: Rational, z: Quaternion, a: QMatrix) -> Result<Self> {
        if !s.is_positive() {
            return Err(Error::InvalidConfig(format!("scale s = {s} must be positive")));
        }
        if !z.is_unit() {
            return Err(Error::InvalidConfig(format!("z = {z} is not a unit quaternion")));
        }
        if !a.is_square() || &a.adjoint() * &a != QMatrix::identity(a.rows()) {
            return Err(Error::InvalidConfig("A is not in Sp(n)".into()));
        }
        Ok(G0Element { s, z, a })
    }

    pub fn identity(n: usize) -> Self {
        G0Element { s: One::one(), z: Quaternion::one(), a: QMatrix::identity(n) }
    }

    /// `(1, z, Id)`.
    pub fn sp1(n: usize, z: Quaternion) -> Result<Self> {
        G0Element::new(One::one(), z, QMatrix::identity(n))
    }

    pub fn s(&self) -> &Rational {
        &self.s
    }

    pub fn z(&self) -> &Quaternion {
        &self.z
    }

    pub fn a(&self) -> &QMatrix {
        &self.a
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    /// `diag(s z, A, s^{-1} z)`.
    pub fn matrix(&self) -> QMatrix {
        let n = self.n();
        let mut m = QMatrix::zeros(n + 2, n + 2);
        m[(0, 0)] = self.z.scale(&self.s);
        m[(n + 1, n + 1)] = self.z.scale(&self.s.recip());
        for r in 0..n {
            for c in 0..n {
                m[(r + 1, c + 1)] = self.a[(r, c)].clone();
            }
        }
        m
    }

    pub fn inverse(&self) -> Self {
        G0Element { s: self.s.recip(), z: self.z.conj(), a: self.a.adjoint() }
    }

    /// Group product `self * other`.
    pub fn compose(&self, other: &Self) -> Self {
        G0Element { s: &self.s * &other.s, z: self.z.clone() * &other.z, a: &self.a * &other.a }
    }
}

impl fmt::Display for G0Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(s={}, z={}, A={})", self.s, self.z, self.a)
    }
}

/// Unit imaginary quaternion `a1 i + a2 j + a3 k`, standing for the complex
/// structure `a1 I1 + a2 I2 + a3 I3`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TwistorPoint(Quaternion);

impl TwistorPoint {
    pub fn new(q: Quaternion) -> Result<Self> {
        if !q.is_imaginary() {
            return Err(Error::NotImaginary(q.to_string()));
        }
        if !q.is_unit() {
            return Err(Error::InvalidConfig(format!("{q} is not a unit vector")));
        }
        Ok(TwistorPoint(q))
    }

    pub fn from_coefficients(a: [Rational; 3]) -> Result<Self> {
        let [x, y, z] = a;
        TwistorPoint::new(Quaternion::imaginary(x, y, z))
    }

    /// The base point `i`.
    pub fn base() -> Self {
        TwistorPoint(Quaternion::i())
    }

    pub fn quaternion(&self) -> &Quaternion {
        &self.0
    }

    pub fn coefficients(&self) -> [Rational; 3] {
        [self.0.x.clone(), self.0.y.clone(), self.0.z.clone()]
    }

    pub fn to_f64(&self) -> [f64; 3] {
        let [_, x, y, z] = self.0.to_f64();
        [x, y, z]
    }
}

impl fmt::Display for TwistorPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `x̄ ↦ s^{-1} A x̄ z̄`.
pub fn rho_minus1(g: &G0Element, x_bar: &[Quaternion]) -> Result<Vec<Quaternion>> {
    if x_bar.len() != g.n() {
        return Err(Error::SizeMismatch { expected: g.n(), found: x_bar.len() });
    }
    let z_bar = g.z.conj();
    let s_inv = g.s.recip();
    Ok(g.a.mul_vec(x_bar).into_iter().map(|v| (v * &z_bar).scale(&s_inv)).collect())
}

/// `p̄ ↦ s^{-2} z p̄ z̄`, defined on imaginary quaternions.
pub fn rho_minus2(g: &G0Element, p_bar: &Quaternion) -> Result<Quaternion> {
    if !p_bar.is_imaginary() {
        return Err(Error::NotImaginary(p_bar.to_string()));
    }
    let s2 = (&g.s * &g.s).recip();
    Ok((g.z.clone() * p_bar * &g.z.conj()).scale(&s2))
}

/// `q ↦ z q z̄` (the scale and the `Sp(n)` part act trivially).
pub fn rho_0(g: &G0Element, q: &TwistorPoint) -> TwistorPoint {
    TwistorPoint(g.z.clone() * &q.0 * &g.z.conj())
}

/// `Ad(g) M = g M g^{-1}`.
pub fn adjoint(g: &G0Element, m: &SpElement) -> SpElement {
    m.conjugated(&g.matrix(), &g.inverse().matrix())
}

/// `Ad(g^{-1}) M = g^{-1} M g`.
pub fn ad_conjugate(g: &G0Element, m: &SpElement) -> SpElement {
    adjoint(&g.inverse(), m)
}

/// Whether the image of `g` in `G~` preserves the complex line `C d_0`.
pub fn in_ptilde_preimage(g: &G0Element) -> bool {
    stabilizes_base_line(&phi_group(&g.matrix()))
}

/// A rational unit quaternion `z` with `z i z̄ = I`.
///
/// Uses the half-angle quaternion `w = 1 - I i` (so `w i w^{-1} = I`) and
/// rescales it by a Gaussian rational `c`, which commutes with `i`, such that
/// `|w c| = 1`. This needs `|w|^2 = 2(1 + a_1)` to be a sum of two rational
/// squares; when it is not, no rational unit solution exists at all and
/// [`Error::NoRationalLift`] is returned. The antipode `-i` maps to `j`.
pub fn solve_z_i(point: &TwistorPoint) -> Result<Quaternion> {
    let target = point.quaternion();
    if *target == Quaternion::i() {
        return Ok(Quaternion::one());
    }
    if *target == -Quaternion::i() {
        return Ok(Quaternion::j());
    }
    let w = Quaternion::one() - target.clone() * Quaternion::i();
    let norm = w.norm_sqr();
    let (s, t) = rational_two_squares(&norm).ok_or_else(|| Error::NoRationalLift(point.to_string()))?;
    // r = s + t i has |r|^2 = norm, so c = r / norm has |c|^2 = 1 / norm
    let c = Complex::new(&s / &norm, &t / &norm);
    let z = w * Quaternion::from_complex(&c);
    debug_assert!(z.is_unit());
    if z.clone() * Quaternion::i() * z.conj() != *target {
        return Err(Error::NoRationalLift(point.to_string()));
    }
    Ok(z)
}

/// Rational `(s, t)` with `s^2 + t^2 = r`, if one exists within the search limit.
fn rational_two_squares(r: &Rational) -> Option<(Rational, Rational)> {
    if r.is_negative() {
        return None;
    }
    let (num, den) = (r.numer(), r.denom());
    let m: BigInt = num * den;
    let m = m.to_u128().filter(|&m| m <= TWO_SQUARES_SEARCH_LIMIT)?;
    let (s, t) = integer_two_squares(m)?;
    let den = Rational::from_integer(den.clone());
    Some((Rational::from_integer(BigInt::from(s)) / &den, Rational::from_integer(BigInt::from(t)) / den))
}

fn integer_two_squares(m: u128) -> Option<(u128, u128)> {
    let limit = (m / 2).sqrt();
    (0..=limit).find_map(|s| {
        let rest = m - s * s;
        let t = rest.sqrt();
        (t * t == rest).then_some((s, t))
    })
}

/// Stabilizer of `i` under `rho_0`, restricted to the `Sp(1)Sp(n)` slice.
pub fn fixes_base_point(g: &G0Element) -> bool {
    rho_0(g, &TwistorPoint::base()) == TwistorPoint::base()
}

/// Block-diagonal check that `m` preserves the grading (conjugation by `g`
/// commutes with grade projection).
pub fn preserves_grading(g: &G0Element, m: &SpElement) -> bool {
    (crate::graded::MIN_GRADE..=crate::graded::MAX_GRADE).all(|k| {
        let lhs = adjoint(g, &m.grade_project(k).expect("grade in range"));
        let rhs = adjoint(g, m).grade_project(k).expect("grade in range");
        lhs == rhs
    })
}

/// Matrix representative of `Sp(n)` on the middle block, for callers that
/// need it as a `G0Element` factor.
pub fn sp_n_factor(a: QMatrix) -> Result<G0Element> {
    G0Element::new(One::one(), Quaternion::one(), a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::{minus1, minus2};
    use crate::scalar::{int, rat};

    fn z_rot() -> Quaternion {
        Quaternion::new(rat(3, 5), int(0), rat(4, 5), int(0))
    }

    #[test]
    fn rho_minus1_examples() {
        let x = vec![Quaternion::from_ints(1, 2, -1, 3)];
        assert_eq!(rho_minus1(&G0Element::identity(1), &x).unwrap(), x);
        let g = G0Element::new(int(2), Quaternion::one(), QMatrix::identity(1)).unwrap();
        assert_eq!(rho_minus1(&g, &[Quaternion::one()]).unwrap(), vec![Quaternion::real(rat(1, 2))]);
        assert!(rho_minus1(&g, &[]).is_err());
    }

    #[test]
    fn rho_minus1_agrees_with_conjugation() {
        let z = Quaternion::new(rat(3, 5), rat(4, 5), int(0), int(0));
        let g = G0Element::sp1(1, z.clone()).unwrap();
        let x_bar = vec![Quaternion::j()];
        let conj = adjoint(&g, &minus1(x_bar.clone()).unwrap());
        let via_rho = minus1(rho_minus1(&g, &x_bar).unwrap()).unwrap();
        assert_eq!(conj, via_rho);
        // j (3/5 - 4/5 i) = 3/5 j + 4/5 k
        assert_eq!(rho_minus1(&g, &x_bar).unwrap()[0], Quaternion::new(int(0), int(0), rat(3, 5), rat(4, 5)));
    }

    #[test]
    fn rho_minus2_examples() {
        let u1 = Quaternion::new(rat(3, 5), rat(4, 5), int(0), int(0));
        let g = G0Element::sp1(1, u1).unwrap();
        assert_eq!(rho_minus2(&g, &-Quaternion::i()).unwrap(), -Quaternion::i());

        let g = G0Element::sp1(1, z_rot()).unwrap();
        assert_eq!(
            rho_minus2(&g, &-Quaternion::i()).unwrap(),
            Quaternion::imaginary(rat(7, 25), int(0), rat(24, 25))
        );

        let g = G0Element::new(int(3), Quaternion::one(), QMatrix::identity(1)).unwrap();
        let p = Quaternion::from_ints(0, 1, 2, 3);
        assert_eq!(rho_minus2(&g, &p).unwrap(), p.scale(&rat(1, 9)));
        assert!(matches!(rho_minus2(&g, &Quaternion::one()), Err(Error::NotImaginary(_))));

        let conj = adjoint(&g, &minus2(1, p.clone()).unwrap());
        assert_eq!(conj, minus2(1, rho_minus2(&g, &p).unwrap()).unwrap());
    }

    #[test]
    fn rho_0_examples() {
        let i = TwistorPoint::base();
        let u1 = G0Element::sp1(1, Quaternion::new(rat(3, 5), rat(4, 5), int(0), int(0))).unwrap();
        assert_eq!(rho_0(&u1, &i), i);
        let g = G0Element::sp1(1, z_rot()).unwrap();
        assert_eq!(rho_0(&g, &i).quaternion(), &Quaternion::imaginary(rat(-7, 25), int(0), rat(-24, 25)));
        let g = G0Element::sp1(1, Quaternion::j()).unwrap();
        assert_eq!(rho_0(&g, &i).quaternion(), &-Quaternion::i());
    }

    #[test]
    fn ptilde_preimage_examples() {
        assert!(in_ptilde_preimage(&G0Element::sp1(1, Quaternion::i()).unwrap()));
        assert!(!in_ptilde_preimage(&G0Element::sp1(1, Quaternion::j()).unwrap()));
        let g = G0Element::new(int(7), Quaternion::one(), QMatrix::identity(1)).unwrap();
        assert!(in_ptilde_preimage(&g));
    }

    #[test]
    fn solve_z_i_examples() {
        assert_eq!(solve_z_i(&TwistorPoint::base()).unwrap(), Quaternion::one());
        let anti = TwistorPoint::new(-Quaternion::i()).unwrap();
        assert_eq!(solve_z_i(&anti).unwrap(), Quaternion::j());

        let target = TwistorPoint::new(Quaternion::imaginary(rat(-7, 25), int(0), rat(-24, 25))).unwrap();
        let z = solve_z_i(&target).unwrap();
        assert!(z.is_unit());
        assert_eq!(rho_0(&G0Element::sp1(1, z).unwrap(), &TwistorPoint::base()), target);
    }

    #[test]
    fn solve_z_i_reports_points_without_rational_lift() {
        // 2(1 + a1) = 2/3 is not a sum of two rational squares
        let p = TwistorPoint::from_coefficients([rat(-2, 3), rat(1, 3), rat(2, 3)]).unwrap();
        assert!(matches!(solve_z_i(&p), Err(Error::NoRationalLift(_))));
    }

    #[test]
    fn group_law() {
        let g = G0Element::new(rat(2, 3), z_rot(), QMatrix::identity(1)).unwrap();
        let h = G0Element::new(int(5), Quaternion::k(), QMatrix::diagonal(&[Quaternion::j()])).unwrap();
        assert_eq!(g.compose(&h).matrix(), &g.matrix() * &h.matrix());
        assert_eq!(g.compose(&g.inverse()), G0Element::identity(1));
    }

    #[test]
    fn invalid_elements() {
        assert!(G0Element::new(int(-1), Quaternion::one(), QMatrix::identity(1)).is_err());
        assert!(G0Element::new(int(1), Quaternion::from_ints(1, 1, 0, 0), QMatrix::identity(1)).is_err());
        assert!(G0Element::new(int(1), Quaternion::one(), QMatrix::diagonal(&[Quaternion::real(int(2))])).is_err());
        assert!(TwistorPoint::new(Quaternion::one()).is_err());
        assert!(TwistorPoint::new(Quaternion::from_ints(0, 1, 1, 0)).is_err());
    }
}
