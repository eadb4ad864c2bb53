//! Seeded samplers producing exact rational test data: small rationals,
//! rational points of `S^1`, `S^2`, `S^3`, and exact members of `Sp(n)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graded::{QMatrix, SpElement, SpParts};
use crate::matrix::Matrix;
use crate::scalar::{rat, Complex, Quaternion, Rational, Scalar};

pub type SampleRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small_rational(rng: &mut impl Rng) -> Rational {
    rat(rng.random_range(-6..=6), rng.random_range(1..=4))
}

pub fn nonzero_rational(rng: &mut impl Rng) -> Rational {
    loop {
        let r = small_rational(rng);
        if !r.is_zero() {
            return r;
        }
    }
}

pub fn positive_rational(rng: &mut impl Rng) -> Rational {
    rat(rng.random_range(1..=9), rng.random_range(1..=4))
}

pub fn complex(rng: &mut impl Rng) -> Complex {
    Complex::new(small_rational(rng), small_rational(rng))
}

pub fn quaternion(rng: &mut impl Rng) -> Quaternion {
    Quaternion::new(small_rational(rng), small_rational(rng), small_rational(rng), small_rational(rng))
}

pub fn imaginary_quaternion(rng: &mut impl Rng) -> Quaternion {
    Quaternion::imaginary(small_rational(rng), small_rational(rng), small_rational(rng))
}

fn nonzero_int_quaternion(rng: &mut impl Rng, complex_only: bool) -> Quaternion {
    loop {
        let mut c = [0i64; 4];
        for (idx, v) in c.iter_mut().enumerate() {
            if !complex_only || idx < 2 {
                *v = rng.random_range(-3..=3);
            }
        }
        let q = Quaternion::from_ints(c[0], c[1], c[2], c[3]);
        if !q.is_zero() {
            return q;
        }
    }
}

/// Rational point of `S^3`: `p^2 / |p|^2` for a small integer quaternion `p`.
pub fn unit_quaternion(rng: &mut impl Rng) -> Quaternion {
    let p = nonzero_int_quaternion(rng, false);
    let n = p.norm_sqr();
    (p.clone() * &p).scale(&n.recip())
}

/// Rational point of `U(1) = S^3 ∩ (R + Ri)`.
pub fn unit_complex(rng: &mut impl Rng) -> Quaternion {
    let p = nonzero_int_quaternion(rng, true);
    let n = p.norm_sqr();
    (p.clone() * &p).scale(&n.recip())
}

/// Unit quaternion that is not in `U(1)`.
pub fn unit_quaternion_off_circle(rng: &mut impl Rng) -> Quaternion {
    loop {
        let z = unit_quaternion(rng);
        if !z.is_complex() {
            return z;
        }
    }
}

/// Rational point of `S^2 ⊂ Im H`, as `u i conj(u)`.
pub fn sphere_point(rng: &mut impl Rng) -> Quaternion {
    let u = unit_quaternion(rng);
    u.clone() * Quaternion::i() * u.conj()
}

/// Rational cosine/sine pair from a Pythagorean triple.
fn rational_angle(rng: &mut impl Rng) -> (Rational, Rational) {
    let m = rng.random_range(1..=5i64);
    let k = rng.random_range(-5..=5i64);
    let d = m * m + k * k;
    (rat(m * m - k * k, d), rat(2 * m * k, d))
}

/// Exact element of `Sp(n)`: a product of diagonal unit quaternions and real
/// plane rotations.
pub fn sp_n(rng: &mut impl Rng, n: usize) -> QMatrix {
    let diag: Vec<Quaternion> = (0..n).map(|_| unit_quaternion(rng)).collect();
    let mut a = Matrix::diagonal(&diag);
    if n >= 2 {
        for _ in 0..n {
            let r = rng.random_range(0..n);
            let mut s = rng.random_range(0..n - 1);
            if s >= r {
                s += 1;
            }
            let (c, sn) = rational_angle(rng);
            let mut g = QMatrix::identity(n);
            g[(r, r)] = Quaternion::real(c.clone());
            g[(s, s)] = Quaternion::real(c);
            g[(r, s)] = Quaternion::real(-sn.clone());
            g[(s, r)] = Quaternion::real(sn);
            let d: Vec<Quaternion> = (0..n).map(|_| unit_quaternion(rng)).collect();
            a = &(&a * &g) * &Matrix::diagonal(&d);
        }
    }
    a
}

/// Random element of `sp(n)` (quaternionic skew-hermitian).
pub fn sp_n_algebra(rng: &mut impl Rng, n: usize) -> QMatrix {
    let mut m = QMatrix::zeros(n, n);
    for r in 0..n {
        m[(r, r)] = imaginary_quaternion(rng);
        for c in r + 1..n {
            let h = quaternion(rng);
            m[(c, r)] = -h.conj();
            m[(r, c)] = h;
        }
    }
    m
}

pub fn h_vector(rng: &mut impl Rng, n: usize) -> Vec<Quaternion> {
    (0..n).map(|_| quaternion(rng)).collect()
}

/// Random element of `sp(Q)` concentrated in grade `k`.
pub fn sp_homogeneous(rng: &mut impl Rng, n: usize, k: i32) -> SpElement {
    let mut parts = SpParts::zero(n);
    match k {
        -2 => parts.p_bar = imaginary_quaternion(rng),
        -1 => parts.x_bar = h_vector(rng, n),
        0 => {
            parts.a = quaternion(rng);
            parts.a0 = sp_n_algebra(rng, n);
        }
        1 => parts.z = h_vector(rng, n),
        2 => parts.q = imaginary_quaternion(rng),
        _ => panic!("grade {k} outside -2..=2"),
    }
    parts.assemble().expect("sampled slots are admissible")
}

/// Random element of `sp(Q)` with every slot populated.
pub fn sp_generic(rng: &mut impl Rng, n: usize) -> SpElement {
    (-2..=2).fold(SpElement::zero(n), |acc, k| acc.add(&sp_homogeneous(rng, n, k)))
}

/// Random element of `sp(Q)` whose components of grade below `min_grade`
/// vanish, with each allowed grade switched on independently.
pub fn sp_in_filtration(rng: &mut impl Rng, n: usize, min_grade: i32) -> SpElement {
    let mut acc = SpElement::zero(n);
    for k in min_grade..=2 {
        if rng.random_bool(0.75) {
            acc = acc.add(&sp_homogeneous(rng, n, k));
        }
    }
    acc
}

/// Element of `sp(Q)` spanning only some real directions of the negative
/// grades, mixed with a random parabolic part. Used to probe the converse
/// inclusion `phi^{-1}(p~) ⊂ p`.
pub fn sp_sparse_negative(rng: &mut impl Rng, n: usize) -> SpElement {
    let mut parts = SpParts::zero(n);
    if rng.random_bool(0.5) {
        let mut c = [Rational::zero(), Rational::zero(), Rational::zero()];
        c[rng.random_range(0..3)] = nonzero_rational(rng);
        let [x, y, z] = c;
        parts.p_bar = Quaternion::imaginary(x, y, z);
    }
    if rng.random_bool(0.5) {
        let a = rng.random_range(0..n);
        let mut c = vec![Rational::zero(); 4];
        c[rng.random_range(0..4)] = nonzero_rational(rng);
        parts.x_bar[a] = Quaternion::new(c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone());
    }
    let neg = parts.assemble().expect("admissible");
    neg.add(&sp_in_filtration(rng, n, 0))
}

pub fn scale_parameter(rng: &mut impl Rng) -> Rational {
    small_rational(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::in_algebra;

    #[test]
    fn samplers_are_exact() {
        let mut rng = rng_from_seed(7);
        for _ in 0..50 {
            assert!(unit_quaternion(&mut rng).is_unit());
            let c = unit_complex(&mut rng);
            assert!(c.is_unit() && c.is_complex());
            let p = sphere_point(&mut rng);
            assert!(p.is_imaginary() && p.is_unit());
        }
        for n in 1..=3 {
            let a = sp_n(&mut rng, n);
            assert_eq!(&a.adjoint() * &a, QMatrix::identity(n));
            let m = sp_n_algebra(&mut rng, n);
            assert!((&m.adjoint() + &m).is_zero());
            for k in -2..=2 {
                let e = sp_homogeneous(&mut rng, n, k);
                assert!(in_algebra(e.matrix()).unwrap());
            }
        }
    }

    #[test]
    fn same_seed_same_samples() {
        let a: Vec<Quaternion> = {
            let mut r = rng_from_seed(3);
            (0..10).map(|_| quaternion(&mut r)).collect()
        };
        let b: Vec<Quaternion> = {
            let mut r = rng_from_seed(3);
            (0..10).map(|_| quaternion(&mut r)).collect()
        };
        assert_eq!(a, b);
    }
}
