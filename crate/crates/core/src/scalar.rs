//! Exact scalar tower: rationals, Gaussian rationals and rational quaternions.
//!
//! Every algebraic check in the crate runs over these types, so all identities
//! hold with zero error. The complex numbers sit inside the quaternions as
//! `a + bi`, and a quaternion splits as `q = q_u + j q_v` with complex `q_u`,
//! `q_v`. Because `j c = conj(c) j` for complex `c`, the split of
//! `w + xi + yj + zk` is `q_u = w + xi`, `q_v = y - zi`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary precision rational in canonical (reduced, positive denominator) form.
pub type Rational = BigRational;

/// Builds the rational `num / den`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Builds the integer `v` as a rational.
pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Ring operations shared by the matrix entry types.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + Neg<Output = Self>
    + Mul<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    /// Involutive anti-automorphism (identity on rationals).
    fn conj(&self) -> Self;
    /// Multiplication by a rational scalar.
    fn scale(&self, r: &Rational) -> Self;
}

impl Scalar for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn conj(&self) -> Self {
        self.clone()
    }
    fn scale(&self, r: &Rational) -> Self {
        self * r
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Complex {
    pub re: Rational,
    pub im: Rational,
}

impl Complex {
    pub fn new(re: Rational, im: Rational) -> Self {
        Complex { re, im }
    }

    pub fn real(re: Rational) -> Self {
        Complex { re, im: Zero::zero() }
    }

    pub fn i() -> Self {
        Complex::new(Zero::zero(), One::one())
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        Complex::new(int(re), int(im))
    }

    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse; errors on zero.
    pub fn inv(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if Zero::is_zero(&n) {
            return Err(Error::DivisionByZero);
        }
        Ok(Complex::new(&self.re / &n, -(&self.im / &n)))
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (to_f64(&self.re), to_f64(&self.im))
    }
}

impl Scalar for Complex {
    fn zero() -> Self {
        Complex::new(Zero::zero(), Zero::zero())
    }
    fn one() -> Self {
        Complex::real(One::one())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.re) && Zero::is_zero(&self.im)
    }
    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -&self.im)
    }
    fn scale(&self, r: &Rational) -> Self {
        Complex::new(&self.re * r, &self.im * r)
    }
}

/// Rational quaternion `w + xi + yj + zk`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Quaternion {
    pub w: Rational,
    pub x: Rational,
    pub y: Rational,
    pub z: Rational,
}

impl Quaternion {
    pub fn new(w: Rational, x: Rational, y: Rational, z: Rational) -> Self {
        Quaternion { w, x, y, z }
    }

    pub fn from_ints(w: i64, x: i64, y: i64, z: i64) -> Self {
        Quaternion::new(int(w), int(x), int(y), int(z))
    }

    pub fn real(w: Rational) -> Self {
        Quaternion::new(w, Zero::zero(), Zero::zero(), Zero::zero())
    }

    pub fn imaginary(x: Rational, y: Rational, z: Rational) -> Self {
        Quaternion::new(Zero::zero(), x, y, z)
    }

    pub fn i() -> Self {
        Quaternion::from_ints(0, 1, 0, 0)
    }

    pub fn j() -> Self {
        Quaternion::from_ints(0, 0, 1, 0)
    }

    pub fn k() -> Self {
        Quaternion::from_ints(0, 0, 0, 1)
    }

    /// The imaginary unit `i_a` for `a` in 1..=3.
    pub fn unit(a: usize) -> Self {
        match a {
            1 => Quaternion::i(),
            2 => Quaternion::j(),
            3 => Quaternion::k(),
            _ => panic!("imaginary unit index {a} outside 1..=3"),
        }
    }

    pub fn from_complex(c: &Complex) -> Self {
        Quaternion::new(c.re.clone(), c.im.clone(), Zero::zero(), Zero::zero())
    }

    pub fn components(&self) -> [&Rational; 4] {
        [&self.w, &self.x, &self.y, &self.z]
    }

    pub fn norm_sqr(&self) -> Rational {
        &self.w * &self.w + &self.x * &self.x + &self.y * &self.y + &self.z * &self.z
    }

    pub fn is_imaginary(&self) -> bool {
        Zero::is_zero(&self.w)
    }

    pub fn is_unit(&self) -> bool {
        One::is_one(&self.norm_sqr())
    }

    /// Lies in the complex line `R + Ri`.
    pub fn is_complex(&self) -> bool {
        Zero::is_zero(&self.y) && Zero::is_zero(&self.z)
    }

    pub fn real_part(&self) -> Quaternion {
        Quaternion::real(self.w.clone())
    }

    pub fn imag_part(&self) -> Quaternion {
        Quaternion::imaginary(self.x.clone(), self.y.clone(), self.z.clone())
    }

    pub fn inv(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if Zero::is_zero(&n) {
            return Err(Error::DivisionByZero);
        }
        Ok(self.conj().scale(&n.recip()))
    }

    /// `(q_u, q_v)` with `q = q_u + j q_v`.
    pub fn split(&self) -> (Complex, Complex) {
        (
            Complex::new(self.w.clone(), self.x.clone()),
            Complex::new(self.y.clone(), -&self.z),
        )
    }

    /// Inverse of [`Quaternion::split`]: `u + j v`.
    pub fn join(u: &Complex, v: &Complex) -> Self {
        Quaternion::new(u.re.clone(), u.im.clone(), v.re.clone(), -&v.im)
    }

    /// Right multiplication by a complex scalar.
    pub fn mul_complex(&self, c: &Complex) -> Self {
        self.clone() * Quaternion::from_complex(c)
    }

    /// Real dot product of the imaginary parts, viewed as vectors of R^3.
    pub fn imag_dot(&self, other: &Quaternion) -> Rational {
        &self.x * &other.x + &self.y * &other.y + &self.z * &other.z
    }

    /// Cross product of the imaginary parts.
    pub fn imag_cross(&self, other: &Quaternion) -> Quaternion {
        Quaternion::imaginary(
            &self.y * &other.z - &self.z * &other.y,
            &self.z * &other.x - &self.x * &other.z,
            &self.x * &other.y - &self.y * &other.x,
        )
    }

    pub fn to_f64(&self) -> [f64; 4] {
        [to_f64(&self.w), to_f64(&self.x), to_f64(&self.y), to_f64(&self.z)]
    }

    /// Exact conversion of finite doubles.
    pub fn from_f64(v: [f64; 4]) -> Option<Self> {
        let c = |f: f64| Rational::from_float(f);
        Some(Quaternion::new(c(v[0])?, c(v[1])?, c(v[2])?, c(v[3])?))
    }
}

impl Scalar for Quaternion {
    fn zero() -> Self {
        Quaternion::from_ints(0, 0, 0, 0)
    }
    fn one() -> Self {
        Quaternion::from_ints(1, 0, 0, 0)
    }
    fn is_zero(&self) -> bool {
        self.components().iter().all(|c| Zero::is_zero(*c))
    }
    fn conj(&self) -> Self {
        Quaternion::new(self.w.clone(), -&self.x, -&self.y, -&self.z)
    }
    fn scale(&self, r: &Rational) -> Self {
        Quaternion::new(&self.w * r, &self.x * r, &self.y * r, &self.z * r)
    }
}

fn mul_complex_ref(a: &Complex, b: &Complex) -> Complex {
    Complex::new(&a.re * &b.re - &a.im * &b.im, &a.re * &b.im + &a.im * &b.re)
}

fn mul_quat_ref(a: &Quaternion, b: &Quaternion) -> Quaternion {
    Quaternion::new(
        &a.w * &b.w - &a.x * &b.x - &a.y * &b.y - &a.z * &b.z,
        &a.w * &b.x + &a.x * &b.w + &a.y * &b.z - &a.z * &b.y,
        &a.w * &b.y - &a.x * &b.z + &a.y * &b.w + &a.z * &b.x,
        &a.w * &b.z + &a.x * &b.y - &a.y * &b.x + &a.z * &b.w,
    )
}

/// Quaternion product. Basis table: `ij = k`, `jk = i`, `ki = j`, squares `-1`.
pub fn qmul(a: &Quaternion, b: &Quaternion) -> Quaternion {
    mul_quat_ref(a, b)
}

pub fn qconj(a: &Quaternion) -> Quaternion {
    a.conj()
}

pub fn split_complex(q: &Quaternion) -> (Complex, Complex) {
    q.split()
}

macro_rules! impl_ops {
    ($t:ident, $mul:ident, $($f:ident),+) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, o: $t) -> $t { $t { $($f: self.$f + o.$f),+ } }
        }
        impl<'a> Add<&'a $t> for $t {
            type Output = $t;
            fn add(self, o: &'a $t) -> $t { $t { $($f: self.$f + &o.$f),+ } }
        }
        impl<'a, 'b> Add<&'b $t> for &'a $t {
            type Output = $t;
            fn add(self, o: &'b $t) -> $t { $t { $($f: &self.$f + &o.$f),+ } }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, o: $t) -> $t { $t { $($f: self.$f - o.$f),+ } }
        }
        impl<'a> Sub<&'a $t> for $t {
            type Output = $t;
            fn sub(self, o: &'a $t) -> $t { $t { $($f: self.$f - &o.$f),+ } }
        }
        impl<'a, 'b> Sub<&'b $t> for &'a $t {
            type Output = $t;
            fn sub(self, o: &'b $t) -> $t { $t { $($f: &self.$f - &o.$f),+ } }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t { $t { $($f: -self.$f),+ } }
        }
        impl<'a> Neg for &'a $t {
            type Output = $t;
            fn neg(self) -> $t { $t { $($f: -&self.$f),+ } }
        }
        impl Mul for $t {
            type Output = $t;
            fn mul(self, o: $t) -> $t { $mul(&self, &o) }
        }
        impl<'a> Mul<&'a $t> for $t {
            type Output = $t;
            fn mul(self, o: &'a $t) -> $t { $mul(&self, o) }
        }
        impl<'a, 'b> Mul<&'b $t> for &'a $t {
            type Output = $t;
            fn mul(self, o: &'b $t) -> $t { $mul(self, o) }
        }
        impl AddAssign<&$t> for $t {
            fn add_assign(&mut self, o: &$t) { $(self.$f += &o.$f;)+ }
        }
        impl SubAssign<&$t> for $t {
            fn sub_assign(&mut self, o: &$t) { $(self.$f -= &o.$f;)+ }
        }
    };
}

impl_ops!(Complex, mul_complex_ref, re, im);
impl_ops!(Quaternion, mul_quat_ref, w, x, y, z);

impl Div<&Rational> for &Quaternion {
    type Output = Quaternion;
    fn div(self, r: &Rational) -> Quaternion {
        self.scale(&r.recip())
    }
}

fn write_terms(f: &mut fmt::Formatter<'_>, terms: &[(&Rational, &str)]) -> fmt::Result {
    let mut wrote = false;
    for (c, unit) in terms {
        if Zero::is_zero(*c) {
            continue;
        }
        let neg = c.is_negative();
        let mag = c.abs();
        if wrote {
            f.write_str(if neg { " - " } else { " + " })?;
        } else if neg {
            f.write_str("-")?;
        }
        if unit.is_empty() {
            write!(f, "{mag}")?;
        } else if One::is_one(&mag) {
            f.write_str(unit)?;
        } else if mag.is_integer() {
            write!(f, "{mag}{unit}")?;
        } else {
            write!(f, "({mag}){unit}")?;
        }
        wrote = true;
    }
    if !wrote {
        f.write_str("0")?;
    }
    Ok(())
}

impl fmt::Display for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, &[(&self.re, ""), (&self.im, "i")])
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, &[(&self.w, ""), (&self.x, "i"), (&self.y, "j"), (&self.z, "k")])
    }
}

/// Column vector over the quaternions, acted on by matrices from the left.
pub type HVector = Vec<Quaternion>;
/// Column vector over the complex numbers.
pub type CVector = Vec<Complex>;

/// Identifies `y + jz` in `H^m` with `(y, z)` in `C^{2m}`.
///
/// The identification is complex linear for complex scalars acting on the right.
pub fn identify_vector(v: &[Quaternion], expected_len: usize) -> Result<CVector> {
    if v.len() != expected_len {
        return Err(Error::SizeMismatch { expected: expected_len, found: v.len() });
    }
    let (ys, zs): (Vec<_>, Vec<_>) = v.iter().map(Quaternion::split).unzip();
    Ok(ys.into_iter().chain(zs).collect())
}

/// Inverse of [`identify_vector`].
pub fn unidentify_vector(c: &[Complex]) -> Result<HVector> {
    if c.len() % 2 != 0 {
        return Err(Error::SizeMismatch { expected: c.len() + 1, found: c.len() });
    }
    let m = c.len() / 2;
    Ok((0..m).map(|a| Quaternion::join(&c[a], &c[m + a])).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_table() {
        let (i, j, k) = (Quaternion::i(), Quaternion::j(), Quaternion::k());
        assert_eq!(qmul(&i, &j), k);
        assert_eq!(qmul(&j, &i), -k.clone());
        assert_eq!(qmul(&j, &k), i);
        assert_eq!(qmul(&k, &i), j);
        for u in [&i, &j, &k] {
            assert_eq!(qmul(u, u), -Quaternion::one());
        }
    }

    #[test]
    fn rotation_of_i_by_rational_unit() {
        let z = Quaternion::new(rat(3, 5), int(0), rat(4, 5), int(0));
        let got = qmul(&qmul(&z, &Quaternion::i()), &qconj(&z));
        assert_eq!(got, Quaternion::imaginary(rat(-7, 25), int(0), rat(-24, 25)));
    }

    #[test]
    fn conj_examples() {
        assert_eq!(qconj(&Quaternion::i()), -Quaternion::i());
        assert_eq!(qconj(&Quaternion::from_ints(1, 0, 1, 0)), Quaternion::from_ints(1, 0, -1, 0));
    }

    #[test]
    fn split_examples() {
        assert_eq!(split_complex(&Quaternion::j()), (Complex::zero(), Complex::one()));
        assert_eq!(split_complex(&Quaternion::k()), (Complex::zero(), -Complex::i()));
        let q = Quaternion::from_ints(2, -3, 0, 0);
        assert_eq!(split_complex(&q), (Complex::from_ints(2, -3), Complex::zero()));
        // j * (-i) = k fixes the sign convention of q_v
        assert_eq!(qmul(&Quaternion::j(), &-Quaternion::i()), Quaternion::k());
    }

    #[test]
    fn identify_examples() {
        let v = vec![Quaternion::j(), Quaternion::zero(), Quaternion::zero()];
        let c = identify_vector(&v, 3).unwrap();
        assert!(c[..3].iter().all(Complex::is_zero));
        assert_eq!(c[3], Complex::one());
        assert!(c[4..].iter().all(Complex::is_zero));

        let v = vec![Quaternion::i(), Quaternion::zero(), Quaternion::zero()];
        let c = identify_vector(&v, 3).unwrap();
        assert_eq!(c[0], Complex::i());
        assert!(c[1..].iter().all(Complex::is_zero));

        assert!(matches!(identify_vector(&v, 4), Err(Error::SizeMismatch { .. })));
    }

    #[test]
    fn display() {
        let q = Quaternion::imaginary(rat(-7, 25), int(0), rat(-24, 25));
        assert_eq!(q.to_string(), "-(7/25)i - (24/25)k");
        assert_eq!(Quaternion::from_ints(1, 0, -1, 2).to_string(), "1 - j + 2k");
        assert_eq!(Quaternion::zero().to_string(), "0");
        assert_eq!(Complex::from_ints(0, -1).to_string(), "-i");
    }

    #[test]
    fn inverse() {
        let q = Quaternion::from_ints(1, 2, -1, 3);
        assert_eq!(qmul(&q, &q.inv().unwrap()), Quaternion::one());
        assert!(Quaternion::zero().inv().is_err());
        let c = Complex::from_ints(3, 4);
        assert_eq!(mul_complex_ref(&c, &c.inv().unwrap()), Complex::one());
    }
}
