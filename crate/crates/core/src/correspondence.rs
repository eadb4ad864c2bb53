//! Algebra behind the identification of the CR Fefferman space with the
//! twistor space: values of the pulled-back connection on Reeb, vertical and
//! horizontal directions, the complex structure `J_0` on `g~_{-1}`, and the
//! group-level bookkeeping of `G_0/(G_0 ∩ Φ^{-1}(P~))`.

use rand::Rng;
use serde::Serialize;

use crate::check::ExactCheck;
use crate::embedding::{parabolic_preimage_basis, phi_minus1, Row4};
use crate::error::{Error, Result};
use crate::g0::{ad_conjugate, in_ptilde_preimage, rho_0, rho_minus1, solve_z_i, G0Element, TwistorPoint};
use crate::graded::{graded_dimensions, grade0, minus1, minus2, sp_basis, QMatrix};
use crate::sampling;
use crate::scalar::{Complex, Quaternion, Rational, Scalar};

/// Rescaled qc scalar curvature, taken as a free parameter.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct ScaleParams {
    pub s_tilde: Rational,
}

/// Reeb directions orthogonal to `ξ_I`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum ReebDirection {
    J,
    K,
}

impl ReebDirection {
    /// `j` or `k`.
    pub fn unit(self) -> Quaternion {
        match self {
            ReebDirection::J => Quaternion::j(),
            ReebDirection::K => Quaternion::k(),
        }
    }
}

/// Value in the frame `u` on `ξ_d^h`: `[-z i_d z̄]_{-2} + [(s z i_d z̄, ω_A)]_0`,
/// where `z` is the `Sp(1)` part of `g_I`.
pub fn frame_value(
    direction: ReebDirection,
    params: &ScaleParams,
    g_i: &G0Element,
    omega_a: &QMatrix,
) -> Result<crate::graded::SpElement> {
    let z = g_i.z();
    let rotated = z.clone() * direction.unit() * &z.conj();
    let n = g_i.n();
    let reeb = minus2(n, -rotated.clone())?;
    let weyl = grade0(rotated.scale(&params.s_tilde), omega_a.clone())?;
    Ok(reeb.add(&weyl))
}

/// `φ_{-1}(Ad(g_I^{-1}) u-value)` on `ξ_d^h`.
pub fn omega_value_reeb(
    direction: ReebDirection,
    params: &ScaleParams,
    g_i: &G0Element,
    omega_a: &QMatrix,
) -> Result<Row4> {
    if omega_a.rows() != g_i.n() {
        return Err(Error::SizeMismatch { expected: g_i.n(), found: omega_a.rows() });
    }
    let value = frame_value(direction, params, g_i, omega_a)?;
    Ok(phi_minus1(&ad_conjugate(g_i, &value)))
}

/// `(0, s, 0, -1)` for `J` and `(0, -s i, 0, i)` for `K`.
pub fn expected_reeb_value(direction: ReebDirection, n: usize, s_tilde: &Rational) -> Row4 {
    match direction {
        ReebDirection::J => Row4::reeb(n, Complex::real(s_tilde.clone()), Complex::real(-Rational::one())),
        ReebDirection::K => Row4::reeb(
            n,
            Complex::new(Rational::zero(), -s_tilde.clone()),
            Complex::new(Rational::zero(), Rational::one()),
        ),
    }
}

/// Componentwise multiplication by `-i`.
pub fn j0(v: &Row4) -> Row4 {
    v.mul_scalar(&Complex::new(Rational::zero(), -Rational::one()))
}

/// Random `g_I = (1, z, A)` and a random `sp(n)` value for `ω_A`.
pub fn sample_frame(rng: &mut impl Rng, n: usize) -> (G0Element, QMatrix) {
    let z = sampling::unit_quaternion(rng);
    let a = sampling::sp_n(rng, n);
    let g = G0Element::new(Rational::one(), z, a).expect("sampled factors are in Sp(1) and Sp(n)");
    (g, sampling::sp_n_algebra(rng, n))
}

/// Reeb tuples and the `J_0` pair over random `(s, z_I, A, ω_A)`.
pub fn reeb_tuple_check(rng: &mut impl Rng, n: usize, trials: usize) -> Result<ExactCheck> {
    let mut out = ExactCheck::default();
    for _ in 0..trials {
        let params = ScaleParams { s_tilde: sampling::scale_parameter(rng) };
        let (g, omega_a) = sample_frame(rng, n);
        let vj = omega_value_reeb(ReebDirection::J, &params, &g, &omega_a)?;
        let vk = omega_value_reeb(ReebDirection::K, &params, &g, &omega_a)?;
        let ej = expected_reeb_value(ReebDirection::J, n, &params.s_tilde);
        let ek = expected_reeb_value(ReebDirection::K, n, &params.s_tilde);
        out.record(vj == ej, || format!("J value {vj} at g = {g}, s = {}", params.s_tilde));
        out.record(vk == ek, || format!("K value {vk} at g = {g}, s = {}", params.s_tilde));
        out.record(j0(&vj) == vk, || format!("j0(J value) = {} != {vk}", j0(&vj)));
        out.record(j0(&vk) == vj.neg(), || format!("j0(K value) = {} != -{vj}", j0(&vk)));
    }
    Ok(out)
}

/// `Ad(g_I^{-1}) [-z j z̄]_{-2} = [-j]_{-2}` and the `k` analogue, with the
/// `φ_{-1}` image of each equal to the grade `-2` part of the Reeb tuple.
pub fn ad_conjugation_check(rng: &mut impl Rng, n: usize, trials: usize) -> Result<ExactCheck> {
    let mut out = ExactCheck::default();
    for _ in 0..trials {
        let (g, _) = sample_frame(rng, n);
        let z = g.z().clone();
        for direction in [ReebDirection::J, ReebDirection::K] {
            let d = direction.unit();
            let framed = minus2(n, -(z.clone() * &d * &z.conj()))?;
            let conjugated = ad_conjugate(&g, &framed);
            let target = minus2(n, -d.clone())?;
            out.record(conjugated == target, || format!("Ad(g^-1)[-z {d} z̄] = {conjugated} at g = {g}"));
            let image = phi_minus1(&conjugated);
            let reeb_part = expected_reeb_value(direction, n, &Rational::zero());
            out.record(image == reeb_part, || format!("phi_-1 of [-{d}]_-2 = {image}"));
        }
    }
    Ok(out)
}

/// Fundamental fields of `[(j,0)]_0`, `[(k,0)]_0` under `J_0`, and the
/// stabilized direction `[(i,0)]_0` mapping to zero.
pub fn vertical_map_check(n: usize) -> Result<ExactCheck> {
    let zero = QMatrix::zeros(n, n);
    let v = |q: Quaternion| -> Result<Row4> { Ok(phi_minus1(&grade0(q, zero.clone())?)) };
    let vi = v(Quaternion::i())?;
    let vj = v(Quaternion::j())?;
    let vk = v(Quaternion::k())?;
    let mut out = ExactCheck::default();
    let one = Complex::real(Rational::one());
    let minus_i = Complex::new(Rational::zero(), -Rational::one());
    let zero_c = Complex::real(Rational::zero());
    out.record(vj == Row4::reeb(n, one, zero_c.clone()), || format!("phi_-1[(j,0)] = {vj}"));
    out.record(vk == Row4::reeb(n, minus_i, zero_c), || format!("phi_-1[(k,0)] = {vk}"));
    out.record(vi.is_zero(), || format!("phi_-1[(i,0)] = {vi}"));
    out.record(j0(&vj) == vk, || format!("j0 of j-direction = {}", j0(&vj)));
    out.record(j0(&vk) == vj.neg(), || format!("j0 of k-direction = {}", j0(&vk)));
    Ok(out)
}

/// For random `x̄ ∈ H^n` and `g_I`: `J_0 φ_{-1}[x̄]_{-1} = φ_{-1}[x̄ ī]_{-1}`;
/// the frame change `ρ_{-1}(g_I^{-1})` turns right multiplication by
/// `conj(I)` into right multiplication by `ī`; and `J_0` matches on the
/// transformed vector.
pub fn horizontal_map_check(rng: &mut impl Rng, n: usize, trials: usize) -> Result<ExactCheck> {
    let mut out = ExactCheck::default();
    for _ in 0..trials {
        let x_bar = sampling::h_vector(rng, n);
        let (g, _) = sample_frame(rng, n);
        horizontal_instance(&mut out, &x_bar, &g)?;
    }
    Ok(out)
}

fn times_conj_i(v: &[Quaternion]) -> Vec<Quaternion> {
    v.iter().map(|q| q.clone() * -Quaternion::i()).collect()
}

/// One instance of [`horizontal_map_check`].
pub fn horizontal_instance(out: &mut ExactCheck, x_bar: &[Quaternion], g: &G0Element) -> Result<()> {
    let lhs = j0(&phi_minus1(&minus1(x_bar.to_vec())?));
    let rhs = phi_minus1(&minus1(times_conj_i(x_bar))?);
    out.record(lhs == rhs, || format!("j0 phi_-1 [x] != phi_-1 [x i-bar] at x = {x_bar:?}"));

    let g_inv = g.inverse();
    let q_i = rho_0(g, &TwistorPoint::base());
    let v = rho_minus1(&g_inv, x_bar)?;
    let acted: Vec<Quaternion> = x_bar.iter().map(|q| q.clone() * &q_i.quaternion().conj()).collect();
    let framed = rho_minus1(&g_inv, &acted)?;
    out.record(framed == times_conj_i(&v), || format!("frame change does not intertwine I at g = {g}"));

    let lhs = j0(&phi_minus1(&minus1(v.clone())?));
    let rhs = phi_minus1(&minus1(times_conj_i(&v))?);
    out.record(lhs == rhs, || format!("j0 mismatch on framed vector {v:?}"));
    Ok(())
}

/// The frame `(I, J, K) = (z i z̄, z j z̄, z k z̄)` of `Im H`.
pub fn rotated_frame(z: &Quaternion) -> [Quaternion; 3] {
    [Quaternion::i(), Quaternion::j(), Quaternion::k()].map(|u| z.clone() * u * &z.conj())
}

/// `(I, J, K)` is oriented orthonormal with `K = I J`, `I × J = K` and
/// `I × K = -J`.
pub fn cross_product_check(rng: &mut impl Rng, trials: usize) -> ExactCheck {
    let mut out = ExactCheck::default();
    for _ in 0..trials {
        let z = sampling::unit_quaternion(rng);
        let [i, j, k] = rotated_frame(&z);
        let orthonormal = [&i, &j, &k].iter().enumerate().all(|(a, u)| {
            [&i, &j, &k].iter().enumerate().all(|(b, v)| {
                u.imag_dot(v) == if a == b { Rational::one() } else { Rational::zero() }
            })
        });
        out.record(orthonormal && i.is_imaginary(), || format!("frame of z = {z} not orthonormal"));
        out.record(i.clone() * &j == k, || format!("I J != K for z = {z}"));
        out.record(i.imag_cross(&j) == k, || format!("I x J != K for z = {z}"));
        out.record(i.imag_cross(&k) == -j.clone(), || format!("I x K != -J for z = {z}"));
    }
    out
}

/// Group-level audit of the identification.
#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    /// `ρ_0(g) i = i ⇔ z ∈ U(1)`, sampled on both sides.
    pub stabilizer: ExactCheck,
    /// `Φ(g)` preserves `C d_0 ⇔ z ∈ U(1)`, and scalings always do.
    pub line_stabilizer: ExactCheck,
    /// Surjectivity of the orbit map through [`solve_z_i`].
    pub orbit: ExactCheck,
    /// Sampled points of `S^2` without a rational lift.
    pub orbit_unlifted: usize,
    /// `((u, q).g).h = (u, q).(g h)`.
    pub right_action: ExactCheck,
    /// `rank D~ = dim g~_{-1} = 4n + 4`, `dim M~ = 4n + 5` by two routes.
    pub dimensions: ExactCheck,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        [&self.stabilizer, &self.line_stabilizer, &self.orbit, &self.right_action, &self.dimensions]
            .iter()
            .all(|c| c.passed())
    }
}

/// `(u, q).g = (u g, ρ_0(g^{-1}) q)`.
pub fn act_on_pair(pair: &(G0Element, TwistorPoint), g: &G0Element) -> (G0Element, TwistorPoint) {
    (pair.0.compose(g), rho_0(&g.inverse(), &pair.1))
}

fn sample_full_g0(rng: &mut impl Rng, n: usize) -> G0Element {
    let z = sampling::unit_quaternion(rng);
    sample_g0(rng, n, z)
}

fn sample_g0(rng: &mut impl Rng, n: usize, z: Quaternion) -> G0Element {
    G0Element::new(sampling::positive_rational(rng), z, sampling::sp_n(rng, n)).expect("valid factors")
}

/// `ρ_0(g)` fixes `i` exactly when `z ∈ U(1)`; `Φ(g)` preserves `C d_0`
/// exactly when `z ∈ U(1)`, and `(s, 1, Id)` always does.
pub fn stabilizer_check(rng: &mut impl Rng, n: usize, trials: usize) -> (ExactCheck, ExactCheck) {
    let mut fiber = ExactCheck::default();
    let mut line = ExactCheck::default();
    for t in 0..trials {
        let z = if t % 2 == 0 { sampling::unit_complex(rng) } else { sampling::unit_quaternion(rng) };
        let g = sample_g0(rng, n, z.clone());
        let in_u1 = z.is_complex();
        let fixes = rho_0(&g, &TwistorPoint::base()) == TwistorPoint::base();
        fiber.record(fixes == in_u1, || format!("rho_0 of {g} fixes i: {fixes}"));
        let preserves = in_ptilde_preimage(&g);
        line.record(preserves == in_u1, || format!("Phi({g}) preserves C d0: {preserves}"));
        let scale = G0Element::new(sampling::positive_rational(rng), Quaternion::one(), QMatrix::identity(n))
            .expect("valid scaling");
        line.record(in_ptilde_preimage(&scale), || format!("scaling {scale} leaves C d0"));
    }
    (fiber, line)
}

pub fn identification_audit(rng: &mut impl Rng, n: usize, trials: usize) -> Result<AuditReport> {
    let (stabilizer, line_stabilizer) = stabilizer_check(rng, n, trials);

    let mut orbit = ExactCheck::default();
    let mut orbit_unlifted = 0;
    for _ in 0..trials {
        let target = sampling::sphere_point(rng);
        let point = TwistorPoint::new(target)?;
        match solve_z_i(&point) {
            Ok(z) => {
                let g = G0Element::sp1(n, z)?;
                let image = rho_0(&g, &TwistorPoint::base());
                orbit.record(image == point, || format!("lift of {point} maps i to {image}"));
            }
            Err(Error::NoRationalLift(_)) => orbit_unlifted += 1,
            Err(e) => return Err(e),
        }
    }

    let mut right_action = ExactCheck::default();
    for _ in 0..trials {
        let u = sample_full_g0(rng, n);
        let q = TwistorPoint::new(sampling::sphere_point(rng))?;
        let g = sample_full_g0(rng, n);
        let h = sample_full_g0(rng, n);
        let pair = (u, q);
        let stepwise = act_on_pair(&act_on_pair(&pair, &g), &h);
        let at_once = act_on_pair(&pair, &g.compose(&h));
        right_action.record(stepwise == at_once, || format!("action not associative at g = {g}, h = {h}"));
        let lhs = rho_0(&g.compose(&h), &pair.1);
        let rhs = rho_0(&g, &rho_0(&h, &pair.1));
        right_action.record(lhs == rhs, || format!("rho_0 not a homomorphism at g = {g}, h = {h}"));
    }

    Ok(AuditReport {
        stabilizer,
        line_stabilizer,
        orbit,
        orbit_unlifted,
        right_action,
        dimensions: dimension_check(n),
    })
}

/// Dimension counts, with `dim M~` computed both from the grading of `su(Q~)`
/// and as `dim sp(Q) - dim(p ∩ φ^{-1}(p~)) - 0`, the latter by exact kernel.
pub fn dimension_check(n: usize) -> ExactCheck {
    let mut out = ExactCheck::default();
    let su = graded_dimensions::<Complex>(n);
    let grade = |k: i32| su.iter().find(|(g, _)| *g == k).map_or(0, |(_, d)| *d);
    out.record(grade(-1) == 4 * n + 4, || format!("dim g~_-1 = {}", grade(-1)));
    out.record(grade(-1) + grade(-2) == 4 * n + 5, || format!("dim g~_- = {}", grade(-1) + grade(-2)));
    let quotient = sp_basis(n).len() - parabolic_preimage_basis(n).len();
    out.record(quotient == 4 * n + 5, || format!("dim sp(Q) / (p ∩ phi^-1 p~) = {quotient}"));
    out
}
