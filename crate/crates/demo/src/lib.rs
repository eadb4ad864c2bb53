//! Browser bindings for three operations: the `Sp(1)` orbit of `i` in `S^2`,
//! the Levi form of the flat twistor space at a chosen point, and the
//! closed-form `φ_{-1}`. Every binding returns a JSON string.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use qctwistor::embedding::{phi_minus1, phi_minus1_via_projection};
use qctwistor::flat::{self, NumericConfig, NumericTwistor, TwistorChart};
use qctwistor::g0::{rho_0, solve_z_i, G0Element, TwistorPoint};
use qctwistor::graded::{grade0, minus1, minus2, plus1, plus2, QMatrix};
use qctwistor::sampling::rng_from_seed;
use qctwistor::scalar::{to_f64, Quaternion, Scalar};
use qctwistor::Error;

fn integer_quaternion(w: i32, x: i32, y: i32, z: i32) -> Result<Quaternion, Error> {
    let q = Quaternion::from_ints(w.into(), x.into(), y.into(), z.into());
    if q.is_zero() {
        return Err(Error::InvalidConfig("the quaternion must be nonzero".into()));
    }
    Ok(q)
}

/// `p i p̄ / |p|^2`, the image of `i` under the unit quaternion `p / |p|`.
pub fn orbit_image(w: i32, x: i32, y: i32, z: i32) -> Result<TwistorPoint, Error> {
    let p = integer_quaternion(w, x, y, z)?;
    let image = (p.clone() * Quaternion::i() * p.conj()).scale(&p.norm_sqr().recip());
    TwistorPoint::new(image)
}

pub fn orbit_json(w: i32, x: i32, y: i32, z: i32) -> Result<Value, Error> {
    let point = orbit_image(w, x, y, z)?;
    let lift = match solve_z_i(&point) {
        Ok(u) => {
            let back = rho_0(&G0Element::sp1(1, u.clone())?, &TwistorPoint::base());
            json!({ "z": u.to_string(), "round_trip": back == point })
        }
        Err(Error::NoRationalLift(_)) => Value::Null,
        Err(e) => return Err(e),
    };
    Ok(json!({
        "point": point.to_string(),
        "coordinates": point.to_f64(),
        "fixes_i": integer_quaternion(w, x, y, z)?.is_complex(),
        "lift": lift,
    }))
}

/// Levi form eigenvalues of the flat twistor space over a seeded base point
/// of the Heisenberg group, at the fibre point reached from `i` by `p`.
pub fn levi_json(n: usize, seed: u64, w: i32, x: i32, y: i32, z: i32) -> Result<Value, Error> {
    if !(1..=3).contains(&n) {
        return Err(Error::InvalidConfig(format!("n = {n} outside 1..=3")));
    }
    let model = flat::build_flat_qc(n)?;
    let base = flat::sample_base_point(&mut rng_from_seed(seed), n);
    let chart = TwistorChart::new(&model, base, orbit_image(w, x, y, z)?)?;
    let cfg = NumericConfig::default();
    let numeric = NumericTwistor::new(&model, &chart);
    let p = numeric.coordinates(&chart);
    let mut eigenvalues: Vec<f64> =
        nalgebra::SymmetricEigen::new(numeric.levi_form(&p, cfg.fd_step)).eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(f64::total_cmp);
    let (signature, min_eig) = flat::signature_of(&numeric.levi_form(&p, cfg.fd_step), cfg.eig_floor);
    let (partial, nijenhuis) = numeric.integrability_residuals(&p, cfg.fd_step);
    Ok(json!({
        "base": chart.base.iter().map(to_f64).collect::<Vec<_>>(),
        "fiber": chart.point.to_string(),
        "eigenvalues": eigenvalues,
        "signature": [signature.0, signature.1],
        "expected": [4 * n + 2, 2],
        "min_abs_eigenvalue": min_eig,
        "integrability_residual": partial.max(nijenhuis),
    }))
}

/// `φ_{-1}` of a homogeneous element of `sp(1, 2)` built from one quaternion:
/// `[p̄]_{-2}` and `[(a, 0)]_0` use its imaginary part.
pub fn phi_minus1_json(grade: i32, w: i32, x: i32, y: i32, z: i32) -> Result<Value, Error> {
    let q = Quaternion::from_ints(w.into(), x.into(), y.into(), z.into());
    let element = match grade {
        -2 => minus2(1, q.imag_part())?,
        -1 => minus1(vec![q])?,
        0 => grade0(q.imag_part(), QMatrix::zeros(1, 1))?,
        1 => plus1(vec![q])?,
        2 => plus2(1, q.imag_part())?,
        _ => return Err(Error::InvalidConfig(format!("grade {grade} outside -2..=2"))),
    };
    let closed = phi_minus1(&element);
    let projected = phi_minus1_via_projection(&element);
    Ok(json!({
        "element": element.to_string(),
        "closed_form": closed.to_string(),
        "projection": projected.to_string(),
        "agree": closed == projected,
    }))
}

fn export(result: Result<Value, Error>) -> Result<String, JsError> {
    result.map(|v| v.to_string()).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = orbitPoint)]
pub fn orbit_point(w: i32, x: i32, y: i32, z: i32) -> Result<String, JsError> {
    export(orbit_json(w, x, y, z))
}

#[wasm_bindgen(js_name = leviEigenvalues)]
pub fn levi_eigenvalues(n: usize, seed: u32, w: i32, x: i32, y: i32, z: i32) -> Result<String, JsError> {
    export(levi_json(n, seed.into(), w, x, y, z))
}

#[wasm_bindgen(js_name = phiMinusOne)]
pub fn phi_minus_one(grade: i32, w: i32, x: i32, y: i32, z: i32) -> Result<String, JsError> {
    export(phi_minus1_json(grade, w, x, y, z))
}

