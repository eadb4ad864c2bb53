use proptest::prelude::*;

use qctwistor::embedding::{phi, phi_minus1, phi_minus1_via_projection};
use qctwistor::flat::{self, FiberChart};
use qctwistor::forms::{PolyForm, Polynomial};
use qctwistor::g0::{adjoint, rho_0, rho_minus1, rho_minus2, G0Element, TwistorPoint};
use qctwistor::graded::{minus1, minus2, MAX_GRADE, MIN_GRADE};
use qctwistor::sampling::{self, rng_from_seed};
use qctwistor::scalar::{identify_vector, qconj, qmul, rat, Complex, Quaternion, Rational};

fn rational() -> impl Strategy<Value = Rational> {
    (-30i64..=30, 1i64..=12).prop_map(|(a, b)| rat(a, b))
}

fn quaternion() -> impl Strategy<Value = Quaternion> {
    (rational(), rational(), rational(), rational()).prop_map(|(w, x, y, z)| Quaternion::new(w, x, y, z))
}

fn complex() -> impl Strategy<Value = Complex> {
    (rational(), rational()).prop_map(|(re, im)| Complex::new(re, im))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn quaternion_product_is_associative(a in quaternion(), b in quaternion(), c in quaternion()) {
        prop_assert_eq!(qmul(&qmul(&a, &b), &c), qmul(&a, &qmul(&b, &c)));
    }

    #[test]
    fn conjugation_reverses_products(a in quaternion(), b in quaternion()) {
        prop_assert_eq!(qconj(&qmul(&a, &b)), qmul(&qconj(&b), &qconj(&a)));
        let twice_real = a.clone() + &qconj(&a);
        prop_assert_eq!(twice_real, Quaternion::real(a.components()[0].clone() * Rational::from_integer(2.into())));
    }

    #[test]
    fn norm_is_multiplicative(a in quaternion(), b in quaternion()) {
        prop_assert_eq!(qmul(&a, &b).norm_sqr(), a.norm_sqr() * b.norm_sqr());
    }

    #[test]
    fn split_and_join_round_trip(q in quaternion()) {
        let (u, v) = q.split();
        prop_assert_eq!(Quaternion::join(&u, &v), q.clone());
        let rebuilt = Quaternion::from_complex(&u) + &qmul(&Quaternion::j(), &Quaternion::from_complex(&v));
        prop_assert_eq!(rebuilt, q);
    }

    #[test]
    fn identification_is_right_complex_linear(q in quaternion(), r in quaternion(), c in complex()) {
        let v = vec![q, r];
        let scaled: Vec<Quaternion> = v.iter().map(|x| x.mul_complex(&c)).collect();
        let lhs = identify_vector(&scaled, 2).unwrap();
        let rhs: Vec<Complex> = identify_vector(&v, 2).unwrap().iter().map(|x| x.clone() * &c).collect();
        prop_assert_eq!(lhs, rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn phi_preserves_brackets(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = rng_from_seed(seed);
        let m = sampling::sp_generic(&mut rng, n);
        let k = sampling::sp_generic(&mut rng, n);
        let lhs = phi(m.bracket(&k).unwrap().matrix());
        prop_assert_eq!(lhs, phi(m.matrix()).commutator(&phi(k.matrix())));
    }

    #[test]
    fn jacobi_identity(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let a = sampling::sp_generic(&mut rng, 1);
        let b = sampling::sp_generic(&mut rng, 1);
        let c = sampling::sp_generic(&mut rng, 1);
        let br = |x: &qctwistor::graded::SpElement, y: &qctwistor::graded::SpElement| x.bracket(y).unwrap();
        let sum = br(&a, &br(&b, &c)).add(&br(&b, &br(&c, &a))).add(&br(&c, &br(&a, &b)));
        prop_assert!(sum.is_zero());
    }

    #[test]
    fn bracket_adds_grades(seed in any::<u64>(), i in MIN_GRADE..=MAX_GRADE, j in MIN_GRADE..=MAX_GRADE) {
        let mut rng = rng_from_seed(seed);
        let a = sampling::sp_homogeneous(&mut rng, 1, i);
        let b = sampling::sp_homogeneous(&mut rng, 1, j);
        let br = a.bracket(&b).unwrap();
        if (MIN_GRADE..=MAX_GRADE).contains(&(i + j)) {
            prop_assert_eq!(br.grade_project(i + j).unwrap(), br);
        } else {
            prop_assert!(br.is_zero());
        }
    }

    #[test]
    fn grade_components_sum_to_element(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let m = sampling::sp_generic(&mut rng, 2);
        let total = m.components().into_iter().fold(m.sub(&m), |acc, (_, c)| acc.add(&c));
        prop_assert_eq!(total, m);
    }

    #[test]
    fn closed_form_matches_projection(seed in any::<u64>(), k in MIN_GRADE..=MAX_GRADE) {
        let mut rng = rng_from_seed(seed);
        let m = sampling::sp_homogeneous(&mut rng, 2, k);
        prop_assert_eq!(phi_minus1(&m), phi_minus1_via_projection(&m));
    }

    #[test]
    fn circle_fixes_base_point(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let z = sampling::unit_complex(&mut rng);
        prop_assert_eq!(qmul(&qmul(&z, &Quaternion::i()), &qconj(&z)), Quaternion::i());
        let g = G0Element::new(sampling::positive_rational(&mut rng), z, sampling::sp_n(&mut rng, 1)).unwrap();
        prop_assert_eq!(rho_0(&g, &TwistorPoint::base()), TwistorPoint::base());
    }

    #[test]
    fn cubic_forms_square_to_zero(coeffs in proptest::collection::vec(rational(), 6)) {
        let nvars = 3;
        let x = |i| Polynomial::var(nvars, i);
        let f = x(0).mul(&x(1)).scale(&coeffs[0]).add(&x(2).mul(&x(2)).mul(&x(0)).scale(&coeffs[1]));
        let g = x(1).mul(&x(1)).scale(&coeffs[2]).add(&x(2).scale(&coeffs[3]));
        let form = PolyForm::basis(nvars, &[1]).mul_function(&f).add(&PolyForm::basis(nvars, &[0]).mul_function(&g));
        prop_assert!(form.d().d().is_zero());
        let h = PolyForm::function(x(0).scale(&coeffs[4]).add(&x(1).mul(&x(2)).scale(&coeffs[5])));
        prop_assert!(h.d().d().is_zero());
    }

    #[test]
    fn wedge_is_graded_commutative(coeffs in proptest::collection::vec(rational(), 4)) {
        let nvars = 4;
        let x = |i| Polynomial::var(nvars, i);
        let one = PolyForm::basis(nvars, &[0]).mul_function(&x(1).scale(&coeffs[0]))
            .add(&PolyForm::basis(nvars, &[2]).mul_function(&x(3).scale(&coeffs[1])));
        let two = PolyForm::basis(nvars, &[1, 3]).mul_function(&x(0).scale(&coeffs[2]))
            .add(&PolyForm::basis(nvars, &[0, 2]).scale(&coeffs[3]));
        prop_assert_eq!(one.wedge(&one.clone()), PolyForm::zero(nvars, 2));
        prop_assert_eq!(one.wedge(&two), two.wedge(&one));
        let other = PolyForm::basis(nvars, &[3]).mul_function(&x(2));
        prop_assert_eq!(one.wedge(&other), other.wedge(&one).scale(&rat(-1, 1)));
    }

    #[test]
    fn twistor_complex_structure_squares_to_minus_one(seed in any::<u64>()) {
        let model = flat::build_flat_qc(1).unwrap();
        let mut rng = rng_from_seed(seed);
        let chart = flat::sample_chart(&mut rng, &model);
        prop_assert!(flat::cr_structure_at(&model, &chart).squares_to_minus_identity());
    }

    #[test]
    fn fiber_charts_invert(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let a = TwistorPoint::new(sampling::sphere_point(&mut rng)).unwrap().coefficients();
        let chart = FiberChart::for_point(&a);
        let w = chart.project(&a).unwrap();
        prop_assert_eq!(chart.unproject(&w), a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn levi_factor_actions_agree_with_adjoint(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = rng_from_seed(seed);
        let g = G0Element::new(
            sampling::positive_rational(&mut rng),
            sampling::unit_quaternion(&mut rng),
            sampling::sp_n(&mut rng, n),
        ).unwrap();
        let x = sampling::h_vector(&mut rng, n);
        let p = sampling::imaginary_quaternion(&mut rng);
        prop_assert_eq!(adjoint(&g, &minus1(x.clone()).unwrap()), minus1(rho_minus1(&g, &x).unwrap()).unwrap());
        prop_assert_eq!(adjoint(&g, &minus2(n, p.clone()).unwrap()), minus2(n, rho_minus2(&g, &p).unwrap()).unwrap());
    }
}

#[test]
fn complex_structure_on_reeb_values_squares_to_minus_one() {
    use qctwistor::correspondence::j0;
    use qctwistor::embedding::Row4;
    let v = Row4::reeb(1, Complex::from_ints(2, 1), Complex::from_ints(-1, 3));
    assert_eq!(j0(&j0(&v)), v.neg());
}
