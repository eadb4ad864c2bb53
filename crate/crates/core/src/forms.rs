//! Polynomial differential forms on `R^N` with exact rational coefficients.
//!
//! Evaluation follows the determinant convention:
//! `(dx^1 ∧ dx^2)(u, v) = u^1 v^2 - u^2 v^1`.

use std::collections::BTreeMap;
use std::fmt;

use crate::scalar::{Rational, Scalar};

/// Polynomial in `nvars` variables, keyed by exponent vectors.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Polynomial::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Polynomial::constant(nvars, Rational::one())
    }

    /// The coordinate function `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable {i} out of range");
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Polynomial::zero(nvars);
        p.add_term(e, Rational::one());
        p
    }

    /// `sum_i coeffs[i] * x_i`.
    pub fn linear(coeffs: &[Rational]) -> Self {
        let nvars = coeffs.len();
        coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .fold(Polynomial::zero(nvars), |acc, (i, c)| acc.add(&Polynomial::var(nvars, i).scale(c)))
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    /// Constant term, or `None` if the polynomial is not constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().expect("one term");
                e.iter().all(|&k| k == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    fn add_term(&mut self, exps: Vec<u32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exps).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, o: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, o.nvars, "polynomial variable count");
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Polynomial {
        self.scale(&-Rational::one())
    }

    pub fn sub(&self, o: &Polynomial) -> Polynomial {
        self.add(&o.neg())
    }

    pub fn scale(&self, r: &Rational) -> Polynomial {
        if r.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), c * r)).collect() }
    }

    pub fn mul(&self, o: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, o.nvars, "polynomial variable count");
        let mut out = Polynomial::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn derivative(&self, i: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut e2 = e.clone();
                e2[i] -= 1;
                out.add_term(e2, c * Rational::from_integer(e[i].into()));
            }
        }
        out
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.nvars, "evaluation point length");
        self.terms.iter().fold(Rational::zero(), |acc, (e, c)| {
            let mono = e.iter().zip(point).fold(c.clone(), |m, (&k, x)| m * num_traits::pow(x.clone(), k as usize));
            acc + mono
        })
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter().zip(point).fold(crate::scalar::to_f64(c), |m, (&k, x)| m * x.powi(k as i32))
            })
            .sum()
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (e, c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{c}")?;
            for (v, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*u{v}")?,
                    _ => write!(f, "*u{v}^{k}")?,
                }
            }
        }
        Ok(())
    }
}

/// Vector field with polynomial components.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VectorField {
    components: Vec<Polynomial>,
}

impl VectorField {
    pub fn new(components: Vec<Polynomial>) -> Self {
        let nvars = components.len();
        assert!(components.iter().all(|c| c.nvars == nvars), "component variable count");
        VectorField { components }
    }

    pub fn zero(nvars: usize) -> Self {
        VectorField { components: vec![Polynomial::zero(nvars); nvars] }
    }

    /// The coordinate field `∂_i`.
    pub fn coordinate(nvars: usize, i: usize) -> Self {
        let mut v = VectorField::zero(nvars);
        v.components[i] = Polynomial::one(nvars);
        v
    }

    pub fn constant(values: &[Rational]) -> Self {
        let nvars = values.len();
        VectorField { components: values.iter().map(|c| Polynomial::constant(nvars, c.clone())).collect() }
    }

    pub fn nvars(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, i: usize) -> &Polynomial {
        &self.components[i]
    }

    pub fn add(&self, o: &VectorField) -> VectorField {
        VectorField { components: self.components.iter().zip(&o.components).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn scale(&self, r: &Rational) -> VectorField {
        VectorField { components: self.components.iter().map(|c| c.scale(r)).collect() }
    }

    /// Directional derivative `X(f)`.
    pub fn apply(&self, f: &Polynomial) -> Polynomial {
        self.components
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .fold(Polynomial::zero(f.nvars), |acc, (i, c)| acc.add(&c.mul(&f.derivative(i))))
    }

    /// Lie bracket `[X, Y]`.
    pub fn bracket(&self, o: &VectorField) -> VectorField {
        VectorField {
            components: self
                .components
                .iter()
                .zip(&o.components)
                .map(|(x, y)| self.apply(y).sub(&o.apply(x)))
                .collect(),
        }
    }
}

/// Homogeneous `k`-form `sum_I f_I dx^I` with strictly increasing index tuples.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyForm {
    nvars: usize,
    degree: usize,
    terms: BTreeMap<Vec<usize>, Polynomial>,
}

/// Sorts `idx` in place and returns the permutation sign, or `0` on a repeat.
fn sort_with_sign(idx: &mut [usize]) -> i32 {
    let mut sign = 1;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        0
    } else {
        sign
    }
}

impl PolyForm {
    pub fn zero(nvars: usize, degree: usize) -> Self {
        PolyForm { nvars, degree, terms: BTreeMap::new() }
    }

    /// The 0-form `f`.
    pub fn function(f: Polynomial) -> Self {
        let mut out = PolyForm::zero(f.nvars, 0);
        out.add_term(Vec::new(), f);
        out
    }

    /// `dx^{i_1} ∧ ... ∧ dx^{i_k}` in any index order.
    pub fn basis(nvars: usize, indices: &[usize]) -> Self {
        assert!(indices.iter().all(|&i| i < nvars), "index out of range");
        let mut idx = indices.to_vec();
        let sign = sort_with_sign(&mut idx);
        let mut out = PolyForm::zero(nvars, indices.len());
        if sign != 0 {
            out.add_term(idx, Polynomial::constant(nvars, Rational::from_integer(sign.into())));
        }
        out
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `dx^I` for an increasing tuple `I`.
    pub fn coefficient(&self, indices: &[usize]) -> Polynomial {
        self.terms.get(indices).cloned().unwrap_or_else(|| Polynomial::zero(self.nvars))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &Polynomial)> {
        self.terms.iter()
    }

    fn add_term(&mut self, idx: Vec<usize>, f: Polynomial) {
        if f.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&idx) {
            Some(prev) => prev.add(&f),
            None => f,
        };
        if !sum.is_zero() {
            self.terms.insert(idx, sum);
        }
    }

    pub fn add(&self, o: &PolyForm) -> PolyForm {
        assert_eq!((self.nvars, self.degree), (o.nvars, o.degree), "form shape");
        let mut out = self.clone();
        for (i, f) in &o.terms {
            out.add_term(i.clone(), f.clone());
        }
        out
    }

    pub fn sub(&self, o: &PolyForm) -> PolyForm {
        self.add(&o.scale(&-Rational::one()))
    }

    pub fn scale(&self, r: &Rational) -> PolyForm {
        self.mul_function(&Polynomial::constant(self.nvars, r.clone()))
    }

    pub fn mul_function(&self, g: &Polynomial) -> PolyForm {
        let mut out = PolyForm::zero(self.nvars, self.degree);
        for (i, f) in &self.terms {
            out.add_term(i.clone(), f.mul(g));
        }
        out
    }

    pub fn wedge(&self, o: &PolyForm) -> PolyForm {
        assert_eq!(self.nvars, o.nvars, "form variable count");
        let mut out = PolyForm::zero(self.nvars, self.degree + o.degree);
        for (i, f) in &self.terms {
            for (j, g) in &o.terms {
                let mut idx: Vec<usize> = i.iter().chain(j).copied().collect();
                let sign = sort_with_sign(&mut idx);
                if sign != 0 {
                    out.add_term(idx, f.mul(g).scale(&Rational::from_integer(sign.into())));
                }
            }
        }
        out
    }

    /// Exterior derivative.
    pub fn d(&self) -> PolyForm {
        let mut out = PolyForm::zero(self.nvars, self.degree + 1);
        for (i, f) in &self.terms {
            for v in 0..self.nvars {
                let df = f.derivative(v);
                if df.is_zero() || i.contains(&v) {
                    continue;
                }
                let mut idx: Vec<usize> = std::iter::once(v).chain(i.iter().copied()).collect();
                let sign = sort_with_sign(&mut idx);
                out.add_term(idx, df.scale(&Rational::from_integer(sign.into())));
            }
        }
        out
    }

    /// Interior product `X ⌟ self`, inserting `X` in the first slot.
    pub fn interior(&self, x: &VectorField) -> PolyForm {
        assert!(self.degree > 0, "interior product of a function");
        let mut out = PolyForm::zero(self.nvars, self.degree - 1);
        for (i, f) in &self.terms {
            for (pos, &v) in i.iter().enumerate() {
                let xv = x.component(v);
                if xv.is_zero() {
                    continue;
                }
                let rest: Vec<usize> = i.iter().enumerate().filter(|&(p, _)| p != pos).map(|(_, &w)| w).collect();
                let term = f.mul(xv);
                out.add_term(rest, if pos % 2 == 0 { term } else { term.neg() });
            }
        }
        out
    }

    /// `self(X_1, ..., X_k)` as a polynomial function.
    pub fn evaluate(&self, fields: &[VectorField]) -> Polynomial {
        assert_eq!(fields.len(), self.degree, "argument count");
        let reduced = fields.iter().fold(self.clone(), |acc, x| acc.interior(x));
        reduced.coefficient(&[])
    }
}

impl fmt::Display for PolyForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (i, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})")?;
            for v in i {
                write!(f, " du{v}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    #[test]
    fn d_of_coordinate_and_simple_one_form() {
        let t = PolyForm::function(Polynomial::var(3, 2));
        assert_eq!(t.d(), PolyForm::basis(3, &[2]));
        let x1dx2 = PolyForm::basis(3, &[1]).mul_function(&Polynomial::var(3, 0));
        assert_eq!(x1dx2.d(), PolyForm::basis(3, &[0, 1]));
    }

    #[test]
    fn wedge_is_graded_commutative() {
        let a = PolyForm::basis(4, &[0]).mul_function(&Polynomial::var(4, 3));
        let b = PolyForm::basis(4, &[1]);
        assert_eq!(a.wedge(&b), b.wedge(&a).scale(&int(-1)));
        let c = PolyForm::basis(4, &[1, 2]);
        assert_eq!(a.wedge(&c), c.wedge(&a));
        assert!(b.wedge(&b).is_zero());
    }

    #[test]
    fn evaluation_uses_determinant_convention() {
        let w = PolyForm::basis(2, &[0, 1]);
        let u = VectorField::constant(&[int(2), int(3)]);
        let v = VectorField::constant(&[int(5), int(7)]);
        assert_eq!(w.evaluate(&[u, v]).as_constant(), Some(int(2 * 7 - 3 * 5)));
        assert_eq!(PolyForm::basis(2, &[1, 0]), w.scale(&int(-1)));
    }

    #[test]
    fn cartan_formula_for_d_on_one_forms() {
        // dα(X,Y) = X α(Y) - Y α(X) - α([X,Y])
        let nv = 3;
        let alpha = PolyForm::basis(nv, &[2])
            .add(&PolyForm::basis(nv, &[1]).mul_function(&Polynomial::var(nv, 0).mul(&Polynomial::var(nv, 2))));
        let x = VectorField::new(vec![Polynomial::one(nv), Polynomial::zero(nv), Polynomial::var(nv, 1)]);
        let y = VectorField::new(vec![Polynomial::var(nv, 2), Polynomial::one(nv), Polynomial::zero(nv)]);
        let lhs = alpha.d().evaluate(&[x.clone(), y.clone()]);
        let ay = alpha.evaluate(&[y.clone()]);
        let ax = alpha.evaluate(&[x.clone()]);
        let rhs = x.apply(&ay).sub(&y.apply(&ax)).sub(&alpha.evaluate(&[x.bracket(&y)]));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn polynomial_eval_and_derivative() {
        let x = Polynomial::var(2, 0);
        let y = Polynomial::var(2, 1);
        let p = x.mul(&x).mul(&y).add(&Polynomial::constant(2, int(3)));
        assert_eq!(p.derivative(0), x.mul(&y).scale(&int(2)));
        assert_eq!(p.eval(&[int(2), int(5)]), int(23));
        assert!((p.eval_f64(&[2.0, 5.0]) - 23.0).abs() < 1e-12);
        assert_eq!(p.as_constant(), None);
        assert_eq!(Polynomial::constant(2, int(4)).as_constant(), Some(int(4)));
    }
}
