//! Hermite polynomials and the Gaussian divergence-form calculus.
//!
//! Uses the probabilists' family `He_0 = 1`, `He_1 = x`,
//! `He_{k+1} = x He_k - k He_{k-1}`, orthogonal under the standard Gaussian
//! with `E[He_a He_b] = a! 1(a = b)`. The divergence operator is
//! `delta_i f = x_i f - d_i f`; iterating it on the constant field 1
//! generates the basis, `He_alpha = delta^alpha 1`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::RandomField;
use crate::measure::GaussianIntegrator;

/// Value of the probabilists' Hermite polynomial `He_k(x)`.
pub fn he_value(k: usize, x: f64) -> f64 {
    match k {
        0 => 1.0,
        1 => x,
        _ => {
            let mut prev = 1.0; // He_0
            let mut cur = x; // He_1
            for j in 1..k {
                let next = x * cur - j as f64 * prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// `alpha! = prod_i alpha_i!` as a float.
pub fn multi_factorial(alpha: &[usize]) -> f64 {
    alpha
        .iter()
        .map(|&k| (1..=k).map(|j| j as f64).product::<f64>())
        .product()
}

/// A finite linear combination of multivariate Hermite polynomials,
/// indexed by multi-indices of fixed length.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteSeries {
    dim: usize,
    coeffs: BTreeMap<Vec<usize>, f64>,
}

impl HermiteSeries {
    /// The zero series in dimension `dim`.
    pub fn zero(dim: usize) -> Self {
        Self { dim, coeffs: BTreeMap::new() }
    }

    /// The constant series `c`.
    pub fn constant(dim: usize, c: f64) -> Self {
        let mut s = Self::zero(dim);
        if c != 0.0 {
            s.coeffs.insert(vec![0; dim], c);
        }
        s
    }

    /// The single basis polynomial `He_alpha`.
    pub fn basis(dim: usize, alpha: &[usize]) -> Result<Self> {
        if alpha.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: alpha.len() });
        }
        let mut s = Self::zero(dim);
        s.coeffs.insert(alpha.to_vec(), 1.0);
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Coefficient table, ordered by multi-index.
    pub fn coeffs(&self) -> &BTreeMap<Vec<usize>, f64> {
        &self.coeffs
    }

    pub fn coeff(&self, alpha: &[usize]) -> f64 {
        self.coeffs.get(alpha).copied().unwrap_or(0.0)
    }

    /// Largest total degree `|alpha|` present.
    pub fn degree(&self) -> usize {
        self.coeffs
            .keys()
            .map(|a| a.iter().sum::<usize>())
            .max()
            .unwrap_or(0)
    }

    pub fn add_term(&mut self, alpha: &[usize], coeff: f64) {
        assert_eq!(alpha.len(), self.dim, "multi-index length");
        let slot = self.coeffs.entry(alpha.to_vec()).or_insert(0.0);
        *slot += coeff;
        if *slot == 0.0 {
            self.coeffs.remove(alpha);
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut out = Self::zero(self.dim);
        if factor != 0.0 {
            for (a, c) in &self.coeffs {
                out.coeffs.insert(a.clone(), c * factor);
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        let mut out = self.clone();
        for (a, c) in &other.coeffs {
            out.add_term(a, *c);
        }
        Ok(out)
    }

    /// Evaluate at a point via the per-axis recurrence.
    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        let mut total = 0.0;
        for (alpha, c) in &self.coeffs {
            let mut prod = *c;
            for (i, &k) in alpha.iter().enumerate() {
                if k > 0 {
                    prod *= he_value(k, x[i]);
                }
            }
            total += prod;
        }
        total
    }

    /// Partial derivative: `d_i He_alpha = alpha_i He_{alpha - e_i}`.
    pub fn partial(&self, axis: usize) -> Self {
        let mut out = Self::zero(self.dim);
        for (alpha, c) in &self.coeffs {
            if alpha[axis] > 0 {
                let mut beta = alpha.clone();
                beta[axis] -= 1;
                out.add_term(&beta, c * alpha[axis] as f64);
            }
        }
        out
    }

    /// Multiplication by the coordinate:
    /// `x_i He_alpha = He_{alpha + e_i} + alpha_i He_{alpha - e_i}`.
    pub fn mul_coordinate(&self, axis: usize) -> Self {
        let mut out = Self::zero(self.dim);
        for (alpha, c) in &self.coeffs {
            let mut up = alpha.clone();
            up[axis] += 1;
            out.add_term(&up, *c);
            if alpha[axis] > 0 {
                let mut down = alpha.clone();
                down[axis] -= 1;
                out.add_term(&down, c * alpha[axis] as f64);
            }
        }
        out
    }

    /// The divergence operator in coefficient space:
    /// `delta_i s = x_i s - d_i s`, which sends `He_alpha` to `He_{alpha + e_i}`.
    pub fn divergence(&self, axis: usize) -> Self {
        let mul = self.mul_coordinate(axis);
        let der = self.partial(axis).scale(-1.0);
        mul.add(&der).expect("same dimension")
    }

    /// `E[s^2] = sum_alpha alpha! c_alpha^2` by orthogonality.
    pub fn l2_norm_squared(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|(a, c)| multi_factorial(a) * c * c)
            .sum()
    }

    /// View as a random field.
    pub fn to_field(&self) -> RandomField {
        RandomField::hermite_series(self)
    }
}

/// `He_alpha` built by iterating the divergence operator on the constant 1.
/// Coincides with the recurrence construction; the equality is a test.
pub fn hermite(dim: usize, alpha: &[usize]) -> Result<HermiteSeries> {
    if alpha.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: alpha.len() });
    }
    let mut s = HermiteSeries::constant(dim, 1.0);
    for (axis, &k) in alpha.iter().enumerate() {
        for _ in 0..k {
            s = s.divergence(axis);
        }
    }
    Ok(s)
}

/// The divergence `delta_i f = x_i f - d_i f` of a differentiable field.
pub fn divergence_field(f: &RandomField, axis: usize) -> Result<RandomField> {
    let grad = f.gradient()?;
    let xi = RandomField::coordinate(f.dim(), axis)?;
    RandomField::affine(
        &[(1.0, xi.product(f)?), (-1.0, grad[axis].clone())],
        0.0,
    )
}

/// Residual of the Gaussian integration-by-parts identity
/// `E[f d_i g] = E[delta_i f g]` for differentiable `f, g`.
pub fn ibp_residual(
    f: &RandomField,
    g: &RandomField,
    axis: usize,
    integrator: &GaussianIntegrator,
) -> Result<f64> {
    let gg = g.gradient()?;
    let df = divergence_field(f, axis)?;
    let lhs = integrator
        .expect(&f.product(&gg[axis])?)?
        .finite_or(Error::OutsideDomain)?;
    let rhs = integrator
        .expect(&df.product(g)?)?
        .finite_or(Error::OutsideDomain)?;
    Ok((lhs - rhs).abs())
}

/// Hermite expansion of `f` up to total degree `degree`.
#[derive(Debug, Clone)]
pub struct Expansion {
    pub series: HermiteSeries,
    /// `E[(f - reconstruction)^2]`, estimated with the same integrator.
    pub reconstruction_error: f64,
}

/// Expand `f` in the Hermite basis: `c_alpha = E[f He_alpha] / alpha!`.
///
/// For polynomial `f` the quadrature order is raised so every coefficient
/// integral `f He_alpha` is integrated exactly.
pub fn expand(
    f: &RandomField,
    degree: usize,
    integrator: &GaussianIntegrator,
) -> Result<Expansion> {
    let dim = f.dim();
    let needed = f.poly_degree().map(|d| d + degree);
    let local = match needed {
        Some(total) => integrator.with_order_at_least(total / 2 + 1),
        None => integrator.clone(),
    };
    let mut series = HermiteSeries::zero(dim);
    for alpha in multi_indices(dim, degree) {
        let basis = HermiteSeries::basis(dim, &alpha)?.to_field();
        let moment = local
            .expect(&f.product(&basis)?)?
            .finite_or(Error::OutsideDomain)?;
        let c = moment / multi_factorial(&alpha);
        if c != 0.0 {
            series.add_term(&alpha, c);
        }
    }
    let recon = series.to_field();
    let diff = RandomField::affine(&[(1.0, f.clone()), (-1.0, recon)], 0.0)?;
    // The residual can be pointwise roundoff (exact reconstruction), where
    // ladder increments are meaningless; use a single-level sum.
    let reconstruction_error = local
        .without_ladder()
        .expect(&diff.product(&diff)?)?
        .finite_or(Error::OutsideDomain)?
        .max(0.0);
    Ok(Expansion { series, reconstruction_error })
}

/// All multi-indices of length `dim` with total degree at most `degree`,
/// in lexicographic order.
pub fn multi_indices(dim: usize, degree: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; dim];
    fn rec(out: &mut Vec<Vec<usize>>, cur: &mut Vec<usize>, axis: usize, left: usize) {
        if axis == cur.len() {
            out.push(cur.clone());
            return;
        }
        for k in 0..=left {
            cur[axis] = k;
            rec(out, cur, axis + 1, left - k);
        }
        cur[axis] = 0;
    }
    rec(&mut out, &mut cur, 0, degree);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::GaussianIntegrator;

    #[test]
    fn recurrence_matches_explicit_polynomials() {
        // He_2 = x^2 - 1, He_3 = x^3 - 3x, He_4 = x^4 - 6x^2 + 3.
        for x in [-2.5, -1.0, 0.0, 0.7, 3.1] {
            assert!((he_value(2, x) - (x * x - 1.0)).abs() < 1e-12);
            assert!((he_value(3, x) - (x * x * x - 3.0 * x)).abs() < 1e-12);
            assert!((he_value(4, x) - (x.powi(4) - 6.0 * x * x + 3.0)).abs() < 1e-11);
        }
    }

    #[test]
    fn divergence_iteration_equals_recurrence() {
        // He_alpha = delta^alpha 1, checked in coefficient space and by value.
        for k in 0..=6 {
            let built = hermite(1, &[k]).unwrap();
            assert_eq!(built.coeff(&[k]), 1.0);
            assert_eq!(built.coeffs().len(), 1, "delta^k 1 is a pure basis vector");
            for x in [-1.3, 0.0, 0.9, 2.0] {
                assert!((built.eval(&[x]) - he_value(k, x)).abs() < 1e-12);
            }
        }
        let biv = hermite(2, &[2, 1]).unwrap();
        for (x, y) in [(0.3, -1.0), (1.5, 0.5)] {
            assert!((biv.eval(&[x, y]) - he_value(2, x) * he_value(1, y)).abs() < 1e-12);
        }
    }

    #[test]
    fn partial_transports_coefficients() {
        // d1 He_(1,1) = He_(0,1); d2 He_(1,1) = He_(1,0).
        let s = HermiteSeries::basis(2, &[1, 1]).unwrap();
        let d0 = s.partial(0);
        assert_eq!(d0.coeff(&[0, 1]), 1.0);
        assert_eq!(d0.coeffs().len(), 1);
        let d1 = s.partial(1);
        assert_eq!(d1.coeff(&[1, 0]), 1.0);
        // d He_4 = 4 He_3.
        let s4 = HermiteSeries::basis(1, &[4]).unwrap();
        assert_eq!(s4.partial(0).coeff(&[3]), 4.0);
    }

    #[test]
    fn orthogonality_under_quadrature() {
        let integrator = GaussianIntegrator::quadrature(1, 32);
        for a in 0..=6usize {
            for b in 0..=6usize {
                let fa = HermiteSeries::basis(1, &[a]).unwrap().to_field();
                let fb = HermiteSeries::basis(1, &[b]).unwrap().to_field();
                let prod = fa.product(&fb).unwrap();
                let got = integrator.expect(&prod).unwrap().value().unwrap();
                let want = if a == b { multi_factorial(&[a]) } else { 0.0 };
                assert!(
                    (got - want).abs() <= 1e-9 * want.abs().max(1.0),
                    "E[He_{a} He_{b}] = {got}, want {want}"
                );
            }
        }
    }

    #[test]
    fn ibp_residual_small_for_hermite_pairs() {
        let integrator = GaussianIntegrator::quadrature(1, 32);
        for a in 0..=5usize {
            for b in 0..=5usize {
                let fa = HermiteSeries::basis(1, &[a]).unwrap().to_field();
                let fb = HermiteSeries::basis(1, &[b]).unwrap().to_field();
                let res = ibp_residual(&fa, &fb, 0, &integrator).unwrap();
                assert!(res < 1e-8, "pair ({a}, {b}): residual {res}");
            }
        }
    }

    #[test]
    fn divergence_field_matches_series_divergence() {
        // The two routes agree pointwise to roundoff, so the squared
        // difference needs a single-level sum, not the ladder.
        let integrator = GaussianIntegrator::quadrature_fixed(2, 16);
        let s = HermiteSeries::basis(2, &[1, 2]).unwrap();
        let by_series = s.divergence(0); // He_(2,2)
        assert_eq!(by_series.coeff(&[2, 2]), 1.0);
        let by_field = divergence_field(&s.to_field(), 0).unwrap();
        let diff = RandomField::affine(
            &[(1.0, by_field), (-1.0, by_series.to_field())],
            0.0,
        )
        .unwrap();
        let err = integrator
            .expect(&diff.product(&diff).unwrap())
            .unwrap()
            .value()
            .unwrap();
        assert!(err.abs() < 1e-18);
    }

    #[test]
    fn expansion_recovers_polynomials_exactly() {
        let integrator = GaussianIntegrator::quadrature(1, 24);
        // x^2 = He_2 + 1.
        let f = RandomField::parse(1, "x^2").unwrap();
        let exp = expand(&f, 4, &integrator).unwrap();
        assert!((exp.series.coeff(&[0]) - 1.0).abs() < 1e-10);
        assert!((exp.series.coeff(&[2]) - 1.0).abs() < 1e-10);
        assert!(exp.series.coeff(&[1]).abs() < 1e-10);
        assert!(exp.series.coeff(&[4]).abs() < 1e-10);
        assert!(exp.reconstruction_error < 1e-10);
    }

    #[test]
    fn expansion_of_abs_x_matches_closed_coefficients() {
        // E[|x| He_{2k}] has closed forms: sqrt(2/pi) * (1, 1, -1, 3) for
        // 2k = 0, 2, 4, 6; odd coefficients vanish by symmetry.
        let integrator = GaussianIntegrator::quadrature(1, 512);
        let f = RandomField::parse(1, "abs(x)").unwrap();
        let exp = expand(&f, 6, &integrator).unwrap();
        let c = (2.0 / std::f64::consts::PI).sqrt();
        let want = [
            (vec![0usize], c),
            (vec![2], c / 2.0),
            (vec![4], -c / 24.0),
            (vec![6], 3.0 * c / 720.0),
        ];
        for (alpha, w) in want {
            let got = exp.series.coeff(&alpha);
            // The kink at 0 limits quadrature accuracy to O(1/order).
            assert!(
                (got - w).abs() < 1e-3,
                "c_{alpha:?} = {got}, want {w}"
            );
        }
        assert!(exp.series.coeff(&[1]).abs() < 1e-9);
        assert!(exp.series.coeff(&[3]).abs() < 1e-9);

        // Reconstruction error decreases in the cut degree.
        let mut prev = f64::INFINITY;
        for d in [0usize, 2, 4, 6] {
            let e = expand(&f, d, &integrator).unwrap().reconstruction_error;
            assert!(e <= prev + 1e-12, "degree {d}: {e} > {prev}");
            prev = e;
        }
    }

    #[test]
    fn parseval_inequality_and_equality() {
        let integrator = GaussianIntegrator::quadrature(1, 64);
        // Polynomial: equality.
        let f = RandomField::parse(1, "x^3 - x").unwrap();
        let exp = expand(&f, 3, &integrator).unwrap();
        let lhs = exp.series.l2_norm_squared();
        let rhs = integrator
            .expect(&f.product(&f).unwrap())
            .unwrap()
            .value()
            .unwrap();
        assert!((lhs - rhs).abs() < 1e-8 * rhs.max(1.0));
        // Non-polynomial: strict inequality (Bessel).
        let g = RandomField::parse(1, "abs(x)").unwrap();
        let expg = expand(&g, 4, &integrator).unwrap();
        let l2 = integrator
            .expect(&g.product(&g).unwrap())
            .unwrap()
            .value()
            .unwrap();
        assert!(expg.series.l2_norm_squared() <= l2 + 1e-9);
    }

    #[test]
    fn multi_index_enumeration_counts() {
        // (d + n choose n) indices of degree <= d.
        assert_eq!(multi_indices(1, 5).len(), 6);
        assert_eq!(multi_indices(2, 3).len(), 10);
        assert_eq!(multi_indices(3, 2).len(), 10);
    }
}
