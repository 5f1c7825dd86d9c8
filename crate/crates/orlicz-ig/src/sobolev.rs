//! The Gaussian Orlicz-Sobolev space: fields `f` with sub-exponential
//! gauge whose weak partial derivatives have sub-Gaussian gauge.
//!
//! Membership combines a `cosh - 1` gauge on `f` with `squared(cosh - 1)`
//! gauges on each `d_i f`; the sum of all components is a complete norm.
//! The module also verifies the structure underneath: weak derivatives
//! against compactly supported polynomial bumps, the first-order
//! translation-increment identity with its `o(t)` remainder, chain rules
//! for Lipschitz post-compositions (including single-layer neurons), and
//! a local `L^{2k}` embedding bound on centered balls.
//!
//! Gauges of fields outside the relevant Orlicz space surface as `None`
//! components (and `member = false`), not as hard errors; hard errors are
//! reserved for structural problems such as a missing gradient.

use crate::error::{Error, Result};
use crate::field::{Activation, RandomField};
use crate::measure::{integrate_box, BoxWeight, GaussianIntegrator};
use crate::norms::{luxemburg_norm, luxemburg_norm_weighted};
use crate::numerics::{adaptive_simpson, gauss_legendre};
use crate::young::YoungFunction;

/// Component gauges of the Sobolev norm and the membership verdict.
#[derive(Debug, Clone)]
pub struct SobolevReport {
    /// Gauge of `f` under `cosh - 1`; `None` when the modulus diverges.
    pub f_norm: Option<f64>,
    /// Per-axis gauge of `d_i f` under `squared(cosh - 1)`.
    pub grad_norms: Vec<Option<f64>>,
    /// `f_norm + sum(grad_norms)` when every component is finite.
    pub total: Option<f64>,
    /// All component gauges finite.
    pub member: bool,
}

/// A component gauge, mapping divergence verdicts to `None`.
fn gauge_or_none(
    f: &RandomField,
    phi: &YoungFunction,
    integrator: &GaussianIntegrator,
    weight: Option<&RandomField>,
) -> Result<Option<f64>> {
    let outcome = match weight {
        Some(w) => luxemburg_norm_weighted(f, phi, integrator, w),
        None => luxemburg_norm(f, phi, integrator),
    };
    match outcome {
        Ok(r) => Ok(Some(r.value)),
        Err(Error::NotInOrliczSpace { .. }) | Err(Error::DivergentMoment { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn membership_with(
    f: &RandomField,
    integrator: &GaussianIntegrator,
    weight: Option<&RandomField>,
) -> Result<SobolevReport> {
    let grads = f.gradient()?;
    let f_norm = gauge_or_none(f, &YoungFunction::cosh2(), integrator, weight)?;
    let squared = YoungFunction::cosh2().squared();
    let mut grad_norms = Vec::with_capacity(grads.len());
    for g in &grads {
        grad_norms.push(gauge_or_none(g, &squared, integrator, weight)?);
    }
    let member = f_norm.is_some() && grad_norms.iter().all(Option::is_some);
    let total = if member {
        Some(f_norm.unwrap() + grad_norms.iter().map(|g| g.unwrap()).sum::<f64>())
    } else {
        None
    };
    Ok(SobolevReport { f_norm, grad_norms, total, member })
}

/// Membership report under the reference Gaussian measure. The gradient
/// must exist symbolically (a.e. derivatives of kinks are fine); missing
/// gradients are a hard error, divergent gauges are a `member = false`
/// verdict.
pub fn sobolev_membership(
    f: &RandomField,
    integrator: &GaussianIntegrator,
) -> Result<SobolevReport> {
    membership_with(f, integrator, None)
}

/// Membership report under the reweighted measure `p dgamma`. Moving to
/// an equivalent model density changes the component gauges but not the
/// verdicts (the fibers of the Sobolev bundle are isomorphic).
pub fn sobolev_membership_weighted(
    f: &RandomField,
    integrator: &GaussianIntegrator,
    density: &RandomField,
) -> Result<SobolevReport> {
    membership_with(f, integrator, Some(density))
}

/// A compactly supported test function: the product over axes of
/// `relu(1 - ((x_i - c_i)/s)^2)^3`, which is `C^2`, vanishes to third
/// order on the boundary of the box `[c - s, c + s]`, and is polynomial
/// inside it (hence integrated exactly by panel quadrature).
#[derive(Debug, Clone)]
pub struct Bump {
    pub field: RandomField,
    /// Lower corner of the supporting box.
    pub lo: Vec<f64>,
    /// Upper corner of the supporting box.
    pub hi: Vec<f64>,
}

impl Bump {
    pub fn new(dim: usize, center: &[f64], scale: f64) -> Result<Self> {
        if center.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: center.len() });
        }
        if !(scale > 0.0) {
            return Err(Error::InvalidArgument("bump scale must be positive".into()));
        }
        let mut field = RandomField::constant(dim, 1.0);
        for (axis, &c) in center.iter().enumerate() {
            let xi = RandomField::coordinate(dim, axis)?;
            let shifted = xi.add_constant(-c).scale(1.0 / scale);
            let one_minus_sq = shifted.product(&shifted)?.scale(-1.0).add_constant(1.0);
            let factor = one_minus_sq.compose(Activation::Relu).powi(3);
            field = field.product(&factor)?;
        }
        let lo = center.iter().map(|&c| c - scale).collect();
        let hi = center.iter().map(|&c| c + scale).collect();
        Ok(Bump { field, lo, hi })
    }
}

/// The standard bump family used by the checks: four translated and
/// scaled copies per dimension.
pub fn bump_presets(dim: usize) -> Result<Vec<Bump>> {
    let mut bumps = Vec::new();
    for &(c, s) in &[(0.0, 1.0), (0.7, 1.3), (-1.2, 0.8), (0.3, 2.0)] {
        bumps.push(Bump::new(dim, &vec![c; dim], s)?);
    }
    Ok(bumps)
}

/// Panel counts and per-panel order for box quadrature, chosen so the
/// tensor grid stays modest in higher dimension.
fn box_resolution(dim: usize) -> (usize, usize) {
    match dim {
        1 => (16, 14),
        2 => (8, 10),
        _ => (4, 8),
    }
}

/// `E[g h]` over the Gaussian measure restricted to the bump's box. In
/// one dimension the integral is adaptive, so jump discontinuities of
/// a.e. derivatives (`sign`, `step`) are resolved to tolerance; in higher
/// dimension a fixed tensor rule is used.
fn box_pairing(bump: &Bump, g: &RandomField, h: &RandomField) -> Result<f64> {
    let dim = bump.lo.len();
    if dim == 1 {
        let norm = (2.0 * std::f64::consts::PI).sqrt().recip();
        let integrand = |x: f64| {
            let point = [x];
            g.eval(&point) * h.eval(&point) * norm * (-0.5 * x * x).exp()
        };
        return Ok(adaptive_simpson(&integrand, bump.lo[0], bump.hi[0], 1e-11));
    }
    let (panels, order) = box_resolution(dim);
    integrate_box(
        |x| g.eval(x) * h.eval(x),
        &bump.lo,
        &bump.hi,
        BoxWeight::Gaussian,
        panels,
        order,
    )
}

/// Residuals of the weak-derivative pairing for one axis.
#[derive(Debug, Clone)]
pub struct WeakDerivativeReport {
    /// `|E[d_i f phi] - E[f (x_i phi - d_i phi)]|` per bump.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
}

/// Verify the weak-derivative identity `<d_i f, phi> = <f, delta_i phi>`
/// (with `delta_i phi = x_i phi - d_i phi`, the Gaussian adjoint of the
/// partial derivative) over a family of compactly supported bumps.
pub fn weak_derivative_check(
    f: &RandomField,
    axis: usize,
    bumps: &[Bump],
) -> Result<WeakDerivativeReport> {
    let dim = f.dim();
    if axis >= dim {
        return Err(Error::InvalidArgument(format!(
            "axis {axis} out of range for dimension {dim}"
        )));
    }
    let df = f.gradient()?.swap_remove(axis);
    let mut residuals = Vec::with_capacity(bumps.len());
    for bump in bumps {
        if bump.lo.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: bump.lo.len() });
        }
        let xi = RandomField::coordinate(dim, axis)?;
        let dphi = bump.field.gradient()?.swap_remove(axis);
        let delta_phi = xi.product(&bump.field)?.sub(&dphi)?;
        let lhs = box_pairing(bump, &df, &bump.field)?;
        let rhs = box_pairing(bump, f, &delta_phi)?;
        residuals.push((lhs - rhs).abs());
    }
    let max_residual = residuals.iter().cloned().fold(0.0, f64::max);
    Ok(WeakDerivativeReport { residuals, max_residual })
}

/// Translation-increment diagnostics at one step size.
#[derive(Debug, Clone)]
pub struct IncrementReport {
    pub alpha: f64,
    pub t: f64,
    /// `L^alpha` norm of `(tau_{-th} f - f - t grad f . h) -
    /// t int_0^1 (tau_{-sth} grad f - grad f) . h ds`, the fundamental
    /// theorem of calculus along the shift; near zero for fields with
    /// honest gradients.
    pub identity_gap: f64,
    /// The same gap with the inner quadrature order doubled; doubling
    /// must not change the verdict.
    pub identity_gap_refined: f64,
    /// First-order remainder `|tau_{-th} f - f - t grad f . h|_alpha`.
    pub remainder: f64,
    /// The remainder at `t/2`.
    pub remainder_half: f64,
    /// `remainder_half / remainder` (0 when the remainder vanishes).
    pub ratio: f64,
    /// Superlinear decay certificate: `ratio <= 0.6`.
    pub superlinear: bool,
}

/// `L^alpha(gamma)` norm of a field. Uses a fixed high-order rule: the
/// increment fields below are differences that can cancel to rounding
/// noise, and level-refinement divergence heuristics must not fire on
/// noise-level masses.
fn lebesgue_norm(
    f: &RandomField,
    alpha: f64,
    integrator: &GaussianIntegrator,
) -> Result<f64> {
    let fixed = integrator.without_ladder().with_order_at_least(96);
    let moment = fixed
        .expect_with(f, |v| v.abs().powf(alpha))?
        .finite_or(Error::DivergentMoment { order: alpha as usize })?;
    Ok(moment.max(0.0).powf(1.0 / alpha))
}

/// The first-order translation remainder `tau_{-th} f - f - t grad f . h`
/// as a field.
fn increment_remainder(f: &RandomField, h: &[f64], t: f64) -> Result<RandomField> {
    let grads = f.gradient()?;
    let shift: Vec<f64> = h.iter().map(|&hi| -t * hi).collect();
    let mut terms: Vec<(f64, RandomField)> = vec![(1.0, f.translate(&shift)?), (-1.0, f.clone())];
    for (i, g) in grads.into_iter().enumerate() {
        terms.push((-t * h[i], g));
    }
    RandomField::affine(&terms, 0.0)
}

/// `tau_{-th} f - f - t int_0^1 tau_{-sth} grad f . h ds` with the inner
/// integral replaced by an `order`-point Gauss-Legendre rule in `s`.
fn increment_identity_gap(
    f: &RandomField,
    h: &[f64],
    t: f64,
    order: usize,
) -> Result<RandomField> {
    let grads = f.gradient()?;
    let shift: Vec<f64> = h.iter().map(|&hi| -t * hi).collect();
    let mut terms: Vec<(f64, RandomField)> = vec![(1.0, f.translate(&shift)?), (-1.0, f.clone())];
    for (node, weight) in gauss_legendre(order) {
        let s = 0.5 * (node + 1.0);
        let w = 0.5 * weight;
        let inner_shift: Vec<f64> = h.iter().map(|&hi| -s * t * hi).collect();
        for (i, g) in grads.iter().enumerate() {
            terms.push((-t * w * h[i], g.translate(&inner_shift)?));
        }
    }
    RandomField::affine(&terms, 0.0)
}

/// Check the translation-increment identity and the `o(t)` decay of the
/// first-order remainder in `L^alpha(gamma)`, by step-halving.
pub fn translation_increment_check(
    f: &RandomField,
    h: &[f64],
    t: f64,
    alpha: f64,
    integrator: &GaussianIntegrator,
) -> Result<IncrementReport> {
    if h.len() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: h.len() });
    }
    if !(t > 0.0) {
        return Err(Error::InvalidArgument("step t must be positive".into()));
    }
    if !(alpha >= 1.0) {
        return Err(Error::InvalidArgument("exponent alpha must be at least 1".into()));
    }
    let identity_gap = lebesgue_norm(&increment_identity_gap(f, h, t, 16)?, alpha, integrator)?;
    let identity_gap_refined =
        lebesgue_norm(&increment_identity_gap(f, h, t, 32)?, alpha, integrator)?;
    let remainder = lebesgue_norm(&increment_remainder(f, h, t)?, alpha, integrator)?;
    let remainder_half =
        lebesgue_norm(&increment_remainder(f, h, t / 2.0)?, alpha, integrator)?;
    let scale = 1.0 + lebesgue_norm(f, alpha, integrator)?;
    let (ratio, superlinear) = if remainder <= 1e-13 * scale {
        (0.0, true)
    } else {
        let r = remainder_half / remainder;
        (r, r <= 0.6)
    };
    Ok(IncrementReport {
        alpha,
        t,
        identity_gap,
        identity_gap_refined,
        remainder,
        remainder_half,
        ratio,
        superlinear,
    })
}

/// Membership of a Lipschitz post-composition with its chain-rule check.
#[derive(Debug, Clone)]
pub struct ChainReport {
    /// Bound on the derivative of the outer function.
    pub lipschitz_constant: f64,
    /// Sobolev report of the composite `G(f)`.
    pub composite: SobolevReport,
    /// Max over axes and bumps of
    /// `|E[G(f) delta_i phi] - E[G'(f) d_i f phi]|`: the weak derivative
    /// of the composite is the chain-rule candidate.
    pub chain_residual: f64,
}

/// Post-compose `f` with an activation of bounded derivative and verify
/// the weak chain rule against the bump presets. Activations without a
/// finite Lipschitz constant are rejected.
pub fn lipschitz_composition(
    activation: Activation,
    f: &RandomField,
    bumps: &[Bump],
    integrator: &GaussianIntegrator,
) -> Result<ChainReport> {
    let lipschitz_constant = activation
        .lipschitz_constant()
        .ok_or_else(|| Error::NotLipschitz(activation.name()))?;
    let composite_field = f.compose(activation);
    let composite = sobolev_membership(&composite_field, integrator)?;
    let mut chain_residual = 0.0f64;
    for axis in 0..f.dim() {
        let report = weak_derivative_check(&composite_field, axis, bumps)?;
        chain_residual = chain_residual.max(report.max_residual);
    }
    Ok(ChainReport { lipschitz_constant, composite, chain_residual })
}

/// Assemble the field `sum_i a_i G(sum_j w_ij f_j - b_i)` of a one-layer
/// network and report its membership. Requires a Lipschitz activation
/// and member-grade inputs (verdicts propagate through the report).
pub fn neuron(
    weights: &[Vec<f64>],
    biases: &[f64],
    amplitudes: &[f64],
    activation: Activation,
    inputs: &[RandomField],
    integrator: &GaussianIntegrator,
) -> Result<(RandomField, SobolevReport)> {
    if activation.lipschitz_constant().is_none() {
        return Err(Error::NotLipschitz(activation.name()));
    }
    if inputs.is_empty() {
        return Err(Error::InvalidArgument("a neuron needs at least one input field".into()));
    }
    let units = weights.len();
    if biases.len() != units {
        return Err(Error::DimensionMismatch { expected: units, got: biases.len() });
    }
    if amplitudes.len() != units {
        return Err(Error::DimensionMismatch { expected: units, got: amplitudes.len() });
    }
    let dim = inputs[0].dim();
    for f in inputs {
        if f.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: f.dim() });
        }
    }
    let mut unit_terms: Vec<(f64, RandomField)> = Vec::with_capacity(units);
    for i in 0..units {
        if weights[i].len() != inputs.len() {
            return Err(Error::DimensionMismatch {
                expected: inputs.len(),
                got: weights[i].len(),
            });
        }
        let terms: Vec<(f64, RandomField)> =
            weights[i].iter().cloned().zip(inputs.iter().cloned()).collect();
        let pre = RandomField::affine(&terms, -biases[i])?;
        unit_terms.push((amplitudes[i], pre.compose(activation)));
    }
    let field = RandomField::affine(&unit_terms, 0.0)?;
    let report = sobolev_membership(&field, integrator)?;
    Ok((field, report))
}

/// Both sides of the local moment bound on a centered ball.
#[derive(Debug, Clone, Copy)]
pub struct EmbeddingReport {
    /// `int_{|x| <= rho} |f|^{2k} dx` (Lebesgue measure).
    pub lhs: f64,
    /// `(2 pi)^{n/2} (2k)! e^{rho^2 / 2}` times the `cosh - 1` gauge.
    pub rhs: f64,
    /// The gauge entering the right side.
    pub norm: f64,
    pub pass: bool,
}

/// Check the local `L^{2k}` embedding: the `2k`-th Lebesgue moment of `f`
/// over the ball of radius `rho` is controlled by the global Orlicz
/// gauge.
pub fn local_embedding_bound(
    f: &RandomField,
    rho: f64,
    k: usize,
    integrator: &GaussianIntegrator,
) -> Result<EmbeddingReport> {
    if !(rho > 0.0) {
        return Err(Error::InvalidArgument("radius must be positive".into()));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("moment order k must be at least 1".into()));
    }
    let dim = f.dim();
    let norm = luxemburg_norm(f, &YoungFunction::cosh2(), integrator)?.value;
    let power = 2 * k as i32;
    let lo = vec![-rho; dim];
    let hi = vec![rho; dim];
    let (panels, order) = box_resolution(dim);
    let lhs = if dim == 1 {
        integrate_box(
            |x| f.eval(x).abs().powi(power),
            &lo,
            &hi,
            BoxWeight::Lebesgue,
            panels.max(24),
            order,
        )?
    } else {
        let r2 = rho * rho;
        integrate_box(
            |x| {
                if x.iter().map(|v| v * v).sum::<f64>() <= r2 {
                    f.eval(x).abs().powi(power)
                } else {
                    0.0
                }
            },
            &lo,
            &hi,
            BoxWeight::Lebesgue,
            panels * 2,
            order,
        )?
    };
    let two_k_factorial: f64 = (1..=2 * k).map(|i| i as f64).product();
    let rhs = (2.0 * std::f64::consts::PI).powf(dim as f64 / 2.0)
        * two_k_factorial
        * (rho * rho / 2.0).exp()
        * norm;
    Ok(EmbeddingReport { lhs, rhs, norm, pass: lhs <= rhs * (1.0 + 1e-9) })
}

/// Oscillation of `f` over shrinking balls around `x0`: a smoke check
/// that the field admits a continuous representative, probing the max
/// minus min over deterministic directions at each radius. Decreasing
/// oscillation is evidence, not proof.
pub fn continuity_probe(f: &RandomField, x0: &[f64], radii: &[f64]) -> Result<Vec<f64>> {
    let dim = f.dim();
    if x0.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: x0.len() });
    }
    let mut directions: Vec<Vec<f64>> = Vec::new();
    for axis in 0..dim {
        for sign in [-1.0, 1.0] {
            let mut d = vec![0.0; dim];
            d[axis] = sign;
            directions.push(d);
        }
    }
    let diag = 1.0 / (dim as f64).sqrt();
    directions.push(vec![diag; dim]);
    directions.push(vec![-diag; dim]);
    let mut oscillation = Vec::with_capacity(radii.len());
    for &r in radii {
        if !(r > 0.0) {
            return Err(Error::InvalidArgument("radii must be positive".into()));
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for d in &directions {
            let x: Vec<f64> = x0.iter().zip(d).map(|(&c, &di)| c + r * di).collect();
            let v = f.eval(&x);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        let center = f.eval(x0);
        oscillation.push(hi.max(center) - lo.min(center));
    }
    Ok(oscillation)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn integrator() -> GaussianIntegrator {
        GaussianIntegrator::default_for_dim(1)
    }

    #[test]
    fn membership_for_low_degree_polynomials() {
        let quad = integrator();
        for text in ["1.5", "x", "x^2", "0.5*x^2 - x + 2"] {
            let f = RandomField::parse(1, text).unwrap();
            let report = sobolev_membership(&f, &quad).unwrap();
            assert!(report.member, "{text} should be a member: {report:?}");
            let total = report.total.unwrap();
            assert!(total.is_finite() && total >= 0.0);
        }
    }

    #[test]
    fn membership_components_match_closed_forms() {
        let quad = integrator();
        let f = RandomField::coordinate(1, 0).unwrap();
        let report = sobolev_membership(&f, &quad).unwrap();
        // Gauge of x under cosh - 1 is 1/sqrt(2 ln 2); gauge of the
        // constant derivative 1 under squared(cosh - 1) solves
        // cosh(1/rho^2) = 2.
        let f_norm = report.f_norm.unwrap();
        assert!((f_norm - 0.849_321_800_288_019).abs() < 1e-9, "{f_norm}");
        let g_norm = report.grad_norms[0].unwrap();
        let want = (1.0 / 2f64.acosh()).sqrt();
        assert!((g_norm - want).abs() < 1e-9, "{g_norm} vs {want}");
        assert!((report.total.unwrap() - (f_norm + g_norm)).abs() < 1e-14);
    }

    #[test]
    fn membership_failure_is_a_verdict_not_an_error() {
        let quad = integrator();
        let f = RandomField::parse(1, "exp(x^2)").unwrap();
        let report = sobolev_membership(&f, &quad).unwrap();
        assert!(!report.member);
        assert!(report.f_norm.is_none());
        assert!(report.total.is_none());
        // A field with no symbolic gradient is a hard error instead.
        let kink = RandomField::coordinate(1, 0).unwrap().compose(Activation::Step);
        assert!(matches!(sobolev_membership(&kink, &quad), Err(Error::MissingGradient)));
    }

    #[test]
    fn sobolev_total_is_homogeneous_and_subadditive() {
        let quad = integrator();
        let f = RandomField::coordinate(1, 0).unwrap();
        let g = RandomField::parse(1, "(x^2 - 1) / 2").unwrap();
        let nf = sobolev_membership(&f, &quad).unwrap().total.unwrap();
        let ng = sobolev_membership(&g, &quad).unwrap().total.unwrap();
        let sum_field = f.add(&g).unwrap();
        let nsum = sobolev_membership(&sum_field, &quad).unwrap().total.unwrap();
        assert!(nsum <= (nf + ng) * (1.0 + 1e-6), "{nsum} vs {nf} + {ng}");
        for c in [0.5f64, 2.0, -3.0] {
            let scaled = sobolev_membership(&f.scale(c), &quad).unwrap().total.unwrap();
            assert!(
                (scaled - c.abs() * nf).abs() < 1e-6 * nf.max(1.0),
                "c={c}: {scaled} vs {}",
                c.abs() * nf
            );
        }
    }

    #[test]
    fn weak_derivative_identity_for_smooth_and_kinked_fields() {
        let bumps = bump_presets(1).unwrap();
        let square = RandomField::parse(1, "x^2").unwrap();
        let report = weak_derivative_check(&square, 0, &bumps).unwrap();
        assert!(report.max_residual < 1e-6, "{}", report.max_residual);
        let constant = RandomField::constant(1, 3.0);
        let report = weak_derivative_check(&constant, 0, &bumps).unwrap();
        assert!(report.max_residual < 1e-9, "{}", report.max_residual);
        // |x| has the weak derivative sign(x).
        let vee = RandomField::coordinate(1, 0).unwrap().abs();
        let report = weak_derivative_check(&vee, 0, &bumps).unwrap();
        assert!(report.max_residual < 1e-6, "{}", report.max_residual);
    }

    #[test]
    fn weak_derivative_identity_in_two_dimensions() {
        let bumps = bump_presets(2).unwrap();
        let f = RandomField::parse(2, "x0 * x1 + x0^2").unwrap();
        for axis in 0..2 {
            let report = weak_derivative_check(&f, axis, &bumps).unwrap();
            assert!(report.max_residual < 1e-6, "axis {axis}: {}", report.max_residual);
        }
    }

    #[test]
    fn translation_increment_is_exact_for_linear_fields() {
        let quad = integrator();
        let f = RandomField::parse(1, "3 * x - 1").unwrap();
        let report = translation_increment_check(&f, &[1.0], 0.25, 2.0, &quad).unwrap();
        assert!(report.remainder < 1e-12, "{}", report.remainder);
        assert!(report.identity_gap < 1e-12);
        assert!(report.superlinear);
    }

    #[test]
    fn translation_increment_of_the_square_is_one_order_down() {
        let quad = integrator();
        let f = RandomField::parse(1, "x^2").unwrap();
        let t = 0.2;
        let report = translation_increment_check(&f, &[1.0], t, 2.0, &quad).unwrap();
        // tau_{-t} f - f - t f' = t^2 exactly, constant in x.
        assert!((report.remainder - t * t).abs() < 1e-10, "{}", report.remainder);
        assert!((report.ratio - 0.25).abs() < 1e-6, "{}", report.ratio);
        assert!(report.superlinear);
        assert!(report.identity_gap < 1e-10);
    }

    #[test]
    fn increment_remainder_decays_superlinearly_for_the_cubic() {
        let quad = integrator();
        let f = RandomField::parse(1, "(x^3 - 3 * x) / 6").unwrap();
        for alpha in [2.0, 4.0, 8.0] {
            let report = translation_increment_check(&f, &[1.0], 0.2, alpha, &quad).unwrap();
            assert!(
                report.superlinear,
                "alpha={alpha}: ratio {} remainder {}",
                report.ratio,
                report.remainder
            );
            assert!(report.ratio <= 0.6);
            // The fundamental-theorem identity holds and is stable under
            // refining the inner rule.
            assert!(report.identity_gap < 1e-9, "{}", report.identity_gap);
            assert!(report.identity_gap_refined < 1e-9);
        }
    }

    #[test]
    fn lipschitz_composition_chain_rule() {
        let quad = integrator();
        let bumps = bump_presets(1).unwrap();
        let f = RandomField::coordinate(1, 0).unwrap();
        for activation in [Activation::Identity, Activation::Relu, Activation::Tanh] {
            let report = lipschitz_composition(activation, &f, &bumps, &quad).unwrap();
            assert!(report.composite.member, "{activation:?}");
            assert!(report.chain_residual < 1e-6, "{activation:?}: {}", report.chain_residual);
        }
        // Unbounded derivative is rejected.
        assert!(matches!(
            lipschitz_composition(Activation::Exp, &f, &bumps, &quad),
            Err(Error::NotLipschitz(_))
        ));
    }

    #[test]
    fn identity_composition_reproduces_the_plain_report() {
        let quad = integrator();
        let bumps = bump_presets(1).unwrap();
        let f = RandomField::parse(1, "x^2 - 1").unwrap();
        let plain = sobolev_membership(&f, &quad).unwrap();
        let wrapped = lipschitz_composition(Activation::Identity, &f, &bumps, &quad).unwrap();
        assert_eq!(plain.member, wrapped.composite.member);
        let a = plain.total.unwrap();
        let b = wrapped.composite.total.unwrap();
        assert!((a - b).abs() < 1e-9 * a);
    }

    #[test]
    fn min_and_max_of_members_are_members() {
        let quad = integrator();
        let f = RandomField::coordinate(1, 0).unwrap();
        let g = RandomField::parse(1, "(x^2 - 1) / 2").unwrap();
        let min_field = RandomField::min(&f, &g).unwrap();
        let max_field = RandomField::max(&f, &g).unwrap();
        assert!(sobolev_membership(&min_field, &quad).unwrap().member);
        assert!(sobolev_membership(&max_field, &quad).unwrap().member);
    }

    #[test]
    fn lipschitz_probe_at_sample_points() {
        for activation in [
            Activation::Relu,
            Activation::Tanh,
            Activation::Sigmoid,
            Activation::Softplus,
            Activation::Clip { lo: -1.0, hi: 1.0 },
        ] {
            let k = activation.lipschitz_constant().unwrap();
            for x in [-2.0f64, -0.5, 0.0, 0.3, 1.7] {
                for h in [1e-3f64, 0.1, 0.8] {
                    let gap = (activation.value(x - h) - activation.value(x)).abs();
                    assert!(
                        gap <= k * h * (1.0 + 1e-12),
                        "{activation:?} at {x} with step {h}: {gap} vs {}",
                        k * h
                    );
                }
            }
        }
    }

    #[test]
    fn neuron_fields_are_members() {
        let quad = integrator();
        let x = RandomField::coordinate(1, 0).unwrap();
        let h2 = RandomField::parse(1, "(x^2 - 1) / 2").unwrap();
        // Single identity unit: an affine field.
        let (field, report) =
            neuron(&[vec![1.0]], &[0.5], &[2.0], Activation::Identity, &[x.clone()], &quad)
                .unwrap();
        assert!(report.member);
        assert!((field.eval(&[1.0]) - 1.0).abs() < 1e-15);
        // Two rectifier units on two member inputs.
        let (_, report) = neuron(
            &[vec![1.0, -0.5], vec![0.3, 1.2]],
            &[0.1, -0.4],
            &[1.0, -2.0],
            Activation::Relu,
            &[x.clone(), h2],
            &quad,
        )
        .unwrap();
        assert!(report.member);
        // Zero amplitudes produce the zero field.
        let (field, report) =
            neuron(&[vec![1.0]], &[0.0], &[0.0], Activation::Relu, &[x], &quad).unwrap();
        assert!(report.member);
        assert_eq!(report.total.unwrap(), 0.0);
        assert_eq!(field.eval(&[2.0]), 0.0);
    }

    #[test]
    fn local_embedding_bound_closed_form_case() {
        let quad = integrator();
        let f = RandomField::coordinate(1, 0).unwrap();
        let report = local_embedding_bound(&f, 1.0, 1, &quad).unwrap();
        assert!((report.lhs - 2.0 / 3.0).abs() < 1e-10, "{}", report.lhs);
        let want_rhs = (2.0 * std::f64::consts::PI).sqrt()
            * 2.0
            * 0.5f64.exp()
            * 0.849_321_800_288_019;
        assert!((report.rhs - want_rhs).abs() < 1e-6, "{} vs {want_rhs}", report.rhs);
        assert!(report.pass);
        // Zero field: 0 <= 0.
        let zero = RandomField::constant(1, 0.0);
        let report = local_embedding_bound(&zero, 1.0, 1, &quad).unwrap();
        assert!(report.lhs.abs() < 1e-15 && report.pass);
    }

    #[test]
    fn local_embedding_bound_higher_moment() {
        let quad = integrator();
        let f = RandomField::parse(1, "x^2").unwrap();
        let report = local_embedding_bound(&f, 2.0, 2, &quad).unwrap();
        // lhs = int_{-2}^{2} x^8 dx = 2 * 2^9 / 9.
        assert!((report.lhs - 1024.0 / 9.0).abs() < 1e-8, "{}", report.lhs);
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn membership_verdicts_are_stable_under_equivalent_densities() {
        let quad = integrator();
        let density = RandomField::parse(1, "exp(0.3 * x - 0.045)").unwrap();
        for text in ["x", "x^2", "0.5*x^2 - x + 2"] {
            let f = RandomField::parse(1, text).unwrap();
            let plain = sobolev_membership(&f, &quad).unwrap();
            let moved = sobolev_membership_weighted(&f, &quad, &density).unwrap();
            assert_eq!(plain.member, moved.member, "{text}");
            let ratio = moved.total.unwrap() / plain.total.unwrap();
            assert!(ratio > 1.0 / 3.0 && ratio < 3.0, "{text}: ratio {ratio}");
        }
        let f = RandomField::parse(1, "exp(x^2)").unwrap();
        let plain = sobolev_membership(&f, &quad).unwrap();
        let moved = sobolev_membership_weighted(&f, &quad, &density).unwrap();
        assert!(!plain.member && !moved.member);
    }

    #[test]
    fn continuity_smoke_check_shrinks_oscillation() {
        let f = RandomField::parse(1, "tanh(3 * x)").unwrap();
        let osc = continuity_probe(&f, &[0.2], &[0.8, 0.4, 0.2, 0.1, 0.05]).unwrap();
        for pair in osc.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-12, "{osc:?}");
        }
        assert!(*osc.last().unwrap() < 0.4);
    }
}
