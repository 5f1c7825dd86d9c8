//! The exponential manifold over the standard Gaussian.
//!
//! Points are densities `p = exp(u - K(u))` with `u` a centered random
//! field whose exponential moment is finite; `K(u) = log E[e^u]` is the
//! normalizer. This module provides the chart between densities and
//! centered statistics, normalizers relative to a moved base point,
//! finite-dimensional exponential families with their Fisher information
//! (computed along two independent routes), the Hyvarinen divergence, the
//! Otto (weighted Dirichlet) inner product with its integration-by-parts
//! adjoint, a log-Sobolev defect check, and the isometry onto the
//! Hilbert-sphere picture `P = 2 sqrt(p)`.
//!
//! Domain verdicts are first-class: statistics whose exponential moment
//! diverges yield [`Error::OutsideDomain`] (detected by the integrator's
//! divergence guard), uncentered statistics yield [`Error::NotCentered`],
//! and densities that fail positivity probes yield
//! [`Error::NonpositiveDensity`]. Centering is never performed silently:
//! [`ExpModelPoint::new`] rejects, [`ExpModelPoint::new_centered`]
//! subtracts the mean by contract.

use crate::error::{Error, Result};
use crate::field::{Activation, RandomField};
use crate::measure::{gauss_hermite_rule, GaussianIntegrator};
use crate::oracle::{exact_portmanteau, FiniteSpace, PortmanteauReport};

/// Tolerance on `|E[u]|` (relative to `1 + E|u|`) for accepting a
/// statistic as centered.
pub const CENTERING_TOL: f64 = 1e-7;

/// Base step for the central-difference Hessian and derivative routes;
/// each difference is Richardson-extrapolated with the halved step.
pub const FD_STEP: f64 = 1e-3;

/// Tolerance on `|E[q] - 1|` when a field is presented as a density.
const MASS_TOL: f64 = 1e-6;

/// A point of the exponential manifold: a centered statistic together
/// with its normalizer, determining the density `exp(u - K)`.
#[derive(Debug, Clone)]
pub struct ExpModelPoint {
    u: RandomField,
    cumulant: f64,
}

impl ExpModelPoint {
    /// The reference measure itself: `u = 0`, `K = 0`.
    pub fn base(dim: usize) -> Self {
        ExpModelPoint { u: RandomField::constant(dim, 0.0), cumulant: 0.0 }
    }

    /// Build the point of a centered statistic. Fails with
    /// [`Error::OutsideDomain`] when `E[e^u]` diverges and with
    /// [`Error::NotCentered`] when `E[u]` is not zero; the domain check
    /// runs first, since it is the deeper obstruction.
    pub fn new(u: RandomField, integrator: &GaussianIntegrator) -> Result<Self> {
        let mgf = integrator.expect_with(&u, f64::exp)?.finite_or(Error::OutsideDomain)?;
        if !(mgf > 0.0) || !mgf.is_finite() {
            return Err(Error::OutsideDomain);
        }
        let mean = integrator.expect(&u)?.finite_or(Error::OutsideDomain)?;
        let scale = 1.0 + integrator.expect_with(&u, f64::abs)?.value().unwrap_or(0.0);
        if mean.abs() > CENTERING_TOL * scale {
            return Err(Error::NotCentered { mean });
        }
        Ok(ExpModelPoint { u, cumulant: mgf.ln() })
    }

    /// Build the point after explicitly re-centering the statistic:
    /// `u - E[u]` replaces `u`. The subtraction is part of this
    /// constructor's contract, never applied behind [`new`](Self::new).
    pub fn new_centered(u: RandomField, integrator: &GaussianIntegrator) -> Result<Self> {
        // Divergence of E[e^u] is checked before the mean so that fields
        // outside the domain report OutsideDomain rather than an
        // incidental centering failure.
        integrator.expect_with(&u, f64::exp)?.finite_or(Error::OutsideDomain)?;
        let mean = integrator.expect(&u)?.finite_or(Error::OutsideDomain)?;
        Self::new(u.add_constant(-mean), integrator)
    }

    /// The centered statistic `u`.
    pub fn statistic(&self) -> &RandomField {
        &self.u
    }

    /// The normalizer `K = log E[e^u]`.
    pub fn cumulant(&self) -> f64 {
        self.cumulant
    }

    pub fn dim(&self) -> usize {
        self.u.dim()
    }

    /// The density `exp(u - K)` as a field.
    pub fn density(&self) -> RandomField {
        self.u.add_constant(-self.cumulant).compose(Activation::Exp)
    }

    /// `log` of the density, `u - K`.
    pub fn log_density(&self) -> RandomField {
        self.u.add_constant(-self.cumulant)
    }

    /// `sqrt` of the density, `exp((u - K) / 2)`.
    pub fn sqrt_density(&self) -> RandomField {
        self.u.add_constant(-self.cumulant).scale(0.5).compose(Activation::Exp)
    }

    /// Expectation of `f` under this density: `E[f p]`.
    pub fn expect(&self, f: &RandomField, integrator: &GaussianIntegrator) -> Result<f64> {
        integrator
            .expect_weighted(f, |v| v, &self.density())?
            .finite_or(Error::OutsideDomain)
    }

    /// `f - E_p[f]`: the tangent-space representative of `f` at this
    /// point (tangent vectors are centered under the point they sit at).
    pub fn center(&self, f: &RandomField, integrator: &GaussianIntegrator) -> Result<RandomField> {
        let mean = self.expect(f, integrator)?;
        Ok(f.add_constant(-mean))
    }

    /// Numerically re-verify the defining invariants.
    pub fn check(&self, integrator: &GaussianIntegrator) -> Result<PointCheck> {
        let statistic_mean = integrator.expect(&self.u)?.finite_or(Error::OutsideDomain)?;
        let density_mass = integrator
            .expect_with(&self.log_density(), f64::exp)?
            .finite_or(Error::OutsideDomain)?;
        Ok(PointCheck { statistic_mean, density_mass })
    }
}

/// The two defining invariants of a model point, re-measured.
#[derive(Debug, Clone, Copy)]
pub struct PointCheck {
    /// `E[u]`, which must be ~0.
    pub statistic_mean: f64,
    /// `E[exp(u - K)]`, which must be ~1.
    pub density_mass: f64,
}

/// The normalizer of a centered statistic, `K(u) = log E[e^u]`.
///
/// Divergent exponential moments give [`Error::OutsideDomain`],
/// uncentered inputs [`Error::NotCentered`] (domain is checked first).
pub fn cumulant(u: &RandomField, integrator: &GaussianIntegrator) -> Result<f64> {
    Ok(ExpModelPoint::new(u.clone(), integrator)?.cumulant)
}

/// Like [`cumulant`], but re-centers `u - E[u]` first (explicitly, by
/// contract of the name).
pub fn cumulant_centered(u: &RandomField, integrator: &GaussianIntegrator) -> Result<f64> {
    Ok(ExpModelPoint::new_centered(u.clone(), integrator)?.cumulant)
}

/// Deterministic probe grid used for positivity and sup-norm checks:
/// the tensor Gauss-Hermite grid of order 9 plus the origin.
fn probe_grid(dim: usize) -> Vec<Vec<f64>> {
    let nodes: Vec<f64> = gauss_hermite_rule(9).iter().map(|&(x, _)| x).collect();
    let mut grid = vec![vec![0.0; dim]];
    let mut index = vec![0usize; dim];
    loop {
        grid.push(index.iter().map(|&i| nodes[i]).collect());
        let mut axis = 0;
        loop {
            if axis == dim {
                return grid;
            }
            index[axis] += 1;
            if index[axis] < nodes.len() {
                break;
            }
            index[axis] = 0;
            axis += 1;
        }
    }
}

/// Largest absolute difference of two fields over the probe grid.
pub fn sup_gap(f: &RandomField, g: &RandomField) -> f64 {
    probe_grid(f.dim())
        .iter()
        .map(|x| (f.eval(x) - g.eval(x)).abs())
        .fold(0.0, f64::max)
}

/// The chart: recover the model point of a strictly positive normalized
/// density, `u = log q - E[log q]`, `K = -E[log q]`.
///
/// Positivity is probed on a deterministic grid
/// ([`Error::NonpositiveDensity`] on failure) and the mass `E[q]` must be
/// 1 within 1e-6.
pub fn chart(density: &RandomField, integrator: &GaussianIntegrator) -> Result<ExpModelPoint> {
    for x in probe_grid(density.dim()) {
        let v = density.eval(&x);
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::NonpositiveDensity { at: x, value: v });
        }
    }
    let mass = integrator.expect(density)?.finite_or(Error::OutsideDomain)?;
    if (mass - 1.0).abs() > MASS_TOL {
        return Err(Error::InvalidArgument(format!(
            "density must integrate to 1, got mass {mass:.12}"
        )));
    }
    let log_q = density.compose(Activation::Log);
    let mean = integrator.expect(&log_q)?.finite_or(Error::OutsideDomain)?;
    ExpModelPoint::new(log_q.add_constant(-mean), integrator)
}

/// The normalizer of `v` relative to the moved base point `p`:
/// `K_p(v) = log E_p[e^v] = K(u_p + v) - K(u_p)`.
///
/// `v` must be centered under `p` (not under the reference measure).
pub fn relative_cumulant(
    p: &ExpModelPoint,
    v: &RandomField,
    integrator: &GaussianIntegrator,
) -> Result<f64> {
    let mean = p.expect(v, integrator)?;
    let scale = 1.0 + integrator
        .expect_weighted(v, f64::abs, &p.density())?
        .value()
        .unwrap_or(0.0);
    if mean.abs() > CENTERING_TOL * scale {
        return Err(Error::NotCentered { mean });
    }
    let combined = p.statistic().add(v)?;
    let mgf = integrator
        .expect_with(&combined, f64::exp)?
        .finite_or(Error::OutsideDomain)?;
    Ok(mgf.ln() - p.cumulant())
}

/// A finite-dimensional exponential family `theta -> exp(sum_i theta_i
/// u_i - kappa(theta))` spanned by centered statistics.
#[derive(Debug, Clone)]
pub struct ExpFamily {
    stats: Vec<RandomField>,
}

impl ExpFamily {
    /// Validates that the statistics are nonempty, share one dimension,
    /// and are centered.
    pub fn new(stats: Vec<RandomField>, integrator: &GaussianIntegrator) -> Result<Self> {
        if stats.is_empty() {
            return Err(Error::InvalidArgument(
                "an exponential family needs at least one statistic".into(),
            ));
        }
        let dim = stats[0].dim();
        for s in &stats {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: s.dim() });
            }
            let mean = integrator.expect(s)?.finite_or(Error::OutsideDomain)?;
            let scale = 1.0 + integrator.expect_with(s, f64::abs)?.value().unwrap_or(0.0);
            if mean.abs() > CENTERING_TOL * scale {
                return Err(Error::NotCentered { mean });
            }
        }
        Ok(ExpFamily { stats })
    }

    /// Number of parameters.
    pub fn params(&self) -> usize {
        self.stats.len()
    }

    pub fn dim(&self) -> usize {
        self.stats[0].dim()
    }

    pub fn stats(&self) -> &[RandomField] {
        &self.stats
    }

    /// The combined statistic `sum_i theta_i u_i`.
    pub fn combine(&self, theta: &[f64]) -> Result<RandomField> {
        if theta.len() != self.stats.len() {
            return Err(Error::DimensionMismatch {
                expected: self.stats.len(),
                got: theta.len(),
            });
        }
        let terms: Vec<(f64, RandomField)> =
            theta.iter().cloned().zip(self.stats.iter().cloned()).collect();
        RandomField::affine(&terms, 0.0)
    }

    /// `kappa(theta) = log E[exp(sum theta_i u_i)]`.
    pub fn cumulant(&self, theta: &[f64], integrator: &GaussianIntegrator) -> Result<f64> {
        let combined = self.combine(theta)?;
        let mgf = integrator
            .expect_with(&combined, f64::exp)?
            .finite_or(Error::OutsideDomain)?;
        Ok(mgf.ln())
    }

    /// The model point at `theta`.
    pub fn point(&self, theta: &[f64], integrator: &GaussianIntegrator) -> Result<ExpModelPoint> {
        ExpModelPoint::new(self.combine(theta)?, integrator)
    }
}

/// Cumulant, gradient, and Fisher information of an exponential family at
/// a parameter, with the information matrix computed along two
/// independent routes.
#[derive(Debug, Clone)]
pub struct FisherReport {
    /// `kappa(theta)`.
    pub cumulant: f64,
    /// `grad_i kappa = E_{p(theta)}[u_i]`.
    pub grad: Vec<f64>,
    /// Score-covariance route: `E_p[(u_i - m_i)(u_j - m_j)]`.
    pub covariance: Vec<Vec<f64>>,
    /// Finite-difference route: Richardson-extrapolated central
    /// differences of `kappa` with base step [`FD_STEP`].
    pub hessian: Vec<Vec<f64>>,
    /// Largest entrywise gap between the two routes.
    pub max_difference: f64,
}

/// Evaluate `kappa` at a shifted parameter, propagating domain exits.
fn kappa_at(family: &ExpFamily, theta: &[f64], integrator: &GaussianIntegrator) -> Result<f64> {
    family.cumulant(theta, integrator)
}

/// Compute `kappa(theta)`, its gradient, and the Fisher information
/// matrix both as a score covariance and as a finite-difference Hessian
/// of `kappa`.
pub fn cumulant_and_fisher(
    family: &ExpFamily,
    theta: &[f64],
    integrator: &GaussianIntegrator,
) -> Result<FisherReport> {
    let d = family.params();
    if theta.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: theta.len() });
    }
    let point = family.point(theta, integrator)?;
    let density = point.density();
    let kappa0 = point.cumulant();

    let mut grad = vec![0.0; d];
    for i in 0..d {
        grad[i] = integrator
            .expect_weighted(&family.stats[i], |v| v, &density)?
            .finite_or(Error::OutsideDomain)?;
    }

    // Route 1: centered second moments of the scores.
    let mut covariance = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..=i {
            let prod = family.stats[i].product(&family.stats[j])?;
            let raw = integrator
                .expect_weighted(&prod, |v| v, &density)?
                .finite_or(Error::OutsideDomain)?;
            let c = raw - grad[i] * grad[j];
            covariance[i][j] = c;
            covariance[j][i] = c;
        }
    }

    // Route 2: Richardson-extrapolated central differences of kappa.
    let shifted = |deltas: &[(usize, f64)]| -> Result<f64> {
        let mut t = theta.to_vec();
        for &(axis, delta) in deltas {
            t[axis] += delta;
        }
        kappa_at(family, &t, integrator)
    };
    let mut hessian = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..=i {
            let second = |h: f64| -> Result<f64> {
                if i == j {
                    let plus = shifted(&[(i, h)])?;
                    let minus = shifted(&[(i, -h)])?;
                    Ok((plus - 2.0 * kappa0 + minus) / (h * h))
                } else {
                    let pp = shifted(&[(i, h), (j, h)])?;
                    let pm = shifted(&[(i, h), (j, -h)])?;
                    let mp = shifted(&[(i, -h), (j, h)])?;
                    let mm = shifted(&[(i, -h), (j, -h)])?;
                    Ok((pp - pm - mp + mm) / (4.0 * h * h))
                }
            };
            let coarse = second(FD_STEP)?;
            let fine = second(FD_STEP / 2.0)?;
            let value = (4.0 * fine - coarse) / 3.0;
            hessian[i][j] = value;
            hessian[j][i] = value;
        }
    }

    let mut max_difference = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            max_difference = max_difference.max((covariance[i][j] - hessian[i][j]).abs());
        }
    }
    Ok(FisherReport { cumulant: kappa0, grad, covariance, hessian, max_difference })
}

/// Two routes to `d/d theta_i E_{p(theta)}[f]`.
#[derive(Debug, Clone)]
pub struct DerivativeCheck {
    /// `E_{p(theta)}[f]` at the given parameter.
    pub expectation: f64,
    /// Richardson central differences of `theta_i -> E_{p(theta)}[f]`.
    pub finite_difference: Vec<f64>,
    /// `Cov_{p(theta)}(f, u_i)`.
    pub covariance: Vec<f64>,
    /// Largest per-axis gap.
    pub max_residual: f64,
}

/// Check that moving the parameter differentiates under the expectation:
/// the numeric derivative of `theta -> E_{p(theta)}[f]` must match the
/// covariance of `f` with the corresponding score.
pub fn expectation_derivative_check(
    family: &ExpFamily,
    theta: &[f64],
    f: &RandomField,
    integrator: &GaussianIntegrator,
) -> Result<DerivativeCheck> {
    let d = family.params();
    if theta.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: theta.len() });
    }
    let mean_at = |t: &[f64]| -> Result<f64> {
        let point = family.point(t, integrator)?;
        point.expect(f, integrator)
    };
    let point = family.point(theta, integrator)?;
    let density = point.density();
    let expectation = point.expect(f, integrator)?;

    let mut finite_difference = vec![0.0; d];
    let mut covariance = vec![0.0; d];
    let mut max_residual = 0.0f64;
    for i in 0..d {
        let central = |h: f64| -> Result<f64> {
            let mut plus = theta.to_vec();
            plus[i] += h;
            let mut minus = theta.to_vec();
            minus[i] -= h;
            Ok((mean_at(&plus)? - mean_at(&minus)?) / (2.0 * h))
        };
        let coarse = central(FD_STEP)?;
        let fine = central(FD_STEP / 2.0)?;
        finite_difference[i] = (4.0 * fine - coarse) / 3.0;

        let prod = f.product(&family.stats[i])?;
        let raw = integrator
            .expect_weighted(&prod, |v| v, &density)?
            .finite_or(Error::OutsideDomain)?;
        let mean_u = integrator
            .expect_weighted(&family.stats[i], |v| v, &density)?
            .finite_or(Error::OutsideDomain)?;
        covariance[i] = raw - expectation * mean_u;
        max_residual = max_residual.max((finite_difference[i] - covariance[i]).abs());
    }
    Ok(DerivativeCheck { expectation, finite_difference, covariance, max_residual })
}

/// `sum_i (a_i - b_i)^2` as a field, for two gradients.
fn gradient_gap_squared(a: &[RandomField], b: &[RandomField]) -> Result<RandomField> {
    let mut terms: Vec<(f64, RandomField)> = Vec::with_capacity(a.len());
    for (ai, bi) in a.iter().zip(b) {
        let diff = ai.sub(bi)?;
        terms.push((1.0, diff.product(&diff)?));
    }
    RandomField::affine(&terms, 0.0)
}

/// The Hyvarinen divergence `DH(p | q) = (1/2) E[|grad log p - grad log
/// q|^2 p]`, which for model points is `(1/2) E_p[|grad u_p - grad
/// u_q|^2]`. Not symmetric in its arguments.
pub fn hyvarinen(
    p: &ExpModelPoint,
    q: &ExpModelPoint,
    integrator: &GaussianIntegrator,
) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: q.dim() });
    }
    let gp = p.statistic().gradient()?;
    let gq = q.statistic().gradient()?;
    let gap = gradient_gap_squared(&gp, &gq)?;
    Ok(0.5 * p.expect(&gap, integrator)?)
}

/// The Otto inner product `<f, g>_p = E[grad f . grad g  p]` of two
/// differentiable fields at a model point. Depends on `f, g` only through
/// their gradients, so representatives may be centered or not.
pub fn otto_inner(
    f: &RandomField,
    g: &RandomField,
    p: &ExpModelPoint,
    integrator: &GaussianIntegrator,
) -> Result<f64> {
    let gf = f.gradient()?;
    let gg = g.gradient()?;
    let mut terms: Vec<(f64, RandomField)> = Vec::with_capacity(gf.len());
    for (a, b) in gf.iter().zip(&gg) {
        terms.push((1.0, a.product(b)?));
    }
    let dot = RandomField::affine(&terms, 0.0)?;
    p.expect(&dot, integrator)
}

/// Both sides of the integration-by-parts identity for the Otto product.
#[derive(Debug, Clone, Copy)]
pub struct OttoCheck {
    /// `E[grad f . grad g  p]`.
    pub inner: f64,
    /// `E[f  p (x . grad g - lap g - grad u_p . grad g)]`, i.e. the
    /// pairing of `f` with the weighted-divergence operator applied to
    /// `grad g`.
    pub adjoint: f64,
    /// `|inner - adjoint|`.
    pub residual: f64,
}

/// Verify `E[grad f . grad g p] = E[f delta_p(grad g)]` where
/// `delta_p(grad g) = p (x . grad g - lap g - grad u_p . grad g)` is the
/// adjoint of the weighted gradient; `g` must be twice differentiable.
pub fn otto_adjoint_check(
    f: &RandomField,
    g: &RandomField,
    p: &ExpModelPoint,
    integrator: &GaussianIntegrator,
) -> Result<OttoCheck> {
    let inner = otto_inner(f, g, p, integrator)?;
    let dim = g.dim();
    let gg = g.gradient()?;
    let gu = p.statistic().gradient()?;
    let mut terms: Vec<(f64, RandomField)> = Vec::new();
    for i in 0..dim {
        let xi = RandomField::coordinate(dim, i)?;
        terms.push((1.0, xi.product(&gg[i])?));
        let lap_i = gg[i].gradient()?.swap_remove(i);
        terms.push((-1.0, lap_i));
        terms.push((-1.0, gu[i].product(&gg[i])?));
    }
    let divergence = RandomField::affine(&terms, 0.0)?;
    let paired = f.product(&divergence)?;
    let adjoint = p.expect(&paired, integrator)?;
    Ok(OttoCheck { inner, adjoint, residual: (inner - adjoint).abs() })
}

/// Entropy, Dirichlet energy, and their gap for a model point.
#[derive(Debug, Clone, Copy)]
pub struct LogSobolevReport {
    /// `E[p log p]`.
    pub entropy: f64,
    /// `2 E[|grad sqrt(p)|^2]`.
    pub energy: f64,
    /// `energy - entropy`; the inequality asserts this is nonnegative.
    pub slack: f64,
    /// `slack >= -1e-8`.
    pub holds: bool,
}

/// Check the logarithmic Sobolev inequality
/// `E[p log p] <= 2 E[|grad sqrt(p)|^2]` at a model point, with equality
/// exactly for the exponential translates `u = a . x`.
pub fn log_sobolev_check(
    p: &ExpModelPoint,
    integrator: &GaussianIntegrator,
) -> Result<LogSobolevReport> {
    let log_density = p.log_density();
    let entropy = integrator
        .expect_with(&log_density, |v| v.exp() * v)?
        .finite_or(Error::OutsideDomain)?;
    let sqrt_density = p.sqrt_density();
    let grads = sqrt_density.gradient()?;
    let mut terms: Vec<(f64, RandomField)> = Vec::with_capacity(grads.len());
    for g in &grads {
        terms.push((1.0, g.product(g)?));
    }
    let dirichlet = RandomField::affine(&terms, 0.0)?;
    let energy =
        2.0 * integrator.expect(&dirichlet)?.finite_or(Error::OutsideDomain)?;
    let slack = energy - entropy;
    Ok(LogSobolevReport { entropy, energy, slack, holds: slack >= -1e-8 })
}

/// A point-with-velocity on the sphere picture: `P = 2 sqrt(p)` (a field
/// of constant 2-norm) and a velocity `Pdot` orthogonal to `P`.
#[derive(Debug, Clone)]
pub struct SpherePoint {
    pub point: RandomField,
    pub velocity: RandomField,
}

/// Map a model point and a tangent vector (centered under `p`) to the
/// sphere picture: `P = 2 sqrt(p)`, `Pdot = v sqrt(p)`.
pub fn bundle_to_sphere(
    p: &ExpModelPoint,
    v: &RandomField,
    integrator: &GaussianIntegrator,
) -> Result<SpherePoint> {
    let mean = p.expect(v, integrator)?;
    let scale = 1.0 + integrator
        .expect_weighted(v, f64::abs, &p.density())?
        .value()
        .unwrap_or(0.0);
    if mean.abs() > CENTERING_TOL * scale {
        return Err(Error::NotCentered { mean });
    }
    let sqrt_density = p.sqrt_density();
    Ok(SpherePoint {
        point: sqrt_density.scale(2.0),
        velocity: v.product(&sqrt_density)?,
    })
}

/// Map back from the sphere picture: `p = P^2 / 4` (validated through the
/// chart), `v = 2 Pdot / P`.
pub fn sphere_to_bundle(
    state: &SpherePoint,
    integrator: &GaussianIntegrator,
) -> Result<(ExpModelPoint, RandomField)> {
    let density = state.point.product(&state.point)?.scale(0.25);
    let point = chart(&density, integrator)?;
    let v = state.velocity.scale(2.0).product(&state.point.compose(Activation::Recip))?;
    Ok((point, v))
}

/// Conservation laws of the sphere picture, re-measured.
#[derive(Debug, Clone, Copy)]
pub struct SphereCheck {
    /// `E[(P/2)^2]`, which must be 1 (the density mass).
    pub mass: f64,
    /// `E[P Pdot]`, which must be 0 (tangency to the sphere).
    pub tangency: f64,
    /// `|E_p[v1 v2] - E[Pdot1 Pdot2]|`: the sphere metric matches the
    /// covariance pairing.
    pub pairing_gap: f64,
}

/// Verify mass, tangency, and metric preservation for two tangent
/// vectors at a model point.
pub fn sphere_pairing_check(
    p: &ExpModelPoint,
    v1: &RandomField,
    v2: &RandomField,
    integrator: &GaussianIntegrator,
) -> Result<SphereCheck> {
    let s1 = bundle_to_sphere(p, v1, integrator)?;
    let s2 = bundle_to_sphere(p, v2, integrator)?;
    let quarter = s1.point.product(&s1.point)?.scale(0.25);
    let mass = integrator.expect(&quarter)?.finite_or(Error::OutsideDomain)?;
    let tangent = s1.point.product(&s1.velocity)?;
    let tangency = integrator.expect(&tangent)?.finite_or(Error::OutsideDomain)?;
    let bundle_pairing = p.expect(&v1.product(v2)?, integrator)?;
    let sphere_pairing = integrator
        .expect(&s1.velocity.product(&s2.velocity)?)?
        .finite_or(Error::OutsideDomain)?;
    Ok(SphereCheck {
        mass,
        tangency,
        pairing_gap: (bundle_pairing - sphere_pairing).abs(),
    })
}

/// The equivalent-model conditions on a finite probability space; exact
/// arithmetic, delegated to the finite-space engine.
pub fn portmanteau_check(
    space: &FiniteSpace,
    p: &[f64],
    q: &[f64],
) -> Result<PortmanteauReport> {
    exact_portmanteau(space, p, q)
}
