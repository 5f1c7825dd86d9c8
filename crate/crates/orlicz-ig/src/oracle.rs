//! Exact reference computations on finite probability spaces.
//!
//! Every quantity here is a finite sum evaluated with compensated
//! arithmetic, so results are correct to machine precision and serve as
//! ground truth for the quadrature pipeline: a Gauss-Hermite rule *is* a
//! finite probability space (nodes and weights), and on such "quantized
//! Gaussians" the two code paths must agree to ~1e-10, which is the
//! central cross-validation contract of the crate. The same machinery
//! produces the fixture files consumed by the integration tests.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::gauss_hermite_rule;
use crate::numerics::CompensatedSum;
use crate::young::YoungFunction;

/// Tolerance on `sum(weights) - 1` (compensated) at construction.
const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Centering tolerance for sufficient statistics on finite spaces.
const CENTER_TOL: f64 = 1e-10;

/// A finite probability space: labelled atoms with strictly positive
/// weights summing to one.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FiniteSpace {
    atoms: Vec<String>,
    weights: Vec<f64>,
}

impl FiniteSpace {
    pub fn new(atoms: Vec<String>, weights: Vec<f64>) -> Result<Self> {
        if atoms.len() != weights.len() {
            return Err(Error::DimensionMismatch { expected: atoms.len(), got: weights.len() });
        }
        if weights.is_empty() {
            return Err(Error::InvalidArgument("a finite space needs at least one atom".into()));
        }
        let mut sum = CompensatedSum::new();
        for (i, &w) in weights.iter().enumerate() {
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::NonpositiveAtom { index: i, weight: w });
            }
            sum.add(w);
        }
        if (sum.value() - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::WeightsNotNormalized { sum: sum.value() });
        }
        Ok(FiniteSpace { atoms, weights })
    }

    /// `n` equally likely atoms.
    pub fn uniform(n: usize) -> Result<Self> {
        let atoms = (0..n).map(|i| format!("a{i}")).collect();
        // 1/n is not exactly representable for most n; distribute the
        // closure defect over the last atom so the compensated sum is 1.
        let w = 1.0 / n as f64;
        let mut weights = vec![w; n];
        if n > 0 {
            let mut partial = CompensatedSum::new();
            for _ in 0..n - 1 {
                partial.add(w);
            }
            weights[n - 1] = 1.0 - partial.value();
        }
        Self::new(atoms, weights)
    }

    /// From explicit weights with default labels.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let atoms = (0..weights.len()).map(|i| format!("a{i}")).collect();
        Self::new(atoms, weights)
    }

    /// The Gauss-Hermite rule of the given order, viewed as a finite
    /// probability space. Returns the space together with the node
    /// coordinates (the values of the coordinate field on the atoms).
    pub fn quantized_gaussian(order: usize) -> Result<(Self, Vec<f64>)> {
        if order == 0 {
            return Err(Error::InvalidArgument("quadrature order must be positive".into()));
        }
        let rule = gauss_hermite_rule(order);
        let nodes: Vec<f64> = rule.iter().map(|&(x, _)| x).collect();
        let mut weights: Vec<f64> = rule.iter().map(|&(_, w)| w).collect();
        // Weights of a Gauss-Hermite rule sum to 1 up to rounding; close
        // the defect on the largest weight so the space invariant is exact.
        let mut sum = CompensatedSum::new();
        for &w in &weights {
            sum.add(w);
        }
        let defect = sum.value() - 1.0;
        if let Some(imax) = (0..weights.len())
            .max_by(|&a, &b| weights[a].partial_cmp(&weights[b]).unwrap())
        {
            weights[imax] -= defect;
        }
        let atoms = nodes.iter().map(|x| format!("x={x:.12e}")).collect();
        Ok((Self::new(atoms, weights)?, nodes))
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    fn check_len(&self, f: &[f64]) -> Result<()> {
        if f.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), got: f.len() });
        }
        Ok(())
    }

    /// Exact expectation `sum_i w_i f_i`.
    pub fn expect(&self, f: &[f64]) -> Result<f64> {
        self.check_len(f)?;
        let mut acc = CompensatedSum::new();
        for (&w, &v) in self.weights.iter().zip(f) {
            acc.add(w * v);
        }
        Ok(acc.value())
    }

    /// Exact covariance of two vectors.
    pub fn covariance(&self, f: &[f64], g: &[f64]) -> Result<f64> {
        let mf = self.expect(f)?;
        let mg = self.expect(g)?;
        let mut acc = CompensatedSum::new();
        for ((&w, &a), &b) in self.weights.iter().zip(f).zip(g) {
            acc.add(w * (a - mf) * (b - mg));
        }
        Ok(acc.value())
    }

    /// Validate that `p` is a strictly positive density with respect to
    /// this space: all entries positive and `sum w_i p_i = 1` within tol.
    pub fn check_density(&self, p: &[f64]) -> Result<()> {
        self.check_len(p)?;
        for (i, &v) in p.iter().enumerate() {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::NonpositiveDensity { at: vec![i as f64], value: v });
            }
        }
        let mass = self.expect(p)?;
        if (mass - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "density mass is {mass:.17}, expected 1"
            )));
        }
        Ok(())
    }
}

/// Exact Luxemburg gauge on a finite space: the root of the strictly
/// decreasing map `rho -> sum_i w_i Phi(|f_i| / rho) - 1`, bisected to
/// relative width 1e-14. The zero vector has gauge 0.
pub fn exact_luxemburg(f: &[f64], phi: &YoungFunction, space: &FiniteSpace) -> Result<f64> {
    space.check_len(f)?;
    let modulus = |rho: f64| -> f64 {
        let mut acc = CompensatedSum::new();
        for (&w, &v) in space.weights.iter().zip(f) {
            acc.add(w * phi.value(v.abs() / rho));
        }
        acc.value()
    };
    let scale = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Ok(0.0);
    }
    let mut hi = scale;
    for _ in 0..200 {
        if modulus(hi) <= 1.0 {
            break;
        }
        hi *= 2.0;
    }
    if modulus(hi) > 1.0 {
        return Err(Error::NotInOrliczSpace { phi: phi.name() });
    }
    let mut lo = hi;
    for _ in 0..2000 {
        let next = lo / 2.0;
        if modulus(next) > 1.0 || next == 0.0 {
            lo = next;
            break;
        }
        lo = next;
    }
    for _ in 0..200 {
        if hi - lo <= 1e-14 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if modulus(mid) <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// An exponential-model point on a finite space.
#[derive(Debug, Clone)]
pub struct ExactModel {
    /// `d_i = exp(u_i - K)`, a density with respect to the space weights.
    pub density: Vec<f64>,
    /// `K = log sum_i w_i exp(u_i)`.
    pub cumulant: f64,
}

/// Build the exponential-model point of a centered statistic:
/// `d = exp(u - K)` with `K = log E[e^u]`.
pub fn exact_model(space: &FiniteSpace, u: &[f64]) -> Result<ExactModel> {
    space.check_len(u)?;
    let mean = space.expect(u)?;
    if mean.abs() > CENTER_TOL * (1.0 + u.iter().fold(0.0f64, |m, v| m.max(v.abs()))) {
        return Err(Error::NotCentered { mean });
    }
    let cumulant = log_mean_exp(space, u, None)?;
    let density: Vec<f64> = u.iter().map(|&v| (v - cumulant).exp()).collect();
    Ok(ExactModel { density, cumulant })
}

/// Stabilized `log sum_i w_i t_i exp(u_i)` with optional positive tilt `t`.
fn log_mean_exp(space: &FiniteSpace, u: &[f64], tilt: Option<&[f64]>) -> Result<f64> {
    let peak = u.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !peak.is_finite() {
        return Err(Error::OutsideDomain);
    }
    let mut acc = CompensatedSum::new();
    for (i, (&w, &v)) in space.weights.iter().zip(u).enumerate() {
        let t = tilt.map_or(1.0, |t| t[i]);
        acc.add(w * t * (v - peak).exp());
    }
    let value = peak + acc.value().ln();
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::OutsideDomain)
    }
}

/// Exact chart: recover the centered statistic and normalizer from a
/// strictly positive density, `u = log d - E[log d]`, `K = -E[log d]`.
pub fn exact_chart(space: &FiniteSpace, density: &[f64]) -> Result<(Vec<f64>, f64)> {
    space.check_density(density)?;
    let logs: Vec<f64> = density.iter().map(|d| d.ln()).collect();
    let mean = space.expect(&logs)?;
    Ok((logs.iter().map(|l| l - mean).collect(), -mean))
}

/// Exact relative normalizer `K_p(v) = log E_p[e^v]` for a statistic `v`
/// centered under the model point `p = exp(u - K) . w`.
pub fn exact_relative_cumulant(space: &FiniteSpace, base: &ExactModel, v: &[f64]) -> Result<f64> {
    space.check_len(v)?;
    let mut mean = CompensatedSum::new();
    for ((&w, &d), &x) in space.weights.iter().zip(&base.density).zip(v) {
        mean.add(w * d * x);
    }
    if mean.value().abs() > CENTER_TOL * (1.0 + v.iter().fold(0.0f64, |m, x| m.max(x.abs()))) {
        return Err(Error::NotCentered { mean: mean.value() });
    }
    log_mean_exp(space, v, Some(&base.density))
}

/// Exact Fisher information of the family `theta -> exp(sum theta_i u_i - kappa)`,
/// computed along two algebraically different routes.
#[derive(Debug, Clone)]
pub struct ExactFisher {
    pub cumulant: f64,
    /// `grad_i kappa = E_p[u_i]`.
    pub grad: Vec<f64>,
    /// Centered score covariance `E_p[(u_i - m_i)(u_j - m_j)]`.
    pub covariance: Vec<Vec<f64>>,
    /// Raw-moment quotient `(Z Z_ij - Z_i Z_j) / Z^2` — the second
    /// derivative of `log Z` expanded without centering.
    pub quotient: Vec<Vec<f64>>,
    /// Largest entrywise difference between the two routes.
    pub max_difference: f64,
}

/// Fisher information on a finite space: the covariance of the scores
/// equals the Hessian of the normalizer; both are formed here as exact
/// finite sums through different intermediate quantities.
pub fn exact_fisher(space: &FiniteSpace, stats: &[Vec<f64>], theta: &[f64]) -> Result<ExactFisher> {
    if stats.len() != theta.len() {
        return Err(Error::DimensionMismatch { expected: stats.len(), got: theta.len() });
    }
    if stats.is_empty() {
        return Err(Error::InvalidArgument("family needs at least one statistic".into()));
    }
    let n = space.len();
    for s in stats {
        space.check_len(s)?;
    }
    let mut combined = vec![0.0f64; n];
    for (s, &t) in stats.iter().zip(theta) {
        for (c, &v) in combined.iter_mut().zip(s) {
            *c += t * v;
        }
    }
    let cumulant = log_mean_exp(space, &combined, None)?;
    let density: Vec<f64> = combined.iter().map(|&v| (v - cumulant).exp()).collect();

    let d = stats.len();
    // Tilted raw moments: Z = 1 after normalization, Z_i = E_p[u_i],
    // Z_ij = E_p[u_i u_j].
    let mut z_i = vec![0.0f64; d];
    let mut z_ij = vec![vec![0.0f64; d]; d];
    for i in 0..d {
        let mut acc = CompensatedSum::new();
        for ((&w, &dens), &v) in space.weights.iter().zip(&density).zip(&stats[i]) {
            acc.add(w * dens * v);
        }
        z_i[i] = acc.value();
        for j in 0..=i {
            let mut acc = CompensatedSum::new();
            for k in 0..n {
                acc.add(space.weights[k] * density[k] * stats[i][k] * stats[j][k]);
            }
            z_ij[i][j] = acc.value();
            z_ij[j][i] = acc.value();
        }
    }
    let mut covariance = vec![vec![0.0f64; d]; d];
    let mut quotient = vec![vec![0.0f64; d]; d];
    let mut max_difference = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let mut acc = CompensatedSum::new();
            for k in 0..n {
                acc.add(
                    space.weights[k]
                        * density[k]
                        * (stats[i][k] - z_i[i])
                        * (stats[j][k] - z_i[j]),
                );
            }
            covariance[i][j] = acc.value();
            quotient[i][j] = z_ij[i][j] - z_i[i] * z_i[j];
            max_difference = max_difference.max((covariance[i][j] - quotient[i][j]).abs());
        }
    }
    Ok(ExactFisher { cumulant, grad: z_i, covariance, quotient, max_difference })
}

/// Report of the equivalent-model conditions for two strictly positive
/// densities on a finite space.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PortmanteauReport {
    /// `(t, Z(t))` for the geometric arc `Z(t) = E[p^{1-t} q^t]` on a grid
    /// extending beyond `[0, 1]` on both sides.
    pub arc: Vec<(f64, f64)>,
    /// Every grid value finite (the arc is defined on an open superset of
    /// `[0,1]`).
    pub arc_finite: bool,
    /// Midpoint log-convexity of `t -> Z(t)` over all aligned grid pairs.
    pub log_convex: bool,
    /// `(a, E_q[(p/q)^a])` for the probed integrability exponents.
    pub integrability: Vec<(f64, f64)>,
    /// `(lo, hi)` bounds of `|v|_{cosh2,q} / |v|_{cosh2,p}` over the probe
    /// vectors (indicators and sign patterns — the extreme points of the
    /// sup-norm ball).
    pub equivalence: (f64, f64),
    /// All conditions hold.
    pub conditions_hold: bool,
}

/// Check the equivalent-model conditions for densities `p, q`: the
/// geometric arc between them stays normalizable beyond both endpoints
/// with log-convex normalizer, the likelihood ratios have finite moments
/// of every probed order, and the two weighted `cosh - 1` gauges are
/// equivalent with explicit constants.
pub fn exact_portmanteau(
    space: &FiniteSpace,
    p: &[f64],
    q: &[f64],
) -> Result<PortmanteauReport> {
    space.check_density(p)?;
    space.check_density(q)?;
    let n = space.len();

    // Z(t) = sum_i w_i p_i^{1-t} q_i^t on a uniform 13-point grid over
    // [-0.25, 1.25]; all finite because atoms are strictly positive.
    let grid: Vec<f64> = (0..13).map(|i| -0.25 + 0.125 * i as f64).collect();
    let z = |t: f64| -> f64 {
        let mut acc = CompensatedSum::new();
        for i in 0..n {
            acc.add(space.weights[i] * p[i].powf(1.0 - t) * q[i].powf(t));
        }
        acc.value()
    };
    let arc: Vec<(f64, f64)> = grid.iter().map(|&t| (t, z(t))).collect();
    let arc_finite = arc.iter().all(|&(_, v)| v.is_finite() && v > 0.0);

    // Midpoint log-convexity over every aligned pair (same parity).
    let mut log_convex = true;
    for i in 0..arc.len() {
        for j in (i + 2)..arc.len() {
            if (j - i) % 2 == 0 {
                let mid = (i + j) / 2;
                let lhs = arc[mid].1.ln();
                let rhs = 0.5 * (arc[i].1.ln() + arc[j].1.ln());
                if lhs > rhs + 1e-12 {
                    log_convex = false;
                }
            }
        }
    }

    // E_q[(p/q)^a] = sum w_i q_i (p_i/q_i)^a, finite for every exponent.
    let integrability: Vec<(f64, f64)> = [1.5f64, 2.0, 4.0, 8.0]
        .iter()
        .map(|&a| {
            let mut acc = CompensatedSum::new();
            for i in 0..n {
                acc.add(space.weights[i] * q[i] * (p[i] / q[i]).powf(a));
            }
            (a, acc.value())
        })
        .collect();
    let integrable = integrability.iter().all(|&(_, v)| v.is_finite());

    // Gauge equivalence between the p- and q-weighted spaces over probe
    // vectors: indicators, the constant vector, and (for small spaces)
    // every sign pattern — extreme points of the sup-norm unit ball.
    let wp: Vec<f64> = space.weights.iter().zip(p).map(|(&w, &d)| w * d).collect();
    let wq: Vec<f64> = space.weights.iter().zip(q).map(|(&w, &d)| w * d).collect();
    let space_p = FiniteSpace::new(space.atoms.clone(), renormalized(&wp))?;
    let space_q = FiniteSpace::new(space.atoms.clone(), renormalized(&wq))?;
    let phi = YoungFunction::cosh2();
    let mut probes: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        probes.push(e);
    }
    probes.push(vec![1.0; n]);
    if n <= 12 {
        for mask in 0..(1u32 << (n - 1)) {
            let v: Vec<f64> = (0..n)
                .map(|i| if i > 0 && mask >> (i - 1) & 1 == 1 { -1.0 } else { 1.0 })
                .collect();
            probes.push(v);
        }
    }
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for v in &probes {
        let np = exact_luxemburg(v, &phi, &space_p)?;
        let nq = exact_luxemburg(v, &phi, &space_q)?;
        if np > 0.0 && nq > 0.0 {
            let ratio = nq / np;
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
    }
    let equivalence = (lo, hi);
    let conditions_hold =
        arc_finite && log_convex && integrable && lo.is_finite() && hi.is_finite() && lo > 0.0;
    Ok(PortmanteauReport {
        arc,
        arc_finite,
        log_convex,
        integrability,
        equivalence,
        conditions_hold,
    })
}

/// Rescale positive weights to close the compensated sum to exactly 1.
fn renormalized(w: &[f64]) -> Vec<f64> {
    let mut sum = CompensatedSum::new();
    for &x in w {
        sum.add(x);
    }
    let total = sum.value();
    let mut out: Vec<f64> = w.iter().map(|&x| x / total).collect();
    let mut check = CompensatedSum::new();
    for &x in &out {
        check.add(x);
    }
    let defect = check.value() - 1.0;
    if let Some(imax) = (0..out.len()).max_by(|&a, &b| out[a].partial_cmp(&out[b]).unwrap()) {
        out[imax] -= defect;
    }
    out
}

/// Measure underlying a regression fixture.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixtureSpace {
    /// Gauss–Hermite quantization of the standard Gaussian at this order.
    QuantizedGaussian { order: usize },
    /// Explicit probability weights on anonymous atoms.
    Explicit { weights: Vec<f64> },
}

impl FixtureSpace {
    /// Materialize the space; quantized spaces also return their nodes.
    pub fn build(&self) -> Result<(FiniteSpace, Option<Vec<f64>>)> {
        match self {
            FixtureSpace::QuantizedGaussian { order } => {
                let (space, nodes) = FiniteSpace::quantized_gaussian(*order)?;
                Ok((space, Some(nodes)))
            }
            FixtureSpace::Explicit { weights } => {
                Ok((FiniteSpace::from_weights(weights.clone())?, None))
            }
        }
    }
}

/// One frozen input/output pair: an operation on a finite space whose
/// exact value is pinned so that both the finite engine and the quadrature
/// pipeline can be re-checked against it at any time.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Fixture {
    pub space: FixtureSpace,
    pub operation: String,
    pub inputs: serde_json::Value,
    pub expected: serde_json::Value,
    pub tolerance: f64,
}

fn eval_expr(expr: &str, nodes: &[f64]) -> Result<Vec<f64>> {
    let field = crate::field::RandomField::parse(1, expr)?;
    Ok(nodes.iter().map(|&x| field.eval(&[x])).collect())
}

/// Deterministically build the fixture corpus: Luxemburg gauges of
/// one-dimensional fields on quantized Gaussians, cumulants and Fisher
/// matrices of small exponential families, and equivalence reports on
/// explicit spaces. Every expected value is produced by the exact finite
/// engine in this module, never by the quadrature pipeline it guards.
pub fn generate_fixtures() -> Result<Vec<Fixture>> {
    let mut out = Vec::new();

    let gauge_orders = [8usize, 16, 32];
    let gauge_fields = ["x", "x^2 - 1", "tanh(x)", "0.5 * x + 1"];
    let gauge_phis = ["cosh2", "power:2", "power:3"];
    for &order in &gauge_orders {
        let (space, nodes) = FiniteSpace::quantized_gaussian(order)?;
        for expr in gauge_fields {
            let values = eval_expr(expr, &nodes)?;
            for phi_name in gauge_phis {
                let phi = YoungFunction::from_name(phi_name)?;
                let value = exact_luxemburg(&values, &phi, &space)?;
                out.push(Fixture {
                    space: FixtureSpace::QuantizedGaussian { order },
                    operation: "luxemburg".into(),
                    inputs: serde_json::json!({ "field": expr, "phi": phi_name }),
                    expected: serde_json::json!({ "value": value }),
                    tolerance: 1e-10,
                });
            }
        }
    }

    let cumulant_orders = [16usize, 32];
    let cumulant_fields = ["0.3 * x", "0.7 * x", "0.25 * (x^2 - 1)"];
    for &order in &cumulant_orders {
        let (space, nodes) = FiniteSpace::quantized_gaussian(order)?;
        for expr in cumulant_fields {
            let values = eval_expr(expr, &nodes)?;
            let model = exact_model(&space, &values)?;
            out.push(Fixture {
                space: FixtureSpace::QuantizedGaussian { order },
                operation: "cumulant".into(),
                inputs: serde_json::json!({ "u": expr }),
                expected: serde_json::json!({ "value": model.cumulant }),
                tolerance: 1e-10,
            });
        }
    }

    let fisher_orders = [16usize, 32];
    let fisher_families: [(&[&str], &[f64]); 2] = [
        (&["x"], &[0.4]),
        (&["x", "(x^2 - 1) / 1.4142135623730951"], &[0.1, 0.1]),
    ];
    for &order in &fisher_orders {
        let (space, nodes) = FiniteSpace::quantized_gaussian(order)?;
        for (exprs, theta) in &fisher_families {
            let stats: Vec<Vec<f64>> =
                exprs.iter().map(|e| eval_expr(e, &nodes)).collect::<Result<_>>()?;
            let report = exact_fisher(&space, &stats, theta)?;
            out.push(Fixture {
                space: FixtureSpace::QuantizedGaussian { order },
                operation: "fisher".into(),
                inputs: serde_json::json!({ "stats": exprs, "theta": theta }),
                expected: serde_json::json!({
                    "cumulant": report.cumulant,
                    "grad": report.grad,
                    "information": report.covariance,
                }),
                tolerance: 1e-10,
            });
        }
    }

    let portmanteau_cases: [(&[f64], &[f64], &[f64]); 4] = [
        (&[0.25, 0.25, 0.25, 0.25], &[1.6, 1.2, 0.8, 0.4], &[0.4, 0.8, 1.2, 1.6]),
        (&[0.25, 0.25, 0.25, 0.25], &[1.0, 1.0, 1.0, 1.0], &[1.0, 1.0, 1.0, 1.0]),
        (&[0.5, 0.5], &[1.2, 0.8], &[0.7, 1.3]),
        (&[0.1, 0.2, 0.3, 0.4], &[2.0, 1.5, 1.0, 0.5], &[1.0, 1.0, 1.0, 1.0]),
    ];
    for (weights, p, q) in portmanteau_cases {
        let space = FiniteSpace::from_weights(weights.to_vec())?;
        let report = exact_portmanteau(&space, p, q)?;
        let z_half = report
            .arc
            .iter()
            .find(|(t, _)| (t - 0.5).abs() < 1e-12)
            .map(|&(_, z)| z)
            .expect("grid contains t = 1/2");
        out.push(Fixture {
            space: FixtureSpace::Explicit { weights: weights.to_vec() },
            operation: "portmanteau".into(),
            inputs: serde_json::json!({ "p": p, "q": q }),
            expected: serde_json::json!({
                "log_convex": report.log_convex,
                "conditions_hold": report.conditions_hold,
                "z_half": z_half,
            }),
            tolerance: 1e-12,
        });
    }

    Ok(out)
}
