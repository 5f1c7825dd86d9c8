//! Expectations under the standard Gaussian measure on `R^n`.
//!
//! Two backends share one interface:
//!
//! * **Gauss-Hermite quadrature** (probabilists' weight), tensorized over
//!   axes. A rule of order `m` integrates polynomials of degree `2m - 1`
//!   exactly. Rules are computed once per order and cached process-wide.
//! * **Seeded Monte Carlo**, for dimensions where a tensor grid is too
//!   large. Estimates carry a `1.96 sigma / sqrt(N)` error bound and are
//!   bitwise reproducible for a fixed seed.
//!
//! # Divergence verdicts
//!
//! Expectations like `E[exp(x^2)]` do not exist, and a single quadrature
//! sum would silently return a large finite number. The quadrature backend
//! therefore evaluates a three-level ladder of increasing orders and
//! reports [`Estimate::Diverged`] when the level-to-level increments fail
//! to contract *and* remain a sizable fraction of the absolute mass, when
//! any node value is non-finite, or when a partial sum passes the guard
//! `1e150`. Small non-contracting increments are classified as slow
//! convergence and surface in the error bound instead. The verdict is
//! relative to the resolved node range: an integrand whose divergence only
//! shows far outside the largest node (for example `cosh(x^3 / c)` for
//! enormous `c`) can evade detection, so callers probing membership
//! boundaries should scale their fields into the resolved range. Signed
//! divergences that cancel by symmetry (`E[x exp(x^2/2)]`) are reported as
//! their principal value.
//!
//! Indicator-type integrands converge too slowly for the increment test;
//! use [`GaussianIntegrator::probability`], which bypasses the ladder and
//! uses a single high-order rule.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::field::RandomField;
use crate::numerics::{gauss_legendre, CompensatedSum};

/// Partial sums whose magnitude passes this guard are declared divergent.
pub const DIVERGENCE_GUARD: f64 = 1e150;

/// Relative tolerance below which a first ladder increment counts as
/// converged (no third level is evaluated).
const LADDER_RTOL: f64 = 1e-9;

/// Increments are "not contracting" when the second is at least this
/// fraction of the first.
const LADDER_CONTRACTION: f64 = 0.9;

/// A non-contracting increment only supports a divergence verdict when it
/// exceeds this fraction of the absolute mass; smaller stalls are treated
/// as slow convergence and reported through the error bound.
const LADDER_DIVERGENCE_RTOL: f64 = 1e-2;

/// Default seed for Monte Carlo runs when none is supplied.
pub const DEFAULT_SEED: u64 = 0x00c0_ffee;

/// Outcome of a numerical expectation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Estimate {
    /// A finite value together with a (heuristic) error bound: the last
    /// ladder increment for quadrature, `1.96 sigma / sqrt(N)` for Monte
    /// Carlo.
    Finite { value: f64, error_bound: f64 },
    /// The expectation does not exist as a finite number, as far as the
    /// backend can tell.
    Diverged,
}

impl Estimate {
    pub fn value(&self) -> Option<f64> {
        match self {
            Estimate::Finite { value, .. } => Some(*value),
            Estimate::Diverged => None,
        }
    }

    pub fn error_bound(&self) -> Option<f64> {
        match self {
            Estimate::Finite { error_bound, .. } => Some(*error_bound),
            Estimate::Diverged => None,
        }
    }

    pub fn is_diverged(&self) -> bool {
        matches!(self, Estimate::Diverged)
    }

    /// Unwrap the finite value or map divergence to `err`.
    pub fn finite_or(&self, err: Error) -> Result<f64> {
        self.value().ok_or(err)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Backend {
    Quadrature { order: usize, refine: bool },
    MonteCarlo { samples: usize, seed: u64 },
}

/// The increment-contraction verdict shared by the direct and sampled
/// quadrature paths. `level(i)` returns the `(sum, absolute mass)` of
/// ladder level `i`, or `None` when that level left the finite range.
///
/// A divergent integrand keeps pulling mass from the freshly resolved
/// outer nodes, so its increments both fail to contract and stay a
/// sizable fraction of the total mass (the borderline `exp(x^2/2)` case
/// still moves ~13% of its mass per level). A merely slowly converging
/// integrand (a steep bounded composite, a high power of `tanh`) can
/// also produce non-contracting increments, but they sit orders of
/// magnitude below the mass. Requiring *both* signals separates the two
/// regimes.
fn ladder_verdict<F: FnMut(usize) -> Option<(f64, f64)>>(mut level: F) -> Estimate {
    let (i1, m1) = match level(0) {
        Some(v) => v,
        None => return Estimate::Diverged,
    };
    let (i2, m2) = match level(1) {
        Some(v) => v,
        None => return Estimate::Diverged,
    };
    let d1 = i2 - i1;
    let scale = m1.max(m2).max(f64::MIN_POSITIVE);
    if d1.abs() <= LADDER_RTOL * scale {
        return Estimate::Finite { value: i2, error_bound: d1.abs() };
    }
    let (i3, m3) = match level(2) {
        Some(v) => v,
        None => return Estimate::Diverged,
    };
    let d2 = i3 - i2;
    let scale = scale.max(m3);
    if d2.abs() >= LADDER_CONTRACTION * d1.abs() && d2.abs() > LADDER_DIVERGENCE_RTOL * scale {
        return Estimate::Diverged;
    }
    Estimate::Finite { value: i3, error_bound: d2.abs() }
}

/// One stored evaluation level: node weights and field values.
#[derive(Debug, Clone)]
struct SampleLevel {
    weights: Vec<f64>,
    values: Vec<f64>,
}

impl SampleLevel {
    /// `(sum, absolute mass)` of `w_i map(v_i)`, `None` on overflow.
    fn mapped_sum<M: Fn(f64) -> f64>(&self, map: &M) -> Option<(f64, f64)> {
        let mut acc = CompensatedSum::new();
        let mut mass = CompensatedSum::new();
        for (&w, &v) in self.weights.iter().zip(&self.values) {
            let m = map(v);
            if !m.is_finite() {
                return None;
            }
            let term = w * m;
            acc.add(term);
            mass.add(term.abs());
            if !mass.value().is_finite() || mass.value() > DIVERGENCE_GUARD {
                return None;
            }
        }
        Some((acc.value(), mass.value()))
    }
}

#[derive(Debug, Clone)]
enum SampledMode {
    /// Quadrature levels with the increment ladder.
    Ladder,
    /// A single quadrature level, no verdict beyond the guard.
    Single,
    /// Monte Carlo draws; the single level stores per-sample weights.
    MonteCarlo,
}

/// A field pre-evaluated at the integrator's nodes, so that many
/// integrands of the form `map(f(x))` can be estimated without
/// re-evaluating `f`. Produced by [`GaussianIntegrator::sample`]; used
/// heavily by the norm gauges, where the same field is probed at dozens of
/// scaling candidates.
#[derive(Debug, Clone)]
pub struct SampledIntegrand {
    levels: Vec<SampleLevel>,
    mode: SampledMode,
}

impl SampledIntegrand {
    /// Estimate `E[map(f(X)) (weight)]` from the stored evaluations, with
    /// the same divergence semantics as the integrator that produced it.
    pub fn estimate_with<M: Fn(f64) -> f64>(&self, map: M) -> Estimate {
        match self.mode {
            SampledMode::Ladder => ladder_verdict(|i| self.levels[i].mapped_sum(&map)),
            SampledMode::Single => match self.levels[0].mapped_sum(&map) {
                Some((value, _)) => Estimate::Finite { value, error_bound: 0.0 },
                None => Estimate::Diverged,
            },
            SampledMode::MonteCarlo => {
                let level = &self.levels[0];
                let n = level.values.len() as f64;
                let mut sum = CompensatedSum::new();
                let mut sumsq = CompensatedSum::new();
                for (&w, &v) in level.weights.iter().zip(&level.values) {
                    let m = map(v);
                    if !m.is_finite() {
                        return Estimate::Diverged;
                    }
                    let term = n * w * m;
                    sum.add(term);
                    sumsq.add(term * term);
                }
                let mean = sum.value() / n;
                if !mean.is_finite() || mean.abs() > DIVERGENCE_GUARD {
                    return Estimate::Diverged;
                }
                let var = (sumsq.value() / n - mean * mean).max(0.0);
                Estimate::Finite { value: mean, error_bound: 1.96 * (var / n).sqrt() }
            }
        }
    }
}

/// An expectation engine for one fixed dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianIntegrator {
    dim: usize,
    backend: Backend,
}

impl GaussianIntegrator {
    /// Tensor Gauss-Hermite with the divergence ladder enabled.
    pub fn quadrature(dim: usize, order: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        assert!(order >= 1, "quadrature order must be at least 1");
        Self { dim, backend: Backend::Quadrature { order, refine: true } }
    }

    /// Tensor Gauss-Hermite at exactly `order`, single level, no ladder.
    ///
    /// Useful when the node set itself is the object of interest, e.g. to
    /// reproduce sums over a quantized Gaussian space node for node.
    pub fn quadrature_fixed(dim: usize, order: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        assert!(order >= 1, "quadrature order must be at least 1");
        Self { dim, backend: Backend::Quadrature { order, refine: false } }
    }

    /// Seeded Monte Carlo with `samples` standard normal draws.
    pub fn monte_carlo(dim: usize, samples: usize, seed: u64) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        assert!(samples >= 2, "need at least two samples");
        Self { dim, backend: Backend::MonteCarlo { samples, seed } }
    }

    /// Quadrature of order 64 up to dimension 3, Monte Carlo above.
    pub fn default_for_dim(dim: usize) -> Self {
        if dim <= 3 {
            Self::quadrature(dim, 64)
        } else {
            Self::monte_carlo(dim, 1_000_000, DEFAULT_SEED)
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Base quadrature order, if this is a quadrature backend.
    pub fn order(&self) -> Option<usize> {
        match self.backend {
            Backend::Quadrature { order, .. } => Some(order),
            Backend::MonteCarlo { .. } => None,
        }
    }

    pub fn is_quadrature(&self) -> bool {
        matches!(self.backend, Backend::Quadrature { .. })
    }

    /// A copy whose quadrature order is at least `order` (identity for
    /// Monte Carlo). Used to restore polynomial exactness for high-degree
    /// integrands.
    pub fn with_order_at_least(&self, order: usize) -> Self {
        match self.backend {
            Backend::Quadrature { order: cur, refine } => Self {
                dim: self.dim,
                backend: Backend::Quadrature { order: cur.max(order), refine },
            },
            Backend::MonteCarlo { .. } => self.clone(),
        }
    }

    /// A copy with the divergence ladder disabled (identity for Monte
    /// Carlo and fixed quadrature). For integrands that are pointwise
    /// roundoff, such as the square of the difference of two algebraically
    /// equal trees, the ladder increments are noise and the single-level
    /// sum is the meaningful answer.
    pub fn without_ladder(&self) -> Self {
        match self.backend {
            Backend::Quadrature { order, .. } => Self {
                dim: self.dim,
                backend: Backend::Quadrature { order, refine: false },
            },
            Backend::MonteCarlo { .. } => self.clone(),
        }
    }

    /// Human-readable backend description.
    pub fn description(&self) -> String {
        match self.backend {
            Backend::Quadrature { order, refine: true } => {
                format!("gauss-hermite(dim={}, order={order})", self.dim)
            }
            Backend::Quadrature { order, refine: false } => {
                format!("gauss-hermite-fixed(dim={}, order={order})", self.dim)
            }
            Backend::MonteCarlo { samples, seed } => {
                format!("monte-carlo(dim={}, samples={samples}, seed={seed})", self.dim)
            }
        }
    }

    /// `E[g(X)]` for an arbitrary integrand.
    pub fn integrate<G: Fn(&[f64]) -> f64>(&self, g: G) -> Estimate {
        match self.backend {
            Backend::Quadrature { order, refine } => {
                if refine {
                    self.ladder(order, &g)
                } else {
                    self.single_level(order, &g)
                }
            }
            Backend::MonteCarlo { samples, seed } => self.monte_carlo_run(samples, seed, &g),
        }
    }

    /// `E[f(X)]`.
    pub fn expect(&self, f: &RandomField) -> Result<Estimate> {
        self.check_dim(f)?;
        Ok(self.integrate(|x| f.eval(x)))
    }

    /// `E[map(f(X))]`, the workhorse for Orlicz moduli `E[Phi(|f|/rho)]`.
    pub fn expect_with<M: Fn(f64) -> f64>(&self, f: &RandomField, map: M) -> Result<Estimate> {
        self.check_dim(f)?;
        Ok(self.integrate(|x| map(f.eval(x))))
    }

    /// `E[map(f(X)) w(X)]`: expectation under the reweighted measure
    /// `w dgamma` (the caller is responsible for `w` being a density).
    pub fn expect_weighted<M: Fn(f64) -> f64>(
        &self,
        f: &RandomField,
        map: M,
        weight: &RandomField,
    ) -> Result<Estimate> {
        self.check_dim(f)?;
        self.check_dim(weight)?;
        Ok(self.integrate(|x| map(f.eval(x)) * weight.eval(x)))
    }

    /// Pre-evaluate `f` at this integrator's nodes. The result estimates
    /// `E[map(f(X))]` for arbitrarily many `map`s at the cost of one field
    /// evaluation pass, with identical results to [`expect_with`].
    ///
    /// [`expect_with`]: Self::expect_with
    pub fn sample(&self, f: &RandomField) -> Result<SampledIntegrand> {
        self.check_dim(f)?;
        Ok(self.sample_impl(|x| f.eval(x), None))
    }

    /// Like [`sample`](Self::sample), but each node weight is multiplied
    /// by `weight(x)`, so estimates are expectations under the reweighted
    /// measure `w dgamma`.
    pub fn sample_weighted(
        &self,
        f: &RandomField,
        weight: &RandomField,
    ) -> Result<SampledIntegrand> {
        self.check_dim(f)?;
        self.check_dim(weight)?;
        Ok(self.sample_impl(|x| f.eval(x), Some(&|x: &[f64]| weight.eval(x))))
    }

    fn sample_impl(
        &self,
        f: impl Fn(&[f64]) -> f64,
        weight: Option<&dyn Fn(&[f64]) -> f64>,
    ) -> SampledIntegrand {
        match self.backend {
            Backend::Quadrature { order, refine } => {
                let orders: Vec<usize> = if refine {
                    let l1 = round_even(order.max(2));
                    vec![
                        l1,
                        round_even((l1 as f64 * 1.35).ceil() as usize),
                        round_even((l1 as f64 * 1.8).ceil() as usize),
                    ]
                } else {
                    vec![order]
                };
                let levels = orders
                    .iter()
                    .map(|&m| {
                        let mut weights = Vec::new();
                        let mut values = Vec::new();
                        self.for_each_node(m, |x, w| {
                            let w = match weight {
                                Some(wf) => w * wf(x),
                                None => w,
                            };
                            weights.push(w);
                            values.push(f(x));
                            true
                        });
                        SampleLevel { weights, values }
                    })
                    .collect();
                SampledIntegrand {
                    levels,
                    mode: if refine { SampledMode::Ladder } else { SampledMode::Single },
                }
            }
            Backend::MonteCarlo { samples, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut weights = Vec::with_capacity(samples);
                let mut values = Vec::with_capacity(samples);
                let mut x = vec![0.0f64; self.dim];
                let wn = 1.0 / samples as f64;
                for _ in 0..samples {
                    for xi in x.iter_mut() {
                        *xi = StandardNormal.sample(&mut rng);
                    }
                    let w = match weight {
                        Some(wf) => wn * wf(&x),
                        None => wn,
                    };
                    weights.push(w);
                    values.push(f(&x));
                }
                SampledIntegrand {
                    levels: vec![SampleLevel { weights, values }],
                    mode: SampledMode::MonteCarlo,
                }
            }
        }
    }

    /// `P(f(X) > threshold)`, by a single high-order rule (quadrature) or
    /// the sample fraction (Monte Carlo). Absolute accuracy is limited by
    /// the node spacing near the level set; expect a few times `1e-3`
    /// rather than machine precision.
    pub fn probability(&self, f: &RandomField, threshold: f64) -> Result<f64> {
        self.check_dim(f)?;
        match self.backend {
            Backend::Quadrature { order, .. } => {
                let target = match self.dim {
                    1 => 2048,
                    2 => 256,
                    _ => 96,
                };
                let m = round_even(order.max(target));
                let mut acc = CompensatedSum::new();
                self.for_each_node(m, |x, w| {
                    if f.eval(x) > threshold {
                        acc.add(w);
                    }
                    true
                });
                Ok(acc.value().clamp(0.0, 1.0))
            }
            Backend::MonteCarlo { samples, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut hits = 0usize;
                let mut x = vec![0.0f64; self.dim];
                for _ in 0..samples {
                    for xi in x.iter_mut() {
                        *xi = StandardNormal.sample(&mut rng);
                    }
                    if f.eval(&x) > threshold {
                        hits += 1;
                    }
                }
                Ok(hits as f64 / samples as f64)
            }
        }
    }

    fn check_dim(&self, f: &RandomField) -> Result<()> {
        if f.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: f.dim() });
        }
        Ok(())
    }

    /// Visit every tensor node with its weight; the visitor returns
    /// `false` to abort. Returns `false` when aborted.
    fn for_each_node<V: FnMut(&[f64], f64) -> bool>(&self, order: usize, mut visit: V) -> bool {
        let rule = gauss_hermite_rule_arc(order);
        let n = self.dim;
        let mut idx = vec![0usize; n];
        let mut point = vec![0.0f64; n];
        loop {
            let mut w = 1.0;
            for (i, &k) in idx.iter().enumerate() {
                let (x, wi) = rule[k];
                point[i] = x;
                w *= wi;
            }
            if !visit(&point, w) {
                return false;
            }
            // odometer
            let mut axis = 0;
            loop {
                if axis == n {
                    return true;
                }
                idx[axis] += 1;
                if idx[axis] < order {
                    break;
                }
                idx[axis] = 0;
                axis += 1;
            }
        }
    }

    /// One quadrature sum returning `(sum, sum of |terms|)`; `None` when a
    /// node value or partial sum leaves the finite range. The absolute mass
    /// is the scale against which increments are judged: a mean-zero
    /// integrand has roundoff-level increments that are only recognizable
    /// as stable relative to its absolute mass.
    fn quad_sum<G: Fn(&[f64]) -> f64>(&self, order: usize, g: &G) -> Option<(f64, f64)> {
        let mut acc = CompensatedSum::new();
        let mut mass = CompensatedSum::new();
        let mut ok = true;
        self.for_each_node(order, |x, w| {
            let v = g(x);
            if !v.is_finite() {
                ok = false;
                return false;
            }
            let term = w * v;
            acc.add(term);
            mass.add(term.abs());
            if !mass.value().is_finite() || mass.value() > DIVERGENCE_GUARD {
                ok = false;
                return false;
            }
            true
        });
        if ok {
            Some((acc.value(), mass.value()))
        } else {
            None
        }
    }

    fn single_level<G: Fn(&[f64]) -> f64>(&self, order: usize, g: &G) -> Estimate {
        match self.quad_sum(order, g) {
            Some((value, _)) => Estimate::Finite { value, error_bound: 0.0 },
            None => Estimate::Diverged,
        }
    }

    /// The three-level ladder with the increment contraction test.
    fn ladder<G: Fn(&[f64]) -> f64>(&self, order: usize, g: &G) -> Estimate {
        let l1 = round_even(order.max(2));
        let orders = [
            l1,
            round_even((l1 as f64 * 1.35).ceil() as usize),
            round_even((l1 as f64 * 1.8).ceil() as usize),
        ];
        ladder_verdict(|i| self.quad_sum(orders[i], g))
    }

    fn monte_carlo_run<G: Fn(&[f64]) -> f64>(
        &self,
        samples: usize,
        seed: u64,
        g: &G,
    ) -> Estimate {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sum = CompensatedSum::new();
        let mut sumsq = CompensatedSum::new();
        let mut x = vec![0.0f64; self.dim];
        for _ in 0..samples {
            for xi in x.iter_mut() {
                *xi = StandardNormal.sample(&mut rng);
            }
            let v = g(&x);
            if !v.is_finite() {
                return Estimate::Diverged;
            }
            sum.add(v);
            sumsq.add(v * v);
        }
        let n = samples as f64;
        let mean = sum.value() / n;
        if !mean.is_finite() || mean.abs() > DIVERGENCE_GUARD {
            return Estimate::Diverged;
        }
        let var = (sumsq.value() / n - mean * mean).max(0.0);
        Estimate::Finite { value: mean, error_bound: 1.96 * (var / n).sqrt() }
    }
}

fn round_even(m: usize) -> usize {
    m + (m & 1)
}

/// The probabilists' Gauss-Hermite rule of the given order: nodes `x_k`
/// ascending and weights `w_k` with `sum w_k = 1`, exact for polynomial
/// moments up to degree `2 order - 1`.
pub fn gauss_hermite_rule(order: usize) -> Vec<(f64, f64)> {
    gauss_hermite_rule_arc(order).as_ref().clone()
}

fn gauss_hermite_rule_arc(order: usize) -> Arc<Vec<(f64, f64)>> {
    static CACHE: OnceLock<Mutex<BTreeMap<usize, Arc<Vec<(f64, f64)>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
    let mut guard = cache.lock().expect("rule cache poisoned");
    guard
        .entry(order)
        .or_insert_with(|| Arc::new(compute_gauss_hermite(order)))
        .clone()
}

/// Nodes are the eigenvalues of the probabilists' Jacobi matrix
/// (zero diagonal, off-diagonal `sqrt(k)`), computed by implicit-shift QL;
/// the weight at a node is the reciprocal Christoffel sum
/// `1 / sum_{k<n} p_k(x)^2` over the orthonormal Hermite polynomials.
/// This stays stable at any order, unlike Newton iteration from asymptotic
/// guesses, which loses roots beyond order ~150.
fn compute_gauss_hermite(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1, "quadrature order must be at least 1");
    if n == 1 {
        return vec![(0.0, 1.0)];
    }
    let mut diag = vec![0.0f64; n];
    let mut offdiag: Vec<f64> = (1..n).map(|k| (k as f64).sqrt()).collect();
    offdiag.push(0.0);
    tridiagonal_eigenvalues(&mut diag, &mut offdiag);
    diag.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    // Enforce exact +/- symmetry by pairing mirrored eigenvalues.
    let half = n / 2;
    let mut rule: Vec<(f64, f64)> = Vec::with_capacity(n);
    for i in 0..half {
        let x = 0.5 * (diag[n - 1 - i] - diag[i]);
        let w = christoffel_weight(n, x);
        rule.push((-x, w));
        rule.push((x, w));
    }
    if n % 2 == 1 {
        rule.push((0.0, christoffel_weight(n, 0.0)));
    }
    rule.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite nodes"));
    // The Christoffel reciprocals sum to 1 only in exact arithmetic. Close
    // the floating-point defect on the largest weight so the rule
    // integrates the constant exactly: downstream identities (cumulant of
    // the zero statistic, density masses) then hold to the last bit.
    for _ in 0..4 {
        let mut total = CompensatedSum::new();
        for &(_, w) in &rule {
            total.add(w);
        }
        let defect = total.value() - 1.0;
        if defect == 0.0 {
            break;
        }
        let imax = (0..rule.len())
            .max_by(|&a, &b| rule[a].1.partial_cmp(&rule[b].1).expect("finite weights"))
            .expect("rule is nonempty");
        rule[imax].1 -= defect;
    }
    rule
}

/// `1 / sum_{k=0}^{n-1} p_k(x)^2` with `p_k` the orthonormal probabilists'
/// Hermite polynomials (`p_0 = 1`, `p_1 = x`,
/// `sqrt(k+1) p_{k+1} = x p_k - sqrt(k) p_{k-1}`). Returns 0 when the sum
/// overflows: the true weight underflows anyway at such nodes.
fn christoffel_weight(n: usize, x: f64) -> f64 {
    let mut p0 = 1.0f64;
    let mut sum = 1.0f64;
    if n == 1 {
        return 1.0;
    }
    let mut p1 = x;
    sum += p1 * p1;
    for k in 1..(n - 1) {
        let p2 = (x * p1 - (k as f64).sqrt() * p0) / ((k + 1) as f64).sqrt();
        if !p2.is_finite() {
            return 0.0;
        }
        p0 = p1;
        p1 = p2;
        sum += p2 * p2;
    }
    1.0 / sum
}

/// Implicit-shift QL for a symmetric tridiagonal matrix, eigenvalues only.
/// `d` holds the diagonal and is overwritten with the eigenvalues
/// (unordered); `e` holds the off-diagonal in `e[0..n-1]` with `e[n-1]`
/// used as workspace.
fn tridiagonal_eigenvalues(d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    if n <= 1 {
        return;
    }
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter <= 64, "QL iteration failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(if g == 0.0 { 1.0 } else { g }));
            let mut s = 1.0f64;
            let mut c = 1.0f64;
            let mut p = 0.0f64;
            let mut aborted = false;
            let mut i = m;
            while i > l {
                let iu = i - 1;
                let f = s * e[iu];
                let b = c * e[iu];
                r = f.hypot(g);
                e[iu + 1] = r;
                if r == 0.0 {
                    d[iu + 1] -= p;
                    e[m] = 0.0;
                    aborted = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[iu + 1] - p;
                r = (d[iu] - g) * s + 2.0 * c * b;
                p = s * r;
                d[iu + 1] = g + p;
                g = c * r - b;
                i -= 1;
            }
            if aborted {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

/// Weight for [`integrate_box`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoxWeight {
    /// Plain Lebesgue measure `dx`.
    Lebesgue,
    /// The standard Gaussian density `(2 pi)^{-n/2} exp(-|x|^2/2) dx`.
    Gaussian,
}

/// Integrate `g` over the axis-aligned box `[lo, hi]` with composite
/// Gauss-Legendre panels on every axis (tensorized).
///
/// This is the right tool for compactly supported integrands (bump fields,
/// kinked activations, indicator balls) where the global Hermite rule
/// cannot see the support boundary. Cost is `(panels * order)^dim`
/// evaluations.
pub fn integrate_box<G: Fn(&[f64]) -> f64>(
    g: G,
    lo: &[f64],
    hi: &[f64],
    weight: BoxWeight,
    panels: usize,
    order: usize,
) -> Result<f64> {
    let n = lo.len();
    if hi.len() != n || n == 0 {
        return Err(Error::DimensionMismatch { expected: n.max(1), got: hi.len() });
    }
    if panels == 0 || order == 0 {
        return Err(Error::InvalidArgument(
            "box integration needs at least one panel and a positive order".into(),
        ));
    }
    for i in 0..n {
        if !(lo[i] < hi[i]) {
            return Err(Error::InvalidArgument(format!(
                "box axis {i} is empty: [{}, {}]",
                lo[i], hi[i]
            )));
        }
    }
    let gl = gauss_legendre(order);
    // Per-axis composite node lists.
    let mut axis_nodes: Vec<Vec<(f64, f64)>> = Vec::with_capacity(n);
    for i in 0..n {
        let width = (hi[i] - lo[i]) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let a = lo[i] + p as f64 * width;
            let mid = a + 0.5 * width;
            for &(t, w) in &gl {
                nodes.push((mid + 0.5 * width * t, 0.5 * width * w));
            }
        }
        axis_nodes.push(nodes);
    }
    let per_axis = panels * order;
    let mut idx = vec![0usize; n];
    let mut point = vec![0.0f64; n];
    let norm = match weight {
        BoxWeight::Lebesgue => 1.0,
        BoxWeight::Gaussian => (2.0 * std::f64::consts::PI).powf(-(n as f64) / 2.0),
    };
    let mut acc = CompensatedSum::new();
    loop {
        let mut w = norm;
        for i in 0..n {
            let (x, wx) = axis_nodes[i][idx[i]];
            point[i] = x;
            w *= wx;
        }
        if let BoxWeight::Gaussian = weight {
            let r2: f64 = point.iter().map(|v| v * v).sum();
            w *= (-0.5 * r2).exp();
        }
        acc.add(w * g(&point));
        let mut axis = 0;
        loop {
            if axis == n {
                return Ok(acc.value());
            }
            idx[axis] += 1;
            if idx[axis] < per_axis {
                break;
            }
            idx[axis] = 0;
            axis += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn double_factorial_odd(k: usize) -> f64 {
        // (2k - 1)!! with the empty product for k = 0.
        let mut acc = 1.0f64;
        if k == 0 {
            return acc;
        }
        let mut j = 1usize;
        while j <= 2 * k - 1 {
            acc *= j as f64;
            j += 2;
        }
        acc
    }

    #[test]
    fn small_rules_match_closed_forms() {
        let r1 = gauss_hermite_rule(1);
        assert!(r1[0].0.abs() < 1e-15 && (r1[0].1 - 1.0).abs() < 1e-15);

        let r2 = gauss_hermite_rule(2);
        assert!((r2[0].0 + 1.0).abs() < 1e-14);
        assert!((r2[1].0 - 1.0).abs() < 1e-14);
        assert!((r2[0].1 - 0.5).abs() < 1e-14);
        assert!((r2[1].1 - 0.5).abs() < 1e-14);

        let r3 = gauss_hermite_rule(3);
        let s3 = 3f64.sqrt();
        assert!((r3[0].0 + s3).abs() < 1e-13);
        assert!(r3[1].0.abs() < 1e-15);
        assert!((r3[2].0 - s3).abs() < 1e-13);
        assert!((r3[0].1 - 1.0 / 6.0).abs() < 1e-14);
        assert!((r3[1].1 - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn weights_sum_to_one() {
        for order in [1, 2, 3, 7, 16, 33, 64, 116, 201] {
            let total: f64 = gauss_hermite_rule(order).iter().map(|r| r.1).sum();
            assert!((total - 1.0).abs() < 1e-13, "order {order}: {total}");
        }
    }

    #[test]
    fn even_moments_are_exact() {
        let q = GaussianIntegrator::quadrature_fixed(1, 16);
        for k in 0..=15usize {
            let f = RandomField::coordinate(1, 0).unwrap().powi(2 * k);
            let got = q.expect(&f).unwrap().value().unwrap();
            let want = double_factorial_odd(k);
            assert!(
                (got - want).abs() <= 1e-10 * want.max(1.0),
                "E[x^{}] = {got}, want {want}",
                2 * k
            );
        }
    }

    #[test]
    fn odd_moments_vanish() {
        let q = GaussianIntegrator::quadrature_fixed(1, 20);
        for k in [1usize, 3, 7, 11] {
            let f = RandomField::coordinate(1, 0).unwrap().powi(k);
            let got = q.expect(&f).unwrap().value().unwrap();
            assert!(got.abs() < 1e-10, "E[x^{k}] = {got}");
        }
    }

    #[test]
    fn tensor_moments_factor() {
        let q = GaussianIntegrator::quadrature(2, 16);
        let f = RandomField::parse(2, "x0^2 * x1^4").unwrap();
        let got = q.expect(&f).unwrap().value().unwrap();
        assert!((got - 3.0).abs() < 1e-12, "{got}");
    }

    #[test]
    fn very_high_degree_moment_stays_finite() {
        // E[x^126] = 125!! ~ 6.5e105: huge but perfectly finite, and exact
        // for the ladder orders seeded at 64.
        let q = GaussianIntegrator::quadrature(1, 64);
        let f = RandomField::coordinate(1, 0).unwrap().powi(126);
        let mut want = 1.0f64;
        let mut j = 1.0f64;
        while j <= 125.0 {
            want *= j;
            j += 2.0;
        }
        match q.expect(&f).unwrap() {
            Estimate::Finite { value, .. } => {
                assert!((value - want).abs() <= 1e-9 * want, "{value} vs {want}");
            }
            Estimate::Diverged => panic!("exact polynomial moment flagged divergent"),
        }
    }

    #[test]
    fn gaussian_mgf_of_square_converges_below_half() {
        let q = GaussianIntegrator::quadrature(1, 64);
        let f = RandomField::coordinate(1, 0).unwrap();
        for lambda in [0.1f64, 0.25, 0.4] {
            let want = (1.0 - 2.0 * lambda).powf(-0.5);
            let got = q
                .expect_with(&f, |v| (lambda * v * v).exp())
                .unwrap()
                .value()
                .unwrap();
            assert!(
                (got - want).abs() < 1e-6 * want,
                "lambda {lambda}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn mgf_frontier_verdicts() {
        let q = GaussianIntegrator::quadrature(1, 64);
        let f = RandomField::coordinate(1, 0).unwrap();
        let below = q.expect_with(&f, |v| (0.49 * v * v).exp()).unwrap();
        assert!(
            matches!(below, Estimate::Finite { .. }),
            "lambda=0.49 must be finite, got {below:?}"
        );
        let above = q.expect_with(&f, |v| (0.51 * v * v).exp()).unwrap();
        assert!(above.is_diverged(), "lambda=0.51 must diverge, got {above:?}");
        let critical = q.expect_with(&f, |v| (0.5 * v * v).exp()).unwrap();
        assert!(critical.is_diverged(), "lambda=0.5 must diverge, got {critical:?}");
        let hard = q.expect_with(&f, |v| (v * v).exp()).unwrap();
        assert!(hard.is_diverged());
    }

    #[test]
    fn linearity_of_expectation() {
        let q = GaussianIntegrator::quadrature(1, 32);
        let f = RandomField::parse(1, "x^2").unwrap();
        let g = RandomField::parse(1, "x^4").unwrap();
        let combo = RandomField::affine(&[(2.0, f.clone()), (-0.5, g.clone())], 1.5).unwrap();
        let ef = q.expect(&f).unwrap().value().unwrap();
        let eg = q.expect(&g).unwrap().value().unwrap();
        let ec = q.expect(&combo).unwrap().value().unwrap();
        assert!((ec - (2.0 * ef - 0.5 * eg + 1.5)).abs() < 1e-12);
    }

    #[test]
    fn tilted_mean_matches_exponential_family() {
        // Under dP = e^{theta x - theta^2/2} dgamma the mean is theta.
        let q = GaussianIntegrator::quadrature(1, 64);
        let x = RandomField::coordinate(1, 0).unwrap();
        let theta = 0.7f64;
        let density = RandomField::parse(1, &format!("exp({theta}*x - {})", theta * theta / 2.0));
        let density = density.unwrap();
        let mean = q
            .expect_weighted(&x, |v| v, &density)
            .unwrap()
            .value()
            .unwrap();
        assert!((mean - theta).abs() < 1e-10, "{mean}");
    }

    #[test]
    fn monte_carlo_is_seeded_and_sane() {
        let mc = GaussianIntegrator::monte_carlo(5, 40_000, 42);
        let f = RandomField::squared_norm(5);
        let a = mc.expect(&f).unwrap();
        let b = mc.expect(&f).unwrap();
        assert_eq!(a, b, "same seed must give bitwise identical estimates");
        let (value, error_bound) = match a {
            Estimate::Finite { value, error_bound } => (value, error_bound),
            Estimate::Diverged => panic!("finite integrand"),
        };
        assert!((value - 5.0).abs() < 5.0 * error_bound.max(1e-3), "{value} +- {error_bound}");
        let other = GaussianIntegrator::monte_carlo(5, 40_000, 43).expect(&f).unwrap();
        assert_ne!(a, other, "different seeds should differ");
    }

    #[test]
    fn probabilities() {
        let q = GaussianIntegrator::quadrature(1, 64);
        let x = RandomField::coordinate(1, 0).unwrap();
        let p0 = q.probability(&x, 0.0).unwrap();
        assert!((p0 - 0.5).abs() < 1e-12, "{p0}");
        let p1 = q.probability(&x, 1.0).unwrap();
        assert!((p1 - 0.158_655_253_931).abs() < 2e-2, "{p1}");
        let tail = q.probability(&x.abs(), 8.0).unwrap();
        assert!(tail < 1e-10, "{tail}");
        let mc = GaussianIntegrator::monte_carlo(1, 200_000, 7);
        let pmc = mc.probability(&x, 0.0).unwrap();
        assert!((pmc - 0.5).abs() < 5e-3, "{pmc}");
    }

    #[test]
    fn box_integration_closed_forms() {
        let one = integrate_box(|_| 1.0, &[0.0], &[1.0], BoxWeight::Lebesgue, 4, 8).unwrap();
        assert!((one - 1.0).abs() < 1e-14);
        let sq = integrate_box(
            |x| x[0] * x[0] * x[1] * x[1],
            &[-1.0, -1.0],
            &[1.0, 1.0],
            BoxWeight::Lebesgue,
            3,
            10,
        )
        .unwrap();
        assert!((sq - 4.0 / 9.0).abs() < 1e-13, "{sq}");
        let mass = integrate_box(|_| 1.0, &[-10.0], &[10.0], BoxWeight::Gaussian, 40, 12).unwrap();
        assert!((mass - 1.0).abs() < 1e-12, "{mass}");
        let second =
            integrate_box(|x| x[0] * x[0], &[-10.0], &[10.0], BoxWeight::Gaussian, 40, 12).unwrap();
        assert!((second - 1.0).abs() < 1e-12, "{second}");
    }

    #[test]
    fn box_integration_rejects_bad_input() {
        assert!(integrate_box(|_| 1.0, &[0.0], &[0.0], BoxWeight::Lebesgue, 2, 4).is_err());
        assert!(integrate_box(|_| 1.0, &[0.0, 0.0], &[1.0], BoxWeight::Lebesgue, 2, 4).is_err());
        assert!(integrate_box(|_| 1.0, &[0.0], &[1.0], BoxWeight::Lebesgue, 0, 4).is_err());
    }

    #[test]
    fn sampled_estimates_match_direct_path() {
        let f = RandomField::parse(1, "x^2 - 1").unwrap();
        for integ in [
            GaussianIntegrator::quadrature(1, 24),
            GaussianIntegrator::quadrature_fixed(1, 24),
        ] {
            let s = integ.sample(&f).unwrap();
            for rho in [0.5f64, 1.0, 3.0] {
                let a = s.estimate_with(|v| (v.abs() / rho).exp_m1());
                let b = integ.expect_with(&f, |v| (v.abs() / rho).exp_m1()).unwrap();
                assert_eq!(a, b, "rho {rho}");
            }
            let d1 = s.estimate_with(|v| (v * v).exp());
            let d2 = integ.expect_with(&f, |v| (v * v).exp()).unwrap();
            assert_eq!(d1.is_diverged(), d2.is_diverged());
        }
        let mc = GaussianIntegrator::monte_carlo(1, 5000, 11);
        let s = mc.sample(&f).unwrap();
        let a = s.estimate_with(|v| v.abs()).value().unwrap();
        let b = mc.expect_with(&f, |v| v.abs()).unwrap().value().unwrap();
        assert!((a - b).abs() < 1e-12 * (1.0 + b.abs()));

        let weight = RandomField::parse(1, "exp(0.3*x - 0.045)").unwrap();
        let q = GaussianIntegrator::quadrature(1, 32);
        let sw = q.sample_weighted(&f, &weight).unwrap();
        let a = sw.estimate_with(|v| v * v).value().unwrap();
        let b = q
            .expect_weighted(&f, |v| v * v, &weight)
            .unwrap()
            .value()
            .unwrap();
        assert!((a - b).abs() < 1e-12 * (1.0 + b.abs()));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let q = GaussianIntegrator::quadrature(2, 16);
        let f = RandomField::coordinate(1, 0).unwrap();
        assert!(matches!(
            q.expect(&f),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }
}
