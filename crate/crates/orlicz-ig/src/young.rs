//! Young functions and their algebra.
//!
//! A Young function is `Phi(x) = int_0^x phi(u) du` for a right derivative
//! `phi` with `phi(0) = 0`, strictly increasing and unbounded, extended to
//! the line by symmetry `Phi(x) = Phi(|x|)`. The built-in cases are
//!
//! * `power:a`  with `Phi(x) = |x|^a / a`, conjugate `power:b`, `1/a + 1/b = 1`;
//! * `exp2`     with `Phi(x) = exp(x) - 1 - x`, conjugate `exp2*` given by
//!   `(1+y) ln(1+y) - y`;
//! * `cosh2`    with `Phi(x) = cosh(x) - 1`, conjugate `cosh2*` given by
//!   `y asinh(y) - (sqrt(1+y^2) - 1)`;
//! * `gauss2`   with `Phi(x) = exp(x^2/2) - 1` (conjugate computed numerically);
//! * `sq:<name>` squared variants `Phi(x^2)`;
//! * custom right derivatives supplied on a grid and interpolated by a
//!   shape-preserving monotone cubic.
//!
//! Conjugation inverts the right derivative, `psi = phi^{-1}`; where no
//! closed form exists the inverse is computed by bracketing bisection and
//! the primitive by adaptive quadrature. Conjugation is involutive on this
//! class, so the conjugate of a numeric conjugate returns the original.

use crate::error::{Error, Result};
use crate::numerics::{adaptive_simpson, bisect_increasing, MonotoneCubic};

const LN_2: f64 = std::f64::consts::LN_2;

/// Relative tolerance for numeric inversion of a right derivative.
const INVERT_REL_TOL: f64 = 1e-12;
/// Iteration cap for the inversion bisection.
const INVERT_MAX_ITER: usize = 200;

#[derive(Debug, Clone)]
enum Kind {
    Power { alpha: f64 },
    Exp2,
    Exp2Conj,
    Cosh2,
    Cosh2Conj,
    Gauss2,
    Squared(Box<Kind>),
    Custom { label: String, phi: MonotoneCubic },
    NumericConjugate(Box<Kind>),
}

/// A Young function with evaluable value, right derivative, and conjugate.
#[derive(Debug, Clone)]
pub struct YoungFunction {
    kind: Kind,
}

/// Result of the pointwise Young / Legendre diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct YoungCheck {
    /// `Phi(x) + Psi(y) - x y`; nonnegative for every `x, y >= 0`.
    pub young_gap: f64,
    /// `Phi(x) + Psi(phi(x)) - x phi(x)`; zero in exact arithmetic.
    pub legendre_residual: f64,
}

/// Certificate produced by [`eventually_dominates`].
#[derive(Debug, Clone)]
pub struct DominationCertificate {
    /// Whether `Phi1(x) <= Phi2(k x)` held over the probed range.
    pub holds: bool,
    /// Witness scale `k` (smallest that certified), when `holds`.
    pub scale: f64,
    /// Witness threshold `x_bar`, when `holds`.
    pub threshold: f64,
    /// The probed range `[threshold, probe_max]`.
    pub probe_max: f64,
    /// A probe point where the last attempted pair failed, when `!holds`.
    pub counterexample: Option<f64>,
}

impl Kind {
    fn value(&self, x: f64) -> f64 {
        let x = x.abs();
        match self {
            Kind::Power { alpha } => x.powf(*alpha) / alpha,
            Kind::Exp2 => x.exp_m1() - x,
            Kind::Exp2Conj => {
                if x == 0.0 {
                    0.0
                } else {
                    (1.0 + x) * x.ln_1p() - x
                }
            }
            Kind::Cosh2 => {
                let s = (0.5 * x).sinh();
                2.0 * s * s
            }
            Kind::Cosh2Conj => {
                // sqrt(1+y^2) - 1 written without cancellation.
                x * x.asinh() - (x * x) / ((1.0 + x * x).sqrt() + 1.0)
            }
            Kind::Gauss2 => (0.5 * x * x).exp_m1(),
            Kind::Squared(inner) => inner.value(x * x),
            Kind::Custom { phi, .. } => phi.integral_from_start(x),
            Kind::NumericConjugate(inner) => {
                if x == 0.0 {
                    return 0.0;
                }
                let psi = |v: f64| invert_phi(inner, v);
                let scale = (x * psi(x)).abs().max(1.0);
                adaptive_simpson(&psi, 0.0, x, 1e-13 * scale)
            }
        }
    }

    /// Right derivative at `u >= 0`.
    fn phi(&self, u: f64) -> f64 {
        let u = u.max(0.0);
        match self {
            Kind::Power { alpha } => u.powf(alpha - 1.0),
            Kind::Exp2 => u.exp_m1(),
            Kind::Exp2Conj => u.ln_1p(),
            Kind::Cosh2 => u.sinh(),
            Kind::Cosh2Conj => u.asinh(),
            Kind::Gauss2 => u * (0.5 * u * u).exp(),
            Kind::Squared(inner) => 2.0 * u * inner.phi(u * u),
            Kind::Custom { phi, .. } => phi.eval(u).max(0.0),
            Kind::NumericConjugate(inner) => invert_phi(inner, u),
        }
    }

    /// `ln Phi(x)` for `x > 0`, stable where `Phi` overflows `f64`.
    fn ln_value(&self, x: f64) -> f64 {
        let x = x.abs();
        match self {
            Kind::Power { alpha } => alpha * x.ln() - alpha.ln(),
            Kind::Exp2 => {
                if x > 34.0 {
                    x + (-(1.0 + x) * (-x).exp()).ln_1p()
                } else {
                    self.value(x).ln()
                }
            }
            Kind::Cosh2 => {
                if x > 34.0 {
                    x - LN_2
                } else {
                    self.value(x).ln()
                }
            }
            Kind::Gauss2 => {
                let e = 0.5 * x * x;
                if e > 34.0 {
                    e
                } else {
                    self.value(x).ln()
                }
            }
            Kind::Squared(inner) => inner.ln_value(x * x),
            _ => self.value(x).ln(),
        }
    }

    fn name(&self) -> String {
        match self {
            Kind::Power { alpha } => format!("power:{alpha}"),
            Kind::Exp2 => "exp2".into(),
            Kind::Exp2Conj => "exp2*".into(),
            Kind::Cosh2 => "cosh2".into(),
            Kind::Cosh2Conj => "cosh2*".into(),
            Kind::Gauss2 => "gauss2".into(),
            Kind::Squared(inner) => format!("sq:{}", inner.name()),
            Kind::Custom { label, .. } => format!("custom:{label}"),
            Kind::NumericConjugate(inner) => format!("conj:{}", inner.name()),
        }
    }
}

/// Invert a right derivative at `v >= 0` by doubling bracket + bisection.
fn invert_phi(kind: &Kind, v: f64) -> f64 {
    let v = v.max(0.0);
    if v == 0.0 {
        return 0.0;
    }
    let mut hi = 1.0_f64;
    let mut guard = 0;
    while kind.phi(hi) < v {
        hi *= 2.0;
        guard += 1;
        if guard > 1100 {
            break;
        }
    }
    bisect_increasing(0.0, hi, |u| kind.phi(u) - v, INVERT_REL_TOL, INVERT_MAX_ITER)
}

impl YoungFunction {
    /// `Phi(x) = |x|^alpha / alpha`, `alpha > 1`.
    pub fn power(alpha: f64) -> Result<Self> {
        if !(alpha > 1.0) || !alpha.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "power exponent must exceed 1, got {alpha}"
            )));
        }
        Ok(Self { kind: Kind::Power { alpha } })
    }

    /// `Phi(x) = exp(x) - 1 - x`.
    pub fn exp2() -> Self {
        Self { kind: Kind::Exp2 }
    }

    /// Conjugate of [`exp2`](Self::exp2): `(1+y) ln(1+y) - y`.
    pub fn exp2_conjugate() -> Self {
        Self { kind: Kind::Exp2Conj }
    }

    /// `Phi(x) = cosh(x) - 1`.
    pub fn cosh2() -> Self {
        Self { kind: Kind::Cosh2 }
    }

    /// Conjugate of [`cosh2`](Self::cosh2): `y asinh(y) - (sqrt(1+y^2) - 1)`.
    pub fn cosh2_conjugate() -> Self {
        Self { kind: Kind::Cosh2Conj }
    }

    /// `Phi(x) = exp(x^2/2) - 1`.
    pub fn gauss2() -> Self {
        Self { kind: Kind::Gauss2 }
    }

    /// The squared variant `x -> Phi(x^2)`, again a Young function, with
    /// right derivative `2 u phi(u^2)`.
    pub fn squared(&self) -> Self {
        Self {
            kind: Kind::Squared(Box::new(self.kind.clone())),
        }
    }

    /// A custom Young function from samples of its right derivative.
    ///
    /// The grid must start at `(0, 0)` with strictly increasing knots and
    /// strictly increasing values; the derivative is interpolated by a
    /// monotone cubic and the primitive integrated segment by segment.
    pub fn custom(label: &str, grid_u: Vec<f64>, grid_phi: Vec<f64>) -> Result<Self> {
        if grid_u.len() < 2 || grid_u.len() != grid_phi.len() {
            return Err(Error::InvalidArgument(
                "custom phi grid needs matching lengths >= 2".into(),
            ));
        }
        if grid_u[0] != 0.0 || grid_phi[0] != 0.0 {
            return Err(Error::InvalidArgument(
                "custom phi grid must start at (0, 0)".into(),
            ));
        }
        for i in 1..grid_phi.len() {
            if !(grid_phi[i] > grid_phi[i - 1]) {
                return Err(Error::NotIncreasing { at: grid_u[i] });
            }
        }
        let phi = MonotoneCubic::new(grid_u, grid_phi)
            .ok_or_else(|| Error::InvalidArgument("custom phi grid is not increasing in u".into()))?;
        Ok(Self {
            kind: Kind::Custom { label: label.to_string(), phi },
        })
    }

    /// Parse `"power:2"`, `"exp2"`, `"exp2*"`, `"cosh2"`, `"cosh2*"`,
    /// `"gauss2"`, or `"sq:<name>"`.
    pub fn from_name(name: &str) -> Result<Self> {
        let name = name.trim();
        if let Some(rest) = name.strip_prefix("sq:") {
            return Ok(Self::from_name(rest)?.squared());
        }
        if let Some(rest) = name.strip_prefix("power:") {
            let alpha: f64 = rest
                .parse()
                .map_err(|_| Error::UnknownPreset(name.to_string()))?;
            return Self::power(alpha);
        }
        match name {
            "exp2" => Ok(Self::exp2()),
            "exp2*" => Ok(Self::exp2_conjugate()),
            "cosh2" => Ok(Self::cosh2()),
            "cosh2*" => Ok(Self::cosh2_conjugate()),
            "gauss2" => Ok(Self::gauss2()),
            _ => Err(Error::UnknownPreset(name.to_string())),
        }
    }

    /// Display name, e.g. `"cosh2"` or `"sq:cosh2"`.
    pub fn name(&self) -> String {
        self.kind.name()
    }

    /// `Phi(x)`, extended by symmetry to negative arguments.
    pub fn value(&self, x: f64) -> f64 {
        self.kind.value(x)
    }

    /// Right derivative `phi(u)` at `u >= 0`.
    pub fn phi(&self, u: f64) -> f64 {
        self.kind.phi(u)
    }

    /// `ln Phi(x)`, stable for arguments where `Phi` overflows.
    pub fn ln_value(&self, x: f64) -> f64 {
        self.kind.ln_value(x)
    }

    /// The conjugate Young function. Closed form for the built-in pairs,
    /// numeric inversion otherwise; the conjugate of a numeric conjugate is
    /// the original function (conjugation is involutive on this class).
    pub fn conjugate(&self) -> Result<Self> {
        let kind = match &self.kind {
            Kind::Power { alpha } => Kind::Power { alpha: alpha / (alpha - 1.0) },
            Kind::Exp2 => Kind::Exp2Conj,
            Kind::Exp2Conj => Kind::Exp2,
            Kind::Cosh2 => Kind::Cosh2Conj,
            Kind::Cosh2Conj => Kind::Cosh2,
            Kind::NumericConjugate(inner) => (**inner).clone(),
            other => {
                self.validate_increasing()?;
                Kind::NumericConjugate(Box::new(other.clone()))
            }
        };
        Ok(Self { kind })
    }

    /// Force the numeric conjugation path (inverse derivative by bisection,
    /// primitive by adaptive quadrature) even when a closed form exists.
    /// Used to cross-validate the numeric engine against the closed forms.
    pub fn conjugate_numeric(&self) -> Result<Self> {
        self.validate_increasing()?;
        Ok(Self {
            kind: Kind::NumericConjugate(Box::new(self.kind.clone())),
        })
    }

    /// Probe that the right derivative is strictly increasing on a geometric
    /// grid spanning `[1e-6, 1e3]`.
    fn validate_increasing(&self) -> Result<()> {
        let mut u = 1e-6_f64;
        let mut prev = self.phi(0.0);
        while u <= 1e3 {
            let cur = self.phi(u);
            if cur.is_finite() && prev.is_finite() && cur <= prev {
                return Err(Error::NotIncreasing { at: u });
            }
            if cur.is_finite() {
                prev = cur;
            }
            u *= 1.35;
        }
        Ok(())
    }

    /// Young inequality gap and Legendre residual at `(x, y)`, `x, y >= 0`.
    pub fn check_young_legendre(&self, x: f64, y: f64) -> Result<YoungCheck> {
        let conj = self.conjugate()?;
        let px = self.phi(x);
        Ok(YoungCheck {
            young_gap: self.value(x) + conj.value(y) - x * y,
            legendre_residual: self.value(x) + conj.value(px) - x * px,
        })
    }
}

/// Certify eventual domination `Phi1 <= Phi2(k .)` beyond a threshold.
///
/// Scans `k` over `k_grid` and thresholds over `threshold_grid`, probing a
/// geometric grid from the threshold up to `1e6` (comparisons run in log
/// scale so overflowing values still order correctly). The certificate only
/// speaks for the probed range.
pub fn eventually_dominates(
    phi1: &YoungFunction,
    phi2: &YoungFunction,
    k_grid: &[f64],
    threshold_grid: &[f64],
) -> DominationCertificate {
    const PROBE_MAX: f64 = 1e6;
    const PROBES_PER_DECADE: usize = 24;
    let mut last_failure = None;
    for &k in k_grid {
        if !(k > 0.0) {
            continue;
        }
        'thresholds: for &x_bar in threshold_grid {
            if !(x_bar >= 0.0) || x_bar >= PROBE_MAX {
                continue;
            }
            let lo = x_bar.max(1e-9);
            let decades = (PROBE_MAX / lo).log10();
            let steps = ((decades * PROBES_PER_DECADE as f64).ceil() as usize).max(8);
            let ratio = (PROBE_MAX / lo).powf(1.0 / steps as f64);
            // Probe the threshold itself first (x = 0 is trivially fine).
            let mut x = if x_bar == 0.0 { lo } else { x_bar };
            for _ in 0..=steps {
                let lhs = phi1.ln_value(x);
                let rhs = phi2.ln_value(k * x);
                let slack = 1e-10 * lhs.abs().max(1.0);
                if !(lhs <= rhs + slack) {
                    last_failure = Some(x);
                    continue 'thresholds;
                }
                x *= ratio;
                if x > PROBE_MAX * 1.0001 {
                    break;
                }
            }
            return DominationCertificate {
                holds: true,
                scale: k,
                threshold: x_bar,
                probe_max: PROBE_MAX,
                counterexample: None,
            };
        }
    }
    DominationCertificate {
        holds: false,
        scale: f64::NAN,
        threshold: f64::NAN,
        probe_max: PROBE_MAX,
        counterexample: last_failure,
    }
}

/// Default scale grid for domination certificates: powers of two up to 1024.
pub fn default_scale_grid() -> Vec<f64> {
    (0..=10).map(|i| (1u32 << i) as f64).collect()
}

/// Default threshold grid for domination certificates.
pub fn default_threshold_grid() -> Vec<f64> {
    vec![0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 256.0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::adaptive_simpson;
    use proptest::prelude::*;

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn built_in_values_match_closed_forms() {
        let cosh2 = YoungFunction::cosh2();
        assert!((cosh2.value(1.0) - (1f64.cosh() - 1.0)).abs() < 1e-15);
        assert!((cosh2.value(-1.0) - cosh2.value(1.0)).abs() == 0.0);
        let gauss2 = YoungFunction::gauss2();
        assert!((gauss2.value(1.0) - (0.5f64.exp() - 1.0)).abs() < 1e-15);
        let sq = YoungFunction::cosh2().squared();
        assert!((sq.value(1.0) - 0.543_080_634_815_243_7).abs() < 1e-15);
        assert_eq!(sq.name(), "sq:cosh2");
        let p = YoungFunction::power(2.0).unwrap();
        assert!((p.value(3.0) - 4.5).abs() < 1e-15);
    }

    #[test]
    fn right_derivative_matches_finite_differences() {
        let h = 1e-6;
        for phi in [
            YoungFunction::power(2.5).unwrap(),
            YoungFunction::exp2(),
            YoungFunction::exp2_conjugate(),
            YoungFunction::cosh2(),
            YoungFunction::cosh2_conjugate(),
            YoungFunction::gauss2(),
            YoungFunction::cosh2().squared(),
        ] {
            for u in [0.3, 1.0, 2.2] {
                let fd = (phi.value(u + h) - phi.value(u - h)) / (2.0 * h);
                assert!(
                    rel_close(fd, phi.phi(u), 1e-6),
                    "{} at {u}: fd {fd} vs phi {}",
                    phi.name(),
                    phi.phi(u)
                );
            }
        }
    }

    #[test]
    fn conjugate_closed_pairs() {
        let p3 = YoungFunction::power(3.0).unwrap();
        let conj = p3.conjugate().unwrap();
        assert_eq!(conj.name(), "power:1.5");
        // Conjugate exponents satisfy 1/a + 1/b = 1.
        let e2 = YoungFunction::exp2().conjugate().unwrap();
        assert_eq!(e2.name(), "exp2*");
        // (1+y) ln(1+y) - y at y = 1.
        assert!((e2.value(1.0) - (2.0 * LN_2 - 1.0)).abs() < 1e-15);
        let c2 = YoungFunction::cosh2().conjugate().unwrap();
        assert_eq!(c2.name(), "cosh2*");
        let closed = 1f64.asinh() - (2f64.sqrt() - 1.0);
        assert!((c2.value(1.0) - closed).abs() < 1e-15);
        assert!((closed - 0.467_160_024_646_448).abs() < 1e-13);
    }

    #[test]
    fn cosh2_conjugate_agrees_with_quadrature_oracle() {
        // Independent oracle: integrate asinh directly.
        let c2 = YoungFunction::cosh2().conjugate().unwrap();
        for y in [0.25, 0.5, 1.0, 2.0, 5.0] {
            let oracle = adaptive_simpson(&|v: f64| v.asinh(), 0.0, y, 1e-13);
            assert!(
                rel_close(c2.value(y), oracle, 1e-10),
                "y = {y}: {} vs {oracle}",
                c2.value(y)
            );
        }
    }

    #[test]
    fn numeric_conjugation_reproduces_closed_forms() {
        let numeric = YoungFunction::cosh2().conjugate_numeric().unwrap();
        let closed = YoungFunction::cosh2_conjugate();
        for y in [0.1, 0.5, 1.0, 2.0, 4.0] {
            assert!(
                rel_close(numeric.value(y), closed.value(y), 1e-9),
                "Psi({y}): {} vs {}",
                numeric.value(y),
                closed.value(y)
            );
            assert!(rel_close(numeric.phi(y), closed.phi(y), 1e-9));
        }
        let numeric = YoungFunction::exp2().conjugate_numeric().unwrap();
        let closed = YoungFunction::exp2_conjugate();
        for y in [0.1, 1.0, 3.0] {
            assert!(rel_close(numeric.value(y), closed.value(y), 1e-9));
        }
    }

    #[test]
    fn double_conjugation_returns_the_original() {
        // Closed pairs round-trip by kind.
        for phi in [
            YoungFunction::power(2.0).unwrap(),
            YoungFunction::exp2(),
            YoungFunction::cosh2(),
        ] {
            let back = phi.conjugate().unwrap().conjugate().unwrap();
            for x in [0.0, 0.5, 1.0, 3.0, 7.0] {
                assert!(rel_close(back.value(x), phi.value(x), 1e-12));
            }
        }
        // gauss2 routes through the numeric conjugate and back.
        let g = YoungFunction::gauss2();
        let back = g.conjugate().unwrap().conjugate().unwrap();
        for x in [0.5, 1.0, 2.0] {
            assert!(rel_close(back.value(x), g.value(x), 1e-12));
        }
    }

    #[test]
    fn nested_numeric_conjugation_recovers_cosh2() {
        let twice = YoungFunction::cosh2()
            .conjugate_numeric()
            .unwrap()
            .conjugate_numeric()
            .unwrap();
        let direct = YoungFunction::cosh2();
        for x in [0.5, 1.0, 2.0] {
            assert!(
                rel_close(twice.value(x), direct.value(x), 1e-7),
                "x = {x}: {} vs {}",
                twice.value(x),
                direct.value(x)
            );
        }
    }

    #[test]
    fn young_inequality_gap_on_grid() {
        // 100 x 100 grid over [0, 10]^2; the numeric conjugate of gauss2 is
        // precomputed per column so the grid stays cheap.
        let pairs = [
            YoungFunction::power(2.5).unwrap(),
            YoungFunction::exp2(),
            YoungFunction::cosh2(),
            YoungFunction::gauss2(),
        ];
        for phi in pairs {
            let conj = phi.conjugate().unwrap();
            let xs: Vec<f64> = (0..100).map(|i| 10.0 * i as f64 / 99.0).collect();
            let phi_vals: Vec<f64> = xs.iter().map(|&x| phi.value(x)).collect();
            let conj_vals: Vec<f64> = xs.iter().map(|&y| conj.value(y)).collect();
            for (i, &x) in xs.iter().enumerate() {
                for (j, &y) in xs.iter().enumerate() {
                    let gap = phi_vals[i] + conj_vals[j] - x * y;
                    assert!(
                        gap >= -1e-10,
                        "{}: negative gap {gap} at ({x}, {y})",
                        phi.name()
                    );
                }
            }
        }
    }

    #[test]
    fn legendre_equality_on_closed_pairs() {
        for phi in [
            YoungFunction::power(2.0).unwrap(),
            YoungFunction::power(3.0).unwrap(),
            YoungFunction::exp2(),
            YoungFunction::cosh2(),
            YoungFunction::exp2_conjugate(),
            YoungFunction::cosh2_conjugate(),
        ] {
            for i in 0..100 {
                let x = 10.0 * i as f64 / 99.0;
                let check = phi.check_young_legendre(x, 1.0).unwrap();
                let scale = 1.0 + phi.value(x).abs() + x * phi.phi(x).abs();
                assert!(
                    check.legendre_residual.abs() <= 1e-8 * scale.max(1.0) && check.legendre_residual.abs() <= 1e-7,
                    "{} at x = {x}: residual {}",
                    phi.name(),
                    check.legendre_residual
                );
                assert!(check.young_gap >= -1e-10);
            }
        }
        // Numeric conjugate pair checked on a moderate range.
        let g = YoungFunction::gauss2();
        for x in [0.0, 0.5, 1.0, 1.5, 2.0] {
            let check = g.check_young_legendre(x, 1.0).unwrap();
            assert!(
                check.legendre_residual.abs() < 1e-8,
                "gauss2 at {x}: {}",
                check.legendre_residual
            );
        }
    }

    #[test]
    fn domination_table_for_built_ins() {
        let ks = default_scale_grid();
        let xs = default_threshold_grid();
        let p2 = YoungFunction::power(2.0).unwrap();
        let cosh2 = YoungFunction::cosh2();
        let gauss2 = YoungFunction::gauss2();
        let sq_cosh2 = YoungFunction::cosh2().squared();

        // Reflexivity with k = 1 from the origin.
        let refl = eventually_dominates(&cosh2, &cosh2, &ks, &xs);
        assert!(refl.holds && refl.scale == 1.0 && refl.threshold == 0.0);

        assert!(eventually_dominates(&p2, &cosh2, &ks, &xs).holds);
        // Polynomials never absorb exponential growth.
        let no = eventually_dominates(&cosh2, &p2, &ks, &xs);
        assert!(!no.holds && no.counterexample.is_some());

        // gauss2 and sq:cosh2 dominate each other (equivalence).
        assert!(eventually_dominates(&gauss2, &sq_cosh2, &ks, &xs).holds);
        assert!(eventually_dominates(&sq_cosh2, &gauss2, &ks, &xs).holds);

        // Transitivity spot check: power:2 < cosh2 < gauss2.
        assert!(eventually_dominates(&cosh2, &gauss2, &ks, &xs).holds);
        assert!(eventually_dominates(&p2, &gauss2, &ks, &xs).holds);
    }

    #[test]
    fn conjugation_reverses_domination() {
        let ks = default_scale_grid();
        let xs = default_threshold_grid();
        let p15 = YoungFunction::power(1.5).unwrap();
        let cosh2 = YoungFunction::cosh2();
        assert!(eventually_dominates(&p15, &cosh2, &ks, &xs).holds);
        let rev = eventually_dominates(
            &cosh2.conjugate().unwrap(),
            &p15.conjugate().unwrap(),
            &ks,
            &xs,
        );
        assert!(rev.holds, "conjugates should dominate in reverse order");
    }

    #[test]
    fn squared_product_bound_pointwise() {
        // Phi(ab) <= (Phi(a^2) + Phi(b^2)) / 2 via convexity + monotonicity.
        let phi = YoungFunction::cosh2();
        for i in 0..40 {
            for j in 0..40 {
                let a = 0.1 * i as f64;
                let b = 0.1 * j as f64;
                let lhs = phi.value(a * b);
                let rhs = 0.5 * (phi.value(a * a) + phi.value(b * b));
                assert!(lhs <= rhs + 1e-12 * rhs.abs().max(1.0), "a={a} b={b}");
            }
        }
    }

    #[test]
    fn custom_young_function_from_sinh_grid() {
        let us: Vec<f64> = (0..=240).map(|i| 6.0 * i as f64 / 240.0).collect();
        let phis: Vec<f64> = us.iter().map(|u| u.sinh()).collect();
        let custom = YoungFunction::custom("sinh-grid", us, phis).unwrap();
        let cosh2 = YoungFunction::cosh2();
        for x in [0.3, 1.0, 2.0, 4.0] {
            assert!(
                rel_close(custom.value(x), cosh2.value(x), 1e-5),
                "x = {x}: {} vs {}",
                custom.value(x),
                cosh2.value(x)
            );
        }
        // Its numeric conjugate tracks the closed-form conjugate.
        let conj = custom.conjugate().unwrap();
        let closed = YoungFunction::cosh2_conjugate();
        for y in [0.5, 1.0, 2.0] {
            assert!(rel_close(conj.value(y), closed.value(y), 1e-4));
        }
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert!(YoungFunction::power(1.0).is_err());
        assert!(YoungFunction::power(0.5).is_err());
        let err = YoungFunction::custom("bad", vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 0.5]);
        assert!(matches!(err, Err(Error::NotIncreasing { .. })));
        assert!(YoungFunction::from_name("nope").is_err());
        assert!(YoungFunction::from_name("power:abc").is_err());
    }

    #[test]
    fn names_round_trip() {
        for name in ["power:2", "power:1.5", "exp2", "exp2*", "cosh2", "cosh2*", "gauss2", "sq:cosh2"] {
            let phi = YoungFunction::from_name(name).unwrap();
            assert_eq!(phi.name(), name);
        }
    }

    proptest! {
        #[test]
        fn young_gap_nonnegative_for_powers(alpha in 1.1f64..6.0, x in 0.0f64..20.0, y in 0.0f64..20.0) {
            let phi = YoungFunction::power(alpha).unwrap();
            let check = phi.check_young_legendre(x, y).unwrap();
            prop_assert!(check.young_gap >= -1e-9 * (1.0 + phi.value(x).abs() + x * y));
        }

        #[test]
        fn power_conjugate_exponents(alpha in 1.05f64..8.0) {
            let conj = YoungFunction::power(alpha).unwrap().conjugate().unwrap();
            let name = conj.name();
            let beta: f64 = name.strip_prefix("power:").unwrap().parse().unwrap();
            prop_assert!((1.0 / alpha + 1.0 / beta - 1.0).abs() < 1e-12);
        }

        #[test]
        fn legendre_residual_small_for_closed_pairs(x in 0.0f64..10.0) {
            for phi in [YoungFunction::power(2.0).unwrap(), YoungFunction::exp2(), YoungFunction::cosh2()] {
                let check = phi.check_young_legendre(x, 0.0).unwrap();
                let scale = (1.0 + phi.value(x).abs() + x * phi.phi(x)).max(1.0);
                prop_assert!(check.legendre_residual.abs() <= 1e-9 * scale);
            }
        }
    }
}
