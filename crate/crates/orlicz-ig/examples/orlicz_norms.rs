//! The three norms on a Gaussian Orlicz space: the Luxemburg gauge, the
//! dual (Amemiya) norm, and the moment norm, with the classical
//! relations between them checked numerically.
//!
//! Run with: cargo run --example orlicz_norms

use orlicz_ig::error::Result;
use orlicz_ig::field::RandomField;
use orlicz_ig::measure::GaussianIntegrator;
use orlicz_ig::norms;
use orlicz_ig::young::YoungFunction;

fn main() -> Result<()> {
    let integ = GaussianIntegrator::default_for_dim(1);
    let cosh2 = YoungFunction::cosh2();
    let fields = ["x", "x^2 - 1", "0.5 * x + 1", "tanh(3 * x)", "abs(x)"];

    // The Luxemburg gauge is the scale rho with E[Phi(|f|/rho)] = 1; the
    // dual norm is computed as the Amemiya infimum and sits within a
    // factor of two of the gauge.
    println!("gauge and dual norm under cosh - 1");
    println!("{:>14} {:>14} {:>14} {:>10}", "field", "gauge", "dual", "dual/gauge");
    for expr in fields {
        let f = RandomField::parse(1, expr)?;
        let lux = norms::luxemburg_norm(&f, &cosh2, &integ)?;
        let dual = norms::dual_norm(&f, &cosh2, &integ)?;
        let ratio = dual.value / lux.value;
        println!(
            "{:>14} {:>14.9} {:>14.9} {:>10.6}",
            expr, lux.value, dual.value, ratio
        );
        assert!(
            ratio >= 1.0 - 1e-9 && ratio <= 2.0 + 1e-9,
            "norm equivalence constants violated"
        );
    }

    // Under a pure power function the gauge reproduces the Lebesgue
    // norm: |f|_alpha = alpha^(1/alpha) * gauge_alpha(f).
    println!("\npower correspondence |f|_alpha = alpha^(1/alpha) x gauge");
    let shared = GaussianIntegrator::quadrature_fixed(1, 128);
    for alpha in [1.5, 2.0, 3.0] {
        let phi = YoungFunction::power(alpha)?;
        let f = RandomField::parse(1, "x^2 - 1")?;
        let gauge = norms::luxemburg_norm(&f, &phi, &shared)?.value;
        let lp = shared
            .expect_with(&f, |v| v.abs().powf(alpha))?
            .value()
            .expect("finite moment")
            .powf(1.0 / alpha);
        println!(
            "  alpha = {alpha}:  |f|_alpha = {lp:.12},  scaled gauge = {:.12}",
            alpha.powf(1.0 / alpha) * gauge
        );
    }

    // The moment norm sup_k ((2k)!^{-1} E[f^{2k}])^{1/2k} sandwiches the
    // cosh - 1 gauge: M <= gauge <= sqrt(2) M.
    println!("\nmoment-norm sandwich M <= gauge <= sqrt(2) M");
    for expr in ["x", "x^2 - 1"] {
        let f = RandomField::parse(1, expr)?;
        let m = norms::moment_norm(&f, &integ, 20)?;
        let lux = norms::luxemburg_norm(&f, &cosh2, &integ)?.value;
        println!(
            "  {expr}: M = {:.9} (attained at k = {}), gauge = {:.9}, sqrt(2) M = {:.9}",
            m.value,
            m.attained_at,
            lux,
            2f64.sqrt() * m.value
        );
        assert!(m.value <= lux && lux <= 2f64.sqrt() * m.value * (1.0 + 1e-3));
    }

    // Fields outside the space are rejected, not silently truncated.
    let hot = RandomField::parse(1, "exp(x^2)")?;
    match norms::luxemburg_norm(&hot, &cosh2, &integ) {
        Err(e) => println!("\ngauge of exp(x^2): {e}"),
        Ok(r) => println!("\ngauge of exp(x^2): unexpectedly finite ({})", r.value),
    }
    Ok(())
}
