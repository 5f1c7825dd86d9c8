//! Concentration from a single number: once the cosh - 1 gauge of a
//! field is known, its tails decay exponentially with explicit
//! constants. Also shows the exponential-moment frontier that separates
//! the Orlicz class from the full space, and the truncation dichotomy
//! that goes with it.
//!
//! Run with: cargo run --example tail_bounds

use orlicz_ig::error::Result;
use orlicz_ig::field::RandomField;
use orlicz_ig::measure::GaussianIntegrator;
use orlicz_ig::norms;
use orlicz_ig::young::YoungFunction;

fn main() -> Result<()> {
    let integ = GaussianIntegrator::default_for_dim(1);
    let cosh2 = YoungFunction::cosh2();

    // A certified tail table: P(|f| > t) <= min(1, 1/Phi(t/rho)) always,
    // and <= 4 exp(-t/rho) for the exponential-type presets.
    let f = RandomField::parse(1, "x^2 - 1")?;
    let thresholds: Vec<f64> = (1..=8).map(|i| 1.5 * i as f64).collect();
    let cert = norms::tail_certificate(&f, &cosh2, &integ, &thresholds)?;
    println!(
        "tail certificate for f = x^2 - 1: gauge = {:.9}, bound 4 exp(-t/gauge) for t >= {:.3}",
        cert.norm,
        cert.valid_from.expect("exponential preset")
    );
    println!("{:>6} {:>16} {:>16} {:>16}", "t", "P(|f| > t)", "Chebyshev", "exponential");
    for c in &cert.checks {
        println!(
            "{:>6} {:>16.9e} {:>16.9e} {:>16.9e}",
            c.threshold,
            c.probability,
            c.chebyshev_bound,
            c.exponential_bound.expect("exponential preset")
        );
    }
    assert!(cert.holds);

    // The exponential-moment frontier: E[exp(lambda x^2)] is finite for
    // lambda < 1/2 and divergent beyond, so x^2 lies in the space
    // L^cosh2 but not in the class of everywhere-finite moment
    // generating functions.
    let square = RandomField::parse(1, "x^2")?;
    let grid = [0.1, 0.2, 0.3, 0.4, 0.45, 0.49, 0.5, 0.51, 0.6];
    let verdict = norms::orlicz_class_member(&square, &integ, &grid)?;
    println!("\nexponential moments of x^2");
    for (lambda, value) in &verdict.probes {
        match value {
            Some(v) => println!("  E[exp({lambda} x^2)] = {v:.6}"),
            None => println!("  E[exp({lambda} x^2)] diverges"),
        }
    }
    println!(
        "frontier: finite through lambda = {:?}, divergent from lambda = {:?}",
        verdict.max_finite_lambda, verdict.min_diverged_lambda
    );

    // Truncation dichotomy. Restricting a field to |x| <= N and letting
    // N grow approximates it in the gauge exactly when the field lies in
    // the class: the residual moduli E[Phi(lambda |f|) 1(|x| > N)] then
    // fall to zero. For x^2 at lambda = 0.6 every residual is divergent.
    println!("\ntruncation residuals E[Phi(lambda |f|) 1(|x| > N)]");
    let radii = [1.0, 2.0, 4.0, 8.0];
    for (expr, lambda) in [("x", 1.0), ("x^2", 0.6)] {
        let g = RandomField::parse(1, expr)?;
        let report = norms::truncation_convergence(&g, &cosh2, &integ, &radii, lambda)?;
        print!("  f = {expr}, lambda = {lambda}: ");
        for row in &report.rows {
            match row.modulus {
                Some(m) => print!("N={} -> {:.3e}  ", row.radius, m),
                None => print!("N={} -> divergent  ", row.radius),
            }
        }
        println!();
    }
    Ok(())
}
