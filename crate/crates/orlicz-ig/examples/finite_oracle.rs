//! The exact finite-space engine: on a finite probability space every
//! expectation is a finite sum, so gauges, cumulants, and information
//! matrices have closed-form values that cross-check the quadrature
//! pipeline. Quantizing the Gaussian at the nodes and weights of the
//! same quadrature rule makes the two engines agree to rounding.
//!
//! Run with: cargo run --example finite_oracle

use orlicz_ig::error::Result;
use orlicz_ig::field::RandomField;
use orlicz_ig::manifold;
use orlicz_ig::measure::GaussianIntegrator;
use orlicz_ig::norms;
use orlicz_ig::oracle::{self, FiniteSpace};
use orlicz_ig::young::YoungFunction;

fn main() -> Result<()> {
    // A 16-point quantization of the standard Gaussian.
    let (space, nodes) = FiniteSpace::quantized_gaussian(16)?;
    println!(
        "quantized Gaussian: {} atoms, |1 - naive weight sum| = {:.1e}",
        space.len(),
        (1.0 - space.weights().iter().sum::<f64>()).abs()
    );

    // Exact gauge on the finite space vs the quadrature pipeline at the
    // same order: the same discrete measure, two very different code
    // paths.
    let phi = YoungFunction::cosh2();
    let f = RandomField::parse(1, "tanh(x)")?;
    let values: Vec<f64> = nodes.iter().map(|&x| f.eval(&[x])).collect();
    let exact = oracle::exact_luxemburg(&values, &phi, &space)?;
    let integ = GaussianIntegrator::quadrature_fixed(1, 16);
    let pipeline = norms::luxemburg_norm(&f, &phi, &integ)?.value;
    println!("\ngauge of tanh(x) under cosh - 1 at order 16");
    println!("  exact finite sum     = {exact:.15}");
    println!("  quadrature pipeline  = {pipeline:.15}");
    println!("  gap                  = {:.2e}", (exact - pipeline).abs());

    // Exponential-model arithmetic is a few exact sums: K = log E[e^u]
    // and the tilted density.
    let u: Vec<f64> = nodes.iter().map(|&x| 0.3 * x).collect();
    let model = oracle::exact_model(&space, &u)?;
    println!(
        "\nexact model of u = 0.3 x: K = {:.15} (pipeline {:.15})",
        model.cumulant,
        manifold::cumulant(&RandomField::parse(1, "0.3 * x")?, &integ)?
    );

    // Fisher information two ways on the finite space: centered score
    // covariance vs the raw-moment quotient for the Hessian of log Z.
    let stats: Vec<Vec<f64>> = vec![
        nodes.iter().map(|&x| x).collect(),
        nodes.iter().map(|&x| (x * x - 1.0) / 2f64.sqrt()).collect(),
    ];
    let fisher = oracle::exact_fisher(&space, &stats, &[0.1, 0.1])?;
    println!("\nexact Fisher information at theta = (0.1, 0.1)");
    for row in &fisher.covariance {
        println!("  [{:>18.15}, {:>18.15}]", row[0], row[1]);
    }
    println!("  two-route gap = {:.2e}", fisher.max_difference);

    // Equivalent-model conditions between two explicit densities on a
    // four-point space: the geometric arc Z(t) = E[p^(1-t) q^t] stays
    // finite beyond [0, 1], is log-convex, and the weighted gauges are
    // equivalent.
    let space4 = FiniteSpace::from_weights(vec![0.25, 0.25, 0.25, 0.25])?;
    let p = [1.6, 1.2, 0.8, 0.4];
    let q = [0.4, 0.8, 1.2, 1.6];
    let report = oracle::exact_portmanteau(&space4, &p, &q)?;
    println!("\nequivalent-model check on a 4-point space");
    println!("  arc finite:       {}", report.arc_finite);
    println!("  log-convex:       {}", report.log_convex);
    print!("  Z(t) on [0,1]:   ");
    for (t, z) in report.arc.iter().filter(|(t, _)| (0.0..=1.0).contains(t)) {
        print!(" Z({t:.2}) = {z:.6} ");
    }
    println!();
    println!(
        "  gauge-equivalence constants: [{:.6}, {:.6}]",
        report.equivalence.0, report.equivalence.1
    );
    println!("  all conditions hold: {}", report.conditions_hold);

    // The frozen regression corpus is generated from this engine.
    let fixtures = oracle::generate_fixtures()?;
    println!("\nregression corpus: {} fixtures from the exact engine", fixtures.len());
    Ok(())
}
