//! The maximal exponential model around the standard Gaussian: points
//! are densities exp(u - K(u)) for centered statistics u, the chart
//! recovers u from the density, and parametric sub-families carry a
//! Fisher information computable two independent ways.
//!
//! Run with: cargo run --example exponential_model

use orlicz_ig::error::Result;
use orlicz_ig::field::RandomField;
use orlicz_ig::manifold::{self, ExpFamily, ExpModelPoint};
use orlicz_ig::measure::GaussianIntegrator;

fn main() -> Result<()> {
    let integ = GaussianIntegrator::default_for_dim(1);

    // A model point from a centered statistic. For u = a x the cumulant
    // is a^2/2 and the density is a translated Gaussian.
    let u = RandomField::parse(1, "0.5 * x")?;
    let point = ExpModelPoint::new(u, &integ)?;
    println!("point u = 0.5 x:");
    println!("  K(u)         = {:.12}  (exact a^2/2 = 0.125)", point.cumulant());
    let check = point.check(&integ)?;
    println!("  density mass = {:.12}", check.density_mass);
    println!("  E[u]         = {:.3e}", check.statistic_mean);

    // Statistics that merely miss centering are re-centered; statistics
    // whose exponential moment diverges are rejected outright.
    let shifted = RandomField::parse(1, "x + 0.3")?;
    let recentered = ExpModelPoint::new_centered(shifted, &integ)?;
    println!(
        "\nre-centered x + 0.3 has K = {:.12} (the shift is absorbed)",
        recentered.cumulant()
    );
    match ExpModelPoint::new(RandomField::parse(1, "x^2")?, &integ) {
        Err(e) => println!("u = x^2 is rejected: {e}"),
        Ok(_) => println!("u = x^2 was accepted (unexpected)"),
    }

    // The chart inverts the parametrization: starting from a density,
    // recover the centered statistic and its cumulant.
    let density = RandomField::parse(1, "exp(0.5 * x - 0.125)")?;
    let recovered = manifold::chart(&density, &integ)?;
    println!(
        "\nchart of exp(0.5 x - 0.125): K = {:.12}, sup gap to 0.5 x = {:.3e}",
        recovered.cumulant(),
        manifold::sup_gap(recovered.statistic(), &RandomField::parse(1, "0.5 * x")?)
    );

    // Moving along the model: the cumulant of v relative to the point p
    // is K_p(v) = log E_p[e^v].
    let v = RandomField::parse(1, "0.25 * (x^2 - 1)")?;
    let centered_v = point.center(&v, &integ)?;
    let rel = manifold::relative_cumulant(&point, &centered_v, &integ)?;
    println!("\nrelative cumulant of 0.25(x^2 - 1) at the point: {rel:.12}");

    // A two-parameter exponential family spanned by orthonormal
    // statistics. The Fisher information comes out once as the
    // covariance of the scores and once as the Hessian of the cumulant;
    // the two routes agree.
    let family = ExpFamily::new(
        vec![
            RandomField::parse(1, "x")?,
            RandomField::parse(1, "(x^2 - 1) / 1.4142135623730951")?,
        ],
        &integ,
    )?;
    let theta = [0.1, 0.1];
    let fisher = manifold::cumulant_and_fisher(&family, &theta, &integ)?;
    println!("\ntwo-parameter family at theta = {theta:?}");
    println!("  kappa(theta)      = {:.12}", fisher.cumulant);
    println!("  grad kappa        = [{:.9}, {:.9}]", fisher.grad[0], fisher.grad[1]);
    println!("  information (score covariance):");
    for row in &fisher.covariance {
        println!("    [{:>12.9}, {:>12.9}]", row[0], row[1]);
    }
    println!("  max gap to the cumulant Hessian = {:.3e}", fisher.max_difference);
    assert!(fisher.max_difference < 1e-6);

    // The gradient of theta -> E_theta[f] equals Cov_theta(f, u_i); both
    // sides are computed independently.
    let f = RandomField::parse(1, "x^3")?;
    let derivative = manifold::expectation_derivative_check(&family, &theta, &f, &integ)?;
    println!(
        "\nd/dtheta E[x^3]: covariance route {:?}, finite differences {:?} (gap {:.2e})",
        derivative.covariance, derivative.finite_difference, derivative.max_residual
    );
    Ok(())
}
