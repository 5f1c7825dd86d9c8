//! Geometry at a model point: the Hyvarinen divergence between tilted
//! densities, the Otto (Wasserstein) inner product with its adjoint
//! identity, the logarithmic Sobolev inequality, and the isometry onto
//! the Hilbert sphere of half-densities.
//!
//! Run with: cargo run --example divergences

use orlicz_ig::error::Result;
use orlicz_ig::field::RandomField;
use orlicz_ig::manifold::{self, ExpModelPoint};
use orlicz_ig::measure::GaussianIntegrator;

fn main() -> Result<()> {
    let integ = GaussianIntegrator::default_for_dim(1);
    let x = RandomField::parse(1, "x")?;

    // Hyvarinen divergence between Gaussian tilts exp(a x - a^2/2): the
    // scores differ by the constant a - b, so the divergence is
    // (a - b)^2 / 2 regardless of the base point.
    println!("Hyvarinen divergence between linear tilts");
    for (a, b) in [(0.0, 1.0), (0.5, -0.5), (1.0, 1.0), (0.3, 0.7)] {
        let p = ExpModelPoint::new(x.scale(a), &integ)?;
        let q = ExpModelPoint::new(x.scale(b), &integ)?;
        let d = manifold::hyvarinen(&p, &q, &integ)?;
        println!("  a = {a:>4}, b = {b:>4}:  D = {d:.12}  ((a-b)^2/2 = {})", 0.5 * (a - b) * (a - b));
    }

    // The Otto inner product <f, g>_p = E[grad f . grad g p] and its
    // adjoint formulation through the weighted divergence operator.
    let p = ExpModelPoint::new(x.scale(0.5), &integ)?;
    let f = RandomField::parse(1, "x^2 - 1")?;
    let g = RandomField::parse(1, "tanh(x)")?;
    let inner = manifold::otto_inner(&f, &g, &p, &integ)?;
    let adj = manifold::otto_adjoint_check(&f, &g, &p, &integ)?;
    println!("\nOtto product at u = 0.5 x:");
    println!("  <x^2 - 1, tanh x>_p = {inner:.12}");
    println!("  adjoint route       = {:.12}  (residual {:.2e})", adj.adjoint, adj.residual);
    assert!(adj.residual < 1e-7);

    // Logarithmic Sobolev inequality E[p log p] <= 2 E[|grad sqrt p|^2]:
    // equality holds exactly for linear tilts, strict inequality
    // otherwise.
    println!("\nlog-Sobolev slack (energy - entropy)");
    for expr in ["0.8 * x", "0.25 * (x^2 - 1)", "0.5 * tanh(x)"] {
        let u = RandomField::parse(1, expr)?;
        let point = ExpModelPoint::new_centered(u, &integ)?;
        let rep = manifold::log_sobolev_check(&point, &integ)?;
        println!(
            "  u = {expr:>18}: entropy = {:.9}, energy = {:.9}, slack = {:+.3e}",
            rep.entropy, rep.energy, rep.slack
        );
        assert!(rep.holds);
    }

    // The square-root embedding p -> 2 sqrt(p) sends the model into the
    // sphere of radius 2; tangent vectors map isometrically, so the
    // covariance pairing of two velocities is preserved.
    let v1 = p.center(&RandomField::parse(1, "x^2")?, &integ)?;
    let v2 = p.center(&RandomField::parse(1, "x^3")?, &integ)?;
    let check = manifold::sphere_pairing_check(&p, &v1, &v2, &integ)?;
    println!("\nsphere embedding at u = 0.5 x:");
    println!("  E[(P/2)^2]   = {:.12} (mass 1)", check.mass);
    println!("  E[P Pdot]    = {:+.3e} (tangency)", check.tangency);
    println!("  pairing gap  = {:.3e}", check.pairing_gap);
    assert!((check.mass - 1.0).abs() < 1e-9 && check.pairing_gap < 1e-7);
    Ok(())
}
