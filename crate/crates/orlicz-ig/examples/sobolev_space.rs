//! The Gaussian Orlicz-Sobolev space: a field belongs when it is
//! sub-exponential and every partial derivative is sub-Gaussian. Shows
//! the membership battery, the o(t) translation increments, the chain
//! rule under Lipschitz post-composition (including a one-layer
//! network), and the local Lebesgue embedding.
//!
//! Run with: cargo run --example sobolev_space

use orlicz_ig::error::Result;
use orlicz_ig::field::{Activation, RandomField};
use orlicz_ig::measure::GaussianIntegrator;
use orlicz_ig::sobolev;

fn main() -> Result<()> {
    let integ = GaussianIntegrator::default_for_dim(1);

    // Membership: the field gauge lives under cosh - 1, the gradient
    // gauges under its square (Gaussian-type growth).
    println!("membership reports (gauge of f; gauge of f')");
    for expr in ["x", "x^2 - 1", "tanh(3 * x)", "abs(x)", "exp(x^2)"] {
        let f = RandomField::parse(1, expr)?;
        let report = sobolev::sobolev_membership(&f, &integ)?;
        let show = |v: Option<f64>| match v {
            Some(x) => format!("{x:.6}"),
            None => "divergent".to_string(),
        };
        println!(
            "  {expr:>12}: member = {:<5} f: {:>10}, f': {:>10}",
            report.member,
            show(report.f_norm),
            show(report.grad_norms[0])
        );
    }

    // Translation increments: tau_{-th} f - f - t grad f . h is o(t) in
    // L^2(gamma); halving the step should shrink the remainder
    // super-linearly (ratio well below 1/2... here <= 0.6 certifies it).
    println!("\ntranslation increments at t = 0.2, direction h = 1");
    for expr in ["tanh(x)", "x^2 - 1", "sigmoid(x)"] {
        let f = RandomField::parse(1, expr)?;
        let inc = sobolev::translation_increment_check(&f, &[1.0], 0.2, 2.0, &integ)?;
        println!(
            "  {expr:>10}: identity gap = {:.2e}, remainder = {:.4e}, halved = {:.4e}, ratio = {:.3}",
            inc.identity_gap, inc.remainder, inc.remainder_half, inc.ratio
        );
        assert!(inc.superlinear);
    }

    // Lipschitz post-composition stays in the space, and the weak
    // derivative of G(f) is G'(f) f' (tested against compactly supported
    // bump functions).
    let bumps = sobolev::bump_presets(1)?;
    let f = RandomField::parse(1, "x^2 - 1")?;
    for activation in [Activation::Tanh, Activation::Abs] {
        let chain = sobolev::lipschitz_composition(activation, &f, &bumps, &integ)?;
        println!(
            "\n{}(x^2 - 1): Lipschitz constant {}, member = {}, chain-rule residual = {:.2e}",
            activation.name(),
            chain.lipschitz_constant,
            chain.composite.member,
            chain.chain_residual
        );
        assert!(chain.composite.member);
    }

    // A one-layer network built from coordinate fields is again a
    // member; this is the closure property that makes the space a home
    // for function approximators.
    let inputs = vec![RandomField::coordinate(2, 0)?, RandomField::coordinate(2, 1)?];
    let integ2 = GaussianIntegrator::default_for_dim(2);
    let (net, report) = sobolev::neuron(
        &[vec![1.0, -0.5], vec![0.3, 0.8]],
        &[0.1, -0.2],
        &[1.0, 0.5],
        Activation::Tanh,
        &inputs,
        &integ2,
    )?;
    println!(
        "\ntwo-unit tanh network on (x, y): member = {}, total gauge = {:?}, dim = {}",
        report.member,
        report.total,
        net.dim()
    );

    // Local embedding: on a ball of radius rho the 2k-th Lebesgue moment
    // is controlled by the global gauge.
    println!("\nlocal L^2k embedding over |x| <= rho");
    for (expr, rho, k) in [("x", 1.0, 1usize), ("x^2 - 1", 1.5, 2), ("tanh(3 * x)", 2.0, 3)] {
        let f = RandomField::parse(1, expr)?;
        let emb = sobolev::local_embedding_bound(&f, rho, k, &integ)?;
        println!(
            "  {expr:>10} rho={rho} k={k}: local moment {:.6e} <= bound {:.6e} : {}",
            emb.lhs, emb.rhs, emb.pass
        );
        assert!(emb.pass);
    }
    Ok(())
}
