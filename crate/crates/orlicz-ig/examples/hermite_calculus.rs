//! The Hermite toolbox: the probabilists' polynomials and their
//! recurrence, series expansions of nonlinear fields, and the raising
//! operator delta_i f = x_i f - d_i f with its integration-by-parts
//! identity E[f d_i g] = E[(delta_i f) g].
//!
//! Run with: cargo run --example hermite_calculus

use orlicz_ig::error::Result;
use orlicz_ig::field::RandomField;
use orlicz_ig::hermite::{self, HermiteSeries};
use orlicz_ig::measure::GaussianIntegrator;

fn main() -> Result<()> {
    let integ = GaussianIntegrator::default_for_dim(1);

    // He_0..He_5 on a few points, straight from the recurrence
    // He_{k+1}(x) = x He_k(x) - k He_{k-1}(x).
    println!("probabilists' Hermite polynomials");
    println!("{:>6} {:>10} {:>10} {:>10}", "k", "He_k(0)", "He_k(1)", "He_k(2)");
    for k in 0..=5 {
        println!(
            "{:>6} {:>10.3} {:>10.3} {:>10.3}",
            k,
            hermite::he_value(k, 0.0),
            hermite::he_value(k, 1.0),
            hermite::he_value(k, 2.0)
        );
    }

    // The raising operator generates the basis from the constant 1:
    // delta^k 1 = He_k.
    println!("\ndelta^k 1 reproduces He_k (coefficients of the series)");
    let mut ladder = HermiteSeries::constant(1, 1.0);
    for k in 1..=4usize {
        ladder = ladder.divergence(0);
        let expected = hermite::hermite(1, &[k])?;
        let same = ladder.coeffs() == expected.coeffs();
        println!("  k = {k}: coefficients {:?} match basis: {same}", ladder.coeffs());
        assert!(same);
    }

    // Integration by parts: E[f g'] = E[(x f - f') g]. Residuals vanish
    // for polynomial pairs.
    println!("\nintegration-by-parts residuals |E[f d g] - E[(delta f) g]|");
    for (j, k) in [(1usize, 2usize), (2, 3), (3, 4), (4, 5)] {
        let f = hermite::hermite(1, &[j])?.to_field();
        let g = hermite::hermite(1, &[k])?.to_field();
        let r = hermite::ibp_residual(&f, &g, 0, &integ)?;
        println!("  (He_{j}, He_{k}): {r:.3e}");
        assert!(r < 1e-10);
    }

    // Expansion of a smooth nonlinearity: coefficients c_a = E[f He_a]/a!
    // and the L^2 error of the reconstruction. tanh is odd, so even
    // coefficients vanish.
    println!("\nHermite expansion of tanh(x) up to degree 7");
    let f = RandomField::parse(1, "tanh(x)")?;
    let expansion = hermite::expand(&f, 7, &integ)?;
    for (alpha, c) in expansion.series.coeffs() {
        println!("  c_{:?} = {c:+.9}", alpha[0]);
    }
    println!("  L^2 reconstruction error = {:.3e}", expansion.reconstruction_error);

    // In two dimensions the same machinery works per axis; the mixed
    // basis element He_(1,2)(x, y) = x (y^2 - 1) has norm-squared
    // (1,2)! = 1! x 2! = 2.
    let mixed = hermite::hermite(2, &[1, 2])?;
    println!(
        "\n|He_(1,2)|^2 = {} (alpha! = {})",
        mixed.l2_norm_squared(),
        hermite::multi_factorial(&[1, 2])
    );
    Ok(())
}
