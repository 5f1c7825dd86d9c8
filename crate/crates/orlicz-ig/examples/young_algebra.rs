//! Tour of the Young-function algebra: preset generators, conjugate
//! pairs, the Young inequality, and eventual-domination certificates
//! between growth classes.
//!
//! Run with: cargo run --example young_algebra

use orlicz_ig::error::Result;
use orlicz_ig::young::{self, YoungFunction};

fn main() -> Result<()> {
    // The preset family. `power(alpha)` is |x|^alpha / alpha; `exp2` and
    // `cosh2` grow exponentially; `gauss2` grows like exp(x^2).
    let presets: Vec<YoungFunction> = vec![
        YoungFunction::power(1.5)?,
        YoungFunction::power(2.0)?,
        YoungFunction::power(3.0)?,
        YoungFunction::exp2(),
        YoungFunction::cosh2(),
        YoungFunction::gauss2(),
        YoungFunction::cosh2().squared(),
    ];

    println!("values on a small grid");
    println!("{:>12} {:>12} {:>12} {:>12} {:>12}", "name", "x=0.5", "x=1", "x=2", "x=4");
    for phi in &presets {
        println!(
            "{:>12} {:>12.6} {:>12.6} {:>12.6} {:>12.4e}",
            phi.name(),
            phi.value(0.5),
            phi.value(1.0),
            phi.value(2.0),
            phi.value(4.0)
        );
    }

    // Conjugates: power(alpha) pairs with power(alpha/(alpha-1)); the
    // exponential presets pair with explicit entropy-type functions.
    println!("\nconjugate pairs and the Young inequality");
    for phi in [YoungFunction::power(3.0)?, YoungFunction::cosh2(), YoungFunction::exp2()] {
        let psi = phi.conjugate()?;
        println!("  {} <-> {}", phi.name(), psi.name());
        for (x, y) in [(0.5, 0.5), (1.0, 2.0), (3.0, 0.25)] {
            let check = phi.check_young_legendre(x, y)?;
            println!(
                "    x={x:<4} y={y:<4}  gap(x,y) = {:>11.4e}   equality residual at y = phi'(x): {:.1e}",
                check.young_gap, check.legendre_residual
            );
            assert!(check.young_gap >= -1e-12, "the Young inequality failed");
        }
    }

    // Domination order: exp2 eventually dominates every power, but no
    // power dominates exp2. The certificate reports a witness scale and
    // threshold, or a counterexample point.
    println!("\neventual domination (does the second function outgrow the first?)");
    let scales = [1.0, 2.0, 4.0, 8.0];
    let thresholds = [1.0, 2.0, 4.0, 8.0, 16.0];
    let pairs = [
        (YoungFunction::power(4.0)?, YoungFunction::exp2()),
        (YoungFunction::exp2(), YoungFunction::power(4.0)?),
        (YoungFunction::cosh2(), YoungFunction::gauss2()),
    ];
    for (phi, psi) in pairs {
        let cert = young::eventually_dominates(&phi, &psi, &scales, &thresholds);
        if cert.holds {
            println!(
                "  {} <= {}(k x): yes, with k = {} beyond x = {}",
                phi.name(),
                psi.name(),
                cert.scale,
                cert.threshold
            );
        } else {
            println!(
                "  {} <= {}(k x): no; counterexample near x = {:?}",
                phi.name(),
                psi.name(),
                cert.counterexample
            );
        }
    }
    Ok(())
}
