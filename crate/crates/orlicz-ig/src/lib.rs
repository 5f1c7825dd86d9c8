//! Numerical Orlicz-space machinery for non-parametric information geometry
//! on the standard Gaussian space.
//!
//! The crate makes the following objects computable:
//!
//! * **Young functions** and their conjugates, with the algebra used on
//!   Gaussian spaces: the power family, `exp2`, `cosh2`, `gauss2`, squared
//!   variants, eventual domination certificates ([`young`]).
//! * **Random fields** on `R^n`: a small expression tree with exact symbolic
//!   gradients and a JSON wire format ([`field`]).
//! * **Gaussian expectations** by tensorized Gauss-Hermite quadrature or
//!   seeded Monte Carlo, with divergence verdicts instead of huge floats
//!   ([`measure`]).
//! * **Orlicz norms**: Luxemburg gauge, Orlicz dual norm via the Amemiya
//!   formula, the moment norm with certified equivalence constants, tail
//!   certificates, and Orlicz-class membership ([`norms`]).
//! * **Gaussian divergence-form calculus**: Hermite polynomials, the
//!   divergence operator `delta_i f = x_i f - d_i f`, integration by parts,
//!   and Hermite expansions ([`hermite`]).
//! * **The maximal exponential model**: cumulant functional, charts,
//!   Fisher information two ways, Hyvarinen divergence, Otto inner product,
//!   a log-Sobolev check, and sphere coordinates ([`manifold`]).
//! * **Gaussian Orlicz-Sobolev membership tests**: weak derivatives against
//!   bump fields, translation increments, Lipschitz composition, neuron
//!   fields, and a local embedding bound ([`sobolev`]).
//! * **An exact finite-state oracle** that cross-validates all of the above
//!   on finite probability spaces, including quantized Gaussians built from
//!   the quadrature rule itself ([`oracle`]).
//!
//! # Quick start
//!
//! ```
//! use orlicz_ig::field::RandomField;
//! use orlicz_ig::measure::GaussianIntegrator;
//! use orlicz_ig::norms::luxemburg_norm;
//! use orlicz_ig::young::YoungFunction;
//!
//! let f = RandomField::coordinate(1, 0).unwrap(); // f(x) = x on R
//! let integrator = GaussianIntegrator::quadrature(1, 64);
//! let norm = luxemburg_norm(&f, &YoungFunction::cosh2(), &integrator).unwrap();
//! // E[cosh(x/rho)] = exp(1/(2 rho^2)), so the gauge solves exp(1/(2 rho^2)) = 2.
//! assert!((norm.value - 1.0 / (2.0 * 2f64.ln()).sqrt()).abs() < 1e-9);
//! ```
//!
//! Every capability is demonstrated by a runnable program under `examples/`;
//! `cargo run -p orlicz-ig --example orlicz_norms` is a good entry point.
//! The thin `orlicz-ig` binary exposes the same operations as subcommands
//! with JSON output; see the crate README.

pub mod cli;
pub mod error;
pub mod field;
pub mod hermite;
pub mod manifold;
pub mod measure;
pub mod norms;
pub mod numerics;
pub mod oracle;
pub mod sobolev;
pub mod young;

pub use error::{Error, Result};
