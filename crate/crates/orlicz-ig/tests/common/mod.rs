//! Shared fixture replay: every frozen fixture is re-run through the
//! exact finite-space engine (regression) and, where a counterpart
//! exists, through the quadrature pipeline at the matching resolution
//! (cross-validation).

use orlicz_ig::field::RandomField;
use orlicz_ig::manifold::{self, ExpFamily};
use orlicz_ig::measure::GaussianIntegrator;
use orlicz_ig::norms;
use orlicz_ig::oracle::{self, Fixture, FixtureSpace};
use orlicz_ig::young::YoungFunction;

pub fn fixtures_path() -> &'static str {
    concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/fixtures.json")
}

pub fn load_fixtures() -> Vec<Fixture> {
    let text = std::fs::read_to_string(fixtures_path()).expect("fixtures.json is committed");
    serde_json::from_str(&text).expect("fixtures.json parses")
}

pub struct FixtureOutcome {
    /// Gap between the exact engine re-run and the frozen value.
    pub exact_gap: f64,
    /// Gap between the quadrature pipeline and the frozen value, for
    /// operations that have a pipeline counterpart.
    pub pipeline_gap: Option<f64>,
}

fn gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn str_input<'a>(fx: &'a Fixture, key: &str) -> Result<&'a str, String> {
    fx.inputs
        .get(key)
        .and_then(|v| v.as_str())
        .ok_or_else(|| format!("fixture is missing string input {key:?}"))
}

fn f64_expected(fx: &Fixture, key: &str) -> Result<f64, String> {
    fx.expected
        .get(key)
        .and_then(|v| v.as_f64())
        .ok_or_else(|| format!("fixture is missing expected number {key:?}"))
}

fn eval_on(nodes: &[f64], f: &RandomField) -> Vec<f64> {
    nodes.iter().map(|&x| f.eval(&[x])).collect()
}

/// Replay one fixture on both engines. Returns the observed gaps;
/// callers compare them with the fixture tolerance.
pub fn verify_fixture(fx: &Fixture) -> Result<FixtureOutcome, String> {
    let (space, nodes) = fx.space.build().map_err(|e| e.to_string())?;
    let order = match fx.space {
        FixtureSpace::QuantizedGaussian { order } => Some(order),
        FixtureSpace::Explicit { .. } => None,
    };
    match fx.operation.as_str() {
        "luxemburg" => {
            let order = order.ok_or("luxemburg fixtures use quantized spaces")?;
            let nodes = nodes.ok_or("quantized space returns nodes")?;
            let expected = f64_expected(fx, "value")?;
            let phi = YoungFunction::from_name(str_input(fx, "phi")?).map_err(|e| e.to_string())?;
            let f = RandomField::parse(1, str_input(fx, "field")?).map_err(|e| e.to_string())?;
            let exact = oracle::exact_luxemburg(&eval_on(&nodes, &f), &phi, &space)
                .map_err(|e| e.to_string())?;
            let integrator = GaussianIntegrator::quadrature_fixed(1, order);
            let pipeline =
                norms::luxemburg_norm(&f, &phi, &integrator).map_err(|e| e.to_string())?.value;
            Ok(FixtureOutcome {
                exact_gap: gap(exact, expected),
                pipeline_gap: Some(gap(pipeline, expected)),
            })
        }
        "cumulant" => {
            let order = order.ok_or("cumulant fixtures use quantized spaces")?;
            let nodes = nodes.ok_or("quantized space returns nodes")?;
            let expected = f64_expected(fx, "value")?;
            let u = RandomField::parse(1, str_input(fx, "u")?).map_err(|e| e.to_string())?;
            let exact = oracle::exact_model(&space, &eval_on(&nodes, &u))
                .map_err(|e| e.to_string())?
                .cumulant;
            let integrator = GaussianIntegrator::quadrature_fixed(1, order);
            let pipeline = manifold::cumulant(&u, &integrator).map_err(|e| e.to_string())?;
            Ok(FixtureOutcome {
                exact_gap: gap(exact, expected),
                pipeline_gap: Some(gap(pipeline, expected)),
            })
        }
        "fisher" => {
            let order = order.ok_or("fisher fixtures use quantized spaces")?;
            let nodes = nodes.ok_or("quantized space returns nodes")?;
            let exprs: Vec<String> = fx
                .inputs
                .get("stats")
                .and_then(|v| v.as_array())
                .ok_or("fisher fixture lists stats")?
                .iter()
                .map(|v| v.as_str().map(String::from).ok_or("stat is a string"))
                .collect::<Result<_, _>>()?;
            let theta: Vec<f64> = fx
                .inputs
                .get("theta")
                .and_then(|v| v.as_array())
                .ok_or("fisher fixture lists theta")?
                .iter()
                .map(|v| v.as_f64().ok_or("theta entry is a number"))
                .collect::<Result<_, _>>()?;
            let fields: Vec<RandomField> = exprs
                .iter()
                .map(|e| RandomField::parse(1, e).map_err(|e| e.to_string()))
                .collect::<Result<_, _>>()?;

            let stats: Vec<Vec<f64>> = fields.iter().map(|f| eval_on(&nodes, f)).collect();
            let exact =
                oracle::exact_fisher(&space, &stats, &theta).map_err(|e| e.to_string())?;

            let expected_cumulant = f64_expected(fx, "cumulant")?;
            let expected_grad: Vec<f64> = fx.expected["grad"]
                .as_array()
                .ok_or("expected grad")?
                .iter()
                .map(|v| v.as_f64().ok_or("grad entry"))
                .collect::<Result<_, _>>()?;
            let expected_info: Vec<Vec<f64>> = fx.expected["information"]
                .as_array()
                .ok_or("expected information")?
                .iter()
                .map(|row| {
                    row.as_array()
                        .ok_or("information row")?
                        .iter()
                        .map(|v| v.as_f64().ok_or("information entry"))
                        .collect()
                })
                .collect::<Result<_, _>>()?;

            let mut exact_gap = gap(exact.cumulant, expected_cumulant);
            for (a, b) in exact.grad.iter().zip(&expected_grad) {
                exact_gap = exact_gap.max(gap(*a, *b));
            }
            for (row, erow) in exact.covariance.iter().zip(&expected_info) {
                for (a, b) in row.iter().zip(erow) {
                    exact_gap = exact_gap.max(gap(*a, *b));
                }
            }

            let integrator = GaussianIntegrator::quadrature_fixed(1, order);
            let family = ExpFamily::new(fields, &integrator).map_err(|e| e.to_string())?;
            let report = manifold::cumulant_and_fisher(&family, &theta, &integrator)
                .map_err(|e| e.to_string())?;
            let mut pipeline_gap = gap(report.cumulant, expected_cumulant);
            for (a, b) in report.grad.iter().zip(&expected_grad) {
                pipeline_gap = pipeline_gap.max(gap(*a, *b));
            }
            for (row, erow) in report.covariance.iter().zip(&expected_info) {
                for (a, b) in row.iter().zip(erow) {
                    pipeline_gap = pipeline_gap.max(gap(*a, *b));
                }
            }
            Ok(FixtureOutcome { exact_gap, pipeline_gap: Some(pipeline_gap) })
        }
        "portmanteau" => {
            let p: Vec<f64> = fx.inputs["p"]
                .as_array()
                .ok_or("portmanteau fixture lists p")?
                .iter()
                .map(|v| v.as_f64().ok_or("p entry"))
                .collect::<Result<_, _>>()?;
            let q: Vec<f64> = fx.inputs["q"]
                .as_array()
                .ok_or("portmanteau fixture lists q")?
                .iter()
                .map(|v| v.as_f64().ok_or("q entry"))
                .collect::<Result<_, _>>()?;
            let report = oracle::exact_portmanteau(&space, &p, &q).map_err(|e| e.to_string())?;
            let expected_convex =
                fx.expected["log_convex"].as_bool().ok_or("expected log_convex")?;
            let expected_hold =
                fx.expected["conditions_hold"].as_bool().ok_or("expected conditions_hold")?;
            if report.log_convex != expected_convex || report.conditions_hold != expected_hold {
                return Err("portmanteau verdicts changed".into());
            }
            let z_half = report
                .arc
                .iter()
                .find(|(t, _)| (t - 0.5).abs() < 1e-12)
                .map(|&(_, z)| z)
                .ok_or("arc grid contains 1/2")?;
            Ok(FixtureOutcome {
                exact_gap: gap(z_half, f64_expected(fx, "z_half")?),
                pipeline_gap: None,
            })
        }
        other => Err(format!("unknown fixture operation {other:?}")),
    }
}
