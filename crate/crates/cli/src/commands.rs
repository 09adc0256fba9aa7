use entgeo::expfam::{
    e_geodesic_limit, free_energy, free_energy_asymptote, gibbs_state, mean_value, monotone_geodesic_divergence,
    NewtonOptions,
};
use entgeo::io::{elem_to_json, projection_to_json, ProblemInput, SCHEMA};
use entgeo::lattice::{enumerate_lattice, LatticeBudget};
use entgeo::maxent::{entropy_distance, max_entropy_with, pythagoras_check, ri_projection};
use entgeo::spectral::max_projection;
use entgeo::verify::{run_suite, SUITES};
use entgeo::{AlgebraSpec, Error, ExpFamilySpec, HermElem, State};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::{error_json, CliError, Common, Output};

const DEFAULT_T: [f64; 7] = [0.0, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0];

pub fn read_problem(common: &Common) -> Result<ProblemInput, CliError> {
    if !(common.tol > 0.0) {
        return Err(CliError::Input("--tol must be positive".into()));
    }
    let path = common.input.as_ref().ok_or_else(|| CliError::Input("--input is required".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    Ok(ProblemInput::parse(&text)?)
}

/// `body` with the schema tag and command name in front.
fn envelope(command: &str, body: Value) -> Value {
    let mut v = json!({ "schema": SCHEMA, "command": command });
    if let Value::Object(map) = body {
        for (k, x) in map {
            v[k] = x;
        }
    }
    v
}

fn solver_options(common: &Common) -> NewtonOptions {
    let mut opts = NewtonOptions::default();
    opts.tol = opts.tol.min(common.tol);
    if let Some(b) = common.budget {
        opts.max_iter = b;
    }
    opts
}

/// Writes an error line and converts the error for the exit code.
fn fail(out: &mut Output, command: &str, e: Error) -> CliError {
    if let Err(w) = out.line(&error_json(command, &e)) {
        return w;
    }
    CliError::Core(e)
}

fn states_of(problem: &ProblemInput, spec: &AlgebraSpec) -> Result<Vec<State>, CliError> {
    let states = problem.states(spec)?;
    if states.is_empty() {
        return Err(CliError::Input("expected \"state\" or \"states\"".into()));
    }
    Ok(states)
}

pub fn maxent(common: &Common, problem: &ProblemInput, out: &mut Output) -> Result<(), CliError> {
    let family = problem.family()?;
    let xi = problem.xi.as_ref().ok_or_else(|| CliError::Input("missing \"xi\"".into()))?;
    let result = match max_entropy_with(&family, xi, &solver_options(common)) {
        Ok(r) => r,
        Err(e) => return Err(fail(out, "maxent", e)),
    };
    let mut body = envelope("maxent", result.to_json());
    body["xi"] = json!(xi);
    out.line(&body)?;
    if result.residual > common.tol {
        return Err(CliError::Core(Error::BudgetExhausted { residual: result.residual }));
    }
    Ok(())
}

/// Runs `f` on every state in parallel and writes one line per state in input
/// order. The first failure decides the exit code.
fn batch(
    command: &str,
    states: &[State],
    out: &mut Output,
    f: impl Fn(&State) -> Result<Value, Error> + Sync,
) -> Result<(), CliError> {
    let results: Vec<Result<Value, Error>> = states.par_iter().map(&f).collect();
    let mut first = None;
    for (i, r) in results.into_iter().enumerate() {
        let mut line = match r {
            Ok(v) => envelope(command, v),
            Err(e) => {
                let v = error_json(command, &e);
                first.get_or_insert(e);
                v
            }
        };
        line["index"] = json!(i);
        out.line(&line)?;
    }
    first.map_or(Ok(()), |e| Err(CliError::Core(e)))
}

pub fn project(common: &Common, problem: &ProblemInput, out: &mut Output) -> Result<(), CliError> {
    let family = problem.family()?;
    let states = states_of(problem, family.algebra())?;
    // The base point of the family serves as the reference member for the Pythagorean check.
    let sigma = gibbs_state(family.theta0());
    let tol = common.tol;
    batch("project", &states, out, |rho| {
        let proj = ri_projection(&family, rho)?;
        if proj.residual > tol {
            return Err(Error::BudgetExhausted { residual: proj.residual });
        }
        let pyth = pythagoras_check(&family, rho, &sigma)?;
        let mut v = proj.to_json();
        v["pythagoras"] = json!({
            "reference": "base point",
            "s_rho_pi": pyth.s_rho_pi,
            "s_pi_sigma": pyth.s_pi_sigma,
            "s_rho_sigma": pyth.s_rho_sigma,
            "gap": pyth.gap,
        });
        Ok(v)
    })
}

pub fn distance(problem: &ProblemInput, out: &mut Output) -> Result<(), CliError> {
    let family = problem.family()?;
    let states = states_of(problem, family.algebra())?;
    batch("distance", &states, out, |rho| Ok(json!({ "distance": entropy_distance(&family, rho)? })))
}

pub fn lattice(common: &Common, problem: &ProblemInput, out: &mut Output) -> Result<(), CliError> {
    let family = problem.family()?;
    let defaults = LatticeBudget::default();
    let max_depth = common.budget.unwrap_or_else(|| defaults.max_depth.min(family.algebra().real_dim()));
    let budget = LatticeBudget { max_depth, seed: common.seed, ..defaults };
    match enumerate_lattice(&family, &budget) {
        Ok(report) => out.line(&envelope("lattice", report.to_json())),
        Err(e) => Err(fail(out, "lattice", e)),
    }
}

/// The algebra of a problem file, with or without constraint directions.
fn algebra_and_family(problem: &ProblemInput) -> Result<(AlgebraSpec, Option<ExpFamilySpec>), CliError> {
    if problem.family.is_some() || problem.u.is_some() {
        let f = problem.family()?;
        return Ok((f.algebra().clone(), Some(f)));
    }
    let blocks = problem.blocks.clone().ok_or_else(|| CliError::Input("missing \"blocks\"".into()))?;
    Ok((AlgebraSpec::new(blocks)?, None))
}

pub fn geodesic(problem: &ProblemInput, out: &mut Output) -> Result<(), CliError> {
    let (spec, family) = algebra_and_family(problem)?;
    let theta = match (&family, &problem.theta0) {
        (Some(f), _) => f.theta0().clone(),
        (None, Some(t)) => t.to_elem(&spec)?,
        (None, None) => HermElem::zeros(&spec),
    };
    let u = problem
        .direction
        .as_ref()
        .ok_or_else(|| CliError::Input("missing \"direction\"".into()))?
        .to_elem(&spec)?;
    let ts = problem.t.clone().unwrap_or_else(|| DEFAULT_T.to_vec());
    let (top, _) = max_projection(&u);
    let mean_of = |s: &State| -> Result<Option<Vec<f64>>, Error> {
        family.as_ref().map(|f| mean_value(s, f).map(|m| m.0)).transpose()
    };
    let mut points = Vec::new();
    for &t in &ts {
        let th = theta.add_scaled(t, &u);
        let s = gibbs_state(&th);
        points.push(json!({
            "t": t,
            "state": elem_to_json(s.elem()),
            "reduced_free_energy": free_energy(&th) - t * top,
            "mean_value": mean_of(&s)?,
        }));
    }
    let (limit, comp) = e_geodesic_limit(&theta, &u)?;
    let mut body = json!({
        "points": points,
        "limit": {
            "state": elem_to_json(limit.elem()),
            "face": projection_to_json(comp.projection()),
            "free_energy": free_energy_asymptote(&theta, &u)?,
            "mean_value": mean_of(&limit)?,
        },
    });
    if let Some(rho) = problem.states(&spec)?.first() {
        body["divergence"] = json!(monotone_geodesic_divergence(rho, &theta, &u, &ts)?);
    }
    out.line(&envelope("geodesic", body))
}

pub fn verify(common: &Common, suite: Option<&str>, out: &mut Output) -> Result<(), CliError> {
    // An input file is only validated, so that corrupted specifications are caught.
    if common.input.is_some() {
        read_problem(common)?.family()?;
    }
    let names: Vec<&str> = match suite {
        Some(s) => vec![s],
        None => SUITES.to_vec(),
    };
    let mut failed = Vec::new();
    for name in names {
        let outcome = run_suite(name, common.seed).map_err(|e| CliError::Input(e.to_string()))?;
        eprintln!("{}", outcome.line());
        if !outcome.passed {
            failed.push(outcome.id);
        }
        let body = serde_json::to_value(&outcome).map_err(|e| CliError::Input(e.to_string()))?;
        out.line(&envelope("verify", body))?;
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::VerifyFailed(failed))
    }
}
