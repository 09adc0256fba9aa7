//! CSV point clouds for planar families: the family surface, the boundary of
//! the mean-value set, the rI-closure points and, for the Staffelberg family,
//! the vertical segment in its norm closure.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use entgeo::algebra::pauli::{identity, scalar, sigma2};
use entgeo::entropy::von_neumann_entropy;
use entgeo::expfam::{e_geodesic_limit, gibbs_state, mean_value};
use entgeo::families;
use entgeo::io::SCHEMA;
use entgeo::lattice::sharp_max_projection;
use entgeo::maxent::entropy_distance;
use entgeo::{ExpFamilySpec, HermElem, State};
use rayon::prelude::*;
use serde_json::json;

use crate::commands::read_problem;
use crate::{CliError, Common, Output};

/// Half-width of the parameter square sampled for the surface.
const PARAM_RANGE: f64 = 4.0;
const ANGLES: usize = 720;

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Weight of the last block, the vertical coordinate of the state-space picture.
fn last_block_weight(rho: &State) -> f64 {
    rho.elem().blocks().last().map_or(0.0, |b| b.trace().re)
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
    let err = |e: csv::Error| CliError::Input(e.to_string());
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(r.iter().map(|x| x.to_string())).map_err(err)?;
    }
    w.flush()?;
    Ok(())
}

fn surface(fam: &ExpFamilySpec, grid: usize) -> Result<Vec<Vec<f64>>, CliError> {
    let axis = linspace(-PARAM_RANGE, PARAM_RANGE, grid);
    let params: Vec<(f64, f64)> = axis.iter().flat_map(|&a| axis.iter().map(move |&b| (a, b))).collect();
    let rows = params
        .par_iter()
        .map(|&(a, b)| {
            let rho = gibbs_state(&fam.parameter(&[a, b])?);
            let m = mean_value(&rho, fam)?;
            Ok(vec![a, b, m.0[0], m.0[1], last_block_weight(&rho), von_neumann_entropy(&rho)])
        })
        .collect::<Result<Vec<_>, entgeo::Error>>()?;
    Ok(rows)
}

fn unit_direction(fam: &ExpFamilySpec, phi: f64) -> Result<HermElem, entgeo::Error> {
    fam.direction(&[phi.cos(), phi.sin()])
}

/// Support function `h(φ) = λ⁺(cos φ·u₁ + sin φ·u₂)` and the mean value of the
/// tracial state on the top eigenspace, which lies on the boundary.
fn boundary(fam: &ExpFamilySpec) -> Result<Vec<Vec<f64>>, CliError> {
    let rows = (0..ANGLES)
        .into_par_iter()
        .map(|i| {
            let phi = 2.0 * PI * i as f64 / ANGLES as f64;
            let (h, p) = sharp_max_projection(&unit_direction(fam, phi)?);
            let m = mean_value(&p.tracial_state(), fam)?;
            Ok(vec![phi, h, m.0[0], m.0[1]])
        })
        .collect::<Result<Vec<_>, entgeo::Error>>()?;
    Ok(rows)
}

/// Limits of the e-geodesics through the base point; each is in the rI-closure.
fn closure_points(fam: &ExpFamilySpec) -> Result<Vec<Vec<f64>>, CliError> {
    let rows = (0..ANGLES)
        .into_par_iter()
        .map(|i| {
            let phi = 2.0 * PI * i as f64 / ANGLES as f64;
            let (rho, comp) = e_geodesic_limit(fam.theta0(), &unit_direction(fam, phi)?)?;
            let m = mean_value(&rho, fam)?;
            Ok(vec![phi, m.0[0], m.0[1], last_block_weight(&rho), comp.projection().rank() as f64])
        })
        .collect::<Result<Vec<_>, entgeo::Error>>()?;
    Ok(rows)
}

/// `t·½(𝟙+σ₂) ⊕ (1−t)` for `t ∈ [½, 1]`, the segment of the norm closure above
/// `(0, 1)`, with its entropy distance. Only the top end `t = ½` is in the rI-closure.
fn staffelberg_segment(fam: &ExpFamilySpec, grid: usize) -> Result<Vec<Vec<f64>>, CliError> {
    let ts = linspace(0.5, 1.0, grid.max(2));
    let rows = ts
        .par_iter()
        .map(|&t| {
            let e = HermElem::new(fam.algebra().clone(), vec![(identity() + sigma2()).scale(0.5 * t), scalar(1.0 - t)])?;
            let rho = State::new(e)?;
            let m = mean_value(&rho, fam)?;
            Ok(vec![t, m.0[0], m.0[1], last_block_weight(&rho), entropy_distance(fam, &rho)?.value()])
        })
        .collect::<Result<Vec<_>, entgeo::Error>>()?;
    Ok(rows)
}

pub fn run(common: &Common, family: &str, grid: usize) -> Result<(), CliError> {
    if grid == 0 {
        return Err(CliError::Input("--grid must be positive".into()));
    }
    let (name, fam) = if common.input.is_some() {
        ("custom".to_string(), read_problem(common)?.family()?)
    } else {
        let f = families::by_name(family).ok_or_else(|| CliError::Input(format!("unknown family {family:?}")))?;
        (family.to_string(), f)
    };
    if fam.k() != 2 {
        return Err(CliError::Input(format!("figures need a planar family, got {} directions", fam.k())));
    }
    let dir = common.output.clone().unwrap_or_else(|| PathBuf::from("figures"));
    std::fs::create_dir_all(&dir).map_err(|e| CliError::Input(format!("cannot create {}: {e}", dir.display())))?;

    let mut files = Vec::new();
    let mut emit = |file: &str, header: &[&str], rows: Vec<Vec<f64>>| -> Result<(), CliError> {
        write_csv(&dir.join(file), header, &rows)?;
        files.push(json!({ "file": file, "rows": rows.len() }));
        Ok(())
    };
    emit("surface.csv", &["lambda1", "lambda2", "x", "y", "z", "entropy"], surface(&fam, grid)?)?;
    emit("boundary.csv", &["angle", "support", "x", "y"], boundary(&fam)?)?;
    emit("closure.csv", &["angle", "x", "y", "z", "face_rank"], closure_points(&fam)?)?;
    if name == "staffelberg" {
        emit("segment.csv", &["t", "x", "y", "z", "entropy_distance"], staffelberg_segment(&fam, grid)?)?;
    }
    let mut out = Output::open(None)?;
    out.line(&json!({ "schema": SCHEMA, "command": "figures", "family": name, "grid": grid, "directory": dir, "files": files }))?;
    out.finish()
}
