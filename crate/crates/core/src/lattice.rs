//! The projection lattice `𝒫^U` of a constraint space, built from access
//! sequences of consecutively exposed projections, and the constructive
//! location of the face containing a given mean value in its relative interior.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::{hs_inner_unchecked, AlgebraSpec, HermElem, NormKind, State};
use crate::error::{Error, Result};
use crate::expfam::{gram, solve_chart, ExpFamilySpec, NewtonOptions};
use crate::io::{elem_to_json, projection_to_json};
use crate::spectral::{cluster_tol, max_projection, max_projection_with_tol, Compression, Projection};

/// Trace-norm distance below which two projections are identified.
pub const DEDUPE_TOL: f64 = 1e-7;
/// Relative eigenvalue tolerance for ties during enumeration.
const TIE_REL_TOL: f64 = 1e-12;
const MAX_BISECTION: usize = 60;
/// Relative tolerance for `u ∈ U`.
const SPAN_TOL: f64 = 1e-9;

/// Maximal projection with ties resolved at near machine precision.
pub fn sharp_max_projection(w: &HermElem) -> (f64, Projection) {
    max_projection_with_tol(w, TIE_REL_TOL * w.max_abs().max(1.0))
}

/// One step `p_i ≻ p_{i+1}` of an access sequence.
#[derive(Clone, Debug)]
pub struct AccessStep {
    pub parent: Projection,
    /// Witness `w ∈ c^{p_i}(U)`, stored in ambient form `p_i w p_i`.
    pub witness: HermElem,
    /// Coefficients of the witness in the compressed directions `c^{p_i}(u_j)`.
    pub coeffs: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct LatticeNode {
    pub projection: Projection,
    pub access_sequence: Vec<AccessStep>,
    pub exposed: bool,
}

impl LatticeNode {
    pub fn root(spec: &AlgebraSpec) -> Self {
        Self { projection: Projection::identity(spec), access_sequence: vec![], exposed: true }
    }

    pub fn depth(&self) -> usize {
        self.access_sequence.len()
    }

    pub fn rank_profile(&self) -> Vec<usize> {
        self.projection.rank_profile()
    }

    pub fn compression(&self) -> Result<Compression> {
        Compression::new(&self.projection)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "rank_profile": self.rank_profile(),
            "projection": elem_to_json(self.projection.elem()),
            "depth": self.depth(),
            "exposed": self.exposed,
            "witnesses": self.access_sequence.iter().map(|s| elem_to_json(&s.witness)).collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeBudget {
    /// Grid directions per unit sphere of each compressed constraint space.
    pub grid_per_sphere: usize,
    pub random_samples: usize,
    pub dedupe_tol: f64,
    pub max_depth: usize,
    pub seed: u64,
}

impl Default for LatticeBudget {
    fn default() -> Self {
        Self { grid_per_sphere: 64, random_samples: 16, dedupe_tol: DEDUPE_TOL, max_depth: 4, seed: 0 }
    }
}

impl LatticeBudget {
    pub fn validate(&self, spec: &AlgebraSpec) -> Result<()> {
        if self.grid_per_sphere == 0 || self.max_depth == 0 || !(self.dedupe_tol > 0.0) {
            return Err(Error::Precondition("lattice budget entries must be positive".into()));
        }
        if self.max_depth > spec.real_dim() {
            return Err(Error::Precondition(format!(
                "max_depth {} exceeds the real dimension {} of the algebra",
                self.max_depth,
                spec.real_dim()
            )));
        }
        Ok(())
    }
}

/// Result of [`enumerate_lattice`]: sound, not necessarily complete.
#[derive(Clone, Debug)]
pub struct LatticeReport {
    pub nodes: Vec<LatticeNode>,
    pub budget: LatticeBudget,
    pub directions_evaluated: usize,
    /// True when some node at `max_depth` was not expanded further.
    pub depth_limited: bool,
}

impl LatticeReport {
    pub fn to_json(&self) -> Value {
        json!({
            "budget": self.budget,
            "directions_evaluated": self.directions_evaluated,
            "depth_limited": self.depth_limited,
            "complete": false,
            "nodes": self.nodes.iter().map(|n| n.to_json()).collect::<Vec<_>>(),
        })
    }
}

/// Minimal-norm coefficients of the projection of `a` onto `span(dirs)`, and the distance.
fn span_coefficients(dirs: &[HermElem], a: &HermElem) -> (Vec<f64>, f64) {
    let k = dirs.len();
    if k == 0 {
        return (vec![], a.norm(NormKind::Two));
    }
    let eig = SymmetricEigen::new(gram(dirs));
    let gmax = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let rhs: Vec<f64> = dirs.iter().map(|u| hs_inner_unchecked(u, a)).collect();
    let mut c = vec![0.0; k];
    for j in 0..k {
        let g = eig.eigenvalues[j];
        if g > 1e-12 * gmax.max(1e-288) {
            let q = eig.eigenvectors.column(j);
            let s: f64 = (0..k).map(|i| q[i] * rhs[i]).sum::<f64>() / g;
            for i in 0..k {
                c[i] += s * q[i];
            }
        }
    }
    let proj = HermElem::combination(&c, dirs).unwrap_or_else(|_| HermElem::zeros(a.spec()));
    (c, (a - &proj).norm(NormKind::Two))
}

/// `p⁺(u)` for `u ∈ U`; `u = 0` gives `𝟙`.
pub fn exposed_projection(spec: &ExpFamilySpec, u: &HermElem) -> Result<Projection> {
    spec.algebra().check_same(u.spec())?;
    let (_, distance) = span_coefficients(spec.directions(), u);
    if distance > SPAN_TOL * u.norm(NormKind::Two).max(1.0) {
        return Err(Error::NotInSpan { distance });
    }
    Ok(max_projection(u).1)
}

/// Extends an access sequence by `p⁺(u)` computed in the node's compressed algebra.
pub fn access_step(node: &LatticeNode, u_in_compressed: &HermElem, spec: &ExpFamilySpec) -> Result<LatticeNode> {
    spec.algebra().check_same(node.projection.spec())?;
    let c = node.compression()?;
    c.target().check_same(u_in_compressed.spec())?;
    let dirs = spec.directions().iter().map(|u| c.apply(u)).collect::<Result<Vec<_>>>()?;
    let (coeffs, distance) = span_coefficients(&dirs, u_in_compressed);
    if distance > SPAN_TOL * u_in_compressed.norm(NormKind::Two).max(1.0) {
        return Err(Error::NotInSpan { distance });
    }
    let (_, q) = max_projection(u_in_compressed);
    if q.is_identity() {
        return Err(Error::Precondition("witness is a multiple of the identity; the step is not strictly decreasing".into()));
    }
    let mut seq = node.access_sequence.clone();
    seq.push(AccessStep { parent: node.projection.clone(), witness: c.lift(u_in_compressed)?, coeffs });
    let depth = seq.len();
    Ok(LatticeNode { projection: c.lift_projection(&q)?, access_sequence: seq, exposed: depth <= 1 })
}

/// Recomputes every step of the node's access sequence and compares with the stored projections.
pub fn revalidate(node: &LatticeNode, tol: f64) -> Result<bool> {
    let n = node.access_sequence.len();
    for (i, step) in node.access_sequence.iter().enumerate() {
        let child = if i + 1 < n { &node.access_sequence[i + 1].parent } else { &node.projection };
        let c = Compression::new(&step.parent)?;
        let w = c.apply(&step.witness)?;
        let matches = |q: &Projection| -> Result<bool> {
            let lifted = c.lift_projection(q)?;
            Ok(lifted.rank_profile() == child.rank_profile() && lifted.distance(child) <= tol)
        };
        let ok = matches(&sharp_max_projection(&w).1)? || matches(&max_projection(&w).1)?;
        if !ok || child.rank() >= step.parent.rank() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Constraint space `c^p(U)` of a node in orthonormal traceless coordinates.
struct LocalSpace {
    comp: Compression,
    dirs: Vec<HermElem>,
    basis: Vec<HermElem>,
    to_lambda: DMatrix<f64>,
    /// Coordinates of the traceless parts of the `c^p(u_i)` in `basis`.
    u_coords: Vec<Vec<f64>>,
}

impl LocalSpace {
    fn new(spec: &ExpFamilySpec, proj: &Projection) -> Result<Self> {
        let comp = Compression::new(proj)?;
        let dirs = spec.directions().iter().map(|u| comp.apply(u)).collect::<Result<Vec<_>>>()?;
        let traceless: Vec<HermElem> = dirs.iter().map(|u| u.traceless()).collect();
        let k = dirs.len();
        let eig = SymmetricEigen::new(gram(&traceless));
        let gmax = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
        let mut basis = Vec::new();
        let mut cols = Vec::new();
        let mut u_coords = vec![Vec::new(); k];
        for j in 0..k {
            let g = eig.eigenvalues[j];
            if g > 1e-12 * gmax.max(1e-288) {
                let q = eig.eigenvectors.column(j);
                let sg = g.sqrt();
                let mut e = HermElem::zeros(comp.target());
                for i in 0..k {
                    e = e.add_scaled(q[i] / sg, &traceless[i]);
                    u_coords[i].push(q[i] * sg);
                }
                basis.push(e);
                cols.push(q.map(|x| x / sg));
            }
        }
        let to_lambda = if cols.is_empty() { DMatrix::zeros(k, 0) } else { DMatrix::from_columns(&cols) };
        Ok(Self { comp, dirs, basis, to_lambda, u_coords })
    }

    fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Witness coefficients, witness and sharp maximal projection for a unit direction.
    fn eval(&self, v: &[f64]) -> (Vec<f64>, HermElem, Projection) {
        let lambda: Vec<f64> = (&self.to_lambda * nalgebra::DVector::from_column_slice(v)).iter().copied().collect();
        let mut w = HermElem::zeros(self.comp.target());
        for (l, u) in lambda.iter().zip(&self.dirs) {
            w = w.add_scaled(*l, u);
        }
        let (_, q) = sharp_max_projection(&w);
        (lambda, w, q)
    }
}

fn normalized(v: Vec<f64>) -> Option<Vec<f64>> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    (n > 1e-300).then(|| v.into_iter().map(|x| x / n).collect())
}

fn sphere_points(r: usize, n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    match r {
        0 => vec![],
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..n)
            .map(|j| {
                let a = std::f64::consts::TAU * j as f64 / n as f64;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        3 => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..n)
                .map(|i| {
                    let z = 1.0 - (2 * i + 1) as f64 / n as f64;
                    let rho = (1.0 - z * z).sqrt();
                    let phi = golden * i as f64;
                    vec![rho * phi.cos(), rho * phi.sin(), z]
                })
                .collect()
        }
        _ => (0..n).filter_map(|_| normalized(gaussian(r, rng))).collect(),
    }
}

fn gaussian(r: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..r).map(|_| StandardNormal.sample(rng)).collect()
}

/// Pairs of neighboring directions between which ties are searched.
fn neighbor_pairs(dirs: &[Vec<f64>]) -> Vec<(usize, usize)> {
    let r = dirs.first().map_or(0, |d| d.len());
    match r {
        0 | 1 => vec![],
        2 => {
            let mut order: Vec<usize> = (0..dirs.len()).collect();
            order.sort_by(|&a, &b| dirs[a][1].atan2(dirs[a][0]).total_cmp(&dirs[b][1].atan2(dirs[b][0])));
            (0..order.len()).map(|i| (order[i], order[(i + 1) % order.len()])).collect()
        }
        _ => {
            let mut pairs = Vec::new();
            for i in 0..dirs.len() {
                let mut near: Vec<(f64, usize)> = (0..dirs.len())
                    .filter(|&j| j != i)
                    .map(|j| (-dirs[i].iter().zip(&dirs[j]).map(|(a, b)| a * b).sum::<f64>(), j))
                    .collect();
                near.sort_by(|a, b| a.0.total_cmp(&b.0));
                for &(_, j) in near.iter().take(2 * r) {
                    let p = (i.min(j), i.max(j));
                    if !pairs.contains(&p) {
                        pairs.push(p);
                    }
                }
            }
            pairs
        }
    }
}

type Candidate = (Vec<f64>, HermElem, Projection);

/// Bisects between directions with different maximal projections, keeping
/// only ties whose rank exceeds both endpoints. Recursion stops on pieces where
/// the projections vary continuously.
fn bisect(space: &LocalSpace, a: &(Vec<f64>, Projection), b: &(Vec<f64>, Projection), depth: usize, parent_gap: f64, out: &mut Vec<Candidate>) {
    if depth > MAX_BISECTION {
        return;
    }
    let gap = a.1.distance(&b.1);
    if gap <= DEDUPE_TOL || (depth > 3 && gap < 0.75 * parent_gap) {
        return;
    }
    let Some(mid) = normalized(a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect()) else { return };
    if mid == a.0 || mid == b.0 {
        return;
    }
    let (lambda, w, q) = space.eval(&mid);
    if q.rank() > a.1.rank() && q.rank() > b.1.rank() {
        out.push((lambda, w, q));
        return;
    }
    let m = (mid, q);
    bisect(space, a, &m, depth + 1, gap, out);
    bisect(space, &m, b, depth + 1, gap, out);
}

fn is_duplicate(nodes: &[Projection], q: &Projection, tol: f64) -> bool {
    let prof = q.rank_profile();
    nodes.iter().any(|p| {
        p.rank_profile() == prof && (p.elem() - q.elem()).norm(NormKind::Two) <= tol && p.distance(q) <= tol
    })
}

/// Proper sub-projections `p⁺(w)`, `w ∈ c^p(U)`, found from one node.
fn children(space: &LocalSpace, budget: &LatticeBudget, seed: u64) -> (Vec<Candidate>, usize) {
    let r = space.dim();
    if r == 0 {
        return (vec![], 0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dirs = sphere_points(r, budget.grid_per_sphere.max(2 * r), &mut rng);
    for j in 0..r {
        let mut e = vec![0.0; r];
        e[j] = 1.0;
        dirs.push(e.clone());
        dirs.push(e.iter().map(|x| -x).collect());
    }
    for c in &space.u_coords {
        if let Some(v) = normalized(c.clone()) {
            dirs.push(v.iter().map(|x| -x).collect());
            dirs.push(v);
        }
    }
    for _ in 0..budget.random_samples {
        if let Some(v) = normalized(gaussian(r, &mut rng)) {
            dirs.push(v);
        }
    }
    let evaluated: Vec<Candidate> = dirs.par_iter().map(|v| space.eval(v)).collect();
    let pairs = neighbor_pairs(&dirs);
    let ties: Vec<Vec<Candidate>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let mut out = Vec::new();
            let a = (dirs[i].clone(), evaluated[i].2.clone());
            let b = (dirs[j].clone(), evaluated[j].2.clone());
            bisect(space, &a, &b, 0, f64::INFINITY, &mut out);
            out
        })
        .collect();
    let count = evaluated.len();
    let mut found: Vec<Candidate> = Vec::new();
    let mut seen: Vec<Projection> = Vec::new();
    for cand in evaluated.into_iter().chain(ties.into_iter().flatten()) {
        if cand.2.is_identity() || cand.2.is_zero() || is_duplicate(&seen, &cand.2, budget.dedupe_tol) {
            continue;
        }
        seen.push(cand.2.clone());
        found.push(cand);
    }
    (found, count)
}

/// Budgeted breadth-first enumeration of `𝒫^U` from `𝟙`.
///
/// Every returned node carries a valid access sequence; faces exposed only by
/// directions the search never hits can be missing. The zero projection is omitted.
pub fn enumerate_lattice(spec: &ExpFamilySpec, budget: &LatticeBudget) -> Result<LatticeReport> {
    budget.validate(spec.algebra())?;
    let mut nodes = vec![LatticeNode::root(spec.algebra())];
    let mut projections = vec![nodes[0].projection.clone()];
    let mut layer = vec![0usize];
    let mut directions_evaluated = 0;
    let mut depth_limited = false;
    for depth in 0..=budget.max_depth {
        if layer.is_empty() {
            break;
        }
        if depth == budget.max_depth {
            depth_limited = layer.iter().any(|&i| LocalSpace::new(spec, &nodes[i].projection).is_ok_and(|s| s.dim() > 0));
            break;
        }
        let expanded: Vec<Result<(usize, LocalSpace, Vec<Candidate>, usize)>> = layer
            .par_iter()
            .map(|&i| {
                let space = LocalSpace::new(spec, &nodes[i].projection)?;
                let seed = budget.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64);
                let (found, count) = children(&space, budget, seed);
                Ok((i, space, found, count))
            })
            .collect();
        let mut next = Vec::new();
        for item in expanded {
            let (i, space, found, count) = item?;
            directions_evaluated += count;
            for (coeffs, w, q) in found {
                let p = space.comp.lift_projection(&q)?;
                if is_duplicate(&projections, &p, budget.dedupe_tol) {
                    continue;
                }
                let mut seq = nodes[i].access_sequence.clone();
                seq.push(AccessStep { parent: nodes[i].projection.clone(), witness: space.comp.lift(&w)?, coeffs });
                let exposed = seq.len() <= 1;
                projections.push(p.clone());
                nodes.push(LatticeNode { projection: p, access_sequence: seq, exposed });
                next.push(nodes.len() - 1);
            }
        }
        layer = next;
    }
    Ok(LatticeReport { nodes, budget: budget.clone(), directions_evaluated, depth_limited })
}

/// One compression step taken while locating a face.
#[derive(Clone, Debug)]
pub struct FaceStep {
    pub projection: Projection,
    /// Escape direction of the diverged Newton run, in ambient form.
    pub escape_direction: HermElem,
    pub newton_iterations: usize,
    pub residual: f64,
}

/// The face `p ∈ 𝒫^U` with `ξ` in the relative interior of its mean-value set,
/// and the solution of the mean-value problem on `p𝒜p`.
#[derive(Clone, Debug)]
pub struct FaceSolution {
    pub face: Projection,
    pub compression: Compression,
    pub trace: Vec<FaceStep>,
    /// Parameters `λ` with `state = R_{p𝒜p}(c^p(θ₀ + Σλ_i u_i))`.
    pub lambdas: Vec<f64>,
    /// `c^p(θ₀ + Σλ_i u_i)` in the coordinates of the compressed algebra.
    pub theta: HermElem,
    pub state: State,
    pub residual: f64,
    pub iterations: usize,
}

impl FaceSolution {
    pub fn to_json(&self) -> Value {
        json!({
            "face": projection_to_json(&self.face),
            "depth": self.trace.len(),
            "lambdas": self.lambdas,
            "residual": self.residual,
            "iterations": self.iterations,
        })
    }
}

fn infeasible_or_exhausted(spec: &ExpFamilySpec, xi: &[f64], residual: f64) -> Error {
    let (certificate, violation) = spec.chart_problem().find_certificate(xi);
    if violation > 1e-9 {
        Error::OutsideConvexSupport { certificate, violation }
    } else {
        Error::BudgetExhausted { residual }
    }
}

pub fn face_of_mean_value(spec: &ExpFamilySpec, xi: &[f64]) -> Result<FaceSolution> {
    face_of_mean_value_with(spec, xi, &NewtonOptions::default())
}

/// Alternates Newton solves and compressions by the maximal projection of the
/// escape direction until the mean-value problem has an interior solution.
pub fn face_of_mean_value_with(spec: &ExpFamilySpec, xi: &[f64], opts: &NewtonOptions) -> Result<FaceSolution> {
    if xi.len() != spec.k() {
        return Err(Error::DimensionMismatch(format!("mean value of length {} for {} directions", xi.len(), spec.k())));
    }
    descend(spec, xi, opts, Compression::identity(spec.algebra()), Vec::new(), 0)
}

/// One level of the face search below the compression `comp`.
fn descend(spec: &ExpFamilySpec, xi: &[f64], opts: &NewtonOptions, comp: Compression, trace: Vec<FaceStep>, iterations: usize) -> Result<FaceSolution> {
    let depth = trace.len();
    if depth > spec.algebra().dim() {
        return Err(Error::BudgetExhausted { residual: f64::NAN });
    }
    let problem = spec.compressed(&comp)?;
    let report = match solve_chart(&problem, xi, opts) {
        Ok(r) => r,
        Err(Error::OutsideConvexSupport { certificate, violation }) if depth == 0 => {
            return Err(Error::OutsideConvexSupport { certificate, violation })
        }
        Err(Error::OutsideConvexSupport { .. }) => return Err(infeasible_or_exhausted(spec, xi, f64::NAN)),
        Err(e) => return Err(e),
    };
    let iterations = iterations + report.iterations;
    if !report.diverged {
        let inner = report.state();
        let state = comp.lift_state(&inner)?;
        return Ok(FaceSolution {
            face: comp.projection().clone(),
            compression: comp,
            trace,
            lambdas: report.lambdas,
            theta: report.theta,
            state,
            residual: report.residual,
            iterations,
        });
    }
    let (Some(w), Some(c)) = (report.escape_direction.clone(), report.escape_coords.clone()) else {
        return Err(infeasible_or_exhausted(spec, xi, report.residual));
    };
    let dot: f64 = c.iter().zip(xi).map(|(a, b)| a * b).sum();
    let last = report.state();
    // Widen the tie tolerance until the face carries the mass of the last iterate.
    let base = cluster_tol(&w);
    let mut chosen = None;
    for tol in [base, 1e-7 * w.max_abs().max(1.0), 1e-6 * w.max_abs().max(1.0)] {
        let (lam, q) = max_projection_with_tol(&w, tol);
        let mass = hs_inner_unchecked(last.elem(), q.elem());
        if mass >= 1.0 - 1e-3 {
            chosen = Some((lam, q));
            break;
        }
    }
    if let Some((lam, _)) = &chosen {
        let violation = dot - lam;
        if violation > 1e-7 {
            if depth == 0 {
                return Err(Error::OutsideConvexSupport { certificate: c, violation });
            }
            return Err(infeasible_or_exhausted(spec, xi, report.residual));
        }
    }
    let step = |w: &HermElem, q: &Projection| -> Result<FaceSolution> {
        let p = comp.lift_projection(q)?;
        log::debug!("face search: compressing to rank profile {:?}", p.rank_profile());
        let mut trace = trace.clone();
        trace.push(FaceStep {
            projection: p.clone(),
            escape_direction: comp.lift(w)?,
            newton_iterations: report.iterations,
            residual: report.residual,
        });
        descend(spec, xi, opts, Compression::new(&p)?, trace, iterations)
    };
    let mut first_err = None;
    if let Some((lam, q)) = &chosen {
        if lam - dot <= 1e-6 && !q.is_identity() {
            match step(&w, q) {
                Ok(sol) => return Ok(sol),
                Err(e) => first_err = Some(e),
            }
        }
    }
    // On curved parts of the boundary the escape direction is only an
    // approximate normal; refine it so the face passes exactly through ξ.
    let (c_ref, gap) = problem.refine_normal(xi, &c);
    if gap.abs() <= 1e-9 {
        let w_ref = problem.direction(&c_ref);
        let (_, q) = max_projection(&w_ref);
        let same = chosen.as_ref().is_some_and(|(_, q0)| q0.distance(&q) <= 1e-15);
        if !q.is_identity() && !same {
            if let Ok(sol) = step(&w_ref, &q) {
                return Ok(sol);
            }
        }
    }
    Err(first_err.unwrap_or_else(|| infeasible_or_exhausted(spec, xi, report.residual)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::pauli::*;
    use crate::families;

    fn elem(spec: &AlgebraSpec, a: crate::algebra::CMat, b: f64) -> HermElem {
        HermElem::new(spec.clone(), vec![a, scalar(b)]).unwrap()
    }

    #[test]
    fn exposed_projection_examples() {
        let fam = families::staffelberg();
        let a = fam.algebra().clone();
        assert!(exposed_projection(&fam, &HermElem::zeros(&a)).unwrap().is_identity());
        let p = exposed_projection(&fam, &elem(&a, sigma2(), 1.0)).unwrap();
        assert!(p.elem().approx_eq(&elem(&a, (identity() + sigma2()).scale(0.5), 1.0), 1e-14));
        let p = exposed_projection(&fam, &elem(&a, sigma1(), 0.0)).unwrap();
        assert!(p.elem().approx_eq(&elem(&a, (identity() + sigma1()).scale(0.5), 0.0), 1e-14));
        assert!(matches!(exposed_projection(&fam, &elem(&a, sigma3(), 0.0)), Err(Error::NotInSpan { .. })));
    }

    #[test]
    fn access_steps_in_swallow() {
        let fam = families::swallow();
        let a = fam.algebra().clone();
        let root = LatticeNode::root(&a);
        let edge = access_step(&root, &fam.directions()[0], &fam).unwrap();
        assert_eq!(edge.rank_profile(), vec![1, 1]);
        let c = edge.compression().unwrap();
        let w = c.apply(&fam.directions()[1]).unwrap().scale(-1.0);
        let point = access_step(&edge, &w, &fam).unwrap();
        assert!(point.projection.elem().approx_eq(&elem(&a, (identity() + sigma1()).scale(0.5), 0.0), 1e-12));
        assert!(!point.exposed);
        assert!(revalidate(&point, 1e-9).unwrap());
        let one = HermElem::identity(c.target());
        assert!(access_step(&edge, &one, &fam).is_err());
    }

    #[test]
    fn face_of_interior_and_vertex() {
        let fam = families::staffelberg();
        let sol = face_of_mean_value(&fam, &[0.1, 0.2]).unwrap();
        assert!(sol.face.is_identity());
        let c2 = AlgebraSpec::commutative(2).unwrap();
        let fam = ExpFamilySpec::linear(vec![HermElem::diagonal(&c2, &[1.0, 0.0]).unwrap()]).unwrap();
        let sol = face_of_mean_value(&fam, &[1.0]).unwrap();
        assert_eq!(sol.face.rank_profile(), vec![1, 0]);
        assert!((sol.state.elem().diag()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn face_of_staffelberg_points() {
        let fam = families::staffelberg();
        let a = fam.algebra().clone();
        let phi: f64 = 2.0;
        let sol = face_of_mean_value(&fam, &[phi.cos(), phi.sin()]).unwrap();
        let want = elem(&a, (identity() + bloch([phi.cos(), phi.sin(), 0.0])).scale(0.5), 0.0);
        assert!(sol.face.elem().approx_eq(&want, 1e-6));
        let sol = face_of_mean_value(&fam, &[0.0, 1.0]).unwrap();
        assert_eq!(sol.face.rank_profile(), vec![1, 1]);
    }

    #[test]
    fn triangle_lattice() {
        let c3 = AlgebraSpec::commutative(3).unwrap();
        let fam = ExpFamilySpec::linear(vec![
            HermElem::diagonal(&c3, &[1.0, -1.0, 0.0]).unwrap(),
            HermElem::diagonal(&c3, &[0.0, 1.0, -1.0]).unwrap(),
        ])
        .unwrap();
        let rep = enumerate_lattice(&fam, &LatticeBudget { max_depth: 2, ..Default::default() }).unwrap();
        assert_eq!(rep.nodes.len(), 7);
        assert!(rep.nodes.iter().all(|n| n.exposed));
        assert!(rep.nodes.iter().all(|n| revalidate(n, 1e-7).unwrap()));
    }
}
