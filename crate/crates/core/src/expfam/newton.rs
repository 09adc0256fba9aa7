//! Inversion of the mean-value chart by damped Newton iteration.
//!
//! The iteration minimizes the convex dual objective
//! `Φ(μ) = F(θ₀ + Σ μ_j E_j) − ⟨μ, η⟩` where `E_j` is a Hilbert-Schmidt
//! orthonormal basis of the traceless parts of `U`. Its gradient is the
//! mean-value residual and its Hessian is the BKM Gram matrix of the `E_j`.
//! When `ξ` lies on the boundary of the convex support, `Φ` has no minimizer
//! and the Newton steps align with a direction exposing a face containing `ξ`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use super::{gram, GibbsEval};
use crate::algebra::{hs_inner_unchecked, AlgebraSpec, HermElem, NormKind, State};
use crate::error::{Error, Result};
use crate::spectral::{eigh, max_projection_with_tol};

/// Armijo sufficient-decrease constant.
const ARMIJO: f64 = 1e-4;
/// Longest accepted Newton step in `μ` coordinates, or `‖μ‖` if larger,
/// so that escapes toward faces with small spectral gaps double `‖μ‖` per step.
const MAX_STEP: f64 = 50.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NewtonOptions {
    /// Residual `‖m(R(θ)) − ξ‖₂` accepted as converged.
    pub tol: f64,
    pub max_iter: usize,
    /// Divergence is declared once `‖μ‖₂` exceeds this.
    pub param_cap: f64,
    /// Divergence is declared once the smallest BKM Hessian eigenvalue drops below this.
    pub hessian_floor: f64,
    /// Smallest eigenvalue of an accepted interior solution, unless the
    /// smallest Hessian eigenvalue clears the same bound.
    pub min_weight: f64,
    /// Tolerance for the consistency of `ξ` along directions with vanishing traceless part.
    pub gauge_tol: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 200,
            param_cap: 1e8,
            hessian_floor: 1e-11,
            min_weight: 1e-9,
            gauge_tol: 1e-9,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NewtonReport {
    /// Final parameter `θ₀ + Σ λ_i u_i`.
    #[serde(skip)]
    pub theta: HermElem,
    pub lambdas: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub diverged: bool,
    /// Unit-norm element of `U` along which the iteration escaped, if it diverged.
    #[serde(skip)]
    pub escape_direction: Option<HermElem>,
    /// Coefficients of the escape direction in the basis `u_i`.
    pub escape_coords: Option<Vec<f64>>,
    /// Smallest eigenvalue of the final state.
    pub min_weight: f64,
}

impl NewtonReport {
    pub fn state(&self) -> State {
        super::gibbs_state(&self.theta)
    }
}

/// A mean-value problem `m(R(θ₀ + Σλ_i u_i)) = ξ` in an arbitrary algebra.
///
/// Unlike [`super::ExpFamilySpec`] the directions may be linearly dependent,
/// which happens after compressing a family to a face.
#[derive(Clone, Debug)]
pub struct ChartProblem {
    theta0: HermElem,
    dirs: Vec<HermElem>,
}

impl ChartProblem {
    pub fn new(theta0: HermElem, dirs: Vec<HermElem>) -> Self {
        Self { theta0, dirs }
    }

    pub fn algebra(&self) -> &AlgebraSpec {
        self.theta0.spec()
    }

    pub fn theta0(&self) -> &HermElem {
        &self.theta0
    }

    pub fn directions(&self) -> &[HermElem] {
        &self.dirs
    }

    pub fn k(&self) -> usize {
        self.dirs.len()
    }

    pub fn parameter(&self, lambdas: &[f64]) -> HermElem {
        let mut t = self.theta0.clone();
        for (l, u) in lambdas.iter().zip(&self.dirs) {
            t = t.add_scaled(*l, u);
        }
        t
    }

    pub fn mean(&self, rho: &HermElem) -> Vec<f64> {
        self.dirs.iter().map(|u| hs_inner_unchecked(u, rho)).collect()
    }

    /// `⟨c, ξ⟩ − λ⁺(Σ c_i u_i)`; positive values certify `ξ ∉ cs(U)`.
    pub fn support_violation(&self, c: &[f64], xi: &[f64]) -> f64 {
        let w = self.direction(c);
        let dot: f64 = c.iter().zip(xi).map(|(a, b)| a * b).sum();
        dot - eigh(&w).max()
    }

    pub fn direction(&self, c: &[f64]) -> HermElem {
        let mut w = HermElem::zeros(self.algebra());
        for (ci, u) in c.iter().zip(&self.dirs) {
            w = w.add_scaled(*ci, u);
        }
        w
    }

    /// `λ⁺(Σc_iu_i) − ⟨c, ξ⟩` and its gradient, taken from the tracial state
    /// on the top eigenspace. Both use the exact top eigenvalue: clustering
    /// near-ties would average them and make the gap negative at kinks.
    fn support_gap(&self, c: &[f64], xi: &[f64]) -> (f64, Vec<f64>) {
        let w = self.direction(c);
        let lam = eigh(&w).max();
        let (_, q) = max_projection_with_tol(&w, 1e-15 * w.max_abs().max(1.0));
        let r = q.elem().trace();
        let dot: f64 = c.iter().zip(xi).map(|(a, b)| a * b).sum();
        let grad = self.dirs.iter().zip(xi).map(|(u, x)| hs_inner_unchecked(u, q.elem()) / r - x).collect();
        (lam - dot, grad)
    }

    /// Refines an approximate normal `c₀` of a supporting hyperplane through
    /// `ξ` by minimizing the support gap over the slice `⟨c, c₀⟩ = ‖c₀‖²`
    /// with Barzilai-Borwein gradient steps. Where the top eigenvalue is
    /// simple and the minimal gap is zero, the top eigenvector has mean `ξ`.
    pub(crate) fn refine_normal(&self, xi: &[f64], c0: &[f64]) -> (Vec<f64>, f64) {
        let n0 = c0.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n0 == 0.0 {
            return (c0.to_vec(), f64::INFINITY);
        }
        let unit: Vec<f64> = c0.iter().map(|x| x / n0).collect();
        let tangent = |g: &[f64]| -> Vec<f64> {
            let d: f64 = g.iter().zip(&unit).map(|(a, b)| a * b).sum();
            g.iter().zip(&unit).map(|(a, b)| a - d * b).collect()
        };
        let mut c = c0.to_vec();
        let (mut gap, grad) = self.support_gap(&c, xi);
        let mut gt = tangent(&grad);
        let mut step = 1.0;
        for _ in 0..5000 {
            let gn = gt.iter().map(|x| x * x).sum::<f64>().sqrt();
            if gn <= 1e-15 {
                break;
            }
            let mut accepted = None;
            let mut s = step;
            while s > 1e-18 {
                let cand: Vec<f64> = c.iter().zip(&gt).map(|(a, g)| a - s * g).collect();
                let (cg, cgrad) = self.support_gap(&cand, xi);
                // Near the minimum the decrease of the gap drops below its
                // rounding error; the tangential gradient still decides.
                let noise = 1e-15 * (1.0 + cg.abs() + gap.abs());
                let gn_new = tangent(&cgrad).iter().map(|x| x * x).sum::<f64>().sqrt();
                if cg <= gap - 1e-4 * s * gn * gn || (cg <= gap + noise && gn_new < gn) {
                    accepted = Some((cand, cg, cgrad, s));
                    break;
                }
                s *= 0.5;
            }
            let Some((cand, cg, cgrad, s)) = accepted else { break };
            let new_gt = tangent(&cgrad);
            let dy: Vec<f64> = new_gt.iter().zip(&gt).map(|(a, b)| a - b).collect();
            let sy: f64 = dy.iter().zip(&gt).map(|(y, g)| -s * g * y).sum();
            let yy: f64 = dy.iter().map(|y| y * y).sum();
            step = if sy > 0.0 && yy > 0.0 { sy / yy } else { 2.0 * s };
            c = cand;
            gap = cg;
            gt = new_gt;
        }
        (c, gap)
    }

    /// Searches for `c` with `⟨c, ξ⟩ > λ⁺(Σ c_i u_i)` by projected
    /// subgradient ascent on the unit ball. Returns the best `c` and its violation.
    pub fn find_certificate(&self, xi: &[f64]) -> (Vec<f64>, f64) {
        let k = self.k();
        if k == 0 {
            return (vec![], 0.0);
        }
        let n = self.algebra().dim() as f64;
        let center: Vec<f64> = self.dirs.iter().map(|u| u.trace() / n).collect();
        let mut c: Vec<f64> = xi.iter().zip(&center).map(|(a, b)| a - b).collect();
        normalize(&mut c);
        if c.iter().all(|x| *x == 0.0) {
            c[0] = 1.0;
        }
        let mut best = (c.clone(), self.support_violation(&c, xi));
        for it in 0..2000 {
            let w = self.direction(&c);
            let e = eigh(&w);
            let top = e.max();
            // Subgradient of λ⁺ at c: the mean value of a top eigenvector.
            let mut g = vec![0.0; k];
            'outer: for b in 0..w.spec().num_blocks() {
                let (vals, vecs) = e.block(b);
                for (j, &v) in vals.iter().enumerate() {
                    if v == top {
                        let col = vecs.column(j);
                        for (i, u) in self.dirs.iter().enumerate() {
                            g[i] = (col.adjoint() * u.block(b) * col)[(0, 0)].re;
                        }
                        break 'outer;
                    }
                }
            }
            let step = 0.5 / ((it + 1) as f64).sqrt();
            for i in 0..k {
                c[i] += step * (xi[i] - g[i]);
            }
            let nrm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
            if nrm > 1.0 {
                c.iter_mut().for_each(|x| *x /= nrm);
            }
            let v = self.support_violation(&c, xi);
            if v > best.1 {
                best = (c.clone(), v);
            }
        }
        best
    }
}

fn normalize(c: &mut [f64]) {
    let n = c.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        c.iter_mut().for_each(|x| *x /= n);
    }
}

/// The problem in orthonormal traceless coordinates `μ`.
struct Reduced {
    basis: Vec<HermElem>,
    /// `λ = M μ`, the minimal-norm coefficients reproducing `Σ μ_j E_j`.
    to_lambda: DMatrix<f64>,
    eta: DVector<f64>,
}

fn reduce(problem: &ChartProblem, xi: &[f64], opts: &NewtonOptions) -> Result<Reduced> {
    let k = problem.k();
    let spec = problem.algebra();
    let n = spec.dim() as f64;
    let traceless: Vec<HermElem> = problem.dirs.iter().map(|u| u.traceless()).collect();
    let xi0: Vec<f64> = xi.iter().zip(&problem.dirs).map(|(x, u)| x - u.trace() / n).collect();
    let eig = SymmetricEigen::new(gram(&traceless));
    let gmax = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let cut = 1e-12 * gmax.max(1e-288);
    let scale = xi.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let mut basis = Vec::new();
    let mut cols = Vec::new();
    let mut eta = Vec::new();
    for j in 0..k {
        let g = eig.eigenvalues[j];
        let q = eig.eigenvectors.column(j);
        let s: f64 = (0..k).map(|i| q[i] * xi0[i]).sum();
        if g > cut {
            let sg = g.sqrt();
            let mut e = HermElem::zeros(spec);
            for i in 0..k {
                e = e.add_scaled(q[i] / sg, &traceless[i]);
            }
            basis.push(e);
            cols.push(q.map(|x| x / sg));
            eta.push(s / sg);
        } else {
            let mut c: Vec<f64> = q.iter().map(|x| x * s.signum()).collect();
            let violation = problem.support_violation(&c, xi);
            if s.abs() > opts.gauge_tol * scale && violation > 0.0 {
                normalize(&mut c);
                return Err(Error::OutsideConvexSupport { certificate: c, violation });
            }
        }
    }
    let to_lambda = if cols.is_empty() { DMatrix::zeros(k, 0) } else { DMatrix::from_columns(&cols) };
    Ok(Reduced { basis, to_lambda, eta: DVector::from_vec(eta) })
}

/// Inverts the mean-value chart of `spec` at `ξ` with default options.
pub fn invert_mean_chart(spec: &super::ExpFamilySpec, xi: &[f64]) -> Result<NewtonReport> {
    invert_mean_chart_with(spec, xi, &NewtonOptions::default())
}

pub fn invert_mean_chart_with(spec: &super::ExpFamilySpec, xi: &[f64], opts: &NewtonOptions) -> Result<NewtonReport> {
    let report = solve_chart(&spec.chart_problem(), xi, opts)?;
    if report.diverged {
        if let Some(c) = &report.escape_coords {
            let v = spec.chart_problem().support_violation(c, xi);
            if v > 1e-7 {
                return Err(Error::OutsideConvexSupport { certificate: c.clone(), violation: v });
            }
        }
    }
    Ok(report)
}

/// Runs the damped Newton iteration. A diverged report is not an error; the
/// caller decides whether `ξ` is a boundary point or infeasible.
pub fn solve_chart(problem: &ChartProblem, xi: &[f64], opts: &NewtonOptions) -> Result<NewtonReport> {
    let k = problem.k();
    if xi.len() != k {
        return Err(Error::DimensionMismatch(format!("mean value of length {} for {} directions", xi.len(), k)));
    }
    if xi.iter().any(|x| !x.is_finite()) {
        return Err(Error::Parse("non-finite mean value".into()));
    }
    let red = reduce(problem, xi, opts)?;
    let r = red.basis.len();
    let theta_of = |mu: &DVector<f64>| {
        let mut t = problem.theta0.clone();
        for (m, e) in mu.iter().zip(&red.basis) {
            t = t.add_scaled(*m, e);
        }
        t
    };
    let residual_of = |g: &GibbsEval| -> f64 {
        problem
            .mean(&g.state)
            .iter()
            .zip(xi)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    };
    let phi = |g: &GibbsEval, mu: &DVector<f64>| g.free_energy - mu.dot(&red.eta);

    let mut mu = DVector::zeros(r);
    let mut eval = GibbsEval::new(&theta_of(&mu));
    let mut last_step: Option<DVector<f64>> = None;
    let mut iterations = 0;
    let mut diverged = false;
    loop {
        let residual = residual_of(&eval);
        if r == 0 {
            diverged = residual > opts.tol;
            break;
        }
        let min_weight = eigh(&eval.state).min();
        let grad = DVector::from_iterator(r, red.basis.iter().zip(red.eta.iter()).map(|(e, h)| eval.mean(e) - h));
        let hess = eval.bkm_gram(&red.basis);
        let he = SymmetricEigen::new(hess);
        let hmin = he.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        // Near the boundary the Hessian degenerates along the escape direction,
        // so a well-conditioned Hessian certifies an interior solution even when
        // some weight underflows.
        if residual <= opts.tol && (min_weight >= opts.min_weight || hmin >= opts.min_weight) {
            break;
        }
        if iterations >= opts.max_iter || mu.norm() > opts.param_cap {
            diverged = true;
            break;
        }
        let mut step = DVector::zeros(r);
        for (l, &h) in he.eigenvalues.iter().enumerate() {
            if h > 0.0 {
                let v = he.eigenvectors.column(l);
                step -= v * (v.dot(&grad) / h);
            }
        }
        if hmin < opts.hessian_floor {
            if last_step.is_none() && step.norm() > 0.0 {
                last_step = Some(step);
            }
            diverged = true;
            break;
        }
        let len = step.norm();
        let cap = MAX_STEP.max(mu.norm());
        if len > cap {
            step *= cap / len;
        }
        let phi0 = phi(&eval, &mu);
        let slope = grad.dot(&step);
        let slack = 1e-14 * phi0.abs().max(1.0);
        let mut alpha = 1.0;
        let accepted = loop {
            let cand = &mu + &step * alpha;
            let ce = GibbsEval::new(&theta_of(&cand));
            if phi(&ce, &cand) <= phi0 + ARMIJO * alpha * slope + slack {
                break Some((cand, ce));
            }
            alpha *= 0.5;
            if alpha < 1e-12 {
                break None;
            }
        };
        iterations += 1;
        match accepted {
            Some((cand, ce)) => {
                last_step = Some(&cand - &mu);
                mu = cand;
                eval = ce;
            }
            None => {
                diverged = residual_of(&eval) > opts.tol;
                break;
            }
        }
    }

    let lambdas: Vec<f64> = (&red.to_lambda * &mu).iter().copied().collect();
    let theta = problem.parameter(&lambdas);
    let residual = residual_of(&eval);
    let min_weight = eigh(&eval.state).min();
    let (escape_direction, escape_coords) = match (diverged, last_step) {
        (true, Some(d)) if r > 0 => {
            let mut c: Vec<f64> = (&red.to_lambda * d).iter().copied().collect();
            let w = problem.direction(&c);
            let nrm = w.norm(NormKind::Two);
            if nrm > 0.0 {
                c.iter_mut().for_each(|x| *x /= nrm);
                (Some(w.scale(1.0 / nrm)), Some(c))
            } else {
                (None, None)
            }
        }
        _ => (None, None),
    };
    log::debug!("newton: {iterations} iterations, residual {residual:e}, diverged {diverged}");
    Ok(NewtonReport { theta, lambdas, residual, iterations, diverged, escape_direction, escape_coords, min_weight })
}
