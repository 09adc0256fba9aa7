//! rI-projections onto the closure of an exponential family, entropy
//! distance, maximum-entropy inference with boundary solutions, the
//! Pythagorean identities, and necessary conditions for local maximizers of
//! the entropy distance.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::random::random_state_with;
use crate::algebra::{hs_inner_unchecked, AlgebraSpec, HermElem, NormKind, State};
use crate::entropy::{relative_entropy, von_neumann_entropy, ExtReal};
use crate::error::{Error, Result};
use crate::expfam::{free_energy, gibbs_state, mean_value, ExpFamilySpec, NewtonOptions};
use crate::io::{elem_to_json, projection_to_json};
use crate::lattice::{face_of_mean_value, face_of_mean_value_with, FaceSolution};
use crate::spectral::{eigh, proj_leq, support_projection, zero_tol, Compression, Projection};

/// Trace-norm radius of the cl^rI membership test.
pub const CLOSURE_TOL: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct ProjectionResult {
    /// `π_ℰ(ρ)`.
    pub pi: State,
    pub face: Projection,
    /// `λ` with `π = R_{p𝒜p}(c^p(θ₀ + Σλ_i u_i))`, minimal norm among all such.
    pub parameters: Vec<f64>,
    pub distance: ExtReal,
    pub residual: f64,
    pub solution: FaceSolution,
}

impl ProjectionResult {
    pub fn to_json(&self) -> Value {
        json!({
            "state": elem_to_json(self.pi.elem()),
            "face": projection_to_json(&self.face),
            "face_rank_profile": self.face.rank_profile(),
            "parameters": self.parameters,
            "distance": self.distance,
            "residuals": { "mean_value": self.residual },
        })
    }
}

/// `π_ℰ(ρ)`: the member of the rI-closure with the mean value of `ρ`.
pub fn ri_projection(spec: &ExpFamilySpec, rho: &State) -> Result<ProjectionResult> {
    let xi = mean_value(rho, spec)?;
    let solution = face_of_mean_value(spec, xi.coords())?;
    let pi = solution.state.clone();
    let distance = distance_to_solution(rho, &solution)?;
    if distance.is_infinite() {
        log::error!("support of ρ is not below the face of its projection");
        return Err(Error::BudgetExhausted { residual: solution.residual });
    }
    Ok(ProjectionResult {
        face: solution.face.clone(),
        parameters: solution.lambdas.clone(),
        residual: solution.residual,
        pi,
        distance,
        solution,
    })
}

/// `S(ρ, R_{p𝒜p}(θ_p))` through `log R = θ_p − F(θ_p)` on `p𝒜p`, which stays
/// accurate when small eigenvalues of the state underflow.
fn distance_to_solution(rho: &State, sol: &FaceSolution) -> Result<ExtReal> {
    if !proj_leq(&support_projection(rho.elem()), &sol.face) {
        return Ok(ExtReal::Infinite);
    }
    let r = sol.compression.apply(rho.elem())?;
    let r = State::from_positive(r)?;
    let value = -von_neumann_entropy(&r) - hs_inner_unchecked(r.elem(), &sol.theta) + free_energy(&sol.theta);
    Ok(ExtReal::finite(value))
}

/// `d_ℰ(ρ) = S(ρ, π_ℰ(ρ))`.
pub fn entropy_distance(spec: &ExpFamilySpec, rho: &State) -> Result<ExtReal> {
    Ok(ri_projection(spec, rho)?.distance)
}

#[derive(Clone, Debug)]
pub struct MaxEntResult {
    pub rho: State,
    pub face: Projection,
    /// `β` with `ρ = R_{p𝒜p}(c^p(−Σβ_i u_i))`.
    pub betas: Vec<f64>,
    pub entropy: f64,
    /// `F_{p𝒜p}(c^p(−Σβ_i u_i))`.
    pub free_energy_face: f64,
    /// Euclidean residual of the mean-value equations.
    pub residual: f64,
    pub xi: Vec<f64>,
}

impl MaxEntResult {
    /// `|S(ρ) − F_{p𝒜p} − Σβ_iξ_i|`.
    pub fn closed_form_gap(&self) -> f64 {
        let dot: f64 = self.betas.iter().zip(&self.xi).map(|(b, x)| b * x).sum();
        (self.entropy - self.free_energy_face - dot).abs()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "state": elem_to_json(self.rho.elem()),
            "face": projection_to_json(&self.face),
            "face_rank_profile": self.face.rank_profile(),
            "betas": self.betas,
            "entropy": self.entropy,
            "free_energy_face": self.free_energy_face,
            "residuals": { "mean_value": self.residual, "closed_form": self.closed_form_gap() },
        })
    }
}

/// The unique maximizer of `S` on `{ρ : m(ρ) = ξ}` for the linear family `R(U)`.
/// A nonzero base point of `spec` is ignored.
pub fn max_entropy(spec: &ExpFamilySpec, xi: &[f64]) -> Result<MaxEntResult> {
    max_entropy_with(spec, xi, &NewtonOptions::default())
}

pub fn max_entropy_with(spec: &ExpFamilySpec, xi: &[f64], opts: &NewtonOptions) -> Result<MaxEntResult> {
    let linear = ExpFamilySpec::linear(spec.directions().to_vec())?;
    let sol = face_of_mean_value_with(&linear, xi, opts)?;
    let betas: Vec<f64> = sol.lambdas.iter().map(|l| 0.0 - l).collect();
    let entropy = von_neumann_entropy(&sol.state);
    Ok(MaxEntResult {
        free_energy_face: free_energy(&sol.theta),
        rho: sol.state,
        face: sol.face,
        betas,
        entropy,
        residual: sol.residual,
        xi: xi.to_vec(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PythagorasReport {
    pub s_rho_pi: ExtReal,
    pub s_pi_sigma: ExtReal,
    pub s_rho_sigma: ExtReal,
    /// `|S(ρ,π) + S(π,σ) − S(ρ,σ)|`; zero when both sides are infinite, infinite when only one is.
    pub gap: f64,
}

/// `‖σ − π_ℰ(σ)‖₁`, zero exactly on the rI-closure.
pub fn closure_defect(spec: &ExpFamilySpec, sigma: &State) -> Result<f64> {
    let p = ri_projection(spec, sigma)?;
    Ok(sigma.trace_distance(&p.pi))
}

/// Complete Pythagorean identity `S(ρ,π_ℰ(ρ)) + S(π_ℰ(ρ),σ) = S(ρ,σ)` for `σ` in the rI-closure.
///
/// Divergences to `π_ℰ(ρ)` and to `σ` are evaluated through the face
/// parameters of `π_ℰ(ρ)` and of `π_ℰ(σ) = σ`, so eigenvalues that underflow
/// in the matrix form do not turn finite values into `∞`.
pub fn pythagoras_check(spec: &ExpFamilySpec, rho: &State, sigma: &State) -> Result<PythagorasReport> {
    let sigma_proj = ri_projection(spec, sigma)?;
    let defect = sigma.trace_distance(&sigma_proj.pi);
    if defect > CLOSURE_TOL {
        return Err(Error::NotInClosure { distance: defect });
    }
    let proj = ri_projection(spec, rho)?;
    let a = proj.distance;
    let b = distance_to_solution(&proj.pi, &sigma_proj.solution)?;
    let c = distance_to_solution(rho, &sigma_proj.solution)?;
    let gap = match (a.add(b), c) {
        (ExtReal::Finite(l), ExtReal::Finite(r)) => (l - r).abs(),
        (ExtReal::Infinite, ExtReal::Infinite) => 0.0,
        _ => f64::INFINITY,
    };
    Ok(PythagorasReport { s_rho_pi: a, s_pi_sigma: b, s_rho_sigma: c, gap })
}

fn is_invertible(s: &State) -> bool {
    eigh(s.elem()).min() > zero_tol(s.elem())
}

/// `|S(ρ,σ) + S(σ,τ) − S(ρ,τ)|` under the hypothesis `ρ − σ ⊥ log τ − log σ`.
pub fn classic_pythagoras_check(rho: &State, sigma: &State, tau: &State) -> Result<f64> {
    rho.spec().check_same(sigma.spec())?;
    rho.spec().check_same(tau.spec())?;
    if !is_invertible(sigma) || !is_invertible(tau) {
        return Err(Error::Precondition("σ and τ must be invertible".into()));
    }
    let log_tau = eigh(tau.elem()).map(f64::ln);
    let log_sigma = eigh(sigma.elem()).map(f64::ln);
    let inner = hs_inner_unchecked(&(rho.elem() - sigma.elem()), &(&log_tau - &log_sigma));
    if inner.abs() > 1e-9 {
        return Err(Error::HypothesisViolated { inner });
    }
    let a = relative_entropy(rho, sigma)?.value();
    let b = relative_entropy(sigma, tau)?.value();
    let c = relative_entropy(rho, tau)?.value();
    Ok((a + b - c).abs())
}

#[derive(Clone, Debug, Serialize)]
pub struct MaximizerCertificate {
    /// `dim 𝔽(s(ρ)) ≤ dim ℰ`.
    pub rank_bound_ok: bool,
    pub dim_face: usize,
    pub dim_family: usize,
    /// `ρ = R_{p𝒜p}(c^p(θ))` with `p = s(ρ)` and `θ` the parameter of `π_ℰ(ρ)`.
    pub cutoff_ok: bool,
    pub cutoff_residual: f64,
    /// `F_{q𝒜q}(c^q(θ))` with `q = s(π_ℰ(ρ))`.
    pub free_energy_q: f64,
    /// `F_{p𝒜p}(c^p(θ))`.
    pub free_energy_p: f64,
    pub measured_distance: f64,
    /// `|F_q − F_p − d_ℰ(ρ)|`.
    pub distance_formula_gap: f64,
    /// Supremum of `|⟨u, log^{[p]}ρ − c^p(θ)⟩|` over unit traceless `u` in `p𝒜p`.
    pub gradient_norm: f64,
}

/// Full ambient parameter `θ₀ + Σλ_i u_i` of the projection.
fn ambient_parameter(spec: &ExpFamilySpec, proj: &ProjectionResult) -> Result<HermElem> {
    spec.parameter(&proj.parameters)
}

/// In the coordinates of `p𝒜p`, `log ρ − c^p(θ)` with its traceless part.
fn face_gradient(rho: &State, theta: &HermElem, p: &Projection) -> Result<(Compression, HermElem)> {
    let c = Compression::new(p)?;
    let r = c.apply(rho.elem())?;
    let log_r = eigh(&r).map(|x| x.max(1e-300).ln());
    let g = (&log_r - &c.apply(theta)?).traceless();
    Ok((c, g))
}

/// Necessary conditions for `ρ` to be a local maximizer of `d_ℰ`.
pub fn maximizer_certificate(spec: &ExpFamilySpec, rho: &State) -> Result<MaximizerCertificate> {
    let p = support_projection(rho.elem());
    let dim_c: usize = p.rank_profile().iter().map(|r| r * r).sum();
    let dim_face = dim_c - 1;
    let dim_family = spec.dim();
    let proj = ri_projection(spec, rho)?;
    let theta = ambient_parameter(spec, &proj)?;
    let cp = Compression::new(&p)?;
    let cq = Compression::new(&proj.face)?;
    let theta_p = cp.apply(&theta)?;
    let free_energy_p = free_energy(&theta_p);
    let free_energy_q = free_energy(&cq.apply(&theta)?);
    let cutoff = cp.lift_state(&gibbs_state(&theta_p))?;
    let cutoff_residual = rho.trace_distance(&cutoff);
    let measured_distance = proj.distance.value();
    let (_, g) = face_gradient(rho, &theta, &p)?;
    Ok(MaximizerCertificate {
        rank_bound_ok: dim_face <= dim_family,
        dim_face,
        dim_family,
        cutoff_ok: cutoff_residual <= 1e-6,
        cutoff_residual,
        free_energy_q,
        free_energy_p,
        measured_distance,
        distance_formula_gap: (free_energy_q - free_energy_p - measured_distance).abs(),
        gradient_norm: g.norm(NormKind::Two),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AscentOptions {
    pub max_iter: usize,
    pub initial_step: f64,
    /// Eigenvalues below this are removed when snapping to a smaller face.
    pub snap_tol: f64,
    pub gradient_tol: f64,
}

impl Default for AscentOptions {
    fn default() -> Self {
        Self { max_iter: 400, initial_step: 1.0, snap_tol: 1e-6, gradient_tol: 1e-10 }
    }
}

#[derive(Clone, Debug)]
pub struct AscentReport {
    pub states: Vec<State>,
    pub distances: Vec<f64>,
    pub certificate: MaximizerCertificate,
}

impl AscentReport {
    pub fn last(&self) -> &State {
        self.states.last().expect("ascent keeps the start state")
    }
}

/// Removes eigenvalues below `tol` and renormalizes.
fn snap(rho: &State, tol: f64) -> Result<State> {
    let e = eigh(rho.elem());
    State::from_positive(e.map(|x| if x < tol { 0.0 } else { x }))
}

/// Heuristic ascent of `d_ℰ` from a random full-rank state.
///
/// Within the face `p = s(ρ)` the iteration takes exponentiated-gradient
/// steps `ρ ← R_{p𝒜p}(log^{[p]}ρ + η·g)` with `g` the traceless part of
/// `log^{[p]}ρ − c^p(θ)`, backtracking on `d_ℰ`. Tiny eigenvalues are snapped
/// to zero when that does not lower `d_ℰ`, and a small admixture of the
/// complement of `p` is probed before stopping.
pub fn ascend_entropy_distance(spec: &ExpFamilySpec, seed: u64, opts: &AscentOptions) -> Result<AscentReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rho = random_state_with(&mut rng, spec.algebra(), None)?;
    let mut proj = ri_projection(spec, &rho)?;
    let mut d = proj.distance.value();
    let mut states = vec![rho.clone()];
    let mut distances = vec![d];
    let mut step = opts.initial_step;
    for _ in 0..opts.max_iter {
        let p = support_projection(rho.elem());
        let theta = ambient_parameter(spec, &proj)?;
        let (c, g) = face_gradient(&rho, &theta, &p)?;
        let gnorm = g.norm(NormKind::Two);
        let mut improved = false;
        if gnorm > opts.gradient_tol {
            let r = c.apply(rho.elem())?;
            let log_r = eigh(&r).map(|x| x.max(1e-300).ln());
            let mut eta = step;
            while eta > 1e-12 {
                let cand = c.lift_state(&gibbs_state(&log_r.add_scaled(eta, &g)))?;
                let cp = ri_projection(spec, &cand)?;
                let cd = cp.distance.value();
                if cd > d + 1e-15 {
                    rho = cand;
                    proj = cp;
                    d = cd;
                    improved = true;
                    step = (eta * 2.0).min(1e3);
                    break;
                }
                eta *= 0.5;
            }
        }
        if improved {
            let snapped = snap(&rho, opts.snap_tol)?;
            if support_projection(snapped.elem()).rank() < support_projection(rho.elem()).rank() {
                let sp = ri_projection(spec, &snapped)?;
                if sp.distance.value() >= d - 1e-12 {
                    rho = snapped;
                    d = sp.distance.value();
                    proj = sp;
                }
            }
            states.push(rho.clone());
            distances.push(d);
            continue;
        }
        let comp = p.complement();
        if !comp.is_zero() {
            let probe = rho.mix(1.0 - 1e-3, &comp.tracial_state())?;
            let pp = ri_projection(spec, &probe)?;
            if pp.distance.value() > d + 1e-12 {
                rho = probe;
                d = pp.distance.value();
                proj = pp;
                states.push(rho.clone());
                distances.push(d);
                continue;
            }
        }
        break;
    }
    let certificate = maximizer_certificate(spec, &rho)?;
    Ok(AscentReport { states, distances, certificate })
}

/// States of `ℰ` at parameters drawn uniformly from `[−scale, scale]^k`.
pub fn sample_family(spec: &ExpFamilySpec, n: usize, scale: f64, seed: u64) -> Result<Vec<State>> {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let l: Vec<f64> = (0..spec.k()).map(|_| rng.gen_range(-scale..=scale)).collect();
            Ok(gibbs_state(&spec.parameter(&l)?))
        })
        .collect()
}

/// The commutative independence family of `n` bits on `ℂ^{2ⁿ}`, spanned by the single-bit observables.
pub fn independence_family(bits: usize) -> Result<ExpFamilySpec> {
    let dim = 1usize << bits;
    let spec = AlgebraSpec::commutative(dim)?;
    let dirs = (0..bits)
        .map(|b| {
            let d: Vec<f64> = (0..dim).map(|x| if (x >> b) & 1 == 1 { 1.0 } else { -1.0 }).collect();
            HermElem::diagonal(&spec, &d)
        })
        .collect::<Result<Vec<_>>>()?;
    ExpFamilySpec::linear(dirs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::pauli::*;
    use crate::algebra::random_state;
    use crate::families;
    use approx::assert_relative_eq;

    fn c2_family() -> ExpFamilySpec {
        let c2 = AlgebraSpec::commutative(2).unwrap();
        ExpFamilySpec::linear(vec![HermElem::diagonal(&c2, &[1.0, 0.0]).unwrap()]).unwrap()
    }

    #[test]
    fn max_entropy_examples() {
        let r = max_entropy(&c2_family(), &[0.5]).unwrap();
        assert_relative_eq!(r.entropy, 2f64.ln(), epsilon = 1e-12);
        let r = max_entropy(&c2_family(), &[1.0]).unwrap();
        assert_eq!(r.face.rank_profile(), vec![1, 0]);
        assert!(r.entropy.abs() < 1e-12);
        assert!(r.closed_form_gap() < 1e-8);
        let m2 = AlgebraSpec::full(2).unwrap();
        let fam = ExpFamilySpec::linear(vec![HermElem::new(m2, vec![sigma3()]).unwrap()]).unwrap();
        let r = max_entropy(&fam, &[0.0]).unwrap();
        assert_relative_eq!(r.entropy, 2f64.ln(), epsilon = 1e-12);
        assert!(matches!(max_entropy(&c2_family(), &[1.5]), Err(Error::OutsideConvexSupport { .. })));
    }

    #[test]
    fn projection_of_family_member_is_itself() {
        let fam = families::staffelberg();
        let rho = gibbs_state(&fam.parameter(&[0.4, -0.2]).unwrap());
        let p = ri_projection(&fam, &rho).unwrap();
        assert!(p.pi.trace_distance(&rho) < 1e-8);
        assert!(p.distance.value() < 1e-12);
    }

    #[test]
    fn staffelberg_sigma3_state() {
        let fam = families::staffelberg();
        let a = fam.algebra().clone();
        let rho = State::new(HermElem::new(a, vec![(identity() + sigma3()).scale(0.5), scalar(0.0)]).unwrap()).unwrap();
        let p = ri_projection(&fam, &rho).unwrap();
        assert!(p.distance.value() > 0.0);
        for s in sample_family(&fam, 2000, 4.0, 3).unwrap() {
            assert!(p.distance.value() <= relative_entropy(&rho, &s).unwrap().value() + 1e-12);
        }
    }

    #[test]
    fn pythagoras_with_geodesic_limit() {
        let fam = families::staffelberg();
        let rho = random_state(fam.algebra(), 5, None).unwrap();
        let u = &fam.directions()[1];
        let (sigma, _) = crate::expfam::e_geodesic_limit(&HermElem::zeros(fam.algebra()), u).unwrap();
        let rep = pythagoras_check(&fam, &rho, &sigma).unwrap();
        assert!(rep.gap <= 1e-7 || rep.gap == 0.0, "{rep:?}");
        let bad = State::new(HermElem::new(fam.algebra().clone(), vec![(identity() + sigma3()).scale(0.5), scalar(0.0)]).unwrap()).unwrap();
        assert!(matches!(pythagoras_check(&fam, &rho, &bad), Err(Error::NotInClosure { .. })));
    }

    #[test]
    fn classic_pythagoras_trivial_cases() {
        let a = AlgebraSpec::new(vec![2, 1]).unwrap();
        let r = random_state(&a, 1, None).unwrap();
        let s = random_state(&a, 2, None).unwrap();
        assert!(classic_pythagoras_check(&r, &s, &s).unwrap() < 1e-12);
        let t = random_state(&a, 3, None).unwrap();
        assert!(classic_pythagoras_check(&s, &s, &t).unwrap() < 1e-12);
        assert!(matches!(classic_pythagoras_check(&r, &s, &t), Err(Error::HypothesisViolated { .. })));
    }

    #[test]
    fn independence_ascent_reaches_log2() {
        let fam = independence_family(2).unwrap();
        let rep = ascend_entropy_distance(&fam, 7, &AscentOptions::default()).unwrap();
        assert!((rep.distances.last().unwrap() - 2f64.ln()).abs() < 1e-6, "{:?}", rep.distances.last());
        assert!(rep.certificate.rank_bound_ok);
        let again = ascend_entropy_distance(&fam, 7, &AscentOptions::default()).unwrap();
        assert_eq!(rep.distances, again.distances);
    }
}
