//! Exponential families `R(Θ)`, free energy and its derivatives, the BKM
//! metric, mean values, and the limits of e-geodesics.
//!
//! `R(θ) = exp(θ)/tr exp(θ)` and `F(θ) = log tr exp(θ)` are evaluated in the
//! algebra carried by `θ`, so the same functions serve compressed algebras.

mod newton;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::algebra::{hs_inner, hs_inner_unchecked, AlgebraSpec, CMat, HermElem, State, C64};
use crate::entropy::relative_entropy;
use crate::error::{Error, Result};
use crate::spectral::{eigh, kernel_projection, max_projection, proj_leq, support_projection, top_gap, zero_tol, BlockEigen, Compression};

pub use newton::{invert_mean_chart, invert_mean_chart_with, solve_chart, ChartProblem, NewtonOptions, NewtonReport};

/// Smallest accepted ratio of Gram eigenvalues for independent directions.
const INDEPENDENCE_TOL: f64 = 1e-12;

/// An affine parameter space `Θ = θ₀ + span(u₁,…,u_k)` and its family `R(Θ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpFamilySpec {
    theta0: HermElem,
    directions: Vec<HermElem>,
}

impl ExpFamilySpec {
    pub fn new(theta0: HermElem, directions: Vec<HermElem>) -> Result<Self> {
        for u in &directions {
            theta0.spec().check_same(u.spec())?;
        }
        if !directions.is_empty() {
            let g = gram(&directions);
            let eig = SymmetricEigen::new(g);
            let max = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
            let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
            let ratio = if max > 0.0 { min / max } else { 0.0 };
            if ratio <= INDEPENDENCE_TOL {
                return Err(Error::DependentDirections { ratio });
            }
        }
        Ok(Self { theta0, directions })
    }

    /// The linear family `R(span(u₁,…,u_k))`.
    pub fn linear(directions: Vec<HermElem>) -> Result<Self> {
        let first = directions.first().ok_or(Error::EmptySet)?;
        Self::new(HermElem::zeros(first.spec()), directions)
    }

    pub fn algebra(&self) -> &AlgebraSpec {
        self.theta0.spec()
    }

    pub fn theta0(&self) -> &HermElem {
        &self.theta0
    }

    pub fn directions(&self) -> &[HermElem] {
        &self.directions
    }

    pub fn k(&self) -> usize {
        self.directions.len()
    }

    /// `θ₀ + Σ λ_i u_i`.
    pub fn parameter(&self, lambdas: &[f64]) -> Result<HermElem> {
        if lambdas.len() != self.k() {
            return Err(Error::DimensionMismatch(format!("{} parameters for {} directions", lambdas.len(), self.k())));
        }
        let mut t = self.theta0.clone();
        for (l, u) in lambdas.iter().zip(&self.directions) {
            t = t.add_scaled(*l, u);
        }
        Ok(t)
    }

    /// `Σ c_i u_i`.
    pub fn direction(&self, coeffs: &[f64]) -> Result<HermElem> {
        HermElem::combination(coeffs, &self.directions)
    }

    /// Manifold dimension of the family: the dimension of the traceless parts of `U`.
    pub fn dim(&self) -> usize {
        if self.directions.is_empty() {
            return 0;
        }
        let traceless: Vec<HermElem> = self.directions.iter().map(|u| u.traceless()).collect();
        let eig = SymmetricEigen::new(gram(&traceless));
        let max = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
        eig.eigenvalues.iter().filter(|&&g| g > 1e-12 * max.max(1e-300)).count()
    }

    /// Orthogonal projection of `a` onto `U`, as coefficients of the directions.
    pub fn span_coefficients(&self, a: &HermElem) -> Result<Vec<f64>> {
        self.algebra().check_same(a.spec())?;
        if self.directions.is_empty() {
            return Ok(vec![]);
        }
        let g = gram(&self.directions);
        let rhs = nalgebra::DVector::from_iterator(self.k(), self.directions.iter().map(|u| hs_inner_unchecked(u, a)));
        let sol = g
            .lu()
            .solve(&rhs)
            .ok_or(Error::DependentDirections { ratio: 0.0 })?;
        Ok(sol.iter().copied().collect())
    }

    /// Hilbert-Schmidt distance from `a` to the subspace `U`.
    pub fn distance_to_span(&self, a: &HermElem) -> Result<f64> {
        let c = self.span_coefficients(a)?;
        let proj = if c.is_empty() { HermElem::zeros(self.algebra()) } else { self.direction(&c)? };
        Ok((a - &proj).norm(crate::algebra::NormKind::Two))
    }

    /// Restriction of the family to the compressed algebra `p𝒜p`, directions
    /// `c^p(u_i)` and base point `c^p(θ₀)`, without the independence check.
    pub fn compressed(&self, c: &Compression) -> Result<ChartProblem> {
        let theta0 = c.apply(&self.theta0)?;
        let dirs = self.directions.iter().map(|u| c.apply(u)).collect::<Result<Vec<_>>>()?;
        Ok(ChartProblem::new(theta0, dirs))
    }

    pub fn chart_problem(&self) -> ChartProblem {
        ChartProblem::new(self.theta0.clone(), self.directions.clone())
    }
}

/// Hilbert-Schmidt Gram matrix.
pub(crate) fn gram(elems: &[HermElem]) -> DMatrix<f64> {
    let k = elems.len();
    DMatrix::from_fn(k, k, |i, j| hs_inner_unchecked(&elems[i], &elems[j]))
}

/// Coordinates `(⟨u₁,ρ⟩,…,⟨u_k,ρ⟩)` of a state.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeanValue(pub Vec<f64>);

impl MeanValue {
    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn distance(&self, other: &MeanValue) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }

    /// The element of `U` with these coordinates, i.e. `π_U(ρ)` for any state with this mean value.
    pub fn intrinsic(&self, spec: &ExpFamilySpec) -> Result<HermElem> {
        let g = gram(spec.directions());
        let rhs = nalgebra::DVector::from_column_slice(&self.0);
        let c = g.lu().solve(&rhs).ok_or(Error::DependentDirections { ratio: 0.0 })?;
        spec.direction(c.as_slice())
    }
}

pub fn mean_value(rho: &State, spec: &ExpFamilySpec) -> Result<MeanValue> {
    spec.algebra().check_same(rho.spec())?;
    Ok(MeanValue(spec.directions().iter().map(|u| hs_inner_unchecked(u, rho.elem())).collect()))
}

/// Spectral data of `R(θ)` shared by the state, its free energy and the BKM metric.
#[derive(Clone, Debug)]
pub(crate) struct GibbsEval {
    eig: BlockEigen,
    /// `log` of the eigenvalues of `R(θ)`; finite where the weights underflow.
    log_weights: Vec<Vec<f64>>,
    pub free_energy: f64,
    pub state: HermElem,
}

impl GibbsEval {
    pub fn new(theta: &HermElem) -> Self {
        let eig = eigh(theta);
        let top = eig.max();
        let mut z = 0.0;
        let mut weights = Vec::with_capacity(theta.spec().num_blocks());
        let mut log_weights = Vec::with_capacity(theta.spec().num_blocks());
        for i in 0..theta.spec().num_blocks() {
            let (vals, _) = eig.block(i);
            let w: Vec<f64> = vals.iter().map(|x| (x - top).exp()).collect();
            z += w.iter().sum::<f64>();
            weights.push(w);
            log_weights.push(vals.iter().map(|x| x - top).collect::<Vec<f64>>());
        }
        let log_z = z.ln();
        for l in &mut log_weights {
            for x in l.iter_mut() {
                *x -= log_z;
            }
        }
        for w in &mut weights {
            for x in w.iter_mut() {
                *x /= z;
            }
        }
        let blocks = (0..theta.spec().num_blocks())
            .map(|i| {
                let (_, vecs) = eig.block(i);
                let w = &weights[i];
                let k = w.len();
                let d = CMat::from_fn(k, k, |r, c| if r == c { C64::new(w[r], 0.0) } else { C64::new(0.0, 0.0) });
                vecs * d * vecs.adjoint()
            })
            .collect();
        let state = HermElem::from_blocks(theta.spec().clone(), blocks);
        Self { eig, log_weights, free_energy: top + log_z, state }
    }

    pub fn mean(&self, u: &HermElem) -> f64 {
        hs_inner_unchecked(u, &self.state)
    }

    /// Centered directions rotated into the eigenbasis of `R(θ)`.
    fn centered(&self, u: &HermElem) -> Vec<CMat> {
        let m = self.mean(u);
        (0..u.spec().num_blocks())
            .map(|i| {
                let (_, w) = self.eig.block(i);
                let k = w.nrows();
                let ub = u.block(i) - CMat::identity(k, k).scale(m);
                w.adjoint() * ub * w
            })
            .collect()
    }

    fn kernel(&self) -> Vec<DMatrix<f64>> {
        self.log_weights
            .iter()
            .map(|l| DMatrix::from_fn(l.len(), l.len(), |a, b| log_mean_of_logs(l[a], l[b])))
            .collect()
    }

    /// BKM Gram matrix of the given directions.
    pub fn bkm_gram(&self, dirs: &[HermElem]) -> DMatrix<f64> {
        let kern = self.kernel();
        let centered: Vec<Vec<CMat>> = dirs.iter().map(|u| self.centered(u)).collect();
        let k = dirs.len();
        let mut g = DMatrix::zeros(k, k);
        for i in 0..k {
            for j in i..k {
                let mut s = 0.0;
                for (b, l) in kern.iter().enumerate() {
                    let x = &centered[i][b];
                    let y = &centered[j][b];
                    for r in 0..l.nrows() {
                        for c in 0..l.ncols() {
                            s += l[(r, c)] * (x[(r, c)] * y[(r, c)].conj()).re;
                        }
                    }
                }
                g[(i, j)] = s;
                g[(j, i)] = s;
            }
        }
        g
    }
}

/// Logarithmic mean `L(x,y) = (x−y)/(log x − log y)`, `L(x,x) = x`.
pub fn log_mean(x: f64, y: f64) -> f64 {
    if x <= 0.0 || y <= 0.0 {
        return 0.0;
    }
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    let t = lo / hi;
    let d = t - 1.0;
    if d.abs() < 1e-4 {
        // (t−1)/ln t = 1 + d/2 − d²/12 + d³/24 − …
        hi * (1.0 + d / 2.0 - d * d / 12.0 + d * d * d / 24.0)
    } else {
        hi * d / t.ln()
    }
}

/// `L(eᵃ, eᵇ)` from the logarithms, accurate when one exponential underflows.
fn log_mean_of_logs(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    let d = lo - hi;
    if d > -1e-4 {
        // (e^d − 1)/d = 1 + d/2 + d²/6 + d³/24 + …
        hi.exp() * (1.0 + d / 2.0 + d * d / 6.0 + d * d * d / 24.0)
    } else {
        hi.exp() * d.exp_m1() / d
    }
}

/// `R(θ) = exp(θ)/tr exp(θ)`, computed after shifting by the top eigenvalue.
pub fn gibbs_state(theta: &HermElem) -> State {
    State::from_elem_unchecked(GibbsEval::new(theta).state)
}

/// `F(θ) = log tr exp(θ)`.
pub fn free_energy(theta: &HermElem) -> f64 {
    let eig = eigh(theta);
    let top = eig.max();
    let z: f64 = eig.values_desc().iter().map(|x| (x - top).exp()).sum();
    top + z.ln()
}

/// Directional derivative `∂_u F(θ) = ⟨u, R(θ)⟩`.
pub fn d_free_energy(theta: &HermElem, u: &HermElem) -> Result<f64> {
    theta.spec().check_same(u.spec())?;
    Ok(GibbsEval::new(theta).mean(u))
}

/// The BKM inner product `⟨⟨u,v⟩⟩_θ = ∂²F/∂s∂t (θ + su + tv)`, evaluated in
/// closed form with the logarithmic-mean kernel of the eigenvalues of `R(θ)`.
pub fn bkm(theta: &HermElem, u: &HermElem, v: &HermElem) -> Result<f64> {
    theta.spec().check_same(u.spec())?;
    theta.spec().check_same(v.spec())?;
    let g = GibbsEval::new(theta).bkm_gram(&[u.clone(), v.clone()]);
    Ok(g[(0, 1)])
}

/// BKM Gram matrix `(⟨⟨u_i,u_j⟩⟩_θ)`.
pub fn bkm_gram(theta: &HermElem, dirs: &[HermElem]) -> Result<DMatrix<f64>> {
    for u in dirs {
        theta.spec().check_same(u.spec())?;
    }
    Ok(GibbsEval::new(theta).bkm_gram(dirs))
}

/// Limit of the e-geodesic `t ↦ R(θ + tu)` as `t → ∞`: the Gibbs state of
/// `c^p(θ)` in `p𝒜p` with `p = p⁺(u)`, lifted to the ambient algebra.
pub fn e_geodesic_limit(theta: &HermElem, u: &HermElem) -> Result<(State, Compression)> {
    theta.spec().check_same(u.spec())?;
    let (_, p) = max_projection(u);
    let c = Compression::new(&p)?;
    let inner = gibbs_state(&c.apply(theta)?);
    Ok((c.lift_state(&inner)?, c))
}

/// `F_{p𝒜p}(c^p(θ))`, the limit of `F(θ+tu) − tλ⁺(u)`.
pub fn free_energy_asymptote(theta: &HermElem, u: &HermElem) -> Result<f64> {
    let (_, c) = e_geodesic_limit(theta, u)?;
    Ok(free_energy(&c.apply(theta)?))
}

/// Limit of `exp(θ + tu)` for `spec(u) ⊂ (−∞, 0]`: `k·exp^{[k]}(kθk)` with `k = k(u)`.
pub fn exp_limit_nonpositive(theta: &HermElem, u: &HermElem) -> Result<HermElem> {
    theta.spec().check_same(u.spec())?;
    let top = eigh(u).max();
    if top > zero_tol(u) {
        return Err(Error::Precondition(format!("largest eigenvalue {top:e} of u is positive; exp(θ+tu) diverges")));
    }
    let k = kernel_projection(u);
    if k.is_zero() {
        return Ok(HermElem::zeros(theta.spec()));
    }
    let c = Compression::new(&k)?;
    let inner = eigh(&c.apply(theta)?).map(f64::exp);
    c.lift(&inner)
}

/// A parameter `t` large enough for `R(θ+tu)` to agree with its limit to about
/// `1e−8` in trace norm.
///
/// The correction to the limit decays only like `‖θ‖/(t·gap)` when `θ` and `u`
/// do not commute, so `t·gap` is chosen of order `1e8·(1+‖θ‖)²` rather than
/// from the exponential tail alone.
pub fn limit_parameter(theta: &HermElem, u: &HermElem) -> f64 {
    let gap = top_gap(u).unwrap_or(1.0);
    let th = theta.norm(crate::algebra::NormKind::Spectral);
    (40.0f64).max(1e8 * (1.0 + th).powi(2)) / gap
}

/// `S(ρ, R(θ + t u))` along the grid; strictly decreasing when `s(ρ) ⪯ p⁺(u)`.
pub fn monotone_geodesic_divergence(rho: &State, theta: &HermElem, u: &HermElem, t_grid: &[f64]) -> Result<Vec<f64>> {
    rho.spec().check_same(theta.spec())?;
    rho.spec().check_same(u.spec())?;
    if top_gap(u).is_none() {
        return Err(Error::Precondition("u is a multiple of the identity".into()));
    }
    let (_, p) = max_projection(u);
    if !proj_leq(&support_projection(rho.elem()), &p) {
        return Err(Error::Precondition("support of ρ is not below the maximal projection of u".into()));
    }
    t_grid
        .iter()
        .map(|&t| {
            let sigma = gibbs_state(&theta.add_scaled(t, u));
            relative_entropy(rho, &sigma).map(|d| d.value())
        })
        .collect()
}

/// `⟨u, v⟩` re-exported for convenience in family code.
pub fn inner(u: &HermElem, v: &HermElem) -> Result<f64> {
    hs_inner(u, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::pauli::*;
    use crate::algebra::{random_hermitian, NormKind};
    use crate::families;
    use approx::assert_relative_eq;

    fn c2() -> AlgebraSpec {
        AlgebraSpec::commutative(2).unwrap()
    }

    #[test]
    fn gibbs_examples() {
        let a = AlgebraSpec::new(vec![2, 1]).unwrap();
        assert!(gibbs_state(&HermElem::zeros(&a)).elem().approx_eq(State::maximally_mixed(&a).elem(), 1e-15));
        let r = gibbs_state(&HermElem::diagonal(&c2(), &[1.0, 0.0]).unwrap());
        let e = 1f64.exp();
        assert_relative_eq!(r.elem().diag()[0], e / (e + 1.0), epsilon = 1e-15);
        let th = random_hermitian(&a, 3, 1.0);
        let shifted = th.add_scaled(2.5, &HermElem::identity(&a));
        assert!(gibbs_state(&th).elem().approx_eq(gibbs_state(&shifted).elem(), 1e-14));
        let huge = th.scale(800.0);
        assert!(gibbs_state(&huge).elem().trace().is_finite());
    }

    #[test]
    fn free_energy_examples() {
        let a = AlgebraSpec::new(vec![2, 1]).unwrap();
        assert_relative_eq!(free_energy(&HermElem::zeros(&a)), 3f64.ln(), epsilon = 1e-15);
        assert_relative_eq!(free_energy(&HermElem::diagonal(&c2(), &[1.0, 0.0]).unwrap()), (1f64.exp() + 1.0).ln(), epsilon = 1e-15);
        let th = random_hermitian(&a, 5, 1.0);
        let shifted = th.add_scaled(-1.5, &HermElem::identity(&a));
        assert_relative_eq!(free_energy(&shifted), free_energy(&th) - 1.5, epsilon = 1e-13);
    }

    #[test]
    fn derivative_examples() {
        let a = AlgebraSpec::new(vec![2, 1]).unwrap();
        let u = random_hermitian(&a, 1, 1.0);
        assert_relative_eq!(d_free_energy(&HermElem::zeros(&a), &u).unwrap(), u.trace() / 3.0, epsilon = 1e-14);
        let th = random_hermitian(&a, 2, 1.0);
        assert_relative_eq!(d_free_energy(&th, &HermElem::identity(&a)).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn bkm_examples() {
        let a = AlgebraSpec::new(vec![2, 1]).unwrap();
        let th = random_hermitian(&a, 8, 1.0);
        let v = random_hermitian(&a, 9, 1.0);
        assert!(bkm(&th, &HermElem::identity(&a), &v).unwrap().abs() < 1e-14);
        let u = HermElem::diagonal(&c2(), &[1.0, -1.0]).unwrap();
        assert_relative_eq!(bkm(&HermElem::zeros(&c2()), &u, &u).unwrap(), 1.0, epsilon = 1e-15);
        let w = random_hermitian(&a, 10, 1.0);
        assert_relative_eq!(bkm(&th, &v, &w).unwrap(), bkm(&th, &w, &v).unwrap(), epsilon = 1e-12);
    }

    #[test]
    fn log_mean_limits() {
        assert_relative_eq!(log_mean(0.3, 0.3), 0.3);
        assert_relative_eq!(log_mean(0.3, 0.3 * (1.0 + 1e-9)), 0.3 * (1.0 + 0.5e-9), epsilon = 1e-16);
        assert_relative_eq!(log_mean(1.0, std::f64::consts::E), std::f64::consts::E - 1.0, epsilon = 1e-15);
        assert_eq!(log_mean(0.0, 0.5), 0.0);
    }

    #[test]
    fn family_validation() {
        let a = AlgebraSpec::new(vec![2, 1]).unwrap();
        let u = random_hermitian(&a, 1, 1.0);
        assert!(matches!(
            ExpFamilySpec::linear(vec![u.clone(), u.scale(2.0)]),
            Err(Error::DependentDirections { .. })
        ));
        let fam = families::staffelberg();
        assert_eq!(fam.dim(), 2);
        let with_one = ExpFamilySpec::linear(vec![HermElem::identity(&a), u]).unwrap();
        assert_eq!(with_one.dim(), 1);
    }

    #[test]
    fn mean_values() {
        let fam = families::staffelberg();
        let a = fam.algebra().clone();
        let mixed = State::maximally_mixed(&a);
        let m = mean_value(&mixed, &fam).unwrap();
        assert_relative_eq!(m.0[0], 0.0);
        assert_relative_eq!(m.0[1], 1.0 / 3.0, epsilon = 1e-15);
        let rho = State::new(HermElem::new(a.clone(), vec![identity().scale(0.5), scalar(0.0)]).unwrap()).unwrap();
        let m = mean_value(&rho, &fam).unwrap();
        assert!(m.0.iter().all(|x| x.abs() < 1e-15));
        let x = m.intrinsic(&fam).unwrap();
        assert!(x.max_abs() < 1e-15);
    }

    #[test]
    fn geodesic_limits() {
        let a = AlgebraSpec::new(vec![2, 1]).unwrap();
        let th = random_hermitian(&a, 4, 1.0);
        let (lim, c) = e_geodesic_limit(&th, &HermElem::zeros(&a)).unwrap();
        assert!(lim.elem().approx_eq(gibbs_state(&th).elem(), 1e-13));
        assert_eq!(c.target(), &a);

        let u = HermElem::new(a.clone(), vec![sigma2(), scalar(1.0)]).unwrap();
        let (lim, c) = e_geodesic_limit(&HermElem::zeros(&a), &u).unwrap();
        let want = HermElem::new(a.clone(), vec![(identity() + sigma2()).scale(0.25), scalar(0.5)]).unwrap();
        assert!(lim.elem().approx_eq(&want, 1e-14));
        assert_eq!(c.rank_profile(), vec![1, 1]);
    }

    #[test]
    fn nonpositive_exponential_limit() {
        let th = random_hermitian(&c2(), 3, 1.0);
        assert!(exp_limit_nonpositive(&th, &HermElem::zeros(&c2())).unwrap().approx_eq(&eigh(&th).map(f64::exp), 1e-13));
        let u = HermElem::diagonal(&c2(), &[0.0, -1.0]).unwrap();
        let lim = exp_limit_nonpositive(&HermElem::zeros(&c2()), &u).unwrap();
        assert!(lim.approx_eq(&HermElem::diagonal(&c2(), &[1.0, 0.0]).unwrap(), 1e-15));
        assert!(exp_limit_nonpositive(&th, &HermElem::diagonal(&c2(), &[0.5, -1.0]).unwrap()).is_err());
    }

    #[test]
    fn monotone_divergence_along_staffelberg_geodesic() {
        let a = AlgebraSpec::new(vec![2, 1]).unwrap();
        let u = HermElem::new(a.clone(), vec![sigma2(), scalar(1.0)]).unwrap();
        let rho = State::new(HermElem::new(a.clone(), vec![(identity() + sigma2()).scale(0.25), scalar(0.5)]).unwrap()).unwrap();
        let grid: Vec<f64> = (0..20).map(|i| i as f64 * 0.5).collect();
        let vals = monotone_geodesic_divergence(&rho, &HermElem::zeros(&a), &u, &grid).unwrap();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
        let bad = State::maximally_mixed(&a);
        assert!(monotone_geodesic_divergence(&bad, &HermElem::zeros(&a), &u, &grid).is_err());
        assert!(monotone_geodesic_divergence(&rho, &HermElem::zeros(&a), &HermElem::identity(&a), &grid).is_err());
    }

    #[test]
    fn limit_parameter_reaches_limit() {
        let a = AlgebraSpec::new(vec![2, 1]).unwrap();
        let th = random_hermitian(&a, 21, 1.0);
        let u = HermElem::new(a.clone(), vec![sigma2(), scalar(1.0)]).unwrap();
        let t = limit_parameter(&th, &u);
        let (lim, _) = e_geodesic_limit(&th, &u).unwrap();
        let direct = gibbs_state(&th.add_scaled(t, &u));
        assert!((lim.elem() - direct.elem()).norm(NormKind::Trace) < 1e-6);
    }
}
