//! Spectral forms, functional calculus, special projections and compressed
//! algebras `p𝒜p`.
//!
//! Eigenvalues within [`cluster_tol`] of each other are merged into one
//! spectral value (the cluster mean), and eigenvalues within [`zero_tol`] of
//! zero count as zero for supports and kernels.

mod compression;
pub mod jacobi;

use crate::algebra::{AlgebraSpec, CMat, HermElem, NormKind, C64};
use crate::error::{Error, Result};

pub use compression::Compression;

/// Relative clustering tolerance for spectral values.
pub const CLUSTER_REL_TOL: f64 = 1e-8;
/// Relative zero threshold for supports and kernels.
pub const ZERO_REL_TOL: f64 = 1e-10;
/// Tolerance for `p² = p = p*`.
pub const PROJECTION_TOL: f64 = 1e-9;
/// Tolerance on `‖p(𝟙−q)‖₂` when deciding `p ⪯ q`.
pub const PROJ_ORDER_TOL: f64 = 1e-7;
/// Slack on the smallest eigenvalue of `b − a` in [`ordered_leq`].
pub const ORDER_TOL: f64 = 1e-9;

/// Per-block eigen-decomposition of a self-adjoint element.
#[derive(Clone, Debug)]
pub struct BlockEigen {
    spec: AlgebraSpec,
    parts: Vec<(Vec<f64>, CMat)>,
}

impl BlockEigen {
    pub fn spec(&self) -> &AlgebraSpec {
        &self.spec
    }

    /// Eigenvalues (ascending) and eigenvectors of block `i`.
    pub fn block(&self, i: usize) -> (&[f64], &CMat) {
        let (v, m) = &self.parts[i];
        (v, m)
    }

    pub fn max(&self) -> f64 {
        self.parts
            .iter()
            .filter_map(|(v, _)| v.last().copied())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.parts
            .iter()
            .filter_map(|(v, _)| v.first().copied())
            .fold(f64::INFINITY, f64::min)
    }

    /// All eigenvalues with multiplicity, descending.
    pub fn values_desc(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self.parts.iter().flat_map(|(v, _)| v.iter().copied()).collect();
        all.sort_by(|a, b| b.total_cmp(a));
        all
    }

    /// `Σ f(λ)·vv*` over all eigenpairs, without clustering.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> HermElem {
        let blocks = self
            .parts
            .iter()
            .map(|(vals, vecs)| {
                let k = vals.len();
                let d = CMat::from_fn(k, k, |r, c| if r == c { C64::new(f(vals[r]), 0.0) } else { C64::new(0.0, 0.0) });
                vecs * d * vecs.adjoint()
            })
            .collect();
        HermElem::from_blocks(self.spec.clone(), blocks)
    }

    /// Projection onto the eigenvectors selected by `keep`.
    pub fn projection_where(&self, keep: impl Fn(f64) -> bool) -> Projection {
        let blocks = self
            .parts
            .iter()
            .map(|(vals, vecs)| {
                let k = vals.len();
                let mut p = CMat::zeros(k, k);
                for (j, &lam) in vals.iter().enumerate() {
                    if keep(lam) {
                        let col = vecs.column(j);
                        p += col * col.adjoint();
                    }
                }
                p
            })
            .collect();
        Projection::from_elem_unchecked(HermElem::from_blocks(self.spec.clone(), blocks))
    }
}

pub fn eigh(a: &HermElem) -> BlockEigen {
    let parts = a.blocks().iter().map(jacobi::eigh).collect();
    BlockEigen { spec: a.spec().clone(), parts }
}

/// All eigenvalues of `a` with multiplicity, in descending order.
pub fn eigenvalues(a: &HermElem) -> Vec<f64> {
    eigh(a).values_desc()
}

fn spectral_scale(values: &[f64]) -> f64 {
    values.iter().map(|x| x.abs()).fold(1.0, f64::max)
}

/// Clustering tolerance `1e−8·max(1, ‖a‖)`.
pub fn cluster_tol(a: &HermElem) -> f64 {
    CLUSTER_REL_TOL * spectral_scale(&eigenvalues(a))
}

/// Zero threshold `1e−10·max(1, ‖a‖)`.
pub fn zero_tol(a: &HermElem) -> f64 {
    ZERO_REL_TOL * spectral_scale(&eigenvalues(a))
}

/// An orthogonal projection `p = p² = p*` of a block algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    elem: HermElem,
    rank: usize,
}

impl Projection {
    pub fn new(elem: HermElem) -> Result<Self> {
        let sq: Vec<CMat> = elem.product(&elem);
        let dev: f64 = sq
            .iter()
            .zip(elem.blocks())
            .map(|(s, p)| (s - p).norm_squared())
            .sum::<f64>()
            .sqrt();
        if dev > PROJECTION_TOL * elem.norm(NormKind::Two).max(1.0) {
            return Err(Error::Precondition(format!("not a projection: ‖p²−p‖ = {dev:e}")));
        }
        Ok(Self::from_elem_unchecked(elem))
    }

    pub(crate) fn from_elem_unchecked(elem: HermElem) -> Self {
        let rank = elem.trace().round().max(0.0) as usize;
        Self { elem, rank }
    }

    pub fn identity(spec: &AlgebraSpec) -> Self {
        Self { elem: HermElem::identity(spec), rank: spec.dim() }
    }

    pub fn zero(spec: &AlgebraSpec) -> Self {
        Self { elem: HermElem::zeros(spec), rank: 0 }
    }

    pub fn elem(&self) -> &HermElem {
        &self.elem
    }

    pub fn spec(&self) -> &AlgebraSpec {
        self.elem.spec()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Rank of the projection in each block.
    pub fn rank_profile(&self) -> Vec<usize> {
        self.elem
            .blocks()
            .iter()
            .map(|b| b.trace().re.round().max(0.0) as usize)
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.rank == 0
    }

    pub fn is_identity(&self) -> bool {
        self.rank == self.spec().dim()
    }

    /// `𝟙 − p`.
    pub fn complement(&self) -> Projection {
        let spec = self.spec();
        Self::from_elem_unchecked(&HermElem::identity(spec) - &self.elem)
    }

    /// `p ⪯ q`, i.e. `pq = p`.
    pub fn leq(&self, other: &Projection) -> bool {
        proj_leq(self, other)
    }

    /// Trace-norm distance to another projection.
    pub fn distance(&self, other: &Projection) -> f64 {
        (&self.elem - &other.elem).norm(NormKind::Trace)
    }

    /// Normalized projection `p / tr p`; panics on the zero projection.
    pub fn tracial_state(&self) -> crate::algebra::State {
        assert!(self.rank > 0, "zero projection has no tracial state");
        crate::algebra::State::from_elem_unchecked(self.elem.scale(1.0 / self.rank as f64))
    }
}

/// Distinct spectral values (ascending) with their spectral projections.
#[derive(Clone, Debug)]
pub struct SpectralForm {
    pub values: Vec<f64>,
    pub projections: Vec<Projection>,
}

impl SpectralForm {
    /// `Σ f(λ_i) p_i`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> Result<HermElem> {
        let spec = self.projections[0].spec();
        let mut out = HermElem::zeros(spec);
        for (lam, p) in self.values.iter().zip(&self.projections) {
            let fv = f(*lam);
            if !fv.is_finite() {
                return Err(Error::Undefined { value: *lam });
            }
            out = out.add_scaled(fv, p.elem());
        }
        Ok(out)
    }

    pub fn reconstruct(&self) -> HermElem {
        self.apply(|x| x).expect("identity is finite")
    }
}

fn cluster_values(values: &[f64], tol: f64) -> Vec<(f64, f64, f64)> {
    // (lower, upper, mean) for chain-linked clusters of the sorted values.
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let mut clusters: Vec<(f64, f64, f64)> = Vec::new();
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || sorted[i] - sorted[i - 1] > tol {
            let chunk = &sorted[start..i];
            let mean = chunk.iter().sum::<f64>() / chunk.len() as f64;
            clusters.push((chunk[0], chunk[chunk.len() - 1], mean));
            start = i;
        }
    }
    clusters
}

fn spectral_form_with_tol(a: &HermElem, tol: f64) -> SpectralForm {
    let e = eigh(a);
    let all = e.values_desc();
    let clusters = cluster_values(&all, tol);
    let mut values = Vec::with_capacity(clusters.len());
    let mut projections = Vec::with_capacity(clusters.len());
    for (lo, hi, mean) in clusters {
        values.push(mean);
        projections.push(e.projection_where(|x| x >= lo && x <= hi));
    }
    SpectralForm { values, projections }
}

/// Spectral form with eigenvalues clustered at [`cluster_tol`].
pub fn eig(a: &HermElem) -> SpectralForm {
    let tol = cluster_tol(a);
    spectral_form_with_tol(a, tol)
}

/// `f(a)` by functional calculus; with `domain = Some(p)` the calculus runs in
/// `p𝒜p`, so the kernel of `p` contributes no spectral values.
pub fn func_calc(f: impl Fn(f64) -> f64, a: &HermElem, domain: Option<&Projection>) -> Result<HermElem> {
    match domain {
        None => eig(a).apply(f),
        Some(p) => {
            a.spec().check_same(p.spec())?;
            if p.is_zero() {
                return Ok(HermElem::zeros(a.spec()));
            }
            let pap = a.sandwich(p.elem());
            let dev = (a - &pap).norm(NormKind::Two);
            if dev > 1e-9 * a.norm(NormKind::Two).max(1.0) {
                return Err(Error::Precondition(format!(
                    "element is not supported on the domain projection (‖a − pap‖ = {dev:e})"
                )));
            }
            let c = Compression::new(p)?;
            let inner = eig(&c.apply(a)?).apply(f)?;
            c.lift(&inner)
        }
    }
}

/// Support projection: the spectral projection of all nonzero spectral values.
pub fn support_projection(a: &HermElem) -> Projection {
    let tol = zero_tol(a);
    eigh(a).projection_where(|x| x.abs() > tol)
}

/// Kernel projection `𝟙 − s(a)`.
pub fn kernel_projection(a: &HermElem) -> Projection {
    let tol = zero_tol(a);
    eigh(a).projection_where(|x| x.abs() <= tol)
}

/// Largest spectral value and its spectral projection.
pub fn max_projection(u: &HermElem) -> (f64, Projection) {
    let tol = cluster_tol(u);
    max_projection_with_tol(u, tol)
}

/// [`max_projection`] with every eigenvalue within `tol` of the top cluster included.
pub fn max_projection_with_tol(u: &HermElem, tol: f64) -> (f64, Projection) {
    let e = eigh(u);
    let all = e.values_desc();
    let clusters = cluster_values(&all, tol);
    let &(lo, _, mean) = clusters.last().expect("nonempty spectrum");
    (mean, e.projection_where(|x| x >= lo))
}

/// Gap between the largest spectral value and the next one, `None` if `u ∝ 𝟙`.
pub fn top_gap(u: &HermElem) -> Option<f64> {
    let sf = eig(u);
    let n = sf.values.len();
    (n >= 2).then(|| sf.values[n - 1] - sf.values[n - 2])
}

/// `a ⪯ b`: `b − a` is positive semi-definite up to [`ORDER_TOL`].
pub fn ordered_leq(a: &HermElem, b: &HermElem) -> Result<bool> {
    a.spec().check_same(b.spec())?;
    let min = eigh(&(b - a)).min();
    Ok(min >= -ORDER_TOL)
}

/// `p ⪯ q` for projections: `‖p(𝟙−q)‖₂ ≤` [`PROJ_ORDER_TOL`].
pub fn proj_leq(p: &Projection, q: &Projection) -> bool {
    if p.spec() != q.spec() {
        return false;
    }
    let dev: f64 = p
        .elem()
        .blocks()
        .iter()
        .zip(q.elem().blocks())
        .map(|(pb, qb)| {
            let k = pb.nrows();
            (pb * (CMat::identity(k, k) - qb)).norm_squared()
        })
        .sum::<f64>()
        .sqrt();
    dev <= PROJ_ORDER_TOL
}

/// `max_k |λ↓_k(a) − λ↓_k(b)|`, bounded by `‖a − b‖` (Weyl).
pub fn weyl_gap(a: &HermElem, b: &HermElem) -> Result<f64> {
    a.spec().check_same(b.spec())?;
    let ea = eigenvalues(a);
    let eb = eigenvalues(b);
    Ok(ea.iter().zip(&eb).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::pauli::*;
    use crate::algebra::random_hermitian;
    use approx::assert_relative_eq;

    fn mat2() -> AlgebraSpec {
        AlgebraSpec::full(2).unwrap()
    }
    fn m2c() -> AlgebraSpec {
        AlgebraSpec::new(vec![2, 1]).unwrap()
    }
    fn h(spec: AlgebraSpec, blocks: Vec<CMat>) -> HermElem {
        HermElem::new(spec, blocks).unwrap()
    }

    #[test]
    fn spectral_form_of_sigma3() {
        let sf = eig(&h(mat2(), vec![sigma3()]));
        assert_eq!(sf.values.len(), 2);
        assert_relative_eq!(sf.values[0], -1.0, epsilon = 1e-15);
        assert_relative_eq!(sf.values[1], 1.0, epsilon = 1e-15);
        assert!(sf.projections[1].elem().approx_eq(&HermElem::diagonal(&mat2(), &[1.0, 0.0]).unwrap(), 1e-14));
        assert!(sf.projections[0].elem().approx_eq(&HermElem::diagonal(&mat2(), &[0.0, 1.0]).unwrap(), 1e-14));
    }

    #[test]
    fn spectral_form_of_identity() {
        let sf = eig(&HermElem::identity(&m2c()));
        assert_eq!(sf.values, vec![1.0]);
        assert!(sf.projections[0].is_identity());
    }

    #[test]
    fn spectral_form_of_sigma2_plus_one() {
        let a = h(m2c(), vec![sigma2(), scalar(1.0)]);
        let sf = eig(&a);
        assert_eq!(sf.values.len(), 2);
        let plus = h(m2c(), vec![(identity() + sigma2()).scale(0.5), scalar(1.0)]);
        let minus = h(m2c(), vec![(identity() - sigma2()).scale(0.5), scalar(0.0)]);
        assert!(sf.projections[1].elem().approx_eq(&plus, 1e-14));
        assert!(sf.projections[0].elem().approx_eq(&minus, 1e-14));
        assert!(sf.reconstruct().approx_eq(&a, 1e-13));
    }

    #[test]
    fn functional_calculus() {
        let c2 = AlgebraSpec::commutative(2).unwrap();
        let p = Projection::new(HermElem::diagonal(&c2, &[1.0, 0.0]).unwrap()).unwrap();
        let log = func_calc(f64::ln, p.elem(), Some(&p)).unwrap();
        assert!(log.max_abs() < 1e-15);
        assert!(matches!(func_calc(f64::ln, p.elem(), None), Err(Error::Undefined { .. })));

        let e0 = func_calc(f64::exp, &HermElem::zeros(&mat2()), None).unwrap();
        assert!(e0.approx_eq(&HermElem::identity(&mat2()), 1e-15));
        let e = func_calc(f64::exp, &h(mat2(), vec![sigma3()]), None).unwrap();
        let want = HermElem::diagonal(&mat2(), &[1f64.exp(), (-1f64).exp()]).unwrap();
        assert!(e.approx_eq(&want, 1e-14));

        let a = random_hermitian(&m2c(), 4, 1.0);
        assert!(func_calc(|x| x, &a, None).unwrap().approx_eq(&a, 1e-13));
    }

    #[test]
    fn compressed_calculus_stays_in_corner() {
        let a = random_hermitian(&m2c(), 11, 1.0);
        let (_, p) = max_projection(&h(m2c(), vec![sigma1(), scalar(1.0)]));
        let pap = a.sandwich(p.elem());
        let r = func_calc(f64::exp, &pap, Some(&p)).unwrap();
        assert!(r.sandwich(p.elem()).approx_eq(&r, 1e-13));
        assert!(func_calc(f64::exp, &a, Some(&p)).is_err());
    }

    #[test]
    fn supports_and_kernels() {
        let c2 = AlgebraSpec::commutative(2).unwrap();
        let d = HermElem::diagonal(&c2, &[1.0, 0.0]).unwrap();
        assert!(support_projection(&d).elem().approx_eq(&d, 1e-15));
        assert!(kernel_projection(&d).elem().approx_eq(&HermElem::diagonal(&c2, &[0.0, 1.0]).unwrap(), 1e-15));
        assert!(support_projection(&HermElem::identity(&m2c())).is_identity());
        assert!(kernel_projection(&HermElem::identity(&m2c())).is_zero());
        assert!(kernel_projection(&h(mat2(), vec![sigma3()])).is_zero());
        let pure = h(mat2(), vec![(identity() + sigma1()).scale(0.5)]);
        let s = support_projection(&pure);
        assert_eq!(s.rank(), 1);
        assert!(s.elem().approx_eq(&pure, 1e-14));
    }

    #[test]
    fn maximal_projections() {
        let (l, p) = max_projection(&h(mat2(), vec![sigma3()]));
        assert_relative_eq!(l, 1.0, epsilon = 1e-15);
        assert!(p.elem().approx_eq(&HermElem::diagonal(&mat2(), &[1.0, 0.0]).unwrap(), 1e-14));
        let (l, p) = max_projection(&HermElem::zeros(&m2c()));
        assert_eq!(l, 0.0);
        assert!(p.is_identity());
        let (l, p) = max_projection(&h(m2c(), vec![sigma2(), scalar(1.0)]));
        assert_relative_eq!(l, 1.0, epsilon = 1e-14);
        assert_eq!(p.rank_profile(), vec![1, 1]);
        let want = h(m2c(), vec![(identity() + sigma2()).scale(0.5), scalar(1.0)]);
        assert!(p.elem().approx_eq(&want, 1e-14));
    }

    #[test]
    fn order_relations() {
        let c2 = AlgebraSpec::commutative(2).unwrap();
        let p = HermElem::diagonal(&c2, &[1.0, 0.0]).unwrap();
        assert!(ordered_leq(&p, &HermElem::identity(&c2)).unwrap());
        assert!(!ordered_leq(&HermElem::identity(&c2), &p).unwrap());
        assert!(ordered_leq(&HermElem::zeros(&c2), &p).unwrap());
        let pp = Projection::new(p).unwrap();
        assert!(pp.leq(&Projection::identity(&c2)));
        assert!(!Projection::identity(&c2).leq(&pp));
        assert!(pp.complement().leq(&pp.complement()));
    }

    #[test]
    fn weyl() {
        let a = random_hermitian(&m2c(), 5, 1.0);
        assert_eq!(weyl_gap(&a, &a).unwrap(), 0.0);
        let shifted = a.add_scaled(0.25, &HermElem::identity(&m2c()));
        assert_relative_eq!(weyl_gap(&a, &shifted).unwrap(), 0.25, epsilon = 1e-13);
        for seed in 0..20 {
            let b = random_hermitian(&m2c(), 100 + seed, 1.0);
            assert!(weyl_gap(&a, &b).unwrap() <= (&a - &b).norm(NormKind::Spectral) + 1e-12);
        }
    }

    #[test]
    fn projection_validation() {
        assert!(Projection::new(HermElem::diagonal(&AlgebraSpec::commutative(2).unwrap(), &[0.5, 1.0]).unwrap()).is_err());
    }
}
