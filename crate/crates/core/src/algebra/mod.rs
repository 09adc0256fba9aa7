//! Block-diagonal C*-algebras `Mat(k_1) ⊕ … ⊕ Mat(k_N)` and their self-adjoint
//! elements.
//!
//! Every algebra is stored in canonical form: the algebra identity is the full
//! `n × n` identity with `n = Σ k_i`. Representations with multiplicities or
//! zero padding are handled by the explicit maps in [`embedding`].

pub mod embedding;
pub mod random;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral;

pub use embedding::{embed, embed_adjoint, shift_family, EmbeddingSpec};
pub use random::{random_hermitian, random_state};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;

/// Asymmetry above which construction logs a warning before symmetrizing.
const ASYMMETRY_WARN: f64 = 1e-9;

/// Block sizes of a direct sum of full complex matrix algebras.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AlgebraSpec {
    blocks: Vec<usize>,
}

impl AlgebraSpec {
    pub fn new(blocks: Vec<usize>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidAlgebra("at least one block is required".into()));
        }
        if blocks.contains(&0) {
            return Err(Error::InvalidAlgebra("block sizes must be positive".into()));
        }
        Ok(Self { blocks })
    }

    /// The commutative algebra `ℂⁿ` of diagonal matrices.
    pub fn commutative(n: usize) -> Result<Self> {
        Self::new(vec![1; n])
    }

    /// The full matrix algebra `Mat(n, ℂ)`.
    pub fn full(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Total matrix size `n`, which is also the trace of the identity.
    pub fn dim(&self) -> usize {
        self.blocks.iter().sum()
    }

    /// Real dimension of the self-adjoint part, `Σ k_i²`.
    pub fn real_dim(&self) -> usize {
        self.blocks.iter().map(|k| k * k).sum()
    }

    pub fn is_commutative(&self) -> bool {
        self.blocks.iter().all(|&k| k == 1)
    }

    pub(crate) fn check_same(&self, other: &AlgebraSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch {
                left: self.blocks.clone(),
                right: other.blocks.clone(),
            })
        }
    }
}

impl fmt::Display for AlgebraSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|k| if *k == 1 { "ℂ".to_string() } else { format!("Mat({k})") })
            .collect();
        write!(f, "{}", parts.join("⊕"))
    }
}

/// Which matrix norm to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormKind {
    /// `tr|a|`
    Trace,
    /// Hilbert-Schmidt norm `sqrt(tr a²)`.
    Two,
    /// Operator norm, the largest absolute eigenvalue.
    Spectral,
}

/// A self-adjoint element of a block algebra, stored block by block.
#[derive(Clone, Debug, PartialEq)]
pub struct HermElem {
    spec: AlgebraSpec,
    blocks: Vec<CMat>,
}

impl HermElem {
    /// Builds an element from per-block matrices, symmetrizing each block as `(a + a*)/2`.
    pub fn new(spec: AlgebraSpec, blocks: Vec<CMat>) -> Result<Self> {
        if blocks.len() != spec.num_blocks() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} blocks, got {}",
                spec.num_blocks(),
                blocks.len()
            )));
        }
        for (i, (b, &k)) in blocks.iter().zip(spec.blocks()).enumerate() {
            if b.nrows() != k || b.ncols() != k {
                return Err(Error::DimensionMismatch(format!(
                    "block {i} should be {k}x{k}, got {}x{}",
                    b.nrows(),
                    b.ncols()
                )));
            }
            if b.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::DimensionMismatch(format!("block {i} has non-finite entries")));
            }
        }
        let blocks = blocks
            .into_iter()
            .enumerate()
            .map(|(i, b)| {
                let adj = b.adjoint();
                let asym = (&b - &adj).norm();
                let scale = b.norm().max(1.0);
                if asym > ASYMMETRY_WARN * scale {
                    log::warn!("block {i} deviates from self-adjointness by {asym:e}; symmetrizing");
                }
                (b + adj).scale(0.5)
            })
            .collect();
        Ok(Self { spec, blocks })
    }

    /// Wraps blocks that are self-adjoint by construction, only cleaning rounding asymmetry.
    pub(crate) fn from_blocks(spec: AlgebraSpec, blocks: Vec<CMat>) -> Self {
        debug_assert_eq!(blocks.len(), spec.num_blocks());
        let blocks = blocks.into_iter().map(|b| (&b + b.adjoint()).scale(0.5)).collect();
        Self { spec, blocks }
    }

    pub fn zeros(spec: &AlgebraSpec) -> Self {
        let blocks = spec.blocks().iter().map(|&k| CMat::zeros(k, k)).collect();
        Self { spec: spec.clone(), blocks }
    }

    pub fn identity(spec: &AlgebraSpec) -> Self {
        let blocks = spec.blocks().iter().map(|&k| CMat::identity(k, k)).collect();
        Self { spec: spec.clone(), blocks }
    }

    /// A diagonal element with the given `n` real diagonal entries, in block order.
    pub fn diagonal(spec: &AlgebraSpec, diag: &[f64]) -> Result<Self> {
        if diag.len() != spec.dim() {
            return Err(Error::DimensionMismatch(format!(
                "diagonal needs {} entries, got {}",
                spec.dim(),
                diag.len()
            )));
        }
        let mut offset = 0;
        let blocks = spec
            .blocks()
            .iter()
            .map(|&k| {
                let m = CMat::from_fn(k, k, |r, c| {
                    if r == c {
                        C64::new(diag[offset + r], 0.0)
                    } else {
                        C64::new(0.0, 0.0)
                    }
                });
                offset += k;
                m
            })
            .collect();
        Ok(Self { spec: spec.clone(), blocks })
    }

    pub fn spec(&self) -> &AlgebraSpec {
        &self.spec
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &CMat {
        &self.blocks[i]
    }

    pub fn into_blocks(self) -> Vec<CMat> {
        self.blocks
    }

    pub fn trace(&self) -> f64 {
        self.blocks.iter().map(|b| b.trace().re).sum()
    }

    /// Diagonal entries in block order.
    pub fn diag(&self) -> Vec<f64> {
        self.blocks
            .iter()
            .flat_map(|b| (0..b.nrows()).map(move |i| b[(i, i)].re))
            .collect()
    }

    /// The full `n × n` block-diagonal matrix.
    pub fn to_dense(&self) -> CMat {
        let n = self.spec.dim();
        let mut out = CMat::zeros(n, n);
        let mut off = 0;
        for b in &self.blocks {
            let k = b.nrows();
            out.view_mut((off, off), (k, k)).copy_from(b);
            off += k;
        }
        out
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            spec: self.spec.clone(),
            blocks: self.blocks.iter().map(|b| b.scale(c)).collect(),
        }
    }

    /// `self + c·other`; panics on algebra mismatch.
    pub fn add_scaled(&self, c: f64, other: &HermElem) -> Self {
        assert_eq!(self.spec, other.spec, "algebra mismatch in add_scaled");
        Self {
            spec: self.spec.clone(),
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a + b.scale(c))
                .collect(),
        }
    }

    /// Linear combination `Σ c_i e_i`; `elems` must be nonempty and share one algebra.
    pub fn combination(coeffs: &[f64], elems: &[HermElem]) -> Result<Self> {
        let first = elems.first().ok_or(Error::EmptySet)?;
        if coeffs.len() != elems.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for {} elements",
                coeffs.len(),
                elems.len()
            )));
        }
        let mut out = HermElem::zeros(first.spec());
        for (c, e) in coeffs.iter().zip(elems) {
            first.spec.check_same(e.spec())?;
            out = out.add_scaled(*c, e);
        }
        Ok(out)
    }

    /// Traceless part `a − (tr a / tr 𝟙)·𝟙`.
    pub fn traceless(&self) -> Self {
        let shift = self.trace() / self.spec.dim() as f64;
        self.add_scaled(-shift, &HermElem::identity(&self.spec))
    }

    /// `p·a·p`, self-adjoint whenever `p` is.
    pub fn sandwich(&self, p: &HermElem) -> Self {
        assert_eq!(self.spec, p.spec, "algebra mismatch in sandwich");
        let blocks = self
            .blocks
            .iter()
            .zip(&p.blocks)
            .map(|(a, p)| p * a * p)
            .collect();
        Self::from_blocks(self.spec.clone(), blocks)
    }

    /// Per-block matrix product (generally not self-adjoint).
    pub fn product(&self, other: &HermElem) -> Vec<CMat> {
        self.blocks.iter().zip(&other.blocks).map(|(a, b)| a * b).collect()
    }

    /// Largest absolute entry, used for cheap zero tests.
    pub fn max_abs(&self) -> f64 {
        self.blocks
            .iter()
            .flat_map(|b| b.iter().map(|z| z.norm()))
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &HermElem, tol: f64) -> bool {
        self.spec == other.spec && (self - other).norm(NormKind::Two) <= tol
    }

    pub fn norm(&self, kind: NormKind) -> f64 {
        match kind {
            NormKind::Two => self
                .blocks
                .iter()
                .map(|b| b.iter().map(|z| z.norm_sqr()).sum::<f64>())
                .sum::<f64>()
                .sqrt(),
            NormKind::Trace => spectral::eigenvalues(self).iter().map(|x| x.abs()).sum(),
            NormKind::Spectral => spectral::eigenvalues(self)
                .iter()
                .map(|x| x.abs())
                .fold(0.0, f64::max),
        }
    }
}

/// Hilbert-Schmidt inner product `tr(a b*)`, real for self-adjoint inputs.
pub fn hs_inner(a: &HermElem, b: &HermElem) -> Result<f64> {
    a.spec.check_same(&b.spec)?;
    Ok(hs_inner_unchecked(a, b))
}

pub(crate) fn hs_inner_unchecked(a: &HermElem, b: &HermElem) -> f64 {
    a.blocks
        .iter()
        .zip(&b.blocks)
        .map(|(x, y)| x.iter().zip(y.iter()).map(|(u, v)| (u * v.conj()).re).sum::<f64>())
        .sum()
}

pub fn norm(a: &HermElem, kind: NormKind) -> f64 {
    a.norm(kind)
}

impl Add for &HermElem {
    type Output = HermElem;
    fn add(self, rhs: &HermElem) -> HermElem {
        self.add_scaled(1.0, rhs)
    }
}

impl Sub for &HermElem {
    type Output = HermElem;
    fn sub(self, rhs: &HermElem) -> HermElem {
        self.add_scaled(-1.0, rhs)
    }
}

impl Mul<f64> for &HermElem {
    type Output = HermElem;
    fn mul(self, rhs: f64) -> HermElem {
        self.scale(rhs)
    }
}

impl Neg for &HermElem {
    type Output = HermElem;
    fn neg(self) -> HermElem {
        self.scale(-1.0)
    }
}

/// Trace tolerance accepted by [`State::new`].
pub const STATE_TRACE_TOL: f64 = 1e-10;
/// Smallest eigenvalue accepted by [`State::new`].
pub const STATE_EIG_TOL: f64 = -1e-10;

/// A density matrix: positive semi-definite with unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    elem: HermElem,
}

impl State {
    pub fn new(elem: HermElem) -> Result<Self> {
        let tr = elem.trace();
        if (tr - 1.0).abs() > STATE_TRACE_TOL {
            return Err(Error::NotAState(format!("trace {tr} differs from 1")));
        }
        let min = spectral::eigenvalues(&elem).into_iter().fold(f64::INFINITY, f64::min);
        if min < STATE_EIG_TOL {
            return Err(Error::NotAState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { elem })
    }

    /// Normalizes a positive semi-definite element to unit trace.
    pub fn from_positive(elem: HermElem) -> Result<Self> {
        let tr = elem.trace();
        if !(tr > 0.0) {
            return Err(Error::NotAState(format!("trace {tr} is not positive")));
        }
        Self::new(elem.scale(1.0 / tr))
    }

    /// Skips validation; for elements that are states by construction.
    pub(crate) fn from_elem_unchecked(elem: HermElem) -> Self {
        Self { elem }
    }

    /// The tracial state `𝟙/n`.
    pub fn maximally_mixed(spec: &AlgebraSpec) -> Self {
        Self { elem: HermElem::identity(spec).scale(1.0 / spec.dim() as f64) }
    }

    pub fn elem(&self) -> &HermElem {
        &self.elem
    }

    pub fn into_elem(self) -> HermElem {
        self.elem
    }

    pub fn spec(&self) -> &AlgebraSpec {
        self.elem.spec()
    }

    /// Convex combination `λ·self + (1−λ)·other`.
    pub fn mix(&self, lambda: f64, other: &State) -> Result<State> {
        self.spec().check_same(other.spec())?;
        Ok(Self {
            elem: self.elem.scale(lambda).add_scaled(1.0 - lambda, &other.elem),
        })
    }

    pub fn trace_distance(&self, other: &State) -> f64 {
        (&self.elem - &other.elem).norm(NormKind::Trace)
    }
}

/// Pauli matrices as 2×2 blocks.
pub mod pauli {
    use super::{CMat, C64};

    pub fn identity() -> CMat {
        CMat::identity(2, 2)
    }

    pub fn sigma1() -> CMat {
        let z = C64::new(0.0, 0.0);
        let o = C64::new(1.0, 0.0);
        CMat::from_row_slice(2, 2, &[z, o, o, z])
    }

    pub fn sigma2() -> CMat {
        let z = C64::new(0.0, 0.0);
        CMat::from_row_slice(2, 2, &[z, C64::new(0.0, -1.0), C64::new(0.0, 1.0), z])
    }

    pub fn sigma3() -> CMat {
        let z = C64::new(0.0, 0.0);
        CMat::from_row_slice(2, 2, &[C64::new(1.0, 0.0), z, z, C64::new(-1.0, 0.0)])
    }

    /// `b₁σ₁ + b₂σ₂ + b₃σ₃`.
    pub fn bloch(b: [f64; 3]) -> CMat {
        sigma1().scale(b[0]) + sigma2().scale(b[1]) + sigma3().scale(b[2])
    }

    /// A 1×1 block holding the real number `x`.
    pub fn scalar(x: f64) -> CMat {
        CMat::from_element(1, 1, C64::new(x, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::pauli::*;
    use super::*;
    use approx::assert_relative_eq;

    fn mat2() -> AlgebraSpec {
        AlgebraSpec::full(2).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(AlgebraSpec::new(vec![]).is_err());
        assert!(AlgebraSpec::new(vec![2, 0]).is_err());
        let a = AlgebraSpec::new(vec![2, 1]).unwrap();
        assert_eq!(a.dim(), 3);
        assert_eq!(a.real_dim(), 5);
        assert_eq!(a.to_string(), "Mat(2)⊕ℂ");
    }

    #[test]
    fn inner_products() {
        let one = HermElem::identity(&mat2());
        assert_relative_eq!(hs_inner(&one, &one).unwrap(), 2.0);
        let s1 = HermElem::new(mat2(), vec![sigma1()]).unwrap();
        let s2 = HermElem::new(mat2(), vec![sigma2()]).unwrap();
        assert_relative_eq!(hs_inner(&s1, &s2).unwrap(), 0.0);
        let a = AlgebraSpec::new(vec![2, 1]).unwrap();
        let x = HermElem::new(a, vec![sigma3(), scalar(1.0)]).unwrap();
        assert_relative_eq!(hs_inner(&x, &x).unwrap(), 3.0);
        assert!(hs_inner(&x, &one).is_err());
    }

    #[test]
    fn norms() {
        let s3 = HermElem::new(mat2(), vec![sigma3()]).unwrap();
        assert_relative_eq!(s3.norm(NormKind::Trace), 2.0, epsilon = 1e-14);
        assert_relative_eq!(s3.norm(NormKind::Spectral), 1.0, epsilon = 1e-14);
        let d = HermElem::diagonal(&AlgebraSpec::commutative(2).unwrap(), &[3.0, -4.0]).unwrap();
        assert_relative_eq!(d.norm(NormKind::Two), 5.0, epsilon = 1e-14);
        let z = HermElem::zeros(&mat2());
        assert_eq!(z.norm(NormKind::Trace), 0.0);
    }

    #[test]
    fn construction_symmetrizes() {
        let z = C64::new(0.0, 0.0);
        let m = CMat::from_row_slice(2, 2, &[z, C64::new(1.0, 0.0), C64::new(3.0, 0.0), z]);
        let h = HermElem::new(mat2(), vec![m]).unwrap();
        assert_relative_eq!(h.block(0)[(0, 1)].re, 2.0);
        assert!(HermElem::new(mat2(), vec![CMat::zeros(3, 3)]).is_err());
    }

    #[test]
    fn state_validation() {
        let a = AlgebraSpec::commutative(2).unwrap();
        assert!(State::new(HermElem::diagonal(&a, &[0.5, 0.5]).unwrap()).is_ok());
        assert!(State::new(HermElem::diagonal(&a, &[0.6, 0.5]).unwrap()).is_err());
        assert!(State::new(HermElem::diagonal(&a, &[1.5, -0.5]).unwrap()).is_err());
        let s = State::from_positive(HermElem::diagonal(&a, &[2.0, 2.0]).unwrap()).unwrap();
        assert_relative_eq!(s.elem().diag()[0], 0.5);
    }
}
