//! Representation change `Φ(⊕ b_i) = ⊕_i ⊕_{j≤m_i} b_i ⊕ 0_l` and its adjoint.
//!
//! The target of `Φ` is stored canonically as the block algebra with block `k_i`
//! repeated `m_i` times, followed by an `l × l` padding block when `l > 0`.
//! Exponential families never charge the padding summand, so [`shift_family`]
//! returns its family on the unpadded image algebra.

use crate::algebra::{AlgebraSpec, CMat, HermElem};
use crate::error::{Error, Result};
use crate::expfam::ExpFamilySpec;

/// Relative tolerance for the block-constancy check in [`embed_adjoint`].
const COPY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingSpec {
    multiplicities: Vec<usize>,
    padding: usize,
}

impl EmbeddingSpec {
    pub fn new(multiplicities: Vec<usize>, padding: usize) -> Result<Self> {
        if multiplicities.is_empty() || multiplicities.contains(&0) {
            return Err(Error::InvalidAlgebra("multiplicities must be positive".into()));
        }
        Ok(Self { multiplicities, padding })
    }

    /// The identity representation of `source`.
    pub fn identity(source: &AlgebraSpec) -> Self {
        Self { multiplicities: vec![1; source.num_blocks()], padding: 0 }
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    pub fn padding(&self) -> usize {
        self.padding
    }

    fn check_source(&self, source: &AlgebraSpec) -> Result<()> {
        if source.num_blocks() != self.multiplicities.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} multiplicities for {} blocks",
                self.multiplicities.len(),
                source.num_blocks()
            )));
        }
        Ok(())
    }

    /// Target algebra without the padding summand.
    pub fn image_algebra(&self, source: &AlgebraSpec) -> Result<AlgebraSpec> {
        self.check_source(source)?;
        let blocks = source
            .blocks()
            .iter()
            .zip(&self.multiplicities)
            .flat_map(|(&k, &m)| std::iter::repeat_n(k, m))
            .collect();
        AlgebraSpec::new(blocks)
    }

    /// Target algebra including the `l × l` padding block.
    pub fn target_algebra(&self, source: &AlgebraSpec) -> Result<AlgebraSpec> {
        let mut blocks = self.image_algebra(source)?.blocks().to_vec();
        if self.padding > 0 {
            blocks.push(self.padding);
        }
        AlgebraSpec::new(blocks)
    }

    /// Applies `Φ` to arbitrary (not necessarily self-adjoint) block matrices.
    pub fn embed_blocks(&self, blocks: &[CMat]) -> Result<Vec<CMat>> {
        if blocks.len() != self.multiplicities.len() {
            return Err(Error::DimensionMismatch("block count differs from multiplicities".into()));
        }
        let mut out: Vec<CMat> = blocks
            .iter()
            .zip(&self.multiplicities)
            .flat_map(|(b, &m)| std::iter::repeat_n(b.clone(), m))
            .collect();
        if self.padding > 0 {
            out.push(CMat::zeros(self.padding, self.padding));
        }
        Ok(out)
    }
}

/// `Φ(b)` in the padded target algebra.
pub fn embed(phi: &EmbeddingSpec, b: &HermElem) -> Result<HermElem> {
    let target = phi.target_algebra(b.spec())?;
    Ok(HermElem::from_blocks(target, phi.embed_blocks(b.blocks())?))
}

/// `Φ*(⊕⊕ F_i ⊕ 0_l) = ⊕ m_i F_i`.
///
/// `f` may live in the padded target or in the unpadded image algebra; the
/// padding block is ignored. Copies of each source block must agree.
pub fn embed_adjoint(phi: &EmbeddingSpec, source: &AlgebraSpec, f: &HermElem) -> Result<HermElem> {
    let image = phi.image_algebra(source)?;
    let padded = phi.target_algebra(source)?;
    if f.spec() != &image && f.spec() != &padded {
        return Err(Error::AlgebraMismatch {
            left: f.spec().blocks().to_vec(),
            right: padded.blocks().to_vec(),
        });
    }
    let mut idx = 0;
    let mut out = Vec::with_capacity(source.num_blocks());
    for &m in phi.multiplicities() {
        let first = f.block(idx);
        let scale = first.norm().max(1.0);
        for j in 1..m {
            let dev = (f.block(idx + j) - first).norm();
            if dev > COPY_TOL * scale {
                return Err(Error::Precondition(format!(
                    "copy {j} of source block differs by {dev:e}; element is not in the image of the embedding"
                )));
            }
        }
        let sum = (0..m).fold(CMat::zeros(first.nrows(), first.ncols()), |acc, j| acc + f.block(idx + j));
        out.push(sum);
        idx += m;
    }
    Ok(HermElem::from_blocks(source.clone(), out))
}

/// Transports the family `R(Θ)` to the image algebra: `Θ̃ = Φ(Θ − θ₀)` with
/// `θ₀ = ⊕ ln(m_i)·𝟙_{k_i}`, so that `Φ*` maps the new family onto the old one.
pub fn shift_family(phi: &EmbeddingSpec, family: &ExpFamilySpec) -> Result<ExpFamilySpec> {
    let source = family.algebra();
    let image = phi.image_algebra(source)?;
    let correction: Vec<CMat> = source
        .blocks()
        .iter()
        .zip(phi.multiplicities())
        .map(|(&k, &m)| CMat::identity(k, k).scale((m as f64).ln()))
        .collect();
    let correction = HermElem::from_blocks(source.clone(), correction);
    let theta0 = family.theta0() - &correction;
    let lift = |e: &HermElem| -> Result<HermElem> {
        let blocks = phi.embed_blocks(e.blocks())?;
        let n = image.num_blocks();
        Ok(HermElem::from_blocks(image.clone(), blocks.into_iter().take(n).collect()))
    };
    let theta0 = lift(&theta0)?;
    let directions = family.directions().iter().map(lift).collect::<Result<Vec<_>>>()?;
    ExpFamilySpec::new(theta0, directions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{random_hermitian, State};
    use crate::entropy::relative_entropy;
    use crate::expfam::gibbs_state;
    use approx::assert_relative_eq;

    fn c2() -> AlgebraSpec {
        AlgebraSpec::commutative(2).unwrap()
    }

    #[test]
    fn trivial_embedding_is_identity() {
        let a = AlgebraSpec::new(vec![2, 1]).unwrap();
        let phi = EmbeddingSpec::identity(&a);
        let b = random_hermitian(&a, 3, 1.0);
        assert_eq!(embed(&phi, &b).unwrap(), b);
        assert!(embed_adjoint(&phi, &a, &b).unwrap().approx_eq(&b, 1e-15));
    }

    #[test]
    fn multiplicity_expansion() {
        let phi = EmbeddingSpec::new(vec![1, 2], 0).unwrap();
        let b = HermElem::diagonal(&c2(), &[0.3, 0.7]).unwrap();
        let e = embed(&phi, &b).unwrap();
        assert_eq!(e.diag(), vec![0.3, 0.7, 0.7]);
    }

    #[test]
    fn adjoint_of_uniform_state() {
        for n in [3usize, 5] {
            let phi = EmbeddingSpec::new(vec![1, n - 1], 0).unwrap();
            let image = phi.image_algebra(&c2()).unwrap();
            let u = State::maximally_mixed(&image);
            let back = embed_adjoint(&phi, &c2(), u.elem()).unwrap();
            let d = back.diag();
            assert_relative_eq!(d[0], 1.0 / n as f64, epsilon = 1e-15);
            assert_relative_eq!(d[1], (n as f64 - 1.0) / n as f64, epsilon = 1e-15);
        }
    }

    #[test]
    fn adjoint_rejects_non_image() {
        let phi = EmbeddingSpec::new(vec![1, 2], 1).unwrap();
        let target = phi.target_algebra(&c2()).unwrap();
        let f = HermElem::diagonal(&target, &[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert!(embed_adjoint(&phi, &c2(), &f).is_err());
        let g = HermElem::diagonal(&target, &[0.1, 0.2, 0.2, 0.5]).unwrap();
        assert_eq!(embed_adjoint(&phi, &c2(), &g).unwrap().diag(), vec![0.1, 0.4]);
    }

    #[test]
    fn shift_correction_is_log_multiplicity() {
        let phi = EmbeddingSpec::new(vec![1, 2], 0).unwrap();
        let fam = ExpFamilySpec::new(
            HermElem::zeros(&c2()),
            vec![HermElem::diagonal(&c2(), &[1.0, 0.0]).unwrap()],
        )
        .unwrap();
        let shifted = shift_family(&phi, &fam).unwrap();
        let d = shifted.theta0().diag();
        assert_relative_eq!(d[0], 0.0);
        assert_relative_eq!(d[1], -(2f64).ln());
        assert_relative_eq!(d[2], -(2f64).ln());

        let unit = shift_family(&EmbeddingSpec::identity(&c2()), &fam).unwrap();
        assert_eq!(unit.theta0(), fam.theta0());
    }

    #[test]
    fn shifted_family_pulls_back() {
        let a = AlgebraSpec::new(vec![2, 1]).unwrap();
        let phi = EmbeddingSpec::new(vec![2, 3], 2).unwrap();
        let fam = ExpFamilySpec::new(
            random_hermitian(&a, 1, 0.5),
            vec![random_hermitian(&a, 2, 1.0), random_hermitian(&a, 3, 1.0)],
        )
        .unwrap();
        let shifted = shift_family(&phi, &fam).unwrap();
        for seed in 0..5 {
            let lam = [0.3 * seed as f64 - 0.5, 1.1 - 0.2 * seed as f64];
            let theta = fam.parameter(&lam).unwrap();
            let theta_t = shifted.parameter(&lam).unwrap();
            let back = embed_adjoint(&phi, &a, gibbs_state(&theta_t).elem()).unwrap();
            assert!(back.approx_eq(gibbs_state(&theta).elem(), 1e-12));
        }
        let r = gibbs_state(&shifted.parameter(&[0.2, -0.4]).unwrap());
        let s = gibbs_state(&shifted.parameter(&[-1.0, 0.7]).unwrap());
        let rb = State::new(embed_adjoint(&phi, &a, r.elem()).unwrap()).unwrap();
        let sb = State::new(embed_adjoint(&phi, &a, s.elem()).unwrap()).unwrap();
        let lhs = relative_entropy(&r, &s).unwrap().value();
        let rhs = relative_entropy(&rb, &sb).unwrap().value();
        assert_relative_eq!(lhs, rhs, epsilon = 1e-10);
    }
}
