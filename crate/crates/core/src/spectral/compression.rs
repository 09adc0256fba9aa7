use crate::algebra::{AlgebraSpec, CMat, HermElem, State};
use crate::error::{Error, Result};
use crate::spectral::{jacobi, Projection};

/// The compressed algebra `p𝒜p` in its own coordinates.
///
/// Block `i` of the ambient algebra contributes a target block of size
/// `rank p_i` (dropped when zero) through a column-orthonormal isometry `V_i`
/// onto the range of `p_i`, so that `V*V = 𝟙` and `VV* = p`.
#[derive(Clone, Debug)]
pub struct Compression {
    projection: Projection,
    isometries: Vec<CMat>,
    block_map: Vec<Option<usize>>,
    target: AlgebraSpec,
}

impl Compression {
    pub fn new(p: &Projection) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::ZeroProjection);
        }
        let mut isometries = Vec::new();
        let mut block_map = Vec::new();
        let mut target_blocks = Vec::new();
        for b in p.elem().blocks() {
            let (vals, vecs) = jacobi::eigh(b);
            let cols: Vec<usize> = (0..vals.len()).filter(|&j| vals[j] > 0.5).collect();
            let v = CMat::from_fn(b.nrows(), cols.len(), |r, c| vecs[(r, cols[c])]);
            if cols.is_empty() {
                block_map.push(None);
            } else {
                block_map.push(Some(target_blocks.len()));
                target_blocks.push(cols.len());
            }
            isometries.push(v);
        }
        let target = AlgebraSpec::new(target_blocks)?;
        // Rebuild p from the isometries so that VV* = p holds to rounding.
        let clean = HermElem::from_blocks(
            p.spec().clone(),
            isometries.iter().map(|v| v * v.adjoint()).collect(),
        );
        Ok(Self {
            projection: Projection::from_elem_unchecked(clean),
            isometries,
            block_map,
            target,
        })
    }

    /// Compression by the identity, i.e. the algebra itself.
    pub fn identity(spec: &AlgebraSpec) -> Self {
        Self::new(&Projection::identity(spec)).expect("identity is nonzero")
    }

    pub fn projection(&self) -> &Projection {
        &self.projection
    }

    pub fn target(&self) -> &AlgebraSpec {
        &self.target
    }

    pub fn ambient(&self) -> &AlgebraSpec {
        self.projection.spec()
    }

    pub fn rank_profile(&self) -> Vec<usize> {
        self.isometries.iter().map(|v| v.ncols()).collect()
    }

    /// `V*aV`, the element `pap` in target coordinates.
    pub fn apply(&self, a: &HermElem) -> Result<HermElem> {
        self.ambient().check_same(a.spec())?;
        let blocks = a
            .blocks()
            .iter()
            .zip(&self.isometries)
            .zip(&self.block_map)
            .filter(|(_, m)| m.is_some())
            .map(|((b, v), _)| v.adjoint() * b * v)
            .collect();
        Ok(HermElem::from_blocks(self.target.clone(), blocks))
    }

    /// `VbV*`, back in the ambient algebra.
    pub fn lift(&self, b: &HermElem) -> Result<HermElem> {
        self.target.check_same(b.spec())?;
        let blocks = self
            .isometries
            .iter()
            .zip(&self.block_map)
            .map(|(v, m)| match m {
                Some(t) => v * b.block(*t) * v.adjoint(),
                None => CMat::zeros(v.nrows(), v.nrows()),
            })
            .collect();
        Ok(HermElem::from_blocks(self.ambient().clone(), blocks))
    }

    pub fn lift_state(&self, s: &State) -> Result<State> {
        Ok(State::from_elem_unchecked(self.lift(s.elem())?))
    }

    /// Lifts a projection of the target algebra to a projection of the ambient algebra.
    pub fn lift_projection(&self, q: &Projection) -> Result<Projection> {
        Ok(Projection::from_elem_unchecked(self.lift(q.elem())?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::pauli::*;
    use crate::algebra::random_hermitian;
    use crate::spectral::{eigenvalues, max_projection};

    #[test]
    fn identity_compression_is_trivial() {
        let a = AlgebraSpec::new(vec![2, 1]).unwrap();
        let c = Compression::identity(&a);
        assert_eq!(c.target(), &a);
        let x = random_hermitian(&a, 1, 1.0);
        let y = c.apply(&x).unwrap();
        assert!(eigenvalues(&y).iter().zip(eigenvalues(&x)).all(|(u, v)| (u - v).abs() < 1e-13));
        assert!(c.lift(&y).unwrap().approx_eq(&x, 1e-13));
    }

    #[test]
    fn corner_of_sigma3() {
        let a = AlgebraSpec::full(2).unwrap();
        let p = Projection::new(HermElem::diagonal(&a, &[1.0, 0.0]).unwrap()).unwrap();
        let c = Compression::new(&p).unwrap();
        assert_eq!(c.target().blocks(), &[1]);
        let s3 = HermElem::new(a, vec![sigma3()]).unwrap();
        assert!((c.apply(&s3).unwrap().trace() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lift_apply_is_sandwich() {
        let a = AlgebraSpec::new(vec![3, 2, 1]).unwrap();
        let (_, p) = max_projection(&random_hermitian(&a, 9, 1.0).add_scaled(0.0, &HermElem::zeros(&a)));
        let q = p.complement();
        for proj in [p, q] {
            if proj.is_zero() {
                continue;
            }
            let c = Compression::new(&proj).unwrap();
            assert_eq!(c.target().dim(), proj.rank());
            let x = random_hermitian(&a, 10, 1.0);
            let back = c.lift(&c.apply(&x).unwrap()).unwrap();
            assert!(back.approx_eq(&x.sandwich(proj.elem()), 1e-12));
        }
        assert!(matches!(Compression::new(&Projection::zero(&a)), Err(Error::ZeroProjection)));
    }
}
