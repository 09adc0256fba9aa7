//! Seeded random elements and states.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::algebra::{AlgebraSpec, CMat, HermElem, State, C64};
use crate::error::{Error, Result};

fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    })
}

/// A Gaussian self-adjoint element with entries of standard deviation `scale`.
pub fn random_hermitian_with<R: Rng + ?Sized>(rng: &mut R, spec: &AlgebraSpec, scale: f64) -> HermElem {
    let blocks = spec
        .blocks()
        .iter()
        .map(|&k| {
            let g = gaussian_matrix(rng, k, k);
            (&g + g.adjoint()).scale(0.5 * scale)
        })
        .collect();
    HermElem::from_blocks(spec.clone(), blocks)
}

pub fn random_hermitian(spec: &AlgebraSpec, seed: u64, scale: f64) -> HermElem {
    random_hermitian_with(&mut ChaCha8Rng::seed_from_u64(seed), spec, scale)
}

/// A random state `GG*/tr(GG*)` with `G` Gaussian of shape `k_i × r_i` per block.
///
/// Without a rank profile every block has full rank. A profile of zeros is rejected.
pub fn random_state_with<R: Rng + ?Sized>(
    rng: &mut R,
    spec: &AlgebraSpec,
    rank_profile: Option<&[usize]>,
) -> Result<State> {
    let ranks: Vec<usize> = match rank_profile {
        Some(r) => {
            if r.len() != spec.num_blocks() {
                return Err(Error::DimensionMismatch(format!(
                    "rank profile has {} entries for {} blocks",
                    r.len(),
                    spec.num_blocks()
                )));
            }
            for (&rank, &k) in r.iter().zip(spec.blocks()) {
                if rank > k {
                    return Err(Error::RankTooLarge { rank, block_size: k });
                }
            }
            r.to_vec()
        }
        None => spec.blocks().to_vec(),
    };
    if ranks.iter().all(|&r| r == 0) {
        return Err(Error::Precondition("rank profile is identically zero".into()));
    }
    let blocks = spec
        .blocks()
        .iter()
        .zip(&ranks)
        .map(|(&k, &r)| {
            if r == 0 {
                CMat::zeros(k, k)
            } else {
                let g = gaussian_matrix(rng, k, r);
                &g * g.adjoint()
            }
        })
        .collect();
    let elem = HermElem::from_blocks(spec.clone(), blocks);
    let tr = elem.trace();
    Ok(State::from_elem_unchecked(elem.scale(1.0 / tr)))
}

pub fn random_state(spec: &AlgebraSpec, seed: u64, rank_profile: Option<&[usize]>) -> Result<State> {
    random_state_with(&mut ChaCha8Rng::seed_from_u64(seed), spec, rank_profile)
}

/// A uniformly random unit vector in `ℝ^k`.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..k).map(|_| rng.sample(StandardNormal)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::eigenvalues;

    #[test]
    fn deterministic_for_seed() {
        let a = AlgebraSpec::new(vec![2, 1]).unwrap();
        assert_eq!(random_state(&a, 7, None).unwrap(), random_state(&a, 7, None).unwrap());
        assert_ne!(random_state(&a, 7, None).unwrap(), random_state(&a, 8, None).unwrap());
    }

    #[test]
    fn full_rank_by_default() {
        let a = AlgebraSpec::new(vec![3, 2, 1]).unwrap();
        let s = random_state(&a, 1, None).unwrap();
        assert!(eigenvalues(s.elem()).iter().all(|&x| x > 0.0));
        assert!((s.elem().trace() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rank_profiles() {
        let a = AlgebraSpec::new(vec![2, 1]).unwrap();
        let s = random_state(&a, 3, Some(&[1, 0])).unwrap();
        let ev = eigenvalues(s.elem());
        assert!((ev[0] - 1.0).abs() < 1e-12);
        assert!(ev[1..].iter().all(|x| x.abs() < 1e-12));
        assert!(matches!(
            random_state(&a, 3, Some(&[3, 0])),
            Err(Error::RankTooLarge { rank: 3, block_size: 2 })
        ));
        assert!(random_state(&a, 3, Some(&[0, 0])).is_err());
    }
}
