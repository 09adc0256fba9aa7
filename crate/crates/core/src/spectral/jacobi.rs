//! Cyclic Jacobi eigensolver for small complex Hermitian matrices.

use crate::algebra::{CMat, C64};

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition `m = V·diag(λ)·V*` with eigenvalues in ascending order.
///
/// Each rotation first removes the phase of the pivot `m_pq`, which reduces the
/// 2×2 subproblem to a real symmetric one, then applies the classical rotation.
pub fn eigh(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "eigh needs a square matrix");
    let mut a = (m + m.adjoint()).scale(0.5);
    let mut v = CMat::identity(n, n);
    let scale = a.norm();
    if n > 1 && scale > 0.0 {
        for _ in 0..MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
                .map(|(p, q)| a[(p, q)].norm_sqr())
                .sum();
            if off.sqrt() <= 1e-17 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = CMat::from_fn(n, n, |r, c| v[(r, order[c])]);
    (values, vectors)
}

fn rotate(a: &mut CMat, v: &mut CMat, p: usize, q: usize) {
    let apq = a[(p, q)];
    let abs = apq.norm();
    if abs == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    if abs < 1e-300 || abs <= 1e-19 * (app.abs() + aqq.abs()) {
        a[(p, q)] = C64::new(0.0, 0.0);
        a[(q, p)] = C64::new(0.0, 0.0);
        return;
    }
    let phase_conj = (apq / abs).conj();
    let theta = (aqq - app) / (2.0 * abs);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let g_pp = C64::new(c, 0.0);
    let g_pq = C64::new(s, 0.0);
    let g_qp = phase_conj * (-s);
    let g_qq = phase_conj * c;
    let n = a.nrows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::pauli;
    use proptest::prelude::*;

    fn reconstruct(values: &[f64], vectors: &CMat) -> CMat {
        let n = values.len();
        let d = CMat::from_fn(n, n, |r, c| if r == c { C64::new(values[r], 0.0) } else { C64::new(0.0, 0.0) });
        vectors * d * vectors.adjoint()
    }

    #[test]
    fn pauli_spectra() {
        for m in [pauli::sigma1(), pauli::sigma2(), pauli::sigma3()] {
            let (vals, vecs) = eigh(&m);
            assert!((vals[0] + 1.0).abs() < 1e-15 && (vals[1] - 1.0).abs() < 1e-15);
            assert!((reconstruct(&vals, &vecs) - m).norm() < 1e-14);
        }
    }

    #[test]
    fn degenerate_and_trivial() {
        let (vals, vecs) = eigh(&CMat::identity(3, 3));
        assert_eq!(vals, vec![1.0, 1.0, 1.0]);
        assert!((vecs - CMat::identity(3, 3)).norm() < 1e-15);
        let (vals, _) = eigh(&CMat::zeros(2, 2));
        assert_eq!(vals, vec![0.0, 0.0]);
    }

    proptest! {
        #[test]
        fn reconstructs_random_hermitian(entries in proptest::collection::vec(-3.0f64..3.0, 72)) {
            let n = 6;
            let g = CMat::from_fn(n, n, |r, c| C64::new(entries[r * n + c], entries[36 + r * n + c]));
            let h = (&g + g.adjoint()).scale(0.5);
            let (vals, vecs) = eigh(&h);
            prop_assert!((reconstruct(&vals, &vecs) - &h).norm() <= 1e-12 * h.norm().max(1.0));
            prop_assert!((vecs.adjoint() * &vecs - CMat::identity(n, n)).norm() <= 1e-13);
            prop_assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
