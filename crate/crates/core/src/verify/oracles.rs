//! Independent reference computations used by the acceptance suites. None of
//! them goes through the dual Newton solver or the lattice search.

use nalgebra::{DMatrix, DVector};

use crate::algebra::{AlgebraSpec, CMat, HermElem, C64};
use crate::spectral::jacobi;

/// Faces of the convex hull of planar points, as sorted index sets.
///
/// Brute force over pairs: a pair spans an edge when every point lies weakly on
/// one side of the line through it. Vertices are the extreme points of each
/// edge along its direction. The full index set is included; the empty face is not.
pub fn polygon_faces(points: &[[f64; 2]]) -> Vec<Vec<usize>> {
    let n = points.len();
    let scale = points.iter().fold(1.0f64, |m, p| m.max(p[0].abs()).max(p[1].abs()));
    let tol = 1e-12 * scale * scale;
    let mut faces: Vec<Vec<usize>> = vec![(0..n).collect()];
    let push = |f: Vec<usize>, faces: &mut Vec<Vec<usize>>| {
        if !faces.contains(&f) {
            faces.push(f);
        }
    };
    for i in 0..n {
        for j in (i + 1)..n {
            let d = [points[j][0] - points[i][0], points[j][1] - points[i][1]];
            if d[0].abs() + d[1].abs() == 0.0 {
                continue;
            }
            let nu = [-d[1], d[0]];
            let s: Vec<f64> = points.iter().map(|p| nu[0] * (p[0] - points[i][0]) + nu[1] * (p[1] - points[i][1])).collect();
            let supporting = s.iter().all(|&x| x >= -tol) || s.iter().all(|&x| x <= tol);
            if !supporting {
                continue;
            }
            let on_line: Vec<usize> = (0..n).filter(|&k| s[k].abs() <= tol).collect();
            if on_line.len() == n {
                continue;
            }
            let along = |k: usize| d[0] * (points[k][0] - points[i][0]) + d[1] * (points[k][1] - points[i][1]);
            let lo = *on_line.iter().min_by(|&&a, &&b| along(a).total_cmp(&along(b))).unwrap();
            let hi = *on_line.iter().max_by(|&&a, &&b| along(a).total_cmp(&along(b))).unwrap();
            push(on_line, &mut faces);
            push(vec![lo], &mut faces);
            push(vec![hi], &mut faces);
        }
    }
    faces.sort();
    faces
}

/// Maximum Shannon entropy on `{p ∈ Δ_n : A p = ξ}` starting from a strictly
/// positive feasible `p0`, by damped Newton ascent in a null-space
/// parametrization of the affine fiber. Steps are halved until they keep `p > 0`
/// and increase the entropy.
pub fn simplex_max_entropy(a: &DMatrix<f64>, p0: &[f64]) -> (Vec<f64>, f64) {
    let n = p0.len();
    let mut c = DMatrix::zeros(a.nrows() + 1, n);
    for j in 0..n {
        for i in 0..a.nrows() {
            c[(i, j)] = a[(i, j)];
        }
        c[(a.nrows(), j)] = 1.0;
    }
    // Null space of the constraint matrix from the spectrum of CᵀC.
    let gram = c.transpose() * &c;
    let eig = gram.symmetric_eigen();
    let cut = 1e-12 * eig.eigenvalues.amax().max(1.0);
    let null: Vec<usize> = (0..n).filter(|&j| eig.eigenvalues[j] <= cut).collect();
    let basis = DMatrix::from_fn(n, null.len(), |r, k| eig.eigenvectors[(r, null[k])]);
    let entropy = |p: &DVector<f64>| -p.iter().map(|&x| if x > 0.0 { x * x.ln() } else { 0.0 }).sum::<f64>();
    let mut p = DVector::from_column_slice(p0);
    for _ in 0..200 {
        let g = DVector::from_iterator(n, p.iter().map(|x| -x.ln() - 1.0));
        let grad = basis.transpose() * &g;
        if grad.norm() < 1e-15 {
            break;
        }
        let w = DMatrix::from_diagonal(&p.map(|x| 1.0 / x));
        let hess = basis.transpose() * w * &basis;
        let step = match hess.clone().cholesky() {
            Some(ch) => ch.solve(&grad),
            None => grad.clone(),
        };
        let dir = &basis * step;
        let h0 = entropy(&p);
        let mut t = 1.0;
        let mut moved = false;
        while t > 1e-16 {
            let cand = &p + &dir * t;
            if cand.iter().all(|&x| x > 0.0) && entropy(&cand) >= h0 {
                moved = (&cand - &p).norm() > 0.0;
                p = cand;
                break;
            }
            t *= 0.5;
        }
        if !moved {
            break;
        }
    }
    let h = entropy(&p);
    (p.iter().copied().collect(), h)
}

/// A random unitary per block with prescribed eigenvalues; returns the
/// element and its exact eigen-decomposition.
pub fn element_with_spectrum(spec: &AlgebraSpec, seed_matrix: &HermElem, eigenvalues: &[Vec<f64>]) -> (HermElem, Vec<CMat>) {
    let mut unitaries = Vec::new();
    let mut blocks = Vec::new();
    for (i, vals) in eigenvalues.iter().enumerate() {
        let (_, w) = jacobi::eigh(seed_matrix.block(i));
        let k = vals.len();
        let d = CMat::from_fn(k, k, |r, c| if r == c { C64::new(vals[r], 0.0) } else { C64::new(0.0, 0.0) });
        blocks.push(&w * d * w.adjoint());
        unitaries.push(w);
    }
    (HermElem::new(spec.clone(), blocks).expect("hermitian"), unitaries)
}

/// `θ + t·u` rotated into the known eigenbasis of `u` and shifted by `t·shift`:
/// `W*θW + t·(diag(λ_u) − shift)`. The rotation and shift leave `R(·)` and
/// `exp(·)·e^{t·shift}` unchanged and keep the large entries on the diagonal.
fn graded(theta: &HermElem, unitaries: &[CMat], eigenvalues: &[Vec<f64>], t: f64, shift: f64) -> Vec<CMat> {
    theta
        .blocks()
        .iter()
        .zip(unitaries)
        .zip(eigenvalues)
        .map(|((b, w), vals)| {
            let mut m = w.adjoint() * b * w;
            for (j, v) in vals.iter().enumerate() {
                m[(j, j)] += C64::new(t * (v - shift), 0.0);
            }
            m
        })
        .collect()
}

fn rotate_back(parts: Vec<CMat>, unitaries: &[CMat]) -> Vec<CMat> {
    parts.into_iter().zip(unitaries).map(|(m, w)| w * m * w.adjoint()).collect()
}

/// `R(θ + t u)` and `F(θ + t u) − t·λ⁺(u)` evaluated directly in the eigenbasis of `u`.
pub fn direct_gibbs(theta: &HermElem, unitaries: &[CMat], eigenvalues: &[Vec<f64>], t: f64) -> (HermElem, f64) {
    let top = eigenvalues.iter().flatten().cloned().fold(f64::NEG_INFINITY, f64::max);
    let parts = graded(theta, unitaries, eigenvalues, t, top);
    let eig: Vec<(Vec<f64>, CMat)> = parts.iter().map(jacobi::eigh).collect();
    let m = eig.iter().flat_map(|(v, _)| v.iter().copied()).fold(f64::NEG_INFINITY, f64::max);
    let z: f64 = eig.iter().flat_map(|(v, _)| v.iter()).map(|x| (x - m).exp()).sum();
    let blocks = eig
        .iter()
        .map(|(v, w)| {
            let k = v.len();
            let d = CMat::from_fn(k, k, |r, c| if r == c { C64::new((v[r] - m).exp() / z, 0.0) } else { C64::new(0.0, 0.0) });
            w * d * w.adjoint()
        })
        .collect();
    let rho = HermElem::new(theta.spec().clone(), rotate_back(blocks, unitaries)).expect("hermitian");
    (rho, m + z.ln())
}

/// `exp(θ + t u)` evaluated directly in the eigenbasis of `u`.
pub fn direct_exp(theta: &HermElem, unitaries: &[CMat], eigenvalues: &[Vec<f64>], t: f64) -> HermElem {
    let parts = graded(theta, unitaries, eigenvalues, t, 0.0);
    let blocks = parts
        .iter()
        .map(|m| {
            let (v, w) = jacobi::eigh(m);
            let k = v.len();
            let d = CMat::from_fn(k, k, |r, c| if r == c { C64::new(v[r].exp(), 0.0) } else { C64::new(0.0, 0.0) });
            &w * d * w.adjoint()
        })
        .collect();
    HermElem::new(theta.spec().clone(), rotate_back(blocks, unitaries)).expect("hermitian")
}

/// Central difference `(F(θ+hu) − F(θ−hu))/2h`.
pub fn first_difference(f: impl Fn(&HermElem) -> f64, theta: &HermElem, u: &HermElem, h: f64) -> f64 {
    (f(&theta.add_scaled(h, u)) - f(&theta.add_scaled(-h, u))) / (2.0 * h)
}

/// Mixed central difference for `∂²F/∂s∂t (θ + su + tv)`.
pub fn second_difference(f: impl Fn(&HermElem) -> f64, theta: &HermElem, u: &HermElem, v: &HermElem, h: f64) -> f64 {
    let at = |a: f64, b: f64| f(&theta.add_scaled(a, u).add_scaled(b, v));
    (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4.0 * h * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_with_center() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5]];
        let faces = polygon_faces(&pts);
        assert_eq!(faces.len(), 1 + 4 + 4);
        assert!(faces.contains(&vec![0, 1]) && faces.contains(&vec![2]));
        assert!(!faces.iter().any(|f| f == &vec![4]));
    }

    #[test]
    fn collinear_edge_point_is_not_a_vertex() {
        let pts = [[0.0, 0.0], [2.0, 0.0], [1.0, 0.0], [1.0, 1.0]];
        let faces = polygon_faces(&pts);
        assert!(faces.contains(&vec![0, 1, 2]));
        assert!(!faces.contains(&vec![2]));
        assert_eq!(faces.len(), 1 + 3 + 3);
    }

    #[test]
    fn simplex_solver_uniform() {
        let a = DMatrix::from_row_slice(1, 4, &[1.0, 0.0, 1.0, 0.0]);
        let (p, h) = simplex_max_entropy(&a, &[0.4, 0.1, 0.1, 0.4]);
        assert!(p.iter().all(|x| (x - 0.25).abs() < 1e-12));
        assert!((h - 4f64.ln()).abs() < 1e-14);
    }
}
