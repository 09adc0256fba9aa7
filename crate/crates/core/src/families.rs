//! Two linear families on `Mat(2) ⊕ ℂ` whose mean-value sets are planar
//! convex bodies with non-exposed points.

use crate::algebra::pauli::{scalar, sigma1, sigma2};
use crate::algebra::{AlgebraSpec, CMat, HermElem};
use crate::expfam::ExpFamilySpec;

fn mat2_c() -> AlgebraSpec {
    AlgebraSpec::new(vec![2, 1]).expect("valid algebra")
}

fn elem(a: CMat, b: f64) -> HermElem {
    HermElem::new(mat2_c(), vec![a, scalar(b)]).expect("hermitian")
}

/// `U = span(σ₁ ⊕ 0, σ₂ ⊕ 1)`. The mean-value set is the closed unit disk;
/// the state space has the non-exposed face `½(𝟙+σ₂) ⊕ 1` above the point `(0, 1)`.
pub fn staffelberg() -> ExpFamilySpec {
    ExpFamilySpec::linear(vec![elem(sigma1(), 0.0), elem(sigma2(), 1.0)]).expect("independent directions")
}

/// `U = span(σ₁ ⊕ 1, σ₂ ⊕ 1)`. The mean-value set is the convex hull of the
/// unit disk and `(1, 1)`; the points `(1, 0)` and `(0, 1)` are not exposed.
pub fn swallow() -> ExpFamilySpec {
    ExpFamilySpec::linear(vec![elem(sigma1(), 1.0), elem(sigma2(), 1.0)]).expect("independent directions")
}

/// A family by name, for command-line use.
pub fn by_name(name: &str) -> Option<ExpFamilySpec> {
    match name {
        "staffelberg" => Some(staffelberg()),
        "swallow" => Some(swallow()),
        _ => None,
    }
}
