//! Von Neumann entropy, relative entropy with exact support handling,
//! ω-divergences and the Pinsker–Csiszár slack.

use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::algebra::{NormKind, State};
use crate::error::{Error, Result};
use crate::spectral::{eigh, proj_leq, support_projection, zero_tol};

/// Finite values above this negative floor are clamped to zero.
const NEGATIVE_FLOOR: f64 = -1e-9;

/// A value in `[0, ∞]` with an explicit infinity.
#[derive(Clone, Copy, Debug)]
pub enum ExtReal {
    Finite(f64),
    Infinite,
}

impl ExtReal {
    pub fn finite(x: f64) -> Self {
        if x < NEGATIVE_FLOOR {
            log::warn!("divergence {x:e} below the negative floor; clamping to 0");
        }
        ExtReal::Finite(x.max(0.0))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn is_infinite(&self) -> bool {
        !self.is_finite()
    }

    /// The value as `f64`, with `+∞` for the infinite marker.
    pub fn value(&self) -> f64 {
        match self {
            ExtReal::Finite(x) => *x,
            ExtReal::Infinite => f64::INFINITY,
        }
    }

    pub fn as_finite(&self) -> Option<f64> {
        match self {
            ExtReal::Finite(x) => Some(*x),
            ExtReal::Infinite => None,
        }
    }

    pub fn add(self, other: ExtReal) -> ExtReal {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
            _ => ExtReal::Infinite,
        }
    }

    /// Strict comparison `self < eps` with `eps = None` meaning `∞`.
    pub fn lt(&self, eps: Option<f64>) -> bool {
        match (self, eps) {
            (ExtReal::Infinite, _) => false,
            (ExtReal::Finite(_), None) => true,
            (ExtReal::Finite(x), Some(e)) => *x < e,
        }
    }

    /// Weak comparison `self ≤ eps` with `eps = None` meaning `∞`.
    pub fn le(&self, eps: Option<f64>) -> bool {
        match (self, eps) {
            (_, None) => true,
            (ExtReal::Infinite, Some(_)) => false,
            (ExtReal::Finite(x), Some(e)) => *x <= e,
        }
    }
}

impl PartialEq for ExtReal {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (ExtReal::Infinite, ExtReal::Infinite) => true,
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a == b,
            _ => false,
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (ExtReal::Infinite, ExtReal::Infinite) => Some(Ordering::Equal),
            (ExtReal::Infinite, _) => Some(Ordering::Greater),
            (_, ExtReal::Infinite) => Some(Ordering::Less),
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(x) => write!(f, "{x}"),
            ExtReal::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtReal::Finite(x) => s.serialize_f64(*x),
            ExtReal::Infinite => s.serialize_str("inf"),
        }
    }
}

/// `S(ρ) = −tr ρ log ρ`, with `log` taken on the support of `ρ`.
pub fn von_neumann_entropy(rho: &State) -> f64 {
    let tol = zero_tol(rho.elem());
    let s: f64 = eigh(rho.elem())
        .values_desc()
        .into_iter()
        .filter(|&x| x > tol)
        .map(|x| -x * x.ln())
        .sum();
    s.max(0.0)
}

/// `S(ρ, σ) = tr ρ(log ρ − log σ)` if `s(ρ) ⪯ s(σ)`, otherwise `+∞`.
pub fn relative_entropy(rho: &State, sigma: &State) -> Result<ExtReal> {
    rho.spec().check_same(sigma.spec())?;
    let p = support_projection(rho.elem());
    let q = support_projection(sigma.elem());
    if !proj_leq(&p, &q) {
        return Ok(ExtReal::Infinite);
    }
    let tol_s = zero_tol(sigma.elem());
    let es = eigh(sigma.elem());
    let mut cross = 0.0;
    for (i, block) in rho.elem().blocks().iter().enumerate() {
        let (vals, vecs) = es.block(i);
        for (j, &mu) in vals.iter().enumerate() {
            if mu > tol_s {
                let v = vecs.column(j);
                let w = (v.adjoint() * block * v)[(0, 0)].re;
                cross += w * mu.ln();
            }
        }
    }
    Ok(ExtReal::finite(-von_neumann_entropy(rho) - cross))
}

/// The two divergence conventions: `S^rI(ρ,σ) = S(ρ,σ)` and `S^I(ρ,σ) = S(σ,ρ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Omega {
    #[serde(rename = "I")]
    I,
    #[serde(rename = "rI")]
    RI,
}

pub fn omega_divergence(rho: &State, sigma: &State, omega: Omega) -> Result<ExtReal> {
    match omega {
        Omega::RI => relative_entropy(rho, sigma),
        Omega::I => relative_entropy(sigma, rho),
    }
}

/// `inf_{τ ∈ X} S^ω(ρ, τ)` over a finite nonempty list.
pub fn divergence_to_set(rho: &State, set: &[State], omega: Omega) -> Result<ExtReal> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut best = ExtReal::Infinite;
    for tau in set {
        let d = omega_divergence(rho, tau, omega)?;
        if d < best {
            best = d;
        }
    }
    Ok(best)
}

/// `2S(ρ,σ) − ‖ρ−σ‖₁²`; `+∞` when the relative entropy is infinite.
pub fn pinsker_slack(rho: &State, sigma: &State) -> Result<f64> {
    let s = relative_entropy(rho, sigma)?;
    let t = (rho.elem() - sigma.elem()).norm(NormKind::Trace);
    Ok(match s {
        ExtReal::Infinite => f64::INFINITY,
        ExtReal::Finite(x) => 2.0 * x - t * t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::pauli::*;
    use crate::algebra::{AlgebraSpec, HermElem};
    use approx::assert_relative_eq;

    fn diag_state(d: &[f64]) -> State {
        State::new(HermElem::diagonal(&AlgebraSpec::commutative(d.len()).unwrap(), d).unwrap()).unwrap()
    }

    fn qubit(b: [f64; 3]) -> State {
        let a = AlgebraSpec::full(2).unwrap();
        State::new(HermElem::new(a, vec![(identity() + bloch(b)).scale(0.5)]).unwrap()).unwrap()
    }

    #[test]
    fn von_neumann_values() {
        assert_eq!(von_neumann_entropy(&diag_state(&[1.0, 0.0])), 0.0);
        let a = AlgebraSpec::new(vec![3, 2]).unwrap();
        assert_relative_eq!(von_neumann_entropy(&State::maximally_mixed(&a)), 5f64.ln(), epsilon = 1e-14);
        let want = -0.25 * 0.25f64.ln() - 0.75 * 0.75f64.ln();
        assert_relative_eq!(von_neumann_entropy(&diag_state(&[0.25, 0.75])), want, epsilon = 1e-15);
    }

    #[test]
    fn relative_entropy_support_rules() {
        let r = diag_state(&[0.3, 0.7]);
        assert_eq!(relative_entropy(&r, &r).unwrap().value(), 0.0);
        let n = 2.0;
        let a = diag_state(&[(n - 1.0) / n, 1.0 / n]);
        let b = diag_state(&[1.0, 0.0]);
        assert!(relative_entropy(&a, &b).unwrap().is_infinite());
        assert_relative_eq!(relative_entropy(&b, &a).unwrap().value(), 2f64.ln(), epsilon = 1e-15);

        let rho = qubit([1.0, 0.0, 0.0]);
        let alpha = std::f64::consts::FRAC_PI_2;
        let sig = qubit([alpha.cos(), alpha.sin(), 0.0]);
        assert!(relative_entropy(&rho, &sig).unwrap().is_infinite());
        assert_eq!(relative_entropy(&rho, &qubit([1.0, 0.0, 0.0])).unwrap().value(), 0.0);
    }

    #[test]
    fn omega_conventions() {
        let b = diag_state(&[1.0, 0.0]);
        let a = diag_state(&[0.5, 0.5]);
        assert!(omega_divergence(&b, &a, Omega::I).unwrap().is_infinite());
        assert!(omega_divergence(&b, &a, Omega::RI).unwrap().is_finite());
        assert_eq!(omega_divergence(&a, &a, Omega::I).unwrap().value(), 0.0);
    }

    #[test]
    fn set_divergence() {
        let a = diag_state(&[0.5, 0.5]);
        let b = diag_state(&[0.9, 0.1]);
        let pure = diag_state(&[0.0, 1.0]);
        assert_eq!(divergence_to_set(&a, &[b.clone(), a.clone()], Omega::RI).unwrap().value(), 0.0);
        assert!(divergence_to_set(&a, std::slice::from_ref(&pure), Omega::RI).unwrap().is_infinite());
        assert_eq!(
            divergence_to_set(&a, std::slice::from_ref(&b), Omega::I).unwrap(),
            omega_divergence(&a, &b, Omega::I).unwrap()
        );
        assert!(matches!(divergence_to_set(&a, &[], Omega::RI), Err(Error::EmptySet)));
    }

    #[test]
    fn pinsker_examples() {
        let r = diag_state(&[0.2, 0.8]);
        assert!(pinsker_slack(&r, &r).unwrap().abs() < 1e-15);
        let slack = pinsker_slack(&diag_state(&[1.0, 0.0]), &diag_state(&[0.5, 0.5])).unwrap();
        assert_relative_eq!(slack, 2.0 * 2f64.ln() - 1.0, epsilon = 1e-14);
    }

    #[test]
    fn ext_real_arithmetic() {
        assert_eq!(ExtReal::Infinite, ExtReal::Infinite);
        assert!(ExtReal::Finite(1.0) < ExtReal::Infinite);
        assert!(ExtReal::Finite(1.0).add(ExtReal::Infinite).is_infinite());
        assert_eq!(ExtReal::finite(-1e-12).value(), 0.0);
        assert!(ExtReal::Finite(3.0).lt(None));
        assert!(!ExtReal::Infinite.lt(None));
        assert!(ExtReal::Infinite.le(None));
        assert_eq!(serde_json::to_string(&ExtReal::Infinite).unwrap(), "\"inf\"");
    }
}
