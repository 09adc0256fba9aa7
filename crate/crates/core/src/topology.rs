//! Empirical convergence testers for the I-, rI- and norm topologies on the
//! state space, divergence disks, and closure infimum experiments.

use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{AlgebraSpec, State};
use crate::entropy::{divergence_to_set, omega_divergence, ExtReal, Omega};
use crate::error::{Error, Result};

/// Default number of sampled sequence elements.
pub const DEFAULT_N: usize = 200;

/// A lazily generated sequence `(ρ_i)_{i ≥ 1}` of states of one algebra.
#[derive(Clone)]
pub struct StateSequence {
    spec: AlgebraSpec,
    length: Option<usize>,
    generator: Arc<dyn Fn(usize) -> State + Send + Sync>,
}

impl std::fmt::Debug for StateSequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StateSequence").field("spec", &self.spec).field("length", &self.length).finish()
    }
}

impl StateSequence {
    /// `length = None` marks an unbounded sequence.
    pub fn new(spec: AlgebraSpec, length: Option<usize>, generator: impl Fn(usize) -> State + Send + Sync + 'static) -> Self {
        Self { spec, length, generator: Arc::new(generator) }
    }

    pub fn from_states(states: Vec<State>) -> Result<Self> {
        let spec = states.first().ok_or(Error::EmptySet)?.spec().clone();
        for s in &states {
            spec.check_same(s.spec())?;
        }
        let n = states.len();
        Ok(Self::new(spec, Some(n), move |i| states[i - 1].clone()))
    }

    pub fn spec(&self) -> &AlgebraSpec {
        &self.spec
    }

    pub fn length(&self) -> Option<usize> {
        self.length
    }

    /// `ρ_i`, indexed from 1.
    pub fn get(&self, i: usize) -> State {
        (self.generator)(i)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Converging,
    Diverging,
    Inconclusive,
}

/// Which notion of convergence is tested.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Mode {
    Omega(Omega),
    /// Trace norm.
    Norm,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    pub verdict: Verdict,
    /// Values for `i = 1, …, N`; `inf` marks an infinite divergence.
    pub trace: Vec<ExtReal>,
    pub tail_start: usize,
    pub threshold: f64,
}

fn value_of(mode: Mode, rho: &State, rho_i: &State) -> Result<ExtReal> {
    match mode {
        Mode::Omega(w) => omega_divergence(rho, rho_i, w),
        Mode::Norm => Ok(ExtReal::Finite(rho.trace_distance(rho_i))),
    }
}

/// Tail verdict on `[N/2, N]`: converging if every value is below `threshold`,
/// diverging if every value stays at or above it without shrinking to half
/// its size across the tail, inconclusive otherwise.
pub fn converges(seq: &StateSequence, rho: &State, mode: Mode, n: usize, threshold: f64) -> Result<ConvergenceReport> {
    if n == 0 {
        return Err(Error::Precondition("N must be at least 1".into()));
    }
    seq.spec().check_same(rho.spec())?;
    let n = seq.length().map_or(n, |l| l.min(n));
    let trace = (1..=n).map(|i| value_of(mode, rho, &seq.get(i))).collect::<Result<Vec<_>>>()?;
    let tail_start = (n / 2).max(1);
    let tail = &trace[tail_start - 1..];
    let verdict = if tail.iter().all(|v| v.lt(Some(threshold))) {
        Verdict::Converging
    } else if tail.iter().all(|v| !v.lt(Some(threshold))) {
        let first = tail.first().unwrap().value();
        let last = tail.last().unwrap().value();
        if last.is_infinite() || last >= 0.5 * first {
            Verdict::Diverging
        } else {
            Verdict::Inconclusive
        }
    } else {
        Verdict::Inconclusive
    };
    Ok(ConvergenceReport { verdict, trace, tail_start, threshold })
}

/// `S^ω(ρ, ρ_i) → 0` tested on the tail with threshold `ε`.
pub fn omega_converges(seq: &StateSequence, rho: &State, omega: Omega, n: usize, eps: f64) -> Result<ConvergenceReport> {
    converges(seq, rho, Mode::Omega(omega), n, eps)
}

#[derive(Clone, Debug, Serialize)]
pub struct ImplicationReport {
    pub i: ConvergenceReport,
    pub ri: ConvergenceReport,
    pub norm: ConvergenceReport,
    /// Observed breaches of `I ⇒ rI ⇒ norm`.
    pub violations: Vec<String>,
}

/// Checks the one-way arrows `I-convergence ⇒ rI-convergence ⇒ norm convergence`.
///
/// The thresholds are matched so that the implications hold exactly on
/// the sampled values: rI uses `10ε` against I's `ε`, and the norm uses
/// `√(2·10ε)` by Pinsker's inequality. A violation is a converging
/// antecedent with a diverging consequent.
pub fn implication_suite(seq: &StateSequence, rho: &State, n: usize, eps: f64) -> Result<ImplicationReport> {
    let i = converges(seq, rho, Mode::Omega(Omega::I), n, eps)?;
    let ri = converges(seq, rho, Mode::Omega(Omega::RI), n, 10.0 * eps)?;
    let norm = converges(seq, rho, Mode::Norm, n, (20.0 * eps).sqrt())?;
    let mut violations = Vec::new();
    if i.verdict == Verdict::Converging && ri.verdict == Verdict::Diverging {
        violations.push("I-converging but rI-diverging".to_string());
    }
    if ri.verdict == Verdict::Converging && norm.verdict == Verdict::Diverging {
        violations.push("rI-converging but norm-diverging".to_string());
    }
    if i.verdict == Verdict::Converging && norm.verdict == Verdict::Diverging {
        violations.push("I-converging but norm-diverging".to_string());
    }
    Ok(ImplicationReport { i, ri, norm, violations })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DiskKind {
    Open,
    Closed,
}

/// `σ ∈ V^ω(ρ, ε)` (open) or `σ ∈ B^ω(ρ, ε)` (closed); `eps = None` means `ε = ∞`.
pub fn disk_membership(rho: &State, sigma: &State, eps: Option<f64>, omega: Omega, kind: DiskKind) -> Result<bool> {
    if let Some(e) = eps {
        if !(e > 0.0) {
            return Err(Error::Precondition(format!("radius {e} is not positive")));
        }
    }
    let d = omega_divergence(rho, sigma, omega)?;
    Ok(match kind {
        DiskKind::Open => d.lt(eps),
        DiskKind::Closed => d.le(eps),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosureReport {
    pub inf_set: ExtReal,
    pub inf_closure: ExtReal,
    /// `inf_set − inf_closure`, infinite if only the former is infinite.
    pub gap: f64,
    /// `inf_set ≥ inf_closure − tol`.
    pub consistent: bool,
}

/// Compares `inf_{τ∈X} S^ω(ρ,τ)` over samples of `X` with the infimum over
/// samples of a proposed closure of `X`.
pub fn closure_infimum_experiment(rho: &State, set: &[State], closure: &[State], omega: Omega, tol: f64) -> Result<ClosureReport> {
    let inf_set = divergence_to_set(rho, set, omega)?;
    let inf_closure = divergence_to_set(rho, closure, omega)?;
    let gap = match (inf_set, inf_closure) {
        (ExtReal::Finite(a), ExtReal::Finite(b)) => a - b,
        (ExtReal::Infinite, ExtReal::Infinite) => 0.0,
        (ExtReal::Infinite, _) => f64::INFINITY,
        (_, ExtReal::Infinite) => f64::NEG_INFINITY,
    };
    Ok(ClosureReport { inf_set, inf_closure, gap, consistent: gap >= -tol })
}

/// `ρ_i = ((i−1)/i, 1/i)` on `ℂ²`, which rI-converges but does not I-converge to `(1, 0)`.
pub fn commutative_counterexample() -> (StateSequence, State) {
    let spec = AlgebraSpec::commutative(2).expect("valid");
    let s2 = spec.clone();
    let seq = StateSequence::new(spec.clone(), None, move |i| {
        let t = 1.0 / i as f64;
        State::new(crate::algebra::HermElem::diagonal(&s2, &[1.0 - t, t]).expect("diag")).expect("state")
    });
    let rho = State::new(crate::algebra::HermElem::diagonal(&spec, &[1.0, 0.0]).expect("diag")).expect("state");
    (seq, rho)
}

/// Pure qubit states `½(𝟙 + cos αᵢ σ₁ + sin αᵢ σ₂)` with `αᵢ = 1/i`, which
/// converge in norm to `½(𝟙 + σ₁)` but not in the rI-topology.
pub fn qubit_counterexample() -> (StateSequence, State) {
    use crate::algebra::pauli::{bloch, identity};
    let spec = AlgebraSpec::full(2).expect("valid");
    let s2 = spec.clone();
    let seq = StateSequence::new(spec.clone(), None, move |i| {
        let a = 1.0 / i as f64;
        let m = (identity() + bloch([a.cos(), a.sin(), 0.0])).scale(0.5);
        State::new(crate::algebra::HermElem::new(s2.clone(), vec![m]).expect("hermitian")).expect("state")
    });
    let rho = State::new(crate::algebra::HermElem::new(spec, vec![(identity() + bloch([1.0, 0.0, 0.0])).scale(0.5)]).expect("hermitian")).expect("state");
    (seq, rho)
}
