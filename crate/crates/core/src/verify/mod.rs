//! Acceptance suites. Each suite draws its random instances from a seed and
//! compares library results against an independent oracle or identity.

pub mod oracles;

use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::pauli;
use crate::algebra::random::{random_hermitian_with, random_state_with, random_unit_vector};
use crate::algebra::{embed_adjoint, shift_family, AlgebraSpec, EmbeddingSpec, HermElem, NormKind, State};
use crate::entropy::{pinsker_slack, relative_entropy, ExtReal, Omega};
use crate::error::{Error, Result};
use crate::expfam::{bkm, bkm_gram, d_free_energy, e_geodesic_limit, exp_limit_nonpositive, free_energy, free_energy_asymptote, gibbs_state, ExpFamilySpec};
use crate::families;
use crate::lattice::{enumerate_lattice, LatticeBudget};
use crate::maxent::{entropy_distance, max_entropy, pythagoras_check, ri_projection};
use crate::topology::{commutative_counterexample, implication_suite, omega_converges, qubit_counterexample, converges, Mode, StateSequence, Verdict};

/// Suite names in criterion order.
pub const SUITES: [&str; 10] = [
    "pythagoras",
    "optimality",
    "maxent-oracle",
    "calculus",
    "limits",
    "pinsker",
    "closures",
    "topology",
    "lattice-oracle",
    "representation",
];

#[derive(Clone, Debug, Serialize)]
pub struct SuiteOutcome {
    pub id: usize,
    pub name: String,
    pub passed: bool,
    pub checks: usize,
    pub failures: usize,
    /// Largest deviation seen, in the suite's own metric.
    pub worst: f64,
    pub detail: String,
    pub seconds: f64,
}

impl SuiteOutcome {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {:<15} {}  checks={} failures={} worst={:.3e} ({:.1}s) {}",
            self.id,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.checks,
            self.failures,
            self.worst,
            self.seconds,
            self.detail
        )
    }
}

/// Counts checks and remembers the first failure.
#[derive(Default)]
struct Tally {
    checks: usize,
    failures: usize,
    worst: f64,
    /// The first few failure messages.
    failure_log: Vec<String>,
    notes: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, metric: f64, what: impl FnOnce() -> String) {
        self.checks += 1;
        if metric.is_finite() {
            self.worst = self.worst.max(metric);
        }
        if !ok {
            self.failures += 1;
            if self.failure_log.len() < 3 {
                self.failure_log.push(what());
            }
        }
    }

    fn error(&mut self, context: &str, e: Error) {
        self.check(false, 0.0, || format!("{context}: {e}"));
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn finish(self, id: usize, start: Instant) -> SuiteOutcome {
        let mut detail = self.notes.join("; ");
        if !self.failure_log.is_empty() {
            if !detail.is_empty() {
                detail.push_str("; ");
            }
            detail.push_str("failures: ");
            detail.push_str(&self.failure_log.join(" | "));
        }
        SuiteOutcome {
            id,
            name: SUITES[id - 1].to_string(),
            passed: self.failures == 0 && self.checks > 0,
            checks: self.checks,
            failures: self.failures,
            worst: self.worst,
            detail,
            seconds: start.elapsed().as_secs_f64(),
        }
    }
}

/// Runs one suite by name or 1-based number.
pub fn run_suite(name: &str, seed: u64) -> Result<SuiteOutcome> {
    let id = match name.parse::<usize>() {
        Ok(i) if (1..=SUITES.len()).contains(&i) => i,
        _ => SUITES
            .iter()
            .position(|s| *s == name)
            .map(|i| i + 1)
            .ok_or_else(|| Error::Precondition(format!("unknown suite {name:?}; expected one of {}", SUITES.join(", "))))?,
    };
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(id as u64));
    let mut t = Tally::default();
    match id {
        1 => pythagoras(&mut rng, &mut t),
        2 => optimality(&mut rng, &mut t),
        3 => maxent_oracle(&mut rng, &mut t),
        4 => calculus(&mut rng, &mut t),
        5 => limits(&mut rng, &mut t),
        6 => pinsker(&mut rng, &mut t),
        7 => closures(&mut t),
        8 => topology(&mut rng, &mut t),
        9 => lattice_oracle(&mut rng, &mut t),
        _ => representation(&mut rng, &mut t),
    }
    Ok(t.finish(id, start))
}

pub fn run_all(seed: u64) -> Vec<SuiteOutcome> {
    SUITES.iter().map(|s| run_suite(s, seed).expect("known suite")).collect()
}

fn named_families() -> [(&'static str, ExpFamilySpec); 2] {
    [("staffelberg", families::staffelberg()), ("swallow", families::swallow())]
}

/// A random state whose rank profile is full with probability ½ and otherwise random.
fn random_rank_state(rng: &mut ChaCha8Rng, spec: &AlgebraSpec) -> State {
    if rng.gen_bool(0.5) {
        return random_state_with(rng, spec, None).expect("valid profile");
    }
    loop {
        let profile: Vec<usize> = spec.blocks().iter().map(|&k| rng.gen_range(0..=k)).collect();
        if profile.iter().any(|&r| r > 0) {
            return random_state_with(rng, spec, Some(&profile)).expect("valid profile");
        }
    }
}

fn gaussian(rng: &mut ChaCha8Rng, k: usize, scale: f64) -> Vec<f64> {
    (0..k).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect()
}

fn algebra(blocks: &[usize]) -> AlgebraSpec {
    AlgebraSpec::new(blocks.to_vec()).expect("valid blocks")
}

/// `σ ∈ cl^rI(ℰ)`: a family member, an e-geodesic limit, or the projection of a low-rank state.
fn closure_member(rng: &mut ChaCha8Rng, fam: &ExpFamilySpec) -> Result<State> {
    let k = fam.k();
    match rng.gen_range(0..3) {
        0 => Ok(gibbs_state(&fam.parameter(&gaussian(rng, k, 2.0))?)),
        1 => {
            let theta = fam.parameter(&gaussian(rng, k, 1.0))?;
            let u = fam.direction(&random_unit_vector(rng, k))?;
            Ok(e_geodesic_limit(&theta, &u)?.0)
        }
        _ => {
            let spec = fam.algebra();
            let profile: Vec<usize> = spec.blocks().iter().map(|&b| rng.gen_range(0..=b.min(1))).collect();
            let profile = if profile.iter().all(|&r| r == 0) { vec![1; spec.num_blocks()] } else { profile };
            let rho = random_state_with(rng, spec, Some(&profile))?;
            Ok(ri_projection(fam, &rho)?.pi)
        }
    }
}

fn pythagoras(rng: &mut ChaCha8Rng, t: &mut Tally) {
    let mut infinite = 0;
    for (name, fam) in named_families() {
        for i in 0..100 {
            let rho = random_rank_state(rng, fam.algebra());
            let sigma = match closure_member(rng, &fam) {
                Ok(s) => s,
                Err(e) => return t.error(&format!("{name} #{i} closure sample"), e),
            };
            match pythagoras_check(&fam, &rho, &sigma) {
                Ok(r) => {
                    if r.s_rho_sigma.is_infinite() {
                        infinite += 1;
                    }
                    t.check(r.gap <= 1e-7, r.gap, || format!("{name} #{i}: gap {:e}", r.gap));
                }
                Err(e) => t.error(&format!("{name} #{i}"), e),
            }
        }
    }
    t.note(format!("{infinite} pairs with S(ρ,σ)=∞"));
}

fn optimality(rng: &mut ChaCha8Rng, t: &mut Tally) {
    let mut ties = 0usize;
    for (name, fam) in named_families() {
        for i in 0..20 {
            let rho = random_rank_state(rng, fam.algebra());
            let proj = match ri_projection(&fam, &rho) {
                Ok(p) => p,
                Err(e) => return t.error(&format!("{name} #{i}"), e),
            };
            let d = proj.distance.value();
            let params: Vec<Vec<f64>> = (0..10_000)
                .map(|_| {
                    let r = 10f64.powf(rng.gen_range(-1.0..1.3));
                    random_unit_vector(rng, fam.k()).into_iter().map(|x| r * x).collect()
                })
                .collect();
            // Worst violation d − S(ρ,σ) and whether it was at σ ≈ π.
            let results: Vec<(f64, bool)> = params
                .par_iter()
                .map(|l| {
                    let sigma = gibbs_state(&fam.parameter(l).expect("k coefficients"));
                    let s = relative_entropy(&rho, &sigma).expect("same algebra");
                    let excess = match s {
                        ExtReal::Infinite => f64::NEG_INFINITY,
                        ExtReal::Finite(x) => d - x,
                    };
                    (excess, sigma.trace_distance(&proj.pi) <= 1e-6)
                })
                .collect();
            for (excess, near) in results {
                if excess >= 0.0 && near {
                    ties += 1;
                    continue;
                }
                t.check(excess <= 1e-12, excess.max(0.0), || format!("{name} #{i}: S(ρ,σ) below d by {excess:e}"));
            }
        }
    }
    t.note(format!("{ties} samples within 1e-6 of the projection"));
}

fn maxent_oracle(rng: &mut ChaCha8Rng, t: &mut Tally) {
    let (mut interior, mut vertices, mut edges) = (0, 0, 0);
    for n in [4usize, 6] {
        let spec = AlgebraSpec::commutative(n).expect("n ≥ 1");
        for _ in 0..4 {
            let a = DMatrix::from_fn(2, n, |_, _| rng.sample::<f64, _>(StandardNormal));
            let dirs: Vec<HermElem> = (0..2)
                .map(|r| HermElem::diagonal(&spec, &a.row(r).iter().copied().collect::<Vec<_>>()).expect("diagonal"))
                .collect();
            let fam = ExpFamilySpec::linear(dirs).expect("independent");
            for _ in 0..5 {
                let w: Vec<f64> = gaussian(rng, n, 1.5).into_iter().map(f64::exp).collect();
                let z: f64 = w.iter().sum();
                let p: Vec<f64> = w.iter().map(|x| x / z).collect();
                let xi: Vec<f64> = (0..2).map(|r| (0..n).map(|j| a[(r, j)] * p[j]).sum()).collect();
                let (_, h) = oracles::simplex_max_entropy(&a, &p);
                interior += 1;
                match max_entropy(&fam, &xi) {
                    Ok(m) => {
                        let err = (m.entropy - h).abs();
                        t.check(err <= 1e-6, err, || format!("ℂ{n} interior: entropy {} vs oracle {h}", m.entropy));
                    }
                    Err(e) => t.error(&format!("ℂ{n} interior"), e),
                }
            }
            let points: Vec<[f64; 2]> = (0..n).map(|j| [a[(0, j)], a[(1, j)]]).collect();
            for face in oracles::polygon_faces(&points) {
                if face.len() == n || face.len() > 2 {
                    continue;
                }
                let xi: Vec<f64> = (0..2).map(|r| face.iter().map(|&j| a[(r, j)]).sum::<f64>() / face.len() as f64).collect();
                let expected = (face.len() as f64).ln();
                if face.len() == 1 {
                    vertices += 1;
                } else {
                    edges += 1;
                }
                match max_entropy(&fam, &xi) {
                    Ok(m) => {
                        let got: Vec<usize> = m.face.rank_profile().iter().enumerate().filter(|(_, &r)| r == 1).map(|(j, _)| j).collect();
                        let err = (m.entropy - expected).abs().max(m.closed_form_gap());
                        t.check(got == face && err <= 1e-8, err, || format!("ℂ{n} face {face:?}: got {got:?}, entropy {}", m.entropy));
                    }
                    Err(e) => t.error(&format!("ℂ{n} face {face:?}"), e),
                }
            }
        }
    }
    t.note(format!("{interior} interior, {vertices} vertex and {edges} edge mean values"));
}

fn calculus(rng: &mut ChaCha8Rng, t: &mut Tally) {
    let shapes: [&[usize]; 4] = [&[2, 1], &[3], &[1, 1, 1], &[2, 2]];
    for i in 0..100 {
        let spec = algebra(shapes[i % shapes.len()]);
        let theta = random_hermitian_with(rng, &spec, 1.0);
        let u = random_hermitian_with(rng, &spec, 1.0);
        let exact = d_free_energy(&theta, &u).expect("same algebra");
        let fd = oracles::first_difference(free_energy, &theta, &u, 1e-5);
        let err = (exact - fd).abs();
        t.check(err <= 1e-6, err, || format!("dF trial {i}: {exact} vs {fd}"));
    }
    for i in 0..50 {
        let spec = algebra(shapes[i % shapes.len()]);
        let theta = random_hermitian_with(rng, &spec, 1.0);
        let u = random_hermitian_with(rng, &spec, 1.0);
        let v = random_hermitian_with(rng, &spec, 1.0);
        let exact = bkm(&theta, &u, &v).expect("same algebra");
        let fd = oracles::second_difference(free_energy, &theta, &u, &v, 1e-4);
        let err = (exact - fd).abs();
        t.check(err <= 1e-5, err, || format!("bkm trial {i}: {exact} vs {fd}"));
    }
    let mut min_eig = f64::INFINITY;
    for i in 0..20 {
        let spec = algebra(shapes[i % shapes.len()]);
        let dim = spec.real_dim() - 1;
        let k = dim.min(3);
        let theta = random_hermitian_with(rng, &spec, 1.0);
        let dirs: Vec<HermElem> = (0..k).map(|_| random_hermitian_with(rng, &spec, 1.0).traceless()).collect();
        let g = bkm_gram(&theta, &dirs).expect("same algebra");
        let m = g.symmetric_eigen().eigenvalues.min();
        min_eig = min_eig.min(m);
        t.check(m > 0.0, 0.0, || format!("Gram trial {i}: min eigenvalue {m:e}"));
    }
    t.note(format!("smallest Gram eigenvalue {min_eig:.3e}"));
}

/// Random eigenvalues per block with a top gap of at least 0.1; the top is
/// repeated with probability ½.
fn spectrum_with_gap(rng: &mut ChaCha8Rng, spec: &AlgebraSpec) -> (Vec<Vec<f64>>, f64) {
    let mut vals: Vec<Vec<f64>> = spec.blocks().iter().map(|&k| gaussian(rng, k, 1.0)).collect();
    let flat: Vec<(usize, usize)> = vals.iter().enumerate().flat_map(|(b, v)| (0..v.len()).map(move |j| (b, j))).collect();
    let (tb, tj) = *flat.iter().max_by(|x, y| vals[x.0][x.1].total_cmp(&vals[y.0][y.1])).unwrap();
    let top = vals[tb][tj];
    let twin = if rng.gen_bool(0.5) { Some(flat[rng.gen_range(0..flat.len())]) } else { None };
    for &(b, j) in &flat {
        if (b, j) == (tb, tj) {
            continue;
        }
        vals[b][j] = if Some((b, j)) == twin { top } else { vals[b][j].min(top - 0.1) };
    }
    let second = flat.iter().map(|&(b, j)| vals[b][j]).filter(|&v| v < top).fold(f64::NEG_INFINITY, f64::max);
    (vals, top - second)
}

fn limits(rng: &mut ChaCha8Rng, t: &mut Tally) {
    let shapes: [&[usize]; 3] = [&[2, 1], &[3, 2], &[2, 2, 1]];
    for i in 0..30 {
        let spec = algebra(shapes[i % 3]);
        let theta = random_hermitian_with(rng, &spec, 1.0);
        let basis = random_hermitian_with(rng, &spec, 1.0);
        let (vals, gap) = spectrum_with_gap(rng, &spec);
        let (u, w) = oracles::element_with_spectrum(&spec, &basis, &vals);
        let big_t = 1e8 * (1.0 + theta.norm(NormKind::Spectral)).powi(2) / gap;
        let (direct, f_shift) = oracles::direct_gibbs(&theta, &w, &vals, big_t);
        match e_geodesic_limit(&theta, &u) {
            Ok((lim, _)) => {
                let err = (lim.elem() - &direct).norm(NormKind::Trace);
                t.check(err <= 1e-6, err, || format!("e-geodesic limit #{i}: error {err:e}"));
            }
            Err(e) => t.error(&format!("e-geodesic limit #{i}"), e),
        }
        match free_energy_asymptote(&theta, &u) {
            Ok(f) => {
                let err = (f - f_shift).abs();
                t.check(err <= 1e-6, err, || format!("free-energy asymptote #{i}: error {err:e}"));
            }
            Err(e) => t.error(&format!("free-energy asymptote #{i}"), e),
        }
    }
    for i in 0..30 {
        let spec = algebra(shapes[i % 3]);
        let theta = random_hermitian_with(rng, &spec, 1.0);
        let basis = random_hermitian_with(rng, &spec, 1.0);
        let mut vals: Vec<Vec<f64>> = spec
            .blocks()
            .iter()
            .map(|&k| (0..k).map(|_| if rng.gen_bool(0.5) { 0.0 } else { -(0.1 + rng.sample::<f64, _>(StandardNormal).abs()) }).collect())
            .collect();
        if i % 5 != 4 && vals.iter().flatten().all(|&v| v < 0.0) {
            vals[0][0] = 0.0;
        }
        let gap = vals.iter().flatten().filter(|&&v| v < 0.0).fold(f64::INFINITY, |m, &v| m.min(-v));
        let (u, w) = oracles::element_with_spectrum(&spec, &basis, &vals);
        let big_t = 1e8 * (1.0 + theta.norm(NormKind::Spectral)).powi(2) / gap.min(1.0);
        let direct = oracles::direct_exp(&theta, &w, &vals, big_t);
        match exp_limit_nonpositive(&theta, &u) {
            Ok(lim) => {
                let err = (&lim - &direct).norm(NormKind::Trace);
                t.check(err <= 1e-6, err, || format!("exp limit #{i}: error {err:e}"));
            }
            Err(e) => t.error(&format!("exp limit #{i}"), e),
        }
    }
}

fn pinsker(rng: &mut ChaCha8Rng, t: &mut Tally) {
    let shapes: [&[usize]; 4] = [&[2], &[3, 1], &[1, 1, 1, 1], &[2, 2, 1]];
    let mut deficient = 0;
    for i in 0..1000 {
        let spec = algebra(shapes[i % shapes.len()]);
        let rho = random_rank_state(rng, &spec);
        if rho.elem().spec().dim() > crate::spectral::support_projection(rho.elem()).rank() {
            deficient += 1;
        }
        let sigma = if rng.gen_bool(0.8) { random_state_with(rng, &spec, None).expect("full rank") } else { random_rank_state(rng, &spec) };
        match pinsker_slack(&rho, &sigma) {
            Ok(s) => t.check(s >= -1e-8, (-s).max(0.0), || format!("pair {i}: slack {s:e}")),
            Err(e) => t.error(&format!("pair {i}"), e),
        }
    }
    t.note(format!("{deficient} rank-deficient ρ"));
}

/// `t·½(𝟙+σ₂) ⊕ (1−t)`, the vertical segment under the top of the Staffelberg disk.
fn staffelberg_segment(t: f64) -> State {
    let spec = families::staffelberg().algebra().clone();
    let a = (pauli::identity() + pauli::sigma2()).scale(0.5 * t);
    State::new(HermElem::new(spec, vec![a, pauli::scalar(1.0 - t)]).expect("hermitian")).expect("state")
}

fn closures(t: &mut Tally) {
    let fam = families::staffelberg();
    let mid = staffelberg_segment(0.75);
    let closed_form = 0.75 * 1.5f64.ln() - 0.25 * 2f64.ln();
    match entropy_distance(&fam, &mid) {
        Ok(d) => {
            let d = d.value();
            t.check(d >= 0.05, (d - closed_form).abs(), || format!("mid-segment distance {d} below 0.05"));
            t.check((d - closed_form).abs() <= 1e-6, (d - closed_form).abs(), || format!("mid-segment distance {d} vs closed form {closed_form}"));
            // Dense sampling bounds the infimum over the family from above.
            let mut sampled = f64::INFINITY;
            for r in [1.0, 3.0, 10.0, 30.0, 100.0] {
                for j in 0..720 {
                    let phi = std::f64::consts::TAU * j as f64 / 720.0;
                    let sigma = gibbs_state(&fam.parameter(&[r * phi.cos(), r * phi.sin()]).expect("two coefficients"));
                    if let ExtReal::Finite(s) = relative_entropy(&mid, &sigma).expect("same algebra") {
                        sampled = sampled.min(s);
                    }
                }
            }
            t.check(d <= sampled + 1e-9, 0.0, || format!("distance {d} above sampled infimum {sampled}"));
            t.note(format!("mid-segment distance {d:.6}, sampled infimum {sampled:.6}"));
        }
        Err(e) => t.error("mid-segment", e),
    }
    match entropy_distance(&fam, &staffelberg_segment(0.5)) {
        Ok(d) => t.check(d.value() <= 1e-6, d.value(), || format!("top endpoint distance {}", d.value())),
        Err(e) => t.error("top endpoint", e),
    }
    let swallow = families::swallow();
    let budget = LatticeBudget { max_depth: 2, ..LatticeBudget::default() };
    match enumerate_lattice(&swallow, &budget) {
        Ok(report) => {
            let hidden = report.nodes.iter().filter(|n| n.depth() == 2 && !n.exposed).count();
            t.check(hidden > 0, 0.0, || "no depth-2 non-exposed node in the swallow lattice".into());
            t.note(format!("swallow: {} nodes, {hidden} non-exposed at depth 2", report.nodes.len()));
        }
        Err(e) => t.error("swallow lattice", e),
    }
}

fn topology(rng: &mut ChaCha8Rng, t: &mut Tally) {
    const N: usize = crate::topology::DEFAULT_N;
    let eps = 5e-2;
    let verdict = |seq: &StateSequence, rho: &State, mode: Mode| converges(seq, rho, mode, N, eps).map(|r| r.verdict);
    let (seq, rho) = commutative_counterexample();
    match (verdict(&seq, &rho, Mode::Omega(Omega::RI)), verdict(&seq, &rho, Mode::Omega(Omega::I))) {
        (Ok(ri), Ok(i)) => t.check(ri == Verdict::Converging && i == Verdict::Diverging, 0.0, || format!("ℂ² pattern: rI {ri:?}, I {i:?}")),
        (Err(e), _) | (_, Err(e)) => t.error("ℂ² pattern", e),
    }
    let (seq, rho) = qubit_counterexample();
    match (verdict(&seq, &rho, Mode::Norm), omega_converges(&seq, &rho, Omega::RI, N, eps).map(|r| r.verdict)) {
        (Ok(norm), Ok(ri)) => t.check(norm == Verdict::Converging && ri == Verdict::Diverging, 0.0, || format!("Mat(2) pattern: norm {norm:?}, rI {ri:?}")),
        (Err(e), _) | (_, Err(e)) => t.error("Mat(2) pattern", e),
    }
    let shapes: [&[usize]; 3] = [&[2], &[2, 1], &[1, 1, 1]];
    let mut converging = 0;
    for i in 0..200 {
        let spec = algebra(shapes[i % 3]);
        let rho = random_state_with(rng, &spec, None).expect("full rank");
        let states: Vec<State> = match i % 3 {
            0 => {
                let tau: Vec<State> = (0..N).map(|_| random_state_with(rng, &spec, None).expect("full rank")).collect();
                tau.iter().enumerate().map(|(j, s)| rho.mix(1.0 - 1.0 / (j + 1) as f64, s).expect("same algebra")).collect()
            }
            1 => (0..N).map(|_| random_state_with(rng, &spec, None).expect("full rank")).collect(),
            _ => {
                let tau = random_state_with(rng, &spec, None).expect("full rank");
                (0..N).map(|j| rho.mix(1.0 - 1.0 / ((j + 1) as f64).sqrt(), &tau).expect("same algebra")).collect()
            }
        };
        let seq = StateSequence::from_states(states).expect("nonempty");
        match implication_suite(&seq, &rho, N, 1e-3) {
            Ok(r) => {
                if r.i.verdict == Verdict::Converging {
                    converging += 1;
                }
                t.check(r.violations.is_empty(), r.violations.len() as f64, || format!("sequence {i}: {:?}", r.violations));
            }
            Err(e) => t.error(&format!("sequence {i}"), e),
        }
    }
    t.note(format!("{converging} of 200 random sequences I-converging"));
}

fn lattice_oracle(rng: &mut ChaCha8Rng, t: &mut Tally) {
    let n = 5;
    let spec = AlgebraSpec::commutative(n).expect("n ≥ 1");
    let mut total_faces = 0;
    for inst in 0..10 {
        let a = DMatrix::from_fn(2, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let dirs: Vec<HermElem> = (0..2)
            .map(|r| HermElem::diagonal(&spec, &a.row(r).iter().copied().collect::<Vec<_>>()).expect("diagonal"))
            .collect();
        let fam = ExpFamilySpec::linear(dirs).expect("independent");
        let points: Vec<[f64; 2]> = (0..n).map(|j| [a[(0, j)], a[(1, j)]]).collect();
        let expected = oracles::polygon_faces(&points);
        let budget = LatticeBudget { max_depth: 3, seed: rng.gen(), ..LatticeBudget::default() };
        match enumerate_lattice(&fam, &budget) {
            Ok(report) => {
                let mut got: Vec<Vec<usize>> = report
                    .nodes
                    .iter()
                    .map(|node| node.rank_profile().iter().enumerate().filter(|(_, &r)| r == 1).map(|(j, _)| j).collect())
                    .collect();
                got.sort();
                total_faces += expected.len();
                let diff = got.len().abs_diff(expected.len());
                t.check(got == expected, diff as f64, || format!("instance {inst}: {} nodes vs {} faces; got {got:?}, expected {expected:?}", got.len(), expected.len()));
            }
            Err(e) => t.error(&format!("instance {inst}"), e),
        }
    }
    t.note(format!("{total_faces} faces over 10 instances"));
}

fn representation(rng: &mut ChaCha8Rng, t: &mut Tally) {
    let c2 = AlgebraSpec::commutative(2).expect("n ≥ 1");
    for n in [3usize, 5] {
        let phi = EmbeddingSpec::new(vec![1, n - 1], 0).expect("valid multiplicities");
        let image = phi.image_algebra(&c2).expect("image");
        let uniform = State::maximally_mixed(&image);
        match embed_adjoint(&phi, &c2, uniform.elem()) {
            Ok(img) => {
                let want = [1.0 / n as f64, (n - 1) as f64 / n as f64];
                let err = img.diag().iter().zip(want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                t.check(err <= 1e-15, err, || format!("n={n}: Φ*(uniform) = {:?}", img.diag()));
            }
            Err(e) => t.error(&format!("n={n}"), e),
        }
    }
    let cases: [(&[usize], Vec<usize>); 3] = [(&[2, 1], vec![2, 3]), (&[2], vec![3]), (&[1, 2], vec![1, 2])];
    for (blocks, mult) in cases.iter() {
        let source = algebra(blocks);
        let phi = EmbeddingSpec::new(mult.clone(), 0).expect("valid multiplicities");
        let dirs: Vec<HermElem> = (0..2).map(|_| random_hermitian_with(rng, &source, 1.0)).collect();
        let fam = ExpFamilySpec::new(random_hermitian_with(rng, &source, 1.0), dirs).expect("independent");
        let shifted = match shift_family(&phi, &fam) {
            Ok(s) => s,
            Err(e) => return t.error("shift_family", e),
        };
        for _ in 0..10 {
            let la = gaussian(rng, 2, 1.0);
            let lb = gaussian(rng, 2, 1.0);
            let ra = gibbs_state(&shifted.parameter(&la).expect("k coefficients"));
            let rb = gibbs_state(&shifted.parameter(&lb).expect("k coefficients"));
            let pulled = |s: &State| State::new(embed_adjoint(&phi, &source, s.elem()).expect("in image")).expect("state");
            let (pa, pb) = (pulled(&ra), pulled(&rb));
            let orig = gibbs_state(&fam.parameter(&la).expect("k coefficients"));
            let round_trip = pa.trace_distance(&orig);
            t.check(round_trip <= 1e-10, round_trip, || format!("{blocks:?}×{mult:?}: Φ*R(θ̃) off by {round_trip:e}"));
            let s_img = relative_entropy(&ra, &rb).expect("same algebra").value();
            let s_src = relative_entropy(&pa, &pb).expect("same algebra").value();
            let err = (s_img - s_src).abs();
            t.check(err <= 1e-10, err, || format!("{blocks:?}×{mult:?}: S {s_img} vs {s_src}"));
        }
    }
}
