use entgeo::algebra::random::{random_hermitian, random_state};
use entgeo::algebra::{embed, embed_adjoint, hs_inner, EmbeddingSpec};
use entgeo::entropy::{pinsker_slack, relative_entropy, von_neumann_entropy};
use entgeo::expfam::{free_energy, gibbs_state, invert_mean_chart, mean_value};
use entgeo::lattice::{enumerate_lattice, revalidate, LatticeBudget};
use entgeo::maxent::{max_entropy, ri_projection};
use entgeo::spectral::{eig, eigenvalues, weyl_gap, Compression, Projection};
use entgeo::{families, AlgebraSpec, ExpFamilySpec, HermElem, NormKind, State};
use proptest::prelude::*;

fn shapes() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..=3, 1..=3)
}

fn spec(blocks: &[usize]) -> AlgebraSpec {
    AlgebraSpec::new(blocks.to_vec()).unwrap()
}

/// A rank profile derived from a seed; full rank when `full`.
fn profile(spec: &AlgebraSpec, seed: u64, full: bool) -> Vec<usize> {
    if full {
        return spec.blocks().to_vec();
    }
    let mut p: Vec<usize> = spec.blocks().iter().enumerate().map(|(i, &k)| ((seed >> (2 * i)) as usize) % (k + 1)).collect();
    if p.iter().all(|&r| r == 0) {
        p[0] = 1;
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cauchy_schwarz(blocks in shapes(), s1 in any::<u64>(), s2 in any::<u64>()) {
        let a = spec(&blocks);
        let x = random_hermitian(&a, s1, 1.0);
        let y = random_hermitian(&a, s2, 1.0);
        let ip = hs_inner(&x, &y).unwrap();
        prop_assert!(ip.abs() <= x.norm(NormKind::Two) * y.norm(NormKind::Two) * (1.0 + 1e-12));
    }

    #[test]
    fn norm_ordering(blocks in shapes(), s in any::<u64>()) {
        let x = random_hermitian(&spec(&blocks), s, 2.0);
        let (op, hs, tr) = (x.norm(NormKind::Spectral), x.norm(NormKind::Two), x.norm(NormKind::Trace));
        prop_assert!(op <= hs * (1.0 + 1e-12));
        prop_assert!(hs <= tr * (1.0 + 1e-12));
    }

    #[test]
    fn spectral_form_reconstructs(blocks in shapes(), s in any::<u64>()) {
        let x = random_hermitian(&spec(&blocks), s, 1.0);
        let f = eig(&x);
        prop_assert!(f.reconstruct().approx_eq(&x, 1e-8 * x.max_abs().max(1.0)));
        let total = f.projections.iter().fold(HermElem::zeros(x.spec()), |acc, p| &acc + p.elem());
        prop_assert!(total.approx_eq(&HermElem::identity(x.spec()), 1e-9));
    }

    #[test]
    fn weyl_gap_below_operator_norm(blocks in shapes(), s1 in any::<u64>(), s2 in any::<u64>()) {
        let a = spec(&blocks);
        let x = random_hermitian(&a, s1, 1.0);
        let y = random_hermitian(&a, s2, 1.0);
        prop_assert!(weyl_gap(&x, &y).unwrap() <= (&x - &y).norm(NormKind::Spectral) + 1e-12);
    }

    #[test]
    fn compression_lift_roundtrip(blocks in shapes(), s in any::<u64>(), sp in any::<u64>()) {
        let a = spec(&blocks);
        let prof = profile(&a, sp, false);
        let p = Projection::new(random_state(&a, sp, Some(&prof)).unwrap().elem().clone());
        // A random state is rarely a projection; use its support instead.
        let p = p.unwrap_or_else(|_| entgeo::spectral::support_projection(random_state(&a, sp, Some(&prof)).unwrap().elem()));
        let c = Compression::new(&p).unwrap();
        let x = random_hermitian(&a, s, 1.0);
        let pxp = x.sandwich(p.elem());
        prop_assert!(c.lift(&c.apply(&x).unwrap()).unwrap().approx_eq(&pxp, 1e-10));
    }

    #[test]
    fn embedding_is_multiplicative_and_adjoint(blocks in shapes(), mult_seed in any::<u64>(), s1 in any::<u64>(), s2 in any::<u64>()) {
        let a = spec(&blocks);
        let mult: Vec<usize> = (0..blocks.len()).map(|i| 1 + ((mult_seed >> (3 * i)) as usize) % 3).collect();
        let phi = EmbeddingSpec::new(mult.clone(), (mult_seed % 2) as usize).unwrap();
        let x = random_hermitian(&a, s1, 1.0);
        let y = random_hermitian(&a, s2, 1.0);
        let (ex, ey) = (embed(&phi, &x).unwrap(), embed(&phi, &y).unwrap());
        let lhs = ex.product(&ey);
        let prod_blocks = x.product(&y);
        let rhs = phi.embed_blocks(&prod_blocks).unwrap();
        for (l, r) in lhs.iter().zip(&rhs) {
            prop_assert!((l - r).norm() <= 1e-12 * (1.0 + l.norm()));
        }
        // ⟨Φ(x), Φ(y)⟩ = ⟨x, Φ*Φ(y)⟩.
        let back = embed_adjoint(&phi, &a, &ey).unwrap();
        let l = hs_inner(&ex, &ey).unwrap();
        let r = hs_inner(&x, &back).unwrap();
        prop_assert!((l - r).abs() <= 1e-10 * (1.0 + l.abs()));
    }

    #[test]
    fn pinsker_holds(blocks in shapes(), s1 in any::<u64>(), s2 in any::<u64>(), full in any::<bool>()) {
        let a = spec(&blocks);
        let rho = random_state(&a, s1, Some(&profile(&a, s1, full))).unwrap();
        let sigma = random_state(&a, s2, None).unwrap();
        prop_assert!(pinsker_slack(&rho, &sigma).unwrap() >= -1e-8);
    }

    #[test]
    fn relative_entropy_is_jointly_convex(blocks in shapes(), seeds in any::<[u64; 4]>(), t in 0.0f64..1.0) {
        let a = spec(&blocks);
        let [r1, r2, s1, s2] = seeds.map(|s| random_state(&a, s, None).unwrap());
        let lhs = relative_entropy(&r1.mix(t, &r2).unwrap(), &s1.mix(t, &s2).unwrap()).unwrap().value();
        let rhs = t * relative_entropy(&r1, &s1).unwrap().value() + (1.0 - t) * relative_entropy(&r2, &s2).unwrap().value();
        prop_assert!(lhs <= rhs + 1e-10);
    }

    #[test]
    fn entropy_bounds(blocks in shapes(), s in any::<u64>()) {
        let a = spec(&blocks);
        let rho = random_state(&a, s, Some(&profile(&a, s, false))).unwrap();
        let h = von_neumann_entropy(&rho);
        prop_assert!(h >= -1e-12 && h <= (a.dim() as f64).ln() + 1e-12);
    }

    #[test]
    fn gibbs_state_ignores_identity_shift(blocks in shapes(), s in any::<u64>(), c in -5.0f64..5.0) {
        let a = spec(&blocks);
        let theta = random_hermitian(&a, s, 2.0);
        let shifted = theta.add_scaled(c, &HermElem::identity(&a));
        prop_assert!(gibbs_state(&theta).trace_distance(&gibbs_state(&shifted)) <= 1e-12);
        prop_assert!((free_energy(&shifted) - free_energy(&theta) - c).abs() <= 1e-11);
    }

    #[test]
    fn mean_value_is_affine(s1 in any::<u64>(), s2 in any::<u64>(), t in 0.0f64..1.0) {
        let fam = families::swallow();
        let r1 = random_state(fam.algebra(), s1, None).unwrap();
        let r2 = random_state(fam.algebra(), s2, None).unwrap();
        let m = mean_value(&r1.mix(t, &r2).unwrap(), &fam).unwrap();
        let (m1, m2) = (mean_value(&r1, &fam).unwrap(), mean_value(&r2, &fam).unwrap());
        for i in 0..2 {
            prop_assert!((m.0[i] - t * m1.0[i] - (1.0 - t) * m2.0[i]).abs() <= 1e-13);
        }
    }

    #[test]
    fn chart_roundtrip(l1 in -3.0f64..3.0, l2 in -3.0f64..3.0, staff in any::<bool>()) {
        let fam = if staff { families::staffelberg() } else { families::swallow() };
        let target = gibbs_state(&fam.parameter(&[l1, l2]).unwrap());
        let xi = mean_value(&target, &fam).unwrap();
        let r = invert_mean_chart(&fam, xi.coords()).unwrap();
        prop_assert!(!r.diverged);
        prop_assert!(r.state().trace_distance(&target) <= 1e-8);
    }

    #[test]
    fn projection_is_closest_in_family(s1 in any::<u64>(), l1 in -3.0f64..3.0, l2 in -3.0f64..3.0, full in any::<bool>()) {
        let fam = families::staffelberg();
        let a = fam.algebra().clone();
        let rho = random_state(&a, s1, Some(&profile(&a, s1, full))).unwrap();
        let pr = ri_projection(&fam, &rho).unwrap();
        // The projection sits in the fiber of ρ and is its own projection.
        let m_rho = mean_value(&rho, &fam).unwrap();
        let m_pi = mean_value(&pr.pi, &fam).unwrap();
        prop_assert!(m_rho.distance(&m_pi) <= 1e-8);
        let again = ri_projection(&fam, &pr.pi).unwrap();
        prop_assert!(again.pi.trace_distance(&pr.pi) <= 1e-6);
        prop_assert!(again.distance.value() <= 1e-8);
        // No member of the family is closer to ρ than the projection.
        let sigma = gibbs_state(&fam.parameter(&[l1, l2]).unwrap());
        let d = pr.distance.value();
        let s = relative_entropy(&rho, &sigma).unwrap();
        prop_assert!(s.is_infinite() || d <= s.value() + 1e-10);
    }

    #[test]
    fn max_entropy_dominates_fiber(s in any::<u64>(), n in 3usize..6) {
        let a = AlgebraSpec::commutative(n).unwrap();
        let u1 = random_hermitian(&a, s ^ 0xA5A5, 1.0);
        let u2 = random_hermitian(&a, s ^ 0x5A5A, 1.0);
        let fam = ExpFamilySpec::linear(vec![u1, u2]).unwrap();
        let rho = random_state(&a, s, None).unwrap();
        let xi = mean_value(&rho, &fam).unwrap();
        let m = max_entropy(&fam, xi.coords()).unwrap();
        prop_assert!(m.entropy >= von_neumann_entropy(&rho) - 1e-9);
        prop_assert!(m.closed_form_gap() <= 1e-8);
        prop_assert!(mean_value(&m.rho, &fam).unwrap().distance(&xi) <= 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn lattice_nodes_revalidate(s in any::<u64>()) {
        let a = AlgebraSpec::commutative(4).unwrap();
        let u1 = random_hermitian(&a, s, 1.0);
        let u2 = random_hermitian(&a, s.wrapping_add(1), 1.0);
        let fam = ExpFamilySpec::linear(vec![u1, u2]).unwrap();
        let report = enumerate_lattice(&fam, &LatticeBudget { max_depth: 3, seed: s, ..LatticeBudget::default() }).unwrap();
        for node in &report.nodes {
            prop_assert!(revalidate(node, 1e-9).unwrap());
            let chain: Vec<&Projection> = node.access_sequence.iter().map(|st| &st.parent).chain(std::iter::once(&node.projection)).collect();
            for w in chain.windows(2) {
                prop_assert!(w[1].leq(w[0]) && w[1].rank() < w[0].rank());
            }
        }
    }
}

#[test]
fn states_from_the_same_seed_agree() {
    let a = spec(&[2, 1]);
    let x: State = random_state(&a, 9, None).unwrap();
    let y = random_state(&a, 9, None).unwrap();
    assert!(x.trace_distance(&y) == 0.0);
    assert!(eigenvalues(x.elem()).iter().all(|&v| v > 0.0));
}
