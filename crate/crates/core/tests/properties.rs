mod common;

use common::*;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stable_fixtures::gsp::*;
use stable_fixtures::instance::{parse_instance, serialize_instance};
use stable_fixtures::oracle::{enumerate_stable_matchings, oracle_report, OracleLimits};
use stable_fixtures::reduction::compute_half_matching_and_gsp;
use stable_fixtures::{AgentId, SfInstance};

/// Odd cycles and allocation vector of `inst`, mapped back through `perm`.
fn fingerprint(inst: &SfInstance, perm: &[usize]) -> (Vec<Vec<AgentId>>, Vec<u32>) {
    let n = inst.n();
    let mut inv = vec![0; n];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    let (hm, g) = compute_half_matching_and_gsp(inst);
    let g = reduce_gsp(inst, &g).unwrap();
    let back: Vec<Vec<AgentId>> =
        odd_cycles(&g).iter().map(|c| c.iter().map(|a| AgentId::from_index(inv[a.index()])).collect()).collect();
    let alloc = allocation_vector(n, &hm);
    (Gsp1::new(back).cycles().to_vec(), (0..n).map(|i| alloc[perm[i]]).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn relabelling_commutes(n in 3usize..11, max_cap in 1u32..5, seed in any::<u64>(), pseed in any::<u64>()) {
        let inst = random_mixed(n, max_cap, seed);
        let id: Vec<usize> = (0..n).collect();
        let mut perm = id.clone();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(pseed));
        prop_assert_eq!(fingerprint(&inst, &id), fingerprint(&inst.relabel(&perm), &perm));
    }

    #[test]
    fn outputs_validate(n in 2usize..13, max_cap in 1u32..6, seed in any::<u64>()) {
        let inst = random_mixed(n, max_cap, seed);
        let (hm, g) = compute_half_matching_and_gsp(&inst);
        prop_assert_eq!(validate_half_matching(&inst, &hm), Ok(()));
        prop_assert_eq!(validate_gsp1(&inst, &g), Ok(()));
        let g2 = gsp2_from_gsp1(&inst, &g).unwrap();
        prop_assert_eq!(validate_gsp2(&inst, &g2), Ok(()));
        prop_assert_eq!(allocation_vector_gsp2(&g2), allocation_vector(n, &hm));
        let r = reduce_gsp(&inst, &g).unwrap();
        prop_assert!(r.is_reduced());
        prop_assert_eq!(validate_gsp1(&inst, &r), Ok(()));
        prop_assert_eq!(allocation_vector_gsp1(n, &r), allocation_vector(n, &hm));
    }

    #[test]
    fn text_round_trip(n in 2usize..10, max_cap in 1u32..4, seed in any::<u64>()) {
        let inst = random_mixed(n, max_cap, seed);
        prop_assert_eq!(&parse_instance(&serialize_instance(&inst)).unwrap(), &inst);
        let g = compute_half_matching_and_gsp(&inst).1;
        prop_assert_eq!(Gsp1::parse(&g.to_text()).unwrap(), g);
    }
}

/// Every stable half-matching gives each agent the same total weight, and
/// solvability agrees with exhaustive search.
#[test]
fn allocation_is_invariant_across_stable_half_matchings() {
    for seed in 0..150 {
        let inst = random_mixed(3 + (seed % 3) as usize, 2, seed);
        let rep = oracle_report(&inst, &OracleLimits::default()).unwrap();
        let (hm, _) = compute_half_matching_and_gsp(&inst);
        assert_eq!(rep.allocation_vectors, vec![allocation_vector(inst.n(), &hm)], "seed {seed}");
        assert_eq!(rep.solvable, decide_solvable(&inst).unwrap().is_solvable(), "seed {seed}");
    }
}

/// A solvable instance's stable matchings all leave the same agents unsaturated.
#[test]
fn unsaturated_agents_are_fixed() {
    for seed in 0..120 {
        let inst = random_sr(7, 0.6, seed);
        let all = enumerate_stable_matchings(&inst, &OracleLimits::default()).unwrap();
        let degs: std::collections::BTreeSet<Vec<u32>> = all
            .iter()
            .map(|m| allocation_vector(inst.n(), &HalfMatching::new([], m.pairs.iter().copied())))
            .collect();
        assert!(degs.len() <= 1, "seed {seed}");
    }
}

#[test]
fn odd_cycles_occupy_at_least_three_agents_each() {
    for seed in 0..200 {
        let n = 3 + (seed % 10) as usize;
        let inst = random_mixed(n, 3, seed);
        let g = reduce_gsp(&inst, &compute_half_matching_and_gsp(&inst).1).unwrap();
        let odd = odd_cycles(&g);
        assert!(3 * odd.len() <= n);
        for c in &odd {
            assert!(c.len() >= 3 && c.len() % 2 == 1);
        }
    }
}
