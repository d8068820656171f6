#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stable_fixtures::instance::from_labels;
use stable_fixtures::SfInstance;

/// Random roommates instance whose acceptability graph keeps each pair with probability `p`.
pub fn random_sr(n: usize, p: f64, seed: u64) -> SfInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lists = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                lists[i].push(j as u32);
                lists[j].push(i as u32);
            }
        }
    }
    for l in &mut lists {
        l.shuffle(&mut rng);
    }
    SfInstance::new_incomplete(lists, vec![1; n]).unwrap()
}

pub fn labels(v: &[u32]) -> Vec<stable_fixtures::AgentId> {
    v.iter().map(|&x| stable_fixtures::AgentId::from_label(x).unwrap()).collect()
}

pub fn table1() -> SfInstance {
    from_labels(
        &[&[2, 5, 3, 4, 6], &[5, 3, 1, 6, 4], &[4, 2, 6, 1, 5], &[1, 2, 5, 3, 6], &[6, 2, 1, 4, 3], &[5, 3, 2, 4, 1]],
        &[1; 6],
    )
    .unwrap()
}

pub fn table2() -> SfInstance {
    from_labels(
        &[&[2, 5, 3, 4, 6], &[4, 3, 1, 6, 5], &[5, 4, 1, 2, 6], &[1, 5, 6, 2, 3], &[6, 2, 4, 1, 3], &[1, 2, 3, 4, 5]],
        &[1; 6],
    )
    .unwrap()
}

pub fn table3() -> SfInstance {
    from_labels(&[&[2, 3, 4, 5], &[1, 3, 5, 4], &[1, 2, 4, 5], &[1, 2, 3, 5], &[2, 1, 3, 4]], &[2; 5]).unwrap()
}

pub fn table4() -> SfInstance {
    from_labels(&[&[2, 4, 3, 5], &[4, 3, 1, 5], &[1, 5, 2, 4], &[3, 1, 2, 5], &[3, 1, 2, 4]], &[2, 2, 2, 2, 1]).unwrap()
}

pub fn table7() -> SfInstance {
    from_labels(&[&[2, 3, 4, 5], &[3, 1, 4, 5], &[2, 1, 4, 5], &[5, 1, 2, 3], &[4, 1, 2, 3]], &[4, 1, 1, 1, 1]).unwrap()
}

pub fn table9(c1: u32) -> SfInstance {
    from_labels(&[&[2, 4, 3], &[3, 1, 4], &[4, 2, 1], &[1, 3, 2]], &[c1, 1, 1, 1]).unwrap()
}

/// The lists exactly as printed: incomplete, capacity 2 everywhere.
pub fn table10_incomplete() -> SfInstance {
    from_labels(
        &[&[2, 3], &[3, 1], &[1, 2], &[5, 6, 8], &[4, 7, 9], &[7, 8, 4], &[6, 9, 5], &[9, 4, 6], &[8, 5, 7]],
        &[2; 9],
    )
    .unwrap()
}

/// The printed lists completed by appending the missing agents in ascending order.
pub fn table10() -> SfInstance {
    let inc = table10_incomplete();
    let n = inc.n();
    let prefs: Vec<Vec<u32>> = (0..n)
        .map(|i| {
            let mut l = inc.prefs(i).to_vec();
            let missing: Vec<u32> = (0..n as u32).filter(|&j| j as usize != i && !l.contains(&j)).collect();
            l.extend(missing);
            l
        })
        .collect();
    SfInstance::new(prefs, vec![2; n]).unwrap()
}

pub fn table13() -> SfInstance {
    from_labels(&[&[2, 3], &[3, 1], &[1, 2]], &[2; 3]).unwrap()
}

/// The unsolvable family with `n = k + 3` and capacity `k + 1`. Rows of
/// `a_1..a_k` end with the other low agents in ascending order.
pub fn table14(k: usize) -> SfInstance {
    let n = k + 3;
    let (x, y, z) = (k as u32, k as u32 + 1, k as u32 + 2);
    let low = |skip: usize| (0..k as u32).filter(move |&j| j as usize != skip);
    let mut prefs = Vec::new();
    for i in 0..k {
        let mut l = vec![x, y, z];
        l.extend(low(i));
        prefs.push(l);
    }
    for (a, b) in [(y, z), (z, x), (x, y)] {
        let mut l: Vec<u32> = low(usize::MAX).collect();
        l.extend([a, b]);
        prefs.push(l);
    }
    SfInstance::new(prefs, vec![k as u32 + 1; n]).unwrap()
}

/// Complete random instance with each capacity drawn from `1..=max_cap.min(n - 1)`.
pub fn random_mixed(n: usize, max_cap: u32, seed: u64) -> SfInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_cafe);
    let top = max_cap.min(n as u32 - 1);
    let caps: Vec<u32> = (0..n).map(|_| rng.gen_range(1..=top)).collect();
    stable_fixtures::generate::random_instance(n, &stable_fixtures::generate::CapSpec::PerAgent(caps), seed).unwrap()
}

pub fn odd_length(g: &stable_fixtures::gsp::Gsp1) -> usize {
    stable_fixtures::gsp::odd_cycles(g).iter().map(Vec::len).sum()
}
