//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::Instant;

use common::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stable_fixtures::experiment::{run_experiment, CapFunction, ExperimentConfig};
use stable_fixtures::generate::{random_instance, CapSpec};
use stable_fixtures::gsp::*;
use stable_fixtures::ilp::*;
use stable_fixtures::instance::parse_instance;
use stable_fixtures::nearfeasible::near_feasible;
use stable_fixtures::oracle::{egalitarian_cost_halves, enumerate_stable_half_matchings, enumerate_stable_matchings, OracleLimits};
use stable_fixtures::reduction::{compute_gsp, compute_half_matching_and_gsp};
use stable_fixtures::{AgentId, SfInstance};

type Outcome = Result<String, String>;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn sfgsp(args: &[&str]) -> (Option<i32>, String, f64) {
    let t = Instant::now();
    let o = Command::new(env!("CARGO_BIN_EXE_sfgsp")).args(args).output().expect("binary runs");
    (o.status.code(), String::from_utf8_lossy(&o.stdout).into_owned(), t.elapsed().as_secs_f64())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn golden_fixtures() -> Outcome {
    let mut slowest = 0f64;
    let t4 = fixture("table4.sf");
    let (code, out, secs) = sfgsp(&["gsp", t4.to_str().unwrap(), "--reduced"]);
    slowest = slowest.max(secs);
    ensure(code == Some(0) && out == "( 1 2 3 )\n( 1 4 )\n( 2 4 )\n( 3 5 )\n", || format!("table4 gsp: {out:?}"))?;

    let t3 = fixture("table3.sf");
    let (code, out, secs) = sfgsp(&["solve", t3.to_str().unwrap()]);
    slowest = slowest.max(secs);
    let inst = parse_instance(&std::fs::read_to_string(&t3).unwrap()).unwrap();
    let m = Matching::parse(&out).map_err(|e| e.to_string())?;
    ensure(code == Some(0), || format!("table3 exit {code:?}"))?;
    validate_matching(&inst, &m).map_err(|e| format!("table3 matching: {e}"))?;
    for (a, b) in [(1, 2), (1, 3), (2, 3), (4, 5)] {
        ensure(m.contains(AgentId::from_label(a).unwrap(), AgentId::from_label(b).unwrap()), || {
            format!("table3 matching lacks {{{a},{b}}}")
        })?;
    }

    let mut names = vec!["table4.sf".to_string(), "table10.sf".to_string()];
    names.extend((2..=5).map(|k| format!("table14_k{k}.sf")));
    for name in &names {
        let (code, out, secs) = sfgsp(&["solve", fixture(name).to_str().unwrap()]);
        slowest = slowest.max(secs);
        let mut lines = out.lines();
        ensure(code == Some(2) && lines.next() == Some("UNSOLVABLE"), || format!("{name}: exit {code:?}"))?;
        let cycles = Gsp1::parse(&lines.collect::<Vec<_>>().join("\n")).map_err(|e| e.to_string())?;
        ensure(!odd_cycles(&cycles).is_empty(), || format!("{name}: empty certificate"))?;
    }
    ensure(slowest < 1.0, || format!("slowest run {slowest:.3}s"))?;
    Ok(format!("{} fixtures, slowest {:.0} ms", names.len() + 2, slowest * 1e3))
}

fn oracle_equivalence() -> Outcome {
    let t = Instant::now();
    let mut cases: Vec<(String, SfInstance)> = (0..500u64)
        .map(|seed| {
            let n = 2 + (seed % 5) as usize;
            (format!("seed {seed}"), random_mixed(n, 2, seed))
        })
        .collect();
    for (name, inst) in [
        ("table1", table1()),
        ("table2", table2()),
        ("table3", table3()),
        ("table4", table4()),
        ("table7", table7()),
        ("table9", table9(2)),
        ("table13", table13()),
    ] {
        cases.push((name.to_string(), inst));
    }
    let mut agree = 0;
    for (name, inst) in &cases {
        let solvable = decide_solvable(inst).map_err(|e| format!("{name}: {e}"))?.is_solvable();
        let oracle = !enumerate_stable_matchings(inst, &OracleLimits::default()).map_err(|e| e.to_string())?.is_empty();
        ensure(solvable == oracle, || format!("{name}: decide {solvable}, oracle {oracle}"))?;
        let (hm, g) = compute_half_matching_and_gsp(inst);
        validate_gsp1(inst, &g).map_err(|e| format!("{name}: gsp {e}"))?;
        validate_half_matching(inst, &hm).map_err(|e| format!("{name}: half-matching {e}"))?;
        let derived = half_matching_from_gsp1(&g).map_err(|e| format!("{name}: {e}"))?;
        validate_half_matching(inst, &derived).map_err(|e| format!("{name}: derived half-matching {e}"))?;
        agree += 1;
    }
    let secs = t.elapsed().as_secs_f64();
    ensure(secs < 300.0, || format!("took {secs:.1}s"))?;
    Ok(format!("{agree}/{} agree, {secs:.2}s", cases.len()))
}

fn relabel_fingerprint(inst: &SfInstance, perm: &[usize]) -> (Vec<Vec<AgentId>>, Vec<u32>) {
    let n = inst.n();
    let mut inv = vec![0; n];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    let r = inst.relabel(perm);
    let (hm, g) = compute_half_matching_and_gsp(&r);
    let g = reduce_gsp(&r, &g).expect("computed GSP is valid");
    let back: Vec<Vec<AgentId>> =
        odd_cycles(&g).iter().map(|c| c.iter().map(|a| AgentId::from_index(inv[a.index()])).collect()).collect();
    let alloc = allocation_vector(n, &hm);
    (Gsp1::new(back).cycles().to_vec(), (0..n).map(|i| alloc[perm[i]]).collect())
}

fn invariance() -> Outcome {
    let mut violations = 0;
    let mut with_odd = 0;
    for seed in 0..200u64 {
        let n = 3 + (seed % 10) as usize;
        let inst = random_mixed(n, 4, seed);
        let id: Vec<usize> = (0..n).collect();
        let base = relabel_fingerprint(&inst, &id);
        with_odd += usize::from(!base.0.is_empty());
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcd);
        for _ in 0..3 {
            let mut perm = id.clone();
            perm.shuffle(&mut rng);
            if relabel_fingerprint(&inst, &perm) != base {
                violations += 1;
            }
        }
    }
    ensure(violations == 0, || format!("{violations} violations"))?;
    Ok(format!("200 instances x 3 relabellings, {with_odd} with odd cycles, 0 violations"))
}

fn near_feasible_repair() -> Outcome {
    let t = Instant::now();
    let (mut done, mut seed, mut max_odd) = (0, 0u64, 0);
    while done < 300 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(3..=16);
        let inst = if seed % 2 == 0 { random_mixed(n, 4, seed) } else { random_sr(n, 0.6, seed) };
        seed += 1;
        let g = reduce_gsp(&inst, &compute_gsp(&inst)).map_err(|e| e.to_string())?;
        let odd = odd_cycles(&g).len();
        if odd == 0 {
            continue;
        }
        let r = near_feasible(&inst, &g).map_err(|e| format!("seed {}: {e}", seed - 1))?;
        let mut l1 = 0usize;
        for (&c, &c2) in inst.caps().iter().zip(&r.new_caps) {
            ensure(c.abs_diff(c2) <= 1, || format!("seed {}: capacity {c} -> {c2}", seed - 1))?;
            l1 += c.abs_diff(c2) as usize;
        }
        ensure(r.net_change() == (odd % 2) as i64, || format!("seed {}: net change {}", seed - 1, r.net_change()))?;
        ensure(l1 == odd && 3 * odd <= n, || format!("seed {}: |O| = {odd}, total change {l1}, n = {n}", seed - 1))?;
        let repaired = inst.with_caps(r.new_caps.clone()).map_err(|e| e.to_string())?;
        validate_matching(&repaired, &r.matching).map_err(|e| format!("seed {}: {e}", seed - 1))?;
        max_odd = max_odd.max(odd);
        done += 1;
    }
    let secs = t.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("took {secs:.1}s"))?;
    Ok(format!("300 unsolvable instances from {seed} draws, max |O| = {max_odd}, {secs:.2}s"))
}

fn ilp_equivalence() -> Outcome {
    let opts = SolveOptions::default();
    let mut points = 0;
    for seed in 0..100u64 {
        let n = 2 + (seed % 4) as usize;
        let inst = random_mixed(n, 4, seed);
        let m = build_base_model(&inst);
        let vars: Vec<usize> = inst
            .pairs()
            .flat_map(|(i, j)| [m.var(VarKind::H, i, j).unwrap(), m.var(VarKind::F, i, j).unwrap()])
            .collect();
        let ilp = enumerate_feasible_projections(&m, &vars, &opts).ok_or_else(|| format!("seed {seed}: search limit"))?;
        let oracle = enumerate_stable_half_matchings(&inst, &OracleLimits::default()).map_err(|e| e.to_string())?;
        let mut from_oracle = BTreeSet::new();
        for hm in &oracle {
            let a = half_matching_to_assignment(&inst, &m, hm);
            if let Some(c) = m.first_violated(&a) {
                return Err(format!("seed {seed}: stable half-matching violates {c}"));
            }
            from_oracle.insert(vars.iter().map(|&v| a[v]).collect::<Vec<bool>>());
        }
        ensure(from_oracle.len() == oracle.len() && ilp == from_oracle, || {
            format!("seed {seed}: {} feasible projections, {} stable half-matchings", ilp.len(), oracle.len())
        })?;
        points += ilp.len();
    }
    for seed in 0..100u64 {
        let n = 2 + (seed % 7) as usize;
        let inst = random_mixed(n, 4, seed + 1000);
        let g = reduce_gsp(&inst, &compute_gsp(&inst)).map_err(|e| e.to_string())?;
        let s = solve(&build_base_model(&inst), &opts);
        let want = Ratio::new(2 * odd_length(&g) as i64, 1);
        ensure(s.status == SolveStatus::Optimal && s.objective == Some(want), || {
            format!("seed {}: base optimum {:?}, expected {want}", seed + 1000, s.objective)
        })?;
    }
    Ok(format!("{points} feasible points matched over 100 instances; 100 base optima equal twice the odd length"))
}

fn statistics() -> Outcome {
    let cfg = ExperimentConfig::default();
    let t = Instant::now();
    let cells = run_experiment(&cfg, false).cells;
    let secs = t.elapsed().as_secs_f64();
    let cell = |n: usize, cf: CapFunction| cells.iter().find(|c| c.n == n && c.cap_label == cf.label()).unwrap();
    let r32 = cell(32, CapFunction::One).ratio_solvable;
    ensure((r32 - 0.77).abs() <= 0.04, || format!("ratio at n=32, c=1 is {r32:.4}"))?;
    for c in cells.iter().filter(|c| c.cap_label == CapFunction::NMinusOne.label()) {
        ensure(c.ratio_solvable == 1.0, || format!("n={} c=n-1 ratio {}", c.n, c.ratio_solvable))?;
    }
    for n in cfg.ns.iter().copied().filter(|&n| n >= 14) {
        let one = cell(n, CapFunction::One).ratio_solvable;
        for cf in [CapFunction::Half, CapFunction::ThreeQuarters] {
            let r = cell(n, cf).ratio_solvable;
            ensure(r < one, || format!("n={n}: {} ratio {r:.4} not below c=1 ratio {one:.4}", cf.label()))?;
        }
    }
    let max_odd = cells.iter().map(|c| c.avg_odd_cycles).fold(0.0, f64::max);
    let max_agents = cells.iter().map(|c| c.avg_agents_in_odd).fold(0.0, f64::max);
    ensure(max_odd <= 0.55 && max_agents <= 2.5, || format!("grid maxima {max_odd:.4} cycles, {max_agents:.4} agents"))?;
    ensure(secs < 1800.0, || format!("grid took {secs:.0}s"))?;
    Ok(format!(
        "ratio(32, 1) = {r32:.4}; max mean odd cycles {max_odd:.4}; max mean agents in odd cycles {max_agents:.4}; grid {secs:.1}s"
    ))
}

fn complexity() -> Outcome {
    let sizes = [8usize, 16, 32];
    let reps = [200usize, 50, 10];
    let mut means = Vec::new();
    let mut worst32 = 0f64;
    for (&n, &k) in sizes.iter().zip(&reps) {
        let mut total = 0f64;
        for seed in 0..k as u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7777);
            let caps: Vec<u32> = (0..n).map(|_| rng.gen_range(1..n as u32)).collect();
            let inst = random_instance(n, &CapSpec::PerAgent(caps), seed).map_err(|e| e.to_string())?;
            let t = Instant::now();
            std::hint::black_box(compute_gsp(&inst));
            let s = t.elapsed().as_secs_f64();
            total += s;
            if n == 32 {
                worst32 = worst32.max(s);
            }
        }
        means.push(total / k as f64);
    }
    let xs: Vec<f64> = sizes.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = means.iter().map(|t| t.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 3.0, ys.iter().sum::<f64>() / 3.0);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx) * (x - mx)).sum::<f64>();
    ensure(worst32 < 10.0, || format!("n=32 took {worst32:.2}s"))?;
    ensure(slope <= 4.5, || format!("log-log slope {slope:.2}"))?;
    Ok(format!(
        "mean ms at n=8,16,32: {:.3}, {:.3}, {:.3}; slope {slope:.2}; worst n=32 {:.1} ms",
        means[0] * 1e3,
        means[1] * 1e3,
        means[2] * 1e3,
        worst32 * 1e3
    ))
}

fn egalitarian_bound() -> Outcome {
    let opts = SolveOptions::default();
    for seed in 0..100u64 {
        let n = 2 + (seed % 5) as usize;
        let inst = random_mixed(n, 3, seed + 5000);
        let base_model = build_base_model(&inst);
        let base = solve(&base_model, &opts);
        let base_hm = solution_to_half_matching(&inst, &base_model, &base).map_err(|e| format!("seed {seed}: {e}"))?;
        let egal_model = with_objective(&inst, build_base_model(&inst), ObjectiveKind::Egal);
        let egal = solve(&egal_model, &opts);
        let egal_hm = solution_to_half_matching(&inst, &egal_model, &egal).map_err(|e| format!("seed {seed}: {e}"))?;
        let (e, b) = (egalitarian_cost_halves(&inst, &egal_hm), egalitarian_cost_halves(&inst, &base_hm));
        ensure(e <= b, || format!("seed {seed}: egalitarian cost {e} above base solution's {b}"))?;
        ensure(egal.objective.map(|r| r.as_f64() * 2.0) == Some(e as f64), || format!("seed {seed}: objective mismatch"))?;
    }
    Ok("100 instances; solver wall-time comparison against a commercial solver excluded (not reproducible here)".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("golden fixtures", golden_fixtures),
        ("oracle equivalence", oracle_equivalence),
        ("relabelling invariance", invariance),
        ("near-feasible repair", near_feasible_repair),
        ("ILP equivalence", ilp_equivalence),
        ("statistics", statistics),
        ("complexity", complexity),
        ("egalitarian bound", egalitarian_bound),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS {} {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail}", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
