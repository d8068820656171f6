//! Random-instance statistics over a grid of sizes and uniform capacities.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::generate::{random_instance, CapSpec};
use crate::gsp::{odd_cycles, reduce_gsp};
use crate::reduction::compute_gsp;

/// A uniform capacity as a function of `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CapFunction {
    One,
    Quarter,
    Half,
    ThreeQuarters,
    NMinusOne,
}

impl CapFunction {
    pub const ALL: [CapFunction; 5] =
        [CapFunction::One, CapFunction::Quarter, CapFunction::Half, CapFunction::ThreeQuarters, CapFunction::NMinusOne];

    pub fn value(self, n: usize) -> u32 {
        let m = n as u32 - 1;
        match self {
            CapFunction::One => 1,
            CapFunction::Quarter => m.div_ceil(4),
            CapFunction::Half => m.div_ceil(2),
            CapFunction::ThreeQuarters => (3 * m).div_ceil(4),
            CapFunction::NMinusOne => m,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            CapFunction::One => "1",
            CapFunction::Quarter => "ceil((n-1)/4)",
            CapFunction::Half => "ceil((n-1)/2)",
            CapFunction::ThreeQuarters => "ceil((3n-3)/4)",
            CapFunction::NMinusOne => "n-1",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        CapFunction::ALL.into_iter().find(|c| c.label() == s || c.short() == s)
    }

    fn short(self) -> &'static str {
        match self {
            CapFunction::One => "one",
            CapFunction::Quarter => "quarter",
            CapFunction::Half => "half",
            CapFunction::ThreeQuarters => "three-quarters",
            CapFunction::NMinusOne => "n-1",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub ns: Vec<usize>,
    pub caps: Vec<CapFunction>,
    pub samples: usize,
    pub seed_base: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig { ns: (2..=32).step_by(2).collect(), caps: CapFunction::ALL.to_vec(), samples: 1000, seed_base: 0 }
    }
}

/// One generated instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub n: usize,
    pub cap: u32,
    pub seed: u64,
    pub solvable: bool,
    pub odd_cycles: usize,
    pub agents_in_odd: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellStats {
    pub n: usize,
    pub cap_label: String,
    pub cap_value: u32,
    pub samples: usize,
    pub ratio_solvable: f64,
    pub avg_odd_cycles: f64,
    pub avg_agents_in_odd: f64,
    /// Mean optimum of the fewest-half-pairs model, i.e. twice the agents in odd cycles.
    pub avg_base_objective: f64,
    pub wall_ms: f64,
    pub seed_base: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub cells: Vec<CellStats>,
    /// Filled only when requested.
    pub records: Vec<SampleRecord>,
}

pub fn sample(n: usize, cap: u32, seed: u64) -> SampleRecord {
    let inst = random_instance(n, &CapSpec::Uniform(cap), seed).expect("capacity in range");
    let g = reduce_gsp(&inst, &compute_gsp(&inst)).expect("computed GSP is valid");
    let odd = odd_cycles(&g);
    SampleRecord {
        n,
        cap,
        seed,
        solvable: odd.is_empty(),
        odd_cycles: odd.len(),
        agents_in_odd: odd.iter().map(Vec::len).sum(),
    }
}

/// Sample `k` of a cell uses seed `seed_base + k`. Results do not depend on
/// thread scheduling.
pub fn run_experiment(cfg: &ExperimentConfig, keep_records: bool) -> ExperimentReport {
    let mut cells = Vec::new();
    let mut records = Vec::new();
    for &n in &cfg.ns {
        for &cf in &cfg.caps {
            let cap = cf.value(n);
            let t = Instant::now();
            let rows: Vec<SampleRecord> =
                (0..cfg.samples as u64).into_par_iter().map(|k| sample(n, cap, cfg.seed_base + k)).collect();
            let wall_ms = t.elapsed().as_secs_f64() * 1e3;
            let s = rows.len().max(1) as f64;
            let agents: usize = rows.iter().map(|r| r.agents_in_odd).sum();
            cells.push(CellStats {
                n,
                cap_label: cf.label().to_string(),
                cap_value: cap,
                samples: rows.len(),
                ratio_solvable: rows.iter().filter(|r| r.solvable).count() as f64 / s,
                avg_odd_cycles: rows.iter().map(|r| r.odd_cycles).sum::<usize>() as f64 / s,
                avg_agents_in_odd: agents as f64 / s,
                avg_base_objective: 2.0 * agents as f64 / s,
                wall_ms,
                seed_base: cfg.seed_base,
            });
            if keep_records {
                records.extend(rows);
            }
        }
    }
    ExperimentReport { cells, records }
}

pub fn to_csv(cells: &[CellStats]) -> String {
    let mut out = String::from("n,cap_label,cap_value,samples,ratio_solvable,avg_odd_cycles,avg_agents_in_odd,seed_base\n");
    for c in cells {
        let _ = writeln!(
            out,
            "{},{},{},{},{:.4},{:.4},{:.4},{}",
            c.n, c.cap_label, c.cap_value, c.samples, c.ratio_solvable, c.avg_odd_cycles, c.avg_agents_in_odd, c.seed_base
        );
    }
    out
}

/// One row per `n`, one solvability column per capacity function.
pub fn to_pivot_csv(cells: &[CellStats]) -> String {
    let mut labels: Vec<&str> = Vec::new();
    for c in cells {
        if !labels.contains(&c.cap_label.as_str()) {
            labels.push(&c.cap_label);
        }
    }
    let mut out = String::from("n");
    for k in 0..labels.len() {
        let _ = write!(out, ",c{k}");
    }
    out.push('\n');
    let mut ns: Vec<usize> = cells.iter().map(|c| c.n).collect();
    ns.dedup();
    for n in ns {
        let _ = write!(out, "{n}");
        for l in &labels {
            match cells.iter().find(|c| c.n == n && c.cap_label == *l) {
                Some(c) => {
                    let _ = write!(out, ",{:.4}", c.ratio_solvable);
                }
                None => out.push(','),
            }
        }
        out.push('\n');
    }
    out
}

pub fn records_csv(records: &[SampleRecord]) -> String {
    let mut out = String::from("n,cap,seed,solvable,odd_cycles,agents_in_odd\n");
    for r in records {
        let _ = writeln!(out, "{},{},{},{},{},{}", r.n, r.cap, r.seed, r.solvable as u8, r.odd_cycles, r.agents_in_odd);
    }
    out
}
