use std::error::Error;
use std::fs;
use std::io::{self, Read as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use stable_fixtures::cycles::format_cycles;
use stable_fixtures::experiment::{self, CapFunction, ExperimentConfig};
use stable_fixtures::generate::{random_instance, CapSpec};
use stable_fixtures::graph::PreferenceGraph;
use stable_fixtures::gsp::{
    self, allocation_vector, decide_solvable, odd_cycles, reduce_gsp_with, validate_gsp1, validate_gsp2,
    validate_half_matching, validate_matching, EvenSplit, Gsp1, HalfMatching, Matching, Solvability,
};
use stable_fixtures::ilp::{self, ObjectiveKind, SolveOptions, SolveStatus};
use stable_fixtures::instance::{parse_instance, serialize_instance};
use stable_fixtures::nearfeasible::{near_feasible_directed, Direction};
use stable_fixtures::oracle::{oracle_report, OracleLimits};
use stable_fixtures::reduction::{compute_gsp, compute_gsp_traced};
use stable_fixtures::sr::{verify_stable_partition, SrPartition};
use stable_fixtures::SfInstance;

type Res<T> = Result<T, Box<dyn Error>>;

/// Generalised stable partitions for Stable Fixtures instances.
#[derive(Parser)]
#[command(name = "sfgsp", version)]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a random instance with complete lists.
    Gen {
        #[arg(long)]
        n: usize,
        /// Uniform capacity.
        #[arg(long, conflicts_with = "caps", default_value_t = 1)]
        cap: u32,
        /// Per-agent capacities, comma separated.
        #[arg(long, value_delimiter = ',')]
        caps: Option<Vec<u32>>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compute a GSP.
    Gsp {
        /// Instance file, or `-` for stdin.
        file: PathBuf,
        /// Split even cycles into transpositions.
        #[arg(long)]
        reduced: bool,
        #[arg(long, value_enum, default_value_t = SplitArg::Leading)]
        split: SplitArg,
        /// Write every intermediate object of the reduction here.
        #[arg(long)]
        dump_dir: Option<PathBuf>,
    },
    /// Print a stable matching (exit 0) or an odd-cycle certificate (exit 2).
    Solve { file: PathBuf },
    /// Adjust capacities by one on one agent per odd cycle and print a stable matching.
    NearFeasible {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = DirectionArg::Alternate)]
        direction: DirectionArg,
        /// Use this GSP instead of computing one.
        #[arg(long)]
        gsp: Option<PathBuf>,
    },
    /// Solve or export the integer model.
    Ilp {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::Reduced)]
        objective: ObjectiveArg,
        /// Write the model in LP format.
        #[arg(long)]
        export_lp: Option<PathBuf>,
        /// Only export; do not solve.
        #[arg(long, requires = "export_lp")]
        no_solve: bool,
        #[arg(long)]
        node_limit: Option<u64>,
        /// Seconds.
        #[arg(long)]
        time_limit: Option<f64>,
    },
    /// Check a candidate solution, or cross-check against brute force.
    Verify {
        file: PathBuf,
        #[arg(long)]
        gsp: Option<PathBuf>,
        #[arg(long)]
        matching: Option<PathBuf>,
        /// Half-matching in `HALF:` / `FULL:` sections.
        #[arg(long)]
        half: Option<PathBuf>,
        /// Stable partition of a capacity-1 instance.
        #[arg(long)]
        partition: Option<PathBuf>,
        /// Enumerate all stable (half-)matchings and compare with the computed GSP.
        #[arg(long)]
        oracle: bool,
    },
    /// Solvability and odd-cycle statistics on random instances.
    Experiment {
        /// Sizes, comma separated.
        #[arg(long, value_delimiter = ',')]
        ns: Option<Vec<usize>>,
        /// Capacity functions: one, quarter, half, three-quarters, n-1.
        #[arg(long, value_delimiter = ',')]
        caps: Option<Vec<String>>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// One row per n with a column per capacity function.
        #[arg(long)]
        pivot: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write one row per instance here.
        #[arg(long)]
        records: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SplitArg {
    Leading,
    Shifted,
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Alternate,
    IncreaseOnly,
    DecreaseOnly,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Reduced,
    Rank1,
    Regret,
    Egal,
}

fn read_input(path: &Path) -> Res<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn load(path: &Path) -> Res<SfInstance> {
    let text = read_input(path)?;
    parse_instance(&text).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn emit(out: Option<&Path>, text: &str) -> Res<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display()).into()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON values serialise"));
}

fn graph_text(g: &PreferenceGraph) -> String {
    let lists = g.neighbour_lists();
    let mut out = format!("{}\n", lists.len());
    for (v, l) in lists.iter().enumerate() {
        out.push_str(&g.cap(v).to_string());
        for x in l {
            out.push_str(&format!(" {}", x + 1));
        }
        out.push('\n');
    }
    out
}

fn cmd_gen(json: bool, n: usize, cap: u32, caps: Option<Vec<u32>>, seed: u64, output: Option<PathBuf>) -> Res<ExitCode> {
    let spec = match caps {
        Some(c) => CapSpec::PerAgent(c),
        None => CapSpec::Uniform(cap),
    };
    let inst = random_instance(n, &spec, seed)?;
    let text = serialize_instance(&inst);
    if json && output.is_none() {
        print_json(&json!({ "n": n, "seed": seed, "caps": inst.caps(), "instance": text }));
    } else {
        emit(output.as_deref(), &text)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_gsp(json: bool, file: &Path, reduced: bool, split: SplitArg, dump_dir: Option<PathBuf>) -> Res<ExitCode> {
    let inst = load(file)?;
    let trace = compute_gsp_traced(&inst)?;
    let how = match split {
        SplitArg::Leading => EvenSplit::Leading,
        SplitArg::Shifted => EvenSplit::Shifted,
    };
    let g = if reduced { reduce_gsp_with(&inst, &trace.gsp, how)? } else { trace.gsp.clone() };
    if let Some(dir) = dump_dir {
        fs::create_dir_all(&dir)?;
        fs::write(dir.join("instance.sf"), serialize_instance(&inst))?;
        fs::write(dir.join("edge_split.txt"), graph_text(&trace.edge_split))?;
        fs::write(dir.join("vertex_split.txt"), graph_text(&trace.vertex_split))?;
        fs::write(dir.join("partition.txt"), trace.partition.to_text())?;
        fs::write(dir.join("split_half_matching.txt"), trace.split_matching.to_text())?;
        fs::write(dir.join("half_matching.txt"), trace.half_matching.to_text())?;
        fs::write(dir.join("gsp2.json"), serde_json::to_string_pretty(&trace.gsp2)?)?;
        fs::write(dir.join("gsp.txt"), g.to_text())?;
    }
    if json {
        let alloc = allocation_vector(inst.n(), &trace.half_matching);
        print_json(&json!({
            "cycles": g.cycles(),
            "odd_cycles": odd_cycles(&g),
            "reduced": g.is_reduced(),
            "half_matching": trace.half_matching,
            "allocation_halves": alloc,
        }));
    } else {
        print!("{}", g.to_text());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_solve(json: bool, file: &Path) -> Res<ExitCode> {
    let inst = load(file)?;
    let verdict = decide_solvable(&inst)?;
    if json {
        print_json(&serde_json::to_value(&verdict)?);
    }
    match verdict {
        Solvability::Solvable { matching } => {
            if !json {
                print!("{}", matching.to_text());
            }
            Ok(ExitCode::SUCCESS)
        }
        Solvability::Unsolvable { odd_cycles } => {
            if !json {
                println!("UNSOLVABLE");
                print!("{}", format_cycles(&odd_cycles));
            }
            Ok(ExitCode::from(2))
        }
    }
}

fn cmd_near_feasible(json: bool, file: &Path, direction: DirectionArg, gsp_file: Option<PathBuf>) -> Res<ExitCode> {
    let inst = load(file)?;
    let g = match gsp_file {
        Some(p) => Gsp1::parse(&read_input(&p)?)?,
        None => compute_gsp(&inst),
    };
    let dir = match direction {
        DirectionArg::Alternate => Direction::Alternate,
        DirectionArg::IncreaseOnly => Direction::IncreaseOnly,
        DirectionArg::DecreaseOnly => Direction::DecreaseOnly,
    };
    let r = near_feasible_directed(&inst, &g, dir)?;
    if json {
        print_json(&serde_json::to_value(&r)?);
        return Ok(ExitCode::SUCCESS);
    }
    println!("# capacity changes");
    for m in &r.modified {
        let i = m.agent.index();
        println!("{}: {} -> {} ({:+})", m.agent, inst.cap(i), r.new_caps[i], m.delta);
    }
    println!("# capacities");
    println!("{}", r.new_caps.iter().map(u32::to_string).collect::<Vec<_>>().join(" "));
    println!("# matching");
    print!("{}", r.matching.to_text());
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_ilp(
    json: bool,
    file: &Path,
    objective: ObjectiveArg,
    export_lp: Option<PathBuf>,
    no_solve: bool,
    node_limit: Option<u64>,
    time_limit: Option<f64>,
) -> Res<ExitCode> {
    let inst = load(file)?;
    let opts = SolveOptions {
        node_limit: node_limit.or(SolveOptions::default().node_limit),
        time_limit: time_limit.map(Duration::from_secs_f64),
    };
    let kind = match objective {
        ObjectiveArg::Reduced => ObjectiveKind::Reduced,
        ObjectiveArg::Rank1 => ObjectiveKind::Rank1,
        ObjectiveArg::Regret => ObjectiveKind::Regret,
        ObjectiveArg::Egal => ObjectiveKind::Egal,
    };
    let (model, solution, regret) = if kind == ObjectiveKind::Regret {
        if no_solve {
            return Err("the regret objective needs the rank sweep; export is available after solving".into());
        }
        let r = ilp::solve_min_regret(&inst, &opts)?;
        (r.model, Some(r.solution), Some(r.regret))
    } else {
        let m = ilp::with_objective(&inst, ilp::build_base_model(&inst), kind);
        let s = (!no_solve).then(|| ilp::solve(&m, &opts));
        (m, s, None)
    };
    if let Some(p) = &export_lp {
        fs::write(p, ilp::export_lp(&model)).map_err(|e| format!("{}: {e}", p.display()))?;
    }
    let Some(sol) = solution else {
        return Ok(ExitCode::SUCCESS);
    };
    let hm = match sol.status {
        SolveStatus::Infeasible => None,
        _ => Some(ilp::solution_to_half_matching(&inst, &model, &sol)?),
    };
    if json {
        print_json(&json!({
            "status": sol.status,
            "objective": sol.objective.map(|r| r.to_string()),
            "regret": regret,
            "nodes": sol.nodes,
            "half_matching": hm,
        }));
    } else {
        let status = serde_json::to_value(sol.status)?;
        println!("status {}", status.as_str().unwrap_or("?"));
        if let Some(r) = regret {
            println!("regret {r}");
        }
        if let Some(o) = sol.objective {
            println!("objective {o}");
        }
        println!("nodes {}", sol.nodes);
        if let Some(hm) = &hm {
            print!("{}", hm.to_text());
        }
    }
    Ok(match sol.status {
        SolveStatus::Optimal => ExitCode::SUCCESS,
        _ => ExitCode::from(1),
    })
}

#[derive(Default)]
struct Checks {
    lines: Vec<(String, Result<(), String>)>,
}

impl Checks {
    fn add(&mut self, what: &str, r: Result<(), String>) {
        self.lines.push((what.to_string(), r));
    }
}

fn cmd_verify(
    json: bool,
    file: &Path,
    gsp_file: Option<PathBuf>,
    matching: Option<PathBuf>,
    half: Option<PathBuf>,
    partition: Option<PathBuf>,
    oracle: bool,
) -> Res<ExitCode> {
    let inst = load(file)?;
    let mut checks = Checks::default();
    let mut report = None;
    if let Some(p) = gsp_file {
        let g = Gsp1::parse(&read_input(&p)?)?;
        checks.add("gsp1", validate_gsp1(&inst, &g).map_err(|v| v.to_string()));
        if let Ok(g2) = gsp::gsp2_from_gsp1(&inst, &g) {
            checks.add("gsp2", validate_gsp2(&inst, &g2).map_err(|v| v.to_string()));
        }
    }
    if let Some(p) = matching {
        let m = Matching::parse(&read_input(&p)?)?;
        checks.add("matching", validate_matching(&inst, &m).map_err(|v| v.to_string()));
    }
    if let Some(p) = half {
        let hm = HalfMatching::parse(&read_input(&p)?)?;
        checks.add("half-matching", validate_half_matching(&inst, &hm).map_err(|v| v.to_string()));
    }
    if let Some(p) = partition {
        let cycles = stable_fixtures::cycles::parse_cycles(&read_input(&p)?)?;
        let r = SrPartition::from_cycles(inst.n(), cycles).and_then(|part| verify_stable_partition(&inst, &part));
        checks.add("stable-partition", r.map_err(|v| v.to_string()));
    }
    if oracle {
        let rep = oracle_report(&inst, &OracleLimits::default())?;
        let verdict = decide_solvable(&inst)?;
        checks.add(
            "oracle-solvability",
            if verdict.is_solvable() == rep.solvable {
                Ok(())
            } else {
                Err(format!("computed {} but brute force says {}", verdict.is_solvable(), rep.solvable))
            },
        );
        let (hm, _) = stable_fixtures::reduction::compute_half_matching_and_gsp(&inst);
        let alloc = allocation_vector(inst.n(), &hm);
        checks.add(
            "oracle-allocation",
            if rep.allocation_vectors == [alloc.clone()] {
                Ok(())
            } else {
                Err(format!("computed {alloc:?}, brute force found {:?}", rep.allocation_vectors))
            },
        );
        report = Some(rep);
    }
    if checks.lines.is_empty() {
        return Err("nothing to verify: pass --gsp, --matching, --half, --partition or --oracle".into());
    }
    let ok = checks.lines.iter().all(|(_, r)| r.is_ok());
    if json {
        let items: Vec<_> = checks
            .lines
            .iter()
            .map(|(w, r)| json!({ "check": w, "ok": r.is_ok(), "violation": r.as_ref().err() }))
            .collect();
        print_json(&json!({ "ok": ok, "checks": items, "oracle": report }));
    } else {
        for (w, r) in &checks.lines {
            match r {
                Ok(()) => println!("{w}: ok"),
                Err(e) => println!("{w}: FAIL {e}"),
            }
        }
        if let Some(rep) = report {
            println!("stable matchings: {}", rep.stable_matchings.len());
            println!("stable half-matchings: {}", rep.stable_half_matchings.len());
            if let Some(c) = rep.min_egalitarian_cost_halves {
                println!("min egalitarian cost: {}", gsp::format_halves(c as u32));
            }
            if let Some(r) = rep.min_regret {
                println!("min regret: {r}");
            }
        }
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

#[allow(clippy::too_many_arguments)]
fn cmd_experiment(
    json: bool,
    ns: Option<Vec<usize>>,
    caps: Option<Vec<String>>,
    samples: usize,
    seed: u64,
    pivot: bool,
    output: Option<PathBuf>,
    records: Option<PathBuf>,
) -> Res<ExitCode> {
    let mut cfg = ExperimentConfig { samples, seed_base: seed, ..Default::default() };
    if let Some(ns) = ns {
        if let Some(bad) = ns.iter().find(|&&n| n < 2) {
            return Err(format!("n = {bad} is too small; need at least 2 agents").into());
        }
        cfg.ns = ns;
    }
    if let Some(labels) = caps {
        cfg.caps = labels
            .iter()
            .map(|l| CapFunction::parse(l).ok_or_else(|| format!("unknown capacity function `{l}`")))
            .collect::<Result<_, _>>()?;
    }
    let report = experiment::run_experiment(&cfg, records.is_some());
    if let Some(p) = &records {
        fs::write(p, experiment::records_csv(&report.records))?;
    }
    let text = if json {
        serde_json::to_string_pretty(&report.cells)? + "\n"
    } else if pivot {
        experiment::to_pivot_csv(&report.cells)
    } else {
        experiment::to_csv(&report.cells)
    };
    emit(output.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Res<ExitCode> {
    let json = cli.json;
    match cli.cmd {
        Cmd::Gen { n, cap, caps, seed, output } => cmd_gen(json, n, cap, caps, seed, output),
        Cmd::Gsp { file, reduced, split, dump_dir } => cmd_gsp(json, &file, reduced, split, dump_dir),
        Cmd::Solve { file } => cmd_solve(json, &file),
        Cmd::NearFeasible { file, direction, gsp } => cmd_near_feasible(json, &file, direction, gsp),
        Cmd::Ilp { file, objective, export_lp, no_solve, node_limit, time_limit } => {
            cmd_ilp(json, &file, objective, export_lp, no_solve, node_limit, time_limit)
        }
        Cmd::Verify { file, gsp, matching, half, partition, oracle } => {
            cmd_verify(json, &file, gsp, matching, half, partition, oracle)
        }
        Cmd::Experiment { ns, caps, samples, seed, pivot, output, records } => {
            cmd_experiment(json, ns, caps, samples, seed, pivot, output, records)
        }
    }
}

fn main() -> ExitCode {
    // Exit code 2 is reserved for "unsolvable", so usage errors map to 1.
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
