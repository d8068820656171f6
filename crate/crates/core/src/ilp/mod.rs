//! Integer model of stable half-matchings, with objectives, an exact 0/1
//! solver for small instances, and LP-format export.
//!
//! Half weights are scaled by 2 so every coefficient is an integer; the
//! objective keeps a denominator so reported values match the unscaled model.

mod solver;

use std::collections::HashMap;
use std::fmt;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gsp::{validate_half_matching, HalfMatching};
use crate::instance::{AgentId, SfInstance};
use crate::violation::{id, Violation};

pub use solver::{enumerate_feasible_projections, solve, SolveOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VarKind {
    /// Half-matched.
    H,
    /// Fully matched.
    F,
    /// Saturated with partners at least as good as the other endpoint.
    W,
}

impl VarKind {
    fn prefix(self) -> &'static str {
        match self {
            VarKind::H => "h",
            VarKind::F => "f",
            VarKind::W => "w",
        }
    }
}

/// A binary variable for the ordered pair `(i, j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Var {
    pub kind: VarKind,
    pub i: AgentId,
    pub j: AgentId,
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}_{}", self.kind.prefix(), self.i, self.j)
    }
}

/// Which numbered family a constraint belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Capacity,
    Exclusive,
    SymmetryH,
    SymmetryF,
    Cover,
    Saturation,
    RankCutoff,
    Extra,
}

/// `lo <= sum(coef * var) <= hi`; a missing side is unbounded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraint {
    pub name: String,
    pub family: Family,
    pub terms: Vec<(usize, i64)>,
    pub lo: Option<i64>,
    pub hi: Option<i64>,
}

impl Constraint {
    pub fn activity(&self, values: &[bool]) -> i64 {
        self.terms.iter().map(|&(v, a)| if values[v] { a } else { 0 }).sum()
    }

    pub fn holds(&self, values: &[bool]) -> bool {
        let s = self.activity(values);
        self.lo.is_none_or(|lo| s >= lo) && self.hi.is_none_or(|hi| s <= hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Minimize,
    Maximize,
}

/// `sum(coef * var) / denominator`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Objective {
    pub sense: Sense,
    pub terms: Vec<(usize, i64)>,
    pub denominator: i64,
}

/// An exact fraction with positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ratio {
    pub num: i64,
    pub den: i64,
}

impl Ratio {
    pub fn new(num: i64, den: i64) -> Self {
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()).max(1) as i64;
        Ratio { num: num / g, den: den / g }
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectiveKind {
    /// Fewest half-matches, which yields a reduced GSP.
    #[default]
    Reduced,
    Rank1,
    Regret,
    Egal,
}

/// Variables, constraints and one objective.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IlpModel {
    pub n: usize,
    pub vars: Vec<Var>,
    pub constraints: Vec<Constraint>,
    pub objective: Objective,
    /// Branching priority per variable; lower goes first.
    pub priority: Vec<u64>,
    #[serde(skip)]
    index: HashMap<(VarKind, u32, u32), usize>,
}

impl IlpModel {
    pub fn var(&self, kind: VarKind, i: usize, j: usize) -> Option<usize> {
        self.index.get(&(kind, i as u32, j as u32)).copied()
    }

    pub fn add_constraint(&mut self, c: Constraint) {
        self.constraints.push(c);
    }

    pub fn set_objective(&mut self, objective: Objective) {
        self.objective = objective;
    }

    /// Name of the first violated constraint, if any.
    pub fn first_violated(&self, values: &[bool]) -> Option<&str> {
        self.constraints.iter().find(|c| !c.holds(values)).map(|c| c.name.as_str())
    }

    pub fn objective_value(&self, values: &[bool]) -> Ratio {
        let s: i64 = self.objective.terms.iter().map(|&(v, a)| if values[v] { a } else { 0 }).sum();
        Ratio::new(s, self.objective.denominator)
    }
}

/// Ordered pairs `(i, j)`, `i != j`, mutually acceptable, in lexicographic order.
fn ordered_pairs(inst: &SfInstance) -> impl Iterator<Item = (usize, usize)> + '_ {
    let n = inst.n();
    (0..n).flat_map(move |i| (0..n).filter(move |&j| inst.acceptable(i, j)).map(move |j| (i, j)))
}

/// The base model with objective "minimise the number of ordered half pairs".
pub fn build_base_model(inst: &SfInstance) -> IlpModel {
    let n = inst.n();
    let mut vars = Vec::new();
    let mut index = HashMap::new();
    for kind in [VarKind::H, VarKind::F, VarKind::W] {
        for (i, j) in ordered_pairs(inst) {
            index.insert((kind, i as u32, j as u32), vars.len());
            vars.push(Var { kind, i: id(i), j: id(j) });
        }
    }
    let v = |k: VarKind, i: usize, j: usize| index[&(k, i as u32, j as u32)];
    let name = |p: &str, i: usize, j: usize| format!("{p}_{}_{}", i + 1, j + 1);
    let mut cons = Vec::new();

    for i in 0..n {
        let mut terms = Vec::new();
        for &j in inst.prefs(i) {
            terms.push((v(VarKind::H, i, j as usize), 1));
            terms.push((v(VarKind::F, i, j as usize), 2));
        }
        cons.push(Constraint {
            name: format!("cap_{}", i + 1),
            family: Family::Capacity,
            terms,
            lo: None,
            hi: Some(2 * inst.cap(i) as i64),
        });
    }
    for (i, j) in ordered_pairs(inst) {
        cons.push(Constraint {
            name: name("excl", i, j),
            family: Family::Exclusive,
            terms: vec![(v(VarKind::H, i, j), 1), (v(VarKind::F, i, j), 1)],
            lo: None,
            hi: Some(1),
        });
    }
    for (kind, family, p) in [(VarKind::H, Family::SymmetryH, "symh"), (VarKind::F, Family::SymmetryF, "symf")] {
        for (i, j) in inst.pairs() {
            cons.push(Constraint {
                name: name(p, i, j),
                family,
                terms: vec![(v(kind, i, j), 1), (v(kind, j, i), -1)],
                lo: Some(0),
                hi: Some(0),
            });
        }
    }
    for (i, j) in ordered_pairs(inst) {
        cons.push(Constraint {
            name: name("cover", i, j),
            family: Family::Cover,
            terms: vec![(v(VarKind::F, i, j), 1), (v(VarKind::W, i, j), 1), (v(VarKind::W, j, i), 1)],
            lo: Some(1),
            hi: None,
        });
    }
    for (i, j) in ordered_pairs(inst) {
        let r = inst.rank(i, j);
        let mut terms = Vec::new();
        for &k in inst.prefs(i).iter().take(r as usize) {
            terms.push((v(VarKind::H, i, k as usize), 1));
            terms.push((v(VarKind::F, i, k as usize), 2));
        }
        terms.push((v(VarKind::W, i, j), -2 * inst.cap(i) as i64));
        cons.push(Constraint { name: name("sat", i, j), family: Family::Saturation, terms, lo: Some(0), hi: None });
    }

    // Mutual top choices first; full before half; saturation flags last.
    let mut order: Vec<(u32, u32, usize, usize)> =
        inst.pairs().map(|(i, j)| (inst.rank(i, j).min(inst.rank(j, i)), inst.rank(i, j).max(inst.rank(j, i)), i, j)).collect();
    order.sort_unstable();
    let mut priority = vec![u64::MAX; vars.len()];
    for (k, &(_, _, i, j)) in order.iter().enumerate() {
        for (kind, off) in [(VarKind::F, 0), (VarKind::H, 1)] {
            priority[v(kind, i, j)] = 2 * k as u64 + off;
            priority[v(kind, j, i)] = 2 * k as u64 + off;
        }
    }
    let base = 2 * order.len() as u64;
    for (k, (i, j)) in ordered_pairs(inst).enumerate() {
        priority[v(VarKind::W, i, j)] = base + k as u64;
    }

    let objective = Objective {
        sense: Sense::Minimize,
        terms: ordered_pairs(inst).map(|(i, j)| (v(VarKind::H, i, j), 1)).collect(),
        denominator: 1,
    };
    IlpModel { n, vars, constraints: cons, objective, priority, index }
}

/// `2f + h` on every ordered pair `(i, j)` where `j` sits at `i`'s rank `r`.
fn rank_terms(inst: &SfInstance, m: &IlpModel, r: u32) -> Vec<(usize, i64)> {
    let mut t = Vec::new();
    for i in 0..inst.n() {
        if let Some(j) = inst.at_rank(i, r) {
            t.push((m.var(VarKind::F, i, j as usize).unwrap(), 2));
            t.push((m.var(VarKind::H, i, j as usize).unwrap(), 1));
        }
    }
    t
}

/// Replaces the objective of a base model.
pub fn with_objective(inst: &SfInstance, mut m: IlpModel, kind: ObjectiveKind) -> IlpModel {
    let objective = match kind {
        ObjectiveKind::Reduced => build_base_model(inst).objective,
        ObjectiveKind::Rank1 => Objective { sense: Sense::Maximize, terms: rank_terms(inst, &m, 1), denominator: 2 },
        ObjectiveKind::Egal => {
            let mut terms = Vec::new();
            for (i, j) in ordered_pairs(inst) {
                let r = inst.rank(i, j) as i64;
                terms.push((m.var(VarKind::F, i, j).unwrap(), 2 * r));
                terms.push((m.var(VarKind::H, i, j).unwrap(), r));
            }
            Objective { sense: Sense::Minimize, terms, denominator: 2 }
        }
        // Needs the rank found by the sweep; see `solve_min_regret`.
        ObjectiveKind::Regret => Objective { sense: Sense::Minimize, terms: Vec::new(), denominator: 1 },
    };
    m.set_objective(objective);
    m
}

/// Forbids every assignment ranked worse than `r` by the owning agent.
pub fn add_rank_cutoff(inst: &SfInstance, m: &mut IlpModel, r: u32) {
    let mut terms = Vec::new();
    for (i, j) in ordered_pairs(inst) {
        if inst.rank(i, j) > r {
            terms.push((m.var(VarKind::F, i, j).unwrap(), 1));
            terms.push((m.var(VarKind::H, i, j).unwrap(), 1));
        }
    }
    m.add_constraint(Constraint { name: format!("cutoff_{r}"), family: Family::RankCutoff, terms, lo: None, hi: Some(0) });
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    /// Budget exhausted; `values` holds the best assignment found, if any.
    BoundLimit,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IlpSolution {
    pub status: SolveStatus,
    pub values: Option<Vec<bool>>,
    pub objective: Option<Ratio>,
    pub nodes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IlpError {
    #[error("model is infeasible")]
    Infeasible,
    #[error("budget exhausted after {nodes} nodes")]
    BoundLimit { nodes: u64 },
    #[error("assignment violates constraint {0}")]
    ConstraintViolated(String),
    #[error("decoded half-matching is not stable: {0}")]
    NotStable(Violation),
}

/// Reads `h` and `f` off a feasible assignment.
pub fn solution_to_half_matching(inst: &SfInstance, m: &IlpModel, sol: &IlpSolution) -> Result<HalfMatching, IlpError> {
    let values = match (&sol.values, sol.status) {
        (Some(v), SolveStatus::Optimal | SolveStatus::BoundLimit) => v,
        _ => return Err(IlpError::Infeasible),
    };
    assignment_to_half_matching(inst, m, values)
}

pub fn assignment_to_half_matching(inst: &SfInstance, m: &IlpModel, values: &[bool]) -> Result<HalfMatching, IlpError> {
    if let Some(name) = m.first_violated(values) {
        return Err(IlpError::ConstraintViolated(name.to_string()));
    }
    let pick = |kind| inst.pairs().filter(move |&(i, j)| values[m.var(kind, i, j).unwrap()]).map(|(i, j)| (id(i), id(j)));
    let hm = HalfMatching::new(pick(VarKind::H), pick(VarKind::F));
    validate_half_matching(inst, &hm).map_err(IlpError::NotStable)?;
    Ok(hm)
}

/// The assignment a half-matching induces, with `w_ij = 1` exactly when `i`
/// is saturated by partners at least as good as `j`.
pub fn half_matching_to_assignment(inst: &SfInstance, m: &IlpModel, hm: &HalfMatching) -> Vec<bool> {
    let mut values = vec![false; m.vars.len()];
    for (set, kind) in [(&hm.half, VarKind::H), (&hm.full, VarKind::F)] {
        for &(a, b) in set {
            let (i, j) = (a.index(), b.index());
            values[m.var(kind, i, j).unwrap()] = true;
            values[m.var(kind, j, i).unwrap()] = true;
        }
    }
    for i in 0..inst.n() {
        let mut held = 0;
        for &j in inst.prefs(i) {
            held += hm.weight_halves(id(i), id(j as usize));
            if held == 2 * inst.cap(i) {
                values[m.var(VarKind::W, i, j as usize).unwrap()] = true;
            }
        }
    }
    values
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegretResult {
    pub regret: u32,
    pub model: IlpModel,
    pub solution: IlpSolution,
}

/// Smallest cutoff rank admitting a stable half-matching, then the fewest
/// assignments at that rank.
pub fn solve_min_regret(inst: &SfInstance, opts: &SolveOptions) -> Result<RegretResult, IlpError> {
    let max_rank = (0..inst.n()).map(|i| inst.prefs(i).len() as u32).max().unwrap_or(0);
    for r in 1..=max_rank.max(1) {
        let mut m = build_base_model(inst);
        add_rank_cutoff(inst, &mut m, r);
        m.set_objective(Objective { sense: Sense::Minimize, terms: Vec::new(), denominator: 1 });
        let s = solve(&m, opts);
        match s.status {
            SolveStatus::Infeasible => continue,
            SolveStatus::BoundLimit => return Err(IlpError::BoundLimit { nodes: s.nodes }),
            SolveStatus::Optimal => {}
        }
        m.set_objective(Objective { sense: Sense::Minimize, terms: rank_terms(inst, &m, r), denominator: 2 });
        let solution = solve(&m, opts);
        return match solution.status {
            SolveStatus::Optimal => Ok(RegretResult { regret: r, model: m, solution }),
            SolveStatus::BoundLimit => Err(IlpError::BoundLimit { nodes: solution.nodes }),
            SolveStatus::Infeasible => Err(IlpError::Infeasible),
        };
    }
    Err(IlpError::Infeasible)
}

fn write_terms(out: &mut String, m: &IlpModel, terms: &[(usize, i64)], den: i64) {
    if terms.is_empty() {
        out.push_str(" 0");
        return;
    }
    for (k, &(v, a)) in terms.iter().enumerate() {
        let sign = if a < 0 { "-" } else if k > 0 { "+" } else { "" };
        let mag = a.unsigned_abs();
        let coef = if den == 1 || mag % den as u64 == 0 {
            let c = mag / den as u64;
            if c == 1 { String::new() } else { format!("{c} ") }
        } else {
            format!("{} ", mag as f64 / den as f64)
        };
        let _ = write!(out, " {sign}{}{coef}{}", if sign.is_empty() { "" } else { " " }, m.vars[v]);
    }
}

/// The model in CPLEX LP text format. Constraints use the integer scaling;
/// the objective is written unscaled.
pub fn export_lp(m: &IlpModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "\\ stable half-matching model, {} agents", m.n);
    out.push_str(match m.objective.sense {
        Sense::Minimize => "Minimize\n",
        Sense::Maximize => "Maximize\n",
    });
    out.push_str(" obj:");
    write_terms(&mut out, m, &m.objective.terms, m.objective.denominator);
    out.push_str("\nSubject To\n");
    for c in &m.constraints {
        let rows: Vec<(&str, &str, i64)> = match (c.lo, c.hi) {
            (Some(lo), Some(hi)) if lo == hi => vec![("", "=", lo)],
            (Some(lo), Some(hi)) => vec![("_lo", ">=", lo), ("_hi", "<=", hi)],
            (Some(lo), None) => vec![("", ">=", lo)],
            (None, Some(hi)) => vec![("", "<=", hi)],
            (None, None) => vec![],
        };
        for (suffix, op, rhs) in rows {
            let _ = write!(out, " {}{suffix}:", c.name);
            write_terms(&mut out, m, &c.terms, 1);
            let _ = writeln!(out, " {op} {rhs}");
        }
    }
    out.push_str("Binary\n");
    for v in &m.vars {
        let _ = writeln!(out, " {v}");
    }
    out.push_str("End\n");
    out
}
