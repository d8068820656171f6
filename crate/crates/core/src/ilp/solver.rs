//! Depth-first 0/1 branch and bound with bound propagation on range rows.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::{IlpModel, IlpSolution, Sense, SolveStatus, VarKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub node_limit: Option<u64>,
    pub time_limit: Option<Duration>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { node_limit: Some(50_000_000), time_limit: None }
    }
}

const NONE_LO: i64 = i64::MIN / 4;
const NONE_HI: i64 = i64::MAX / 4;
const FREE: u8 = 2;

struct Row {
    terms: Vec<(usize, i64)>,
    lo: i64,
    hi: i64,
    max_abs: i64,
}

/// The model after merging variables tied by `x - y = 0` rows.
struct Compiled {
    rep: Vec<usize>,
    nvars: usize,
    rows: Vec<Row>,
    occ: Vec<Vec<(usize, i64)>>,
    /// Minimisation coefficients.
    obj: Vec<i64>,
    order: Vec<usize>,
    one_first: Vec<bool>,
    trivially_infeasible: bool,
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

fn compile(m: &IlpModel) -> Compiled {
    let nv = m.vars.len();
    let mut parent: Vec<usize> = (0..nv).collect();
    let is_alias = |c: &super::Constraint| {
        c.lo == Some(0)
            && c.hi == Some(0)
            && c.terms.len() == 2
            && c.terms[0].1 == -c.terms[1].1
            && c.terms[0].1.abs() == 1
    };
    for c in m.constraints.iter().filter(|c| is_alias(c)) {
        let (a, b) = (find(&mut parent, c.terms[0].0), find(&mut parent, c.terms[1].0));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let roots: Vec<usize> = (0..nv).map(|v| find(&mut parent, v)).collect();
    let mut slot = vec![usize::MAX; nv];
    let mut nvars = 0;
    for v in 0..nv {
        if roots[v] == v {
            slot[v] = nvars;
            nvars += 1;
        }
    }
    let rep: Vec<usize> = (0..nv).map(|v| slot[roots[v]]).collect();

    let merge = |terms: &[(usize, i64)]| {
        let mut acc: Vec<(usize, i64)> = terms.iter().map(|&(v, a)| (rep[v], a)).collect();
        acc.sort_unstable_by_key(|t| t.0);
        let mut out: Vec<(usize, i64)> = Vec::with_capacity(acc.len());
        for (v, a) in acc {
            match out.last_mut() {
                Some(last) if last.0 == v => last.1 += a,
                _ => out.push((v, a)),
            }
        }
        out.retain(|t| t.1 != 0);
        out
    };

    let mut rows = Vec::new();
    let mut trivially_infeasible = false;
    for c in &m.constraints {
        let terms = merge(&c.terms);
        let (lo, hi) = (c.lo.unwrap_or(NONE_LO), c.hi.unwrap_or(NONE_HI));
        if terms.is_empty() {
            trivially_infeasible |= lo > 0 || hi < 0;
            continue;
        }
        let max_abs = terms.iter().map(|t| t.1.abs()).max().unwrap_or(0);
        rows.push(Row { terms, lo, hi, max_abs });
    }
    let mut occ = vec![Vec::new(); nvars];
    for (r, row) in rows.iter().enumerate() {
        for &(v, a) in &row.terms {
            occ[v].push((r, a));
        }
    }
    let sign = match m.objective.sense {
        Sense::Minimize => 1,
        Sense::Maximize => -1,
    };
    let mut obj = vec![0i64; nvars];
    for (v, a) in merge(&m.objective.terms) {
        obj[v] = sign * a;
    }
    let mut prio = vec![u64::MAX; nvars];
    let mut kind = vec![VarKind::W; nvars];
    for v in 0..nv {
        let p = m.priority.get(v).copied().unwrap_or(u64::MAX);
        if p < prio[rep[v]] || prio[rep[v]] == u64::MAX {
            prio[rep[v]] = p;
            kind[rep[v]] = m.vars[v].kind;
        }
    }
    let mut order: Vec<usize> = (0..nvars).collect();
    order.sort_by_key(|&v| (prio[v], v));
    // Try 1 first, except on half variables that cost objective.
    let one_first = (0..nvars).map(|v| kind[v] != VarKind::H || obj[v] <= 0).collect();
    Compiled { rep, nvars, rows, occ, obj, order, one_first, trivially_infeasible }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Optimize,
    First,
}

enum Stop {
    Budget,
    Found,
}

struct Search<'a> {
    c: &'a Compiled,
    val: Vec<u8>,
    minact: Vec<i64>,
    maxact: Vec<i64>,
    obj_min: i64,
    trail: Vec<usize>,
    queue: Vec<usize>,
    queued: Vec<bool>,
    nodes: u64,
    opts: SolveOptions,
    started: Instant,
    best: Option<(i64, Vec<u8>)>,
}

impl<'a> Search<'a> {
    fn new(c: &'a Compiled, opts: SolveOptions) -> Self {
        let mut minact = vec![0; c.rows.len()];
        let mut maxact = vec![0; c.rows.len()];
        for (r, row) in c.rows.iter().enumerate() {
            for &(_, a) in &row.terms {
                minact[r] += a.min(0);
                maxact[r] += a.max(0);
            }
        }
        let obj_min = c.obj.iter().map(|a| (*a).min(0)).sum();
        Search {
            c,
            val: vec![FREE; c.nvars],
            minact,
            maxact,
            obj_min,
            trail: Vec::new(),
            queue: (0..c.rows.len()).collect(),
            queued: vec![true; c.rows.len()],
            nodes: 0,
            opts,
            started: Instant::now(),
            best: None,
        }
    }

    fn assign(&mut self, v: usize, x: u8) -> bool {
        if self.val[v] != FREE {
            return self.val[v] == x;
        }
        self.val[v] = x;
        self.trail.push(v);
        let xv = x as i64;
        for &(r, a) in &self.c.occ[v] {
            self.minact[r] += xv * a - a.min(0);
            self.maxact[r] += xv * a - a.max(0);
            if !self.queued[r] {
                self.queued[r] = true;
                self.queue.push(r);
            }
        }
        let a = self.c.obj[v];
        self.obj_min += xv * a - a.min(0);
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().unwrap();
            let xv = self.val[v] as i64;
            for &(r, a) in &self.c.occ[v] {
                self.minact[r] -= xv * a - a.min(0);
                self.maxact[r] -= xv * a - a.max(0);
            }
            let a = self.c.obj[v];
            self.obj_min -= xv * a - a.min(0);
            self.val[v] = FREE;
        }
    }

    fn clear_queue(&mut self) {
        for r in self.queue.drain(..) {
            self.queued[r] = false;
        }
    }

    fn propagate(&mut self) -> bool {
        while let Some(r) = self.queue.pop() {
            self.queued[r] = false;
            let row = &self.c.rows[r];
            if self.minact[r] > row.hi || self.maxact[r] < row.lo {
                self.clear_queue();
                return false;
            }
            if row.max_abs <= row.hi - self.minact[r] && row.max_abs <= self.maxact[r] - row.lo {
                continue;
            }
            for k in 0..row.terms.len() {
                let (v, a) = self.c.rows[r].terms[k];
                if self.val[v] != FREE {
                    continue;
                }
                let (lo, hi) = (self.c.rows[r].lo, self.c.rows[r].hi);
                let low_value = if a > 0 { 0 } else { 1 };
                let forced = if a.abs() > hi - self.minact[r] {
                    Some(low_value)
                } else if a.abs() > self.maxact[r] - lo {
                    Some(1 - low_value)
                } else {
                    None
                };
                if let Some(x) = forced {
                    self.assign(v, x);
                    if self.minact[r] > hi || self.maxact[r] < lo {
                        self.clear_queue();
                        return false;
                    }
                }
            }
        }
        true
    }

    fn out_of_budget(&self) -> bool {
        if self.opts.node_limit.is_some_and(|l| self.nodes >= l) {
            return true;
        }
        self.nodes % 1024 == 0 && self.opts.time_limit.is_some_and(|t| self.started.elapsed() >= t)
    }

    fn pruned(&self, mode: Mode) -> bool {
        mode == Mode::Optimize && self.best.as_ref().is_some_and(|(b, _)| self.obj_min >= *b)
    }

    /// Explores the subtree over `order[from..]`.
    fn dfs(&mut self, order: &[usize], from: usize, mode: Mode) -> Result<(), Stop> {
        let Some(pos) = (from..order.len()).find(|&p| self.val[order[p]] == FREE) else {
            if self.best.as_ref().is_none_or(|(b, _)| self.obj_min < *b) {
                self.best = Some((self.obj_min, self.val.clone()));
            }
            return if mode == Mode::First { Err(Stop::Found) } else { Ok(()) };
        };
        self.nodes += 1;
        if self.out_of_budget() {
            return Err(Stop::Budget);
        }
        let v = order[pos];
        let first = if self.c.one_first[v] { 1 } else { 0 };
        for x in [first, 1 - first] {
            let mark = self.trail.len();
            if self.assign(v, x) && self.propagate() && !self.pruned(mode) {
                let r = self.dfs(order, pos + 1, mode);
                if r.is_err() {
                    self.undo(mark);
                    return r;
                }
            }
            self.undo(mark);
        }
        Ok(())
    }

    fn root(&mut self) -> bool {
        self.propagate()
    }

    fn expand(&self, val: &[u8]) -> Vec<bool> {
        self.c.rep.iter().map(|&s| val[s] == 1).collect()
    }
}

/// Proven optimum, infeasibility, or the best point found within budget.
pub fn solve(m: &IlpModel, opts: &SolveOptions) -> IlpSolution {
    let c = compile(m);
    let mut s = Search::new(&c, *opts);
    let mode = if c.obj.iter().all(|&a| a == 0) { Mode::First } else { Mode::Optimize };
    let outcome = if c.trivially_infeasible || !s.root() {
        Ok(())
    } else {
        let order = c.order.clone();
        s.dfs(&order, 0, mode)
    };
    let status = match (outcome, &s.best) {
        (Err(Stop::Budget), _) => SolveStatus::BoundLimit,
        (_, Some(_)) => SolveStatus::Optimal,
        (_, None) => SolveStatus::Infeasible,
    };
    let values = s.best.as_ref().map(|(_, v)| s.expand(v));
    let objective = values.as_ref().map(|v| m.objective_value(v));
    IlpSolution { status, values, objective, nodes: s.nodes }
}

/// Every distinct assignment of `vars` that extends to a feasible point.
/// `None` if the budget runs out.
pub fn enumerate_feasible_projections(m: &IlpModel, vars: &[usize], opts: &SolveOptions) -> Option<BTreeSet<Vec<bool>>> {
    let c = compile(m);
    let mut s = Search::new(&c, *opts);
    let mut out = BTreeSet::new();
    if c.trivially_infeasible || !s.root() {
        return Some(out);
    }
    let proj: BTreeSet<usize> = vars.iter().map(|&v| c.rep[v]).collect();
    let head: Vec<usize> = c.order.iter().copied().filter(|v| proj.contains(v)).collect();
    let tail: Vec<usize> = c.order.iter().copied().filter(|v| !proj.contains(v)).collect();

    fn walk(
        s: &mut Search<'_>,
        head: &[usize],
        tail: &[usize],
        from: usize,
        vars: &[usize],
        out: &mut BTreeSet<Vec<bool>>,
    ) -> Result<(), Stop> {
        let Some(pos) = (from..head.len()).find(|&p| s.val[head[p]] == FREE) else {
            let mark = s.trail.len();
            s.best = None;
            match s.dfs(tail, 0, Mode::First) {
                Err(Stop::Found) => {
                    let full = s.best.take().map(|(_, v)| v).unwrap();
                    out.insert(vars.iter().map(|&v| full[s.c.rep[v]] == 1).collect());
                }
                Err(Stop::Budget) => return Err(Stop::Budget),
                Ok(()) => {}
            }
            s.undo(mark);
            return Ok(());
        };
        s.nodes += 1;
        if s.out_of_budget() {
            return Err(Stop::Budget);
        }
        let v = head[pos];
        for x in [1, 0] {
            let mark = s.trail.len();
            if s.assign(v, x) && s.propagate() {
                let r = walk(s, head, tail, pos + 1, vars, out);
                if r.is_err() {
                    s.undo(mark);
                    return r;
                }
            }
            s.undo(mark);
        }
        Ok(())
    }

    match walk(&mut s, &head, &tail, 0, vars, &mut out) {
        Ok(()) => Some(out),
        Err(_) => None,
    }
}
