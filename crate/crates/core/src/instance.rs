//! Stable Fixtures instances: agents, strict preference lists and capacities.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// An agent. Stored 0-based, displayed and serialized 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "u32", try_from = "u32")]
pub struct AgentId(u32);

impl AgentId {
    pub fn from_index(index: usize) -> Self {
        AgentId(index as u32)
    }

    /// Builds an id from its 1-based label.
    pub fn from_label(label: u32) -> Option<Self> {
        label.checked_sub(1).map(AgentId)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn label(self) -> u32 {
        self.0 + 1
    }
}

impl From<AgentId> for u32 {
    fn from(a: AgentId) -> u32 {
        a.label()
    }
}

impl TryFrom<u32> for AgentId {
    type Error = String;

    fn try_from(label: u32) -> Result<Self, Self::Error> {
        AgentId::from_label(label).ok_or_else(|| "agent ids are 1-based".to_string())
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// Position in a preference list, 1 = best. Self is ranked `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Rank(pub u32);

pub(crate) const UNACCEPTABLE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("instance needs at least one agent")]
    Empty,
    #[error("expected {expected} preference lists, found {found}")]
    WrongAgentCount { expected: usize, found: usize },
    #[error("agent {agent}: capacity {cap} outside [{min}, {max}]")]
    CapacityOutOfRange { agent: u32, cap: u32, min: u32, max: u32 },
    #[error("agent {agent}: lists agent {other}, which does not exist")]
    DanglingAgent { agent: u32, other: u32 },
    #[error("agent {agent}: lists itself")]
    SelfInList { agent: u32 },
    #[error("agent {agent}: lists agent {other} twice")]
    DuplicateEntry { agent: u32, other: u32 },
    #[error("agent {agent}: list has {found} entries, a complete list needs {expected}")]
    IncompleteList { agent: u32, expected: usize, found: usize },
    #[error("agent {agent} lists {other} but not the other way round")]
    NotMutual { agent: u32, other: u32 },
    #[error("capacity vector has length {found}, expected {expected}")]
    CapsLength { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Invalid {
        line: usize,
        #[source]
        source: InstanceError,
    },
    #[error("unexpected end of input: expected {expected} agent lines, found {found}")]
    Truncated { expected: usize, found: usize },
}

/// An SF instance `(A, >, c)`.
///
/// The rank table is dense (`n * n`), so lookups are O(1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SfInstance {
    prefs: Vec<Vec<u32>>,
    caps: Vec<u32>,
    rank: Vec<u32>,
    complete: bool,
}

impl SfInstance {
    /// A complete SF instance. Lists hold 0-based ids; caps must lie in `1..=n-1`.
    pub fn new(prefs: Vec<Vec<u32>>, caps: Vec<u32>) -> Result<Self, InstanceError> {
        let inst = Self::build(prefs, caps, false)?;
        let n = inst.n();
        for (i, l) in inst.prefs.iter().enumerate() {
            if l.len() != n - 1 {
                return Err(InstanceError::IncompleteList {
                    agent: i as u32 + 1,
                    expected: n - 1,
                    found: l.len(),
                });
            }
        }
        for (i, &c) in inst.caps.iter().enumerate() {
            if c < 1 || c as usize > n - 1 {
                return Err(InstanceError::CapacityOutOfRange {
                    agent: i as u32 + 1,
                    cap: c,
                    min: 1,
                    max: n as u32 - 1,
                });
            }
        }
        Ok(inst)
    }

    /// An instance with possibly incomplete lists. Acceptability must be
    /// mutual; caps may be 0 (the agent never matches).
    pub fn new_incomplete(prefs: Vec<Vec<u32>>, caps: Vec<u32>) -> Result<Self, InstanceError> {
        Self::build(prefs, caps, true)
    }

    fn build(prefs: Vec<Vec<u32>>, caps: Vec<u32>, allow_zero: bool) -> Result<Self, InstanceError> {
        let n = prefs.len();
        if n == 0 {
            return Err(InstanceError::Empty);
        }
        if caps.len() != n {
            return Err(InstanceError::CapsLength { expected: n, found: caps.len() });
        }
        let mut rank = vec![UNACCEPTABLE; n * n];
        for (i, l) in prefs.iter().enumerate() {
            for (pos, &j) in l.iter().enumerate() {
                let j = j as usize;
                if j >= n {
                    return Err(InstanceError::DanglingAgent { agent: i as u32 + 1, other: j as u32 + 1 });
                }
                if j == i {
                    return Err(InstanceError::SelfInList { agent: i as u32 + 1 });
                }
                if rank[i * n + j] != UNACCEPTABLE {
                    return Err(InstanceError::DuplicateEntry { agent: i as u32 + 1, other: j as u32 + 1 });
                }
                rank[i * n + j] = pos as u32 + 1;
            }
            rank[i * n + i] = n as u32;
        }
        for i in 0..n {
            for &j in &prefs[i] {
                if rank[j as usize * n + i] == UNACCEPTABLE {
                    return Err(InstanceError::NotMutual { agent: i as u32 + 1, other: j + 1 });
                }
            }
        }
        let min = if allow_zero { 0 } else { 1 };
        for (i, &c) in caps.iter().enumerate() {
            if c < min || c as usize > n.saturating_sub(1) {
                return Err(InstanceError::CapacityOutOfRange {
                    agent: i as u32 + 1,
                    cap: c,
                    min,
                    max: n as u32 - 1,
                });
            }
        }
        let complete = prefs.iter().all(|l| l.len() == n - 1);
        Ok(SfInstance { prefs, caps, rank, complete })
    }

    /// Same preferences, new capacities in `0..=n-1`.
    pub fn with_caps(&self, caps: Vec<u32>) -> Result<Self, InstanceError> {
        let n = self.n();
        if caps.len() != n {
            return Err(InstanceError::CapsLength { expected: n, found: caps.len() });
        }
        for (i, &c) in caps.iter().enumerate() {
            if c as usize > n - 1 {
                return Err(InstanceError::CapacityOutOfRange {
                    agent: i as u32 + 1,
                    cap: c,
                    min: 0,
                    max: n as u32 - 1,
                });
            }
        }
        Ok(SfInstance { caps, ..self.clone() })
    }

    pub fn n(&self) -> usize {
        self.prefs.len()
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn prefs(&self, i: usize) -> &[u32] {
        &self.prefs[i]
    }

    pub fn all_prefs(&self) -> &[Vec<u32>] {
        &self.prefs
    }

    pub fn cap(&self, i: usize) -> u32 {
        self.caps[i]
    }

    pub fn caps(&self) -> &[u32] {
        &self.caps
    }

    /// Raw rank: 1-based list position, `n` for self, `u32::MAX` if unacceptable.
    #[inline]
    pub fn rank(&self, i: usize, j: usize) -> u32 {
        self.rank[i * self.n() + j]
    }

    #[inline]
    pub fn acceptable(&self, i: usize, j: usize) -> bool {
        i != j && self.rank(i, j) != UNACCEPTABLE
    }

    /// `true` if `i` strictly prefers `j` to `k`.
    #[inline]
    pub fn prefers(&self, i: usize, j: usize, k: usize) -> bool {
        self.rank(i, j) < self.rank(i, k)
    }

    /// Rank of `j` in `i`'s list; self gets `n`, unacceptable agents `None`.
    pub fn rank_of(&self, i: AgentId, j: AgentId) -> Option<Rank> {
        match self.rank(i.index(), j.index()) {
            UNACCEPTABLE => None,
            r => Some(Rank(r)),
        }
    }

    /// Agent at 1-based position `r` of `i`'s list.
    pub fn at_rank(&self, i: usize, r: u32) -> Option<u32> {
        r.checked_sub(1).and_then(|p| self.prefs[i].get(p as usize).copied())
    }

    /// Unordered mutually acceptable pairs `(i, j)` with `i < j`, in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n();
        (0..n).flat_map(move |i| (i + 1..n).filter(move |&j| self.acceptable(i, j)).map(move |j| (i, j)))
    }

    /// Applies an agent relabelling: agent `i` becomes `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> SfInstance {
        let n = self.n();
        let mut prefs = vec![Vec::new(); n];
        let mut caps = vec![0; n];
        for i in 0..n {
            prefs[perm[i]] = self.prefs[i].iter().map(|&j| perm[j as usize] as u32).collect();
            caps[perm[i]] = self.caps[i];
        }
        Self::build(prefs, caps, true).expect("relabelling preserves validity")
    }
}

/// Parses the SF text format. Lines starting with `#` are skipped.
pub fn parse_instance(text: &str) -> Result<SfInstance, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or(ParseError::Truncated { expected: 1, found: 0 })?;
    let n: usize = header.parse().map_err(|_| ParseError::Malformed {
        line: hline,
        msg: format!("expected agent count, got `{header}`"),
    })?;
    if n == 0 {
        return Err(ParseError::Invalid { line: hline, source: InstanceError::Empty });
    }

    let mut prefs = Vec::with_capacity(n);
    let mut caps = Vec::with_capacity(n);
    let mut line_of = Vec::with_capacity(n);
    for (line, body) in lines.by_ref() {
        if prefs.len() == n {
            return Err(ParseError::Malformed { line, msg: format!("more than {n} agent lines") });
        }
        let i = prefs.len();
        let mut nums = body.split_whitespace().map(|t| {
            t.parse::<u32>().map_err(|_| ParseError::Malformed { line, msg: format!("`{t}` is not a number") })
        });
        let cap = nums.next().ok_or(ParseError::Malformed { line, msg: "empty line".into() })??;
        let invalid = |source| ParseError::Invalid { line, source };
        let mut list = Vec::new();
        let mut seen = vec![false; n];
        for v in nums {
            let v = v?;
            if v == 0 || v as usize > n {
                return Err(invalid(InstanceError::DanglingAgent { agent: i as u32 + 1, other: v }));
            }
            let j = v as usize - 1;
            if j == i {
                return Err(invalid(InstanceError::SelfInList { agent: i as u32 + 1 }));
            }
            if std::mem::replace(&mut seen[j], true) {
                return Err(invalid(InstanceError::DuplicateEntry { agent: i as u32 + 1, other: v }));
            }
            list.push(j as u32);
        }
        if list.len() != n - 1 {
            return Err(invalid(InstanceError::IncompleteList {
                agent: i as u32 + 1,
                expected: n - 1,
                found: list.len(),
            }));
        }
        if cap < 1 || cap as usize > n - 1 {
            return Err(invalid(InstanceError::CapacityOutOfRange {
                agent: i as u32 + 1,
                cap,
                min: 1,
                max: n as u32 - 1,
            }));
        }
        prefs.push(list);
        caps.push(cap);
        line_of.push(line);
    }
    if prefs.len() < n {
        return Err(ParseError::Truncated { expected: n, found: prefs.len() });
    }
    SfInstance::new(prefs, caps).map_err(|source| ParseError::Invalid { line: hline, source })
}

/// Writes the SF text format (1-based ids, no comments).
pub fn serialize_instance(inst: &SfInstance) -> String {
    let mut out = format!("{}\n", inst.n());
    for i in 0..inst.n() {
        out.push_str(&inst.cap(i).to_string());
        for &j in inst.prefs(i) {
            out.push(' ');
            out.push_str(&(j + 1).to_string());
        }
        out.push('\n');
    }
    out
}

/// Builds an instance from 1-based lists.
pub fn from_labels(lists: &[&[u32]], caps: &[u32]) -> Result<SfInstance, InstanceError> {
    let prefs: Vec<Vec<u32>> = lists.iter().map(|l| l.iter().map(|&v| v - 1).collect()).collect();
    if prefs.iter().all(|l| l.len() + 1 == prefs.len()) {
        SfInstance::new(prefs, caps.to_vec())
    } else {
        SfInstance::new_incomplete(prefs, caps.to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TABLE4: &str = "5\n2 2 4 3 5\n2 4 3 1 5\n2 1 5 2 4\n2 3 1 2 5\n1 3 1 2 4\n";

    #[test]
    fn parses_table4() {
        let inst = parse_instance(TABLE4).unwrap();
        assert_eq!(inst.caps(), &[2, 2, 2, 2, 1]);
        assert_eq!(inst.prefs(4), &[2, 0, 1, 3]);
        let a = AgentId::from_label;
        assert_eq!(inst.rank_of(a(3).unwrap(), a(4).unwrap()), Some(Rank(4)));
        assert_eq!(inst.rank_of(a(2).unwrap(), a(2).unwrap()), Some(Rank(5)));
    }

    #[test]
    fn single_agent_rejected() {
        let err = parse_instance("1\n1").unwrap_err();
        assert!(matches!(err, ParseError::Invalid { line: 2, .. }), "{err}");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let dup = parse_instance("# c\n3\n1 2 2\n1 1 3\n1 1 2\n").unwrap_err();
        assert!(matches!(
            dup,
            ParseError::Invalid { line: 3, source: InstanceError::DuplicateEntry { agent: 1, other: 2 } }
        ));
        let own = parse_instance("3\n1 2 3\n1 2 3\n1 1 2\n").unwrap_err();
        assert!(matches!(own, ParseError::Invalid { line: 3, source: InstanceError::SelfInList { agent: 2 } }));
        let dangling = parse_instance("3\n1 2 7\n1 1 3\n1 1 2\n").unwrap_err();
        assert!(matches!(dangling, ParseError::Invalid { line: 2, .. }));
        let cap = parse_instance("3\n3 2 3\n1 1 3\n1 1 2\n").unwrap_err();
        assert!(matches!(
            cap,
            ParseError::Invalid { line: 2, source: InstanceError::CapacityOutOfRange { .. } }
        ));
        let junk = parse_instance("3\n1 x 3\n").unwrap_err();
        assert!(matches!(junk, ParseError::Malformed { line: 2, .. }));
        assert!(matches!(parse_instance("3\n1 2 3\n"), Err(ParseError::Truncated { .. })));
    }

    #[test]
    fn serialize_round_trip() {
        let inst = parse_instance(TABLE4).unwrap();
        assert_eq!(serialize_instance(&inst), TABLE4);
        assert_eq!(parse_instance(&serialize_instance(&inst)).unwrap(), inst);
    }

    #[test]
    fn incomplete_requires_mutual_lists() {
        let err = SfInstance::new_incomplete(vec![vec![1], vec![]], vec![1, 1]).unwrap_err();
        assert_eq!(err, InstanceError::NotMutual { agent: 1, other: 2 });
        let ok = SfInstance::new_incomplete(vec![vec![1], vec![0], vec![]], vec![1, 1, 0]).unwrap();
        assert!(!ok.is_complete());
        assert_eq!(ok.rank_of(AgentId(0), AgentId(2)), None);
    }

    #[test]
    fn agent_id_serializes_one_based() {
        assert_eq!(serde_json::to_string(&AgentId(0)).unwrap(), "1");
        assert_eq!(serde_json::from_str::<AgentId>("3").unwrap(), AgentId(2));
        assert!(serde_json::from_str::<AgentId>("0").is_err());
    }
}
