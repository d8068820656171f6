//! Irving's proposal phase followed by rotation elimination that keeps odd
//! parties intact.
//!
//! Every list is a doubly linked list over a flat entry array, so `first`,
//! `second`, `last` and symmetric deletion are O(1). `mirror[k]` is the index
//! of the reverse entry, so deleting `y` from `x`'s list also removes `x` from
//! `y`'s.
//!
//! Phase 2 walks `x -> last(second(x))` from the highest eligible agent until
//! an agent repeats; the repeating tail `p` is a rotation with `q_i =
//! second(p_i)`. If `{p} = {q}`, `|p|` is odd and every `p_i` has exactly two
//! entries left, `p` is an odd party: its agents are frozen and later walks
//! never reach them. Any other rotation is eliminated by truncating `q_i`'s
//! list after `p_i`. At the end, `first(x)` is `x`'s successor (or `x` itself
//! for an empty list).

const NIL: u32 = u32::MAX;

struct Table {
    start: Vec<u32>,
    who: Vec<u32>,
    mirror: Vec<u32>,
    next: Vec<u32>,
    prev: Vec<u32>,
    head: Vec<u32>,
    tail: Vec<u32>,
    len: Vec<u32>,
}

impl Table {
    fn new(lists: &[Vec<u32>]) -> Self {
        let n = lists.len();
        let mut start = Vec::with_capacity(n + 1);
        let mut who = Vec::new();
        start.push(0);
        for l in lists {
            who.extend_from_slice(l);
            start.push(who.len() as u32);
        }
        let m = who.len();

        // Reverse entries: sort (owner, partner) keys and binary-search the partner side.
        let mut keyed: Vec<(u32, u32, u32)> = Vec::with_capacity(m);
        for x in 0..n {
            for k in start[x]..start[x + 1] {
                keyed.push((x as u32, who[k as usize], k));
            }
        }
        keyed.sort_unstable();
        let mut mirror = vec![NIL; m];
        for x in 0..n {
            for k in start[x]..start[x + 1] {
                let y = who[k as usize];
                let at = keyed
                    .binary_search_by(|&(a, b, _)| (a, b).cmp(&(y, x as u32)))
                    .unwrap_or_else(|_| panic!("agent {} lists {} without reciprocity", x + 1, y + 1));
                mirror[k as usize] = keyed[at].2;
            }
        }

        let mut next = vec![NIL; m];
        let mut prev = vec![NIL; m];
        let mut head = vec![NIL; n];
        let mut tail = vec![NIL; n];
        let mut len = vec![0; n];
        for x in 0..n {
            let (a, b) = (start[x], start[x + 1]);
            if a < b {
                head[x] = a;
                tail[x] = b - 1;
                len[x] = b - a;
                for k in a..b {
                    if k > a {
                        prev[k as usize] = k - 1;
                    }
                    if k + 1 < b {
                        next[k as usize] = k + 1;
                    }
                }
            }
        }
        Table { start, who, mirror, next, prev, head, tail, len }
    }

    fn owner(&self, k: u32) -> usize {
        self.start.partition_point(|&s| s <= k) - 1
    }

    fn unlink(&mut self, x: usize, k: u32) {
        let (p, q) = (self.prev[k as usize], self.next[k as usize]);
        if p == NIL {
            self.head[x] = q;
        } else {
            self.next[p as usize] = q;
        }
        if q == NIL {
            self.tail[x] = p;
        } else {
            self.prev[q as usize] = p;
        }
        self.len[x] -= 1;
    }

    /// Removes entry `k` of `x`'s list and its mirror; returns the partner.
    fn delete(&mut self, x: usize, k: u32) -> usize {
        let y = self.who[k as usize] as usize;
        let mk = self.mirror[k as usize];
        self.unlink(x, k);
        self.unlink(y, mk);
        y
    }

    fn second_entry(&self, x: usize) -> u32 {
        self.next[self.head[x] as usize]
    }
}

/// Returns `succ`, with `succ[x] = x` for agents left with empty lists.
pub(crate) fn solve(lists: &[Vec<u32>]) -> Vec<u32> {
    let n = lists.len();
    let mut t = Table::new(lists);

    // Phase 1.
    let mut proposed = vec![NIL; n];
    let mut free: Vec<u32> = (0..n as u32).rev().collect();
    while let Some(x) = free.pop() {
        let x = x as usize;
        if proposed[x] != NIL || t.len[x] == 0 {
            continue;
        }
        let hx = t.head[x];
        let y = t.who[hx as usize] as usize;
        proposed[x] = y as u32;
        let keep = t.mirror[hx as usize];
        while t.tail[y] != keep {
            let z = t.delete(y, t.tail[y]);
            if proposed[z] == y as u32 {
                proposed[z] = NIL;
                free.push(z as u32);
            }
            if proposed[y] == z as u32 {
                proposed[y] = NIL;
                free.push(y as u32);
            }
        }
    }

    // Phase 2.
    let mut frozen = vec![false; n];
    let mut seq_pos = vec![NIL; n];
    let mut seq: Vec<usize> = Vec::new();
    // Walks start at the highest eligible id, so rotations that would push
    // low-id agents off their first entries are eliminated last.
    let mut cursor = n;
    loop {
        while cursor > 0 && (frozen[cursor - 1] || t.len[cursor - 1] < 2) {
            cursor -= 1;
        }
        if cursor == 0 {
            break;
        }
        for &s in &seq {
            seq_pos[s] = NIL;
        }
        seq.clear();
        let mut x = cursor - 1;
        loop {
            seq_pos[x] = seq.len() as u32;
            seq.push(x);
            assert!(t.len[x] >= 2 && !frozen[x], "rotation walk left the active agents");
            let q = t.who[t.second_entry(x) as usize] as usize;
            x = t.who[t.tail[q] as usize] as usize;
            if seq_pos[x] != NIL {
                break;
            }
        }
        let p = seq[seq_pos[x] as usize..].to_vec();
        let q: Vec<usize> = p.iter().map(|&pi| t.who[t.second_entry(pi) as usize] as usize).collect();

        let pure = p.len() % 2 == 1 && p.iter().all(|&pi| t.len[pi] == 2) && {
            let (mut sp, mut sq) = (p.clone(), q.clone());
            sp.sort_unstable();
            sq.sort_unstable();
            sq.dedup();
            sp == sq
        };
        if pure {
            for &pi in &p {
                frozen[pi] = true;
            }
            continue;
        }

        // Cut points are taken before any deletion: an earlier truncation in
        // this rotation may already have removed p_i from q_i's list.
        let cuts: Vec<u32> = p.iter().map(|&pi| t.mirror[t.second_entry(pi) as usize]).collect();
        let mut removed = 0;
        for (&qi, &cut) in q.iter().zip(&cuts) {
            debug_assert_eq!(t.owner(cut), qi);
            while t.tail[qi] != NIL && t.tail[qi] > cut {
                t.delete(qi, t.tail[qi]);
                removed += 1;
            }
        }
        assert!(removed > 0, "rotation elimination made no progress");
    }

    (0..n).map(|x| if t.len[x] == 0 { x as u32 } else { t.who[t.head[x] as usize] }).collect()
}
