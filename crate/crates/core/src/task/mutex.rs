//! Pairwise fact mutexes by h² reachability.

use super::ir::{Fact, GroundTask};

/// Skip the analysis when `facts * actions` exceeds this.
pub const MUTEX_WORK_CAP: usize = 20_000_000;

struct Pairs {
    n: usize,
    bits: Vec<u64>,
}

impl Pairs {
    fn new(n: usize) -> Self {
        Pairs {
            n,
            bits: vec![0; (n * n).div_ceil(64)],
        }
    }

    fn get(&self, p: usize, q: usize) -> bool {
        let i = p * self.n + q;
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    /// Sets both orientations; returns whether the pair was new.
    fn set(&mut self, p: usize, q: usize) -> bool {
        if self.get(p, q) {
            return false;
        }
        for i in [p * self.n + q, q * self.n + p] {
            self.bits[i / 64] |= 1 << (i % 64);
        }
        true
    }
}

/// Pairs of facts on different variables that no reachable state contains
/// together, as found by h². Returns `None` when the task is too large.
/// Every pair is a sound mutex: h² over-approximates reachable pairs.
pub fn h2_mutexes(task: &GroundTask) -> Option<Vec<[Fact; 2]>> {
    let mut offset = Vec::with_capacity(task.variables.len());
    let mut facts = Vec::new();
    for v in &task.variables {
        offset.push(facts.len());
        facts.extend((0..v.domain_size()).map(|x| Fact::new(v.id, x)));
    }
    let n = facts.len();
    if n.saturating_mul(task.actions.len().max(1)) > MUTEX_WORK_CAP {
        return None;
    }
    let id = |f: Fact| offset[f.var] + f.value;

    let mut reached = vec![false; n];
    let mut pairs = Pairs::new(n);
    let init: Vec<usize> = task.init.iter().enumerate().map(|(v, &x)| offset[v] + x).collect();
    for &p in &init {
        reached[p] = true;
        for &q in &init {
            pairs.set(p, q);
        }
    }

    let pre: Vec<Vec<usize>> = task.actions.iter().map(|a| a.pre.iter().map(|&f| id(f)).collect()).collect();
    let eff: Vec<Vec<usize>> = task.actions.iter().map(|a| a.eff.iter().map(|&f| id(f)).collect()).collect();
    let touched: Vec<Vec<bool>> = task
        .actions
        .iter()
        .map(|a| {
            let mut t = vec![false; task.variables.len()];
            for f in &a.eff {
                t[f.var] = true;
            }
            t
        })
        .collect();

    let mut changed = true;
    while changed {
        changed = false;
        for (a, action) in task.actions.iter().enumerate() {
            let pre_a = &pre[a];
            let enabled = pre_a.iter().all(|&p| reached[p])
                && pre_a.iter().all(|&p| pre_a.iter().all(|&q| pairs.get(p, q)));
            if !enabled {
                continue;
            }
            for &p in &eff[a] {
                if !reached[p] {
                    reached[p] = true;
                    changed = true;
                }
                for &q in &eff[a] {
                    changed |= pairs.set(p, q);
                }
            }
            for q in 0..n {
                if !reached[q] || touched[a][facts[q].var] {
                    continue;
                }
                // q survives the action if it can co-occur with the whole precondition.
                let compatible = action.pre.iter().all(|f| f.var != facts[q].var || id(*f) == q)
                    && pre_a.iter().all(|&r| pairs.get(q, r));
                if compatible {
                    for &p in &eff[a] {
                        changed |= pairs.set(p, q);
                    }
                }
            }
        }
    }

    let mut out = Vec::new();
    for p in 0..n {
        for q in p + 1..n {
            if facts[p].var != facts[q].var && reached[p] && reached[q] && !pairs.get(p, q) {
                out.push([facts[p], facts[q]]);
            }
        }
    }
    Some(out)
}
