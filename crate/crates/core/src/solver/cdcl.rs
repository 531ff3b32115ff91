use std::fmt::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::heap::VarHeap;
use super::{LearnedClause, Lit, SolveResult, SolverConfig, SolverStats};

type CRef = u32;

const UNDEF: i8 = 0;
const TRUE: i8 = 1;
const FALSE: i8 = -1;

#[derive(Debug, Clone)]
struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    lbd: u32,
    activity: f64,
    deleted: bool,
}

#[derive(Debug, Clone, Copy)]
struct Watcher {
    cref: CRef,
    blocker: Lit,
}

/// Single-threaded CDCL solver state.
///
/// Clauses are added at decision level 0; every `solve` returns to level 0,
/// so clauses may be added between calls.
#[derive(Debug, Clone)]
pub struct Solver {
    config: SolverConfig,
    clauses: Vec<Clause>,
    /// `watches[l]` holds clauses whose first or second literal is `l`.
    watches: Vec<Vec<Watcher>>,
    assigns: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<Option<CRef>>,
    phase: Vec<bool>,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f64,
    heap: VarHeap,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    seen: Vec<bool>,
    ok: bool,
    rng: ChaCha8Rng,
    stats: SolverStats,
    learned_log: Vec<LearnedClause>,
    proof: Option<String>,
    num_learnts: usize,
    next_reduce: u64,
    reductions: u64,
}

impl Solver {
    pub fn new(num_vars: usize, config: SolverConfig) -> Self {
        let rng = ChaCha8Rng::seed_from_u64(config.seed);
        let proof = config.proof_log.then(String::new);
        let next_reduce = config.reduce_base;
        let mut s = Solver {
            config,
            clauses: Vec::new(),
            watches: Vec::new(),
            assigns: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            phase: Vec::new(),
            activity: Vec::new(),
            var_inc: 1.0,
            cla_inc: 1.0,
            heap: VarHeap::default(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            seen: Vec::new(),
            ok: true,
            rng,
            stats: SolverStats::default(),
            learned_log: Vec::new(),
            proof,
            num_learnts: 0,
            next_reduce,
            reductions: 0,
        };
        s.reserve_vars(num_vars);
        s
    }

    pub fn num_vars(&self) -> usize {
        self.assigns.len()
    }

    /// Grows the variable range to at least `n`.
    pub fn reserve_vars(&mut self, n: usize) {
        let old = self.assigns.len();
        if n <= old {
            return;
        }
        self.assigns.resize(n, UNDEF);
        self.level.resize(n, 0);
        self.reason.resize(n, None);
        self.phase.resize(n, false);
        self.activity.resize(n, 0.0);
        self.seen.resize(n, false);
        self.watches.resize(2 * n, Vec::new());
        self.heap.grow(n);
        for v in old..n {
            self.heap.insert(v as u32, &self.activity);
        }
    }

    pub fn stats(&self) -> SolverStats {
        self.stats
    }

    /// False once the clause set is known to be unsatisfiable.
    pub fn is_ok(&self) -> bool {
        self.ok
    }

    fn value(&self, l: Lit) -> i8 {
        let v = self.assigns[l.var() as usize];
        if l.is_positive() {
            v
        } else {
            -v
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn log_add(&mut self, lits: &[Lit]) {
        if let Some(p) = self.proof.as_mut() {
            for l in lits {
                let _ = write!(p, "{} ", l.to_dimacs());
            }
            p.push_str("0\n");
        }
    }

    fn log_delete(&mut self, lits: &[Lit]) {
        if let Some(p) = self.proof.as_mut() {
            p.push_str("d ");
            for l in lits {
                let _ = write!(p, "{} ", l.to_dimacs());
            }
            p.push_str("0\n");
        }
    }

    /// Adds a problem clause. Returns false if the clause set became
    /// unsatisfiable at level 0.
    pub fn add_clause(&mut self, lits: &[Lit]) -> bool {
        if !self.ok {
            return false;
        }
        debug_assert_eq!(self.decision_level(), 0);
        if let Some(max) = lits.iter().map(|l| l.var() as usize + 1).max() {
            self.reserve_vars(max);
        }
        let mut c: Vec<Lit> = lits.to_vec();
        c.sort();
        c.dedup();
        if c.windows(2).any(|w| w[0] == !w[1]) || c.iter().any(|&l| self.value(l) == TRUE) {
            return true;
        }
        let before = c.len();
        c.retain(|&l| self.value(l) != FALSE);
        if c.len() != before {
            self.log_add(&c);
        }
        match c.len() {
            0 => {
                self.ok = false;
                false
            }
            1 => {
                self.enqueue(c[0], None);
                if self.propagate().is_some() {
                    self.ok = false;
                    self.log_add(&[]);
                }
                self.ok
            }
            _ => {
                self.attach(c, false, 0);
                true
            }
        }
    }

    fn attach(&mut self, lits: Vec<Lit>, learnt: bool, lbd: u32) -> CRef {
        let cref = self.clauses.len() as CRef;
        self.watches[lits[0].index()].push(Watcher {
            cref,
            blocker: lits[1],
        });
        self.watches[lits[1].index()].push(Watcher {
            cref,
            blocker: lits[0],
        });
        if learnt {
            self.num_learnts += 1;
        }
        self.clauses.push(Clause {
            lits,
            learnt,
            lbd,
            activity: 0.0,
            deleted: false,
        });
        cref
    }

    fn enqueue(&mut self, l: Lit, reason: Option<CRef>) {
        let v = l.var() as usize;
        debug_assert_eq!(self.assigns[v], UNDEF);
        self.assigns[v] = if l.is_positive() { TRUE } else { FALSE };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Unit propagation; returns a conflicting clause if one arises.
    fn propagate(&mut self) -> Option<CRef> {
        let mut conflict = None;
        while self.qhead < self.trail.len() && conflict.is_none() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[false_lit.index()]);
            let mut i = 0;
            let mut j = 0;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker) == TRUE {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.cref as usize;
                if self.clauses[cref].deleted {
                    continue;
                }
                {
                    let lits = &mut self.clauses[cref].lits;
                    if lits[0] == false_lit {
                        lits.swap(0, 1);
                    }
                }
                let first = self.clauses[cref].lits[0];
                if first != w.blocker && self.value(first) == TRUE {
                    ws[j] = Watcher {
                        cref: w.cref,
                        blocker: first,
                    };
                    j += 1;
                    continue;
                }
                let len = self.clauses[cref].lits.len();
                let mut moved = false;
                for k in 2..len {
                    let l = self.clauses[cref].lits[k];
                    if self.value(l) != FALSE {
                        self.clauses[cref].lits.swap(1, k);
                        self.watches[l.index()].push(Watcher {
                            cref: w.cref,
                            blocker: first,
                        });
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = Watcher {
                    cref: w.cref,
                    blocker: first,
                };
                j += 1;
                if self.value(first) == FALSE {
                    conflict = Some(w.cref);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, Some(w.cref));
                }
            }
            ws.truncate(j);
            self.watches[false_lit.index()] = ws;
        }
        conflict
    }

    fn bump_var(&mut self, v: u32) {
        let a = &mut self.activity[v as usize];
        *a += self.var_inc;
        if *a > 1e100 {
            for x in self.activity.iter_mut() {
                *x *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.increased(v, &self.activity);
    }

    fn bump_clause(&mut self, cref: CRef) {
        let c = &mut self.clauses[cref as usize];
        if !c.learnt {
            return;
        }
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for c in self.clauses.iter_mut().filter(|c| c.learnt) {
                c.activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    /// First-UIP analysis. Returns the learned clause (asserting literal
    /// first, highest remaining level second) and the backjump level.
    fn analyze(&mut self, mut confl: CRef) -> (Vec<Lit>, u32) {
        let mut learnt = vec![Lit(0)];
        let mut path = 0usize;
        let mut p: Option<Lit> = None;
        let mut idx = self.trail.len();
        let current = self.decision_level();
        loop {
            self.bump_clause(confl);
            let lits = self.clauses[confl as usize].lits.clone();
            let start = usize::from(p.is_some());
            for &q in &lits[start..] {
                let v = q.var() as usize;
                if !self.seen[v] && self.level[v] > 0 {
                    self.bump_var(q.var());
                    self.seen[v] = true;
                    if self.level[v] >= current {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var() as usize] {
                    break;
                }
            }
            let pl = self.trail[idx];
            p = Some(pl);
            self.seen[pl.var() as usize] = false;
            path -= 1;
            if path == 0 {
                break;
            }
            confl = self.reason[pl.var() as usize].expect("implied literal has a reason");
        }
        learnt[0] = !p.expect("conflict at positive level");

        // Recursive minimization.
        let to_clear = learnt.clone();
        let abstract_levels = learnt[1..]
            .iter()
            .fold(0u64, |acc, l| acc | 1 << (self.level[l.var() as usize] & 63));
        let mut analyze_toclear = Vec::new();
        let mut kept = vec![learnt[0]];
        for &l in &learnt[1..] {
            if self.reason[l.var() as usize].is_none() || !self.redundant(l, abstract_levels, &mut analyze_toclear) {
                kept.push(l);
            }
        }
        for l in to_clear.iter().chain(&analyze_toclear) {
            self.seen[l.var() as usize] = false;
        }
        let mut learnt = kept;

        let mut bt = 0;
        if learnt.len() > 1 {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[learnt[i].var() as usize] > self.level[learnt[max_i].var() as usize] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            bt = self.level[learnt[1].var() as usize];
        }
        (learnt, bt)
    }

    fn redundant(&mut self, l: Lit, abstract_levels: u64, toclear: &mut Vec<Lit>) -> bool {
        let mut stack = vec![l];
        let top = toclear.len();
        while let Some(q) = stack.pop() {
            let cref = self.reason[q.var() as usize].expect("only implied literals are expanded");
            let lits = self.clauses[cref as usize].lits.clone();
            for &r in &lits[1..] {
                let v = r.var() as usize;
                if self.seen[v] || self.level[v] == 0 {
                    continue;
                }
                if self.reason[v].is_some() && (abstract_levels >> (self.level[v] & 63)) & 1 == 1 {
                    self.seen[v] = true;
                    stack.push(r);
                    toclear.push(r);
                } else {
                    for x in toclear.drain(top..) {
                        self.seen[x.var() as usize] = false;
                    }
                    return false;
                }
            }
        }
        true
    }

    fn lbd(&mut self, lits: &[Lit]) -> u32 {
        let mut levels: Vec<u32> = lits.iter().map(|l| self.level[l.var() as usize]).collect();
        levels.sort_unstable();
        levels.dedup();
        levels.len() as u32
    }

    /// Collects the assumptions responsible for the assumption `failed`
    /// being false. `failed` itself is included.
    fn analyze_final(&mut self, failed: Lit) -> Vec<Lit> {
        let mut core = vec![failed];
        let v = failed.var() as usize;
        if self.level[v] == 0 {
            return core;
        }
        self.seen[v] = true;
        let start = self.trail_lim[0];
        for i in (start..self.trail.len()).rev() {
            let l = self.trail[i];
            let x = l.var() as usize;
            if !self.seen[x] {
                continue;
            }
            match self.reason[x] {
                // Decisions above level 0 are assumptions; this includes the
                // opposite of `failed` when both polarities were assumed.
                None => core.push(l),
                Some(cref) => {
                    let lits = self.clauses[cref as usize].lits.clone();
                    for &q in &lits[1..] {
                        if self.level[q.var() as usize] > 0 {
                            self.seen[q.var() as usize] = true;
                        }
                    }
                }
            }
            self.seen[x] = false;
        }
        self.seen[v] = false;
        core
    }

    fn backtrack(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level as usize];
        for i in (lim..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var() as usize;
            self.assigns[v] = UNDEF;
            self.reason[v] = None;
            self.phase[v] = l.is_positive();
            self.heap.insert(l.var(), &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level as usize);
        self.qhead = lim;
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        if self.config.random_var_freq > 0.0
            && !self.heap.is_empty()
            && self.rng.random_bool(self.config.random_var_freq)
        {
            let v = self.rng.random_range(0..self.num_vars()) as u32;
            if self.assigns[v as usize] == UNDEF {
                return Some(Lit::new(v, self.phase[v as usize]));
            }
        }
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.assigns[v as usize] == UNDEF {
                return Some(Lit::new(v, self.phase[v as usize]));
            }
        }
        None
    }

    fn locked(&self, cref: CRef) -> bool {
        let c = &self.clauses[cref as usize];
        let v = c.lits[0].var() as usize;
        self.reason[v] == Some(cref) && self.value(c.lits[0]) == TRUE
    }

    /// Removes about half of the learned clauses, keeping glue clauses
    /// (lbd ≤ 2) and clauses that are reasons on the trail.
    fn reduce_db(&mut self) {
        let mut candidates: Vec<CRef> = (0..self.clauses.len() as CRef)
            .filter(|&c| {
                let cl = &self.clauses[c as usize];
                cl.learnt && !cl.deleted && cl.lbd > 2 && cl.lits.len() > 2
            })
            .filter(|&c| !self.locked(c))
            .collect();
        candidates.sort_by(|&a, &b| {
            let (ca, cb) = (&self.clauses[a as usize], &self.clauses[b as usize]);
            cb.lbd
                .cmp(&ca.lbd)
                .then(ca.activity.partial_cmp(&cb.activity).unwrap_or(std::cmp::Ordering::Equal))
                .then(a.cmp(&b))
        });
        let remove = candidates.len() / 2;
        for &c in &candidates[..remove] {
            let lits = std::mem::take(&mut self.clauses[c as usize].lits);
            self.log_delete(&lits);
            let cl = &mut self.clauses[c as usize];
            cl.deleted = true;
            self.num_learnts -= 1;
        }
        // Watchers of deleted clauses are dropped lazily, but propagate reads
        // `lits` before checking the blocker only for live clauses.
        for ws in self.watches.iter_mut() {
            ws.retain(|w| !self.clauses[w.cref as usize].deleted);
        }
        self.reductions += 1;
    }

    /// Solves under `assumptions`. Returns to decision level 0 afterwards.
    pub fn solve(&mut self, assumptions: &[Lit]) -> SolveResult {
        self.learned_log.clear();
        if let Some(max) = assumptions.iter().map(|l| l.var() as usize + 1).max() {
            self.reserve_vars(max);
        }
        if !self.ok {
            return SolveResult::Unsat(Vec::new());
        }
        let result = self.search(assumptions);
        self.backtrack(0);
        result
    }

    fn search(&mut self, assumptions: &[Lit]) -> SolveResult {
        let start_conflicts = self.stats.conflicts;
        let mut restart_index = 0u64;
        let mut restart_limit = luby(2.0, restart_index) * self.config.restart_unit as f64;
        let mut since_restart = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                since_restart += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    self.log_add(&[]);
                    return SolveResult::Unsat(Vec::new());
                }
                let (learnt, bt) = self.analyze(confl);
                let lbd = self.lbd(&learnt);
                self.learned_log.push(LearnedClause {
                    literals: learnt.clone(),
                    lbd,
                });
                self.log_add(&learnt);
                self.backtrack(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], None);
                } else {
                    let asserting = learnt[0];
                    let cref = self.attach(learnt, true, lbd);
                    self.bump_clause(cref);
                    self.enqueue(asserting, Some(cref));
                }
                self.var_inc /= self.config.var_decay;
                self.cla_inc /= self.config.clause_decay;

                if let Some(budget) = self.config.conflict_budget {
                    if self.stats.conflicts - start_conflicts >= budget {
                        return SolveResult::Timeout;
                    }
                }
                continue;
            }

            if since_restart as f64 >= restart_limit {
                self.stats.restarts += 1;
                restart_index += 1;
                restart_limit = luby(2.0, restart_index) * self.config.restart_unit as f64;
                since_restart = 0;
                self.backtrack(0);
            }
            if self.stats.conflicts >= self.next_reduce {
                self.next_reduce =
                    self.stats.conflicts + self.config.reduce_base + self.config.reduce_step * (self.reductions + 1);
                self.reduce_db();
            }

            let mut next = None;
            while (self.decision_level() as usize) < assumptions.len() {
                let a = assumptions[self.decision_level() as usize];
                match self.value(a) {
                    TRUE => self.trail_lim.push(self.trail.len()),
                    FALSE => {
                        return SolveResult::Unsat(self.analyze_final(a));
                    }
                    _ => {
                        next = Some(a);
                        break;
                    }
                }
            }
            let decision = match next {
                Some(a) => a,
                None => match self.pick_branch() {
                    Some(l) => {
                        self.stats.decisions += 1;
                        l
                    }
                    None => {
                        let model = self.assigns.iter().map(|&v| v == TRUE).collect();
                        return SolveResult::Sat(model);
                    }
                },
            };
            self.trail_lim.push(self.trail.len());
            self.enqueue(decision, None);
        }
    }

    /// Learned clauses from the last `solve` call with at most `max_size`
    /// literals and LBD at most `max_lbd`, in learning order.
    pub fn export_learned(&self, max_size: usize, max_lbd: u32) -> Vec<LearnedClause> {
        self.learned_log
            .iter()
            .filter(|c| c.size() <= max_size && c.lbd <= max_lbd)
            .cloned()
            .collect()
    }

    /// The DRAT log accumulated so far, if enabled.
    pub fn proof(&self) -> Option<&str> {
        self.proof.as_deref()
    }
}

/// Luby sequence value `y^k` for restart index `x`.
fn luby(y: f64, mut x: u64) -> f64 {
    let mut size = 1u64;
    let mut seq = 0i32;
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    y.powi(seq)
}
