//! Embedded CDCL SAT solver.
//!
//! A single engine in the MiniSat lineage: two-watched-literal propagation,
//! first-UIP conflict analysis with basic clause minimization, exponential
//! -decay activity ordering with phase saving, Luby restarts, and literal-
//! block-distance-guided reduction of the learned-clause database.
//!
//! The solver is incremental (clauses may be added between `solve` calls,
//! retaining everything learned so far) and deterministic: no randomness,
//! so a fixed clause sequence and budget always replays identically.
//! Conflict clauses below the export caps are retained per call for the
//! caller's learned-clause bookkeeping.

use crate::cnf::{Clause, CnfFormula, Lit, Var};
use alloc::vec::Vec;

/// Result of a solve call.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SolveStatus {
    Sat,
    Unsat,
    /// A budget or stop callback ended the search early.
    Interrupted,
}

/// Search budget. `stop` is polled between propagation bursts, so wall-time
/// deadlines work without the solver owning a clock.
#[derive(Default)]
pub struct Limits<'a> {
    pub max_conflicts: Option<u64>,
    pub stop: Option<&'a mut dyn FnMut() -> bool>,
}

impl<'a> Limits<'a> {
    pub fn none() -> Limits<'a> {
        Limits::default()
    }
}

/// Cumulative search counters.
#[derive(Clone, Copy, Default, Debug)]
pub struct SolveStats {
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
    pub learned: u64,
    pub learned_literals: u64,
}

/// Learned clauses longer than this are never exported.
pub const EXPORT_MAX_LEN: usize = 8;
/// Learned clauses with a literal block distance above this are never
/// exported; small-LBD clauses prune the most per literal.
pub const EXPORT_MAX_LBD: u32 = 4;

const NO_REASON: u32 = u32::MAX;

/// Internal literal: `2 * var + sign` (sign 1 = negated), 0-based var.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
struct SLit(u32);

impl SLit {
    #[inline]
    fn new(var: u32, positive: bool) -> SLit {
        SLit(var << 1 | (!positive as u32))
    }

    fn from_lit(lit: Lit) -> SLit {
        SLit::new(lit.var().index() - 1, lit.is_positive())
    }

    fn to_lit(self) -> Lit {
        Lit::new(Var::new(self.var() + 1), self.is_positive())
    }

    #[inline]
    fn var(self) -> u32 {
        self.0 >> 1
    }

    #[inline]
    fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    #[inline]
    fn negate(self) -> SLit {
        SLit(self.0 ^ 1)
    }

    #[inline]
    fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Value {
    True,
    False,
    Undef,
}

#[derive(Clone, Copy)]
struct Watch {
    cref: u32,
    blocker: SLit,
}

struct ClauseSlot {
    lits: Vec<SLit>,
    activity: f32,
    lbd: u32,
    learnt: bool,
    deleted: bool,
}

/// Max-activity binary heap over variables.
#[derive(Default)]
struct OrderHeap {
    heap: Vec<u32>,
    position: Vec<u32>, // u32::MAX = absent
    activity: Vec<f64>,
}

impl OrderHeap {
    fn grow(&mut self, n: usize) {
        while self.position.len() < n {
            let v = self.position.len() as u32;
            self.position.push(u32::MAX);
            self.activity.push(0.0);
            self.insert(v);
        }
    }

    fn better(&self, a: u32, b: u32) -> bool {
        // Ties fall to the lower variable index for determinism.
        let (aa, ab) = (self.activity[a as usize], self.activity[b as usize]);
        aa > ab || (aa == ab && a < b)
    }

    fn contains(&self, v: u32) -> bool {
        self.position[v as usize] != u32::MAX
    }

    fn insert(&mut self, v: u32) {
        if self.contains(v) {
            return;
        }
        self.position[v as usize] = self.heap.len() as u32;
        self.heap.push(v);
        self.sift_up(self.heap.len() - 1);
    }

    fn pop(&mut self) -> Option<u32> {
        let top = *self.heap.first()?;
        self.position[top as usize] = u32::MAX;
        let last = self.heap.pop().expect("nonempty");
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.position[last as usize] = 0;
            self.sift_down(0);
        }
        Some(top)
    }

    fn bump(&mut self, v: u32, inc: f64) -> bool {
        self.activity[v as usize] += inc;
        let rescale = self.activity[v as usize] > 1e100;
        if rescale {
            for a in self.activity.iter_mut() {
                *a *= 1e-100;
            }
        }
        if self.contains(v) {
            let pos = self.position[v as usize] as usize;
            self.sift_up(pos);
        }
        rescale
    }

    fn sift_up(&mut self, mut i: usize) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if self.better(self.heap[i], self.heap[parent]) {
                self.swap(i, parent);
                i = parent;
            } else {
                break;
            }
        }
    }

    fn sift_down(&mut self, mut i: usize) {
        loop {
            let (l, r) = (2 * i + 1, 2 * i + 2);
            let mut best = i;
            if l < self.heap.len() && self.better(self.heap[l], self.heap[best]) {
                best = l;
            }
            if r < self.heap.len() && self.better(self.heap[r], self.heap[best]) {
                best = r;
            }
            if best == i {
                return;
            }
            self.swap(i, best);
            i = best;
        }
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.heap.swap(a, b);
        self.position[self.heap[a] as usize] = a as u32;
        self.position[self.heap[b] as usize] = b as u32;
    }
}

pub struct Solver {
    num_vars: usize,
    clauses: Vec<ClauseSlot>,
    free_slots: u64,
    watches: Vec<Vec<Watch>>,
    assigns: Vec<Value>,
    level: Vec<u32>,
    reason: Vec<u32>,
    polarity: Vec<bool>,
    trail: Vec<SLit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    order: OrderHeap,
    var_inc: f64,
    cla_inc: f32,
    ok: bool,
    model: Option<Vec<bool>>,
    stats: SolveStats,
    exported: Vec<Clause>,
    learnts: Vec<u32>,
    next_reduce: u64,
    reductions: u64,
    // conflict-analysis scratch
    seen: Vec<bool>,
    analyze_buf: Vec<SLit>,
    lbd_stamp: Vec<u64>,
    lbd_counter: u64,
}

impl Default for Solver {
    fn default() -> Solver {
        Solver::new()
    }
}

impl Solver {
    pub fn new() -> Solver {
        Solver {
            num_vars: 0,
            clauses: Vec::new(),
            free_slots: 0,
            watches: Vec::new(),
            assigns: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            polarity: Vec::new(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            order: OrderHeap::default(),
            var_inc: 1.0,
            cla_inc: 1.0,
            ok: true,
            model: None,
            stats: SolveStats::default(),
            exported: Vec::new(),
            learnts: Vec::new(),
            next_reduce: 2000,
            reductions: 0,
            seen: Vec::new(),
            analyze_buf: Vec::new(),
            lbd_stamp: Vec::new(),
            lbd_counter: 0,
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars as u32
    }

    pub fn stats(&self) -> &SolveStats {
        &self.stats
    }

    /// Grows the variable space to at least `n` variables.
    pub fn ensure_vars(&mut self, n: u32) {
        let n = n as usize;
        while self.num_vars < n {
            self.assigns.push(Value::Undef);
            self.level.push(0);
            self.reason.push(NO_REASON);
            self.polarity.push(false);
            self.seen.push(false);
            self.watches.push(Vec::new());
            self.watches.push(Vec::new());
            self.num_vars += 1;
        }
        self.order.grow(n);
    }

    #[inline]
    fn value(&self, lit: SLit) -> Value {
        match self.assigns[lit.var() as usize] {
            Value::Undef => Value::Undef,
            v => {
                if (v == Value::True) == lit.is_positive() {
                    Value::True
                } else {
                    Value::False
                }
            }
        }
    }

    fn decision_level(&self) -> usize {
        self.trail_lim.len()
    }

    fn enqueue(&mut self, lit: SLit, reason: u32) {
        debug_assert!(self.value(lit) == Value::Undef);
        let v = lit.var() as usize;
        self.assigns[v] = if lit.is_positive() {
            Value::True
        } else {
            Value::False
        };
        self.level[v] = self.decision_level() as u32;
        self.reason[v] = reason;
        self.trail.push(lit);
    }

    /// Adds a clause, simplifying against the root-level assignment.
    /// Returns false once the solver knows the formula is unsatisfiable.
    pub fn add_clause(&mut self, lits: &[Lit]) -> bool {
        if !self.ok {
            return false;
        }
        self.backtrack_to(0);
        self.model = None;
        let max_var = lits.iter().map(|l| l.var().index()).max().unwrap_or(0);
        self.ensure_vars(max_var);

        let mut clause: Vec<SLit> = lits.iter().map(|&l| SLit::from_lit(l)).collect();
        clause.sort_unstable_by_key(|l| l.0);
        clause.dedup();
        let mut simplified = Vec::with_capacity(clause.len());
        for (i, &lit) in clause.iter().enumerate() {
            if i > 0 && clause[i - 1] == lit.negate() {
                return true; // tautology
            }
            match self.value(lit) {
                Value::True => return true, // already satisfied at root
                Value::False => {}          // root-false literal drops out
                Value::Undef => simplified.push(lit),
            }
        }

        match simplified.len() {
            0 => {
                self.ok = false;
                false
            }
            1 => {
                self.enqueue(simplified[0], NO_REASON);
                if self.propagate().is_some() {
                    self.ok = false;
                }
                self.ok
            }
            _ => {
                self.attach(simplified, false, 0);
                true
            }
        }
    }

    pub fn add_formula(&mut self, f: &CnfFormula) -> bool {
        self.ensure_vars(f.num_vars());
        for clause in f.clauses() {
            if !self.add_clause(clause.lits()) {
                return false;
            }
        }
        true
    }

    fn attach(&mut self, lits: Vec<SLit>, learnt: bool, lbd: u32) -> u32 {
        debug_assert!(lits.len() >= 2);
        let cref = self.clauses.len() as u32;
        let (w0, w1) = (lits[0], lits[1]);
        self.clauses.push(ClauseSlot {
            lits,
            activity: 0.0,
            lbd,
            learnt,
            deleted: false,
        });
        if learnt {
            self.learnts.push(cref);
        }
        self.watches[w0.negate().index()].push(Watch { cref, blocker: w1 });
        self.watches[w1.negate().index()].push(Watch { cref, blocker: w0 });
        cref
    }

    /// Unit propagation; returns a conflicting clause reference.
    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = p.negate();
            let watch_idx = p.index();

            let mut ws = core::mem::take(&mut self.watches[watch_idx]);
            let mut keep = 0;
            let mut conflict = None;
            'watches: for wi in 0..ws.len() {
                let w = ws[wi];
                if self.value(w.blocker) == Value::True {
                    ws[keep] = w;
                    keep += 1;
                    continue;
                }
                let cref = w.cref as usize;
                // Normalize: watched false literal at slot 1.
                {
                    let slot = &mut self.clauses[cref];
                    debug_assert!(!slot.deleted);
                    if slot.lits[0] == false_lit {
                        slot.lits.swap(0, 1);
                    }
                    debug_assert_eq!(slot.lits[1], false_lit);
                }
                let first = self.clauses[cref].lits[0];
                if first != w.blocker && self.value(first) == Value::True {
                    ws[keep] = Watch {
                        cref: w.cref,
                        blocker: first,
                    };
                    keep += 1;
                    continue;
                }
                // Look for a replacement watch.
                let len = self.clauses[cref].lits.len();
                for k in 2..len {
                    let lit = self.clauses[cref].lits[k];
                    if self.value(lit) != Value::False {
                        self.clauses[cref].lits.swap(1, k);
                        self.watches[lit.negate().index()].push(Watch {
                            cref: w.cref,
                            blocker: first,
                        });
                        continue 'watches;
                    }
                }
                // No replacement: unit or conflict.
                ws[keep] = Watch {
                    cref: w.cref,
                    blocker: first,
                };
                keep += 1;
                if self.value(first) == Value::False {
                    // Copy the rest of the watch list back; propagation ends.
                    let mut j = wi + 1;
                    while j < ws.len() {
                        ws[keep] = ws[j];
                        keep += 1;
                        j += 1;
                    }
                    self.qhead = self.trail.len();
                    conflict = Some(w.cref);
                    break 'watches;
                }
                self.stats.propagations += 1;
                self.enqueue(first, w.cref);
            }
            ws.truncate(keep);
            debug_assert!(self.watches[watch_idx].is_empty());
            self.watches[watch_idx] = ws;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    fn backtrack_to(&mut self, target: usize) {
        if self.decision_level() <= target {
            return;
        }
        let boundary = self.trail_lim[target];
        for i in (boundary..self.trail.len()).rev() {
            let lit = self.trail[i];
            let v = lit.var() as usize;
            self.polarity[v] = lit.is_positive();
            self.assigns[v] = Value::Undef;
            self.reason[v] = NO_REASON;
            self.order.insert(lit.var());
        }
        self.trail.truncate(boundary);
        self.trail_lim.truncate(target);
        self.qhead = boundary;
    }

    fn bump_var(&mut self, v: u32) {
        if self.order.bump(v, self.var_inc) {
            self.var_inc *= 1e-100;
        }
    }

    fn bump_clause(&mut self, cref: u32) {
        let slot = &mut self.clauses[cref as usize];
        slot.activity += self.cla_inc;
        if slot.activity > 1e20 {
            for &c in &self.learnts {
                self.clauses[c as usize].activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    /// Distinct decision levels among the literals.
    fn compute_lbd(&mut self, lits: &[SLit]) -> u32 {
        if self.lbd_stamp.len() <= self.num_vars {
            self.lbd_stamp.resize(self.num_vars + 1, 0);
        }
        self.lbd_counter += 1;
        let mut lbd = 0;
        for &lit in lits {
            let lvl = self.level[lit.var() as usize] as usize;
            if lvl > 0 && self.lbd_stamp[lvl] != self.lbd_counter {
                self.lbd_stamp[lvl] = self.lbd_counter;
                lbd += 1;
            }
        }
        lbd
    }

    /// First-UIP conflict analysis. Fills `analyze_buf` with the learnt
    /// clause (asserting literal first) and returns the backjump level.
    fn analyze(&mut self, confl: u32) -> usize {
        let current_level = self.decision_level();
        self.analyze_buf.clear();
        self.analyze_buf.push(SLit(0)); // placeholder for the asserting literal
        let mut counter = 0usize;
        let mut cref = confl;
        let mut trail_pos = self.trail.len();
        let mut uip = None;

        loop {
            if self.clauses[cref as usize].learnt {
                self.bump_clause(cref);
            }
            let start = usize::from(uip.is_some());
            for k in start..self.clauses[cref as usize].lits.len() {
                let q = self.clauses[cref as usize].lits[k];
                let v = q.var() as usize;
                if self.seen[v] || self.level[v] == 0 {
                    continue;
                }
                self.seen[v] = true;
                self.bump_var(q.var());
                if self.level[v] as usize >= current_level {
                    counter += 1;
                } else {
                    self.analyze_buf.push(q);
                }
            }
            // Walk the trail backwards to the next marked literal.
            loop {
                trail_pos -= 1;
                if self.seen[self.trail[trail_pos].var() as usize] {
                    break;
                }
            }
            let p = self.trail[trail_pos];
            self.seen[p.var() as usize] = false;
            counter -= 1;
            if counter == 0 {
                uip = Some(p);
                break;
            }
            cref = self.reason[p.var() as usize];
            debug_assert_ne!(cref, NO_REASON);
            uip = Some(p); // marks that slot 0 (the propagated lit) is skipped
        }
        self.analyze_buf[0] = uip.expect("first UIP exists").negate();

        // Basic minimization: drop literals whose reason is fully marked.
        let buf = core::mem::take(&mut self.analyze_buf);
        let mut minimized: Vec<SLit> = Vec::with_capacity(buf.len());
        minimized.push(buf[0]);
        for &lit in &buf[1..] {
            let r = self.reason[lit.var() as usize];
            let redundant = r != NO_REASON
                && self.clauses[r as usize]
                    .lits
                    .iter()
                    .skip(1)
                    .all(|q| self.seen[q.var() as usize] || self.level[q.var() as usize] == 0);
            if !redundant {
                minimized.push(lit);
            }
        }
        for &lit in &buf[1..] {
            self.seen[lit.var() as usize] = false;
        }
        self.analyze_buf = minimized;

        // Backjump target: second-highest level in the clause.
        if self.analyze_buf.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for i in 2..self.analyze_buf.len() {
                if self.level[self.analyze_buf[i].var() as usize]
                    > self.level[self.analyze_buf[max_i].var() as usize]
                {
                    max_i = i;
                }
            }
            self.analyze_buf.swap(1, max_i);
            self.level[self.analyze_buf[1].var() as usize] as usize
        }
    }

    fn record_learnt(&mut self) {
        let lits = self.analyze_buf.clone();
        self.stats.learned += 1;
        self.stats.learned_literals += lits.len() as u64;
        let lbd = self.compute_lbd(&lits);
        if lits.len() <= EXPORT_MAX_LEN && lbd <= EXPORT_MAX_LBD {
            self.exported
                .push(Clause::new(lits.iter().map(|l| l.to_lit()).collect()));
        }
        let asserting = lits[0];
        if lits.len() == 1 {
            self.enqueue(asserting, NO_REASON);
        } else {
            let cref = self.attach(lits, true, lbd);
            self.bump_clause(cref);
            self.enqueue(asserting, cref);
        }
        self.var_inc /= 0.95;
        self.cla_inc /= 0.999;
    }

    fn locked(&self, cref: u32) -> bool {
        let first = self.clauses[cref as usize].lits[0];
        self.value(first) == Value::True && self.reason[first.var() as usize] == cref
    }

    fn detach(&mut self, cref: u32) {
        let (w0, w1) = {
            let slot = &self.clauses[cref as usize];
            (slot.lits[0], slot.lits[1])
        };
        for w in [w0, w1] {
            let list = &mut self.watches[w.negate().index()];
            let pos = list
                .iter()
                .position(|x| x.cref == cref)
                .expect("watch present");
            list.swap_remove(pos);
        }
        let slot = &mut self.clauses[cref as usize];
        slot.deleted = true;
        self.free_slots += 1;
        slot.lits = Vec::new();
    }

    /// Halves the learned-clause database, preferring to keep low-LBD,
    /// high-activity clauses. Binary, reason-side and fresh-glue clauses
    /// survive.
    fn reduce_db(&mut self) {
        self.reductions += 1;
        let mut candidates: Vec<u32> = self
            .learnts
            .iter()
            .copied()
            .filter(|&c| {
                let slot = &self.clauses[c as usize];
                !slot.deleted && slot.lits.len() > 2 && slot.lbd > 2 && !self.locked(c)
            })
            .collect();
        candidates.sort_by(|&a, &b| {
            let (sa, sb) = (&self.clauses[a as usize], &self.clauses[b as usize]);
            sb.lbd
                .cmp(&sa.lbd)
                .then(sa.activity.partial_cmp(&sb.activity).expect("finite"))
                .then(b.cmp(&a))
        });
        for &c in candidates.iter().take(candidates.len() / 2) {
            self.detach(c);
        }
        self.learnts.retain(|&c| !self.clauses[c as usize].deleted);
    }

    fn luby(i: u64) -> u64 {
        // Sequence 1,1,2,1,1,2,4,... (Luby et al.); restart i is scaled by
        // the base interval.
        let mut size = 1u64;
        let mut seq = 0u32;
        while size < i + 1 {
            seq += 1;
            size = 2 * size + 1;
        }
        let mut x = i;
        let mut s = size;
        while s - 1 != x {
            s = (s - 1) >> 1;
            seq -= 1;
            x %= s;
        }
        1u64 << seq
    }

    fn pick_branch(&mut self) -> Option<SLit> {
        while let Some(v) = self.order.pop() {
            if self.assigns[v as usize] == Value::Undef {
                return Some(SLit::new(v, self.polarity[v as usize]));
            }
        }
        None
    }

    /// Solves under the given limits.
    pub fn solve(&mut self, limits: Limits) -> SolveStatus {
        self.solve_assuming(&[], limits)
    }

    /// Solves with the given assumption literals held as pseudo-decisions.
    /// `Unsat` under assumptions leaves the solver reusable.
    pub fn solve_assuming(&mut self, assumptions: &[Lit], mut limits: Limits) -> SolveStatus {
        self.model = None;
        self.exported.clear();
        if !self.ok {
            return SolveStatus::Unsat;
        }
        for lit in assumptions {
            self.ensure_vars(lit.var().index());
        }
        self.backtrack_to(0);
        if self.propagate().is_some() {
            self.ok = false;
            return SolveStatus::Unsat;
        }

        let restart_base = 100u64;
        let mut restart_num = 0u64;
        let start_conflicts = self.stats.conflicts;
        loop {
            let budget = restart_base * Self::luby(restart_num);
            match self.search(assumptions, budget, &mut limits, start_conflicts) {
                Some(status) => return status,
                None => {
                    self.stats.restarts += 1;
                    restart_num += 1;
                    self.backtrack_to(0);
                }
            }
        }
    }

    /// One restart-bounded search episode. `None` requests a restart.
    fn search(
        &mut self,
        assumptions: &[Lit],
        conflict_budget: u64,
        limits: &mut Limits,
        start_conflicts: u64,
    ) -> Option<SolveStatus> {
        let mut conflicts_here = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                conflicts_here += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return Some(SolveStatus::Unsat);
                }
                let backjump = self.analyze(confl);
                // Never unwind an assumption pseudo-decision implicitly; the
                // decide loop re-checks them and reports Unsat when one fails.
                self.backtrack_to(backjump);
                self.record_learnt();

                if self.stats.conflicts % 256 == 0 {
                    if let Some(stop) = limits.stop.as_mut() {
                        if stop() {
                            return Some(SolveStatus::Interrupted);
                        }
                    }
                }
                if let Some(max) = limits.max_conflicts {
                    if self.stats.conflicts - start_conflicts >= max {
                        return Some(SolveStatus::Interrupted);
                    }
                }
                continue;
            }

            // Conflict-free state: restart, reduce, or decide.
            if conflicts_here >= conflict_budget {
                return None;
            }
            if self.stats.conflicts >= self.next_reduce {
                self.next_reduce = self.stats.conflicts + 2000 + 300 * self.reductions;
                self.reduce_db();
            }

            if self.decision_level() < assumptions.len() {
                let a = SLit::from_lit(assumptions[self.decision_level()]);
                match self.value(a) {
                    Value::True => {
                        self.trail_lim.push(self.trail.len());
                        continue;
                    }
                    Value::False => return Some(SolveStatus::Unsat),
                    Value::Undef => {
                        self.trail_lim.push(self.trail.len());
                        self.enqueue(a, NO_REASON);
                        continue;
                    }
                }
            }

            match self.pick_branch() {
                Some(lit) => {
                    self.stats.decisions += 1;
                    if self.stats.decisions % 4096 == 0 {
                        if let Some(stop) = limits.stop.as_mut() {
                            if stop() {
                                return Some(SolveStatus::Interrupted);
                            }
                        }
                    }
                    self.trail_lim.push(self.trail.len());
                    self.enqueue(lit, NO_REASON);
                }
                None => {
                    let model: Vec<bool> = self
                        .assigns
                        .iter()
                        .map(|&v| v == Value::True)
                        .collect();
                    #[cfg(debug_assertions)]
                    self.assert_model_sound(&model);
                    self.model = Some(model);
                    self.backtrack_to(0);
                    return Some(SolveStatus::Sat);
                }
            }
        }
    }

    #[cfg(debug_assertions)]
    fn assert_model_sound(&self, model: &[bool]) {
        for slot in self.clauses.iter().filter(|s| !s.deleted) {
            debug_assert!(
                slot.lits
                    .iter()
                    .any(|l| model[l.var() as usize] == l.is_positive()),
                "model violates a stored clause"
            );
        }
    }

    /// The satisfying assignment from the last `Sat` result, indexed by
    /// variable offset. Unconstrained variables default to false.
    pub fn model(&self) -> Option<&[bool]> {
        self.model.as_deref()
    }

    /// Learned clauses retained during the last solve call that passed the
    /// export caps (length <= 8, LBD <= 4).
    pub fn take_exported_learned(&mut self) -> Vec<Clause> {
        core::mem::take(&mut self.exported)
    }

    /// Rough allocation footprint; at least the formula storage size.
    pub fn footprint_bytes(&self) -> u64 {
        let clause_bytes: usize = self
            .clauses
            .iter()
            .map(|s| s.lits.capacity() * core::mem::size_of::<SLit>() + 24)
            .sum();
        let watch_bytes: usize = self
            .watches
            .iter()
            .map(|w| w.capacity() * core::mem::size_of::<Watch>())
            .sum();
        let per_var = core::mem::size_of::<Value>()
            + core::mem::size_of::<u32>() * 2
            + 1
            + core::mem::size_of::<f64>()
            + core::mem::size_of::<u64>();
        (clause_bytes + watch_bytes + self.num_vars * per_var + self.trail.capacity() * 4) as u64
    }
}
