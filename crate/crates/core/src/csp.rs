//! A small finite-domain constraint solver: table constraints, generalized
//! arc consistency, smallest-domain-first branching, ascending values.
//!
//! Shared by homomorphism and polymorphism search.

use std::collections::VecDeque;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Allowed tuples of a constraint, stored flat.
pub(crate) struct Table {
    arity: usize,
    tuples: Vec<u32>,
}

impl Table {
    pub(crate) fn new(arity: usize, tuples: &[Vec<usize>]) -> Arc<Table> {
        Arc::new(Table {
            arity,
            tuples: tuples.iter().flatten().map(|&x| x as u32).collect(),
        })
    }

    fn rows(&self) -> impl Iterator<Item = &[u32]> {
        self.tuples.chunks_exact(self.arity.max(1))
    }
}

struct Constraint {
    scope: Vec<u32>,
    table: Arc<Table>,
    /// Pairs of scope positions holding the same variable.
    repeats: Vec<(usize, usize)>,
}

pub(crate) struct Csp {
    vars: usize,
    values: usize,
    words: usize,
    domains: Vec<u64>,
    constraints: Vec<Constraint>,
    watch: Vec<Vec<u32>>,
    trail: Vec<(u32, u64)>,
    node_cap: u64,
    nodes: u64,
}

/// What to do after a solution is reported.
pub(crate) enum Flow {
    Stop,
    Continue,
}

impl Csp {
    pub(crate) fn new(vars: usize, values: usize, node_cap: u64) -> Self {
        let words = values.div_ceil(64).max(1);
        let mut full = vec![0u64; words];
        for v in 0..values {
            full[v / 64] |= 1 << (v % 64);
        }
        let mut domains = Vec::with_capacity(vars * words);
        for _ in 0..vars {
            domains.extend_from_slice(&full);
        }
        Csp {
            vars,
            values,
            words,
            domains,
            constraints: Vec::new(),
            watch: vec![Vec::new(); vars],
            trail: Vec::new(),
            node_cap,
            nodes: 0,
        }
    }

    pub(crate) fn add(&mut self, scope: Vec<usize>, table: Arc<Table>) {
        debug_assert_eq!(scope.len(), table.arity);
        let mut repeats = Vec::new();
        for i in 0..scope.len() {
            for j in i + 1..scope.len() {
                if scope[i] == scope[j] {
                    repeats.push((i, j));
                }
            }
        }
        let id = self.constraints.len() as u32;
        let mut seen: Vec<usize> = Vec::new();
        for &v in &scope {
            if !seen.contains(&v) {
                seen.push(v);
                self.watch[v].push(id);
            }
        }
        self.constraints.push(Constraint {
            scope: scope.into_iter().map(|v| v as u32).collect(),
            table,
            repeats,
        });
    }

    #[inline]
    fn has(&self, var: usize, val: usize) -> bool {
        self.domains[var * self.words + val / 64] >> (val % 64) & 1 == 1
    }

    fn size(&self, var: usize) -> u32 {
        self.domains[var * self.words..(var + 1) * self.words]
            .iter()
            .map(|w| w.count_ones())
            .sum()
    }

    fn set_word(&mut self, idx: usize, value: u64) {
        let old = self.domains[idx];
        if old != value {
            self.trail.push((idx as u32, old));
            self.domains[idx] = value;
        }
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (idx, old) = self.trail.pop().expect("trail above mark");
            self.domains[idx as usize] = old;
        }
    }

    /// Revise one constraint; returns the changed variables or `None` on a wipe-out.
    fn revise(&mut self, c: usize, changed: &mut Vec<usize>) -> bool {
        let words = self.words;
        let con = &self.constraints[c];
        let arity = con.scope.len();
        let mut support = vec![0u64; arity * words];
        for row in con.table.rows() {
            let ok = (0..arity).all(|i| self.has(con.scope[i] as usize, row[i] as usize))
                && con.repeats.iter().all(|&(i, j)| row[i] == row[j]);
            if ok {
                for (i, &v) in row.iter().enumerate() {
                    support[i * words + v as usize / 64] |= 1 << (v % 64);
                }
            }
        }
        let scope: Vec<usize> = con.scope.iter().map(|&v| v as usize).collect();
        for (i, &var) in scope.iter().enumerate() {
            let mut touched = false;
            for w in 0..words {
                let idx = var * words + w;
                let new = self.domains[idx] & support[i * words + w];
                if new != self.domains[idx] {
                    self.set_word(idx, new);
                    touched = true;
                }
            }
            if touched {
                if self.size(var) == 0 {
                    return false;
                }
                changed.push(var);
            }
        }
        true
    }

    fn propagate(&mut self, initial: impl IntoIterator<Item = usize>) -> bool {
        let mut queued = vec![false; self.constraints.len()];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for c in initial {
            if !queued[c] {
                queued[c] = true;
                queue.push_back(c);
            }
        }
        let mut changed = Vec::new();
        while let Some(c) = queue.pop_front() {
            queued[c] = false;
            changed.clear();
            if !self.revise(c, &mut changed) {
                return false;
            }
            for &v in &changed {
                for &d in &self.watch[v] {
                    let d = d as usize;
                    if d != c && !queued[d] {
                        queued[d] = true;
                        queue.push_back(d);
                    }
                }
            }
        }
        true
    }

    fn select(&self) -> Option<usize> {
        let mut best: Option<(u32, usize)> = None;
        for v in 0..self.vars {
            let s = self.size(v);
            if s > 1 && best.is_none_or(|(bs, _)| s < bs) {
                best = Some((s, v));
                if s == 2 {
                    break;
                }
            }
        }
        best.map(|(_, v)| v)
    }

    fn values_of(&self, var: usize) -> Vec<usize> {
        (0..self.values).filter(|&v| self.has(var, v)).collect()
    }

    fn assignment(&self) -> Vec<usize> {
        (0..self.vars)
            .map(|v| self.values_of(v)[0])
            .collect()
    }

    /// Depth-first search; `on_solution` decides whether to keep going.
    /// Returns `Err(Budget)` when the node cap is hit.
    pub(crate) fn search(
        &mut self,
        what: &'static str,
        mut on_solution: impl FnMut(Vec<usize>) -> Flow,
    ) -> Result<()> {
        if (0..self.vars).any(|v| self.size(v) == 0) {
            return Ok(());
        }
        if !self.propagate(0..self.constraints.len()) {
            return Ok(());
        }
        struct Frame {
            var: usize,
            values: Vec<usize>,
            next: usize,
            mark: usize,
        }
        let mut stack: Vec<Frame> = Vec::new();
        loop {
            match self.select() {
                None => {
                    if let Flow::Stop = on_solution(self.assignment()) {
                        return Ok(());
                    }
                }
                Some(var) => stack.push(Frame {
                    var,
                    values: self.values_of(var),
                    next: 0,
                    mark: self.trail.len(),
                }),
            }
            // advance to the next consistent branch
            loop {
                let Some(frame) = stack.last_mut() else {
                    return Ok(());
                };
                let (var, mark) = (frame.var, frame.mark);
                if frame.next >= frame.values.len() {
                    stack.pop();
                    if let Some(parent) = stack.last() {
                        let m = parent.mark;
                        self.undo(m);
                    }
                    continue;
                }
                let val = frame.values[frame.next];
                frame.next += 1;
                self.undo(mark);
                self.nodes += 1;
                if self.nodes > self.node_cap {
                    return Err(Error::Budget {
                        what,
                        cap: self.node_cap,
                    });
                }
                let base = var * self.words;
                for w in 0..self.words {
                    let word = if w == val / 64 { 1u64 << (val % 64) } else { 0 };
                    self.set_word(base + w, word);
                }
                let watchers: Vec<usize> = self.watch[var].iter().map(|&c| c as usize).collect();
                if self.propagate(watchers) {
                    break;
                }
            }
        }
    }

    /// First solution in search order.
    pub(crate) fn solve(&mut self, what: &'static str) -> Result<Option<Vec<usize>>> {
        let mut found = None;
        self.search(what, |s| {
            found = Some(s);
            Flow::Stop
        })?;
        Ok(found)
    }

    /// All solutions, in search order.
    pub(crate) fn solve_all(&mut self, what: &'static str) -> Result<Vec<Vec<usize>>> {
        let mut all = Vec::new();
        self.search(what, |s| {
            all.push(s);
            Flow::Continue
        })?;
        Ok(all)
    }
}
