//! Polymorphism search: table cells of every symbol are merged along the
//! identities of the condition, then filled by constraint search.

use std::collections::{BTreeMap, HashSet};

use crate::budget::{saturating_pow, Budget};
use crate::condition::{increment, FiniteOperation, MinorCondition};
use crate::csp::{Csp, Table};
use crate::error::{Error, Result};
use crate::structure::RelStructure;

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            // keep the smaller index as root, so classes are named by
            // their least cell
            self.0[a.max(b)] = a.min(b);
        }
    }
}

/// Layout of all table cells: symbol `s` owns `offsets[s] .. offsets[s] + d^arity`.
struct Cells {
    domain: usize,
    offsets: Vec<usize>,
    arities: Vec<usize>,
}

impl Cells {
    fn cell(&self, symbol: usize, tuple: &[usize]) -> usize {
        self.offsets[symbol] + tuple.iter().fold(0, |acc, &x| acc * self.domain + x)
    }
}

struct Prepared {
    csp: Csp,
    cells: Cells,
    class_of: Vec<usize>,
}

fn prepare(structure: &RelStructure, condition: &MinorCondition, budget: &Budget) -> Result<Prepared> {
    let d = structure.domain;
    let mut offsets = Vec::new();
    let mut total: u64 = 0;
    for (_, arity) in &condition.symbols {
        offsets.push(total as usize);
        total = total.saturating_add(saturating_pow(d as u64, *arity as u64));
        Budget::check("polymorphism table cells", total, budget.enumeration)?;
    }
    let cells = Cells {
        domain: d,
        offsets,
        arities: condition.symbols.iter().map(|(_, a)| *a).collect(),
    };
    let total = total as usize;
    let mut uf = UnionFind((0..total).collect());
    for id in &condition.identities {
        let count = saturating_pow(d as u64, id.variable_count as u64);
        Budget::check("identity assignments", count, budget.enumeration)?;
        let mut assign = vec![0; id.variable_count];
        let mut lt = vec![0; id.left.args.len()];
        let mut rt = vec![0; id.right.args.len()];
        for _ in 0..count {
            for (slot, &v) in lt.iter_mut().zip(&id.left.args) {
                *slot = assign[v];
            }
            for (slot, &v) in rt.iter_mut().zip(&id.right.args) {
                *slot = assign[v];
            }
            uf.union(cells.cell(id.left.symbol, &lt), cells.cell(id.right.symbol, &rt));
            increment(&mut assign, d);
        }
    }
    // classes numbered by least cell, i.e. in lexicographic cell order
    let mut class_of = vec![usize::MAX; total];
    let mut classes = 0;
    for c in 0..total {
        let r = uf.find(c);
        if class_of[r] == usize::MAX {
            class_of[r] = classes;
            classes += 1;
        }
        class_of[c] = class_of[r];
    }

    let mut csp = Csp::new(classes, d, budget.search_nodes);
    for (name, rel) in &structure.relations {
        let table = Table::new(rel.arity, &rel.tuples);
        let m = rel.len();
        if m == 0 {
            // an empty relation is preserved vacuously
            continue;
        }
        for (s, &arity) in cells.arities.iter().enumerate() {
            let choices = saturating_pow(m as u64, arity as u64);
            Budget::check("polymorphism constraints", choices, budget.enumeration)?;
            let mut seen: HashSet<Vec<usize>> = HashSet::new();
            let mut pick = vec![0; arity];
            let mut column = vec![0; arity];
            for _ in 0..choices {
                let scope: Vec<usize> = (0..rel.arity)
                    .map(|j| {
                        for (slot, &row) in column.iter_mut().zip(&pick) {
                            *slot = rel.tuples[row][j];
                        }
                        class_of[cells.cell(s, &column)]
                    })
                    .collect();
                if seen.insert(scope.clone()) {
                    csp.add(scope, table.clone());
                }
                increment(&mut pick, m);
            }
            let _ = name;
        }
    }
    Ok(Prepared {
        csp,
        cells,
        class_of,
    })
}

fn decode(
    condition: &MinorCondition,
    cells: &Cells,
    class_of: &[usize],
    values: &[usize],
) -> Result<BTreeMap<String, FiniteOperation>> {
    condition
        .symbols
        .iter()
        .enumerate()
        .map(|(s, (name, arity))| {
            let len = saturating_pow(cells.domain as u64, *arity as u64) as usize;
            let table = (0..len)
                .map(|i| values[class_of[cells.offsets[s] + i]] as u32)
                .collect();
            Ok((name.clone(), FiniteOperation::new(cells.domain, *arity, table)?))
        })
        .collect()
}

/// Operations on the domain of `structure`, one per symbol, that preserve
/// every relation and satisfy the condition; `None` when none exist.
pub fn find_polymorphism(
    structure: &RelStructure,
    condition: &MinorCondition,
    budget: &Budget,
) -> Result<Option<BTreeMap<String, FiniteOperation>>> {
    let Prepared {
        mut csp,
        cells,
        class_of,
    } = prepare(structure, condition, budget)?;
    match csp.solve("polymorphism search nodes")? {
        Some(values) => Ok(Some(decode(condition, &cells, &class_of, &values)?)),
        None => Ok(None),
    }
}

/// Every solution of [`find_polymorphism`] (used to enumerate all n-ary
/// polymorphisms via an identity-free condition).
pub fn all_polymorphisms(
    structure: &RelStructure,
    condition: &MinorCondition,
    budget: &Budget,
) -> Result<Vec<BTreeMap<String, FiniteOperation>>> {
    let Prepared {
        mut csp,
        cells,
        class_of,
    } = prepare(structure, condition, budget)?;
    let sols = csp.solve_all("polymorphism search nodes")?;
    sols.iter()
        .map(|v| decode(condition, &cells, &class_of, v))
        .collect()
}

/// All `n`-ary polymorphisms, sorted by value table.
pub fn polymorphisms_of_arity(
    structure: &RelStructure,
    arity: usize,
    budget: &Budget,
) -> Result<Vec<FiniteOperation>> {
    let cond = MinorCondition::new(
        vec![("f".to_string(), arity)],
        Vec::new(),
        crate::condition::ConditionKind::Custom,
    )?;
    let mut ops: Vec<FiniteOperation> = all_polymorphisms(structure, &cond, budget)?
        .into_iter()
        .map(|mut m| m.remove("f").expect("single symbol"))
        .collect();
    ops.sort_by(|a, b| a.table().cmp(b.table()));
    Ok(ops)
}

/// Does `op` preserve every relation of `structure`?
pub fn is_polymorphism(structure: &RelStructure, op: &FiniteOperation, budget: &Budget) -> Result<bool> {
    if op.domain() != structure.domain {
        return Err(Error::Precondition("operation and structure domains differ".into()));
    }
    let n = op.arity();
    for rel in structure.relations.values() {
        let m = rel.len();
        if m == 0 {
            continue;
        }
        let choices = saturating_pow(m as u64, n as u64);
        Budget::check("polymorphism check", choices, budget.enumeration)?;
        let mut pick = vec![0; n];
        let mut column = vec![0; n];
        let mut image = vec![0; rel.arity];
        for _ in 0..choices {
            for (j, slot) in image.iter_mut().enumerate() {
                for (c, &row) in column.iter_mut().zip(&pick) {
                    *c = rel.tuples[row][j];
                }
                *slot = op.apply(&column);
            }
            if !rel.contains(&image) {
                return Ok(false);
            }
            increment(&mut pick, m);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::condition::{cyclic, fs, maltsev, op_satisfies, ts};
    use crate::structure::{cycle, t3};

    #[test]
    fn c2_has_cyclic3() {
        let b = Budget::default();
        let c = cyclic(3).unwrap();
        let w = find_polymorphism(&cycle(2).unwrap(), &c, &b).unwrap().unwrap();
        assert!(op_satisfies(&w, &c, &b).unwrap());
        assert!(is_polymorphism(&cycle(2).unwrap(), &w["f"], &b).unwrap());
    }

    #[test]
    fn t3_has_no_maltsev() {
        let b = Budget::default();
        assert!(find_polymorphism(&t3(), &maltsev(), &b).unwrap().is_none());
    }

    #[test]
    fn t3_ts_is_minimum() {
        let b = Budget::default();
        for n in 1..=4 {
            let w = find_polymorphism(&t3(), &ts(n).unwrap(), &b).unwrap().unwrap();
            assert_eq!(w["f"], FiniteOperation::minimum(3, n).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn binary_polymorphisms_of_c2() {
        let b = Budget::default();
        let ops = polymorphisms_of_arity(&cycle(2).unwrap(), 2, &b).unwrap();
        assert_eq!(ops.len(), 4);
        assert!(find_polymorphism(&cycle(2).unwrap(), &fs(2).unwrap(), &b).unwrap().is_none());
        assert!(find_polymorphism(&cycle(3).unwrap(), &fs(2).unwrap(), &b).unwrap().is_some());
    }
}
