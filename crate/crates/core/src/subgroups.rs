//! Subgroup lattices up to conjugacy, maximal and normal subgroups.
//!
//! The lattice is built bottom-up: start from every cyclic subgroup and
//! repeatedly join a representative of each known class with a cyclic
//! subgroup. Every subgroup arises this way, because joining a conjugate
//! `xRx⁻¹` with `C` is conjugate to joining `R` with `x⁻¹Cx`.

use std::cmp::Ordering;
use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GroupTable, Subset};

/// One conjugacy class of subgroups.
#[derive(Clone, Debug)]
pub struct SubgroupClass {
    pub representative: FiniteGroup,
    pub class_size: usize,
    pub order: usize,
}

impl SubgroupClass {
    pub fn index_in(&self, parent: &FiniteGroup) -> usize {
        parent.order() / self.order
    }

    pub fn normalizer_order(&self, parent: &FiniteGroup) -> usize {
        parent.order() / self.class_size
    }
}

pub(crate) struct ClassData {
    /// Least conjugate by sorted element list.
    pub rep: Subset,
    pub conjugates: Vec<Subset>,
    pub order: usize,
}

pub struct Lattice {
    pub(crate) classes: Vec<ClassData>,
    /// Every subgroup, mapped to its class index.
    pub(crate) all: HashMap<Subset, usize>,
}

/// Lexicographic comparison of the ascending element lists.
pub(crate) fn cmp_sorted(a: &Subset, b: &Subset) -> Ordering {
    a.ones().cmp(b.ones())
}

fn conjugates(table: &GroupTable, h: &Subset) -> Vec<Subset> {
    let n = table.order();
    let members: Vec<usize> = h.ones().collect();
    let mut out: Vec<Subset> = Vec::new();
    let mut seen: HashMap<Subset, ()> = HashMap::new();
    for g in 0..n {
        let mut c = Subset::with_capacity(n);
        for &x in &members {
            c.insert(table.conj(g, x));
        }
        if seen.insert(c.clone(), ()).is_none() {
            out.push(c);
        }
    }
    out
}

fn build(group: &FiniteGroup) -> Lattice {
    let table = group.table();
    let n = group.order();

    let mut cyclic: Vec<(Subset, usize)> = Vec::new();
    let mut seen_cyclic: HashMap<Subset, ()> = HashMap::new();
    for e in 0..n {
        let c = table.closure(&[e]);
        if seen_cyclic.insert(c.clone(), ()).is_none() {
            cyclic.push((c, e));
        }
    }

    struct Pending {
        witness: Subset,
        gens: Vec<usize>,
        conjugates: Vec<Subset>,
    }
    let mut found: Vec<Pending> = Vec::new();
    let mut all: HashMap<Subset, usize> = HashMap::new();
    let mut queue = VecDeque::new();

    let mut add = |h: Subset, gens: Vec<usize>, found: &mut Vec<Pending>| -> Option<usize> {
        if all.contains_key(&h) {
            return None;
        }
        let idx = found.len();
        let conj = conjugates(&table, &h);
        for c in &conj {
            all.insert(c.clone(), idx);
        }
        found.push(Pending {
            witness: h,
            gens,
            conjugates: conj,
        });
        Some(idx)
    };

    for (c, e) in &cyclic {
        if let Some(idx) = add(c.clone(), vec![*e], &mut found) {
            queue.push_back(idx);
        }
    }
    while let Some(idx) = queue.pop_front() {
        let base = found[idx].witness.clone();
        let base_gens = found[idx].gens.clone();
        for (c, e) in &cyclic {
            if base.is_superset(c) {
                continue;
            }
            let mut gens = base_gens.clone();
            gens.push(*e);
            let joined = table.closure(&gens);
            if let Some(new_idx) = add(joined, gens, &mut found) {
                queue.push_back(new_idx);
            }
        }
    }

    let mut classes: Vec<ClassData> = found
        .into_iter()
        .map(|p| {
            let rep = p
                .conjugates
                .iter()
                .min_by(|a, b| cmp_sorted(a, b))
                .expect("class is nonempty")
                .clone();
            let order = rep.count_ones(..);
            ClassData {
                rep,
                conjugates: p.conjugates,
                order,
            }
        })
        .collect();
    classes.sort_by(|a, b| a.order.cmp(&b.order).then_with(|| cmp_sorted(&a.rep, &b.rep)));
    let mut all = HashMap::new();
    for (i, c) in classes.iter().enumerate() {
        for s in &c.conjugates {
            all.insert(s.clone(), i);
        }
    }
    Lattice { classes, all }
}

/// The cached subgroup lattice of `group`, computed on first use.
pub(crate) fn lattice(group: &FiniteGroup, budget: &Budget) -> Result<Arc<Lattice>> {
    Budget::check(
        "subgroup lattice group order",
        group.order() as u64,
        budget.subgroup_order,
    )?;
    Ok(group.lattice_cell().get_or_init(|| Arc::new(build(group))).clone())
}

impl Lattice {
    fn maximal_class_indices(&self, group_order: usize) -> Vec<usize> {
        self.classes
            .iter()
            .enumerate()
            .filter(|(_, c)| c.order < group_order)
            .filter(|(_, c)| {
                !self.all.keys().any(|k| {
                    let ko = k.count_ones(..);
                    ko > c.order && ko < group_order && k.is_superset(&c.rep)
                })
            })
            .map(|(i, _)| i)
            .collect()
    }
}

fn to_class(group: &FiniteGroup, c: &ClassData) -> SubgroupClass {
    SubgroupClass {
        representative: group.subgroup(&c.rep),
        class_size: c.conjugates.len(),
        order: c.order,
    }
}

/// One representative per conjugacy class of subgroups, sorted by order and
/// then by the least sorted element list among conjugates.
pub fn subgroups_up_to_conjugacy(group: &FiniteGroup, budget: &Budget) -> Result<Vec<SubgroupClass>> {
    let lat = lattice(group, budget)?;
    Ok(lat.classes.iter().map(|c| to_class(group, c)).collect())
}

/// Conjugacy classes of maximal proper subgroups in canonical class order.
pub fn maximal_subgroups(group: &FiniteGroup, budget: &Budget) -> Result<Vec<SubgroupClass>> {
    if group.order() < 2 {
        return Err(Error::TrivialGroup);
    }
    let lat = lattice(group, budget)?;
    Ok(lat
        .maximal_class_indices(group.order())
        .into_iter()
        .map(|i| to_class(group, &lat.classes[i]))
        .collect())
}

/// All normal subgroups, trivial and full group included, in canonical order.
pub fn normal_subgroups(group: &FiniteGroup, budget: &Budget) -> Result<Vec<FiniteGroup>> {
    let lat = lattice(group, budget)?;
    Ok(lat
        .classes
        .iter()
        .filter(|c| c.conjugates.len() == 1)
        .map(|c| group.subgroup(&c.rep))
        .collect())
}

/// Exactly two normal subgroups.
pub fn is_simple(group: &FiniteGroup, budget: &Budget) -> Result<bool> {
    Ok(normal_subgroups(group, budget)?.len() == 2)
}

/// `sub` is a maximal proper subgroup: proper, and adjoining any outside
/// element generates the whole group. Needs no lattice.
pub fn is_maximal_subgroup(group: &FiniteGroup, sub: &FiniteGroup) -> Result<bool> {
    let subset = group.subset_of(sub)?;
    let n = group.order();
    if subset.count_ones(..) == n {
        return Ok(false);
    }
    let table = group.table();
    let sub_gens: Vec<usize> = sub
        .generators()
        .iter()
        .filter_map(|g| group.index_of(g))
        .collect();
    for x in 0..n {
        if subset.contains(x) {
            continue;
        }
        let mut gs = sub_gens.clone();
        gs.push(x);
        if table.closure(&gs).count_ones(..) != n {
            return Ok(false);
        }
    }
    Ok(true)
}
