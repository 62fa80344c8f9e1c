//! Finite relational structures, the structures `S(G↷X)`, components,
//! relation words, isomorphism and export.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::action::GroupAction;
use crate::error::{Error, Result};

/// A relation: its arity and a sorted, duplicate-free tuple list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub arity: usize,
    pub tuples: Vec<Vec<usize>>,
}

impl Relation {
    pub fn new(arity: usize, tuples: impl IntoIterator<Item = Vec<usize>>) -> Self {
        let set: BTreeSet<Vec<usize>> = tuples.into_iter().collect();
        Relation {
            arity,
            tuples: set.into_iter().collect(),
        }
    }

    pub fn contains(&self, tuple: &[usize]) -> bool {
        self.tuples
            .binary_search_by(|t| t.as_slice().cmp(tuple))
            .is_ok()
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }
}

/// Finite domain `{0, .., domain-1}` with named relations (sorted by name).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelStructure {
    pub domain: usize,
    pub relations: BTreeMap<String, Relation>,
}

/// Direction of a step in a relation word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// Which relations [`structure_of_action`] emits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Labels {
    /// One relation per generator, named by the generator label.
    Generators,
    /// One relation per element, named `e<index>` (zero padded).
    AllElements,
}

impl RelStructure {
    pub fn new(domain: usize) -> Result<Self> {
        if domain == 0 {
            return Err(Error::InvalidStructure("domain must be nonempty".into()));
        }
        Ok(RelStructure {
            domain,
            relations: BTreeMap::new(),
        })
    }

    pub fn with_relation(
        mut self,
        name: impl Into<String>,
        arity: usize,
        tuples: impl IntoIterator<Item = Vec<usize>>,
    ) -> Result<Self> {
        self.add_relation(name, arity, tuples)?;
        Ok(self)
    }

    pub fn add_relation(
        &mut self,
        name: impl Into<String>,
        arity: usize,
        tuples: impl IntoIterator<Item = Vec<usize>>,
    ) -> Result<()> {
        let rel = Relation::new(arity, tuples);
        self.check_relation(&rel)?;
        self.relations.insert(name.into(), rel);
        Ok(())
    }

    fn check_relation(&self, rel: &Relation) -> Result<()> {
        if rel.arity == 0 {
            return Err(Error::InvalidStructure("relations need positive arity".into()));
        }
        for t in &rel.tuples {
            if t.len() != rel.arity {
                return Err(Error::InvalidStructure(format!(
                    "tuple {t:?} does not have arity {}",
                    rel.arity
                )));
            }
            if let Some(x) = t.iter().find(|&&x| x >= self.domain) {
                return Err(Error::InvalidStructure(format!(
                    "entry {x} outside domain of size {}",
                    self.domain
                )));
            }
        }
        Ok(())
    }

    /// Check invariants, normalizing tuple order (used after deserializing).
    pub fn validate(mut self) -> Result<Self> {
        if self.domain == 0 {
            return Err(Error::InvalidStructure("domain must be nonempty".into()));
        }
        let rels = std::mem::take(&mut self.relations);
        for (name, rel) in rels {
            let rel = Relation::new(rel.arity, rel.tuples);
            self.check_relation(&rel)?;
            self.relations.insert(name, rel);
        }
        Ok(self)
    }

    pub fn relation(&self, name: &str) -> Result<&Relation> {
        self.relations
            .get(name)
            .ok_or_else(|| Error::InvalidStructure(format!("no relation named {name:?}")))
    }

    pub fn is_binary(&self) -> bool {
        self.relations.values().all(|r| r.arity == 2)
    }

    fn require_binary(&self) -> Result<()> {
        match self.relations.iter().find(|(_, r)| r.arity != 2) {
            Some((name, r)) => Err(Error::InvalidStructure(format!(
                "relation {name:?} has arity {}, expected 2",
                r.arity
            ))),
            None => Ok(()),
        }
    }

    /// Substructure on `points`, relabelled by position.
    pub fn induced(&self, points: &[usize]) -> RelStructure {
        let mut index = vec![usize::MAX; self.domain];
        for (i, &p) in points.iter().enumerate() {
            index[p] = i;
        }
        let relations = self
            .relations
            .iter()
            .map(|(name, r)| {
                let tuples = r
                    .tuples
                    .iter()
                    .filter(|t| t.iter().all(|&x| index[x] != usize::MAX))
                    .map(|t| t.iter().map(|&x| index[x]).collect());
                (name.clone(), Relation::new(r.arity, tuples))
            })
            .collect();
        RelStructure {
            domain: points.len(),
            relations,
        }
    }

    /// Every tuple reversed.
    pub fn reversed(&self) -> RelStructure {
        let relations = self
            .relations
            .iter()
            .map(|(name, r)| {
                let tuples = r.tuples.iter().map(|t| t.iter().rev().copied().collect());
                (name.clone(), Relation::new(r.arity, tuples))
            })
            .collect();
        RelStructure {
            domain: self.domain,
            relations,
        }
    }

    /// Only the named relations.
    pub fn reduct(&self, names: &[&str]) -> Result<RelStructure> {
        let mut out = RelStructure::new(self.domain)?;
        for name in names {
            let r = self.relation(name)?;
            out.relations.insert(name.to_string(), r.clone());
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("structures always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: RelStructure = serde_json::from_str(text)?;
        s.validate()
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// DOT digraph with one color per relation. A relation equal to its own
    /// inverse is drawn as undirected dashed edges, one per unordered pair.
    pub fn to_dot(&self) -> Result<String> {
        self.require_binary()?;
        const COLORS: [&str; 8] = [
            "black", "red", "blue", "darkgreen", "orange", "purple", "brown", "gray",
        ];
        let mut out = String::from("digraph S {\n");
        for v in 0..self.domain {
            let _ = writeln!(out, "  {};", v + 1);
        }
        for (i, (name, r)) in self.relations.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let self_inverse = r.tuples.iter().all(|t| r.contains(&[t[1], t[0]]));
            for t in &r.tuples {
                if self_inverse {
                    if t[0] <= t[1] {
                        let _ = writeln!(
                            out,
                            "  {} -> {} [label=\"{name}\", color={color}, style=dashed, dir=none];",
                            t[0] + 1,
                            t[1] + 1
                        );
                    }
                } else {
                    let _ = writeln!(
                        out,
                        "  {} -> {} [label=\"{name}\", color={color}];",
                        t[0] + 1,
                        t[1] + 1
                    );
                }
            }
        }
        out.push_str("}\n");
        Ok(out)
    }
}

/// The directed cycle `C_n` with relation `E`.
pub fn cycle(n: usize) -> Result<RelStructure> {
    RelStructure::new(n)?.with_relation("E", 2, (0..n).map(|i| vec![i, (i + 1) % n]))
}

/// The transitive tournament on `{0, 1, 2}`.
pub fn t3() -> RelStructure {
    RelStructure::new(3)
        .and_then(|s| s.with_relation("E", 2, [vec![0, 1], vec![0, 2], vec![1, 2]]))
        .expect("T3 is well formed")
}

/// A single directed edge.
pub fn p1() -> RelStructure {
    RelStructure::new(2)
        .and_then(|s| s.with_relation("E", 2, [vec![0, 1]]))
        .expect("P1 is well formed")
}

/// Built-in structures: `T3`, `P1`, `Cn` (so `C1` is a loop).
pub fn builtin(name: &str) -> Result<RelStructure> {
    let upper = name.trim().to_ascii_uppercase();
    match upper.as_str() {
        "T3" => Ok(t3()),
        "P1" => Ok(p1()),
        _ => match upper.strip_prefix('C').and_then(|n| n.parse::<usize>().ok()) {
            Some(n) if n >= 1 => cycle(n),
            _ => Err(Error::Parse(format!(
                "unknown structure {name:?}; known: T3, P1, Cn"
            ))),
        },
    }
}

/// A built-in name, or else a JSON structure file.
pub fn resolve_structure(spec: &str) -> Result<RelStructure> {
    match builtin(spec) {
        Ok(s) => Ok(s),
        Err(e) => {
            let path = Path::new(spec);
            if path.exists() {
                RelStructure::load(path)
            } else {
                Err(e)
            }
        }
    }
}

/// `S(G↷X)`: one binary relation `{(x, g x)}` per chosen element.
pub fn structure_of_action(action: &GroupAction, labels: Labels) -> RelStructure {
    let m = action.points();
    let mut relations = BTreeMap::new();
    let graph = |p: &crate::perm::Permutation| Relation::new(2, (0..m).map(|x| vec![x, p.apply(x)]));
    match labels {
        Labels::Generators => {
            for (label, g) in action.group().labels().iter().zip(action.generator_images()) {
                relations.insert(label.clone(), graph(g));
            }
        }
        Labels::AllElements => {
            let width = action.group().order().to_string().len();
            for (i, p) in action.element_images().iter().enumerate() {
                relations.insert(format!("e{i:0width$}"), graph(p));
            }
        }
    }
    RelStructure {
        domain: m,
        relations,
    }
}

/// Weakly connected components (all tuples read as undirected adjacency),
/// sorted internally and by least point.
pub fn connected_components(structure: &RelStructure) -> Vec<Vec<usize>> {
    let n = structure.domain;
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for r in structure.relations.values() {
        for t in &r.tuples {
            for &x in &t[1..] {
                let a = find(&mut parent, t[0]);
                let b = find(&mut parent, x);
                // the root is always the least point of its block
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for x in 0..n {
        let r = find(&mut parent, x);
        blocks.entry(r).or_default().push(x);
    }
    blocks.into_values().collect()
}

/// Relational composition along a word of binary relations; the empty word
/// gives the identity relation.
pub fn compose_relation_word(
    structure: &RelStructure,
    word: &[(&str, Direction)],
) -> Result<BTreeSet<(usize, usize)>> {
    let n = structure.domain;
    let mut current: BTreeSet<(usize, usize)> = (0..n).map(|x| (x, x)).collect();
    for (name, dir) in word {
        let r = structure.relation(name)?;
        if r.arity != 2 {
            return Err(Error::InvalidStructure(format!(
                "relation {name:?} is not binary"
            )));
        }
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
        for t in &r.tuples {
            match dir {
                Direction::Forward => succ[t[0]].push(t[1]),
                Direction::Backward => succ[t[1]].push(t[0]),
            }
        }
        current = current
            .iter()
            .flat_map(|&(a, b)| succ[b].iter().map(move |&c| (a, c)))
            .collect();
    }
    Ok(current)
}

fn signature(s: &RelStructure) -> Vec<Vec<usize>> {
    // per point: occurrence counts for every (relation, position)
    let mut sig = vec![Vec::new(); s.domain];
    for r in s.relations.values() {
        let base = sig[0].len();
        for v in sig.iter_mut() {
            v.extend(std::iter::repeat(0).take(r.arity));
        }
        for t in &r.tuples {
            for (i, &x) in t.iter().enumerate() {
                sig[x][base + i] += 1;
            }
        }
    }
    sig
}

/// A relation-name preserving isomorphism `a -> b`, by backtracking with
/// degree-signature pruning.
pub fn find_isomorphism(a: &RelStructure, b: &RelStructure) -> Option<Vec<usize>> {
    if a.domain != b.domain || a.relations.len() != b.relations.len() {
        return None;
    }
    for (name, ra) in &a.relations {
        let rb = b.relations.get(name)?;
        if ra.arity != rb.arity || ra.len() != rb.len() {
            return None;
        }
    }
    let n = a.domain;
    let sa = signature(a);
    let sb = signature(b);
    let mut ms = sa.clone();
    let mut mb = sb.clone();
    ms.sort();
    mb.sort();
    if ms != mb {
        return None;
    }
    // breadth-first order over adjacency so constraints bite early
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for r in a.relations.values() {
        for t in &r.tuples {
            for &x in t {
                for &y in t {
                    if x != y {
                        adj[x].insert(y);
                    }
                }
            }
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            order.push(x);
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
    }
    let mut position = vec![0; n];
    for (i, &x) in order.iter().enumerate() {
        position[x] = i;
    }
    // tuples of `a` grouped by the latest-assigned entry
    let mut checks: Vec<Vec<(&str, &Vec<usize>)>> = vec![Vec::new(); n];
    for (name, r) in &a.relations {
        for t in &r.tuples {
            let last = t.iter().map(|&x| position[x]).max().expect("arity > 0");
            checks[last].push((name.as_str(), t));
        }
    }
    let b_sets: BTreeMap<&str, HashSet<&Vec<usize>>> = b
        .relations
        .iter()
        .map(|(k, r)| (k.as_str(), r.tuples.iter().collect()))
        .collect();

    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn go(
        depth: usize,
        order: &[usize],
        sa: &[Vec<usize>],
        sb: &[Vec<usize>],
        checks: &[Vec<(&str, &Vec<usize>)>],
        b_sets: &BTreeMap<&str, HashSet<&Vec<usize>>>,
        map: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if depth == order.len() {
            return true;
        }
        let x = order[depth];
        for y in 0..map.len() {
            if used[y] || sa[x] != sb[y] {
                continue;
            }
            map[x] = y;
            let ok = checks[depth].iter().all(|(name, t)| {
                let img: Vec<usize> = t.iter().map(|&v| map[v]).collect();
                b_sets[name].contains(&img)
            });
            if ok {
                used[y] = true;
                if go(depth + 1, order, sa, sb, checks, b_sets, map, used) {
                    return true;
                }
                used[y] = false;
            }
            map[x] = usize::MAX;
        }
        false
    }
    if go(0, &order, &sa, &sb, &checks, &b_sets, &mut map, &mut used) {
        Some(map)
    } else {
        None
    }
}

pub fn is_isomorphic(a: &RelStructure, b: &RelStructure) -> bool {
    find_isomorphism(a, b).is_some()
}

/// For each component (in [`connected_components`] order), the index of a
/// component isomorphic to its reversal, preferring itself, else the least.
pub fn dual_pairing(structure: &RelStructure) -> Result<Vec<Option<usize>>> {
    structure.require_binary()?;
    let comps = connected_components(structure);
    let subs: Vec<RelStructure> = comps.iter().map(|c| structure.induced(c)).collect();
    Ok(subs
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let rev = s.reversed();
            if is_isomorphic(&rev, s) {
                return Some(i);
            }
            subs.iter().position(|t| is_isomorphic(&rev, t))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::prim_action;
    use crate::budget::Budget;
    use crate::catalog;

    #[test]
    fn loop_from_trivial_action() {
        let g = catalog::group("Z1").unwrap();
        let s = structure_of_action(&GroupAction::natural(&g), Labels::Generators);
        assert_eq!(s.domain, 1);
        assert_eq!(s.relations.values().next().unwrap().tuples, vec![vec![0, 0]]);
        assert!(is_isomorphic(&s, &cycle(1).unwrap().reduct(&["E"]).unwrap().renamed("f")));
    }

    impl RelStructure {
        fn renamed(&self, to: &str) -> RelStructure {
            let mut out = self.clone();
            let rel = out.relations.remove("E").unwrap();
            out.relations.insert(to.into(), rel);
            out
        }
    }

    #[test]
    fn regular_cyclic_is_cycle() {
        let g = catalog::group("Z5").unwrap();
        let s = structure_of_action(&GroupAction::regular(&g), Labels::Generators);
        assert!(is_isomorphic(&s, &cycle(5).unwrap().renamed("f")));
        let all = structure_of_action(&GroupAction::regular(&g), Labels::AllElements);
        assert_eq!(all.relations.len(), 5);
    }

    #[test]
    fn components_of_prim_a5() {
        let g = catalog::group("A5").unwrap();
        let p = prim_action(&g, &Budget::default()).unwrap();
        let s = structure_of_action(&p, Labels::Generators);
        let comps = connected_components(&s);
        assert_eq!(comps, p.orbits());
        let mut sizes: Vec<usize> = comps.iter().map(|c| c.len()).collect();
        sizes.sort();
        assert_eq!(sizes, vec![5, 6, 10]);
        assert!(dual_pairing(&s).unwrap().iter().all(|d| d.is_some()));
    }

    #[test]
    fn edgeless_components() {
        let s = RelStructure::new(3).unwrap();
        assert_eq!(connected_components(&s), vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn relation_words() {
        let s = cycle(5).unwrap();
        let sq = compose_relation_word(&s, &[("E", Direction::Forward), ("E", Direction::Forward)])
            .unwrap();
        let expect: BTreeSet<(usize, usize)> = (0..5).map(|x| (x, (x + 2) % 5)).collect();
        assert_eq!(sq, expect);
        let id: BTreeSet<(usize, usize)> = (0..5).map(|x| (x, x)).collect();
        assert_eq!(compose_relation_word(&s, &[]).unwrap(), id);
        let back = compose_relation_word(&s, &[("E", Direction::Forward), ("E", Direction::Backward)])
            .unwrap();
        assert_eq!(back, id);
    }

    #[test]
    fn word_rejects_non_binary() {
        let s = RelStructure::new(2)
            .unwrap()
            .with_relation("R", 3, [vec![0, 1, 1]])
            .unwrap();
        assert!(compose_relation_word(&s, &[("R", Direction::Forward)]).is_err());
    }

    #[test]
    fn duals() {
        assert_eq!(dual_pairing(&cycle(3).unwrap()).unwrap(), vec![Some(0)]);
        assert_eq!(dual_pairing(&cycle(1).unwrap()).unwrap(), vec![Some(0)]);
        assert_eq!(dual_pairing(&t3()).unwrap(), vec![Some(0)]);
        assert_eq!(dual_pairing(&p1()).unwrap(), vec![Some(0)]);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let s = t3();
        let back = RelStructure::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
        assert!(RelStructure::from_json(r#"{"domain":2,"relations":{"E":{"arity":2,"tuples":[[0,2]]}}}"#).is_err());
        assert!(RelStructure::from_json(r#"{"domain":2,"relations":{"E":{"arity":2,"tuples":[[0]]}}}"#).is_err());
    }

    #[test]
    fn dot_output() {
        let dot = cycle(1).unwrap().to_dot().unwrap();
        assert!(dot.contains("1 -> 1"));
        let g = catalog::group("Z2").unwrap();
        let s = structure_of_action(&GroupAction::regular(&g), Labels::Generators);
        let dot = s.to_dot().unwrap();
        assert!(dot.contains("dashed"));
        assert_eq!(dot.matches("->").count(), 1);
        let c5 = cycle(5).unwrap().to_dot().unwrap();
        assert_eq!(c5.matches("->").count(), 5);
        assert!(!c5.contains("dashed"));
    }

    #[test]
    fn builtins() {
        assert_eq!(builtin("C1").unwrap().domain, 1);
        assert_eq!(builtin("t3").unwrap().relation("E").unwrap().len(), 3);
        assert!(builtin("C0").is_err());
        assert!(builtin("Q").is_err());
    }
}
