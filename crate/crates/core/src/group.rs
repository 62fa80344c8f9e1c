//! Concrete permutation groups with a cached element list.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::{Arc, OnceLock};

use fixedbitset::FixedBitSet;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Set of element indices of a parent group.
pub type Subset = FixedBitSet;

/// Closure of `generators` under composition, sorted lexicographically.
///
/// Finite groups are closed under inverses once they are closed under
/// composition, so a breadth-first walk over left multiplication suffices.
pub fn generate_elements(generators: &[Permutation], cap: u64) -> Result<Vec<Permutation>> {
    let Some(first) = generators.first() else {
        return Err(Error::Parse("a group needs at least one generator".into()));
    };
    let degree = first.degree();
    for g in generators {
        if g.degree() != degree {
            return Err(Error::DegreeMismatch {
                expected: degree,
                found: g.degree(),
            });
        }
    }
    let id = Permutation::identity(degree);
    let mut seen: HashMap<Permutation, ()> = HashMap::new();
    seen.insert(id.clone(), ());
    let mut queue = VecDeque::from([id]);
    while let Some(e) = queue.pop_front() {
        for s in generators {
            let next = s.compose(&e);
            if !seen.contains_key(&next) {
                if seen.len() as u64 >= cap {
                    return Err(Error::Budget {
                        what: "group element closure",
                        cap,
                    });
                }
                seen.insert(next.clone(), ());
                queue.push_back(next);
            }
        }
    }
    let mut elements: Vec<Permutation> = seen.into_keys().collect();
    elements.sort();
    Ok(elements)
}

/// Multiplication table over sorted element indices.
pub struct GroupTable {
    order: usize,
    mul: Vec<u32>,
    inv: Vec<u32>,
    identity: usize,
}

impl GroupTable {
    /// Index of `elements[a] ∘ elements[b]`.
    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `g h g⁻¹`.
    #[inline]
    pub fn conj(&self, g: usize, h: usize) -> usize {
        self.mul(self.mul(g, h), self.inv(g))
    }

    /// Subgroup generated by the given element indices.
    pub fn closure(&self, gens: &[usize]) -> Subset {
        let mut set = Subset::with_capacity(self.order);
        set.insert(self.identity);
        let mut queue = vec![self.identity];
        while let Some(e) = queue.pop() {
            for &s in gens {
                let next = self.mul(s, e);
                if !set.contains(next) {
                    set.insert(next);
                    queue.push(next);
                }
            }
        }
        set
    }

    /// Subgroup generated by a subgroup together with extra elements.
    pub fn join(&self, base: &Subset, extra: &[usize]) -> Subset {
        if extra.iter().all(|&x| base.contains(x)) {
            return base.clone();
        }
        let mut gens: Vec<usize> = base.ones().collect();
        gens.extend_from_slice(extra);
        // a generating set of `base` is enough, but `base` itself is small
        self.closure(&gens)
    }
}

struct GroupInner {
    degree: usize,
    generators: Vec<Permutation>,
    labels: Vec<String>,
    name: Option<String>,
    elements: Vec<Permutation>,
    index: HashMap<Permutation, usize>,
    table: OnceLock<Arc<GroupTable>>,
    lattice: OnceLock<Arc<crate::subgroups::Lattice>>,
}

/// A finite permutation group given by generators, with its elements
/// sorted lexicographically and cached.
///
/// Cloning is cheap; all clones share the element list and caches.
#[derive(Clone)]
pub struct FiniteGroup {
    inner: Arc<GroupInner>,
}

fn default_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("g{i}")).collect()
}

impl FiniteGroup {
    pub fn generate(generators: Vec<Permutation>) -> Result<Self> {
        Self::generate_with_cap(generators, Budget::default().closure)
    }

    pub fn generate_with_cap(generators: Vec<Permutation>, cap: u64) -> Result<Self> {
        let elements = generate_elements(&generators, cap)?;
        let labels = default_labels(generators.len());
        Ok(Self::from_parts(
            generators[0].degree(),
            generators,
            labels,
            None,
            elements,
        ))
    }

    fn from_parts(
        degree: usize,
        generators: Vec<Permutation>,
        labels: Vec<String>,
        name: Option<String>,
        elements: Vec<Permutation>,
    ) -> Self {
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        FiniteGroup {
            inner: Arc::new(GroupInner {
                degree,
                generators,
                labels,
                name,
                elements,
                index,
                table: OnceLock::new(),
                lattice: OnceLock::new(),
            }),
        }
    }

    /// Same group with new generator labels (one per generator, distinct).
    pub fn with_labels<S: Into<String>>(self, labels: Vec<S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() != self.inner.generators.len() {
            return Err(Error::Parse("one label per generator required".into()));
        }
        let mut sorted = labels.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != labels.len() {
            return Err(Error::Parse("generator labels must be distinct".into()));
        }
        Ok(Self::from_parts(
            self.inner.degree,
            self.inner.generators.clone(),
            labels,
            self.inner.name.clone(),
            self.inner.elements.clone(),
        ))
    }

    pub fn with_name(self, name: impl Into<String>) -> Self {
        Self::from_parts(
            self.inner.degree,
            self.inner.generators.clone(),
            self.inner.labels.clone(),
            Some(name.into()),
            self.inner.elements.clone(),
        )
    }

    pub fn degree(&self) -> usize {
        self.inner.degree
    }

    pub fn order(&self) -> usize {
        self.inner.elements.len()
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.inner.generators
    }

    pub fn labels(&self) -> &[String] {
        &self.inner.labels
    }

    pub fn name(&self) -> Option<&str> {
        self.inner.name.as_deref()
    }

    /// Elements in lexicographic order of their image sequences.
    pub fn elements(&self) -> &[Permutation] {
        &self.inner.elements
    }

    pub fn index_of(&self, p: &Permutation) -> Option<usize> {
        self.inner.index.get(p).copied()
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.inner.index.contains_key(p)
    }

    pub fn identity_index(&self) -> usize {
        self.index_of(&Permutation::identity(self.degree()))
            .expect("identity is always an element")
    }

    /// Indices of the generators in the element list.
    pub fn generator_indices(&self) -> Vec<usize> {
        self.generators()
            .iter()
            .map(|g| self.index_of(g).expect("generators are elements"))
            .collect()
    }

    pub fn is_subgroup_of(&self, parent: &FiniteGroup) -> bool {
        self.degree() == parent.degree() && self.generators().iter().all(|g| parent.contains(g))
    }

    /// Shared pointer identity, used to recognise the same group object.
    pub fn ptr_eq(&self, other: &FiniteGroup) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
    }

    /// Multiplication table, built on first use.
    pub fn table(&self) -> Arc<GroupTable> {
        self.inner
            .table
            .get_or_init(|| {
                let n = self.order();
                let mut mul = vec![0u32; n * n];
                for (a, pa) in self.elements().iter().enumerate() {
                    for (b, pb) in self.elements().iter().enumerate() {
                        mul[a * n + b] = self.inner.index[&pa.compose(pb)] as u32;
                    }
                }
                let inv = self
                    .elements()
                    .iter()
                    .map(|p| self.inner.index[&p.inverse()] as u32)
                    .collect();
                Arc::new(GroupTable {
                    order: n,
                    mul,
                    inv,
                    identity: self.identity_index(),
                })
            })
            .clone()
    }

    pub(crate) fn lattice_cell(&self) -> &OnceLock<Arc<crate::subgroups::Lattice>> {
        &self.inner.lattice
    }

    /// The subgroup formed by a set of element indices. The caller
    /// guarantees closure; generators are picked greedily in element order.
    pub fn subgroup(&self, subset: &Subset) -> FiniteGroup {
        let table = self.table();
        let mut gens: Vec<usize> = Vec::new();
        let mut span = table.closure(&[]);
        for e in subset.ones() {
            if !span.contains(e) {
                gens.push(e);
                span = table.closure(&gens);
            }
        }
        debug_assert_eq!(span, *subset);
        let generators: Vec<Permutation> = if gens.is_empty() {
            vec![Permutation::identity(self.degree())]
        } else {
            gens.iter().map(|&i| self.elements()[i].clone()).collect()
        };
        let elements = subset.ones().map(|i| self.elements()[i].clone()).collect();
        let labels = default_labels(generators.len());
        Self::from_parts(self.degree(), generators, labels, None, elements)
    }

    /// Subgroup from explicit member permutations (which must be elements).
    pub fn subgroup_from_elements(&self, members: &[Permutation]) -> Result<FiniteGroup> {
        let mut subset = Subset::with_capacity(self.order());
        for p in members {
            subset.insert(self.index_of(p).ok_or(Error::NotSubgroup)?);
        }
        let table = self.table();
        let closed = table.closure(&subset.ones().collect::<Vec<_>>());
        if closed != subset {
            return Err(Error::NotSubgroup);
        }
        Ok(self.subgroup(&subset))
    }

    /// Element indices of a subgroup of `self`.
    pub fn subset_of(&self, sub: &FiniteGroup) -> Result<Subset> {
        if sub.degree() != self.degree() {
            return Err(Error::NotSubgroup);
        }
        let mut subset = Subset::with_capacity(self.order());
        for p in sub.elements() {
            subset.insert(self.index_of(p).ok_or(Error::NotSubgroup)?);
        }
        Ok(subset)
    }

    pub fn is_abelian(&self) -> bool {
        let gens = self.generators();
        gens.iter()
            .all(|a| gens.iter().all(|b| a.compose(b) == b.compose(a)))
    }

    /// Short human-readable description.
    pub fn describe(&self) -> String {
        let gens: Vec<String> = self
            .labels()
            .iter()
            .zip(self.generators())
            .map(|(l, g)| format!("{l}={g}"))
            .collect();
        format!(
            "{} (order {}, degree {}; {})",
            self.name().unwrap_or("group"),
            self.order(),
            self.degree(),
            gens.join(", ")
        )
    }
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.degree() == other.degree() && self.elements() == other.elements()
    }
}

impl Eq for FiniteGroup {}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::parse_cycles;

    fn group(deg: usize, gens: &[&str]) -> FiniteGroup {
        FiniteGroup::generate(gens.iter().map(|g| parse_cycles(g, deg).unwrap()).collect())
            .unwrap()
    }

    #[test]
    fn a5_has_60_elements() {
        assert_eq!(group(5, &["(3 4 5)", "(1 3)(2 4)"]).order(), 60);
    }

    #[test]
    fn psl27_has_168_elements() {
        assert_eq!(group(7, &["(1 2 3 4 5 6 7)", "(2 6)(3 4)"]).order(), 168);
    }

    #[test]
    fn trivial_group() {
        let g = group(3, &[""]);
        assert_eq!(g.order(), 1);
        assert!(g.elements()[0].is_identity());
    }

    #[test]
    fn closure_cap() {
        let gens = vec![
            parse_cycles("(1 2 3 4 5 6 7)", 7).unwrap(),
            parse_cycles("(1 2)", 7).unwrap(),
        ];
        let err = FiniteGroup::generate_with_cap(gens, 100).unwrap_err();
        assert!(err.is_budget());
    }

    #[test]
    fn group_axioms_on_table() {
        let g = group(4, &["(1 2 3 4)", "(1 2)"]);
        let t = g.table();
        let n = g.order();
        assert_eq!(n, 24);
        for a in 0..n {
            assert_eq!(t.mul(a, t.inv(a)), t.identity());
            assert_eq!(t.mul(t.identity(), a), a);
            for b in 0..n {
                for c in [0, n / 2, n - 1] {
                    assert_eq!(t.mul(t.mul(a, b), c), t.mul(a, t.mul(b, c)));
                }
            }
        }
    }

    #[test]
    fn subgroup_generators_are_members() {
        let g = group(4, &["(1 2 3 4)", "(1 2)"]);
        let t = g.table();
        let c = g.index_of(&parse_cycles("(1 2 3 4)", 4).unwrap()).unwrap();
        let sub = g.subgroup(&t.closure(&[c]));
        assert_eq!(sub.order(), 4);
        assert!(sub.is_subgroup_of(&g));
    }
}
