//! Group actions on `{0, .., points-1}`: orbits, stabilizers, coset
//! actions, primitivity and `prim(G)`.

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, Subset};
use crate::perm::Permutation;
use crate::subgroups::{is_maximal_subgroup, maximal_subgroups};

struct ActionInner {
    group: FiniteGroup,
    points: usize,
    generator_images: Vec<Permutation>,
    /// Indexed like `group.elements()`.
    element_images: Vec<Permutation>,
}

/// A homomorphism from a permutation group into `Sym(points)`, given by the
/// images of the generators and validated on construction.
#[derive(Clone)]
pub struct GroupAction {
    inner: Arc<ActionInner>,
}

/// What a stabilizer fixes.
#[derive(Clone, Debug)]
pub enum Target {
    Point(usize),
    /// Setwise stabilizer of a nonempty set of points.
    Set(Vec<usize>),
}

impl GroupAction {
    /// Extend generator images to all elements, failing if the extension is
    /// not a well-defined homomorphism.
    pub fn new(
        group: FiniteGroup,
        points: usize,
        generator_images: Vec<Permutation>,
    ) -> Result<Self> {
        if points == 0 {
            return Err(Error::InvalidAction("an action needs at least one point".into()));
        }
        if generator_images.len() != group.generators().len() {
            return Err(Error::InvalidAction(format!(
                "{} generator images for {} generators",
                generator_images.len(),
                group.generators().len()
            )));
        }
        for img in &generator_images {
            if img.degree() != points {
                return Err(Error::DegreeMismatch {
                    expected: points,
                    found: img.degree(),
                });
            }
        }
        let table = group.table();
        let gens = group.generator_indices();
        let mut images: Vec<Option<Permutation>> = vec![None; group.order()];
        let id = table.identity();
        images[id] = Some(Permutation::identity(points));
        let mut queue = VecDeque::from([id]);
        while let Some(e) = queue.pop_front() {
            let img_e = images[e].clone().expect("queued elements have images");
            for (s, img_s) in gens.iter().zip(&generator_images) {
                let next = table.mul(*s, e);
                let candidate = img_s.compose(&img_e);
                match &images[next] {
                    Some(existing) if *existing != candidate => {
                        return Err(Error::InvalidAction(format!(
                            "generator images do not define a homomorphism (element {})",
                            group.elements()[next]
                        )));
                    }
                    Some(_) => {}
                    None => {
                        images[next] = Some(candidate);
                        queue.push_back(next);
                    }
                }
            }
        }
        let element_images = images
            .into_iter()
            .map(|i| i.expect("group is generated by its generators"))
            .collect();
        Ok(GroupAction {
            inner: Arc::new(ActionInner {
                group,
                points,
                generator_images,
                element_images,
            }),
        })
    }

    /// The permutation group acting on its own points.
    pub fn natural(group: &FiniteGroup) -> Self {
        let gens = group.generators().to_vec();
        GroupAction::new(group.clone(), group.degree(), gens)
            .expect("the natural action is a homomorphism")
    }

    /// Left multiplication on the elements (points indexed in element order).
    pub fn regular(group: &FiniteGroup) -> Self {
        let table = group.table();
        let n = group.order();
        let gens = group
            .generator_indices()
            .into_iter()
            .map(|s| {
                Permutation::from_images((0..n).map(|e| table.mul(s, e)).collect())
                    .expect("left multiplication is a bijection")
            })
            .collect();
        GroupAction::new(group.clone(), n, gens).expect("left multiplication is an action")
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.inner.group
    }

    pub fn points(&self) -> usize {
        self.inner.points
    }

    pub fn generator_images(&self) -> &[Permutation] {
        &self.inner.generator_images
    }

    /// Image of the element with index `element` (in `group().elements()`).
    pub fn element_image(&self, element: usize) -> &Permutation {
        &self.inner.element_images[element]
    }

    pub fn element_images(&self) -> &[Permutation] {
        &self.inner.element_images
    }

    #[inline]
    pub fn act(&self, element: usize, point: usize) -> usize {
        self.inner.element_images[element].apply(point)
    }

    /// Orbit partition; blocks sorted internally and by least point.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let m = self.points();
        let mut block = vec![usize::MAX; m];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for start in 0..m {
            if block[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            block[start] = id;
            let mut members = vec![start];
            let mut queue = vec![start];
            while let Some(x) = queue.pop() {
                for g in self.generator_images() {
                    let y = g.apply(x);
                    if block[y] == usize::MAX {
                        block[y] = id;
                        members.push(y);
                        queue.push(y);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn orbit_of(&self, point: usize) -> Vec<usize> {
        self.orbits()
            .into_iter()
            .find(|b| b.binary_search(&point).is_ok())
            .expect("every point lies in an orbit")
    }

    pub fn is_transitive(&self) -> bool {
        self.orbits().len() == 1
    }

    /// Points fixed by the whole group.
    pub fn fixed_points(&self) -> Vec<usize> {
        (0..self.points())
            .filter(|&x| self.generator_images().iter().all(|g| g.apply(x) == x))
            .collect()
    }

    pub fn has_fixed_point(&self) -> bool {
        !self.fixed_points().is_empty()
    }

    /// Points fixed by every element of a subgroup (given as element indices).
    pub fn fixed_points_of(&self, subgroup: &Subset) -> Vec<usize> {
        (0..self.points())
            .filter(|&x| subgroup.ones().all(|g| self.act(g, x) == x))
            .collect()
    }

    pub fn stabilizer(&self, target: &Target) -> Result<FiniteGroup> {
        let group = self.group();
        let m = self.points();
        let mut subset = Subset::with_capacity(group.order());
        match target {
            Target::Point(x) => {
                if *x >= m {
                    return Err(Error::InvalidAction(format!("point {x} out of range")));
                }
                for g in 0..group.order() {
                    if self.act(g, *x) == *x {
                        subset.insert(g);
                    }
                }
            }
            Target::Set(set) => {
                if set.is_empty() {
                    return Err(Error::InvalidAction("empty target set".into()));
                }
                let mut member = vec![false; m];
                for &x in set {
                    if x >= m {
                        return Err(Error::InvalidAction(format!("point {x} out of range")));
                    }
                    member[x] = true;
                }
                for g in 0..group.order() {
                    if set.iter().all(|&x| member[self.act(g, x)]) {
                        subset.insert(g);
                    }
                }
            }
        }
        Ok(group.subgroup(&subset))
    }

    /// The same points acted on by a subgroup.
    pub fn restrict_to_subgroup(&self, sub: &FiniteGroup) -> Result<GroupAction> {
        let images = sub
            .generators()
            .iter()
            .map(|g| {
                let idx = self.group().index_of(g).ok_or(Error::NotSubgroup)?;
                Ok(self.element_image(idx).clone())
            })
            .collect::<Result<Vec<_>>>()?;
        GroupAction::new(sub.clone(), self.points(), images)
    }

    /// The permutation group induced on an invariant set of points, acting
    /// naturally on it (points relabelled by position in `points`).
    pub fn induced_on(&self, points: &[usize]) -> Result<GroupAction> {
        if points.is_empty() {
            return Err(Error::InvalidAction("empty invariant set".into()));
        }
        let gens = self
            .generator_images()
            .iter()
            .map(|g| g.restrict(points))
            .collect::<Result<Vec<_>>>()?;
        let induced = FiniteGroup::generate(gens)?.with_labels(self.group().labels().to_vec())?;
        Ok(GroupAction::natural(&induced))
    }

    /// Disjoint union of actions of the same group; points are concatenated.
    pub fn disjoint_union(parts: &[GroupAction]) -> Result<GroupAction> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidAction("empty disjoint union".into()))?;
        let group = first.group().clone();
        let total: usize = parts.iter().map(|a| a.points()).sum();
        let mut images = vec![Vec::with_capacity(total); group.generators().len()];
        let mut offset = 0;
        for part in parts {
            if part.group() != &group {
                return Err(Error::InvalidAction("disjoint union of different groups".into()));
            }
            for (i, g) in part.generator_images().iter().enumerate() {
                images[i].extend(g.images().iter().map(|x| x + offset));
            }
            offset += part.points();
        }
        let gens = images
            .into_iter()
            .map(Permutation::from_images)
            .collect::<Result<Vec<_>>>()?;
        GroupAction::new(group, total, gens)
    }

    /// Point-by-point check that `map` commutes with every generator.
    pub fn is_equivariant_map(&self, other: &GroupAction, map: &[usize]) -> bool {
        map.len() == self.points()
            && self
                .generator_images()
                .iter()
                .zip(other.generator_images())
                .all(|(a, b)| (0..self.points()).all(|x| map[a.apply(x)] == b.apply(map[x])))
    }
}

impl fmt::Debug for GroupAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let imgs: Vec<String> = self
            .group()
            .labels()
            .iter()
            .zip(self.generator_images())
            .map(|(l, g)| format!("{l}->{g}"))
            .collect();
        write!(
            f,
            "GroupAction({} on {} points; {})",
            self.group().name().unwrap_or("group"),
            self.points(),
            imgs.join(", ")
        )
    }
}

/// Left multiplication on the left cosets of `subgroup`.
///
/// A coset is represented by its least element (in element order) and the
/// cosets are numbered in the order of their representatives, so the coset
/// `subgroup` itself is point 0.
pub fn coset_action(group: &FiniteGroup, subgroup: &FiniteGroup) -> Result<GroupAction> {
    let sub = group.subset_of(subgroup)?;
    let table = group.table();
    let n = group.order();
    let members: Vec<usize> = sub.ones().collect();
    let mut coset_of = vec![usize::MAX; n];
    let mut count = 0;
    for g in 0..n {
        if coset_of[g] != usize::MAX {
            continue;
        }
        // g is the least element of its coset since we scan in order
        for &h in &members {
            coset_of[table.mul(g, h)] = count;
        }
        count += 1;
    }
    let reps: Vec<usize> = {
        let mut r = vec![usize::MAX; count];
        for g in (0..n).rev() {
            r[coset_of[g]] = g;
        }
        r
    };
    let gens = group
        .generator_indices()
        .into_iter()
        .map(|s| {
            Permutation::from_images(reps.iter().map(|&r| coset_of[table.mul(s, r)]).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    GroupAction::new(group.clone(), count, gens)
}

/// At least two points, transitive, and maximal point stabilizers.
pub fn is_primitive(action: &GroupAction) -> Result<bool> {
    if action.points() < 2 || !action.is_transitive() {
        return Ok(false);
    }
    let stab = action.stabilizer(&Target::Point(0))?;
    is_maximal_subgroup(action.group(), &stab)
}

/// Disjoint union of `G/M` over the conjugacy classes of maximal subgroups
/// `M`, in canonical class order.
pub fn prim_action(group: &FiniteGroup, budget: &Budget) -> Result<GroupAction> {
    let classes = maximal_subgroups(group, budget)?;
    let parts = classes
        .iter()
        .map(|c| coset_action(group, &c.representative))
        .collect::<Result<Vec<_>>>()?;
    GroupAction::disjoint_union(&parts)
}

/// No global fixed point, while every maximal proper subgroup (hence every
/// proper subgroup) fixes some point. Conjugates need no separate check:
/// if `M` fixes `x` then `gMg⁻¹` fixes `gx`.
pub fn is_minimal_fpf(action: &GroupAction, budget: &Budget) -> Result<bool> {
    if action.has_fixed_point() {
        return Ok(false);
    }
    let group = action.group();
    let classes = maximal_subgroups(group, budget)?;
    for c in &classes {
        let sub = group.subset_of(&c.representative)?;
        if action.fixed_points_of(&sub).is_empty() {
            return Ok(false);
        }
    }
    Ok(true)
}
