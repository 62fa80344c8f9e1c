//! The fixed-point criterion for `Pol(S(G↷X)) ⊨ Σ(H↷Y)`, FS spectra, and
//! the minority polymorphism of an action structure.

use rayon::prelude::*;

use crate::action::{prim_action, GroupAction};
use crate::budget::{saturating_pow, Budget};
use crate::condition::{maltsev, satisfies, FiniteOperation};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::hom::find_homomorphism;
use crate::polymorphism::is_polymorphism;
use crate::structure::{structure_of_action, Labels};
use crate::subgroups::maximal_subgroups;

fn encode(t: &[usize], x: usize) -> u64 {
    t.iter().fold(0u64, |acc, &v| acc * x as u64 + v as u64)
}

fn decode_into(mut code: u64, x: usize, t: &mut [usize]) {
    for slot in t.iter_mut().rev() {
        *slot = (code % x as u64) as usize;
        code /= x as u64;
    }
}

/// Whether `stab_G(H(t))` fixes a point of `X`, with `H` acting on `t` by
/// pre-composition. Also returns `H(t)`, sorted.
fn orbit_stabilizer_fixes(gact: &GroupAction, hact: &GroupAction, t: &[usize]) -> (bool, Vec<Vec<usize>>) {
    let x = gact.points();
    let mut h_orbit: Vec<Vec<usize>> = (0..hact.group().order())
        .map(|h| (0..t.len()).map(|y| t[hact.act(h, y)]).collect())
        .collect();
    h_orbit.sort_unstable();
    h_orbit.dedup();
    let stab: Vec<usize> = (0..gact.group().order())
        .filter(|&g| {
            let gt: Vec<usize> = t.iter().map(|&v| gact.act(g, v)).collect();
            h_orbit.binary_search(&gt).is_ok()
        })
        .collect();
    let fixes = (0..x).any(|p| stab.iter().all(|&g| gact.act(g, p) == p));
    (fixes, h_orbit)
}

fn image_is_full_symmetric(hact: &GroupAction) -> bool {
    let y = hact.points();
    if y > 7 {
        return false;
    }
    let factorial: usize = (1..=y).product();
    if hact.group().order() < factorial {
        return false;
    }
    let gens = hact.generator_images().to_vec();
    FiniteGroup::generate(gens).is_ok_and(|img| img.order() == factorial)
}

/// For a group acting twice, an equivariant map `Y -> X` is a counterexample
/// whenever `G` has no fixed point: then `H(t) = G(t)` and `stab_G(H(t)) = G`.
fn equivariant_counterexample(
    gact: &GroupAction,
    hact: &GroupAction,
    budget: &Budget,
) -> Result<Option<Vec<usize>>> {
    let (g, h) = (gact.group(), hact.group());
    if g != h || g.generators() != h.generators() || g.labels() != h.labels() {
        return Ok(None);
    }
    let sy = structure_of_action(hact, Labels::Generators);
    let sx = structure_of_action(gact, Labels::Generators);
    let Some(t) = find_homomorphism(&sy, &sx, budget)? else {
        return Ok(None);
    };
    let (fixes, _) = orbit_stabilizer_fixes(gact, hact, &t);
    Ok((!fixes).then_some(t))
}

/// Multisets of size `k` over `{0..x-1}` as nondecreasing sequences.
fn multisets(x: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0; k];
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] + 1 < x) else {
            return out;
        };
        let v = cur[i] + 1;
        for slot in &mut cur[i..] {
            *slot = v;
        }
    }
}

/// The number of multisets of size `k` from `x` values.
fn multiset_count(x: u64, k: u64) -> u64 {
    // C(x+k-1, k), saturating
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = acc * (x as u128 + i) / (i + 1);
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// `true` iff for every `t: Y -> X` the setwise stabilizer in `G` of the
/// `H`-orbit of `t` fixes a point of `X`; equivalently `Pol(S(G↷X))`
/// satisfies `Σ(H↷Y)`.
pub fn action_criterion(gact: &GroupAction, hact: &GroupAction, budget: &Budget) -> Result<bool> {
    let x = gact.points();
    let y = hact.points();
    if equivariant_counterexample(gact, hact, budget)?.is_some() {
        return Ok(false);
    }
    let raw = saturating_pow(x as u64, y as u64);
    if image_is_full_symmetric(hact) {
        let count = multiset_count(x as u64, y as u64);
        Budget::check("criterion multisets", count, budget.enumeration)?;
        // H(t) is every rearrangement of t, so stab_G(H(t)) is the set of g
        // preserving the multiplicity vector of t
        let all = multisets(x, y);
        let fail = all.par_iter().any(|t| {
            let mut mult = vec![0usize; x];
            for &v in t {
                mult[v] += 1;
            }
            let stab: Vec<usize> = (0..gact.group().order())
                .filter(|&g| (0..x).all(|p| mult[gact.act(g, p)] == mult[p]))
                .collect();
            !(0..x).any(|p| stab.iter().all(|&g| gact.act(g, p) == p))
        });
        return Ok(!fail);
    }
    Budget::check("criterion maps X^Y", raw, budget.enumeration)?;
    // one representative per G x H orbit; the answer is constant on orbits
    let total = raw as usize;
    let mut visited = fixedbitset::FixedBitSet::with_capacity(total);
    let mut t = vec![0; y];
    for code in 0..total {
        if visited.contains(code) {
            continue;
        }
        decode_into(code as u64, x, &mut t);
        let (fixes, h_orbit) = orbit_stabilizer_fixes(gact, hact, &t);
        if !fixes {
            return Ok(false);
        }
        for r in &h_orbit {
            for g in 0..gact.group().order() {
                let gr: Vec<usize> = r.iter().map(|&v| gact.act(g, v)).collect();
                visited.insert(encode(&gr, x) as usize);
            }
        }
    }
    Ok(true)
}

/// Component sizes of `S(G↷prim(G))` and the arities whose full-symmetry
/// condition fails, which are exactly the sums of component sizes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FsSpectrum {
    /// In canonical class order.
    pub component_sizes: Vec<usize>,
    /// Failing arities `1..=upto`.
    pub failing: Vec<usize>,
    pub upto: usize,
    /// Smallest component size, the smallest failing arity.
    pub smallest_failing: usize,
    /// When the sizes are coprime: every arity from here on fails.
    pub conductor: Option<usize>,
    /// Smallest and largest index of a maximal subgroup.
    pub smallest_index: usize,
    pub largest_index: usize,
}

impl FsSpectrum {
    pub fn fails(&self, k: usize) -> bool {
        representable(&self.component_sizes, k)
    }

    /// Compact description like `{5,6,10,11} ∪ {k >= 20}`.
    pub fn describe(&self) -> String {
        let gcd = self.component_sizes.iter().fold(0, |a, &b| gcd(a, b));
        match self.conductor {
            Some(c) => {
                let below: Vec<String> = self
                    .failing
                    .iter()
                    .filter(|&&k| k < c)
                    .map(|k| k.to_string())
                    .collect();
                format!("{{{}}} ∪ {{k >= {c}}}", below.join(","))
            }
            None => format!("multiples of {gcd} representable by the sizes (gcd {gcd})"),
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn representable(sizes: &[usize], k: usize) -> bool {
    let mut ok = vec![false; k + 1];
    ok[0] = true;
    for n in 1..=k {
        ok[n] = sizes.iter().any(|&s| s <= n && ok[n - s]);
    }
    k > 0 && ok[k]
}

pub fn fs_spectrum(group: &FiniteGroup, upto: usize, budget: &Budget) -> Result<FsSpectrum> {
    let classes = maximal_subgroups(group, budget)?;
    let sizes: Vec<usize> = classes.iter().map(|c| c.index_in(group)).collect();
    let smallest = *sizes.iter().min().expect("a nontrivial group has a maximal subgroup");
    let largest = *sizes.iter().max().expect("nonempty");
    let mut ok = vec![false; upto + 1];
    ok[0] = true;
    for n in 1..=upto {
        ok[n] = sizes.iter().any(|&s| s <= n && ok[n - s]);
    }
    let failing: Vec<usize> = (1..=upto).filter(|&k| ok[k]).collect();
    let g = sizes.iter().fold(0, |a, &b| gcd(a, b));
    let conductor = (g == 1).then(|| {
        // Frobenius number is below (min-1)(max-1) for coprime pairs, and
        // no larger than that for more generators
        let bound = (smallest - 1) * (largest - 1) + 1;
        let reach = bound + smallest;
        let mut r = vec![false; reach + 1];
        r[0] = true;
        for n in 1..=reach {
            r[n] = sizes.iter().any(|&s| s <= n && r[n - s]);
        }
        let last_gap = (1..=reach).rev().find(|&n| !r[n]).unwrap_or(0);
        last_gap + 1
    });
    Ok(FsSpectrum {
        component_sizes: sizes,
        failing,
        upto,
        smallest_failing: smallest,
        conductor,
        smallest_index: smallest,
        largest_index: largest,
    })
}

/// Convenience: `prim(G)` against `S_k` on `[k]` via the criterion.
pub fn fs_fails_by_criterion(group: &FiniteGroup, k: usize, budget: &Budget) -> Result<bool> {
    let prim = prim_action(group, budget)?;
    let sk = crate::catalog::group(&format!("S{k}"))?;
    Ok(!action_criterion(&prim, &GroupAction::natural(&sk), budget)?)
}

/// Ternary minority on the points of `action`: the odd one out, the first
/// argument when all differ. Verified to be a quasi Maltsev polymorphism
/// of `S(G↷X)` before it is returned.
pub fn minority_polymorphism(action: &GroupAction, budget: &Budget) -> Result<FiniteOperation> {
    let m = FiniteOperation::from_fn(action.points(), 3, |t| {
        let (a, b, c) = (t[0], t[1], t[2]);
        if a == b {
            c
        } else if a == c {
            b
        } else if b == c {
            a
        } else {
            a
        }
    })?;
    let s = structure_of_action(action, Labels::Generators);
    if !is_polymorphism(&s, &m, budget)? {
        return Err(Error::Verification("minority is not a polymorphism".into()));
    }
    if !satisfies(&m, &maltsev(), budget)? {
        return Err(Error::Verification("minority is not quasi Maltsev".into()));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn b() -> Budget {
        Budget::default()
    }

    #[test]
    fn z2_against_itself() {
        let a = GroupAction::regular(&catalog::group("Z2").unwrap());
        assert!(!action_criterion(&a, &a, &b()).unwrap());
    }

    #[test]
    fn z2_against_z3() {
        let a = GroupAction::regular(&catalog::group("Z2").unwrap());
        let c = GroupAction::regular(&catalog::group("Z3").unwrap());
        assert!(action_criterion(&a, &c, &b()).unwrap());
    }

    #[test]
    fn multiset_helpers() {
        assert_eq!(multisets(3, 2).len(), 6);
        assert_eq!(multiset_count(3, 2), 6);
        assert_eq!(multiset_count(21, 5), 53130);
    }

    #[test]
    fn spectrum_of_prime_cycle() {
        let s = fs_spectrum(&catalog::group("Z3").unwrap(), 12, &b()).unwrap();
        assert_eq!(s.failing, vec![3, 6, 9, 12]);
        assert_eq!(s.conductor, None);
        assert_eq!(s.smallest_failing, 3);
    }

    #[test]
    fn spectrum_of_psl27() {
        let s = fs_spectrum(&catalog::group("PSL27").unwrap(), 20, &b()).unwrap();
        assert_eq!(s.smallest_failing, 7);
        assert_eq!(s.largest_index, 8);
        assert_eq!(s.failing, vec![7, 8, 14, 15, 16]);
        assert_eq!(s.conductor, Some(42));
    }

    #[test]
    fn minority_on_two_points() {
        let a = GroupAction::regular(&catalog::group("Z2").unwrap());
        let m = minority_polymorphism(&a, &b()).unwrap();
        assert_eq!(m, FiniteOperation::xor3());
        for v in 0..2 {
            assert_eq!(m.apply(&[v, v, v]), v);
        }
    }
}
