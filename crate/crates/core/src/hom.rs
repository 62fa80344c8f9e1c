//! Homomorphism search between relational structures.

use std::collections::HashMap;

use crate::budget::Budget;
use crate::csp::{Csp, Table};
use crate::error::{Error, Result};
use crate::structure::RelStructure;

/// Every source tuple maps into the target relation of the same name.
pub fn is_homomorphism(source: &RelStructure, target: &RelStructure, map: &[usize]) -> bool {
    map.len() == source.domain
        && map.iter().all(|&x| x < target.domain)
        && source.relations.iter().all(|(name, r)| {
            r.is_empty()
                || target.relations.get(name).is_some_and(|tr| {
                    tr.arity == r.arity
                        && r.tuples.iter().all(|t| {
                            let img: Vec<usize> = t.iter().map(|&x| map[x]).collect();
                            tr.contains(&img)
                        })
                })
        })
}

/// A homomorphism `source -> target` (target relations missing from the
/// target count as empty), found by complete backtracking search.
pub fn find_homomorphism(
    source: &RelStructure,
    target: &RelStructure,
    budget: &Budget,
) -> Result<Option<Vec<usize>>> {
    let mut csp = Csp::new(source.domain, target.domain, budget.search_nodes);
    for (name, r) in &source.relations {
        if r.is_empty() {
            continue;
        }
        let Some(tr) = target.relations.get(name) else {
            return Ok(None);
        };
        if tr.arity != r.arity {
            return Err(Error::InvalidStructure(format!(
                "relation {name:?} has arity {} in the source and {} in the target",
                r.arity, tr.arity
            )));
        }
        let table = Table::new(tr.arity, &tr.tuples);
        for t in &r.tuples {
            csp.add(t.clone(), table.clone());
        }
    }
    let found = csp.solve("homomorphism search nodes")?;
    if let Some(map) = &found {
        debug_assert!(is_homomorphism(source, target, map));
    }
    Ok(found)
}

/// Homomorphisms exist in both directions.
pub fn hom_equivalent(a: &RelStructure, b: &RelStructure, budget: &Budget) -> Result<bool> {
    Ok(find_homomorphism(a, b, budget)?.is_some() && find_homomorphism(b, a, budget)?.is_some())
}

/// All homomorphisms, in search order (for tests and small instances).
pub fn all_homomorphisms(
    source: &RelStructure,
    target: &RelStructure,
    budget: &Budget,
) -> Result<Vec<Vec<usize>>> {
    let mut csp = Csp::new(source.domain, target.domain, budget.search_nodes);
    let mut tables = HashMap::new();
    for (name, r) in &source.relations {
        if r.is_empty() {
            continue;
        }
        let Some(tr) = target.relations.get(name) else {
            return Ok(Vec::new());
        };
        let table = tables
            .entry(name.clone())
            .or_insert_with(|| Table::new(tr.arity, &tr.tuples))
            .clone();
        for t in &r.tuples {
            csp.add(t.clone(), table.clone());
        }
    }
    csp.solve_all("homomorphism search nodes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::{prim_action, GroupAction};
    use crate::catalog;
    use crate::structure::{cycle, structure_of_action, t3, Labels};

    #[test]
    fn cycles() {
        let b = Budget::default();
        let c2 = cycle(2).unwrap();
        assert_eq!(find_homomorphism(&c2, &c2, &b).unwrap(), Some(vec![0, 1]));
        assert_eq!(find_homomorphism(&cycle(3).unwrap(), &c2, &b).unwrap(), None);
        assert!(find_homomorphism(&cycle(4).unwrap(), &c2, &b).unwrap().is_some());
        assert_eq!(all_homomorphisms(&c2, &c2, &b).unwrap().len(), 2);
    }

    #[test]
    fn t3_into_c1_and_back() {
        let b = Budget::default();
        let c1 = cycle(1).unwrap();
        assert!(find_homomorphism(&t3(), &c1, &b).unwrap().is_some());
        assert!(find_homomorphism(&c1, &t3(), &b).unwrap().is_none());
    }

    #[test]
    fn natural_a5_into_prim() {
        let b = Budget::default();
        let g = catalog::group("A5").unwrap();
        let nat = structure_of_action(&GroupAction::natural(&g), Labels::Generators);
        let prim = structure_of_action(&prim_action(&g, &b).unwrap(), Labels::Generators);
        let h = find_homomorphism(&nat, &prim, &b).unwrap().unwrap();
        assert!(is_homomorphism(&nat, &prim, &h));
    }

    #[test]
    fn equivalences() {
        let b = Budget::default();
        let z3 = catalog::group("Z3").unwrap();
        let reg = structure_of_action(&GroupAction::regular(&z3), Labels::Generators);
        let prim = structure_of_action(&prim_action(&z3, &b).unwrap(), Labels::Generators);
        assert!(hom_equivalent(&reg, &prim, &b).unwrap());

        let s3 = catalog::group("S3").unwrap();
        let nat = structure_of_action(&GroupAction::natural(&s3), Labels::Generators);
        let prim = structure_of_action(&prim_action(&s3, &b).unwrap(), Labels::Generators);
        assert!(!hom_equivalent(&nat, &prim, &b).unwrap());
        assert!(hom_equivalent(&nat, &nat, &b).unwrap());
    }
}
