//! Numerical check of the subquotient isomorphism for a function `t: Y -> X`
//! acted on by `G` (post-composition) and `H` (pre-composition).

use std::collections::{HashMap, HashSet};

use crate::action::GroupAction;
use crate::budget::Budget;
use crate::error::{Error, Result};

/// Group orders and orbit data for one `t`, with every claim checked.
#[derive(Clone, Debug)]
pub struct BiactionReport {
    /// `|G(t) ∩ H(t)|`.
    pub z_size: usize,
    pub stab_g_t: usize,
    pub stab_g_orbit_h: usize,
    pub stab_h_t: usize,
    pub stab_h_orbit_g: usize,
    pub pass: bool,
    /// Descriptions of the checks that failed (empty when `pass`).
    pub failures: Vec<String>,
}

fn post(gact: &GroupAction, g: usize, t: &[usize]) -> Vec<usize> {
    t.iter().map(|&x| gact.act(g, x)).collect()
}

/// `t_h(y) = t(h y)`; a right action.
fn pre(hact: &GroupAction, h: usize, t: &[usize]) -> Vec<usize> {
    (0..t.len()).map(|y| t[hact.act(h, y)]).collect()
}

pub fn biaction_subquotient(
    gact: &GroupAction,
    hact: &GroupAction,
    t: &[usize],
    budget: &Budget,
) -> Result<BiactionReport> {
    if t.len() != hact.points() || t.iter().any(|&x| x >= gact.points()) {
        return Err(Error::Precondition(format!(
            "t must map {} points into {} points",
            hact.points(),
            gact.points()
        )));
    }
    let ng = gact.group().order();
    let nh = hact.group().order();
    Budget::check(
        "biaction element pairs",
        (ng as u64).saturating_mul(nh as u64),
        budget.enumeration,
    )?;
    let gtab = gact.group().table();
    let htab = hact.group().table();

    let g_images: Vec<Vec<usize>> = (0..ng).map(|g| post(gact, g, t)).collect();
    let h_images: Vec<Vec<usize>> = (0..nh).map(|h| pre(hact, h, t)).collect();
    let g_orbit: HashSet<&Vec<usize>> = g_images.iter().collect();
    let h_orbit: HashSet<&Vec<usize>> = h_images.iter().collect();
    let z: HashSet<&Vec<usize>> = g_orbit.intersection(&h_orbit).copied().collect();

    let stab_g_t: Vec<usize> = (0..ng).filter(|&g| g_images[g] == t).collect();
    let stab_g_ht: Vec<usize> = (0..ng)
        .filter(|&g| h_orbit.iter().all(|r| h_orbit.contains(&post(gact, g, r))))
        .collect();
    let stab_h_t: Vec<usize> = (0..nh).filter(|&h| h_images[h] == t).collect();
    let stab_h_gt: Vec<usize> = (0..nh)
        .filter(|&h| g_orbit.iter().all(|r| g_orbit.contains(&pre(hact, h, r))))
        .collect();

    let mut failures = Vec::new();
    let sgt: HashSet<usize> = stab_g_t.iter().copied().collect();
    let sht: HashSet<usize> = stab_h_t.iter().copied().collect();

    if !sgt.iter().all(|g| stab_g_ht.contains(g)) {
        failures.push("stab_G(t) is not inside stab_G(H(t))".into());
    }
    if !sht.iter().all(|h| stab_h_gt.contains(h)) {
        failures.push("stab_H(t) is not inside stab_H(G(t))".into());
    }

    // g stab_G(t) -> g.t is a bijection onto Z_t
    let g_hit: HashSet<&Vec<usize>> = stab_g_ht.iter().map(|&g| &g_images[g]).collect();
    if g_hit != z || stab_g_ht.len() != z.len() * stab_g_t.len() {
        failures.push("g stab_G(t) -> g.t is not a bijection onto Z_t".into());
    }
    let h_hit: HashSet<&Vec<usize>> = stab_h_gt.iter().map(|&h| &h_images[h]).collect();
    if h_hit != z || stab_h_gt.len() != z.len() * stab_h_t.len() {
        failures.push("stab_H(t) h -> t_h is not a bijection onto Z_t".into());
    }

    for &g in &stab_g_ht {
        if stab_g_t.iter().any(|&s| !sgt.contains(&gtab.conj(g, s))) {
            failures.push("stab_G(t) is not normal in stab_G(H(t))".into());
            break;
        }
    }
    for &h in &stab_h_gt {
        if stab_h_t.iter().any(|&s| !sht.contains(&htab.conj(h, s))) {
            failures.push("stab_H(t) is not normal in stab_H(G(t))".into());
            break;
        }
    }

    // g.t = t_h defines phi(g stab_G(t)) = stab_H(t) h; check it is a
    // homomorphism: (g1 g2).t = t_(h1 h2).
    let mut phi: HashMap<usize, usize> = HashMap::new();
    let h_of: HashMap<&Vec<usize>, usize> = stab_h_gt.iter().map(|&h| (&h_images[h], h)).collect();
    for &g in &stab_g_ht {
        match h_of.get(&g_images[g]) {
            Some(&h) => {
                phi.insert(g, h);
            }
            None => {
                failures.push("some g.t has no matching t_h".into());
                break;
            }
        }
    }
    if failures.is_empty() {
        'outer: for &g1 in &stab_g_ht {
            for &g2 in &stab_g_ht {
                let lhs = &g_images[gtab.mul(g1, g2)];
                let rhs = &h_images[htab.mul(phi[&g1], phi[&g2])];
                if lhs != rhs {
                    failures.push("the induced map is not a homomorphism".into());
                    break 'outer;
                }
            }
        }
    }

    Ok(BiactionReport {
        z_size: z.len(),
        stab_g_t: stab_g_t.len(),
        stab_g_orbit_h: stab_g_ht.len(),
        stab_h_t: stab_h_t.len(),
        stab_h_orbit_g: stab_h_gt.len(),
        pass: failures.is_empty(),
        failures,
    })
}
