//! From a group action to either a global fixed point or a fixed-point-free
//! action of a finite simple group.

use crate::action::GroupAction;
use crate::budget::Budget;
use crate::error::Result;
use crate::subgroups::{is_simple, normal_subgroups, subgroups_up_to_conjugacy};

#[derive(Clone, Debug)]
pub enum Verdict {
    /// A point fixed by the whole group (of the action in force at that step).
    FixedPoint(usize),
    /// A simple group acting without a fixed point.
    Simple(GroupAction),
}

#[derive(Clone, Debug)]
pub struct Reduction {
    pub verdict: Verdict,
    pub steps: Vec<String>,
    /// Group order at the start and after every change of group.
    pub orders: Vec<usize>,
}

fn describe(action: &GroupAction) -> String {
    let g = action.group();
    format!("{} of order {} on {} points", g.name().unwrap_or("group"), g.order(), action.points())
}

/// Either a fixed point, or: pass to the first fixed-point-free subgroup
/// class (smallest order, then canonical class order); stop if it is simple,
/// otherwise restrict to the fixed points of its first proper nontrivial
/// normal subgroup, act by the induced group, and repeat.
pub fn reduce_to_simple(action: &GroupAction, budget: &Budget) -> Result<Reduction> {
    let mut steps = vec![format!("start: {}", describe(action))];
    let mut current = action.clone();
    let mut orders = vec![action.group().order()];
    loop {
        if let Some(&x) = current.fixed_points().first() {
            steps.push(format!("point {x} is fixed by the whole group"));
            return Ok(Reduction {
                verdict: Verdict::FixedPoint(x),
                steps,
                orders,
            });
        }
        let classes = subgroups_up_to_conjugacy(current.group(), budget)?;
        let mut chosen = None;
        for class in &classes {
            let sub = current.restrict_to_subgroup(&class.representative)?;
            if !sub.has_fixed_point() {
                chosen = Some(sub);
                break;
            }
        }
        // the whole group is the last class, so something qualifies
        let sub = chosen.expect("the full group acts without fixed point");
        if sub.group().order() < current.group().order() {
            orders.push(sub.group().order());
        }
        steps.push(format!(
            "minimal fixed-point-free subgroup of order {}",
            sub.group().order()
        ));
        if is_simple(sub.group(), budget)? {
            steps.push(format!("simple: {}", describe(&sub)));
            return Ok(Reduction {
                verdict: Verdict::Simple(sub),
                steps,
                orders,
            });
        }
        let normals = normal_subgroups(sub.group(), budget)?;
        let n = normals
            .iter()
            .find(|n| n.order() > 1 && n.order() < sub.group().order())
            .expect("a non-simple nontrivial group has a proper nontrivial normal subgroup");
        let subset = sub.group().subset_of(n)?;
        let fixed = sub.fixed_points_of(&subset);
        steps.push(format!(
            "normal subgroup of order {} fixes {} points",
            n.order(),
            fixed.len()
        ));
        let induced = sub.induced_on(&fixed)?;
        steps.push(format!("induced: {}", describe(&induced)));
        orders.push(induced.group().order());
        current = induced;
    }
}
