use proptest::prelude::*;

use pplab_core::action::{coset_action, GroupAction, Target};
use pplab_core::biaction::biaction_subquotient;
use pplab_core::catalog::group;
use pplab_core::condition::{fs, gp, satisfies, ts, FiniteOperation};
use pplab_core::forge::check_gp;
use pplab_core::group::FiniteGroup;
use pplab_core::perm::Permutation;
use pplab_core::reduce::{reduce_to_simple, Verdict};
use pplab_core::subgroups::{normal_subgroups, subgroups_up_to_conjugacy};
use pplab_core::term::{Evaluator, OperationTerm};
use pplab_core::Budget;

fn perm(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::from_images(v).unwrap())
}

/// A group generated by one to three random permutations of 2..=5 points.
fn small_group() -> impl Strategy<Value = FiniteGroup> {
    (2usize..=5)
        .prop_flat_map(|n| prop::collection::vec(perm(n), 1..=3))
        .prop_map(|gens| FiniteGroup::generate(gens).unwrap())
}

fn named_group() -> impl Strategy<Value = FiniteGroup> {
    prop::sample::select(vec!["Z2", "Z3", "Z4", "Z6", "S3", "A4", "S4", "Z5"]).prop_map(|n| group(n).unwrap())
}

fn b() -> Budget {
    Budget::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn group_axioms(g in small_group(), picks in prop::collection::vec(any::<prop::sample::Index>(), 3)) {
        let t = g.table();
        let n = g.order();
        let [a, b2, c] = [picks[0].index(n), picks[1].index(n), picks[2].index(n)];
        let e = t.identity();
        prop_assert_eq!(t.mul(t.mul(a, b2), c), t.mul(a, t.mul(b2, c)));
        prop_assert_eq!(t.mul(a, e), a);
        prop_assert_eq!(t.mul(e, a), a);
        prop_assert_eq!(t.mul(a, t.inv(a)), e);
        // the table agrees with composing the permutations
        let els = g.elements();
        prop_assert_eq!(&els[t.mul(a, b2)], &els[a].compose(&els[b2]));
        // Lagrange for the cyclic subgroup of a
        let cyc = t.closure(&[a]).count_ones(..);
        prop_assert_eq!(n % cyc, 0);
    }

    #[test]
    fn orbit_stabilizer(g in small_group(), p in any::<prop::sample::Index>()) {
        let act = GroupAction::natural(&g);
        let x = p.index(act.points());
        let stab = act.stabilizer(&Target::Point(x)).unwrap();
        prop_assert_eq!(act.orbit_of(x).len() * stab.order(), g.order());
        prop_assert!(stab.is_subgroup_of(&g));
    }

    #[test]
    fn coset_action_matches_index(g in named_group(), pick in any::<prop::sample::Index>()) {
        let classes = subgroups_up_to_conjugacy(&g, &b()).unwrap();
        let h = &classes[pick.index(classes.len())].representative;
        let act = coset_action(&g, h).unwrap();
        prop_assert_eq!(act.points(), g.order() / h.order());
        prop_assert!(act.is_transitive());
        // the coset H itself is point 0 and is stabilized exactly by H
        let stab = act.stabilizer(&Target::Point(0)).unwrap();
        prop_assert_eq!(&stab, h);
    }

    #[test]
    fn action_is_homomorphism(g in named_group(), pick in any::<prop::sample::Index>(), i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>()) {
        let classes = subgroups_up_to_conjugacy(&g, &b()).unwrap();
        let h = &classes[pick.index(classes.len())].representative;
        let act = coset_action(&g, h).unwrap();
        let t = g.table();
        let (a, c) = (i.index(g.order()), j.index(g.order()));
        prop_assert_eq!(act.element_image(t.mul(a, c)), &act.element_image(a).compose(act.element_image(c)));
    }

    #[test]
    fn reduced_fs_ts_agree_with_definitions(d in 2usize..=3, n in 1usize..=3, seed in any::<u64>()) {
        let op = random_op(d, n, seed);
        prop_assert_eq!(satisfies(&op, &fs(n).unwrap(), &b()).unwrap(), brute_fs(&op));
        prop_assert_eq!(satisfies(&op, &ts(n).unwrap(), &b()).unwrap(), brute_ts(&op));
        // symmetrize the table to hit the positive cases too
        let sym = FiniteOperation::from_fn(d, n, |c| {
            let mut s = c.to_vec();
            s.sort();
            op.apply(&s)
        }).unwrap();
        prop_assert!(brute_fs(&sym));
        prop_assert!(satisfies(&sym, &fs(n).unwrap(), &b()).unwrap());
        prop_assert_eq!(satisfies(&sym, &ts(n).unwrap(), &b()).unwrap(), brute_ts(&sym));
    }

    #[test]
    fn minor_composition_law(seed in any::<u64>(), s in prop::collection::vec(0usize..3, 3), t in prop::collection::vec(0usize..4, 3), c in prop::collection::vec(0usize..2, 4)) {
        let f = OperationTerm::table(random_op(2, 3, seed));
        let inner = OperationTerm::minor(&f, s.clone(), 3).unwrap();
        let outer = OperationTerm::minor(&inner, t.clone(), 4).unwrap();
        let direct = OperationTerm::minor(&f, s.iter().map(|&i| t[i]).collect(), 4).unwrap();
        let mut ev = Evaluator::new(&b());
        prop_assert_eq!(ev.eval(&outer, &c).unwrap(), ev.eval(&direct, &c).unwrap());
    }

    #[test]
    fn semantic_and_literal_gp_agree(n in prop::sample::select(vec![3usize, 5]), seed in any::<u64>(), flip in any::<prop::sample::Index>()) {
        let maj = OperationTerm::table(FiniteOperation::majority3());
        let xor = OperationTerm::table(FiniteOperation::xor3());
        let mut ev = Evaluator::new(&b());
        let base = pplab_core::forge::build_gp(&mut ev, &maj, &xor, n, &b()).unwrap();
        let good = ev.tabulate(&base).unwrap();
        // a witness, a one-cell mutation of it, and a random table
        let mut table = good.table().to_vec();
        let i = flip.index(table.len());
        table[i] ^= 1;
        let mutated = FiniteOperation::new(2, n, table).unwrap();
        for op in [good, mutated, random_op(2, n, seed)] {
            for k in 1..=n {
                let term = OperationTerm::table(op.clone());
                let semantic = check_gp(&mut Evaluator::new(&b()), &term, n, k, &b()).unwrap();
                let literal = satisfies(&op, &gp(n, k).unwrap(), &b()).unwrap();
                prop_assert_eq!(semantic, literal, "n={} k={}", n, k);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn biaction_claims_hold(gi in 0usize..5, hi in 0usize..5, seed in any::<u64>()) {
        let acts = small_actions();
        let (gact, hact) = (&acts[gi], &acts[hi]);
        let mut rng = seed;
        let t: Vec<usize> = (0..hact.points()).map(|_| next(&mut rng) % gact.points()).collect();
        let r = biaction_subquotient(gact, hact, &t, &b()).unwrap();
        prop_assert!(r.pass, "{:?}", r.failures);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn reduce_postconditions(g in named_group(), picks in prop::collection::vec(any::<prop::sample::Index>(), 1..=3)) {
        let classes = subgroups_up_to_conjugacy(&g, &b()).unwrap();
        let parts: Vec<GroupAction> = picks
            .iter()
            .map(|p| coset_action(&g, &classes[p.index(classes.len())].representative).unwrap())
            .collect();
        let act = GroupAction::disjoint_union(&parts).unwrap();
        let r = reduce_to_simple(&act, &b()).unwrap();
        prop_assert!(r.orders.windows(2).all(|w| w[1] < w[0]), "{:?}", r.orders);
        match &r.verdict {
            Verdict::FixedPoint(x) => {
                prop_assert!(act.fixed_points().contains(x));
            }
            Verdict::Simple(s) => {
                prop_assert!(!act.has_fixed_point());
                prop_assert_eq!(normal_subgroups(s.group(), &b()).unwrap().len(), 2);
                prop_assert!(!s.has_fixed_point());
            }
        }
    }
}

fn next(state: &mut u64) -> usize {
    // splitmix64
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    (z ^ (z >> 31)) as usize
}

fn random_op(d: usize, n: usize, seed: u64) -> FiniteOperation {
    let mut s = seed;
    FiniteOperation::from_fn(d, n, |c| {
        // keep it idempotent half of the time so conditions are not trivially violated
        if seed % 2 == 0 && c.iter().all(|&x| x == c[0]) {
            c[0]
        } else {
            next(&mut s) % d
        }
    })
    .unwrap()
}

fn tuples(d: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| (0..d).map(move |x| {
                let mut t = t.clone();
                t.push(x);
                t
            }))
            .collect();
    }
    out
}

fn brute_fs(op: &FiniteOperation) -> bool {
    tuples(op.domain(), op.arity()).iter().all(|c| {
        let mut s = c.clone();
        s.sort();
        op.apply(c) == op.apply(&s)
    })
}

fn brute_ts(op: &FiniteOperation) -> bool {
    let all = tuples(op.domain(), op.arity());
    all.iter().all(|a| {
        all.iter().all(|b| {
            let sa: std::collections::BTreeSet<_> = a.iter().collect();
            let sb: std::collections::BTreeSet<_> = b.iter().collect();
            sa != sb || op.apply(a) == op.apply(b)
        })
    })
}

fn small_actions() -> Vec<GroupAction> {
    let z2 = group("Z2").unwrap();
    let z3 = group("Z3").unwrap();
    let s3 = group("S3").unwrap();
    vec![
        GroupAction::natural(&z2),
        GroupAction::natural(&z3),
        GroupAction::natural(&s3),
        GroupAction::regular(&s3),
        GroupAction::regular(&group("Z4").unwrap()),
    ]
}
