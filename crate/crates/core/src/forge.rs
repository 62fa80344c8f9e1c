//! From a quasi majority and a quasi Maltsev operation to generalized
//! pairing, symmetric pairing, compatible generalized minority and totally
//! symmetric operations, with every stage checked exhaustively.

use std::fmt;

use crate::budget::{saturating_pow, Budget};
use crate::condition::{increment, maltsev, majority, satisfies, ts, FiniteOperation};
use crate::error::{Error, Result};
use crate::term::{boolean_fs_family, CountFunction, Evaluator, OperationTerm};

fn check_condition(ev: &mut Evaluator, term: &OperationTerm, cond: &crate::condition::MinorCondition, what: &str) -> Result<()> {
    let op = ev.tabulate(term)?;
    if satisfies(&op, cond, &Budget::default())? {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{what} does not satisfy {}", cond.kind)))
    }
}

/// Does `term` satisfy `GP(n,k)`? Semantic form: for every tuple with a
/// unique value `v` of odd multiplicity that occurs among the first `k`
/// positions, `term(c) = term(v,..,v)`.
pub fn check_gp(ev: &mut Evaluator, term: &OperationTerm, n: usize, k: usize, budget: &Budget) -> Result<bool> {
    Ok(gp_violation(ev, term, n, k, budget)?.is_none())
}

/// The first tuple violating `GP(n,k)`, if any.
pub fn gp_violation(
    ev: &mut Evaluator,
    term: &OperationTerm,
    n: usize,
    k: usize,
    budget: &Budget,
) -> Result<Option<Vec<usize>>> {
    if term.arity() != n || n % 2 == 0 || k == 0 || k > n {
        return Err(Error::Precondition(format!(
            "GP({n},{k}) check on a term of arity {}",
            term.arity()
        )));
    }
    let d = term.domain();
    let size = saturating_pow(d as u64, n as u64);
    Budget::check("GP check tuples", size, budget.enumeration)?;
    let mut c = vec![0; n];
    let mut mult = vec![0usize; d];
    for _ in 0..size {
        mult.iter_mut().for_each(|m| *m = 0);
        for &x in &c {
            mult[x] += 1;
        }
        let mut odd = (0..d).filter(|&v| mult[v] % 2 == 1);
        let v = odd.next().expect("odd arity has an odd multiplicity");
        if odd.next().is_none() && c[..k].contains(&v) {
            let lhs = ev.eval(term, &c)?;
            let rhs = ev.eval(term, &vec![v; n])?;
            if lhs != rhs {
                return Ok(Some(c));
            }
        }
        increment(&mut c, d);
    }
    Ok(None)
}

/// Full symmetry via adjacent transpositions over all tuples.
pub fn check_fs(ev: &mut Evaluator, term: &OperationTerm, budget: &Budget) -> Result<bool> {
    let d = term.domain();
    let n = term.arity();
    let size = saturating_pow(d as u64, n as u64);
    Budget::check("FS check tuples", size, budget.enumeration)?;
    let mut c = vec![0; n];
    for _ in 0..size {
        let base = ev.eval(term, &c)?;
        for i in 0..n.saturating_sub(1) {
            if c[i] != c[i + 1] {
                let mut s = c.clone();
                s.swap(i, i + 1);
                if ev.eval(term, &s)? != base {
                    return Ok(false);
                }
            }
        }
        increment(&mut c, d);
    }
    Ok(true)
}

/// Does the term return `v` on every constant tuple `(v,..,v)`?
pub fn is_idempotent(ev: &mut Evaluator, term: &OperationTerm) -> Result<bool> {
    for v in 0..term.domain() {
        if ev.eval(term, &vec![v; term.arity()])? != v {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `GP(3,2)` witness from a quasi Maltsev operation: `f(y1,y2,y3) = m(y1,y3,y2)`.
pub fn gp_base(malt: &OperationTerm) -> Result<OperationTerm> {
    OperationTerm::minor(malt, vec![0, 2, 1], 3)
}

/// From `GP(n,k)` to `GP(n,k+1)` (for `2 <= k < n`, 1-based `k`): the
/// majority of three copies, the second with positions `k, k+1` swapped and
/// the third with `k-1, k, k+1` reading `c_k, c_{k+1}, c_{k-1}`.
pub fn gp_lift_position(
    ev: &mut Evaluator,
    maj: &OperationTerm,
    gp: &OperationTerm,
    k: usize,
    budget: &Budget,
) -> Result<OperationTerm> {
    let n = gp.arity();
    if n % 2 == 0 || k < 2 || k >= n {
        return Err(Error::Precondition(format!("position lift needs 2 <= k < n odd, got n={n}, k={k}")));
    }
    check_condition(ev, maj, &majority(), "majority input")?;
    if !check_gp(ev, gp, n, k, budget)? {
        return Err(Error::Precondition(format!("input does not satisfy GP({n},{k})")));
    }
    let id: Vec<usize> = (0..n).collect();
    let mut second = id.clone();
    second.swap(k - 1, k);
    let mut third = id.clone();
    third[k - 2] = k - 1;
    third[k - 1] = k;
    third[k] = k - 2;
    let copies = vec![
        gp.clone(),
        OperationTerm::minor(gp, second, n)?,
        OperationTerm::minor(gp, third, n)?,
    ];
    OperationTerm::compose(maj, copies)
}

/// From `GP(n,n)` to `GP(n+2,2)`:
/// `malt(p(c1,..,c1), p(c3,..,c_{n+2}), p(c2,..,c2))`.
pub fn gp_lift_arity(
    ev: &mut Evaluator,
    malt: &OperationTerm,
    p: &OperationTerm,
    budget: &Budget,
) -> Result<OperationTerm> {
    let n = p.arity();
    if n < 3 || n % 2 == 0 {
        return Err(Error::Precondition(format!("arity lift needs odd n >= 3, got {n}")));
    }
    check_condition(ev, malt, &maltsev(), "Maltsev input")?;
    if !check_gp(ev, p, n, n, budget)? {
        return Err(Error::Precondition(format!("input does not satisfy GP({n},{n})")));
    }
    let m = n + 2;
    let copies = vec![
        OperationTerm::minor(p, vec![0; n], m)?,
        OperationTerm::minor(p, (2..m).collect(), m)?,
        OperationTerm::minor(p, vec![1; n], m)?,
    ];
    OperationTerm::compose(malt, copies)
}

/// `GP(m,m)` witnesses for `m = 3, 5, .., n`.
pub fn build_gp_chain(
    ev: &mut Evaluator,
    maj: &OperationTerm,
    malt: &OperationTerm,
    n: usize,
    budget: &Budget,
) -> Result<Vec<OperationTerm>> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::Precondition(format!("GP arity must be odd and at least 3, got {n}")));
    }
    if n > budget.gp_arity {
        return Err(Error::Budget {
            what: "generalized pairing arity",
            cap: budget.gp_arity as u64,
        });
    }
    check_condition(ev, maj, &majority(), "majority input")?;
    check_condition(ev, malt, &maltsev(), "Maltsev input")?;
    let mut current = gp_base(malt)?;
    if !check_gp(ev, &current, 3, 2, budget)? {
        return Err(Error::Verification("converted Maltsev term fails GP(3,2)".into()));
    }
    let mut chain = Vec::new();
    let mut m = 3;
    loop {
        for k in 2..m {
            current = gp_lift_position(ev, maj, &current, k, budget)?;
        }
        chain.push(current.clone());
        if m == n {
            return Ok(chain);
        }
        current = gp_lift_arity(ev, malt, &current, budget)?;
        m += 2;
    }
}

/// A `GP(n,n)` witness.
pub fn build_gp(
    ev: &mut Evaluator,
    maj: &OperationTerm,
    malt: &OperationTerm,
    n: usize,
    budget: &Budget,
) -> Result<OperationTerm> {
    Ok(build_gp_chain(ev, maj, malt, n, budget)?
        .pop()
        .expect("chain is nonempty"))
}

/// The count function applied to `p(c_σ)` over all `σ ∈ S_n`; checked to be
/// fully symmetric and to satisfy `GP(n,n)`.
pub fn symmetrize_gp(
    ev: &mut Evaluator,
    count: CountFunction,
    p: &OperationTerm,
    budget: &Budget,
) -> Result<OperationTerm> {
    let n = p.arity();
    if !check_gp(ev, p, n, n, budget)? {
        return Err(Error::Precondition(format!("input does not satisfy GP({n},{n})")));
    }
    let s = OperationTerm::symmetrize(count, p)?;
    if !check_gp(ev, &s, n, n, budget)? || !check_fs(ev, &s, budget)? {
        return Err(Error::Verification(format!("symmetrized GP({n},{n}) check failed")));
    }
    Ok(s)
}

/// Odd-size subsets of `{0..m-1}`, sorted by size then lexicographically;
/// proper subsets only when `proper`.
pub fn odd_subsets(m: usize, proper: bool) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (1u64..1 << m)
        .filter(|s| s.count_ones() % 2 == 1)
        .filter(|s| !proper || s.count_ones() as usize != m)
        .map(|s| (0..m).filter(|&i| s >> i & 1 == 1).collect())
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Apply `outer` to `g_{|A|}(c_a : a ∈ A)` over the given subsets.
fn over_subsets(outer: &OperationTerm, gmins: &[OperationTerm], m: usize, subsets: &[Vec<usize>]) -> Result<OperationTerm> {
    let inners = subsets
        .iter()
        .map(|a| OperationTerm::minor(&gmins[(a.len() - 1) / 2], a.clone(), m))
        .collect::<Result<Vec<_>>>()?;
    OperationTerm::compose(outer, inners)
}

/// Does `g_{m+2}(y,y,x1..xm) = g_m(x1..xm)` hold on every tuple?
pub fn check_compatible(ev: &mut Evaluator, big: &OperationTerm, small: &OperationTerm, budget: &Budget) -> Result<bool> {
    let m = small.arity();
    if big.arity() != m + 2 {
        return Err(Error::Precondition("compatibility needs arities m+2 and m".into()));
    }
    let d = big.domain();
    let size = saturating_pow(d as u64, m as u64 + 1);
    Budget::check("compatibility check tuples", size, budget.enumeration)?;
    let mut t = vec![0; m + 1];
    for _ in 0..size {
        let mut args = vec![t[m], t[m]];
        args.extend_from_slice(&t[..m]);
        if ev.eval(big, &args)? != ev.eval(small, &t[..m])? {
            return Ok(false);
        }
        increment(&mut t, d);
    }
    Ok(true)
}

/// `g1 = x` and `g_{2k+1} = p_k(g_{|A|}(c_A) : A ⊊ [2k+1] odd)`, where
/// `sym_gps[k-1]` is a symmetric `GP(4^k-1)` operation.
pub fn build_compatible_gmins(
    ev: &mut Evaluator,
    sym_gps: &[OperationTerm],
    budget: &Budget,
) -> Result<Vec<OperationTerm>> {
    let Some(first) = sym_gps.first() else {
        return Err(Error::Precondition("no symmetric GP operations given".into()));
    };
    let d = first.domain();
    let mut gmins = vec![OperationTerm::projection(d, 1, 0)?];
    for (i, p) in sym_gps.iter().enumerate() {
        let k = i + 1;
        let expected = 4usize.pow(k as u32) - 1;
        if p.arity() != expected {
            return Err(Error::Precondition(format!(
                "symmetric GP operation {k} has arity {}, expected {expected}",
                p.arity()
            )));
        }
        if !check_gp(ev, p, expected, expected, budget)? || !check_fs(ev, p, budget)? {
            return Err(Error::Precondition(format!("input {k} is not a symmetric GP({expected},{expected}) operation")));
        }
        let m = 2 * k + 1;
        let subsets = odd_subsets(m, true);
        debug_assert_eq!(subsets.len(), expected);
        let g = over_subsets(p, &gmins, m, &subsets)?;
        if !check_fs(ev, &g, budget)? {
            return Err(Error::Verification(format!("g{m} is not fully symmetric")));
        }
        if !check_compatible(ev, &g, &gmins[k - 1], budget)? {
            return Err(Error::Verification(format!("g{m} is not compatible with g{}", m - 2)));
        }
        gmins.push(g);
    }
    Ok(gmins)
}

/// `t(c) = f(g_{|A|}(c_A) : A ⊆ [n] odd)` for odd `n`, checked against `ts(n)`.
pub fn build_ts(
    ev: &mut Evaluator,
    gmins: &[OperationTerm],
    count: CountFunction,
    n: usize,
    budget: &Budget,
) -> Result<OperationTerm> {
    if n % 2 == 0 {
        return Err(Error::Precondition("build_ts needs odd n; take a minor for even arities".into()));
    }
    if gmins.len() < n.div_ceil(2) {
        return Err(Error::Precondition(format!("need g1..g{n}")));
    }
    let family = 1usize << (n - 1);
    let f = OperationTerm::count(count, family)?;
    let t = over_subsets(&f, gmins, n, &odd_subsets(n, false))?;
    let op = ev.tabulate(&t)?;
    if !satisfies(&op, &ts(n)?, budget)? {
        return Err(Error::Verification(format!("ts{n} is not totally symmetric")));
    }
    Ok(t)
}

/// Even arity `n` from `ts_{n+1}` with the last argument repeated.
pub fn ts_even(ts_next: &OperationTerm) -> Result<OperationTerm> {
    let n = ts_next.arity() - 1;
    let mut map: Vec<usize> = (0..n).collect();
    map.push(n - 1);
    OperationTerm::minor(ts_next, map, n)
}

/// One verified claim of the pipeline.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub tuples: u64,
    pub ok: bool,
}

#[derive(Clone, Debug, Default)]
pub struct PipelineReport {
    pub checks: Vec<Check>,
}

impl PipelineReport {
    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.ok).count()
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for PipelineReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{:<5} {:<40} {:>8} tuples",
                if c.ok { "ok" } else { "FAIL" },
                c.name,
                c.tuples
            )?;
        }
        writeln!(f, "{} checks, {} failures", self.checks.len(), self.failures())
    }
}

/// Run every construction up to arity `n_max` (odd, at most 5) on the
/// Boolean domain, checking each claim over all tuples.
pub fn pipeline(
    maj: &FiniteOperation,
    malt: &FiniteOperation,
    n_max: usize,
    budget: &Budget,
) -> Result<PipelineReport> {
    if maj.domain() != 2 || malt.domain() != 2 {
        return Err(Error::Precondition("the pipeline runs on the 2-element domain".into()));
    }
    if n_max % 2 == 0 || !(3..=5).contains(&n_max) {
        return Err(Error::Precondition("n_max must be 3 or 5".into()));
    }
    if !satisfies(maj, &majority(), budget)? {
        return Err(Error::Precondition("first operation is not a quasi majority".into()));
    }
    if !satisfies(malt, &maltsev(), budget)? {
        return Err(Error::Precondition("second operation is not quasi Maltsev".into()));
    }
    let mut report = PipelineReport::default();
    let mut ev = Evaluator::new(budget);
    let maj_t = OperationTerm::table(maj.clone());
    let malt_t = OperationTerm::table(malt.clone());
    let kmax = (n_max - 1) / 2;
    let top = 4usize.pow(kmax as u32) - 1;

    let chain = build_gp_chain(&mut ev, &maj_t, &malt_t, top, budget)?;
    for p in &chain {
        let n = p.arity();
        let ok = check_gp(&mut ev, p, n, n, budget)? && is_idempotent(&mut ev, p)?;
        report.checks.push(Check {
            name: format!("GP({n},{n})"),
            tuples: 1 << n,
            ok,
        });
    }

    let mut sym_gps = Vec::new();
    for k in 1..=kmax {
        let n = 4usize.pow(k as u32) - 1;
        let p = chain.iter().find(|p| p.arity() == n).expect("chain covers 4^k-1");
        let fact: u128 = (1..=n as u128).product();
        let s = symmetrize_gp(&mut ev, boolean_fs_family(fact)?, p, budget)?;
        let ok = check_gp(&mut ev, &s, n, n, budget)? && check_fs(&mut ev, &s, budget)?;
        report.checks.push(Check {
            name: format!("SymGP({n}): FS({n}) and GP({n},{n})"),
            tuples: 1 << n,
            ok,
        });
        sym_gps.push(s);
    }

    let gmins = build_compatible_gmins(&mut ev, &sym_gps, budget)?;
    for (i, g) in gmins.iter().enumerate().skip(1) {
        let m = 2 * i + 1;
        let fs_ok = check_fs(&mut ev, g, budget)?;
        let compat = check_compatible(&mut ev, g, &gmins[i - 1], budget)?;
        report.checks.push(Check {
            name: format!("g{m}: FS({m}) and g{m}(y,y,x..) = g{}(x..)", m - 2),
            tuples: 1 << m,
            ok: fs_ok && compat,
        });
    }
    let g3 = ev.tabulate(&gmins[1])?;
    report.checks.push(Check {
        name: "g3 = ternary XOR".into(),
        tuples: 8,
        ok: g3 == FiniteOperation::xor3(),
    });

    let mut odd_ts = Vec::new();
    for n in (3..=n_max).step_by(2) {
        let family = 1u128 << (n - 1);
        let t = build_ts(&mut ev, &gmins, boolean_fs_family(family)?, n, budget)?;
        odd_ts.push((n, t));
    }
    for n in 2..=n_max {
        let t = if n % 2 == 1 {
            odd_ts.iter().find(|(m, _)| *m == n).expect("built").1.clone()
        } else {
            ts_even(&odd_ts.iter().find(|(m, _)| *m == n + 1).expect("built").1)?
        };
        let op = ev.tabulate(&t)?;
        let ok = satisfies(&op, &ts(n)?, budget)? && is_idempotent(&mut ev, &t)?;
        report.checks.push(Check {
            name: format!("ts{n}: TS({n})"),
            tuples: 1 << n,
            ok,
        });
    }
    Ok(report)
}
