//! Operation terms: evaluation DAGs over a finite domain built from value
//! tables, multiset-determined (count) functions, projections, minors,
//! composition and symmetrization over all argument permutations.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::budget::{saturating_pow, Budget};
use crate::condition::{increment, FiniteOperation};
use crate::error::{Error, Result};

/// A function of value multiplicities. Applied to a family of values it
/// sees only how often each value occurs, so it is fully symmetric by
/// construction.
#[derive(Clone)]
pub struct CountFunction {
    domain: usize,
    family: u128,
    name: String,
    rule: Arc<dyn Fn(&[u128]) -> usize + Send + Sync>,
}

impl CountFunction {
    /// `rule` receives the multiplicity of every value (summing to `family`)
    /// and must return a value below `domain`; it is checked to return `v`
    /// when all mass is on `v`.
    pub fn new(
        domain: usize,
        family: u128,
        name: impl Into<String>,
        rule: impl Fn(&[u128]) -> usize + Send + Sync + 'static,
    ) -> Result<Self> {
        let c = CountFunction {
            domain,
            family,
            name: name.into(),
            rule: Arc::new(rule),
        };
        for v in 0..domain {
            let mut counts = vec![0u128; domain];
            counts[v] = family;
            if c.apply(&counts)? != v {
                return Err(Error::Precondition(format!(
                    "count function {} is not idempotent at {v}",
                    c.name
                )));
            }
        }
        Ok(c)
    }

    pub fn domain(&self) -> usize {
        self.domain
    }

    pub fn family(&self) -> u128 {
        self.family
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn apply(&self, counts: &[u128]) -> Result<usize> {
        let total: u128 = counts.iter().sum();
        if counts.len() != self.domain || total != self.family {
            return Err(Error::Precondition(format!(
                "count vector of total {total} for family {}",
                self.family
            )));
        }
        let v = (self.rule)(counts);
        if v >= self.domain {
            return Err(Error::Precondition(format!("{} returned {v}", self.name)));
        }
        Ok(v)
    }
}

impl fmt::Debug for CountFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CountFunction({}, family {})", self.name, self.family)
    }
}

/// Threshold rule on `{0,1}`: 1 iff at least half of the family is 1.
pub fn boolean_fs_family(family: u128) -> Result<CountFunction> {
    if family == 0 {
        return Err(Error::Precondition("family size must be positive".into()));
    }
    CountFunction::new(2, family, format!("threshold/{family}"), |c| {
        usize::from(2 * c[1] >= c[0] + c[1])
    })
}

#[derive(Clone, Debug)]
pub enum Base {
    Table(FiniteOperation),
    /// A count function applied to its `arity` arguments.
    Count(CountFunction, usize),
}

#[derive(Clone, Debug)]
pub enum Node {
    Base(Base),
    Projection(usize),
    /// `inner(c[map[0]], .., c[map[m-1]])` with `m` the inner arity.
    Minor(OperationTerm, Vec<usize>),
    Composition(OperationTerm, Vec<OperationTerm>),
    /// `count` applied to `inner(c_σ)` over all permutations `σ`.
    Symmetrize(CountFunction, OperationTerm),
}

#[derive(Debug)]
struct TermNode {
    id: u64,
    arity: usize,
    domain: usize,
    node: Node,
}

/// An immutable, cheaply cloned operation term.
#[derive(Clone, Debug)]
pub struct OperationTerm(Arc<TermNode>);

static NEXT_ID: AtomicU64 = AtomicU64::new(0);

impl OperationTerm {
    fn make(arity: usize, domain: usize, node: Node) -> Self {
        OperationTerm(Arc::new(TermNode {
            id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
            arity,
            domain,
            node,
        }))
    }

    pub fn table(op: FiniteOperation) -> Self {
        let (a, d) = (op.arity(), op.domain());
        Self::make(a, d, Node::Base(Base::Table(op)))
    }

    pub fn count(count: CountFunction, arity: usize) -> Result<Self> {
        if count.family() != arity as u128 {
            return Err(Error::Precondition(format!(
                "count function for family {} used with {arity} arguments",
                count.family()
            )));
        }
        let d = count.domain();
        Ok(Self::make(arity, d, Node::Base(Base::Count(count, arity))))
    }

    pub fn projection(domain: usize, arity: usize, index: usize) -> Result<Self> {
        if index >= arity {
            return Err(Error::Precondition("projection index out of range".into()));
        }
        Ok(Self::make(arity, domain, Node::Projection(index)))
    }

    /// The minor `c -> inner(c[map[0]], ..)` of arity `arity`.
    pub fn minor(inner: &OperationTerm, map: Vec<usize>, arity: usize) -> Result<Self> {
        if map.len() != inner.arity() || map.iter().any(|&i| i >= arity) {
            return Err(Error::Precondition(format!(
                "minor map {map:?} does not send {} positions into {arity}",
                inner.arity()
            )));
        }
        Ok(Self::make(arity, inner.domain(), Node::Minor(inner.clone(), map)))
    }

    pub fn compose(outer: &OperationTerm, inners: Vec<OperationTerm>) -> Result<Self> {
        let Some(first) = inners.first() else {
            return Err(Error::Precondition("composition needs inner terms".into()));
        };
        let arity = first.arity();
        if inners.len() != outer.arity()
            || inners.iter().any(|t| t.arity() != arity || t.domain() != outer.domain())
        {
            return Err(Error::Precondition("composition arities do not match".into()));
        }
        Ok(Self::make(arity, outer.domain(), Node::Composition(outer.clone(), inners)))
    }

    pub fn symmetrize(count: CountFunction, inner: &OperationTerm) -> Result<Self> {
        let n = inner.arity();
        let fact: u128 = (1..=n as u128).product();
        if count.family() != fact || count.domain() != inner.domain() {
            return Err(Error::Precondition(format!(
                "symmetrizing arity {n} needs a count function for family {fact}"
            )));
        }
        Ok(Self::make(n, inner.domain(), Node::Symmetrize(count, inner.clone())))
    }

    pub fn arity(&self) -> usize {
        self.0.arity
    }

    pub fn domain(&self) -> usize {
        self.0.domain
    }

    pub fn node(&self) -> &Node {
        &self.0.node
    }

    fn id(&self) -> u64 {
        self.0.id
    }
}

enum Memo {
    Dense(Vec<u32>),
    Sparse(HashMap<Vec<usize>, usize>),
}

const UNSET: u32 = u32::MAX;
const DENSE_LIMIT: u64 = 1 << 22;

/// An evaluation session. Values are memoized per node and argument tuple
/// for the lifetime of the session.
pub struct Evaluator {
    memo: HashMap<u64, Memo>,
    budget: Budget,
    /// Key symmetrize memos by the sorted tuple (valid since their output
    /// depends only on the multiset of arguments).
    sorted_symmetrize_keys: bool,
    evaluations: u64,
}

impl Evaluator {
    pub fn new(budget: &Budget) -> Self {
        Evaluator {
            memo: HashMap::new(),
            budget: budget.clone(),
            sorted_symmetrize_keys: true,
            evaluations: 0,
        }
    }

    /// A session that evaluates every symmetrize input separately, so that
    /// symmetry checks are not answered by the memo.
    pub fn literal(budget: &Budget) -> Self {
        Evaluator {
            sorted_symmetrize_keys: false,
            ..Evaluator::new(budget)
        }
    }

    /// Node evaluations performed (memo misses).
    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    pub fn eval(&mut self, term: &OperationTerm, tuple: &[usize]) -> Result<usize> {
        if tuple.len() != term.arity() || tuple.iter().any(|&x| x >= term.domain()) {
            return Err(Error::Precondition(format!(
                "tuple {tuple:?} does not fit arity {} over {} values",
                term.arity(),
                term.domain()
            )));
        }
        self.eval_inner(term, tuple)
    }

    fn lookup(&self, term: &OperationTerm, key: &[usize]) -> Option<usize> {
        match self.memo.get(&term.id())? {
            Memo::Dense(v) => {
                let idx = key.iter().fold(0, |acc, &x| acc * term.domain() + x);
                let val = v[idx];
                (val != UNSET).then_some(val as usize)
            }
            Memo::Sparse(m) => m.get(key).copied(),
        }
    }

    fn store(&mut self, term: &OperationTerm, key: &[usize], value: usize) {
        let d = term.domain();
        let entry = self.memo.entry(term.id()).or_insert_with(|| {
            let size = saturating_pow(d as u64, term.arity() as u64);
            if size <= DENSE_LIMIT {
                Memo::Dense(vec![UNSET; size as usize])
            } else {
                Memo::Sparse(HashMap::new())
            }
        });
        match entry {
            Memo::Dense(v) => {
                let idx = key.iter().fold(0, |acc, &x| acc * d + x);
                v[idx] = value as u32;
            }
            Memo::Sparse(m) => {
                m.insert(key.to_vec(), value);
            }
        }
    }

    fn eval_inner(&mut self, term: &OperationTerm, tuple: &[usize]) -> Result<usize> {
        let key: Vec<usize> = match term.node() {
            Node::Projection(i) => return Ok(tuple[*i]),
            Node::Base(Base::Table(op)) => return Ok(op.apply(tuple)),
            Node::Symmetrize(..) if self.sorted_symmetrize_keys => {
                let mut k = tuple.to_vec();
                k.sort_unstable();
                k
            }
            _ => tuple.to_vec(),
        };
        if let Some(v) = self.lookup(term, &key) {
            return Ok(v);
        }
        self.evaluations += 1;
        let value = match term.node() {
            Node::Projection(_) | Node::Base(Base::Table(_)) => unreachable!("handled above"),
            Node::Base(Base::Count(count, _)) => {
                let mut counts = vec![0u128; term.domain()];
                for &x in tuple {
                    counts[x] += 1;
                }
                count.apply(&counts)?
            }
            Node::Minor(inner, map) => {
                let args: Vec<usize> = map.iter().map(|&i| tuple[i]).collect();
                self.eval_inner(inner, &args)?
            }
            Node::Composition(outer, inners) => {
                let mut args = Vec::with_capacity(inners.len());
                for t in inners {
                    args.push(self.eval_inner(t, tuple)?);
                }
                self.eval_inner(outer, &args)?
            }
            Node::Symmetrize(count, inner) => self.eval_symmetrize(count, inner, &key)?,
        };
        self.store(term, &key, value);
        Ok(value)
    }

    /// Sum over distinct rearrangements of `tuple`, each weighted by the
    /// number of permutations producing it (the product of factorials of
    /// the multiplicities).
    fn eval_symmetrize(
        &mut self,
        count: &CountFunction,
        inner: &OperationTerm,
        tuple: &[usize],
    ) -> Result<usize> {
        let d = inner.domain();
        let mut mult = vec![0usize; d];
        for &x in tuple {
            mult[x] += 1;
        }
        let weight: u128 = mult
            .iter()
            .map(|&m| (1..=m as u128).product::<u128>())
            .product();
        let n = tuple.len();
        let fact: u128 = (1..=n as u128).product();
        let distinct = fact / weight;
        if distinct > self.budget.symmetrize as u128 {
            return Err(Error::Budget {
                what: "distinct permuted tuples per symmetrization",
                cap: self.budget.symmetrize,
            });
        }
        let mut counts = vec![0u128; d];
        // enumerate multiset permutations in lexicographic order
        let mut cur: Vec<usize> = tuple.to_vec();
        cur.sort_unstable();
        loop {
            let v = self.eval_inner(inner, &cur)?;
            counts[v] += weight;
            // next permutation
            let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
                break;
            };
            let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).expect("successor exists");
            cur.swap(i, j);
            cur[i + 1..].reverse();
        }
        count.apply(&counts)
    }

    /// Full value table of a term.
    pub fn tabulate(&mut self, term: &OperationTerm) -> Result<FiniteOperation> {
        let d = term.domain();
        let n = term.arity();
        let size = saturating_pow(d as u64, n as u64);
        Budget::check("term table size", size, self.budget.enumeration)?;
        let mut table = Vec::with_capacity(size as usize);
        let mut t = vec![0; n];
        for _ in 0..size {
            table.push(self.eval_inner(term, &t)? as u32);
            increment(&mut t, d);
        }
        FiniteOperation::new(d, n, table)
    }
}

/// One-shot evaluation in a fresh session.
pub fn evaluate(term: &OperationTerm, tuple: &[usize], budget: &Budget) -> Result<usize> {
    Evaluator::new(budget).eval(term, tuple)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b() -> Budget {
        Budget::default()
    }

    fn xor3() -> OperationTerm {
        OperationTerm::table(FiniteOperation::xor3())
    }

    #[test]
    fn base_and_minor() {
        assert_eq!(evaluate(&xor3(), &[1, 1, 0], &b()).unwrap(), 0);
        let m = OperationTerm::minor(&xor3(), vec![0, 0, 1], 2).unwrap();
        assert_eq!(evaluate(&m, &[1, 0], &b()).unwrap(), 0);
        assert_eq!(evaluate(&m, &[0, 1], &b()).unwrap(), 1);
        assert!(OperationTerm::minor(&xor3(), vec![0, 2], 2).is_err());
        assert!(evaluate(&m, &[2, 0], &b()).is_err());
    }

    #[test]
    fn symmetrize_constant() {
        let fam = boolean_fs_family(6).unwrap();
        let proj = OperationTerm::projection(2, 3, 0).unwrap();
        let s = OperationTerm::symmetrize(fam, &proj).unwrap();
        assert_eq!(evaluate(&s, &[1, 1, 1], &b()).unwrap(), 1);
        assert_eq!(evaluate(&s, &[0, 0, 0], &b()).unwrap(), 0);
        // two ones out of three: 4 of 6 permutations put a 1 first
        assert_eq!(evaluate(&s, &[1, 0, 1], &b()).unwrap(), 1);
        assert_eq!(evaluate(&s, &[1, 0, 0], &b()).unwrap(), 0);
    }

    #[test]
    fn threshold_rule() {
        let f4 = boolean_fs_family(4).unwrap();
        assert_eq!(f4.apply(&[2, 2]).unwrap(), 1);
        assert_eq!(boolean_fs_family(1).unwrap().apply(&[1, 0]).unwrap(), 0);
        assert_eq!(boolean_fs_family(6).unwrap().apply(&[5, 1]).unwrap(), 0);
        assert!(f4.apply(&[1, 1]).is_err());
    }

    #[test]
    fn non_idempotent_rule_rejected() {
        assert!(CountFunction::new(2, 3, "const", |_| 0).is_err());
    }

    #[test]
    fn symmetrize_budget() {
        let fam = boolean_fs_family((1..=9u128).product()).unwrap();
        let proj = OperationTerm::projection(2, 9, 0).unwrap();
        let s = OperationTerm::symmetrize(fam, &proj).unwrap();
        let tight = Budget {
            symmetrize: 10,
            ..Budget::default()
        };
        let err = evaluate(&s, &[0, 1, 0, 1, 0, 1, 0, 1, 0], &tight).unwrap_err();
        assert!(err.is_budget());
    }

    #[test]
    fn composition() {
        let maj = OperationTerm::table(FiniteOperation::majority3());
        let p = |i| OperationTerm::projection(2, 3, i).unwrap();
        let c = OperationTerm::compose(&maj, vec![p(0), p(1), xor3()]).unwrap();
        let mut ev = Evaluator::new(&b());
        assert_eq!(ev.eval(&c, &[1, 0, 0]).unwrap(), 1);
        assert_eq!(ev.eval(&c, &[0, 0, 1]).unwrap(), 0);
        assert_eq!(ev.tabulate(&c).unwrap().table().len(), 8);
    }
}
