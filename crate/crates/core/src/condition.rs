//! Minor identities and conditions, finite operations, and satisfaction.

use std::collections::BTreeMap;
use std::fmt;

use crate::action::GroupAction;
use crate::budget::{saturating_pow, Budget};
use crate::error::{Error, Result};

/// `symbol(args)` with arguments given as variable indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Applied {
    pub symbol: usize,
    pub args: Vec<usize>,
}

/// `left = right`, universally quantified over `variable_count` variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MinorIdentity {
    pub variable_count: usize,
    pub left: Applied,
    pub right: Applied,
}

impl MinorIdentity {
    pub fn new(variable_count: usize, left: Applied, right: Applied) -> Self {
        MinorIdentity {
            variable_count,
            left,
            right,
        }
    }
}

/// Which family a condition came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConditionKind {
    Maltsev,
    Majority,
    Cyclic(usize),
    Fs(usize),
    Ts(usize),
    Gmin(usize),
    Gp(usize, usize),
    SymGp(usize),
    CompatGmin(usize),
    /// `Σ(H↷Y)` for an action on `points` points.
    Action { group: String, points: usize },
    Custom,
}

impl fmt::Display for ConditionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConditionKind::Maltsev => write!(f, "maltsev"),
            ConditionKind::Majority => write!(f, "majority"),
            ConditionKind::Cyclic(p) => write!(f, "cyclic({p})"),
            ConditionKind::Fs(n) => write!(f, "fs({n})"),
            ConditionKind::Ts(n) => write!(f, "ts({n})"),
            ConditionKind::Gmin(n) => write!(f, "gmin({n})"),
            ConditionKind::Gp(n, k) => write!(f, "gp({n},{k})"),
            ConditionKind::SymGp(n) => write!(f, "symgp({n})"),
            ConditionKind::CompatGmin(n) => write!(f, "compat_gmin({n})"),
            ConditionKind::Action { group, points } => write!(f, "action({group} on {points})"),
            ConditionKind::Custom => write!(f, "custom"),
        }
    }
}

/// A finite set of minor identities over named symbols of fixed arity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinorCondition {
    /// `(name, arity)` per symbol id.
    pub symbols: Vec<(String, usize)>,
    pub identities: Vec<MinorIdentity>,
    pub kind: ConditionKind,
}

impl MinorCondition {
    /// Build and validate a custom condition.
    pub fn new(
        symbols: Vec<(String, usize)>,
        identities: Vec<MinorIdentity>,
        kind: ConditionKind,
    ) -> Result<Self> {
        let c = MinorCondition {
            symbols,
            identities,
            kind,
        };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        for id in &self.identities {
            for side in [&id.left, &id.right] {
                let Some((name, arity)) = self.symbols.get(side.symbol) else {
                    return Err(Error::InvalidCondition(format!(
                        "unknown symbol id {}",
                        side.symbol
                    )));
                };
                if side.args.len() != *arity {
                    return Err(Error::InvalidCondition(format!(
                        "{name} has arity {arity} but is applied to {} arguments",
                        side.args.len()
                    )));
                }
                if side.args.iter().any(|&v| v >= id.variable_count) {
                    return Err(Error::InvalidCondition(format!(
                        "variable out of range in an identity for {name}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn symbol_id(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|(n, _)| n == name)
    }

    /// Human-readable identities, variables printed as `x1, x2, ..`.
    pub fn describe(&self) -> Vec<String> {
        let side = |a: &Applied| {
            let args: Vec<String> = a.args.iter().map(|v| format!("x{}", v + 1)).collect();
            format!("{}({})", self.symbols[a.symbol].0, args.join(","))
        };
        self.identities
            .iter()
            .map(|id| format!("{} = {}", side(&id.left), side(&id.right)))
            .collect()
    }
}

fn single(name: &str, arity: usize) -> Vec<(String, usize)> {
    vec![(name.to_string(), arity)]
}

fn f(args: Vec<usize>) -> Applied {
    Applied { symbol: 0, args }
}

fn require(cond: bool, msg: impl Into<String>) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidCondition(msg.into()))
    }
}

/// The quasi Maltsev condition `f(x,x,x) = f(x,y,y) = f(y,y,x)`.
pub fn maltsev() -> MinorCondition {
    MinorCondition {
        symbols: single("f", 3),
        identities: vec![
            MinorIdentity::new(2, f(vec![0, 0, 0]), f(vec![0, 1, 1])),
            MinorIdentity::new(2, f(vec![0, 1, 1]), f(vec![1, 1, 0])),
        ],
        kind: ConditionKind::Maltsev,
    }
}

/// The quasi majority condition `f(x,x,x) = f(x,x,y) = f(x,y,x) = f(y,x,x)`.
pub fn majority() -> MinorCondition {
    MinorCondition {
        symbols: single("f", 3),
        identities: [vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]
            .into_iter()
            .map(|args| MinorIdentity::new(2, f(vec![0, 0, 0]), f(args)))
            .collect(),
        kind: ConditionKind::Majority,
    }
}

/// `f(x1,..,xp) = f(x2,..,xp,x1)`.
pub fn cyclic(p: usize) -> Result<MinorCondition> {
    require(p >= 1, "cyclic arity must be positive")?;
    Ok(MinorCondition {
        symbols: single("f", p),
        identities: vec![MinorIdentity::new(
            p,
            f((0..p).collect()),
            f((0..p).map(|i| (i + 1) % p).collect()),
        )],
        kind: ConditionKind::Cyclic(p),
    })
}

fn adjacent_transpositions(symbol: usize, n: usize) -> Vec<MinorIdentity> {
    (0..n.saturating_sub(1))
        .map(|i| {
            let mut swapped: Vec<usize> = (0..n).collect();
            swapped.swap(i, i + 1);
            MinorIdentity::new(
                n,
                Applied {
                    symbol,
                    args: (0..n).collect(),
                },
                Applied {
                    symbol,
                    args: swapped,
                },
            )
        })
        .collect()
}

/// Full symmetry, reduced to adjacent transpositions.
pub fn fs(n: usize) -> Result<MinorCondition> {
    require(n >= 1, "fs arity must be positive")?;
    Ok(MinorCondition {
        symbols: single("f", n),
        identities: adjacent_transpositions(0, n),
        kind: ConditionKind::Fs(n),
    })
}

/// Total symmetry: full symmetry plus moving one repeated occurrence,
/// `f(x1,x1,x3,..,xn) = f(x1,x3,x3,x4,..,xn)`.
pub fn ts(n: usize) -> Result<MinorCondition> {
    require(n >= 1, "ts arity must be positive")?;
    let mut identities = adjacent_transpositions(0, n);
    if n >= 3 {
        let mut left = vec![0, 0];
        left.extend(1..n - 1);
        let mut right = vec![0, 1];
        right.extend(1..n - 1);
        identities.push(MinorIdentity::new(n - 1, f(left), f(right)));
    }
    Ok(MinorCondition {
        symbols: single("f", n),
        identities,
        kind: ConditionKind::Ts(n),
    })
}

/// Generalized minority of odd arity: fully symmetric and
/// `f(x1,..,x_{n-2},y,y) = f(x1,..,x_{n-2},z,z)`.
pub fn gmin(n: usize) -> Result<MinorCondition> {
    require(n % 2 == 1, "gmin arity must be odd")?;
    let mut identities = adjacent_transpositions(0, n);
    if n >= 3 {
        let mut left: Vec<usize> = (0..n - 2).collect();
        left.extend([n - 2, n - 2]);
        let mut right: Vec<usize> = (0..n - 2).collect();
        right.extend([n - 1, n - 1]);
        identities.push(MinorIdentity::new(n, f(left), f(right)));
    }
    Ok(MinorCondition {
        symbols: single("f", n),
        identities,
        kind: ConditionKind::Gmin(n),
    })
}

/// All ways to split `positions` into unordered pairs.
fn pairings(positions: &[usize]) -> Vec<Vec<(usize, usize)>> {
    if positions.is_empty() {
        return vec![Vec::new()];
    }
    let first = positions[0];
    let mut out = Vec::new();
    for j in 1..positions.len() {
        let rest: Vec<usize> = positions[1..]
            .iter()
            .enumerate()
            .filter(|&(i, _)| i + 1 != j)
            .map(|(_, &p)| p)
            .collect();
        for mut p in pairings(&rest) {
            p.insert(0, (first, positions[j]));
            out.push(p);
        }
    }
    out
}

/// Generalized pairing `GP(n,k)` as literal identity patterns: the odd
/// variable sits alone at a position `i <= k` and every other variable fills
/// exactly one pair of positions; each pattern equals `f(x,..,x)` for the odd
/// variable `x`.
pub fn gp(n: usize, k: usize) -> Result<MinorCondition> {
    require(n % 2 == 1, "gp arity must be odd")?;
    require(1 <= k && k <= n, "gp needs 1 <= k <= n")?;
    require(n <= 9, "literal gp patterns are only generated up to arity 9")?;
    let vars = n.div_ceil(2);
    let mut identities = Vec::new();
    for i in 0..k {
        let rest: Vec<usize> = (0..n).filter(|&p| p != i).collect();
        for pairing in pairings(&rest) {
            let mut args = vec![0; n];
            for (v, (a, b)) in pairing.into_iter().enumerate() {
                args[a] = v + 1;
                args[b] = v + 1;
            }
            identities.push(MinorIdentity::new(vars, f(vec![0; n]), f(args)));
        }
    }
    Ok(MinorCondition {
        symbols: single("f", n),
        identities,
        kind: ConditionKind::Gp(n, k),
    })
}

/// A fully symmetric `GP(n,n)` operation.
pub fn symgp(n: usize) -> Result<MinorCondition> {
    let mut c = gp(n, n)?;
    c.identities.extend(adjacent_transpositions(0, n));
    c.kind = ConditionKind::SymGp(n);
    Ok(c)
}

/// Compatible generalized minorities `g1, g3, .., gn`: each fully symmetric
/// and `g_{m+2}(y,y,x1,..,xm) = g_m(x1,..,xm)`.
pub fn compat_gmin(n: usize) -> Result<MinorCondition> {
    require(n % 2 == 1, "compatible gmin arity must be odd")?;
    let arities: Vec<usize> = (1..=n).step_by(2).collect();
    let symbols = arities.iter().map(|&m| (format!("g{m}"), m)).collect();
    let mut identities = Vec::new();
    for (s, &m) in arities.iter().enumerate() {
        identities.extend(adjacent_transpositions(s, m));
        if s > 0 {
            let mut left = vec![m - 2, m - 2];
            left.extend(0..m - 2);
            identities.push(MinorIdentity::new(
                m - 1,
                Applied {
                    symbol: s,
                    args: left,
                },
                Applied {
                    symbol: s - 1,
                    args: (0..m - 2).collect(),
                },
            ));
        }
    }
    Ok(MinorCondition {
        symbols,
        identities,
        kind: ConditionKind::CompatGmin(n),
    })
}

/// `Σ(H↷Y)`: `f(t) = f(t_h)` for each generator `h`, where
/// `t_h(y) = t(h y)`. Checking generators suffices for a single symbol.
pub fn action_condition(action: &GroupAction) -> MinorCondition {
    let m = action.points();
    let identities = action
        .generator_images()
        .iter()
        .map(|h| MinorIdentity::new(m, f((0..m).collect()), f((0..m).map(|y| h.apply(y)).collect())))
        .collect();
    MinorCondition {
        symbols: single("f", m),
        identities,
        kind: ConditionKind::Action {
            group: action.group().name().unwrap_or("group").to_string(),
            points: m,
        },
    }
}

/// Parse a condition literal: `maltsev`, `majority`, `cyclic:p`, `fs:n`,
/// `ts:n`, `gmin:n`, `gp:n:k`, `symgp:n`, `compat:n`, `action:<spec>`.
/// Action specs are resolved by `resolve_action`.
pub fn parse_condition(
    text: &str,
    resolve_action: impl Fn(&str) -> Result<GroupAction>,
) -> Result<MinorCondition> {
    let mut parts = text.trim().splitn(2, ':');
    let head = parts.next().unwrap_or("").to_ascii_lowercase();
    let rest = parts.next();
    let num = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| Error::Parse(format!("bad number {s:?} in condition {text:?}")))
    };
    let need = || rest.ok_or_else(|| Error::Parse(format!("condition {text:?} needs a parameter")));
    match head.as_str() {
        "maltsev" => Ok(maltsev()),
        "majority" => Ok(majority()),
        "cyclic" => cyclic(num(need()?)?),
        "fs" => fs(num(need()?)?),
        "ts" => ts(num(need()?)?),
        "gmin" => gmin(num(need()?)?),
        "symgp" => symgp(num(need()?)?),
        "compat" => compat_gmin(num(need()?)?),
        "gp" => {
            let r = need()?;
            let (n, k) = r
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("gp needs n:k in {text:?}")))?;
            gp(num(n)?, num(k)?)
        }
        "action" => Ok(action_condition(&resolve_action(need()?)?)),
        _ => Err(Error::Parse(format!("unknown condition {text:?}"))),
    }
}

/// An operation given by its full value table, row-major by argument tuple
/// (first argument most significant).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteOperation {
    domain: usize,
    arity: usize,
    table: Vec<u32>,
}

impl FiniteOperation {
    pub fn new(domain: usize, arity: usize, table: Vec<u32>) -> Result<Self> {
        if domain == 0 || arity == 0 {
            return Err(Error::Precondition("operations need positive domain and arity".into()));
        }
        let len = saturating_pow(domain as u64, arity as u64);
        if table.len() as u64 != len {
            return Err(Error::Precondition(format!(
                "table of length {} for domain {domain} and arity {arity}",
                table.len()
            )));
        }
        if table.iter().any(|&v| v as usize >= domain) {
            return Err(Error::Precondition("table value outside the domain".into()));
        }
        Ok(FiniteOperation {
            domain,
            arity,
            table,
        })
    }

    /// Tabulate a function of the argument tuple.
    pub fn from_fn(domain: usize, arity: usize, mut f: impl FnMut(&[usize]) -> usize) -> Result<Self> {
        let len = saturating_pow(domain as u64, arity as u64);
        Budget::check("operation table size", len, Budget::default().enumeration)?;
        let mut table = Vec::with_capacity(len as usize);
        let mut tuple = vec![0; arity];
        for _ in 0..len {
            table.push(f(&tuple) as u32);
            increment(&mut tuple, domain);
        }
        FiniteOperation::new(domain, arity, table)
    }

    pub fn domain(&self) -> usize {
        self.domain
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    pub fn index(&self, tuple: &[usize]) -> usize {
        tuple.iter().fold(0, |acc, &x| acc * self.domain + x)
    }

    #[inline]
    pub fn apply(&self, tuple: &[usize]) -> usize {
        self.table[self.index(tuple)] as usize
    }

    pub fn projection(domain: usize, arity: usize, index: usize) -> Result<Self> {
        if index >= arity {
            return Err(Error::Precondition("projection index out of range".into()));
        }
        Self::from_fn(domain, arity, |t| t[index])
    }

    /// Ternary XOR on `{0,1}`.
    pub fn xor3() -> Self {
        Self::from_fn(2, 3, |t| t[0] ^ t[1] ^ t[2]).expect("small table")
    }

    /// Ternary majority on `{0,1}`.
    pub fn majority3() -> Self {
        Self::from_fn(2, 3, |t| usize::from(t[0] + t[1] + t[2] >= 2)).expect("small table")
    }

    /// `n`-ary minimum on `{0, .., d-1}`.
    pub fn minimum(domain: usize, arity: usize) -> Result<Self> {
        Self::from_fn(domain, arity, |t| *t.iter().min().expect("arity > 0"))
    }
}

/// Odometer step over `{0..domain-1}^n`, last position fastest.
pub(crate) fn increment(tuple: &mut [usize], domain: usize) {
    for x in tuple.iter_mut().rev() {
        *x += 1;
        if *x < domain {
            return;
        }
        *x = 0;
    }
}

/// Does the family of operations satisfy every identity under every
/// assignment of domain values to the variables?
pub fn op_satisfies(
    ops: &BTreeMap<String, FiniteOperation>,
    condition: &MinorCondition,
    budget: &Budget,
) -> Result<bool> {
    let mut domain = None;
    let mut by_id = Vec::with_capacity(condition.symbols.len());
    for (name, arity) in &condition.symbols {
        let op = ops
            .get(name)
            .ok_or_else(|| Error::Precondition(format!("no operation for symbol {name}")))?;
        if op.arity() != *arity {
            return Err(Error::Precondition(format!(
                "{name} has arity {} but the condition needs {arity}",
                op.arity()
            )));
        }
        if *domain.get_or_insert(op.domain()) != op.domain() {
            return Err(Error::Precondition("operations on different domains".into()));
        }
        by_id.push(op);
    }
    let Some(d) = domain else {
        return Ok(true);
    };
    for id in &condition.identities {
        let count = saturating_pow(d as u64, id.variable_count as u64);
        Budget::check("identity assignments", count, budget.enumeration)?;
        let mut assign = vec![0; id.variable_count];
        let mut lt = vec![0; id.left.args.len()];
        let mut rt = vec![0; id.right.args.len()];
        for _ in 0..count {
            for (slot, &v) in lt.iter_mut().zip(&id.left.args) {
                *slot = assign[v];
            }
            for (slot, &v) in rt.iter_mut().zip(&id.right.args) {
                *slot = assign[v];
            }
            if by_id[id.left.symbol].apply(&lt) != by_id[id.right.symbol].apply(&rt) {
                return Ok(false);
            }
            increment(&mut assign, d);
        }
    }
    Ok(true)
}

/// Single-symbol convenience wrapper around [`op_satisfies`].
pub fn satisfies(op: &FiniteOperation, condition: &MinorCondition, budget: &Budget) -> Result<bool> {
    if condition.symbols.len() != 1 {
        return Err(Error::Precondition("condition has more than one symbol".into()));
    }
    let ops = BTreeMap::from([(condition.symbols[0].0.clone(), op.clone())]);
    op_satisfies(&ops, condition, budget)
}
