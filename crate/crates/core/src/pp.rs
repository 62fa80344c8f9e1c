//! Primitive positive formulas, pp-powers and indicator structures.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rayon::prelude::*;

use crate::action::prim_action;
use crate::budget::{saturating_pow, Budget};
use crate::condition::{increment, FiniteOperation};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::perm::Permutation;
use crate::polymorphism::polymorphisms_of_arity;
use crate::structure::{RelStructure, Relation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Atom {
    Rel { name: String, vars: Vec<usize> },
    Eq(usize, usize),
    Bottom(Vec<usize>),
}

/// Variables `0..free` are free (the output columns, in order); the rest
/// are existentially quantified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PPFormula {
    free: usize,
    existential: usize,
    atoms: Vec<Atom>,
    names: Vec<String>,
}

impl PPFormula {
    pub fn new(free: usize, existential: usize, atoms: Vec<Atom>) -> Result<Self> {
        let total = free + existential;
        for a in &atoms {
            let bad = match a {
                Atom::Rel { vars, .. } | Atom::Bottom(vars) => vars.iter().any(|&v| v >= total),
                Atom::Eq(v, w) => *v >= total || *w >= total,
            };
            if bad {
                return Err(Error::Parse(format!("atom {a:?} uses a variable outside 0..{total}")));
            }
        }
        let names = (0..free)
            .map(|i| format!("x{}", i + 1))
            .chain((0..existential).map(|i| format!("z{}", i + 1)))
            .collect();
        Ok(PPFormula {
            free,
            existential,
            atoms,
            names,
        })
    }

    /// Text form `R(x1,x3) & y2=x1 & exists z1: E(z1,x2)`.
    ///
    /// `z<i>` variables are existential; every other `<letters><i>` name is
    /// free. Free variables are ordered by letters, then index, so `x1 x2 y1`
    /// are columns 0, 1, 2.
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = Vec::new();
        for part in text.split('&') {
            let mut part = part.trim();
            if let Some(rest) = part.strip_prefix("exists") {
                let (_, body) = rest
                    .split_once(':')
                    .ok_or_else(|| Error::Parse(format!("missing ':' after exists in {part:?}")))?;
                part = body.trim();
            }
            if part.is_empty() {
                return Err(Error::Parse("empty conjunct".into()));
            }
            raw.push(parse_atom(part)?);
        }
        let mut vars = BTreeSet::new();
        for a in &raw {
            match a {
                RawAtom::Rel(_, vs) | RawAtom::Bottom(vs) => vars.extend(vs.iter().cloned()),
                RawAtom::Eq(v, w) => {
                    vars.insert(v.clone());
                    vars.insert(w.clone());
                }
            }
        }
        let (exist, free): (Vec<Var>, Vec<Var>) = vars.into_iter().partition(|v| v.0 == "z");
        let names: Vec<String> = free.iter().chain(&exist).map(|v| format!("{}{}", v.0, v.1)).collect();
        let index: HashMap<Var, usize> = free.iter().chain(&exist).cloned().enumerate().map(|(i, v)| (v, i)).collect();
        let map = |vs: &[Var]| vs.iter().map(|v| index[v]).collect::<Vec<_>>();
        let atoms = raw
            .iter()
            .map(|a| match a {
                RawAtom::Rel(name, vs) => Atom::Rel {
                    name: name.clone(),
                    vars: map(vs),
                },
                RawAtom::Eq(v, w) => Atom::Eq(index[v], index[w]),
                RawAtom::Bottom(vs) => Atom::Bottom(map(vs)),
            })
            .collect();
        let mut f = PPFormula::new(free.len(), exist.len(), atoms)?;
        f.names = names;
        Ok(f)
    }

    pub fn free_count(&self) -> usize {
        self.free
    }

    pub fn existential_count(&self) -> usize {
        self.existential
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }
}

impl fmt::Display for PPFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |vs: &[usize]| vs.iter().map(|&v| self.names[v].as_str()).collect::<Vec<_>>().join(",");
        let parts: Vec<String> = self
            .atoms
            .iter()
            .map(|a| match a {
                Atom::Rel { name, vars } => format!("{name}({})", list(vars)),
                Atom::Eq(v, w) => format!("{}={}", self.names[*v], self.names[*w]),
                Atom::Bottom(vars) => format!("bottom({})", list(vars)),
            })
            .collect();
        if self.existential > 0 {
            write!(f, "exists {}: ", self.names[self.free..].join(","))?;
        }
        write!(f, "{}", parts.join(" & "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Var(String, usize);

enum RawAtom {
    Rel(String, Vec<Var>),
    Eq(Var, Var),
    Bottom(Vec<Var>),
}

fn parse_var(s: &str) -> Result<Var> {
    let s = s.trim();
    let split = s.find(|c: char| c.is_ascii_digit()).unwrap_or(s.len());
    let (letters, digits) = s.split_at(split);
    if letters.is_empty() || !letters.chars().all(|c| c.is_ascii_alphabetic()) || digits.is_empty() {
        return Err(Error::Parse(format!("bad variable {s:?}")));
    }
    let idx = digits
        .parse()
        .map_err(|_| Error::Parse(format!("bad variable {s:?}")))?;
    Ok(Var(letters.to_string(), idx))
}

fn parse_atom(s: &str) -> Result<RawAtom> {
    if let Some(open) = s.find('(') {
        let name = s[..open].trim();
        let body = s[open + 1..]
            .strip_suffix(')')
            .ok_or_else(|| Error::Parse(format!("unclosed atom {s:?}")))?;
        let vars = body.split(',').map(parse_var).collect::<Result<Vec<_>>>()?;
        if name.is_empty() {
            return Err(Error::Parse(format!("atom without relation name {s:?}")));
        }
        return Ok(if name == "bottom" {
            RawAtom::Bottom(vars)
        } else {
            RawAtom::Rel(name.to_string(), vars)
        });
    }
    if let Some((a, b)) = s.split_once('=') {
        return Ok(RawAtom::Eq(parse_var(a)?, parse_var(b)?));
    }
    Err(Error::Parse(format!("cannot read atom {s:?}")))
}

/// A relation over a list of distinct variables.
struct Factor {
    vars: Vec<usize>,
    rows: Vec<Vec<usize>>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn join(a: &Factor, b: &Factor, cap: u64) -> Result<Factor> {
    let shared: Vec<(usize, usize)> = a
        .vars
        .iter()
        .enumerate()
        .filter_map(|(i, v)| b.vars.iter().position(|w| w == v).map(|j| (i, j)))
        .collect();
    let extra: Vec<usize> = (0..b.vars.len())
        .filter(|j| !shared.iter().any(|&(_, s)| s == *j))
        .collect();
    let mut index: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    for (r, row) in b.rows.iter().enumerate() {
        index
            .entry(shared.iter().map(|&(_, j)| row[j]).collect())
            .or_default()
            .push(r);
    }
    let mut rows = Vec::new();
    for row in &a.rows {
        let key: Vec<usize> = shared.iter().map(|&(i, _)| row[i]).collect();
        if let Some(matches) = index.get(&key) {
            for &r in matches {
                let mut out = row.clone();
                out.extend(extra.iter().map(|&j| b.rows[r][j]));
                rows.push(out);
            }
            Budget::check("pp join size", rows.len() as u64, cap)?;
        }
    }
    let mut vars = a.vars.clone();
    vars.extend(extra.iter().map(|&j| b.vars[j]));
    Ok(Factor { vars, rows })
}

fn project(f: Factor, keep: &[usize]) -> Factor {
    let cols: Vec<usize> = (0..f.vars.len()).filter(|&i| keep.contains(&f.vars[i])).collect();
    if cols.len() == f.vars.len() {
        return f;
    }
    let rows: BTreeSet<Vec<usize>> = f.rows.iter().map(|r| cols.iter().map(|&i| r[i]).collect()).collect();
    Factor {
        vars: cols.iter().map(|&i| f.vars[i]).collect(),
        rows: rows.into_iter().collect(),
    }
}

/// The relation defined by `formula` over `base`: all assignments to the
/// free variables that extend to the existential ones.
pub fn eval_pp(base: &RelStructure, formula: &PPFormula, budget: &Budget) -> Result<Relation> {
    let n = formula.free;
    let total = n + formula.existential;
    if formula.atoms.iter().any(|a| matches!(a, Atom::Bottom(_))) {
        return Ok(Relation::new(n.max(1), Vec::new()));
    }
    let d = base.domain;
    let mut parent: Vec<usize> = (0..total).collect();
    for a in &formula.atoms {
        if let Atom::Eq(v, w) = a {
            let (rv, rw) = (find(&mut parent, *v), find(&mut parent, *w));
            parent[rv.max(rw)] = rv.min(rw);
        }
    }
    let root: Vec<usize> = (0..total).map(|v| find(&mut parent, v)).collect();

    let mut factors = Vec::new();
    for a in &formula.atoms {
        let Atom::Rel { name, vars } = a else { continue };
        let rel = base.relation(name)?;
        if rel.arity != vars.len() {
            return Err(Error::Parse(format!(
                "{name} has arity {}, used with {} variables",
                rel.arity,
                vars.len()
            )));
        }
        let canon: Vec<usize> = vars.iter().map(|&v| root[v]).collect();
        let mut distinct: Vec<usize> = Vec::new();
        for &v in &canon {
            if !distinct.contains(&v) {
                distinct.push(v);
            }
        }
        let pos: Vec<usize> = canon.iter().map(|v| distinct.iter().position(|w| w == v).unwrap()).collect();
        let mut rows = BTreeSet::new();
        'tuple: for t in &rel.tuples {
            let mut row = vec![usize::MAX; distinct.len()];
            for (k, &p) in pos.iter().enumerate() {
                if row[p] == usize::MAX {
                    row[p] = t[k];
                } else if row[p] != t[k] {
                    continue 'tuple;
                }
            }
            rows.insert(row);
        }
        factors.push(Factor {
            vars: distinct,
            rows: rows.into_iter().collect(),
        });
    }
    // free variables not constrained by any relation range over the domain
    let mut covered: BTreeSet<usize> = factors.iter().flat_map(|f| f.vars.iter().copied()).collect();
    for v in 0..n {
        if covered.insert(root[v]) {
            factors.push(Factor {
                vars: vec![root[v]],
                rows: (0..d).map(|x| vec![x]).collect(),
            });
        }
    }
    let needed = |factors: &[Factor], skip: usize| -> Vec<usize> {
        let mut keep: Vec<usize> = (0..n).map(|v| root[v]).collect();
        for (i, f) in factors.iter().enumerate() {
            if i != skip {
                keep.extend(&f.vars);
            }
        }
        keep
    };
    if factors.iter().any(|f| f.rows.is_empty()) {
        return Ok(Relation::new(n.max(1), Vec::new()));
    }
    // project every factor early, then join greedily by estimated size
    for i in 0..factors.len() {
        let keep = needed(&factors, i);
        let f = std::mem::replace(&mut factors[i], Factor { vars: vec![], rows: vec![] });
        factors[i] = project(f, &keep);
    }
    while factors.len() > 1 {
        let mut best = (f64::INFINITY, 0, 1);
        for i in 0..factors.len() {
            for j in i + 1..factors.len() {
                let shared = factors[i].vars.iter().filter(|v| factors[j].vars.contains(v)).count();
                let est = factors[i].rows.len() as f64 * factors[j].rows.len() as f64 / (d as f64).powi(shared as i32);
                if est < best.0 {
                    best = (est, i, j);
                }
            }
        }
        let (_, i, j) = best;
        let b = factors.remove(j);
        let a = factors.remove(i);
        let joined = join(&a, &b, budget.join)?;
        if joined.rows.is_empty() {
            return Ok(Relation::new(n.max(1), Vec::new()));
        }
        factors.push(joined);
        let last = factors.len() - 1;
        let keep = needed(&factors, last);
        let f = factors.pop().unwrap();
        factors.push(project(f, &keep));
    }
    let f = factors.pop();
    if n == 0 {
        // a sentence: the nullary relation is represented as arity 1 over
        // nothing (false) or everything (true)
        let truth = f.is_none_or(|f| !f.rows.is_empty());
        return Ok(Relation::new(1, if truth { (0..d).map(|x| vec![x]).collect() } else { Vec::new() }));
    }
    let f = f.expect("free variables give a factor");
    let cols: Vec<usize> = (0..n)
        .map(|v| f.vars.iter().position(|&w| w == root[v]).expect("free variable covered"))
        .collect();
    Ok(Relation::new(n, f.rows.iter().map(|r| cols.iter().map(|&c| r[c]).collect())))
}

/// A pp-power: relations on `base^dimension` defined by formulas with
/// `arity · dimension` free variables.
#[derive(Clone, Debug)]
pub struct PPPowerSpec {
    pub base: RelStructure,
    pub dimension: usize,
    pub relations: BTreeMap<String, (usize, PPFormula)>,
}

/// Encode a tuple over `0..d` as a number, first coordinate most significant.
fn encode(tuple: &[usize], d: usize) -> usize {
    tuple.iter().fold(0, |acc, &x| acc * d + x)
}

pub fn pp_power(spec: &PPPowerSpec, budget: &Budget) -> Result<RelStructure> {
    let d = spec.base.domain;
    let n = spec.dimension;
    if n == 0 {
        return Err(Error::Precondition("pp-power dimension must be positive".into()));
    }
    let size = saturating_pow(d as u64, n as u64);
    Budget::check("pp-power domain", size, budget.pp_power)?;
    for (name, (k, f)) in &spec.relations {
        if *k == 0 || f.free != k * n {
            return Err(Error::Precondition(format!(
                "relation {name}: arity {k} in dimension {n} needs {} free variables, formula has {}",
                k * n,
                f.free
            )));
        }
    }
    let rels = spec
        .relations
        .par_iter()
        .map(|(name, (k, f))| {
            let rel = eval_pp(&spec.base, f, budget)?;
            let tuples: Vec<Vec<usize>> = rel
                .tuples
                .iter()
                .map(|t| t.chunks(n).map(|c| encode(c, d)).collect())
                .collect();
            Ok((name.clone(), *k, tuples))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = RelStructure::new(size as usize)?;
    for (name, k, tuples) in rels {
        out.add_relation(name, k, tuples)?;
    }
    Ok(out)
}

/// `f_σ(c) = f(c_{σ(0)}, .., c_{σ(n-1)})`.
fn minor_by(op: &FiniteOperation, sigma: &[usize]) -> Result<FiniteOperation> {
    let mut args = vec![0; sigma.len()];
    FiniteOperation::from_fn(op.domain(), op.arity(), |c| {
        for (a, &s) in args.iter_mut().zip(sigma) {
            *a = c[s];
        }
        op.apply(&args)
    })
}

fn indicator(
    ops: &[FiniteOperation],
    domain: usize,
    maps: &[(String, Vec<usize>)],
) -> Result<RelStructure> {
    let mut s = RelStructure::new(ops.len())?;
    for (name, sigma) in maps {
        let tuples = ops
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let g = minor_by(f, sigma)?;
                let j = ops
                    .binary_search_by(|o| o.table().cmp(g.table()))
                    .map_err(|_| Error::Verification("a minor of a polymorphism is not a polymorphism".into()))?;
                Ok(vec![i, j])
            })
            .collect::<Result<Vec<_>>>()?;
        s.add_relation(name.clone(), 2, tuples)?;
    }
    let _ = domain;
    Ok(s)
}

/// Structure on the `n`-ary polymorphisms of `base` (sorted by value
/// table), with one relation `s<i>` per adjacent transposition of
/// positions `i-1, i`, holding the pairs `(f, f_σ)`.
pub fn sn_indicator(base: &RelStructure, n: usize, budget: &Budget) -> Result<RelStructure> {
    if n == 0 {
        return Err(Error::Precondition("indicator arity must be positive".into()));
    }
    let ops = polymorphisms_of_arity(base, n, budget)?;
    let maps: Vec<(String, Vec<usize>)> = (1..n)
        .map(|i| {
            let mut sigma: Vec<usize> = (0..n).collect();
            sigma.swap(i - 1, i);
            (format!("s{i}"), sigma)
        })
        .collect();
    indicator(&ops, base.domain, &maps)
}

/// The pp-power presentation of [`sn_indicator`]: dimension `|B|^n`, and
/// for each transposition a formula saying that both halves are
/// polymorphisms and the second is the swapped minor of the first.
pub fn sn_indicator_spec(base: &RelStructure, n: usize, budget: &Budget) -> Result<PPPowerSpec> {
    let d = base.domain;
    let m = saturating_pow(d as u64, n as u64);
    Budget::check("indicator dimension", m, budget.enumeration)?;
    let m = m as usize;
    let poly_atoms = |offset: usize, atoms: &mut Vec<Atom>| -> Result<()> {
        for (name, rel) in &base.relations {
            let rows = rel.len();
            if rows == 0 {
                continue;
            }
            let choices = saturating_pow(rows as u64, n as u64);
            Budget::check("indicator formula atoms", choices, budget.enumeration)?;
            let mut pick = vec![0; n];
            let mut column = vec![0; n];
            for _ in 0..choices {
                let vars = (0..rel.arity)
                    .map(|j| {
                        for (c, &r) in column.iter_mut().zip(&pick) {
                            *c = rel.tuples[r][j];
                        }
                        offset + encode(&column, d)
                    })
                    .collect();
                atoms.push(Atom::Rel {
                    name: name.clone(),
                    vars,
                });
                increment(&mut pick, rows);
            }
        }
        Ok(())
    };
    let mut relations = BTreeMap::new();
    for i in 1..n {
        let mut atoms = Vec::new();
        poly_atoms(0, &mut atoms)?;
        poly_atoms(m, &mut atoms)?;
        let mut t = vec![0; n];
        for _ in 0..m {
            let mut s = t.clone();
            s.swap(i - 1, i);
            // y_t = x_{t_σ}
            atoms.push(Atom::Eq(m + encode(&t, d), encode(&s, d)));
            increment(&mut t, d);
        }
        relations.insert(format!("s{i}"), (2, PPFormula::new(2 * m, 0, atoms)?));
    }
    Ok(PPPowerSpec {
        base: base.clone(),
        dimension: m,
        relations,
    })
}

/// Structure on the `|prim(G)|`-ary polymorphisms of `base`, with one
/// relation per generator `g` of `G` holding `(f, f_g)` where `f_g`
/// reads its arguments through the action of `g` on `prim(G)`.
pub fn prim_indicator(base: &RelStructure, group: &FiniteGroup, budget: &Budget) -> Result<RelStructure> {
    let prim = prim_action(group, budget)?;
    let m = prim.points();
    let cells = saturating_pow(base.domain as u64, m as u64);
    Budget::check("indicator table size", cells, budget.enumeration)?;
    // every table is one point of the indicator domain, so the point count
    // is capped too
    Budget::check("indicator points", saturating_pow(base.domain as u64, cells), budget.enumeration)?;
    let ops = polymorphisms_of_arity(base, m, budget)?;
    let maps: Vec<(String, Vec<usize>)> = group
        .labels()
        .iter()
        .zip(prim.generator_images())
        .map(|(l, g): (&String, &Permutation)| (l.clone(), g.images().to_vec()))
        .collect();
    indicator(&ops, base.domain, &maps)
}

/// One point with a loop in every relation of `s`, as a structure.
pub fn loop_structure(s: &RelStructure) -> RelStructure {
    let mut out = RelStructure::new(1).expect("nonempty");
    for (name, rel) in &s.relations {
        out.add_relation(name.clone(), rel.arity, [vec![0; rel.arity]])
            .expect("valid loop");
    }
    out
}

/// Points carrying a loop in every relation.
pub fn common_loops(s: &RelStructure) -> Vec<usize> {
    (0..s.domain)
        .filter(|&x| s.relations.values().all(|r| r.contains(&vec![x; r.arity])))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polymorphism::find_polymorphism;
    use crate::condition::fs;
    use crate::structure::{compose_relation_word, cycle, Direction};

    fn b() -> Budget {
        Budget::default()
    }

    #[test]
    fn parse_and_print() {
        let f = PPFormula::parse("R(x1,x3) & y2=x1 & exists z1: E(z1,x2)").unwrap();
        assert_eq!(f.free_count(), 4);
        assert_eq!(f.existential_count(), 1);
        assert_eq!(f.to_string(), "exists z1: R(x1,x3) & y2=x1 & E(z1,x2)");
        assert!(PPFormula::parse("R(x1,").is_err());
        assert!(PPFormula::parse("R(1x)").is_err());
        assert!(PPFormula::new(1, 0, vec![Atom::Eq(0, 1)]).is_err());
    }

    #[test]
    fn square_of_cycle() {
        let c5 = cycle(5).unwrap();
        let f = PPFormula::parse("exists z1: E(x1,z1) & E(z1,x2)").unwrap();
        let r = eval_pp(&c5, &f, &b()).unwrap();
        let word = compose_relation_word(&c5, &[("E", Direction::Forward), ("E", Direction::Forward)]).unwrap();
        let pairs: Vec<Vec<usize>> = word.into_iter().map(|(a, b)| vec![a, b]).collect();
        assert_eq!(r.tuples, pairs);
    }

    #[test]
    fn bottom_and_diagonal() {
        let c5 = cycle(5).unwrap();
        let f = PPFormula::parse("E(x1,x2) & bottom(x1)").unwrap();
        assert!(eval_pp(&c5, &f, &b()).unwrap().is_empty());
        let diag = eval_pp(&c5, &PPFormula::parse("x1=x2").unwrap(), &b()).unwrap();
        assert_eq!(diag.tuples, (0..5).map(|x| vec![x, x]).collect::<Vec<_>>());
        // a repeated variable selects loops
        assert!(eval_pp(&c5, &PPFormula::parse("E(x1,x1)").unwrap(), &b()).unwrap().is_empty());
        assert!(eval_pp(&c5, &PPFormula::parse("F(x1,x1)").unwrap(), &b()).is_err());
    }

    #[test]
    fn identity_power() {
        let c5 = cycle(5).unwrap();
        let spec = PPPowerSpec {
            base: c5.clone(),
            dimension: 1,
            relations: [("E".to_string(), (2, PPFormula::parse("E(x1,x2)").unwrap()))].into(),
        };
        assert_eq!(pp_power(&spec, &b()).unwrap(), c5);
    }

    #[test]
    fn square_of_c2() {
        let c2 = cycle(2).unwrap();
        // points (a,b) as 2a+b; the formula's free variables are x1 x2 y1 y2 =
        // (a, b, c, d)
        let spec = PPPowerSpec {
            base: c2,
            dimension: 2,
            relations: [("E".to_string(), (2, PPFormula::parse("E(x1,y1) & E(x2,y2)").unwrap()))].into(),
        };
        let sq = pp_power(&spec, &b()).unwrap();
        assert_eq!(sq.domain, 4);
        assert_eq!(sq.relation("E").unwrap().tuples, vec![vec![0, 3], vec![1, 2], vec![2, 1], vec![3, 0]]);
        assert!(pp_power(&spec, &Budget::with_enumeration_cap(3)).unwrap_err().is_budget());
    }

    #[test]
    fn sn_indicator_c2() {
        let s = sn_indicator(&cycle(2).unwrap(), 2, &b()).unwrap();
        assert_eq!(s.domain, 4);
        // the polymorphisms are x, y, not x, not y
        assert!(common_loops(&s).is_empty());
        let s1 = sn_indicator(&cycle(1).unwrap(), 2, &b()).unwrap();
        assert_eq!(s1.domain, 1);
        assert_eq!(common_loops(&s1), vec![0]);
        let s3 = sn_indicator(&cycle(2).unwrap(), 3, &b()).unwrap();
        assert!(!common_loops(&s3).is_empty());
    }

    #[test]
    fn indicator_spec_matches() {
        for (base, n) in [(cycle(2).unwrap(), 2), (cycle(3).unwrap(), 2), (cycle(2).unwrap(), 3)] {
            let direct = sn_indicator(&base, n, &b()).unwrap();
            let spec = sn_indicator_spec(&base, n, &b()).unwrap();
            let power = pp_power(&spec, &b()).unwrap();
            let used: BTreeSet<usize> = power
                .relations
                .values()
                .flat_map(|r| r.tuples.iter().flatten().copied())
                .collect();
            let used: Vec<usize> = used.into_iter().collect();
            assert_eq!(power.induced(&used), direct);
        }
    }

    #[test]
    fn loops_iff_fs() {
        for (k, n) in [(1, 2), (1, 3), (2, 2), (2, 3), (3, 2), (3, 3), (4, 2)] {
            let base = cycle(k).unwrap();
            {
                let s = sn_indicator(&base, n, &b()).unwrap();
                let fsn = find_polymorphism(&base, &fs(n).unwrap(), &b()).unwrap().is_some();
                assert_eq!(!common_loops(&s).is_empty(), fsn, "C{k}, n = {n}");
            }
        }
    }

    #[test]
    fn prim_indicator_z2() {
        let z2 = crate::catalog::group("Z2").unwrap();
        let p = prim_indicator(&cycle(2).unwrap(), &z2, &b()).unwrap();
        let s = sn_indicator(&cycle(2).unwrap(), 2, &b()).unwrap();
        assert_eq!(p.domain, s.domain);
        let rp: Vec<_> = p.relations.values().collect();
        let rs: Vec<_> = s.relations.values().collect();
        assert_eq!(rp, rs);
    }
}
