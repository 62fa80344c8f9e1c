//! Built-in groups and the line-based group file format.
//!
//! ```text
//! name A5
//! degree 5
//! gen f: (3 4 5)
//! gen g: (1 3)(2 4)
//! ```
//!
//! The `label:` prefix on `gen` lines is optional. Action files add
//! `points <m>` and one `act <cycles>` line per generator, in order.

use std::path::Path;

use crate::action::{prim_action, GroupAction};
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::perm::{parse_cycles, Permutation};

fn cycle_through(n: usize) -> String {
    let pts: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    format!("({})", pts.join(" "))
}

fn build(name: &str, degree: usize, gens: &[(&str, String)]) -> Result<FiniteGroup> {
    let perms = gens
        .iter()
        .map(|(_, c)| parse_cycles(c, degree))
        .collect::<Result<Vec<_>>>()?;
    let labels: Vec<&str> = gens.iter().map(|(l, _)| *l).collect();
    Ok(FiniteGroup::generate(perms)?
        .with_labels(labels)?
        .with_name(name))
}

fn parse_index(rest: &str) -> Option<usize> {
    let rest = rest.strip_prefix('/').unwrap_or(rest);
    rest.parse().ok().filter(|&n: &usize| n >= 1)
}

/// Names understood by [`group`].
pub const GROUP_NAMES: &str = "Zn (n >= 1), Sn and An (n <= 7), A5, A6, PSL27";

/// A built-in group by name: `Zn`/`Z/n` (cyclic on n points), `Sn`, `An`
/// (`n <= 7`), and `PSL27`. `A5`, `A6` and `PSL27` use the two-generator
/// presentations with generators `f`, `g`.
pub fn group(name: &str) -> Result<FiniteGroup> {
    let upper = name.trim().to_ascii_uppercase();
    match upper.as_str() {
        "A5" => {
            return build("A5", 5, &[("f", "(3 4 5)".into()), ("g", "(1 3)(2 4)".into())]);
        }
        "A6" => {
            return build(
                "A6",
                6,
                &[("f", "(1 2 3 5)(4 6)".into()), ("g", "(1 2)(3 4)".into())],
            );
        }
        "PSL27" | "PSL(2,7)" | "PSL2_7" => {
            return build(
                "PSL27",
                7,
                &[("f", "(1 2 3 4 5 6 7)".into()), ("g", "(2 6)(3 4)".into())],
            );
        }
        _ => {}
    }
    let unknown = || Error::Parse(format!("unknown group {name:?}; known: {GROUP_NAMES}"));
    let (kind, rest) = upper.split_at(1);
    let n = parse_index(rest).ok_or_else(unknown)?;
    let label = format!("{kind}{n}");
    match kind {
        "Z" => {
            if n > 10_000 {
                return Err(unknown());
            }
            build(&label, n, &[("f", cycle_through(n))])
        }
        "S" if n <= 7 => {
            if n < 3 {
                let g = if n == 2 { "(1 2)" } else { "" };
                return build(&label, n, &[("f", g.into())]);
            }
            build(&label, n, &[("f", cycle_through(n)), ("g", "(1 2)".into())])
        }
        "A" if n <= 7 => match n {
            1..=2 => build(&label, n, &[("f", String::new())]),
            3 => build(&label, n, &[("f", "(1 2 3)".into())]),
            _ => {
                let long = if n % 2 == 1 {
                    cycle_through(n)
                } else {
                    let pts: Vec<String> = (2..=n).map(|i| i.to_string()).collect();
                    format!("({})", pts.join(" "))
                };
                build(&label, n, &[("f", "(1 2 3)".into()), ("g", long)])
            }
        },
        _ => Err(unknown()),
    }
}

/// Contents of a group or action file.
#[derive(Clone, Debug)]
pub struct GroupFile {
    pub name: Option<String>,
    pub degree: usize,
    pub generators: Vec<(Option<String>, Permutation)>,
    pub points: Option<usize>,
    pub actions: Vec<String>,
}

pub fn parse_group_file(text: &str) -> Result<GroupFile> {
    let mut name = None;
    let mut degree = None;
    let mut gens_raw: Vec<(Option<String>, String)> = Vec::new();
    let mut points = None;
    let mut actions = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let value = value.trim();
        let bad = |msg: &str| Error::Parse(format!("line {}: {msg}", lineno + 1));
        match key {
            "name" => name = Some(value.to_string()),
            "degree" => degree = Some(value.parse::<usize>().map_err(|_| bad("bad degree"))?),
            "gen" => {
                let (label, cycles) = match value.split_once(':') {
                    Some((l, c)) => (Some(l.trim().to_string()), c.trim()),
                    None => (None, value),
                };
                gens_raw.push((label, cycles.to_string()));
            }
            "points" => points = Some(value.parse::<usize>().map_err(|_| bad("bad points"))?),
            "act" => actions.push(value.to_string()),
            _ => return Err(bad(&format!("unknown key {key:?}"))),
        }
    }
    let degree = degree.ok_or_else(|| Error::Parse("missing degree line".into()))?;
    if degree == 0 {
        return Err(Error::Parse("degree must be positive".into()));
    }
    if gens_raw.is_empty() {
        return Err(Error::Parse("no gen lines".into()));
    }
    let generators = gens_raw
        .into_iter()
        .map(|(l, c)| Ok((l, parse_cycles(&c, degree)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(GroupFile {
        name,
        degree,
        generators,
        points,
        actions,
    })
}

impl GroupFile {
    pub fn to_group(&self) -> Result<FiniteGroup> {
        let perms: Vec<Permutation> = self.generators.iter().map(|(_, p)| p.clone()).collect();
        let mut g = FiniteGroup::generate(perms)?;
        if self.generators.iter().any(|(l, _)| l.is_some()) {
            let labels: Vec<String> = self
                .generators
                .iter()
                .enumerate()
                .map(|(i, (l, _))| l.clone().unwrap_or_else(|| format!("g{}", i + 1)))
                .collect();
            g = g.with_labels(labels)?;
        }
        if let Some(n) = &self.name {
            g = g.with_name(n.clone());
        }
        Ok(g)
    }
}

impl GroupFile {
    /// The action described by `points`/`act` lines, or the natural action
    /// when there are none.
    pub fn to_action(&self) -> Result<GroupAction> {
        let group = self.to_group()?;
        match self.points {
            None if self.actions.is_empty() => Ok(GroupAction::natural(&group)),
            None => Err(Error::Parse("act lines need a points line".into())),
            Some(m) => {
                if self.actions.len() != self.generators.len() {
                    return Err(Error::Parse(format!(
                        "{} act lines for {} generators",
                        self.actions.len(),
                        self.generators.len()
                    )));
                }
                let images = self
                    .actions
                    .iter()
                    .map(|a| parse_cycles(a, m))
                    .collect::<Result<Vec<_>>>()?;
                GroupAction::new(group, m, images)
            }
        }
    }
}

/// Serialize an action: the group, then `points` and `act` lines.
pub fn write_action_file(action: &GroupAction) -> String {
    let mut out = write_group_file(action.group());
    out.push_str(&format!("points {}\n", action.points()));
    for g in action.generator_images() {
        out.push_str(&format!("act {g}\n"));
    }
    out
}

/// `<group>[:natural|:regular|:prim]` with a built-in or file group, or an
/// action file path.
pub fn resolve_action(spec: &str, budget: &Budget) -> Result<GroupAction> {
    let path = Path::new(spec);
    if path.exists() {
        let text = std::fs::read_to_string(path)?;
        return parse_group_file(&text)?.to_action();
    }
    let (name, kind) = match spec.rsplit_once(':') {
        Some((n, k)) if ["natural", "regular", "prim"].contains(&k) => (n, k),
        _ => (spec, "natural"),
    };
    let group = resolve_group(name)?;
    match kind {
        "regular" => Ok(GroupAction::regular(&group)),
        "prim" => prim_action(&group, budget),
        _ => Ok(GroupAction::natural(&group)),
    }
}

/// Serialize a group in the file format (labels included).
pub fn write_group_file(group: &FiniteGroup) -> String {
    let mut out = String::new();
    if let Some(n) = group.name() {
        out.push_str(&format!("name {n}\n"));
    }
    out.push_str(&format!("degree {}\n", group.degree()));
    for (l, g) in group.labels().iter().zip(group.generators()) {
        out.push_str(&format!("gen {l}: {g}\n"));
    }
    out
}

/// A built-in name, or else a group file path.
pub fn resolve_group(spec: &str) -> Result<FiniteGroup> {
    match group(spec) {
        Ok(g) => Ok(g),
        Err(builtin_err) => {
            let path = Path::new(spec);
            if path.exists() {
                let text = std::fs::read_to_string(path)?;
                parse_group_file(&text)?.to_group()
            } else {
                Err(builtin_err)
            }
        }
    }
}
