use crate::error::{Error, Result};

/// Caps for every enumeration and search in the crate.
///
/// Exceeding any of them yields [`Error::Budget`], which callers must keep
/// apart from negative answers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Largest group order produced by element closure.
    pub closure: u64,
    /// Largest group order for which the subgroup lattice is computed.
    pub subgroup_order: u64,
    /// Largest raw enumeration (maps `X^Y`, table cells, assignments).
    pub enumeration: u64,
    /// Search-node cap for backtracking searches.
    pub search_nodes: u64,
    /// Largest intermediate relation in pp-formula evaluation.
    pub join: u64,
    /// Largest domain of a pp-power.
    pub pp_power: u64,
    /// Distinct permuted tuples per symmetrization step.
    pub symmetrize: u64,
    /// Largest arity accepted by the generalized pairing builder.
    pub gp_arity: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            closure: 10_000,
            subgroup_order: 400,
            enumeration: 100_000_000,
            search_nodes: 100_000_000,
            join: 10_000_000,
            pp_power: 1_000_000,
            symmetrize: 100_000,
            gp_arity: 15,
        }
    }
}

impl Budget {
    /// Default group caps with every enumeration cap set to `cap`.
    pub fn with_enumeration_cap(cap: u64) -> Self {
        Budget {
            enumeration: cap,
            search_nodes: cap,
            join: cap,
            pp_power: cap,
            symmetrize: cap,
            ..Budget::default()
        }
    }

    pub(crate) fn check(what: &'static str, value: u64, cap: u64) -> Result<()> {
        if value > cap {
            Err(Error::Budget { what, cap })
        } else {
            Ok(())
        }
    }
}

/// `base^exp`, saturating at `u64::MAX`.
pub(crate) fn saturating_pow(base: u64, exp: u64) -> u64 {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
        if acc == u64::MAX {
            break;
        }
    }
    acc
}
