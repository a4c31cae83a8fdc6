//! Group references as they appear in JSON inputs, and a corpus of small groups.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GroupRef, HeisenbergGroup};

/// `"S3"`, `"C2xC2"`, `"p12:3"`, `{"order": n, "table": [[...]], "labels": [...]}` or `{"degree": 4, "generators": [[...]]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupSpec {
    Named(String),
    Table {
        table: Vec<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        order: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<String>>,
    },
    Permutations { degree: usize, generators: Vec<Vec<usize>> },
}

impl GroupSpec {
    pub fn build(&self) -> Result<GroupRef> {
        Ok(Arc::new(match self {
            GroupSpec::Named(name) => named_group(name)?,
            GroupSpec::Table { table, order, labels } => {
                if order.is_some_and(|n| n != table.len()) {
                    return Err(Error::Parse(format!("order {} does not match a table of {} rows", order.unwrap(), table.len())));
                }
                let g = FiniteGroup::from_table(table.clone())?;
                match labels {
                    Some(l) => g.with_labels(l.clone())?,
                    None => g,
                }
            }
            GroupSpec::Permutations { degree, generators } => {
                if generators.iter().any(|g| !is_permutation(g, *degree)) {
                    return Err(Error::Parse(format!("generators must be permutations of 0..{degree}")));
                }
                FiniteGroup::from_permutations(*degree, generators)
            }
        }))
    }
}

fn is_permutation(g: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    g.len() == n && g.iter().all(|&x| x < n && !std::mem::replace(&mut seen[x], true))
}

fn named_factor(name: &str) -> Result<FiniteGroup> {
    let bad = || Error::Parse(format!("unknown group name {name:?}"));
    let num = |s: &str| s.parse::<usize>().map_err(|_| bad());
    if let Some(l) = name.strip_prefix("p12:") {
        return Ok((*HeisenbergGroup::new(num(l)?)?.group().clone()).clone());
    }
    if name == "Q8" {
        return Ok(FiniteGroup::quaternion());
    }
    if let Some(n) = name.strip_prefix("Dic") {
        return Ok(FiniteGroup::dicyclic(num(n)?));
    }
    let (head, n) = name.split_at(1);
    let n = num(n)?;
    if n == 0 || n > 720 {
        return Err(bad());
    }
    match head {
        "C" => Ok(FiniteGroup::cyclic(n)),
        "S" if n <= 6 => Ok(FiniteGroup::symmetric(n)),
        "A" if n <= 6 => Ok(FiniteGroup::alternating(n)),
        "D" => Ok(FiniteGroup::dihedral(n)),
        _ => Err(bad()),
    }
}

/// Parses a product of named factors: `C<n>`, `S<n>`, `A<n>`, `D<n>` (order `2n`), `Q8`, `Dic<n>`
/// (order `4n`), `p12:<l>` (order `l^3`, exponent `l`), joined by `x`.
pub fn named_group(name: &str) -> Result<FiniteGroup> {
    let factors: Vec<FiniteGroup> = name.split('x').map(|f| named_factor(f.trim())).collect::<Result<_>>()?;
    Ok(if factors.len() == 1 { factors.into_iter().next().unwrap() } else { FiniteGroup::direct_product_many(&factors) })
}

const CORPUS: &[&str] = &[
    "C1", "C2", "C3", "C4", "C2xC2", "C5", "C6", "S3", "C7", "C8", "C2xC4", "C2xC2xC2", "D4", "Q8", "C9",
    "C3xC3", "C10", "D5", "C11", "C12", "C2xC6", "D6", "A4", "Dic3", "C13", "C14", "D7", "C15", "C16",
    "C4xC4", "C2xC8", "C2xD4", "C2xQ8", "D8", "C2xC2xC2xC2", "C17", "C18", "C3xC6", "D9", "C3xS3",
    "C19", "C20", "D10", "Dic5", "C2xC10", "C21", "C22", "D11", "C23", "C24", "C2xC12", "S4", "D12",
    "Dic6", "C2xA4", "C2xDic3", "C3xD4", "C3xQ8", "C4xS3", "C2xC2xC6", "C2xC2xS3",
];

/// Named groups of order at most `max_order`.
pub fn small_group_corpus(max_order: usize) -> Vec<(&'static str, GroupRef)> {
    CORPUS
        .iter()
        .map(|&n| (n, Arc::new(named_group(n).expect("corpus names parse"))))
        .filter(|(_, g)| g.order() <= max_order)
        .collect()
}
