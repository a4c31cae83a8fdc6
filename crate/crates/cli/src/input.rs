//! JSON input formats and their conversion into library values.

use std::collections::BTreeMap;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Deserialize;
use torsor_lab::cohomology::{AbelianModule, CrossedHom};
use torsor_lab::corpus::GroupSpec;
use torsor_lab::gamma::GammaGroup;
use torsor_lab::gset::GSet;
use torsor_lab::lattice::{LatticeMap, ZGLattice};
use torsor_lab::{Error, GroupRef, Int, IntMatrix, IntScalar, Result};

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// `Ok((gens, values))` for a partial listing, `Err(all)` when every element is present.
type Split<V> = std::result::Result<(Vec<usize>, Vec<V>), Vec<V>>;

/// Values keyed by group element, either as a full list or as a map `{element: value}`
/// (a map may list generators only).
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum PerElement<V> {
    Full(Vec<V>),
    Keyed(BTreeMap<String, V>),
}

impl<V: Clone> PerElement<V> {
    fn split(&self, g: &GroupRef) -> Result<Split<V>> {
        match self {
            PerElement::Full(v) if v.len() == g.order() => Ok(Err(v.clone())),
            PerElement::Full(v) => Err(Error::Parse(format!("expected {} entries, got {}", g.order(), v.len()))),
            PerElement::Keyed(m) => {
                let mut gens = Vec::with_capacity(m.len());
                let mut vals = Vec::with_capacity(m.len());
                for (k, v) in m {
                    let x: usize = k.parse().map_err(|_| Error::Parse(format!("bad element key {k:?}")))?;
                    if x >= g.order() {
                        return Err(Error::Parse(format!("element {x} out of range")));
                    }
                    gens.push(x);
                    vals.push(v.clone());
                }
                if gens.len() == g.order() {
                    let mut all = vec![None; g.order()];
                    for (x, v) in gens.into_iter().zip(vals) {
                        all[x] = Some(v);
                    }
                    Ok(Err(all.into_iter().map(Option::unwrap).collect()))
                } else {
                    Ok(Ok((gens, vals)))
                }
            }
        }
    }
}

fn matrix(rows: &[Vec<i64>], cols: usize) -> Result<IntMatrix> {
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Parse("ragged matrix".into()));
    }
    let rows: Vec<Vec<Int>> = rows.iter().map(|r| r.iter().map(|&v| Int::int(v)).collect()).collect();
    Ok(IntMatrix::from_rows(&rows, cols))
}

pub fn parse_matrix(rows: &[Vec<i64>]) -> Result<IntMatrix> {
    matrix(rows, rows.first().map_or(0, |r| r.len()))
}

/// `{"group": <group>, "size": n, "action": [[...]]}`; `action[g][p]` is `g·p`.
#[derive(Clone, Debug, Deserialize)]
pub struct GSetInput {
    pub group: GroupSpec,
    pub size: usize,
    pub action: PerElement<Vec<usize>>,
}

impl GSetInput {
    pub fn build(&self) -> Result<GSet> {
        let g = self.group.build()?;
        match self.action.split(&g)? {
            Err(all) => GSet::new(g, self.size, all),
            Ok((gens, imgs)) => GSet::from_generators(g, self.size, &gens, &imgs),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct GSetPair {
    pub left: GSetInput,
    pub right: GSetInput,
}

/// `{"rank": r, "group": <group>, "rho": {element: matrix}}`, plus optional `moduli`
/// (0 for a free coordinate) when used as a coefficient module.
#[derive(Clone, Debug, Deserialize)]
pub struct LatticeInput {
    pub rank: usize,
    pub group: GroupSpec,
    pub rho: PerElement<Vec<Vec<i64>>>,
    #[serde(default)]
    pub moduli: Option<Vec<i64>>,
}

impl LatticeInput {
    fn matrices(&self, g: &GroupRef) -> Result<Split<IntMatrix>> {
        let conv = |ms: Vec<Vec<Vec<i64>>>| -> Result<Vec<IntMatrix>> {
            ms.iter()
                .map(|m| {
                    if m.len() != self.rank {
                        return Err(Error::Parse(format!("matrix with {} rows, rank {}", m.len(), self.rank)));
                    }
                    matrix(m, self.rank)
                })
                .collect()
        };
        Ok(match self.rho.split(g)? {
            Err(all) => Err(conv(all)?),
            Ok((gens, ms)) => Ok((gens, conv(ms)?)),
        })
    }

    pub fn build_with(&self, g: &GroupRef) -> Result<ZGLattice> {
        match self.matrices(g)? {
            Err(all) => ZGLattice::new(g.clone(), all),
            Ok((gens, ms)) => ZGLattice::from_generators(g.clone(), self.rank, &gens, &ms),
        }
    }

    pub fn build(&self) -> Result<ZGLattice> {
        self.build_with(&self.group.build()?)
    }

    pub fn module(&self) -> Result<AbelianModule> {
        let g = self.group.build()?;
        match &self.moduli {
            None => Ok(AbelianModule::from_lattice(&self.build_with(&g)?)),
            Some(moduli) => {
                if moduli.len() != self.rank {
                    return Err(Error::Parse("one modulus per coordinate".into()));
                }
                let moduli: Vec<Int> = moduli.iter().map(|&d| Int::int(d)).collect();
                let (gens, ms) = match self.matrices(&g)? {
                    Err(all) => (g.elements().collect(), all),
                    Ok(p) => p,
                };
                AbelianModule::from_generators(g, moduli, &gens, &ms)
            }
        }
    }
}

/// `lattices[i] --maps[i]--> lattices[i+1]`.
#[derive(Clone, Debug, Deserialize)]
pub struct ChainInput {
    pub lattices: Vec<LatticeInput>,
    pub maps: Vec<Vec<Vec<i64>>>,
}

impl ChainInput {
    pub fn build(&self) -> Result<Vec<LatticeMap>> {
        if self.maps.len() + 1 != self.lattices.len() {
            return Err(Error::Parse("need one map between consecutive lattices".into()));
        }
        let lats: Vec<ZGLattice> = self.lattices.iter().map(LatticeInput::build).collect::<Result<_>>()?;
        self.maps
            .iter()
            .enumerate()
            .map(|(i, m)| LatticeMap::new(lats[i].clone(), lats[i + 1].clone(), sized(m, lats[i + 1].rank(), lats[i].rank())?))
            .collect()
    }
}

pub fn sized(m: &[Vec<i64>], rows: usize, cols: usize) -> Result<IntMatrix> {
    if m.len() != rows {
        return Err(Error::Parse(format!("map needs {rows} rows, got {}", m.len())));
    }
    matrix(m, cols)
}

#[derive(Clone, Debug, Deserialize)]
pub struct MapInput {
    pub source: LatticeInput,
    pub target: LatticeInput,
    pub matrix: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct SnfInput {
    pub matrix: Vec<Vec<i64>>,
}

/// `{"gamma": <group>, "group": <group>, "action": {γ: [images of the elements]}}`.
#[derive(Clone, Debug, Deserialize)]
pub struct GammaGroupInput {
    pub gamma: GroupSpec,
    pub group: GroupSpec,
    #[serde(default)]
    pub action: Option<PerElement<Vec<usize>>>,
}

impl GammaGroupInput {
    pub fn build(&self) -> Result<GammaGroup> {
        let (gamma, under) = (self.gamma.build()?, self.group.build()?);
        match &self.action {
            None => Ok(GammaGroup::trivial_action(gamma, under)),
            Some(a) => match a.split(&gamma)? {
                Err(all) => GammaGroup::new(gamma, under, all),
                Ok((gens, imgs)) => GammaGroup::from_generators(gamma, under, &gens, &imgs),
            },
        }
    }
}

/// `1 → A → B → B/A → 1` with `A` given by its elements in `B`.
#[derive(Clone, Debug, Deserialize)]
pub struct SequenceInput {
    #[serde(flatten)]
    pub b: GammaGroupInput,
    pub normal: Vec<usize>,
}

/// `{"values": {γ: element}}`, generators only allowed.
#[derive(Clone, Debug, Deserialize)]
pub struct CocycleInput {
    #[serde(default)]
    pub group: Option<GroupSpec>,
    pub values: PerElement<usize>,
}

impl CocycleInput {
    pub fn build(&self, n: &GammaGroup) -> Result<CrossedHom> {
        if let Some(spec) = &self.group {
            if !spec.build()?.same_table(n.gamma()) {
                return Err(Error::Parse("cocycle group differs from the acting group".into()));
            }
        }
        match self.values.split(n.gamma())? {
            Err(all) => CrossedHom::new(n, all),
            Ok((gens, vals)) => CrossedHom::from_generators(n, &gens, &vals),
        }
    }
}

/// The coefficient module of `cohomology h1`: a lattice (optionally with moduli) or a Γ-group.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum ModuleInput {
    Abelian(LatticeInput),
    Nonabelian(GammaGroupInput),
}

/// `"x^2+1"` or little-endian coefficients `[1, 0, 1]`.
pub fn parse_poly_arg(s: &str) -> Result<Vec<i64>> {
    let t = s.trim();
    if t.starts_with('[') {
        let mut c: Vec<i64> = serde_json::from_str(t).map_err(|e| Error::Parse(format!("polynomial: {e}")))?;
        while c.last() == Some(&0) {
            c.pop();
        }
        Ok(c)
    } else {
        torsor_lab::poly::parse_poly(t)
    }
}
