//! Inverse systems `… → A_2 → A_1 → A_0` described by finite recipes: truncations, limits,
//! the orbit set lim¹, the Mittag-Leffler condition and the trivial/uncountable dichotomy.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::corpus::GroupSpec;
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GroupHom, GroupRef};
use crate::matrix::Matrix;
use crate::numtheory::{norm_tower_certificate, replay_certificate, TowerCertificate, TowerLaw, TowerOutcome};
use crate::snf::{image_basis, same_span, solve_matrix, span_contains};
use crate::Int;

pub const DEFAULT_HORIZON: usize = 32;

/// An inverse system indexed by `ℕ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SystemRecipe {
    /// `maps[n]: groups[n+1] → groups[n]` as image lists; constant after the last group.
    ExplicitFinite { groups: Vec<GroupSpec>, maps: Vec<Vec<usize>> },
    /// `M = ⊕ ℤ/d_i` (`d_i = 0` for ℤ) at every level, every transition the endomorphism `matrix`.
    ConstantEndo { moduli: Vec<i64>, matrix: Vec<Vec<i64>> },
    /// `A_n = step^n · span(base) ⊆ ℤ^r` with inclusions as transitions.
    SubgroupChain { base: Vec<Vec<i64>>, step: Vec<Vec<i64>> },
    /// Multiplicative groups of a tower of fields with norm maps.
    NormTower { tower: TowerLaw },
    Product { factors: Vec<SystemRecipe> },
}

impl SystemRecipe {
    /// `ℤ ⊃ kℤ ⊃ k²ℤ ⊃ …`.
    pub fn multiples_chain(k: i64) -> Self {
        SystemRecipe::SubgroupChain { base: vec![vec![1]], step: vec![vec![k]] }
    }

    pub fn constant_endo(moduli: Vec<i64>, matrix: Vec<Vec<i64>>) -> Self {
        SystemRecipe::ConstantEndo { moduli, matrix }
    }
}

fn int_matrix(rows: &[Vec<i64>], cols: usize) -> Result<Matrix<Int>> {
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::UnsupportedRecipe("ragged matrix".into()));
    }
    Ok(Matrix::from_fn(rows.len(), cols, |i, j| Int::from(rows[i][j])))
}

// ---------- materialized systems ----------

/// Finite groups with `maps[n]: groups[n+1] → groups[n]`.
#[derive(Clone, Debug)]
pub struct FiniteSystem {
    pub groups: Vec<GroupRef>,
    pub maps: Vec<GroupHom>,
}

impl FiniteSystem {
    pub fn new(groups: Vec<GroupRef>, maps: Vec<GroupHom>) -> Result<Self> {
        if groups.is_empty() || maps.len() + 1 != groups.len() {
            return Err(Error::NotComposable("need one map between consecutive levels".into()));
        }
        for (n, u) in maps.iter().enumerate() {
            if !u.source.same_table(&groups[n + 1]) || !u.target.same_table(&groups[n]) {
                return Err(Error::NotComposable(format!("map {n} does not connect levels {} → {n}", n + 1)));
            }
        }
        Ok(FiniteSystem { groups, maps })
    }

    pub fn constant(g: GroupRef, len: usize) -> Self {
        let maps = (1..len).map(|_| GroupHom::identity(g.clone())).collect();
        FiniteSystem { groups: vec![g; len], maps }
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Levels `0..=n`, extending by identities past the end.
    pub fn truncate(&self, n: usize) -> FiniteSystem {
        let mut groups: Vec<GroupRef> = self.groups.iter().take(n + 1).cloned().collect();
        let mut maps: Vec<GroupHom> = self.maps.iter().take(n).cloned().collect();
        let last = self.groups.last().unwrap().clone();
        while groups.len() < n + 1 {
            groups.push(last.clone());
            maps.push(GroupHom::identity(last.clone()));
        }
        FiniteSystem { groups, maps }
    }

    /// Levelwise direct product, first factor fastest.
    pub fn product(&self, other: &FiniteSystem) -> Result<FiniteSystem> {
        if self.len() != other.len() {
            return Err(Error::NotComposable("systems of different length".into()));
        }
        let groups: Vec<GroupRef> = self
            .groups
            .iter()
            .zip(&other.groups)
            .map(|(a, b)| Arc::new(FiniteGroup::direct_product(a, b)))
            .collect();
        let maps = self
            .maps
            .iter()
            .zip(&other.maps)
            .enumerate()
            .map(|(n, (u, v))| {
                let (m1, m0) = (u.source.order(), u.target.order());
                let map = groups[n + 1].elements().map(|x| u.apply(x % m1) + m0 * v.apply(x / m1)).collect();
                GroupHom { source: groups[n + 1].clone(), target: groups[n].clone(), map }
            })
            .collect();
        Ok(FiniteSystem { groups, maps })
    }

    /// The composite `A_n → A_m`, `m ≤ n`.
    pub fn transition(&self, n: usize, m: usize) -> Vec<usize> {
        let mut map: Vec<usize> = self.groups[n].elements().collect();
        for k in (m..n).rev() {
            for x in map.iter_mut() {
                *x = self.maps[k].apply(*x);
            }
        }
        map
    }

    /// `Im(A_n → A_m)`.
    pub fn image(&self, n: usize, m: usize) -> Vec<usize> {
        let mut im = self.transition(n, m);
        im.sort_unstable();
        im.dedup();
        im
    }
}

/// Levels `ℤ^{k_n} / diag(moduli_n)` with integer transition matrices (`maps[n]` from level `n+1`).
#[derive(Clone, Debug)]
pub struct AbelianSystem {
    pub moduli: Vec<Vec<Int>>,
    pub maps: Vec<Matrix<Int>>,
}

#[derive(Clone, Debug)]
pub enum Truncation {
    Finite(FiniteSystem),
    Abelian(AbelianSystem),
    Product(Vec<Truncation>),
}

fn finite_system(groups: &[GroupSpec], maps: &[Vec<usize>]) -> Result<FiniteSystem> {
    let gs: Vec<GroupRef> = groups.iter().map(|g| g.build()).collect::<Result<_>>()?;
    if gs.is_empty() || maps.len() + 1 != gs.len() {
        return Err(Error::NotComposable("need one map between consecutive groups".into()));
    }
    let homs = maps
        .iter()
        .enumerate()
        .map(|(n, m)| GroupHom::new(gs[n + 1].clone(), gs[n].clone(), m.clone()))
        .collect::<Result<_>>()?;
    FiniteSystem::new(gs, homs)
}

/// Validated pieces of a `ConstantEndo` recipe.
struct Endo {
    moduli: Vec<Int>,
    u: Matrix<Int>,
    free: Vec<usize>,
}

fn endo(moduli: &[i64], matrix: &[Vec<i64>]) -> Result<Endo> {
    let n = moduli.len();
    if moduli.iter().any(|&d| d < 0 || d == 1) {
        return Err(Error::UnsupportedRecipe("moduli must be 0 or at least 2".into()));
    }
    let u = int_matrix(matrix, n)?;
    if u.rows() != n {
        return Err(Error::UnsupportedRecipe("endomorphism must be square of the module's rank".into()));
    }
    // u must preserve the relations d_t e_t = 0
    for t in (0..n).filter(|&t| moduli[t] != 0) {
        for i in 0..n {
            let v = Int::from(moduli[t]) * &u[(i, t)];
            let ok = if moduli[i] == 0 { v.is_zero() } else { (v % Int::from(moduli[i])).is_zero() };
            if !ok {
                return Err(Error::InvalidHom(format!("column {t} does not respect the relation of order {}", moduli[t])));
            }
        }
    }
    let free = (0..n).filter(|&i| moduli[i] == 0).collect();
    Ok(Endo { moduli: moduli.iter().map(|&d| Int::from(d)).collect(), u, free })
}

struct Chain {
    base: Matrix<Int>,
    /// `step` restricted to `span(base)`, in the basis `base`
    t: Matrix<Int>,
}

fn chain(base: &[Vec<i64>], step: &[Vec<i64>]) -> Result<Chain> {
    let r = step.len();
    let s = int_matrix(step, r)?;
    let b = int_matrix(base, base.first().map_or(0, |row| row.len()))?;
    if b.rows() != r {
        return Err(Error::UnsupportedRecipe("base and step live in different ambient ranks".into()));
    }
    let b = image_basis(&b);
    let sb = s.mul(&b);
    if !span_contains(&b, &sb) {
        return Err(Error::NotATower("step does not map the base subgroup into itself".into()));
    }
    let t = solve_matrix(&b, &sb).ok_or_else(|| Error::NotATower("step not expressible on the base".into()))?;
    Ok(Chain { base: b, t })
}

/// Materializes levels `0..=n`.
pub fn truncate(r: &SystemRecipe, n: usize) -> Result<Truncation> {
    Ok(match r {
        SystemRecipe::ExplicitFinite { groups, maps } => Truncation::Finite(finite_system(groups, maps)?.truncate(n)),
        SystemRecipe::ConstantEndo { moduli, matrix } => {
            let e = endo(moduli, matrix)?;
            Truncation::Abelian(AbelianSystem { moduli: vec![e.moduli; n + 1], maps: vec![e.u; n] })
        }
        SystemRecipe::SubgroupChain { base, step } => {
            let c = chain(base, step)?;
            let k = c.base.cols();
            Truncation::Abelian(AbelianSystem { moduli: vec![vec![Int::zero(); k]; n + 1], maps: vec![c.t; n] })
        }
        SystemRecipe::NormTower { .. } => {
            return Err(Error::NotMaterializable(
                "norm towers have infinite terms; use the valuation shadows of numtheory".into(),
            ))
        }
        SystemRecipe::Product { factors } => {
            let parts: Vec<Truncation> = factors.iter().map(|f| truncate(f, n)).collect::<Result<_>>()?;
            let finite: Option<Vec<&FiniteSystem>> =
                parts.iter().map(|p| if let Truncation::Finite(f) = p { Some(f) } else { None }).collect();
            match finite {
                Some(fs) if !fs.is_empty() => {
                    let mut acc = fs[0].clone();
                    for f in &fs[1..] {
                        acc = acc.product(f)?;
                    }
                    Truncation::Finite(acc)
                }
                _ => Truncation::Product(parts),
            }
        }
    })
}

// ---------- lim and lim¹ on truncations ----------

/// Compatible families `(x_0, …, x_N)` with the componentwise group law.
#[derive(Clone, Debug)]
pub struct FiniteLimit {
    pub group: GroupRef,
    pub families: Vec<Vec<usize>>,
}

impl FiniteLimit {
    /// Projection to level `n`.
    pub fn projection(&self, n: usize) -> Vec<usize> {
        self.families.iter().map(|f| f[n]).collect()
    }
}

/// Families built level by level, keeping only compatible extensions.
fn compatible_families(sizes: &[usize], compatible: impl Fn(usize, usize, usize) -> bool) -> Vec<Vec<usize>> {
    let mut fams: Vec<Vec<usize>> = (0..sizes[0]).map(|x| vec![x]).collect();
    for n in 1..sizes.len() {
        let mut next = Vec::new();
        for f in fams {
            for x in (0..sizes[n]).filter(|&x| compatible(n, x, f[n - 1])) {
                let mut g = f.clone();
                g.push(x);
                next.push(g);
            }
        }
        fams = next;
    }
    fams.sort();
    fams
}

pub fn lim_truncated(sys: &FiniteSystem) -> Result<FiniteLimit> {
    let sizes: Vec<usize> = sys.groups.iter().map(|g| g.order()).collect();
    let families = compatible_families(&sizes, |n, x, below| sys.maps[n - 1].apply(x) == below);
    let index: HashMap<&Vec<usize>, usize> = families.iter().enumerate().map(|(i, f)| (f, i)).collect();
    let table = families
        .iter()
        .map(|f| {
            families
                .iter()
                .map(|g| {
                    let prod: Vec<usize> = (0..sizes.len()).map(|n| sys.groups[n].mul(f[n], g[n])).collect();
                    index[&prod]
                })
                .collect()
        })
        .collect();
    let group = Arc::new(FiniteGroup::from_table(table)?);
    Ok(FiniteLimit { group, families })
}

/// Orbits of `∏ A_n` on `∏_{n ≤ N} A_n` under `(a)·(x) = (a_n x_n u(a_{n+1})⁻¹)`, where `a_{N+1}`
/// ranges over the constant extension `A_{N+1} = A_N`.
#[derive(Clone, Debug, Serialize)]
pub struct Lim1Truncated {
    pub states: usize,
    pub orbit_sizes: Vec<usize>,
    /// orbit index of each state, states encoded first level fastest
    #[serde(skip)]
    pub labels: Vec<usize>,
}

impl Lim1Truncated {
    pub fn orbits(&self) -> usize {
        self.orbit_sizes.len()
    }
}

fn encode(x: &[usize], sizes: &[usize]) -> usize {
    x.iter().zip(sizes).rev().fold(0, |acc, (&xi, &m)| acc * m + xi)
}

fn decode(mut s: usize, sizes: &[usize]) -> Vec<usize> {
    sizes
        .iter()
        .map(|&m| {
            let x = s % m;
            s /= m;
            x
        })
        .collect()
}

pub fn lim1_truncated(sys: &FiniteSystem, budget: u128) -> Result<Lim1Truncated> {
    let sizes: Vec<usize> = sys.groups.iter().map(|g| g.order()).collect();
    let states = sizes.iter().try_fold(1u128, |acc, &m| acc.checked_mul(m as u128)).unwrap_or(u128::MAX);
    if states > budget {
        return Err(Error::BudgetExceeded { needed: states, budget });
    }
    let states = states as usize;
    let top = sizes.len() - 1;
    // moves: (level n, generator g) meaning a_n = g
    let mut moves: Vec<(usize, usize)> = Vec::new();
    for (n, g) in sys.groups.iter().enumerate() {
        moves.extend(g.generators().into_iter().map(|s| (n, s)));
    }
    let apply = |x: &mut Vec<usize>, n: usize, a: usize| {
        if n <= top {
            let g = &sys.groups[n];
            x[n] = g.mul(a, x[n]);
        }
        if n >= 1 {
            let (g, ua) = if n <= top {
                (&sys.groups[n - 1], sys.maps[n - 1].apply(a))
            } else {
                (&sys.groups[top], a)
            };
            x[n - 1] = g.mul(x[n - 1], g.inv(ua));
        }
    };
    moves.extend(sys.groups[top].generators().into_iter().map(|s| (top + 1, s)));
    let mut labels = vec![usize::MAX; states];
    let mut orbit_sizes = Vec::new();
    for start in 0..states {
        if labels[start] != usize::MAX {
            continue;
        }
        let id = orbit_sizes.len();
        labels[start] = id;
        let mut size = 1;
        let mut queue = VecDeque::from([start]);
        while let Some(s) = queue.pop_front() {
            let x = decode(s, &sizes);
            for &(n, a) in &moves {
                let mut y = x.clone();
                apply(&mut y, n, a);
                let t = encode(&y, &sizes);
                if labels[t] == usize::MAX {
                    labels[t] = id;
                    size += 1;
                    queue.push_back(t);
                }
            }
        }
        orbit_sizes.push(size);
    }
    Ok(Lim1Truncated { states, orbit_sizes, labels })
}

// ---------- Mittag-Leffler ----------

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FailureCertificate {
    /// `[Im(A_{n1} → A_m) : Im(A_{n2} → A_m)] = index > 1`, and every later step has the same index.
    ImageIndex {
        n1: usize,
        n2: usize,
        #[serde(with = "crate::scalar::decimal")]
        index: Int,
        law: String,
    },
    NormValuation { certificate: TowerCertificate },
    Factor { factor: usize, certificate: Box<FailureCertificate> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum MLVerdict {
    Holds { level: usize, proof: String },
    Fails { witness_level: usize, certificate: FailureCertificate },
    UnknownAtHorizon { horizon: usize },
}

/// `|det|` of `sub` expressed in the basis `sup` (equal ranks), i.e. the index of the sublattice.
fn lattice_index(sup: &Matrix<Int>, sub: &Matrix<Int>) -> Option<Int> {
    let x = solve_matrix(sup, sub)?;
    x.is_square().then(|| x.det().abs())
}

/// Decision for the chain `T^k ℤ^r`: `Ok(level)` if it stabilizes, `Err((k, index))` if every
/// step from `k` on has index `index > 1`.
fn free_chain_law(t: &Matrix<Int>) -> std::result::Result<usize, (usize, Int)> {
    let r = t.rows();
    if r == 0 {
        return Ok(0);
    }
    let w = image_basis(&t.pow(r as u32));
    if w.cols() == 0 {
        // nilpotent: the images reach 0 by level r
        return Ok((0..=r).find(|&k| t.pow(k as u32).is_zero()).unwrap_or(r));
    }
    let on_v = solve_matrix(&w, &t.mul(&w)).expect("image of T^r is T-stable");
    let d = on_v.det().abs();
    if d.is_one() {
        let mut k = 0;
        while !same_span(&image_basis(&t.pow(k as u32)), &image_basis(&t.pow(k as u32 + 1))) {
            k += 1;
        }
        Ok(k)
    } else {
        Err((r, d))
    }
}

fn torsion_relations(moduli: &[Int]) -> Matrix<Int> {
    let cols: Vec<Vec<Int>> = moduli
        .iter()
        .enumerate()
        .filter(|(_, d)| !d.is_zero())
        .map(|(i, d)| (0..moduli.len()).map(|j| if j == i { d.clone() } else { Int::zero() }).collect())
        .collect();
    Matrix::from_columns(&cols, moduli.len())
}

/// First `k` with `Im(u^k) = Im(u^{k+1})` in `ℤ^n / D`.
fn endo_stabilization(e: &Endo) -> usize {
    let d = torsion_relations(&e.moduli);
    let image = |k: u32| image_basis(&e.u.pow(k).hstack(&d));
    let mut k = 0;
    while !same_span(&image(k), &image(k + 1)) {
        k += 1;
    }
    k as usize
}

fn endo_free_part(e: &Endo) -> Matrix<Int> {
    e.u.select_rows(&e.free).select_columns(&e.free)
}

/// Decides (ML) where the recipe allows it symbolically; searches up to `horizon` otherwise.
pub fn ml_check(r: &SystemRecipe, horizon: usize) -> Result<MLVerdict> {
    Ok(match r {
        SystemRecipe::ExplicitFinite { groups, maps } => {
            let sys = finite_system(groups, maps)?;
            let len = sys.len();
            // past the last level the system is constant, so every image chain is stable from `len - 1`
            let level = (0..len)
                .map(|m| (m..len).find(|&n| (n..len).all(|k| sys.image(k, m) == sys.image(n, m))).unwrap_or(m))
                .max()
                .unwrap_or(0);
            MLVerdict::Holds { level, proof: "finite groups: descending chains of subgroups stabilize".into() }
        }
        SystemRecipe::ConstantEndo { moduli, matrix } => {
            let e = endo(moduli, matrix)?;
            // Im(u^k) stabilizes iff its image in M/torsion does: the torsion parts form a descending chain
            // in a finite group
            match free_chain_law(&endo_free_part(&e)) {
                Ok(_) => MLVerdict::Holds { level: endo_stabilization(&e), proof: "image chain of u stabilizes".into() },
                Err((k, index)) => MLVerdict::Fails {
                    witness_level: 0,
                    certificate: FailureCertificate::ImageIndex {
                        n1: k,
                        n2: k + 1,
                        law: format!("u is injective on the eventual image with |det| = {index}: each further step has index {index}"),
                        index,
                    },
                },
            }
        }
        SystemRecipe::SubgroupChain { base, step } => {
            let c = chain(base, step)?;
            match free_chain_law(&c.t) {
                Ok(level) => MLVerdict::Holds { level, proof: "subgroup chain stabilizes".into() },
                Err((k, index)) => MLVerdict::Fails {
                    witness_level: 0,
                    certificate: FailureCertificate::ImageIndex {
                        n1: k,
                        n2: k + 1,
                        law: format!("step acts on A_{k} with |det| = {index}: A_(n+1) has index {index} in A_n for all n >= {k}"),
                        index,
                    },
                },
            }
        }
        SystemRecipe::NormTower { tower } => match norm_tower_certificate(tower, horizon)? {
            TowerOutcome::Fails { certificate } => {
                MLVerdict::Fails { witness_level: certificate.base_level, certificate: FailureCertificate::NormValuation { certificate } }
            }
            TowerOutcome::Holds { level, reason } => MLVerdict::Holds { level, proof: reason },
            TowerOutcome::NoFailureFound { .. } => MLVerdict::UnknownAtHorizon { horizon },
        },
        SystemRecipe::Product { factors } => {
            let verdicts: Vec<MLVerdict> = factors.iter().map(|f| ml_check(f, horizon)).collect::<Result<_>>()?;
            if let Some((i, MLVerdict::Fails { witness_level, certificate })) =
                verdicts.iter().enumerate().find(|(_, v)| matches!(v, MLVerdict::Fails { .. }))
            {
                MLVerdict::Fails {
                    witness_level: *witness_level,
                    certificate: FailureCertificate::Factor { factor: i, certificate: Box::new(certificate.clone()) },
                }
            } else if verdicts.iter().all(|v| matches!(v, MLVerdict::Holds { .. })) {
                let level = verdicts.iter().map(|v| if let MLVerdict::Holds { level, .. } = v { *level } else { 0 }).max();
                MLVerdict::Holds { level: level.unwrap_or(0), proof: "every factor satisfies (ML)".into() }
            } else {
                MLVerdict::UnknownAtHorizon { horizon }
            }
        }
    })
}

/// Re-derives a failure certificate from the recipe.
pub fn replay(r: &SystemRecipe, cert: &FailureCertificate) -> Result<bool> {
    let index_check = |t: &Matrix<Int>, n1: usize, n2: usize, index: &Int| -> bool {
        let (a, b) = (image_basis(&t.pow(n1 as u32)), image_basis(&t.pow(n2 as u32)));
        n2 == n1 + 1
            && n1 >= t.rows()
            && lattice_index(&a, &b).as_ref() == Some(index)
            && free_chain_law(t) == Err((t.rows(), index.clone()))
            && index > &Int::one()
    };
    Ok(match (r, cert) {
        (SystemRecipe::ConstantEndo { moduli, matrix }, FailureCertificate::ImageIndex { n1, n2, index, .. }) => {
            index_check(&endo_free_part(&endo(moduli, matrix)?), *n1, *n2, index)
        }
        (SystemRecipe::SubgroupChain { base, step }, FailureCertificate::ImageIndex { n1, n2, index, .. }) => {
            index_check(&chain(base, step)?.t, *n1, *n2, index)
        }
        (SystemRecipe::NormTower { tower }, FailureCertificate::NormValuation { certificate }) => {
            !certificate.steps.is_empty() && replay_certificate(tower, certificate)?
        }
        (SystemRecipe::Product { factors }, FailureCertificate::Factor { factor, certificate }) => match factors.get(*factor) {
            Some(f) => replay(f, certificate)?,
            None => false,
        },
        _ => false,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Lim1Verdict {
    Trivial { reason: String },
    Uncountable { reason: String, certificate: FailureCertificate },
    Unknown { reason: String },
}

/// Every recipe kind has countable terms: finite groups, finitely generated abelian groups, and
/// multiplicative groups of number fields.
fn countable_terms(_: &SystemRecipe) -> bool {
    true
}

pub fn lim1_classify(r: &SystemRecipe, horizon: usize) -> Result<Lim1Verdict> {
    Ok(match ml_check(r, horizon)? {
        MLVerdict::Holds { level, proof } => Lim1Verdict::Trivial { reason: format!("(ML) holds from level {level}: {proof}") },
        MLVerdict::Fails { certificate, .. } if countable_terms(r) && replay(r, &certificate)? => Lim1Verdict::Uncountable {
            reason: "countable terms and a replayed (ML) failure".into(),
            certificate,
        },
        MLVerdict::Fails { .. } => Lim1Verdict::Unknown { reason: "failure certificate did not replay".into() },
        MLVerdict::UnknownAtHorizon { horizon } => Lim1Verdict::Unknown { reason: format!("no decision within horizon {horizon}") },
    })
}

// ---------- six-term sequence on truncations ----------

#[derive(Clone, Debug, Serialize)]
pub struct SixTermReport {
    pub lim_sizes: [usize; 3],
    /// `lim A → lim B` injective
    pub injective: bool,
    /// image of `lim A` = fibre of `lim B → lim(B/A)` over the base point
    pub exact_at_lim_b: bool,
    /// fibres of `lim(B/A) → lim¹ A` are the `lim B`-orbits
    pub fibres_are_orbits: bool,
    /// fibre of `lim¹ A → lim¹ B` over the base point = image of the connecting map
    pub exact_at_lim1_a: bool,
    /// with `A_n` normal: fibre of `lim¹ B → lim¹(B/A)` over the base point = image of `lim¹ A`
    pub exact_at_lim1_b: Option<bool>,
    /// with `A_n` normal: orders of the quotient groups `B_n/A_n`
    pub quotient_orders: Option<Vec<usize>>,
    pub exact: bool,
}

/// Checks the orbit/fibre exactness statements of
/// `1 → lim A → lim B → lim(B/A) → lim¹ A → lim¹ B (→ lim¹(B/A))` on a truncation.
pub fn six_term_check(a: &FiniteSystem, b: &FiniteSystem, incl: &[GroupHom], normal: bool) -> Result<SixTermReport> {
    let len = a.len();
    if b.len() != len || incl.len() != len {
        return Err(Error::NotComposable("systems and inclusions must have the same length".into()));
    }
    for (n, i) in incl.iter().enumerate() {
        if !i.source.same_table(&a.groups[n]) || !i.target.same_table(&b.groups[n]) {
            return Err(Error::NotComposable(format!("inclusion {n} has wrong endpoints")));
        }
        if !i.is_injective() {
            return Err(Error::NotInjective(n));
        }
        if normal && !b.groups[n].is_normal(&i.image()) {
            return Err(Error::NotNormal);
        }
    }
    for n in 0..len - 1 {
        if a.groups[n + 1].elements().any(|x| incl[n].apply(a.maps[n].apply(x)) != b.maps[n].apply(incl[n + 1].apply(x))) {
            return Err(Error::NotEquivariant(format!("inclusions do not commute with transitions at level {n}")));
        }
    }
    let lim_a = lim_truncated(a)?;
    let lim_b = lim_truncated(b)?;
    // B_n / A_n as left cosets; coset_of[n][b] = index of bA_n
    let mut coset_of: Vec<Vec<usize>> = Vec::with_capacity(len);
    let mut reps: Vec<Vec<usize>> = Vec::with_capacity(len);
    for n in 0..len {
        let cosets = b.groups[n].left_cosets(&incl[n].image())?;
        let mut idx = vec![0; b.groups[n].order()];
        for (c, coset) in cosets.iter().enumerate() {
            for &x in coset {
                idx[x] = c;
            }
        }
        reps.push(cosets.iter().map(|c| c[0]).collect());
        coset_of.push(idx);
    }
    let csizes: Vec<usize> = reps.iter().map(|r| r.len()).collect();
    let lim_c = compatible_families(&csizes, |n, c, below| coset_of[n - 1][b.maps[n - 1].apply(reps[n][c])] == below);
    let base_c: Vec<usize> = (0..len).map(|n| coset_of[n][b.groups[n].identity()]).collect();
    let push_c = |f: &[usize]| -> Vec<usize> { (0..len).map(|n| coset_of[n][f[n]]).collect() };

    let injective = {
        let mut imgs: Vec<Vec<usize>> =
            lim_a.families.iter().map(|f| (0..len).map(|n| incl[n].apply(f[n])).collect()).collect();
        imgs.sort();
        imgs.dedup();
        imgs.len() == lim_a.families.len()
    };
    let exact_at_lim_b = {
        let mut from_a: Vec<Vec<usize>> =
            lim_a.families.iter().map(|f| (0..len).map(|n| incl[n].apply(f[n])).collect()).collect();
        from_a.sort();
        let fibre: Vec<Vec<usize>> = lim_b.families.iter().filter(|f| push_c(f) == base_c).cloned().collect();
        from_a == fibre
    };

    let budget = crate::cohomology::DEFAULT_BUDGET;
    let l1a = lim1_truncated(a, budget)?;
    let l1b = lim1_truncated(b, budget)?;
    let asizes: Vec<usize> = a.groups.iter().map(|g| g.order()).collect();
    let bsizes: Vec<usize> = b.groups.iter().map(|g| g.order()).collect();
    // preimage in A_n of an element of the image of incl[n]
    let back: Vec<HashMap<usize, usize>> =
        incl.iter().map(|i| i.source.elements().map(|x| (i.apply(x), x)).collect()).collect();
    // connecting map: x_n = b_n⁻¹ u(b_{n+1}), top coordinate 1
    let delta = |c: &[usize]| -> usize {
        let x: Vec<usize> = (0..len)
            .map(|n| {
                let g = &b.groups[n];
                if n + 1 == len {
                    a.groups[n].identity()
                } else {
                    back[n][&g.mul(g.inv(reps[n][c[n]]), b.maps[n].apply(reps[n + 1][c[n + 1]]))]
                }
            })
            .collect();
        l1a.labels[encode(&x, &asizes)]
    };
    let fibres_are_orbits = {
        // lim B acts on lim(B/A) by left translation; compare the orbit partition with the δ-fibres
        let index: HashMap<&Vec<usize>, usize> = lim_c.iter().enumerate().map(|(i, f)| (f, i)).collect();
        let mut orbit = vec![usize::MAX; lim_c.len()];
        let mut next = 0;
        for s in 0..lim_c.len() {
            if orbit[s] != usize::MAX {
                continue;
            }
            for g in &lim_b.families {
                let moved: Vec<usize> =
                    (0..len).map(|n| coset_of[n][b.groups[n].mul(g[n], reps[n][lim_c[s][n]])]).collect();
                orbit[index[&moved]] = next;
            }
            next += 1;
        }
        let deltas: Vec<usize> = lim_c.iter().map(|c| delta(c)).collect();
        (0..lim_c.len()).all(|i| (0..lim_c.len()).all(|j| (orbit[i] == orbit[j]) == (deltas[i] == deltas[j])))
    };
    let push_a_to_b = |s: usize| -> usize {
        let x = decode(s, &asizes);
        let y: Vec<usize> = (0..len).map(|n| incl[n].apply(x[n])).collect();
        l1b.labels[encode(&y, &bsizes)]
    };
    let exact_at_lim1_a = {
        let base_b = l1b.labels[0];
        let mut kernel: Vec<usize> = (0..l1a.states).filter(|&s| push_a_to_b(s) == base_b).map(|s| l1a.labels[s]).collect();
        kernel.sort_unstable();
        kernel.dedup();
        let mut image: Vec<usize> = lim_c.iter().map(|c| delta(c)).collect();
        image.sort_unstable();
        image.dedup();
        kernel == image
    };
    let (exact_at_lim1_b, quotient_orders) = if normal {
        let quotients: Vec<(GroupRef, GroupHom)> =
            (0..len).map(|n| b.groups[n].quotient(&incl[n].image())).collect::<Result<_>>()?;
        let qmaps = (0..len - 1)
            .map(|n| {
                let (q1, p1) = &quotients[n + 1];
                let (q0, p0) = &quotients[n];
                let mut map = vec![0; q1.order()];
                for x in b.groups[n + 1].elements() {
                    map[p1.apply(x)] = p0.apply(b.maps[n].apply(x));
                }
                GroupHom::new(q1.clone(), q0.clone(), map)
            })
            .collect::<Result<_>>()?;
        let c = FiniteSystem::new(quotients.iter().map(|(q, _)| q.clone()).collect(), qmaps)?;
        let l1c = lim1_truncated(&c, budget)?;
        let csz: Vec<usize> = c.groups.iter().map(|g| g.order()).collect();
        let base_c1 = l1c.labels[0];
        let mut kernel: Vec<usize> = (0..l1b.states)
            .filter(|&s| {
                let x = decode(s, &bsizes);
                let y: Vec<usize> = (0..len).map(|n| quotients[n].1.apply(x[n])).collect();
                l1c.labels[encode(&y, &csz)] == base_c1
            })
            .map(|s| l1b.labels[s])
            .collect();
        kernel.sort_unstable();
        kernel.dedup();
        let mut image: Vec<usize> = (0..l1a.states).map(push_a_to_b).collect();
        image.sort_unstable();
        image.dedup();
        (Some(kernel == image), Some(c.groups.iter().map(|g| g.order()).collect()))
    } else {
        (None, None)
    };
    let exact = injective && exact_at_lim_b && fibres_are_orbits && exact_at_lim1_a && exact_at_lim1_b.unwrap_or(true);
    Ok(SixTermReport {
        lim_sizes: [lim_a.families.len(), lim_b.families.len(), lim_c.len()],
        injective,
        exact_at_lim_b,
        fibres_are_orbits,
        exact_at_lim1_a,
        exact_at_lim1_b,
        quotient_orders,
        exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::HeisenbergGroup;

    fn c(n: usize) -> GroupRef {
        Arc::new(FiniteGroup::cyclic(n))
    }

    #[test]
    fn truncations() {
        let r = SystemRecipe::constant_endo(vec![0], vec![vec![2]]);
        let Truncation::Abelian(t) = truncate(&r, 3).unwrap() else { panic!() };
        assert_eq!(t.moduli.len(), 4);
        assert_eq!(t.maps.len(), 3);
        assert_eq!(t.maps[0][(0, 0)], Int::from(2));
        let e = SystemRecipe::ExplicitFinite { groups: vec![GroupSpec::Named("C2".into())], maps: vec![] };
        let Truncation::Finite(f) = truncate(&SystemRecipe::Product { factors: vec![e.clone(), e] }, 2).unwrap() else {
            panic!()
        };
        assert_eq!(f.groups.iter().map(|g| g.order()).collect::<Vec<_>>(), vec![4, 4, 4]);
        let tower = SystemRecipe::NormTower { tower: TowerLaw::CyclotomicLPower { l: 3 } };
        assert!(matches!(truncate(&tower, 2), Err(Error::NotMaterializable(_))));
    }

    #[test]
    fn limits() {
        let g = Arc::new(FiniteGroup::symmetric(3));
        let lim = lim_truncated(&FiniteSystem::constant(g, 3)).unwrap();
        assert_eq!(lim.group.order(), 6);
        // Z/4 ← Z/4 by doubling: families (2x, x)
        let dbl = GroupHom::new(c(4), c(4), vec![0, 2, 0, 2]).unwrap();
        let sys = FiniteSystem::new(vec![c(4), c(4)], vec![dbl]).unwrap();
        assert_eq!(lim_truncated(&sys).unwrap().group.order(), 4);
    }

    #[test]
    fn lim1_on_truncations_is_one_orbit() {
        let sys = FiniteSystem::constant(c(2), 3);
        let l = lim1_truncated(&sys, 1000).unwrap();
        assert_eq!((l.states, l.orbits()), (8, 1));
        let triv = FiniteSystem::constant(Arc::new(FiniteGroup::trivial()), 4);
        assert_eq!(lim1_truncated(&triv, 10).unwrap().orbits(), 1);
        assert!(matches!(lim1_truncated(&FiniteSystem::constant(c(12), 6), 1000), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn ml_constant_endo() {
        let dbl = SystemRecipe::constant_endo(vec![0], vec![vec![2]]);
        let MLVerdict::Fails { certificate, .. } = ml_check(&dbl, 32).unwrap() else { panic!() };
        assert!(replay(&dbl, &certificate).unwrap());
        let id = SystemRecipe::constant_endo(vec![0], vec![vec![1]]);
        assert_eq!(ml_check(&id, 32).unwrap(), MLVerdict::Holds { level: 0, proof: "image chain of u stabilizes".into() });
        assert!(matches!(lim1_classify(&id, 32).unwrap(), Lim1Verdict::Trivial { .. }));
        // nilpotent plus torsion: stabilizes once the nilpotent part dies
        let mixed = SystemRecipe::constant_endo(vec![0, 0, 4], vec![vec![0, 1, 0], vec![0, 0, 0], vec![0, 0, 2]]);
        let MLVerdict::Holds { level, .. } = ml_check(&mixed, 32).unwrap() else { panic!() };
        assert_eq!(level, 2);
        // unimodular but not identity
        let swap = SystemRecipe::constant_endo(vec![0, 0], vec![vec![0, 1], vec![1, 0]]);
        assert!(matches!(ml_check(&swap, 32).unwrap(), MLVerdict::Holds { level: 0, .. }));
        let bad = SystemRecipe::constant_endo(vec![2, 0], vec![vec![1, 0], vec![1, 1]]);
        assert!(ml_check(&bad, 32).is_err());
    }

    #[test]
    fn subgroup_chain_is_uncountable() {
        let r = SystemRecipe::multiples_chain(2);
        let v = lim1_classify(&r, 32).unwrap();
        assert!(matches!(v, Lim1Verdict::Uncountable { .. }), "{v:?}");
        let stable = SystemRecipe::SubgroupChain { base: vec![vec![2, 0], vec![0, 1]], step: vec![vec![1, 0], vec![0, -1]] };
        assert!(matches!(lim1_classify(&stable, 32).unwrap(), Lim1Verdict::Trivial { .. }));
        let escaping = SystemRecipe::SubgroupChain { base: vec![vec![2]], step: vec![vec![1, 1]] };
        assert!(ml_check(&escaping, 32).is_err());
    }

    #[test]
    fn products_and_towers() {
        let id = SystemRecipe::constant_endo(vec![0], vec![vec![1]]);
        let e = SystemRecipe::ExplicitFinite { groups: vec![GroupSpec::Named("S3".into())], maps: vec![] };
        let both = SystemRecipe::Product { factors: vec![id.clone(), e] };
        assert!(matches!(lim1_classify(&both, 32).unwrap(), Lim1Verdict::Trivial { .. }));
        let mixed = SystemRecipe::Product { factors: vec![id, SystemRecipe::multiples_chain(3)] };
        assert!(matches!(lim1_classify(&mixed, 32).unwrap(), Lim1Verdict::Uncountable { .. }));
        let sr = SystemRecipe::NormTower { tower: TowerLaw::ScholzReichardt { l: 3, p0: 7 } };
        assert!(matches!(lim1_classify(&sr, 32).unwrap(), Lim1Verdict::Uncountable { .. }));
        assert!(matches!(lim1_classify(&sr, 0).unwrap(), Lim1Verdict::Unknown { .. }));
    }

    #[test]
    fn recipe_json_round_trip() {
        let r = SystemRecipe::Product {
            factors: vec![
                SystemRecipe::multiples_chain(2),
                SystemRecipe::NormTower { tower: TowerLaw::ScholzReichardt { l: 3, p0: 7 } },
            ],
        };
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains(r#""kind":"product""#));
        assert_eq!(serde_json::from_str::<SystemRecipe>(&s).unwrap(), r);
    }

    #[test]
    fn six_term_center_of_heisenberg() {
        let h = HeisenbergGroup::new(3).unwrap();
        let g = h.group().clone();
        let center = g.center();
        let (z, _) = crate::gamma::GammaGroup::trivial_action(c(1), g.clone()).restrict(&center).unwrap();
        let zg = z.underlying().clone();
        let a = FiniteSystem::constant(zg.clone(), 3);
        let b = FiniteSystem::constant(g.clone(), 3);
        let incl: Vec<GroupHom> = (0..3).map(|_| GroupHom::new(zg.clone(), g.clone(), center.clone()).unwrap()).collect();
        let r = six_term_check(&a, &b, &incl, true).unwrap();
        assert!(r.exact, "{r:?}");
        assert_eq!(r.quotient_orders, Some(vec![9, 9, 9]));
        assert_eq!(r.lim_sizes, [3, 27, 9]);
    }

    #[test]
    fn six_term_split_product() {
        let s3 = Arc::new(FiniteGroup::symmetric(3));
        let a = FiniteSystem::constant(c(2), 3);
        let cs = FiniteSystem::constant(s3, 3);
        let b = a.product(&cs).unwrap();
        let incl: Vec<GroupHom> =
            (0..3).map(|n| GroupHom::new(a.groups[n].clone(), b.groups[n].clone(), vec![0, 1]).unwrap()).collect();
        assert!(six_term_check(&a, &b, &incl, true).unwrap().exact);
        let not_inj: Vec<GroupHom> =
            (0..3).map(|n| GroupHom::new(a.groups[n].clone(), b.groups[n].clone(), vec![0, 0]).unwrap()).collect();
        assert_eq!(six_term_check(&a, &b, &not_inj, false).unwrap_err(), Error::NotInjective(0));
    }
}
