//! Torsors under finite Γ-groups, modelled by cocycles.
//!
//! A right `A`-torsor with cocycle `c` is realized on the set `A` itself, with
//! Γ acting by `τ·x = c(τ)·τx` and `A` acting by right multiplication; the
//! point `1` then satisfies `τ·1 = 1·c(τ)`. Contracted products are computed
//! as honest orbit sets and their Γ-action is checked to be well defined.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::cohomology::{act_on_cocycle, enumerate_cocycles, h1_nonabelian, is_cocycle, twist_group, CrossedHom};
use crate::error::{Error, Result};
use crate::gamma::{GammaGroup, GammaHom};
use crate::gset::GSet;

#[derive(Clone, Debug)]
pub struct TorsorRep {
    pub structure: GammaGroup,
    pub cocycle: CrossedHom,
}

impl TorsorRep {
    pub fn new(structure: GammaGroup, cocycle: CrossedHom) -> Result<Self> {
        if !is_cocycle(&structure, &cocycle) {
            return Err(Error::NotCocycle("torsor cocycle fails the cocycle law".into()));
        }
        Ok(TorsorRep { structure, cocycle })
    }

    pub fn trivial(structure: GammaGroup) -> Self {
        let cocycle = CrossedHom::neutral(&structure);
        TorsorRep { structure, cocycle }
    }

    /// The Γ-set underlying the torsor.
    pub fn gset(&self) -> GSet {
        let n = &self.structure;
        let u = n.underlying();
        let action = n
            .gamma()
            .elements()
            .map(|t| u.elements().map(|x| u.mul(self.cocycle.values[t], n.act(t, x))).collect())
            .collect();
        GSet::new(n.gamma().clone(), u.order(), action).expect("twisted action is an action")
    }

    /// Γ-equivariant automorphisms of the torsor: left multiplications by `y`
    /// commuting with the Γ-action.
    pub fn automorphisms(&self) -> Vec<usize> {
        let x = self.gset();
        let u = self.structure.underlying();
        u.elements()
            .filter(|&y| {
                let phi: Vec<usize> = u.elements().map(|p| u.mul(y, p)).collect();
                x.is_equivariant_map(&x, &phi)
            })
            .collect()
    }
}

/// The inner form `^P A`.
pub fn inner_twist(p: &TorsorRep) -> GammaGroup {
    twist_group(&p.structure, &p.cocycle).expect("torsor cocycles are cocycles")
}

/// A finite set with a left action of the structure group `A` and a
/// compatible Γ-action: `τ(a·x) = τa·τx`.
#[derive(Clone, Debug)]
pub struct LeftASet {
    pub structure: GammaGroup,
    pub size: usize,
    /// `a_action[a][x] = a·x`
    pub a_action: Vec<Vec<usize>>,
    pub gamma_action: Vec<Vec<usize>>,
}

impl LeftASet {
    pub fn new(
        structure: GammaGroup,
        size: usize,
        a_action: Vec<Vec<usize>>,
        gamma_action: Vec<Vec<usize>>,
    ) -> Result<Self> {
        GSet::new(structure.underlying().clone(), size, a_action.clone())?;
        GSet::new(structure.gamma().clone(), size, gamma_action.clone())?;
        for t in structure.gamma().elements() {
            for a in structure.underlying().elements() {
                for x in 0..size {
                    if gamma_action[t][a_action[a][x]] != a_action[structure.act(t, a)][gamma_action[t][x]] {
                        return Err(Error::IncompatibleActions(format!("τ(a·x) != τa·τx at ({t}, {a}, {x})")));
                    }
                }
            }
        }
        Ok(LeftASet { structure, size, a_action, gamma_action })
    }

    /// `B` as a left `A`-set through a Γ-homomorphism `A → B`.
    pub fn via_hom(h: &GammaHom) -> Result<Self> {
        let b = h.target.underlying();
        let a_action = h.source.underlying().elements().map(|a| b.elements().map(|x| b.mul(h.apply(a), x)).collect()).collect();
        let gamma_action = h.target.action().to_vec();
        Self::new(h.source.clone(), b.order(), a_action, gamma_action)
    }
}

#[derive(Clone, Debug)]
pub struct ContractedProduct {
    /// orbit representatives `(p, x)`, sorted
    pub points: Vec<(usize, usize)>,
    pub gset: GSet,
    /// `class[p * size + x]` is the orbit of `(p, x)`
    pub class: Vec<usize>,
    size: usize,
}

impl ContractedProduct {
    pub fn class_of(&self, p: usize, x: usize) -> usize {
        self.class[p * self.size + x]
    }
}

/// `P ∧^A X`: the quotient of `P × X` by `(p, x)·a = (pa, a⁻¹x)` with the diagonal Γ-action.
pub fn contracted_product(p: &TorsorRep, x: &LeftASet) -> Result<ContractedProduct> {
    let a = p.structure.underlying();
    if !a.same_table(x.structure.underlying()) || !p.structure.same_gamma(&x.structure) {
        return Err(Error::IncompatibleActions("torsor and set have different structure groups".into()));
    }
    if p.structure.action() != x.structure.action() {
        return Err(Error::IncompatibleActions("Γ acts differently on the structure group".into()));
    }
    let pset = p.gset();
    let size = x.size;
    let total = a.order() * size;
    let mut class = vec![usize::MAX; total];
    let mut points = Vec::new();
    for pp in a.elements() {
        for xx in 0..size {
            if class[pp * size + xx] != usize::MAX {
                continue;
            }
            let id = points.len();
            points.push((pp, xx));
            for g in a.elements() {
                let (q, y) = (a.mul(pp, g), x.a_action[a.inv(g)][xx]);
                class[q * size + y] = id;
            }
        }
    }
    let gamma = p.structure.gamma();
    let mut action = Vec::with_capacity(gamma.order());
    for t in gamma.elements() {
        let mut img = vec![usize::MAX; points.len()];
        for pp in a.elements() {
            for xx in 0..size {
                let src = class[pp * size + xx];
                let dst = class[pset.act(t, pp) * size + x.gamma_action[t][xx]];
                if img[src] == usize::MAX {
                    img[src] = dst;
                } else if img[src] != dst {
                    return Err(Error::IncompatibleActions("Γ-action on the quotient is not well defined".into()));
                }
            }
        }
        action.push(img);
    }
    let gset = GSet::new(gamma.clone(), points.len(), action)?;
    Ok(ContractedProduct { points, gset, class, size })
}

/// Reads off the cocycle of a right `B`-torsor realized on the set `B`
/// (right multiplication), taking the point `1` as base.
fn cocycle_of_realized_torsor(b: &GammaGroup, set: &GSet, to_b: &[usize]) -> Result<CrossedHom> {
    let one = to_b.iter().position(|&y| y == b.underlying().identity()).unwrap();
    let values = b.gamma().elements().map(|t| to_b[set.act(t, one)]).collect();
    CrossedHom::new(b, values)
}

/// `P ∧^A B` along `h: A → B`, returned as a `B`-torsor.
pub fn extend_structure(p: &TorsorRep, h: &GammaHom) -> Result<TorsorRep> {
    let x = LeftASet::via_hom(h)?;
    let cp = contracted_product(p, &x)?;
    // orbit of (1, y) ↔ y ∈ B
    let mut to_b = vec![usize::MAX; cp.points.len()];
    for y in h.target.underlying().elements() {
        to_b[cp.class_of(p.structure.underlying().identity(), y)] = y;
    }
    let cocycle = cocycle_of_realized_torsor(&h.target, &cp.gset, &to_b)?;
    TorsorRep::new(h.target.clone(), cocycle)
}

/// An object `P → Q` of the relative category: `v∘p = q` pointwise.
#[derive(Clone, Debug)]
pub struct RelativeClass {
    pub vmap: GammaHom,
    pub q: TorsorRep,
    pub p: TorsorRep,
}

impl RelativeClass {
    pub fn new(vmap: GammaHom, q: TorsorRep, p: TorsorRep) -> Result<Self> {
        if p.cocycle.push(&vmap) != q.cocycle {
            return Err(Error::HypothesisFailed("v∘p does not equal q".into()));
        }
        Ok(RelativeClass { vmap, q, p })
    }
}

/// Canonical representative of a lift modulo `A = ker v`.
fn relative_canonical(b: &GammaGroup, kernel: &[usize], f: &CrossedHom) -> CrossedHom {
    kernel.iter().map(|&a| act_on_cocycle(b, a, f)).min().unwrap()
}

/// Cocycles `b` with `v∘b = q`, up to `b ↦ a⁻¹ b τa` for `a ∈ ker v`.
pub fn relative_h1(v: &GammaHom, q: &TorsorRep, budget: u128) -> Result<Vec<CrossedHom>> {
    let b = &v.source;
    let kernel = v.hom.kernel();
    let mut reps = BTreeSet::new();
    for f in enumerate_cocycles(b, budget)? {
        if f.push(v) == q.cocycle {
            reps.insert(relative_canonical(b, &kernel, &f));
        }
    }
    Ok(reps.into_iter().collect())
}

/// `1 → A → B → C → 1` of Γ-groups.
#[derive(Clone, Debug)]
pub struct GammaExtension {
    pub incl: GammaHom,
    pub v: GammaHom,
}

impl GammaExtension {
    pub fn new(incl: GammaHom, v: GammaHom) -> Result<Self> {
        let e = GammaExtension { incl, v };
        e.check_exact()?;
        Ok(e)
    }

    /// `A = ker` of a surjection onto the quotient by a Γ-stable normal subgroup.
    pub fn from_normal_subgroup(b: &GammaGroup, a: &[usize]) -> Result<Self> {
        let (asub, inc) = b.restrict(a)?;
        let (c, proj) = b.quotient(a)?;
        let incl = GammaHom::new(asub, b.clone(), inc.map)?;
        let v = GammaHom::new(b.clone(), c, proj.map)?;
        Self::new(incl, v)
    }

    pub fn check_exact(&self) -> Result<()> {
        if !self.incl.target.underlying().same_table(self.v.source.underlying()) {
            return Err(Error::NotExact("middle terms differ".into()));
        }
        if !self.incl.hom.is_injective() {
            return Err(Error::NotExact("A → B is not injective".into()));
        }
        if !self.v.hom.is_surjective() {
            return Err(Error::NotExact("B → C is not surjective".into()));
        }
        if self.incl.hom.image() != self.v.hom.kernel() {
            return Err(Error::NotExact("image of A is not the kernel of v".into()));
        }
        Ok(())
    }

    pub fn a(&self) -> &GammaGroup {
        &self.incl.source
    }

    pub fn b(&self) -> &GammaGroup {
        &self.v.source
    }

    pub fn c(&self) -> &GammaGroup {
        &self.v.target
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct T4Entry {
    pub twisted_class: CrossedHom,
    pub relative_class: CrossedHom,
}

#[derive(Clone, Debug, Serialize)]
pub struct T4Report {
    pub twisted_h1_size: usize,
    pub relative_h1_size: usize,
    pub table: Vec<T4Entry>,
    pub injective: bool,
    pub surjective: bool,
    pub neutral_to_base: bool,
    pub twisted_sequence_exact: bool,
    /// for abelian `A`: the twist by `P` equals the twist through `C` by `Q`
    pub abelian_twist_agrees: Option<bool>,
    pub bijective: bool,
}

/// Builds `H¹(Γ, ^P A) → H¹(Γ, B → C; Q)` by twisting the sequence by `P`,
/// extending structure along `^P A → ^P B` and contracting with `P`, and
/// compares the result with the direct enumeration of relative classes.
pub fn verify_t4(seq: &GammaExtension, base: &RelativeClass, budget: u128) -> Result<T4Report> {
    seq.check_exact()?;
    let b = seq.b();
    if !base.p.structure.underlying().same_table(b.underlying()) || base.p.structure.action() != b.action() {
        return Err(Error::HypothesisFailed("base torsor is not a B-torsor".into()));
    }
    if base.vmap.hom.map != seq.v.hom.map {
        return Err(Error::HypothesisFailed("base v-morphism is not over the sequence's map".into()));
    }
    let p = &base.p;
    let kernel = seq.v.hom.kernel();

    // twist 1 → A → B → C → 1 by P
    let pb = inner_twist(p);
    let qc = inner_twist(&base.q);
    let pv = GammaHom::new(pb.clone(), qc.clone(), seq.v.hom.map.clone());
    let (pa, pa_inc) = pb.restrict(&kernel)?;
    let pincl = GammaHom::new(pa.clone(), pb.clone(), pa_inc.map.clone());
    let twisted_sequence_exact = match (pincl, pv) {
        (Ok(i), Ok(v)) => GammaExtension::new(i, v).is_ok(),
        _ => false,
    };
    let pincl = GammaHom::new(pa.clone(), pb.clone(), pa_inc.map)?;

    // P as a left ^P B-set: left multiplication, Γ acting through P's cocycle
    let pset = p.gset();
    let u = b.underlying();
    let left = LeftASet::new(
        pb.clone(),
        u.order(),
        u.elements().map(|y| u.elements().map(|x| u.mul(y, x)).collect()).collect(),
        pset.action().to_vec(),
    )?;

    let h1 = h1_nonabelian(&pa, budget)?;
    let relative = relative_h1(&seq.v, &base.q, budget)?;
    let mut table = Vec::with_capacity(h1.len());
    for alpha in &h1.classes {
        let torsor = TorsorRep::new(pa.clone(), alpha.clone())?;
        // extension of structure group A' → ^P B, trivialized over ^Q C
        let ext = extend_structure(&torsor, &pincl)?;
        let cp = contracted_product(&ext, &left)?;
        // (1, y) ↔ y ∈ B, with B acting on the right
        let mut to_b = vec![usize::MAX; cp.points.len()];
        for y in u.elements() {
            to_b[cp.class_of(u.identity(), y)] = y;
        }
        let image = cocycle_of_realized_torsor(b, &cp.gset, &to_b)?;
        if image.push(&seq.v) != base.q.cocycle {
            return Err(Error::HypothesisFailed("transported torsor does not lie over Q".into()));
        }
        table.push(T4Entry { twisted_class: alpha.clone(), relative_class: relative_canonical(b, &kernel, &image) });
    }
    let images: BTreeSet<&CrossedHom> = table.iter().map(|e| &e.relative_class).collect();
    let injective = images.len() == table.len();
    let surjective = images.len() == relative.len() && relative.iter().all(|r| images.contains(r));
    let base_canon = relative_canonical(b, &kernel, &p.cocycle);
    let neutral_to_base = table
        .iter()
        .find(|e| e.twisted_class == CrossedHom::neutral(&pa))
        .is_some_and(|e| e.relative_class == base_canon);

    let abelian_twist_agrees = seq.a().underlying().is_abelian().then(|| {
        // ^Q A: C acts on A through any lift; twist by q
        let c = seq.c();
        let lift: Vec<usize> =
            c.underlying().elements().map(|z| u.elements().find(|&y| seq.v.apply(y) == z).unwrap()).collect();
        seq.a().gamma().elements().all(|t| {
            let l = lift[base.q.cocycle.values[t]];
            kernel.iter().all(|&x| u.conj(l, b.act(t, x)) == pb.act(t, x))
        })
    });
    let bijective = injective && surjective;
    Ok(T4Report {
        twisted_h1_size: h1.len(),
        relative_h1_size: relative.len(),
        table,
        injective,
        surjective,
        neutral_to_base,
        twisted_sequence_exact,
        abelian_twist_agrees,
        bijective,
    })
}
