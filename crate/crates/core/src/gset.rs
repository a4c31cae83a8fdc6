//! Finite left G-sets.
//!
//! A [`GSet`] stores, for every group element, the permutation it induces on
//! the points `0..size`. Orbit decompositions pick the minimal point of each
//! orbit as its base point so outputs are reproducible.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{ElementSet, GroupHom, GroupRef};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GSet {
    group: GroupRef,
    size: usize,
    /// `action[g][p]` is `g · p`.
    action: Vec<Vec<usize>>,
}

impl GSet {
    pub fn new(group: GroupRef, size: usize, action: Vec<Vec<usize>>) -> Result<Self> {
        if action.len() != group.order() {
            return Err(Error::InvalidAction("one permutation per group element required".into()));
        }
        for (g, perm) in action.iter().enumerate() {
            if perm.len() != size || perm.iter().any(|&p| p >= size) {
                return Err(Error::InvalidAction(format!("permutation of element {g} has wrong shape")));
            }
            let distinct: BTreeSet<usize> = perm.iter().copied().collect();
            if distinct.len() != size {
                return Err(Error::InvalidAction(format!("element {g} does not act bijectively")));
            }
        }
        if action[0].iter().enumerate().any(|(i, &p)| i != p) {
            return Err(Error::InvalidAction("identity does not act trivially".into()));
        }
        for g in group.elements() {
            for h in group.elements() {
                let gh = group.mul(g, h);
                if (0..size).any(|p| action[gh][p] != action[g][action[h][p]]) {
                    return Err(Error::InvalidAction(format!("action((g h)) != action(g) action(h) at ({g},{h})")));
                }
            }
        }
        Ok(GSet { group, size, action })
    }

    /// Builds a G-set from the images of generators of `group`.
    pub fn from_generators(group: GroupRef, size: usize, gens: &[usize], images: &[Vec<usize>]) -> Result<Self> {
        let mut action: Vec<Option<Vec<usize>>> = vec![None; group.order()];
        action[0] = Some((0..size).collect());
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            let ax = action[x].clone().expect("visited");
            for (&g, img) in gens.iter().zip(images) {
                let y = group.mul(x, g);
                let ay: Vec<usize> = (0..size).map(|p| ax[img[p]]).collect();
                match &action[y] {
                    None => {
                        action[y] = Some(ay);
                        queue.push_back(y);
                    }
                    Some(prev) if *prev != ay => {
                        return Err(Error::InvalidAction("generator images violate a relation".into()));
                    }
                    _ => {}
                }
            }
        }
        let action: Option<Vec<Vec<usize>>> = action.into_iter().collect();
        let action = action.ok_or_else(|| Error::InvalidAction("generators do not generate the group".into()))?;
        Self::new(group, size, action)
    }

    pub fn group(&self) -> &GroupRef {
        &self.group
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn act(&self, g: usize, p: usize) -> usize {
        self.action[g][p]
    }

    pub fn action(&self) -> &[Vec<usize>] {
        &self.action
    }

    /// Left regular action of `g` on itself.
    pub fn regular(g: GroupRef) -> Self {
        let action = g.elements().map(|x| g.elements().map(|y| g.mul(x, y)).collect()).collect();
        GSet { size: g.order(), group: g, action }
    }

    pub fn trivial(g: GroupRef, size: usize) -> Self {
        let action = vec![(0..size).collect(); g.order()];
        GSet { group: g, size, action }
    }

    pub fn stabilizer(&self, p: usize) -> ElementSet {
        self.group.elements().filter(|&g| self.act(g, p) == p).collect()
    }

    pub fn orbit(&self, p: usize) -> Vec<usize> {
        let s: BTreeSet<usize> = self.group.elements().map(|g| self.act(g, p)).collect();
        s.into_iter().collect()
    }

    /// The restriction to an invariant subset, points renumbered in increasing order.
    pub fn restrict_to(&self, points: &[usize]) -> Result<Self> {
        let mut pts = points.to_vec();
        pts.sort_unstable();
        pts.dedup();
        let mut pos = vec![usize::MAX; self.size];
        for (i, &p) in pts.iter().enumerate() {
            pos[p] = i;
        }
        let mut action = Vec::with_capacity(self.group.order());
        for g in self.group.elements() {
            let mut perm = Vec::with_capacity(pts.len());
            for &p in &pts {
                let q = pos[self.act(g, p)];
                if q == usize::MAX {
                    return Err(Error::InvalidAction("subset is not invariant".into()));
                }
                perm.push(q);
            }
            action.push(perm);
        }
        Ok(GSet { group: self.group.clone(), size: pts.len(), action })
    }

    /// Pulls the action back along `hom: G' → G`.
    pub fn inflate(&self, hom: &GroupHom) -> Result<Self> {
        if hom.target != self.group {
            return Err(Error::InvalidHom("homomorphism target is not the acting group".into()));
        }
        let action = hom.source.elements().map(|x| self.action[hom.apply(x)].clone()).collect();
        Ok(GSet { group: hom.source.clone(), size: self.size, action })
    }

    /// Disjoint union; points of `other` are shifted by `self.size()`.
    pub fn disjoint_union(&self, other: &GSet) -> Result<Self> {
        if self.group != other.group {
            return Err(Error::InvalidAction("different acting groups".into()));
        }
        let n = self.size;
        let action = self
            .group
            .elements()
            .map(|g| self.action[g].iter().copied().chain(other.action[g].iter().map(|&p| p + n)).collect())
            .collect();
        Ok(GSet { group: self.group.clone(), size: n + other.size, action })
    }

    pub fn is_equivariant_map(&self, target: &GSet, map: &[usize]) -> bool {
        self.group == target.group
            && map.len() == self.size
            && map.iter().all(|&q| q < target.size)
            && self.group.elements().all(|g| (0..self.size).all(|p| map[self.act(g, p)] == target.act(g, map[p])))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Orbit {
    pub points: Vec<usize>,
    /// minimal point of the orbit
    pub base: usize,
    pub stabilizer: ElementSet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EtaleDecomposition {
    pub orbits: Vec<Orbit>,
}

pub fn orbits(x: &GSet) -> EtaleDecomposition {
    let mut seen = vec![false; x.size];
    let mut out = Vec::new();
    for p in 0..x.size {
        if seen[p] {
            continue;
        }
        let pts = x.orbit(p);
        for &q in &pts {
            seen[q] = true;
        }
        out.push(Orbit { base: p, stabilizer: x.stabilizer(p), points: pts });
    }
    EtaleDecomposition { orbits: out }
}

/// `G` acting on the left cosets of `h`, in the order of [`crate::group::FiniteGroup::left_cosets`].
pub fn coset_gset(g: &GroupRef, h: &[usize]) -> Result<GSet> {
    let cosets = g.left_cosets(h)?;
    let mut which = vec![0; g.order()];
    for (i, c) in cosets.iter().enumerate() {
        for &x in c {
            which[x] = i;
        }
    }
    let action = g.elements().map(|y| cosets.iter().map(|c| which[g.mul(y, c[0])]).collect()).collect();
    Ok(GSet { group: g.clone(), size: cosets.len(), action })
}

/// `G` acting on its own elements by conjugation, `τ · σ = τ σ τ^{-1}`.
pub fn conjugation_twist(g: &GroupRef) -> GSet {
    let action = g.elements().map(|t| g.elements().map(|s| g.conj(t, s)).collect()).collect();
    GSet { group: g.clone(), size: g.order(), action }
}

/// An equivariant bijection `x → y`, if the two G-sets are isomorphic.
///
/// Orbits are matched greedily by stabilizer conjugacy class; transitive
/// G-sets are isomorphic exactly when their point stabilizers are conjugate.
pub fn gset_iso(x: &GSet, y: &GSet) -> Option<Vec<usize>> {
    if x.group != y.group || x.size != y.size {
        return None;
    }
    let g = &x.group;
    let ox = orbits(x).orbits;
    let oy = orbits(y).orbits;
    if ox.len() != oy.len() {
        return None;
    }
    let mut used = vec![false; oy.len()];
    let mut map = vec![usize::MAX; x.size];
    for o in &ox {
        let (j, k) = oy.iter().enumerate().find_map(|(j, t)| {
            if used[j] || t.points.len() != o.points.len() {
                return None;
            }
            // k Stab(y0) k^{-1} = Stab(x0), so Stab(k · y0) = Stab(x0)
            g.conjugating_element(&t.stabilizer, &o.stabilizer).map(|k| (j, k))
        })?;
        used[j] = true;
        let y1 = y.act(k, oy[j].base);
        for h in g.elements() {
            map[x.act(h, o.base)] = y.act(h, y1);
        }
    }
    debug_assert!(x.is_equivariant_map(y, &map));
    Some(map)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DescentFactor {
    pub orbit: Vec<usize>,
    pub representative: usize,
    pub stabilizer: ElementSet,
    /// `[G : G_j]`, the degree of the field attached to the orbit
    pub degree: usize,
}

/// One factor per orbit: the index set of the simple factors of a descended
/// algebra splits as a product of restrictions of scalars, one per orbit.
pub fn descent_orbit_decomposition(x: &GSet) -> Vec<DescentFactor> {
    let n = x.group.order();
    orbits(x)
        .orbits
        .into_iter()
        .map(|o| DescentFactor {
            degree: n / o.stabilizer.len(),
            representative: o.base,
            stabilizer: o.stabilizer,
            orbit: o.points,
        })
        .collect()
}
