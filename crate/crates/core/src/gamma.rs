//! Finite groups with an action of a finite "Galois" group Γ by automorphisms.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::group::{ElementSet, FiniteGroup, GroupHom, GroupRef};
use crate::lattice::same_group;

#[derive(Clone, Debug)]
pub struct GammaGroup {
    gamma: GroupRef,
    underlying: GroupRef,
    /// `action[τ][x] = τx`
    action: Vec<Vec<usize>>,
}

fn is_automorphism(n: &FiniteGroup, perm: &[usize]) -> bool {
    if perm.len() != n.order() || perm.iter().any(|&y| y >= n.order()) {
        return false;
    }
    let mut seen = vec![false; n.order()];
    for &y in perm {
        if std::mem::replace(&mut seen[y], true) {
            return false;
        }
    }
    n.elements().all(|x| n.elements().all(|y| perm[n.mul(x, y)] == n.mul(perm[x], perm[y])))
}

impl GammaGroup {
    pub fn new(gamma: GroupRef, underlying: GroupRef, action: Vec<Vec<usize>>) -> Result<Self> {
        if action.len() != gamma.order() {
            return Err(Error::InvalidAction(format!("need {} automorphisms", gamma.order())));
        }
        for (t, a) in action.iter().enumerate() {
            if !is_automorphism(&underlying, a) {
                return Err(Error::InvalidAction(format!("element {t} does not act by an automorphism")));
            }
        }
        let g = Self { gamma, underlying, action };
        g.check_action()?;
        Ok(g)
    }

    fn check_action(&self) -> Result<()> {
        let (gm, n) = (&self.gamma, &self.underlying);
        if n.elements().any(|x| self.action[gm.identity()][x] != x) {
            return Err(Error::NotAction("identity acts nontrivially".into()));
        }
        for s in gm.generators() {
            for t in gm.elements() {
                let ts = gm.mul(t, s);
                if n.elements().any(|x| self.action[ts][x] != self.action[t][self.action[s][x]]) {
                    return Err(Error::NotAction(format!("({t}*{s})x != {t}({s}x)")));
                }
            }
        }
        Ok(())
    }

    /// Extends automorphisms given on generators of Γ.
    pub fn from_generators(
        gamma: GroupRef,
        underlying: GroupRef,
        gens: &[usize],
        images: &[Vec<usize>],
    ) -> Result<Self> {
        if gens.len() != images.len() {
            return Err(Error::InvalidAction("generator/image count mismatch".into()));
        }
        for img in images {
            if !is_automorphism(&underlying, img) {
                return Err(Error::InvalidAction("generator does not act by an automorphism".into()));
            }
        }
        let mut action: Vec<Option<Vec<usize>>> = vec![None; gamma.order()];
        action[gamma.identity()] = Some(underlying.elements().collect());
        let mut queue = VecDeque::from([gamma.identity()]);
        while let Some(t) = queue.pop_front() {
            for (&s, img) in gens.iter().zip(images) {
                let ts = gamma.mul(t, s);
                let at = action[t].as_ref().unwrap();
                let cand: Vec<usize> = img.iter().map(|&y| at[y]).collect();
                match &action[ts] {
                    Some(a) if *a != cand => return Err(Error::NotAction(format!("relation violated at {ts}"))),
                    Some(_) => {}
                    None => {
                        action[ts] = Some(cand);
                        queue.push_back(ts);
                    }
                }
            }
        }
        let action = action
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::InvalidAction("generators do not generate Γ".into()))?;
        Ok(Self { gamma, underlying, action })
    }

    pub fn trivial_action(gamma: GroupRef, underlying: GroupRef) -> Self {
        let id: Vec<usize> = underlying.elements().collect();
        let action = vec![id; gamma.order()];
        Self { gamma, underlying, action }
    }

    /// Γ acting on `underlying` through a homomorphism `Γ → underlying` by conjugation.
    pub fn conjugation_via(hom: &GroupHom) -> Self {
        let n = &hom.target;
        let action = hom
            .source
            .elements()
            .map(|t| n.elements().map(|x| n.conj(hom.apply(t), x)).collect())
            .collect();
        Self { gamma: hom.source.clone(), underlying: n.clone(), action }
    }

    pub fn gamma(&self) -> &GroupRef {
        &self.gamma
    }

    pub fn underlying(&self) -> &GroupRef {
        &self.underlying
    }

    pub fn action(&self) -> &[Vec<usize>] {
        &self.action
    }

    pub fn act(&self, t: usize, x: usize) -> usize {
        self.action[t][x]
    }

    /// `N^Γ`.
    pub fn fixed_points(&self) -> ElementSet {
        let gens = self.gamma.generators();
        self.underlying.elements().filter(|&x| gens.iter().all(|&s| self.action[s][x] == x)).collect()
    }

    pub fn same_gamma(&self, other: &GammaGroup) -> bool {
        same_group(&self.gamma, &other.gamma)
    }

    /// Componentwise action on the direct product, indexed first factor fastest.
    pub fn direct_product(factors: &[GammaGroup]) -> Result<GammaGroup> {
        let Some(first) = factors.first() else {
            return Err(Error::InvalidAction("empty product".into()));
        };
        if factors.iter().any(|f| !f.same_gamma(first)) {
            return Err(Error::IncompatibleActions("factors over different Γ".into()));
        }
        let groups: Vec<FiniteGroup> = factors.iter().map(|f| (*f.underlying).clone()).collect();
        let prod = FiniteGroup::direct_product_many(&groups);
        let action = first
            .gamma
            .elements()
            .map(|t| {
                prod.elements()
                    .map(|x| {
                        let (mut rest, mut out, mut radix) = (x, 0, 1);
                        for f in factors {
                            let m = f.underlying.order();
                            out += radix * f.action[t][rest % m];
                            rest /= m;
                            radix *= m;
                        }
                        out
                    })
                    .collect()
            })
            .collect();
        Ok(GammaGroup { gamma: first.gamma.clone(), underlying: prod.into(), action })
    }

    /// Splits a product index into factor indices (inverse of the encoding of [`Self::direct_product`]).
    pub fn split_index(orders: &[usize], mut x: usize) -> Vec<usize> {
        orders
            .iter()
            .map(|&m| {
                let c = x % m;
                x /= m;
                c
            })
            .collect()
    }

    /// The Γ-stable subgroup `h` with the restricted action.
    pub fn restrict(&self, h: &[usize]) -> Result<(GammaGroup, GroupHom)> {
        let n = &self.underlying;
        if !n.is_subgroup(h) {
            return Err(Error::NotSubgroup);
        }
        let pos = |x: usize| h.binary_search(&x).ok();
        let table: Vec<Vec<usize>> =
            h.iter().map(|&x| h.iter().map(|&y| pos(n.mul(x, y)).unwrap()).collect()).collect();
        let sub: GroupRef = FiniteGroup::from_rows_shape_checked(table)?.into();
        let mut action = Vec::with_capacity(self.gamma.order());
        for t in self.gamma.elements() {
            let a: Option<Vec<usize>> = h.iter().map(|&x| pos(self.action[t][x])).collect();
            action.push(a.ok_or(Error::NotStable)?);
        }
        let inc = GroupHom { source: sub.clone(), target: n.clone(), map: h.to_vec() };
        Ok((GammaGroup { gamma: self.gamma.clone(), underlying: sub, action }, inc))
    }

    /// `N/K` for a Γ-stable normal subgroup `K`.
    pub fn quotient(&self, k: &[usize]) -> Result<(GammaGroup, GroupHom)> {
        let (q, proj) = self.underlying.quotient(k)?;
        let mut action = Vec::with_capacity(self.gamma.order());
        for t in self.gamma.elements() {
            let mut a = vec![usize::MAX; q.order()];
            for x in self.underlying.elements() {
                let (c, d) = (proj.apply(x), proj.apply(self.action[t][x]));
                if a[c] == usize::MAX {
                    a[c] = d;
                } else if a[c] != d {
                    return Err(Error::NotStable);
                }
            }
            action.push(a);
        }
        Ok((GammaGroup { gamma: self.gamma.clone(), underlying: q, action }, proj))
    }
}

/// A Γ-equivariant homomorphism of Γ-groups.
#[derive(Clone, Debug)]
pub struct GammaHom {
    pub source: GammaGroup,
    pub target: GammaGroup,
    pub hom: GroupHom,
}

impl GammaHom {
    pub fn new(source: GammaGroup, target: GammaGroup, map: Vec<usize>) -> Result<Self> {
        if !source.same_gamma(&target) {
            return Err(Error::IncompatibleActions("different Γ".into()));
        }
        let hom = GroupHom::new(source.underlying.clone(), target.underlying.clone(), map)?;
        for t in source.gamma.generators() {
            for x in source.underlying.elements() {
                if hom.apply(source.act(t, x)) != target.act(t, hom.apply(x)) {
                    return Err(Error::NotEquivariant(format!("fails at ({t}, {x})")));
                }
            }
        }
        Ok(GammaHom { source, target, hom })
    }

    pub fn apply(&self, x: usize) -> usize {
        self.hom.apply(x)
    }
}
