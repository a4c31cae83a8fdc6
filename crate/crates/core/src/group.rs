//! Finite groups given by multiplication tables.
//!
//! Elements are the indices `0..order`, with `0` the identity. Subgroups and
//! other element sets are sorted index vectors. Every constructor that takes
//! an external table validates the group axioms; internal constructors
//! (products, permutation closures) build tables that are associative by
//! construction and only check the shape.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A sorted set of element indices.
pub type ElementSet = Vec<usize>;

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<usize>,
    inverses: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

pub type GroupRef = Arc<FiniteGroup>;

impl std::fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FiniteGroup(order {})", self.order)
    }
}

impl FiniteGroup {
    /// Validates a multiplication table: closure, identity at 0, inverses, associativity.
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self> {
        let g = Self::from_rows_shape_checked(table)?;
        for x in 0..g.order {
            for y in 0..g.order {
                let xy = g.mul(x, y);
                for z in 0..g.order {
                    if g.mul(xy, z) != g.mul(x, g.mul(y, z)) {
                        return Err(Error::InvalidTable(format!("not associative at ({x},{y},{z})")));
                    }
                }
            }
        }
        Ok(g)
    }

    /// Checks shape, identity and Latin-square property but not associativity.
    pub(crate) fn from_rows_shape_checked(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidTable("empty table".into()));
        }
        if table.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidTable("table is not square".into()));
        }
        if table.iter().flatten().any(|&v| v >= n) {
            return Err(Error::InvalidTable("entry out of range".into()));
        }
        for (x, row) in table.iter().enumerate() {
            if table[0][x] != x || row[0] != x {
                return Err(Error::InvalidTable("element 0 is not a two-sided identity".into()));
            }
        }
        let flat: Vec<usize> = table.into_iter().flatten().collect();
        let mut inverses = vec![usize::MAX; n];
        for x in 0..n {
            let row = &flat[x * n..(x + 1) * n];
            let mut seen = vec![false; n];
            for &v in row {
                if seen[v] {
                    return Err(Error::InvalidTable(format!("row {x} repeats an entry")));
                }
                seen[v] = true;
            }
            let y = row.iter().position(|&v| v == 0).expect("row is a permutation");
            if flat[y * n + x] != 0 {
                return Err(Error::InvalidTable(format!("element {x} has no two-sided inverse")));
            }
            inverses[x] = y;
        }
        Ok(FiniteGroup { order: n, table: flat, inverses, labels: None })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.order {
            return Err(Error::InvalidTable("label count differs from order".into()));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, x: usize) -> String {
        self.labels.as_ref().map_or_else(|| x.to_string(), |l| l[x].clone())
    }

    /// Equality of multiplication tables, ignoring labels.
    pub fn same_table(&self, other: &FiniteGroup) -> bool {
        self.order == other.order && self.table == other.table
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        0
    }

    #[inline]
    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.table[x * self.order + y]
    }

    #[inline]
    pub fn inv(&self, x: usize) -> usize {
        self.inverses[x]
    }

    /// `g x g^{-1}`
    #[inline]
    pub fn conj(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn pow(&self, x: usize, e: usize) -> usize {
        (0..e).fold(0, |acc, _| self.mul(acc, x))
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn table_rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order).map(|r| r.to_vec()).collect()
    }

    pub fn element_order(&self, x: usize) -> usize {
        let mut k = 1;
        let mut y = x;
        while y != 0 {
            y = self.mul(y, x);
            k += 1;
        }
        k
    }

    pub fn exponent(&self) -> usize {
        self.elements().map(|x| self.element_order(x)).fold(1, num_integer::lcm)
    }

    pub fn is_abelian(&self) -> bool {
        self.elements().all(|x| self.elements().all(|y| self.mul(x, y) == self.mul(y, x)))
    }

    pub fn is_subgroup(&self, set: &[usize]) -> bool {
        if !set.contains(&0) || set.iter().any(|&x| x >= self.order) {
            return false;
        }
        let s: BTreeSet<usize> = set.iter().copied().collect();
        s.iter().all(|&x| s.iter().all(|&y| s.contains(&self.mul(x, self.inv(y)))))
    }

    pub fn is_normal(&self, set: &[usize]) -> bool {
        let s: BTreeSet<usize> = set.iter().copied().collect();
        self.is_subgroup(set) && self.elements().all(|g| s.iter().all(|&x| s.contains(&self.conj(g, x))))
    }

    /// The subgroup generated by `gens`.
    pub fn generated(&self, gens: &[usize]) -> ElementSet {
        let mut seen = vec![false; self.order];
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        (0..self.order).filter(|&x| seen[x]).collect()
    }

    /// A small generating set: elements of largest order first, added greedily
    /// while they enlarge the generated subgroup.
    pub fn generators(&self) -> Vec<usize> {
        let mut cands: Vec<usize> = (1..self.order).collect();
        cands.sort_by_key(|&x| (std::cmp::Reverse(self.element_order(x)), x));
        let mut gens = Vec::new();
        let mut current = vec![0];
        for x in cands {
            if current.len() == self.order {
                break;
            }
            if current.binary_search(&x).is_err() {
                gens.push(x);
                current = self.generated(&gens);
            }
        }
        gens
    }

    pub fn conjugacy_classes(&self) -> Vec<ElementSet> {
        let mut assigned = vec![false; self.order];
        let mut classes = Vec::new();
        for x in self.elements() {
            if assigned[x] {
                continue;
            }
            let class: BTreeSet<usize> = self.elements().map(|g| self.conj(g, x)).collect();
            for &y in &class {
                assigned[y] = true;
            }
            classes.push(class.into_iter().collect());
        }
        classes
    }

    pub fn centralizer(&self, x: usize) -> ElementSet {
        self.elements().filter(|&y| self.mul(x, y) == self.mul(y, x)).collect()
    }

    pub fn centralizer_of_set(&self, set: &[usize]) -> ElementSet {
        self.elements().filter(|&y| set.iter().all(|&x| self.mul(x, y) == self.mul(y, x))).collect()
    }

    pub fn center(&self) -> ElementSet {
        self.elements().filter(|&y| self.elements().all(|x| self.mul(x, y) == self.mul(y, x))).collect()
    }

    /// Left cosets `xH`, sorted by minimal element; the coset of `H` itself comes first.
    pub fn left_cosets(&self, h: &[usize]) -> Result<Vec<ElementSet>> {
        if !self.is_subgroup(h) {
            return Err(Error::NotSubgroup);
        }
        let mut assigned = vec![false; self.order];
        let mut cosets = Vec::new();
        for x in self.elements() {
            if assigned[x] {
                continue;
            }
            let mut c: Vec<usize> = h.iter().map(|&y| self.mul(x, y)).collect();
            c.sort_unstable();
            for &y in &c {
                assigned[y] = true;
            }
            cosets.push(c);
        }
        Ok(cosets)
    }

    /// All subgroups, sorted by (order, elements). Built by closing the set of
    /// cyclic subgroups under joins; intended for small groups.
    pub fn subgroups(&self) -> Vec<ElementSet> {
        let mut all: BTreeSet<ElementSet> = self.elements().map(|x| self.generated(&[x])).collect();
        let cyclic: Vec<ElementSet> = all.iter().cloned().collect();
        let mut frontier: Vec<ElementSet> = cyclic.clone();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for h in &frontier {
                for c in &cyclic {
                    if c.iter().all(|x| h.binary_search(x).is_ok()) {
                        continue;
                    }
                    let gens: Vec<usize> = h.iter().chain(c.iter()).copied().collect();
                    let j = self.generated(&gens);
                    if all.insert(j.clone()) {
                        next.push(j);
                    }
                }
            }
            frontier = next;
        }
        let mut out: Vec<ElementSet> = all.into_iter().collect();
        out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        out
    }

    /// `g H g^{-1}`, sorted.
    pub fn conjugate_set(&self, g: usize, set: &[usize]) -> ElementSet {
        let mut out: Vec<usize> = set.iter().map(|&x| self.conj(g, x)).collect();
        out.sort_unstable();
        out
    }

    /// An element `g` with `g H g^{-1} = K`, if any.
    pub fn conjugating_element(&self, h: &[usize], k: &[usize]) -> Option<usize> {
        if h.len() != k.len() {
            return None;
        }
        self.elements().find(|&g| self.conjugate_set(g, h) == k)
    }

    pub fn trivial() -> Self {
        Self::from_rows_shape_checked(vec![vec![0]]).expect("trivial group")
    }

    pub fn cyclic(n: usize) -> Self {
        assert!(n > 0);
        let table = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        Self::from_rows_shape_checked(table).expect("cyclic group table")
    }

    /// Pairs `(x, y)` indexed as `x + |g| * y`.
    pub fn direct_product(g: &FiniteGroup, h: &FiniteGroup) -> Self {
        let (m, n) = (g.order, h.order);
        let table = (0..m * n)
            .map(|a| (0..m * n).map(|b| g.mul(a % m, b % m) + m * h.mul(a / m, b / m)).collect())
            .collect();
        Self::from_rows_shape_checked(table).expect("direct product table")
    }

    pub fn direct_product_many(groups: &[FiniteGroup]) -> Self {
        groups.iter().fold(Self::trivial(), |acc, g| Self::direct_product(&acc, g))
    }

    /// Closure of a set of permutations of `0..degree` under composition.
    /// `(p * q)(i) = p(q(i))`. Elements are numbered in breadth-first order.
    pub fn from_permutations(degree: usize, gens: &[Vec<usize>]) -> Self {
        Self::permutation_group(degree, gens).0
    }

    /// As [`Self::from_permutations`], also returning the permutation of each element.
    pub fn permutation_group(degree: usize, gens: &[Vec<usize>]) -> (Self, Vec<Vec<usize>>) {
        let id: Vec<usize> = (0..degree).collect();
        let compose = |p: &[usize], q: &[usize]| -> Vec<usize> { q.iter().map(|&i| p[i]).collect() };
        let mut elems = vec![id.clone()];
        let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(id, 0)]);
        let mut i = 0;
        while i < elems.len() {
            for g in gens {
                let p = compose(&elems[i], g);
                if !index.contains_key(&p) {
                    index.insert(p.clone(), elems.len());
                    elems.push(p);
                }
            }
            i += 1;
        }
        let table = elems
            .iter()
            .map(|p| elems.iter().map(|q| index[&compose(p, q)]).collect())
            .collect();
        (Self::from_rows_shape_checked(table).expect("permutation group table"), elems)
    }

    pub fn symmetric(n: usize) -> Self {
        if n <= 1 {
            return Self::trivial();
        }
        let mut swap: Vec<usize> = (0..n).collect();
        swap.swap(0, 1);
        let cycle: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        Self::from_permutations(n, &[swap, cycle])
    }

    pub fn alternating(n: usize) -> Self {
        if n <= 2 {
            return Self::trivial();
        }
        let gens: Vec<Vec<usize>> = (2..n)
            .map(|k| {
                let mut p: Vec<usize> = (0..n).collect();
                p[0] = 1;
                p[1] = k;
                p[k] = 0;
                p
            })
            .collect();
        Self::from_permutations(n, &gens)
    }

    /// Dihedral group of order `2n`.
    pub fn dihedral(n: usize) -> Self {
        if n == 1 {
            return Self::cyclic(2);
        }
        if n == 2 {
            return Self::direct_product(&Self::cyclic(2), &Self::cyclic(2));
        }
        let rot: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        let refl: Vec<usize> = (0..n).map(|i| (n - i) % n).collect();
        Self::from_permutations(n, &[rot, refl])
    }

    /// Dicyclic group of order `4n` (`n = 2` gives the quaternion group).
    pub fn dicyclic(n: usize) -> Self {
        // <a, x | a^{2n} = 1, x^2 = a^n, x a x^{-1} = a^{-1}> acting regularly on itself;
        // elements a^i x^j encoded as i + 2n j.
        let m = 2 * n;
        let mul = |p: usize, q: usize| -> usize {
            let (i, j) = (p % m, p / m);
            let (k, l) = (q % m, q / m);
            if j == 0 {
                (i + k) % m + m * l
            } else {
                // a^i x a^k x^l = a^{i-k} x^{1+l}
                let e = (i + m - k) % m;
                if l == 0 {
                    e + m
                } else {
                    (e + n) % m
                }
            }
        };
        let table = (0..2 * m).map(|p| (0..2 * m).map(|q| mul(p, q)).collect()).collect();
        Self::from_rows_shape_checked(table).expect("dicyclic table")
    }

    pub fn quaternion() -> Self {
        Self::dicyclic(2)
    }

    /// Builds the quotient by a normal subgroup together with the projection.
    pub fn quotient(self: &Arc<Self>, n: &[usize]) -> Result<(GroupRef, GroupHom)> {
        if !self.is_normal(n) {
            return Err(Error::NotNormal);
        }
        let cosets = self.left_cosets(n)?;
        let mut which = vec![0usize; self.order];
        for (i, c) in cosets.iter().enumerate() {
            for &x in c {
                which[x] = i;
            }
        }
        let reps: Vec<usize> = cosets.iter().map(|c| c[0]).collect();
        let table = reps.iter().map(|&x| reps.iter().map(|&y| which[self.mul(x, y)]).collect()).collect();
        let q = Arc::new(Self::from_rows_shape_checked(table)?);
        let hom = GroupHom { source: self.clone(), target: q.clone(), map: which };
        Ok((q, hom))
    }
}

/// A homomorphism between finite groups given elementwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupHom {
    pub source: GroupRef,
    pub target: GroupRef,
    pub map: Vec<usize>,
}

impl GroupHom {
    pub fn new(source: GroupRef, target: GroupRef, map: Vec<usize>) -> Result<Self> {
        if map.len() != source.order() || map.iter().any(|&y| y >= target.order()) {
            return Err(Error::InvalidHom("map has wrong length or range".into()));
        }
        for x in source.elements() {
            for y in source.elements() {
                if map[source.mul(x, y)] != target.mul(map[x], map[y]) {
                    return Err(Error::InvalidHom(format!("not multiplicative at ({x},{y})")));
                }
            }
        }
        Ok(GroupHom { source, target, map })
    }

    pub fn identity(g: GroupRef) -> Self {
        let map = g.elements().collect();
        GroupHom { source: g.clone(), target: g, map }
    }

    /// Extends generator images to a homomorphism, if consistent.
    pub fn from_generators(source: GroupRef, target: GroupRef, gens: &[usize], images: &[usize]) -> Result<Self> {
        let mut map = vec![usize::MAX; source.order()];
        map[0] = 0;
        let mut queue = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for (&g, &img) in gens.iter().zip(images) {
                let y = source.mul(x, g);
                let v = target.mul(map[x], img);
                if map[y] == usize::MAX {
                    map[y] = v;
                    queue.push_back(y);
                } else if map[y] != v {
                    return Err(Error::InvalidHom("generator images violate a relation".into()));
                }
            }
        }
        if map.contains(&usize::MAX) {
            return Err(Error::InvalidHom("elements do not generate the source".into()));
        }
        Self::new(source, target, map)
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn kernel(&self) -> ElementSet {
        self.source.elements().filter(|&x| self.map[x] == 0).collect()
    }

    pub fn image(&self) -> ElementSet {
        let s: BTreeSet<usize> = self.map.iter().copied().collect();
        s.into_iter().collect()
    }

    pub fn is_surjective(&self) -> bool {
        self.image().len() == self.target.order()
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().len() == 1
    }

    pub fn compose(&self, after: &GroupHom) -> GroupHom {
        GroupHom {
            source: self.source.clone(),
            target: after.target.clone(),
            map: self.map.iter().map(|&y| after.map[y]).collect(),
        }
    }

    pub fn preimage(&self, set: &[usize]) -> ElementSet {
        self.source.elements().filter(|&x| set.contains(&self.map[x])).collect()
    }
}

/// Conjugacy classes of `q.source` contained in `q^{-1}(class)`.
pub fn class_fiber(q: &GroupHom, class: &[usize]) -> Result<Vec<ElementSet>> {
    if !q.is_surjective() {
        return Err(Error::NotSurjective);
    }
    let fiber = q.preimage(class);
    Ok(q.source.conjugacy_classes().into_iter().filter(|c| fiber.binary_search(&c[0]).is_ok()).collect())
}

/// `N ⋊_θ Q`: `theta[x]` is the automorphism of `n` attached to `x ∈ q`, as an image list.
#[derive(Clone, Debug)]
pub struct SemidirectDatum {
    pub n: GroupRef,
    pub q: GroupRef,
    pub theta: Vec<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct SemidirectProduct {
    pub group: GroupRef,
    pub embed_n: GroupHom,
    pub embed_q: GroupHom,
    pub project: GroupHom,
}

impl SemidirectDatum {
    pub fn validate(&self) -> Result<()> {
        let (n, q) = (&self.n, &self.q);
        if self.theta.len() != q.order() {
            return Err(Error::InvalidTheta("one automorphism per element of Q required".into()));
        }
        for (x, t) in self.theta.iter().enumerate() {
            if t.len() != n.order() || t.iter().any(|&v| v >= n.order()) {
                return Err(Error::InvalidTheta(format!("theta({x}) has wrong shape")));
            }
            let mut seen = vec![false; n.order()];
            for &v in t {
                if std::mem::replace(&mut seen[v], true) {
                    return Err(Error::InvalidTheta(format!("theta({x}) is not bijective")));
                }
            }
            for a in n.elements() {
                for b in n.elements() {
                    if t[n.mul(a, b)] != n.mul(t[a], t[b]) {
                        return Err(Error::InvalidTheta(format!("theta({x}) is not multiplicative")));
                    }
                }
            }
        }
        for x in q.elements() {
            for y in q.elements() {
                let xy = &self.theta[q.mul(x, y)];
                if n.elements().any(|a| xy[a] != self.theta[x][self.theta[y][a]]) {
                    return Err(Error::InvalidTheta(format!("theta is not a homomorphism at ({x},{y})")));
                }
            }
        }
        Ok(())
    }
}

/// `(n1, q1)(n2, q2) = (n1 θ(q1)(n2), q1 q2)`; the pair `(a, x)` has index `a + |N| x`.
pub fn semidirect_product(d: &SemidirectDatum) -> Result<SemidirectProduct> {
    d.validate()?;
    let (nn, qn) = (d.n.order(), d.q.order());
    let table = (0..nn * qn)
        .map(|u| {
            let (a, x) = (u % nn, u / nn);
            (0..nn * qn)
                .map(|v| {
                    let (b, y) = (v % nn, v / nn);
                    d.n.mul(a, d.theta[x][b]) + nn * d.q.mul(x, y)
                })
                .collect()
        })
        .collect();
    let group = Arc::new(FiniteGroup::from_rows_shape_checked(table)?);
    let embed_n = GroupHom { source: d.n.clone(), target: group.clone(), map: d.n.elements().collect() };
    let embed_q = GroupHom { source: d.q.clone(), target: group.clone(), map: d.q.elements().map(|x| nn * x).collect() };
    let project = GroupHom { source: group.clone(), target: d.q.clone(), map: group.elements().map(|u| u / nn).collect() };
    Ok(SemidirectProduct { group, embed_n, embed_q, project })
}

/// The nonabelian group of order `l^3` and exponent `l` built as
/// `(C_l × C_l) ⋊ C_l` with `c^i` acting by `a ↦ a b^i`, `b ↦ b`.
#[derive(Clone, Debug)]
pub struct HeisenbergGroup {
    pub l: usize,
    pub product: SemidirectProduct,
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

impl HeisenbergGroup {
    pub fn new(l: usize) -> Result<Self> {
        let cl = FiniteGroup::cyclic(l);
        // N = C_l × C_l with a = (1, 0) = index 1, b = (0, 1) = index l
        let n = Arc::new(FiniteGroup::direct_product(&cl, &cl));
        let q = Arc::new(cl);
        let theta = (0..l)
            .map(|i| (0..l * l).map(|u| {
                let (x, y) = (u % l, u / l);
                x + l * ((i * x + y) % l)
            }).collect())
            .collect();
        let product = semidirect_product(&SemidirectDatum { n, q, theta })?;
        Ok(HeisenbergGroup { l, a: 1, b: l, c: l * l, product })
    }

    pub fn group(&self) -> &GroupRef {
        &self.product.group
    }

    /// `b^k a^j c`.
    pub fn element(&self, k: usize, j: usize, c_pow: usize) -> usize {
        let g = self.group();
        let bk = g.pow(self.b, k);
        let aj = g.pow(self.a, j);
        let cp = g.pow(self.c, c_pow);
        g.mul(g.mul(bk, aj), cp)
    }

    /// The kernel `<b>` of `G → <a, c>`.
    pub fn b_subgroup(&self) -> ElementSet {
        self.group().generated(&[self.b])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s3_center_trivial_and_classes() {
        let s3 = FiniteGroup::symmetric(3);
        assert_eq!(s3.order(), 6);
        assert_eq!(s3.center(), vec![0]);
        let sizes: Vec<usize> = s3.conjugacy_classes().iter().map(|c| c.len()).collect();
        assert_eq!(sizes.iter().sum::<usize>(), 6);
        let mut sorted = sizes.clone();
        sorted.sort();
        assert_eq!(sorted, vec![1, 2, 3]);
    }

    #[test]
    fn trivial_and_abelian_classes() {
        assert_eq!(FiniteGroup::trivial().conjugacy_classes(), vec![vec![0]]);
        let c6 = FiniteGroup::cyclic(6);
        assert!(c6.conjugacy_classes().iter().all(|c| c.len() == 1));
        assert_eq!(c6.center().len(), 6);
    }

    #[test]
    fn from_table_rejects_non_associative() {
        // a Latin square with identity 0 that is not a group (order 5 loop)
        let t = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(matches!(FiniteGroup::from_table(t), Err(Error::InvalidTable(_))));
    }

    #[test]
    fn from_table_accepts_cyclic() {
        let c4 = FiniteGroup::cyclic(4);
        let g = FiniteGroup::from_table(c4.table_rows()).unwrap();
        assert_eq!(g, c4);
    }

    #[test]
    fn heisenberg_l3_facts() {
        let h = HeisenbergGroup::new(3).unwrap();
        let g = h.group();
        assert_eq!(g.order(), 27);
        assert!(g.elements().skip(1).all(|x| g.element_order(x) == 3));
        assert_eq!(g.center(), h.b_subgroup());
        // a b = c a c^{-1}
        assert_eq!(g.mul(h.a, h.b), g.conj(h.c, h.a));
        let classes = g.conjugacy_classes();
        assert_eq!(classes.len(), 11);
        assert_eq!(classes.iter().filter(|c| c.len() == 1).count(), 3);
        assert_eq!(classes.iter().filter(|c| c.len() == 3).count(), 8);
    }

    #[test]
    fn heisenberg_centralizer_of_ac() {
        let h = HeisenbergGroup::new(3).unwrap();
        let g = h.group();
        let ac = g.mul(h.a, h.c);
        let z = g.centralizer(ac);
        assert_eq!(z, g.generated(&[h.b, ac]));
        assert_eq!(z.len(), 9);
        assert_eq!(g.centralizer(h.b).len(), 27);
        assert_eq!(g.centralizer(0).len(), 27);
    }

    #[test]
    fn order_125_center_5() {
        let h = HeisenbergGroup::new(5).unwrap();
        assert_eq!(h.group().order(), 125);
        assert_eq!(h.group().center().len(), 5);
    }

    #[test]
    fn trivial_theta_is_direct_product() {
        let n = Arc::new(FiniteGroup::symmetric(3));
        let q = Arc::new(FiniteGroup::cyclic(2));
        let theta = vec![n.elements().collect(), n.elements().collect()];
        let p = semidirect_product(&SemidirectDatum { n: n.clone(), q: q.clone(), theta }).unwrap();
        assert_eq!(p.group.as_ref(), &FiniteGroup::direct_product(&n, &q));
        assert_eq!(p.group.center().len(), n.center().len() * q.center().len());
    }

    #[test]
    fn bad_theta_rejected() {
        let n = Arc::new(FiniteGroup::cyclic(3));
        let q = Arc::new(FiniteGroup::cyclic(2));
        // inversion for the generator is fine, but use a non-automorphism
        let theta = vec![vec![0, 1, 2], vec![0, 0, 0]];
        let r = semidirect_product(&SemidirectDatum { n, q, theta });
        assert!(matches!(r, Err(Error::InvalidTheta(_))));
    }

    #[test]
    fn quotient_by_center_and_trivial() {
        let h = HeisenbergGroup::new(3).unwrap();
        let g = h.group().clone();
        let (q, proj) = g.quotient(&h.b_subgroup()).unwrap();
        assert_eq!(q.order(), 9);
        assert!(q.is_abelian());
        assert_eq!(q.exponent(), 3);
        assert_eq!(proj.kernel(), h.b_subgroup());
        let all: Vec<usize> = g.elements().collect();
        assert_eq!(g.quotient(&all).unwrap().0.order(), 1);
        let (same, p) = g.quotient(&[0]).unwrap();
        assert_eq!(same.as_ref(), g.as_ref());
        assert!(p.map.iter().enumerate().all(|(i, &v)| i == v));
    }

    #[test]
    fn quotient_rejects_non_normal() {
        let s3 = Arc::new(FiniteGroup::symmetric(3));
        let t = s3.elements().find(|&x| s3.element_order(x) == 2).unwrap();
        assert_eq!(s3.quotient(&s3.generated(&[t])).unwrap_err(), Error::NotNormal);
    }

    #[test]
    fn class_fiber_over_c() {
        let h = HeisenbergGroup::new(3).unwrap();
        let proj = &h.product.project;
        let fib = class_fiber(proj, &[1]).unwrap();
        assert_eq!(fib.len(), 3);
        for (j, class) in fib.iter().enumerate() {
            assert_eq!(class.len(), 3);
            let _ = j;
        }
        // every b^k a^j c lies in exactly one of them
        let g = h.group();
        for j in 0..3 {
            let set: Vec<usize> = (0..3).map(|k| h.element(k, j, 1)).collect();
            let mut s = set.clone();
            s.sort();
            assert!(fib.contains(&s));
        }
        assert_eq!(g.order(), 27);
    }

    #[test]
    fn class_fiber_identity_hom() {
        let s3 = Arc::new(FiniteGroup::symmetric(3));
        let id = GroupHom::identity(s3.clone());
        for c in s3.conjugacy_classes() {
            assert_eq!(class_fiber(&id, &c).unwrap(), vec![c.clone()]);
        }
    }

    #[test]
    fn subgroups_of_s3_and_s4() {
        assert_eq!(FiniteGroup::symmetric(3).subgroups().len(), 6);
        assert_eq!(FiniteGroup::symmetric(4).subgroups().len(), 30);
        assert_eq!(FiniteGroup::quaternion().subgroups().len(), 6);
    }

    #[test]
    fn named_groups_have_expected_shape() {
        assert_eq!(FiniteGroup::dihedral(4).order(), 8);
        assert_eq!(FiniteGroup::dihedral(4).center().len(), 2);
        assert_eq!(FiniteGroup::quaternion().order(), 8);
        assert_eq!(FiniteGroup::quaternion().center().len(), 2);
        assert!(!FiniteGroup::quaternion().is_abelian());
        assert_eq!(FiniteGroup::alternating(4).order(), 12);
        assert_eq!(FiniteGroup::alternating(4).center().len(), 1);
        assert_eq!(FiniteGroup::dicyclic(3).order(), 12);
        for g in [FiniteGroup::dicyclic(3), FiniteGroup::dicyclic(4), FiniteGroup::dihedral(6)] {
            assert!(FiniteGroup::from_table(g.table_rows()).is_ok());
        }
    }

    #[test]
    fn from_generators_extends() {
        let c6 = Arc::new(FiniteGroup::cyclic(6));
        let c3 = Arc::new(FiniteGroup::cyclic(3));
        let h = GroupHom::from_generators(c6.clone(), c3.clone(), &[1], &[1]).unwrap();
        assert_eq!(h.kernel(), vec![0, 3]);
        assert!(GroupHom::from_generators(c3, c6, &[1], &[1]).is_err());
    }
}
