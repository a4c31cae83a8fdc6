//! Free Z-modules of finite rank with a linear action of a finite group.
//!
//! Vectors are columns; `rho(g)` acts on the left. Sublattices handed out by
//! this module are always saturated, while [`is_exact`] also reports the
//! finer comparison of actual subgroups.

use std::collections::VecDeque;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{ElementSet, GroupHom, GroupRef};
use crate::gset::{coset_gset, GSet};
use crate::matrix::Matrix;
use crate::scalar::IntScalar;
use crate::snf::{kernel_basis, same_span, saturation, smith_normal_form, solve_matrix};
use crate::Int;

#[derive(Clone, Debug)]
pub struct ZGLattice<T = Int> {
    rank: usize,
    group: GroupRef,
    rho: Vec<Matrix<T>>,
}

pub(crate) fn same_group(a: &GroupRef, b: &GroupRef) -> bool {
    Arc::ptr_eq(a, b) || a.same_table(b)
}

/// Extends generator matrices to a full representation, checking every
/// relation `rho(g s) = rho(g) rho(s)` on the way.
pub fn close_action<T: IntScalar>(
    group: &GroupRef,
    rank: usize,
    gens: &[usize],
    mats: &[Matrix<T>],
) -> Result<Vec<Matrix<T>>> {
    if gens.len() != mats.len() {
        return Err(Error::InvalidAction("generator/matrix count mismatch".into()));
    }
    if mats.iter().any(|m| m.rows() != rank || m.cols() != rank) {
        return Err(Error::InvalidAction(format!("generator matrix is not {rank}x{rank}")));
    }
    let mut rho: Vec<Option<Matrix<T>>> = vec![None; group.order()];
    rho[group.identity()] = Some(Matrix::identity(rank));
    let mut queue = VecDeque::from([group.identity()]);
    while let Some(g) = queue.pop_front() {
        for (&s, m) in gens.iter().zip(mats) {
            let h = group.mul(g, s);
            let cand = rho[g].as_ref().unwrap().mul(m);
            match &rho[h] {
                Some(existing) if *existing != cand => {
                    return Err(Error::InvalidAction(format!("relation violated at element {h}")));
                }
                Some(_) => {}
                None => {
                    rho[h] = Some(cand);
                    queue.push_back(h);
                }
            }
        }
    }
    rho.into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::InvalidAction("generators do not generate the group".into()))
}

impl<T: IntScalar> ZGLattice<T> {
    /// Validates `rho(1) = I` and multiplicativity against a generating set,
    /// which together force every `rho(g)` to be unimodular.
    pub fn new(group: GroupRef, rho: Vec<Matrix<T>>) -> Result<Self> {
        if rho.len() != group.order() {
            return Err(Error::InvalidAction(format!("need {} matrices, got {}", group.order(), rho.len())));
        }
        let rank = rho.first().map_or(0, |m| m.rows());
        if rho.iter().any(|m| m.rows() != rank || m.cols() != rank) {
            return Err(Error::InvalidAction("matrices of inconsistent size".into()));
        }
        if !rho[group.identity()].is_identity() {
            return Err(Error::InvalidAction("identity does not act trivially".into()));
        }
        for s in group.generators() {
            for g in group.elements() {
                if rho[group.mul(g, s)] != rho[g].mul(&rho[s]) {
                    return Err(Error::InvalidAction(format!("rho({g}*{s}) != rho({g}) rho({s})")));
                }
            }
        }
        Ok(ZGLattice { rank, group, rho })
    }

    pub fn from_generators(group: GroupRef, rank: usize, gens: &[usize], mats: &[Matrix<T>]) -> Result<Self> {
        let rho = close_action(&group, rank, gens, mats)?;
        Ok(ZGLattice { rank, group, rho })
    }

    pub(crate) fn new_unchecked(group: GroupRef, rho: Vec<Matrix<T>>, rank: usize) -> Self {
        ZGLattice { rank, group, rho }
    }

    pub fn trivial(group: GroupRef, rank: usize) -> Self {
        let rho = vec![Matrix::identity(rank); group.order()];
        ZGLattice { rank, group, rho }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn group(&self) -> &GroupRef {
        &self.group
    }

    pub fn rho(&self, g: usize) -> &Matrix<T> {
        &self.rho[g]
    }

    pub fn matrices(&self) -> &[Matrix<T>] {
        &self.rho
    }

    /// `Hom(M, Z)` with `g` acting by the inverse transpose.
    pub fn dual(&self) -> Self {
        let rho = self.group.elements().map(|g| self.rho[self.group.inv(g)].transpose()).collect();
        ZGLattice { rank: self.rank, group: self.group.clone(), rho }
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if !same_group(&self.group, &other.group) {
            return Err(Error::IncompatibleActions("direct sum over different groups".into()));
        }
        let rho = self.group.elements().map(|g| self.rho[g].direct_sum(&other.rho[g])).collect();
        Ok(ZGLattice { rank: self.rank + other.rank, group: self.group.clone(), rho })
    }

    /// Restriction of scalars along `hom: H → G`.
    pub fn pullback(&self, hom: &GroupHom) -> Result<Self> {
        if !same_group(&hom.target, &self.group) {
            return Err(Error::IncompatibleActions("homomorphism target is not the acting group".into()));
        }
        let rho = hom.source.elements().map(|h| self.rho[hom.apply(h)].clone()).collect();
        Ok(ZGLattice { rank: self.rank, group: hom.source.clone(), rho })
    }

    /// Basis (columns) of the fixed vectors `M^G`.
    pub fn fixed_basis(&self) -> Matrix<T> {
        let mut stacked = Matrix::zeros(0, self.rank);
        for s in self.group.generators() {
            stacked = stacked.vstack(&self.rho[s].sub(&Matrix::identity(self.rank)));
        }
        kernel_basis(&stacked)
    }

    /// The sublattice spanned by the columns of `basis` (assumed independent),
    /// with the restricted action. Fails with `NotStable` if it is not G-stable.
    pub fn sublattice(&self, basis: &Matrix<T>) -> Result<(Self, LatticeMap<T>)> {
        assert_eq!(basis.rows(), self.rank);
        let k = basis.cols();
        let gens = self.group.generators();
        let mut mats = Vec::with_capacity(gens.len());
        for &s in &gens {
            let moved = self.rho[s].mul(basis);
            mats.push(solve_matrix(basis, &moved).ok_or(Error::NotStable)?);
        }
        let sub = ZGLattice::from_generators(self.group.clone(), k, &gens, &mats)?;
        let inc = LatticeMap { source: sub.clone(), target: self.clone(), matrix: basis.clone() };
        Ok((sub, inc))
    }

    /// `M / L` for a saturated G-stable sublattice `L` (columns of `basis`),
    /// with the projection map.
    pub fn quotient(&self, basis: &Matrix<T>) -> Result<(Self, LatticeMap<T>)> {
        if !same_span(&saturation(basis), basis) {
            return Err(Error::NotStable);
        }
        // complete `basis` to a basis of Z^n: B = [basis | c], then M/L has coordinates
        // given by the last rows of B^{-1}
        let snf = smith_normal_form(basis);
        let k = snf.rank();
        let n = self.rank;
        let complement: Vec<usize> = (k..n).collect();
        let c = snf.left_inv.select_columns(&complement);
        let full = basis.hstack(&c);
        let inv = smith_normal_form(&full);
        if !inv.all_ones() || full.rows() != full.cols() {
            return Err(Error::NotStable);
        }
        // full^{-1} = right * left (diagonal is the identity)
        let full_inv = inv.right.mul(&inv.left);
        let proj = full_inv.select_rows(&complement);
        let gens = self.group.generators();
        let mut mats = Vec::with_capacity(gens.len());
        for &s in &gens {
            mats.push(proj.mul(&self.rho[s]).mul(&c));
        }
        let q = ZGLattice::from_generators(self.group.clone(), n - k, &gens, &mats)?;
        let map = LatticeMap::new(self.clone(), q.clone(), proj)?;
        // stability of L: projection must kill the image of every generator on L
        for &s in &gens {
            if !map.matrix.mul(&self.rho[s]).mul(basis).is_zero() {
                return Err(Error::NotStable);
            }
        }
        Ok((q, map))
    }
}

/// `Z[X]` with the group permuting the basis.
pub fn permutation_lattice<T: IntScalar>(x: &GSet) -> ZGLattice<T> {
    let rho = x.action().iter().map(|perm| Matrix::permutation(perm)).collect();
    ZGLattice::new_unchecked(x.group().clone(), rho, x.size())
}

/// `Z[G/H]`.
pub fn induced_lattice<T: IntScalar>(g: &GroupRef, h: &[usize]) -> Result<ZGLattice<T>> {
    Ok(permutation_lattice(&coset_gset(g, h)?))
}

/// The saturated solution lattice of `equations * x = 0` (one equation per row).
pub fn equivariant_sublattice<T: IntScalar>(
    m: &ZGLattice<T>,
    equations: &Matrix<T>,
) -> Result<(ZGLattice<T>, LatticeMap<T>)> {
    assert_eq!(equations.cols(), m.rank(), "equation width must equal the rank");
    m.sublattice(&kernel_basis(equations))
}

#[derive(Clone, Debug)]
pub struct LatticeMap<T = Int> {
    pub source: ZGLattice<T>,
    pub target: ZGLattice<T>,
    /// `target.rank × source.rank`
    pub matrix: Matrix<T>,
}

impl<T: IntScalar> LatticeMap<T> {
    pub fn new(source: ZGLattice<T>, target: ZGLattice<T>, matrix: Matrix<T>) -> Result<Self> {
        if !same_group(&source.group, &target.group) {
            return Err(Error::IncompatibleActions("source and target groups differ".into()));
        }
        if matrix.rows() != target.rank || matrix.cols() != source.rank {
            return Err(Error::NotEquivariant(format!(
                "matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.rank,
                source.rank
            )));
        }
        for s in source.group.generators() {
            if matrix.mul(&source.rho[s]) != target.rho[s].mul(&matrix) {
                return Err(Error::NotEquivariant(format!("fails for generator {s}")));
            }
        }
        Ok(LatticeMap { source, target, matrix })
    }

    pub fn identity(m: &ZGLattice<T>) -> Self {
        LatticeMap { source: m.clone(), target: m.clone(), matrix: Matrix::identity(m.rank) }
    }

    /// `after ∘ self`.
    pub fn then(&self, after: &LatticeMap<T>) -> Result<Self> {
        if after.source.rank != self.target.rank || !same_group(&after.source.group, &self.target.group) {
            return Err(Error::NotComposable("target of first map is not source of second".into()));
        }
        Ok(LatticeMap {
            source: self.source.clone(),
            target: after.target.clone(),
            matrix: after.matrix.mul(&self.matrix),
        })
    }

    pub fn kernel(&self) -> Result<(ZGLattice<T>, LatticeMap<T>)> {
        self.source.sublattice(&kernel_basis(&self.matrix))
    }

    /// Saturation of the image.
    pub fn saturated_image(&self) -> Result<(ZGLattice<T>, LatticeMap<T>)> {
        self.target.sublattice(&saturation(&self.matrix))
    }
}

/// One interior joint `A --f--> B --g--> C` of a chain.
#[derive(Clone, Debug, Serialize)]
pub struct JointReport {
    /// index of `f` in the chain
    pub position: usize,
    pub composite_zero: bool,
    pub saturated_equal: bool,
    pub subgroup_equal: bool,
    /// invariants of `ker g / im f` when the ranks agree (empty means equal)
    pub torsion: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExactnessReport {
    pub joints: Vec<JointReport>,
    pub first_injective: bool,
    pub last_surjective: bool,
    /// cokernel of the last map is finite
    pub last_surjective_rationally: bool,
    /// `0 → A0 → … → An → 0` is exact over Z
    pub exact: bool,
    /// exact after saturating every image
    pub exact_saturated: bool,
}

/// Exactness of `0 → A0 → A1 → … → An → 0` for a chain of composable maps.
pub fn is_exact<T: IntScalar>(seq: &[LatticeMap<T>]) -> Result<ExactnessReport> {
    if seq.is_empty() {
        return Err(Error::NotComposable("empty chain".into()));
    }
    for (i, w) in seq.windows(2).enumerate() {
        if w[0].target.rank != w[1].source.rank || !same_group(&w[0].target.group, &w[1].source.group) {
            return Err(Error::NotComposable(format!("maps {i} and {}", i + 1)));
        }
    }
    let mut joints = Vec::new();
    for (i, w) in seq.windows(2).enumerate() {
        let (f, g) = (&w[0], &w[1]);
        let composite_zero = g.matrix.mul(&f.matrix).is_zero();
        let ker = kernel_basis(&g.matrix);
        let im = &f.matrix;
        let saturated_equal = same_span(&saturation(im), &ker);
        let subgroup_equal = same_span(im, &ker);
        let mut torsion = Vec::new();
        if saturated_equal && !subgroup_equal {
            // coordinates of im inside ker, then elementary divisors
            if let Some(coords) = solve_matrix(&ker, im) {
                torsion = smith_normal_form(&coords)
                    .diagonal
                    .iter()
                    .filter(|d| !d.is_one())
                    .map(|d| d.to_string())
                    .collect();
            }
        }
        joints.push(JointReport { position: i, composite_zero, saturated_equal, subgroup_equal, torsion });
    }
    let first = &seq[0];
    let first_injective = kernel_basis(&first.matrix).cols() == 0;
    let last = seq.last().unwrap();
    let snf = smith_normal_form(&last.matrix);
    let last_surjective_rationally = snf.rank() == last.target.rank;
    let last_surjective = last_surjective_rationally && snf.diagonal.iter().take(snf.rank()).all(|d| d.is_one());
    let exact = first_injective && last_surjective && joints.iter().all(|j| j.composite_zero && j.subgroup_equal);
    let exact_saturated =
        first_injective && last_surjective_rationally && joints.iter().all(|j| j.composite_zero && j.saturated_equal);
    Ok(ExactnessReport { joints, first_injective, last_surjective, last_surjective_rationally, exact, exact_saturated })
}

/// An equivariant map is an isomorphism iff it is square with unit elementary divisors.
pub fn is_equivariant_iso<T: IntScalar>(f: &LatticeMap<T>) -> bool {
    f.matrix.is_square() && smith_normal_form(&f.matrix).all_ones()
}

/// Checks equivariance of a raw matrix without constructing a map.
pub fn is_equivariant<T: IntScalar>(source: &ZGLattice<T>, target: &ZGLattice<T>, matrix: &Matrix<T>) -> bool {
    LatticeMap::new(source.clone(), target.clone(), matrix.clone()).is_ok()
}

/// The subgroup of `G` acting trivially.
pub fn kernel_of_action<T: IntScalar>(m: &ZGLattice<T>) -> ElementSet {
    m.group.elements().filter(|&g| m.rho[g].is_identity()).collect()
}
