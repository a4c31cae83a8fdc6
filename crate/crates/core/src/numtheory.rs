//! Prime splitting in number fields (Dedekind) and in abelian fields (Frobenius orders),
//! norm-image valuations, and Mittag-Leffler failure certificates for towers of norm maps.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{class_fiber, HeisenbergGroup};
use crate::poly::{self, factor_mod_p, is_prime, powmod, primes_from, z_from_i64, z_mul, DEFAULT_SEED};

/// A number field `ℚ[x]/(f)` with `f` monic irreducible.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NumberFieldDatum {
    poly: Vec<i64>,
}

impl NumberFieldDatum {
    pub fn new(mut poly: Vec<i64>) -> Result<Self> {
        while poly.last() == Some(&0) {
            poly.pop();
        }
        if poly.len() > 25 {
            return Err(Error::InvalidPolynomial("degree above 24".into()));
        }
        if !poly::is_irreducible(&poly)? {
            return Err(Error::InvalidPolynomial(format!("{} is reducible", poly::format_poly(&poly))));
        }
        Ok(NumberFieldDatum { poly })
    }

    pub fn poly(&self) -> &[i64] {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.poly.len() - 1
    }
}

/// `(e_i, f_i)` for the primes above `p`, sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplittingType {
    pub pairs: Vec<(u64, u64)>,
}

impl SplittingType {
    fn new(mut pairs: Vec<(u64, u64)>) -> Self {
        pairs.sort_unstable();
        SplittingType { pairs }
    }

    pub fn degree(&self) -> u64 {
        self.pairs.iter().map(|(e, f)| e * f).sum()
    }

    pub fn splits_completely(&self) -> bool {
        self.pairs.iter().all(|&(e, f)| e == 1 && f == 1)
    }

    pub fn is_inert(&self) -> bool {
        self.pairs.len() == 1 && self.pairs[0].0 == 1
    }
}

/// Splitting type of `p` from the factorization of `f mod p`, after the Dedekind index test.
pub fn dedekind_split(field: &NumberFieldDatum, p: u64) -> Result<SplittingType> {
    dedekind_split_seeded(field, p, DEFAULT_SEED)
}

pub fn dedekind_split_seeded(field: &NumberFieldDatum, p: u64, seed: u64) -> Result<SplittingType> {
    let f = field.poly();
    let fac = factor_mod_p(f, p, seed)?;
    // f = g h + p F with g = ∏ g_i, h = ∏ g_i^(e_i - 1); p ∤ index iff gcd(F, g, h) = 1 mod p
    let mut g = vec![1u64];
    let mut h = vec![1u64];
    for (gi, m) in &fac.factors {
        g = poly::fp_mul(&g, gi, p);
        for _ in 1..*m {
            h = poly::fp_mul(&h, gi, p);
        }
    }
    let lift = |v: &[u64]| -> Vec<num_bigint::BigInt> { v.iter().map(|&c| c.into()).collect() };
    let gh = z_mul(&lift(&g), &lift(&h));
    let fz = z_from_i64(f);
    let n = fz.len().max(gh.len());
    let zero = num_bigint::BigInt::from(0);
    let big_p = num_bigint::BigInt::from(p);
    let big_f: Vec<u64> = (0..n)
        .map(|i| {
            let d = fz.get(i).unwrap_or(&zero) - gh.get(i).unwrap_or(&zero);
            debug_assert!((&d % &big_p) == zero);
            u64::try_from((d / &big_p).mod_floor(&big_p)).unwrap()
        })
        .collect();
    let mut big_f = big_f;
    while big_f.last() == Some(&0) {
        big_f.pop();
    }
    let common = poly::fp_gcd(&poly::fp_gcd(&big_f, &g, p), &h, p);
    if common != [1] {
        return Err(Error::IndexDivisor(p));
    }
    let pairs = fac.factors.iter().map(|(gi, m)| (*m as u64, (gi.len() - 1) as u64)).collect();
    Ok(SplittingType::new(pairs))
}

fn totient(m: u64) -> u64 {
    (1..=m).filter(|&u| u.gcd(&m) == 1).count() as u64
}

fn units(m: u64) -> impl Iterator<Item = u64> {
    (1..=m.max(1)).map(move |u| u % m.max(1)).filter(move |&u| u.gcd(&m) == 1 || m == 1)
}

/// Subfield of `ℚ(ζ_m)` fixed by a subgroup `H ⊆ (ℤ/m)^×`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianFieldDatum {
    conductor: u64,
    subgroup: Vec<u64>,
}

/// Conductors up to this size can be enumerated for containment checks.
const MAX_ENUMERATED_CONDUCTOR: u64 = 5_000_000;

impl AbelianFieldDatum {
    pub fn new(conductor: u64, subgroup: Vec<u64>) -> Result<Self> {
        if conductor == 0 || conductor > MAX_ENUMERATED_CONDUCTOR {
            return Err(Error::InvalidField(format!("conductor {conductor} out of range")));
        }
        let m = conductor;
        let mut h: Vec<u64> = subgroup.into_iter().map(|u| u % m).collect();
        h.sort_unstable();
        h.dedup();
        if m == 1 {
            h = vec![0];
        }
        if m > 1 && (h.is_empty() || h.iter().any(|&u| u.gcd(&m) != 1)) {
            return Err(Error::InvalidField("subgroup must consist of units".into()));
        }
        if !h.contains(&(1 % m)) {
            return Err(Error::InvalidField("subgroup must contain 1".into()));
        }
        // grow the generated subgroup one generator at a time; it must never leave h
        let mut inside = vec![false; m as usize];
        let mut grown = vec![1 % m];
        inside[(1 % m) as usize] = true;
        for &g in &h {
            if inside[g as usize] {
                continue;
            }
            let mut i = 0;
            while i < grown.len() {
                let y = grown[i] * g % m;
                if !inside[y as usize] {
                    if h.binary_search(&y).is_err() {
                        return Err(Error::InvalidField(format!("{}*{g} escapes the subgroup", grown[i])));
                    }
                    inside[y as usize] = true;
                    grown.push(y);
                }
                i += 1;
            }
        }
        Ok(AbelianFieldDatum { conductor, subgroup: h })
    }

    /// `H` generated by `gens`.
    pub fn from_generators(conductor: u64, gens: &[u64]) -> Result<Self> {
        let m = conductor.max(1);
        let mut h = vec![1 % m];
        let mut seen = std::collections::HashSet::from([1 % m]);
        let mut frontier = vec![1 % m];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = x * (g % m) % m;
                if seen.insert(y) {
                    h.push(y);
                    frontier.push(y);
                }
            }
        }
        Self::new(conductor, h)
    }

    pub fn rationals() -> Self {
        AbelianFieldDatum { conductor: 1, subgroup: vec![0] }
    }

    pub fn cyclotomic(m: u64) -> Result<Self> {
        Self::new(m, vec![1 % m.max(1)])
    }

    /// `ℚ(ζ_m)^+`, fixed by `±1`.
    pub fn real_cyclotomic(m: u64) -> Result<Self> {
        Self::new(m, vec![1 % m.max(1), m - 1])
    }

    /// The degree-`d` subfield of `ℚ(ζ_q)`, `q` prime: `H` is the group of `d`-th powers.
    pub fn prime_cyclic(q: u64, d: u64) -> Result<Self> {
        if !is_prime(q) || d == 0 || !(q - 1).is_multiple_of(d) {
            return Err(Error::InvalidField(format!("need q prime and d | q-1 (q = {q}, d = {d})")));
        }
        let h: Vec<u64> = (1..q).map(|u| powmod(u, d, q)).collect();
        Self::new(q, h)
    }

    /// `ℚ(√d)` for squarefree `d ≠ 0, 1`, via the Kronecker character of its discriminant.
    pub fn quadratic(d: i64) -> Result<Self> {
        if d == 0 || d == 1 || !squarefree(d.unsigned_abs()) {
            return Err(Error::InvalidField(format!("{d} is not a squarefree integer other than 0, 1")));
        }
        let disc = if d.rem_euclid(4) == 1 { d } else { 4 * d };
        let m = disc.unsigned_abs();
        let h = units(m).filter(|&u| kronecker(disc, u) == 1).collect();
        Self::new(m, h)
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn subgroup(&self) -> &[u64] {
        &self.subgroup
    }

    pub fn degree(&self) -> u64 {
        if self.conductor == 1 {
            return 1;
        }
        totient(self.conductor) / self.subgroup.len() as u64
    }

    pub fn in_subgroup(&self, u: u64) -> bool {
        self.conductor == 1 || self.subgroup.binary_search(&(u % self.conductor)).is_ok()
    }

    /// Whether `other ⊆ self`: on the common conductor, the kernel of `self` lies in that of `other`.
    pub fn contains(&self, other: &AbelianFieldDatum) -> Result<bool> {
        let m = self.conductor.lcm(&other.conductor);
        if m > MAX_ENUMERATED_CONDUCTOR {
            return Err(Error::NotATower(format!("common conductor {m} too large to compare")));
        }
        Ok(units(m).all(|u| !self.in_subgroup(u) || other.in_subgroup(u)))
    }

    /// Order of `p` in `(ℤ/m)^× / H`.
    pub fn residue_degree(&self, p: u64) -> Result<u64> {
        let m = self.conductor;
        if m > 1 && m.is_multiple_of(p) {
            let tame_e = (is_prime(m)).then(|| self.degree());
            return Err(Error::Ramified { p, conductor: m, tame_e });
        }
        let mut x = p % m.max(1);
        let mut f = 1;
        while !self.in_subgroup(x) {
            x = x * (p % m) % m;
            f += 1;
        }
        Ok(f)
    }
}

fn squarefree(n: u64) -> bool {
    (2..).take_while(|q| q * q <= n).all(|q| !n.is_multiple_of(q * q))
}

/// Kronecker symbol `(a / n)`.
pub fn kronecker(a: i64, n: u64) -> i64 {
    if n == 0 {
        return (a.abs() == 1) as i64;
    }
    let mut n = n;
    let mut result = 1i64;
    while n.is_multiple_of(2) {
        n /= 2;
        let r = a.rem_euclid(8);
        if a % 2 == 0 {
            return 0;
        }
        if r == 3 || r == 5 {
            result = -result;
        }
    }
    // Jacobi symbol (a / n), n odd
    let mut a = a.rem_euclid(n as i64) as u64;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Splitting of an unramified `p` in an abelian field: `f` = Frobenius order, all `e = 1`.
pub fn abelian_split(a: &AbelianFieldDatum, p: u64) -> Result<SplittingType> {
    let f = a.residue_degree(p)?;
    let g = a.degree() / f;
    Ok(SplittingType::new(vec![(1, f); g as usize]))
}

/// `ord_p(Nm E^×) = g ℤ` with `g` the gcd of the residue degrees.
pub fn norm_image_valuation(split: &SplittingType) -> u64 {
    split.pairs.iter().fold(0, |g, &(_, f)| g.gcd(&f))
}

/// Index of the `l`-th powers in `(ℤ/p)^×`: the residue-field shadow of the norm image of units from
/// a tame totally ramified degree-`l` extension of `ℚ_p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalObstruction {
    pub l: u64,
    pub p: u64,
    pub lth_powers: u64,
    pub index: u64,
}

pub fn p13_local_obstruction(l: u64, p: u64) -> Result<LocalObstruction> {
    if !is_prime(l) || l == 2 {
        return Err(Error::HypothesisFailed(format!("{l} is not an odd prime")));
    }
    if !is_prime(p) || !(p - 1).is_multiple_of(l) {
        return Err(Error::HypothesisFailed(format!("{l} does not divide {p} - 1")));
    }
    let mut seen = vec![false; p as usize];
    for u in 1..p {
        seen[powmod(u, l, p) as usize] = true;
    }
    let lth_powers = seen.iter().filter(|&&b| b).count() as u64;
    Ok(LocalObstruction { l, p, lth_powers, index: (p - 1) / lth_powers })
}

/// Group-theoretic bookkeeping behind the construction of a degree-`l^3` field with group `G`
/// of order `l^3` and exponent `l`.
#[derive(Clone, Debug, Serialize)]
pub struct SkeletonReport {
    pub l: usize,
    pub order: usize,
    pub exponent: usize,
    pub center_order: usize,
    pub kernel_is_center: bool,
    pub quotient_order: usize,
    pub fiber_class_sizes: Vec<usize>,
    pub centralizer_orders: Vec<usize>,
    /// `[G : ⟨b, aʲc⟩]`, the degree over ℚ of the fixed field of each centralizer.
    pub block_indices: Vec<usize>,
}

pub fn scholz_reichardt_skeleton(l: usize) -> Result<SkeletonReport> {
    let h = HeisenbergGroup::new(l)?;
    let g = h.group().clone();
    let kernel = h.b_subgroup();
    let (q, _) = g.quotient(&kernel)?;
    let project = &h.product.project;
    let fibers = class_fiber(project, &[project.apply(h.c)])?;
    let centralizers: Vec<_> = (0..l).map(|j| g.centralizer(h.element(0, j, 1))).collect();
    let block_indices = (0..l)
        .map(|j| g.order() / g.generated(&[h.b, h.element(0, j, 1)]).len())
        .collect();
    Ok(SkeletonReport {
        l,
        order: g.order(),
        exponent: g.exponent(),
        center_order: g.center().len(),
        kernel_is_center: g.center() == kernel,
        quotient_order: q.order(),
        fiber_class_sizes: fibers.iter().map(|c| c.len()).collect(),
        centralizer_orders: centralizers.iter().map(|c| c.len()).collect(),
        block_indices,
    })
}

// ---------- towers ----------

/// How the levels `F_0 ⊆ F_1 ⊆ …` of a norm tower are produced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum TowerLaw {
    /// Finitely many explicit levels; nothing is known past the last one.
    Explicit { fields: Vec<AbelianFieldDatum> },
    /// `F_n` = the degree-`l^n` subfield of `ℚ(ζ_{l^{n+1}})`, `l` odd.
    CyclotomicLPower { l: u64 },
    /// `F_0` = degree-`l` subfield of conductor `p0`; `F_n = F_{n-1} · K_n` with `K_n` the degree-`l`
    /// subfield of conductor `q_n`, `q_n` the least prime `≡ 1 (mod l)` splitting completely in
    /// `F_{n-1}(ζ_l, p0^{1/l})`.
    ScholzReichardt { l: u64, p0: u64 },
    /// Étale algebras `∏ ℚ^{d}` whose transitions are split onto every block of the level below:
    /// `sections[n][i]` is a block of level `n+1` mapping isomorphically to block `i` of level `n`.
    SplitBlocks { degrees: Vec<Vec<u64>>, sections: Vec<Vec<Option<usize>>> },
}

/// At base level 0 and a prime `v | prime`: `ord_v` of the norm image from level `level - 1` is
/// `before ℤ`, from level `level` it is `after ℤ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValuationStep {
    pub level: usize,
    pub prime: u64,
    pub before: u64,
    pub after: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerCertificate {
    pub base_level: usize,
    pub steps: Vec<ValuationStep>,
    /// Why the steps continue past the last one listed.
    pub law: String,
    /// Conductor primes of the layers (Scholz–Reichardt towers only).
    pub layer_conductors: Vec<u64>,
    pub local_obstructions: Vec<LocalObstruction>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum TowerOutcome {
    Fails { certificate: TowerCertificate },
    Holds { level: usize, reason: String },
    NoFailureFound { horizon: usize, evidence: Vec<ValuationStep> },
}

/// Levels past this point of a Scholz–Reichardt tower are covered by the law, not by search.
pub const MAX_SEARCHED_LAYERS: usize = 6;

/// Primes scanned per explicit tower.
const SCAN_PRIMES: usize = 200;

/// Compositum of prime-conductor degree-`l` layers.
#[derive(Clone, Debug)]
pub struct CompositeField {
    pub layers: Vec<AbelianFieldDatum>,
}

impl CompositeField {
    /// Frobenius order in `∏ Gal(K_i)`: the lcm of the layer residue degrees.
    pub fn residue_degree(&self, p: u64) -> Result<u64> {
        self.layers.iter().try_fold(1u64, |acc, k| Ok(acc.lcm(&k.residue_degree(p)?)))
    }

    /// As a single `(conductor, H)` datum, when the conductor is small enough to enumerate.
    pub fn materialize(&self) -> Result<AbelianFieldDatum> {
        let m = self
            .layers
            .iter()
            .try_fold(1u64, |acc, k| acc.checked_mul(k.conductor() / acc.gcd(&k.conductor())))
            .filter(|&m| m <= MAX_ENUMERATED_CONDUCTOR);
        let Some(m) = m else {
            return Err(Error::NotMaterializable("compositum conductor too large".into()));
        };
        if m > MAX_ENUMERATED_CONDUCTOR {
            return Err(Error::NotMaterializable(format!("compositum conductor {m}")));
        }
        let h = units(m).filter(|&u| self.layers.iter().all(|k| k.in_subgroup(u))).collect();
        AbelianFieldDatum::new(m, h)
    }
}

fn is_lth_power(x: u64, l: u64, q: u64) -> bool {
    powmod(x, (q - 1) / l, q) == 1
}

/// The layer conductors `p0 = q_0, q_1, …, q_count` of a Scholz–Reichardt tower.
pub fn scholz_reichardt_conductors(l: u64, p0: u64, count: usize) -> Result<Vec<u64>> {
    if !is_prime(l) || l == 2 {
        return Err(Error::HypothesisFailed(format!("{l} is not an odd prime")));
    }
    if !is_prime(p0) || !(p0 - 1).is_multiple_of(l) {
        return Err(Error::HypothesisFailed(format!("need p0 prime with {l} | p0 - 1, got {p0}")));
    }
    let mut qs = vec![p0];
    let mut candidates = primes_from(p0 + 1);
    while qs.len() <= count {
        let q = candidates
            .find(|&q| (q - 1) % l == 0 && is_lth_power(p0, l, q) && qs.iter().all(|&qj| is_lth_power(q, l, qj)))
            .expect("infinitely many primes");
        qs.push(q);
    }
    Ok(qs)
}

fn pick_step_prime(l: u64, qs: &[u64]) -> u64 {
    let (new, old) = qs.split_last().unwrap();
    primes_from(2)
        .find(|&r| {
            !qs.contains(&r) && r != l && old.iter().all(|&qj| is_lth_power(r, l, qj)) && !is_lth_power(r, l, *new)
        })
        .expect("Dirichlet")
}

/// `F_n` of [`TowerLaw::CyclotomicLPower`] as an explicit datum (small levels only).
pub fn cyclotomic_l_layer(l: u64, n: u32) -> Result<AbelianFieldDatum> {
    let m = l.pow(n + 1);
    let h = units(m).filter(|&u| powmod(u, l - 1, m) == 1).collect();
    AbelianFieldDatum::new(m, h)
}

/// Residue degree of `p` in the degree-`l^n` layer: the order of `p^{l-1}` mod `l^{n+1}`.
fn cyclotomic_l_residue_degree(l: u64, n: u32, p: u64) -> u64 {
    let m = l.pow(n + 1);
    let base = powmod(p, l - 1, m);
    let mut f = 1;
    while powmod(base, f, m) != 1 {
        f *= l;
    }
    f
}

/// Largest `n` with `l^{n+1}` representable.
fn cyclotomic_l_max_level(l: u64) -> usize {
    let mut n = 0;
    while l.checked_pow(n as u32 + 2).is_some_and(|m| m < (1 << 62)) {
        n += 1;
    }
    n
}

/// Searches for a prime at which the norm-image valuations of the tower grow without bound.
///
/// `horizon` bounds the number of levels examined. Explicit towers are finite lists, so they can
/// exhibit growth but never certify it; only towers with a symbolic law can fail.
pub fn norm_tower_certificate(law: &TowerLaw, horizon: usize) -> Result<TowerOutcome> {
    match law {
        TowerLaw::Explicit { fields } => explicit_tower(fields, horizon),
        TowerLaw::CyclotomicLPower { l } => {
            let l = *l;
            if !is_prime(l) || l == 2 {
                return Err(Error::NotATower(format!("{l} is not an odd prime")));
            }
            if horizon == 0 {
                return Ok(TowerOutcome::NoFailureFound { horizon, evidence: vec![] });
            }
            // p a primitive root mod l^2 stays primitive mod every l^k, so p is inert at every level
            let p = primes_from(2)
                .find(|&p| p != l && is_primitive_root(p, l * l))
                .expect("primitive roots exist");
            let top = horizon.min(cyclotomic_l_max_level(l));
            let steps = (1..=top)
                .map(|n| ValuationStep {
                    level: n,
                    prime: p,
                    before: cyclotomic_l_residue_degree(l, n as u32 - 1, p),
                    after: cyclotomic_l_residue_degree(l, n as u32, p),
                })
                .collect();
            Ok(TowerOutcome::Fails {
                certificate: TowerCertificate {
                    base_level: 0,
                    steps,
                    law: format!(
                        "{p} is a primitive root mod {}, hence mod {l}^k for all k: inert at every level, valuations {l}^n",
                        l * l
                    ),
                    layer_conductors: vec![],
                    local_obstructions: vec![],
                },
            })
        }
        TowerLaw::ScholzReichardt { l, p0 } => {
            let (l, p0) = (*l, *p0);
            if horizon == 0 {
                scholz_reichardt_conductors(l, p0, 0).map_err(|e| Error::NotATower(e.to_string()))?;
                return Ok(TowerOutcome::NoFailureFound { horizon, evidence: vec![] });
            }
            let top = horizon.min(MAX_SEARCHED_LAYERS);
            let qs = scholz_reichardt_conductors(l, p0, top).map_err(|e| Error::NotATower(e.to_string()))?;
            let steps = (1..=top)
                .map(|n| {
                    let r = pick_step_prime(l, &qs[..=n]);
                    ValuationStep { level: n, prime: r, before: 1, after: l }
                })
                .collect();
            let local_obstructions = qs[1..].iter().map(|&q| p13_local_obstruction(l, q)).collect::<Result<_>>()?;
            Ok(TowerOutcome::Fails {
                certificate: TowerCertificate {
                    base_level: 0,
                    steps,
                    law: format!(
                        "at every level n the conductor q_n and a prime r_n split completely in F_(n-1) with r_n \
                         inert in the new degree-{l} layer exist by Chebotarev; ord at r_n drops from Z to {l}Z"
                    ),
                    layer_conductors: qs,
                    local_obstructions,
                },
            })
        }
        TowerLaw::SplitBlocks { degrees, sections } => {
            if sections.len() + 1 != degrees.len() && !(degrees.is_empty() && sections.is_empty()) {
                return Err(Error::NotATower("need one section list per transition".into()));
            }
            for (n, sec) in sections.iter().enumerate() {
                if sec.len() != degrees[n].len() {
                    return Err(Error::NotATower(format!("level {n}: one section entry per block")));
                }
                for (i, s) in sec.iter().enumerate() {
                    match s {
                        Some(j) if degrees[n + 1].get(*j) == Some(&degrees[n][i]) => {}
                        Some(j) => return Err(Error::NotATower(format!("level {n}: block {j} is not a section of {i}"))),
                        None => return Ok(TowerOutcome::NoFailureFound { horizon, evidence: vec![] }),
                    }
                }
            }
            Ok(TowerOutcome::Holds {
                level: 0,
                reason: "every block is a direct factor of the level above: transitions are surjective".into(),
            })
        }
    }
}

fn is_primitive_root(g: u64, m: u64) -> bool {
    let phi = totient(m);
    g.gcd(&m) == 1 && (1..phi).filter(|d| phi.is_multiple_of(*d)).all(|d| powmod(g, d, m) != 1)
}

fn explicit_tower(fields: &[AbelianFieldDatum], horizon: usize) -> Result<TowerOutcome> {
    for (n, w) in fields.windows(2).enumerate() {
        if !w[1].contains(&w[0])? {
            return Err(Error::NotATower(format!("level {} does not contain level {n}", n + 1)));
        }
    }
    let levels = &fields[..fields.len().min(horizon + 1)];
    if fields.windows(2).all(|w| w[0].degree() == w[1].degree()) {
        return Ok(TowerOutcome::Holds { level: 0, reason: "constant tower".into() });
    }
    let conductor_primes: Vec<u64> = levels.iter().map(|k| k.conductor()).collect();
    let mut best: Vec<ValuationStep> = vec![];
    for p in primes_from(2).filter(|p| conductor_primes.iter().all(|m| m % p != 0)).take(SCAN_PRIMES) {
        let f0 = levels[0].residue_degree(p)?;
        let mut steps = vec![];
        let mut prev = 1;
        for (n, k) in levels.iter().enumerate().skip(1) {
            let v = k.residue_degree(p)? / f0;
            if v > prev {
                steps.push(ValuationStep { level: n, prime: p, before: prev, after: v });
            }
            prev = v;
        }
        if steps.len() > best.len() {
            best = steps;
        }
    }
    Ok(TowerOutcome::NoFailureFound { horizon: levels.len().saturating_sub(1), evidence: best })
}

/// Recomputes every step of a certificate from the law alone.
pub fn replay_certificate(law: &TowerLaw, cert: &TowerCertificate) -> Result<bool> {
    match law {
        TowerLaw::CyclotomicLPower { l } => Ok(cert.steps.iter().all(|s| {
            let small = l.checked_pow(s.level as u32 + 1).is_some_and(|m| m <= 100_000);
            let direct = |n: usize| -> Result<u64> {
                let k = cyclotomic_l_layer(*l, n as u32)?;
                abelian_split(&k, s.prime).map(|t| norm_image_valuation(&t))
            };
            let ok_symbolic = cyclotomic_l_residue_degree(*l, s.level as u32 - 1, s.prime) == s.before
                && cyclotomic_l_residue_degree(*l, s.level as u32, s.prime) == s.after
                && s.after > s.before;
            let ok_direct = !small || (direct(s.level - 1).ok() == Some(s.before) && direct(s.level).ok() == Some(s.after));
            ok_symbolic && ok_direct
        })),
        TowerLaw::ScholzReichardt { l, p0 } => {
            let l = *l;
            let qs = scholz_reichardt_conductors(l, *p0, cert.steps.len())?;
            if qs != cert.layer_conductors {
                return Ok(false);
            }
            let layers: Vec<AbelianFieldDatum> = qs.iter().map(|&q| AbelianFieldDatum::prime_cyclic(q, l)).collect::<Result<_>>()?;
            for s in &cert.steps {
                let before = CompositeField { layers: layers[..s.level].to_vec() };
                let after = CompositeField { layers: layers[..=s.level].to_vec() };
                let base = CompositeField { layers: layers[..1].to_vec() };
                let f0 = base.residue_degree(s.prime)?;
                if before.residue_degree(s.prime)? / f0 != s.before || after.residue_degree(s.prime)? / f0 != s.after {
                    return Ok(false);
                }
                if s.after <= s.before {
                    return Ok(false);
                }
                // the new conductor splits completely below it
                if before.residue_degree(qs[s.level])? != 1 {
                    return Ok(false);
                }
            }
            Ok(cert.local_obstructions.iter().all(|o| p13_local_obstruction(o.l, o.p).as_ref() == Ok(o) && o.index == l))
        }
        _ => Ok(false),
    }
}

/// `(abelian datum, defining polynomial)` pairs describing the same field, for cross-checking the two
/// splitting oracles: quadratic fields, cyclotomic fields and their maximal real subfields with
/// conductor at most `max_conductor`, and degree at most 24.
pub fn abelian_field_catalog(max_conductor: u64) -> Result<Vec<(AbelianFieldDatum, NumberFieldDatum)>> {
    let mut out = Vec::new();
    for d in -(max_conductor as i64)..=(max_conductor as i64) {
        if d == 0 || d == 1 || !squarefree(d.unsigned_abs()) {
            continue;
        }
        let a = AbelianFieldDatum::quadratic(d)?;
        if a.conductor() > max_conductor {
            continue;
        }
        // the maximal order: x^2 - x + (1-d)/4 when d ≡ 1 mod 4
        let poly = if d.rem_euclid(4) == 1 { vec![(1 - d) / 4, -1, 1] } else { vec![-d, 0, 1] };
        out.push((a, NumberFieldDatum::new(poly)?));
    }
    for m in 3..=max_conductor {
        if m % 4 == 2 {
            continue;
        }
        let phi = totient(m);
        if phi <= 24 {
            out.push((AbelianFieldDatum::cyclotomic(m)?, NumberFieldDatum::new(poly::cyclotomic_poly(m))?));
        }
        if phi / 2 <= 24 && phi > 2 {
            let real = poly::trace_reduce(&poly::cyclotomic_poly(m))?;
            out.push((AbelianFieldDatum::real_cyclotomic(m)?, NumberFieldDatum::new(real)?));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cubic7() -> AbelianFieldDatum {
        AbelianFieldDatum::new(7, vec![1, 6]).unwrap()
    }

    #[test]
    fn dedekind_examples() {
        let k = NumberFieldDatum::new(vec![1, 0, 1]).unwrap();
        assert_eq!(dedekind_split(&k, 5).unwrap().pairs, vec![(1, 1), (1, 1)]);
        assert_eq!(dedekind_split(&k, 3).unwrap().pairs, vec![(1, 2)]);
        assert_eq!(dedekind_split(&k, 2).unwrap().pairs, vec![(2, 1)]);
        // Z[√5] has index 2 in the maximal order
        let k5 = NumberFieldDatum::new(vec![-5, 0, 1]).unwrap();
        assert_eq!(dedekind_split(&k5, 2), Err(Error::IndexDivisor(2)));
        assert!(NumberFieldDatum::new(vec![-4, 0, 1]).is_err());
    }

    #[test]
    fn abelian_examples() {
        let k = cubic7();
        assert_eq!(k.degree(), 3);
        assert_eq!(abelian_split(&k, 2).unwrap().pairs, vec![(1, 3)]);
        assert!(abelian_split(&k, 13).unwrap().splits_completely());
        assert!(abelian_split(&k, 29).unwrap().splits_completely());
        assert_eq!(abelian_split(&k, 7), Err(Error::Ramified { p: 7, conductor: 7, tame_e: Some(3) }));
        assert_eq!(AbelianFieldDatum::prime_cyclic(7, 3).unwrap(), k);
    }

    #[test]
    fn quadratic_character() {
        // Q(i): conductor 4, split iff p ≡ 1 mod 4
        let qi = AbelianFieldDatum::quadratic(-1).unwrap();
        assert_eq!((qi.conductor(), qi.subgroup().to_vec()), (4, vec![1]));
        let q5 = AbelianFieldDatum::quadratic(5).unwrap();
        assert_eq!(q5.subgroup(), &[1, 4]);
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(-3, 7), 1);
    }

    #[test]
    fn norm_valuations() {
        let t = |v: Vec<(u64, u64)>| SplittingType::new(v);
        assert_eq!(norm_image_valuation(&t(vec![(1, 1), (1, 1)])), 1);
        assert_eq!(norm_image_valuation(&t(vec![(1, 2)])), 2);
        assert_eq!(norm_image_valuation(&t(vec![(2, 1)])), 1);
        assert_eq!(norm_image_valuation(&t(vec![(1, 4), (1, 6)])), 2);
    }

    #[test]
    fn local_obstruction() {
        let o = p13_local_obstruction(3, 7).unwrap();
        assert_eq!((o.lth_powers, o.index), (2, 3));
        assert!(p13_local_obstruction(3, 5).is_err());
        assert_eq!(p13_local_obstruction(5, 11).unwrap().index, 5);
    }

    #[test]
    fn skeleton() {
        let r = scholz_reichardt_skeleton(3).unwrap();
        assert_eq!((r.order, r.exponent, r.center_order), (27, 3, 3));
        assert!(r.kernel_is_center);
        assert_eq!(r.fiber_class_sizes, vec![3, 3, 3]);
        assert_eq!(r.centralizer_orders, vec![9, 9, 9]);
        assert_eq!(r.block_indices, vec![3, 3, 3]);
    }

    #[test]
    fn cyclotomic_tower_fails_with_growing_valuations() {
        let law = TowerLaw::CyclotomicLPower { l: 3 };
        let TowerOutcome::Fails { certificate } = norm_tower_certificate(&law, 5).unwrap() else { panic!() };
        let after: Vec<u64> = certificate.steps.iter().map(|s| s.after).collect();
        assert_eq!(after, vec![3, 9, 27, 81, 243]);
        assert!(replay_certificate(&law, &certificate).unwrap());
        assert_eq!(cyclotomic_l_layer(3, 2).unwrap().degree(), 9);
    }

    #[test]
    fn scholz_reichardt_tower() {
        let law = TowerLaw::ScholzReichardt { l: 3, p0: 7 };
        let TowerOutcome::Fails { certificate } = norm_tower_certificate(&law, 3).unwrap() else { panic!() };
        let q1 = certificate.layer_conductors[1];
        assert_eq!(q1 % 3, 1);
        assert_eq!(powmod(7, (q1 - 1) / 3, q1), 1);
        assert!(cubic7().in_subgroup(q1));
        assert!(replay_certificate(&law, &certificate).unwrap());
        let mut forged = certificate.clone();
        forged.steps[0].after = 9;
        assert!(!replay_certificate(&law, &forged).unwrap());
        assert!(matches!(norm_tower_certificate(&law, 0).unwrap(), TowerOutcome::NoFailureFound { .. }));
    }

    #[test]
    fn explicit_towers() {
        let k = cubic7();
        let constant = TowerLaw::Explicit { fields: vec![k.clone(), k.clone(), k.clone()] };
        assert!(matches!(norm_tower_certificate(&constant, 32).unwrap(), TowerOutcome::Holds { .. }));
        let growing = TowerLaw::Explicit { fields: vec![AbelianFieldDatum::rationals(), k.clone()] };
        let TowerOutcome::NoFailureFound { evidence, .. } = norm_tower_certificate(&growing, 32).unwrap() else { panic!() };
        assert_eq!(evidence[0].after, 3);
        let bad = TowerLaw::Explicit { fields: vec![k, AbelianFieldDatum::quadratic(-1).unwrap()] };
        assert!(matches!(norm_tower_certificate(&bad, 32), Err(Error::NotATower(_))));
    }

    #[test]
    fn catalog_is_consistent() {
        let cat = abelian_field_catalog(30).unwrap();
        assert!(cat.iter().all(|(a, k)| a.degree() as usize == k.degree()));
        for (a, k) in &cat {
            for p in [101u64, 103, 107] {
                assert_eq!(abelian_split(a, p).unwrap(), dedekind_split(k, p).unwrap());
            }
        }
    }
}
