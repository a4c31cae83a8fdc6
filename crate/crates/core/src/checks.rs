//! The checklist of claims, each run end to end and reported with a verdict and replayable evidence.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cohomology::{act_on_cocycle, enumerate_cocycles, h1_nonabelian, shapiro_check, CrossedHom, GammaTower, DEFAULT_BUDGET};
use crate::corpus::{named_group, small_group_corpus};
use crate::error::{Error, Result};
use crate::gamma::{GammaGroup, GammaHom};
use crate::group::{FiniteGroup, GroupHom, GroupRef};
use crate::invsys::{lim1_classify, lim1_truncated, FiniteSystem, Lim1Verdict, SystemRecipe, DEFAULT_HORIZON};
use crate::numtheory::{
    abelian_field_catalog, abelian_split, dedekind_split_seeded, p13_local_obstruction, scholz_reichardt_skeleton, TowerLaw,
};
use crate::poly::{is_prime, DEFAULT_SEED};
use crate::serre::{cm_type_basis, cm_types, lemma_p4_verify, verify_e01, verify_e04, CMGaloisDatum, SBAR_CONDITION};
use crate::torsor::{verify_t4, GammaExtension, RelativeClass, TorsorRep};
use crate::cohomology::lim1_obstruction;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Config {
    pub horizon: usize,
    pub budget: u128,
    pub seed: u64,
    /// right-hand side of the defining condition of `X*(S̄^K)`
    pub sbar_condition: i64,
}

impl Default for Config {
    fn default() -> Self {
        Config { horizon: DEFAULT_HORIZON, budget: DEFAULT_BUDGET, seed: DEFAULT_SEED, sbar_condition: SBAR_CONDITION }
    }
}

impl Config {
    pub fn flags(&self) -> BTreeMap<String, String> {
        BTreeMap::from([
            ("budget".to_string(), self.budget.to_string()),
            ("horizon".to_string(), self.horizon.to_string()),
            ("sbar-condition".to_string(), self.sbar_condition.to_string()),
            ("seed".to_string(), self.seed.to_string()),
        ])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Verified,
    UnknownAtHorizon,
    Refuted,
    Error,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Verified => 0,
            Verdict::Refuted => 1,
            Verdict::UnknownAtHorizon => 2,
            Verdict::Error => 3,
        }
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Verified
        } else {
            Verdict::Refuted
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub claim: String,
    pub verdict: Verdict,
    pub evidence: Value,
    pub timing_ms: u64,
    pub version: String,
    pub flags: BTreeMap<String, String>,
}

impl Report {
    pub fn new(claim: &str, verdict: Verdict, evidence: Value, config: &Config, started: Instant) -> Self {
        Report {
            claim: claim.to_string(),
            verdict,
            evidence,
            timing_ms: started.elapsed().as_millis() as u64,
            version: VERSION.to_string(),
            flags: config.flags(),
        }
    }

    pub fn from_error(claim: &str, err: &Error, config: &Config, started: Instant) -> Self {
        Report::new(claim, Verdict::Error, json!({ "error": err.to_string() }), config, started)
    }
}

type Outcome = Result<(Verdict, Value)>;

/// One entry per acceptance criterion, in order.
pub const CRITERIA: &[(&str, &str)] = &[
    ("p12", "order l^3, exponent l, centre <b>, class fibre over {c}, centralizers of a^j c"),
    ("p4", "twisted X*(Sbar) is a permutation lattice sum_C Z[G/Z(sigma)]"),
    ("shapiro", "H^1(G, Z[G/H]) = 0 for all subgroups of the small-group corpus"),
    ("e04", "character lattices of the two norm sequences exact with ranks g+1, 2g+1, g"),
    ("z6", "psi_i and phi-bar form a basis of X*(S^K) for every CM type"),
    ("t4", "H^1(Gamma, ^P A) -> H^1(Gamma, B -> C; Q) is a bijection, neutral to base"),
    ("i1-truncated", "truncated lim^1 is one orbit; lim^1 obstruction independent of witnesses"),
    ("p13-towers", "lim^1 verdicts for subgroup chain, identity endomorphism and the degree-l tower"),
    ("splitting", "Dedekind splitting agrees with splitting in abelian fields"),
    ("lth-powers", "index of l-th powers in (Z/p)^x is l"),
    ("h1-products", "H^1 of a product of Gamma-groups is the product of the H^1s"),
];

pub fn run_check(id: &str, config: &Config) -> Report {
    let started = Instant::now();
    let outcome: Outcome = match id {
        "p12" => check_p12(),
        "p4" => check_p4(config),
        "shapiro" => check_shapiro(),
        "e04" => check_e04(),
        "z6" => check_z6(),
        "t4" => check_t4(config),
        "i1-truncated" => check_truncated(config),
        "p13-towers" => check_towers(config),
        "splitting" => check_splitting(config),
        "lth-powers" => check_lth_powers(),
        "h1-products" => check_h1_products(config),
        other => Err(Error::Parse(format!("unknown claim {other:?}"))),
    };
    match outcome {
        Ok((verdict, evidence)) => Report::new(id, verdict, evidence, config, started),
        Err(e) => Report::from_error(id, &e, config, started),
    }
}

/// Every criterion; an error in one entry does not stop the others.
pub fn suite_paper_checks(config: &Config) -> Report {
    let started = Instant::now();
    let entries: Vec<Report> = CRITERIA.iter().map(|(id, _)| run_check(id, config)).collect();
    let verdict = entries.iter().map(|r| r.verdict).max().unwrap_or(Verdict::Verified);
    Report::new("paper-checks", verdict, json!({ "entries": entries }), config, started)
}

fn grp(name: &str) -> Result<GroupRef> {
    Ok(Arc::new(named_group(name)?))
}

fn check_p12() -> Outcome {
    let mut ok = true;
    let mut ev = Vec::new();
    for l in [3usize, 5] {
        let s = scholz_reichardt_skeleton(l)?;
        let good = s.order == l.pow(3)
            && s.exponent == l
            && s.center_order == l
            && s.kernel_is_center
            && s.fiber_class_sizes == vec![l; l]
            && s.centralizer_orders.iter().all(|&o| o == l * l)
            && s.centralizer_orders.len() == l;
        ok &= good;
        ev.push(json!({ "l": l, "ok": good, "skeleton": s }));
    }
    Ok((Verdict::from_bool(ok), json!(ev)))
}

pub const P4_GROUPS: &[&str] = &["C1", "C2", "C3", "C2xC2", "S3", "D4"];

fn check_p4(config: &Config) -> Outcome {
    let mut ok = true;
    let mut ev = Vec::new();
    for name in P4_GROUPS {
        let r = lemma_p4_verify(&grp(name)?, config.sbar_condition)?;
        ok &= r.verified;
        ev.push(json!({
            "gamma_f": name,
            "verified": r.verified,
            "class_sizes": r.classes.iter().map(|c| c.size).collect::<Vec<_>>(),
            "maps_iso": [r.map_c1_to_c_iso, r.map_sbar_to_c1_iso],
            "permutation_iso": r.permutation_iso,
            "note": r.note,
        }));
    }
    Ok((Verdict::from_bool(ok), json!(ev)))
}

fn check_shapiro() -> Outcome {
    let mut ok = true;
    let mut groups = 0;
    let mut pairs = 0;
    let mut failures = Vec::new();
    for (name, g) in small_group_corpus(24) {
        groups += 1;
        for h in g.subgroups() {
            pairs += 1;
            if !shapiro_check(&g, &h)? {
                ok = false;
                failures.push(json!({ "group": name, "subgroup": h }));
            }
        }
    }
    Ok((Verdict::from_bool(ok), json!({ "groups": groups, "subgroup_pairs": pairs, "failures": failures })))
}

fn check_e04() -> Outcome {
    let mut ok = true;
    let mut data = Vec::new();
    for (name, d) in CMGaloisDatum::corpus(16) {
        let g = d.g();
        let e04 = verify_e04(&d)?;
        let e01 = verify_e01(&d)?;
        let good = e04.exact && e01.exact && e04.ranks == vec![g + 1, 2 * g + 1, g] && e01.ranks == vec![g, 2 * g, g];
        ok &= good;
        data.push(json!({ "datum": name, "e04_ranks": e04.ranks, "exact": good }));
    }
    Ok((Verdict::from_bool(ok), json!({ "data": data.len(), "entries": data })))
}

fn check_z6() -> Outcome {
    let mut ok = true;
    let mut types = 0;
    let mut failures = Vec::new();
    let mut data = 0;
    for (name, d) in CMGaloisDatum::corpus(12) {
        data += 1;
        for phi in cm_types(&d) {
            types += 1;
            let r = cm_type_basis(&d, &phi)?;
            if !(r.all_in_xs && r.is_basis && r.rank == d.g() + 1) {
                ok = false;
                failures.push(json!({ "datum": name, "phi": phi }));
            }
        }
    }
    Ok((Verdict::from_bool(ok), json!({ "data": data, "cm_types": types, "failures": failures })))
}

/// `Γ → S3` with image of order `|Γ|` for the three test groups.
fn conjugation_on_s3(gamma: &GroupRef, s3: &GroupRef) -> Result<GammaGroup> {
    let target_order = gamma.order();
    let gens = gamma.generators();
    // search images of the generators giving an injective homomorphism
    let n = s3.order();
    let mut images = vec![0; gens.len()];
    loop {
        if let Ok(h) = GroupHom::from_generators(gamma.clone(), s3.clone(), &gens, &images) {
            if h.image().len() == target_order {
                return Ok(GammaGroup::conjugation_via(&h));
            }
        }
        let mut i = 0;
        loop {
            if i == images.len() {
                return Err(Error::HypothesisFailed("no embedding into S3".into()));
            }
            images[i] += 1;
            if images[i] < n {
                break;
            }
            images[i] = 0;
            i += 1;
        }
    }
}

fn t4_sequences(gamma: &GroupRef) -> Result<Vec<(String, GammaExtension)>> {
    let s3 = grp("S3")?;
    let a3 = s3.subgroups().into_iter().find(|h| h.len() == 3).expect("S3 has A3");
    let c4 = grp("C4")?;
    let d4 = grp("D4")?;
    let c4_in_d4 = d4.subgroups().into_iter().find(|h| h.len() == 4 && h.iter().any(|&x| d4.element_order(x) == 4)).expect("D4 has C4");
    let c6 = grp("C6")?;
    let c2_in_c6 = c6.subgroups().into_iter().find(|h| h.len() == 2).expect("C6 has C2");
    let c3c3 = grp("C3xC3")?;
    let c3_in_c3c3 = c3c3.subgroups().into_iter().find(|h| h.len() == 3).expect("C3xC3 has C3");
    Ok(vec![
        ("1->C3->S3->C2->1 (trivial action)".into(), GammaExtension::from_normal_subgroup(&GammaGroup::trivial_action(gamma.clone(), s3.clone()), &a3)?),
        ("1->C3->S3->C2->1 (conjugation)".into(), GammaExtension::from_normal_subgroup(&conjugation_on_s3(gamma, &s3)?, &a3)?),
        ("1->C2->C4->C2->1".into(), GammaExtension::from_normal_subgroup(&GammaGroup::trivial_action(gamma.clone(), c4.clone()), &[0, 2])?),
        ("1->C4->D4->C2->1".into(), GammaExtension::from_normal_subgroup(&GammaGroup::trivial_action(gamma.clone(), d4), &c4_in_d4)?),
        ("1->C2->C6->C3->1".into(), GammaExtension::from_normal_subgroup(&GammaGroup::trivial_action(gamma.clone(), c6), &c2_in_c6)?),
        ("1->C3->C3xC3->C3->1".into(), GammaExtension::from_normal_subgroup(&GammaGroup::trivial_action(gamma.clone(), c3c3), &c3_in_c3c3)?),
    ])
}

fn check_t4(config: &Config) -> Outcome {
    let mut ok = true;
    let mut ev = Vec::new();
    for gname in ["C2", "C3", "S3"] {
        let gamma = grp(gname)?;
        let mut used = 0;
        for (label, seq) in t4_sequences(&gamma)? {
            // bases: representatives of distinct classes, else distinct cocycles
            let b = seq.b();
            let mut bases: Vec<CrossedHom> = h1_nonabelian(b, config.budget)?.classes;
            if bases.len() < 2 {
                let extra = enumerate_cocycles(b, config.budget)?.into_iter().find(|f| !bases.contains(f));
                bases.extend(extra);
            }
            // a sequence counts only with two bases; B with a single cocycle says nothing
            if bases.len() < 2 {
                continue;
            }
            used += 1;
            bases.truncate(3);
            for f in bases {
                let p = TorsorRep::new(b.clone(), f.clone())?;
                let q = TorsorRep::new(seq.c().clone(), f.push(&seq.v))?;
                let base = RelativeClass::new(seq.v.clone(), q, p)?;
                let r = verify_t4(&seq, &base, config.budget)?;
                let good = r.bijective && r.neutral_to_base;
                ok &= good;
                ev.push(json!({
                    "gamma": gname,
                    "sequence": label,
                    "base": f.values,
                    "twisted_h1": r.twisted_h1_size,
                    "relative_h1": r.relative_h1_size,
                    "bijective": r.bijective,
                    "neutral_to_base": r.neutral_to_base,
                }));
            }
        }
        ok &= used >= 3;
    }
    Ok((Verdict::from_bool(ok), json!(ev)))
}

fn random_hom(rng: &mut ChaCha8Rng, src: &GroupRef, tgt: &GroupRef) -> GroupHom {
    let gens = src.generators();
    for _ in 0..50 {
        let images: Vec<usize> = gens.iter().map(|_| rng.gen_range(0..tgt.order())).collect();
        if let Ok(h) = GroupHom::from_generators(src.clone(), tgt.clone(), &gens, &images) {
            return h;
        }
    }
    GroupHom { source: src.clone(), target: tgt.clone(), map: vec![tgt.identity(); src.order()] }
}

/// A random system of length 1..=5 over corpus groups of order ≤ 12, with a name per level.
pub fn random_system(rng: &mut ChaCha8Rng, pool: &[(&str, GroupRef)]) -> (Vec<String>, FiniteSystem) {
    let len = rng.gen_range(1..=5);
    let picks: Vec<usize> = (0..len).map(|_| rng.gen_range(0..pool.len())).collect();
    let groups: Vec<GroupRef> = picks.iter().map(|&i| pool[i].1.clone()).collect();
    let maps = (0..len - 1).map(|n| random_hom(rng, &groups[n + 1], &groups[n])).collect();
    let names = picks.iter().map(|&i| pool[i].0.to_string()).collect();
    (names, FiniteSystem::new(groups, maps).expect("maps connect consecutive levels"))
}

/// Every witness tuple for a pair of level-equivalent compatible families gives the same verdict.
fn witness_independence(
    rng: &mut ChaCha8Rng,
    sys: &FiniteSystem,
    budget: u128,
) -> Result<Option<(bool, usize)>> {
    let gamma: GroupRef = Arc::new(FiniteGroup::cyclic(2));
    let levels: Vec<GammaGroup> = sys.groups.iter().map(|g| GammaGroup::trivial_action(gamma.clone(), g.clone())).collect();
    let maps: Vec<GammaHom> = sys
        .maps
        .iter()
        .enumerate()
        .map(|(n, u)| GammaHom::new(levels[n + 1].clone(), levels[n].clone(), u.map.clone()))
        .collect::<Result<_>>()?;
    let tower = GammaTower::new(levels.clone(), maps)?;
    let top = levels.len() - 1;
    let cocycles = enumerate_cocycles(&levels[top], budget)?;
    let f_top = cocycles[rng.gen_range(0..cocycles.len())].clone();
    let a = rng.gen_range(0..levels[top].underlying().order());
    let g_top = act_on_cocycle(&levels[top], a, &f_top);
    let push_down = |top_f: CrossedHom| -> Vec<CrossedHom> {
        let mut fam = vec![top_f];
        for u in tower.maps.iter().rev() {
            let next = fam.last().unwrap().push(u);
            fam.push(next);
        }
        fam.reverse();
        fam
    };
    let (f, f2) = (push_down(f_top), push_down(g_top));
    let witness_sets: Vec<Vec<usize>> = levels
        .iter()
        .enumerate()
        .map(|(n, lv)| lv.underlying().elements().filter(|&x| act_on_cocycle(lv, x, &f[n]) == f2[n]).collect())
        .collect();
    let combos: usize = witness_sets.iter().map(|w| w.len()).product();
    if combos > 100_000 {
        return Ok(None);
    }
    let mut verdict = None;
    let mut idx = vec![0; witness_sets.len()];
    for _ in 0..combos {
        let w: Vec<usize> = idx.iter().zip(&witness_sets).map(|(&i, s)| s[i]).collect();
        let r = lim1_obstruction(&tower, &f, &f2, Some(&w))?;
        match verdict {
            None => verdict = Some(r.trivial),
            Some(v) if v != r.trivial => return Ok(Some((false, combos))),
            _ => {}
        }
        for (i, s) in idx.iter_mut().zip(&witness_sets) {
            *i += 1;
            if *i < s.len() {
                break;
            }
            *i = 0;
        }
    }
    Ok(Some((true, combos)))
}

fn check_truncated(config: &Config) -> Outcome {
    let pool = small_group_corpus(12);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut ok = true;
    let mut ev = Vec::new();
    let mut witness_checked = 0;
    for _ in 0..50 {
        let (names, sys) = random_system(&mut rng, &pool);
        let l1 = lim1_truncated(&sys, config.budget)?;
        let one_orbit = l1.orbits() == 1;
        let total: usize = sys.groups.iter().map(|g| g.order()).sum();
        let independent = if total <= 200 { witness_independence(&mut rng, &sys, config.budget)? } else { None };
        if independent.is_some() {
            witness_checked += 1;
        }
        let good = one_orbit && independent.is_none_or(|(same, _)| same);
        ok &= good;
        ev.push(json!({
            "groups": names,
            "maps": sys.maps.iter().map(|m| &m.map).collect::<Vec<_>>(),
            "states": l1.states,
            "orbits": l1.orbits(),
            "witness_tuples": independent.map(|(_, n)| n),
            "ok": good,
        }));
    }
    Ok((Verdict::from_bool(ok && witness_checked > 0), json!({ "witness_checked": witness_checked, "systems": ev })))
}

fn check_towers(config: &Config) -> Outcome {
    let cases = [
        ("subgroup-chain Z > 2Z > ...", SystemRecipe::multiples_chain(2), "uncountable"),
        ("constant-endo (Z, id)", SystemRecipe::constant_endo(vec![0], vec![vec![1]]), "trivial"),
        ("norm-tower l=3 p0=7", SystemRecipe::NormTower { tower: TowerLaw::ScholzReichardt { l: 3, p0: 7 } }, "uncountable"),
    ];
    let mut verdict = Verdict::Verified;
    let mut ev = Vec::new();
    for (label, recipe, expected) in cases {
        let v = lim1_classify(&recipe, config.horizon)?;
        let got = match &v {
            Lim1Verdict::Trivial { .. } => "trivial",
            Lim1Verdict::Uncountable { .. } => "uncountable",
            Lim1Verdict::Unknown { .. } => "unknown",
        };
        let entry = if got == expected {
            Verdict::Verified
        } else if got == "unknown" {
            Verdict::UnknownAtHorizon
        } else {
            Verdict::Refuted
        };
        verdict = verdict.max(entry);
        ev.push(json!({ "system": label, "recipe": recipe, "expected": expected, "verdict": v }));
    }
    Ok((verdict, json!(ev)))
}

fn check_splitting(config: &Config) -> Outcome {
    let catalog = abelian_field_catalog(100)?;
    let primes: Vec<u64> = (2..10_000u64).filter(|&p| is_prime(p)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut agree = 0usize;
    let mut skipped = 0usize;
    let mut mismatches = Vec::new();
    for (a, k) in &catalog {
        // all small primes, plus a few large ones
        let mut ps: Vec<u64> = primes.iter().copied().take_while(|&p| p < 60).collect();
        ps.extend((0..4).map(|_| primes[rng.gen_range(0..primes.len())]));
        for p in ps {
            let (Ok(s1), Ok(s2)) = (abelian_split(a, p), dedekind_split_seeded(k, p, config.seed)) else {
                skipped += 1;
                continue;
            };
            let (mut x, mut y) = (s1.pairs.clone(), s2.pairs.clone());
            x.sort_unstable();
            y.sort_unstable();
            if x == y && s2.degree() == k.degree() as u64 {
                agree += 1;
            } else {
                mismatches.push(json!({ "conductor": a.conductor(), "poly": k.poly(), "p": p, "abelian": x, "dedekind": y }));
            }
        }
    }
    let ok = mismatches.is_empty() && agree >= 500;
    Ok((Verdict::from_bool(ok), json!({ "fields": catalog.len(), "agreements": agree, "skipped_ramified_or_index": skipped, "mismatches": mismatches })))
}

fn check_lth_powers() -> Outcome {
    let mut ok = true;
    let mut cases = 0;
    let mut failures = Vec::new();
    for l in [3u64, 5, 7] {
        for p in (2..=200u64).filter(|&p| is_prime(p) && (p - 1) % l == 0) {
            cases += 1;
            let o = p13_local_obstruction(l, p)?;
            if o.index != l {
                ok = false;
                failures.push(json!(o));
            }
        }
    }
    Ok((Verdict::from_bool(ok), json!({ "cases": cases, "failures": failures })))
}

/// Γ-groups over `gamma` used as product factors.
fn h1_factors(gamma: &GroupRef) -> Result<Vec<(String, GammaGroup)>> {
    let mut out = Vec::new();
    for name in ["C2", "C3", "C4", "S3"] {
        out.push((format!("{name} trivial"), GammaGroup::trivial_action(gamma.clone(), grp(name)?)));
    }
    // Γ acting through its sign-like quotient onto inversion of C3 / C4, when Γ has one of order 2
    if let Some(h) = gamma.subgroups().into_iter().find(|h| h.len() * 2 == gamma.order() && gamma.is_normal(h)) {
        let (_, proj) = gamma.quotient(&h)?;
        for (name, inv) in [("C3", vec![0, 2, 1]), ("C4", vec![0, 3, 2, 1])] {
            let action = gamma.elements().map(|t| if proj.apply(t) == 0 { (0..inv.len()).collect() } else { inv.clone() }).collect();
            out.push((format!("{name} inverted"), GammaGroup::new(gamma.clone(), grp(name)?, action)?));
        }
    }
    Ok(out)
}

fn check_h1_products(config: &Config) -> Outcome {
    let mut ok = true;
    let mut ev = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for gname in ["C2", "C3", "S3"] {
        let gamma = grp(gname)?;
        let factors = h1_factors(&gamma)?;
        let cases = 8;
        for _ in 0..cases {
            let k = rng.gen_range(1..=4);
            let picks: Vec<usize> = (0..k).map(|_| rng.gen_range(0..factors.len())).collect();
            let fs: Vec<GammaGroup> = picks.iter().map(|&i| factors[i].1.clone()).collect();
            let order: usize = fs.iter().map(|f| f.underlying().order()).product();
            let gens = gamma.generators().len() as u32;
            if (order as u128).pow(gens) > config.budget {
                continue;
            }
            let prod = GammaGroup::direct_product(&fs)?;
            let whole = h1_nonabelian(&prod, config.budget)?;
            let parts: Vec<_> = fs.iter().map(|f| h1_nonabelian(f, config.budget)).collect::<Result<_>>()?;
            let expected: usize = parts.iter().map(|h| h.len()).product();
            // the projection of classes is a bijection onto the product of class sets
            let orders: Vec<usize> = fs.iter().map(|f| f.underlying().order()).collect();
            let mut tuples: Vec<Vec<usize>> = whole
                .classes
                .iter()
                .map(|c| {
                    (0..fs.len())
                        .map(|i| {
                            let comp = CrossedHom {
                                values: c.values.iter().map(|&x| GammaGroup::split_index(&orders, x)[i]).collect(),
                            };
                            parts[i].index_of(&fs[i], &comp).unwrap_or(usize::MAX)
                        })
                        .collect()
                })
                .collect();
            tuples.sort();
            tuples.dedup();
            let good = whole.len() == expected && tuples.len() == expected && tuples.iter().all(|t| !t.contains(&usize::MAX));
            ok &= good;
            ev.push(json!({
                "gamma": gname,
                "factors": picks.iter().map(|&i| factors[i].0.clone()).collect::<Vec<_>>(),
                "h1_product": whole.len(),
                "h1_factors": parts.iter().map(|h| h.len()).collect::<Vec<_>>(),
                "ok": good,
            }));
        }
    }
    Ok((Verdict::from_bool(ok && !ev.is_empty()), json!(ev)))
}
