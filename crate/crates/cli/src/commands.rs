use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use torsor_lab::checks::{run_check, suite_paper_checks, Config, Verdict, CRITERIA};
use torsor_lab::cohomology::{h0, h1_abelian, h1_nonabelian, CrossedHom};
use torsor_lab::corpus::GroupSpec;
use torsor_lab::gset::{descent_orbit_decomposition, gset_iso, orbits};
use torsor_lab::invsys::{lim1_classify, ml_check, Lim1Verdict, SystemRecipe};
use torsor_lab::lattice::{is_equivariant, is_equivariant_iso, is_exact, LatticeMap};
use torsor_lab::numtheory::{dedekind_split_seeded, norm_tower_certificate, replay_certificate, NumberFieldDatum, TowerLaw, TowerOutcome};
use torsor_lab::poly::{factor_mod_p, format_poly, is_prime};
use torsor_lab::serre::{lemma_p4_verify, serre_tower_recipe, TowerRecipe, TowerSpec};
use torsor_lab::snf::smith_normal_form;
use torsor_lab::torsor::{verify_t4, GammaExtension, RelativeClass, TorsorRep};
use torsor_lab::{Error, Int, IntMatrix, Result};

use crate::input::{
    parse_matrix, read_json, sized, ChainInput, CocycleInput, GSetInput, GSetPair, MapInput, ModuleInput, SequenceInput,
    SnfInput,
};
use crate::{CohomologyOp, GroupsOp, GsetOp, InvsysOp, LatticeOp, Module, NtOp, SerreOp, SuiteOp, TorsorOp};

/// What a subcommand produced, before it is wrapped in a report.
pub enum Outcome {
    Single { claim: String, verdict: Verdict, evidence: Value },
    /// a report already assembled by the library
    Report(torsor_lab::checks::Report),
}

fn single(claim: &str, verdict: Verdict, evidence: Value) -> Outcome {
    Outcome::Single { claim: claim.to_string(), verdict, evidence }
}

/// Numbers that fit stay numbers; anything larger is a decimal string.
pub fn int_json(x: &Int) -> Value {
    let s = x.to_string();
    s.parse::<i64>().map(Value::from).unwrap_or(Value::String(s))
}

fn ints_json(v: &[Int]) -> Value {
    Value::Array(v.iter().map(int_json).collect())
}

fn matrix_json(m: &IntMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| ints_json(m.row(i))).collect())
}

fn pick<'a>(specific: &'a Option<PathBuf>, input: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
    specific
        .as_deref()
        .or(input.as_deref())
        .ok_or_else(|| Error::Parse(format!("missing input: pass {flag} FILE or --in FILE")))
}

pub fn claim_name(m: &Module) -> &'static str {
    match m {
        Module::Groups { op: GroupsOp::Classes } => "groups.classes",
        Module::Gset { op: GsetOp::Orbits } => "gset.orbits",
        Module::Gset { op: GsetOp::Iso } => "gset.iso",
        Module::Gset { op: GsetOp::Descent } => "gset.descent",
        Module::Lattice { op: LatticeOp::Snf } => "lattice.snf",
        Module::Lattice { op: LatticeOp::Exact } => "lattice.exact",
        Module::Lattice { op: LatticeOp::Iso } => "lattice.iso",
        Module::Cohomology { op: CohomologyOp::H1 { .. } } => "cohomology.h1",
        Module::Torsor { op: TorsorOp::VerifyT4 { .. } } => "t4",
        Module::Invsys { op: InvsysOp::Classify { .. } } => "invsys.classify",
        Module::Nt { op: NtOp::Split { .. } } => "nt.split",
        Module::Nt { op: NtOp::TowerCert { .. } } => "nt.tower-cert",
        Module::Serre { op: SerreOp::VerifyP4 { .. } } => "p4",
        Module::Serre { op: SerreOp::Tower { .. } } => "serre.tower",
        Module::Suite { op: SuiteOp::PaperChecks } => "paper-checks",
        Module::Suite { op: SuiteOp::Check { .. } } => "check",
        Module::Suite { op: SuiteOp::List } => "suite.list",
    }
}

pub fn run(m: &Module, input: &Option<PathBuf>, config: &Config) -> Result<Outcome> {
    let claim = claim_name(m);
    let need_in = || input.as_deref().ok_or_else(|| Error::Parse("missing input: pass --in FILE".into()));
    match m {
        Module::Groups { op: GroupsOp::Classes } => {
            let g = read_json::<GroupSpec>(need_in()?)?.build()?;
            let classes: Vec<Value> = g
                .conjugacy_classes()
                .iter()
                .map(|c| {
                    json!({
                        "representative": c[0],
                        "label": g.labels().map(|_| g.label(c[0])),
                        "size": c.len(),
                        "element_order": g.element_order(c[0]),
                        "centralizer_order": g.centralizer(c[0]).len(),
                        "elements": c,
                    })
                })
                .collect();
            Ok(single(claim, Verdict::Verified, json!({ "order": g.order(), "class_count": classes.len(), "classes": classes })))
        }
        Module::Gset { op } => match op {
            GsetOp::Orbits => {
                let x = read_json::<GSetInput>(need_in()?)?.build()?;
                let d = orbits(&x);
                Ok(single(claim, Verdict::Verified, json!({ "orbit_count": d.orbits.len(), "orbits": d.orbits })))
            }
            GsetOp::Descent => {
                let x = read_json::<GSetInput>(need_in()?)?.build()?;
                let d = descent_orbit_decomposition(&x);
                let degree: usize = d.iter().map(|f| f.degree).sum();
                Ok(single(claim, Verdict::Verified, json!({ "total_degree": degree, "factors": d })))
            }
            GsetOp::Iso => {
                let pair = read_json::<GSetPair>(need_in()?)?;
                let (x, y) = (pair.left.build()?, pair.right.build()?);
                if !x.group().same_table(y.group()) {
                    return Err(Error::Parse("the two sets are over different groups".into()));
                }
                let iso = gset_iso(&x, &y);
                let verdict = Verdict::from_bool(iso.is_some());
                Ok(single(claim, verdict, json!({ "isomorphic": iso.is_some(), "map": iso })))
            }
        },
        Module::Lattice { op } => match op {
            LatticeOp::Snf => {
                let m = parse_matrix(&read_json::<SnfInput>(need_in()?)?.matrix)?;
                let s = smith_normal_form(&m);
                let verdict = Verdict::from_bool(s.verify(&m));
                Ok(single(
                    claim,
                    verdict,
                    json!({
                        "diagonal": ints_json(&s.diagonal),
                        "rank": s.rank(),
                        "cokernel_invariants": ints_json(&s.cokernel_invariants()),
                        "left": matrix_json(&s.left),
                        "right": matrix_json(&s.right),
                    }),
                ))
            }
            LatticeOp::Exact => {
                let chain = read_json::<ChainInput>(need_in()?)?.build()?;
                let r = is_exact(&chain)?;
                let ranks: Vec<usize> =
                    chain.iter().map(|f| f.source.rank()).chain(chain.last().map(|f| f.target.rank())).collect();
                Ok(single(claim, Verdict::from_bool(r.exact), json!({ "ranks": ranks, "report": r })))
            }
            LatticeOp::Iso => {
                let inp = read_json::<MapInput>(need_in()?)?;
                let (s, t) = (inp.source.build()?, inp.target.build()?);
                let mat = sized(&inp.matrix, t.rank(), s.rank())?;
                if !is_equivariant(&s, &t, &mat) {
                    return Ok(single(claim, Verdict::Refuted, json!({ "equivariant": false, "isomorphism": false })));
                }
                let f = LatticeMap::new(s, t, mat)?;
                let iso = is_equivariant_iso(&f);
                let diag = smith_normal_form(&f.matrix).diagonal;
                Ok(single(
                    claim,
                    Verdict::from_bool(iso),
                    json!({ "equivariant": true, "isomorphism": iso, "elementary_divisors": ints_json(&diag) }),
                ))
            }
        },
        Module::Cohomology { op: CohomologyOp::H1 { module } } => {
            let path = pick(module, input, "--module")?;
            match read_json::<ModuleInput>(path)? {
                ModuleInput::Abelian(l) => {
                    let m = l.module()?;
                    let h = h1_abelian(&m);
                    let z = h0(&m);
                    let gens: Vec<Value> =
                        h.generators.iter().map(|c| Value::Array(c.values.iter().map(|v| ints_json(v)).collect())).collect();
                    Ok(single(
                        claim,
                        Verdict::Verified,
                        json!({
                            "kind": "abelian",
                            "h0_invariants": ints_json(&z.invariants),
                            "h1_invariants": ints_json(&h.invariants),
                            "h1_order": h.order().map(|o| int_json(&o)),
                            "h1_generators": gens,
                        }),
                    ))
                }
                ModuleInput::Nonabelian(n) => {
                    let n = n.build()?;
                    let h = h1_nonabelian(&n, config.budget)?;
                    Ok(single(claim, Verdict::Verified, json!({ "kind": "nonabelian", "h1_size": h.len(), "h1": h })))
                }
            }
        }
        Module::Torsor { op: TorsorOp::VerifyT4 { seq, base } } => {
            let s = read_json::<SequenceInput>(pick(seq, input, "--seq")?)?;
            let seq = GammaExtension::from_normal_subgroup(&s.b.build()?, &s.normal)?;
            let b = seq.b();
            let f = match base {
                Some(p) => read_json::<CocycleInput>(p)?.build(b)?,
                None => CrossedHom::neutral(b),
            };
            let p = TorsorRep::new(b.clone(), f.clone())?;
            let q = TorsorRep::new(seq.c().clone(), f.push(&seq.v))?;
            let r = verify_t4(&seq, &RelativeClass::new(seq.v.clone(), q, p)?, config.budget)?;
            let verdict = Verdict::from_bool(r.bijective && r.neutral_to_base);
            Ok(single(claim, verdict, json!({ "base": f.values, "report": r })))
        }
        Module::Invsys { op: InvsysOp::Classify { recipe } } => {
            let r = read_json::<SystemRecipe>(pick(recipe, input, "--recipe")?)?;
            classify(claim, &r, config)
        }
        Module::Nt { op } => match op {
            NtOp::Split { poly, p } => {
                let f = crate::input::parse_poly_arg(poly)?;
                if !is_prime(*p) {
                    return Err(Error::Parse(format!("{p} is not prime")));
                }
                let k = NumberFieldDatum::new(f.clone())?;
                let fac = factor_mod_p(&f, *p, config.seed)?;
                let s = dedekind_split_seeded(&k, *p, config.seed)?;
                Ok(single(
                    claim,
                    Verdict::Verified,
                    json!({
                        "poly": format_poly(&f),
                        "coefficients": f,
                        "p": p,
                        "factor_degrees_mod_p": fac.degrees(),
                        "splitting": s.pairs,
                        "splits_completely": s.splits_completely(),
                        "inert": s.is_inert(),
                    }),
                ))
            }
            NtOp::TowerCert { tower } => {
                let law = read_json::<TowerLaw>(pick(tower, input, "--tower")?)?;
                let out = norm_tower_certificate(&law, config.horizon)?;
                let verdict = match &out {
                    TowerOutcome::Fails { certificate } => Verdict::from_bool(replay_certificate(&law, certificate)?),
                    TowerOutcome::Holds { .. } => Verdict::Refuted,
                    TowerOutcome::NoFailureFound { .. } => Verdict::UnknownAtHorizon,
                };
                Ok(single(claim, verdict, json!({ "tower": law, "outcome": out, "replayed": verdict == Verdict::Verified })))
            }
        },
        Module::Serre { op } => match op {
            SerreOp::VerifyP4 { gamma_f } => {
                let g = read_json::<GroupSpec>(pick(gamma_f, input, "--gammaF")?)?.build()?;
                let r = lemma_p4_verify(&g, config.sbar_condition)?;
                Ok(single(claim, Verdict::from_bool(r.verified), json!(r)))
            }
            SerreOp::Tower { chain } => {
                let spec = read_json::<TowerSpec>(pick(chain, input, "--chain")?)?;
                let recipe = serre_tower_recipe(&TowerRecipe::from_spec(&spec)?)?;
                classify(claim, &recipe, config)
            }
        },
        Module::Suite { op } => match op {
            SuiteOp::PaperChecks => Ok(Outcome::Report(suite_paper_checks(config))),
            SuiteOp::Check { claim } => {
                if !CRITERIA.iter().any(|(id, _)| id == claim) {
                    return Err(Error::Parse(format!("unknown claim {claim:?}")));
                }
                Ok(Outcome::Report(run_check(claim, config)))
            }
            SuiteOp::List => {
                let list: Vec<Value> = CRITERIA.iter().map(|(id, d)| json!({ "claim": id, "description": d })).collect();
                Ok(single(claim, Verdict::Verified, json!(list)))
            }
        },
    }
}

fn classify(claim: &str, r: &SystemRecipe, config: &Config) -> Result<Outcome> {
    let ml = ml_check(r, config.horizon)?;
    let v = lim1_classify(r, config.horizon)?;
    let verdict = match v {
        Lim1Verdict::Unknown { .. } => Verdict::UnknownAtHorizon,
        _ => Verdict::Verified,
    };
    Ok(single(claim, verdict, json!({ "recipe": r, "ml": ml, "lim1": v })))
}
