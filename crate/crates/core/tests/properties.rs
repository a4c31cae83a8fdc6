use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use torsor_lab::checks::random_system;
use torsor_lab::corpus::small_group_corpus;
use torsor_lab::gset::{coset_gset, gset_iso, orbits, GSet};
use torsor_lab::invsys::{lim1_truncated, ml_check, MLVerdict, SystemRecipe};
use torsor_lab::matrix::Matrix;
use torsor_lab::numtheory::{dedekind_split, NumberFieldDatum};
use torsor_lab::poly::is_prime;
use torsor_lab::snf::smith_normal_form;
use torsor_lab::{Int, IntMatrix, SmallMatrix};

fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..5, 1usize..5).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-9i64..10, c), r))
}

fn big(rows: &[Vec<i64>]) -> IntMatrix {
    let cols = rows[0].len();
    Matrix::from_fn(rows.len(), cols, |i, j| Int::from(rows[i][j]))
}

/// A unimodular matrix as a product of elementary moves.
fn unimodular(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec((0..n, 0..n, -2i64..3), 0..6).prop_map(move |moves| {
        let mut u: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        for (i, j, k) in moves {
            if i != j {
                for c in 0..n {
                    u[i][c] += k * u[j][c];
                }
            }
        }
        u
    })
}

fn mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    (0..a.len()).map(|i| (0..b[0].len()).map(|j| (0..b.len()).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
}

/// Inverse of a unimodular matrix via the adjugate over the big scalar.
fn inverse(u: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let m = big(u);
    let n = u.len();
    let det = m.det();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if n == 1 {
                        return (Int::from(1) / &det).to_string().parse().unwrap();
                    }
                    let keep_r: Vec<usize> = (0..n).filter(|&r| r != j).collect();
                    let keep_c: Vec<usize> = (0..n).filter(|&c| c != i).collect();
                    let minor = m.select_rows(&keep_r).select_columns(&keep_c).det();
                    let sign = if (i + j) % 2 == 0 { Int::from(1) } else { Int::from(-1) };
                    (sign * minor / &det).to_string().parse().unwrap()
                })
                .collect()
        })
        .collect()
}

fn status(v: &MLVerdict) -> &'static str {
    match v {
        MLVerdict::Holds { .. } => "holds",
        MLVerdict::Fails { .. } => "fails",
        MLVerdict::UnknownAtHorizon { .. } => "unknown",
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn snf_agrees_across_scalars(rows in small_matrix()) {
        let small: SmallMatrix = Matrix::from_rows(&rows, rows[0].len());
        let a = big(&rows);
        let (s, b) = (smith_normal_form(&small), smith_normal_form(&a));
        prop_assert!(s.verify(&small));
        prop_assert!(b.verify(&a));
        let sd: Vec<String> = s.diagonal.iter().map(|x| x.to_string()).collect();
        let bd: Vec<String> = b.diagonal.iter().map(|x| x.to_string()).collect();
        prop_assert_eq!(sd, bd);
        // divisibility chain
        for w in b.diagonal.windows(2) {
            if w[0] != Int::from(0) {
                prop_assert_eq!(&w[1] % &w[0], Int::from(0));
            }
        }
    }

    #[test]
    fn orbit_stabilizer(gi in 0usize..30, picks in prop::collection::vec(0usize..64, 1..4)) {
        let corpus = small_group_corpus(16);
        let (_, g) = &corpus[gi % corpus.len()];
        let subs = g.subgroups();
        let mut x: Option<GSet> = None;
        for p in picks {
            let y = coset_gset(g, &subs[p % subs.len()]).unwrap();
            x = Some(match x { None => y, Some(x) => x.disjoint_union(&y).unwrap() });
        }
        let x = x.unwrap();
        let d = orbits(&x);
        prop_assert_eq!(d.orbits.iter().map(|o| o.points.len()).sum::<usize>(), x.size());
        for o in &d.orbits {
            prop_assert_eq!(o.points.len() * o.stabilizer.len(), g.order());
        }
        prop_assert!(gset_iso(&x, &x).is_some());
    }

    #[test]
    fn class_equation(gi in 0usize..61) {
        let corpus = small_group_corpus(24);
        let (_, g) = &corpus[gi % corpus.len()];
        let classes = g.conjugacy_classes();
        prop_assert_eq!(classes.iter().map(|c| c.len()).sum::<usize>(), g.order());
        for c in &classes {
            prop_assert_eq!(c.len() * g.centralizer(c[0]).len(), g.order());
        }
    }

    #[test]
    fn ml_verdict_is_basis_independent(
        t in (1usize..4).prop_flat_map(|n| (prop::collection::vec(prop::collection::vec(-3i64..4, n), n), unimodular(n)))
    ) {
        let (t, u) = t;
        let n = t.len();
        let conj = mul(&mul(&u, &t), &inverse(&u));
        let a = ml_check(&SystemRecipe::constant_endo(vec![0; n], t.clone()), 32).unwrap();
        let b = ml_check(&SystemRecipe::constant_endo(vec![0; n], conj), 32).unwrap();
        prop_assert_eq!(status(&a), status(&b), "T = {:?}", t);
    }

    #[test]
    fn splitting_degrees_sum_to_degree(coeffs in prop::collection::vec(-6i64..7, 1..5), p in 2u64..60) {
        prop_assume!(is_prime(p));
        let mut f = coeffs;
        f.push(1);
        let Ok(k) = NumberFieldDatum::new(f.clone()) else { return Ok(()) };
        if let Ok(s) = dedekind_split(&k, p) {
            prop_assert_eq!(s.pairs.iter().map(|&(e, f)| e * f).sum::<u64>(), k.degree() as u64);
        }
    }

    #[test]
    fn truncated_lim1_is_one_orbit(seed in any::<u64>()) {
        let pool = small_group_corpus(8);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (names, sys) = random_system(&mut rng, &pool);
        let l1 = lim1_truncated(&sys, 1_000_000).unwrap();
        prop_assert_eq!(l1.orbits(), 1, "{:?}", names);
    }

    #[test]
    fn recipes_round_trip(k in 2i64..9, d in prop::collection::vec(0i64..5, 1..3)) {
        let recipes = vec![
            SystemRecipe::multiples_chain(k),
            SystemRecipe::constant_endo(d.clone(), vec![d.clone(); d.len()]),
            SystemRecipe::Product { factors: vec![SystemRecipe::multiples_chain(k), SystemRecipe::constant_endo(vec![0], vec![vec![k]])] },
        ];
        for r in recipes {
            let text = serde_json::to_string(&r).unwrap();
            let back: SystemRecipe = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(back, r);
        }
    }
}
