//! Polynomials over ℤ and over prime fields: factorization mod p, Hensel lifting,
//! and an irreducibility test over ℚ.
//!
//! Coefficient vectors are little-endian and carry no trailing zeros.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_SEED: u64 = 0x7015_0b5e;

pub fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

pub fn powmod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, m);
        }
        a = mulmod(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes `>= from`, in increasing order.
pub fn primes_from(from: u64) -> impl Iterator<Item = u64> {
    (from.max(2)..).filter(|&n| is_prime(n))
}

// ---------- F_p[x] ----------

pub type FpPoly = Vec<u64>;

fn trim(mut v: FpPoly) -> FpPoly {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn deg(f: &[u64]) -> isize {
    f.len() as isize - 1
}

fn inv(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

fn fp_sub(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let n = a.len().max(b.len());
    trim((0..n).map(|i| (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0)) % p).collect())
}

fn fp_add(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let n = a.len().max(b.len());
    trim((0..n).map(|i| (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % p).collect())
}

pub fn fp_mul(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mulmod(x, y, p)) % p;
        }
    }
    trim(out)
}

fn fp_divrem(a: &[u64], b: &[u64], p: u64) -> (FpPoly, FpPoly) {
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut r = a.to_vec();
    if r.len() < b.len() {
        return (vec![], trim(r));
    }
    let lead_inv = inv(*b.last().unwrap(), p);
    let mut q = vec![0u64; r.len() - b.len() + 1];
    for k in (0..q.len()).rev() {
        let c = mulmod(r[k + b.len() - 1], lead_inv, p);
        q[k] = c;
        if c != 0 {
            for (j, &y) in b.iter().enumerate() {
                r[k + j] = (r[k + j] + p - mulmod(c, y, p)) % p;
            }
        }
    }
    r.truncate(b.len() - 1);
    (trim(q), trim(r))
}

fn fp_rem(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    fp_divrem(a, b, p).1
}

fn fp_monic(a: &[u64], p: u64) -> FpPoly {
    match a.last() {
        None => vec![],
        Some(&l) => {
            let li = inv(l, p);
            a.iter().map(|&x| mulmod(x, li, p)).collect()
        }
    }
}

pub fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    while !b.is_empty() {
        let r = fp_rem(&a, &b, p);
        a = b;
        b = r;
    }
    fp_monic(&a, p)
}

/// `(g, s, t)` with `s a + t b = g`, `g` monic.
fn fp_xgcd(a: &[u64], b: &[u64], p: u64) -> (FpPoly, FpPoly, FpPoly) {
    let (mut r0, mut r1) = (a.to_vec(), b.to_vec());
    let (mut s0, mut s1) = (vec![1u64], vec![]);
    let (mut t0, mut t1) = (vec![], vec![1u64]);
    while !r1.is_empty() {
        let (q, r) = fp_divrem(&r0, &r1, p);
        let s2 = fp_sub(&s0, &fp_mul(&q, &s1, p), p);
        let t2 = fp_sub(&t0, &fp_mul(&q, &t1, p), p);
        (r0, r1, s0, s1, t0, t1) = (r1, r, s1, s2, t1, t2);
    }
    let li = inv(*r0.last().unwrap(), p);
    let scale = |v: &[u64]| trim(v.iter().map(|&x| mulmod(x, li, p)).collect());
    (scale(&r0), scale(&s0), scale(&t0))
}

fn fp_derivative(a: &[u64], p: u64) -> FpPoly {
    trim(a.iter().enumerate().skip(1).map(|(i, &x)| mulmod(x, i as u64 % p, p)).collect())
}

fn fp_powmod(base: &[u64], e: &BigUint, m: &[u64], p: u64) -> FpPoly {
    let mut r = vec![1u64];
    let b = fp_rem(base, m, p);
    for i in (0..e.bits()).rev() {
        r = fp_rem(&fp_mul(&r, &r, p), m, p);
        if e.bit(i) {
            r = fp_rem(&fp_mul(&r, &b, p), m, p);
        }
    }
    fp_rem(&r, m, p)
}

fn is_one(a: &[u64]) -> bool {
    a == [1]
}

/// Square-free factorization `f = ∏ g_i^{m_i}` of a monic `f`.
fn squarefree_factorization(f: &[u64], p: u64) -> Vec<(FpPoly, usize)> {
    let mut out = Vec::new();
    let c0 = fp_gcd(f, &fp_derivative(f, p), p);
    let mut w = fp_divrem(f, &c0, p).0;
    let mut c = c0;
    let mut i = 1;
    while !is_one(&w) {
        let y = fp_gcd(&w, &c, p);
        let fac = fp_divrem(&w, &y, p).0;
        if !is_one(&fac) {
            out.push((fac, i));
        }
        c = fp_divrem(&c, &y, p).0;
        w = y;
        i += 1;
    }
    if !is_one(&c) {
        // c is a p-th power
        let root: FpPoly = c.iter().step_by(p as usize).copied().collect();
        for (g, m) in squarefree_factorization(&root, p) {
            out.push((g, m * p as usize));
        }
    }
    out
}

fn distinct_degree(f: &[u64], p: u64) -> Vec<(FpPoly, usize)> {
    let x = vec![0u64, 1];
    let mut out = Vec::new();
    let mut rest = f.to_vec();
    let mut h = fp_rem(&x, &rest, p);
    let pe = BigUint::from(p);
    let mut i = 1;
    while deg(&rest) >= 2 * i as isize {
        h = fp_powmod(&h, &pe, &rest, p);
        let g = fp_gcd(&rest, &fp_sub(&h, &x, p), p);
        if !is_one(&g) {
            rest = fp_divrem(&rest, &g, p).0;
            h = fp_rem(&h, &rest, p);
            out.push((g, i));
        }
        i += 1;
    }
    if deg(&rest) > 0 {
        let d = deg(&rest) as usize;
        out.push((rest, d));
    }
    out
}

fn equal_degree(f: &[u64], d: usize, p: u64, rng: &mut ChaCha8Rng, out: &mut Vec<FpPoly>) {
    let n = deg(f) as usize;
    if n == d {
        out.push(f.to_vec());
        return;
    }
    let exp = (BigUint::from(p).pow(d as u32) - 1u32) / 2u32;
    loop {
        let a = trim((0..n).map(|_| rng.gen_range(0..p)).collect());
        if deg(&a) < 1 {
            continue;
        }
        let b = if p == 2 {
            // trace map a + a^2 + ... + a^(2^(d-1))
            let mut t = a.clone();
            let mut acc = a.clone();
            for _ in 1..d {
                t = fp_rem(&fp_mul(&t, &t, p), f, p);
                acc = fp_add(&acc, &t, p);
            }
            acc
        } else {
            fp_sub(&fp_powmod(&a, &exp, f, p), &[1], p)
        };
        let g = fp_gcd(f, &b, p);
        if deg(&g) > 0 && deg(&g) < n as isize {
            let h = fp_divrem(f, &g, p).0;
            equal_degree(&g, d, p, rng, out);
            equal_degree(&h, d, p, rng, out);
            return;
        }
    }
}

/// `poly mod p = unit · ∏ factor^multiplicity`, factors monic irreducible.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FpFactorization {
    pub p: u64,
    pub unit: u64,
    pub factors: Vec<(FpPoly, usize)>,
}

impl FpFactorization {
    pub fn degrees(&self) -> Vec<(usize, usize)> {
        self.factors.iter().map(|(g, m)| (g.len() - 1, *m)).collect()
    }

    pub fn expand(&self) -> FpPoly {
        let mut acc = vec![self.unit];
        for (g, m) in &self.factors {
            for _ in 0..*m {
                acc = fp_mul(&acc, g, self.p);
            }
        }
        acc
    }
}

pub fn reduce_mod(poly: &[i64], p: u64) -> FpPoly {
    trim(poly.iter().map(|&c| c.rem_euclid(p as i64) as u64).collect())
}

/// Factorization over the field with `p` elements; the randomized equal-degree step is driven by `seed`.
pub fn factor_mod_p(poly: &[i64], p: u64, seed: u64) -> Result<FpFactorization> {
    if !is_prime(p) {
        return Err(Error::HypothesisFailed(format!("{p} is not prime")));
    }
    let f = reduce_mod(poly, p);
    if f.is_empty() {
        return Err(Error::InvalidPolynomial(format!("vanishes mod {p}")));
    }
    let unit = *f.last().unwrap();
    let monic = fp_monic(&f, p);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ p);
    let mut factors = Vec::new();
    for (sq, m) in squarefree_factorization(&monic, p) {
        for (block, d) in distinct_degree(&sq, p) {
            let mut parts = Vec::new();
            equal_degree(&block, d, p, &mut rng, &mut parts);
            factors.extend(parts.into_iter().map(|g| (g, m)));
        }
    }
    factors.sort_by(|a, b| (a.0.len(), &a.0, a.1).cmp(&(b.0.len(), &b.0, b.1)));
    let out = FpFactorization { p, unit, factors };
    if out.expand() != f {
        return Err(Error::InvalidPolynomial(format!("factorization mod {p} failed to reproduce input")));
    }
    Ok(out)
}

// ---------- ℤ[x] ----------

pub type ZPoly = Vec<BigInt>;

fn ztrim(mut v: ZPoly) -> ZPoly {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

pub fn z_from_i64(v: &[i64]) -> ZPoly {
    ztrim(v.iter().map(|&c| BigInt::from(c)).collect())
}

fn z_from_fp(v: &[u64]) -> ZPoly {
    v.iter().map(|&c| BigInt::from(c)).collect()
}

pub fn z_mul(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    ztrim(out)
}

fn z_sub(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    ztrim((0..n).map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z)).collect())
}

fn z_mod(a: &[BigInt], m: &BigInt) -> ZPoly {
    ztrim(a.iter().map(|c| c.mod_floor(m)).collect())
}

fn z_to_fp(a: &[BigInt], p: u64) -> FpPoly {
    let m = BigInt::from(p);
    trim(a.iter().map(|c| u64::try_from(c.mod_floor(&m)).unwrap()).collect())
}

/// Exact quotient by a monic divisor, or `None`.
pub fn z_div_exact(a: &[BigInt], b: &[BigInt]) -> Option<ZPoly> {
    if b.is_empty() || !b.last().unwrap().is_one() {
        return None;
    }
    let mut r = a.to_vec();
    if r.len() < b.len() {
        return if r.is_empty() { Some(vec![]) } else { None };
    }
    let mut q = vec![BigInt::zero(); r.len() - b.len() + 1];
    for k in (0..q.len()).rev() {
        let c = r[k + b.len() - 1].clone();
        for (j, y) in b.iter().enumerate() {
            r[k + j] -= &c * y;
        }
        q[k] = c;
    }
    if r.iter().all(|c| c.is_zero()) {
        Some(ztrim(q))
    } else {
        None
    }
}

fn z_derivative(a: &[i64]) -> Vec<i64> {
    a.iter().enumerate().skip(1).map(|(i, &c)| c * i as i64).collect()
}

/// Lifts `f ≡ g h (mod p)` to `(mod p^k)`; `g`, `h` monic and coprime mod `p`, `f` monic.
fn hensel_pair(f: &[BigInt], g: &[u64], h: &[u64], p: u64, k: u32) -> (ZPoly, ZPoly) {
    let (_, s, t) = fp_xgcd(g, h, p);
    let (mut gz, mut hz) = (z_from_fp(g), z_from_fp(h));
    let pb = BigInt::from(p);
    let mut pj = pb.clone();
    for _ in 1..k {
        let diff = z_sub(f, &z_mul(&gz, &hz));
        let e: ZPoly = diff.iter().map(|c| c / &pj).collect();
        let e = z_to_fp(&e, p);
        let dg = fp_rem(&fp_mul(&t, &e, p), g, p);
        let dh = fp_rem(&fp_mul(&s, &e, p), h, p);
        let bump = |x: &mut ZPoly, d: &[u64]| {
            if x.len() < d.len() {
                x.resize(d.len(), BigInt::zero());
            }
            for (i, &c) in d.iter().enumerate() {
                x[i] += &pj * c;
            }
        };
        bump(&mut gz, &dg);
        bump(&mut hz, &dh);
        pj *= &pb;
    }
    (z_mod(&gz, &pj), z_mod(&hz, &pj))
}

/// Lifts a factorization of a monic squarefree-mod-p `f` into `p`-adic factors mod `p^k`.
fn hensel_lift(f: &[BigInt], factors: &[FpPoly], p: u64, k: u32) -> Vec<ZPoly> {
    let modulus = BigInt::from(p).pow(k);
    let mut out = Vec::new();
    let mut target = z_mod(f, &modulus);
    for i in 0..factors.len() {
        if i + 1 == factors.len() {
            out.push(target.clone());
            break;
        }
        let rest = factors[i + 1..].iter().fold(vec![1u64], |acc, g| fp_mul(&acc, g, p));
        let (g, h) = hensel_pair(&target, &factors[i], &rest, p, k);
        out.push(g);
        target = h;
    }
    out
}

fn symmetric(a: &[BigInt], m: &BigInt) -> ZPoly {
    let half = m / 2;
    a.iter()
        .map(|c| {
            let r = c.mod_floor(m);
            if r > half {
                r - m
            } else {
                r
            }
        })
        .collect()
}

fn subset_sums(degs: &[usize], n: usize) -> Vec<bool> {
    let mut can = vec![false; n + 1];
    can[0] = true;
    for &d in degs {
        for s in (d..=n).rev() {
            if can[s - d] {
                can[s] = true;
            }
        }
    }
    can
}

/// Irreducibility of a monic integer polynomial over ℚ.
///
/// Degree patterns modulo several good primes sieve the possible factor degrees; whatever survives is
/// settled by Zassenhaus recombination of Hensel-lifted factors.
pub fn is_irreducible(f: &[i64]) -> Result<bool> {
    let f = {
        let mut v = f.to_vec();
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    };
    if f.len() < 2 {
        return Err(Error::InvalidPolynomial("constant polynomial".into()));
    }
    if *f.last().unwrap() != 1 {
        return Err(Error::InvalidPolynomial("not monic".into()));
    }
    let n = f.len() - 1;
    if n == 1 {
        return Ok(true);
    }
    if f[0] == 0 {
        return Ok(false);
    }
    let df = z_derivative(&f);
    let mut possible = vec![true; n + 1];
    let mut best: Option<FpFactorization> = None;
    let mut good = 0;
    for p in primes_from(3) {
        if good >= 12 || p > 2000 {
            break;
        }
        let fp = reduce_mod(&f, p);
        if !is_one(&fp_gcd(&fp, &reduce_mod(&df, p), p)) {
            continue;
        }
        good += 1;
        let fac = factor_mod_p(&f, p, DEFAULT_SEED)?;
        if fac.factors.len() == 1 {
            return Ok(true);
        }
        let degs: Vec<usize> = fac.factors.iter().map(|(g, _)| g.len() - 1).collect();
        let sums = subset_sums(&degs, n);
        for (d, ok) in possible.iter_mut().enumerate() {
            *ok &= sums[d];
        }
        if best.as_ref().is_none_or(|b| fac.factors.len() < b.factors.len()) {
            best = Some(fac);
        }
    }
    if (1..n).all(|d| !possible[d]) {
        return Ok(true);
    }
    let Some(fac) = best else {
        return Err(Error::InvalidPolynomial("no good prime below 2000".into()));
    };
    let p = fac.p;
    let fz = z_from_i64(&f);
    // coefficients of any monic factor are bounded by 2^n · Σ|a_i|
    let bound = BigInt::from(2).pow(n as u32) * f.iter().map(|c| BigInt::from(*c).abs()).sum::<BigInt>();
    let mut k = 1u32;
    while BigInt::from(p).pow(k) <= &bound * 2 {
        k += 1;
    }
    let modulus = BigInt::from(p).pow(k);
    let polys: Vec<FpPoly> = fac.factors.iter().map(|(g, _)| g.clone()).collect();
    let lifted = hensel_lift(&fz, &polys, p, k);
    let r = lifted.len();
    for size in 1..=r / 2 {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let d: usize = idx.iter().map(|&i| lifted[i].len() - 1).sum();
            if possible[d] {
                let prod = idx.iter().fold(vec![BigInt::one()], |acc, &i| z_mod(&z_mul(&acc, &lifted[i]), &modulus));
                let cand = symmetric(&prod, &modulus);
                if z_div_exact(&fz, &cand).is_some() {
                    return Ok(false);
                }
            }
            // next combination
            let mut i = size;
            while i > 0 && idx[i - 1] == r - size + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    Ok(true)
}

/// `Φ_m`.
pub fn cyclotomic_poly(m: u64) -> Vec<i64> {
    let mut num: ZPoly = vec![BigInt::zero(); m as usize + 1];
    num[0] = BigInt::from(-1);
    num[m as usize] = BigInt::one();
    for d in 1..m {
        if m.is_multiple_of(d) {
            num = z_div_exact(&num, &z_from_i64(&cyclotomic_poly(d))).expect("Φ_d divides x^m - 1");
        }
    }
    num.iter().map(|c| i64::try_from(c).expect("small coefficients")).collect()
}

/// For a palindromic `f` of degree `2k`, the `P` of degree `k` with `f(x) = x^k P(x + 1/x)`.
pub fn trace_reduce(f: &[i64]) -> Result<Vec<i64>> {
    let n = f.len().saturating_sub(1);
    if !n.is_multiple_of(2) || f.iter().zip(f.iter().rev()).any(|(a, b)| a != b) {
        return Err(Error::InvalidPolynomial("not palindromic of even degree".into()));
    }
    let k = n / 2;
    // work with g(x) = f(x)/x^k as a Laurent polynomial, coefficients indexed by exponent + k
    let mut rest: Vec<i64> = f.to_vec();
    let mut p = vec![0i64; k + 1];
    for j in (0..=k).rev() {
        let c = rest[k + j];
        p[j] = c;
        // subtract c (x + 1/x)^j
        let mut binom = 1i64;
        for i in 0..=j {
            let e = j as isize - 2 * i as isize;
            rest[(k as isize + e) as usize] -= c * binom;
            binom = binom * (j - i) as i64 / (i + 1) as i64;
        }
    }
    if rest.iter().any(|&c| c != 0) {
        return Err(Error::InvalidPolynomial("trace reduction left a remainder".into()));
    }
    Ok(p)
}

/// Human-readable form, highest degree first.
pub fn format_poly(f: &[i64]) -> String {
    let mut terms = Vec::new();
    for (i, &c) in f.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let mag = c.unsigned_abs();
        let coef = if mag == 1 && i > 0 { String::new() } else { mag.to_string() };
        let var = match i {
            0 => String::new(),
            1 => "x".into(),
            _ => format!("x^{i}"),
        };
        let sign = if c < 0 { "-" } else { "+" };
        terms.push((sign, format!("{coef}{var}")));
    }
    if terms.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (k, (sign, t)) in terms.iter().enumerate() {
        if k == 0 {
            if *sign == "-" {
                s.push('-');
            }
        } else {
            s.push_str(&format!(" {sign} "));
        }
        s.push_str(t);
    }
    s
}

/// Parses `"x^2+1"`, `"x^3 - 3x + 1"`, `"2*x^2 - x"`.
pub fn parse_poly(s: &str) -> Result<Vec<i64>> {
    let bad = || Error::Parse(format!("cannot parse polynomial {s:?}"));
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(bad());
    }
    let mut coeffs: Vec<i64> = Vec::new();
    let mut terms = Vec::new();
    let mut cur = String::new();
    for (i, ch) in compact.chars().enumerate() {
        if (ch == '+' || ch == '-') && i > 0 && !cur.ends_with('^') {
            terms.push(std::mem::take(&mut cur));
        }
        cur.push(ch);
    }
    terms.push(cur);
    for t in terms {
        let (sign, body) = match t.strip_prefix('-') {
            Some(b) => (-1i64, b),
            None => (1, t.strip_prefix('+').unwrap_or(&t)),
        };
        let (coef, exp) = match body.find('x') {
            None => (body.parse::<i64>().map_err(|_| bad())?, 0usize),
            Some(pos) => {
                let c = body[..pos].trim_end_matches('*');
                let c = if c.is_empty() { 1 } else { c.parse::<i64>().map_err(|_| bad())? };
                let rest = &body[pos + 1..];
                let e = if rest.is_empty() {
                    1
                } else {
                    rest.strip_prefix('^').ok_or_else(bad)?.parse::<usize>().map_err(|_| bad())?
                };
                (c, e)
            }
        };
        if coeffs.len() <= exp {
            coeffs.resize(exp + 1, 0);
        }
        coeffs[exp] += sign * coef;
    }
    while coeffs.last() == Some(&0) {
        coeffs.pop();
    }
    Ok(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        let small: Vec<u64> = primes_from(1).take(10).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2, 3, 5, 7
    }

    #[test]
    fn x2_plus_1() {
        let f = factor_mod_p(&[1, 0, 1], 5, DEFAULT_SEED).unwrap();
        assert_eq!(f.factors, vec![(vec![2, 1], 1), (vec![3, 1], 1)]);
        let g = factor_mod_p(&[1, 0, 1], 3, DEFAULT_SEED).unwrap();
        assert_eq!(g.degrees(), vec![(2, 1)]);
        let h = factor_mod_p(&[1, 0, 1], 2, DEFAULT_SEED).unwrap();
        assert_eq!(h.factors, vec![(vec![1, 1], 2)]);
    }

    #[test]
    fn repeated_and_pth_power_factors() {
        // (x+1)^3 (x^2+x+1) over F_3 mixes a cube with a repeated root
        let f = z_mul(&z_mul(&z_from_i64(&[1, 1]), &z_from_i64(&[1, 1])), &z_from_i64(&[1, 1]));
        let f = z_mul(&f, &z_from_i64(&[1, 1, 1]));
        let f: Vec<i64> = f.iter().map(|c| i64::try_from(c).unwrap()).collect();
        let fac = factor_mod_p(&f, 3, DEFAULT_SEED).unwrap();
        // x^2+x+1 = (x-1)^2 mod 3
        assert_eq!(fac.factors, vec![(vec![1, 1], 3), (vec![2, 1], 2)]);
    }

    #[test]
    fn irreducibility() {
        assert!(is_irreducible(&[1, 0, 1]).unwrap());
        assert!(!is_irreducible(&[-1, 0, 1]).unwrap());
        // x^4 + 1 is reducible mod every prime but irreducible over Q
        assert!(is_irreducible(&[1, 0, 0, 0, 1]).unwrap());
        // (x^2+1)(x^2+2) has no rational roots
        assert!(!is_irreducible(&[2, 0, 3, 0, 1]).unwrap());
        assert!(is_irreducible(&[-1, -2, 1, 1]).unwrap());
        assert!(is_irreducible(&cyclotomic_poly(48)).unwrap());
    }

    #[test]
    fn cyclotomic_and_trace() {
        assert_eq!(cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
        // ζ_7 + ζ_7^{-1} has minimal polynomial x^3 + x^2 - 2x - 1
        assert_eq!(trace_reduce(&cyclotomic_poly(7)).unwrap(), vec![-1, -2, 1, 1]);
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_poly("x^2+1").unwrap(), vec![1, 0, 1]);
        assert_eq!(parse_poly("x^3 - 3x + 1").unwrap(), vec![1, -3, 0, 1]);
        assert_eq!(parse_poly("-2*x^2 + x").unwrap(), vec![0, 1, -2]);
        assert_eq!(format_poly(&[1, -3, 0, 1]), "x^3 - 3x + 1");
        assert!(parse_poly("x^^2").is_err());
    }
}
