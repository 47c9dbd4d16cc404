//! Crate-private dense polynomial arithmetic over a tower level.
//!
//! Polynomials are `Vec<Repr>`, constant coefficient first, kept trimmed (no
//! high zero coefficients; the zero polynomial is the empty vector). These
//! helpers back both the irreducible scans used to grow the tower and the
//! public polynomial type.

use crate::field::{Level, Repr};

pub(crate) fn trim(lv: &Level, v: &mut Vec<Repr>) {
    while let Some(last) = v.last() {
        if lv.is_zero_r(last) {
            v.pop();
        } else {
            break;
        }
    }
}

pub(crate) fn deg(v: &[Repr]) -> Option<usize> {
    if v.is_empty() {
        None
    } else {
        Some(v.len() - 1)
    }
}

pub(crate) fn add(lv: &Level, a: &[Repr], b: &[Repr]) -> Vec<Repr> {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => lv.add_r(x, y),
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.clone(),
            (None, None) => unreachable!(),
        };
        out.push(x);
    }
    trim(lv, &mut out);
    out
}

pub(crate) fn neg(lv: &Level, a: &[Repr]) -> Vec<Repr> {
    a.iter().map(|x| lv.neg_r(x)).collect()
}

pub(crate) fn sub(lv: &Level, a: &[Repr], b: &[Repr]) -> Vec<Repr> {
    add(lv, a, &neg(lv, b))
}

pub(crate) fn scalar_mul(lv: &Level, a: &[Repr], c: &Repr) -> Vec<Repr> {
    if lv.is_zero_r(c) {
        return Vec::new();
    }
    a.iter().map(|x| lv.mul_r(x, c)).collect()
}

pub(crate) fn mul(lv: &Level, a: &[Repr], b: &[Repr]) -> Vec<Repr> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![lv.zero_r(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if lv.is_zero_r(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            let t = lv.mul_r(x, y);
            out[i + j] = lv.add_r(&out[i + j], &t);
        }
    }
    trim(lv, &mut out);
    out
}

/// Quotient and remainder; panics on a zero divisor.
pub(crate) fn divrem(lv: &Level, a: &[Repr], b: &[Repr]) -> (Vec<Repr>, Vec<Repr>) {
    assert!(!b.is_empty(), "division by the zero polynomial");
    let db = b.len() - 1;
    let lead_inv = lv.inv_r(&b[db]).expect("trimmed leading coefficient is nonzero");
    let mut rem: Vec<Repr> = a.to_vec();
    trim(lv, &mut rem);
    if rem.len() < b.len() {
        return (Vec::new(), rem);
    }
    let mut quo = vec![lv.zero_r(); rem.len() - db];
    while rem.len() >= b.len() && !rem.is_empty() {
        let shift = rem.len() - b.len();
        let c = lv.mul_r(rem.last().unwrap(), &lead_inv);
        quo[shift] = c.clone();
        for (j, bj) in b.iter().enumerate() {
            let t = lv.mul_r(&c, bj);
            rem[shift + j] = lv.sub_r(&rem[shift + j], &t);
        }
        trim(lv, &mut rem);
    }
    trim(lv, &mut quo);
    (quo, rem)
}

pub(crate) fn rem(lv: &Level, a: &[Repr], b: &[Repr]) -> Vec<Repr> {
    divrem(lv, a, b).1
}

/// Scale to leading coefficient 1; input must be nonzero.
pub(crate) fn make_monic(lv: &Level, a: &[Repr]) -> (Vec<Repr>, Repr) {
    let lead = a.last().expect("monic of zero polynomial").clone();
    let inv = lv.inv_r(&lead).unwrap();
    (scalar_mul(lv, a, &inv), lead)
}

/// Monic gcd; gcd(0, 0) = 0.
pub(crate) fn gcd_monic(lv: &Level, a: &[Repr], b: &[Repr]) -> Vec<Repr> {
    let mut r0: Vec<Repr> = a.to_vec();
    let mut r1: Vec<Repr> = b.to_vec();
    trim(lv, &mut r0);
    trim(lv, &mut r1);
    while !r1.is_empty() {
        let r = rem(lv, &r0, &r1);
        r0 = std::mem::replace(&mut r1, r);
    }
    if r0.is_empty() {
        r0
    } else {
        make_monic(lv, &r0).0
    }
}

/// Inverse of `a` modulo monic `m`; `None` when they share a factor or `a`
/// reduces to zero.
pub(crate) fn inv_mod(lv: &Level, a: &[Repr], m: &[Repr]) -> Option<Vec<Repr>> {
    let mut r0: Vec<Repr> = m.to_vec();
    let mut r1 = rem(lv, a, m);
    let mut s0: Vec<Repr> = Vec::new();
    let mut s1 = vec![lv.one_r()];
    if r1.is_empty() {
        return None;
    }
    while !r1.is_empty() {
        let (q, r) = divrem(lv, &r0, &r1);
        r0 = std::mem::replace(&mut r1, r);
        let qs = mul(lv, &q, &s1);
        let next = sub(lv, &s0, &qs);
        s0 = std::mem::replace(&mut s1, next);
    }
    if deg(&r0) != Some(0) {
        return None;
    }
    let ginv = lv.inv_r(&r0[0]).unwrap();
    Some(rem(lv, &scalar_mul(lv, &s0, &ginv), m))
}

pub(crate) fn eval(lv: &Level, f: &[Repr], x: &Repr) -> Repr {
    let mut acc = lv.zero_r();
    for c in f.iter().rev() {
        acc = lv.add_r(&lv.mul_r(&acc, x), c);
    }
    acc
}

pub(crate) fn deriv(lv: &Level, f: &[Repr]) -> Vec<Repr> {
    if f.len() <= 1 {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(f.len() - 1);
    for (i, c) in f.iter().enumerate().skip(1) {
        let k = lv.from_int_r(i as i64);
        out.push(lv.mul_r(&k, c));
    }
    trim(lv, &mut out);
    out
}

pub(crate) fn mul_mod(lv: &Level, a: &[Repr], b: &[Repr], m: &[Repr]) -> Vec<Repr> {
    rem(lv, &mul(lv, a, b), m)
}

pub(crate) fn pow_mod(lv: &Level, base: &[Repr], mut e: u128, m: &[Repr]) -> Vec<Repr> {
    let mut b = rem(lv, base, m);
    let mut acc = vec![lv.one_r()];
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(lv, &acc, &b, m);
        }
        b = mul_mod(lv, &b, &b, m);
        e >>= 1;
    }
    acc
}

/// base^(q^times) mod m, where q is the size of the coefficient level,
/// computed by iterated p-th powering so no huge exponents are formed.
pub(crate) fn frob_pow_mod(lv: &Level, base: &[Repr], times: u64, m: &[Repr]) -> Vec<Repr> {
    let p = lv.p() as u128;
    let mut out = rem(lv, base, m);
    for _ in 0..(times * lv.degree()) {
        out = pow_mod(lv, &out, p, m);
    }
    out
}

pub(crate) fn x_poly(lv: &Level) -> Vec<Repr> {
    vec![lv.zero_r(), lv.one_r()]
}

/// Rabin's irreducibility test for a monic polynomial of degree >= 1.
pub(crate) fn is_irreducible(lv: &Level, f: &[Repr]) -> bool {
    let d = deg(f).expect("irreducibility of the zero polynomial");
    if d == 0 {
        return false;
    }
    if d == 1 {
        return true;
    }
    let x = x_poly(lv);
    // x^(q^d) must equal x mod f.
    let top = frob_pow_mod(lv, &x, d as u64, f);
    if top != rem(lv, &x, f) {
        return false;
    }
    // For each prime r | d, gcd(x^(q^(d/r)) - x, f) must be trivial.
    let mut rest = d;
    let mut prime_divs = Vec::new();
    let mut q = 2;
    while q * q <= rest {
        if rest.is_multiple_of(q) {
            prime_divs.push(q);
            while rest.is_multiple_of(q) {
                rest /= q;
            }
        }
        q += 1;
    }
    if rest > 1 {
        prime_divs.push(rest);
    }
    for r in prime_divs {
        let e = frob_pow_mod(lv, &x, (d / r) as u64, f);
        let diff = sub(lv, &e, &rem(lv, &x, f));
        let g = gcd_monic(lv, &diff, f);
        if deg(&g) != Some(0) {
            return false;
        }
    }
    true
}

/// Monic candidate number `n` of degree `d`: coefficient i is the element
/// whose index is digit i of n in base q, the constant digit fastest.
pub(crate) fn candidate_monic(lv: &Level, d: usize, n: u128) -> Vec<Repr> {
    let q = lv.size();
    let mut rest = n;
    let mut out = Vec::with_capacity(d + 1);
    for _ in 0..d {
        out.push(lv.from_index_r(rest % q));
        rest /= q;
    }
    out.push(lv.one_r());
    out
}

/// First monic irreducible of degree `d` in counting order (leading 1
/// included).
pub(crate) fn find_irreducible_vec(lv: &Level, d: usize) -> Vec<Repr> {
    let q = lv.size();
    let total = q.checked_pow(d as u32).expect("scan space too large");
    for n in 0..total {
        let cand = candidate_monic(lv, d, n);
        if is_irreducible(lv, &cand) {
            return cand;
        }
    }
    unreachable!("irreducibles of every degree exist over a finite field")
}

/// Smallest-index root of `f` in the level, by direct scan.
pub(crate) fn first_root(lv: &Level, f: &[Repr]) -> Option<Repr> {
    let size = lv.try_size()?;
    (0..size).map(|i| lv.from_index_r(i)).find(|x| lv.is_zero_r(&eval(lv, f, x)))
}
