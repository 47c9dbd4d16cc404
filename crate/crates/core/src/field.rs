//! Finite-field towers grown on demand.
//!
//! A [`Level`] is a finite field GF(p^k) presented as the top of a linear
//! chain of extensions: the prime field GF(p) at depth 0, and each deeper
//! level obtained by adjoining a root of a monic irreducible polynomial over
//! the level below it. Extensions are created lazily ([`Level::extend`]) and
//! deterministically: the defining polynomial is always the first monic
//! irreducible of the requested degree in counting order (coefficient i of
//! candidate n is digit i of n in base q, constant digit fastest), so two runs
//! of the same computation build identical towers.
//!
//! Elements ([`FieldElement`]) are value-like: a coefficient vector over the
//! parent level, nested down to integers mod p. Every element of a level has
//! a canonical integer index (its coefficient digits read as a base-q number),
//! which gives the total order used for all deterministic "least" choices
//! throughout the crate (root picks, scan order, tie-breaking).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex, Weak};

use crate::error::{Error, Result};
use crate::polyvec as pv;

/// Nested coefficient data for one field element.
///
/// Invariant: an `Ext` vector always has exactly `rel_degree` entries for its
/// level, each canonical at the parent level. This keeps equality and hashing
/// structural.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub(crate) enum Repr {
    Prime(u64),
    Ext(Vec<Repr>),
}

pub(crate) struct LevelNode {
    p: u64,
    depth: usize,
    /// Degree of the defining polynomial over the parent (1 at the prime field).
    rel_degree: usize,
    /// Degree over the prime field.
    abs_degree: u64,
    parent: Option<Level>,
    /// Monic defining polynomial over the parent, constant first, leading 1
    /// omitted; empty at the prime field.
    defining: Vec<Repr>,
    /// Cache of canonical extensions already built from this level.
    children: Mutex<BTreeMap<usize, Weak<LevelNode>>>,
}

impl fmt::Debug for LevelNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.p, self.abs_degree)
    }
}

/// A field in the tower; cheap to clone, immutable after construction.
#[derive(Clone, Debug)]
pub struct Level {
    node: Arc<LevelNode>,
}

impl PartialEq for Level {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.node, &other.node) {
            return true;
        }
        self.node.p == other.node.p
            && self.node.depth == other.node.depth
            && self.node.rel_degree == other.node.rel_degree
            && self.node.defining == other.node.defining
            && self.node.parent == other.node.parent
    }
}

impl Eq for Level {}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.p(), self.degree())
    }
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    // Deterministic Miller-Rabin for u64.
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    let pow = |mut b: u64, mut e: u64| -> u64 {
        let mut acc: u128 = 1;
        let mut bb = b as u128 % n as u128;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * bb % n as u128;
            }
            bb = bb * bb % n as u128;
            e >>= 1;
        }
        b = acc as u64;
        b
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

impl Level {
    /// The prime field GF(p). Fails on composite or unit `p`.
    pub fn prime(p: u64) -> Result<Level> {
        if !is_prime_u64(p) {
            return Err(Error::CompositeCharacteristic(p));
        }
        Ok(Level {
            node: Arc::new(LevelNode {
                p,
                depth: 0,
                rel_degree: 1,
                abs_degree: 1,
                parent: None,
                defining: Vec::new(),
                children: Mutex::new(BTreeMap::new()),
            }),
        })
    }

    /// The canonical degree-`d` extension of this level: the new level is
    /// defined by the first monic irreducible of degree `d` in counting
    /// order. `extend(1)` is the level itself.
    ///
    /// # Panics
    /// Panics if `d == 0`.
    pub fn extend(&self, d: usize) -> Level {
        assert!(d >= 1, "extension degree must be positive");
        if d == 1 {
            return self.clone();
        }
        let mut cache = self.node.children.lock().unwrap();
        if let Some(weak) = cache.get(&d) {
            if let Some(node) = weak.upgrade() {
                return Level { node };
            }
        }
        let mut defining = pv::find_irreducible_vec(self, d);
        defining.pop(); // drop the leading 1
        let node = Arc::new(LevelNode {
            p: self.node.p,
            depth: self.node.depth + 1,
            rel_degree: d,
            abs_degree: self.node.abs_degree * d as u64,
            parent: Some(self.clone()),
            defining,
            children: Mutex::new(BTreeMap::new()),
        });
        cache.insert(d, Arc::downgrade(&node));
        Level { node }
    }

    /// First monic irreducible of degree `d` over this level in counting
    /// order (the same polynomial [`Level::extend`] uses).
    pub fn find_irreducible(&self, d: usize) -> crate::poly::Polynomial {
        assert!(d >= 1, "degree must be positive");
        crate::poly::Polynomial::from_repr(self.clone(), pv::find_irreducible_vec(self, d))
    }

    pub fn p(&self) -> u64 {
        self.node.p
    }

    /// Degree over the prime field.
    pub fn degree(&self) -> u64 {
        self.node.abs_degree
    }

    /// Degree of the defining polynomial over the parent level.
    pub fn relative_degree(&self) -> usize {
        self.node.rel_degree
    }

    pub fn depth(&self) -> usize {
        self.node.depth
    }

    pub fn parent(&self) -> Option<Level> {
        self.node.parent.clone()
    }

    /// Number of elements, if it fits in u128.
    pub fn try_size(&self) -> Option<u128> {
        let mut acc: u128 = 1;
        for _ in 0..self.node.abs_degree {
            acc = acc.checked_mul(self.node.p as u128)?;
        }
        Some(acc)
    }

    /// Number of elements.
    ///
    /// # Panics
    /// Panics if the size overflows u128.
    pub fn size(&self) -> u128 {
        self.try_size().expect("field level too large to enumerate")
    }

    /// The defining polynomial over the parent level (monic, including the
    /// leading 1); `None` at the prime field.
    pub fn defining_polynomial(&self) -> Option<crate::poly::Polynomial> {
        let parent = self.node.parent.clone()?;
        let mut coeffs = self.node.defining.clone();
        coeffs.push(parent.one_r());
        Some(crate::poly::Polynomial::from_repr(parent, coeffs))
    }

    /// The class of x adjoined at this level; `None` at the prime field.
    pub fn generator(&self) -> Option<FieldElement> {
        if self.node.depth == 0 {
            return None;
        }
        let parent = self.node.parent.as_ref().unwrap();
        let mut v = vec![parent.zero_r(); self.node.rel_degree];
        v[1] = parent.one_r();
        Some(FieldElement { level: self.clone(), repr: Repr::Ext(v) })
    }

    /// True if `self` sits above `anc` on the same chain (or equals it).
    pub fn is_extension_of(&self, anc: &Level) -> bool {
        let mut cur = Some(self.clone());
        while let Some(lv) = cur {
            if &lv == anc {
                return true;
            }
            cur = lv.parent();
        }
        false
    }

    /// Chain from just above `anc` up to `self`, or `None` if `anc` is not an
    /// ancestor-or-self.
    fn chain_above(&self, anc: &Level) -> Option<Vec<Level>> {
        let mut chain = Vec::new();
        let mut cur = self.clone();
        while &cur != anc {
            chain.push(cur.clone());
            cur = cur.parent()?;
        }
        chain.reverse();
        Some(chain)
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { level: self.clone(), repr: self.zero_r() }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement { level: self.clone(), repr: self.one_r() }
    }

    /// The image of an integer (reduced mod p, negatives allowed).
    pub fn from_int(&self, n: i64) -> FieldElement {
        FieldElement { level: self.clone(), repr: self.from_int_r(n) }
    }

    /// Element with the given canonical index.
    ///
    /// # Panics
    /// Panics if `idx` is out of range.
    pub fn element_from_index(&self, idx: u128) -> FieldElement {
        assert!(idx < self.size(), "element index out of range");
        FieldElement { level: self.clone(), repr: self.from_index_r(idx) }
    }

    /// All elements in canonical index order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        let size = self.size();
        (0..size).map(move |i| self.element_from_index(i))
    }

    // ---- internal representation arithmetic ----

    pub(crate) fn zero_r(&self) -> Repr {
        match &self.node.parent {
            None => Repr::Prime(0),
            Some(par) => Repr::Ext(vec![par.zero_r(); self.node.rel_degree]),
        }
    }

    pub(crate) fn one_r(&self) -> Repr {
        self.from_int_r(1)
    }

    #[allow(clippy::wrong_self_convention)]
    pub(crate) fn from_int_r(&self, n: i64) -> Repr {
        let p = self.node.p as i64;
        let v = ((n % p) + p) % p;
        match &self.node.parent {
            None => Repr::Prime(v as u64),
            Some(par) => {
                let mut coeffs = vec![par.zero_r(); self.node.rel_degree];
                coeffs[0] = par.from_int_r(v);
                Repr::Ext(coeffs)
            }
        }
    }

    pub(crate) fn is_zero_r(&self, a: &Repr) -> bool {
        match a {
            Repr::Prime(v) => *v == 0,
            Repr::Ext(coeffs) => {
                let par = self.node.parent.as_ref().unwrap();
                coeffs.iter().all(|c| par.is_zero_r(c))
            }
        }
    }

    pub(crate) fn add_r(&self, a: &Repr, b: &Repr) -> Repr {
        match (a, b) {
            (Repr::Prime(x), Repr::Prime(y)) => Repr::Prime((x + y) % self.node.p),
            (Repr::Ext(xs), Repr::Ext(ys)) => {
                let par = self.node.parent.as_ref().unwrap();
                Repr::Ext(xs.iter().zip(ys).map(|(x, y)| par.add_r(x, y)).collect())
            }
            _ => unreachable!("mixed element representations"),
        }
    }

    pub(crate) fn neg_r(&self, a: &Repr) -> Repr {
        match a {
            Repr::Prime(x) => Repr::Prime(if *x == 0 { 0 } else { self.node.p - x }),
            Repr::Ext(xs) => {
                let par = self.node.parent.as_ref().unwrap();
                Repr::Ext(xs.iter().map(|x| par.neg_r(x)).collect())
            }
        }
    }

    pub(crate) fn sub_r(&self, a: &Repr, b: &Repr) -> Repr {
        self.add_r(a, &self.neg_r(b))
    }

    pub(crate) fn mul_r(&self, a: &Repr, b: &Repr) -> Repr {
        match (a, b) {
            (Repr::Prime(x), Repr::Prime(y)) => {
                Repr::Prime(((*x as u128 * *y as u128) % self.node.p as u128) as u64)
            }
            (Repr::Ext(xs), Repr::Ext(ys)) => {
                let par = self.node.parent.as_ref().unwrap();
                let d = self.node.rel_degree;
                // Schoolbook product, then reduce by the monic defining poly.
                let mut prod = vec![par.zero_r(); 2 * d - 1];
                for (i, x) in xs.iter().enumerate() {
                    if par.is_zero_r(x) {
                        continue;
                    }
                    for (j, y) in ys.iter().enumerate() {
                        let t = par.mul_r(x, y);
                        prod[i + j] = par.add_r(&prod[i + j], &t);
                    }
                }
                for i in (d..2 * d - 1).rev() {
                    if par.is_zero_r(&prod[i]) {
                        continue;
                    }
                    let c = std::mem::replace(&mut prod[i], par.zero_r());
                    for (j, defj) in self.node.defining.iter().enumerate() {
                        let t = par.mul_r(&c, defj);
                        prod[i - d + j] = par.sub_r(&prod[i - d + j], &t);
                    }
                }
                prod.truncate(d);
                Repr::Ext(prod)
            }
            _ => unreachable!("mixed element representations"),
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub(crate) fn inv_r(&self, a: &Repr) -> Option<Repr> {
        if self.is_zero_r(a) {
            return None;
        }
        match a {
            Repr::Prime(x) => {
                // Extended Euclid over the integers.
                let (mut r0, mut r1) = (self.node.p as i128, *x as i128);
                let (mut s0, mut s1) = (0i128, 1i128);
                while r1 != 0 {
                    let q = r0 / r1;
                    (r0, r1) = (r1, r0 - q * r1);
                    (s0, s1) = (s1, s0 - q * s1);
                }
                debug_assert_eq!(r0, 1);
                let p = self.node.p as i128;
                Some(Repr::Prime((((s0 % p) + p) % p) as u64))
            }
            Repr::Ext(xs) => {
                let par = self.node.parent.as_ref().unwrap();
                let mut modulus = self.node.defining.clone();
                modulus.push(par.one_r());
                let mut av = xs.clone();
                pv::trim(par, &mut av);
                let inv = pv::inv_mod(par, &av, &modulus)?;
                let mut out = inv;
                out.resize(self.node.rel_degree, par.zero_r());
                Some(Repr::Ext(out))
            }
        }
    }

    pub(crate) fn pow_r(&self, a: &Repr, mut e: u128) -> Repr {
        let mut base = a.clone();
        let mut acc = self.one_r();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_r(&acc, &base);
            }
            base = self.mul_r(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// x -> x^p, the absolute Frobenius.
    pub(crate) fn frobenius_r(&self, a: &Repr) -> Repr {
        self.pow_r(a, self.node.p as u128)
    }

    /// Canonical index: coefficient digits read as a base-q number, constant
    /// digit least significant.
    pub(crate) fn index_r(&self, a: &Repr) -> u128 {
        match a {
            Repr::Prime(v) => *v as u128,
            Repr::Ext(coeffs) => {
                let par = self.node.parent.as_ref().unwrap();
                let psize = par.size();
                let mut acc: u128 = 0;
                for c in coeffs.iter().rev() {
                    acc = acc
                        .checked_mul(psize)
                        .and_then(|x| x.checked_add(par.index_r(c)))
                        .expect("element index overflow");
                }
                acc
            }
        }
    }

    #[allow(clippy::wrong_self_convention)]
    pub(crate) fn from_index_r(&self, idx: u128) -> Repr {
        match &self.node.parent {
            None => Repr::Prime(idx as u64),
            Some(par) => {
                let psize = par.size();
                let mut rest = idx;
                let mut coeffs = Vec::with_capacity(self.node.rel_degree);
                for _ in 0..self.node.rel_degree {
                    coeffs.push(par.from_index_r(rest % psize));
                    rest /= psize;
                }
                Repr::Ext(coeffs)
            }
        }
    }

    /// Lift an element of the parent level one step up.
    pub(crate) fn lift_one(&self, a: Repr) -> Repr {
        let par = self.node.parent.as_ref().expect("prime field has no parent");
        let mut coeffs = vec![par.zero_r(); self.node.rel_degree];
        coeffs[0] = a;
        Repr::Ext(coeffs)
    }

    /// Push an element down one step if it lies in the parent level.
    pub(crate) fn try_lower_one(&self, a: &Repr) -> Option<Repr> {
        match a {
            Repr::Prime(_) => None,
            Repr::Ext(coeffs) => {
                let par = self.node.parent.as_ref().unwrap();
                if coeffs[1..].iter().all(|c| par.is_zero_r(c)) {
                    Some(coeffs[0].clone())
                } else {
                    None
                }
            }
        }
    }
}

/// An element of one tower level. Arithmetic between elements of different
/// levels panics; use [`FieldElement::embed`] to move along the chain first.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FieldElement {
    level: Level,
    repr: Repr,
}

impl FieldElement {
    pub(crate) fn from_repr(level: Level, repr: Repr) -> FieldElement {
        FieldElement { level, repr }
    }

    pub(crate) fn repr(&self) -> &Repr {
        &self.repr
    }

    pub fn level(&self) -> &Level {
        &self.level
    }

    pub fn is_zero(&self) -> bool {
        self.level.is_zero_r(&self.repr)
    }

    pub fn is_one(&self) -> bool {
        self.repr == self.level.one_r()
    }

    fn check_level(&self, other: &FieldElement) {
        assert!(
            self.level == other.level,
            "cannot combine elements of {} and {}",
            self.level,
            other.level
        );
    }

    pub fn add(&self, other: &FieldElement) -> FieldElement {
        self.check_level(other);
        FieldElement {
            level: self.level.clone(),
            repr: self.level.add_r(&self.repr, &other.repr),
        }
    }

    pub fn sub(&self, other: &FieldElement) -> FieldElement {
        self.check_level(other);
        FieldElement {
            level: self.level.clone(),
            repr: self.level.sub_r(&self.repr, &other.repr),
        }
    }

    pub fn mul(&self, other: &FieldElement) -> FieldElement {
        self.check_level(other);
        FieldElement {
            level: self.level.clone(),
            repr: self.level.mul_r(&self.repr, &other.repr),
        }
    }

    pub fn neg(&self) -> FieldElement {
        FieldElement { level: self.level.clone(), repr: self.level.neg_r(&self.repr) }
    }

    pub fn try_inv(&self) -> Option<FieldElement> {
        self.level
            .inv_r(&self.repr)
            .map(|repr| FieldElement { level: self.level.clone(), repr })
    }

    /// # Panics
    /// Panics on zero.
    pub fn inv(&self) -> FieldElement {
        self.try_inv().expect("inverse of zero")
    }

    /// # Panics
    /// Panics when dividing by zero.
    pub fn div(&self, other: &FieldElement) -> FieldElement {
        self.mul(&other.inv())
    }

    pub fn pow(&self, e: i64) -> FieldElement {
        if e >= 0 {
            FieldElement {
                level: self.level.clone(),
                repr: self.level.pow_r(&self.repr, e as u128),
            }
        } else {
            self.inv().pow(-e)
        }
    }

    /// x -> x^p.
    pub fn frobenius(&self) -> FieldElement {
        FieldElement { level: self.level.clone(), repr: self.level.frobenius_r(&self.repr) }
    }

    /// Canonical index of this element within its level.
    pub fn index(&self) -> u128 {
        self.level.index_r(&self.repr)
    }

    /// Move the element up the chain into `target`.
    pub fn embed(&self, target: &Level) -> Result<FieldElement> {
        let chain = target.chain_above(&self.level).ok_or(Error::LevelMismatch)?;
        let mut repr = self.repr.clone();
        for lv in &chain {
            repr = lv.lift_one(repr);
        }
        Ok(FieldElement { level: target.clone(), repr })
    }

    /// Push the element down the chain into `target` if it lies there.
    pub fn try_restrict(&self, target: &Level) -> Option<FieldElement> {
        let chain = self.level.chain_above(target)?;
        let mut repr = self.repr.clone();
        for lv in chain.iter().rev() {
            repr = lv.try_lower_one(&repr)?;
        }
        Some(FieldElement { level: target.clone(), repr })
    }

    /// The integer value when the element lies in the prime field.
    pub fn as_prime_int(&self) -> Option<u64> {
        let base = {
            let mut lv = self.level.clone();
            while let Some(par) = lv.parent() {
                lv = par;
            }
            lv
        };
        let low = self.try_restrict(&base)?;
        match low.repr {
            Repr::Prime(v) => Some(v),
            Repr::Ext(_) => None,
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn write_repr(f: &mut fmt::Formatter<'_>, r: &Repr) -> fmt::Result {
            match r {
                Repr::Prime(v) => write!(f, "{v}"),
                Repr::Ext(coeffs) => {
                    write!(f, "[")?;
                    for (i, c) in coeffs.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        write_repr(f, c)?;
                    }
                    write!(f, "]")
                }
            }
        }
        write_repr(f, &self.repr)
    }
}

macro_rules! element_binop {
    ($trait:ident, $method:ident, $inner:ident) => {
        impl std::ops::$trait for &FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                FieldElement::$inner(self, rhs)
            }
        }
    };
}

element_binop!(Add, add, add);
element_binop!(Sub, sub, sub);
element_binop!(Mul, mul, mul);
element_binop!(Div, div, div);

impl std::ops::Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement::neg(self)
    }
}

/// A square root of `a` at the smallest level that has one: `a`'s own level
/// when `a` is a square there, otherwise its canonical quadratic extension.
/// Of the two roots the one with the smaller canonical index is returned.
pub fn sqrt_or_extend(a: &FieldElement) -> (Level, FieldElement) {
    let lv = a.level().clone();
    if let Some(r) = sqrt_in_level(&lv, a.repr()) {
        let r = least_root(&lv, r);
        return (lv.clone(), FieldElement::from_repr(lv, r));
    }
    let ext = lv.extend(2);
    let lifted = a.embed(&ext).expect("extension is a descendant");
    let r = sqrt_in_level(&ext, lifted.repr())
        .expect("every element is a square in the quadratic extension");
    let r = least_root(&ext, r);
    (ext.clone(), FieldElement::from_repr(ext, r))
}

fn least_root(lv: &Level, r: Repr) -> Repr {
    let neg = lv.neg_r(&r);
    if lv.index_r(&neg) < lv.index_r(&r) {
        neg
    } else {
        r
    }
}

/// Tonelli-Shanks in GF(q); `None` when `a` is a non-square.
fn sqrt_in_level(lv: &Level, a: &Repr) -> Option<Repr> {
    if lv.is_zero_r(a) {
        return Some(lv.zero_r());
    }
    let q = lv.size();
    if lv.p() == 2 {
        // Squaring is bijective: the root is a^(q/2).
        return Some(lv.pow_r(a, q / 2));
    }
    let one = lv.one_r();
    if lv.pow_r(a, (q - 1) / 2) != one {
        return None;
    }
    // q - 1 = 2^s * m with m odd.
    let mut m = q - 1;
    let mut s = 0u32;
    while m.is_multiple_of(2) {
        m /= 2;
        s += 1;
    }
    // First non-square in index order seeds the loop.
    let z = (2..q)
        .map(|i| lv.from_index_r(i))
        .find(|z| lv.pow_r(z, (q - 1) / 2) != one)
        .expect("non-square exists in a field of odd order");
    let mut c = lv.pow_r(&z, m);
    let mut t = lv.pow_r(a, m);
    let mut r = lv.pow_r(a, m.div_ceil(2));
    while t != one {
        let mut i = 0u32;
        let mut probe = t.clone();
        while probe != one {
            probe = lv.mul_r(&probe, &probe);
            i += 1;
        }
        let mut b = c.clone();
        for _ in 0..(s - i - 1) {
            b = lv.mul_r(&b, &b);
        }
        r = lv.mul_r(&r, &b);
        c = lv.mul_r(&b, &b);
        t = lv.mul_r(&t, &c);
        s = i;
    }
    debug_assert_eq!(lv.mul_r(&r, &r), *a);
    Some(r)
}

/// Smallest canonical level containing both inputs: the deeper one when the
/// levels are chained, otherwise the canonical lcm-degree extension of their
/// deepest common ancestor. Fails when the levels share no ancestor (for
/// example, different characteristics).
pub fn common_superlevel(a: &Level, b: &Level) -> Result<Level> {
    if a.is_extension_of(b) {
        return Ok(a.clone());
    }
    if b.is_extension_of(a) {
        return Ok(b.clone());
    }
    // Deepest common ancestor by comparing the chains from the roots.
    let chain = |mut lv: Level| {
        let mut out = vec![lv.clone()];
        while let Some(par) = lv.parent() {
            out.push(par.clone());
            lv = par;
        }
        out.reverse();
        out
    };
    let ca = chain(a.clone());
    let cb = chain(b.clone());
    let mut anc: Option<Level> = None;
    for (x, y) in ca.iter().zip(cb.iter()) {
        if x == y {
            anc = Some(x.clone());
        } else {
            break;
        }
    }
    let anc = anc.ok_or(Error::LevelMismatch)?;
    let da = (a.degree() / anc.degree()) as u128;
    let db = (b.degree() / anc.degree()) as u128;
    let g = gcd_u128(da, db);
    Ok(anc.extend((da / g * db) as usize))
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Embed `x` into `target`, which must contain `x`'s level as a subfield:
/// either along the chain, or — when the levels are incomparable — through
/// the field homomorphism fixing their common ancestor that sends each tower
/// generator to the first root (in index order) of its defining polynomial in
/// `target`. The choice of roots makes the embedding deterministic.
pub fn embed_anywhere(x: &FieldElement, target: &Level) -> Result<FieldElement> {
    if let Ok(done) = x.embed(target) {
        return Ok(done);
    }
    let src = x.level().clone();
    // Common ancestor, reused from common_superlevel's logic.
    let join = common_superlevel(&src, target)?;
    if &join != target {
        return Err(Error::LevelMismatch);
    }
    // Walk the source chain above the ancestor, mapping each generator to a
    // root of its (mapped) defining polynomial in the target.
    let mut anc = src.clone();
    loop {
        if target.is_extension_of(&anc) {
            break;
        }
        anc = anc.parent().ok_or(Error::LevelMismatch)?;
    }
    let chain = {
        let mut out = Vec::new();
        let mut cur = src.clone();
        while cur != anc {
            out.push(cur.clone());
            cur = cur.parent().unwrap();
        }
        out.reverse();
        out
    };
    // gen_images[i] = image in target of the generator of chain[i].
    let mut gen_images: Vec<Repr> = Vec::new();
    // Maps a repr at chain[k] (k = current position) into the target using
    // the images computed so far.
    fn map_repr(
        depth: usize,
        r: &Repr,
        anc: &Level,
        target: &Level,
        gen_images: &[Repr],
    ) -> Repr {
        if depth == 0 {
            // r lives at the ancestor: chain-embed it.
            let e = FieldElement::from_repr(anc.clone(), r.clone());
            return e.embed(target).expect("ancestor embeds in target").repr().clone();
        }
        match r {
            Repr::Ext(coeffs) => {
                // Horner in the generator image.
                let g = &gen_images[depth - 1];
                let mut acc = target.zero_r();
                for c in coeffs.iter().rev() {
                    let mc = map_repr(depth - 1, c, anc, target, gen_images);
                    acc = target.add_r(&target.mul_r(&acc, g), &mc);
                }
                acc
            }
            Repr::Prime(_) => unreachable!("chain levels are extensions"),
        }
    }
    for (k, lv) in chain.iter().enumerate() {
        // Defining polynomial of lv over its parent, mapped into the target.
        let mut def = lv.node.defining.clone();
        def.push(lv.parent().unwrap().one_r());
        let mapped: Vec<Repr> =
            def.iter().map(|c| map_repr(k, c, &anc, target, &gen_images)).collect();
        let root = pv::first_root(target, &mapped).ok_or_else(|| {
            Error::Construction("defining polynomial has no root in the target level".into())
        })?;
        gen_images.push(root);
        let _ = k;
    }
    let repr = map_repr(chain.len(), x.repr(), &anc, target, &gen_images);
    Ok(FieldElement::from_repr(target.clone(), repr))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64) -> Level {
        Level::prime(p).unwrap()
    }

    #[test]
    fn prime_field_construction() {
        assert_eq!(gf(5).size(), 5);
        assert_eq!(gf(7).p(), 7);
        assert!(matches!(Level::prime(6), Err(Error::CompositeCharacteristic(6))));
        assert!(matches!(Level::prime(1), Err(Error::CompositeCharacteristic(1))));
        assert!(Level::prime(2).is_ok());
    }

    #[test]
    fn canonical_irreducibles() {
        // Degree 1 over GF(5): x itself is first.
        let f = gf(5).find_irreducible(1);
        assert_eq!(f.to_string(), "x");
        // First irreducible quadratic over GF(5) in counting order is x^2 + 2.
        let f = gf(5).find_irreducible(2);
        assert_eq!(f.coeff_int(0), Some(2));
        assert_eq!(f.coeff_int(1), Some(0));
        assert_eq!(f.coeff_int(2), Some(1));
        // Over GF(7) it is x^2 + 1 (since -1 is a non-square mod 7).
        let f = gf(7).find_irreducible(2);
        assert_eq!(f.coeff_int(0), Some(1));
        assert_eq!(f.coeff_int(1), Some(0));
        assert_eq!(f.coeff_int(2), Some(1));
    }

    #[test]
    fn irreducible_scan_matches_exhaustive_oracle() {
        // Independent oracle: enumerate monic quadratics over GF(5) in
        // counting order and reject those with a root.
        let lv = gf(5);
        let mut first = None;
        'outer: for n in 0..25u128 {
            let c0 = lv.element_from_index(n % 5);
            let c1 = lv.element_from_index(n / 5);
            for x in lv.elements() {
                let val = x.mul(&x).add(&c1.mul(&x)).add(&c0);
                if val.is_zero() {
                    continue 'outer;
                }
            }
            first = Some((c0, c1));
            break;
        }
        let (c0, c1) = first.unwrap();
        assert_eq!(c0, lv.from_int(2));
        assert_eq!(c1, lv.from_int(0));
    }

    #[test]
    fn extension_tower_shape() {
        let gf25 = gf(5).extend(2);
        assert_eq!(gf25.degree(), 2);
        assert_eq!(gf25.size(), 25);
        assert_eq!(gf25.depth(), 1);
        // extend(1) is the identity.
        assert_eq!(gf25.extend(1), gf25);
        let gf625 = gf25.extend(2);
        assert_eq!(gf625.degree(), 4);
        assert_eq!(gf625.size(), 625);
        assert_eq!(gf625.parent().unwrap(), gf25);
        // Deterministic: rebuilding the tower gives structurally equal levels.
        let again = gf(5).extend(2).extend(2);
        assert_eq!(again, gf625);
    }

    #[test]
    fn field_axioms_exhaustive_gf25() {
        let lv = gf(5).extend(2);
        let elems: Vec<_> = lv.elements().collect();
        for a in &elems {
            for b in &elems {
                assert_eq!(a.add(b), b.add(a));
                assert_eq!(a.mul(b), b.mul(a));
                assert_eq!(a.sub(b).add(b), *a);
                if !b.is_zero() {
                    assert_eq!(a.mul(b).div(b), *a);
                }
            }
        }
        // Associativity and distributivity on a spot-check grid.
        for a in elems.iter().step_by(3) {
            for b in elems.iter().step_by(4) {
                for c in elems.iter().step_by(5) {
                    assert_eq!(a.mul(&b.mul(c)), a.mul(b).mul(c));
                    assert_eq!(a.mul(&b.add(c)), a.mul(b).add(&a.mul(c)));
                }
            }
        }
        for a in &elems {
            if !a.is_zero() {
                assert!(a.mul(&a.inv()).is_one());
            }
        }
    }

    #[test]
    fn field_axioms_char2_tower() {
        let gf8 = gf(2).extend(3);
        assert_eq!(gf8.size(), 8);
        let elems: Vec<_> = gf8.elements().collect();
        for a in &elems {
            for b in &elems {
                assert_eq!(a.add(b), b.add(a));
                if !b.is_zero() {
                    assert_eq!(a.mul(b).div(b), *a);
                }
            }
        }
    }

    #[test]
    fn frobenius_fixes_and_permutes() {
        for lv in [gf(5).extend(2), gf(7).extend(2), gf(2).extend(3)] {
            let k = lv.degree();
            for a in lv.elements() {
                let mut x = a.clone();
                for _ in 0..k {
                    x = x.frobenius();
                }
                assert_eq!(x, a, "Frobenius^degree must be the identity");
            }
            // Frobenius is additive and multiplicative.
            let elems: Vec<_> = lv.elements().collect();
            for a in elems.iter().step_by(2) {
                for b in elems.iter().step_by(3) {
                    assert_eq!(a.add(b).frobenius(), a.frobenius().add(&b.frobenius()));
                    assert_eq!(a.mul(b).frobenius(), a.frobenius().mul(&b.frobenius()));
                }
            }
        }
    }

    #[test]
    fn embedding_is_a_field_homomorphism() {
        let base = gf(5);
        let ext = base.extend(2);
        for a in base.elements() {
            for b in base.elements() {
                let ea = a.embed(&ext).unwrap();
                let eb = b.embed(&ext).unwrap();
                assert_eq!(a.add(&b).embed(&ext).unwrap(), ea.add(&eb));
                assert_eq!(a.mul(&b).embed(&ext).unwrap(), ea.mul(&eb));
            }
        }
        // Injective, and restriction inverts it.
        for a in base.elements() {
            let up = a.embed(&ext).unwrap();
            assert_eq!(up.try_restrict(&base).unwrap(), a);
        }
        // A proper extension element does not restrict.
        let t = ext.generator().unwrap();
        assert!(t.try_restrict(&base).is_none());
    }

    #[test]
    fn element_index_round_trip_and_order() {
        let lv = gf(5).extend(2);
        for i in 0..25u128 {
            let e = lv.element_from_index(i);
            assert_eq!(e.index(), i);
        }
        // 2 + 0t has index 2; 0 + 2t has index 10.
        let two = lv.from_int(2);
        assert_eq!(two.index(), 2);
        let t = lv.generator().unwrap();
        let two_t = t.mul(&lv.from_int(2));
        assert_eq!(two_t.index(), 10);
    }

    #[test]
    fn sqrt_examples() {
        let lv = gf(5);
        // 4 is a square at GF(5); the smaller root 2 is chosen.
        let (at, r) = sqrt_or_extend(&lv.from_int(4));
        assert_eq!(at, lv);
        assert_eq!(r, lv.from_int(2));
        // 2 is a non-square mod 5: the root lives at GF(25) and equals 2t
        // where t^2 = -2 under the canonical defining polynomial x^2 + 2.
        let (at, r) = sqrt_or_extend(&lv.from_int(2));
        let gf25 = lv.extend(2);
        assert_eq!(at, gf25);
        let t = gf25.generator().unwrap();
        assert_eq!(t.mul(&t), gf25.from_int(-2));
        assert_eq!(r, t.mul(&gf25.from_int(2)));
        assert_eq!(r.mul(&r), lv.from_int(2).embed(&gf25).unwrap());
        // sqrt(0) stays put.
        let (at, r) = sqrt_or_extend(&lv.zero());
        assert_eq!(at, lv);
        assert!(r.is_zero());
    }

    #[test]
    fn sqrt_everywhere_small_fields() {
        for lv in [gf(3), gf(5), gf(7), gf(11), gf(5).extend(2), gf(2).extend(3)] {
            for a in lv.elements() {
                let (at, r) = sqrt_or_extend(&a);
                let lifted = a.embed(&at).unwrap();
                assert_eq!(r.mul(&r), lifted, "sqrt({a})^2 != {a} at {at}");
                // Minimal level: if a root exists at the element's own level,
                // no extension may be taken.
                let has_local_root = lv.elements().any(|x| x.mul(&x) == a);
                assert_eq!(at == lv, has_local_root);
                // Deterministic least choice.
                let other = r.neg();
                assert!(r.index() <= other.index());
            }
        }
    }

    #[test]
    fn compositum_of_incomparable_levels() {
        let base = gf(5);
        let a = base.extend(2);
        let b = base.extend(3);
        let join = common_superlevel(&a, &b).unwrap();
        assert_eq!(join.degree(), 6);
        // Chained levels take the deeper one.
        assert_eq!(common_superlevel(&base, &a).unwrap(), a);
        // Embeddings land in the join and preserve arithmetic.
        let x = a.generator().unwrap();
        let ex = embed_anywhere(&x, &join).unwrap();
        // The image satisfies the defining polynomial of a over GF(5).
        let def = a.defining_polynomial().unwrap();
        let c0 = def.coeff(0).embed(&join).unwrap();
        let val = ex.mul(&ex).add(&c0);
        assert!(val.is_zero(), "generator image must satisfy x^2 + 2 = 0");
        for u in base.elements() {
            for v in base.elements() {
                let eu = embed_anywhere(&u.embed(&a).unwrap(), &join).unwrap();
                let ev = embed_anywhere(&v.embed(&a).unwrap(), &join).unwrap();
                let sum = embed_anywhere(&u.add(&v).embed(&a).unwrap(), &join).unwrap();
                let prod = embed_anywhere(&u.mul(&v).embed(&a).unwrap(), &join).unwrap();
                assert_eq!(eu.add(&ev), sum);
                assert_eq!(eu.mul(&ev), prod);
            }
        }
        // Mismatched characteristics cannot be joined.
        assert!(common_superlevel(&gf(5), &gf(7)).is_err());
    }
}
