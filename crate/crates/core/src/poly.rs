//! Polynomials over tower levels: exact factorization and splitting fields.
//!
//! Factorization runs squarefree decomposition, then distinct-degree
//! splitting, then Cantor-Zassenhaus equal-degree splitting. The equal-degree
//! stage is randomized but driven by a fixed-seed PRNG, so the returned
//! factor list (sorted canonically) is identical across runs; the seed used is
//! recorded on the [`Factorization`].

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{FieldElement, Level, Repr};
use crate::polyvec as pv;

/// Seed for the equal-degree splitting PRNG. Fixed so factorizations are
/// reproducible; reported in [`Factorization::seed`].
pub const FACTOR_SEED: u64 = 0x1505_CF8A_11E7_0001;

/// Dense polynomial over one tower level, constant coefficient first.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Polynomial {
    level: Level,
    coeffs: Vec<Repr>,
}

impl Polynomial {
    pub(crate) fn from_repr(level: Level, mut coeffs: Vec<Repr>) -> Polynomial {
        pv::trim(&level, &mut coeffs);
        Polynomial { level, coeffs }
    }

    pub(crate) fn repr_coeffs(&self) -> &[Repr] {
        &self.coeffs
    }

    pub fn zero(level: &Level) -> Polynomial {
        Polynomial { level: level.clone(), coeffs: Vec::new() }
    }

    pub fn one(level: &Level) -> Polynomial {
        Polynomial::from_repr(level.clone(), vec![level.one_r()])
    }

    /// The monomial x.
    pub fn x(level: &Level) -> Polynomial {
        Polynomial::from_repr(level.clone(), pv::x_poly(level))
    }

    pub fn constant(c: &FieldElement) -> Polynomial {
        Polynomial::from_repr(c.level().clone(), vec![c.repr().clone()])
    }

    /// Build from field elements, constant first.
    ///
    /// # Panics
    /// Panics if a coefficient lives at a different level.
    pub fn from_elements(level: &Level, coeffs: &[FieldElement]) -> Polynomial {
        let reprs = coeffs
            .iter()
            .map(|c| {
                assert!(c.level() == level, "coefficient level mismatch");
                c.repr().clone()
            })
            .collect();
        Polynomial::from_repr(level.clone(), reprs)
    }

    /// Build from integers, constant first, reduced mod p.
    pub fn from_ints(level: &Level, coeffs: &[i64]) -> Polynomial {
        let reprs = coeffs.iter().map(|&c| level.from_int_r(c)).collect();
        Polynomial::from_repr(level.clone(), reprs)
    }

    pub fn level(&self) -> &Level {
        &self.level
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        pv::deg(&self.coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == self.level.one_r()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().map(|c| *c == self.level.one_r()).unwrap_or(false)
    }

    /// Coefficient of x^i (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> FieldElement {
        match self.coeffs.get(i) {
            Some(r) => FieldElement::from_repr(self.level.clone(), r.clone()),
            None => self.level.zero(),
        }
    }

    /// Coefficient of x^i as a prime-field integer, when it is one.
    pub fn coeff_int(&self, i: usize) -> Option<u64> {
        self.coeff(i).as_prime_int()
    }

    pub fn leading_coeff(&self) -> FieldElement {
        match self.coeffs.last() {
            Some(r) => FieldElement::from_repr(self.level.clone(), r.clone()),
            None => self.level.zero(),
        }
    }

    fn check_level(&self, other: &Polynomial) {
        assert!(self.level == other.level, "polynomial level mismatch");
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        self.check_level(other);
        Polynomial::from_repr(self.level.clone(), pv::add(&self.level, &self.coeffs, &other.coeffs))
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.check_level(other);
        Polynomial::from_repr(self.level.clone(), pv::sub(&self.level, &self.coeffs, &other.coeffs))
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial::from_repr(self.level.clone(), pv::neg(&self.level, &self.coeffs))
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        self.check_level(other);
        Polynomial::from_repr(self.level.clone(), pv::mul(&self.level, &self.coeffs, &other.coeffs))
    }

    pub fn scale(&self, c: &FieldElement) -> Polynomial {
        assert!(c.level() == &self.level, "scalar level mismatch");
        Polynomial::from_repr(
            self.level.clone(),
            pv::scalar_mul(&self.level, &self.coeffs, c.repr()),
        )
    }

    /// Quotient and remainder.
    ///
    /// # Panics
    /// Panics when dividing by the zero polynomial.
    pub fn divrem(&self, other: &Polynomial) -> (Polynomial, Polynomial) {
        self.check_level(other);
        let (q, r) = pv::divrem(&self.level, &self.coeffs, &other.coeffs);
        (
            Polynomial::from_repr(self.level.clone(), q),
            Polynomial::from_repr(self.level.clone(), r),
        )
    }

    pub fn gcd(&self, other: &Polynomial) -> Polynomial {
        self.check_level(other);
        Polynomial::from_repr(
            self.level.clone(),
            pv::gcd_monic(&self.level, &self.coeffs, &other.coeffs),
        )
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial::from_repr(self.level.clone(), pv::deriv(&self.level, &self.coeffs))
    }

    /// The monic multiple (zero stays zero).
    pub fn monic(&self) -> Polynomial {
        if self.is_zero() {
            return self.clone();
        }
        Polynomial::from_repr(self.level.clone(), pv::make_monic(&self.level, &self.coeffs).0)
    }

    pub fn pow(&self, e: usize) -> Polynomial {
        let mut acc = Polynomial::one(&self.level);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, x: &FieldElement) -> FieldElement {
        assert!(x.level() == &self.level, "evaluation point level mismatch");
        FieldElement::from_repr(self.level.clone(), pv::eval(&self.level, &self.coeffs, x.repr()))
    }

    /// Coefficient-wise embedding into an extension level.
    pub fn embed(&self, target: &Level) -> Result<Polynomial> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                FieldElement::from_repr(self.level.clone(), c.clone())
                    .embed(target)
                    .map(|e| e.repr().clone())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Polynomial::from_repr(target.clone(), coeffs))
    }

    /// Coefficient-wise restriction to an ancestor level, when every
    /// coefficient lies there.
    pub fn try_restrict(&self, target: &Level) -> Option<Polynomial> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                FieldElement::from_repr(self.level.clone(), c.clone())
                    .try_restrict(target)
                    .map(|e| e.repr().clone())
            })
            .collect::<Option<Vec<_>>>()?;
        Some(Polynomial::from_repr(target.clone(), coeffs))
    }

    /// Inverse modulo another polynomial, when the two are coprime.
    pub fn inverse_mod(&self, modulus: &Polynomial) -> Option<Polynomial> {
        self.check_level(modulus);
        assert!(
            modulus.degree().is_some_and(|d| d >= 1),
            "modulus must have positive degree"
        );
        let mut r0 = modulus.clone();
        let mut r1 = self.divrem(modulus).1;
        let mut t0 = Polynomial::zero(&self.level);
        let mut t1 = Polynomial::one(&self.level);
        while !r1.is_zero() {
            let (q, r2) = r0.divrem(&r1);
            let t2 = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r2;
            t0 = t1;
            t1 = t2;
        }
        if r0.degree() != Some(0) {
            return None;
        }
        let c = r0.coeff(0).inv();
        Some(t0.scale(&c).divrem(modulus).1)
    }

    /// Sort key: coefficient indices from the leading coefficient down.
    fn order_key(&self) -> Vec<u128> {
        self.coeffs.iter().rev().map(|c| self.level.index_r(c)).collect()
    }
}

impl std::fmt::Display for Polynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for i in (0..self.coeffs.len()).rev() {
            let c = self.coeff(i);
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if i == 0 || !c.is_one() {
                write!(f, "{c}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

/// Result of [`factorize`]: `input = unit * prod factors[i]^mult[i]`, factors
/// monic irreducible, sorted by degree then coefficient order.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub unit: FieldElement,
    pub factors: Vec<(Polynomial, usize)>,
    /// PRNG seed used by the equal-degree stage.
    pub seed: u64,
}

impl Factorization {
    /// Multiply the factorization back together.
    pub fn product(&self) -> Polynomial {
        let level = self.unit.level().clone();
        let mut acc = Polynomial::constant(&self.unit);
        for (f, m) in &self.factors {
            acc = acc.mul(&f.pow(*m));
        }
        let _ = level;
        acc
    }
}

/// Full factorization into monic irreducibles over the polynomial's level.
pub fn factorize(f: &Polynomial) -> Result<Factorization> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let lv = f.level().clone();
    let unit = f.leading_coeff();
    let monic = f.monic();
    if monic.degree() == Some(0) {
        return Ok(Factorization { unit, factors: Vec::new(), seed: FACTOR_SEED });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(FACTOR_SEED);
    let mut factors: Vec<(Polynomial, usize)> = Vec::new();
    for (sq, mult) in squarefree_parts(&lv, monic.repr_coeffs()) {
        for (prod, d) in distinct_degree(&lv, &sq) {
            for g in equal_degree(&lv, &prod, d, &mut rng) {
                factors.push((Polynomial::from_repr(lv.clone(), g), mult));
            }
        }
    }
    factors.sort_by(|a, b| {
        (a.0.degree(), a.0.order_key(), a.1).cmp(&(b.0.degree(), b.0.order_key(), b.1))
    });
    Ok(Factorization { unit, factors, seed: FACTOR_SEED })
}

/// Squarefree decomposition in characteristic p: returns pairwise-coprime
/// monic squarefree parts with their multiplicities.
fn squarefree_parts(lv: &Level, f: &[Repr]) -> Vec<(Vec<Repr>, usize)> {
    let mut out = Vec::new();
    squarefree_inner(lv, f.to_vec(), 1, &mut out);
    out
}

fn squarefree_inner(lv: &Level, f: Vec<Repr>, mult: usize, out: &mut Vec<(Vec<Repr>, usize)>) {
    if pv::deg(&f) == Some(0) {
        return;
    }
    let fp = pv::deriv(lv, &f);
    if fp.is_empty() {
        // Every exponent is a multiple of p: take the p-th root and recurse.
        let g = pth_root_poly(lv, &f);
        squarefree_inner(lv, g, mult * lv.p() as usize, out);
        return;
    }
    let mut g = pv::gcd_monic(lv, &f, &fp);
    let mut w = pv::divrem(lv, &f, &g).0;
    let mut i = 1usize;
    while pv::deg(&w) != Some(0) {
        let y = pv::gcd_monic(lv, &w, &g);
        let z = pv::divrem(lv, &w, &y).0;
        if pv::deg(&z).map(|d| d > 0).unwrap_or(false) {
            out.push((z, i * mult));
        }
        g = pv::divrem(lv, &g, &y).0;
        w = y;
        i += 1;
    }
    if pv::deg(&g) != Some(0) {
        let h = pth_root_poly(lv, &g);
        squarefree_inner(lv, h, mult * lv.p() as usize, out);
    }
}

/// p-th root of a polynomial whose derivative vanishes (all exponents are
/// multiples of p; coefficients get their unique p-th root c^(q/p)).
fn pth_root_poly(lv: &Level, f: &[Repr]) -> Vec<Repr> {
    let p = lv.p() as usize;
    let q = lv.size();
    let root_exp = q / lv.p() as u128;
    let mut out = Vec::with_capacity(f.len() / p + 1);
    for (i, c) in f.iter().enumerate() {
        if i % p == 0 {
            out.push(lv.pow_r(c, root_exp));
        } else {
            debug_assert!(lv.is_zero_r(c), "derivative-free polynomial has gaps of p");
        }
    }
    out
}

/// Split a monic squarefree polynomial into products of irreducibles of equal
/// degree: returns (product, degree) pairs.
fn distinct_degree(lv: &Level, f: &[Repr]) -> Vec<(Vec<Repr>, usize)> {
    let mut out = Vec::new();
    let mut rest = f.to_vec();
    let x = pv::x_poly(lv);
    let mut h = x.clone();
    let mut d = 0usize;
    loop {
        let deg_rest = match pv::deg(&rest) {
            None | Some(0) => break,
            Some(k) => k,
        };
        d += 1;
        if 2 * d > deg_rest {
            out.push((rest.clone(), deg_rest));
            break;
        }
        h = pv::frob_pow_mod(lv, &h, 1, &rest);
        let diff = pv::sub(lv, &h, &pv::rem(lv, &x, &rest));
        let g = pv::gcd_monic(lv, &diff, &rest);
        if pv::deg(&g).map(|k| k > 0).unwrap_or(false) {
            out.push((g.clone(), d));
            rest = pv::divrem(lv, &rest, &g).0;
            h = pv::rem(lv, &h, &rest);
        }
    }
    out
}

/// Cantor-Zassenhaus equal-degree splitting of a monic squarefree product of
/// irreducibles all of degree `d`.
fn equal_degree(lv: &Level, f: &[Repr], d: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Repr>> {
    let n = pv::deg(f).expect("nonzero");
    if n == d {
        return vec![pv::make_monic(lv, f).0];
    }
    let q = lv.size();
    loop {
        // Random polynomial of degree < n.
        let mut a: Vec<Repr> = (0..n).map(|_| lv.from_index_r(rng.gen_range(0..q))).collect();
        pv::trim(lv, &mut a);
        if pv::deg(&a).map(|k| k < 1).unwrap_or(true) {
            continue;
        }
        let g = pv::gcd_monic(lv, &a, f);
        let split = if pv::deg(&g).map(|k| k > 0 && k < n).unwrap_or(false) {
            Some(g)
        } else {
            let b = if lv.p() == 2 {
                // Trace map over GF(2): a + a^2 + a^4 + ...
                let reps = lv.degree() * d as u64;
                let mut acc = pv::rem(lv, &a, f);
                let mut term = acc.clone();
                for _ in 1..reps {
                    term = pv::mul_mod(lv, &term, &term, f);
                    acc = pv::add(lv, &acc, &term);
                }
                acc
            } else {
                // Norm to the coefficient field, then the quadratic character:
                // a^((q^d-1)/2) = N(a)^((q-1)/2) without forming q^d.
                let mut norm = pv::rem(lv, &a, f);
                let mut frob = norm.clone();
                for _ in 1..d {
                    frob = pv::frob_pow_mod(lv, &frob, 1, f);
                    norm = pv::mul_mod(lv, &norm, &frob, f);
                }
                let mut b = pv::pow_mod(lv, &norm, (q - 1) / 2, f);
                // b - 1
                b = pv::sub(lv, &b, &[lv.one_r()]);
                b
            };
            let g = pv::gcd_monic(lv, &b, f);
            if pv::deg(&g).map(|k| k > 0 && k < n).unwrap_or(false) {
                Some(g)
            } else {
                None
            }
        };
        if let Some(g) = split {
            let h = pv::divrem(lv, f, &g).0;
            let mut out = equal_degree(lv, &g, d, rng);
            out.extend(equal_degree(lv, &h, d, rng));
            return out;
        }
    }
}

/// Distinct roots of `f` with multiplicities, at the smallest tower level
/// over which `f` splits into linear factors. Roots are sorted by canonical
/// index.
pub fn splitting_field(f: &Polynomial) -> Result<(Level, Vec<(FieldElement, usize)>)> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let lv = f.level().clone();
    let fac = factorize(f)?;
    let mut ext_needed: u128 = 1;
    for (g, _) in &fac.factors {
        let d = g.degree().unwrap() as u128;
        let gg = gcd_u128(ext_needed, d);
        ext_needed = ext_needed / gg * d;
    }
    let (target, factors) = if ext_needed == 1 {
        (lv.clone(), fac.factors)
    } else {
        let big = lv.extend(ext_needed as usize);
        let mut lifted = Vec::new();
        for (g, m) in &fac.factors {
            let ge = g.embed(&big)?;
            if g.degree() == Some(1) {
                lifted.push((ge, *m));
            } else {
                let sub = factorize(&ge)?;
                for (h, k) in sub.factors {
                    debug_assert_eq!(h.degree(), Some(1), "factor must split in the lcm level");
                    debug_assert_eq!(k, 1, "irreducible over a subfield stays squarefree");
                    lifted.push((h, *m));
                }
            }
        }
        (big, lifted)
    };
    let mut roots: Vec<(FieldElement, usize)> = Vec::new();
    for (g, m) in &factors {
        debug_assert_eq!(g.degree(), Some(1));
        let root = g.coeff(0).neg().div(&g.coeff(1));
        roots.push((root, *m));
    }
    roots.sort_by_key(|(r, _)| r.index());
    let _ = target.clone();
    Ok((target, roots))
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// The split of a characteristic polynomial into its (x-1), (x+1) and core
/// parts, with the core's roots grouped into inverse pairs.
#[derive(Clone, Debug)]
pub struct SelfDualSplit {
    /// Multiplicity of (x - 1).
    pub plus_mult: usize,
    /// Multiplicity of (x + 1).
    pub minus_mult: usize,
    /// The factor with eigenvalues != +-1, at the input level.
    pub core: Polynomial,
    /// (lambda, lambda^{-1}, multiplicity) for each inverse pair of core
    /// roots; lambda is the member with the smaller canonical index.
    pub pairs: Vec<(FieldElement, FieldElement, usize)>,
    /// Level the pair entries live at (splitting level of the core).
    pub level: Level,
}

/// Split a monic polynomial with nonzero constant term as
/// `(x-1)^l (x+1)^m * core`, requiring the core's root multiset to be closed
/// under inversion with matching multiplicities.
pub fn self_dual_split(chi: &Polynomial) -> Result<SelfDualSplit> {
    if chi.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if chi.coeff(0).is_zero() {
        return Err(Error::SingularOperator);
    }
    let lv = chi.level().clone();
    let x_minus_1 = Polynomial::from_ints(&lv, &[-1, 1]);
    let x_plus_1 = Polynomial::from_ints(&lv, &[1, 1]);
    let strip = |mut f: Polynomial, d: &Polynomial| -> (Polynomial, usize) {
        let mut count = 0;
        loop {
            let (q, r) = f.divrem(d);
            if r.is_zero() && !f.is_zero() && f.degree() >= Some(1) {
                f = q;
                count += 1;
            } else {
                return (f, count);
            }
        }
    };
    let (rest, l) = strip(chi.monic(), &x_minus_1);
    let (core, m) = strip(rest, &x_plus_1);
    let (level, roots) = splitting_field(&core)?;
    let mut taken = vec![false; roots.len()];
    let mut pairs = Vec::new();
    for i in 0..roots.len() {
        if taken[i] {
            continue;
        }
        let (lam, mult) = &roots[i];
        let inv = lam.inv();
        let j = roots
            .iter()
            .position(|(r, _)| r == &inv)
            .ok_or_else(|| Error::NotSelfDual(format!("root {lam} has no inverse partner")))?;
        if j == i {
            return Err(Error::NotSelfDual(format!(
                "root {lam} is self-inverse but is not +-1"
            )));
        }
        if taken[j] || roots[j].1 != *mult {
            return Err(Error::NotSelfDual(format!(
                "multiplicities of {lam} and its inverse differ"
            )));
        }
        taken[i] = true;
        taken[j] = true;
        let (a, b) = if lam.index() <= inv.index() {
            (lam.clone(), inv)
        } else {
            (inv, lam.clone())
        };
        pairs.push((a, b, *mult));
    }
    pairs.sort_by_key(|(a, _, _)| a.index());
    Ok(SelfDualSplit { plus_mult: l, minus_mult: m, core, pairs, level })
}

/// Chinese remainder interpolation: the unique polynomial of degree less than
/// the modulus product that is congruent to each residue modulo its modulus.
/// The moduli must be pairwise coprime.
pub fn crt(level: &Level, congruences: &[(Polynomial, Polynomial)]) -> Result<Polynomial> {
    let mut acc_r = Polynomial::zero(level);
    let mut acc_m = Polynomial::one(level);
    for (r, m) in congruences {
        // Solve acc_r + acc_m * t = r (mod m): t = (r - acc_r) / acc_m mod m.
        let diff = r.sub(&acc_r);
        let inv = pv::inv_mod(level, acc_m.repr_coeffs(), m.repr_coeffs())
            .ok_or_else(|| Error::Construction("CRT moduli are not coprime".into()))?;
        let inv = Polynomial::from_repr(level.clone(), inv);
        let t = diff.mul(&inv).divrem(m).1;
        acc_r = acc_r.add(&acc_m.mul(&t));
        acc_m = acc_m.mul(m);
    }
    Ok(acc_r.divrem(&acc_m).1)
}
