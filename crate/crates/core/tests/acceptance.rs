//! End-to-end acceptance checks.  Each test covers one numbered check and
//! prints exactly one PASS or FAIL line (visible with `--nocapture`, and on
//! any failure), including its runtime against the stated budget.

mod common;

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use isoconj::{
    apply_polynomial, bracket, brute_force_conjugate, characteristic_polynomial, classify_restriction,
    common_superlevel, elementary_divisors, enumerate_isometries, exp_nilpotent,
    generalized_eigenspace, isometry_conjugacy, log_unipotent, multiplicative_jordan,
    primary_decomposition, self_dual_split, sl2_irreducible_decomposition, sl2_triple,
    sym_power_form, BilinearSpace, ElementaryDivisorSet, Error, FieldElement, FormKind, Level,
    Matrix, RestrictionClass, Sl2Triple,
};

type CheckResult = std::result::Result<(), String>;

fn estr(e: Error) -> String {
    e.to_string()
}

/// Run one check, print its single PASS/FAIL line, and enforce the runtime
/// budget (seconds) when one is stated.
fn report(n: usize, desc: &str, budget: Option<f64>, f: impl FnOnce() -> CheckResult) {
    let start = Instant::now();
    let outcome = f();
    let dt = start.elapsed().as_secs_f64();
    match outcome {
        Ok(()) => {
            if budget.is_none_or(|b| dt < b) {
                println!("criterion {n}: PASS ({dt:.2}s) — {desc}");
            } else {
                println!("criterion {n}: FAIL ({dt:.2}s, over budget) — {desc}");
                panic!("criterion {n} exceeded its runtime budget at {dt:.2}s");
            }
        }
        Err(e) => {
            println!("criterion {n}: FAIL ({dt:.2}s) — {desc}: {e}");
            panic!("criterion {n} failed: {e}");
        }
    }
}

fn symplectic_plane(p: u64) -> BilinearSpace {
    let lv = Level::prime(p).unwrap();
    let g = Matrix::from_ints(&lv, &[&[0, 1], &[-1, 0]]);
    BilinearSpace::new(FormKind::Symplectic, g).unwrap()
}

fn orthogonal_space(p: u64, n: usize) -> BilinearSpace {
    let lv = Level::prime(p).unwrap();
    BilinearSpace::new(FormKind::Symmetric, Matrix::identity(&lv, n)).unwrap()
}

/// Exact verification of both witness equations at the witness's own level.
fn verify_witness(s: &Matrix, t: &Matrix, v: &BilinearSpace, w: &Matrix) -> CheckResult {
    let lv = w.level();
    let se = s.embed_any(lv).map_err(estr)?;
    let te = t.embed_any(lv).map_err(estr)?;
    let g = v.gram().embed_any(lv).map_err(estr)?;
    if !w.is_invertible() {
        return Err("witness is singular".into());
    }
    if w.mul(&te) != se.mul(w) {
        return Err("witness fails the conjugation equation".into());
    }
    if w.transpose().mul(&g).mul(w) != g {
        return Err("witness fails the isometry equation".into());
    }
    Ok(())
}

/// Membership in the isometry Lie algebra: Xᵀ·G + G·X = 0.
fn in_lie_algebra(x: &Matrix, v: &BilinearSpace) -> CheckResult {
    let g = v.gram().embed_any(x.level()).map_err(estr)?;
    if !x.transpose().mul(&g).add(&g.mul(x)).is_zero_matrix() {
        return Err("matrix is not in the isometry Lie algebra".into());
    }
    Ok(())
}

/// The three bracket identities plus Lie-algebra membership of all parts.
fn verify_triple(tr: &Sl2Triple, v: &BilinearSpace) -> CheckResult {
    let two = tr.e.level().from_int(2);
    if bracket(&tr.h, &tr.e) != tr.e.scale(&two) {
        return Err("[h,e] != 2e".into());
    }
    if bracket(&tr.h, &tr.f) != tr.f.scale(&two.neg()) {
        return Err("[h,f] != -2f".into());
    }
    if bracket(&tr.e, &tr.f) != tr.h {
        return Err("[e,f] != h".into());
    }
    in_lie_algebra(&tr.e, v)?;
    in_lie_algebra(&tr.h, v)?;
    in_lie_algebra(&tr.f, v)?;
    Ok(())
}

fn block_diag(a: &Matrix, b: &Matrix) -> Matrix {
    let lv = a.level().clone();
    let (n, m) = (a.rows(), b.rows());
    Matrix::from_fn(&lv, n + m, n + m, |i, j| {
        if i < n && j < n {
            a.get(i, j)
        } else if i >= n && j >= n {
            b.get(i - n, j - n)
        } else {
            lv.zero()
        }
    })
}

/// Embed a 2×2 matrix into rows/columns `rows` of an n×n identity.
fn embed_block(lv: &Level, n: usize, rows: (usize, usize), m2: &Matrix) -> Matrix {
    let pos = move |x: usize| {
        if x == rows.0 {
            Some(0)
        } else if x == rows.1 {
            Some(1)
        } else {
            None
        }
    };
    Matrix::from_fn(lv, n, n, |r, c| match (pos(r), pos(c)) {
        (Some(i), Some(j)) => m2.get(i, j),
        _ if r == c => lv.one(),
        _ => lv.zero(),
    })
}

/// Exhaustive rank-2 symplectic check for one characteristic; returns an
/// error message on the first violated pair.
fn exhaustive_symplectic_check(p: u64) -> CheckResult {
    let v = symplectic_plane(p);
    let els = enumerate_isometries(&v).map_err(estr)?;
    let expected = (p * (p * p - 1)) as usize;
    if els.len() != expected {
        return Err(format!("group order {} != {expected}", els.len()));
    }
    let divs: Vec<ElementaryDivisorSet> = els
        .iter()
        .map(elementary_divisors)
        .collect::<Result<_, _>>()
        .map_err(estr)?;
    for (i, s) in els.iter().enumerate() {
        for (j, t) in els.iter().enumerate() {
            let verdict = isometry_conjugacy(s, t, &v).map_err(estr)?;
            let same = divs[i].same_as(&divs[j]).map_err(estr)?;
            if verdict.conjugate != same {
                return Err(format!(
                    "p={p}: verdict {} but divisor equality {same} at pair ({i},{j})",
                    verdict.conjugate
                ));
            }
            match &verdict.witness {
                Some(w) => verify_witness(s, t, &v, w)?,
                None if verdict.conjugate => {
                    return Err(format!("p={p}: conjugate verdict without witness at ({i},{j})"))
                }
                None => {}
            }
        }
    }
    // Stratified sample checked against the brute-force search at the
    // quadratic extension, where every witness is guaranteed to live.
    let ext = v.level().extend(2);
    let n = els.len();
    let total = n * n;
    let stride = (total / 200).max(1);
    let (mut sampled, mut conjugate_stratum, mut distinct_stratum) = (0usize, 0usize, 0usize);
    let mut k = 0;
    while k < total {
        let (i, j) = (k / n, k % n);
        let verdict = isometry_conjugacy(&els[i], &els[j], &v).map_err(estr)?;
        let found = brute_force_conjugate(&els[i], &els[j], &v, &ext).map_err(estr)?;
        if found.is_some() != verdict.conjugate {
            return Err(format!(
                "p={p}: brute-force search disagrees with verdict at ({i},{j})"
            ));
        }
        if let Some(x) = &found {
            verify_witness(&els[i], &els[j], &v, x)?;
        }
        if verdict.conjugate {
            conjugate_stratum += 1;
        } else {
            distinct_stratum += 1;
        }
        sampled += 1;
        k += stride;
    }
    if sampled < 200 {
        return Err(format!("p={p}: only {sampled} sampled pairs"));
    }
    if conjugate_stratum == 0 || distinct_stratum == 0 {
        return Err(format!("p={p}: sample is not stratified across both outcomes"));
    }
    Ok(())
}

#[test]
fn symplectic_rank_two_exhaustive() {
    report(
        1,
        "all ordered pairs of Sp(2,GF(3)) and Sp(2,GF(5)): verdict = divisor equality, exact witnesses, brute-force agreement on a stratified sample",
        Some(60.0),
        || {
            exhaustive_symplectic_check(3)?;
            exhaustive_symplectic_check(5)
        },
    );
}

#[test]
fn orthogonal_rank_three() {
    report(
        2,
        "O(2,GF(5)) fully pairwise and 100 random O(3,GF(7)) isometries: verdicts match divisor equality with exact witnesses",
        Some(60.0),
        || {
            // Rank 2: the full group, every ordered pair.
            let v2 = orthogonal_space(5, 2);
            let els = enumerate_isometries(&v2).map_err(estr)?;
            if els.len() != 8 {
                return Err(format!("O(2,GF(5)) has {} elements, expected 8", els.len()));
            }
            let divs: Vec<ElementaryDivisorSet> = els
                .iter()
                .map(elementary_divisors)
                .collect::<Result<_, _>>()
                .map_err(estr)?;
            for (i, s) in els.iter().enumerate() {
                for (j, t) in els.iter().enumerate() {
                    let verdict = isometry_conjugacy(s, t, &v2).map_err(estr)?;
                    let same = divs[i].same_as(&divs[j]).map_err(estr)?;
                    if verdict.conjugate != same {
                        return Err(format!("rank-2 verdict mismatch at ({i},{j})"));
                    }
                    if let Some(w) = &verdict.witness {
                        verify_witness(s, t, &v2, w)?;
                    } else if verdict.conjugate {
                        return Err(format!("missing witness at ({i},{j})"));
                    }
                }
            }
            // Rank 3: products of embedded planar isometries and sign maps.
            let v3 = orthogonal_space(7, 3);
            let lv7 = v3.level().clone();
            let o2 = enumerate_isometries(&orthogonal_space(7, 2)).map_err(estr)?;
            let positions = [(0usize, 1usize), (0, 2), (1, 2)];
            let mut rng = ChaCha8Rng::seed_from_u64(0xACCE55);
            let mut isos: Vec<Matrix> = Vec::with_capacity(100);
            while isos.len() < 100 {
                let mut t = Matrix::identity(&lv7, 3);
                for _ in 0..(3 + rng.gen_range(0..4)) {
                    if rng.gen_range(0..4) == 0 {
                        let d = Matrix::from_fn(&lv7, 3, 3, |i, j| {
                            if i == j {
                                if rng.gen::<bool>() {
                                    lv7.one()
                                } else {
                                    lv7.from_int(-1)
                                }
                            } else {
                                lv7.zero()
                            }
                        });
                        t = t.mul(&d);
                    } else {
                        let blk = &o2[rng.gen_range(0..o2.len())];
                        let pos = positions[rng.gen_range(0..3)];
                        t = t.mul(&embed_block(&lv7, 3, pos, blk));
                    }
                }
                if !v3.is_isometry(&t).map_err(estr)? {
                    return Err("generator produced a non-isometry".into());
                }
                isos.push(t);
            }
            let divs3: Vec<ElementaryDivisorSet> = isos
                .iter()
                .map(elementary_divisors)
                .collect::<Result<_, _>>()
                .map_err(estr)?;
            for i in 0..isos.len() {
                // A fixed-offset pairing across the corpus ...
                let j = (i * 37 + 11) % isos.len();
                let verdict = isometry_conjugacy(&isos[i], &isos[j], &v3).map_err(estr)?;
                let same = divs3[i].same_as(&divs3[j]).map_err(estr)?;
                if verdict.conjugate != same {
                    return Err(format!("rank-3 verdict mismatch at ({i},{j})"));
                }
                if let Some(w) = &verdict.witness {
                    verify_witness(&isos[i], &isos[j], &v3, w)?;
                } else if verdict.conjugate {
                    return Err(format!("rank-3 missing witness at ({i},{j})"));
                }
                // ... and a conjugated copy, which must come back conjugate.
                let r = &isos[(i * 53 + 29) % isos.len()];
                let t2 = r.mul(&isos[i]).mul(&r.inverse().map_err(estr)?);
                let verdict = isometry_conjugacy(&isos[i], &t2, &v3).map_err(estr)?;
                if !verdict.conjugate {
                    return Err(format!("conjugated copy of element {i} judged non-conjugate"));
                }
                verify_witness(&isos[i], &t2, &v3, verdict.witness.as_ref().unwrap())?;
            }
            Ok(())
        },
    );
}

#[test]
fn weight_model_form_table() {
    report(
        3,
        "invariant forms on the weight models m=1..6 over GF(11) match the closed-form table with parity-matched kinds",
        Some(1.0),
        || {
            let lv = Level::prime(11).map_err(estr)?;
            let mut fact = vec![lv.one()];
            for k in 1..=6usize {
                let prev = fact[k - 1].clone();
                fact.push(prev.mul(&lv.from_int(k as i64)));
            }
            for m in 1..=6usize {
                let b = sym_power_form(m, &lv).map_err(estr)?;
                let want_kind = if m % 2 == 0 {
                    FormKind::Symmetric
                } else {
                    FormKind::Symplectic
                };
                if b.kind() != want_kind {
                    return Err(format!("m={m}: kind {:?}", b.kind()));
                }
                let minv = fact[m].inv();
                for i in 0..=m {
                    for j in 0..=m {
                        let want = if i + j == m {
                            let mut c = fact[i].mul(&fact[m - i]).mul(&minv);
                            if i % 2 == 1 {
                                c = c.neg();
                            }
                            c
                        } else {
                            lv.zero()
                        };
                        if b.gram().get(i, j) != want {
                            return Err(format!("m={m}: entry ({i},{j}) differs"));
                        }
                    }
                }
            }
            Ok(())
        },
    );
}

/// At least 20 unipotent isometries of dimension 3–4: exponentials of
/// nilpotent Lie-algebra elements of the weight models, and paired maps on
/// a hyperbolic 4-space of each kind.
fn unipotent_cases() -> std::result::Result<Vec<(Matrix, BilinearSpace)>, String> {
    let lv7 = Level::prime(7).map_err(estr)?;
    let mut out: Vec<(Matrix, BilinearSpace)> = Vec::new();
    let b2 = sym_power_form(2, &lv7).map_err(estr)?;
    let e2 = Matrix::from_ints(&lv7, &[&[0, 1, 0], &[0, 0, 2], &[0, 0, 0]]);
    let f2 = Matrix::from_ints(&lv7, &[&[0, 0, 0], &[2, 0, 0], &[0, 1, 0]]);
    for c in 1..=6i64 {
        let t = exp_nilpotent(&e2.scale(&lv7.from_int(c))).map_err(estr)?;
        out.push((t, b2.clone()));
    }
    for c in 1..=4i64 {
        let t = exp_nilpotent(&f2.scale(&lv7.from_int(c))).map_err(estr)?;
        out.push((t, b2.clone()));
    }
    let b3 = sym_power_form(3, &lv7).map_err(estr)?;
    let e3 = Matrix::from_ints(
        &lv7,
        &[&[0, 1, 0, 0], &[0, 0, 2, 0], &[0, 0, 0, 3], &[0, 0, 0, 0]],
    );
    for c in 1..=6i64 {
        let t = exp_nilpotent(&e3.scale(&lv7.from_int(c))).map_err(estr)?;
        out.push((t, b3.clone()));
    }
    for (kind, eps) in [(FormKind::Symmetric, 1i64), (FormKind::Symplectic, -1)] {
        let gram = Matrix::from_fn(&lv7, 4, 4, |i, j| {
            if j == i + 2 {
                lv7.one()
            } else if i == j + 2 {
                lv7.from_int(eps)
            } else {
                lv7.zero()
            }
        });
        let vp = BilinearSpace::new(kind, gram).map_err(estr)?;
        for c in 1..=3i64 {
            let u = Matrix::from_ints(&lv7, &[&[1, c], &[0, 1]]);
            let udual = Matrix::from_ints(&lv7, &[&[1, 0], &[-c, 1]]);
            out.push((block_diag(&u, &udual), vp.clone()));
        }
    }
    Ok(out)
}

#[test]
fn sl2_completion_suite() {
    report(
        4,
        "sl2 completions for every unipotent of Sp(2,GF(5)) and 22 unipotent isometries in dimensions 3–4: brackets, membership, and exponential certificates",
        Some(30.0),
        || {
            // Every unipotent element of the rank-2 symplectic group.
            let v = symplectic_plane(5);
            let els = enumerate_isometries(&v).map_err(estr)?;
            let i2 = Matrix::identity(v.level(), 2);
            let mut unipotents = 0usize;
            for t in &els {
                let nil = t.sub(&i2);
                if !nil.mul(&nil).is_zero_matrix() {
                    continue;
                }
                unipotents += 1;
                if nil.is_zero_matrix() {
                    match sl2_triple(&nil, &v) {
                        Err(Error::ZeroNilpotent) => continue,
                        other => return Err(format!("identity gave {other:?}")),
                    }
                }
                let tr = sl2_triple(&nil, &v).map_err(estr)?;
                verify_triple(&tr, &v)?;
                let ex = exp_nilpotent(&tr.e).map_err(estr)?;
                if ex != *t {
                    return Err("exponential does not reproduce the operator".into());
                }
                if !v.is_isometry(&ex).map_err(estr)? {
                    return Err("exponential is not an isometry".into());
                }
            }
            if unipotents != 25 {
                return Err(format!("found {unipotents} unipotents in Sp(2,GF(5)), expected 25"));
            }
            // Higher-dimensional corpus.
            let cases = unipotent_cases()?;
            if cases.len() < 20 {
                return Err(format!("only {} corpus elements", cases.len()));
            }
            for (idx, (t, vt)) in cases.iter().enumerate() {
                if !vt.is_isometry(t).map_err(estr)? {
                    return Err(format!("corpus element {idx} is not an isometry"));
                }
                let e = log_unipotent(t).map_err(estr)?;
                let tr = sl2_triple(&e, vt).map_err(estr)?;
                verify_triple(&tr, vt)?;
                let nil = t.sub(&Matrix::identity(t.level(), t.rows()));
                if nil.mul(&nil).is_zero_matrix() {
                    if tr.e != nil {
                        return Err(format!("element {idx}: square-zero case must use T - I"));
                    }
                    if exp_nilpotent(&tr.e).map_err(estr)? != *t {
                        return Err(format!("element {idx}: exp(T - I) != T"));
                    }
                }
                let ex = exp_nilpotent(&tr.e).map_err(estr)?;
                if !vt.is_isometry(&ex).map_err(estr)? {
                    return Err(format!("element {idx}: exp(e) is not an isometry"));
                }
                if ex != *t {
                    return Err(format!("element {idx}: exp does not invert the logarithm"));
                }
            }
            Ok(())
        },
    );
}

#[test]
fn summand_parity_law() {
    report(
        5,
        "irreducible summands across the sl2 suite: never mixed, and nondegenerate exactly when dimension parity matches the form kind",
        None,
        || {
            let mut cases = unipotent_cases()?;
            let v = symplectic_plane(5);
            let i2 = Matrix::identity(v.level(), 2);
            for t in enumerate_isometries(&v).map_err(estr)? {
                let nil = t.sub(&i2);
                if nil.mul(&nil).is_zero_matrix() && !nil.is_zero_matrix() {
                    cases.push((t, v.clone()));
                }
            }
            let mut summands = 0usize;
            for (idx, (t, vt)) in cases.iter().enumerate() {
                let e = log_unipotent(t).map_err(estr)?;
                let tr = sl2_triple(&e, vt).map_err(estr)?;
                let parts = sl2_irreducible_decomposition(&tr, vt).map_err(estr)?;
                let mut covered = 0usize;
                for s in &parts {
                    let dim = s.weight + 1;
                    covered += dim;
                    let class = classify_restriction(&s.subspace, vt).map_err(estr)?;
                    if class == RestrictionClass::Mixed {
                        return Err(format!("element {idx}: mixed restriction on a summand"));
                    }
                    let parity_matches = match vt.kind() {
                        FormKind::Symmetric => dim % 2 == 1,
                        FormKind::Symplectic => dim % 2 == 0,
                    };
                    if (class == RestrictionClass::Nondegenerate) != parity_matches {
                        return Err(format!(
                            "element {idx}: {dim}-dimensional summand is {class} under a {} form",
                            vt.kind().as_str()
                        ));
                    }
                    summands += 1;
                }
                if covered != vt.dim() {
                    return Err(format!("element {idx}: summands cover {covered} of {}", vt.dim()));
                }
            }
            if summands < 40 {
                return Err(format!("only {summands} summands examined"));
            }
            Ok(())
        },
    );
}

fn sp4_space() -> BilinearSpace {
    let lv = Level::prime(7).unwrap();
    let g = Matrix::from_ints(
        &lv,
        &[
            &[0, 0, 1, 0],
            &[0, 0, 0, 1],
            &[-1, 0, 0, 0],
            &[0, -1, 0, 0],
        ],
    );
    BilinearSpace::new(FormKind::Symplectic, g).unwrap()
}

/// 100 pseudo-random rank-4 symplectic isometries built block-wise from
/// invertible-block maps and symmetric transvections.
fn sp4_corpus(v: &BilinearSpace) -> std::result::Result<Vec<Matrix>, String> {
    let lv = v.level().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    let rand_el = |rng: &mut ChaCha8Rng, lv: &Level| lv.from_int(rng.gen_range(0..7));
    let mut out = Vec::with_capacity(100);
    while out.len() < 100 {
        let mut t = Matrix::identity(&lv, 4);
        for _ in 0..5 {
            let factor = match rng.gen_range(0..3) {
                0 => {
                    let a = loop {
                        let cand = Matrix::from_fn(&lv, 2, 2, |_, _| rand_el(&mut rng, &lv));
                        if cand.is_invertible() {
                            break cand;
                        }
                    };
                    let adual = a.inverse().map_err(estr)?.transpose();
                    block_diag(&a, &adual)
                }
                k => {
                    let (b0, b1, b2) = (
                        rand_el(&mut rng, &lv),
                        rand_el(&mut rng, &lv),
                        rand_el(&mut rng, &lv),
                    );
                    Matrix::from_fn(&lv, 4, 4, |i, j| {
                        let (bi, bj) = if k == 1 { (i, j) } else { (j, i) };
                        if i == j {
                            lv.one()
                        } else if bi < 2 && bj >= 2 {
                            match (bi, bj - 2) {
                                (0, 0) => b0.clone(),
                                (1, 1) => b2.clone(),
                                _ => b1.clone(),
                            }
                        } else {
                            lv.zero()
                        }
                    })
                }
            };
            t = t.mul(&factor);
        }
        if !v.is_isometry(&t).map_err(estr)? {
            return Err("block-wise generator produced a non-isometry".into());
        }
        out.push(t);
    }
    Ok(out)
}

#[test]
fn jordan_parts_on_random_corpus() {
    report(
        6,
        "multiplicative Jordan parts of 100 random Sp(4,GF(7)) isometries: product, commutation, isometry, certificates, and eigen-data uniqueness",
        Some(60.0),
        || {
            let v = sp4_space();
            let corpus = sp4_corpus(&v)?;
            for (idx, t) in corpus.iter().enumerate() {
                let jp = multiplicative_jordan(t, &v).map_err(estr)?;
                if jp.ts.mul(&jp.tu) != *t {
                    return Err(format!("element {idx}: parts do not multiply back"));
                }
                if jp.ts.mul(&jp.tu) != jp.tu.mul(&jp.ts) {
                    return Err(format!("element {idx}: parts do not commute"));
                }
                if !v.is_isometry(&jp.ts).map_err(estr)? || !v.is_isometry(&jp.tu).map_err(estr)? {
                    return Err(format!("element {idx}: a part is not an isometry"));
                }
                if apply_polynomial(&jp.p_s, t) != jp.ts {
                    return Err(format!("element {idx}: semisimple certificate fails"));
                }
                if apply_polynomial(&jp.p_u, t) != jp.tu {
                    return Err(format!("element {idx}: unipotent certificate fails"));
                }
                // Uniqueness: re-derive the diagonalizable part from
                // eigen-data alone and compare.
                let ed = elementary_divisors(t).map_err(estr)?;
                let te = t.embed_any(&ed.level).map_err(estr)?;
                let mut lams: Vec<FieldElement> = Vec::new();
                for (lam, _) in &ed.entries {
                    if !lams.contains(lam) {
                        lams.push(lam.clone());
                    }
                }
                let mut cols: Vec<Matrix> = Vec::new();
                let mut diag: Vec<FieldElement> = Vec::new();
                for lam in &lams {
                    let sub = generalized_eigenspace(&te, lam).map_err(estr)?;
                    for c in 0..sub.dim() {
                        cols.push(sub.basis().col(c));
                        diag.push(lam.clone());
                    }
                }
                let refs: Vec<&Matrix> = cols.iter().collect();
                let q = Matrix::hstack(&refs);
                let d = Matrix::from_fn(&ed.level, diag.len(), diag.len(), |i, j| {
                    if i == j {
                        diag[i].clone()
                    } else {
                        ed.level.zero()
                    }
                });
                let rederived = q.mul(&d).mul(&q.inverse().map_err(estr)?);
                if rederived != jp.ts.embed_any(&ed.level).map_err(estr)? {
                    return Err(format!("element {idx}: eigen-data re-derivation differs"));
                }
            }
            Ok(())
        },
    );
}

#[test]
fn primary_split_invariants_on_random_corpus() {
    report(
        7,
        "primary decompositions of the same corpus: orthogonality, nondegeneracy, paired dimensions, isotropy, and polynomial split agreement",
        None,
        || {
            let v = sp4_space();
            let corpus = sp4_corpus(&v)?;
            for (idx, t) in corpus.iter().enumerate() {
                let pd = primary_decomposition(t, &v).map_err(estr)?;
                let g = v.gram().embed_any(&pd.level).map_err(estr)?;
                let mut blocks: Vec<Matrix> = Vec::new();
                for c in pd.plus_part.iter().chain(pd.minus_part.iter()) {
                    let b = c.subspace.basis();
                    if !b.transpose().mul(&g).mul(b).is_invertible() {
                        return Err(format!("element {idx}: degenerate ±1 component"));
                    }
                    blocks.push(b.clone());
                }
                for c in &pd.standard_parts {
                    if c.v_lambda.dim() != c.v_lambda_inv.dim() {
                        return Err(format!("element {idx}: unequal paired dimensions"));
                    }
                    let e = c.v_lambda.basis();
                    let f = c.v_lambda_inv.basis();
                    if !e.transpose().mul(&g).mul(e).is_zero_matrix()
                        || !f.transpose().mul(&g).mul(f).is_zero_matrix()
                    {
                        return Err(format!("element {idx}: eigenspace is not isotropic"));
                    }
                    if !e.transpose().mul(&g).mul(f).is_invertible() {
                        return Err(format!("element {idx}: degenerate duality pairing"));
                    }
                    blocks.push(Matrix::hstack(&[e, f]));
                }
                for i in 0..blocks.len() {
                    for j in 0..blocks.len() {
                        if i != j
                            && !blocks[i].transpose().mul(&g).mul(&blocks[j]).is_zero_matrix()
                        {
                            return Err(format!("element {idx}: components {i},{j} not orthogonal"));
                        }
                    }
                }
                let covered: usize = blocks.iter().map(Matrix::cols).sum();
                if covered != v.dim() {
                    return Err(format!("element {idx}: components cover {covered} of {}", v.dim()));
                }
                // The polynomial-level split must match the component data.
                let chi = characteristic_polynomial(t).map_err(estr)?;
                let sds = self_dual_split(&chi).map_err(estr)?;
                let plus_dim = pd.plus_part.as_ref().map_or(0, |c| c.subspace.dim());
                let minus_dim = pd.minus_part.as_ref().map_or(0, |c| c.subspace.dim());
                if sds.plus_mult != plus_dim || sds.minus_mult != minus_dim {
                    return Err(format!("element {idx}: ±1 multiplicities disagree"));
                }
                if sds.pairs.len() != pd.standard_parts.len() {
                    return Err(format!("element {idx}: pair counts disagree"));
                }
                let join = common_superlevel(&sds.level, &pd.level).map_err(estr)?;
                for (lam, lam_inv, mult) in &sds.pairs {
                    let lj = lam.embed(&join).map_err(estr)?;
                    let lij = lam_inv.embed(&join).map_err(estr)?;
                    let matched = pd.standard_parts.iter().find(|c| {
                        c.lambda
                            .embed(&join)
                            .map(|cl| cl == lj || cl == lij)
                            .unwrap_or(false)
                    });
                    match matched {
                        Some(c) if c.v_lambda.dim() == *mult => {}
                        Some(_) => {
                            return Err(format!("element {idx}: pair multiplicity disagrees"))
                        }
                        None => return Err(format!("element {idx}: unmatched eigenvalue pair")),
                    }
                }
            }
            Ok(())
        },
    );
}

#[test]
fn cli_corpus_determinism() {
    report(
        8,
        "every subcommand on the fixed 12-case corpus produces byte-identical output across repeated runs",
        None,
        || {
            let cases = common::corpus();
            if cases.len() != 12 {
                return Err(format!("corpus has {} cases, expected 12", cases.len()));
            }
            for case in cases {
                let (first, code1) = common::run(&case.args);
                let (second, code2) = common::run(&case.args);
                if code1 != case.exit || code2 != case.exit {
                    return Err(format!("{}: exit codes {code1}/{code2}", case.name));
                }
                if first.is_empty() {
                    return Err(format!("{}: empty output", case.name));
                }
                if first != second {
                    return Err(format!("{}: repeated runs differ", case.name));
                }
            }
            Ok(())
        },
    );
}
