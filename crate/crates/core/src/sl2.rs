//! Three-dimensional simple subalgebras of an isometry Lie algebra:
//! completing a nilpotent operator to an (e, h, f) triple by solving exact
//! linear systems, splitting the space into irreducible summands, the
//! canonical symmetric-power forms, and the orthogonal decomposition of a
//! unipotent isometry into indecomposables and isotropic dual pairs.

use crate::error::{Error, Result};
use crate::field::{FieldElement, Level};
use crate::forms::{orthogonalize_symmetric, symplectic_standardize, BilinearSpace, FormKind};
use crate::linalg::{kernel, least_solution, operator_matrix, Matrix, Subspace};

/// Commutator [a, b] = a·b − b·a.
pub fn bracket(a: &Matrix, b: &Matrix) -> Matrix {
    a.mul(b).sub(&b.mul(a))
}

/// An sl2 triple inside an isometry Lie algebra: [h,e] = 2e, [h,f] = −2f,
/// [e,f] = h, all three members satisfying Xᵀ·G + G·X = 0.
#[derive(Clone, Debug)]
pub struct Sl2Triple {
    pub e: Matrix,
    pub h: Matrix,
    pub f: Matrix,
}

/// How a bilinear form behaves on a subspace.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RestrictionClass {
    /// The restricted form vanishes identically.
    Zero,
    /// The restricted form is non-degenerate.
    Nondegenerate,
    /// Neither zero nor non-degenerate.
    Mixed,
}

impl RestrictionClass {
    pub fn as_str(self) -> &'static str {
        match self {
            RestrictionClass::Zero => "zero",
            RestrictionClass::Nondegenerate => "nondegenerate",
            RestrictionClass::Mixed => "mixed",
        }
    }
}

impl std::fmt::Display for RestrictionClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One irreducible summand of an sl2 action: spanned by a highest-weight
/// vector v and its images f·v, f²·v, …, with dimension weight + 1.
#[derive(Clone, Debug)]
pub struct IrreducibleSummand {
    /// Basis columns are [v, f·v, …, f^m·v] (weights m, m−2, …, −m).
    pub subspace: Subspace,
    /// Highest weight m; the summand has dimension m + 1.
    pub weight: usize,
    /// Behaviour of the ambient form on this summand.
    pub restriction_class: RestrictionClass,
}

/// Orthogonal decomposition of a unipotent isometry's space into
/// form-indecomposable summands and isotropic dual pairs.
#[derive(Clone, Debug)]
pub struct UnipotentOrthogonalDecomposition {
    /// Summands carrying a non-degenerate restricted form.
    pub indecomposables: Vec<IrreducibleSummand>,
    /// Pairs of totally isotropic summands of equal dimension whose cross
    /// pairing is non-degenerate.
    pub standard_pairs: Vec<(IrreducibleSummand, IrreducibleSummand)>,
}

/// Classify the ambient form's restriction to a subspace.
pub fn classify_restriction(w: &Subspace, v: &BilinearSpace) -> Result<RestrictionClass> {
    if w.ambient_dim() != v.dim() {
        return Err(Error::Shape(format!(
            "subspace ambient dimension {} in a dimension-{} space",
            w.ambient_dim(),
            v.dim()
        )));
    }
    if w.level() != v.level() {
        return Err(Error::LevelMismatch);
    }
    let g = v.gram_on(w.basis());
    Ok(if g.is_zero_matrix() {
        RestrictionClass::Zero
    } else if g.is_invertible() {
        RestrictionClass::Nondegenerate
    } else {
        RestrictionClass::Mixed
    })
}

/// The canonical invariant form on the space of degree-m binary forms, in
/// the monomial basis: anti-diagonal with entry (−1)^i·i!(m−i)!/m! at
/// position (i, m−i). Symmetric for even m, symplectic for odd m.
/// Requires p > m so that m! is invertible.
pub fn sym_power_form(m: usize, level: &Level) -> Result<BilinearSpace> {
    let p = level.p();
    if p as usize <= m {
        return Err(Error::CharacteristicTooSmall { p, dim: m });
    }
    let fact = |k: usize| -> FieldElement {
        let mut acc = level.one();
        for i in 2..=k {
            acc = acc.mul(&level.from_int(i as i64));
        }
        acc
    };
    let m_fact_inv = fact(m).inv();
    let n = m + 1;
    let mut g = Matrix::zero(level, n, n);
    for i in 0..n {
        let mut entry = fact(i).mul(&fact(m - i)).mul(&m_fact_inv);
        if i % 2 == 1 {
            entry = entry.neg();
        }
        g.set(i, m - i, &entry);
    }
    let kind = if m.is_multiple_of(2) { FormKind::Symmetric } else { FormKind::Symplectic };
    BilinearSpace::new(kind, g)
}

/// Rows asserting membership in the isometry Lie algebra: the linear map
/// X ↦ Xᵀ·G + G·X on vectorized operators.
fn membership_rows(v: &BilinearSpace) -> Matrix {
    let n = v.dim();
    let g = v.gram().clone();
    operator_matrix(v.level(), n, n, |x| x.transpose().mul(&g).add(&g.mul(x)))
}

/// Complete a nonzero nilpotent member of the isometry Lie algebra to an
/// sl2 triple (e = the input, h, f), solving two exact linear systems and
/// always taking the least solution in coordinate order.
///
/// Requires p > dim. A zero input is rejected with `ZeroNilpotent` (there
/// is nothing to embed: the operator it came from is the identity).
pub fn sl2_triple(n_mat: &Matrix, v: &BilinearSpace) -> Result<Sl2Triple> {
    if !n_mat.is_square() || n_mat.rows() != v.dim() {
        return Err(Error::Shape(format!(
            "operator is {}x{} on a dimension-{} space",
            n_mat.rows(),
            n_mat.cols(),
            v.dim()
        )));
    }
    if n_mat.level() != v.level() {
        return Err(Error::LevelMismatch);
    }
    let lv = n_mat.level().clone();
    let n = n_mat.rows();
    if (lv.p() as usize) <= n {
        return Err(Error::CharacteristicTooSmall { p: lv.p(), dim: n });
    }
    if n_mat.is_zero_matrix() {
        return Err(Error::ZeroNilpotent);
    }
    if !n_mat.pow(n).is_zero_matrix() {
        return Err(Error::NotNilpotent);
    }
    if !v.in_lie_algebra(n_mat)? {
        return Err(Error::NotInLieAlgebra);
    }
    let e = n_mat.clone();
    let two = lv.from_int(2);
    let mem = membership_rows(v);
    let zeros = Matrix::zero(&lv, n * n, 1);
    // Stage 1: find z in the Lie algebra with [[e, z], e] = 2e; then
    // h = [e, z] lies in the image of ad(e), which makes it completable.
    let op1 = operator_matrix(&lv, n, n, |z| bracket(&bracket(&e, z), &e));
    let a1 = Matrix::vstack(&[&op1, &mem]);
    let b1 = Matrix::vstack(&[&e.scale(&two).vectorize(), &zeros]);
    let z_vec = least_solution(&a1, &b1)
        .ok_or_else(|| Error::Construction("no Lie-algebra completion for h".into()))?;
    let z = Matrix::unvectorize(&lv, n, n, &z_vec);
    let h = bracket(&e, &z);
    // Stage 2: find f in the Lie algebra with [e, f] = h and [h, f] = −2f.
    let op_e = operator_matrix(&lv, n, n, |x| bracket(&e, x));
    let op_h = operator_matrix(&lv, n, n, |x| bracket(&h, x).add(&x.scale(&two)));
    let a2 = Matrix::vstack(&[&op_e, &op_h, &mem]);
    let b2 = Matrix::vstack(&[&h.vectorize(), &zeros, &zeros]);
    let f_vec = least_solution(&a2, &b2)
        .ok_or_else(|| Error::Construction("no Lie-algebra completion for f".into()))?;
    let f = Matrix::unvectorize(&lv, n, n, &f_vec);
    let ok = bracket(&h, &e) == e.scale(&two)
        && bracket(&h, &f) == f.scale(&two).neg()
        && bracket(&e, &f) == h
        && v.in_lie_algebra(&h)?
        && v.in_lie_algebra(&f)?
        && f.pow(n).is_zero_matrix();
    if !ok {
        return Err(Error::Construction("triple failed verification".into()));
    }
    Ok(Sl2Triple { e, h, f })
}

/// Intersect a subspace (given by basis columns) with the λ-eigenspace of
/// an operator.
fn eigen_slice(basis: &Matrix, op: &Matrix, lambda: &FieldElement) -> Matrix {
    let shifted = op
        .sub(&Matrix::scalar(op.level(), op.rows(), lambda))
        .mul(basis);
    basis.mul(&shifted.kernel_matrix())
}

/// Split the space into irreducible summands of the triple's action.
///
/// Summands are listed by descending highest weight. Within one weight the
/// multiplicity space (highest-weight vectors) is canonicalized against the
/// form γ(u, w) = B(u, f^m·w): when γ is symmetric it is diagonalized,
/// producing summands with non-degenerate restriction; when γ is
/// alternating it is put in standard symplectic shape, producing adjacent
/// isotropic partners.
pub fn sl2_irreducible_decomposition(
    t: &Sl2Triple,
    v: &BilinearSpace,
) -> Result<Vec<IrreducibleSummand>> {
    let lv = t.e.level().clone();
    let n = v.dim();
    if t.e.rows() != n || t.h.rows() != n || t.f.rows() != n {
        return Err(Error::Shape("triple dimension mismatch".into()));
    }
    if t.e.level() != v.level() {
        return Err(Error::LevelMismatch);
    }
    let ker_e = kernel(&t.e);
    let mut out: Vec<IrreducibleSummand> = Vec::new();
    let mut covered = 0usize;
    for m in (0..n).rev() {
        if covered == n {
            break;
        }
        let lam = lv.from_int(m as i64);
        let h_m = eigen_slice(ker_e.basis(), &t.h, &lam);
        let mult = h_m.cols();
        if mult == 0 {
            continue;
        }
        let f_m = t.f.pow(m);
        let gamma = h_m.transpose().mul(v.gram()).mul(&f_m).mul(&h_m);
        let symmetric_gamma = gamma == gamma.transpose();
        let q = if symmetric_gamma {
            orthogonalize_symmetric(&gamma)?
        } else if gamma == gamma.transpose().neg() {
            symplectic_standardize(&gamma)?
        } else {
            return Err(Error::Construction("multiplicity form is unstructured".into()));
        };
        let canon = h_m.mul(&q);
        // Interleave symplectic partners (u_i, w_i) so each isotropic
        // summand is adjacent to its dual.
        let order: Vec<usize> = if symmetric_gamma {
            (0..mult).collect()
        } else {
            let half = mult / 2;
            (0..half).flat_map(|i| [i, half + i]).collect()
        };
        for &idx in &order {
            let top = canon.col(idx);
            let mut cols: Vec<Matrix> = Vec::with_capacity(m + 1);
            let mut cur = top;
            for _ in 0..=m {
                cols.push(cur.clone());
                cur = t.f.mul(&cur);
            }
            let refs: Vec<&Matrix> = cols.iter().collect();
            let basis = Matrix::hstack(&refs);
            let subspace = Subspace::from_basis(basis)?;
            let restriction_class = classify_restriction(&subspace, v)?;
            out.push(IrreducibleSummand { subspace, weight: m, restriction_class });
            covered += m + 1;
        }
    }
    // Direct-sum check: the concatenated bases must fill the space.
    let all: Vec<&Matrix> = out.iter().map(|s| s.subspace.basis()).collect();
    if covered != n || !Matrix::hstack(&all).is_invertible() {
        return Err(Error::Construction("summands do not span the space".into()));
    }
    // Weight structure check: h scales each chain vector by m − 2k.
    for s in &out {
        let b = s.subspace.basis();
        for k in 0..=s.weight {
            let expect = lv.from_int(s.weight as i64 - 2 * k as i64);
            if t.h.mul(&b.col(k)) != b.col(k).scale(&expect) {
                return Err(Error::Construction("weight ladder violated".into()));
            }
        }
    }
    Ok(out)
}

/// Truncated exponential series Σ_{k<dim} N^k/k! of a nilpotent matrix;
/// exact because the series terminates and p > dim keeps the factorials
/// invertible.
pub fn exp_nilpotent(n_mat: &Matrix) -> Result<Matrix> {
    if !n_mat.is_square() {
        return Err(Error::NotSquare { rows: n_mat.rows(), cols: n_mat.cols() });
    }
    let lv = n_mat.level().clone();
    let n = n_mat.rows();
    if (lv.p() as usize) <= n {
        return Err(Error::CharacteristicTooSmall { p: lv.p(), dim: n });
    }
    if !n_mat.pow(n).is_zero_matrix() {
        return Err(Error::NotNilpotent);
    }
    let mut acc = Matrix::identity(&lv, n);
    let mut term = Matrix::identity(&lv, n);
    for k in 1..n {
        term = term.mul(n_mat).scale(&lv.from_int(k as i64).inv());
        acc = acc.add(&term);
    }
    Ok(acc)
}

/// Truncated logarithm Σ_{1≤k<dim} (−1)^{k+1}(T−I)^k/k of a unipotent
/// matrix; exact inverse of `exp_nilpotent`, and a member of the isometry
/// Lie algebra whenever T is an isometry. Equals T − I exactly when
/// (T−I)² = 0.
pub fn log_unipotent(t: &Matrix) -> Result<Matrix> {
    if !t.is_square() {
        return Err(Error::NotSquare { rows: t.rows(), cols: t.cols() });
    }
    let lv = t.level().clone();
    let n = t.rows();
    if (lv.p() as usize) <= n {
        return Err(Error::CharacteristicTooSmall { p: lv.p(), dim: n });
    }
    let nil = t.sub(&Matrix::identity(&lv, n));
    if !nil.pow(n).is_zero_matrix() {
        return Err(Error::NotUnipotent);
    }
    let mut acc = Matrix::zero(&lv, n, n);
    let mut term = Matrix::identity(&lv, n);
    for k in 1..n {
        term = term.mul(&nil);
        let mut coef = lv.from_int(k as i64).inv();
        if k % 2 == 0 {
            coef = coef.neg();
        }
        acc = acc.add(&term.scale(&coef));
    }
    Ok(acc)
}

/// Decompose the space of a unipotent isometry into form-indecomposable
/// summands and isotropic dual pairs, via the sl2 triple of log(T) — the
/// Lie-algebra representative of T, which reduces to T − I in the
/// square-zero case. The identity operator (zero logarithm) is handled
/// directly as the weight-0 case.
pub fn unipotent_orthogonal_decomposition(
    t: &Matrix,
    v: &BilinearSpace,
) -> Result<UnipotentOrthogonalDecomposition> {
    if t.level() != v.level() {
        return Err(Error::LevelMismatch);
    }
    if !v.is_isometry(t)? {
        return Err(Error::NotIsometry);
    }
    let n = t.rows();
    let nil = log_unipotent(t)?;
    let summands: Vec<IrreducibleSummand> = if nil.is_zero_matrix() {
        // Trivial action: every vector is a highest-weight vector of weight
        // zero, and the multiplicity form is the ambient form itself.
        let q = match v.kind() {
            FormKind::Symmetric => orthogonalize_symmetric(v.gram())?,
            FormKind::Symplectic => symplectic_standardize(v.gram())?,
        };
        let order: Vec<usize> = match v.kind() {
            FormKind::Symmetric => (0..n).collect(),
            FormKind::Symplectic => {
                let half = n / 2;
                (0..half).flat_map(|i| [i, half + i]).collect()
            }
        };
        order
            .into_iter()
            .map(|idx| {
                let subspace = Subspace::from_basis(q.col(idx))?;
                let restriction_class = classify_restriction(&subspace, v)?;
                Ok(IrreducibleSummand { subspace, weight: 0, restriction_class })
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        let triple = sl2_triple(&nil, v)?;
        sl2_irreducible_decomposition(&triple, v)?
    };
    let mut indecomposables = Vec::new();
    let mut zeros: Vec<IrreducibleSummand> = Vec::new();
    for s in summands {
        match s.restriction_class {
            RestrictionClass::Nondegenerate => indecomposables.push(s),
            RestrictionClass::Zero => zeros.push(s),
            RestrictionClass::Mixed => {
                return Err(Error::Construction(
                    "irreducible summand with mixed restriction".into(),
                ))
            }
        }
    }
    // Greedy pairing of isotropic summands: largest first, each matched to
    // the first remaining partner of equal dimension with an invertible
    // cross pairing.
    zeros.sort_by_key(|z| std::cmp::Reverse(z.weight));
    let mut standard_pairs = Vec::new();
    let mut used = vec![false; zeros.len()];
    for i in 0..zeros.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let mut partner = None;
        for j in i + 1..zeros.len() {
            if used[j] || zeros[j].weight != zeros[i].weight {
                continue;
            }
            let cross = zeros[i]
                .subspace
                .basis()
                .transpose()
                .mul(v.gram())
                .mul(zeros[j].subspace.basis());
            if cross.is_invertible() {
                partner = Some(j);
                break;
            }
        }
        let j = partner.ok_or_else(|| {
            Error::Construction("isotropic summand has no dual partner".into())
        })?;
        used[j] = true;
        standard_pairs.push((zeros[i].clone(), zeros[j].clone()));
    }
    // Orthogonality audit: concatenate [indecomposables..., pairs...] and
    // require the Gram to be block-diagonal with one block per
    // indecomposable and one per pair.
    let mut bases: Vec<&Matrix> = Vec::new();
    let mut block_sizes: Vec<usize> = Vec::new();
    for s in &indecomposables {
        bases.push(s.subspace.basis());
        block_sizes.push(s.subspace.dim());
    }
    let mut pair_bases: Vec<Matrix> = Vec::new();
    for (a, b) in &standard_pairs {
        pair_bases.push(Matrix::hstack(&[a.subspace.basis(), b.subspace.basis()]));
    }
    for pb in &pair_bases {
        bases.push(pb);
        block_sizes.push(pb.cols());
    }
    let whole = Matrix::hstack(&bases);
    if whole.cols() != n || !whole.is_invertible() {
        return Err(Error::Construction("decomposition does not span the space".into()));
    }
    let big = v.gram_on(&whole);
    let mut offsets = vec![0usize];
    for s in &block_sizes {
        offsets.push(offsets.last().unwrap() + s);
    }
    for (bi, &oi) in block_sizes.iter().zip(&offsets) {
        for i in 0..*bi {
            for j in 0..n {
                let inside = j >= oi && j < oi + bi;
                if !inside && !big.get(oi + i, j).is_zero() {
                    return Err(Error::Construction("blocks are not orthogonal".into()));
                }
            }
        }
    }
    Ok(UnipotentOrthogonalDecomposition { indecomposables, standard_pairs })
}
