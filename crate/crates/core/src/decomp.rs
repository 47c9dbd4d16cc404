//! Structural decompositions of an isometry: the multiplicative Jordan
//! decomposition T = T_s·T_u with polynomial certificates, and the primary
//! orthogonal decomposition of the space into eigenvalue components.

use crate::error::{Error, Result};
use crate::field::{FieldElement, Level};
use crate::forms::BilinearSpace;
use crate::linalg::{generalized_eigenspace, solve, Matrix, Subspace};
use crate::poly::{crt, Polynomial};

/// The multiplicative Jordan decomposition of an isometry, with certificate
/// polynomials evaluating to each part.
#[derive(Clone, Debug)]
pub struct JordanPair {
    /// Diagonalizable part.
    pub ts: Matrix,
    /// Unipotent part.
    pub tu: Matrix,
    /// Certificate: p_s(T) = T_s.
    pub p_s: Polynomial,
    /// Certificate: p_u(T) = T_u.
    pub p_u: Polynomial,
}

/// A component of the primary decomposition for an eigenvalue equal to its
/// own inverse (λ = ±1), where the restricted form stays non-degenerate.
#[derive(Clone, Debug)]
pub struct PrimaryComponent {
    pub lambda: FieldElement,
    pub subspace: Subspace,
    /// Gram matrix of the form restricted to `subspace` (non-degenerate).
    pub gram: Matrix,
    /// The operator restricted to `subspace`, in its basis coordinates.
    pub operator: Matrix,
}

/// A standard component: the pair of totally isotropic generalized
/// eigenspaces for an inverse pair {λ, λ⁻¹} with λ ≠ ±1.
#[derive(Clone, Debug)]
pub struct StandardComponent {
    /// Canonical representative of the pair (least element index).
    pub lambda: FieldElement,
    pub v_lambda: Subspace,
    pub v_lambda_inv: Subspace,
    /// The operator restricted to each eigenspace, in basis coordinates.
    pub op_lambda: Matrix,
    pub op_lambda_inv: Matrix,
    /// Gram matrix on the combined basis [E | F]: zero diagonal blocks and
    /// an invertible cross pairing.
    pub pair_gram: Matrix,
}

/// The orthogonal primary decomposition of a space under an isometry.
#[derive(Clone, Debug)]
pub struct PrimaryDecomposition {
    /// Splitting level all components are expressed at.
    pub level: Level,
    /// Component for λ = 1 (present when the eigenvalue occurs).
    pub plus_part: Option<PrimaryComponent>,
    /// Component for λ = −1 (present when the eigenvalue occurs).
    pub minus_part: Option<PrimaryComponent>,
    /// One entry per inverse pair {λ, λ⁻¹}, λ ≠ ±1.
    pub standard_parts: Vec<StandardComponent>,
}

impl PrimaryDecomposition {
    /// Total dimension covered by the listed components.
    pub fn dimension(&self) -> usize {
        let pm: usize = self
            .plus_part
            .iter()
            .chain(self.minus_part.iter())
            .map(|c| c.subspace.dim())
            .sum();
        let st: usize = self
            .standard_parts
            .iter()
            .map(|c| c.v_lambda.dim() + c.v_lambda_inv.dim())
            .sum();
        pm + st
    }
}

fn check_isometry(t: &Matrix, v: &BilinearSpace) -> Result<()> {
    if t.level() != v.level() {
        return Err(Error::LevelMismatch);
    }
    if !v.is_isometry(t)? {
        return Err(Error::NotIsometry);
    }
    Ok(())
}

/// The multiplicative Jordan decomposition T = T_s·T_u of an isometry:
/// T_s diagonalizable over the splitting level, T_u unipotent, the two
/// commuting, both isometries, and both polynomials in T (certificates
/// returned). Requires the characteristic to exceed the dimension.
pub fn multiplicative_jordan(t: &Matrix, v: &BilinearSpace) -> Result<JordanPair> {
    check_isometry(t, v)?;
    let lv = t.level().clone();
    let n = t.rows();
    if (lv.p() as usize) <= n {
        return Err(Error::CharacteristicTooSmall { p: lv.p(), dim: n });
    }
    let chi = crate::linalg::characteristic_polynomial(t)?;
    let (split, roots) = crate::poly::splitting_field(&chi)?;
    // p_s ≡ λ mod (x−λ)^mult for every root: then p_s(T) acts as λ on the
    // whole generalized eigenspace of λ.
    let congruences: Vec<(Polynomial, Polynomial)> = roots
        .iter()
        .map(|(lam, mult)| {
            let residue = Polynomial::constant(lam);
            let modulus = Polynomial::x(&split)
                .sub(&Polynomial::constant(lam))
                .pow(*mult);
            (residue, modulus)
        })
        .collect();
    let p_s_up = crt(&split, &congruences)?;
    // The congruence system is permuted by every base-fixing field
    // automorphism, so its unique solution has base-level coefficients.
    let p_s = p_s_up.try_restrict(&lv).ok_or_else(|| {
        Error::Construction("semisimple certificate did not descend to the base level".into())
    })?;
    let ts = crate::linalg::apply_polynomial(&p_s, t);
    let tu = ts.inverse()?.mul(t);
    // p_u = p_s⁻¹ · x modulo the minimal polynomial.
    let min = crate::linalg::minimal_polynomial(t)?;
    let p_s_inv = p_s
        .inverse_mod(&min)
        .ok_or_else(|| Error::Construction("semisimple certificate not invertible".into()))?;
    let p_u = p_s_inv.mul(&Polynomial::x(&lv)).divrem(&min).1;
    // Verify every defining property before returning.
    let pair_ok = ts.mul(&tu) == *t
        && tu.mul(&ts) == *t
        && tu.sub(&Matrix::identity(&lv, n)).pow(n).is_zero_matrix()
        && v.is_isometry(&ts)?
        && v.is_isometry(&tu)?
        && crate::linalg::apply_polynomial(&p_u, t) == tu;
    if !pair_ok {
        return Err(Error::Construction("Jordan decomposition failed verification".into()));
    }
    Ok(JordanPair { ts, tu, p_s, p_u })
}

fn restricted_operator(t: &Matrix, basis: &Matrix) -> Result<Matrix> {
    let image = t.mul(basis);
    let a = solve(basis, &image)
        .ok_or_else(|| Error::Construction("subspace is not invariant".into()))?;
    if basis.mul(&a) != image {
        return Err(Error::Construction("subspace is not invariant".into()));
    }
    Ok(a)
}

/// The orthogonal primary decomposition of (V, B) under an isometry T:
/// the λ=1 and λ=−1 components carry non-degenerate restricted forms; the
/// remaining generalized eigenspaces pair off into totally isotropic duals
/// {λ, λ⁻¹}, each pair spanning a non-degenerate block. Everything is
/// expressed at the splitting level of the characteristic polynomial.
pub fn primary_decomposition(t: &Matrix, v: &BilinearSpace) -> Result<PrimaryDecomposition> {
    check_isometry(t, v)?;
    let n = t.rows();
    let chi = crate::linalg::characteristic_polynomial(t)?;
    let split = crate::poly::self_dual_split(&chi)?;
    let lv = split.level.clone();
    let te = t.embed(&lv)?;
    let ve = v.embed(&lv)?;
    let mut all_bases: Vec<Matrix> = Vec::new();
    fn make_component(
        te: &Matrix,
        ve: &BilinearSpace,
        lam: FieldElement,
    ) -> Result<PrimaryComponent> {
        let sub = generalized_eigenspace(te, &lam)?;
        let gram = ve.gram_on(sub.basis());
        if !gram.is_invertible() {
            return Err(Error::Construction("degenerate restricted form".into()));
        }
        let operator = restricted_operator(te, sub.basis())?;
        Ok(PrimaryComponent { lambda: lam, subspace: sub, gram, operator })
    }
    let plus_part = if split.plus_mult > 0 {
        let c = make_component(&te, &ve, lv.one())?;
        all_bases.push(c.subspace.basis().clone());
        Some(c)
    } else {
        None
    };
    let minus_part = if split.minus_mult > 0 {
        let c = make_component(&te, &ve, lv.from_int(-1))?;
        all_bases.push(c.subspace.basis().clone());
        Some(c)
    } else {
        None
    };
    let mut standard_parts = Vec::with_capacity(split.pairs.len());
    for (lam, lam_inv, _mult) in &split.pairs {
        let e = generalized_eigenspace(&te, lam)?;
        let f = generalized_eigenspace(&te, lam_inv)?;
        if e.dim() != f.dim() {
            return Err(Error::Construction("inverse pair dimensions differ".into()));
        }
        if !ve.gram_on(e.basis()).is_zero_matrix() || !ve.gram_on(f.basis()).is_zero_matrix() {
            return Err(Error::Construction("eigenspace is not isotropic".into()));
        }
        let combined = Matrix::hstack(&[e.basis(), f.basis()]);
        let pair_gram = ve.gram_on(&combined);
        if !pair_gram.is_invertible() {
            return Err(Error::Construction("degenerate pair block".into()));
        }
        let op_lambda = restricted_operator(&te, e.basis())?;
        let op_lambda_inv = restricted_operator(&te, f.basis())?;
        all_bases.push(combined);
        standard_parts.push(StandardComponent {
            lambda: lam.clone(),
            v_lambda: e,
            v_lambda_inv: f,
            op_lambda,
            op_lambda_inv,
            pair_gram,
        });
    }
    // Direct sum and pairwise orthogonality: the concatenated basis must be
    // invertible and must block-diagonalize the Gram matrix.
    let refs: Vec<&Matrix> = all_bases.iter().collect();
    let whole = Matrix::hstack(&refs);
    if whole.rows() != n || whole.cols() != n || !whole.is_invertible() {
        return Err(Error::Construction("components do not span the space".into()));
    }
    let big = ve.gram_on(&whole);
    let mut off_i = 0;
    for bi in &all_bases {
        let mut off_j = 0;
        for bj in &all_bases {
            if !std::ptr::eq(bi, bj) {
                for i in 0..bi.cols() {
                    for j in 0..bj.cols() {
                        if !big.get(off_i + i, off_j + j).is_zero() {
                            return Err(Error::Construction(
                                "components are not orthogonal".into(),
                            ));
                        }
                    }
                }
            }
            off_j += bj.cols();
        }
        off_i += bi.cols();
    }
    Ok(PrimaryDecomposition { level: lv, plus_part, minus_part, standard_parts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::FormKind;
    use proptest::prelude::*;

    fn gf(p: u64) -> Level {
        Level::prime(p).unwrap()
    }

    fn sp2(lv: &Level) -> BilinearSpace {
        BilinearSpace::new(FormKind::Symplectic, Matrix::from_ints(lv, &[&[0, 1], &[-1, 0]]))
            .unwrap()
    }

    fn sp4(lv: &Level) -> BilinearSpace {
        // J ⊕ J block layout.
        BilinearSpace::new(
            FormKind::Symplectic,
            Matrix::from_ints(
                lv,
                &[
                    &[0, 1, 0, 0],
                    &[-1, 0, 0, 0],
                    &[0, 0, 0, 1],
                    &[0, 0, -1, 0],
                ],
            ),
        )
        .unwrap()
    }

    // ---- independent oracle: reconstruct the diagonalizable part from
    // generalized eigenspace bases, a different route than the engine's
    // polynomial interpolation ----
    fn semisimple_from_eigen_data(t: &Matrix) -> Matrix {
        let chi = crate::linalg::characteristic_polynomial(t).unwrap();
        let (lv, roots) = crate::poly::splitting_field(&chi).unwrap();
        let te = t.embed(&lv).unwrap();
        let mut cols: Vec<Matrix> = Vec::new();
        let mut lams: Vec<FieldElement> = Vec::new();
        for (lam, _) in &roots {
            let sub = generalized_eigenspace(&te, lam).unwrap();
            for j in 0..sub.dim() {
                cols.push(sub.basis().col(j));
                lams.push(lam.clone());
            }
        }
        let refs: Vec<&Matrix> = cols.iter().collect();
        let p = Matrix::hstack(&refs);
        let mut d = Matrix::zero(&lv, t.rows(), t.rows());
        for (i, lam) in lams.iter().enumerate() {
            d.set(i, i, lam);
        }
        p.mul(&d).mul(&p.inverse().unwrap())
    }

    #[test]
    fn jordan_frozen_unipotent_stays_unipotent() {
        // U₃ preserves the anti-diagonal form (1,3,1) over GF(7).
        let lv = gf(7);
        let g = Matrix::from_ints(&lv, &[&[0, 0, 1], &[0, 3, 0], &[1, 0, 0]]);
        let v = BilinearSpace::new(FormKind::Symmetric, g).unwrap();
        let u3 = Matrix::from_ints(&lv, &[&[1, 1, 1], &[0, 1, 2], &[0, 0, 1]]);
        let jp = multiplicative_jordan(&u3, &v).unwrap();
        assert_eq!(jp.ts, Matrix::identity(&lv, 3));
        assert_eq!(jp.tu, u3);
        assert_eq!(jp.p_s, Polynomial::one(&lv));
        assert_eq!(jp.p_u, Polynomial::x(&lv));
    }

    #[test]
    fn jordan_frozen_semisimple_stays_semisimple() {
        let lv = gf(5);
        let v = sp2(&lv);
        let t = Matrix::from_ints(&lv, &[&[2, 0], &[0, 3]]);
        let jp = multiplicative_jordan(&t, &v).unwrap();
        assert_eq!(jp.ts, t);
        assert_eq!(jp.tu, Matrix::identity(&lv, 2));
        assert_eq!(jp.p_s, Polynomial::x(&lv));
    }

    #[test]
    fn jordan_frozen_mixed_block() {
        let lv = gf(5);
        let v = sp4(&lv);
        let t = Matrix::from_ints(
            &lv,
            &[
                &[2, 0, 0, 0],
                &[0, 3, 0, 0],
                &[0, 0, 1, 1],
                &[0, 0, 0, 1],
            ],
        );
        let jp = multiplicative_jordan(&t, &v).unwrap();
        let expected_ts = Matrix::from_ints(
            &lv,
            &[
                &[2, 0, 0, 0],
                &[0, 3, 0, 0],
                &[0, 0, 1, 0],
                &[0, 0, 0, 1],
            ],
        );
        let expected_tu = Matrix::from_ints(
            &lv,
            &[
                &[1, 0, 0, 0],
                &[0, 1, 0, 0],
                &[0, 0, 1, 1],
                &[0, 0, 0, 1],
            ],
        );
        assert_eq!(jp.ts, expected_ts);
        assert_eq!(jp.tu, expected_tu);
        assert_eq!(jp.ts.mul(&jp.tu), t);
        assert_eq!(jp.tu.mul(&jp.ts), t);
        assert!(v.is_isometry(&jp.ts).unwrap());
        assert!(v.is_isometry(&jp.tu).unwrap());
        // Certificates evaluate to the parts.
        assert_eq!(crate::linalg::apply_polynomial(&jp.p_s, &t), jp.ts);
        assert_eq!(crate::linalg::apply_polynomial(&jp.p_u, &t), jp.tu);
        // Independent reconstruction of the diagonalizable part.
        assert_eq!(semisimple_from_eigen_data(&t), jp.ts);
    }

    #[test]
    fn jordan_rejections() {
        let lv = gf(5);
        let v = sp2(&lv);
        // Not an isometry: diag(2,2) scales the form.
        assert!(matches!(
            multiplicative_jordan(&Matrix::from_ints(&lv, &[&[2, 0], &[0, 2]]), &v),
            Err(Error::NotIsometry)
        ));
        // Characteristic gate: p must exceed the dimension.
        let lv3 = gf(3);
        let v4 = sp4(&lv3);
        assert!(matches!(
            multiplicative_jordan(&Matrix::identity(&lv3, 4), &v4),
            Err(Error::CharacteristicTooSmall { .. })
        ));
    }

    #[test]
    fn primary_frozen_rotation() {
        // R has eigenvalues 2 and 3 = 2⁻¹ over GF(5): one standard pair,
        // with isotropic eigenlines spanned by (1,2) and (1,3).
        let lv = gf(5);
        let v = BilinearSpace::new(FormKind::Symmetric, Matrix::identity(&lv, 2)).unwrap();
        let r = Matrix::from_ints(&lv, &[&[0, 1], &[-1, 0]]);
        let d = primary_decomposition(&r, &v).unwrap();
        assert_eq!(d.level, lv);
        assert!(d.plus_part.is_none());
        assert!(d.minus_part.is_none());
        assert_eq!(d.standard_parts.len(), 1);
        let part = &d.standard_parts[0];
        assert_eq!(part.lambda, lv.from_int(2));
        assert!(part
            .v_lambda
            .equals(&Subspace::from_basis(Matrix::from_ints(&lv, &[&[1], &[2]])).unwrap()));
        assert!(part
            .v_lambda_inv
            .equals(&Subspace::from_basis(Matrix::from_ints(&lv, &[&[1], &[3]])).unwrap()));
        // Restricted operators are the 1×1 scalars λ and λ⁻¹.
        assert_eq!(part.op_lambda, Matrix::from_ints(&lv, &[&[2]]));
        assert_eq!(part.op_lambda_inv, Matrix::from_ints(&lv, &[&[3]]));
        assert_eq!(d.dimension(), 2);
    }

    #[test]
    fn primary_frozen_identity_operators() {
        let lv = gf(5);
        let v = sp2(&lv);
        let d = primary_decomposition(&Matrix::identity(&lv, 2), &v).unwrap();
        let plus = d.plus_part.as_ref().unwrap();
        assert_eq!(plus.subspace.dim(), 2);
        assert!(d.minus_part.is_none());
        assert!(d.standard_parts.is_empty());
        let d2 = primary_decomposition(&Matrix::identity(&lv, 2).neg(), &v).unwrap();
        assert!(d2.plus_part.is_none());
        assert_eq!(d2.minus_part.as_ref().unwrap().subspace.dim(), 2);
    }

    #[test]
    fn primary_splits_at_extension_level() {
        // A symplectic rotation whose eigenvalues only exist upstairs.
        let lv = gf(5);
        let v = sp2(&lv);
        let t = Matrix::from_ints(&lv, &[&[1, 1], &[-1, 0]]);
        assert!(v.is_isometry(&t).unwrap());
        // χ = x² − x + 1, irreducible over GF(5).
        let d = primary_decomposition(&t, &v).unwrap();
        assert_eq!(d.level, lv.extend(2));
        assert_eq!(d.standard_parts.len(), 1);
        let part = &d.standard_parts[0];
        assert_eq!(part.v_lambda.dim(), 1);
        // λ·λ⁻¹ = 1 and the pair Gram is invertible with zero diagonal blocks.
        let lam = &part.lambda;
        let prod = lam.mul(&part.op_lambda_inv.get(0, 0));
        assert!(prod.is_one());
        assert!(part.pair_gram.is_invertible());
        assert!(part.pair_gram.get(0, 0).is_zero());
        assert!(part.pair_gram.get(1, 1).is_zero());
    }

    #[test]
    fn primary_mixed_block_matches_self_dual_split() {
        let lv = gf(5);
        let v = sp4(&lv);
        let t = Matrix::from_ints(
            &lv,
            &[
                &[2, 0, 0, 0],
                &[0, 3, 0, 0],
                &[0, 0, 1, 1],
                &[0, 0, 0, 1],
            ],
        );
        let d = primary_decomposition(&t, &v).unwrap();
        let chi = crate::linalg::characteristic_polynomial(&t).unwrap();
        let split = crate::poly::self_dual_split(&chi).unwrap();
        assert_eq!(
            d.plus_part.as_ref().map(|c| c.subspace.dim()).unwrap_or(0),
            split.plus_mult
        );
        assert_eq!(
            d.minus_part.as_ref().map(|c| c.subspace.dim()).unwrap_or(0),
            split.minus_mult
        );
        assert_eq!(d.standard_parts.len(), split.pairs.len());
        for (part, (lam, _, mult)) in d.standard_parts.iter().zip(&split.pairs) {
            assert_eq!(&part.lambda, lam);
            assert_eq!(part.v_lambda.dim(), *mult);
        }
        // The plus part carries the unipotent block with a non-degenerate
        // restricted symplectic form.
        let plus = d.plus_part.as_ref().unwrap();
        assert_eq!(plus.subspace.dim(), 2);
        assert!(plus.gram.is_invertible());
        assert_eq!(plus.operator, Matrix::from_ints(&lv, &[&[1, 1], &[0, 1]]));
    }

    fn random_sl2(lv: &Level, seed: &[i64]) -> Matrix {
        let m = Matrix::from_ints(lv, &[&[seed[0], seed[1]], &[seed[2], seed[3]]]);
        if !m.is_invertible() {
            return Matrix::identity(lv, 2);
        }
        let d = m.det();
        Matrix::from_fn(lv, 2, 2, |i, j| {
            if j == 0 {
                m.get(i, 0).div(&d)
            } else {
                m.get(i, j)
            }
        })
    }

    proptest! {
        #[test]
        fn jordan_pair_properties_on_sp2(seed in proptest::collection::vec(0..5i64, 4)) {
            let lv = gf(5);
            let v = sp2(&lv);
            let t = random_sl2(&lv, &seed);
            let jp = multiplicative_jordan(&t, &v).unwrap();
            prop_assert_eq!(jp.ts.mul(&jp.tu), t.clone());
            prop_assert_eq!(jp.tu.mul(&jp.ts), t.clone());
            prop_assert!(v.is_isometry(&jp.ts).unwrap());
            prop_assert!(v.is_isometry(&jp.tu).unwrap());
            prop_assert!(jp.tu.sub(&Matrix::identity(&lv, 2)).pow(2).is_zero_matrix());
            prop_assert_eq!(crate::linalg::apply_polynomial(&jp.p_s, &t), jp.ts.clone());
            prop_assert_eq!(crate::linalg::apply_polynomial(&jp.p_u, &t), jp.tu.clone());
            // Independent semisimple reconstruction, possibly upstairs.
            let oracle = semisimple_from_eigen_data(&t);
            let lifted = jp.ts.embed(oracle.level()).unwrap();
            prop_assert_eq!(oracle, lifted);
        }

        #[test]
        fn primary_reconstructs_the_operator(seed in proptest::collection::vec(0..5i64, 4)) {
            let lv = gf(5);
            let v = sp2(&lv);
            let t = random_sl2(&lv, &seed);
            let d = primary_decomposition(&t, &v).unwrap();
            let te = t.embed(&d.level).unwrap();
            // Assemble block operator over the concatenated basis.
            let mut bases: Vec<Matrix> = Vec::new();
            let mut ops: Vec<Matrix> = Vec::new();
            for c in d.plus_part.iter().chain(d.minus_part.iter()) {
                bases.push(c.subspace.basis().clone());
                ops.push(c.operator.clone());
            }
            for s in &d.standard_parts {
                bases.push(s.v_lambda.basis().clone());
                ops.push(s.op_lambda.clone());
                bases.push(s.v_lambda_inv.basis().clone());
                ops.push(s.op_lambda_inv.clone());
            }
            let refs: Vec<&Matrix> = bases.iter().collect();
            let p = Matrix::hstack(&refs);
            let block = Matrix::block_diag(&d.level, &ops);
            prop_assert_eq!(p.mul(&block), te.mul(&p));
        }
    }
}
