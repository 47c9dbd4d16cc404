//! Non-degenerate bilinear spaces: classification, isometry and Lie-algebra
//! membership, radicals, dual-pair bases, and normalization to a canonical
//! Gram matrix.
//!
//! Two kinds are supported: symmetric forms and symplectic (alternating)
//! forms. Degenerate Gram matrices are rejected at construction.

use crate::error::{Error, Result};
use crate::field::{sqrt_or_extend, FieldElement, Level};
use crate::linalg::{Matrix, Subspace};

/// The kind of a non-degenerate bilinear form.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FormKind {
    Symmetric,
    Symplectic,
}

impl FormKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FormKind::Symmetric => "symmetric",
            FormKind::Symplectic => "symplectic",
        }
    }
}

impl std::fmt::Display for FormKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A space equipped with a non-degenerate symmetric or symplectic form,
/// carried by its Gram matrix in the standard basis.
#[derive(Clone, Debug)]
pub struct BilinearSpace {
    kind: FormKind,
    gram: Matrix,
}

/// Decide the kind of a Gram matrix.
///
/// Symmetric means G = Gᵀ; symplectic means G = −Gᵀ with zero diagonal and
/// even dimension. Anything else — including degenerate matrices — is
/// rejected with a reason ("asymmetric", "degenerate", "odd-dim-skew").
pub fn classify_form(gram: &Matrix) -> Result<FormKind> {
    if !gram.is_square() {
        return Err(Error::NotSquare { rows: gram.rows(), cols: gram.cols() });
    }
    let n = gram.rows();
    let gt = gram.transpose();
    if gt == *gram {
        if !gram.is_invertible() {
            return Err(Error::InvalidForm("degenerate".into()));
        }
        return Ok(FormKind::Symmetric);
    }
    let alternating =
        gt == gram.neg() && (0..n).all(|i| gram.get(i, i).is_zero());
    if alternating {
        if !n.is_multiple_of(2) {
            return Err(Error::InvalidForm("odd-dim-skew".into()));
        }
        if !gram.is_invertible() {
            return Err(Error::InvalidForm("degenerate".into()));
        }
        return Ok(FormKind::Symplectic);
    }
    Err(Error::InvalidForm("asymmetric".into()))
}

/// The canonical Gram matrix of each kind: the identity (symmetric) or the
/// standard block [[0, I], [−I, 0]] (symplectic).
pub fn canonical_gram(kind: FormKind, level: &Level, dim: usize) -> Matrix {
    match kind {
        FormKind::Symmetric => Matrix::identity(level, dim),
        FormKind::Symplectic => {
            assert!(dim.is_multiple_of(2), "symplectic dimension must be even");
            let m = dim / 2;
            let mut g = Matrix::zero(level, dim, dim);
            for i in 0..m {
                g.set(i, m + i, &level.one());
                g.set(m + i, i, &level.from_int(-1));
            }
            g
        }
    }
}

fn pair(gram: &Matrix, x: &Matrix, y: &Matrix) -> FieldElement {
    x.transpose().mul(gram).mul(y).get(0, 0)
}

impl BilinearSpace {
    /// Wrap a Gram matrix of a declared kind, verifying the kind's shape
    /// law and non-degeneracy.
    pub fn new(kind: FormKind, gram: Matrix) -> Result<BilinearSpace> {
        let found = classify_form(&gram)?;
        if found != kind {
            return Err(Error::InvalidForm(format!(
                "expected a {kind} form but the matrix is {found}"
            )));
        }
        Ok(BilinearSpace { kind, gram })
    }

    /// Wrap a Gram matrix, deciding its kind.
    pub fn classify(gram: Matrix) -> Result<BilinearSpace> {
        let kind = classify_form(&gram)?;
        Ok(BilinearSpace { kind, gram })
    }

    pub fn kind(&self) -> FormKind {
        self.kind
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn level(&self) -> &Level {
        self.gram.level()
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    /// Evaluate the form on two column vectors.
    pub fn bilinear(&self, x: &Matrix, y: &Matrix) -> FieldElement {
        assert_eq!(x.cols(), 1, "expected a column vector");
        assert_eq!(y.cols(), 1, "expected a column vector");
        pair(&self.gram, x, y)
    }

    /// Same space with the Gram matrix lifted to an extension level.
    pub fn embed(&self, target: &Level) -> Result<BilinearSpace> {
        Ok(BilinearSpace { kind: self.kind, gram: self.gram.embed(target)? })
    }

    /// Does T preserve the form: Tᵀ·G·T = G?
    pub fn is_isometry(&self, t: &Matrix) -> Result<bool> {
        if !t.is_square() || t.rows() != self.dim() {
            return Err(Error::Shape(format!(
                "operator is {}x{} on a dimension-{} space",
                t.rows(),
                t.cols(),
                self.dim()
            )));
        }
        if t.level() != self.level() {
            return Err(Error::LevelMismatch);
        }
        Ok(t.transpose().mul(&self.gram).mul(t) == self.gram)
    }

    /// Does X lie in the isometry Lie algebra: Xᵀ·G + G·X = 0?
    pub fn in_lie_algebra(&self, x: &Matrix) -> Result<bool> {
        if !x.is_square() || x.rows() != self.dim() {
            return Err(Error::Shape(format!(
                "operator is {}x{} on a dimension-{} space",
                x.rows(),
                x.cols(),
                self.dim()
            )));
        }
        if x.level() != self.level() {
            return Err(Error::LevelMismatch);
        }
        Ok(x.transpose().mul(&self.gram).add(&self.gram.mul(x)).is_zero_matrix())
    }

    /// Gram matrix of the form restricted to the given basis columns.
    pub fn gram_on(&self, basis: &Matrix) -> Matrix {
        assert_eq!(basis.rows(), self.dim(), "basis ambient dimension mismatch");
        basis.transpose().mul(&self.gram).mul(basis)
    }

    /// The radical of the restriction to W: all w in W with B(w, W) = 0,
    /// as a subspace in ambient coordinates.
    pub fn radical(&self, w: &Subspace) -> Result<Subspace> {
        if w.ambient_dim() != self.dim() {
            return Err(Error::Shape(format!(
                "subspace ambient dimension {} in a dimension-{} space",
                w.ambient_dim(),
                self.dim()
            )));
        }
        if w.level() != self.level() {
            return Err(Error::LevelMismatch);
        }
        let restricted = self.gram_on(w.basis());
        let k = restricted.kernel_matrix();
        Subspace::from_basis(w.basis().mul(&k))
    }
}

/// Dual bases of a pair of totally isotropic subspaces, normalized so the
/// cross pairing is exactly the identity.
#[derive(Clone, Debug)]
pub struct StandardPairBasis {
    e_basis: Matrix,
    f_basis: Matrix,
}

impl StandardPairBasis {
    /// Basis of the first subspace (untouched input basis).
    pub fn e_basis(&self) -> &Matrix {
        &self.e_basis
    }

    /// Adjusted basis of the second subspace, with B(e_i, f_j) = δ_ij.
    pub fn f_basis(&self) -> &Matrix {
        &self.f_basis
    }

    /// All basis vectors as one block: [E | F].
    pub fn combined(&self) -> Matrix {
        Matrix::hstack(&[&self.e_basis, &self.f_basis])
    }
}

/// Normalize a dual pair of totally isotropic subspaces of equal dimension.
///
/// The first basis is kept; the second is adjusted so that the cross
/// pairing matrix becomes the identity, which makes the Gram matrix of the
/// combined block exactly [[0, I], [I, 0]] (symmetric kind) or
/// [[0, I], [−I, 0]] (symplectic kind).
pub fn standard_pair_basis(
    v: &BilinearSpace,
    v_lambda: &Subspace,
    v_lambda_inv: &Subspace,
) -> Result<StandardPairBasis> {
    if v_lambda.ambient_dim() != v.dim() || v_lambda_inv.ambient_dim() != v.dim() {
        return Err(Error::Shape("subspace ambient dimension mismatch".into()));
    }
    if v_lambda.dim() != v_lambda_inv.dim() {
        return Err(Error::Shape(format!(
            "dual pair dimensions differ: {} vs {}",
            v_lambda.dim(),
            v_lambda_inv.dim()
        )));
    }
    let e = v_lambda.basis().clone();
    let f0 = v_lambda_inv.basis().clone();
    if !v.gram_on(&e).is_zero_matrix() || !v.gram_on(&f0).is_zero_matrix() {
        return Err(Error::IsotropyViolation);
    }
    // Cross pairing C with C_ij = B(e_i, f_j); the new f-basis is F·C⁻¹.
    let c = e.transpose().mul(v.gram()).mul(&f0);
    let cinv = c.inverse().map_err(|_| Error::DegeneratePairing)?;
    let f = f0.mul(&cinv);
    Ok(StandardPairBasis { e_basis: e, f_basis: f })
}

/// A change of basis P with Pᵀ·G·P equal to the canonical Gram matrix of
/// the space's kind. Symmetric normalization may require square roots that
/// only exist one level up; the returned matrix carries the level used.
pub fn normal_basis(v: &BilinearSpace) -> Result<Matrix> {
    match v.kind() {
        FormKind::Symmetric => normal_basis_symmetric(v),
        FormKind::Symplectic => symplectic_standardize(v.gram()),
    }
}

/// Canonical change of basis Q with Qᵀ·G·Q diagonal (all diagonal entries
/// nonzero), for a non-degenerate symmetric G. The pick order is fixed: the
/// first anisotropic vector of the working basis, or the first anisotropic
/// pair sum when every working vector is isotropic.
pub(crate) fn orthogonalize_symmetric(g: &Matrix) -> Result<Matrix> {
    let lv = g.level().clone();
    let n = g.rows();
    let mut comp: Vec<Matrix> = (0..n).map(|j| Matrix::identity(&lv, n).col(j)).collect();
    let mut orth: Vec<Matrix> = Vec::with_capacity(n);
    while !comp.is_empty() {
        let pick = comp.iter().position(|w| !pair(g, w, w).is_zero());
        let v1 = match pick {
            Some(i) => comp.remove(i),
            None => {
                let mut found = None;
                'outer: for i in 0..comp.len() {
                    for j in i + 1..comp.len() {
                        if !pair(g, &comp[i], &comp[j]).is_zero() {
                            found = Some((i, j));
                            break 'outer;
                        }
                    }
                }
                let (i, j) = found.ok_or_else(|| {
                    Error::Construction("restricted form degenerated".into())
                })?;
                let s = comp[i].add(&comp[j]);
                comp.remove(i);
                s
            }
        };
        let d = pair(g, &v1, &v1);
        let dinv = d.inv();
        for w in comp.iter_mut() {
            let coeff = pair(g, &v1, w).mul(&dinv);
            *w = w.sub(&v1.scale(&coeff));
        }
        orth.push(v1);
    }
    let refs: Vec<&Matrix> = orth.iter().collect();
    let q = Matrix::hstack(&refs);
    let d = q.transpose().mul(g).mul(&q);
    for i in 0..n {
        for j in 0..n {
            let entry_ok = if i == j { !d.get(i, j).is_zero() } else { d.get(i, j).is_zero() };
            if !entry_ok {
                return Err(Error::Construction("orthogonalization failed".into()));
            }
        }
    }
    Ok(q)
}

/// Canonical change of basis Q with Qᵀ·G·Q the standard symplectic block
/// [[0, I], [−I, 0]], for a non-degenerate alternating G.
pub(crate) fn symplectic_standardize(g: &Matrix) -> Result<Matrix> {
    let lv = g.level().clone();
    let n = g.rows();
    let mut comp: Vec<Matrix> = (0..n).map(|j| Matrix::identity(&lv, n).col(j)).collect();
    let mut us: Vec<Matrix> = Vec::with_capacity(n / 2);
    let mut ws: Vec<Matrix> = Vec::with_capacity(n / 2);
    while !comp.is_empty() {
        let u = comp.remove(0);
        let j = comp
            .iter()
            .position(|w| !pair(g, &u, w).is_zero())
            .ok_or_else(|| Error::Construction("restricted form degenerated".into()))?;
        let w0 = comp.remove(j);
        let w = w0.scale(&pair(g, &u, &w0).inv());
        for x in comp.iter_mut() {
            // Project onto the complement of the hyperbolic plane <u, w>.
            let a = pair(g, &w, x);
            let b = pair(g, &u, x);
            *x = x.add(&u.scale(&a)).sub(&w.scale(&b));
        }
        us.push(u);
        ws.push(w);
    }
    let mut cols: Vec<&Matrix> = us.iter().collect();
    cols.extend(ws.iter());
    let q = Matrix::hstack(&cols);
    if q.transpose().mul(g).mul(&q) != canonical_gram(FormKind::Symplectic, &lv, n) {
        return Err(Error::Construction("symplectic normalization failed".into()));
    }
    Ok(q)
}

fn normal_basis_symmetric(v: &BilinearSpace) -> Result<Matrix> {
    let lv = v.level().clone();
    let g = v.gram();
    let n = v.dim();
    let q = orthogonalize_symmetric(g)?;
    let orth: Vec<Matrix> = (0..n).map(|j| q.col(j)).collect();
    // Scale each vector by the inverse square root of its length, lifting
    // everything to the deepest level any square root required.
    let mut join = lv.clone();
    let mut roots = Vec::with_capacity(n);
    for v1 in &orth {
        let d = pair(g, v1, v1);
        let (slv, s) = sqrt_or_extend(&d);
        if slv.is_extension_of(&join) {
            join = slv;
        }
        roots.push(s);
    }
    let cols: Result<Vec<Matrix>> = orth
        .iter()
        .zip(&roots)
        .map(|(v1, s)| {
            let se = s.embed(&join)?;
            Ok(v1.embed(&join)?.scale(&se.inv()))
        })
        .collect();
    let cols = cols?;
    let refs: Vec<&Matrix> = cols.iter().collect();
    let p = Matrix::hstack(&refs);
    let ge = g.embed(&join)?;
    if p.transpose().mul(&ge).mul(&p) != Matrix::identity(&join, n) {
        return Err(Error::Construction("symmetric normalization failed".into()));
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gf(p: u64) -> Level {
        Level::prime(p).unwrap()
    }

    fn j2(lv: &Level) -> Matrix {
        Matrix::from_ints(lv, &[&[0, 1], &[-1, 0]])
    }

    #[test]
    fn classify_frozen_examples() {
        let lv = gf(5);
        assert_eq!(classify_form(&Matrix::identity(&lv, 3)).unwrap(), FormKind::Symmetric);
        assert_eq!(classify_form(&j2(&lv)).unwrap(), FormKind::Symplectic);
        match classify_form(&Matrix::from_ints(&lv, &[&[1, 1], &[0, 1]])) {
            Err(Error::InvalidForm(r)) => assert_eq!(r, "asymmetric"),
            other => panic!("expected invalid form, got {other:?}"),
        }
        match classify_form(&Matrix::from_ints(&lv, &[&[1, 0], &[0, 0]])) {
            Err(Error::InvalidForm(r)) => assert_eq!(r, "degenerate"),
            other => panic!("expected invalid form, got {other:?}"),
        }
        let skew3 = Matrix::from_ints(&lv, &[&[0, 1, 0], &[-1, 0, 0], &[0, 0, 0]]);
        match classify_form(&skew3) {
            Err(Error::InvalidForm(r)) => assert_eq!(r, "odd-dim-skew"),
            other => panic!("expected invalid form, got {other:?}"),
        }
        // Declared kind must match the matrix.
        assert!(BilinearSpace::new(FormKind::Symplectic, Matrix::identity(&lv, 2)).is_err());
        assert!(BilinearSpace::new(FormKind::Symplectic, j2(&lv)).is_ok());
    }

    #[test]
    fn isometry_membership_frozen_examples() {
        let lv = gf(5);
        let sp = BilinearSpace::new(FormKind::Symplectic, j2(&lv)).unwrap();
        assert!(sp.is_isometry(&Matrix::identity(&lv, 2)).unwrap());
        // diag(2,3): 2·3 = 6 = 1, so the form is preserved.
        assert!(sp.is_isometry(&Matrix::from_ints(&lv, &[&[2, 0], &[0, 3]])).unwrap());
        // diag(2,2) scales the form by 4.
        assert!(!sp.is_isometry(&Matrix::from_ints(&lv, &[&[2, 0], &[0, 2]])).unwrap());
        assert!(matches!(
            sp.is_isometry(&Matrix::identity(&lv, 3)),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn lie_algebra_membership() {
        let lv = gf(5);
        let sp = BilinearSpace::new(FormKind::Symplectic, j2(&lv)).unwrap();
        // sl2 = symmetric-matrix condition for J: [[a,b],[c,−a]] ⇔ trace 0.
        assert!(sp.in_lie_algebra(&Matrix::from_ints(&lv, &[&[1, 2], &[3, -1]])).unwrap());
        assert!(!sp.in_lie_algebra(&Matrix::from_ints(&lv, &[&[1, 0], &[0, 1]])).unwrap());
        let sym = BilinearSpace::new(FormKind::Symmetric, Matrix::identity(&lv, 2)).unwrap();
        // Orthogonal Lie algebra = skew matrices.
        assert!(sym.in_lie_algebra(&Matrix::from_ints(&lv, &[&[0, 1], &[-1, 0]])).unwrap());
        assert!(!sym.in_lie_algebra(&Matrix::from_ints(&lv, &[&[0, 1], &[1, 0]])).unwrap());
    }

    #[test]
    fn radical_frozen_examples() {
        let lv = gf(5);
        let sym = BilinearSpace::new(FormKind::Symmetric, Matrix::identity(&lv, 2)).unwrap();
        let full = Subspace::full(&lv, 2);
        assert_eq!(sym.radical(&full).unwrap().dim(), 0);
        // (1,2) is isotropic: 1 + 4 = 0 mod 5, so the line is its own radical.
        let w = Subspace::from_basis(Matrix::from_ints(&lv, &[&[1], &[2]])).unwrap();
        let r = sym.radical(&w).unwrap();
        assert_eq!(r.dim(), 1);
        assert!(r.equals(&w));
        // (1,0) pairs with itself to 1: zero radical.
        let w2 = Subspace::from_basis(Matrix::from_ints(&lv, &[&[1], &[0]])).unwrap();
        assert_eq!(sym.radical(&w2).unwrap().dim(), 0);
    }

    #[test]
    fn standard_pair_frozen_example() {
        // In (GF(5)², identity form): B((1,2),(1,3)) = 1+6 = 2, so the dual
        // vector is 2⁻¹·(1,3) = 3·(1,3) = (3,4).
        let lv = gf(5);
        let sym = BilinearSpace::new(FormKind::Symmetric, Matrix::identity(&lv, 2)).unwrap();
        let e = Subspace::from_basis(Matrix::from_ints(&lv, &[&[1], &[2]])).unwrap();
        let f = Subspace::from_basis(Matrix::from_ints(&lv, &[&[1], &[3]])).unwrap();
        let pb = standard_pair_basis(&sym, &e, &f).unwrap();
        assert_eq!(pb.e_basis(), &Matrix::from_ints(&lv, &[&[1], &[2]]));
        assert_eq!(pb.f_basis(), &Matrix::from_ints(&lv, &[&[3], &[4]]));
        // Combined Gram is the split block [[0,1],[1,0]].
        let block = sym.gram_on(&pb.combined());
        assert_eq!(block, Matrix::from_ints(&lv, &[&[0, 1], &[1, 0]]));
    }

    #[test]
    fn standard_pair_already_dual_is_unchanged() {
        let lv = gf(5);
        let hyp = BilinearSpace::new(
            FormKind::Symmetric,
            Matrix::from_ints(&lv, &[&[0, 1], &[1, 0]]),
        )
        .unwrap();
        let e = Subspace::from_basis(Matrix::from_ints(&lv, &[&[1], &[0]])).unwrap();
        let f = Subspace::from_basis(Matrix::from_ints(&lv, &[&[0], &[1]])).unwrap();
        let pb = standard_pair_basis(&hyp, &e, &f).unwrap();
        assert_eq!(pb.e_basis(), e.basis());
        assert_eq!(pb.f_basis(), f.basis());
    }

    #[test]
    fn standard_pair_rejections() {
        let lv = gf(5);
        let sym = BilinearSpace::new(FormKind::Symmetric, Matrix::identity(&lv, 2)).unwrap();
        // (1,0) is anisotropic: isotropy precondition fails.
        let w = Subspace::from_basis(Matrix::from_ints(&lv, &[&[1], &[0]])).unwrap();
        assert!(matches!(
            standard_pair_basis(&sym, &w, &w),
            Err(Error::IsotropyViolation)
        ));
        // Two hyperbolic planes; E and F share a direction, so the cross
        // pairing [[0,0],[0,1]] is singular.
        let g4 = Matrix::from_ints(
            &lv,
            &[&[0, 1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, 1], &[0, 0, 1, 0]],
        );
        let sp4 = BilinearSpace::new(FormKind::Symmetric, g4).unwrap();
        let e = Subspace::from_basis(Matrix::from_ints(
            &lv,
            &[&[1, 0], &[0, 0], &[0, 1], &[0, 0]],
        ))
        .unwrap();
        let f = Subspace::from_basis(Matrix::from_ints(
            &lv,
            &[&[1, 0], &[0, 0], &[0, 0], &[0, 1]],
        ))
        .unwrap();
        assert!(matches!(
            standard_pair_basis(&sp4, &e, &f),
            Err(Error::DegeneratePairing)
        ));
    }

    #[test]
    fn normal_basis_frozen_diagonal() {
        // diag(4,1): sqrt(4) = 2 canonically, so the first column scales by
        // 2⁻¹ = 3.
        let lv = gf(5);
        let v = BilinearSpace::new(
            FormKind::Symmetric,
            Matrix::from_ints(&lv, &[&[4, 0], &[0, 1]]),
        )
        .unwrap();
        let p = normal_basis(&v).unwrap();
        assert_eq!(p, Matrix::from_ints(&lv, &[&[3, 0], &[0, 1]]));
    }

    #[test]
    fn normal_basis_frozen_symplectic_identity() {
        let lv = gf(5);
        let v = BilinearSpace::new(FormKind::Symplectic, j2(&lv)).unwrap();
        assert_eq!(normal_basis(&v).unwrap(), Matrix::identity(&lv, 2));
        // Already-standard 4-dimensional block is also fixed.
        let v4 = BilinearSpace::new(
            FormKind::Symplectic,
            canonical_gram(FormKind::Symplectic, &lv, 4),
        )
        .unwrap();
        assert_eq!(normal_basis(&v4).unwrap(), Matrix::identity(&lv, 4));
    }

    #[test]
    fn normal_basis_frozen_extension_case() {
        // diag(2) over GF(5): 2 is a non-residue, so the normalizer lives at
        // the quadratic extension, where sqrt(2) = 2t (t² = −2).
        let lv = gf(5);
        let v = BilinearSpace::new(
            FormKind::Symmetric,
            Matrix::from_ints(&lv, &[&[2]]),
        )
        .unwrap();
        let p = normal_basis(&v).unwrap();
        let lv25 = lv.extend(2);
        assert_eq!(p.level(), &lv25);
        let t = lv25.generator().unwrap();
        let two_t = t.add(&t);
        // Independent arithmetic: (2t)² = 4t² = 4·3 = 2 mod 5.
        assert_eq!(two_t.mul(&two_t), lv.from_int(2).embed(&lv25).unwrap());
        assert_eq!(p.get(0, 0), two_t.inv());
        let ge = v.gram().embed(&lv25).unwrap();
        assert_eq!(p.transpose().mul(&ge).mul(&p), Matrix::identity(&lv25, 1));
    }

    #[test]
    fn normal_basis_isotropic_start() {
        // Hyperbolic plane: both standard vectors are isotropic, so the
        // anisotropic pick is their sum; normalization then needs sqrt(2).
        let lv = gf(5);
        let v = BilinearSpace::new(
            FormKind::Symmetric,
            Matrix::from_ints(&lv, &[&[0, 1], &[1, 0]]),
        )
        .unwrap();
        let p = normal_basis(&v).unwrap();
        let lv25 = lv.extend(2);
        assert_eq!(p.level(), &lv25);
        let ge = v.gram().embed(&lv25).unwrap();
        assert_eq!(p.transpose().mul(&ge).mul(&p), Matrix::identity(&lv25, 2));
    }

    fn random_sl2(lv: &Level, seed: &[i64]) -> Matrix {
        // det-1 matrices are exactly the isometries of the 2-dim symplectic
        // form, giving a certified generator for group-property tests.
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
        fn isometries_form_a_group(
            xs in proptest::collection::vec(0..5i64, 4),
            ys in proptest::collection::vec(0..5i64, 4),
        ) {
            let lv = gf(5);
            let sp = BilinearSpace::new(FormKind::Symplectic, j2(&lv)).unwrap();
            let a = random_sl2(&lv, &xs);
            let b = random_sl2(&lv, &ys);
            prop_assert!(sp.is_isometry(&a).unwrap());
            prop_assert!(sp.is_isometry(&b).unwrap());
            prop_assert!(sp.is_isometry(&a.mul(&b)).unwrap());
            prop_assert!(sp.is_isometry(&a.inverse().unwrap()).unwrap());
        }

        #[test]
        fn radical_of_full_space_is_zero(entries in proptest::collection::vec(0..7i64, 9)) {
            let lv = gf(7);
            let m = Matrix::from_fn(&lv, 3, 3, |i, j| lv.from_int(entries[i * 3 + j]));
            let g = m.add(&m.transpose());
            prop_assume!(g.is_invertible());
            let v = BilinearSpace::new(FormKind::Symmetric, g).unwrap();
            prop_assert_eq!(v.radical(&Subspace::full(&lv, 3)).unwrap().dim(), 0);
        }

        #[test]
        fn symmetric_normalization_reaches_identity(
            entries in proptest::collection::vec(0..5i64, 9),
        ) {
            let lv = gf(5);
            let m = Matrix::from_fn(&lv, 3, 3, |i, j| lv.from_int(entries[i * 3 + j]));
            let g = m.add(&m.transpose());
            prop_assume!(g.is_invertible());
            let v = BilinearSpace::new(FormKind::Symmetric, g.clone()).unwrap();
            let p = normal_basis(&v).unwrap();
            let lvp = p.level().clone();
            let ge = g.embed(&lvp).unwrap();
            prop_assert_eq!(
                p.transpose().mul(&ge).mul(&p),
                Matrix::identity(&lvp, 3)
            );
        }

        #[test]
        fn symplectic_normalization_reaches_standard_block(
            entries in proptest::collection::vec(0..5i64, 16),
        ) {
            let lv = gf(5);
            let x = Matrix::from_fn(&lv, 4, 4, |i, j| lv.from_int(entries[i * 4 + j]));
            prop_assume!(x.is_invertible());
            let std4 = canonical_gram(FormKind::Symplectic, &lv, 4);
            let g = x.transpose().mul(&std4).mul(&x);
            let v = BilinearSpace::new(FormKind::Symplectic, g.clone()).unwrap();
            let p = normal_basis(&v).unwrap();
            prop_assert_eq!(p.transpose().mul(&g).mul(&p), std4);
        }
    }
}
