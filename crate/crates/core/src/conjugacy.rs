//! The conjugacy engine: decide whether two isometries of a non-degenerate
//! bilinear space are conjugate inside the isometry group, and when they
//! are, construct an explicit conjugator that is itself an isometry. The
//! verdict is governed by elementary divisors; the witness is assembled
//! from per-component constructions — dual-pair blocks for eigenvalue pairs
//! (λ, λ⁻¹), a scalar-corrected linear conjugator on unipotent blocks, and
//! negation reduction for eigenvalue −1 blocks.

use crate::decomp::primary_decomposition;
use crate::error::{Error, Result};
use crate::field::{common_superlevel, sqrt_or_extend};
use crate::forms::{
    canonical_gram, normal_basis, standard_pair_basis, BilinearSpace, StandardPairBasis,
};
use crate::linalg::{
    elementary_divisors, gl_conjugacy_witness, solve, ElementaryDivisorSet, Matrix,
};
use crate::sl2::unipotent_orthogonal_decomposition;

/// Which construction produced a component's share of the witness.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CaseTag {
    /// Dual-pair block for an eigenvalue pair (λ, λ⁻¹) with λ ≠ ±1.
    Case1Standard,
    /// Unipotent block (eigenvalue 1).
    Case2Unipotent,
    /// Eigenvalue −1 block, reduced to the unipotent case by negation.
    Case3Negative,
    /// Bookkeeping entry: the space split into several primary components,
    /// or the two operators were literally identical.
    MixedSplit,
}

impl CaseTag {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseTag::Case1Standard => "case1-standard",
            CaseTag::Case2Unipotent => "case2-unipotent",
            CaseTag::Case3Negative => "case3-negative",
            CaseTag::MixedSplit => "mixed-split",
        }
    }
}

impl std::fmt::Display for CaseTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One step of the witness construction.
#[derive(Clone, Debug)]
pub struct TraceEntry {
    /// Human-readable description of the component handled.
    pub description: String,
    /// Construction used on it.
    pub tag: CaseTag,
}

/// Outcome of a conjugacy test: the verdict, the divisor data it rests on,
/// an isometric conjugator when one exists, and the construction trace.
#[derive(Clone, Debug)]
pub struct ConjugacyVerdict {
    /// Whether the operators are conjugate in the isometry group.
    pub conjugate: bool,
    /// Isometric conjugator C with C·T·C⁻¹ = S and Cᵀ·G·C = G, at the
    /// level it carries; present exactly when `conjugate`.
    pub witness: Option<Matrix>,
    /// Elementary divisors of the first operator.
    pub divisors_s: ElementaryDivisorSet,
    /// Elementary divisors of the second operator.
    pub divisors_t: ElementaryDivisorSet,
    /// Per-component construction record; empty when not conjugate.
    pub case_trace: Vec<TraceEntry>,
}

/// Restriction of an operator to an invariant column space: the matrix A
/// with X·basis = basis·A.
fn restrict_to(basis: &Matrix, x: &Matrix) -> Result<Matrix> {
    solve(basis, &x.mul(basis))
        .ok_or_else(|| Error::Construction("subspace is not invariant".into()))
}

/// Dual-pair witness: given conjugate invertible actions SL, TL on the
/// λ-side of a normalized dual pair, returns the block map acting as X on
/// the λ-side and as X⁻ᵀ on the λ⁻¹-side, where X is the canonical linear
/// conjugator with X·TL·X⁻¹ = SL. In a frame where the pairing between the
/// two sides is the identity, this block map is an isometry of the pair.
pub fn case1_witness(sl: &Matrix, tl: &Matrix, pair: &StandardPairBasis) -> Result<Matrix> {
    let d = pair.e_basis().cols();
    if sl.rows() != d || sl.cols() != d || tl.rows() != d || tl.cols() != d {
        return Err(Error::Shape(format!(
            "pair has {} directions per side, operators are {}x{} and {}x{}",
            d,
            sl.rows(),
            sl.cols(),
            tl.rows(),
            tl.cols()
        )));
    }
    if sl.level() != tl.level() || sl.level() != pair.e_basis().level() {
        return Err(Error::LevelMismatch);
    }
    let (lvl, x) = gl_conjugacy_witness(sl, tl)?.ok_or(Error::DivisorMismatch)?;
    let x_inv_t = x.inverse()?.transpose();
    Ok(Matrix::block_diag(&lvl, &[x, x_inv_t]))
}

/// Unipotent-case witness: an isometric conjugator between two unipotent
/// isometries of the same space with equal elementary divisors. Built
/// summand-wise from the orthogonal decompositions: on each matched
/// indecomposable summand a linear conjugator f is corrected by the scalar
/// √c⁻¹ with fᵀ·G·f = c·G (well-defined because the invariant form on an
/// indecomposable summand is unique up to scale); matched isotropic dual
/// pairs route through the dual-pair construction. May extend the level by
/// the square roots involved.
pub fn case2_witness(s: &Matrix, t: &Matrix, v: &BilinearSpace) -> Result<Matrix> {
    if !v.is_isometry(s)? || !v.is_isometry(t)? {
        return Err(Error::NotIsometry);
    }
    let div_s = elementary_divisors(s)?;
    let div_t = elementary_divisors(t)?;
    if !div_s.same_as(&div_t)? {
        return Err(Error::DivisorMismatch);
    }
    let ds = unipotent_orthogonal_decomposition(s, v)?;
    let dt = unipotent_orthogonal_decomposition(t, v)?;
    if ds.indecomposables.len() != dt.indecomposables.len()
        || ds.standard_pairs.len() != dt.standard_pairs.len()
    {
        return Err(Error::DivisorMismatch);
    }
    // Pieces: (S-side frame, T-side frame, frame-to-frame witness), each at
    // its own level on the canonical extension chain.
    let mut pieces: Vec<(Matrix, Matrix, Matrix)> = Vec::new();
    for (us, ut) in ds.indecomposables.iter().zip(&dt.indecomposables) {
        if us.weight != ut.weight {
            return Err(Error::DivisorMismatch);
        }
        let bs = us.subspace.basis();
        let bt = ut.subspace.basis();
        let a_s = restrict_to(bs, s)?;
        let a_t = restrict_to(bt, t)?;
        let (lvl, f) = gl_conjugacy_witness(&a_s, &a_t)?.ok_or(Error::DivisorMismatch)?;
        let gs = v.gram_on(bs).embed(&lvl)?;
        let gt = v.gram_on(bt).embed(&lvl)?;
        // Pulled-back form on the T-side frame; a scalar multiple of the
        // T-side restricted Gram by uniqueness of the invariant form.
        let b1 = f.transpose().mul(&gs).mul(&f);
        let d = bt.cols();
        let mut c = None;
        'scan: for i in 0..d {
            for j in 0..d {
                let gij = gt.get(i, j);
                if !gij.is_zero() {
                    c = Some(b1.get(i, j).mul(&gij.inv()));
                    break 'scan;
                }
            }
        }
        let c = c.ok_or_else(|| Error::Construction("degenerate summand form".into()))?;
        if b1 != gt.scale(&c) {
            return Err(Error::Construction(
                "pulled-back form is not a scalar multiple".into(),
            ));
        }
        let (lvl2, r) = sqrt_or_extend(&c);
        let w = f.embed(&lvl2)?.scale(&r.inv());
        pieces.push((bs.embed(&lvl2)?, bt.embed(&lvl2)?, w));
    }
    for (ps, pt) in ds.standard_pairs.iter().zip(&dt.standard_pairs) {
        if ps.0.weight != pt.0.weight {
            return Err(Error::DivisorMismatch);
        }
        let pair_s = standard_pair_basis(v, &ps.0.subspace, &ps.1.subspace)?;
        let pair_t = standard_pair_basis(v, &pt.0.subspace, &pt.1.subspace)?;
        let a_s = restrict_to(pair_s.e_basis(), s)?;
        let a_t = restrict_to(pair_t.e_basis(), t)?;
        let w = case1_witness(&a_s, &a_t, &pair_t)?;
        pieces.push((pair_s.combined(), pair_t.combined(), w));
    }
    assemble_witness(s, t, v, pieces)
}

/// Eigenvalue −1 witness: both operators are negated, which makes them
/// unipotent, and the unipotent construction is reused — the same matrix
/// conjugates the originals because conjugation commutes with negation.
pub fn case3_reduce(s: &Matrix, t: &Matrix, v: &BilinearSpace) -> Result<Matrix> {
    case2_witness(&s.neg(), &t.neg(), v)
}

/// Stitch per-component frame witnesses into one matrix on the whole space
/// and verify both conjugator equations before returning it.
fn assemble_witness(
    s: &Matrix,
    t: &Matrix,
    v: &BilinearSpace,
    pieces: Vec<(Matrix, Matrix, Matrix)>,
) -> Result<Matrix> {
    let mut lvl = v.level().clone();
    for (bs, _, w) in &pieces {
        lvl = common_superlevel(&lvl, bs.level())?;
        lvl = common_superlevel(&lvl, w.level())?;
    }
    let mut s_cols: Vec<Matrix> = Vec::with_capacity(pieces.len());
    let mut t_cols: Vec<Matrix> = Vec::with_capacity(pieces.len());
    for (bs, bt, w) in &pieces {
        s_cols.push(bs.embed_any(&lvl)?.mul(&w.embed_any(&lvl)?));
        t_cols.push(bt.embed_any(&lvl)?);
    }
    let s_refs: Vec<&Matrix> = s_cols.iter().collect();
    let t_refs: Vec<&Matrix> = t_cols.iter().collect();
    let c = Matrix::hstack(&s_refs).mul(&Matrix::hstack(&t_refs).inverse()?);
    let se = s.embed_any(&lvl)?;
    let te = t.embed_any(&lvl)?;
    let ge = v.gram().embed_any(&lvl)?;
    if c.mul(&te) != se.mul(&c) || c.transpose().mul(&ge).mul(&c) != ge {
        return Err(Error::Construction("assembled witness failed verification".into()));
    }
    Ok(c)
}

/// Decide conjugacy of two isometries inside the isometry group of V, and
/// construct an isometric conjugator when the verdict is positive. The
/// verdict is exactly equality of elementary divisor sets; the witness may
/// live at an extension of the input level.
pub fn isometry_conjugacy(s: &Matrix, t: &Matrix, v: &BilinearSpace) -> Result<ConjugacyVerdict> {
    let n = v.dim();
    if (v.level().p() as usize) <= n {
        return Err(Error::CharacteristicTooSmall { p: v.level().p(), dim: n });
    }
    if !v.is_isometry(s)? || !v.is_isometry(t)? {
        return Err(Error::NotIsometry);
    }
    let divisors_s = elementary_divisors(s)?;
    let divisors_t = elementary_divisors(t)?;
    if !divisors_s.same_as(&divisors_t)? {
        return Ok(ConjugacyVerdict {
            conjugate: false,
            witness: None,
            divisors_s,
            divisors_t,
            case_trace: Vec::new(),
        });
    }
    if s == t {
        return Ok(ConjugacyVerdict {
            conjugate: true,
            witness: Some(Matrix::identity(v.level(), n)),
            divisors_s,
            divisors_t,
            case_trace: vec![TraceEntry {
                description: "identical operators".into(),
                tag: CaseTag::MixedSplit,
            }],
        });
    }
    let pd_s = primary_decomposition(s, v)?;
    let pd_t = primary_decomposition(t, v)?;
    if pd_s.level != pd_t.level {
        return Err(Error::Construction("primary components at unequal levels".into()));
    }
    let split = pd_s.level.clone();
    let v_split = v.embed(&split)?;
    let s_split = s.embed(&split)?;
    let t_split = t.embed(&split)?;

    let mut trace = Vec::new();
    let component_count = usize::from(pd_s.plus_part.is_some())
        + usize::from(pd_s.minus_part.is_some())
        + pd_s.standard_parts.len();
    if component_count > 1 {
        trace.push(TraceEntry {
            description: format!("split into {component_count} primary components"),
            tag: CaseTag::MixedSplit,
        });
    }

    let mut pieces: Vec<(Matrix, Matrix, Matrix)> = Vec::new();

    // Eigenvalue ±1 components: bring both restricted spaces to the
    // canonical Gram of their kind, then run the unipotent (or negated)
    // construction on that common space.
    for (sign, cs, ct) in [
        (1i64, &pd_s.plus_part, &pd_t.plus_part),
        (-1i64, &pd_s.minus_part, &pd_t.minus_part),
    ] {
        let (cs, ct) = match (cs, ct) {
            (None, None) => continue,
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::Construction("component mismatch despite equal divisors".into())),
        };
        let d = cs.subspace.dim();
        if d != ct.subspace.dim() {
            return Err(Error::Construction("component mismatch despite equal divisors".into()));
        }
        let space_s = BilinearSpace::new(v.kind(), cs.gram.clone())?;
        let space_t = BilinearSpace::new(v.kind(), ct.gram.clone())?;
        let q_s = normal_basis(&space_s)?;
        let q_t = normal_basis(&space_t)?;
        let lvl_c = common_superlevel(q_s.level(), q_t.level())?;
        let q_s = q_s.embed_any(&lvl_c)?;
        let q_t = q_t.embed_any(&lvl_c)?;
        let a_s = q_s.inverse()?.mul(&cs.operator.embed_any(&lvl_c)?).mul(&q_s);
        let a_t = q_t.inverse()?.mul(&ct.operator.embed_any(&lvl_c)?).mul(&q_t);
        let v_can =
            BilinearSpace::new(v.kind(), canonical_gram(v.kind(), &lvl_c, d))?;
        let (w, tag, desc) = if sign == 1 {
            (
                case2_witness(&a_s, &a_t, &v_can)?,
                CaseTag::Case2Unipotent,
                format!("eigenvalue 1 block, dimension {d}"),
            )
        } else {
            (
                case3_reduce(&a_s, &a_t, &v_can)?,
                CaseTag::Case3Negative,
                format!("eigenvalue -1 block, dimension {d}"),
            )
        };
        let frame_s = cs.subspace.basis().embed_any(&lvl_c)?.mul(&q_s);
        let frame_t = ct.subspace.basis().embed_any(&lvl_c)?.mul(&q_t);
        let wl = w.level().clone();
        pieces.push((frame_s.embed_any(&wl)?, frame_t.embed_any(&wl)?, w));
        trace.push(TraceEntry { description: desc, tag });
    }

    // Standard components: eigenvalue pairs (λ, λ⁻¹). Both decompositions
    // list them in the same canonical order because the operators share a
    // characteristic polynomial.
    if pd_s.standard_parts.len() != pd_t.standard_parts.len() {
        return Err(Error::Construction("component mismatch despite equal divisors".into()));
    }
    for (cs, ct) in pd_s.standard_parts.iter().zip(&pd_t.standard_parts) {
        if cs.lambda != ct.lambda || cs.v_lambda.dim() != ct.v_lambda.dim() {
            return Err(Error::Construction("component mismatch despite equal divisors".into()));
        }
        let d = cs.v_lambda.dim();
        let pair_s = standard_pair_basis(&v_split, &cs.v_lambda, &cs.v_lambda_inv)?;
        let pair_t = standard_pair_basis(&v_split, &ct.v_lambda, &ct.v_lambda_inv)?;
        // The λ-side basis is untouched by pair normalization, so the
        // stored restricted operators are the right frame matrices.
        let w = case1_witness(&cs.op_lambda, &ct.op_lambda, &pair_t)?;
        let wl = w.level().clone();
        pieces.push((
            pair_s.combined().embed_any(&wl)?,
            pair_t.combined().embed_any(&wl)?,
            w,
        ));
        trace.push(TraceEntry {
            description: format!(
                "eigenvalue pair block (eigenvalue index {}), dimension {}",
                cs.lambda.index(),
                2 * d
            ),
            tag: CaseTag::Case1Standard,
        });
    }

    let witness = assemble_witness(&s_split, &t_split, &v_split, pieces)?;
    Ok(ConjugacyVerdict {
        conjugate: true,
        witness: Some(witness),
        divisors_s,
        divisors_t,
        case_trace: trace,
    })
}
