//! Brute-force cross-checks for the conjugacy engine: exhaustive search for
//! isometric conjugators over the solution space of the intertwining
//! equation, and full enumeration of small isometry groups. Guard rails keep
//! every search bounded; nothing here is meant to scale.

use crate::error::{Error, Result};
use crate::field::Level;
use crate::forms::BilinearSpace;
use crate::linalg::{kernel, operator_matrix, Matrix};

/// Hard cap on the number of candidates a conjugator search may enumerate.
const CANDIDATE_CAP: u128 = 1 << 20;

/// Exhaustive search for an isometric conjugator X with X·T·X⁻¹ = S over
/// `level`: computes the solution space of X·T = S·X, walks it in canonical
/// coefficient order, and returns the first member that is invertible and
/// satisfies Xᵀ·G·X = G. `None` means no conjugator exists over `level`
/// (a larger level may still hold one).
pub fn brute_force_conjugate(
    s: &Matrix,
    t: &Matrix,
    v: &BilinearSpace,
    level: &Level,
) -> Result<Option<Matrix>> {
    let n = v.dim();
    if s.rows() != n || s.cols() != n || t.rows() != n || t.cols() != n {
        return Err(Error::Shape("operator dimension mismatch".into()));
    }
    if n > 4 || level.size() > 25 {
        return Err(Error::TooLarge(format!(
            "conjugator search capped at dimension 4 over 25 elements; got dimension {} over {} elements",
            n,
            level.size()
        )));
    }
    let se = s.embed_any(level)?;
    let te = t.embed_any(level)?;
    let ve = v.embed(level)?;
    let g = ve.gram();
    // Solution space of the intertwining constraint X·T − S·X = 0.
    let syl = operator_matrix(level, n, n, |x| x.mul(&te).sub(&se.mul(x)));
    let sol = kernel(&syl);
    let kd = sol.dim();
    let q = level.size();
    let mut total: u128 = 1;
    for _ in 0..kd {
        total = total.saturating_mul(q);
        if total > CANDIDATE_CAP {
            return Err(Error::TooLarge(format!(
                "solution space holds {}^{} candidates, beyond the search cap",
                q, kd
            )));
        }
    }
    for idx in 1..total {
        let mut rem = idx;
        let mut xv = Matrix::zero(level, n * n, 1);
        for d in 0..kd {
            let digit = rem % q;
            rem /= q;
            if digit != 0 {
                let coeff = level.element_from_index(digit);
                xv = xv.add(&sol.basis().col(d).scale(&coeff));
            }
        }
        let x = Matrix::unvectorize(level, n, n, &xv);
        if !x.is_invertible() {
            continue;
        }
        if x.transpose().mul(g).mul(&x) == *g {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

/// All isometries of a small space, by column-by-column backtracking with
/// Gram pruning: a partial assignment (c₀, …, c_{j−1}) survives only if
/// B(c_i, c_k) matches the Gram entry for every chosen pair. Output order is
/// lexicographic in the canonical column indices.
pub fn enumerate_isometries(v: &BilinearSpace) -> Result<Vec<Matrix>> {
    let n = v.dim();
    let q = v.level().size();
    let small = (n <= 3 && q <= 7) || (n == 4 && q == 3);
    if !small {
        return Err(Error::TooLarge(format!(
            "group enumeration capped at dimension 3 over 7 elements (or dimension 4 over 3); got dimension {} over {} elements",
            n, q
        )));
    }
    let lv = v.level().clone();
    let qn = q.pow(n as u32);
    let cols: Vec<Matrix> = (0..qn)
        .map(|idx| {
            let mut m = Matrix::zero(&lv, n, 1);
            let mut rem = idx;
            for i in 0..n {
                let d = rem % q;
                rem /= q;
                if d != 0 {
                    m.set(i, 0, &lv.element_from_index(d));
                }
            }
            m
        })
        .collect();

    fn search(
        v: &BilinearSpace,
        cols: &[Matrix],
        chosen: &mut Vec<usize>,
        out: &mut Vec<Matrix>,
    ) {
        let n = v.dim();
        let j = chosen.len();
        if j == n {
            let refs: Vec<&Matrix> = chosen.iter().map(|&i| &cols[i]).collect();
            out.push(Matrix::hstack(&refs));
            return;
        }
        'candidate: for (ci, c) in cols.iter().enumerate() {
            if v.bilinear(c, c) != v.gram().get(j, j) {
                continue;
            }
            for (pos, &pi) in chosen.iter().enumerate() {
                if v.bilinear(&cols[pi], c) != v.gram().get(pos, j) {
                    continue 'candidate;
                }
            }
            chosen.push(ci);
            search(v, cols, chosen, out);
            chosen.pop();
        }
    }

    let mut out = Vec::new();
    search(v, &cols, &mut Vec::new(), &mut out);
    Ok(out)
}
