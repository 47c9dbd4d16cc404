//! Problem documents: the JSON interchange format used by the command-line
//! front end.
//!
//! A problem document is a single JSON object with four keys:
//!
//! * `"p"` — the characteristic (an odd prime),
//! * `"extension"` — optional; `{"degree": k}` or
//!   `{"defining_poly": [c0, ..., 1]}` selecting a field level above the
//!   prime field (the polynomial must be the canonical one for its degree),
//! * `"form"` — `{"kind": "symmetric" | "symplectic", "gram": [[...]]}`,
//! * `"operators"` — an object mapping names to square matrices.
//!
//! Field elements are written as bare integers at the prime field (negative
//! values are reduced) and as coefficient arrays over the parent level at
//! extension levels, constant coefficient first.  Serialization routines in
//! this module emit the same canonical shapes, so `serialize ∘ parse` is
//! idempotent and byte-deterministic.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{FieldElement, Level};
use crate::forms::{BilinearSpace, FormKind};
use crate::linalg::{ElementaryDivisorSet, Matrix};
use crate::poly::Polynomial;

/// A parsed problem document: the working field level, the bilinear space,
/// and the named operators (all matrices are square of the form's dimension).
#[derive(Clone, Debug)]
pub struct ProblemFile {
    /// Field level every matrix in the document lives at.
    pub level: Level,
    /// The bilinear space the operators act on.
    pub space: BilinearSpace,
    /// Named operators, sorted by name.
    pub operators: BTreeMap<String, Matrix>,
}

fn perr(path: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Parse { path: path.into(), reason: reason.into() }
}

/// Serialize a field element in canonical form: a bare integer at the prime
/// field, otherwise the array of coefficients over the parent level with the
/// constant coefficient first.
pub fn element_to_json(x: &FieldElement) -> Value {
    let lv = x.level();
    match lv.parent() {
        None => json!(x.index() as u64),
        Some(parent) => {
            let q = parent.size();
            let d = lv.relative_degree();
            let mut idx = x.index();
            let mut coeffs = Vec::with_capacity(d);
            for _ in 0..d {
                let digit = idx % q;
                idx /= q;
                coeffs.push(element_to_json(&parent.element_from_index(digit)));
            }
            Value::Array(coeffs)
        }
    }
}

/// Parse a field element at `level` from its canonical JSON form.
///
/// Integers are accepted at every level (reduced modulo `p` and embedded);
/// coefficient arrays are accepted only at extension levels and may be
/// shorter than the relative degree (missing high coefficients are zero).
pub fn parse_element(level: &Level, v: &Value, path: &str) -> Result<FieldElement> {
    match v {
        Value::Number(n) => {
            let i = n
                .as_i64()
                .ok_or_else(|| perr(path, "expected an integer that fits in 64 bits"))?;
            Ok(level.from_int(i))
        }
        Value::Array(arr) => {
            let parent = level
                .parent()
                .ok_or_else(|| perr(path, "coefficient arrays are not allowed at the prime field"))?;
            let d = level.relative_degree();
            if arr.len() > d {
                return Err(perr(
                    path,
                    format!("at most {d} coefficients fit a degree-{d} extension"),
                ));
            }
            level
                .try_size()
                .ok_or_else(|| perr(path, "field level too large for element indexing"))?;
            let q = parent.size();
            let mut idx: u128 = 0;
            let mut scale: u128 = 1;
            for (i, c) in arr.iter().enumerate() {
                let ce = parse_element(&parent, c, &format!("{path}[{i}]"))?;
                idx += ce.index() * scale;
                scale *= q;
            }
            Ok(level.element_from_index(idx))
        }
        _ => Err(perr(path, "expected an integer or a coefficient array")),
    }
}

/// Serialize a matrix as an array of rows of canonical element encodings.
pub fn matrix_to_json(m: &Matrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| {
                Value::Array((0..m.cols()).map(|j| element_to_json(&m.get(i, j))).collect())
            })
            .collect(),
    )
}

/// Parse a matrix at `level` from an array of equal-length rows.
pub fn parse_matrix(level: &Level, v: &Value, path: &str) -> Result<Matrix> {
    let rows = v
        .as_array()
        .ok_or_else(|| perr(path, "expected an array of rows"))?;
    if rows.is_empty() {
        return Err(perr(path, "matrix must have at least one row"));
    }
    let mut parsed: Vec<Vec<FieldElement>> = Vec::with_capacity(rows.len());
    let mut width = None;
    for (i, row) in rows.iter().enumerate() {
        let row_path = format!("{path}[{i}]");
        let entries = row
            .as_array()
            .ok_or_else(|| perr(&row_path, "expected an array of entries"))?;
        if entries.is_empty() {
            return Err(perr(&row_path, "row must have at least one entry"));
        }
        match width {
            None => width = Some(entries.len()),
            Some(w) if w != entries.len() => {
                return Err(perr(
                    &row_path,
                    format!("row has {} entries, expected {w}", entries.len()),
                ))
            }
            _ => {}
        }
        let mut out = Vec::with_capacity(entries.len());
        for (j, e) in entries.iter().enumerate() {
            out.push(parse_element(level, e, &format!("{row_path}[{j}]"))?);
        }
        parsed.push(out);
    }
    let cols = width.unwrap();
    Ok(Matrix::from_fn(level, parsed.len(), cols, |i, j| {
        parsed[i][j].clone()
    }))
}

/// Serialize a polynomial as its coefficient array, constant term first.
pub fn poly_to_json(f: &Polynomial) -> Value {
    match f.degree() {
        None => Value::Array(vec![json!(0)]),
        Some(d) => Value::Array((0..=d).map(|i| element_to_json(&f.coeff(i))).collect()),
    }
}

/// Serialize a field level as `{"p", "degree", "defining_poly"}`, where
/// `degree` is the absolute degree over the prime field and `defining_poly`
/// is the canonical defining polynomial over the parent level (the
/// polynomial `x` at the prime field itself).
pub fn level_to_json(lv: &Level) -> Value {
    let poly = match lv.defining_polynomial() {
        None => Value::Array(vec![json!(0), json!(1)]),
        Some(f) => poly_to_json(&f),
    };
    json!({
        "p": lv.p(),
        "degree": lv.degree(),
        "defining_poly": poly,
    })
}

/// Serialize an elementary-divisor set as an array of
/// `{"eigenvalue", "size"}` records, optionally embedding the eigenvalues
/// into a larger level first.
pub fn divisors_to_json(ed: &ElementaryDivisorSet, at: &Level) -> Result<Value> {
    let mut out = Vec::with_capacity(ed.entries.len());
    for (lambda, size) in &ed.entries {
        let lam = lambda.embed(at)?;
        out.push(json!({
            "eigenvalue": element_to_json(&lam),
            "size": size,
        }));
    }
    Ok(Value::Array(out))
}

fn parse_extension(prime: &Level, ext: &Value) -> Result<Level> {
    let obj = ext
        .as_object()
        .ok_or_else(|| perr("$.extension", "expected an object"))?;
    for k in obj.keys() {
        if k != "degree" && k != "defining_poly" {
            return Err(perr(format!("$.extension.{k}"), "unknown key"));
        }
    }
    let degree = match obj.get("degree") {
        None => None,
        Some(d) => {
            let d = d
                .as_u64()
                .filter(|&d| d >= 1)
                .ok_or_else(|| perr("$.extension.degree", "expected a positive integer"))?;
            Some(d as usize)
        }
    };
    let poly_degree = match obj.get("defining_poly") {
        None => None,
        Some(pv) => {
            let arr = pv
                .as_array()
                .ok_or_else(|| perr("$.extension.defining_poly", "expected a coefficient array"))?;
            if arr.len() < 3 {
                return Err(perr(
                    "$.extension.defining_poly",
                    "defining polynomial must have degree at least 2",
                ));
            }
            Some(arr.len() - 1)
        }
    };
    let d = match (degree, poly_degree) {
        (None, None) => {
            return Err(perr("$.extension", "expected degree or defining_poly"))
        }
        (Some(d), None) | (None, Some(d)) => d,
        (Some(d), Some(pd)) => {
            if d != pd {
                return Err(perr(
                    "$.extension",
                    format!("degree {d} does not match defining_poly degree {pd}"),
                ));
            }
            d
        }
    };
    let level = if d == 1 { prime.clone() } else { prime.extend(d) };
    if let Some(pv) = obj.get("defining_poly") {
        let canonical = level.defining_polynomial().ok_or_else(|| {
            perr("$.extension.defining_poly", "degree 1 takes no defining polynomial")
        })?;
        let arr = pv.as_array().unwrap();
        for (i, c) in arr.iter().enumerate() {
            let ce = parse_element(prime, c, &format!("$.extension.defining_poly[{i}]"))?;
            if ce != canonical.coeff(i) {
                return Err(perr(
                    "$.extension.defining_poly",
                    format!(
                        "not the canonical defining polynomial for degree {d} (coefficient {i} differs)"
                    ),
                ));
            }
        }
    }
    Ok(level)
}

/// Parse a problem document from JSON text.
///
/// Structural problems are reported as parse errors carrying the JSON path
/// of the offending value; a characteristic no larger than the form's
/// dimension is rejected outright.
pub fn parse_problem(text: &str) -> Result<ProblemFile> {
    let doc: Value =
        serde_json::from_str(text).map_err(|e| perr("$", e.to_string()))?;
    let obj = doc
        .as_object()
        .ok_or_else(|| perr("$", "expected a JSON object"))?;
    for k in obj.keys() {
        if !matches!(k.as_str(), "p" | "extension" | "form" | "operators") {
            return Err(perr(format!("$.{k}"), "unknown key"));
        }
    }
    let p = obj
        .get("p")
        .ok_or_else(|| perr("$.p", "missing"))?
        .as_u64()
        .filter(|&p| p >= 2)
        .ok_or_else(|| perr("$.p", "expected a prime number"))?;
    let prime = Level::prime(p)?;
    let level = match obj.get("extension") {
        None => prime.clone(),
        Some(ext) => parse_extension(&prime, ext)?,
    };

    let form = obj
        .get("form")
        .ok_or_else(|| perr("$.form", "missing"))?
        .as_object()
        .ok_or_else(|| perr("$.form", "expected an object"))?;
    for k in form.keys() {
        if k != "kind" && k != "gram" {
            return Err(perr(format!("$.form.{k}"), "unknown key"));
        }
    }
    let kind = match form.get("kind").and_then(Value::as_str) {
        Some("symmetric") => FormKind::Symmetric,
        Some("symplectic") => FormKind::Symplectic,
        _ => {
            return Err(perr(
                "$.form.kind",
                "expected \"symmetric\" or \"symplectic\"",
            ))
        }
    };
    let gram_val = form
        .get("gram")
        .ok_or_else(|| perr("$.form.gram", "missing"))?;
    let gram = parse_matrix(&level, gram_val, "$.form.gram")?;
    if !gram.is_square() {
        return Err(perr(
            "$.form.gram",
            format!("expected a square matrix, got {}x{}", gram.rows(), gram.cols()),
        ));
    }
    let n = gram.rows();
    if p as usize <= n {
        return Err(Error::CharacteristicTooSmall { p, dim: n });
    }
    let space = BilinearSpace::new(kind, gram)
        .map_err(|e| perr("$.form.gram", e.to_string()))?;

    let mut operators = BTreeMap::new();
    if let Some(ops) = obj.get("operators") {
        let ops = ops
            .as_object()
            .ok_or_else(|| perr("$.operators", "expected an object"))?;
        for (name, mv) in ops {
            let path = format!("$.operators.{name}");
            let m = parse_matrix(&level, mv, &path)?;
            if m.rows() != n || m.cols() != n {
                return Err(perr(
                    &path,
                    format!("expected a {n}x{n} matrix, got {}x{}", m.rows(), m.cols()),
                ));
            }
            operators.insert(name.clone(), m);
        }
    }
    Ok(ProblemFile {
        level,
        space,
        operators,
    })
}

/// Serialize a problem document in canonical form.  `parse ∘ serialize` is
/// the identity and `serialize ∘ parse` is idempotent.
pub fn problem_to_json(pf: &ProblemFile) -> Value {
    let mut doc = serde_json::Map::new();
    doc.insert("p".into(), json!(pf.level.p()));
    if pf.level.degree() > 1 {
        let poly = pf
            .level
            .defining_polynomial()
            .map(|f| poly_to_json(&f))
            .unwrap_or(Value::Null);
        doc.insert(
            "extension".into(),
            json!({
                "degree": pf.level.degree(),
                "defining_poly": poly,
            }),
        );
    }
    doc.insert(
        "form".into(),
        json!({
            "kind": pf.space.kind().as_str(),
            "gram": matrix_to_json(pf.space.gram()),
        }),
    );
    let ops: serde_json::Map<String, Value> = pf
        .operators
        .iter()
        .map(|(name, m)| (name.clone(), matrix_to_json(m)))
        .collect();
    doc.insert("operators".into(), Value::Object(ops));
    Value::Object(doc)
}
