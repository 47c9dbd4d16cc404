//! Command-line front end: load a problem document, run one engine
//! operation, and print exactly one JSON object on stdout.
//!
//! Exit codes: 0 on success, 1 on usage errors (bad flags, unknown
//! subcommands), 2 on domain errors (malformed documents, non-isometries,
//! failed preconditions).  Output is byte-deterministic: object keys are
//! sorted and every value is serialized in canonical form.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use isoconj::{
    brute_force_conjugate, common_superlevel, divisors_to_json, elementary_divisors,
    element_to_json, isometry_conjugacy, level_to_json, log_unipotent, matrix_to_json,
    multiplicative_jordan, parse_problem, poly_to_json, primary_decomposition, sl2_triple,
    sym_power_form, unipotent_orthogonal_decomposition, Error, IrreducibleSummand, Level, Matrix,
    PrimaryComponent, ProblemFile, Result, StandardComponent,
};

#[derive(Parser)]
#[command(
    name = "isoconj",
    version,
    about = "Exact conjugacy decisions for isometries of bilinear spaces over finite-field towers"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check whether a named operator is an isometry of the problem's form
    Check {
        /// Path to the problem document
        #[arg(long)]
        problem: PathBuf,
        /// Name of the operator to check
        #[arg(long = "T")]
        t: String,
    },
    /// Elementary divisors of a named operator, over its splitting level
    Eldiv {
        #[arg(long)]
        problem: PathBuf,
        /// Name of the operator
        #[arg(long = "T")]
        t: String,
    },
    /// Orthogonal primary decomposition of the space under an isometry
    Primary {
        #[arg(long)]
        problem: PathBuf,
        /// Name of the isometry
        #[arg(long = "T")]
        t: String,
    },
    /// Multiplicative Jordan decomposition with polynomial certificates
    Jordan {
        #[arg(long)]
        problem: PathBuf,
        /// Name of the isometry
        #[arg(long = "T")]
        t: String,
    },
    /// The sl2 triple (e, h, f) attached to a unipotent isometry
    Jm {
        #[arg(long)]
        problem: PathBuf,
        /// Name of the unipotent isometry
        #[arg(long = "T")]
        t: String,
    },
    /// Orthogonal decomposition of a unipotent isometry into irreducible summands
    Unidec {
        #[arg(long)]
        problem: PathBuf,
        /// Name of the unipotent isometry
        #[arg(long = "T")]
        t: String,
    },
    /// Decide conjugacy of two isometries and construct a witness
    Conj {
        #[arg(long)]
        problem: PathBuf,
        /// Name of the first operator
        #[arg(long = "S")]
        s: String,
        /// Name of the second operator
        #[arg(long = "T")]
        t: String,
    },
    /// Canonical invariant form on the dimension-(m+1) weight model
    Symform {
        /// Highest weight m
        m: usize,
        /// Field characteristic
        #[arg(long)]
        p: u64,
    },
    /// Brute-force conjugator search over a small field level
    Oracle {
        #[arg(long)]
        problem: PathBuf,
        /// Name of the first operator
        #[arg(long = "S")]
        s: String,
        /// Name of the second operator
        #[arg(long = "T")]
        t: String,
        /// Extension degree over the problem's level to search at
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        degree: u32,
    },
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Check { .. } => "check",
            Cmd::Eldiv { .. } => "eldiv",
            Cmd::Primary { .. } => "primary",
            Cmd::Jordan { .. } => "jordan",
            Cmd::Jm { .. } => "jm",
            Cmd::Unidec { .. } => "unidec",
            Cmd::Conj { .. } => "conj",
            Cmd::Symform { .. } => "symform",
            Cmd::Oracle { .. } => "oracle",
        }
    }
}

fn load(path: &PathBuf) -> Result<ProblemFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    parse_problem(&text)
}

fn operator<'a>(pf: &'a ProblemFile, name: &str) -> Result<&'a Matrix> {
    pf.operators.get(name).ok_or_else(|| Error::Parse {
        path: format!("$.operators.{name}"),
        reason: "operator not found in problem document".into(),
    })
}

fn component_to_json(c: &PrimaryComponent) -> Value {
    json!({
        "eigenvalue": element_to_json(&c.lambda),
        "dimension": c.subspace.dim(),
        "basis": matrix_to_json(c.subspace.basis()),
        "gram": matrix_to_json(&c.gram),
        "operator": matrix_to_json(&c.operator),
    })
}

fn standard_to_json(c: &StandardComponent) -> Value {
    json!({
        "eigenvalue": element_to_json(&c.lambda),
        "dimension": c.v_lambda.dim() + c.v_lambda_inv.dim(),
        "basis_lambda": matrix_to_json(c.v_lambda.basis()),
        "basis_lambda_inv": matrix_to_json(c.v_lambda_inv.basis()),
        "operator_lambda": matrix_to_json(&c.op_lambda),
        "operator_lambda_inv": matrix_to_json(&c.op_lambda_inv),
        "pair_gram": matrix_to_json(&c.pair_gram),
    })
}

fn summand_to_json(s: &IrreducibleSummand) -> Value {
    json!({
        "basis": matrix_to_json(s.subspace.basis()),
        "weight": s.weight,
        "class": s.restriction_class.as_str(),
    })
}

/// Run one subcommand, returning the result payload and the level that all
/// serialized values live at.
fn execute(cmd: &Cmd) -> Result<(Value, Value)> {
    match cmd {
        Cmd::Check { problem, t } => {
            let pf = load(problem)?;
            let t = operator(&pf, t)?;
            let ok = pf.space.is_isometry(t)?;
            Ok((json!({ "isometry": ok }), level_to_json(&pf.level)))
        }
        Cmd::Eldiv { problem, t } => {
            let pf = load(problem)?;
            let t = operator(&pf, t)?;
            let ed = elementary_divisors(t)?;
            let divisors = divisors_to_json(&ed, &ed.level)?;
            Ok((divisors, level_to_json(&ed.level)))
        }
        Cmd::Primary { problem, t } => {
            let pf = load(problem)?;
            let t = operator(&pf, t)?;
            let pd = primary_decomposition(t, &pf.space)?;
            let result = json!({
                "plus": pd.plus_part.as_ref().map(component_to_json).unwrap_or(Value::Null),
                "minus": pd.minus_part.as_ref().map(component_to_json).unwrap_or(Value::Null),
                "standard": pd.standard_parts.iter().map(standard_to_json).collect::<Vec<_>>(),
            });
            Ok((result, level_to_json(&pd.level)))
        }
        Cmd::Jordan { problem, t } => {
            let pf = load(problem)?;
            let t = operator(&pf, t)?;
            let jp = multiplicative_jordan(t, &pf.space)?;
            let result = json!({
                "semisimple": matrix_to_json(&jp.ts),
                "unipotent": matrix_to_json(&jp.tu),
                "semisimple_poly": poly_to_json(&jp.p_s),
                "unipotent_poly": poly_to_json(&jp.p_u),
            });
            Ok((result, level_to_json(&pf.level)))
        }
        Cmd::Jm { problem, t } => {
            let pf = load(problem)?;
            let t = operator(&pf, t)?;
            if !pf.space.is_isometry(t)? {
                return Err(Error::NotIsometry);
            }
            let e = log_unipotent(t)?;
            let triple = sl2_triple(&e, &pf.space)?;
            let result = json!({
                "e": matrix_to_json(&triple.e),
                "h": matrix_to_json(&triple.h),
                "f": matrix_to_json(&triple.f),
            });
            Ok((result, level_to_json(&pf.level)))
        }
        Cmd::Unidec { problem, t } => {
            let pf = load(problem)?;
            let t = operator(&pf, t)?;
            let d = unipotent_orthogonal_decomposition(t, &pf.space)?;
            let result = json!({
                "indecomposables": d.indecomposables.iter().map(summand_to_json).collect::<Vec<_>>(),
                "standard_pairs": d
                    .standard_pairs
                    .iter()
                    .map(|(a, b)| json!([summand_to_json(a), summand_to_json(b)]))
                    .collect::<Vec<_>>(),
            });
            Ok((result, level_to_json(&pf.level)))
        }
        Cmd::Conj { problem, s, t } => {
            let pf = load(problem)?;
            let s = operator(&pf, s)?;
            let t = operator(&pf, t)?;
            let verdict = isometry_conjugacy(s, t, &pf.space)?;
            let out_level = match &verdict.witness {
                Some(w) => common_superlevel(w.level(), &verdict.divisors_s.level)?,
                None => verdict.divisors_s.level.clone(),
            };
            let witness = match &verdict.witness {
                Some(w) => matrix_to_json(&w.embed_any(&out_level)?),
                None => Value::Null,
            };
            let result = json!({
                "conjugate": verdict.conjugate,
                "witness": witness,
                "divisors_s": divisors_to_json(&verdict.divisors_s, &out_level)?,
                "divisors_t": divisors_to_json(&verdict.divisors_t, &out_level)?,
                "case_trace": verdict
                    .case_trace
                    .iter()
                    .map(|e| json!({"component": e.description, "tag": e.tag.as_str()}))
                    .collect::<Vec<_>>(),
            });
            Ok((result, level_to_json(&out_level)))
        }
        Cmd::Symform { m, p } => {
            let prime = Level::prime(*p)?;
            let b = sym_power_form(*m, &prime)?;
            let result = json!({
                "kind": b.kind().as_str(),
                "gram": matrix_to_json(b.gram()),
            });
            Ok((result, level_to_json(&prime)))
        }
        Cmd::Oracle {
            problem,
            s,
            t,
            degree,
        } => {
            let pf = load(problem)?;
            let s = operator(&pf, s)?;
            let t = operator(&pf, t)?;
            let search = if *degree == 1 {
                pf.level.clone()
            } else {
                pf.level.extend(*degree as usize)
            };
            let found = brute_force_conjugate(s, t, &pf.space, &search)?;
            let result = json!({
                "found": found.is_some(),
                "witness": found.as_ref().map(matrix_to_json).unwrap_or(Value::Null),
            });
            Ok((result, level_to_json(&search)))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let envelope = json!({
                "command": Value::Null,
                "error": {"code": "usage", "message": e.to_string()},
                "level": Value::Null,
                "result": Value::Null,
            });
            println!("{envelope}");
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match execute(&cli.cmd) {
        Ok((result, level)) => {
            let envelope = json!({
                "command": cli.cmd.name(),
                "level": level,
                "result": result,
            });
            println!("{envelope}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            let envelope = json!({
                "command": cli.cmd.name(),
                "error": {
                    "code": e.code(),
                    "message": e.to_string(),
                    "status": e.status(),
                },
                "level": Value::Null,
                "result": Value::Null,
            });
            println!("{envelope}");
            ExitCode::from(2)
        }
    }
}
