//! Command implementations: each returns a JSON document and a one-line
//! human summary.

use serde_json::{json, Value};

use larmour_core::hermitian::{larmour_decompose, LarmourSplit};
use larmour_core::involutions::{classify_case, BasisVec};
use larmour_core::residue_maps::{boundary_of_split, d0, d1, divergence_note, witt_equal};
use larmour_core::selftest::{self, Sizes};

use crate::error::CliError;
use crate::problem::{Problem, ProblemSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Classify,
    Decompose,
    Residues,
    Boundary,
    WittEqual,
    Selftest,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub json: Value,
    pub summary: String,
}

fn envelope(command: &str, problem: &Problem) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("command".into(), json!(command));
    m.insert("algebra".into(), json!(problem.form.algebra));
    m.insert("involution".into(), json!(problem.form.sigma));
    m.insert("eps".into(), json!(problem.form.eps));
    m.insert(
        "presentation_map".into(),
        json!({ "x": problem.iso.x_img, "y": problem.iso.y_img }),
    );
    m
}

fn shape(u: &larmour_core::quaternion::QuatElem) -> Vec<String> {
    u.support()
        .iter()
        .enumerate()
        .filter(|(_, s)| **s)
        .map(|(i, _)| BasisVec(i).to_string())
        .collect()
}

fn decomposition_json(split: &LarmourSplit) -> Value {
    let entries: Vec<Value> = split
        .entries
        .iter()
        .map(|e| {
            json!({
                "index": e.index,
                "part": e.part,
                "value": e.value,
                "entry": e.witness.target,
                "shape": shape(&e.witness.target),
                "witness": e.witness.t,
                "residual_half_units": e.residual,
            })
        })
        .collect();
    json!({ "h0": split.h0.entries, "h1": split.h1.entries, "entries": entries })
}

fn warnings(split: &LarmourSplit) -> Vec<&'static str> {
    divergence_note(split.record.label).into_iter().collect()
}

pub fn classify(problem: &Problem) -> Result<Output, CliError> {
    let h = &problem.form;
    let rec = classify_case(&h.algebra, &h.sigma, h.eps)?;
    let summary = format!(
        "case {} (j = {}, s = {}, sigma = {})",
        rec.label,
        rec.j,
        rec.s_eps,
        h.sigma.describe()
    );
    let mut m = envelope("classify", problem);
    m.insert("case".into(), json!(rec));
    Ok(Output {
        json: Value::Object(m),
        summary,
    })
}

pub fn decompose(problem: &Problem) -> Result<Output, CliError> {
    let split = larmour_decompose(&problem.form)?;
    let summary = format!(
        "case {}: h0 of dim {}, h1 of dim {}, {} witnesses verified",
        split.record.label,
        split.h0.dim(),
        split.h1.dim(),
        split.entries.len()
    );
    let mut m = envelope("decompose", problem);
    m.insert("case".into(), json!(split.record));
    m.insert("decomposition".into(), decomposition_json(&split));
    m.insert("warnings".into(), json!(warnings(&split)));
    Ok(Output {
        json: Value::Object(m),
        summary,
    })
}

pub fn residues(problem: &Problem) -> Result<Output, CliError> {
    let alg = &problem.form.algebra;
    let split = larmour_decompose(&problem.form)?;
    let r0 = d0(alg, &split)?;
    let r1 = if split.record.s_eps == 2 {
        None
    } else {
        Some(d1(alg, &split)?)
    };
    let summary = format!(
        "case {}: first residue of dim {}, second residue {}",
        split.record.label,
        r0.dim(),
        r1.as_ref()
            .map_or("absent".to_string(), |r| format!("of dim {}", r.dim()))
    );
    let mut m = envelope("residues", problem);
    m.insert("case".into(), json!(split.record));
    m.insert("decomposition".into(), decomposition_json(&split));
    m.insert("residues".into(), json!({ "d0": r0, "d1": r1 }));
    m.insert("warnings".into(), json!(warnings(&split)));
    Ok(Output {
        json: Value::Object(m),
        summary,
    })
}

pub fn boundary(problem: &Problem) -> Result<Output, CliError> {
    let alg = &problem.form.algebra;
    let split = larmour_decompose(&problem.form)?;
    let b = boundary_of_split(alg, &split)?;
    let summary = format!(
        "case {}: boundary is {}",
        split.record.label,
        if b.is_zero() { "zero" } else { "nonzero" }
    );
    let mut m = envelope("boundary", problem);
    m.insert("case".into(), json!(split.record));
    m.insert("boundary".into(), json!(b));
    m.insert("warnings".into(), json!(warnings(&split)));
    Ok(Output {
        json: Value::Object(m),
        summary,
    })
}

/// Compares two problems sharing algebra, involution and sign.
pub fn witt_equal_cmd(left: &Problem, right: &Problem) -> Result<Output, CliError> {
    let equal = witt_equal(&left.form, &right.form)?;
    let lb = boundary_of_split(&left.form.algebra, &larmour_decompose(&left.form)?)?;
    let rb = boundary_of_split(&right.form.algebra, &larmour_decompose(&right.form)?)?;
    let summary = format!("boundaries {}", if equal { "agree" } else { "differ" });
    let mut m = envelope("witt-equal", left);
    m.insert("equal".into(), json!(equal));
    m.insert("left".into(), json!(lb));
    m.insert("right".into(), json!(rb));
    Ok(Output {
        json: Value::Object(m),
        summary,
    })
}

pub fn selftest_cmd(seed: u64, quick: bool) -> Output {
    let report = selftest::run(seed, if quick { Sizes::QUICK } else { Sizes::FULL });
    let mut lines = vec![format!(
        "seed {seed}: {} of {} suites passed",
        report.passed,
        report.suites.len()
    )];
    for s in &report.suites {
        lines.push(format!(
            "  {} {} ({} trials, {:.3}s)",
            if s.passed { "PASS" } else { "FAIL" },
            s.check.name,
            s.check.trials,
            s.elapsed.as_secs_f64()
        ));
    }
    Output {
        json: json!(report),
        summary: lines.join("\n"),
    }
}

/// Problem documents for `witt-equal`: `{"left": .., "right": ..}`.
pub fn split_pair(v: Value) -> Result<(ProblemSpec, ProblemSpec), CliError> {
    match v {
        Value::Object(mut m)
            if m.contains_key("left") && m.contains_key("right") && m.len() == 2 =>
        {
            let l = ProblemSpec::from_value(m.remove("left").expect("checked"))?;
            let r = ProblemSpec::from_value(m.remove("right").expect("checked"))?;
            Ok((l, r))
        }
        _ => Err(CliError::Input(
            "witt-equal expects {\"left\": problem, \"right\": problem}".into(),
        )),
    }
}
