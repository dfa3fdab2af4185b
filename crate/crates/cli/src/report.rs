//! The full verification run behind `x1jacobi report`.

use serde_json::{json, Map, Value};

use crate::output::{float, json_string, rational};
use crate::sections::{self, Check, Context, DataFile, Section};
use crate::CliError;

/// Version of the report layout.
pub const SCHEMA_VERSION: u32 = 1;

/// File name of the report inside the output directory.
pub const REPORT_FILE: &str = "report.json";

/// Rendered report, its pass/fail status and the data files to write.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub json: String,
    pub passed: bool,
    pub files: Vec<DataFile>,
}

/// Turns a computation failure into a failed section so it is reported;
/// input errors still abort the run.
fn settle(name: &'static str, result: Result<Section, CliError>) -> Result<Section, CliError> {
    match result {
        Ok(s) => Ok(s),
        Err(CliError::Failure(msg)) => Ok(Section {
            name,
            checks: vec![Check::new("completed", false, msg, "no error")],
            ..Default::default()
        }),
        Err(e) => Err(e),
    }
}

/// Runs, in order: parameter validation, eigenpairs, the divergence-form
/// identity, the Gram matrix, endpoint classification, boundary decay, the
/// collocation cross-check and the density series.
pub fn run_report(ctx: &Context) -> Result<Report, CliError> {
    let n_max = ctx.cfg.n_max;
    let (eigen, pairs, _) = sections::eigen(ctx)?;
    let k = n_max as usize + 1;
    let all = [
        sections::params(ctx),
        eigen,
        settle("sl_identity", sections::sl_identity(ctx, &pairs))?,
        settle("gram", sections::gram_matrix(ctx, &pairs).map(|r| r.0))?,
        settle("classify", sections::classification(ctx, true))?,
        settle("boundary", sections::boundary(ctx, &pairs))?,
        settle("spectrum", sections::spectrum(ctx, k, None).map(|r| r.0))?,
        settle("density", sections::density(ctx, &pairs).map(|r| r.0))?,
    ];

    let passed = all.iter().all(Section::passed);
    let failed: Vec<String> = all
        .iter()
        .flat_map(|s| s.checks.iter().filter(|c| !c.pass).map(move |c| format!("{}/{}", s.name, c.name)))
        .collect();
    let discrepancies: Vec<String> = all.iter().flat_map(|s| s.discrepancies.iter().cloned()).collect();
    let section_map: Map<String, Value> = all.iter().map(|s| (s.name.to_string(), s.to_json())).collect();
    let law = ctx.law();
    let value = json!({
        "schema": SCHEMA_VERSION,
        "program": "x1jacobi",
        "version": env!("CARGO_PKG_VERSION"),
        "config": {
            "alpha": rational(ctx.ps.alpha()),
            "beta": rational(ctx.ps.beta()),
            "n_max": n_max,
            "rel_tol": float(ctx.cfg.rel_tol),
            "precision_digits": ctx.cfg.precision_digits,
            "law": law.name(),
            "law_formula": law.formula(),
        },
        "status": if passed { "pass" } else { "fail" },
        "failed_checks": failed,
        "discrepancies": discrepancies,
        "sections": section_map,
    });
    let text = json_string(&value);
    let mut files: Vec<DataFile> = all.iter().flat_map(|s| s.files.iter().cloned()).collect();
    files.push(DataFile {
        name: REPORT_FILE.into(),
        contents: text.clone(),
    });
    Ok(Report {
        json: text,
        passed,
        files,
    })
}
