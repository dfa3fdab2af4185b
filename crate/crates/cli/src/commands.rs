//! Resolution of flags and configuration, and dispatch to the analyses.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{json, Value};

use x1jacobi::classify::boundary_decay;
use x1jacobi::eigensolve::solve_eigenpoly_with;
use x1jacobi::oracle::solver_registry;
use x1jacobi::quadrature::{unit_normalize, DEFAULT_REL_TOL};
use x1jacobi::scalar::set_precision_digits;
use x1jacobi::{Error, Rational, Scalar};

use crate::cli::{Cli, Command};
use crate::config::{default_precision, load_config, parse_value, OutputFormat, RunConfig};
use crate::output::{float, json_string, rational, real, Table};
use crate::report::run_report;
use crate::sections::{self, Context, DataFile, Section};
use crate::CliError;

/// Keys accepted in a `--config` file. Keys that do not apply to the
/// running subcommand are ignored, so one file can serve several commands.
pub const CONFIG_KEYS: [&str; 15] = [
    "alpha",
    "beta",
    "n_max",
    "rel_tol",
    "output_format",
    "precision_digits",
    "law",
    "k",
    "nodes",
    "n",
    "normalize",
    "solver",
    "numeric",
    "at",
    "out",
];

/// What a command printed and whether all of its checks passed.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub passed: bool,
}

struct Overrides(BTreeMap<String, String>);

impl Overrides {
    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.0.get(key).map(|v| parse_value(key, v)).transpose()
    }

    fn set<T: std::str::FromStr>(&self, key: &str, slot: &mut T) -> Result<(), CliError>
    where
        T::Err: std::fmt::Display,
    {
        if let Some(v) = self.get(key)? {
            *slot = v;
        }
        Ok(())
    }
}

fn required(value: Option<String>, key: &str) -> Result<Rational, CliError> {
    let text = value.ok_or_else(|| CliError::Input(format!("--{key} is required (flag or config key `{key}`)")))?;
    text.parse::<Rational>().map_err(|e| CliError::Input(format!("{key}: {e}")))
}

/// Applies configuration overrides to the subcommand's own options.
fn override_command(cmd: &mut Command, ov: &Overrides) -> Result<(), CliError> {
    match cmd {
        Command::Params | Command::Classify { .. } | Command::Coeffs { .. } => {}
        Command::Eigen { n_max, normalize, law } => {
            ov.set("n_max", n_max)?;
            ov.set("normalize", normalize)?;
            ov.set("law", law)?;
        }
        Command::Gram { n_max, law } | Command::Density { n_max, law } | Command::Report { n_max, law } => {
            ov.set("n_max", n_max)?;
            ov.set("law", law)?;
        }
        Command::Boundary { n, law } => {
            ov.set("n", n)?;
            ov.set("law", law)?;
        }
        Command::Spectrum { k, nodes, law, solver } => {
            ov.set("k", k)?;
            if let Some(v) = ov.get("nodes")? {
                *nodes = Some(v);
            }
            ov.set("law", law)?;
            ov.set("solver", solver)?;
        }
    }
    match cmd {
        Command::Classify { numeric } => ov.set("numeric", numeric),
        Command::Coeffs { at } => {
            if let Some(list) = ov.0.get("at") {
                *at = list.split(',').map(|s| s.trim().to_string()).collect();
            }
            Ok(())
        }
        Command::Eigen { normalize, .. } if normalize != "monic" && normalize != "unit" => Err(CliError::Input(
            format!("normalize must be monic or unit (got `{normalize}`)"),
        )),
        _ => Ok(()),
    }
}

fn n_max_of(cmd: &Command) -> u32 {
    match cmd {
        Command::Eigen { n_max, .. }
        | Command::Gram { n_max, .. }
        | Command::Density { n_max, .. }
        | Command::Report { n_max, .. } => *n_max,
        Command::Boundary { n, .. } => *n,
        Command::Spectrum { k, .. } => (*k as u32).saturating_sub(1),
        _ => 0,
    }
}

/// Resolves the configuration and runs the command. Data files are written
/// under `--out` when given.
pub fn execute(cli: Cli) -> Result<Outcome, CliError> {
    let Cli { common, mut command } = cli;
    let ov = Overrides(match &common.config {
        Some(path) => load_config(path)?,
        None => BTreeMap::new(),
    });
    if let Some(bad) = ov.0.keys().find(|k| !CONFIG_KEYS.contains(&k.as_str())) {
        return Err(CliError::Input(format!(
            "unknown config key `{bad}` (known: {})",
            CONFIG_KEYS.join(", ")
        )));
    }
    override_command(&mut command, &ov)?;

    let flag_format = if common.json {
        Some(OutputFormat::Json)
    } else if common.csv {
        Some(OutputFormat::Csv)
    } else if common.tsv {
        Some(OutputFormat::Tsv)
    } else {
        None
    };
    let format = ov.get::<OutputFormat>("output_format")?.or(flag_format);
    let precision = match ov.get("precision_digits")? {
        Some(p) => p,
        None => match common.precision {
            Some(p) => p,
            None => default_precision()?,
        },
    };
    let cfg = RunConfig {
        alpha: required(ov.0.get("alpha").cloned().or(common.alpha), "alpha")?,
        beta: required(ov.0.get("beta").cloned().or(common.beta), "beta")?,
        n_max: n_max_of(&command),
        rel_tol: ov.get("rel_tol")?.or(common.rel_tol).unwrap_or(DEFAULT_REL_TOL),
        output_format: format.unwrap_or(OutputFormat::Csv),
        precision_digits: precision,
    };
    cfg.check()?;
    set_precision_digits(cfg.precision_digits)?;
    let out_dir = ov.get::<std::path::PathBuf>("out")?.or(common.out);

    let law = match &command {
        Command::Eigen { law, .. }
        | Command::Gram { law, .. }
        | Command::Density { law, .. }
        | Command::Boundary { law, .. }
        | Command::Spectrum { law, .. }
        | Command::Report { law, .. } => law.clone(),
        _ => x1jacobi::laws::DEFAULT_LAW.to_string(),
    };
    let ctx = Context::new(cfg, &law)?;

    let (outcome, files) = dispatch(&ctx, &command, format)?;
    if let Some(dir) = out_dir {
        write_files(&dir, &files)?;
    }
    Ok(outcome)
}

fn write_files(dir: &Path, files: &[DataFile]) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("cannot create {}: {e}", dir.display())))?;
    for f in files {
        let path = dir.join(&f.name);
        std::fs::write(&path, &f.contents)
            .map_err(|e| CliError::Failure(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn table_output(table: &Table, format: Option<OutputFormat>) -> String {
    table.render(format.unwrap_or(OutputFormat::Csv))
}

/// Plot data unless JSON or CSV is requested.
fn plot_output(table: &Table, format: Option<OutputFormat>) -> String {
    match format {
        Some(OutputFormat::Json) | Some(OutputFormat::Csv) => table.render(format.expect("matched Some")),
        _ => table.plot_data(),
    }
}

fn finish(stdout: String, sections: &[&Section]) -> (Outcome, Vec<DataFile>) {
    let passed = sections.iter().all(|s| s.passed());
    for s in sections {
        for c in s.checks.iter().filter(|c| !c.pass) {
            eprintln!("check failed: {}/{}: {} (expected {})", s.name, c.name, c.value, c.tolerance);
        }
    }
    let files = sections.iter().flat_map(|s| s.files.iter().cloned()).collect();
    (Outcome { stdout, passed }, files)
}

fn dispatch(ctx: &Context, command: &Command, format: Option<OutputFormat>) -> Result<(Outcome, Vec<DataFile>), CliError> {
    let digits = ctx.digits();
    Ok(match command {
        Command::Params => {
            let s = sections::params(ctx);
            let stdout = match format {
                Some(OutputFormat::Json) => json_string(&Value::Object(s.data.clone())),
                _ => {
                    let mut t = Table::new(s.data.keys().cloned());
                    t.push(s.data.values().map(|v| v.as_str().unwrap_or_default().to_string()).collect());
                    table_output(&t, format)
                }
            };
            finish(stdout, &[&s])
        }
        Command::Coeffs { at } => {
            let points = at
                .iter()
                .map(|p| p.parse::<Rational>().map_err(|e| CliError::Input(format!("--at: {e}"))))
                .collect::<Result<Vec<_>, _>>()?;
            let t = sections::coefficients(ctx, &points)?;
            (
                Outcome {
                    stdout: table_output(&t, format),
                    passed: true,
                },
                Vec::new(),
            )
        }
        Command::Eigen { normalize, .. } => {
            let (s, pairs, table) = sections::eigen(ctx)?;
            let stdout = if normalize == "unit" {
                let mut rows = Vec::new();
                let mut t = Table::new(["n", "lambda", "degree", "coeffs"]);
                for pair in &pairs {
                    let unit = unit_normalize(&ctx.ps, pair, ctx.cfg.rel_tol)?;
                    let coeffs: Vec<String> = unit.poly.coeffs().iter().map(|c| real(c, digits)).collect();
                    t.push(vec![
                        pair.n.to_string(),
                        rational(&pair.lambda),
                        unit.poly.degree().unwrap_or(0).to_string(),
                        coeffs.join(" "),
                    ]);
                    rows.push(json!({ "n": pair.n, "lambda": rational(&pair.lambda), "coeffs": coeffs }));
                }
                match format {
                    Some(OutputFormat::Json) => json_string(&Value::Array(rows)),
                    _ => table_output(&t, format),
                }
            } else {
                match format {
                    Some(OutputFormat::Json) => json_string(&s.data["eigenpairs"]),
                    _ => table_output(&table, format),
                }
            };
            finish(stdout, &[&s])
        }
        Command::Gram { .. } => {
            let (es, pairs, _) = sections::eigen(ctx)?;
            let (s, t) = sections::gram_matrix(ctx, &pairs)?;
            finish(table_output(&t, format), &[&es, &s])
        }
        Command::Density { .. } => {
            let (es, pairs, _) = sections::eigen(ctx)?;
            let (s, t) = sections::density(ctx, &pairs)?;
            finish(plot_output(&t, format), &[&es, &s])
        }
        Command::Classify { numeric } => {
            let s = sections::classification(ctx, *numeric)?;
            let reports = s.data["endpoints"].as_array().expect("endpoint list").clone();
            let stdout = match format {
                Some(OutputFormat::Json) => json_string(&Value::Array(reports)),
                _ => {
                    let keys: Vec<String> = reports[0].as_object().expect("report object").keys().cloned().collect();
                    let mut t = Table::new(keys.clone());
                    for r in &reports {
                        t.push(keys.iter().map(|k| cell(&r[k])).collect());
                    }
                    table_output(&t, format)
                }
            };
            finish(stdout, &[&s])
        }
        Command::Boundary { n, .. } => boundary_command(ctx, *n, format)?,
        Command::Spectrum { k, nodes, solver, .. } => spectrum_command(ctx, *k, *nodes, solver, format)?,
        Command::Report { .. } => {
            let report = run_report(ctx)?;
            (
                Outcome {
                    stdout: report.json.clone(),
                    passed: report.passed,
                },
                report.files,
            )
        }
    })
}

/// A JSON scalar as a table cell.
fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn boundary_command(ctx: &Context, n: u32, format: Option<OutputFormat>) -> Result<(Outcome, Vec<DataFile>), CliError> {
    let pair = solve_eigenpoly_with(&ctx.ps, n, ctx.law())?;
    let want_plus = ctx.ps.alpha().to_f64() + 1.0;
    let want_minus = ctx.ps.beta().to_f64() + 1.0;
    let decay = match boundary_decay(&ctx.ps, &pair.poly) {
        Ok(d) => d,
        Err(Error::Degenerate { .. }) => {
            let stdout = match format {
                Some(OutputFormat::Json) => json_string(&json!({ "n": n, "identically_zero": true })),
                _ => format!("# [P_{n}, phi1] vanishes identically\n"),
            };
            return Ok((Outcome { stdout, passed: true }, Vec::new()));
        }
        Err(e) => return Err(e.into()),
    };
    let t = sections::decay_table(&decay, ctx.digits());
    let passed = (decay.exp_plus - want_plus).abs() <= sections::EXPONENT_TOL
        && (decay.exp_minus - want_minus).abs() <= sections::EXPONENT_TOL;
    let stdout = match format {
        Some(OutputFormat::Json) => json_string(&json!({
            "n": n,
            "exponent_plus": float(decay.exp_plus),
            "exponent_minus": float(decay.exp_minus),
            "expected_plus": float(want_plus),
            "expected_minus": float(want_minus),
            "samples": t.to_json(),
        })),
        _ => format!(
            "# exponent_plus = {}\n# exponent_minus = {}\n# expected_plus = {}\n# expected_minus = {}\n{}",
            float(decay.exp_plus),
            float(decay.exp_minus),
            float(want_plus),
            float(want_minus),
            plot_output(&t, format)
        ),
    };
    let files = vec![DataFile {
        name: format!("boundary_n{n}.tsv"),
        contents: t.plot_data(),
    }];
    Ok((Outcome { stdout, passed }, files))
}

fn spectrum_command(
    ctx: &Context,
    k: usize,
    nodes: Option<usize>,
    solver: &str,
    format: Option<OutputFormat>,
) -> Result<(Outcome, Vec<DataFile>), CliError> {
    if k == 0 {
        return Err(CliError::Input("k must be at least 1".into()));
    }
    let registry = solver_registry();
    let chosen = registry.get(solver)?;
    if chosen.name() == "collocation" {
        let (s, t) = sections::spectrum(ctx, k, nodes)?;
        let stdout = match format {
            Some(OutputFormat::Json) => json_string(&Value::Object(s.data.clone())),
            _ => table_output(&t, format),
        };
        return Ok(finish(stdout, &[&s]));
    }
    let values = chosen.lowest(&ctx.ps, k, nodes.unwrap_or_else(|| sections::spectrum_nodes(k)))?;
    let mut t = Table::new(["n", "lambda", "formula", "matched"]);
    let mut passed = true;
    for (n, v) in values.iter().enumerate() {
        let law_value = ctx.law().lambda(&ctx.ps, n as u32).to_f64();
        let matched = (v - law_value).abs() <= x1jacobi::oracle::MATCH_REL_TOL * v.abs().max(law_value.abs()).max(1.0);
        passed &= matched;
        t.push(vec![n.to_string(), float(*v), float(law_value), matched.to_string()]);
    }
    let stdout = match format {
        Some(OutputFormat::Json) => json_string(&json!({
            "solver": chosen.name(),
            "law": ctx.law().name(),
            "formula": ctx.law().formula(),
            "eigenvalues": t.to_json(),
        })),
        _ => table_output(&t, format),
    };
    Ok((Outcome { stdout, passed }, Vec::new()))
}
