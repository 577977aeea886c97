//! Command implementations. Each returns the files to write; nothing is
//! written until the whole computation has succeeded.

use std::path::{Path, PathBuf};

use reachlab_core::blowup::{convergence_table, BlowupOptions};
use reachlab_core::expansion::{
    report_from_samples, sample_grid, Convention, EstimatorConfig, ExpansionReport, FitOptions,
};
use reachlab_core::heat::{self, HeatOptions, HeatSample, Method};
use reachlab_core::mc::Executor;
use reachlab_core::steiner::{self, Source};
use reachlab_core::strata::{self, AngleMc};
use reachlab_core::{Shape, TestFunction};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Command, ExperimentConfig};
use crate::error::CliError;
use crate::grid::{self, Order};
use crate::output::{json_bytes, read_table, Cell, Output, Table};

/// Files to write plus a short human-readable summary for stdout.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub outputs: Vec<Output>,
    pub summary: String,
}

fn finite_or_label(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("nan")
    }
}

fn kind(shape: &Shape) -> &'static str {
    match shape {
        Shape::Ball(_) => "ball",
        Shape::Polytope(_) => "polytope",
        Shape::Rounded(_) => "rounded",
        Shape::Union(_) => "union",
        Shape::Polygon(_) => "polygon",
    }
}

/// Length unit exponent label, e.g. `length^3`.
fn len_pow(k: usize) -> String {
    match k {
        0 => "1".into(),
        1 => "length".into(),
        k => format!("length^{k}"),
    }
}

fn provenance(cfg: &ExperimentConfig) -> Value {
    let mut c = serde_json::to_value(cfg).expect("config serializes");
    if let Some(m) = c.as_object_mut() {
        m.remove("threads");
        m.remove("outputs");
    }
    json!({
        "generator": "reachlab",
        "version": env!("CARGO_PKG_VERSION"),
        "command": cfg.command.as_str(),
        "config_hash": cfg.hash(),
        "config": c,
    })
}

fn csv_out(cfg: &ExperimentConfig, table: &Table) -> Option<Output> {
    cfg.outputs.csv.as_ref().map(|p| Output {
        path: p.clone(),
        bytes: table.render(),
    })
}

fn json_out<T: Serialize>(cfg: &ExperimentConfig, doc: &T) -> Option<Output> {
    cfg.outputs.json.as_ref().map(|p| Output {
        path: p.clone(),
        bytes: json_bytes(doc),
    })
}

/// `fit.csv` next to the main table: `steiner.csv` → `steiner.fit.csv`.
pub fn fit_path(csv: &Path) -> PathBuf {
    let stem = csv.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    csv.with_file_name(format!("{stem}.fit.csv"))
}

pub fn run<E: Executor>(cfg: &ExperimentConfig, exec: &E) -> Result<Outcome, CliError> {
    match cfg.command {
        Command::Validate => validate(cfg),
        Command::Strata => strata_cmd(cfg),
        Command::Steiner => steiner_cmd(cfg, exec),
        Command::Heat => heat_cmd(cfg, exec),
        Command::Expand => expand_cmd(cfg, exec),
        Command::Blowup => blowup_cmd(cfg, exec),
        Command::Report => report_cmd(cfg, exec),
    }
}

fn validate(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let shape = cfg.shape()?;
    let phi = cfg.phi()?;
    phi.check_dim(shape.dim())?;
    for (name, g, order) in [
        ("t", &cfg.t_grid, Order::Increasing),
        ("r", &cfg.r_grid, Order::Increasing),
        ("rho", &cfg.rho_grid, Order::Decreasing),
    ] {
        if let Some(g) = g {
            g.values(name, order)?;
        }
    }
    let reach = shape.reach();
    let doc = json!({
        "provenance": provenance(cfg),
        "shape": {
            "kind": kind(&shape),
            "dim": shape.dim(),
            "convex": shape.is_convex(),
            "volume": shape.volume(),
            "perimeter": shape.perimeter(),
            "diameter": shape.diameter(),
            "inradius": shape.inradius(),
            "reach": finite_or_label(reach),
            "zero_reach": reach == 0.0,
        },
        "phi": phi.to_string(),
    });
    let summary = serde_json::to_string_pretty(&doc["shape"]).expect("json");
    Ok(Outcome {
        outputs: json_out(cfg, &doc).into_iter().collect(),
        summary,
    })
}

fn strata_cmd(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let shape = cfg.shape()?;
    let n = shape.dim();
    let mut angle = AngleMc::default();
    if let Some(s) = cfg.samples {
        angle.samples = s;
    }
    if let Some(s) = cfg.seed {
        angle.seed = s;
    }
    let pieces = strata::strata_with(&shape, &angle)?;
    let mut t = Table::new(
        "strata",
        &cfg.hash(),
        &[
            ("dim", "1"),
            ("measure", "length^dim"),
            ("external_angle", "1"),
            ("external_angle_stderr", "1"),
            ("wedge_angle", "radian"),
            ("reentrant", "1"),
        ],
    );
    t.meta("ambient_dim", n);
    t.meta("reach", crate::output::float(shape.reach()));
    for p in &pieces {
        t.push(vec![
            p.dim.into(),
            p.measure.into(),
            p.external_angle.into(),
            p.external_angle_stderr.into(),
            p.wedge_angle.into(),
            p.reentrant.into(),
        ]);
    }
    Ok(Outcome {
        summary: format!("{} strata pieces", pieces.len()),
        outputs: csv_out(cfg, &t).into_iter().collect(),
    })
}

fn steiner_cmd<E: Executor>(cfg: &ExperimentConfig, exec: &E) -> Result<Outcome, CliError> {
    let shape = cfg.shape()?;
    let n = shape.dim();
    if shape.reach() == 0.0 {
        return Err(CliError::Validation("the Steiner formula needs a set with positive reach".into()));
    }
    let r_grid = match &cfg.r_grid {
        Some(g) => g.values("r", Order::Increasing)?,
        None => steiner::default_r_grid(&shape),
    };
    let samples = cfg.samples.unwrap_or(0);
    let source = match cfg.source.as_deref().unwrap_or("exact") {
        "exact" => Source::Exact,
        "mc" => {
            if samples == 0 {
                return Err(CliError::Validation("the mc source needs samples > 0".into()));
            }
            Source::Mc {
                samples,
                seed: cfg.seed_for_mc()?,
            }
        }
        s => return Err(CliError::Validation(format!("unknown steiner source {s:?}"))),
    };
    let seed = if samples > 0 { Some(cfg.seed_for_mc()?) } else { None };
    let fit = steiner::fit_curvature_measures(&shape, &r_grid, source, exec)?;

    let vol = len_pow(n);
    let mut t = Table::new(
        "steiner",
        &cfg.hash(),
        &[("r", "length"), ("exact", &vol), ("mc", &vol), ("stderr", &vol)],
    );
    t.meta("quantity", "volume of the r-parallel set minus the volume of the set");
    for (i, &r) in r_grid.iter().enumerate() {
        let exact = steiner::parallel_volume_exact(&shape, r)?;
        let (mc, se) = match seed {
            Some(s) => {
                let (m, e) = steiner::parallel_volume_mc(&shape, r, samples, s.wrapping_add(i as u64), exec)?;
                (Some(m), Some(e))
            }
            None => (None, None),
        };
        t.push(vec![r.into(), exact.into(), mc.into(), se.into()]);
    }

    let mut cols: Vec<(String, String)> = vec![("source".into(), "label".into())];
    for k in 0..n {
        cols.push((format!("C{k}"), len_pow(k)));
    }
    for k in 0..n {
        cols.push((format!("C{k}_stderr"), len_pow(k)));
    }
    let cols_ref: Vec<(&str, &str)> = cols.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    let mut ft = Table::new("steiner", &cfg.hash(), &cols_ref);
    ft.meta("condition", crate::output::float(fit.condition));
    let mut row: Vec<Cell> = vec![(if matches!(source, Source::Exact) { "exact" } else { "mc" }).into()];
    row.extend(fit.curvature_measures.iter().map(|c| Cell::Num(*c)));
    row.extend(fit.curvature_stderr.iter().map(|c| Cell::Num(*c)));
    ft.push(row);

    let mut outputs = Vec::new();
    if let Some(p) = &cfg.outputs.csv {
        outputs.push(Output {
            path: p.clone(),
            bytes: t.render(),
        });
        outputs.push(Output {
            path: fit_path(p),
            bytes: ft.render(),
        });
    }
    outputs.extend(json_out(cfg, &json!({ "provenance": provenance(cfg), "fit": fit })));
    let summary = fit
        .curvature_measures
        .iter()
        .enumerate()
        .map(|(k, c)| format!("C{k} = {c:.10}"))
        .collect::<Vec<_>>()
        .join("\n");
    Ok(Outcome { outputs, summary })
}

fn parse_method(s: Option<&str>) -> Result<Option<Method>, CliError> {
    match s {
        None | Some("auto") => Ok(None),
        Some("ball") => Ok(Some(Method::BallQuad)),
        Some(m) => Method::parse(m)
            .map(Some)
            .ok_or_else(|| CliError::Validation(format!("unknown heat method {m:?}"))),
    }
}

fn estimator(cfg: &ExperimentConfig, shape: &Shape, phi: &TestFunction) -> Result<EstimatorConfig, CliError> {
    let method = parse_method(cfg.method.as_deref())?;
    let resolved = method.unwrap_or_else(|| heat::auto_method(shape, phi));
    let seed = if resolved == Method::Mc { cfg.seed_for_mc()? } else { cfg.seed.unwrap_or(0) };
    let mut heat = HeatOptions {
        seed,
        ..HeatOptions::default()
    };
    if let Some(s) = cfg.samples {
        heat.samples = s;
    }
    let alpha = match cfg.alpha.as_deref() {
        None | Some("auto" | "published" | "paper") => None,
        Some(s) => Some(
            s.parse::<f64>()
                .map_err(|_| CliError::Validation(format!("alpha must be auto, published or a number, got {s:?}")))?,
        ),
    };
    let convention = match cfg.convention.as_deref() {
        None => Convention::Graph,
        Some(s) => Convention::parse(s).ok_or_else(|| CliError::Validation(format!("unknown convention {s:?}")))?,
    };
    let mut fit = FitOptions::default();
    if let Some(d) = cfg.degree {
        fit.degree = d;
    }
    if let Some(b) = cfg.nuisance {
        fit.nuisance = b;
    }
    Ok(EstimatorConfig {
        method: Some(resolved),
        heat,
        alpha,
        convention,
        fit,
    })
}

fn t_grid(cfg: &ExperimentConfig, shape: &Shape) -> Result<Vec<f64>, CliError> {
    match &cfg.t_grid {
        Some(g) => g.values("t", Order::Increasing),
        None => Ok(reachlab_core::expansion::default_t_grid(shape)),
    }
}

fn heat_table(cfg: &ExperimentConfig, n: usize, phi: &TestFunction, samples: &[HeatSample]) -> Table {
    let mass = format!("{}·phi", len_pow(n));
    let mut t = Table::new(
        "heat",
        &cfg.hash(),
        &[("t", "length"), ("estimate", &mass), ("stderr", &mass), ("method", "label")],
    );
    t.meta("phi", phi);
    for s in samples {
        t.push(vec![s.t.into(), s.estimate.into(), s.stderr.into(), s.method.as_str().into()]);
    }
    t
}

fn heat_cmd<E: Executor>(cfg: &ExperimentConfig, exec: &E) -> Result<Outcome, CliError> {
    let shape = cfg.shape()?;
    let phi = cfg.phi()?;
    phi.check_dim(shape.dim())?;
    let grid = t_grid(cfg, &shape)?;
    let est = estimator(cfg, &shape, &phi)?;
    let samples = sample_grid(&shape, &phi, &grid, &est, exec)?;
    let table = heat_table(cfg, shape.dim(), &phi, &samples);
    let mut outputs: Vec<Output> = csv_out(cfg, &table).into_iter().collect();
    outputs.extend(json_out(cfg, &json!({ "provenance": provenance(cfg), "samples": samples })));
    Ok(Outcome {
        summary: format!("{} heat samples ({})", samples.len(), est.method.map_or("auto", |m| m.as_str())),
        outputs,
    })
}

fn report_outputs(cfg: &ExperimentConfig, report: &ExpansionReport) -> Vec<Output> {
    let mut outputs = Vec::new();
    outputs.extend(json_out(cfg, &json!({ "provenance": provenance(cfg), "report": report })));
    if let Some(p) = &cfg.outputs.csv {
        let f = &report.fitted.fit;
        let mass = format!("{}·phi", len_pow(report.dim));
        let mut t = Table::new(
            cfg.command.as_str(),
            &cfg.hash(),
            &[
                ("t", "length"),
                ("estimate", &mass),
                ("stderr", &mass),
                ("method", "label"),
                ("fitted", &mass),
                ("residual", &mass),
            ],
        );
        t.meta("phi", &report.phi);
        for s in &report.samples {
            let model: f64 = f.coefficients.iter().enumerate().map(|(i, c)| c * s.t.powi(i as i32 + 1)).sum();
            t.push(vec![
                s.t.into(),
                s.estimate.into(),
                s.stderr.into(),
                s.method.as_str().into(),
                model.into(),
                (s.estimate - model).into(),
            ]);
        }
        outputs.push(Output {
            path: p.clone(),
            bytes: t.render(),
        });
    }
    outputs
}

fn report_summary(r: &ExpansionReport) -> String {
    let mut s = format!(
        "fitted a1 = {:.8} ± {:.2e}, a2 = {:.8} ± {:.2e}\nanalytic a1 = {:.8}, a2 = {:.8}",
        r.fitted.a1,
        r.fitted.a1_stderr,
        r.fitted.a2,
        r.fitted.a2_stderr,
        r.analytic.a1,
        r.analytic.a2()
    );
    for f in &r.flags {
        s.push_str(&format!(
            "\nFLAG {}: {} = {:.8} vs {} = {:.8} ({:.1} sigma)",
            f.quantity,
            f.expected_label,
            f.expected,
            f.observed_label,
            f.observed,
            f.difference.abs() / f.sigma
        ));
    }
    s
}

fn expand_cmd<E: Executor>(cfg: &ExperimentConfig, exec: &E) -> Result<Outcome, CliError> {
    let shape = cfg.shape()?;
    let phi = cfg.phi()?;
    phi.check_dim(shape.dim())?;
    let grid = t_grid(cfg, &shape)?;
    let est = estimator(cfg, &shape, &phi)?;
    let samples = sample_grid(&shape, &phi, &grid, &est, exec)?;
    let report = report_from_samples(&shape, &phi, samples, &est, exec)?;
    Ok(Outcome {
        outputs: report_outputs(cfg, &report),
        summary: report_summary(&report),
    })
}

fn column(header: &[String], name: &str, path: &Path) -> Result<usize, CliError> {
    header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| CliError::Validation(format!("{}: missing column {name}", path.display())))
}

fn report_cmd<E: Executor>(cfg: &ExperimentConfig, exec: &E) -> Result<Outcome, CliError> {
    let shape = cfg.shape()?;
    let phi = cfg.phi()?;
    phi.check_dim(shape.dim())?;
    if cfg.inputs.is_empty() {
        return Err(CliError::Validation("report needs at least one input CSV".into()));
    }
    let mut samples = Vec::new();
    for path in &cfg.inputs {
        let (header, rows) = read_table(path)?;
        let (ct, ce, cs, cm) = (
            column(&header, "t", path)?,
            column(&header, "estimate", path)?,
            column(&header, "stderr", path)?,
            column(&header, "method", path)?,
        );
        for row in rows {
            let num = |i: usize| {
                row[i]
                    .parse::<f64>()
                    .map_err(|_| CliError::Validation(format!("{}: bad number {:?}", path.display(), row[i])))
            };
            let method = parse_method(Some(&row[cm]))?.unwrap_or(Method::Mc);
            samples.push(HeatSample {
                t: num(ct)?,
                estimate: num(ce)?,
                stderr: num(cs)?,
                method,
                phi_id: phi.to_string(),
            });
        }
    }
    samples.sort_by(|a, b| a.t.total_cmp(&b.t));
    let ts: Vec<f64> = samples.iter().map(|s| s.t).collect();
    grid::check(&ts, "t", Order::Increasing)?;
    let est = estimator(cfg, &shape, &phi)?;
    let report = report_from_samples(&shape, &phi, samples, &est, exec)?;
    Ok(Outcome {
        outputs: report_outputs(cfg, &report),
        summary: report_summary(&report),
    })
}

fn blowup_cmd<E: Executor>(cfg: &ExperimentConfig, exec: &E) -> Result<Outcome, CliError> {
    let shape = cfg.shape()?;
    let point = cfg
        .point
        .clone()
        .ok_or_else(|| CliError::Validation("blowup needs a point".into()))?;
    let rho = cfg
        .rho_grid
        .as_ref()
        .ok_or_else(|| CliError::Validation("blowup needs a rho grid".into()))?
        .values("rho", Order::Decreasing)?;
    let mut opts = BlowupOptions {
        seed: cfg.seed_for_mc()?,
        h: cfg.pitch,
        ..BlowupOptions::default()
    };
    if let Some(r) = cfg.window {
        opts.r = r;
    }
    if let Some(s) = cfg.samples {
        opts.samples = s;
    }
    let table = convergence_table(&shape, &point, &rho, &opts, exec)?;
    let n = shape.dim();
    let vol = len_pow(n);
    let mut t = Table::new(
        "blowup",
        &cfg.hash(),
        &[
            ("rho", "length"),
            ("hausdorff", "length"),
            ("hausdorff_error", "length"),
            ("symdiff", &vol),
            ("symdiff_stderr", &vol),
        ],
    );
    t.meta("window", crate::output::float(table.r));
    t.meta("reach", crate::output::float(table.reach));
    t.meta("zero_reach", table.zero_reach);
    t.meta("cone_pieces", table.cone.len());
    for i in 0..rho.len() {
        t.push(vec![
            rho[i].into(),
            table.hausdorff[i].into(),
            table.hausdorff_error.into(),
            table.symdiff[i].into(),
            table.symdiff_stderr[i].into(),
        ]);
    }
    let mut outputs: Vec<Output> = csv_out(cfg, &t).into_iter().collect();
    outputs.extend(json_out(cfg, &json!({ "provenance": provenance(cfg), "table": table })));
    Ok(Outcome {
        summary: format!("{} blow-up rows, zero_reach = {}", rho.len(), table.zero_reach),
        outputs,
    })
}
