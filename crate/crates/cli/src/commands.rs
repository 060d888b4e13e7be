//! One function per subcommand.
//!
//! Each returns the text the command prints (report TOML, SVG, CSV, or a
//! mismatch list), so tests can drive the commands in-process; `main` only
//! decides between stdout and `--out`/`--csv` files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use consensus_cake::{
    consensus_check, count_agent_pieces, divide, generate_instance, piece_bound, residuals,
    validate_division, CakeClass, DivisionReport, Entitlement, InstanceSpec, PointOnCake,
    SolverConfig,
};

use crate::format::{parse_cake_file, parse_report_file, LoadedInstance, ReportFile};
use crate::render::render_svg;
use crate::CliError;

/// Solver grid schedule; `CONSENSUS_CAKE_NMAX` caps the refinement.
pub fn solver_config() -> Result<SolverConfig, CliError> {
    let mut config = SolverConfig::default();
    if let Ok(raw) = std::env::var("CONSENSUS_CAKE_NMAX") {
        let n: usize = raw
            .trim()
            .parse()
            .map_err(|_| CliError::input(format!("CONSENSUS_CAKE_NMAX={raw:?} is not a number")))?;
        config.grid_max = n.max(2);
        config.grid_start = config.grid_start.min(config.grid_max);
    }
    Ok(config)
}

pub fn load_cake(path: &Path) -> Result<LoadedInstance, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    parse_cake_file(&text)?.load()
}

fn load_report(path: &Path) -> Result<ReportFile, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    parse_report_file(&text)
}

/// Divides the cake in `cake_path` and returns the report as TOML,
/// additionally written to `out` when given.
pub fn cmd_divide(
    cake_path: &Path,
    t_override: Option<f64>,
    tol: f64,
    out: Option<&Path>,
) -> Result<String, CliError> {
    let mut inst = load_cake(cake_path)?;
    if let Some(t) = t_override {
        inst.t = Entitlement::new(t)?;
    }
    let report = run_divide(&inst, tol)?;
    let text = ReportFile::from_report(&inst.cake, &report).to_toml()?;
    if let Some(path) = out {
        fs::write(path, &text)?;
    }
    Ok(text)
}

fn run_divide(inst: &LoadedInstance, tol: f64) -> Result<DivisionReport, CliError> {
    Ok(divide(
        &inst.cake,
        &inst.va,
        &inst.vb,
        inst.t,
        tol,
        solver_config()?,
    )?)
}

/// Re-derives everything checkable about a report from the cake file alone
/// and returns the mismatches; an empty list is a pass.
///
/// The division itself is taken from the report (that is what is being
/// verified); residuals, piece counts, class, metrics, and the bound are
/// all recomputed from scratch.
pub fn cmd_verify(cake_path: &Path, report_path: &Path) -> Result<Vec<String>, CliError> {
    let inst = load_cake(cake_path)?;
    let report = load_report(report_path)?;
    let division = report.division(&inst.cake)?;
    let t = Entitlement::new(report.t)?;
    report.case()?;

    let mut bad = Vec::new();
    if let Err(e) = validate_division(&inst.cake, &division) {
        bad.push(format!("division is not valid on this cake: {e}"));
        return Ok(bad);
    }

    let class = inst.cake.classify();
    if class.as_str() != report.class {
        bad.push(format!(
            "class: report says {:?}, cake is {:?}",
            report.class,
            class.as_str()
        ));
    }
    let metrics = inst.cake.metrics();
    if metrics.components != report.metrics.components
        || metrics.radius != report.metrics.radius
        || metrics.tree_height != report.metrics.tree_height
        || metrics.star_arms != report.metrics.star_arms
    {
        bad.push(format!(
            "metrics: report says {:?}, cake has components={} radius={} tree_height={:?} star_arms={:?}",
            report.metrics, metrics.components, metrics.radius, metrics.tree_height, metrics.star_arms
        ));
    }
    let bound = piece_bound(class, &metrics);
    if bound != report.bound {
        bad.push(format!("bound: report says {}, class gives {bound}", report.bound));
    }

    let (ra, rb) = residuals(&inst.cake, &inst.va, &inst.vb, &division, t)?;
    if !consensus_check(&inst.cake, &inst.va, &inst.vb, &division, t, report.tol)? {
        bad.push(format!(
            "consensus: residual a = {ra:e}, b = {rb:e}; tolerance {:e}",
            report.tol
        ));
    }
    // The recorded residuals must describe this division, not merely some
    // division under tolerance.
    if (ra - report.residuals.a).abs() > report.tol || (rb - report.residuals.b).abs() > report.tol {
        bad.push(format!(
            "residuals: report says a = {:e}, b = {:e}; recomputed a = {ra:e}, b = {rb:e}",
            report.residuals.a, report.residuals.b
        ));
    }

    let (pa, pb) = count_agent_pieces(&inst.cake, &division)?;
    if (pa, pb) != (report.pieces.a, report.pieces.b) {
        bad.push(format!(
            "pieces: report says a = {}, b = {}; recounted a = {pa}, b = {pb}",
            report.pieces.a, report.pieces.b
        ));
    }
    let bound_ok = if class == CakeClass::GeneralGraph {
        pa + pb <= bound
    } else {
        pa <= bound && pb <= bound
    };
    if !bound_ok {
        bad.push(format!("bound violated: pieces ({pa}, {pb}) exceed {bound}"));
    }
    Ok(bad)
}

/// Renders the division in `report_path` onto the cake and writes the SVG
/// to `out`; the SVG text is also returned.
pub fn cmd_render(cake_path: &Path, report_path: &Path, out: &Path) -> Result<String, CliError> {
    let inst = load_cake(cake_path)?;
    let report = load_report(report_path)?;
    let division = report.division(&inst.cake)?;
    validate_division(&inst.cake, &division)?;
    let cuts: Vec<PointOnCake> = report
        .cuts
        .iter()
        .map(|c| {
            let edge = inst.cake.edge_id(&c.edge).ok_or_else(|| {
                CliError::input(format!("report cut names unknown edge {:?}", c.edge))
            })?;
            Ok(PointOnCake {
                edge,
                offset: c.offset,
            })
        })
        .collect::<Result<_, CliError>>()?;
    let svg = render_svg(&inst.cake, &division, &cuts);
    fs::write(out, &svg)?;
    Ok(svg)
}

#[derive(Serialize)]
struct MetricsOut {
    class: &'static str,
    bound: usize,
    components: usize,
    radius: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    tree_height: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    star_arms: Option<usize>,
    total_length: f64,
}

/// Classifies the cake and prints its metrics and piece-count bound as TOML.
pub fn cmd_metrics(cake_path: &Path) -> Result<String, CliError> {
    let inst = load_cake(cake_path)?;
    let class = inst.cake.classify();
    let metrics = inst.cake.metrics();
    let out = MetricsOut {
        class: class.as_str(),
        bound: piece_bound(class, &metrics),
        components: metrics.components,
        radius: metrics.radius,
        tree_height: metrics.tree_height,
        star_arms: metrics.star_arms,
        total_length: inst.cake.total_length(),
    };
    toml::to_string(&out).map_err(|e| CliError::input(e.to_string()))
}

pub const BATCH_HEADER: &str =
    "seed,class,h,r,s,pieces_a,pieces_b,bound,theorem_case,residual_a,residual_b,status";

/// Divides `count` generated instances of one class and returns a CSV with
/// one row per instance. A row that fails records its status and the run
/// continues.
pub fn cmd_batch(class: &str, count: u64, seed: u64, tol: f64) -> Result<String, CliError> {
    let class = CakeClass::from_name(class)
        .ok_or_else(|| CliError::input(format!("unknown cake class {class:?}")))?;
    let config = solver_config()?;
    let mut csv = String::from(BATCH_HEADER);
    csv.push('\n');
    for i in 0..count {
        let child = seed.wrapping_add(i);
        let spec = InstanceSpec {
            max_segments: 5,
            ..InstanceSpec::new(class, child)
        };
        let row = batch_row(&spec, tol, config);
        let _ = writeln!(csv, "{child},{},{row}", class.as_str());
    }
    Ok(csv)
}

fn batch_row(spec: &InstanceSpec, tol: f64, config: SolverConfig) -> String {
    let attempt = generate_instance(spec).map_err(CliError::from).and_then(|inst| {
        Ok(divide(&inst.cake, &inst.va, &inst.vb, inst.t, tol, config)?)
    });
    match attempt {
        Ok(r) => format!(
            "{},{},{},{},{},{},{},{:e},{:e},ok",
            r.metrics.tree_height.map(|h| h.to_string()).unwrap_or_default(),
            r.metrics.radius,
            r.metrics.components,
            r.pieces_a,
            r.pieces_b,
            r.bound,
            r.theorem_case.as_str(),
            r.residual_a,
            r.residual_b,
        ),
        Err(CliError::Exhausted(_)) => ",,,,,,,,,resolution-exhausted".to_string(),
        Err(e) => format!(",,,,,,,,,error: {}", e.to_string().replace([',', '\n'], ";")),
    }
}
