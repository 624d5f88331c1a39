//! Command-line front end: analyze equations for linearizability, push them
//! through point transformations, inspect jets and stabilizers, and run the
//! seeded verification suites.
//!
//! Exit codes: `analyze` returns 0 when the equation is provably
//! linearizable, 1 when provably not, 2 when only numerically linearizable;
//! every other command returns 0 on success; any error exits with 3.

use clap::{Args, Parser, Subcommand, ValueEnum};
use jetlin::error::Error;
use jetlin::isotropy::{
    full_grade_space, isotropy_algebra, isotropy_space, prolong, spencer_complex, symbol_g,
    SubspaceBasis,
};
use jetlin::jetspace::{rhs_to_section, Section};
use jetlin::obstruction::{linearizable_with, LinearizabilityReport, LinearizabilityVerdict};
use jetlin::pointmap::{
    pushforward_coeffs_source, pushforward_equation, solution_curve_oracle, CurveOracle,
    PointTransform,
};
use jetlin::selftest::{self, Level};
use jetlin::symexpr::{self, Verdict, ZeroConfig};
use jetlin::{fieldlift, Rat};
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::HashMap;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "jetlin",
    version,
    about = "Linearizability of second-order ODEs cubic in y' under point transformations"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute the invariants F1, F2 and decide linearizability
    Analyze(AnalyzeArgs),
    /// Push an equation through a point transformation
    Transform(TransformArgs),
    /// Jet of the coefficient section at a rational point
    Jet(JetArgs),
    /// Lift a plane vector field to the equation jet at a point
    Lift(LiftArgs),
    /// Stabilizer dimensions and bases at a jet, plus the symbol data
    Isotropy(IsotropyArgs),
    /// Run the seeded verification suite
    Selftest(SelftestArgs),
    /// Analyze equations from a JSON-lines file (one equation per line)
    Batch(BatchArgs),
}

#[derive(Args, Clone)]
struct EquationArgs {
    /// Right-hand side of y'' = f(x, y, p) with p = y', polynomial in p of
    /// degree at most 3
    #[arg(long, conflicts_with = "coeffs")]
    rhs: Option<String>,
    /// JSON file {"u": ["u0", "u1", "u2", "u3"]} with expressions in x, y
    #[arg(long, value_name = "FILE")]
    coeffs: Option<PathBuf>,
}

#[derive(Args, Clone, Copy)]
struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Clone)]
struct SamplingArgs {
    /// Numeric zero-test sample count
    #[arg(long, default_value_t = 50)]
    samples: usize,
    /// Numeric zero-test threshold
    #[arg(long, default_value_t = 1e-9)]
    epsilon: f64,
    /// Seed for all randomized parts
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    equation: EquationArgs,
    #[command(flatten)]
    sampling: SamplingArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Write the report here instead of stdout
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TransformArgs {
    #[command(flatten)]
    equation: EquationArgs,
    /// First component of the transformation, an expression in x, y
    #[arg(long)]
    f1: String,
    /// Second component of the transformation, an expression in x, y
    #[arg(long)]
    f2: String,
    /// Start point x,y of the residual check (rational components)
    #[arg(long, default_value = "0,0")]
    point: String,
    #[command(flatten)]
    output: OutputArgs,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct JetArgs {
    #[command(flatten)]
    equation: EquationArgs,
    /// Base point x,y with rational components, e.g. "1/2,-3"
    #[arg(long, default_value = "0,0")]
    point: String,
    /// Jet order
    #[arg(long, default_value_t = 2)]
    order: usize,
    #[command(flatten)]
    output: OutputArgs,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LiftArgs {
    #[command(flatten)]
    equation: EquationArgs,
    /// First component of the vector field, an expression in x, y
    #[arg(long)]
    f1: String,
    /// Second component of the vector field, an expression in x, y
    #[arg(long)]
    f2: String,
    /// Base point x,y with rational components
    #[arg(long, default_value = "0,0")]
    point: String,
    /// Order of the equation jet the lift is evaluated at
    #[arg(long, default_value_t = 1)]
    order: usize,
    #[command(flatten)]
    output: OutputArgs,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct IsotropyArgs {
    #[command(flatten)]
    equation: EquationArgs,
    /// Base point x,y with rational components
    #[arg(long, default_value = "0,0")]
    point: String,
    /// Jet order k: reports the point-fixing stabilizer of the k-jet and the
    /// isotropy space of the (k+1)-jet
    #[arg(long, default_value_t = 0)]
    order: usize,
    #[command(flatten)]
    output: OutputArgs,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SelftestArgs {
    /// Seed shared by all sampled checks
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// quick runs a prefix of full under the same seed
    #[arg(long, value_enum, default_value_t = LevelArg::Quick)]
    level: LevelArg,
    #[command(flatten)]
    output: OutputArgs,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

#[derive(Args)]
struct BatchArgs {
    /// JSON-lines input, one {"rhs": "..."} or {"u": [...]} per line;
    /// "-" reads stdin
    input: String,
    #[command(flatten)]
    sampling: SamplingArgs,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

/// Everything a run depended on, echoed into the report so the run can be
/// reproduced from the report alone.
#[derive(Serialize)]
struct JobConfig {
    command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    rhs: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coeffs: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    f1: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    f2: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    point: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    level: Option<&'static str>,
}

impl JobConfig {
    fn new(command: &'static str) -> JobConfig {
        JobConfig {
            command,
            rhs: None,
            coeffs: None,
            f1: None,
            f2: None,
            point: None,
            order: None,
            samples: None,
            epsilon: None,
            seed: None,
            level: None,
        }
    }

    fn equation(mut self, eq: &EquationArgs) -> JobConfig {
        self.rhs = eq.rhs.clone();
        self.coeffs = eq.coeffs.as_ref().map(|p| p.display().to_string());
        self
    }

    fn sampling(mut self, s: &SamplingArgs) -> JobConfig {
        self.samples = Some(s.samples);
        self.epsilon = Some(s.epsilon);
        self.seed = Some(s.seed);
        self
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version are not errors; real usage errors exit above
            // the verdict range
            let benign = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            e.print().expect("writing diagnostics");
            return if benign { ExitCode::SUCCESS } else { ExitCode::from(3) };
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

fn dispatch(cli: Cli) -> Result<u8, Box<dyn std::error::Error>> {
    match cli.command {
        Cmd::Analyze(a) => cmd_analyze(a),
        Cmd::Transform(a) => cmd_transform(a),
        Cmd::Jet(a) => cmd_jet(a),
        Cmd::Lift(a) => cmd_lift(a),
        Cmd::Isotropy(a) => cmd_isotropy(a),
        Cmd::Selftest(a) => cmd_selftest(a),
        Cmd::Batch(a) => cmd_batch(a),
    }
}

fn load_section(eq: &EquationArgs) -> Result<Section, Box<dyn std::error::Error>> {
    if let Some(rhs) = &eq.rhs {
        return Ok(rhs_to_section(rhs)?);
    }
    if let Some(path) = &eq.coeffs {
        let text = std::fs::read_to_string(path)?;
        return Ok(section_from_json(&serde_json::from_str(&text)?)?);
    }
    Err("give an equation with --rhs or --coeffs".into())
}

fn section_from_json(v: &Value) -> Result<Section, Error> {
    let arr = v
        .get("u")
        .and_then(Value::as_array)
        .filter(|a| a.len() == 4)
        .ok_or_else(|| Error::Invalid("expected {\"u\": [four expressions]}".into()))?;
    let renames: HashMap<String, String> =
        [("x".to_string(), "x1".to_string()), ("y".to_string(), "x2".to_string())]
            .into_iter()
            .collect();
    let mut u = Vec::with_capacity(4);
    for entry in arr {
        let text = entry
            .as_str()
            .ok_or_else(|| Error::Invalid("coefficient entries must be strings".into()))?;
        u.push(symexpr::parse(text, &["x", "y", "x1", "x2"])?.rename(&renames));
    }
    Section::new([u.remove(0), u.remove(0), u.remove(0), u.remove(0)])
}

fn parse_point(s: &str) -> Result<[Rat; 2], Box<dyn std::error::Error>> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("point {s:?} is not of the form x,y").into());
    }
    let comp = |t: &str| -> Result<Rat, Box<dyn std::error::Error>> {
        Rat::from_str(t.trim()).map_err(|e| format!("bad rational {t:?}: {e}").into())
    };
    Ok([comp(parts[0])?, comp(parts[1])?])
}

fn write_output(out: &Option<PathBuf>, content: &str) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, format!("{content}\n")),
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

fn verdict_name(v: &LinearizabilityVerdict) -> &'static str {
    match v {
        LinearizabilityVerdict::Linearizable => "Linearizable",
        LinearizabilityVerdict::NumericallyLinearizable => "NumericallyLinearizable",
        LinearizabilityVerdict::NotLinearizable => "NotLinearizable",
    }
}

fn zero_verdict_repr(v: &Verdict) -> Value {
    match v {
        Verdict::ProvenZero => json!({"kind": "proven-zero"}),
        Verdict::ProvenNonZero => json!({"kind": "proven-nonzero"}),
        Verdict::NumericallyZero { samples, epsilon, max_abs } => json!({
            "kind": "numerically-zero",
            "samples": samples,
            "epsilon": epsilon,
            "max_abs": max_abs,
        }),
    }
}

fn analysis_json(report: &LinearizabilityReport, cfg: &ZeroConfig) -> Value {
    let method = if matches!(report.verdicts[0], Verdict::ProvenZero | Verdict::ProvenNonZero)
        && matches!(report.verdicts[1], Verdict::ProvenZero | Verdict::ProvenNonZero)
    {
        "exact"
    } else {
        "sampling"
    };
    let witness = report.witness.as_ref().map(|w| {
        json!({
            "point": [w.point[0].to_string(), w.point[1].to_string()],
            "component": w.component,
            "value": w.value.to_string(),
        })
    });
    json!({
        "F1": report.f.0.to_string(),
        "F2": report.f.1.to_string(),
        "verdict": verdict_name(&report.verdict),
        "verdicts": [zero_verdict_repr(&report.verdicts[0]), zero_verdict_repr(&report.verdicts[1])],
        "witness": witness,
        "method": method,
        "samples": cfg.samples,
        "epsilon": cfg.epsilon,
    })
}

fn analysis_text(report: &LinearizabilityReport) -> String {
    let mut lines = vec![
        format!("F1 = {}", report.f.0),
        format!("F2 = {}", report.f.1),
        format!("verdict: {}", verdict_name(&report.verdict)),
    ];
    if let Some(w) = &report.witness {
        lines.push(format!(
            "witness: F{} = {} at ({}, {})",
            w.component, w.value, w.point[0], w.point[1]
        ));
    }
    lines.join("\n")
}

fn cmd_analyze(a: AnalyzeArgs) -> Result<u8, Box<dyn std::error::Error>> {
    let s = load_section(&a.equation)?;
    let cfg = ZeroConfig {
        samples: a.sampling.samples,
        epsilon: a.sampling.epsilon,
        seed: a.sampling.seed,
        ..ZeroConfig::default()
    };
    let report = linearizable_with(&s, &cfg)?;
    let content = match a.output.format {
        Format::Json => {
            let mut v = analysis_json(&report, &cfg);
            v["config"] =
                serde_json::to_value(JobConfig::new("analyze").equation(&a.equation).sampling(&a.sampling))?;
            serde_json::to_string_pretty(&v)?
        }
        Format::Text => analysis_text(&report),
    };
    write_output(&a.out, &content)?;
    Ok(match report.verdict {
        LinearizabilityVerdict::Linearizable => 0,
        LinearizabilityVerdict::NotLinearizable => 1,
        LinearizabilityVerdict::NumericallyLinearizable => 2,
    })
}

fn cmd_transform(a: TransformArgs) -> Result<u8, Box<dyn std::error::Error>> {
    let s = load_section(&a.equation)?;
    let f = PointTransform::parse(&a.f1, &a.f2)?;
    let p = parse_point(&a.point)?;
    let start = [
        p[0].to_f64().ok_or("point out of float range")?,
        p[1].to_f64().ok_or("point out of float range")?,
        1.0,
    ];
    // target-coordinate form needs a symbolic inverse; otherwise report the
    // transformed coefficients composed with f, i.e. in source coordinates
    let (coordinates, u, inverse) = match pushforward_equation(&f, &s) {
        Ok((t, g)) => ("target", t.u, Some((g.f[0].to_string(), g.f[1].to_string()))),
        Err(Error::InverseUnavailable) => ("source", pushforward_coeffs_source(&f, &s)?, None),
        Err(e) => return Err(e.into()),
    };
    let residual = solution_curve_oracle(&f, &s, start, &CurveOracle::default());
    let content = match a.output.format {
        Format::Json => {
            let res = match &residual {
                Ok(r) => json!({"max": r.max_residual, "probes": r.probes}),
                Err(e) => json!({"error": e.to_string()}),
            };
            let mut cfgj = JobConfig::new("transform").equation(&a.equation);
            cfgj.f1 = Some(a.f1.clone());
            cfgj.f2 = Some(a.f2.clone());
            cfgj.point = Some(a.point.clone());
            serde_json::to_string_pretty(&json!({
                "coordinates": coordinates,
                "u": [u[0].to_string(), u[1].to_string(), u[2].to_string(), u[3].to_string()],
                "inverse": inverse.map(|(g1, g2)| json!({"f1": g1, "f2": g2})),
                "residual": res,
                "config": serde_json::to_value(cfgj)?,
            }))?
        }
        Format::Text => {
            let mut lines = vec![format!("coordinates: {coordinates}")];
            for (i, e) in u.iter().enumerate() {
                lines.push(format!("u{i} = {e}"));
            }
            match &residual {
                Ok(r) => lines.push(format!("solution-curve residual: {:.3e}", r.max_residual)),
                Err(e) => lines.push(format!("solution-curve residual unavailable: {e}")),
            }
            lines.join("\n")
        }
    };
    write_output(&a.out, &content)?;
    Ok(0)
}

fn cmd_jet(a: JetArgs) -> Result<u8, Box<dyn std::error::Error>> {
    let s = load_section(&a.equation)?;
    let p = parse_point(&a.point)?;
    let jet = s.jet_at(&p, a.order)?;
    let content = match a.output.format {
        Format::Json => {
            let mut cfgj = JobConfig::new("jet").equation(&a.equation);
            cfgj.point = Some(a.point.clone());
            cfgj.order = Some(a.order);
            serde_json::to_string_pretty(&json!({
                "jet": jet.to_json_value(),
                "config": serde_json::to_value(cfgj)?,
            }))?
        }
        Format::Text => jet.to_json_string(),
    };
    write_output(&a.out, &content)?;
    Ok(0)
}

fn cmd_lift(a: LiftArgs) -> Result<u8, Box<dyn std::error::Error>> {
    let s = load_section(&a.equation)?;
    let p = parse_point(&a.point)?;
    // reuse the transform parser for the two field components
    let field = PointTransform::parse(&a.f1, &a.f2)?.f;
    let theta = s.jet_at(&p, a.order)?;
    let xj = fieldlift::VectorFieldJet::of_field(&field, &p, a.order + 2)?;
    let lifted = fieldlift::lift_field(&xj, &theta)?;
    let content = match a.output.format {
        Format::Json => {
            let mut cfgj = JobConfig::new("lift").equation(&a.equation);
            cfgj.f1 = Some(a.f1.clone());
            cfgj.f2 = Some(a.f2.clone());
            cfgj.point = Some(a.point.clone());
            cfgj.order = Some(a.order);
            serde_json::to_string_pretty(&json!({
                "dx": [lifted.dx[0].to_string(), lifted.dx[1].to_string()],
                "du": lifted.du.to_json_value(),
                "config": serde_json::to_value(cfgj)?,
            }))?
        }
        Format::Text => {
            format!(
                "dx = ({}, {})\ndu = {}",
                lifted.dx[0],
                lifted.dx[1],
                lifted.du.to_json_string()
            )
        }
    };
    write_output(&a.out, &content)?;
    Ok(0)
}

fn basis_json(space: &SubspaceBasis) -> Value {
    json!({
        "dim": space.dim(),
        "unknowns": space.unknowns,
        "vectors": space
            .basis
            .iter()
            .map(|v| v.iter().map(|x| x.to_string()).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    })
}

fn cmd_isotropy(a: IsotropyArgs) -> Result<u8, Box<dyn std::error::Error>> {
    let s = load_section(&a.equation)?;
    let p = parse_point(&a.point)?;
    let theta_k = s.jet_at(&p, a.order)?;
    let algebra = isotropy_algebra(&theta_k)?;
    let theta_up = s.jet_at(&p, a.order + 1)?;
    let space = isotropy_space(&theta_up)?;
    let g = symbol_g();
    let g1 = prolong(&g)?;
    let spencer = spencer_complex(&g1, &g, &full_grade_space(1))?;
    let content = match a.output.format {
        Format::Json => {
            let mut cfgj = JobConfig::new("isotropy").equation(&a.equation);
            cfgj.point = Some(a.point.clone());
            cfgj.order = Some(a.order);
            serde_json::to_string_pretty(&json!({
                "dims": {
                    "stabilizer_algebra": algebra.dim(),
                    "isotropy_space": space.dim(),
                    "symbol": g.dim(),
                    "prolongation": g1.dim(),
                    "spencer_middle_homology": spencer.homology_middle,
                },
                "stabilizer_algebra": basis_json(&algebra),
                "isotropy_space": basis_json(&space),
                "symbol": basis_json(&g),
                "spencer": {
                    "dims": spencer.dims,
                    "rank1": spencer.rank1,
                    "rank2": spencer.rank2,
                    "injective2": spencer.injective2,
                    "homology_middle": spencer.homology_middle,
                    "composes_to_zero": spencer.composes_to_zero,
                },
                "config": serde_json::to_value(cfgj)?,
            }))?
        }
        Format::Text => {
            format!(
                "stabilizer algebra of the {}-jet: dim {}\nisotropy space of the {}-jet: dim {}\n\
                 symbol: dim {}\nprolongation: dim {}\nmiddle homology: {}",
                a.order,
                algebra.dim(),
                a.order + 1,
                space.dim(),
                g.dim(),
                g1.dim(),
                spencer.homology_middle
            )
        }
    };
    write_output(&a.out, &content)?;
    Ok(0)
}

fn cmd_selftest(a: SelftestArgs) -> Result<u8, Box<dyn std::error::Error>> {
    let level = match a.level {
        LevelArg::Quick => Level::Quick,
        LevelArg::Full => Level::Full,
    };
    let report = selftest::run(a.seed, level);
    let content = match a.output.format {
        Format::Json => {
            let results: Vec<Value> = report
                .results
                .iter()
                .map(|r| {
                    json!({
                        "id": r.id,
                        "name": r.name,
                        "passed": r.passed,
                        "details": r.details,
                    })
                })
                .collect();
            serde_json::to_string_pretty(&json!({
                "seed": a.seed,
                "level": match a.level { LevelArg::Quick => "quick", LevelArg::Full => "full" },
                "passed": report.passed,
                "results": results,
            }))?
        }
        Format::Text => {
            let mut lines: Vec<String> = report.results.iter().map(|r| r.line()).collect();
            lines.push(if report.passed {
                format!("all {} checks passed", report.results.len())
            } else {
                let failed = report.results.iter().filter(|r| !r.passed).count();
                format!("{failed} of {} checks failed", report.results.len())
            });
            lines.join("\n")
        }
    };
    write_output(&a.out, &content)?;
    Ok(if report.passed { 0 } else { 1 })
}

fn cmd_batch(a: BatchArgs) -> Result<u8, Box<dyn std::error::Error>> {
    let text = if a.input == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        buf
    } else {
        std::fs::read_to_string(&a.input)?
    };
    let cfg = ZeroConfig {
        samples: a.sampling.samples,
        epsilon: a.sampling.epsilon,
        seed: a.sampling.seed,
        ..ZeroConfig::default()
    };
    let mut lines_out = Vec::new();
    for (index, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let entry = match analyze_batch_line(line, &cfg) {
            Ok(mut v) => {
                v["index"] = json!(index);
                v
            }
            Err(e) => json!({"index": index, "error": e.to_string()}),
        };
        lines_out.push(entry.to_string());
    }
    write_output(&a.out, &lines_out.join("\n"))?;
    Ok(0)
}

fn analyze_batch_line(line: &str, cfg: &ZeroConfig) -> Result<Value, Box<dyn std::error::Error>> {
    let v: Value = serde_json::from_str(line)?;
    let s = if let Some(rhs) = v.get("rhs").and_then(Value::as_str) {
        rhs_to_section(rhs)?
    } else {
        section_from_json(&v)?
    };
    let report = linearizable_with(&s, cfg)?;
    Ok(analysis_json(&report, cfg))
}
