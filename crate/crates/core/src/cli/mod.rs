//! Command-line front end.
//!
//! Exit codes: 0 success, 1 I/O, parse or configuration error, 2 invalid
//! curve, 3 degenerate offsets exhausted, 4 infeasible or unrealizable,
//! 5 wrong number of marks or non-rigid constraints.

pub mod format;
pub mod plot;
pub mod report;
pub mod selftest;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::Value;

use crate::curve::{validate, MarkedPoint, TropicalCurve};
use crate::exactmath::fmt_rational;
use crate::moduli::{count_curves, deformation_ranks, dual_flag_space, CountError};
use crate::prelog::{
    assemble_system, solve_monomial, verify_assignment, FlagAssignment, KernelGenerator, RowLabel, Solution,
    VerifyReport,
};
use crate::realize::{fmt_offset, realizability, sigma_cocycle, sigma_geometric_auto, RealizabilityReport};
use crate::valuegroup::{EqualityMode, ModeKind, Verdict, DEFAULT_TOLERANCE};

use report::Report;

pub const DEFAULT_SEED: u64 = 20_240_917;

const FORMAL_CAVEAT: &str = "formal mode treats the four multipliers as independent symbols; \
     if the intended values satisfy a multiplicative relation, this negative answer may not apply to them";

#[derive(Debug, Parser)]
#[command(name = "tropabel", version, about = "Realizability and counting of tropical curves in real 2-tori")]
pub struct Cli {
    /// Emit the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Equality mode; defaults to the kind of the file's multipliers.
    #[arg(long, global = true, value_enum, env = "TROPABEL_MODE")]
    pub mode: Option<ModeKind>,
    /// Tolerance for numeric mode.
    #[arg(long, global = true, default_value_t = DEFAULT_TOLERANCE)]
    pub tol: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the curve axioms and list violations.
    Validate { file: PathBuf },
    /// Genus, δ, vertex weights, parity, deformation ranks.
    Analyze { file: PathBuf },
    /// Compute σ and decide realizability.
    Realizable { file: PathBuf },
    /// Count curves through the file's marked points.
    Count { file: PathBuf },
    /// Solve the gluing system, or check a given assignment.
    Prelog {
        file: PathBuf,
        /// Assignment file to verify instead of solving.
        #[arg(long)]
        check: Option<PathBuf>,
    },
    /// Draw the curve in the fundamental parallelogram as SVG.
    Plot {
        file: PathBuf,
        /// Output path; empty writes to stdout.
        #[arg(long, default_value = "")]
        out: String,
    },
    /// Run the property suites on generated curves.
    Selftest {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        cases: usize,
    },
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
    report: Option<Report>,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure { code, message: message.into(), report: None }
    }
}

/// What a command prints and its exit status.
enum Output {
    Report(Report, i32),
    Raw(String),
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if e.use_stderr() { write!(err, "{}", e.render()) } else { write!(out, "{}", e.render()) };
            return code;
        }
    };
    run_cli(&cli, out, err)
}

pub fn run_cli(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Validate { file } => cmd_validate(file),
        Command::Analyze { file } => cmd_analyze(file),
        Command::Realizable { file } => cmd_realizable(cli, file),
        Command::Count { file } => cmd_count(cli, file),
        Command::Prelog { file, check } => cmd_prelog(cli, file, check.as_deref()),
        Command::Plot { file, out } => cmd_plot(file, out),
        Command::Selftest { seed, cases } => cmd_selftest(*seed, *cases),
    };
    match result {
        Ok(Output::Report(r, code)) => {
            let _ = out.write_all(r.render(cli.json).as_bytes());
            code
        }
        Ok(Output::Raw(s)) => {
            let _ = out.write_all(s.as_bytes());
            0
        }
        Err(f) => {
            if let Some(r) = f.report {
                let _ = out.write_all(r.render(cli.json).as_bytes());
            }
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

/// Entry point of the binary.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

fn load(path: &Path) -> Result<(TropicalCurve, Vec<MarkedPoint>), Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::new(1, format!("{}: {e}", path.display())))?;
    format::parse_curve(&text).map_err(|e| Failure::new(1, format!("{}: {e}", path.display())))
}

/// Loads and validates; an invalid curve is exit 2.
fn load_valid(path: &Path) -> Result<(TropicalCurve, Vec<MarkedPoint>), Failure> {
    let (curve, marks) = load(path)?;
    let violations = validate(&curve);
    if !violations.is_empty() {
        let list: Vec<String> = violations.iter().map(ToString::to_string).collect();
        return Err(Failure::new(2, format!("invalid curve: {}", list.join("; "))));
    }
    Ok((curve, marks))
}

fn mode(cli: &Cli, curve: &TropicalCurve) -> Result<EqualityMode, Failure> {
    curve.lattice.equality_mode(cli.mode, cli.tol).map_err(|e| Failure::new(1, e.to_string()))
}

fn add_warnings(r: &mut Report, curve: &TropicalCurve) {
    for w in curve.warnings() {
        r.warn(w);
    }
}

fn cmd_validate(path: &Path) -> Result<Output, Failure> {
    let (curve, marks) = load(path)?;
    let violations: Vec<String> = validate(&curve).iter().map(ToString::to_string).collect();
    let mut r = Report::new("validate");
    r.field("valid", violations.is_empty());
    r.field_text("violations", &violations, if violations.is_empty() { "none".into() } else { violations.join("; ") });
    r.field("vertices", curve.vertices.len()).field("edges", curve.edges.len()).field("marked_points", marks.len());
    add_warnings(&mut r, &curve);
    Ok(Output::Report(r, if violations.is_empty() { 0 } else { 2 }))
}

fn cmd_analyze(path: &Path) -> Result<Output, Failure> {
    let (curve, marks) = load_valid(path)?;
    let mut r = Report::new("analyze");
    r.invariants(&curve);
    r.field("vertices", curve.vertices.len()).field("edges", curve.edges.len());
    r.field("two_valent_vertices", curve.two_valent_count());
    r.field("multipliers", curve.lattice.kind().to_string());
    let ranks = deformation_ranks(&curve);
    r.field("rank_f", ranks.rank_f);
    r.field("rank_kernel", ranks.rank_kernel).field("rank_cokernel", ranks.rank_cokernel);
    r.field("dual_dimension", dual_flag_space(&curve).dimension);
    r.field("marked_points", marks.len());
    add_warnings(&mut r, &curve);
    Ok(Output::Report(r, 0))
}

fn realizability_fields(r: &mut Report, rep: &RealizabilityReport) {
    r.field("mode", &rep.mode);
    r.value("target", &rep.target);
    r.field("verdict", rep.verdict.to_string());
    r.field("certificate", &rep.certificate);
    if let Some(m) = rep.margin {
        r.field("margin", m);
    }
    if rep.verdict == Verdict::Undecided {
        r.warn("numeric value lies inside the tolerance band; the verdict is UNDECIDED");
    }
    if rep.verdict == Verdict::No && rep.mode == ModeKind::Formal.to_string() {
        r.warn(FORMAL_CAVEAT);
    }
}

fn cmd_realizable(cli: &Cli, path: &Path) -> Result<Output, Failure> {
    let (curve, _) = load_valid(path)?;
    let mode = mode(cli, &curve)?;
    let cocycle = sigma_cocycle(&curve);
    let (geometric, offset) = sigma_geometric_auto(&curve).map_err(|e| Failure::new(3, e.to_string()))?;
    assert_eq!(cocycle, geometric, "σ from shifts and from wall crossings disagree");
    let rep = realizability(&curve, &mode).map_err(|e| Failure::new(1, e.to_string()))?;
    let mut r = Report::new("realizable");
    r.invariants(&curve);
    r.value("sigma", &cocycle);
    r.value("sigma_crossings", &geometric);
    r.field("offset", fmt_offset(&offset));
    realizability_fields(&mut r, &rep);
    add_warnings(&mut r, &curve);
    Ok(Output::Report(r, 0))
}

fn cmd_count(cli: &Cli, path: &Path) -> Result<Output, Failure> {
    let (curve, marks) = load_valid(path)?;
    let mode = mode(cli, &curve)?;
    let mut r = Report::new("count");
    r.invariants(&curve);
    let marks_text: Vec<String> =
        marks.iter().map(|p| format!("{}@{}", curve.edges[p.edge].id, fmt_rational(&p.t))).collect();
    r.field_text("marks", &marks_text, marks_text.join(" "));
    match count_curves(&curve, &marks, &mode) {
        Ok(c) => {
            let divisors: Vec<String> = c.elementary_divisors.iter().map(ToString::to_string).collect();
            let total = c.total.as_ref().map_or("infinite".to_string(), ToString::to_string);
            r.field("mode", mode.kind().to_string());
            r.field("kernel_order", c.kernel_order.as_ref().map(ToString::to_string));
            r.field_text("elementary_divisors", &divisors, format!("[{}]", divisors.join(", ")));
            r.field("edge_weight_product", c.edge_weight_product.to_string());
            r.field_text("total", c.total.as_ref().map(ToString::to_string), total);
            add_warnings(&mut r, &curve);
            Ok(Output::Report(r, 0))
        }
        Err(CountError::NotRealizable(rep)) => {
            r.value("sigma", &rep.sigma);
            realizability_fields(&mut r, &rep);
            Err(Failure { code: 4, message: "curve is not realizable".into(), report: Some(r) })
        }
        Err(e @ (CountError::WrongMarkCount { .. } | CountError::NotRigid)) => Err(Failure::new(5, e.to_string())),
        Err(e) => Err(Failure::new(1, e.to_string())),
    }
}

fn label_text(curve: &TropicalCurve, l: RowLabel) -> String {
    match l {
        RowLabel::Vertex(v) => format!("vertex {}", curve.vertices[v].id),
        RowLabel::Edge(e) => format!("edge {}", curve.edges[e].id),
        RowLabel::Other(i) => format!("row {i}"),
    }
}

fn assignment_fields(r: &mut Report, curve: &TropicalCurve, a: &FlagAssignment) {
    let file = format::assignment_to_file(curve, a);
    let text: Vec<String> = a
        .flags
        .iter()
        .zip(&a.values)
        .map(|(f, v)| format!("x({},{}) = {v}", curve.vertices[f.vertex].id, curve.edges[f.edge].id))
        .collect();
    r.field_text("assignment", &file.assignment, text.join("; "));
}

fn generator_fields(r: &mut Report, key: &str, gens: &[KernelGenerator]) {
    let text: Vec<String> = gens
        .iter()
        .map(|g| {
            let d: Vec<String> = g.direction.iter().map(ToString::to_string).collect();
            match &g.order {
                Some(o) => format!("({}) mod {o}", d.join(",")),
                None => format!("({})", d.join(",")),
            }
        })
        .collect();
    r.field_text(key, gens, if text.is_empty() { "none".into() } else { text.join(" ") });
}

fn verify_fields(r: &mut Report, curve: &TropicalCurve, v: &VerifyReport) {
    let failing: Vec<String> = v.failures().map(|row| format!("{}: residual {}", label_text(curve, row.label), row.residual)).collect();
    r.field("verification", if v.passed { "pass" } else { "fail" });
    r.field_text(
        "failing_rows",
        &failing,
        if failing.is_empty() { "none".into() } else { failing.join("; ") },
    );
}

fn cmd_prelog(cli: &Cli, path: &Path, check: Option<&Path>) -> Result<Output, Failure> {
    let (curve, _) = load_valid(path)?;
    let mode = mode(cli, &curve)?;
    let mut r = Report::new("prelog");
    r.invariants(&curve);
    r.field("mode", mode.kind().to_string());
    let internal = |e: crate::prelog::PrelogError| Failure::new(1, e.to_string());

    if let Some(check) = check {
        let text =
            std::fs::read_to_string(check).map_err(|e| Failure::new(1, format!("{}: {e}", check.display())))?;
        let a = format::parse_assignment(&curve, &text)
            .map_err(|e| Failure::new(1, format!("{}: {e}", check.display())))?;
        let v = verify_assignment(&curve, &a, &mode).map_err(internal)?;
        verify_fields(&mut r, &curve, &v);
        let code = if v.passed { 0 } else { 4 };
        return Ok(Output::Report(r, code));
    }

    let system = assemble_system(&curve).map_err(|e| Failure::new(2, e.to_string()))?;
    r.field("rows", system.rows()).field("unknowns", system.unknowns());
    match solve_monomial(&system, &mode).map_err(internal)? {
        Solution::Feasible { assignment, free, torsion } => {
            let v = verify_assignment(&curve, &assignment, &mode).map_err(internal)?;
            assert!(v.passed, "solver returned an assignment that fails substitution");
            r.field("feasible", "true");
            assignment_fields(&mut r, &curve, &assignment);
            generator_fields(&mut r, "free_generators", &free);
            generator_fields(&mut r, "torsion_generators", &torsion);
            verify_fields(&mut r, &curve, &v);
            Ok(Output::Report(r, 0))
        }
        Solution::Infeasible { witnesses } => {
            r.field("feasible", "false");
            let text: Vec<String> = witnesses.iter().map(ToString::to_string).collect();
            r.field_text("witnesses", &witnesses, text.join("; "));
            if mode.kind() == ModeKind::Formal {
                r.warn(FORMAL_CAVEAT);
            }
            Err(Failure { code: 4, message: "gluing system is infeasible".into(), report: Some(r) })
        }
        Solution::Undecided { certificate } => {
            r.field("feasible", Verdict::Undecided.to_string());
            r.field("certificate", certificate);
            r.warn("numeric value lies inside the tolerance band; feasibility is UNDECIDED");
            Ok(Output::Report(r, 0))
        }
    }
}

fn cmd_plot(path: &Path, out: &str) -> Result<Output, Failure> {
    let (curve, _) = load_valid(path)?;
    let svg = plot::render_svg(&curve);
    if out.is_empty() {
        return Ok(Output::Raw(svg));
    }
    std::fs::write(out, &svg).map_err(|e| Failure::new(1, format!("{out}: {e}")))?;
    let mut r = Report::new("plot");
    r.field("out", out);
    r.field("edges", curve.edges.len()).field("vertices", curve.vertices.len());
    Ok(Output::Report(r, 0))
}

fn cmd_selftest(seed: u64, cases: usize) -> Result<Output, Failure> {
    let sizes = selftest::Sizes::from_cases(cases);
    let results = selftest::run_all(seed, &sizes);
    let mut r = Report::new("selftest");
    r.field("seed", seed).field("cases", cases);
    let mut all = true;
    for s in &results {
        all &= s.passed();
        let v = serde_json::json!({
            "passed": s.passed(),
            "cases": s.cases,
            "failures": s.failures,
            "notes": s.notes,
        });
        let mut text = s.line();
        for n in &s.notes {
            text.push_str(&format!("\n    note: {n}"));
        }
        for f in &s.failures {
            text.push_str(&format!("\n    {}", f.replace('\n', "\n    ")));
        }
        r.field_text(s.name, v, text);
    }
    r.field_text("all_passed", Value::Bool(all), if all { "PASS" } else { "FAIL" });
    Ok(Output::Report(r, if all { 0 } else { 1 }))
}
