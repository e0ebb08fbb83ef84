//! `geonet` command line. Exit codes: 0 success, 1 verification failure or
//! non-convergence, 2 usage, parse or I/O error.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use super::{export_report, export_svg, load_net, net_to_json, save_net, write_frames, IoError, ReportFormat, SvgStyle};
use crate::angles::{compute_k, solve_angles, MIN_ROOT_TOL};
use crate::builder::{topology_template, ConstructionParams, ConstructionResult, NetFamily};
use crate::net::EmbeddedNet;
use crate::relax::{export_trace_frames, relax, RelaxConfig, RelaxStatus, StepRule, UpdateMode};
use crate::verify::{check_lemmas, is_irreducible, verify_geodesic_net, Irreducibility, LemmaCheck, SearchOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "geonet", version, about = "Construct, relax and verify planar geodesic nets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the angle system and print alpha, beta, K and residuals.
    SolveAngles {
        #[arg(long, default_value_t = MIN_ROOT_TOL)]
        tol: f64,
    },
    /// Build a net of the given family and write it as JSON.
    Construct {
        #[arg(long, value_enum)]
        family: Family,
        /// Ring parameter; defaults to 3 for t3 and 2 for t2.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Relax interior vertices toward balance with the boundary pinned.
    Relax(RelaxArgs),
    /// Check balance, overlaps and degrees, optionally irreducibility and lemmas.
    Verify(VerifyArgs),
    /// Render a net as SVG.
    ExportSvg {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        style: StyleArgs,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Family {
    T3,
    T2,
    Ring,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Rule {
    Capped,
    Fixed,
    Weiszfeld,
}

#[derive(Debug, Args)]
struct RelaxArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    rule: Option<Rule>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 0)]
    trace_every: usize,
    /// Directory for SVG frames; needs --trace-every.
    #[arg(long)]
    frames: Option<PathBuf>,
    /// Update all vertices from one snapshot instead of in place.
    #[arg(long)]
    synchronous: bool,
    #[command(flatten)]
    style: StyleArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    irreducibility: bool,
    #[arg(long)]
    lemmas: bool,
    /// Balance tolerance.
    #[arg(long, default_value_t = crate::net::DEFAULT_BALANCE_TOL)]
    tol: f64,
    /// Tolerance for balanced edge subsets in the irreducibility search.
    #[arg(long, default_value_t = crate::verify::DEFAULT_SUBSET_TOL)]
    subset_tol: f64,
    #[arg(long, default_value_t = crate::verify::DEFAULT_NODE_BUDGET)]
    node_budget: u64,
    /// Search for a witness with the fewest edges.
    #[arg(long)]
    minimal: bool,
    /// Report path; `.csv` selects CSV, anything else JSON.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct StyleArgs {
    #[arg(long)]
    stroke_width: Option<f64>,
    #[arg(long)]
    balanced_radius: Option<f64>,
    #[arg(long)]
    boundary_radius: Option<f64>,
    #[arg(long)]
    margin: Option<f64>,
}

impl StyleArgs {
    fn style(&self) -> SvgStyle {
        let d = SvgStyle::default();
        SvgStyle {
            stroke_width: self.stroke_width.unwrap_or(d.stroke_width),
            balanced_radius: self.balanced_radius.unwrap_or(d.balanced_radius),
            boundary_radius: self.boundary_radius.unwrap_or(d.boundary_radius),
            margin_fraction: self.margin.unwrap_or(d.margin_fraction),
        }
    }
}

/// A failure carrying its exit code.
struct Exit(i32, String);

impl From<IoError> for Exit {
    fn from(e: IoError) -> Self {
        Exit(EXIT_USAGE, e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Exit {
    Exit(EXIT_USAGE, msg.into())
}

/// Runs the CLI on `argv` (including the program name) and returns the exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::SolveAngles { tol } => solve(tol),
        Command::Construct { family, n, out } => construct(family, n, out),
        Command::Relax(args) => relax_cmd(args),
        Command::Verify(args) => verify_cmd(args),
        Command::ExportSvg { input, out, style } => {
            load_net(&input).and_then(|net| export_svg(&net, &style.style(), &out)).map(|_| EXIT_OK).map_err(Exit::from)
        }
    };
    match result {
        Ok(code) => code,
        Err(Exit(code, msg)) => {
            eprintln!("error: {msg}");
            code
        }
    }
}

fn solve(tol: f64) -> Result<i32, Exit> {
    let sol = solve_angles(tol).map_err(|e| usage(e.to_string()))?;
    println!("alpha = {}", sol.alpha);
    println!("beta = {}", sol.beta);
    println!("K = {}", compute_k::<f64>());
    println!("residual_cos = {:e}", sol.residual_cos);
    println!("residual_sin = {:e}", sol.residual_sin);
    Ok(EXIT_OK)
}

fn construct(family: Family, n: Option<usize>, out: Option<PathBuf>) -> Result<i32, Exit> {
    let fam = match (family, n) {
        (Family::T3, None | Some(3)) => NetFamily::t3(),
        (Family::T2, None | Some(2)) => NetFamily::t2(),
        (Family::T3, Some(n)) => return Err(usage(format!("t3 has n = 3, got {n}"))),
        (Family::T2, Some(n)) => return Err(usage(format!("t2 has n = 2, got {n}"))),
        (Family::Ring, None) => return Err(usage("--family ring needs --n")),
        (Family::Ring, Some(n @ (2 | 3))) => {
            return Err(usage(format!("ring needs n >= 4; use --family t{n}")));
        }
        (Family::Ring, Some(n)) => NetFamily::ring(n).map_err(|e| usage(e.to_string()))?,
    };
    let template = topology_template::<f64>(fam).map_err(|e| usage(e.to_string()))?;
    if fam.is_experimental() {
        eprintln!("note: ring n = {} is an experimental topology with unbalanced seed positions", fam.n);
    }
    match out {
        Some(path) => save_net(&template.seed, path)?,
        None => print!("{}", net_to_json(&template.seed)),
    }
    Ok(EXIT_OK)
}

fn relax_cmd(a: RelaxArgs) -> Result<i32, Exit> {
    if a.frames.is_some() && a.trace_every == 0 {
        return Err(usage("--frames needs --trace-every > 0"));
    }
    let net = load_net(&a.input)?;
    let d = RelaxConfig::<f64>::default();
    let cfg = RelaxConfig {
        step: a.step.unwrap_or(d.step),
        rule: match a.rule {
            None => d.rule,
            Some(Rule::Capped) => StepRule::Capped,
            Some(Rule::Fixed) => StepRule::Fixed,
            Some(Rule::Weiszfeld) => StepRule::Weiszfeld,
        },
        max_iters: a.max_iters.unwrap_or(d.max_iters),
        tol_balance: a.tol.unwrap_or(d.tol_balance),
        guard: d.guard,
        trace_every: a.trace_every,
        mode: if a.synchronous {
            UpdateMode::Synchronous
        } else {
            UpdateMode::Sequential
        },
    };
    let outcome = relax(&net, &cfg).map_err(|e| usage(e.to_string()))?;
    println!(
        "status = {:?}, iterations = {}, max_norm = {:e}, total_loss = {:e}",
        outcome.status, outcome.iterations, outcome.final_max_norm, outcome.final_loss
    );
    if let Some(v) = &outcome.degenerate_vertex {
        println!("degenerate at {v}");
    }
    let overlaps = outcome.net.detect_overlaps_default();
    for f in &overlaps {
        println!("overlap: {}", serde_json::to_string(f).expect("finding serializes"));
    }
    if let Some(path) = &a.out {
        save_net(&outcome.net, path)?;
    }
    if let Some(dir) = &a.frames {
        let frames = export_trace_frames(&outcome).map_err(|e| usage(e.to_string()))?;
        let n = write_frames(&frames, &a.style.style(), dir)?;
        println!("wrote {n} frames to {}", dir.display());
    }
    Ok(if outcome.status == RelaxStatus::Converged && overlaps.is_empty() {
        EXIT_OK
    } else {
        EXIT_FAIL
    })
}

fn verify_cmd(a: VerifyArgs) -> Result<i32, Exit> {
    let net = load_net(&a.input)?;
    let mut report = verify_geodesic_net(&net, a.tol);
    if a.lemmas {
        report.lemma_checks = lemma_checks(net.clone())?;
    }
    if a.irreducibility {
        let opts = SearchOptions {
            subset_tol: a.subset_tol,
            node_budget: a.node_budget,
            minimal: a.minimal,
        };
        match is_irreducible(&net, &opts) {
            Ok(out) => {
                report.irreducible = out.verdict;
                report.witness = out.witness;
            }
            Err(e) => {
                print_summary(&report);
                return Err(Exit(EXIT_FAIL, e.to_string()));
            }
        }
    }
    print_summary(&report);
    if let Some(path) = &a.report {
        export_report(&report, path, ReportFormat::from_path(path))?;
    }
    Ok(if report.passed() { EXIT_OK } else { EXIT_FAIL })
}

fn lemma_checks(net: EmbeddedNet<f64>) -> Result<Vec<LemmaCheck>, Exit> {
    let sol = solve_angles(MIN_ROOT_TOL).map_err(|e| usage(e.to_string()))?;
    let params = ConstructionParams::from_solution(&sol).map_err(|e| usage(e.to_string()))?;
    let result = ConstructionResult::from_net(net, params)
        .ok_or_else(|| usage("--lemmas needs a net with the 25-vertex layout and ids"))?;
    let lemmas = check_lemmas(&result, &sol).map_err(|e| usage(e.to_string()))?;
    Ok(lemmas.checks)
}

fn print_summary(r: &crate::verify::VerificationReport) {
    let word = |b: bool| if b { "pass" } else { "FAIL" };
    println!("balance: {}", word(r.balance_pass));
    for (id, norm) in &r.unbalanced {
        println!("  {id}: {norm:e}");
    }
    println!("overlaps: {}", word(r.overlap_pass));
    println!("degree: {}", word(r.degree_pass));
    for c in &r.lemma_checks {
        println!("lemma {}: {} ({:e})", c.name, word(c.pass), c.max_deviation);
    }
    let verdict = match r.irreducible {
        Irreducibility::Yes => "yes",
        Irreducibility::No => "no",
        Irreducibility::NotChecked => "not checked",
    };
    println!("irreducible: {verdict}");
    if let Some(w) = &r.witness {
        let edges: Vec<String> = w.edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
        println!("witness: {}", edges.join(" "));
    }
}
