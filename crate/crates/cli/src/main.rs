//! Command-line front end: map and flow configuration, grid sweeps, and
//! deterministic CSV/JSON emission.
//!
//! Output is byte-identical across runs with the same configuration:
//! floats print in shortest round-trip form, rationals as canonical
//! fractions, and rows are emitted in input order. Point-level domain
//! failures become rows with an `error` column instead of aborting the
//! sweep; the exit status is 0 when at least one row succeeded, 2 for
//! usage errors, and 3 for domain or numeric errors.

mod grid;
mod rows;

use clap::{Args, Parser, Subcommand, ValueEnum};
use grid::{parse_grid, parse_krange, parse_t_list, Grid, KRange, TList};
use iterflow::analysis::{
    extrema_table, leading_error_logistic2, radius_estimates, relative_error,
    successive_difference,
};
use iterflow::conjugate::{flow_for, iterate_eval_with_flow, split_t};
use iterflow::maps::{catalog_get, MapSpec};
use iterflow::schroeder::{koenigs_series, parabolic_psi};
use iterflow::solver::{solve_flow_exact, solve_flow_numeric, velocity_series, FlowSeries};
use iterflow::Coeff;
use iterflow::Error as FlowError;
use rows::*;
use serde::Serialize;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "iterflow",
    version,
    about = "Continuous iterates of one-dimensional maps: series solving, conjugation, error sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Flow coefficients c_k(t): exact polynomials in t, or numbers at fixed t
    Coeffs(CoeffsArgs),
    /// Conjugated iterate values A_{n,t}(x) over an x grid
    Iterate(IterateArgs),
    /// Relative errors against the exact flow, or successive differences
    Error(ErrorArgs),
    /// Leading-error approximation and its defect (logistic map, lambda = 2)
    Leading(LeadingArgs),
    /// Schröder data: Koenigs coefficients or the parabolic expansion
    Schroeder(SchroederArgs),
    /// Radius-of-convergence estimates 1/|c_k(t)|^(1/k)
    Radius(RadiusArgs),
    /// Sine extrema A_{n,t}(pi/2) against (pi/2)^(1-sqrt t)
    Extrema(ExtremaArgs),
}

#[derive(Args)]
struct MapArgs {
    /// Built-in map: moebius, sine, or logistic
    #[arg(long)]
    map: String,
    /// Logistic parameter (0 < lambda <= 4); only valid with --map logistic
    #[arg(long)]
    lambda: Option<f64>,
}

impl MapArgs {
    fn get(&self) -> Result<MapSpec, CliError> {
        catalog_get(&self.map, self.lambda).map_err(usage)
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output path; standard output when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct CoeffsArgs {
    #[command(flatten)]
    map: MapArgs,
    /// Series truncation order (>= 2)
    #[arg(long = "N")]
    order: usize,
    /// Solve in exact polynomial-in-t mode (parabolic maps)
    #[arg(long)]
    exact: bool,
    /// Flow parameter for numeric mode
    #[arg(long, value_parser = parse_t_list)]
    t: Option<TList>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct IterateArgs {
    #[command(flatten)]
    map: MapArgs,
    /// Series truncation order (>= 2)
    #[arg(long = "N")]
    order: usize,
    /// Conjugation depth
    #[arg(long)]
    n: Option<u32>,
    /// Flow parameter, a single value or a comma list
    #[arg(long, value_parser = parse_t_list)]
    t: TList,
    /// Evaluation grid lo:hi:count (inclusive endpoints)
    #[arg(long, value_parser = parse_grid)]
    x: Grid,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ErrorArgs {
    #[command(flatten)]
    map: MapArgs,
    /// Error kind: relative error R_t (needs an exact flow) or successive difference S_t
    #[arg(long, value_enum, default_value_t = ErrorKindArg::Rel)]
    kind: ErrorKindArg,
    #[arg(long = "N")]
    order: usize,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, value_parser = parse_t_list)]
    t: TList,
    #[arg(long, value_parser = parse_grid)]
    x: Grid,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum ErrorKindArg {
    Rel,
    Succ,
}

#[derive(Args)]
struct LeadingArgs {
    #[arg(long = "N")]
    order: usize,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, value_parser = parse_t_list)]
    t: TList,
    #[arg(long, value_parser = parse_grid)]
    x: Grid,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SchroederArgs {
    #[command(flatten)]
    map: MapArgs,
    /// Construction order (>= 2)
    #[arg(long = "N")]
    order: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct RadiusArgs {
    #[command(flatten)]
    map: MapArgs,
    /// Exact flow order (>= max k)
    #[arg(long = "N")]
    order: usize,
    /// Flow parameter at which coefficients are evaluated
    #[arg(long, value_parser = parse_t_list)]
    t: TList,
    /// Coefficient index range lo:hi (inclusive)
    #[arg(long, value_parser = parse_krange)]
    k: KRange,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ExtremaArgs {
    /// Flow parameters in [0, 1]; defaults to 0, 0.1, .., 1
    #[arg(long, value_parser = parse_t_list)]
    t: Option<TList>,
    /// Series order
    #[arg(long = "N", default_value_t = 9)]
    order: usize,
    /// Conjugation depth
    #[arg(long, default_value_t = 5)]
    n: u32,
    #[command(flatten)]
    output: OutputArgs,
}

enum CliError {
    Usage(String),
    Run(String),
}

fn usage(e: impl ToString) -> CliError {
    CliError::Usage(e.to_string())
}

fn run_error(e: impl ToString) -> CliError {
    CliError::Run(e.to_string())
}

/// Map library errors at the top level of a subcommand: configuration
/// mistakes exit 2, domain/numeric conditions exit 3.
fn top_level(e: FlowError) -> CliError {
    match e {
        FlowError::UnknownMap(_)
        | FlowError::LambdaOutOfRange(_)
        | FlowError::LambdaNotApplicable(_)
        | FlowError::MissingLambda
        | FlowError::EmptySeries
        | FlowError::OrderMismatch { .. }
        | FlowError::BadTruncation { .. }
        | FlowError::MapOrderTooSmall { .. }
        | FlowError::NotParabolic { .. }
        | FlowError::ExpectedHyperbolic
        | FlowError::ExactModeOnly
        | FlowError::IdentityMap => CliError::Usage(e.to_string()),
        other => CliError::Run(other.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Coeffs(args) => cmd_coeffs(args),
        Command::Iterate(args) => cmd_iterate(args),
        Command::Error(args) => cmd_error(args),
        Command::Leading(args) => cmd_leading(args),
        Command::Schroeder(args) => cmd_schroeder(args),
        Command::Radius(args) => cmd_radius(args),
        Command::Extrema(args) => cmd_extrema(args),
    }
}

fn check_order(order: usize) -> Result<(), CliError> {
    if order < 2 {
        return Err(CliError::Usage(format!(
            "series order must be at least 2, got {order}"
        )));
    }
    Ok(())
}

/// depth default: 5 for plots, 7 for high-accuracy logistic error runs.
fn resolve_depth(n: Option<u32>, high_accuracy_logistic: bool) -> u32 {
    n.unwrap_or(if high_accuracy_logistic { 7 } else { 5 })
}

fn single_t(ts: &[f64]) -> Result<f64, CliError> {
    match ts {
        [t] => Ok(*t),
        _ => Err(CliError::Usage(
            "this subcommand takes a single --t value".to_string(),
        )),
    }
}

fn cmd_coeffs(args: CoeffsArgs) -> Result<(), CliError> {
    check_order(args.order)?;
    let map = args.map.get()?;
    if args.exact {
        let series = map.series(args.order).map_err(top_level)?;
        let flow = solve_flow_exact(&series, args.order).map_err(top_level)?;
        let coeffs = flow.exact_coeffs().expect("exact mode");
        let rows: Vec<ExactCoeffRow> = coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| ExactCoeffRow {
                k: i + 1,
                c_k: c.to_string(),
            })
            .collect();
        emit(&rows, &args.output)
    } else {
        let ts = args.t.as_ref().ok_or_else(|| {
            CliError::Usage("numeric mode requires --t (or pass --exact)".to_string())
        })?;
        let t = single_t(&ts.0)?;
        let series = map.series_f64(args.order).map_err(top_level)?;
        let flow = solve_flow_numeric(&series, t, args.order).map_err(top_level)?;
        let coeffs = flow.series_at(t).map_err(top_level)?;
        let rows: Vec<NumericCoeffRow> = (1..=args.order)
            .map(|k| NumericCoeffRow {
                k,
                c_k: *coeffs.coeff(k),
            })
            .collect();
        emit(&rows, &args.output)
    }
}

/// One flow per distinct tau; exact flows are shared across all t.
fn flow_for_t(map: &MapSpec, order: usize, t: f64) -> Result<FlowSeries, FlowError> {
    let (_, tau) = split_t(t);
    flow_for(map, order, tau)
}

fn cmd_iterate(args: IterateArgs) -> Result<(), CliError> {
    check_order(args.order)?;
    let map = args.map.get()?;
    let depth = resolve_depth(args.n, false);
    let mut rows = Vec::with_capacity(args.t.0.len() * args.x.0.len());
    let mut successes = 0usize;
    for &t in &args.t.0 {
        let flow = flow_for_t(&map, args.order, t).map_err(top_level)?;
        for &x in &args.x.0 {
            match iterate_eval_with_flow(&map, &flow, t, x, depth) {
                Ok(value) => {
                    successes += 1;
                    rows.push(IterateRow {
                        t,
                        x,
                        value: Some(value),
                        error: None,
                    });
                }
                Err(e) => rows.push(IterateRow {
                    t,
                    x,
                    value: None,
                    error: Some(e.to_string()),
                }),
            }
        }
    }
    emit(&rows, &args.output)?;
    sweep_status(successes, rows.len())
}

fn cmd_error(args: ErrorArgs) -> Result<(), CliError> {
    check_order(args.order)?;
    let map = args.map.get()?;
    let depth = resolve_depth(args.n, args.map.map == "logistic");
    let mut rows = Vec::with_capacity(args.t.0.len() * args.x.0.len());
    let mut successes = 0usize;
    for &t in &args.t.0 {
        let flow = flow_for_t(&map, args.order, t).map_err(top_level)?;
        for &x in &args.x.0 {
            let result = match args.kind {
                ErrorKindArg::Rel => relative_error(&map, &flow, t, x, depth),
                ErrorKindArg::Succ => successive_difference(&map, &flow, t, x, depth),
            };
            match result {
                Ok(record) => {
                    successes += 1;
                    rows.push(ErrorRow {
                        t,
                        x,
                        value: Some(record.value),
                        error: None,
                    });
                }
                Err(e) => rows.push(ErrorRow {
                    t,
                    x,
                    value: None,
                    error: Some(e.to_string()),
                }),
            }
        }
    }
    emit(&rows, &args.output)?;
    sweep_status(successes, rows.len())
}

fn cmd_leading(args: LeadingArgs) -> Result<(), CliError> {
    check_order(args.order)?;
    let map = catalog_get("logistic", Some(2.0)).map_err(top_level)?;
    let depth = resolve_depth(args.n, true);
    let mut rows = Vec::with_capacity(args.t.0.len() * args.x.0.len());
    let mut successes = 0usize;
    for &t in &args.t.0 {
        let flow = flow_for_t(&map, args.order, t).map_err(top_level)?;
        for &x in &args.x.0 {
            let exact = relative_error(&map, &flow, t, x, depth).map(|r| r.value);
            let leading = leading_error_logistic2(t, x, args.order, depth);
            match (exact, leading) {
                (Ok(r), Ok(l)) => {
                    successes += 1;
                    rows.push(LeadingRow {
                        t,
                        x,
                        r_exact: Some(r),
                        r_leading: Some(l),
                        delta_r: Some(r - l),
                        error: None,
                    });
                }
                (exact, leading) => {
                    let msg = exact
                        .err()
                        .or(leading.err())
                        .map(|e| e.to_string())
                        .unwrap_or_default();
                    rows.push(LeadingRow {
                        t,
                        x,
                        r_exact: None,
                        r_leading: None,
                        delta_r: None,
                        error: Some(msg),
                    });
                }
            }
        }
    }
    emit(&rows, &args.output)?;
    sweep_status(successes, rows.len())
}

fn cmd_schroeder(args: SchroederArgs) -> Result<(), CliError> {
    check_order(args.order)?;
    let map = args.map.get()?;
    let series = map.series(args.order).map_err(top_level)?;
    let mut rows = Vec::new();
    if map.multiplier() == 1.0 {
        let flow = solve_flow_exact(&series, args.order).map_err(top_level)?;
        let velocity = velocity_series(&flow).map_err(top_level)?;
        let psi = parabolic_psi(&velocity).map_err(top_level)?;
        rows.push(SchroederRow {
            term: "rho".to_string(),
            exact: psi.rho().to_string(),
            approx: psi.rho().approx(),
        });
        for (&k, p) in psi.terms() {
            rows.push(SchroederRow {
                term: format!("p_{k}"),
                exact: p.to_string(),
                approx: p.approx(),
            });
        }
    } else {
        let psi = koenigs_series(&series, args.order).map_err(top_level)?;
        for (i, b) in psi.coeffs().iter().enumerate() {
            rows.push(SchroederRow {
                term: format!("b_{}", i + 1),
                exact: b.to_string(),
                approx: b.approx(),
            });
        }
    }
    emit(&rows, &args.output)
}

fn cmd_radius(args: RadiusArgs) -> Result<(), CliError> {
    check_order(args.order)?;
    let map = args.map.get()?;
    let t = single_t(&args.t.0)?;
    let KRange(k_lo, k_hi) = args.k;
    let series = map.series(args.order).map_err(top_level)?;
    let flow = solve_flow_exact(&series, args.order).map_err(top_level)?;
    let points = radius_estimates(&flow, t, k_lo, k_hi).map_err(top_level)?;
    let mut successes = 0usize;
    let rows: Vec<RadiusRow> = points
        .into_iter()
        .map(|p| match p.estimate {
            Some(estimate) => {
                successes += 1;
                RadiusRow {
                    k: p.k,
                    estimate: Some(estimate),
                    error: None,
                }
            }
            None => RadiusRow {
                k: p.k,
                estimate: None,
                error: Some("zero coefficient".to_string()),
            },
        })
        .collect();
    let count = rows.len();
    emit(&rows, &args.output)?;
    sweep_status(successes, count)
}

fn cmd_extrema(args: ExtremaArgs) -> Result<(), CliError> {
    check_order(args.order)?;
    let ts: Vec<f64> = match args.t {
        Some(ts) => ts.0,
        None => (0..=10).map(|i| i as f64 / 10.0).collect(),
    };
    let rows_in = extrema_table(&ts, args.order, args.n).map_err(top_level)?;
    let rows: Vec<ExtremaRow> = rows_in
        .into_iter()
        .map(|r| ExtremaRow {
            t: r.t,
            computed: r.computed,
            reference: r.reference,
            rel_discrepancy: r.rel_discrepancy,
        })
        .collect();
    emit(&rows, &args.output)
}

fn sweep_status(successes: usize, total: usize) -> Result<(), CliError> {
    if successes == 0 && total > 0 {
        Err(run_error("no grid point evaluated successfully"))
    } else {
        Ok(())
    }
}

fn emit<T: Serialize>(rows: &[T], output: &OutputArgs) -> Result<(), CliError> {
    let mut buf: Vec<u8> = Vec::new();
    match output.format {
        Format::Csv => {
            let mut writer = csv::Writer::from_writer(&mut buf);
            for row in rows {
                writer.serialize(row).map_err(run_error)?;
            }
            writer.flush().map_err(run_error)?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut buf, rows).map_err(run_error)?;
            buf.push(b'\n');
        }
    }
    match &output.out {
        Some(path) => std::fs::write(path, &buf).map_err(run_error),
        None => std::io::stdout().write_all(&buf).map_err(run_error),
    }
}
