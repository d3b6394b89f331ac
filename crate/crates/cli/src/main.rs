//! ptl: command-line front end for the prime-distribution laboratory.
//!
//! Scalar results print as bare JSON numbers, structured results as JSON
//! objects with fixed key order, and data series as CSV; `--format` flips
//! between the two encodings. Identical invocations produce byte-identical
//! output for any `--threads` setting.

mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::{csv, table_to_json, Cell, Val};
use ptl_core::analytic::{self, BrunVariant};
use ptl_core::arith;
use ptl_core::error::Error;
use ptl_core::gpy::{self, Approximation, DetectionReport, GpyParams, TupleSpec};
use ptl_core::progressions;
use ptl_core::series;
use ptl_core::sieve;
use ptl_core::tuples::{self, ShiftTuple, SINGULAR_SERIES_CUTOFF};
use ptl_core::Limits;

#[derive(Parser)]
#[command(
    name = "ptl",
    version,
    about = "Prime-distribution laboratory: sieves, counting functions, singular series, \
             truncated divisor sums, and progression error sums",
    after_help = "Environment: PTL_MAX_X, PTL_SEGMENT_SIZE, PTL_THREADS (flags take precedence)."
)]
struct Cli {
    /// Output encoding; defaults to JSON for scalars and records, CSV for series.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Worker threads (default: available parallelism). Results are
    /// identical for any value.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Ceiling for the counting functions.
    #[arg(long, global = true)]
    max_x: Option<u64>,

    /// Sieve segment size in numbers.
    #[arg(long, global = true)]
    segment_size: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ApproxArg {
    Product,
    Sieve,
}

#[derive(Clone, Copy, ValueEnum)]
enum BrunArg {
    /// Each twin-pair member once.
    Distinct,
    /// 1/p + 1/(p+2) per pair; the classical convention.
    Pairs,
}

#[derive(Subcommand)]
enum Command {
    /// Sieve a closed interval and list its primes.
    Sieve {
        #[arg(long)]
        lo: u64,
        #[arg(long)]
        hi: u64,
    },
    /// Counting functions.
    #[command(subcommand)]
    Count(CountCommand),
    /// Gaps between consecutive primes in an interval.
    Gaps {
        #[arg(long)]
        lo: u64,
        #[arg(long)]
        hi: u64,
        /// Print the range summary instead of per-gap records.
        #[arg(long)]
        summary: bool,
    },
    /// Integrals, products, and partial sums.
    #[command(subcommand)]
    Analytic(AnalyticCommand),
    /// Exact arithmetic functions.
    #[command(subcommand)]
    Arith(ArithCommand),
    /// Shift tuples, admissibility, and the singular series.
    #[command(subcommand)]
    Tuples(TuplesCommand),
    /// Named constants.
    #[command(subcommand)]
    Constants(ConstantsCommand),
    /// Truncated divisor sums and detection sums.
    #[command(subcommand)]
    Gpy(GpyCommand),
    /// Primes in arithmetic progressions.
    #[command(subcommand)]
    Bv(BvCommand),
    /// Data series behind the predefined figures 1..=10.
    Figure {
        id: u32,
        #[arg(long, default_value_t = 100)]
        resolution: usize,
    },
    /// Multiply primes, add one, and factor the result.
    Euclid {
        #[arg(long, value_delimiter = ',', required = true)]
        primes: Vec<u64>,
    },
}

#[derive(Subcommand)]
enum CountCommand {
    /// pi(x): primes up to x.
    Pi {
        #[arg(long)]
        x: u64,
    },
    /// pi_2(x): twin pairs with smaller member up to x.
    Pi2 {
        #[arg(long)]
        x: u64,
    },
    /// pi(x; H): n up to x with n+h prime for every shift h.
    Tuple {
        #[arg(long)]
        x: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        shifts: Vec<u64>,
    },
    /// pi(x; q, a): primes up to x congruent to a mod q.
    Ap {
        #[arg(long)]
        x: u64,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        a: u64,
    },
    /// The n-th prime.
    Nth {
        #[arg(long)]
        n: u64,
    },
}

#[derive(Subcommand)]
enum AnalyticCommand {
    /// The logarithmic integral from 2 to x.
    Li {
        #[arg(long)]
        x: f64,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// The integral of 1/(log t)^k from 2 to x.
    Lik {
        #[arg(long)]
        x: f64,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Truncated asymptotic expansion of li.
    Series {
        #[arg(long)]
        x: f64,
        #[arg(long)]
        terms: u32,
    },
    /// Product of (1 - 1/p) over primes up to the limit, exact and real.
    Mertens {
        #[arg(long)]
        limit: u64,
    },
    /// Mobius-weighted sums: partial sum of mu(n)/n, or the exact divisor
    /// sum over a primorial.
    MobiusSum {
        /// Partial sum of mu(n)/n for n up to this bound.
        #[arg(long, conflicts_with = "primorial")]
        n: Option<u64>,
        /// Exact sum of mu(d)/d over divisors of the primorial of primes
        /// up to this bound.
        #[arg(long)]
        primorial: Option<u64>,
    },
    /// Partial sum of the harmonic series.
    Harmonic {
        #[arg(long)]
        n: u64,
    },
    /// Reciprocal sum over twin primes up to x.
    Brun {
        #[arg(long)]
        x: u64,
        #[arg(long, value_enum, default_value_t = BrunArg::Distinct)]
        variant: BrunArg,
    },
    /// Finite zeta sum against the finite Euler product at real z.
    EulerProduct {
        #[arg(long)]
        z: f64,
        /// Prime limit for the product side.
        #[arg(long)]
        primes: u64,
        /// Term limit for the sum side.
        #[arg(long)]
        terms: u64,
    },
}

#[derive(Subcommand)]
enum ArithCommand {
    /// Certified prime factorization.
    Factor {
        #[arg(long)]
        n: u64,
    },
    /// Mobius mu.
    Mobius {
        #[arg(long)]
        n: u64,
    },
    /// Euler phi.
    Phi {
        #[arg(long)]
        q: u64,
    },
    /// Von Mangoldt Lambda.
    Lambda {
        #[arg(long)]
        n: u64,
    },
    /// Generalized von Mangoldt Lambda_k by divisor enumeration.
    LambdaK {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u32,
    },
}

#[derive(Subcommand)]
enum TuplesCommand {
    /// Distinct residue classes mod p covered by the shifts.
    Nu {
        #[arg(long, value_delimiter = ',', required = true)]
        shifts: Vec<u64>,
        #[arg(long)]
        p: u64,
    },
    /// Whether the tuple avoids covering all residues of any prime.
    Admissible {
        #[arg(long, value_delimiter = ',', required = true)]
        shifts: Vec<u64>,
    },
    /// Truncated singular series with truncation metadata.
    Singular {
        #[arg(long, value_delimiter = ',', required = true)]
        shifts: Vec<u64>,
        #[arg(long, default_value_t = SINGULAR_SERIES_CUTOFF)]
        cutoff: u64,
    },
    /// Narrowest admissible tuple of a given size (exhaustive search).
    Narrowest {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = tuples::NARROWEST_MAX_DIAMETER)]
        max_diameter: u64,
    },
    /// Predicted tuple count: singular series times li_k.
    Predict {
        #[arg(long, value_delimiter = ',', required = true)]
        shifts: Vec<u64>,
        #[arg(long)]
        x: f64,
        #[arg(long, default_value_t = SINGULAR_SERIES_CUTOFF)]
        cutoff: u64,
    },
}

#[derive(Subcommand)]
enum ConstantsCommand {
    /// The twin prime constant 2 prod (1 - 1/(p-1)^2).
    Twin {
        #[arg(long, default_value_t = SINGULAR_SERIES_CUTOFF)]
        cutoff: u64,
    },
}

#[derive(Args)]
struct GpyTupleArgs {
    /// Range base N; sums run over n <= N (moments) or N < n <= 2N
    /// (detections).
    #[arg(long)]
    n_base: u64,
    #[arg(long, value_delimiter = ',', required = true)]
    shifts: Vec<u64>,
    /// Exponent offset l of the sieve approximation.
    #[arg(long, default_value_t = 0)]
    ell: u32,
    /// Truncation level R; defaults to floor(N^(1/(4k))).
    #[arg(long)]
    truncation: Option<f64>,
    #[arg(long, value_enum, default_value_t = ApproxArg::Product)]
    approx: ApproxArg,
}

#[derive(Subcommand)]
enum GpyCommand {
    /// The tuple polynomial (n+h_1)...(n+h_k).
    Poly {
        #[arg(long)]
        n: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        shifts: Vec<u64>,
    },
    /// Lambda_R(n): truncated divisor sum.
    Lambda {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        truncation: f64,
    },
    /// Componentwise product of Lambda_R over a tuple.
    LambdaTuple {
        #[arg(long)]
        n: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        shifts: Vec<u64>,
        #[arg(long)]
        truncation: f64,
    },
    /// Single divisor sum over the tuple polynomial with weight
    /// (log R/d)^(k+l) / (k+l)!.
    LambdaSieve {
        #[arg(long)]
        n: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        shifts: Vec<u64>,
        #[arg(long, default_value_t = 0)]
        ell: u32,
        #[arg(long)]
        truncation: f64,
    },
    /// First moment: sum of the squared approximation over n <= N.
    Moment1(GpyTupleArgs),
    /// Second moment: the first moment weighted by Lambda(n + h0).
    Moment2 {
        #[command(flatten)]
        args: GpyTupleArgs,
        #[arg(long)]
        h0: u64,
    },
    /// Detection sum over (N, 2N] with witness extraction.
    Detect {
        #[command(flatten)]
        args: GpyTupleArgs,
        /// Threshold r: a positive sum certifies r+1 prime-power components.
        #[arg(long, default_value_t = 1)]
        r_threshold: u32,
    },
    /// Detection sum scanning all k-subsets of the interval {1,...,h}.
    DetectInterval {
        #[arg(long)]
        n_base: u64,
        #[arg(long)]
        h: u64,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        ell: u32,
        #[arg(long)]
        truncation: Option<f64>,
        #[arg(long, default_value_t = 1)]
        r_threshold: u32,
    },
}

#[derive(Subcommand)]
enum BvCommand {
    /// Expected progression count li(x)/phi(q).
    Expected {
        #[arg(long)]
        x: f64,
        #[arg(long)]
        q: u64,
    },
    /// Worst-residue error sum over moduli q <= q-max.
    Sum {
        #[arg(long)]
        x: u64,
        #[arg(long)]
        q_max: u64,
    },
    /// Error-sum totals at Q = floor(x^theta) across a theta grid.
    Probe {
        #[arg(long)]
        x: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        thetas: Vec<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads(cli.threads) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let limits = match build_limits(&cli) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(cli, &limits) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Domain(_) => ExitCode::from(2),
                Error::Budget(_) | Error::Overflow(_) => ExitCode::from(3),
            }
        }
    }
}

fn env_u64(name: &str) -> Result<Option<u64>, Error> {
    match std::env::var(name) {
        Ok(raw) => raw
            .parse::<u64>()
            .map(Some)
            .map_err(|_| Error::domain(format!("{name} must be an unsigned integer, got {raw:?}"))),
        Err(_) => Ok(None),
    }
}

fn build_limits(cli: &Cli) -> Result<Limits, Error> {
    let mut limits = Limits::default();
    if let Some(v) = env_u64("PTL_MAX_X")? {
        limits.max_x = v;
    }
    if let Some(v) = env_u64("PTL_SEGMENT_SIZE")? {
        limits.segment_size = v;
    }
    if let Some(v) = cli.max_x {
        limits.max_x = v;
    }
    if let Some(v) = cli.segment_size {
        limits.segment_size = v;
    }
    Ok(limits)
}

fn configure_threads(flag: Option<usize>) -> Result<(), Error> {
    let threads = match flag {
        Some(t) => Some(t),
        None => env_u64("PTL_THREADS")?.map(|t| t as usize),
    };
    if let Some(threads) = threads {
        if threads == 0 {
            return Err(Error::domain("thread count must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::domain(format!("thread pool: {e}")))?;
    }
    Ok(())
}

/// A rendered result: scalars and records default to JSON, tables to CSV.
enum Rendered {
    Scalar(Val),
    Record(Val),
    Table {
        header: Vec<&'static str>,
        rows: Vec<Vec<Cell>>,
    },
}

fn finish(rendered: Rendered, format: Option<Format>) -> String {
    match rendered {
        Rendered::Scalar(v) | Rendered::Record(v) => match format {
            Some(Format::Csv) => match v {
                v @ (Val::Obj(_) | Val::Arr(_)) => v.to_csv_pairs(),
                scalar => format!("value\n{}\n", scalar.render()),
            },
            _ => {
                let mut s = v.render();
                s.push('\n');
                s
            }
        },
        Rendered::Table { header, rows } => match format {
            Some(Format::Json) => {
                let mut s = table_to_json(&header, &rows).render();
                s.push('\n');
                s
            }
            _ => csv(&header, &rows),
        },
    }
}

fn shift_tuple(raw: Vec<u64>) -> Result<ShiftTuple, Error> {
    ShiftTuple::new(raw)
}

fn approx_of(arg: ApproxArg) -> Approximation {
    match arg {
        ApproxArg::Product => Approximation::Product,
        ApproxArg::Sieve => Approximation::Sieve,
    }
}

/// Detection and moment truncations are capped at sqrt(N); longer
/// truncations need a larger range to mean anything.
fn resolve_truncation(truncation: Option<f64>, n_base: u64, k: usize) -> Result<f64, Error> {
    let r = truncation.unwrap_or_else(|| gpy::default_r_level(n_base, k));
    let cap = (n_base as f64).sqrt();
    if r > cap {
        return Err(Error::domain(format!(
            "truncation {r} exceeds sqrt(N) = {cap:.3}; raise --n-base to explore longer sums"
        )));
    }
    Ok(r)
}

fn gpy_params(args: &GpyTupleArgs, threshold: u32) -> Result<(GpyParams, Approximation), Error> {
    let tuple = shift_tuple(args.shifts.clone())?;
    let r_level = resolve_truncation(args.truncation, args.n_base, tuple.len())?;
    Ok((
        GpyParams {
            n_base: args.n_base,
            tuple: TupleSpec::Shifts(tuple),
            ell: args.ell,
            r_level,
            threshold,
        },
        approx_of(args.approx),
    ))
}

fn detection_to_val(report: &DetectionReport) -> Val {
    let params = &report.params;
    let tuple_field = match &params.tuple {
        TupleSpec::Shifts(t) => (
            "shifts",
            Val::Arr(t.shifts().iter().map(|&h| Val::UInt(h)).collect()),
        ),
        TupleSpec::Interval { h, k } => (
            "interval",
            Val::obj(vec![("h", Val::UInt(*h)), ("k", Val::UInt(*k as u64))]),
        ),
    };
    let witnesses: Vec<Val> = report
        .witnesses
        .iter()
        .map(|w| {
            let components: Vec<Val> = w
                .components
                .iter()
                .map(|c| {
                    Val::obj(vec![
                        ("shift", Val::UInt(c.shift)),
                        ("value", Val::UInt(c.value)),
                        ("prime", Val::Bool(c.is_prime)),
                        ("prime_power", Val::Bool(c.is_prime_power)),
                    ])
                })
                .collect();
            Val::obj(vec![
                ("n", Val::UInt(w.n)),
                ("weight", Val::Float(w.weight)),
                ("nonzero_components", Val::UInt(w.nonzero_components as u64)),
                ("components", Val::Arr(components)),
            ])
        })
        .collect();
    Val::obj(vec![
        ("n_base", Val::UInt(params.n_base)),
        tuple_field,
        ("ell", Val::UInt(params.ell as u64)),
        ("truncation", Val::Float(params.r_level)),
        ("threshold", Val::UInt(params.threshold as u64)),
        ("sum_value", Val::Float(report.sum_value)),
        ("normalized", Val::Float(report.normalized)),
        ("positive", Val::Bool(report.positive)),
        ("witnesses", Val::Arr(witnesses)),
    ])
}

fn run(cli: Cli, limits: &Limits) -> Result<String, Error> {
    let format = cli.format;
    let rendered = match cli.command {
        Command::Sieve { lo, hi } => {
            let table = sieve::sieve_range(lo, hi, limits)?;
            let rows: Vec<Vec<Cell>> = table.iter_primes().map(|p| vec![Cell::UInt(p)]).collect();
            Rendered::Table {
                header: vec!["p"],
                rows,
            }
        }
        Command::Count(cmd) => Rendered::Scalar(Val::UInt(match cmd {
            CountCommand::Pi { x } => sieve::prime_count(x, limits)?,
            CountCommand::Pi2 { x } => sieve::twin_count(x, limits)?,
            CountCommand::Tuple { x, shifts } => {
                sieve::tuple_count(x, &shift_tuple(shifts)?, limits)?
            }
            CountCommand::Ap { x, q, a } => sieve::prime_count_ap(x, q, a, limits)?,
            CountCommand::Nth { n } => sieve::nth_prime(n, limits)?,
        })),
        Command::Gaps { lo, hi, summary } => {
            let (records, s) = sieve::gap_statistics(lo, hi, limits)?;
            if summary {
                Rendered::Record(Val::obj(vec![
                    ("lo", Val::UInt(lo)),
                    ("hi", Val::UInt(hi)),
                    ("primes_in_range", Val::UInt(s.primes_in_range)),
                    ("min_normalized_gap", Val::Float(s.min_normalized_gap)),
                    ("mean_gap", Val::Float(s.mean_gap)),
                ]))
            } else {
                let rows: Vec<Vec<Cell>> = records
                    .iter()
                    .map(|r| {
                        vec![
                            Cell::UInt(r.index),
                            Cell::UInt(r.prime),
                            Cell::UInt(r.next_prime),
                            Cell::UInt(r.next_prime - r.prime),
                            Cell::Float(r.normalized_gap),
                        ]
                    })
                    .collect();
                Rendered::Table {
                    header: vec!["index", "p", "p_next", "gap", "normalized_gap"],
                    rows,
                }
            }
        }
        Command::Analytic(cmd) => run_analytic(cmd, limits)?,
        Command::Arith(cmd) => run_arith(cmd, limits)?,
        Command::Tuples(cmd) => run_tuples(cmd, limits)?,
        Command::Constants(ConstantsCommand::Twin { cutoff }) => {
            let value = tuples::twin_prime_constant(cutoff, limits)?;
            Rendered::Record(Val::obj(vec![
                ("cutoff", Val::UInt(cutoff)),
                ("value", Val::Float(value)),
            ]))
        }
        Command::Gpy(cmd) => run_gpy(cmd, limits)?,
        Command::Bv(cmd) => run_bv(cmd, limits)?,
        Command::Figure { id, resolution } => {
            let s = series::figure_series(id, resolution, limits)?;
            let mut header = vec!["x"];
            header.extend(s.columns.iter().map(|(name, _)| column_name(name)));
            let rows: Vec<Vec<Cell>> = (0..s.len())
                .map(|i| {
                    let mut row = vec![Cell::UInt(s.x_grid[i])];
                    row.extend(s.columns.iter().map(|(_, col)| Cell::Float(col[i])));
                    row
                })
                .collect();
            Rendered::Table { header, rows }
        }
        Command::Euclid { primes } => {
            let (n, new_primes) = arith::euclid_step(&primes)?;
            Rendered::Record(Val::obj(vec![
                ("n", Val::UInt(n)),
                (
                    "new_primes",
                    Val::Arr(new_primes.into_iter().map(Val::UInt).collect()),
                ),
            ]))
        }
    };
    Ok(finish(rendered, format))
}

/// The series column names form a fixed set.
fn column_name(name: &str) -> &'static str {
    match name {
        "pi" => "pi",
        "pi2" => "pi2",
        "li" => "li",
        "li2" => "li2",
        "x_over_log" => "x_over_log",
        "x_over_log2" => "x_over_log2",
        "scaled_li2" => "scaled_li2",
        other => unreachable!("unknown series column {other}"),
    }
}

fn quadrature_record(x: f64, result: analytic::QuadratureResult) -> Val {
    Val::obj(vec![
        ("x", Val::Float(x)),
        ("value", Val::Float(result.value)),
        ("abs_error_estimate", Val::Float(result.abs_error_estimate)),
        ("evaluations", Val::UInt(result.evaluations)),
    ])
}

fn run_analytic(cmd: AnalyticCommand, limits: &Limits) -> Result<Rendered, Error> {
    Ok(match cmd {
        AnalyticCommand::Li { x, tol } => {
            let r = match tol {
                Some(tol) => analytic::li(x, tol)?,
                None => analytic::li_auto(x)?,
            };
            Rendered::Record(quadrature_record(x, r))
        }
        AnalyticCommand::Lik { x, k, tol } => {
            let r = match tol {
                Some(tol) => analytic::li_k(x, k, tol)?,
                None => analytic::li_k_auto(x, k)?,
            };
            Rendered::Record(quadrature_record(x, r))
        }
        AnalyticCommand::Series { x, terms } => {
            Rendered::Scalar(Val::Float(analytic::li_asymptotic(x, terms)?))
        }
        AnalyticCommand::Mertens { limit } => {
            let real = analytic::mertens_product_real(limit, limits)?;
            let (exact, exact_error) = if limit <= analytic::MERTENS_EXACT_MAX {
                match analytic::mertens_product_exact(limit) {
                    Ok(r) => (Val::Str(r.to_string()), Val::Null),
                    Err(e) => (Val::Null, Val::Str(e.to_string())),
                }
            } else {
                (Val::Null, Val::Str("exact form capped at 10^6".into()))
            };
            Rendered::Record(Val::obj(vec![
                ("limit", Val::UInt(limit)),
                ("exact", exact),
                ("exact_error", exact_error),
                ("real", Val::Float(real)),
            ]))
        }
        AnalyticCommand::MobiusSum { n, primorial } => match (n, primorial) {
            (Some(n), None) => {
                Rendered::Scalar(Val::Float(analytic::mobius_partial_sum(n, limits)?))
            }
            (None, Some(p)) => {
                let sum = analytic::mobius_divisor_sum(p)?;
                Rendered::Record(Val::obj(vec![
                    ("primorial_limit", Val::UInt(p)),
                    ("sum", Val::Str(sum.to_string())),
                ]))
            }
            _ => return Err(Error::domain("pass exactly one of --n or --primorial")),
        },
        AnalyticCommand::Harmonic { n } => Rendered::Scalar(Val::Float(analytic::harmonic_sum(n))),
        AnalyticCommand::Brun { x, variant } => {
            let v = match variant {
                BrunArg::Distinct => BrunVariant::DistinctMembers,
                BrunArg::Pairs => BrunVariant::PairSum,
            };
            Rendered::Scalar(Val::Float(analytic::brun_partial_sum(x, v, limits)?))
        }
        AnalyticCommand::EulerProduct { z, primes, terms } => {
            let (sum_side, product_side) = analytic::euler_product_check(z, primes, terms)?;
            Rendered::Record(Val::obj(vec![
                ("z", Val::Float(z)),
                ("prime_limit", Val::UInt(primes)),
                ("term_limit", Val::UInt(terms)),
                ("sum_side", Val::Float(sum_side)),
                ("product_side", Val::Float(product_side)),
                ("difference", Val::Float(sum_side - product_side)),
            ]))
        }
    })
}

fn run_arith(cmd: ArithCommand, limits: &Limits) -> Result<Rendered, Error> {
    Ok(match cmd {
        ArithCommand::Factor { n } => {
            let f = arith::factorize(n)?;
            let factors: Vec<Val> = f
                .factors
                .iter()
                .map(|&(p, e)| Val::Arr(vec![Val::UInt(p), Val::UInt(e as u64)]))
                .collect();
            Rendered::Record(Val::obj(vec![
                ("n", Val::UInt(n)),
                ("factors", Val::Arr(factors)),
            ]))
        }
        ArithCommand::Mobius { n } => Rendered::Scalar(Val::Int(arith::mobius(n)? as i64)),
        ArithCommand::Phi { q } => Rendered::Scalar(Val::UInt(arith::euler_phi(q)?)),
        ArithCommand::Lambda { n } => Rendered::Scalar(Val::Float(arith::von_mangoldt(n)?)),
        ArithCommand::LambdaK { n, k } => {
            Rendered::Scalar(Val::Float(arith::generalized_von_mangoldt(n, k, limits)?))
        }
    })
}

fn run_tuples(cmd: TuplesCommand, limits: &Limits) -> Result<Rendered, Error> {
    Ok(match cmd {
        TuplesCommand::Nu { shifts, p } => {
            Rendered::Scalar(Val::UInt(tuples::nu_p(&shift_tuple(shifts)?, p)?))
        }
        TuplesCommand::Admissible { shifts } => {
            let tuple = shift_tuple(shifts)?;
            let admissible = tuples::is_admissible(&tuple);
            let reason = if admissible {
                Val::Null
            } else {
                Val::Str(covering_reason(&tuple))
            };
            Rendered::Record(Val::obj(vec![
                ("admissible", Val::Bool(admissible)),
                ("reason", reason),
            ]))
        }
        TuplesCommand::Singular { shifts, cutoff } => {
            let ss = tuples::singular_series(&shift_tuple(shifts)?, cutoff, limits)?;
            Rendered::Record(Val::obj(vec![
                ("value", Val::Float(ss.value)),
                ("cutoff", Val::UInt(ss.cutoff)),
                ("tail_bound", Val::Float(ss.tail_bound)),
                ("admissible", Val::Bool(ss.admissible)),
            ]))
        }
        TuplesCommand::Narrowest { k, max_diameter } => {
            match tuples::narrowest_admissible(k, max_diameter)? {
                Some(t) => Rendered::Record(Val::obj(vec![
                    ("k", Val::UInt(k as u64)),
                    ("found", Val::Bool(true)),
                    (
                        "shifts",
                        Val::Arr(t.shifts().iter().map(|&h| Val::UInt(h)).collect()),
                    ),
                    ("diameter", Val::UInt(t.diameter())),
                ])),
                None => Rendered::Record(Val::obj(vec![
                    ("k", Val::UInt(k as u64)),
                    ("found", Val::Bool(false)),
                    ("shifts", Val::Null),
                    ("diameter", Val::Null),
                ])),
            }
        }
        TuplesCommand::Predict { shifts, x, cutoff } => {
            let tuple = shift_tuple(shifts)?;
            let p = tuples::prediction(x, &tuple, cutoff, limits)?;
            Rendered::Record(Val::obj(vec![
                ("x", Val::Float(x)),
                (
                    "shifts",
                    Val::Arr(tuple.shifts().iter().map(|&h| Val::UInt(h)).collect()),
                ),
                ("cutoff", Val::UInt(cutoff)),
                ("admissible", Val::Bool(p.admissible)),
                ("singular_series", Val::Float(p.singular_series)),
                ("li_k", Val::Float(p.li_k)),
                ("value", Val::Float(p.value)),
            ]))
        }
    })
}

/// Names the first prime whose residue classes the tuple covers.
fn covering_reason(tuple: &ShiftTuple) -> String {
    for p in 2..=tuple.len() as u64 {
        if sieve::is_prime(p) && tuples::nu_p(tuple, p).unwrap_or(0) == p {
            return format!("p={p} covers all residues");
        }
    }
    "not admissible".to_string()
}

fn run_gpy(cmd: GpyCommand, limits: &Limits) -> Result<Rendered, Error> {
    Ok(match cmd {
        GpyCommand::Poly { n, shifts } => {
            let value = gpy::tuple_polynomial(n, &shift_tuple(shifts)?)?;
            if value <= u64::MAX as u128 {
                Rendered::Scalar(Val::UInt(value as u64))
            } else {
                // JSON numbers cap at 64 bits of precision; wider products
                // are emitted as strings
                Rendered::Scalar(Val::Str(value.to_string()))
            }
        }
        GpyCommand::Lambda { n, truncation } => {
            Rendered::Scalar(Val::Float(gpy::lambda_r(n, truncation)?))
        }
        GpyCommand::LambdaTuple {
            n,
            shifts,
            truncation,
        } => Rendered::Scalar(Val::Float(gpy::lambda_r_product(
            n,
            &shift_tuple(shifts)?,
            truncation,
        )?)),
        GpyCommand::LambdaSieve {
            n,
            shifts,
            ell,
            truncation,
        } => Rendered::Scalar(Val::Float(gpy::lambda_r_sieve(
            n,
            &shift_tuple(shifts)?,
            ell,
            truncation,
            limits,
        )?)),
        GpyCommand::Moment1(args) => {
            let (params, approx) = gpy_params(&args, 1)?;
            Rendered::Scalar(Val::Float(gpy::first_moment(&params, approx, limits)?))
        }
        GpyCommand::Moment2 { args, h0 } => {
            let (params, approx) = gpy_params(&args, 1)?;
            Rendered::Scalar(Val::Float(gpy::second_moment(&params, h0, approx, limits)?))
        }
        GpyCommand::Detect { args, r_threshold } => {
            let (params, approx) = gpy_params(&args, r_threshold)?;
            let report = gpy::detection_sum(&params, approx, limits)?;
            Rendered::Record(detection_to_val(&report))
        }
        GpyCommand::DetectInterval {
            n_base,
            h,
            k,
            ell,
            truncation,
            r_threshold,
        } => {
            let r_level = resolve_truncation(truncation, n_base, k)?;
            let report =
                gpy::detection_sum_interval(n_base, h, k, ell, r_level, r_threshold, limits)?;
            Rendered::Record(detection_to_val(&report))
        }
    })
}

fn run_bv(cmd: BvCommand, limits: &Limits) -> Result<Rendered, Error> {
    Ok(match cmd {
        BvCommand::Expected { x, q } => {
            Rendered::Scalar(Val::Float(progressions::ap_expected(x, q)?))
        }
        BvCommand::Sum { x, q_max } => {
            let b = progressions::bv_sum(x, q_max, limits)?;
            let records: Vec<Val> = b
                .records
                .iter()
                .map(|r| {
                    Val::obj(vec![
                        ("q", Val::UInt(r.q)),
                        ("worst_a", Val::UInt(r.worst_a)),
                        ("error", Val::Float(r.error)),
                    ])
                })
                .collect();
            Rendered::Record(Val::obj(vec![
                ("x", Val::UInt(b.x)),
                ("q_max", Val::UInt(b.q_max)),
                ("li", Val::Float(b.li_x)),
                ("total", Val::Float(b.total)),
                ("records", Val::Arr(records)),
            ]))
        }
        BvCommand::Probe { x, thetas } => {
            let rows = progressions::level_probe(x, &thetas, limits)?;
            let table: Vec<Vec<Cell>> = rows
                .iter()
                .map(|r| {
                    vec![
                        Cell::Float(r.theta),
                        Cell::UInt(r.q_max),
                        Cell::Float(r.total),
                        Cell::Float(r.normalized),
                    ]
                })
                .collect();
            Rendered::Table {
                header: vec!["theta", "q_max", "total", "normalized"],
                rows: table,
            }
        }
    })
}
