use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use laguerre_markov::bessel::{alpha_star, asymptotic_constant, cor14_report, estimate_c_numeric, UpperBranch};
use laguerre_markov::bounds::{bounds_report, BoundKind};
use laguerre_markov::matrix::MarkovMatrix;
use laguerre_markov::quadrature::{extremal_from_eigenvector, rayleigh_quotient};
use laguerre_markov::report::{fmt17, write_records, OutputFormat, Tabular};
use laguerre_markov::spectral::{default_max_iter, mu_max_power, DEFAULT_TOL};
use laguerre_markov::verify::{
    run_suite, verify_cor13, verify_integral_lemma, GridSpec, Suite, SweepReport, DEFAULT_EPS,
};
use laguerre_markov::{Alpha, Error};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

/// Best constants of the Markov inequality in the Laguerre-weighted L2 norm.
#[derive(Debug, Parser)]
#[command(name = "laguerre-markov", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// c_n(α) from the largest eigenvalue of A_n.
    Compute {
        #[command(flatten)]
        point: Point,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Power-iteration budget; defaults to 200·n.
        #[arg(long, value_parser = positive)]
        max_iter: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Every closed-form bound on c_n(α)², optionally against the computed value.
    Bounds {
        #[command(flatten)]
        point: Point,
        /// Attach the computed c² and check the sandwich.
        #[arg(long)]
        computed: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Grid sweep of one suite; exits 1 if any case fails.
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long, value_parser = positive)]
        n_min: Option<usize>,
        #[arg(long, value_parser = positive)]
        n_max: Option<usize>,
        /// Comma-separated α values.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_alpha)]
        alpha_list: Option<Vec<Alpha>>,
        /// Drop grid values below this α.
        #[arg(long, allow_hyphen_values = true)]
        alpha_min: Option<f64>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Random trials for integral_lemma.
        #[arg(long, default_value_t = 100, value_parser = positive)]
        trials: usize,
        #[command(flatten)]
        output: Output,
    },
    /// c(α) from the Bessel zero, its two-sided bounds, and a numeric extrapolation.
    Asymptotic {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_alpha)]
        alpha: Alpha,
        /// Largest n used in the extrapolation (samples at n/4, n/2, n).
        #[arg(long, default_value_t = 2000, value_parser = positive)]
        n_max: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Dump the entries of A_n.
    Matrix {
        #[command(flatten)]
        point: Point,
        #[command(flatten)]
        output: Output,
    },
    /// Laguerre coefficients of the extremal polynomial.
    Extremal {
        #[command(flatten)]
        point: Point,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Args)]
struct Point {
    #[arg(long, value_parser = positive)]
    n: usize,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_alpha)]
    alpha: Alpha,
}

#[derive(Debug, Args)]
struct Output {
    /// csv, json or pretty-table.
    #[arg(long, default_value_t = OutputFormat::PrettyTable, value_parser = parse_format)]
    format: OutputFormat,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Output {
    fn sink(&self) -> Result<Box<dyn Write>, Error> {
        Ok(match &self.out {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }

    fn emit<T: Tabular + Serialize>(&self, records: &[T]) -> Result<(), Error> {
        let mut sink = self.sink()?;
        write_records(records, self.format, &mut sink)?;
        sink.flush()?;
        Ok(())
    }
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_alpha(s: &str) -> Result<Alpha, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    Alpha::new(v).map_err(|e| e.to_string())
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Serialize)]
struct ComputeRecord {
    n: usize,
    alpha: f64,
    c: f64,
    c_sq: f64,
    residual: f64,
    iterations: usize,
}

impl Tabular for ComputeRecord {
    fn headers() -> &'static [&'static str] {
        &["n", "alpha", "c", "c_sq", "residual", "iterations"]
    }
    fn cells(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            fmt17(self.alpha),
            fmt17(self.c),
            fmt17(self.c_sq),
            fmt17(self.residual),
            self.iterations.to_string(),
        ]
    }
}

#[derive(Serialize)]
struct BoundRecord {
    n: usize,
    alpha: f64,
    id: &'static str,
    kind: &'static str,
    value: f64,
    applicable: bool,
    hypothesis: &'static str,
    computed_c_sq: Option<f64>,
    holds: Option<bool>,
}

fn opt_cell<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl Tabular for BoundRecord {
    fn headers() -> &'static [&'static str] {
        &[
            "n",
            "alpha",
            "id",
            "kind",
            "value",
            "applicable",
            "hypothesis",
            "computed_c_sq",
            "holds",
        ]
    }
    fn cells(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            fmt17(self.alpha),
            self.id.to_string(),
            self.kind.to_string(),
            fmt17(self.value),
            self.applicable.to_string(),
            self.hypothesis.to_string(),
            self.computed_c_sq.map(fmt17).unwrap_or_default(),
            opt_cell(self.holds),
        ]
    }
}

#[derive(Serialize)]
struct AsymptoticRecord {
    alpha: f64,
    c_bessel: f64,
    c_numeric: f64,
    relative_difference: f64,
    n_max: usize,
    cor14_lower: f64,
    cor14_upper: f64,
    cor14_ratio: f64,
    c_sq_inside: bool,
    branch: &'static str,
    cube_root_upper: f64,
    quadratic_upper: f64,
    alpha_star: f64,
}

impl Tabular for AsymptoticRecord {
    fn headers() -> &'static [&'static str] {
        &[
            "alpha",
            "c_bessel",
            "c_numeric",
            "relative_difference",
            "n_max",
            "cor14_lower",
            "cor14_upper",
            "cor14_ratio",
            "c_sq_inside",
            "branch",
            "cube_root_upper",
            "quadratic_upper",
            "alpha_star",
        ]
    }
    fn cells(&self) -> Vec<String> {
        vec![
            fmt17(self.alpha),
            fmt17(self.c_bessel),
            fmt17(self.c_numeric),
            fmt17(self.relative_difference),
            self.n_max.to_string(),
            fmt17(self.cor14_lower),
            fmt17(self.cor14_upper),
            fmt17(self.cor14_ratio),
            self.c_sq_inside.to_string(),
            self.branch.to_string(),
            fmt17(self.cube_root_upper),
            fmt17(self.quadratic_upper),
            fmt17(self.alpha_star),
        ]
    }
}

#[derive(Serialize)]
struct MatrixEntry {
    row: usize,
    col: usize,
    value: f64,
}

impl Tabular for MatrixEntry {
    fn headers() -> &'static [&'static str] {
        &["row", "col", "value"]
    }
    fn cells(&self) -> Vec<String> {
        vec![self.row.to_string(), self.col.to_string(), fmt17(self.value)]
    }
}

#[derive(Serialize)]
struct CoefficientRecord {
    nu: usize,
    coefficient: f64,
}

impl Tabular for CoefficientRecord {
    fn headers() -> &'static [&'static str] {
        &["nu", "coefficient"]
    }
    fn cells(&self) -> Vec<String> {
        vec![self.nu.to_string(), fmt17(self.coefficient)]
    }
}

/// Outcome of a command that ran to completion.
enum Status {
    Ok,
    VerificationFailed,
}

fn run(cmd: Command) -> Result<Status, Error> {
    match cmd {
        Command::Compute {
            point,
            tol,
            max_iter,
            output,
        } => {
            let a = MarkovMatrix::build(point.n, point.alpha)?;
            let r = mu_max_power(&a, tol, max_iter.unwrap_or_else(|| default_max_iter(point.n)))?;
            output.emit(&[ComputeRecord {
                n: point.n,
                alpha: point.alpha.get(),
                c: r.mu_max.sqrt(),
                c_sq: r.mu_max,
                residual: r.residual,
                iterations: r.iterations,
            }])?;
            Ok(Status::Ok)
        }
        Command::Bounds {
            point,
            computed,
            output,
        } => {
            let rep = bounds_report(point.n, point.alpha, computed)?;
            let rows: Vec<BoundRecord> = rep
                .entries
                .iter()
                .map(|e| BoundRecord {
                    n: rep.n,
                    alpha: rep.alpha.get(),
                    id: e.id.as_str(),
                    kind: match e.kind {
                        BoundKind::Lower => "lower",
                        BoundKind::Upper => "upper",
                        BoundKind::Exact => "exact",
                    },
                    value: e.value,
                    applicable: e.applicable,
                    hypothesis: e.hypothesis,
                    computed_c_sq: rep.computed_c_sq,
                    holds: e.holds,
                })
                .collect();
            output.emit(&rows)?;
            for v in &rep.violations {
                eprintln!("violation: {v}");
            }
            Ok(if rep.sandwich_holds() {
                Status::Ok
            } else {
                Status::VerificationFailed
            })
        }
        Command::Verify {
            suite,
            n_min,
            n_max,
            alpha_list,
            alpha_min,
            seed,
            trials,
            output,
        } => {
            let suite: Suite = suite.parse()?;
            let report = sweep(suite, n_min, n_max, alpha_list, alpha_min, seed, trials)?;
            output.emit(&report.cases)?;
            for c in report.failures() {
                eprintln!(
                    "FAIL {} n={} alpha={} margin={:e} {}",
                    c.suite, c.n, c.alpha, c.margin, c.detail
                );
            }
            eprintln!(
                "{}: {} cases, {} skipped, worst margin {:e}, {}",
                report.suite,
                report.cases.len(),
                report.skipped,
                report.worst_margin,
                if report.all_pass { "all pass" } else { "FAILED" }
            );
            Ok(if report.all_pass {
                Status::Ok
            } else {
                Status::VerificationFailed
            })
        }
        Command::Asymptotic { alpha, n_max, output } => {
            if n_max < 12 {
                return Err(Error::InvalidArgument("--n-max must be at least 12".into()));
            }
            let c = asymptotic_constant(alpha)?;
            let est = estimate_c_numeric(alpha, &[n_max / 4, n_max / 2, n_max])?;
            let cor = cor14_report(alpha);
            let c_sq = c * c;
            output.emit(&[AsymptoticRecord {
                alpha: alpha.get(),
                c_bessel: c,
                c_numeric: est.value,
                relative_difference: (est.value - c).abs() / c,
                n_max,
                cor14_lower: cor.lower,
                cor14_upper: cor.upper,
                cor14_ratio: cor.ratio,
                c_sq_inside: cor.lower < c_sq && c_sq < cor.upper,
                branch: match cor.branch {
                    UpperBranch::CubeRoot => "cube_root",
                    UpperBranch::Quadratic => "quadratic",
                },
                cube_root_upper: cor.cube_root_upper,
                quadratic_upper: cor.quadratic_upper,
                alpha_star: alpha_star()?,
            }])?;
            Ok(Status::Ok)
        }
        Command::Matrix { point, output } => {
            let a = MarkovMatrix::build(point.n, point.alpha)?;
            if output.format == OutputFormat::Csv {
                let mut sink = output.sink()?;
                a.write_csv(&mut sink)?;
                sink.flush()?;
            } else {
                let n = point.n;
                let rows: Vec<MatrixEntry> = (1..=n)
                    .flat_map(|k| (1..=n).map(move |i| (k, i)))
                    .map(|(k, i)| MatrixEntry {
                        row: k,
                        col: i,
                        value: a.get(k, i),
                    })
                    .collect();
                output.emit(&rows)?;
            }
            Ok(Status::Ok)
        }
        Command::Extremal { point, tol, output } => {
            let a = MarkovMatrix::build(point.n, point.alpha)?;
            let r = mu_max_power(&a, tol, default_max_iter(point.n))?;
            let p = extremal_from_eigenvector(&r, point.alpha);
            let rows: Vec<CoefficientRecord> = p
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| CoefficientRecord {
                    nu: i + 1,
                    coefficient: c,
                })
                .collect();
            output.emit(&rows)?;
            if let Ok(q) = rayleigh_quotient(&p, None) {
                eprintln!("rayleigh quotient {} vs mu_max {}", fmt17(q), fmt17(r.mu_max));
            }
            Ok(Status::Ok)
        }
    }
}

fn sweep(
    suite: Suite,
    n_min: Option<usize>,
    n_max: Option<usize>,
    alpha_list: Option<Vec<Alpha>>,
    alpha_min: Option<f64>,
    seed: u64,
    trials: usize,
) -> Result<SweepReport, Error> {
    if suite == Suite::IntegralLemma {
        return verify_integral_lemma(trials, seed);
    }
    let defaults = suite.default_n_values();
    let lo = n_min.unwrap_or(defaults[0]);
    let hi = n_max.unwrap_or(*defaults.last().expect("non-empty defaults"));
    if lo > hi {
        return Err(Error::InvalidArgument(format!("--n-min {lo} exceeds --n-max {hi}")));
    }
    let mut alphas: Vec<f64> = match alpha_list {
        Some(list) => list.into_iter().map(Alpha::get).collect(),
        None => suite.default_alpha_values(),
    };
    if let Some(m) = alpha_min {
        alphas.retain(|&a| a >= m);
    }
    if suite == Suite::Cor13 {
        let big: Vec<f64> = alphas.into_iter().filter(|&a| a >= 100.0).collect();
        return verify_cor13(hi, &DEFAULT_EPS, &big);
    }
    run_suite(&GridSpec::new(suite, (lo..=hi).collect(), &alphas)?)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::VerificationFailed) => ExitCode::from(EXIT_VERIFY_FAILED),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_USAGE })
        }
    }
}
