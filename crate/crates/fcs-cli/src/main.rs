//! Command-line surface: build cosine models, evaluate them, solve
//! percentiles, reproduce the embedded reference tables, run Monte Carlo
//! validation, and emit plot-ready histogram data.
//!
//! Exit codes: 0 success/pass, 1 comparison failure, 2 usage error,
//! 3 numerical or I/O error.

use std::io::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use fcs_core::exact_dists::{geary_consistency, skewness_support, uniform_sum_coeff_exact};
use fcs_core::moments::Family;
use fcs_core::montecarlo::{histogram, ks_distance, sample_skewness, sample_uniform_sum};
use fcs_core::series::{build_model, default_truncation, FourierCosineModel, TruncationSpec};
use fcs_core::tables::reproduce_table;

const SCHEMA: &str = "fcs-output/1";

#[derive(Parser)]
#[command(name = "fcs", version, about = "Fourier cosine series distribution models")]
struct Cli {
    /// Working precision for coefficient evaluation, in bits.
    #[arg(long, global = true, default_value_t = 320)]
    precision_bits: usize,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Printed decimal digits.
    #[arg(long, global = true, default_value_t = 6)]
    decimals: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Dist {
    UniformSum,
    Skewness,
}

impl Dist {
    fn family(self) -> Family {
        match self {
            Dist::UniformSum => Family::UniformSum,
            Dist::Skewness => Family::NormalSkewness,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Which {
    Pdf,
    Cdf,
    Tail,
}

#[derive(Args)]
struct ModelArgs {
    /// Statistic family.
    #[arg(long, value_enum)]
    dist: Dist,
    /// Sample size.
    #[arg(short = 'n', long)]
    n: u64,
    /// Cosine harmonics (default: the shipped configuration for n).
    #[arg(short = 'K', long)]
    harmonics: Option<usize>,
    /// Moment-series truncation order (default: the shipped configuration).
    #[arg(short = 'J', long)]
    terms: Option<usize>,
}

impl ModelArgs {
    fn truncation(&self) -> TruncationSpec {
        let d = default_truncation(self.dist.family(), self.n);
        TruncationSpec::new(self.harmonics.unwrap_or(d.k), self.terms.unwrap_or(d.j))
    }

    fn model(&self, bits: usize) -> fcs_core::Result<FourierCosineModel> {
        build_model(self.dist.family(), self.n, self.truncation(), bits)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print model coefficients, optionally against the exact values.
    Coeffs {
        #[command(flatten)]
        model: ModelArgs,
        /// Add exact-coefficient and difference columns (uniform-sum only).
        #[arg(long)]
        exact: bool,
    },
    /// Evaluate pdf, cdf, or upper tail at a point or over a grid.
    Eval {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum)]
        which: Which,
        /// Single evaluation point.
        #[arg(long, conflicts_with = "grid", allow_hyphen_values = true)]
        x: Option<f64>,
        /// Grid as start:stop:steps.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        /// Clip negative truncated-series density values to zero.
        #[arg(long)]
        clip: bool,
    },
    /// Solve percentiles for one or more probability levels.
    Percentile {
        #[command(flatten)]
        model: ModelArgs,
        /// Comma-separated probability levels in (0, 1).
        #[arg(long, value_delimiter = ',', required = true)]
        alpha: Vec<f64>,
    },
    /// Recompute a reference table and report per-cell deviations.
    Reproduce {
        /// Table id, 1-9.
        #[arg(long)]
        table: u8,
    },
    /// Sample the statistic, write a histogram CSV, and report KS distance.
    Mc {
        #[command(flatten)]
        model: ModelArgs,
        /// Number of replications.
        #[arg(short = 'N', long)]
        replications: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 80)]
        bins: usize,
        /// Histogram CSV path (bin center, density height, model pdf).
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Check the skewness density recurrence against the next model.
    CheckGeary {
        /// Sample size of the target model (needs n >= 6).
        #[arg(short = 'n', long)]
        n: u64,
        #[arg(long, default_value_t = 101)]
        grid_points: usize,
        /// Quadrature points per panel.
        #[arg(long, default_value_t = 256)]
        quad_points: usize,
    },
}

/// One output table plus the parameters that produced it.
struct OutputRecord {
    command: &'static str,
    params: Value,
    header: Vec<&'static str>,
    rows: Vec<Vec<Value>>,
}

fn fmt_cell(v: &Value, decimals: usize) -> String {
    match v {
        Value::Number(n) => {
            let x = n.as_f64().unwrap();
            if n.is_u64() || n.is_i64() {
                n.to_string()
            } else if x != 0.0 && x.abs() < 1e-3 {
                format!("{x:.decimals$e}")
            } else {
                format!("{x:.decimals$}")
            }
        }
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn emit(record: &OutputRecord, format: Format, decimals: usize) {
    match format {
        Format::Csv => {
            println!("{}", record.header.join(","));
            for row in &record.rows {
                let line: Vec<String> = row.iter().map(|v| fmt_cell(v, decimals)).collect();
                println!("{}", line.join(","));
            }
        }
        Format::Json => {
            let results: Vec<Value> = record
                .rows
                .iter()
                .map(|row| {
                    Value::Object(
                        record
                            .header
                            .iter()
                            .zip(row)
                            .map(|(k, v)| ((*k).to_string(), v.clone()))
                            .collect(),
                    )
                })
                .collect();
            let out = json!({
                "schema": SCHEMA,
                "command": record.command,
                "params": record.params,
                "results": results,
            });
            println!("{out}");
        }
    }
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn numerical_error(err: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(3)
}

fn support_halfwidth(dist: Dist, n: u64) -> fcs_core::Result<f64> {
    Ok(match dist {
        Dist::UniformSum => n as f64 / 2.0,
        Dist::Skewness => skewness_support(n)?.a(),
    })
}

fn parse_grid(spec: &str) -> Option<(f64, f64, usize)> {
    let mut it = spec.split(':');
    let a = it.next()?.parse().ok()?;
    let b = it.next()?.parse().ok()?;
    let steps: usize = it.next()?.parse().ok()?;
    if it.next().is_some() || steps < 1 || b < a {
        return None;
    }
    Some((a, b, steps))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let bits = cli.precision_bits;

    match &cli.command {
        Command::Coeffs { model, exact } => {
            if *exact && model.dist != Dist::UniformSum {
                return usage_error("--exact requires --dist uniform-sum (no closed form exists for skewness)");
            }
            let trunc = model.truncation();
            let m = match model.model(bits) {
                Ok(m) => m,
                Err(e) => return numerical_error(e),
            };
            let mut rows = Vec::new();
            for (k, &c) in m.coeffs.iter().enumerate() {
                let mut row = vec![json!(k as u64), json!(c)];
                if *exact {
                    let a = uniform_sum_coeff_exact(model.n, k as u64);
                    row.push(json!(a));
                    row.push(json!((c - a).abs()));
                }
                rows.push(row);
            }
            let header = if *exact {
                vec!["k", "a_hat", "a_exact", "abs_diff"]
            } else {
                vec!["k", "a_hat"]
            };
            emit(
                &OutputRecord {
                    command: "coeffs",
                    params: json!({"dist": dist_name(model.dist), "n": model.n,
                                   "K": trunc.k, "J": trunc.j, "exact": exact,
                                   "precision_bits": bits}),
                    header,
                    rows,
                },
                cli.format,
                cli.decimals,
            );
            ExitCode::SUCCESS
        }
        Command::Eval {
            model,
            which,
            x,
            grid,
            clip,
        } => {
            let a = match support_halfwidth(model.dist, model.n) {
                Ok(a) => a,
                Err(e) => return numerical_error(e),
            };
            let points: Vec<f64> = match (x, grid) {
                (Some(x), None) => vec![*x],
                (None, Some(g)) => {
                    let Some((lo, hi, steps)) = parse_grid(g) else {
                        return usage_error("--grid must be start:stop:steps with stop >= start");
                    };
                    if lo < -a - 1.0 || hi > a + 1.0 {
                        return usage_error("grid bounds must lie within [-A-1, A+1]");
                    }
                    (0..=steps)
                        .map(|i| lo + (hi - lo) * i as f64 / steps as f64)
                        .collect()
                }
                _ => return usage_error("exactly one of --x or --grid is required"),
            };
            let m = match model.model(bits) {
                Ok(m) => m,
                Err(e) => return numerical_error(e),
            };
            let rows = points
                .iter()
                .map(|&x| {
                    let v = match which {
                        Which::Pdf => {
                            let p = m.pdf_eval(x);
                            if *clip {
                                p.max(0.0)
                            } else {
                                p
                            }
                        }
                        Which::Cdf => m.cdf_eval(x),
                        Which::Tail => m.tail_prob(x),
                    };
                    vec![json!(x), json!(v)]
                })
                .collect();
            let trunc = model.truncation();
            emit(
                &OutputRecord {
                    command: "eval",
                    params: json!({"dist": dist_name(model.dist), "n": model.n,
                                   "K": trunc.k, "J": trunc.j,
                                   "which": which_name(*which), "clip": clip,
                                   "precision_bits": bits}),
                    header: vec!["x", "value"],
                    rows,
                },
                cli.format,
                cli.decimals,
            );
            ExitCode::SUCCESS
        }
        Command::Percentile { model, alpha } => {
            if alpha.iter().any(|&a| !(0.0 < a && a < 1.0)) {
                return usage_error("every alpha must lie strictly inside (0, 1)");
            }
            let m = match model.model(bits) {
                Ok(m) => m,
                Err(e) => return numerical_error(e),
            };
            let rows = alpha
                .iter()
                .map(|&a| vec![json!(a), json!(m.percentile(a, 1e-12))])
                .collect();
            let trunc = model.truncation();
            emit(
                &OutputRecord {
                    command: "percentile",
                    params: json!({"dist": dist_name(model.dist), "n": model.n,
                                   "K": trunc.k, "J": trunc.j, "precision_bits": bits}),
                    header: vec!["alpha", "x_alpha"],
                    rows,
                },
                cli.format,
                cli.decimals,
            );
            ExitCode::SUCCESS
        }
        Command::Reproduce { table } => {
            let report = match reproduce_table(*table, bits) {
                Ok(r) => r,
                Err(fcs_core::Error::InvalidArgument(msg)) => return usage_error(msg),
                Err(e) => return numerical_error(e),
            };
            let rows = report
                .cells
                .iter()
                .map(|c| {
                    vec![
                        json!(c.row),
                        json!(c.col),
                        json!(c.computed),
                        json!(c.reference),
                        json!(c.abs_diff),
                        json!(c.tolerance),
                        json!(c.pass),
                    ]
                })
                .collect();
            emit(
                &OutputRecord {
                    command: "reproduce",
                    params: json!({"table": table, "caption": report.caption,
                                   "max_diff": report.max_diff, "pass": report.pass,
                                   "precision_bits": bits}),
                    header: vec!["row", "col", "computed", "reference", "abs_diff", "tolerance", "pass"],
                    rows,
                },
                cli.format,
                cli.decimals,
            );
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::Mc {
            model,
            replications,
            seed,
            bins,
            out,
        } => {
            if *replications < 100 {
                return usage_error("mc requires at least 100 replications");
            }
            let batch = match model.dist {
                Dist::UniformSum => sample_uniform_sum(model.n, *replications, *seed),
                Dist::Skewness => sample_skewness(model.n, *replications, *seed),
            };
            let batch = match batch {
                Ok(b) => b,
                Err(e) => return numerical_error(e),
            };
            let m = match model.model(bits) {
                Ok(m) => m,
                Err(e) => return numerical_error(e),
            };
            let h = match histogram(&batch, *bins) {
                Ok(h) => h,
                Err(e) => return numerical_error(e),
            };
            if let Some(path) = out {
                let mut csv = String::from("bin_center,density,model_pdf\n");
                for (i, &height) in h.heights.iter().enumerate() {
                    let c = 0.5 * (h.edges[i] + h.edges[i + 1]);
                    csv.push_str(&format!("{c:.12e},{height:.12e},{:.12e}\n", m.pdf_eval(c)));
                }
                if let Err(e) = std::fs::File::create(path).and_then(|mut f| f.write_all(csv.as_bytes())) {
                    return numerical_error(format!("cannot write {}: {e}", path.display()));
                }
            }
            let ks = match ks_distance(&batch, &m) {
                Ok(k) => k,
                Err(e) => return numerical_error(e),
            };
            let trunc = model.truncation();
            emit(
                &OutputRecord {
                    command: "mc",
                    params: json!({"dist": dist_name(model.dist), "n": model.n,
                                   "K": trunc.k, "J": trunc.j,
                                   "N": replications, "seed": seed, "bins": bins,
                                   "generator": batch.generator,
                                   "redraws": batch.redraws,
                                   "precision_bits": bits}),
                    header: vec!["ks_distance"],
                    rows: vec![vec![json!(ks)]],
                },
                cli.format,
                cli.decimals,
            );
            ExitCode::SUCCESS
        }
        Command::CheckGeary {
            n,
            grid_points,
            quad_points,
        } => {
            if *n < 6 {
                return usage_error(
                    "check-geary requires n >= 6: below that the recurrence weight (1-z^2)^((n-7)/2) is not integrable",
                );
            }
            if *grid_points < 1 {
                return usage_error("grid-points must be at least 1");
            }
            let t = default_truncation(Family::NormalSkewness, *n);
            let prev = build_model(Family::NormalSkewness, n - 1, t, bits);
            let cur = build_model(Family::NormalSkewness, *n, t, bits);
            let (prev, cur) = match (prev, cur) {
                (Ok(p), Ok(c)) => (p, c),
                (Err(e), _) | (_, Err(e)) => return numerical_error(e),
            };
            let a = cur.a();
            let grid: Vec<f64> = if *grid_points == 1 {
                vec![0.0]
            } else {
                (0..*grid_points)
                    .map(|i| -a / 2.0 + a * i as f64 / (*grid_points as f64 - 1.0))
                    .collect()
            };
            let report = match geary_consistency(&prev, &cur, &grid, *quad_points) {
                Ok(r) => r,
                Err(e) => return numerical_error(e),
            };
            let rows = report
                .points
                .iter()
                .map(|p| {
                    vec![
                        json!(p.x),
                        json!(p.recurrence),
                        json!(p.model),
                        json!((p.recurrence - p.model).abs()),
                    ]
                })
                .collect();
            emit(
                &OutputRecord {
                    command: "check-geary",
                    params: json!({"n": n, "grid_points": grid_points,
                                   "quad_points": quad_points,
                                   "max_deviation": report.max_deviation,
                                   "precision_bits": bits}),
                    header: vec!["x", "recurrence", "model", "abs_diff"],
                    rows,
                },
                cli.format,
                cli.decimals,
            );
            ExitCode::SUCCESS
        }
    }
}

fn dist_name(d: Dist) -> &'static str {
    match d {
        Dist::UniformSum => "uniform-sum",
        Dist::Skewness => "skewness",
    }
}

fn which_name(w: Which) -> &'static str {
    match w {
        Which::Pdf => "pdf",
        Which::Cdf => "cdf",
        Which::Tail => "tail",
    }
}
