use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_rational::Ratio;
use rayon::prelude::*;

use qsdesign::design::{evaluate, MetricsReport, Route};
use qsdesign::io::{read_design, write_csv, write_design, MetricsSummary};
use qsdesign::multi::{generate, supported_runs};
use qsdesign::single::{competitor_baseline, construct_nm, select_b1, select_b2};
use qsdesign::tsp::{six_city_instance, profit, random_baseline, TspStrategy};
use qsdesign::{Error, TaConfig};

/// Construct and evaluate quantitative-sequence designs.
#[derive(Parser)]
#[command(name = "qsdesign", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a design with n runs and m components.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// Root seed for every random step (default 0).
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        ta: TaArgs,
        /// Output CSV; a `.meta.json` sidecar is written next to it. Prints the CSV when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report every criterion of a design file.
    Evaluate {
        path: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Selected shifts for every odd prime 5 <= p <= max-p.
    TableB {
        #[arg(long, default_value_t = 97)]
        max_p: u64,
    },
    /// Distance ratios and r_ave of n = m designs, with the lattice baseline where defined.
    Ratios {
        #[arg(long, value_delimiter = ',', required = true)]
        m: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        ta: TaArgs,
    },
    /// Every supported (m, n) with its route and metrics.
    Catalog {
        #[arg(long, default_value_t = 20)]
        max_m: usize,
        #[arg(long, default_value_t = 50)]
        max_n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        ta: TaArgs,
    },
    /// Scheduling benchmark on the six-city instance.
    #[command(subcommand)]
    Tsp(TspCommand),
}

#[derive(Subcommand)]
enum TspCommand {
    /// Profit of one strategy "x1,...,xm;o1,...,om" (stays in visit order).
    Eval {
        #[arg(long)]
        strategy: String,
        /// Read the stays as indexed by city instead of by visit.
        #[arg(long)]
        city_indexed: bool,
    },
    /// Best profit over n random strategies, then a histogram of all profits.
    Random {
        #[arg(long, default_value_t = 300)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        bins: usize,
        /// Also write every sampled strategy and its profit here.
        #[arg(long)]
        profits: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct TaArgs {
    /// Outer iterations of the threshold search.
    #[arg(long, default_value_t = 100)]
    outer: usize,
    /// Inner iterations per threshold.
    #[arg(long, default_value_t = 100)]
    inner: usize,
    #[arg(long, default_value_t = 0.05)]
    t_initial: f64,
    #[arg(long, default_value_t = 1e-6)]
    t_final: f64,
    /// Weight on r_ave in the blocked criterion, as "num/den".
    #[arg(long, default_value = "1/2", value_parser = parse_weight)]
    weight: Ratio<i64>,
}

impl TaArgs {
    fn config(&self) -> Result<TaConfig, Error> {
        let cfg = TaConfig {
            outer: self.outer,
            inner: self.inner,
            t_initial: self.t_initial,
            t_final: self.t_final,
            weight: self.weight,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_weight(s: &str) -> Result<Ratio<i64>, String> {
    s.parse::<Ratio<i64>>().map_err(|e| format!("{s:?}: {e}"))
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Unsupported(_) | Error::NotMultiple { .. } => 3,
        Error::Parse { .. } => 4,
        Error::Config(_) => 2,
        _ => 1,
    }
}

fn metrics_line(r: &MetricsReport) -> String {
    let exact = r
        .r_ave
        .exact
        .map(|q| format!(" ({}/{})", q.numer(), q.denom()))
        .unwrap_or_default();
    let t = r
        .pair_counts
        .balanced_value()
        .map_or_else(|| "unbalanced".to_string(), |v| v.to_string());
    format!(
        "n={} m={} d1={} d2sq={} dH={} r_ave={}{exact} t={t} MCD={}",
        r.n, r.m, r.d1, r.d2sq, r.dh, r.r_ave, r.is_marginally_coupled
    )
}

fn fmt_set(v: &[u64]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn run(cli: Cli) -> Result<(), Error> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Generate { n, m, seed, ta, out: path } => {
            let d = generate(n, m, &ta.config()?, seed)?;
            let report = evaluate(&d)?;
            match path {
                Some(p) => {
                    write_design(&p, &d)?;
                    writeln!(out, "{}", metrics_line(&report))?;
                    writeln!(out, "route={} written to {}", d.meta.route, p.display())?;
                }
                None => {
                    write_csv(&mut out, &d)?;
                    eprintln!("{}", metrics_line(&report));
                }
            }
        }
        Command::Evaluate { path, json } => {
            let d = read_design(&path).map_err(|e| match e {
                Error::Io(_) | Error::Parse { .. } => e,
                other => Error::Parse {
                    row: 0,
                    column: 0,
                    message: other.to_string(),
                },
            })?;
            let report = evaluate(&d)?;
            if json {
                let s = serde_json::to_string_pretty(&MetricsSummary::from(&report))
                    .map_err(|e| Error::Io(e.to_string()))?;
                writeln!(out, "{s}")?;
            } else {
                writeln!(out, "{}", metrics_line(&report))?;
                writeln!(
                    out,
                    "bounds: d1<={} d2sq<={} dH<={}{}",
                    report.bounds.d1_upper,
                    report.bounds.d2sq_upper,
                    report.bounds.dh_upper,
                    report
                        .coupled_bounds
                        .map(|(a, b)| format!(" (coupled n=2m: d1<={a} d2sq<={b})"))
                        .unwrap_or_default()
                )?;
                writeln!(out, "d1_ratio={:.3} d2_ratio={:.3}", report.d1_ratio(), report.d2_ratio())?;
                if !report.is_pair_balanced {
                    for (i, j, c) in report.pair_counts.off_diagonal() {
                        writeln!(out, "t[{i},{j}]={c}")?;
                    }
                }
            }
        }
        Command::TableB { max_p } => {
            if max_p < 5 {
                return Err(Error::Config("max-p must be at least 5".into()));
            }
            let primes: Vec<u64> = (5..=max_p).filter(|&p| qsdesign::glp::is_odd_prime(p)).collect();
            let rows = primes
                .par_iter()
                .map(|&p| {
                    let b1 = select_b1(p)?;
                    let b2 = select_b2(p)?;
                    Ok(format!(
                        "{p},{},{},{},{},{:.3}",
                        fmt_set(&b1.minimizers),
                        fmt_set(&b2.candidates),
                        b2.c,
                        b2.chosen,
                        qsdesign::design::ratio_to_f64(b1.r_value)
                    ))
                })
                .collect::<Result<Vec<String>, Error>>()?;
            writeln!(out, "p,b1,b2,c,b2_chosen,r_ave_b1")?;
            for r in rows {
                writeln!(out, "{r}")?;
            }
        }
        Command::Ratios { m, seed, ta } => {
            let cfg = ta.config()?;
            let mut ms = m;
            ms.sort_unstable();
            ms.dedup();
            let rows: Vec<(usize, Result<String, Error>)> = ms
                .par_iter()
                .map(|&m| (m, ratio_row(m, &cfg, seed)))
                .collect();
            writeln!(out, "m,route,d1_ratio,d2_ratio,r_ave,competitor_d1_ratio,competitor_d2_ratio,competitor_r_ave")?;
            let mut failed = None;
            for (m, row) in rows {
                match row {
                    Ok(r) => writeln!(out, "{r}")?,
                    Err(e) => {
                        eprintln!("m={m}: {e}");
                        failed = Some(e);
                    }
                }
            }
            if let Some(e) = failed {
                return Err(e);
            }
        }
        Command::Catalog { max_m, max_n, seed, ta } => {
            let cfg = ta.config()?;
            let cells: Vec<(usize, usize)> = (1..=max_m)
                .flat_map(|m| supported_runs(m, max_n).into_iter().map(move |n| (m, n)))
                .collect();
            let rows = cells
                .par_iter()
                .map(|&(m, n)| {
                    let d = generate(n, m, &cfg, seed)?;
                    let r = evaluate(&d)?;
                    Ok(format!(
                        "{m},{n},{},{},{},{},{:.3},{},{}",
                        d.meta.route,
                        r.d1,
                        r.d2sq,
                        r.dh,
                        r.r_ave.value,
                        r.pair_counts.balanced_value().map_or(0, |v| v),
                        r.is_marginally_coupled
                    ))
                })
                .collect::<Result<Vec<String>, Error>>()?;
            writeln!(out, "m,n,route,d1,d2sq,dh,r_ave,t,mcd")?;
            for r in rows {
                writeln!(out, "{r}")?;
            }
        }
        Command::Tsp(TspCommand::Eval { strategy, city_indexed }) => {
            let mut s = TspStrategy::parse(&strategy)?;
            if city_indexed {
                s = TspStrategy::from_city_indexed(s.order().to_vec(), s.stays())?;
            }
            writeln!(out, "{:.2}", profit(&six_city_instance(), &s)?)?;
        }
        Command::Tsp(TspCommand::Random { n, seed, bins, profits }) => {
            let inst = six_city_instance();
            let r = random_baseline(&inst, n, seed)?;
            writeln!(out, "best={:.2}", r.best)?;
            if let Some(path) = profits {
                let mut text = String::from("order,stays,profit\n");
                for (s, p) in r.strategies.iter().zip(&r.profits) {
                    let order: Vec<String> = s.order().iter().map(ToString::to_string).collect();
                    let stays: Vec<String> = s.stays().iter().map(|x| format!("{x:.4}")).collect();
                    text.push_str(&format!("{},{},{p:.4}\n", order.join(" "), stays.join(" ")));
                }
                std::fs::write(path, text)?;
            }
            let bins = bins.max(1);
            let lo = r.profits.iter().copied().fold(f64::INFINITY, f64::min);
            let width = ((r.best - lo) / bins as f64).max(f64::MIN_POSITIVE);
            let mut counts = vec![0usize; bins];
            for &p in &r.profits {
                counts[(((p - lo) / width) as usize).min(bins - 1)] += 1;
            }
            writeln!(out, "bin_lo,bin_hi,count")?;
            for (i, c) in counts.iter().enumerate() {
                let a = lo + width * i as f64;
                writeln!(out, "{a:.2},{:.2},{c}", a + width)?;
            }
        }
    }
    Ok(())
}

fn ratio_row(m: usize, cfg: &TaConfig, seed: u64) -> Result<String, Error> {
    let d = construct_nm(m, cfg, seed)?;
    let r = evaluate(&d)?;
    let route = d.meta.route;
    let competitor = if route == Route::GlpPair {
        let c = evaluate(&competitor_baseline(m)?)?;
        format!("{:.3},{:.3},{:.3}", c.d1_ratio(), c.d2_ratio(), c.r_ave.value)
    } else {
        ",,".to_string()
    };
    Ok(format!(
        "{m},{route},{:.3},{:.3},{:.3},{competitor}",
        r.d1_ratio(),
        r.d2_ratio(),
        r.r_ave.value
    ))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
