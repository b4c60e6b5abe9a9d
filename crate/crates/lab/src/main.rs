//! `radial-lab`: measures, projections and dimension experiments from the
//! command line. Experiment subcommands exit 0 when every verdict passes,
//! 2 when a verdict fails, and 1 on execution errors.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use radial_core::geom::{Point, Vec2};
use radial_core::project::{radial_pushforward, weighted_radial_density};
use radial_core::scale::{box_dimension_support, direction_set, riesz_energy};
use radial_core::tubes::{bad_point_test, TubeParams};
use radial_lab::experiments::{self, ScheduleConfig};
use radial_lab::record::RunRecord;
use radial_lab::spec::measure_from_arg;

#[derive(Parser)]
#[command(name = "radial-lab", version, about = "radial projection laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct MeasureArg {
    /// measure source: inline JSON spec, a .json spec file, or a
    /// gridmeasure text file
    #[arg(long)]
    measure: String,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// JSON config; omit for the built-in default configuration
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// directory for record.json and the table CSVs
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Radial pushforward histogram from a centre (CSV per bin)
    Project {
        #[command(flatten)]
        measure: MeasureArg,
        /// centre as x,y
        #[arg(long, allow_hyphen_values = true)]
        centre: String,
        #[arg(long, default_value_t = 360)]
        bins: usize,
        /// emit the kernel-weighted density instead of the mass histogram
        #[arg(long)]
        weighted: bool,
    },
    /// Both sides of the projection identity at one p and quadrature level
    VerifyIdentity {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 8)]
        quad: u32,
    },
    /// Box-counting dimension of a measure support (CSV scale counts)
    Boxdim {
        #[command(flatten)]
        measure: MeasureArg,
        /// schedule as epsilon,k0,kmax
        #[arg(long, default_value = "0.1,17,22")]
        schedule: String,
    },
    /// Riesz s-energy of a measure
    Energy {
        #[command(flatten)]
        measure: MeasureArg,
        #[arg(long)]
        s: f64,
    },
    /// Exact pairwise direction count and binned direction histogram
    Directions {
        #[command(flatten)]
        measure: MeasureArg,
        #[arg(long, default_value_t = 2000)]
        max_points: usize,
        #[arg(long, default_value = "0.1,17,22")]
        schedule: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Greedy concentration witness at one viewpoint (CSV witness tubes)
    Tubes {
        #[command(flatten)]
        measure: MeasureArg,
        #[arg(long, allow_hyphen_values = true)]
        centre: String,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        tau: f64,
        #[arg(long, default_value_t = 0.005)]
        eta: f64,
        #[arg(long, default_value_t = 2.0)]
        kappa_mu: f64,
        #[arg(long, default_value_t = 1.0)]
        kappa_nu: f64,
    },
    /// Venetian blind construction: measure file plus content-bound CSV
    Blinds {
        /// file with one `x y` viewpoint per line
        #[arg(long)]
        viewpoints: PathBuf,
        #[arg(long)]
        gens: u32,
        #[arg(long)]
        split: u32,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 10)]
        level: u32,
        #[arg(long, default_value = "blinds-out")]
        out: PathBuf,
    },
    /// Direction-set experiment (record + verdicts)
    Direction(RunArgs),
    /// Visibility experiment: best projection dimension over viewpoints
    Visibility(RunArgs),
    /// Exceptional-set scan for the weighted radial densities
    Exceptional(RunArgs),
    /// Identity experiment over a refinement ladder
    Identity(RunArgs),
    /// Bad-set / flower / cover pipeline over consecutive scales
    AnalyzeLevel(RunArgs),
}

fn parse_pair(s: &str) -> Result<Vec2> {
    let (a, b) = s
        .split_once(',')
        .with_context(|| format!("expected x,y but got `{s}`"))?;
    Ok(Vec2::new(a.trim().parse()?, b.trim().parse()?))
}

fn parse_schedule(s: &str) -> Result<ScheduleConfig> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        anyhow::bail!("expected epsilon,k0,kmax but got `{s}`");
    }
    Ok(ScheduleConfig {
        epsilon: parts[0].trim().parse()?,
        k0: parts[1].trim().parse()?,
        kmax: parts[2].trim().parse()?,
    })
}

fn load_config<T: serde::de::DeserializeOwned + Default>(path: &Option<PathBuf>) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("reading config {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing config {}", p.display()))
        }
    }
}

fn finish(record: RunRecord, out: &Option<PathBuf>) -> Result<ExitCode> {
    record.print_verdicts();
    for note in &record.notes {
        eprintln!("note: {note}");
    }
    if let Some(dir) = out {
        record.save(dir)?;
        println!("record written to {}", dir.join("record.json").display());
    }
    Ok(if record.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Project {
            measure,
            centre,
            bins,
            weighted,
        } => {
            let m = measure_from_arg(&measure.measure)?;
            let x = parse_pair(&centre)?;
            let hist = if weighted {
                weighted_radial_density(&m, Point::xy(x.x, x.y), bins)?
            } else {
                radial_pushforward(&m, Point::xy(x.x, x.y), bins)?
            };
            println!("bin,angle_mid,value");
            for (b, v) in hist.values().iter().enumerate() {
                println!("{b},{},{v}", hist.bin_midpoint(b));
            }
        }
        Command::VerifyIdentity { p, quad } => {
            let (mu, nu) = radial_core::smooth::bundled_bump_pair();
            let check = radial_core::smooth::verify_projection_identity(&mu, &nu, p, quad)?;
            println!("quantity,value");
            println!("lhs,{}", check.lhs);
            println!("rhs,{}", check.rhs);
            println!("relative_error,{}", check.relative_error);
            println!("direction_bins,{}", check.direction_bins);
        }
        Command::Boxdim { measure, schedule } => {
            let m = measure_from_arg(&measure.measure)?;
            let s = parse_schedule(&schedule)?.build()?;
            let est = box_dimension_support(&m, &s)?;
            println!("log2_inv_delta,count");
            for c in &est.counts {
                println!("{},{}", c.exponent, c.count);
            }
            let summary = serde_json::json!({
                "dimension": est.slope,
                "residual": est.residual,
                "window": est.window,
            });
            println!("{summary}");
        }
        Command::Energy { measure, s } => {
            let m = measure_from_arg(&measure.measure)?;
            let e = riesz_energy(&m, s)?;
            println!("{}", serde_json::json!({"s": s, "energy": e}));
        }
        Command::Directions {
            measure,
            max_points,
            schedule,
            seed,
        } => {
            let m = measure_from_arg(&measure.measure)?;
            let s = parse_schedule(&schedule)?.build()?;
            let pts = experiments::sample_support(&m, max_points, seed);
            let ds = direction_set(&pts, &s)?;
            println!("log2_inv_delta,count");
            for c in &ds.estimate.counts {
                println!("{},{}", c.exponent, c.count);
            }
            let summary = serde_json::json!({
                "points": pts.len(),
                "distinct_directions": ds.distinct,
                "dimension": ds.estimate.slope,
                "histogram_bins": ds.histogram.bins(),
            });
            println!("{summary}");
        }
        Command::Tubes {
            measure,
            centre,
            delta,
            tau,
            eta,
            kappa_mu,
            kappa_nu,
        } => {
            let m = measure_from_arg(&measure.measure)?;
            let x = parse_pair(&centre)?;
            let params = TubeParams::new(delta, tau, eta, kappa_mu, kappa_nu)?;
            let res = bad_point_test(&m, x, &params)?;
            eprintln!(
                "is_bad={} covered_mass={} threshold={}",
                res.is_bad,
                res.covered_mass,
                params.bad_threshold()
            );
            println!("angle,offset,mass");
            for t in &res.witness {
                let mass = radial_core::tubes::tube_mass(&m, t)?;
                println!("{},{},{mass}", t.dir().projective_angle(), t.line.offset());
            }
        }
        Command::Blinds {
            viewpoints,
            gens,
            split,
            eps,
            level,
            out,
        } => {
            let text = std::fs::read_to_string(&viewpoints)
                .with_context(|| format!("reading viewpoints {}", viewpoints.display()))?;
            let mut vps = Vec::new();
            for line in text.lines() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let mut it = line.split_whitespace();
                let x: f64 = it.next().context("missing x")?.parse()?;
                let y: f64 = it.next().context("missing y")?.parse()?;
                vps.push(Vec2::new(x, y));
            }
            let (_, measure, report) =
                radial_core::blinds::blind_construct(&vps, gens, split, eps, level)?;
            std::fs::create_dir_all(&out)?;
            radial_lab::format::save_measure(&out.join("measure.txt"), &measure)?;
            let mut w = csv::Writer::from_path(out.join("content.csv"))?;
            w.write_record(["generation", "viewpoint", "eps", "content_bound"])?;
            for row in &report {
                w.write_record([
                    row.generation.to_string(),
                    row.viewpoint.to_string(),
                    row.eps.to_string(),
                    row.bound.to_string(),
                ])?;
            }
            w.flush()?;
            println!("measure and content report written to {}", out.display());
        }
        Command::Direction(args) => {
            let config = load_config(&args.config)?;
            return finish(experiments::direction::run(&config, args.seed)?, &args.out);
        }
        Command::Visibility(args) => {
            let config = load_config(&args.config)?;
            return finish(experiments::visibility::run(&config, args.seed)?, &args.out);
        }
        Command::Exceptional(args) => {
            let config = load_config(&args.config)?;
            return finish(
                experiments::exceptional::run(&config, args.seed)?,
                &args.out,
            );
        }
        Command::Identity(args) => {
            let config = load_config(&args.config)?;
            return finish(experiments::identity::run(&config, args.seed)?, &args.out);
        }
        Command::AnalyzeLevel(args) => {
            let config = load_config(&args.config)?;
            return finish(experiments::level::run(&config, args.seed)?, &args.out);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
