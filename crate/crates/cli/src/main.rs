//! Command-line front end: config ingestion, experiment orchestration, and
//! CSV/JSON serialization. All numerics live in the core crate.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use aperture_core::bandwidth::{
    calibrated_noise_density, capacity, optimal_pilot_bandwidth, pilot_limited_throughput,
    power_for_rate,
};
use aperture_core::config::parse_quantity;
use aperture_core::montecarlo::{find_min_antennas, run_multicell, run_trials};
use aperture_core::{ArrayShape, CdfSummary, Error as CoreError, Layout, Link, ScenarioConfig};

#[derive(Parser)]
#[command(name = "aperture", version, about = "LoS massive MIMO link-level simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single-cell max-min SINR CDFs over random terminal placements
    Simulate(RunArgs),
    /// Seven-cell system-wide max-min SINR CDFs
    SimulateMulticell(RunArgs),
    /// Smallest antenna count whose 95%-likely SINR meets each target
    FindAntennas(FindArgs),
    /// Capacity, required power, and pilot-limited throughput over a bandwidth sweep
    Bandwidth(BandwidthArgs),
    /// One scenario run per array shape, for shape-ordering comparisons
    GeometryCompare(RunArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Key-value config file; omitted keys take the built-in PCS defaults
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the config's RNG seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's trial count
    #[arg(long)]
    trials: Option<usize>,
    /// Write CSV here (and a JSON summary next to it); default is stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Suppress the human-readable summary on stderr
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct FindArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Target 95%-likely SINRs in dB
    #[arg(long, value_delimiter = ',', default_value = "5,10,15,20,25")]
    targets: Vec<f64>,
    /// Link direction the target applies to
    #[arg(long, value_enum, default_value_t = LinkArg::Uplink)]
    link: LinkArg,
    /// Percentile defining "x%-likely" (0.05 = 95%-likely)
    #[arg(long, default_value_t = 0.05)]
    percentile: f64,
}

#[derive(Args)]
struct BandwidthArgs {
    /// Received power for the capacity column (watts; SI suffixes accepted)
    #[arg(long, default_value = "10", value_parser = quantity)]
    power: f64,
    /// Rate for the required-power column (bit/s)
    #[arg(long, default_value = "60 MHz", value_parser = quantity)]
    rate: f64,
    /// Sweep start
    #[arg(long, default_value = "1 MHz", value_parser = quantity)]
    b_min: f64,
    /// Sweep end
    #[arg(long, default_value = "10 GHz", value_parser = quantity)]
    b_max: f64,
    /// Number of logarithmically spaced sweep points
    #[arg(long, default_value_t = 25)]
    points: usize,
    /// Pilot-limited reference SNR at the reference bandwidth
    #[arg(long, default_value_t = 7.0)]
    rho0: f64,
    /// Reference bandwidth for the pilot-limited column
    #[arg(long, default_value = "20 MHz", value_parser = quantity)]
    b0: f64,
    /// Noise power density (W/Hz); default calibrated to the sweep anchor
    #[arg(long)]
    n0: Option<f64>,
    /// Write the sweep as CSV here; default is stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Suppress the stationary-point note on stderr
    #[arg(long)]
    quiet: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LinkArg {
    Uplink,
    Downlink,
}

impl From<LinkArg> for Link {
    fn from(l: LinkArg) -> Link {
        match l {
            LinkArg::Uplink => Link::Uplink,
            LinkArg::Downlink => Link::Downlink,
        }
    }
}

fn quantity(text: &str) -> Result<f64, String> {
    parse_quantity(text)
        .ok_or_else(|| format!("not a number with optional SI suffix: `{text}`"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = match err.downcast_ref::<CoreError>() {
                Some(CoreError::Config(_)) | Some(CoreError::Domain(_)) => 2,
                Some(CoreError::TargetUnattainable { .. }) => 3,
                Some(CoreError::DegenerateAbort { .. }) => 4,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Simulate(args) => cmd_simulate(args, Layout::Single),
        Command::SimulateMulticell(args) => cmd_simulate(args, Layout::SevenCell),
        Command::FindAntennas(args) => cmd_find_antennas(args),
        Command::Bandwidth(args) => cmd_bandwidth(args),
        Command::GeometryCompare(args) => cmd_geometry_compare(args),
    }
}

fn load_config(common: &CommonArgs) -> Result<ScenarioConfig> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            aperture_core::config::parse_config(&text)?
        }
        None => ScenarioConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = common.trials {
        cfg.n_trials = trials;
    }
    Ok(cfg)
}

/// Either a buffered file or stdout; CSV goes here.
fn csv_writer(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => {
            let file = fs::File::create(path)
                .with_context(|| format!("creating {}", path.display()))?;
            Box::new(BufWriter::new(file))
        }
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn write_cdf_rows(w: &mut dyn Write, cdf: &CdfSummary, link: Link, scenario: &str) -> Result<()> {
    let n = cdf.n_trials as f64;
    for (i, s) in cdf.sorted_samples_db.iter().enumerate() {
        writeln!(w, "{},{},{},{}", s, (i + 1) as f64 / n, link.name(), scenario)?;
    }
    Ok(())
}

fn link_summary(cdf: &CdfSummary) -> Result<serde_json::Value> {
    Ok(serde_json::json!({
        "p05_db": cdf.percentile(0.05)?,
        "p50_db": cdf.percentile(0.50)?,
        "p95_db": cdf.percentile(0.95)?,
        "n_trials": cdf.n_trials,
        "n_degenerate_redraws": cdf.n_degenerate_redraws,
    }))
}

fn write_json_next_to(out: &Option<PathBuf>, value: &serde_json::Value) -> Result<()> {
    if let Some(path) = out {
        let json_path = path.with_extension("json");
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(&json_path, text)
            .with_context(|| format!("writing {}", json_path.display()))?;
    }
    Ok(())
}

fn print_link_lines(cdf: &CdfSummary, link: Link) -> Result<()> {
    eprintln!(
        "{:<8}  p05 {:8.2} dB   p50 {:8.2} dB   p95 {:8.2} dB   ({} trials)",
        link.name(),
        cdf.percentile(0.05)?,
        cdf.percentile(0.50)?,
        cdf.percentile(0.95)?,
        cdf.n_trials,
    );
    Ok(())
}

fn cmd_simulate(args: RunArgs, layout: Layout) -> Result<ExitCode> {
    let mut cfg = load_config(&args.common)?;
    cfg.layout = layout;
    let scenario = match layout {
        Layout::Single => "single_cell",
        Layout::SevenCell => "seven_cell",
    };
    let out = run_multicell(&cfg, cfg.n_trials, cfg.seed)?;
    let mut w = csv_writer(&args.common.out)?;
    writeln!(w, "sinr_db,cum_prob,link,scenario")?;
    write_cdf_rows(&mut *w, &out.uplink, Link::Uplink, scenario)?;
    write_cdf_rows(&mut *w, &out.downlink, Link::Downlink, scenario)?;
    w.flush()?;
    write_json_next_to(
        &args.common.out,
        &serde_json::json!({
            "version": env!("CARGO_PKG_VERSION"),
            "seed": cfg.seed,
            "scenario": scenario,
            "config": cfg,
            "links": {
                "uplink": link_summary(&out.uplink)?,
                "downlink": link_summary(&out.downlink)?,
            },
        }),
    )?;
    if !args.common.quiet {
        eprintln!("{scenario}: {} antennas, {} terminals per cell", cfg.m, cfg.k);
        print_link_lines(&out.uplink, Link::Uplink)?;
        print_link_lines(&out.downlink, Link::Downlink)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_find_antennas(args: FindArgs) -> Result<ExitCode> {
    let cfg = load_config(&args.common)?;
    // Search default: quick 500-trial evaluations; the search confirms its
    // answer at >= 2000 trials internally.
    let trials = args.common.trials.unwrap_or(500);
    let lambda = cfg.wavelength();
    let mut w = csv_writer(&args.common.out)?;
    writeln!(w, "target_db,M,array_diameter_m")?;
    let mut unattainable = false;
    for &target in &args.targets {
        match find_min_antennas(&cfg, args.link.into(), target, args.percentile, trials, cfg.seed) {
            Ok(res) => {
                let diameter = res.m_star as f64 * lambda / (2.0 * std::f64::consts::PI);
                writeln!(w, "{},{},{}", target, res.m_star, diameter)?;
                if !args.common.quiet {
                    eprintln!(
                        "target {target} dB: M = {} (diameter {:.2} m, bracket {:?})",
                        res.m_star, diameter, res.bracket
                    );
                }
            }
            Err(CoreError::TargetUnattainable { target_db, m_max }) => {
                writeln!(w, "{},,", target)?;
                eprintln!("target {target_db} dB: unattainable within M <= {m_max}");
                unattainable = true;
            }
            Err(other) => return Err(other.into()),
        }
    }
    w.flush()?;
    Ok(if unattainable { ExitCode::from(3) } else { ExitCode::SUCCESS })
}

fn cmd_bandwidth(args: BandwidthArgs) -> Result<ExitCode> {
    if args.points < 2 || args.b_min <= 0.0 || args.b_max <= args.b_min {
        return Err(CoreError::Config(
            "bandwidth sweep needs b_min > 0, b_max > b_min, points >= 2".into(),
        )
        .into());
    }
    let n0 = args.n0.unwrap_or_else(calibrated_noise_density);
    let mut w = csv_writer(&args.out)?;
    writeln!(w, "bandwidth_hz,capacity_bps,power_for_rate_w,pilot_throughput_bps")?;
    let log_step = (args.b_max / args.b_min).ln() / (args.points - 1) as f64;
    for i in 0..args.points {
        let b = args.b_min * (i as f64 * log_step).exp();
        let cap = capacity(b, args.power, n0)?;
        let need = power_for_rate(b, args.rate, n0)?;
        let pilot = pilot_limited_throughput(b, args.rho0, args.b0)?;
        writeln!(w, "{},{},{},{}", b, cap, need, pilot)?;
    }
    w.flush()?;
    if !args.quiet {
        let b_star = optimal_pilot_bandwidth(args.rho0, args.b0)?;
        let t_star = pilot_limited_throughput(b_star, args.rho0, args.b0)?;
        eprintln!(
            "pilot-limited throughput peaks at B = {:.3e} Hz ({:.3e} bit/s)",
            b_star, t_star
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_geometry_compare(args: RunArgs) -> Result<ExitCode> {
    let mut cfg = load_config(&args.common)?;
    cfg.layout = Layout::Single;
    let shapes = [
        (ArrayShape::Circular, "circular"),
        (ArrayShape::Rectangular, "rectangular"),
        (ArrayShape::Linear, "linear"),
    ];
    let mut w = csv_writer(&args.common.out)?;
    writeln!(w, "sinr_db,cum_prob,link,scenario")?;
    let mut scenarios = serde_json::Map::new();
    for (shape, name) in shapes {
        let run_cfg = ScenarioConfig { array_shape: shape, ..cfg.clone() };
        let out = run_trials(&run_cfg, run_cfg.n_trials, run_cfg.seed)?;
        write_cdf_rows(&mut *w, &out.uplink, Link::Uplink, name)?;
        write_cdf_rows(&mut *w, &out.downlink, Link::Downlink, name)?;
        if !args.common.quiet {
            eprintln!("{name}:");
            print_link_lines(&out.uplink, Link::Uplink)?;
            print_link_lines(&out.downlink, Link::Downlink)?;
        }
        scenarios.insert(
            name.to_string(),
            serde_json::json!({
                "uplink": link_summary(&out.uplink)?,
                "downlink": link_summary(&out.downlink)?,
            }),
        );
    }
    w.flush()?;
    write_json_next_to(
        &args.common.out,
        &serde_json::json!({
            "version": env!("CARGO_PKG_VERSION"),
            "seed": cfg.seed,
            "config": cfg,
            "scenarios": scenarios,
        }),
    )?;
    Ok(ExitCode::SUCCESS)
}
