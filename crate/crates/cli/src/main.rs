use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use uca_mimo::design::{capacity_curve, condition_number, DEFAULT_BETA_MAX, DEFAULT_RESOLUTION};
use uca_mimo::sim::{
    bit_grid, default_bit_grid, format_g9, run_codebook_bit_sweep, run_rate_sweep, write_csv,
    CodebookPower, TrialConfig, DEFAULT_CARRIER_HZ, SPEED_OF_LIGHT,
};
use uca_mimo::spectrum::{rotation_sweep, spectrum_sweep, SpectrumPoint};
use uca_mimo::{search_beta_opt, ChannelModel, Error, Quantization};

const AFTER_HELP: &str = "\
Units: meters, dB and radians. Any angle also accepts degrees as `deg:<value>`.
Options can be read from a file given by --config, one `key = value` per line
using the long option names (`ns = 8`, `exact-geometry = true`); options on the
command line take precedence. Exit status: 0 success, 1 I/O failure, 2 invalid
usage or parameters, 3 numerical failure.";

#[derive(Parser, Debug)]
#[command(
    name = "uca-mimo",
    version,
    about = "LoS MIMO design and simulation for misaligned circular arrays"
)]
#[command(after_help = AFTER_HELP, args_override_self = true)]
struct Cli {
    /// Flat `key = value` file of default options.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Optimal RPDR, radii, capacity and condition number.
    Design(DesignArgs),
    /// Singular values along a beta or theta_o grid (CSV).
    Spectrum(SpectrumArgs),
    /// Capacity against beta (CSV).
    CapacitySweep(CapacitySweepArgs),
    /// Codebook rate against bit budget for both quantizations (CSV).
    Codebook(CodebookArgs),
    /// Monte-Carlo rates of all transceiver schemes against distance (CSV).
    Simulate(SimulateArgs),
}

fn parse_angle(s: &str) -> Result<f64, String> {
    let (deg, body) = match s.trim().strip_prefix("deg:") {
        Some(rest) => (true, rest),
        None => (false, s.trim()),
    };
    let v: f64 = body
        .trim()
        .parse()
        .map_err(|_| format!("not a number: {body:?}"))?;
    if !v.is_finite() {
        return Err(format!("angle must be finite, got {s}"));
    }
    Ok(if deg { v.to_radians() } else { v })
}

fn default_wavelength() -> f64 {
    SPEED_OF_LIGHT / DEFAULT_CARRIER_HZ
}

#[derive(Args, Debug)]
struct DesignArgs {
    #[arg(long)]
    ns: usize,
    #[arg(long, default_value_t = 15.0, allow_negative_numbers = true)]
    snr_db: f64,
    /// Wavelength in meters (default c / 75 GHz).
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, default_value_t = 100.0)]
    dist: f64,
    #[arg(long, default_value = "0", value_parser = parse_angle, allow_negative_numbers = true)]
    theta_o: f64,
    #[arg(long, default_value_t = DEFAULT_BETA_MAX)]
    beta_max: f64,
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    resolution: f64,
    /// Report only the radii product instead of equal radii.
    #[arg(long)]
    unequal: bool,
    /// Also write the full beta/capacity curve to this CSV file.
    #[arg(long, value_name = "FILE")]
    curve: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Axis {
    Beta,
    #[value(name = "theta_o", alias = "theta-o")]
    ThetaO,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[arg(long)]
    ns: usize,
    #[arg(long, value_enum)]
    axis: Axis,
    /// Fixed beta when sweeping theta_o.
    #[arg(long)]
    beta: Option<f64>,
    /// Fixed rotation when sweeping beta.
    #[arg(long, default_value = "0", value_parser = parse_angle, allow_negative_numbers = true)]
    theta_o: f64,
    /// Grid start (default 0 for beta, -pi/ns for theta_o).
    #[arg(long, value_parser = parse_angle, allow_negative_numbers = true)]
    start: Option<f64>,
    /// Grid end, inclusive (default 10 for beta, pi/ns for theta_o).
    #[arg(long, value_parser = parse_angle, allow_negative_numbers = true)]
    stop: Option<f64>,
    /// Number of grid points.
    #[arg(long, default_value_t = 1001)]
    points: usize,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CapacitySweepArgs {
    #[arg(long)]
    ns: usize,
    #[arg(long, default_value_t = 15.0, allow_negative_numbers = true)]
    snr_db: f64,
    /// Comma-separated rotations; one curve each.
    #[arg(long, default_value = "0", value_parser = parse_angle, value_delimiter = ',', allow_negative_numbers = true)]
    theta_o: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    beta_step: f64,
    #[arg(long, default_value_t = DEFAULT_BETA_MAX)]
    beta_max: f64,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum QuantizationArg {
    Sine,
    Linear,
}

#[derive(Args, Debug)]
struct TrialArgs {
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Half-width of the theta_o, phi_cs, phi_x and phi_y draws.
    #[arg(long, value_parser = parse_angle, default_value = "deg:10")]
    range: f64,
    /// Half-width of the theta_cs draw.
    #[arg(long, value_parser = parse_angle, default_value = "3.141592653589793")]
    theta_cs_range: f64,
    /// Sets both ranges at once.
    #[arg(long, value_parser = parse_angle)]
    range_all: Option<f64>,
    #[arg(long, default_value_t = 15.0, allow_negative_numbers = true)]
    snr_db: f64,
    /// Wavelength in meters (default c / 75 GHz).
    #[arg(long)]
    lambda: Option<f64>,
    /// Distance at which the radii are optimized.
    #[arg(long, default_value_t = 100.0)]
    design_dist: f64,
    /// Lower end of the phi_cs codebook range.
    #[arg(long, value_parser = parse_angle, default_value = "-0.175", allow_negative_numbers = true)]
    phi_min: f64,
    /// Upper end of the phi_cs codebook range.
    #[arg(long, value_parser = parse_angle, default_value = "0.175", allow_negative_numbers = true)]
    phi_max: f64,
    /// Use exact element distances instead of the approximate channel.
    #[arg(long)]
    exact_geometry: bool,
    /// Water-fill the codebook power on each trial's true spectrum.
    #[arg(long)]
    exact_codebook_power: bool,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

impl TrialArgs {
    fn base(&self) -> TrialConfig {
        let (small, cs) = match self.range_all {
            Some(r) => (r, r),
            None => (self.range, self.theta_cs_range),
        };
        TrialConfig {
            n_trials: self.trials,
            seed: self.seed,
            angle_range_small: small,
            theta_cs_range: cs,
            snr_db: self.snr_db,
            wavelength: self.lambda.unwrap_or_else(default_wavelength),
            design_distance: self.design_dist,
            phi_range: (self.phi_min, self.phi_max),
            model: if self.exact_geometry {
                ChannelModel::ExactDistance
            } else {
                ChannelModel::Approximate
            },
            codebook_power: if self.exact_codebook_power {
                CodebookPower::Exact
            } else {
                CodebookPower::Approximate
            },
            ..TrialConfig::default()
        }
    }
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    trial: TrialArgs,
    /// Comma-separated antenna counts.
    #[arg(long, default_value = "4,8,12,16", value_delimiter = ',')]
    ns: Vec<usize>,
    /// Comma-separated distances in meters.
    #[arg(
        long,
        default_value = "100,150,200,250,300,350,400,450,500",
        value_delimiter = ','
    )]
    dist: Vec<f64>,
    #[arg(long, default_value_t = 5)]
    l1: u32,
    #[arg(long, default_value_t = 3)]
    l2: u32,
    #[arg(long, value_enum, default_value = "sine")]
    quantization: QuantizationArg,
}

#[derive(Args, Debug)]
struct CodebookArgs {
    #[command(flatten)]
    trial: TrialArgs,
    #[arg(long, default_value = "16", value_delimiter = ',')]
    ns: Vec<usize>,
    #[arg(long, default_value = "300", value_delimiter = ',')]
    dist: Vec<f64>,
    /// Largest budget of the growing angle (the fixed one takes 1, 2, 3).
    #[arg(long)]
    grow_max: Option<u32>,
}

fn wavelength_or_default(l: Option<f64>) -> f64 {
    l.unwrap_or_else(default_wavelength)
}

fn output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn cmd_design(a: &DesignArgs) -> anyhow::Result<()> {
    let lambda = wavelength_or_default(a.lambda);
    let result = search_beta_opt(a.ns, a.theta_o, a.snr_db, a.beta_max, a.resolution)?
        .with_geometry(lambda, a.dist, !a.unequal)?;
    let mut out = output(None)?;
    let g = format_g9;
    writeln!(out, "n_antennas      {}", a.ns)?;
    writeln!(out, "snr_db          {}", g(a.snr_db))?;
    writeln!(out, "theta_o         {}", g(a.theta_o))?;
    writeln!(out, "wavelength_m    {}", g(lambda))?;
    writeln!(out, "distance_m      {}", g(a.dist))?;
    writeln!(out, "beta_opt        {}", g(result.beta_opt))?;
    if let Some(r) = result.radius_equal {
        writeln!(out, "radius_m        {}", g(r))?;
    }
    if let Some(p) = result.radii_product {
        writeln!(out, "radii_product   {}", g(p))?;
    }
    writeln!(out, "capacity_bps_hz {}", g(result.capacity))?;
    writeln!(out, "cond_number     {}", g(result.condition_number))?;
    out.flush()?;

    if let Some(path) = &a.curve {
        let grid = uniform_grid(
            a.resolution,
            a.beta_max,
            ((a.beta_max / a.resolution).round() as usize).max(1),
        )?;
        let curve = capacity_curve(a.ns, a.theta_o, a.snr_db, &grid)?;
        let mut f = output(Some(path))?;
        writeln!(f, "beta,capacity_bps_hz")?;
        for (b, c) in curve {
            writeln!(f, "{},{}", g(b), g(c))?;
        }
        f.flush()?;
    }
    Ok(())
}

/// `points` evenly spaced values from `start` to `stop` inclusive.
fn uniform_grid(start: f64, stop: f64, points: usize) -> anyhow::Result<Vec<f64>> {
    if points == 0 {
        bail!(Error::Empty("grid"));
    }
    if !(start.is_finite() && stop.is_finite() && stop >= start) {
        bail!(Error::InvalidConfig(format!(
            "grid bounds must satisfy start <= stop, got {start}..{stop}"
        )));
    }
    if points == 1 {
        return Ok(vec![start]);
    }
    let step = (stop - start) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            if i + 1 == points {
                stop
            } else {
                start + step * i as f64
            }
        })
        .collect())
}

fn cmd_spectrum(a: &SpectrumArgs) -> anyhow::Result<()> {
    let edge = std::f64::consts::PI / a.ns.max(1) as f64;
    let points: Vec<SpectrumPoint<f64>> = match a.axis {
        Axis::Beta => {
            let grid = uniform_grid(a.start.unwrap_or(0.0), a.stop.unwrap_or(10.0), a.points)?;
            spectrum_sweep(a.ns, a.theta_o, &grid)?
        }
        Axis::ThetaO => {
            let beta = a.beta.ok_or_else(|| {
                Error::InvalidConfig("--beta is required when sweeping theta_o".into())
            })?;
            let grid = uniform_grid(a.start.unwrap_or(-edge), a.stop.unwrap_or(edge), a.points)?;
            rotation_sweep(a.ns, beta, &grid)?
        }
    };
    let mut out = output(a.out.as_deref())?;
    write!(out, "beta,theta_o")?;
    for k in 1..=a.ns {
        write!(out, ",sigma_{k}")?;
    }
    writeln!(out)?;
    for p in points {
        write!(out, "{},{}", format_g9(p.beta), format_g9(p.theta_o))?;
        for s in &p.sigmas {
            write!(out, ",{}", format_g9(*s))?;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

fn cmd_capacity_sweep(a: &CapacitySweepArgs) -> anyhow::Result<()> {
    let steps = (a.beta_max / a.beta_step).round() as usize;
    let grid = uniform_grid(a.beta_step, a.beta_step * steps.max(1) as f64, steps.max(1))?;
    let mut out = output(a.out.as_deref())?;
    writeln!(out, "beta,theta_o,capacity_bps_hz,cond_number")?;
    for &theta in &a.theta_o {
        for (b, c) in capacity_curve(a.ns, theta, a.snr_db, &grid)? {
            let cond = condition_number(a.ns, b, theta)?;
            writeln!(
                out,
                "{},{},{},{}",
                format_g9(b),
                format_g9(theta),
                format_g9(c),
                format_g9(cond)
            )?;
        }
    }
    out.flush()?;
    Ok(())
}

fn cmd_simulate(a: &SimulateArgs) -> anyhow::Result<()> {
    let cfg = TrialConfig {
        n_antennas_list: a.ns.clone(),
        distances: a.dist.clone(),
        codebook_bits: (a.l1, a.l2),
        quantization: match a.quantization {
            QuantizationArg::Sine => Quantization::SineUniform,
            QuantizationArg::Linear => Quantization::Linear,
        },
        ..a.trial.base()
    };
    let rows = run_rate_sweep(&cfg)?;
    let mut out = output(a.trial.out.as_deref())?;
    write_csv(&rows, &mut out)?;
    out.flush()?;
    Ok(())
}

fn cmd_codebook(a: &CodebookArgs) -> anyhow::Result<()> {
    let cfg = TrialConfig {
        n_antennas_list: a.ns.clone(),
        distances: a.dist.clone(),
        ..a.trial.base()
    };
    let grid = a.grow_max.map_or_else(default_bit_grid, bit_grid);
    let rows = run_codebook_bit_sweep(&cfg, &grid)?;
    let mut out = output(a.trial.out.as_deref())?;
    write_csv(&rows, &mut out)?;
    out.flush()?;
    Ok(())
}

/// Reads `key = value` lines, skipping blanks and `#` comments.
fn read_config(path: &Path) -> anyhow::Result<Vec<(usize, String, String)>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut entries = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            anyhow!(UsageError(format!(
                "{}:{}: expected `key = value`",
                path.display(),
                i + 1
            )))
        })?;
        entries.push((i + 1, k.trim().to_string(), v.trim().to_string()));
    }
    Ok(entries)
}

#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

const SUBCOMMANDS: [&str; 5] = [
    "design",
    "spectrum",
    "capacity-sweep",
    "codebook",
    "simulate",
];

/// Splices options from `--config` into the argument list right after the
/// subcommand, so that anything given on the command line overrides them.
fn expand_config(args: Vec<String>) -> anyhow::Result<Vec<String>> {
    let mut path = None;
    for (i, a) in args.iter().enumerate() {
        if let Some(p) = a.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
        } else if a == "--config" {
            path = args.get(i + 1).map(PathBuf::from);
        }
    }
    let Some(path) = path else { return Ok(args) };
    let Some(sub_pos) = args.iter().position(|a| SUBCOMMANDS.contains(&a.as_str())) else {
        return Ok(args);
    };
    let sub = args[sub_pos].clone();
    let cmd = Cli::command();
    let sub_cmd = cmd.find_subcommand(&sub).expect("known subcommand");
    let is_flag = |key: &str| {
        sub_cmd
            .get_arguments()
            .chain(cmd.get_arguments())
            .find(|a| a.get_long() == Some(key))
            .map(|a| !a.get_action().takes_values())
    };

    let mut injected = Vec::new();
    for (line, key, value) in read_config(&path)? {
        let loc = format!("{}:{line}", path.display());
        if key == "config" {
            bail!(UsageError(format!(
                "{loc}: config files cannot include other config files"
            )));
        }
        match is_flag(&key) {
            None => bail!(UsageError(format!(
                "{loc}: unknown key `{key}` for `{sub}`"
            ))),
            Some(true) => match value.as_str() {
                "true" => injected.push(format!("--{key}")),
                "false" => {}
                _ => bail!(UsageError(format!(
                    "{loc}: `{key}` expects true or false, got `{value}`"
                ))),
            },
            Some(false) => injected.push(format!("--{key}={value}")),
        }
    }
    let mut out = args[..=sub_pos].to_vec();
    out.extend(injected);
    out.extend_from_slice(&args[sub_pos + 1..]);
    Ok(out)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    if let Some(e) = err.downcast_ref::<Error>() {
        return if e.is_numerical() { 3 } else { 2 };
    }
    1
}

/// A closed downstream pipe (`uca-mimo simulate | head`) is not a failure.
fn is_broken_pipe(err: &anyhow::Error) -> bool {
    err.chain().any(|c| {
        c.downcast_ref::<io::Error>()
            .is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe)
    })
}

fn run() -> anyhow::Result<()> {
    let args = expand_config(std::env::args().collect())?;
    let cli = Cli::try_parse_from(args).unwrap_or_else(|e| e.exit());
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            bail!(UsageError("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .context("cannot start worker threads")?;
    }
    match &cli.command {
        Command::Design(a) => cmd_design(a),
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::CapacitySweep(a) => cmd_capacity_sweep(a),
        Command::Codebook(a) => cmd_codebook(a),
        Command::Simulate(a) => cmd_simulate(a),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
