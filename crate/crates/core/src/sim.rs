//! Seeded Monte-Carlo rate experiments and their CSV output.
//!
//! Every trial draws its misalignment from its own ChaCha8 stream, selected
//! by `(seed, trial index)`. Results therefore do not depend on scheduling,
//! and every `(N, D)` scenario sees the same angle draws for a given trial.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{build_channel, closed_form_svd, ChannelMatrix, ChannelModel};
use crate::design::{
    db_to_linear, radii_from_beta, search_beta_opt, water_fill, DEFAULT_BETA_MAX,
    DEFAULT_RESOLUTION,
};
use crate::error::{Error, Result};
use crate::geometry::{AngleMode, ArrayConfig, Misalignment};
use crate::spectrum::{condition_of, spectrum};
use crate::transceiver::{
    approx_power_allocation, build_codebook, capacity_rate, codebook_rate, identity_rate,
    optimal_precoder_rate, zf_rate, zf_sic_rate, Codebook, Quantization, RateScheme,
    DEFAULT_PHI_RANGE,
};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const DEFAULT_CARRIER_HZ: f64 = 75e9;

/// Allocation used inside codebook selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CodebookPower {
    /// Water-filling on the aligned spectrum `σ(β, 0)`.
    #[default]
    Approximate,
    /// Water-filling on the true spectrum of each trial.
    Exact,
}

/// Parameters shared by the Monte-Carlo pipelines.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialConfig {
    pub n_trials: usize,
    pub seed: u64,
    /// Half-width of the uniform draws of `φ_x`, `φ_y`, `φ_cs` and `θ_o`.
    pub angle_range_small: f64,
    /// Half-width of the uniform draw of `θ_cs`.
    pub theta_cs_range: f64,
    pub snr_db: f64,
    pub distances: Vec<f64>,
    pub n_antennas_list: Vec<usize>,
    /// `(L1, L2)` for the rate sweep's codebook.
    pub codebook_bits: (u32, u32),
    pub wavelength: f64,
    /// Distance at which the (equal) radii are optimized and then frozen.
    pub design_distance: f64,
    pub phi_range: (f64, f64),
    pub quantization: Quantization,
    pub model: ChannelModel,
    pub codebook_power: CodebookPower,
}

impl Default for TrialConfig {
    fn default() -> Self {
        Self {
            n_trials: 100,
            seed: 1,
            angle_range_small: 10f64.to_radians(),
            theta_cs_range: std::f64::consts::PI,
            snr_db: 15.0,
            distances: (0..9).map(|i| 100.0 + 50.0 * i as f64).collect(),
            n_antennas_list: vec![4, 8, 12, 16],
            codebook_bits: (5, 3),
            wavelength: SPEED_OF_LIGHT / DEFAULT_CARRIER_HZ,
            design_distance: 100.0,
            phi_range: DEFAULT_PHI_RANGE,
            quantization: Quantization::SineUniform,
            model: ChannelModel::Approximate,
            codebook_power: CodebookPower::Approximate,
        }
    }
}

impl TrialConfig {
    /// Defaults of the codebook bit study: 16 antennas at 300 m.
    pub fn bit_sweep_default() -> Self {
        Self {
            distances: vec![300.0],
            n_antennas_list: vec![16],
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.n_trials == 0 {
            return bad("trials must be at least 1".into());
        }
        for (name, v) in [
            ("angle range", self.angle_range_small),
            ("theta_cs range", self.theta_cs_range),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return bad(format!("{name} must be finite and non-negative, got {v}"));
            }
        }
        if self.angle_range_small >= std::f64::consts::FRAC_PI_2 {
            return bad("angle range must be below pi/2".into());
        }
        if !self.snr_db.is_finite() {
            return bad("snr must be finite".into());
        }
        for (name, v) in [
            ("wavelength", self.wavelength),
            ("design distance", self.design_distance),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if self.distances.is_empty() {
            return Err(Error::Empty("distance list"));
        }
        if let Some(d) = self
            .distances
            .iter()
            .find(|d| !(d.is_finite() && **d > 0.0))
        {
            return bad(format!("distances must be positive, got {d}"));
        }
        if self.n_antennas_list.is_empty() {
            return Err(Error::Empty("antenna count list"));
        }
        if let Some(n) = self
            .n_antennas_list
            .iter()
            .find(|n| **n < 2 || **n % 2 != 0)
        {
            return bad(format!(
                "antenna counts must be even and at least 2, got {n}"
            ));
        }
        build_codebook(
            self.codebook_bits.0,
            self.codebook_bits.1,
            self.phi_range,
            self.quantization,
        )?;
        Ok(())
    }
}

/// Generator for one trial: the seed picks the key, the trial picks the stream.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn symmetric(rng: &mut ChaCha8Rng, half_width: f64) -> f64 {
    // Always consume one draw so streams stay aligned when a range is zero.
    let u: f64 = rng.gen();
    half_width * (2.0 * u - 1.0)
}

/// Draws `θ_o, θ_cs, φ_cs, φ_x, φ_y` (in that order) uniformly on their
/// symmetric ranges. `θ_o` is clamped to `±π/N`, and a negative `φ_cs` is
/// folded into `θ_cs` (same physical position).
pub fn draw_misalignment(
    rng: &mut ChaCha8Rng,
    cfg: &TrialConfig,
    n_antennas: usize,
) -> Result<Misalignment<f64>> {
    let theta_o = symmetric(rng, cfg.angle_range_small);
    let theta_cs = symmetric(rng, cfg.theta_cs_range);
    let phi_cs = symmetric(rng, cfg.angle_range_small);
    let phi_x = symmetric(rng, cfg.angle_range_small);
    let phi_y = symmetric(rng, cfg.angle_range_small);
    let bound = std::f64::consts::PI / n_antennas as f64;
    Misalignment::new(
        n_antennas,
        theta_o.clamp(-bound, bound),
        theta_cs,
        phi_cs,
        phi_x,
        phi_y,
        AngleMode::Permissive,
    )
}

/// One CSV record. `trial == -1` marks the mean over all trials.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub scenario: String,
    pub n_antennas: usize,
    pub distance_m: f64,
    pub scheme: String,
    pub trial: i64,
    pub rate_bps_hz: f64,
    pub beta: f64,
    pub cond_number: f64,
}

impl ResultRow {
    pub fn is_aggregate(&self) -> bool {
        self.trial < 0
    }
}

pub const CSV_HEADER: &str =
    "scenario,n_antennas,distance_m,scheme,trial,rate_bps_hz,beta,cond_number";

/// `%.9g`-style formatting; non-finite values print as `inf`, `-inf`, `nan`.
pub fn format_g9(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..9).contains(&exp) {
        trim_zeros(&format!("{:.*}", (8 - exp) as usize, x))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

pub fn write_csv<W: Write>(rows: &[ResultRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.scenario,
            r.n_antennas,
            format_g9(r.distance_m),
            r.scheme,
            r.trial,
            format_g9(r.rate_bps_hz),
            format_g9(r.beta),
            format_g9(r.cond_number),
        )?;
    }
    Ok(())
}

/// Mean rate of the aggregate row matching the given keys.
pub fn aggregate_rate(
    rows: &[ResultRow],
    scenario: &str,
    n_antennas: usize,
    distance_m: f64,
    scheme: &str,
) -> Option<f64> {
    rows.iter()
        .find(|r| {
            r.is_aggregate()
                && r.scenario == scenario
                && r.n_antennas == n_antennas
                && r.distance_m == distance_m
                && r.scheme == scheme
        })
        .map(|r| r.rate_bps_hz)
}

/// Equal radius that is optimal at `cfg.design_distance` for `n` antennas.
pub fn design_radius(cfg: &TrialConfig, n_antennas: usize) -> Result<f64> {
    let d = search_beta_opt(
        n_antennas,
        0.0,
        cfg.snr_db,
        DEFAULT_BETA_MAX,
        DEFAULT_RESOLUTION,
    )?;
    let r = radii_from_beta(d.beta_opt, cfg.wavelength, cfg.design_distance, true)?;
    Ok(r.equal.expect("equal radii requested"))
}

/// Scenario label of [`run_rate_sweep`].
pub const RATE_SWEEP: &str = "rate-sweep";

/// Schemes reported by [`run_rate_sweep`], in output order.
pub const RATE_SWEEP_SCHEMES: [RateScheme; 6] = [
    RateScheme::Capacity,
    RateScheme::OptimalPrecoder,
    RateScheme::Codebook,
    RateScheme::Identity,
    RateScheme::Zf,
    RateScheme::ZfSic,
];

/// A zero-forcing receiver carries nothing over a singular channel.
fn rate_or_zero(r: Result<f64>) -> Result<f64> {
    match r {
        Err(Error::SingularChannel) => Ok(0.0),
        other => other,
    }
}

struct Scenario {
    array: ArrayConfig<f64>,
    beta: f64,
    snr: f64,
}

impl Scenario {
    fn new(cfg: &TrialConfig, n: usize, radius: f64, distance: f64) -> Result<Self> {
        let array = ArrayConfig::new(n, cfg.wavelength, radius, radius, distance)?;
        array.check_far_field()?;
        Ok(Self {
            beta: array.rpdr(),
            array,
            snr: db_to_linear(cfg.snr_db),
        })
    }

    fn channel(&self, cfg: &TrialConfig, trial: usize) -> Result<ChannelMatrix<f64>> {
        let mut rng = trial_rng(cfg.seed, trial as u64);
        let mis = draw_misalignment(&mut rng, cfg, self.array.n_antennas())?;
        build_channel(&self.array, &mis, cfg.model)
    }

    fn codebook_power(
        &self,
        cfg: &TrialConfig,
        h: &ChannelMatrix<f64>,
    ) -> Result<crate::design::PowerAllocation<f64>> {
        match cfg.codebook_power {
            CodebookPower::Approximate => approx_power_allocation(&self.array, cfg.snr_db),
            CodebookPower::Exact => {
                let sigma = closed_form_svd(&self.array, h.misalignment())?.sigma;
                water_fill(&sigma, self.snr, 1.0)
            }
        }
    }
}

fn mean(v: impl Iterator<Item = f64>, n: usize) -> f64 {
    v.sum::<f64>() / n as f64
}

/// Rates of every scheme for each `(N, D, trial)`, followed by per-scheme
/// means. Radii are fixed per `N` at the optimum for `design_distance`.
pub fn run_rate_sweep(cfg: &TrialConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let (l1, l2) = cfg.codebook_bits;
    let cb = build_codebook(l1, l2, cfg.phi_range, cfg.quantization)?;
    let mut scenarios = Vec::new();
    for &n in &cfg.n_antennas_list {
        let radius = design_radius(cfg, n)?;
        for &d in &cfg.distances {
            scenarios.push(Scenario::new(cfg, n, radius, d)?);
        }
    }

    let mut rows = Vec::new();
    for sc in &scenarios {
        let n = sc.array.n_antennas();
        let d = sc.array.distance();
        let trials: Vec<([f64; 6], f64)> = (0..cfg.n_trials)
            .into_par_iter()
            .map(|t| rate_trial(cfg, sc, &cb, t))
            .collect::<Result<_>>()?;
        for (t, (rates, cond)) in trials.iter().enumerate() {
            for (scheme, &rate) in RATE_SWEEP_SCHEMES.iter().zip(rates) {
                rows.push(ResultRow {
                    scenario: RATE_SWEEP.into(),
                    n_antennas: n,
                    distance_m: d,
                    scheme: scheme.name().into(),
                    trial: t as i64,
                    rate_bps_hz: rate,
                    beta: sc.beta,
                    cond_number: *cond,
                });
            }
        }
        let design_cond = condition_of(&spectrum(n, sc.beta, 0.0)?);
        for (k, scheme) in RATE_SWEEP_SCHEMES.iter().enumerate() {
            rows.push(ResultRow {
                scenario: RATE_SWEEP.into(),
                n_antennas: n,
                distance_m: d,
                scheme: scheme.name().into(),
                trial: -1,
                rate_bps_hz: mean(trials.iter().map(|t| t.0[k]), cfg.n_trials),
                beta: sc.beta,
                cond_number: design_cond,
            });
        }
    }
    Ok(rows)
}

fn rate_trial(
    cfg: &TrialConfig,
    sc: &Scenario,
    cb: &Codebook<f64>,
    t: usize,
) -> Result<([f64; 6], f64)> {
    let h = sc.channel(cfg, t)?;
    let m = h.entries();
    let cap = capacity_rate(m, sc.snr, 1.0)?;
    let cond = condition_of(&closed_form_svd(&sc.array, h.misalignment())?.sigma);
    let opt = optimal_precoder_rate(&h, sc.snr, 1.0)?.rate;
    let p = sc.codebook_power(cfg, &h)?;
    let (_, cbr) = codebook_rate(&h, cb, &p)?;
    let id = identity_rate(m, sc.snr, 1.0)?.rate;
    let zf = rate_or_zero(zf_rate(m, sc.snr, 1.0).map(|r| r.rate))?;
    let sic = rate_or_zero(zf_sic_rate(m, sc.snr, 1.0).map(|r| r.rate))?;
    Ok(([cap.rate, opt, cbr.rate, id, zf, sic], cond))
}

/// Which of the two angle budgets is held fixed in a bit-sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitFamily {
    L1Fixed,
    L2Fixed,
}

impl BitFamily {
    pub fn name(&self) -> &'static str {
        match self {
            BitFamily::L1Fixed => "l1-fixed",
            BitFamily::L2Fixed => "l2-fixed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BitPoint {
    pub family: BitFamily,
    pub l1: u32,
    pub l2: u32,
}

impl BitPoint {
    pub fn total(&self) -> u32 {
        self.l1 + self.l2
    }

    /// Scenario label, e.g. `l2-fixed:l1=5:l2=3`.
    pub fn label(&self) -> String {
        format!("{}:l1={}:l2={}", self.family.name(), self.l1, self.l2)
    }
}

/// The fixed budget takes 1, 2 and 3 bits while the other grows from 1 to 7.
pub fn default_bit_grid() -> Vec<BitPoint> {
    bit_grid(7)
}

/// Both families, with the growing budget running from 1 to `grow_max`.
pub fn bit_grid(grow_max: u32) -> Vec<BitPoint> {
    let mut grid = Vec::new();
    for family in [BitFamily::L2Fixed, BitFamily::L1Fixed] {
        for fixed in 1..=3 {
            for grown in 1..=grow_max {
                let (l1, l2) = match family {
                    BitFamily::L2Fixed => (grown, fixed),
                    BitFamily::L1Fixed => (fixed, grown),
                };
                grid.push(BitPoint { family, l1, l2 });
            }
        }
    }
    grid
}

pub const BIT_SWEEP_SCHEMES: [(Quantization, &str); 2] = [
    (Quantization::SineUniform, "codebook-sine"),
    (Quantization::Linear, "codebook-linear"),
];

/// Codebook rate against bit budget, for both quantizations, at every
/// `(N, D)` of `cfg` (one each by [`TrialConfig::bit_sweep_default`]).
pub fn run_codebook_bit_sweep(cfg: &TrialConfig, grid: &[BitPoint]) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    if grid.is_empty() {
        return Err(Error::Empty("bit grid"));
    }
    let mut books = Vec::with_capacity(grid.len() * BIT_SWEEP_SCHEMES.len());
    for point in grid {
        for (q, _) in BIT_SWEEP_SCHEMES {
            books.push(build_codebook(point.l1, point.l2, cfg.phi_range, q)?);
        }
    }

    let mut rows = Vec::new();
    for &n in &cfg.n_antennas_list {
        let radius = design_radius(cfg, n)?;
        for &d in &cfg.distances {
            let sc = Scenario::new(cfg, n, radius, d)?;
            let trials: Vec<Vec<f64>> = (0..cfg.n_trials)
                .into_par_iter()
                .map(|t| {
                    let h = sc.channel(cfg, t)?;
                    let p = sc.codebook_power(cfg, &h)?;
                    books
                        .iter()
                        .map(|cb| Ok(codebook_rate(&h, cb, &p)?.1.rate))
                        .collect()
                })
                .collect::<Result<_>>()?;
            let cond = condition_of(&spectrum(n, sc.beta, 0.0)?);
            for (k, point) in grid.iter().enumerate() {
                for (j, (_, scheme)) in BIT_SWEEP_SCHEMES.iter().enumerate() {
                    let col = k * BIT_SWEEP_SCHEMES.len() + j;
                    let row = |trial: i64, rate: f64| ResultRow {
                        scenario: point.label(),
                        n_antennas: n,
                        distance_m: d,
                        scheme: scheme.to_string(),
                        trial,
                        rate_bps_hz: rate,
                        beta: sc.beta,
                        cond_number: cond,
                    };
                    rows.extend(
                        trials
                            .iter()
                            .enumerate()
                            .map(|(t, r)| row(t as i64, r[col])),
                    );
                    rows.push(row(-1, mean(trials.iter().map(|r| r[col]), cfg.n_trials)));
                }
            }
        }
    }
    Ok(rows)
}
