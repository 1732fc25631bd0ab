//! Water-filling capacity and the search for the capacity-maximizing RPDR.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spectrum::{condition_of, spectrum};

/// Default upper end of the `β` search.
pub const DEFAULT_BETA_MAX: f64 = 14.0;
/// Default `β` grid step.
pub const DEFAULT_RESOLUTION: f64 = 0.01;
/// Golden-section stopping width.
pub const REFINE_TOLERANCE: f64 = 1e-4;
/// Capacities within this many bits/s/Hz count as a tie; the smaller `β` wins.
pub const TIE_TOLERANCE_BITS: f64 = 1e-6;

/// `10^(db/10)`.
pub fn db_to_linear<T: Scalar>(db: T) -> T {
    T::lit(10.0).powf(db / T::lit(10.0))
}

/// Per-stream powers with `Σ p_k = total`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerAllocation<T> {
    powers: Vec<T>,
    total: T,
    noise: T,
    water_level: T,
}

impl<T: Scalar> PowerAllocation<T> {
    /// Equal split of `total` over `n` streams.
    pub fn equal(n: usize, total: T, noise: T) -> Result<Self> {
        check_budget(total, noise)?;
        if n == 0 {
            return Err(Error::Empty("stream set"));
        }
        let p = total / T::from_index(n);
        Ok(Self {
            powers: vec![p; n],
            total,
            noise,
            water_level: T::nan(),
        })
    }

    pub fn powers(&self) -> &[T] {
        &self.powers
    }
    pub fn total(&self) -> T {
        self.total
    }
    pub fn noise(&self) -> T {
        self.noise
    }
    /// `μ` from water-filling; NaN for allocations not produced by it.
    pub fn water_level(&self) -> T {
        self.water_level
    }
    pub fn len(&self) -> usize {
        self.powers.len()
    }
    pub fn is_empty(&self) -> bool {
        self.powers.is_empty()
    }

    /// `p_k / N_o`, the loading used inside log-det rate expressions.
    pub fn normalized(&self) -> Vec<T> {
        self.powers.iter().map(|&p| p / self.noise).collect()
    }

    /// `Σ log₂(1 + p_k σ_k² / N_o)`.
    pub fn rate(&self, sigmas: &[T]) -> T {
        rate_with_powers(sigmas, &self.powers, self.noise)
    }

    /// Largest violation of the water-filling optimality conditions: active
    /// streams off the common level `μ`, inactive streams below it, and the
    /// budget mismatch relative to `P_T`.
    pub fn kkt_residual(&self, sigmas: &[T]) -> T {
        let mu = self.water_level;
        let mut worst = ((self.powers.iter().copied().sum::<T>() - self.total) / self.total).abs();
        for (&p, &s) in self.powers.iter().zip(sigmas) {
            let floor = self.noise / (s * s);
            let r = if p > T::zero() {
                (p + floor - mu).abs()
            } else if s > T::zero() {
                (mu - floor).max(T::zero())
            } else {
                T::zero()
            };
            worst = worst.max(r);
        }
        worst
    }
}

fn check_budget<T: Scalar>(total: T, noise: T) -> Result<()> {
    if !(total.is_finite() && total > T::zero()) {
        return Err(Error::InvalidConfig(format!(
            "total power must be positive, got {total}"
        )));
    }
    if !(noise.is_finite() && noise > T::zero()) {
        return Err(Error::InvalidConfig(format!(
            "noise power must be positive, got {noise}"
        )));
    }
    Ok(())
}

/// Capacity-optimal allocation `p_k = max(0, μ − N_o/σ_k²)`.
///
/// Streams are ordered by `N_o/σ_k²` and the largest active set whose weakest
/// member still gets non-negative power is taken. Zero singular values are
/// never active.
pub fn water_fill<T: Scalar>(sigmas: &[T], p_total: T, noise: T) -> Result<PowerAllocation<T>> {
    check_budget(p_total, noise)?;
    if sigmas.iter().any(|s| !(s.is_finite() && *s >= T::zero())) {
        return Err(Error::InvalidConfig(
            "singular values must be finite and non-negative".into(),
        ));
    }
    let floors: Vec<T> = sigmas.iter().map(|&s| noise / (s * s)).collect();
    let mut order: Vec<usize> = (0..sigmas.len())
        .filter(|&k| floors[k].is_finite())
        .collect();
    if order.is_empty() {
        return Err(Error::ZeroSpectrum);
    }
    order.sort_by(|&a, &b| floors[a].partial_cmp(&floors[b]).unwrap().then(a.cmp(&b)));

    let mut prefix = T::zero();
    let sums: Vec<T> = order
        .iter()
        .map(|&k| {
            prefix += floors[k];
            prefix
        })
        .collect();
    let mut active = 1;
    let mut mu = p_total + floors[order[0]];
    for n in (1..=order.len()).rev() {
        let level = (p_total + sums[n - 1]) / T::from_index(n);
        if level >= floors[order[n - 1]] {
            active = n;
            mu = level;
            break;
        }
    }
    let mut powers = vec![T::zero(); sigmas.len()];
    for &k in &order[..active] {
        powers[k] = (mu - floors[k]).max(T::zero());
    }
    Ok(PowerAllocation {
        powers,
        total: p_total,
        noise,
        water_level: mu,
    })
}

/// `Σ log₂(1 + p_k σ_k² / N_o)`.
pub fn rate_with_powers<T: Scalar>(sigmas: &[T], powers: &[T], noise: T) -> T {
    sigmas
        .iter()
        .zip(powers)
        .map(|(&s, &p)| (T::one() + p * s * s / noise).log2())
        .sum()
}

/// Water-filled capacity in bits/s/Hz.
pub fn capacity<T: Scalar>(sigmas: &[T], p_total: T, noise: T) -> Result<T> {
    Ok(water_fill(sigmas, p_total, noise)?.rate(sigmas))
}

/// Capacity with `P_T / N` on every stream.
pub fn equal_power_capacity<T: Scalar>(sigmas: &[T], p_total: T, noise: T) -> Result<T> {
    Ok(PowerAllocation::equal(sigmas.len(), p_total, noise)?.rate(sigmas))
}

/// Capacity of the circulant channel at `(β, θ_o)` with `SNR = P_T/N_o`, `N_o = 1`.
pub fn capacity_at<T: Scalar>(n_s: usize, beta: T, theta_o: T, snr_linear: T) -> Result<T> {
    capacity(&spectrum(n_s, beta, theta_o)?, snr_linear, T::one())
}

/// Outcome of [`search_beta_opt`].
#[derive(Debug, Clone, PartialEq)]
pub struct DesignResult<T> {
    pub beta_opt: T,
    /// bits/s/Hz at `beta_opt`.
    pub capacity: T,
    /// `R_t R_r` in m², once a wavelength and distance are attached.
    pub radii_product: Option<T>,
    /// `R_t = R_r` in m, when equal radii were requested.
    pub radius_equal: Option<T>,
    /// `max σ_k / min σ_k` at `beta_opt`.
    pub condition_number: T,
}

impl<T: Scalar> DesignResult<T> {
    /// Fills in the radii that realize `beta_opt` at the given geometry.
    pub fn with_geometry(mut self, wavelength: T, distance: T, equal_radii: bool) -> Result<Self> {
        let r = radii_from_beta(self.beta_opt, wavelength, distance, equal_radii)?;
        self.radii_product = Some(r.product);
        self.radius_equal = r.equal;
        Ok(self)
    }
}

/// Maximizes a unimodal `f` on `[a, b]` by golden-section search, returning
/// the best point seen (which is at least as good as `seed`, if given).
pub fn golden_section_max<T: Scalar>(
    f: impl Fn(T) -> Result<T>,
    mut a: T,
    mut b: T,
    tolerance: T,
    seed: Option<(T, T)>,
) -> Result<(T, T)> {
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let mut best = match seed {
        Some(s) => s,
        None => (a, f(a)?),
    };
    let consider = |x: T, fx: T, best: &mut (T, T)| {
        if fx > best.1 || (fx == best.1 && x < best.0) {
            *best = (x, fx);
        }
    };
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    consider(c, fc, &mut best);
    consider(d, fd, &mut best);
    while (b - a).abs() > tolerance {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
            consider(c, fc, &mut best);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
            consider(d, fd, &mut best);
        }
    }
    Ok(best)
}

/// Capacity over a `β` grid, in grid order.
pub fn capacity_curve<T: Scalar>(
    n_s: usize,
    theta_o: T,
    snr_db: T,
    grid: &[T],
) -> Result<Vec<(T, T)>> {
    let snr = db_to_linear(snr_db);
    grid.par_iter()
        .map(|&b| Ok((b, capacity_at(n_s, b, theta_o, snr)?)))
        .collect()
}

/// Finds `β°`, the smallest RPDR attaining the maximum capacity.
///
/// Capacity is scanned on `resolution, 2·resolution, …, beta_max`; every
/// local maximum of the scan is refined by golden section within its two
/// neighbouring cells, and the smallest refined `β` whose capacity is within
/// [`TIE_TOLERANCE_BITS`] of the best is returned.
pub fn search_beta_opt<T: Scalar>(
    n_s: usize,
    theta_o: T,
    snr_db: T,
    beta_max: T,
    resolution: T,
) -> Result<DesignResult<T>> {
    if !(beta_max.is_finite() && beta_max > T::zero()) {
        return Err(Error::InvalidConfig(format!(
            "beta_max must be positive, got {beta_max}"
        )));
    }
    if !(resolution.is_finite() && resolution > T::zero() && resolution <= beta_max) {
        return Err(Error::InvalidConfig(format!(
            "resolution must be in (0, beta_max], got {resolution}"
        )));
    }
    if !snr_db.is_finite() {
        return Err(Error::InvalidConfig("SNR must be finite".into()));
    }
    spectrum(n_s, T::zero(), theta_o)?;
    let snr = db_to_linear(snr_db);
    let steps = (beta_max / resolution + T::lit(1e-9))
        .floor()
        .to_usize()
        .unwrap_or(0)
        .max(1);
    let grid: Vec<T> = (1..=steps).map(|i| resolution * T::from_index(i)).collect();
    let curve = capacity_curve(n_s, theta_o, snr_db, &grid)?;
    let caps: Vec<T> = curve.iter().map(|c| c.1).collect();

    let last = caps.len() - 1;
    let peaks: Vec<usize> = (0..caps.len())
        .filter(|&i| (i == 0 || caps[i] >= caps[i - 1]) && (i == last || caps[i] >= caps[i + 1]))
        .collect();

    let tol = T::lit(REFINE_TOLERANCE);
    let f = |b: T| capacity_at(n_s, b, theta_o, snr);
    let mut candidates = Vec::with_capacity(peaks.len());
    for &i in &peaks {
        let lo = if i == 0 {
            grid[0] * T::lit(1e-3)
        } else {
            grid[i - 1]
        };
        let hi = if i == last { grid[last] } else { grid[i + 1] };
        candidates.push(golden_section_max(
            f,
            lo,
            hi,
            tol,
            Some((grid[i], caps[i])),
        )?);
    }
    let best = candidates
        .iter()
        .map(|c| c.1)
        .fold(T::neg_infinity(), T::max);
    let tie = T::lit(TIE_TOLERANCE_BITS);
    let (beta_opt, cap) = candidates
        .into_iter()
        .filter(|c| c.1 >= best - tie)
        .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
        .ok_or(Error::ZeroSpectrum)?;
    Ok(DesignResult {
        beta_opt,
        capacity: cap,
        radii_product: None,
        radius_equal: None,
        condition_number: condition_number(n_s, beta_opt, theta_o)?,
    })
}

/// Radii that realize a given `β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiiSolution<T> {
    /// `R_t R_r = β λ D / (2π)`.
    pub product: T,
    /// `√product` when equal radii were requested.
    pub equal: Option<T>,
}

impl<T: Scalar> RadiiSolution<T> {
    /// Receive radius that pairs with a chosen transmit radius.
    pub fn radius_rx_for(&self, radius_tx: T) -> T {
        self.product / radius_tx
    }
}

pub fn radii_from_beta<T: Scalar>(
    beta: T,
    wavelength: T,
    distance: T,
    equal_radii: bool,
) -> Result<RadiiSolution<T>> {
    for (name, v) in [
        ("beta", beta),
        ("wavelength", wavelength),
        ("distance", distance),
    ] {
        if !(v.is_finite() && v > T::zero()) {
            return Err(Error::InvalidConfig(format!(
                "{name} must be positive, got {v}"
            )));
        }
    }
    let product = beta * wavelength * distance / T::TAU();
    Ok(RadiiSolution {
        product,
        equal: equal_radii.then(|| product.sqrt()),
    })
}

/// `max σ_k / min σ_k` of the circulant spectrum; infinite on a null.
pub fn condition_number<T: Scalar>(n_s: usize, beta: T, theta_o: T) -> Result<T> {
    Ok(condition_of(&spectrum(n_s, beta, theta_o)?))
}
