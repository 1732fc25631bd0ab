//! Receivers, precoders and achievable rates.
//!
//! The quantized-codebook precoder exploits the fact that only the
//! center-shift angles enter the transmit-side phase `T_t`; the receiver
//! quantizes `(θ_cs, φ_cs)` and feeds back an index into a shared table of
//! `F̄ = T̄_t Q`.

use num_complex::Complex;
use rayon::prelude::*;

use crate::channel::{closed_form_svd, dft_matrix, numerical_svd, ChannelMatrix};
use crate::design::{db_to_linear, water_fill, PowerAllocation};
use crate::error::{Error, Result};
use crate::geometry::ArrayConfig;
use crate::linalg::CMatrix;
use crate::scalar::{cis, Scalar};
use crate::spectrum::spectrum;

/// Default `φ_cs` quantization interval in radians.
pub const DEFAULT_PHI_RANGE: (f64, f64) = (-0.175, 0.175);

/// Largest bit count accepted per angle.
pub const MAX_BITS_PER_ANGLE: u32 = 16;

/// How codebook angles are placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Quantization {
    /// Cell midpoints uniformly spaced in `sin(angle)`.
    #[default]
    SineUniform,
    /// Cell midpoints uniformly spaced in the angle itself.
    Linear,
}

/// Table of `2^{L1} · 2^{L2}` quantized `(θ̄_cs, φ̄_cs)` pairs.
///
/// Entry `l` (1-based) is `(θ̄(i), φ̄(j))` with `l − 1 = i · 2^{L2} + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook<T> {
    l1_bits: u32,
    l2_bits: u32,
    phi_range: (T, T),
    quantization: Quantization,
    theta_levels: Vec<T>,
    phi_levels: Vec<T>,
}

impl<T: Scalar> Codebook<T> {
    pub fn l1_bits(&self) -> u32 {
        self.l1_bits
    }
    pub fn l2_bits(&self) -> u32 {
        self.l2_bits
    }
    pub fn total_bits(&self) -> u32 {
        self.l1_bits + self.l2_bits
    }
    pub fn phi_range(&self) -> (T, T) {
        self.phi_range
    }
    pub fn quantization(&self) -> Quantization {
        self.quantization
    }
    pub fn theta_levels(&self) -> &[T] {
        &self.theta_levels
    }
    pub fn phi_levels(&self) -> &[T] {
        &self.phi_levels
    }
    pub fn len(&self) -> usize {
        self.theta_levels.len() * self.phi_levels.len()
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(θ̄_cs, φ̄_cs)` for a 1-based index.
    pub fn entry(&self, index: usize) -> Result<(T, T)> {
        if index == 0 || index > self.len() {
            return Err(Error::IndexOutOfRange {
                index,
                n: self.len(),
            });
        }
        let k = index - 1;
        let m = self.phi_levels.len();
        Ok((self.theta_levels[k / m], self.phi_levels[k % m]))
    }

    /// All entries in index order.
    pub fn entries(&self) -> Vec<(T, T)> {
        self.theta_levels
            .iter()
            .flat_map(|&t| self.phi_levels.iter().map(move |&p| (t, p)))
            .collect()
    }
}

/// Midpoints of `2^bits` equal cells of `[lo, hi]`.
fn midpoints<T: Scalar>(lo: T, hi: T, bits: u32) -> Vec<T> {
    let cells = 1usize << bits;
    let width = (hi - lo) / T::from_index(cells);
    (0..cells)
        .map(|i| lo + width * (T::from_index(i) + T::lit(0.5)))
        .collect()
}

/// Builds the table. `θ_cs` covers `[−π/2, π/2]`; `φ_cs` covers `phi_range`,
/// which must be a non-empty subinterval of `(−π/2, π/2)`.
pub fn build_codebook<T: Scalar>(
    l1_bits: u32,
    l2_bits: u32,
    phi_range: (T, T),
    quantization: Quantization,
) -> Result<Codebook<T>> {
    if l1_bits > MAX_BITS_PER_ANGLE || l2_bits > MAX_BITS_PER_ANGLE {
        return Err(Error::InvalidConfig(format!(
            "at most {MAX_BITS_PER_ANGLE} bits per angle"
        )));
    }
    let (lo, hi) = phi_range;
    let half_pi = T::FRAC_PI_2();
    if !(lo < hi) {
        return Err(Error::Empty("phi range"));
    }
    if !(lo > -half_pi && hi < half_pi) {
        return Err(Error::InvalidConfig(
            "phi range must lie inside (-pi/2, pi/2)".into(),
        ));
    }
    let (theta_levels, phi_levels) = match quantization {
        Quantization::SineUniform => (
            midpoints(-T::one(), T::one(), l1_bits)
                .into_iter()
                .map(T::asin)
                .collect(),
            midpoints(lo.sin(), hi.sin(), l2_bits)
                .into_iter()
                .map(T::asin)
                .collect(),
        ),
        Quantization::Linear => (
            midpoints(-half_pi, half_pi, l1_bits),
            midpoints(lo, hi, l2_bits),
        ),
    };
    Ok(Codebook {
        l1_bits,
        l2_bits,
        phi_range,
        quantization,
        theta_levels,
        phi_levels,
    })
}

/// Where a precoder came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrecoderProvenance {
    /// Right singular vectors of the channel.
    OptimalSvd,
    /// Codebook entry (1-based index).
    Codebook(usize),
    /// Built from a given pair of center-shift angles.
    Angles,
    Identity,
    /// Plain DFT, no transmit phase correction.
    DftOnly,
}

/// Unitary `N × N` precoder.
#[derive(Debug, Clone)]
pub struct PrecoderMatrix<T> {
    pub matrix: CMatrix<T>,
    pub provenance: PrecoderProvenance,
}

impl<T: Scalar> PrecoderMatrix<T> {
    pub fn identity(n: usize) -> Self {
        Self {
            matrix: CMatrix::identity(n),
            provenance: PrecoderProvenance::Identity,
        }
    }

    pub fn dft(n: usize) -> Self {
        Self {
            matrix: dft_matrix(n),
            provenance: PrecoderProvenance::DftOnly,
        }
    }

    pub fn with_provenance(mut self, provenance: PrecoderProvenance) -> Self {
        self.provenance = provenance;
        self
    }
}

/// Transmit phases `exp(−j(2π/λ) R_t sin(θ_m + θ_cs) sin φ_cs)`.
fn tx_phase<T: Scalar>(cfg: &ArrayConfig<T>, theta_cs: T, phi_cs: T) -> Vec<Complex<T>> {
    let k = cfg.wavenumber();
    let sp = phi_cs.sin();
    (1..=cfg.n_antennas())
        .map(|m| cis(-k * cfg.radius_tx() * (cfg.element_angle(m) + theta_cs).sin() * sp))
        .collect()
}

/// `F = T̄_t Q` for the given center-shift angles.
pub fn precoder_from_angles<T: Scalar>(
    cfg: &ArrayConfig<T>,
    theta_cs: T,
    phi_cs: T,
) -> PrecoderMatrix<T> {
    let q = dft_matrix(cfg.n_antennas());
    PrecoderMatrix {
        matrix: q.scale_rows(&tx_phase(cfg, theta_cs, phi_cs)),
        provenance: PrecoderProvenance::Angles,
    }
}

/// `log₂ det(I + H F P Fᴴ Hᴴ)` with `P = diag(loading)`, split into
/// successive per-stream terms that sum to the total.
///
/// Evaluated as `det(I + P^{1/2} Fᴴ (HᴴH) F P^{1/2})` through a Cholesky
/// factor whose diagonal gives the per-stream split. Streams with zero
/// loading contribute nothing and are dropped before the products.
pub fn precoded_rate_streams<T: Scalar>(
    gram: &CMatrix<T>,
    f: &CMatrix<T>,
    loading: &[T],
) -> Result<Vec<T>> {
    let active: Vec<usize> = (0..loading.len())
        .filter(|&k| loading[k] > T::zero())
        .collect();
    let mut out = vec![T::zero(); loading.len()];
    if active.is_empty() {
        return Ok(out);
    }
    let n = f.rows();
    let fa = CMatrix::from_fn(n, active.len(), |r, c| f[(r, active[c])]);
    let root: Vec<Complex<T>> = active
        .iter()
        .map(|&k| Complex::new(loading[k].sqrt(), T::zero()))
        .collect();
    let inner = fa
        .adjoint_mul(&gram.matmul(&fa))
        .scale_rows(&root)
        .scale_cols(&root);
    let l = CMatrix::identity(active.len()).add(&inner).cholesky()?;
    for (i, &k) in active.iter().enumerate() {
        out[k] = T::lit(2.0) * l[(i, i)].re.log2();
    }
    Ok(out)
}

/// `log₂ det(I + H F P Fᴴ Hᴴ)`.
pub fn precoded_rate<T: Scalar>(h: &CMatrix<T>, f: &CMatrix<T>, loading: &[T]) -> Result<T> {
    Ok(precoded_rate_streams(&h.adjoint_mul(h), f, loading)?
        .into_iter()
        .sum())
}

/// Best codebook entry for `h` under the allocation `p`, as
/// `(1-based index, rate)`. Ties go to the smallest index.
pub fn select_codebook_index<T: Scalar>(
    h: &ChannelMatrix<T>,
    cb: &Codebook<T>,
    p: &PowerAllocation<T>,
) -> Result<(usize, T)> {
    if cb.is_empty() {
        return Err(Error::Empty("codebook"));
    }
    let gram = h.entries().adjoint_mul(h.entries());
    let loading = p.normalized();
    let cfg = h.config();
    let q = dft_matrix(cfg.n_antennas());
    let rates: Vec<T> = cb
        .entries()
        .par_iter()
        .map(|&(t, ph)| {
            let f = q.scale_rows(&tx_phase(cfg, t, ph));
            Ok(precoded_rate_streams(&gram, &f, &loading)?
                .into_iter()
                .sum())
        })
        .collect::<Result<_>>()?;
    let mut best = (1, rates[0]);
    for (i, &r) in rates.iter().enumerate().skip(1) {
        if r > best.1 {
            best = (i + 1, r);
        }
    }
    Ok(best)
}

/// Allocation designed on the aligned spectrum `σ_k(β, 0)`, with `N_o = 1`
/// and `P_T = 10^{snr_db/10}`.
pub fn approx_power_allocation<T: Scalar>(
    cfg: &ArrayConfig<T>,
    snr_db: T,
) -> Result<PowerAllocation<T>> {
    let sigmas = spectrum(cfg.n_antennas(), cfg.rpdr(), T::zero())?;
    water_fill(&sigmas, db_to_linear(snr_db), T::one())
}

/// Transmission scheme a rate belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RateScheme {
    Capacity,
    OptimalPrecoder,
    Codebook,
    Identity,
    Zf,
    ZfSic,
}

impl RateScheme {
    pub fn name(&self) -> &'static str {
        match self {
            RateScheme::Capacity => "capacity",
            RateScheme::OptimalPrecoder => "optimal-precoder",
            RateScheme::Codebook => "codebook",
            RateScheme::Identity => "identity",
            RateScheme::Zf => "zf",
            RateScheme::ZfSic => "zf-sic",
        }
    }
}

/// Sum rate and its per-stream split, in bits/s/Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct RateReport<T> {
    pub scheme: RateScheme,
    pub rate: T,
    pub per_stream: Vec<T>,
}

impl<T: Scalar> RateReport<T> {
    fn from_streams(scheme: RateScheme, per_stream: Vec<T>) -> Self {
        Self {
            scheme,
            rate: per_stream.iter().copied().sum(),
            per_stream,
        }
    }
}

fn check_power<T: Scalar>(p_total: T, noise: T) -> Result<()> {
    if !(p_total > T::zero() && p_total.is_finite() && noise > T::zero() && noise.is_finite()) {
        return Err(Error::InvalidConfig(
            "power and noise must be positive".into(),
        ));
    }
    Ok(())
}

/// Water-filled capacity from a numerical SVD of `h` (works for either model).
pub fn capacity_rate<T: Scalar>(h: &CMatrix<T>, p_total: T, noise: T) -> Result<RateReport<T>> {
    let svd = numerical_svd(h)?;
    let alloc = water_fill(&svd.sigma, p_total, noise)?;
    let per = svd
        .sigma
        .iter()
        .zip(alloc.powers())
        .map(|(&s, &p)| (T::one() + p * s * s / noise).log2())
        .collect();
    Ok(RateReport::from_streams(RateScheme::Capacity, per))
}

/// Rate of precoding with the closed-form `V` and water-filling on the
/// closed-form spectrum. Requires an approximate-model channel geometry.
pub fn optimal_precoder_rate<T: Scalar>(
    h: &ChannelMatrix<T>,
    p_total: T,
    noise: T,
) -> Result<RateReport<T>> {
    let svd = closed_form_svd(h.config(), h.misalignment())?;
    let alloc = water_fill(&svd.sigma, p_total, noise)?;
    let gram = h.entries().adjoint_mul(h.entries());
    let per = precoded_rate_streams(&gram, &svd.v, &alloc.normalized())?;
    Ok(RateReport::from_streams(RateScheme::OptimalPrecoder, per))
}

/// Codebook precoding: selects the best entry under `p` and reports its rate.
pub fn codebook_rate<T: Scalar>(
    h: &ChannelMatrix<T>,
    cb: &Codebook<T>,
    p: &PowerAllocation<T>,
) -> Result<(usize, RateReport<T>)> {
    let (index, _) = select_codebook_index(h, cb, p)?;
    let (t, ph) = cb.entry(index)?;
    let f = precoder_from_angles(h.config(), t, ph);
    let gram = h.entries().adjoint_mul(h.entries());
    let per = precoded_rate_streams(&gram, &f.matrix, &p.normalized())?;
    Ok((index, RateReport::from_streams(RateScheme::Codebook, per)))
}

/// No precoding (`F = I`) with `P_T / N` per antenna.
pub fn identity_rate<T: Scalar>(h: &CMatrix<T>, p_total: T, noise: T) -> Result<RateReport<T>> {
    check_power(p_total, noise)?;
    let n = h.cols();
    let load = vec![p_total / (T::from_index(n) * noise); n];
    let per = precoded_rate_streams(&h.adjoint_mul(h), &CMatrix::identity(n), &load)?;
    Ok(RateReport::from_streams(RateScheme::Identity, per))
}

/// Linear zero-forcing with equal power `p = P_T/N`:
/// `SNR_k = p / (N_o [(HᴴH)⁻¹]_kk)`.
pub fn zf_rate<T: Scalar>(h: &CMatrix<T>, p_total: T, noise: T) -> Result<RateReport<T>> {
    check_power(p_total, noise)?;
    let p = p_total / T::from_index(h.cols());
    let inv_diag = h
        .adjoint_mul(h)
        .inverse_diagonal_hpd()
        .map_err(|_| Error::SingularChannel)?;
    if inv_diag.iter().any(|d| !(d.is_finite() && *d > T::zero())) {
        return Err(Error::SingularChannel);
    }
    let per = inv_diag
        .iter()
        .map(|&g| (T::one() + p / (noise * g)).log2())
        .collect();
    Ok(RateReport::from_streams(RateScheme::Zf, per))
}

/// Zero-forcing with successive cancellation in natural stream order, equal
/// power: `SNR_k = p |r_kk|² / N_o` from `H = QR`.
pub fn zf_sic_rate<T: Scalar>(h: &CMatrix<T>, p_total: T, noise: T) -> Result<RateReport<T>> {
    check_power(p_total, noise)?;
    let n = h.cols();
    if h.rows() < n {
        return Err(Error::SingularChannel);
    }
    let p = p_total / T::from_index(n);
    let (_, r) = h.qr();
    let floor = h.frobenius_norm() * T::epsilon() * T::from_index(n);
    let diag: Vec<T> = (0..n).map(|k| r[(k, k)].norm()).collect();
    if diag.iter().any(|&d| !(d > floor)) {
        return Err(Error::SingularChannel);
    }
    let per = diag
        .iter()
        .map(|&d| (T::one() + p * d * d / noise).log2())
        .collect();
    Ok(RateReport::from_streams(RateScheme::ZfSic, per))
}
