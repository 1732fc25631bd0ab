//! Line-of-sight channel matrix, its circulant factorization and SVDs.
//!
//! Under the far-field model the channel splits as `H = T_r H_A T_tᴴ`, where
//! `H_A` is circulant (so `H_A = Q Δ_A Qᴴ` with the unitary DFT `Q`) and
//! `T_t`, `T_r` are diagonal phase matrices. That gives the SVD
//! `U = T_r Q S`, `Σ = |Δ_A|`, `V = T_t Q` with no iteration at all.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::geometry::{
    distance_excess_exact, rx_displacements, tx_displacements, ArrayConfig, Misalignment,
};
use crate::linalg::{jacobi_svd, CMatrix};
use crate::scalar::{cis, Scalar};

/// Below this magnitude a diagonal entry of `Δ_A` counts as a zero singular
/// value and its phase is taken to be 1.
pub const ZERO_SINGULAR_THRESHOLD: f64 = 1e-12;

/// Sweep cap for the numerical SVD.
pub const JACOBI_MAX_SWEEPS: usize = 30;

/// Which distance model produced a channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelModel {
    /// Element-to-element Euclidean distances.
    ExactDistance,
    /// Far-field decomposition `d_A − τ_t + τ_r`.
    Approximate,
}

/// Normalized free-space response `h(n, m) = exp(−j 2π d(n, m) / λ)`.
///
/// Rows index receive antennas, columns transmit antennas (both 0-based in
/// the matrix, 1-based in the geometry).
#[derive(Debug, Clone)]
pub struct ChannelMatrix<T> {
    entries: CMatrix<T>,
    model: ChannelModel,
    cfg: ArrayConfig<T>,
    mis: Misalignment<T>,
}

impl<T: Scalar> ChannelMatrix<T> {
    pub fn entries(&self) -> &CMatrix<T> {
        &self.entries
    }
    pub fn model(&self) -> ChannelModel {
        self.model
    }
    pub fn config(&self) -> &ArrayConfig<T> {
        &self.cfg
    }
    pub fn misalignment(&self) -> &Misalignment<T> {
        &self.mis
    }
    pub fn n_antennas(&self) -> usize {
        self.cfg.n_antennas()
    }
    pub fn into_entries(self) -> CMatrix<T> {
        self.entries
    }
}

/// Diagonal matrix with unit-modulus entries.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDiagonal<T> {
    diagonal: Vec<Complex<T>>,
}

impl<T: Scalar> PhaseDiagonal<T> {
    /// `diag(exp(j·phase_k))`.
    pub fn from_phases(phases: &[T]) -> Self {
        Self {
            diagonal: phases.iter().map(|&p| cis(p)).collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            diagonal: vec![Complex::one(); n],
        }
    }

    /// Rejects entries whose modulus is off by more than `1e-10`.
    pub fn new(diagonal: Vec<Complex<T>>) -> Result<Self> {
        let tol = T::lit(1e-10).max(T::lit(64.0) * T::epsilon());
        if diagonal
            .iter()
            .any(|d| !((d.norm() - T::one()).abs() <= tol))
        {
            return Err(Error::InvalidConfig(
                "phase diagonal entries must have unit modulus".into(),
            ));
        }
        Ok(Self { diagonal })
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.diagonal
    }

    pub fn len(&self) -> usize {
        self.diagonal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diagonal.is_empty()
    }

    pub fn to_matrix(&self) -> CMatrix<T> {
        CMatrix::from_diag(&self.diagonal)
    }
}

/// `h = u · diag(sigma) · vᴴ`.
///
/// From [`closed_form_svd`] the singular values are in DFT-index order and
/// unsorted; from [`numerical_svd`] they are sorted descending.
#[derive(Debug, Clone)]
pub struct SvdTriple<T> {
    pub u: CMatrix<T>,
    pub sigma: Vec<T>,
    pub v: CMatrix<T>,
}

impl<T: Scalar> SvdTriple<T> {
    pub fn reconstruct(&self) -> CMatrix<T> {
        let s: Vec<Complex<T>> = self
            .sigma
            .iter()
            .map(|&x| Complex::new(x, T::zero()))
            .collect();
        self.u.scale_cols(&s).matmul(&self.v.adjoint())
    }

    /// Largest entrywise deviation of the reconstruction from `h`.
    pub fn reconstruction_error(&self, h: &CMatrix<T>) -> T {
        self.reconstruct().max_abs_diff(h)
    }

    /// Singular values sorted descending.
    pub fn sorted_sigma(&self) -> Vec<T> {
        let mut s = self.sigma.clone();
        s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        s
    }
}

/// Unitary DFT matrix, `q(a, b) = exp(−j 2π a b / n) / √n` with 0-based `a, b`.
pub fn dft_matrix<T: Scalar>(n: usize) -> CMatrix<T> {
    let scale = T::one() / T::from_index(n).sqrt();
    let step = -T::TAU() / T::from_index(n);
    CMatrix::from_fn(n, n, |a, b| {
        // Reduce the exponent modulo n first so large products keep full precision.
        cis(step * T::from_index((a * b) % n)).scale(scale)
    })
}

/// Channel for the given geometry under the chosen distance model.
///
/// The approximate model enforces the far-field guard of `cfg`.
pub fn build_channel<T: Scalar>(
    cfg: &ArrayConfig<T>,
    mis: &Misalignment<T>,
    model: ChannelModel,
) -> Result<ChannelMatrix<T>> {
    let n = cfg.n_antennas();
    let k = cfg.wavenumber();
    let carrier = carrier_phase(cfg);
    let entries = match model {
        ChannelModel::Approximate => {
            cfg.check_far_field()?;
            let tau_t = tx_displacements(cfg, mis);
            let tau_r = rx_displacements(cfg, mis);
            let coupling = cfg.radius_tx() * cfg.radius_rx() / cfg.distance();
            CMatrix::from_fn(n, n, |r, c| {
                let angle = cfg.element_angle(r + 1) - cfg.element_angle(c + 1) + mis.theta_o();
                let excess = -coupling * angle.cos() - tau_t[c] + tau_r[r];
                carrier * cis(-k * excess)
            })
        }
        ChannelModel::ExactDistance => {
            let mut data = Vec::with_capacity(n * n);
            for r in 1..=n {
                for c in 1..=n {
                    data.push(carrier * cis(-k * distance_excess_exact(cfg, mis, r, c)?));
                }
            }
            CMatrix::from_row_major(n, n, data)
        }
    };
    Ok(ChannelMatrix {
        entries,
        model,
        cfg: *cfg,
        mis: *mis,
    })
}

/// `(T_t, T_r)` with `T_t(m) = exp(−j 2π τ_t(m) / λ)` and likewise for `T_r`.
pub fn phase_displacements<T: Scalar>(
    cfg: &ArrayConfig<T>,
    mis: &Misalignment<T>,
) -> (PhaseDiagonal<T>, PhaseDiagonal<T>) {
    let k = cfg.wavenumber();
    let t: Vec<T> = tx_displacements(cfg, mis)
        .into_iter()
        .map(|x| -k * x)
        .collect();
    let r: Vec<T> = rx_displacements(cfg, mis)
        .into_iter()
        .map(|x| -k * x)
        .collect();
    (
        PhaseDiagonal::from_phases(&t),
        PhaseDiagonal::from_phases(&r),
    )
}

/// `e^{−j2πD/λ}`, reduced to a fraction of a cycle before the exponential so
/// that the small per-element phases added to it keep their precision.
pub fn carrier_phase<T: Scalar>(cfg: &ArrayConfig<T>) -> Complex<T> {
    let cycles = cfg.distance() / cfg.wavelength();
    cis(-T::TAU() * cycles.fract())
}

/// First column of the circulant `H_A`: `h_A(j) = e^{−j2πD/λ} e^{jβ cos(2πj/N + θ_o)}`
/// for lag `j = (n − m) mod N`.
fn circulant_column<T: Scalar>(cfg: &ArrayConfig<T>, theta_o: T) -> Vec<Complex<T>> {
    let n = cfg.n_antennas();
    let beta = cfg.rpdr();
    let carrier = carrier_phase(cfg);
    (0..n)
        .map(|j| {
            let lag = T::TAU() * T::from_index(j) / T::from_index(n);
            carrier * cis(beta * (lag + theta_o).cos())
        })
        .collect()
}

/// Circulant part `H_A` and its eigenvalues `Δ_A` (so `H_A = Q diag(Δ_A) Qᴴ`).
///
/// Every entry of `H_A` is copied from one lag vector, so the wrapped
/// diagonals are bitwise equal.
pub fn circulant_factor<T: Scalar>(
    cfg: &ArrayConfig<T>,
    theta_o: T,
) -> (CMatrix<T>, Vec<Complex<T>>) {
    let n = cfg.n_antennas();
    let col = circulant_column(cfg, theta_o);
    let h_a = CMatrix::from_fn(n, n, |r, c| col[(r + n - c) % n]);
    let step = T::TAU() / T::from_index(n);
    let delta = (0..n)
        .map(|b| {
            col.iter()
                .enumerate()
                .map(|(j, &h)| h * cis(step * T::from_index((j * b) % n)))
                .fold(Complex::zero(), |acc, z| acc + z)
        })
        .collect();
    (h_a, delta)
}

/// SVD of the approximate-model channel without iteration.
///
/// `sigma[k]` is `|Δ_A[k]|` in DFT order; zero singular values get a unit phase in `S`.
pub fn closed_form_svd<T: Scalar>(
    cfg: &ArrayConfig<T>,
    mis: &Misalignment<T>,
) -> Result<SvdTriple<T>> {
    cfg.check_far_field()?;
    let q = dft_matrix::<T>(cfg.n_antennas());
    let (t_t, t_r) = phase_displacements(cfg, mis);
    let (_, delta) = circulant_factor(cfg, mis.theta_o());
    let threshold = T::lit(ZERO_SINGULAR_THRESHOLD);
    let sigma: Vec<T> = delta.iter().map(|d| d.norm()).collect();
    let s: Vec<Complex<T>> = delta
        .iter()
        .zip(&sigma)
        .map(|(d, &m)| {
            if m < threshold {
                Complex::one()
            } else {
                d.unscale(m)
            }
        })
        .collect();
    Ok(SvdTriple {
        u: q.scale_rows(t_r.as_slice()).scale_cols(&s),
        sigma,
        v: q.scale_rows(t_t.as_slice()),
    })
}

/// Generic SVD by one-sided Jacobi, singular values sorted descending.
pub fn numerical_svd<T: Scalar>(matrix: &CMatrix<T>) -> Result<SvdTriple<T>> {
    if !matrix.is_finite() {
        return Err(Error::InvalidConfig("matrix has non-finite entries".into()));
    }
    let svd = jacobi_svd(matrix, JACOBI_MAX_SWEEPS, T::jacobi_tolerance())?;
    Ok(SvdTriple {
        u: svd.u,
        sigma: svd.sigma,
        v: svd.v,
    })
}
