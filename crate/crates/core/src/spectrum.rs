//! Singular values of the circulant channel as a function of the RPDR `β`
//! and the boresight rotation `θ_o`:
//!
//! `σ_k = |Σ_{i=0}^{N−1} exp(−j(2π i (k−1)/N − β cos(2π i/N + θ_o)))|`, `k = 1..=N`.
//!
//! Values are kept in DFT-index order; they are not sorted.

use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::{cis, Scalar};

/// `σ_k(β, θ_o)` for one 1-based index `k`.
pub fn singular_value<T: Scalar>(n_s: usize, beta: T, theta_o: T, k: usize) -> Result<T> {
    check_even(n_s)?;
    if k == 0 || k > n_s {
        return Err(Error::IndexOutOfRange { index: k, n: n_s });
    }
    Ok(sigma_unchecked(n_s, beta, theta_o, k - 1))
}

fn sigma_unchecked<T: Scalar>(n_s: usize, beta: T, theta_o: T, k0: usize) -> T {
    let step = T::TAU() / T::from_index(n_s);
    (0..n_s)
        .map(|i| {
            let dft = step * T::from_index((i * k0) % n_s);
            let ring = beta * (step * T::from_index(i) + theta_o).cos();
            cis(ring - dft)
        })
        .fold(Complex::zero(), |acc, z| acc + z)
        .norm()
}

/// All `N` singular values, DFT order.
pub fn spectrum<T: Scalar>(n_s: usize, beta: T, theta_o: T) -> Result<Vec<T>> {
    check_even(n_s)?;
    Ok((0..n_s)
        .map(|k0| sigma_unchecked(n_s, beta, theta_o, k0))
        .collect())
}

fn check_even(n_s: usize) -> Result<()> {
    if n_s < 2 || n_s % 2 != 0 {
        Err(Error::InvalidConfig(format!(
            "antenna count must be even and at least 2, got {n_s}"
        )))
    } else {
        Ok(())
    }
}

/// Ratio of the largest to the smallest singular value; infinite when the
/// smallest is zero up to rounding (below `16 N ε` relative to the largest).
pub fn condition_of<T: Scalar>(sigmas: &[T]) -> T {
    let max = sigmas.iter().copied().fold(T::zero(), T::max);
    let min = sigmas.iter().copied().fold(T::infinity(), T::min);
    let floor = max * T::epsilon() * T::lit(16.0) * T::from_index(sigmas.len());
    if min > floor {
        max / min
    } else {
        T::infinity()
    }
}

/// Spectrum at one `(β, θ_o)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumPoint<T> {
    pub beta: T,
    pub theta_o: T,
    pub sigmas: Vec<T>,
}

impl<T: Scalar> SpectrumPoint<T> {
    pub fn energy(&self) -> T {
        self.sigmas.iter().map(|&s| s * s).sum()
    }

    pub fn condition_number(&self) -> T {
        condition_of(&self.sigmas)
    }
}

fn check_grid<T: Scalar>(grid: &[T]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Empty("grid"));
    }
    if grid.iter().any(|g| !g.is_finite()) || grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidConfig(
            "grid must be finite and sorted ascending".into(),
        ));
    }
    Ok(())
}

/// Spectra over a sorted `β` grid at fixed `θ_o`, in grid order.
pub fn spectrum_sweep<T: Scalar>(
    n_s: usize,
    theta_o: T,
    beta_grid: &[T],
) -> Result<Vec<SpectrumPoint<T>>> {
    check_even(n_s)?;
    check_grid(beta_grid)?;
    if beta_grid[0] < T::zero() {
        return Err(Error::InvalidConfig("beta must be non-negative".into()));
    }
    Ok(beta_grid
        .par_iter()
        .map(|&beta| SpectrumPoint {
            beta,
            theta_o,
            sigmas: (0..n_s)
                .map(|k| sigma_unchecked(n_s, beta, theta_o, k))
                .collect(),
        })
        .collect())
}

/// Spectra over a sorted `θ_o` grid at fixed `β`, in grid order.
pub fn rotation_sweep<T: Scalar>(
    n_s: usize,
    beta: T,
    theta_grid: &[T],
) -> Result<Vec<SpectrumPoint<T>>> {
    check_even(n_s)?;
    check_grid(theta_grid)?;
    if !(beta >= T::zero()) {
        return Err(Error::InvalidConfig("beta must be non-negative".into()));
    }
    Ok(theta_grid
        .par_iter()
        .map(|&theta_o| SpectrumPoint {
            beta,
            theta_o,
            sigmas: (0..n_s)
                .map(|k| sigma_unchecked(n_s, beta, theta_o, k))
                .collect(),
        })
        .collect())
}

/// Outcome of one structural check. A vacuous check had its hypothesis
/// unmet and counts as holding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubCheck {
    pub holds: bool,
    pub vacuous: bool,
}

impl SubCheck {
    fn tested(holds: bool) -> Self {
        Self {
            holds,
            vacuous: false,
        }
    }
    fn vacuous() -> Self {
        Self {
            holds: true,
            vacuous: true,
        }
    }
}

/// Structural properties of the spectrum for even `N`:
///
/// * `pairing`: `σ_k = σ_{N+2−k}` for `2 ≤ k ≤ N`.
/// * `dominance`: `σ_1` is the largest value whenever
///   `β ≤ πN / (4 Σ_i |cos(2πi/N + θ_o)|)`.
/// * `small_beta_limit`: for `β ≤ 1e-8`, `σ_1 ≈ N` and the rest vanish (to `1e-6`).
/// * `mirror`: the spectrum at `−θ_o` is identical.
/// * `null_at_edge`: `σ_{N/2+1} = 0` when `|θ_o| = π/N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Property2Report {
    pub pairing: SubCheck,
    pub dominance: SubCheck,
    pub small_beta_limit: SubCheck,
    pub mirror: SubCheck,
    pub null_at_edge: SubCheck,
}

impl Property2Report {
    pub fn all_hold(&self) -> bool {
        self.checks().iter().all(|c| c.holds)
    }

    pub fn checks(&self) -> [SubCheck; 5] {
        [
            self.pairing,
            self.dominance,
            self.small_beta_limit,
            self.mirror,
            self.null_at_edge,
        ]
    }
}

/// Upper end of the `β` range on which `σ_1` is guaranteed to dominate.
pub fn dominance_bound<T: Scalar>(n_s: usize, theta_o: T) -> T {
    let step = T::TAU() / T::from_index(n_s);
    let s: T = (0..n_s)
        .map(|i| (step * T::from_index(i) + theta_o).cos().abs())
        .sum();
    T::PI() * T::from_index(n_s) / (T::lit(4.0) * s)
}

/// Identity tolerance: `1e-10` in `f64`, widened to a few ulps of `N` in `f32`.
fn identity_tol<T: Scalar>(n_s: usize) -> T {
    T::lit(1e-10).max(T::lit(64.0) * T::epsilon() * T::from_index(n_s))
}

pub fn check_property2<T: Scalar>(n_s: usize, beta: T, theta_o: T) -> Result<Property2Report> {
    let s = spectrum(n_s, beta, theta_o)?;
    let tol = identity_tol::<T>(n_s);
    let limit_tol = T::lit(1e-6);
    let nf = T::from_index(n_s);

    let pairing = SubCheck::tested((1..n_s).all(|k0| (s[k0] - s[n_s - k0]).abs() <= tol));

    let dominance = if beta <= dominance_bound(n_s, theta_o) {
        SubCheck::tested(s.iter().all(|&x| s[0] >= x - tol))
    } else {
        SubCheck::vacuous()
    };

    let small_beta_limit = if beta <= T::lit(1e-8) {
        SubCheck::tested((s[0] - nf).abs() <= limit_tol && s[1..].iter().all(|&x| x <= limit_tol))
    } else {
        SubCheck::vacuous()
    };

    let mirrored = spectrum(n_s, beta, -theta_o)?;
    let mirror = SubCheck::tested(s.iter().zip(&mirrored).all(|(a, b)| (*a - *b).abs() <= tol));

    let edge = T::PI() / nf;
    let null_at_edge = if (theta_o.abs() - edge).abs() <= T::lit(4.0) * T::epsilon() * edge {
        SubCheck::tested(s[n_s / 2] <= tol)
    } else {
        SubCheck::vacuous()
    };

    Ok(Property2Report {
        pairing,
        dominance,
        small_beta_limit,
        mirror,
        null_at_edge,
    })
}
