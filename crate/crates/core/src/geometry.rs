//! Antenna placement for a pair of uniform circular arrays (UCAs) and the
//! distances between their elements.
//!
//! The transmit array sits in the `xy`-plane centred at the origin. The
//! receive array is rotated about its boresight by `theta_o`, tilted by
//! `phi_y` (about `x`) then `phi_x` (about `y`), and its centre is moved to
//! `c = D (sin φcs sin θcs, sin φcs cos θcs, cos φcs)`.
//!
//! Antenna indices are 1-based (`1..=n_antennas`) with element `m` at angle
//! `2π m / N`, so element `N` lies on the `x`-axis.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// The approximate (far-field) distance model is only trusted when the link
/// distance is at least this multiple of the larger radius.
pub const FAR_FIELD_RATIO: f64 = 10.0;

/// Physical layout of the link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayConfig<T> {
    n_antennas: usize,
    wavelength: T,
    radius_tx: T,
    radius_rx: T,
    distance: T,
    allow_near_field: bool,
}

impl<T: Scalar> ArrayConfig<T> {
    /// Validates `n_antennas` (even, ≥ 2) and that every length is positive
    /// and finite.
    pub fn new(
        n_antennas: usize,
        wavelength: T,
        radius_tx: T,
        radius_rx: T,
        distance: T,
    ) -> Result<Self> {
        if n_antennas < 2 || n_antennas % 2 != 0 {
            return Err(Error::InvalidConfig(format!(
                "antenna count must be even and at least 2, got {n_antennas}"
            )));
        }
        for (name, v) in [
            ("wavelength", wavelength),
            ("radius_tx", radius_tx),
            ("radius_rx", radius_rx),
            ("distance", distance),
        ] {
            if !(v.is_finite() && v > T::zero()) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(Self {
            n_antennas,
            wavelength,
            radius_tx,
            radius_rx,
            distance,
            allow_near_field: false,
        })
    }

    /// Lets the approximate model run even when `D < 10·max(R_t, R_r)`.
    pub fn with_near_field_override(mut self, allow: bool) -> Self {
        self.allow_near_field = allow;
        self
    }

    pub fn with_distance(mut self, distance: T) -> Result<Self> {
        if !(distance.is_finite() && distance > T::zero()) {
            return Err(Error::InvalidConfig(format!(
                "distance must be positive, got {distance}"
            )));
        }
        self.distance = distance;
        Ok(self)
    }

    pub fn n_antennas(&self) -> usize {
        self.n_antennas
    }
    pub fn wavelength(&self) -> T {
        self.wavelength
    }
    pub fn radius_tx(&self) -> T {
        self.radius_tx
    }
    pub fn radius_rx(&self) -> T {
        self.radius_rx
    }
    pub fn distance(&self) -> T {
        self.distance
    }
    pub fn allows_near_field(&self) -> bool {
        self.allow_near_field
    }

    /// `2π / λ`
    pub fn wavenumber(&self) -> T {
        T::TAU() / self.wavelength
    }

    /// Radii product-to-distance ratio `β = 2π R_t R_r / (λ D)`.
    pub fn rpdr(&self) -> T {
        T::TAU() * self.radius_tx * self.radius_rx / (self.wavelength * self.distance)
    }

    /// Angular position `θ_m = 2π m / N` of antenna `m` (1-based).
    pub fn element_angle(&self, m: usize) -> T {
        T::TAU() * T::from_index(m) / T::from_index(self.n_antennas)
    }

    pub fn check_index(&self, index: usize) -> Result<()> {
        if index == 0 || index > self.n_antennas {
            Err(Error::IndexOutOfRange {
                index,
                n: self.n_antennas,
            })
        } else {
            Ok(())
        }
    }

    /// Errors unless the far-field guard holds or has been overridden.
    pub fn check_far_field(&self) -> Result<()> {
        let radius = self.radius_tx.max(self.radius_rx);
        if self.allow_near_field || self.distance >= T::lit(FAR_FIELD_RATIO) * radius {
            Ok(())
        } else {
            Err(Error::FarFieldViolated {
                ratio: FAR_FIELD_RATIO,
                distance: self.distance.to_f64_lossy(),
                radius: radius.to_f64_lossy(),
            })
        }
    }
}

/// How [`Misalignment::new`] treats out-of-range angles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AngleMode {
    /// Reject anything outside the documented ranges.
    #[default]
    Strict,
    /// Fold angles back into range: `θ_o` is wrapped modulo `2π/N` (the
    /// array's rotational symmetry), a negative `φ_cs` becomes `(θ_cs + π,
    /// −φ_cs)` which is the same physical centre, and `θ_cs` is wrapped into
    /// `[−π, π]`.
    Permissive,
}

/// Rotation, tilt and centre shift of the receive array.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Misalignment<T> {
    theta_o: T,
    theta_cs: T,
    phi_cs: T,
    phi_x: T,
    phi_y: T,
}

impl<T: Scalar> Misalignment<T> {
    /// Perfect alignment.
    pub fn aligned() -> Self {
        Self {
            theta_o: T::zero(),
            theta_cs: T::zero(),
            phi_cs: T::zero(),
            phi_x: T::zero(),
            phi_y: T::zero(),
        }
    }

    /// Only a boresight rotation; no range check beyond finiteness.
    pub fn rotation_only(theta_o: T) -> Self {
        Self {
            theta_o,
            ..Self::aligned()
        }
    }

    /// Ranges: `|θ_o| ≤ π/N`, `θ_cs ∈ [−π, π]`, `φ_cs ∈ [0, π/2)`, tilts finite.
    pub fn new(
        n_antennas: usize,
        theta_o: T,
        theta_cs: T,
        phi_cs: T,
        phi_x: T,
        phi_y: T,
        mode: AngleMode,
    ) -> Result<Self> {
        for (name, v) in [
            ("theta_o", theta_o),
            ("theta_cs", theta_cs),
            ("phi_cs", phi_cs),
            ("phi_x", phi_x),
            ("phi_y", phi_y),
        ] {
            if !v.is_finite() {
                return Err(Error::AngleOutOfRange {
                    name,
                    value: v.to_f64_lossy(),
                    range: "finite".into(),
                });
            }
        }
        if n_antennas == 0 {
            return Err(Error::InvalidConfig(
                "antenna count must be positive".into(),
            ));
        }
        let pi = T::PI();
        let half_pi = T::FRAC_PI_2();
        let slack = T::lit(4.0) * T::epsilon();
        let rot_bound = pi / T::from_index(n_antennas);

        let (mut theta_o, mut theta_cs, mut phi_cs) = (theta_o, theta_cs, phi_cs);
        match mode {
            AngleMode::Strict => {
                if theta_o.abs() > rot_bound * (T::one() + slack) {
                    return Err(out_of_range(
                        "theta_o",
                        theta_o,
                        format!("[-pi/{n_antennas}, pi/{n_antennas}]"),
                    ));
                }
                if theta_cs.abs() > pi * (T::one() + slack) {
                    return Err(out_of_range("theta_cs", theta_cs, "[-pi, pi]".into()));
                }
                if phi_cs < T::zero() || phi_cs >= half_pi {
                    return Err(out_of_range("phi_cs", phi_cs, "[0, pi/2)".into()));
                }
            }
            AngleMode::Permissive => {
                let period = T::TAU() / T::from_index(n_antennas);
                theta_o = theta_o - period * (theta_o / period).round();
                if phi_cs < T::zero() {
                    phi_cs = -phi_cs;
                    theta_cs = theta_cs + pi;
                }
                if phi_cs >= half_pi {
                    return Err(out_of_range("phi_cs", phi_cs, "(-pi/2, pi/2)".into()));
                }
                theta_cs = wrap_pi(theta_cs);
            }
        }
        Ok(Self {
            theta_o,
            theta_cs,
            phi_cs,
            phi_x,
            phi_y,
        })
    }

    pub fn theta_o(&self) -> T {
        self.theta_o
    }
    pub fn theta_cs(&self) -> T {
        self.theta_cs
    }
    pub fn phi_cs(&self) -> T {
        self.phi_cs
    }
    pub fn phi_x(&self) -> T {
        self.phi_x
    }
    pub fn phi_y(&self) -> T {
        self.phi_y
    }

    /// Copy with a different boresight rotation (unchecked).
    pub fn with_theta_o(mut self, theta_o: T) -> Self {
        self.theta_o = theta_o;
        self
    }
}

fn out_of_range<T: Scalar>(name: &'static str, value: T, range: String) -> Error {
    Error::AngleOutOfRange {
        name,
        value: value.to_f64_lossy(),
        range,
    }
}

/// Wraps into `[−π, π]`.
pub fn wrap_pi<T: Scalar>(a: T) -> T {
    let tau = T::TAU();
    a - tau * (a / tau).round()
}

/// A point or vector in metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coordinate3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Scalar> Coordinate3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> T {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

/// Row-major 3×3 real matrix.
pub type Mat3<T> = [[T; 3]; 3];

/// Coordinate plane a rotation acts in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Plane {
    /// About the `z`-axis.
    Xy,
    /// About the `y`-axis.
    Xz,
    /// About the `x`-axis.
    Yz,
}

/// Rotation by `angle` in `plane`.
///
/// `Xz` is `[[c, 0, −s], [0, 1, 0], [s, 0, c]]`; `Xy` and `Yz` follow the
/// usual right-handed form with `−s` above the diagonal.
pub fn rotation_matrix<T: Scalar>(plane: Plane, angle: T) -> Mat3<T> {
    let (s, c) = angle.sin_cos();
    let (o, l) = (T::zero(), T::one());
    match plane {
        Plane::Xy => [[c, -s, o], [s, c, o], [o, o, l]],
        Plane::Xz => [[c, o, -s], [o, l, o], [s, o, c]],
        Plane::Yz => [[l, o, o], [o, c, -s], [o, s, c]],
    }
}

pub fn mat3_mul<T: Scalar>(a: &Mat3<T>, b: &Mat3<T>) -> Mat3<T> {
    let mut out = [[T::zero(); 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn mat3_apply<T: Scalar>(a: &Mat3<T>, v: &Coordinate3<T>) -> Coordinate3<T> {
    let p = [v.x, v.y, v.z];
    let r = |i: usize| a[i][0] * p[0] + a[i][1] * p[1] + a[i][2] * p[2];
    Coordinate3::new(r(0), r(1), r(2))
}

/// `b = R^{xy}_{θcs} R^{xz}_{φx} R^{yz}_{φy}`, whose first two columns fix
/// the receive ring's projection onto each axis of the shifted frame.
pub fn shifted_frame_basis<T: Scalar>(mis: &Misalignment<T>) -> Mat3<T> {
    mat3_mul(
        &rotation_matrix(Plane::Xy, mis.theta_cs),
        &mat3_mul(
            &rotation_matrix(Plane::Xz, mis.phi_x),
            &rotation_matrix(Plane::Yz, mis.phi_y),
        ),
    )
}

/// Amplitude `R_i` and phase offset `α_i` of the receive ring along axis `i`
/// of the shifted frame: the axis coordinate of element `n` is
/// `R_i cos(θ_n − α_i)` (plus the centre offset).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingProjection<T> {
    pub radius: T,
    pub alpha: T,
}

pub fn ring_projections<T: Scalar>(
    cfg: &ArrayConfig<T>,
    mis: &Misalignment<T>,
) -> [RingProjection<T>; 3] {
    let b = shifted_frame_basis(mis);
    let tiny = T::epsilon() * T::epsilon();
    std::array::from_fn(|i| {
        let (b1, b2) = (b[i][0], b[i][1]);
        let norm = b1.hypot(b2);
        // A vanishing projection has an arbitrary phase; pin it to zero.
        let alpha = if norm <= tiny {
            T::zero()
        } else {
            b2.atan2(b1) - mis.theta_o
        };
        RingProjection {
            radius: cfg.radius_rx * norm,
            alpha,
        }
    })
}

/// Receive-array centre `c`.
pub fn center_vector<T: Scalar>(cfg: &ArrayConfig<T>, mis: &Misalignment<T>) -> Coordinate3<T> {
    let (sp, cp) = mis.phi_cs.sin_cos();
    let (st, ct) = mis.theta_cs.sin_cos();
    let d = cfg.distance;
    Coordinate3::new(d * sp * st, d * sp * ct, d * cp)
}

/// Transmit element `m` (1-based): `(R_t cos θ_m, R_t sin θ_m, 0)`.
pub fn tx_antenna_position<T: Scalar>(cfg: &ArrayConfig<T>, m: usize) -> Result<Coordinate3<T>> {
    cfg.check_index(m)?;
    let (s, c) = cfg.element_angle(m).sin_cos();
    Ok(Coordinate3::new(
        cfg.radius_tx * c,
        cfg.radius_tx * s,
        T::zero(),
    ))
}

/// Receive element `n` (1-based) after rotation, tilt and centre shift.
pub fn rx_antenna_position<T: Scalar>(
    cfg: &ArrayConfig<T>,
    mis: &Misalignment<T>,
    n: usize,
) -> Result<Coordinate3<T>> {
    Ok(center_vector(cfg, mis).add(&rx_offset(cfg, mis, n)?))
}

/// Receive element `n` relative to the receive-array centre.
fn rx_offset<T: Scalar>(
    cfg: &ArrayConfig<T>,
    mis: &Misalignment<T>,
    n: usize,
) -> Result<Coordinate3<T>> {
    cfg.check_index(n)?;
    let (s, c) = (cfg.element_angle(n) + mis.theta_o).sin_cos();
    let ring = Coordinate3::new(cfg.radius_rx * c, cfg.radius_rx * s, T::zero());
    let tilt = mat3_mul(
        &rotation_matrix(Plane::Xz, mis.phi_x),
        &rotation_matrix(Plane::Yz, mis.phi_y),
    );
    Ok(mat3_apply(&tilt, &ring))
}

/// Receive element `n` expressed in the frame rotated by `θ_cs` about `z`,
/// evaluated from the ring projections rather than from the rotation chain.
pub fn rx_antenna_position_shifted_frame<T: Scalar>(
    cfg: &ArrayConfig<T>,
    mis: &Misalignment<T>,
    n: usize,
) -> Result<Coordinate3<T>> {
    cfg.check_index(n)?;
    let th = cfg.element_angle(n);
    let p = ring_projections(cfg, mis);
    let (sp, cp) = mis.phi_cs.sin_cos();
    let d = cfg.distance;
    Ok(Coordinate3::new(
        p[0].radius * (th - p[0].alpha).cos(),
        d * sp + p[1].radius * (th - p[1].alpha).cos(),
        d * cp + p[2].radius * (th - p[2].alpha).cos(),
    ))
}

/// Euclidean distance between transmit element `m` and receive element `n`.
pub fn distance_exact<T: Scalar>(
    cfg: &ArrayConfig<T>,
    mis: &Misalignment<T>,
    n: usize,
    m: usize,
) -> Result<T> {
    let rx = rx_antenna_position(cfg, mis, n)?;
    let tx = tx_antenna_position(cfg, m)?;
    Ok(rx.sub(&tx).norm())
}

/// `distance_exact − D`, computed without cancellation from
/// `(2 c·v + |v|²) / (d + D)` where `v` is the element offset `rx − c − tx`.
pub fn distance_excess_exact<T: Scalar>(
    cfg: &ArrayConfig<T>,
    mis: &Misalignment<T>,
    n: usize,
    m: usize,
) -> Result<T> {
    let v = rx_offset(cfg, mis, n)?.sub(&tx_antenna_position(cfg, m)?);
    let c = center_vector(cfg, mis);
    let d = c.add(&v).norm();
    let cv = c.x * v.x + c.y * v.y + c.z * v.z;
    let vv = v.x * v.x + v.y * v.y + v.z * v.z;
    Ok((T::lit(2.0) * cv + vv) / (d + cfg.distance))
}

/// The same distance as [`distance_exact`], written as `D·sqrt(1 + f)` with
/// `f` expanded in the shifted frame.
///
/// The expansion keeps the squared-cosine terms weighted by `R_i²`; their
/// sum `Σ R_i² cos 2(θ_n − α_i)` vanishes identically but is evaluated so
/// this path stays independent of the coordinate one.
pub fn distance_closed_form<T: Scalar>(
    cfg: &ArrayConfig<T>,
    mis: &Misalignment<T>,
    n: usize,
    m: usize,
) -> Result<T> {
    cfg.check_index(n)?;
    cfg.check_index(m)?;
    let (rt, rr, d) = (cfg.radius_tx, cfg.radius_rx, cfg.distance);
    let (th_n, th_m) = (cfg.element_angle(n), cfg.element_angle(m));
    let p = ring_projections(cfg, mis);
    let (sp, cp) = mis.phi_cs.sin_cos();
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let rot = th_n + mis.theta_o;

    let weighted_cos2: T = p
        .iter()
        .map(|pi| pi.radius * pi.radius * (two * (th_n - pi.alpha)).cos())
        .sum();
    let tilt = (mis.phi_x * half).sin().powi(2) * th_m.cos() * rot.cos()
        + (mis.phi_y * half).sin().powi(2) * th_m.sin() * rot.sin()
        + half * mis.phi_x.sin() * mis.phi_y.sin() * th_m.cos() * rot.sin();
    let shift = p[1].radius * (th_n - p[1].alpha).cos() * sp
        + p[2].radius * (th_n - p[2].alpha).cos() * cp
        - rt * (th_m + mis.theta_cs).sin() * sp;

    let d2 = d * d;
    let f = (rt * rt + rr * rr) / d2 - two * rt * rr / d2 * (th_n - th_m + mis.theta_o).cos()
        + weighted_cos2 / (two * d2)
        + T::lit(4.0) * rt * rr / d2 * tilt
        + two / d * shift;
    Ok(d * (T::one() + f).sqrt())
}

/// Far-field split of a distance into an aligned term and per-side
/// displacements: `total = d_a − tau_t + tau_r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceDecomposition<T> {
    /// Distance of a rotation-only link, `D − (R_t R_r / D) cos(θ_n − θ_m + θ_o)`.
    pub d_a: T,
    /// Displacement that depends only on the transmit index.
    pub tau_t: T,
    /// Displacement that depends only on the receive index.
    pub tau_r: T,
    pub total: T,
}

/// `d_A(n, m)`, valid for any `θ_o`.
pub fn aligned_distance<T: Scalar>(cfg: &ArrayConfig<T>, theta_o: T, n: usize, m: usize) -> T {
    cfg.distance
        - cfg.radius_tx * cfg.radius_rx / cfg.distance
            * (cfg.element_angle(n) - cfg.element_angle(m) + theta_o).cos()
}

/// `τ_t(m) = R_t sin(θ_m + θ_cs) sin φ_cs` for `m = 1..=N`.
pub fn tx_displacements<T: Scalar>(cfg: &ArrayConfig<T>, mis: &Misalignment<T>) -> Vec<T> {
    let sp = mis.phi_cs.sin();
    (1..=cfg.n_antennas)
        .map(|m| cfg.radius_tx * (cfg.element_angle(m) + mis.theta_cs).sin() * sp)
        .collect()
}

/// `τ_r(n)` for `n = 1..=N`:
/// `(R_r²/4D) Σ_i cos 2(θ_n − α_i) + R_2 cos(θ_n − α_2) sin φ_cs + R_3 cos(θ_n − α_3) cos φ_cs`.
pub fn rx_displacements<T: Scalar>(cfg: &ArrayConfig<T>, mis: &Misalignment<T>) -> Vec<T> {
    let p = ring_projections(cfg, mis);
    let (sp, cp) = mis.phi_cs.sin_cos();
    let two = T::lit(2.0);
    let quad = cfg.radius_rx * cfg.radius_rx / (T::lit(4.0) * cfg.distance);
    (1..=cfg.n_antennas)
        .map(|n| {
            let th = cfg.element_angle(n);
            let cos2: T = p.iter().map(|pi| (two * (th - pi.alpha)).cos()).sum();
            quad * cos2
                + p[1].radius * (th - p[1].alpha).cos() * sp
                + p[2].radius * (th - p[2].alpha).cos() * cp
        })
        .collect()
}

/// Far-field distance decomposition for one element pair.
pub fn distance_approx<T: Scalar>(
    cfg: &ArrayConfig<T>,
    mis: &Misalignment<T>,
    n: usize,
    m: usize,
) -> Result<DistanceDecomposition<T>> {
    cfg.check_index(n)?;
    cfg.check_index(m)?;
    cfg.check_far_field()?;
    let d_a = aligned_distance(cfg, mis.theta_o, n, m);
    let tau_t = tx_displacements(cfg, mis)[m - 1];
    let tau_r = rx_displacements(cfg, mis)[n - 1];
    Ok(DistanceDecomposition {
        d_a,
        tau_t,
        tau_r,
        total: d_a - tau_t + tau_r,
    })
}
