//! Line-of-sight MIMO between misaligned uniform circular arrays.
//!
//! The numeric modules are generic over [`Scalar`] (`f32` or `f64`); the
//! `*F64`/`*F32` aliases below name the common instantiations. Monte-Carlo
//! simulation ([`sim`]) runs in `f64` only.

pub mod channel;
pub mod design;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod scalar;
pub mod sim;
pub mod spectrum;
pub mod transceiver;

pub use channel::{
    build_channel, circulant_factor, closed_form_svd, dft_matrix, numerical_svd, ChannelMatrix,
    ChannelModel, PhaseDiagonal, SvdTriple,
};
pub use design::{
    capacity, condition_number, radii_from_beta, search_beta_opt, water_fill, DesignResult,
    PowerAllocation, RadiiSolution,
};
pub use error::{Error, Result};
pub use geometry::{
    distance_approx, distance_closed_form, distance_exact, distance_excess_exact, rotation_matrix,
    rx_antenna_position, tx_antenna_position, AngleMode, ArrayConfig, Coordinate3,
    DistanceDecomposition, Misalignment, Plane,
};
pub use linalg::CMatrix;
pub use num_complex::Complex;
pub use scalar::Scalar;
pub use sim::{run_rate_sweep, write_csv, ResultRow, TrialConfig};
pub use spectrum::{
    check_property2, singular_value, spectrum, spectrum_sweep, Property2Report, SpectrumPoint,
    SubCheck,
};
pub use transceiver::{
    approx_power_allocation, build_codebook, precoder_from_angles, select_codebook_index, zf_rate,
    zf_sic_rate, Codebook, PrecoderMatrix, PrecoderProvenance, Quantization, RateReport,
    RateScheme,
};

pub type ArrayConfigF64 = ArrayConfig<f64>;
pub type ArrayConfigF32 = ArrayConfig<f32>;
pub type MisalignmentF64 = Misalignment<f64>;
pub type MisalignmentF32 = Misalignment<f32>;
pub type CMatrixF64 = CMatrix<f64>;
pub type CMatrixF32 = CMatrix<f32>;
pub type ChannelMatrixF64 = ChannelMatrix<f64>;
pub type ChannelMatrixF32 = ChannelMatrix<f32>;
pub type SvdTripleF64 = SvdTriple<f64>;
pub type SvdTripleF32 = SvdTriple<f32>;
pub type SpectrumPointF64 = SpectrumPoint<f64>;
pub type PowerAllocationF64 = PowerAllocation<f64>;
pub type DesignResultF64 = DesignResult<f64>;
pub type CodebookF64 = Codebook<f64>;
pub type PrecoderMatrixF64 = PrecoderMatrix<f64>;
pub type RateReportF64 = RateReport<f64>;
