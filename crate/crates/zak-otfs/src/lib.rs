//! Zak-OTFS delay-Doppler link-level simulation toolkit.
//!
//! The crate models the discrete delay-Doppler (DD) domain end to end:
//! quasi-periodic frames and the discrete Zak transform pair, sinc/Gaussian
//! DD pulse shaping with closed-form effective channels and matched-filter
//! noise covariances, construction of the DD input/output matrix, pilot
//! frame layouts, model-free / model-dependent / hybrid channel estimators,
//! LMMSE detection, and a seeded Monte-Carlo sweep harness with CSV export.

pub mod channel;
pub mod dd;
pub mod detect;
pub mod error;
pub mod estimate;
pub mod filters;
pub mod io;
pub mod linalg;
pub mod oracle;
pub mod pilot;
pub mod quad;
pub mod sweep;

pub use channel::{draw_channel, load_tdl_profile, veh_a_profile, ChannelProfile, Path, PathSet};
pub use dd::{
    twisted_convolve, zak_forward, zak_inverse, ConvScale, DdIndex, ExtGrid, GridConfig, QpFrame,
};
pub use detect::{
    cancel_pilot, count_bit_errors, lmmse_equalize, min_distance_decode, Alphabet,
    DetectionResult, NoiseModel,
};
pub use error::Error;
pub use estimate::{
    build_h_kappa, detect_paths, estimate_hybrid, estimate_model_dependent, hybrid_combine,
    ls_gains, model_free_embedded, model_free_exclusive, CellSource, DdEstimate, HybridHeff,
};
pub use filters::{
    heff_closed_form, heff_closed_form_with_extent, noise_covariance, sidelobe_energy_fraction,
    NoiseCovariance, PulseFilter,
};
pub use io::{build_h, io_oracle_direct, synthesize_rx, ChannelMatrix, NoiseFactor, RxFrame};
pub use oracle::heff_oracle;
pub use pilot::{make_embedded_frame, make_exclusive_frame, make_mask, FrameKind, FrameLayout, Mask, Region};

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;

/// Complex sample type used throughout.
pub type C64 = num_complex::Complex64;
