//! Measurements on the constructed operators.

pub mod bernstein;
pub mod grid;
pub mod lemmas;
pub mod modulus;
pub mod qualify;
pub mod rate;

pub use bernstein::{bernstein_ratio, bernstein_smooth_ratio, inverse_check, random_sign_operator, spread, InverseCheck, InverseEntry};
pub use grid::{ball_points, interval_points, random_ball_point, sup_error, sup_error_on, Domain, GridSpec, SupError, VERIFICATION_SEED};
pub use lemmas::{lip_transfer_check, sequence_lemma_check, SequenceCheck, SequenceKind, TransferCheck};
pub use modulus::{direct_bound, modulus, modulus_on_grid, DirectBound, DIRECT_COEFFICIENT, MODULUS_RESOLUTION};
pub use qualify::{qualify, QualificationReport, QualifyConfig, RadialVerdict, SmoothVerdict, Thresholds};
pub use rate::{rate_fit, sweep, BoundInputs, EpsRule, RateReport, SweepResult, SweepSpec};
