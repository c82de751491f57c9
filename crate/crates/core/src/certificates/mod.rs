//! Analytic certificates: trigonometric negativity certificates with a
//! checkable grid-to-continuum transfer, Bessel-sum positivity
//! diagnostics, and the dimension case table they support.

pub mod bessel;
mod lp;
pub mod profile;
pub mod spherical;
pub mod trig;

pub use bessel::{bessel_j, bessel_j_leading, bessel_j_scaled};
pub use profile::{bound_profile, recursion_integral, BoundProfile};
pub use spherical::{
    bessel_diagnostic, bessel_energy, sphere_average, spherical_constant, BesselDiagnostic,
    SphericalConstant, CALIBRATION_SAMPLES,
};
pub use trig::{
    certify_negative_polynomial, certify_with_schedule, check_certificate, default_grid_points,
    lebesgue_witness_check, CertifyOutcome, TrigCertificate, DEGREE_SCHEDULE,
};
