//! Green function of the linearization, local-law diagnostics, counting
//! observables and the comparison experiments.

pub mod counting;
pub mod gfc;
pub mod resolvent;
pub mod spectrum;
pub mod terms;

pub use counting::{
    cutoff_f, default_window, observable_chi, rigidity_check, smoothed_counting, truncation_energy,
    CountingObservable, RigidityReport,
};
pub use gfc::{edge_point, gfc_experiment, scaled_im_m, GfcConfig, GfcReport};
pub use resolvent::{
    green_function, local_law_residual, pi_blocks, resolvent_trace, trace_residual, ward_check,
    GreenFunction, LocalLawResidual, WardReport,
};
pub use spectrum::Spectrum;
pub use terms::{registry, registry_term, term_average, TermReport, TermSpec};
