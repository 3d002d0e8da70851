//! Exponent bookkeeping, the counterexample family and the restricted
//! weak-type checks.

pub mod corpus;
pub mod counterexample;
pub mod exponents;
pub mod fit;
pub mod level_bounds;
pub mod rwt;

pub use counterexample::{
    build_counterexample_f, build_xf_lower_bound, default_n_list, hurwitz_zeta, necessity_check,
    norm_f_series, norm_xf_blocks_series, norm_xf_lorentz_series, scaling_experiment, CounterexampleSpec,
    NecessityReport, NecessityVerdict, CRITICAL_TOL, ScalingReport, ScalingRow,
};
pub use exponents::{
    critical_exponents, critical_exponents_f64, nonisotropic_dilate, region_contains, region_contains_exact,
    region_vertices, ExponentPair, Membership,
};
pub use fit::{fit_loglog, FitResult};
pub use rwt::{check_rwt, rwt_from_parts, rwt_scaling_orbit, RwtReport};
pub use level_bounds::{
    check_e_bound, check_f_bound, sampled_minimum, shrinking_sweep, BoundSide, FBoundVariant, LevelBoundReport,
    SweepStep,
};
pub use corpus::{builtin_corpus, generate_corpus, Corpus, CorpusEntry, CorpusKind};
