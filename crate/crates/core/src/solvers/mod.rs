//! The Golden Ratio Algorithm family, baseline methods and the run loop.

pub mod baselines;
pub mod driver;
pub mod graal;
pub mod rule;

pub use baselines::{
    fbf_step, fista_next_t, fista_step, km_step, pgm_step, FbfInfo, FbfParams, FistaState, PlainState,
};
pub use driver::{run, Method, RunOptions, Target, Termination, Trace, TraceRecord};
pub use graal::{
    agraal_metric_step, agraal_step, agraal_stepsize, fixedpoint_agraal_step, fixedpoint_warm_start, graal_fixed_step,
    lambda0_heuristic, warm_start, SolverState, StepInfo,
};
pub use rule::{StepsizeRule, StopRule, GOLDEN_RATIO};
