//! Problem generators for the experiment families.

pub mod cfp;
pub mod libsvm;
pub mod logistic;
pub mod nash;
pub mod nonmonotone;
pub mod saddle;

pub use cfp::{make_balls_cfp, make_linear_cfp, simultaneous_projection, ConvexSet, LinearCfp};
pub use libsvm::{parse_libsvm, write_libsvm};
pub use logistic::{logistic_grad, make_logistic, synthetic_logistic, GammaRule, LogisticData};
pub use nash::{make_nash, nash_f, NashParams, NashScenario};
pub use nonmonotone::{make_nonmonotone, nonmonotone_f, nonmonotone_problem, NONTRIVIAL_NORM};
pub use saddle::{make_affine_vi, make_bilinear_saddle, random_gaussian_matrix};
