//! Golden Ratio Algorithms for monotone variational inequalities
//!
//! ```text
//! find z*  with  ⟨F(z*), z − z*⟩ + g(z) − g(z*) ≥ 0  for all z,
//! ```
//!
//! where `F` is monotone and locally Lipschitz and `g` is convex with an
//! easy proximal operator. The adaptive method ([`solvers::agraal_step`])
//! picks its stepsize from observed local curvature of `F`, costs one
//! evaluation of `F` and one prox per iteration, and never backtracks.
//!
//! ```
//! use graal::linalg::SparseMatrix;
//! use graal::problems::make_bilinear_saddle;
//! use graal::prox::ProxOp;
//! use graal::solvers::{run, Method, RunOptions, StepsizeRule, StopRule, Target};
//!
//! let k = SparseMatrix::identity(3);
//! let problem = make_bilinear_saddle(k, ProxOp::Zero, ProxOp::Zero).unwrap();
//! let start = vec![1.0, 2.0, 3.0, -1.0, 0.5, 2.0];
//! let trace = run(
//!     &Method::Agraal(StepsizeRule::default()),
//!     Target::Vi(&problem),
//!     &start,
//!     &RunOptions::default(),
//!     &StopRule::new(1e-8, 10_000),
//! )
//! .unwrap();
//! assert!(trace.converged());
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod linalg;
pub mod problem;
pub mod problems;
pub mod prox;
pub mod rng;
pub mod solvers;

pub use error::{Error, Result};
pub use problem::{FixedPointClass, FixedPointProblem, MonotonicityClass, Operator, VIProblem};
