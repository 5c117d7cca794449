//! Ridge subspace recovery from point samples of a deterministic function.
//!
//! The pipeline standardizes the inputs, slices the response range, builds
//! the SIR or SAVE moment matrix and reads the subspace off its leading
//! eigenvectors:
//!
//! ```
//! use ridge_sdr::{fit, Method, SlicingStrategy, TestFunction};
//!
//! let f = TestFunction::quad1d_default();
//! let data = f.sample_inputs(2_000, 1).unwrap();
//! let run = fit(&data, Method::Save, SlicingStrategy::equal_count(10)).unwrap();
//! assert_eq!(run.estimate.eigenvalues().len(), 10);
//! ```

pub mod diagnostics;
pub mod error;
pub mod inverse_regression;
pub mod linalg;
pub mod rng;
pub mod slicing;
pub mod standardize;
pub mod testbed;

pub use diagnostics::{
    bootstrap_eigs, convergence_study, suggest_dimension, summary_coordinates, BootstrapRanges, ConvergenceConfig,
    ConvergenceReport,
};
pub use error::{Error, Result};
pub use inverse_regression::{estimate_subspace, fit, Method, MomentMatrixEstimate, RidgeFit, SubspaceEstimate};
pub use linalg::{subspace_distance, sym_eig, EigenDecomposition, OrthonormalBasis, SymmetricMatrix};
pub use slicing::{partition, SlicePartition, SlicingKind, SlicingStrategy};
pub use standardize::{Dataset, Standardizer};
pub use testbed::{OracleSubspace, TestFunction};
