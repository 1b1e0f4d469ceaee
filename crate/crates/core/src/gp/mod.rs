//! Gaussian-process surrogates with spectral graph kernels.

mod kernel;
mod model;
mod optimize;

pub use kernel::{kernel_matrix, KernelFamily, KernelSpec};
pub use model::{FitReport, GpModel, Posterior, DEFAULT_NOISE_VARIANCE};
pub use optimize::{maximize_in_box, BoxMaximum};
