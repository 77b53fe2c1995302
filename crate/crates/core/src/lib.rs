//! Numerical laboratory for the focusing inhomogeneous biharmonic NLS
//! equation  i u_t + Δ²u − |x|^{−b} |u|^{2σ} u = 0  on ℝ^N:
//! exponent arithmetic and theorem hypothesis windows, spectral/radial
//! discretizations, ground states and sharp Gagliardo–Nirenberg constants,
//! split-step time evolution with blow-up diagnostics, and the
//! global-existence threshold checks they feed.

pub mod error;
pub mod evolution;
pub mod fft;
pub mod functionals;
pub mod grid;
pub mod groundstate;
pub mod linalg;
pub mod io;
pub mod params;
pub mod radial;
pub mod thresholds;

pub use error::{Error, Result};
