//! Spectra of the per-mode symbol `l_n(lambda) = lambda^2 + a_n^2 - a_n^{2 theta} K^(lambda)`
//! for memory kernels given as finite or power-law sums of decaying exponentials.

pub mod asymptotics;
pub mod bracket;
pub mod config;
pub mod error;
pub mod kernel;
pub mod linalg;
pub mod modal_sim;
pub mod numeric;
pub mod oracle;
pub mod quad;
pub mod report;
pub mod roots;
pub mod stability;
pub mod suite;
pub mod symbol;

pub use asymptotics::{AsymptoticPrediction, RegimeReport, RegimeTag, ResidueConstants};
pub use config::{AGrid, KernelSpec};
pub use error::{Error, Result};
pub use kernel::{ExponentialKernel, PowerLawFamily, Term};
pub use modal_sim::SimTrace;
pub use roots::{ComplexPair, RealZero, RootOptions, SpectrumSlice, ZeroKind, ZeroRow};
pub use stability::{StabilityReport, Verdict};
pub use symbol::{Mode, SymbolPolynomial};
