//! Correlation-immune boolean functions: spectral classification, exact
//! census of `N(n,k,q)`, generating-function and lattice oracles, asymptotic
//! estimates and the Hadamard-matrix link.

pub mod asymptotics;
pub mod boolfn;
pub mod cli;
pub mod combin;
pub mod enumerate;
pub mod error;
pub mod gf_oracle;
pub mod hadamard;
pub mod oa;

pub use boolfn::{ci_order, classify, walsh_transform, BooleanFunction, CiProfile, WalshSpectrum};
pub use enumerate::{census, count_single, Budget, CensusEntry, CensusOptions, CensusTable};
pub use error::{Error, Result};
