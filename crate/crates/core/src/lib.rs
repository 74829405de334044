//! Regular singular TERP-structures: lattices of elementary sections, their
//! spectra, twistor classification, the classifying space and one-parameter limits.

pub mod classifying;
pub mod corpus;
pub mod error;
pub mod laurent;
pub mod linalg;
pub mod limits;
pub mod model;
pub mod poly;
pub mod report;
pub mod scalar;
pub mod twistor;

pub use classifying::{GrassPoint, HodgeFiltration, Membership, SpectralData, SymplecticModel};
pub use error::{Result, TerpError};
pub use laurent::Laurent;
pub use limits::{Direction, LimitOutcome, ParamFamily, ScanFamily};
pub use linalg::{hermitian_signature, weight_filtration, Mat, Signature, Subspace, WeightFiltration};
pub use model::{Lattice, Order, Section, SpectralWindow, TopologicalData};
pub use poly::MPoly;
pub use report::{Check, Report};
pub use scalar::{Approx, GaussQ, Scalar};
pub use twistor::{Classification, TwistorReport};
