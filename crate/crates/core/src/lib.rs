//! Dynamic (1+ε)-approximate graph distances maintained through a dynamic
//! inverse of a polynomial matrix over a prime field.

// `!(x > 0.0)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod complexity;
pub mod dyninv;
pub mod error;
pub mod ff_poly;
pub mod graphenc;
pub mod longrange;
pub mod metrics;
pub mod minplus;
pub mod oracle;
pub mod polymatrix;
pub mod shorthop;

pub use dyninv::{ExactInverseDS, SliceInverseDS, WorstCaseWrapper};
pub use error::{Error, Result};
pub use ff_poly::{FieldConfig, FieldElement, Rng, TruncPoly};
pub use graphenc::{DynGraph, HittingSet, INF};
pub use longrange::{ApspOracle, OracleParams, SsspOracle, UndirectedOracle};
pub use metrics::{DistanceSource, ExactDiameter, ExactSource, MetricSnapshot};
pub use minplus::DistMatrix;
pub use polymatrix::{FMatrix, PolyMatrix};
