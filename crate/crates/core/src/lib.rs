//! Graph signal processing with the modularity matrix as graph shift.
//!
//! The crate builds the adjacency, Laplacian and modularity operators of an
//! undirected weighted graph, plus the two shifted modularity operators
//! `Q⁺ = λmax I - Q` and `Q⁻ = Q - λmin I`. All of them are applied
//! matrix-free from CSR storage. On top of these it provides:
//!
//! - [`spectral`]: eigendecompositions, the graph Fourier transform and its
//!   inverse, with ordering conventions per operator
//! - [`filters`]: spectral windows (modular, anti-modular, smooth, non-smooth,
//!   explicit bands) and vertex-domain polynomial filters
//! - [`sampling`]: bandlimited sampling set selection and reconstruction
//! - [`surrogate`]: sign-randomized surrogate signals and per-node tests
//! - [`denoise`]: Tikhonov denoising with Laplacian or shifted modularity
//!   regularizers
//! - [`openflights`]: ingestion of the OpenFlights airports and routes files
//! - [`experiments`] and [`app`]: the study pipelines and the `modgsp` CLI
//!
//! ```
//! use modgsp::{decompose, fixtures, gft, igft, ShiftOperator};
//!
//! let g = fixtures::toy10();
//! let q = decompose(&ShiftOperator::modularity(&g)).unwrap();
//! let x: Vec<f64> = g.degrees().to_vec();
//! let back = igft(&q, &gft(&q, &x).unwrap()).unwrap();
//! assert!(x.iter().zip(back.values()).all(|(a, b)| (a - b).abs() < 1e-12));
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod app;
pub mod community;
pub mod denoise;
pub mod error;
pub mod experiments;
pub mod filters;
pub mod fixtures;
pub mod graph;
pub mod io;
pub mod openflights;
pub mod sampling;
pub mod spectral;
pub mod stats;
pub mod surrogate;

pub use community::Partition;
pub use error::{Error, Result};
pub use graph::{Graph, GraphBuilder, GraphSignal, ShiftKind, ShiftOperator};
pub use spectral::{decompose, gft, igft, SpectralBasis, SpectralCoefficients};
