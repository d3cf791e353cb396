//! Semi-supervised node classification driven by higher-order (clique)
//! interactions.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`] and [`cliques`]: simple undirected graphs, Laplacians and the
//!   clique complex up to a fixed order.
//! * [`sbtm`]: the stochastic block tensor model, a block model that samples
//!   whole k-cliques per label composition.
//! * [`potential`]: random-walk label priors from the Dirichlet problem on the
//!   graph Laplacian.
//! * [`objective`] and [`train`]: the multinomial clique penalty, its gradient
//!   through a softmax parameterisation, and the Adam training loop.
//! * [`experiments`]: prior sampling, accuracy gains and sweeps.
//! * [`io`]: text formats for graphs, labels, distributions, configs and reports.
//!
//! With the default `parallel` feature the inner loops run on rayon; without it
//! the same code paths run sequentially and produce bit-identical results.

pub mod cliques;
pub mod distribution;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod objective;
pub mod par;
pub mod potential;
pub mod sbtm;
pub mod seeding;
pub mod train;

pub use cliques::{clique_census, enumerate_cliques, CliqueCensus, CliqueComplex};
pub use distribution::LabelDistribution;
pub use error::{Error, Result};
pub use graph::Graph;
pub use objective::{clique_penalty, coeff_table, multinomial_coeff, objective_gradient, objective_value, CoeffTable};
pub use sbtm::{GeneratedGraph, SbtmSpec};
pub use train::{classify, train, NodeLogits, TrainConfig};
