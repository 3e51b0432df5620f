//! Averaging process and Sharing-a-Drink simulation on finite and infinite
//! bounded-degree graphs.
//!
//! Each edge carries a Poisson clock; at every ring the two endpoint values
//! move toward each other by a fraction `mu` of their difference. The same
//! clocks drive the Sharing-a-Drink process, whose run on the reversed
//! sequence gives the coefficients of the initial values in any final value.
//!
//! On infinite graphs ([`graph::Lattice`], [`graph::RegularTree`]) only the
//! region that can influence a root is generated, edge by edge from keyed
//! random streams, so results agree bit for bit with eager simulation on any
//! finite piece containing that region.
//!
//! ```
//! use averaging::{engine, graph::{Graph, GeneratorSpec}, profile::{InitialLaw, LawKind}, schedule::ClockConfig};
//!
//! let g = Graph::generate(&"lattice:d=2".parse::<GeneratorSpec>()?)?;
//! let law = InitialLaw::new(LawKind::Bernoulli { p: 0.5 }, 7)?;
//! let x = engine::run_at_root(&g, &law, &ClockConfig::default().with_seed(1), 2.0, g.origin())?;
//! assert!((0.0..=1.0).contains(&x));
//! # Ok::<(), averaging::Error>(())
//! ```

pub mod checks;
pub mod diagnostics;
pub mod engine;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod par;
pub mod profile;
pub mod region;
pub mod sad;
pub mod scalar;
pub mod schedule;
pub mod seed;
pub mod stats;

pub use error::{Error, Result};
pub use graph::{Edge, GeneratorSpec, Graph, VertexId};
pub use profile::{InitialLaw, LawKind, MomentSpec, Profile};
pub use region::{explore_region, ExploredRegion};
pub use sad::{ContributionMatrix, SadProfile};
pub use scalar::{Dyadic, Scalar};
pub use schedule::{reverse, sample_finite, ClockConfig, MuLaw, UpdateSequence, UpdateStep};
