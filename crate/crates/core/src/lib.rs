//! Qudit maps interpolating between positive, Schwarz and completely positive evolution.
//!
//! The crate builds the `Φ_{α,β} = (1-α-β) id + α τ₀ + β Δ` family of unital channels on
//! `M_d`, the generator `L` with rates `(κ, ν)` whose semigroup lives in that family, and the
//! time-dependent schedules that ride the boundary of the completely positive maps.
//! Every closed-form classification comes with an independent numerical oracle.
//!
//! Modules:
//! - [`linalg`]: dense complex primitives (Kronecker product, Hermitian eigensolver,
//!   partial transpose, column-stacking `vec`, Padé `expm`).
//! - [`channels`]: [`SuperMap`], the family and its named members, Choi matrices.
//! - [`generators`]: the generator, its relaxation rates, and the conditional positivity,
//!   conditional complete positivity and dissipativity tests.
//! - [`regions`]: positive / CP / EB regions in the `(α, β)` plane and their oracles.
//! - [`dynamics`]: schedules `κ(t), ν(t)`, trajectories, crossing times, Weyl mixtures.
//! - [`cli`]: the `qudit-maps` command-line surface.

pub mod channels;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod generators;
pub mod linalg;
pub mod numerics;
pub mod regions;
pub mod sampling;

pub use channels::{MapParams, NamedMap, QuantumState, SuperMap};
pub use dynamics::Schedule;
pub use error::{Error, Result};
pub use generators::{GenParams, PositivityClass, RateReport};
pub use linalg::ComplexMatrix;
pub use regions::{Region, RegionPolygon, RegionVerdict};

