//! Numerical verification toolkit for the coarse geometry of expander
//! graphs: spectral gap certificates, Lipschitz embedding concentration
//! bounds, Kantorovich–Rubinstein transport with barycentric extension,
//! word metrics on marked groups with displacement checks, and the
//! averaging experiment that quantifies why expander families cannot
//! coarsely quasi-embed into spaces with Lipschitz translation structure.
//!
//! The crate is organized in six layers, each a pure-function module:
//!
//! * [`graphs`] — finite multigraphs, shortest-path metrics, vertex
//!   boundaries, exact conductance, Margulis / random-regular / cycle
//!   family generators.
//! * [`spectral`] — combinatorial Laplacians, `lambda1` certificates
//!   (dense + Lanczos), Rayleigh quotients, Cheeger cross-checks, family
//!   certification.
//! * [`embed`] — Euclidean embeddings, Lipschitz constants, the `D_f`
//!   ratio and its spectral ceiling `c0`, concentration reports, spread
//!   optimizers.
//! * [`transport`] — finitely supported measures, Wasserstein-1 via a
//!   transportation simplex, barycentric extension, partition-of-unity
//!   maps into measure space.
//! * [`cayley`] — marked groups, Cayley balls, word norms, displacement
//!   bound checks, variation diagnostics, and the radial grid map builder.
//! * [`coarse`] — quasi-embedding candidates, preimage concentration,
//!   averaging centers, concentration witnesses, and the obstruction
//!   report over graph families.
//!
//! All randomized operations take explicit seeds and derive per-member
//! streams from `(seed, index)`, so every artifact is reproducible byte for
//! byte. Fallible operations return [`Result`] with the crate-wide
//! [`Error`] enum; nothing panics on bad input.

pub mod cayley;
pub mod coarse;
pub mod embed;
pub mod error;
pub mod graphs;
pub mod spectral;
pub mod transport;

pub use error::{Error, Result};
