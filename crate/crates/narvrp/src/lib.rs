//! Neural routing solvers with one-shot decoding.
//!
//! The crate trains a small autoregressive transformer policy for TSP/CVRP
//! with REINFORCE, converts it into a non-autoregressive student that scores
//! all successor edges in a single forward pass, distills the student with
//! teacher-guided KL supervision, and benchmarks solution quality, decoding
//! confidence, and latency against exact references.
//!
//! See the `examples/` directory for one runnable program per capability and
//! the `narvrp` binary for the file-oriented command line.

pub mod oracle;
pub mod problem;
pub mod rng;
pub mod tsplib;
