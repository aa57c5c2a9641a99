//! Integer-frequency sine and cosine sums.
//!
//! * [`eval`]: pointwise and grid evaluation with extended-precision argument
//!   reduction and compensated summation.
//! * [`extremum`]: certified `M₁ = max |Σ sin λ_j x|` and `M₂ = −min Σ cos λ_j x`.
//! * [`constructions`]: consecutive, random, Sidon-difference and
//!   rounded-exponential frequency sets.
//! * [`perturb`]: the ±1 perturbation that forces a large extremum.
//! * [`density`]: conjugate Dirichlet kernel, its L¹ norm and the resulting
//!   bound on how many frequencies of a flat sum lie below a cutoff.

pub mod constructions;
pub mod density;
pub mod error;
pub mod eval;
pub mod extremum;
pub mod freqset;
pub mod io;
pub mod numeric;
pub mod perturb;
mod quadrature;

pub use error::{Error, Result};
pub use eval::{eval_grid, eval_point, lipschitz_bound, GridSpec};
pub use extremum::{certified_max_abs, m1, m2, parseval_floor, ExtremumCertificate, ExtremumOptions};
pub use freqset::{FrequencySet, PerturbedSet, Spectrum, SumKind};
pub use perturb::{PerturbationCase, PerturbationReport, SignVector};
