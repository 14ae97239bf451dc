//! Desk-scale machinery for a hybrid ternary Goldbach construction:
//! integers with a missing decimal digit, Piatetski-Shapiro primes, sieve
//! recursions with their exponential sums, the Buchstab function, the nine
//! sieve-decomposition integrals, the singular series, and a two-variable
//! discrete circle method, together with a verification harness.

pub mod buchstab;
pub mod circle;
pub mod digitset;
pub mod expsum;
pub mod harness;
pub mod nt;
pub mod phase;
pub mod pshapiro;
pub mod regions;
pub mod sievekit;

pub use buchstab::OmegaTable;
pub use digitset::{AnchorWindow, DigitSystem};
pub use pshapiro::{GoldbachInstance, PsConfig, SieveConstants};
pub use sievekit::{SiftSpec, WeightTable};

