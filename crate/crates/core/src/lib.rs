//! Decides R-contextuality of finite non-disturbing empirical models.
//!
//! The library builds measurement scenarios as simplicial complexes of
//! contexts, attaches exact semiring-valued measure tables to the maximal
//! contexts, and asks whether local sections extend to compatible
//! families. Two obstruction computations are provided: the classical
//! one with ring coefficients (where negative coefficients are allowed
//! and can mask contextual behaviour) and a generalized one over
//! semifields that works directly with the even/odd coboundary pair and
//! difference cochains. Independent brute-force and exact-LP oracles
//! cross-check every verdict, and the contextual fraction is computed by
//! exact rational linear programming.
//!
//! All arithmetic is exact: booleans, arbitrary-precision integers, or
//! arbitrary-precision rationals. No decision path touches floating
//! point.

pub mod analysis;
pub mod cochain;
pub mod formats;
pub mod linalg;
pub mod lp;
pub mod model;
pub mod obstruction;
pub mod scenario;
pub mod semiring;

pub(crate) mod exec;
