//! Command line front end: validation, obstruction sweeps, contextual
//! fraction, brute-force oracle cross-checks, and the built-in corpus
//! regression.

pub mod commands;
pub mod corpus;

/// Stable exit codes, also documented in the README.
pub mod exit {
    /// Everything ran and agreed.
    pub const OK: i32 = 0;
    /// The input file is not well-formed.
    pub const SYNTAX: i32 = 1;
    /// The input parsed but fails validation (unknown names, bad
    /// normalization, unusable flag combination, I/O trouble).
    pub const SEMANTIC: i32 = 2;
    /// The model is disturbing; analyses were skipped.
    pub const DISTURBING: i32 = 3;
    /// An enumeration exceeded the configured cutoff.
    pub const TOO_LARGE: i32 = 4;
    /// An oracle cross-check or corpus expectation failed.
    pub const MISMATCH: i32 = 5;
}
