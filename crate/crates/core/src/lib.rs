//! The free group on two generators, its faithful representation by exact
//! rotation matrices over ℚ(√2), and checkers for the group axioms, the
//! rotation axioms and freeness.
//!
//! ```
//! use free_rotations::{rotmap, words};
//!
//! let w = words::reduce(&words::parse_word("abBab").unwrap());
//! assert_eq!(w.to_string(), "aab");
//! assert!(rotmap::rotation(&w).is_rotation());
//! ```

pub mod cli;
pub mod freeness;
pub mod mat3;
pub mod rotmap;
pub mod scalar;
pub mod suites;
pub mod words;

pub use mat3::{Mat3, Vec3};
pub use scalar::{Int3, QSqrt2};
pub use words::{Letter, ReducedWord, Word, WordClass};
