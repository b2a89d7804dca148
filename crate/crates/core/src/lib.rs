//! Exact computations with Cantor-Moran measures
//! `μ = δ_{b_1^{-1}D_1} ∗ δ_{(b_1b_2)^{-1}D_2} ∗ ⋯` with consecutive digit sets
//! `D_n = {0, …, N_n − 1}`.
//!
//! The modules follow the questions one asks about such a measure:
//! [`system`] for the data and convergence, [`fourier`] for transforms and
//! zero sets, [`spectra`] and [`search`] for spectra of truncations,
//! [`decomposition`] for splitting spectra along a convolution, [`tiling`] for
//! the integer digit sets, and [`fuglede`] for the factorization of Lebesgue
//! measure. The guide in `book/` walks through each of them.
//!
//! ```
//! use moran::system::MoranSystem;
//! use moran::spectra::{canonical_spectrum, CandidateSet};
//!
//! let system = MoranSystem::finite(&[4, 4], &[2, 2])?;
//! assert_eq!(canonical_spectrum(&system, 2)?, CandidateSet::from_integers(&[0, 2, 8, 10]));
//! # Ok::<(), moran::error::Error>(())
//! ```

pub mod cyclotomic;
pub mod decomposition;
pub mod error;
pub mod fourier;
pub mod fuglede;
pub mod rational;
pub mod search;
pub mod spectra;
pub mod system;
pub mod tiling;

// The guide's listings run as doc-tests, one module per chapter so a failure
// points at its chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/systems.md")]
    mod systems {}
    #[doc = include_str!("../../../book/src/fourier.md")]
    mod fourier {}
    #[doc = include_str!("../../../book/src/spectra.md")]
    mod spectra {}
    #[doc = include_str!("../../../book/src/decompositions.md")]
    mod decompositions {}
    #[doc = include_str!("../../../book/src/tiling.md")]
    mod tiling {}
    #[doc = include_str!("../../../book/src/fuglede.md")]
    mod fuglede {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
