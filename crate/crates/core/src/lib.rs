//! Short-time expansions of Itô semimartingales through the time-extended
//! Itô signature.
//!
//! The modules build on each other: [`word_algebra`] multiplies words,
//! [`coeff_ring`] holds exact coefficients, [`signature_moments`] takes
//! expectations, [`generator_ops`] expands regular moments,
//! [`charfun_expansion`] expands characteristic functions of the standardized
//! process, and [`model_sim`] checks them by simulation. [`cli`] wraps it all
//! in a command line tool.

pub mod charfun_expansion;
pub mod cli;
pub mod coeff_ring;
pub mod error;
pub mod generator_ops;
pub mod model_sim;
pub mod signature_moments;
pub mod word_algebra;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/words.md")]
    mod words {}
    #[doc = include_str!("../../../book/src/polynomials.md")]
    mod polynomials {}
    #[doc = include_str!("../../../book/src/moments.md")]
    mod moments {}
    #[doc = include_str!("../../../book/src/charfun.md")]
    mod charfun {}
    #[doc = include_str!("../../../book/src/jumps.md")]
    mod jumps {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
