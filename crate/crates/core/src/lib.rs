// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blowup;
pub mod bounds;
pub mod dim;
pub mod error;
pub mod fd;
pub mod field;
pub mod glue;
pub mod grid;
pub mod kelvin;
pub mod potential;

pub use dim::Dim;
pub use error::{Error, Result};
pub use field::{Bubble, FieldRef, Jet, ScalarField};

// The book's snippets run as doctests of this crate.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/bubbles.md")]
    mod bubbles {}
    #[doc = include_str!("../../../book/src/kelvin.md")]
    mod kelvin {}
    #[doc = include_str!("../../../book/src/gluing.md")]
    mod gluing {}
    #[doc = include_str!("../../../book/src/potential.md")]
    mod potential {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    mod bounds {}
    #[doc = include_str!("../../../book/src/blowup.md")]
    mod blowup {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
