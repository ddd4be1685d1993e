//! Exact symbolic BRST/BFV machinery for coisotropic ideals in polynomial
//! symplectic Poisson algebras.
//!
//! Everything is computed over ℚ in the quotient X/F^N of the graded Poisson
//! algebra X = P ⊗ Sym(𝓜 ⊕ 𝓜*) by the filtration ideal F^N generated by
//! antighost weight. The crate provides:
//!
//! * the graded super-commutative algebra and its Poisson bracket,
//! * a Buchberger engine with membership certificates and first syzygies,
//! * Tate resolutions with a computable contracting homotopy,
//! * the BRST charge recursion Q_{n+1} = -1/2 s{R_n, R_n},
//! * degree-0/1 cohomology and the induced bracket on H⁰,
//! * classical gauge equivalences and charge matching,
//! * PBW normal ordering, the quantization map, and the order-by-order
//!   quantum master equation solver.
//!
//! The crate is `no_std` (with `alloc`); all IO lives in the companion CLI
//! crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod brst;
pub mod cohomology;
pub mod element;
pub mod error;
pub mod gauge;
pub mod generators;
pub mod groebner;
pub mod linalg;
pub mod monomial;
pub mod poisson;
pub mod poly;
pub mod quantize;
pub mod scalar;
pub mod tate;

#[cfg(test)]
pub(crate) mod fixtures;

pub use element::Element;
pub use error::Error;
pub use generators::{GenId, GeneratorTable};
pub use monomial::SuperMonomial;
pub use scalar::{HbarPoly, Scalar};
