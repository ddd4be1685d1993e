//! Shared fixtures for unit tests: the plane-rotation constraint and the
//! angular momentum constraints.

use alloc::vec::Vec;

use crate::poly::Poly;

/// mu = x1 y2 - x2 y1 in two pairs (vars: x1 x2 y1 y2).
pub(crate) fn mu_poly() -> Poly {
    let v = |i: usize| Poly::variable(4, i);
    v(0).mul(&v(3)).sub(&v(1).mul(&v(2)))
}

/// Angular momentum constraints mu = x × y in three pairs
/// (vars: x1 x2 x3 y1 y2 y3).
pub(crate) fn angular_momenta() -> Vec<Poly> {
    let v = |i: usize| Poly::variable(6, i);
    let mu1 = v(1).mul(&v(5)).sub(&v(2).mul(&v(4))); // x2 y3 - x3 y2
    let mu2 = v(2).mul(&v(3)).sub(&v(0).mul(&v(5))); // x3 y1 - x1 y3
    let mu3 = v(0).mul(&v(4)).sub(&v(1).mul(&v(3))); // x1 y2 - x2 y1
    alloc::vec![mu1, mu2, mu3]
}
