//! Exact rational scalars and polynomials in the formal parameter ħ.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Exact rational number. `Ratio` keeps the invariants we need: always
/// reduced, denominator positive, no rounding ever.
pub type Scalar = num_rational::Ratio<BigInt>;

pub fn s_int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

pub fn s_ratio(num: i64, den: i64) -> Scalar {
    Scalar::new(BigInt::from(num), BigInt::from(den))
}

/// Renders `p/q`, omitting the denominator when it is 1.
pub fn format_scalar(s: &Scalar) -> String {
    let mut out = String::new();
    if s.denom().is_one() {
        let _ = write!(out, "{}", s.numer());
    } else {
        let _ = write!(out, "{}/{}", s.numer(), s.denom());
    }
    out
}

/// Parses `p` or `p/q` with optional sign.
pub fn parse_scalar(text: &str) -> Option<Scalar> {
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let num: BigInt = n.trim().parse().ok()?;
        let den: BigInt = d.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        Some(Scalar::new(num, den))
    } else {
        let num: BigInt = t.parse().ok()?;
        Some(Scalar::from_integer(num))
    }
}

/// Polynomial in ħ with exact rational coefficients, stored little-endian
/// with trailing zeros trimmed. ħ has degree zero, so these scalars act on
/// graded monomials without disturbing the grading.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct HbarPoly {
    coeffs: Vec<Scalar>,
}

impl HbarPoly {
    pub fn zero() -> Self {
        HbarPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Scalar) -> Self {
        let mut p = HbarPoly {
            coeffs: alloc::vec![c],
        };
        p.trim();
        p
    }

    pub fn one() -> Self {
        Self::constant(Scalar::one())
    }

    /// `c * ħ^k`.
    pub fn monomial(c: Scalar, k: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = alloc::vec![Scalar::zero(); k + 1];
        coeffs[k] = c;
        HbarPoly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, k: usize) -> Scalar {
        self.coeffs.get(k).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        if self.is_zero() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    fn trim(&mut self) {
        while matches!(self.coeffs.last(), Some(c) if c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn add_assign(&mut self, other: &HbarPoly) {
        if self.coeffs.len() < other.coeffs.len() {
            self.coeffs.resize(other.coeffs.len(), Scalar::zero());
        }
        for (k, c) in other.coeffs.iter().enumerate() {
            self.coeffs[k] += c;
        }
        self.trim();
    }

    pub fn sub_assign(&mut self, other: &HbarPoly) {
        if self.coeffs.len() < other.coeffs.len() {
            self.coeffs.resize(other.coeffs.len(), Scalar::zero());
        }
        for (k, c) in other.coeffs.iter().enumerate() {
            self.coeffs[k] -= c;
        }
        self.trim();
    }

    pub fn neg(&self) -> HbarPoly {
        HbarPoly {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn mul(&self, other: &HbarPoly) -> HbarPoly {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = alloc::vec![Scalar::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        let mut p = HbarPoly { coeffs };
        p.trim();
        p
    }

    pub fn scale(&self, c: &Scalar) -> HbarPoly {
        if c.is_zero() {
            return Self::zero();
        }
        HbarPoly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Multiplies by ħ^k.
    pub fn shift(&self, k: usize) -> HbarPoly {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = alloc::vec![Scalar::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        HbarPoly { coeffs }
    }

    /// Exact division by ħ. Returns `None` if the constant term is nonzero.
    pub fn div_hbar(&self) -> Option<HbarPoly> {
        if self.is_zero() {
            return Some(Self::zero());
        }
        if !self.coeffs[0].is_zero() {
            return None;
        }
        Some(HbarPoly {
            coeffs: self.coeffs[1..].to_vec(),
        })
    }

    /// Drops all terms of ħ-order ≥ k.
    pub fn truncate(&self, k: usize) -> HbarPoly {
        let mut p = HbarPoly {
            coeffs: self.coeffs.iter().take(k).cloned().collect(),
        };
        p.trim();
        p
    }
}

/// Integer sign flips show up everywhere in Koszul bookkeeping.
pub fn sign_pow(exp: i64) -> Scalar {
    if exp.rem_euclid(2) == 0 {
        Scalar::one()
    } else {
        -Scalar::one()
    }
}

pub fn is_negative(s: &Scalar) -> bool {
    s.numer().is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_format_roundtrip() {
        let a = s_ratio(3, 2);
        assert_eq!(format_scalar(&a), "3/2");
        assert_eq!(parse_scalar("3/2").unwrap(), a);
        assert_eq!(format_scalar(&s_int(-7)), "-7");
        assert_eq!(parse_scalar("-7").unwrap(), s_int(-7));
        assert_eq!(parse_scalar("4/2").unwrap(), s_int(2));
        assert!(parse_scalar("1/0").is_none());
    }

    #[test]
    fn hbar_poly_arithmetic() {
        let p = HbarPoly::monomial(s_int(2), 1); // 2ħ
        let q = HbarPoly::constant(s_int(3));
        let r = p.mul(&q); // 6ħ
        assert_eq!(r.coeff(1), s_int(6));
        assert_eq!(r.degree(), Some(1));
        let d = r.div_hbar().unwrap();
        assert_eq!(d, HbarPoly::constant(s_int(6)));
        assert!(HbarPoly::constant(s_int(1)).div_hbar().is_none());
        let mut s = p.clone();
        s.sub_assign(&p);
        assert!(s.is_zero());
    }

    #[test]
    fn hbar_truncate_drops_high_orders() {
        let mut p = HbarPoly::monomial(s_int(1), 3);
        p.add_assign(&HbarPoly::constant(s_int(5)));
        let t = p.truncate(2);
        assert_eq!(t, HbarPoly::constant(s_int(5)));
    }
}
