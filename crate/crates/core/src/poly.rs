//! Multivariate polynomials over the degree-0 variables x_1..x_n, y_1..y_n,
//! with selectable monomial orders. This is the coefficient world the
//! Buchberger engine works in; conversions to and from [`Element`] live here
//! as well.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::element::Element;
use crate::generators::GenId;
use crate::monomial::SuperMonomial;
use crate::scalar::Scalar;

/// Exponent vector over 2n variables: positions 0..n are x_1..x_n,
/// positions n..2n are y_1..y_n. Priority for lex-style comparisons is
/// x_1 > x_2 > ... > y_1 > ... > y_n.
pub type Exps = Vec<u32>;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MonomialOrder {
    DegRevLex,
    GrLex,
    Lex,
}

impl MonomialOrder {
    pub fn name(&self) -> &'static str {
        match self {
            MonomialOrder::DegRevLex => "degrevlex",
            MonomialOrder::GrLex => "grlex",
            MonomialOrder::Lex => "lex",
        }
    }

    pub fn parse(s: &str) -> Option<MonomialOrder> {
        match s {
            "degrevlex" => Some(MonomialOrder::DegRevLex),
            "grlex" => Some(MonomialOrder::GrLex),
            "lex" => Some(MonomialOrder::Lex),
            _ => None,
        }
    }

    pub fn cmp(&self, a: &[u32], b: &[u32]) -> core::cmp::Ordering {
        use core::cmp::Ordering;
        let deg = |v: &[u32]| -> u64 { v.iter().map(|&e| e as u64).sum() };
        match self {
            MonomialOrder::Lex => a.cmp(b),
            MonomialOrder::GrLex => deg(a).cmp(&deg(b)).then_with(|| a.cmp(b)),
            MonomialOrder::DegRevLex => deg(a).cmp(&deg(b)).then_with(|| {
                for i in (0..a.len()).rev() {
                    match a[i].cmp(&b[i]) {
                        Ordering::Less => return Ordering::Greater,
                        Ordering::Greater => return Ordering::Less,
                        Ordering::Equal => {}
                    }
                }
                Ordering::Equal
            }),
        }
    }
}

/// Sparse polynomial. Terms are keyed by exponent vector; the BTreeMap key
/// order is only a storage order, monomial orders are applied on demand.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Poly {
    terms: BTreeMap<Exps, Scalar>,
    nvars: usize,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            terms: BTreeMap::new(),
            nvars,
        }
    }

    pub fn constant(nvars: usize, c: Scalar) -> Self {
        let mut p = Poly::zero(nvars);
        p.add_term(alloc::vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, Scalar::one())
    }

    pub fn variable(nvars: usize, var: usize) -> Self {
        let mut e = alloc::vec![0; nvars];
        e[var] = 1;
        let mut p = Poly::zero(nvars);
        p.add_term(e, Scalar::one());
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Exps, &Scalar)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, e: Exps, c: Scalar) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(e.len(), self.nvars);
        use alloc::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), -c.clone()))
                .collect(),
            nvars: self.nvars,
        }
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            terms: self.terms.iter().map(|(e, a)| (e.clone(), a * c)).collect(),
            nvars: self.nvars,
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Exps = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    /// Multiplies by a single term.
    pub fn mul_term(&self, e: &[u32], c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        let mut out = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            let exp: Exps = e1.iter().zip(e).map(|(a, b)| a + b).collect();
            out.add_term(exp, c1 * c);
        }
        out
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum::<u32>()).min()
    }

    /// Leading (exponent, coefficient) under the given order.
    pub fn leading_term(&self, order: MonomialOrder) -> Option<(&Exps, &Scalar)> {
        self.terms.iter().max_by(|(a, _), (b, _)| order.cmp(a, b))
    }

    /// Rescales to an integer polynomial with content 1 and positive leading
    /// coefficient; returns the scalar that was factored out, so
    /// `self = scale * primitive`.
    pub fn primitive_part(&self, order: MonomialOrder) -> (Scalar, Poly) {
        if self.is_zero() {
            return (Scalar::one(), self.clone());
        }
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut num_gcd = BigInt::zero();
        for c in self.terms.values() {
            let scaled = c.numer() * (&den_lcm / c.denom());
            num_gcd = num_gcd.gcd(&scaled);
        }
        if num_gcd.is_zero() {
            num_gcd = BigInt::one();
        }
        let mut factor = Scalar::new(num_gcd, den_lcm);
        let lead_sign_neg = {
            let (_, lc) = self.leading_term(order).unwrap();
            (lc / &factor).numer().is_negative()
        };
        if lead_sign_neg {
            factor = -factor;
        }
        let inv = Scalar::one() / factor.clone();
        (factor, self.scale(&inv))
    }

    /// Embeds into X/F^N (purely even x/y monomials, weight 0).
    pub fn to_element(&self, trunc: u32) -> Element {
        let n = self.nvars / 2;
        let mut out = Element::zero(trunc);
        for (e, c) in &self.terms {
            let mut factors: Vec<GenId> = Vec::new();
            for (i, &exp) in e.iter().enumerate() {
                let g = if i < n {
                    GenId::X(i as u32)
                } else {
                    GenId::Y((i - n) as u32)
                };
                for _ in 0..exp {
                    factors.push(g);
                }
            }
            let m = match crate::monomial::normalize_unchecked(&factors) {
                Some((_, mm)) => mm,
                None => SuperMonomial::unit(),
            };
            out.add_term(m, c.clone());
        }
        out
    }

    /// Extracts a polynomial from an element whose monomials are purely in
    /// the x/y variables. Returns `None` if any ghost or antighost appears.
    pub fn from_element(e: &Element, pairs: u32) -> Option<Poly> {
        let nvars = 2 * pairs as usize;
        let mut out = Poly::zero(nvars);
        for (m, c) in e.iter() {
            if !m.odds().is_empty() {
                return None;
            }
            let mut exps = alloc::vec![0u32; nvars];
            for (g, k) in m.evens() {
                match g {
                    GenId::X(i) => exps[*i as usize] += k,
                    GenId::Y(i) => exps[pairs as usize + *i as usize] += k,
                    _ => return None,
                }
            }
            out.add_term(exps, c.clone());
        }
        Some(out)
    }

    pub fn display(&self, order: MonomialOrder) -> String {
        use crate::scalar::format_scalar;
        use core::fmt::Write;
        if self.is_zero() {
            return String::from("0");
        }
        let mut keys: Vec<&Exps> = self.terms.keys().collect();
        keys.sort_by(|a, b| order.cmp(b, a));
        let n = self.nvars / 2;
        let mut parts: Vec<String> = Vec::new();
        for e in keys {
            let c = &self.terms[e];
            let mut s = format_scalar(c);
            s.push_str(" *");
            let mut any = false;
            for (i, &exp) in e.iter().enumerate() {
                if exp == 0 {
                    continue;
                }
                any = true;
                let name = if i < n {
                    alloc::format!("x{}", i + 1)
                } else {
                    alloc::format!("y{}", i - n + 1)
                };
                let _ = write!(s, " {}", name);
                if exp > 1 {
                    let _ = write!(s, "^{}", exp);
                }
            }
            if !any {
                s.push_str(" 1");
            }
            parts.push(s);
        }
        parts.join(" ; ")
    }

    pub fn parse(text: &str, pairs: u32) -> Option<Poly> {
        let nvars = 2 * pairs as usize;
        let mut out = Poly::zero(nvars);
        for part in text.split(';') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (coeff_text, rest) = part.split_once('*')?;
            let c = crate::scalar::parse_scalar(coeff_text)?;
            let mut exps = alloc::vec![0u32; nvars];
            for tok in rest.split_whitespace() {
                if tok == "1" {
                    continue;
                }
                let (name, exp) = match tok.split_once('^') {
                    Some((n, e)) => (n, e.parse().ok()?),
                    None => (tok, 1u32),
                };
                match GenId::parse(name)? {
                    GenId::X(i) if (i as usize) < pairs as usize => exps[i as usize] += exp,
                    GenId::Y(i) if (i as usize) < pairs as usize => {
                        exps[pairs as usize + i as usize] += exp
                    }
                    _ => return None,
                }
            }
            out.add_term(exps, c);
        }
        Some(out)
    }
}

/// True when `a` divides `b` componentwise.
pub fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

pub fn exp_sub(a: &[u32], b: &[u32]) -> Exps {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn exp_lcm(a: &[u32], b: &[u32]) -> Exps {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::mu_poly;
    use crate::scalar::s_int;

    #[test]
    fn degrevlex_vs_grlex_on_mu() {
        let mu = mu_poly();
        // textbook degrevlex: last-variable exponent decides, so x2 y1 leads
        let (lt, _) = mu.leading_term(MonomialOrder::DegRevLex).unwrap();
        assert_eq!(lt, &alloc::vec![0, 1, 1, 0]);
        // graded lex: x1 y2 leads
        let (lt, _) = mu.leading_term(MonomialOrder::GrLex).unwrap();
        assert_eq!(lt, &alloc::vec![1, 0, 0, 1]);
    }

    #[test]
    fn primitive_part_normalizes() {
        let p = mu_poly().scale(&crate::scalar::s_ratio(-3, 4));
        let (f, prim) = p.primitive_part(MonomialOrder::GrLex);
        assert_eq!(
            prim.leading_term(MonomialOrder::GrLex).unwrap().1,
            &s_int(1)
        );
        assert_eq!(prim.scale(&f), p);
    }

    #[test]
    fn element_roundtrip() {
        let p = mu_poly();
        let e = p.to_element(5);
        assert_eq!(Poly::from_element(&e, 2).unwrap(), p);
    }

    #[test]
    fn display_parse_roundtrip() {
        let p = mu_poly().add(&Poly::constant(4, crate::scalar::s_ratio(1, 3)));
        let text = p.display(MonomialOrder::DegRevLex);
        assert_eq!(Poly::parse(&text, 2).unwrap(), p);
    }
}
