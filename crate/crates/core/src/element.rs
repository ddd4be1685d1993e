//! Elements of X/F^N: finite rational-linear combinations of super-monomials
//! carrying their truncation order N. Monomials of filtration weight ≥ N are
//! identically dropped, so all arithmetic happens in the quotient algebra.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::Error;
use crate::generators::{GenId, GeneratorTable};
use crate::monomial::SuperMonomial;
use crate::scalar::{format_scalar, parse_scalar, Scalar};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Element {
    terms: BTreeMap<SuperMonomial, Scalar>,
    trunc: u32,
}

impl Element {
    pub fn zero(trunc: u32) -> Self {
        Element {
            terms: BTreeMap::new(),
            trunc,
        }
    }

    pub fn one(trunc: u32) -> Self {
        Element::from_term(SuperMonomial::unit(), Scalar::from_integer(1.into()), trunc)
    }

    pub fn from_term(m: SuperMonomial, c: Scalar, trunc: u32) -> Self {
        let mut e = Element::zero(trunc);
        e.add_term(m, c);
        e
    }

    pub fn generator(g: GenId, trunc: u32) -> Self {
        Element::from_term(
            SuperMonomial::generator(g),
            Scalar::from_integer(1.into()),
            trunc,
        )
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
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

    pub fn iter(&self) -> impl Iterator<Item = (&SuperMonomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &SuperMonomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Adds `c * m`, respecting the truncation and dropping zeros.
    pub fn add_term(&mut self, m: SuperMonomial, c: Scalar) {
        if c.is_zero() || m.weight() >= self.trunc {
            return;
        }
        use alloc::collections::btree_map::Entry;
        match self.terms.entry(m) {
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

    fn assert_compatible(&self, other: &Element) {
        assert_eq!(
            self.trunc, other.trunc,
            "elements with different truncations combined; truncate explicitly first"
        );
    }

    pub fn add(&self, other: &Element) -> Element {
        self.assert_compatible(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Element) -> Element {
        self.assert_compatible(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Element {
        let mut out = Element::zero(self.trunc);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> Element {
        if c.is_zero() {
            return Element::zero(self.trunc);
        }
        let mut out = Element::zero(self.trunc);
        for (m, a) in &self.terms {
            out.terms.insert(m.clone(), a * c);
        }
        out
    }

    /// Graded-commutative product in X/F^N.
    pub fn mul(&self, other: &Element) -> Element {
        self.assert_compatible(other);
        let mut out = Element::zero(self.trunc);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                // weights are additive, so skip pairs that truncate away
                if m1.weight() + m2.weight() >= self.trunc {
                    continue;
                }
                if let Some((sign, m)) = m1.mul(m2) {
                    let mut c = c1 * c2;
                    if sign < 0 {
                        c = -c;
                    }
                    out.add_term(m, c);
                }
            }
        }
        out
    }

    /// Checked product: verifies table membership and equal truncations.
    pub fn mul_checked(&self, other: &Element, table: &GeneratorTable) -> Result<Element, Error> {
        if self.trunc != other.trunc {
            return Err(Error::TruncationMismatch {
                left: self.trunc,
                right: other.trunc,
            });
        }
        for e in [self, other] {
            for (m, _) in e.iter() {
                for g in m.factors() {
                    table.check(&g)?;
                }
            }
        }
        Ok(self.mul(other))
    }

    /// Restricts to X/F^{n}. The result's truncation is min(N, n): truncating
    /// below the stored precision never claims more than is known.
    pub fn truncate(&self, n: u32) -> Element {
        let n = n.min(self.trunc);
        let mut out = Element::zero(n);
        for (m, c) in &self.terms {
            if m.weight() < n {
                out.terms.insert(m.clone(), c.clone());
            }
        }
        out
    }

    /// Keeps only the terms of filtration weight exactly `w`.
    pub fn weight_part(&self, w: u32) -> Element {
        let mut out = Element::zero(self.trunc);
        for (m, c) in &self.terms {
            if m.weight() == w {
                out.terms.insert(m.clone(), c.clone());
            }
        }
        out
    }

    /// Smallest filtration weight present, or None for 0.
    pub fn min_weight(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.weight()).min()
    }

    /// Decomposition by total degree; components sum to the element.
    pub fn degree_decompose(&self) -> BTreeMap<i64, Element> {
        let mut out: BTreeMap<i64, Element> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.degree())
                .or_insert_with(|| Element::zero(self.trunc))
                .terms
                .insert(m.clone(), c.clone());
        }
        out
    }

    /// Decomposition by form degree (ghost + antighost factor count).
    pub fn form_degree_decompose(&self) -> BTreeMap<u32, Element> {
        let mut out: BTreeMap<u32, Element> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.form_degree())
                .or_insert_with(|| Element::zero(self.trunc))
                .terms
                .insert(m.clone(), c.clone());
        }
        out
    }

    /// Total degree if homogeneous (0 counts as homogeneous of any degree).
    pub fn homogeneous_degree(&self) -> Option<i64> {
        let mut deg = None;
        for m in self.terms.keys() {
            match deg {
                None => deg = Some(m.degree()),
                Some(d) if d == m.degree() => {}
                _ => return None,
            }
        }
        deg
    }

    /// True when every monomial has at least `q` positive-degree factors.
    pub fn in_ideal_power(&self, q: u32) -> bool {
        self.terms.keys().all(|m| m.positive_factor_count() >= q)
    }

    pub fn max_poly_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.poly_degree())
            .max()
            .unwrap_or(0)
    }

    /// One line per term, sorted by the global monomial order.
    pub fn to_lines(&self) -> Vec<String> {
        use alloc::format;
        self.terms
            .iter()
            .map(|(m, c)| format!("{} * {}", format_scalar(c), m.display()))
            .collect()
    }

    /// Parses a `coeff * factors` term line and adds it.
    pub fn add_term_line(&mut self, line: &str, table: &GeneratorTable) -> Result<(), Error> {
        let (c, m) = parse_term_line(line, table)?;
        self.add_term(m, c);
        Ok(())
    }
}

/// Parses `p/q * fac fac ...` (with `1` for the empty monomial).
pub fn parse_term_line(
    line: &str,
    table: &GeneratorTable,
) -> Result<(Scalar, SuperMonomial), Error> {
    use alloc::format;
    use alloc::string::ToString;
    let err = |col: usize, msg: String| Error::Parse {
        line: 0,
        column: col,
        message: msg,
    };
    let (coeff_text, factors_text) = line
        .split_once('*')
        .ok_or_else(|| err(0, "expected `coeff * factors`".to_string()))?;
    let coeff = parse_scalar(coeff_text)
        .ok_or_else(|| err(0, format!("bad coefficient `{}`", coeff_text.trim())))?;
    let mut factors: Vec<GenId> = Vec::new();
    for tok in factors_text.split_whitespace() {
        if tok == "1" {
            continue;
        }
        let (name, exp) = match tok.split_once('^') {
            Some((n, e)) => {
                let exp: u32 = e
                    .parse()
                    .map_err(|_| err(0, format!("bad exponent in `{}`", tok)))?;
                (n, exp)
            }
            None => (tok, 1),
        };
        let g =
            GenId::parse(name).ok_or_else(|| err(0, format!("unknown generator `{}`", name)))?;
        table.check(&g)?;
        for _ in 0..exp {
            factors.push(g);
        }
    }
    match crate::monomial::normalize_unchecked(&factors) {
        Some((sign, m)) => {
            let c = if sign < 0 { -coeff } else { coeff };
            Ok((c, m))
        }
        None => Ok((Scalar::zero(), SuperMonomial::unit())),
    }
}
