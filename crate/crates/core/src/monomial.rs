//! Sign-normalized super-monomials over a generator table.
//!
//! Even-degree generators (x, y and even ghosts/antighosts) carry exponents;
//! odd-degree generators form a square-free word sorted by the global
//! generator order. Normalizing a factor sequence accumulates the Koszul
//! sign of the sorting permutation and detects odd squares.

use alloc::string::String;
use alloc::vec::Vec;

use crate::generators::{GenId, GeneratorTable};

/// Canonical monomial. The derived `Ord` (evens lexicographically, then the
/// odd word) is the global monomial order used for term sorting and
/// deterministic pivoting.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct SuperMonomial {
    /// Sorted by `GenId`, exponents ≥ 1.
    evens: Vec<(GenId, u32)>,
    /// Sorted by `GenId`, distinct.
    odds: Vec<GenId>,
}

impl SuperMonomial {
    pub fn unit() -> Self {
        SuperMonomial::default()
    }

    pub fn is_unit(&self) -> bool {
        self.evens.is_empty() && self.odds.is_empty()
    }

    pub fn generator(g: GenId) -> Self {
        let mut m = SuperMonomial::unit();
        if g.is_odd() {
            m.odds.push(g);
        } else {
            m.evens.push((g, 1));
        }
        m
    }

    pub fn evens(&self) -> &[(GenId, u32)] {
        &self.evens
    }

    pub fn odds(&self) -> &[GenId] {
        &self.odds
    }

    pub fn exponent(&self, g: &GenId) -> u32 {
        if g.is_odd() {
            if self.odds.contains(g) {
                1
            } else {
                0
            }
        } else {
            self.evens
                .iter()
                .find(|(h, _)| h == g)
                .map(|(_, e)| *e)
                .unwrap_or(0)
        }
    }

    /// Total degree Σ (factor degrees).
    pub fn degree(&self) -> i64 {
        let even: i64 = self.evens.iter().map(|(g, e)| g.degree() * *e as i64).sum();
        let odd: i64 = self.odds.iter().map(|g| g.degree()).sum();
        even + odd
    }

    /// Filtration weight: the sum of the degrees of the positive-degree
    /// (antighost) factors, with multiplicity.
    pub fn weight(&self) -> u32 {
        let even: i64 = self
            .evens
            .iter()
            .filter(|(g, _)| g.degree() > 0)
            .map(|(g, e)| g.degree() * *e as i64)
            .sum();
        let odd: i64 = self
            .odds
            .iter()
            .filter(|g| g.degree() > 0)
            .map(|g| g.degree())
            .sum();
        (even + odd) as u32
    }

    /// Number of ghost + antighost factors, with multiplicity.
    pub fn form_degree(&self) -> u32 {
        let even: u32 = self
            .evens
            .iter()
            .filter(|(g, _)| !g.is_even_variable())
            .map(|(_, e)| *e)
            .sum();
        even + self.odds.iter().filter(|g| !g.is_even_variable()).count() as u32
    }

    /// Number of positive-degree factors, with multiplicity: the monomial
    /// lies in I^(q) iff this count is ≥ q.
    pub fn positive_factor_count(&self) -> u32 {
        let even: u32 = self
            .evens
            .iter()
            .filter(|(g, _)| g.degree() > 0)
            .map(|(_, e)| *e)
            .sum();
        even + self.odds.iter().filter(|g| g.degree() > 0).count() as u32
    }

    pub fn has_ghost(&self) -> bool {
        self.evens.iter().any(|(g, _)| g.is_ghost()) || self.odds.iter().any(|g| g.is_ghost())
    }

    pub fn has_anti(&self) -> bool {
        self.evens.iter().any(|(g, _)| g.is_anti()) || self.odds.iter().any(|g| g.is_anti())
    }

    /// Polynomial degree of the x/y part.
    pub fn poly_degree(&self) -> u32 {
        self.evens
            .iter()
            .filter(|(g, _)| g.is_even_variable())
            .map(|(_, e)| *e)
            .sum()
    }

    /// The factor sequence in canonical order (evens merged with odds by
    /// the global generator order, exponents expanded).
    pub fn factors(&self) -> Vec<GenId> {
        let mut out = Vec::new();
        let mut ei = 0;
        let mut oi = 0;
        while ei < self.evens.len() || oi < self.odds.len() {
            let take_even = match (self.evens.get(ei), self.odds.get(oi)) {
                (Some((g, _)), Some(o)) => g < o,
                (Some(_), None) => true,
                _ => false,
            };
            if take_even {
                let (g, e) = self.evens[ei];
                for _ in 0..e {
                    out.push(g);
                }
                ei += 1;
            } else {
                out.push(self.odds[oi]);
                oi += 1;
            }
        }
        out
    }

    /// Splits into (antighost-only part, ghost/x/y part). Used by the maps
    /// that act on the T-factor only.
    pub fn split_anti(&self) -> (SuperMonomial, SuperMonomial) {
        let mut anti = SuperMonomial::unit();
        let mut rest = SuperMonomial::unit();
        for (g, e) in &self.evens {
            if g.is_anti() {
                anti.evens.push((*g, *e));
            } else {
                rest.evens.push((*g, *e));
            }
        }
        for g in &self.odds {
            if g.is_anti() {
                anti.odds.push(*g);
            } else {
                rest.odds.push(*g);
            }
        }
        (anti, rest)
    }

    /// Removes one occurrence of `g`, if present.
    pub fn without(&self, g: &GenId) -> Option<SuperMonomial> {
        let mut m = self.clone();
        if g.is_odd() {
            let pos = m.odds.iter().position(|h| h == g)?;
            m.odds.remove(pos);
        } else {
            let pos = m.evens.iter().position(|(h, _)| h == g)?;
            if m.evens[pos].1 == 1 {
                m.evens.remove(pos);
            } else {
                m.evens[pos].1 -= 1;
            }
        }
        Some(m)
    }

    /// Raw product with Koszul sign; 0 (None) if an odd generator repeats.
    pub fn mul(&self, other: &SuperMonomial) -> Option<(i8, SuperMonomial)> {
        // Odd words: count transpositions needed to interleave other.odds
        // into self.odds. Walking other's odd factors left to right, each
        // must jump over the odd factors of self that come after it.
        let mut sign = 0i64;
        let mut odds = Vec::with_capacity(self.odds.len() + other.odds.len());
        let mut i = 0;
        for &g in &other.odds {
            while i < self.odds.len() && self.odds[i] < g {
                odds.push(self.odds[i]);
                i += 1;
            }
            if i < self.odds.len() && self.odds[i] == g {
                return None; // odd square
            }
            // g jumps over the remaining odd factors of self
            sign += (self.odds.len() - i) as i64;
            odds.push(g);
        }
        odds.extend_from_slice(&self.odds[i..]);

        let mut evens = self.evens.clone();
        for (g, e) in &other.evens {
            match evens.binary_search_by(|(h, _)| h.cmp(g)) {
                Ok(pos) => evens[pos].1 += e,
                Err(pos) => evens.insert(pos, (*g, *e)),
            }
        }
        let s = if sign % 2 == 0 { 1 } else { -1 };
        Some((s, SuperMonomial { evens, odds }))
    }

    pub fn display(&self) -> String {
        use core::fmt::Write;
        if self.is_unit() {
            return String::from("1");
        }
        let mut parts: Vec<String> = Vec::new();
        let mut ei = 0;
        let mut oi = 0;
        while ei < self.evens.len() || oi < self.odds.len() {
            let take_even = match (self.evens.get(ei), self.odds.get(oi)) {
                (Some((g, _)), Some(o)) => g < o,
                (Some(_), None) => true,
                _ => false,
            };
            if take_even {
                let (g, e) = self.evens[ei];
                let mut s = g.name();
                if e > 1 {
                    let _ = write!(s, "^{}", e);
                }
                parts.push(s);
                ei += 1;
            } else {
                parts.push(self.odds[oi].name());
                oi += 1;
            }
        }
        parts.join(" ")
    }
}

/// Normalizes an explicit factor sequence: returns the Koszul sign of the
/// sorting permutation and the canonical monomial, or `None` when an odd
/// generator repeats (the monomial is zero).
pub fn normalize(
    table: &GeneratorTable,
    factors: &[GenId],
) -> Result<Option<(i8, SuperMonomial)>, crate::error::Error> {
    for g in factors {
        table.check(g)?;
    }
    Ok(normalize_unchecked(factors))
}

/// Same as [`normalize`] without the table membership check.
pub fn normalize_unchecked(factors: &[GenId]) -> Option<(i8, SuperMonomial)> {
    // Koszul sign: product over inversions (i < j, g_i > g_j) of
    // (-1)^{deg g_i * deg g_j}; only odd-odd inversions contribute.
    let mut sign = 0i64;
    let odd_positions: Vec<usize> = (0..factors.len())
        .filter(|&i| factors[i].is_odd())
        .collect();
    for (a, &i) in odd_positions.iter().enumerate() {
        for &j in &odd_positions[a + 1..] {
            use core::cmp::Ordering;
            match factors[i].cmp(&factors[j]) {
                Ordering::Greater => sign += 1,
                Ordering::Equal => return None,
                Ordering::Less => {}
            }
        }
    }
    let mut evens: Vec<(GenId, u32)> = Vec::new();
    let mut odds: Vec<GenId> = Vec::new();
    let mut sorted = factors.to_vec();
    sorted.sort();
    for g in sorted {
        if g.is_odd() {
            odds.push(g);
        } else {
            match evens.last_mut() {
                Some((h, e)) if *h == g => *e += 1,
                _ => evens.push((g, 1)),
            }
        }
    }
    let s = if sign % 2 == 0 { 1 } else { -1 };
    Some((s, SuperMonomial { evens, odds }))
}
