//! Deterministic random sampling of elements, used by the selftest
//! property suite and the acceptance tests.

use bfvkit_core::element::Element;
use bfvkit_core::generators::{GenId, GeneratorTable};
use bfvkit_core::monomial::{normalize_unchecked, SuperMonomial};
use bfvkit_core::scalar::Scalar;
use bfvkit_core::tate::graded_words;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub struct Sampler {
    rng: StdRng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: StdRng::seed_from_u64(seed),
        }
    }

    pub fn rational(&mut self) -> Scalar {
        let num: i64 = loop {
            let n = self.rng.gen_range(-3..=3);
            if n != 0 {
                break n;
            }
        };
        let den: i64 = self.rng.gen_range(1..=2);
        Scalar::new(num.into(), den.into())
    }

    pub fn pool(table: &GeneratorTable) -> Vec<GenId> {
        let mut pool = Vec::new();
        for i in 0..table.pairs() {
            pool.push(GenId::X(i));
            pool.push(GenId::Y(i));
        }
        for g in table.ghost_iter() {
            pool.push(g);
            pool.push(g.dual().unwrap());
        }
        pool
    }

    /// A random monomial with at most `max_factors` factors; None when the
    /// factor word contains an odd square.
    pub fn monomial(
        &mut self,
        table: &GeneratorTable,
        max_factors: usize,
    ) -> Option<(i8, SuperMonomial)> {
        let pool = Self::pool(table);
        let len = self.rng.gen_range(0..=max_factors);
        let factors: Vec<GenId> = (0..len)
            .map(|_| pool[self.rng.gen_range(0..pool.len())])
            .collect();
        normalize_unchecked(&factors)
    }

    pub fn element(&mut self, table: &GeneratorTable, terms: usize, trunc: u32) -> Element {
        let mut e = Element::zero(trunc);
        for _ in 0..terms {
            if let Some((sign, m)) = self.monomial(table, 5) {
                let mut c = self.rational();
                if sign < 0 {
                    c = -c;
                }
                e.add_term(m, c);
            }
        }
        e
    }

    /// A random nonzero homogeneous element: one base monomial plus more of
    /// the same degree found by rejection.
    pub fn homogeneous(&mut self, table: &GeneratorTable, trunc: u32) -> Element {
        for _ in 0..50 {
            if let Some((sign, m)) = self.monomial(table, 5) {
                if m.weight() >= trunc {
                    continue;
                }
                let degree = m.degree();
                let mut e = Element::zero(trunc);
                let mut c = self.rational();
                if sign < 0 {
                    c = -c;
                }
                e.add_term(m, c);
                for _ in 0..6 {
                    if let Some((s2, m2)) = self.monomial(table, 5) {
                        if m2.degree() == degree && m2.weight() < trunc {
                            let mut c2 = self.rational();
                            if s2 < 0 {
                                c2 = -c2;
                            }
                            e.add_term(m2, c2);
                        }
                    }
                }
                if !e.is_zero() {
                    return e;
                }
            }
        }
        Element::one(trunc)
    }

    /// A random word over the generator pool, for rewriting tests.
    pub fn word(&mut self, table: &GeneratorTable, max_len: usize) -> Vec<GenId> {
        let pool = Self::pool(table);
        let len = self.rng.gen_range(0..=max_len);
        (0..len)
            .map(|_| pool[self.rng.gen_range(0..pool.len())])
            .collect()
    }

    /// A random valid gauge generator: degree 0, every monomial with at
    /// least two positive factors, weight < trunc. Returns None when the
    /// table has no such monomials.
    pub fn gauge_generator(&mut self, table: &GeneratorTable, trunc: u32) -> Option<Element> {
        let gens: Vec<GenId> = Self::pool(table)
            .into_iter()
            .filter(|g| !g.is_even_variable())
            .collect();
        let words: Vec<SuperMonomial> = graded_words(&gens, 0, 6)
            .into_iter()
            .filter(|w| w.positive_factor_count() >= 2 && w.weight() < trunc && !w.is_unit())
            .collect();
        if words.is_empty() {
            return None;
        }
        let mut c = Element::zero(trunc);
        let picks = self.rng.gen_range(1..=2.min(words.len()));
        for _ in 0..picks {
            let w = words[self.rng.gen_range(0..words.len())].clone();
            // small polynomial dressing
            let poly = match self.rng.gen_range(0..3) {
                0 => SuperMonomial::unit(),
                1 => SuperMonomial::generator(GenId::X(self.rng.gen_range(0..table.pairs()))),
                _ => SuperMonomial::generator(GenId::Y(self.rng.gen_range(0..table.pairs()))),
            };
            if let Some((sign, m)) = poly.mul(&w) {
                let mut coeff = self.rational();
                if sign < 0 {
                    coeff = -coeff;
                }
                c.add_term(m, coeff);
            }
        }
        if c.is_zero() {
            None
        } else {
            Some(c)
        }
    }

    pub fn gen_range(&mut self, range: core::ops::Range<usize>) -> usize {
        self.rng.gen_range(range)
    }
}
