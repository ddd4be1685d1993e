//! Generator tables: symplectic pairs (x_i, y_i) of degree zero, ghosts
//! e_j^(l) of degree -l and their dual antighosts e_j^(l)* of degree +l.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::Error;

/// A single generator. The derived `Ord` realizes the global generator
/// order: all x's, then all y's, then ghosts by (degree descending, index),
/// then antighosts likewise.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum GenId {
    X(u32),
    Y(u32),
    /// Ghost `e_{index}^{(level)}` of degree `-level`, level ≥ 1.
    Ghost {
        level: u32,
        index: u32,
    },
    /// Antighost `e_{index}^{(level)}*` of degree `+level`.
    Anti {
        level: u32,
        index: u32,
    },
}

impl GenId {
    pub fn degree(&self) -> i64 {
        match self {
            GenId::X(_) | GenId::Y(_) => 0,
            GenId::Ghost { level, .. } => -(*level as i64),
            GenId::Anti { level, .. } => *level as i64,
        }
    }

    pub fn is_odd(&self) -> bool {
        self.degree().rem_euclid(2) == 1
    }

    pub fn is_ghost(&self) -> bool {
        matches!(self, GenId::Ghost { .. })
    }

    pub fn is_anti(&self) -> bool {
        matches!(self, GenId::Anti { .. })
    }

    pub fn is_even_variable(&self) -> bool {
        matches!(self, GenId::X(_) | GenId::Y(_))
    }

    /// The dual generator for ghost/antighost pairs.
    pub fn dual(&self) -> Option<GenId> {
        match *self {
            GenId::Ghost { level, index } => Some(GenId::Anti { level, index }),
            GenId::Anti { level, index } => Some(GenId::Ghost { level, index }),
            _ => None,
        }
    }

    /// Name used in the deterministic text serialization: `x3`, `y1`,
    /// `e2_1` for the ghost e_2^{(1)}, `e2_1*` for its antighost.
    pub fn name(&self) -> String {
        use alloc::format;
        match *self {
            GenId::X(i) => format!("x{}", i + 1),
            GenId::Y(i) => format!("y{}", i + 1),
            GenId::Ghost { level, index } => format!("e{}_{}", index + 1, level),
            GenId::Anti { level, index } => format!("e{}_{}*", index + 1, level),
        }
    }

    pub fn parse(name: &str) -> Option<GenId> {
        if let Some(rest) = name.strip_prefix('x') {
            if let Some(rest) = rest.strip_prefix('0') {
                let _ = rest;
                return None;
            }
            let i: u32 = rest.parse().ok()?;
            return Some(GenId::X(i.checked_sub(1)?));
        }
        if let Some(rest) = name.strip_prefix('y') {
            let i: u32 = rest.parse().ok()?;
            return Some(GenId::Y(i.checked_sub(1)?));
        }
        if let Some(rest) = name.strip_prefix('e') {
            let (body, anti) = match rest.strip_suffix('*') {
                Some(b) => (b, true),
                None => (rest, false),
            };
            let (idx, lvl) = body.split_once('_')?;
            let index: u32 = idx.parse().ok()?;
            let level: u32 = lvl.parse().ok()?;
            if level == 0 || index == 0 {
                return None;
            }
            let index = index - 1;
            return Some(if anti {
                GenId::Anti { level, index }
            } else {
                GenId::Ghost { level, index }
            });
        }
        None
    }
}

impl fmt::Display for GenId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Declaration of the generators of X₀ = P ⊗ Sym(𝓜 ⊕ 𝓜*): `pairs`
/// symplectic pairs and finitely many ghost/antighost pairs per degree.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct GeneratorTable {
    pairs: u32,
    /// level -> number of ghosts of degree -level (each with its dual).
    ghosts: BTreeMap<u32, u32>,
}

impl GeneratorTable {
    pub fn new(pairs: u32) -> Self {
        GeneratorTable {
            pairs,
            ghosts: BTreeMap::new(),
        }
    }

    pub fn pairs(&self) -> u32 {
        self.pairs
    }

    pub fn ghost_count(&self, level: u32) -> u32 {
        self.ghosts.get(&level).copied().unwrap_or(0)
    }

    /// Deepest ghost level present (0 when there are no ghosts).
    pub fn max_level(&self) -> u32 {
        self.ghosts.keys().next_back().copied().unwrap_or(0)
    }

    /// Adds one ghost (and its dual antighost) of degree `-level`, returning
    /// the new ghost id.
    pub fn add_ghost(&mut self, level: u32) -> GenId {
        assert!(level >= 1, "ghost degrees are strictly negative");
        let count = self.ghosts.entry(level).or_insert(0);
        let index = *count;
        *count += 1;
        GenId::Ghost { level, index }
    }

    pub fn contains(&self, g: &GenId) -> bool {
        match *g {
            GenId::X(i) | GenId::Y(i) => i < self.pairs,
            GenId::Ghost { level, index } | GenId::Anti { level, index } => {
                index < self.ghost_count(level)
            }
        }
    }

    pub fn check(&self, g: &GenId) -> Result<(), Error> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(Error::UnknownGenerator(g.name()))
        }
    }

    /// All ghosts in the global generator order.
    pub fn ghost_iter(&self) -> impl Iterator<Item = GenId> + '_ {
        self.ghosts
            .iter()
            .flat_map(|(&level, &count)| (0..count).map(move |index| GenId::Ghost { level, index }))
    }

    pub fn x_iter(&self) -> impl Iterator<Item = GenId> + '_ {
        (0..self.pairs).map(GenId::X)
    }

    pub fn y_iter(&self) -> impl Iterator<Item = GenId> + '_ {
        (0..self.pairs).map(GenId::Y)
    }

    /// `pairs=2 ghosts=1:3,2:1` style summary used in file headers.
    pub fn summary(&self) -> String {
        use alloc::format;
        let mut s = format!("pairs={}", self.pairs);
        if !self.ghosts.is_empty() {
            s.push_str(" ghosts=");
            let parts: Vec<String> = self
                .ghosts
                .iter()
                .map(|(l, c)| format!("{}:{}", l, c))
                .collect();
            s.push_str(&parts.join(","));
        }
        s
    }

    pub fn parse_summary(text: &str) -> Option<GeneratorTable> {
        let mut table = GeneratorTable::new(0);
        for field in text.split_whitespace() {
            let (key, value) = field.split_once('=')?;
            match key {
                "pairs" => table.pairs = value.parse().ok()?,
                "ghosts" => {
                    for part in value.split(',') {
                        let (l, c) = part.split_once(':')?;
                        let level: u32 = l.parse().ok()?;
                        let count: u32 = c.parse().ok()?;
                        if level == 0 {
                            return None;
                        }
                        table.ghosts.insert(level, count);
                    }
                }
                _ => return None,
            }
        }
        Some(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn global_order_matches_declaration() {
        // x's < y's < ghosts (shallow first) < antighosts (shallow first)
        let x2 = GenId::X(1);
        let y1 = GenId::Y(0);
        let e11 = GenId::Ghost { level: 1, index: 0 };
        let e12 = GenId::Ghost { level: 2, index: 0 };
        let a11 = GenId::Anti { level: 1, index: 0 };
        assert!(x2 < y1);
        assert!(y1 < e11);
        assert!(e11 < e12);
        assert!(e12 < a11);
    }

    #[test]
    fn names_roundtrip() {
        let ids = [
            GenId::X(0),
            GenId::Y(2),
            GenId::Ghost { level: 1, index: 1 },
            GenId::Anti { level: 3, index: 0 },
        ];
        for id in ids {
            assert_eq!(GenId::parse(&id.name()), Some(id));
        }
        assert_eq!(
            GenId::parse("e2_1*"),
            Some(GenId::Anti { level: 1, index: 1 })
        );
        assert!(GenId::parse("z1").is_none());
    }

    #[test]
    fn table_summary_roundtrip() {
        let mut t = GeneratorTable::new(3);
        t.add_ghost(1);
        t.add_ghost(1);
        t.add_ghost(2);
        let text = t.summary();
        assert_eq!(GeneratorTable::parse_summary(&text), Some(t));
    }

    #[test]
    fn dual_pairs() {
        let e = GenId::Ghost { level: 2, index: 4 };
        assert_eq!(e.dual().unwrap().dual().unwrap(), e);
        assert!(GenId::X(0).dual().is_none());
        assert_eq!(e.degree(), -2);
        assert!(!e.is_odd());
        assert!(GenId::Ghost { level: 1, index: 0 }.is_odd());
    }
}
