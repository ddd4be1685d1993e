//! Sparse exact linear algebra over ℚ with deterministic pivoting.
//!
//! Vectors are maps row-index -> scalar. The incremental echelon keeps, for
//! every inserted column, a transcript expressing the stored vector over the
//! inserted column ids, so solves return exact combination certificates and
//! dependent insertions return exact kernel relations. Pivots are always the
//! smallest remaining row index (lexicographically-least pivoting).

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::scalar::Scalar;

pub type SparseVec = BTreeMap<usize, Scalar>;

pub fn vec_axpy(target: &mut SparseVec, coeff: &Scalar, source: &SparseVec) {
    if coeff.is_zero() {
        return;
    }
    for (i, c) in source {
        let entry = target.entry(*i).or_insert_with(Scalar::zero);
        *entry += c * coeff;
        if entry.is_zero() {
            target.remove(i);
        }
    }
}

pub fn vec_scale(v: &SparseVec, coeff: &Scalar) -> SparseVec {
    v.iter().map(|(i, c)| (*i, c * coeff)).collect()
}

/// Assigns dense indices to keys in insertion order.
#[derive(Clone, Debug, Default)]
pub struct Indexer<K: Ord + Clone> {
    map: BTreeMap<K, usize>,
    keys: Vec<K>,
}

impl<K: Ord + Clone> Indexer<K> {
    pub fn new() -> Self {
        Indexer {
            map: BTreeMap::new(),
            keys: Vec::new(),
        }
    }

    pub fn intern(&mut self, key: &K) -> usize {
        if let Some(&i) = self.map.get(key) {
            return i;
        }
        let i = self.keys.len();
        self.map.insert(key.clone(), i);
        self.keys.push(key.clone());
        i
    }

    pub fn get(&self, key: &K) -> Option<usize> {
        self.map.get(key).copied()
    }

    pub fn key(&self, i: usize) -> &K {
        &self.keys[i]
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }
}

/// Outcome of inserting a column into the echelon.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Inserted {
    /// The column increased the rank.
    Independent,
    /// The column is a combination of previously inserted ones; the map
    /// gives that combination (column id -> coefficient).
    Dependent(SparseVec),
}

/// Incremental row echelon of a growing set of sparse columns with
/// combination transcripts.
#[derive(Clone, Debug, Default)]
pub struct SpanSolver {
    /// pivot row -> (vector normalized to 1 at pivot, combination over
    /// inserted column ids reproducing it).
    rows: BTreeMap<usize, (SparseVec, SparseVec)>,
}

impl SpanSolver {
    pub fn new() -> Self {
        SpanSolver {
            rows: BTreeMap::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the echelon, accumulating the combination of
    /// inserted columns that was subtracted.
    fn reduce(&self, mut v: SparseVec) -> (SparseVec, SparseVec) {
        let mut combo: SparseVec = SparseVec::new();
        while let Some((&r, _)) = v.iter().next() {
            let Some((vec, rc)) = self.rows.get(&r) else {
                break;
            };
            let lambda = v[&r].clone();
            let neg = -lambda.clone();
            vec_axpy(&mut v, &neg, vec);
            vec_axpy(&mut combo, &lambda, rc);
            debug_assert!(!v.contains_key(&r));
        }
        (v, combo)
    }

    /// Inserts a column under the given id.
    pub fn insert(&mut self, id: usize, v: SparseVec) -> Inserted {
        let (mut reduced, combo) = self.reduce(v);
        let Some((&pivot, _)) = reduced.iter().next() else {
            return Inserted::Dependent(combo);
        };
        let lead = reduced[&pivot].clone();
        let inv = Scalar::from_integer(1.into()) / lead;
        reduced = vec_scale(&reduced, &inv);
        // transcript: stored = (column_id - combo) / lead
        let mut transcript: SparseVec = SparseVec::new();
        transcript.insert(id, inv.clone());
        for (j, c) in &combo {
            let entry = transcript.entry(*j).or_insert_with(Scalar::zero);
            *entry -= c * &inv;
            if entry.is_zero() {
                transcript.remove(j);
            }
        }
        self.rows.insert(pivot, (reduced, transcript));
        Inserted::Independent
    }

    /// True when `v` lies in the span of the inserted columns.
    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v.clone()).0.is_empty()
    }

    /// Expresses `b` over the inserted columns, or None when b is outside
    /// the span. The returned map satisfies b = Σ coeff_id * column_id
    /// exactly.
    pub fn solve(&self, b: &SparseVec) -> Option<SparseVec> {
        let (residual, combo) = self.reduce(b.clone());
        if residual.is_empty() {
            Some(combo)
        } else {
            None
        }
    }

    /// Pivot rows in ascending order; a stable digest of the pivot choices.
    pub fn pivot_rows(&self) -> Vec<usize> {
        self.rows.keys().copied().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::s_int;

    fn v(entries: &[(usize, i64)]) -> SparseVec {
        entries.iter().map(|(i, c)| (*i, s_int(*c))).collect()
    }

    #[test]
    fn solve_with_certificate() {
        let mut s = SpanSolver::new();
        assert_eq!(s.insert(0, v(&[(0, 1), (1, 2)])), Inserted::Independent);
        assert_eq!(s.insert(1, v(&[(1, 1), (2, 1)])), Inserted::Independent);
        // b = col0 - 2*col1 = (1, 0, -2)
        let b = v(&[(0, 1), (2, -2)]);
        let combo = s.solve(&b).unwrap();
        assert_eq!(combo, v(&[(0, 1), (1, -2)]));
        assert!(s.solve(&v(&[(3, 1)])).is_none());
    }

    #[test]
    fn dependent_insert_reports_kernel_combination() {
        let mut s = SpanSolver::new();
        s.insert(0, v(&[(0, 1), (1, 1)]));
        s.insert(1, v(&[(1, 1)]));
        // col2 = col0 + 2*col1
        match s.insert(2, v(&[(0, 1), (1, 3)])) {
            Inserted::Dependent(combo) => {
                assert_eq!(combo, v(&[(0, 1), (1, 2)]));
            }
            _ => panic!("expected dependence"),
        }
        assert_eq!(s.rank(), 2);
    }

    #[test]
    fn rational_pivoting_is_exact() {
        let mut s = SpanSolver::new();
        s.insert(0, v(&[(0, 2), (1, 3)]));
        s.insert(1, v(&[(0, 4), (1, 7)]));
        let combo = s.solve(&v(&[(1, 1)])).unwrap();
        // -2*col0 + 1*col1 = (0,1)
        assert_eq!(combo.get(&0), Some(&s_int(-2)));
        assert_eq!(combo.get(&1), Some(&s_int(1)));
    }
}
