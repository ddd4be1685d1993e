//! Property tests for the algebra, bracket, and normal-ordering layers.
//! Expected values are computed by independent factor-list oracles.

use bfvkit_core::element::Element;
use bfvkit_core::generators::{GenId, GeneratorTable};
use bfvkit_core::monomial::{normalize_unchecked, SuperMonomial};
use bfvkit_core::poisson::{bracket, filtration_bound, jacobiator, pairing};
use bfvkit_core::quantize::{normal_order_with, q_map, qbracket_over_hbar, qmul, RewriteStrategy};
use bfvkit_core::scalar::{s_int, HbarPoly, Scalar};
use num_traits::Zero;
use proptest::prelude::*;

const TRUNC: u32 = 6;

fn table() -> GeneratorTable {
    let mut t = GeneratorTable::new(2);
    t.add_ghost(1);
    t.add_ghost(1);
    t.add_ghost(2);
    t
}

fn generator_pool() -> Vec<GenId> {
    let mut v = vec![GenId::X(0), GenId::X(1), GenId::Y(0), GenId::Y(1)];
    for g in table().ghost_iter() {
        v.push(g);
        v.push(g.dual().unwrap());
    }
    v
}

fn arb_monomial() -> impl Strategy<Value = Option<(i8, SuperMonomial)>> {
    let pool = generator_pool();
    proptest::collection::vec(0..pool.len(), 0..5).prop_map(move |ids| {
        let factors: Vec<GenId> = ids.iter().map(|&i| pool[i]).collect();
        normalize_unchecked(&factors)
    })
}

fn arb_element() -> impl Strategy<Value = Element> {
    proptest::collection::vec((arb_monomial(), -3i64..4), 1..4).prop_map(|terms| {
        let mut e = Element::zero(TRUNC);
        for (m, c) in terms {
            if let Some((sign, m)) = m {
                e.add_term(m, s_int(c * sign as i64));
            }
        }
        e
    })
}

/// A homogeneous element: one random monomial with a nonzero coefficient.
fn arb_homogeneous() -> impl Strategy<Value = Element> {
    (arb_monomial(), 1i64..4).prop_map(|(m, c)| {
        let mut e = Element::zero(TRUNC);
        if let Some((sign, m)) = m {
            e.add_term(m, s_int(c * sign as i64));
        }
        e
    })
}

/// Brute-force product: concatenate factor lists and renormalize each
/// monomial pair.
fn oracle_mul(a: &Element, b: &Element) -> Element {
    let mut out = Element::zero(a.trunc());
    for (m1, c1) in a.iter() {
        for (m2, c2) in b.iter() {
            let mut factors = m1.factors();
            factors.extend(m2.factors());
            if let Some((sign, m)) = normalize_unchecked(&factors) {
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

/// Biderivation expansion on explicit factor lists, with Koszul signs
/// accumulated by explicit transposition counting.
fn oracle_bracket(a: &Element, b: &Element) -> Element {
    let mut out = Element::zero(a.trunc());
    for (m1, c1) in a.iter() {
        for (m2, c2) in b.iter() {
            let fs1 = m1.factors();
            let fs2 = m2.factors();
            for (i, u) in fs1.iter().enumerate() {
                for (j, v) in fs2.iter().enumerate() {
                    let lambda = pairing(u, v);
                    if lambda == 0 {
                        continue;
                    }
                    // sign to commute u past the tail of fs1 and v past the
                    // head of fs2
                    let mut exp = 0i64;
                    for t in &fs1[i + 1..] {
                        exp += u.degree() * t.degree();
                    }
                    for t in &fs2[..j] {
                        exp += v.degree() * t.degree();
                    }
                    let mut rest: Vec<GenId> = Vec::new();
                    rest.extend_from_slice(&fs1[..i]);
                    rest.extend_from_slice(&fs1[i + 1..]);
                    rest.extend_from_slice(&fs2[..j]);
                    rest.extend_from_slice(&fs2[j + 1..]);
                    if let Some((sign, m)) = normalize_unchecked(&rest) {
                        let mut c = c1 * c2 * s_int(lambda as i64);
                        if exp.rem_euclid(2) == 1 {
                            c = -c;
                        }
                        if sign < 0 {
                            c = -c;
                        }
                        out.add_term(m, c);
                    }
                }
            }
        }
    }
    out
}

fn widen(e: &Element, trunc: u32) -> Element {
    let mut out = Element::zero(trunc);
    for (m, c) in e.iter() {
        out.add_term(m.clone(), c.clone());
    }
    out
}

fn sign_of(d1: i64, d2: i64) -> Scalar {
    if (d1 * d2).rem_euclid(2) == 0 {
        s_int(1)
    } else {
        s_int(-1)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn mul_matches_factor_list_oracle(a in arb_element(), b in arb_element()) {
        prop_assert_eq!(a.mul(&b), oracle_mul(&a, &b));
    }

    #[test]
    fn mul_is_associative(a in arb_element(), b in arb_element(), c in arb_element()) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
    }

    #[test]
    fn mul_is_supercommutative(a in arb_homogeneous(), b in arb_homogeneous()) {
        let (da, db) = match (a.homogeneous_degree(), b.homogeneous_degree()) {
            (Some(da), Some(db)) => (da, db),
            _ => return Ok(()),
        };
        prop_assert_eq!(a.mul(&b), b.mul(&a).scale(&sign_of(da, db)));
    }

    #[test]
    fn truncation_is_an_algebra_morphism(a in arb_element(), b in arb_element(), n in 0u32..TRUNC) {
        let lhs = a.mul(&b).truncate(n);
        let rhs = a.truncate(n).mul(&b.truncate(n)).truncate(n);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn truncate_preserves_sums(a in arb_element(), b in arb_element(), n in 0u32..TRUNC) {
        prop_assert_eq!(a.add(&b).truncate(n), a.truncate(n).add(&b.truncate(n)));
    }

    #[test]
    fn degree_decompose_recomposes(a in arb_element()) {
        let mut sum = Element::zero(TRUNC);
        for part in a.degree_decompose().values() {
            sum = sum.add(part);
        }
        prop_assert_eq!(sum, a.clone());
        let mut fsum = Element::zero(TRUNC);
        for part in a.form_degree_decompose().values() {
            fsum = fsum.add(part);
        }
        prop_assert_eq!(fsum, a);
    }

    #[test]
    fn bracket_matches_oracle(a in arb_element(), b in arb_element()) {
        prop_assert_eq!(bracket(&a, &b), oracle_bracket(&a, &b));
    }

    #[test]
    fn bracket_skew_symmetry(a in arb_homogeneous(), b in arb_homogeneous()) {
        let (da, db) = match (a.homogeneous_degree(), b.homogeneous_degree()) {
            (Some(da), Some(db)) => (da, db),
            _ => return Ok(()),
        };
        prop_assert_eq!(bracket(&a, &b), bracket(&b, &a).scale(&sign_of(da, db)).neg());
    }

    #[test]
    fn bracket_degree_is_additive(a in arb_homogeneous(), b in arb_homogeneous()) {
        let (da, db) = match (a.homogeneous_degree(), b.homogeneous_degree()) {
            (Some(da), Some(db)) => (da, db),
            _ => return Ok(()),
        };
        let br = bracket(&a, &b);
        if let Some(d) = br.homogeneous_degree() {
            prop_assert_eq!(d, da + db);
        }
    }

    #[test]
    fn jacobi_identity(a in arb_homogeneous(), b in arb_homogeneous(), c in arb_homogeneous()) {
        if a.homogeneous_degree().is_none()
            || b.homogeneous_degree().is_none()
            || c.homogeneous_degree().is_none()
        {
            return Ok(());
        }
        // nested brackets are exact only on exact representatives
        let (a, b, c) = (widen(&a, 64), widen(&b, 64), widen(&c, 64));
        prop_assert!(jacobiator(&a, &b, &c).unwrap().is_zero());
    }

    #[test]
    fn leibniz_rule(a in arb_homogeneous(), b in arb_homogeneous(), c in arb_element()) {
        let (da, db) = match (a.homogeneous_degree(), b.homogeneous_degree()) {
            (Some(da), Some(db)) => (da, db),
            _ => return Ok(()),
        };
        let (a, b, c) = (widen(&a, 64), widen(&b, 64), widen(&c, 64));
        let lhs = bracket(&a, &b.mul(&c));
        let rhs = bracket(&a, &b).mul(&c).add(&b.mul(&bracket(&a, &c)).scale(&sign_of(da, db)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn filtration_bound_inequality(a in arb_homogeneous(), b in arb_homogeneous()) {
        let (da, db) = match (a.homogeneous_degree(), b.homogeneous_degree()) {
            (Some(da), Some(db)) => (da, db),
            _ => return Ok(()),
        };
        let (p, q) = match (a.min_weight(), b.min_weight()) {
            (Some(p), Some(q)) => (p, q),
            _ => return Ok(()),
        };
        let br = bracket(&a, &b);
        if let Some(w) = br.min_weight() {
            let bound = filtration_bound(da, db, p as i64, q as i64);
            prop_assert!(
                (w as i64) >= bound,
                "weight {} below bound {} for degrees ({}, {}), weights ({}, {})",
                w, bound, da, db, p, q
            );
        }
    }

    #[test]
    fn i2_bracket_raises_weight(a in arb_homogeneous(), b in arb_element()) {
        // {X^1 ∩ I^(2), F^m} ⊂ F^{m+1}
        if a.homogeneous_degree() != Some(1) || !a.in_ideal_power(2) || a.is_zero() {
            return Ok(());
        }
        let m = b.min_weight().unwrap_or(0);
        let br = bracket(&a, &b);
        if let Some(w) = br.min_weight() {
            prop_assert!(w > m);
        }
    }

    #[test]
    fn pbw_confluence(ids in proptest::collection::vec(0usize..10, 0..8)) {
        let pool = generator_pool();
        let word: Vec<GenId> = ids.iter().map(|&i| pool[i]).collect();
        let left = normal_order_with(&word, HbarPoly::one(), TRUNC, 5, RewriteStrategy::Leftmost);
        let right = normal_order_with(&word, HbarPoly::one(), TRUNC, 5, RewriteStrategy::Rightmost);
        prop_assert_eq!(left, right);
    }

    #[test]
    fn pbw_word_reduces_to_classical_mod_hbar(ids in proptest::collection::vec(0usize..10, 0..8)) {
        let pool = generator_pool();
        let word: Vec<GenId> = ids.iter().map(|&i| pool[i]).collect();
        let ordered = normal_order_with(&word, HbarPoly::one(), TRUNC, 5, RewriteStrategy::Leftmost);
        let classical = match normalize_unchecked(&word) {
            Some((sign, m)) => Element::from_term(m, s_int(sign as i64), TRUNC),
            None => Element::zero(TRUNC),
        };
        prop_assert_eq!(ordered.coefficient(0), classical);
    }

    #[test]
    fn semiclassical_product_and_bracket(a in arb_element(), b in arb_element()) {
        let qa = q_map(&a, 5);
        let qb = q_map(&b, 5);
        prop_assert_eq!(qmul(&qa, &qb).coefficient(0), a.mul(&b));
        let qbr = qbracket_over_hbar(&qa, &qb).unwrap();
        prop_assert_eq!(qbr.coefficient(0), bracket(&a, &b));
    }

    #[test]
    fn commutator_divisible_by_hbar(a in arb_element(), b in arb_element()) {
        // divisibility is what qbracket_over_hbar asserts internally
        prop_assert!(qbracket_over_hbar(&q_map(&a, 5), &q_map(&b, 5)).is_ok());
    }

    #[test]
    fn normalize_idempotent_on_random_words(ids in proptest::collection::vec(0usize..10, 0..6)) {
        let pool = generator_pool();
        let factors: Vec<GenId> = ids.iter().map(|&i| pool[i]).collect();
        if let Some((_, m)) = normalize_unchecked(&factors) {
            let (s2, m2) = normalize_unchecked(&m.factors()).unwrap();
            prop_assert_eq!(s2, 1);
            prop_assert_eq!(m2, m);
        }
    }

    #[test]
    fn weight_additive_under_monomial_mul(a in arb_monomial(), b in arb_monomial()) {
        let (Some((_, ma)), Some((_, mb))) = (a, b) else { return Ok(()) };
        if let Some((_, m)) = ma.mul(&mb) {
            prop_assert_eq!(m.weight(), ma.weight() + mb.weight());
        }
    }

    #[test]
    fn scalars_stay_reduced(n in -40i64..40, d in 1i64..40) {
        let s = Scalar::new(n.into(), d.into());
        let g = num_integer::gcd(n.abs(), d);
        if g != 0 && !s.is_zero() {
            prop_assert_eq!(s.numer() * d / g, s.denom() * n / g);
        }
    }
}
