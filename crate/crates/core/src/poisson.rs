//! The graded Poisson bracket on X, extended as a biderivation from the
//! generator pairings {x_i, y_j} = δ_ij and {e_j^(l), e_k^(m)*} = δ_jk δ_lm.
//!
//! The bracket of two monomials is expanded as a sum over pairs of factors,
//! one from each side, times the remaining factors with Koszul signs; no
//! generating-function shortcuts.

use crate::element::Element;
use crate::error::Error;
use crate::generators::{GenId, GeneratorTable};
use crate::monomial::SuperMonomial;
use crate::scalar::Scalar;

/// Scalar bracket of two generators; zero for all non-paired combinations.
/// The sign rule for {antighost, ghost} is -(-1)^{lm} so the bracket is
/// graded skew-symmetric.
pub fn pairing(u: &GenId, v: &GenId) -> i8 {
    match (*u, *v) {
        (GenId::X(i), GenId::Y(j)) if i == j => 1,
        (GenId::Y(i), GenId::X(j)) if i == j => -1,
        (GenId::Ghost { level: l, index: i }, GenId::Anti { level: m, index: j })
            if l == m && i == j =>
        {
            1
        }
        (GenId::Anti { level: m, index: j }, GenId::Ghost { level: l, index: i })
            if l == m && i == j =>
        {
            if (l * m) % 2 == 0 {
                -1
            } else {
                1
            }
        }
        _ => 0,
    }
}

/// Factor slots of a monomial: (generator, multiplicity, number of odd
/// factors strictly after it in the canonical word). The last entry drives
/// the Koszul sign when the factor is odd; even factors never contribute
/// sign (their degree is even).
fn slots(m: &SuperMonomial) -> impl Iterator<Item = (GenId, u32, usize)> + '_ {
    let odd_total = m.odds().len();
    let evens = m.evens().iter().map(move |(g, e)| (*g, *e, 0usize));
    let odds = m
        .odds()
        .iter()
        .enumerate()
        .map(move |(i, g)| (*g, 1u32, odd_total - 1 - i));
    evens.chain(odds)
}

/// Bracket contribution of a single monomial pair, accumulated into `out`.
fn bracket_monomials(
    m1: &SuperMonomial,
    c1: &Scalar,
    m2: &SuperMonomial,
    c2: &Scalar,
    out: &mut Element,
) {
    let odd2 = m2.odds().len();
    for (u, ku, after_u) in slots(m1) {
        for (v, kv, after_v) in slots(m2) {
            let lambda = pairing(&u, &v);
            if lambda == 0 {
                continue;
            }
            // sign to pull u out to the right of m1 and v to the left of m2
            let mut sign = lambda < 0;
            if u.is_odd() && after_u % 2 == 1 {
                sign = !sign;
            }
            if v.is_odd() && (odd2 - 1 - after_v) % 2 == 1 {
                sign = !sign;
            }
            let r1 = m1.without(&u).unwrap();
            let r2 = m2.without(&v).unwrap();
            let Some((ms, m)) = r1.mul(&r2) else { continue };
            if ms < 0 {
                sign = !sign;
            }
            let mut c = c1 * c2 * Scalar::from_integer((ku as i64 * kv as i64).into());
            if sign {
                c = -c;
            }
            out.add_term(m, c);
        }
    }
}

/// {a, b} in X/F^N. Bilinear, graded skew-symmetric, degree 0, a
/// biderivation in each slot; the result is truncated to the common N.
pub fn bracket(a: &Element, b: &Element) -> Element {
    assert_eq!(a.trunc(), b.trunc(), "bracket requires equal truncations");
    let mut out = Element::zero(a.trunc());
    for (m1, c1) in a.iter() {
        for (m2, c2) in b.iter() {
            bracket_monomials(m1, c1, m2, c2, &mut out);
        }
    }
    out
}

/// Checked variant validating table membership and truncations.
pub fn bracket_checked(a: &Element, b: &Element, table: &GeneratorTable) -> Result<Element, Error> {
    if a.trunc() != b.trunc() {
        return Err(Error::TruncationMismatch {
            left: a.trunc(),
            right: b.trunc(),
        });
    }
    for e in [a, b] {
        for (m, _) in e.iter() {
            for g in m.factors() {
                table.check(&g)?;
            }
        }
    }
    Ok(bracket(a, b))
}

/// (-1)^{deg a deg c} {a,{b,c}} + cyclic permutations. Vanishes identically;
/// exposed as a test oracle for the graded Jacobi identity.
pub fn jacobiator(a: &Element, b: &Element, c: &Element) -> Result<Element, Error> {
    let (da, db, dc) = match (
        a.homogeneous_degree(),
        b.homogeneous_degree(),
        c.homogeneous_degree(),
    ) {
        (Some(da), Some(db), Some(dc)) => (da, db, dc),
        _ => return Err(Error::NonHomogeneous),
    };
    let sgn = |e: i64| -> Scalar {
        if e.rem_euclid(2) == 0 {
            Scalar::from_integer(1.into())
        } else {
            Scalar::from_integer((-1).into())
        }
    };
    let t1 = bracket(a, &bracket(b, c)).scale(&sgn(da * dc));
    let t2 = bracket(b, &bracket(c, a)).scale(&sgn(db * da));
    let t3 = bracket(c, &bracket(a, b)).scale(&sgn(dc * db));
    Ok(t1.add(&t2).add(&t3))
}

/// r_{n,m}(p,q) = max{m+n, min{max{p, q+n}, max{q, p+m}}}: the guaranteed
/// filtration weight of {F^p X^n, F^q X^m}.
pub fn filtration_bound(n: i64, m: i64, p: i64, q: i64) -> i64 {
    let a = core::cmp::max(p, q + n);
    let b = core::cmp::max(q, p + m);
    core::cmp::max(m + n, core::cmp::min(a, b))
}

/// t_{n,m}(p) = p - max{|n|,|m|}: how much input filtration precision
/// survives one bracket of degrees n and m.
pub fn precision_after_bracket(n: i64, m: i64, p: i64) -> i64 {
    p - core::cmp::max(n.abs(), m.abs())
}
