//! The BRST charge: the first approximation Q₀, the correction recursion
//! Q_{n+1} = -1/2 s{R_n, R_n}, and the classical master equation check
//! modulo F^N.

use alloc::string::String;
use alloc::vec::Vec;

use crate::element::Element;
use crate::error::Error;
use crate::generators::GenId;
use crate::poisson::bracket;
use crate::scalar::{s_ratio, Scalar};
use crate::tate::{Homotopy, Resolution};

/// Per-step record of the recursion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChargeStep {
    /// Index n+1 of the correction Q_{n+1}.
    pub index: u32,
    /// Minimal filtration weight of the residual {R_n, R_n} (None when 0).
    pub residual_weight: Option<u32>,
    /// Terms in the correction.
    pub terms: usize,
    /// Digest of the homotopy pivot choices after this step.
    pub pivot_digest: u64,
}

/// A charge R of degree 1 with its construction log. `residual` is
/// {R, R} mod F^N, zero on success.
#[derive(Clone, Debug)]
pub struct Charge {
    pub element: Element,
    pub trunc: u32,
    pub steps: Vec<ChargeStep>,
    pub residual: Element,
}

/// Q₀ = Σ_j (-1)^{1+d_j} e*_j δ(e_j) over all ghosts of filtration weight
/// < N (the weight of e*_j is the ghost level). Requires the resolution to
/// reach every ghost degree above -N.
pub fn q0_charge(res: &Resolution, trunc: u32) -> Result<Element, Error> {
    if trunc >= 2 && res.depth() < trunc - 1 {
        return Err(Error::ResolutionTooShallow {
            needed_level: trunc - 1,
            have_level: res.depth(),
        });
    }
    let mut q0 = Element::zero(trunc);
    for ghost in res.table().ghost_iter() {
        let GenId::Ghost { level, index } = ghost else {
            unreachable!()
        };
        if level >= trunc {
            continue;
        }
        let image = res
            .delta_image(&ghost)
            .expect("every ghost has an image")
            .truncate(trunc);
        let anti = Element::generator(GenId::Anti { level, index }, trunc);
        // (-1)^{1+d_j} with d_j = -level
        let sign = if (1 + level as i64).rem_euclid(2) == 0 {
            Scalar::from_integer(1.into())
        } else {
            Scalar::from_integer((-1).into())
        };
        q0 = q0.add(&anti.mul(&image).scale(&sign));
    }
    Ok(q0)
}

/// {R, R} truncated to N; zero signals the classical master equation.
pub fn cme_check(r: &Element, trunc: u32) -> Element {
    bracket(r, r).truncate(trunc)
}

/// Builds the BRST charge at truncation N by the homotopy recursion.
///
/// Each step asserts the filtration law weight({R_n,R_n}) ≥ n+2 and the
/// two-positive-factor property of the residual; violations abort. The
/// recursion stops once the residual truncates to zero and is hard-capped
/// at N+1 iterations.
pub fn brst_charge(
    res: &Resolution,
    homotopy: &mut Homotopy<'_>,
    trunc: u32,
) -> Result<Charge, Error> {
    let q0 = q0_charge(res, trunc)?;
    let mut r = q0;
    let mut steps = Vec::new();
    let mut residual = cme_check(&r, trunc);
    let mut n = 0u32;
    let mut last_weight = 0u32;
    while !residual.is_zero() {
        if n > trunc + 1 {
            return Err(Error::InvariantViolation(String::from(
                "charge recursion exceeded the theorem's step bound",
            )));
        }
        let weight = residual
            .min_weight()
            .expect("nonzero residual has a weight");
        if weight < n + 2 {
            return Err(Error::InvariantViolation(alloc::format!(
                "residual of step {} has weight {} < {}",
                n,
                weight,
                n + 2
            )));
        }
        if !residual.in_ideal_power(2) {
            return Err(Error::InvariantViolation(String::from(
                "residual left the square of the augmentation ideal",
            )));
        }
        if n > 0 && weight <= last_weight {
            return Err(Error::InvariantViolation(String::from(
                "residual weight failed to increase",
            )));
        }
        last_weight = weight;
        // Q_{n+1} = -1/2 s({R_n, R_n})
        let correction = homotopy.apply(&residual)?.scale(&s_ratio(-1, 2));
        r = r.add(&correction);
        steps.push(ChargeStep {
            index: n + 1,
            residual_weight: Some(weight),
            terms: correction.len(),
            pivot_digest: homotopy.pivot_digest(),
        });
        residual = cme_check(&r, trunc);
        n += 1;
    }
    Ok(Charge {
        element: r,
        trunc,
        steps,
        residual,
    })
}

/// d_R = {R, -}, truncated. Refuses charges that fail the master equation
/// at this truncation, since d_R would not square to zero.
pub fn d_r_apply(r: &Element, x: &Element, trunc: u32) -> Result<Element, Error> {
    let residual = cme_check(r, trunc);
    if !residual.is_zero() {
        return Err(Error::MasterEquationFails {
            weight: residual.min_weight().unwrap_or(0),
        });
    }
    Ok(bracket(&r.truncate(trunc), &x.truncate(trunc)).truncate(trunc))
}

/// d_R without the master-equation precheck, for callers that already hold
/// a verified charge.
pub fn d_r_apply_unchecked(r: &Element, x: &Element, trunc: u32) -> Element {
    bracket(&r.truncate(trunc), &x.truncate(trunc)).truncate(trunc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{angular_momenta, mu_poly};
    use crate::groebner::buchberger;
    use crate::monomial::normalize_unchecked;
    use crate::poly::MonomialOrder;
    use crate::tate::{koszul_init, tate_extend, SliceBounds, EXACT_TRUNC};

    fn plane_rotation() -> Resolution {
        koszul_init(buchberger(&[mu_poly()], MonomialOrder::DegRevLex).unwrap())
    }

    #[test]
    fn q0_plane_rotation_is_antighost_times_mu() {
        let res = plane_rotation();
        let q0 = q0_charge(&res, 2).unwrap();
        let a = Element::generator(GenId::Anti { level: 1, index: 0 }, 2);
        assert_eq!(q0, a.mul(&mu_poly().to_element(2)));
        assert_eq!(q0.homogeneous_degree(), Some(1));
    }

    #[test]
    fn q0_requires_depth() {
        let res = plane_rotation();
        assert!(matches!(
            q0_charge(&res, 4),
            Err(Error::ResolutionTooShallow { .. })
        ));
    }

    #[test]
    fn empty_ghost_table_gives_zero() {
        let res = koszul_init(buchberger(&[], MonomialOrder::DegRevLex).unwrap());
        assert!(q0_charge(&res, 2).unwrap().is_zero());
    }

    #[test]
    fn plane_rotation_charge_needs_no_corrections() {
        let mut res = plane_rotation();
        for level in 2..=3 {
            tate_extend(&mut res, level, SliceBounds::new(6, 4)).unwrap();
        }
        let mut s = Homotopy::new(&res, SliceBounds::new(8, 5));
        let charge = brst_charge(&res, &mut s, 4).unwrap();
        assert!(charge.steps.is_empty());
        assert!(charge.residual.is_zero());
        let q0 = q0_charge(&res, 4).unwrap();
        assert_eq!(charge.element, q0);
    }

    #[test]
    fn so3_charge_has_nonzero_first_correction() {
        let ideal = buchberger(&angular_momenta(), MonomialOrder::DegRevLex).unwrap();
        let mut res = koszul_init(ideal);
        for level in 2..=3 {
            tate_extend(&mut res, level, SliceBounds::new(4, 4)).unwrap();
        }
        let mut s = Homotopy::new(&res, SliceBounds::new(8, 6));
        let charge = brst_charge(&res, &mut s, 4).unwrap();
        assert!(charge.residual.is_zero());
        assert!(
            !charge.steps.is_empty(),
            "so(3) needs at least one correction"
        );
        // R - Q0 lies in I^(2)
        let q0 = q0_charge(&res, 4).unwrap();
        assert!(charge.element.sub(&q0).in_ideal_power(2));
    }

    #[test]
    fn koszul_q0_of_so3_obstructs() {
        // before corrections, {Q0, Q0} is a nonzero element of F^2 ∩ I^(2)
        let ideal = buchberger(&angular_momenta(), MonomialOrder::DegRevLex).unwrap();
        let res = koszul_init(ideal);
        let q0 = q0_charge(&res, 2).unwrap().truncate(2);
        let mut lifted = Element::zero(4);
        for (m, c) in q0.iter() {
            lifted.add_term(m.clone(), c.clone());
        }
        let resid = cme_check(&lifted, 4);
        assert!(!resid.is_zero());
        assert!(resid.in_ideal_power(2));
        assert!(resid.min_weight() >= Some(2));
    }

    #[test]
    fn so3_first_correction_is_the_structure_constant_term() {
        // {mu_i, mu_j} = ε_ijk mu_k, so the recursion must produce the
        // classic cubic term -1/2 ε_ijk e*_i e*_j e_k
        let ideal = buchberger(&angular_momenta(), MonomialOrder::DegRevLex).unwrap();
        let mut res = koszul_init(ideal);
        for level in 2..=3 {
            tate_extend(&mut res, level, SliceBounds::new(4, 4)).unwrap();
        }
        let mut s = Homotopy::new(&res, SliceBounds::new(10, 6));
        let charge = brst_charge(&res, &mut s, 4).unwrap();
        let q1 = charge.element.sub(&q0_charge(&res, 4).unwrap());
        let e = |i: u32| GenId::Ghost { level: 1, index: i };
        let a = |i: u32| GenId::Anti { level: 1, index: i };
        let mut expected = Element::zero(4);
        // -1/2 Σ ε_ijk e*_i e*_j e_k over all index triples
        for (i, j, k, sign) in [
            (0u32, 1u32, 2u32, 1i64),
            (1, 2, 0, 1),
            (2, 0, 1, 1),
            (1, 0, 2, -1),
            (2, 1, 0, -1),
            (0, 2, 1, -1),
        ] {
            let m = normalize_unchecked(&[a(i), a(j), e(k)]).unwrap();
            let mut c = crate::scalar::s_ratio(-sign, 2);
            if m.0 < 0 {
                c = -c;
            }
            expected.add_term(m.1, c);
        }
        assert_eq!(q1, expected);
    }

    #[test]
    fn cme_check_zero_cases() {
        let mut res = plane_rotation();
        tate_extend(&mut res, 2, SliceBounds::new(4, 3)).unwrap();
        let q0 = q0_charge(&res, 3).unwrap();
        assert!(cme_check(&q0, 3).is_zero());
        assert!(cme_check(&Element::zero(3), 3).is_zero());
    }

    #[test]
    fn d_r_reproduces_delta_on_t() {
        // π_T ∘ d_R ∘ j = δ on every ghost generator, both fixtures
        let so3 = {
            let ideal = buchberger(&angular_momenta(), MonomialOrder::DegRevLex).unwrap();
            let mut res = koszul_init(ideal);
            for level in 2..=3 {
                tate_extend(&mut res, level, SliceBounds::new(4, 4)).unwrap();
            }
            res
        };
        let plane = {
            let mut res = plane_rotation();
            tate_extend(&mut res, 2, SliceBounds::new(6, 4)).unwrap();
            tate_extend(&mut res, 3, SliceBounds::new(6, 4)).unwrap();
            res
        };
        for res in [plane, so3] {
            let mut s = Homotopy::new(&res, SliceBounds::new(10, 6));
            let charge = brst_charge(&res, &mut s, 4).unwrap();
            for ghost in res.table().ghost_iter() {
                let e = Element::generator(ghost, 4);
                let dr_e = d_r_apply(&charge.element, &e, 4).unwrap();
                let mut proj = Element::zero(4);
                for (m, c) in dr_e.iter() {
                    if !m.has_anti() {
                        proj.add_term(m.clone(), c.clone());
                    }
                }
                let delta_e = res.delta(&e).unwrap();
                assert_eq!(proj, delta_e, "d_R must induce δ on {}", ghost.name());
            }
            // d_R(1) = 0
            assert!(d_r_apply(&charge.element, &Element::one(4), 4)
                .unwrap()
                .is_zero());
        }
    }

    #[test]
    fn d_r_refuses_failing_charge() {
        // R = e1* x1 + e2* y1 has {R,R} = ±2 e1* e2* ≠ 0
        let bad = {
            let m1 = normalize_unchecked(&[GenId::Anti { level: 1, index: 0 }, GenId::X(0)])
                .unwrap()
                .1;
            let m2 = normalize_unchecked(&[GenId::Anti { level: 1, index: 1 }, GenId::Y(0)])
                .unwrap()
                .1;
            let one = Scalar::from_integer(1.into());
            let mut e = Element::from_term(m1, one.clone(), 4);
            e.add_term(m2, one);
            e
        };
        let x = Element::generator(GenId::X(0), 4);
        assert!(matches!(
            d_r_apply(&bad, &x, 4),
            Err(Error::MasterEquationFails { .. })
        ));
        let _ = EXACT_TRUNC;
    }
}
