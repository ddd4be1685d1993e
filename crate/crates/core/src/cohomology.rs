//! Degree-0 and degree-1 BRST cohomology at desk scale: invariance tests
//! with membership certificates, H⁰ lifts in the explicit representative
//! form x₀ + Σ a_{ij} e*_i e_j, the induced Poisson bracket on H⁰, and
//! exactness probes by slice solving.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::One;

use crate::brst::d_r_apply_unchecked;
use crate::element::Element;
use crate::error::Error;
use crate::generators::{GenId, GeneratorTable};
use crate::groebner::PolyIdeal;
use crate::linalg::{Indexer, SpanSolver, SparseVec};
use crate::monomial::SuperMonomial;
use crate::poisson::bracket;
use crate::poly::Poly;
use crate::scalar::Scalar;
use crate::tate::{graded_words, poly_monomials_exact, Resolution, SliceBounds};

/// Result of checking {φ_i, p} ∈ J for every constraint generator.
#[derive(Clone, Debug)]
pub struct InvarianceReport {
    pub invariant: bool,
    /// One certificate per constraint: the lift of {φ_i, p} over the
    /// generators, or None when the bracket is not in J.
    pub certificates: Vec<Option<Vec<Poly>>>,
}

fn poly_bracket(a: &Poly, b: &Poly, pairs: u32) -> Poly {
    let ea = a.to_element(2);
    let eb = b.to_element(2);
    Poly::from_element(&bracket(&ea, &eb), pairs).expect("bracket of polynomials is polynomial")
}

/// true iff {φ_i, p} ∈ J for all constraint generators, with lift
/// certificates for the successes.
pub fn invariance_check(p: &Poly, ideal: &PolyIdeal) -> InvarianceReport {
    let pairs = ideal.pairs();
    let mut certificates = Vec::new();
    let mut invariant = true;
    for phi in ideal.gens() {
        let br = poly_bracket(phi, p, pairs);
        let cert = ideal.lift_certificate(&br);
        if cert.is_none() {
            invariant = false;
        }
        certificates.push(cert);
    }
    InvarianceReport {
        invariant,
        certificates,
    }
}

/// A degree-0 cohomology class in the explicit representative form
/// x = x₀ + Σ_{i,j} a_{ij} e*_i e_j over the degree -1 ghosts, with
/// {δ(e_i), x₀} = Σ_j a_{ij} δ(e_j) exactly.
#[derive(Clone, Debug)]
pub struct H0Class {
    pub x0: Poly,
    /// (i, j) -> a_{ij}, indices over level-1 ghosts.
    pub coeffs: BTreeMap<(u32, u32), Poly>,
    pub representative: Element,
    pub trunc: u32,
}

impl H0Class {
    /// d_R of the representative must vanish modulo F².
    pub fn verify(&self, r: &Element) -> bool {
        let d = d_r_apply_unchecked(r, &self.representative, self.trunc);
        d.truncate(2.min(self.trunc)).is_zero()
    }

    /// Φ of a class is π(x) + J: the underlying invariant polynomial.
    pub fn project(&self) -> &Poly {
        &self.x0
    }
}

/// Lifts an invariant polynomial to a degree-0 cocycle. Refuses
/// non-invariant input.
pub fn h0_lift(p: &Poly, res: &Resolution, trunc: u32) -> Result<H0Class, Error> {
    let ideal = res.ideal();
    let report = invariance_check(p, ideal);
    if !report.invariant {
        return Err(Error::Precondition(alloc::string::String::from(
            "polynomial is not J-invariant",
        )));
    }
    let mut coeffs = BTreeMap::new();
    let mut representative = p.to_element(trunc);
    for (i, cert) in report.certificates.iter().enumerate() {
        let cert = cert.as_ref().expect("invariant");
        for (j, c) in cert.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let a = c.clone();
            let anti = Element::generator(
                GenId::Anti {
                    level: 1,
                    index: i as u32,
                },
                trunc,
            );
            let ghost = Element::generator(
                GenId::Ghost {
                    level: 1,
                    index: j as u32,
                },
                trunc,
            );
            representative = representative.add(&a.to_element(trunc).mul(&anti).mul(&ghost));
            coeffs.insert((i as u32, j as u32), a);
        }
    }
    Ok(H0Class {
        x0: p.clone(),
        coeffs,
        representative,
        trunc,
    })
}

/// The induced Poisson bracket on H⁰ ≅ (P/J)^J: NF({x₀, y₀}).
pub fn h0_bracket(c1: &H0Class, c2: &H0Class, ideal: &PolyIdeal) -> Poly {
    let br = poly_bracket(&c1.x0, &c2.x0, ideal.pairs());
    ideal.normal_form(&br)
}

/// Product on H⁰: NF(x₀ y₀).
pub fn h0_product(c1: &H0Class, c2: &H0Class, ideal: &PolyIdeal) -> Poly {
    ideal.normal_form(&c1.x0.mul(&c2.x0))
}

/// Order in which exactness-solve candidates are fed to the linear solver.
/// Different orders give different (equally valid) primitives; used by the
/// determinism perturbation tests.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum PivotOrder {
    #[default]
    Forward,
    Reverse,
}

/// Outcome of an exactness probe.
#[derive(Clone, Debug)]
pub enum Exactness {
    /// y with d_R y = x exactly (mod F^N).
    Primitive(Element),
    /// No primitive exists anywhere in X: some target monomial has
    /// polynomial degree below the minimum polynomial degree any d_R image
    /// can carry.
    NoneByDegreeArgument { min_image_poly_degree: u32 },
    /// The slice linear system has no solution; nothing is claimed beyond
    /// these bounds.
    NoneWithinSlice { bounds: SliceBounds },
}

/// Minimum polynomial degree of any monomial d_R can output: for every
/// charge monomial t and pairable factor u of t, an output monomial has
/// poly degree ≥ polydeg(t) - polydeg(u). Sound for arbitrary arguments
/// because the argument's consumed factor v always satisfies
/// polydeg(m) ≥ polydeg(v).
pub fn min_image_poly_degree(r: &Element) -> u32 {
    let mut best: Option<u32> = None;
    for (t, _) in r.iter() {
        let pd = t.poly_degree();
        let has_xy = t.evens().iter().any(|(g, _)| g.is_even_variable());
        let value = if has_xy { pd.saturating_sub(1) } else { pd };
        best = Some(best.map_or(value, |b| b.min(value)));
    }
    best.unwrap_or(0)
}

/// Solves d_R y = x over a bounded slice of X. Preconditions: x is
/// homogeneous and d_R x = 0 at this truncation.
pub fn is_exact(
    x: &Element,
    r: &Element,
    table: &GeneratorTable,
    trunc: u32,
    bounds: SliceBounds,
    pivot: PivotOrder,
) -> Result<Exactness, Error> {
    if x.is_zero() {
        return Ok(Exactness::Primitive(Element::zero(trunc)));
    }
    let Some(degree) = x.homogeneous_degree() else {
        return Err(Error::NonHomogeneous);
    };
    let dx = d_r_apply_unchecked(r, x, trunc);
    if !dx.is_zero() {
        return Err(Error::Precondition(alloc::string::String::from(
            "exactness probe requires a cocycle",
        )));
    }
    // mechanized degree argument
    let min_deg = min_image_poly_degree(r);
    if x.iter().any(|(m, _)| m.poly_degree() < min_deg) {
        return Ok(Exactness::NoneByDegreeArgument {
            min_image_poly_degree: min_deg,
        });
    }

    // slice solve
    let gens: Vec<GenId> = table
        .ghost_iter()
        .flat_map(|g| {
            let dual = g.dual().expect("ghosts have duals");
            [g, dual]
        })
        .collect();
    let mut candidates: Vec<SuperMonomial> = Vec::new();
    for word in graded_words(&gens, degree - 1, bounds.word_length) {
        if word.weight() >= trunc {
            continue;
        }
        for d in 0..=bounds.poly_degree {
            for p in poly_monomials_exact(table.pairs(), d) {
                let (sign, m) = p.mul(&word).expect("disjoint supports");
                debug_assert_eq!(sign, 1);
                candidates.push(m);
            }
        }
    }
    candidates.sort();
    candidates.dedup();
    if pivot == PivotOrder::Reverse {
        candidates.reverse();
    }
    let mut indexer = Indexer::new();
    let mut span = SpanSolver::new();
    for (id, cand) in candidates.iter().enumerate() {
        let ce = Element::from_term(cand.clone(), Scalar::one(), trunc);
        let image = d_r_apply_unchecked(r, &ce, trunc);
        if image.is_zero() {
            continue;
        }
        let mut v = SparseVec::new();
        for (m, c) in image.iter() {
            v.insert(indexer.intern(m), c.clone());
        }
        span.insert(id, v);
    }
    let mut b = SparseVec::new();
    for (m, c) in x.iter() {
        b.insert(indexer.intern(m), c.clone());
    }
    match span.solve(&b) {
        Some(combo) => {
            let mut y = Element::zero(trunc);
            for (id, c) in &combo {
                y.add_term(candidates[*id].clone(), c.clone());
            }
            Ok(Exactness::Primitive(y))
        }
        None => Ok(Exactness::NoneWithinSlice { bounds }),
    }
}
