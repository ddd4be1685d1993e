//! Classical gauge equivalences: truncated exponentials of inner
//! derivations by degree-0 elements of I^(2), the constructive
//! charge-matching loop, trivial BFV models, and products with them.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::One;

use crate::brst::cme_check;
use crate::element::Element;
use crate::error::Error;
use crate::generators::{GenId, GeneratorTable};
use crate::groebner::buchberger;
use crate::monomial::SuperMonomial;
use crate::poisson::bracket;
use crate::poly::MonomialOrder;
use crate::scalar::{s_int, Scalar};
use crate::tate::{Homotopy, Resolution, EXACT_TRUNC};

/// A generator of gauge equivalences must have degree 0 and every monomial
/// in I^(2).
pub fn validate_gauge_generator(c: &Element) -> Result<(), Error> {
    if !c.is_zero() && c.homogeneous_degree() != Some(0) {
        return Err(Error::Precondition(String::from(
            "gauge generator must have degree 0",
        )));
    }
    if !c.in_ideal_power(2) {
        return Err(Error::Precondition(String::from(
            "gauge generator must lie in the square of the augmentation ideal",
        )));
    }
    Ok(())
}

/// exp(ad_c) x = Σ_k ad_c^k(x) / k! in X/F^N. Each ad_c deepens the ideal
/// power, so the sum is finite modulo F^N; the iteration cap enforces that.
pub fn exp_ad(c: &Element, x: &Element, trunc: u32) -> Result<Element, Error> {
    validate_gauge_generator(c)?;
    let c = c.truncate(trunc);
    let mut out = x.truncate(trunc);
    let mut term = out.clone();
    let mut factorial = Scalar::one();
    for k in 1..=(trunc as u64 + 1) {
        term = bracket(&c, &term).truncate(trunc);
        if term.is_zero() {
            return Ok(out);
        }
        factorial *= Scalar::from_integer(k.into());
        out = out.add(&term.scale(&(Scalar::one() / factorial.clone())));
    }
    if !term.is_zero() {
        return Err(Error::InvariantViolation(String::from(
            "adjoint action failed to become nilpotent within the truncation",
        )));
    }
    Ok(out)
}

/// An ordered list of gauge generators; application order is storage order.
#[derive(Clone, Debug, Default)]
pub struct GaugeEquivalence {
    pub generators: Vec<Element>,
    pub trunc: u32,
}

impl GaugeEquivalence {
    pub fn identity(trunc: u32) -> Self {
        GaugeEquivalence {
            generators: Vec::new(),
            trunc,
        }
    }

    pub fn apply(&self, x: &Element) -> Result<Element, Error> {
        let mut out = x.truncate(self.trunc);
        for c in &self.generators {
            out = exp_ad(c, &out, self.trunc)?;
        }
        Ok(out)
    }
}

/// Matches two solutions of the classical master equation that induce the
/// same differential on X/I: the double loop over filtration weight p and
/// ideal power q solves δc = (R - R')|_weight=p in the associated graded
/// through the contracting homotopy, one antighost monomial at a time.
pub fn gauge_match(
    r: &Element,
    r_prime: &Element,
    res: &Resolution,
    homotopy: &mut Homotopy<'_>,
    trunc: u32,
) -> Result<GaugeEquivalence, Error> {
    for (name, charge) in [("R", r), ("R'", r_prime)] {
        if !cme_check(charge, trunc).is_zero() {
            return Err(Error::Precondition(alloc::format!(
                "{} fails the classical master equation at this truncation",
                name
            )));
        }
    }
    if !r
        .sub(&r_prime.truncate(trunc).add(&Element::zero(trunc)))
        .in_ideal_power(2)
    {
        return Err(Error::Precondition(String::from(
            "charges do not induce the same differential on X/I",
        )));
    }

    let mut current = r.truncate(trunc);
    let target = r_prime.truncate(trunc);
    let mut equivalence = GaugeEquivalence::identity(trunc);

    for p in 2..trunc {
        for _q in 2..=p {
            let diff = current.sub(&target);
            let v_p = diff.weight_part(p);
            if v_p.is_zero() {
                continue;
            }
            // group by antighost monomial; each T-component is a cycle;
            // m = split_sign * anti * rest
            let mut groups: BTreeMap<SuperMonomial, Element> = BTreeMap::new();
            for (m, coeff) in v_p.iter() {
                let (anti, rest) = m.split_anti();
                let (split_sign, _) = anti
                    .mul(&rest)
                    .expect("factorization cannot introduce odd squares");
                let mut c = coeff.clone();
                if split_sign < 0 {
                    c = -c;
                }
                groups
                    .entry(anti)
                    .or_insert_with(|| Element::zero(EXACT_TRUNC))
                    .add_term(rest, c);
            }
            let mut c = Element::zero(trunc);
            for (anti, t_part) in groups {
                if !res.delta_extended(&t_part).is_zero() {
                    return Err(Error::InvariantViolation(String::from(
                        "weight component of the charge difference is not a cycle",
                    )));
                }
                // δ(w · y) = (-1)^p w · δ(y), so solve δ(y) = (-1)^p t
                let signed = if p % 2 == 1 { t_part.neg() } else { t_part };
                let y = homotopy.apply(&signed)?;
                let w = Element::from_term(anti, Scalar::one(), trunc);
                c = c.add(&w.mul(&y.truncate(trunc)));
            }
            validate_gauge_generator(&c)?;
            current = exp_ad(&c, &current, trunc)?;
            equivalence.generators.push(c);
        }
    }

    let residual = current.sub(&target);
    if !residual.is_zero() {
        return Err(Error::InvariantViolation(alloc::format!(
            "gauge matching left a residual of weight {:?}",
            residual.min_weight()
        )));
    }
    Ok(equivalence)
}

/// A trivial BFV model: contractible ghost pairs (n, ñ) with δñ = n over
/// the Poisson algebra (𝕂, 0), and the charge S = Q₀ with {S, S} = 0.
#[derive(Clone, Debug)]
pub struct TrivialModel {
    pub resolution: Resolution,
    /// S at EXACT truncation; callers re-truncate.
    pub charge: Element,
    /// (n, ñ) ghost pairs with δñ = n.
    pub pairs: Vec<(GenId, GenId)>,
}

/// Builds the trivial model for the given list of (degree -level, count)
/// pairs: each entry contributes `count` pairs (n at degree -level, ñ at
/// degree -level-1).
pub fn trivial_model(spec: &[(u32, u32)]) -> Result<TrivialModel, Error> {
    let mut table = GeneratorTable::new(0);
    let mut delta_images = BTreeMap::new();
    let mut pairs = Vec::new();
    for &(level, count) in spec {
        assert!(level >= 1);
        for _ in 0..count {
            let n = table.add_ghost(level);
            delta_images.insert(n, Element::zero(EXACT_TRUNC));
            pairs.push(n);
        }
    }
    let mut pairing = Vec::new();
    for n in pairs {
        let GenId::Ghost { level, .. } = n else {
            unreachable!()
        };
        let shifted = table.add_ghost(level + 1);
        delta_images.insert(shifted, Element::generator(n, EXACT_TRUNC));
        pairing.push((n, shifted));
    }
    let ideal = buchberger(&[], MonomialOrder::DegRevLex)?;
    // the resolution is complete: Sym of a contractible pair is acyclic
    let resolution = Resolution::from_parts(table, ideal, delta_images, u32::MAX)?;
    let charge = trivial_charge(&resolution);
    let check = bracket(&charge, &charge);
    if !check.is_zero() {
        return Err(Error::InvariantViolation(String::from(
            "trivial charge must satisfy {S,S}=0",
        )));
    }
    Ok(TrivialModel {
        resolution,
        charge,
        pairs: pairing,
    })
}

/// S = Σ_j (-1)^{1+d_j} e*_j δ(e_j) over all ghosts, exactly (finitely many
/// terms, no truncation).
fn trivial_charge(res: &Resolution) -> Element {
    let mut s = Element::zero(EXACT_TRUNC);
    for ghost in res.table().ghost_iter() {
        let GenId::Ghost { level, index } = ghost else {
            unreachable!()
        };
        let image = res.delta_image(&ghost).expect("trivial ghosts have images");
        if image.is_zero() {
            continue;
        }
        let anti = Element::generator(GenId::Anti { level, index }, EXACT_TRUNC);
        let sign = if (1 + level as i64).rem_euclid(2) == 0 {
            s_int(1)
        } else {
            s_int(-1)
        };
        s = s.add(&anti.mul(image).scale(&sign));
    }
    s
}

/// The product of a model with a trivial model: merged generator table
/// (trivial ghosts renamed to fresh indices), charge L = R + S.
#[derive(Clone, Debug)]
pub struct ProductModel {
    pub resolution: Resolution,
    pub charge: Element,
    /// Renaming of the trivial model's generators into the product table.
    pub rename: BTreeMap<GenId, GenId>,
    /// Renamed (n, ñ) pairs of the trivial factor.
    pub trivial_pairs: Vec<(GenId, GenId)>,
    pub trunc: u32,
}

fn rename_monomial(m: &SuperMonomial, rename: &BTreeMap<GenId, GenId>) -> (i8, SuperMonomial) {
    let factors: Vec<GenId> = m
        .factors()
        .into_iter()
        .map(|g| rename.get(&g).copied().unwrap_or(g))
        .collect();
    crate::monomial::normalize_unchecked(&factors).expect("renaming preserves odd distinctness")
}

fn rename_element(e: &Element, rename: &BTreeMap<GenId, GenId>) -> Element {
    let mut out = Element::zero(e.trunc());
    for (m, c) in e.iter() {
        let (sign, mm) = rename_monomial(m, rename);
        let mut coeff = c.clone();
        if sign < 0 {
            coeff = -coeff;
        }
        out.add_term(mm, coeff);
    }
    out
}

/// Merges a model (res, R) with a trivial model: the trivial ghosts are
/// appended to the table with fresh indices and L = R + S.
pub fn product_model(
    res: &Resolution,
    r: &Element,
    trivial: &TrivialModel,
    trunc: u32,
) -> Result<ProductModel, Error> {
    let mut table = res.table().clone();
    let mut rename = BTreeMap::new();
    for g in trivial.resolution.table().ghost_iter() {
        let GenId::Ghost { level, .. } = g else {
            unreachable!()
        };
        let fresh = table.add_ghost(level);
        rename.insert(g, fresh);
        rename.insert(g.dual().unwrap(), fresh.dual().unwrap());
    }
    let mut delta_images: BTreeMap<GenId, Element> = BTreeMap::new();
    for g in res.table().ghost_iter() {
        delta_images.insert(g, res.delta_image(&g).expect("image").clone());
    }
    for g in trivial.resolution.table().ghost_iter() {
        let image = trivial.resolution.delta_image(&g).expect("image");
        delta_images.insert(rename[&g], rename_element(image, &rename));
    }
    let depth = res.depth().min(trivial.resolution.depth());
    let resolution = Resolution::from_parts(table, res.ideal().clone(), delta_images, depth)?;
    let s_renamed = rename_element(&trivial.charge, &rename).truncate(trunc);
    let charge = r.truncate(trunc).add(&s_renamed);
    let trivial_pairs = trivial
        .pairs
        .iter()
        .map(|(n, sh)| (rename[n], rename[sh]))
        .collect();
    Ok(ProductModel {
        resolution,
        charge,
        rename,
        trivial_pairs,
        trunc,
    })
}

impl ProductModel {
    fn is_trivial_gen(&self, g: &GenId) -> bool {
        self.rename
            .values()
            .any(|v| v == g || &v.dual().unwrap_or(*v) == g)
    }

    /// p: Z -> X, killing every monomial containing a trivial-factor
    /// generator.
    pub fn project_to_base(&self, z: &Element) -> Element {
        let mut out = Element::zero(z.trunc());
        for (m, c) in z.iter() {
            if m.factors().iter().any(|g| self.is_trivial_gen(g)) {
                continue;
            }
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    /// ι: X -> Z is the identity embedding.
    pub fn include(&self, x: &Element) -> Element {
        x.truncate(self.trunc)
    }

    /// Action of the degree -1 map s of the trivial factor on one of its
    /// generators: n ↦ ñ, ñ* ↦ (-1)^level n*, everything else ↦ 0.
    fn s_generator(&self, g: &GenId) -> Option<(Scalar, GenId)> {
        for (n, shifted) in &self.trivial_pairs {
            if g == n {
                return Some((Scalar::one(), *shifted));
            }
            if *g == shifted.dual().unwrap() {
                let GenId::Ghost { level, .. } = *n else {
                    unreachable!()
                };
                let sign = if level % 2 == 0 {
                    Scalar::one()
                } else {
                    -Scalar::one()
                };
                return Some((sign, n.dual().unwrap()));
            }
        }
        None
    }

    /// (id ⊗ t) with t = s/j on trivial-factor form degree j > 0 and t = 0
    /// on form degree 0; s is the odd-derivation contraction of the
    /// trivial pairs.
    pub fn homotopy_t(&self, z: &Element) -> Element {
        let mut out = Element::zero(z.trunc());
        for (m, coeff) in z.iter() {
            let factors = m.factors();
            let b_count = factors.iter().filter(|g| self.is_trivial_gen(g)).count();
            if b_count == 0 {
                continue;
            }
            // split m = sign * (base part) * (trivial part)
            let base: Vec<GenId> = factors
                .iter()
                .copied()
                .filter(|g| !self.is_trivial_gen(g))
                .collect();
            let word: Vec<GenId> = factors
                .iter()
                .copied()
                .filter(|g| self.is_trivial_gen(g))
                .collect();
            let mut cat = base.clone();
            cat.extend(word.iter().copied());
            let (split_sign, mm) = crate::monomial::normalize_unchecked(&cat).expect("permutation");
            debug_assert_eq!(&mm, m);
            let base_degree: i64 = base.iter().map(|g| g.degree()).sum();
            // odd derivation s on the trivial word
            let mut s_word = Element::zero(z.trunc());
            let mut prefix_degree = 0i64;
            for (i, g) in word.iter().enumerate() {
                if let Some((sgn, image)) = self.s_generator(g) {
                    let mut fac: Vec<GenId> = word[..i].to_vec();
                    fac.push(image);
                    fac.extend(word[i + 1..].iter().copied());
                    if let Some((ns, nm)) = crate::monomial::normalize_unchecked(&fac) {
                        let mut c = sgn;
                        if ns < 0 {
                            c = -c;
                        }
                        if prefix_degree.rem_euclid(2) == 1 {
                            c = -c;
                        }
                        s_word.add_term(nm, c);
                    }
                }
                prefix_degree += g.degree();
            }
            if s_word.is_zero() {
                continue;
            }
            let mut scale = Scalar::one() / Scalar::from_integer((b_count as i64).into());
            if split_sign < 0 {
                scale = -scale;
            }
            if base_degree.rem_euclid(2) == 1 {
                scale = -scale;
            }
            let base_m = crate::monomial::normalize_unchecked(&base)
                .expect("sorted")
                .1;
            let term = Element::from_term(base_m, coeff * &scale, z.trunc()).mul(&s_word);
            out = out.add(&term);
        }
        out
    }
}
