//! Tate resolutions T = P ⊗ Sym(𝓜) of P/J: the differential δ, the
//! projection π̄ through the normal-form split P/J -> P, a computable
//! contracting homotopy s with δs + sδ = 1 - π̄ on bounded slices, and the
//! degree-by-degree extension that adjoins ghosts killing slice homology.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::One;

use crate::element::Element;
use crate::error::Error;
use crate::generators::{GenId, GeneratorTable};
use crate::groebner::PolyIdeal;
use crate::linalg::{Indexer, Inserted, SpanSolver, SparseVec};
use crate::monomial::SuperMonomial;
use crate::poly::Poly;
use crate::scalar::Scalar;

/// Truncation label for elements of T: every T-monomial has filtration
/// weight zero, so this is "exact".
pub const EXACT_TRUNC: u32 = u32::MAX;

/// Bounds of the finite-dimensional windows used for exact linear algebra.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SliceBounds {
    /// Polynomial degree cap D.
    pub poly_degree: u32,
    /// Ghost word length cap W.
    pub word_length: u32,
}

impl SliceBounds {
    pub fn new(poly_degree: u32, word_length: u32) -> Self {
        SliceBounds {
            poly_degree,
            word_length,
        }
    }
}

/// One slice-verified statement: within the recorded bounds, every cycle of
/// this homological degree became a boundary after the extension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AcyclicityRecord {
    pub degree: i64,
    pub bounds: SliceBounds,
    pub new_generators: u32,
}

/// Tate data: the growing ghost table, the δ-image of every ghost, the
/// Gröbner data of the constraint ideal, and the acyclicity ledger.
#[derive(Clone, Debug)]
pub struct Resolution {
    table: GeneratorTable,
    ideal: PolyIdeal,
    delta_images: BTreeMap<GenId, Element>,
    /// Deepest ghost level constructed (homological extent is -depth).
    depth: u32,
    ledger: Vec<AcyclicityRecord>,
}

/// One degree -1 ghost per constraint generator with δ(e_i) = φ_i.
pub fn koszul_init(ideal: PolyIdeal) -> Resolution {
    let mut table = GeneratorTable::new(ideal.pairs());
    let mut delta_images = BTreeMap::new();
    for gen in ideal.gens().iter() {
        let ghost = table.add_ghost(1);
        delta_images.insert(ghost, gen.to_element(EXACT_TRUNC));
    }
    Resolution {
        table,
        ideal,
        delta_images,
        depth: 1,
        ledger: Vec::new(),
    }
}

impl Resolution {
    /// Assembles a resolution from explicit parts (trivial models, product
    /// models). Every ghost in the table must have a δ-image (zero is fine).
    pub fn from_parts(
        table: GeneratorTable,
        ideal: PolyIdeal,
        delta_images: BTreeMap<GenId, Element>,
        depth: u32,
    ) -> Result<Resolution, Error> {
        for g in table.ghost_iter() {
            if !delta_images.contains_key(&g) {
                return Err(Error::InvariantViolation(alloc::format!(
                    "ghost {} has no differential image",
                    g.name()
                )));
            }
        }
        let res = Resolution {
            table,
            ideal,
            delta_images,
            depth,
            ledger: Vec::new(),
        };
        res.verify_differential_squares_to_zero()?;
        Ok(res)
    }

    pub fn table(&self) -> &GeneratorTable {
        &self.table
    }

    pub fn ideal(&self) -> &PolyIdeal {
        &self.ideal
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn ledger(&self) -> &[AcyclicityRecord] {
        &self.ledger
    }

    /// Restores ledger records when rebuilding a resolution from its
    /// serialized form.
    pub fn restore_ledger(&mut self, records: Vec<AcyclicityRecord>) {
        self.ledger = records;
    }

    pub fn delta_image(&self, ghost: &GenId) -> Option<&Element> {
        self.delta_images.get(ghost)
    }

    /// Largest polynomial degree appearing in any δ-image.
    pub fn max_image_poly_degree(&self) -> u32 {
        self.delta_images
            .values()
            .map(|e| e.max_poly_degree())
            .max()
            .unwrap_or(0)
    }

    /// δ as an odd derivation on the ghost-only algebra T. Errors when the
    /// input contains an antighost.
    pub fn delta(&self, a: &Element) -> Result<Element, Error> {
        for (m, _) in a.iter() {
            if m.has_anti() {
                let g = m
                    .factors()
                    .into_iter()
                    .find(|g| g.is_anti())
                    .expect("has_anti implies an antighost factor");
                return Err(Error::AntighostPresent(g.name()));
            }
        }
        Ok(self.delta_extended(a))
    }

    /// The odd-derivation extension of δ to all of X: antighosts (and x, y)
    /// map to zero, so δ(b·t) = (-1)^{deg b} b·δ(t) for an antighost
    /// prefix b.
    pub fn delta_extended(&self, a: &Element) -> Element {
        let mut out = Element::zero(a.trunc());
        for (m, c) in a.iter() {
            self.delta_monomial(m, c, &mut out);
        }
        out
    }

    fn delta_monomial(&self, m: &SuperMonomial, c: &Scalar, out: &mut Element) {
        let factors = m.factors();
        let mut prefix_degree: i64 = 0;
        for (i, g) in factors.iter().enumerate() {
            if let Some(image) = self.delta_images.get(g) {
                let prefix = &factors[..i];
                let suffix = &factors[i + 1..];
                let (ps, pm) = crate::monomial::normalize_unchecked(prefix)
                    .expect("sorted subword cannot vanish");
                let (ss, sm) = crate::monomial::normalize_unchecked(suffix)
                    .expect("sorted subword cannot vanish");
                debug_assert_eq!(ps, 1);
                debug_assert_eq!(ss, 1);
                let mut coeff = c.clone();
                if prefix_degree.rem_euclid(2) == 1 {
                    coeff = -coeff;
                }
                let image = image.truncate(out.trunc());
                let term = Element::from_term(pm, coeff, out.trunc())
                    .mul(&image)
                    .mul(&Element::from_term(sm, Scalar::one(), out.trunc()));
                for (tm, tc) in term.iter() {
                    out.add_term(tm.clone(), tc.clone());
                }
            }
            prefix_degree += g.degree();
        }
    }

    /// π̄: normal form on the P-part, zero on monomials whose T-factor
    /// contains a ghost, identity on the antighost factor. Surviving
    /// monomials have an even (polynomial) T-part, so the factorization
    /// m = anti * rest carries no Koszul sign here.
    pub fn pibar(&self, a: &Element) -> Element {
        let mut out = Element::zero(a.trunc());
        for (m, c) in a.iter() {
            let (anti, rest) = m.split_anti();
            if rest.has_ghost() {
                continue;
            }
            let poly_elem = Element::from_term(rest, c.clone(), a.trunc());
            let nf = self
                .ideal
                .normal_form_element(&poly_elem)
                .expect("ghost-free T-factor is polynomial");
            let anti_elem = Element::from_term(anti, Scalar::one(), a.trunc());
            let term = anti_elem.mul(&nf);
            for (tm, tc) in term.iter() {
                out.add_term(tm.clone(), tc.clone());
            }
        }
        out
    }

    /// δ∘δ must vanish on every generator image.
    pub fn verify_differential_squares_to_zero(&self) -> Result<(), Error> {
        for (g, image) in &self.delta_images {
            let dd = self.delta_extended(image);
            if !dd.is_zero() {
                return Err(Error::InvariantViolation(alloc::format!(
                    "delta^2 nonzero on {}",
                    g.name()
                )));
            }
        }
        Ok(())
    }

    fn delta_of_monomial_element(&self, m: &SuperMonomial) -> Element {
        self.delta_extended(&Element::from_term(m.clone(), Scalar::one(), EXACT_TRUNC))
    }
}

/// Enumerates x/y monomials of exact polynomial degree `d`.
pub fn poly_monomials_exact(pairs: u32, d: u32) -> Vec<SuperMonomial> {
    let nvars = 2 * pairs as usize;
    let mut out = Vec::new();
    if nvars == 0 {
        if d == 0 {
            out.push(SuperMonomial::unit());
        }
        return out;
    }
    let mut exps = alloc::vec![0u32; nvars];
    fn rec(exps: &mut Vec<u32>, var: usize, rest: u32, pairs: u32, out: &mut Vec<SuperMonomial>) {
        if var + 1 == exps.len() {
            exps[var] = rest;
            let mut factors = Vec::new();
            for (i, &e) in exps.iter().enumerate() {
                let g = if i < pairs as usize {
                    GenId::X(i as u32)
                } else {
                    GenId::Y((i - pairs as usize) as u32)
                };
                for _ in 0..e {
                    factors.push(g);
                }
            }
            let (_, m) = crate::monomial::normalize_unchecked(&factors).unwrap();
            out.push(m);
            return;
        }
        for e in 0..=rest {
            exps[var] = e;
            rec(exps, var + 1, rest - e, pairs, out);
            exps[var] = 0;
        }
    }
    rec(&mut exps, 0, d, pairs, &mut out);
    out.sort();
    out
}

/// Enumerates words over the given generators with exact total degree
/// `target` and at most `max_len` factors. Odd generators appear at most
/// once; even ones may repeat.
pub fn graded_words(gens: &[GenId], target: i64, max_len: u32) -> Vec<SuperMonomial> {
    let mut gens: Vec<GenId> = gens.to_vec();
    gens.sort();
    gens.dedup();
    let gens = &gens[..];
    let mut out = Vec::new();
    let mut stack: Vec<GenId> = Vec::new();
    // suffix_min[i] / suffix_max[i]: extreme generator degrees among gens[i..]
    let n = gens.len();
    let mut suffix_min = alloc::vec![0i64; n + 1];
    let mut suffix_max = alloc::vec![0i64; n + 1];
    for i in (0..n).rev() {
        suffix_min[i] = suffix_min[i + 1].min(gens[i].degree());
        suffix_max[i] = suffix_max[i + 1].max(gens[i].degree());
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(
        gens: &[GenId],
        suffix_min: &[i64],
        suffix_max: &[i64],
        from: usize,
        remaining: i64,
        len_left: u32,
        stack: &mut Vec<GenId>,
        out: &mut Vec<SuperMonomial>,
    ) {
        if remaining == 0 {
            let (sign, m) = crate::monomial::normalize_unchecked(stack)
                .expect("construction avoids odd repeats");
            debug_assert_eq!(sign, 1);
            out.push(m);
        }
        if len_left == 0 || from >= gens.len() {
            return;
        }
        // reachable degree window with the generators still available
        let lo = suffix_min[from].saturating_mul(len_left as i64);
        let hi = suffix_max[from].saturating_mul(len_left as i64);
        if remaining < lo.min(0) || remaining > hi.max(0) {
            return;
        }
        for (i, g) in gens.iter().enumerate().skip(from) {
            stack.push(*g);
            let next_from = if g.is_odd() { i + 1 } else { i };
            rec(
                gens,
                suffix_min,
                suffix_max,
                next_from,
                remaining - g.degree(),
                len_left - 1,
                stack,
                out,
            );
            stack.pop();
        }
    }
    rec(
        gens,
        &suffix_min,
        &suffix_max,
        0,
        target,
        max_len,
        &mut stack,
        &mut out,
    );
    out.sort();
    out.dedup();
    out
}

/// Basis monomials of T in a given T-degree: x/y part of exact polynomial
/// degree `poly_deg` times a ghost word of degree `degree`.
pub fn t_monomials(
    table: &GeneratorTable,
    degree: i64,
    poly_deg: u32,
    max_word: u32,
) -> Vec<SuperMonomial> {
    let ghosts: Vec<GenId> = table.ghost_iter().collect();
    let words = graded_words(&ghosts, degree, max_word);
    let polys = poly_monomials_exact(table.pairs(), poly_deg);
    let mut out = Vec::with_capacity(words.len() * polys.len());
    for w in &words {
        for p in &polys {
            let (sign, m) = p.mul(w).expect("disjoint factors");
            debug_assert_eq!(sign, 1);
            out.push(m);
        }
    }
    out.sort();
    out
}

fn element_to_vec(e: &Element, indexer: &mut Indexer<SuperMonomial>) -> SparseVec {
    let mut v = SparseVec::new();
    for (m, c) in e.iter() {
        v.insert(indexer.intern(m), c.clone());
    }
    v
}

/// The contracting homotopy, memoized per T-monomial. Defined by downward
/// induction on T-degree:
///
/// * degree 0: δy = m - NF(m) is solved exactly through the membership
///   certificate of m - NF(m) ∈ J;
/// * degree < 0: δy = m - s(δm) is solved over a bounded slice of T, with
///   lexicographically-least pivoting and free variables set to zero.
///
/// Solutions widen the polynomial-degree window on demand up to the bounds
/// cap; every widening is recorded.
#[derive(Debug)]
pub struct Homotopy<'a> {
    res: &'a Resolution,
    bounds: SliceBounds,
    cache: BTreeMap<SuperMonomial, Element>,
    widenings: Vec<(i64, u32)>,
    /// FNV-1a digest of all pivot choices, for reproducibility logs.
    pivot_digest: u64,
}

const FNV_OFFSET: u64 = 0xcbf29ce484222325;
const FNV_PRIME: u64 = 0x100000001b3;

fn fnv_step(digest: u64, value: u64) -> u64 {
    let mut d = digest;
    for b in value.to_le_bytes() {
        d ^= b as u64;
        d = d.wrapping_mul(FNV_PRIME);
    }
    d
}

impl<'a> Homotopy<'a> {
    pub fn new(res: &'a Resolution, bounds: SliceBounds) -> Self {
        Homotopy {
            res,
            bounds,
            cache: BTreeMap::new(),
            widenings: Vec::new(),
            pivot_digest: FNV_OFFSET,
        }
    }

    pub fn bounds(&self) -> SliceBounds {
        self.bounds
    }

    pub fn widenings(&self) -> &[(i64, u32)] {
        &self.widenings
    }

    pub fn pivot_digest(&self) -> u64 {
        self.pivot_digest
    }

    /// s on all of X: acts on the T-factor, extended across an antighost
    /// prefix b with the odd-map sign (-1)^{deg b}.
    pub fn apply(&mut self, a: &Element) -> Result<Element, Error> {
        let mut out = Element::zero(a.trunc());
        for (m, c) in a.iter() {
            let (anti, rest) = m.split_anti();
            // m = split_sign * anti * rest (Koszul sign of the factorization)
            let (split_sign, recomposed) = anti
                .mul(&rest)
                .expect("factorization cannot introduce odd squares");
            debug_assert_eq!(&recomposed, m);
            let s_val = self.s_monomial(&rest)?.clone();
            let mut coeff = c.clone();
            if split_sign < 0 {
                coeff = -coeff;
            }
            if anti.degree().rem_euclid(2) == 1 {
                coeff = -coeff;
            }
            let term = Element::from_term(anti, coeff, a.trunc()).mul(&s_val.truncate(a.trunc()));
            for (tm, tc) in term.iter() {
                out.add_term(tm.clone(), tc.clone());
            }
        }
        Ok(out)
    }

    /// s of a single T-monomial.
    fn s_monomial(&mut self, m: &SuperMonomial) -> Result<&Element, Error> {
        if !self.cache.contains_key(m) {
            let value = self.compute_s(m)?;
            self.cache.insert(m.clone(), value);
        }
        Ok(&self.cache[m])
    }

    fn s_of_element(&mut self, e: &Element) -> Result<Element, Error> {
        let mut out = Element::zero(EXACT_TRUNC);
        for (m, c) in e.iter() {
            let v = self.s_monomial(m)?.clone();
            out = out.add(&v.scale(c));
        }
        Ok(out)
    }

    fn compute_s(&mut self, m: &SuperMonomial) -> Result<Element, Error> {
        debug_assert!(!m.has_anti());
        let degree = m.degree();
        let m_elem = Element::from_term(m.clone(), Scalar::one(), EXACT_TRUNC);
        let target = if degree == 0 {
            // z = m - NF(m) ∈ J; its membership certificate Σ a_i φ_i gives
            // the preimage Σ a_i e_i directly.
            let poly = Poly::from_element(&m_elem, self.res.table.pairs())
                .expect("degree-0 T-monomial is polynomial");
            let z = poly.sub(&self.res.ideal.normal_form(&poly));
            let cert = self.res.ideal.lift_certificate(&z).ok_or_else(|| {
                Error::InvariantViolation(String::from("m - NF(m) must lie in the ideal"))
            })?;
            let mut y = Element::zero(EXACT_TRUNC);
            for (i, a) in cert.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let ghost = GenId::Ghost {
                    level: 1,
                    index: i as u32,
                };
                let ghost_elem = Element::generator(ghost, EXACT_TRUNC);
                y = y.add(&a.to_element(EXACT_TRUNC).mul(&ghost_elem));
            }
            return Ok(y);
        } else {
            // z = m - s(δm); π̄ vanishes in negative degree.
            let dm = self.res.delta_extended(&m_elem);
            let s_dm = self.s_of_element(&dm)?;
            m_elem.sub(&s_dm)
        };
        debug_assert!(
            self.res.delta_extended(&target).is_zero(),
            "homotopy target must be a cycle"
        );
        self.solve_delta(degree - 1, &target)
    }

    /// Solves δy = z with y in the slice of T-degree `degree`, widening the
    /// polynomial window as needed.
    fn solve_delta(&mut self, degree: i64, z: &Element) -> Result<Element, Error> {
        if z.is_zero() {
            return Ok(Element::zero(EXACT_TRUNC));
        }
        let mut poly_cap = z.max_poly_degree();
        loop {
            match self.try_solve(degree, z, poly_cap) {
                Some(y) => return Ok(y),
                None => {
                    if poly_cap >= self.bounds.poly_degree {
                        return Err(Error::SliceTooSmall {
                            context: "homotopy",
                            degree,
                            poly_degree_bound: poly_cap,
                        });
                    }
                    poly_cap = (poly_cap + 2).min(self.bounds.poly_degree);
                    self.widenings.push((degree, poly_cap));
                }
            }
        }
    }

    fn try_solve(&mut self, degree: i64, z: &Element, poly_cap: u32) -> Option<Element> {
        let mut indexer = Indexer::new();
        let mut span = SpanSolver::new();
        let mut candidates: Vec<SuperMonomial> = Vec::new();
        for d in 0..=poly_cap {
            for cand in t_monomials(&self.res.table, degree, d, self.bounds.word_length) {
                let image = self.res.delta_of_monomial_element(&cand);
                if image.is_zero() {
                    continue;
                }
                let id = candidates.len();
                candidates.push(cand);
                let v = element_to_vec(&image, &mut indexer);
                span.insert(id, v);
            }
        }
        let b = element_to_vec(z, &mut indexer);
        let combo = span.solve(&b)?;
        for r in span.pivot_rows() {
            self.pivot_digest = fnv_step(self.pivot_digest, r as u64);
        }
        let mut y = Element::zero(EXACT_TRUNC);
        for (id, c) in &combo {
            y.add_term(candidates[*id].clone(), c.clone());
        }
        Some(y)
    }
}

/// Outcome of a Tate extension step.
#[derive(Clone, Debug)]
pub struct ExtensionReport {
    pub level: u32,
    pub new_ghosts: Vec<GenId>,
    pub bounds: SliceBounds,
}

/// Extends the resolution to homological degree -level: computes a basis of
/// the slice homology at degree -level+1 (cycles modulo boundaries, staged
/// by polynomial degree so the chosen generators generate as a P-module
/// within the window) and adjoins one ghost of degree -level per class. At
/// level 2 the cycle space is seeded by the syzygy module instead of a
/// kernel computation.
pub fn tate_extend(
    res: &mut Resolution,
    level: u32,
    bounds: SliceBounds,
) -> Result<ExtensionReport, Error> {
    assert!(level >= 2, "koszul_init already provides level 1");
    let cycle_degree = -(level as i64) + 1;
    let pairs = res.table.pairs();

    // Boundary span: δ of every slice monomial of degree -level.
    let mut indexer = Indexer::new();
    let mut span = SpanSolver::new();
    let mut col = 0usize;
    for d in 0..=bounds.poly_degree {
        for w in t_monomials(&res.table, -(level as i64), d, bounds.word_length) {
            let image = res.delta_of_monomial_element(&w);
            if image.is_zero() {
                continue;
            }
            span.insert(col, element_to_vec(&image, &mut indexer));
            col += 1;
        }
    }

    // Cycle candidates, grouped by polynomial degree.
    let mut staged: BTreeMap<u32, Vec<Element>> = BTreeMap::new();
    if level == 2 {
        // Syzygies of the constraints generate all cycles at degree -1 as a
        // P-module: stage every monomial multiple within the window.
        let syz = res.ideal.syzygies();
        for row in &syz.generators {
            let mut cycle = Element::zero(EXACT_TRUNC);
            for (i, a) in row.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let ghost = Element::generator(
                    GenId::Ghost {
                        level: 1,
                        index: i as u32,
                    },
                    EXACT_TRUNC,
                );
                cycle = cycle.add(&a.to_element(EXACT_TRUNC).mul(&ghost));
            }
            if cycle.is_zero() {
                continue;
            }
            let base_deg = cycle.max_poly_degree();
            for extra in 0..=bounds.poly_degree.saturating_sub(base_deg) {
                for p in poly_monomials_exact(pairs, extra) {
                    let mult = Element::from_term(p, Scalar::one(), EXACT_TRUNC).mul(&cycle);
                    staged.entry(mult.max_poly_degree()).or_default().push(mult);
                }
            }
        }
    } else {
        // Kernel of δ on the slice of degree -level+1.
        let mut cand_index: Vec<SuperMonomial> = Vec::new();
        let mut kernel_span = SpanSolver::new();
        let mut kernel_indexer = Indexer::new();
        for d in 0..=bounds.poly_degree {
            for cand in t_monomials(&res.table, cycle_degree, d, bounds.word_length) {
                let image = res.delta_of_monomial_element(&cand);
                let id = cand_index.len();
                cand_index.push(cand.clone());
                if image.is_zero() {
                    // the candidate itself is a cycle
                    staged
                        .entry(cand.poly_degree())
                        .or_default()
                        .push(Element::from_term(cand, Scalar::one(), EXACT_TRUNC));
                    continue;
                }
                match kernel_span.insert(id, element_to_vec(&image, &mut kernel_indexer)) {
                    Inserted::Independent => {}
                    Inserted::Dependent(combo) => {
                        let mut cycle =
                            Element::from_term(cand.clone(), Scalar::one(), EXACT_TRUNC);
                        for (j, c) in &combo {
                            cycle.add_term(cand_index[*j].clone(), -c.clone());
                        }
                        staged
                            .entry(cycle.max_poly_degree())
                            .or_default()
                            .push(cycle);
                    }
                }
            }
        }
    }

    // Select new generators: cycles not in (boundaries + P·chosen), staged
    // by polynomial degree with echelon representatives.
    let mut chosen: Vec<Element> = Vec::new();
    for d in 0..=bounds.poly_degree {
        // P-multiples of previously chosen cycles entering at this degree.
        let mut additions: Vec<Element> = Vec::new();
        for z in &chosen {
            let base = z.max_poly_degree();
            if d >= base {
                let extra = d - base;
                if extra > 0 {
                    for p in poly_monomials_exact(pairs, extra) {
                        additions.push(Element::from_term(p, Scalar::one(), EXACT_TRUNC).mul(z));
                    }
                }
            }
        }
        for a in additions {
            span.insert(col, element_to_vec(&a, &mut indexer));
            col += 1;
        }
        let Some(cands) = staged.get(&d) else {
            continue;
        };
        for z in cands {
            let v = element_to_vec(z, &mut indexer);
            match span.insert(col, v) {
                Inserted::Dependent(_) => {}
                Inserted::Independent => {
                    chosen.push(z.clone());
                }
            }
            col += 1;
        }
    }

    let mut new_ghosts = Vec::new();
    for z in chosen {
        let ghost = res.table.add_ghost(level);
        res.delta_images.insert(ghost, z);
        new_ghosts.push(ghost);
    }
    res.depth = res.depth.max(level);
    res.verify_differential_squares_to_zero()?;
    res.ledger.push(AcyclicityRecord {
        degree: cycle_degree,
        bounds,
        new_generators: new_ghosts.len() as u32,
    });
    Ok(ExtensionReport {
        level,
        new_ghosts,
        bounds,
    })
}

/// Checks within bounds that every cycle of the given T-degree is a
/// boundary. Used to reverify slice acyclicity after extensions.
pub fn verify_acyclic(res: &Resolution, degree: i64, bounds: SliceBounds) -> Result<(), Error> {
    let mut indexer = Indexer::new();
    let mut boundary = SpanSolver::new();
    let mut col = 0usize;
    for d in 0..=bounds.poly_degree {
        for w in t_monomials(&res.table, degree - 1, d, bounds.word_length) {
            let image = res.delta_of_monomial_element(&w);
            if image.is_zero() {
                continue;
            }
            boundary.insert(col, element_to_vec(&image, &mut indexer));
            col += 1;
        }
    }
    let mut cand_index: Vec<SuperMonomial> = Vec::new();
    let mut kernel_span = SpanSolver::new();
    let mut kernel_indexer = Indexer::new();
    let check_cycle = |cycle: &Element,
                       boundary: &SpanSolver,
                       indexer: &mut Indexer<SuperMonomial>|
     -> Result<(), Error> {
        let v = element_to_vec(cycle, indexer);
        if boundary.solve(&v).is_none() {
            return Err(Error::SliceTooSmall {
                context: "acyclicity",
                degree,
                poly_degree_bound: bounds.poly_degree,
            });
        }
        Ok(())
    };
    for d in 0..=bounds.poly_degree {
        for cand in t_monomials(&res.table, degree, d, bounds.word_length) {
            let image = res.delta_of_monomial_element(&cand);
            let id = cand_index.len();
            cand_index.push(cand.clone());
            if image.is_zero() {
                let cycle = Element::from_term(cand, Scalar::one(), EXACT_TRUNC);
                check_cycle(&cycle, &boundary, &mut indexer)?;
                continue;
            }
            if let Inserted::Dependent(combo) =
                kernel_span.insert(id, element_to_vec(&image, &mut kernel_indexer))
            {
                let mut cycle = Element::from_term(cand.clone(), Scalar::one(), EXACT_TRUNC);
                for (j, c) in &combo {
                    cycle.add_term(cand_index[*j].clone(), -c.clone());
                }
                check_cycle(&cycle, &boundary, &mut indexer)?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{angular_momenta, mu_poly};
    use crate::groebner::buchberger;
    use crate::poly::MonomialOrder;
    use crate::scalar::s_int;

    fn plane_rotation() -> Resolution {
        let ideal = buchberger(&[mu_poly()], MonomialOrder::DegRevLex).unwrap();
        koszul_init(ideal)
    }

    fn so3() -> Resolution {
        let ideal = buchberger(&angular_momenta(), MonomialOrder::DegRevLex).unwrap();
        koszul_init(ideal)
    }

    #[test]
    fn koszul_init_plane_rotation() {
        let res = plane_rotation();
        assert_eq!(res.table().ghost_count(1), 1);
        let e = GenId::Ghost { level: 1, index: 0 };
        assert_eq!(
            res.delta_image(&e).unwrap(),
            &mu_poly().to_element(EXACT_TRUNC)
        );
    }

    #[test]
    fn delta_examples() {
        let res = plane_rotation();
        let e = Element::generator(GenId::Ghost { level: 1, index: 0 }, 6);
        assert_eq!(res.delta(&e).unwrap(), mu_poly().to_element(6));
        // δ on P vanishes
        let p = mu_poly().to_element(6);
        assert!(res.delta(&p).unwrap().is_zero());
        // antighosts rejected
        let a = Element::generator(GenId::Anti { level: 1, index: 0 }, 6);
        assert!(matches!(res.delta(&a), Err(Error::AntighostPresent(_))));
    }

    #[test]
    fn delta_is_odd_derivation() {
        let res = so3();
        let e1 = Element::generator(GenId::Ghost { level: 1, index: 0 }, 8);
        let e2 = Element::generator(GenId::Ghost { level: 1, index: 1 }, 8);
        let x1 = Element::generator(GenId::X(0), 8);
        let prod = e1.mul(&e2).mul(&x1);
        let lhs = res.delta(&prod).unwrap();
        // δ(e1 e2 x1) = δ(e1) e2 x1 - e1 δ(e2) x1
        let d1 = res.delta(&e1).unwrap();
        let d2 = res.delta(&e2).unwrap();
        let rhs = d1.mul(&e2).mul(&x1).sub(&e1.mul(&d2).mul(&x1));
        assert_eq!(lhs, rhs);
        // δ² = 0
        assert!(res.delta(&lhs).unwrap().is_zero());
    }

    #[test]
    fn pibar_examples() {
        let res = plane_rotation();
        assert!(res.pibar(&mu_poly().to_element(6)).is_zero());
        let e = Element::generator(GenId::Ghost { level: 1, index: 0 }, 6);
        let x1 = Element::generator(GenId::X(0), 6);
        assert_eq!(res.pibar(&x1.add(&e)), x1);
        // idempotent
        let y = mu_poly()
            .to_element(6)
            .mul(&mu_poly().to_element(6))
            .add(&x1);
        assert_eq!(res.pibar(&res.pibar(&y)), res.pibar(&y));
    }

    #[test]
    fn pibar_annihilates_delta_images() {
        // π̄ ∘ δ = 0: boundaries of T-degree 0 land in J, deeper ones keep
        // ghost factors
        let res = so3();
        let samples = [
            Element::generator(GenId::Ghost { level: 1, index: 0 }, 6)
                .mul(&Element::generator(GenId::X(0), 6)),
            Element::generator(GenId::Ghost { level: 2, index: 0 }, 6),
            Element::generator(GenId::Ghost { level: 1, index: 1 }, 6)
                .mul(&Element::generator(GenId::Ghost { level: 1, index: 2 }, 6)),
            Element::generator(GenId::Ghost { level: 1, index: 0 }, 6)
                .mul(&Element::generator(GenId::Anti { level: 1, index: 0 }, 6)),
        ];
        for t in samples {
            assert!(res.pibar(&res.delta_extended(&t)).is_zero());
        }
    }

    #[test]
    fn homotopy_on_mu_gives_ghost() {
        let res = plane_rotation();
        let mut s = Homotopy::new(&res, SliceBounds::new(6, 4));
        let mu = mu_poly().to_element(6);
        let e = Element::generator(GenId::Ghost { level: 1, index: 0 }, 6);
        assert_eq!(s.apply(&mu).unwrap(), e);
        // s(1) = 0 since π̄(1) = 1
        assert!(s.apply(&Element::one(6)).unwrap().is_zero());
    }

    #[test]
    fn homotopy_identity_on_samples() {
        let res = so3();
        let mut s = Homotopy::new(&res, SliceBounds::new(8, 4));
        let e1 = GenId::Ghost { level: 1, index: 0 };
        let e2 = GenId::Ghost { level: 1, index: 1 };
        let samples = [
            Element::generator(GenId::X(0), 8).mul(&Element::generator(e1, 8)),
            Element::generator(e1, 8).mul(&Element::generator(e2, 8)),
            angular_momenta()[0].to_element(8),
            Element::generator(GenId::Y(2), 8),
        ];
        for a in samples {
            let lhs = res
                .delta(&s.apply(&a).unwrap())
                .unwrap()
                .add(&s.apply(&res.delta(&a).unwrap()).unwrap());
            let rhs = a.sub(&res.pibar(&a));
            assert_eq!(lhs, rhs, "δs + sδ = 1 - π̄ failed on {:?}", a.to_lines());
        }
    }

    #[test]
    fn extend_plane_rotation_adds_nothing() {
        let mut res = plane_rotation();
        let report = tate_extend(&mut res, 2, SliceBounds::new(4, 3)).unwrap();
        assert!(
            report.new_ghosts.is_empty(),
            "Koszul complex of a regular element is exact"
        );
        verify_acyclic(&res, -1, SliceBounds::new(3, 2)).unwrap();
    }

    #[test]
    fn extend_so3_adds_two_level2_ghosts() {
        let mut res = so3();
        // Koszul alone is not exact at degree -1
        assert!(verify_acyclic(&res, -1, SliceBounds::new(3, 3)).is_err());
        let report = tate_extend(&mut res, 2, SliceBounds::new(3, 3)).unwrap();
        assert_eq!(
            report.new_ghosts.len(),
            2,
            "syzygies (x) and (y) need killing"
        );
        // the two syzygy cycles are now boundaries
        verify_acyclic(&res, -1, SliceBounds::new(2, 2)).unwrap();
        // δ of the new ghosts are the syzygy cycles Σ x_i e_i and Σ y_i e_i
        for g in &report.new_ghosts {
            let img = res.delta_image(g).unwrap();
            assert_eq!(img.homogeneous_degree(), Some(-1));
            assert!(res.delta(img).unwrap().is_zero());
        }
    }

    #[test]
    fn homotopy_identity_with_odd_prefix_and_odd_t_part() {
        // the factorization m = e2 e1* = -(e1* * e2) carries a Koszul sign
        let res = so3();
        let mut s = Homotopy::new(&res, SliceBounds::new(8, 4));
        let m = crate::monomial::normalize_unchecked(&[
            GenId::Anti { level: 1, index: 0 },
            GenId::Ghost { level: 1, index: 1 },
        ])
        .unwrap()
        .1;
        let a = Element::from_term(m, s_int(1), 6);
        let lhs = res
            .delta_extended(&s.apply(&a).unwrap())
            .add(&s.apply(&res.delta_extended(&a)).unwrap());
        let rhs = a.sub(&res.pibar(&a));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn homotopy_preserves_positive_factor_count() {
        // s acts on the T-factor only, so the antighost content of every
        // monomial survives: I^(q) membership is preserved
        let res = so3();
        let mut s = Homotopy::new(&res, SliceBounds::new(8, 5));
        let a1 = GenId::Anti { level: 1, index: 0 };
        let a2 = GenId::Anti { level: 1, index: 1 };
        let m = crate::monomial::normalize_unchecked(&[a1, a2, GenId::X(0)])
            .unwrap()
            .1;
        let mu1 = crate::fixtures::angular_momenta()[0].to_element(6);
        let a = Element::from_term(m, s_int(1), 6).mul(&mu1);
        assert!(a.in_ideal_power(2));
        let sa = s.apply(&a).unwrap();
        assert!(!sa.is_zero());
        assert!(sa.in_ideal_power(2), "s must preserve I^(2)");
    }
}
