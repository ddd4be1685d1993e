//! Buchberger engine over the degree-0 polynomial ring: reduced Gröbner
//! bases with division transcripts, ideal membership with certificates,
//! normal forms (the K-linear split P/J -> P), and first syzygies.

use alloc::vec::Vec;

use num_traits::One;

use crate::element::Element;
use crate::error::Error;
use crate::poly::{divides, exp_lcm, exp_sub, Exps, MonomialOrder, Poly};
use crate::scalar::Scalar;

/// A coisotropic ideal J ⊂ P with its computed Gröbner data. The division
/// transcripts express every basis element exactly over the original
/// generators, so membership tests come with checkable certificates.
#[derive(Clone, Debug)]
pub struct PolyIdeal {
    gens: Vec<Poly>,
    order: MonomialOrder,
    /// Reduced Gröbner basis, primitive integer form, positive lead.
    basis: Vec<Poly>,
    /// basis[i] = Σ_j certs[i][j] * gens[j], exactly.
    certs: Vec<Vec<Poly>>,
    /// gens[i] = Σ_j gens_in_basis[i][j] * basis[j], exactly.
    gens_in_basis: Vec<Vec<Poly>>,
    nvars: usize,
}

/// Generators of the relation module {(a_1..a_k) : Σ a_i φ_i = 0}.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SyzygyModule {
    pub generators: Vec<Vec<Poly>>,
}

impl SyzygyModule {
    /// Every generator must annihilate the constraint vector exactly.
    pub fn verify(&self, gens: &[Poly], nvars: usize) -> bool {
        self.generators.iter().all(|row| {
            let mut acc = Poly::zero(nvars);
            for (a, g) in row.iter().zip(gens) {
                acc = acc.add(&a.mul(g));
            }
            acc.is_zero()
        })
    }
}

/// Multivariate division: f = Σ q_i d_i + r with no term of r divisible by
/// any LT(d_i). Divisors are tried in index order, so the transcript is
/// deterministic for a fixed order and divisor list.
pub fn division(f: &Poly, divisors: &[Poly], order: MonomialOrder) -> (Vec<Poly>, Poly) {
    let nvars = f.nvars();
    let mut quots = alloc::vec![Poly::zero(nvars); divisors.len()];
    let mut rem = Poly::zero(nvars);
    let mut work = f.clone();
    let lts: Vec<Option<(Exps, Scalar)>> = divisors
        .iter()
        .map(|d| d.leading_term(order).map(|(e, c)| (e.clone(), c.clone())))
        .collect();
    while let Some((le, lc)) = work
        .leading_term(order)
        .map(|(e, c)| (e.clone(), c.clone()))
    {
        let mut reduced = false;
        for (i, lt) in lts.iter().enumerate() {
            let Some((de, dc)) = lt else { continue };
            if divides(de, &le) {
                let t_exp = exp_sub(&le, de);
                let t_coeff = &lc / dc;
                quots[i].add_term(t_exp.clone(), t_coeff.clone());
                work = work.sub(&divisors[i].mul_term(&t_exp, &t_coeff));
                reduced = true;
                break;
            }
        }
        if !reduced {
            rem.add_term(le.clone(), lc.clone());
            let mut single = Poly::zero(nvars);
            single.add_term(le, lc);
            work = work.sub(&single);
        }
    }
    (quots, rem)
}

fn vec_add_scaled(acc: &mut [Poly], row: &[Poly], scale: &Poly) {
    for (a, r) in acc.iter_mut().zip(row) {
        *a = a.add(&r.mul(scale));
    }
}

impl PolyIdeal {
    pub fn gens(&self) -> &[Poly] {
        &self.gens
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn basis(&self) -> &[Poly] {
        &self.basis
    }

    pub fn certs(&self) -> &[Vec<Poly>] {
        &self.certs
    }

    pub fn gens_in_basis(&self) -> &[Vec<Poly>] {
        &self.gens_in_basis
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn pairs(&self) -> u32 {
        (self.nvars / 2) as u32
    }

    pub fn is_zero_ideal(&self) -> bool {
        self.basis.is_empty()
    }

    /// Remainder of multivariate division by the reduced basis. K-linear;
    /// NF(f) = 0 iff f ∈ J.
    pub fn normal_form(&self, f: &Poly) -> Poly {
        division(f, &self.basis, self.order).1
    }

    pub fn contains_poly(&self, f: &Poly) -> bool {
        self.normal_form(f).is_zero()
    }

    /// If f ∈ J, an exact coefficient vector (a_1..a_k) with f = Σ a_i φ_i
    /// over the original generators; None signals f ∉ J.
    pub fn lift_certificate(&self, f: &Poly) -> Option<Vec<Poly>> {
        let (quots, rem) = division(f, &self.basis, self.order);
        if !rem.is_zero() {
            return None;
        }
        let mut out = alloc::vec![Poly::zero(self.nvars); self.gens.len()];
        for (q, cert_row) in quots.iter().zip(&self.certs) {
            if !q.is_zero() {
                vec_add_scaled(&mut out, cert_row, q);
            }
        }
        Some(out)
    }

    /// NF on the polynomial part of an element of X (which must be ghost
    /// free). Convenience for the Tate projection.
    pub fn normal_form_element(&self, e: &Element) -> Option<Element> {
        let p = Poly::from_element(e, self.pairs())?;
        Some(self.normal_form(&p).to_element(e.trunc()))
    }

    /// Generating set of the first syzygy module, Schreyer-style from the
    /// S-pair reductions of the reduced basis, transported back to the
    /// original generators.
    pub fn syzygies(&self) -> SyzygyModule {
        let k = self.gens.len();
        let m = self.basis.len();
        let mut rows: Vec<Vec<Poly>> = Vec::new();

        // S-pair reductions of the basis reduce to zero; each gives a
        // relation among basis elements.
        for i in 0..m {
            for j in (i + 1)..m {
                let (ei, ci) = self.basis[i].leading_term(self.order).unwrap();
                let (ej, cj) = self.basis[j].leading_term(self.order).unwrap();
                let l = exp_lcm(ei, ej);
                let ui = exp_sub(&l, ei);
                let uj = exp_sub(&l, ej);
                let s = self.basis[i]
                    .mul_term(&ui, &(Scalar::one() / ci.clone()))
                    .sub(&self.basis[j].mul_term(&uj, &(Scalar::one() / cj.clone())));
                let (quots, rem) = division(&s, &self.basis, self.order);
                debug_assert!(
                    rem.is_zero(),
                    "S-polynomial of a Groebner basis must reduce to 0"
                );
                if !rem.is_zero() {
                    continue;
                }
                // relation over basis: u_i/lc_i E_i - u_j/lc_j E_j - Σ q_t E_t
                let mut rel = alloc::vec![Poly::zero(self.nvars); m];
                let mut ti = Poly::zero(self.nvars);
                ti.add_term(ui, Scalar::one() / ci.clone());
                let mut tj = Poly::zero(self.nvars);
                tj.add_term(uj, Scalar::one() / cj.clone());
                rel[i] = rel[i].add(&ti);
                rel[j] = rel[j].sub(&tj);
                for (t, q) in rel.iter_mut().zip(&quots) {
                    *t = t.sub(q);
                }
                // transport to the original generators
                let mut row = alloc::vec![Poly::zero(self.nvars); k];
                for (rk, cert_row) in rel.iter().zip(&self.certs) {
                    if !rk.is_zero() {
                        vec_add_scaled(&mut row, cert_row, rk);
                    }
                }
                rows.push(row);
            }
        }

        // rows of (Id - B*A): gen_i minus its basis expression re-expanded
        for i in 0..k {
            let mut row = alloc::vec![Poly::zero(self.nvars); k];
            row[i] = Poly::one(self.nvars);
            for (b, cert_row) in self.gens_in_basis[i].iter().zip(&self.certs) {
                if !b.is_zero() {
                    let mut scaled = alloc::vec![Poly::zero(self.nvars); k];
                    vec_add_scaled(&mut scaled, cert_row, b);
                    for (r, s) in row.iter_mut().zip(&scaled) {
                        *r = r.sub(s);
                    }
                }
            }
            rows.push(row);
        }

        rows.retain(|row| row.iter().any(|p| !p.is_zero()));
        rows.sort_by(|a, b| {
            let da: Vec<_> = a.iter().map(|p| p.display(self.order)).collect();
            let db: Vec<_> = b.iter().map(|p| p.display(self.order)).collect();
            da.cmp(&db)
        });
        rows.dedup();
        let module = SyzygyModule { generators: rows };
        debug_assert!(module.verify(&self.gens, self.nvars));
        module
    }

    /// Transcripts must reproduce basis elements exactly, and all
    /// S-polynomials of the basis must reduce to zero (Buchberger
    /// criterion).
    pub fn verify_certificates(&self) -> bool {
        for (b, row) in self.basis.iter().zip(&self.certs) {
            let mut acc = Poly::zero(self.nvars);
            for (a, g) in row.iter().zip(&self.gens) {
                acc = acc.add(&a.mul(g));
            }
            if &acc != b {
                return false;
            }
        }
        for (g, row) in self.gens.iter().zip(&self.gens_in_basis) {
            let mut acc = Poly::zero(self.nvars);
            for (a, b) in row.iter().zip(&self.basis) {
                acc = acc.add(&a.mul(b));
            }
            if &acc != g {
                return false;
            }
        }
        for i in 0..self.basis.len() {
            for j in (i + 1)..self.basis.len() {
                let (ei, ci) = self.basis[i].leading_term(self.order).unwrap();
                let (ej, cj) = self.basis[j].leading_term(self.order).unwrap();
                let l = exp_lcm(ei, ej);
                let s = self.basis[i]
                    .mul_term(&exp_sub(&l, ei), &(Scalar::one() / ci.clone()))
                    .sub(&self.basis[j].mul_term(&exp_sub(&l, ej), &(Scalar::one() / cj.clone())));
                if !self.normal_form(&s).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    /// Rebuilds an ideal from cached data, revalidating the transcripts.
    pub fn from_cached(
        gens: Vec<Poly>,
        order: MonomialOrder,
        basis: Vec<Poly>,
        certs: Vec<Vec<Poly>>,
        gens_in_basis: Vec<Vec<Poly>>,
    ) -> Result<PolyIdeal, Error> {
        let nvars = gens.first().map(|p| p.nvars()).unwrap_or(0);
        let ideal = PolyIdeal {
            gens,
            order,
            basis,
            certs,
            gens_in_basis,
            nvars,
        };
        if !ideal.verify_certificates() {
            return Err(Error::InvariantViolation(alloc::string::String::from(
                "cached Groebner data fails certificate verification",
            )));
        }
        Ok(ideal)
    }
}

/// Buchberger's algorithm with division transcripts. Deterministic for a
/// fixed order and input: pairs are processed in creation order and
/// reductions try divisors in index order.
pub fn buchberger(gens: &[Poly], order: MonomialOrder) -> Result<PolyIdeal, Error> {
    let nvars = gens.first().map(|p| p.nvars()).unwrap_or(0);
    let k = gens.len();
    let mut basis: Vec<Poly> = Vec::new();
    let mut certs: Vec<Vec<Poly>> = Vec::new();

    fn insert(
        basis: &mut Vec<Poly>,
        certs: &mut Vec<Vec<Poly>>,
        order: MonomialOrder,
        p: Poly,
        cert: Vec<Poly>,
    ) {
        let (factor, prim) = p.primitive_part(order);
        let inv = Scalar::one() / factor;
        basis.push(prim);
        certs.push(cert.iter().map(|c| c.scale(&inv)).collect());
    }

    // seed with the (reduced) generators
    for (i, g) in gens.iter().enumerate() {
        if g.is_zero() {
            continue;
        }
        let (quots, rem) = division(g, &basis, order);
        if rem.is_zero() {
            continue;
        }
        let mut cert = alloc::vec![Poly::zero(nvars); k];
        cert[i] = Poly::one(nvars);
        for (q, row) in quots.iter().zip(certs.clone()) {
            if !q.is_zero() {
                for (c, r) in cert.iter_mut().zip(&row) {
                    *c = c.sub(&r.mul(q));
                }
            }
        }
        insert(&mut basis, &mut certs, order, rem, cert);
    }

    // pair loop
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for i in 0..basis.len() {
        for j in (i + 1)..basis.len() {
            pairs.push((i, j));
        }
    }
    let mut next = 0;
    while next < pairs.len() {
        let (i, j) = pairs[next];
        next += 1;
        let (ei, ci) = {
            let (e, c) = basis[i].leading_term(order).unwrap();
            (e.clone(), c.clone())
        };
        let (ej, cj) = {
            let (e, c) = basis[j].leading_term(order).unwrap();
            (e.clone(), c.clone())
        };
        // product criterion: coprime leading monomials reduce to zero
        if ei.iter().zip(&ej).all(|(a, b)| *a == 0 || *b == 0) {
            continue;
        }
        let l = exp_lcm(&ei, &ej);
        let s = basis[i]
            .mul_term(&exp_sub(&l, &ei), &(Scalar::one() / ci.clone()))
            .sub(&basis[j].mul_term(&exp_sub(&l, &ej), &(Scalar::one() / cj.clone())));
        let (quots, rem) = division(&s, &basis, order);
        if rem.is_zero() {
            continue;
        }
        // transcript of the S-polynomial minus its reduction
        let mut cert = alloc::vec![Poly::zero(nvars); k];
        let ti = (exp_sub(&l, &ei), Scalar::one() / ci);
        let tj = (exp_sub(&l, &ej), Scalar::one() / cj);
        for (c, r) in cert.iter_mut().zip(&certs[i]) {
            *c = c.add(&r.mul_term(&ti.0, &ti.1));
        }
        for (c, r) in cert.iter_mut().zip(&certs[j]) {
            *c = c.sub(&r.mul_term(&tj.0, &tj.1));
        }
        for (q, row) in quots.iter().zip(certs.clone()) {
            if !q.is_zero() {
                for (c, r) in cert.iter_mut().zip(&row) {
                    *c = c.sub(&r.mul(q));
                }
            }
        }
        let new_idx = basis.len();
        insert(&mut basis, &mut certs, order, rem, cert);
        for t in 0..new_idx {
            pairs.push((t, new_idx));
        }
    }

    // inter-reduce to the reduced basis
    loop {
        let mut changed = false;
        let mut idx = 0;
        while idx < basis.len() {
            let p = basis[idx].clone();
            let others: Vec<Poly> = basis
                .iter()
                .enumerate()
                .filter(|(t, _)| *t != idx)
                .map(|(_, b)| b.clone())
                .collect();
            let other_certs: Vec<Vec<Poly>> = certs
                .iter()
                .enumerate()
                .filter(|(t, _)| *t != idx)
                .map(|(_, c)| c.clone())
                .collect();
            let (quots, rem) = division(&p, &others, order);
            if rem == p {
                idx += 1;
                continue;
            }
            changed = true;
            if rem.is_zero() {
                basis.remove(idx);
                certs.remove(idx);
                continue;
            }
            let mut cert = certs[idx].clone();
            for (q, row) in quots.iter().zip(&other_certs) {
                if !q.is_zero() {
                    for (c, r) in cert.iter_mut().zip(row) {
                        *c = c.sub(&r.mul(q));
                    }
                }
            }
            let (factor, prim) = rem.primitive_part(order);
            let inv = Scalar::one() / factor;
            basis[idx] = prim;
            certs[idx] = cert.iter().map(|c| c.scale(&inv)).collect();
            idx += 1;
        }
        if !changed {
            break;
        }
    }

    // deterministic presentation: ascending leading monomials
    let mut perm: Vec<usize> = (0..basis.len()).collect();
    perm.sort_by(|&a, &b| {
        let ea = basis[a].leading_term(order).unwrap().0;
        let eb = basis[b].leading_term(order).unwrap().0;
        order.cmp(ea, eb)
    });
    let basis: Vec<Poly> = perm.iter().map(|&i| basis[i].clone()).collect();
    let certs: Vec<Vec<Poly>> = perm.iter().map(|&i| certs[i].clone()).collect();

    // transcripts for the original generators over the final basis
    let mut gens_in_basis = Vec::with_capacity(k);
    for g in gens {
        let (quots, rem) = division(g, &basis, order);
        if !rem.is_zero() {
            return Err(Error::InvariantViolation(alloc::format!(
                "generator does not reduce to zero over its own basis: residual {}",
                rem.display(order)
            )));
        }
        gens_in_basis.push(quots);
    }

    let ideal = PolyIdeal {
        gens: gens.to_vec(),
        order,
        basis,
        certs,
        gens_in_basis,
        nvars,
    };
    debug_assert!(ideal.verify_certificates());
    Ok(ideal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{angular_momenta, mu_poly};
    use crate::scalar::s_int;

    fn pvar(nvars: usize, i: usize) -> Poly {
        Poly::variable(nvars, i)
    }

    #[test]
    fn principal_ideal_basis_is_generator() {
        let ideal = buchberger(&[mu_poly()], MonomialOrder::DegRevLex).unwrap();
        assert_eq!(ideal.basis().len(), 1);
        // up to the positive-leading-coefficient normalization
        let b = &ideal.basis()[0];
        assert!(b == &mu_poly() || b == &mu_poly().neg());
        assert!(ideal.verify_certificates());
        let grlex = buchberger(&[mu_poly()], MonomialOrder::GrLex).unwrap();
        assert_eq!(grlex.basis()[0], mu_poly());
    }

    #[test]
    fn x1_y1_already_a_basis() {
        let x1 = pvar(4, 0);
        let y1 = pvar(4, 2);
        let ideal = buchberger(&[x1.clone(), y1.clone()], MonomialOrder::DegRevLex).unwrap();
        assert_eq!(ideal.basis().len(), 2);
        assert!(ideal.contains_poly(&x1.mul(&y1)));
        assert!(!ideal.contains_poly(&pvar(4, 1)));
    }

    #[test]
    fn normal_form_examples() {
        let ideal = buchberger(&[mu_poly()], MonomialOrder::GrLex).unwrap();
        // NF(mu) = 0: membership
        assert!(ideal.normal_form(&mu_poly()).is_zero());
        // NF(x1 y2) = x2 y1 under graded lex (x1 y2 is the leading term)
        let x1y2 = pvar(4, 0).mul(&pvar(4, 3));
        let x2y1 = pvar(4, 1).mul(&pvar(4, 2));
        assert_eq!(ideal.normal_form(&x1y2), x2y1);
        // units stay put
        let one = Poly::one(4);
        assert_eq!(ideal.normal_form(&one), one);
    }

    #[test]
    fn lift_certificates() {
        let ideal = buchberger(&[mu_poly()], MonomialOrder::DegRevLex).unwrap();
        // mu * x1 lifts to (x1)
        let f = mu_poly().mul(&pvar(4, 0));
        let cert = ideal.lift_certificate(&f).unwrap();
        assert_eq!(cert.len(), 1);
        assert_eq!(cert[0], pvar(4, 0));
        // 1 is not in the proper ideal
        assert!(ideal.lift_certificate(&Poly::one(4)).is_none());
        // 0 lifts trivially
        let zero_cert = ideal.lift_certificate(&Poly::zero(4)).unwrap();
        assert!(zero_cert[0].is_zero());
    }

    #[test]
    fn nf_is_linear_and_idempotent() {
        let x1 = pvar(4, 0);
        let y1 = pvar(4, 2);
        let ideal = buchberger(&[x1.mul(&x1), y1.clone()], MonomialOrder::DegRevLex).unwrap();
        let f = x1.mul(&x1).mul(&y1).add(&x1.scale(&s_int(3)));
        let g = y1.mul(&y1).add(&Poly::one(4));
        let nf_sum = ideal.normal_form(&f.add(&g));
        let sum_nf = ideal.normal_form(&ideal.normal_form(&f).add(&ideal.normal_form(&g)));
        assert_eq!(nf_sum, sum_nf);
        assert_eq!(
            ideal.normal_form(&ideal.normal_form(&f)),
            ideal.normal_form(&f)
        );
    }

    #[test]
    fn syzygies_of_x_y() {
        let x1 = pvar(4, 0);
        let y1 = pvar(4, 2);
        let ideal = buchberger(&[x1.clone(), y1.clone()], MonomialOrder::DegRevLex).unwrap();
        let syz = ideal.syzygies();
        assert!(syz.verify(ideal.gens(), 4));
        assert!(!syz.generators.is_empty());
        // the Koszul relation (y, -x) must be among the generators up to sign
        let koszul = alloc::vec![y1.clone(), x1.neg()];
        let found = syz
            .generators
            .iter()
            .any(|row| row == &koszul || (row[0] == y1.neg() && row[1] == x1));
        assert!(found, "missing Koszul syzygy in {:?}", syz.generators);
    }

    #[test]
    fn regular_element_has_no_syzygies() {
        let ideal = buchberger(&[mu_poly()], MonomialOrder::DegRevLex).unwrap();
        let syz = ideal.syzygies();
        assert!(syz.generators.is_empty(), "got {:?}", syz.generators);
    }

    #[test]
    fn zero_ideal() {
        let ideal = buchberger(&[], MonomialOrder::DegRevLex).unwrap();
        assert!(ideal.is_zero_ideal());
        let ideal2 = buchberger(&[Poly::zero(4)], MonomialOrder::DegRevLex).unwrap();
        assert!(ideal2.is_zero_ideal());
        assert!(!ideal2.contains_poly(&Poly::one(4)));
        assert_eq!(ideal2.normal_form(&mu_poly()), mu_poly());
    }

    #[test]
    fn angular_momentum_syzygies() {
        let gens = angular_momenta();
        let ideal = buchberger(&gens, MonomialOrder::DegRevLex).unwrap();
        assert!(ideal.verify_certificates());
        let syz = ideal.syzygies();
        assert!(syz.verify(&gens, 6));
        // Σ x_i mu_i = 0 and Σ y_i mu_i = 0 are annihilators
        let v = |i: usize| Poly::variable(6, i);
        let xs = SyzygyModule {
            generators: alloc::vec![alloc::vec![v(0), v(1), v(2)]],
        };
        assert!(xs.verify(&gens, 6));
        let ys = SyzygyModule {
            generators: alloc::vec![alloc::vec![v(3), v(4), v(5)]],
        };
        assert!(ys.verify(&gens, 6));
        assert!(!syz.generators.is_empty());
    }
}
