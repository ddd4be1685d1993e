//! The built-in property suite: Jacobi, Leibniz, filtration bounds,
//! homotopy identity, PBW confluence, semiclassical limit, and a cache
//! integrity negative test, all at fixed seeds.

use bfvkit_core::element::Element;
use bfvkit_core::generators::GeneratorTable;
use bfvkit_core::groebner::buchberger;
use bfvkit_core::poisson::{bracket, filtration_bound, jacobiator};
use bfvkit_core::poly::{MonomialOrder, Poly};
use bfvkit_core::quantize::{normal_order_with, q_map, qbracket_over_hbar, qmul, RewriteStrategy};
use bfvkit_core::scalar::HbarPoly;
use bfvkit_core::tate::{koszul_init, tate_extend, Homotopy, Resolution, SliceBounds};

use crate::cache::{read_verified, write_sealed, CacheRead};
use crate::sample::Sampler;

pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn sign_of(d1: i64, d2: i64) -> bfvkit_core::scalar::Scalar {
    if (d1 * d2).rem_euclid(2) == 0 {
        bfvkit_core::scalar::s_int(1)
    } else {
        bfvkit_core::scalar::s_int(-1)
    }
}

fn test_table() -> GeneratorTable {
    let mut t = GeneratorTable::new(2);
    t.add_ghost(1);
    t.add_ghost(1);
    t.add_ghost(2);
    t
}

fn plane_rotation() -> Resolution {
    let v = |i: usize| Poly::variable(4, i);
    let mu = v(0).mul(&v(3)).sub(&v(1).mul(&v(2)));
    let ideal = buchberger(&[mu], MonomialOrder::DegRevLex).unwrap();
    let mut res = koszul_init(ideal);
    for level in 2..=3 {
        tate_extend(&mut res, level, SliceBounds::new(6, 4)).unwrap();
    }
    res
}

fn so3() -> Resolution {
    let v = |i: usize| Poly::variable(6, i);
    let mu1 = v(1).mul(&v(5)).sub(&v(2).mul(&v(4)));
    let mu2 = v(2).mul(&v(3)).sub(&v(0).mul(&v(5)));
    let mu3 = v(0).mul(&v(4)).sub(&v(1).mul(&v(3)));
    let ideal = buchberger(&[mu1, mu2, mu3], MonomialOrder::DegRevLex).unwrap();
    let mut res = koszul_init(ideal);
    for level in 2..=3 {
        tate_extend(&mut res, level, SliceBounds::new(4, 4)).unwrap();
    }
    res
}

fn widen(e: &Element, trunc: u32) -> Element {
    let mut out = Element::zero(trunc);
    for (m, c) in e.iter() {
        out.add_term(m.clone(), c.clone());
    }
    out
}

fn check_jacobi_leibniz(sampler: &mut Sampler, iterations: usize) -> Result<(), String> {
    let table = test_table();
    for i in 0..iterations {
        // identities of nested operations hold on exact representatives
        let a = widen(&sampler.homogeneous(&table, 6), 64);
        let b = widen(&sampler.homogeneous(&table, 6), 64);
        let c = widen(&sampler.homogeneous(&table, 6), 64);
        let jac = jacobiator(&a, &b, &c).map_err(|e| e.to_string())?;
        if !jac.is_zero() {
            return Err(format!("Jacobi fails at sample {}", i));
        }
        let (da, db) = (
            a.homogeneous_degree().unwrap(),
            b.homogeneous_degree().unwrap(),
        );
        let lhs = bracket(&a, &b.mul(&c));
        let rhs = bracket(&a, &b)
            .mul(&c)
            .add(&b.mul(&bracket(&a, &c)).scale(&sign_of(da, db)));
        if lhs != rhs {
            return Err(format!("Leibniz fails at sample {}", i));
        }
        // graded skew-symmetry
        if bracket(&a, &b) != bracket(&b, &a).scale(&sign_of(da, db)).neg() {
            return Err(format!("skew-symmetry fails at sample {}", i));
        }
    }
    Ok(())
}

fn check_filtration_bounds(sampler: &mut Sampler, iterations: usize) -> Result<(), String> {
    let table = test_table();
    let mut checked = 0usize;
    let mut tries = 0usize;
    while checked < iterations && tries < iterations * 20 {
        tries += 1;
        let a = sampler.homogeneous(&table, 8);
        let b = sampler.homogeneous(&table, 8);
        let (Some(da), Some(db)) = (a.homogeneous_degree(), b.homogeneous_degree()) else {
            continue;
        };
        let (Some(p), Some(q)) = (a.min_weight(), b.min_weight()) else {
            continue;
        };
        let br = bracket(&a, &b);
        if let Some(w) = br.min_weight() {
            let bound = filtration_bound(da, db, p as i64, q as i64);
            if (w as i64) < bound {
                return Err(format!(
                    "weight {} below bound {} for degrees ({},{}), weights ({},{})",
                    w, bound, da, db, p, q
                ));
            }
            checked += 1;
        }
    }
    if checked < iterations {
        return Err(format!(
            "only {} of {} samples produced nonzero brackets",
            checked, iterations
        ));
    }
    Ok(())
}

fn check_homotopy_identity(sampler: &mut Sampler, iterations: usize) -> Result<(), String> {
    for (name, res, poly_cap) in [("plane-rotation", plane_rotation(), 8), ("so3", so3(), 8)] {
        let mut homotopy = Homotopy::new(&res, SliceBounds::new(poly_cap, 6));
        for i in 0..iterations {
            let a = sample_slice_element(sampler, &res, 6);
            let s_a = homotopy.apply(&a).map_err(|e| format!("{}: {}", name, e))?;
            let d_s = res.delta_extended(&s_a);
            let s_d = homotopy
                .apply(&res.delta_extended(&a))
                .map_err(|e| format!("{}: {}", name, e))?;
            let lhs = d_s.add(&s_d);
            let rhs = a.sub(&res.pibar(&a));
            if lhs != rhs {
                return Err(format!("{}: homotopy identity fails at sample {}", name, i));
            }
        }
    }
    Ok(())
}

/// Random element whose monomials stay inside comfortable slice bounds:
/// low polynomial degree, and a T-part shallow enough that the homotopy
/// recursion never needs ghosts below the constructed depth.
fn sample_slice_element(sampler: &mut Sampler, res: &Resolution, trunc: u32) -> Element {
    let table = res.table();
    let depth_floor = -(res.depth() as i64) + 1;
    let mut e = Element::zero(trunc);
    for _ in 0..2 {
        if let Some((sign, m)) = sampler.monomial(table, 4) {
            let (_, t_part) = m.split_anti();
            if m.poly_degree() <= 3 && m.weight() < trunc && t_part.degree() >= depth_floor {
                let mut c = sampler.rational();
                if sign < 0 {
                    c = -c;
                }
                e.add_term(m, c);
            }
        }
    }
    e
}

fn check_pbw_confluence(sampler: &mut Sampler, iterations: usize) -> Result<(), String> {
    let table = test_table();
    for i in 0..iterations {
        let word = sampler.word(&table, 8);
        let left = normal_order_with(&word, HbarPoly::one(), 6, 5, RewriteStrategy::Leftmost);
        let right = normal_order_with(&word, HbarPoly::one(), 6, 5, RewriteStrategy::Rightmost);
        if left != right {
            return Err(format!("confluence fails at sample {} on {:?}", i, word));
        }
    }
    Ok(())
}

fn check_semiclassical(sampler: &mut Sampler, iterations: usize) -> Result<(), String> {
    let table = test_table();
    for i in 0..iterations {
        let a = sampler.element(&table, 2, 6);
        let b = sampler.element(&table, 2, 6);
        let qa = q_map(&a, 4);
        let qb = q_map(&b, 4);
        if qmul(&qa, &qb).coefficient(0) != a.mul(&b) {
            return Err(format!("product limit fails at sample {}", i));
        }
        let qbr = qbracket_over_hbar(&qa, &qb).map_err(|e| e.to_string())?;
        if qbr.coefficient(0) != bracket(&a, &b) {
            return Err(format!("bracket limit fails at sample {}", i));
        }
    }
    Ok(())
}

fn check_cache_integrity() -> Result<(), String> {
    let dir = std::env::temp_dir().join(format!("bfvkit-selftest-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let path = dir.join("probe.txt");
    write_sealed(&path, "probe body\n").map_err(|e| e.to_string())?;
    if !matches!(read_verified(&path), CacheRead::Hit(_)) {
        return Err("sealed file failed to verify".into());
    }
    let mut text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
    text.push_str("corruption\n");
    std::fs::write(&path, text).map_err(|e| e.to_string())?;
    let verdict = read_verified(&path);
    std::fs::remove_dir_all(&dir).ok();
    match verdict {
        CacheRead::Corrupt(_) => Ok(()),
        other => Err(format!("corrupted cache file not detected: {:?}", other)),
    }
}

/// Runs the suite. `quick` reduces iteration counts.
pub fn run(seed: u64, quick: bool) -> Vec<CheckResult> {
    let n_alg = if quick { 60 } else { 500 };
    let n_filt = if quick { 40 } else { 200 };
    let n_hom = if quick { 20 } else { 100 };
    let n_pbw = if quick { 80 } else { 500 };
    let n_semi = if quick { 50 } else { 300 };
    let mut results = Vec::new();
    let mut run_check = |name: &str, f: &mut dyn FnMut() -> Result<(), String>| {
        let outcome = f();
        results.push(CheckResult {
            name: name.to_string(),
            passed: outcome.is_ok(),
            detail: match outcome {
                Ok(()) => "ok".into(),
                Err(e) => e,
            },
        });
    };
    run_check("jacobi-leibniz", &mut || {
        check_jacobi_leibniz(&mut Sampler::new(seed), n_alg)
    });
    run_check("filtration-bounds", &mut || {
        check_filtration_bounds(&mut Sampler::new(seed ^ 1), n_filt)
    });
    run_check("homotopy-identity", &mut || {
        check_homotopy_identity(&mut Sampler::new(seed ^ 2), n_hom)
    });
    run_check("pbw-confluence", &mut || {
        check_pbw_confluence(&mut Sampler::new(seed ^ 3), n_pbw)
    });
    run_check("semiclassical-limit", &mut || {
        check_semiclassical(&mut Sampler::new(seed ^ 4), n_semi)
    });
    run_check("cache-integrity", &mut || check_cache_integrity());
    results
}
