//! Disk cache for Gröbner data and Tate resolutions: deterministic text
//! files keyed by content hashes, with an integrity line over the body.

use std::path::{Path, PathBuf};

use bfvkit_core::groebner::{PolyIdeal, SyzygyModule};
use bfvkit_core::poly::{MonomialOrder, Poly};
use bfvkit_core::tate::Resolution;
use sha2::{Digest, Sha256};

pub fn sha256_hex(data: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(data.as_bytes());
    let out = hasher.finalize();
    out.iter().map(|b| format!("{:02x}", b)).collect()
}

pub fn short_hash(data: &str) -> String {
    sha256_hex(data)[..16].to_string()
}

/// Wraps a body with the integrity header; `read_verified` rejects files
/// whose body does not match the recorded hash.
pub fn seal(body: &str) -> String {
    format!("# bfvkit-cache v1 sha256={}\n{}", sha256_hex(body), body)
}

#[derive(Debug, PartialEq, Eq)]
pub enum CacheRead {
    Hit(String),
    Miss,
    Corrupt(PathBuf),
}

pub fn read_verified(path: &Path) -> CacheRead {
    let Ok(text) = std::fs::read_to_string(path) else {
        return CacheRead::Miss;
    };
    let Some((first, body)) = text.split_once('\n') else {
        return CacheRead::Corrupt(path.to_path_buf());
    };
    let Some(recorded) = first.strip_prefix("# bfvkit-cache v1 sha256=") else {
        return CacheRead::Corrupt(path.to_path_buf());
    };
    if sha256_hex(body) != recorded.trim() {
        return CacheRead::Corrupt(path.to_path_buf());
    }
    CacheRead::Hit(body.to_string())
}

pub fn write_sealed(path: &Path, body: &str) -> std::io::Result<()> {
    crate::io::atomic_write(path, &seal(body))
}

fn poly_lines(label: &str, polys: &[Poly], order: MonomialOrder, out: &mut String) {
    for p in polys {
        out.push_str(label);
        out.push_str(": ");
        out.push_str(&p.display(order));
        out.push('\n');
    }
}

/// Serializes the full Gröbner data: generators, basis with transcripts,
/// the generator-over-basis transcripts, and the syzygy module.
pub fn groebner_body(ideal: &PolyIdeal, syzygies: &SyzygyModule) -> String {
    let order = ideal.order();
    let mut s = format!("order: {}\nnvars: {}\n", order.name(), ideal.nvars());
    poly_lines("gen", ideal.gens(), order, &mut s);
    for (b, cert) in ideal.basis().iter().zip(ideal.certs()) {
        s.push_str("basis: ");
        s.push_str(&b.display(order));
        s.push('\n');
        for c in cert {
            s.push_str("  cert: ");
            s.push_str(&c.display(order));
            s.push('\n');
        }
    }
    for row in ideal.gens_in_basis() {
        s.push_str("genexpr:\n");
        for c in row {
            s.push_str("  coeff: ");
            s.push_str(&c.display(order));
            s.push('\n');
        }
    }
    for row in &syzygies.generators {
        s.push_str("syzygy:\n");
        for c in row {
            s.push_str("  coeff: ");
            s.push_str(&c.display(order));
            s.push('\n');
        }
    }
    s
}

pub fn groebner_parse(body: &str, pairs: u32) -> Result<(PolyIdeal, SyzygyModule), String> {
    let mut order = MonomialOrder::DegRevLex;
    let mut gens: Vec<Poly> = Vec::new();
    let mut basis: Vec<Poly> = Vec::new();
    let mut certs: Vec<Vec<Poly>> = Vec::new();
    let mut gens_in_basis: Vec<Vec<Poly>> = Vec::new();
    let mut syzygies: Vec<Vec<Poly>> = Vec::new();
    #[derive(PartialEq)]
    enum Ctx {
        None,
        Basis,
        GenExpr,
        Syzygy,
    }
    let mut ctx = Ctx::None;
    for raw in body.lines() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once(':')
            .ok_or_else(|| format!("bad line `{}`", line))?;
        let value = value.trim();
        match key.trim() {
            "order" => {
                order = MonomialOrder::parse(value)
                    .ok_or_else(|| format!("unknown order `{}`", value))?
            }
            "nvars" => {}
            "gen" => {
                gens.push(parse_poly_text(value, pairs)?);
                ctx = Ctx::None;
            }
            "basis" => {
                basis.push(parse_poly_text(value, pairs)?);
                certs.push(Vec::new());
                ctx = Ctx::Basis;
            }
            "cert" => {
                if ctx != Ctx::Basis {
                    return Err("cert outside basis block".into());
                }
                certs
                    .last_mut()
                    .unwrap()
                    .push(parse_poly_text(value, pairs)?);
            }
            "genexpr" => {
                gens_in_basis.push(Vec::new());
                ctx = Ctx::GenExpr;
            }
            "syzygy" => {
                syzygies.push(Vec::new());
                ctx = Ctx::Syzygy;
            }
            "coeff" => match ctx {
                Ctx::GenExpr => gens_in_basis
                    .last_mut()
                    .unwrap()
                    .push(parse_poly_text(value, pairs)?),
                Ctx::Syzygy => syzygies
                    .last_mut()
                    .unwrap()
                    .push(parse_poly_text(value, pairs)?),
                _ => return Err("coeff outside block".into()),
            },
            other => return Err(format!("unknown cache key `{}`", other)),
        }
    }
    let ideal = PolyIdeal::from_cached(gens, order, basis, certs, gens_in_basis)
        .map_err(|e| e.to_string())?;
    let module = SyzygyModule {
        generators: syzygies,
    };
    if !module.verify(ideal.gens(), ideal.nvars()) {
        return Err("cached syzygies fail verification".into());
    }
    Ok((ideal, module))
}

fn parse_poly_text(text: &str, pairs: u32) -> Result<Poly, String> {
    if text == "0" {
        return Ok(Poly::zero(2 * pairs as usize));
    }
    Poly::parse(text, pairs).ok_or_else(|| format!("bad polynomial `{}`", text))
}

pub fn groebner_cache_path(cache_dir: &Path, fingerprint: &str) -> PathBuf {
    cache_dir.join(format!("gb_{}.txt", short_hash(fingerprint)))
}

pub fn resolution_cache_path(
    cache_dir: &Path,
    fingerprint: &str,
    depth: u32,
    d: u32,
    w: u32,
) -> PathBuf {
    cache_dir.join(format!(
        "tate_{}_n{}_d{}_w{}.txt",
        short_hash(fingerprint),
        depth,
        d,
        w
    ))
}

pub fn resolution_body(res: &Resolution) -> String {
    crate::io::resolution_to_string(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use bfvkit_core::groebner::buchberger;

    #[test]
    fn seal_and_verify() {
        let dir = std::env::temp_dir().join(format!("bfvkit-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("x.txt");
        write_sealed(&path, "hello\n").unwrap();
        assert_eq!(read_verified(&path), CacheRead::Hit("hello\n".into()));
        // corrupt it
        let mut text = std::fs::read_to_string(&path).unwrap();
        text.push_str("tampered\n");
        std::fs::write(&path, text).unwrap();
        assert!(matches!(read_verified(&path), CacheRead::Corrupt(_)));
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn groebner_roundtrip() {
        let v = |i: usize| Poly::variable(4, i);
        let mu = v(0).mul(&v(3)).sub(&v(1).mul(&v(2)));
        let gens = vec![mu, v(0).mul(&v(0))];
        let ideal = buchberger(&gens, MonomialOrder::DegRevLex).unwrap();
        let syz = ideal.syzygies();
        let body = groebner_body(&ideal, &syz);
        let (ideal2, syz2) = groebner_parse(&body, 2).unwrap();
        assert_eq!(ideal2.basis(), ideal.basis());
        assert_eq!(syz2, syz);
        assert_eq!(groebner_body(&ideal2, &syz2), body);
    }
}
