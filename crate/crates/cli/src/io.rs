//! Deterministic text file formats for elements, charges, gauge
//! equivalences, quantum elements, and resolutions. Writes are atomic
//! (write to a temp file, then rename).

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use bfvkit_core::brst::{Charge, ChargeStep};
use bfvkit_core::element::Element;
use bfvkit_core::gauge::GaugeEquivalence;
use bfvkit_core::generators::{GenId, GeneratorTable};
use bfvkit_core::groebner::PolyIdeal;
use bfvkit_core::quantize::QElement;
use bfvkit_core::tate::{AcyclicityRecord, Resolution, SliceBounds, EXACT_TRUNC};

pub fn atomic_write(path: &Path, content: &str) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension("tmp");
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(content.as_bytes())?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)
}

fn element_body(e: &Element) -> String {
    let mut s = String::new();
    for line in e.to_lines() {
        s.push_str(&line);
        s.push('\n');
    }
    s
}

pub fn element_to_string(e: &Element, table: &GeneratorTable) -> String {
    let mut s = String::from("# bfvkit element v1\n");
    s.push_str(&format!("table: {}\n", table.summary()));
    s.push_str(&format!("trunc: {}\n", e.trunc()));
    s.push_str(&element_body(e));
    s
}

pub struct Parsed<T> {
    pub value: T,
    pub table: GeneratorTable,
}

fn parse_header<'a>(
    lines: &mut impl Iterator<Item = &'a str>,
    expect: &str,
) -> Result<(GeneratorTable, BTreeMap<String, String>), String> {
    let mut table = None;
    let mut fields = BTreeMap::new();
    let mut first = true;
    for raw in lines {
        let line = raw.trim();
        if first {
            first = false;
            if !line.starts_with(expect) {
                return Err(format!("expected header `{}`, found `{}`", expect, line));
            }
            continue;
        }
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once(':') else {
            return Err(format!("bad header line `{}`", line));
        };
        let key = key.trim();
        let value = value.trim();
        if key == "table" {
            table = Some(
                GeneratorTable::parse_summary(value)
                    .ok_or_else(|| format!("bad table summary `{}`", value))?,
            );
        } else {
            fields.insert(key.to_string(), value.to_string());
        }
        if key == "end-header" {
            break;
        }
    }
    let table = table.ok_or("missing `table:` line")?;
    Ok((table, fields))
}

pub fn element_from_string(text: &str) -> Result<Parsed<Element>, String> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines
        .by_ref()
        .take_while(|l| {
            !l.trim().is_empty()
                && !l
                    .trim_start()
                    .starts_with(|c: char| c.is_ascii_digit() || c == '-')
        })
        .collect();
    let (table, fields) = parse_header(&mut header.iter().copied(), "# bfvkit element")?;
    let trunc: u32 = fields
        .get("trunc")
        .ok_or("missing trunc")?
        .parse()
        .map_err(|_| "bad trunc".to_string())?;
    let mut e = Element::zero(trunc);
    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.contains(':') {
            continue;
        }
        e.add_term_line(line, &table)
            .map_err(|err| err.to_string())?;
    }
    Ok(Parsed { value: e, table })
}

/// Accepts either an element file or a charge file and returns the element.
pub fn element_or_charge_from_string(text: &str) -> Result<Parsed<Element>, String> {
    if text.starts_with("# bfvkit charge") {
        let parsed = charge_from_string(text)?;
        return Ok(Parsed {
            value: parsed.value.element,
            table: parsed.table,
        });
    }
    element_from_string(text)
}

pub fn charge_to_string(charge: &Charge, table: &GeneratorTable) -> String {
    let mut s = String::from("# bfvkit charge v1\n");
    s.push_str(&format!("table: {}\n", table.summary()));
    s.push_str(&format!("trunc: {}\n", charge.trunc));
    s.push_str(&format!("steps: {}\n", charge.steps.len()));
    for step in &charge.steps {
        s.push_str(&format!(
            "step: index={} residual_weight={} terms={} pivots={:016x}\n",
            step.index,
            step.residual_weight
                .map(|w| w.to_string())
                .unwrap_or_else(|| "-".into()),
            step.terms,
            step.pivot_digest
        ));
    }
    s.push_str(&format!(
        "residual: {}\n",
        if charge.residual.is_zero() {
            "0"
        } else {
            "nonzero"
        }
    ));
    s.push_str(&element_body(&charge.element));
    s
}

pub fn charge_from_string(text: &str) -> Result<Parsed<Charge>, String> {
    let header: Vec<&str> = text
        .lines()
        .filter(|l| l.contains(':') || l.starts_with('#'))
        .collect();
    let (table, fields) = parse_header(&mut header.iter().copied(), "# bfvkit charge")?;
    let trunc: u32 = fields
        .get("trunc")
        .ok_or("missing trunc")?
        .parse()
        .map_err(|_| "bad trunc".to_string())?;
    let mut element = Element::zero(trunc);
    let mut steps = Vec::new();
    for raw in text.lines() {
        let line = raw.trim();
        if let Some(body) = line.strip_prefix("step:") {
            let mut index = 0u32;
            let mut residual_weight = None;
            let mut terms = 0usize;
            let mut pivot_digest = 0u64;
            for field in body.split_whitespace() {
                let Some((k, v)) = field.split_once('=') else {
                    continue;
                };
                match k {
                    "index" => index = v.parse().map_err(|_| "bad step index")?,
                    "residual_weight" => {
                        residual_weight = if v == "-" {
                            None
                        } else {
                            Some(v.parse().map_err(|_| "bad weight")?)
                        }
                    }
                    "terms" => terms = v.parse().map_err(|_| "bad terms")?,
                    "pivots" => {
                        pivot_digest = u64::from_str_radix(v, 16).map_err(|_| "bad digest")?
                    }
                    _ => {}
                }
            }
            steps.push(ChargeStep {
                index,
                residual_weight,
                terms,
                pivot_digest,
            });
            continue;
        }
        if line.is_empty() || line.starts_with('#') || line.contains(':') {
            continue;
        }
        element
            .add_term_line(line, &table)
            .map_err(|e| e.to_string())?;
    }
    let residual = bfvkit_core::brst::cme_check(&element, trunc);
    Ok(Parsed {
        value: Charge {
            element,
            trunc,
            steps,
            residual,
        },
        table,
    })
}

pub fn equivalence_to_string(eq: &GaugeEquivalence, table: &GeneratorTable) -> String {
    let mut s = String::from("# bfvkit gauge equivalence v1\n");
    s.push_str(&format!("table: {}\n", table.summary()));
    s.push_str(&format!("trunc: {}\n", eq.trunc));
    s.push_str(&format!("generators: {}\n", eq.generators.len()));
    for g in &eq.generators {
        s.push_str("[generator]\n");
        s.push_str(&element_body(g));
    }
    s
}

pub fn equivalence_from_string(text: &str) -> Result<Parsed<GaugeEquivalence>, String> {
    let header: Vec<&str> = text
        .lines()
        .take_while(|l| !l.trim().starts_with("[generator]"))
        .collect();
    let (table, fields) = parse_header(&mut header.iter().copied(), "# bfvkit gauge equivalence")?;
    let trunc: u32 = fields
        .get("trunc")
        .ok_or("missing trunc")?
        .parse()
        .map_err(|_| "bad trunc")?;
    let mut generators = Vec::new();
    let mut current: Option<Element> = None;
    for raw in text.lines() {
        let line = raw.trim();
        if line == "[generator]" {
            if let Some(e) = current.take() {
                generators.push(e);
            }
            current = Some(Element::zero(trunc));
            continue;
        }
        if line.is_empty() || line.starts_with('#') || line.contains(':') {
            continue;
        }
        if let Some(e) = current.as_mut() {
            e.add_term_line(line, &table)
                .map_err(|err| err.to_string())?;
        }
    }
    if let Some(e) = current.take() {
        generators.push(e);
    }
    Ok(Parsed {
        value: GaugeEquivalence { generators, trunc },
        table,
    })
}

pub fn qelement_to_string(q: &QElement, table: &GeneratorTable) -> String {
    let mut s = String::from("# bfvkit qelement v1\n");
    s.push_str(&format!("table: {}\n", table.summary()));
    s.push_str(&format!("trunc: {}\n", q.trunc()));
    s.push_str(&format!("hbar: {}\n", q.hbar_trunc()));
    for line in q.to_lines() {
        s.push_str(&line);
        s.push('\n');
    }
    s
}

pub fn qelement_from_string(text: &str) -> Result<Parsed<QElement>, String> {
    let header: Vec<&str> = text
        .lines()
        .filter(|l| l.contains(':') || l.starts_with('#'))
        .collect();
    let (table, fields) = parse_header(&mut header.iter().copied(), "# bfvkit qelement")?;
    let trunc: u32 = fields
        .get("trunc")
        .ok_or("missing trunc")?
        .parse()
        .map_err(|_| "bad trunc")?;
    let hbar: u32 = fields
        .get("hbar")
        .ok_or("missing hbar")?
        .parse()
        .map_err(|_| "bad hbar")?;
    let mut q = QElement::zero(trunc, hbar);
    for raw in text.lines() {
        let line = raw.trim();
        if !line.starts_with("h^") {
            continue;
        }
        q.add_term_line(line, &table).map_err(|e| e.to_string())?;
    }
    Ok(Parsed { value: q, table })
}

pub fn resolution_to_string(res: &Resolution) -> String {
    let mut s = String::from("# bfvkit resolution v1\n");
    s.push_str(&format!("table: {}\n", res.table().summary()));
    s.push_str(&format!("depth: {}\n", res.depth()));
    for g in res.table().ghost_iter() {
        let image = res.delta_image(&g).expect("ghost image");
        let body = image.to_lines().join(" ; ");
        s.push_str(&format!(
            "delta {} = {}\n",
            g.name(),
            if body.is_empty() { "0" } else { &body }
        ));
    }
    for rec in res.ledger() {
        s.push_str(&format!(
            "verified: degree={} d={} w={} new={}\n",
            rec.degree, rec.bounds.poly_degree, rec.bounds.word_length, rec.new_generators
        ));
    }
    s
}

/// Rebuilds a resolution from its serialization plus the Gröbner data of
/// the ideal. The δ-images are revalidated (δ² = 0) on load.
pub fn resolution_from_string(text: &str, ideal: PolyIdeal) -> Result<Resolution, String> {
    let header: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with('#') || l.starts_with("table:") || l.starts_with("depth:"))
        .collect();
    let (table, fields) = parse_header(&mut header.iter().copied(), "# bfvkit resolution")?;
    let depth: u32 = fields
        .get("depth")
        .ok_or("missing depth")?
        .parse()
        .map_err(|_| "bad depth")?;
    let mut images = BTreeMap::new();
    let mut ledger: Vec<AcyclicityRecord> = Vec::new();
    for raw in text.lines() {
        let line = raw.trim();
        if let Some(body) = line.strip_prefix("verified:") {
            let mut degree = 0i64;
            let mut d = 0u32;
            let mut w = 0u32;
            let mut new = 0u32;
            for field in body.split_whitespace() {
                let Some((k, v)) = field.split_once('=') else {
                    continue;
                };
                match k {
                    "degree" => degree = v.parse().map_err(|_| "bad ledger degree")?,
                    "d" => d = v.parse().map_err(|_| "bad ledger d")?,
                    "w" => w = v.parse().map_err(|_| "bad ledger w")?,
                    "new" => new = v.parse().map_err(|_| "bad ledger new")?,
                    _ => {}
                }
            }
            ledger.push(AcyclicityRecord {
                degree,
                bounds: SliceBounds::new(d, w),
                new_generators: new,
            });
            continue;
        }
        let Some(body) = line.strip_prefix("delta ") else {
            continue;
        };
        let Some((name, terms)) = body.split_once('=') else {
            return Err(format!("bad delta line `{}`", line));
        };
        let ghost = GenId::parse(name.trim()).ok_or_else(|| format!("bad ghost `{}`", name))?;
        let mut e = Element::zero(EXACT_TRUNC);
        let terms = terms.trim();
        if terms != "0" {
            for part in terms.split(';') {
                e.add_term_line(part.trim(), &table)
                    .map_err(|err| err.to_string())?;
            }
        }
        images.insert(ghost, e);
    }
    let mut res = Resolution::from_parts(table, ideal, images, depth).map_err(|e| e.to_string())?;
    res.restore_ledger(ledger);
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use bfvkit_core::scalar::s_ratio;

    fn table() -> GeneratorTable {
        let mut t = GeneratorTable::new(2);
        t.add_ghost(1);
        t
    }

    #[test]
    fn element_roundtrip() {
        let t = table();
        let e1 = GenId::Ghost { level: 1, index: 0 };
        let mut e = Element::generator(e1, 5).scale(&s_ratio(-2, 3));
        e = e.add(&Element::one(5));
        let text = element_to_string(&e, &t);
        let parsed = element_from_string(&text).unwrap();
        assert_eq!(parsed.value, e);
        assert_eq!(parsed.table, t);
    }

    #[test]
    fn qelement_roundtrip() {
        let t = table();
        let e = Element::generator(GenId::X(0), 5);
        let q = bfvkit_core::quantize::q_map(&e, 3).shift_hbar(2);
        let text = qelement_to_string(&q, &t);
        let parsed = qelement_from_string(&text).unwrap();
        assert_eq!(parsed.value, q);
    }

    #[test]
    fn equivalence_roundtrip() {
        let t = table();
        let eq = GaugeEquivalence {
            generators: vec![Element::one(4), Element::generator(GenId::X(0), 4)],
            trunc: 4,
        };
        let text = equivalence_to_string(&eq, &t);
        let parsed = equivalence_from_string(&text).unwrap();
        assert_eq!(parsed.value.generators, eq.generators);
    }
}
