//! Model specification files: line-oriented text with sections
//! `[variables]`, `[constraints]`, `[bounds]`, `[observables]`,
//! `[pipeline]`.

use std::path::Path;

use bfvkit_core::poly::{MonomialOrder, Poly};

use crate::exprs::{parse_poly, ParseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Groebner,
    Tate,
    Charge,
    Cohomology,
    Quantize,
}

impl Stage {
    pub fn name(&self) -> &'static str {
        match self {
            Stage::Groebner => "groebner",
            Stage::Tate => "tate",
            Stage::Charge => "charge",
            Stage::Cohomology => "cohomology",
            Stage::Quantize => "quantize",
        }
    }

    fn parse(s: &str) -> Option<Stage> {
        match s {
            "groebner" => Some(Stage::Groebner),
            "tate" => Some(Stage::Tate),
            "charge" => Some(Stage::Charge),
            "cohomology" => Some(Stage::Cohomology),
            "quantize" => Some(Stage::Quantize),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub name: String,
    pub pairs: u32,
    pub constraints: Vec<Poly>,
    pub constraint_texts: Vec<String>,
    pub order: MonomialOrder,
    /// Filtration truncation N (≥ 2).
    pub trunc: u32,
    /// Polynomial degree bound D for slices.
    pub poly_degree: u32,
    /// Ghost word length bound W.
    pub word_length: u32,
    /// ħ truncation K (≥ 1).
    pub hbar_trunc: u32,
    pub observables: Vec<Poly>,
    pub observable_texts: Vec<String>,
    pub pipeline: Vec<Stage>,
}

impl ModelSpec {
    pub fn parse(text: &str, name: &str) -> Result<ModelSpec, ParseError> {
        let mut pairs: Option<u32> = None;
        let mut constraints: Vec<(String, usize)> = Vec::new();
        let mut observables: Vec<(String, usize)> = Vec::new();
        let mut order = MonomialOrder::DegRevLex;
        let mut trunc = 4u32;
        let mut poly_degree = 8u32;
        let mut word_length = 5u32;
        let mut hbar_trunc = 3u32;
        let mut pipeline: Vec<Stage> = Vec::new();
        let mut section = String::new();

        let err = |line: usize, col: usize, msg: String| ParseError {
            line,
            column: col,
            message: msg,
        };

        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(body) = line.strip_prefix('[') {
                let Some(name) = body.strip_suffix(']') else {
                    return Err(err(lineno, 1, "unterminated section header".into()));
                };
                section = name.trim().to_string();
                match section.as_str() {
                    "variables" | "constraints" | "bounds" | "observables" | "pipeline" => {}
                    other => return Err(err(lineno, 1, format!("unknown section `[{}]`", other))),
                }
                continue;
            }
            match section.as_str() {
                "variables" => {
                    let (key, value) = line
                        .split_once('=')
                        .ok_or_else(|| err(lineno, 1, "expected `pairs = <n>`".into()))?;
                    match key.trim() {
                        "pairs" => {
                            let n: u32 = value.trim().parse().map_err(|_| {
                                err(lineno, 1, format!("bad pair count `{}`", value.trim()))
                            })?;
                            pairs = Some(n);
                        }
                        other => {
                            return Err(err(lineno, 1, format!("unknown variable key `{}`", other)))
                        }
                    }
                }
                "constraints" => constraints.push((line.to_string(), lineno)),
                "observables" => observables.push((line.to_string(), lineno)),
                "bounds" => {
                    let (key, value) = line
                        .split_once('=')
                        .ok_or_else(|| err(lineno, 1, "expected `<key> = <value>`".into()))?;
                    let value = value.trim();
                    match key.trim() {
                        "n" => {
                            trunc = value
                                .parse()
                                .map_err(|_| err(lineno, 1, format!("bad n `{}`", value)))?
                        }
                        "d" => {
                            poly_degree = value
                                .parse()
                                .map_err(|_| err(lineno, 1, format!("bad d `{}`", value)))?
                        }
                        "w" => {
                            word_length = value
                                .parse()
                                .map_err(|_| err(lineno, 1, format!("bad w `{}`", value)))?
                        }
                        "k" => {
                            hbar_trunc = value
                                .parse()
                                .map_err(|_| err(lineno, 1, format!("bad k `{}`", value)))?
                        }
                        "order" => {
                            order = MonomialOrder::parse(value).ok_or_else(|| {
                                err(lineno, 1, format!("unknown monomial order `{}`", value))
                            })?
                        }
                        other => {
                            return Err(err(lineno, 1, format!("unknown bound key `{}`", other)))
                        }
                    }
                }
                "pipeline" => {
                    let stage = Stage::parse(line)
                        .ok_or_else(|| err(lineno, 1, format!("unknown stage `{}`", line)))?;
                    pipeline.push(stage);
                }
                "" => return Err(err(lineno, 1, "content before the first section".into())),
                _ => unreachable!(),
            }
        }

        let pairs =
            pairs.ok_or_else(|| err(0, 0, "missing `[variables]` section with `pairs`".into()))?;
        if trunc < 2 {
            return Err(err(
                0,
                0,
                format!("truncation n = {} must be at least 2", trunc),
            ));
        }
        if hbar_trunc < 1 {
            return Err(err(0, 0, "hbar truncation k must be at least 1".into()));
        }
        let mut parsed_constraints = Vec::new();
        let mut constraint_texts = Vec::new();
        for (text, lineno) in &constraints {
            let p = parse_poly(text, pairs, *lineno)?;
            if p.is_zero() {
                return Err(err(*lineno, 1, "zero constraint".into()));
            }
            parsed_constraints.push(p);
            constraint_texts.push(text.clone());
        }
        let mut parsed_observables = Vec::new();
        let mut observable_texts = Vec::new();
        for (text, lineno) in &observables {
            parsed_observables.push(parse_poly(text, pairs, *lineno)?);
            observable_texts.push(text.clone());
        }
        if pipeline.is_empty() {
            pipeline = vec![Stage::Groebner, Stage::Tate, Stage::Charge];
        }
        pipeline.sort();
        pipeline.dedup();
        Ok(ModelSpec {
            name: name.to_string(),
            pairs,
            constraints: parsed_constraints,
            constraint_texts,
            order,
            trunc,
            poly_degree,
            word_length,
            hbar_trunc,
            observables: parsed_observables,
            observable_texts,
            pipeline,
        })
    }

    pub fn load(path: &Path) -> Result<ModelSpec, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {}", path.display(), e))?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "model".to_string());
        ModelSpec::parse(&text, &name).map_err(|e| format!("{}: {}", path.display(), e))
    }

    /// Canonical text describing the ideal, used for cache keys.
    pub fn ideal_fingerprint(&self) -> String {
        let mut s = format!("pairs={} order={}\n", self.pairs, self.order.name());
        for c in &self.constraints {
            s.push_str(&c.display(self.order));
            s.push('\n');
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = "\
# plane rotation
[variables]
pairs = 2

[constraints]
x1 y2 - x2 y1

[bounds]
n = 4
d = 8
w = 5
k = 3
order = degrevlex

[observables]
x1^2 + x2^2
y1^2 + y2^2

[pipeline]
groebner
tate
charge
cohomology
quantize
";

    #[test]
    fn parses_example() {
        let spec = ModelSpec::parse(EXAMPLE, "plane").unwrap();
        assert_eq!(spec.pairs, 2);
        assert_eq!(spec.constraints.len(), 1);
        assert_eq!(spec.trunc, 4);
        assert_eq!(spec.hbar_trunc, 3);
        assert_eq!(spec.observables.len(), 2);
        assert_eq!(spec.pipeline.len(), 5);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ModelSpec::parse("[variables]\npairs = 2\n[bounds]\nn = 1\n", "x").is_err());
        assert!(ModelSpec::parse("[variables]\npairs = 2\n[constraints]\nx9\n", "x").is_err());
        let err = ModelSpec::parse("[wat]\n", "x").unwrap_err();
        assert!(err.message.contains("unknown section"));
    }
}
