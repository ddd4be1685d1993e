//! Pipeline orchestration: Gröbner -> Tate -> charge -> cohomology ->
//! quantization, with disk caching and a machine-readable report.
//!
//! The JSON report contains no wall-clock data and no cache hit/miss
//! information, so warm and cold runs of the same spec produce identical
//! reports; timings go to the human log only.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use bfvkit_core::brst::{brst_charge, q0_charge, Charge};
use bfvkit_core::cohomology::PivotOrder;
use bfvkit_core::cohomology::{h0_bracket, h0_lift, invariance_check};
use bfvkit_core::groebner::{buchberger, PolyIdeal, SyzygyModule};
use bfvkit_core::quantize::{qme_solve, QmeOutcome};
use bfvkit_core::tate::{koszul_init, tate_extend, Homotopy, Resolution, SliceBounds};
use serde::Serialize;

use crate::cache::{
    groebner_body, groebner_cache_path, groebner_parse, read_verified, resolution_body,
    resolution_cache_path, write_sealed, CacheRead,
};
use crate::io;
use crate::spec::{ModelSpec, Stage};

#[derive(Serialize, Debug, Clone)]
pub struct StageReport {
    pub name: String,
    pub status: String,
    pub details: BTreeMap<String, serde_json::Value>,
    pub artifacts: Vec<String>,
}

#[derive(Serialize, Debug, Clone)]
pub struct Report {
    pub spec: String,
    pub pairs: u32,
    pub constraints: Vec<String>,
    pub order: String,
    pub trunc: u32,
    pub poly_degree: u32,
    pub word_length: u32,
    pub hbar_trunc: u32,
    pub stages: Vec<StageReport>,
    pub ok: bool,
}

pub struct Context {
    pub spec: ModelSpec,
    pub cache_dir: PathBuf,
    pub out_dir: PathBuf,
    ideal: Option<(PolyIdeal, SyzygyModule)>,
    resolution: Option<Resolution>,
    charge: Option<Charge>,
    pub log: Vec<String>,
}

fn jstr(s: impl Into<String>) -> serde_json::Value {
    serde_json::Value::String(s.into())
}

fn jnum(n: u64) -> serde_json::Value {
    serde_json::Value::Number(n.into())
}

impl Context {
    pub fn new(spec: ModelSpec, cache_dir: PathBuf, out_dir: PathBuf) -> Self {
        Context {
            spec,
            cache_dir,
            out_dir,
            ideal: None,
            resolution: None,
            charge: None,
            log: Vec::new(),
        }
    }

    fn note(&mut self, line: String) {
        self.log.push(line);
    }

    pub fn bounds(&self) -> SliceBounds {
        SliceBounds::new(self.spec.poly_degree, self.spec.word_length)
    }

    /// Resolution depth needed so Q₀ has every ghost of weight < N.
    fn target_depth(&self) -> u32 {
        self.spec.trunc.saturating_sub(1).max(1)
    }

    pub fn ideal(&mut self) -> Result<&(PolyIdeal, SyzygyModule), String> {
        if self.ideal.is_none() {
            let fp = self.spec.ideal_fingerprint();
            let path = groebner_cache_path(&self.cache_dir, &fp);
            let cached = match read_verified(&path) {
                CacheRead::Hit(body) => match groebner_parse(&body, self.spec.pairs) {
                    Ok(pair) => {
                        self.note(format!("groebner: cache hit {}", path.display()));
                        Some(pair)
                    }
                    Err(e) => {
                        self.note(format!(
                            "groebner: cache integrity failure ({}), recomputing",
                            e
                        ));
                        None
                    }
                },
                CacheRead::Corrupt(p) => {
                    self.note(format!(
                        "groebner: cache integrity failure at {}, recomputing",
                        p.display()
                    ));
                    None
                }
                CacheRead::Miss => None,
            };
            let pair = match cached {
                Some(p) => p,
                None => {
                    let ideal = buchberger(&self.spec.constraints, self.spec.order)
                        .map_err(|e| e.to_string())?;
                    let syz = ideal.syzygies();
                    write_sealed(&path, &groebner_body(&ideal, &syz))
                        .map_err(|e| format!("cannot write cache: {}", e))?;
                    (ideal, syz)
                }
            };
            self.ideal = Some(pair);
        }
        Ok(self.ideal.as_ref().unwrap())
    }

    pub fn resolution(&mut self) -> Result<&Resolution, String> {
        if self.resolution.is_none() {
            let depth = self.target_depth();
            let bounds = self.bounds();
            let fp = self.spec.ideal_fingerprint();
            let path = resolution_cache_path(
                &self.cache_dir,
                &fp,
                depth,
                bounds.poly_degree,
                bounds.word_length,
            );
            let (ideal, _) = self.ideal()?.clone();
            let cached = match read_verified(&path) {
                CacheRead::Hit(body) => match io::resolution_from_string(&body, ideal.clone()) {
                    Ok(res) => {
                        self.note(format!("tate: cache hit {}", path.display()));
                        Some(res)
                    }
                    Err(e) => {
                        self.note(format!(
                            "tate: cache integrity failure ({}), recomputing",
                            e
                        ));
                        None
                    }
                },
                CacheRead::Corrupt(p) => {
                    self.note(format!(
                        "tate: cache integrity failure at {}, recomputing",
                        p.display()
                    ));
                    None
                }
                CacheRead::Miss => None,
            };
            let res = match cached {
                Some(r) => r,
                None => {
                    let mut res = koszul_init(ideal);
                    for level in 2..=depth {
                        let report =
                            tate_extend(&mut res, level, bounds).map_err(|e| e.to_string())?;
                        self.note(format!(
                            "tate: level {} adds {} generator(s)",
                            level,
                            report.new_ghosts.len()
                        ));
                    }
                    write_sealed(&path, &resolution_body(&res))
                        .map_err(|e| format!("cannot write cache: {}", e))?;
                    res
                }
            };
            self.resolution = Some(res);
        }
        Ok(self.resolution.as_ref().unwrap())
    }

    pub fn charge(&mut self) -> Result<&Charge, String> {
        if self.charge.is_none() {
            let trunc = self.spec.trunc;
            let bounds = self.bounds();
            let res = self.resolution()?.clone();
            let mut homotopy = Homotopy::new(&res, bounds);
            let charge = brst_charge(&res, &mut homotopy, trunc).map_err(|e| e.to_string())?;
            let widenings: Vec<(i64, u32)> = homotopy.widenings().to_vec();
            drop(homotopy);
            for (degree, widened_to) in widenings {
                self.log.push(format!(
                    "charge: homotopy slice at degree {} widened to polynomial degree {}",
                    degree, widened_to
                ));
            }
            self.charge = Some(charge);
        }
        Ok(self.charge.as_ref().unwrap())
    }

    fn stage_groebner(&mut self) -> Result<StageReport, String> {
        let order = self.spec.order;
        let (ideal, syz) = self.ideal()?.clone();
        let artifact = self.out_dir.join("groebner.txt");
        io::atomic_write(&artifact, &groebner_body(&ideal, &syz)).map_err(|e| e.to_string())?;
        let mut details = BTreeMap::new();
        details.insert("basis_size".into(), jnum(ideal.basis().len() as u64));
        details.insert(
            "syzygy_generators".into(),
            jnum(syz.generators.len() as u64),
        );
        details.insert(
            "basis".into(),
            serde_json::Value::Array(
                ideal
                    .basis()
                    .iter()
                    .map(|p| jstr(p.display(order)))
                    .collect(),
            ),
        );
        details.insert(
            "certificates_verified".into(),
            serde_json::Value::Bool(ideal.verify_certificates()),
        );
        Ok(StageReport {
            name: "groebner".into(),
            status: "ok".into(),
            details,
            artifacts: vec!["groebner.txt".into()],
        })
    }

    fn stage_tate(&mut self) -> Result<StageReport, String> {
        let res = self.resolution()?.clone();
        let artifact = self.out_dir.join("resolution.txt");
        io::atomic_write(&artifact, &io::resolution_to_string(&res)).map_err(|e| e.to_string())?;
        let mut details = BTreeMap::new();
        let mut ghost_counts = BTreeMap::new();
        for level in 1..=res.table().max_level() {
            ghost_counts.insert(
                format!("level_{}", level),
                jnum(res.table().ghost_count(level) as u64),
            );
        }
        details.insert(
            "ghosts".into(),
            serde_json::Value::Object(ghost_counts.into_iter().collect()),
        );
        details.insert("depth".into(), jnum(res.depth() as u64));
        details.insert(
            "ledger".into(),
            serde_json::Value::Array(
                res.ledger()
                    .iter()
                    .map(|rec| {
                        jstr(format!(
                            "degree {} verified within D={} W={}, {} new generator(s)",
                            rec.degree,
                            rec.bounds.poly_degree,
                            rec.bounds.word_length,
                            rec.new_generators
                        ))
                    })
                    .collect(),
            ),
        );
        Ok(StageReport {
            name: "tate".into(),
            status: "ok".into(),
            details,
            artifacts: vec!["resolution.txt".into()],
        })
    }

    fn stage_charge(&mut self) -> Result<StageReport, String> {
        let trunc = self.spec.trunc;
        let charge = self.charge()?.clone();
        let table = self.resolution()?.table().clone();
        let artifact = self.out_dir.join("charge.txt");
        io::atomic_write(&artifact, &io::charge_to_string(&charge, &table))
            .map_err(|e| e.to_string())?;
        let q0 = {
            let res = self.resolution()?;
            q0_charge(res, trunc).map_err(|e| e.to_string())?
        };
        let mut details = BTreeMap::new();
        details.insert("steps".into(), jnum(charge.steps.len() as u64));
        details.insert("terms".into(), jnum(charge.element.len() as u64));
        details.insert("q0_terms".into(), jnum(q0.len() as u64));
        details.insert(
            "residual".into(),
            jstr(if charge.residual.is_zero() {
                "0"
            } else {
                "nonzero"
            }),
        );
        details.insert(
            "equals_q0".into(),
            serde_json::Value::Bool(charge.element == q0),
        );
        if !charge.residual.is_zero() {
            return Ok(StageReport {
                name: "charge".into(),
                status: "failed".into(),
                details,
                artifacts: vec!["charge.txt".into()],
            });
        }
        Ok(StageReport {
            name: "charge".into(),
            status: "ok".into(),
            details,
            artifacts: vec!["charge.txt".into()],
        })
    }

    fn stage_cohomology(&mut self) -> Result<StageReport, String> {
        let trunc = self.spec.trunc;
        let charge = self.charge()?.clone();
        let res = self.resolution()?.clone();
        let observables = self.spec.observables.clone();
        let texts = self.spec.observable_texts.clone();
        let order = self.spec.order;
        let mut details = BTreeMap::new();
        let mut artifacts = Vec::new();
        let mut classes = Vec::new();
        let mut class_info = Vec::new();
        for (i, p) in observables.iter().enumerate() {
            let report = invariance_check(p, res.ideal());
            if !report.invariant {
                class_info.push(jstr(format!("{}: not invariant", texts[i])));
                classes.push(None);
                continue;
            }
            let class = h0_lift(p, &res, trunc).map_err(|e| e.to_string())?;
            if !class.verify(&charge.element) {
                return Err(format!(
                    "H0 representative of `{}` fails d_R mod F^2",
                    texts[i]
                ));
            }
            let name = format!("h0_{}.txt", i);
            let artifact = self.out_dir.join(&name);
            io::atomic_write(
                &artifact,
                &io::element_to_string(&class.representative, res.table()),
            )
            .map_err(|e| e.to_string())?;
            artifacts.push(name);
            class_info.push(jstr(format!("{}: invariant, lifted", texts[i])));
            classes.push(Some(class));
        }
        details.insert("observables".into(), serde_json::Value::Array(class_info));
        let mut brackets = Vec::new();
        for i in 0..classes.len() {
            for j in (i + 1)..classes.len() {
                if let (Some(a), Some(b)) = (&classes[i], &classes[j]) {
                    let br = h0_bracket(a, b, res.ideal());
                    brackets.push(jstr(format!(
                        "{{{}, {}}} = {}",
                        texts[i],
                        texts[j],
                        br.display(order)
                    )));
                }
            }
        }
        details.insert("h0_brackets".into(), serde_json::Value::Array(brackets));
        Ok(StageReport {
            name: "cohomology".into(),
            status: "ok".into(),
            details,
            artifacts,
        })
    }

    fn stage_quantize(&mut self) -> Result<StageReport, String> {
        let trunc = self.spec.trunc;
        let hbar = self.spec.hbar_trunc;
        let bounds = self.bounds();
        let charge = self.charge()?.clone();
        let res = self.resolution()?.clone();
        let outcome = qme_solve(
            &charge.element,
            &res,
            trunc,
            hbar,
            bounds,
            PivotOrder::Forward,
        )
        .map_err(|e| e.to_string())?;
        let mut details = BTreeMap::new();
        match outcome {
            QmeOutcome::Solved { r, corrections } => {
                let artifact = self.out_dir.join("qcharge.txt");
                io::atomic_write(&artifact, &io::qelement_to_string(&r, res.table()))
                    .map_err(|e| e.to_string())?;
                details.insert(
                    "corrections".into(),
                    serde_json::Value::Array(
                        corrections
                            .iter()
                            .enumerate()
                            .map(|(k, c)| jstr(format!("order {}: {} term(s)", k + 1, c.len())))
                            .collect(),
                    ),
                );
                details.insert("residual".into(), jstr("0"));
                Ok(StageReport {
                    name: "quantize".into(),
                    status: "ok".into(),
                    details,
                    artifacts: vec!["qcharge.txt".into()],
                })
            }
            QmeOutcome::Obstructed {
                order,
                witness,
                proven_by_degree,
                bounds,
            } => {
                let name = "qme_obstruction.txt".to_string();
                let artifact = self.out_dir.join(&name);
                io::atomic_write(&artifact, &io::element_to_string(&witness, res.table()))
                    .map_err(|e| e.to_string())?;
                details.insert("obstructed_at_order".into(), jnum(order as u64));
                details.insert(
                    "kind".into(),
                    jstr(if proven_by_degree {
                        "H2 obstruction class (degree argument)"
                    } else {
                        "not exact within slice bounds"
                    }),
                );
                details.insert(
                    "slice_bounds".into(),
                    jstr(format!("D={} W={}", bounds.poly_degree, bounds.word_length)),
                );
                Ok(StageReport {
                    name: "quantize".into(),
                    status: "obstructed".into(),
                    details,
                    artifacts: vec![name],
                })
            }
        }
    }

    /// Executes the spec's pipeline; the report's `ok` is false when any
    /// stage fails or reports an obstruction.
    pub fn run(&mut self) -> Result<Report, String> {
        std::fs::create_dir_all(&self.out_dir).map_err(|e| e.to_string())?;
        std::fs::create_dir_all(&self.cache_dir).map_err(|e| e.to_string())?;
        let stages = self.spec.pipeline.clone();
        let mut reports = Vec::new();
        let mut ok = true;
        for stage in stages {
            let start = Instant::now();
            let report = match stage {
                Stage::Groebner => self.stage_groebner()?,
                Stage::Tate => self.stage_tate()?,
                Stage::Charge => self.stage_charge()?,
                Stage::Cohomology => self.stage_cohomology()?,
                Stage::Quantize => self.stage_quantize()?,
            };
            self.log.push(format!(
                "stage {}: {} ({} ms)",
                report.name,
                report.status,
                start.elapsed().as_millis()
            ));
            if report.status != "ok" {
                ok = false;
            }
            reports.push(report);
        }
        let report = Report {
            spec: self.spec.name.clone(),
            pairs: self.spec.pairs,
            constraints: self.spec.constraint_texts.clone(),
            order: self.spec.order.name().into(),
            trunc: self.spec.trunc,
            poly_degree: self.spec.poly_degree,
            word_length: self.spec.word_length,
            hbar_trunc: self.spec.hbar_trunc,
            stages: reports,
            ok,
        };
        let json = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
        io::atomic_write(&self.out_dir.join("report.json"), &format!("{}\n", json))
            .map_err(|e| e.to_string())?;
        Ok(report)
    }
}
