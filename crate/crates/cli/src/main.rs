use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bfvkit::io;
use bfvkit::pipeline::Context;
use bfvkit::selftest;
use bfvkit::spec::{ModelSpec, Stage};
use bfvkit_core::brst::cme_check;
use bfvkit_core::cohomology::{
    h0_bracket, h0_lift, invariance_check, is_exact, Exactness, PivotOrder,
};
use bfvkit_core::gauge::{exp_ad, gauge_match};
use bfvkit_core::quantize::{qbracket_over_hbar, quantum_gauge_match, QGaugeOutcome};
use bfvkit_core::tate::Homotopy;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "bfvkit",
    version,
    about = "BRST/BFV models for coisotropic ideals: Tate resolutions, charges, cohomology, gauge matching, quantization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Model specification file.
    spec: PathBuf,
    /// Output directory (default: <spec>.out next to the spec file).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Cache directory (default: $BFVKIT_CACHE or <out>/cache).
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Print the JSON report to stdout.
    #[arg(long)]
    json: bool,
    /// Override slice bounds as D,W.
    #[arg(long)]
    bounds: Option<String>,
    /// Random seed (sampling commands only; pipelines are deterministic).
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Run the pipeline stages requested by the spec file.
    Run(Common),
    /// Tate resolution commands.
    Tate {
        #[command(subcommand)]
        cmd: TateCmd,
    },
    /// BRST charge commands.
    Brst {
        #[command(subcommand)]
        cmd: BrstCmd,
    },
    /// Cohomology commands.
    Coh {
        #[command(subcommand)]
        cmd: CohCmd,
    },
    /// Gauge equivalence commands.
    Gauge {
        #[command(subcommand)]
        cmd: GaugeCmd,
    },
    /// Quantization commands.
    Quantize {
        #[command(subcommand)]
        cmd: QuantizeCmd,
    },
    /// Run the property suite at a fixed seed.
    Selftest {
        #[arg(long)]
        quick: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum TateCmd {
    /// Build (or load from cache) the Tate resolution for the spec.
    Build(Common),
}

#[derive(Subcommand)]
enum BrstCmd {
    /// Compute the BRST charge and write the charge file.
    Charge(Common),
    /// Check a charge file against the classical master equation.
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        charge: PathBuf,
    },
}

#[derive(Subcommand)]
enum CohCmd {
    /// Lift an invariant polynomial to a degree-0 cocycle.
    H0 {
        #[command(flatten)]
        common: Common,
        /// Polynomial expression, e.g. "x1^2 + x2^2".
        #[arg(long)]
        poly: String,
        #[arg(long)]
        out_file: Option<PathBuf>,
    },
    /// Induced Poisson bracket of two invariant polynomials on H0.
    Bracket {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// Probe whether an element file is d_R-exact.
    Exact {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        element: PathBuf,
        #[arg(long)]
        out_file: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GaugeCmd {
    /// Match two charges by a gauge equivalence.
    Match {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        charge: PathBuf,
        #[arg(long)]
        other: PathBuf,
        #[arg(long)]
        out_file: Option<PathBuf>,
    },
    /// Apply an equivalence file to an element file.
    Apply {
        #[arg(long)]
        equiv: PathBuf,
        #[arg(long)]
        element: PathBuf,
        #[arg(long)]
        out_file: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum QuantizeCmd {
    /// Solve the quantum master equation order by order.
    Qme(Common),
    /// Check a quantum charge file: (1/h)[r,r] mod (h^K, F^N).
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        qcharge: PathBuf,
    },
    /// Match two quantum master equation solutions.
    Match {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long)]
        out_file: Option<PathBuf>,
    },
}

fn out_dir_for(common: &Common) -> PathBuf {
    common.out.clone().unwrap_or_else(|| {
        let stem = common
            .spec
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "model".into());
        common
            .spec
            .parent()
            .unwrap_or(Path::new("."))
            .join(format!("{}.out", stem))
    })
}

fn cache_dir_for(common: &Common, out_dir: &Path) -> PathBuf {
    if let Some(c) = &common.cache {
        return c.clone();
    }
    if let Ok(env) = std::env::var("BFVKIT_CACHE") {
        if !env.is_empty() {
            return PathBuf::from(env);
        }
    }
    out_dir.join("cache")
}

fn load_context(common: &Common) -> Result<Context, String> {
    let mut spec = ModelSpec::load(&common.spec)?;
    if let Some(bounds) = &common.bounds {
        let (d, w) = bounds
            .split_once(',')
            .ok_or_else(|| format!("--bounds expects D,W, got `{}`", bounds))?;
        spec.poly_degree = d.trim().parse().map_err(|_| format!("bad D `{}`", d))?;
        spec.word_length = w.trim().parse().map_err(|_| format!("bad W `{}`", w))?;
    }
    let out_dir = out_dir_for(common);
    let cache_dir = cache_dir_for(common, &out_dir);
    Ok(Context::new(spec, cache_dir, out_dir))
}

fn finish(ctx: &Context, ok: bool) -> ExitCode {
    for line in &ctx.log {
        println!("{}", line);
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn cmd_run(common: &Common) -> Result<ExitCode, String> {
    let mut ctx = load_context(common)?;
    let report = ctx.run()?;
    for line in &ctx.log {
        println!("{}", line);
    }
    if common.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?
        );
    } else {
        for stage in &report.stages {
            println!("stage {}: {}", stage.name, stage.status);
        }
        println!("report: {}", ctx.out_dir.join("report.json").display());
    }
    Ok(if report.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn cmd_tate_build(common: &Common) -> Result<ExitCode, String> {
    let mut ctx = load_context(common)?;
    std::fs::create_dir_all(&ctx.out_dir).map_err(|e| e.to_string())?;
    std::fs::create_dir_all(&ctx.cache_dir).map_err(|e| e.to_string())?;
    let res = ctx.resolution()?.clone();
    let path = ctx.out_dir.join("resolution.txt");
    io::atomic_write(&path, &io::resolution_to_string(&res)).map_err(|e| e.to_string())?;
    println!(
        "resolution: depth {}, written to {}",
        res.depth(),
        path.display()
    );
    Ok(finish(&ctx, true))
}

fn cmd_brst_charge(common: &Common) -> Result<ExitCode, String> {
    let mut ctx = load_context(common)?;
    std::fs::create_dir_all(&ctx.out_dir).map_err(|e| e.to_string())?;
    std::fs::create_dir_all(&ctx.cache_dir).map_err(|e| e.to_string())?;
    let charge = ctx.charge()?.clone();
    let table = ctx.resolution()?.table().clone();
    let path = ctx.out_dir.join("charge.txt");
    io::atomic_write(&path, &io::charge_to_string(&charge, &table)).map_err(|e| e.to_string())?;
    println!(
        "charge: {} term(s), {} correction step(s), residual {}",
        charge.element.len(),
        charge.steps.len(),
        if charge.residual.is_zero() {
            "0"
        } else {
            "nonzero"
        }
    );
    println!("written to {}", path.display());
    Ok(finish(&ctx, charge.residual.is_zero()))
}

fn cmd_brst_check(common: &Common, charge_path: &Path) -> Result<ExitCode, String> {
    let ctx = load_context(common)?;
    let text = std::fs::read_to_string(charge_path).map_err(|e| e.to_string())?;
    let parsed = io::charge_from_string(&text)?;
    let residual = cme_check(&parsed.value.element, ctx.spec.trunc);
    if residual.is_zero() {
        println!("classical master equation holds mod F^{}", ctx.spec.trunc);
        Ok(ExitCode::SUCCESS)
    } else {
        println!(
            "classical master equation FAILS: residual of weight {:?}",
            residual.min_weight()
        );
        Ok(ExitCode::FAILURE)
    }
}

fn cmd_coh_h0(common: &Common, poly: &str, out_file: Option<&Path>) -> Result<ExitCode, String> {
    let mut ctx = load_context(common)?;
    std::fs::create_dir_all(&ctx.out_dir).map_err(|e| e.to_string())?;
    std::fs::create_dir_all(&ctx.cache_dir).map_err(|e| e.to_string())?;
    let p = bfvkit::exprs::parse_poly(poly, ctx.spec.pairs, 1).map_err(|e| e.to_string())?;
    let trunc = ctx.spec.trunc;
    let charge = ctx.charge()?.element.clone();
    let res = ctx.resolution()?.clone();
    let report = invariance_check(&p, res.ideal());
    if !report.invariant {
        println!("not invariant: some {{phi_i, p}} is outside the ideal");
        return Ok(ExitCode::FAILURE);
    }
    let class = h0_lift(&p, &res, trunc).map_err(|e| e.to_string())?;
    if !class.verify(&charge) {
        return Err("representative fails d_R mod F^2".into());
    }
    let path = out_file
        .map(Path::to_path_buf)
        .unwrap_or_else(|| ctx.out_dir.join("h0_class.txt"));
    io::atomic_write(
        &path,
        &io::element_to_string(&class.representative, res.table()),
    )
    .map_err(|e| e.to_string())?;
    println!("invariant; class written to {}", path.display());
    Ok(finish(&ctx, true))
}

fn cmd_coh_bracket(common: &Common, left: &str, right: &str) -> Result<ExitCode, String> {
    let mut ctx = load_context(common)?;
    std::fs::create_dir_all(&ctx.out_dir).map_err(|e| e.to_string())?;
    std::fs::create_dir_all(&ctx.cache_dir).map_err(|e| e.to_string())?;
    let pl = bfvkit::exprs::parse_poly(left, ctx.spec.pairs, 1).map_err(|e| e.to_string())?;
    let pr = bfvkit::exprs::parse_poly(right, ctx.spec.pairs, 1).map_err(|e| e.to_string())?;
    let trunc = ctx.spec.trunc;
    let order = ctx.spec.order;
    let res = ctx.resolution()?.clone();
    let cl = h0_lift(&pl, &res, trunc).map_err(|e| e.to_string())?;
    let cr = h0_lift(&pr, &res, trunc).map_err(|e| e.to_string())?;
    let br = h0_bracket(&cl, &cr, res.ideal());
    println!("{}", br.display(order));
    Ok(finish(&ctx, true))
}

fn cmd_coh_exact(
    common: &Common,
    element: &Path,
    out_file: Option<&Path>,
) -> Result<ExitCode, String> {
    let mut ctx = load_context(common)?;
    std::fs::create_dir_all(&ctx.out_dir).map_err(|e| e.to_string())?;
    std::fs::create_dir_all(&ctx.cache_dir).map_err(|e| e.to_string())?;
    let text = std::fs::read_to_string(element).map_err(|e| e.to_string())?;
    let parsed = io::element_from_string(&text)?;
    let trunc = ctx.spec.trunc;
    let bounds = ctx.bounds();
    let charge = ctx.charge()?.element.clone();
    let res = ctx.resolution()?.clone();
    let x = parsed.value.truncate(trunc);
    match is_exact(&x, &charge, res.table(), trunc, bounds, PivotOrder::Forward)
        .map_err(|e| e.to_string())?
    {
        Exactness::Primitive(y) => {
            let path = out_file
                .map(Path::to_path_buf)
                .unwrap_or_else(|| ctx.out_dir.join("primitive.txt"));
            io::atomic_write(&path, &io::element_to_string(&y, res.table()))
                .map_err(|e| e.to_string())?;
            println!("exact; primitive written to {}", path.display());
            Ok(finish(&ctx, true))
        }
        Exactness::NoneByDegreeArgument {
            min_image_poly_degree,
        } => {
            println!(
                "not exact anywhere in X: every d_R image has polynomial degree >= {}",
                min_image_poly_degree
            );
            Ok(finish(&ctx, false))
        }
        Exactness::NoneWithinSlice { bounds } => {
            println!(
                "no primitive within slice bounds D={} W={}",
                bounds.poly_degree, bounds.word_length
            );
            Ok(finish(&ctx, false))
        }
    }
}

fn cmd_gauge_match(
    common: &Common,
    charge: &Path,
    other: &Path,
    out_file: Option<&Path>,
) -> Result<ExitCode, String> {
    let mut ctx = load_context(common)?;
    std::fs::create_dir_all(&ctx.out_dir).map_err(|e| e.to_string())?;
    std::fs::create_dir_all(&ctx.cache_dir).map_err(|e| e.to_string())?;
    let a = io::charge_from_string(&std::fs::read_to_string(charge).map_err(|e| e.to_string())?)?;
    let b = io::charge_from_string(&std::fs::read_to_string(other).map_err(|e| e.to_string())?)?;
    let trunc = ctx.spec.trunc;
    let bounds = ctx.bounds();
    let res = ctx.resolution()?.clone();
    let mut homotopy = Homotopy::new(&res, bounds);
    let eq = gauge_match(
        &a.value.element,
        &b.value.element,
        &res,
        &mut homotopy,
        trunc,
    )
    .map_err(|e| e.to_string())?;
    let path = out_file
        .map(Path::to_path_buf)
        .unwrap_or_else(|| ctx.out_dir.join("equivalence.txt"));
    io::atomic_write(&path, &io::equivalence_to_string(&eq, res.table()))
        .map_err(|e| e.to_string())?;
    println!(
        "matched with {} generator(s); written to {}",
        eq.generators.len(),
        path.display()
    );
    Ok(finish(&ctx, true))
}

fn cmd_gauge_apply(
    equiv: &Path,
    element: &Path,
    out_file: Option<&Path>,
) -> Result<ExitCode, String> {
    let eq =
        io::equivalence_from_string(&std::fs::read_to_string(equiv).map_err(|e| e.to_string())?)?;
    let el = io::element_or_charge_from_string(
        &std::fs::read_to_string(element).map_err(|e| e.to_string())?,
    )?;
    let mut x = el.value.truncate(eq.value.trunc);
    for c in &eq.value.generators {
        x = exp_ad(c, &x, eq.value.trunc).map_err(|e| e.to_string())?;
    }
    let path = out_file
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("gauge_applied.txt"));
    io::atomic_write(&path, &io::element_to_string(&x, &el.table)).map_err(|e| e.to_string())?;
    println!(
        "applied {} generator(s); written to {}",
        eq.value.generators.len(),
        path.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_quantize_qme(common: &Common) -> Result<ExitCode, String> {
    let mut ctx = load_context(common)?;
    // reuse the pipeline stage for consistent artifacts and report wording
    ctx.spec.pipeline = vec![Stage::Groebner, Stage::Tate, Stage::Charge, Stage::Quantize];
    let report = ctx.run()?;
    for line in &ctx.log {
        println!("{}", line);
    }
    let quantize_ok = report
        .stages
        .iter()
        .find(|s| s.name == "quantize")
        .map(|s| s.status == "ok")
        .unwrap_or(false);
    println!(
        "qme: {}",
        if quantize_ok {
            "solved"
        } else {
            "obstructed or failed"
        }
    );
    Ok(if report.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn cmd_quantize_check(common: &Common, qcharge: &Path) -> Result<ExitCode, String> {
    let ctx = load_context(common)?;
    let parsed =
        io::qelement_from_string(&std::fs::read_to_string(qcharge).map_err(|e| e.to_string())?)?;
    let k = ctx.spec.hbar_trunc;
    let r = parsed.value.assume_exact_to(k + 1);
    let com = qbracket_over_hbar(&r, &r).map_err(|e| e.to_string())?;
    for order in 0..k {
        if !com.coefficient(order as usize).is_zero() {
            println!("quantum master equation FAILS at order {}", order);
            return Ok(ExitCode::FAILURE);
        }
    }
    println!(
        "quantum master equation holds mod (h^{}, F^{})",
        k, ctx.spec.trunc
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_quantize_match(
    common: &Common,
    left: &Path,
    right: &Path,
    out_file: Option<&Path>,
) -> Result<ExitCode, String> {
    let mut ctx = load_context(common)?;
    std::fs::create_dir_all(&ctx.out_dir).map_err(|e| e.to_string())?;
    std::fs::create_dir_all(&ctx.cache_dir).map_err(|e| e.to_string())?;
    let a = io::qelement_from_string(&std::fs::read_to_string(left).map_err(|e| e.to_string())?)?;
    let b = io::qelement_from_string(&std::fs::read_to_string(right).map_err(|e| e.to_string())?)?;
    let trunc = ctx.spec.trunc;
    let k = ctx.spec.hbar_trunc;
    let bounds = ctx.bounds();
    let charge = ctx.charge()?.element.clone();
    let res = ctx.resolution()?.clone();
    match quantum_gauge_match(&a.value, &b.value, &charge, &res, trunc, k, bounds)
        .map_err(|e| e.to_string())?
    {
        QGaugeOutcome::Matched { generators } => {
            let path = out_file
                .map(Path::to_path_buf)
                .unwrap_or_else(|| ctx.out_dir.join("qequivalence.txt"));
            let mut body = String::from("# bfvkit quantum equivalence v1\n");
            body.push_str(&format!("table: {}\n", res.table().summary()));
            body.push_str(&format!("trunc: {}\nhbar: {}\n", trunc, k));
            body.push_str(&format!("generators: {}\n", generators.len()));
            for g in &generators {
                body.push_str("[generator]\n");
                for line in g.to_lines() {
                    body.push_str(&line);
                    body.push('\n');
                }
            }
            io::atomic_write(&path, &body).map_err(|e| e.to_string())?;
            println!(
                "matched with {} generator(s); written to {}",
                generators.len(),
                path.display()
            );
            Ok(finish(&ctx, true))
        }
        QGaugeOutcome::Obstructed { order, .. } => {
            println!("H1 obstruction at hbar order {}", order);
            Ok(finish(&ctx, false))
        }
    }
}

fn cmd_selftest(quick: bool, seed: u64, json: bool) -> ExitCode {
    let results = selftest::run(seed, quick);
    let mut ok = true;
    if json {
        let items: Vec<serde_json::Value> = results
            .iter()
            .map(|r| {
                serde_json::json!({
                    "name": r.name,
                    "passed": r.passed,
                    "detail": r.detail,
                })
            })
            .collect();
        println!(
            "{}",
            serde_json::to_string_pretty(&serde_json::Value::Array(items)).unwrap()
        );
        ok = results.iter().all(|r| r.passed);
    } else {
        for r in &results {
            println!(
                "[{}] {}: {}",
                if r.passed { "PASS" } else { "FAIL" },
                r.name,
                r.detail
            );
            ok &= r.passed;
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run(common) => cmd_run(common),
        Command::Tate {
            cmd: TateCmd::Build(common),
        } => cmd_tate_build(common),
        Command::Brst { cmd } => match cmd {
            BrstCmd::Charge(common) => cmd_brst_charge(common),
            BrstCmd::Check { common, charge } => cmd_brst_check(common, charge),
        },
        Command::Coh { cmd } => match cmd {
            CohCmd::H0 {
                common,
                poly,
                out_file,
            } => cmd_coh_h0(common, poly, out_file.as_deref()),
            CohCmd::Bracket {
                common,
                left,
                right,
            } => cmd_coh_bracket(common, left, right),
            CohCmd::Exact {
                common,
                element,
                out_file,
            } => cmd_coh_exact(common, element, out_file.as_deref()),
        },
        Command::Gauge { cmd } => match cmd {
            GaugeCmd::Match {
                common,
                charge,
                other,
                out_file,
            } => cmd_gauge_match(common, charge, other, out_file.as_deref()),
            GaugeCmd::Apply {
                equiv,
                element,
                out_file,
            } => cmd_gauge_apply(equiv, element, out_file.as_deref()),
        },
        Command::Quantize { cmd } => match cmd {
            QuantizeCmd::Qme(common) => cmd_quantize_qme(common),
            QuantizeCmd::Check { common, qcharge } => cmd_quantize_check(common, qcharge),
            QuantizeCmd::Match {
                common,
                left,
                right,
                out_file,
            } => cmd_quantize_match(common, left, right, out_file.as_deref()),
        },
        Command::Selftest { quick, seed, json } => return cmd_selftest(*quick, *seed, *json),
    };
    match outcome {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {}", message);
            ExitCode::from(2)
        }
    }
}
