use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use linmodal::checker::{check_artifact, countermodel_search, props, CheckOptions, CheckReport, SearchOptions};
use linmodal::extraction::{default_bounds, diff_windows, extract_tiling, CellDiff, Extraction, WindowBounds};
use linmodal::formula::Metrics;
use linmodal::kripke::generators::{build_dense, build_m0, build_m0_prime, build_m0_star, build_ordinal};
use linmodal::kripke::{parse_model, recipe_tiling, write_model, FrameKind, FrameSpec, ModelSource, PredicateModel};
use linmodal::reductions::{gen_separation, gen_variant, ReductionArtifact, Separation, Variant};
use linmodal::tiling::{find_recurrent, solve, PeriodicTiling, SolveOptions, TileSet, TileType, TilingGrid};

use crate::error::{CliError, EXIT_FALSE};
use crate::{BoundArgs, Cmd, ReportFormat, TilesArgs};

type Result<T> = std::result::Result<T, CliError>;

struct Timer {
    verbose: bool,
    start: Instant,
}

impl Timer {
    fn new(verbose: u8) -> Self {
        Timer { verbose: verbose > 0, start: Instant::now() }
    }

    fn phase(&mut self, name: &str) {
        if self.verbose {
            eprintln!("[{name}] {:.3}s", self.start.elapsed().as_secs_f64());
        }
        self.start = Instant::now();
    }
}

pub fn dispatch(cmd: Cmd, verbose: u8) -> Result<ExitCode> {
    let mut t = Timer::new(verbose);
    match cmd {
        Cmd::Gen { tiles, variant, out, report } => gen(&tiles, &variant, out.as_deref(), report, &mut t),
        Cmd::Build { tiles, variant, frame, bounds, out } => {
            let tiles = load_tiles(&tiles)?;
            let variant = parse_variant(&variant)?;
            let tiling = periodic(&tiles, bounds.max_period)?;
            let wb = resolve_bounds(&tiles, variant, &bounds);
            let model = build_model(&tiles, &tiling, variant, frame.as_deref(), &wb, bounds.rows)?;
            t.phase("build");
            emit(&write_model(&model)?, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Check { model, artifact, world, step_limit, out, report } => {
            let model = parse_model(&read(&model)?)?;
            let artifact = ReductionArtifact::parse_file(&read(&artifact)?)?;
            let world = world.unwrap_or_else(|| default_world(&model));
            let rep = check(&model, &artifact, world, step_limit)?;
            t.phase("check");
            let text = match report {
                ReportFormat::Text => rep.to_string(),
                ReportFormat::Structured => pretty(&rep)?,
            };
            emit(&text, out.as_deref())?;
            Ok(verdict_code(!rep.has_false()))
        }
        Cmd::Props { tiles, bounds, out, report } => {
            let tiles = load_tiles(&tiles)?;
            let tiling = periodic(&tiles, bounds.max_period)?;
            let mut cfg = props::SuiteConfig::default();
            cfg.horizon = bounds.horizon.unwrap_or(cfg.horizon);
            cfg.bound = bounds.domain_bound.unwrap_or(cfg.bound);
            cfg.blocks = bounds.blocks.unwrap_or(cfg.blocks);
            let reps = props::run_suites(&tiles, &tiling, &cfg)?;
            t.phase("props");
            let text = match report {
                ReportFormat::Text => reps.iter().map(|r| format!("{r}\n")).collect(),
                ReportFormat::Structured => pretty(&reps)?,
            };
            emit(&text, out.as_deref())?;
            Ok(verdict_code(reps.iter().all(|r| r.ok())))
        }
        Cmd::Extract { model, variant, tiles, seed, expected, cols, rows, out, report } => {
            let model = parse_model(&read(&model)?)?;
            let variant = match variant {
                Some(v) => parse_variant(&v)?,
                None => generator_variant(&model),
            };
            let recipe = recipe_tiling(&model)?;
            let tiles = match (tiles, &recipe) {
                (Some(tiles), _) => load_tiles(&TilesArgs { tiles, seed })?,
                (None, Some((t, _))) => t.clone(),
                (None, None) => return Err(CliError::input("explicit models need --tiles")),
            };
            let expected = match (expected, &recipe) {
                (Some(p), _) => Some(TilingGrid::parse(&read(&p)?)?),
                (None, Some((_, tiling))) => Some(tiling.unfold(cols, rows)),
                (None, None) => None,
            };
            let e = extract_tiling(&model, &tiles, variant, cols, rows)?;
            t.phase("extract");
            let diffs = expected.as_ref().map(|g| diff_windows(g, &e.grid));
            if let Some(p) = &out {
                fs::write(p, e.grid.to_file())?;
                fs::write(sidecar(p), e.provenance_file())?;
            }
            let text = match report {
                ReportFormat::Text => extraction_text(&e, diffs.as_deref()),
                ReportFormat::Structured => pretty(&extraction_json(&e, diffs.as_deref()))?,
            };
            emit(&text, None)?;
            Ok(verdict_code(e.report.ok() && diffs.is_none_or(|d| d.is_empty())))
        }
        Cmd::Solve { tiles, width, height, wrap, max_cells, out } => {
            let tiles = load_tiles(&tiles)?;
            let opts = SolveOptions { wrap, t0_in_first_column: false, max_cells };
            let found = solve(&tiles, width, height, opts)?;
            t.phase("solve");
            match found {
                Some(g) => emit(&g.to_file(), out.as_deref())?,
                None => println!("no tiling of the {width}x{height} grid"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Sep { formula, frame, len, max_domain, world, max_interpretations, out } => {
            let kind: Separation = formula.parse()?;
            let spec: FrameSpec = frame.parse()?;
            let fr = spec.build(len)?;
            let f = gen_separation(kind);
            let opts = SearchOptions { max_domain, max_interpretations, world };
            let found = countermodel_search(&fr, &f, &opts)?;
            t.phase("search");
            match found {
                Some(cm) => {
                    println!(
                        "countermodel found: {frame} with {len} worlds refutes {formula} at world {} ({} interpretations enumerated)",
                        cm.world, cm.enumerated
                    );
                    if let Some(p) = &out {
                        fs::write(p, write_model(&cm.model)?)?;
                    }
                }
                None => println!("no countermodel: {formula} holds on {frame} with {len} worlds and domains up to {max_domain}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Pipeline { tiles, variant, frame, bounds, out, report } => {
            pipeline(&tiles, &variant, frame.as_deref(), &bounds, out.as_deref(), report, &mut t)
        }
    }
}

fn verdict_code(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FALSE)
    }
}

fn read(p: &Path) -> Result<String> {
    fs::read_to_string(p).map_err(|e| CliError::input(format!("{}: {e}", p.display())))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn pretty<T: serde::Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn sidecar(p: &Path) -> PathBuf {
    let mut s = p.as_os_str().to_owned();
    s.push(".prov");
    PathBuf::from(s)
}

fn parse_variant(s: &str) -> Result<Variant> {
    Ok(s.parse()?)
}

pub fn load_tiles(a: &TilesArgs) -> Result<TileSet> {
    match a.tiles.strip_prefix("random:") {
        Some(n) => {
            let n: usize = n.parse().map_err(|_| CliError::input(format!("bad tile count in `{}`", a.tiles)))?;
            if n == 0 {
                return Err(CliError::input("a tile set needs at least one tile"));
            }
            Ok(random_tiles(n, a.seed))
        }
        None => Ok(TileSet::parse(&read(Path::new(&a.tiles))?)?),
    }
}

/// `n` tiles with edge colours drawn from `{0, 1}`.
fn random_tiles(n: usize, seed: u64) -> TileSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tiles = (0..n)
        .map(|_| TileType::new(rng.gen_range(0..2), rng.gen_range(0..2), rng.gen_range(0..2), rng.gen_range(0..2)))
        .collect();
    TileSet::new(tiles).expect("non-empty tile set")
}

fn periodic(tiles: &TileSet, max_period: usize) -> Result<PeriodicTiling> {
    find_recurrent(tiles, max_period).map(|c| c.tiling).ok_or_else(|| {
        CliError::input(format!("no periodic tiling with t0 in column 0 and periods up to {max_period}"))
    })
}

fn resolve_bounds(tiles: &TileSet, variant: Variant, b: &BoundArgs) -> WindowBounds {
    let d = default_bounds(tiles.s(), variant, b.cols, b.rows);
    WindowBounds {
        horizon: b.horizon.unwrap_or(d.horizon),
        bound: b.domain_bound.unwrap_or(d.bound),
        blocks: b.blocks.unwrap_or(d.blocks),
    }
}

fn default_frame(variant: Variant, rows: usize) -> Option<String> {
    match variant {
        Variant::APlus => Some("natlt".into()),
        // row m is read at chain world 2m
        Variant::B => Some(format!("dense:{}x1", 2 * rows)),
        Variant::ABullet => Some("ord:2,1".into()),
        _ => None,
    }
}

/// The intended witness of `variant`, placed on `frame`.
fn build_model(
    tiles: &TileSet,
    tiling: &PeriodicTiling,
    variant: Variant,
    frame: Option<&str>,
    wb: &WindowBounds,
    rows: usize,
) -> Result<PredicateModel> {
    let frame = frame.map(str::to_string).or_else(|| default_frame(variant, rows));
    let spec: Option<FrameSpec> = frame.as_deref().map(str::parse).transpose()?;
    let model = match &spec {
        Some(FrameSpec::Ordinal(m, k)) => build_ordinal(tiles, tiling, *m, *k, wb.horizon, wb.bound)?,
        Some(FrameSpec::Dense(c, f)) => build_dense(tiles, tiling, *c, *f, wb.bound)?,
        _ => {
            let base = match variant {
                Variant::A | Variant::B | Variant::ABullet => build_m0(tiles, tiling, wb.horizon, wb.bound)?,
                Variant::APrime => build_m0_prime(tiles, tiling, wb.horizon, wb.bound)?,
                Variant::AStar | Variant::APlus => build_m0_star(tiles, tiling, wb.blocks, wb.bound)?,
            };
            match (&spec, &frame) {
                (Some(s), Some(raw)) if *s != FrameSpec::NatLe => {
                    base.rebase(s.build(base.frame().len())?)?.with_param("frame", raw)
                }
                _ => base,
            }
        }
    };
    Ok(model)
}

fn default_world(model: &PredicateModel) -> usize {
    match model.frame().kind() {
        FrameKind::Dense { .. } => model.frame().chain().first().copied().unwrap_or(0),
        _ => 0,
    }
}

fn generator_variant(model: &PredicateModel) -> Variant {
    match model.source() {
        ModelSource::Generated { generator, .. } => match generator.as_str() {
            "M0prime" => Variant::APrime,
            "M0star" => Variant::AStar,
            _ => Variant::A,
        },
        ModelSource::Explicit => Variant::A,
    }
}

fn check(model: &PredicateModel, artifact: &ReductionArtifact, world: usize, step_limit: Option<u64>) -> Result<CheckReport> {
    let mut opts = CheckOptions::default();
    if let Some(l) = step_limit {
        opts.step_limit = l;
    }
    Ok(check_artifact(model, artifact, world, opts)?)
}

fn metrics_text(variant: Variant, conjuncts: usize, m: &Metrics) -> String {
    let vars: Vec<&str> = m.variables.iter().map(String::as_str).collect();
    let letters: Vec<String> = m.letters.iter().map(|(l, c)| format!("{l}:{}", c.arity)).collect();
    format!(
        "variant {variant}\nconjuncts {conjuncts}\nsize {}\nmodal depth {}\nquantifier depth {}\nvariables {} ({})\nletters {{{}}}\n",
        m.size,
        m.modal_depth,
        m.quantifier_depth,
        vars.len(),
        vars.join(" "),
        letters.join(", ")
    )
}

fn gen(a: &TilesArgs, variant: &str, out: Option<&Path>, report: ReportFormat, t: &mut Timer) -> Result<ExitCode> {
    let tiles = load_tiles(a)?;
    let variant = parse_variant(variant)?;
    let art = gen_variant(&tiles, variant)?;
    let m = art.metrics()?;
    t.phase("gen");
    if let Some(p) = out {
        fs::write(p, art.to_file())?;
    }
    let text = match report {
        ReportFormat::Text => metrics_text(variant, art.conjuncts.len(), &m),
        ReportFormat::Structured => pretty(&json!({ "variant": variant, "conjuncts": art.conjuncts.len(), "metrics": m }))?,
    };
    emit(&text, None)?;
    Ok(ExitCode::SUCCESS)
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

fn extraction_text(e: &Extraction, diffs: Option<&[CellDiff]>) -> String {
    let mut s = format!(
        "marks {}{}\nrepresentative worlds {}\nwindow {}x{}\nmatching: {} ({} violations)\n",
        join(&e.trace.marks),
        if e.trace.truncated { " (truncated)" } else { "" },
        join(&e.trace.worlds),
        e.grid.width(),
        e.grid.height(),
        if e.report.ok() { "ok" } else { "FAILED" },
        e.report.violations.len()
    );
    match diffs {
        None => s.push_str("diff: no expected window\n"),
        Some([]) => s.push_str("diff: empty\n"),
        Some(d) => {
            s.push_str(&format!("diff: {} cells\n", d.len()));
            for c in d {
                s.push_str(&format!("  {c}\n"));
            }
        }
    }
    s
}

fn extraction_json(e: &Extraction, diffs: Option<&[CellDiff]>) -> serde_json::Value {
    json!({
        "trace": e.trace,
        "grid": e.grid,
        "matching": e.report,
        "provenance": e.provenance,
        "diff": diffs,
    })
}

fn pipeline(
    a: &TilesArgs,
    variant: &str,
    frame: Option<&str>,
    bounds: &BoundArgs,
    out: Option<&Path>,
    report: ReportFormat,
    t: &mut Timer,
) -> Result<ExitCode> {
    let tiles = load_tiles(a)?;
    let variant = parse_variant(variant)?;
    let tiling = periodic(&tiles, bounds.max_period)?;
    let art = gen_variant(&tiles, variant)?;
    t.phase("gen");
    let wb = resolve_bounds(&tiles, variant, bounds);
    let model = build_model(&tiles, &tiling, variant, frame, &wb, bounds.rows)?;
    t.phase("build");
    let world = default_world(&model);
    let rep = check(&model, &art, world, None)?;
    t.phase("check");
    let e = extract_tiling(&model, &tiles, variant, bounds.cols, bounds.rows)?;
    let expected = tiling.unfold(bounds.cols, bounds.rows);
    let diffs = diff_windows(&expected, &e.grid);
    t.phase("extract");
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("artifact.txt"), art.to_file())?;
        fs::write(dir.join("model.txt"), write_model(&model)?)?;
        fs::write(dir.join("check.txt"), rep.to_string())?;
        fs::write(dir.join("grid.txt"), e.grid.to_file())?;
        fs::write(dir.join("expected.txt"), expected.to_file())?;
        fs::write(dir.join("provenance.txt"), e.provenance_file())?;
    }
    let text = match report {
        ReportFormat::Text => format!("{rep}{}", extraction_text(&e, Some(&diffs))),
        ReportFormat::Structured => pretty(&json!({
            "variant": variant,
            "world": world,
            "check": rep,
            "extraction": extraction_json(&e, Some(&diffs)),
        }))?,
    };
    emit(&text, None)?;
    Ok(verdict_code(!rep.has_false() && e.report.ok() && diffs.is_empty()))
}
