use std::fs;
use std::path::PathBuf;

use clap::Args;
use honeycomb_core::colorings::{
    config_count, cycles_to_json, dedup_stats, enumerate_cycles, read_checkpoint, write_checkpoint,
    ConfigSpace,
};
use honeycomb_core::evaluator::{build_trace, evaluate_on, EvalRequest, EvalResponse};
use honeycomb_core::lattice::{build_h, pixels_to_coloring, PixelGrid};
use honeycomb_core::phase_space::{
    blocks_csv, build_matrix, detect_blocks, evaluate_configs, exact_block_spread, heatmap_pgm,
    is_exactly_block_diagonal, rank_states, ranking_csv, ranking_json, same_partition,
    streaming_matrix, write_matrix, EvalVector, TransitionMatrix,
};
use honeycomb_core::tl_oracle::{oracle_evaluate_with, OracleConfig};
use honeycomb_core::{Engine, Error, QParam, QScalar, SpinColor};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::output::{emit, write_with_meta};
use crate::Global;

type Result<T> = std::result::Result<T, Error>;

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Patch size.
    #[arg(long)]
    pub n: Option<usize>,
    /// Color every edge with this value.
    #[arg(long, conflicts_with_all = ["coloring", "pixels"])]
    pub uniform_color: Option<SpinColor>,
    /// Edge colors: whitespace or comma separated integers, a JSON array, or
    /// a JSON evaluation request.
    #[arg(long, conflicts_with = "pixels")]
    pub coloring: Option<PathBuf>,
    /// Grayscale grid (text `n N` header or binary PGM); sets n.
    #[arg(long)]
    pub pixels: Option<PathBuf>,
    /// Print a JSON response instead of the bare value.
    #[arg(long)]
    pub json: bool,
    /// Include the symbolic reduction trace (implies --json).
    #[arg(long)]
    pub trace: bool,
    /// Cross-check against the strand-expansion oracle.
    #[arg(long)]
    pub oracle: bool,
    /// Basis-size budget for the oracle.
    #[arg(long, default_value_t = 2_000_000)]
    pub oracle_budget: u64,
}

fn parse_coloring(text: &str) -> Result<(Option<usize>, Vec<SpinColor>)> {
    let t = text.trim();
    if t.starts_with('{') {
        let req: EvalRequest = serde_json::from_str(t)?;
        return Ok((Some(req.n), req.coloring));
    }
    if t.starts_with('[') {
        return Ok((None, serde_json::from_str(t)?));
    }
    let colors = t
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| Error::Parse(format!("bad color {s:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((None, colors))
}

pub fn eval(engine: &Engine, a: EvalArgs) -> Result<()> {
    let p = engine.param();
    let (n, colors) = if let Some(path) = &a.pixels {
        let grid = PixelGrid::load(path)?;
        let (_, coloring) = pixels_to_coloring(&grid);
        (grid.n, coloring.colors)
    } else {
        let n = a.n;
        let (file_n, colors) = match (&a.coloring, a.uniform_color) {
            (Some(path), _) => parse_coloring(&fs::read_to_string(path)?)?,
            (None, Some(c)) => {
                let n = n.ok_or_else(|| Error::InvalidParam("--uniform-color needs --n".into()))?;
                (None, vec![c; build_h(n)?.edges.len()])
            }
            (None, None) => {
                return Err(Error::InvalidParam(
                    "give one of --uniform-color, --coloring or --pixels".into(),
                ))
            }
        };
        let n = match (n, file_n) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::InvalidParam(format!(
                    "--n {a} disagrees with the request's n = {b}"
                )))
            }
            (Some(a), _) | (None, Some(a)) => a,
            (None, None) => return Err(Error::InvalidParam("--n is required".into())),
        };
        (n, colors)
    };
    let value = evaluate_on(engine, n, &colors)?;
    if a.oracle {
        let net = build_h(n)?;
        let planar = net.to_planar()?;
        let reference = oracle_evaluate_with(
            &planar,
            &colors,
            p,
            OracleConfig {
                budget: a.oracle_budget,
            },
        )?;
        let agrees = match p {
            QParam::Classical => reference == value,
            QParam::RootOfUnity(_) => reference.relative_diff(&value) <= 1e-9,
        };
        if !agrees {
            return Err(Error::Invariant(format!(
                "oracle gives {reference}, evaluator gives {value}"
            )));
        }
        eprintln!("oracle agrees");
    }
    if a.json || a.trace {
        let resp = EvalResponse {
            kind: "H".into(),
            n,
            backend: p,
            coloring: colors,
            value,
            trace: if a.trace { Some(build_trace(n)?) } else { None },
        };
        emit(serde_json::to_string_pretty(&resp)?);
    } else {
        emit(value);
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct CyclesArgs {
    /// Patch size.
    #[arg(long)]
    pub n: usize,
    /// Write the cycle list as JSON to the output directory.
    #[arg(long)]
    pub write: bool,
    /// Give up if more cycles than this are found.
    #[arg(long, default_value_t = 1_000_000)]
    pub max_cycles: u64,
}

pub fn cycles(g: &Global, a: CyclesArgs) -> Result<()> {
    let cycles = enumerate_cycles(a.n)?;
    if cycles.len() as u64 > a.max_cycles {
        return Err(Error::StorageBudget {
            needed: cycles.len() as u64,
            budget: a.max_cycles,
        });
    }
    if a.write {
        let name = format!("cycles-n{}.json", a.n);
        let path = write_with_meta(
            &g.out,
            &name,
            cycles_to_json(a.n, &cycles)?.as_bytes(),
            json!({ "command": "cycles", "n": a.n, "count": cycles.len() }),
        )?;
        eprintln!("wrote {}", path.display());
    }
    emit(cycles.len());
    Ok(())
}

#[derive(Args, Debug)]
pub struct ConfigsArgs {
    /// Patch size.
    #[arg(long)]
    pub n: usize,
    /// Largest total cycle multiplicity.
    #[arg(long)]
    pub cmax: usize,
    /// Print the closed-form count only.
    #[arg(long)]
    pub count_only: bool,
    /// First rank to stream.
    #[arg(long, default_value_t = 0)]
    pub start: u128,
    /// One past the last rank to stream; defaults to the end.
    #[arg(long)]
    pub end: Option<u128>,
    /// Resume from this cursor file if it exists and update it afterwards.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Report how many configurations repeat an earlier coloring.
    #[arg(long)]
    pub dedup: bool,
    /// Refuse to stream more configurations than this.
    #[arg(long, default_value_t = 5_000_000)]
    pub max_configs: u64,
}

pub fn configs(g: &Global, a: ConfigsArgs) -> Result<()> {
    let cycles = enumerate_cycles(a.n)?;
    if a.count_only {
        eprintln!("{} cycles", cycles.len());
        emit(config_count(cycles.len() as u64, a.cmax as u64));
        return Ok(());
    }
    let edges = build_h(a.n)?.edges.len();
    let space = ConfigSpace::new(cycles, edges, a.cmax)?;
    let mut start = a.start;
    if let Some(cp) = &a.checkpoint {
        if cp.exists() {
            start = read_checkpoint(fs::File::open(cp)?)?;
            eprintln!("resuming at rank {start}");
        }
    }
    let end = a.end.unwrap_or(space.len()).min(space.len());
    let span = end.saturating_sub(start);
    if span > a.max_configs as u128 {
        return Err(Error::StorageBudget {
            needed: span.try_into().unwrap_or(u64::MAX),
            budget: a.max_configs,
        });
    }
    let mut lines = String::new();
    for c in space.range(start, end) {
        lines.push_str(&serde_json::to_string(&c)?);
        lines.push('\n');
    }
    let name = format!("configs-n{}-c{}-{start}-{end}.jsonl", a.n, a.cmax);
    let mut meta = json!({
        "command": "configs", "n": a.n, "cmax": a.cmax,
        "start": start.to_string(), "end": end.to_string(), "total": space.len().to_string(),
    });
    if a.dedup {
        let stats = dedup_stats(space.range(start, end));
        meta["dedup"] = serde_json::to_value(stats)?;
        eprintln!(
            "{} configurations, {} distinct colorings, {} duplicates",
            stats.total, stats.distinct, stats.duplicates
        );
    }
    let path = write_with_meta(&g.out, &name, lines.as_bytes(), meta)?;
    if let Some(cp) = &a.checkpoint {
        write_checkpoint(fs::File::create(cp)?, end)?;
    }
    eprintln!("wrote {}", path.display());
    emit(span);
    Ok(())
}

#[derive(Args, Debug)]
pub struct MatrixArgs {
    /// Patch size.
    #[arg(long)]
    pub n: usize,
    /// Largest total cycle multiplicity.
    #[arg(long)]
    pub cmax: usize,
    /// Storage budget for the dense matrix, in bytes.
    #[arg(long, default_value_t = honeycomb_core::phase_space::DEFAULT_MATRIX_BUDGET)]
    pub budget_bytes: u64,
    /// Refuse to evaluate more configurations than this.
    #[arg(long, default_value_t = 5_000_000)]
    pub max_configs: u64,
}

fn space_evals(engine: &Engine, n: usize, cmax: usize, max_configs: u64) -> Result<EvalVector> {
    let space = ConfigSpace::for_patch(n, cmax)?;
    if space.len() > max_configs as u128 {
        return Err(Error::StorageBudget {
            needed: space.len().try_into().unwrap_or(u64::MAX),
            budget: max_configs,
        });
    }
    EvalVector::new(evaluate_configs(engine, n, &space, 0, space.len())?)
}

fn backend_meta(p: QParam) -> serde_json::Value {
    json!(p.to_string())
}

pub fn matrix(g: &Global, engine: &Engine, a: MatrixArgs) -> Result<()> {
    let evals = space_evals(engine, a.n, a.cmax, a.max_configs)?;
    let m = build_matrix(&evals, a.budget_bytes)?;
    check_matrix(&m)?;
    let mut buf = Vec::new();
    write_matrix(&mut buf, &m)?;
    let name = format!("matrix-n{}-c{}.hctm", a.n, a.cmax);
    let path = write_with_meta(
        &g.out,
        &name,
        &buf,
        json!({ "command": "matrix", "n": a.n, "cmax": a.cmax, "dim": m.dim,
                "backend": backend_meta(engine.param()), "order": "configuration index" }),
    )?;
    eprintln!("wrote {}", path.display());
    emit(m.dim);
    Ok(())
}

/// Symmetry, range and unit diagonal for nonzero evaluations.
fn check_matrix(m: &TransitionMatrix) -> Result<()> {
    for i in 0..m.dim {
        let d = m.entry(i, i);
        if d != 1.0 && d != 0.0 {
            return Err(Error::Invariant(format!("diagonal entry {i} is {d}")));
        }
        for j in 0..i {
            let x = m.entry(i, j);
            if x != m.entry(j, i) || !(0.0..=1.0).contains(&x) {
                return Err(Error::Invariant(format!(
                    "entry ({i}, {j}) = {x} breaks symmetry or range"
                )));
            }
        }
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct RankArgs {
    /// Patch size.
    #[arg(long)]
    pub n: usize,
    /// Largest total cycle multiplicity.
    #[arg(long)]
    pub cmax: usize,
    /// Compute row sums without storing the matrix.
    #[arg(long)]
    pub stream: bool,
    /// Entries at least 1 - tol count as unit.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Storage budget for the dense matrix, in bytes.
    #[arg(long, default_value_t = honeycomb_core::phase_space::DEFAULT_MATRIX_BUDGET)]
    pub budget_bytes: u64,
    /// Refuse to evaluate more configurations than this.
    #[arg(long, default_value_t = 5_000_000)]
    pub max_configs: u64,
    /// Largest heatmap side in pixels.
    #[arg(long, default_value_t = 512)]
    pub heatmap_side: usize,
    /// Also draw the heatmap in streaming mode.
    #[arg(long)]
    pub heatmap: bool,
}

pub fn rank(g: &Global, engine: &Engine, a: RankArgs) -> Result<()> {
    let evals = space_evals(engine, a.n, a.cmax, a.max_configs)?;
    let m = if a.stream {
        streaming_matrix(&evals)
    } else {
        build_matrix(&evals, a.budget_bytes)?
    };
    let m = rank_states(m);
    let blocks = detect_blocks(&m, a.tol)?;
    if !same_partition(&blocks.as_sets(), &evals.magnitude_classes()) {
        return Err(Error::Invariant(
            "blocks differ from the equal-magnitude classes".into(),
        ));
    }
    let spread = exact_block_spread(&m, &blocks).map(|s| s.to_string());
    let stem = format!("rank-n{}-c{}", a.n, a.cmax);
    let meta = json!({
        "command": "rank", "n": a.n, "cmax": a.cmax, "dim": m.dim, "stream": a.stream,
        "backend": backend_meta(engine.param()), "tol": a.tol, "blocks": blocks.blocks.len(),
        "exact_block_spread": spread,
    });
    let mut written = vec![
        write_with_meta(
            &g.out,
            &format!("{stem}.csv"),
            ranking_csv(&m).as_bytes(),
            meta.clone(),
        )?,
        write_with_meta(
            &g.out,
            &format!("{stem}.json"),
            ranking_json(&m, &blocks)?.as_bytes(),
            meta.clone(),
        )?,
        write_with_meta(
            &g.out,
            &format!("{stem}-blocks.csv"),
            blocks_csv(&blocks).as_bytes(),
            meta.clone(),
        )?,
    ];
    if m.is_dense() || a.heatmap {
        written.push(write_with_meta(
            &g.out,
            &format!("{stem}.pgm"),
            &heatmap_pgm(&m, a.heatmap_side),
            meta.clone(),
        )?);
    }
    if m.is_dense() {
        let block_diagonal = is_exactly_block_diagonal(&evals, &blocks);
        if !block_diagonal {
            return Err(Error::Invariant(
                "ranked matrix is not block diagonal".into(),
            ));
        }
        let mut buf = Vec::new();
        write_matrix(&mut buf, &m)?;
        written.push(write_with_meta(
            &g.out,
            &format!("{stem}.hctm"),
            &buf,
            meta,
        )?);
    }
    for p in written {
        eprintln!("wrote {}", p.display());
    }
    emit(format!(
        "{} configurations, {} blocks",
        m.dim,
        blocks.blocks.len()
    ));
    Ok(())
}

#[derive(Args, Debug)]
pub struct GoldenArgs {
    /// Write reference values to this file.
    #[arg(long, conflicts_with = "check")]
    pub write: Option<PathBuf>,
    /// Recompute and compare against this file.
    #[arg(long)]
    pub check: Option<PathBuf>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct GoldenCase {
    pub name: String,
    pub n: usize,
    pub backend: QParam,
    pub coloring: Vec<SpinColor>,
    pub value: QScalar,
}

#[derive(Serialize, Deserialize, Debug)]
pub struct GoldenFile {
    pub format: String,
    pub version: u32,
    pub cases: Vec<GoldenCase>,
}

type GoldenInput = (String, usize, QParam, Vec<SpinColor>);

fn golden_inputs() -> Result<Vec<GoldenInput>> {
    let mut out = Vec::new();
    for n in 1..=3 {
        let edges = build_h(n)?.edges.len();
        let top = if n == 3 { 2 } else { 4 };
        for c in 0..=top {
            out.push((
                format!("H{n} uniform {c}"),
                n,
                QParam::Classical,
                vec![c; edges],
            ));
        }
    }
    let edges = build_h(2)?.edges.len();
    for c in [1, 2, 3] {
        out.push((
            format!("H2 uniform {c} at r=7"),
            2,
            QParam::RootOfUnity(7),
            vec![c; edges],
        ));
    }
    let grid = PixelGrid::new(3, vec![vec![1, 2], vec![3, 0]])?;
    let (_, coloring) = pixels_to_coloring(&grid);
    out.push((
        "H2 pixels 1 2 / 3 0".into(),
        2,
        QParam::Classical,
        coloring.colors,
    ));
    let space = ConfigSpace::for_patch(2, 2)?;
    for r in [0u128, 5, 13, 14, 60, 118] {
        out.push((
            format!("H2 cycle config {r}"),
            2,
            QParam::Classical,
            space.config(r)?.colors,
        ));
    }
    let space = ConfigSpace::for_patch(3, 2)?;
    for r in [0u128, 100, 279, 5000] {
        out.push((
            format!("H3 cycle config {r}"),
            3,
            QParam::Classical,
            space.config(r)?.colors,
        ));
    }
    Ok(out)
}

fn golden_cases() -> Result<Vec<GoldenCase>> {
    golden_inputs()?
        .into_iter()
        .map(|(name, n, backend, coloring)| {
            let value = evaluate_on(&Engine::shared(backend), n, &coloring)?;
            Ok(GoldenCase {
                name,
                n,
                backend,
                coloring,
                value,
            })
        })
        .collect()
}

pub fn golden(a: GoldenArgs) -> Result<()> {
    let cases = golden_cases()?;
    match (&a.write, &a.check) {
        (Some(path), _) => {
            let file = GoldenFile {
                format: "honeycomb-golden".into(),
                version: 1,
                cases,
            };
            let mut text = serde_json::to_string_pretty(&file)?;
            text.push('\n');
            fs::write(path, text)?;
            emit(file.cases.len());
        }
        (None, Some(path)) => {
            let file: GoldenFile = serde_json::from_str(&fs::read_to_string(path)?)?;
            let mut bad = 0;
            for want in &file.cases {
                let got = evaluate_on(&Engine::shared(want.backend), want.n, &want.coloring)?;
                let ok = match want.backend {
                    QParam::Classical => got == want.value,
                    QParam::RootOfUnity(_) => got.relative_diff(&want.value) <= 1e-9,
                };
                if !ok {
                    eprintln!("{}: expected {}, got {got}", want.name, want.value);
                    bad += 1;
                }
            }
            if bad > 0 {
                return Err(Error::Invariant(format!("{bad} golden values differ")));
            }
            emit(format!("{} golden values match", file.cases.len()));
        }
        (None, None) => {
            for c in cases {
                emit(format!("{}\t{}", c.name, c.value));
            }
        }
    }
    Ok(())
}
