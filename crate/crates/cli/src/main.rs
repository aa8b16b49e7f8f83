use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use schreier_lab::actions::{
    displacement_profile, faithfulness_witnesses, F2ZAction, F2ZConfig, TranslationAction, Window,
};
use schreier_lab::amoeba::{
    build_tower, freeness_witness, level_stats, load_tower, save_tower, AmoebaTower, TowerManifest, TowerStrategy,
    DEFAULT_BUDGET,
};
use schreier_lab::graphs::{schreier, LabeledGraph};
use schreier_lab::hyperfinite::{
    centered_squares, folner_search, partition_enumerate, partition_exact, partition_heuristic, vertex_mode_from,
    ExactLimits, FolnerOutcome, FolnerStrategy, HeuristicStrategy, PartitionCertificate,
};
use schreier_lab::localstats::{census, BallCensus};
use schreier_lab::rational::{self, Q};
use schreier_lab::words::{Letter, Presentation, Word};

const BUDGET_VAR: &str = "SCHREIER_LAB_BUDGET";

#[derive(Parser)]
#[command(name = "schreier-lab", version, about = "Finite-window Schreier graph, partition and amoeba tower tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Schreier graph of an action on a finite window.
    Schreier {
        #[arg(long, value_enum)]
        action: ActionKind,
        /// f2z: `default` or a config file.
        #[arg(long, default_value = "default")]
        config: String,
        /// f2z: window half-width; translation: cube radius.
        #[arg(long)]
        window: i64,
        /// translation: dimension.
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for a set with small isoperimetric constant.
    Folner {
        /// Graph file; balls around the basepoint are tried.
        #[arg(long = "in", conflicts_with = "grid")]
        input: Option<PathBuf>,
        /// Use the Z^2 translation graph of this radius and centered squares.
        #[arg(long)]
        grid: Option<i64>,
        #[arg(long, default_value_t = 0)]
        basepoint: usize,
        /// Target constant as `p/q`.
        #[arg(long)]
        target: String,
        #[arg(long)]
        max_size: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Remove edges so that components have at most K vertices.
    Partition {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "K")]
        k: usize,
        #[arg(long, value_enum, default_value_t = Solver::Heuristic)]
        mode: Solver,
        #[arg(long, default_value = "planar_separator")]
        strategy: String,
        /// Report removed vertices instead of edges.
        #[arg(long)]
        vertex: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Census of rooted ball types.
    Census {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        radius: usize,
        #[arg(long)]
        unlabeled: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Displacement and faithfulness checks for the F2 action on Z.
    F2z {
        #[arg(long, default_value = "default")]
        config: String,
        /// Window half-width.
        #[arg(long)]
        window: i64,
        #[arg(long, default_value_t = 8)]
        check_displacement: u64,
        /// Also search moved points for every reduced word up to this length.
        #[arg(long)]
        faithful: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build an amoeba tower into a directory.
    Tower {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "search")]
        strategy: String,
    },
    /// A moved point in the fiber of a vertex.
    Witness {
        #[arg(long)]
        tower: PathBuf,
        /// Word over A, B, C, D, e.g. "A C B".
        #[arg(long)]
        word: String,
        #[arg(long)]
        level: usize,
        #[arg(long)]
        vertex: usize,
    },
    /// Per-level partition, census and measure checks of a tower.
    Stats {
        #[arg(long)]
        tower: PathBuf,
        #[arg(long = "K")]
        k: usize,
        #[arg(long)]
        radius: Option<usize>,
        /// Skip the census on levels with more vertices.
        #[arg(long, default_value_t = 1 << 12)]
        census_limit: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-load an artifact, re-verify it and check it re-serializes identically.
    Verify {
        #[arg(long, value_enum)]
        kind: ArtifactKind,
        #[arg(long = "in")]
        input: PathBuf,
        /// Graph the certificate or census refers to.
        #[arg(long)]
        graph: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ActionKind {
    F2z,
    Translation,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum Solver {
    Exact,
    Enumerate,
    Heuristic,
}

#[derive(Clone, Copy, ValueEnum)]
enum ArtifactKind {
    Graph,
    Certificate,
    Census,
    Tower,
}

enum Failure {
    Precondition { kind: &'static str, message: String },
    Io(String),
}

fn pre(kind: &'static str, e: impl ToString) -> Failure {
    Failure::Precondition {
        kind,
        message: e.to_string(),
    }
}

fn io_err(path: &Path, e: io::Error) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Precondition { kind, message }) => {
            eprintln!("{}", json!({ "error": kind, "message": message }));
            ExitCode::from(2)
        }
        Err(Failure::Io(message)) => {
            eprintln!("{}", json!({ "error": "io", "message": message }));
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Schreier {
            action,
            config,
            window,
            dim,
            format,
            out,
        } => cmd_schreier(action, &config, window, dim, format, out.as_deref()),
        Command::Folner {
            input,
            grid,
            basepoint,
            target,
            max_size,
            out,
        } => cmd_folner(input.as_deref(), grid, basepoint, &target, max_size, out.as_deref()),
        Command::Partition {
            input,
            k,
            mode,
            strategy,
            vertex,
            out,
        } => cmd_partition(&input, k, mode, &strategy, vertex, out.as_deref()),
        Command::Census {
            input,
            radius,
            unlabeled,
            out,
        } => {
            let g = read_graph(&input)?;
            let c = census(&g, radius, !unlabeled);
            println!("census radius {radius}: {} classes over {} vertices", c.class_count(), c.total);
            emit(out.as_deref(), &c.to_json())
        }
        Command::F2z {
            config,
            window,
            check_displacement,
            faithful,
            out,
        } => cmd_f2z(&config, window, check_displacement, faithful, out.as_deref()),
        Command::Tower { k, out, strategy } => cmd_tower(k, &out, &strategy),
        Command::Witness {
            tower,
            word,
            level,
            vertex,
        } => cmd_witness(&tower, &word, level, vertex),
        Command::Stats {
            tower,
            k,
            radius,
            census_limit,
            out,
        } => cmd_stats(&tower, k, radius, census_limit, out.as_deref()),
        Command::Verify { kind, input, graph } => cmd_verify(kind, &input, graph.as_deref()),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn read_graph(path: &Path) -> Result<LabeledGraph, Failure> {
    LabeledGraph::from_json(&read(path)?).map_err(|e| pre("graph", e))
}

/// Writes `contents` to a sibling temporary file, then renames it over `path`.
fn write_atomic(path: &Path, contents: &str) -> Outcome {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents).map_err(|e| io_err(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| io_err(path, e))
}

/// JSON goes to `out` when given, otherwise to standard output.
fn emit(out: Option<&Path>, contents: &str) -> Outcome {
    match out {
        Some(path) => {
            write_atomic(path, contents)?;
            println!("wrote {}", path.display());
            Ok(())
        }
        None => {
            println!("{contents}");
            Ok(())
        }
    }
}

fn to_pretty(value: &impl Serialize) -> String {
    serde_json::to_string_pretty(value).expect("output serializes")
}

fn rational_fields(value: &Q) -> (String, f64) {
    (rational::to_string(value), rational::to_f64(value))
}

fn budget() -> Result<usize, Failure> {
    match std::env::var(BUDGET_VAR) {
        Ok(text) => text
            .trim()
            .parse()
            .map_err(|_| pre("budget", format!("{BUDGET_VAR}={text:?} is not a vertex count"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn f2z_config(source: &str, window: Window) -> Result<F2ZConfig, Failure> {
    if source == "default" {
        return Ok(F2ZConfig::default_covering(window.lo, window.hi));
    }
    read(Path::new(source))?.parse().map_err(|e| pre("config", e))
}

fn cmd_schreier(action: ActionKind, config: &str, window: i64, dim: usize, format: Format, out: Option<&Path>) -> Outcome {
    if window < 0 {
        return Err(pre("window", "window must be non-negative"));
    }
    let (g, dropped) = match action {
        ActionKind::F2z => {
            let w = Window::symmetric(window);
            let a = F2ZAction::new(f2z_config(config, w)?);
            let points: Vec<i64> = w.points().collect();
            let sg = schreier(&a, &points);
            (sg.graph, sg.dropped)
        }
        ActionKind::Translation => {
            if dim == 0 {
                return Err(pre("dim", "dimension must be positive"));
            }
            let a = TranslationAction::cube(dim, window);
            let sg = schreier(&a, &a.points());
            (sg.graph, sg.dropped)
        }
    };
    println!(
        "{} vertices, {} edges, {} boundary incidences dropped",
        g.vertex_count(),
        g.edge_count(),
        dropped
    );
    let text = match format {
        Format::Json => g.to_json(),
        Format::Dot => g.to_dot(),
    };
    emit(out, &text)
}

fn cmd_folner(
    input: Option<&Path>,
    grid: Option<i64>,
    basepoint: usize,
    target: &str,
    max_size: usize,
    out: Option<&Path>,
) -> Outcome {
    let target = rational::parse(target).ok_or_else(|| pre("target", format!("{target:?} is not p/q")))?;
    let (g, strategy, basepoint) = match (input, grid) {
        (Some(path), None) => (read_graph(path)?, FolnerStrategy::Balls, basepoint),
        (None, Some(radius)) => {
            let a = TranslationAction::cube(2, radius);
            let points = a.points();
            let origin = points.iter().position(|p| p.iter().all(|&c| c == 0)).unwrap();
            let squares = centered_squares(&points, (2 * radius + 1) as usize);
            (schreier(&a, &points).graph, FolnerStrategy::Sequence(squares), origin)
        }
        _ => return Err(pre("usage", "give exactly one of --in and --grid")),
    };
    let outcome = folner_search(&g, basepoint, target, max_size, &strategy).map_err(|e| pre("folner", e))?;
    let value = match outcome {
        FolnerOutcome::Found { set, constant, step } => {
            let (c, d) = rational_fields(&constant);
            println!("found set of {} vertices at step {step}, constant {c}", set.len());
            json!({ "found": true, "step": step, "size": set.len(), "constant": c, "constant_decimal": d, "set": set })
        }
        FolnerOutcome::Failure {
            best_constant,
            best_size,
            tried,
        } => {
            let (c, d) = rational_fields(&best_constant);
            println!("no set found after {tried} candidates; best constant {c} at size {best_size}");
            json!({ "found": false, "tried": tried, "best_size": best_size, "best_constant": c, "best_constant_decimal": d })
        }
    };
    emit(out, &to_pretty(&value))
}

fn cmd_partition(input: &Path, k: usize, mode: Solver, strategy: &str, vertex: bool, out: Option<&Path>) -> Outcome {
    let g = read_graph(input)?;
    let mut cert = match mode {
        Solver::Exact => partition_exact(&g, k, ExactLimits::default()),
        Solver::Enumerate => partition_enumerate(&g, k),
        Solver::Heuristic => {
            let strategy: HeuristicStrategy = strategy.parse().map_err(|e: String| pre("strategy", e))?;
            partition_heuristic(&g, k, strategy, None)
        }
    }
    .map_err(|e| pre("partition", e))?;
    if vertex {
        cert = vertex_mode_from(&g, &cert);
    }
    cert.verify(&g).map_err(|e| pre("certificate", e))?;
    println!(
        "K = {}: removed {} of {} vertices, epsilon {}",
        cert.k,
        cert.cost(),
        g.vertex_count(),
        rational::to_string(&cert.epsilon)
    );
    emit(out, &cert.to_json())
}

fn cmd_f2z(config: &str, window: i64, n_max: u64, faithful: Option<usize>, out: Option<&Path>) -> Outcome {
    if window < 1 || n_max < 1 {
        return Err(pre("window", "window and --check-displacement must be positive"));
    }
    let w = Window::symmetric(window);
    let a = F2ZAction::new(f2z_config(config, w)?);
    let mut profiles = Vec::new();
    for generator in 0..2 {
        let p = displacement_profile(&a, Letter::new(generator, false), w, None, n_max).map_err(|e| pre("f2z", e))?;
        println!(
            "{}: {} cut orbits, boundary correction {}",
            p.generator,
            p.cut_orbits,
            rational::to_string(&p.boundary_correction)
        );
        for row in &p.rows {
            println!(
                "  n = {:>2}  fraction {:>12}  bound {:>12}  {}",
                row.n,
                rational::to_string(&row.fraction),
                rational::to_string(&row.bound),
                if row.holds { "ok" } else { "EXCEEDS" }
            );
        }
        let mut value = serde_json::to_value(&p).expect("profile serializes");
        for row in value["rows"].as_array_mut().unwrap() {
            for key in ["fraction", "bound"] {
                let q = rational::parse(row[key].as_str().unwrap()).unwrap();
                row[format!("{key}_decimal")] = json!(rational::to_f64(&q));
            }
        }
        profiles.push(value);
    }
    let mut report = json!({ "window": w, "profiles": profiles });
    if let Some(len) = faithful {
        let points: Vec<i64> = w.points().collect();
        let r = faithfulness_witnesses(&a, len, &points);
        let missing: Vec<String> = r.unwitnessed().iter().map(|w| w.to_string()).collect();
        println!(
            "faithfulness up to length {len}: {} words, {} without witness",
            r.witnesses.len(),
            missing.len()
        );
        report["faithfulness"] = json!({ "max_len": len, "words": r.witnesses.len(), "unwitnessed": missing });
    }
    emit(out, &to_pretty(&report))
}

fn cmd_tower(k: usize, out: &Path, strategy: &str) -> Outcome {
    if k == 0 {
        return Err(pre("k", "k must be at least 1"));
    }
    let strategy: TowerStrategy = strategy.parse().map_err(|e: String| pre("strategy", e))?;
    let tower = build_tower(k, strategy, budget()?).map_err(|e| pre("tower", e))?;
    let manifest = save_tower(&tower, out).map_err(|e| io_err(out, e))?;
    summarize_tower(&manifest);
    Ok(())
}

fn summarize_tower(manifest: &TowerManifest) {
    println!("{} levels", manifest.levels.len());
    for entry in &manifest.levels {
        println!(
            "  level {:>2}: {:>8} vertices, tree radius {}",
            entry.level, entry.vertices, entry.tree_radius
        );
    }
    for (k, n) in &manifest.schedule {
        println!("  k = {k}: level {n}");
    }
}

fn open_tower(dir: &Path) -> Result<AmoebaTower, Failure> {
    if !dir.join("manifest.json").exists() {
        return Err(Failure::Io(format!("{}: no manifest.json", dir.display())));
    }
    load_tower(dir).map_err(|e| pre("tower", e))
}

fn cmd_witness(dir: &Path, word: &str, level: usize, vertex: usize) -> Outcome {
    let tower = open_tower(dir)?;
    let gamma = Arc::new(Presentation::gamma());
    let word = Word::parse(word, &gamma).map_err(|e| pre("word", e))?;
    let w = freeness_witness(&tower, &word, level, vertex).map_err(|e| pre("witness", e))?;
    println!(
        "{word} moves vertex {} of level {} to {}, above vertex {vertex} of level {level}",
        w.vertex, w.level, w.image
    );
    let value = json!({
        "word": word.to_string(),
        "query_level": level,
        "query_vertex": vertex,
        "witness": w,
    });
    emit(None, &to_pretty(&value))
}

fn cmd_stats(dir: &Path, k: usize, radius: Option<usize>, census_limit: usize, out: Option<&Path>) -> Outcome {
    let tower = open_tower(dir)?;
    let rows = level_stats(&tower, k, radius, census_limit).map_err(|e| pre("stats", e))?;
    let mut table = Vec::new();
    for row in &rows {
        let (eps, eps_d) = rational_fields(&row.certificate.epsilon);
        let disagreement = row.disagreement.as_ref().map(rational_fields);
        println!(
            "level {:>2}: {:>8} vertices, removed {:>7} (epsilon {}), transitive {}, pushforward {}",
            row.level,
            row.vertices,
            row.certificate.cost(),
            eps,
            row.transitive,
            row.pushforward_uniform
        );
        table.push(json!({
            "level": row.level,
            "vertices": row.vertices,
            "tree_radius": row.tree_radius,
            "K": row.certificate.k,
            "removed": row.certificate.cost(),
            "epsilon": eps,
            "epsilon_decimal": eps_d,
            "census_classes": row.census.as_ref().map(BallCensus::class_count),
            "disagreement": disagreement.as_ref().map(|d| d.0.clone()),
            "disagreement_decimal": disagreement.map(|d| d.1),
            "pushforward_uniform": row.pushforward_uniform,
            "transitive": row.transitive,
        }));
    }
    emit(out, &to_pretty(&json!({ "K": k, "radius": radius, "levels": table })))
}

fn same_bytes(original: &str, again: &str) -> Outcome {
    if original.trim_end() == again.trim_end() {
        Ok(())
    } else {
        Err(pre("roundtrip", "re-serialization differs from the input"))
    }
}

fn cmd_verify(kind: ArtifactKind, input: &Path, graph: Option<&Path>) -> Outcome {
    let need_graph = || -> Result<LabeledGraph, Failure> {
        read_graph(graph.ok_or_else(|| pre("usage", "--graph is required for this kind"))?)
    };
    let summary: Value = match kind {
        ArtifactKind::Graph => {
            let text = read(input)?;
            let g = LabeledGraph::from_json(&text).map_err(|e| pre("graph", e))?;
            same_bytes(&text, &g.to_json())?;
            json!({ "kind": "graph", "vertices": g.vertex_count(), "edges": g.edge_count() })
        }
        ArtifactKind::Certificate => {
            let text = read(input)?;
            let cert = PartitionCertificate::from_json(&text).map_err(|e| pre("certificate", e))?;
            same_bytes(&text, &cert.to_json())?;
            cert.verify(&need_graph()?).map_err(|e| pre("certificate", e))?;
            json!({ "kind": "certificate", "K": cert.k, "removed": cert.cost() })
        }
        ArtifactKind::Census => {
            let text = read(input)?;
            let c = BallCensus::from_json(&text).map_err(|e| pre("census", e))?;
            same_bytes(&text, &c.to_json())?;
            if let Some(path) = graph {
                let again = census(&read_graph(path)?, c.radius, c.labeled);
                if again != c {
                    return Err(pre("census", "census does not match the graph"));
                }
            }
            json!({ "kind": "census", "classes": c.class_count(), "total": c.total })
        }
        ArtifactKind::Tower => {
            let text = read(&input.join("manifest.json"))?;
            let tower = open_tower(input)?;
            same_bytes(&text, &TowerManifest::of(&tower).to_json())?;
            for (i, a) in tower.levels.iter().enumerate() {
                let file = input.join(format!("level_{}.json", i + 1));
                same_bytes(&read(&file)?, &a.to_graph().to_json())?;
            }
            json!({ "kind": "tower", "levels": tower.len() })
        }
    };
    println!("verified {summary}");
    Ok(())
}
