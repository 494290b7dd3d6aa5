//! `crflat` command-line front end.
//!
//! Exit codes: 0 success, 1 a check failed (the report is still written),
//! 2 invalid input (spec, expression, options), 3 unsupported geometry or
//! model, 4 I/O failure. Errors print one line `error[<kind>]: <message>`
//! on stderr.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crflat::export::{cells_obj, labeled_cells_csv};
use crflat::filling::{fill_family, fill_slice};
use crflat::glue::{euler_characteristic, parse_glue_expr, point_counts, validate};
use crflat::grid::DEFAULT_RESOLUTION;
use crflat::orbit::{census, spec_level_components};
use crflat::report::{analysis_levels, run_analyze, AnalyzeOptions, DEFAULT_SEED_DENSITY};
use crflat::specfile::resolve;
use crflat::{Error, Result};

#[derive(Parser)]
#[command(name = "crflat", version, about = "CR singularities, orbit census and Levi-flat fillings")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct GridArgs {
    /// Built-in fixture name or path to a JSON/TOML spec file.
    spec: String,
    /// Grid cells per axis.
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    resolution: usize,
    /// Comma-separated levels of the graph value.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    levels: Option<Vec<f64>>,
}

#[derive(Subcommand)]
enum Command {
    /// Complex points, normal forms, index check, orbit census and filling.
    Analyze {
        #[command(flatten)]
        grid: GridArgs,
        /// Newton seeds per axis.
        #[arg(long, default_value_t = DEFAULT_SEED_DENSITY)]
        seed_density: usize,
        /// Include wall-clock timings (makes the report non-reproducible).
        #[arg(long)]
        timings: bool,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Level-set component census; `--out DIR` also writes per-level cell CSVs.
    Orbits {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Slice-wise filling; `--out DIR` writes per-slice CSV and OBJ files.
    Fill {
        #[command(flatten)]
        grid: GridArgs,
        /// Interior point; reports which leaf contains it on each slice.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        seed: Option<Vec<f64>>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validity, endpoint census and Euler characteristic of a gluing expression.
    Glue {
        /// Expression such as "(b)->(d1)-(d2)->(b)".
        expr: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// OBJ mesh of the boundary cells of one slice, cut to a 3D slab.
    ExportMesh {
        #[command(flatten)]
        grid: GridArgs,
        /// Values of the axes beyond the third that fix the slab (default 0).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        slab: Option<Vec<f64>>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => 4,
        Error::UnsupportedGeometry(_) | Error::UnsupportedModel(_) => 3,
        _ => 2,
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text)?;
    Ok(())
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_text(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Analyze { grid, seed_density, timings, out } => {
            let spec = resolve(&grid.spec)?;
            let opts = AnalyzeOptions { resolution: grid.resolution, seed_density, levels: grid.levels, timings };
            let report = run_analyze(&spec, &opts)?;
            emit(out.as_deref(), &report.to_json())?;
            Ok(if report.passed { 0 } else { 1 })
        }
        Command::Orbits { grid, format, out } => {
            let spec = resolve(&grid.spec)?;
            let levels = analysis_levels(&spec, grid.levels.as_deref(), grid.resolution)?;
            let c = census(&spec, &levels, grid.resolution)?;
            if let Some(dir) = &out {
                for (k, &lvl) in c.levels.iter().enumerate() {
                    let lc = spec_level_components(&spec, lvl, grid.resolution)?;
                    write_text(&dir.join(format!("level_{k:03}.csv")), &labeled_cells_csv(&lc.shape, &lc.labels, "component"))?;
                }
            }
            let text = match format {
                Format::Json => to_json(&c),
                Format::Csv => {
                    let mut s = String::from("level,count\n");
                    for (l, n) in c.levels.iter().zip(&c.counts) {
                        s.push_str(&format!("{l},{n}\n"));
                    }
                    s
                }
            };
            emit(None, &text)?;
            Ok(0)
        }
        Command::Fill { grid, seed, format, out } => {
            let spec = resolve(&grid.spec)?;
            let levels = analysis_levels(&spec, grid.levels.as_deref(), grid.resolution)?;
            let (slices, report) = fill_family(&spec, &levels, grid.resolution)?;
            for (c, n) in report.levels.iter().zip(&report.leaf_counts) {
                if *n == 0 {
                    eprintln!("warning: empty slice at level {c}");
                }
            }
            let mut seed_leaves = Vec::new();
            if let Some(p) = &seed {
                for s in &slices {
                    let f = fill_slice(&spec, s.c, Some(p), grid.resolution)?;
                    seed_leaves.push((s.c, f.seed_leaf.map(|l| l + 1)));
                }
            }
            if let Some(dir) = &out {
                let slab = vec![0.0; spec.dim().saturating_sub(3)];
                for (k, s) in slices.iter().enumerate() {
                    write_text(&dir.join(format!("slice_{k:03}.csv")), &labeled_cells_csv(&s.shape, &s.labels, "leaf"))?;
                    let mut marked = vec![false; s.shape.n_cells()];
                    for &b in &s.boundary_cells {
                        marked[b] = true;
                    }
                    write_text(&dir.join(format!("slice_{k:03}.obj")), &cells_obj(&s.shape, &marked, &slab)?)?;
                }
            }
            let text = match format {
                Format::Json => {
                    #[derive(Serialize)]
                    struct FillOut<'a> {
                        #[serde(flatten)]
                        report: &'a crflat::filling::FamilyReport,
                        #[serde(skip_serializing_if = "Vec::is_empty")]
                        seed_leaves: Vec<(f64, Option<usize>)>,
                    }
                    to_json(&FillOut { report: &report, seed_leaves })
                }
                Format::Csv => {
                    let mut s = String::from("level,leaves,census\n");
                    for ((l, n), m) in report.levels.iter().zip(&report.leaf_counts).zip(&report.census_counts) {
                        s.push_str(&format!("{l},{n},{m}\n"));
                    }
                    s
                }
            };
            emit(None, &text)?;
            Ok(if report.counts_match { 0 } else { 1 })
        }
        Command::Glue { expr, format } => {
            let g = parse_glue_expr(&expr)?;
            let v = validate(&g);
            let (elliptic, hyperbolic) = point_counts(&g);
            let chi = euler_characteristic(&g).ok();
            let violations: Vec<String> = v.violations.iter().map(|x| x.to_string()).collect();
            let text = match format {
                Format::Json => {
                    #[derive(Serialize)]
                    struct GlueOut<'a> {
                        expression: String,
                        models: usize,
                        junctions: usize,
                        valid: bool,
                        closed: bool,
                        violations: &'a [String],
                        free_endpoints: crflat::glue::EndpointCensus,
                        elliptic_points: usize,
                        hyperbolic_points: usize,
                        chi: Option<i64>,
                    }
                    to_json(&GlueOut {
                        expression: g.to_string(),
                        models: g.models.len(),
                        junctions: g.junctions.len(),
                        valid: v.ok(),
                        closed: v.closed,
                        violations: &violations,
                        free_endpoints: v.free,
                        elliptic_points: elliptic,
                        hyperbolic_points: hyperbolic,
                        chi,
                    })
                }
                Format::Csv => {
                    let chi = chi.map(|c| c.to_string()).unwrap_or_default();
                    format!(
                        "expression,valid,closed,elliptic,hyperbolic,chi\n{},{},{},{},{},{}\n",
                        g, v.ok(), v.closed, elliptic, hyperbolic, chi
                    )
                }
            };
            emit(None, &text)?;
            Ok(if v.ok() { 0 } else { 1 })
        }
        Command::ExportMesh { grid, slab, out } => {
            let spec = resolve(&grid.spec)?;
            let levels = grid.levels.unwrap_or_else(|| vec![0.0]);
            let [c] = levels[..] else {
                return Err(Error::Input("export-mesh takes exactly one level".into()));
            };
            let s = fill_slice(&spec, c, None, grid.resolution)?;
            let slab = slab.unwrap_or_else(|| vec![0.0; spec.dim().saturating_sub(3)]);
            let mut marked = vec![false; s.shape.n_cells()];
            for &b in &s.boundary_cells {
                marked[b] = true;
            }
            write_text(&out, &cells_obj(&s.shape, &marked, &slab)?)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 || rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            eprintln!("error[input]: invalid thread count {n}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error[{}]: {msg}", e.kind());
            ExitCode::from(exit_code(&e))
        }
    }
}
