use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use gml_core::cutmodel::Mode;
use gml_core::gmlmesh::{self, CrossSection, GmlParams, MeshKind};
use gml_core::report::{self, cell_text, table_span, ReportEnvelope, TABLE_IDS};
use gml_core::{coloring_count, cut_gml, CutSpec, GmlError, GmlSpec, KnifeMode};

#[derive(Debug, Parser)]
#[command(name = "gml", version, about = "Cut counting and twisted-prism cutting for regular polygons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Geometric,
    Topological,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KnifeArg {
    Chordal,
    Radial,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SectionArg {
    Polygon,
    Circle,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Surface,
    Body,
}

#[derive(Debug, clap::Args)]
struct Output {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit with status 1 when computed values disagree with a reference.
    #[arg(long)]
    strict: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Reproduce a reference table (1, 2, 8, 11, 13 or 14).
    Tables {
        which: u32,
        /// Single m or an inclusive range such as 3..15.
        #[arg(long)]
        m: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// List the cut classes of one divisor knife.
    Enumerate {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        divisor: usize,
        #[arg(long, value_enum, default_value = "topological")]
        mode: ModeArg,
        #[command(flatten)]
        output: Output,
    },
    /// Cut a twisted prism and report the resulting bodies.
    CutGml {
        #[arg(long)]
        m: u64,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        /// KIND:i,j[:center][:offset], e.g. SS:1,3:center.
        #[arg(long)]
        cut: String,
        #[arg(long, value_enum, default_value = "chordal")]
        knife: KnifeArg,
        #[command(flatten)]
        output: Output,
    },
    /// Export a GML mesh as OBJ and report its statistics.
    Mesh {
        #[arg(long)]
        m: u32,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        #[arg(long, value_enum, default_value = "polygon")]
        section: SectionArg,
        #[arg(long, value_enum, default_value = "surface")]
        kind: KindArg,
        /// Sweep angle in radians; anything below 2π gives an open sheet.
        #[arg(long)]
        theta_span: Option<f64>,
        #[arg(long, default_value_t = 8)]
        res: usize,
        /// OBJ destination.
        #[arg(long)]
        obj: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Check every counting formula against tables and enumerators.
    Audit {
        #[arg(long, default_value_t = 10)]
        max_m: usize,
        #[command(flatten)]
        output: Output,
    },
}

/// Outcome of a command short of an error.
struct Run {
    report: ReportEnvelope,
    csv: Vec<Vec<String>>,
    mismatch: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output = match &cli.command {
        Command::Tables { output, .. }
        | Command::Enumerate { output, .. }
        | Command::CutGml { output, .. }
        | Command::Mesh { output, .. }
        | Command::Audit { output, .. } => output,
    };
    let run = match dispatch(&cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("gml: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let text = match output.format {
        Format::Json => match report::to_json(&run.report) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("gml: {e}");
                return ExitCode::from(3);
            }
        },
        Format::Csv => match to_csv(&run.csv) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("gml: csv: {e}");
                return ExitCode::from(3);
            }
        },
    };
    let written = match &output.out {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("gml: {e}");
        return ExitCode::from(3);
    }
    if output.strict && run.mismatch {
        eprintln!("gml: verification mismatch");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}

fn exit_code(e: &GmlError) -> u8 {
    match e {
        GmlError::InvalidArgument(_) | GmlError::Budget(_) | GmlError::Domain { .. } => 2,
        GmlError::Degeneracy(_) | GmlError::Closure(_) | GmlError::Internal(_) | GmlError::Io { .. } => 3,
    }
}

fn to_csv(rows: &[Vec<String>]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn parse_range(s: &str) -> Result<(usize, usize), GmlError> {
    let bad = || GmlError::InvalidArgument(format!("--m expects N or A..B, got {s:?}"));
    match s.split_once("..") {
        Some((a, b)) => {
            let b = b.trim_start_matches('=');
            Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
        }
        None => {
            let m = s.trim().parse().map_err(|_| bad())?;
            Ok((m, m))
        }
    }
}

/// m span each table covers by default: the span of its reference values.
fn default_span(which: u32) -> (usize, usize) {
    match which {
        1 | 2 => (3, 30),
        8 => (3, 12),
        14 => (3, 10),
        _ => (3, 15),
    }
}

fn dispatch(cmd: &Command) -> Result<Run, GmlError> {
    match cmd {
        Command::Tables { which, m, .. } => {
            if table_span(*which).is_none() {
                return Err(GmlError::InvalidArgument(format!(
                    "unsupported table {which}; choose one of {TABLE_IDS:?}"
                )));
            }
            let (lo, hi) = match m {
                Some(s) => parse_range(s)?,
                None => default_span(*which),
            };
            let (table, report) = report::cmd_tables(*which, lo, hi)?;
            let mut csv = vec![table.columns.clone()];
            csv.extend(table.rows.iter().map(|r| r.iter().map(cell_text).collect()));
            Ok(Run {
                report,
                csv,
                mismatch: table.mismatches > 0,
            })
        }
        Command::Enumerate { m, divisor, mode, .. } => {
            let mode = match mode {
                ModeArg::Geometric => Mode::Geometric,
                ModeArg::Topological => Mode::Topological,
            };
            let report = report::cmd_enumerate(*m, *divisor, mode)?;
            let mut csv = vec![vec!["representative".into(), "label".into(), "members".into(), "signature".into()]];
            if let Some(Value::Array(rows)) = report.results.get("classes") {
                for r in rows {
                    csv.push(["representative", "label", "members", "signature"].iter().map(|k| cell_text(&r[*k])).collect());
                }
            }
            let mismatch = !report.discrepancies.is_empty();
            Ok(Run { report, csv, mismatch })
        }
        Command::CutGml { m, n, cut, knife, .. } => {
            let cut: CutSpec = cut.parse()?;
            let knife = match knife {
                KnifeArg::Chordal => KnifeMode::Chordal,
                KnifeArg::Radial => KnifeMode::Radial,
            };
            let spec = GmlSpec::new(*m, *n)?;
            let o = cut_gml(&spec, &cut, knife)?;
            let mut csv = vec![vec!["body".into(), "sides".into(), "winding".into(), "twist".into(), "twist_index".into()]];
            for (i, c) in o.components.iter().enumerate() {
                csv.push(vec![
                    (i + 1).to_string(),
                    c.sides.to_string(),
                    c.winding.to_string(),
                    c.twist.to_string(),
                    c.twist_index.to_string(),
                ]);
            }
            let rows: Vec<Value> = o
                .components
                .iter()
                .map(|c| json!({"body": format!("GML_{}^({})", c.sides, c.twist), "sides": c.sides, "winding": c.winding, "twist": c.twist.to_string(), "twist_index": c.twist_index}))
                .collect();
            let mut results = report::to_value(&o)?;
            results["rows"] = Value::Array(rows);
            let report = ReportEnvelope::new(
                "cut-gml",
                json!({"m": m, "n": n, "cut": cut.to_string(), "knife": report::to_value(&knife)?}),
                results,
                vec![],
            );
            Ok(Run { report, csv, mismatch: false })
        }
        Command::Mesh { m, n, section, kind, theta_span, res, obj, .. } => {
            let section = match section {
                SectionArg::Polygon => CrossSection::Polygon { m: *m },
                SectionArg::Circle => CrossSection::Circle { radius: 1.0 },
            };
            let mut params = GmlParams::new(*m, *n, section)?;
            if let Some(s) = theta_span {
                params.theta_span = *s;
            }
            let kind = match kind {
                KindArg::Surface => MeshKind::Surface,
                KindArg::Body => MeshKind::Body,
            };
            let r = (*res).max(3) * *m as usize;
            let mesh = gmlmesh::build_mesh(&params, 2 * r, r, kind)?;
            gmlmesh::write_obj(&mesh, obj)?;
            let stats = mesh.stats();
            let polygonal = matches!(section, CrossSection::Polygon { .. });
            let side_count = if polygonal && params.is_closed() {
                Some(gmlmesh::surface_side_trace(&params)?)
            } else {
                None
            };
            let expected = coloring_count(*m as u64, *n)?;
            let mismatch = side_count.is_some_and(|s| s != expected);
            let mut discrepancies = vec![];
            if mismatch {
                discrepancies.push(json!({"side_count": side_count, "coloring_count": expected}));
            }
            let results = json!({
                "obj": obj.display().to_string(),
                "stats": report::to_value(&stats)?,
                "side_count": side_count,
                "coloring_count": expected,
                "closed": mesh.is_closed(),
            });
            let csv = vec![
                vec!["vertices".into(), "edges".into(), "faces".into(), "euler".into(), "side_count".into()],
                vec![
                    stats.vertices.to_string(),
                    stats.edges.to_string(),
                    stats.faces.to_string(),
                    stats.euler_characteristic.to_string(),
                    side_count.map(|s| s.to_string()).unwrap_or_default(),
                ],
            ];
            let report = ReportEnvelope::new(
                "mesh",
                json!({"m": m, "n": n, "res": res, "theta_span": params.theta_span}),
                results,
                discrepancies,
            );
            Ok(Run { report, csv, mismatch })
        }
        Command::Audit { max_m, .. } => {
            let report = report::cmd_audit(*max_m)?;
            let mut csv = vec![vec!["theorem".into(), "kind".into(), "record".into()]];
            for d in &report.discrepancies {
                csv.push(vec![cell_text(&d["theorem"]), cell_text(&d["kind"]), d["record"].to_string()]);
            }
            let mismatch = !report.discrepancies.is_empty();
            Ok(Run { report, csv, mismatch })
        }
    }
}
