//! Command-line front end: classification, fixed-point analysis,
//! linearization, isomorphism search, and the canonical-form tables, as
//! machine-readable JSON reports (or `--format text`).
//!
//! Exit codes: 0 success, 1 classification failed / isomorphism not found
//! under `--require-found`, 2 invalid input or flags, 3 internal tolerance
//! violation (a witness failed re-verification).

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use evoalg_core::algebra::{EvolutionAlgebra, Tolerances};
use evoalg_core::classify2::{self, Class2};
use evoalg_core::classify3::{self, Class3};
use evoalg_core::dynamics::{self, SolverOptions};
use evoalg_core::io::read_matrix_file;
use evoalg_core::iso::{self, IsoOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_FOUND: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_TOLERANCE: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Parser)]
#[command(
    name = "evoalg",
    version,
    about = "Real evolution algebras in dimensions 2 and 3: canonical forms, fixed points, linearization"
)]
struct Cli {
    /// Output format for the report on stdout.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a 2- or 3-dimensional algebra into its canonical form.
    Classify {
        #[arg(long)]
        input: PathBuf,
        /// Override the residual tolerance used for verification.
        #[arg(long)]
        tol: Option<f64>,
        /// Include the witness matrix in text output.
        #[arg(long)]
        witness: bool,
    },
    /// Non-zero fixed points of the evolution operator.
    #[command(name = "fixed-points")]
    FixedPoints {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10.0)]
        radius: f64,
    },
    /// Jacobian algebra at a given point or at every non-zero fixed point.
    Linearize {
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated coordinates, e.g. "1,0" or "1,0,0".
        #[arg(long, conflicts_with = "all")]
        point: Option<String>,
        /// Linearize at every non-zero fixed point.
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Search for an isomorphism witness between two algebras.
    Iso {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value_t = 256)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Exit with status 1 when no witness is found.
        #[arg(long)]
        require_found: bool,
    },
    /// Fixed points and Jacobian-algebra classifications for a 2D canonical
    /// class, with the predicted-class checks.
    #[command(name = "table2d")]
    Table2d {
        /// One of E1..E7, Zero.
        #[arg(long)]
        class: String,
        #[arg(long)]
        a2: Option<f64>,
        #[arg(long)]
        a3: Option<f64>,
        #[arg(long)]
        a4: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Fixed points and Jacobian-algebra classifications for all thirteen 3D
    /// canonical forms.
    #[command(name = "table3d")]
    Table3d {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print a canonical representative.
    Canonical {
        #[arg(long)]
        dim: usize,
        /// E1..E7 or Zero for dim 2; E1..E13 for dim 3.
        #[arg(long)]
        label: String,
        #[arg(long)]
        a2: Option<f64>,
        #[arg(long)]
        a3: Option<f64>,
        #[arg(long)]
        a4: Option<f64>,
    },
}

#[derive(Serialize)]
struct Report {
    command: String,
    version: &'static str,
    seed: Option<u64>,
    tolerances: Tolerances,
    inputs: Value,
    results: Value,
    notes: Vec<String>,
}

/// Parses `argv` and executes one subcommand, writing the report to `out`
/// and diagnostics to `err`. Returns the process exit code.
pub fn run<W: Write, E: Write>(argv: &[String], out: &mut W, err: &mut E) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            let _ = write!(err, "{e}");
            return EXIT_USAGE;
        }
    };
    match execute(&cli) {
        Ok(report) => {
            match cli.format {
                Format::Json => {
                    let text = serde_json::to_string_pretty(&report)
                        .expect("report serialization cannot fail");
                    let _ = writeln!(out, "{text}");
                }
                Format::Text => {
                    let _ = write!(out, "{}", render_text(&report));
                }
            }
            EXIT_OK
        }
        Err(failure) => {
            let _ = writeln!(err, "error: {}", failure.message);
            failure.code
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

fn load(path: &Path) -> Result<EvolutionAlgebra, Failure> {
    read_matrix_file(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn execute(cli: &Cli) -> Result<Report, Failure> {
    let tol = Tolerances::default();
    match &cli.command {
        Command::Classify {
            input,
            tol: tol_override,
            witness: _,
        } => {
            let mut tol = tol;
            if let Some(t) = tol_override {
                if *t <= 0.0 {
                    return Err(Failure::usage("--tol must be positive"));
                }
                tol.eps_residual = *t;
            }
            let algebra = load(input)?;
            let (results, notes) = classify_any(&algebra, &tol)?;
            Ok(Report {
                command: "classify".into(),
                version: env!("CARGO_PKG_VERSION"),
                seed: None,
                tolerances: tol,
                inputs: json!({
                    "input": input.display().to_string(),
                    "matrix": algebra.rows(),
                }),
                results,
                notes,
            })
        }
        Command::FixedPoints {
            input,
            restarts,
            seed,
            radius,
        } => {
            let algebra = load(input)?;
            if *radius <= 0.0 || *restarts == 0 {
                return Err(Failure::usage("--radius and --restarts must be positive"));
            }
            let opts = SolverOptions {
                restarts: *restarts,
                radius: *radius,
                seed: *seed,
                ..SolverOptions::default()
            };
            let report = dynamics::fixed_points(&algebra, &opts, &tol);
            let notes = report.notes.clone();
            Ok(Report {
                command: "fixed-points".into(),
                version: env!("CARGO_PKG_VERSION"),
                seed: Some(*seed),
                tolerances: tol,
                inputs: json!({
                    "input": input.display().to_string(),
                    "matrix": algebra.rows(),
                    "options": opts,
                }),
                results: serde_json::to_value(&report).expect("serializable"),
                notes,
            })
        }
        Command::Linearize {
            input,
            point,
            all,
            seed,
        } => {
            let algebra = load(input)?;
            let opts = SolverOptions {
                seed: *seed,
                ..SolverOptions::default()
            };
            let mut notes = Vec::new();
            let results = match (point, all) {
                (Some(text), false) => {
                    let coords = parse_point(text, algebra.dim())?;
                    let jac = dynamics::jacobian_algebra(&algebra, &coords)
                        .map_err(|e| Failure::usage(e.to_string()))?;
                    json!([{ "point": coords, "jacobian_matrix": jac.rows() }])
                }
                (None, true) => {
                    let fp = dynamics::fixed_points(&algebra, &opts, &tol);
                    notes = fp.notes.clone();
                    let pairs = dynamics::linearize_at_fixed_points(&algebra, &opts, &tol);
                    Value::Array(
                        pairs
                            .into_iter()
                            .map(|(x, jac)| {
                                json!({ "point": x, "jacobian_matrix": jac.rows() })
                            })
                            .collect(),
                    )
                }
                _ => {
                    return Err(Failure::usage(
                        "linearize requires exactly one of --point or --all",
                    ))
                }
            };
            Ok(Report {
                command: "linearize".into(),
                version: env!("CARGO_PKG_VERSION"),
                seed: Some(*seed),
                tolerances: tol,
                inputs: json!({
                    "input": input.display().to_string(),
                    "matrix": algebra.rows(),
                }),
                results,
                notes,
            })
        }
        Command::Iso {
            a,
            b,
            restarts,
            seed,
            require_found,
        } => {
            let left = load(a)?;
            let right = load(b)?;
            if left.dim() != right.dim() {
                return Err(Failure::usage("the two algebras must have equal dimension"));
            }
            let opts = IsoOptions {
                restarts: *restarts,
                seed: *seed,
                ..IsoOptions::default()
            };
            let result = iso::iso_search(&left, &right, &opts, &tol);
            if result.found {
                let witness = result.witness.as_ref().expect("found implies witness");
                match iso::verify_iso(&left, &right, witness, &tol) {
                    Ok((true, _)) => {}
                    _ => {
                        return Err(Failure {
                            code: EXIT_TOLERANCE,
                            message: "witness failed re-verification".into(),
                        })
                    }
                }
            } else if *require_found {
                return Err(Failure {
                    code: EXIT_NOT_FOUND,
                    message: format!(
                        "no isomorphism witness found within budget (best residual {:.3e})",
                        result.residual
                    ),
                });
            }
            Ok(Report {
                command: "iso".into(),
                version: env!("CARGO_PKG_VERSION"),
                seed: Some(*seed),
                tolerances: tol,
                inputs: json!({
                    "a": a.display().to_string(),
                    "b": b.display().to_string(),
                    "matrix_a": left.rows(),
                    "matrix_b": right.rows(),
                }),
                results: json!({
                    "found": result.found,
                    "witness": result.witness.as_ref().map(|w| w.row_vectors()),
                    "residual": result.residual,
                }),
                notes: Vec::new(),
            })
        }
        Command::Table2d {
            class,
            a2,
            a3,
            a4,
            seed,
        } => {
            let class = parse_class2(class, *a2, *a3, *a4)?;
            let opts = SolverOptions {
                seed: *seed,
                ..SolverOptions::default()
            };
            let canon = classify2::canonical2(&class)
                .map_err(|e| Failure::usage(e.to_string()))?;
            let fp = dynamics::fixed_points(&canon, &opts, &tol);
            let row = classify2::table2d(&class, &opts, &tol).map_err(|e| Failure {
                code: EXIT_NOT_FOUND,
                message: e.to_string(),
            })?;
            Ok(Report {
                command: "table2d".into(),
                version: env!("CARGO_PKG_VERSION"),
                seed: Some(*seed),
                tolerances: tol,
                inputs: json!({ "class": class, "matrix": canon.rows() }),
                results: serde_json::to_value(&row).expect("serializable"),
                notes: fp.notes,
            })
        }
        Command::Table3d { seed } => {
            let opts = SolverOptions {
                seed: *seed,
                ..SolverOptions::default()
            };
            let mut entries = Vec::new();
            for label in Class3::ALL {
                let canon = classify3::canonical3(label);
                let fp = dynamics::fixed_points(&canon, &opts, &tol);
                let mut rows = Vec::new();
                for point in &fp.points {
                    let jac = dynamics::jacobian_algebra(&canon, point)
                        .expect("point has the algebra's dimension");
                    let classified = classify3::classify3(&jac, &tol).map_err(|e| Failure {
                        code: EXIT_NOT_FOUND,
                        message: format!("{}: {e}", label.label()),
                    })?;
                    if !classified.verified {
                        return Err(Failure {
                            code: EXIT_TOLERANCE,
                            message: format!("{}: witness failed verification", label.label()),
                        });
                    }
                    rows.push(json!({
                        "fixed_point": point,
                        "jacobian_matrix": jac.rows(),
                        "classified_as": classified.class.label(),
                        "residual": classified.residual,
                    }));
                }
                entries.push(json!({
                    "label": label.label(),
                    "matrix": canon.rows(),
                    "fixed_points": fp.points,
                    "rows": rows,
                }));
            }
            Ok(Report {
                command: "table3d".into(),
                version: env!("CARGO_PKG_VERSION"),
                seed: Some(*seed),
                tolerances: tol,
                inputs: json!({}),
                results: Value::Array(entries),
                notes: Vec::new(),
            })
        }
        Command::Canonical {
            dim,
            label,
            a2,
            a3,
            a4,
        } => {
            let (class_json, matrix) = match dim {
                2 => {
                    let class = parse_class2(label, *a2, *a3, *a4)?;
                    let canon = classify2::canonical2(&class)
                        .map_err(|e| Failure::usage(e.to_string()))?;
                    (serde_json::to_value(class).expect("serializable"), canon)
                }
                3 => {
                    let class = Class3::from_label(label).ok_or_else(|| {
                        Failure::usage(format!("unknown 3D label {label:?} (expected E1..E13)"))
                    })?;
                    (json!({ "label": class.label() }), classify3::canonical3(class))
                }
                other => {
                    return Err(Failure::usage(format!(
                        "--dim must be 2 or 3, got {other}"
                    )))
                }
            };
            Ok(Report {
                command: "canonical".into(),
                version: env!("CARGO_PKG_VERSION"),
                seed: None,
                tolerances: tol,
                inputs: json!({ "dim": dim, "class": class_json }),
                results: json!({ "matrix": matrix.rows() }),
                notes: Vec::new(),
            })
        }
    }
}

/// Dispatches on dimension and re-verifies the returned witness before
/// reporting it.
fn classify_any(
    algebra: &EvolutionAlgebra,
    tol: &Tolerances,
) -> Result<(Value, Vec<String>), Failure> {
    match algebra.dim() {
        2 => {
            let c = classify2::classify2(algebra, tol).map_err(|e| Failure {
                code: EXIT_NOT_FOUND,
                message: e.to_string(),
            })?;
            let canon = classify2::canonical2(&c.class).map_err(|e| Failure {
                code: EXIT_TOLERANCE,
                message: e.to_string(),
            })?;
            recheck(algebra, &canon, &c.witness, tol)?;
            Ok((serde_json::to_value(&c).expect("serializable"), Vec::new()))
        }
        3 => {
            let c = classify3::classify3(algebra, tol).map_err(|e| Failure {
                code: EXIT_NOT_FOUND,
                message: e.to_string(),
            })?;
            let canon = classify3::canonical3(c.class);
            recheck(algebra, &canon, &c.witness, tol)?;
            Ok((serde_json::to_value(&c).expect("serializable"), Vec::new()))
        }
        other => Err(Failure::usage(format!("unsupported dimension {other}"))),
    }
}

fn recheck(
    a: &EvolutionAlgebra,
    canon: &EvolutionAlgebra,
    witness: &evoalg_core::algebra::BasisChange,
    tol: &Tolerances,
) -> Result<(), Failure> {
    match iso::verify_iso(a, canon, witness, tol) {
        Ok((true, _)) => Ok(()),
        _ => Err(Failure {
            code: EXIT_TOLERANCE,
            message: "classification witness failed re-verification".into(),
        }),
    }
}

fn parse_point(text: &str, dim: usize) -> Result<Vec<f64>, Failure> {
    let coords: Result<Vec<f64>, _> = text.split(',').map(|t| t.trim().parse::<f64>()).collect();
    let coords = coords.map_err(|e| Failure::usage(format!("bad --point {text:?}: {e}")))?;
    if coords.len() != dim {
        return Err(Failure::usage(format!(
            "--point has {} coordinates, the algebra has dimension {dim}",
            coords.len()
        )));
    }
    Ok(coords)
}

fn parse_class2(
    label: &str,
    a2: Option<f64>,
    a3: Option<f64>,
    a4: Option<f64>,
) -> Result<Class2, Failure> {
    let need = |cond: bool, what: &str| {
        if cond {
            Ok(())
        } else {
            Err(Failure::usage(format!("class {label} requires {what}")))
        }
    };
    match label {
        "E1" => Ok(Class2::E1),
        "E2" => Ok(Class2::E2),
        "E3" => Ok(Class2::E3),
        "E4" => Ok(Class2::E4),
        "E5" => Ok(Class2::E5),
        "E6" => {
            need(a2.is_some() && a3.is_some(), "--a2 and --a3")?;
            Ok(Class2::E6 {
                a2: a2.unwrap(),
                a3: a3.unwrap(),
            })
        }
        "E7" => {
            need(a4.is_some(), "--a4")?;
            Ok(Class2::E7 { a4: a4.unwrap() })
        }
        "Zero" => Ok(Class2::Zero),
        other => Err(Failure::usage(format!(
            "unknown 2D class {other:?} (expected E1..E7 or Zero)"
        ))),
    }
}

// ---------------------------------------------------------------------------
// Text rendering
// ---------------------------------------------------------------------------

fn render_text(report: &Report) -> String {
    let mut s = String::new();
    s.push_str(&format!("command: {}\n", report.command));
    if let Some(seed) = report.seed {
        s.push_str(&format!("seed: {seed}\n"));
    }
    if let Some(matrix) = report.inputs.get("matrix") {
        s.push_str("input matrix:\n");
        s.push_str(&render_matrix(matrix, "  "));
    }
    s.push_str("results:\n");
    s.push_str(&render_value(&report.results, "  "));
    for note in &report.notes {
        s.push_str(&format!("note: {note}\n"));
    }
    s
}

fn render_matrix(v: &Value, indent: &str) -> String {
    let mut s = String::new();
    if let Value::Array(rows) = v {
        for row in rows {
            if let Value::Array(entries) = row {
                let line: Vec<String> = entries.iter().map(render_number).collect();
                s.push_str(&format!("{indent}[ {} ]\n", line.join("  ")));
            }
        }
    }
    s
}

fn render_number(v: &Value) -> String {
    match v.as_f64() {
        Some(x) => format!("{x:>10.6}"),
        None => v.to_string(),
    }
}

fn render_value(v: &Value, indent: &str) -> String {
    let mut s = String::new();
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                match val {
                    Value::Array(a)
                        if a.iter().all(|r| r.is_array()) && !a.is_empty() =>
                    {
                        s.push_str(&format!("{indent}{k}:\n"));
                        s.push_str(&render_matrix(val, &format!("{indent}  ")));
                    }
                    Value::Object(_) | Value::Array(_) => {
                        s.push_str(&format!("{indent}{k}:\n"));
                        s.push_str(&render_value(val, &format!("{indent}  ")));
                    }
                    _ => s.push_str(&format!("{indent}{k}: {val}\n")),
                }
            }
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                s.push_str(&format!("{indent}[{i}]\n"));
                s.push_str(&render_value(item, &format!("{indent}  ")));
            }
        }
        other => s.push_str(&format!("{indent}{other}\n")),
    }
    s
}
