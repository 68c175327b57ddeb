//! Command-line surface.
//!
//! Exit codes: 0 on success, 1 on a domain error (invalid input, failed
//! precondition, failing property suite), 2 on a usage error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{debug, info};

use crate::abel_jacobi::{
    classify_extension, sigma_extends, AJDatum, VinePhiTable, GLOBAL_PARAMETER_NOTE,
};
use crate::chamber::{self, AtlasRecordJson};
use crate::corpus::CorpusBounds;
use crate::error::{Error, Result};
use crate::graph::DualGraph;
use crate::rational::{format_rational, parse_rational, Rational};
use crate::stability::{
    equivalent_small_perturbation_check, is_nondegenerate, is_semistable, is_small_perturbation,
    is_stable, stable_sheaf_data, PhiVector, SheafDatum,
};
use crate::suites::{run_suite, Suite, SuiteConfig};
use crate::vine::enumerate_vines;

#[derive(Debug, Parser)]
#[command(
    name = "jacstab",
    version,
    about = "Exact stability computations for compactified universal Jacobians"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Output format
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the report to this file instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenusMarkings {
    #[arg(long)]
    pub g: u32,
    #[arg(long)]
    pub n: u32,
}

#[derive(Debug, Args)]
pub struct Twist {
    #[command(flatten)]
    pub gn: GenusMarkings,
    #[arg(long, allow_hyphen_values = true)]
    pub k: i64,
    /// Comma-separated a_1,...,a_n
    #[arg(long, allow_hyphen_values = true, value_parser = markings_arg)]
    pub a: Markings,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the vines of genus g with n markings
    Vines {
        #[command(flatten)]
        gn: GenusMarkings,
        #[arg(long, default_value_t = 1)]
        min_edges: u32,
        #[command(flatten)]
        output: Output,
    },
    /// Validate a graph and, optionally, a parameter and a sheaf datum on it
    Check {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        phi: Option<PathBuf>,
        #[arg(long)]
        sheaf: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Enumerate the stable sheaf data of a given degree
    Stable {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        phi: PathBuf,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        degree: i64,
        #[arg(long)]
        include_nonfree: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Walls of every vine inside a window lo..hi
    Walls {
        #[command(flatten)]
        gn: GenusMarkings,
        /// Rational window lo..hi, e.g. -3..3 or -1/2..5/2
        #[arg(long, allow_hyphen_values = true, value_parser = window_arg)]
        window: Window,
        #[arg(long, default_value_t = 1)]
        min_edges: u32,
        #[command(flatten)]
        output: Output,
    },
    /// Walls, chambers and stable tables of every vine
    Atlas {
        #[command(flatten)]
        gn: GenusMarkings,
        /// Rational window lo..hi, e.g. -3..3 or -1/2..5/2
        #[arg(long, allow_hyphen_values = true, value_parser = window_arg)]
        window: Window,
        #[arg(long)]
        include_nonfree: bool,
        #[arg(long)]
        jobs: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Check whether the Abel–Jacobi section extends for a vine table
    Extends {
        #[command(flatten)]
        twist: Twist,
        /// Vine table JSON; defaults to a near-zero small perturbation
        #[arg(long)]
        phi: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Decide whether the section extends for some small perturbation of 0
    Classify {
        #[command(flatten)]
        twist: Twist,
        #[command(flatten)]
        output: Output,
    },
    /// Run a property suite
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 4)]
        max_vertices: usize,
        #[arg(long, default_value_t = 7)]
        max_edges: usize,
        /// Largest genus in the corpus
        #[arg(long)]
        g: Option<u32>,
        /// Largest number of markings in the corpus
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        jobs: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Clone, Copy)]
pub struct Window(pub Rational, pub Rational);

#[derive(Debug, Clone)]
pub struct Markings(pub Vec<i64>);

fn window_arg(s: &str) -> std::result::Result<Window, String> {
    parse_window(s)
        .map(|(lo, hi)| Window(lo, hi))
        .map_err(|e| e.to_string())
}

fn markings_arg(s: &str) -> std::result::Result<Markings, String> {
    parse_markings_vector(s)
        .map(Markings)
        .map_err(|e| e.to_string())
}

/// Parses `lo..hi` with rational endpoints.
pub fn parse_window(s: &str) -> Result<(Rational, Rational)> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| Error::Parse(format!("invalid window {s:?}: expected lo..hi")))?;
    let (lo, hi) = (parse_rational(lo)?, parse_rational(hi)?);
    if lo > hi {
        return Err(Error::Parse(format!("invalid window {s:?}: lo > hi")));
    }
    Ok((lo, hi))
}

pub fn parse_markings_vector(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<i64>()
                .map_err(|_| Error::Parse(format!("invalid integer {x:?} in {s:?}")))
        })
        .collect()
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

fn load_graph(path: &PathBuf) -> Result<DualGraph> {
    let graph: DualGraph = serde_json::from_str(&read(path)?)?;
    graph.ensure_valid()?;
    Ok(graph)
}

fn twist_datum(twist: &Twist) -> Result<AJDatum> {
    let a = twist.a.0.clone();
    if a.len() != twist.gn.n as usize {
        return Err(Error::Parse(format!(
            "--a has {} entries, --n is {}",
            a.len(),
            twist.gn.n
        )));
    }
    if twist.gn.g < 1 || twist.gn.n < 1 {
        return Err(Error::Precondition("need g >= 1 and n >= 1".into()));
    }
    AJDatum::new(twist.gn.g, twist.k, a)
}

fn pretty(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json value");
    s.push('\n');
    s
}

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

/// Report text and whether the command succeeded as a domain question
/// (a failing suite or invalid graph is reported, then exits 1).
struct Report {
    body: String,
    ok: bool,
}

impl Report {
    fn ok(body: String) -> Self {
        Report { body, ok: true }
    }
}

fn execute(command: &Command) -> Result<(Report, Option<PathBuf>)> {
    match command {
        Command::Vines {
            gn,
            min_edges,
            output,
        } => {
            let vines = enumerate_vines(gn.g, gn.n, *min_edges);
            let body = match output.format.unwrap_or(Format::Text) {
                Format::Json => pretty(&serde_json::to_value(&vines)?),
                _ => vines.iter().map(|v| format!("{v}\n")).collect(),
            };
            Ok((Report::ok(body), output.out.clone()))
        }
        Command::Check {
            graph,
            phi,
            sheaf,
            output,
        } => {
            let g: DualGraph = serde_json::from_str(&read(graph)?)?;
            let diagnostics: Vec<String> = g.validate().iter().map(|d| d.to_string()).collect();
            let mut fields = serde_json::Map::new();
            fields.insert("valid".into(), diagnostics.is_empty().into());
            fields.insert("diagnostics".into(), diagnostics.clone().into());
            if diagnostics.is_empty() {
                if let Some(path) = phi {
                    let phi = PhiVector::from_json(&g, &read(path)?)?;
                    fields.insert("nondegenerate".into(), is_nondegenerate(&g, &phi)?.into());
                    fields.insert(
                        "small_perturbation".into(),
                        is_small_perturbation(&g, &phi)?.into(),
                    );
                    fields.insert(
                        "trivial_bundle_stable".into(),
                        equivalent_small_perturbation_check(&g, &phi)?.into(),
                    );
                    if let Some(path) = sheaf {
                        let f = SheafDatum::from_json(&g, &read(path)?)?;
                        fields.insert("stable".into(), is_stable(&g, &phi, &f)?.into());
                        fields.insert("semistable".into(), is_semistable(&g, &phi, &f)?.into());
                    }
                } else if sheaf.is_some() {
                    return Err(Error::Precondition("--sheaf requires --phi".into()));
                }
            }
            let ok = diagnostics.is_empty();
            let body = match output.format.unwrap_or(Format::Text) {
                Format::Json => pretty(&serde_json::Value::Object(fields)),
                _ => {
                    let mut s = String::new();
                    if ok {
                        s.push_str("graph: valid\n");
                    } else {
                        for d in &diagnostics {
                            let _ = writeln!(s, "graph: {d}");
                        }
                    }
                    for (k, v) in fields.iter().skip(2) {
                        let _ = writeln!(s, "{}: {v}", k.replace('_', " "));
                    }
                    s
                }
            };
            Ok((Report { body, ok }, output.out.clone()))
        }
        Command::Stable {
            graph,
            phi,
            degree,
            include_nonfree,
            output,
        } => {
            let g = load_graph(graph)?;
            let phi = PhiVector::from_json(&g, &read(phi)?)?;
            let data = stable_sheaf_data(&g, &phi, *degree, *include_nonfree)?;
            let body = match output.format.unwrap_or(Format::Text) {
                Format::Json => pretty(&serde_json::Value::Array(
                    data.iter().map(SheafDatum::to_json_value).collect(),
                )),
                _ => data.iter().map(|f| format!("{f}\n")).collect(),
            };
            Ok((Report::ok(body), output.out.clone()))
        }
        Command::Walls {
            gn,
            window,
            min_edges,
            output,
        } => {
            let Window(lo, hi) = *window;
            let mut rows = Vec::new();
            for vine in enumerate_vines(gn.g, gn.n, *min_edges) {
                let walls = chamber::walls(&vine, lo, hi)?;
                rows.push((vine, walls));
            }
            let body = match output.format.unwrap_or(Format::Text) {
                Format::Json => pretty(&serde_json::Value::Array(
                    rows.iter()
                        .map(|(v, w)| serde_json::json!({ "vine": v, "walls": w }))
                        .collect(),
                )),
                _ => rows
                    .iter()
                    .map(|(v, w)| {
                        let ps: Vec<String> = w.positions().iter().map(format_rational).collect();
                        format!("{v}: {}\n", ps.join(" "))
                    })
                    .collect(),
            };
            Ok((Report::ok(body), output.out.clone()))
        }
        Command::Atlas {
            gn,
            window,
            include_nonfree,
            jobs,
            output,
        } => {
            let Window(lo, hi) = *window;
            let records = with_jobs(*jobs, || {
                chamber::atlas(gn.g, gn.n, lo, hi, *include_nonfree)
            })??;
            info!("atlas: {} records", records.len());
            let mut buf = Vec::new();
            match output.format.unwrap_or(Format::Json) {
                Format::Json => chamber::write_json(&records, &mut buf)?,
                Format::Csv => chamber::write_csv(&records, &mut buf)?,
                Format::Text => {
                    for r in &records {
                        let json = AtlasRecordJson::from(r);
                        for c in &json.chambers {
                            writeln!(
                                buf,
                                "{} ({}, {}) small={} [{}]",
                                r.vine,
                                c.lo,
                                c.hi,
                                c.is_small_perturbation,
                                c.stable_table.join(" ")
                            )?;
                        }
                    }
                }
            }
            let body = String::from_utf8(buf).expect("utf-8 report");
            Ok((Report::ok(body), output.out.clone()))
        }
        Command::Extends { twist, phi, output } => {
            let aj = twist_datum(twist)?;
            let table = match phi {
                Some(path) => VinePhiTable::from_json(&read(path)?)?,
                None => VinePhiTable::near_zero(aj.g, aj.n(), twist.seed)?,
            };
            let check = sigma_extends(&aj, &table)?;
            let report = serde_json::json!({
                "extends": check.extends,
                "witness_vine": check.witness.as_ref().map(|w| w.to_json_value()),
                "phi_table": table.to_json_value(),
                "note": GLOBAL_PARAMETER_NOTE,
            });
            let body = match output.format.unwrap_or(Format::Text) {
                Format::Json => pretty(&report),
                _ => {
                    let mut s = format!("extends: {}\n", if check.extends { "yes" } else { "no" });
                    if let Some(w) = &check.witness {
                        let _ = writeln!(
                            s,
                            "witness: {} bidegree ({}, {})",
                            w.vine, w.bidegree.0, w.bidegree.1
                        );
                    }
                    s
                }
            };
            Ok((Report::ok(body), output.out.clone()))
        }
        Command::Classify { twist, output } => {
            let aj = twist_datum(twist)?;
            let answer = classify_extension(&aj, twist.seed)?;
            let body = match output.format.unwrap_or(Format::Text) {
                Format::Json => pretty(&answer.to_json_value()),
                _ => {
                    let mut s = format!("extends: {}\n", if answer.extends { "yes" } else { "no" });
                    if let Some(w) = &answer.witness {
                        let _ = writeln!(
                            s,
                            "witness: {} bidegree ({}, {})",
                            w.vine, w.bidegree.0, w.bidegree.1
                        );
                        let _ = writeln!(s, "certificate: no small-perturbation chamber of the witness vine stabilizes this bidegree");
                    }
                    if let Some(table) = &answer.table {
                        s.push_str("phi table:\n");
                        for (v, x) in table.entries() {
                            let _ = writeln!(s, "  {v}: {}", format_rational(x));
                        }
                    }
                    let _ = writeln!(s, "note: {GLOBAL_PARAMETER_NOTE}");
                    s
                }
            };
            Ok((Report::ok(body), output.out.clone()))
        }
        Command::Verify {
            suite,
            max_vertices,
            max_edges,
            g,
            n,
            trials,
            seed,
            jobs,
            output,
        } => {
            let suite: Suite = suite.parse()?;
            let default_n = if suite == Suite::Extension { 3 } else { 2 };
            let config = SuiteConfig {
                bounds: CorpusBounds {
                    max_genus: g.unwrap_or(3),
                    max_n: n.unwrap_or(default_n),
                    max_vertices: *max_vertices,
                    max_edges: *max_edges,
                },
                trials: *trials,
                seed: *seed,
            };
            debug!("verify {suite} with {config:?}");
            let report = with_jobs(*jobs, || run_suite(suite, &config))??;
            let body = match output.format.unwrap_or(Format::Text) {
                Format::Json => pretty(&serde_json::to_value(&report)?),
                _ => {
                    let mut s = format!("{report}\n");
                    s.push_str(if report.passed { "pass\n" } else { "fail\n" });
                    s
                }
            };
            Ok((
                Report {
                    body,
                    ok: report.passed,
                },
                output.out.clone(),
            ))
        }
    }
}

/// Parses `args` (including the program name) and runs the command,
/// writing the report to `out` (or `--out`) and errors to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = out.write_all(text.as_bytes());
            } else {
                let _ = err.write_all(text.as_bytes());
            }
            return code;
        }
    };
    match execute(&cli.command) {
        Ok((report, path)) => {
            let written = match path {
                Some(path) => std::fs::write(&path, report.body.as_bytes()).map_err(Error::from),
                None => out.write_all(report.body.as_bytes()).map_err(Error::from),
            };
            if let Err(e) = written {
                let _ = writeln!(err, "error: {e}");
                return 1;
            }
            if report.ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["jacstab"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn window_parsing() {
        assert_eq!(parse_window("-3..3").unwrap(), (int(-3), int(3)));
        assert_eq!(parse_window("-1/2..5/3").unwrap(), (rat(-1, 2), rat(5, 3)));
        assert!(parse_window("0.5..1").is_err());
        assert!(parse_window("3..-3").is_err());
        assert!(parse_window("3").is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_capture(&["classify", "--g", "2"]).0, 2);
        assert_eq!(run_capture(&["frobnicate"]).0, 2);
        assert_eq!(
            run_capture(&["walls", "--g", "2", "--n", "1", "--window", "0.5..1"]).0,
            2
        );
        assert_eq!(
            run_capture(&["classify", "--g", "2", "--n", "1", "--k", "0", "--a", "x"]).0,
            2
        );
        assert_eq!(run_capture(&["--help"]).0, 0);
    }

    #[test]
    fn classify_yes() {
        let (code, out, _) = run_capture(&[
            "classify", "--g", "2", "--n", "2", "--k", "0", "--a", "1,-1",
        ]);
        assert_eq!(code, 0);
        assert!(out.starts_with("extends: yes\nphi table:\n"), "{out}");
    }

    #[test]
    fn classify_domain_errors() {
        let (code, _, err) =
            run_capture(&["classify", "--g", "2", "--n", "2", "--k", "0", "--a", "0,0"]);
        assert_eq!(code, 1);
        assert!(err.contains("trivial twist"));
        let (code, _, err) =
            run_capture(&["classify", "--g", "2", "--n", "1", "--k", "-1", "--a", "1"]);
        assert_eq!(code, 1);
        assert!(err.contains("k(2-2g)"));
    }

    #[test]
    fn unknown_suite_is_domain_error() {
        assert_eq!(run_capture(&["verify", "--suite", "bogus"]).0, 1);
    }
}
