use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use broccoli_core::invariant::{
    curve_groups, enumerate_leaves, gs_invariant_with, result_json, InvariantQuery, RunOptions,
};
use broccoli_core::oracle::{self, invariance_harness, OracleReport};
use broccoli_core::pathsub::{render_gallery_svg, Cell};
use broccoli_core::tropcurve::broccoli_status;
use broccoli_core::{exactmath, Degree, Direction, Error, NewtonPolygon, Point};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "broccoli", version, about = "Refined elliptic broccoli invariants in exact arithmetic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Largest lattice area of the polygon to accept.
    #[arg(long, global = true, value_name = "AREA")]
    budget: Option<i64>,
    /// Write the JSON result here instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Progress messages on standard error.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute the refined invariant of a query.
    Compute {
        #[command(flatten)]
        input: Input,
        /// Direction vector "a1,a2" ordering the lattice points.
        #[arg(long, value_name = "A1,A2")]
        direction: Option<String>,
    },
    /// Compare the invariant over several generic directions.
    CheckInvariance {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 3, value_name = "K")]
        directions: usize,
    },
    /// Run the oracle suite.
    Selftest {
        #[arg(long, default_value_t = 3, value_name = "K")]
        directions: usize,
    },
    /// Per-curve subdivisions and classifications.
    Dump {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_name = "A1,A2")]
        direction: Option<String>,
        /// Write the subdivision dump here.
        #[arg(long, value_name = "FILE")]
        dump_subdivisions: Option<PathBuf>,
        /// Draw every subdivision into one SVG file.
        #[arg(long, value_name = "FILE")]
        svg: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct Input {
    /// Query file in JSON.
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,
    /// Query given directly as JSON.
    #[arg(long, value_name = "JSON")]
    inline: Option<String>,
}

/// Query as written by users: a degree multiset or a polygon.
#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct QueryFile {
    degree: Option<Degree>,
    polygon: Option<Vec<Point>>,
    #[serde(default)]
    genus: u8,
    nv: usize,
    ne: Option<usize>,
    direction: Option<Direction>,
}

fn fail(kind: &str, message: impl std::fmt::Display) -> Value {
    json!({ "error": { "kind": kind, "message": message.to_string() } })
}

fn core_err(e: Error) -> Value {
    fail(e.kind(), &e)
}

fn read_query(input: &Input) -> Result<InvariantQuery, Value> {
    let text = match (&input.input, &input.inline) {
        (Some(path), _) => fs::read_to_string(path).map_err(|e| fail("Io", format!("{}: {e}", path.display())))?,
        (None, Some(s)) => s.clone(),
        (None, None) => return Err(fail("InvalidInput", "no query given")),
    };
    let raw: QueryFile = serde_json::from_str(&text).map_err(|e| fail("InvalidInput", e))?;
    let degree = match (raw.degree, raw.polygon) {
        (Some(d), None) => d,
        (None, Some(p)) => NewtonPolygon::from_perimeter(&p).map_err(core_err)?.degree(),
        _ => return Err(fail("InvalidInput", "give exactly one of \"degree\" and \"polygon\"")),
    };
    let mut q = match raw.ne {
        Some(ne) => InvariantQuery::new(degree, raw.genus, raw.nv, ne),
        None => InvariantQuery::with_nv(degree, raw.genus, raw.nv).map_err(core_err)?,
    };
    q.direction = raw.direction;
    let poly = q.polygon().map_err(core_err)?;
    q.validate(&poly).map_err(core_err)?;
    Ok(q)
}

fn parse_direction(s: &str) -> Result<Direction, Value> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [a, b] => match (a.parse(), b.parse()) {
            (Ok(x), Ok(y)) if (x, y) != (0, 0) => Ok(Direction::new(x, y)),
            _ => Err(fail("InvalidInput", format!("bad direction \"{s}\""))),
        },
        _ => Err(fail("InvalidInput", format!("direction must look like \"1,7\", got \"{s}\""))),
    }
}

fn check_budget(q: &InvariantQuery, budget: Option<i64>) -> Result<(), Value> {
    let area = q.polygon().map_err(core_err)?.lattice_area();
    match budget {
        Some(b) if area > b => Err(core_err(Error::BudgetExceeded(b as u64))),
        _ => Ok(()),
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), Value> {
    fs::write(path, text).map_err(|e| fail("Io", format!("{}: {e}", path.display())))
}

fn reports_json(reports: &[OracleReport]) -> Value {
    let passed = reports.iter().filter(|r| r.passed()).count();
    json!({
        "passed": passed,
        "failed": reports.len() - passed,
        "reports": reports,
    })
}

/// The JSON document and whether the command succeeded.
fn run(cli: &Cli) -> Result<(Value, bool), Value> {
    match &cli.command {
        Command::Compute { input, direction } => {
            let mut q = read_query(input)?;
            if let Some(d) = direction {
                q.direction = Some(parse_direction(d)?);
            }
            check_budget(&q, cli.budget)?;
            let r = gs_invariant_with(&q, RunOptions::default()).map_err(core_err)?;
            Ok((result_json(&q, &r), true))
        }
        Command::CheckInvariance { input, directions } => {
            let q = read_query(input)?;
            check_budget(&q, cli.budget)?;
            let poly = q.polygon().map_err(core_err)?;
            let dirs = Direction::family(&poly, *directions);
            let report = invariance_harness(&q, &dirs).map_err(core_err)?;
            let ok = report.passed();
            Ok((serde_json::to_value(report).expect("report serializes"), ok))
        }
        Command::Selftest { directions } => {
            let area = cli.budget.unwrap_or(12);
            let reports = oracle::suite(area, *directions).map_err(core_err)?;
            if cli.verbose > 0 {
                for r in &reports {
                    eprintln!("{:4} {}", if r.passed() { "ok" } else { "FAIL" }, r.subject);
                }
            }
            Ok((reports_json(&reports), oracle::all_passed(&reports)))
        }
        Command::Dump { input, direction, dump_subdivisions, svg } => {
            let mut q = read_query(input)?;
            if let Some(d) = direction {
                q.direction = Some(parse_direction(d)?);
            }
            check_budget(&q, cli.budget)?;
            let poly = q.polygon().map_err(core_err)?;
            let (leaves, _, dir) = enumerate_leaves(&q, RunOptions::default()).map_err(core_err)?;
            let mut curves = Vec::new();
            for (key, idx, w) in curve_groups(&leaves) {
                let first = &leaves[idx[0]];
                let weight = w
                    .to_laurent()
                    .map_err(|e| core_err(e.into()))
                    .and_then(|l| exactmath::laurent_to_y(&l).map_err(|e| core_err(e.into())))?;
                curves.push(json!({
                    "key": key,
                    "weight": weight,
                    "class": first.class,
                    "broccoli": broccoli_status(&first.curve, &first.class),
                    "curve": first.curve,
                    "leaves": idx.iter().map(|&i| json!({
                        "path": leaves[i].path,
                        "cells": leaves[i].cells,
                        "segments": leaves[i].segments,
                    })).collect::<Vec<_>>(),
                }));
            }
            let doc = json!({ "query": q, "direction": dir, "curves": curves });
            if let Some(path) = dump_subdivisions {
                write_text(path, &(serde_json::to_string_pretty(&doc).expect("dump serializes") + "\n"))?;
            }
            if let Some(path) = svg {
                let cells: Vec<&[Cell]> = leaves.iter().filter(|l| l.counted).map(|l| l.cells.as_slice()).collect();
                write_text(path, &render_gallery_svg(&poly, &cells, 6))?;
            }
            Ok((doc, true))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // help and version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{}", fail("InvalidInput", e.to_string().trim_end()));
            return ExitCode::from(2);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("{}", fail("InvalidInput", e));
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok((doc, ok)) => {
            let text = serde_json::to_string_pretty(&doc).expect("output serializes") + "\n";
            match &cli.out {
                Some(path) => {
                    if let Err(e) = write_text(path, &text) {
                        eprintln!("{e}");
                        return ExitCode::from(2);
                    }
                }
                None => print!("{text}"),
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
    }
}
