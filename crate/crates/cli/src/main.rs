//! Batch command line for the disk separator.
//!
//! Exit codes are a stable contract: 0 ok, 1 parse or input error,
//! 2 generation failure, 3 internal/self-verification failure, 4 oracle
//! instance too large, 5 verification negative.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use disksep::arrangement::separates;
use disksep::error::Error;
use disksep::geom::{Disk, TolerancePolicy};
use disksep::instance::{
    generate_random_instance, parse_instance, write_instance, ExperimentRecord, Instance,
};
use disksep::oracle::{
    exact_min_separator, grid_flood_separates, DEFAULT_GRID_RESOLUTION, DEFAULT_MAX_N,
};
use disksep::recsep::{separate_points_traced, SeparatorResult, TraceEntry};
use disksep::svg::render_svg;
use disksep::two_point::separate_two_points_traced;

#[derive(Parser)]
#[command(name = "disksep", version, about = "Isolate points with a minimum subset of disks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance file.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long = "box")]
        box_size: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve an instance and write the chosen ids plus trace as JSON.
    Solve {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out-json")]
        out_json: Option<PathBuf>,
        #[arg(long = "out-svg")]
        out_svg: Option<PathBuf>,
        /// Run only the two-point separator on the given point indices.
        #[arg(long = "two-point", num_args = 2, value_names = ["S_IDX", "T_IDX"])]
        two_point: Option<Vec<usize>>,
    },
    /// Exact minimum separator by subset enumeration.
    Oracle {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "max-n", default_value_t = DEFAULT_MAX_N)]
        max_n: usize,
    },
    /// Check whether the given disk ids separate all point pairs, with both
    /// the arrangement and the grid verifier.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        /// Comma-separated disk ids; an empty string is the empty subset.
        #[arg(long)]
        ids: String,
    },
    /// Generate many instances, solve each, compare against the oracle, and
    /// append the results to a CSV file.
    Ratio {
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long = "box")]
        box_size: f64,
        #[arg(long)]
        seed0: u64,
        #[arg(long = "out-csv")]
        out_csv: PathBuf,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::ParseError(_)
        | Error::InvalidInstance(_)
        | Error::DegenerateInput(_)
        | Error::NotSeparated
        | Error::Uncoverable
        | Error::PerturbationFailed(_) => 1,
        Error::GenerationFailed(_) => 2,
        Error::TooLarge(_, _) => 4,
        Error::InternalError(_)
        | Error::NoPieceCycle
        | Error::NoPath
        | Error::PiConstructionFailed(_)
        | Error::RayDegeneracy(_)
        | Error::ResolutionExhausted => 3,
    }
}

#[derive(Serialize)]
struct SolveReport {
    algorithm: &'static str,
    chosen: Vec<usize>,
    size: usize,
    verified: bool,
    trace: Vec<TraceEntryReport>,
}

#[derive(Serialize)]
struct TraceEntryReport {
    group: Vec<usize>,
    pair: (usize, usize),
    chosen: Vec<usize>,
    group_sizes: Vec<usize>,
}

fn report_from(algorithm: &'static str, result: &SeparatorResult) -> SolveReport {
    SolveReport {
        algorithm,
        chosen: result.chosen.iter().copied().collect(),
        size: result.chosen.len(),
        verified: true,
        trace: result
            .trace
            .iter()
            .map(|t| TraceEntryReport {
                group: t.group.clone(),
                pair: t.pair,
                chosen: t.chosen.iter().copied().collect(),
                group_sizes: t.group_sizes.clone(),
            })
            .collect(),
    }
}

fn chosen_disks(instance: &Instance, ids: &BTreeSet<usize>) -> Vec<Disk> {
    instance.disks.iter().filter(|d| ids.contains(&d.id)).cloned().collect()
}

fn run() -> Result<(), (u8, String)> {
    let cli = Cli::parse();
    let fail = |e: Error| (exit_code_for(&e), e.to_string());
    match cli.command {
        Command::Gen { n, k, box_size, seed, out } => {
            let tol = TolerancePolicy::default();
            let instance = generate_random_instance(n, k, box_size, seed, &tol).map_err(fail)?;
            std::fs::write(&out, write_instance(&instance))
                .map_err(|e| (1, format!("cannot write {}: {e}", out.display())))?;
            println!(
                "wrote {} with {} disks and {} points",
                out.display(),
                instance.disks.len(),
                instance.points.len()
            );
            Ok(())
        }
        Command::Solve { input, out_json, out_svg, two_point } => {
            let text = std::fs::read_to_string(&input)
                .map_err(|e| (1, format!("cannot read {}: {e}", input.display())))?;
            let instance = parse_instance(&text).map_err(fail)?;
            let tol = instance.tol;
            let result = match &two_point {
                Some(idx) => {
                    let (si, ti) = (idx[0], idx[1]);
                    if si >= instance.points.len() || ti >= instance.points.len() || si == ti {
                        return Err((1, "two-point indices out of range".into()));
                    }
                    let outcome = separate_two_points_traced(
                        &instance.disks,
                        instance.points[si],
                        instance.points[ti],
                        &tol,
                    )
                    .map_err(fail)?;
                    SeparatorResult {
                        chosen: outcome.chosen.clone(),
                        trace: vec![TraceEntry {
                            group: vec![si, ti],
                            pair: (si, ti),
                            chosen: outcome.chosen,
                            group_sizes: vec![1, 1],
                            waypoints: outcome.waypoints,
                            piece_path: outcome.piece_path_points,
                        }],
                    }
                }
                None => {
                    separate_points_traced(&instance.disks, &instance.points, &tol).map_err(fail)?
                }
            };
            // The solvers re-verify internally; this re-check is the
            // external contract of the command.
            let subset = chosen_disks(&instance, &result.chosen);
            for i in 0..instance.points.len() {
                for j in (i + 1)..instance.points.len() {
                    if two_point.is_some()
                        && !(two_point.as_ref().unwrap().contains(&i)
                            && two_point.as_ref().unwrap().contains(&j))
                    {
                        continue;
                    }
                    let ok = separates(&subset, instance.points[i], instance.points[j], &tol)
                        .map_err(fail)?;
                    if !ok {
                        return Err((3, format!("output does not separate points {i} and {j}")));
                    }
                }
            }
            let algorithm = if two_point.is_some() { "two_point" } else { "recsep" };
            let report = report_from(algorithm, &result);
            let json = serde_json::to_string_pretty(&report).expect("report serializes");
            match &out_json {
                Some(path) => std::fs::write(path, json)
                    .map_err(|e| (1, format!("cannot write {}: {e}", path.display())))?,
                None => println!("{json}"),
            }
            if let Some(path) = out_svg {
                let svg = render_svg(&instance, &result.chosen, Some(&result.trace));
                std::fs::write(&path, svg)
                    .map_err(|e| (1, format!("cannot write {}: {e}", path.display())))?;
            }
            println!("chosen {} disks: {:?}", result.chosen.len(), result.chosen);
            Ok(())
        }
        Command::Oracle { input, max_n } => {
            let text = std::fs::read_to_string(&input)
                .map_err(|e| (1, format!("cannot read {}: {e}", input.display())))?;
            let instance = parse_instance(&text).map_err(fail)?;
            let best = exact_min_separator(&instance.disks, &instance.points, max_n, &instance.tol)
                .map_err(fail)?;
            println!("optimal size {}: {:?}", best.len(), best);
            Ok(())
        }
        Command::Verify { input, ids } => {
            let text = std::fs::read_to_string(&input)
                .map_err(|e| (1, format!("cannot read {}: {e}", input.display())))?;
            let instance = parse_instance(&text).map_err(fail)?;
            let tol = instance.tol;
            let mut id_set: BTreeSet<usize> = BTreeSet::new();
            for part in ids.split(',').filter(|s| !s.is_empty()) {
                let id = part
                    .trim()
                    .parse::<usize>()
                    .map_err(|e| (1u8, format!("bad disk id {part:?}: {e}")))?;
                id_set.insert(id);
            }
            let subset = chosen_disks(&instance, &id_set);
            let mut all_ok = true;
            for i in 0..instance.points.len() {
                for j in (i + 1)..instance.points.len() {
                    let (p, q) = (instance.points[i], instance.points[j]);
                    let a = separates(&subset, p, q, &tol).map_err(fail)?;
                    let g = grid_flood_separates(&subset, p, q, DEFAULT_GRID_RESOLUTION, &tol);
                    let (gtext, agree) = match g {
                        Ok(v) => (v.to_string(), v == a),
                        Err(Error::ResolutionExhausted) => ("inconclusive".into(), true),
                        Err(e) => return Err(fail(e)),
                    };
                    println!("pair ({i},{j}): arrangement={a} grid={gtext}");
                    if !a || !agree {
                        all_ok = false;
                    }
                }
            }
            if all_ok {
                println!("verified: all pairs separated");
                Ok(())
            } else {
                Err((5, "verification negative".into()))
            }
        }
        Command::Ratio { trials, n, k, box_size, seed0, out_csv } => {
            let tol = TolerancePolicy::default();
            let rows: Vec<Option<ExperimentRecord>> = (0..trials as u64)
                .into_par_iter()
                .map(|t| {
                    let seed = seed0 + t;
                    let instance = match generate_random_instance(n, k, box_size, seed, &tol) {
                        Ok(i) => i,
                        Err(e) => {
                            eprintln!("seed {seed}: generation failed: {e}");
                            return None;
                        }
                    };
                    let start = Instant::now();
                    let result =
                        match separate_points_traced(&instance.disks, &instance.points, &tol) {
                            Ok(r) => r,
                            Err(e) => {
                                eprintln!("seed {seed}: solve failed: {e}");
                                return None;
                            }
                        };
                    let ms = start.elapsed().as_secs_f64() * 1e3;
                    let opt_size = if n <= DEFAULT_MAX_N {
                        exact_min_separator(&instance.disks, &instance.points, DEFAULT_MAX_N, &tol)
                            .ok()
                            .map(|s| s.len())
                    } else {
                        None
                    };
                    let ratio = opt_size.map(|o| result.chosen.len() as f64 / o as f64);
                    Some(ExperimentRecord {
                        instance: format!("seed{seed}"),
                        n,
                        k: instance.points.len(),
                        alg_size: result.chosen.len(),
                        opt_size,
                        ratio,
                        ms,
                    })
                })
                .collect();
            let mut out = String::from(ExperimentRecord::csv_header());
            out.push('\n');
            let mut ratios: Vec<f64> = Vec::new();
            for row in rows.into_iter().flatten() {
                if let Some(r) = row.ratio {
                    ratios.push(r);
                }
                out.push_str(&row.csv_row());
                out.push('\n');
            }
            std::fs::write(&out_csv, out)
                .map_err(|e| (1, format!("cannot write {}: {e}", out_csv.display())))?;
            if ratios.is_empty() {
                println!("{trials} trials, no oracle ratios (n > {DEFAULT_MAX_N})");
            } else {
                ratios.sort_by(f64::total_cmp);
                let max = ratios.last().unwrap();
                let median = ratios[ratios.len() / 2];
                println!(
                    "{} trials with oracle: max ratio {:.4}, median ratio {:.4}",
                    ratios.len(),
                    max,
                    median
                );
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
