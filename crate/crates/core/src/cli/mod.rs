//! Command-line front end: `run`, `convergence` and `check`.
//!
//! Every command parses and validates its configuration and finishes all
//! computation before it creates the output directory, so a bad config or a
//! failed solve leaves no partial files behind.
//!
//! Exit codes: 0 success, 1 a check failed, 2 configuration (or output) error,
//! 3 solver failure.

pub mod checks;
pub mod config;
pub mod problem;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::euclidean::exact_flow;
use crate::oracles::fine_step_reference;
use crate::scheme::{
    run_scheme, trotter_convergence_study, ConvergenceTable, Reference, SchemeError, SplitProblem,
    TolerancePolicy, TrajectoryRecord,
};
use crate::wass1d::{a3_constants, QuantileDensity};
use checks::{a3_family, compatibility_family, generic_checks, FamilyResult};
use config::{Corruption, ReferenceKind, RunConfig};
use problem::{build, discretisation, EuclideanSampler, Setup, WassSampler};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("solver failure: {0}")]
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
        }
    }
}

impl From<SchemeError> for CliError {
    fn from(e: SchemeError) -> Self {
        match e {
            SchemeError::EmptyDiscretisation | SchemeError::InvalidStep { .. } => {
                CliError::Config(e.to_string())
            }
            other => CliError::Solver(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Run,
    Convergence,
    Check,
}

/// Overrides given on the command line.
#[derive(Debug, Clone, Default)]
pub struct Options {
    pub output_dir: Option<PathBuf>,
    pub seed: Option<u64>,
}

/// Loads the config, applies the overrides and runs the command. Returns the
/// process exit code.
pub fn execute(command: CommandKind, config_path: &Path, opts: &Options) -> i32 {
    let result = load_config(config_path, opts).and_then(|(cfg, out)| match command {
        CommandKind::Run => cmd_run(&cfg, &out).map(|s| {
            println!("{s}");
            0
        }),
        CommandKind::Convergence => cmd_convergence(&cfg, &out).map(|t| {
            print!("{}", convergence_csv(&t));
            0
        }),
        CommandKind::Check => cmd_check(&cfg, &out).map(|families| {
            for f in &families {
                println!("{}", f.line());
            }
            if families.iter().all(|f| f.pass) {
                0
            } else {
                1
            }
        }),
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn load_config(path: &Path, opts: &Options) -> Result<(RunConfig, PathBuf), CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mut cfg = RunConfig::parse(&text).map_err(|e| CliError::Config(e.0))?;
    if let Some(seed) = opts.seed {
        cfg.seed = seed;
    }
    let out = opts
        .output_dir
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    Ok((cfg, out))
}

fn write_files(dir: &Path, files: &[(String, String)]) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Config(format!("{}: {e}", dir.display())))?;
    for (name, contents) in files {
        let path = dir.join(name);
        fs::write(&path, contents)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn trajectory_csv<P>(traj: &TrajectoryRecord<P>) -> String {
    let mut s = String::from("k,t_k,delta_k,Delta_k,step_dist_sq,phi1,phi2,phi\n");
    let disc = traj.discretisation();
    for k in 1..=traj.len() {
        let st = traj.step(k);
        let _ = writeln!(
            s,
            "{k},{},{},{},{},{},{},{}",
            num(disc.time(k)),
            num(st.delta),
            num(st.cum_delta),
            num(st.step_dist_sq),
            num(st.phi1_full),
            num(st.phi2_full),
            num(st.phi_full())
        );
    }
    s
}

pub fn snapshot_csv(mu: &QuantileDensity) -> String {
    let mut s = String::from("i,s_i,x_i\n");
    for (i, x) in mu.values().iter().enumerate() {
        let _ = writeln!(s, "{},{},{}", i + 1, num(mu.mass_coordinate(i)), num(*x));
    }
    s
}

pub fn convergence_csv(table: &ConvergenceTable) -> String {
    let mut s = String::from("n,mesh,sup_error\n");
    for r in &table.rows {
        let _ = writeln!(s, "{},{},{}", r.n, num(r.mesh), num(r.sup_error));
    }
    let _ = writeln!(s, "slope,,{}", num(table.slope));
    s
}

fn run_generic<P: Clone>(
    problem: &SplitProblem<P>,
    x0: &P,
    cfg: &RunConfig,
) -> Result<TrajectoryRecord<P>, CliError> {
    let disc = discretisation(cfg)?;
    log::info!(
        "running {} with {} steps to T = {}",
        problem.describe(),
        disc.len(),
        disc.final_time()
    );
    Ok(run_scheme(problem, x0, &disc)?)
}

fn summary_json<P>(
    traj: &TrajectoryRecord<P>,
    problem: &SplitProblem<P>,
    wall: f64,
) -> serde_json::Value {
    let n = traj.len();
    json!({
        "problem": problem.describe(),
        "steps": n,
        "final_time": traj.discretisation().final_time(),
        "phi1_final": traj.phi1(n),
        "phi2_final": traj.phi2(n),
        "phi_final": traj.phi(n),
        "Delta_n": traj.cum_delta(n),
        "max_certificate": traj.max_certificate(),
        "wall_time_s": wall,
    })
}

/// Runs the scheme and writes `trajectory.csv`, `summary.json` and, for
/// Wasserstein problems, `snapshot_k{k}.csv` for each requested step.
/// Returns the summary.
pub fn cmd_run(cfg: &RunConfig, out: &Path) -> Result<String, CliError> {
    let start = Instant::now();
    let setup = build(cfg)?;
    let mut files = Vec::new();
    let summary = match &setup {
        Setup::Euclidean(e) => {
            let traj = run_generic(&e.problem, &e.x0, cfg)?;
            files.push(("trajectory.csv".to_string(), trajectory_csv(&traj)));
            summary_json(&traj, &e.problem, start.elapsed().as_secs_f64())
        }
        Setup::Wass(w) => {
            let traj = run_generic(&w.problem, &w.x0, cfg)?;
            files.push(("trajectory.csv".to_string(), trajectory_csv(&traj)));
            for &k in &cfg.snapshots {
                files.push((format!("snapshot_k{k}.csv"), snapshot_csv(traj.point(k))));
            }
            summary_json(&traj, &w.problem, start.elapsed().as_secs_f64())
        }
    };
    let text = serde_json::to_string_pretty(&summary).expect("json");
    files.push(("summary.json".to_string(), text.clone() + "\n"));
    write_files(out, &files)?;
    Ok(text)
}

/// Sweeps `step_counts` and writes `convergence.csv`.
pub fn cmd_convergence(cfg: &RunConfig, out: &Path) -> Result<ConvergenceTable, CliError> {
    if cfg.step_counts.len() < 3 {
        return Err(CliError::Config(
            "`step_counts` needs at least three entries".into(),
        ));
    }
    let setup = build(cfg)?;
    let counts = &cfg.step_counts;
    let n_max = *counts.last().unwrap();
    let n_ref = cfg.reference_steps.unwrap_or(4 * n_max);
    let t = cfg.total_time;
    let table = match &setup {
        Setup::Euclidean(e) => match cfg.reference.unwrap_or(ReferenceKind::Exact) {
            ReferenceKind::Exact => {
                let oracle =
                    |tau: f64| exact_flow(&e.f1, &e.f2, &e.x0, tau).expect("dimensions checked");
                trotter_convergence_study(&e.problem, &e.x0, t, counts, Reference::Oracle(&oracle))?
            }
            ReferenceKind::Fine => {
                let path = fine_step_reference(&e.problem, &e.x0, t, n_ref, n_max)?;
                trotter_convergence_study(&e.problem, &e.x0, t, counts, Reference::Sampled(&path))?
            }
        },
        Setup::Wass(w) => {
            let wants_exact = cfg.reference.unwrap_or(if w.oracle.is_some() {
                ReferenceKind::Exact
            } else {
                ReferenceKind::Fine
            });
            match (wants_exact, w.oracle) {
                (ReferenceKind::Exact, Some(oracle)) => {
                    let cells = w.cells;
                    let f = move |tau: f64| oracle.at(tau, cells);
                    trotter_convergence_study(&w.problem, &w.x0, t, counts, Reference::Oracle(&f))?
                }
                (ReferenceKind::Exact, None) => {
                    return Err(CliError::Config(
                        "no closed-form reference for this potential".into(),
                    ))
                }
                (ReferenceKind::Fine, _) => {
                    let path = fine_step_reference(&w.problem, &w.x0, t, n_ref, n_max)?;
                    trotter_convergence_study(
                        &w.problem,
                        &w.x0,
                        t,
                        counts,
                        Reference::Sampled(&path),
                    )?
                }
            }
        }
    };
    write_files(
        out,
        &[("convergence.csv".to_string(), convergence_csv(&table))],
    )?;
    Ok(table)
}

fn corrupt<P>(traj: TrajectoryRecord<P>, how: Corruption) -> Result<TrajectoryRecord<P>, CliError> {
    let (x0, phi1, phi2, mut steps, disc) = traj.into_parts();
    match how {
        Corruption::DecreaseDelta => {
            let k = steps.len() / 2;
            let s = &mut steps[k];
            s.cum_delta -= 1e-3 * (1.0 + s.cum_delta.abs());
        }
    }
    Ok(TrajectoryRecord::from_parts_unchecked(
        x0, phi1, phi2, steps, disc,
    )?)
}

/// Runs the scheme, evaluates every applicable inequality family and writes
/// `verdict.json`.
pub fn cmd_check(cfg: &RunConfig, out: &Path) -> Result<Vec<FamilyResult>, CliError> {
    let setup = build(cfg)?;
    let policy = TolerancePolicy::default();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let families = match &setup {
        Setup::Euclidean(e) => {
            let mut traj = run_generic(&e.problem, &e.x0, cfg)?;
            if let Some(how) = cfg.corrupt {
                traj = corrupt(traj, how)?;
            }
            let sampler = EuclideanSampler {
                center: e.x0.clone(),
                scale: 1.0 + e.x0.norm(),
            };
            generic_checks(&traj, &e.problem, &sampler, cfg.probes, &mut rng, &policy)?
        }
        Setup::Wass(w) => {
            let mut traj = run_generic(&w.problem, &w.x0, cfg)?;
            if let Some(how) = cfg.corrupt {
                traj = corrupt(traj, how)?;
            }
            let sampler = WassSampler { cells: w.cells };
            let mut f = generic_checks(&traj, &w.problem, &sampler, cfg.probes, &mut rng, &policy)?;
            let (mode, constants) = a3_constants(&w.potential, w.kind, w.order);
            f.push(a3_family(&traj, &w.problem, mode, constants, &policy)?);
            f.push(
                compatibility_family(&traj, &w.potential, w.kind)
                    .map_err(|e| CliError::Solver(e.to_string()))?,
            );
            f
        }
    };
    let verdict = json!({
        "pass": families.iter().all(|f| f.pass),
        "families": families,
    });
    write_files(
        out,
        &[(
            "verdict.json".to_string(),
            serde_json::to_string_pretty(&verdict).expect("json") + "\n",
        )],
    )?;
    Ok(families)
}
