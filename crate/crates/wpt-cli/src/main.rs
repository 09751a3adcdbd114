//! `wpt` — command-line front end for the wptsim library.
//!
//! One JSON config drives every subcommand; results go to stdout or, with
//! `--out-dir`, to atomically written files. Exit codes: 0 success, 1
//! domain/validation error, 2 usage error.

use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use wptsim::analysis::{
    fit_link_parameters, frequency_sweep, gap_sweep, MeasurementSet, SweepTable,
};
use wptsim::circuit::{solve_phasor, CircuitParams};
use wptsim::coil::SpiralCoil;
use wptsim::config::RunConfig;
use wptsim::design::design_coil_for_inductance;
use wptsim::error::Error;
use wptsim::magnetics::{field_map, mutual_inductance_coils, CouplingLink, DEFAULT_SEGMENTS};

const DEFAULT_SUBDIVISIONS: u32 = 4;

#[derive(Parser)]
#[command(name = "wpt", version, about = "Resonant inductive wireless power link toolkit")]
struct Cli {
    /// JSON configuration file.
    #[arg(long, global = true, default_value = "wpt.json")]
    config: PathBuf,

    /// Write results to files in this directory instead of stdout.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    /// Output format for tabular results.
    #[arg(long, global = true, default_value = "csv", value_parser = ["csv", "json"])]
    format: String,

    /// Suppress informational messages on stderr.
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print inductance, fill factor, average diameter and ESR of both coils.
    Coil,
    /// Print mutual inductance and coupling coefficient at a gap.
    Couple {
        /// Coil gap in millimeters.
        #[arg(long)]
        gap_mm: f64,
        /// Filament subdivisions per turn.
        #[arg(long, default_value_t = DEFAULT_SUBDIVISIONS)]
        subdivisions: u32,
    },
    /// Solve the circuit at one operating point and emit the phasor solution as JSON.
    Solve {
        /// Coil gap in millimeters (mutual inductance from the filament model).
        #[arg(long, conflicts_with = "m_nh")]
        gap_mm: Option<f64>,
        /// Mutual inductance override in nanohenries.
        #[arg(long = "m-nH")]
        m_nh: Option<f64>,
        /// Filament subdivisions per turn.
        #[arg(long, default_value_t = DEFAULT_SUBDIVISIONS)]
        subdivisions: u32,
    },
    /// Frequency sweep (config section `sweep` with kind "freq").
    SweepFreq,
    /// Gap sweep (config section `sweep` with kind "gap").
    SweepGap,
    /// Biot-Savart field map over an axial slice (config section `field_map`).
    FieldMap,
    /// Fit (M, R_total) to measured power/efficiency anchors (config section `fit`).
    Fit,
    /// Inverse coil design for a target inductance (config section `design`).
    Design,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

/// Write via a temp file + rename so readers never observe partial output.
fn write_atomic(path: &Path, contents: &str) -> Result<(), Error> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents)
        .and_then(|()| std::fs::rename(&tmp, path))
        .map_err(|e| Error::ConfigParse(format!("cannot write {}: {e}", path.display())))
}

fn emit(cli: &Cli, file_name: &str, contents: &str) -> Result<(), Error> {
    match &cli.out_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)
                .map_err(|e| Error::ConfigParse(format!("cannot create {}: {e}", dir.display())))?;
            let path = dir.join(file_name);
            write_atomic(&path, contents)?;
            if !cli.quiet {
                eprintln!("wrote {}", path.display());
            }
            Ok(())
        }
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn emit_table(cli: &Cli, stem: &str, table: &SweepTable) -> Result<(), Error> {
    if cli.format == "json" {
        emit(cli, &format!("{stem}.json"), &(table.to_json() + "\n"))
    } else {
        emit(cli, &format!("{stem}.csv"), &table.to_csv())
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, Error> {
    let text = std::fs::read_to_string(&cli.config).map_err(|e| {
        Error::ConfigParse(format!("cannot read {}: {e}", cli.config.display()))
    })?;
    RunConfig::from_json(&text)
}

fn coils_and_params(cfg: &RunConfig) -> Result<(SpiralCoil, SpiralCoil, CircuitParams), Error> {
    let mut issues = Vec::new();
    let tx = cfg.require_tx(&mut issues);
    let rx = cfg.require_rx(&mut issues);
    let params = cfg.require_circuit(&mut issues);
    if !issues.is_empty() {
        return Err(Error::InvalidConfig(issues));
    }
    Ok((tx.unwrap(), rx.unwrap(), params.unwrap()))
}

fn run(cli: &Cli) -> Result<(), Error> {
    let cfg = load_config(cli)?;
    match &cli.command {
        Command::Coil => {
            let mut issues = Vec::new();
            let tx = cfg.require_tx(&mut issues);
            let rx = cfg.require_rx(&mut issues);
            if !issues.is_empty() {
                return Err(Error::InvalidConfig(issues));
            }
            let frequency = cfg.circuit.as_ref().map_or(0.0, |c| c.freq_hz);
            let mut out = String::new();
            for (name, coil) in [("tx", tx.unwrap()), ("rx", rx.unwrap())] {
                if !coil.is_geometry_consistent() && !cli.quiet {
                    eprintln!(
                        "warning: {name} coil geometry inconsistent by {:.2} % (d_out vs d_in + 2n(w+s))",
                        coil.geometry_consistency_error() * 100.0
                    );
                }
                out.push_str(&format!(
                    "{name}: L = {:.6} uH, gamma = {:.6}, d_avg = {:.3} mm, R({:.0} Hz) = {:.6} ohm\n",
                    coil.self_inductance() * 1e6,
                    coil.fill_factor(),
                    coil.average_diameter() * 1e3,
                    frequency,
                    coil.series_resistance(frequency)?,
                ));
            }
            emit(cli, "coil.txt", &out)
        }
        Command::Couple { gap_mm, subdivisions } => {
            let (tx, rx, _) = partial_coils(&cfg)?;
            let link = CouplingLink::from_coils(&tx, &rx, gap_mm * 1e-3, *subdivisions)?;
            emit(
                cli,
                "couple.json",
                &format!("{}\n", serde_json::to_string_pretty(&link).expect("serializable")),
            )
        }
        Command::Solve { gap_mm, m_nh, subdivisions } => {
            let (tx, rx, params) = coils_and_params(&cfg)?;
            let (l1, l2) = (tx.self_inductance(), rx.self_inductance());
            let m = match (gap_mm, m_nh) {
                (Some(gap), None) => mutual_inductance_coils(&tx, &rx, gap * 1e-3, *subdivisions)?,
                (None, Some(m_nh)) => m_nh * 1e-9,
                _ => {
                    return Err(Error::Precondition(
                        "provide exactly one of --gap-mm or --m-nH".into(),
                    ))
                }
            };
            let link = CouplingLink::new(l1, l2, m)?;
            let sol = solve_phasor(&params, &link)?;
            emit(
                cli,
                "solve.json",
                &format!("{}\n", serde_json::to_string_pretty(&sol).expect("serializable")),
            )
        }
        Command::SweepFreq => {
            let (tx, rx, params) = coils_and_params(&cfg)?;
            let sweep = cfg.sweep.as_ref().ok_or_else(|| {
                Error::InvalidConfig(vec!["sweep: section missing".into()])
            })?;
            let mut issues = Vec::new();
            if sweep.kind != "freq" {
                issues.push(format!("sweep.kind: expected \"freq\", got {:?}", sweep.kind));
            }
            let spacing = sweep.spacing(&mut issues);
            let (Some(f_start), Some(f_stop), Some(points)) =
                (sweep.f_start_hz, sweep.f_stop_hz, sweep.points)
            else {
                issues.push("sweep: f_start_hz, f_stop_hz and points are required".into());
                return Err(Error::InvalidConfig(issues));
            };
            let subdivisions = sweep.subdivisions.unwrap_or(DEFAULT_SUBDIVISIONS);
            let m = match (sweep.gap_mm, sweep.m_nh) {
                (_, Some(m_nh)) => m_nh * 1e-9,
                (Some(gap_mm), None) => {
                    mutual_inductance_coils(&tx, &rx, gap_mm * 1e-3, subdivisions)?
                }
                (None, None) => {
                    issues.push("sweep: gap_mm (or m_nH) is required for kind \"freq\"".into());
                    return Err(Error::InvalidConfig(issues));
                }
            };
            if !issues.is_empty() {
                return Err(Error::InvalidConfig(issues));
            }
            let link = CouplingLink::new(tx.self_inductance(), rx.self_inductance(), m)?;
            let table = frequency_sweep(&params, &link, f_start, f_stop, points, spacing)?;
            emit_table(cli, "sweep_freq", &table)
        }
        Command::SweepGap => {
            let (tx, rx, params) = coils_and_params(&cfg)?;
            let sweep = cfg.sweep.as_ref().ok_or_else(|| {
                Error::InvalidConfig(vec!["sweep: section missing".into()])
            })?;
            let mut issues = Vec::new();
            if sweep.kind != "gap" {
                issues.push(format!("sweep.kind: expected \"gap\", got {:?}", sweep.kind));
            }
            let Some(gaps_mm) = &sweep.gaps_mm else {
                issues.push("sweep: gaps_mm is required for kind \"gap\"".into());
                return Err(Error::InvalidConfig(issues));
            };
            if !issues.is_empty() {
                return Err(Error::InvalidConfig(issues));
            }
            let gaps: Vec<f64> = gaps_mm.iter().map(|g| g * 1e-3).collect();
            let subdivisions = sweep.subdivisions.unwrap_or(DEFAULT_SUBDIVISIONS);
            let table = gap_sweep(&params, &tx, &rx, &gaps, subdivisions)?;
            if table.flagged > 0 && !cli.quiet {
                eprintln!("warning: {} gap rows skipped (unphysical coupling or solver failure)", table.flagged);
            }
            emit_table(cli, "sweep_gap", &table)
        }
        Command::FieldMap => {
            let mut issues = Vec::new();
            let tx = cfg.require_tx(&mut issues);
            if !issues.is_empty() {
                return Err(Error::InvalidConfig(issues));
            }
            let fm = cfg.field_map.as_ref().ok_or_else(|| {
                Error::InvalidConfig(vec!["field_map: section missing".into()])
            })?;
            let grid = fm.to_grid();
            let map = field_map(
                &tx.unwrap(),
                fm.current_a,
                &grid,
                fm.segments.unwrap_or(DEFAULT_SEGMENTS),
            )?;
            emit(cli, "field_map.csv", &map.to_csv())?;
            emit(
                cli,
                "field_map_summary.json",
                &format!("{}\n", serde_json::to_string_pretty(&map.summary()).expect("serializable")),
            )
        }
        Command::Fit => {
            let (tx, rx, params) = coils_and_params(&cfg)?;
            let fit_cfg = cfg.fit.as_ref().ok_or_else(|| {
                Error::InvalidConfig(vec!["fit: section missing".into()])
            })?;
            let anchors = MeasurementSet::new(vec![])?
                .with_anchors(fit_cfg.efficiency, fit_cfg.p_load_w);
            let base = CircuitParams { r1: 0.0, r2: 0.0, ..params };
            let result =
                fit_link_parameters(&anchors, &base, tx.self_inductance(), rx.self_inductance())?;
            if !result.converged && !cli.quiet {
                eprintln!("warning: fit did not converge (residual {:.3e})", result.residual);
            }
            emit(
                cli,
                "fit.json",
                &format!("{}\n", serde_json::to_string_pretty(&result).expect("serializable")),
            )
        }
        Command::Design => {
            let design = cfg.design.as_ref().ok_or_else(|| {
                Error::InvalidConfig(vec!["design: section missing".into()])
            })?;
            let coil = design_coil_for_inductance(&design.to_constraints())?;
            emit(
                cli,
                "design.json",
                &format!("{}\n", serde_json::to_string_pretty(&coil).expect("serializable")),
            )
        }
    }
}

fn partial_coils(cfg: &RunConfig) -> Result<(SpiralCoil, SpiralCoil, ()), Error> {
    let mut issues = Vec::new();
    let tx = cfg.require_tx(&mut issues);
    let rx = cfg.require_rx(&mut issues);
    if !issues.is_empty() {
        return Err(Error::InvalidConfig(issues));
    }
    Ok((tx.unwrap(), rx.unwrap(), ()))
}
