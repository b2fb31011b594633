//! donorsim: simulate and analyze the donor-spin silicon quantum computer
//! stack — spin spectra, exchange coupling, gates and robust pulses,
//! voltage-noise dephasing, spin refrigeration, readout, tunneling leakage,
//! and circuit compilation onto a shuttling grid.
//!
//! Every command writes `#`-annotated CSV (or JSON mirrors) into `--out`,
//! stamped with the tool version, config hash and seed; reruns with the
//! same inputs are byte-identical.
//!
//! Exit codes: 0 success, 2 configuration error, 3 violated physical
//! precondition, 4 unroutable/unreachable.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use donorsim_core::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "donorsim", version, about)]
pub struct Cli {
    /// Key-value config file (species overrides etc.).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// RNG seed stamped into all outputs.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,

    /// Output format for data tables.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Single-donor energy levels over a field range.
    Levels {
        #[arg(long, default_value_t = 0.0)]
        b_min: f64,
        #[arg(long, default_value_t = 0.2)]
        b_max: f64,
        #[arg(long, default_value_t = 201)]
        points: usize,
        /// Log-spaced field grid (b_min must be > 0).
        #[arg(long)]
        log: bool,
    },
    /// Transition matrix elements vs field.
    Moments {
        #[arg(long, default_value_t = 1e-3)]
        b_min: f64,
        #[arg(long, default_value_t = 10.0)]
        b_max: f64,
        #[arg(long, default_value_t = 61)]
        points: usize,
    },
    /// Exchange coupling J(r) between donor sites.
    Exchange {
        #[arg(long, default_value_t = 50.0)]
        r_min_angstrom: f64,
        #[arg(long, default_value_t = 300.0)]
        r_max_angstrom: f64,
        #[arg(long, default_value_t = 126)]
        points: usize,
        /// Field whose electron Zeeman energy is tabulated for comparison.
        #[arg(long, default_value_t = 1.0)]
        b: f64,
    },
    /// Electron-mediated nuclear exchange frequency vs the exact 16-level
    /// oracle.
    Nuj {
        #[arg(long, default_value_t = 2.0)]
        b: f64,
        /// Exchange as a fraction of μ_B B / (2h), in (0, 1).
        #[arg(long, default_value_t = 0.5)]
        j_frac: f64,
        /// Override the hyperfine frequency (Hz).
        #[arg(long)]
        a_hz: Option<f64>,
    },
    /// Emit a pulse shape and its detuning response.
    Pulse {
        #[arg(long, value_enum, default_value_t = commands::PulseKind::Rect)]
        kind: commands::PulseKind,
        #[arg(long, default_value_t = 90.0)]
        angle_deg: f64,
        #[arg(long, default_value_t = 90.0)]
        axis_deg: f64,
        /// Peak Rabi frequency (Hz).
        #[arg(long, default_value_t = 1e6)]
        nu1: f64,
        /// Detunings scanned, as a fraction of ν₁.
        #[arg(long, default_value_t = 0.3)]
        scan_frac: f64,
        #[arg(long, default_value_t = 41)]
        scan_points: usize,
    },
    /// Optimize a smooth pulse against a detuning window.
    OptimizePulse {
        #[arg(long, default_value_t = 90.0)]
        angle_deg: f64,
        #[arg(long, default_value_t = 90.0)]
        axis_deg: f64,
        #[arg(long, default_value_t = 1e6)]
        nu1: f64,
        /// Window half-width as a fraction of ν₁.
        #[arg(long, default_value_t = 0.05)]
        window_frac: f64,
        #[arg(long, default_value_t = 6)]
        coeffs: usize,
        #[arg(long, default_value_t = 300)]
        max_iters: usize,
        #[arg(long, default_value_t = 2)]
        restarts: usize,
    },
    /// VCO dephasing rate, optionally with a Monte Carlo coherence curve.
    Dephase {
        /// Tuning parameter dν/dV (Hz/V).
        #[arg(long, default_value_t = 1e8)]
        alpha: f64,
        /// White voltage PSD (V²/Hz, single-sided).
        #[arg(long, default_value_t = 1e-18)]
        s_white: f64,
        /// 1/f PSD at 1 Hz (V²/Hz).
        #[arg(long, default_value_t = 0.0)]
        s_oneoverf: f64,
        #[arg(long, default_value_t = 1.0)]
        f_min: f64,
        #[arg(long, default_value_t = 1e4)]
        f_max: f64,
        /// Run the Monte Carlo coherence estimate.
        #[arg(long)]
        mc: bool,
        #[arg(long, default_value_t = 2000)]
        trials: u32,
        /// Total simulated time (s); default 3 / predicted rate.
        #[arg(long)]
        t_total: Option<f64>,
    },
    /// Equilibrium electron polarization over a (B, T) grid.
    Polarization {
        #[arg(long, default_value_t = 1e-2)]
        b_min: f64,
        #[arg(long, default_value_t = 10.0)]
        b_max: f64,
        #[arg(long, default_value_t = 1e-2)]
        t_min: f64,
        #[arg(long, default_value_t = 10.0)]
        t_max: f64,
        #[arg(long, default_value_t = 41)]
        points: usize,
    },
    /// Singlet-rejection refrigerator cascade.
    Fridge {
        #[arg(long, default_value_t = 0.5)]
        p_in: f64,
        #[arg(long, default_value_t = 15)]
        stages: usize,
        /// Cross-check one stage with pair sampling.
        #[arg(long)]
        mc: bool,
        #[arg(long, default_value_t = 1_000_000)]
        pairs: u64,
    },
    /// Readout fidelity model, optionally with stochastic sampling.
    Readout {
        #[arg(long, default_value_t = 10e-6)]
        t_meas: f64,
        #[arg(long, default_value_t = 1e-6)]
        t_st: f64,
        #[arg(long, default_value_t = 1.0)]
        t_flip: f64,
        /// Sample outcome frequencies for each initial state.
        #[arg(long)]
        simulate: bool,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
    /// Fowler–Nordheim tunneling rates for both silicon masses.
    Tunnel {
        #[arg(long, default_value_t = 1e7)]
        f_min: f64,
        #[arg(long, default_value_t = 1e8)]
        f_max: f64,
        #[arg(long, default_value_t = 41)]
        points: usize,
        #[arg(long, default_value_t = 0.1)]
        phi_ev: f64,
        #[arg(long, default_value_t = 1e13)]
        attempt: f64,
    },
    /// Route a single electron across a device grid.
    Route {
        #[arg(long)]
        grid: PathBuf,
        /// Source cell "row,col".
        #[arg(long)]
        src: String,
        /// Destination cell "row,col".
        #[arg(long)]
        dst: String,
        /// Occupied cells "row,col;row,col;...".
        #[arg(long, default_value = "")]
        occupied: String,
    },
    /// Compile a circuit (JSON) onto a device grid.
    Compile {
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        circuit: PathBuf,
    },
    /// Reproduce a figure's underlying data grid.
    Figure {
        /// One of: fig1a fig1b fig1c fig2 fig5 fig6 fig11d fig13.
        #[arg(long)]
        name: String,
    },
    /// Cross-product parameter sweep over a named target.
    Sweep {
        /// One of: nuj exchange polarization dephasing tunnel.
        #[arg(long)]
        target: String,
        /// Ranges "name=start:stop:n", repeatable, cross-product in order.
        #[arg(long = "param", required = true)]
        params: Vec<String>,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::Io(_) => 2,
        Error::Precondition { .. } => 3,
        Error::Unroutable { .. } | Error::Uncompilable { .. } => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
