//! Subcommand implementations.

// Guards use `!(x > 0.0)` so NaN from parsed flags fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use donorsim_core::architect::{
    compile_circuit, error_budget, route_electron, validate_schedule, Action, Cell, Circuit,
    DeviceGrid, ErrorRates, Schedule, TimingModel,
};
use donorsim_core::config::KvConfig;
use donorsim_core::constants::MU_B_HZ_PER_T;
use donorsim_core::coupling::{exchange_j, nu_j, nu_j_exact, TwoDonorSystem};
use donorsim_core::dynamics::{
    optimize_pulse, pulse_infidelity, OptimizeOptions, PulseShape, Rotation, SineEnvelopeFamily,
};
use donorsim_core::error::{Error, Result};
use donorsim_core::noise::{dephasing_rate, mc_coherence, NoiseSpectrum, VcoModel};
use donorsim_core::output::{fmt_f64, CsvTable};
use donorsim_core::readout::{
    fn_tunneling_rate, readout_fidelity, simulate_readout, PairState, ReadoutOutcome,
    ReadoutParams, TunnelBarrier,
};
use donorsim_core::species::DonorSpecies;
use donorsim_core::spin::{
    energy_differences, moment_between, single_donor_spectrum, DriveAxis,
};
use donorsim_core::thermo::{equilibrium_polarization, field_for_polarization, fridge_cascade,
    fridge_stage, mc_fridge};

use crate::{Cli, Cmd, Format};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PulseKind {
    Rect,
    Corpse,
}

struct Ctx {
    species: DonorSpecies,
    config: KvConfig,
    seed: u64,
    out: PathBuf,
    format: Format,
}

impl Ctx {
    fn table(&self, columns: &[&str]) -> CsvTable {
        let mut t = CsvTable::new(columns);
        donorsim_core::output::standard_metadata(&mut t, self.config.hash(), self.seed);
        // Echo physical overrides so outputs are self-describing.
        t.meta("species.name", &self.species.name);
        t.meta("species.a_hz", fmt_f64(self.species.hyperfine_hz));
        t.meta("species.g_n", fmt_f64(self.species.g_n));
        t.meta("species.e_b_ev", fmt_f64(self.species.binding_energy_ev));
        t.meta("species.a_bohr_m", fmt_f64(self.species.bohr_radius_m));
        t.meta("species.strain_factor", fmt_f64(self.species.strain_factor));
        for (k, v) in self.config.entries() {
            if !k.starts_with("species.") {
                t.meta(k, v);
            }
        }
        t
    }

    fn write(&self, table: &CsvTable, name: &str) -> Result<()> {
        let path = match self.format {
            Format::Csv => self.out.join(format!("{name}.csv")),
            Format::Json => self.out.join(format!("{name}.json")),
        };
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        match self.format {
            Format::Csv => std::fs::write(&path, table.render())?,
            Format::Json => std::fs::write(&path, table.render_json())?,
        }
        println!("wrote {}", path.display());
        Ok(())
    }

    fn write_json(&self, value: &serde_json::Value, name: &str) -> Result<()> {
        let path = self.out.join(format!("{name}.json"));
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| Error::config(format!("json: {e}")))?;
        text.push('\n');
        std::fs::write(&path, text)?;
        println!("wrote {}", path.display());
        Ok(())
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let config = match &cli.config {
        Some(path) => KvConfig::load(path)?,
        None => KvConfig::default(),
    };
    let species = config.species()?;
    let ctx = Ctx {
        species,
        config,
        seed: cli.seed,
        out: cli.out.clone(),
        format: cli.format,
    };
    match &cli.cmd {
        Cmd::Levels {
            b_min,
            b_max,
            points,
            log,
        } => levels(&ctx, *b_min, *b_max, *points, *log, "levels"),
        Cmd::Moments {
            b_min,
            b_max,
            points,
        } => moments(&ctx, *b_min, *b_max, *points, "moments"),
        Cmd::Exchange {
            r_min_angstrom,
            r_max_angstrom,
            points,
            b,
        } => exchange(&ctx, *r_min_angstrom, *r_max_angstrom, *points, *b, "exchange"),
        Cmd::Nuj { b, j_frac, a_hz } => nuj(&ctx, *b, *j_frac, *a_hz),
        Cmd::Pulse {
            kind,
            angle_deg,
            axis_deg,
            nu1,
            scan_frac,
            scan_points,
        } => pulse(&ctx, *kind, *angle_deg, *axis_deg, *nu1, *scan_frac, *scan_points),
        Cmd::OptimizePulse {
            angle_deg,
            axis_deg,
            nu1,
            window_frac,
            coeffs,
            max_iters,
            restarts,
        } => optimize(
            &ctx,
            *angle_deg,
            *axis_deg,
            *nu1,
            *window_frac,
            *coeffs,
            *max_iters,
            *restarts,
        ),
        Cmd::Dephase {
            alpha,
            s_white,
            s_oneoverf,
            f_min,
            f_max,
            mc,
            trials,
            t_total,
        } => dephase(
            &ctx, *alpha, *s_white, *s_oneoverf, *f_min, *f_max, *mc, *trials, *t_total,
        ),
        Cmd::Polarization {
            b_min,
            b_max,
            t_min,
            t_max,
            points,
        } => polarization(&ctx, *b_min, *b_max, *t_min, *t_max, *points, "polarization"),
        Cmd::Fridge {
            p_in,
            stages,
            mc,
            pairs,
        } => fridge(&ctx, *p_in, *stages, *mc, *pairs),
        Cmd::Readout {
            t_meas,
            t_st,
            t_flip,
            simulate,
            trials,
        } => readout(&ctx, *t_meas, *t_st, *t_flip, *simulate, *trials),
        Cmd::Tunnel {
            f_min,
            f_max,
            points,
            phi_ev,
            attempt,
        } => tunnel(&ctx, *f_min, *f_max, *points, *phi_ev, *attempt, "tunnel"),
        Cmd::Route {
            grid,
            src,
            dst,
            occupied,
        } => route(&ctx, grid, src, dst, occupied),
        Cmd::Compile { grid, circuit } => compile(&ctx, grid, circuit),
        Cmd::Figure { name } => figure(&ctx, name),
        Cmd::Sweep { target, params } => sweep(&ctx, target, params),
    }
}

fn grid_points(min: f64, max: f64, n: usize, log: bool) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::config("grid needs at least one point".to_string()));
    }
    if max < min {
        return Err(Error::config(format!("empty range [{min}, {max}]")));
    }
    if n == 1 {
        return Ok(vec![min]);
    }
    if log {
        if !(min > 0.0) {
            return Err(Error::config("log grid requires positive minimum".to_string()));
        }
        let lmin = min.ln();
        let lmax = max.ln();
        Ok((0..n)
            .map(|k| (lmin + (lmax - lmin) * k as f64 / (n - 1) as f64).exp())
            .collect())
    } else {
        Ok((0..n)
            .map(|k| min + (max - min) * k as f64 / (n - 1) as f64)
            .collect())
    }
}

fn levels(ctx: &Ctx, b_min: f64, b_max: f64, points: usize, log: bool, name: &str) -> Result<()> {
    let mut t = ctx.table(&["B_tesla", "level_index", "freq_hz", "label"]);
    for b in grid_points(b_min, b_max, points, log)? {
        let spec = single_donor_spectrum(&ctx.species, b)?;
        for (k, (level, label)) in spec.levels.iter().zip(&spec.labels).enumerate() {
            t.row(vec![
                fmt_f64(b),
                k.to_string(),
                fmt_f64(*level),
                label.clone(),
            ]);
        }
    }
    ctx.write(&t, name)
}

fn gaps(ctx: &Ctx, b_min: f64, b_max: f64, points: usize, name: &str) -> Result<()> {
    let grid = grid_points(b_min, b_max, points, false)?;
    let rows = energy_differences(&ctx.species, &grid)?;
    let mut t = ctx.table(&["B_tesla", "lower", "upper", "gap_hz"]);
    for row in rows {
        for g in row.gaps {
            t.row(vec![
                fmt_f64(row.b_tesla),
                g.lower.to_string(),
                g.upper.to_string(),
                fmt_f64(g.gap_hz),
            ]);
        }
    }
    ctx.write(&t, name)
}

fn moments(ctx: &Ctx, b_min: f64, b_max: f64, points: usize, name: &str) -> Result<()> {
    let mut t = ctx.table(&["B_tesla", "lower", "upper", "kind", "moment_mu_b"]);
    // The four single-quantum transitions under a transverse drive, plus
    // the zero-quantum flip-flop under a longitudinal drive.
    for b in grid_points(b_min, b_max, points, true)? {
        let spec = single_donor_spectrum(&ctx.species, b)?;
        let mut pairs: Vec<(usize, usize, DriveAxis)> = Vec::new();
        for i in 0..4 {
            for j in (i + 1)..4 {
                pairs.push((i, j, DriveAxis::X));
            }
        }
        // m = 0 pair by label.
        let m0: Vec<usize> = spec
            .labels
            .iter()
            .enumerate()
            .filter(|(_, l)| matches!(l.as_str(), "de_un" | "ue_dn" | "singlet" | "triplet0"))
            .map(|(k, _)| k)
            .collect();
        if m0.len() == 2 {
            pairs.push((m0[0].min(m0[1]), m0[0].max(m0[1]), DriveAxis::Z));
        }
        for (i, j, axis) in pairs {
            let m = moment_between(&ctx.species, &spec, i, j, axis);
            if m < 1e-10 && axis == DriveAxis::X {
                continue; // forbidden line, not plotted
            }
            t.row(vec![
                fmt_f64(b),
                i.to_string(),
                j.to_string(),
                match axis {
                    DriveAxis::X => "x".to_string(),
                    DriveAxis::Z => "z".to_string(),
                },
                fmt_f64(m),
            ]);
        }
    }
    ctx.write(&t, name)
}

fn exchange(
    ctx: &Ctx,
    r_min_a: f64,
    r_max_a: f64,
    points: usize,
    b: f64,
    name: &str,
) -> Result<()> {
    let mut t = ctx.table(&["r_angstrom", "J_hz", "muB_B_hz"]);
    let zeeman = MU_B_HZ_PER_T * b;
    for r_a in grid_points(r_min_a, r_max_a, points, false)? {
        let j = exchange_j(
            r_a * 1e-10,
            ctx.species.binding_energy_ev,
            ctx.species.bohr_radius_m,
        )?;
        t.row_f64(&[r_a, j, zeeman]);
    }
    ctx.write(&t, name)
}

fn nuj(ctx: &Ctx, b: f64, j_frac: f64, a_hz: Option<f64>) -> Result<()> {
    let a = a_hz.unwrap_or_else(|| ctx.species.effective_hyperfine_hz());
    let e = MU_B_HZ_PER_T * b;
    let j = j_frac * e / 2.0;
    let approx = nu_j(a, b, j)?;
    let mut left = ctx.species.clone();
    left.hyperfine_hz = a;
    left.strain_factor = 1.0;
    let sys = TwoDonorSystem::new(left.clone(), left, b, j)?;
    let exact = nu_j_exact(&sys)?;
    let mut t = ctx.table(&[
        "a_hz",
        "b_tesla",
        "j_hz",
        "nu_j_hz",
        "nu_j_exact_hz",
        "rel_err",
    ]);
    t.row_f64(&[a, b, j, approx, exact, (approx - exact).abs() / exact.abs().max(1e-300)]);
    ctx.write(&t, "nuj")
}

fn pulse(
    ctx: &Ctx,
    kind: PulseKind,
    angle_deg: f64,
    axis_deg: f64,
    nu1: f64,
    scan_frac: f64,
    scan_points: usize,
) -> Result<()> {
    let target = Rotation {
        angle_rad: angle_deg.to_radians(),
        axis_phase_rad: axis_deg.to_radians(),
    };
    let shape = match kind {
        PulseKind::Rect => PulseShape::rectangular(
            donorsim_core::dynamics::pulse::tesla_for_rabi(nu1, 1.0),
            target.angle_rad / (2.0 * std::f64::consts::PI * nu1),
            64,
            1e9,
            target.axis_phase_rad,
        )?,
        PulseKind::Corpse => {
            PulseShape::corpse(target.angle_rad, target.axis_phase_rad, nu1, 1.0, 1e9)?
        }
    };
    let mut t = shape.to_csv();
    donorsim_core::output::standard_metadata(&mut t, ctx.config.hash(), ctx.seed);
    ctx.write(&t, "pulse")?;

    let mut scan = ctx.table(&["detuning_hz", "infidelity"]);
    for d in grid_points(-scan_frac * nu1, scan_frac * nu1, scan_points, false)? {
        scan.row_f64(&[d, pulse_infidelity(&shape, 1.0, d, &target)]);
    }
    ctx.write(&scan, "pulse_scan")
}

#[allow(clippy::too_many_arguments)]
fn optimize(
    ctx: &Ctx,
    angle_deg: f64,
    axis_deg: f64,
    nu1: f64,
    window_frac: f64,
    coeffs: usize,
    max_iters: usize,
    restarts: usize,
) -> Result<()> {
    let target = Rotation {
        angle_rad: angle_deg.to_radians(),
        axis_phase_rad: axis_deg.to_radians(),
    };
    let family = SineEnvelopeFamily::for_target(target, nu1, 1.0, coeffs);
    let opts = OptimizeOptions {
        seed: ctx.seed,
        max_iters,
        restarts,
        ..OptimizeOptions::default()
    };
    let out = optimize_pulse(&family, window_frac * nu1, &opts)?;
    let mut t = out.shape.to_csv();
    donorsim_core::output::standard_metadata(&mut t, ctx.config.hash(), ctx.seed);
    t.meta("worst_case_infidelity", fmt_f64(out.worst_case_infidelity));
    t.meta("initial_worst_case", fmt_f64(out.initial_worst_case));
    t.meta("improved", out.improved);
    t.meta("evaluations", out.evaluations);
    ctx.write(&t, "optimized_pulse")
}

#[allow(clippy::too_many_arguments)]
fn dephase(
    ctx: &Ctx,
    alpha: f64,
    s_white: f64,
    s_oneoverf: f64,
    f_min: f64,
    f_max: f64,
    mc: bool,
    trials: u32,
    t_total: Option<f64>,
) -> Result<()> {
    if alpha < 0.0 || s_white < 0.0 || s_oneoverf < 0.0 {
        return Err(Error::config("noise parameters must be nonnegative".to_string()));
    }
    let rate = dephasing_rate(alpha, s_white);
    let mut t = ctx.table(&["alpha_hz_per_v", "s_white_v2_per_hz", "rate_hz"]);
    // The rate uses α at the bias point; a time-varying bias during shaped
    // pulses makes the effective t_φ pulse-dependent.
    t.meta("alpha_evaluated_at", "bias point");
    t.row_f64(&[alpha, s_white, rate]);
    ctx.write(&t, "dephase")?;

    if mc {
        let spec = NoiseSpectrum {
            s_white,
            s_oneoverf_at_1hz: s_oneoverf,
            f_min,
            f_max,
        };
        let vco = VcoModel {
            alpha_hz_per_v: alpha,
            base_frequency_hz: 0.0,
        };
        let horizon = t_total.unwrap_or(if rate > 0.0 { 3.0 / rate } else { 1.0 });
        let curve = mc_coherence(&vco, &spec, horizon, trials, ctx.seed)?;
        let mut ct = ctx.table(&["t_s", "coherence", "stderr"]);
        ct.meta("white_rate_prediction_hz", fmt_f64(rate));
        if let Some(f) = curve.fitted_rate_hz {
            ct.meta("fitted_rate_hz", fmt_f64(f));
        }
        if let Some(g) = curve.short_time_gaussian {
            ct.meta("short_time_gaussian", g);
        }
        for k in 0..curve.t_s.len() {
            ct.row_f64(&[curve.t_s[k], curve.coherence[k], curve.stderr[k]]);
        }
        ctx.write(&ct, "dephase_coherence")?;
    }
    Ok(())
}

fn polarization(
    ctx: &Ctx,
    b_min: f64,
    b_max: f64,
    t_min: f64,
    t_max: f64,
    points: usize,
    name: &str,
) -> Result<()> {
    let mut t = ctx.table(&["B_tesla", "T_kelvin", "polarization"]);
    for b in grid_points(b_min, b_max, points, true)? {
        for temp in grid_points(t_min, t_max, points, true)? {
            t.row_f64(&[b, temp, equilibrium_polarization(b, temp)?]);
        }
    }
    ctx.write(&t, name)
}

fn fridge(ctx: &Ctx, p_in: f64, stages: usize, mc: bool, pairs: u64) -> Result<()> {
    let cascade = fridge_cascade(p_in, stages)?;
    let mut t = ctx.table(&["stage", "polarization", "cumulative_yield"]);
    t.row(vec!["0".to_string(), fmt_f64(p_in), fmt_f64(1.0)]);
    for pt in &cascade {
        t.row(vec![
            pt.stage.to_string(),
            fmt_f64(pt.polarization),
            fmt_f64(pt.yield_fraction),
        ]);
    }
    ctx.write(&t, "fridge")?;

    if mc {
        let est = mc_fridge(p_in, pairs, ctx.seed)?;
        let exact = fridge_stage(p_in)?;
        let mut mt = ctx.table(&[
            "p_in",
            "pairs",
            "p_out_mc",
            "p_out_analytic",
            "pass_fraction_mc",
            "pass_fraction_analytic",
            "magnetization_in",
            "magnetization_out_plus_sink",
        ]);
        mt.row(vec![
            fmt_f64(p_in),
            pairs.to_string(),
            fmt_f64(est.p_out),
            fmt_f64(exact.p_out),
            fmt_f64(est.pass_fraction),
            fmt_f64(exact.pass_fraction),
            fmt_f64(est.magnetization_in),
            fmt_f64(est.magnetization_out_plus_sink),
        ]);
        ctx.write(&mt, "fridge_mc")?;
    }
    Ok(())
}

fn readout(
    ctx: &Ctx,
    t_meas: f64,
    t_st: f64,
    t_flip: f64,
    simulate: bool,
    trials: u64,
) -> Result<()> {
    let params = ReadoutParams {
        t_meas_s: t_meas,
        t_st_s: t_st,
        t_flip_s: t_flip,
        ..ReadoutParams::default()
    };
    let f = readout_fidelity(&params)?;
    let mut t = ctx.table(&[
        "t_meas_s",
        "t_st_s",
        "t_flip_s",
        "fidelity",
        "optimal_t_meas_s",
        "optimal_fidelity",
        "window_inverted",
    ]);
    t.row(vec![
        fmt_f64(t_meas),
        fmt_f64(t_st),
        fmt_f64(t_flip),
        fmt_f64(f.fidelity),
        fmt_f64(f.optimal_t_meas_s),
        fmt_f64(f.optimal_fidelity),
        f.window_inverted.to_string(),
    ]);
    ctx.write(&t, "readout")?;

    if simulate {
        let states = [
            ("down_down", PairState::DownDown, 0.0),
            ("down_up", PairState::DownUp, 0.5 * f.fidelity),
            ("up_down", PairState::UpDown, 0.5 * f.fidelity),
            ("up_up", PairState::UpUp, 0.0),
            ("singlet", PairState::Singlet, f.fidelity),
            ("triplet0", PairState::Triplet0, 0.0),
        ];
        let mut st = ctx.table(&["state", "trials", "singlet_frac", "model_singlet_prob"]);
        st.meta("model", "first-order closed form");
        for (si, (label, state, model)) in states.iter().enumerate() {
            let mut singlets = 0u64;
            for k in 0..trials {
                let seed = ctx
                    .seed
                    .wrapping_mul(0x9E37_79B9_7F4A_7C15)
                    .wrapping_add((si as u64) << 40)
                    .wrapping_add(k);
                let tr = simulate_readout(*state, &params, seed)?;
                if tr.outcome == ReadoutOutcome::Singlet {
                    singlets += 1;
                }
            }
            st.row(vec![
                label.to_string(),
                trials.to_string(),
                fmt_f64(singlets as f64 / trials as f64),
                fmt_f64(*model),
            ]);
        }
        ctx.write(&st, "readout_sim")?;
    }
    Ok(())
}

fn tunnel(
    ctx: &Ctx,
    f_min: f64,
    f_max: f64,
    points: usize,
    phi_ev: f64,
    attempt: f64,
    name: &str,
) -> Result<()> {
    let mut barriers = [
        TunnelBarrier::si_transverse(),
        TunnelBarrier::si_longitudinal(),
    ];
    for b in barriers.iter_mut() {
        b.height_ev = phi_ev;
        b.attempt_rate_hz = attempt;
    }
    let labels = ["m_t_0.19", "m_l_0.92"];
    let mut t = ctx.table(&["F_v_per_m", "rate_hz", "mass_label"]);
    for f in grid_points(f_min, f_max, points, true)? {
        for (b, label) in barriers.iter().zip(labels) {
            t.row(vec![
                fmt_f64(f),
                fmt_f64(fn_tunneling_rate(f, b)?),
                label.to_string(),
            ]);
        }
    }
    ctx.write(&t, name)
}

fn parse_cell(text: &str) -> Result<Cell> {
    let (r, c) = text
        .split_once(',')
        .ok_or_else(|| Error::config(format!("expected \"row,col\", got {text}")))?;
    let row = r
        .trim()
        .parse::<usize>()
        .map_err(|_| Error::config(format!("bad row: {r}")))?;
    let col = c
        .trim()
        .parse::<usize>()
        .map_err(|_| Error::config(format!("bad col: {c}")))?;
    Ok(Cell::new(row, col))
}

fn route(ctx: &Ctx, grid_path: &Path, src: &str, dst: &str, occupied: &str) -> Result<()> {
    let grid = DeviceGrid::load(grid_path)?;
    let src = parse_cell(src)?;
    let dst = parse_cell(dst)?;
    let mut occ = BTreeSet::new();
    for part in occupied.split(';').filter(|p| !p.trim().is_empty()) {
        occ.insert(parse_cell(part)?);
    }
    let path = route_electron(&grid, src, dst, &occ)?;
    let mut t = ctx.table(&["step", "row", "col"]);
    for (k, cell) in path.iter().enumerate() {
        t.row(vec![k.to_string(), cell.row.to_string(), cell.col.to_string()]);
    }
    ctx.write(&t, "route")
}

fn cell_str(c: &Cell) -> String {
    format!("{}:{}", c.row, c.col)
}

fn compile(ctx: &Ctx, grid_path: &Path, circuit_path: &Path) -> Result<()> {
    let grid = DeviceGrid::load(grid_path)?;
    let text = std::fs::read_to_string(circuit_path)
        .map_err(|e| Error::config(format!("cannot read {}: {e}", circuit_path.display())))?;
    let circuit: Circuit = serde_json::from_str(&text)
        .map_err(|e| Error::config(format!("bad circuit json: {e}")))?;
    let timing = TimingModel::default();
    let schedule = compile_circuit(&circuit, &grid, &timing)?;
    let violations = validate_schedule(&schedule, &grid);
    if !violations.is_empty() {
        return Err(Error::config(format!(
            "compiled schedule failed validation: {violations:?}"
        )));
    }
    let metrics = error_budget(&schedule, &ErrorRates::default());

    let mut t = ctx.table(&["step", "action", "from", "to", "duration_s"]);
    for (si, step) in schedule.steps.iter().enumerate() {
        for a in &step.actions {
            let (name, from, to) = match &a.action {
                Action::Move { from, to, .. } => ("move", cell_str(from), cell_str(to)),
                Action::SwapEn { at } => ("swap_en", cell_str(at), cell_str(at)),
                Action::Pulse { at, .. } => ("pulse", cell_str(at), cell_str(at)),
                Action::Readout { at } => ("readout", cell_str(at), cell_str(at)),
                Action::Init { at } => ("init", cell_str(at), cell_str(at)),
            };
            t.row(vec![
                si.to_string(),
                name.to_string(),
                from,
                to,
                fmt_f64(a.duration_s),
            ]);
        }
    }
    ctx.write(&t, "schedule")?;

    let value = serde_json::json!({
        "seed": ctx.seed,
        "config_hash": format!("{:016x}", ctx.config.hash()),
        "schedule": schedule_json(&schedule),
        "metrics": serde_json::to_value(metrics)
            .map_err(|e| Error::config(format!("json: {e}")))?,
    });
    ctx.write_json(&value, "schedule_full")
}

fn schedule_json(s: &Schedule) -> serde_json::Value {
    serde_json::to_value(s).unwrap_or(serde_json::Value::Null)
}

fn figure(ctx: &Ctx, name: &str) -> Result<()> {
    match name {
        "fig1a" => levels(ctx, 0.0, 0.2, 201, false, "fig1a"),
        "fig1b" => gaps(ctx, 0.0, 0.2, 201, "fig1b"),
        "fig1c" => moments(ctx, 1e-3, 10.0, 61, "fig1c"),
        "fig2" => {
            polarization(ctx, 1e-2, 10.0, 1e-2, 10.0, 41, "fig2")?;
            // Iso-polarization contours: closed-form B(T) per level.
            let mut t = ctx.table(&["level", "T_kelvin", "B_tesla"]);
            for level in [0.5, 0.9, 0.99, 0.999, 0.999999] {
                for temp in grid_points(1e-2, 10.0, 41, true)? {
                    t.row_f64(&[level, temp, field_for_polarization(level, temp)?]);
                }
            }
            ctx.write(&t, "fig2_contours")
        }
        "fig5" => exchange(ctx, 50.0, 300.0, 126, 1.0, "fig5"),
        "fig6" => {
            // Coherence decay for three VCO tuning strengths; larger α
            // dephases faster. α is rescaled upward so the decay fits a
            // short simulated window.
            let alphas = [3e9, 1e10, 3e10];
            let spec = NoiseSpectrum::white(NoiseSpectrum::JOHNSON_50_OHM_300K);
            // Common time axis sized by the middle curve so the ordering
            // (larger α dephases faster) is visible across the grid.
            let t_total = 3.0 / dephasing_rate(alphas[1], spec.s_white);
            let mut t = ctx.table(&["alpha_hz_per_v", "t_s", "coherence", "stderr"]);
            for (i, &alpha) in alphas.iter().enumerate() {
                let vco = VcoModel {
                    alpha_hz_per_v: alpha,
                    base_frequency_hz: 0.0,
                };
                let curve = mc_coherence(
                    &vco,
                    &spec,
                    t_total,
                    2000,
                    ctx.seed.wrapping_add(i as u64),
                )?;
                for k in 0..curve.t_s.len() {
                    t.row_f64(&[alpha, curve.t_s[k], curve.coherence[k], curve.stderr[k]]);
                }
            }
            ctx.write(&t, "fig6")
        }
        "fig11d" => {
            let nu1 = 1e6;
            let target = Rotation::pi_over_2_y();
            let rect = PulseShape::rectangular(
                donorsim_core::dynamics::pulse::tesla_for_rabi(nu1, 1.0),
                target.angle_rad / (2.0 * std::f64::consts::PI * nu1),
                64,
                1e9,
                target.axis_phase_rad,
            )?;
            let corpse =
                PulseShape::corpse(target.angle_rad, target.axis_phase_rad, nu1, 1.0, 1e9)?;
            let family = SineEnvelopeFamily::for_target(target, nu1, 1.0, 6);
            let opts = OptimizeOptions {
                seed: ctx.seed,
                ..OptimizeOptions::default()
            };
            let optimized = optimize_pulse(&family, 0.05 * nu1, &opts)?;
            let mut t = ctx.table(&[
                "detuning_hz",
                "infidelity_rect",
                "infidelity_corpse",
                "infidelity_optimized",
            ]);
            t.meta(
                "optimized_worst_case_in_window",
                fmt_f64(optimized.worst_case_infidelity),
            );
            for d in grid_points(-0.3 * nu1, 0.3 * nu1, 41, false)? {
                t.row_f64(&[
                    d,
                    pulse_infidelity(&rect, 1.0, d, &target),
                    pulse_infidelity(&corpse, 1.0, d, &target),
                    pulse_infidelity(&optimized.shape, 1.0, d, &target),
                ]);
            }
            ctx.write(&t, "fig11d")
        }
        "fig13" => tunnel(ctx, 1e7, 1e8, 41, 0.1, 1e13, "fig13"),
        other => Err(Error::config(format!(
            "unknown figure {other}; expected one of fig1a fig1b fig1c fig2 fig5 fig6 fig11d fig13"
        ))),
    }
}

/// One axis of a sweep: name and linearly spaced values.
struct SweepAxis {
    name: String,
    values: Vec<f64>,
}

fn parse_axis(text: &str) -> Result<SweepAxis> {
    let (name, range) = text
        .split_once('=')
        .ok_or_else(|| Error::config(format!("expected name=start:stop:n, got {text}")))?;
    let parts: Vec<&str> = range.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::config(format!("expected start:stop:n, got {range}")));
    }
    let start: f64 = parts[0]
        .parse()
        .map_err(|_| Error::config(format!("bad start: {}", parts[0])))?;
    let stop: f64 = parts[1]
        .parse()
        .map_err(|_| Error::config(format!("bad stop: {}", parts[1])))?;
    let n: usize = parts[2]
        .parse()
        .map_err(|_| Error::config(format!("bad count: {}", parts[2])))?;
    Ok(SweepAxis {
        name: name.trim().to_string(),
        values: grid_points(start, stop, n, false)?,
    })
}

fn sweep(ctx: &Ctx, target: &str, params: &[String]) -> Result<()> {
    let axes: Vec<SweepAxis> = params
        .iter()
        .map(|p| parse_axis(p))
        .collect::<Result<_>>()?;
    if axes.iter().any(|a| a.values.is_empty()) {
        return Err(Error::config("sweep ranges must be nonempty".to_string()));
    }
    let total: usize = axes.iter().map(|a| a.values.len()).product();
    let get = |point: &[(String, f64)], key: &str| -> Option<f64> {
        point.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    };

    // Evaluate the target at one parameter point; rows carry the axis
    // values followed by the target's outputs.
    let eval = |point: &[(String, f64)]| -> Result<Vec<f64>> {
        match target {
            "nuj" => {
                let b = get(point, "b").unwrap_or(2.0);
                let j_frac = get(point, "j_frac").unwrap_or(0.5);
                let a = get(point, "a_hz").unwrap_or(ctx.species.effective_hyperfine_hz());
                let e = MU_B_HZ_PER_T * b;
                let j = j_frac * e / 2.0;
                let approx = nu_j(a, b, j)?;
                let mut sp = ctx.species.clone();
                sp.hyperfine_hz = a;
                sp.strain_factor = 1.0;
                let exact = nu_j_exact(&TwoDonorSystem::new(sp.clone(), sp, b, j)?)?;
                Ok(vec![approx, exact, (approx - exact).abs() / exact.abs().max(1e-300)])
            }
            "exchange" => {
                let r_a = get(point, "r_angstrom").unwrap_or(150.0);
                Ok(vec![exchange_j(
                    r_a * 1e-10,
                    get(point, "e_b_ev").unwrap_or(ctx.species.binding_energy_ev),
                    get(point, "a_bohr_angstrom")
                        .map(|a| a * 1e-10)
                        .unwrap_or(ctx.species.bohr_radius_m),
                )?])
            }
            "polarization" => {
                let b = get(point, "b").unwrap_or(1.0);
                let temp = get(point, "t").unwrap_or(0.1);
                Ok(vec![equilibrium_polarization(b, temp)?])
            }
            "dephasing" => {
                let alpha = get(point, "alpha").unwrap_or(1e8);
                let s = get(point, "s_white").unwrap_or(1e-18);
                Ok(vec![dephasing_rate(alpha, s)])
            }
            "tunnel" => {
                let f = get(point, "f").unwrap_or(5e7);
                let barrier = TunnelBarrier {
                    height_ev: get(point, "phi_ev").unwrap_or(0.1),
                    mass_fraction: get(point, "mass").unwrap_or(0.19),
                    attempt_rate_hz: get(point, "attempt").unwrap_or(1e13),
                };
                Ok(vec![fn_tunneling_rate(f, &barrier)?])
            }
            other => Err(Error::config(format!(
                "unknown sweep target {other}; expected nuj exchange polarization dephasing tunnel"
            ))),
        }
    };

    let out_columns: Vec<&str> = match target {
        "nuj" => vec!["nu_j_hz", "nu_j_exact_hz", "rel_err"],
        "exchange" => vec!["J_hz"],
        "polarization" => vec!["polarization"],
        "dephasing" => vec!["rate_hz"],
        "tunnel" => vec!["rate_hz"],
        other => {
            return Err(Error::config(format!("unknown sweep target {other}")));
        }
    };
    let mut columns: Vec<String> = axes.iter().map(|a| a.name.clone()).collect();
    columns.extend(out_columns.iter().map(|c| c.to_string()));
    let col_refs: Vec<&str> = columns.iter().map(|c| c.as_str()).collect();
    let mut t = ctx.table(&col_refs);
    t.meta("target", target);

    // Cross product in axis order; row order is the parameter order.
    let mut idx = vec![0usize; axes.len()];
    let mut done = false;
    let mut row_count = 0usize;
    while !done {
        let point: Vec<(String, f64)> = axes
            .iter()
            .zip(&idx)
            .map(|(a, &i)| (a.name.clone(), a.values[i]))
            .collect();
        let outputs = eval(&point)?;
        let mut row: Vec<f64> = point.iter().map(|(_, v)| *v).collect();
        row.extend(outputs);
        t.row_f64(&row);
        row_count += 1;
        if row_count.is_multiple_of(50) || row_count == total {
            eprintln!("sweep {row_count}/{total}");
        }
        // Odometer increment, last axis fastest.
        done = true;
        for k in (0..idx.len()).rev() {
            idx[k] += 1;
            if idx[k] < axes[k].values.len() {
                done = false;
                break;
            }
            idx[k] = 0;
        }
    }
    ctx.write(&t, "sweep")
}
