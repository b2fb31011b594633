//! CNOT and SWAP on the electron–nuclear pair of one donor.
//!
//! The donor is a natural two-qubit system. A resonant π pulse on
//! |↓e↑n⟩ ↔ |↑e↑n⟩ flips the electron conditioned on the nucleus (CNOT,
//! nucleus control); a π pulse on the zero-quantum flip-flop
//! |↓e↑n⟩ ↔ |↑e↓n⟩ exchanges the two spins (SWAP). The flip-flop pair has
//! exactly zero matrix element under a transverse drive (Δm selection
//! rule), so SWAP is driven by the longitudinal RF component.
//!
//! The `b_rf` argument is an amplitude *cap* (eddy-current heating bounds
//! the usable RF field); the gate calibrates the actual amplitude down so
//! the target line is resolved by more than ten Rabi widths, and — for the
//! CNOT, whose drive also reaches the spectator electron line 4A away —
//! synchronizes the spectator's generalized Rabi precession to an integer
//! number of cycles over the pulse, leaving only per-level phases behind.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::constants::{H, MU_B};
use crate::error::{Error, Result};
use crate::operator::{C64, SpinOperator};
use crate::species::DonorSpecies;
use crate::spin::{moment_between, single_donor_spectrum, DriveAxis};

use super::evolve::{evolve, phase_aligned_infidelity, Drive, FrameMode};
use super::pulse::{tesla_for_rabi, PulseShape};

/// Outcome of a calibrated gate: the realized propagator (rotating frame),
/// the ideal target, and figures of merit. Comparison is up to per-level
/// phases; `phase_frame` records that convention.
#[derive(Debug, Clone, Serialize)]
pub struct GateReport {
    pub unitary: SpinOperator,
    pub target: SpinOperator,
    /// Average gate infidelity after per-level phase alignment.
    pub infidelity: f64,
    /// Worst spectator population loss max_k (1 − |U_kk|²).
    pub leakage: f64,
    pub frame: &'static str,
    pub phase_frame: &'static str,
    pub carrier_hz: f64,
    pub rabi_hz: f64,
    pub duration_s: f64,
    /// Amplitude actually used after calibration (≤ the requested cap).
    pub b_rf_used_tesla: f64,
    pub b_rf_cap_tesla: f64,
    pub unitarity_defect: f64,
}

/// Rabi frequency ν_R = moment·μ_B·B_rf/h for a transition moment in units
/// of μ_B and drive amplitude in tesla.
pub fn rabi_frequency(moment_mu_b: f64, b_rf_tesla: f64) -> f64 {
    debug_assert!(b_rf_tesla >= 0.0 && moment_mu_b >= 0.0);
    moment_mu_b * MU_B * b_rf_tesla / H
}

fn level_by_label(labels: &[String], want: &str) -> Option<usize> {
    labels.iter().position(|l| l == want)
}

/// Permutation target: swap levels `a` and `b`, identity elsewhere.
fn swap_target(dim: usize, a: usize, b: usize) -> DMatrix<C64> {
    let mut t = DMatrix::<C64>::identity(dim, dim);
    t[(a, a)] = C64::new(0.0, 0.0);
    t[(b, b)] = C64::new(0.0, 0.0);
    t[(a, b)] = C64::new(1.0, 0.0);
    t[(b, a)] = C64::new(1.0, 0.0);
    t
}

fn identity_report(
    dim: usize,
    a: usize,
    b: usize,
    carrier: f64,
    cap: f64,
) -> Result<GateReport> {
    let u = DMatrix::<C64>::identity(dim, dim);
    let target = swap_target(dim, a, b);
    let infidelity = phase_aligned_infidelity(&u, &target);
    Ok(GateReport {
        unitary: SpinOperator::from_matrix(u)?,
        target: SpinOperator::from_matrix(target)?,
        infidelity,
        leakage: 0.0,
        frame: "rwa",
        phase_frame: "h0-interaction",
        carrier_hz: carrier,
        rabi_hz: 0.0,
        duration_s: 0.0,
        b_rf_used_tesla: 0.0,
        b_rf_cap_tesla: cap,
        unitarity_defect: 0.0,
    })
}

#[allow(clippy::too_many_arguments)]
fn run_pi_pulse(
    species: &DonorSpecies,
    b_tesla: f64,
    drive: &Drive,
    g: usize,
    e: usize,
    carrier: f64,
    rabi_hz: f64,
    moment: f64,
    cap: f64,
) -> Result<GateReport> {
    let h0 = crate::spin::build_single_donor_hamiltonian(species, b_tesla)?;
    let duration = 0.5 / rabi_hz;
    let amp = tesla_for_rabi(rabi_hz, moment);
    let pulse = PulseShape::rectangular(amp, duration, 128, carrier, 0.0)?;
    let prop = evolve(&h0, drive, &pulse, FrameMode::Rwa)?;
    let u = prop.unitary.matrix().clone();
    let target = swap_target(4, g, e);
    let infidelity = phase_aligned_infidelity(&u, &target);
    let leakage = (0..4)
        .filter(|k| *k != g && *k != e)
        .map(|k| 1.0 - u[(k, k)].norm_sqr())
        .fold(0.0, f64::max);
    Ok(GateReport {
        unitary: prop.unitary,
        target: SpinOperator::from_matrix(target)?,
        infidelity,
        leakage: leakage.max(0.0),
        frame: "rwa",
        phase_frame: "h0-interaction",
        carrier_hz: carrier,
        rabi_hz,
        duration_s: duration,
        b_rf_used_tesla: amp,
        b_rf_cap_tesla: cap,
        unitarity_defect: prop.unitarity_defect,
    })
}

/// Controlled-NOT with the nucleus as control (flip the electron when the
/// nucleus is ↑), via a π pulse on |↓e↑n⟩ ↔ |↑e↑n⟩. `b_rf_max_tesla` caps
/// the drive amplitude; the calibrated amplitude also synchronizes the
/// spectator electron line.
pub fn gate_cnot_en(
    species: &DonorSpecies,
    b_tesla: f64,
    b_rf_max_tesla: f64,
) -> Result<GateReport> {
    let spec = single_donor_spectrum(species, b_tesla)?;
    let (g, e, sg, se) = match (
        level_by_label(&spec.labels, "de_un"),
        level_by_label(&spec.labels, "ue_un"),
        level_by_label(&spec.labels, "de_dn"),
        level_by_label(&spec.labels, "ue_dn"),
    ) {
        (Some(g), Some(e), Some(sg), Some(se)) => (g, e, sg, se),
        _ => {
            return Err(Error::precondition(
                "transition resolved (> 10 Rabi widths)",
                format!(
                    "levels are not in the product regime at B = {b_tesla} T (labels {:?})",
                    spec.labels
                ),
            ))
        }
    };
    let carrier = spec.levels[e] - spec.levels[g];
    let spectator_gap = spec.levels[se] - spec.levels[sg];
    let delta_s = (carrier - spectator_gap).abs();
    let m_target = moment_between(species, &spec, g, e, DriveAxis::X);
    let m_spect = moment_between(species, &spec, sg, se, DriveAxis::X);
    if b_rf_max_tesla <= 0.0 {
        return identity_report(4, g, e, carrier, b_rf_max_tesla);
    }
    let nu_cap = rabi_frequency(m_target, b_rf_max_tesla).min(delta_s / 10.0);
    if !(nu_cap > 0.0) {
        return Err(Error::precondition(
            "transition resolved (> 10 Rabi widths)",
            format!(
                "spectator line offset {delta_s:.3e} Hz leaves no usable Rabi width at B = {b_tesla} T"
            ),
        ));
    }
    // Synchronize: spectator generalized Rabi √((rν)² + Δs²) completes k
    // full cycles during the π pulse of length 1/(2ν); r is the spectator
    // to target moment ratio. ν(k) = Δs / √(4k² − r²).
    let r = m_spect / m_target;
    let k = (((delta_s / nu_cap).powi(2) + r * r).sqrt() / 2.0).ceil().max(1.0);
    let nu = delta_s / (4.0 * k * k - r * r).sqrt();
    run_pi_pulse(
        species,
        b_tesla,
        &Drive::single_donor_x(species),
        g,
        e,
        carrier,
        nu,
        m_target,
        b_rf_max_tesla,
    )
}

/// SWAP of the electron and nuclear spin via a π pulse on the zero-quantum
/// flip-flop |↓e↑n⟩ ↔ |↑e↓n⟩, driven longitudinally. Refuses when the
/// flip-flop line is not spectrally resolved (e.g. B = 0, where it is
/// degenerate with the singlet–triplet lines).
pub fn gate_swap_en(
    species: &DonorSpecies,
    b_tesla: f64,
    b_rf_max_tesla: f64,
) -> Result<GateReport> {
    let spec = single_donor_spectrum(species, b_tesla)?;
    // The m = 0 pair: product labels in the resolved regime, singlet /
    // triplet0 labels near B = 0.
    let g = level_by_label(&spec.labels, "de_un")
        .or_else(|| level_by_label(&spec.labels, "singlet"));
    let t = level_by_label(&spec.labels, "ue_dn")
        .or_else(|| level_by_label(&spec.labels, "triplet0"));
    let (g, t) = match (g, t) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::precondition(
                "flip-flop pair identified",
                format!("labels {:?}", spec.labels),
            ))
        }
    };
    let carrier = (spec.levels[t] - spec.levels[g]).abs();
    // Spectral resolution against every other line.
    let mut min_offset = f64::INFINITY;
    let mut offending = (0usize, 0usize);
    for i in 0..4 {
        for j in (i + 1)..4 {
            if (i, j) == (g.min(t), g.max(t)) {
                continue;
            }
            let off = ((spec.levels[j] - spec.levels[i]).abs() - carrier).abs();
            if off < min_offset {
                min_offset = off;
                offending = (i, j);
            }
        }
    }
    let m_z = moment_between(species, &spec, g, t, DriveAxis::Z);
    if b_rf_max_tesla <= 0.0 {
        return identity_report(4, g, t, carrier, b_rf_max_tesla);
    }
    let nu_cap = rabi_frequency(m_z, b_rf_max_tesla).min(min_offset / 10.0);
    if !(nu_cap > 0.0) || min_offset <= 0.0 {
        return Err(Error::precondition(
            "transition resolved (> 10 Rabi widths)",
            format!(
                "flip-flop line at {carrier:.6e} Hz is unresolved: transition ({}, {}) sits {min_offset:.3e} Hz away",
                offending.0, offending.1
            ),
        ));
    }
    run_pi_pulse(
        species,
        b_tesla,
        &Drive::single_donor_z(species),
        g,
        t,
        carrier,
        nu_cap,
        m_z,
        b_rf_max_tesla,
    )
}
