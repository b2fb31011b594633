//! Spin-to-charge conversion readout and Fowler–Nordheim tunneling leakage.
//!
//! Readout is phenomenological: a two-electron system ionizes at a
//! spin-dependent threshold field, and the electrometer resolves the charge
//! position instantly. The discrimination window is set by two timescales —
//! the singlet↔triplet-0 scattering time `t_ST` (fast, reveals the singlet
//! charge configuration) and the spin-flip time `t_flip` (slow, corrupts the
//! signal). A measurement of duration `t` succeeds with
//!
//! ```text
//! F = (1 − exp(−t/t_ST)) · exp(−t/t_flip)
//! ```
//!
//! The stochastic simulator samples exactly this event model: the charge
//! moves at the singlet threshold once a scattering event occurs within the
//! window, and any spin-flip event within the window spoils the signal.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constants::{E_CHARGE, HBAR, M_E};
use crate::error::{Error, Result};

/// Parameters of the two-electron readout model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReadoutParams {
    /// Measurement window (s).
    pub t_meas_s: f64,
    /// Singlet ↔ triplet-0 scattering time (s).
    pub t_st_s: f64,
    /// Spin-flip scattering time (s); must exceed `t_st_s` for a useful
    /// window (a violation is flagged, not fatal).
    pub t_flip_s: f64,
    /// Ionization threshold field for the singlet configuration (V/m).
    pub f_singlet_v_per_m: f64,
    /// Ionization threshold field for the triplet configuration (V/m).
    pub f_triplet_v_per_m: f64,
    /// Charge-position labels reported in traces (bound, ionized).
    pub signal_levels: (String, String),
}

impl Default for ReadoutParams {
    fn default() -> Self {
        // Microsecond-scale measurement against a ~second spin-flip time;
        // threshold fields are free parameters of the phenomenology.
        ReadoutParams {
            t_meas_s: 10e-6,
            t_st_s: 1e-6,
            t_flip_s: 1.0,
            f_singlet_v_per_m: 5.0e6,
            f_triplet_v_per_m: 3.0e6,
            signal_levels: ("donor".to_string(), "interface".to_string()),
        }
    }
}

impl ReadoutParams {
    /// Doubly-charged (Te-like) donor: deeply bound two-electron states
    /// give a wide singlet/triplet threshold contrast.
    pub fn te_like() -> Self {
        ReadoutParams::default()
    }

    /// Singly-charged (P-like) donor: the weakly bound D⁻ state leaves only
    /// a narrow threshold contrast to discriminate on.
    pub fn p_like() -> Self {
        ReadoutParams {
            f_singlet_v_per_m: 3.3e6,
            f_triplet_v_per_m: 3.0e6,
            ..ReadoutParams::default()
        }
    }

    /// Relative singlet/triplet threshold separation.
    pub fn threshold_contrast(&self) -> f64 {
        (self.f_singlet_v_per_m - self.f_triplet_v_per_m).abs()
            / self.f_triplet_v_per_m.max(1e-300)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_meas_s > 0.0 && self.t_st_s > 0.0 && self.t_flip_s > 0.0) {
            return Err(Error::config(
                "readout times must all be positive".to_string(),
            ));
        }
        Ok(())
    }

    /// True when the timescale ordering gives no useful window.
    pub fn window_inverted(&self) -> bool {
        self.t_st_s >= self.t_flip_s
    }
}

/// Closed-form readout figure of merit.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ReadoutFidelity {
    /// F(t_meas) per the product form above.
    pub fidelity: f64,
    /// Window length maximizing F: t* = t_ST · ln(1 + t_flip/t_ST).
    pub optimal_t_meas_s: f64,
    /// F evaluated at the optimal window.
    pub optimal_fidelity: f64,
    /// Set when t_ST ≥ t_flip (no meaningful window); F is still computed.
    pub window_inverted: bool,
}

pub fn readout_fidelity(params: &ReadoutParams) -> Result<ReadoutFidelity> {
    params.validate()?;
    let f = |t: f64| (1.0 - (-t / params.t_st_s).exp()) * (-t / params.t_flip_s).exp();
    let t_opt = params.t_st_s * (1.0 + params.t_flip_s / params.t_st_s).ln();
    Ok(ReadoutFidelity {
        fidelity: f(params.t_meas_s),
        optimal_t_meas_s: t_opt,
        optimal_fidelity: f(t_opt),
        window_inverted: params.window_inverted(),
    })
}

/// Initial two-electron spin label for the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairState {
    DownDown,
    DownUp,
    UpDown,
    UpUp,
    Singlet,
    Triplet0,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ReadoutOutcome {
    Singlet,
    Triplet,
}

/// What the electrometer saw.
#[derive(Debug, Clone, Serialize)]
pub struct ChargeTrace {
    pub outcome: ReadoutOutcome,
    /// Threshold field at which charge motion was registered (V/m).
    pub moved_at_field_v_per_m: f64,
    /// Event time of the registered charge motion, if any occurred inside
    /// the window (singlet detections only).
    pub event_time_s: Option<f64>,
    /// Charge-position labels (bound, ionized) echoed from the parameters.
    pub signal_levels: (String, String),
}

fn exp_time(rng: &mut ChaCha8Rng, tau: f64) -> f64 {
    // Inverse-CDF exponential draw; u ∈ (0,1].
    let u: f64 = 1.0 - rng.random::<f64>();
    -tau * u.ln()
}

/// Sample one measurement. Product states ↑↓/↓↑ resolve to the singlet with
/// probability 1/2 before any mixing (Born projection); thereafter singlet
/// detection requires a scattering event inside the window, and any
/// spin-flip event inside the window voids a singlet signal. Deterministic
/// per seed.
pub fn simulate_readout(
    state: PairState,
    params: &ReadoutParams,
    seed: u64,
) -> Result<ChargeTrace> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Born resolution of antiparallel product states.
    let singlet_now = match state {
        PairState::Singlet => true,
        PairState::Triplet0 | PairState::DownDown | PairState::UpUp => false,
        PairState::DownUp | PairState::UpDown => rng.random::<f64>() < 0.5,
    };
    let parallel = matches!(state, PairState::DownDown | PairState::UpUp);

    let t_end = params.t_meas_s;
    let first_flip = exp_time(&mut rng, params.t_flip_s);
    let flip_in_window = first_flip <= t_end;

    let mut detection: Option<f64> = None;
    if singlet_now {
        let t_mix = exp_time(&mut rng, params.t_st_s);
        if t_mix <= t_end && !flip_in_window {
            detection = Some(t_mix);
        }
    } else if !parallel {
        // Triplet-0: reads triplet unless a flip chain re-randomizes it into
        // the singlet. First-order small; sampled faithfully below.
        detection = flip_chain(&mut rng, first_flip, t_end, params);
    } else {
        // Parallel pair: needs a spin flip before any singlet branch opens.
        detection = flip_chain(&mut rng, first_flip, t_end, params);
    }

    let outcome = if detection.is_some() {
        ReadoutOutcome::Singlet
    } else {
        ReadoutOutcome::Triplet
    };
    Ok(ChargeTrace {
        moved_at_field_v_per_m: match outcome {
            ReadoutOutcome::Singlet => params.f_singlet_v_per_m,
            ReadoutOutcome::Triplet => params.f_triplet_v_per_m,
        },
        event_time_s: detection,
        outcome,
        signal_levels: params.signal_levels.clone(),
    })
}

/// Follow spin-flip events: each flip re-randomizes the pair between the
/// singlet-capable and triplet branches; a singlet branch then needs a clean
/// scattering detection before the next flip and the end of the window.
fn flip_chain(
    rng: &mut ChaCha8Rng,
    first_flip: f64,
    t_end: f64,
    params: &ReadoutParams,
) -> Option<f64> {
    let mut t = first_flip;
    for _ in 0..64 {
        if t > t_end {
            return None;
        }
        let next_flip = t + exp_time(rng, params.t_flip_s);
        if rng.random::<f64>() < 0.5 {
            // Landed in the singlet: detect if scattering fires before the
            // window closes and no further flip intervenes.
            let t_mix = t + exp_time(rng, params.t_st_s);
            if t_mix <= t_end && next_flip > t_end {
                return Some(t_mix);
            }
        }
        t = next_flip;
    }
    None
}

/// Triangular tunnel barrier parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TunnelBarrier {
    /// Barrier height Φ (eV).
    pub height_ev: f64,
    /// Effective mass as a fraction of the bare electron mass.
    pub mass_fraction: f64,
    /// Attempt rate prefactor (Hz); order-of-magnitude plumbing.
    pub attempt_rate_hz: f64,
}

impl TunnelBarrier {
    /// Transverse-mass silicon barrier (m_t = 0.19), 100 meV deep.
    pub fn si_transverse() -> Self {
        TunnelBarrier {
            height_ev: 0.1,
            mass_fraction: 0.19,
            attempt_rate_hz: 1e13,
        }
    }

    /// Longitudinal-mass silicon barrier (m_l = 0.92), 100 meV deep.
    pub fn si_longitudinal() -> Self {
        TunnelBarrier {
            height_ev: 0.1,
            mass_fraction: 0.92,
            attempt_rate_hz: 1e13,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.height_ev > 0.0 && self.mass_fraction > 0.0 && self.attempt_rate_hz > 0.0) {
            return Err(Error::config(
                "barrier height, mass and attempt rate must be positive".to_string(),
            ));
        }
        Ok(())
    }
}

/// WKB Fowler–Nordheim rate through a triangular barrier at field `f_v_per_m`:
///
/// ```text
/// rate = ν₀ · exp( −4 √(2 m* m_e) (eΦ)^{3/2} / (3 ħ e F) )
/// ```
///
/// Monotone increasing in F, decreasing in Φ and m*; log-rate is linear in
/// 1/F with slope −4√(2 m* m_e)(eΦ)^{3/2}/(3ħe).
pub fn fn_tunneling_rate(f_v_per_m: f64, barrier: &TunnelBarrier) -> Result<f64> {
    barrier.validate()?;
    if !(f_v_per_m > 0.0) {
        return Err(Error::precondition(
            "F > 0",
            format!("field {f_v_per_m} V/m is not positive"),
        ));
    }
    Ok(barrier.attempt_rate_hz * (-fn_slope_per_inverse_field(barrier) / f_v_per_m).exp())
}

/// The FN exponent coefficient: −d ln(rate) / d(1/F), in V/m.
pub fn fn_slope_per_inverse_field(barrier: &TunnelBarrier) -> f64 {
    let m = barrier.mass_fraction * M_E;
    let phi_j = barrier.height_ev * E_CHARGE;
    4.0 * (2.0 * m).sqrt() * phi_j.powf(1.5) / (3.0 * HBAR * E_CHARGE)
}
