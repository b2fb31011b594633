//! Time-sampled RF pulse envelopes.

use serde::{Deserialize, Serialize};

use crate::constants::{H, MU_B};
use crate::error::{Error, Result};
use crate::output::CsvTable;

/// One envelope sample: amplitude (tesla, ≥ 0) and phase (rad) of the
/// carrier during one time step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSample {
    pub amp_tesla: f64,
    pub phase_rad: f64,
}

/// An RF pulse: uniform time step, per-sample amplitude/phase, carrier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseShape {
    pub dt_s: f64,
    pub carrier_hz: f64,
    pub samples: Vec<PulseSample>,
}

/// Drive amplitude in tesla for a wanted Rabi frequency at a given
/// transition moment (units of μ_B).
pub fn tesla_for_rabi(rabi_hz: f64, moment_mu_b: f64) -> f64 {
    rabi_hz * H / (MU_B * moment_mu_b)
}

impl PulseShape {
    pub fn new(dt_s: f64, carrier_hz: f64, samples: Vec<PulseSample>) -> Result<Self> {
        let p = PulseShape {
            dt_s,
            carrier_hz,
            samples,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt_s > 0.0) {
            return Err(Error::config(format!("dt must be > 0, got {}", self.dt_s)));
        }
        if self.samples.is_empty() {
            return Err(Error::config("pulse has no samples".to_string()));
        }
        if self.samples.iter().any(|s| s.amp_tesla < 0.0) {
            return Err(Error::config("amplitudes must be nonnegative".to_string()));
        }
        if self.carrier_hz < 0.0 {
            return Err(Error::config("carrier must be nonnegative".to_string()));
        }
        Ok(())
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 * self.dt_s
    }

    /// Largest amplitude jump between consecutive samples (band-limit
    /// metadata recorded alongside serialized pulses).
    pub fn max_amp_step_tesla(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| (w[1].amp_tesla - w[0].amp_tesla).abs())
            .fold(0.0, f64::max)
    }

    pub fn peak_amp_tesla(&self) -> f64 {
        self.samples.iter().map(|s| s.amp_tesla).fold(0.0, f64::max)
    }

    /// ∫ amp dt (T·s): the rotation-angle area at zero detuning.
    pub fn area_tesla_s(&self) -> f64 {
        self.samples.iter().map(|s| s.amp_tesla).sum::<f64>() * self.dt_s
    }

    /// Constant-amplitude pulse.
    pub fn rectangular(
        amp_tesla: f64,
        duration_s: f64,
        n_samples: usize,
        carrier_hz: f64,
        phase_rad: f64,
    ) -> Result<Self> {
        if n_samples == 0 || !(duration_s > 0.0) {
            return Err(Error::config("rectangular pulse needs samples and duration".to_string()));
        }
        PulseShape::new(
            duration_s / n_samples as f64,
            carrier_hz,
            vec![
                PulseSample {
                    amp_tesla,
                    phase_rad,
                };
                n_samples
            ],
        )
    }

    /// Piecewise-constant rotation sequence: each segment is a rotation of
    /// the given angle about an in-plane axis at the given phase, at peak
    /// Rabi frequency `nu1_hz` (area exact: a trailing fractional-amplitude
    /// sample completes each segment).
    pub fn from_rotation_segments(
        segments: &[(f64, f64)],
        nu1_hz: f64,
        moment_mu_b: f64,
        samples_per_segment_min: usize,
        carrier_hz: f64,
    ) -> Result<Self> {
        if !(nu1_hz > 0.0) || segments.is_empty() {
            return Err(Error::config("segments and nu1 required".to_string()));
        }
        let amp = tesla_for_rabi(nu1_hz, moment_mu_b);
        // dt resolves the shortest segment.
        let min_dur = segments
            .iter()
            .map(|(ang, _)| ang.abs() / (2.0 * std::f64::consts::PI * nu1_hz))
            .fold(f64::INFINITY, f64::min);
        let dt = min_dur / samples_per_segment_min as f64;
        let mut samples = Vec::new();
        for &(angle, phase) in segments {
            // Negative angles are rotations about the opposite axis.
            let (angle, phase) = if angle < 0.0 {
                (-angle, phase + std::f64::consts::PI)
            } else {
                (angle, phase)
            };
            let dur = angle / (2.0 * std::f64::consts::PI * nu1_hz);
            let n_full = (dur / dt).floor() as usize;
            let rem = dur - n_full as f64 * dt;
            for _ in 0..n_full {
                samples.push(PulseSample {
                    amp_tesla: amp,
                    phase_rad: phase,
                });
            }
            if rem > 1e-15 * dur.max(dt) {
                samples.push(PulseSample {
                    amp_tesla: amp * rem / dt,
                    phase_rad: phase,
                });
            }
        }
        PulseShape::new(dt, carrier_hz, samples)
    }

    /// CORPSE composite rotation: three rotations about (+x, −x, +x)-style
    /// axes that cancel detuning errors to second order. For a target angle
    /// θ about phase φ the segment angles are 2π + θ/2 − k, 2π − 2k and
    /// θ/2 − k with k = asin(sin(θ/2)/2).
    pub fn corpse(
        theta_rad: f64,
        phase_rad: f64,
        nu1_hz: f64,
        moment_mu_b: f64,
        carrier_hz: f64,
    ) -> Result<Self> {
        let k = (0.5 * (theta_rad / 2.0).sin()).asin();
        let two_pi = 2.0 * std::f64::consts::PI;
        let segs = [
            (two_pi + theta_rad / 2.0 - k, phase_rad),
            (two_pi - 2.0 * k, phase_rad + std::f64::consts::PI),
            (theta_rad / 2.0 - k, phase_rad),
        ];
        Self::from_rotation_segments(&segs, nu1_hz, moment_mu_b, 48, carrier_hz)
    }

    /// Serialize as CSV `t_s,amp_tesla,phase_rad` with a sidecar metadata
    /// block carrying carrier, dt and the band-limit record.
    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&["t_s", "amp_tesla", "phase_rad"]);
        t.meta("carrier_hz", crate::output::fmt_f64(self.carrier_hz));
        t.meta("dt_s", crate::output::fmt_f64(self.dt_s));
        t.meta(
            "max_amp_step_tesla",
            crate::output::fmt_f64(self.max_amp_step_tesla()),
        );
        for (k, s) in self.samples.iter().enumerate() {
            t.row_f64(&[k as f64 * self.dt_s, s.amp_tesla, s.phase_rad]);
        }
        t
    }
}
