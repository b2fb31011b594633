//! Gated exchange pulses: J(t) ramps on the two-donor system.
//!
//! A J-gate bias turns the electron exchange on and off; the resulting
//! two-electron rotation depends, for commuting Zeeman and exchange terms,
//! only on the area ∫J dt. The ramp here is trapezoidal (linear rise,
//! hold, linear fall), integrated with the same exponential stepper as the
//! RF pulses. An electron SWAP needs ∫J dt = 1/8 (the singlet acquires a
//! π phase relative to the triplet).

use nalgebra::DMatrix;

use crate::coupling::{build_two_donor_hamiltonian, TwoDonorSystem};
use crate::error::{Error, Result};
use crate::operator::{expm_hermitian, C64, SpinOperator};

use super::evolve::{FrameMode, Propagator};

/// Trapezoidal exchange profile.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct TrapezoidalRamp {
    pub j_peak_hz: f64,
    pub rise_s: f64,
    pub hold_s: f64,
    pub fall_s: f64,
}

impl TrapezoidalRamp {
    /// ∫ J dt (dimensionless, Hz·s).
    pub fn area(&self) -> f64 {
        self.j_peak_hz * (self.hold_s + 0.5 * (self.rise_s + self.fall_s))
    }

    /// Ramp sized for an electron SWAP (∫J dt = 1/8) with the given peak
    /// and edge times.
    pub fn swap(j_peak_hz: f64, rise_s: f64, fall_s: f64) -> Self {
        let hold_s = 0.125 / j_peak_hz - 0.5 * (rise_s + fall_s);
        TrapezoidalRamp {
            j_peak_hz,
            rise_s,
            hold_s,
            fall_s,
        }
    }

    pub fn duration_s(&self) -> f64 {
        self.rise_s + self.hold_s + self.fall_s
    }

    pub fn j_at(&self, t: f64) -> f64 {
        if t < 0.0 || t > self.duration_s() {
            0.0
        } else if t < self.rise_s {
            self.j_peak_hz * t / self.rise_s
        } else if t <= self.rise_s + self.hold_s {
            self.j_peak_hz
        } else {
            self.j_peak_hz * (self.duration_s() - t) / self.fall_s
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.j_peak_hz > 0.0) {
            return Err(Error::config("ramp needs positive peak J".to_string()));
        }
        if self.rise_s < 0.0 || self.hold_s < 0.0 || self.fall_s < 0.0 {
            return Err(Error::config("ramp segments must be nonnegative".to_string()));
        }
        if !(self.duration_s() > 0.0) {
            return Err(Error::config("ramp has zero duration".to_string()));
        }
        Ok(())
    }
}

/// Propagate the 16-dim two-donor system through an exchange ramp (lab
/// frame, no RF drive). `steps` midpoint exponentials resolve the profile.
pub fn evolve_exchange_ramp(
    sys: &TwoDonorSystem,
    ramp: &TrapezoidalRamp,
    steps: usize,
) -> Result<Propagator> {
    ramp.validate()?;
    if steps == 0 {
        return Err(Error::config("need at least one step".to_string()));
    }
    // H(t) = H(J=0) + J(t)·(exchange part), built once from two anchors.
    let mut sys0 = sys.clone();
    sys0.exchange_hz = 0.0;
    let h0 = build_two_donor_hamiltonian(&sys0)?;
    let mut sys1 = sys.clone();
    sys1.exchange_hz = 1.0;
    let exchange_part = build_two_donor_hamiltonian(&sys1)?.into_matrix() - h0.matrix();

    let total = ramp.duration_s();
    let dt = total / steps as f64;
    let d = 16;
    let mut u = DMatrix::<C64>::identity(d, d);
    for k in 0..steps {
        let tm = (k as f64 + 0.5) * dt;
        let h = h0.matrix() + &exchange_part * C64::new(ramp.j_at(tm), 0.0);
        u = expm_hermitian(&h, dt) * u;
    }
    let unitary = SpinOperator::from_matrix(u)?;
    let defect = unitary.unitarity_defect();
    Ok(Propagator {
        unitary,
        frame: FrameMode::Lab,
        frame_levels_hz: Vec::new(),
        basis: DMatrix::identity(d, d),
        unitarity_defect: defect,
        substeps: steps,
    })
}
