//! Donor species parameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical parameters of one donor type.
///
/// The contact hyperfine energy is stored as a frequency (`A/h`, Hz);
/// `4 * hyperfine_hz` is the zero-field singlet–triplet splitting. The
/// effective hyperfine used by every model is `strain_factor * hyperfine_hz`,
/// so a strained-layer device is described by the same species with
/// `strain_factor < 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DonorSpecies {
    /// Display label, e.g. "Si:P".
    pub name: String,
    /// Contact hyperfine interaction A/h (Hz).
    pub hyperfine_hz: f64,
    /// Dimensionless nuclear g-factor.
    pub g_n: f64,
    /// Donor binding energy (eV).
    pub binding_energy_ev: f64,
    /// Effective Bohr radius of the donor electron (m).
    pub bohr_radius_m: f64,
    /// Electron spin-lattice relaxation time (s).
    pub t1_electron_s: f64,
    /// Phase relaxation time (s).
    pub t_phi_s: f64,
    /// Hyperfine reduction from layer strain, in (0, 1].
    pub strain_factor: f64,
}

impl DonorSpecies {
    /// Phosphorus donor in silicon with the default parameter set:
    /// A = 30 MHz (so the zero-field splitting 4A = 120 MHz), g_n = 1.13,
    /// E_b = 45 meV, a_B = 30 Å, t1 = 1 h, t_phi = 0.5 ms, unstrained.
    pub fn si_p() -> Self {
        DonorSpecies {
            name: "Si:P".to_string(),
            hyperfine_hz: 30.0e6,
            g_n: 1.13,
            binding_energy_ev: 45.0e-3,
            bohr_radius_m: 30.0e-10,
            t1_electron_s: 3600.0,
            t_phi_s: 0.5e-3,
            strain_factor: 1.0,
        }
    }

    /// Same donor in a strained quantum well: hyperfine reduced about 50%.
    pub fn si_p_strained() -> Self {
        DonorSpecies {
            name: "Si:P (strained)".to_string(),
            strain_factor: 0.5,
            ..Self::si_p()
        }
    }

    /// Strain-scaled hyperfine frequency actually entering the Hamiltonian.
    pub fn effective_hyperfine_hz(&self) -> f64 {
        self.strain_factor * self.hyperfine_hz
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hyperfine_hz > 0.0) {
            return Err(Error::config(format!(
                "hyperfine A must be > 0, got {}",
                self.hyperfine_hz
            )));
        }
        if !(self.bohr_radius_m > 0.0) {
            return Err(Error::config(format!(
                "Bohr radius must be > 0, got {}",
                self.bohr_radius_m
            )));
        }
        if !(self.binding_energy_ev > 0.0) {
            return Err(Error::config(format!(
                "binding energy must be > 0, got {}",
                self.binding_energy_ev
            )));
        }
        if !(self.strain_factor > 0.0 && self.strain_factor <= 1.0) {
            return Err(Error::config(format!(
                "strain factor must be in (0, 1], got {}",
                self.strain_factor
            )));
        }
        if !(self.t1_electron_s > 0.0) || !(self.t_phi_s > 0.0) {
            return Err(Error::config("relaxation times must be > 0".to_string()));
        }
        Ok(())
    }
}
