//! Physical constants (CODATA 2018) and frequency-unit conversions.
//!
//! Everything downstream works in frequency units (E/h, Hz), so the
//! most-used values here are the `*_HZ_PER_*` conversions.

use serde::Serialize;

/// Bohr magneton μ_B (J/T).
pub const MU_B: f64 = 9.274_010_078_3e-24;
/// Nuclear magneton μ_n (J/T).
pub const MU_N: f64 = 5.050_783_746_1e-27;
/// Boltzmann constant k_B (J/K), exact.
pub const K_B: f64 = 1.380_649e-23;
/// Planck constant h (J·s), exact.
pub const H: f64 = 6.626_070_15e-34;
/// Reduced Planck constant ħ (J·s).
pub const HBAR: f64 = H / (2.0 * std::f64::consts::PI);
/// Elementary charge e (C), exact.
pub const E_CHARGE: f64 = 1.602_176_634e-19;
/// Free electron mass m_e (kg).
pub const M_E: f64 = 9.109_383_701_5e-31;

/// Electron Zeeman tuning μ_B/h (Hz/T) ≈ 13.996 GHz/T.
pub const MU_B_HZ_PER_T: f64 = MU_B / H;
/// Nuclear Zeeman tuning μ_n/h (Hz/T) ≈ 7.622 MHz/T.
pub const MU_N_HZ_PER_T: f64 = MU_N / H;
/// eV → Hz conversion (e/h) ≈ 241.8 THz/eV.
pub const EV_TO_HZ: f64 = E_CHARGE / H;

/// Fixed CODATA constants, bundled for echoing into output metadata.
/// Never mutated at runtime.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PhysicalConstants {
    /// Bohr magneton (J/T).
    pub mu_b: f64,
    /// Nuclear magneton (J/T).
    pub mu_n: f64,
    /// Boltzmann constant (J/K).
    pub k_b: f64,
    /// Planck constant (J·s).
    pub h: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        PhysicalConstants {
            mu_b: MU_B,
            mu_n: MU_N,
            k_b: K_B,
            h: H,
        }
    }
}
