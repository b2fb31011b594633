//! Physics and device-model library for donor-spin silicon quantum computing.
//!
//! The crate models a single architecture end to end:
//!
//! - [`spin`] — the coupled electron–nuclear spin of one donor: energy
//!   levels, transition matrix elements and their field dependence.
//! - [`coupling`] — two-donor exchange physics: `J(r)`, the electron-mediated
//!   nuclear exchange frequency, and the exact 16-level Hamiltonian.
//! - [`dynamics`] — RF pulse propagation, CNOT/SWAP gates on the
//!   electron–nuclear pair, detuning-robust composite and optimized pulses,
//!   and the gate-voltage→hyperfine control curve.
//! - [`noise`] — gate-voltage noise as a VCO dephasing model, with white and
//!   1/f generators and Monte Carlo coherence decay.
//! - [`thermo`] — equilibrium electron polarization and the singlet-rejection
//!   spin refrigerator.
//! - [`readout`] — phenomenological singlet/triplet spin-to-charge readout
//!   and Fowler–Nordheim tunneling leakage.
//! - [`architect`] — a gate-grid device model that routes shuttled electrons
//!   and compiles circuits into validated, timed schedules.
//!
//! # Units
//!
//! All energies are stored as frequencies (E/h, in Hz). Magnetic fields are
//! tesla, times are seconds, voltages are volts. Pauli matrices follow the
//! eigenvalue ±1 convention, so the electron Zeeman splitting is
//! `2 μ_B B / h` and the hyperfine singlet–triplet gap at zero field is `4A`.
//!
//! # Basis ordering
//!
//! The single-donor Hilbert space is ordered
//! `|↑e↑n⟩, |↑e↓n⟩, |↓e↑n⟩, |↓e↓n⟩` (electron spin is the slow index). The
//! two-donor space is `e1 ⊗ n1 ⊗ e2 ⊗ n2` with the same per-spin convention.

// Guards are written `!(x > 0.0)` so NaN from parsed input fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod architect;
pub mod config;
pub mod constants;
pub mod coupling;
pub mod dynamics;
pub mod error;
pub mod noise;
pub mod operator;
pub mod output;
pub mod readout;
pub mod species;
pub mod spin;
pub mod thermo;

pub use error::Error;
pub use operator::{eigensystem, SpinOperator, Spectrum, C64};
pub use species::DonorSpecies;
