//! Single-donor electron–nuclear spin physics.
//!
//! The Hamiltonian of one donor in a field B ∥ z, in frequency units, is
//!
//! ```text
//! H/h = (μ_B B/h) σz_e − (g_n μ_n B/h) σz_n + A (σ_e · σ_n)
//! ```
//!
//! with Pauli matrices of eigenvalue ±1 and electron g = 2 absorbed into the
//! μ_B term. At B = 0 the electron-nuclear singlet lies 4A below the
//! threefold-degenerate triplet; applying B evolves the eigenstates into
//! product spin states as first the electron and then the nuclear Zeeman
//! energy passes 4A.
//!
//! Basis order: `|↑e↑n⟩, |↑e↓n⟩, |↓e↑n⟩, |↓e↓n⟩`.

use nalgebra::DMatrix;

use crate::constants::{MU_B_HZ_PER_T, MU_N_HZ_PER_T};
use crate::error::{Error, Result};
use crate::operator::{
    eigensystem, identity2, kron_all, pauli_x, pauli_y, pauli_z, C64, SpinOperator, Spectrum,
};
use crate::species::DonorSpecies;

/// σ_e · σ_n on the 4-dim product space.
pub fn exchange_dot() -> DMatrix<C64> {
    kron_all(&[pauli_x(), pauli_x()])
        + kron_all(&[pauli_y(), pauli_y()])
        + kron_all(&[pauli_z(), pauli_z()])
}

/// Build H/h for one donor at field `b_tesla ≥ 0`.
pub fn build_single_donor_hamiltonian(species: &DonorSpecies, b_tesla: f64) -> Result<SpinOperator> {
    species.validate()?;
    if b_tesla < 0.0 {
        return Err(Error::precondition(
            "B >= 0",
            format!("magnetic field {b_tesla} T is negative"),
        ));
    }
    let e = MU_B_HZ_PER_T * b_tesla;
    let n = species.g_n * MU_N_HZ_PER_T * b_tesla;
    let a = species.effective_hyperfine_hz();

    let h = kron_all(&[pauli_z(), identity2()]) * C64::new(e, 0.0)
        - kron_all(&[identity2(), pauli_z()]) * C64::new(n, 0.0)
        + exchange_dot() * C64::new(a, 0.0);
    SpinOperator::from_matrix(h)
}

/// Transverse RF coupling operator, `σx_e − (g_n μ_n/μ_B) σx_n`, in units
/// of μ_B. Multiplying by `μ_B B_rf / h` gives the drive in Hz.
pub fn drive_operator_x(species: &DonorSpecies) -> DMatrix<C64> {
    let kappa = species.g_n * MU_N_HZ_PER_T / MU_B_HZ_PER_T;
    kron_all(&[pauli_x(), identity2()]) - kron_all(&[identity2(), pauli_x()]) * C64::new(kappa, 0.0)
}

/// Longitudinal RF coupling operator, `σz_e − (g_n μ_n/μ_B) σz_n`, in units
/// of μ_B. A B_rf ∥ z component drives the zero-quantum (flip-flop)
/// transition that a transverse field cannot reach (Δm selection rule).
pub fn drive_operator_z(species: &DonorSpecies) -> DMatrix<C64> {
    let kappa = species.g_n * MU_N_HZ_PER_T / MU_B_HZ_PER_T;
    kron_all(&[pauli_z(), identity2()]) - kron_all(&[identity2(), pauli_z()]) * C64::new(kappa, 0.0)
}

/// Basis-state labels in basis order.
pub const BASIS_LABELS: [&str; 4] = ["ue_un", "ue_dn", "de_un", "de_dn"];

/// Diagonalize one donor and attach adiabatic labels.
///
/// A level overlapping a single product basis state with probability ≥ 0.75
/// is labeled by that state; otherwise it is labeled `singlet`/`triplet0`
/// by its symmetry character in the m = 0 pair.
pub fn single_donor_spectrum(species: &DonorSpecies, b_tesla: f64) -> Result<Spectrum> {
    let h = build_single_donor_hamiltonian(species, b_tesla)?;
    let mut spec = eigensystem(&h)?;
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    for k in 0..4 {
        let v = spec.states.column(k);
        let mut best = 0;
        let mut best_p = 0.0;
        for (i, _) in BASIS_LABELS.iter().enumerate() {
            let p = v[i].norm_sqr();
            if p > best_p {
                best_p = p;
                best = i;
            }
        }
        spec.labels[k] = if best_p >= 0.75 {
            BASIS_LABELS[best].to_string()
        } else {
            // m = 0 pair: distinguish by exchange symmetry.
            let s_amp = (v[1] - v[2]) * C64::new(inv_sqrt2, 0.0);
            if s_amp.norm_sqr() >= 0.5 {
                "singlet".to_string()
            } else {
                "triplet0".to_string()
            }
        };
    }
    Ok(spec)
}

/// |⟨i| σx_e − (g_n μ_n/μ_B) σx_n |j⟩| between eigenstates, in units of μ_B.
///
/// This is the coupling a transverse RF field sees. At B = 0 allowed
/// transitions are of order μ_B; nuclear-spin-changing transitions weaken
/// with B toward the exact large-B limit g_n μ_n (the looser informal
/// statement "approaches μ_n" drops the g-factor).
pub fn transition_moment(species: &DonorSpecies, b_tesla: f64, i: usize, j: usize) -> Result<f64> {
    if i == j {
        return Err(Error::precondition(
            "i != j",
            format!("transition moment requires distinct levels, got i = j = {i}"),
        ));
    }
    if i >= 4 || j >= 4 {
        return Err(Error::config(format!(
            "level index out of range: ({i}, {j}) on a 4-level system"
        )));
    }
    let spec = single_donor_spectrum(species, b_tesla)?;
    Ok(moment_between(species, &spec, i, j, DriveAxis::X))
}

/// Drive polarization axis for matrix elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriveAxis {
    /// Transverse field (single-quantum transitions).
    X,
    /// Longitudinal field (zero-quantum flip-flop transition).
    Z,
}

/// Matrix element of the chosen drive between two eigenstates (units of μ_B).
pub fn moment_between(
    species: &DonorSpecies,
    spec: &Spectrum,
    i: usize,
    j: usize,
    axis: DriveAxis,
) -> f64 {
    let m = match axis {
        DriveAxis::X => drive_operator_x(species),
        DriveAxis::Z => drive_operator_z(species),
    };
    let vi = spec.state(i);
    let vj = spec.state(j);
    let mv = &m * vj;
    let amp: C64 = vi.iter().zip(mv.iter()).map(|(a, b)| a.conj() * b).sum();
    amp.norm()
}

/// The nuclear-like transition: levels (0, 1) in ascending order, which at
/// large B is the nuclear flip |↓e↑n⟩ ↔ |↓e↓n⟩ within the electron ground
/// manifold — the workhorse transition of a nuclear-spin processor.
pub fn nuclear_like_transition() -> (usize, usize) {
    (0, 1)
}

/// One row of the level-gap table.
#[derive(Debug, Clone)]
pub struct GapRow {
    pub b_tesla: f64,
    /// All pairwise gaps, ascending by gap value.
    pub gaps: Vec<GapEntry>,
}

#[derive(Debug, Clone)]
pub struct GapEntry {
    /// Lower level index (ascending-order spectrum).
    pub lower: usize,
    /// Upper level index.
    pub upper: usize,
    pub gap_hz: f64,
}

/// Pairwise level gaps on a field grid. The grid must be nonempty and
/// nondecreasing. With increasing B the largest gaps approach the electron
/// Zeeman energy 2μ_B B/h and the smallest nonzero gap the nuclear Zeeman
/// scale.
pub fn energy_differences(species: &DonorSpecies, b_grid: &[f64]) -> Result<Vec<GapRow>> {
    if b_grid.is_empty() {
        return Err(Error::config("field grid is empty".to_string()));
    }
    if b_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::config("field grid must be nondecreasing".to_string()));
    }
    let mut rows = Vec::with_capacity(b_grid.len());
    for &b in b_grid {
        let spec = single_donor_spectrum(species, b)?;
        let mut gaps = Vec::with_capacity(6);
        for i in 0..4 {
            for j in (i + 1)..4 {
                gaps.push(GapEntry {
                    lower: i,
                    upper: j,
                    gap_hz: spec.levels[j] - spec.levels[i],
                });
            }
        }
        gaps.sort_by(|a, b| a.gap_hz.partial_cmp(&b.gap_hz).unwrap());
        rows.push(GapRow { b_tesla: b, gaps });
    }
    Ok(rows)
}
