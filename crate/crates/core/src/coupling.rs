//! Two-donor exchange physics.
//!
//! Neighboring donors interact through overlap of their electron wave
//! functions: a direct exchange `J` between the electron spins, and through
//! it an indirect, electron-mediated exchange between the nuclear spins.
//! With both electrons frozen in |↓↓⟩ and equal hyperfine couplings A, the
//! nuclear flip-flop frequency is approximately
//!
//! ```text
//! ν_J = 2A² ( 1/(μ_B B/h − 2J) − 1/(μ_B B/h) )        [2J < μ_B B/h]
//! ```
//!
//! in frequency units. The hydrogenic estimate for the exchange itself,
//! with an order-unity prefactor taken as exactly 1, is
//!
//! ```text
//! J(r) ~ (E_b/h) (r/a_B)^{5/2} exp(−2r/a_B)
//! ```
//!
//! an order-of-magnitude relation valid for r ≳ a_B. The exact 16-level
//! two-donor Hamiltonian (sum of two single-donor terms plus
//! `J σ_e1 · σ_e2`) acts as the oracle for the ν_J approximation.

use nalgebra::{DMatrix, DVector, Matrix2};

use crate::constants::{EV_TO_HZ, MU_B_HZ_PER_T, MU_N_HZ_PER_T};
use crate::error::{Error, Result};
use crate::operator::{
    eigensystem, identity2, kron_all, pauli_x, pauli_y, pauli_z, C64, SpinOperator,
};
use crate::species::DonorSpecies;

/// Two donors in a common field with a fixed electron exchange (Hz).
#[derive(Debug, Clone)]
pub struct TwoDonorSystem {
    pub left: DonorSpecies,
    pub right: DonorSpecies,
    pub b_tesla: f64,
    /// Electron exchange energy J/h (Hz).
    pub exchange_hz: f64,
}

impl TwoDonorSystem {
    pub fn new(
        left: DonorSpecies,
        right: DonorSpecies,
        b_tesla: f64,
        exchange_hz: f64,
    ) -> Result<Self> {
        left.validate()?;
        right.validate()?;
        if b_tesla < 0.0 {
            return Err(Error::precondition("B >= 0", format!("B = {b_tesla} T")));
        }
        if exchange_hz < 0.0 {
            return Err(Error::precondition(
                "J >= 0",
                format!("J = {exchange_hz} Hz"),
            ));
        }
        Ok(TwoDonorSystem {
            left,
            right,
            b_tesla,
            exchange_hz,
        })
    }

    /// Validity of the perturbative regime behind the ν_J formula.
    pub fn eq_regime_ok(&self) -> bool {
        2.0 * self.exchange_hz < MU_B_HZ_PER_T * self.b_tesla
    }
}

/// Hydrogenic exchange estimate J(r)/h in Hz for donor separation `r > 0`.
pub fn exchange_j(r_m: f64, binding_energy_ev: f64, bohr_radius_m: f64) -> Result<f64> {
    if !(r_m > 0.0) {
        return Err(Error::precondition(
            "r > 0",
            format!("separation {r_m} m is not positive"),
        ));
    }
    if !(binding_energy_ev > 0.0 && bohr_radius_m > 0.0) {
        return Err(Error::config(
            "binding energy and Bohr radius must be positive".to_string(),
        ));
    }
    let x = r_m / bohr_radius_m;
    Ok(binding_energy_ev * EV_TO_HZ * x.powf(2.5) * (-2.0 * x).exp())
}

/// Electron-mediated nuclear exchange frequency (Hz), valid for
/// `2J < μ_B B/h` and `A > 0`.
pub fn nu_j(a_hz: f64, b_tesla: f64, j_hz: f64) -> Result<f64> {
    if !(a_hz > 0.0) {
        return Err(Error::precondition("A > 0", format!("A = {a_hz} Hz")));
    }
    if j_hz < 0.0 {
        return Err(Error::precondition("J >= 0", format!("J = {j_hz} Hz")));
    }
    let e = MU_B_HZ_PER_T * b_tesla;
    if !(2.0 * j_hz < e) {
        return Err(Error::precondition(
            "2J < mu_B B",
            format!(
                "2J = {:.6e} Hz is not below the electron Zeeman frequency {:.6e} Hz",
                2.0 * j_hz,
                e
            ),
        ));
    }
    Ok(2.0 * a_hz * a_hz * (1.0 / (e - 2.0 * j_hz) - 1.0 / e))
}

/// Operator acting with the given 2×2 factor on one of the four spins
/// (order: e1, n1, e2, n2) and identity elsewhere.
fn op_on(slot: usize, m: Matrix2<C64>) -> DMatrix<C64> {
    let mut factors = [identity2(), identity2(), identity2(), identity2()];
    factors[slot] = m;
    kron_all(&factors)
}

/// The 16-dim two-donor Hamiltonian: both single-donor terms (shared B,
/// independent A — an A-gate detuning enters by overriding A per donor)
/// plus the electron-electron exchange `J σ_e1 · σ_e2`.
pub fn build_two_donor_hamiltonian(sys: &TwoDonorSystem) -> Result<SpinOperator> {
    let e = MU_B_HZ_PER_T * sys.b_tesla;
    let n1 = sys.left.g_n * MU_N_HZ_PER_T * sys.b_tesla;
    let n2 = sys.right.g_n * MU_N_HZ_PER_T * sys.b_tesla;
    let a1 = sys.left.effective_hyperfine_hz();
    let a2 = sys.right.effective_hyperfine_hz();

    let mut h = DMatrix::<C64>::zeros(16, 16);
    // Zeeman terms.
    h += op_on(0, pauli_z()) * C64::new(e, 0.0);
    h += op_on(2, pauli_z()) * C64::new(e, 0.0);
    h -= op_on(1, pauli_z()) * C64::new(n1, 0.0);
    h -= op_on(3, pauli_z()) * C64::new(n2, 0.0);
    // Hyperfine contacts.
    for (pair, a) in [((0usize, 1usize), a1), ((2, 3), a2)] {
        for mk in [pauli_x, pauli_y, pauli_z] {
            let mut factors = [identity2(), identity2(), identity2(), identity2()];
            factors[pair.0] = mk();
            factors[pair.1] = mk();
            h += kron_all(&factors) * C64::new(a, 0.0);
        }
    }
    // Electron-electron exchange.
    for mk in [pauli_x, pauli_y, pauli_z] {
        let mut factors = [identity2(), identity2(), identity2(), identity2()];
        factors[0] = mk();
        factors[2] = mk();
        h += kron_all(&factors) * C64::new(sys.exchange_hz, 0.0);
    }
    SpinOperator::from_matrix(h)
}

/// Exact ν_J from the 16-level spectrum: the splitting of the two
/// eigenstates adiabatically connected to |↓e↓e⟩ ⊗ (|↑n↓n⟩ ± |↓n↑n⟩)/√2,
/// identified by overlap with that target subspace (≥ 0.7 required per
/// state).
pub fn nu_j_exact(sys: &TwoDonorSystem) -> Result<f64> {
    let e = MU_B_HZ_PER_T * sys.b_tesla;
    if !(2.0 * sys.exchange_hz < e) {
        return Err(Error::precondition(
            "2J < mu_B B",
            format!("2J = {:.6e} Hz, mu_B B/h = {:.6e} Hz", 2.0 * sys.exchange_hz, e),
        ));
    }
    let h = build_two_donor_hamiltonian(sys)?;
    let spec = eigensystem(&h)?;

    // Basis index: |e1 n1 e2 n2⟩ with ↑ = 0, ↓ = 1, e1 the slowest bit.
    // |↓↑↓↓⟩ = 0b1011 = 11, |↓↓↓↑⟩ = 0b1110 = 14.
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut target_plus = DVector::<C64>::zeros(16);
    target_plus[11] = C64::new(inv_sqrt2, 0.0);
    target_plus[14] = C64::new(inv_sqrt2, 0.0);
    let mut target_minus = DVector::<C64>::zeros(16);
    target_minus[11] = C64::new(inv_sqrt2, 0.0);
    target_minus[14] = C64::new(-inv_sqrt2, 0.0);

    // Overlap of each eigenstate with the 2-dim target subspace; the
    // splitting is basis-independent inside that subspace, which also
    // covers the degenerate J = 0 case.
    let mut scored: Vec<(f64, usize)> = (0..16)
        .map(|k| {
            let col = spec.states.column(k);
            let p: f64 = [&target_plus, &target_minus]
                .iter()
                .map(|t| {
                    let amp: C64 = col.iter().zip(t.iter()).map(|(a, b)| a.conj() * b).sum();
                    amp.norm_sqr()
                })
                .sum();
            (p, k)
        })
        .collect();
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let (p1, k1) = scored[0];
    let (p2, k2) = scored[1];
    if p1 < 0.7 || p2 < 0.7 {
        return Err(Error::precondition(
            "adiabatic state identification (overlap >= 0.7 with target subspace)",
            format!(
                "flip-flop pair not identifiable: best overlaps {:.3} (level {}) and {:.3} (level {})",
                p1, k1, p2, k2
            ),
        ));
    }
    Ok((spec.levels[k1] - spec.levels[k2]).abs())
}
