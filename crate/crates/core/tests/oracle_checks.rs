//! Independent closed-form oracles for the spin physics.
//!
//! These never call back into the code paths they check: the four-level
//! spectrum comes from the analytic 2×2-block solution, and the transition
//! moment from the exact block rotation angle.

use donorsim_core::constants::{MU_B_HZ_PER_T, MU_N_HZ_PER_T};
use donorsim_core::spin::{
    build_single_donor_hamiltonian, moment_between, nuclear_like_transition,
    single_donor_spectrum, DriveAxis,
};
use donorsim_core::{eigensystem, DonorSpecies};

/// Analytic four-level solution: |↑↑⟩ and |↓↓⟩ are exact product eigenstates;
/// the m = 0 pair diagonalizes a 2×2 block with eigenvalues −A ± √((e+n)²+4A²).
fn closed_form_levels(a_hz: f64, g_n: f64, b: f64) -> [f64; 4] {
    let e = MU_B_HZ_PER_T * b;
    let n = g_n * MU_N_HZ_PER_T * b;
    let s = ((e + n) * (e + n) + 4.0 * a_hz * a_hz).sqrt();
    let mut lv = [e - n + a_hz, -e + n + a_hz, -a_hz + s, -a_hz - s];
    lv.sort_by(|x, y| x.partial_cmp(y).unwrap());
    lv
}

/// Exact mixing angle of the m = 0 block, tan(2θ) = 2A/(e+n).
fn mixing_angle(a_hz: f64, g_n: f64, b: f64) -> f64 {
    let e = MU_B_HZ_PER_T * b;
    let n = g_n * MU_N_HZ_PER_T * b;
    0.5 * (2.0 * a_hz).atan2(e + n)
}

#[test]
fn spectrum_matches_closed_form_at_5_tesla() {
    let sp = DonorSpecies::si_p();
    let h = build_single_donor_hamiltonian(&sp, 5.0).unwrap();
    let spec = eigensystem(&h).unwrap();
    let oracle = closed_form_levels(sp.effective_hyperfine_hz(), sp.g_n, 5.0);
    let scale = oracle.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    for (got, want) in spec.levels.iter().zip(&oracle) {
        assert!((got - want).abs() / scale < 1e-10, "{got} vs {want}");
    }
}

#[test]
fn spectrum_matches_closed_form_across_species() {
    // A coarse grid over hyperfine strength, nuclear g and field covers the
    // level-crossing region and both Zeeman-dominated limits.
    let mut sp = DonorSpecies::si_p();
    for a_exp in [6.0, 6.5, 7.0, 7.5, 8.0] {
        for g_n in [0.3, 1.13, 2.26, 4.0] {
            for b in [0.0, 1e-3, 4.3e-3, 0.1, 1.0, 10.0] {
                sp.hyperfine_hz = 10f64.powf(a_exp);
                sp.g_n = g_n;
                let h = build_single_donor_hamiltonian(&sp, b).unwrap();
                let spec = eigensystem(&h).unwrap();
                let oracle = closed_form_levels(sp.effective_hyperfine_hz(), g_n, b);
                let scale = oracle
                    .iter()
                    .fold(0.0f64, |m, l| m.max(l.abs()))
                    .max(sp.hyperfine_hz);
                for (got, want) in spec.levels.iter().zip(&oracle) {
                    assert!(
                        (got - want).abs() / scale < 1e-10,
                        "A=1e{a_exp}, g_n={g_n}, B={b}: {got} vs {want}"
                    );
                }
            }
        }
    }
}

#[test]
fn nuclear_moment_matches_exact_block_rotation() {
    // ⟨↓↓| σx_e − κ σx_n |−⟩ = −(sinθ + κ cosθ) exactly.
    let sp = DonorSpecies::si_p();
    let kappa = sp.g_n * MU_N_HZ_PER_T / MU_B_HZ_PER_T;
    for &b in &[0.01, 0.1, 1.0, 2.0, 10.0] {
        let spec = single_donor_spectrum(&sp, b).unwrap();
        let (i, j) = nuclear_like_transition();
        let got = moment_between(&sp, &spec, i, j, DriveAxis::X);
        let theta = mixing_angle(sp.effective_hyperfine_hz(), sp.g_n, b);
        let want = theta.sin() + kappa * theta.cos();
        assert!(
            (got - want).abs() / want < 1e-9,
            "B = {b}: {got} vs {want}"
        );
    }
}

#[test]
fn nuclear_moment_reaches_g_n_mu_n_limit() {
    // The exact large-B limit is g_n μ_n (the informal "μ_n" statement
    // drops the g-factor). The electron admixture θ ≈ A/(e+n) decays only
    // as 1/B, so the 1% window opens far above laboratory fields: at 10 T
    // the admixture still contributes ~35% of the nuclear moment.
    let sp = DonorSpecies::si_p();
    let kappa = sp.g_n * MU_N_HZ_PER_T / MU_B_HZ_PER_T;
    let (i, j) = nuclear_like_transition();

    let spec10 = single_donor_spectrum(&sp, 10.0).unwrap();
    let m10 = moment_between(&sp, &spec10, i, j, DriveAxis::X);
    let theta10 = mixing_angle(sp.effective_hyperfine_hz(), sp.g_n, 10.0);
    assert!((m10 - kappa).abs() / kappa > 0.25, "still far from κ at 10 T");
    assert!(((m10 - kappa * theta10.cos()) - theta10.sin()).abs() / m10 < 1e-9);

    let spec_hi = single_donor_spectrum(&sp, 1000.0).unwrap();
    let m_hi = moment_between(&sp, &spec_hi, i, j, DriveAxis::X);
    assert!(
        (m_hi - kappa).abs() / kappa < 0.01,
        "κ limit at 1000 T: {m_hi} vs {kappa}"
    );
}

#[test]
fn electron_moment_stays_electron_scale() {
    // The electron-flip line keeps ~μ_B coupling at every field.
    let sp = DonorSpecies::si_p();
    for &b in &[0.05, 0.5, 5.0] {
        let spec = single_donor_spectrum(&sp, b).unwrap();
        let g = spec.labels.iter().position(|l| l == "de_un").unwrap();
        let e = spec.labels.iter().position(|l| l == "ue_un").unwrap();
        let m = moment_between(&sp, &spec, g, e, DriveAxis::X);
        assert!((0.9..=1.1).contains(&m), "B = {b}: moment {m}");
    }
}
