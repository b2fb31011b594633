//! Equilibrium spin polarization and singlet-rejection spin refrigeration.
//!
//! A device that sorts electron pairs by total spin can cool a spin
//! reservoir: singlet pairs carry exactly zero polarization, so expelling
//! them into a heat sink leaves the passed population more polarized.
//! For i.i.d. input pairs with per-spin up-probability `(1+p)/2` and a
//! projective singlet/triplet measurement, one stage maps
//!
//! ```text
//! p  →  4p / (3 + p²),     singlet (rejected) fraction (1 − p²)/4
//! ```
//!
//! and magnetization is conserved exactly between input and (output + sink).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::constants::{K_B, MU_B};
use crate::error::{Error, Result};

/// A spin reservoir at polarization `p ∈ [−1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reservoir {
    pub polarization: f64,
    /// Number of spins; `None` for a normalized continuum description.
    pub count: Option<u64>,
}

impl Reservoir {
    pub fn new(polarization: f64, count: Option<u64>) -> Result<Self> {
        if !(polarization.abs() <= 1.0) {
            return Err(Error::config(format!(
                "polarization must lie in [-1, 1], got {polarization}"
            )));
        }
        Ok(Reservoir {
            polarization,
            count,
        })
    }
}

/// Outcome of one refrigerator stage. Magnetization values are per input
/// pair (units of single-spin polarization, so a ↑↑ pair contributes +2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageResult {
    /// Polarization of the passed (triplet) population.
    pub p_out: f64,
    /// Fraction of input pairs passed through.
    pub pass_fraction: f64,
    /// Fraction of input pairs expelled to the sink (singlets).
    pub rejected_fraction: f64,
    /// Mean input magnetization per pair.
    pub magnetization_in: f64,
    /// Mean magnetization of passed pairs plus sink, per input pair.
    /// Singlets carry exactly zero, so this equals `magnetization_in`.
    pub magnetization_out_plus_sink: f64,
}

/// Equilibrium electron polarization p = tanh(μ_B B / k_B T) for the g = 2
/// two-level electron.
pub fn equilibrium_polarization(b_tesla: f64, t_kelvin: f64) -> Result<f64> {
    if !(t_kelvin > 0.0) {
        return Err(Error::precondition(
            "T > 0",
            format!("temperature {t_kelvin} K is not positive"),
        ));
    }
    if b_tesla < 0.0 {
        return Err(Error::precondition(
            "B >= 0",
            format!("field {b_tesla} T is negative"),
        ));
    }
    Ok((MU_B * b_tesla / (K_B * t_kelvin)).tanh())
}

/// Field required to reach polarization `p` at temperature `t_kelvin`
/// (inverse of [`equilibrium_polarization`]); used for iso-polarization
/// contour extraction.
pub fn field_for_polarization(p: f64, t_kelvin: f64) -> Result<f64> {
    if !(t_kelvin > 0.0) {
        return Err(Error::precondition("T > 0", "nonpositive temperature".to_string()));
    }
    if !(0.0..1.0).contains(&p) {
        return Err(Error::config(format!("contour level must be in [0,1), got {p}")));
    }
    Ok(K_B * t_kelvin / MU_B * p.atanh())
}

/// One singlet-rejection stage on i.i.d. product pairs (analytic).
pub fn fridge_stage(p_in: f64) -> Result<StageResult> {
    if !(p_in.abs() <= 1.0) {
        return Err(Error::config(format!(
            "polarization must lie in [-1, 1], got {p_in}"
        )));
    }
    let u = (1.0 + p_in) / 2.0;
    let d = (1.0 - p_in) / 2.0;
    // ↑↓/↓↑ pairs project onto the singlet with probability 1/2.
    let singlet = u * d; // = (1 − p²)/4
    let pass = 1.0 - singlet;
    // Passed magnetization: ↑↑ → +2, ↓↓ → −2, triplet-0 → 0.
    let mag = 2.0 * (u * u - d * d);
    Ok(StageResult {
        p_out: if pass > 0.0 { mag / (2.0 * pass) } else { 0.0 },
        pass_fraction: pass,
        rejected_fraction: singlet,
        magnetization_in: 2.0 * p_in,
        magnetization_out_plus_sink: mag, // sink carries exactly zero
    })
}

/// One point of a refrigerator cascade.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadePoint {
    pub stage: usize,
    pub polarization: f64,
    /// Cumulative pass fraction after this stage.
    pub yield_fraction: f64,
}

/// Iterate [`fridge_stage`] `stages ≥ 1` times, tracking cumulative yield.
pub fn fridge_cascade(p_in: f64, stages: usize) -> Result<Vec<CascadePoint>> {
    if stages == 0 {
        return Err(Error::config("cascade needs at least one stage".to_string()));
    }
    let mut out = Vec::with_capacity(stages);
    let mut p = p_in;
    let mut yield_frac = 1.0;
    for k in 0..stages {
        let r = fridge_stage(p)?;
        p = r.p_out;
        yield_frac *= r.pass_fraction;
        out.push(CascadePoint {
            stage: k + 1,
            polarization: p,
            yield_fraction: yield_frac,
        });
    }
    Ok(out)
}

/// Stochastic pair-sampling estimate of one stage (oracle for
/// [`fridge_stage`]). Deterministic per seed.
pub fn mc_fridge(p_in: f64, pairs: u64, seed: u64) -> Result<StageResult> {
    if pairs < 1000 {
        return Err(Error::precondition(
            "pairs >= 1000",
            format!("got {pairs} pairs"),
        ));
    }
    if !(p_in.abs() <= 1.0) {
        return Err(Error::config(format!(
            "polarization must lie in [-1, 1], got {p_in}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let up = (1.0 + p_in) / 2.0;
    let mut passed = 0u64;
    let mut mag_in = 0i64;
    let mut mag_pass = 0i64;
    for _ in 0..pairs {
        let s1 = rng.random::<f64>() < up;
        let s2 = rng.random::<f64>() < up;
        let m = (s1 as i64 * 2 - 1) + (s2 as i64 * 2 - 1);
        mag_in += m;
        if s1 != s2 {
            // Antiparallel product: Born rule puts it in the singlet half
            // the time; the triplet-0 branch passes with zero magnetization.
            if rng.random::<f64>() < 0.5 {
                continue; // expelled to sink, zero magnetization
            }
            passed += 1;
        } else {
            passed += 1;
            mag_pass += m;
        }
    }
    let pass_fraction = passed as f64 / pairs as f64;
    Ok(StageResult {
        p_out: if passed > 0 {
            mag_pass as f64 / (2.0 * passed as f64)
        } else {
            0.0
        },
        pass_fraction,
        rejected_fraction: 1.0 - pass_fraction,
        magnetization_in: mag_in as f64 / pairs as f64,
        magnetization_out_plus_sink: mag_pass as f64 / pairs as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reservoir_bounds() {
        assert!(Reservoir::new(0.7, Some(1000)).is_ok());
        assert!(Reservoir::new(-1.0, None).is_ok());
        assert!(Reservoir::new(1.2, None).is_err());
        assert!(Reservoir::new(f64::NAN, None).is_err());
    }

    #[test]
    fn polarization_reference_points() {
        // 1 T, 0.1 K: deep in the frozen regime.
        let p = equilibrium_polarization(1.0, 0.1).unwrap();
        assert!(p > 0.999, "p = {p}");
        assert_eq!(equilibrium_polarization(0.0, 1.0).unwrap(), 0.0);
        assert!(equilibrium_polarization(1.0, 0.0).is_err());
        assert!(equilibrium_polarization(1.0, -1.0).is_err());
    }

    #[test]
    fn polarization_depends_only_on_ratio() {
        let p1 = equilibrium_polarization(1.0, 0.5).unwrap();
        let p2 = equilibrium_polarization(2.0, 1.0).unwrap();
        assert!((p1 - p2).abs() < 1e-15);
    }

    #[test]
    fn contour_inversion() {
        let b = field_for_polarization(0.9, 0.3).unwrap();
        let p = equilibrium_polarization(b, 0.3).unwrap();
        assert!((p - 0.9).abs() < 1e-12);
    }

    #[test]
    fn stage_enumeration_oracle() {
        // Independent enumeration of the four product states for p = 0.5.
        let p = 0.5;
        let u = (1.0 + p) / 2.0;
        let d = 1.0 - u;
        let mut pass_w = 0.0;
        let mut mag_w = 0.0;
        for (s1, w1) in [(1.0, u), (-1.0, d)] {
            for (s2, w2) in [(1.0, u), (-1.0, d)] {
                let w = w1 * w2;
                if s1 != s2 {
                    // singlet projection weight 1/2; triplet-0 passes with m=0
                    pass_w += w * 0.5;
                } else {
                    pass_w += w;
                    mag_w += w * (s1 + s2);
                }
            }
        }
        let p_out_oracle = mag_w / (2.0 * pass_w);
        let r = fridge_stage(p).unwrap();
        assert!((r.p_out - p_out_oracle).abs() < 1e-15);
        assert!((r.p_out - 8.0 / 13.0).abs() < 1e-15);
        assert!((r.pass_fraction + r.rejected_fraction - 1.0).abs() < 1e-15);
    }

    #[test]
    fn stage_endpoints() {
        let r0 = fridge_stage(0.0).unwrap();
        assert_eq!(r0.p_out, 0.0);
        assert!((r0.rejected_fraction - 0.25).abs() < 1e-15);
        let r1 = fridge_stage(1.0).unwrap();
        assert_eq!(r1.p_out, 1.0);
        assert_eq!(r1.rejected_fraction, 0.0);
    }

    #[test]
    fn stage_conserves_magnetization() {
        for &p in &[-0.9, -0.3, 0.0, 0.2, 0.7, 1.0] {
            let r = fridge_stage(p).unwrap();
            assert!(
                (r.magnetization_in - r.magnetization_out_plus_sink).abs() < 1e-15,
                "p = {p}"
            );
        }
    }

    #[test]
    fn cascade_strictly_increasing() {
        let pts = fridge_cascade(0.5, 15).unwrap();
        let mut prev = 0.5;
        for pt in &pts {
            assert!(pt.polarization > prev);
            prev = pt.polarization;
        }
        // First stage reaching 0.999, against an independent iteration of
        // the closed-form map.
        let mut p = 0.5;
        let mut expect_stage = 0;
        for stage in 1..=15 {
            p = 4.0 * p / (3.0 + p * p);
            if p >= 0.999 {
                expect_stage = stage;
                break;
            }
        }
        let first = pts.iter().find(|pt| pt.polarization >= 0.999).unwrap();
        assert_eq!(first.stage, expect_stage);
        assert!((10..=12).contains(&expect_stage), "stage {expect_stage}");
    }

    #[test]
    fn cascade_fixed_points() {
        for pt in fridge_cascade(0.0, 5).unwrap() {
            assert_eq!(pt.polarization, 0.0);
        }
        for pt in fridge_cascade(1.0, 5).unwrap() {
            assert_eq!(pt.polarization, 1.0);
        }
        assert!(fridge_cascade(0.5, 0).is_err());
    }

    #[test]
    fn map_is_odd() {
        for &p in &[0.1, 0.4, 0.8] {
            let plus = fridge_stage(p).unwrap().p_out;
            let minus = fridge_stage(-p).unwrap().p_out;
            assert!((plus + minus).abs() < 1e-15);
        }
    }

    #[test]
    fn mc_matches_analytic() {
        let r = mc_fridge(0.5, 1_000_000, 42).unwrap();
        let exact = fridge_stage(0.5).unwrap();
        assert!((r.p_out - exact.p_out).abs() < 0.003, "p_out {}", r.p_out);
        // Magnetization conservation is exact realization-by-realization.
        assert!((r.magnetization_in - r.magnetization_out_plus_sink).abs() < 1e-12);
    }

    #[test]
    fn mc_fully_polarized_has_no_singlets() {
        let r = mc_fridge(1.0, 10_000, 7).unwrap();
        assert_eq!(r.rejected_fraction, 0.0);
        assert_eq!(r.p_out, 1.0);
    }

    #[test]
    fn mc_deterministic() {
        let a = mc_fridge(0.3, 10_000, 99).unwrap();
        let b = mc_fridge(0.3, 10_000, 99).unwrap();
        assert_eq!(a, b);
        assert!(mc_fridge(0.3, 10, 1).is_err());
    }
}
