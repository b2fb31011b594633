//! The A-gate control curve: hyperfine coupling vs gate voltage.
//!
//! A biased gate above a donor distorts the electron wave function and with
//! it the contact hyperfine energy. The curve here is a qualitative, named
//! strategy: smooth and monotone nonincreasing from A₀ at `v0` to
//! A₀(1 − depth) at `v2`, with dA/dV = 0 at both endpoints and steepest
//! slope at `v1`. Spins are least sensitive to gate-voltage noise at the
//! flat endpoints — the two bias values a digitally-gated architecture
//! switches between — and most sensitive near `v1`.
//!
//! The derivative profile is a sin^(2q) bump peaked at `v1` (q set by
//! `width`); A(V) is its normalized integral, so the endpoint values are
//! exact by construction.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::species::DonorSpecies;
use crate::spin::{nuclear_like_transition, single_donor_spectrum};

#[derive(Debug, Clone, Serialize)]
pub struct AGateCurve {
    /// Unbiased hyperfine frequency A₀ (Hz).
    pub a0_hz: f64,
    /// Zero-slope bias (V): A = A₀.
    pub v0: f64,
    /// Steepest-slope bias (V).
    pub v1: f64,
    /// Zero-slope bias (V): A = A₀(1 − depth).
    pub v2: f64,
    /// Derivative-profile width (V); smaller concentrates the transition.
    pub width_v: f64,
    /// Total fractional reduction of A over the curve, in (0, 1).
    pub depth: f64,
    #[serde(skip)]
    grid: Vec<(f64, f64)>, // (V, cumulative fraction of total drop)
    #[serde(skip)]
    profile_integral: f64,
}

/// Grid points per side for the cumulative-integral table.
const N_GRID: usize = 2048;

impl AGateCurve {
    pub fn new(a0_hz: f64, v0: f64, v1: f64, v2: f64, width_v: f64, depth: f64) -> Result<Self> {
        if !(v0 < v1 && v1 < v2) {
            return Err(Error::config(format!(
                "bias points must satisfy v0 < v1 < v2, got {v0}, {v1}, {v2}"
            )));
        }
        if !(depth > 0.0 && depth < 1.0) {
            return Err(Error::config(format!("depth must be in (0,1), got {depth}")));
        }
        if !(a0_hz > 0.0 && width_v > 0.0) {
            return Err(Error::config("A0 and width must be positive".to_string()));
        }
        let mut curve = AGateCurve {
            a0_hz,
            v0,
            v1,
            v2,
            width_v,
            depth,
            grid: Vec::new(),
            profile_integral: 0.0,
        };
        curve.build_grid();
        Ok(curve)
    }

    /// Default control curve for a species: 1 V swing, 30% depth.
    pub fn default_for(species: &DonorSpecies) -> Self {
        Self::new(species.effective_hyperfine_hz(), 0.0, 0.5, 1.0, 0.5, 0.3).unwrap()
    }

    /// Profile concentration exponent from the width parameter.
    fn exponent(&self) -> f64 {
        ((self.v2 - self.v0) / (2.0 * self.width_v)).max(1.0)
    }

    /// Unnormalized derivative profile: sin^(2q) bump, 1 at v1, 0 with zero
    /// slope at v0 and v2.
    fn profile(&self, v: f64) -> f64 {
        let q = self.exponent();
        if v <= self.v0 || v >= self.v2 {
            0.0
        } else if v <= self.v1 {
            let x = (v - self.v0) / (self.v1 - self.v0);
            (std::f64::consts::FRAC_PI_2 * x).sin().powf(2.0 * q)
        } else {
            let x = (self.v2 - v) / (self.v2 - self.v1);
            (std::f64::consts::FRAC_PI_2 * x).sin().powf(2.0 * q)
        }
    }

    fn build_grid(&mut self) {
        // Composite-trapezoid cumulative integral of the profile on a fixed
        // grid; normalized at the end so A(v2) = A0(1 − depth) exactly.
        let n = 2 * N_GRID;
        let dv = (self.v2 - self.v0) / n as f64;
        let mut cum = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        let mut prev = self.profile(self.v0);
        cum.push((self.v0, 0.0));
        for k in 1..=n {
            let v = self.v0 + k as f64 * dv;
            let p = self.profile(v);
            acc += 0.5 * (prev + p) * dv;
            prev = p;
            cum.push((v, acc));
        }
        let total = acc;
        self.profile_integral = total;
        self.grid = cum.into_iter().map(|(v, c)| (v, c / total)).collect();
    }

    /// Clamp a bias into the curve domain.
    pub fn is_clamped(&self, v: f64) -> bool {
        v < self.v0 || v > self.v2
    }

    /// Fraction of the total drop accumulated at bias `v` (0 at v0, 1 at v2).
    fn drop_fraction(&self, v: f64) -> f64 {
        let v = v.clamp(self.v0, self.v2);
        match self
            .grid
            .binary_search_by(|(gv, _)| gv.partial_cmp(&v).unwrap())
        {
            Ok(i) => self.grid[i].1,
            Err(i) => {
                if i == 0 {
                    0.0
                } else if i >= self.grid.len() {
                    1.0
                } else {
                    let (va, ca) = self.grid[i - 1];
                    let (vb, cb) = self.grid[i];
                    ca + (cb - ca) * (v - va) / (vb - va)
                }
            }
        }
    }

    /// A(V) in Hz; biases outside [v0, v2] are clamped.
    pub fn hyperfine_at(&self, v: f64) -> f64 {
        self.a0_hz * (1.0 - self.depth * self.drop_fraction(v))
    }

    /// Analytic dA/dV (Hz/V): proportional to the profile, zero at the
    /// endpoints, extremal at v1.
    pub fn slope_at(&self, v: f64) -> f64 {
        if self.is_clamped(v) {
            return 0.0;
        }
        -self.a0_hz * self.depth * self.profile(v) / self.profile_integral
    }
}

/// Resonance frequency (Hz) of the nuclear-like transition when the donor's
/// hyperfine is tuned to the curve value at bias `v`.
pub fn resonance_at_bias(
    species: &DonorSpecies,
    b_tesla: f64,
    curve: &AGateCurve,
    v: f64,
) -> Result<f64> {
    let mut sp = species.clone();
    sp.hyperfine_hz = curve.hyperfine_at(v);
    sp.strain_factor = 1.0; // curve value is already the effective coupling
    let spec = single_donor_spectrum(&sp, b_tesla)?;
    let (i, j) = nuclear_like_transition();
    Ok(spec.levels[j] - spec.levels[i])
}

/// VCO tuning parameter α = dν/dV (Hz/V) by finite difference of the
/// resonance frequency; one-sided at the domain edges.
pub fn resonance_sensitivity(
    species: &DonorSpecies,
    b_tesla: f64,
    curve: &AGateCurve,
    v: f64,
) -> Result<f64> {
    let dv = 1e-6 * (curve.v2 - curve.v0);
    let (lo, hi) = if v - dv < curve.v0 {
        (v, v + dv)
    } else if v + dv > curve.v2 {
        (v - dv, v)
    } else {
        (v - dv, v + dv)
    };
    let f_lo = resonance_at_bias(species, b_tesla, curve, lo)?;
    let f_hi = resonance_at_bias(species, b_tesla, curve, hi)?;
    Ok((f_hi - f_lo) / (hi - lo))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve() -> AGateCurve {
        AGateCurve::new(30e6, 0.0, 0.4, 1.0, 0.5, 0.3).unwrap()
    }

    #[test]
    fn endpoint_values_exact() {
        let c = curve();
        assert_eq!(c.hyperfine_at(0.0), 30e6);
        assert!((c.hyperfine_at(1.0) - 30e6 * 0.7).abs() < 1e-6);
        // Clamped outside.
        assert_eq!(c.hyperfine_at(-5.0), c.hyperfine_at(0.0));
        assert_eq!(c.hyperfine_at(9.0), c.hyperfine_at(1.0));
        assert!(c.is_clamped(-5.0) && !c.is_clamped(0.5));
    }

    #[test]
    fn monotone_nonincreasing() {
        let c = curve();
        let mut prev = f64::INFINITY;
        for k in 0..=500 {
            let v = k as f64 / 500.0;
            let a = c.hyperfine_at(v);
            assert!(a <= prev + 1e-9, "A increased at V = {v}");
            prev = a;
        }
    }

    #[test]
    fn slope_zero_at_ends_max_at_v1() {
        let c = curve();
        assert_eq!(c.slope_at(0.0), 0.0);
        assert_eq!(c.slope_at(1.0), 0.0);
        let peak = c.slope_at(0.4).abs();
        for k in 0..=200 {
            let v = k as f64 / 200.0;
            assert!(c.slope_at(v).abs() <= peak * (1.0 + 1e-9), "V = {v}");
        }
        // Numerical dA/dV near the endpoints is < 1e-6 of the peak.
        let fd = |v: f64, dv: f64| (c.hyperfine_at(v + dv) - c.hyperfine_at(v)) / dv;
        assert!(fd(0.0, 1e-4).abs() < 1e-6 * peak);
        assert!(fd(1.0 - 1e-4, 1e-4).abs() < 1e-6 * peak);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(AGateCurve::new(30e6, 0.0, 0.0, 1.0, 0.5, 0.3).is_err());
        assert!(AGateCurve::new(30e6, 0.0, 0.5, 1.0, 0.5, 1.5).is_err());
        assert!(AGateCurve::new(30e6, 1.0, 0.5, 0.0, 0.5, 0.3).is_err());
    }

    #[test]
    fn digitally_gated_bias_points_are_quiet() {
        // |dν/dV| at v0 and v2 is below 1e-3 of its value at v1.
        let sp = DonorSpecies::si_p();
        let c = AGateCurve::default_for(&sp);
        let b = 2.0;
        let at = |v: f64| resonance_sensitivity(&sp, b, &c, v).unwrap().abs();
        let s0 = at(c.v0);
        let s1 = at(c.v1);
        let s2 = at(c.v2);
        assert!(s1 > 0.0);
        assert!(s0 < 1e-3 * s1, "v0 sensitivity {s0} vs peak {s1}");
        assert!(s2 < 1e-3 * s1, "v2 sensitivity {s2} vs peak {s1}");
    }

    #[test]
    fn sensitivity_scale_is_physical() {
        // dν/dA for the nuclear-like transition is O(1); with a 9 MHz drop
        // over 1 V the peak α lands in the tens of MHz/V.
        let sp = DonorSpecies::si_p();
        let c = AGateCurve::default_for(&sp);
        let s1 = resonance_sensitivity(&sp, 2.0, &c, c.v1).unwrap().abs();
        assert!(s1 > 1e6 && s1 < 1e9, "alpha at v1 = {s1}");
    }
}
