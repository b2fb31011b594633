//! Gate-voltage noise and VCO dephasing.
//!
//! A gated spin is a voltage-controlled oscillator: its resonance frequency
//! shifts by α = dν/dV per volt of gate bias, so voltage noise becomes phase
//! diffusion. For a white single-sided voltage PSD `S_V` the dephasing rate
//! is exactly
//!
//! ```text
//! 1/t_φ = π² α² S_V
//! ```
//!
//! The PSD convention throughout is single-sided (total power =
//! ∫₀^∞ S(f) df), chosen so the rate formula above is exact for the
//! discrete-time white generator at any step size. Low-frequency 1/f noise
//! is synthesized as a sum of Ornstein–Uhlenbeck processes with octave-spaced
//! corner frequencies.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// White + 1/f voltage-noise description for a gate line (single-sided).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoiseSpectrum {
    /// White level (V²/Hz).
    pub s_white: f64,
    /// 1/f level at 1 Hz (V²/Hz): S(f) = s_oneoverf_at_1hz / f in band.
    pub s_oneoverf_at_1hz: f64,
    /// Lower cutoff of the 1/f band (Hz).
    pub f_min: f64,
    /// Upper cutoff of the 1/f band (Hz).
    pub f_max: f64,
}

impl NoiseSpectrum {
    /// Room-temperature Johnson noise of a 50 Ω line, ≈1e-18 V²/Hz.
    pub const JOHNSON_50_OHM_300K: f64 = 1e-18;

    pub fn white(s_white: f64) -> Self {
        NoiseSpectrum {
            s_white,
            s_oneoverf_at_1hz: 0.0,
            f_min: 0.0,
            f_max: 0.0,
        }
    }

    pub fn has_one_over_f(&self) -> bool {
        self.s_oneoverf_at_1hz > 0.0
    }

    pub fn validate(&self) -> Result<()> {
        if self.s_white < 0.0 || self.s_oneoverf_at_1hz < 0.0 {
            return Err(Error::config("noise levels must be nonnegative".to_string()));
        }
        if self.has_one_over_f() && !(self.f_min > 0.0 && self.f_min < self.f_max) {
            return Err(Error::config(format!(
                "1/f band requires 0 < f_min < f_max, got [{}, {}]",
                self.f_min, self.f_max
            )));
        }
        Ok(())
    }

    /// Target single-sided PSD at frequency `f` (in-band model).
    pub fn target_psd(&self, f: f64) -> f64 {
        let mut s = self.s_white;
        if self.has_one_over_f() && f >= self.f_min && f <= self.f_max {
            s += self.s_oneoverf_at_1hz / f;
        }
        s
    }
}

/// The spin-as-oscillator model: tuning parameter α = dν/dV.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct VcoModel {
    /// Tuning parameter dν/dV (Hz/V), evaluated at the bias point.
    pub alpha_hz_per_v: f64,
    /// Carrier frequency (Hz); bookkeeping only, dephasing depends on α.
    pub base_frequency_hz: f64,
}

/// Dephasing rate 1/t_φ = π² α² S_V (Hz) for white voltage noise.
///
/// Inputs must be nonnegative. α = 0 is the zero-sensitivity bias point of
/// the A-gate curve and gives zero rate.
pub fn dephasing_rate(alpha_hz_per_v: f64, s_white: f64) -> f64 {
    debug_assert!(alpha_hz_per_v >= 0.0 && s_white >= 0.0);
    std::f64::consts::PI.powi(2) * alpha_hz_per_v * alpha_hz_per_v * s_white
}

/// Ornstein–Uhlenbeck corner stack approximating a 1/f band.
///
/// With octave-spaced corners and equal per-process variance σ², the summed
/// Lorentzians give S(f) ≈ σ²/(f ln 2) in band, so σ² = ln 2 · S_1Hz. Two
/// guard octaves beyond each band edge keep the in-band level flat near the
/// cutoffs (the top guards stay below Nyquist).
fn ou_corners(spec: &NoiseSpectrum, nyquist_hz: f64) -> Vec<f64> {
    let mut corners = Vec::new();
    if spec.has_one_over_f() {
        let mut f = spec.f_min / 4.0;
        let top = (spec.f_max * 4.0).min(nyquist_hz);
        while f <= top * (1.0 + 1e-12) {
            corners.push(f);
            f *= 2.0;
        }
    }
    corners
}

/// Generate a stationary voltage trace of `n ≥ 2` samples at step `dt`.
/// Deterministic per seed. Fails if the 1/f band extends past Nyquist.
pub fn generate_noise(spec: &NoiseSpectrum, dt_s: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    spec.validate()?;
    if !(dt_s > 0.0) {
        return Err(Error::config(format!("dt must be positive, got {dt_s}")));
    }
    if n < 2 {
        return Err(Error::config(format!("need at least 2 samples, got {n}")));
    }
    let nyquist = 0.5 / dt_s;
    if spec.has_one_over_f() && spec.f_max > nyquist {
        return Err(Error::precondition(
            "f_max <= Nyquist",
            format!("f_max = {} Hz exceeds Nyquist {} Hz", spec.f_max, nyquist),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let white_sigma = (spec.s_white / (2.0 * dt_s)).sqrt();

    let corners = ou_corners(spec, nyquist);
    let sigma2 = std::f64::consts::LN_2 * spec.s_oneoverf_at_1hz;
    let sigma = sigma2.sqrt();
    // Stationary initialization, then exact AR(1) updates.
    let mut states: Vec<f64> = corners
        .iter()
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            sigma * z
        })
        .collect();
    let decay: Vec<f64> = corners
        .iter()
        .map(|fc| (-2.0 * std::f64::consts::PI * fc * dt_s).exp())
        .collect();
    let kick: Vec<f64> = decay.iter().map(|a| sigma * (1.0 - a * a).sqrt()).collect();

    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let mut v = if white_sigma > 0.0 {
            let z: f64 = StandardNormal.sample(&mut rng);
            white_sigma * z
        } else {
            0.0
        };
        for k in 0..states.len() {
            v += states[k];
            let z: f64 = StandardNormal.sample(&mut rng);
            states[k] = decay[k] * states[k] + kick[k] * z;
        }
        out.push(v);
    }
    Ok(out)
}

/// Single-sided periodogram of a real trace: returns (frequency, PSD) pairs
/// for bins 1..n/2. The trace is zero-padded to a power of two.
pub fn periodogram(trace: &[f64], dt_s: f64) -> Vec<(f64, f64)> {
    let n = trace.len().next_power_of_two();
    let mut re: Vec<f64> = trace.to_vec();
    re.resize(n, 0.0);
    let mut im = vec![0.0; n];
    fft_in_place(&mut re, &mut im);
    let t_total = trace.len() as f64 * dt_s;
    let norm = dt_s * dt_s / t_total;
    (1..n / 2)
        .map(|k| {
            let p = (re[k] * re[k] + im[k] * im[k]) * norm * 2.0;
            (k as f64 / (n as f64 * dt_s), p)
        })
        .collect()
}

/// Iterative radix-2 FFT (decimation in time).
fn fft_in_place(re: &mut [f64], im: &mut [f64]) {
    let n = re.len();
    assert!(n.is_power_of_two());
    // Bit-reversal permutation.
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            re.swap(i, j);
            im.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let ang = -2.0 * std::f64::consts::PI / len as f64;
        let (wr, wi) = (ang.cos(), ang.sin());
        let mut i = 0;
        while i < n {
            let (mut cr, mut ci) = (1.0, 0.0);
            for k in 0..len / 2 {
                let (ur, ui) = (re[i + k], im[i + k]);
                let (vr, vi) = (
                    re[i + k + len / 2] * cr - im[i + k + len / 2] * ci,
                    re[i + k + len / 2] * ci + im[i + k + len / 2] * cr,
                );
                re[i + k] = ur + vr;
                im[i + k] = ui + vi;
                re[i + k + len / 2] = ur - vr;
                im[i + k + len / 2] = ui - vi;
                let ncr = cr * wr - ci * wi;
                ci = cr * wi + ci * wr;
                cr = ncr;
            }
            i += len;
        }
        len <<= 1;
    }
}

/// Monte Carlo coherence decay |⟨exp(i 2π α ∫V dt)⟩| on a time grid.
#[derive(Debug, Clone, Serialize)]
pub struct CoherenceCurve {
    pub t_s: Vec<f64>,
    pub coherence: Vec<f64>,
    pub stderr: Vec<f64>,
    /// Exponential-fit rate (Hz) over the mid-decay window, when the fit
    /// window is populated (white-noise runs).
    pub fitted_rate_hz: Option<f64>,
    /// Set when the short-time decay exponent −ln C ∝ t^p fits p ≈ 2
    /// (Gaussian-in-t behavior characteristic of 1/f noise).
    pub short_time_gaussian: Option<bool>,
    /// Eq.-4 prediction for the white component at the bias-point α;
    /// time-varying bias during shaped pulses would make t_φ pulse-dependent.
    pub white_rate_prediction_hz: f64,
}

/// Estimate coherence decay under `spec` for a VCO with tuning α.
/// `trials ≥ 100`; per-trial substreams derive deterministically from `seed`.
pub fn mc_coherence(
    vco: &VcoModel,
    spec: &NoiseSpectrum,
    t_total_s: f64,
    trials: u32,
    seed: u64,
) -> Result<CoherenceCurve> {
    spec.validate()?;
    if trials < 100 {
        return Err(Error::precondition(
            "trials >= 100",
            format!("got {trials}"),
        ));
    }
    if !(t_total_s > 0.0) {
        return Err(Error::config("total time must be positive".to_string()));
    }
    // Step must resolve the 1/f band when present.
    let mut n_steps = 512usize;
    if spec.has_one_over_f() {
        let need = (2.2 * spec.f_max * t_total_s).ceil() as usize;
        n_steps = n_steps.max(need);
    }
    let dt = t_total_s / n_steps as f64;
    let two_pi_alpha = 2.0 * std::f64::consts::PI * vco.alpha_hz_per_v;

    let mut sum_re = vec![0.0; n_steps + 1];
    let mut sum_im = vec![0.0; n_steps + 1];
    let mut sum_re2 = vec![0.0; n_steps + 1];
    let mut sum_im2 = vec![0.0; n_steps + 1];
    for trial in 0..trials {
        let sub_seed = seed
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(trial as u64);
        let v = generate_noise(spec, dt, n_steps, sub_seed)?;
        let mut phase = 0.0;
        sum_re[0] += 1.0;
        sum_re2[0] += 1.0;
        for (k, vk) in v.iter().enumerate() {
            phase += two_pi_alpha * vk * dt;
            let (s, c) = phase.sin_cos();
            sum_re[k + 1] += c;
            sum_im[k + 1] += s;
            sum_re2[k + 1] += c * c;
            sum_im2[k + 1] += s * s;
        }
    }
    let nt = trials as f64;
    let mut t_s = Vec::with_capacity(n_steps + 1);
    let mut coherence = Vec::with_capacity(n_steps + 1);
    let mut stderr = Vec::with_capacity(n_steps + 1);
    for k in 0..=n_steps {
        let mre = sum_re[k] / nt;
        let mim = sum_im[k] / nt;
        let var_re = (sum_re2[k] / nt - mre * mre).max(0.0);
        let var_im = (sum_im2[k] / nt - mim * mim).max(0.0);
        t_s.push(k as f64 * dt);
        coherence.push((mre * mre + mim * mim).sqrt());
        stderr.push(((var_re + var_im) / nt).sqrt());
    }

    let white_rate = dephasing_rate(vco.alpha_hz_per_v, spec.s_white);
    let fitted_rate_hz = fit_exponential_rate(&t_s, &coherence);
    let short_time_gaussian = if spec.has_one_over_f() && spec.s_white == 0.0 {
        Some(short_time_exponent(&t_s, &coherence).is_some_and(|p| (1.6..=2.4).contains(&p)))
    } else {
        None
    };
    Ok(CoherenceCurve {
        t_s,
        coherence,
        stderr,
        fitted_rate_hz,
        short_time_gaussian,
        white_rate_prediction_hz: white_rate,
    })
}

/// Least-squares slope of −ln C over the window C ∈ [0.2, 0.95].
fn fit_exponential_rate(t: &[f64], c: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = t
        .iter()
        .zip(c.iter())
        .filter(|(_, &ck)| ck > 0.2 && ck < 0.95)
        .map(|(&tk, &ck)| (tk, -ck.ln()))
        .collect();
    if pts.len() < 8 {
        return None;
    }
    // Through-origin fit: rate = Σ t·y / Σ t².
    let num: f64 = pts.iter().map(|(x, y)| x * y).sum();
    let den: f64 = pts.iter().map(|(x, _)| x * x).sum();
    (den > 0.0).then(|| num / den)
}

/// Log-log slope p of −ln C ∝ t^p over the early decay (−ln C ∈ [1e-3, 0.5]).
fn short_time_exponent(t: &[f64], c: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = t
        .iter()
        .zip(c.iter())
        .skip(1)
        .filter(|(_, &ck)| ck < (-1e-3f64).exp() && ck > (-0.5f64).exp())
        .map(|(&tk, &ck)| (tk.ln(), (-ck.ln()).ln()))
        .collect();
    if pts.len() < 6 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_reference_value() {
        // α = 100 MHz/V on 50 Ω Johnson noise: π²·10⁻² ≈ 0.0987 s⁻¹.
        let r = dephasing_rate(1e8, 1e-18);
        let expect = std::f64::consts::PI.powi(2) * 1e-2;
        assert!((r - expect).abs() < 1e-15);
        assert!((r - 0.1).abs() < 0.05, "within rounding of 0.1 s⁻¹");
        assert_eq!(dephasing_rate(0.0, 1e-18), 0.0);
    }

    #[test]
    fn rate_scalings() {
        let base = dephasing_rate(2e8, 3e-18);
        assert!((dephasing_rate(2e8, 12e-18) / base - 4.0).abs() < 1e-12);
        assert!((dephasing_rate(4e8, 3e-18) / base - 4.0).abs() < 1e-12);
    }

    #[test]
    fn white_sample_variance() {
        let spec = NoiseSpectrum::white(1e-18);
        let dt = 1e-6;
        let v = generate_noise(&spec, dt, 1_000_000, 11).unwrap();
        let var: f64 = v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64;
        let expect = spec.s_white / (2.0 * dt);
        assert!(
            (var / expect - 1.0).abs() < 0.05,
            "var {var} vs expected {expect}"
        );
    }

    #[test]
    fn zero_spectrum_zero_trace() {
        let spec = NoiseSpectrum::white(0.0);
        let v = generate_noise(&spec, 1e-6, 100, 5).unwrap();
        assert!(v.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn trace_deterministic_per_seed() {
        let spec = NoiseSpectrum {
            s_white: 1e-18,
            s_oneoverf_at_1hz: 1e-16,
            f_min: 10.0,
            f_max: 1e4,
        };
        let a = generate_noise(&spec, 1e-5, 4096, 123).unwrap();
        let b = generate_noise(&spec, 1e-5, 4096, 123).unwrap();
        assert_eq!(a, b);
        let c = generate_noise(&spec, 1e-5, 4096, 124).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn nyquist_guard() {
        let spec = NoiseSpectrum {
            s_white: 0.0,
            s_oneoverf_at_1hz: 1e-16,
            f_min: 1.0,
            f_max: 1e6,
        };
        // Nyquist at dt = 1e-5 is 5e4 < f_max.
        assert!(matches!(
            generate_noise(&spec, 1e-5, 100, 1),
            Err(Error::Precondition { .. })
        ));
    }

    #[test]
    fn periodogram_matches_white_level() {
        let spec = NoiseSpectrum::white(4e-12);
        let dt = 1e-4;
        let n = 4096;
        let mut acc: Option<Vec<(f64, f64)>> = None;
        let realizations = 120;
        for s in 0..realizations {
            let v = generate_noise(&spec, dt, n, 1000 + s).unwrap();
            let p = periodogram(&v, dt);
            acc = Some(match acc {
                None => p,
                Some(mut a) => {
                    for (ak, pk) in a.iter_mut().zip(p) {
                        ak.1 += pk.1;
                    }
                    a
                }
            });
        }
        let avg = acc.unwrap();
        // In-band average away from DC and Nyquist edges.
        let band: Vec<f64> = avg
            .iter()
            .filter(|(f, _)| *f > 100.0 && *f < 4000.0)
            .map(|(_, p)| *p / realizations as f64)
            .collect();
        let mean = band.iter().sum::<f64>() / band.len() as f64;
        assert!(
            (mean / spec.s_white - 1.0).abs() < 0.10,
            "mean PSD {mean} vs {}",
            spec.s_white
        );
    }

    #[test]
    fn periodogram_matches_one_over_f() {
        let spec = NoiseSpectrum {
            s_white: 0.0,
            s_oneoverf_at_1hz: 1e-10,
            f_min: 1.0,
            f_max: 2000.0,
        };
        let dt = 1e-4;
        let n = 8192;
        let realizations = 150;
        let mut sums: Vec<(f64, f64)> = Vec::new();
        for s in 0..realizations {
            let v = generate_noise(&spec, dt, n, 400 + s).unwrap();
            let p = periodogram(&v, dt);
            if sums.is_empty() {
                sums = p;
            } else {
                for (a, b) in sums.iter_mut().zip(p) {
                    a.1 += b.1;
                }
            }
        }
        // Compare octave-bin averages against the octave average of
        // S_1Hz/f, which is S_1Hz·ln2/f for the bin [f, 2f].
        let mut f = 8.0;
        while f < 400.0 {
            let (mut num, mut cnt) = (0.0, 0u32);
            for (fk, p) in &sums {
                if *fk >= f && *fk < 2.0 * f {
                    num += p / realizations as f64;
                    cnt += 1;
                }
            }
            let mean = num / cnt as f64;
            let target = spec.s_oneoverf_at_1hz * std::f64::consts::LN_2 / f;
            assert!(
                (mean / target - 1.0).abs() < 0.10,
                "octave at {f} Hz: {mean} vs {target}"
            );
            f *= 2.0;
        }
    }

    #[test]
    fn mc_white_matches_eq4() {
        // α rescaled so the decay completes in a fraction of a millisecond.
        let vco = VcoModel {
            alpha_hz_per_v: 1e13,
            base_frequency_hz: 0.0,
        };
        let spec = NoiseSpectrum::white(1e-18);
        let rate = dephasing_rate(vco.alpha_hz_per_v, spec.s_white);
        let t_total = 3.0 / rate;
        let curve = mc_coherence(&vco, &spec, t_total, 4000, 2024).unwrap();
        let fitted = curve.fitted_rate_hz.expect("fit window populated");
        assert!(
            (fitted / rate - 1.0).abs() < 0.05,
            "fitted {fitted} vs predicted {rate}"
        );
    }

    #[test]
    fn mc_zero_alpha_stays_coherent() {
        let vco = VcoModel {
            alpha_hz_per_v: 0.0,
            base_frequency_hz: 0.0,
        };
        let spec = NoiseSpectrum::white(1e-18);
        let curve = mc_coherence(&vco, &spec, 1e-3, 100, 3).unwrap();
        assert!(curve.coherence.iter().all(|&c| (c - 1.0).abs() < 1e-12));
    }

    #[test]
    fn mc_one_over_f_is_gaussian_not_exponential() {
        let vco = VcoModel {
            alpha_hz_per_v: 5e8,
            base_frequency_hz: 0.0,
        };
        let spec = NoiseSpectrum {
            s_white: 0.0,
            s_oneoverf_at_1hz: 1e-12,
            f_min: 10.0,
            f_max: 1e5,
        };
        let curve = mc_coherence(&vco, &spec, 2e-3, 400, 77).unwrap();
        assert_eq!(curve.short_time_gaussian, Some(true));
        // Non-exponential: with −ln C ∝ t² the effective rate −ln C / t
        // grows as the decay proceeds. Compare it where C first crosses
        // 0.8 and 0.3 (before the statistical floor).
        let idx_of = |level: f64| {
            curve
                .coherence
                .iter()
                .position(|&c| c < level)
                .expect("decay crosses level")
        };
        let k1 = idx_of(0.8);
        let k2 = idx_of(0.3);
        let r1 = -curve.coherence[k1].ln() / curve.t_s[k1];
        let r2 = -curve.coherence[k2].ln() / curve.t_s[k2];
        assert!(r2 > 1.4 * r1, "effective rate should grow: {r1} → {r2}");
    }

    #[test]
    fn mc_requires_trials() {
        let vco = VcoModel {
            alpha_hz_per_v: 1e8,
            base_frequency_hz: 0.0,
        };
        assert!(mc_coherence(&vco, &NoiseSpectrum::white(1e-18), 1.0, 10, 1).is_err());
    }

    #[test]
    fn coherence_bounded_and_monotone_within_noise() {
        let vco = VcoModel {
            alpha_hz_per_v: 1e13,
            base_frequency_hz: 0.0,
        };
        let spec = NoiseSpectrum::white(1e-18);
        let rate = dephasing_rate(vco.alpha_hz_per_v, spec.s_white);
        let curve = mc_coherence(&vco, &spec, 2.0 / rate, 2000, 5).unwrap();
        for (k, &c) in curve.coherence.iter().enumerate() {
            assert!((0.0..=1.0 + 1e-12).contains(&c));
            if k > 0 {
                assert!(
                    c <= curve.coherence[k - 1] + 5.0 * curve.stderr[k] + 5e-3,
                    "non-monotone beyond noise at k = {k}"
                );
            }
        }
    }
}
