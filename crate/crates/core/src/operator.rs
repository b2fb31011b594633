//! Dense complex operators on the 4- and 16-dimensional spin spaces.
//!
//! Hamiltonians are stored in frequency units (H/h, Hz). The eigensolver
//! applies a deterministic convention so that spectra and golden files are
//! reproducible: eigenvalues ascend, degenerate subspaces are rotated onto
//! the projections of the standard basis, and each eigenvector is phased so
//! its largest-magnitude component is real and positive.

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Pauli σ_x (eigenvalues ±1).
pub fn pauli_x() -> Matrix2<C64> {
    Matrix2::new(ZERO, ONE, ONE, ZERO)
}

/// Pauli σ_y (eigenvalues ±1).
pub fn pauli_y() -> Matrix2<C64> {
    Matrix2::new(ZERO, C64::new(0.0, -1.0), C64::new(0.0, 1.0), ZERO)
}

/// Pauli σ_z (eigenvalues ±1), |↑⟩ first.
pub fn pauli_z() -> Matrix2<C64> {
    Matrix2::new(ONE, ZERO, ZERO, -ONE)
}

pub fn identity2() -> Matrix2<C64> {
    Matrix2::identity()
}

/// Kronecker product of a list of 2×2 factors, slowest index first.
pub fn kron_all(factors: &[Matrix2<C64>]) -> DMatrix<C64> {
    let mut out = DMatrix::<C64>::identity(1, 1);
    for f in factors {
        let fd: DMatrix<C64> = DMatrix::from_iterator(2, 2, f.iter().cloned());
        out = out.kronecker(&fd);
    }
    out
}

/// Dense complex operator on a spin Hilbert space of dimension 4 or 16.
///
/// Entries of Hamiltonians are in Hz (E/h).
#[derive(Debug, Clone, PartialEq)]
pub struct SpinOperator {
    mat: DMatrix<C64>,
}

impl SpinOperator {
    /// Wrap a square matrix of supported dimension (4 or 16).
    pub fn from_matrix(mat: DMatrix<C64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::config(format!(
                "operator must be square, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let d = mat.nrows();
        if d != 4 && d != 16 {
            return Err(Error::config(format!(
                "operator dimension must be 4 or 16, got {d}"
            )));
        }
        Ok(SpinOperator { mat })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    /// Relative deviation from Hermiticity, ‖H − H†‖ / max(‖H‖, 1).
    pub fn hermiticity_defect(&self) -> f64 {
        let adj = self.mat.adjoint();
        let diff = &self.mat - &adj;
        diff.norm() / self.mat.norm().max(1.0)
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.hermiticity_defect() < rel_tol
    }

    /// ‖U†U − I‖ for unitarity checks.
    pub fn unitarity_defect(&self) -> f64 {
        let d = self.dim();
        let prod = self.mat.adjoint() * &self.mat;
        (prod - DMatrix::<C64>::identity(d, d)).norm()
    }

    pub fn trace_re(&self) -> f64 {
        self.mat.trace().re
    }
}

impl Serialize for SpinOperator {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let d = self.dim();
        let re: Vec<Vec<f64>> = (0..d)
            .map(|i| (0..d).map(|j| self.mat[(i, j)].re).collect())
            .collect();
        let im: Vec<Vec<f64>> = (0..d)
            .map(|i| (0..d).map(|j| self.mat[(i, j)].im).collect())
            .collect();
        let mut s = serializer.serialize_struct("SpinOperator", 3)?;
        s.serialize_field("dim", &d)?;
        s.serialize_field("re", &re)?;
        s.serialize_field("im", &im)?;
        s.end()
    }
}

/// Eigen-decomposition of a Hermitian spin operator.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Eigen-frequencies in ascending order (Hz).
    pub levels: Vec<f64>,
    /// Eigenvectors as matrix columns, same order as `levels`.
    pub states: DMatrix<C64>,
    /// Adiabatic state labels; filled by physics-level wrappers, index
    /// strings (`"e0"`, ...) by default.
    pub labels: Vec<String>,
}

impl Spectrum {
    /// Column view of eigenvector `k`.
    pub fn state(&self, k: usize) -> DVector<C64> {
        DVector::from_iterator(self.states.nrows(), self.states.column(k).iter().cloned())
    }

    /// Σ levels − tr(H), relative to the operator scale.
    pub fn trace_defect(&self, h: &SpinOperator) -> f64 {
        let sum: f64 = self.levels.iter().sum();
        let tr = h.trace_re();
        (sum - tr).abs() / h.matrix().norm().max(1.0)
    }
}

/// Hermiticity tolerance for eigensystem input (relative).
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Diagonalize a Hermitian operator with deterministic conventions.
///
/// Rejects non-Hermitian input. Eigenvalues are ascending; within a
/// degenerate cluster the eigenbasis is re-built from projections of the
/// standard basis vectors (Gram–Schmidt, honoring basis order) and each
/// eigenvector is phased so its largest-magnitude component is real positive.
pub fn eigensystem(h: &SpinOperator) -> Result<Spectrum> {
    if !h.is_hermitian(HERMITICITY_TOL) {
        return Err(Error::precondition(
            "H = H†",
            format!(
                "operator is not Hermitian (relative defect {:.3e})",
                h.hermiticity_defect()
            ),
        ));
    }
    let d = h.dim();
    // Symmetrize to suppress roundoff asymmetry before decomposing.
    let sym = (h.matrix() + h.matrix().adjoint()) * C64::new(0.5, 0.0);
    let eig = nalgebra::linalg::SymmetricEigen::new(sym);

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let levels: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut states = DMatrix::<C64>::zeros(d, d);
    for (col, &k) in order.iter().enumerate() {
        states.set_column(col, &eig.eigenvectors.column(k));
    }

    canonicalize_degenerate(&mut states, &levels, h.matrix().norm());
    fix_phases(&mut states);

    let labels = (0..d).map(|k| format!("e{k}")).collect();
    Ok(Spectrum {
        levels,
        states,
        labels,
    })
}

/// Rotate each degenerate cluster onto Gram–Schmidt-ed projections of the
/// standard basis so the returned basis does not depend on solver internals.
fn canonicalize_degenerate(states: &mut DMatrix<C64>, levels: &[f64], scale: f64) {
    let d = states.nrows();
    let tol = 1e-8 * scale.max(1e-300);
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && (levels[end] - levels[end - 1]).abs() <= tol {
            end += 1;
        }
        let m = end - start;
        if m > 1 {
            // Projector onto the cluster subspace.
            let sub = states.columns(start, m).into_owned();
            let mut chosen: Vec<DVector<C64>> = Vec::with_capacity(m);
            for j in 0..d {
                if chosen.len() == m {
                    break;
                }
                // P e_j = sub (sub† e_j)
                let coeffs = sub.adjoint().column(j).into_owned();
                let mut w = &sub * coeffs;
                for c in &chosen {
                    let ip: C64 = c.iter().zip(w.iter()).map(|(a, b)| a.conj() * b).sum();
                    w -= c * ip;
                }
                let n = w.norm();
                if n > 1e-6 {
                    chosen.push(w / C64::new(n, 0.0));
                }
            }
            if chosen.len() == m {
                for (idx, v) in chosen.iter().enumerate() {
                    states.set_column(start + idx, v);
                }
            }
        }
        start = end;
    }
}

/// Phase convention: largest-magnitude component real positive; the first
/// strict maximum wins ties deterministically.
fn fix_phases(states: &mut DMatrix<C64>) {
    let d = states.nrows();
    for col in 0..d {
        let mut best = 0;
        let mut best_mag = 0.0;
        for i in 0..d {
            let mag = states[(i, col)].norm();
            if mag > best_mag {
                best_mag = mag;
                best = i;
            }
        }
        if best_mag > 0.0 {
            let phase = states[(best, col)] / C64::new(best_mag, 0.0);
            let corr = phase.conj();
            for i in 0..d {
                states[(i, col)] *= corr;
            }
        }
    }
}

/// exp(−i 2π H t) for Hermitian `h` (Hz) over `t` seconds, via the
/// eigendecomposition so the result is unitary to machine precision.
pub fn expm_hermitian(h: &DMatrix<C64>, t_s: f64) -> DMatrix<C64> {
    let d = h.nrows();
    let sym = (h + h.adjoint()) * C64::new(0.5, 0.0);
    let eig = nalgebra::linalg::SymmetricEigen::new(sym);
    let mut out = DMatrix::<C64>::zeros(d, d);
    for k in 0..d {
        let lam = eig.eigenvalues[k];
        let phase = C64::from_polar(1.0, -2.0 * std::f64::consts::PI * lam * t_s);
        let v = eig.eigenvectors.column(k);
        for i in 0..d {
            for j in 0..d {
                out[(i, j)] += v[i] * v[j].conj() * phase;
            }
        }
    }
    out
}
