//! Completion of a scaling mask to a family of wavelet masks, and wavelet
//! synthesis.
//!
//! For every prefix `(a_{-N}, ..., a_{-1})` the values `m^(0)(prefix, a_0)`
//! form the first row of a `p^s x p^s` matrix. The remaining rows are seeded
//! with coordinate vectors, Gram-Schmidt makes the matrix unitary, and row `l`
//! is read off as the values of `m^(l)` at that prefix. The wavelets are then
//! `psi_hat^(l)(chi) = m^(l)(chi) phi_hat(chi A^{-1})`.

mod vandermonde;
mod verify;

use std::sync::Arc;

use num_complex::Complex64;

pub use vandermonde::{dft_matrix, kron_power, vandermonde_kron_check, VandermondeReport, DEFAULT_KRON_CAP};
pub use verify::{verify_wavelet_system, VerifyReport};

use crate::error::{Error, Result};
use crate::galois_field::GaloisField;
use crate::mra_masks::{Mask, DEFAULT_TOLERANCE};
use crate::step_functions::{DualStepFunction, StepFunction};
use crate::window::Window;

/// Mask values at or below this modulus count as zero when seeding.
pub const ZERO_EPS: f64 = 1e-12;

/// Projection coefficient above which a second Gram-Schmidt pass is run.
const REORTH_COEFF: f64 = 0.7;

#[derive(Clone, Debug, PartialEq)]
pub struct CompletionMatrix {
    /// Prefix index; its digits are `a_{-N}, ..., a_{-1}`.
    pub prefix: usize,
    pub prefix_text: String,
    pub dim: usize,
    /// Row-major: row `l`, column `a_0`.
    pub entries: Vec<Complex64>,
}

impl CompletionMatrix {
    pub fn row(&self, l: usize) -> &[Complex64] {
        &self.entries[l * self.dim..(l + 1) * self.dim]
    }

    pub fn row_mut(&mut self, l: usize) -> &mut [Complex64] {
        &mut self.entries[l * self.dim..(l + 1) * self.dim]
    }

    /// `max |(M M^*)_{kl} - delta_{kl}|`.
    pub fn unitarity_deviation(&self) -> f64 {
        unitarity_deviation(&self.entries, self.dim)
    }
}

pub fn unitarity_deviation(entries: &[Complex64], dim: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for k in 0..dim {
        for l in 0..dim {
            let g: Complex64 = (0..dim).map(|j| entries[k * dim + j] * entries[l * dim + j].conj()).sum();
            let target = if k == l { 1.0 } else { 0.0 };
            worst = worst.max((g - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// Step 1: the first row holds `m^(0)` at the prefix. If `m^(0)(prefix, 0)`
/// is nonzero the other rows are the coordinate vectors `e_l`; otherwise the
/// smallest `j` with `m^(0)(prefix, j) != 0` gets `e_0` in row `j` and the
/// remaining rows keep `e_l`.
pub fn seed_matrix(m0: &Mask, prefix: usize) -> Result<CompletionMatrix> {
    let q = m0.gf().order();
    let first = m0.row(prefix);
    let mut entries = vec![Complex64::new(0.0, 0.0); q * q];
    entries[..q].copy_from_slice(first);
    let one = Complex64::new(1.0, 0.0);
    let pivot = if first[0].norm() > ZERO_EPS {
        0
    } else {
        (1..q)
            .find(|&j| first[j].norm() > ZERO_EPS)
            .ok_or_else(|| Error::InvalidMask { prefix: m0.prefix_text(prefix) })?
    };
    for l in 1..q {
        let col = if l == pivot { 0 } else { l };
        entries[l * q + col] = one;
    }
    Ok(CompletionMatrix { prefix, prefix_text: m0.prefix_text(prefix), dim: q, entries })
}

/// Step 2: classical Gram-Schmidt over rows `1, 2, ...`; row 0 is left as is.
/// A row gets a second pass when a projection coefficient exceeds 0.7 in
/// modulus or the first pass removes most of its norm.
pub fn unitarize(matrix: &CompletionMatrix) -> Result<CompletionMatrix> {
    unitarize_with(matrix, DEFAULT_TOLERANCE)
}

/// [`unitarize`] with an explicit bound on `| |row 0| - 1 |`; pass
/// `f64::INFINITY` to complete rows of a mask that is not normalized.
pub fn unitarize_with(matrix: &CompletionMatrix, row0_tolerance: f64) -> Result<CompletionMatrix> {
    let dim = matrix.dim;
    let norm0 = row_norm(matrix.row(0));
    if (norm0 - 1.0).abs() > row0_tolerance {
        return Err(Error::Precondition(format!(
            "row 0 of the completion matrix at prefix [{}] has norm {norm0}, expected 1",
            matrix.prefix_text
        )));
    }
    let mut out = matrix.clone();
    for l in 1..dim {
        let before = row_norm(out.row(l));
        for pass in 0..2 {
            let coeffs: Vec<Complex64> = (0..l)
                .map(|k| {
                    let u = out.row(k);
                    let v = out.row(l);
                    let dot: Complex64 = v.iter().zip(u).map(|(a, b)| a * b.conj()).sum();
                    dot / u.iter().map(|x| x.norm_sqr()).sum::<f64>()
                })
                .collect();
            for (k, c) in coeffs.iter().enumerate() {
                let u: Vec<Complex64> = out.row(k).to_vec();
                for (v, uk) in out.row_mut(l).iter_mut().zip(&u) {
                    *v -= c * uk;
                }
            }
            let after = row_norm(out.row(l));
            let needs_second = coeffs.iter().any(|c| c.norm() > REORTH_COEFF) || after < REORTH_COEFF * before;
            if pass == 0 && !needs_second {
                break;
            }
        }
        let norm = row_norm(out.row(l));
        if norm < 1e-12 {
            return Err(Error::DependentRows { prefix: matrix.prefix_text.clone(), row: l });
        }
        out.row_mut(l).iter_mut().for_each(|v| *v /= norm);
    }
    Ok(out)
}

fn row_norm(row: &[Complex64]) -> f64 {
    row.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Seeded and unitarized matrices for every prefix, in prefix order.
pub fn completion_matrices(m0: &Mask) -> Result<Vec<CompletionMatrix>> {
    (0..m0.prefix_count()).map(|prefix| unitarize(&seed_matrix(m0, prefix)?)).collect()
}

/// Step 3: reads row `l` of each completion matrix into `m^(l)`. Entry 0 of
/// the result is the scaling mask itself.
pub fn masks_from_matrices(m0: &Mask, matrices: &[CompletionMatrix]) -> Result<Vec<Mask>> {
    let q = m0.gf().order();
    if matrices.len() != m0.prefix_count() || matrices.iter().any(|m| m.dim != q) {
        return Err(Error::Parameter("completion matrices do not match the mask shape".into()));
    }
    let mut masks: Vec<Mask> = (0..q).map(|_| Mask::zeros(m0.gf().clone(), m0.n())).collect();
    masks[0] = m0.clone();
    for (prefix, matrix) in matrices.iter().enumerate() {
        for (l, mask) in masks.iter_mut().enumerate().skip(1) {
            mask.row_mut(prefix).copy_from_slice(matrix.row(l));
        }
    }
    Ok(masks)
}

pub fn derive_wavelet_masks(m0: &Mask) -> Result<Vec<Mask>> {
    masks_from_matrices(m0, &completion_matrices(m0)?)
}

/// A scaling function with its wavelets.
#[derive(Clone, Debug)]
pub struct WaveletSystem {
    /// `m^(0), m^(1), ..., m^(p^s - 1)`.
    pub masks: Vec<Mask>,
    pub phi_hat: DualStepFunction,
    pub phi: StepFunction,
    /// `psi_hat^(l)` for `l = 1, ..., p^s - 1`, on the window `-N..M+1`.
    pub psi_hats: Vec<DualStepFunction>,
    pub wavelets: Vec<StepFunction>,
}

impl WaveletSystem {
    pub fn gf(&self) -> &Arc<GaloisField> {
        self.masks[0].gf()
    }

    pub fn n(&self) -> usize {
        self.masks[0].n()
    }

    /// The frequency level `M` of `phi_hat`.
    pub fn m_level(&self) -> usize {
        self.phi_hat.window().hi as usize
    }

    pub fn scaling_mask(&self) -> &Mask {
        &self.masks[0]
    }

    pub fn wavelet_masks(&self) -> &[Mask] {
        &self.masks[1..]
    }

    /// `phi` followed by the wavelets: the functions `psi^(0), ..., psi^(p^s-1)`.
    pub fn functions(&self) -> Vec<&StepFunction> {
        std::iter::once(&self.phi).chain(&self.wavelets).collect()
    }
}

/// `m(chi) phi_hat(chi A^{-1})` on the window `-N..M+1`.
pub fn apply_mask(mask: &Mask, phi_hat: &DualStepFunction) -> Result<DualStepFunction> {
    let n = mask.n();
    let pw = phi_hat.window();
    if mask.gf() != phi_hat.gf() || pw.lo != -(n as i32) || pw.hi < 0 {
        return Err(Error::Parameter(format!(
            "mask of depth {n} does not match phi_hat on window {}..{}",
            pw.lo, pw.hi
        )));
    }
    let gf = mask.gf().clone();
    let q = gf.order();
    let window = Window::new(pw.lo, pw.hi + 1)?;
    let mw = mask.window();
    Ok(DualStepFunction::from_fn(gf, window, |a| {
        // a[t] is the exponent at level -N + t; chi A^{-1} moves a[t + 1] to level -N + t
        let m = mask.values()[mw.encode(&a[..=n], q)];
        if m == Complex64::new(0.0, 0.0) {
            return m;
        }
        m * phi_hat.values()[pw.encode(&a[1..], q)]
    }))
}

/// Step 4: builds `psi_hat^(l)` for `l != 0` and inverts the transforms.
pub fn synthesize_wavelets(masks: &[Mask], phi_hat: &DualStepFunction) -> Result<WaveletSystem> {
    let q = phi_hat.gf().order();
    if masks.len() != q {
        return Err(Error::Parameter(format!("expected {q} masks, got {}", masks.len())));
    }
    let n = masks[0].n();
    if masks.iter().any(|m| m.n() != n || m.gf() != phi_hat.gf()) {
        return Err(Error::Parameter("masks must share p, s and N with phi_hat".into()));
    }
    let psi_hats = masks[1..].iter().map(|m| apply_mask(m, phi_hat)).collect::<Result<Vec<_>>>()?;
    let wavelets = psi_hats.iter().map(|g| g.inv_fourier()).collect();
    Ok(WaveletSystem {
        masks: masks.to_vec(),
        phi_hat: phi_hat.clone(),
        phi: phi_hat.inv_fourier(),
        psi_hats,
        wavelets,
    })
}
