//! The linear system behind the necessity direction of the orthonormality
//! criterion. Its matrix is `p^{-sN}` times the character table of
//! `(Z_p)^{sN}`, which is the `sN`-fold Kronecker power of the DFT
//! (Vandermonde) matrix `V_{jk} = exp(2 pi i jk / p)`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::characters::root_of_unity;
use crate::error::{Error, Result};
use crate::formats::{fmt_f64, KeyValueReport};
use crate::galois_field::{is_prime, GaloisField};
use crate::window::Window;

/// Largest Kronecker power dimension handled by default (`3^6`).
pub const DEFAULT_KRON_CAP: usize = 729;

pub fn dft_matrix(p: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(p, p, |j, k| root_of_unity(p as u32, ((j * k) % p) as u32))
}

/// `base ⊗ base ⊗ ... ⊗ base` (`times` factors; the 1x1 identity for 0).
pub fn kron_power(base: &DMatrix<Complex64>, times: usize) -> DMatrix<Complex64> {
    let mut out = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
    for _ in 0..times {
        out = out.kronecker(base);
    }
    out
}

fn unitarity_dev(m: &DMatrix<Complex64>) -> f64 {
    let g = m * m.adjoint();
    let n = g.nrows();
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| {
            let target = if i == j { 1.0 } else { 0.0 };
            (g[(i, j)] - Complex64::new(target, 0.0)).norm()
        })
        .fold(0.0, f64::max)
}

/// `log |det|` and the smallest pivot modulus from an LU factorization.
fn log_abs_det(m: &DMatrix<Complex64>) -> (f64, f64) {
    let lu = m.clone().lu();
    let u = lu.u();
    let diag = u.diagonal();
    let log = diag.iter().map(|d| d.norm().ln()).sum();
    let min = diag.iter().map(|d| d.norm()).fold(f64::INFINITY, f64::min);
    (log, min)
}

#[derive(Clone, Debug, PartialEq)]
pub struct VandermondeReport {
    pub p: u32,
    pub s: usize,
    pub n: usize,
    /// `p^{sN}`.
    pub dimension: usize,
    /// `max |(W W^*) - I|` for `W = V / sqrt(p)`.
    pub dft_unitary_deviation: f64,
    /// Same for `V^{⊗sN} / p^{sN/2}`.
    pub kron_unitary_deviation: f64,
    /// `max |A - p^{-sN} V^{⊗sN}|` where `A` is assembled from the field's
    /// coordinate scalar products over `(a_{-N}, ..., a_{-1})`.
    pub system_matrix_deviation: f64,
    pub log_abs_det_v: f64,
    pub log_abs_det_kron: f64,
    /// `log |det V^{⊗k}|` predicted by `det(A ⊗ B) = det(A)^m det(B)^n`.
    pub expected_log_abs_det_kron: f64,
    pub relative_det_error: f64,
    pub min_pivot: f64,
}

impl VandermondeReport {
    pub fn nonsingular(&self) -> bool {
        self.min_pivot > 0.0
    }

    pub fn to_kv(&self) -> KeyValueReport {
        let mut r = KeyValueReport::default();
        r.push("p", self.p);
        r.push("s", self.s);
        r.push("N", self.n);
        r.push("dimension", self.dimension);
        r.push("dft_unitary_deviation", fmt_f64(self.dft_unitary_deviation));
        r.push("kron_unitary_deviation", fmt_f64(self.kron_unitary_deviation));
        r.push("system_matrix_deviation", fmt_f64(self.system_matrix_deviation));
        r.push("log_abs_det_v", fmt_f64(self.log_abs_det_v));
        r.push("log_abs_det_kron", fmt_f64(self.log_abs_det_kron));
        r.push("expected_log_abs_det_kron", fmt_f64(self.expected_log_abs_det_kron));
        r.push("relative_det_error", fmt_f64(self.relative_det_error));
        r.push("min_pivot", fmt_f64(self.min_pivot));
        r.push("nonsingular", self.nonsingular());
        r
    }
}

/// `log |det(base^{⊗k})|` from `log |det base|` by repeated use of
/// `det(X ⊗ base) = det(X)^dim(base) det(base)^dim(X)`.
fn kron_log_det(log_det_base: f64, dim: usize, k: usize) -> f64 {
    let mut log = 0.0;
    let mut size = 1usize;
    for _ in 0..k {
        log = dim as f64 * log + size as f64 * log_det_base;
        size *= dim;
    }
    log
}

pub fn vandermonde_kron_check(p: u32, s: usize, n: usize, cap: usize) -> Result<VandermondeReport> {
    if !is_prime(p) {
        return Err(Error::Configuration(format!("p = {p} is not prime")));
    }
    let k = s * n;
    let dimension = (p as usize)
        .checked_pow(k as u32)
        .filter(|&d| d <= cap)
        .ok_or(Error::Size { size: (p as usize).saturating_pow(k as u32), cap })?;
    let v = dft_matrix(p as usize);
    let dft_unitary_deviation = unitarity_dev(&(&v / Complex64::new((p as f64).sqrt(), 0.0)));
    let kron = kron_power(&v, k);
    let kron_unitary_deviation = unitarity_dev(&(&kron / Complex64::new((dimension as f64).sqrt(), 0.0)));

    let gf = GaloisField::additive(p, s)?;
    let q = gf.order();
    let window = Window::new(-(n as i32), 0)?;
    let scale = 1.0 / dimension as f64;
    let mut system_matrix_deviation: f64 = 0.0;
    for h in 0..dimension {
        let hd = window.decode(h, q);
        for a in 0..dimension {
            let ad = window.decode(a, q);
            let e = hd.iter().zip(&ad).fold(0, |acc, (&x, &y)| (acc + gf.dot_idx(x, y)) % p);
            let entry = root_of_unity(p, e) * scale;
            system_matrix_deviation = system_matrix_deviation.max((entry - kron[(h, a)] * scale).norm());
        }
    }

    let (log_abs_det_v, _) = log_abs_det(&v);
    let (log_abs_det_kron, min_pivot) = log_abs_det(&kron);
    let expected = kron_log_det(log_abs_det_v, p as usize, k);
    let relative_det_error =
        if expected == 0.0 { log_abs_det_kron.abs() } else { ((log_abs_det_kron - expected) / expected).abs() };
    Ok(VandermondeReport {
        p,
        s,
        n,
        dimension,
        dft_unitary_deviation,
        kron_unitary_deviation,
        system_matrix_deviation,
        log_abs_det_v,
        log_abs_det_kron,
        expected_log_abs_det_kron: expected,
        relative_det_error,
        min_pivot,
    })
}
