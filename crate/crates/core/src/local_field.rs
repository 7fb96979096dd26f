//! The local field F^(s) as two-sided digit sequences over GF(p^s).
//!
//! An element `sum_k a_k g_k` is stored as a finite window of coefficients
//! starting at its lowest nonzero index. `F_n` is the ball of elements with
//! all coefficients below `n` equal to zero; `g_k` is the sequence with the
//! unit of GF(p^s) at index `k`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::galois_field::{GaloisField, GfElement};
use crate::window::Window;

/// A normalized element of F^(s): either zero (no coefficients) or a window
/// whose first and last coefficients are nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentElement {
    start: i32,
    coeffs: Vec<GfElement>,
}

impl LaurentElement {
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Index of the lowest nonzero coefficient (0 for the zero element).
    pub fn start(&self) -> i32 {
        self.start
    }

    /// One past the highest nonzero coefficient.
    pub fn end(&self) -> i32 {
        self.start + self.coeffs.len() as i32
    }

    pub fn coeffs(&self) -> &[GfElement] {
        &self.coeffs
    }

    /// Field index of the coefficient at `k` (zero outside the stored window).
    pub fn coeff_index(&self, k: i32) -> usize {
        if k < self.start || k >= self.end() {
            0
        } else {
            self.coeffs[(k - self.start) as usize].index()
        }
    }

    /// Membership in the subgroup `F_n`.
    pub fn in_ball(&self, n: i32) -> bool {
        self.is_zero() || self.start >= n
    }

    /// Coefficient indices for the levels of `window`. Coefficients above the
    /// window are dropped; a nonzero coefficient below it is a window error.
    pub fn window_digits(&self, window: Window) -> Result<Vec<usize>> {
        if !self.in_ball(window.lo) {
            return Err(Error::Window(format!(
                "element has a nonzero coefficient at index {} below level {}",
                self.start, window.lo
            )));
        }
        Ok((window.lo..window.hi).map(|k| self.coeff_index(k)).collect())
    }

    /// `"start=n; digits=[d0 d1;d0 d1;...]"`.
    pub fn to_text(&self) -> String {
        let digits: Vec<String> = self.coeffs.iter().map(|c| c.to_text()).collect();
        format!("start={}; digits=[{}]", self.start, digits.join(";"))
    }
}

impl fmt::Display for LaurentElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// The shift set `H_0^(k) = { a_{-1} g_{-1} + ... + a_{-k} g_{-k} }`.
#[derive(Clone, Debug)]
pub struct ShiftSet {
    pub depth: usize,
    pub elements: Vec<LaurentElement>,
}

impl ShiftSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Arithmetic in F^(s) over a fixed GF(p^s).
#[derive(Clone, Debug)]
pub struct LocalField {
    gf: Arc<GaloisField>,
}

impl LocalField {
    pub fn new(gf: Arc<GaloisField>) -> Self {
        Self { gf }
    }

    pub fn gf(&self) -> &Arc<GaloisField> {
        &self.gf
    }

    pub fn zero(&self) -> LaurentElement {
        LaurentElement { start: 0, coeffs: Vec::new() }
    }

    /// The basis element `g_k`, which is also `t^k`; `g_0` is the unit.
    pub fn basis(&self, k: i32) -> LaurentElement {
        LaurentElement { start: k, coeffs: vec![self.gf.one()] }
    }

    /// Builds and normalizes an element from coefficients at `start, start+1, ...`.
    pub fn element(&self, start: i32, coeffs: Vec<GfElement>) -> Result<LaurentElement> {
        for &c in &coeffs {
            self.gf.index(c)?;
        }
        Ok(normalize(start, coeffs))
    }

    pub fn from_indices(&self, start: i32, indices: &[usize]) -> Result<LaurentElement> {
        let coeffs = indices.iter().map(|&i| self.gf.from_index(i)).collect::<Result<Vec<_>>>()?;
        Ok(normalize(start, coeffs))
    }

    pub fn parse(&self, text: &str) -> Result<LaurentElement> {
        let bad = |m: &str| Error::Parameter(format!("bad field element {text:?}: {m}"));
        let (start_part, digits_part) = text.split_once(';').ok_or_else(|| bad("missing ';'"))?;
        let start = start_part
            .trim()
            .strip_prefix("start=")
            .ok_or_else(|| bad("missing start="))?
            .trim()
            .parse::<i32>()
            .map_err(|e| bad(&e.to_string()))?;
        let body = digits_part
            .trim()
            .strip_prefix("digits=[")
            .and_then(|b| b.strip_suffix(']'))
            .ok_or_else(|| bad("missing digits=[...]"))?;
        let coeffs = if body.trim().is_empty() {
            Vec::new()
        } else {
            body.split(';').map(|t| self.gf.parse_element(t)).collect::<Result<Vec<_>>>()?
        };
        self.element(start, coeffs)
    }

    fn zip_with(&self, a: &LaurentElement, b: &LaurentElement, op: impl Fn(usize, usize) -> usize) -> LaurentElement {
        if a.is_zero() && b.is_zero() {
            return self.zero();
        }
        let lo = match (a.is_zero(), b.is_zero()) {
            (true, _) => b.start,
            (_, true) => a.start,
            _ => a.start.min(b.start),
        };
        let hi = a.end().max(b.end());
        let coeffs = (lo..hi).map(|k| self.elem(op(a.coeff_index(k), b.coeff_index(k)))).collect();
        normalize(lo, coeffs)
    }

    fn elem(&self, index: usize) -> GfElement {
        self.gf.from_index(index).expect("table index in range")
    }

    pub fn add(&self, a: &LaurentElement, b: &LaurentElement) -> LaurentElement {
        self.zip_with(a, b, |x, y| self.gf.add_idx(x, y))
    }

    pub fn sub(&self, a: &LaurentElement, b: &LaurentElement) -> LaurentElement {
        self.zip_with(a, b, |x, y| self.gf.sub_idx(x, y))
    }

    pub fn neg(&self, a: &LaurentElement) -> LaurentElement {
        let coeffs = a.coeffs.iter().map(|c| self.elem(self.gf.neg_idx(c.index()))).collect();
        normalize(a.start, coeffs)
    }

    /// Cauchy product of the coefficient sequences.
    pub fn mul(&self, a: &LaurentElement, b: &LaurentElement) -> Result<LaurentElement> {
        if !self.gf.has_mul() {
            return Err(Error::Configuration("no reduction polynomial configured for multiplication".into()));
        }
        if a.is_zero() || b.is_zero() {
            return Ok(self.zero());
        }
        let mut out = vec![0usize; a.coeffs.len() + b.coeffs.len() - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            for (j, y) in b.coeffs.iter().enumerate() {
                let prod = self.gf.mul_idx(x.index(), y.index());
                out[i + j] = self.gf.add_idx(out[i + j], prod);
            }
        }
        let coeffs = out.into_iter().map(|i| self.elem(i)).collect();
        Ok(normalize(a.start + b.start, coeffs))
    }

    /// Coordinatewise product `lambda * a`.
    pub fn scalar_mul(&self, lambda: GfElement, a: &LaurentElement) -> Result<LaurentElement> {
        let l = self.gf.index(lambda)?;
        if !self.gf.has_mul() {
            return Err(Error::Configuration("no reduction polynomial configured for multiplication".into()));
        }
        let coeffs = a.coeffs.iter().map(|c| self.elem(self.gf.mul_idx(l, c.index()))).collect();
        Ok(normalize(a.start, coeffs))
    }

    /// `||a|| = p^(-s n)` where `n` is the index of the leading coefficient;
    /// `||0|| = 0`.
    pub fn norm(&self, a: &LaurentElement) -> f64 {
        match self.norm_exponent(a) {
            None => 0.0,
            Some(e) => (self.gf.p() as f64).powi(e as i32),
        }
    }

    /// The exponent `-s n` of `p` in the norm, `None` for zero.
    pub fn norm_exponent(&self, a: &LaurentElement) -> Option<i64> {
        (!a.is_zero()).then(|| -(self.gf.s() as i64) * a.start as i64)
    }

    /// The dilation `A(sum a_n g_n) = sum a_n g_{n-1}`.
    pub fn dilate(&self, x: &LaurentElement) -> LaurentElement {
        self.shift_indices(x, -1)
    }

    pub fn dilate_inv(&self, x: &LaurentElement) -> LaurentElement {
        self.shift_indices(x, 1)
    }

    fn shift_indices(&self, x: &LaurentElement, by: i32) -> LaurentElement {
        if x.is_zero() {
            return self.zero();
        }
        LaurentElement { start: x.start + by, coeffs: x.coeffs.clone() }
    }

    /// All `p^(s k)` elements of `H_0^(k)`, with `a_{-1}` varying fastest.
    pub fn enumerate_shifts(&self, depth: usize) -> Result<ShiftSet> {
        if depth == 0 {
            return Err(Error::Parameter("shift depth must be at least 1".into()));
        }
        let window = Window::new(-(depth as i32), 0)?;
        let q = self.gf.order();
        let elements = (0..window.size(q))
            .map(|idx| self.from_indices(window.lo, &window.decode(idx, q)))
            .collect::<Result<Vec<_>>>()?;
        Ok(ShiftSet { depth, elements })
    }
}

fn normalize(start: i32, coeffs: Vec<GfElement>) -> LaurentElement {
    let first = coeffs.iter().position(|c| !c.is_zero());
    match first {
        None => LaurentElement { start: 0, coeffs: Vec::new() },
        Some(first) => {
            let last = coeffs.iter().rposition(|c| !c.is_zero()).unwrap();
            LaurentElement { start: start + first as i32, coeffs: coeffs[first..=last].to_vec() }
        }
    }
}
