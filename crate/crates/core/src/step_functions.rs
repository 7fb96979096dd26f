//! Step functions on F^(s) and on its character group.
//!
//! A [`StepFunction`] over the window `lo..hi` is supported in `F_lo` and
//! constant on cosets of `F_hi`; its table is indexed by the digits
//! `(x_lo, ..., x_{hi-1})`. A [`DualStepFunction`] over the same window is
//! supported in `F_hi^⊥` and constant on cosets of `F_lo^⊥`, indexed by the
//! Rademacher exponents `(a_lo, ..., a_{hi-1})`. Haar measures are normalized
//! by `mu(F_0) = 1` and `nu(F_0^⊥) = 1`, so a cell of `F_hi` has measure
//! `p^(-s hi)` and a cell of `F_lo^⊥` has measure `p^(s lo)`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::formats::{fmt_complex, fmt_tuple, parse_f64, parse_tuple};
use crate::galois_field::GaloisField;
use crate::local_field::LaurentElement;
use crate::window::{extend_table, Extend, Window};

#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction {
    gf: Arc<GaloisField>,
    window: Window,
    values: Vec<Complex64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualStepFunction {
    gf: Arc<GaloisField>,
    window: Window,
    values: Vec<Complex64>,
}

fn check_size(gf: &GaloisField, window: Window, len: usize) -> Result<()> {
    let expected = window.size(gf.order());
    if len != expected {
        return Err(Error::Parameter(format!(
            "table has {len} entries, window {}..{} needs {expected}",
            window.lo, window.hi
        )));
    }
    Ok(())
}

fn same_field(a: &GaloisField, b: &GaloisField) -> Result<()> {
    if a != b {
        return Err(Error::Parameter(format!("tables over GF({}^{}) and GF({}^{})", a.p(), a.s(), b.p(), b.s())));
    }
    Ok(())
}

macro_rules! table_common {
    ($ty:ident, $below:expr, $above:expr) => {
        impl $ty {
            pub fn new(gf: Arc<GaloisField>, window: Window, values: Vec<Complex64>) -> Result<Self> {
                check_size(&gf, window, values.len())?;
                Ok(Self { gf, window, values })
            }

            pub fn zeros(gf: Arc<GaloisField>, window: Window) -> Self {
                let n = window.size(gf.order());
                Self { gf, window, values: vec![Complex64::new(0.0, 0.0); n] }
            }

            /// Fills the table from a function of the digit tuple.
            pub fn from_fn(gf: Arc<GaloisField>, window: Window, mut f: impl FnMut(&[usize]) -> Complex64) -> Self {
                let q = gf.order();
                let values = (0..window.size(q)).map(|i| f(&window.decode(i, q))).collect();
                Self { gf, window, values }
            }

            pub fn gf(&self) -> &Arc<GaloisField> {
                &self.gf
            }

            pub fn window(&self) -> Window {
                self.window
            }

            pub fn values(&self) -> &[Complex64] {
                &self.values
            }

            pub fn values_mut(&mut self) -> &mut [Complex64] {
                &mut self.values
            }

            pub fn into_values(self) -> Vec<Complex64> {
                self.values
            }

            pub fn get(&self, digits: &[usize]) -> Complex64 {
                self.values[self.window.encode(digits, self.gf.order())]
            }

            /// Re-expresses the same function over a larger window.
            pub fn widen(&self, to: Window) -> Result<Self> {
                if !to.covers(&self.window) {
                    return Err(Error::Window(format!(
                        "cannot narrow window {}..{} to {}..{}",
                        self.window.lo, self.window.hi, to.lo, to.hi
                    )));
                }
                let values = extend_table(&self.values, self.window, to, self.gf.order(), $below, $above);
                Ok(Self { gf: self.gf.clone(), window: to, values })
            }

            pub fn scale(&self, c: Complex64) -> Self {
                let values = self.values.iter().map(|v| v * c).collect();
                Self { gf: self.gf.clone(), window: self.window, values }
            }

            pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
                same_field(&self.gf, &other.gf)?;
                let w = self.window.union(&other.window);
                let a = self.widen(w)?;
                let b = other.widen(w)?;
                Ok(a.values.iter().zip(&b.values).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max))
            }

            /// One row per cell: `digits,re,im`, preceded by a `#` header line
            /// giving the field and window.
            pub fn to_csv(&self) -> String {
                let q = self.gf.order();
                let mut out = format!(
                    "# kind={} p={} s={} lo={} hi={}\ndigits,re,im\n",
                    stringify!($ty),
                    self.gf.p(),
                    self.gf.s(),
                    self.window.lo,
                    self.window.hi
                );
                for (i, v) in self.values.iter().enumerate() {
                    out.push_str(&fmt_tuple(&self.gf, &self.window.decode(i, q)));
                    out.push(',');
                    out.push_str(&fmt_complex(*v, ","));
                    out.push('\n');
                }
                out
            }

            pub fn parse_csv(gf: Arc<GaloisField>, text: &str) -> Result<Self> {
                let mut lines = text.lines().enumerate();
                let (_, header) = lines.next().ok_or_else(|| Error::Parse { line: 1, message: "empty file".into() })?;
                let (window, p, s) = parse_header(header, stringify!($ty))?;
                if p != gf.p() || s != gf.s() {
                    return Err(Error::Parse {
                        line: 1,
                        message: format!("file is over GF({p}^{s}), expected GF({}^{})", gf.p(), gf.s()),
                    });
                }
                match lines.next() {
                    Some((_, "digits,re,im")) => {}
                    _ => return Err(Error::Parse { line: 2, message: "expected column header".into() }),
                }
                let q = gf.order();
                let rows: Vec<(usize, &str)> = lines.filter(|(_, l)| !l.trim().is_empty()).collect();
                if rows.len() != window.size(q) {
                    return Err(Error::Parse {
                        line: rows.last().map_or(2, |(i, _)| i + 1),
                        message: format!("expected {} rows, found {}", window.size(q), rows.len()),
                    });
                }
                let mut values = Vec::with_capacity(rows.len());
                for (expected, (i, row)) in rows.into_iter().enumerate() {
                    let line = i + 1;
                    let fields: Vec<&str> = row.split(',').collect();
                    if fields.len() != 3 {
                        return Err(Error::Parse { line, message: "expected digits,re,im".into() });
                    }
                    let digits = parse_tuple(&gf, fields[0], window.len(), line)?;
                    if window.encode(&digits, q) != expected {
                        return Err(Error::Parse { line, message: "rows out of lexicographic order".into() });
                    }
                    values.push(Complex64::new(parse_f64(fields[1], line)?, parse_f64(fields[2], line)?));
                }
                Ok(Self { gf, window, values })
            }
        }
    };
}

table_common!(StepFunction, Extend::ZeroPad, Extend::Replicate);
table_common!(DualStepFunction, Extend::Replicate, Extend::ZeroPad);

fn parse_header(line: &str, kind: &str) -> Result<(Window, u32, usize)> {
    let bad = |m: String| Error::Parse { line: 1, message: m };
    let body = line.strip_prefix('#').ok_or_else(|| bad("missing '#' header".into()))?;
    let mut lo = None;
    let mut hi = None;
    let mut p = None;
    let mut s = None;
    for field in body.split_whitespace() {
        let (k, v) = field.split_once('=').ok_or_else(|| bad(format!("bad header field {field:?}")))?;
        match k {
            "kind" if v != kind => return Err(bad(format!("expected kind={kind}, got {v}"))),
            "kind" => {}
            "lo" => lo = v.parse::<i32>().ok(),
            "hi" => hi = v.parse::<i32>().ok(),
            "p" => p = v.parse::<u32>().ok(),
            "s" => s = v.parse::<usize>().ok(),
            _ => return Err(bad(format!("unknown header field {k}"))),
        }
    }
    match (lo, hi, p, s) {
        (Some(lo), Some(hi), Some(p), Some(s)) => Ok((Window::new(lo, hi).map_err(|e| bad(e.to_string()))?, p, s)),
        _ => Err(bad("header needs p, s, lo and hi".into())),
    }
}

/// In-place transform along every base-p coordinate of the flat index:
/// `out[a] = sum_x v[x] exp(sign 2 pi i (a, x) / p)`.
fn separable_dft(values: &mut [Complex64], p: usize, sign: f64) {
    let n = values.len();
    let roots: Vec<Complex64> =
        (0..p).map(|j| Complex64::from_polar(1.0, sign * 2.0 * PI * j as f64 / p as f64)).collect();
    let mut buf = vec![Complex64::new(0.0, 0.0); p];
    let mut stride = 1;
    while stride < n {
        let block = stride * p;
        for base in (0..n).step_by(block) {
            for off in 0..stride {
                let start = base + off;
                for (k, slot) in buf.iter_mut().enumerate() {
                    *slot = (0..p).map(|j| values[start + j * stride] * roots[(j * k) % p]).sum();
                }
                for (k, v) in buf.iter().enumerate() {
                    values[start + k * stride] = *v;
                }
            }
        }
        stride = block;
    }
}

impl StepFunction {
    /// `1_{F_n}` on the given window. Requires `lo <= n <= hi`.
    pub fn ball_indicator(gf: Arc<GaloisField>, window: Window, n: i32) -> Result<Self> {
        if n < window.lo || n > window.hi {
            return Err(Error::Window(format!("F_{n} is not resolved by window {}..{}", window.lo, window.hi)));
        }
        let lo = window.lo;
        Ok(Self::from_fn(gf, window, |d| {
            let inside = d[..(n - lo) as usize].iter().all(|&x| x == 0);
            Complex64::new(if inside { 1.0 } else { 0.0 }, 0.0)
        }))
    }

    /// Value at a point; zero outside `F_lo`.
    pub fn value_at(&self, x: &LaurentElement) -> Complex64 {
        match x.window_digits(self.window) {
            Ok(d) => self.get(&d),
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    /// Measure of one cell of `F_hi`.
    pub fn cell_measure(&self) -> f64 {
        (self.gf.p() as f64).powi(-(self.gf.s() as i32) * self.window.hi)
    }

    /// `f_hat(chi) = int f(x) conj((chi, x)) dmu(x)`, computed by separable
    /// size-p transforms.
    pub fn fourier(&self) -> DualStepFunction {
        let mut values = self.values.clone();
        separable_dft(&mut values, self.gf.p() as usize, -1.0);
        let mu = self.cell_measure();
        values.iter_mut().for_each(|v| *v *= mu);
        DualStepFunction { gf: self.gf.clone(), window: self.window, values }
    }

    /// `<f, g> = int f conj(g) dmu` over the common refinement of both windows.
    pub fn inner_product(&self, other: &StepFunction) -> Result<Complex64> {
        same_field(&self.gf, &other.gf)?;
        if self.window == other.window {
            return Ok(raw_inner(&self.values, &other.values) * self.cell_measure());
        }
        let w = self.window.union(&other.window);
        let a = self.widen(w)?;
        let b = other.widen(w)?;
        Ok(raw_inner(&a.values, &b.values) * a.cell_measure())
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.cell_measure()
    }

    /// `x -> f(x - h)`. Coefficients of `h` at or above `hi` are irrelevant;
    /// a nonzero coefficient below `lo` needs a wider window first.
    pub fn shift(&self, h: &LaurentElement) -> Result<StepFunction> {
        let hd = h.window_digits(self.window)?;
        let q = self.gf.order();
        let gf = &self.gf;
        let mut values = vec![Complex64::new(0.0, 0.0); self.values.len()];
        let mut digits = vec![0usize; self.window.len()];
        for (idx, slot) in values.iter_mut().enumerate() {
            let mut rest = idx;
            for t in (0..digits.len()).rev() {
                digits[t] = gf.sub_idx(rest % q, hd[t]);
                rest /= q;
            }
            *slot = self.values[self.window.encode(&digits, q)];
        }
        Ok(StepFunction { gf: self.gf.clone(), window: self.window, values })
    }
}

impl DualStepFunction {
    /// `1_{F_n^⊥}` on the given window. Requires `lo <= n <= hi`.
    pub fn annihilator_indicator(gf: Arc<GaloisField>, window: Window, n: i32) -> Result<Self> {
        if n < window.lo || n > window.hi {
            return Err(Error::Window(format!("F_{n}^⊥ is not resolved by window {}..{}", window.lo, window.hi)));
        }
        let lo = window.lo;
        Ok(Self::from_fn(gf, window, |d| {
            let inside = d[(n - lo) as usize..].iter().all(|&x| x == 0);
            Complex64::new(if inside { 1.0 } else { 0.0 }, 0.0)
        }))
    }

    /// Measure of one cell of `F_lo^⊥`.
    pub fn cell_measure(&self) -> f64 {
        (self.gf.p() as f64).powi(self.gf.s() as i32 * self.window.lo)
    }

    /// `f(x) = int g(chi) (chi, x) dnu(chi)`.
    pub fn inv_fourier(&self) -> StepFunction {
        let mut values = self.values.clone();
        separable_dft(&mut values, self.gf.p() as usize, 1.0);
        let nu = self.cell_measure();
        values.iter_mut().for_each(|v| *v *= nu);
        StepFunction { gf: self.gf.clone(), window: self.window, values }
    }

    pub fn inner_product(&self, other: &DualStepFunction) -> Result<Complex64> {
        same_field(&self.gf, &other.gf)?;
        let w = self.window.union(&other.window);
        let a = self.widen(w)?;
        let b = other.widen(w)?;
        Ok(raw_inner(&a.values, &b.values) * a.cell_measure())
    }
}

fn raw_inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}
