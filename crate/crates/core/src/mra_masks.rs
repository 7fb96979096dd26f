//! Masks of the refinement equation and the orthonormality criteria.
//!
//! A mask is a function on the character group that is constant on cosets of
//! `F_{-N}^⊥` and does not depend on exponents above index 0, so it is a table
//! over `(a_{-N}, ..., a_0)`. In the table `a_0` varies fastest: the values for
//! a fixed prefix `(a_{-N}, ..., a_{-1})` form one contiguous row.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use crate::characters::{Character, CharacterCoset, CharacterGroup};
use crate::error::{Error, Result};
use crate::formats::{fmt_complex, fmt_tuple, parse_f64, parse_tuple};
use crate::galois_field::GaloisField;
use crate::local_field::LocalField;
use crate::step_functions::DualStepFunction;
use crate::window::Window;

/// Default threshold for every pass/fail check.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct Mask {
    gf: Arc<GaloisField>,
    n: usize,
    values: Vec<Complex64>,
}

impl Mask {
    pub fn new(gf: Arc<GaloisField>, n: usize, values: Vec<Complex64>) -> Result<Self> {
        let expected = mask_window(n).size(gf.order());
        if values.len() != expected {
            return Err(Error::Parameter(format!("mask for N = {n} needs {expected} values, got {}", values.len())));
        }
        Ok(Self { gf, n, values })
    }

    pub fn zeros(gf: Arc<GaloisField>, n: usize) -> Self {
        let size = mask_window(n).size(gf.order());
        Self { gf, n, values: vec![Complex64::new(0.0, 0.0); size] }
    }

    /// Fills the mask from `f(prefix, a_0)` where `prefix` lists
    /// `a_{-N}, ..., a_{-1}`.
    pub fn from_fn(gf: Arc<GaloisField>, n: usize, mut f: impl FnMut(&[usize], usize) -> Complex64) -> Self {
        let q = gf.order();
        let w = mask_window(n);
        let values = (0..w.size(q))
            .map(|i| {
                let d = w.decode(i, q);
                f(&d[..n], d[n])
            })
            .collect();
        Self { gf, n, values }
    }

    /// The Haar scaling mask `m(a_{-N}, ..., a_0) = [a_0 = 0]`.
    pub fn haar(gf: Arc<GaloisField>, n: usize) -> Self {
        Self::from_fn(gf, n, |_, a0| Complex64::new(if a0 == 0 { 1.0 } else { 0.0 }, 0.0))
    }

    pub fn gf(&self) -> &Arc<GaloisField> {
        &self.gf
    }

    /// The depth `N`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Exponent levels `-N..=0`.
    pub fn window(&self) -> Window {
        mask_window(self.n)
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn prefix_count(&self) -> usize {
        self.gf.order().pow(self.n as u32)
    }

    pub fn row(&self, prefix: usize) -> &[Complex64] {
        let q = self.gf.order();
        &self.values[prefix * q..(prefix + 1) * q]
    }

    pub fn row_mut(&mut self, prefix: usize) -> &mut [Complex64] {
        let q = self.gf.order();
        &mut self.values[prefix * q..(prefix + 1) * q]
    }

    pub fn get(&self, digits: &[usize]) -> Complex64 {
        self.values[self.window().encode(digits, self.gf.order())]
    }

    /// Digits `a_{-N}, ..., a_{-1}` of a prefix index.
    pub fn prefix_digits(&self, prefix: usize) -> Vec<usize> {
        Window { lo: -(self.n as i32), hi: 0 }.decode(prefix, self.gf.order())
    }

    pub fn prefix_text(&self, prefix: usize) -> String {
        fmt_tuple(&self.gf, &self.prefix_digits(prefix))
    }

    /// `m(F_{-N}^⊥ r_{-N}^{a_{-N}} ... r_0^{a_0})`. Exponents above 0 are
    /// ignored; the coset must resolve every level from `-N` upwards.
    pub fn eval(&self, coset: &CharacterCoset) -> Result<Complex64> {
        if coset.level > -(self.n as i32) {
            return Err(Error::Window(format!(
                "coset of F_{}^⊥ is too coarse for a mask of depth {}",
                coset.level, self.n
            )));
        }
        let digits: Vec<usize> = (-(self.n as i32)..=0).map(|k| coset.exponent_index(k)).collect();
        Ok(self.get(&digits))
    }

    pub fn eval_character(&self, chi: &Character) -> Complex64 {
        let digits: Vec<usize> = (-(self.n as i32)..=0).map(|k| chi.exponent_index(k)).collect();
        self.get(&digits)
    }

    /// Mask file: a header line `p s N`, then one line per index tuple in
    /// lexicographic order: `a_{-N};...;a_0;re im`.
    pub fn to_text(&self) -> String {
        let q = self.gf.order();
        let w = self.window();
        let mut out = format!("{} {} {}\n", self.gf.p(), self.gf.s(), self.n);
        for (i, v) in self.values.iter().enumerate() {
            out.push_str(&fmt_tuple(&self.gf, &w.decode(i, q)));
            out.push(';');
            out.push_str(&fmt_complex(*v, " "));
            out.push('\n');
        }
        out
    }

    /// Parses a mask file. When `gf` is `None` the field is built from the
    /// header with its default reduction polynomial.
    pub fn parse(text: &str, gf: Option<Arc<GaloisField>>) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (hl, header) = lines.next().ok_or_else(|| Error::Parse { line: 1, message: "empty mask file".into() })?;
        let nums: Vec<&str> = header.split_whitespace().collect();
        let bad_header =
            || Error::Parse { line: hl + 1, message: format!("expected header \"p s N\", got {header:?}") };
        if nums.len() != 3 {
            return Err(bad_header());
        }
        let p: u32 = nums[0].parse().map_err(|_| bad_header())?;
        let s: usize = nums[1].parse().map_err(|_| bad_header())?;
        let n: usize = nums[2].parse().map_err(|_| bad_header())?;
        let gf = match gf {
            Some(gf) if gf.p() == p && gf.s() == s => gf,
            Some(gf) => {
                return Err(Error::Parse {
                    line: hl + 1,
                    message: format!("mask is over GF({p}^{s}), expected GF({}^{})", gf.p(), gf.s()),
                })
            }
            None => Arc::new(
                GaloisField::with_default_poly(p, s)
                    .map_err(|e| Error::Parse { line: hl + 1, message: e.to_string() })?,
            ),
        };
        let q = gf.order();
        let w = mask_window(n);
        let rows: Vec<(usize, &str)> = lines.collect();
        if rows.len() != w.size(q) {
            return Err(Error::Parse {
                line: rows.last().map_or(hl + 1, |(i, _)| i + 1),
                message: format!("expected {} value lines for p={p} s={s} N={n}, found {}", w.size(q), rows.len()),
            });
        }
        let mut values = Vec::with_capacity(rows.len());
        for (expected, (i, row)) in rows.into_iter().enumerate() {
            let line = i + 1;
            let (tuple, value) = row
                .rsplit_once(';')
                .ok_or_else(|| Error::Parse { line, message: "expected digit tuples followed by ';re im'".into() })?;
            let digits = parse_tuple(&gf, tuple, n + 1, line)?;
            if w.encode(&digits, q) != expected {
                return Err(Error::Parse { line, message: "lines out of lexicographic order".into() });
            }
            let parts: Vec<&str> = value.split_whitespace().collect();
            if parts.len() != 2 {
                return Err(Error::Parse { line, message: "expected \"re im\"".into() });
            }
            values.push(Complex64::new(parse_f64(parts[0], line)?, parse_f64(parts[1], line)?));
        }
        Ok(Self { gf, n, values })
    }
}

fn mask_window(n: usize) -> Window {
    Window { lo: -(n as i32), hi: 1 }
}

/// Coefficients `beta_h` of the refinement equation, indexed by
/// `H_0^(N+1)` in shift enumeration order (`a_{-1}` fastest).
#[derive(Clone, Debug, PartialEq)]
pub struct RefinementCoefficients {
    gf: Arc<GaloisField>,
    n: usize,
    values: Vec<Complex64>,
}

impl RefinementCoefficients {
    pub fn new(gf: Arc<GaloisField>, n: usize, values: Vec<Complex64>) -> Result<Self> {
        let expected = gf.order().pow(n as u32 + 1);
        if values.len() != expected {
            return Err(Error::Parameter(format!(
                "refinement coefficients for N = {n} need {expected} values, got {}",
                values.len()
            )));
        }
        Ok(Self { gf, n, values })
    }

    pub fn gf(&self) -> &Arc<GaloisField> {
        &self.gf
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Levels `-(N+1)..-1` carrying the digits of `h`.
    pub fn window(&self) -> Window {
        Window { lo: -(self.n as i32) - 1, hi: 0 }
    }

    /// CSV with one row per shift: `h-digits,re,im`, digits of `h` listed
    /// from index `-(N+1)` up to `-1`.
    pub fn to_csv(&self) -> String {
        let q = self.gf.order();
        let w = self.window();
        let mut out = format!("# p={} s={} N={}\nh,re,im\n", self.gf.p(), self.gf.s(), self.n);
        for (i, v) in self.values.iter().enumerate() {
            out.push_str(&fmt_tuple(&self.gf, &w.decode(i, q)));
            out.push(',');
            out.push_str(&fmt_complex(*v, ","));
            out.push('\n');
        }
        out
    }

    pub fn parse_csv(gf: Arc<GaloisField>, text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| Error::Parse { line: 1, message: "empty file".into() })?;
        let n = header
            .strip_prefix('#')
            .and_then(|h| h.split_whitespace().find_map(|f| f.strip_prefix("N=")))
            .and_then(|v| v.parse::<usize>().ok())
            .ok_or_else(|| Error::Parse { line: 1, message: "header must carry N=".into() })?;
        match lines.next() {
            Some((_, "h,re,im")) => {}
            _ => return Err(Error::Parse { line: 2, message: "expected column header h,re,im".into() }),
        }
        let w = Window { lo: -(n as i32) - 1, hi: 0 };
        let q = gf.order();
        let rows: Vec<(usize, &str)> = lines.collect();
        if rows.len() != w.size(q) {
            return Err(Error::Parse {
                line: 3,
                message: format!("expected {} rows, found {}", w.size(q), rows.len()),
            });
        }
        let mut values = Vec::with_capacity(rows.len());
        for (expected, (i, row)) in rows.into_iter().enumerate() {
            let line = i + 1;
            let f: Vec<&str> = row.split(',').collect();
            if f.len() != 3 {
                return Err(Error::Parse { line, message: "expected h,re,im".into() });
            }
            if w.encode(&parse_tuple(&gf, f[0], w.len(), line)?, q) != expected {
                return Err(Error::Parse { line, message: "rows out of order".into() });
            }
            values.push(Complex64::new(parse_f64(f[1], line)?, parse_f64(f[2], line)?));
        }
        Ok(Self { gf, n, values })
    }
}

/// `m(chi) = p^{-s} sum_{h in H_0^(N+1)} beta_h conj((chi A^{-1}, h))`.
pub fn mask_from_coefficients(beta: &RefinementCoefficients) -> Result<Mask> {
    let gf = beta.gf.clone();
    let lf = LocalField::new(gf.clone());
    let chars = CharacterGroup::new(gf.clone());
    let shifts = lf.enumerate_shifts(beta.n + 1)?;
    let p = gf.p();
    let scale = 1.0 / gf.order() as f64;
    let cosets = chars.coset_enumerate(beta.n, 0);
    let values = cosets
        .iter()
        .map(|coset| {
            let chi = chars.dilate_inv(&chars.representative(coset));
            shifts
                .elements
                .iter()
                .zip(&beta.values)
                .map(|(h, b)| b * crate::characters::root_of_unity(p, p - chars.pairing(&chi, h)))
                .sum::<Complex64>()
                * scale
        })
        .collect();
    Mask::new(gf, beta.n, values)
}

/// Inverts [`mask_from_coefficients`] using orthogonality of the characters of
/// `H_0^(N+1)`: `beta_h = p^{-sN} sum_a m_a (chi_a A^{-1}, h)`.
pub fn coefficients_from_mask(mask: &Mask) -> Result<RefinementCoefficients> {
    let gf = mask.gf.clone();
    let lf = LocalField::new(gf.clone());
    let chars = CharacterGroup::new(gf.clone());
    let shifts = lf.enumerate_shifts(mask.n + 1)?;
    let p = gf.p();
    let scale = (gf.order() as f64).powi(-(mask.n as i32));
    let dilated: Vec<Character> =
        chars.coset_enumerate(mask.n, 0).iter().map(|c| chars.dilate_inv(&chars.representative(c))).collect();
    let values = shifts
        .elements
        .iter()
        .map(|h| {
            dilated
                .iter()
                .zip(&mask.values)
                .map(|(chi, m)| m * crate::characters::root_of_unity(p, chars.pairing(chi, h)))
                .sum::<Complex64>()
                * scale
        })
        .collect();
    RefinementCoefficients::new(gf, mask.n, values)
}

/// `phi_hat(chi) = prod_{k >= 0} m(chi A^{-k})` on the window `-N..M`.
///
/// After `N + M` inverse dilations every exponent of a character in
/// `F_M^⊥` has dropped below `-N`, so the product is finite.
pub fn synthesize_refinable(mask: &Mask, m_level: usize) -> Result<DualStepFunction> {
    let origin = mask.values[0];
    if (origin - Complex64::new(1.0, 0.0)).norm() > DEFAULT_TOLERANCE {
        return Err(Error::Normalization { re: origin.re, im: origin.im });
    }
    let gf = mask.gf.clone();
    let q = gf.order();
    let n = mask.n;
    let window = Window::new(-(n as i32), m_level as i32)?;
    let len = window.len();
    let mw = mask.window();
    Ok(DualStepFunction::from_fn(gf, window, |a| {
        // a[t] is the exponent at level -N + t
        let mut prod = Complex64::new(1.0, 0.0);
        let mut digits = vec![0usize; n + 1];
        for k in 0..len {
            for (j, d) in digits.iter_mut().enumerate() {
                *d = a.get(j + k).copied().unwrap_or(0);
            }
            prod *= mask.values[mw.encode(&digits, q)];
            if prod == Complex64::new(0.0, 0.0) {
                break;
            }
        }
        prod
    }))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingReport {
    /// `sum |phi_hat|^2` over exponents at levels `0..M`, one entry per prefix
    /// `(a_{-N}, ..., a_{-1})`.
    pub sums: Vec<f64>,
    pub max_deviation: f64,
    pub worst_prefix: usize,
}

impl ScalingReport {
    pub fn passed(&self, tolerance: f64) -> bool {
        self.max_deviation <= tolerance
    }
}

/// Orthonormality of the integer shifts of `phi`: for every prefix of
/// exponents below level 0 the squared modulus of `phi_hat` summed over the
/// exponents at levels `0..M` must equal 1.
pub fn check_scaling_orthonormality(phi_hat: &DualStepFunction) -> Result<ScalingReport> {
    let w = phi_hat.window();
    if w.lo > 0 || w.hi < 0 {
        return Err(Error::Window(format!("window {}..{} does not straddle level 0", w.lo, w.hi)));
    }
    let q = phi_hat.gf().order();
    let block = q.pow(w.hi as u32);
    let sums: Vec<f64> = phi_hat.values().chunks(block).map(|c| c.iter().map(|v| v.norm_sqr()).sum()).collect();
    let (worst_prefix, max_deviation) = sums
        .iter()
        .map(|s| (s - 1.0).abs())
        .enumerate()
        .fold((0, 0.0), |acc, (i, d)| if d > acc.1 { (i, d) } else { acc });
    Ok(ScalingReport { sums, max_deviation, worst_prefix })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilyReport {
    pub max_deviation: f64,
    pub worst_prefix: usize,
    pub worst_pair: (usize, usize),
    pub prefix_count: usize,
}

impl FamilyReport {
    pub fn passed(&self, tolerance: f64) -> bool {
        self.max_deviation <= tolerance
    }
}

fn check_family(family: &[Mask]) -> Result<()> {
    let first = family.first().ok_or_else(|| Error::Parameter("empty mask family".into()))?;
    if family.len() != first.gf.order() {
        return Err(Error::Parameter(format!(
            "a family over GF({}^{}) needs {} masks, got {}",
            first.gf.p(),
            first.gf.s(),
            first.gf.order(),
            family.len()
        )));
    }
    if family.iter().any(|m| m.n != first.n || m.gf != first.gf) {
        return Err(Error::Parameter("masks in a family must share p, s and N".into()));
    }
    Ok(())
}

/// For every prefix and every pair `(k, l)`:
/// `|sum_{a_0} m^(k) conj(m^(l)) - delta_{k,l}|`.
pub fn check_mask_family_orthogonality(family: &[Mask]) -> Result<FamilyReport> {
    check_family(family)?;
    let q = family[0].gf.order();
    let prefixes = family[0].prefix_count();
    let mut report = FamilyReport { max_deviation: 0.0, worst_prefix: 0, worst_pair: (0, 0), prefix_count: prefixes };
    for prefix in 0..prefixes {
        for k in 0..q {
            for l in 0..q {
                let sum: Complex64 =
                    family[k].row(prefix).iter().zip(family[l].row(prefix)).map(|(a, b)| a * b.conj()).sum();
                let target = if k == l { 1.0 } else { 0.0 };
                let dev = (sum - Complex64::new(target, 0.0)).norm();
                if dev > report.max_deviation {
                    report.max_deviation = dev;
                    report.worst_prefix = prefix;
                    report.worst_pair = (k, l);
                }
            }
        }
    }
    Ok(report)
}

/// How the rows of a random admissible mask are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowStyle {
    /// Uniform on the complex unit sphere of dimension `p^s`.
    Dense,
    /// A coordinate vector at a uniform position with a uniform phase.
    Sparse,
}

/// A random mask satisfying the scaling half of the family criterion:
/// the row at the zero prefix is `(1, 0, ..., 0)` and every other row is a
/// random unit vector.
pub fn random_admissible_mask<R: Rng + ?Sized>(gf: Arc<GaloisField>, n: usize, style: RowStyle, rng: &mut R) -> Mask {
    let q = gf.order();
    let mut mask = Mask::zeros(gf, n);
    mask.row_mut(0)[0] = Complex64::new(1.0, 0.0);
    for prefix in 1..mask.prefix_count() {
        let row = mask.row_mut(prefix);
        match style {
            RowStyle::Dense => {
                for v in row.iter_mut() {
                    *v = Complex64::new(gaussian(rng), gaussian(rng));
                }
                let norm = row.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
                row.iter_mut().for_each(|v| *v /= norm);
            }
            RowStyle::Sparse => {
                let pos = rng.gen_range(0..q);
                row[pos] = Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
            }
        }
    }
    mask
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box-Muller
    let u: f64 = 1.0 - rng.gen::<f64>();
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

/// Whether some prefix row has a zero at `a_0 = 0`, which forces the
/// fallback pivot when completing the mask.
pub fn uses_fallback_pivot(mask: &Mask) -> bool {
    (0..mask.prefix_count()).any(|p| mask.row(p)[0].norm() <= crate::wavelet_builder::ZERO_EPS)
}
