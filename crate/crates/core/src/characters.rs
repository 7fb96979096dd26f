//! Characters of the additive group of F^(s) in Rademacher coordinates.
//!
//! Every character is a finite product `prod_k r_k^{a_k}` with `a_k` in
//! GF(p^s), and `(r_k^u, x) = exp(2 pi i (u, x_k) / p)` where `(u, x_k)` is the
//! coordinate scalar product. `F_n^⊥`, the annihilator of `F_n`, consists of
//! the characters whose exponents vanish at every index `>= n`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::galois_field::{GaloisField, GfElement};
use crate::local_field::LaurentElement;
use crate::window::Window;

/// `exp(2 pi i j / p)`.
pub fn root_of_unity(p: u32, j: u32) -> Complex64 {
    let angle = 2.0 * PI * (j % p) as f64 / p as f64;
    Complex64::new(angle.cos(), angle.sin())
}

/// A character stored by its nonzero Rademacher exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Character {
    exponents: BTreeMap<i32, GfElement>,
}

impl Character {
    pub fn exponents(&self) -> &BTreeMap<i32, GfElement> {
        &self.exponents
    }

    pub fn exponent_index(&self, k: i32) -> usize {
        self.exponents.get(&k).map_or(0, |e| e.index())
    }

    pub fn is_neutral(&self) -> bool {
        self.exponents.is_empty()
    }

    /// Membership in `F_n^⊥`.
    pub fn annihilates(&self, n: i32) -> bool {
        self.exponents.keys().all(|&k| k < n)
    }
}

/// A character modulo `F_level^⊥`, stored as the exponents at
/// `level, level+1, ..., level+len-1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CharacterCoset {
    pub level: i32,
    pub exponents: Vec<GfElement>,
}

impl CharacterCoset {
    pub fn window(&self) -> Window {
        Window { lo: self.level, hi: self.level + self.exponents.len() as i32 }
    }

    /// Exponent index at `k`; zero above the window.
    pub fn exponent_index(&self, k: i32) -> usize {
        let w = self.window();
        if w.contains_level(k) {
            self.exponents[(k - self.level) as usize].index()
        } else {
            0
        }
    }

    /// Semicolon-separated digit tuples, lowest level first.
    pub fn to_text(&self) -> String {
        self.exponents.iter().map(|e| e.to_text()).collect::<Vec<_>>().join(";")
    }
}

/// The character group over a fixed GF(p^s).
#[derive(Clone, Debug)]
pub struct CharacterGroup {
    gf: Arc<GaloisField>,
}

impl CharacterGroup {
    pub fn new(gf: Arc<GaloisField>) -> Self {
        Self { gf }
    }

    pub fn gf(&self) -> &Arc<GaloisField> {
        &self.gf
    }

    pub fn neutral(&self) -> Character {
        Character::default()
    }

    /// `r_k^u`.
    pub fn rademacher(&self, k: i32, u: GfElement) -> Result<Character> {
        self.from_exponents([(k, u)])
    }

    pub fn from_exponents(&self, exponents: impl IntoIterator<Item = (i32, GfElement)>) -> Result<Character> {
        let mut out = BTreeMap::new();
        for (k, e) in exponents {
            self.gf.index(e)?;
            if out.contains_key(&k) {
                return Err(Error::Parameter(format!("exponent at index {k} given twice")));
            }
            if !e.is_zero() {
                out.insert(k, e);
            }
        }
        Ok(Character { exponents: out })
    }

    fn combine(&self, a: &Character, b: &Character, op: impl Fn(usize, usize) -> usize) -> Character {
        let mut out = BTreeMap::new();
        for &k in a.exponents.keys().chain(b.exponents.keys()) {
            let v = op(a.exponent_index(k), b.exponent_index(k));
            if v != 0 {
                out.insert(k, self.gf.from_index(v).expect("table index in range"));
            }
        }
        Character { exponents: out }
    }

    /// Group law: exponents add.
    pub fn mul(&self, a: &Character, b: &Character) -> Character {
        self.combine(a, b, |x, y| self.gf.add_idx(x, y))
    }

    pub fn inverse(&self, a: &Character) -> Character {
        self.combine(a, &self.neutral(), |x, _| self.gf.neg_idx(x))
    }

    /// The GF(p^s)-power `chi^b`: every exponent multiplied by `b`.
    pub fn pow(&self, chi: &Character, b: GfElement) -> Result<Character> {
        let bi = self.gf.index(b)?;
        if !self.gf.has_mul() {
            return Err(Error::Configuration("no reduction polynomial configured for multiplication".into()));
        }
        Ok(self.combine(chi, &self.neutral(), |x, _| self.gf.mul_idx(x, bi)))
    }

    /// `chi A` with `(chi A, x) = (chi, A x)`; on exponents `r_k A = r_{k+1}`.
    pub fn dilate(&self, chi: &Character) -> Character {
        Character { exponents: chi.exponents.iter().map(|(&k, &e)| (k + 1, e)).collect() }
    }

    pub fn dilate_inv(&self, chi: &Character) -> Character {
        Character { exponents: chi.exponents.iter().map(|(&k, &e)| (k - 1, e)).collect() }
    }

    /// `(r_k^u, x)`.
    pub fn rademacher_eval(&self, k: i32, u: GfElement, x: &LaurentElement) -> Result<Complex64> {
        let ui = self.gf.index(u)?;
        Ok(root_of_unity(self.gf.p(), self.gf.dot_idx(ui, x.coeff_index(k))))
    }

    /// Exponent of the p-th root of unity `(chi, x)`.
    pub fn pairing(&self, chi: &Character, x: &LaurentElement) -> u32 {
        let p = self.gf.p();
        chi.exponents.iter().fold(0, |acc, (&k, e)| (acc + self.gf.dot_idx(e.index(), x.coeff_index(k))) % p)
    }

    pub fn eval(&self, chi: &Character, x: &LaurentElement) -> Complex64 {
        root_of_unity(self.gf.p(), self.pairing(chi, x))
    }

    /// The coset of `chi` modulo `F_level^⊥`, windowed up to its top exponent.
    pub fn coset_of(&self, chi: &Character, level: i32) -> CharacterCoset {
        let top = chi.exponents.keys().next_back().copied().unwrap_or(level - 1).max(level - 1);
        let exponents =
            (level..=top).map(|k| chi.exponents.get(&k).copied().unwrap_or_else(|| self.gf.zero())).collect();
        CharacterCoset { level, exponents }
    }

    /// The representative of a coset with no exponents below its level.
    pub fn representative(&self, coset: &CharacterCoset) -> Character {
        Character {
            exponents: coset
                .exponents
                .iter()
                .enumerate()
                .filter(|(_, e)| !e.is_zero())
                .map(|(i, &e)| (coset.level + i as i32, e))
                .collect(),
        }
    }

    /// All cosets of `F_{-n}^⊥` inside `F_{top+1}^⊥`, i.e. exponent windows
    /// `(a_{-n}, ..., a_top)` in lexicographic order.
    pub fn coset_enumerate(&self, n: usize, top: i32) -> Vec<CharacterCoset> {
        let level = -(n as i32);
        let window = Window { lo: level, hi: (top + 1).max(level) };
        let q = self.gf.order();
        (0..window.size(q))
            .map(|idx| CharacterCoset {
                level,
                exponents: window
                    .decode(idx, q)
                    .into_iter()
                    .map(|d| self.gf.from_index(d).expect("digit in range"))
                    .collect(),
            })
            .collect()
    }
}
