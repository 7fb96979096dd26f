use num_complex::Complex64;
use rayon::prelude::*;

use super::WaveletSystem;
use crate::error::{Error, Result};
use crate::formats::{fmt_f64, KeyValueReport};
use crate::local_field::LocalField;
use crate::step_functions::StepFunction;
use crate::window::Window;

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    /// `max |<psi^(k)(. - g), psi^(l)(. - h)> - delta_{kl} delta_{gh}|`.
    pub max_deviation: f64,
    /// `(k, l, g, h)` with `g`, `h` as indices into `H_0^(depth)`.
    pub worst: (usize, usize, usize, usize),
    /// Largest deviation on the diagonal `k = l`, `g = h`.
    pub max_diagonal_deviation: f64,
    pub shift_depth: usize,
    pub pair_count: usize,
    pub prefix_count: usize,
    /// Largest `|<psi^(k), psi^(l)(. - h)>|` over shifts `h` with a nonzero
    /// digit just below the verified depth; zero whenever the supports are
    /// disjoint.
    pub beyond_depth_max: f64,
}

impl VerifyReport {
    pub fn passed(&self, tolerance: f64) -> bool {
        self.max_deviation <= tolerance && self.beyond_depth_max <= tolerance
    }

    pub fn to_kv(&self, tolerance: f64) -> KeyValueReport {
        let mut r = KeyValueReport::default();
        r.push("max_deviation", fmt_f64(self.max_deviation));
        r.push("max_diagonal_deviation", fmt_f64(self.max_diagonal_deviation));
        r.push("beyond_depth_max", fmt_f64(self.beyond_depth_max));
        r.push("worst_pair", format!("{} {} {} {}", self.worst.0, self.worst.1, self.worst.2, self.worst.3));
        r.push("prefix_count", self.prefix_count);
        r.push("shift_depth", self.shift_depth);
        r.push("pair_count", self.pair_count);
        r.push("tolerance", fmt_f64(tolerance));
        r.push("passed", self.passed(tolerance));
        r
    }
}

/// Computes every inner product `<psi^(k)(. - g), psi^(l)(. - h)>` for
/// `g, h` in `H_0^(depth)` directly on step-function tables, with
/// `psi^(0) = phi`.
pub fn verify_wavelet_system(ws: &WaveletSystem, shift_depth: usize) -> Result<VerifyReport> {
    let n = ws.n();
    if shift_depth < n + 1 {
        return Err(Error::Parameter(format!("shift depth {shift_depth} is below N + 1 = {}", n + 1)));
    }
    let gf = ws.gf().clone();
    let q = gf.order();
    let lf = LocalField::new(gf.clone());
    let top = ws.m_level() as i32 + 1;
    let window = Window::new(-(shift_depth as i32), top)?;
    let functions: Vec<StepFunction> = ws.functions().into_iter().map(|f| f.widen(window)).collect::<Result<_>>()?;
    let shifts = lf.enumerate_shifts(shift_depth)?;
    let count = shifts.len();

    // translates[k * count + g] = psi^(k)(. - g)
    let translates: Vec<StepFunction> =
        functions.iter().flat_map(|f| shifts.elements.iter().map(move |h| f.shift(h))).collect::<Result<_>>()?;
    let measure = translates[0].cell_measure();

    let rows: Vec<(f64, usize, f64)> = translates
        .par_iter()
        .enumerate()
        .map(|(i, a)| {
            let mut worst = (0.0, 0);
            let mut diag = 0.0;
            for (j, b) in translates.iter().enumerate() {
                let ip: Complex64 =
                    a.values().iter().zip(b.values()).map(|(x, y)| x * y.conj()).sum::<Complex64>() * measure;
                let target = if i == j { 1.0 } else { 0.0 };
                let dev = (ip - Complex64::new(target, 0.0)).norm();
                if dev > worst.0 {
                    worst = (dev, j);
                }
                if i == j {
                    diag = dev;
                }
            }
            (worst.0, worst.1, diag)
        })
        .collect();

    let mut report = VerifyReport {
        max_deviation: 0.0,
        worst: (0, 0, 0, 0),
        max_diagonal_deviation: 0.0,
        shift_depth,
        pair_count: translates.len() * translates.len(),
        prefix_count: q.pow(n as u32),
        beyond_depth_max: 0.0,
    };
    for (i, &(dev, j, diag)) in rows.iter().enumerate() {
        report.max_diagonal_deviation = report.max_diagonal_deviation.max(diag);
        if dev > report.max_deviation {
            report.max_deviation = dev;
            report.worst = (i / count, j / count, i % count, j % count);
        }
    }

    // Shifts by u g_{-(depth+1)} move supports off F_{-N}.
    let deeper = Window::new(window.lo - 1, window.hi)?;
    let wide: Vec<StepFunction> = functions.iter().map(|f| f.widen(deeper)).collect::<Result<_>>()?;
    for u in gf.elements().skip(1) {
        let h = lf.from_indices(deeper.lo, &[u.index()])?;
        for a in &wide {
            for b in &wide {
                let ip = a.inner_product(&b.shift(&h)?)?;
                report.beyond_depth_max = report.beyond_depth_max.max(ip.norm());
            }
        }
    }
    Ok(report)
}
