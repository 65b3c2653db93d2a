//! Small scalar numerics shared by the physics modules: compensated
//! summation, bracketed bisection and golden-section maximization.

use crate::error::{Error, Result};

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

pub const BISECTION_MAX_ITER: usize = 200;

/// Finds `x` in `[floor, ceiling]` with `f(x) = 0` for an increasing `f`.
///
/// The bracket is grown geometrically from `guess` (upwards by doubling,
/// downwards by halving towards `floor`) and then bisected. Stops when
/// `|f(x)| <= residual_tol`, when the bracket collapses to adjacent floats,
/// or after [`BISECTION_MAX_ITER`] halvings.
pub fn bisect_increasing<F>(
    mut f: F,
    guess: f64,
    floor: f64,
    ceiling: f64,
    residual_tol: f64,
) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    if !(guess > floor && guess <= ceiling) {
        return Err(Error::InvalidParameter(format!(
            "initial guess {guess} outside ({floor}, {ceiling}]"
        )));
    }

    let mut hi = guess;
    let mut f_hi = f(hi);
    while f_hi < 0.0 {
        if hi >= ceiling {
            return Err(Error::Infeasible(format!(
                "residual still negative at parameter ceiling {ceiling}"
            )));
        }
        hi = (2.0 * hi).min(ceiling);
        f_hi = f(hi);
    }

    let mut lo = guess;
    let mut f_lo = f_hi;
    if lo == hi {
        // grow downwards
        loop {
            let next = floor + 0.5 * (lo - floor);
            if next <= floor || next == lo || lo - floor < 1e-300 {
                lo = floor;
                f_lo = f(lo);
                break;
            }
            lo = next;
            f_lo = f(lo);
            if f_lo <= 0.0 {
                break;
            }
        }
        if f_lo > 0.0 {
            return Err(Error::Infeasible(format!(
                "residual already positive at parameter floor {floor}"
            )));
        }
    }

    if f_lo.abs() <= residual_tol {
        return Ok(lo);
    }
    if f_hi.abs() <= residual_tol {
        return Ok(hi);
    }

    let mut best = if f_lo.abs() < f_hi.abs() { lo } else { hi };
    let mut best_res = f_lo.abs().min(f_hi.abs());
    for _ in 0..BISECTION_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm.abs() < best_res {
            best = mid;
            best_res = fm.abs();
        }
        if fm.abs() <= residual_tol {
            return Ok(mid);
        }
        if fm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(best)
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
/// Returns `(argmax, max)`.
pub fn golden_section_max<F>(mut f: F, mut lo: f64, mut hi: f64, x_tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > x_tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    // the bracket may have collapsed onto an endpoint
    let mut best = (x1, f1);
    for x in [x2, lo, hi] {
        let v = f(x);
        if v > best.1 {
            best = (x, v);
        }
    }
    if f2 > best.1 {
        best = (x2, f2);
    }
    best
}

/// `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}
