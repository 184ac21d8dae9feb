//! Nonnegative least squares note-activation fitting.
//!
//! Each standardized log-spectrum is approximated as `E x` with `x >= 0`,
//! where `E` holds one geometrically declining harmonic-series profile per
//! semitone (MIDI 21-104). The solver is the Lawson-Hanson active-set
//! method on the normal equations.

use super::logfreq::bin_position;
use super::{NnlsNotegram, Notegram, LOG_BINS, MIDI_LOW, NNLS_BINS};
use crate::error::Error;
use ndarray::{Array1, Array2, ArrayView1};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Frames quieter than this skip the solve entirely and emit zeros.
const SILENCE_THRESHOLD: f64 = 1e-6;

/// Builds the 252 x 84 dictionary of note harmonic-series profiles.
///
/// Column `l` (MIDI note `21 + l`) carries partial `h` at amplitude
/// `s^(h-1)`, splatted onto the log-frequency axis with the same
/// raised-cosine kernel the linear-log mapping uses. Partials falling
/// outside the axis are dropped.
pub fn build_nnls_dictionary(s: f64, max_partials: usize) -> Result<Array2<f64>, Error> {
    if !(0.0..1.0).contains(&s) || s == 0.0 {
        return Err(Error::InvalidParameter(format!(
            "overtone decline factor s = {s} outside (0, 1)"
        )));
    }
    let mut e = Array2::zeros((LOG_BINS, NNLS_BINS));
    for l in 0..NNLS_BINS {
        let f0 = 440.0 * (((MIDI_LOW + l) as f64 - 69.0) / 12.0).exp2();
        for h in 1..=max_partials.max(1) {
            let q = bin_position(f0 * h as f64);
            if q <= -1.0 || q >= LOG_BINS as f64 {
                continue;
            }
            let a = s.powi(h as i32 - 1);
            let lo = (q - 1.0).ceil().max(0.0) as usize;
            let hi = (q + 1.0).floor().min((LOG_BINS - 1) as f64) as usize;
            for k in lo..=hi {
                let d = q - k as f64;
                if d.abs() < 1.0 {
                    e[(k, l)] += a * 0.5 * (1.0 + (PI * d).cos());
                }
            }
        }
    }
    Ok(e)
}

/// Result of one nonnegative least-squares solve.
#[derive(Debug, Clone)]
pub struct NnlsSolution {
    pub x: Array1<f64>,
    /// False when the iteration cap was hit; `x` is the best iterate found.
    pub converged: bool,
    pub iterations: usize,
}

/// Solves `min ||E x - y||` subject to `x >= 0` by Lawson-Hanson active-set
/// iteration with an iteration cap of `3 * n`.
pub fn nnls_solve(e: &Array2<f64>, y: ArrayView1<f64>) -> NnlsSolution {
    let (m, n) = e.dim();
    assert_eq!(y.len(), m, "rhs length must match dictionary rows");
    let max_iter = 3 * n;

    // Normal-equation data: gram = E^T E, aty = E^T y.
    let gram = e.t().dot(e);
    let aty = e.t().dot(&y);
    let tol = 1e-8 * aty.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));

    let mut x = Array1::<f64>::zeros(n);
    let mut passive = vec![false; n];
    let mut iterations = 0;

    loop {
        // Dual / negative gradient: w = aty - gram x.
        let w = &aty - &gram.dot(&x);
        let mut best: Option<(usize, f64)> = None;
        for i in 0..n {
            if !passive[i] && w[i] > tol {
                if best.map_or(true, |(_, bw)| w[i] > bw) {
                    best = Some((i, w[i]));
                }
            }
        }
        let Some((enter, _)) = best else {
            return NnlsSolution { x, converged: true, iterations };
        };
        passive[enter] = true;

        // Inner loop: solve the unconstrained problem on the passive set and
        // back off along the segment to x when a coefficient goes negative.
        loop {
            if iterations >= max_iter {
                return NnlsSolution { x, converged: false, iterations };
            }
            iterations += 1;

            let idx: Vec<usize> = (0..n).filter(|&i| passive[i]).collect();
            let z = match solve_subproblem(&gram, &aty, &idx) {
                Some(z) => z,
                None => {
                    // Degenerate subsystem: drop the entering column.
                    passive[enter] = false;
                    break;
                }
            };
            if z.iter().all(|&v| v > 0.0) {
                for (pos, &i) in idx.iter().enumerate() {
                    x[i] = z[pos];
                }
                break;
            }
            let mut alpha = f64::INFINITY;
            for (pos, &i) in idx.iter().enumerate() {
                if z[pos] <= 0.0 {
                    let denom = x[i] - z[pos];
                    if denom > 0.0 {
                        alpha = alpha.min(x[i] / denom);
                    } else {
                        alpha = 0.0;
                    }
                }
            }
            for (pos, &i) in idx.iter().enumerate() {
                x[i] += alpha * (z[pos] - x[i]);
            }
            for &i in &idx {
                if x[i] <= f64::EPSILON {
                    x[i] = 0.0;
                    passive[i] = false;
                }
            }
        }
    }
}

/// Solves `gram[idx, idx] z = aty[idx]` by Cholesky; `None` if the submatrix
/// is not positive definite even after a tiny diagonal bump.
fn solve_subproblem(gram: &Array2<f64>, aty: &Array1<f64>, idx: &[usize]) -> Option<Vec<f64>> {
    let p = idx.len();
    let mut a = vec![0.0; p * p];
    let mut b = vec![0.0; p];
    for (r, &i) in idx.iter().enumerate() {
        b[r] = aty[i];
        for (c, &j) in idx.iter().enumerate() {
            a[r * p + c] = gram[(i, j)];
        }
    }
    for attempt in 0..2 {
        let mut l = a.clone();
        if attempt == 1 {
            let max_diag = (0..p).map(|i| a[i * p + i]).fold(0.0f64, f64::max);
            for i in 0..p {
                l[i * p + i] += 1e-12 * max_diag.max(1.0);
            }
        }
        if cholesky_in_place(&mut l, p) {
            return Some(cholesky_solve(&l, &b, p));
        }
    }
    None
}

fn cholesky_in_place(a: &mut [f64], n: usize) -> bool {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if d <= 0.0 {
            return false;
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in j + 1..n {
            let mut v = a[i * n + j];
            for k in 0..j {
                v -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = v / d;
        }
    }
    true
}

fn cholesky_solve(l: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut v = b[i];
        for k in 0..i {
            v -= l[i * n + k] * y[k];
        }
        y[i] = v / l[i * n + i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut v = y[i];
        for k in i + 1..n {
            v -= l[k * n + i] * x[k];
        }
        x[i] = v / l[i * n + i];
    }
    x
}

/// Largest Karush-Kuhn-Tucker violation of `x` for `min ||Ex - y||, x >= 0`:
/// free coordinates should have zero gradient, active ones a nonnegative one.
pub fn kkt_violation(e: &Array2<f64>, y: ArrayView1<f64>, x: &Array1<f64>) -> f64 {
    let grad = e.t().dot(&(e.dot(x) - &y));
    let mut worst = 0.0f64;
    for (i, &g) in grad.iter().enumerate() {
        let v = if x[i] > 0.0 { g.abs() } else { (-g).max(0.0) };
        worst = worst.max(v);
    }
    worst
}

/// Fits note activations for every frame of a standardized notegram.
/// Near-silent frames are skipped and emit zeros; frames are independent and
/// solved in parallel.
pub fn nnls_notegram(noteg: &Notegram, dict: &Array2<f64>) -> NnlsNotegram {
    let (m, _) = noteg.frames.dim();
    let rows: Vec<Array1<f64>> = (0..m)
        .into_par_iter()
        .map(|row| {
            let y = noteg.frames.row(row);
            if y.iter().fold(0.0f64, |a, v| a.max(v.abs())) < SILENCE_THRESHOLD {
                Array1::zeros(NNLS_BINS)
            } else {
                nnls_solve(dict, y).x
            }
        })
        .collect();
    let mut frames = Array2::zeros((m, NNLS_BINS));
    for (i, row) in rows.into_iter().enumerate() {
        frames.row_mut(i).assign(&row);
    }
    NnlsNotegram {
        frames,
        hop_seconds: noteg.hop_seconds,
    }
}
