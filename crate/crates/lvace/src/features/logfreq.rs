//! Log-frequency mapping, tuning estimation, and spectral standardization.

use super::{LogSpectrogram, Notegram, TuningEstimate, BINS_PER_SEMITONE, LOG_BINS, MIDI_LOW};
use crate::audio::TARGET_SAMPLE_RATE;
use crate::features::stft::{FFT_SIZE, HOP_SIZE, SPEC_BINS};
use ndarray::Array2;
use std::f64::consts::PI;

/// Fractional log-frequency bin position of a frequency in Hz.
///
/// Bin 1 is the in-tune sub-bin of MIDI 21; each semitone spans three bins,
/// so an in-tune MIDI note m sits exactly at bin `3 * (m - 21) + 1`.
pub fn bin_position(freq_hz: f64) -> f64 {
    let midi = 69.0 + 12.0 * (freq_hz / 440.0).log2();
    BINS_PER_SEMITONE as f64 * (midi - MIDI_LOW as f64) + 1.0
}

/// Raised-cosine kernel over the normalized distance `d` in output-bin
/// widths; support is |d| < 1.
fn kernel(d: f64) -> f64 {
    if d.abs() >= 1.0 {
        0.0
    } else {
        0.5 * (1.0 + (PI * d).cos())
    }
}

/// Maps a linear-frequency magnitude spectrogram (M x 2049) onto the 252-bin
/// log-frequency axis with raised-cosine interpolation; kernel weights are
/// normalized per output bin.
pub fn map_to_log_frequency(mag: &Array2<f64>) -> LogSpectrogram {
    let (m, bins) = mag.dim();
    assert_eq!(bins, SPEC_BINS, "expected a {SPEC_BINS}-bin spectrogram");

    // Sparse kernel: for each output bin, the linear bins within range and
    // their normalized weights.
    let mut taps: Vec<Vec<(usize, f64)>> = vec![Vec::new(); LOG_BINS];
    for j in 1..SPEC_BINS {
        let freq = j as f64 * TARGET_SAMPLE_RATE as f64 / FFT_SIZE as f64;
        let q = bin_position(freq);
        let lo = (q - 1.0).ceil().max(0.0) as usize;
        let hi = (q + 1.0).floor().min((LOG_BINS - 1) as f64) as usize;
        for k in lo..=hi {
            let w = kernel(q - k as f64);
            if w > 0.0 {
                taps[k].push((j, w));
            }
        }
    }
    for tap in &mut taps {
        let total: f64 = tap.iter().map(|(_, w)| w).sum();
        if total > 0.0 {
            for (_, w) in tap.iter_mut() {
                *w /= total;
            }
        }
    }

    let mut out = Array2::zeros((m, LOG_BINS));
    for row in 0..m {
        for (k, tap) in taps.iter().enumerate() {
            let mut acc = 0.0;
            for &(j, w) in tap {
                acc += w * mag[(row, j)];
            }
            out[(row, k)] = acc;
        }
    }
    LogSpectrogram {
        frames: out,
        hop_seconds: HOP_SIZE as f64 / TARGET_SAMPLE_RATE as f64,
    }
}

/// Wraps an angle to [-pi, pi).
fn wrap_angle(x: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut y = (x + PI).rem_euclid(two_pi);
    if y < 0.0 {
        y += two_pi;
    }
    y - PI
}

/// Estimates the deviation from standard tuning.
///
/// The mean spectrum is probed at one cycle per three bins; the phase of that
/// component measures how far spectral mass sits from the in-tune sub-bin
/// comb. An all-zero spectrogram is flagged degenerate and reads as in tune.
pub fn estimate_tuning(logspec: &LogSpectrogram) -> TuningEstimate {
    let (m, bins) = logspec.frames.dim();
    let mut mean = vec![0.0; bins];
    for row in logspec.frames.rows() {
        for (k, v) in row.iter().enumerate() {
            mean[k] += v;
        }
    }
    let scale = 1.0 / m.max(1) as f64;
    let mut re = 0.0;
    let mut im = 0.0;
    let mut mass = 0.0;
    for (k, v) in mean.iter().enumerate() {
        let v = v * scale;
        mass += v;
        let angle = -2.0 * PI * k as f64 / 3.0;
        re += v * angle.cos();
        im += v * angle.sin();
    }
    if mass <= 0.0 || (re == 0.0 && im == 0.0) {
        return TuningEstimate {
            delta: 0.0,
            tau: 440.0,
            degenerate: true,
        };
    }
    let phi = im.atan2(re);
    let delta = wrap_angle(-phi - 2.0 * PI / 3.0) / (2.0 * PI);
    TuningEstimate {
        delta,
        tau: 440.0 * (delta / 12.0).exp2(),
        degenerate: false,
    }
}

/// Re-centers the log-spectrogram onto the standard-tuning grid by reading
/// each output bin at the fractional input position `k + p`, where
/// `p = 36 * log2(tau / 440)`. Positions outside the axis read as zero.
pub fn retune(logspec: &LogSpectrogram, tuning: &TuningEstimate) -> Notegram {
    let p = (tuning.tau / 440.0).log2() * 36.0;
    let (m, bins) = logspec.frames.dim();
    let mut out = Array2::zeros((m, bins));
    for row in 0..m {
        for k in 0..bins {
            let x = k as f64 + p;
            let i0 = x.floor();
            let frac = x - i0;
            let i0 = i0 as i64;
            let a = if (0..bins as i64).contains(&i0) {
                logspec.frames[(row, i0 as usize)]
            } else {
                0.0
            };
            let b = if (0..bins as i64).contains(&(i0 + 1)) {
                logspec.frames[(row, (i0 + 1) as usize)]
            } else {
                0.0
            };
            out[(row, k)] = a * (1.0 - frac) + b * frac;
        }
    }
    Notegram {
        frames: out,
        hop_seconds: logspec.hop_seconds,
    }
}

/// Running standardization along the frequency axis: each bin is compared
/// against the mean and standard deviation of a `window_bins`-wide window
/// (truncated at the edges); values at or below the local mean clamp to 0.
pub fn standardize(noteg: &Notegram, window_bins: usize) -> Notegram {
    assert!(window_bins % 2 == 1 && window_bins >= 1, "window must be odd");
    let half = window_bins / 2;
    let (m, bins) = noteg.frames.dim();
    let mut out = Array2::zeros((m, bins));
    for row in 0..m {
        for k in 0..bins {
            let lo = k.saturating_sub(half);
            let hi = (k + half).min(bins - 1);
            let count = (hi - lo + 1) as f64;
            let mut sum = 0.0;
            let mut sum2 = 0.0;
            for j in lo..=hi {
                let v = noteg.frames[(row, j)];
                sum += v;
                sum2 += v * v;
            }
            let mean = sum / count;
            let var = (sum2 / count - mean * mean).max(0.0);
            let sd = var.sqrt();
            let y = noteg.frames[(row, k)];
            out[(row, k)] = if y > mean && sd > 0.0 { (y - mean) / sd } else { 0.0 };
        }
    }
    Notegram {
        frames: out,
        hop_seconds: noteg.hop_seconds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::hop_seconds;
    use ndarray::Array2;

    fn logspec(frames: Array2<f64>) -> LogSpectrogram {
        LogSpectrogram {
            frames,
            hop_seconds: hop_seconds(),
        }
    }

    #[test]
    fn a440_sits_at_the_in_tune_subbin_of_midi_69() {
        assert!((bin_position(440.0) - 145.0).abs() < 1e-12);
    }

    #[test]
    fn single_linear_bin_spreads_to_at_most_two_log_bins() {
        let mut mag = Array2::zeros((1, SPEC_BINS));
        mag[(0, 200)] = 1.0;
        let out = map_to_log_frequency(&mag);
        let nonzero: Vec<usize> = (0..LOG_BINS)
            .filter(|&k| out.frames[(0, k)] > 0.0)
            .collect();
        assert!(!nonzero.is_empty());
        assert!(nonzero.len() <= 2, "support {nonzero:?}");
        let q = bin_position(200.0 * TARGET_SAMPLE_RATE as f64 / FFT_SIZE as f64);
        for k in nonzero {
            assert!((q - k as f64).abs() < 1.0);
        }
    }

    #[test]
    fn constant_spectrum_maps_to_constant_log_bins() {
        let mag = Array2::from_elem((1, SPEC_BINS), 3.0);
        let out = map_to_log_frequency(&mag);
        // Bins whose kernel saw at least one linear bin reproduce the level.
        let mut checked = 0;
        for k in 0..LOG_BINS {
            let v = out.frames[(0, k)];
            if v > 0.0 {
                assert!((v - 3.0).abs() < 1e-9, "bin {k} = {v}");
                checked += 1;
            }
        }
        assert!(checked > 200, "only {checked} bins populated");
    }

    #[test]
    fn sine_at_440_peaks_at_midi_69_center() {
        let freq = 440.0;
        let n = TARGET_SAMPLE_RATE as usize;
        let audio = crate::audio::AudioBuffer {
            samples: (0..n)
                .map(|i| (2.0 * PI * freq * i as f64 / TARGET_SAMPLE_RATE as f64).sin())
                .collect(),
            sample_rate: TARGET_SAMPLE_RATE,
        };
        let mag = crate::features::magnitude_spectrogram(&audio);
        let out = map_to_log_frequency(&mag);
        let argmax = (0..LOG_BINS)
            .max_by(|&a, &b| out.frames[(0, a)].partial_cmp(&out.frames[(0, b)]).unwrap())
            .unwrap();
        assert_eq!(argmax, 145);
    }

    #[test]
    fn in_tune_impulse_train_yields_zero_delta() {
        let mut frames = Array2::zeros((2, LOG_BINS));
        for k in (1..LOG_BINS).step_by(3) {
            frames[(0, k)] = 1.0;
            frames[(1, k)] = 0.5;
        }
        let est = estimate_tuning(&logspec(frames));
        assert!(!est.degenerate);
        assert!(est.delta.abs() < 1e-12);
        assert!((est.tau - 440.0).abs() < 1e-9);
    }

    #[test]
    fn sharp_subbin_train_reads_as_third_semitone() {
        // Energy one sub-bin above the in-tune comb = +1/3 semitone.
        let mut frames = Array2::zeros((1, LOG_BINS));
        for k in (2..LOG_BINS).step_by(3) {
            frames[(0, k)] = 1.0;
        }
        let est = estimate_tuning(&logspec(frames));
        assert!((est.delta - 1.0 / 3.0).abs() < 1e-9, "delta = {}", est.delta);
    }

    #[test]
    fn empty_spectrogram_is_degenerate() {
        let est = estimate_tuning(&logspec(Array2::zeros((3, LOG_BINS))));
        assert!(est.degenerate);
        assert_eq!(est.delta, 0.0);
    }

    #[test]
    fn retune_identity_and_integer_shift() {
        let mut frames = Array2::zeros((1, LOG_BINS));
        for k in 0..LOG_BINS {
            frames[(0, k)] = (k as f64 * 0.37).sin().abs();
        }
        let spec = logspec(frames.clone());

        let id = retune(
            &spec,
            &TuningEstimate { delta: 0.0, tau: 440.0, degenerate: false },
        );
        assert_eq!(id.frames, frames);

        // tau one semitone sharp: p = 3, exact shift by three bins
        let tau = 440.0 * (1.0f64 / 12.0).exp2();
        let shifted = retune(&spec, &TuningEstimate { delta: 1.0, tau, degenerate: false });
        for k in 0..LOG_BINS - 3 {
            assert!((shifted.frames[(0, k)] - frames[(0, k + 3)]).abs() < 1e-12);
        }
        for k in LOG_BINS - 3..LOG_BINS {
            assert_eq!(shifted.frames[(0, k)], 0.0);
        }

        // tau half a sub-bin sharp: midpoint interpolation
        let tau = 440.0 * (1.0f64 / 72.0).exp2();
        let mid = retune(&spec, &TuningEstimate { delta: 1.0 / 6.0, tau, degenerate: false });
        for k in 0..LOG_BINS - 1 {
            let expect = 0.5 * (frames[(0, k)] + frames[(0, k + 1)]);
            assert!((mid.frames[(0, k)] - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn standardize_constant_frame_is_zero() {
        let noteg = Notegram {
            frames: Array2::from_elem((1, LOG_BINS), 2.5),
            hop_seconds: hop_seconds(),
        };
        let out = standardize(&noteg, 19);
        assert!(out.frames.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn standardize_isolates_an_impulse() {
        let mut frames = Array2::zeros((1, LOG_BINS));
        frames[(0, 100)] = 4.0;
        let noteg = Notegram { frames, hop_seconds: hop_seconds() };
        let out = standardize(&noteg, 19);
        assert!(out.frames[(0, 100)] > 0.0);
        for k in 0..LOG_BINS {
            assert!(out.frames[(0, k)] >= 0.0);
            if k != 100 {
                assert_eq!(out.frames[(0, k)], 0.0, "bin {k}");
            }
        }
    }
}
