//! Short-time Fourier transform front end.

use crate::audio::AudioBuffer;
use ndarray::Array2;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Analysis window length in samples.
pub const FFT_SIZE: usize = 4096;
/// Hop between consecutive frames in samples.
pub const HOP_SIZE: usize = 512;
/// One-sided spectrum size: FFT_SIZE / 2 + 1.
pub const SPEC_BINS: usize = FFT_SIZE / 2 + 1;

/// Number of frames produced for `len` samples; inputs shorter than one
/// window are zero-padded to a single frame.
pub fn frame_count(len: usize) -> usize {
    if len < FFT_SIZE {
        1
    } else {
        1 + (len - FFT_SIZE) / HOP_SIZE
    }
}

/// Hamming-windowed magnitude spectrogram, M x 2049.
pub fn magnitude_spectrogram(audio: &AudioBuffer) -> Array2<f64> {
    let n = audio.samples.len();
    let frames = frame_count(n);
    let window: Vec<f64> = (0..FFT_SIZE)
        .map(|i| {
            0.54 - 0.46 * (2.0 * std::f64::consts::PI * i as f64 / (FFT_SIZE - 1) as f64).cos()
        })
        .collect();

    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(FFT_SIZE);
    let mut scratch = vec![Complex::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let mut buf = vec![Complex::new(0.0, 0.0); FFT_SIZE];

    let mut out = Array2::zeros((frames, SPEC_BINS));
    for m in 0..frames {
        let start = m * HOP_SIZE;
        for i in 0..FFT_SIZE {
            let x = audio.samples.get(start + i).copied().unwrap_or(0.0);
            buf[i] = Complex::new(x * window[i], 0.0);
        }
        fft.process_with_scratch(&mut buf, &mut scratch);
        for k in 0..SPEC_BINS {
            out[(m, k)] = buf[k].norm();
        }
    }
    out
}
