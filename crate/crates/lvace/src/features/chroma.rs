//! Bass-treble chromagram from note activations.

use super::{Chromagram, NnlsNotegram, CHROMA_DIMS, MIDI_LOW, NNLS_BINS};
use ndarray::Array2;

/// Rayleigh scale of the bass register profile.
pub const BASS_SIGMA: f64 = 16.8;
/// Rayleigh scale of the treble register profile.
pub const TREBLE_SIGMA: f64 = 42.0;

/// Register weighting profile over the 84 semitones: a Rayleigh density in
/// the offset above MIDI 21, normalized to peak at 1.
pub fn rayleigh_profile(sigma: f64) -> [f64; NNLS_BINS] {
    let mut w = [0.0; NNLS_BINS];
    let mut max = 0.0f64;
    for (l, slot) in w.iter_mut().enumerate() {
        let x = l as f64;
        *slot = x / (sigma * sigma) * (-x * x / (2.0 * sigma * sigma)).exp();
        max = max.max(*slot);
    }
    if max > 0.0 {
        for slot in &mut w {
            *slot /= max;
        }
    }
    w
}

/// Folds note activations into the 24-dim bass-treble chromagram.
///
/// Each note's activation is weighted by the bass and treble profiles and
/// summed into its pitch class; each 12-dim half is then L-infinity
/// normalized per frame, all-zero halves staying zero.
pub fn profile_to_chroma(nnls: &NnlsNotegram) -> Chromagram {
    let bass = rayleigh_profile(BASS_SIGMA);
    let treble = rayleigh_profile(TREBLE_SIGMA);
    let (m, bins) = nnls.frames.dim();
    assert_eq!(bins, NNLS_BINS);
    let mut out = Array2::zeros((m, CHROMA_DIMS));
    for row in 0..m {
        for l in 0..NNLS_BINS {
            let act = nnls.frames[(row, l)];
            if act == 0.0 {
                continue;
            }
            let pc = (MIDI_LOW + l) % 12;
            out[(row, pc)] += bass[l] * act;
            out[(row, 12 + pc)] += treble[l] * act;
        }
        for half in 0..2 {
            let lo = half * 12;
            let max = (lo..lo + 12).map(|d| out[(row, d)]).fold(0.0f64, f64::max);
            if max > 0.0 {
                for d in lo..lo + 12 {
                    out[(row, d)] /= max;
                }
            }
        }
    }
    Chromagram {
        frames: out,
        hop_seconds: nnls.hop_seconds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::hop_seconds;

    #[test]
    fn bass_profile_peaks_low_and_dominates_the_top() {
        let w = rayleigh_profile(BASS_SIGMA);
        let peak = (0..NNLS_BINS).max_by(|&a, &b| w[a].partial_cmp(&w[b]).unwrap()).unwrap();
        // Mode of the Rayleigh density sits at sigma above the lowest note.
        let peak_midi = MIDI_LOW + peak;
        assert!((peak_midi as f64 - (MIDI_LOW as f64 + BASS_SIGMA)).abs() <= 1.0);
        assert!((w[peak] - 1.0).abs() < 1e-12);
        assert!(w[peak] >= w[NNLS_BINS - 1]);
        // Treble profile peaks higher up than the bass one.
        let t = rayleigh_profile(TREBLE_SIGMA);
        let tpeak = (0..NNLS_BINS).max_by(|&a, &b| t[a].partial_cmp(&t[b]).unwrap()).unwrap();
        assert!(tpeak > peak);
    }

    #[test]
    fn single_note_lights_one_class_at_unit_value() {
        let mut frames = Array2::zeros((1, NNLS_BINS));
        frames[(0, 60 - MIDI_LOW)] = 0.42; // middle C
        let chroma = profile_to_chroma(&NnlsNotegram {
            frames,
            hop_seconds: hop_seconds(),
        });
        for d in 0..CHROMA_DIMS {
            let expect = if d == 0 || d == 12 { 1.0 } else { 0.0 };
            assert!((chroma.frames[(0, d)] - expect).abs() < 1e-12, "dim {d}");
        }
    }

    #[test]
    fn silent_frame_stays_all_zero() {
        let chroma = profile_to_chroma(&NnlsNotegram {
            frames: Array2::zeros((1, NNLS_BINS)),
            hop_seconds: hop_seconds(),
        });
        assert!(chroma.frames.iter().all(|&v| v == 0.0));
    }
}
