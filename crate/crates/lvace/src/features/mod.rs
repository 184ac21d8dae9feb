//! Feature extraction: from raw audio to the two classifier input
//! representations.
//!
//! The chain and its dimensions per frame:
//!
//! | stage                | output            | bins |
//! |----------------------|-------------------|------|
//! | STFT                 | spectrogram       | 2049 |
//! | linear-log mapping   | log-spectrogram   | 252  |
//! | tuning               | notegram          | 252  |
//! | NNLS                 | NNLS notegram     | 84   |
//! | bass-treble profiling| chromagram        | 24   |
//!
//! The log-frequency axis has three bins per semitone over MIDI notes 21-104;
//! of each triple the middle bin is the in-tune center. The chromagram packs
//! bass pitch classes into dims 0-11 and treble into dims 12-23, each half
//! L-infinity normalized per frame.

mod chroma;
mod logfreq;
mod nnls;
mod stft;

pub use chroma::{profile_to_chroma, rayleigh_profile, BASS_SIGMA, TREBLE_SIGMA};
pub use logfreq::{estimate_tuning, map_to_log_frequency, retune, standardize, bin_position};
pub use nnls::{build_nnls_dictionary, kkt_violation, nnls_notegram, nnls_solve, NnlsSolution};
pub use stft::{magnitude_spectrogram, frame_count, FFT_SIZE, HOP_SIZE, SPEC_BINS};

use crate::audio::{self, AudioBuffer, TARGET_SAMPLE_RATE};
use crate::error::Error;
use ndarray::Array2;
use std::fmt::Write as _;
use std::path::Path;

/// Log-frequency bins: 3 per semitone over MIDI 21..=104.
pub const LOG_BINS: usize = 252;
/// Sub-bins per semitone on the log-frequency axis.
pub const BINS_PER_SEMITONE: usize = 3;
/// Lowest MIDI note on the log-frequency axis.
pub const MIDI_LOW: usize = 21;
/// Highest MIDI note on the log-frequency axis.
pub const MIDI_HIGH: usize = 104;
/// Note-activation bins: one per semitone, MIDI 21..=104.
pub const NNLS_BINS: usize = 84;
/// Chromagram dimensions: 12 bass + 12 treble pitch classes.
pub const CHROMA_DIMS: usize = 24;

/// Seconds between consecutive analysis frames.
pub fn hop_seconds() -> f64 {
    HOP_SIZE as f64 / TARGET_SAMPLE_RATE as f64
}

/// Tuning deviation estimated from the log-spectrogram.
#[derive(Debug, Clone, Copy)]
pub struct TuningEstimate {
    /// Deviation from standard tuning in semitones, in [-0.5, 0.5).
    pub delta: f64,
    /// Tuning reference frequency, 440 * 2^(delta/12).
    pub tau: f64,
    /// Set when the spectrogram was empty and delta defaulted to 0.
    pub degenerate: bool,
}

/// Time-indexed log-frequency magnitude matrix (M x 252).
#[derive(Debug, Clone)]
pub struct LogSpectrogram {
    pub frames: Array2<f64>,
    pub hop_seconds: f64,
}

/// Tuning-corrected, standardized log-spectrogram (M x 252).
#[derive(Debug, Clone)]
pub struct Notegram {
    pub frames: Array2<f64>,
    pub hop_seconds: f64,
}

impl Notegram {
    /// Re-keys the frames `k` semitones up by shifting bins: output bin `b`
    /// reads input bin `b + 3k`, so content lands `k` semitones lower on the
    /// axis and out-shifted bins are zero-filled. Matching ground-truth
    /// labels transpose by `-k`.
    pub fn pitch_shift(&self, k: i32) -> Notegram {
        let shift = 3 * k as i64;
        let (m, bins) = self.frames.dim();
        let mut out = Array2::zeros((m, bins));
        for row in 0..m {
            for b in 0..bins {
                let src = b as i64 + shift;
                if (0..bins as i64).contains(&src) {
                    out[(row, b)] = self.frames[(row, src as usize)];
                }
            }
        }
        Notegram {
            frames: out,
            hop_seconds: self.hop_seconds,
        }
    }
}

/// Per-frame nonnegative note activations (M x 84) plus the dictionary that
/// produced them.
#[derive(Debug, Clone)]
pub struct NnlsNotegram {
    pub frames: Array2<f64>,
    pub hop_seconds: f64,
}

/// Bass-treble chromagram (M x 24): dims 0-11 bass, 12-23 treble, each half
/// L-infinity normalized per frame (or left all-zero).
#[derive(Debug, Clone)]
pub struct Chromagram {
    pub frames: Array2<f64>,
    pub hop_seconds: f64,
}

impl Chromagram {
    /// Re-keys the frames `k` semitones up by rotating each 12-dim half:
    /// output class `c` reads input class `(c + k) mod 12`, the circular
    /// analogue of [`Notegram::pitch_shift`]. Matching ground-truth labels
    /// transpose by `-k`.
    pub fn pitch_shift(&self, k: i32) -> Chromagram {
        let (m, dims) = self.frames.dim();
        let mut out = Array2::zeros((m, dims));
        for row in 0..m {
            for half in 0..2 {
                for c in 0..12 {
                    let src = (c as i32 + k).rem_euclid(12) as usize;
                    out[(row, half * 12 + c)] = self.frames[(row, half * 12 + src)];
                }
            }
        }
        Chromagram {
            frames: out,
            hop_seconds: self.hop_seconds,
        }
    }
}

/// Tunable extraction parameters. Defaults follow the reference pipeline;
/// see the `feature.*` config keys.
#[derive(Debug, Clone)]
pub struct FeatureConfig {
    /// Geometric decline factor of the dictionary overtone series.
    pub s: f64,
    /// Number of partials per dictionary note.
    pub max_partials: usize,
    /// Full width (odd) of the running standardization window, in bins.
    pub std_window_bins: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            s: 0.7,
            max_partials: 20,
            std_window_bins: 19,
        }
    }
}

/// Both input representations extracted from one track.
#[derive(Debug, Clone)]
pub struct FeatureSet {
    pub notegram: Notegram,
    pub chromagram: Chromagram,
    pub tuning: TuningEstimate,
}

/// Runs the full extraction chain on an audio buffer. Input at a different
/// sample rate is resampled to 11025 Hz first.
pub fn extract(input: &AudioBuffer, cfg: &FeatureConfig) -> Result<FeatureSet, Error> {
    let resampled;
    let audio = if input.sample_rate == TARGET_SAMPLE_RATE {
        input
    } else {
        resampled = audio::resample(input, TARGET_SAMPLE_RATE);
        &resampled
    };
    let mag = magnitude_spectrogram(audio);
    let logspec = map_to_log_frequency(&mag);
    let tuning = estimate_tuning(&logspec);
    let notegram = standardize(&retune(&logspec, &tuning), cfg.std_window_bins);
    let dict = build_nnls_dictionary(cfg.s, cfg.max_partials)?;
    let activations = nnls_notegram(&notegram, &dict);
    let chromagram = profile_to_chroma(&activations);
    Ok(FeatureSet {
        notegram,
        chromagram,
        tuning,
    })
}

/// Writes a feature matrix as text: header `<WORD> 1 <M> <dims> <hop>` then
/// one line of space-separated values per frame.
pub fn write_feature_file(
    path: &Path,
    word: &str,
    frames: &Array2<f64>,
    hop_seconds: f64,
) -> Result<(), Error> {
    let (m, dims) = frames.dim();
    let mut text = String::new();
    writeln!(text, "{} 1 {} {} {:.16e}", word, m, dims, hop_seconds).unwrap();
    for row in frames.rows() {
        let mut first = true;
        for v in row {
            if !first {
                text.push(' ');
            }
            write!(text, "{:.16e}", v).unwrap();
            first = false;
        }
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Reads a feature file previously written by [`write_feature_file`],
/// checking the header word.
pub fn read_feature_file(path: &Path, word: &str) -> Result<(Array2<f64>, f64), Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(path, 1, "empty file"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 5 || fields[0] != word || fields[1] != "1" {
        return Err(Error::parse(path, 1, format!("bad {} header", word)));
    }
    let m: usize = fields[2]
        .parse()
        .map_err(|_| Error::parse(path, 1, "bad frame count"))?;
    let dims: usize = fields[3]
        .parse()
        .map_err(|_| Error::parse(path, 1, "bad dimension count"))?;
    let hop: f64 = fields[4]
        .parse()
        .map_err(|_| Error::parse(path, 1, "bad hop seconds"))?;
    let mut frames = Array2::zeros((m, dims));
    let mut row = 0;
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        if row >= m {
            return Err(Error::parse(path, idx + 1, "more rows than declared"));
        }
        let mut col = 0;
        for tok in line.split_whitespace() {
            if col >= dims {
                return Err(Error::parse(path, idx + 1, "more columns than declared"));
            }
            frames[(row, col)] = tok
                .parse()
                .map_err(|_| Error::parse(path, idx + 1, format!("bad value `{tok}`")))?;
            col += 1;
        }
        if col != dims {
            return Err(Error::parse(path, idx + 1, "short row"));
        }
        row += 1;
    }
    if row != m {
        return Err(Error::parse(path, 0, "fewer rows than declared"));
    }
    Ok((frames, hop))
}
