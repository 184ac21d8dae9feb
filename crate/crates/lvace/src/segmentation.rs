//! Chord-boundary segmentation and segment tiling.
//!
//! Validation-path segmentation decodes the chromagram with a 217-state
//! GMM-HMM whose per-state diagonal Gaussians are built from chord templates;
//! the training path quantizes ground-truth annotations to frames instead.
//! Either way, the resulting segments are tiled to a fixed number of frames
//! for the classifiers.

use crate::chord::{ChordLabel, NUM_STATES};
use crate::error::Error;
use crate::features::{Chromagram, CHROMA_DIMS};
use ndarray::{Array2, ArrayView2};
use std::f64::consts::PI;

/// Default ratio of self-transition weight to any other transition weight.
pub const DEFAULT_SELF_WEIGHT: f64 = 99.99;

/// Emission and transition parameters of the 217-state chord HMM.
///
/// Dims 0-11 observe the bass chroma, dims 12-23 the treble chroma, matching
/// the [`Chromagram`] layout.
#[derive(Debug, Clone)]
pub struct HmmSpec {
    /// Per-state emission means, 217 x 24.
    pub means: Array2<f64>,
    /// Per-state emission variances, 217 x 24; all positive.
    pub vars: Array2<f64>,
    /// Self-transition weight relative to a unit off-diagonal weight.
    pub self_weight: f64,
}

/// Builds the chord HMM from the vocabulary templates.
///
/// Bass dims: the chord bass gets (mean 1, var 0.1); other chord tones
/// (mean 1, var 0.5); non-chord classes (mean 0, var 0.1). Treble dims:
/// chord tones (mean 1, var 0.2); others (mean 0, var 0.2). The no-chord
/// state expects every dim at (mean 1, var 0.2).
pub fn build_hmm(self_weight: f64) -> HmmSpec {
    let mut means = Array2::zeros((NUM_STATES, CHROMA_DIMS));
    let mut vars = Array2::zeros((NUM_STATES, CHROMA_DIMS));
    for state in 0..NUM_STATES {
        let label = ChordLabel::from_state_index(state);
        if label == ChordLabel::NoChord {
            for d in 0..CHROMA_DIMS {
                means[(state, d)] = 1.0;
                vars[(state, d)] = 0.2;
            }
            continue;
        }
        let template = label.template();
        let bass = template.bass().expect("chord has a bass");
        for pc in 0..12 {
            let pc_class = crate::chord::PitchClass::new(pc as i32);
            let is_tone = template.contains(pc_class);
            // bass half
            let (mu, var) = if pc_class == bass {
                (1.0, 0.1)
            } else if is_tone {
                (1.0, 0.5)
            } else {
                (0.0, 0.1)
            };
            means[(state, pc)] = mu;
            vars[(state, pc)] = var;
            // treble half
            let (mu, var) = if is_tone { (1.0, 0.2) } else { (0.0, 0.2) };
            means[(state, 12 + pc)] = mu;
            vars[(state, 12 + pc)] = var;
        }
    }
    HmmSpec {
        means,
        vars,
        self_weight,
    }
}

impl HmmSpec {
    /// Diagonal-Gaussian log density of one chroma frame under one state.
    pub fn log_emission(&self, state: usize, chroma: &[f64]) -> f64 {
        assert!(state < NUM_STATES);
        assert_eq!(chroma.len(), CHROMA_DIMS);
        let mut acc = 0.0;
        for d in 0..CHROMA_DIMS {
            let var = self.vars[(state, d)];
            let diff = chroma[d] - self.means[(state, d)];
            acc += -0.5 * (2.0 * PI * var).ln() - diff * diff / (2.0 * var);
        }
        acc
    }

    /// Log transition matrix: `self_weight` on the diagonal, 1 elsewhere,
    /// rows normalized.
    fn log_transition(&self) -> Array2<f64> {
        let w = 1.0 / (NUM_STATES as f64 - 1.0 + self.self_weight);
        let log_other = w.ln();
        let log_self = (self.self_weight * w).ln();
        Array2::from_shape_fn((NUM_STATES, NUM_STATES), |(i, j)| {
            if i == j {
                log_self
            } else {
                log_other
            }
        })
    }
}

/// A half-open frame interval with an optional chord label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    pub label: Option<ChordLabel>,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }
}

/// Maximum a-posteriori state path for arbitrary log-domain HMM tables.
///
/// `log_emit` is M x S. Ties break toward the lower state index, both per
/// step and at the final frame.
pub fn viterbi_path(
    log_prior: &[f64],
    log_trans: &Array2<f64>,
    log_emit: &Array2<f64>,
) -> Vec<usize> {
    let (m, s) = log_emit.dim();
    assert!(m >= 1);
    assert_eq!(log_prior.len(), s);
    assert_eq!(log_trans.dim(), (s, s));

    let mut delta: Vec<f64> = (0..s).map(|j| log_prior[j] + log_emit[(0, j)]).collect();
    let mut back = Array2::<u32>::zeros((m, s));
    let mut next = vec![0.0; s];
    for t in 1..m {
        for j in 0..s {
            let mut best = f64::NEG_INFINITY;
            let mut arg = 0;
            for i in 0..s {
                let cand = delta[i] + log_trans[(i, j)];
                if cand > best {
                    best = cand;
                    arg = i;
                }
            }
            next[j] = best + log_emit[(t, j)];
            back[(t, j)] = arg as u32;
        }
        std::mem::swap(&mut delta, &mut next);
    }
    let mut state = 0;
    let mut best = f64::NEG_INFINITY;
    for (j, &v) in delta.iter().enumerate() {
        if v > best {
            best = v;
            state = j;
        }
    }
    let mut path = vec![0usize; m];
    path[m - 1] = state;
    for t in (1..m).rev() {
        state = back[(t, state)] as usize;
        path[t - 1] = state;
    }
    path
}

/// Total log probability of a given state path (prior + transitions +
/// emissions); the quantity Viterbi maximizes.
pub fn path_log_probability(
    log_prior: &[f64],
    log_trans: &Array2<f64>,
    log_emit: &Array2<f64>,
    path: &[usize],
) -> f64 {
    let mut acc = log_prior[path[0]] + log_emit[(0, path[0])];
    for t in 1..path.len() {
        acc += log_trans[(path[t - 1], path[t])] + log_emit[(t, path[t])];
    }
    acc
}

/// Decodes a chromagram into chord-homogeneous segments.
pub fn viterbi(hmm: &HmmSpec, chroma: &Chromagram) -> Vec<Segment> {
    let (m, _) = chroma.frames.dim();
    assert!(m >= 1, "need at least one frame");
    let log_prior = vec![(1.0 / NUM_STATES as f64).ln(); NUM_STATES];
    let log_trans = hmm.log_transition();
    let mut log_emit = Array2::zeros((m, NUM_STATES));
    for t in 0..m {
        let frame = chroma.frames.row(t);
        let frame = frame.as_slice().expect("contiguous row");
        for s in 0..NUM_STATES {
            log_emit[(t, s)] = hmm.log_emission(s, frame);
        }
    }
    let path = viterbi_path(&log_prior, &log_trans, &log_emit);
    merge_path(&path)
}

/// Collapses a frame-level state path into labeled segments.
fn merge_path(path: &[usize]) -> Vec<Segment> {
    let mut segments = Vec::new();
    let mut start = 0;
    for t in 1..=path.len() {
        if t == path.len() || path[t] != path[start] {
            segments.push(Segment {
                start,
                end: t,
                label: Some(ChordLabel::from_state_index(path[start])),
            });
            start = t;
        }
    }
    segments
}

/// Quantizes ground-truth annotations `(startSec, endSec, label)` onto the
/// frame grid. Gaps become no-chord segments, zero-length quantized
/// intervals are dropped, and the output partitions `[0, m)`.
pub fn segment_by_ground_truth(
    annotations: &[(f64, f64, ChordLabel)],
    hop_seconds: f64,
    m: usize,
) -> Result<Vec<Segment>, Error> {
    for window in annotations.windows(2) {
        if window[1].0 < window[0].1 - 1e-9 {
            return Err(Error::InvalidAnnotation(format!(
                "interval starting at {:.6} s overlaps its predecessor",
                window[1].0
            )));
        }
    }
    for &(start, end, _) in annotations {
        if end <= start {
            return Err(Error::InvalidAnnotation(format!(
                "interval [{start:.6}, {end:.6}) has nonpositive length"
            )));
        }
    }
    let quantize = |sec: f64| -> usize { ((sec / hop_seconds).round().max(0.0) as usize).min(m) };
    let mut segments = Vec::new();
    let mut cursor = 0usize;
    for &(start_sec, end_sec, label) in annotations {
        let start = quantize(start_sec).max(cursor);
        let end = quantize(end_sec);
        if start > cursor {
            segments.push(Segment {
                start: cursor,
                end: start,
                label: Some(ChordLabel::NoChord),
            });
            cursor = start;
        }
        if end > cursor {
            segments.push(Segment {
                start: cursor,
                end,
                label: Some(label),
            });
            cursor = end;
        }
    }
    if cursor < m {
        segments.push(Segment {
            start: cursor,
            end: m,
            label: Some(ChordLabel::NoChord),
        });
    }
    Ok(segments)
}

/// A segment averaged down to exactly N frames.
#[derive(Debug, Clone)]
pub struct TiledSegment {
    /// N x D feature matrix.
    pub frames: Array2<f64>,
    pub label: Option<ChordLabel>,
}

/// Tiles `frames` (m x D, m >= 1) into exactly `n` rows: the segment is
/// padded by repeating its last frame until divisible by `n`, then each of
/// the `n` equal sub-segments is averaged into one row.
pub fn tile_segment(frames: ArrayView2<f64>, n: usize) -> Array2<f64> {
    let (m, dims) = frames.dim();
    assert!(m >= 1 && n >= 1);
    let padded = n * m.div_ceil(n);
    let sub = padded / n;
    let mut out = Array2::zeros((n, dims));
    for i in 0..n {
        for j in i * sub..(i + 1) * sub {
            let src = j.min(m - 1);
            for d in 0..dims {
                out[(i, d)] += frames[(src, d)];
            }
        }
        for d in 0..dims {
            out[(i, d)] /= sub as f64;
        }
    }
    out
}

/// Tiles every segment of a feature matrix, carrying labels along.
pub fn tile_segments(
    features: &Array2<f64>,
    segments: &[Segment],
    n: usize,
) -> Vec<TiledSegment> {
    segments
        .iter()
        .map(|seg| TiledSegment {
            frames: tile_segment(
                features.slice(ndarray::s![seg.start..seg.end, ..]),
                n,
            ),
            label: seg.label,
        })
        .collect()
}

/// Writes segments as `<startFrame> <endFrame> <label>` lines (`-` when a
/// segment carries no label).
pub fn write_segments(path: &std::path::Path, segments: &[Segment]) -> Result<(), Error> {
    use std::fmt::Write as _;
    let mut text = String::new();
    for seg in segments {
        match seg.label {
            Some(label) => writeln!(text, "{} {} {}", seg.start, seg.end, label).unwrap(),
            None => writeln!(text, "{} {} -", seg.start, seg.end).unwrap(),
        }
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
