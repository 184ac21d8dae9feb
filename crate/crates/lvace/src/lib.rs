//! Large-vocabulary automatic chord estimation (LVACE).
//!
//! This crate labels audio with a time-aligned sequence of chords drawn from
//! the 217-class *SeventhsBass* vocabulary (maj, min, maj7, 7, min7 in all
//! inversions, over 12 roots, plus no-chord). The processing chain is:
//!
//! ```text
//! audio -> STFT -> log-spectrogram -> tuning -> notegram -> NNLS -> chromagram
//!       -> HMM segmentation -> segment tiling -> neural chord classifier -> .lab
//! ```
//!
//! The stages live in dedicated modules:
//!
//! - [`chord`] — the chord vocabulary: labels, templates, state indexing.
//! - [`features`] — notegram and bass-treble chromagram extraction.
//! - [`segmentation`] — 217-state GMM-HMM Viterbi segmenter and segment tiling.
//! - [`nn`] — the three chord classifiers (FCNN, DBN, BLSTM-RNN) built from
//!   scratch, with their optimizers and training loop.
//! - [`eval`] — chord symbol recall, ACQA, and segmentation quality metrics.
//! - [`pipeline`] — dataset manifests, cross-validation folds, and the
//!   extract/train/predict/evaluate workflows behind the CLI.
//! - [`synth`] — additive synthesis of labelled test tracks.
//!
//! A narrative guide with runnable snippets lives in the `book/` directory of
//! the repository; its code blocks are compiled as doctests via [`doctest`].

pub mod audio;
pub mod chord;
pub mod error;
pub mod eval;
pub mod features;
pub mod nn;
pub mod pipeline;
pub mod segmentation;
pub mod synth;

mod doctest;

pub use chord::{ChordKind, ChordLabel, ChordQuality, ChordTemplate, PitchClass};
pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
