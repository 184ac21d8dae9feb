//! Audio input: WAV decoding, stereo downmix, and resampling.
//!
//! Every downstream stage assumes mono audio at [`TARGET_SAMPLE_RATE`].

use crate::error::Error;
use std::path::Path;

/// Sample rate the feature extractor operates at.
pub const TARGET_SAMPLE_RATE: u32 = 11025;

/// Mono audio at a known sample rate, amplitudes nominally in [-1, 1].
#[derive(Debug, Clone)]
pub struct AudioBuffer {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
}

impl AudioBuffer {
    pub fn duration_seconds(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }
}

/// Reads a RIFF/WAVE file (PCM integer or 32-bit float, mono or stereo),
/// downmixes stereo by averaging, and resamples to 11025 Hz.
pub fn load_and_resample(path: &Path) -> Result<AudioBuffer, Error> {
    let reader = hound::WavReader::open(path).map_err(|e| match e {
        hound::Error::IoError(io) => Error::io(path, io),
        other => Error::UnsupportedFormat(format!("{}: {}", path.display(), other)),
    })?;
    let spec = reader.spec();
    if spec.channels == 0 || spec.channels > 2 {
        return Err(Error::UnsupportedFormat(format!(
            "{}: {} channels",
            path.display(),
            spec.channels
        )));
    }
    let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Float, 32) => reader
            .into_samples::<f32>()
            .map(|s| s.map(|v| v as f64))
            .collect::<Result<_, _>>()
            .map_err(|e| Error::UnsupportedFormat(format!("{}: {}", path.display(), e)))?,
        (hound::SampleFormat::Int, bits @ (16 | 24 | 32)) => {
            let scale = 1.0 / (1i64 << (bits - 1)) as f64;
            reader
                .into_samples::<i32>()
                .map(|s| s.map(|v| v as f64 * scale))
                .collect::<Result<_, _>>()
                .map_err(|e| Error::UnsupportedFormat(format!("{}: {}", path.display(), e)))?
        }
        (fmt, bits) => {
            return Err(Error::UnsupportedFormat(format!(
                "{}: {:?} {} bits",
                path.display(),
                fmt,
                bits
            )))
        }
    };
    let mono = if spec.channels == 2 {
        interleaved
            .chunks_exact(2)
            .map(|lr| 0.5 * (lr[0] + lr[1]))
            .collect()
    } else {
        interleaved
    };
    Ok(resample(
        &AudioBuffer {
            samples: mono,
            sample_rate: spec.sample_rate,
        },
        TARGET_SAMPLE_RATE,
    ))
}

/// Resamples with a 64-tap Kaiser-windowed sinc filter. Equal input and
/// output rates pass the samples through untouched.
pub fn resample(audio: &AudioBuffer, out_rate: u32) -> AudioBuffer {
    let in_rate = audio.sample_rate;
    if in_rate == out_rate {
        return audio.clone();
    }
    let ratio = out_rate as f64 / in_rate as f64;
    let out_len = (audio.samples.len() as u64 * out_rate as u64 / in_rate as u64) as usize;
    // Cutoff just below the narrower Nyquist; half the taps sit on each side.
    let cutoff = 0.5 * 0.95 * ratio.min(1.0);
    const HALF_TAPS: i64 = 32;
    const KAISER_BETA: f64 = 8.6;
    let denom = bessel_i0(KAISER_BETA);

    let mut out = Vec::with_capacity(out_len);
    for n in 0..out_len {
        let center = n as f64 / ratio;
        let lo = center.floor() as i64 - HALF_TAPS + 1;
        let mut acc = 0.0;
        let mut norm = 0.0;
        for m in lo..lo + 2 * HALF_TAPS {
            let u = center - m as f64;
            let frac = u / HALF_TAPS as f64;
            if frac.abs() >= 1.0 {
                continue;
            }
            let window = bessel_i0(KAISER_BETA * (1.0 - frac * frac).sqrt()) / denom;
            let weight = 2.0 * cutoff * sinc(2.0 * cutoff * u) * window;
            norm += weight;
            if m >= 0 {
                if let Some(&x) = audio.samples.get(m as usize) {
                    acc += weight * x;
                }
            }
        }
        out.push(if norm != 0.0 { acc / norm } else { 0.0 });
    }
    AudioBuffer {
        samples: out,
        sample_rate: out_rate,
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        let px = std::f64::consts::PI * x;
        px.sin() / px
    }
}

/// Modified Bessel function of the first kind, order zero (series expansion).
fn bessel_i0(x: f64) -> f64 {
    let half = x / 2.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..32 {
        term *= (half / k as f64) * (half / k as f64);
        sum += term;
        if term < 1e-16 * sum {
            break;
        }
    }
    sum
}

/// Writes mono samples as a 16-bit PCM WAV file.
pub fn write_wav(path: &Path, audio: &AudioBuffer) -> Result<(), Error> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: audio.sample_rate,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut writer = hound::WavWriter::create(path, spec).map_err(|e| match e {
        hound::Error::IoError(io) => Error::io(path, io),
        other => Error::UnsupportedFormat(other.to_string()),
    })?;
    for &s in &audio.samples {
        let v = (s.clamp(-1.0, 1.0) * i16::MAX as f64).round() as i16;
        writer
            .write_sample(v)
            .map_err(|e| Error::UnsupportedFormat(e.to_string()))?;
    }
    writer
        .finalize()
        .map_err(|e| Error::UnsupportedFormat(e.to_string()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine(freq: f64, rate: u32, seconds: f64) -> AudioBuffer {
        let n = (seconds * rate as f64).round() as usize;
        AudioBuffer {
            samples: (0..n)
                .map(|i| (2.0 * std::f64::consts::PI * freq * i as f64 / rate as f64).sin())
                .collect(),
            sample_rate: rate,
        }
    }

    #[test]
    fn output_length_follows_rate_ratio() {
        let buf = sine(440.0, 44100, 1.0);
        let out = resample(&buf, 11025);
        assert_eq!(out.samples.len(), 11025);
        assert_eq!(out.sample_rate, 11025);
    }

    #[test]
    fn same_rate_is_identity() {
        let buf = sine(440.0, 11025, 0.5);
        let out = resample(&buf, 11025);
        assert_eq!(out.samples, buf.samples);
    }

    #[test]
    fn downsampled_sine_keeps_frequency() {
        let buf = sine(440.0, 44100, 1.0);
        let out = resample(&buf, 11025);
        // Count zero crossings away from the filter edges.
        let inner = &out.samples[200..out.samples.len() - 200];
        let crossings = inner.windows(2).filter(|w| w[0] < 0.0 && w[1] >= 0.0).count();
        let seconds = inner.len() as f64 / 11025.0;
        let freq = crossings as f64 / seconds;
        assert!((freq - 440.0).abs() < 2.0, "measured {freq} Hz");
    }

    #[test]
    fn stereo_cancellation_downmixes_to_silence() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cancel.wav");
        let spec = hound::WavSpec {
            channels: 2,
            sample_rate: 44100,
            bits_per_sample: 16,
            sample_format: hound::SampleFormat::Int,
        };
        let mut writer = hound::WavWriter::create(&path, spec).unwrap();
        for i in 0..44100 {
            let v = ((i as f64 * 0.01).sin() * 10000.0) as i16;
            writer.write_sample(v).unwrap();
            writer.write_sample(-v).unwrap();
        }
        writer.finalize().unwrap();
        let audio = load_and_resample(&path).unwrap();
        assert!(audio.samples.iter().all(|&s| s.abs() < 1e-4));
    }

    #[test]
    fn wav_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tone.wav");
        let buf = sine(440.0, 11025, 0.25);
        write_wav(&path, &buf).unwrap();
        let back = load_and_resample(&path).unwrap();
        assert_eq!(back.samples.len(), buf.samples.len());
        for (a, b) in back.samples.iter().zip(&buf.samples) {
            assert!((a - b).abs() < 1.0 / 16384.0);
        }
    }
}
