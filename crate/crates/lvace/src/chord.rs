//! The SeventhsBass chord vocabulary.
//!
//! Eighteen chord types — maj, min, maj7, 7, min7 and all of their
//! inversions — over twelve roots, plus a no-chord symbol, give 217 classes.
//! Each class has a stable state index used by the HMM segmenter and the
//! neural classifiers, a pitch-class template used to build emission models,
//! and a text form used in `.lab` annotation files.

use crate::error::Error;
use std::fmt;

/// Number of chord qualities (type + bass degree pairs) in the vocabulary.
pub const NUM_QUALITIES: usize = 18;

/// Total number of classifier / HMM states: 12 roots x 18 qualities + no-chord.
pub const NUM_STATES: usize = 12 * NUM_QUALITIES + 1;

/// State index reserved for the no-chord symbol.
pub const NO_CHORD_STATE: usize = NUM_STATES - 1;

/// A pitch class: semitones above C, modulo 12.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PitchClass(u8);

impl PitchClass {
    /// Wraps any semitone offset into [0, 12).
    pub fn new(semitones: i32) -> Self {
        PitchClass(semitones.rem_euclid(12) as u8)
    }

    /// Semitones above C, in [0, 12).
    pub fn value(self) -> u8 {
        self.0
    }

    /// Transposition by `k` semitones, modulo 12.
    pub fn transpose(self, k: i32) -> Self {
        PitchClass::new(self.0 as i32 + k)
    }
}

impl fmt::Display for PitchClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const NAMES: [&str; 12] = [
            "C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B",
        ];
        f.write_str(NAMES[self.0 as usize])
    }
}

/// The five base chord types of the vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChordKind {
    Maj,
    Min,
    Maj7,
    Dom7,
    Min7,
}

impl ChordKind {
    /// Chord-tone intervals in semitones above the root.
    pub fn intervals(self) -> &'static [u8] {
        match self {
            ChordKind::Maj => &[0, 4, 7],
            ChordKind::Min => &[0, 3, 7],
            ChordKind::Maj7 => &[0, 4, 7, 11],
            ChordKind::Dom7 => &[0, 4, 7, 10],
            ChordKind::Min7 => &[0, 3, 7, 10],
        }
    }

    /// Text form used in chord symbols (`maj`, `min`, `maj7`, `7`, `min7`).
    pub fn name(self) -> &'static str {
        match self {
            ChordKind::Maj => "maj",
            ChordKind::Min => "min",
            ChordKind::Maj7 => "maj7",
            ChordKind::Dom7 => "7",
            ChordKind::Min7 => "min7",
        }
    }

    /// The triad obtained by dropping any seventh.
    pub fn triad(self) -> ChordKind {
        match self {
            ChordKind::Maj | ChordKind::Maj7 | ChordKind::Dom7 => ChordKind::Maj,
            ChordKind::Min | ChordKind::Min7 => ChordKind::Min,
        }
    }
}

/// A chord type together with its bass interval: one of the 18 vocabulary
/// qualities. The bass interval is restricted to the chord's own tones, so
/// `(kind, bass)` pairs outside the listing below cannot be constructed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ChordQuality {
    kind: ChordKind,
    bass_interval: u8,
}

/// The 18 qualities in their canonical enumeration order. State indices,
/// model outputs, and serialized files all rely on this order staying fixed.
pub const QUALITIES: [ChordQuality; NUM_QUALITIES] = [
    ChordQuality { kind: ChordKind::Maj, bass_interval: 0 },
    ChordQuality { kind: ChordKind::Maj, bass_interval: 4 },
    ChordQuality { kind: ChordKind::Maj, bass_interval: 7 },
    ChordQuality { kind: ChordKind::Min, bass_interval: 0 },
    ChordQuality { kind: ChordKind::Min, bass_interval: 3 },
    ChordQuality { kind: ChordKind::Min, bass_interval: 7 },
    ChordQuality { kind: ChordKind::Maj7, bass_interval: 0 },
    ChordQuality { kind: ChordKind::Maj7, bass_interval: 4 },
    ChordQuality { kind: ChordKind::Maj7, bass_interval: 7 },
    ChordQuality { kind: ChordKind::Maj7, bass_interval: 11 },
    ChordQuality { kind: ChordKind::Dom7, bass_interval: 0 },
    ChordQuality { kind: ChordKind::Dom7, bass_interval: 4 },
    ChordQuality { kind: ChordKind::Dom7, bass_interval: 7 },
    ChordQuality { kind: ChordKind::Dom7, bass_interval: 10 },
    ChordQuality { kind: ChordKind::Min7, bass_interval: 0 },
    ChordQuality { kind: ChordKind::Min7, bass_interval: 3 },
    ChordQuality { kind: ChordKind::Min7, bass_interval: 7 },
    ChordQuality { kind: ChordKind::Min7, bass_interval: 10 },
];

impl ChordQuality {
    /// Builds a quality, rejecting bass intervals that are not chord tones.
    pub fn new(kind: ChordKind, bass_interval: u8) -> Result<Self, Error> {
        if kind.intervals().contains(&bass_interval) {
            Ok(ChordQuality { kind, bass_interval })
        } else {
            Err(Error::OutOfVocabulary(format!(
                "{} with bass interval {}",
                kind.name(),
                bass_interval
            )))
        }
    }

    pub fn kind(self) -> ChordKind {
        self.kind
    }

    /// Bass offset from the root in semitones; 0 for root position.
    pub fn bass_interval(self) -> u8 {
        self.bass_interval
    }

    /// Position of this quality in the canonical enumeration.
    pub fn index(self) -> usize {
        QUALITIES.iter().position(|q| *q == self).expect("quality in table")
    }

    /// Quality text including the inversion suffix, e.g. `min7/b7`.
    pub fn name(self) -> String {
        match self.bass_degree() {
            Some(deg) => format!("{}/{}", self.kind.name(), deg),
            None => self.kind.name().to_string(),
        }
    }

    /// Degree name of the bass interval (`3`, `b3`, `5`, `7`, `b7`), or
    /// `None` in root position.
    pub fn bass_degree(self) -> Option<&'static str> {
        match self.bass_interval {
            0 => None,
            3 => Some("b3"),
            4 => Some("3"),
            7 => Some("5"),
            10 => Some("b7"),
            11 => Some("7"),
            _ => unreachable!("validated on construction"),
        }
    }
}

/// A chord label: the classification target. Either a (root, quality) pair
/// from the SeventhsBass vocabulary or the no-chord symbol `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChordLabel {
    NoChord,
    Chord { root: PitchClass, quality: ChordQuality },
}

impl ChordLabel {
    /// Convenience constructor from a root pitch class and quality.
    pub fn chord(root: PitchClass, quality: ChordQuality) -> Self {
        ChordLabel::Chord { root, quality }
    }

    /// Parses a chord symbol of the form `<ROOT>:<quality>[/<degree>]` or `N`.
    ///
    /// Roots are letters A-G with optional `#`/`b` accidentals; enharmonic
    /// spellings collapse to the same pitch class. A bare root (no `:`) is
    /// read as a major chord, matching common `.lab` usage. Qualities outside
    /// the vocabulary yield [`Error::OutOfVocabulary`]; anything unreadable
    /// yields [`Error::MalformedLabel`].
    pub fn parse(text: &str) -> Result<Self, Error> {
        let text = text.trim();
        if text == "N" || text == "NC" || text == "N.C." {
            return Ok(ChordLabel::NoChord);
        }
        let (root_part, rest) = match text.split_once(':') {
            Some((r, q)) => (r, Some(q)),
            None => (text, None),
        };
        let root = parse_root(root_part).ok_or_else(|| Error::MalformedLabel(text.to_string()))?;
        let (quality_part, bass_part) = match rest {
            Some(q) => match q.split_once('/') {
                Some((quality, bass)) => (quality, Some(bass)),
                None => (q, None),
            },
            None => ("maj", None),
        };
        if quality_part.is_empty() {
            return Err(Error::MalformedLabel(text.to_string()));
        }
        let kind = match quality_part {
            "maj" => ChordKind::Maj,
            "min" => ChordKind::Min,
            "maj7" => ChordKind::Maj7,
            "7" => ChordKind::Dom7,
            "min7" => ChordKind::Min7,
            _ => return Err(Error::OutOfVocabulary(text.to_string())),
        };
        let bass_interval = match bass_part {
            None => 0,
            Some("3") => 4,
            Some("b3") => 3,
            Some("5") => 7,
            Some("7") => 11,
            Some("b7") => 10,
            Some(_) => return Err(Error::OutOfVocabulary(text.to_string())),
        };
        let quality = ChordQuality::new(kind, bass_interval)
            .map_err(|_| Error::OutOfVocabulary(text.to_string()))?;
        Ok(ChordLabel::Chord { root, quality })
    }

    /// Lenient parse: anything malformed or outside the vocabulary becomes
    /// no-chord, the convention real annotation corpora require.
    pub fn parse_lenient(text: &str) -> Self {
        ChordLabel::parse(text).unwrap_or(ChordLabel::NoChord)
    }

    /// The stable state index in [0, 216]: `root * 18 + quality` for chords,
    /// 216 for no-chord.
    pub fn state_index(self) -> usize {
        match self {
            ChordLabel::NoChord => NO_CHORD_STATE,
            ChordLabel::Chord { root, quality } => {
                root.value() as usize * NUM_QUALITIES + quality.index()
            }
        }
    }

    /// Inverse of [`state_index`](Self::state_index).
    ///
    /// # Panics
    /// Panics if `index >= 217`.
    pub fn from_state_index(index: usize) -> Self {
        assert!(index < NUM_STATES, "state index {index} out of range");
        if index == NO_CHORD_STATE {
            ChordLabel::NoChord
        } else {
            ChordLabel::Chord {
                root: PitchClass::new((index / NUM_QUALITIES) as i32),
                quality: QUALITIES[index % NUM_QUALITIES],
            }
        }
    }

    /// Pitch-class template: the absolute chord tones and the bass note.
    /// No-chord yields the empty template.
    pub fn template(self) -> ChordTemplate {
        match self {
            ChordLabel::NoChord => ChordTemplate {
                pitch_classes: Vec::new(),
                bass: None,
            },
            ChordLabel::Chord { root, quality } => ChordTemplate {
                pitch_classes: quality
                    .kind()
                    .intervals()
                    .iter()
                    .map(|&i| root.transpose(i as i32))
                    .collect(),
                bass: Some(root.transpose(quality.bass_interval() as i32)),
            },
        }
    }

    /// Shifts the root by `k` semitones; quality and inversion are kept and
    /// no-chord is a fixed point.
    pub fn transpose(self, k: i32) -> Self {
        match self {
            ChordLabel::NoChord => ChordLabel::NoChord,
            ChordLabel::Chord { root, quality } => ChordLabel::Chord {
                root: root.transpose(k),
                quality,
            },
        }
    }

    /// Iterator over all 217 labels in state-index order.
    pub fn all() -> impl Iterator<Item = ChordLabel> {
        (0..NUM_STATES).map(ChordLabel::from_state_index)
    }
}

impl fmt::Display for ChordLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChordLabel::NoChord => f.write_str("N"),
            ChordLabel::Chord { root, quality } => write!(f, "{}:{}", root, quality.name()),
        }
    }
}

/// Absolute pitch-class content of a chord: its tones plus the bass note.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChordTemplate {
    pitch_classes: Vec<PitchClass>,
    bass: Option<PitchClass>,
}

impl ChordTemplate {
    /// Chord tones as absolute pitch classes; empty for no-chord.
    pub fn pitch_classes(&self) -> &[PitchClass] {
        &self.pitch_classes
    }

    /// The bass pitch class; `None` for no-chord.
    pub fn bass(&self) -> Option<PitchClass> {
        self.bass
    }

    pub fn is_empty(&self) -> bool {
        self.pitch_classes.is_empty()
    }

    /// Membership test for a pitch class among the chord tones.
    pub fn contains(&self, pc: PitchClass) -> bool {
        self.pitch_classes.contains(&pc)
    }
}

fn parse_root(text: &str) -> Option<PitchClass> {
    let mut chars = text.chars();
    let letter = chars.next()?;
    let mut pc: i32 = match letter {
        'C' => 0,
        'D' => 2,
        'E' => 4,
        'F' => 5,
        'G' => 7,
        'A' => 9,
        'B' => 11,
        _ => return None,
    };
    for c in chars {
        match c {
            '#' => pc += 1,
            'b' => pc -= 1,
            _ => return None,
        }
    }
    Some(PitchClass::new(pc))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_canonical_labels() {
        let c_maj = ChordLabel::parse("C:maj").unwrap();
        assert_eq!(
            c_maj,
            ChordLabel::chord(PitchClass::new(0), ChordQuality::new(ChordKind::Maj, 0).unwrap())
        );
        let e_min7_b7 = ChordLabel::parse("E:min7/b7").unwrap();
        assert_eq!(
            e_min7_b7,
            ChordLabel::chord(PitchClass::new(4), ChordQuality::new(ChordKind::Min7, 10).unwrap())
        );
        assert_eq!(ChordLabel::parse("N").unwrap(), ChordLabel::NoChord);
    }

    #[test]
    fn enharmonic_roots_collapse() {
        assert_eq!(
            ChordLabel::parse("C#:maj").unwrap(),
            ChordLabel::parse("Db:maj").unwrap()
        );
        assert_eq!(
            ChordLabel::parse("Fb:min").unwrap(),
            ChordLabel::parse("E:min").unwrap()
        );
    }

    #[test]
    fn bare_root_reads_as_major() {
        assert_eq!(
            ChordLabel::parse("G").unwrap(),
            ChordLabel::parse("G:maj").unwrap()
        );
    }

    #[test]
    fn rejects_unknown_roots_and_qualities() {
        assert!(matches!(
            ChordLabel::parse("X:weird"),
            Err(Error::MalformedLabel(_))
        ));
        assert!(matches!(
            ChordLabel::parse("C:dim"),
            Err(Error::OutOfVocabulary(_))
        ));
        // maj has no seventh, so maj/7 is not a vocabulary member.
        assert!(matches!(
            ChordLabel::parse("C:maj/7"),
            Err(Error::OutOfVocabulary(_))
        ));
        assert_eq!(ChordLabel::parse_lenient("C:dim"), ChordLabel::NoChord);
        assert_eq!(ChordLabel::parse_lenient("X:weird"), ChordLabel::NoChord);
    }

    #[test]
    fn state_index_layout() {
        assert_eq!(ChordLabel::parse("C:maj").unwrap().state_index(), 0);
        assert_eq!(ChordLabel::NoChord.state_index(), 216);
        // D roots start one full quality block after C#.
        assert_eq!(ChordLabel::parse("D:maj").unwrap().state_index(), 2 * 18);
        assert_eq!(ChordLabel::parse("C:min7/b7").unwrap().state_index(), 17);
    }

    #[test]
    fn state_index_is_a_bijection() {
        let mut seen = [false; NUM_STATES];
        for label in ChordLabel::all() {
            let idx = label.state_index();
            assert!(!seen[idx], "index {idx} hit twice");
            seen[idx] = true;
            assert_eq!(ChordLabel::from_state_index(idx), label);
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn print_parse_round_trip_all_labels() {
        for label in ChordLabel::all() {
            let text = label.to_string();
            assert_eq!(ChordLabel::parse(&text).unwrap(), label, "text `{text}`");
        }
    }

    #[test]
    fn templates() {
        let t = ChordLabel::parse("C:maj").unwrap().template();
        assert_eq!(
            t.pitch_classes(),
            &[PitchClass::new(0), PitchClass::new(4), PitchClass::new(7)]
        );
        assert_eq!(t.bass(), Some(PitchClass::new(0)));

        let t = ChordLabel::parse("C:maj/5").unwrap().template();
        assert_eq!(
            t.pitch_classes(),
            &[PitchClass::new(0), PitchClass::new(4), PitchClass::new(7)]
        );
        assert_eq!(t.bass(), Some(PitchClass::new(7)));

        let t = ChordLabel::parse("A:min7").unwrap().template();
        let pcs: Vec<u8> = t.pitch_classes().iter().map(|p| p.value()).collect();
        assert_eq!(pcs, vec![9, 0, 4, 7]);
        assert_eq!(t.bass(), Some(PitchClass::new(9)));

        assert!(ChordLabel::NoChord.template().is_empty());
    }

    #[test]
    fn template_bass_is_always_a_chord_tone() {
        for label in ChordLabel::all() {
            let t = label.template();
            match t.bass() {
                Some(b) => assert!(t.contains(b), "{label}"),
                None => assert_eq!(label, ChordLabel::NoChord),
            }
            assert!(t.pitch_classes().len() == 3 || t.pitch_classes().len() == 4 || t.is_empty());
        }
    }

    #[test]
    fn transposition() {
        let c = ChordLabel::parse("C:maj").unwrap();
        assert_eq!(c.transpose(2), ChordLabel::parse("D:maj").unwrap());
        assert_eq!(ChordLabel::NoChord.transpose(5), ChordLabel::NoChord);
        for label in ChordLabel::all() {
            for k in -6..=5 {
                assert_eq!(label.transpose(k).transpose(-k), label);
            }
        }
    }

    #[test]
    fn transposed_template_is_shifted_template() {
        for label in ChordLabel::all() {
            for k in -6..=5 {
                let shifted = label.transpose(k).template();
                let original = label.template();
                let expect: Vec<PitchClass> = original
                    .pitch_classes()
                    .iter()
                    .map(|p| p.transpose(k))
                    .collect();
                assert_eq!(shifted.pitch_classes(), expect.as_slice());
                assert_eq!(shifted.bass(), original.bass().map(|b| b.transpose(k)));
            }
        }
    }
}
