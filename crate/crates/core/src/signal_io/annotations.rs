use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const HEADER: &str = "sample,label";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BeatLabel {
    S1,
    S2,
}

impl BeatLabel {
    pub fn other(self) -> Self {
        match self {
            BeatLabel::S1 => BeatLabel::S2,
            BeatLabel::S2 => BeatLabel::S1,
        }
    }
}

impl fmt::Display for BeatLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BeatLabel::S1 => "S1",
            BeatLabel::S2 => "S2",
        })
    }
}

impl FromStr for BeatLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "S1" => Ok(BeatLabel::S1),
            "S2" => Ok(BeatLabel::S2),
            other => Err(Error::Format(format!("unknown beat label {other:?}"))),
        }
    }
}

/// One heart sound at a 0-based sample position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Beat {
    pub position: usize,
    pub label: BeatLabel,
}

impl Beat {
    pub fn new(position: usize, label: BeatLabel) -> Self {
        Self { position, label }
    }
}

/// Ground-truth or detected S1/S2 beats of one recording.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationSet {
    pub beats: Vec<Beat>,
    pub sample_rate: u32,
}

impl AnnotationSet {
    pub fn new(beats: Vec<Beat>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::Param("annotation sample rate must be positive".into()));
        }
        for (i, w) in beats.windows(2).enumerate() {
            if w[1].position <= w[0].position {
                return Err(Error::Order {
                    line: i + 2,
                    previous: w[0].position,
                    position: w[1].position,
                });
            }
        }
        Ok(Self { beats, sample_rate })
    }

    pub fn len(&self) -> usize {
        self.beats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beats.is_empty()
    }

    pub fn positions(&self) -> Vec<usize> {
        self.beats.iter().map(|b| b.position).collect()
    }

    /// Whether labels follow S1,S2,S1,... (starting from either label).
    pub fn is_alternating(&self) -> bool {
        self.beats.windows(2).all(|w| w[0].label != w[1].label)
    }

    /// Parses the annotation CSV format.
    ///
    /// A `# rate=<hz>` comment declares the rate positions are expressed in;
    /// when it differs from `sample_rate`, positions are rescaled (rounded to
    /// the nearest sample).
    pub fn from_csv_str(text: &str, sample_rate: u32) -> Result<Self> {
        let mut file_rate = None;
        let mut seen_header = false;
        let mut raw: Vec<(usize, usize, BeatLabel)> = Vec::new();

        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(rate) = comment.trim().strip_prefix("rate=") {
                    let rate: u32 = rate
                        .trim()
                        .parse()
                        .map_err(|_| Error::Format(format!("line {lineno}: bad rate comment {line:?}")))?;
                    if rate == 0 {
                        return Err(Error::Format(format!("line {lineno}: zero rate")));
                    }
                    file_rate = Some(rate);
                }
                continue;
            }
            if !seen_header {
                if line != HEADER {
                    return Err(Error::Format(format!(
                        "line {lineno}: expected header {HEADER:?}, found {line:?}"
                    )));
                }
                seen_header = true;
                continue;
            }
            let (pos, label) = line
                .split_once(',')
                .ok_or_else(|| Error::Format(format!("line {lineno}: expected `sample,label`")))?;
            let pos: usize = pos
                .trim()
                .parse()
                .map_err(|_| Error::Format(format!("line {lineno}: non-numeric position {pos:?}")))?;
            let label: BeatLabel = label.trim().parse()?;
            raw.push((lineno, pos, label));
        }
        if !seen_header {
            return Err(Error::Format(format!("missing header {HEADER:?}")));
        }

        let file_rate = file_rate.unwrap_or(sample_rate);
        let rescale = |p: usize| -> usize {
            if file_rate == sample_rate {
                p
            } else {
                (p as f64 * f64::from(sample_rate) / f64::from(file_rate)).round() as usize
            }
        };

        let mut beats = Vec::with_capacity(raw.len());
        let mut prev: Option<usize> = None;
        for (lineno, pos, label) in raw {
            let pos = rescale(pos);
            if let Some(p) = prev {
                if pos <= p {
                    return Err(Error::Order {
                        line: lineno,
                        previous: p,
                        position: pos,
                    });
                }
            }
            prev = Some(pos);
            beats.push(Beat::new(pos, label));
        }

        let set = Self { beats, sample_rate };
        if !set.is_alternating() {
            log::warn!("annotation labels do not strictly alternate S1/S2");
        }
        Ok(set)
    }

    pub fn to_csv_string(&self) -> String {
        let mut s = format!("# rate={}\n{HEADER}\n", self.sample_rate);
        for b in &self.beats {
            s.push_str(&format!("{},{}\n", b.position, b.label));
        }
        s
    }
}

/// Reads an annotation CSV file, expressing positions at `sample_rate`.
pub fn parse_annotations(path: impl AsRef<Path>, sample_rate: u32) -> Result<AnnotationSet> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    AnnotationSet::from_csv_str(&text, sample_rate).map_err(|e| match e {
        Error::Format(msg) => Error::Format(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn read_annotations(path: impl AsRef<Path>) -> Result<AnnotationSet> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let rate = text
        .lines()
        .filter_map(|l| l.trim().strip_prefix('#'))
        .find_map(|c| c.trim().strip_prefix("rate=").and_then(|r| r.trim().parse().ok()))
        .ok_or_else(|| Error::Format(format!("{}: missing `# rate=` comment", path.display())))?;
    AnnotationSet::from_csv_str(&text, rate)
}

pub fn write_annotations(path: impl AsRef<Path>, set: &AnnotationSet) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, set.to_csv_string()).map_err(|e| Error::io(path, e))
}
