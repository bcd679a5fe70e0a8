//! The checks, grouped by the object they examine. Each group turns an
//! ensemble (or a deterministic computation) into `CheckReport`s.

pub mod decay;
pub mod decomposition;
pub mod distribution;
pub mod fsum;
pub mod girsanov;
pub mod ou;
pub mod planner;
pub mod regularity;

use gaussian_objects::{NoiseAddress, NoiseStream};

use crate::report::{CheckReport, Verdict};

pub(crate) fn address(seed: u64, tag: u64, sample: u64) -> NoiseAddress {
    NoiseAddress {
        stream: NoiseStream::new(seed).with_tag(tag).with_sample(sample),
        level: 0,
        step: 0,
    }
}

/// `|measured - predicted| ≤ tolerance`.
pub(crate) fn within(
    check: impl Into<String>,
    reference: &str,
    predicted: f64,
    measured: f64,
    tolerance: f64,
    fingerprint: &str,
) -> CheckReport {
    CheckReport {
        check: check.into(),
        reference: reference.to_owned(),
        predicted,
        measured,
        ci: None,
        tolerance,
        verdict: Verdict::from_bool((measured - predicted).abs() <= tolerance),
        note: String::new(),
        fingerprint: fingerprint.to_owned(),
    }
}

/// A report whose verdict the caller decided.
pub(crate) fn judged(
    check: impl Into<String>,
    reference: &str,
    predicted: f64,
    measured: f64,
    tolerance: f64,
    verdict: Verdict,
    fingerprint: &str,
) -> CheckReport {
    CheckReport {
        check: check.into(),
        reference: reference.to_owned(),
        predicted,
        measured,
        ci: None,
        tolerance,
        verdict,
        note: String::new(),
        fingerprint: fingerprint.to_owned(),
    }
}

impl CheckReport {
    pub fn with_ci(mut self, center: f64, half_width: f64) -> Self {
        self.ci = Some([center - half_width, center + half_width]);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn with_note_suffix(mut self, more: impl AsRef<str>) -> Self {
        self.note.push_str(more.as_ref());
        self
    }
}
