//! Ground-truth class label.

use core::fmt;

/// Binary authenticity label for a video or a feature row.
///
/// `Fake` is the positive class everywhere in this crate: classifier scores
/// are oriented so that larger means "more likely fake", and AUC is computed
/// with fake as the detection target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Label {
    Real,
    Fake,
}

impl Label {
    /// Canonical lowercase name, used in file formats.
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Real => "real",
            Label::Fake => "fake",
        }
    }

    /// Parses the canonical lowercase name.
    pub fn parse(s: &str) -> Option<Label> {
        match s {
            "real" => Some(Label::Real),
            "fake" => Some(Label::Fake),
            _ => None,
        }
    }

    /// 0.0 for real, 1.0 for fake; the regression target used by the trees.
    pub fn as_f64(self) -> f64 {
        match self {
            Label::Real => 0.0,
            Label::Fake => 1.0,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
