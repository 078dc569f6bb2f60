use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeKind {
    /// Joint positions, rotation and serving BS.
    Proposed,
    /// Nearest available BS; positions and rotation optimized.
    NearestBs,
    /// Panel parallel to the ground; positions and BS optimized.
    FixedArv,
    /// Nearest available BS and panel parallel to the ground.
    NearestAndFixedArv,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 4] = [
        SchemeKind::Proposed,
        SchemeKind::NearestBs,
        SchemeKind::FixedArv,
        SchemeKind::NearestAndFixedArv,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Proposed => "PROPOSED",
            SchemeKind::NearestBs => "S1_NEAREST_BS",
            SchemeKind::FixedArv => "S2_FIXED_ARV",
            SchemeKind::NearestAndFixedArv => "S3_NEAREST_AND_FIXED_ARV",
        }
    }

    /// Whether the serving BS is chosen by SINR rather than distance.
    pub fn selects_bs(self) -> bool {
        matches!(self, SchemeKind::Proposed | SchemeKind::FixedArv)
    }

    /// Whether the panel rotation may be optimized.
    pub fn rotates(self) -> bool {
        matches!(self, SchemeKind::Proposed | SchemeKind::NearestBs)
    }
}

/// A scheme and whether it runs on the movable array or on the fixed
/// half-wavelength array. Written as e.g. `S2_FIXED_ARV` or
/// `S2_FIXED_ARV+FPA`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SchemeId {
    pub kind: SchemeKind,
    pub with_fpa: bool,
}

impl SchemeId {
    pub const fn new(kind: SchemeKind, with_fpa: bool) -> Self {
        Self { kind, with_fpa }
    }

    pub const PROPOSED: SchemeId = SchemeId::new(SchemeKind::Proposed, false);
    pub const PROPOSED_FPA: SchemeId = SchemeId::new(SchemeKind::Proposed, true);

    /// Every scheme on the movable array, then every FPA counterpart.
    pub fn all() -> Vec<SchemeId> {
        [false, true]
            .into_iter()
            .flat_map(|fpa| SchemeKind::ALL.map(|k| SchemeId::new(k, fpa)))
            .collect()
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind.name())?;
        if self.with_fpa {
            f.write_str("+FPA")?;
        }
        Ok(())
    }
}

impl FromStr for SchemeId {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        let (name, with_fpa) = match s.strip_suffix("+FPA") {
            Some(rest) => (rest, true),
            None => (s, false),
        };
        SchemeKind::ALL
            .into_iter()
            .find(|k| k.name() == name)
            .map(|kind| SchemeId { kind, with_fpa })
            .ok_or_else(|| HarnessError::Config(format!("unknown scheme `{s}`")))
    }
}

impl TryFrom<String> for SchemeId {
    type Error = HarnessError;

    fn try_from(s: String) -> Result<Self, HarnessError> {
        s.parse()
    }
}

impl From<SchemeId> for String {
    fn from(s: SchemeId) -> String {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in SchemeId::all() {
            assert_eq!(s.to_string().parse::<SchemeId>().unwrap(), s);
        }
        assert_eq!(SchemeId::all().len(), 8);
        assert_eq!(SchemeId::PROPOSED_FPA.to_string(), "PROPOSED+FPA");
        assert!("S4".parse::<SchemeId>().is_err());
    }

    #[test]
    fn serde_uses_the_display_form() {
        let s = SchemeId::new(SchemeKind::NearestAndFixedArv, true);
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, "\"S3_NEAREST_AND_FIXED_ARV+FPA\"");
        assert_eq!(serde_json::from_str::<SchemeId>(&text).unwrap(), s);
    }
}
