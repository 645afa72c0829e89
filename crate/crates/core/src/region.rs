use serde::{Deserialize, Serialize};
use std::fmt;

/// Identifier of a market region / dynamic area (e.g. `QLD`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RegionId(String);

impl RegionId {
    pub fn new(id: impl Into<String>) -> Self {
        RegionId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Region ids appear inside case labels, where `-` is a separator.
    pub fn is_label_safe(&self) -> bool {
        !self.0.is_empty() && self.0.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
    }
}

impl fmt::Display for RegionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for RegionId {
    fn from(s: &str) -> Self {
        RegionId(s.to_string())
    }
}

impl From<String> for RegionId {
    fn from(s: String) -> Self {
        RegionId(s)
    }
}

/// The four NEM areas in their radial order.
pub fn nem_regions() -> Vec<RegionId> {
    ["QLD", "NSW", "VIC", "SA"].iter().map(|r| RegionId::from(*r)).collect()
}
