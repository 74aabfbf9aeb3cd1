use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DeviceId, PlacementMatrix, ServiceId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    Partition,
    Greedy,
    CloudOnly,
    BruteForce,
}

impl Policy {
    pub fn as_str(self) -> &'static str {
        match self {
            Policy::Partition => "partition",
            Policy::Greedy => "greedy",
            Policy::CloudOnly => "cloud-only",
            Policy::BruteForce => "brute-force",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "partition" => Ok(Policy::Partition),
            "greedy" => Ok(Policy::Greedy),
            "cloud-only" => Ok(Policy::CloudOnly),
            "brute-force" => Ok(Policy::BruteForce),
            other => Err(Error::InvalidParams(format!("unknown policy {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacementEntry {
    pub service: ServiceId,
    pub device: DeviceId,
}

/// On-disk placement: the matrix entries plus the producing policy and the
/// scenario seed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacementFile {
    pub policy: Policy,
    pub seed: u64,
    pub placements: Vec<PlacementEntry>,
}

impl PlacementFile {
    pub fn new(policy: Policy, seed: u64, matrix: &PlacementMatrix) -> Self {
        let placements = matrix.iter().map(|(service, device)| PlacementEntry { service, device }).collect();
        PlacementFile { policy, seed, placements }
    }

    pub fn matrix(&self) -> PlacementMatrix {
        self.placements.iter().map(|e| (e.service, e.device)).collect()
    }
}
