//! Placement policies: the community/closure partition policy, a
//! latency-greedy baseline and an exhaustive oracle for tiny instances.

mod brute;
mod file;
mod greedy;
mod ledger;
mod levels;
mod objective;
mod partition;

pub use brute::{brute_force_place, BRUTE_FORCE_LIMIT};
pub use file::{PlacementEntry, PlacementFile, Policy};
pub use greedy::greedy_baseline_place;
pub use ledger::UsageLedger;
pub use levels::{closure_partition_levels, PartitionLevels};
pub use objective::{placement_objective, EstimateRow, EstimateTable, Objective};
pub use partition::{
    device_fitness, partition_place, partition_place_detailed, place_services_in_devices, Deployment, PartitionRun,
};

use crate::error::Result;
use crate::graphkit::girvan_newman;
use crate::model::{PlacementMatrix, Scenario};
use crate::scalar::Scalar;

/// Runs `policy` on a scenario. The partition policy builds its dendrogram
/// on the fog graph (cloud excluded).
pub fn place<T: Scalar>(scenario: &Scenario<T>, policy: Policy) -> Result<PlacementMatrix> {
    let infra = &scenario.infra;
    let apps = &scenario.applications;
    let workloads = &scenario.workloads;
    match policy {
        Policy::Partition => {
            let dendrogram = girvan_newman::<f64>(&infra.fog_graph());
            partition_place(infra, &dendrogram, apps, workloads)
        }
        Policy::Greedy => greedy_baseline_place(infra, apps, workloads),
        Policy::CloudOnly => Ok(PlacementMatrix::with_cloud_rows(apps, infra.cloud_id())),
        Policy::BruteForce => brute_force_place(infra, apps, workloads),
    }
}
