use std::collections::HashMap;

use super::UsageLedger;
use crate::error::{Error, Result};
use crate::graphkit::delay_tree;
use crate::model::{AliveMask, Application, DeviceId, InfrastructureGraph, PlacementMatrix, Workload};
use crate::scalar::Scalar;

/// Latency-greedy baseline. Applications in ascending deadline order; for
/// each requesting workload, every service (topological order) goes to the
/// nearest device by delay from the workload's gateway that either already
/// runs it or still has room for it.
pub fn greedy_baseline_place<T: Scalar>(
    infra: &InfrastructureGraph<T>,
    apps: &[Application<T>],
    workloads: &[Workload<T>],
) -> Result<PlacementMatrix> {
    let cloud = infra.cloud_id();
    let mut ledger = UsageLedger::new(infra);
    let mut placement = PlacementMatrix::with_cloud_rows(apps, cloud);
    let alive = AliveMask::all(infra);
    let consumption: HashMap<_, _> = apps.iter().flat_map(|a| &a.services).map(|s| (s.id, s.consumption)).collect();

    let mut order: Vec<&Application<T>> = apps.iter().collect();
    order.sort_by(|a, b| a.deadline.cmp_total(b.deadline).then(a.id.cmp(&b.id)));
    for app in order {
        let mut users: Vec<&Workload<T>> = workloads.iter().filter(|w| w.app_id == app.id).collect();
        users.sort_by_key(|w| w.id);
        let size = app.external_message().map_or_else(T::zero, |m| m.size);
        for user in users {
            let gw = infra.index_of(user.gateway).ok_or(Error::UnknownDevice(user.gateway))?;
            let tree = delay_tree(infra, &alive, gw, size);
            let mut candidates: Vec<(T, DeviceId)> = (0..infra.len())
                .filter(|&p| infra.device_at(p).id != cloud)
                .filter_map(|p| tree.delay_to(p).map(|d| (d, infra.device_at(p).id)))
                .collect();
            candidates.sort_by(|a, b| a.0.cmp_ties(b.0).then(a.1.cmp(&b.1)));
            for service in app.topological_order() {
                let cr = consumption[&service];
                for &(_, dev) in &candidates {
                    if ledger.try_assign(dev, &[(service, cr)]) {
                        placement.insert(service, dev);
                        break;
                    }
                }
            }
        }
    }
    Ok(placement)
}
