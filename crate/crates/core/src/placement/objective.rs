//! Static response-time estimate used to compare placements.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::graphkit::delay_tree;
use crate::model::{AliveMask, Application, DeviceId, InfrastructureGraph, PlacementMatrix, ServiceId, Workload};
use crate::scalar::Scalar;

/// Lower is better: first the number of (workload, service) pairs whose
/// estimate misses the deadline, then the sum of all estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Objective<T> {
    pub late_pairs: usize,
    pub total_estimate: T,
}

impl<T: Scalar> Objective<T> {
    pub fn compare(&self, other: &Self) -> Ordering {
        self.late_pairs
            .cmp(&other.late_pairs)
            .then_with(|| self.total_estimate.cmp_ties(other.total_estimate))
    }
}

/// Per (workload, service, device) estimate: delay of the service's incoming
/// message from the workload's gateway to the device plus its execution
/// there. Rows follow `workloads`, then `services` of that workload's app.
#[derive(Debug, Clone)]
pub struct EstimateTable<T> {
    pub devices: Vec<DeviceId>,
    pub rows: Vec<EstimateRow<T>>,
}

#[derive(Debug, Clone)]
pub struct EstimateRow<T> {
    pub service: ServiceId,
    pub deadline: T,
    /// Indexed like `EstimateTable::devices`; `None` when unreachable.
    pub by_device: Vec<Option<T>>,
}

impl<T: Scalar> EstimateTable<T> {
    pub fn build(infra: &InfrastructureGraph<T>, apps: &[Application<T>], workloads: &[Workload<T>]) -> Result<Self> {
        let alive = AliveMask::all(infra);
        let devices: Vec<DeviceId> = infra.devices().iter().map(|d| d.id).collect();
        let mut rows = Vec::new();
        for w in workloads {
            let app = apps.iter().find(|a| a.id == w.app_id).ok_or(Error::UnknownApp(w.app_id))?;
            let gw = infra.index_of(w.gateway).ok_or(Error::UnknownDevice(w.gateway))?;
            for s in &app.services {
                let Some(msg) = app.messages.iter().find(|m| m.target == s.id) else {
                    continue;
                };
                let tree = delay_tree(infra, &alive, gw, msg.size);
                let by_device = (0..infra.len())
                    .map(|p| tree.delay_to(p).map(|d| d + msg.instructions / infra.device_at(p).speed))
                    .collect();
                rows.push(EstimateRow { service: s.id, deadline: app.deadline, by_device });
            }
        }
        Ok(EstimateTable { devices, rows })
    }

    /// Evaluates a placement given, per row, an iterator over hosting
    /// device positions.
    pub fn evaluate_with<'a, F, I>(&self, mut hosts: F) -> Objective<T>
    where
        F: FnMut(ServiceId) -> I,
        I: Iterator<Item = usize> + 'a,
    {
        let mut late = 0;
        let mut total = T::zero();
        for row in &self.rows {
            let best = hosts(row.service)
                .filter_map(|p| row.by_device[p])
                .reduce(|a, b| if b < a { b } else { a });
            match best {
                Some(est) => {
                    total += est;
                    if !(est < row.deadline) {
                        late += 1;
                    }
                }
                None => late += 1,
            }
        }
        Objective { late_pairs: late, total_estimate: total }
    }
}

pub fn placement_objective<T: Scalar>(
    placement: &PlacementMatrix,
    infra: &InfrastructureGraph<T>,
    apps: &[Application<T>],
    workloads: &[Workload<T>],
) -> Result<Objective<T>> {
    let table = EstimateTable::build(infra, apps, workloads)?;
    for (_, d) in placement.iter() {
        infra.index_of(d).ok_or(Error::UnknownDevice(d))?;
    }
    Ok(table.evaluate_with(|s| {
        placement.hosts(s).filter_map(|d| infra.index_of(d)).collect::<Vec<_>>().into_iter()
    }))
}
