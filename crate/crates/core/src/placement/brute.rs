//! Exhaustive placement search for desk-sized instances.

use std::cmp::Ordering;
use std::collections::HashMap;

use super::{EstimateTable, Objective};
use crate::error::{Error, Result};
use crate::model::{Application, Capacity, DeviceId, InfrastructureGraph, PlacementMatrix, ServiceId, Workload};
use crate::scalar::Scalar;

/// Upper bound on the number of configurations `brute_force_place` visits.
pub const BRUTE_FORCE_LIMIT: f64 = 1e7;

struct Search<'a, T> {
    table: &'a EstimateTable<T>,
    // (position, id, capacity) of every fog device, ascending id
    fog: Vec<(usize, DeviceId, u64)>,
    services: Vec<(ServiceId, u64)>,
    service_index: HashMap<ServiceId, usize>,
    cloud: usize,
    masks: Vec<u32>,
    used: Vec<u64>,
    best: Option<(Objective<T>, Vec<(ServiceId, DeviceId)>)>,
}

impl<T: Scalar> Search<'_, T> {
    fn entries(&self) -> Vec<(ServiceId, DeviceId)> {
        let mut out = Vec::new();
        for (i, &(s, _)) in self.services.iter().enumerate() {
            for (b, &(_, d, _)) in self.fog.iter().enumerate() {
                if self.masks[i] & (1 << b) != 0 {
                    out.push((s, d));
                }
            }
        }
        out
    }

    fn leaf(&mut self) {
        let objective = self.table.evaluate_with(|s| {
            let mask = self.masks[self.service_index[&s]];
            let fog = &self.fog;
            std::iter::once(self.cloud).chain(
                (0..fog.len()).filter(move |b| mask & (1 << b) != 0).map(move |b| fog[b].0),
            )
        });
        let entries = self.entries();
        let better = match &self.best {
            None => true,
            Some((obj, p)) => match objective.compare(obj) {
                Ordering::Less => true,
                Ordering::Equal => entries < *p,
                Ordering::Greater => false,
            },
        };
        if better {
            self.best = Some((objective, entries));
        }
    }

    fn descend(&mut self, i: usize) {
        if i == self.services.len() {
            self.leaf();
            return;
        }
        let cr = self.services[i].1;
        'masks: for mask in 0u32..(1 << self.fog.len()) {
            for b in 0..self.fog.len() {
                if mask & (1 << b) != 0 && self.used[b] + cr > self.fog[b].2 {
                    continue 'masks;
                }
            }
            for b in 0..self.fog.len() {
                if mask & (1 << b) != 0 {
                    self.used[b] += cr;
                }
            }
            self.masks[i] = mask;
            self.descend(i + 1);
            for b in 0..self.fog.len() {
                if mask & (1 << b) != 0 {
                    self.used[b] -= cr;
                }
            }
        }
        self.masks[i] = 0;
    }
}

/// Enumerates every capacity-feasible set of fog instances (any subset of
/// fog devices per service, plus the mandatory cloud rows) and returns the
/// one with the best [`Objective`]; ties go to the lexicographically
/// smallest list of `(service, device)` fog entries.
pub fn brute_force_place<T: Scalar>(
    infra: &InfrastructureGraph<T>,
    apps: &[Application<T>],
    workloads: &[Workload<T>],
) -> Result<PlacementMatrix> {
    let fog: Vec<(usize, DeviceId, u64)> = infra
        .devices()
        .iter()
        .enumerate()
        .filter_map(|(p, d)| match d.resources {
            Capacity::Units(cap) => Some((p, d.id, u64::from(cap))),
            Capacity::Unbounded => None,
        })
        .collect();
    let mut services: Vec<(ServiceId, u64)> =
        apps.iter().flat_map(|a| &a.services).map(|s| (s.id, u64::from(s.consumption))).collect();
    services.sort_unstable();
    let configs = 2f64.powi((fog.len() * services.len()) as i32);
    if configs > BRUTE_FORCE_LIMIT || fog.len() >= 31 {
        return Err(Error::InstanceTooLarge(configs));
    }
    let table = EstimateTable::build(infra, apps, workloads)?;
    let service_index = services.iter().enumerate().map(|(i, &(s, _))| (s, i)).collect();
    let mut search = Search {
        table: &table,
        used: vec![0; fog.len()],
        masks: vec![0; services.len()],
        fog,
        services,
        service_index,
        cloud: infra.cloud_index(),
        best: None,
    };
    search.descend(0);
    let mut placement = PlacementMatrix::with_cloud_rows(apps, infra.cloud_id());
    if let Some((_, entries)) = search.best {
        for (s, d) in entries {
            placement.insert(s, d);
        }
    }
    Ok(placement)
}
