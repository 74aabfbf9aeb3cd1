//! Two-phase placement: applications onto device communities, then closure
//! sets onto the devices of the chosen community.

use std::collections::{BTreeMap, BTreeSet};

use super::{closure_partition_levels, UsageLedger};
use crate::error::{Error, Result};
use crate::graphkit::{communities_for_device, delay_tree, min_delay_path, Dendrogram};
use crate::model::{
    AliveMask, AppId, Application, Device, DeviceId, InfrastructureGraph, PlacementMatrix, ServiceId, Workload,
    WorkloadId,
};
use crate::scalar::Scalar;

/// Theoretical response time a user behind `gateway` would see if the whole
/// application ran on `device`: latency of the external request plus the
/// execution of every application message at the device's speed. `None`
/// stands for an unreachable device (infinite fitness).
pub fn device_fitness<T: Scalar>(
    device: &Device<T>,
    app: &Application<T>,
    gateway: DeviceId,
    infra: &InfrastructureGraph<T>,
) -> Option<T> {
    let size = app.external_message().map_or_else(T::zero, |m| m.size);
    let route = min_delay_path(infra, &AliveMask::all(infra), gateway, device.id, size)?;
    Some(fitness_from(route.delay, app, device))
}

fn fitness_from<T: Scalar>(latency: T, app: &Application<T>, device: &Device<T>) -> T {
    latency + app.total_instructions() / device.speed
}

/// Places the application's closure sets onto the community's devices,
/// visiting devices by ascending fitness and, on each device, every set of
/// every level in order. A set is placed when none of its services are
/// placed yet and it fits the device's remaining capacity (services the
/// device already runs cost nothing).
///
/// Returns the service-to-device mapping and commits the usage, or `None`
/// (community rejected) leaving `ledger` untouched.
pub fn place_services_in_devices<T: Scalar>(
    app: &Application<T>,
    community: &BTreeSet<DeviceId>,
    ledger: &mut UsageLedger,
    gateway: DeviceId,
    infra: &InfrastructureGraph<T>,
) -> Result<Option<BTreeMap<ServiceId, DeviceId>>> {
    let levels = closure_partition_levels(app)?;
    let consumption: BTreeMap<ServiceId, u32> = app.services.iter().map(|s| (s.id, s.consumption)).collect();

    let gw = infra.index_of(gateway).ok_or(Error::UnknownDevice(gateway))?;
    let size = app.external_message().map_or_else(T::zero, |m| m.size);
    let latency = delay_tree(infra, &AliveMask::all(infra), gw, size);
    let mut ranked: Vec<(Option<T>, DeviceId)> = Vec::with_capacity(community.len());
    for &id in community {
        let pos = infra.index_of(id).ok_or(Error::UnknownDevice(id))?;
        if id == infra.cloud_id() {
            continue;
        }
        let dev = infra.device_at(pos);
        ranked.push((latency.delay_to(pos).map(|d| fitness_from(d, app, dev)), id));
    }
    ranked.sort_by(|(fa, ia), (fb, ib)| {
        let by_fitness = match (fa, fb) {
            (Some(a), Some(b)) => a.cmp_ties(*b),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => std::cmp::Ordering::Equal,
        };
        by_fitness.then(ia.cmp(ib))
    });

    let mut tentative = ledger.clone();
    let mut placed: BTreeSet<ServiceId> = BTreeSet::new();
    let mut mapping = BTreeMap::new();
    for &(_, dev) in &ranked {
        for set in levels.iter_sets() {
            if !set.members.is_disjoint(&placed) {
                continue;
            }
            let demand: Vec<(ServiceId, u32)> = set.members.iter().map(|&s| (s, consumption[&s])).collect();
            if !tentative.try_assign(dev, &demand) {
                continue;
            }
            for &s in &set.members {
                placed.insert(s);
                mapping.insert(s, dev);
            }
            if placed.len() == app.services.len() {
                *ledger = tentative;
                return Ok(Some(mapping));
            }
        }
    }
    Ok(None)
}

/// One successful application deployment into a community.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Deployment {
    pub app: AppId,
    pub workload: WorkloadId,
    /// Index into the dendrogram.
    pub community: usize,
    pub mapping: BTreeMap<ServiceId, DeviceId>,
}

#[derive(Debug, Clone)]
pub struct PartitionRun {
    pub placement: PlacementMatrix,
    pub ledger: UsageLedger,
    pub deployments: Vec<Deployment>,
    /// `(app, workload)` pairs served from an existing deployment.
    pub reused: Vec<(AppId, WorkloadId, usize)>,
    /// `(app, workload)` pairs left to the cloud.
    pub cloud_only: Vec<(AppId, WorkloadId)>,
}

/// Applications in ascending deadline order, their users in id order; each
/// user walks the communities around its gateway from deepest to shallowest
/// and stops at the first one that already hosts the application or accepts
/// it. Users for whom every community rejects are served by the cloud.
pub fn partition_place_detailed<T: Scalar>(
    infra: &InfrastructureGraph<T>,
    dendrogram: &Dendrogram,
    apps: &[Application<T>],
    workloads: &[Workload<T>],
) -> Result<PartitionRun> {
    let mut ledger = UsageLedger::new(infra);
    let mut placement = PlacementMatrix::with_cloud_rows(apps, infra.cloud_id());
    let mut deployments = Vec::new();
    let mut reused = Vec::new();
    let mut cloud_only = Vec::new();

    let mut order: Vec<&Application<T>> = apps.iter().collect();
    order.sort_by(|a, b| a.deadline.cmp_total(b.deadline).then(a.id.cmp(&b.id)));
    for app in order {
        let mut users: Vec<&Workload<T>> = workloads.iter().filter(|w| w.app_id == app.id).collect();
        users.sort_by_key(|w| w.id);
        let mut hosted: BTreeSet<usize> = BTreeSet::new();
        for user in users {
            let mut served = false;
            for community in communities_for_device(dendrogram, user.gateway)? {
                if hosted.contains(&community) {
                    reused.push((app.id, user.id, community));
                    served = true;
                    break;
                }
                let members = &dendrogram.get(community).members;
                if let Some(mapping) = place_services_in_devices(app, members, &mut ledger, user.gateway, infra)? {
                    hosted.insert(community);
                    for (&s, &d) in &mapping {
                        placement.insert(s, d);
                    }
                    deployments.push(Deployment { app: app.id, workload: user.id, community, mapping });
                    served = true;
                    break;
                }
            }
            if !served {
                cloud_only.push((app.id, user.id));
            }
        }
    }
    Ok(PartitionRun { placement, ledger, deployments, reused, cloud_only })
}

pub fn partition_place<T: Scalar>(
    infra: &InfrastructureGraph<T>,
    dendrogram: &Dendrogram,
    apps: &[Application<T>],
    workloads: &[Workload<T>],
) -> Result<PlacementMatrix> {
    partition_place_detailed(infra, dendrogram, apps, workloads).map(|run| run.placement)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphkit::girvan_newman;
    use crate::model::{Capacity, DeviceKind, MessageSpec, NetworkLink, Service};

    fn chain(id: AppId, first: ServiceId, crs: &[u32], ei: f64, deadline: f64) -> Application<f64> {
        let services = crs
            .iter()
            .enumerate()
            .map(|(i, &cr)| Service { id: first + i as u32, app_id: id, consumption: cr, is_entry_point: i == 0 })
            .collect();
        let mut messages =
            vec![MessageSpec { source: None, target: first, size: 1_500_000.0, instructions: ei }];
        for i in 1..crs.len() as u32 {
            messages.push(MessageSpec {
                source: Some(first + i - 1),
                target: first + i,
                size: 1_500_000.0,
                instructions: ei,
            });
        }
        Application { id, services, messages, deadline }
    }

    fn dev(id: u32, kind: DeviceKind, cap: u32, speed: f64) -> Device<f64> {
        let resources = if kind == DeviceKind::Cloud { Capacity::Unbounded } else { Capacity::Units(cap) };
        Device { id, kind, resources, speed }
    }

    /// path 0 - 1 - 2 - 3 with the cloud (9) behind device 3
    fn line(caps: [u32; 4], speeds: [f64; 4]) -> InfrastructureGraph<f64> {
        let mut devices: Vec<_> = (0..4)
            .map(|i| dev(i, if i == 0 { DeviceKind::Gateway } else { DeviceKind::Fog }, caps[i as usize], speeds[i as usize]))
            .collect();
        devices.push(dev(9, DeviceKind::Cloud, 0, 1000.0));
        let mut links: Vec<_> = (0..3).map(|i| NetworkLink::new(i, i + 1, 5.0, 75000.0)).collect();
        links.push(NetworkLink::new(3, 9, 100.0, 75000.0));
        InfrastructureGraph::new(devices, links, 3).unwrap()
    }

    #[test]
    fn fitness_examples() {
        let infra = line([10; 4], [100.0, 100.0, 1000.0, 100.0]);
        // total instructions 40000 over two messages
        let app = chain(0, 0, &[1, 1], 20_000.0, 1000.0);
        let gw = infra.device(0).unwrap();
        assert_eq!(device_fitness(gw, &app, 0, &infra), Some(400.0));
        let one_hop = infra.device(1).unwrap();
        assert_eq!(device_fitness(one_hop, &app, 0, &infra), Some(425.0));
        let fast = infra.device(2).unwrap();
        // equal-latency comparison: speed dominates
        let slow_same_hop = Device { speed: 100.0, ..fast.clone() };
        assert!(device_fitness(fast, &app, 0, &infra) < device_fitness(&slow_same_hop, &app, 0, &infra));
    }

    #[test]
    fn whole_app_fits_one_device() {
        let infra = line([10, 10, 10, 10], [100.0; 4]);
        let app = chain(0, 0, &[2, 2, 2], 100.0, 1000.0);
        let mut ledger = UsageLedger::from_remaining([(1, 10)]);
        let m = place_services_in_devices(&app, &BTreeSet::from([1]), &mut ledger, 0, &infra)
            .unwrap()
            .unwrap();
        assert!(m.values().all(|&d| d == 1));
        assert_eq!(ledger.remaining(1), Some(4));
    }

    #[test]
    fn split_across_two_devices() {
        let infra = line([10, 10, 10, 10], [100.0; 4]);
        let app = chain(0, 0, &[2, 2, 2], 100.0, 1000.0);
        let mut ledger = UsageLedger::from_remaining([(1, 4), (2, 4)]);
        let m = place_services_in_devices(&app, &BTreeSet::from([1, 2]), &mut ledger, 0, &infra)
            .unwrap()
            .unwrap();
        assert_eq!(m, BTreeMap::from([(1, 1), (2, 1), (0, 2)]));
        assert_eq!(ledger.remaining(1), Some(0));
        assert_eq!(ledger.remaining(2), Some(2));
    }

    #[test]
    fn reject_leaves_ledger_untouched() {
        let infra = line([10, 10, 10, 10], [100.0; 4]);
        let app = chain(0, 0, &[2, 2, 2], 100.0, 1000.0);
        let mut ledger = UsageLedger::from_remaining([(1, 3), (2, 2)]);
        let before = ledger.clone();
        let r = place_services_in_devices(&app, &BTreeSet::from([1, 2]), &mut ledger, 0, &infra).unwrap();
        assert!(r.is_none());
        assert_eq!(ledger, before);
    }

    #[test]
    fn deepest_community_is_used_once_per_app() {
        let infra = line([10, 10, 10, 10], [100.0; 4]);
        let dendrogram = girvan_newman::<f64>(&infra.fog_graph());
        let app = chain(0, 0, &[2, 2], 100.0, 1000.0);
        let workloads = vec![
            Workload { id: 0, gateway: 0, app_id: 0, period: 100.0 },
            Workload { id: 1, gateway: 0, app_id: 0, period: 100.0 },
        ];
        let run = partition_place_detailed(&infra, &dendrogram, &[app], &workloads).unwrap();
        assert_eq!(run.deployments.len(), 1);
        assert_eq!(run.reused.len(), 1);
        let deepest = communities_for_device(&dendrogram, 0).unwrap()[0];
        assert_eq!(run.deployments[0].community, deepest);
        // whole app on the gateway: it has the best fitness and fits
        assert!(run.placement.contains(0, 0) && run.placement.contains(1, 0));
    }

    #[test]
    fn zero_capacity_leaves_cloud_rows_only() {
        let infra = line([1, 1, 1, 1], [100.0; 4]);
        let dendrogram = girvan_newman::<f64>(&infra.fog_graph());
        let app = chain(0, 0, &[2, 2], 100.0, 1000.0);
        let workloads = vec![Workload { id: 0, gateway: 0, app_id: 0, period: 100.0 }];
        let run = partition_place_detailed(&infra, &dendrogram, &[app.clone()], &workloads).unwrap();
        assert_eq!(run.placement, PlacementMatrix::with_cloud_rows(&[app], 9));
        assert_eq!(run.cloud_only, vec![(0, 0)]);
    }
}
