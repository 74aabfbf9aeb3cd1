use std::collections::{BTreeMap, BTreeSet};

use fogplace::graphkit::generate_gn_application;
use fogplace::model::{
    placement_feasible, Application, Capacity, Device, DeviceKind, InfrastructureGraph, MessageSpec, NetworkLink,
    Scenario, Service,
};
use fogplace::placement::{
    closure_partition_levels, device_fitness, place, place_services_in_devices, Policy, UsageLedger,
};
use fogplace::scenario::{generate_scenario, ExperimentParams};
use proptest::prelude::*;

fn small_params(devices: u32, apps: u32) -> ExperimentParams {
    ExperimentParams { n_devices: devices, n_apps: apps, ..ExperimentParams::default() }
}

fn tree_app(n: u32, seed: u64, crs: &[u32], eis: &[f64]) -> Application<f64> {
    let edges = generate_gn_application(n, seed);
    let services = (0..n)
        .map(|k| Service { id: k, app_id: 0, consumption: crs[k as usize], is_entry_point: k == 0 })
        .collect();
    let mut messages = vec![MessageSpec { source: None, target: 0, size: 1_500_000.0, instructions: eis[0] }];
    messages.extend(edges.iter().enumerate().map(|(i, &(p, c))| MessageSpec {
        source: Some(p),
        target: c,
        size: 1_500_000.0,
        instructions: eis[i + 1],
    }));
    Application { id: 0, services, messages, deadline: 1000.0 }
}

/// Complete graph on `0..n`; device 0 is the gateway, the cloud hangs off device n-1.
fn clique(caps: &[u32], speeds: &[f64]) -> InfrastructureGraph<f64> {
    let n = caps.len() as u32;
    let mut devices: Vec<Device<f64>> = (0..n)
        .map(|id| Device {
            id,
            kind: if id == 0 { DeviceKind::Gateway } else { DeviceKind::Fog },
            resources: Capacity::Units(caps[id as usize]),
            speed: speeds[id as usize],
        })
        .collect();
    devices.push(Device { id: 50, kind: DeviceKind::Cloud, resources: Capacity::Unbounded, speed: 1000.0 });
    let mut links = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            links.push(NetworkLink::new(a, b, 5.0, 75000.0));
        }
    }
    links.push(NetworkLink::new(n - 1, 50, 100.0, 75000.0));
    InfrastructureGraph::new(devices, links, n - 1).unwrap()
}

fn app_strategy() -> impl Strategy<Value = Application<f64>> {
    (1..=7u32, any::<u64>()).prop_flat_map(|(n, seed)| {
        (
            proptest::collection::vec(1..=6u32, n as usize),
            proptest::collection::vec(20_000.0..60_000.0f64, n as usize),
        )
            .prop_map(move |(crs, eis)| tree_app(n, seed, &crs, &eis))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn every_policy_is_feasible_and_deterministic(devices in 6..=30u32, apps in 1..=5u32, seed in any::<u64>()) {
        let scenario: Scenario<f64> = generate_scenario(&small_params(devices, apps), seed).unwrap();
        for policy in [Policy::Partition, Policy::Greedy, Policy::CloudOnly] {
            let p = place(&scenario, policy).unwrap();
            prop_assert!(placement_feasible(&p, &scenario.infra, &scenario.applications).unwrap().ok);
            prop_assert!(scenario.check_placement(&p).is_ok());
            prop_assert_eq!(place(&scenario, policy).unwrap(), p);
        }
    }
}

proptest! {
    #[test]
    fn partition_levels_are_nested_covers(app in app_strategy()) {
        let levels = closure_partition_levels(&app).unwrap().levels;
        let all: BTreeSet<u32> = app.services.iter().map(|s| s.id).collect();
        prop_assert_eq!(levels[0].len(), 1);
        prop_assert_eq!(&levels[0][0].members, &all);
        let mut previous_max = usize::MAX;
        for level in &levels {
            let mut union = BTreeSet::new();
            for set in level {
                prop_assert!(set.members.is_disjoint(&union));
                union.extend(set.members.iter().copied());
            }
            prop_assert_eq!(&union, &all);
            let max = level.iter().map(|s| s.len()).max().unwrap();
            prop_assert!(max <= previous_max);
            previous_max = max;
            prop_assert!(level.windows(2).all(|w| w[0].len() >= w[1].len()));
        }
        prop_assert!(levels.last().unwrap().iter().all(|s| s.len() == 1));
    }

    #[test]
    fn rejection_leaves_the_ledger_untouched(
        app in app_strategy(),
        caps in proptest::collection::vec(1..=12u32, 4),
        speeds in proptest::collection::vec(100.0..1000.0f64, 4),
    ) {
        let infra = clique(&caps, &speeds);
        let community: BTreeSet<u32> = (0..4).collect();
        let mut ledger = UsageLedger::new(&infra);
        let before = ledger.clone();
        let result = place_services_in_devices(&app, &community, &mut ledger, 0, &infra).unwrap();
        match result {
            None => prop_assert_eq!(&ledger, &before),
            Some(mapping) => {
                prop_assert_eq!(mapping.len(), app.services.len());
                let mut used: BTreeMap<u32, u32> = BTreeMap::new();
                for s in &app.services {
                    *used.entry(mapping[&s.id]).or_default() += s.consumption;
                }
                for (d, u) in used {
                    prop_assert_eq!(ledger.remaining(d).unwrap() + u, before.remaining(d).unwrap());
                }
            }
        }
    }

    #[test]
    fn roomy_best_device_takes_the_whole_app(
        app in app_strategy(),
        caps in proptest::collection::vec(1..=12u32, 4),
        speeds in proptest::collection::vec(100.0..1000.0f64, 4),
    ) {
        let mut infra = clique(&caps, &speeds);
        let best = infra
            .fog_devices()
            .map(|d| (device_fitness(d, &app, 0, &infra).unwrap(), d.id))
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
            .unwrap()
            .1;
        let mut caps = caps.clone();
        caps[best as usize] = app.total_consumption() as u32;
        infra = clique(&caps, &speeds);
        let community: BTreeSet<u32> = (0..4).collect();
        let mut ledger = UsageLedger::new(&infra);
        let mapping = place_services_in_devices(&app, &community, &mut ledger, 0, &infra).unwrap().unwrap();
        prop_assert!(mapping.values().all(|&d| d == best));
    }
}
