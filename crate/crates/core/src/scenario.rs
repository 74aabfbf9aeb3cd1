//! Seeded random scenarios with the default experiment parameters.

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphkit::{cloud_attachment_node, generate_barabasi_albert, generate_gn_application, rng_for, select_gateways};
use crate::model::{
    Application, Capacity, Device, DeviceKind, InfrastructureGraph, MessageSpec, NetworkLink, Scenario, Service,
    Workload,
};
use crate::scalar::Scalar;

/// Inclusive range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub min: f64,
    pub max: f64,
}

impl Range {
    pub const fn new(min: f64, max: f64) -> Self {
        Range { min, max }
    }

    fn check(&self, name: &str, floor: f64) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.min <= self.max) {
            return Err(Error::InvalidParams(format!("{name}: empty range [{}, {}]", self.min, self.max)));
        }
        if self.min < floor {
            return Err(Error::InvalidParams(format!("{name}: minimum {} below {floor}", self.min)));
        }
        Ok(())
    }

    fn check_integral(&self, name: &str, floor: f64) -> Result<()> {
        self.check(name, floor)?;
        if self.min.ceil() > self.max.floor() {
            return Err(Error::InvalidParams(format!("{name}: no integer in [{}, {}]", self.min, self.max)));
        }
        Ok(())
    }

    fn draw_int(&self, rng: &mut ChaCha8Rng) -> u64 {
        rng.gen_range(self.min.ceil() as u64..=self.max.floor() as u64)
    }

    fn draw_real(&self, rng: &mut ChaCha8Rng) -> f64 {
        if self.min == self.max {
            self.min
        } else {
            rng.gen_range(self.min..=self.max)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentParams {
    pub n_devices: u32,
    pub gateway_fraction: f64,
    pub ba_m: u32,
    pub n_apps: u32,
    /// ms, every fog link
    pub link_propagation: f64,
    /// bytes/ms, every fog link
    pub link_bandwidth: f64,
    /// resource units per device
    pub device_resources: Range,
    /// instructions/ms per device
    pub device_speed: Range,
    /// ms
    pub app_deadline: Range,
    pub services_per_app: Range,
    /// resource units per service
    pub service_consumption: Range,
    pub message_instructions: Range,
    /// bytes
    pub message_size: Range,
    /// ms between requests of one workload
    pub workload_period: Range,
    /// chance that a given gateway requests a given app
    pub popularity: f64,
    pub cloud_propagation: f64,
    pub cloud_bandwidth: f64,
    pub cloud_speed: f64,
}

impl Default for ExperimentParams {
    fn default() -> Self {
        ExperimentParams {
            n_devices: 100,
            gateway_fraction: 0.25,
            ba_m: 2,
            n_apps: 20,
            link_propagation: 5.0,
            link_bandwidth: 75000.0,
            device_resources: Range::new(10.0, 25.0),
            device_speed: Range::new(100.0, 1000.0),
            app_deadline: Range::new(300.0, 50000.0),
            services_per_app: Range::new(2.0, 10.0),
            service_consumption: Range::new(1.0, 6.0),
            message_instructions: Range::new(20000.0, 60000.0),
            message_size: Range::new(1_500_000.0, 4_500_000.0),
            workload_period: Range::new(200.0, 1000.0),
            popularity: 0.25,
            cloud_propagation: 100.0,
            cloud_bandwidth: 75000.0,
            cloud_speed: 1000.0,
        }
    }
}

impl ExperimentParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParams(msg.into()));
        if self.ba_m == 0 || self.n_devices <= self.ba_m {
            return bad("need ba_m >= 1 and n_devices > ba_m");
        }
        if !(0.0..=1.0).contains(&self.gateway_fraction) || !(0.0..=1.0).contains(&self.popularity) {
            return bad("gateway_fraction and popularity must lie in [0, 1]");
        }
        if self.n_apps == 0 {
            return bad("n_apps must be positive");
        }
        for (name, v) in [
            ("link_bandwidth", self.link_bandwidth),
            ("cloud_bandwidth", self.cloud_bandwidth),
            ("cloud_speed", self.cloud_speed),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be positive")));
            }
        }
        for (name, v) in [("link_propagation", self.link_propagation), ("cloud_propagation", self.cloud_propagation)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be non-negative")));
            }
        }
        self.device_resources.check_integral("device_resources", 1.0)?;
        self.device_speed.check_integral("device_speed", 1.0)?;
        self.app_deadline.check_integral("app_deadline", 1.0)?;
        self.services_per_app.check_integral("services_per_app", 1.0)?;
        self.service_consumption.check_integral("service_consumption", 0.0)?;
        self.message_instructions.check_integral("message_instructions", 0.0)?;
        self.message_size.check_integral("message_size", 0.0)?;
        self.workload_period.check("workload_period", f64::MIN_POSITIVE)?;
        Ok(())
    }
}

/// Fog devices get ids `0..n_devices`, the cloud `n_devices`. Service ids
/// are global and consecutive, entry point first within each app.
pub fn generate_scenario<T: Scalar>(params: &ExperimentParams, seed: u64) -> Result<Scenario<T>> {
    params.validate()?;
    let mut rng = rng_for(seed);
    let r = T::from_real;

    let topology = generate_barabasi_albert(params.n_devices, params.ba_m, seed)?;
    let gateways = select_gateways(&topology, params.gateway_fraction)?;
    if gateways.is_empty() {
        return Err(Error::InvalidParams("gateway_fraction selects no gateway".into()));
    }
    let attachment = cloud_attachment_node(&topology).expect("non-empty topology");
    let cloud = params.n_devices;

    let mut devices: Vec<Device<T>> = (0..params.n_devices)
        .map(|id| {
            let units = params.device_resources.draw_int(&mut rng);
            let speed = params.device_speed.draw_int(&mut rng);
            Device {
                id,
                kind: if gateways.contains(&id) { DeviceKind::Gateway } else { DeviceKind::Fog },
                resources: Capacity::Units(units as u32),
                speed: T::from_count(speed),
            }
        })
        .collect();
    devices.push(Device { id: cloud, kind: DeviceKind::Cloud, resources: Capacity::Unbounded, speed: r(params.cloud_speed) });
    let mut links: Vec<NetworkLink<T>> = topology
        .edges()
        .map(|(a, b)| NetworkLink::new(a, b, r(params.link_propagation), r(params.link_bandwidth)))
        .collect();
    links.push(NetworkLink::new(attachment, cloud, r(params.cloud_propagation), r(params.cloud_bandwidth)));
    let infra = InfrastructureGraph::new(devices, links, attachment)?;

    let mut applications = Vec::with_capacity(params.n_apps as usize);
    let mut next_service = 0u32;
    for app_id in 0..params.n_apps {
        let deadline = T::from_count(params.app_deadline.draw_int(&mut rng));
        let count = params.services_per_app.draw_int(&mut rng) as u32;
        let tree = generate_gn_application(count, rng.gen());
        let base = next_service;
        next_service += count;
        let services = (0..count)
            .map(|k| Service {
                id: base + k,
                app_id,
                consumption: params.service_consumption.draw_int(&mut rng) as u32,
                is_entry_point: k == 0,
            })
            .collect();
        let edges = std::iter::once((None, 0)).chain(tree.into_iter().map(|(p, c)| (Some(base + p), c)));
        let messages = edges
            .map(|(source, child)| MessageSpec {
                source,
                target: base + child,
                instructions: T::from_count(params.message_instructions.draw_int(&mut rng)),
                size: T::from_count(params.message_size.draw_int(&mut rng)),
            })
            .collect();
        applications.push(Application { id: app_id, services, messages, deadline });
    }

    let gateway_list: Vec<u32> = gateways.iter().copied().collect();
    let mut pairs: Vec<(u32, u32, f64)> = Vec::new();
    for &gw in &gateway_list {
        for app in 0..params.n_apps {
            if rng.gen_bool(params.popularity) {
                pairs.push((gw, app, params.workload_period.draw_real(&mut rng)));
            }
        }
    }
    let covered: BTreeSet<u32> = pairs.iter().map(|p| p.1).collect();
    for app in 0..params.n_apps {
        if !covered.contains(&app) {
            let gw = gateway_list[rng.gen_range(0..gateway_list.len())];
            pairs.push((gw, app, params.workload_period.draw_real(&mut rng)));
        }
    }
    let workloads = pairs
        .into_iter()
        .enumerate()
        .map(|(id, (gateway, app_id, period))| Workload { id: id as u32, gateway, app_id, period: r(period) })
        .collect();

    Scenario::new(infra, applications, workloads, seed)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSummary {
    pub device_count: usize,
    pub gateway_count: usize,
    pub app_count: usize,
    pub service_count: usize,
    /// Σ CR over all services
    pub total_demand: u64,
    /// Σ AR over non-cloud devices
    pub total_fog_capacity: u64,
    pub workload_count: usize,
    /// requests per ms over all workloads
    pub request_rate: f64,
    /// ms between consecutive requests system-wide, on average
    pub mean_request_interval: f64,
}

pub fn scenario_summary<T: Scalar>(scenario: &Scenario<T>) -> ScenarioSummary {
    let request_rate: f64 = scenario.workloads.iter().map(|w| 1.0 / w.period.to_real()).sum();
    ScenarioSummary {
        device_count: scenario.infra.fog_devices().count(),
        gateway_count: scenario.infra.gateways().count(),
        app_count: scenario.applications.len(),
        service_count: scenario.applications.iter().map(|a| a.services.len()).sum(),
        total_demand: scenario.applications.iter().map(|a| a.total_consumption()).sum(),
        total_fog_capacity: scenario.infra.fog_devices().filter_map(|d| d.resources.units()).map(u64::from).sum(),
        workload_count: scenario.workloads.len(),
        request_rate,
        mean_request_interval: if request_rate > 0.0 { 1.0 / request_rate } else { f64::INFINITY },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_application;
    use crate::scalar::Exact;

    #[test]
    fn defaults_give_full_scale() {
        let s = generate_scenario::<f64>(&ExperimentParams::default(), 7).unwrap();
        let sum = scenario_summary(&s);
        assert_eq!(sum.device_count, 100);
        assert_eq!(sum.gateway_count, 25);
        assert_eq!(sum.app_count, 20);
        assert!(!s.infra.gateways().any(|g| g.id == s.infra.cloud_attachment()));
        assert_eq!(s.infra.cloud_id(), 100);
        for app in &s.applications {
            assert!(validate_application(app).is_empty());
            assert_eq!(app.services.iter().filter(|x| x.is_entry_point).count(), 1);
            assert!(s.workloads_for(app.id).count() >= 1);
        }
    }

    #[test]
    fn zero_popularity_forces_one_workload_per_app() {
        let params = ExperimentParams { popularity: 0.0, ..ExperimentParams::default() };
        let s = generate_scenario::<f64>(&params, 3).unwrap();
        assert_eq!(s.workloads.len(), 20);
        let apps: BTreeSet<u32> = s.workloads.iter().map(|w| w.app_id).collect();
        assert_eq!(apps.len(), 20);
    }

    #[test]
    fn same_seed_same_bytes() {
        let p = ExperimentParams::default();
        let a = serde_json::to_string(&generate_scenario::<f64>(&p, 11).unwrap()).unwrap();
        let b = serde_json::to_string(&generate_scenario::<f64>(&p, 11).unwrap()).unwrap();
        let c = serde_json::to_string(&generate_scenario::<f64>(&p, 12).unwrap()).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn exact_and_float_agree_on_structure() {
        let p = ExperimentParams { n_devices: 12, n_apps: 3, ..ExperimentParams::default() };
        let f = generate_scenario::<f64>(&p, 5).unwrap();
        let e = generate_scenario::<Exact>(&p, 5).unwrap();
        assert_eq!(scenario_summary(&f).total_demand, scenario_summary(&e).total_demand);
        assert_eq!(f.workloads.len(), e.workloads.len());
    }

    #[test]
    fn summary_of_two_unit_services() {
        let p = ExperimentParams {
            n_devices: 5,
            n_apps: 1,
            services_per_app: Range::new(2.0, 2.0),
            service_consumption: Range::new(1.0, 1.0),
            ..ExperimentParams::default()
        };
        let s = generate_scenario::<f64>(&p, 1).unwrap();
        let sum = scenario_summary(&s);
        assert_eq!(sum.total_demand, 2);
        let caps: u64 = s.infra.devices().iter().filter_map(|d| d.resources.units()).map(u64::from).sum();
        assert_eq!(sum.total_fog_capacity, caps);
    }

    #[test]
    fn rejects_empty_ranges() {
        let p = ExperimentParams { device_resources: Range::new(25.0, 10.0), ..ExperimentParams::default() };
        assert!(generate_scenario::<f64>(&p, 1).is_err());
        let p = ExperimentParams { ba_m: 0, ..ExperimentParams::default() };
        assert!(p.validate().is_err());
        let p = ExperimentParams { gateway_fraction: 0.0, ..ExperimentParams::default() };
        assert!(generate_scenario::<f64>(&p, 1).is_err());
    }
}
