use std::collections::BTreeSet;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::graphkit::rng_for;
use crate::model::{DeviceId, InfrastructureGraph};
use crate::scalar::Scalar;

/// Permanent device failures, in time order.
#[derive(Debug, Clone, PartialEq)]
pub struct FailureSchedule<T> {
    events: Vec<(T, DeviceId)>,
}

impl<T: Scalar> FailureSchedule<T> {
    pub fn none() -> Self {
        FailureSchedule { events: Vec::new() }
    }

    /// Requires strictly increasing times and distinct devices.
    pub fn new(events: Vec<(T, DeviceId)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for (i, &(t, d)) in events.iter().enumerate() {
            if i > 0 && !(t > events[i - 1].0) {
                return Err(Error::InvalidParams("failure times must be strictly increasing".into()));
            }
            if !seen.insert(d) {
                return Err(Error::InvalidParams(format!("device {d} fails more than once")));
            }
        }
        Ok(FailureSchedule { events })
    }

    pub fn events(&self) -> &[(T, DeviceId)] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Checks the schedule against an infrastructure and a run length.
    pub fn validate_for(&self, infra: &InfrastructureGraph<T>, duration: T) -> Result<()> {
        for &(t, d) in &self.events {
            if infra.device(d).is_none() {
                return Err(Error::UnknownDevice(d));
            }
            if d == infra.cloud_id() {
                return Err(Error::InvalidParams("the cloud never fails".into()));
            }
            if t < T::zero() || t > duration {
                return Err(Error::InvalidParams(format!("failure of {d} at {t} is outside [0, {duration}]")));
            }
        }
        Ok(())
    }
}

/// Every non-cloud device fails once, in a seeded uniformly random order,
/// at equally spaced times `k * duration / (n + 1)` for `k = 1..=n`.
pub fn build_failure_schedule<T: Scalar>(
    infra: &InfrastructureGraph<T>,
    duration: T,
    seed: u64,
) -> Result<FailureSchedule<T>> {
    if !(duration > T::zero()) {
        return Err(Error::InvalidParams("duration must be positive".into()));
    }
    let mut devices: Vec<DeviceId> = infra.fog_devices().map(|d| d.id).collect();
    devices.shuffle(&mut rng_for(seed));
    let slots = T::from_count(devices.len() as u64 + 1);
    let events = devices
        .into_iter()
        .enumerate()
        .map(|(k, d)| (T::from_count(k as u64 + 1) * duration / slots, d))
        .collect();
    FailureSchedule::new(events)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Capacity, Device, DeviceKind, NetworkLink};
    use crate::scalar::Exact;

    fn star(n: u32) -> InfrastructureGraph<f64> {
        let mut devices: Vec<_> = (0..n)
            .map(|id| Device { id, kind: DeviceKind::Fog, resources: Capacity::Units(5), speed: 1.0 })
            .collect();
        devices.push(Device { id: 1000, kind: DeviceKind::Cloud, resources: Capacity::Unbounded, speed: 1.0 });
        let mut links: Vec<_> = (1..n).map(|i| NetworkLink::new(0, i, 1.0, 1.0)).collect();
        links.push(NetworkLink::new(0, 1000, 1.0, 1.0));
        InfrastructureGraph::new(devices, links, 0).unwrap()
    }

    #[test]
    fn single_device_fails_at_midpoint() {
        let s = build_failure_schedule(&star(1), 100.0, 3).unwrap();
        assert_eq!(s.events(), &[(50.0, 0)]);
    }

    #[test]
    fn hundred_devices_cover_everything_once() {
        let infra = star(100);
        let s = build_failure_schedule(&infra, 10_100.0, 8).unwrap();
        assert_eq!(s.len(), 100);
        let devs: BTreeSet<_> = s.events().iter().map(|e| e.1).collect();
        assert_eq!(devs.len(), 100);
        assert!(!devs.contains(&1000));
        for (k, &(t, _)) in s.events().iter().enumerate() {
            assert!((t - 100.0 * (k as f64 + 1.0)).abs() < 1e-9);
        }
        assert_eq!(s, build_failure_schedule(&infra, 10_100.0, 8).unwrap());
        assert_ne!(s, build_failure_schedule(&infra, 10_100.0, 9).unwrap());
        s.validate_for(&infra, 10_100.0).unwrap();
    }

    #[test]
    fn exact_spacing() {
        let devices = vec![
            Device { id: 0, kind: DeviceKind::Fog, resources: Capacity::Units(5), speed: Exact::from_integer(1) },
            Device { id: 1, kind: DeviceKind::Fog, resources: Capacity::Units(5), speed: Exact::from_integer(1) },
            Device { id: 2, kind: DeviceKind::Cloud, resources: Capacity::Unbounded, speed: Exact::from_integer(1) },
        ];
        let one = Exact::from_integer(1);
        let links = vec![NetworkLink::new(0, 1, one, one), NetworkLink::new(1, 2, one, one)];
        let infra = InfrastructureGraph::new(devices, links, 1).unwrap();
        let s = build_failure_schedule(&infra, Exact::from_integer(100), 0).unwrap();
        let times: Vec<_> = s.events().iter().map(|e| e.0).collect();
        assert_eq!(times, vec![Exact::new(100, 3), Exact::new(200, 3)]);
    }

    #[test]
    fn rejects_bad_schedules() {
        assert!(FailureSchedule::new(vec![(5.0, 1), (5.0, 2)]).is_err());
        assert!(FailureSchedule::new(vec![(5.0, 1), (6.0, 1)]).is_err());
        let infra = star(3);
        let s = FailureSchedule::new(vec![(5.0, 1000)]).unwrap();
        assert!(s.validate_for(&infra, 10.0).is_err());
        let s = FailureSchedule::new(vec![(50.0, 1)]).unwrap();
        assert!(s.validate_for(&infra, 10.0).is_err());
        assert!(build_failure_schedule(&infra, 0.0, 1).is_err());
    }
}
