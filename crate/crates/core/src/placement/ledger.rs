use std::collections::{BTreeMap, BTreeSet};

use crate::model::{Capacity, DeviceId, InfrastructureGraph, ServiceId};

/// Remaining capacity of every non-cloud device, and the services assigned
/// to each. A service already assigned to a device costs nothing to assign
/// there again.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageLedger {
    remaining: BTreeMap<DeviceId, u32>,
    assigned: BTreeSet<(DeviceId, ServiceId)>,
}

impl UsageLedger {
    pub fn new<T>(infra: &InfrastructureGraph<T>) -> Self {
        let remaining = infra
            .devices()
            .iter()
            .filter_map(|d| match d.resources {
                Capacity::Units(cap) => Some((d.id, cap)),
                Capacity::Unbounded => None,
            })
            .collect();
        UsageLedger { remaining, assigned: BTreeSet::new() }
    }

    pub fn from_remaining(remaining: impl IntoIterator<Item = (DeviceId, u32)>) -> Self {
        UsageLedger { remaining: remaining.into_iter().collect(), assigned: BTreeSet::new() }
    }

    pub fn is_assigned(&self, device: DeviceId, service: ServiceId) -> bool {
        self.assigned.contains(&(device, service))
    }

    /// Assigns `(service, consumption)` pairs to `device`, charging only
    /// services not already there. All or nothing.
    pub fn try_assign(&mut self, device: DeviceId, services: &[(ServiceId, u32)]) -> bool {
        let demand: u64 = services
            .iter()
            .filter(|(s, _)| !self.is_assigned(device, *s))
            .map(|&(_, cr)| u64::from(cr))
            .sum();
        if !self.try_charge(device, demand) {
            return false;
        }
        self.assigned.extend(services.iter().map(|&(s, _)| (device, s)));
        true
    }

    pub fn remaining(&self, device: DeviceId) -> Option<u32> {
        self.remaining.get(&device).copied()
    }

    pub fn fits(&self, device: DeviceId, amount: u64) -> bool {
        self.remaining(device).is_some_and(|r| u64::from(r) >= amount)
    }

    /// Deducts `amount` if it fits; otherwise leaves the ledger untouched.
    pub fn try_charge(&mut self, device: DeviceId, amount: u64) -> bool {
        match self.remaining.get_mut(&device) {
            Some(r) if u64::from(*r) >= amount => {
                *r -= amount as u32;
                true
            }
            _ => false,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (DeviceId, u32)> + '_ {
        self.remaining.iter().map(|(&d, &r)| (d, r))
    }
}
