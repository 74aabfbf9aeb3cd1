//! Domain types for infrastructures, applications, workloads and placements,
//! the per-link delay formula and the capacity constraint.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graphkit::Graph;
use crate::scalar::Scalar;

pub type DeviceId = u32;
pub type ServiceId = u32;
pub type AppId = u32;
pub type WorkloadId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeviceKind {
    Cloud,
    Fog,
    Gateway,
}

/// Resource capacity of a device. The cloud is `Unbounded`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Capacity {
    Units(u32),
    Unbounded,
}

impl Capacity {
    pub fn admits(self, used: u64) -> bool {
        match self {
            Capacity::Units(cap) => used <= u64::from(cap),
            Capacity::Unbounded => true,
        }
    }

    pub fn units(self) -> Option<u32> {
        match self {
            Capacity::Units(cap) => Some(cap),
            Capacity::Unbounded => None,
        }
    }
}

impl fmt::Display for Capacity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Capacity::Units(cap) => write!(f, "{cap}"),
            Capacity::Unbounded => f.write_str("unbounded"),
        }
    }
}

impl Serialize for Capacity {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Capacity::Units(cap) => serializer.serialize_u32(*cap),
            Capacity::Unbounded => serializer.serialize_str("unbounded"),
        }
    }
}

impl<'de> Deserialize<'de> for Capacity {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Units(u32),
            Text(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Units(cap) => Ok(Capacity::Units(cap)),
            Repr::Text(s) if s == "unbounded" => Ok(Capacity::Unbounded),
            Repr::Text(s) => Err(serde::de::Error::custom(format!(
                "expected resource units or \"unbounded\", got {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Device<T> {
    pub id: DeviceId,
    pub kind: DeviceKind,
    pub resources: Capacity,
    /// Instructions per ms.
    pub speed: T,
}

/// Bidirectional link. Endpoints are stored in ascending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkLink<T> {
    pub endpoints: [DeviceId; 2],
    /// ms
    pub propagation: T,
    /// bytes per ms
    pub bandwidth: T,
}

impl<T> NetworkLink<T> {
    pub fn new(a: DeviceId, b: DeviceId, propagation: T, bandwidth: T) -> Self {
        NetworkLink { endpoints: [a.min(b), a.max(b)], propagation, bandwidth }
    }

    pub fn connects(&self, a: DeviceId, b: DeviceId) -> bool {
        self.endpoints == [a.min(b), a.max(b)]
    }

    pub fn other(&self, id: DeviceId) -> Option<DeviceId> {
        match self.endpoints {
            [a, b] if a == id => Some(b),
            [a, b] if b == id => Some(a),
            _ => None,
        }
    }
}

/// Transmission delay of `size` bytes over one link: propagation plus
/// serialization at the link bandwidth.
pub fn network_delay<T: Scalar>(link: &NetworkLink<T>, size: T) -> T {
    link.propagation + size / link.bandwidth
}

/// Devices and links, validated and indexed.
#[derive(Debug, Clone)]
pub struct InfrastructureGraph<T> {
    devices: Vec<Device<T>>,
    links: Vec<NetworkLink<T>>,
    cloud_attachment: DeviceId,
    index: HashMap<DeviceId, usize>,
    // per device position: (neighbour position, link position), sorted by neighbour id
    adjacency: Vec<Vec<(usize, usize)>>,
    cloud: usize,
}

impl<T: Scalar> InfrastructureGraph<T> {
    pub fn new(
        mut devices: Vec<Device<T>>,
        mut links: Vec<NetworkLink<T>>,
        cloud_attachment: DeviceId,
    ) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidInfrastructure(msg));
        devices.sort_by_key(|d| d.id);
        let mut index = HashMap::with_capacity(devices.len());
        for (pos, dev) in devices.iter().enumerate() {
            if index.insert(dev.id, pos).is_some() {
                return bad(format!("duplicate device id {}", dev.id));
            }
            if !(dev.speed > T::zero()) {
                return bad(format!("device {} has non-positive speed", dev.id));
            }
            match (dev.kind, dev.resources) {
                (DeviceKind::Cloud, _) => {}
                (_, Capacity::Units(0)) => {
                    return bad(format!("device {} has zero resources", dev.id))
                }
                (_, Capacity::Unbounded) => {
                    return bad(format!("non-cloud device {} has unbounded resources", dev.id))
                }
                _ => {}
            }
        }
        let clouds: Vec<usize> = devices
            .iter()
            .enumerate()
            .filter(|(_, d)| d.kind == DeviceKind::Cloud)
            .map(|(p, _)| p)
            .collect();
        if clouds.len() != 1 {
            return bad(format!("expected exactly one cloud device, found {}", clouds.len()));
        }
        let cloud = clouds[0];
        match index.get(&cloud_attachment) {
            None => return bad(format!("cloud attachment {cloud_attachment} does not exist")),
            Some(&p) if p == cloud => return bad("cloud cannot attach to itself".into()),
            _ => {}
        }

        for link in &mut links {
            let [a, b] = link.endpoints;
            link.endpoints = [a.min(b), a.max(b)];
        }
        links.sort_by_key(|l| l.endpoints);
        let mut adjacency = vec![Vec::new(); devices.len()];
        for (lp, link) in links.iter().enumerate() {
            let [a, b] = link.endpoints;
            if a == b {
                return bad(format!("self-loop on device {a}"));
            }
            if lp > 0 && links[lp - 1].endpoints == link.endpoints {
                return bad(format!("duplicate link {a}-{b}"));
            }
            if link.propagation < T::zero() || !(link.bandwidth > T::zero()) {
                return bad(format!("link {a}-{b} has invalid propagation or bandwidth"));
            }
            let (Some(&pa), Some(&pb)) = (index.get(&a), index.get(&b)) else {
                return bad(format!("link {a}-{b} references an unknown device"));
            };
            adjacency[pa].push((pb, lp));
            adjacency[pb].push((pa, lp));
        }
        for adj in &mut adjacency {
            adj.sort_by_key(|&(n, _)| devices[n].id);
        }
        let cloud_id = devices[cloud].id;
        if !links.iter().any(|l| l.connects(cloud_id, cloud_attachment)) {
            return bad(format!("no link between cloud {cloud_id} and its attachment {cloud_attachment}"));
        }

        let infra = InfrastructureGraph { devices, links, cloud_attachment, index, adjacency, cloud };
        let alive = AliveMask::all(&infra);
        if infra.component_of(0, &alive).iter().filter(|&&r| r).count() != infra.len() {
            return bad("infrastructure graph is not connected".into());
        }
        Ok(infra)
    }

    /// Positions reachable from `start` through alive devices.
    pub fn component_of(&self, start: usize, alive: &AliveMask) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        if !alive.is_alive(start) {
            return seen;
        }
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &self.adjacency[u] {
                if alive.is_alive(v) && !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    /// Hop counts from `start` over alive devices; `None` when unreachable.
    pub fn hop_distances(&self, start: usize, alive: &AliveMask) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.len()];
        if !alive.is_alive(start) {
            return dist;
        }
        dist[start] = Some(0);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap_or(0);
            for &(v, _) in &self.adjacency[u] {
                if alive.is_alive(v) && dist[v].is_none() {
                    dist[v] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }
}

impl<T> InfrastructureGraph<T> {
    pub fn devices(&self) -> &[Device<T>] {
        &self.devices
    }

    pub fn links(&self) -> &[NetworkLink<T>] {
        &self.links
    }

    pub fn len(&self) -> usize {
        self.devices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.devices.is_empty()
    }

    pub fn cloud_attachment(&self) -> DeviceId {
        self.cloud_attachment
    }

    pub fn cloud_id(&self) -> DeviceId {
        self.devices[self.cloud].id
    }

    pub fn cloud_index(&self) -> usize {
        self.cloud
    }

    pub fn index_of(&self, id: DeviceId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn device(&self, id: DeviceId) -> Option<&Device<T>> {
        self.index_of(id).map(|p| &self.devices[p])
    }

    pub fn device_at(&self, pos: usize) -> &Device<T> {
        &self.devices[pos]
    }

    pub fn link_at(&self, pos: usize) -> &NetworkLink<T> {
        &self.links[pos]
    }

    /// `(neighbour position, link position)` pairs, ordered by neighbour id.
    pub fn neighbors(&self, pos: usize) -> &[(usize, usize)] {
        &self.adjacency[pos]
    }

    /// Link lookup is symmetric in its arguments.
    pub fn link_between(&self, a: DeviceId, b: DeviceId) -> Option<&NetworkLink<T>> {
        let pa = self.index_of(a)?;
        let pb = self.index_of(b)?;
        self.adjacency[pa].iter().find(|&&(n, _)| n == pb).map(|&(_, l)| &self.links[l])
    }

    pub fn gateways(&self) -> impl Iterator<Item = &Device<T>> {
        self.devices.iter().filter(|d| d.kind == DeviceKind::Gateway)
    }

    /// Every device except the cloud.
    pub fn fog_devices(&self) -> impl Iterator<Item = &Device<T>> {
        self.devices.iter().filter(|d| d.kind != DeviceKind::Cloud)
    }

    /// Unweighted topology of the non-cloud devices.
    pub fn fog_graph(&self) -> Graph {
        let cloud = self.cloud_id();
        let mut g = Graph::new();
        for d in self.fog_devices() {
            g.add_node(d.id);
        }
        for l in &self.links {
            let [a, b] = l.endpoints;
            if a != cloud && b != cloud {
                g.add_edge(a, b);
            }
        }
        g
    }
}

/// Liveness per device position of an [`InfrastructureGraph`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AliveMask(Vec<bool>);

impl AliveMask {
    pub fn all<T>(infra: &InfrastructureGraph<T>) -> Self {
        AliveMask(vec![true; infra.len()])
    }

    pub fn is_alive(&self, pos: usize) -> bool {
        self.0.get(pos).copied().unwrap_or(false)
    }

    pub fn kill(&mut self, pos: usize) {
        if let Some(slot) = self.0.get_mut(pos) {
            *slot = false;
        }
    }

    pub fn dead_count(&self) -> usize {
        self.0.iter().filter(|&&a| !a).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Service {
    pub id: ServiceId,
    pub app_id: AppId,
    pub consumption: u32,
    pub is_entry_point: bool,
}

/// A directed request edge. `source == None` is the external request that
/// users send to the entry point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MessageSpec<T> {
    pub source: Option<ServiceId>,
    pub target: ServiceId,
    /// bytes
    pub size: T,
    /// instructions executed by the target
    pub instructions: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Application<T> {
    pub id: AppId,
    pub services: Vec<Service>,
    pub messages: Vec<MessageSpec<T>>,
    /// ms
    pub deadline: T,
}

impl<T: Scalar> Application<T> {
    pub fn entry_point(&self) -> Option<ServiceId> {
        let mut eps = self.services.iter().filter(|s| s.is_entry_point);
        match (eps.next(), eps.next()) {
            (Some(s), None) => Some(s.id),
            _ => None,
        }
    }

    pub fn service(&self, id: ServiceId) -> Option<&Service> {
        self.services.iter().find(|s| s.id == id)
    }

    pub fn contains(&self, id: ServiceId) -> bool {
        self.service(id).is_some()
    }

    pub fn external_message(&self) -> Option<&MessageSpec<T>> {
        self.messages.iter().find(|m| m.source.is_none())
    }

    pub fn outgoing(&self, id: ServiceId) -> impl Iterator<Item = &MessageSpec<T>> {
        self.messages.iter().filter(move |m| m.source == Some(id))
    }

    /// Direct successors of `id`, ascending and deduplicated.
    pub fn children(&self, id: ServiceId) -> Vec<ServiceId> {
        let set: BTreeSet<ServiceId> = self.outgoing(id).map(|m| m.target).collect();
        set.into_iter().collect()
    }

    pub fn total_instructions(&self) -> T {
        self.messages.iter().fold(T::zero(), |acc, m| acc + m.instructions)
    }

    pub fn total_consumption(&self) -> u64 {
        self.services.iter().map(|s| u64::from(s.consumption)).sum()
    }

    /// Services in breadth-first order from the entry point, children by id.
    pub fn topological_order(&self) -> Vec<ServiceId> {
        let Some(ep) = self.entry_point() else {
            return Vec::new();
        };
        let mut indeg: BTreeMap<ServiceId, usize> = self.services.iter().map(|s| (s.id, 0)).collect();
        for m in &self.messages {
            if m.source.is_some() {
                *indeg.entry(m.target).or_default() += 1;
            }
        }
        let mut order = Vec::with_capacity(self.services.len());
        let mut ready = VecDeque::from([ep]);
        while let Some(u) = ready.pop_front() {
            order.push(u);
            for c in self.children(u) {
                let d = indeg.entry(c).or_default();
                *d = d.saturating_sub(self.outgoing(u).filter(|m| m.target == c).count());
                if *d == 0 {
                    ready.push_back(c);
                }
            }
        }
        order
    }
}

/// A structural problem found by [`validate_application`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoEntryPoint,
    MultipleEntryPoints,
    CycleDetected,
    Unreachable(ServiceId),
    MissingExternalMessage,
    MultipleExternalMessages,
    ExternalNotToEntryPoint,
    UnknownMessageEndpoint(ServiceId),
    DuplicateService(ServiceId),
    ForeignService(ServiceId),
    NonPositiveConsumption(ServiceId),
    NonPositiveMessage,
    NonPositiveDeadline,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoEntryPoint => f.write_str("no entry point"),
            Violation::MultipleEntryPoints => f.write_str("multiple entry points"),
            Violation::CycleDetected => f.write_str("cycle detected"),
            Violation::Unreachable(s) => write!(f, "unreachable service {s}"),
            Violation::MissingExternalMessage => f.write_str("missing external message"),
            Violation::MultipleExternalMessages => f.write_str("multiple external messages"),
            Violation::ExternalNotToEntryPoint => f.write_str("external message does not target the entry point"),
            Violation::UnknownMessageEndpoint(s) => write!(f, "message references unknown service {s}"),
            Violation::DuplicateService(s) => write!(f, "duplicate service {s}"),
            Violation::ForeignService(s) => write!(f, "service {s} belongs to another application"),
            Violation::NonPositiveConsumption(s) => write!(f, "service {s} has non-positive consumption"),
            Violation::NonPositiveMessage => f.write_str("message with non-positive size or instructions"),
            Violation::NonPositiveDeadline => f.write_str("non-positive deadline"),
        }
    }
}

/// Checks every structural invariant of an application. Empty means valid.
pub fn validate_application<T: Scalar>(app: &Application<T>) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut ids = BTreeSet::new();
    for s in &app.services {
        if !ids.insert(s.id) {
            out.push(Violation::DuplicateService(s.id));
        }
        if s.app_id != app.id {
            out.push(Violation::ForeignService(s.id));
        }
        if s.consumption == 0 {
            out.push(Violation::NonPositiveConsumption(s.id));
        }
    }
    if !(app.deadline > T::zero()) {
        out.push(Violation::NonPositiveDeadline);
    }
    let mut endpoints_ok = true;
    for m in &app.messages {
        for s in m.source.iter().chain(std::iter::once(&m.target)) {
            if !ids.contains(s) {
                out.push(Violation::UnknownMessageEndpoint(*s));
                endpoints_ok = false;
            }
        }
        if !(m.size > T::zero()) || !(m.instructions > T::zero()) {
            out.push(Violation::NonPositiveMessage);
        }
    }

    let entry_count = app.services.iter().filter(|s| s.is_entry_point).count();
    match entry_count {
        0 => out.push(Violation::NoEntryPoint),
        1 => {}
        _ => out.push(Violation::MultipleEntryPoints),
    }
    let externals: Vec<_> = app.messages.iter().filter(|m| m.source.is_none()).collect();
    match externals.len() {
        0 => out.push(Violation::MissingExternalMessage),
        1 => {
            if let Some(ep) = app.entry_point() {
                if externals[0].target != ep {
                    out.push(Violation::ExternalNotToEntryPoint);
                }
            }
        }
        _ => out.push(Violation::MultipleExternalMessages),
    }
    if !endpoints_ok {
        return out;
    }
    if has_cycle(app) {
        out.push(Violation::CycleDetected);
    }
    if let Some(ep) = app.entry_point() {
        let mut seen = BTreeSet::from([ep]);
        let mut stack = vec![ep];
        while let Some(u) = stack.pop() {
            for c in app.children(u) {
                if seen.insert(c) {
                    stack.push(c);
                }
            }
        }
        for s in &app.services {
            if !seen.contains(&s.id) {
                out.push(Violation::Unreachable(s.id));
            }
        }
    }
    out
}

fn has_cycle<T: Scalar>(app: &Application<T>) -> bool {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Open,
        Done,
    }
    let mut mark: BTreeMap<ServiceId, Mark> = app.services.iter().map(|s| (s.id, Mark::New)).collect();
    for s in &app.services {
        if mark[&s.id] != Mark::New {
            continue;
        }
        // iterative DFS: (node, next child index)
        let mut stack = vec![(s.id, 0usize)];
        mark.insert(s.id, Mark::Open);
        while let Some(top) = stack.last_mut() {
            let (u, next) = *top;
            top.1 += 1;
            if let Some(&c) = app.children(u).get(next) {
                match mark[&c] {
                    Mark::Open => return true,
                    Mark::New => {
                        mark.insert(c, Mark::Open);
                        stack.push((c, 0));
                    }
                    Mark::Done => {}
                }
            } else {
                mark.insert(u, Mark::Done);
                stack.pop();
            }
        }
    }
    false
}

/// Users attached to a gateway requesting one application periodically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Workload<T> {
    pub id: WorkloadId,
    pub gateway: DeviceId,
    pub app_id: AppId,
    /// ms between requests
    pub period: T,
}

/// Binary service-to-device map: `(service, device)` present means an
/// instance of the service runs on the device.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct PlacementMatrix {
    entries: BTreeSet<(ServiceId, DeviceId)>,
}

impl PlacementMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    /// The mandatory cloud instance of every service.
    pub fn with_cloud_rows<T: Scalar>(apps: &[Application<T>], cloud: DeviceId) -> Self {
        let mut p = Self::new();
        for s in apps.iter().flat_map(|a| &a.services) {
            p.insert(s.id, cloud);
        }
        p
    }

    pub fn insert(&mut self, service: ServiceId, device: DeviceId) -> bool {
        self.entries.insert((service, device))
    }

    pub fn remove(&mut self, service: ServiceId, device: DeviceId) -> bool {
        self.entries.remove(&(service, device))
    }

    pub fn contains(&self, service: ServiceId, device: DeviceId) -> bool {
        self.entries.contains(&(service, device))
    }

    pub fn hosts(&self, service: ServiceId) -> impl Iterator<Item = DeviceId> + '_ {
        self.entries.range((service, 0)..=(service, DeviceId::MAX)).map(|&(_, d)| d)
    }

    pub fn iter(&self) -> impl Iterator<Item = (ServiceId, DeviceId)> + '_ {
        self.entries.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl FromIterator<(ServiceId, DeviceId)> for PlacementMatrix {
    fn from_iter<I: IntoIterator<Item = (ServiceId, DeviceId)>>(iter: I) -> Self {
        PlacementMatrix { entries: iter.into_iter().collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeviceUsage {
    pub device: DeviceId,
    pub used: u64,
    pub capacity: Capacity,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityReport {
    pub ok: bool,
    /// One entry per device, ascending id.
    pub usage: Vec<DeviceUsage>,
}

impl FeasibilityReport {
    pub fn usage_of(&self, device: DeviceId) -> Option<&DeviceUsage> {
        self.usage.iter().find(|u| u.device == device)
    }
}

/// Checks the per-device capacity constraint: the consumption of the
/// services placed on every non-cloud device must not exceed its resources.
pub fn placement_feasible<T: Scalar>(
    placement: &PlacementMatrix,
    infra: &InfrastructureGraph<T>,
    apps: &[Application<T>],
) -> Result<FeasibilityReport> {
    let consumption: HashMap<ServiceId, u32> =
        apps.iter().flat_map(|a| &a.services).map(|s| (s.id, s.consumption)).collect();
    let mut used = vec![0u64; infra.len()];
    for (s, d) in placement.iter() {
        let cr = *consumption.get(&s).ok_or(Error::UnknownService(s))?;
        let pos = infra.index_of(d).ok_or(Error::UnknownDevice(d))?;
        used[pos] += u64::from(cr);
    }
    let usage: Vec<DeviceUsage> = infra
        .devices()
        .iter()
        .zip(used)
        .map(|(dev, used)| DeviceUsage { device: dev.id, used, capacity: dev.resources })
        .collect();
    let ok = usage.iter().all(|u| u.capacity.admits(u.used));
    Ok(FeasibilityReport { ok, usage })
}

/// A complete experiment input: infrastructure, applications and workloads.
#[derive(Debug, Clone)]
pub struct Scenario<T> {
    pub infra: InfrastructureGraph<T>,
    pub applications: Vec<Application<T>>,
    pub workloads: Vec<Workload<T>>,
    pub seed: u64,
}

impl<T: Scalar> Scenario<T> {
    pub fn new(
        infra: InfrastructureGraph<T>,
        applications: Vec<Application<T>>,
        workloads: Vec<Workload<T>>,
        seed: u64,
    ) -> Result<Self> {
        let scenario = Scenario { infra, applications, workloads, seed };
        scenario.validate()?;
        Ok(scenario)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidScenario(msg));
        let mut app_ids = BTreeSet::new();
        let mut service_ids = BTreeSet::new();
        for app in &self.applications {
            if !app_ids.insert(app.id) {
                return bad(format!("duplicate application id {}", app.id));
            }
            let violations = validate_application(app);
            if !violations.is_empty() {
                return Err(Error::InvalidApplication {
                    app: app.id,
                    violations: violations.iter().map(ToString::to_string).collect(),
                });
            }
            for s in &app.services {
                if !service_ids.insert(s.id) {
                    return bad(format!("service id {} used by more than one application", s.id));
                }
            }
        }
        let mut workload_ids = BTreeSet::new();
        for w in &self.workloads {
            if !workload_ids.insert(w.id) {
                return bad(format!("duplicate workload id {}", w.id));
            }
            match self.infra.device(w.gateway) {
                Some(d) if d.kind == DeviceKind::Gateway => {}
                _ => return bad(format!("workload {} gateway {} is not a gateway device", w.id, w.gateway)),
            }
            if !app_ids.contains(&w.app_id) {
                return Err(Error::UnknownApp(w.app_id));
            }
            if !(w.period > T::zero()) {
                return bad(format!("workload {} has non-positive period", w.id));
            }
        }
        Ok(())
    }

    pub fn app(&self, id: AppId) -> Option<&Application<T>> {
        self.applications.iter().find(|a| a.id == id)
    }

    pub fn workloads_for(&self, app: AppId) -> impl Iterator<Item = &Workload<T>> {
        self.workloads.iter().filter(move |w| w.app_id == app)
    }

    pub fn service(&self, id: ServiceId) -> Option<&Service> {
        self.applications.iter().flat_map(|a| &a.services).find(|s| s.id == id)
    }

    /// Checks that a placement only references known services and devices
    /// and carries every cloud row.
    pub fn check_placement(&self, placement: &PlacementMatrix) -> Result<()> {
        placement_feasible(placement, &self.infra, &self.applications)?;
        let cloud = self.infra.cloud_id();
        for s in self.applications.iter().flat_map(|a| &a.services) {
            if !placement.contains(s.id, cloud) {
                return Err(Error::InvalidScenario(format!("service {} has no cloud instance", s.id)));
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct ScenarioDoc<T> {
    devices: Vec<Device<T>>,
    links: Vec<NetworkLink<T>>,
    applications: Vec<Application<T>>,
    workloads: Vec<Workload<T>>,
    cloud_attachment: DeviceId,
    seed: u64,
}

impl<T: Scalar + Serialize> Serialize for Scenario<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Borrowed<'a, T> {
            devices: &'a [Device<T>],
            links: &'a [NetworkLink<T>],
            applications: &'a [Application<T>],
            workloads: &'a [Workload<T>],
            cloud_attachment: DeviceId,
            seed: u64,
        }
        Borrowed {
            devices: self.infra.devices(),
            links: self.infra.links(),
            applications: &self.applications,
            workloads: &self.workloads,
            cloud_attachment: self.infra.cloud_attachment(),
            seed: self.seed,
        }
        .serialize(serializer)
    }
}

impl<'de, T: Scalar + Deserialize<'de>> Deserialize<'de> for Scenario<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let doc = ScenarioDoc::<T>::deserialize(deserializer)?;
        let infra = InfrastructureGraph::new(doc.devices, doc.links, doc.cloud_attachment)
            .map_err(serde::de::Error::custom)?;
        Scenario::new(infra, doc.applications, doc.workloads, doc.seed).map_err(serde::de::Error::custom)
    }
}
