//! Single-threaded event loop.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap, HashMap, VecDeque};
use std::rc::Rc;

use super::failures::FailureSchedule;
use super::metrics::{availability_snapshot, AvailabilitySnapshot, MetricsStore, RequestRecord};
use crate::error::{Error, Result};
use crate::graphkit::{delay_tree, DelayTree};
use crate::model::{network_delay, AliveMask, Application, PlacementMatrix, Scenario, ServiceId};
use crate::scalar::{Ordered, Scalar};

#[derive(Debug, Clone, Copy)]
enum Kind {
    Failure(usize),
    /// workload index, emission number (1-based)
    Emit(usize, u64),
    Arrival(u64),
    Completion { device: usize, token: u64 },
}

impl Kind {
    fn class(self) -> u8 {
        match self {
            Kind::Failure(_) => 0,
            Kind::Emit(..) | Kind::Arrival(_) => 1,
            Kind::Completion { .. } => 2,
        }
    }
}

struct Event<T> {
    time: Ordered<T>,
    class: u8,
    seq: u64,
    kind: Kind,
}

impl<T: Scalar> Event<T> {
    fn key(&self) -> (&Ordered<T>, u8, u64) {
        (&self.time, self.class, self.seq)
    }
}

impl<T: Scalar> PartialEq for Event<T> {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}
impl<T: Scalar> Eq for Event<T> {}
impl<T: Scalar> PartialOrd for Event<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Scalar> Ord for Event<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed: BinaryHeap is a max-heap
        other.key().cmp(&self.key())
    }
}

/// A message on its way to a device. `hops[i]` is the time it leaves
/// (or, for the last entry, reaches) `path[i]`.
struct InFlight<T> {
    request: usize,
    service: ServiceId,
    instructions: T,
    path: Vec<usize>,
    hops: Vec<T>,
}

#[derive(Clone, Copy)]
struct Job<T> {
    request: usize,
    service: ServiceId,
    instructions: T,
}

struct Server<T> {
    queue: VecDeque<Job<T>>,
    running: Option<Job<T>>,
    token: u64,
}

struct RequestState {
    app: usize,
    completed: Vec<ServiceId>,
    lost: bool,
}

type RouteKey = (usize, usize, usize);

struct Engine<'a, T: Scalar> {
    scenario: &'a Scenario<T>,
    placement: &'a PlacementMatrix,
    hosts: HashMap<ServiceId, Vec<usize>>,
    alive: AliveMask,
    failed: usize,
    now: T,
    seq: u64,
    next_msg: u64,
    heap: BinaryHeap<Event<T>>,
    servers: Vec<Server<T>>,
    in_flight: HashMap<u64, InFlight<T>>,
    routes: HashMap<RouteKey, Rc<DelayTree<T>>>,
    states: Vec<RequestState>,
    metrics: MetricsStore<T>,
}

impl<'a, T: Scalar> Engine<'a, T> {
    fn push(&mut self, time: T, kind: Kind) {
        self.seq += 1;
        self.heap.push(Event { time: Ordered(time), class: kind.class(), seq: self.seq, kind });
    }

    fn app(&self, request: usize) -> &'a Application<T> {
        &self.scenario.applications[self.states[request].app]
    }

    fn lose(&mut self, request: usize) {
        self.states[request].lost = true;
    }

    fn snapshot(&mut self) {
        let apps = availability_snapshot(
            &self.scenario.infra,
            &self.alive,
            self.placement,
            &self.scenario.applications,
            &self.scenario.workloads,
        );
        self.metrics.snapshots.push(AvailabilitySnapshot { time: self.now, failed_count: self.failed, apps });
    }

    /// Sends message `msg_idx` of the request's app from device `src`.
    fn dispatch(&mut self, request: usize, src: usize, msg_idx: usize) {
        let app = self.app(request);
        let app_idx = self.states[request].app;
        let msg = &app.messages[msg_idx];
        let key = (src, app_idx, msg_idx);
        let tree = match self.routes.get(&key) {
            Some(t) => Rc::clone(t),
            None => {
                let t = Rc::new(delay_tree(&self.scenario.infra, &self.alive, src, msg.size));
                self.routes.insert(key, Rc::clone(&t));
                t
            }
        };
        let infra = &self.scenario.infra;
        let best = self.hosts.get(&msg.target).and_then(|hosts| {
            hosts
                .iter()
                .filter(|&&p| self.alive.is_alive(p))
                .filter_map(|&p| tree.delay_to(p).map(|d| (d, p)))
                .min_by(|a, b| a.0.cmp_ties(b.0).then_with(|| infra.device_at(a.1).id.cmp(&infra.device_at(b.1).id)))
        });
        let Some((_, dest)) = best else {
            self.lose(request);
            return;
        };
        let ids = tree.path_to(dest).expect("reachable host has a path");
        let path: Vec<usize> = ids.iter().map(|&id| infra.index_of(id).expect("path node exists")).collect();
        let mut hops = Vec::with_capacity(path.len());
        let mut t = self.now;
        hops.push(t);
        for w in path.windows(2) {
            let link = infra.link_between(infra.device_at(w[0]).id, infra.device_at(w[1]).id).expect("path edge exists");
            t += network_delay(link, msg.size);
            hops.push(t);
        }
        self.next_msg += 1;
        let id = self.next_msg;
        self.in_flight.insert(id, InFlight { request, service: msg.target, instructions: msg.instructions, path, hops });
        self.push(t, Kind::Arrival(id));
    }

    fn start_next(&mut self, device: usize) {
        let server = &mut self.servers[device];
        if server.running.is_some() {
            return;
        }
        let Some(job) = server.queue.pop_front() else {
            return;
        };
        server.running = Some(job);
        let token = server.token;
        let finish = self.now + job.instructions / self.scenario.infra.device_at(device).speed;
        self.push(finish, Kind::Completion { device, token });
    }

    fn on_emit(&mut self, w: usize) {
        let scenario = self.scenario;
        let workload = &scenario.workloads[w];
        let app_idx = scenario
            .applications
            .iter()
            .position(|a| a.id == workload.app_id)
            .expect("validated scenario");
        let app = &scenario.applications[app_idx];
        let request = self.states.len();
        self.states.push(RequestState { app: app_idx, completed: Vec::new(), lost: false });
        self.metrics.requests.push(RequestRecord {
            workload: workload.id,
            app: app.id,
            emit_time: self.now,
            done_time: None,
            deadline: app.deadline,
            failed_count_at_emit: self.failed,
        });
        let gateway = scenario.infra.index_of(workload.gateway).expect("validated scenario");
        match app.messages.iter().position(|m| m.source.is_none()) {
            Some(m) if self.alive.is_alive(gateway) => self.dispatch(request, gateway, m),
            _ => self.lose(request),
        }
    }

    fn on_arrival(&mut self, id: u64) {
        let Some(msg) = self.in_flight.remove(&id) else {
            return;
        };
        let device = *msg.path.last().expect("non-empty path");
        self.servers[device].queue.push_back(Job {
            request: msg.request,
            service: msg.service,
            instructions: msg.instructions,
        });
        self.start_next(device);
    }

    fn on_completion(&mut self, device: usize, token: u64) {
        let server = &mut self.servers[device];
        if server.token != token {
            return;
        }
        let job = server.running.take().expect("completion of a running job");
        let exec = job.instructions / self.scenario.infra.device_at(device).speed;
        let id = self.scenario.infra.device_at(device).id;
        *self.metrics.busy_time.entry(id).or_insert_with(T::zero) += exec;

        let state = &mut self.states[job.request];
        if !state.lost && !state.completed.contains(&job.service) {
            state.completed.push(job.service);
            let app = self.app(job.request);
            if self.states[job.request].completed.len() == app.services.len() {
                self.metrics.requests[job.request].done_time = Some(self.now);
            }
            let outgoing: Vec<usize> = app
                .messages
                .iter()
                .enumerate()
                .filter(|(_, m)| m.source == Some(job.service))
                .map(|(i, _)| i)
                .collect();
            for m in outgoing {
                if self.states[job.request].lost {
                    break;
                }
                self.dispatch(job.request, device, m);
            }
        }
        self.start_next(device);
    }

    fn on_failure(&mut self, device: usize) {
        self.alive.kill(device);
        self.failed += 1;
        let server = &mut self.servers[device];
        server.token += 1;
        let dropped: Vec<usize> = server.running.take().into_iter().chain(server.queue.drain(..)).map(|j| j.request).collect();
        for r in dropped {
            self.lose(r);
        }
        let now = self.now;
        let cut: Vec<u64> = self
            .in_flight
            .iter()
            .filter(|(_, m)| m.path.iter().zip(&m.hops).any(|(&p, &t)| p == device && t >= now))
            .map(|(&id, _)| id)
            .collect();
        for id in cut {
            let msg = self.in_flight.remove(&id).expect("listed message");
            self.lose(msg.request);
        }
        self.routes.clear();
        self.snapshot();
    }
}

/// Runs one simulation. Workloads emit at `period, 2*period, ...` up to
/// `duration`; events already scheduled are then drained so every admitted
/// request either completes or is recorded as lost. `seed` is recorded in
/// the returned store; the engine itself has no random elements.
pub fn run_simulation<T: Scalar>(
    scenario: &Scenario<T>,
    placement: &PlacementMatrix,
    schedule: &FailureSchedule<T>,
    duration: T,
    seed: u64,
) -> Result<MetricsStore<T>> {
    if !(duration > T::zero()) {
        return Err(Error::InvalidParams("duration must be positive".into()));
    }
    scenario.check_placement(placement)?;
    schedule.validate_for(&scenario.infra, duration)?;
    let infra = &scenario.infra;

    let mut hosts: HashMap<ServiceId, Vec<usize>> = HashMap::new();
    for (s, d) in placement.iter() {
        hosts.entry(s).or_default().push(infra.index_of(d).expect("checked placement"));
    }
    let mut engine = Engine {
        scenario,
        placement,
        hosts,
        alive: AliveMask::all(infra),
        failed: 0,
        now: T::zero(),
        seq: 0,
        next_msg: 0,
        heap: BinaryHeap::new(),
        servers: (0..infra.len()).map(|_| Server { queue: VecDeque::new(), running: None, token: 0 }).collect(),
        in_flight: HashMap::new(),
        routes: HashMap::new(),
        states: Vec::new(),
        metrics: MetricsStore {
            seed,
            requests: Vec::new(),
            snapshots: Vec::new(),
            busy_time: infra.devices().iter().map(|d| (d.id, T::zero())).collect::<BTreeMap<_, _>>(),
        },
    };
    engine.snapshot();
    for &(t, d) in schedule.events() {
        engine.push(t, Kind::Failure(infra.index_of(d).expect("validated schedule")));
    }
    for (w, workload) in scenario.workloads.iter().enumerate() {
        if workload.period <= duration {
            engine.push(workload.period, Kind::Emit(w, 1));
        }
    }

    while let Some(event) = engine.heap.pop() {
        engine.now = event.time.0;
        match event.kind {
            Kind::Failure(d) => engine.on_failure(d),
            Kind::Emit(w, k) => {
                engine.on_emit(w);
                let next = T::from_count(k + 1) * scenario.workloads[w].period;
                if next <= duration {
                    engine.push(next, Kind::Emit(w, k + 1));
                }
            }
            Kind::Arrival(id) => engine.on_arrival(id),
            Kind::Completion { device, token } => engine.on_completion(device, token),
        }
    }
    Ok(engine.metrics)
}
