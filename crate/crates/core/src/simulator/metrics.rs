//! Request records, availability snapshots and the ratios derived from them.

use std::collections::BTreeMap;
use std::io::Write;

use crate::error::{Error, Result};
use crate::model::{AliveMask, AppId, Application, DeviceId, InfrastructureGraph, PlacementMatrix, Workload, WorkloadId};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct RequestRecord<T> {
    pub workload: WorkloadId,
    pub app: AppId,
    pub emit_time: T,
    pub done_time: Option<T>,
    pub deadline: T,
    pub failed_count_at_emit: usize,
}

impl<T: Scalar> RequestRecord<T> {
    pub fn response_time(&self) -> Option<T> {
        self.done_time.map(|d| d - self.emit_time)
    }

    /// Completed strictly before the deadline.
    pub fn satisfied(&self) -> bool {
        self.response_time().is_some_and(|rt| rt < self.deadline)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AppAvailability {
    pub app: AppId,
    /// Workloads able to reach every service of the app.
    pub reachable: usize,
    /// Workloads requesting the app.
    pub total: usize,
}

impl AppAvailability {
    pub fn ratio(&self) -> f64 {
        if self.total == 0 {
            1.0
        } else {
            self.reachable as f64 / self.total as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AvailabilitySnapshot<T> {
    pub time: T,
    pub failed_count: usize,
    /// Ascending app id.
    pub apps: Vec<AppAvailability>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsStore<T> {
    pub seed: u64,
    /// In emission order.
    pub requests: Vec<RequestRecord<T>>,
    pub snapshots: Vec<AvailabilitySnapshot<T>>,
    pub busy_time: BTreeMap<DeviceId, T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    WorkloadApp(WorkloadId, AppId),
    App(AppId),
    System,
}

/// Fraction of in-scope requests answered strictly before their deadline.
/// Requests that never completed count in the denominator only.
pub fn deadline_satisfaction<T: Scalar>(metrics: &MetricsStore<T>, scope: Scope) -> Result<f64> {
    let in_scope = |r: &&RequestRecord<T>| match scope {
        Scope::WorkloadApp(w, a) => r.workload == w && r.app == a,
        Scope::App(a) => r.app == a,
        Scope::System => true,
    };
    let (mut total, mut ok) = (0usize, 0usize);
    for r in metrics.requests.iter().filter(in_scope) {
        total += 1;
        if r.satisfied() {
            ok += 1;
        }
    }
    if total == 0 {
        return Err(Error::EmptyScope);
    }
    Ok(ok as f64 / total as f64)
}

/// Per application: workloads whose gateway is alive and, through alive
/// devices, reaches at least one alive instance of every service.
pub fn availability_snapshot<T: Scalar>(
    infra: &InfrastructureGraph<T>,
    alive: &AliveMask,
    placement: &PlacementMatrix,
    apps: &[Application<T>],
    workloads: &[Workload<T>],
) -> Vec<AppAvailability> {
    let mut components: BTreeMap<usize, Vec<bool>> = BTreeMap::new();
    let mut out: Vec<AppAvailability> = apps
        .iter()
        .map(|a| AppAvailability { app: a.id, reachable: 0, total: 0 })
        .collect();
    out.sort_by_key(|a| a.app);
    for w in workloads {
        let Ok(slot) = out.binary_search_by_key(&w.app_id, |a| a.app) else {
            continue;
        };
        out[slot].total += 1;
        let Some(gw) = infra.index_of(w.gateway) else {
            continue;
        };
        if !alive.is_alive(gw) {
            continue;
        }
        let reach = components.entry(gw).or_insert_with(|| infra.component_of(gw, alive));
        let app = apps.iter().find(|a| a.id == w.app_id).expect("app present");
        let all = app.services.iter().all(|s| {
            placement
                .hosts(s.id)
                .filter_map(|d| infra.index_of(d))
                .any(|p| reach[p])
        });
        if all {
            out[slot].reachable += 1;
        }
    }
    out
}

/// `workload,app,emit_ms,done_ms,satisfied,failed_count_at_emit`
pub fn write_requests_csv<T: Scalar, W: Write>(metrics: &MetricsStore<T>, mut out: W) -> Result<()> {
    writeln!(out, "workload,app,emit_ms,done_ms,satisfied,failed_count_at_emit")?;
    for r in &metrics.requests {
        let done = r.done_time.map_or_else(|| "NA".to_string(), |d| d.to_real().to_string());
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.workload,
            r.app,
            r.emit_time.to_real(),
            done,
            u8::from(r.satisfied()),
            r.failed_count_at_emit
        )?;
    }
    Ok(())
}

/// `failed_count,app,ratio`
pub fn write_availability_csv<T: Scalar, W: Write>(metrics: &MetricsStore<T>, mut out: W) -> Result<()> {
    writeln!(out, "failed_count,app,ratio")?;
    for snap in &metrics.snapshots {
        for a in &snap.apps {
            writeln!(out, "{},{},{}", snap.failed_count, a.app, a.ratio())?;
        }
    }
    Ok(())
}
