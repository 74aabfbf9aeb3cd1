//! Run directories and the figure-analog CSV tables computed from them.
//!
//! A run directory holds `scenario.json`, `placement.json`, `run.json`,
//! `failures.csv`, `requests.csv` and `availability.csv`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::io::BufWriter;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AliveMask, DeviceId, PlacementMatrix, Scenario};
use crate::placement::{PlacementFile, Policy};
use crate::simulator::{availability_snapshot, write_availability_csv, write_requests_csv, FailureSchedule, MetricsStore, RequestRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FailureMode {
    All,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub policy: Policy,
    pub scenario_seed: u64,
    pub sim_seed: u64,
    pub duration: f64,
    pub failures: FailureMode,
}

/// Everything the report needs from one simulation run.
#[derive(Debug, Clone)]
pub struct RunData {
    pub manifest: RunManifest,
    pub scenario: Scenario<f64>,
    pub placement: PlacementMatrix,
    pub schedule: FailureSchedule<f64>,
    pub requests: Vec<RequestRecord<f64>>,
}

fn malformed(path: &Path, what: impl std::fmt::Display) -> Error {
    Error::Malformed(format!("{}: {what}", path.display()))
}

fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn write_run_dir(
    dir: &Path,
    manifest: &RunManifest,
    scenario: &Scenario<f64>,
    placement: &PlacementFile,
    schedule: &FailureSchedule<f64>,
    metrics: &MetricsStore<f64>,
) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_json(&dir.join("run.json"), manifest)?;
    write_json(&dir.join("scenario.json"), scenario)?;
    write_json(&dir.join("placement.json"), placement)?;
    let mut failures = String::from("time_ms,device\n");
    for (t, d) in schedule.events() {
        let _ = writeln!(failures, "{t},{d}");
    }
    fs::write(dir.join("failures.csv"), failures)?;
    write_requests_csv(metrics, BufWriter::new(fs::File::create(dir.join("requests.csv"))?))?;
    write_availability_csv(metrics, BufWriter::new(fs::File::create(dir.join("availability.csv"))?))?;
    Ok(())
}

fn read_json<D: for<'de> Deserialize<'de>>(path: &Path) -> Result<D> {
    let text = fs::read_to_string(path).map_err(|e| malformed(path, e))?;
    serde_json::from_str(&text).map_err(|e| malformed(path, e))
}

fn csv_rows(path: &Path, header: &str, width: usize) -> Result<Vec<Vec<String>>> {
    let text = fs::read_to_string(path).map_err(|e| malformed(path, e))?;
    let mut lines = text.lines();
    if lines.next() != Some(header) {
        return Err(malformed(path, format!("expected header {header:?}")));
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let fields: Vec<String> = line.split(',').map(str::to_string).collect();
            if fields.len() == width {
                Ok(fields)
            } else {
                Err(malformed(path, format!("line {}: expected {width} fields", i + 2)))
            }
        })
        .collect()
}

fn field<F: std::str::FromStr>(path: &Path, value: &str) -> Result<F> {
    value.parse().map_err(|_| malformed(path, format!("bad value {value:?}")))
}

pub fn load_run_dir(dir: &Path) -> Result<RunData> {
    let manifest: RunManifest = read_json(&dir.join("run.json"))?;
    let scenario: Scenario<f64> = read_json(&dir.join("scenario.json"))?;
    let placement_file: PlacementFile = read_json(&dir.join("placement.json"))?;
    let placement = placement_file.matrix();
    scenario.check_placement(&placement)?;

    let path = dir.join("failures.csv");
    let mut events = Vec::new();
    for row in csv_rows(&path, "time_ms,device", 2)? {
        events.push((field::<f64>(&path, &row[0])?, field::<DeviceId>(&path, &row[1])?));
    }
    let schedule = FailureSchedule::new(events)?;
    schedule.validate_for(&scenario.infra, manifest.duration)?;

    let path = dir.join("requests.csv");
    let mut requests = Vec::new();
    for row in csv_rows(&path, "workload,app,emit_ms,done_ms,satisfied,failed_count_at_emit", 6)? {
        let app = field(&path, &row[1])?;
        let deadline = scenario.app(app).ok_or(Error::UnknownApp(app))?.deadline;
        let done_time = if row[3] == "NA" { None } else { Some(field(&path, &row[3])?) };
        requests.push(RequestRecord {
            workload: field(&path, &row[0])?,
            app,
            emit_time: field(&path, &row[2])?,
            done_time,
            deadline,
            failed_count_at_emit: field(&path, &row[5])?,
        });
    }
    Ok(RunData { manifest, scenario, placement, schedule, requests })
}

/// Rows of every figure table. Aggregated tables sum over all runs of a
/// policy; structural tables (placement, usage, hops) describe the first
/// run of each policy in input order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    /// `(policy, failed_count) -> (total_requests, satisfied)`
    pub qos: BTreeMap<(Policy, usize), (u64, u64)>,
    /// `(policy, failed_count) -> (reachable_users, all_in_gateways)`
    pub availability: BTreeMap<(Policy, usize), (u64, u64)>,
    /// `(app, gateway, policy) -> completed response times`
    pub responses: BTreeMap<(u32, DeviceId, Policy), Vec<f64>>,
    /// `(policy, service, device)`
    pub placement: BTreeSet<(Policy, u32, DeviceId)>,
    /// `(policy, device) -> (used, capacity)`
    pub usage: BTreeMap<(Policy, DeviceId), (u64, u32)>,
    /// `(policy, workload, app, service) -> hop distance`
    pub hops: BTreeMap<(Policy, u32, u32, u32), Option<u32>>,
    /// One line per input run, in input order, with its cloud link.
    pub runs: Vec<(RunManifest, f64, f64)>,
}

pub fn build_report(runs: &[RunData]) -> Report {
    let mut report = Report::default();
    let mut described = BTreeSet::new();
    for run in runs {
        let policy = run.manifest.policy;
        let scenario = &run.scenario;
        let infra = &scenario.infra;
        let cloud_link = infra
            .link_between(infra.cloud_id(), infra.cloud_attachment())
            .expect("validated infrastructure");
        report.runs.push((run.manifest.clone(), cloud_link.propagation, cloud_link.bandwidth));
        let gateway_of: BTreeMap<u32, DeviceId> = scenario.workloads.iter().map(|w| (w.id, w.gateway)).collect();

        for r in &run.requests {
            let entry = report.qos.entry((policy, r.failed_count_at_emit)).or_default();
            entry.0 += 1;
            entry.1 += u64::from(r.satisfied());
            if let (Some(rt), Some(&gw)) = (r.response_time(), gateway_of.get(&r.workload)) {
                report.responses.entry((r.app, gw, policy)).or_default().push(rt);
            }
        }

        let mut alive = AliveMask::all(infra);
        for k in 0..=run.schedule.len() {
            if k > 0 {
                let dead = run.schedule.events()[k - 1].1;
                alive.kill(infra.index_of(dead).expect("validated schedule"));
            }
            let reachable: usize = availability_snapshot(infra, &alive, &run.placement, &scenario.applications, &scenario.workloads)
                .iter()
                .map(|a| a.reachable)
                .sum();
            let gateways_alive = scenario
                .workloads
                .iter()
                .filter(|w| alive.is_alive(infra.index_of(w.gateway).expect("validated scenario")))
                .count();
            let entry = report.availability.entry((policy, k)).or_default();
            entry.0 += reachable as u64;
            entry.1 += gateways_alive as u64;
        }

        if !described.insert(policy) {
            continue;
        }
        for (s, d) in run.placement.iter() {
            report.placement.insert((policy, s, d));
        }
        for dev in infra.fog_devices() {
            let used: u64 = run
                .placement
                .iter()
                .filter(|&(_, d)| d == dev.id)
                .filter_map(|(s, _)| scenario.service(s))
                .map(|s| u64::from(s.consumption))
                .sum();
            report.usage.insert((policy, dev.id), (used, dev.resources.units().unwrap_or(0)));
        }
        let all = AliveMask::all(infra);
        for w in &scenario.workloads {
            let gw = infra.index_of(w.gateway).expect("validated scenario");
            let dist = infra.hop_distances(gw, &all);
            let app = scenario.app(w.app_id).expect("validated scenario");
            for s in &app.services {
                let nearest = run.placement.hosts(s.id).filter_map(|d| dist[infra.index_of(d)?]).min();
                report.hops.insert((policy, w.id, app.id, s.id), nearest);
            }
        }
    }
    report
}

/// Nearest-rank percentile of an ascending slice.
fn percentile(sorted: &[f64], p: f64) -> f64 {
    let rank = ((p * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}

impl Report {
    pub fn qos_csv(&self) -> String {
        let mut out = String::from("failed_count,policy,total_requests,satisfied\n");
        for ((policy, k), (total, ok)) in &self.qos {
            let _ = writeln!(out, "{k},{policy},{total},{ok}");
        }
        out
    }

    pub fn availability_csv(&self) -> String {
        let mut out = String::from("failed_count,policy,reachable_users,all_in_gateways\n");
        for ((policy, k), (reach, bound)) in &self.availability {
            let _ = writeln!(out, "{k},{policy},{reach},{bound}");
        }
        out
    }

    pub fn response_times_csv(&self) -> String {
        let mut out = String::from("app,gateway,policy,mean_ms,p95_ms,n\n");
        for ((app, gw, policy), times) in &self.responses {
            let mut sorted = times.clone();
            sorted.sort_by(f64::total_cmp);
            let mean = sorted.iter().sum::<f64>() / sorted.len() as f64;
            let _ = writeln!(out, "{app},{gw},{policy},{mean},{},{}", percentile(&sorted, 0.95), sorted.len());
        }
        out
    }

    pub fn placement_csv(&self) -> String {
        let mut out = String::from("service,device,policy\n");
        for (policy, s, d) in &self.placement {
            let _ = writeln!(out, "{s},{d},{policy}");
        }
        out
    }

    pub fn usage_csv(&self) -> String {
        let mut out = String::from("device,used,capacity,utilization,policy\n");
        for ((policy, d), (used, cap)) in &self.usage {
            let util = if *cap == 0 { 0.0 } else { *used as f64 / f64::from(*cap) };
            let _ = writeln!(out, "{d},{used},{cap},{util},{policy}");
        }
        out
    }

    pub fn hops_csv(&self) -> String {
        let mut out = String::from("workload,app,service,hop_distance_to_nearest_instance,policy\n");
        for ((policy, w, a, s), h) in &self.hops {
            let h = h.map_or_else(|| "NA".to_string(), |h| h.to_string());
            let _ = writeln!(out, "{w},{a},{s},{h},{policy}");
        }
        out
    }

    pub fn runs_csv(&self) -> String {
        let mut out = String::from("policy,scenario_seed,sim_seed,duration_ms,failures,cloud_propagation_ms,cloud_bandwidth\n");
        for (m, pr, bw) in &self.runs {
            let failures = match m.failures {
                FailureMode::All => "all",
                FailureMode::None => "none",
            };
            let _ = writeln!(out, "{},{},{},{},{failures},{pr},{bw}", m.policy, m.scenario_seed, m.sim_seed, m.duration);
        }
        out
    }

    /// Writes all tables into `dir`.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        for (name, body) in [
            ("qos_evolution.csv", self.qos_csv()),
            ("availability_users.csv", self.availability_csv()),
            ("response_times.csv", self.response_times_csv()),
            ("placement.csv", self.placement_csv()),
            ("usage.csv", self.usage_csv()),
            ("hops.csv", self.hops_csv()),
            ("runs.csv", self.runs_csv()),
        ] {
            fs::write(dir.join(name), body)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_rank_percentile() {
        let v: Vec<f64> = (1..=20).map(f64::from).collect();
        assert_eq!(percentile(&v, 0.95), 19.0);
        assert_eq!(percentile(&[7.0], 0.95), 7.0);
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(percentile(&v, 0.95), 95.0);
    }
}
