use std::collections::{BTreeMap, VecDeque};
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn fogplace(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fogplace")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = fogplace(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

fn csv_rows(file: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(file)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn small_scenario(dir: &TempDir, seed: &str) -> String {
    let scenario = path(dir, "s.json");
    ok(&["generate", "--seed", seed, "--devices", "30", "--apps", "4", "--out", &scenario]);
    scenario
}

fn load(scenario: &str) -> fogplace::Scenario {
    serde_json::from_str(&fs::read_to_string(scenario).unwrap()).unwrap()
}

/// Breadth-first hop counts from `start` over the link list.
fn bfs_hops(s: &fogplace::Scenario, start: u32) -> BTreeMap<u32, u32> {
    let mut dist = BTreeMap::from([(start, 0)]);
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for link in s.infra.links() {
            if let Some(v) = link.other(u) {
                if !dist.contains_key(&v) {
                    dist.insert(v, dist[&u] + 1);
                    queue.push_back(v);
                }
            }
        }
    }
    dist
}

#[test]
fn default_generation_has_a_quarter_gateways_and_is_byte_stable() {
    let dir = TempDir::new().unwrap();
    let a = path(&dir, "a.json");
    let b = path(&dir, "b.json");
    let stdout = ok(&["generate", "--seed", "7", "--out", &a]);
    ok(&["generate", "--seed", "7", "--out", &b]);
    assert!(stdout.contains("gateways: 25"));
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(fs::read(path(&dir, "a.params.json")).unwrap(), fs::read(path(&dir, "b.params.json")).unwrap());
    assert_eq!(load(&a).infra.gateways().count(), 25);
}

#[test]
fn full_pipeline_with_and_without_failures() {
    let dir = TempDir::new().unwrap();
    let scenario = small_scenario(&dir, "3");
    let placement = path(&dir, "p.json");
    ok(&["place", "--scenario", &scenario, "--policy", "partition", "--out", &placement]);

    let all = path(&dir, "run-all");
    let none = path(&dir, "run-none");
    let common = ["simulate", "--scenario", &scenario, "--placement", &placement, "--duration", "20000"];
    ok(&[&common[..], &["--failures", "all", "--out-dir", &all]].concat());
    ok(&[&common[..], &["--failures", "none", "--out-dir", &none]].concat());

    let s = load(&scenario);
    let fog = s.infra.fog_devices().count();
    let apps = s.applications.len();

    let with = csv_rows(&Path::new(&all).join("availability.csv"));
    assert_eq!(with.len(), (fog + 1) * apps);
    let without = csv_rows(&Path::new(&none).join("availability.csv"));
    assert_eq!(without.len(), apps);
    assert!(without.iter().all(|r| r[0] == "0" && r[2].parse::<f64>().unwrap() == 1.0));
    assert!(csv_rows(&Path::new(&none).join("requests.csv")).iter().all(|r| r[3] != "NA"));
    assert_eq!(csv_rows(&Path::new(&all).join("failures.csv")).len(), fog);

    let tables = path(&dir, "tables");
    let stdout = ok(&["report", "--runs", &all, &none, "--out-dir", &tables]);
    assert!(stdout.contains("runs: 2"));
    for name in ["qos_evolution", "availability_users", "response_times", "placement", "usage", "hops", "runs"] {
        assert!(Path::new(&tables).join(format!("{name}.csv")).is_file(), "{name}.csv missing");
    }
    let runs = csv_rows(&Path::new(&tables).join("runs.csv"));
    assert_eq!(runs.len(), 2);
}

#[test]
fn cloud_only_hops_are_gateway_to_cloud_distances() {
    let dir = TempDir::new().unwrap();
    let scenario = small_scenario(&dir, "5");
    let placement = path(&dir, "p.json");
    ok(&["place", "--scenario", &scenario, "--policy", "cloud-only", "--out", &placement]);
    let run = path(&dir, "run");
    ok(&["simulate", "--scenario", &scenario, "--placement", &placement, "--duration", "5000", "--out-dir", &run]);
    let tables = path(&dir, "tables");
    ok(&["report", "--runs", &run, "--out-dir", &tables]);

    let s = load(&scenario);
    let cloud = s.infra.cloud_id();
    let hops = bfs_hops(&s, cloud);
    let placed = csv_rows(&Path::new(&tables).join("placement.csv"));
    assert!(!placed.is_empty());
    assert!(placed.iter().all(|r| r[1] == cloud.to_string()));
    let rows = csv_rows(&Path::new(&tables).join("hops.csv"));
    assert!(!rows.is_empty());
    for r in rows {
        let w: u32 = r[0].parse().unwrap();
        let gateway = s.workloads.iter().find(|x| x.id == w).unwrap().gateway;
        assert_eq!(r[3], hops[&gateway].to_string());
        assert_eq!(r[4], "cloud-only");
    }
}

#[test]
fn exit_codes_separate_usage_from_data_errors() {
    let dir = TempDir::new().unwrap();
    assert_eq!(fogplace(&["generate"]).status.code(), Some(1));
    assert_eq!(fogplace(&["place", "--scenario", "x", "--policy", "ilp", "--out", "y"]).status.code(), Some(1));
    assert_eq!(fogplace(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(fogplace(&["--help"]).status.code(), Some(0));

    let missing = path(&dir, "missing.json");
    let out = path(&dir, "p.json");
    assert_eq!(fogplace(&["place", "--scenario", &missing, "--policy", "greedy", "--out", &out]).status.code(), Some(2));

    let bogus = path(&dir, "bogus.json");
    fs::write(&bogus, "{\"not\": \"a scenario\"}").unwrap();
    assert_eq!(fogplace(&["place", "--scenario", &bogus, "--policy", "greedy", "--out", &out]).status.code(), Some(2));

    let bad = path(&dir, "bad.json");
    assert_eq!(fogplace(&["generate", "--devices", "0", "--out", &bad]).status.code(), Some(2));
}

#[test]
fn mismatched_placement_seed_is_rejected() {
    let dir = TempDir::new().unwrap();
    let first = small_scenario(&dir, "1");
    let placement = path(&dir, "p.json");
    ok(&["place", "--scenario", &first, "--policy", "greedy", "--out", &placement]);
    let second = path(&dir, "t.json");
    ok(&["generate", "--seed", "2", "--devices", "30", "--apps", "4", "--out", &second]);
    let run = path(&dir, "run");
    let out = fogplace(&["simulate", "--scenario", &second, "--placement", &placement, "--out-dir", &run]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = TempDir::new().unwrap();
    let config = path(&dir, "fog.toml");
    fs::write(&config, "seed = 11\n\n[generate]\ndevices = 40\napps = 3\n").unwrap();

    let from_config = path(&dir, "c.json");
    let stdout = ok(&["generate", "--config", &config, "--out", &from_config]);
    assert!(stdout.contains("fog devices: 40"));
    assert!(stdout.contains("applications: 3"));
    let explicit = path(&dir, "e.json");
    ok(&["generate", "--seed", "11", "--devices", "40", "--apps", "3", "--out", &explicit]);
    assert_eq!(fs::read(&from_config).unwrap(), fs::read(&explicit).unwrap());

    let overridden = path(&dir, "o.json");
    let stdout = ok(&["generate", "--config", &config, "--devices", "20", "--out", &overridden]);
    assert!(stdout.contains("fog devices: 20"));

    let broken = path(&dir, "broken.toml");
    fs::write(&broken, "colour = \"blue\"\n").unwrap();
    let out = fogplace(&["generate", "--config", &broken, "--out", &overridden]);
    assert_eq!(out.status.code(), Some(1));
}
