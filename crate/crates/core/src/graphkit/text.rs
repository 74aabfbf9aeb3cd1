//! Edge-list text format: one `u v propagation bandwidth` line per link.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::NetworkLink;
use crate::scalar::Scalar;

pub fn write_edge_list<T: Scalar>(links: &[NetworkLink<T>]) -> String {
    let mut out = String::new();
    for l in links {
        let [a, b] = l.endpoints;
        let _ = writeln!(out, "{a} {b} {} {}", l.propagation, l.bandwidth);
    }
    out
}

/// Parses the edge-list format. Blank lines and `#` comments are skipped.
pub fn read_edge_list<T: Scalar>(text: &str) -> Result<Vec<NetworkLink<T>>> {
    let mut links = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = || Error::Malformed(format!("edge list line {}: {line:?}", lineno + 1));
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(bad());
        }
        let a: u32 = fields[0].parse().map_err(|_| bad())?;
        let b: u32 = fields[1].parse().map_err(|_| bad())?;
        let pr: f64 = fields[2].parse().map_err(|_| bad())?;
        let bw: f64 = fields[3].parse().map_err(|_| bad())?;
        let pr = T::from_f64(pr).ok_or_else(bad)?;
        let bw = T::from_f64(bw).ok_or_else(bad)?;
        links.push(NetworkLink::new(a, b, pr, bw));
    }
    Ok(links)
}
