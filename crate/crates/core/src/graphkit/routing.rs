//! Minimum-delay routing over alive devices.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::model::{network_delay, AliveMask, DeviceId, InfrastructureGraph};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Route<T> {
    /// Device ids from source to destination, both included.
    pub path: Vec<DeviceId>,
    /// Sum of per-hop link delays for the message size.
    pub delay: T,
}

/// Shortest-delay tree from one source for one message size.
#[derive(Debug, Clone)]
pub struct DelayTree<T> {
    dist: Vec<Option<T>>,
    paths: Vec<Vec<DeviceId>>,
}

impl<T: Scalar> DelayTree<T> {
    pub fn delay_to(&self, pos: usize) -> Option<T> {
        self.dist.get(pos).copied().flatten()
    }

    pub fn route_to(&self, pos: usize) -> Option<Route<T>> {
        let delay = self.delay_to(pos)?;
        Some(Route { path: self.paths[pos].clone(), delay })
    }

    pub fn path_to(&self, pos: usize) -> Option<&[DeviceId]> {
        self.delay_to(pos).map(|_| self.paths[pos].as_slice())
    }
}

struct Entry<T> {
    delay: T,
    path: Vec<DeviceId>,
    pos: usize,
}

fn cmp_label<T: Scalar>(da: T, pa: &[DeviceId], db: T, pb: &[DeviceId]) -> Ordering {
    da.cmp_ties(db).then_with(|| pa.cmp(pb))
}

impl<T: Scalar> PartialEq for Entry<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Scalar> Eq for Entry<T> {}
impl<T: Scalar> PartialOrd for Entry<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Scalar> Ord for Entry<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed: BinaryHeap is a max-heap
        cmp_label(other.delay, &other.path, self.delay, &self.path)
    }
}

/// Dijkstra over alive devices with per-hop weight `network_delay(link, size)`.
/// Among equal-delay paths the lexicographically smallest id sequence wins.
pub fn delay_tree<T: Scalar>(infra: &InfrastructureGraph<T>, alive: &AliveMask, src: usize, size: T) -> DelayTree<T> {
    let n = infra.len();
    let mut dist: Vec<Option<T>> = vec![None; n];
    let mut paths: Vec<Vec<DeviceId>> = vec![Vec::new(); n];
    let mut done = vec![false; n];
    if !alive.is_alive(src) {
        return DelayTree { dist, paths };
    }
    dist[src] = Some(T::zero());
    paths[src] = vec![infra.device_at(src).id];
    let mut heap = BinaryHeap::from([Entry { delay: T::zero(), path: paths[src].clone(), pos: src }]);
    while let Some(Entry { delay, path, pos }) = heap.pop() {
        if done[pos] || path != paths[pos] {
            continue;
        }
        done[pos] = true;
        for &(next, link) in infra.neighbors(pos) {
            if done[next] || !alive.is_alive(next) {
                continue;
            }
            let cand = delay + network_delay(infra.link_at(link), size);
            let mut cand_path = path.clone();
            cand_path.push(infra.device_at(next).id);
            let better = match dist[next] {
                None => true,
                Some(cur) => cmp_label(cand, &cand_path, cur, &paths[next]) == Ordering::Less,
            };
            if better {
                dist[next] = Some(cand);
                paths[next] = cand_path.clone();
                heap.push(Entry { delay: cand, path: cand_path, pos: next });
            }
        }
    }
    DelayTree { dist, paths }
}

/// Minimum-delay route from `src` to `dst`, or `None` when no alive path
/// exists (including when either endpoint is dead or unknown).
pub fn min_delay_path<T: Scalar>(
    infra: &InfrastructureGraph<T>,
    alive: &AliveMask,
    src: DeviceId,
    dst: DeviceId,
    size: T,
) -> Option<Route<T>> {
    let s = infra.index_of(src)?;
    let d = infra.index_of(dst)?;
    if !alive.is_alive(d) {
        return None;
    }
    delay_tree(infra, alive, s, size).route_to(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Capacity, Device, DeviceKind, NetworkLink};

    fn dev(id: u32, kind: DeviceKind) -> Device<f64> {
        let resources = if kind == DeviceKind::Cloud { Capacity::Unbounded } else { Capacity::Units(10) };
        Device { id, kind, resources, speed: 100.0 }
    }

    // 0 -> {1 | 2} -> 3, route via 1 has PR 50 per hop, via 2 PR 5
    fn diamond() -> InfrastructureGraph<f64> {
        let devices = vec![
            dev(0, DeviceKind::Gateway),
            dev(1, DeviceKind::Fog),
            dev(2, DeviceKind::Fog),
            dev(3, DeviceKind::Fog),
            dev(9, DeviceKind::Cloud),
        ];
        let links = vec![
            NetworkLink::new(0, 1, 50.0, 75000.0),
            NetworkLink::new(1, 3, 50.0, 75000.0),
            NetworkLink::new(0, 2, 5.0, 75000.0),
            NetworkLink::new(2, 3, 5.0, 75000.0),
            NetworkLink::new(3, 9, 100.0, 75000.0),
        ];
        InfrastructureGraph::new(devices, links, 3).unwrap()
    }

    #[test]
    fn same_device_is_free() {
        let infra = diamond();
        let r = min_delay_path(&infra, &AliveMask::all(&infra), 2, 2, 1e6).unwrap();
        assert_eq!(r.path, vec![2]);
        assert_eq!(r.delay, 0.0);
    }

    #[test]
    fn low_propagation_route_wins() {
        let infra = diamond();
        let r = min_delay_path(&infra, &AliveMask::all(&infra), 0, 3, 1_500_000.0).unwrap();
        assert_eq!(r.path, vec![0, 2, 3]);
        assert_eq!(r.delay, 50.0);
    }

    #[test]
    fn equal_routes_prefer_smaller_ids() {
        let devices = vec![
            dev(0, DeviceKind::Gateway),
            dev(1, DeviceKind::Fog),
            dev(2, DeviceKind::Fog),
            dev(3, DeviceKind::Fog),
            dev(9, DeviceKind::Cloud),
        ];
        let links = vec![
            NetworkLink::new(0, 2, 5.0, 75000.0),
            NetworkLink::new(2, 3, 5.0, 75000.0),
            NetworkLink::new(0, 1, 5.0, 75000.0),
            NetworkLink::new(1, 3, 5.0, 75000.0),
            NetworkLink::new(3, 9, 100.0, 75000.0),
        ];
        let infra = InfrastructureGraph::new(devices, links, 3).unwrap();
        let r = min_delay_path(&infra, &AliveMask::all(&infra), 0, 3, 10.0).unwrap();
        assert_eq!(r.path, vec![0, 1, 3]);
    }

    #[test]
    fn dead_neighbour_disconnects() {
        let infra = diamond();
        let mut alive = AliveMask::all(&infra);
        alive.kill(infra.index_of(3).unwrap());
        assert!(min_delay_path(&infra, &alive, 0, 9, 10.0).is_none());
        assert!(min_delay_path(&infra, &alive, 0, 3, 10.0).is_none());
        let mut alive = AliveMask::all(&infra);
        alive.kill(infra.index_of(2).unwrap());
        let r = min_delay_path(&infra, &alive, 0, 3, 0.0).unwrap();
        assert_eq!(r.path, vec![0, 1, 3]);
        assert_eq!(r.delay, 100.0);
    }
}
