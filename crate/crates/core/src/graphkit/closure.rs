use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::model::{Application, ServiceId};
use crate::scalar::Scalar;

/// A service together with everything reachable from it along request edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureSet {
    pub root: ServiceId,
    pub members: BTreeSet<ServiceId>,
}

impl ClosureSet {
    pub fn singleton(root: ServiceId) -> Self {
        ClosureSet { root, members: BTreeSet::from([root]) }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Reflexive transitive closure of `service` in the application's message graph.
pub fn transitive_closure<T: Scalar>(app: &Application<T>, service: ServiceId) -> Result<ClosureSet> {
    if !app.contains(service) {
        return Err(Error::UnknownService(service));
    }
    let mut members = BTreeSet::from([service]);
    let mut stack = vec![service];
    while let Some(u) = stack.pop() {
        for m in app.outgoing(u) {
            if members.insert(m.target) {
                stack.push(m.target);
            }
        }
    }
    Ok(ClosureSet { root: service, members })
}
