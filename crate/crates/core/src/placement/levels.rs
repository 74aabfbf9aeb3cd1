//! Nested transitive-closure partitions of an application.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graphkit::{transitive_closure, ClosureSet};
use crate::model::Application;
use crate::scalar::Scalar;

/// Successively finer partitions of an application's services. Level 0 is
/// the closure of the entry point; the last level is all singletons.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionLevels {
    pub levels: Vec<Vec<ClosureSet>>,
}

impl PartitionLevels {
    pub fn iter_sets(&self) -> impl Iterator<Item = &ClosureSet> {
        self.levels.iter().flatten()
    }
}

/// Builds the levels by splitting every non-singleton set with root `r` into
/// the closures of `r`'s children followed by `{r}`, then stably ordering
/// each level by descending set size.
pub fn closure_partition_levels<T: Scalar>(app: &Application<T>) -> Result<PartitionLevels> {
    let entry = app.entry_point().ok_or_else(|| Error::InvalidApplication {
        app: app.id,
        violations: vec!["no unique entry point".into()],
    })?;
    let mut levels = vec![vec![transitive_closure(app, entry)?]];
    while levels.last().is_some_and(|lvl| lvl.iter().any(|s| s.len() > 1)) {
        let prev = levels.last().expect("non-empty");
        let mut next = Vec::with_capacity(prev.len() * 2);
        for set in prev {
            if set.len() == 1 {
                next.push(set.clone());
                continue;
            }
            let mut covered = BTreeSet::from([set.root]);
            for child in app.children(set.root) {
                if !set.members.contains(&child) {
                    continue;
                }
                let closure = transitive_closure(app, child)?;
                if !closure.members.is_disjoint(&covered) || !closure.members.is_subset(&set.members) {
                    return Err(Error::UnsupportedStructure(app.id));
                }
                covered.extend(closure.members.iter().copied());
                next.push(closure);
            }
            if covered != set.members {
                return Err(Error::UnsupportedStructure(app.id));
            }
            next.push(ClosureSet::singleton(set.root));
        }
        next.sort_by(|a, b| b.len().cmp(&a.len()));
        levels.push(next);
    }
    Ok(PartitionLevels { levels })
}
