//! Discrete-event simulation of placed applications under permanent
//! device failures.

mod engine;
mod failures;
mod metrics;

pub use engine::run_simulation;
pub use failures::{build_failure_schedule, FailureSchedule};
pub use metrics::{
    availability_snapshot, deadline_satisfaction, write_availability_csv, write_requests_csv, AppAvailability,
    AvailabilitySnapshot, MetricsStore, RequestRecord, Scope,
};
