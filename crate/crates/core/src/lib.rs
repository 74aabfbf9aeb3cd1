//! Availability-aware service placement for fog infrastructures.
//!
//! Devices are partitioned into Girvan-Newman communities, applications into
//! nested transitive closures of their service graphs; applications are then
//! packed first-fit into the deepest community around each user's gateway.
//! A deterministic discrete-event simulator with permanent node failures
//! measures deadline satisfaction and availability of the result.
//!
//! All numeric code is generic over [`Scalar`]; the aliases below fix it to
//! `f64` for ordinary use.

pub mod error;
pub mod graphkit;
pub mod model;
pub mod placement;
pub mod report;
pub mod scalar;
pub mod scenario;
pub mod simulator;

pub use error::{Error, Result};
pub use scalar::{Exact, Ordered, Scalar};

pub type Device = model::Device<f64>;
pub type NetworkLink = model::NetworkLink<f64>;
pub type Infrastructure = model::InfrastructureGraph<f64>;
pub type Application = model::Application<f64>;
pub type MessageSpec = model::MessageSpec<f64>;
pub type Workload = model::Workload<f64>;
pub type Scenario = model::Scenario<f64>;
pub type ExactScenario = model::Scenario<Exact>;
pub type FailureSchedule = simulator::FailureSchedule<f64>;
pub type MetricsStore = simulator::MetricsStore<f64>;
pub type RequestRecord = simulator::RequestRecord<f64>;
