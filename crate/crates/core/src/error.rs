use thiserror::Error;

use crate::model::{AppId, DeviceId, ServiceId};

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown device {0}")]
    UnknownDevice(DeviceId),
    #[error("unknown service {0}")]
    UnknownService(ServiceId),
    #[error("unknown application {0}")]
    UnknownApp(AppId),
    #[error("invalid infrastructure: {0}")]
    InvalidInfrastructure(String),
    #[error("invalid application {app}: {}", .violations.join(", "))]
    InvalidApplication { app: AppId, violations: Vec<String> },
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("application {0} has overlapping closures (not a tree)")]
    UnsupportedStructure(AppId),
    #[error("instance too large for exhaustive search: {0} configurations")]
    InstanceTooLarge(f64),
    #[error("no requests in scope")]
    EmptyScope,
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
