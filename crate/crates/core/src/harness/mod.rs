//! Verification harness: configuration, deterministic sampling, the named
//! check suite, scan data, and report emission.

mod config;
mod report;
mod sampling;
mod suite;

pub use config::{parse_config, FamilySpec, VerificationConfig};
pub use report::{emit_report, CheckRecord, CheckReport, ReportFormat, ResidualRecord};
pub use sampling::sample_points;
pub use suite::{check_names, run_suite, scan_hsc, HarnessError, HscScan};
