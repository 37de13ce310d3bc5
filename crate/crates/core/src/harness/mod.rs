//! End-to-end analysis of instances and suites, with reports.

pub mod analyze;
pub mod config;
pub mod report;
pub mod suite;

pub use analyze::{analyze_instance, prepare, Failure, Formulation, FormulationRecord, InstanceRecord, Prepared};
pub use config::{instance_seed, AnalysisConfig, CONFIG_ENV};
pub use report::{emit_report, load_report_json, Format};
pub use suite::{exclusion_curve, run_suite, Curve, SuiteReport};
