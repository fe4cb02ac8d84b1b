//! Experiment drivers: each produces an [`ExperimentReport`] of rows,
//! metadata and exact pass/fail checks.

pub mod counterexample;
pub mod estimates;
pub mod report;
pub mod strong;
pub mod verification;

pub use counterexample::{
    a02_range, build_counterexample, divergence_report, parse_orders, Counterexample, CounterexampleSpec,
    SurdFunction,
};
pub use estimates::{lemma3_ratio, lemma3_sweep, partition_check, proof_estimate_ratios, EstimateSet, SetRatio};
pub use report::{Check, Column, ColumnKind, ExperimentReport, Value};
pub use strong::{
    atom_transfer_check, build_corpus, ratio_suite, simon_suite, strong_fejer_sum, strong_partial_sum,
    theorem1_ratio_suite, CorpusItem, CorpusKind, CorpusSpec, RatioSuite, StrongSum,
};
pub use verification::{fejer_l1_report, verify_kernels_report, IdentityCheck};
