//! Scenario-driven front end over the certification library: JSON problem
//! descriptions, an arithmetic expression language for custom right-hand
//! sides, certificate/solver execution with report and CSV artifacts, and
//! reproduction of the published reference constants.

pub mod expr;
pub mod reproduce;
pub mod run;
pub mod scenario;
