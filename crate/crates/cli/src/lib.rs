//! Experiment protocols and CSV emission for the `rtplan` binary.

pub mod experiment;
