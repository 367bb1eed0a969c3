pub mod learners;
pub mod metrics;
pub mod cli;
pub mod config;
pub mod dataio;
pub mod experiment;
pub mod seed;
pub mod stats;
