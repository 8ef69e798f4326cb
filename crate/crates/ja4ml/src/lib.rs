//! Bot-detection toolkit built on JA4 TLS client fingerprints.
//!
//! The pipeline runs end to end from packet captures to classifier metrics:
//! [`pcap`] pulls candidate ClientHello buffers out of capture files,
//! [`clienthello`] decodes them, [`ja4`] computes the three-part fingerprint,
//! [`features`] turns fingerprint strings plus JA4DB metadata into encoded
//! feature rows, [`dataset`] handles labeling and the seeded train/test
//! split, [`gbdt`] trains a gradient-boosted tree classifier, and
//! [`metrics`] scores it. [`adversarial`] replays the evasion scenarios the
//! fingerprint is (and is not) expected to catch.

pub mod adversarial;
pub mod cli;
pub mod clienthello;
pub mod dataset;
pub mod features;
pub mod gbdt;
pub mod ja4;
pub mod metrics;
pub mod pcap;
pub mod rng;
