//! Downlink scheduling of segmented satellite image data.
//!
//! The crate builds problem instances (satellites, ground stations, visible
//! time windows and original image data), splits image data into segments,
//! decodes two-stage chromosomes into feasible mission plans and searches the
//! failure-rate / segmentation-times trade-off with a multi-objective
//! evolutionary algorithm.
//!
//! ```
//! use downlink_sched::builder::{generate_instance, DistributionKind};
//! use downlink_sched::segmentation::{build_nt, SegmentationConfig, SegmentationStrategy};
//! use downlink_sched::{decode, Chromosome, Problem};
//!
//! let inst = generate_instance(DistributionKind::PD, 50, 1).unwrap();
//! let nt = build_nt(&inst, &SegmentationConfig::new(SegmentationStrategy::Minimum)).unwrap();
//! let p = Problem::new(inst, nt).unwrap();
//! let s = decode(&Chromosome::empty(&p), &p).unwrap();
//! assert!(s.missions.is_empty());
//! ```

pub mod builder;
pub mod error;
pub mod evolution;
pub mod metrics;
pub mod model;
pub mod objectives;
pub mod problem;
pub mod rng;
pub mod schedule;
pub mod segmentation;

pub use error::{Error, Result};
pub use evolution::{run, EvolutionConfig, RunTrace, SelectionMode};
pub use objectives::{evaluate, ObjectiveVector};
pub use problem::Problem;
pub use schedule::{decode, encode, validate_schedule, Chromosome, Schedule, Violation, ViolationKind};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/instances.md")]
    struct Instances;
    #[doc = include_str!("../../../book/src/segmentation.md")]
    struct Segmentation;
    #[doc = include_str!("../../../book/src/decoding.md")]
    struct Decoding;
    #[doc = include_str!("../../../book/src/objectives.md")]
    struct Objectives;
    #[doc = include_str!("../../../book/src/evolution.md")]
    struct Evolution;
    #[doc = include_str!("../../../book/src/metrics.md")]
    struct Metrics;
    #[doc = include_str!("../../../book/src/cli.md")]
    struct Cli;
}
