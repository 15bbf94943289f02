//! Exact threshold computations on finite set families.
//!
//! The crate evaluates the product measure `μ_p` on `2^X`, critical
//! probabilities, expectation thresholds through minimum-cost covers, the
//! conditional bound function `g` with its `ε`-floor and admissible intervals,
//! and the push-forward of these quantities to upper sets of finite posets.
//! Monte Carlo estimators cross-check the exact values.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod family;
pub mod forge;
pub mod io;
pub mod mc;
pub mod measure;
pub mod poset;
pub mod threshold;

pub use bounds::{
    bell_bound, bell_eps_bound, pp_bound, ConditionalReport, ConditionalSetup, EpsilonFloor, GridOptions, Interval,
    ReportOptions, DEFAULT_K,
};
pub use error::{Error, Result};
pub use family::{is_upper_in, GroundSet, SetFamily, SubsetMask, UpperSetFamily};
pub use forge::{worked_example, BVariant, WeightedGraphSpec, WorkedExample};
pub use mc::{McEstimate, MonteCarlo};
pub use measure::{conditional, mu_family, mu_subset, mu_upper, p_critical, r_ratio, CardinalityProfile, Prob};
pub use poset::{
    extension_pipeline, principal_downset_embedding, y_p_distribution, FinitePoset, PipelineReport, PosetEmbedding,
    PosetUpperSet, YpDistribution,
};
pub use threshold::{greedy_cover_cost, is_p_small, min_cover_cost, q_threshold, Cover};

/// Schema tag carried by every machine-readable report.
pub const SCHEMA_VERSION: &str = "threshold-lab/1";
