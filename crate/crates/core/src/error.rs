use thiserror::Error;

/// Errors raised by the threshold computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty generator")]
    EmptyGenerator,

    #[error("empty family")]
    EmptyFamily,

    #[error("ground set must contain at least one element")]
    EmptyGround,

    #[error("duplicate label `{0}` in ground set")]
    DuplicateLabel(String),

    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    #[error("ground set of {0} elements does not fit in a 64-bit mask")]
    GroundTooWide(usize),

    #[error(
        "ground set of {n} elements exceeds the enumeration cap of {cap}; \
         use the Monte Carlo sampler for instances this large"
    )]
    EnumerationCap { n: usize, cap: usize },

    #[error("subset mask {0:#x} has bits outside the ground set")]
    MaskOutOfRange(u64),

    #[error("families are defined over different ground sets")]
    GroundMismatch,

    #[error("family is not contained in the ambient family")]
    NotSubfamily,

    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),

    #[error("conditioning on null event")]
    NullEvent,

    #[error("endpoint: use one-sided limit evaluation (p = {0})")]
    Endpoint(f64),

    #[error("hypothesis violated: P(X_p in A) = 0")]
    ZeroMeasure,

    #[error("trivial upper set: no critical probability")]
    TrivialUpperSet,

    #[error(
        "{count} minimal elements exceed the exact cover cap of {cap}; \
         use greedy_cover_cost for an upper bound"
    )]
    CoverCap { count: usize, cap: usize },

    #[error("hypothesis not met: p = {p} does not exceed threshold {threshold}")]
    HypothesisNotMet { p: f64, threshold: f64 },

    #[error("ratio hypothesis fails: r(p) = {r} < 1 at p = {p}")]
    RatioBelowOne { p: f64, r: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown poset element `{0}`")]
    UnknownElement(String),

    #[error("duplicate poset element `{0}`")]
    DuplicateElement(String),

    #[error("order is not reflexive at `{0}`")]
    NotReflexive(String),

    #[error("order is not antisymmetric: `{0}` <= `{1}` and `{1}` <= `{0}`")]
    NotAntisymmetric(String, String),

    #[error("order is not transitive: `{0}` <= `{1}` <= `{2}` but not `{0}` <= `{2}`")]
    NotTransitive(String, String, String),

    #[error("not an upper set: `{lower}` is a member but `{upper}` above it is not")]
    NotUpperSet { lower: String, upper: String },

    #[error("embedding is not injective: `{0}` and `{1}` share an image")]
    NotInjective(String, String),

    #[error("embedding has no image for element `{0}`")]
    MissingImage(String),

    #[error("poset of {size} elements exceeds the materialization cap of {cap}")]
    PosetCap { size: usize, cap: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error(
        "acceptance starvation: {accepted} of {draws} draws landed in the conditioning event \
         (rate {rate:.3e})"
    )]
    AcceptanceStarvation { accepted: u64, draws: u64, rate: f64 },

    #[error("malformed input: {0}")]
    Malformed(String),
}

impl Error {
    /// Stable snake_case name, used in machine-facing error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptyGenerator => "empty_generator",
            Error::EmptyFamily => "empty_family",
            Error::EmptyGround => "empty_ground",
            Error::DuplicateLabel(_) => "duplicate_label",
            Error::UnknownLabel(_) => "unknown_label",
            Error::GroundTooWide(_) => "ground_too_wide",
            Error::EnumerationCap { .. } => "enumeration_cap",
            Error::MaskOutOfRange(_) => "mask_out_of_range",
            Error::GroundMismatch => "ground_mismatch",
            Error::NotSubfamily => "not_subfamily",
            Error::InvalidProbability(_) => "invalid_probability",
            Error::NullEvent => "null_event",
            Error::Endpoint(_) => "endpoint",
            Error::ZeroMeasure => "zero_measure",
            Error::TrivialUpperSet => "trivial_upper_set",
            Error::CoverCap { .. } => "cover_cap",
            Error::HypothesisNotMet { .. } => "hypothesis_not_met",
            Error::RatioBelowOne { .. } => "ratio_below_one",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::UnknownElement(_) => "unknown_element",
            Error::DuplicateElement(_) => "duplicate_element",
            Error::NotReflexive(_) => "not_reflexive",
            Error::NotAntisymmetric(..) => "not_antisymmetric",
            Error::NotTransitive(..) => "not_transitive",
            Error::NotUpperSet { .. } => "not_upper_set",
            Error::NotInjective(..) => "not_injective",
            Error::MissingImage(_) => "missing_image",
            Error::PosetCap { .. } => "poset_cap",
            Error::InvalidGraph(_) => "invalid_graph",
            Error::AcceptanceStarvation { .. } => "acceptance_starvation",
            Error::Malformed(_) => "malformed_input",
        }
    }

    /// Whether the input itself is invalid, as opposed to a valid input on
    /// which the requested quantity is undefined or out of reach.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::EnumerationCap { .. }
                | Error::NullEvent
                | Error::Endpoint(_)
                | Error::ZeroMeasure
                | Error::TrivialUpperSet
                | Error::CoverCap { .. }
                | Error::HypothesisNotMet { .. }
                | Error::RatioBelowOne { .. }
                | Error::PosetCap { .. }
                | Error::AcceptanceStarvation { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
