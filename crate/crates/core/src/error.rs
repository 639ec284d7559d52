use thiserror::Error;

/// Error type shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A rational exponent outside the open-closed window `(1/2, 1]`.
    #[error("exponent {num}/{den} is outside (1/2, 1]")]
    ExponentRange { num: u64, den: u64 },

    /// Zero numerator/denominator or other malformed rational input.
    #[error("malformed rational: {0}")]
    MalformedRational(String),

    /// Requested fixed-point precision is below the supported floor or
    /// above the escalation cap.
    #[error("fixed-point precision {bits} outside supported range {min}..={max}")]
    PrecisionRange { bits: u32, min: u32, max: u32 },

    /// The certified interval of a value straddles an integer, so its
    /// floor (and hence the sawtooth value) cannot be decided at the
    /// current precision. Callers escalate the bit budget and retry.
    #[error("floor is ambiguous at {bits} fractional bits")]
    AmbiguousFloor { bits: u32 },

    /// Precision escalation hit the hard cap without resolving a floor.
    #[error("floor still ambiguous at the {cap}-bit escalation cap")]
    PrecisionCap { cap: u32 },

    /// A query exceeded the range a table was built for.
    #[error("query {query} exceeds table limit {limit}")]
    TableRange { query: u64, limit: u64 },

    /// Sieve construction request exceeding the configured capacity guard.
    #[error("sieve limit {requested} exceeds capacity {cap}")]
    SieveCapacity { requested: u64, cap: u64 },

    /// Cache file rejected (bad magic, version, or truncation).
    #[error("sieve cache rejected: {0}")]
    CacheFormat(String),

    /// I/O while reading or writing a cache file.
    #[error("cache i/o: {0}")]
    CacheIo(#[from] std::io::Error),

    /// Malformed membership profile (ordering, window, or shape).
    #[error("malformed profile: {0}")]
    ProfileShape(String),

    /// Operation requires profiles of matching length.
    #[error("profiles have mismatched lengths {0} and {1}")]
    MismatchedK(usize, usize),

    /// Operation requires at least `min` exponents per profile.
    #[error("operation requires k >= {min}, got {got}")]
    KTooSmall { min: usize, got: usize },

    /// Numeric precondition on an analytic routine (ranges, positivity).
    #[error("domain violation: {0}")]
    Domain(String),

    /// A decay scan was requested for a (profile, delta) pair that fails
    /// the exact rational admissibility inequality.
    #[error("inadmissible scan parameters: {0}")]
    InadmissibleScan(String),
}
