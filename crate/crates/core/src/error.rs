//! Error type shared by every module in the crate.
//!
//! All fallible operations return [`crate::Result`]. Variants are grouped by
//! the module that raises them; a handful (range checks, connectivity) are
//! shared. Precondition violations are always reported through these errors,
//! never by panicking, so callers (the CLI in particular) can map them onto
//! usage-error exits.

use thiserror::Error;

/// Unified error enum for graph, spectral, embedding, transport, Cayley,
/// and obstruction operations.
#[derive(Debug, Error)]
pub enum Error {
    // ---- graphs ----
    /// A graph must have at least one vertex.
    #[error("graph must have at least one vertex")]
    EmptyGraph,
    /// An edge endpoint referenced a vertex id outside `0..vertex_count`.
    #[error("edge endpoint {endpoint} out of range for {vertex_count} vertices")]
    EndpointOutOfRange { endpoint: usize, vertex_count: usize },
    /// Self-loops are rejected at construction: a loop contributes zero to
    /// every sum over edges of squared coordinate differences and would only
    /// distort the edge count.
    #[error("self-loop at vertex {0} is not allowed")]
    SelfLoop(usize),
    /// The operation is only defined on connected graphs.
    #[error("operation requires a connected graph")]
    Disconnected,
    /// Queried a pair with no connecting path.
    #[error("vertices {u} and {v} are in different components")]
    Unreachable { u: usize, v: usize },
    /// Vertex id outside the graph.
    #[error("vertex {vertex} out of range for {vertex_count} vertices")]
    VertexOutOfRange { vertex: usize, vertex_count: usize },
    /// A subset argument must be nonempty.
    #[error("vertex subset must be nonempty")]
    EmptySubset,
    /// Exhaustive subset enumeration is capped; larger graphs should use the
    /// spectral lower bound `lambda1 / (2 * d_max)` instead.
    #[error("graph has {size} vertices, over the exhaustive cap {cap}; use the spectral lower bound instead")]
    ExhaustiveCapExceeded { size: usize, cap: usize },
    /// The configuration model needs an even number of edge stubs.
    #[error("random regular graph requires n*d even (got n={n}, d={d})")]
    ParityViolation { n: usize, d: usize },
    /// A simple d-regular graph on n vertices needs d < n.
    #[error("degree {d} too large for {n} vertices")]
    DegreeTooLarge { n: usize, d: usize },
    /// The configuration model kept producing loops or parallel edges.
    #[error("random regular sampling failed after {attempts} rejection rounds")]
    RejectionFailure { attempts: usize },
    /// Family sizes must be strictly increasing.
    #[error("family sizes must be strictly increasing")]
    SizesNotIncreasing,
    /// Randomized family kinds need an explicit seed.
    #[error("family kind {kind} requires a seed")]
    SeedRequired { kind: &'static str },
    /// Text-format parse failure (edge lists, measures, sizes ranges).
    #[error("parse error: {0}")]
    Parse(String),

    // ---- spectral ----
    /// Vector length does not match the vertex count.
    #[error("vector length {got} does not match vertex count {want}")]
    LengthMismatch { got: usize, want: usize },
    /// Rayleigh quotients and eigen-witnesses need a nonconstant vector.
    #[error("vector is constant; quantity undefined")]
    ConstantVector,
    /// Graphs with a single vertex carry no nonconstant functions.
    #[error("graph has {0} vertex; spectral quantities need at least 2")]
    GraphTooSmall(usize),
    /// The iterative eigensolver failed to reach the requested tolerance.
    #[error("eigensolver did not converge (best residual {residual:.3e})")]
    EigenConvergence { residual: f64 },

    // ---- embed ----
    /// Ratio and concentration quantities are undefined for constant maps.
    #[error("embedding is constant; quantity undefined")]
    ConstantEmbedding,
    /// Requested embedding dimension is out of range.
    #[error("dimension {dim} out of range (must be 1..={max})")]
    DimOutOfRange { dim: usize, max: usize },
    /// The optimizer produced a spread above the proven ceiling
    /// `n * c0 / 2`; this indicates an implementation bug, never valid data.
    #[error("spread {spread} exceeds the concentration ceiling {ceiling}; optimizer invariant broken")]
    SpreadCeilingExceeded { spread: f64, ceiling: f64 },

    // ---- transport ----
    /// Weights must be nonnegative.
    #[error("measure weight {0} is negative")]
    NegativeWeight(f64),
    /// Measure support points must be distinct.
    #[error("measure support contains duplicate point {0}")]
    DuplicateSupport(usize),
    /// A measure must carry at least one atom.
    #[error("measure has empty support")]
    EmptyMeasure,
    /// Normalization needs positive total mass.
    #[error("measure has zero total mass")]
    ZeroMass,
    /// The transport distance is only a metric between equal-mass measures.
    #[error("measures have unequal total mass ({mu} vs {nu})")]
    UnequalMass { mu: f64, nu: f64 },
    /// A support point fell outside the ambient space.
    #[error("point {point} outside metric space of {len} points")]
    PointOutOfRange { point: usize, len: usize },
    /// The distance table failed a metric axiom.
    #[error("distance table is not a metric: {0}")]
    NotAMetric(String),
    /// The transportation solve exceeded its pivot budget.
    #[error("transport solve exceeded {0} pivots")]
    TransportStall(usize),
    /// A barycentric extension was asked for a point with no assigned value.
    #[error("map undefined at support point {0}")]
    UndefinedPoint(usize),
    /// The net leaves some point outside every open K-ball.
    #[error("net is not {k}-dense: point {point} has no net point within {k}")]
    NetNotDense { point: usize, k: f64 },
    /// Cover radius K must be a positive finite real.
    #[error("cover radius must be positive and finite, got {0}")]
    BadCoverRadius(f64),

    // ---- cayley ----
    /// Group parameters must describe a valid marked group.
    #[error("invalid group parameters: {0}")]
    BadGroupParams(String),
    /// Ball enumeration would exceed the configured element cap.
    #[error("cayley ball exceeds the cap of {cap} elements at radius {radius}")]
    BallCapExceeded { cap: usize, radius: u32 },
    /// Queried an element that was never enumerated.
    #[error("element outside the enumerated ball")]
    ElementOutsideBall,
    /// A generator step left the tested point domain.
    #[error("action leaves the tested domain at point {point_id} under generator {generator}")]
    ActionLeavesDomain { point_id: usize, generator: usize },
    /// Variation radius must stay within the enumerated ball.
    #[error("variation radius {r} exceeds enumerated ball radius {radius}")]
    VariationRadiusTooLarge { r: u32, radius: u32 },
    /// The operation expects a specific marked group.
    #[error("operation requires the group {expected}")]
    WrongGroup { expected: &'static str },
    /// Radial map parameters out of range.
    #[error("invalid radial map parameter: {0}")]
    BadRadialParams(String),
    /// The grid domain must extend beyond the flat radius r0.
    #[error("domain radius {radius} does not exceed r0 = {r0}")]
    DomainTooSmall { radius: u32, r0: f64 },

    // ---- coarse ----
    /// Witness search requires a verified 1-Lipschitz candidate.
    #[error("candidate map is not 1-Lipschitz (edge stretched to {worst})")]
    CandidateNotLipschitz { worst: i64 },
    /// No target ball of the forced radius captured half the image; for a
    /// verified 1-Lipschitz candidate this indicates an implementation bug.
    #[error("no ball of radius {radius} holds half the image (best fraction {best})")]
    WitnessNotFound { radius: f64, best: f64 },
    /// Obstruction targets other than the integer grid are not implemented.
    #[error("unsupported obstruction target {0}")]
    UnsupportedTarget(String),

    // ---- io (used by serde-facing helpers) ----
    /// JSON (de)serialization failure for measure files.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
