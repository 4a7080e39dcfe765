use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("invalid rational `{0}`")]
    BadRational(String),
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("edge refers to unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("edge {0} is a loop at `{1}`")]
    LoopEdge(usize, String),
    #[error("graph is disconnected")]
    Disconnected,
    #[error(
        "edge {index} joins `{u}` and `{v}` with equal values; the function is not injective on it"
    )]
    NotGood { index: usize, u: String, v: String },
    #[error("graph has no edges")]
    NoEdges,
}

/// Failures of surface operations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("degenerate triangle {0}")]
    DegenerateTriangle(usize),
    #[error("duplicate triangle {0}")]
    DuplicateTriangle(usize),
    #[error("edge ({0}, {1}) in {2} triangles")]
    NonManifoldEdge(usize, usize, usize),
    #[error("link of vertex {0} is not a single cycle")]
    BadVertexLink(usize),
    #[error("impossible surface: chi={chi}, orientable={orientable}")]
    ImpossibleSurface { chi: i64, orientable: bool },
    #[error("spare disk {0} is not a triangle of the mesh")]
    NotADisk(usize),
    #[error("spare disks share a vertex")]
    DisksOverlap,
    #[error("mesh is not anchored")]
    MissingAnchor,
    #[error("anchors differ")]
    AnchorMismatch,
    #[error("invalid mesh: {0}")]
    Invalid(String),
}

/// Failures of block construction and merging.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ForgeError {
    #[error("label r={0} has odd Euler characteristic; it bounds no compact 3-manifold")]
    OddCap(i64),
    #[error("interval must satisfy a1 < a < a2")]
    BadInterval,
    #[error("extreme value equals boundary value")]
    FlatCap,
    #[error("blocks do not share interval and singular value")]
    IntervalMismatch,
    #[error("invalid component pick: {0}")]
    BadPick(String),
    #[error("parity violated: {odd} odd-chi components in total")]
    Parity { odd: usize },
    #[error("empty side in junction request")]
    EmptySide,
    #[error("fold: {0}")]
    Fold(String),
    #[error("block has no interior tetrahedron for an interior sum")]
    NoInteriorTet,
    #[error("gluing produced an invalid complex: {0}")]
    Gluing(String),
    #[error("block is not mergeable: {0}")]
    NotMergeable(String),
    #[error("plan does not type-check: {0}")]
    Plan(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AssembleError {
    #[error("graph is not realizable: {0}")]
    NotRealizable(String),
    #[error("anchor mismatch gluing edge {edge}: {reason}")]
    AnchorMismatch { edge: usize, reason: String },
    #[error("no edge with index {0}")]
    NoSuchEdge(usize),
    #[error(transparent)]
    Forge(#[from] ForgeError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReebError {
    #[error("value {0} is a layer value; slices must be regular")]
    LayerValue(String),
    #[error("level set is not a closed surface: {0}")]
    BadSlice(#[from] SurfaceError),
    #[error("{0} values for {1} vertices")]
    ValueCount(usize, usize),
    #[error("slab component {slab} meets {count} level components at one end")]
    Incidence { slab: usize, count: usize },
}
