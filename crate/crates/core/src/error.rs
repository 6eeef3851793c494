use alloc::string::String;
use alloc::vec::Vec;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("cross-ratio denominator vanishes (z1 = z4 or z2 = z3)")]
    ZeroDenominator,
    #[error("continuum has zero diameter")]
    DegenerateContinuum,
    #[error("no scales given")]
    EmptyScaleList,
    #[error("mesh graph is not connected")]
    NotConnected,
    #[error("radius {0} outside (0, diam]")]
    BadRadius(f64),
    #[error("mesh is not a 2-sphere (Euler characteristic {0})")]
    NotASphereMesh(i64),
    #[error("edge ({0}, {1}) is not shared by exactly two triangles")]
    NonManifoldEdge(usize, usize),
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("mesh size {mesh} is not below half the diameter {half_diam}")]
    MeshTooCoarse { mesh: f64, half_diam: f64 },
    #[error("no sample point at distance >= r_v from p_v for vertex {0}")]
    EmptyInfimumSet(usize),
    #[error("modulus solver did not converge after {iterations} constraint additions (gap {gap})")]
    NonConvergence { iterations: usize, gap: f64 },
    #[error("set inclusion A' in N_s(A) or B' in N_s(B) violated at vertex {0}")]
    InclusionViolated(usize),
    #[error("relative distance {0} is below 2")]
    SeparationTooSmall(f64),
    #[error("proof weight is not admissible: shortest chain sum {chain_sum}, rescale by {rescale}")]
    AdmissibilityFailed { chain_sum: f64, rescale: f64 },
    #[error("not a sphere triangulation: {0}")]
    NotATriangulation(String),
    #[error("radius iteration diverged (last residual {residual})")]
    IterationDiverged { residual: f64, trace: Vec<f64> },
    #[error("normalizing triple has no common orthogonal circle")]
    DegenerateTriple,
    #[error("normalizing triple basepoints closer than diam/4")]
    TripleTooClose,
    #[error("map domain has fewer than {0} points")]
    DomainTooSmall(usize),
    #[error("pair {0} violates the separation precondition")]
    SeparationViolated(usize),
    #[error("snowball level {0} exceeds the memory cap")]
    LevelTooDeep(u32),
    #[error("alpha must lie in (0, 1), got {0}")]
    BadAlpha(f64),
    #[error("no nested annulus fits between the continua")]
    AnnulusCountZero,
    #[error("ladder mesh sizes are not strictly decreasing at level {0}")]
    LadderNotRefining(usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = core::result::Result<T, Error>;
