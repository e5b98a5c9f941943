use thiserror::Error;

use crate::ultrametric::Ball;

/// Errors raised by the library. Negative answers to decision questions
/// (no witness, budget exhausted) are ordinary return values, not errors.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("objects live over different spaces or structures")]
    SpaceMismatch,
    #[error("ball {0} does not exist in this space")]
    InvalidBall(Ball),
    #[error("ball {0} is a singleton and has no proper subballs")]
    NoSubballs(Ball),
    #[error("ball {inner} is not contained in {outer}")]
    NotASubball { inner: Ball, outer: Ball },
    #[error("codomain {cod} does not match domain {dom}")]
    DomainMismatch { cod: Ball, dom: Ball },
    #[error("ball {0} is not covered by the domain of the map")]
    OutsideDomain(Ball),
    #[error("empty clopen set")]
    EmptySet,
    #[error("balls {0} and {1} overlap")]
    Overlap(Ball, Ball),
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("invalid similarity: {0}")]
    InvalidSimilarity(String),
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
    #[error("closure exceeded {0} elements")]
    ClosureTooLarge(usize),
    #[error("domains do not partition the carrier")]
    DomainsNotPartition,
    #[error("codomains do not partition the carrier")]
    CodomainsNotPartition,
    #[error("entry {0} is not a member of the similarity structure")]
    EntryNotInSim(String),
    #[error("blocks do not form a partition: {0}")]
    NotAPartition(String),
    #[error("similarity is not equalizing")]
    NotEqualizing,
    #[error("operation requires a finite space")]
    NotFiniteSpace,
    #[error("similarity structure is not dually contracting")]
    NotDuallyContracting,
    #[error("element is not defined over the restriction to the given carrier")]
    CarrierMismatch,
    #[error("local similarity witness is invalid: {0}")]
    WitnessInvalid(String),
    #[error("malformed ping-pong witness: {0}")]
    MalformedWitness(String),
    #[error("second partition does not refine the first")]
    NotRefinement,
    #[error("chain is not strictly increasing under refinement")]
    NotStrictChain,
    #[error("finest vertex has {blocks} blocks, cap is {cap}")]
    TooManyBlocks { blocks: usize, cap: usize },
    #[error("enumeration exceeds budget of {0}")]
    BudgetExceeded(usize),
    #[error("syntax error at line {line}: {message}")]
    Syntax { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
