use thiserror::Error;

/// Errors produced by the lattice, group and L-subgroup engines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    // lattice loading and queries
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("duplicate element `{0}`")]
    DuplicateElement(String),
    #[error("order relation has a cycle through `{0}` and `{1}`")]
    OrderCycle(String, String),
    #[error("elements `{0}` and `{1}` have no meet")]
    NoMeet(String, String),
    #[error("elements `{0}` and `{1}` have no join")]
    NoJoin(String, String),
    #[error("lattice has {0} elements, at most 64 are supported")]
    LatticeTooLarge(usize),
    #[error("lattice has no elements")]
    EmptyLattice,
    #[error("`{0}` is not below `{1}`")]
    NotComparable(String, String),

    // group loading and queries
    #[error("cayley table is not closed: {0}")]
    NotClosedTable(String),
    #[error("element 0 is not an identity: {0}")]
    NoIdentity(String),
    #[error("element {0} has no inverse")]
    NoInverse(usize),
    #[error("multiplication is not associative at ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("bad permutation: {0}")]
    BadPermutation(String),
    #[error("group order exceeds the cap of {cap}")]
    OrderCap { cap: usize },
    #[error("map is not a homomorphism at ({0}, {1})")]
    NotAHomomorphism(usize, usize),

    // L-subsets
    #[error("L-subsets live on different groups or lattices")]
    CarrierMismatch,
    #[error("lattice value `{0}` does not belong to the lattice")]
    LatticeMismatch(String),

    // L-subgroups
    #[error("strong-level characterization requires a chain lattice")]
    NotAChain,
    #[error("not an L-subgroup of the ambient L-subset: {0}")]
    NotAnLSubgroup(String),
    #[error("L-subset is not contained in the ambient L-subset")]
    NotContained,
    #[error("tip equals tail, nilpotency class is undefined")]
    TipEqualsTail,
    #[error(
        "join of commuting L-points does not commute at element {0} (lattice not distributive)"
    )]
    JoinNotCommuting(usize),

    // enumeration
    #[error("budget exceeded after {visited} candidates")]
    BudgetExceeded { visited: u64 },
    #[error("no witness: {0}")]
    NoWitness(String),

    // front end
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
