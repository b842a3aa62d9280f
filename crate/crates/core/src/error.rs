use thiserror::Error;

/// Errors produced by constructions, verifiers and file parsing.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("v(v-1)(v-2) is not divisible by 24 for v={0}")]
    NotIntegral(u64),
    #[error("index {index} out of range for v={v}")]
    OutOfRange { v: u32, index: u64 },
    #[error("malformed block {block:?}: {reason}")]
    MalformedBlock { block: Vec<u32>, reason: String },
    #[error("symbol {symbol} outside alphabet of size {q}")]
    AlphabetViolation { symbol: u32, q: u32 },
    #[error("block {0:?} meets a group more than once")]
    NotTransverse(Vec<u32>),
    #[error("block {0:?} does not split 2+2 across the groups")]
    BadSplit(Vec<u32>),
    #[error("{0} is not a prime power")]
    NotPrimePower(u32),
    #[error("requested {requested} MOLS of order {q}, at most {max} exist")]
    TooMany { q: u32, requested: usize, max: usize },
    #[error("only {achievable} MOLS of order {n} are constructible (requested {requested})")]
    SupplyGap { n: u32, requested: usize, achievable: usize },
    #[error("order {0} is odd")]
    OddOrder(u32),
    #[error("subsquare size k={k} exceeds q/4 for q={q}")]
    BadK { q: u32, k: u32 },
    #[error("search exhausted after {attempts} attempts")]
    SearchExhausted { attempts: u64 },
    #[error("search budget of {budget} steps exhausted with {uncovered} triples uncovered")]
    SearchTimeout { budget: u64, uncovered: usize },
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("projection onto {given} coordinates, at least {needed} required")]
    TooFewCoords { given: usize, needed: usize },
    #[error("quasigroup assignment is not well defined: {0}")]
    NotWellDefined(String),
    #[error("parameter mismatch: {0}")]
    ParameterMismatch(String),
    #[error("swap symmetry or diagonal violated at word {0:?}")]
    SymmetryViolation(Vec<u32>),
    #[error("word {0:?} has distinct first coordinates but equal last coordinates")]
    DegenerateWord(Vec<u32>),
    #[error("subcode swap produced an invalid code: {0}")]
    SwapInvalid(String),
    #[error("kinds differ: {0} vs {1}")]
    KindMismatch(String, String),
    #[error("orders differ: {0}")]
    OrderMismatch(String),
    #[error("precondition failed: {0}")]
    PreconditionFailure(String),
    #[error("assembly invariant broken: {0}")]
    AssemblyInvariantBroken(String),
    #[error("{v} is not admissible for {kind}")]
    Inadmissible { v: u32, kind: String },
    #[error("order {v} is unreachable; missing rules: {missing:?}")]
    Unreachable { v: u32, missing: Vec<String> },
    #[error("verification failed: {0}")]
    VerificationFailure(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
