use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("range bound {0} exceeds the sieve capacity limit {1}")]
    Capacity(u64, u64),
    #[error("invalid range: lo {lo} > hi {hi}")]
    InvalidRange { lo: u64, hi: u64 },
    #[error("tuple offset must be >= 1")]
    InvalidOffset,
    #[error("value {value} at position {index} has residue {residue} mod {modulus}, not in the alphabet")]
    UnmappedResidue {
        value: u64,
        index: usize,
        residue: u64,
        modulus: u64,
    },
    #[error("modulus {0} does not have exactly 4 reduced residues")]
    InvalidModulus(u64),
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("symbol {0} is not in 1..=4")]
    InvalidSymbol(u8),
    #[error("stream of length {got} is too short (need at least {need})")]
    ShortStream { need: usize, got: usize },
    #[error("symbol {symbol} out of range for a system with {maps} maps")]
    SymbolOutOfRange { symbol: u8, maps: usize },
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("map {0} is not a dyadic quadrant map; deterministic iteration is unsupported")]
    UnsupportedMap(usize),
    #[error("point ({0}, {1}) is outside the unit square")]
    OutOfUnitSquare(f64, f64),
    #[error("invalid address: {0}")]
    InvalidAddress(String),
    #[error("frequency table has fewer than 2 keys in its declared key space")]
    DegenerateTable,
    #[error("k must be >= 1")]
    InvalidArity,
    #[error("grid size must be >= 2")]
    InvalidGridSize,
    #[error("scan size must be >= 1")]
    EmptyScan,
}

pub type Result<T> = std::result::Result<T, Error>;
