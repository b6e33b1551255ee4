use thiserror::Error;

use crate::orbits::Orbit;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("twist count σ must be at least 1")]
    ZeroSigma,
    #[error("winding number must be at least 1")]
    ZeroWinding,
    #[error("entry ({row}, {col}) out of bounds for a {rows}x{cols} matrix")]
    OutOfBounds {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("numerator {n} violates 0 < n < {bound} for winding {m}")]
    NumeratorOutOfRange { n: u64, m: u64, bound: u64 },
    #[error("elliptic orbit with numerator {n} and winding {m} normalizes onto the core; no such generator")]
    EllipticOnCore { n: i64, m: u64 },
    #[error("{0} is not a torus or core orbit")]
    NotTorusOrCore(Orbit),
    #[error("({lower}, {upper}) is not a rigid cylinder pair")]
    NotAModuliPair { lower: Orbit, upper: Orbit },
    #[error("sign convention must satisfy c₋·c₊ = -1, got c₋={c_minus}, c₊={c_plus}")]
    InvalidSigns { c_minus: i8, c_plus: i8 },
    #[error("E_{{{i},{m}}} is undefined for σ = {sigma}")]
    UndefinedClosedForm { i: u64, m: u64, sigma: u64 },
    #[error("max winding {got} too small, need at least {need}")]
    WindowTooSmall { got: u64, need: u64 },
    #[error("no root of K_q = {slope} inside the profile region [{lo}, {hi}]")]
    NoSlopeRoot { slope: f64, lo: f64, hi: f64 },
    #[error("point is not on N: residual {residual:e}, r₂ = {r2} (ε = {epsilon})")]
    NotOnN { residual: f64, r2: f64, epsilon: f64 },
    #[error("radius {r} outside the tube r < ε = {epsilon}")]
    OutsideTube { r: f64, epsilon: f64 },
    #[error("radius must be nonnegative, got {0}")]
    NegativeRadius(f64),
    #[error("asymptotic exponents violate c·n₁ + n₂ > 0 (value {0})")]
    InvalidLaurent(f64),
    #[error("matrix is not symplectic: det = {0}")]
    NotSymplectic(f64),
    #[error("invalid local model parameters: {0}")]
    InvalidParams(String),
    #[error("cannot parse orbit `{0}`")]
    ParseOrbit(String),
}
