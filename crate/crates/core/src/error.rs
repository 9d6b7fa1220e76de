use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("extension degree {0} out of range 1..=24")]
    DegreeOutOfRange(u32),
    #[error("modulus {modulus:#x} does not have degree {expected}")]
    ModulusDegree { expected: u32, modulus: u32 },
    #[error("modulus {0:#x} is reducible over GF(2)")]
    Reducible(u32),
    #[error("{bits:#x} is not an element of GF(2^{n})")]
    NotInField { bits: u32, n: u32 },
    #[error("malformed hex literal {0:?} (expected 0x prefix)")]
    BadHex(String),
    #[error("{0} is undefined for the zero element")]
    ZeroElement(&'static str),
    #[error("GF(2^{k}) is not a subfield of GF(2^{n})")]
    NotASubfield { k: u32, n: u32 },
    #[error("GF(2^{n}) has no element of order {order}")]
    NoSuchOrder { order: u64, n: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("polynomials live over different fields")]
    ContextMismatch,
    #[error("not divisible by {form}: substitution leaves {witness}")]
    NotDivisible { form: String, witness: String },
    #[error("linear form is zero")]
    ZeroForm,
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("coefficient at offset {pos}: {source}")]
    Coefficient { pos: usize, source: FieldError },
    #[error("exponent {0} exceeds the total-degree cap")]
    DegreeCap(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DdtError {
    #[error("GF(2^{n}) is too large for exhaustive mode (limit n <= {limit})")]
    FieldTooLarge { n: u32, limit: u32 },
    #[error("polynomial and field disagree")]
    ContextMismatch,
    #[error("degree {0} is below 5")]
    DegreeTooSmall(i64),
    #[error("{family} constraint violated: {condition}")]
    ConstraintViolated {
        family: &'static str,
        condition: String,
    },
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScreenError {
    #[error("d = {0} is even; reduce with even_reduction first")]
    EvenDegree(u32),
    #[error("degree {0} is below the minimum {1}")]
    DegreeTooSmall(u64, u64),
    #[error("degree {0} exceeds the supported maximum {1}")]
    DegreeTooLarge(u64, u64),
    #[error("exhaustive cubic search needs q <= 4, got q = 2^{0}")]
    SearchTooLarge(u32),
    #[error("parameters must live in the cubic extension GF(2^{expected}), got GF(2^{got})")]
    ExtensionUnavailable { expected: u32, got: u32 },
    #[error("audit parameter l = {0} must be odd")]
    EvenL(u32),
    #[error("audit parameter i = {0} must be at least 1")]
    AuditIndex(u32),
    #[error("phi is identically zero")]
    ZeroSurface,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Phi(#[from] PhiError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PhiError {
    #[error("j = {0} is odd")]
    OddDegree(u32),
    #[error("identity phi_{j} = D^{multiplier_exp} * phi_{core}^{square} failed")]
    IdentityFailed {
        j: u32,
        multiplier_exp: u32,
        core: u32,
        square: u32,
    },
    #[error(transparent)]
    Field(#[from] FieldError),
}
