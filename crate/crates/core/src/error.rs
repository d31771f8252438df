use num_bigint::BigInt;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("model is singular (discriminant is zero)")]
    SingularModel,
    #[error("scale factor u must be nonzero")]
    ZeroScale,
    #[error("coordinate change does not produce an integral model")]
    NonIntegralModel,
    #[error("{0} is not prime")]
    NotPrime(BigInt),
    #[error("modulus {0} exceeds the point-counting limit")]
    ModulusTooLarge(u64),
    #[error("curve has bad reduction at {0}")]
    BadReduction(u64),
    #[error("cannot factor remaining cofactor {0} by trial division")]
    FactorizationFailed(BigInt),
    #[error("invalid cyclic factor {0}; factors must be positive")]
    InvalidGroupFactor(u64),
    #[error("group order {0} exceeds the enumeration limit")]
    GroupTooLarge(u128),
    #[error("matrix shape does not match the group's factor count")]
    MatrixShape,
    #[error("matrix does not define an automorphism of the group")]
    NotAutomorphism,
    #[error("automorphism was built for a different group")]
    GroupMismatch,
    #[error("sigma^m is not the identity")]
    SigmaOrderMismatch,
    #[error("operation is defined only for cyclic models with Frobenius acting as +1 or -1")]
    UnsupportedModel,
    #[error("unrecognized Kodaira symbol \"{0}\"")]
    BadKodairaSymbol(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("record {label}: {msg}")]
    RecordValidation { label: String, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}
