use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A value passed to the BISE coder is not below the range cardinality.
    ValueOutOfRange { value: u32, cardinality: u32 },
    /// No range-table entry can hold this value.
    RangeTableExceeded(u32),
    /// A residual does not fit the zigzag domain.
    ResidualOverflow(i32),
    /// Trit or quint pack byte past its table, or a truncated bit string.
    CorruptPayload(&'static str),
    BadMagic,
    UnsupportedVersion(u16),
    UnsupportedCodec(u8),
    Truncated { needed: usize, available: usize },
    /// Structural inconsistency inside an otherwise readable stream.
    Format(&'static str),
    InvalidParams(&'static str),
    DimensionMismatch,
    IndexOutOfRange,
    ZeroSizedGrid,
    ParallelRay,
    Codec(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ValueOutOfRange { value, cardinality } => {
                write!(f, "value {value} out of range 0..{cardinality}")
            }
            Error::RangeTableExceeded(v) => write!(f, "value {v} exceeds the BISE range table"),
            Error::ResidualOverflow(v) => write!(f, "residual {v} does not fit 11-bit zigzag"),
            Error::CorruptPayload(what) => write!(f, "corrupt payload: {what}"),
            Error::BadMagic => f.write_str("bad magic, not an RLFC stream"),
            Error::UnsupportedVersion(v) => write!(f, "unsupported stream version {v}"),
            Error::UnsupportedCodec(id) => write!(f, "unsupported root codec id {id}"),
            Error::Truncated { needed, available } => {
                write!(f, "stream truncated: need {needed} bytes, have {available}")
            }
            Error::Format(what) => write!(f, "malformed stream: {what}"),
            Error::InvalidParams(what) => write!(f, "invalid encoding parameters: {what}"),
            Error::DimensionMismatch => f.write_str("plane dimensions do not match"),
            Error::IndexOutOfRange => f.write_str("index out of range"),
            Error::ZeroSizedGrid => f.write_str("grid or image has a zero dimension"),
            Error::ParallelRay => f.write_str("ray is parallel to the light-slab planes"),
            Error::Codec(what) => write!(f, "root codec error: {what}"),
        }
    }
}

impl core::error::Error for Error {}
