use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Element-count ceiling for any single tensor or delta array.
///
/// Guards allocation, not precision: the default (2^26 elements, ~1 GiB of
/// complex f64) is far above anything the desk-scale checks need.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_elements: u64,
}

pub const DEFAULT_BUDGET_ELEMENTS: u64 = 1 << 26;

impl Default for Budget {
    fn default() -> Self {
        Budget { max_elements: DEFAULT_BUDGET_ELEMENTS }
    }
}

impl Budget {
    pub fn elements(max_elements: u64) -> Self {
        Budget { max_elements }
    }

    /// Errors with the required count when `required` will not fit.
    pub fn check(&self, required: u128, context: &str) -> Result<()> {
        if required > self.max_elements as u128 {
            return Err(Error::BudgetExceeded {
                required,
                allowed: self.max_elements,
                context: context.to_string(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{context}: needs {required} elements, budget allows {allowed}")]
    BudgetExceeded { required: u128, allowed: u64, context: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("frequency boxes differ: left d={left_d} r={left_r} M={left_m}, right d={right_d} r={right_r} M={right_m}")]
    BoxMismatch { left_d: usize, left_r: usize, left_m: usize, right_d: usize, right_r: usize, right_m: usize },

    #[error("coordinates {coords:?} outside the radius-{m} box")]
    OutOfBox { coords: Vec<i64>, m: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("family must hold {expected} specs, got {got}")]
    FamilySize { expected: usize, got: usize },

    #[error("bracket of arity {arity} needs {needed} kernels, got {got}")]
    KernelArity { arity: usize, needed: usize, got: usize },

    #[error("tower holds levels 0..={built}, level {requested} was requested")]
    LevelMissing { requested: usize, built: usize },

    #[error("unsupported spec variant for this operation: {0}")]
    UnsupportedVariant(String),

    #[error("operation requires a band-limited spec: {0}")]
    BandLimitRequired(String),

    #[error("truncation radius {got} too small, need at least {required}")]
    InsufficientRadius { required: usize, got: usize },

    #[error("mollifier table must be positive with unit mean")]
    NonPositiveKernel,
}
