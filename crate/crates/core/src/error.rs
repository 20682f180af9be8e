use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree {0} out of range")]
    DegreeOutOfRange(u64),
    #[error("{0}^{1} does not fit the supported word size (q <= 2^31)")]
    Overflow(u64, u64),
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("operation requires odd characteristic")]
    EvenCharacteristic,
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("polynomial is constant")]
    Constant,
    #[error("polynomial degree must be at least {0}")]
    DegreeTooSmall(usize),
    #[error("polynomial is not squarefree")]
    NotSquarefree,
    #[error("generator polynomial must have positive degree")]
    ConstantPolynomial,
    #[error("generator list is empty")]
    EmptyGeneratorList,
    #[error("parts list is empty")]
    EmptyPartsList,
    #[error("coefficient set is empty")]
    EmptySet,
    #[error("enumeration needs {needed} tuples, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("scaling fit needs at least {min} grid points, got {got}")]
    GridTooSmall { min: usize, got: usize },
    #[error("element index {0} out of range")]
    ElementOutOfRange(u64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
