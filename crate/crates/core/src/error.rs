use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid group table: {0}")]
    InvalidTable(String),
    #[error("invalid homomorphism: {0}")]
    InvalidHom(String),
    #[error("theta is not a homomorphism into Aut(N): {0}")]
    InvalidTheta(String),
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("element set is not a subgroup")]
    NotSubgroup,
    #[error("homomorphism is not surjective")]
    NotSurjective,
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error("map is not equivariant: {0}")]
    NotEquivariant(String),
    #[error("solution space is not stable under the group action")]
    NotStable,
    #[error("maps are not composable: {0}")]
    NotComposable(String),
    #[error("not a crossed homomorphism: {0}")]
    NotCocycle(String),
    #[error("twisted action is not an action: {0}")]
    NotAction(String),
    #[error("enumeration budget exceeded: need {needed}, budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("incompatible actions: {0}")]
    IncompatibleActions(String),
    #[error("sequence is not exact: {0}")]
    NotExact(String),
    #[error("cocycle families are not equivalent at level {0}")]
    NotLevelEquivalent(usize),
    #[error("recipe cannot be materialized: {0}")]
    NotMaterializable(String),
    #[error("levelwise map is not injective at level {0}")]
    NotInjective(usize),
    #[error("unsupported recipe: {0}")]
    UnsupportedRecipe(String),
    #[error("p = {0} may divide the index of Z[x]/(f); Dedekind test failed")]
    IndexDivisor(u64),
    #[error("p = {p} ramifies (divides the conductor {conductor})")]
    Ramified { p: u64, conductor: u64, tame_e: Option<u64> },
    #[error("not a tower: {0}")]
    NotATower(String),
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),
    #[error("invalid CM datum: {0}")]
    InvalidDatum(String),
    #[error("not a CM type: {0}")]
    NotCMType(String),
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),
    #[error("invalid field datum: {0}")]
    InvalidField(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
