use std::fmt;

/// Constraint families of the encoding. Anchor variants share the letter of
/// the family they extend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
}

impl Family {
    /// Family of a constraint name such as `G1_2_5` or `Cp_7`.
    pub fn of_constraint(name: &str) -> Option<Family> {
        let prefix = name.split('_').next().unwrap_or(name);
        Some(match prefix {
            "A" => Family::A,
            "B" | "Bp" => Family::B,
            "C" | "Cp" => Family::C,
            "D" => Family::D,
            "E" => Family::E,
            "F" => Family::F,
            "G1" | "G2" => Family::G,
            "H" => Family::H,
            _ => return None,
        })
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, thiserror::Error)]
pub enum MilpError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("template hosts at most {capacity} joins but {required} are required")]
    TemplateTooSmall { capacity: usize, required: usize },
    #[error("duplicate name '{0}'")]
    DuplicateName(String),
    #[error("unknown variable '{0}'")]
    UnknownVariable(String),
    #[error("assignment has {got} values for {expected} variables")]
    AssignmentLength { got: usize, expected: usize },
    #[error("variable '{0}' is not integral")]
    NotIntegral(String),
    #[error("infeasible assignment: constraint {constraint} of family {family} is violated")]
    DecodeInfeasible { family: Family, constraint: String },
    #[error("search exceeded the limit of {limit} nodes")]
    GuardExceeded { limit: u64 },
    #[error("solver: {0}")]
    Solver(String),
    #[error(transparent)]
    Core(#[from] joinopt_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = MilpError> = std::result::Result<T, E>;
