use std::collections::HashMap;

use crate::error::{MilpError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    Integer,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        }
    }
}

/// `Σ coefficient · variable (sense) rhs`, with variables given by index.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, a)| a * values[v]).sum()
    }

    /// Whether `values` satisfy the constraint up to an absolute tolerance
    /// scaled by the magnitude of the terms involved.
    pub fn is_satisfied(&self, values: &[f64], tol: f64) -> bool {
        let lhs = self.activity(values);
        let scale = 1.0
            + self.rhs.abs()
            + self
                .terms
                .iter()
                .map(|&(v, a)| (a * values[v]).abs())
                .sum::<f64>();
        let slack = tol * scale;
        match self.sense {
            Sense::Le => lhs <= self.rhs + slack,
            Sense::Ge => lhs >= self.rhs - slack,
            Sense::Eq => (lhs - self.rhs).abs() <= slack,
        }
    }
}

/// A minimization model over binary and bounded integer variables.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MilpModel {
    variables: Vec<Variable>,
    constraints: Vec<Constraint>,
    objective: Vec<(usize, f64)>,
    var_index: HashMap<String, usize>,
    con_index: HashMap<String, usize>,
}

impl MilpModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> Result<usize> {
        self.add_variable(name, VarKind::Binary, 0.0, 1.0)
    }

    pub fn add_variable(
        &mut self,
        name: impl Into<String>,
        kind: VarKind,
        lower: f64,
        upper: f64,
    ) -> Result<usize> {
        let name = name.into();
        if !valid_name(&name) {
            return Err(MilpError::InvalidArgument(format!(
                "invalid variable name '{name}'"
            )));
        }
        if !(lower.is_finite() && upper.is_finite() && lower <= upper)
            || lower.fract() != 0.0
            || upper.fract() != 0.0
        {
            return Err(MilpError::InvalidArgument(format!(
                "invalid bounds [{lower}, {upper}] for '{name}'"
            )));
        }
        if kind == VarKind::Binary && (lower < 0.0 || upper > 1.0) {
            return Err(MilpError::InvalidArgument(format!(
                "binary '{name}' must lie within [0, 1]"
            )));
        }
        if self.var_index.contains_key(&name) {
            return Err(MilpError::DuplicateName(name));
        }
        let id = self.variables.len();
        self.var_index.insert(name.clone(), id);
        self.variables.push(Variable {
            name,
            kind,
            lower,
            upper,
        });
        Ok(id)
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(usize, f64)>,
        sense: Sense,
        rhs: f64,
    ) -> Result<usize> {
        let name = name.into();
        if !valid_name(&name) {
            return Err(MilpError::InvalidArgument(format!(
                "invalid constraint name '{name}'"
            )));
        }
        if self.con_index.contains_key(&name) {
            return Err(MilpError::DuplicateName(name));
        }
        self.check_terms(&terms)?;
        if !rhs.is_finite() {
            return Err(MilpError::InvalidArgument(format!(
                "non-finite right-hand side in '{name}'"
            )));
        }
        let id = self.constraints.len();
        self.con_index.insert(name.clone(), id);
        self.constraints.push(Constraint {
            name,
            terms,
            sense,
            rhs,
        });
        Ok(id)
    }

    pub fn set_objective(&mut self, terms: Vec<(usize, f64)>) -> Result<()> {
        self.check_terms(&terms)?;
        self.objective = terms;
        Ok(())
    }

    fn check_terms(&self, terms: &[(usize, f64)]) -> Result<()> {
        for &(v, a) in terms {
            if v >= self.variables.len() {
                return Err(MilpError::InvalidArgument(format!(
                    "term references undeclared variable {v}"
                )));
            }
            if !a.is_finite() {
                return Err(MilpError::InvalidArgument(format!(
                    "non-finite coefficient for '{}'",
                    self.variables[v].name
                )));
            }
        }
        Ok(())
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &[(usize, f64)] {
        &self.objective
    }

    pub fn n_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn n_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn var(&self, name: &str) -> Option<usize> {
        self.var_index.get(name).copied()
    }

    pub fn constraint(&self, name: &str) -> Option<&Constraint> {
        self.con_index.get(name).map(|&i| &self.constraints[i])
    }

    pub fn evaluate_objective(&self, values: &[f64]) -> f64 {
        self.objective.iter().map(|&(v, a)| a * values[v]).sum()
    }

    /// Looks a value up by variable name.
    pub fn value(&self, values: &[f64], name: &str) -> Result<f64> {
        self.var(name)
            .map(|i| values[i])
            .ok_or_else(|| MilpError::UnknownVariable(name.to_string()))
    }

    /// Rounds every value to the nearest integer after checking that it lies
    /// within `tol` of one and within the variable's bounds.
    pub fn round_values(&self, values: &[f64], tol: f64) -> Result<Vec<f64>> {
        if values.len() != self.variables.len() {
            return Err(MilpError::AssignmentLength {
                got: values.len(),
                expected: self.variables.len(),
            });
        }
        self.variables
            .iter()
            .zip(values)
            .map(|(var, &x)| {
                let r = x.round();
                if !x.is_finite() || (x - r).abs() > tol || r < var.lower || r > var.upper {
                    Err(MilpError::NotIntegral(var.name.clone()))
                } else {
                    Ok(r)
                }
            })
            .collect()
    }

    /// The first constraint `values` violate, if any.
    pub fn first_violation(&self, values: &[f64], tol: f64) -> Option<&Constraint> {
        self.constraints
            .iter()
            .find(|c| !c.is_satisfied(values, tol))
    }
}

/// Names usable in LP files: non-empty, no whitespace or operator
/// characters, not starting with a digit or period.
fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name.len() <= 255
        && !name.starts_with(|c: char| c.is_ascii_digit() || c == '.')
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || "_!\"#$%&(),.;?@'{}~".contains(c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_bad_references() {
        let mut m = MilpModel::new();
        let x = m.add_binary("x").unwrap();
        assert!(matches!(
            m.add_binary("x"),
            Err(MilpError::DuplicateName(_))
        ));
        assert!(m.add_binary("2x").is_err());
        assert!(m.add_binary("a b").is_err());
        assert!(m
            .add_constraint("c", vec![(x + 1, 1.0)], Sense::Le, 1.0)
            .is_err());
        m.add_constraint("c", vec![(x, 1.0)], Sense::Le, 1.0)
            .unwrap();
        assert!(m
            .add_constraint("c", vec![(x, 1.0)], Sense::Le, 1.0)
            .is_err());
        assert!(m.add_variable("y", VarKind::Integer, 0.0, 2.5).is_err());
    }

    #[test]
    fn evaluation_and_verification() {
        let mut m = MilpModel::new();
        let x = m.add_binary("x").unwrap();
        let y = m.add_variable("y", VarKind::Integer, 0.0, 5.0).unwrap();
        m.add_constraint("sum", vec![(x, 1.0), (y, 1.0)], Sense::Eq, 3.0)
            .unwrap();
        m.set_objective(vec![(x, 2.0), (y, 1.0)]).unwrap();
        assert_eq!(m.evaluate_objective(&[1.0, 2.0]), 4.0);
        assert!(m.first_violation(&[1.0, 2.0], 1e-9).is_none());
        assert_eq!(m.first_violation(&[1.0, 3.0], 1e-9).unwrap().name, "sum");
        assert_eq!(
            m.round_values(&[0.9999999, 2.0000001], 1e-6).unwrap(),
            vec![1.0, 2.0]
        );
        assert!(m.round_values(&[0.5, 2.0], 1e-6).is_err());
        assert!(m.round_values(&[1.0, 6.0], 1e-6).is_err());
    }
}
