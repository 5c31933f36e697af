//! Model representation: bounded variables, linear rows and a linear objective.

use std::fmt;
use std::io::{self, Write};

use crate::error::MilpError;

/// Handle to a declared variable. Indices are dense and follow declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    pub fn holds(self, lhs: f64, rhs: f64, tol: f64) -> bool {
        match self {
            Relation::Le => lhs <= rhs + tol,
            Relation::Ge => lhs >= rhs - tol,
            Relation::Eq => (lhs - rhs).abs() <= tol,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub integer: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    /// Sparse coefficients, sorted by variable and free of duplicates.
    pub terms: Vec<(VarId, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, a)| a * values[v.0]).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Objective {
    pub sense: Sense,
    /// Dense coefficient vector indexed by variable.
    pub coefficients: Vec<f64>,
}

impl Objective {
    pub fn evaluate(&self, values: &[f64]) -> f64 {
        self.coefficients
            .iter()
            .zip(values)
            .map(|(c, x)| c * x)
            .sum()
    }
}

/// A mixed-integer linear program with finite variable bounds.
///
/// The invariants (declared variables only, finite `lower <= upper`) are
/// enforced by the builder methods, so a constructed model is always valid.
#[derive(Debug, Clone, PartialEq)]
pub struct MilpModel {
    variables: Vec<Variable>,
    constraints: Vec<Constraint>,
    objective: Objective,
}

impl MilpModel {
    pub fn new(sense: Sense) -> Self {
        MilpModel {
            variables: Vec::new(),
            constraints: Vec::new(),
            objective: Objective {
                sense,
                coefficients: Vec::new(),
            },
        }
    }

    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        lower: f64,
        upper: f64,
        integer: bool,
    ) -> Result<VarId, MilpError> {
        let name = name.into();
        if !lower.is_finite() || !upper.is_finite() {
            return Err(MilpError::NonFiniteBound(name));
        }
        if lower > upper {
            return Err(MilpError::InvertedBounds { name, lower, upper });
        }
        let id = VarId(self.variables.len());
        self.variables.push(Variable {
            name,
            lower,
            upper,
            integer,
        });
        self.objective.coefficients.push(0.0);
        Ok(id)
    }

    pub fn add_integer(
        &mut self,
        name: impl Into<String>,
        lower: f64,
        upper: f64,
    ) -> Result<VarId, MilpError> {
        self.add_var(name, lower, upper, true)
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> Result<VarId, MilpError> {
        self.add_var(name, 0.0, 1.0, true)
    }

    pub fn add_continuous(
        &mut self,
        name: impl Into<String>,
        lower: f64,
        upper: f64,
    ) -> Result<VarId, MilpError> {
        self.add_var(name, lower, upper, false)
    }

    /// Adds a row. Repeated variables in `terms` are merged and zero
    /// coefficients dropped.
    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: impl IntoIterator<Item = (VarId, f64)>,
        relation: Relation,
        rhs: f64,
    ) -> Result<usize, MilpError> {
        let name = name.into();
        if !rhs.is_finite() {
            return Err(MilpError::NonFiniteCoefficient(name));
        }
        let mut merged: Vec<(VarId, f64)> = Vec::new();
        for (var, coef) in terms {
            self.check_var(var)?;
            if !coef.is_finite() {
                return Err(MilpError::NonFiniteCoefficient(name));
            }
            merged.push((var, coef));
        }
        merged.sort_by_key(|&(v, _)| v);
        let mut terms: Vec<(VarId, f64)> = Vec::with_capacity(merged.len());
        for (v, c) in merged {
            match terms.last_mut() {
                Some(last) if last.0 == v => last.1 += c,
                _ => terms.push((v, c)),
            }
        }
        terms.retain(|&(_, c)| c != 0.0);
        self.constraints.push(Constraint {
            name,
            terms,
            relation,
            rhs,
        });
        Ok(self.constraints.len() - 1)
    }

    pub fn set_objective_coef(&mut self, var: VarId, coef: f64) -> Result<(), MilpError> {
        self.check_var(var)?;
        if !coef.is_finite() {
            return Err(MilpError::NonFiniteCoefficient(format!(
                "objective[{}]",
                self.variables[var.0].name
            )));
        }
        self.objective.coefficients[var.0] = coef;
        Ok(())
    }

    fn check_var(&self, var: VarId) -> Result<(), MilpError> {
        if var.0 >= self.variables.len() {
            Err(MilpError::UnknownVariable(var.0))
        } else {
            Ok(())
        }
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &Objective {
        &self.objective
    }

    pub fn sense(&self) -> Sense {
        self.objective.sense
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.variables
            .iter()
            .position(|v| v.name == name)
            .map(VarId)
    }

    /// Largest violation of bounds, rows and integrality at `values`.
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (var, &x) in self.variables.iter().zip(values) {
            worst = worst.max(var.lower - x).max(x - var.upper);
            if var.integer {
                worst = worst.max((x - x.round()).abs());
            }
        }
        for row in &self.constraints {
            let lhs = row.activity(values);
            let viol = match row.relation {
                Relation::Le => lhs - row.rhs,
                Relation::Ge => row.rhs - lhs,
                Relation::Eq => (lhs - row.rhs).abs(),
            };
            worst = worst.max(viol);
        }
        worst
    }

    pub fn is_feasible(&self, values: &[f64], tol: f64) -> bool {
        values.len() == self.variables.len() && self.max_violation(values) <= tol
    }

    /// Writes the model in CPLEX LP text format, for cross-checking with
    /// external solvers. Variable names are sanitised to the LP charset.
    pub fn write_lp<W: Write>(&self, mut out: W) -> io::Result<()> {
        let names: Vec<String> = self
            .variables
            .iter()
            .enumerate()
            .map(|(i, v)| lp_name(&v.name, i))
            .collect();
        writeln!(
            out,
            "{}",
            match self.objective.sense {
                Sense::Minimize => "Minimize",
                Sense::Maximize => "Maximize",
            }
        )?;
        write!(out, " obj:")?;
        let obj_terms: Vec<(VarId, f64)> = self
            .objective
            .coefficients
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0.0)
            .map(|(i, &c)| (VarId(i), c))
            .collect();
        write_terms(&mut out, &obj_terms, &names)?;
        writeln!(out)?;
        writeln!(out, "Subject To")?;
        for (i, row) in self.constraints.iter().enumerate() {
            write!(out, " c{}:", i)?;
            write_terms(&mut out, &row.terms, &names)?;
            writeln!(out, " {} {}", row.relation, row.rhs)?;
        }
        writeln!(out, "Bounds")?;
        for (v, name) in self.variables.iter().zip(&names) {
            writeln!(out, " {} <= {} <= {}", v.lower, name, v.upper)?;
        }
        let ints: Vec<&String> = self
            .variables
            .iter()
            .zip(&names)
            .filter(|(v, _)| v.integer)
            .map(|(_, n)| n)
            .collect();
        if !ints.is_empty() {
            writeln!(out, "General")?;
            for chunk in ints.chunks(8) {
                let line: Vec<&str> = chunk.iter().map(|s| s.as_str()).collect();
                writeln!(out, " {}", line.join(" "))?;
            }
        }
        writeln!(out, "End")
    }
}

fn lp_name(name: &str, index: usize) -> String {
    let cleaned: String = name
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "_.".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect();
    if cleaned.is_empty() || cleaned.starts_with(|c: char| c.is_ascii_digit() || c == '.') {
        format!("x{}_{}", index, cleaned)
    } else {
        cleaned
    }
}

fn write_terms<W: Write>(out: &mut W, terms: &[(VarId, f64)], names: &[String]) -> io::Result<()> {
    if terms.is_empty() {
        return write!(out, " 0");
    }
    for &(v, c) in terms {
        if c < 0.0 {
            write!(out, " - {} {}", -c, names[v.0])?;
        } else {
            write!(out, " + {} {}", c, names[v.0])?;
        }
    }
    Ok(())
}
