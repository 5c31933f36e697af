//! Exact feasibility check of a candidate point.
//!
//! Every finite `f64` is a dyadic rational, so converting coefficients and
//! values without rounding gives an exact verdict. Rows whose data are all
//! integers below 2^53 take an `i128` shortcut.

use num_rational::BigRational;
use num_traits::Zero;

use crate::model::{MilpModel, Relation};

const SAFE_INT: f64 = 9_007_199_254_740_992.0;

fn small_int(x: f64) -> Option<i128> {
    (x.fract() == 0.0 && x.abs() < SAFE_INT).then_some(x as i128)
}

fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite value")
}

fn compare<T: PartialOrd + PartialEq>(lhs: &T, rel: Relation, rhs: &T) -> bool {
    match rel {
        Relation::Le => lhs <= rhs,
        Relation::Ge => lhs >= rhs,
        Relation::Eq => lhs == rhs,
    }
}

/// True iff `values` satisfies every bound, integrality requirement and row
/// of `model` with no tolerance at all.
pub fn satisfies_exactly(model: &MilpModel, values: &[f64]) -> bool {
    if values.len() != model.num_vars() || values.iter().any(|v| !v.is_finite()) {
        return false;
    }
    for (var, &x) in model.variables().iter().zip(values) {
        if x < var.lower || x > var.upper || (var.integer && x.fract() != 0.0) {
            return false;
        }
    }
    'rows: for row in model.constraints() {
        if let Some(rhs) = small_int(row.rhs) {
            let mut lhs: i128 = 0;
            for &(v, a) in &row.terms {
                match (small_int(a), small_int(values[v.0])) {
                    (Some(a), Some(x)) => lhs += a * x,
                    _ => {
                        if !rational_row_ok(row, values) {
                            return false;
                        }
                        continue 'rows;
                    }
                }
            }
            if !compare(&lhs, row.relation, &rhs) {
                return false;
            }
        } else if !rational_row_ok(row, values) {
            return false;
        }
    }
    true
}

fn rational_row_ok(row: &crate::model::Constraint, values: &[f64]) -> bool {
    let mut lhs = BigRational::zero();
    for &(v, a) in &row.terms {
        lhs += rational(a) * rational(values[v.0]);
    }
    let rhs = rational(row.rhs);
    compare(&lhs, row.relation, &rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Sense;

    #[test]
    fn tolerance_free_verdicts() {
        let mut m = MilpModel::new(Sense::Minimize);
        let x = m.add_continuous("x", 0.0, 1.0).unwrap();
        let y = m.add_continuous("y", 0.0, 1.0).unwrap();
        m.add_constraint("r", [(x, 0.1), (y, 0.2)], Relation::Le, 0.3).unwrap();
        // 0.1 + 0.2 > 0.3 in binary floating point, and exactly so.
        assert!(!satisfies_exactly(&m, &[1.0, 1.0]));
        assert!(satisfies_exactly(&m, &[1.0, 0.5]));
        assert!(!satisfies_exactly(&m, &[1.5, 0.0]));
    }

    #[test]
    fn integer_rows_use_exact_integers() {
        let mut m = MilpModel::new(Sense::Minimize);
        let x = m.add_integer("x", 0.0, 1e6).unwrap();
        let y = m.add_integer("y", 0.0, 1e6).unwrap();
        m.add_constraint("r", [(x, 70.0), (y, -10000.0)], Relation::Eq, 0.0).unwrap();
        assert!(satisfies_exactly(&m, &[10000.0, 70.0]));
        assert!(!satisfies_exactly(&m, &[10000.0, 70.5]));
    }
}
