//! Conversion of a [`RawLP`] to `min c^T x, Ax = b, x >= 0`.
//!
//! Column layout: the original columns in file order (shifted by their
//! lower bounds), then one slack or surplus column per inequality row.
//! Row layout: the file's constraint rows in order, then the second half
//! of every ranged row, then one row per finite upper bound.

use pivotree_core::{DenseMatrix, StandardFormLP};

use crate::mps::{MpsError, ObjSense, RawLP, RowKind};

/// A standard-form LP plus what is needed to map results back to the
/// original variables and objective.
#[derive(Debug, Clone)]
pub struct StandardInstance {
    pub name: String,
    pub lp: StandardFormLP,
    pub sense: ObjSense,
    /// Number of leading columns that are original variables.
    pub original_columns: usize,
    /// Lower bound each original variable was shifted by.
    pub shift: Vec<f64>,
    /// Added to the standard-form objective to get the minimization
    /// objective of the original problem.
    pub objective_constant: f64,
}

impl StandardInstance {
    /// Original objective value for a standard-form objective value.
    pub fn original_objective(&self, standard: f64) -> f64 {
        let v = standard + self.objective_constant;
        match self.sense {
            ObjSense::Min => v,
            ObjSense::Max => -v,
        }
    }

    /// Values of the original variables for a standard-form solution.
    pub fn recover_original(&self, x: &[f64]) -> Vec<f64> {
        x[..self.original_columns]
            .iter()
            .zip(&self.shift)
            .map(|(v, l)| v + l)
            .collect()
    }
}

struct Row {
    name: String,
    coeffs: Vec<(usize, f64)>,
    kind: RowKind,
    rhs: f64,
}

pub fn to_standard_form(raw: &RawLP) -> Result<StandardInstance, MpsError> {
    let ncols = raw.columns.len();
    let shift: Vec<f64> = raw.columns.iter().map(|c| c.lower).collect();

    let mut by_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); raw.rows.len()];
    for &(r, c, v) in &raw.entries {
        by_row[r].push((c, v));
    }
    let mut rows = Vec::with_capacity(raw.rows.len());
    let mut extra = Vec::new();
    for (raw_row, coeffs) in raw.rows.iter().zip(by_row) {
        let shifted: f64 = coeffs.iter().map(|&(c, v)| v * shift[c]).sum();
        let rhs = raw_row.rhs - shifted;
        let name = raw_row.name.clone();
        match raw_row.range {
            None => rows.push(Row {
                name,
                coeffs,
                kind: raw_row.kind,
                rhs,
            }),
            Some(r) => {
                let (lo, hi) = match raw_row.kind {
                    RowKind::Le => (rhs - r.abs(), rhs),
                    RowKind::Ge => (rhs, rhs + r.abs()),
                    RowKind::Eq if r >= 0.0 => (rhs, rhs + r),
                    RowKind::Eq => (rhs + r, rhs),
                };
                rows.push(Row {
                    name: name.clone(),
                    coeffs: coeffs.clone(),
                    kind: RowKind::Le,
                    rhs: hi,
                });
                extra.push(Row {
                    name: format!("{name}.lo"),
                    coeffs,
                    kind: RowKind::Ge,
                    rhs: lo,
                });
            }
        }
    }
    rows.append(&mut extra);
    for (j, col) in raw.columns.iter().enumerate() {
        if let Some(u) = col.upper {
            if u < col.lower {
                return Err(MpsError::UnsupportedFeature(format!(
                    "empty bound interval on `{}`",
                    col.name
                )));
            }
            let kind = if u == col.lower {
                RowKind::Eq
            } else {
                RowKind::Le
            };
            rows.push(Row {
                name: format!("{}.up", col.name),
                coeffs: vec![(j, 1.0)],
                kind,
                rhs: u - col.lower,
            });
        }
    }
    if rows.is_empty() {
        return Err(MpsError::UnsupportedFeature("no constraint rows".into()));
    }

    let slacks = rows.iter().filter(|r| r.kind != RowKind::Eq).count();
    let (m, n) = (rows.len(), ncols + slacks);
    let mut a = DenseMatrix::zeros(m, n);
    let mut b = vec![0.0; m];
    let mut var_names: Vec<String> = raw.columns.iter().map(|c| c.name.clone()).collect();
    let mut next = ncols;
    for (i, row) in rows.iter().enumerate() {
        for &(c, v) in &row.coeffs {
            a[(i, c)] += v;
        }
        let slack = match row.kind {
            RowKind::Le => Some((1.0, "slack")),
            RowKind::Ge => Some((-1.0, "surplus")),
            RowKind::Eq => None,
        };
        if let Some((sign, tag)) = slack {
            a[(i, next)] = sign;
            var_names.push(format!("{}.{tag}", row.name));
            next += 1;
        }
        b[i] = row.rhs;
        if row.rhs < 0.0 {
            b[i] = -row.rhs;
            a.row_mut(i).iter_mut().for_each(|v| *v = -*v);
        }
    }

    let flip = if raw.sense == ObjSense::Max {
        -1.0
    } else {
        1.0
    };
    let mut c = vec![0.0; n];
    for (j, col) in raw.columns.iter().enumerate() {
        c[j] = flip * col.cost;
    }
    let objective_constant = flip * raw.objective_constant
        + c[..ncols]
            .iter()
            .zip(&shift)
            .map(|(c, l)| c * l)
            .sum::<f64>();
    let row_names = rows.into_iter().map(|r| r.name).collect();
    let lp = StandardFormLP::with_names(c, a, b, var_names, row_names)
        .map_err(|e| MpsError::UnsupportedFeature(e.to_string()))?;
    Ok(StandardInstance {
        name: raw.name.clone(),
        lp,
        sense: raw.sense,
        original_columns: ncols,
        shift,
        objective_constant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mps::parse_mps;
    use pivotree_core::{phase_one, run_simplex, RuleKind};

    fn solve(inst: &StandardInstance) -> (f64, Vec<f64>) {
        let init = phase_one(&inst.lp).unwrap().state;
        let run = run_simplex(&inst.lp, &init, RuleKind::Bland, 1000).unwrap();
        let x = run.final_state.solution(inst.lp.n());
        (
            inst.original_objective(run.final_state.objective()),
            inst.recover_original(&x),
        )
    }

    #[test]
    fn le_row_gets_one_slack() {
        let text = "NAME T\nROWS\n N obj\n L c1\n E c2\nCOLUMNS\n x obj 1 c1 2\n x c2 1\n y c1 1\nRHS\n RHS c1 4 c2 1\nENDATA\n";
        let inst = to_standard_form(&parse_mps(text).unwrap()).unwrap();
        assert_eq!((inst.lp.m(), inst.lp.n()), (2, 3));
        assert_eq!(inst.lp.a().column(2), vec![1.0, 0.0]);
        assert_eq!(inst.lp.var_names()[2], "c1.slack");
    }

    #[test]
    fn negative_rhs_row_is_negated() {
        let text =
            "NAME T\nROWS\n N obj\n G c1\nCOLUMNS\n x obj 1 c1 -1\nRHS\n RHS c1 -3\nENDATA\n";
        let inst = to_standard_form(&parse_mps(text).unwrap()).unwrap();
        assert_eq!(inst.lp.b(), &[3.0]);
        assert_eq!(inst.lp.a().row(0), &[1.0, 1.0]);
    }

    #[test]
    fn bounds_shift_and_ranges() {
        // max x + y  s.t.  1 <= x + y <= 5 (ranged), x in [2, 3], y >= -1
        let text =
            "NAME T\nOBJSENSE\n MAX\nROWS\n N obj\n L c1\nCOLUMNS\n x obj 1 c1 1\n y obj 1 c1 1\n\
RHS\n RHS c1 5 obj 2\nRANGES\n RNG c1 4\nBOUNDS\n LO BND x 2\n UP BND x 3\n LO BND y -1\nENDATA\n";
        let inst = to_standard_form(&parse_mps(text).unwrap()).unwrap();
        assert_eq!(inst.lp.m(), 3);
        let (obj, x) = solve(&inst);
        assert!((x[0] + x[1] - 5.0).abs() < 1e-9);
        assert!((2.0..=3.0).contains(&x[0]) && x[1] >= -1.0);
        // objective constant is minus the RHS on the objective row
        assert!((obj - 3.0).abs() < 1e-9, "{obj}");
    }

    #[test]
    fn fixed_bound_becomes_equality() {
        let text = "NAME T\nROWS\n N obj\n L c1\nCOLUMNS\n x obj -1 c1 1\n y obj -1 c1 1\nRHS\n RHS c1 10\nBOUNDS\n FX BND x 4\nENDATA\n";
        let inst = to_standard_form(&parse_mps(text).unwrap()).unwrap();
        let (obj, x) = solve(&inst);
        assert!((x[0] - 4.0).abs() < 1e-9);
        assert!((obj + 10.0).abs() < 1e-9);
    }
}
