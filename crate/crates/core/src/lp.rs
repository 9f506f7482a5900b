//! Standard-form linear programs and the dense simplex pivoting engine.
//!
//! Every instance is `min c^T x  s.t.  A x = b, x >= 0`. A [`SimplexState`]
//! carries an explicit basis inverse that is updated with elementary row
//! operations on each pivot and refactorized from scratch every
//! [`REFACTOR_INTERVAL`] pivots.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::matrix::DenseMatrix;
use crate::rules::{run_simplex, RuleKind};
use crate::{Error, Result};

/// Smallest admissible magnitude of a pivot element.
pub const PIVOT_TOL: f64 = 1e-9;
/// Primal feasibility tolerance on basic values.
pub const FEAS_TOL: f64 = 1e-7;
/// Tolerance on reduced costs.
pub const NUM_TOL: f64 = 1e-7;
/// Pivots between full refactorizations of the basis inverse.
pub const REFACTOR_INTERVAL: usize = 64;
/// Default iteration cap; runs that exceed it are reported as `1000+`.
pub const DEFAULT_MAX_ITERS: usize = 1000;

const SINGULAR_TOL: f64 = 1e-11;
const PHASE_ONE_MAX_ITERS: usize = 100_000;

/// `min c^T x  s.t.  A x = b, x >= 0` with dense `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardFormLP {
    c: Vec<f64>,
    a: DenseMatrix,
    b: Vec<f64>,
    var_names: Vec<String>,
    row_names: Vec<String>,
}

impl StandardFormLP {
    /// Builds an instance with generated names (`x0..`, `r0..`).
    pub fn new(c: Vec<f64>, a: DenseMatrix, b: Vec<f64>) -> Result<Self> {
        let var_names = (0..a.cols()).map(|j| format!("x{j}")).collect();
        let row_names = (0..a.rows()).map(|i| format!("r{i}")).collect();
        Self::with_names(c, a, b, var_names, row_names)
    }

    pub fn with_names(
        c: Vec<f64>,
        a: DenseMatrix,
        b: Vec<f64>,
        var_names: Vec<String>,
        row_names: Vec<String>,
    ) -> Result<Self> {
        let (m, n) = (a.rows(), a.cols());
        let invalid = |msg: String| Err(Error::InvalidInstance(msg));
        if m == 0 {
            return invalid("no constraint rows".into());
        }
        if n < m {
            return invalid(format!("{n} columns is fewer than {m} rows"));
        }
        if c.len() != n || b.len() != m {
            return invalid(format!(
                "dimension mismatch: A is {m}x{n}, c has {}, b has {}",
                c.len(),
                b.len()
            ));
        }
        if var_names.len() != n || row_names.len() != m {
            return invalid("name lists do not match the dimensions".into());
        }
        let all_finite = c
            .iter()
            .chain(&b)
            .chain(a.as_slice())
            .all(|v| v.is_finite());
        if !all_finite {
            return invalid("non-finite coefficient".into());
        }
        Ok(Self {
            c,
            a,
            b,
            var_names,
            row_names,
        })
    }

    /// Number of rows.
    pub fn m(&self) -> usize {
        self.a.rows()
    }

    /// Number of columns.
    pub fn n(&self) -> usize {
        self.a.cols()
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn a(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn row_names(&self) -> &[String] {
        &self.row_names
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.a.column(j)
    }

    fn basis_matrix(&self, basis: &[usize]) -> DenseMatrix {
        let m = self.m();
        let mut bm = DenseMatrix::zeros(m, m);
        for i in 0..m {
            for (k, &j) in basis.iter().enumerate() {
                bm[(i, k)] = self.a[(i, j)];
            }
        }
        bm
    }
}

/// Canonical (sorted) basis index set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisSignature(Vec<usize>);

impl BasisSignature {
    pub fn from_indices(indices: &[usize]) -> Self {
        let mut v = indices.to_vec();
        v.sort_unstable();
        Self(v)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// One exchange of basic variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PivotStep {
    pub entering: usize,
    pub leaving: usize,
    /// Basis position the entering column took over.
    pub row: usize,
    /// Step length along the edge.
    pub theta: f64,
    /// `c x_prev - c x_new`
    pub objective_delta: f64,
}

/// Result of the minimum ratio test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Leaving {
    pub row: usize,
    pub column: usize,
    pub theta: f64,
}

/// How a simplex run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RunStatus {
    Optimal,
    Unbounded,
    IterLimit,
    DeadEnd,
}

impl fmt::Display for RunStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RunStatus::Optimal => "optimal",
            RunStatus::Unbounded => "unbounded",
            RunStatus::IterLimit => "iter-limit",
            RunStatus::DeadEnd => "dead-end",
        })
    }
}

/// Ordered entering columns from an initial basis, with the objective
/// value reached at the end.
#[derive(Debug, Clone, PartialEq)]
pub struct PivotPath {
    pub entering: Vec<usize>,
    pub final_objective: f64,
}

impl PivotPath {
    pub fn len(&self) -> usize {
        self.entering.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entering.is_empty()
    }

    /// Replays the path from `initial` and checks that it ends optimal at
    /// `final_objective` without repeating a basis.
    pub fn verify(&self, lp: &StandardFormLP, initial: &SimplexState) -> Result<SimplexState> {
        let mut seen = BTreeSet::new();
        seen.insert(initial.signature());
        let mut state = initial.clone();
        for (step, &j) in self.entering.iter().enumerate() {
            state = replay_step(lp, &state, j, step)?;
            if !seen.insert(state.signature()) {
                return Err(Error::InvalidPath {
                    step,
                    reason: "basis repeats".to_string(),
                });
            }
        }
        if !is_optimal(&state) {
            return Err(Error::InvalidPath {
                step: self.len(),
                reason: "final basis is not optimal".to_string(),
            });
        }
        let scale = 1.0 + libm::fabs(self.final_objective);
        if libm::fabs(state.objective() - self.final_objective) > NUM_TOL * scale {
            return Err(Error::InvalidPath {
                step: self.len(),
                reason: format!(
                    "objective {} differs from recorded {}",
                    state.objective(),
                    self.final_objective
                ),
            });
        }
        Ok(state)
    }
}

/// One simplex solving state: basis, basis inverse, basic solution,
/// reduced costs and objective value.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexState {
    basis: Vec<usize>,
    position: Vec<Option<usize>>,
    basis_inverse: DenseMatrix,
    x_basic: Vec<f64>,
    reduced_costs: Vec<f64>,
    objective: f64,
    since_refactor: usize,
}

impl SimplexState {
    /// Factorizes the given basis (position `r` holds column `basis[r]`).
    /// Feasibility is not checked; see [`SimplexState::is_primal_feasible`].
    pub fn from_basis(lp: &StandardFormLP, basis: &[usize]) -> Result<Self> {
        let (m, n) = (lp.m(), lp.n());
        if basis.len() != m {
            return Err(Error::InvalidInstance(format!(
                "basis has {} columns, expected {m}",
                basis.len()
            )));
        }
        let mut position = vec![None; n];
        for (r, &j) in basis.iter().enumerate() {
            if j >= n || position[j].is_some() {
                return Err(Error::InvalidInstance(format!("bad basis column {j}")));
            }
            position[j] = Some(r);
        }
        let mut state = Self {
            basis: basis.to_vec(),
            position,
            basis_inverse: DenseMatrix::identity(m),
            x_basic: vec![0.0; m],
            reduced_costs: vec![0.0; n],
            objective: 0.0,
            since_refactor: 0,
        };
        state.refactor(lp)?;
        Ok(state)
    }

    pub fn basis(&self) -> &[usize] {
        &self.basis
    }

    pub fn basis_inverse(&self) -> &DenseMatrix {
        &self.basis_inverse
    }

    pub fn x_basic(&self) -> &[f64] {
        &self.x_basic
    }

    /// Reduced costs indexed by column; basic columns hold 0.
    pub fn reduced_costs(&self) -> &[f64] {
        &self.reduced_costs
    }

    pub fn objective(&self) -> f64 {
        self.objective
    }

    pub fn is_basic(&self, j: usize) -> bool {
        self.position[j].is_some()
    }

    /// Basis position of column `j`, if basic.
    pub fn basic_row(&self, j: usize) -> Option<usize> {
        self.position[j]
    }

    pub fn nonbasic(&self) -> impl Iterator<Item = usize> + '_ {
        self.position
            .iter()
            .enumerate()
            .filter(|(_, p)| p.is_none())
            .map(|(j, _)| j)
    }

    pub fn signature(&self) -> BasisSignature {
        BasisSignature::from_indices(&self.basis)
    }

    /// `B^-1 A_j`
    pub fn direction(&self, lp: &StandardFormLP, j: usize) -> Vec<f64> {
        self.basis_inverse.mul_column(lp.a(), j)
    }

    /// Row `r` of `B^-1 A`.
    pub fn tableau_row(&self, lp: &StandardFormLP, r: usize) -> Vec<f64> {
        lp.a().vec_mul(self.basis_inverse.row(r))
    }

    /// Full primal solution vector.
    pub fn solution(&self, n: usize) -> Vec<f64> {
        let mut x = vec![0.0; n];
        for (r, &j) in self.basis.iter().enumerate() {
            x[j] = self.x_basic[r];
        }
        x
    }

    pub fn is_primal_feasible(&self) -> bool {
        self.x_basic.iter().all(|&v| v >= -FEAS_TOL)
    }

    /// Recomputes the basis inverse, basic values, reduced costs and the
    /// objective from the instance data.
    pub fn refactor(&mut self, lp: &StandardFormLP) -> Result<()> {
        let inv = lp
            .basis_matrix(&self.basis)
            .inverse(SINGULAR_TOL)
            .ok_or(Error::SingularBasis)?;
        self.x_basic = inv.mul_vec(lp.b());
        self.reduced_costs = compute_reduced_costs(lp, &self.basis, &inv);
        self.objective = self
            .basis
            .iter()
            .zip(&self.x_basic)
            .map(|(&j, &v)| lp.c()[j] * v)
            .sum();
        self.basis_inverse = inv;
        self.since_refactor = 0;
        Ok(())
    }

    /// Largest deviation between the maintained values and a fresh
    /// factorization: `(reduced costs, basic values, objective)`.
    pub fn drift(&self, lp: &StandardFormLP) -> Result<(f64, f64, f64)> {
        let fresh = Self::from_basis(lp, &self.basis)?;
        let max_diff = |a: &[f64], b: &[f64]| {
            a.iter()
                .zip(b)
                .map(|(x, y)| libm::fabs(x - y))
                .fold(0.0, f64::max)
        };
        Ok((
            max_diff(&self.reduced_costs, &fresh.reduced_costs),
            max_diff(&self.x_basic, &fresh.x_basic),
            libm::fabs(self.objective - fresh.objective),
        ))
    }

    /// Minimum ratio test for `entering` with a precomputed direction.
    fn ratio_test_direction(&self, entering: usize, d: &[f64]) -> Result<Leaving> {
        let mut best: Option<Leaving> = None;
        for (r, &dr) in d.iter().enumerate() {
            if dr <= PIVOT_TOL {
                continue;
            }
            let theta = self.x_basic[r].max(0.0) / dr;
            let column = self.basis[r];
            best = match best {
                None => Some(Leaving {
                    row: r,
                    column,
                    theta,
                }),
                Some(cur) => {
                    let eps = 1e-12 * cur.theta.max(1.0);
                    if theta < cur.theta - eps || (theta <= cur.theta + eps && column < cur.column)
                    {
                        Some(Leaving {
                            row: r,
                            column,
                            theta,
                        })
                    } else {
                        Some(cur)
                    }
                }
            };
        }
        best.ok_or(Error::Unbounded { entering })
    }

    /// Pivots `entering` into the basis, choosing the leaving row by the
    /// ratio test.
    pub fn pivot_in_place(&mut self, lp: &StandardFormLP, entering: usize) -> Result<PivotStep> {
        if self.is_basic(entering) {
            return Err(Error::NotNonbasic(entering));
        }
        let d = self.direction(lp, entering);
        let leaving = self.ratio_test_direction(entering, &d)?;
        self.apply_pivot(lp, entering, leaving.row, &d)
    }

    /// Pivots `entering` into basis position `row` regardless of the ratio
    /// test. Used to drive degenerate artificials out after phase one.
    pub fn pivot_at_row(
        &mut self,
        lp: &StandardFormLP,
        entering: usize,
        row: usize,
    ) -> Result<PivotStep> {
        if self.is_basic(entering) {
            return Err(Error::NotNonbasic(entering));
        }
        let d = self.direction(lp, entering);
        self.apply_pivot(lp, entering, row, &d)
    }

    fn apply_pivot(
        &mut self,
        lp: &StandardFormLP,
        entering: usize,
        row: usize,
        d: &[f64],
    ) -> Result<PivotStep> {
        let alpha = d[row];
        if libm::fabs(alpha) < PIVOT_TOL {
            return Err(Error::SingularBasis);
        }
        let leaving = self.basis[row];
        let theta = self.x_basic[row] / alpha;
        let rc_entering = self.reduced_costs[entering];
        let before = self.objective;

        // Pivot row of the tableau, taken before B^-1 changes.
        let pivot_row = self.tableau_row(lp, row);

        let m = self.basis.len();
        for v in self.basis_inverse.row_mut(row) {
            *v /= alpha;
        }
        let scaled: Vec<f64> = self.basis_inverse.row(row).to_vec();
        for i in 0..m {
            if i == row || d[i] == 0.0 {
                continue;
            }
            let f = d[i];
            for (v, s) in self.basis_inverse.row_mut(i).iter_mut().zip(&scaled) {
                *v -= f * s;
            }
            self.x_basic[i] -= theta * f;
        }
        self.x_basic[row] = theta;

        let ratio = rc_entering / alpha;
        for (j, rc) in self.reduced_costs.iter_mut().enumerate() {
            if pivot_row[j] != 0.0 {
                *rc -= ratio * pivot_row[j];
            }
            if j == entering {
                *rc = 0.0;
            }
        }
        self.position[leaving] = None;
        self.position[entering] = Some(row);
        self.basis[row] = entering;
        for &j in &self.basis {
            self.reduced_costs[j] = 0.0;
        }
        self.objective += rc_entering * theta;
        self.since_refactor += 1;
        if self.since_refactor >= REFACTOR_INTERVAL {
            self.refactor(lp)?;
        }
        Ok(PivotStep {
            entering,
            leaving,
            row,
            theta,
            objective_delta: before - self.objective,
        })
    }
}

fn compute_reduced_costs(lp: &StandardFormLP, basis: &[usize], inv: &DenseMatrix) -> Vec<f64> {
    let c_b: Vec<f64> = basis.iter().map(|&j| lp.c()[j]).collect();
    let y = inv.vec_mul(&c_b);
    let ya = lp.a().vec_mul(&y);
    let mut rc: Vec<f64> = lp.c().iter().zip(&ya).map(|(c, v)| c - v).collect();
    for &j in basis {
        rc[j] = 0.0;
    }
    rc
}

/// Reduced costs recomputed from a fresh factorization of the basis.
/// Basic entries are 0.
pub fn reduced_costs(state: &SimplexState, lp: &StandardFormLP) -> Result<Vec<f64>> {
    let inv = lp
        .basis_matrix(state.basis())
        .inverse(SINGULAR_TOL)
        .ok_or(Error::SingularBasis)?;
    Ok(compute_reduced_costs(lp, state.basis(), &inv))
}

/// Minimum ratio test. Ties go to the smallest basic column index.
pub fn ratio_test(state: &SimplexState, lp: &StandardFormLP, entering: usize) -> Result<Leaving> {
    if state.is_basic(entering) {
        return Err(Error::NotNonbasic(entering));
    }
    let d = state.direction(lp, entering);
    state.ratio_test_direction(entering, &d)
}

/// Returns the state after pivoting `entering` into the basis.
pub fn pivot(state: &SimplexState, lp: &StandardFormLP, entering: usize) -> Result<SimplexState> {
    let mut next = state.clone();
    next.pivot_in_place(lp, entering)?;
    Ok(next)
}

pub fn is_optimal(state: &SimplexState) -> bool {
    state.reduced_costs().iter().all(|&rc| rc >= -NUM_TOL)
}

pub fn basis_signature(state: &SimplexState) -> BasisSignature {
    state.signature()
}

fn replay_step(
    lp: &StandardFormLP,
    state: &SimplexState,
    entering: usize,
    step: usize,
) -> Result<SimplexState> {
    if entering >= lp.n() {
        return Err(Error::InvalidPath {
            step,
            reason: format!("column {entering} out of range"),
        });
    }
    pivot(state, lp, entering).map_err(|e| Error::InvalidPath {
        step,
        reason: e.to_string(),
    })
}

/// Replays a sequence of entering columns from `initial`.
pub fn replay(
    lp: &StandardFormLP,
    initial: &SimplexState,
    entering: &[usize],
) -> Result<SimplexState> {
    let mut state = initial.clone();
    for (step, &j) in entering.iter().enumerate() {
        state = replay_step(lp, &state, j, step)?;
    }
    Ok(state)
}

/// Feasible starting basis produced by phase one.
#[derive(Debug, Clone)]
pub struct PhaseOne {
    pub state: SimplexState,
    /// Pivots spent on the auxiliary problem, including artificial drive-out.
    pub pivots: usize,
    /// Number of artificial columns that had to be introduced.
    pub artificials: usize,
}

/// Where the auxiliary problem of phase one starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseOneStart {
    /// Rows that already own a unit column start with that column basic;
    /// only the remaining rows get artificials.
    #[default]
    UnitColumns,
    /// Every row gets an artificial, as in the textbook two-phase method.
    AllArtificial,
}

/// [`phase_one_with`] using [`PhaseOneStart::UnitColumns`].
pub fn phase_one(lp: &StandardFormLP) -> Result<PhaseOne> {
    phase_one_with(lp, PhaseOneStart::UnitColumns)
}

/// Finds a feasible basis by minimizing the sum of artificial variables
/// with the Dantzig rule, then pivots remaining zero-level artificials out
/// of the basis.
pub fn phase_one_with(lp: &StandardFormLP, start_from: PhaseOneStart) -> Result<PhaseOne> {
    let (m, n) = (lp.m(), lp.n());
    let sign: Vec<f64> = lp
        .b()
        .iter()
        .map(|&v| if v < 0.0 { -1.0 } else { 1.0 })
        .collect();

    let mut start = vec![usize::MAX; m];
    let unit_columns = if start_from == PhaseOneStart::UnitColumns {
        n
    } else {
        0
    };
    for j in 0..unit_columns {
        let mut unit_row = None;
        let mut is_unit = true;
        for i in 0..m {
            let v = sign[i] * lp.a()[(i, j)];
            if v == 0.0 {
                continue;
            }
            if v == 1.0 && unit_row.is_none() {
                unit_row = Some(i);
            } else {
                is_unit = false;
                break;
            }
        }
        if let (true, Some(i)) = (is_unit, unit_row) {
            // Later columns win, so appended slack blocks are preferred.
            start[i] = j;
        }
    }
    let missing: Vec<usize> = (0..m).filter(|&i| start[i] == usize::MAX).collect();
    if missing.is_empty() {
        let state = SimplexState::from_basis(lp, &start)?;
        return Ok(PhaseOne {
            state,
            pivots: 0,
            artificials: 0,
        });
    }

    let k = missing.len();
    let mut a_aux = DenseMatrix::zeros(m, n + k);
    for i in 0..m {
        for j in 0..n {
            a_aux[(i, j)] = sign[i] * lp.a()[(i, j)];
        }
    }
    for (t, &i) in missing.iter().enumerate() {
        a_aux[(i, n + t)] = 1.0;
        start[i] = n + t;
    }
    let b_aux: Vec<f64> = lp.b().iter().zip(&sign).map(|(b, s)| b * s).collect();
    let mut c_aux = vec![0.0; n + k];
    for v in &mut c_aux[n..] {
        *v = 1.0;
    }
    let aux = StandardFormLP::new(c_aux, a_aux, b_aux)?;
    let init = SimplexState::from_basis(&aux, &start)?;
    let run = run_simplex(&aux, &init, RuleKind::Dantzig, PHASE_ONE_MAX_ITERS)?;
    let mut state = match run.status {
        RunStatus::Optimal => run.final_state,
        RunStatus::IterLimit => return Err(Error::PhaseOneIterLimit),
        // The auxiliary objective is bounded below by zero.
        RunStatus::Unbounded | RunStatus::DeadEnd => return Err(Error::SingularBasis),
    };
    let scale = 1.0 + lp.b().iter().fold(0.0f64, |acc, v| acc.max(libm::fabs(*v)));
    if state.objective() > FEAS_TOL * scale {
        return Err(Error::Infeasible {
            residual: state.objective(),
        });
    }
    let mut pivots = run.pivot_count;

    for row in 0..m {
        let art = state.basis()[row];
        if art < n {
            continue;
        }
        let tab = state.tableau_row(&aux, row);
        let swap = (0..n)
            .filter(|&j| !state.is_basic(j))
            .map(|j| (j, libm::fabs(tab[j])))
            .filter(|&(_, v)| v > PIVOT_TOL)
            .fold(None, |best: Option<(usize, f64)>, cand| match best {
                Some(b) if b.1 >= cand.1 => Some(b),
                _ => Some(cand),
            });
        match swap {
            Some((j, _)) => {
                state.pivot_at_row(&aux, j, row)?;
                pivots += 1;
            }
            None => {
                return Err(Error::DegenerateArtificialStall {
                    row: missing[art - n],
                })
            }
        }
    }

    let state = SimplexState::from_basis(lp, state.basis())?;
    if !state.is_primal_feasible() {
        return Err(Error::Infeasible {
            residual: state.x_basic().iter().fold(0.0f64, |acc, &v| acc.max(-v)),
        });
    }
    Ok(PhaseOne {
        state,
        pivots,
        artificials: k,
    })
}
