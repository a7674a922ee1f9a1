//! Dense two-phase primal simplex for small linear programs.
//!
//! Bland's rule is used for both the entering and the leaving variable, so
//! the method never cycles. Problems are limited to 200 variables and 400
//! constraints; everything is stored in one dense tableau.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub const MAX_VARIABLES: usize = 200;
pub const MAX_CONSTRAINTS: usize = 400;

/// Feasibility tolerance on constraint residuals.
pub const FEAS_TOL: f64 = 1e-8;
const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-10;
const MAX_PIVOTS: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub row: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `optimize objective . x` subject to row constraints and per-variable
/// bounds. Variables default to `0 <= x < +inf`.
#[derive(Clone, Debug)]
pub struct LpProblem {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    pub value: f64,
    pub point: Vec<f64>,
    /// Objective value of the dual solution read off the final basis.
    pub dual_value: Option<f64>,
}

impl LpProblem {
    pub fn new(sense: Sense, objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            sense,
            objective,
            constraints: Vec::new(),
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    pub fn maximize(objective: Vec<f64>) -> Self {
        Self::new(Sense::Maximize, objective)
    }

    pub fn minimize(objective: Vec<f64>) -> Self {
        Self::new(Sense::Minimize, objective)
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add(&mut self, row: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint { row, relation, rhs });
        self
    }

    pub fn bounds(&mut self, var: usize, lower: f64, upper: f64) -> &mut Self {
        self.lower[var] = lower;
        self.upper[var] = upper;
        self
    }

    pub fn free(&mut self, var: usize) -> &mut Self {
        self.bounds(var, f64::NEG_INFINITY, f64::INFINITY)
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if n == 0 {
            return Err(Error::InvalidArgument("linear program without variables".into()));
        }
        if n > MAX_VARIABLES || self.constraints.len() > MAX_CONSTRAINTS {
            return Err(Error::LpTooLarge {
                vars: n,
                rows: self.constraints.len(),
            });
        }
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::InvalidArgument("bound vectors have wrong length".into()));
        }
        for (j, (l, u)) in self.lower.iter().zip(&self.upper).enumerate() {
            if l.is_nan() || u.is_nan() || l > u || *l == f64::INFINITY || *u == f64::NEG_INFINITY {
                return Err(Error::InvalidArgument(format!("bad bounds on variable {j}")));
            }
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("non-finite objective".into()));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.row.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "constraint {i} has {} coefficients, expected {n}",
                    c.row.len()
                )));
            }
            if !c.rhs.is_finite() || c.row.iter().any(|a| !a.is_finite()) {
                return Err(Error::InvalidArgument(format!("constraint {i} is not finite")));
            }
        }
        Ok(())
    }

    fn objective_at(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest scaled violation of a constraint or bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0_f64;
        for c in &self.constraints {
            let lhs: f64 = c.row.iter().zip(x).map(|(a, v)| a * v).sum();
            let scale = 1.0 + c.rhs.abs() + c.row.iter().zip(x).map(|(a, v)| (a * v).abs()).sum::<f64>();
            let v = match c.relation {
                Relation::Le => lhs - c.rhs,
                Relation::Ge => c.rhs - lhs,
                Relation::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(v / scale);
        }
        for (j, v) in x.iter().enumerate() {
            worst = worst.max(self.lower[j] - v).max(v - self.upper[j]);
        }
        worst
    }
}

/// How an original variable is expressed through nonnegative standard
/// columns: `x = shift + sum coef * xs[col]`.
#[derive(Clone, Debug)]
struct VarMap {
    shift: f64,
    terms: Vec<(usize, f64)>,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.ncols]
    }

    fn pivot(&mut self, r: usize, c: usize, cost: &mut [f64]) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let prow = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&prow) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        let f = cost[c];
        if f != 0.0 {
            for (v, pv) in cost.iter_mut().zip(&prow) {
                *v -= f * pv;
            }
            cost[c] = 0.0;
        }
        self.basis[r] = c;
    }

    /// Reduced-cost row for the cost vector `c` (length ncols) under the
    /// current basis; the last entry holds `-objective`.
    fn reduced_costs(&self, c: &[f64]) -> Vec<f64> {
        let mut d: Vec<f64> = c.to_vec();
        d.push(0.0);
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = c[b];
            if cb != 0.0 {
                for (dv, tv) in d.iter_mut().zip(&self.rows[i]) {
                    *dv -= cb * tv;
                }
            }
        }
        d
    }

    /// Minimizes with Bland's rule over the allowed columns.
    fn run(&mut self, d: &mut [f64], allowed: &[bool]) -> Result<bool> {
        for _ in 0..MAX_PIVOTS {
            let entering = (0..self.ncols).find(|&j| allowed[j] && d[j] < -COST_TOL);
            let Some(c) = entering else {
                return Ok(true);
            };
            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][c];
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i).max(0.0) / a;
                    best = match best {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - 1e-12
                                || ((ratio - br).abs() <= 1e-12 && self.basis[i] < self.basis[bi])
                            {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            match best {
                None => return Ok(false),
                Some((r, _)) => self.pivot(r, c, d),
            }
        }
        Err(Error::Solver("simplex pivot limit reached".into()))
    }
}

/// Solves the problem with a two-phase dense simplex.
pub fn solve_lp(problem: &LpProblem) -> Result<LpSolution> {
    problem.validate()?;
    let n = problem.num_vars();

    // Standard-form columns for the structural variables.
    let mut maps = Vec::with_capacity(n);
    let mut ncols = 0usize;
    let mut bound_rows: Vec<(usize, f64)> = Vec::new();
    for j in 0..n {
        let (l, u) = (problem.lower[j], problem.upper[j]);
        if l.is_finite() {
            maps.push(VarMap {
                shift: l,
                terms: vec![(ncols, 1.0)],
            });
            if u.is_finite() {
                bound_rows.push((ncols, u - l));
            }
            ncols += 1;
        } else if u.is_finite() {
            maps.push(VarMap {
                shift: u,
                terms: vec![(ncols, -1.0)],
            });
            ncols += 1;
        } else {
            maps.push(VarMap {
                shift: 0.0,
                terms: vec![(ncols, 1.0), (ncols + 1, -1.0)],
            });
            ncols += 2;
        }
    }
    let nstruct = ncols;

    // Rows over structural columns with nonnegative right-hand sides.
    struct StdRow {
        coefs: Vec<f64>,
        relation: Relation,
        rhs: f64,
    }
    let mut rows: Vec<StdRow> = Vec::new();
    for c in &problem.constraints {
        let mut coefs = vec![0.0; nstruct];
        let mut rhs = c.rhs;
        for (j, a) in c.row.iter().enumerate() {
            if *a == 0.0 {
                continue;
            }
            rhs -= a * maps[j].shift;
            for &(col, k) in &maps[j].terms {
                coefs[col] += a * k;
            }
        }
        rows.push(StdRow {
            coefs,
            relation: c.relation,
            rhs,
        });
    }
    for &(col, width) in &bound_rows {
        let mut coefs = vec![0.0; nstruct];
        coefs[col] = 1.0;
        rows.push(StdRow {
            coefs,
            relation: Relation::Le,
            rhs: width,
        });
    }
    for r in rows.iter_mut() {
        if r.rhs < 0.0 {
            r.rhs = -r.rhs;
            for v in r.coefs.iter_mut() {
                *v = -*v;
            }
            r.relation = match r.relation {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    let m = rows.len();
    let n_slack = rows.iter().filter(|r| r.relation != Relation::Eq).count();
    let n_art = rows.iter().filter(|r| r.relation != Relation::Le).count();
    let total = nstruct + n_slack + n_art;
    let mut tab = Tableau {
        rows: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
        ncols: total,
    };
    let mut is_art = vec![false; total];
    let (mut next_slack, mut next_art) = (nstruct, nstruct + n_slack);
    for r in &rows {
        let mut row = vec![0.0; total + 1];
        row[..nstruct].copy_from_slice(&r.coefs);
        row[total] = r.rhs;
        match r.relation {
            Relation::Le => {
                row[next_slack] = 1.0;
                tab.basis.push(next_slack);
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = -1.0;
                next_slack += 1;
                row[next_art] = 1.0;
                is_art[next_art] = true;
                tab.basis.push(next_art);
                next_art += 1;
            }
            Relation::Eq => {
                row[next_art] = 1.0;
                is_art[next_art] = true;
                tab.basis.push(next_art);
                next_art += 1;
            }
        }
        tab.rows.push(row);
    }
    let original_rows: Vec<Vec<f64>> = tab.rows.clone();

    // Phase 1.
    if n_art > 0 {
        let c1: Vec<f64> = is_art.iter().map(|&a| if a { 1.0 } else { 0.0 }).collect();
        let mut d = tab.reduced_costs(&c1);
        let allowed = vec![true; total];
        tab.run(&mut d, &allowed)?;
        let infeas: f64 = tab
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &b)| is_art[b])
            .map(|(i, _)| tab.rhs(i))
            .sum();
        let scale = 1.0 + rows.iter().map(|r| r.rhs.abs()).fold(0.0, f64::max);
        if infeas > FEAS_TOL * scale {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                value: f64::NAN,
                point: Vec::new(),
                dual_value: None,
            });
        }
        // Drive remaining artificial variables out of the basis.
        let mut i = 0;
        while i < tab.rows.len() {
            if is_art[tab.basis[i]] {
                let col = (0..total).find(|&j| !is_art[j] && tab.rows[i][j].abs() > PIVOT_TOL);
                match col {
                    Some(c) => {
                        let mut dummy = vec![0.0; total + 1];
                        tab.pivot(i, c, &mut dummy);
                        i += 1;
                    }
                    None => {
                        tab.rows.remove(i);
                        tab.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
    }

    // Phase 2: minimize (negated objective for maximization).
    let sign = match problem.sense {
        Sense::Maximize => -1.0,
        Sense::Minimize => 1.0,
    };
    let mut c2 = vec![0.0; total];
    for (j, map) in maps.iter().enumerate() {
        for &(col, k) in &map.terms {
            c2[col] += sign * problem.objective[j] * k;
        }
    }
    let mut d = tab.reduced_costs(&c2);
    let allowed: Vec<bool> = is_art.iter().map(|a| !a).collect();
    if !tab.run(&mut d, &allowed)? {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            value: match problem.sense {
                Sense::Maximize => f64::INFINITY,
                Sense::Minimize => f64::NEG_INFINITY,
            },
            point: Vec::new(),
            dual_value: None,
        });
    }

    let mut xs = vec![0.0; total];
    for (i, &b) in tab.basis.iter().enumerate() {
        xs[b] = tab.rhs(i).max(0.0);
    }
    let point: Vec<f64> = maps
        .iter()
        .map(|m| m.shift + m.terms.iter().map(|&(c, k)| k * xs[c]).sum::<f64>())
        .collect();
    let violation = problem.max_violation(&point);
    if violation > FEAS_TOL {
        return Err(Error::Singular(format!(
            "solution violates constraints by {violation:e}"
        )));
    }
    let value = problem.objective_at(&point);

    // Dual: solve B^T y = c_B over the rows that survived phase 1.
    let dual_value = {
        let kept: Vec<usize> = (0..original_rows.len()).collect();
        dual_objective(&original_rows, &kept, &tab.basis, &c2, total).map(|v| {
            let constant: f64 = maps
                .iter()
                .enumerate()
                .map(|(j, m)| problem.objective[j] * m.shift)
                .sum();
            sign * v + constant
        })
    };

    Ok(LpSolution {
        status: LpStatus::Optimal,
        value,
        point,
        dual_value,
    })
}

/// `b^T y` with `B^T y = c_B`, using a least-squares solve so that redundant
/// equality rows (removed from the basis) do not break the system.
fn dual_objective(
    original: &[Vec<f64>],
    kept: &[usize],
    basis: &[usize],
    cost: &[f64],
    total: usize,
) -> Option<f64> {
    let m = kept.len();
    let k = basis.len();
    if k == 0 {
        return Some(0.0);
    }
    // B is m x k (rows: constraints, cols: basic variables).
    let b = DMatrix::from_fn(m, k, |i, j| original[kept[i]][basis[j]]);
    let cb = DVector::from_fn(k, |j, _| cost[basis[j]]);
    let rhs = DVector::from_fn(m, |i, _| original[kept[i]][total]);
    let svd = b.transpose().svd(true, true);
    let y = svd.solve(&cb, 1e-12).ok()?;
    Some(rhs.dot(&y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_maximum() {
        let mut lp = LpProblem::maximize(vec![1.0, 1.0]);
        lp.add(vec![1.0, 0.0], Relation::Le, 1.0);
        lp.add(vec![0.0, 1.0], Relation::Le, 1.0);
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value - 2.0).abs() < 1e-12);
        assert!((s.point[0] - 1.0).abs() < 1e-12 && (s.point[1] - 1.0).abs() < 1e-12);
        assert!((s.dual_value.unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_pair() {
        let mut lp = LpProblem::maximize(vec![1.0]);
        lp.add(vec![1.0], Relation::Le, -1.0);
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded() {
        let mut lp = LpProblem::maximize(vec![1.0, 0.0]);
        lp.add(vec![0.0, 1.0], Relation::Le, 1.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn free_and_bounded_variables() {
        // min x0 - x1 with x0 in [-2, 3], x1 free, x0 + x1 = 1, x1 <= 4
        let mut lp = LpProblem::minimize(vec![1.0, -1.0]);
        lp.bounds(0, -2.0, 3.0).free(1);
        lp.add(vec![1.0, 1.0], Relation::Eq, 1.0);
        lp.add(vec![0.0, 1.0], Relation::Le, 4.0);
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        // x1 <= 4 is slack: x0 >= -2 caps x1 at 3
        assert!((s.value + 5.0).abs() < 1e-10, "{}", s.value);
        assert!((s.dual_value.unwrap() - s.value).abs() < 1e-7);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LpProblem::maximize(vec![1.0, 2.0]);
        lp.add(vec![1.0, 1.0], Relation::Eq, 1.0);
        lp.add(vec![2.0, 2.0], Relation::Eq, 2.0);
        let s = solve_lp(&lp).unwrap();
        assert!((s.value - 2.0).abs() < 1e-10);
    }

    #[test]
    fn size_limit() {
        let lp = LpProblem::maximize(vec![1.0; MAX_VARIABLES + 1]);
        assert!(matches!(solve_lp(&lp), Err(Error::LpTooLarge { .. })));
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's classic cycling example; Bland's rule must terminate.
        let mut lp = LpProblem::minimize(vec![-0.75, 150.0, -0.02, 6.0]);
        lp.add(vec![0.25, -60.0, -0.04, 9.0], Relation::Le, 0.0);
        lp.add(vec![0.5, -90.0, -0.02, 3.0], Relation::Le, 0.0);
        lp.add(vec![0.0, 0.0, 1.0, 0.0], Relation::Le, 1.0);
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value + 0.05).abs() < 1e-10, "{}", s.value);
    }
}
