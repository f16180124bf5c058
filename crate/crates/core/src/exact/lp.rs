//! Two-phase dense-tableau simplex over exact rationals.
//!
//! Decision variables are free (unrestricted in sign); bounds are
//! expressed as inequality rows. Bland's rule is used for both the
//! entering and the leaving variable, so the method always terminates.

use num_traits::{Signed, Zero};

use super::linalg::{dot, RMat, RVec};
use super::rat::Rat;
use crate::error::{shape, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Min,
    Max,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpResult {
    pub status: LpStatus,
    /// Objective value, present when `status == Optimal`.
    pub optimum: Option<Rat>,
    /// Optimal point when `Optimal`; a feasible point when `Unbounded`.
    pub witness: Option<RVec>,
}

/// Linear rows `a x (=|<=) b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraints {
    pub a: RMat,
    pub b: RVec,
}

impl Constraints {
    pub fn new(a: RMat, b: RVec) -> Self {
        Constraints { a, b }
    }

    pub fn none(vars: usize) -> Self {
        Constraints {
            a: RMat::zeros(0, vars),
            b: RVec::zeros(0),
        }
    }

    pub fn from_rows(rows: Vec<(RVec, Rat)>, vars: usize) -> Result<Self> {
        let (a, b): (Vec<RVec>, Vec<Rat>) = rows.into_iter().unzip();
        Ok(Constraints {
            a: RMat::from_rows(a, vars)?,
            b: RVec::new(b),
        })
    }

    pub fn len(&self) -> usize {
        self.a.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.a.rows() == 0
    }

    pub fn satisfied_as_equalities(&self, x: &RVec) -> bool {
        (0..self.len()).all(|i| dot(self.a.row(i), x) == self.b[i])
    }

    pub fn satisfied_as_inequalities(&self, x: &RVec) -> bool {
        (0..self.len()).all(|i| dot(self.a.row(i), x) <= self.b[i])
    }
}

/// Optimizes `objective · x` subject to `eq.a x = eq.b` and `ineq.a x <= ineq.b`.
pub fn lp_optimize(objective: &RVec, eq: &Constraints, ineq: &Constraints, sense: Sense) -> Result<LpResult> {
    let n = objective.len();
    for (name, c) in [("equality", eq), ("inequality", ineq)] {
        if c.a.cols() != n {
            return Err(shape(format!(
                "{name} constraints have {} columns, objective has {n}",
                c.a.cols()
            )));
        }
        if c.a.rows() != c.b.len() {
            return Err(shape(format!(
                "{name} constraints: {} rows but {} right-hand sides",
                c.a.rows(),
                c.b.len()
            )));
        }
    }
    let mut tab = Tableau::build(n, eq, ineq);
    if !tab.phase_one() {
        return Ok(LpResult {
            status: LpStatus::Infeasible,
            optimum: None,
            witness: None,
        });
    }
    // Internally always minimize.
    let mut cost = vec![Rat::zero(); tab.cols];
    for j in 0..n {
        let c = match sense {
            Sense::Min => objective[j].clone(),
            Sense::Max => -objective[j].clone(),
        };
        cost[j] = c.clone();
        cost[n + j] = -c;
    }
    let bounded = tab.optimize(&cost);
    let x = tab.point(n);
    if !bounded {
        return Ok(LpResult {
            status: LpStatus::Unbounded,
            optimum: None,
            witness: Some(x),
        });
    }
    let optimum = dot(objective, &x);
    Ok(LpResult {
        status: LpStatus::Optimal,
        optimum: Some(optimum),
        witness: Some(x),
    })
}

/// Feasibility check: returns some `x` satisfying both constraint sets.
pub fn lp_feasible_point(eq: &Constraints, ineq: &Constraints) -> Result<Option<RVec>> {
    let n = eq.a.cols();
    let r = lp_optimize(&RVec::zeros(n), eq, ineq, Sense::Min)?;
    Ok(match r.status {
        LpStatus::Optimal => r.witness,
        _ => None,
    })
}

/// Column layout: `[x+ (n) | x- (n) | slacks (one per inequality) | artificials]`.
struct Tableau {
    rows: Vec<Vec<Rat>>,
    basis: Vec<usize>,
    cols: usize,
    first_artificial: usize,
    /// Columns that may enter the basis.
    allowed: Vec<bool>,
}

impl Tableau {
    fn build(n: usize, eq: &Constraints, ineq: &Constraints) -> Tableau {
        let m_ineq = ineq.len();
        let first_artificial = 2 * n + m_ineq;
        let mut needs_artificial = Vec::new();
        let mut raw_rows = Vec::new();
        for i in 0..m_ineq {
            let mut row = vec![Rat::zero(); first_artificial];
            for j in 0..n {
                row[j] = ineq.a[(i, j)].clone();
                row[n + j] = -ineq.a[(i, j)].clone();
            }
            row[2 * n + i] = Rat::from_integer(1.into());
            let mut rhs = ineq.b[i].clone();
            let negative = rhs.is_negative();
            if negative {
                row.iter_mut().for_each(|x| *x = -x.clone());
                rhs = -rhs;
            }
            raw_rows.push((row, rhs, if negative { None } else { Some(2 * n + i) }));
            needs_artificial.push(negative);
        }
        for i in 0..eq.len() {
            let mut row = vec![Rat::zero(); first_artificial];
            for j in 0..n {
                row[j] = eq.a[(i, j)].clone();
                row[n + j] = -eq.a[(i, j)].clone();
            }
            let mut rhs = eq.b[i].clone();
            if rhs.is_negative() {
                row.iter_mut().for_each(|x| *x = -x.clone());
                rhs = -rhs;
            }
            raw_rows.push((row, rhs, None));
        }
        let artificials = raw_rows.iter().filter(|(_, _, b)| b.is_none()).count();
        let cols = first_artificial + artificials;
        let mut rows = Vec::with_capacity(raw_rows.len());
        let mut basis = Vec::with_capacity(raw_rows.len());
        let mut next_art = first_artificial;
        for (mut row, rhs, basic) in raw_rows {
            row.resize(cols, Rat::zero());
            match basic {
                Some(b) => basis.push(b),
                None => {
                    row[next_art] = Rat::from_integer(1.into());
                    basis.push(next_art);
                    next_art += 1;
                }
            }
            row.push(rhs);
            rows.push(row);
        }
        Tableau {
            rows,
            basis,
            cols,
            first_artificial,
            allowed: vec![true; cols],
        }
    }

    fn rhs(&self, r: usize) -> &Rat {
        &self.rows[r][self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize, obj: &mut [Rat]) {
        let inv = self.rows[r][c].recip();
        for x in self.rows[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let pivot_row = self.rows[r].clone();
        let eliminate = |target: &mut [Rat]| {
            let factor = target[c].clone();
            if factor.is_zero() {
                return;
            }
            for (t, p) in target.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *t -= &factor * p;
                }
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(obj);
        self.basis[r] = c;
    }

    /// Reduced-cost row for `cost` under the current basis; last entry is
    /// minus the current objective value.
    fn objective_row(&self, cost: &[Rat]) -> Vec<Rat> {
        let mut obj: Vec<Rat> = cost.to_vec();
        obj.push(Rat::zero());
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for (o, x) in obj.iter_mut().zip(&self.rows[r]) {
                if !x.is_zero() {
                    *o -= cb * x;
                }
            }
        }
        obj
    }

    /// Bland's-rule simplex minimizing `cost`. Returns false if unbounded.
    fn optimize(&mut self, cost: &[Rat]) -> bool {
        let mut obj = self.objective_row(cost);
        loop {
            let Some(enter) = (0..self.cols).find(|&j| self.allowed[j] && obj[j].is_negative()) else {
                return true;
            };
            let mut leave: Option<(usize, Rat)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(r) / a;
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => ratio < *best || (ratio == *best && self.basis[r] < self.basis[*lr]),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            let Some((r, _)) = leave else {
                return false;
            };
            self.pivot(r, enter, &mut obj);
        }
    }

    /// Minimizes the sum of artificials; on success removes them from the
    /// problem. Returns false when the constraints are infeasible.
    fn phase_one(&mut self) -> bool {
        if self.cols == self.first_artificial {
            return true;
        }
        let mut cost = vec![Rat::zero(); self.cols];
        for c in cost.iter_mut().skip(self.first_artificial) {
            *c = Rat::from_integer(1.into());
        }
        // Phase one is bounded below by zero.
        self.optimize(&cost);
        let infeasibility: Rat = self
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &b)| b >= self.first_artificial)
            .fold(Rat::zero(), |acc, (r, _)| acc + self.rhs(r));
        if !infeasibility.is_zero() {
            return false;
        }
        // Drive remaining (zero-level) artificials out of the basis.
        let mut r = 0;
        while r < self.rows.len() {
            if self.basis[r] < self.first_artificial {
                r += 1;
                continue;
            }
            let replacement = (0..self.first_artificial).find(|&j| !self.rows[r][j].is_zero());
            match replacement {
                Some(c) => {
                    let mut dummy = vec![Rat::zero(); self.cols + 1];
                    self.pivot(r, c, &mut dummy);
                    r += 1;
                }
                None => {
                    // Redundant equality row.
                    self.rows.remove(r);
                    self.basis.remove(r);
                }
            }
        }
        for j in self.first_artificial..self.cols {
            self.allowed[j] = false;
        }
        true
    }

    fn point(&self, n: usize) -> RVec {
        let mut x = RVec::zeros(n);
        for (r, &b) in self.basis.iter().enumerate() {
            if b < n {
                x[b] += self.rhs(r);
            } else if b < 2 * n {
                x[b - n] -= self.rhs(r);
            }
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat::{int, rat};

    fn ineq(rows: &[(&[i64], i64)]) -> Constraints {
        let vars = rows[0].0.len();
        Constraints::from_rows(rows.iter().map(|(a, b)| (RVec::from_i64(a), int(*b))).collect(), vars).unwrap()
    }

    #[test]
    fn unit_interval_maximum() {
        let c = ineq(&[(&[1], 1), (&[-1], 0)]);
        let r = lp_optimize(&RVec::from_i64(&[1]), &Constraints::none(1), &c, Sense::Max).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert_eq!(r.optimum, Some(int(1)));
        assert_eq!(r.witness, Some(RVec::from_i64(&[1])));
    }

    #[test]
    fn contradictory_bounds_are_infeasible() {
        let c = ineq(&[(&[1], 0), (&[-1], -1)]);
        let r = lp_optimize(&RVec::from_i64(&[1]), &Constraints::none(1), &c, Sense::Max).unwrap();
        assert_eq!(r.status, LpStatus::Infeasible);
        assert!(r.optimum.is_none());
    }

    #[test]
    fn square_maximum_matches_vertex_enumeration() {
        let square = ineq(&[(&[1, 0], 1), (&[-1, 0], 1), (&[0, 1], 1), (&[0, -1], 1)]);
        let obj = RVec::from_i64(&[1, 1]);
        // Oracle: evaluate the objective at the four corners.
        let oracle = [(1, 1), (1, -1), (-1, 1), (-1, -1)]
            .iter()
            .map(|&(x, z)| RVec::from_i64(&[x, z]).dot(&obj).unwrap())
            .max()
            .unwrap();
        let r = lp_optimize(&obj, &Constraints::none(2), &square, Sense::Max).unwrap();
        assert_eq!(r.optimum, Some(oracle));
        assert_eq!(r.witness, Some(RVec::from_i64(&[1, 1])));
    }

    #[test]
    fn unbounded_is_detected() {
        let c = ineq(&[(&[-1], 0)]);
        let r = lp_optimize(&RVec::from_i64(&[1]), &Constraints::none(1), &c, Sense::Max).unwrap();
        assert_eq!(r.status, LpStatus::Unbounded);
    }

    #[test]
    fn equality_constraints_and_redundant_rows() {
        // x + y = 1, 2x + 2y = 2, x >= 0, y >= 0; minimize x - y.
        let eq = Constraints::from_rows(
            vec![(RVec::from_i64(&[1, 1]), int(1)), (RVec::from_i64(&[2, 2]), int(2))],
            2,
        )
        .unwrap();
        let c = ineq(&[(&[-1, 0], 0), (&[0, -1], 0)]);
        let r = lp_optimize(&RVec::from_i64(&[1, -1]), &eq, &c, Sense::Min).unwrap();
        assert_eq!(r.optimum, Some(int(-1)));
        assert_eq!(r.witness, Some(RVec::from_i64(&[0, 1])));
    }

    #[test]
    fn fractional_optimum() {
        // maximize x + y s.t. 2x + y <= 1, x + 3y <= 1
        let c = ineq(&[(&[2, 1], 1), (&[1, 3], 1), (&[-1, 0], 0), (&[0, -1], 0)]);
        let r = lp_optimize(&RVec::from_i64(&[1, 1]), &Constraints::none(2), &c, Sense::Max).unwrap();
        assert_eq!(r.optimum, Some(rat(3, 5)));
        assert_eq!(r.witness, Some(RVec::new(vec![rat(2, 5), rat(1, 5)])));
    }

    #[test]
    fn shape_errors() {
        let c = ineq(&[(&[1, 0], 1)]);
        assert!(lp_optimize(&RVec::from_i64(&[1]), &Constraints::none(1), &c, Sense::Max).is_err());
    }
}
