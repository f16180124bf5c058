use num_traits::{One, Signed, Zero};

use super::linalg::{nullspace, RMat, RVec};
use super::lp::{lp_feasible_point, Constraints};
use super::rat::Rat;
use crate::error::{Error, Result};

/// A probability vector left invariant by the column-stochastic matrix `s`.
///
/// The fixed space of `s` is computed exactly as the nullspace of `s - I`;
/// an LP then picks a nonnegative, normalized element of it. Such an
/// element always exists for stochastic input.
pub fn stochastic_fixed_point(s: &RMat) -> Result<RVec> {
    if !s.is_square() {
        return Err(Error::NotStochastic(format!("{}x{} is not square", s.rows(), s.cols())));
    }
    let n = s.rows();
    if n == 0 {
        return Err(Error::NotStochastic("empty matrix".into()));
    }
    for j in 0..n {
        let col = s.column(j);
        if let Some(i) = col.iter().position(Signed::is_negative) {
            return Err(Error::NotStochastic(format!("entry ({i}, {j}) is negative")));
        }
        if !col.sum().is_one() {
            return Err(Error::NotStochastic(format!("column {j} sums to {}", col.sum())));
        }
    }
    let basis = nullspace(&s.sub(&RMat::identity(n))?);
    let k = basis.len();
    let b = RMat::from_columns(&basis, n)?;
    // v = B c,  v >= 0,  sum(v) = 1.
    let sums: RVec = basis.iter().map(RVec::sum).collect();
    let eq = Constraints::new(RMat::from_rows(vec![sums], k)?, RVec::new(vec![Rat::one()]));
    let ineq = Constraints::new(b.scale(&-Rat::one()), RVec::zeros(n));
    let c = lp_feasible_point(&eq, &ineq)?
        .ok_or_else(|| Error::NotStochastic("no nonnegative fixed point found".into()))?;
    let v = b.mul_vec(&c)?;
    debug_assert!(v.iter().all(|x| !x.is_negative()) && v.sum().is_one());
    debug_assert!(s.mul_vec(&v)? == v);
    Ok(v.iter()
        .map(|x| if x.is_zero() { Rat::zero() } else { x.clone() })
        .collect())
}
