//! Brute-force V/H conversion and affine dimension for small polytopes.

use std::collections::{BTreeSet, HashSet};

use itertools::Itertools;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::linalg::{nullspace, rank_of, solve_linear, RMat, RVec};
use super::rat::Rat;
use crate::error::{argument, shape, Error, Result};

/// Largest ambient dimension the brute-force enumerators accept.
pub const MAX_ENUMERATION_DIM: usize = 6;

/// Closed halfspace `a · x <= b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Halfspace {
    pub a: RVec,
    #[serde(
        serialize_with = "super::rat::serialize_rat",
        deserialize_with = "super::rat::deserialize_rat"
    )]
    pub b: Rat,
}

impl Halfspace {
    pub fn new(a: RVec, b: Rat) -> Self {
        Halfspace { a, b }
    }

    /// `b - a · x`; nonnegative iff `x` satisfies the halfspace.
    pub fn slack(&self, x: &RVec) -> Result<Rat> {
        Ok(&self.b - self.a.dot(x)?)
    }

    pub fn contains(&self, x: &RVec) -> Result<bool> {
        Ok(!self.slack(x)?.is_negative())
    }

    /// Positive rescaling so the first nonzero coefficient of `a` has modulus one.
    pub fn normalized(&self) -> Halfspace {
        match self.a.iter().find(|x| !x.is_zero()) {
            Some(lead) => {
                let s = lead.abs().recip();
                Halfspace::new(self.a.scale(&s), &self.b * &s)
            }
            None => self.clone(),
        }
    }
}

/// Dimension of the affine hull of `points`.
pub fn affine_hull_dim(points: &[RVec]) -> Result<usize> {
    let first = points
        .first()
        .ok_or_else(|| argument("affine hull of an empty point set"))?;
    if points.iter().any(|p| p.len() != first.len()) {
        return Err(shape("points have different lengths"));
    }
    let diffs: Vec<RVec> = points[1..].iter().map(|p| p.sub(first)).collect::<Result<_>>()?;
    Ok(rank_of(&diffs))
}

fn check_points(points: &[RVec], what: &str) -> Result<usize> {
    let first = points.first().ok_or_else(|| argument(format!("{what}: empty input")))?;
    let dim = first.len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(shape(format!("{what}: inputs have different lengths")));
    }
    if dim > MAX_ENUMERATION_DIM {
        return Err(Error::UnsupportedDimension {
            dim,
            message: format!(
                "{what} is brute force and limited to dimension {MAX_ENUMERATION_DIM}; supply the other representation explicitly"
            ),
        });
    }
    Ok(dim)
}

/// Supporting hyperplane through the vertices named by `subset`, oriented
/// so that every vertex satisfies it, or `None` when the subset is affinely
/// dependent or the hyperplane cuts through the hull.
fn rational_supporting_hyperplane(vertices: &[RVec], subset: &[usize]) -> Result<Option<Halfspace>> {
    let dim = vertices[0].len();
    let rows: Vec<RVec> = subset
        .iter()
        .map(|&i| {
            let mut r = vertices[i].to_vec();
            r.push(-Rat::one());
            RVec::new(r)
        })
        .collect();
    let ns = nullspace(&RMat::from_rows(rows, dim + 1)?);
    if ns.len() != 1 {
        return Ok(None);
    }
    let mut coeffs = ns.into_iter().next().unwrap().into_inner();
    let b = coeffs.pop().unwrap();
    let a = RVec::new(coeffs);
    if a.is_zero() {
        return Ok(None);
    }
    let candidate = Halfspace::new(a, b);
    let slacks: Vec<Rat> = vertices.iter().map(|v| candidate.slack(v)).collect::<Result<_>>()?;
    if slacks.iter().all(|s| !s.is_negative()) {
        Ok(Some(candidate))
    } else if slacks.iter().all(|s| !s.is_positive()) {
        Ok(Some(Halfspace::new(candidate.a.scale(&-Rat::one()), -candidate.b)))
    } else {
        Ok(None)
    }
}

/// The vertex set scaled by a common denominator so that candidate
/// hyperplanes can be found with checked machine integers.
struct IntLattice {
    scale: Rat,
    points: Vec<Vec<i128>>,
}

impl IntLattice {
    fn new(vertices: &[RVec]) -> Option<Self> {
        let mut lcm = num_bigint::BigInt::one();
        for x in vertices.iter().flat_map(|v| v.iter()) {
            lcm = lcm.lcm(x.denom());
        }
        let points = vertices
            .iter()
            .map(|v| {
                v.iter()
                    .map(|x| {
                        i128::try_from((x * &lcm).to_integer())
                            .ok()
                            .filter(|n| n.abs() < 1 << 20)
                    })
                    .collect::<Option<Vec<_>>>()
            })
            .collect::<Option<Vec<_>>>()?;
        Some(Self {
            scale: Rat::from_integer(lcm),
            points,
        })
    }

    /// Integer analogue of [`rational_supporting_hyperplane`]; `None` on overflow.
    /// The result is the primitive oriented vector `(a, b)`.
    fn supporting_hyperplane(&self, subset: &[usize]) -> Option<Option<Vec<i128>>> {
        let dim = self.points[0].len();
        let mut rows = [[0i128; MAX_ENUMERATION_DIM + 1]; MAX_ENUMERATION_DIM];
        for (r, &i) in subset.iter().enumerate() {
            rows[r][..dim].copy_from_slice(&self.points[i]);
            rows[r][dim] = -1;
        }
        // Kernel of the rows (w, -1): a·w = b.
        let mut normal = match integer_kernel(&mut rows[..dim], dim + 1)? {
            Some(k) => k,
            None => return Some(None),
        };
        let b = normal.pop()?;
        if normal.iter().all(|&x| x == 0) {
            return Some(None);
        }
        // Cofactor expansion of the rows (w, -1) gives a·w = b.
        let mut sign = 0i32;
        for p in &self.points {
            let mut slack = b;
            for (a, x) in normal.iter().zip(p) {
                slack = slack.checked_sub(a.checked_mul(*x)?)?;
            }
            let s = slack.signum() as i32;
            if s != 0 {
                if sign != 0 && s != sign {
                    return Some(None);
                }
                sign = s;
            }
        }
        let flip: i128 = if sign < 0 { -1 } else { 1 };
        let mut primitive: Vec<i128> = normal.into_iter().chain(std::iter::once(b)).map(|x| x * flip).collect();
        let g = primitive.iter().fold(0i128, |g, &x| g.gcd(&x));
        for x in &mut primitive {
            *x /= g;
        }
        Some(Some(primitive))
    }

    /// Halfspace in the original coordinates from an oriented integer `(a, b)`.
    fn to_halfspace(&self, primitive: &[i128]) -> Halfspace {
        let (b, a) = primitive.split_last().expect("non-empty");
        let a = RVec::new(a.iter().map(|&x| Rat::from_integer(x.into()) * &self.scale).collect());
        Halfspace::new(a, Rat::from_integer((*b).into()))
    }
}

/// Integer generator of the one-dimensional kernel of `rows` (each of
/// length `cols = rows.len() + 1`), or `Some(None)` when the kernel is
/// larger. Fraction-free elimination keeps every entry a minor of the input,
/// and Cramer's rule makes the back substitution exact. `None` on overflow.
fn integer_kernel(rows: &mut [[i128; MAX_ENUMERATION_DIM + 1]], cols: usize) -> Option<Option<Vec<i128>>> {
    let n = rows.len();
    let mut pivots = [0usize; MAX_ENUMERATION_DIM];
    let mut free = None;
    let mut prev = 1i128;
    let mut r = 0;
    for c in 0..cols {
        if r == n {
            if free.is_some() {
                return Some(None);
            }
            free = Some(c);
            continue;
        }
        let Some(p) = (r..n).find(|&i| rows[i][c] != 0) else {
            if free.is_some() {
                return Some(None);
            }
            free = Some(c);
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r][c];
        let (head, tail) = rows.split_at_mut(r + 1);
        let pivot_row = &head[r];
        for row in tail.iter_mut().take(n - r - 1) {
            let factor = row[c];
            for (x, &p) in row[c + 1..cols].iter_mut().zip(&pivot_row[c + 1..cols]) {
                *x = x.checked_mul(pivot)?.checked_sub(factor.checked_mul(p)?)? / prev;
            }
            row[c] = 0;
        }
        pivots[r] = c;
        prev = pivot;
        r += 1;
    }
    let free = free?;
    let mut x = vec![0i128; cols];
    x[free] = prev;
    for i in (0..n).rev() {
        let mut acc = 0i128;
        for j in pivots[i] + 1..cols {
            acc = acc.checked_add(rows[i][j].checked_mul(x[j])?)?;
        }
        x[pivots[i]] = -acc / rows[i][pivots[i]];
    }
    Some(Some(x))
}

/// Irredundant H-representation of the convex hull of `vertices`.
///
/// Every `dim`-subset of the vertices is tried as a candidate hyperplane;
/// a candidate is kept when all vertices lie on one side. The hull must be
/// full-dimensional in the ambient space.
pub fn facet_enumeration(vertices: &[RVec]) -> Result<Vec<Halfspace>> {
    let dim = check_points(vertices, "facet enumeration")?;
    let hull = affine_hull_dim(vertices)?;
    if hull != dim {
        return Err(Error::Argument(format!(
            "facet enumeration: vertices span a {hull}-dimensional affine hull in {dim}-dimensional space"
        )));
    }
    let lattice = IntLattice::new(vertices);
    let mut seen = BTreeSet::new();
    let mut seen_int = HashSet::new();
    let mut facets = Vec::new();
    for subset in (0..vertices.len()).combinations(dim) {
        let candidate = match lattice.as_ref().map(|l| l.supporting_hyperplane(&subset)) {
            Some(Some(None)) => None,
            Some(Some(Some(primitive))) => {
                if !seen_int.insert(primitive.clone()) {
                    continue;
                }
                lattice.as_ref().map(|l| l.to_halfspace(&primitive))
            }
            _ => rational_supporting_hyperplane(vertices, &subset)?,
        };
        if let Some(h) = candidate {
            let normalized = h.normalized();
            if seen.insert(normalized.clone()) {
                facets.push(normalized);
            }
        }
    }
    Ok(facets)
}

/// Vertices of the bounded polytope `{x : a_i · x <= b_i}`.
///
/// Every `dim`-subset of halfspaces is intersected; intersection points
/// satisfying all halfspaces are the vertices. Boundedness is the caller's
/// responsibility.
pub fn vertex_enumeration(halfspaces: &[Halfspace], dim: usize) -> Result<Vec<RVec>> {
    if halfspaces.iter().any(|h| h.a.len() != dim) {
        return Err(shape("vertex enumeration: halfspace normals have the wrong length"));
    }
    if dim > MAX_ENUMERATION_DIM {
        return Err(Error::UnsupportedDimension {
            dim,
            message: format!(
                "vertex enumeration is brute force and limited to dimension {MAX_ENUMERATION_DIM}; supply vertices explicitly"
            ),
        });
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for subset in (0..halfspaces.len()).combinations(dim) {
        let a = RMat::from_rows(subset.iter().map(|&i| halfspaces[i].a.clone()).collect(), dim)?;
        let b: RVec = subset.iter().map(|&i| halfspaces[i].b.clone()).collect();
        let Some(sol) = solve_linear(&a, &b)? else {
            continue;
        };
        if !sol.nullspace_basis.is_empty() {
            continue;
        }
        let x = sol.particular;
        if halfspaces.iter().all(|h| h.contains(&x).unwrap_or(false)) && seen.insert(x.clone()) {
            out.push(x);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat::int;

    fn pts(raw: &[&[i64]]) -> Vec<RVec> {
        raw.iter().map(|p| RVec::from_i64(p)).collect()
    }

    fn hs(a: &[i64], b: i64) -> Halfspace {
        Halfspace::new(RVec::from_i64(a), int(b))
    }

    fn as_set(h: Vec<Halfspace>) -> BTreeSet<Halfspace> {
        h.into_iter().collect()
    }

    #[test]
    fn affine_dims() {
        assert_eq!(affine_hull_dim(&pts(&[&[3, 4]])).unwrap(), 0);
        assert_eq!(affine_hull_dim(&pts(&[&[0, 0], &[1, 0], &[0, 1]])).unwrap(), 2);
        // Branch-certain gbit corners in expectation form (n, <Z>, <X>).
        assert_eq!(affine_hull_dim(&pts(&[&[1, 1, 1], &[1, 1, -1]])).unwrap(), 1);
        assert!(affine_hull_dim(&[]).is_err());
    }

    #[test]
    fn unit_interval_facets() {
        let f = facet_enumeration(&pts(&[&[0], &[1]])).unwrap();
        assert_eq!(as_set(f), as_set(vec![hs(&[1], 1), hs(&[-1], 0)]));
    }

    #[test]
    fn square_facets() {
        let f = facet_enumeration(&pts(&[&[1, 1], &[1, -1], &[-1, 1], &[-1, -1]])).unwrap();
        assert_eq!(
            as_set(f),
            as_set(vec![hs(&[1, 0], 1), hs(&[-1, 0], 1), hs(&[0, 1], 1), hs(&[0, -1], 1)])
        );
    }

    #[test]
    fn octahedron_facets_are_tight_on_two_vertices_each() {
        let v = pts(&[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]]);
        let f = facet_enumeration(&v).unwrap();
        assert_eq!(
            as_set(f.clone()),
            as_set(vec![hs(&[1, 1], 1), hs(&[1, -1], 1), hs(&[-1, 1], 1), hs(&[-1, -1], 1)])
        );
        for h in &f {
            assert!(v.iter().all(|p| h.contains(p).unwrap()));
            assert_eq!(v.iter().filter(|p| h.slack(p).unwrap().is_zero()).count(), 2);
        }
        for p in &v {
            assert_eq!(f.iter().filter(|h| h.slack(p).unwrap().is_zero()).count(), 2);
        }
    }

    #[test]
    fn interior_points_are_ignored() {
        let f = facet_enumeration(&pts(&[&[0, 0], &[2, 0], &[0, 2], &[1, 0], &[0, 1]])).unwrap();
        assert_eq!(f.len(), 3);
    }

    #[test]
    fn too_many_dimensions() {
        let v = vec![RVec::zeros(7), RVec::unit(7, 0)];
        assert!(matches!(
            facet_enumeration(&v),
            Err(Error::UnsupportedDimension { dim: 7, .. })
        ));
    }

    #[test]
    fn flat_input_is_rejected() {
        assert!(facet_enumeration(&pts(&[&[0, 0], &[1, 1], &[2, 2]])).is_err());
    }

    #[test]
    fn vertex_enumeration_inverts_facet_enumeration() {
        let cube: Vec<RVec> = (0..8)
            .map(|m| RVec::from_i64(&[m & 1, (m >> 1) & 1, (m >> 2) & 1]))
            .collect();
        let f = facet_enumeration(&cube).unwrap();
        assert_eq!(f.len(), 6);
        let back: BTreeSet<RVec> = vertex_enumeration(&f, 3).unwrap().into_iter().collect();
        assert_eq!(back, cube.into_iter().collect());
    }

    proptest::proptest! {
        #[test]
        fn integer_and_rational_hyperplanes_agree(
            raw in proptest::collection::vec(proptest::collection::vec(-4i64..5, 3), 5..9),
            den in 1i64..4,
        ) {
            let points: Vec<RVec> = raw
                .iter()
                .map(|p| RVec::new(p.iter().map(|&x| crate::exact::rat(x, den)).collect()))
                .collect();
            let lattice = IntLattice::new(&points).unwrap();
            for subset in (0..points.len()).combinations(3) {
                let fast = lattice.supporting_hyperplane(&subset).unwrap().map(|p| lattice.to_halfspace(&p).normalized());
                let slow = rational_supporting_hyperplane(&points, &subset).unwrap().map(|h| h.normalized());
                proptest::prop_assert_eq!(fast, slow);
            }
        }
    }
}
