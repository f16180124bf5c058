//! Exact verification of a single candidate transformation.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{assemble_constraints, Transformation};
use crate::error::{argument, Result};
use crate::exact::{rat, RMat, RVec, Rat};
use crate::theory::{Membership, Representation, StateSpace, StateVec, TheorySpec};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Residual {
    pub constraint: String,
    pub values: RVec,
}

/// A valid probe state whose image is not a valid state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipFailure {
    pub probe: RVec,
    pub image: RVec,
    pub violation: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub branch: String,
    pub constraint_residuals: Vec<Residual>,
    pub membership_violations: Vec<MembershipFailure>,
    /// False when state preservation was only checked on a finite probe set.
    pub complete: bool,
    pub verdict: Verdict,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn residuals_zero(&self) -> bool {
        self.constraint_residuals.iter().all(|r| r.values.is_zero())
    }
}

/// Checks the branch-locality equalities and state preservation for `tr`.
///
/// Polytopes: every vertex image must be a member, which settles all states
/// by convexity. Ball: when the normalization and branch rows are identity
/// rows the check is exact (see [`ball_preservation`]); otherwise a finite
/// probe set is used and the report is marked incomplete.
pub fn verify_transformation(t: &TheorySpec, tr: &Transformation, branch: usize) -> Result<VerificationReport> {
    let d = t.dim();
    let m = tr.matrix();
    if m.rows() != d || m.cols() != d {
        return Err(argument(format!(
            "transformation is {}x{} but the theory dimension is {d}",
            m.rows(),
            m.cols()
        )));
    }
    let cs = assemble_constraints(t, branch)?;
    let constraint_residuals = cs.residuals(m)?;
    let (membership_violations, complete) = match t.state_space() {
        StateSpace::Polytope(p) => (image_failures(t, m, &p.vertices)?, true),
        StateSpace::Ball => ball_preservation(t, m)?,
    };
    let verdict = if constraint_residuals.iter().all(|r| r.values.is_zero()) && membership_violations.is_empty() {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(VerificationReport {
        branch: t.branch_label(branch),
        constraint_residuals,
        membership_violations,
        complete,
        verdict,
    })
}

fn image_failures(t: &TheorySpec, m: &RMat, probes: &[RVec]) -> Result<Vec<MembershipFailure>> {
    let mut out = Vec::new();
    for probe in probes {
        let image = m.mul_vec(probe)?;
        if let Membership::Outside(v) = crate::theory::minimal_membership(t, &image) {
            out.push(MembershipFailure {
                probe: probe.clone(),
                image,
                violation: v.to_string(),
            });
        }
    }
    Ok(out)
}

/// Expectation-vector positions of `(Z, X, Y)` for a ball theory.
fn ball_axes(t: &TheorySpec) -> [usize; 3] {
    let b = t.blocks();
    [1 + b[0].measurement, 1 + b[1].measurement, 1 + b[2].measurement]
}

fn expectation_point(t: &TheorySpec, n: Rat, bloch: [Rat; 3]) -> Result<RVec> {
    let mut e = RVec::zeros(t.dim());
    e[0] = n;
    for (pos, value) in ball_axes(t).into_iter().zip(bloch) {
        e[pos] = value;
    }
    Ok(t.convert(&StateVec::expectation(e), Representation::Minimal)?.entries)
}

/// Rational points on the unit circle, `((1 - s²)/(1 + s²), 2s/(1 + s²))`
/// for `s = p/q` with `|p| <= 2q`, `q <= level`, plus the axis directions.
fn circle_points(level: i64) -> Vec<[Rat; 2]> {
    let mut out = vec![
        [Rat::one(), Rat::zero()],
        [Rat::zero(), Rat::one()],
        [-Rat::one(), Rat::zero()],
        [Rat::zero(), -Rat::one()],
    ];
    for q in 1..=level {
        for p in -2 * q..=2 * q {
            let s = rat(p, q);
            let den = Rat::one() + &s * &s;
            out.push([(Rat::one() - &s * &s) / &den, (&s + &s) / &den]);
        }
    }
    out
}

/// Ball preservation for a transformation in minimal representation.
///
/// In expectation coordinates `(n, z, g)` with `g = (<X>, <Y>)`, suppose the
/// `n` and `z` rows are identity rows, so `g' = c n + c_z z + B g`. The
/// poles `(1, ±1, 0)` force `c ± c_z = 0`, after which the ball is preserved
/// iff `|B g| <= |g|` for all `g`, i.e. `I - BᵀB` is positive semidefinite.
/// A failing case is witnessed by a rational circle point found by
/// refining the probe grid until one exceeds the ball.
fn ball_preservation(t: &TheorySpec, m: &RMat) -> Result<(Vec<MembershipFailure>, bool)> {
    let e = t.transformation_to_expectation(m)?;
    let [z, x, y] = ball_axes(t);
    let identity_rows = [0, z]
        .iter()
        .all(|&r| (0..t.dim()).all(|j| e[(r, j)] == if r == j { Rat::one() } else { Rat::zero() }));
    if !identity_rows {
        let mut probes = Vec::new();
        for sign in [1, -1] {
            probes.push(expectation_point(
                t,
                Rat::one(),
                [rat(sign, 1), Rat::zero(), Rat::zero()],
            )?);
        }
        for [a, b] in circle_points(3) {
            probes.push(expectation_point(t, Rat::one(), [Rat::zero(), a.clone(), b.clone()])?);
            probes.push(expectation_point(t, Rat::one(), [b, Rat::zero(), a])?);
        }
        probes.push(RVec::zeros(t.dim()));
        return Ok((image_failures(t, m, &probes)?, false));
    }
    for sign in [1, -1] {
        let c0 = &e[(x, 0)] + &e[(x, z)] * rat(sign, 1);
        let c1 = &e[(y, 0)] + &e[(y, z)] * rat(sign, 1);
        if !c0.is_zero() || !c1.is_zero() {
            let pole = expectation_point(t, Rat::one(), [rat(sign, 1), Rat::zero(), Rat::zero()])?;
            return Ok((image_failures(t, m, &[pole])?, true));
        }
    }
    let b = [
        [e[(x, x)].clone(), e[(x, y)].clone()],
        [e[(y, x)].clone(), e[(y, y)].clone()],
    ];
    let q = |i: usize, j: usize| {
        let btb = &b[0][i] * &b[0][j] + &b[1][i] * &b[1][j];
        if i == j {
            Rat::one() - btb
        } else {
            -btb
        }
    };
    let (q00, q01, q11) = (q(0, 0), q(0, 1), q(1, 1));
    let psd = !q00.is_negative() && !q11.is_negative() && !(&q00 * &q11 - &q01 * &q01).is_negative();
    if psd {
        return Ok((Vec::new(), true));
    }
    let mut level = 2;
    loop {
        for [u0, u1] in circle_points(level) {
            let g0 = &b[0][0] * &u0 + &b[0][1] * &u1;
            let g1 = &b[1][0] * &u0 + &b[1][1] * &u1;
            if &g0 * &g0 + &g1 * &g1 > Rat::one() {
                let probe = expectation_point(t, Rat::one(), [Rat::zero(), u0, u1])?;
                return Ok((image_failures(t, m, &[probe])?, true));
            }
        }
        level *= 2;
    }
}

/// Named exact candidates for ball theories: maps of the `(<X>, <Y>)` block
/// that fix `n` and `<Z>`.
pub fn ball_candidates(t: &TheorySpec) -> Result<Vec<(String, Transformation)>> {
    if !t.is_ball() {
        return Err(argument("ball candidates only exist for ball theories"));
    }
    let blocks: [(&str, [[Rat; 2]; 2]); 7] = [
        ("rotation 3-4-5", [[rat(3, 5), rat(-4, 5)], [rat(4, 5), rat(3, 5)]]),
        (
            "rotation 3-4-5 inverse",
            [[rat(3, 5), rat(4, 5)], [rat(-4, 5), rat(3, 5)]],
        ),
        (
            "rotation 5-12-13",
            [[rat(5, 13), rat(-12, 13)], [rat(12, 13), rat(5, 13)]],
        ),
        ("reflection X", [[rat(-1, 1), rat(0, 1)], [rat(0, 1), rat(1, 1)]]),
        ("reflection Y", [[rat(1, 1), rat(0, 1)], [rat(0, 1), rat(-1, 1)]]),
        ("dephasing 1/2", [[rat(1, 2), rat(0, 1)], [rat(0, 1), rat(1, 2)]]),
        ("full dephasing", [[rat(0, 1), rat(0, 1)], [rat(0, 1), rat(0, 1)]]),
    ];
    let [_, x, y] = ball_axes(t);
    blocks
        .into_iter()
        .map(|(name, b)| {
            let mut e = RMat::identity(t.dim());
            for (i, &r) in [x, y].iter().enumerate() {
                for (j, &c) in [x, y].iter().enumerate() {
                    e[(r, c)] = b[i][j].clone();
                }
            }
            Ok((name.to_string(), Transformation(t.transformation_from_expectation(&e)?)))
        })
        .collect()
}
