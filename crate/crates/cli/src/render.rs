//! Text tables and JSON for every report the CLI emits.

use std::fmt;

use gptdyn_core::exact::rat::display_rat;
use gptdyn_core::exact::RVec;
use gptdyn_core::mub::MubReport;
use gptdyn_core::restriction::{RestrictionReport, Uncertainty};
use gptdyn_core::solver::{MonotonicityReport, SolveReport, TheoremReport, VerificationReport};
use serde::{Deserialize, Serialize};

#[derive(Debug, Serialize, Deserialize)]
pub struct DemoEntry {
    pub description: String,
    pub restriction: RestrictionReport,
    pub theorem: TheoremReport,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct NamedUncertainty {
    pub theory: String,
    pub result: Uncertainty,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DemoReport {
    pub theories: Vec<DemoEntry>,
    pub monotonicity: MonotonicityReport,
    pub mub: Vec<MubReport>,
    pub uncertainty: Vec<NamedUncertainty>,
    pub passed: bool,
}

pub fn describe_builtin(name: &str) -> &'static str {
    match name {
        "gbit" => "gbit: box-world square, binary Z and X",
        "cube" => "cube: box-world with three binary measurements",
        "qubit" => "qubit: Bloch ball with binary Z, X, Y",
        "classical2" => "classical2: classical bit, Z only",
        "octahedron" => "octahedron: constructed contrast theory, not a standard model; |<X>| + |<Z>| <= n",
        _ => "",
    }
}

/// JSON shapes are the core report schemas; lists appear only when several
/// branches were requested.
#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Report {
    Restriction(RestrictionReport),
    Solve(SolveReport),
    SolveAll(Vec<SolveReport>),
    Verify(Box<VerificationReport>),
    VerifyAll(Vec<VerificationReport>),
    Mub(MubReport),
    Theorem(Box<TheoremReport>),
    TheoremCompared {
        theorem: Box<TheoremReport>,
        monotonicity: MonotonicityReport,
    },
    Demo(Box<DemoReport>),
}

impl Report {
    pub fn solve(mut reports: Vec<SolveReport>, single: bool) -> Self {
        if single {
            Report::Solve(reports.remove(0))
        } else {
            Report::SolveAll(reports)
        }
    }

    pub fn verify(mut reports: Vec<VerificationReport>, single: bool) -> Self {
        if single {
            Report::Verify(Box::new(reports.remove(0)))
        } else {
            Report::VerifyAll(reports)
        }
    }
}

pub struct Output {
    json: bool,
    report: Report,
}

impl Output {
    pub fn new(json: bool, report: Report) -> Self {
        Output { json, report }
    }
}

impl fmt::Display for Output {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.json {
            let text = serde_json::to_string_pretty(&self.report).map_err(|_| fmt::Error)?;
            return writeln!(f, "{text}");
        }
        match &self.report {
            Report::Restriction(r) => restriction_text(f, r),
            Report::Solve(r) => solve_text(f, std::slice::from_ref(r)),
            Report::SolveAll(rs) => solve_text(f, rs),
            Report::Verify(r) => verify_text(f, r),
            Report::VerifyAll(rs) => rs.iter().try_for_each(|r| verify_text(f, r)),
            Report::Mub(r) => mub_text(f, r),
            Report::Theorem(theorem) => theorem_text(f, theorem),
            Report::TheoremCompared { theorem, monotonicity } => {
                theorem_text(f, theorem)?;
                monotonicity_text(f, monotonicity)
            }
            Report::Demo(d) => demo_text(f, d),
        }
    }
}

/// Left-aligned columns separated by two spaces.
fn table(f: &mut fmt::Formatter<'_>, header: &[&str], rows: &[Vec<String>]) -> fmt::Result {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |f: &mut fmt::Formatter<'_>, cells: &[String]| -> fmt::Result {
        let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        writeln!(f, "{}", parts.join("  ").trim_end())
    };
    line(f, &header.iter().map(|h| h.to_string()).collect::<Vec<_>>())?;
    line(f, &widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>())?;
    rows.iter().try_for_each(|r| line(f, r))
}

fn vec_text(v: &RVec) -> String {
    let parts: Vec<String> = v.iter().map(display_rat).collect();
    format!("({})", parts.join(", "))
}

fn restriction_text(f: &mut fmt::Formatter<'_>, r: &RestrictionReport) -> fmt::Result {
    writeln!(f, "class: {}  (N = {}, M = {}, d = {})", r.class, r.n, r.m, r.d)?;
    let rows: Vec<Vec<String>> = r
        .per_branch_freedom
        .iter()
        .map(|(b, free)| vec![b.clone(), free.to_string()])
        .collect();
    table(f, &["branch", "freedom"], &rows)
}

fn solve_text(f: &mut fmt::Formatter<'_>, reports: &[SolveReport]) -> fmt::Result {
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            vec![
                r.branch.clone(),
                r.linear_stage_dim.to_string(),
                serde_json::to_value(r.result)
                    .ok()
                    .and_then(|v| v.as_str().map(str::to_string))
                    .unwrap_or_default(),
                r.family_dim.map_or("-".into(), |d| d.to_string()),
                r.forced_fixed_count.to_string(),
            ]
        })
        .collect();
    table(
        f,
        &[
            "branch",
            "linear_stage_dim",
            "result",
            "family_dim",
            "forced_fixed_count",
        ],
        &rows,
    )?;
    for r in reports.iter().filter(|r| !r.candidates.is_empty()) {
        writeln!(
            f,
            "verified candidates on branch {}: {}",
            r.branch,
            r.candidates.join(", ")
        )?;
    }
    Ok(())
}

fn verify_text(f: &mut fmt::Formatter<'_>, r: &VerificationReport) -> fmt::Result {
    writeln!(f, "branch {}: {}", r.branch, r.verdict)?;
    let nonzero: Vec<Vec<String>> = r
        .constraint_residuals
        .iter()
        .filter(|res| !res.values.is_zero())
        .map(|res| vec![res.constraint.clone(), vec_text(&res.values)])
        .collect();
    if nonzero.is_empty() {
        writeln!(
            f,
            "  all {} constraint residuals are zero",
            r.constraint_residuals.len()
        )?;
    } else {
        table(f, &["constraint", "residual"], &nonzero)?;
    }
    if !r.membership_violations.is_empty() {
        let rows: Vec<Vec<String>> = r
            .membership_violations
            .iter()
            .map(|m| vec![vec_text(&m.probe), vec_text(&m.image), m.violation.clone()])
            .collect();
        table(f, &["state", "image", "violation"], &rows)?;
    }
    if !r.complete {
        writeln!(f, "  note: state preservation checked on a finite probe set only")?;
    }
    Ok(())
}

fn mub_text(f: &mut fmt::Formatter<'_>, r: &MubReport) -> fmt::Result {
    writeln!(f, "{{{}}}: {}", r.labels.join(", "), r.verdict)?;
    if let Some(c) = &r.counterexample {
        writeln!(
            f,
            "  counterexample: state {} leaves the state space when {} outcomes are relabelled {:?}",
            vec_text(&c.state),
            c.measurement,
            c.permutation
        )?;
    }
    Ok(())
}

fn theorem_text(f: &mut fmt::Formatter<'_>, r: &TheoremReport) -> fmt::Result {
    writeln!(f, "{} (N = {}, M = {}, d = {}): {}", r.theory, r.n, r.m, r.d, r.class)?;
    solve_text(f, &r.branches)?;
    writeln!(f, "{}", r.summary)?;
    if r.passed {
        writeln!(f, "theorem checks: pass")
    } else {
        writeln!(f, "theorem checks: FAIL")?;
        r.findings.iter().try_for_each(|x| writeln!(f, "  {x}"))
    }
}

fn monotonicity_text(f: &mut fmt::Formatter<'_>, m: &MonotonicityReport) -> fmt::Result {
    let dim = |d: Option<usize>| d.map_or("unknown".to_string(), |d| d.to_string());
    writeln!(
        f,
        "allowed-set dimension: {} {} vs {} {}: {}",
        m.first,
        dim(m.first_dim),
        m.second,
        dim(m.second_dim),
        if m.holds {
            "strictly smaller"
        } else {
            "not strictly smaller"
        }
    )
}

fn demo_text(f: &mut fmt::Formatter<'_>, d: &DemoReport) -> fmt::Result {
    for e in &d.theories {
        writeln!(f, "== {}", e.description)?;
        restriction_text(f, &e.restriction)?;
        theorem_text(f, &e.theorem)?;
        writeln!(f)?;
    }
    monotonicity_text(f, &d.monotonicity)?;
    for m in &d.mub {
        mub_text(f, m)?;
    }
    for u in &d.uncertainty {
        match &u.result {
            Uncertainty::Holds => writeln!(f, "{}: quantum-like uncertainty holds", u.theory)?,
            Uncertainty::Fails { witness, measurement } => writeln!(
                f,
                "{}: quantum-like uncertainty fails, {} not uniform at {}",
                u.theory,
                measurement,
                vec_text(&witness.entries)
            )?,
        }
    }
    writeln!(f, "demo: {}", if d.passed { "all checks pass" } else { "FAILED" })
}
