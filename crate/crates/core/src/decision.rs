//! Degree regimes and the combinatorial GIT verdict.
//!
//! For connected curves of genus `g ≥ 2` polarized in degree `d`:
//!
//! * when `d > 4(2g − 2)`, a point is semistable / polystable / stable iff the
//!   curve is quasi-stable and the multidegree is balanced / strictly
//!   balanced / stably balanced;
//! * when `2(2g − 2) < d < 7(g − 1)` and `g ≥ 3`, the same holds with
//!   quasi-p-stable curves in place of quasi-stable ones;
//! * in both regimes the quotient is geometric iff `gcd(2g − 2, d − g + 1) = 1`.
//!
//! Hilbert and Chow stability agree in both regimes, so one verdict is
//! reported. Outside them only a one-sided necessary check is available.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::balance::{classify_multidegree, BalanceError, BalanceFlavor, BalanceReport, PolarizedCurve};
use crate::class::{classify_curve, CurveClass};
use crate::graph::{EdgeKind, Subcurve};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecisionError {
    #[error("genus {0} is below 2; the stability criteria need g >= 2")]
    GenusTooSmall(i64),
    #[error("the curve is disconnected; the stability criteria assume a connected curve")]
    Disconnected,
    #[error(
        "component `{vertex}` has degree {degree}; an embedded curve has positive degree on every component"
    )]
    NonPositiveDegree { vertex: String, degree: i64 },
    #[error("regime {0} is outside the range of the gap-region necessary conditions")]
    WrongRegime(Regime),
    #[error(transparent)]
    Balance(#[from] BalanceError),
}

/// Where `(d, g)` sits relative to the degree ranges with a known answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Regime {
    /// `d > 4(2g − 2)`.
    TheoremA,
    /// `2(2g − 2) < d < 7(g − 1)`, `g ≥ 3`.
    TheoremB,
    /// `7(g − 1) ≤ d ≤ 4(2g − 2)` (for `g = 2`, only `d = 8`).
    GapRegion,
    /// `d ≤ 2(2g − 2)`.
    LowDegree,
    /// `g = 2` and `4 < d ≤ 7`.
    SmallGenusB,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

pub fn regime(d: i64, g: i64) -> Result<Regime, DecisionError> {
    if g < 2 {
        return Err(DecisionError::GenusTooSmall(g));
    }
    let canonical = 2 * g - 2;
    Ok(if d > 4 * canonical {
        Regime::TheoremA
    } else if d <= 2 * canonical {
        Regime::LowDegree
    } else if g == 2 {
        // 2(2g-2) < d <= 4(2g-2) is 5..=8; only d = 8 is left to the gap
        if d < 4 * canonical {
            Regime::SmallGenusB
        } else {
            Regime::GapRegion
        }
    } else if d < 7 * (g - 1) {
        Regime::TheoremB
    } else {
        Regime::GapRegion
    })
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Whether every semistable point is stable: `gcd(2g − 2, d − g + 1) = 1`.
pub fn geometric_quotient(d: i64, g: i64) -> bool {
    gcd(2 * g - 2, d - g + 1) == 1
}

/// Reasons a polarized curve fails the gap-region necessary conditions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum NecessaryFailure {
    NotBalanced { witness: Option<Subcurve> },
    TacnodalComponentNotLine { vertex: String, degree: i64 },
}

impl fmt::Display for NecessaryFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NecessaryFailure::NotBalanced { .. } => f.write_str("not balanced"),
            NecessaryFailure::TacnodalComponentNotLine { vertex, degree } => {
                write!(f, "tacnodal component not a line: `{vertex}` has degree {degree}")
            }
        }
    }
}

/// One-sided: failing proves instability, passing proves nothing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum NecessaryVerdict {
    PassesNecessary,
    FailsNecessary(Vec<NecessaryFailure>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum GitStatus {
    Stable,
    /// Polystable, not stable.
    StrictlyPolystable,
    /// Semistable, not polystable.
    StrictlySemistable,
    Unstable,
    Unknown {
        regime: Regime,
        necessary: Option<NecessaryVerdict>,
    },
}

impl GitStatus {
    pub fn name(&self) -> &'static str {
        match self {
            GitStatus::Stable => "Stable",
            GitStatus::StrictlyPolystable => "StrictlyPolystable",
            GitStatus::StrictlySemistable => "StrictlySemistable",
            GitStatus::Unstable => "Unstable",
            GitStatus::Unknown { .. } => "Unknown",
        }
    }

    pub fn is_semistable(&self) -> bool {
        matches!(
            self,
            GitStatus::Stable | GitStatus::StrictlyPolystable | GitStatus::StrictlySemistable
        )
    }
}

/// Full outcome of [`decide`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decision {
    pub genus: i64,
    pub degree: i64,
    pub regime: Regime,
    pub class: CurveClass,
    pub balance: BalanceReport,
    pub status: GitStatus,
    pub geometric_quotient: bool,
    pub trace: Vec<String>,
}

fn check_hypotheses(pc: &PolarizedCurve) -> Result<i64, DecisionError> {
    let graph = pc.graph();
    let g = graph.arithmetic_genus();
    if g < 2 {
        return Err(DecisionError::GenusTooSmall(g));
    }
    if !graph.is_connected() {
        return Err(DecisionError::Disconnected);
    }
    for (v, &degree) in graph.vertices().iter().zip(pc.multidegree().degrees()) {
        if degree <= 0 {
            return Err(DecisionError::NonPositiveDegree {
                vertex: v.id.clone(),
                degree,
            });
        }
    }
    Ok(g)
}

fn status_for(flavor: BalanceFlavor) -> GitStatus {
    match flavor {
        BalanceFlavor::StablyBalanced => GitStatus::Stable,
        BalanceFlavor::StrictlyBalanced => GitStatus::StrictlyPolystable,
        BalanceFlavor::Balanced | BalanceFlavor::ProperlyBalanced => GitStatus::StrictlySemistable,
        BalanceFlavor::NotBalanced => GitStatus::Unstable,
    }
}

pub fn decide(pc: &PolarizedCurve) -> Result<Decision, DecisionError> {
    let g = check_hypotheses(pc)?;
    let d = pc.total_degree();
    let regime = regime(d, g)?;
    let class = classify_curve(pc.graph());
    let balance = classify_multidegree(pc)?;
    let mut trace = vec![format!("genus {g}, degree {d}: regime {regime}")];
    let status = match regime {
        Regime::TheoremA | Regime::TheoremB => {
            let (ok, kind) = if regime == Regime::TheoremA {
                (class.is_quasi_stable, "quasi-stable")
            } else {
                (class.is_quasi_p_stable, "quasi-p-stable")
            };
            if !ok {
                trace.push(format!("not {kind}"));
                GitStatus::Unstable
            } else {
                trace.push(format!("{kind}; multidegree is {}", balance.flavor));
                status_for(balance.flavor)
            }
        }
        Regime::GapRegion => {
            let verdict = necessary_conditions(pc, &balance);
            trace.push("no characterization in this range; necessary conditions only".into());
            GitStatus::Unknown {
                regime,
                necessary: Some(verdict),
            }
        }
        Regime::LowDegree | Regime::SmallGenusB => {
            trace.push("no characterization in this range".into());
            GitStatus::Unknown {
                regime,
                necessary: None,
            }
        }
    };
    Ok(Decision {
        genus: g,
        degree: d,
        regime,
        class,
        balance,
        status,
        geometric_quotient: geometric_quotient(d, g),
        trace,
    })
}

fn necessary_conditions(pc: &PolarizedCurve, balance: &BalanceReport) -> NecessaryVerdict {
    let graph = pc.graph();
    let mut failures = Vec::new();
    if balance.flavor < BalanceFlavor::Balanced {
        failures.push(NecessaryFailure::NotBalanced {
            witness: balance.witness,
        });
    }
    for e in graph.edges().iter().filter(|e| e.kind() == EdgeKind::Tacnode) {
        let (a, b) = e.ends();
        let line = if graph.vertex(a).exceptional { a } else { b };
        let degree = pc.multidegree().degrees()[line];
        if degree != 1 {
            failures.push(NecessaryFailure::TacnodalComponentNotLine {
                vertex: graph.vertex(line).id.clone(),
                degree,
            });
        }
    }
    if failures.is_empty() {
        NecessaryVerdict::PassesNecessary
    } else {
        NecessaryVerdict::FailsNecessary(failures)
    }
}

/// Necessary conditions for semistability when `7(g − 1) ≤ d ≤ 4(2g − 2)`:
/// balanced, and every tacnode joins a line (degree-1 exceptional component).
pub fn gap_necessary(pc: &PolarizedCurve) -> Result<NecessaryVerdict, DecisionError> {
    let g = pc.genus();
    let regime = regime(pc.total_degree(), g)?;
    if regime != Regime::GapRegion {
        return Err(DecisionError::WrongRegime(regime));
    }
    if !pc.graph().is_connected() {
        return Err(DecisionError::Disconnected);
    }
    let balance = classify_multidegree(pc)?;
    Ok(necessary_conditions(pc, &balance))
}
