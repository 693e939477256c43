//! The basic inequality and the balancedness flavors of a multidegree.
//!
//! For a subcurve `Z` of a curve of genus `g` carrying a line bundle of total
//! degree `d`, the basic inequality reads
//!
//! ```text
//! | deg_Z L − d · deg_Z ω / (2g − 2) |  ≤  k_Z / 2
//! ```
//!
//! Everything here is evaluated in integers after multiplying through by
//! `2(2g − 2)`:
//!
//! ```text
//! | 2(2g − 2) · deg_Z L − 2d · deg_Z ω |  ≤  (2g − 2) · k_Z
//! ```
//!
//! Subcurves are scanned as bitmasks in increasing order (vertices sorted by
//! id), which makes reported witnesses deterministic.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{full_mask, mask_is_connected, CurveGraph, GraphError, Subcurve, ValidationReport};

/// Above this many components, subset scans log a warning.
pub const SCAN_WARN_VERTICES: usize = 20;
/// Subset scans refuse graphs with more components than this.
pub const SCAN_MAX_VERTICES: usize = 26;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BalanceError {
    #[error("arithmetic genus {0} is below 2")]
    GenusTooSmall(i64),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("graph is not valid: {0}")]
    Invalid(ValidationReport),
    #[error("multidegree has {found} entries for {expected} components")]
    LengthMismatch { expected: usize, found: usize },
    #[error("multidegree misses component `{0}`")]
    MissingDegree(String),
    #[error("{0} components are too many for an exhaustive subcurve scan")]
    TooManyComponents(usize),
}

/// Degrees of a line bundle on the components, aligned with the vertex order
/// of the graph it belongs to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Multidegree(Vec<i64>);

impl Multidegree {
    pub fn new(degrees: Vec<i64>) -> Self {
        Multidegree(degrees)
    }

    pub fn degrees(&self) -> &[i64] {
        &self.0
    }

    pub fn total(&self) -> i64 {
        self.0.iter().sum()
    }

    /// `deg_Z L`.
    pub fn on(&self, z: Subcurve) -> i64 {
        z.indices().take_while(|&i| i < self.0.len()).map(|i| self.0[i]).sum()
    }

    /// Keyed by component id.
    pub fn to_map(&self, graph: &CurveGraph) -> BTreeMap<String, i64> {
        graph
            .vertices()
            .iter()
            .zip(&self.0)
            .map(|(v, &d)| (v.id.clone(), d))
            .collect()
    }

    pub fn from_map(graph: &CurveGraph, degrees: &BTreeMap<String, i64>) -> Result<Self, BalanceError> {
        for id in degrees.keys() {
            if graph.vertex_index(id).is_none() {
                return Err(GraphError::UnknownVertex(id.clone()).into());
            }
        }
        graph
            .vertices()
            .iter()
            .map(|v| {
                degrees
                    .get(&v.id)
                    .copied()
                    .ok_or_else(|| BalanceError::MissingDegree(v.id.clone()))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Multidegree)
    }
}

/// A valid curve together with a multidegree on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarizedCurve {
    graph: CurveGraph,
    multidegree: Multidegree,
}

impl PolarizedCurve {
    pub fn new(graph: CurveGraph, multidegree: Multidegree) -> Result<Self, BalanceError> {
        let report = graph.validate();
        if !report.is_valid() {
            return Err(BalanceError::Invalid(report));
        }
        if multidegree.0.len() != graph.vertex_count() {
            return Err(BalanceError::LengthMismatch {
                expected: graph.vertex_count(),
                found: multidegree.0.len(),
            });
        }
        Ok(PolarizedCurve { graph, multidegree })
    }

    /// Convenience constructor from `(id, degree)` pairs.
    pub fn with_degrees(graph: CurveGraph, degrees: &[(&str, i64)]) -> Result<Self, BalanceError> {
        let map = degrees.iter().map(|&(id, d)| (id.to_string(), d)).collect();
        let md = Multidegree::from_map(&graph, &map)?;
        PolarizedCurve::new(graph, md)
    }

    pub fn graph(&self) -> &CurveGraph {
        &self.graph
    }

    pub fn multidegree(&self) -> &Multidegree {
        &self.multidegree
    }

    pub fn total_degree(&self) -> i64 {
        self.multidegree.total()
    }

    pub fn genus(&self) -> i64 {
        self.graph.arithmetic_genus()
    }
}

/// Balancedness, weakest to strongest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum BalanceFlavor {
    NotBalanced,
    Balanced,
    ProperlyBalanced,
    StrictlyBalanced,
    StablyBalanced,
}

impl BalanceFlavor {
    pub const ALL: [BalanceFlavor; 5] = [
        BalanceFlavor::NotBalanced,
        BalanceFlavor::Balanced,
        BalanceFlavor::ProperlyBalanced,
        BalanceFlavor::StrictlyBalanced,
        BalanceFlavor::StablyBalanced,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BalanceFlavor::NotBalanced => "NotBalanced",
            BalanceFlavor::Balanced => "Balanced",
            BalanceFlavor::ProperlyBalanced => "ProperlyBalanced",
            BalanceFlavor::StrictlyBalanced => "StrictlyBalanced",
            BalanceFlavor::StablyBalanced => "StablyBalanced",
        }
    }
}

impl fmt::Display for BalanceFlavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for BalanceFlavor {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_lowercase();
        BalanceFlavor::ALL
            .into_iter()
            .find(|f| f.name().to_lowercase() == key || f.name().to_lowercase() == format!("{key}balanced"))
            .ok_or_else(|| format!("unknown balance flavor `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum InequalityStatus {
    StrictlyHolds,
    HoldsWithEquality,
    Fails,
}

/// One evaluation of the basic inequality, with the scaled quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct InequalityCheck {
    pub status: InequalityStatus,
    /// `2(2g − 2) · deg_Z L − 2d · deg_Z ω`.
    pub deviation: i64,
    /// `(2g − 2) · k_Z`.
    pub bound: i64,
    /// Every point of `Z ∩ Z^c` lies on an exceptional component.
    pub strict_exempt: bool,
    /// `Z` or its complement lies inside the exceptional locus.
    pub stable_exempt: bool,
}

fn status(deviation: i64, bound: i64) -> InequalityStatus {
    match deviation.abs().cmp(&bound) {
        std::cmp::Ordering::Less => InequalityStatus::StrictlyHolds,
        std::cmp::Ordering::Equal => InequalityStatus::HoldsWithEquality,
        std::cmp::Ordering::Greater => InequalityStatus::Fails,
    }
}

fn genus_at_least_two(graph: &CurveGraph) -> Result<i64, BalanceError> {
    let g = graph.arithmetic_genus();
    if g < 2 {
        return Err(BalanceError::GenusTooSmall(g));
    }
    Ok(g)
}

/// Evaluates the basic inequality on a proper nonempty subcurve.
pub fn basic_inequality(pc: &PolarizedCurve, z: Subcurve) -> Result<InequalityCheck, BalanceError> {
    let graph = pc.graph();
    let g = genus_at_least_two(graph)?;
    let k = graph.intersection_length(z)?;
    let omega = graph.omega_degree(z)?;
    let d = pc.total_degree();
    let deviation = 2 * (2 * g - 2) * pc.multidegree().on(z) - 2 * d * omega;
    let bound = (2 * g - 2) * k;
    let exc = graph.exceptional_locus().mask();
    let strict_exempt = graph.edges().iter().all(|e| {
        let (a, b) = e.ends();
        z.contains(a) == z.contains(b) || exc >> a & 1 == 1 || exc >> b & 1 == 1
    });
    let stable_exempt = z.mask() & !exc == 0 || graph.complement(z).mask() & !exc == 0;
    Ok(InequalityCheck {
        status: status(deviation, bound),
        deviation,
        bound,
        strict_exempt,
        stable_exempt,
    })
}

/// Outcome of [`classify_multidegree`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BalanceReport {
    pub flavor: BalanceFlavor,
    /// Blocks the first upgrade that failed: an overloaded subcurve when not
    /// balanced, an exceptional component of wrong degree when not properly
    /// balanced, a tight non-exempt subcurve when not strictly or stably
    /// balanced. `None` when the flavor is `StablyBalanced`.
    pub witness: Option<Subcurve>,
    /// The basic inequality holds on every subcurve.
    pub balanced: bool,
    /// Degree 1 on every exceptional component.
    pub exceptional_degrees_one: bool,
    /// Strict inequality off the strict exemption set.
    pub strict_inequalities: bool,
    /// Strict inequality off the stable exemption set.
    pub stable_inequalities: bool,
}

/// Per-subcurve quantities that do not depend on the multidegree.
#[derive(Debug, Clone)]
pub struct SubcurveTable {
    n: usize,
    two_g_minus_two: i64,
    omega: Vec<i64>,
    crossing: Vec<i64>,
    strict_exempt: Vec<bool>,
    stable_exempt: Vec<bool>,
    connected: Vec<bool>,
    exceptional: u64,
}

impl SubcurveTable {
    pub fn new(graph: &CurveGraph) -> Result<Self, BalanceError> {
        let g = genus_at_least_two(graph)?;
        let n = graph.vertex_count();
        if n > SCAN_MAX_VERTICES {
            return Err(BalanceError::TooManyComponents(n));
        }
        if n > SCAN_WARN_VERTICES {
            log::warn!("scanning 2^{n} subcurves");
        }
        let size = 1usize << n;
        let exceptional = graph.exceptional_locus().mask();
        // lengths between distinct components: all edges, and those with no
        // exceptional endpoint
        let mut between = vec![vec![0i64; n]; n];
        let mut plain = vec![vec![0i64; n]; n];
        for e in graph.edges() {
            let (a, b) = e.ends();
            if a == b {
                continue;
            }
            between[a][b] += e.length();
            between[b][a] += e.length();
            if exceptional >> a & 1 == 0 && exceptional >> b & 1 == 0 {
                plain[a][b] += e.length();
                plain[b][a] += e.length();
            }
        }
        let vertex_omega: Vec<i64> = (0..n).map(|v| graph.vertex_omega_degree(v)).collect();
        let mut omega = vec![0i64; size];
        let mut crossing = vec![0i64; size];
        let mut plain_crossing = vec![0i64; size];
        for mask in 1..size {
            let v = mask.trailing_zeros() as usize;
            let rest = mask & (mask - 1);
            let (mut to_rest, mut plain_to_rest, mut all, mut plain_all) = (0, 0, 0, 0);
            for u in 0..n {
                all += between[v][u];
                plain_all += plain[v][u];
                if rest >> u & 1 == 1 {
                    to_rest += between[v][u];
                    plain_to_rest += plain[v][u];
                }
            }
            omega[mask] = omega[rest] + vertex_omega[v];
            crossing[mask] = crossing[rest] + all - 2 * to_rest;
            plain_crossing[mask] = plain_crossing[rest] + plain_all - 2 * plain_to_rest;
        }
        let full = full_mask(n);
        let neighbours = graph.neighbour_masks();
        let strict_exempt = plain_crossing.iter().map(|&k| k == 0).collect();
        let stable_exempt = (0..size as u64)
            .map(|m| m & !exceptional == 0 || (full & !m) & !exceptional == 0)
            .collect();
        let connected = (0..size as u64).map(|m| mask_is_connected(&neighbours, m)).collect();
        Ok(SubcurveTable {
            n,
            two_g_minus_two: 2 * g - 2,
            omega,
            crossing,
            strict_exempt,
            stable_exempt,
            connected,
            exceptional,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn omega(&self, z: Subcurve) -> i64 {
        self.omega[z.mask() as usize]
    }

    pub fn crossing(&self, z: Subcurve) -> i64 {
        self.crossing[z.mask() as usize]
    }

    pub fn is_connected(&self, z: Subcurve) -> bool {
        self.connected[z.mask() as usize]
    }

    /// Single-vertex bounds; see [`degree_bounds`].
    pub fn vertex_bounds(&self, d: i64, v: usize) -> (i64, i64) {
        if self.n == 1 {
            return (d, d);
        }
        let mask = 1usize << v;
        let scale = 2 * self.two_g_minus_two;
        let centre = 2 * d * self.omega[mask];
        let half = self.two_g_minus_two * self.crossing[mask];
        let lo = -(-(centre - half)).div_euclid(scale);
        let hi = (centre + half).div_euclid(scale);
        (lo, hi)
    }

    /// Classifies a multidegree on the graph this table was built for.
    /// `scratch` must hold `2^n` entries and is overwritten.
    pub fn classify_with(&self, degrees: &[i64], scratch: &mut [i64]) -> BalanceReport {
        assert_eq!(degrees.len(), self.n, "multidegree length");
        let size = 1usize << self.n;
        let d: i64 = degrees.iter().sum();
        let scale = 2 * self.two_g_minus_two;
        scratch[0] = 0;
        for mask in 1..size {
            scratch[mask] = scratch[mask & (mask - 1)] + degrees[mask.trailing_zeros() as usize];
        }
        let mut overloaded = None;
        let mut first_tight_strict = None;
        let mut first_tight_stable = None;
        for mask in 1..size - 1 {
            let deviation = scale * scratch[mask] - 2 * d * self.omega[mask];
            let bound = self.two_g_minus_two * self.crossing[mask];
            match status(deviation, bound) {
                InequalityStatus::Fails => {
                    if deviation > 0 && overloaded.is_none() {
                        overloaded = Some(mask);
                    }
                }
                InequalityStatus::HoldsWithEquality => {
                    if !self.strict_exempt[mask] && first_tight_strict.is_none() {
                        first_tight_strict = Some(mask);
                    }
                    if !self.stable_exempt[mask] && first_tight_stable.is_none() {
                        first_tight_stable = Some(mask);
                    }
                }
                InequalityStatus::StrictlyHolds => {}
            }
        }
        let wrong_exceptional = (0..self.n).find(|&v| self.exceptional >> v & 1 == 1 && degrees[v] != 1);
        let balanced = overloaded.is_none();
        let exceptional_degrees_one = wrong_exceptional.is_none();
        let strict_inequalities = first_tight_strict.is_none() && balanced;
        let stable_inequalities = first_tight_stable.is_none() && balanced;
        let as_sub = |m: usize| Subcurve::from_mask(m as u64);
        let (flavor, witness) = if !balanced {
            (BalanceFlavor::NotBalanced, overloaded.map(as_sub))
        } else if !exceptional_degrees_one {
            (BalanceFlavor::Balanced, wrong_exceptional.map(Subcurve::single))
        } else if !strict_inequalities {
            (BalanceFlavor::ProperlyBalanced, first_tight_strict.map(as_sub))
        } else if !stable_inequalities {
            (BalanceFlavor::StrictlyBalanced, first_tight_stable.map(as_sub))
        } else {
            (BalanceFlavor::StablyBalanced, None)
        };
        BalanceReport {
            flavor,
            witness,
            balanced,
            exceptional_degrees_one,
            strict_inequalities,
            stable_inequalities,
        }
    }

    /// Basic inequality over connected subcurves only.
    pub fn balanced_on_connected(&self, degrees: &[i64]) -> bool {
        let size = 1usize << self.n;
        let d: i64 = degrees.iter().sum();
        let scale = 2 * self.two_g_minus_two;
        (1..size - 1).filter(|&m| self.connected[m]).all(|mask| {
            let deg: i64 = (0..self.n).filter(|&v| mask >> v & 1 == 1).map(|v| degrees[v]).sum();
            let deviation = scale * deg - 2 * d * self.omega[mask];
            deviation.abs() <= self.two_g_minus_two * self.crossing[mask]
        })
    }
}

/// Reusable classifier for many multidegrees on one graph.
#[derive(Debug, Clone)]
pub struct BalanceClassifier {
    table: SubcurveTable,
    scratch: Vec<i64>,
}

impl BalanceClassifier {
    pub fn new(graph: &CurveGraph) -> Result<Self, BalanceError> {
        let table = SubcurveTable::new(graph)?;
        let scratch = vec![0; 1 << table.n];
        Ok(BalanceClassifier { table, scratch })
    }

    pub fn table(&self) -> &SubcurveTable {
        &self.table
    }

    pub fn classify(&mut self, degrees: &[i64]) -> BalanceReport {
        self.table.classify_with(degrees, &mut self.scratch)
    }
}

/// The strongest flavor attained, with a witness for the first failed upgrade.
pub fn classify_multidegree(pc: &PolarizedCurve) -> Result<BalanceReport, BalanceError> {
    let mut classifier = BalanceClassifier::new(pc.graph())?;
    Ok(classifier.classify(pc.multidegree().degrees()))
}

/// Balancedness checked over connected subcurves only. Agrees with
/// `classify_multidegree(pc)?.balanced`.
pub fn is_balanced_on_connected(pc: &PolarizedCurve) -> Result<bool, BalanceError> {
    Ok(SubcurveTable::new(pc.graph())?.balanced_on_connected(pc.multidegree().degrees()))
}

/// Smallest integer interval holding every degree on `v` compatible with the
/// basic inequality for `Z = {v}`. A single-component curve has no proper
/// subcurve, so its only degree is `d`.
pub fn degree_bounds(graph: &CurveGraph, d: i64, v: usize) -> Result<(i64, i64), BalanceError> {
    let g = genus_at_least_two(graph)?;
    if v >= graph.vertex_count() {
        return Err(GraphError::SubcurveOutOfRange(v).into());
    }
    if graph.vertex_count() == 1 {
        return Ok((d, d));
    }
    let n2 = 2 * g - 2;
    let omega = graph.vertex_omega_degree(v);
    let k = graph.crossing_of_mask(1 << v);
    let centre = 2 * d * omega;
    let half = n2 * k;
    let scale = 2 * n2;
    Ok((-(-(centre - half)).div_euclid(scale), (centre + half).div_euclid(scale)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_elliptic() -> CurveGraph {
        CurveGraph::builder()
            .vertex("v1", 1)
            .vertex("v2", 1)
            .node("v1", "v2")
            .build()
            .unwrap()
    }

    fn cusp_blowup() -> CurveGraph {
        CurveGraph::builder()
            .vertex("host", 1)
            .exceptional("E")
            .tacnode("host", "E")
            .build()
            .unwrap()
    }

    fn pc(graph: CurveGraph, degrees: &[(&str, i64)]) -> PolarizedCurve {
        PolarizedCurve::with_degrees(graph, degrees).unwrap()
    }

    #[test]
    fn inequality_examples() {
        let g = two_elliptic();
        let z = g.subcurve(&["v1"]).unwrap();
        let c = basic_inequality(&pc(g.clone(), &[("v1", 4), ("v2", 5)]), z).unwrap();
        assert_eq!((c.deviation, c.bound), (-2, 2));
        assert_eq!(c.status, InequalityStatus::HoldsWithEquality);
        assert!(!c.strict_exempt && !c.stable_exempt);
        let c = basic_inequality(&pc(g.clone(), &[("v1", 5), ("v2", 5)]), z).unwrap();
        assert_eq!((c.deviation, c.status), (0, InequalityStatus::StrictlyHolds));
        let z2 = g.subcurve(&["v2"]).unwrap();
        let c = basic_inequality(&pc(g, &[("v1", 3), ("v2", 6)]), z2).unwrap();
        assert_eq!((c.deviation, c.status), (6, InequalityStatus::Fails));
    }

    #[test]
    fn flavor_examples() {
        let g = two_elliptic();
        let r = classify_multidegree(&pc(g.clone(), &[("v1", 5), ("v2", 5)])).unwrap();
        assert_eq!((r.flavor, r.witness), (BalanceFlavor::StablyBalanced, None));

        let r = classify_multidegree(&pc(g.clone(), &[("v1", 4), ("v2", 5)])).unwrap();
        assert_eq!(r.flavor, BalanceFlavor::ProperlyBalanced);
        assert_eq!(r.witness, Some(g.subcurve(&["v1"]).unwrap()));

        let r = classify_multidegree(&pc(g.clone(), &[("v1", 3), ("v2", 6)])).unwrap();
        assert_eq!(r.flavor, BalanceFlavor::NotBalanced);
        assert_eq!(r.witness, Some(g.subcurve(&["v2"]).unwrap()));

        let c = cusp_blowup();
        let r = classify_multidegree(&pc(c, &[("host", 9), ("E", 1)])).unwrap();
        assert_eq!(r.flavor, BalanceFlavor::StablyBalanced);
    }

    #[test]
    fn exceptional_degree_demotes_to_balanced() {
        let c = cusp_blowup();
        let r = classify_multidegree(&pc(c.clone(), &[("host", 10), ("E", 0)])).unwrap();
        assert_eq!(r.flavor, BalanceFlavor::Balanced);
        assert_eq!(r.witness, Some(c.subcurve(&["E"]).unwrap()));
    }

    #[test]
    fn bounds_examples() {
        let g = two_elliptic();
        assert_eq!(degree_bounds(&g, 9, 0), Ok((4, 5)));
        let smooth = CurveGraph::builder().vertex("x", 3).build().unwrap();
        assert_eq!(degree_bounds(&smooth, 17, 0), Ok((17, 17)));
        let c = cusp_blowup();
        let e = c.vertex_index("E").unwrap();
        assert_eq!(degree_bounds(&c, 10, e), Ok((-1, 1)));
        let table = SubcurveTable::new(&c).unwrap();
        assert_eq!(table.vertex_bounds(10, e), (-1, 1));
    }

    #[test]
    fn genus_below_two_is_rejected() {
        let e = CurveGraph::builder().vertex("x", 1).build().unwrap();
        let p = PolarizedCurve::new(e, Multidegree::new(vec![3])).unwrap();
        assert_eq!(classify_multidegree(&p), Err(BalanceError::GenusTooSmall(1)));
        assert_eq!(
            basic_inequality(&p, Subcurve::single(0)),
            Err(BalanceError::GenusTooSmall(1))
        );
    }

    #[test]
    fn polarized_curve_checks_inputs() {
        let g = two_elliptic();
        assert!(matches!(
            PolarizedCurve::new(g.clone(), Multidegree::new(vec![1])),
            Err(BalanceError::LengthMismatch { .. })
        ));
        assert_eq!(
            PolarizedCurve::with_degrees(g.clone(), &[("v1", 1)]),
            Err(BalanceError::MissingDegree("v2".into()))
        );
        let bad = CurveGraph::builder()
            .vertex("a", 2)
            .vertex("b", 1)
            .tacnode("a", "b")
            .build()
            .unwrap();
        assert!(matches!(
            PolarizedCurve::new(bad, Multidegree::new(vec![1, 1])),
            Err(BalanceError::Invalid(_))
        ));
    }

    #[test]
    fn flavor_parsing() {
        assert_eq!("stably".parse(), Ok(BalanceFlavor::StablyBalanced));
        assert_eq!("Strictly-Balanced".parse(), Ok(BalanceFlavor::StrictlyBalanced));
        assert_eq!("balanced".parse(), Ok(BalanceFlavor::Balanced));
        assert!("wobbly".parse::<BalanceFlavor>().is_err());
    }
}
