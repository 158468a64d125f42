//! Finite point-set topologies on the supports of a Pfaff sequence.
//!
//! Points are abstract labels (`A`, `F`, `H`, `K`, …), one per nonvanishing
//! element of the sequence. Subsets are bit sets over the carrier, so every
//! operator here is exact set arithmetic and all subsets can be enumerated.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("the carrier is empty")]
    EmptyCarrier,
    #[error("carrier of {0} points exceeds the 20-point enumeration limit")]
    CarrierTooLarge(usize),
    #[error("subset {0:#b} is not contained in the carrier")]
    NotASubset(u64),
    #[error("point map has {got} entries for a carrier of {expected} points")]
    MapArity { expected: usize, got: usize },
    #[error("point map sends point {point} outside the target carrier")]
    MapOutOfRange { point: usize },
}

/// Largest carrier for which all subsets are enumerated.
pub const MAX_CARRIER: usize = 20;

/// A subset of the carrier, bit `i` standing for point `i`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PointSet(pub u64);

impl PointSet {
    pub const EMPTY: PointSet = PointSet(0);

    pub fn singleton(i: usize) -> Self {
        PointSet(1 << i)
    }

    pub fn full(n: usize) -> Self {
        PointSet(if n >= 64 { u64::MAX } else { (1u64 << n) - 1 })
    }

    pub fn from_points<I: IntoIterator<Item = usize>>(points: I) -> Self {
        PointSet(points.into_iter().fold(0, |m, i| m | (1 << i)))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn union(self, o: PointSet) -> Self {
        PointSet(self.0 | o.0)
    }

    pub fn intersection(self, o: PointSet) -> Self {
        PointSet(self.0 & o.0)
    }

    pub fn difference(self, o: PointSet) -> Self {
        PointSet(self.0 & !o.0)
    }

    pub fn is_subset(self, o: PointSet) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn points(self) -> impl Iterator<Item = usize> {
        let mut m = self.0;
        std::iter::from_fn(move || {
            if m == 0 {
                return None;
            }
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        })
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.points()).finish()
    }
}

/// Limit points, interior, boundary and closure of one subset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TopoOperators {
    pub limit_points: PointSet,
    pub interior: PointSet,
    pub boundary: PointSet,
    pub closure: PointSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteTopology {
    labels: Vec<String>,
    basis: Vec<PointSet>,
    opens: Vec<PointSet>,
    d_map: Vec<PointSet>,
}

impl FiniteTopology {
    /// Topology generated by `basis` under arbitrary unions, plus ∅ and the
    /// carrier. `d_map[i]` is the exterior-derivative image of point `i`.
    pub fn from_basis(labels: Vec<String>, basis: Vec<PointSet>, d_map: Vec<PointSet>) -> Result<Self, TopologyError> {
        let n = labels.len();
        if n == 0 {
            return Err(TopologyError::EmptyCarrier);
        }
        if n > MAX_CARRIER {
            return Err(TopologyError::CarrierTooLarge(n));
        }
        let carrier = PointSet::full(n);
        for s in basis.iter().chain(&d_map) {
            if !s.is_subset(carrier) {
                return Err(TopologyError::NotASubset(s.0));
            }
        }
        if d_map.len() != n {
            return Err(TopologyError::MapArity { expected: n, got: d_map.len() });
        }
        let mut opens = vec![PointSet::EMPTY, carrier];
        for &b in &basis {
            if b.is_empty() {
                continue;
            }
            let unions: Vec<PointSet> = opens.iter().map(|o| o.union(b)).collect();
            opens.push(b);
            opens.extend(unions);
            opens.sort();
            opens.dedup();
        }
        Ok(FiniteTopology { labels, basis, opens, d_map })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn carrier(&self) -> PointSet {
        PointSet::full(self.labels.len())
    }

    pub fn basis(&self) -> &[PointSet] {
        &self.basis
    }

    pub fn opens(&self) -> &[PointSet] {
        &self.opens
    }

    pub fn d_map(&self) -> &[PointSet] {
        &self.d_map
    }

    pub fn point(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Subset from labels; unknown labels yield `None`.
    pub fn set(&self, labels: &[&str]) -> Option<PointSet> {
        labels
            .iter()
            .map(|l| self.point(l))
            .collect::<Option<Vec<_>>>()
            .map(PointSet::from_points)
    }

    /// Complements of the open sets, sorted.
    pub fn closeds(&self) -> Vec<PointSet> {
        let carrier = self.carrier();
        let mut c: Vec<PointSet> = self.opens.iter().map(|o| carrier.difference(*o)).collect();
        c.sort();
        c
    }

    pub fn is_open(&self, s: PointSet) -> bool {
        self.opens.binary_search(&s).is_ok()
    }

    pub fn is_closed(&self, s: PointSet) -> bool {
        self.is_open(self.carrier().difference(s))
    }

    /// All subsets of the carrier in increasing bit order.
    pub fn subsets(&self) -> impl Iterator<Item = PointSet> {
        (0..=self.carrier().0).map(PointSet)
    }

    fn check_subset(&self, s: PointSet) -> Result<(), TopologyError> {
        if s.is_subset(self.carrier()) {
            Ok(())
        } else {
            Err(TopologyError::NotASubset(s.0))
        }
    }

    /// `p` is a limit point of `s` iff every open set containing `p` meets
    /// `s` in a point other than `p`.
    pub fn limit_points(&self, s: PointSet) -> Result<PointSet, TopologyError> {
        self.check_subset(s)?;
        let limit = self.carrier().points().filter(|&p| {
            let others = s.difference(PointSet::singleton(p));
            self.opens
                .iter()
                .filter(|o| o.contains(p))
                .all(|o| !o.intersection(others).is_empty())
        });
        Ok(PointSet::from_points(limit))
    }

    pub fn interior(&self, s: PointSet) -> Result<PointSet, TopologyError> {
        self.check_subset(s)?;
        Ok(self
            .opens
            .iter()
            .filter(|o| o.is_subset(s))
            .fold(PointSet::EMPTY, |acc, o| acc.union(*o)))
    }

    pub fn closure(&self, s: PointSet) -> Result<PointSet, TopologyError> {
        Ok(s.union(self.limit_points(s)?))
    }

    pub fn operators(&self, s: PointSet) -> Result<TopoOperators, TopologyError> {
        let limit_points = self.limit_points(s)?;
        let interior = self.interior(s)?;
        let closure = s.union(limit_points);
        Ok(TopoOperators { limit_points, interior, boundary: closure.difference(interior), closure })
    }

    /// Union of the derivative images of the points of `s`.
    pub fn d_image(&self, s: PointSet) -> PointSet {
        s.points().fold(PointSet::EMPTY, |acc, p| acc.union(self.d_map[p]))
    }

    /// Whether the limit set of every subset equals its derivative image.
    pub fn verify_d_is_limit_operator(&self) -> bool {
        self.subsets()
            .all(|s| self.limit_points(s).map(|l| l == self.d_image(s)).unwrap_or(false))
    }

    /// No proper nonempty subset is both open and closed.
    pub fn is_connected(&self) -> bool {
        let carrier = self.carrier();
        !self
            .opens
            .iter()
            .any(|&o| !o.is_empty() && o != carrier && self.is_closed(o))
    }

    /// Proper nonempty clopen subsets.
    pub fn clopen_sets(&self) -> Vec<PointSet> {
        let carrier = self.carrier();
        self.opens
            .iter()
            .copied()
            .filter(|&o| !o.is_empty() && o != carrier && self.is_closed(o))
            .collect()
    }

    /// Whether pairwise intersections of open sets are open.
    pub fn closed_under_intersection(&self) -> bool {
        self.opens
            .iter()
            .all(|a| self.opens.iter().all(|b| self.is_open(a.intersection(*b))))
    }

    /// Renders a subset with `∪`, `∅` for the empty set and `X` for the carrier.
    pub fn render(&self, s: PointSet) -> String {
        if s.is_empty() {
            return "∅".to_string();
        }
        if s == self.carrier() && self.len() > 1 {
            return "X".to_string();
        }
        s.points().map(|p| self.labels[p].as_str()).collect::<Vec<_>>().join("∪")
    }

    /// One row per subset: limit points, interior, boundary, closure.
    pub fn table(&self) -> Vec<TableRow> {
        self.subsets()
            .map(|s| {
                let ops = self.operators(s).expect("enumerated subsets lie in the carrier");
                TableRow {
                    subset: s,
                    limit_points: self.limit_points(s).expect("subset of carrier"),
                    interior: ops.interior,
                    boundary: ops.boundary,
                    closure: ops.closure,
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableRow {
    pub subset: PointSet,
    pub limit_points: PointSet,
    pub interior: PointSet,
    pub boundary: PointSet,
    pub closure: PointSet,
}

/// A [`TableRow`] with sets rendered as label strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RenderedRow {
    pub subset: String,
    pub limit_points: String,
    pub interior: String,
    pub boundary: String,
    pub closure: String,
}

impl FiniteTopology {
    pub fn rendered_table(&self) -> Vec<RenderedRow> {
        self.table()
            .into_iter()
            .map(|r| RenderedRow {
                subset: self.render(r.subset),
                limit_points: self.render(r.limit_points),
                interior: self.render(r.interior),
                boundary: self.render(r.boundary),
                closure: self.render(r.closure),
            })
            .collect()
    }
}

/// Labels of the Pfaff ladder: `A, F, H, K`, then `P5, P6, …`.
pub fn ladder_label(index: usize) -> String {
    match index {
        0 => "A".into(),
        1 => "F".into(),
        2 => "H".into(),
        3 => "K".into(),
        k => format!("P{}", k + 1),
    }
}

/// Cartan topology on the first `count` ladder points: basis
/// `{P0, P0∪P1, P2, P2∪P3, …}` restricted to the carrier, with derivative map
/// `P_{2j} ↦ P_{2j+1}` and odd points mapping to ∅.
pub fn cartan_topology(count: usize) -> Result<FiniteTopology, TopologyError> {
    if count == 0 {
        return Err(TopologyError::EmptyCarrier);
    }
    let labels: Vec<String> = (0..count).map(ladder_label).collect();
    let carrier = PointSet::full(count);
    let mut basis = Vec::new();
    let mut d_map = vec![PointSet::EMPTY; count];
    for even in (0..count).step_by(2) {
        let pair = PointSet::from_points([even, even + 1]).intersection(carrier);
        basis.push(PointSet::singleton(even));
        basis.push(pair);
        if even + 1 < count {
            d_map[even] = PointSet::singleton(even + 1);
        }
    }
    basis.dedup();
    FiniteTopology::from_basis(labels, basis, d_map)
}

/// Closure commutation: `f[cl(s)] ⊆ cl(f[s])` for every subset `s` of `src`.
pub fn map_continuous(src: &FiniteTopology, dst: &FiniteTopology, f: &[usize]) -> Result<bool, TopologyError> {
    if f.len() != src.len() {
        return Err(TopologyError::MapArity { expected: src.len(), got: f.len() });
    }
    if let Some(point) = f.iter().position(|&q| q >= dst.len()) {
        return Err(TopologyError::MapOutOfRange { point });
    }
    let image = |s: PointSet| PointSet::from_points(s.points().map(|p| f[p]));
    for s in src.subsets() {
        let lhs = image(src.closure(s)?);
        let rhs = dst.closure(image(s))?;
        if !lhs.is_subset(rhs) {
            return Ok(false);
        }
    }
    Ok(true)
}
