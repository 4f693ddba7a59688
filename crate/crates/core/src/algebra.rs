//! Finite median algebras given by a total ternary table.
//!
//! A [`MedianTable`] is raw input and may be arbitrarily broken; [`validate`]
//! decides whether it is a median algebra. A [`MedianAlgebra`] is a table that
//! passed validation, together with its precomputed intervals.

use std::collections::{BTreeSet, VecDeque};

use crate::bitset::{BitSet, PointId, PointSet};
use crate::error::{Error, Result};
use crate::report::ValidationReport;

/// Largest point count accepted for a dense ternary table.
pub const MAX_POINTS: usize = 256;

/// A total ternary operation on `0..n`, stored densely. Entries are not
/// checked for range here; [`validate`] reports out-of-range entries.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MedianTable {
    labels: Vec<String>,
    entries: Vec<u32>,
}

impl MedianTable {
    pub fn new(labels: Vec<String>, entries: Vec<u32>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::Invalid("a median algebra needs at least one point".into()));
        }
        if n > MAX_POINTS {
            return Err(Error::guard("point count", MAX_POINTS, n));
        }
        if entries.len() != n * n * n {
            return Err(Error::Invalid(format!(
                "median table has {} entries, expected {}",
                entries.len(),
                n * n * n
            )));
        }
        Ok(MedianTable { labels, entries })
    }

    pub fn from_fn(labels: Vec<String>, f: impl Fn(usize, usize, usize) -> usize) -> Result<Self> {
        let n = labels.len();
        if n > MAX_POINTS {
            return Err(Error::guard("point count", MAX_POINTS, n));
        }
        let mut entries = Vec::with_capacity(n * n * n);
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    entries.push(f(x, y, z) as u32);
                }
            }
        }
        Self::new(labels, entries)
    }

    /// Median table of a graph, taking `m(x,y,z)` to be the unique vertex on
    /// geodesics between each pair of the three. Fails unless the graph is a
    /// connected median graph.
    pub fn from_graph(labels: Vec<String>, edges: &[(usize, usize)]) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::Invalid("a median algebra needs at least one point".into()));
        }
        if n > MAX_POINTS {
            return Err(Error::guard("point count", MAX_POINTS, n));
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n || a == b {
                return Err(Error::Invalid(format!("bad edge ({a}, {b})")));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        let dist = all_pairs_bfs(&adj);
        if dist.iter().any(|row| row.iter().any(|d| d.is_none())) {
            return Err(Error::Invalid("graph is disconnected".into()));
        }
        let d = |a: usize, b: usize| dist[a][b].unwrap();
        let between = |x: usize, y: usize| {
            BitSet::from_indices(n, (0..n).filter(|&z| d(x, z) + d(z, y) == d(x, y)))
        };
        let intervals: Vec<PointSet> = (0..n * n).map(|i| between(i / n, i % n)).collect();
        let mut entries = Vec::with_capacity(n * n * n);
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let mut s = intervals[x * n + y].intersection(&intervals[y * n + z]);
                    s.intersect_with(&intervals[x * n + z]);
                    if s.count() != 1 {
                        return Err(Error::Invalid(format!(
                            "not a median graph: vertices ({}, {}, {}) have {} medians",
                            labels[x],
                            labels[y],
                            labels[z],
                            s.count()
                        )));
                    }
                    entries.push(s.first().unwrap() as u32);
                }
            }
        }
        Self::new(labels, entries)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Raw entry; may be out of range on an unvalidated table.
    #[inline]
    pub fn raw(&self, x: usize, y: usize, z: usize) -> usize {
        let n = self.labels.len();
        self.entries[(x * n + y) * n + z] as usize
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }
}

fn all_pairs_bfs(adj: &[Vec<usize>]) -> Vec<Vec<Option<usize>>> {
    let n = adj.len();
    (0..n)
        .map(|s| {
            let mut dist = vec![None; n];
            dist[s] = Some(0);
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                let du = dist[u].unwrap();
                for &v in &adj[u] {
                    if dist[v].is_none() {
                        dist[v] = Some(du + 1);
                        queue.push_back(v);
                    }
                }
            }
            dist
        })
        .collect()
}

fn raw_is_convex(t: &MedianTable, c: &PointSet) -> bool {
    let n = t.len();
    c.iter().all(|x| {
        c.iter()
            .filter(|&y| y >= x)
            .all(|y| (0..n).all(|z| c.contains(t.raw(x, y, z))))
    })
}

/// Convex bipartitions generated by the 2-point intervals ("edges") of the
/// table: for each ordered edge `(a, b)`, the set `{z : m(a,b,z) = b}`.
/// Only candidates whose both sides are nonempty and convex are kept. On a
/// genuine median algebra this is every halfspace; the returned list is
/// sorted and duplicate-free.
pub(crate) fn edge_halfspaces(t: &MedianTable) -> Vec<PointSet> {
    let n = t.len();
    let mut found = BTreeSet::new();
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let is_edge = (0..n).all(|z| z == a || z == b || t.raw(a, b, z) != z);
            if !is_edge {
                continue;
            }
            let side = BitSet::from_indices(n, (0..n).filter(|&z| t.raw(a, b, z) == b));
            if found.contains(&side) {
                continue;
            }
            let other = side.complement();
            if side.is_empty() || other.is_empty() {
                continue;
            }
            if raw_is_convex(t, &side) && raw_is_convex(t, &other) {
                found.insert(other);
                found.insert(side);
            }
        }
    }
    found.into_iter().collect()
}

/// Checks that `t` is a median algebra.
///
/// Symmetry and absorption are checked directly. The remaining axioms are
/// checked against the convex bipartitions of the table: they must separate
/// every pair of points, and `m(x,y,z)` must lie in a halfspace exactly when
/// at least two of `x, y, z` do. Each axiom reports its lexicographically
/// first counterexample.
pub fn validate(t: &MedianTable) -> ValidationReport {
    let mut report = ValidationReport::new();
    let n = t.len();
    if n == 0 {
        report.fail("nonempty", vec![], "empty algebra");
        return report;
    }
    'malformed: for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let m = t.raw(x, y, z);
                if m >= n {
                    report.fail("malformed", vec![x, y, z], format!("entry {m} out of range"));
                    break 'malformed;
                }
            }
        }
    }
    if !report.is_ok() {
        return report;
    }

    'symmetry: for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let m = t.raw(x, y, z);
                let perms = [(x, z, y), (y, x, z), (y, z, x), (z, x, y), (z, y, x)];
                if let Some(&(a, b, c)) = perms.iter().find(|&&(a, b, c)| t.raw(a, b, c) != m) {
                    report.fail(
                        "symmetry",
                        vec![x, y, z],
                        format!("m({x},{y},{z}) = {m} but m({a},{b},{c}) = {}", t.raw(a, b, c)),
                    );
                    break 'symmetry;
                }
            }
        }
    }
    'absorption: for x in 0..n {
        for y in 0..n {
            if t.raw(x, x, y) != x {
                report.fail("absorption", vec![x, x, y], format!("m({x},{x},{y}) = {}", t.raw(x, x, y)));
                break 'absorption;
            }
        }
    }

    let halfspaces = edge_halfspaces(t);
    'separation: for x in 0..n {
        for y in x + 1..n {
            if !halfspaces.iter().any(|h| h.contains(x) != h.contains(y)) {
                report.fail("separation", vec![x, y], "no convex halfspace separates the pair");
                break 'separation;
            }
        }
    }

    let h = halfspaces.len();
    let sigma: Vec<BitSet> = (0..n)
        .map(|x| BitSet::from_indices(h, (0..h).filter(|&i| halfspaces[i].contains(x))))
        .collect();
    'majority: for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let m = t.raw(x, y, z);
                if !sigma[m].is_majority_of(&sigma[x], &sigma[y], &sigma[z]) {
                    let vote = BitSet::majority(&sigma[x], &sigma[y], &sigma[z]);
                    let bad = vote.symmetric_difference(&sigma[m]).first().unwrap();
                    report.fail(
                        "majority",
                        vec![x, y, z],
                        format!("halfspace {:?} disagrees with the majority vote", halfspaces[bad].to_vec()),
                    );
                    break 'majority;
                }
            }
        }
    }
    report
}

/// A validated finite median algebra.
#[derive(Clone, Debug)]
pub struct MedianAlgebra {
    table: MedianTable,
    intervals: Vec<PointSet>,
}

impl PartialEq for MedianAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.table == other.table
    }
}

impl Eq for MedianAlgebra {}

impl MedianAlgebra {
    pub fn new(table: MedianTable) -> Result<Self> {
        let report = validate(&table);
        if !report.is_ok() {
            return Err(Error::Validation(report));
        }
        Ok(Self::new_unchecked(table))
    }

    pub fn from_fn(labels: Vec<String>, f: impl Fn(usize, usize, usize) -> usize) -> Result<Self> {
        Self::new(MedianTable::from_fn(labels, f)?)
    }

    /// Wraps a table already known to be a median algebra.
    pub(crate) fn new_unchecked(table: MedianTable) -> Self {
        let n = table.len();
        let mut intervals = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                intervals.push(BitSet::from_indices(n, (0..n).filter(|&z| table.raw(x, y, z) == z)));
            }
        }
        MedianAlgebra { table, intervals }
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn table(&self) -> &MedianTable {
        &self.table
    }

    pub fn labels(&self) -> &[String] {
        self.table.labels()
    }

    pub fn label(&self, x: PointId) -> &str {
        &self.table.labels()[x]
    }

    pub fn find(&self, label: &str) -> Option<PointId> {
        self.labels().iter().position(|l| l == label)
    }

    pub fn points(&self) -> std::ops::Range<PointId> {
        0..self.len()
    }

    pub fn empty_set(&self) -> PointSet {
        BitSet::new(self.len())
    }

    pub fn full_set(&self) -> PointSet {
        BitSet::full(self.len())
    }

    pub fn set_of(&self, points: impl IntoIterator<Item = PointId>) -> PointSet {
        BitSet::from_indices(self.len(), points)
    }

    #[inline]
    pub fn med(&self, x: PointId, y: PointId, z: PointId) -> PointId {
        self.table.raw(x, y, z)
    }

    /// `I(x, y) = { z : m(x,y,z) = z }`.
    #[inline]
    pub fn interval(&self, x: PointId, y: PointId) -> &PointSet {
        &self.intervals[x * self.len() + y]
    }

    /// Pairs `a < b` with `I(a, b) = {a, b}`: the edges of the median graph.
    pub fn edges(&self) -> Vec<(PointId, PointId)> {
        let n = self.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if self.interval(a, b).count() == 2 {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// True iff `x_k ∈ I(x_i, x_j)` whenever `i < k < j`.
    pub fn is_geodesic(&self, seq: &[PointId]) -> bool {
        let len = seq.len();
        for i in 0..len {
            for j in i + 2..len {
                let iv = self.interval(seq[i], seq[j]);
                if !(i + 1..j).all(|k| iv.contains(seq[k])) {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_convex(&self, c: &PointSet) -> bool {
        c.iter()
            .all(|x| c.iter().filter(|&y| y > x).all(|y| self.interval(x, y).is_subset(c)))
    }

    /// Whether `c` is closed under the median (a subalgebra).
    pub fn is_subalgebra(&self, c: &PointSet) -> bool {
        c.iter().all(|x| {
            c.iter()
                .filter(|&y| y > x)
                .all(|y| c.iter().filter(|&z| z > y).all(|z| c.contains(self.med(x, y, z))))
        })
    }

    /// Smallest convex superset of `s`.
    pub fn convex_hull(&self, s: &PointSet) -> PointSet {
        let mut hull = s.clone();
        loop {
            let mut next = hull.clone();
            let members = hull.to_vec();
            for (i, &x) in members.iter().enumerate() {
                for &y in &members[i + 1..] {
                    next.union_with(self.interval(x, y));
                }
            }
            if next == hull {
                return hull;
            }
            hull = next;
        }
    }

    /// Smallest subset closed under the median that contains `s`.
    pub fn subalgebra_closure(&self, s: &PointSet) -> PointSet {
        let mut closed = s.clone();
        loop {
            let members = closed.to_vec();
            let mut next = closed.clone();
            for (i, &x) in members.iter().enumerate() {
                for (j, &y) in members.iter().enumerate().skip(i + 1) {
                    for &z in &members[j + 1..] {
                        next.insert(self.med(x, y, z));
                    }
                }
            }
            if next == closed {
                return closed;
            }
            closed = next;
        }
    }

    fn require_convex(&self, c: &PointSet, what: &str) -> Result<()> {
        if c.is_empty() {
            return Err(Error::EmptySet(what.to_string()));
        }
        if !self.is_convex(c) {
            return Err(Error::NotConvex(format!("{what} = {:?}", self.names(c))));
        }
        Ok(())
    }

    pub fn names(&self, c: &PointSet) -> Vec<&str> {
        c.iter().map(|x| self.label(x)).collect()
    }

    /// Gate of `x` in a convex set known to be nonempty and convex.
    fn gate_unchecked(&self, x: PointId, c: &PointSet) -> PointId {
        let mut candidates = c.clone();
        for z in c {
            candidates.intersect_with(self.interval(x, z));
        }
        debug_assert_eq!(candidates.count(), 1, "gate must be unique");
        candidates.first().expect("nonempty convex sets have gates")
    }

    /// The unique `y ∈ C` lying in `I(x, z)` for every `z ∈ C`.
    pub fn gate(&self, x: PointId, c: &PointSet) -> Result<PointId> {
        self.require_convex(c, "gate target")?;
        Ok(self.gate_unchecked(x, c))
    }

    /// Gate-projection onto `c`, as a map over all points.
    pub fn gate_map(&self, c: &PointSet) -> Result<Vec<PointId>> {
        self.require_convex(c, "gate target")?;
        Ok(self.points().map(|x| self.gate_unchecked(x, c)).collect())
    }

    /// Checks the gate-projection calculus for two convex sets: the
    /// composition identity `p1∘p2∘p1 = p1∘p2`, `p2(C1) = C1 ∩ C2` (and
    /// symmetrically) when the sets meet, and that both projections send
    /// intervals onto intervals.
    pub fn gate_projection_check(&self, c1: &PointSet, c2: &PointSet) -> Result<ValidationReport> {
        let p1 = self.gate_map(c1)?;
        let p2 = self.gate_map(c2)?;
        let mut report = ValidationReport::new();
        if let Some(x) = self.points().find(|&x| p1[p2[p1[x]]] != p1[p2[x]]) {
            report.fail("composition", vec![x], "p1(p2(p1(x))) != p1(p2(x))");
        }
        let meet = c1.intersection(c2);
        if !meet.is_empty() {
            for (proj, from, name) in [(&p2, c1, "p2(C1)"), (&p1, c2, "p1(C2)")] {
                let image = self.set_of(from.iter().map(|x| proj[x]));
                if image != meet {
                    report.fail("projection-of-meeting-set", image.to_vec(), format!("{name} != C1 ∩ C2"));
                }
            }
        }
        for (proj, name) in [(&p1, "p1"), (&p2, "p2")] {
            'pairs: for x in self.points() {
                for y in x + 1..self.len() {
                    let image = self.set_of(self.interval(x, y).iter().map(|z| proj[z]));
                    if &image != self.interval(proj[x], proj[y]) {
                        report.fail("intervals-to-intervals", vec![x, y], format!("{name}(I(x,y)) is not I({name}(x),{name}(y))"));
                        break 'pairs;
                    }
                }
            }
        }
        Ok(report)
    }

    /// A pair of gates `(x1, x2)`: `x2` is the gate in `C2` of the first point
    /// of `C1`, and `x1` the gate of `x2` in `C1`.
    pub fn pair_of_gates(&self, c1: &PointSet, c2: &PointSet) -> Result<(PointId, PointId)> {
        self.require_convex(c1, "C1")?;
        self.require_convex(c2, "C2")?;
        let y1 = c1.first().unwrap();
        let x2 = self.gate_unchecked(y1, c2);
        let x1 = self.gate_unchecked(x2, c1);
        if self.gate_unchecked(x1, c2) != x2 {
            return Err(Error::invariant("pair-of-gates", format!("gate of {x1} in C2 is not {x2}")));
        }
        Ok((x1, x2))
    }

    /// Whether `(z1, z2)` is a pair of gates for `(C1, C2)`; both sets must
    /// be convex.
    pub fn is_pair_of_gates(&self, z1: PointId, z2: PointId, c1: &PointSet, c2: &PointSet) -> bool {
        c1.contains(z1)
            && c2.contains(z2)
            && self.gate_unchecked(z2, c1) == z1
            && self.gate_unchecked(z1, c2) == z2
    }

    /// Helly property for a family of nonempty convex sets: pairwise meeting
    /// implies a common point.
    pub fn helly_check(&self, sets: &[PointSet]) -> Result<bool> {
        for (i, c) in sets.iter().enumerate() {
            self.require_convex(c, &format!("set {i}"))?;
        }
        let pairwise = sets
            .iter()
            .enumerate()
            .all(|(i, a)| sets[i + 1..].iter().all(|b| a.intersects(b)));
        if !pairwise {
            return Ok(true);
        }
        let mut common = self.full_set();
        for c in sets {
            common.intersect_with(c);
        }
        Ok(!common.is_empty())
    }

    /// The subalgebra on `c` with points renumbered in increasing order, and
    /// the map from new indices to old ones.
    pub fn induced(&self, c: &PointSet) -> Result<(MedianAlgebra, Vec<PointId>)> {
        if c.is_empty() {
            return Err(Error::EmptySet("induced subalgebra".into()));
        }
        if !self.is_subalgebra(c) {
            return Err(Error::Invalid("set is not closed under the median".into()));
        }
        let old: Vec<PointId> = c.to_vec();
        let mut new_of = vec![usize::MAX; self.len()];
        for (i, &x) in old.iter().enumerate() {
            new_of[x] = i;
        }
        let labels = old.iter().map(|&x| self.label(x).to_string()).collect();
        let table = MedianTable::from_fn(labels, |a, b, c| new_of[self.med(old[a], old[b], old[c])])?;
        Ok((MedianAlgebra::new_unchecked(table), old))
    }
}
