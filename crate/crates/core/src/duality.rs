//! Ultrafilters on pocsets, the double dual, the zero-completion and the
//! median space of a finite measured wall space.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::algebra::{MedianAlgebra, MedianTable};
use crate::bitset::{BitSet, PointId, PointSet};
use crate::error::{Error, Result};
use crate::halfspaces::{HalfspaceSystem, SideSelection};
use crate::metric::{wall_weights, FiniteMedianSpace};
use crate::rational::Rational;
use crate::report::ValidationReport;

pub const DEFAULT_WALL_GUARD: usize = 24;
pub const DEFAULT_POINT_GUARD: usize = 64;
pub const DEFAULT_CONVEX_SET_GUARD: usize = 200_000;

/// Largest algebra for which the zero-completion is also computed by
/// enumerating compatible tuples.
pub const TUPLE_CROSS_CHECK_POINTS: usize = 8;

/// A finite pocset whose elements come in pairs `2w`, `2w + 1` swapped by the
/// involution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbstractPocset {
    /// `up[a]` = `{b : a ≤ b}`
    up: Vec<BitSet>,
    /// `clash[a]` = `{b : a ≤ b*}`, the elements inconsistent with `a`
    clash: Vec<BitSet>,
}

impl AbstractPocset {
    /// Checks the partial order axioms, that the involution reverses order and
    /// that no element is comparable with its involute.
    pub fn new(up: Vec<BitSet>) -> Result<Self> {
        let n = up.len();
        if !n.is_multiple_of(2) || up.iter().any(|s| s.capacity() != n) {
            return Err(Error::Invalid("pocset relation has the wrong shape".into()));
        }
        let leq = |a: usize, b: usize| up[a].contains(b);
        for a in 0..n {
            if !leq(a, a) {
                return Err(Error::Invalid(format!("order is not reflexive at {a}")));
            }
            if leq(a, a ^ 1) || leq(a ^ 1, a) {
                return Err(Error::Invalid(format!("element {a} is comparable with its involute")));
            }
            for b in up[a].iter() {
                if a != b && leq(b, a) {
                    return Err(Error::Invalid(format!("order is not antisymmetric at ({a}, {b})")));
                }
                if !leq(b ^ 1, a ^ 1) {
                    return Err(Error::Invalid(format!("involution does not reverse {a} ≤ {b}")));
                }
                if !up[b].is_subset(&up[a]) {
                    return Err(Error::Invalid(format!("order is not transitive through ({a}, {b})")));
                }
            }
        }
        let clash = (0..n).map(|a| BitSet::from_indices(n, (0..n).filter(|&b| leq(a, b ^ 1)))).collect();
        Ok(AbstractPocset { up, clash })
    }

    /// Pocset of the given sides, ordered by inclusion; `sides[2w]` and
    /// `sides[2w + 1]` must be complementary.
    pub fn from_sides(sides: &[PointSet]) -> Result<Self> {
        let n = sides.len();
        let up = (0..n)
            .map(|a| BitSet::from_indices(n, (0..n).filter(|&b| sides[a].is_subset(&sides[b]))))
            .collect();
        Self::new(up)
    }

    pub fn from_system(system: &HalfspaceSystem) -> Result<Self> {
        let sides: Vec<PointSet> = system.halfspaces().iter().map(|h| h.side.clone()).collect();
        Self::from_sides(&sides)
    }

    pub fn len(&self) -> usize {
        self.up.len()
    }

    pub fn is_empty(&self) -> bool {
        self.up.is_empty()
    }

    pub fn n_walls(&self) -> usize {
        self.up.len() / 2
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.up[a].contains(b)
    }

    /// `a` and `b` can lie in a common ultrafilter: `a ≰ b*`.
    pub fn consistent(&self, a: usize, b: usize) -> bool {
        !self.clash[a].contains(b)
    }

    /// Every choice of one element per pair that is pairwise consistent,
    /// sorted. Refuses pocsets with more than `guard` pairs.
    pub fn all_ultrafilters(&self, guard: usize) -> Result<Vec<SideSelection>> {
        if self.n_walls() > guard {
            return Err(Error::guard("walls for ultrafilter enumeration", guard, self.n_walls()));
        }
        let mut out = Vec::new();
        let mut chosen = BitSet::new(self.len());
        let mut forbidden = BitSet::new(self.len());
        self.extend(0, &mut chosen, &mut forbidden, &mut out);
        out.sort();
        Ok(out)
    }

    fn extend(&self, wall: usize, chosen: &mut BitSet, forbidden: &mut BitSet, out: &mut Vec<SideSelection>) {
        if wall == self.n_walls() {
            out.push(SideSelection(chosen.clone()));
            return;
        }
        for a in [2 * wall, 2 * wall + 1] {
            if forbidden.contains(a) {
                continue;
            }
            let saved = forbidden.clone();
            chosen.insert(a);
            forbidden.union_with(&self.clash[a]);
            self.extend(wall + 1, chosen, forbidden, out);
            chosen.remove(a);
            *forbidden = saved;
        }
    }
}

fn majority_table(labels: Vec<String>, selections: &[SideSelection]) -> Result<MedianTable> {
    let index: HashMap<&BitSet, usize> = selections.iter().enumerate().map(|(i, s)| (&s.0, i)).collect();
    let n = selections.len();
    let mut entries = Vec::with_capacity(n * n * n);
    for x in selections {
        for y in selections {
            for z in selections {
                let m = BitSet::majority(&x.0, &y.0, &z.0);
                let i = index
                    .get(&m)
                    .ok_or_else(|| Error::invariant("majority-closed", format!("majority of {x:?}, {y:?}, {z:?} is not an ultrafilter")))?;
                entries.push(*i as u32);
            }
        }
    }
    MedianTable::new(labels, entries)
}

fn check_isomorphism(statement: &str, source: &MedianAlgebra, target: &MedianAlgebra, map: &[usize]) -> Result<()> {
    if source.len() != target.len() {
        return Err(Error::invariant(statement, format!("{} points map into {}", source.len(), target.len())));
    }
    let mut hit = vec![false; target.len()];
    for (x, &fx) in map.iter().enumerate() {
        if std::mem::replace(&mut hit[fx], true) {
            return Err(Error::invariant(statement, format!("point {x} collides with an earlier point")));
        }
    }
    let mut inverse = vec![0; target.len()];
    for (x, &fx) in map.iter().enumerate() {
        inverse[fx] = x;
    }
    for x in source.points() {
        for y in source.points() {
            for z in source.points() {
                if map[source.med(x, y, z)] != target.med(map[x], map[y], map[z]) {
                    return Err(Error::invariant(statement, format!("median of ({x}, {y}, {z}) not preserved")));
                }
                let (u, v, w) = (map[x], map[y], map[z]);
                if inverse[target.med(u, v, w)] != source.med(inverse[u], inverse[v], inverse[w]) {
                    return Err(Error::invariant(statement, format!("inverse does not preserve the median of ({u}, {v}, {w})")));
                }
            }
        }
    }
    Ok(())
}

/// All ultrafilters on the halfspace pocset with the majority median.
#[derive(Clone, Debug)]
pub struct DoubleDual {
    pub algebra: MedianAlgebra,
    pub ultrafilters: Vec<SideSelection>,
    /// `embedding[x]` is the index of `σ_x`.
    pub embedding: Vec<usize>,
}

/// The double dual of `m`, checked to be isomorphic to `m` through
/// `x ↦ σ_x`.
pub fn double_dual(m: &MedianAlgebra, guard: usize) -> Result<DoubleDual> {
    let system = HalfspaceSystem::new(m);
    let pocset = AbstractPocset::from_system(&system)?;
    let ultrafilters = pocset.all_ultrafilters(guard)?;
    let mut unnamed = 0;
    let labels = ultrafilters
        .iter()
        .map(|u| match system.principal_point(u) {
            Some(x) => m.label(x).to_string(),
            None => {
                unnamed += 1;
                format!("*{}", unnamed - 1)
            }
        })
        .collect();
    let algebra = MedianAlgebra::new(majority_table(labels, &ultrafilters)?)?;
    let embedding = m
        .points()
        .map(|x| {
            ultrafilters
                .binary_search(&SideSelection(system.sigma(x).clone()))
                .map_err(|_| Error::invariant("double-dual", format!("σ of point {x} is not an ultrafilter")))
        })
        .collect::<Result<Vec<_>>>()?;
    check_isomorphism("double-dual", m, &algebra, &embedding)?;
    Ok(DoubleDual {
        algebra,
        ultrafilters,
        embedding,
    })
}

/// Convex sets containing `a` in which any two points lie in a common
/// `I(a, z)` with `z` in the set; each is checked to admit gates and to be
/// `I(a, b)` for exactly one `b`. Sorted.
pub fn directed_gate_convex_sets(m: &MedianAlgebra, a: PointId, guard: usize) -> Result<Vec<PointSet>> {
    let start = m.set_of([a]);
    let mut seen: HashSet<PointSet> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(c) = queue.pop_front() {
        for p in m.points().filter(|&p| !c.contains(p)) {
            let mut grown = c.clone();
            grown.insert(p);
            let hull = m.convex_hull(&grown);
            if seen.insert(hull.clone()) {
                if seen.len() > guard {
                    return Err(Error::guard("convex sets", guard, seen.len()));
                }
                queue.push_back(hull);
            }
        }
    }
    let mut directed: Vec<PointSet> = seen
        .into_iter()
        .filter(|c| {
            c.iter().all(|x| {
                c.iter().all(|y| c.iter().any(|z| m.interval(a, z).contains(x) && m.interval(a, z).contains(y)))
            })
        })
        .collect();
    directed.sort();
    let mut hit = vec![false; m.len()];
    for c in &directed {
        m.gate_map(c)?;
        let b = m
            .points()
            .find(|&b| m.interval(a, b) == c)
            .ok_or_else(|| Error::invariant("recognising-zero-completion", format!("directed set {:?} is not an interval at {a}", m.names(c))))?;
        hit[b] = true;
    }
    if directed.len() != m.len() || hit.iter().any(|h| !h) {
        return Err(Error::invariant(
            "recognising-zero-completion",
            format!("{} directed sets for {} points", directed.len(), m.len()),
        ));
    }
    Ok(directed)
}

/// Points of the inverse limit of intervals under gate-projections, as
/// coordinate tuples indexed by [`intervals`](Self::intervals).
#[derive(Clone, Debug)]
pub struct ZeroCompletion {
    pub algebra: MedianAlgebra,
    pub intervals: Vec<PointSet>,
    pub tuples: Vec<Vec<PointId>>,
    pub embedding: Vec<usize>,
    pub rank: usize,
}

struct IntervalSystem {
    intervals: Vec<PointSet>,
    gates: Vec<Vec<PointId>>,
}

impl IntervalSystem {
    fn new(m: &MedianAlgebra) -> Result<Self> {
        let mut intervals: Vec<PointSet> = m.points().flat_map(|x| m.points().map(move |y| (x, y))).map(|(x, y)| m.interval(x, y).clone()).collect();
        intervals.sort();
        intervals.dedup();
        let gates = intervals.iter().map(|i| m.gate_map(i)).collect::<Result<_>>()?;
        Ok(IntervalSystem { intervals, gates })
    }

    fn tuple_of_point(&self, b: PointId) -> Vec<PointId> {
        self.gates.iter().map(|g| g[b]).collect()
    }

    /// `π_I(x_J) = x_I` whenever `I ⊆ J`.
    fn compatible(&self, tuple: &[PointId]) -> bool {
        (0..self.intervals.len()).all(|i| {
            (0..self.intervals.len()).all(|j| !self.intervals[i].is_subset(&self.intervals[j]) || self.gates[i][tuple[j]] == tuple[i])
        })
    }
}

/// The zero-completion, built from the directed convex sets at point 0: each
/// such `C` gives the tuple whose `I`-coordinate is the far endpoint of
/// `π_I(C)` as seen from `π_I(0)`. Asserts that the result is isomorphic to
/// `m`, that rank is preserved and that coordinate projections are the
/// gate-projections. For small algebras the tuples are also enumerated
/// directly from the inverse-limit condition.
pub fn zero_completion(m: &MedianAlgebra, point_guard: usize, set_guard: usize) -> Result<ZeroCompletion> {
    if m.len() > point_guard {
        return Err(Error::guard("points for zero-completion", point_guard, m.len()));
    }
    let sys = IntervalSystem::new(m)?;
    let a = 0;
    let directed = directed_gate_convex_sets(m, a, set_guard)?;
    let mut from_sets = Vec::with_capacity(directed.len());
    for c in &directed {
        let mut tuple = Vec::with_capacity(sys.intervals.len());
        for g in &sys.gates {
            let image = BitSet::from_indices(m.len(), c.iter().map(|x| g[x]));
            let base = g[a];
            let far = image
                .iter()
                .find(|&e| m.interval(base, e) == &image)
                .ok_or_else(|| Error::invariant("zero-completion", "projection of a directed set is not an interval"))?;
            tuple.push(far);
        }
        if !sys.compatible(&tuple) {
            return Err(Error::invariant("zero-completion", "tuple violates the inverse-limit condition"));
        }
        from_sets.push((c.clone(), tuple));
    }
    // order points of the completion by the point of `m` they come from
    from_sets.sort_by_key(|(c, _)| m.points().find(|&b| m.interval(a, b) == c));
    let tuples: Vec<Vec<PointId>> = from_sets.iter().map(|(_, t)| t.clone()).collect();
    let mut sorted = tuples.clone();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != tuples.len() {
        return Err(Error::invariant("zero-completion", "two directed sets give the same tuple"));
    }
    if m.len() <= TUPLE_CROSS_CHECK_POINTS {
        let enumerated = inverse_limit_tuples(m)?;
        if enumerated != sorted {
            return Err(Error::invariant(
                "zero-completion",
                format!("{} tuples from directed sets, {} from the inverse limit", tuples.len(), enumerated.len()),
            ));
        }
    }

    let index: HashMap<&Vec<PointId>, usize> = tuples.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let mut embedding = vec![usize::MAX; m.len()];
    for (c, tuple) in &from_sets {
        let b = m.points().find(|&b| m.interval(a, b) == c).unwrap();
        if *tuple != sys.tuple_of_point(b) {
            return Err(Error::invariant(
                "recognising-gate-projections",
                format!("coordinates of point {b} are not its gate-projections"),
            ));
        }
        embedding[b] = index[tuple];
    }
    let mut labels = vec![String::new(); tuples.len()];
    for b in m.points() {
        labels[embedding[b]] = m.label(b).to_string();
    }
    let n = tuples.len();
    let mut entries = Vec::with_capacity(n * n * n);
    for x in &tuples {
        for y in &tuples {
            for z in &tuples {
                let med: Vec<PointId> = (0..x.len()).map(|i| m.med(x[i], y[i], z[i])).collect();
                let i = index
                    .get(&med)
                    .ok_or_else(|| Error::invariant("zero-completion", "coordinatewise median leaves the completion"))?;
                entries.push(*i as u32);
            }
        }
    }
    let algebra = MedianAlgebra::new(MedianTable::new(labels, entries)?)?;
    check_isomorphism("zero-completion", m, &algebra, &embedding)?;
    let rank = HalfspaceSystem::new(&algebra).rank();
    let original = HalfspaceSystem::new(m).rank();
    if rank != original {
        return Err(Error::invariant("rank-of-zero-completion", format!("rank {rank} != {original}")));
    }
    Ok(ZeroCompletion {
        algebra,
        intervals: sys.intervals,
        tuples,
        embedding,
        rank,
    })
}

/// All tuples `(x_I)` with `x_I ∈ I` and `π_I(x_J) = x_I` for `I ⊆ J`, by
/// backtracking over intervals. Sorted.
pub fn inverse_limit_tuples(m: &MedianAlgebra) -> Result<Vec<Vec<PointId>>> {
    let sys = IntervalSystem::new(m)?;
    let k = sys.intervals.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(sys.intervals[i].count()));
    let mut tuple = vec![usize::MAX; k];
    let mut out = Vec::new();
    fn go(sys: &IntervalSystem, order: &[usize], depth: usize, tuple: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if depth == order.len() {
            out.push(tuple.clone());
            return;
        }
        let i = order[depth];
        for x in sys.intervals[i].iter() {
            let fits = order[..depth].iter().all(|&j| {
                let (ii, jj) = (&sys.intervals[i], &sys.intervals[j]);
                (!ii.is_subset(jj) || sys.gates[i][tuple[j]] == x) && (!jj.is_subset(ii) || sys.gates[j][x] == tuple[j])
            });
            if fits {
                tuple[i] = x;
                go(sys, order, depth + 1, tuple, out);
            }
        }
        tuple[i] = usize::MAX;
    }
    go(&sys, &order, 0, &mut tuple, &mut out);
    out.sort();
    Ok(out)
}

/// A wall of a [`WallSpace`]: one side (the other is its complement) and a
/// positive weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasuredWall {
    pub side: PointSet,
    pub weight: Rational,
}

/// A finite set with finitely many weighted bipartitions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WallSpace {
    labels: Vec<String>,
    walls: Vec<MeasuredWall>,
}

impl WallSpace {
    /// Rejects empty ground sets, repeated labels, walls with an empty side,
    /// repeated walls and nonpositive weights.
    pub fn new(labels: Vec<String>, walls: Vec<MeasuredWall>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::Invalid("a wall space needs at least one point".into()));
        }
        let mut names = HashSet::new();
        if let Some(dup) = labels.iter().find(|l| !names.insert(l.as_str())) {
            return Err(Error::Invalid(format!("point {dup:?} appears twice")));
        }
        let mut seen = HashSet::new();
        for (i, w) in walls.iter().enumerate() {
            if w.side.capacity() != n {
                return Err(Error::Invalid(format!("wall {i} is over a different point set")));
            }
            if w.side.is_empty() || w.side.count() == n {
                return Err(Error::Invalid(format!("wall {i} has an empty side")));
            }
            if !w.weight.is_positive() {
                return Err(Error::Invalid(format!("wall {i} has weight {}, must be positive", w.weight)));
            }
            let canonical = if w.side.contains(0) { w.side.complement() } else { w.side.clone() };
            if !seen.insert(canonical) {
                return Err(Error::Invalid(format!("wall {i} repeats an earlier wall")));
            }
        }
        Ok(WallSpace { labels, walls })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn walls(&self) -> &[MeasuredWall] {
        &self.walls
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Total weight of the walls separating `x` and `y`.
    pub fn pseudo_distance(&self, x: usize, y: usize) -> Rational {
        self.walls.iter().filter(|w| w.side.contains(x) != w.side.contains(y)).map(|w| &w.weight).sum()
    }

    /// Sides `2w` (containing point 0) and `2w + 1` of every wall.
    fn sides(&self) -> Vec<PointSet> {
        self.walls
            .iter()
            .flat_map(|w| {
                let (near, far) = if w.side.contains(0) { (w.side.clone(), w.side.complement()) } else { (w.side.complement(), w.side.clone()) };
                [near, far]
            })
            .collect()
    }
}

/// The median space of a wall space and the map sending each point to its
/// principal ultrafilter.
#[derive(Clone, Debug)]
pub struct Medianization {
    pub space: FiniteMedianSpace,
    pub ultrafilters: Vec<SideSelection>,
    pub map: Vec<PointId>,
}

/// All ultrafilters on the walls of `w` with distance the total weight of
/// walls on which two ultrafilters differ. Checks that distinct ultrafilters
/// are at positive distance and that the map preserves the wall
/// pseudo-metric.
pub fn medianize(w: &WallSpace, guard: usize) -> Result<Medianization> {
    let sides = w.sides();
    let pocset = AbstractPocset::from_sides(&sides)?;
    let ultrafilters = pocset.all_ultrafilters(guard)?;
    let n = ultrafilters.len();
    let distance = |u: &SideSelection, v: &SideSelection| -> Rational {
        w.walls.iter().enumerate().filter(|&(i, _)| u.contains(2 * i) != v.contains(2 * i)).map(|(_, wall)| &wall.weight).sum()
    };
    let dist: Vec<Vec<Rational>> = ultrafilters.iter().map(|u| ultrafilters.iter().map(|v| distance(u, v)).collect()).collect();
    for (i, row) in dist.iter().enumerate() {
        if let Some(j) = (i + 1..n).find(|&j| row[j].is_zero()) {
            return Err(Error::invariant("zero-distance-quotient", format!("ultrafilters {i} and {j} at distance 0")));
        }
    }
    let sigma = |x: usize| SideSelection(BitSet::from_indices(sides.len(), (0..sides.len()).filter(|&h| sides[h].contains(x))));
    let map = (0..w.len())
        .map(|x| {
            ultrafilters
                .binary_search(&sigma(x))
                .map_err(|_| Error::invariant("principal-ultrafilter", format!("σ of point {x} is not an ultrafilter")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut labels: Vec<Option<String>> = vec![None; n];
    for (x, &u) in map.iter().enumerate() {
        labels[u].get_or_insert_with(|| w.labels[x].clone());
    }
    let mut unnamed = 0;
    let labels = labels
        .into_iter()
        .map(|l| {
            l.unwrap_or_else(|| {
                unnamed += 1;
                format!("*{}", unnamed - 1)
            })
        })
        .collect();
    let algebra = MedianAlgebra::new(majority_table(labels, &ultrafilters)?)?;
    let space = FiniteMedianSpace::new(algebra, dist)?;
    for x in 0..w.len() {
        for y in 0..w.len() {
            if space.dist(map[x], map[y]) != &w.pseudo_distance(x, y) {
                return Err(Error::invariant("walls-to-median", format!("map does not preserve the distance of ({x}, {y})")));
            }
        }
    }
    Ok(Medianization { space, ultrafilters, map })
}

/// The measured wall space of a median space: its walls with the weights
/// recovered by [`wall_weights`].
pub fn wall_space_of(space: &FiniteMedianSpace) -> Result<WallSpace> {
    let system = HalfspaceSystem::new(space.algebra());
    let weights = wall_weights(space)?;
    let walls = system
        .walls()
        .iter()
        .zip(weights.0)
        .map(|(w, weight)| MeasuredWall {
            side: system.halfspace(w.far).side.clone(),
            weight,
        })
        .collect();
    WallSpace::new(space.labels().to_vec(), walls)
}

/// Checks that `X → 𝓜(X)` is a bijective isometry.
pub fn theorem_a_check(space: &FiniteMedianSpace, guard: usize) -> Result<ValidationReport> {
    let walls = wall_space_of(space)?;
    let med = medianize(&walls, guard)?;
    let mut report = ValidationReport::new();
    let n = space.len();
    let mut hit = vec![false; med.space.len()];
    for x in 0..n {
        if std::mem::replace(&mut hit[med.map[x]], true) {
            report.fail("injective", vec![x], "two points share an ultrafilter");
        }
    }
    if let Some(u) = hit.iter().position(|h| !h) {
        report.fail("surjective", vec![u], format!("ultrafilter {u} is not principal"));
    }
    'iso: for x in 0..n {
        for y in 0..n {
            if med.space.dist(med.map[x], med.map[y]) != space.dist(x, y) {
                report.fail("isometry", vec![x, y], format!("{} != {}", med.space.dist(med.map[x], med.map[y]), space.dist(x, y)));
                break 'iso;
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::fixtures::*;

    fn tripod() -> WallSpace {
        let labels: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let walls = (0..3)
            .map(|i| MeasuredWall {
                side: BitSet::singleton(3, i),
                weight: Rational::one(),
            })
            .collect();
        WallSpace::new(labels, walls).unwrap()
    }

    #[test]
    fn pocset_axioms_rejected() {
        let bad = vec![BitSet::from_indices(2, [0, 1]), BitSet::from_indices(2, [1])];
        assert!(AbstractPocset::new(bad).is_err());
        assert!(AbstractPocset::new(vec![BitSet::new(1)]).is_err());
    }

    #[test]
    fn ultrafilter_counts() {
        let empty = AbstractPocset::new(vec![]).unwrap();
        assert_eq!(empty.all_ultrafilters(24).unwrap().len(), 1);
        let p = AbstractPocset::from_sides(&tripod().sides()).unwrap();
        assert_eq!(p.all_ultrafilters(24).unwrap().len(), 4);
        for k in 0..=4 {
            let q = HalfspaceSystem::new(&cube(k));
            assert_eq!(AbstractPocset::from_system(&q).unwrap().all_ultrafilters(24).unwrap().len(), 1 << k);
        }
        assert!(matches!(p.all_ultrafilters(2), Err(Error::Guard { .. })));
    }

    #[test]
    fn double_duals() {
        let one = MedianAlgebra::from_fn(vec!["x".into()], |_, _, _| 0).unwrap();
        assert_eq!(double_dual(&one, 24).unwrap().algebra.len(), 1);
        for m in [cube(3), grid(3, 3), star(4)] {
            let d = double_dual(&m, 24).unwrap();
            assert_eq!(d.algebra.len(), m.len());
            assert_eq!(d.algebra.labels(), {
                let mut l = vec![String::new(); m.len()];
                for x in m.points() {
                    l[d.embedding[x]] = m.label(x).to_string();
                }
                l
            });
        }
    }

    #[test]
    fn directed_sets() {
        let one = MedianAlgebra::from_fn(vec!["x".into()], |_, _, _| 0).unwrap();
        assert_eq!(directed_gate_convex_sets(&one, 0, 100).unwrap(), vec![one.set_of([0])]);
        let q = cube(2);
        let sets = directed_gate_convex_sets(&q, 0, 100).unwrap();
        let mut expected: Vec<PointSet> = q.points().map(|b| q.interval(0, b).clone()).collect();
        expected.sort();
        assert_eq!(sets, expected);
        let p = path(3);
        let sets = directed_gate_convex_sets(&p, 0, 100).unwrap();
        assert_eq!(sets, vec![p.set_of([0]), p.set_of([0, 1]), p.set_of([0, 1, 2])]);
        assert!(matches!(directed_gate_convex_sets(&grid(3, 3), 0, 5), Err(Error::Guard { .. })));
    }

    #[test]
    fn zero_completions() {
        for m in [cube(2), cube(3), path(4), grid(2, 3), star(3)] {
            let z = zero_completion(&m, 64, 10_000).unwrap();
            assert_eq!(z.algebra.len(), m.len());
            assert_eq!(z.rank, HalfspaceSystem::new(&m).rank());
        }
        let q = cube(2);
        let z = zero_completion(&q, 64, 100).unwrap();
        assert_eq!(z.algebra.labels(), q.labels());
        assert_eq!(z.embedding, vec![0, 1, 2, 3]);
        assert!(matches!(zero_completion(&cube(3), 4, 100), Err(Error::Guard { .. })));
    }

    #[test]
    fn inverse_limit_matches_points() {
        let g = grid(2, 3);
        assert_eq!(inverse_limit_tuples(&g).unwrap().len(), 6);
    }

    #[test]
    fn tripod_medianization() {
        let m = medianize(&tripod(), 24).unwrap();
        assert_eq!(m.space.len(), 4);
        let center = m.space.algebra().find("*0").unwrap();
        for x in 0..3 {
            assert_eq!(m.space.dist(m.map[x], center), &Rational::one());
            for y in 0..3 {
                if x != y {
                    assert_eq!(m.space.dist(m.map[x], m.map[y]), &Rational::integer(2));
                }
            }
        }
    }

    #[test]
    fn trivial_wall_space() {
        let w = WallSpace::new(vec!["p".into(), "q".into()], vec![]).unwrap();
        let m = medianize(&w, 24).unwrap();
        assert_eq!(m.space.len(), 1);
        assert_eq!(m.map, vec![0, 0]);
    }

    #[test]
    fn wall_space_rejections() {
        let l = || vec!["a".to_string(), "b".to_string()];
        let wall = |s: &[usize], w: i64| MeasuredWall {
            side: BitSet::from_indices(2, s.iter().copied()),
            weight: Rational::integer(w),
        };
        assert!(WallSpace::new(l(), vec![wall(&[], 1)]).is_err());
        assert!(WallSpace::new(l(), vec![wall(&[0], 0)]).is_err());
        assert!(WallSpace::new(l(), vec![wall(&[0], 1), wall(&[1], 2)]).is_err());
        assert!(WallSpace::new(vec!["a".into(), "a".into()], vec![]).is_err());
    }

    #[test]
    fn square_walls_give_the_square() {
        let labels: Vec<String> = ["00", "01", "10", "11"].iter().map(|s| s.to_string()).collect();
        let walls = vec![
            MeasuredWall { side: BitSet::from_indices(4, [2, 3]), weight: Rational::one() },
            MeasuredWall { side: BitSet::from_indices(4, [1, 3]), weight: Rational::one() },
        ];
        let m = medianize(&WallSpace::new(labels, walls).unwrap(), 24).unwrap();
        assert_eq!(m.space.len(), 4);
        assert_eq!(m.space.diameter(), Rational::integer(2));
    }

    #[test]
    fn theorem_a_on_small_spaces() {
        use crate::metric::{metric_from_weights, WallWeighting};
        let q = metric_from_weights(&cube(3), &WallWeighting(vec![Rational::one(); 3])).unwrap();
        assert!(theorem_a_check(&q, 24).unwrap().is_ok());
        let p = metric_from_weights(&path(3), &WallWeighting(vec![Rational::one(), Rational::integer(5)])).unwrap();
        assert!(theorem_a_check(&p, 24).unwrap().is_ok());
    }
}
