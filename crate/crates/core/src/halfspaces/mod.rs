//! Halfspaces, walls and the pocset structure of a finite median algebra.
//!
//! Walls are numbered canonically: wall `w` owns halfspaces `2w` (the side
//! containing point 0) and `2w + 1` (the other side), and walls are sorted by
//! their far side. Every selection of halfspaces is a [`SideSelection`], a
//! bitset over halfspace indices.

mod dilworth;

use std::fmt;

use crate::algebra::{edge_halfspaces, MedianAlgebra};
use crate::bitset::{BitSet, PointId, PointSet};
use crate::error::{Error, Result};

pub use dilworth::{min_chain_cover, ChainDecomposition};

/// A convex set with convex complement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Halfspace {
    pub side: PointSet,
    pub wall: usize,
    pub complement: usize,
}

/// An unordered complementary pair, stored as `(side containing point 0,
/// other side)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Wall {
    pub near: usize,
    pub far: usize,
}

/// A set of halfspace indices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SideSelection(pub BitSet);

impl SideSelection {
    pub fn empty(system: &HalfspaceSystem) -> Self {
        SideSelection(BitSet::new(system.len()))
    }

    pub fn from_indices(system: &HalfspaceSystem, idx: impl IntoIterator<Item = usize>) -> Self {
        SideSelection(BitSet::from_indices(system.len(), idx))
    }

    pub fn members(&self) -> &BitSet {
        &self.0
    }

    pub fn contains(&self, h: usize) -> bool {
        self.0.contains(h)
    }

    pub fn len(&self) -> usize {
        self.0.count()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Debug for SideSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SelectionKind {
    Inconsistent,
    PartialFilter,
    Filter,
    Ultrafilter,
}

impl SelectionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SelectionKind::Inconsistent => "inconsistent",
            SelectionKind::PartialFilter => "partial_filter",
            SelectionKind::Filter => "filter",
            SelectionKind::Ultrafilter => "ultrafilter",
        }
    }
}

/// All halfspaces of an algebra with their containment and transversality
/// relations.
#[derive(Clone, Debug)]
pub struct HalfspaceSystem {
    n_points: usize,
    halfspaces: Vec<Halfspace>,
    walls: Vec<Wall>,
    /// `supersets[h]` = `{k : h ⊆ k}`
    supersets: Vec<BitSet>,
    transverse: Vec<BitSet>,
    /// `sigma[x]` = halfspaces containing `x`
    sigma: Vec<BitSet>,
}

/// Result of restricting a halfspace system to a convex subset.
#[derive(Clone, Debug)]
pub struct Restriction {
    pub algebra: MedianAlgebra,
    pub system: HalfspaceSystem,
    /// `points[i]` is the ambient point behind point `i` of the subalgebra.
    pub points: Vec<PointId>,
    /// `(ambient halfspace, restricted halfspace)` for every ambient
    /// halfspace that cuts the subset.
    pub correspondence: Vec<(usize, usize)>,
}

impl HalfspaceSystem {
    pub fn new(algebra: &MedianAlgebra) -> Self {
        Self::from_sides(algebra.len(), edge_halfspaces(algebra.table()))
    }

    /// Builds the system from a complement-closed list of nonempty proper
    /// sides.
    fn from_sides(n_points: usize, sides: Vec<PointSet>) -> Self {
        let mut far_sides: Vec<PointSet> = sides.into_iter().filter(|s| !s.contains(0)).collect();
        far_sides.sort();
        far_sides.dedup();
        let mut halfspaces = Vec::with_capacity(2 * far_sides.len());
        let mut walls = Vec::with_capacity(far_sides.len());
        for (w, far) in far_sides.into_iter().enumerate() {
            halfspaces.push(Halfspace {
                side: far.complement(),
                wall: w,
                complement: 2 * w + 1,
            });
            halfspaces.push(Halfspace {
                side: far,
                wall: w,
                complement: 2 * w,
            });
            walls.push(Wall {
                near: 2 * w,
                far: 2 * w + 1,
            });
        }
        let h = halfspaces.len();
        let supersets = (0..h)
            .map(|i| BitSet::from_indices(h, (0..h).filter(|&j| halfspaces[i].side.is_subset(&halfspaces[j].side))))
            .collect();
        let transverse = (0..h)
            .map(|i| {
                BitSet::from_indices(
                    h,
                    (0..h).filter(|&j| {
                        let (a, b) = (&halfspaces[i].side, &halfspaces[j].side);
                        let (ac, bc) = (&halfspaces[halfspaces[i].complement].side, &halfspaces[halfspaces[j].complement].side);
                        a.intersects(b) && a.intersects(bc) && ac.intersects(b) && ac.intersects(bc)
                    }),
                )
            })
            .collect();
        let sigma = (0..n_points)
            .map(|x| BitSet::from_indices(h, (0..h).filter(|&i| halfspaces[i].side.contains(x))))
            .collect();
        HalfspaceSystem {
            n_points,
            halfspaces,
            walls,
            supersets,
            transverse,
            sigma,
        }
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// Number of halfspaces (twice the number of walls).
    pub fn len(&self) -> usize {
        self.halfspaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.halfspaces.is_empty()
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn halfspace(&self, h: usize) -> &Halfspace {
        &self.halfspaces[h]
    }

    pub fn walls(&self) -> &[Wall] {
        &self.walls
    }

    pub fn complement(&self, h: usize) -> usize {
        self.halfspaces[h].complement
    }

    /// `h ⊆ k`.
    pub fn is_subset(&self, h: usize, k: usize) -> bool {
        self.supersets[h].contains(k)
    }

    pub fn supersets(&self, h: usize) -> &BitSet {
        &self.supersets[h]
    }

    pub fn transverse(&self, h: usize, k: usize) -> bool {
        self.transverse[h].contains(k)
    }

    /// `σ_x`: halfspaces containing `x`.
    pub fn sigma(&self, x: PointId) -> &BitSet {
        &self.sigma[x]
    }

    /// `σ_C`: halfspaces containing all of `c`.
    pub fn sigma_of(&self, c: &PointSet) -> BitSet {
        self.separating(&BitSet::new(self.n_points), c)
    }

    /// `ℋ(A|B)`: halfspaces containing `B` and disjoint from `A`.
    pub fn separating(&self, a: &PointSet, b: &PointSet) -> BitSet {
        let h = self.len();
        BitSet::from_indices(
            h,
            (0..h).filter(|&i| {
                let side = &self.halfspaces[i].side;
                b.is_subset(side) && a.is_disjoint(side)
            }),
        )
    }

    /// `ℋ(x|y)`.
    pub fn separating_points(&self, x: PointId, y: PointId) -> BitSet {
        self.sigma[y].difference(&self.sigma[x])
    }

    /// Walls separating `x` and `y`.
    pub fn separating_walls(&self, x: PointId, y: PointId) -> Vec<usize> {
        self.separating_points(x, y).iter().map(|h| self.halfspaces[h].wall).collect()
    }

    /// Largest set of pairwise-transverse halfspaces.
    pub fn rank(&self) -> usize {
        let near: Vec<usize> = self.walls.iter().map(|w| w.near).collect();
        self.max_transverse_subset(&near).len()
    }

    /// Largest pairwise-transverse subset of `candidates`, lowest indices
    /// preferred on ties.
    pub fn max_transverse_subset(&self, candidates: &[usize]) -> Vec<usize> {
        let mut best = Vec::new();
        let mut current = Vec::new();
        let pool = BitSet::from_indices(self.len(), candidates.iter().copied());
        self.grow_clique(&mut current, pool, &mut best);
        best
    }

    fn grow_clique(&self, current: &mut Vec<usize>, pool: BitSet, best: &mut Vec<usize>) {
        if current.len() + pool.count() <= best.len() {
            if current.len() > best.len() {
                *best = current.clone();
            }
            return;
        }
        let mut pool = pool;
        while let Some(v) = pool.first() {
            if current.len() + pool.count() <= best.len() {
                break;
            }
            pool.remove(v);
            current.push(v);
            let next = pool.intersection(&self.transverse[v]);
            self.grow_clique(current, next, best);
            current.pop();
        }
        if current.len() > best.len() {
            *best = current.clone();
        }
    }

    /// Largest pairwise-transverse subset of `k`, which must contain a
    /// halfspace separating each pair of distinct points, in either
    /// direction. Complements preserve transversality, so the result equals
    /// [`rank`](Self::rank); a mismatch is reported as an invariant failure.
    pub fn rank_relative(&self, k: &BitSet) -> Result<usize> {
        for x in 0..self.n_points {
            for y in x + 1..self.n_points {
                if !self.separating_points(x, y).intersects(k) && !self.separating_points(y, x).intersects(k) {
                    return Err(Error::Invalid(format!("halfspace subset separates no side of ({x}, {y})")));
                }
            }
        }
        let r = self.max_transverse_subset(&k.to_vec()).len();
        let full = self.rank();
        if r != full {
            return Err(Error::invariant("rank-with-subset", format!("relative rank {r} != rank {full}")));
        }
        Ok(r)
    }

    /// Splits `σ_y \ σ_x = ℋ(x|y)` into the minimum number of chains under
    /// inclusion, together with an antichain of the same size certifying
    /// minimality. Empty when `x = y`.
    pub fn dilworth_decompose(&self, x: PointId, y: PointId) -> ChainDecomposition {
        let elements = self.separating_points(x, y).to_vec();
        min_chain_cover(&elements, |a, b| a != b && self.is_subset(a, b))
    }

    /// Every `j` with `h ⊆ j ⊆ k` for some `h, k ∈ s`.
    pub fn inseparable_closure(&self, s: &BitSet) -> BitSet {
        let mut out = BitSet::new(self.len());
        let members = s.to_vec();
        for &h in &members {
            for &k in &members {
                if self.is_subset(h, k) {
                    for j in self.supersets[h].iter() {
                        if self.is_subset(j, k) {
                            out.insert(j);
                        }
                    }
                }
            }
        }
        out
    }

    /// Kind of a selection: inconsistent if two chosen halfspaces are
    /// disjoint (in particular both sides of a wall); a filter if moreover
    /// every superset of a chosen halfspace has its wall decided; an
    /// ultrafilter if every wall is decided.
    pub fn classify(&self, s: &SideSelection) -> SelectionKind {
        let members = s.0.to_vec();
        for (i, &h) in members.iter().enumerate() {
            for &k in &members[i..] {
                if self.halfspaces[h].side.is_disjoint(&self.halfspaces[k].side) {
                    return SelectionKind::Inconsistent;
                }
            }
        }
        let decided: Vec<bool> = self
            .walls
            .iter()
            .map(|w| s.contains(w.near) || s.contains(w.far))
            .collect();
        if decided.iter().all(|&d| d) {
            return SelectionKind::Ultrafilter;
        }
        let upward_closed = members.iter().all(|&h| self.supersets[h].iter().all(|k| decided[self.halfspaces[k].wall]));
        if upward_closed {
            SelectionKind::Filter
        } else {
            SelectionKind::PartialFilter
        }
    }

    /// Extends a consistent selection to an ultrafilter, deciding walls in
    /// index order and preferring the side containing point 0.
    pub fn complete_to_ultrafilter(&self, s: &SideSelection) -> Result<SideSelection> {
        if self.classify(s) == SelectionKind::Inconsistent {
            return Err(Error::Invalid("selection is inconsistent".into()));
        }
        let mut chosen = s.0.clone();
        for w in &self.walls {
            if chosen.contains(w.near) || chosen.contains(w.far) {
                continue;
            }
            let fits = |h: usize| chosen.iter().all(|k| self.halfspaces[h].side.intersects(&self.halfspaces[k].side));
            if fits(w.near) {
                chosen.insert(w.near);
            } else if fits(w.far) {
                chosen.insert(w.far);
            } else {
                return Err(Error::invariant("ultrafilter-extension", format!("no side of wall {} fits", self.halfspaces[w.near].wall)));
            }
        }
        Ok(SideSelection(chosen))
    }

    /// The point whose `σ` equals the given ultrafilter, if any.
    pub fn principal_point(&self, s: &SideSelection) -> Option<PointId> {
        (0..self.n_points).find(|&x| self.sigma[x] == s.0)
    }

    /// Restricts the system to a convex subset and returns the
    /// correspondence `h ↦ h ∩ C` between ambient halfspaces cutting `C` and
    /// halfspaces of `C`. Checks that the map is a bijection, that the inverse
    /// is the gate-projection preimage, and that it preserves and reflects
    /// inclusion.
    pub fn restrict_to_convex(&self, algebra: &MedianAlgebra, c: &PointSet) -> Result<Restriction> {
        let gates = algebra.gate_map(c)?;
        let (sub, points) = algebra.induced(c)?;
        let system = HalfspaceSystem::new(&sub);
        let mut sub_index = vec![usize::MAX; self.n_points];
        for (i, &p) in points.iter().enumerate() {
            sub_index[p] = i;
        }
        let mut correspondence = Vec::new();
        let mut hit = vec![false; system.len()];
        for (h, hs) in self.halfspaces.iter().enumerate() {
            let trace = hs.side.intersection(c);
            if trace.is_empty() || &trace == c {
                continue;
            }
            let local = BitSet::from_indices(points.len(), trace.iter().map(|p| sub_index[p]));
            let k = system
                .halfspaces
                .iter()
                .position(|ks| ks.side == local)
                .ok_or_else(|| Error::invariant("walls-in-convex", format!("trace of halfspace {h} is not a halfspace of C")))?;
            if hit[k] {
                return Err(Error::invariant("walls-in-convex", format!("halfspace {k} of C has two preimages")));
            }
            hit[k] = true;
            let preimage = BitSet::from_indices(self.n_points, (0..self.n_points).filter(|&x| local.contains(sub_index[gates[x]])));
            if preimage != hs.side {
                return Err(Error::invariant("walls-in-convex", format!("gate preimage of the trace of {h} differs from {h}")));
            }
            correspondence.push((h, k));
        }
        if let Some(k) = hit.iter().position(|&b| !b) {
            return Err(Error::invariant("walls-in-convex", format!("halfspace {k} of C has no ambient preimage")));
        }
        for &(h1, k1) in &correspondence {
            for &(h2, k2) in &correspondence {
                if self.is_subset(h1, h2) != system.is_subset(k1, k2) {
                    return Err(Error::invariant("walls-in-convex-order", format!("inclusion of {h1} in {h2} not matched by {k1} in {k2}")));
                }
            }
        }
        Ok(Restriction {
            algebra: sub,
            system,
            points,
            correspondence,
        })
    }

    /// A pair of gates for `(C1, C2)` with the check `ℋ(C1|C2) = ℋ(x1|x2)`.
    pub fn pair_of_gates(&self, algebra: &MedianAlgebra, c1: &PointSet, c2: &PointSet) -> Result<(PointId, PointId)> {
        let (x1, x2) = algebra.pair_of_gates(c1, c2)?;
        let sets = self.separating(c1, c2);
        let points = self.separating_points(x1, x2);
        if sets != points {
            return Err(Error::invariant(
                "pair-of-gates-separation",
                format!("ℋ(C1|C2) = {:?} but ℋ({x1}|{x2}) = {:?}", sets.to_vec(), points.to_vec()),
            ));
        }
        Ok((x1, x2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::fixtures::*;

    #[test]
    fn counts() {
        let one = MedianAlgebra::from_fn(vec!["x".into()], |_, _, _| 0).unwrap();
        assert_eq!(HalfspaceSystem::new(&one).len(), 0);
        let p = HalfspaceSystem::new(&path(3));
        assert_eq!((p.len(), p.walls().len()), (4, 2));
        let q3 = HalfspaceSystem::new(&cube(3));
        assert_eq!((q3.len(), q3.walls().len()), (6, 3));
    }

    #[test]
    fn pocset_axioms() {
        let g = HalfspaceSystem::new(&grid(3, 4));
        for h in 0..g.len() {
            let hc = g.complement(h);
            assert_eq!(g.complement(hc), h);
            assert!(!g.is_subset(h, hc) && !g.is_subset(hc, h));
            for k in 0..g.len() {
                if g.is_subset(h, k) {
                    assert!(g.is_subset(g.complement(k), hc));
                }
            }
        }
    }

    #[test]
    fn separating_sets() {
        let alg = path(3);
        let p = HalfspaceSystem::new(&alg);
        let a = alg.set_of([0, 1]);
        assert!(p.separating(&a, &a).is_empty());
        let sep = p.separating(&alg.set_of([0]), &alg.set_of([2]));
        let sides: Vec<_> = sep.iter().map(|h| p.halfspace(h).side.to_vec()).collect();
        assert_eq!(sep.count(), 2);
        assert!(sides.contains(&vec![1, 2]) && sides.contains(&vec![2]));
        let q = cube(2);
        let qs = HalfspaceSystem::new(&q);
        let sep = qs.separating(&q.set_of([0b00]), &q.set_of([0b11]));
        assert_eq!(sep.count(), 2);
        for h in sep.iter() {
            assert!(qs.halfspace(h).side.contains(0b11));
        }
    }

    #[test]
    fn transversality() {
        let q = HalfspaceSystem::new(&cube(2));
        assert!(!q.transverse(0, 0));
        assert!(q.transverse(0, 2));
        let p = HalfspaceSystem::new(&path(3));
        assert!(!p.transverse(0, 2));
    }

    #[test]
    fn ranks() {
        for k in 0..=4 {
            assert_eq!(HalfspaceSystem::new(&cube(k)).rank(), k);
        }
        assert_eq!(HalfspaceSystem::new(&star(4)).rank(), 1);
        assert_eq!(HalfspaceSystem::new(&path(5)).rank(), 1);
        assert_eq!(HalfspaceSystem::new(&grid(3, 3)).rank(), 2);
    }

    #[test]
    fn relative_rank() {
        let q = HalfspaceSystem::new(&cube(2));
        assert_eq!(q.rank_relative(&BitSet::full(q.len())).unwrap(), 2);
        let near = BitSet::from_indices(q.len(), q.walls().iter().map(|w| w.near));
        assert_eq!(q.rank_relative(&near).unwrap(), 2);
        // both sides of one wall leave pairs across the other unseparated
        let one_wall = BitSet::from_indices(q.len(), [q.walls()[0].near, q.walls()[0].far]);
        assert!(q.rank_relative(&one_wall).is_err());
        let alg = grid(3, 3);
        let g = HalfspaceSystem::new(&alg);
        // outer cuts: sides that are a single row or column at the boundary, plus complements
        let outer = BitSet::from_indices(
            g.len(),
            (0..g.len()).filter(|&h| {
                let s = &g.halfspace(h).side;
                let c = &g.halfspace(g.complement(h)).side;
                s.count() == 3 || c.count() == 3
            }),
        );
        assert_eq!(outer.count(), 8);
        assert_eq!(g.rank_relative(&outer).unwrap(), 2);
    }

    #[test]
    fn dilworth() {
        let p = HalfspaceSystem::new(&path(2));
        let d = p.dilworth_decompose(0, 1);
        assert_eq!(d.chains, vec![vec![1]]);
        let g = HalfspaceSystem::new(&grid(3, 3));
        let d = g.dilworth_decompose(0, 8);
        assert_eq!(d.chains.len(), 2);
        assert!(d.chains.iter().all(|c| c.len() == 2));
        assert_eq!(d.antichain.len(), 2);
        let q = HalfspaceSystem::new(&cube(3));
        let d = q.dilworth_decompose(0, 7);
        assert_eq!(d.chains.len(), 3);
        assert!(d.chains.iter().all(|c| c.len() == 1));
    }

    #[test]
    fn inseparable() {
        let alg = path(4);
        let p = HalfspaceSystem::new(&alg);
        assert!(p.inseparable_closure(&BitSet::new(p.len())).is_empty());
        let find = |pts: &[usize]| (0..p.len()).find(|&h| p.halfspace(h).side == alg.set_of(pts.iter().copied())).unwrap();
        let s = BitSet::from_indices(p.len(), [find(&[3]), find(&[1, 2, 3])]);
        let closed = p.inseparable_closure(&s);
        assert_eq!(closed.count(), 3);
        assert!(closed.contains(find(&[2, 3])));
        let u = p.sigma(2).clone();
        assert_eq!(p.inseparable_closure(&u), u);
    }

    #[test]
    fn classification() {
        let alg = grid(2, 3);
        let g = HalfspaceSystem::new(&alg);
        for x in alg.points() {
            assert_eq!(g.classify(&SideSelection(g.sigma(x).clone())), SelectionKind::Ultrafilter);
        }
        let c = alg.set_of([0, 1]);
        assert_eq!(g.classify(&SideSelection(g.sigma_of(&c))), SelectionKind::Filter);
        let both = SideSelection::from_indices(&g, [0, 1]);
        assert_eq!(g.classify(&both), SelectionKind::Inconsistent);
        // a single side not upward closed: the smallest far side has supersets on other walls
        let smallest = (0..g.len()).min_by_key(|&h| g.halfspace(h).side.count()).unwrap();
        let kind = g.classify(&SideSelection::from_indices(&g, [smallest]));
        assert_eq!(kind, SelectionKind::PartialFilter);
    }

    #[test]
    fn completion() {
        let alg = grid(3, 3);
        let g = HalfspaceSystem::new(&alg);
        let u = SideSelection(g.sigma(4).clone());
        assert_eq!(g.complete_to_ultrafilter(&u).unwrap(), u);
        let from_empty = g.complete_to_ultrafilter(&SideSelection::empty(&g)).unwrap();
        assert_eq!(g.principal_point(&from_empty), Some(0));
        let c = alg.set_of([4, 5, 7, 8]);
        let done = g.complete_to_ultrafilter(&SideSelection(g.sigma_of(&c))).unwrap();
        assert!(c.contains(g.principal_point(&done).unwrap()));
        assert!(g.complete_to_ultrafilter(&SideSelection::from_indices(&g, [0, 1])).is_err());
    }

    #[test]
    fn restriction() {
        let alg = cube(3);
        let q = HalfspaceSystem::new(&alg);
        let r = q.restrict_to_convex(&alg, &alg.full_set()).unwrap();
        assert_eq!(r.correspondence.len(), q.len());
        let face = alg.set_of([0, 1, 2, 3]);
        let r = q.restrict_to_convex(&alg, &face).unwrap();
        assert_eq!(r.system.walls().len(), 2);
        assert_eq!(r.correspondence.len(), 4);
        let g = grid(3, 3);
        let gs = HalfspaceSystem::new(&g);
        let iv = g.interval(1, 5).clone();
        let r = gs.restrict_to_convex(&g, &iv).unwrap();
        let sep = gs.separating_points(1, 5);
        let walls: Vec<usize> = r.correspondence.iter().map(|&(h, _)| gs.halfspace(h).wall).collect();
        for h in sep.iter() {
            assert!(walls.contains(&gs.halfspace(h).wall));
        }
        assert_eq!(r.system.walls().len(), sep.count());
        assert!(gs.restrict_to_convex(&g, &g.set_of([0, 8])).is_err());
    }

    #[test]
    fn pair_of_gates_separation() {
        let alg = cube(3);
        let q = HalfspaceSystem::new(&alg);
        let bottom = alg.set_of([0, 1, 2, 3]);
        let top = alg.set_of([4, 5, 6, 7]);
        let (x1, x2) = q.pair_of_gates(&alg, &bottom, &top).unwrap();
        assert_eq!(q.separating_points(x1, x2).count(), 1);
    }

    #[test]
    fn sigma_majority() {
        let alg = grid(3, 3);
        let g = HalfspaceSystem::new(&alg);
        for x in alg.points() {
            for y in alg.points() {
                for z in alg.points() {
                    let m = alg.med(x, y, z);
                    assert_eq!(&BitSet::majority(g.sigma(x), g.sigma(y), g.sigma(z)), g.sigma(m));
                }
            }
        }
    }
}
