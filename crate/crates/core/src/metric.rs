//! Finite median metric spaces with exact rational distances.

use std::cmp::Ordering;

use num_traits::ToPrimitive;

use crate::algebra::{validate, MedianAlgebra, MedianTable};
use crate::bitset::{BitSet, PointId, PointSet};
use crate::error::{Error, Result};
use crate::halfspaces::HalfspaceSystem;
use crate::rational::Rational;
use crate::report::ValidationReport;

/// A median algebra together with a metric whose triple intervals meet in
/// exactly the median.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMedianSpace {
    algebra: MedianAlgebra,
    dist: Vec<Rational>,
}

/// A positive weight per wall, indexed like the walls of the algebra's
/// [`HalfspaceSystem`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WallWeighting(pub Vec<Rational>);

/// Coordinates for the points of an interval `I(x, y)` in `ℓ¹` of dimension
/// `chains.len()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct L1Embedding {
    pub base: (PointId, PointId),
    /// Chains of halfspaces of `ℋ(x|y)`, bottom to top.
    pub chains: Vec<Vec<usize>>,
    pub points: Vec<PointId>,
    pub coordinates: Vec<Vec<Rational>>,
}

/// Distance matrix for the `O(n³)` scans: machine integers over a common
/// denominator when every scaled entry fits in an `i64`, rationals otherwise.
struct Scan<'a> {
    dist: &'a [Vec<Rational>],
    scaled: Option<Vec<Vec<i128>>>,
}

impl<'a> Scan<'a> {
    fn new(dist: &'a [Vec<Rational>]) -> Self {
        Scan { dist, scaled: common_denominator(dist) }
    }

    /// Compares `d(x,z) + d(z,y)` with `d(x,y)`.
    fn detour(&self, x: usize, z: usize, y: usize) -> Ordering {
        match &self.scaled {
            Some(d) => (d[x][z] + d[z][y]).cmp(&d[x][y]),
            None => (&self.dist[x][z] + &self.dist[z][y]).cmp(&self.dist[x][y]),
        }
    }

    fn interval(&self, x: usize, y: usize) -> BitSet {
        let n = self.dist.len();
        BitSet::from_indices(n, (0..n).filter(|&z| self.detour(x, z, y) == Ordering::Equal))
    }
}

fn common_denominator(dist: &[Vec<Rational>]) -> Option<Vec<Vec<i128>>> {
    fn gcd(a: i128, b: i128) -> i128 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    let limit = i128::from(i64::MAX);
    let mut lcm: i128 = 1;
    for r in dist.iter().flatten() {
        let d = i128::from(r.denom().to_i64()?);
        lcm = lcm / gcd(lcm, d) * d;
        if lcm > limit {
            return None;
        }
    }
    dist.iter()
        .map(|row| {
            row.iter()
                .map(|r| {
                    let v = i128::from(r.numer().to_i64()?) * (lcm / i128::from(r.denom().to_i64()?));
                    (v.abs() <= limit).then_some(v)
                })
                .collect()
        })
        .collect()
}

/// Checks the metric axioms and that every triple of metric intervals meets
/// in exactly one point, then cross-validates the induced median table.
pub fn validate_median_metric(labels: &[String], dist: &[Vec<Rational>]) -> ValidationReport {
    checked_table(labels, dist).0
}

/// The validation report, and the median table when validation passed.
fn checked_table(labels: &[String], dist: &[Vec<Rational>]) -> (ValidationReport, Option<MedianTable>) {
    let mut report = ValidationReport::new();
    let n = labels.len();
    if n == 0 {
        report.fail("shape", vec![], "no points");
        return (report, None);
    }
    if dist.len() != n || dist.iter().any(|row| row.len() != n) {
        report.fail("shape", vec![], format!("distance matrix is not {n}×{n}"));
        return (report, None);
    }
    let pairs = || (0..n).flat_map(|x| (0..n).map(move |y| (x, y)));
    if let Some(x) = (0..n).find(|&x| !dist[x][x].is_zero()) {
        report.fail("zero-diagonal", vec![x], format!("d(x,x) = {}", dist[x][x]));
    }
    if let Some((x, y)) = pairs().find(|&(x, y)| dist[x][y] != dist[y][x]) {
        report.fail("symmetry", vec![x, y], format!("{} != {}", dist[x][y], dist[y][x]));
    }
    if let Some((x, y)) = pairs().find(|&(x, y)| x != y && !dist[x][y].is_positive()) {
        report.fail("positivity", vec![x, y], format!("d = {}", dist[x][y]));
    }
    let scan = Scan::new(dist);
    'triangle: for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if scan.detour(x, z, y) == Ordering::Less {
                    report.fail("triangle", vec![x, y, z], "d(x,z) + d(z,y) < d(x,y)");
                    break 'triangle;
                }
            }
        }
    }
    if !report.is_ok() {
        return (report, None);
    }
    match table_from_metric(labels, dist) {
        Err(f) => {
            report.merge(f);
            (report, None)
        }
        Ok(table) => {
            for f in validate(&table).failures {
                report.fail(&format!("median-algebra/{}", f.axiom), f.witness, f.detail);
            }
            let table = report.is_ok().then_some(table);
            (report, table)
        }
    }
}

/// Median table of a metric, `m(x,y,z)` being the unique point of
/// `I(x,y) ∩ I(y,z) ∩ I(z,x)`.
fn table_from_metric(labels: &[String], dist: &[Vec<Rational>]) -> std::result::Result<MedianTable, ValidationReport> {
    let n = labels.len();
    let scan = Scan::new(dist);
    let intervals: Vec<BitSet> = (0..n * n).map(|i| scan.interval(i / n, i % n)).collect();
    let mut entries = Vec::with_capacity(n * n * n);
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                match BitSet::meet3(&intervals[x * n + y], &intervals[y * n + z], &intervals[z * n + x]) {
                    (1, Some(m)) => entries.push(m as u32),
                    (count, _) => {
                        let mut r = ValidationReport::new();
                        r.fail("unique-median", vec![x, y, z], format!("{count} points in the triple intersection"));
                        return Err(r);
                    }
                }
            }
        }
    }
    MedianTable::new(labels.to_vec(), entries).map_err(|e| {
        let mut r = ValidationReport::new();
        r.fail("shape", vec![], e.to_string());
        r
    })
}

impl FiniteMedianSpace {
    /// Builds a space from a metric, deriving the median.
    pub fn from_metric(labels: Vec<String>, dist: Vec<Vec<Rational>>) -> Result<Self> {
        let (report, table) = checked_table(&labels, &dist);
        let Some(table) = table else {
            return Err(Error::Validation(report));
        };
        Ok(FiniteMedianSpace {
            algebra: MedianAlgebra::new_unchecked(table),
            dist: dist.into_iter().flatten().collect(),
        })
    }

    /// Pairs an algebra with a metric; the metric median must reproduce the
    /// algebra's median.
    pub fn new(algebra: MedianAlgebra, dist: Vec<Vec<Rational>>) -> Result<Self> {
        let space = Self::from_metric(algebra.labels().to_vec(), dist)?;
        if space.algebra != algebra {
            let n = algebra.len();
            let mut report = ValidationReport::new();
            'find: for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        if space.algebra.med(x, y, z) != algebra.med(x, y, z) {
                            report.fail("median-mismatch", vec![x, y, z], "metric median differs from the algebra");
                            break 'find;
                        }
                    }
                }
            }
            return Err(Error::Validation(report));
        }
        Ok(space)
    }

    pub fn algebra(&self) -> &MedianAlgebra {
        &self.algebra
    }

    pub fn len(&self) -> usize {
        self.algebra.len()
    }

    pub fn is_empty(&self) -> bool {
        self.algebra.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        self.algebra.labels()
    }

    pub fn dist(&self, x: PointId, y: PointId) -> &Rational {
        &self.dist[x * self.len() + y]
    }

    pub fn dist_matrix(&self) -> Vec<Vec<Rational>> {
        self.dist.chunks(self.len()).map(|r| r.to_vec()).collect()
    }

    pub fn diameter(&self) -> Rational {
        self.dist.iter().max().cloned().unwrap_or_default()
    }

    /// `min d(a, b)` over `a ∈ A`, `b ∈ B`; both sets nonempty.
    pub fn set_distance(&self, a: &PointSet, b: &PointSet) -> Result<Rational> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::EmptySet("set distance".into()));
        }
        Ok(a.iter().flat_map(|x| b.iter().map(move |y| (x, y))).map(|(x, y)| self.dist(x, y).clone()).min().unwrap())
    }
}

/// `d(x,y) := Σ μ(w)` over walls separating `x` and `y`.
pub fn metric_from_weights(algebra: &MedianAlgebra, weights: &WallWeighting) -> Result<FiniteMedianSpace> {
    let system = HalfspaceSystem::new(algebra);
    if weights.0.len() != system.walls().len() {
        return Err(Error::Invalid(format!("{} weights for {} walls", weights.0.len(), system.walls().len())));
    }
    if let Some(w) = weights.0.iter().position(|m| !m.is_positive()) {
        return Err(Error::Invalid(format!("weight of wall {w} is {}, must be positive", weights.0[w])));
    }
    let n = algebra.len();
    let dist = (0..n)
        .map(|x| (0..n).map(|y| system.separating_walls(x, y).iter().map(|&w| &weights.0[w]).sum()).collect())
        .collect();
    FiniteMedianSpace::new(algebra.clone(), dist)
}

/// Recovers wall weights: the weight of `{h, h*}` is the distance between a
/// pair of gates for `(h*, h)`. Checks `d(x,y) = Σ_{w ∈ 𝒲(x|y)} μ(w)` for
/// every pair.
pub fn wall_weights(space: &FiniteMedianSpace) -> Result<WallWeighting> {
    let algebra = space.algebra();
    let system = HalfspaceSystem::new(algebra);
    let mut mu = Vec::with_capacity(system.walls().len());
    for w in system.walls() {
        let near = &system.halfspace(w.near).side;
        let far = &system.halfspace(w.far).side;
        let (x1, x2) = system.pair_of_gates(algebra, near, far)?;
        mu.push(space.dist(x1, x2).clone());
    }
    for x in algebra.points() {
        for y in algebra.points() {
            let total: Rational = system.separating_walls(x, y).iter().map(|&w| &mu[w]).sum();
            if &total != space.dist(x, y) {
                return Err(Error::invariant(
                    "median-to-walls",
                    format!("d({x},{y}) = {} but separating walls weigh {total}", space.dist(x, y)),
                ));
            }
        }
    }
    Ok(WallWeighting(mu))
}

/// Embeds `I(x, y)` isometrically into `ℓ¹`, one coordinate per chain of a
/// minimum chain cover of `ℋ(x|y)`: `f_i(z)` is the weight of the part of
/// chain `i` separating `x` from `z`.
pub fn l1_embed_interval(space: &FiniteMedianSpace, system: &HalfspaceSystem, weights: &WallWeighting, x: PointId, y: PointId) -> Result<L1Embedding> {
    let algebra = space.algebra();
    let decomposition = system.dilworth_decompose(x, y);
    let points = algebra.interval(x, y).to_vec();
    let coordinates: Vec<Vec<Rational>> = points
        .iter()
        .map(|&z| {
            let sep = system.separating_points(x, z);
            decomposition
                .chains
                .iter()
                .map(|chain| chain.iter().filter(|&&h| sep.contains(h)).map(|&h| &weights.0[system.halfspace(h).wall]).sum())
                .collect()
        })
        .collect();
    for (i, &u) in points.iter().enumerate() {
        for (j, &v) in points.iter().enumerate() {
            let l1: Rational = coordinates[i].iter().zip(&coordinates[j]).map(|(a, b)| (a - b).abs()).sum();
            if &l1 != space.dist(u, v) {
                return Err(Error::invariant(
                    "intervals-are-euclidean",
                    format!("points {u}, {v}: ℓ¹ distance {l1} but d = {}", space.dist(u, v)),
                ));
            }
        }
    }
    Ok(L1Embedding {
        base: (x, y),
        chains: decomposition.chains,
        points,
        coordinates,
    })
}

/// For every interval `I(x,y)` and halfspaces `h ⊊ k` of it containing `y`,
/// checks `d(x, h) > d(x, k)`.
pub fn strict_distance_check(space: &FiniteMedianSpace, system: &HalfspaceSystem) -> ValidationReport {
    let mut report = ValidationReport::new();
    let algebra = space.algebra();
    for x in algebra.points() {
        for y in algebra.points() {
            let interval = algebra.interval(x, y);
            let sides: Vec<(usize, Rational)> = system
                .separating_points(x, y)
                .iter()
                .map(|h| {
                    let trace = system.halfspace(h).side.intersection(interval);
                    (h, trace.iter().map(|z| space.dist(x, z).clone()).min().unwrap())
                })
                .collect();
            for (h, dh) in &sides {
                for (k, dk) in &sides {
                    if h != k && system.is_subset(*h, *k) && dh <= dk {
                        report.fail(
                            "strictly-increasing-distance",
                            vec![x, y, *h, *k],
                            format!("d(x, h) = {dh}, d(x, k) = {dk}"),
                        );
                        return report;
                    }
                }
            }
        }
    }
    report
}

/// Over all `(z1, z2) ∈ C1 × C2`: `(z1, z2)` is a pair of gates iff
/// `d(z1, z2) = d(C1, C2)`. Disjoint sets must be at positive distance.
pub fn pair_of_gates_distance_check(space: &FiniteMedianSpace, c1: &PointSet, c2: &PointSet) -> Result<ValidationReport> {
    let algebra = space.algebra();
    for (c, name) in [(c1, "C1"), (c2, "C2")] {
        if c.is_empty() {
            return Err(Error::EmptySet(name.into()));
        }
        if !algebra.is_convex(c) {
            return Err(Error::NotConvex(name.into()));
        }
    }
    let mut report = ValidationReport::new();
    let d = space.set_distance(c1, c2)?;
    if c1.is_disjoint(c2) && !d.is_positive() {
        report.fail("disjoint-positive-distance", vec![], format!("d(C1, C2) = {d}"));
    }
    for z1 in c1.iter() {
        for z2 in c2.iter() {
            let gates = algebra.is_pair_of_gates(z1, z2, c1, c2);
            let minimal = space.dist(z1, z2) == &d;
            if gates != minimal {
                report.fail(
                    "pair-of-gates-distance",
                    vec![z1, z2],
                    format!("pair of gates: {gates}, d(z1,z2) = {}, d(C1,C2) = {d}", space.dist(z1, z2)),
                );
                return Ok(report);
            }
        }
    }
    Ok(report)
}

/// `d(x,y) = ν(ℋ(x|y))` where `ν(h) = ν(h*) = μ(w)`, counting halfspaces
/// rather than walls.
pub fn halfspace_measure_check(space: &FiniteMedianSpace, system: &HalfspaceSystem, weights: &WallWeighting) -> ValidationReport {
    let mut report = ValidationReport::new();
    for x in space.algebra().points() {
        for y in space.algebra().points() {
            let nu: Rational = system.separating_points(x, y).iter().map(|h| &weights.0[system.halfspace(h).wall]).sum();
            if &nu != space.dist(x, y) {
                report.fail("median-to-halfspaces", vec![x, y], format!("ν = {nu}, d = {}", space.dist(x, y)));
                return report;
            }
        }
    }
    report
}
