//! Instance families: hypercubes, trees, grids and products, staircases,
//! random subalgebras of weighted cubes, and the tripod wall space.

use std::collections::{BTreeSet, HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{MedianAlgebra, MedianTable, MAX_POINTS};
use crate::bitset::BitSet;
use crate::duality::{MeasuredWall, WallSpace};
use crate::error::{Error, Result};
use crate::halfspaces::HalfspaceSystem;
use crate::metric::FiniteMedianSpace;
use crate::rational::Rational;

pub const MAX_CUBE_DIMENSION: usize = 8;

/// A named family with its parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneratorSpec {
    Hypercube { k: usize, weights: Option<Vec<Rational>> },
    Path { n: usize, lengths: Option<Vec<Rational>> },
    Star { legs: usize },
    RandomTree { nodes: usize, seed: u64 },
    Grid { rows: usize, cols: usize },
    Staircase { k: usize },
    RandomSubalgebra { n: usize, m: usize, seed: u64 },
    Tripod,
}

/// Output of a generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generated {
    Space(FiniteMedianSpace),
    Walls(WallSpace),
}

impl GeneratorSpec {
    pub fn build(&self) -> Result<Generated> {
        Ok(match self {
            GeneratorSpec::Hypercube { k, weights } => Generated::Space(hypercube(*k, weights.as_deref())?),
            GeneratorSpec::Path { n, lengths } => Generated::Space(path(*n, lengths.as_deref())?),
            GeneratorSpec::Star { legs } => Generated::Space(star(*legs)?),
            GeneratorSpec::RandomTree { nodes, seed } => Generated::Space(random_tree(*nodes, *seed)?),
            GeneratorSpec::Grid { rows, cols } => Generated::Space(grid(*rows, *cols, None, None)?),
            GeneratorSpec::Staircase { k } => Generated::Space(staircase(*k)?),
            GeneratorSpec::RandomSubalgebra { n, m, seed } => Generated::Space(random_subalgebra(*n, *m, *seed)?),
            GeneratorSpec::Tripod => Generated::Walls(tripod()),
        })
    }
}

fn check_rank(space: &FiniteMedianSpace, expected: usize, family: &str) -> Result<()> {
    let rank = HalfspaceSystem::new(space.algebra()).rank();
    if rank != expected {
        return Err(Error::invariant("declared-rank", format!("{family} has rank {rank}, expected {expected}")));
    }
    Ok(())
}

/// Positive rational `p/q` with `1 ≤ p ≤ 6`, `1 ≤ q ≤ 4`.
pub fn random_weight(rng: &mut impl Rng) -> Rational {
    Rational::new(rng.gen_range(1..=6), rng.gen_range(1..=4))
}

pub fn random_weights(k: usize, seed: u64) -> Vec<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..k).map(|_| random_weight(&mut rng)).collect()
}

fn bit_label(mask: usize, k: usize) -> String {
    if k == 0 {
        return "pt".to_string();
    }
    (0..k).map(|i| if mask >> i & 1 == 1 { '1' } else { '0' }).collect()
}

/// Subalgebra of a weighted cube spanned by `masks` (already closed under
/// majority), with the weighted Hamming metric. Points are sorted by mask.
fn cube_subalgebra(mut masks: Vec<usize>, weights: &[Rational]) -> Result<FiniteMedianSpace> {
    let k = weights.len();
    masks.sort_unstable();
    masks.dedup();
    let mut index = vec![usize::MAX; 1 << k];
    for (i, &m) in masks.iter().enumerate() {
        index[m] = i;
    }
    let labels = masks.iter().map(|&m| bit_label(m, k)).collect();
    let table = MedianTable::from_fn(labels, |x, y, z| {
        let (a, b, c) = (masks[x], masks[y], masks[z]);
        index[(a & b) | (b & c) | (a & c)]
    })?;
    let algebra = MedianAlgebra::new(table)?;
    let dist = masks
        .iter()
        .map(|&a| masks.iter().map(|&b| (0..k).filter(|&i| (a ^ b) >> i & 1 == 1).map(|i| &weights[i]).sum()).collect())
        .collect();
    FiniteMedianSpace::new(algebra, dist)
}

/// `{0,1}^k` with coordinatewise majority and the `ℓ¹` metric weighting
/// coordinate `i` by `weights[i]` (default 1). Label character `i` is
/// coordinate `i`.
pub fn hypercube(k: usize, weights: Option<&[Rational]>) -> Result<FiniteMedianSpace> {
    if k > MAX_CUBE_DIMENSION {
        return Err(Error::guard("hypercube dimension", MAX_CUBE_DIMENSION, k));
    }
    let weights = match weights {
        Some(w) if w.len() != k => return Err(Error::Invalid(format!("{} weights for dimension {k}", w.len()))),
        Some(w) => w.to_vec(),
        None => vec![Rational::one(); k],
    };
    if weights.iter().any(|w| !w.is_positive()) {
        return Err(Error::Invalid("hypercube weights must be positive".into()));
    }
    let space = cube_subalgebra((0..1 << k).collect(), &weights)?;
    check_rank(&space, k, "hypercube")?;
    Ok(space)
}

/// Path metric of a weighted tree.
pub fn tree_from_edges(labels: Vec<String>, edges: &[(usize, usize, Rational)]) -> Result<FiniteMedianSpace> {
    let n = labels.len();
    if n == 0 {
        return Err(Error::Invalid("a tree needs at least one vertex".into()));
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut adj = vec![Vec::new(); n];
    for (i, (a, b, len)) in edges.iter().enumerate() {
        if *a >= n || *b >= n || a == b {
            return Err(Error::Invalid(format!("edge {i} is not between two distinct vertices")));
        }
        if !len.is_positive() {
            return Err(Error::Invalid(format!("edge {i} has length {len}, must be positive")));
        }
        let (ra, rb) = (root(&mut parent, *a), root(&mut parent, *b));
        if ra == rb {
            return Err(Error::Invalid(format!("edge {i} closes a cycle")));
        }
        parent[ra] = rb;
        adj[*a].push((*b, len.clone()));
        adj[*b].push((*a, len.clone()));
    }
    if edges.len() != n - 1 {
        return Err(Error::Invalid("the edges do not connect all vertices".into()));
    }
    let mut dist = vec![vec![Rational::zero(); n]; n];
    for (s, row) in dist.iter_mut().enumerate() {
        let mut seen = vec![false; n];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for (v, len) in &adj[u] {
                if !seen[*v] {
                    seen[*v] = true;
                    row[*v] = &row[u] + len;
                    queue.push_back(*v);
                }
            }
        }
    }
    let plain: Vec<(usize, usize)> = edges.iter().map(|(a, b, _)| (*a, *b)).collect();
    let algebra = MedianAlgebra::new(MedianTable::from_graph(labels, &plain)?)?;
    let space = FiniteMedianSpace::new(algebra, dist)?;
    check_rank(&space, usize::from(n > 1), "tree")?;
    Ok(space)
}

/// Path on points `0..n`, edge `i` of length `lengths[i]` (default 1).
pub fn path(n: usize, lengths: Option<&[Rational]>) -> Result<FiniteMedianSpace> {
    if n == 0 {
        return Err(Error::Invalid("a path needs at least one point".into()));
    }
    let lengths = match lengths {
        Some(l) if l.len() + 1 != n => return Err(Error::Invalid(format!("{} lengths for {n} points", l.len()))),
        Some(l) => l.to_vec(),
        None => vec![Rational::one(); n - 1],
    };
    let labels = (0..n).map(|i| i.to_string()).collect();
    let edges: Vec<_> = lengths.into_iter().enumerate().map(|(i, l)| (i, i + 1, l)).collect();
    tree_from_edges(labels, &edges)
}

/// Star with center `c` and unit legs to `l1..=l{legs}`.
pub fn star(legs: usize) -> Result<FiniteMedianSpace> {
    let labels = std::iter::once("c".to_string()).chain((1..=legs).map(|i| format!("l{i}"))).collect();
    let edges: Vec<_> = (1..=legs).map(|i| (0, i, Rational::one())).collect();
    tree_from_edges(labels, &edges)
}

/// Random tree on `nodes` vertices: vertex `i` hangs off a uniform earlier
/// vertex by an edge of random positive length.
pub fn random_tree(nodes: usize, seed: u64) -> Result<FiniteMedianSpace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels = (0..nodes).map(|i| format!("v{i}")).collect();
    let edges: Vec<_> = (1..nodes).map(|i| (rng.gen_range(0..i), i, random_weight(&mut rng))).collect();
    tree_from_edges(labels, &edges)
}

/// Coordinatewise median and `ℓ¹` sum metric; point `(i, j)` has index
/// `i * |X2| + j`. Checks that ranks add.
pub fn product(x1: &FiniteMedianSpace, x2: &FiniteMedianSpace) -> Result<FiniteMedianSpace> {
    let (n1, n2) = (x1.len(), x2.len());
    if n1 * n2 > MAX_POINTS {
        return Err(Error::guard("product size", MAX_POINTS, n1 * n2));
    }
    let labels = (0..n1 * n2).map(|p| format!("({},{})", x1.labels()[p / n2], x2.labels()[p % n2])).collect();
    let (a1, a2) = (x1.algebra(), x2.algebra());
    let table = MedianTable::from_fn(labels, |x, y, z| {
        a1.med(x / n2, y / n2, z / n2) * n2 + a2.med(x % n2, y % n2, z % n2)
    })?;
    let dist = (0..n1 * n2)
        .map(|p| (0..n1 * n2).map(|q| x1.dist(p / n2, q / n2) + x2.dist(p % n2, q % n2)).collect())
        .collect();
    let space = FiniteMedianSpace::new(MedianAlgebra::new(table)?, dist)?;
    let expected = HalfspaceSystem::new(a1).rank() + HalfspaceSystem::new(a2).rank();
    check_rank(&space, expected, "product")?;
    Ok(space)
}

/// `path(rows) × path(cols)`.
pub fn grid(rows: usize, cols: usize, row_lengths: Option<&[Rational]>, col_lengths: Option<&[Rational]>) -> Result<FiniteMedianSpace> {
    product(&path(rows, row_lengths)?, &path(cols, col_lengths)?)
}

/// Finite staircase: step `i` (for `i = 1..=k`) is the rectangle
/// `[0, 2^-i] × [-i, -(i-1)]`. Points are the median closure of the step
/// corners under the coordinatewise median of the plane, with the `ℓ¹`
/// metric; sorted top row first, then by `x`.
pub fn staircase(k: usize) -> Result<FiniteMedianSpace> {
    if k == 0 {
        return Err(Error::Invalid("a staircase needs at least one step".into()));
    }
    if k > 16 {
        return Err(Error::guard("staircase steps", 16, k));
    }
    let mut points: BTreeSet<(i64, Rational)> = BTreeSet::new();
    for i in 1..=k {
        let w = Rational::pow2_inv(i as u32);
        for y in [-(i as i64) + 1, -(i as i64)] {
            points.insert((-y, Rational::zero()));
            points.insert((-y, w.clone()));
        }
    }
    let mid = |a: &Rational, b: &Rational, c: &Rational| {
        let mut v = [a, b, c];
        v.sort();
        v[1].clone()
    };
    loop {
        let current: Vec<(i64, Rational)> = points.iter().cloned().collect();
        let mut grown = points.clone();
        for p in &current {
            for q in &current {
                for r in &current {
                    let mut ys = [p.0, q.0, r.0];
                    ys.sort();
                    grown.insert((ys[1], mid(&p.1, &q.1, &r.1)));
                }
            }
        }
        if grown.len() == points.len() {
            break;
        }
        points = grown;
    }
    let pts: Vec<(i64, Rational)> = points.into_iter().collect();
    let index: HashMap<&(i64, Rational), usize> = pts.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let labels = pts.iter().map(|(d, x)| format!("({x},{})", -d)).collect();
    let table = MedianTable::from_fn(labels, |a, b, c| {
        let (p, q, r) = (&pts[a], &pts[b], &pts[c]);
        let mut ys = [p.0, q.0, r.0];
        ys.sort();
        index[&(ys[1], mid(&p.1, &q.1, &r.1))]
    })?;
    let dist = pts
        .iter()
        .map(|p| pts.iter().map(|q| (&p.1 - &q.1).abs() + Rational::integer((p.0 - q.0).abs())).collect())
        .collect();
    let space = FiniteMedianSpace::new(MedianAlgebra::new(table)?, dist)?;
    check_rank(&space, 2, "staircase")?;
    Ok(space)
}

/// Median closure of `m` uniform random points of `{0,1}^n`, with random
/// positive coordinate weights; reproducible from `seed`.
pub fn random_subalgebra(n: usize, m: usize, seed: u64) -> Result<FiniteMedianSpace> {
    if n > 16 {
        return Err(Error::guard("cube dimension", 16, n));
    }
    if m == 0 || m > 1 << n {
        return Err(Error::Invalid(format!("need 1 ≤ m ≤ 2^{n}, got {m}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<Rational> = (0..n).map(|_| random_weight(&mut rng)).collect();
    let mut masks: BTreeSet<usize> = (0..m).map(|_| rng.gen_range(0..1usize << n)).collect();
    loop {
        let current: Vec<usize> = masks.iter().copied().collect();
        let mut grown = masks.clone();
        for (i, &a) in current.iter().enumerate() {
            for (j, &b) in current.iter().enumerate().skip(i + 1) {
                for &c in &current[j + 1..] {
                    grown.insert((a & b) | (b & c) | (a & c));
                }
            }
        }
        if grown.len() > MAX_POINTS {
            return Err(Error::guard("subalgebra size", MAX_POINTS, grown.len()));
        }
        if grown.len() == masks.len() {
            break;
        }
        masks = grown;
    }
    cube_subalgebra(masks.into_iter().collect(), &weights)
}

/// Three points `a, b, c` with the unit walls `{a|bc}`, `{b|ac}`, `{c|ab}`.
pub fn tripod() -> WallSpace {
    let labels = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
    let walls = (0..3)
        .map(|i| MeasuredWall {
            side: BitSet::singleton(3, i),
            weight: Rational::one(),
        })
        .collect();
    WallSpace::new(labels, walls).expect("tripod walls are valid")
}
