//! Brute-force oracles shared by the integration tests. None of them call the
//! library's algorithms; they work from the raw median table or distances.

#![allow(dead_code)]

use medianlab::duality::{medianize, DEFAULT_WALL_GUARD};
use medianlab::harness::{default_corpus, Instance, InstanceData, DEFAULT_SEED};
use medianlab::{FiniteMedianSpace, MedianTable, Rational};

/// Largest algebra the subset oracles enumerate.
pub const ORACLE_POINTS: usize = 12;

pub fn convex_mask(t: &MedianTable, s: u32) -> bool {
    let n = t.len();
    (0..n).all(|x| {
        s >> x & 1 == 0
            || (0..n).all(|y| s >> y & 1 == 0 || (0..n).all(|z| s >> t.raw(x, y, z) & 1 == 1))
    })
}

/// Every nonempty proper subset whose complement is also convex, as bitmasks,
/// sorted.
pub fn halfspace_masks(t: &MedianTable) -> Vec<u32> {
    let n = t.len();
    assert!(n <= ORACLE_POINTS);
    let full = (1u32 << n) - 1;
    (1..full).filter(|&s| convex_mask(t, s) && convex_mask(t, full & !s)).collect()
}

/// Walls as (side containing point 0, other side).
pub fn wall_masks(t: &MedianTable) -> Vec<(u32, u32)> {
    let full = (1u32 << t.len()) - 1;
    halfspace_masks(t).into_iter().filter(|s| s & 1 == 1).map(|s| (s, full & !s)).collect()
}

/// Number of choices of one side per wall whose chosen sides pairwise meet.
pub fn ultrafilter_count(walls: &[(u32, u32)]) -> usize {
    let w = walls.len();
    assert!(w <= 20);
    (0u32..1 << w)
        .filter(|&choice| {
            let sides: Vec<u32> = (0..w).map(|i| if choice >> i & 1 == 0 { walls[i].0 } else { walls[i].1 }).collect();
            sides.iter().all(|a| sides.iter().all(|b| a & b != 0))
        })
        .count()
}

/// Largest family of pairwise inclusion-incomparable sets.
pub fn max_antichain(sets: &[u32]) -> usize {
    let m = sets.len();
    assert!(m <= 20);
    let comparable = |a: u32, b: u32| a & b == a || a & b == b;
    (0u32..1 << m)
        .filter(|&mask| {
            (0..m).all(|i| mask >> i & 1 == 0 || (i + 1..m).all(|j| mask >> j & 1 == 0 || !comparable(sets[i], sets[j])))
        })
        .map(u32::count_ones)
        .max()
        .unwrap_or(0) as usize
}

/// Halfspaces containing `y` but not `x`.
pub fn separating_masks(t: &MedianTable, x: usize, y: usize) -> Vec<u32> {
    halfspace_masks(t).into_iter().filter(|s| s >> y & 1 == 1 && s >> x & 1 == 0).collect()
}

/// Shortest-path metric of a weighted graph.
pub fn floyd_warshall(n: usize, edges: &[(usize, usize, Rational)]) -> Vec<Vec<Option<Rational>>> {
    let mut d: Vec<Vec<Option<Rational>>> = (0..n).map(|i| (0..n).map(|j| (i == j).then(Rational::zero)).collect()).collect();
    for (a, b, w) in edges {
        d[*a][*b] = Some(w.clone());
        d[*b][*a] = Some(w.clone());
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (&d[i][k], &d[k][j]) {
                    let via = a + b;
                    if d[i][j].as_ref().is_none_or(|cur| via < *cur) {
                        d[i][j] = Some(via);
                    }
                }
            }
        }
    }
    d
}

pub fn graph_metric(n: usize, edges: &[(usize, usize, Rational)]) -> Vec<Vec<Rational>> {
    floyd_warshall(n, edges).into_iter().map(|row| row.into_iter().map(|d| d.expect("connected graph")).collect()).collect()
}

pub fn cycle_metric(n: usize) -> (Vec<String>, Vec<Vec<Rational>>) {
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, Rational::one())).collect();
    ((0..n).map(|i| format!("p{i}")).collect(), graph_metric(n, &edges))
}

/// Points `z` with `d(x,z) + d(z,y) = d(x,y)`.
pub fn metric_interval(d: &[Vec<Rational>], x: usize, y: usize) -> Vec<usize> {
    (0..d.len()).filter(|&z| &d[x][z] + &d[z][y] == d[x][y]).collect()
}

/// An isometry `a → b` by backtracking over injective maps, if one exists.
pub fn find_isometry(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Option<Vec<usize>> {
    fn extend(a: &[Vec<Rational>], b: &[Vec<Rational>], map: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        let i = map.len();
        if i == a.len() {
            return true;
        }
        for j in 0..b.len() {
            if !used[j] && map.iter().enumerate().all(|(p, &q)| a[p][i] == b[q][j]) {
                used[j] = true;
                map.push(j);
                if extend(a, b, map, used) {
                    return true;
                }
                map.pop();
                used[j] = false;
            }
        }
        false
    }
    if a.len() != b.len() {
        return None;
    }
    let mut map = Vec::new();
    let mut used = vec![false; b.len()];
    extend(a, b, &mut map, &mut used).then_some(map)
}

pub fn corpus() -> Vec<Instance> {
    default_corpus(DEFAULT_SEED).expect("default corpus builds")
}

/// Every median space of the corpus; the tripod wall space enters through its
/// medianization.
pub fn corpus_spaces() -> Vec<(String, FiniteMedianSpace)> {
    corpus()
        .into_iter()
        .map(|inst| match inst.data {
            InstanceData::Space(s) => (inst.id, s),
            InstanceData::Walls(w) => (format!("{}-medianized", inst.id), medianize(&w, DEFAULT_WALL_GUARD).expect("medianize").space),
            _ => unreachable!("the default corpus holds spaces and wall spaces"),
        })
        .collect()
}

pub fn table_mask(t: &MedianTable, points: &[usize]) -> u32 {
    assert!(t.len() <= 32);
    points.iter().fold(0, |m, &p| m | 1 << p)
}

pub fn data_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("data").join(name)
}

/// Maximum antichain of `m` elements given a comparability test.
pub fn max_antichain_by(m: usize, comparable: impl Fn(usize, usize) -> bool) -> usize {
    assert!(m <= 20);
    (0u32..1 << m)
        .filter(|&mask| (0..m).all(|i| mask >> i & 1 == 0 || (i + 1..m).all(|j| mask >> j & 1 == 0 || !comparable(i, j))))
        .map(u32::count_ones)
        .max()
        .unwrap_or(0) as usize
}

/// Largest family of pairwise transverse walls.
pub fn rank(walls: &[(u32, u32)]) -> usize {
    let transverse = |a: (u32, u32), b: (u32, u32)| a.0 & b.0 != 0 && a.0 & b.1 != 0 && a.1 & b.0 != 0 && a.1 & b.1 != 0;
    let w = walls.len();
    (0u32..1 << w)
        .filter(|&mask| (0..w).all(|i| mask >> i & 1 == 0 || (i + 1..w).all(|j| mask >> j & 1 == 0 || transverse(walls[i], walls[j]))))
        .map(u32::count_ones)
        .max()
        .unwrap_or(0) as usize
}

/// Smallest set containing `s` and every `z` with `m(x, y, z) = z` for
/// `x, y` in it.
pub fn hull(t: &MedianTable, s: &[usize]) -> Vec<usize> {
    let n = t.len();
    let mut inside = vec![false; n];
    for &p in s {
        inside[p] = true;
    }
    loop {
        let mut grew = false;
        for z in 0..n {
            if !inside[z] && (0..n).any(|x| inside[x] && (0..n).any(|y| inside[y] && t.raw(x, y, z) == z)) {
                inside[z] = true;
                grew = true;
            }
        }
        if !grew {
            return (0..n).filter(|&z| inside[z]).collect();
        }
    }
}

/// The point `y` of `c` with `m(x, y, z) = y` for all `z` in `c`.
pub fn gate(t: &MedianTable, x: usize, c: &[usize]) -> Option<usize> {
    let gates: Vec<usize> = c.iter().copied().filter(|&y| c.iter().all(|&z| t.raw(x, y, z) == y)).collect();
    (gates.len() == 1).then(|| gates[0])
}
