//! Runs every structural check over a corpus of instances and records one
//! scorecard row per (instance, statement).

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::algebra::{validate, MedianAlgebra, MedianTable};
use crate::bitset::{BitSet, PointSet};
use crate::duality::{
    double_dual, directed_gate_convex_sets, medianize, theorem_a_check, zero_completion, WallSpace, DEFAULT_CONVEX_SET_GUARD,
    DEFAULT_POINT_GUARD, DEFAULT_WALL_GUARD,
};
use crate::error::{Error, Result};
use crate::generators;
use crate::halfspaces::HalfspaceSystem;
use crate::metric::{
    halfspace_measure_check, l1_embed_interval, metric_from_weights, pair_of_gates_distance_check, strict_distance_check,
    validate_median_metric, wall_weights, FiniteMedianSpace, WallWeighting,
};
use crate::rational::Rational;
use crate::report::ValidationReport;

pub const DEFAULT_SEED: u64 = 7;
pub const CONVEX_PAIRS: usize = 200;
pub const HELLY_FAMILIES: usize = 200;
pub const RANK_SUBSETS: usize = 5;
/// Largest `|ℋ(x|y)|` for which the maximum antichain is also found by
/// exhaustive search.
pub const EXHAUSTIVE_ANTICHAIN_LIMIT: usize = 16;

#[derive(Clone, Debug)]
pub enum InstanceData {
    Space(FiniteMedianSpace),
    /// A median table, possibly invalid; checked with unit wall weights.
    Table(MedianTable),
    /// A distance matrix, possibly invalid, with an optional median table
    /// it must agree with.
    Metric {
        labels: Vec<String>,
        dist: Vec<Vec<Rational>>,
        table: Option<MedianTable>,
    },
    Walls(WallSpace),
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub id: String,
    pub data: InstanceData,
}

impl Instance {
    pub fn new(id: impl Into<String>, data: InstanceData) -> Self {
        Instance { id: id.into(), data }
    }

    fn is_walls(&self) -> bool {
        matches!(self.data, InstanceData::Walls(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    Space,
    Walls,
}

pub struct Statement {
    pub id: &'static str,
    pub target: Target,
    pub summary: &'static str,
}

pub const REGISTRY: &[Statement] = &[
    Statement { id: "Validation", target: Target::Space, summary: "median algebra axioms and median metric" },
    Statement { id: "HellyTheorem", target: Target::Space, summary: "pairwise meeting convex sets share a point" },
    Statement { id: "GatesVsInclusions", target: Target::Space, summary: "gate-projection identities" },
    Statement { id: "PairOfGates", target: Target::Space, summary: "ℋ(C1|C2) = ℋ(x1|x2) for a pair of gates" },
    Statement { id: "PairOfGatesDistance", target: Target::Space, summary: "pairs of gates realise d(C1,C2)" },
    Statement { id: "WallsInConvex", target: Target::Space, summary: "walls of a convex set come from ambient walls" },
    Statement { id: "RankWithSubset", target: Target::Space, summary: "rank is attained inside any separating family" },
    Statement { id: "DilworthForDifferences", target: Target::Space, summary: "ℋ(x|y) splits into at most rank chains" },
    Statement { id: "IntervalsAreEuclidean", target: Target::Space, summary: "intervals embed isometrically in ℓ¹" },
    Statement { id: "MedianToWalls", target: Target::Space, summary: "d is the weight of separating walls" },
    Statement { id: "MedianToHalfspaces", target: Target::Space, summary: "d is the measure of separating halfspaces" },
    Statement { id: "MajorityMedian", target: Target::Space, summary: "σ of a median is the majority of the σ's" },
    Statement { id: "TheoremA", target: Target::Space, summary: "X → 𝓜(X) is a surjective isometry" },
    Statement { id: "DoubleDual", target: Target::Space, summary: "the double dual is the algebra" },
    Statement { id: "ZeroCompletion", target: Target::Space, summary: "the zero-completion is the algebra, same rank" },
    Statement { id: "RecognisingZeroCompletion", target: Target::Space, summary: "directed convex sets are the intervals I(a,b)" },
    Statement { id: "StrictlyIncreasingDistance", target: Target::Space, summary: "nested halfspaces are at distinct distances" },
    Statement { id: "WallsToMedian", target: Target::Walls, summary: "medianization preserves the wall pseudo-metric" },
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Entry {
    pub statement: String,
    pub instance: String,
    pub status: Status,
    pub witness: Option<String>,
    pub elapsed: Duration,
}

#[derive(Clone, Debug, Default)]
pub struct Scorecard {
    pub entries: Vec<Entry>,
}

impl Scorecard {
    pub fn count(&self, status: Status) -> usize {
        self.entries.iter().filter(|e| e.status == status).count()
    }

    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.status == Status::Pass)
    }

    /// Report payload. Wall-clock times vary between runs and are included
    /// only on request.
    pub fn to_value(&self, timings: bool) -> Value {
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|e| {
                let mut v = json!({"statement": e.statement, "instance": e.instance, "status": e.status.as_str()});
                if let Some(w) = &e.witness {
                    v["witness"] = Value::from(w.clone());
                }
                if timings {
                    v["micros"] = Value::from(e.elapsed.as_micros() as u64);
                }
                v
            })
            .collect();
        json!({
            "entries": entries,
            "summary": {
                "pass": self.count(Status::Pass),
                "fail": self.count(Status::Fail),
                "skipped": self.count(Status::Skipped),
            }
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&format!("{:<7} {:<28} {}", e.status.as_str().to_uppercase(), e.statement, e.instance));
            if let Some(w) = &e.witness {
                out.push_str(&format!("  [{w}]"));
            }
            out.push('\n');
        }
        out.push_str(&format!(
            "{} passed, {} failed, {} skipped\n",
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Skipped)
        ));
        out
    }
}

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub seed: u64,
    pub filter: Option<String>,
    pub wall_guard: usize,
    pub point_guard: usize,
    pub set_guard: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: DEFAULT_SEED,
            filter: None,
            wall_guard: DEFAULT_WALL_GUARD,
            point_guard: DEFAULT_POINT_GUARD,
            set_guard: DEFAULT_CONVEX_SET_GUARD,
        }
    }
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
}

/// Random generator for one (instance, statement) cell, independent of which
/// other cells run.
pub fn cell_rng(seed: u64, instance: &str, statement: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ fnv1a(instance) ^ fnv1a(statement).rotate_left(17))
}

/// The standard corpus: unit and weighted cubes of dimension 1 to 4, paths up
/// to 8 points, 10 random trees of at most 15 nodes, grids up to 4×4,
/// staircases with 1 to 5 steps, 25 random subalgebras of the 8-cube spanned
/// by at most 6 points, and the tripod wall space.
pub fn default_corpus(seed: u64) -> Result<Vec<Instance>> {
    let mut corpus = Vec::new();
    let space = |id: String, s: FiniteMedianSpace| Instance::new(id, InstanceData::Space(s));
    for k in 1..=4 {
        corpus.push(space(format!("cube-{k}"), generators::hypercube(k, None)?));
        let w = generators::random_weights(k, seed.wrapping_add(k as u64));
        corpus.push(space(format!("cube-{k}-weighted"), generators::hypercube(k, Some(&w))?));
    }
    for n in 1..=8 {
        corpus.push(space(format!("path-{n}"), generators::path(n, None)?));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a("trees"));
    for i in 0..10 {
        let nodes = rng.gen_range(2..=15);
        let tree_seed = rng.gen();
        corpus.push(space(format!("tree-{i}-{nodes}"), generators::random_tree(nodes, tree_seed)?));
    }
    for (r, c) in [(2, 2), (2, 3), (2, 4), (3, 3), (3, 4), (4, 4)] {
        corpus.push(space(format!("grid-{r}x{c}"), generators::grid(r, c, None, None)?));
    }
    for k in 1..=5 {
        corpus.push(space(format!("staircase-{k}"), generators::staircase(k)?));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a("subalgebras"));
    for i in 0..25 {
        let m = 1 + i % 6;
        let sub_seed = rng.gen();
        corpus.push(space(format!("subalgebra-{i}-m{m}"), generators::random_subalgebra(8, m, sub_seed)?));
    }
    corpus.push(Instance::new("tripod", InstanceData::Walls(generators::tripod())));
    Ok(corpus)
}

/// A copy of `space`'s median table with `m(0, 0, 1)` changed to `1`, which
/// breaks absorption and symmetry.
pub fn corrupted(id: impl Into<String>, space: &FiniteMedianSpace) -> Result<Instance> {
    if space.len() < 2 {
        return Err(Error::Invalid("need at least two points to corrupt a table".into()));
    }
    let table = space.algebra().table();
    let mut entries = table.entries().to_vec();
    entries[1] = 1;
    Ok(Instance::new(id, InstanceData::Table(MedianTable::new(table.labels().to_vec(), entries)?)))
}

type Check = std::result::Result<(), String>;

fn from_report(report: ValidationReport) -> Check {
    match report.first() {
        None => Ok(()),
        Some(f) => Err(f.to_string()),
    }
}

fn from_error(e: Error) -> String {
    e.to_string()
}

/// Validates an instance and returns the space the other checks run on.
fn resolve(data: &InstanceData) -> std::result::Result<FiniteMedianSpace, String> {
    match data {
        InstanceData::Space(s) => {
            from_report(validate(s.algebra().table()))?;
            from_report(validate_median_metric(s.labels(), &s.dist_matrix()))?;
            Ok(s.clone())
        }
        InstanceData::Table(t) => {
            from_report(validate(t))?;
            let algebra = MedianAlgebra::new(t.clone()).map_err(from_error)?;
            let walls = HalfspaceSystem::new(&algebra).walls().len();
            metric_from_weights(&algebra, &WallWeighting(vec![Rational::one(); walls])).map_err(from_error)
        }
        InstanceData::Metric { labels, dist, table } => {
            from_report(validate_median_metric(labels, dist))?;
            match table {
                None => FiniteMedianSpace::from_metric(labels.clone(), dist.clone()).map_err(from_error),
                Some(t) => {
                    from_report(validate(t))?;
                    let algebra = MedianAlgebra::new(t.clone()).map_err(from_error)?;
                    FiniteMedianSpace::new(algebra, dist.clone()).map_err(|e| match e {
                        Error::Validation(r) => from_report(r).unwrap_err(),
                        e => from_error(e),
                    })
                }
            }
        }
        InstanceData::Walls(_) => Err("wall spaces are not median spaces".into()),
    }
}

fn random_convex(algebra: &MedianAlgebra, system: &HalfspaceSystem, rng: &mut ChaCha8Rng) -> PointSet {
    let n = algebra.len();
    let mut pick = || rng.gen_range(0..n);
    let (p, q, r) = (pick(), pick(), pick());
    match rng.gen_range(0..4) {
        0 => algebra.set_of([p]),
        1 => algebra.interval(p, q).clone(),
        2 => algebra.convex_hull(&algebra.set_of([p, q, r])),
        _ if !system.is_empty() => system.halfspace(rng.gen_range(0..system.len())).side.clone(),
        _ => algebra.full_set(),
    }
}

struct Context<'a> {
    space: &'a FiniteMedianSpace,
    system: HalfspaceSystem,
    rank: usize,
    options: &'a SuiteOptions,
    rng: ChaCha8Rng,
}

impl Context<'_> {
    fn algebra(&self) -> &MedianAlgebra {
        self.space.algebra()
    }

    fn convex_pairs(&mut self) -> Vec<(PointSet, PointSet)> {
        (0..CONVEX_PAIRS)
            .map(|_| {
                let c1 = random_convex(self.space.algebra(), &self.system, &mut self.rng);
                let c2 = random_convex(self.space.algebra(), &self.system, &mut self.rng);
                (c1, c2)
            })
            .collect()
    }
}

fn names(algebra: &MedianAlgebra, c: &PointSet) -> String {
    format!("{{{}}}", algebra.names(c).join(","))
}

fn check_helly(ctx: &mut Context) -> Check {
    let alg = ctx.space.algebra();
    let n = alg.len();
    for i in 0..HELLY_FAMILIES {
        let family: Vec<PointSet> = if i % 2 == 0 {
            let (x, y, z) = (ctx.rng.gen_range(0..n), ctx.rng.gen_range(0..n), ctx.rng.gen_range(0..n));
            vec![alg.interval(x, y).clone(), alg.interval(y, z).clone(), alg.interval(z, x).clone()]
        } else {
            let size = ctx.rng.gen_range(2..=4);
            (0..size).map(|_| random_convex(alg, &ctx.system, &mut ctx.rng)).collect()
        };
        if !alg.helly_check(&family).map_err(from_error)? {
            let sets: Vec<String> = family.iter().map(|c| names(alg, c)).collect();
            return Err(format!("pairwise meeting sets with no common point: {}", sets.join(" ")));
        }
    }
    Ok(())
}

fn check_gates_vs_inclusions(ctx: &mut Context) -> Check {
    for (c1, c2) in ctx.convex_pairs() {
        let report = ctx.algebra().gate_projection_check(&c1, &c2).map_err(from_error)?;
        from_report(report).map_err(|w| format!("{} {}: {w}", names(ctx.algebra(), &c1), names(ctx.algebra(), &c2)))?;
    }
    Ok(())
}

fn check_pair_of_gates(ctx: &mut Context) -> Check {
    for (c1, c2) in ctx.convex_pairs() {
        let (x1, x2) = ctx.system.pair_of_gates(ctx.algebra(), &c1, &c2).map_err(from_error)?;
        if c1.intersects(&c2) && x1 != x2 {
            return Err(format!("meeting sets {} {} with gates {x1} != {x2}", names(ctx.algebra(), &c1), names(ctx.algebra(), &c2)));
        }
    }
    Ok(())
}

fn check_pair_of_gates_distance(ctx: &mut Context) -> Check {
    for (c1, c2) in ctx.convex_pairs() {
        from_report(pair_of_gates_distance_check(ctx.space, &c1, &c2).map_err(from_error)?)?;
    }
    Ok(())
}

fn check_walls_in_convex(ctx: &mut Context) -> Check {
    for (c1, c2) in ctx.convex_pairs() {
        for c in [&c1, &c2] {
            ctx.system.restrict_to_convex(ctx.algebra(), c).map_err(from_error)?;
        }
    }
    Ok(())
}

fn admissible(system: &HalfspaceSystem, n: usize, k: &BitSet) -> bool {
    (0..n).all(|x| (x + 1..n).all(|y| system.separating_points(x, y).intersects(k) || system.separating_points(y, x).intersects(k)))
}

fn check_rank_with_subset(ctx: &mut Context) -> Check {
    let n = ctx.algebra().len();
    let full = BitSet::full(ctx.system.len());
    let r = ctx.system.rank_relative(&full).map_err(from_error)?;
    if r != ctx.rank {
        return Err(format!("rank relative to all halfspaces is {r}, rank is {}", ctx.rank));
    }
    for _ in 0..RANK_SUBSETS {
        let mut order: Vec<usize> = (0..ctx.system.len()).collect();
        for i in (1..order.len()).rev() {
            order.swap(i, ctx.rng.gen_range(0..=i));
        }
        let mut k = full.clone();
        for h in order {
            k.remove(h);
            if !admissible(&ctx.system, n, &k) {
                k.insert(h);
            }
        }
        ctx.system.rank_relative(&k).map_err(from_error)?;
    }
    Ok(())
}

/// Maximum antichain by exhaustive search over subsets.
pub fn exhaustive_max_antichain(system: &HalfspaceSystem, elements: &[usize]) -> usize {
    let m = elements.len();
    let comparable: Vec<u32> = (0..m)
        .map(|i| {
            (0..m)
                .filter(|&j| i != j && (system.is_subset(elements[i], elements[j]) || system.is_subset(elements[j], elements[i])))
                .fold(0u32, |acc, j| acc | 1 << j)
        })
        .collect();
    (0u32..1 << m)
        .filter(|&mask| (0..m).all(|i| mask >> i & 1 == 0 || comparable[i] & mask == 0))
        .map(|mask| mask.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

fn check_dilworth(ctx: &mut Context) -> Check {
    let sys = &ctx.system;
    for x in ctx.algebra().points() {
        for y in ctx.algebra().points() {
            let sep = sys.separating_points(x, y);
            let d = sys.dilworth_decompose(x, y);
            let mut covered: Vec<usize> = d.chains.iter().flatten().copied().collect();
            covered.sort_unstable();
            if covered != sep.to_vec() {
                return Err(format!("chains for ({x},{y}) do not partition ℋ(x|y)"));
            }
            for c in &d.chains {
                if c.is_empty() || c.windows(2).any(|p| !sys.is_subset(p[0], p[1])) {
                    return Err(format!("({x},{y}): {c:?} is not a chain"));
                }
            }
            let antichain_ok = d.antichain.iter().all(|&a| d.antichain.iter().all(|&b| a == b || !sys.is_subset(a, b)));
            if !antichain_ok || d.antichain.len() != d.chains.len() {
                return Err(format!("({x},{y}): antichain certificate {:?} is invalid", d.antichain));
            }
            if d.chains.len() > ctx.rank {
                return Err(format!("({x},{y}): {} chains exceed rank {}", d.chains.len(), ctx.rank));
            }
            if sep.count() <= EXHAUSTIVE_ANTICHAIN_LIMIT {
                let width = exhaustive_max_antichain(sys, &sep.to_vec());
                if width != d.chains.len() {
                    return Err(format!("({x},{y}): {} chains but maximum antichain {width}", d.chains.len()));
                }
            }
        }
    }
    Ok(())
}

fn check_intervals_euclidean(ctx: &mut Context) -> Check {
    let weights = wall_weights(ctx.space).map_err(from_error)?;
    for x in ctx.algebra().points() {
        for y in ctx.algebra().points() {
            let e = l1_embed_interval(ctx.space, &ctx.system, &weights, x, y).map_err(from_error)?;
            if e.chains.len() > ctx.rank {
                return Err(format!("({x},{y}): {} coordinates exceed rank {}", e.chains.len(), ctx.rank));
            }
        }
    }
    Ok(())
}

fn check_median_to_walls(ctx: &mut Context) -> Check {
    let weights = wall_weights(ctx.space).map_err(from_error)?;
    let rebuilt = metric_from_weights(ctx.algebra(), &weights).map_err(from_error)?;
    if rebuilt.dist_matrix() != ctx.space.dist_matrix() {
        return Err("metric rebuilt from wall weights differs".into());
    }
    if wall_weights(&rebuilt).map_err(from_error)? != weights {
        return Err("wall weights of the rebuilt metric differ".into());
    }
    Ok(())
}

fn check_median_to_halfspaces(ctx: &mut Context) -> Check {
    let weights = wall_weights(ctx.space).map_err(from_error)?;
    from_report(halfspace_measure_check(ctx.space, &ctx.system, &weights))
}

fn check_majority_median(ctx: &mut Context) -> Check {
    let alg = ctx.space.algebra();
    for x in alg.points() {
        for y in alg.points() {
            for z in alg.points() {
                let m = alg.med(x, y, z);
                if !ctx.system.sigma(m).is_majority_of(ctx.system.sigma(x), ctx.system.sigma(y), ctx.system.sigma(z)) {
                    return Err(format!("σ of m({x},{y},{z}) is not the majority"));
                }
            }
        }
    }
    Ok(())
}

fn check_theorem_a(ctx: &mut Context) -> Check {
    from_report(theorem_a_check(ctx.space, ctx.options.wall_guard).map_err(from_error)?)
}

fn check_double_dual(ctx: &mut Context) -> Check {
    double_dual(ctx.algebra(), ctx.options.wall_guard).map(|_| ()).map_err(from_error)
}

fn check_zero_completion(ctx: &mut Context) -> Check {
    zero_completion(ctx.algebra(), ctx.options.point_guard, ctx.options.set_guard).map(|_| ()).map_err(from_error)
}

fn check_recognising(ctx: &mut Context) -> Check {
    for a in ctx.algebra().points() {
        directed_gate_convex_sets(ctx.algebra(), a, ctx.options.set_guard).map_err(from_error)?;
    }
    Ok(())
}

fn check_strict_distance(ctx: &mut Context) -> Check {
    from_report(strict_distance_check(ctx.space, &ctx.system))
}

fn check_walls_to_median(walls: &WallSpace, options: &SuiteOptions) -> Check {
    let m = medianize(walls, options.wall_guard).map_err(from_error)?;
    from_report(validate_median_metric(m.space.labels(), &m.space.dist_matrix()))
}

fn space_check(id: &str) -> fn(&mut Context) -> Check {
    match id {
        "HellyTheorem" => check_helly,
        "GatesVsInclusions" => check_gates_vs_inclusions,
        "PairOfGates" => check_pair_of_gates,
        "PairOfGatesDistance" => check_pair_of_gates_distance,
        "WallsInConvex" => check_walls_in_convex,
        "RankWithSubset" => check_rank_with_subset,
        "DilworthForDifferences" => check_dilworth,
        "IntervalsAreEuclidean" => check_intervals_euclidean,
        "MedianToWalls" => check_median_to_walls,
        "MedianToHalfspaces" => check_median_to_halfspaces,
        "MajorityMedian" => check_majority_median,
        "TheoremA" => check_theorem_a,
        "DoubleDual" => check_double_dual,
        "ZeroCompletion" => check_zero_completion,
        "RecognisingZeroCompletion" => check_recognising,
        "StrictlyIncreasingDistance" => check_strict_distance,
        other => unreachable!("no check registered for {other}"),
    }
}

fn guard_skips(result: &Check) -> bool {
    matches!(result, Err(w) if w.contains("exceeds guard"))
}

fn entry(statement: &str, instance: &str, result: Check, elapsed: Duration) -> Entry {
    let status = match &result {
        Ok(()) => Status::Pass,
        r if guard_skips(r) => Status::Skipped,
        Err(_) => Status::Fail,
    };
    Entry {
        statement: statement.to_string(),
        instance: instance.to_string(),
        status,
        witness: result.err(),
        elapsed,
    }
}

/// Runs every applicable registered statement on every instance, in corpus
/// order then registry order. When validation fails the other statements of
/// that instance are skipped. Checks that exceed a guard are skipped.
pub fn run_suite(corpus: &[Instance], options: &SuiteOptions) -> Scorecard {
    let selected = |id: &str| options.filter.as_deref().is_none_or(|f| f == id);
    let mut entries = Vec::new();
    for inst in corpus {
        if let InstanceData::Walls(w) = &inst.data {
            for st in REGISTRY.iter().filter(|s| s.target == Target::Walls && selected(s.id)) {
                let start = Instant::now();
                let result = check_walls_to_median(w, options);
                entries.push(entry(st.id, &inst.id, result, start.elapsed()));
            }
            continue;
        }
        let start = Instant::now();
        let resolved = resolve(&inst.data);
        let elapsed = start.elapsed();
        let statements = REGISTRY.iter().filter(|s| s.target == Target::Space && s.id != "Validation");
        let space = match resolved {
            Ok(space) => {
                if selected("Validation") {
                    entries.push(entry("Validation", &inst.id, Ok(()), elapsed));
                }
                space
            }
            Err(witness) => {
                if selected("Validation") {
                    entries.push(entry("Validation", &inst.id, Err(witness), elapsed));
                }
                for st in statements.filter(|s| selected(s.id)) {
                    entries.push(Entry {
                        statement: st.id.to_string(),
                        instance: inst.id.clone(),
                        status: Status::Skipped,
                        witness: Some("validation failed".into()),
                        elapsed: Duration::ZERO,
                    });
                }
                continue;
            }
        };
        let system = HalfspaceSystem::new(space.algebra());
        let rank = system.rank();
        for st in statements.filter(|s| selected(s.id)) {
            let mut ctx = Context {
                space: &space,
                system: system.clone(),
                rank,
                options,
                rng: cell_rng(options.seed, &inst.id, st.id),
            };
            let start = Instant::now();
            let result = space_check(st.id)(&mut ctx);
            entries.push(entry(st.id, &inst.id, result, start.elapsed()));
        }
    }
    debug_assert!(corpus.iter().all(|i| !i.is_walls() || REGISTRY.iter().any(|s| s.target == Target::Walls)));
    Scorecard { entries }
}

/// Gate-projection of the deepest corner of each truncated staircase onto the
/// first step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StaircaseDemo {
    /// `(k, deepest corner, its gate in the first step)`
    pub rows: Vec<(usize, String, String)>,
    /// First `k` from which the projection no longer changes.
    pub stable_from: usize,
}

impl StaircaseDemo {
    pub fn to_value(&self) -> Value {
        json!({
            "projections": self.rows.iter().map(|(k, corner, gate)| json!({"k": k, "corner": corner, "gate": gate})).collect::<Vec<_>>(),
            "stable_from": self.stable_from,
        })
    }
}

/// For `k = 1..=k_max`, projects the corner `(0, -k)` of `staircase(k)` to the
/// first step `I((0,0), (1/2,-1))`; checks that the sequence is constant from
/// `k = 2` at the latest.
pub fn demo_staircase(k_max: usize) -> Result<StaircaseDemo> {
    if k_max == 0 {
        return Err(Error::Invalid("k_max must be at least 1".into()));
    }
    let mut rows = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let s = generators::staircase(k)?;
        let alg = s.algebra();
        let find = |label: &str| alg.find(label).ok_or_else(|| Error::invariant("staircase", format!("no point {label}")));
        let corner_label = format!("(0,-{k})");
        let corner = find(&corner_label)?;
        let step = alg.interval(find("(0,0)")?, find("(1/2,-1)")?).clone();
        let gate = alg.gate(corner, &step)?;
        rows.push((k, corner_label, alg.label(gate).to_string()));
    }
    let last = &rows[k_max - 1].2;
    let stable_from = rows.iter().rposition(|r| &r.2 != last).map_or(1, |i| i + 2);
    if stable_from > 2 {
        return Err(Error::invariant("staircase-stabilization", format!("projections stabilize only from k = {stable_from}")));
    }
    Ok(StaircaseDemo { rows, stable_from })
}
