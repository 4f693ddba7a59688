//! Acceptance suite: one PASS/FAIL line per criterion, all comparisons exact.
//! Each criterion checks the library against an independent brute-force route
//! wherever the instance is small enough to enumerate.

mod common;

use std::panic;
use std::time::{Duration, Instant};

use medianlab::cli;
use medianlab::duality::{
    directed_gate_convex_sets, double_dual, medianize, theorem_a_check, zero_completion, AbstractPocset,
    DEFAULT_CONVEX_SET_GUARD, DEFAULT_POINT_GUARD, DEFAULT_WALL_GUARD,
};
use medianlab::generators::{self, GeneratorSpec};
use medianlab::harness::{self, run_suite, InstanceData, Status, SuiteOptions, DEFAULT_SEED};
use medianlab::io::{self, Document};
use medianlab::metric::{l1_embed_interval, metric_from_weights, validate_median_metric, wall_weights};
use medianlab::{validate, BitSet, FiniteMedianSpace, HalfspaceSystem, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, witness: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(witness())
    }
}

fn oracle_sized(s: &FiniteMedianSpace) -> bool {
    s.len() <= common::ORACLE_POINTS
}

fn validation_oracle() -> Outcome {
    let start = Instant::now();
    let corpus = common::corpus();
    for inst in &corpus {
        if let InstanceData::Space(s) = &inst.data {
            let table = s.algebra().table();
            ensure(validate(table).is_ok(), || format!("{}: {}", inst.id, validate(table)))?;
            let r = validate_median_metric(s.labels(), &s.dist_matrix());
            ensure(r.is_ok(), || format!("{}: {r}", inst.id))?;
            // The table median is the unique point of the three metric intervals.
            let d = s.dist_matrix();
            for x in 0..s.len() {
                for y in 0..s.len() {
                    let ixy = common::metric_interval(&d, x, y);
                    for z in 0..s.len() {
                        let meet: Vec<usize> = ixy
                            .iter()
                            .copied()
                            .filter(|&p| &d[y][p] + &d[p][z] == d[y][z] && &d[z][p] + &d[p][x] == d[z][x])
                            .collect();
                        ensure(meet == [table.raw(x, y, z)], || format!("{}: metric median of ({x},{y},{z}) is {meet:?}", inst.id))?;
                    }
                }
            }
        }
    }
    let card = run_suite(&corpus, &SuiteOptions { filter: Some("Validation".into()), ..SuiteOptions::default() });
    ensure(card.entries.len() == corpus.len() - 1 && card.all_passed(), || card.to_text())?;
    let (labels, dist) = common::cycle_metric(5);
    let r = validate_median_metric(&labels, &dist);
    let f = r.failures.iter().find(|f| f.axiom == "unique-median").ok_or("5-cycle passed validation")?;
    ensure(f.witness.len() == 3, || format!("5-cycle witness {:?}", f.witness))?;
    ensure(FiniteMedianSpace::from_metric(labels, dist).is_err(), || "5-cycle built a space".into())?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!("{} instances valid, 5-cycle fails at {:?}, corpus validated in {} ms", corpus.len(), f.witness, elapsed.as_millis()))
}

fn theorem_a() -> Outcome {
    let spaces = common::corpus_spaces();
    for (id, s) in &spaces {
        let r = theorem_a_check(s, DEFAULT_WALL_GUARD).map_err(|e| format!("{id}: {e}"))?;
        ensure(r.is_ok(), || format!("{id}: {r}"))?;
        if oracle_sized(s) {
            let count = common::ultrafilter_count(&common::wall_masks(s.algebra().table()));
            ensure(count == s.len(), || format!("{id}: {count} ultrafilters by enumeration, {} points", s.len()))?;
        }
    }
    Ok(format!("{} instances", spaces.len()))
}

fn wall_weight_reconstruction() -> Outcome {
    let spaces = common::corpus_spaces();
    let mut pairs = 0;
    for (id, s) in &spaces {
        let alg = s.algebra();
        let system = HalfspaceSystem::new(alg);
        let weights = wall_weights(s).map_err(|e| format!("{id}: {e}"))?;
        for x in alg.points() {
            for y in alg.points() {
                let sum: Rational = system.separating_walls(x, y).iter().map(|&w| &weights.0[w]).sum();
                ensure(&sum == s.dist(x, y), || format!("{id}: μ(𝒲({x}|{y})) = {sum} but d = {}", s.dist(x, y)))?;
                pairs += 1;
            }
        }
        if oracle_sized(s) {
            let t = alg.table();
            ensure(common::wall_masks(t).len() == system.walls().len(), || format!("{id}: wall count differs from enumeration"))?;
            for x in alg.points() {
                for y in alg.points() {
                    ensure(common::separating_masks(t, x, y).len() == system.separating_walls(x, y).len(), || {
                        format!("{id}: |𝒲({x}|{y})| differs from enumeration")
                    })?;
                }
            }
        }
        let rebuilt = metric_from_weights(alg, &weights).map_err(|e| format!("{id}: {e}"))?;
        ensure(rebuilt.dist_matrix() == s.dist_matrix(), || format!("{id}: metric_from_weights differs"))?;
        ensure(wall_weights(&rebuilt).map_err(|e| e.to_string())? == weights, || format!("{id}: weights do not round-trip"))?;
    }
    Ok(format!("{pairs} pairs over {} instances", spaces.len()))
}

fn l1_interval_embedding() -> Outcome {
    let spaces = common::corpus_spaces();
    let mut pairs = 0;
    for (id, s) in &spaces {
        let alg = s.algebra();
        let system = HalfspaceSystem::new(alg);
        let rank = if oracle_sized(s) { common::rank(&common::wall_masks(alg.table())) } else { system.rank() };
        ensure(rank == system.rank(), || format!("{id}: rank {} but enumeration gives {rank}", system.rank()))?;
        let weights = wall_weights(s).map_err(|e| format!("{id}: {e}"))?;
        let d = s.dist_matrix();
        for x in alg.points() {
            for y in alg.points() {
                let e = l1_embed_interval(s, &system, &weights, x, y).map_err(|e| format!("{id}: {e}"))?;
                let mut pts = e.points.clone();
                pts.sort_unstable();
                ensure(pts == common::metric_interval(&d, x, y), || format!("{id}: embedded points of I({x},{y}) differ"))?;
                ensure(e.chains.len() <= rank, || format!("{id}: I({x},{y}) uses {} coordinates, rank {rank}", e.chains.len()))?;
                for (i, &p) in e.points.iter().enumerate() {
                    ensure(e.coordinates[i].len() == e.chains.len(), || format!("{id}: ragged coordinates"))?;
                    for (j, &q) in e.points.iter().enumerate() {
                        let l1: Rational = e.coordinates[i].iter().zip(&e.coordinates[j]).map(|(a, b)| (a - b).abs()).sum();
                        ensure(l1 == d[p][q], || format!("{id}: in I({x},{y}) ℓ¹({p},{q}) = {l1} but d = {}", d[p][q]))?;
                    }
                }
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} intervals isometric"))
}

fn dilworth_bound() -> Outcome {
    let spaces = common::corpus_spaces();
    let (mut exhaustive, mut total) = (0, 0);
    for (id, s) in &spaces {
        let alg = s.algebra();
        let system = HalfspaceSystem::new(alg);
        let rank = system.rank();
        for x in alg.points() {
            for y in alg.points() {
                let sep = system.separating_points(x, y).to_vec();
                let dec = system.dilworth_decompose(x, y);
                let mut covered: Vec<usize> = dec.chains.iter().flatten().copied().collect();
                covered.sort_unstable();
                ensure(covered == sep, || format!("{id}: chains of ({x},{y}) do not partition ℋ(x|y)"))?;
                for c in &dec.chains {
                    let sides: Vec<&BitSet> = c.iter().map(|&h| &system.halfspace(h).side).collect();
                    ensure(sides.windows(2).all(|p| p[0].is_subset(p[1]) && p[0] != p[1]), || format!("{id}: {c:?} is not a chain"))?;
                }
                ensure(dec.chains.len() <= rank, || format!("{id}: {} chains for ({x},{y}), rank {rank}", dec.chains.len()))?;
                if sep.len() <= harness::EXHAUSTIVE_ANTICHAIN_LIMIT {
                    let sides: Vec<&BitSet> = sep.iter().map(|&h| &system.halfspace(h).side).collect();
                    let width = common::max_antichain_by(sides.len(), |i, j| sides[i].is_subset(sides[j]) || sides[j].is_subset(sides[i]));
                    ensure(width == dec.chains.len(), || format!("{id}: ({x},{y}) has {} chains, antichain {width}", dec.chains.len()))?;
                    exhaustive += 1;
                }
                total += 1;
            }
        }
    }
    Ok(format!("{total} pairs, {exhaustive} against exhaustive antichains"))
}

fn duality() -> Outcome {
    let spaces = common::corpus_spaces();
    for (id, s) in &spaces {
        let alg = s.algebra();
        let dd = double_dual(alg, DEFAULT_WALL_GUARD).map_err(|e| format!("{id}: {e}"))?;
        ensure(dd.ultrafilters.len() == alg.len(), || format!("{id}: {} ultrafilters", dd.ultrafilters.len()))?;
        let mut image = dd.embedding.clone();
        image.sort_unstable();
        ensure(image == (0..alg.len()).collect::<Vec<_>>(), || format!("{id}: embedding is not a bijection"))?;
        for x in alg.points() {
            for y in alg.points() {
                for z in alg.points() {
                    let e = &dd.embedding;
                    ensure(dd.algebra.med(e[x], e[y], e[z]) == e[alg.med(x, y, z)], || format!("{id}: median of ({x},{y},{z}) not preserved"))?;
                }
            }
        }
    }
    let tripod_masks = [(0b001, 0b110), (0b010, 0b101), (0b100, 0b011)];
    let sides: Vec<BitSet> = tripod_masks
        .iter()
        .flat_map(|&(a, b)| [a, b])
        .map(|m: u32| BitSet::from_indices(3, (0..3).filter(|i| m >> i & 1 == 1)))
        .collect();
    let tripod = AbstractPocset::from_sides(&sides).map_err(|e| e.to_string())?.all_ultrafilters(DEFAULT_WALL_GUARD).map_err(|e| e.to_string())?;
    ensure(tripod.len() == 4 && common::ultrafilter_count(&tripod_masks) == 4, || format!("tripod pocset has {} ultrafilters", tripod.len()))?;
    for k in 1..=8 {
        let q = generators::hypercube(k, None).map_err(|e| e.to_string())?;
        let pocset = AbstractPocset::from_system(&HalfspaceSystem::new(q.algebra())).map_err(|e| e.to_string())?;
        let count = pocset.all_ultrafilters(DEFAULT_WALL_GUARD).map_err(|e| e.to_string())?.len();
        ensure(count == 1 << k, || format!("Q_{k} pocset has {count} ultrafilters"))?;
        if k <= 3 {
            let oracle = common::ultrafilter_count(&common::wall_masks(q.algebra().table()));
            ensure(oracle == 1 << k, || format!("enumeration gives {oracle} ultrafilters on Q_{k}"))?;
        }
    }
    Ok(format!("{} instances, tripod 4, Q_1..Q_8 2^n", spaces.len()))
}

/// Convex sets containing `a` in which any two members lie in a common
/// `I(a, z)` with `z` in the set.
fn directed_sets_by_enumeration(s: &FiniteMedianSpace, a: usize) -> Vec<Vec<usize>> {
    let t = s.algebra().table();
    let n = t.len();
    let mut out = Vec::new();
    for mask in 0u32..1 << n {
        if mask >> a & 1 == 0 || !common::convex_mask(t, mask) {
            continue;
        }
        let members: Vec<usize> = (0..n).filter(|&p| mask >> p & 1 == 1).collect();
        let directed = members.iter().all(|&x| {
            members.iter().all(|&y| members.iter().any(|&z| t.raw(a, z, x) == x && t.raw(a, z, y) == y))
        });
        if directed {
            out.push(members);
        }
    }
    out.sort();
    out
}

fn zero_completion_criterion() -> Outcome {
    let spaces = common::corpus_spaces();
    let mut enumerated = 0;
    for (id, s) in &spaces {
        let alg = s.algebra();
        let z = zero_completion(alg, DEFAULT_POINT_GUARD, DEFAULT_CONVEX_SET_GUARD).map_err(|e| format!("{id}: {e}"))?;
        let rank = HalfspaceSystem::new(alg).rank();
        ensure(z.tuples.len() == alg.len() && z.rank == rank, || format!("{id}: {} points, rank {} vs {rank}", z.tuples.len(), z.rank))?;
        for x in alg.points() {
            for y in alg.points() {
                for w in alg.points() {
                    let e = &z.embedding;
                    ensure(z.algebra.med(e[x], e[y], e[w]) == e[alg.med(x, y, w)], || format!("{id}: median of ({x},{y},{w}) not preserved"))?;
                }
            }
        }
        for a in alg.points() {
            let mut sets: Vec<Vec<usize>> = directed_gate_convex_sets(alg, a, DEFAULT_CONVEX_SET_GUARD)
                .map_err(|e| format!("{id}: {e}"))?
                .iter()
                .map(BitSet::to_vec)
                .collect();
            sets.sort();
            let mut intervals: Vec<Vec<usize>> = alg.points().map(|b| alg.interval(a, b).to_vec()).collect();
            intervals.sort();
            ensure(sets == intervals, || format!("{id}: {a}-directed sets are not the intervals I({a},b)"))?;
            if s.len() <= 9 {
                ensure(directed_sets_by_enumeration(s, a) == intervals, || format!("{id}: enumeration disagrees at basepoint {a}"))?;
                enumerated += 1;
            }
        }
    }
    Ok(format!("{} instances, {enumerated} basepoints cross-checked by enumeration", spaces.len()))
}

fn random_hull(s: &FiniteMedianSpace, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = s.len();
    let k = rng.gen_range(1..=3);
    let seeds: Vec<usize> = (0..k).map(|_| rng.gen_range(0..n)).collect();
    common::hull(s.algebra().table(), &seeds)
}

fn gate_calculus() -> Outcome {
    let corpus = common::corpus();
    let statements = ["GatesVsInclusions", "PairOfGates", "PairOfGatesDistance", "WallsInConvex"];
    let spaces = corpus.iter().filter(|i| matches!(i.data, InstanceData::Space(_))).count();
    for st in statements {
        let card = run_suite(&corpus, &SuiteOptions { filter: Some(st.into()), ..SuiteOptions::default() });
        ensure(card.entries.len() == spaces && card.all_passed(), || card.to_text())?;
    }
    let mut checked = 0;
    for (id, s) in common::corpus_spaces() {
        let alg = s.algebra();
        let t = alg.table();
        let system = HalfspaceSystem::new(alg);
        let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED ^ id.len() as u64);
        for _ in 0..harness::CONVEX_PAIRS {
            let (c1, c2) = (random_hull(&s, &mut rng), random_hull(&s, &mut rng));
            let (b1, b2) = (alg.set_of(c1.iter().copied()), alg.set_of(c2.iter().copied()));
            for x in alg.points() {
                let g = alg.gate(x, &b1).map_err(|e| format!("{id}: {e}"))?;
                ensure(Some(g) == common::gate(t, x, &c1), || format!("{id}: gate of {x} in {c1:?}"))?;
            }
            let report = alg.gate_projection_check(&b1, &b2).map_err(|e| format!("{id}: {e}"))?;
            ensure(report.is_ok(), || format!("{id}: {report}"))?;
            let (x1, x2) = system.pair_of_gates(alg, &b1, &b2).map_err(|e| format!("{id}: {e}"))?;
            let best = c1.iter().flat_map(|&p| c2.iter().map(move |&q| (p, q))).map(|(p, q)| s.dist(p, q)).min().unwrap();
            ensure(s.dist(x1, x2) == best, || format!("{id}: d(x1,x2) = {} but d(C1,C2) = {best}", s.dist(x1, x2)))?;
            let report = medianlab::metric::pair_of_gates_distance_check(&s, &b1, &b2).map_err(|e| format!("{id}: {e}"))?;
            ensure(report.is_ok(), || format!("{id}: {report}"))?;
            let r = system.restrict_to_convex(alg, &b1).map_err(|e| format!("{id}: {e}"))?;
            if oracle_sized(&s) {
                let m1 = common::table_mask(t, &c1);
                let m2 = common::table_mask(t, &c2);
                let halfspaces = common::halfspace_masks(t);
                let between = halfspaces.iter().filter(|&&h| h & m1 == 0 && h & m2 == m2).count();
                ensure(between == common::separating_masks(t, x1, x2).len(), || format!("{id}: |ℋ(C1|C2)| = {between} differs from |ℋ(x1|x2)|"))?;
                let cutting = common::wall_masks(t).iter().filter(|w| w.0 & m1 != 0 && w.1 & m1 != 0).count();
                ensure(cutting == r.system.walls().len() && 2 * cutting == r.correspondence.len(), || {
                    format!("{id}: {cutting} walls cut {c1:?}, restriction has {}", r.system.walls().len())
                })?;
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} convex-set pairs"))
}

fn medianization_example() -> Outcome {
    let m = medianize(&generators::tripod(), DEFAULT_WALL_GUARD).map_err(|e| e.to_string())?;
    let s = &m.space;
    ensure(s.len() == 4, || format!("{} points", s.len()))?;
    let leaves: Vec<usize> = ["a", "b", "c"].iter().map(|l| s.algebra().find(l).unwrap()).collect();
    let center = (0..4).find(|p| !leaves.contains(p)).unwrap();
    for &a in &leaves {
        ensure(s.dist(a, center) == &Rational::one(), || format!("d(leaf, center) = {}", s.dist(a, center)))?;
        for &b in &leaves {
            let want = if a == b { Rational::zero() } else { Rational::integer(2) };
            ensure(s.dist(a, b) == &want, || format!("d(leaf, leaf) = {}", s.dist(a, b)))?;
        }
    }
    // Every consistent side choice, with distance the number of walls on which
    // two choices differ.
    let walls = [(0b001u32, 0b110u32), (0b010, 0b101), (0b100, 0b011)];
    let choices: Vec<u32> = (0u32..8)
        .filter(|&c| {
            let sides: Vec<u32> = (0..3).map(|i| if c >> i & 1 == 0 { walls[i].0 } else { walls[i].1 }).collect();
            sides.iter().all(|a| sides.iter().all(|b| a & b != 0))
        })
        .collect();
    let oracle: Vec<Vec<Rational>> = choices.iter().map(|a| choices.iter().map(|b| Rational::integer(i64::from((a ^ b).count_ones()))).collect()).collect();
    ensure(common::find_isometry(&oracle, &s.dist_matrix()).is_some(), || "differs from the enumerated ultrafilters".into())?;
    let star = generators::star(3).map_err(|e| e.to_string())?;
    let iso = common::find_isometry(&star.dist_matrix(), &s.dist_matrix()).ok_or("not isometric to the 3-leg star")?;
    ensure(s.labels()[iso[0]] == s.labels()[center], || "star center does not map to the center".into())?;
    Ok("4-point tripod, isometric to the 3-leg star".into())
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("medianlab").chain(args.iter().copied());
    let code = cli::run(argv, &mut std::io::empty(), &mut out, &mut err);
    (code, out)
}

fn determinism() -> Outcome {
    let card = || io::emit(&Document::Report(run_suite(&common::corpus(), &SuiteOptions::default()).to_value(false)));
    let first = card();
    ensure(first == card(), || "scorecards differ between runs".into())?;
    let first_cli = run_cli(&["check", "--format", "json", "--seed", "11"]);
    ensure(first_cli.0 == 0 && first_cli == run_cli(&["check", "--format", "json", "--seed", "11"]), || "CLI scorecards differ".into())?;
    let specs = [
        GeneratorSpec::Hypercube { k: 3, weights: Some(generators::random_weights(3, 5)) },
        GeneratorSpec::Path { n: 5, lengths: None },
        GeneratorSpec::Star { legs: 4 },
        GeneratorSpec::RandomTree { nodes: 12, seed: 42 },
        GeneratorSpec::Grid { rows: 3, cols: 4 },
        GeneratorSpec::Staircase { k: 4 },
        GeneratorSpec::RandomSubalgebra { n: 8, m: 5, seed: 42 },
        GeneratorSpec::Tripod,
    ];
    for spec in &specs {
        let emit = || -> Result<String, String> {
            Ok(match spec.build().map_err(|e| e.to_string())? {
                generators::Generated::Space(s) => io::emit(&Document::from_space(&s)),
                generators::Generated::Walls(w) => io::emit(&Document::WallSpace(w)),
            })
        };
        ensure(emit()? == emit()?, || format!("{spec:?} is not reproducible"))?;
    }
    for args in [["generate", "random", "8", "5"], ["generate", "tree", "15", "--quiet"]] {
        let a = run_cli(&[&args[..], &["--seed", "3"]].concat());
        ensure(a == run_cli(&[&args[..], &["--seed", "3"]].concat()), || format!("{args:?} differs"))?;
    }
    let suite = run_suite(&common::corpus(), &SuiteOptions::default());
    ensure(suite.count(Status::Fail) == 0, || "default corpus has failures".into())?;
    Ok(format!("{} scorecard bytes, {} rows, identical across runs", first.len(), suite.entries.len()))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("validation oracle", validation_oracle),
        ("Theorem A", theorem_a),
        ("wall-weight reconstruction", wall_weight_reconstruction),
        ("ℓ¹ interval embedding", l1_interval_embedding),
        ("Dilworth bound", dilworth_bound),
        ("duality", duality),
        ("zero-completion", zero_completion_criterion),
        ("gate calculus", gate_calculus),
        ("medianization example", medianization_example),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(check).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({:.2?})", i + 1, start.elapsed()),
            Err(witness) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {witness}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
