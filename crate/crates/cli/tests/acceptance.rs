//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use locsim::freeness::{ball_sequence, pingpong_witness, reduced_word_check, verify_pingpong, WordCheck};
use locsim::group::{closure, enumerate_group, finite_analyze, ClosureResult, GroupElement, OrderResult};
use locsim::perm::{symmetric_group, Perm};
use locsim::poset::{
    act, admissible_group, common_refinement, enumerate_partitions, is_member, isotropy_membership, refines,
    verify_vertex, Isotropy, PartitionChain,
};
use locsim::sample::{random_finite_structure, random_mirror_element, random_permutational_element};
use locsim::simstruct::{
    decompose_equalizing, locally_sim_equivalent, LocalEquivalence, Piece, SimStructure, Similarity, SimilarityClass,
};
use locsim::ultrametric::{Ball, ClopenSet, Partition, Point, Space};
use locsim_cli::{run, GroupDescriptor};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

const PINGPONG_LIMIT: Duration = Duration::from_secs(1);
const BALL_SEQ_LIMIT: Duration = Duration::from_secs(1);
const DIRECTEDNESS_LIMIT: Duration = Duration::from_secs(10);

/// `V₂`, `V₃(1)` and `V₂(Σ₂)`.
fn pingpong_structures() -> Vec<Arc<SimStructure>> {
    vec![
        Arc::new(SimStructure::permutational(2, &[]).unwrap()),
        Arc::new(SimStructure::permutational(3, &[]).unwrap()),
        Arc::new(SimStructure::permutational_full(2).unwrap()),
    ]
}

/// Word points whose first `len` letters run over every choice, followed
/// by every constant tail.
fn all_points(space: &Space, len: usize) -> Vec<Point> {
    let Space::Word { d } = *space else { unreachable!() };
    (0..d as u8).flat_map(|t| space.grid_points(len, t)).collect()
}

fn criterion_1() -> Check {
    for s in pingpong_structures() {
        let start = Instant::now();
        let w = pingpong_witness(&s).map_err(|e| e.to_string())?;
        let t = verify_pingpong(&w, 64).map_err(|e| e.to_string())?;
        let words = reduced_word_check(&w, 6).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        let id = s.id();
        ensure!(t.conclusion, "{id}: transcript\n{t}");
        ensure!(w.a1.order(64) == OrderResult::Finite(3), "{id}: ord(a1)");
        ensure!(w.a2.order(64) == OrderResult::Finite(2), "{id}: ord(a2)");
        ensure!(matches!(words, WordCheck::Pass { words: 49 }), "{id}: reduced words {words:?}");
        ensure!(elapsed < PINGPONG_LIMIT, "{id}: took {elapsed:?}");

        // δ-cycles as normal-form equalities of similarities.
        let [d2, d3, d4] = &w.deltas;
        for (x, y, z, b) in [(d2, d3, d4, &w.b[1]), (d3, d4, d2, &w.b[2]), (d4, d2, d3, &w.b[3])] {
            let cyc = z.after(&y.after(x).unwrap()).unwrap();
            ensure!(cyc == Similarity::identity(s.space(), b), "{id}: cycle at {b:?} is {cyc}");
        }

        // Orders by direct powers, and containments by evaluating every
        // point of a fine grid.
        ensure!(w.a1.pow(3).is_identity() && !w.a1.pow(2).is_identity() && !w.a1.is_identity(), "{id}: a1 powers");
        ensure!(w.a2.pow(2).is_identity() && !w.a2.is_identity(), "{id}: a2 powers");
        let a1sq = w.a1.pow(2);
        let len = w.a1.depth().max(w.a2.depth()) + 2;
        for x in all_points(s.space(), len) {
            if w.x2.contains_point(&x) {
                ensure!(w.x1.contains_point(&w.a1.evaluate(&x).unwrap()), "{id}: a1({x}) leaves X1");
                ensure!(w.x1.contains_point(&a1sq.evaluate(&x).unwrap()), "{id}: a1^2({x}) leaves X1");
            }
            if w.x1.contains_point(&x) {
                ensure!(w.x2.contains_point(&w.a2.evaluate(&x).unwrap()), "{id}: a2({x}) leaves X2");
            }
        }
        let space = s.space();
        ensure!(w.a1.image(&w.x2).unwrap().is_subset(space, &w.x1), "{id}: a1 X2");
        ensure!(a1sq.image(&w.x2).unwrap().is_subset(space, &w.x1), "{id}: a1^2 X2");
        ensure!(w.a2.image(&w.x1).unwrap().is_subset(space, &w.x2), "{id}: a2 X1");
    }
    Ok("V2, V3(1), V2(S2): orders 3 and 2, cycles, containments, 49 reduced words".into())
}

fn criterion_2() -> Check {
    let start = Instant::now();
    for s in pingpong_structures() {
        let id = s.id();
        let seq = ball_sequence(&s, 10).map_err(|e| e.to_string())?;
        let top = Ball::root();
        for i in 1..=10 {
            let level = &seq.levels[i - 1];
            ensure!(level.len() == 1 << i, "{id}: |S{i}| = {}", level.len());
            for (a, (b1, _)) in level.iter().enumerate() {
                for (b2, _) in &level[a + 1..] {
                    ensure!(b1.is_disjoint(b2), "{id}: S{i} overlaps at {b1:?} {b2:?}");
                }
            }
            for (b, g) in level {
                ensure!(g.dom() == &top && g.cod() == b, "{id}: {g} does not map X onto {b:?}");
                ensure!(g.check(s.space()).is_ok() && s.contains(g), "{id}: {g} not in the structure");
            }
            if i > 1 {
                ensure!(seq.min_depth(i) > seq.min_depth(i - 1), "{id}: depth stalls at S{i}");
            }
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < BALL_SEQ_LIMIT, "took {elapsed:?}");
    Ok(format!("i <= 10 on three structures in {} ms", elapsed.as_millis()))
}

/// Evaluates a table of identity-tail entries on an eventually-0 word by
/// prefix replacement.
fn oracle_eval(entries: &[Similarity], word: &[u8]) -> Vec<u8> {
    let e = entries.iter().find(|e| word.starts_with(e.dom().letters())).expect("table covers the word");
    let mut out = e.cod().letters().to_vec();
    out.extend_from_slice(&word[e.dom().depth()..]);
    out
}

fn as_point(word: &[u8]) -> Point {
    Point::word(Ball::from_letters(word.to_vec()), 0)
}

/// Splits every entry of a table into its restrictions to child balls.
fn refined(space: &Space, entries: &[Similarity]) -> Vec<Similarity> {
    entries
        .iter()
        .flat_map(|e| {
            space.maximal_proper_subballs(e.dom()).unwrap().into_iter().map(|c| e.restrict(space, &c).unwrap())
        })
        .collect()
}

fn criterion_3() -> Check {
    let s = Arc::new(SimStructure::permutational(2, &[]).unwrap());
    let space = s.space();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut words_checked = 0usize;
    for _ in 0..1000 {
        let a = random_permutational_element(&s, 5, &mut rng).unwrap();
        let b = random_permutational_element(&s, 5, &mut rng).unwrap();
        let ab = a.compose(&b).unwrap();
        let inv = a.inverse();
        let raw_a = refined(space, a.table());
        let renormalized = GroupElement::from_table(&s, raw_a.clone()).unwrap();
        ensure!(renormalized == a, "normalize changed {a:?}");
        let len = a.depth().max(b.depth()) + 2;
        for x in space.grid_points(len, 0) {
            let word = x.truncate(len).letters().to_vec();
            let padded: Vec<u8> = word.iter().copied().chain(std::iter::repeat_n(0, len)).collect();
            let bx = oracle_eval(b.table(), &padded);
            let abx = oracle_eval(a.table(), &bx);
            ensure!(ab.evaluate(&x).unwrap() == as_point(&abx), "compose at {x}");
            ensure!(a.evaluate(&x).unwrap() == as_point(&oracle_eval(&raw_a, &padded)), "normal form at {x}");
            let ax = a.evaluate(&x).unwrap();
            ensure!(inv.evaluate(&ax).unwrap() == x, "inverse at {x}");
            words_checked += 1;
        }
    }
    Ok(format!("1000 random pairs, {words_checked} words, exact agreement"))
}

fn criterion_4() -> Check {
    let m = Arc::new(SimStructure::mirror());
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut largest = 0;
    for _ in 0..100 {
        let k = rng.gen_range(1..=3);
        let gens: Vec<GroupElement> = (0..k).map(|_| random_mirror_element(&m, 4, &mut rng).unwrap()).collect();
        let bound = gens.iter().map(GroupElement::depth).max().unwrap();
        match closure(&m, &gens, 100_000).unwrap() {
            ClosureResult::Finite(all) => {
                largest = largest.max(all.len());
                ensure!(all.iter().all(|g| g.depth() <= bound), "member deeper than {bound}");
            }
            ClosureResult::SizeBudgetExceeded(_) => return Err("mirror closure did not terminate".into()),
        }
    }
    let v2 = Arc::new(SimStructure::permutational(2, &[]).unwrap());
    let w = pingpong_witness(&v2).unwrap();
    ensure!(
        matches!(closure(&v2, &[w.a1, w.a2], 500).unwrap(), ClosureResult::SizeBudgetExceeded(500)),
        "V2 closure of a1, a2 stayed below 500"
    );
    Ok(format!("100 mirror closures finite (largest {largest}), V2 trips 500"))
}

/// Classes of leaves under `x ~ y` iff some structure similarity maps `{x}` to `{y}`.
fn leaf_classes(s: &SimStructure) -> Vec<usize> {
    let leaves = s.space().hierarchy().unwrap().leaves().to_vec();
    let mut class: Vec<usize> = (0..leaves.len()).collect();
    for (i, x) in leaves.iter().enumerate() {
        for (j, y) in leaves.iter().enumerate() {
            if !s.sim_set(x, y).unwrap().is_empty() {
                let (a, b) = (class[i], class[j]);
                class.iter_mut().filter(|c| **c == b).for_each(|c| *c = a);
            }
        }
    }
    let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
    for c in class {
        *sizes.entry(c).or_default() += 1;
    }
    sizes.into_values().collect()
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

fn locally_given(s: &SimStructure, node: &Ball, f: &dyn Fn(&Ball) -> Ball) -> bool {
    let space = s.space();
    let h = space.hierarchy().unwrap();
    let leaves: Vec<&Ball> = h.leaves().iter().filter(|l| l.is_within(node)).collect();
    let whole = h.nodes().any(|t| {
        s.sim_set(node, t)
            .unwrap()
            .iter()
            .any(|g| leaves.iter().all(|l| g.eval(space, &Point::Leaf((*l).clone())).unwrap() == Point::Leaf(f(l))))
    });
    whole
        || (!space.is_singleton(node)
            && space.maximal_proper_subballs(node).unwrap().iter().all(|c| locally_given(s, c, f)))
}

/// `|Γ|` by testing every permutation of the leaves.
fn brute_force_order(s: &SimStructure) -> usize {
    let leaves = s.space().hierarchy().unwrap().leaves().to_vec();
    symmetric_group(leaves.len())
        .into_iter()
        .filter(|p| {
            let f = |l: &Ball| leaves[p.apply(leaves.iter().position(|x| x == l).unwrap())].clone();
            locally_given(s, &Ball::root(), &f)
        })
        .count()
}

fn criterion_5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut decomposed = 0;
    for _ in 0..24 {
        let s = Arc::new(random_finite_structure(6, 3, &mut rng).unwrap());
        let id = s.id();
        let report = finite_analyze(&s).map_err(|e| e.to_string())?;
        let sizes = leaf_classes(&s);
        let product: u128 = sizes.iter().map(|&d| factorial(d)).product();
        let brute = brute_force_order(&s);
        ensure!(report.order == brute, "{id}: order {} vs brute force {brute}", report.order);
        ensure!(report.order as u128 == product, "{id}: order {} vs product {product} of {sizes:?}", report.order);
        ensure!(enumerate_group(&s).unwrap().len() == brute, "{id}: enumeration size");
        ensure!(
            report.conditions_agree() && report.conditions == [true; 3],
            "{id}: conditions {:?}",
            report.conditions
        );

        let space = s.space();
        for g in s.all_similarities().into_iter().filter(|g| g.classify() == SimilarityClass::Equalizing) {
            let pieces = decompose_equalizing(&s, &g).map_err(|e| e.to_string())?;
            let doms: Vec<Ball> = pieces.iter().map(|(b, _)| b.clone()).collect();
            ensure!(space.canonicalize(doms).ok() == Some(ClopenSet::ball(g.dom().clone())), "{id}: pieces of {g}");
            for leaf in space.hierarchy().unwrap().leaves().iter().filter(|l| l.is_within(g.dom())) {
                let x = Point::Leaf(leaf.clone());
                let (_, piece) = pieces.iter().find(|(b, _)| leaf.is_within(b)).unwrap();
                let y = match piece {
                    Piece::Identity => x.clone(),
                    Piece::Separating(h) => {
                        ensure!(h.classify() == SimilarityClass::Separating && s.contains(h), "{id}: piece {h}");
                        h.eval(space, &x).unwrap()
                    }
                };
                ensure!(y == g.eval(space, &x).unwrap(), "{id}: {g} at {leaf:?}");
            }
            decomposed += 1;
        }
    }
    Ok(format!("24 structures, |G| = product of factorials, {decomposed} equalizing maps recomposed"))
}

fn criterion_6() -> Check {
    let start = Instant::now();
    let s = SimStructure::permutational(2, &[]).unwrap();
    let space = s.space();
    let parts = enumerate_partitions(space, 3, 1000).map_err(|e| e.to_string())?;
    let mut pairs = 0;
    for n in 2..=4 {
        let members: Vec<&Partition> = parts.iter().filter(|p| is_member(&s, p, n, 8).is_member()).collect();
        for p in &members {
            for q in &members {
                let v = common_refinement(&s, p, q, n, 8).map_err(|e| format!("{p} / {q}: {e}"))?;
                verify_vertex(&s, &v, n).map_err(|e| e.to_string())?;
                // Over V₂ every non-empty clopen set is locally similar to X.
                ensure!(v.partition.len() >= n && v.marked_count() >= n, "{p} / {q}: too few blocks");
                ensure!(
                    refines(space, p, &v.partition) && refines(space, q, &v.partition),
                    "{p} / {q}: not above both"
                );
                pairs += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    ensure!(pairs >= 200, "only {pairs} pairs");
    ensure!(elapsed < DIRECTEDNESS_LIMIT, "took {elapsed:?}");
    Ok(format!("{pairs} pairs in {} ms", elapsed.as_millis()))
}

fn blockwise<R: Rng>(s: &Arc<SimStructure>, blocks: &[Ball], pi: &Perm, rng: &mut R) -> GroupElement {
    let space = s.space();
    let mut entries = Vec::new();
    for (i, b) in blocks.iter().enumerate() {
        let g = random_permutational_element(s, 2, rng).unwrap();
        let to = &blocks[pi.apply(i)];
        for e in g.table() {
            let dom = b.concat(e.dom().letters());
            let cod = to.concat(e.cod().letters());
            entries.push(Similarity::new(space, dom, cod, e.map().clone()).unwrap());
        }
    }
    GroupElement::from_table(s, entries).unwrap()
}

fn criterion_7() -> Check {
    let s = Arc::new(SimStructure::permutational(2, &[]).unwrap());
    let space = s.space();
    let coarse = Partition::parse(space, "0|1").unwrap();
    let fine = Partition::parse(space, "00|01|10|11").unwrap();
    let chain = PartitionChain::new(space, vec![coarse, fine]).unwrap();
    let group = admissible_group(&chain, 8).map_err(|e| e.to_string())?;
    let same_half = |i: usize, j: usize| i / 2 == j / 2;
    let expected: Vec<Perm> = symmetric_group(4)
        .into_iter()
        .filter(|p| (0..4).all(|i| (0..4).all(|j| same_half(i, j) == same_half(p.apply(i), p.apply(j)))))
        .collect();
    ensure!(group.order() == 8 && expected.len() == 8, "order {}", group.order());
    let mut got = group.elements.clone();
    got.sort();
    ensure!(got == expected, "admissible set differs");

    let blocks: Vec<Ball> = ["00", "01", "10", "11"].iter().map(|b| b.parse().unwrap()).collect();
    let all = symmetric_group(4);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut inside = 0;
    for k in 0..200 {
        let g = if k % 4 == 0 {
            random_permutational_element(&s, 3, &mut rng).unwrap()
        } else {
            blockwise(&s, &blocks, all.choose(&mut rng).unwrap(), &mut rng)
        };
        let fixes = chain.vertices().iter().all(|v| act(&g, v).unwrap() == *v);
        let member = matches!(isotropy_membership(&g, &chain).unwrap(), Isotropy::InIsotropy(_));
        ensure!(member == fixes, "isotropy disagrees with the action on {g:?}");
        inside += usize::from(member);
    }
    let identity = Perm::identity(4);
    for _ in 0..200 {
        let g = blockwise(&s, &blocks, group.elements.choose(&mut rng).unwrap(), &mut rng);
        let lambda = blockwise(&s, &blocks, &identity, &mut rng);
        let conj = g.compose(&lambda).unwrap().compose(&g.inverse()).unwrap();
        for b in chain.finest().blocks() {
            ensure!(conj.image(b).unwrap() == *b, "conjugate moves {b}");
        }
    }
    Ok(format!("|admissible| = 8, 200 samples ({inside} in isotropy), 200 conjugates block-wise"))
}

fn sum_sets(a: &[bool], b: &[bool]) -> Vec<bool> {
    let mut out = vec![false; a.len()];
    for i in (0..a.len()).filter(|&i| a[i]) {
        for j in (0..b.len()).filter(|&j| b[j] && i + j < a.len()) {
            out[i + j] = true;
        }
    }
    out
}

/// Sizes of all partitions of a depth-`depth` ball into balls of depth at
/// most `limit`.
fn ball_sizes(d: usize, depth: usize, limit: usize, cap: usize) -> Vec<bool> {
    let mut sizes = vec![false; cap];
    sizes[1] = true;
    if depth < limit {
        let child = ball_sizes(d, depth + 1, limit, cap);
        let mut acc = vec![false; cap];
        acc[0] = true;
        for _ in 0..d {
            acc = sum_sets(&acc, &child);
        }
        sizes.iter_mut().zip(acc).for_each(|(s, a)| *s |= a);
    }
    sizes
}

/// Exhaustive search over ball partitions of both sets: `V_d` relates any
/// two balls, so a local similarity exists iff two partitions have equal size.
struct PartitionSearch {
    by_depth: Vec<Vec<bool>>,
}

impl PartitionSearch {
    const LIMIT: usize = 7;
    const CAP: usize = 1200;

    fn new(d: usize) -> PartitionSearch {
        let by_depth = (0..=Self::LIMIT).map(|k| ball_sizes(d, k, Self::LIMIT, Self::CAP)).collect();
        PartitionSearch { by_depth }
    }

    fn sizes(&self, set: &ClopenSet) -> Vec<bool> {
        let mut acc = vec![false; Self::CAP];
        acc[0] = true;
        for b in set.balls() {
            acc = sum_sets(&acc, &self.by_depth[b.depth()]);
        }
        acc
    }

    fn equivalent(&self, y: &[bool], z: &[bool]) -> bool {
        (1..Self::CAP).any(|k| y[k] && z[k])
    }
}

fn subsets(space: &Space, depth: usize) -> Vec<ClopenSet> {
    let base = space.balls_at_depth(depth);
    (1u64..1 << base.len())
        .map(|mask| {
            let chosen = (0..base.len()).filter(|i| mask >> i & 1 == 1).map(|i| base[i].clone()).collect();
            space.canonicalize(chosen).unwrap()
        })
        .collect()
}

fn random_subset<R: Rng>(space: &Space, depth: usize, rng: &mut R) -> ClopenSet {
    let base = space.balls_at_depth(depth);
    loop {
        let chosen: Vec<Ball> = base.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
        if !chosen.is_empty() {
            return space.canonicalize(chosen).unwrap();
        }
    }
}

fn compare_rule(
    s: &SimStructure,
    search: &PartitionSearch,
    pairs: &[(&ClopenSet, &ClopenSet)],
) -> Result<usize, String> {
    let mut sized: BTreeMap<&ClopenSet, Vec<bool>> = BTreeMap::new();
    for (y, z) in pairs {
        sized.entry(y).or_insert_with(|| search.sizes(y));
        sized.entry(z).or_insert_with(|| search.sizes(z));
    }
    for (y, z) in pairs {
        let expected = search.equivalent(&sized[y], &sized[z]);
        match locally_sim_equivalent(s, y, z, 8) {
            LocalEquivalence::Witness(w) => {
                ensure!(expected, "{}: rule relates {y} and {z}", s.id());
                w.validate(s, y, z).map_err(|e| format!("{}: witness {y} -> {z}: {e}", s.id()))?;
            }
            LocalEquivalence::NotEquivalent => ensure!(!expected, "{}: rule separates {y} and {z}", s.id()),
            LocalEquivalence::BudgetExceeded => return Err(format!("{}: budget exceeded on {y} {z}", s.id())),
        }
    }
    Ok(pairs.len())
}

fn criterion_8() -> Check {
    let v2 = SimStructure::permutational(2, &[]).unwrap();
    let sets2 = subsets(v2.space(), 3);
    let pairs2: Vec<_> = sets2.iter().flat_map(|y| sets2.iter().map(move |z| (y, z))).collect();
    let n2 = compare_rule(&v2, &PartitionSearch::new(2), &pairs2)?;

    let v3 = SimStructure::permutational(3, &[]).unwrap();
    let search3 = PartitionSearch::new(3);
    let sets3 = subsets(v3.space(), 2);
    let pairs3: Vec<_> = sets3.iter().flat_map(|y| sets3.iter().map(move |z| (y, z))).collect();
    let n3 = compare_rule(&v3, &search3, &pairs3)?;

    // All 2^27 - 1 depth-3 sets of the ternary tree are out of reach pairwise;
    // sample them instead.
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let deep: Vec<ClopenSet> = (0..2000).map(|_| random_subset(v3.space(), 3, &mut rng)).collect();
    let shallow: Vec<&ClopenSet> = sets3.iter().collect();
    let mut pairs = Vec::new();
    for (i, y) in deep.iter().enumerate() {
        for z in deep.iter().skip(i).take(20) {
            pairs.push((y, z));
        }
        pairs.push((y, *shallow.choose(&mut rng).unwrap()));
    }
    let n3_deep = compare_rule(&v3, &search3, &pairs)?;
    Ok(format!(
        "d=2 all {} depth-3 sets ({n2} pairs); d=3 all {} depth-2 sets ({n3} pairs) + {n3_deep} sampled depth-3 pairs",
        sets2.len(),
        sets3.len()
    ))
}

fn criterion_9() -> Check {
    let s = Arc::new(SimStructure::permutational_full(2).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..1000 {
        let g = random_permutational_element(&s, 4, &mut rng).unwrap();
        let text = g.to_string();
        let back = GroupElement::parse(&s, &text).map_err(|e| e.to_string())?;
        ensure!(back.to_string() == text && back == g, "element round trip:\n{text}");
    }
    for text in [
        "space word d=3\nsim permutational H=trivial\n",
        "name v2s2\nspace word d=2\nsim permutational H=full\n",
        "space word d=4\nsim permutational H=1230,1023\n",
        "space word d=2\nsim minus mirror\n",
        "space finite tree=((..)(...))\nsim finite gens.sims\n",
    ] {
        let d = GroupDescriptor::parse(text).map_err(|e| e.to_string())?;
        ensure!(d.to_string() == text, "descriptor round trip:\n{text}");
    }
    let space = Space::word(3).unwrap();
    for text in ["{\"0\"} {\"1\"} {\"2\"}", "{\"0\",\"10\"} {\"11\",\"12\",\"2\"}"] {
        let p = Partition::parse(&space, text).map_err(|e| e.to_string())?;
        ensure!(p.to_string() == text, "partition round trip: {p}");
    }

    let commands: [&[&str]; 8] = [
        &["pingpong", "--group", "vd2", "--words", "6"],
        &["pingpong", "--group", "vd3", "--dot"],
        &["ball-seq", "--group", "vd2-full", "--levels", "6"],
        &["census", "--group", "vd3"],
        &["closure", "--group", "mirror", "--elem", "@id", "--list"],
        &["poset", "enumerate", "--group", "vd2", "--depth", "3", "--n", "3"],
        &["poset", "admissible", "--group", "vd2", "--vertex", "0|1", "--vertex", "00|01|10|11"],
        &["export-dot", "--group", "vd3", "--depth", "2"],
    ];
    let bin = env!("CARGO_BIN_EXE_locsim");
    for c in commands {
        let first = run(std::iter::once("locsim").chain(c.iter().copied()));
        let second = run(std::iter::once("locsim").chain(c.iter().copied()));
        ensure!(first == second, "in-process output differs for {c:?}");
        let a = Command::new(bin).args(c).output().map_err(|e| e.to_string())?;
        let b = Command::new(bin).args(c).output().map_err(|e| e.to_string())?;
        ensure!(
            a.stdout == b.stdout && a.stderr == b.stderr && a.status == b.status,
            "process output differs for {c:?}"
        );
        ensure!(a.stdout == first.stdout.as_bytes(), "binary and library disagree for {c:?}");
    }
    Ok("1000 elements, descriptors and partitions round-trip; 8 commands stable".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("ping-pong suite", criterion_1),
        ("ball sequences", criterion_2),
        ("group arithmetic oracle", criterion_3),
        ("local finiteness (mirror)", criterion_4),
        ("finiteness proposition", criterion_5),
        ("poset directedness", criterion_6),
        ("isotropy", criterion_7),
        ("block-count rule vs partition search", criterion_8),
        ("determinism and round-trip", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail} [{ms} ms]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {why} [{ms} ms]", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
