use std::sync::Arc;

use locsim::group::GroupElement;
use locsim::perm::Perm;
use locsim::sample::{random_mirror_element, random_permutational_element, random_point};
use locsim::simstruct::{locally_sim_equivalent, LocalEquivalence, SimStructure, Similarity, SimilarityClass};
use locsim::ultrametric::{Ball, ClopenSet, Point, Space};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn structures() -> Vec<SimStructure> {
    vec![
        SimStructure::permutational(2, &[]).unwrap(),
        SimStructure::permutational_full(2).unwrap(),
        SimStructure::permutational(3, &["120".parse().unwrap()]).unwrap(),
        SimStructure::mirror(),
    ]
}

#[test]
fn sim_sets_satisfy_the_axioms() {
    for s in structures() {
        let space = s.space().clone();
        let balls = space.balls_up_to_depth(3);
        for b1 in &balls {
            assert!(s.sim_set(b1, b1).unwrap().contains(&Similarity::identity(&space, b1)), "{} {b1:?}", s.id());
            for b2 in &balls {
                for g in s.sim_set(b1, b2).unwrap() {
                    assert!(s.sim_set(b2, b1).unwrap().contains(&g.inverse()));
                    if b1.depth() < 3 {
                        for c in space.maximal_proper_subballs(b1).unwrap() {
                            let r = g.restrict(&space, &c).unwrap();
                            assert!(s.sim_set(&c, r.cod()).unwrap().contains(&r), "{} restrict {g}", s.id());
                        }
                    }
                    if b1.depth() <= 2 && b2.depth() <= 2 {
                        for b3 in balls.iter().filter(|b| b.depth() <= 2) {
                            for h in s.sim_set(b2, b3).unwrap() {
                                assert!(s.sim_set(b1, b3).unwrap().contains(&h.after(&g).unwrap()));
                            }
                        }
                    }
                }
            }
        }
    }
}

fn sim_strategy() -> impl Strategy<Value = (Ball, Ball, Vec<u8>)> {
    let ball = prop::collection::vec(0u8..3, 0..5).prop_map(Ball::from_letters);
    (ball.clone(), ball, Just(vec![0u8, 1, 2]).prop_shuffle())
}

proptest! {
    #[test]
    fn classification_is_a_trichotomy((dom, cod, images) in sim_strategy()) {
        let s = Space::word(3).unwrap();
        let perm = Perm::from_images(images.into_iter().map(usize::from).collect()).unwrap();
        let g = Similarity::new(&s, dom.clone(), cod.clone(), perm).unwrap();
        let expected = if dom == cod {
            SimilarityClass::Equalizing
        } else if cod.is_within(&dom) || dom.is_within(&cod) {
            SimilarityClass::Contracting
        } else {
            SimilarityClass::Separating
        };
        prop_assert_eq!(g.classify(), expected);
    }

    #[test]
    fn similarities_scale_distances((dom, cod, images) in sim_strategy(), seed in any::<u64>()) {
        let s = Space::word(3).unwrap();
        let perm = Perm::from_images(images.into_iter().map(usize::from).collect()).unwrap();
        let g = Similarity::new(&s, dom.clone(), cod.clone(), perm).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inside = |rng: &mut ChaCha8Rng| {
            let mut letters = dom.letters().to_vec();
            letters.extend((0..rng.gen_range(0..4)).map(|_| rng.gen_range(0..3u8)));
            Point::word(Ball::from_letters(letters), rng.gen_range(0..3u8))
        };
        for _ in 0..10 {
            let (x, y) = (inside(&mut rng), inside(&mut rng));
            let before = s.distance(&x, &y).unwrap();
            let after = s.distance(&g.eval(&s, &x).unwrap(), &g.eval(&s, &y).unwrap()).unwrap();
            prop_assert_eq!(after, before.shifted(cod.depth() as i64 - dom.depth() as i64));
        }
    }

    #[test]
    fn minus_structures_have_the_same_group(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v2 = Arc::new(SimStructure::permutational_full(2).unwrap());
        let v2m = Arc::new(SimStructure::minus(v2.clone()));
        let m = Arc::new(SimStructure::mirror());
        let mm = Arc::new(SimStructure::minus(m.clone()));
        let pairs = [
            (random_permutational_element(&v2, 4, &mut rng).unwrap(), &v2, &v2m),
            (random_mirror_element(&m, 4, &mut rng).unwrap(), &m, &mm),
        ];
        for (g, base, minus) in pairs {
            let h = GroupElement::from_table(minus, g.table().to_vec()).unwrap();
            prop_assert_eq!(h.table(), g.table());
            let back = GroupElement::from_table(base, h.table().to_vec()).unwrap();
            prop_assert_eq!(back.table(), g.table());
            let x = random_point(base.space(), 6, &mut rng);
            prop_assert_eq!(h.evaluate(&x).unwrap(), g.evaluate(&x).unwrap());
        }
    }
}

#[test]
fn minus_drops_only_maps_touching_the_whole_space() {
    let s = Space::word(2).unwrap();
    let v2 = Arc::new(SimStructure::permutational(2, &[]).unwrap());
    let m = SimStructure::minus(v2.clone());
    let root_to_0 = Similarity::prefix_rewrite(&s, Ball::root(), "0".parse().unwrap()).unwrap();
    assert!(v2.contains(&root_to_0));
    assert!(!m.contains(&root_to_0));
    assert!(m.contains(&Similarity::identity(&s, &Ball::root())));
    let inner = Similarity::prefix_rewrite(&s, "0".parse().unwrap(), "11".parse().unwrap()).unwrap();
    assert!(m.contains(&inner));
}

/// Sizes of all ball partitions of `b` using balls of depth at most `limit`,
/// as a bitmask over sizes.
fn partition_sizes(d: usize, depth: usize, limit: usize, cap: usize) -> Vec<bool> {
    let mut sizes = vec![false; cap + 1];
    sizes[1] = true;
    if depth < limit {
        let child = partition_sizes(d, depth + 1, limit, cap);
        let mut acc = vec![false; cap + 1];
        acc[0] = true;
        for _ in 0..d {
            acc = sum_sets(&acc, &child, cap);
        }
        for (i, ok) in acc.into_iter().enumerate() {
            sizes[i] |= ok;
        }
    }
    sizes
}

fn sum_sets(a: &[bool], b: &[bool], cap: usize) -> Vec<bool> {
    let mut out = vec![false; cap + 1];
    for (i, _) in a.iter().enumerate().filter(|(_, x)| **x) {
        for (j, _) in b.iter().enumerate().filter(|(_, x)| **x) {
            if i + j <= cap {
                out[i + j] = true;
            }
        }
    }
    out
}

/// All sizes of ball partitions of a clopen set with balls of depth at most `limit`.
fn set_sizes(d: usize, set: &ClopenSet, limit: usize, cap: usize) -> Vec<bool> {
    let mut acc = vec![false; cap + 1];
    acc[0] = true;
    for b in set.balls() {
        acc = sum_sets(&acc, &partition_sizes(d, b.depth(), limit, cap), cap);
    }
    acc
}

/// In `V_d(H)` any two balls are related by some similarity, so `Y` and `Z`
/// are locally similar iff they admit ball partitions of equal size.
fn oracle(d: usize, y: &ClopenSet, z: &ClopenSet) -> bool {
    let (limit, cap) = (6, 800);
    let (a, b) = (set_sizes(d, y, limit, cap), set_sizes(d, z, limit, cap));
    (1..=cap).any(|k| a[k] && b[k])
}

fn all_clopen_sets(s: &Space, depth: usize) -> Vec<ClopenSet> {
    let base = s.balls_at_depth(depth);
    (1u32..1 << base.len())
        .map(|mask| {
            let chosen = base.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, b)| b.clone()).collect();
            s.canonicalize(chosen).unwrap()
        })
        .collect()
}

#[test]
fn block_count_rule_matches_partition_search_binary_depth_two() {
    let s = Arc::new(SimStructure::permutational(2, &[]).unwrap());
    let sets = all_clopen_sets(s.space(), 2);
    for y in &sets {
        for z in &sets {
            let got = locally_sim_equivalent(&s, y, z, 8);
            assert_eq!(got.witness().is_some(), oracle(2, y, z), "{y} {z}");
            if let LocalEquivalence::Witness(w) = got {
                w.validate(&s, y, z).unwrap();
            }
        }
    }
}

#[test]
fn ternary_parity_examples() {
    let s = Arc::new(SimStructure::permutational(3, &[]).unwrap());
    let sp = s.space();
    let one = sp.clopen(&["0"]).unwrap();
    let two = sp.clopen(&["0", "1"]).unwrap();
    let three = sp.clopen(&["00", "1", "22"]).unwrap();
    assert!(locally_sim_equivalent(&s, &one, &ClopenSet::whole(), 8).witness().is_some());
    assert!(locally_sim_equivalent(&s, &one, &three, 8).witness().is_some());
    assert_eq!(locally_sim_equivalent(&s, &one, &two, 8), LocalEquivalence::NotEquivalent);
    assert!(!oracle(3, &one, &two));
}
