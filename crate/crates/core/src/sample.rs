//! Random elements, points and finite structures for property tests.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::perm::Perm;
use crate::simstruct::{flip_first, Rule, SimStructure, Similarity, DEFAULT_FINITE_CAP};
use crate::ultrametric::{Ball, Point, Space};

/// A ball partition of `top` reached by `splits` random splits of balls
/// shallower than `max_depth`. Fewer splits happen if no ball is splittable.
pub fn random_ball_partition<R: Rng>(
    space: &Space,
    top: &Ball,
    max_depth: usize,
    splits: usize,
    rng: &mut R,
) -> Vec<Ball> {
    let mut balls = vec![top.clone()];
    for _ in 0..splits {
        let open: Vec<usize> =
            (0..balls.len()).filter(|&i| balls[i].depth() < max_depth && !space.is_singleton(&balls[i])).collect();
        let Some(&i) = open.choose(rng) else { break };
        let b = balls.swap_remove(i);
        balls.extend(space.maximal_proper_subballs(&b).expect("splittable"));
    }
    balls.sort();
    balls
}

/// A random element of `V_d(H)` whose regions have depth at most `max_depth`.
pub fn random_permutational_element<R: Rng>(
    s: &Arc<SimStructure>,
    max_depth: usize,
    rng: &mut R,
) -> Result<GroupElement> {
    let Rule::Permutational { h } = s.rule() else {
        return Err(Error::InvalidStructure("expected a permutational structure".into()));
    };
    let space = s.space();
    let Space::Word { d } = *space else { unreachable!() };
    let full_splits = ((d.pow(max_depth as u32) - 1) / (d - 1)).min(24);
    let splits = rng.gen_range(0..=full_splits);
    let doms = random_ball_partition(space, &Ball::root(), max_depth, splits, rng);
    let mut cods = random_ball_partition(space, &Ball::root(), max_depth, splits, rng);
    if cods.len() != doms.len() {
        cods = doms.clone();
    }
    cods.shuffle(rng);
    let entries = doms
        .into_iter()
        .zip(cods)
        .map(|(a, b)| Similarity::new(space, a, b, h.choose(rng).expect("identity is in H").clone()))
        .collect::<Result<Vec<_>>>()?;
    GroupElement::from_table(s, entries)
}

/// A random element of the mirror structure of depth at most `max_depth`:
/// a ball partition of `"0"`, copied to `"1"`, with each mirrored pair
/// swapped or fixed at random.
pub fn random_mirror_element<R: Rng>(s: &Arc<SimStructure>, max_depth: usize, rng: &mut R) -> Result<GroupElement> {
    if !matches!(s.rule(), Rule::Mirror) {
        return Err(Error::InvalidStructure("expected the mirror structure".into()));
    }
    let space = s.space();
    let max_depth = max_depth.max(1);
    let splits = rng.gen_range(0..=(1usize << (max_depth - 1)) - 1);
    let half = random_ball_partition(space, &Ball::from_letters(vec![0]), max_depth, splits, rng);
    let mut entries = Vec::with_capacity(half.len() * 2);
    for b in half {
        let m = flip_first(&b);
        if rng.gen_bool(0.5) {
            entries.push(Similarity::new(space, b.clone(), m.clone(), Perm::identity(2))?);
            entries.push(Similarity::new(space, m, b, Perm::identity(2))?);
        } else {
            entries.push(Similarity::identity(space, &b));
            entries.push(Similarity::identity(space, &m));
        }
    }
    GroupElement::from_table(s, entries)
}

/// A random eventually constant word with a prefix of length `len`, or a random leaf.
pub fn random_point<R: Rng>(space: &Space, len: usize, rng: &mut R) -> Point {
    match space {
        Space::Word { d } => {
            let letters: Vec<u8> = (0..len).map(|_| rng.gen_range(0..*d as u8)).collect();
            Point::word(Ball::from_letters(letters), rng.gen_range(0..*d as u8))
        }
        Space::Finite(h) => Point::Leaf(h.leaves().choose(rng).expect("non-empty").clone()),
    }
}

/// A random hierarchy with `leaves` points, in the nested-parenthesis syntax.
pub fn random_tree<R: Rng>(leaves: usize, rng: &mut R) -> String {
    if leaves <= 1 {
        return ".".to_string();
    }
    let parts = rng.gen_range(2..=leaves);
    let mut sizes = vec![1; parts];
    for _ in parts..leaves {
        let i = rng.gen_range(0..parts);
        sizes[i] += 1;
    }
    let inner: String = sizes.into_iter().map(|n| random_tree(n, rng)).collect();
    format!("({inner})")
}

/// A random structure on a random hierarchy with at most `max_points`
/// points, generated by up to `max_gens` random similarities.
pub fn random_finite_structure<R: Rng>(max_points: usize, max_gens: usize, rng: &mut R) -> Result<SimStructure> {
    let n = rng.gen_range(2..=max_points.max(2));
    let space = Space::finite(&random_tree(n, rng))?;
    let h = space.hierarchy().expect("finite").clone();
    let nodes: Vec<Ball> = h.nodes().cloned().collect();
    let target = rng.gen_range(0..=max_gens);
    let mut gens = Vec::new();
    for _ in 0..50 {
        if gens.len() >= target {
            break;
        }
        let a = nodes.choose(rng).expect("non-empty").clone();
        let k = space.leaf_count(&a).expect("node");
        let same: Vec<&Ball> = nodes.iter().filter(|b| space.leaf_count(b) == Some(k)).collect();
        let b = (*same.choose(rng).expect("a itself")).clone();
        let mut images: Vec<usize> = (0..k).collect();
        images.shuffle(rng);
        if let Ok(g) = Similarity::new(&space, a, b, Perm::from_images(images)?) {
            gens.push(g);
        }
    }
    SimStructure::finite(space, gens, DEFAULT_FINITE_CAP)
}
