use super::local::LocalMap;
use super::similarity::{Similarity, SimilarityClass};
use super::structure::{BaseKind, SimStructure};
use crate::error::{Error, Result};
use crate::ultrametric::{Ball, ClopenSet, Space};

/// Default exploration depth for searches over balls.
pub const DEFAULT_DEPTH_BOUND: usize = 6;

/// Two disjoint proper subballs of the top ball, each the image of a
/// structure similarity defined on the whole top ball.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualContractionWitness {
    pub b1: Ball,
    pub b2: Ball,
    pub g1: Similarity,
    pub g2: Similarity,
}

/// Searches balls in breadth-first order up to `depth_bound` levels below
/// the carrier and returns the first disjoint pair reachable from it.
pub fn dual_contraction(s: &SimStructure, depth_bound: usize) -> Option<DualContractionWitness> {
    let carrier = s.carrier();
    let top = carrier.as_ball()?.clone();
    let mut reachable: Vec<(Ball, Similarity)> = Vec::new();
    let candidates = s.space().balls_up_to_depth(top.depth() + depth_bound);
    for b in candidates.into_iter().filter(|b| b.is_within(&top) && *b != top) {
        let Some(g) = s.sim_set(&top, &b).ok()?.into_iter().next() else {
            continue;
        };
        if let Some((b1, g1)) = reachable.iter().find(|(a, _)| a.is_disjoint(&b)) {
            return Some(DualContractionWitness { b1: b1.clone(), b2: b, g1: g1.clone(), g2: g });
        }
        reachable.push((b, g));
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Piece {
    Identity,
    Separating(Similarity),
}

/// Splits an equalizing similarity of a finite space into identities and
/// separating restrictions on a partition of its domain.
pub fn decompose_equalizing(s: &SimStructure, g: &Similarity) -> Result<Vec<(Ball, Piece)>> {
    let space = s.space();
    if !space.is_finite() {
        return Err(Error::NotFiniteSpace);
    }
    if g.classify() != SimilarityClass::Equalizing {
        return Err(Error::NotEqualizing);
    }
    if !s.contains(g) {
        return Err(Error::EntryNotInSim(g.to_string()));
    }
    let mut out = Vec::new();
    split_equalizing(space, g, &mut out)?;
    Ok(out)
}

fn split_equalizing(space: &Space, g: &Similarity, out: &mut Vec<(Ball, Piece)>) -> Result<()> {
    if g.is_identity() {
        out.push((g.dom().clone(), Piece::Identity));
        return Ok(());
    }
    for child in space.maximal_proper_subballs(g.dom())? {
        let r = g.restrict(space, &child)?;
        if r.cod() == r.dom() {
            split_equalizing(space, &r, out)?;
        } else {
            out.push((child, Piece::Separating(r)));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Census {
    /// Exact number of separating similarities (finite spaces).
    Finite(usize),
    /// Three distinct separating similarities at increasing depth, all
    /// restrictions of `source`, or of powers of it when `source` contracts.
    Infinite { source: Similarity, separating: Vec<Similarity> },
    /// No contracting or separating similarity among balls up to the bound.
    ExhaustedBound(usize),
}

pub fn separating_census(s: &SimStructure, depth_bound: usize) -> Census {
    let space = s.space();
    if space.is_finite() {
        let n = s.all_similarities().iter().filter(|g| g.classify() == SimilarityClass::Separating).count();
        return Census::Finite(n);
    }
    let balls = space.balls_up_to_depth(depth_bound);
    for a in &balls {
        for b in balls.iter().filter(|b| b.is_within(a) && *b != a) {
            if let Some(gamma) = s.sim_set(a, b).unwrap_or_default().into_iter().next() {
                return contracting_witness(space, gamma);
            }
        }
    }
    for a in &balls {
        for b in balls.iter().filter(|b| b.is_disjoint(a)) {
            if let Some(gamma) = s.sim_set(a, b).unwrap_or_default().into_iter().next() {
                let mut separating = Vec::new();
                let mut c = a.clone();
                for _ in 0..3 {
                    c = c.child(0);
                    separating.push(gamma.restrict(space, &c).expect("subball of the domain"));
                }
                return Census::Infinite { source: gamma, separating };
            }
        }
    }
    Census::ExhaustedBound(depth_bound)
}

/// `γ: A → B` with `B ⊊ A`. A child `C` of `A` missing `B` gives disjoint
/// balls `Cᵢ = γⁱ(C)`, and `γ` restricted to each `Cᵢ` separates.
fn contracting_witness(space: &Space, gamma: Similarity) -> Census {
    let (outer, inner) = (gamma.dom().clone(), gamma.cod().clone());
    let c = space
        .maximal_proper_subballs(&outer)
        .expect("contracting domain has children")
        .into_iter()
        .find(|c| c.is_disjoint(&inner))
        .expect("some child misses the image");
    let mut separating = Vec::new();
    let mut ci = c;
    for _ in 0..3 {
        let r = gamma.restrict(space, &ci).expect("Cᵢ lies in the domain");
        ci = r.cod().clone();
        separating.push(r);
    }
    Census::Infinite { source: gamma, separating }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LocalEquivalence {
    Witness(LocalMap),
    NotEquivalent,
    BudgetExceeded,
}

impl LocalEquivalence {
    pub fn witness(&self) -> Option<&LocalMap> {
        match self {
            LocalEquivalence::Witness(w) => Some(w),
            _ => None,
        }
    }
}

/// Decides whether `y` and `z` are locally `s`-similar.
///
/// Permutational structures use the block-count rule: with `H = 1` already,
/// the identity-tail maps pair any two lists of balls of equal length, and
/// splitting a ball into its `d` children changes the count by `d − 1`, so
/// `y ≃ z` iff their canonical ball counts agree mod `d − 1`. Other
/// structures are decided by matching balls at the first uniform depth at
/// which every piece is already a ball of the canonical forms; beyond
/// `depth_budget` the search gives up.
pub fn locally_sim_equivalent(s: &SimStructure, y: &ClopenSet, z: &ClopenSet, depth_budget: usize) -> LocalEquivalence {
    let space = s.space();
    let carrier = s.carrier();
    if !y.is_subset(space, &carrier) || !z.is_subset(space, &carrier) {
        return LocalEquivalence::NotEquivalent;
    }
    if y == z {
        return LocalEquivalence::Witness(LocalMap::identity_on(space, y));
    }
    match s.base_kind() {
        BaseKind::Permutational => by_block_count(s, y, z, depth_budget),
        BaseKind::Mirror => {
            let top = y.max_depth().max(z.max_depth()).max(carrier.max_depth()).max(1);
            by_uniform_matching(s, y, z, top, depth_budget)
        }
        BaseKind::Finite => {
            let top = space.hierarchy().map_or(0, |h| h.max_depth());
            by_uniform_matching(s, y, z, top, depth_budget)
        }
    }
}

fn by_block_count(s: &SimStructure, y: &ClopenSet, z: &ClopenSet, depth_budget: usize) -> LocalEquivalence {
    let space = s.space();
    let Space::Word { d } = *space else { unreachable!("permutational structures live on word spaces") };
    let (cy, cz) = (y.balls().len(), z.balls().len());
    if (cy as i64 - cz as i64).rem_euclid(d as i64 - 1) != 0 {
        return LocalEquivalence::NotEquivalent;
    }
    let mut ys = y.balls().to_vec();
    let mut zs = z.balls().to_vec();
    while ys.len() < zs.len() {
        split_shallowest(&mut ys, d);
    }
    while zs.len() < ys.len() {
        split_shallowest(&mut zs, d);
    }
    let mut entries: Vec<Similarity> = ys
        .into_iter()
        .zip(zs)
        .map(|(a, b)| Similarity::prefix_rewrite(space, a, b).expect("word-space balls"))
        .collect();
    // Some derived structures (Sim⁻) reject a few pairings; refine those.
    for _ in 0..=depth_budget {
        let (good, bad): (Vec<Similarity>, Vec<Similarity>) = entries.into_iter().partition(|e| s.contains(e));
        if bad.is_empty() {
            return LocalEquivalence::Witness(LocalMap::new(space, good).expect("disjoint pieces"));
        }
        entries = good;
        for e in bad {
            for c in space.maximal_proper_subballs(e.dom()).expect("word space") {
                entries.push(e.restrict(space, &c).expect("child of the domain"));
            }
        }
    }
    LocalEquivalence::BudgetExceeded
}

fn split_shallowest(balls: &mut Vec<Ball>, d: usize) {
    let (i, _) = balls.iter().enumerate().min_by_key(|(_, b)| b.depth()).expect("non-empty");
    let b = balls.remove(i);
    for l in (0..d as u8).rev() {
        balls.insert(i, b.child(l));
    }
}

fn by_uniform_matching(
    s: &SimStructure,
    y: &ClopenSet,
    z: &ClopenSet,
    top: usize,
    depth_budget: usize,
) -> LocalEquivalence {
    let space = s.space();
    let start = y.max_depth().max(z.max_depth());
    for depth in start..=top.max(start) {
        if depth > depth_budget {
            return LocalEquivalence::BudgetExceeded;
        }
        let ys: Vec<Ball> = y.balls().iter().flat_map(|b| space.decompose_at_depth(b, depth)).collect();
        let zs: Vec<Ball> = z.balls().iter().flat_map(|b| space.decompose_at_depth(b, depth)).collect();
        if ys.len() != zs.len() {
            continue;
        }
        if let Some(entries) = greedy_match(s, &ys, &zs) {
            return LocalEquivalence::Witness(LocalMap::new(space, entries).expect("disjoint pieces"));
        }
    }
    LocalEquivalence::NotEquivalent
}

/// Sim-equivalence of balls is an equivalence relation, so pairing each
/// ball with any unused equivalent one never blocks a perfect matching.
fn greedy_match(s: &SimStructure, ys: &[Ball], zs: &[Ball]) -> Option<Vec<Similarity>> {
    let mut used = vec![false; zs.len()];
    let mut entries = Vec::with_capacity(ys.len());
    for a in ys {
        let (j, g) = zs
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .find_map(|(j, b)| s.sim_set(a, b).ok().and_then(|v| v.into_iter().next()).map(|g| (j, g)))?;
        used[j] = true;
        entries.push(g);
    }
    Some(entries)
}
