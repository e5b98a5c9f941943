//! Ball sequences and the ping-pong pair `a₁, a₂` of a dually contracting
//! structure, with machine checks of every step.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{GroupElement, OrderResult};
use crate::simstruct::{dual_contraction, DualContractionWitness, SimStructure, Similarity, DEFAULT_DEPTH_BOUND};
use crate::ultrametric::{Ball, ClopenSet, Partition};

pub const DEFAULT_MAX_WORD_LEN: usize = 6;

fn contraction(s: &SimStructure) -> Result<DualContractionWitness> {
    dual_contraction(s, DEFAULT_DEPTH_BOUND).ok_or(Error::NotDuallyContracting)
}

/// `S₁ = {B₁, B₂}`, `Sᵢ₊₁ = {γ₁(B), γ₂(B) | B ∈ Sᵢ}`. Every ball carries a
/// structure similarity from the top ball onto it.
#[derive(Debug, Clone)]
pub struct BallSequence {
    pub gamma1: Similarity,
    pub gamma2: Similarity,
    pub levels: Vec<Vec<(Ball, Similarity)>>,
}

impl BallSequence {
    /// `depth(Sᵢ)`, the least depth of a ball in level `i` (1-based).
    pub fn min_depth(&self, i: usize) -> usize {
        self.levels[i - 1].iter().map(|(b, _)| b.depth()).min().unwrap_or(0)
    }

    pub fn level(&self, i: usize) -> Vec<Ball> {
        self.levels[i - 1].iter().map(|(b, _)| b.clone()).collect()
    }
}

impl fmt::Display for BallSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, level) in self.levels.iter().enumerate() {
            let balls: Vec<String> = level.iter().map(|(b, _)| b.quoted()).collect();
            writeln!(f, "S{} size={} depth={}: {}", i + 1, level.len(), self.min_depth(i + 1), balls.join(" "))?;
        }
        Ok(())
    }
}

pub fn ball_sequence(s: &SimStructure, i_max: usize) -> Result<BallSequence> {
    let w = contraction(s)?;
    let space = s.space();
    let mut levels = Vec::with_capacity(i_max);
    if i_max >= 1 {
        levels.push(vec![(w.b1.clone(), w.g1.clone()), (w.b2.clone(), w.g2.clone())]);
    }
    while levels.len() < i_max {
        let prev = levels.last().expect("non-empty");
        let mut next = Vec::with_capacity(prev.len() * 2);
        for gamma in [&w.g1, &w.g2] {
            for (b, h) in prev {
                let g = gamma.restrict(space, b)?.after(h)?;
                next.push((g.cod().clone(), g));
            }
        }
        levels.push(next);
    }
    Ok(BallSequence { gamma1: w.g1, gamma2: w.g2, levels })
}

/// Refines `p` so that it has at least `n` blocks that are balls admitting a
/// similarity from the top ball: the first level `Sᵢ` that is deep enough to
/// sit inside the blocks of `p` and has at least `n` balls is carved out.
pub fn split_inside(s: &SimStructure, p: &Partition, n: usize) -> Result<Partition> {
    if n == 0 {
        return Ok(p.clone());
    }
    let w = contraction(s)?;
    let space = s.space();
    let bound = p.depth_bound();
    let mut level: Vec<Ball> = vec![w.b1.clone(), w.b2.clone()];
    while level.iter().map(Ball::depth).min().unwrap_or(0) < bound || level.len() < n {
        let mut next = Vec::with_capacity(level.len() * 2);
        for gamma in [&w.g1, &w.g2] {
            for b in &level {
                next.push(gamma.image(space, b)?);
            }
        }
        level = next;
    }
    let mut blocks = Vec::new();
    for block in p.blocks() {
        let carved: Vec<Ball> = level.iter().filter(|b| block.contains_ball(b)).cloned().collect();
        let mut rest = Some(block.clone());
        for b in &carved {
            rest = rest.and_then(|r| r.difference(space, &ClopenSet::ball(b.clone())));
            blocks.push(ClopenSet::ball(b.clone()));
        }
        blocks.extend(rest);
    }
    Partition::of_carrier(space, &s.carrier(), blocks)
}

/// The configuration of the free-product construction.
#[derive(Debug, Clone)]
pub struct PingPongWitness {
    pub gamma1: Similarity,
    pub gamma2: Similarity,
    pub a: [Ball; 2],
    pub b: [Ball; 4],
    /// `δ₂: B₂ → B₃`, `δ₃: B₃ → B₄`, `δ₄: B₄ → B₂`.
    pub deltas: [Similarity; 3],
    pub a1: GroupElement,
    pub a2: GroupElement,
    pub x1: ClopenSet,
    pub x2: ClopenSet,
}

pub fn pingpong_witness(s: &Arc<SimStructure>) -> Result<PingPongWitness> {
    let w = contraction(s)?;
    let space = s.space();
    let (g1, g2) = (w.g1.clone(), w.g2.clone());
    let (a1b, a2b) = (w.b1.clone(), w.b2.clone());
    let b = [g1.image(space, &a1b)?, g1.image(space, &a2b)?, g2.image(space, &a1b)?, g2.image(space, &a2b)?];
    let delta2 =
        g2.restrict(space, &a1b)?.after(&g1.after(&g2.inverse().after(&g1.inverse().restrict(space, &b[1])?)?)?)?;
    let delta3 =
        g2.restrict(space, &a2b)?.after(&g2.after(&g1.inverse().after(&g2.inverse().restrict(space, &b[2])?)?)?)?;
    let delta4 = g1.restrict(space, &a2b)?.after(&g2.inverse().restrict(space, &b[3])?)?;

    let moved = space.canonicalize(vec![b[1].clone(), b[2].clone(), b[3].clone()])?;
    let mut t1 = vec![delta2.clone(), delta3.clone(), delta4.clone()];
    t1.extend(identity_off(s, &moved));
    let a1 = GroupElement::from_table(s, t1)?;

    let swapped = space.canonicalize(vec![b[1].clone(), a2b.clone()])?;
    let mut t2 = vec![g1.inverse().restrict(space, &b[1])?, g1.restrict(space, &a2b)?];
    t2.extend(identity_off(s, &swapped));
    let a2 = GroupElement::from_table(s, t2)?;

    Ok(PingPongWitness {
        gamma1: g1,
        gamma2: g2,
        x1: ClopenSet::ball(a2b.clone()),
        x2: ClopenSet::ball(b[1].clone()),
        a: [a1b, a2b],
        b,
        deltas: [delta2, delta3, delta4],
        a1,
        a2,
    })
}

fn identity_off(s: &SimStructure, moved: &ClopenSet) -> Vec<Similarity> {
    let space = s.space();
    s.carrier()
        .difference(space, moved)
        .map(|rest| rest.balls().iter().map(|b| Similarity::identity(space, b)).collect())
        .unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PingPongTranscript {
    pub checks: Vec<(String, bool)>,
    /// `⟨a₁, a₂⟩ ≅ ℤ₃ ∗ ℤ₂`, set only when every check passed.
    pub conclusion: bool,
}

impl fmt::Display for PingPongTranscript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, ok) in &self.checks {
            writeln!(f, "CHECK {name}: {}", if *ok { "PASS" } else { "FAIL" })?;
        }
        if self.conclusion {
            write!(f, "CONCLUSION <a1,a2> = Z3 * Z2")
        } else {
            write!(f, "CONCLUSION not established")
        }
    }
}

pub fn verify_pingpong(w: &PingPongWitness, order_bound: usize) -> Result<PingPongTranscript> {
    let [d2, d3, d4] = &w.deltas;
    let [_, b2, b3, b4] = &w.b;
    for (d, dom, cod, name) in [(d2, b2, b3, "delta2"), (d3, b3, b4, "delta3"), (d4, b4, b2, "delta4")] {
        if d.dom() != dom || d.cod() != cod {
            return Err(Error::MalformedWitness(format!(
                "{name} is {d}, expected {} -> {}",
                dom.quoted(),
                cod.quoted()
            )));
        }
    }
    let cycle =
        |x: &Similarity, y: &Similarity, z: &Similarity| -> Result<bool> { Ok(z.after(&y.after(x)?)?.is_identity()) };
    let space = w.a1.space();
    let subset = |img: Result<ClopenSet>, target: &ClopenSet| img.map(|i| i.is_subset(space, target)).unwrap_or(false);
    let a1_sq = w.a1.compose(&w.a1)?;
    let checks = vec![
        ("ord(a1)=3".to_string(), w.a1.order(order_bound) == OrderResult::Finite(3)),
        ("ord(a2)=2".to_string(), w.a2.order(order_bound) == OrderResult::Finite(2)),
        ("delta4.delta3.delta2=id(B2)".to_string(), cycle(d2, d3, d4)?),
        ("delta2.delta4.delta3=id(B3)".to_string(), cycle(d3, d4, d2)?),
        ("delta3.delta2.delta4=id(B4)".to_string(), cycle(d4, d2, d3)?),
        ("X1 disjoint X2".to_string(), w.x1.is_disjoint(&w.x2)),
        ("a1(X2)<=X1".to_string(), subset(w.a1.image(&w.x2), &w.x1)),
        ("a1^2(X2)<=X1".to_string(), subset(a1_sq.image(&w.x2), &w.x1)),
        ("a2(X1)<=X2".to_string(), subset(w.a2.image(&w.x1), &w.x2)),
    ];
    let conclusion = checks.iter().all(|(_, ok)| *ok);
    Ok(PingPongTranscript { checks, conclusion })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WordCheck {
    /// No reduced word of the given lengths is trivial; `words` were tested.
    Pass {
        words: usize,
    },
    Counterexample(String),
}

/// Evaluates every non-empty reduced alternating word in `{a₁, a₁²}` and
/// `{a₂}` with at most `max_len` syllables.
pub fn reduced_word_check(w: &PingPongWitness, max_len: usize) -> Result<WordCheck> {
    let a1_sq = w.a1.compose(&w.a1)?;
    let first: [(&str, &GroupElement); 2] = [("a1", &w.a1), ("a1^2", &a1_sq)];
    let second: [(&str, &GroupElement); 1] = [("a2", &w.a2)];
    let mut words = 0;
    for start_with_first in [true, false] {
        let id = GroupElement::identity(w.a1.structure());
        if let Some(bad) = extend(&id, Vec::new(), start_with_first, max_len, &first, &second, &mut words)? {
            return Ok(WordCheck::Counterexample(bad));
        }
    }
    Ok(WordCheck::Pass { words })
}

fn extend(
    prefix: &GroupElement,
    names: Vec<&str>,
    use_first: bool,
    max_len: usize,
    first: &[(&str, &GroupElement)],
    second: &[(&str, &GroupElement)],
    words: &mut usize,
) -> Result<Option<String>> {
    if names.len() == max_len {
        return Ok(None);
    }
    for (name, g) in if use_first { first } else { second } {
        let word = prefix.compose(g)?;
        let mut next = names.clone();
        next.push(name);
        *words += 1;
        if word.is_identity() {
            return Ok(Some(next.join(" ")));
        }
        if let Some(bad) = extend(&word, next, !use_first, max_len, first, second, words)? {
            return Ok(Some(bad));
        }
    }
    Ok(None)
}
