use std::collections::BTreeSet;
use std::fmt;

use super::ball::Ball;
use super::space::Space;
use crate::error::{Error, Result};

/// A non-empty clopen set in canonical form: the maximal balls it contains,
/// pairwise disjoint and sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClopenSet {
    balls: Vec<Ball>,
}

impl ClopenSet {
    pub fn whole() -> ClopenSet {
        ClopenSet { balls: vec![Ball::root()] }
    }

    pub fn ball(b: Ball) -> ClopenSet {
        ClopenSet { balls: vec![b] }
    }

    pub fn balls(&self) -> &[Ball] {
        &self.balls
    }

    pub fn is_whole(&self) -> bool {
        self.balls.len() == 1 && self.balls[0].is_root()
    }

    pub fn as_ball(&self) -> Option<&Ball> {
        match self.balls.as_slice() {
            [b] => Some(b),
            _ => None,
        }
    }

    pub fn max_depth(&self) -> usize {
        self.balls.iter().map(Ball::depth).max().unwrap_or(0)
    }

    pub fn contains_ball(&self, b: &Ball) -> bool {
        self.balls.iter().any(|c| b.is_within(c))
    }

    pub fn contains_point(&self, x: &super::Point) -> bool {
        self.balls.iter().any(|c| x.lies_in(c))
    }

    pub fn is_disjoint(&self, other: &ClopenSet) -> bool {
        self.balls.iter().all(|a| other.balls.iter().all(|b| a.is_disjoint(b)))
    }

    pub fn intersection(&self, space: &Space, other: &ClopenSet) -> Option<ClopenSet> {
        let mut out = Vec::new();
        for a in &self.balls {
            for b in &other.balls {
                if a.is_within(b) {
                    out.push(a.clone());
                } else if b.is_within(a) {
                    out.push(b.clone());
                }
            }
        }
        space.canonicalize(out).ok()
    }

    pub fn union(&self, space: &Space, other: &ClopenSet) -> ClopenSet {
        let all = self.balls.iter().chain(&other.balls).cloned().collect();
        space.canonicalize(all).expect("union of non-empty sets")
    }

    /// `self \ other`, or `None` when empty.
    pub fn difference(&self, space: &Space, other: &ClopenSet) -> Option<ClopenSet> {
        let mut pieces = self.balls.clone();
        for b in &other.balls {
            pieces = pieces.into_iter().flat_map(|p| ball_minus(space, &p, b)).collect();
        }
        space.canonicalize(pieces).ok()
    }

    pub fn is_subset(&self, space: &Space, other: &ClopenSet) -> bool {
        self.difference(space, other).is_none()
    }
}

/// `a \ b` as a list of disjoint balls.
pub(crate) fn ball_minus(space: &Space, a: &Ball, b: &Ball) -> Vec<Ball> {
    if a.is_within(b) {
        return Vec::new();
    }
    if !b.is_within(a) {
        return vec![a.clone()];
    }
    let mut out = Vec::new();
    let mut v = a.clone();
    for &step in b.suffix_after(a) {
        for l in 0..space.child_count(&v) as u8 {
            if l != step {
                out.push(v.child(l));
            }
        }
        v = v.child(step);
    }
    out
}

impl fmt::Display for ClopenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, b) in self.balls.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", b.quoted())?;
        }
        write!(f, "}}")
    }
}

impl Space {
    /// Canonical maximal-ball form of a union of balls that are pairwise
    /// disjoint or nested. Idempotent and independent of input order.
    pub fn canonicalize(&self, balls: Vec<Ball>) -> Result<ClopenSet> {
        if balls.is_empty() {
            return Err(Error::EmptySet);
        }
        for b in &balls {
            self.check_ball(b)?;
        }
        let mut set: BTreeSet<Ball> = BTreeSet::new();
        // Sorted order puts every ball right after the balls containing it.
        let mut sorted = balls;
        sorted.sort();
        sorted.dedup();
        let mut last_kept: Option<Ball> = None;
        for b in sorted {
            if last_kept.as_ref().is_some_and(|k| b.is_within(k)) {
                continue;
            }
            last_kept = Some(b.clone());
            set.insert(b);
        }
        // Merge full sibling families bottom-up.
        loop {
            let parents: BTreeSet<Ball> = set.iter().filter_map(Ball::parent).collect();
            let full: Vec<Ball> = parents
                .into_iter()
                .filter(|p| {
                    let k = self.child_count(p);
                    k > 0 && (0..k as u8).all(|l| set.contains(&p.child(l)))
                })
                .collect();
            if full.is_empty() {
                break;
            }
            for p in full {
                for l in 0..self.child_count(&p) as u8 {
                    set.remove(&p.child(l));
                }
                set.insert(p);
            }
        }
        Ok(ClopenSet { balls: set.into_iter().collect() })
    }

    pub fn clopen(&self, balls: &[&str]) -> Result<ClopenSet> {
        let parsed = balls.iter().map(|s| s.parse()).collect::<Result<Vec<Ball>>>()?;
        self.canonicalize(parsed)
    }
}

/// A partition of the space into non-empty clopen blocks, blocks sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition {
    blocks: Vec<ClopenSet>,
}

impl Partition {
    pub fn new(space: &Space, blocks: Vec<ClopenSet>) -> Result<Partition> {
        Self::of_carrier(space, &ClopenSet::whole(), blocks)
    }

    pub fn of_carrier(space: &Space, carrier: &ClopenSet, mut blocks: Vec<ClopenSet>) -> Result<Partition> {
        if blocks.is_empty() {
            return Err(Error::NotAPartition("no blocks".into()));
        }
        let all: Vec<Ball> = blocks.iter().flat_map(|b| b.balls.iter().cloned()).collect();
        check_disjoint(&all).map_err(|_| Error::NotAPartition("blocks overlap".into()))?;
        if space.canonicalize(all)? != *carrier {
            return Err(Error::NotAPartition("blocks do not cover the space".into()));
        }
        blocks.sort();
        Ok(Partition { blocks })
    }

    /// Partition whose blocks are single balls.
    pub fn from_balls(space: &Space, balls: Vec<Ball>) -> Result<Partition> {
        Partition::new(space, balls.into_iter().map(ClopenSet::ball).collect())
    }

    pub fn whole() -> Partition {
        Partition { blocks: vec![ClopenSet::whole()] }
    }

    pub fn blocks(&self) -> &[ClopenSet] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Index of the block containing the ball `b`, if one does.
    pub fn block_containing(&self, b: &Ball) -> Option<usize> {
        self.blocks.iter().position(|blk| blk.contains_ball(b))
    }

    /// `N` such that every ball of depth at least `N` lies inside a block:
    /// the largest depth among the canonical balls of all blocks.
    pub fn depth_bound(&self) -> usize {
        self.blocks.iter().map(ClopenSet::max_depth).max().unwrap_or(0)
    }

    pub fn parse(space: &Space, text: &str) -> Result<Partition> {
        let text = text.trim();
        let raw_blocks: Vec<String> = if text.contains('{') {
            text.split('}')
                .map(|s| s.trim().trim_start_matches('{').trim().to_string())
                .filter(|s| !s.is_empty())
                .collect()
        } else {
            text.split('|').map(|s| s.trim().to_string()).collect()
        };
        let mut blocks = Vec::new();
        for raw in raw_blocks {
            let balls = raw.split(',').map(|s| s.parse()).collect::<Result<Vec<Ball>>>()?;
            blocks.push(space.canonicalize(balls)?);
        }
        Partition::new(space, blocks)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// Errors with the first overlapping pair among `balls`.
pub(crate) fn check_disjoint(balls: &[Ball]) -> Result<()> {
    let mut sorted: Vec<&Ball> = balls.iter().collect();
    sorted.sort();
    for w in sorted.windows(2) {
        if w[1].is_within(w[0]) {
            return Err(Error::Overlap(w[0].clone(), w[1].clone()));
        }
    }
    Ok(())
}
