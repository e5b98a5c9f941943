use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;

use super::ball::{Ball, BallRelation};
use super::point::{LogDistance, Point};
use crate::error::{Error, Result};

/// Largest alphabet / branching factor; letters are printed as single digits.
pub const MAX_BRANCHING: usize = 10;

/// The two supported families of compact ultrametric spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Space {
    /// Infinite words over `{0,…,d-1}` with `d(x,y) = exp(1-n)`, `n` the first
    /// differing position.
    Word { d: usize },
    /// Leaves of a finite rooted tree; every internal node has at least two
    /// children, so nodes and balls coincide.
    Finite(Hierarchy),
}

#[derive(Debug, Clone)]
struct NodeInfo {
    children: usize,
    leaves: Range<usize>,
}

/// A finite ball hierarchy. Nodes are addressed by child-index words.
#[derive(Debug, Clone)]
pub struct Hierarchy {
    text: String,
    nodes: BTreeMap<Ball, NodeInfo>,
    leaves: Vec<Ball>,
}

impl PartialEq for Hierarchy {
    fn eq(&self, other: &Self) -> bool {
        self.text == other.text
    }
}

impl Eq for Hierarchy {}

impl Hierarchy {
    /// Parses the nested-parenthesis form: `.` is a point, `(…)` a ball with
    /// its maximal proper subballs listed in order, e.g. `((..)(...))`.
    pub fn parse(text: &str) -> Result<Self> {
        let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut h = Hierarchy { text: chars.iter().collect(), nodes: BTreeMap::new(), leaves: Vec::new() };
        let mut pos = 0;
        h.parse_node(&chars, &mut pos, Ball::root())?;
        if pos != chars.len() {
            return Err(Error::InvalidSpace(format!("trailing input in tree {text:?}")));
        }
        Ok(h)
    }

    fn parse_node(&mut self, chars: &[char], pos: &mut usize, addr: Ball) -> Result<()> {
        let start = self.leaves.len();
        match chars.get(*pos) {
            Some('.') => {
                *pos += 1;
                self.leaves.push(addr.clone());
                self.nodes.insert(addr, NodeInfo { children: 0, leaves: start..start + 1 });
                Ok(())
            }
            Some('(') => {
                *pos += 1;
                let mut k = 0usize;
                while chars.get(*pos) != Some(&')') {
                    if *pos >= chars.len() {
                        return Err(Error::InvalidSpace("unbalanced parentheses".into()));
                    }
                    if k >= MAX_BRANCHING {
                        return Err(Error::InvalidSpace(format!(
                            "node {addr:?} has more than {MAX_BRANCHING} children"
                        )));
                    }
                    self.parse_node(chars, pos, addr.child(k as u8))?;
                    k += 1;
                }
                *pos += 1;
                if k < 2 {
                    return Err(Error::InvalidSpace(format!(
                        "internal node {addr:?} has {k} children, need at least 2"
                    )));
                }
                let end = self.leaves.len();
                self.nodes.insert(addr, NodeInfo { children: k, leaves: start..end });
                Ok(())
            }
            other => Err(Error::InvalidSpace(format!("unexpected {other:?} in tree"))),
        }
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn leaves(&self) -> &[Ball] {
        &self.leaves
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Ball> {
        self.nodes.keys()
    }

    pub fn max_depth(&self) -> usize {
        self.leaves.iter().map(Ball::depth).max().unwrap_or(0)
    }

    fn info(&self, b: &Ball) -> Option<&NodeInfo> {
        self.nodes.get(b)
    }
}

impl Space {
    pub fn word(d: usize) -> Result<Space> {
        if !(2..=MAX_BRANCHING).contains(&d) {
            return Err(Error::InvalidSpace(format!("alphabet size {d} outside 2..={MAX_BRANCHING}")));
        }
        Ok(Space::Word { d })
    }

    pub fn finite(tree: &str) -> Result<Space> {
        Ok(Space::Finite(Hierarchy::parse(tree)?))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Space::Finite(_))
    }

    pub fn hierarchy(&self) -> Option<&Hierarchy> {
        match self {
            Space::Finite(h) => Some(h),
            Space::Word { .. } => None,
        }
    }

    pub fn contains_ball(&self, b: &Ball) -> bool {
        match self {
            Space::Word { d } => b.letters().iter().all(|&l| (l as usize) < *d),
            Space::Finite(h) => h.info(b).is_some(),
        }
    }

    pub fn check_ball(&self, b: &Ball) -> Result<()> {
        if self.contains_ball(b) {
            Ok(())
        } else {
            Err(Error::InvalidBall(b.clone()))
        }
    }

    /// Number of maximal proper subballs; 0 for a singleton.
    pub fn child_count(&self, b: &Ball) -> usize {
        match self {
            Space::Word { d } => *d,
            Space::Finite(h) => h.info(b).map_or(0, |i| i.children),
        }
    }

    pub fn maximal_proper_subballs(&self, b: &Ball) -> Result<Vec<Ball>> {
        self.check_ball(b)?;
        let k = self.child_count(b);
        if k == 0 {
            return Err(Error::NoSubballs(b.clone()));
        }
        Ok((0..k as u8).map(|l| b.child(l)).collect())
    }

    /// Graph distance to the root in the ball hierarchy.
    pub fn depth(&self, b: &Ball) -> usize {
        b.depth()
    }

    pub fn compare(&self, a: &Ball, b: &Ball) -> Result<BallRelation> {
        self.check_ball(a)?;
        self.check_ball(b)?;
        Ok(a.relation(b))
    }

    pub fn is_singleton(&self, b: &Ball) -> bool {
        self.child_count(b) == 0
    }

    /// Leaf index range of a finite-space node.
    pub(crate) fn leaf_range(&self, b: &Ball) -> Option<Range<usize>> {
        self.hierarchy().and_then(|h| h.info(b)).map(|i| i.leaves.clone())
    }

    pub(crate) fn leaf_count(&self, b: &Ball) -> Option<usize> {
        self.leaf_range(b).map(|r| r.len())
    }

    /// All balls of depth exactly `k` (finite spaces: nodes at depth `k`).
    pub fn balls_at_depth(&self, k: usize) -> Vec<Ball> {
        match self {
            Space::Word { d } => {
                let mut out = vec![Ball::root()];
                for _ in 0..k {
                    out = out.iter().flat_map(|b| (0..*d as u8).map(move |l| b.child(l))).collect();
                }
                out
            }
            Space::Finite(h) => h.nodes().filter(|b| b.depth() == k).cloned().collect(),
        }
    }

    /// All balls of depth at most `k`, ordered by depth then lexicographically.
    pub fn balls_up_to_depth(&self, k: usize) -> Vec<Ball> {
        (0..=k).flat_map(|i| self.balls_at_depth(i)).collect()
    }

    /// The pieces of `b` at depth exactly `k`, keeping shallower singletons whole.
    pub fn decompose_at_depth(&self, b: &Ball, k: usize) -> Vec<Ball> {
        if b.depth() >= k || self.is_singleton(b) {
            return vec![b.clone()];
        }
        (0..self.child_count(b) as u8).flat_map(|l| self.decompose_at_depth(&b.child(l), k)).collect()
    }

    /// Ultrametric distance as an integer exponent.
    pub fn distance(&self, x: &Point, y: &Point) -> Result<LogDistance> {
        self.check_point(x)?;
        self.check_point(y)?;
        Ok(x.log_distance(y))
    }

    pub fn check_point(&self, x: &Point) -> Result<()> {
        match (self, x) {
            (Space::Word { d }, Point::Word { prefix, tail }) => {
                if (*tail as usize) < *d && self.contains_ball(prefix) {
                    Ok(())
                } else {
                    Err(Error::InvalidBall(prefix.clone()))
                }
            }
            (Space::Finite(h), Point::Leaf(b)) => {
                if h.info(b).is_some_and(|i| i.children == 0) {
                    Ok(())
                } else {
                    Err(Error::InvalidBall(b.clone()))
                }
            }
            _ => Err(Error::SpaceMismatch),
        }
    }

    /// Points usable as an evaluation grid: every word of length `len`
    /// followed by a constant tail of `tail_letter` (word spaces), or every
    /// leaf (finite spaces).
    pub fn grid_points(&self, len: usize, tail_letter: u8) -> Vec<Point> {
        match self {
            Space::Word { .. } => self.balls_at_depth(len).into_iter().map(|b| Point::word(b, tail_letter)).collect(),
            Space::Finite(h) => h.leaves.iter().cloned().map(Point::Leaf).collect(),
        }
    }

    pub fn descriptor(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::Word { d } => write!(f, "space word d={d}"),
            Space::Finite(h) => write!(f, "space finite tree={}", h.text),
        }
    }
}
