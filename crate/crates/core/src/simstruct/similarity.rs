use std::fmt;

use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::ultrametric::{Ball, Point, Space};

/// A similarity between two balls.
///
/// In a word space `map` is the tail permutation `σ` of the alphabet and the
/// similarity sends `dom·x₁x₂…` to `cod·σ(x₁)σ(x₂)…`. In a finite space `map`
/// sends the `i`-th leaf of `dom` (in hierarchy order) to the `map(i)`-th
/// leaf of `cod`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Similarity {
    dom: Ball,
    cod: Ball,
    map: Perm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SimilarityClass {
    Contracting,
    Separating,
    Equalizing,
}

impl fmt::Display for SimilarityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SimilarityClass::Contracting => "contracting",
            SimilarityClass::Separating => "separating",
            SimilarityClass::Equalizing => "equalizing",
        })
    }
}

impl Similarity {
    pub fn new(space: &Space, dom: Ball, cod: Ball, map: Perm) -> Result<Similarity> {
        let s = Similarity { dom, cod, map };
        s.check(space)?;
        Ok(s)
    }

    /// Word-space similarity with the identity tail.
    pub fn prefix_rewrite(space: &Space, dom: Ball, cod: Ball) -> Result<Similarity> {
        match space {
            Space::Word { d } => Similarity::new(space, dom, cod, Perm::identity(*d)),
            Space::Finite(_) => Err(Error::InvalidSimilarity("prefix rewrite needs a word space".into())),
        }
    }

    pub fn identity(space: &Space, b: &Ball) -> Similarity {
        let n = match space {
            Space::Word { d } => *d,
            Space::Finite(_) => space.leaf_count(b).expect("identity on a node of the hierarchy"),
        };
        Similarity { dom: b.clone(), cod: b.clone(), map: Perm::identity(n) }
    }

    pub(crate) fn from_parts_unchecked(dom: Ball, cod: Ball, map: Perm) -> Similarity {
        Similarity { dom, cod, map }
    }

    pub fn dom(&self) -> &Ball {
        &self.dom
    }

    pub fn cod(&self) -> &Ball {
        &self.cod
    }

    pub fn map(&self) -> &Perm {
        &self.map
    }

    pub fn is_identity(&self) -> bool {
        self.dom == self.cod && self.map.is_identity()
    }

    /// `depth(cod) - depth(dom)`: distances are multiplied by `exp(-shift)`.
    pub fn scale_shift(&self) -> i64 {
        self.cod.depth() as i64 - self.dom.depth() as i64
    }

    pub fn classify(&self) -> SimilarityClass {
        if self.dom == self.cod {
            SimilarityClass::Equalizing
        } else if self.dom.is_disjoint(&self.cod) {
            SimilarityClass::Separating
        } else {
            SimilarityClass::Contracting
        }
    }

    pub fn check(&self, space: &Space) -> Result<()> {
        space.check_ball(&self.dom)?;
        space.check_ball(&self.cod)?;
        match space {
            Space::Word { d } => {
                if self.map.len() != *d {
                    return Err(Error::InvalidSimilarity(format!(
                        "tail {:?} is not a permutation of {d} letters",
                        self.map
                    )));
                }
            }
            Space::Finite(h) => {
                let rd = space.leaf_range(&self.dom).unwrap();
                let rc = space.leaf_range(&self.cod).unwrap();
                if rd.len() != rc.len() || self.map.len() != rd.len() {
                    return Err(Error::InvalidSimilarity(format!(
                        "{:?} -> {:?} with {} leaves mapped to {}",
                        self.dom,
                        self.cod,
                        rd.len(),
                        rc.len()
                    )));
                }
                let leaves = h.leaves();
                for i in 0..rd.len() {
                    for j in i + 1..rd.len() {
                        let before = leaves[rd.start + i].join(&leaves[rd.start + j]).depth() - self.dom.depth();
                        let a = leaves[rc.start + self.map.apply(i)].clone();
                        let b = &leaves[rc.start + self.map.apply(j)];
                        let after = a.join(b).depth() - self.cod.depth();
                        if before != after {
                            return Err(Error::InvalidSimilarity(format!(
                                "leaf map {:?} does not scale distances uniformly",
                                self.map
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Image of a subball of the domain.
    pub fn image(&self, space: &Space, b: &Ball) -> Result<Ball> {
        Ok(self.restrict(space, b)?.cod)
    }

    /// Restriction to a subball `b ⊆ dom`.
    pub fn restrict(&self, space: &Space, b: &Ball) -> Result<Similarity> {
        if !b.is_within(&self.dom) {
            return Err(Error::NotASubball { inner: b.clone(), outer: self.dom.clone() });
        }
        match space {
            Space::Word { .. } => {
                let suffix: Vec<u8> =
                    b.suffix_after(&self.dom).iter().map(|&l| self.map.apply(l as usize) as u8).collect();
                Ok(Similarity { dom: b.clone(), cod: self.cod.concat(&suffix), map: self.map.clone() })
            }
            Space::Finite(h) => {
                let rd = space.leaf_range(&self.dom).unwrap();
                let rb = space.leaf_range(b).ok_or_else(|| Error::InvalidBall(b.clone()))?;
                let rc = space.leaf_range(&self.cod).unwrap();
                let offset = rb.start - rd.start;
                let images: Vec<usize> = (0..rb.len()).map(|i| self.map.apply(offset + i)).collect();
                let leaves = h.leaves();
                let node = images
                    .iter()
                    .map(|&k| leaves[rc.start + k].clone())
                    .reduce(|a, c| a.join(&c))
                    .expect("non-empty ball");
                let rn = space.leaf_range(&node).unwrap();
                if rn.len() != rb.len() {
                    return Err(Error::InvalidSimilarity(format!("image of {b:?} is not a ball")));
                }
                let shift = rn.start - rc.start;
                let map = Perm::from_images(images.iter().map(|&k| k - shift).collect())?;
                Ok(Similarity { dom: b.clone(), cod: node, map })
            }
        }
    }

    /// `self ∘ first`, defined when `first.cod == self.dom`.
    pub fn after(&self, first: &Similarity) -> Result<Similarity> {
        if first.cod != self.dom {
            return Err(Error::DomainMismatch { cod: first.cod.clone(), dom: self.dom.clone() });
        }
        Ok(Similarity { dom: first.dom.clone(), cod: self.cod.clone(), map: self.map.after(&first.map) })
    }

    pub fn inverse(&self) -> Similarity {
        Similarity { dom: self.cod.clone(), cod: self.dom.clone(), map: self.map.inverse() }
    }

    /// Image of a point of the domain.
    pub fn eval(&self, space: &Space, x: &Point) -> Result<Point> {
        if !x.lies_in(&self.dom) {
            return Err(Error::NotASubball { inner: x.truncate(self.dom.depth()), outer: self.dom.clone() });
        }
        match (space, x) {
            (Space::Word { .. }, Point::Word { .. }) => {
                let (rest, tail) = x.split_after(self.dom.depth());
                let mapped: Vec<u8> = rest.iter().map(|&l| self.map.apply(l as usize) as u8).collect();
                Ok(Point::word(self.cod.concat(&mapped), self.map.apply(tail as usize) as u8))
            }
            (Space::Finite(h), Point::Leaf(leaf)) => {
                let rd = space.leaf_range(&self.dom).unwrap();
                let rc = space.leaf_range(&self.cod).unwrap();
                let idx =
                    h.leaves()[rd.clone()].iter().position(|l| l == leaf).ok_or(Error::InvalidBall(leaf.clone()))?;
                Ok(Point::Leaf(h.leaves()[rc.start + self.map.apply(idx)].clone()))
            }
            _ => Err(Error::SpaceMismatch),
        }
    }
}

impl fmt::Display for Similarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} : {}", self.dom.quoted(), self.cod.quoted(), self.map.to_text())
    }
}

impl fmt::Debug for Similarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Parses one `"<dom>" -> "<cod>" : <tail>` line.
pub fn parse_similarity(space: &Space, line: &str, line_no: usize) -> Result<Similarity> {
    let syntax = |message: String| Error::Syntax { line: line_no, message };
    let (lhs, tail) = line.split_once(':').ok_or_else(|| syntax(format!("missing ':' in {line:?}")))?;
    let (dom, cod) = lhs.split_once("->").ok_or_else(|| syntax(format!("missing '->' in {line:?}")))?;
    let quoted = |s: &str| -> Result<Ball> {
        let s = s.trim();
        if s.len() < 2 || !s.starts_with('"') || !s.ends_with('"') {
            return Err(syntax(format!("ball {s:?} must be quoted")));
        }
        s.parse().map_err(|e: Error| syntax(e.to_string()))
    };
    let dom = quoted(dom)?;
    let cod = quoted(cod)?;
    let tail = tail.trim();
    let n = match space {
        Space::Word { d } => *d,
        Space::Finite(_) => space.leaf_count(&dom).ok_or_else(|| Error::InvalidBall(dom.clone()))?,
    };
    let map = Perm::parse_n(tail, n).map_err(|e| syntax(e.to_string()))?;
    Similarity::new(space, dom, cod, map)
}
