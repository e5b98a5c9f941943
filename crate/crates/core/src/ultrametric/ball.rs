use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Address of a ball in a ball hierarchy: the word of child indices leading
/// from the root to the ball. The empty word is the whole space.
///
/// In a word space the ball `w` is the set `wA^ω`; in a finite space it is the
/// set of leaves below the node reached by `w`. Either way containment is the
/// prefix order and lexicographic order on addresses is the canonical order.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ball(Vec<u8>);

/// Outcome of comparing two balls. Two balls of an ultrametric space are
/// either nested or disjoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BallRelation {
    Equal,
    Nested { outer: Ball, inner: Ball },
    Disjoint,
}

impl Ball {
    pub fn root() -> Self {
        Ball(Vec::new())
    }

    pub fn from_letters(letters: Vec<u8>) -> Self {
        Ball(letters)
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, letter: u8) -> Ball {
        let mut w = self.0.clone();
        w.push(letter);
        Ball(w)
    }

    pub fn parent(&self) -> Option<Ball> {
        if self.0.is_empty() {
            None
        } else {
            Some(Ball(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn last(&self) -> Option<u8> {
        self.0.last().copied()
    }

    /// `self ⊆ other`.
    pub fn is_within(&self, other: &Ball) -> bool {
        self.0.starts_with(&other.0)
    }

    pub fn is_disjoint(&self, other: &Ball) -> bool {
        !self.is_within(other) && !other.is_within(self)
    }

    pub fn concat(&self, suffix: &[u8]) -> Ball {
        let mut w = self.0.clone();
        w.extend_from_slice(suffix);
        Ball(w)
    }

    /// Letters of `self` after the prefix `outer`. Caller guarantees containment.
    pub fn suffix_after(&self, outer: &Ball) -> &[u8] {
        &self.0[outer.0.len()..]
    }

    pub fn relation(&self, other: &Ball) -> BallRelation {
        if self == other {
            BallRelation::Equal
        } else if other.is_within(self) {
            BallRelation::Nested { outer: self.clone(), inner: other.clone() }
        } else if self.is_within(other) {
            BallRelation::Nested { outer: other.clone(), inner: self.clone() }
        } else {
            BallRelation::Disjoint
        }
    }

    /// Longest common prefix: the smallest ball containing both.
    pub fn join(&self, other: &Ball) -> Ball {
        let n = self.0.iter().zip(&other.0).take_while(|(a, b)| a == b).count();
        Ball(self.0[..n].to_vec())
    }

    /// Text form inside quotes, e.g. `"011"`.
    pub fn quoted(&self) -> String {
        format!("\"{self}\"")
    }
}

fn letter_char(l: u8) -> char {
    char::from_digit(u32::from(l), 10).unwrap_or('?')
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &l in &self.0 {
            write!(f, "{}", letter_char(l))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for Ball {
    type Err = Error;

    /// Accepts `011`, `"011"` and `""` (the root).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let inner = if s.len() >= 2 && s.starts_with('"') && s.ends_with('"') { &s[1..s.len() - 1] } else { s };
        let letters = inner
            .chars()
            .map(|c| {
                c.to_digit(10).map(|d| d as u8).ok_or_else(|| Error::Syntax {
                    line: 0,
                    message: format!("bad letter {c:?} in ball literal {s:?}"),
                })
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(Ball(letters))
    }
}
