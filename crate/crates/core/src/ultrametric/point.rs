use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use super::ball::Ball;
use crate::error::{Error, Result};

/// A point of the space. Word-space points are eventually constant words,
/// kept with the repeated letter stripped from the end of the prefix so
/// that equal infinite words have equal representations.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Point {
    Word { prefix: Ball, tail: u8 },
    Leaf(Ball),
}

impl Point {
    pub fn word(prefix: Ball, tail: u8) -> Point {
        let mut letters = prefix.letters().to_vec();
        while letters.last() == Some(&tail) {
            letters.pop();
        }
        Point::Word { prefix: Ball::from_letters(letters), tail }
    }

    /// Letter at 0-based position `i`; `None` past the end of a leaf address.
    pub fn letter(&self, i: usize) -> Option<u8> {
        match self {
            Point::Word { prefix, tail } => Some(prefix.letters().get(i).copied().unwrap_or(*tail)),
            Point::Leaf(b) => b.letters().get(i).copied(),
        }
    }

    /// First `n` letters of the point, as a ball address.
    pub fn truncate(&self, n: usize) -> Ball {
        Ball::from_letters((0..n).map_while(|i| self.letter(i)).collect())
    }

    pub fn lies_in(&self, b: &Ball) -> bool {
        b.letters().iter().enumerate().all(|(i, &l)| self.letter(i) == Some(l))
    }

    /// Letters after the first `n`, as a (suffix, tail) pair; word points only.
    pub(crate) fn split_after(&self, n: usize) -> (Vec<u8>, u8) {
        match self {
            Point::Word { prefix, tail } => {
                let rest = prefix.letters().get(n..).map(<[u8]>::to_vec).unwrap_or_default();
                (rest, *tail)
            }
            Point::Leaf(_) => unreachable!("split_after on a finite-space point"),
        }
    }

    pub(crate) fn log_distance(&self, other: &Point) -> LogDistance {
        if self == other {
            return LogDistance::Zero;
        }
        let bound = match (self, other) {
            (Point::Word { prefix: a, .. }, Point::Word { prefix: b, .. }) => a.depth().max(b.depth()) + 1,
            _ => usize::MAX,
        };
        let n = (0..bound)
            .find(|&i| self.letter(i) != other.letter(i))
            .expect("distinct points differ within their prefixes");
        LogDistance::Exp(n as u32 + 1)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Word { prefix, tail } => write!(f, "{prefix}({tail})"),
            Point::Leaf(b) => write!(f, "{b}"),
        }
    }
}

impl FromStr for Point {
    type Err = Error;

    /// `001(1)` is the word 0011111…; a bare address is a finite-space leaf.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(open) = s.find('(') {
            let body = &s[open + 1..];
            let tail = body
                .strip_suffix(')')
                .and_then(|t| t.parse::<u8>().ok())
                .filter(|t| *t < 10)
                .ok_or_else(|| Error::Syntax { line: 0, message: format!("bad point literal {s:?}") })?;
            Ok(Point::word(s[..open].parse()?, tail))
        } else {
            Ok(Point::Leaf(s.parse()?))
        }
    }
}

/// Distance `exp(1-n)` stored as the integer `n`, or zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LogDistance {
    Zero,
    Exp(u32),
}

impl LogDistance {
    pub fn to_f64(self) -> f64 {
        match self {
            LogDistance::Zero => 0.0,
            LogDistance::Exp(n) => (1.0 - f64::from(n)).exp(),
        }
    }

    /// Multiplies the distance by `exp(-shift)`.
    pub fn shifted(self, shift: i64) -> LogDistance {
        match self {
            LogDistance::Zero => LogDistance::Zero,
            LogDistance::Exp(n) => LogDistance::Exp((i64::from(n) + shift) as u32),
        }
    }
}

/// Ordered by metric size: `Zero` is smallest, larger `n` is smaller.
impl Ord for LogDistance {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (LogDistance::Zero, LogDistance::Zero) => Ordering::Equal,
            (LogDistance::Zero, _) => Ordering::Less,
            (_, LogDistance::Zero) => Ordering::Greater,
            (LogDistance::Exp(a), LogDistance::Exp(b)) => b.cmp(a),
        }
    }
}

impl PartialOrd for LogDistance {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for LogDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogDistance::Zero => write!(f, "0"),
            LogDistance::Exp(n) => write!(f, "exp(1-{n})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ultrametric::Space;

    fn p(s: &str) -> Point {
        s.parse().unwrap()
    }

    #[test]
    fn first_difference_at_position_two() {
        let s = Space::word(2).unwrap();
        assert_eq!(s.distance(&p("001(0)"), &p("010(1)")).unwrap(), LogDistance::Exp(2));
        assert!((LogDistance::Exp(2).to_f64() - (-1f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn equal_points_have_zero_distance() {
        let s = Space::word(2).unwrap();
        assert_eq!(s.distance(&p("0110(1)"), &p("0110(1)")).unwrap(), LogDistance::Zero);
        // 01000… written two ways; compare letter-wise on length-5 expansions.
        let (x, y) = (p("01(0)"), p("010(0)"));
        let ex: Vec<_> = (0..5).map(|i| x.letter(i)).collect();
        let ey: Vec<_> = (0..5).map(|i| y.letter(i)).collect();
        assert_eq!(ex, ey);
        assert_eq!(s.distance(&x, &y).unwrap(), LogDistance::Zero);
    }

    #[test]
    fn ordering_follows_metric() {
        assert!(LogDistance::Zero < LogDistance::Exp(7));
        assert!(LogDistance::Exp(3) < LogDistance::Exp(1));
    }

    #[test]
    fn leaf_distance() {
        let s = Space::finite("((..)(...))").unwrap();
        assert_eq!(s.distance(&p("00"), &p("01")).unwrap(), LogDistance::Exp(2));
        assert_eq!(s.distance(&p("00"), &p("12")).unwrap(), LogDistance::Exp(1));
        assert!(s.distance(&p("0"), &p("12")).is_err());
    }

    #[test]
    fn display_round_trip() {
        assert_eq!(p("0011(1)").to_string(), "00(1)");
        assert_eq!(p("(0)").to_string(), "(0)");
    }
}
