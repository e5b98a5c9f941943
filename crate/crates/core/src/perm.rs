use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A permutation of `{0,…,n-1}` stored as its image list.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Perm(Vec<usize>);

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm((0..n).collect())
    }

    pub fn from_images(images: Vec<usize>) -> Result<Perm> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::InvalidPermutation(format!("{images:?} is not a bijection")));
            }
            seen[i] = true;
        }
        Ok(Perm(images))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &Perm) -> Perm {
        Perm(first.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Perm(inv)
    }

    /// Text form: `id` for the identity, digits when `n ≤ 10`, else a
    /// comma-separated image list.
    pub fn to_text(&self) -> String {
        if self.is_identity() {
            "id".to_string()
        } else {
            self.image_string()
        }
    }

    pub fn image_string(&self) -> String {
        if self.0.len() <= 10 {
            self.0.iter().map(|i| char::from_digit(*i as u32, 10).unwrap()).collect()
        } else {
            self.0.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
        }
    }

    /// Parses an image string of a permutation of `n` letters (`id` allowed).
    pub fn parse_n(text: &str, n: usize) -> Result<Perm> {
        if text == "id" {
            return Ok(Perm::identity(n));
        }
        let p: Perm = text.parse()?;
        if p.len() != n {
            return Err(Error::InvalidPermutation(format!("{text:?} does not permute {n} letters")));
        }
        Ok(p)
    }
}

impl FromStr for Perm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Perm> {
        let bad = || Error::InvalidPermutation(format!("bad permutation literal {s:?}"));
        let images = if s.contains(',') {
            s.split(',').map(|t| t.trim().parse::<usize>().map_err(|_| bad())).collect::<Result<Vec<_>>>()?
        } else {
            s.chars().map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad)).collect::<Result<Vec<_>>>()?
        };
        if images.is_empty() {
            return Err(bad());
        }
        Perm::from_images(images)
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm({})", self.image_string())
    }
}

/// Closes a generating set into the full list of group elements, sorted.
/// Fails once the group grows past `cap`.
pub fn generate_group(n: usize, generators: &[Perm], cap: usize) -> Result<Vec<Perm>> {
    for g in generators {
        if g.len() != n {
            return Err(Error::InvalidPermutation(format!("{g:?} does not permute {n} letters")));
        }
    }
    let mut elems: BTreeSet<Perm> = BTreeSet::from([Perm::identity(n)]);
    let mut frontier = vec![Perm::identity(n)];
    while let Some(p) = frontier.pop() {
        for g in generators {
            let q = g.after(&p);
            if elems.insert(q.clone()) {
                if elems.len() > cap {
                    return Err(Error::ClosureTooLarge(cap));
                }
                frontier.push(q);
            }
        }
    }
    Ok(elems.into_iter().collect())
}

/// All permutations of `n` letters in lexicographic order.
pub fn symmetric_group(n: usize) -> Vec<Perm> {
    use itertools::Itertools;
    (0..n).permutations(n).map(Perm).collect()
}
