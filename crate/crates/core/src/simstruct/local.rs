use std::fmt;

use super::similarity::Similarity;
use super::structure::SimStructure;
use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::ultrametric::{check_disjoint, Ball, ClopenSet, Point, Space};

/// A finite table of similarities with pairwise disjoint domains and pairwise
/// disjoint codomains, sorted by domain. Serves both as a local similarity
/// `Y → Z` and as the table of a group element.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LocalMap {
    entries: Vec<Similarity>,
}

impl LocalMap {
    pub fn new(space: &Space, mut entries: Vec<Similarity>) -> Result<LocalMap> {
        for e in &entries {
            e.check(space)?;
        }
        entries.sort();
        let doms: Vec<Ball> = entries.iter().map(|e| e.dom().clone()).collect();
        check_disjoint(&doms)?;
        let mut cods: Vec<Ball> = entries.iter().map(|e| e.cod().clone()).collect();
        cods.sort();
        check_disjoint(&cods)?;
        Ok(LocalMap { entries })
    }

    pub fn identity_on(space: &Space, set: &ClopenSet) -> LocalMap {
        LocalMap { entries: set.balls().iter().map(|b| Similarity::identity(space, b)).collect() }
    }

    pub fn entries(&self) -> &[Similarity] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_depth(&self) -> usize {
        self.entries.iter().map(|e| e.dom().depth()).max().unwrap_or(0)
    }

    pub fn domain(&self, space: &Space) -> Result<ClopenSet> {
        space.canonicalize(self.entries.iter().map(|e| e.dom().clone()).collect())
    }

    pub fn codomain(&self, space: &Space) -> Result<ClopenSet> {
        space.canonicalize(self.entries.iter().map(|e| e.cod().clone()).collect())
    }

    pub fn inverse(&self) -> LocalMap {
        let mut entries: Vec<Similarity> = self.entries.iter().map(Similarity::inverse).collect();
        entries.sort();
        LocalMap { entries }
    }

    /// The entry whose domain contains `b`, if any.
    fn entry_containing(&self, b: &Ball) -> Option<&Similarity> {
        let idx = self.entries.partition_point(|e| e.dom() <= b);
        idx.checked_sub(1).map(|i| &self.entries[i]).filter(|e| b.is_within(e.dom()))
    }

    /// Entries whose domains lie inside `b`.
    fn entries_within<'a>(&'a self, b: &'a Ball) -> impl Iterator<Item = &'a Similarity> + 'a {
        let start = self.entries.partition_point(|e| e.dom() < b);
        self.entries[start..].iter().take_while(move |e| e.dom().is_within(b))
    }

    /// Pieces of `self` on the ball `b`, which must be covered by the domain.
    fn pieces_on(&self, space: &Space, b: &Ball) -> Result<Vec<Similarity>> {
        if let Some(e) = self.entry_containing(b) {
            return Ok(vec![e.restrict(space, b)?]);
        }
        let inside: Vec<Similarity> = self.entries_within(b).cloned().collect();
        if inside.is_empty() {
            return Err(Error::OutsideDomain(b.clone()));
        }
        let covered = space.canonicalize(inside.iter().map(|e| e.dom().clone()).collect())?;
        if covered.as_ball() != Some(b) {
            return Err(Error::OutsideDomain(b.clone()));
        }
        Ok(inside)
    }

    /// `self ∘ first`. The codomain of `first` must lie in the domain of `self`.
    pub fn after(&self, space: &Space, first: &LocalMap) -> Result<LocalMap> {
        let mut out = Vec::new();
        for e in &first.entries {
            for piece in self.pieces_on(space, e.cod())? {
                let pre = e.inverse().restrict(space, piece.dom())?.inverse();
                out.push(piece.after(&pre)?);
            }
        }
        out.sort();
        Ok(LocalMap { entries: out })
    }

    /// Image of a ball covered by the domain.
    pub fn image_ball(&self, space: &Space, b: &Ball) -> Result<ClopenSet> {
        let cods = self.pieces_on(space, b)?.into_iter().map(|p| p.cod().clone()).collect();
        space.canonicalize(cods)
    }

    pub fn image(&self, space: &Space, set: &ClopenSet) -> Result<ClopenSet> {
        let mut cods = Vec::new();
        for b in set.balls() {
            cods.extend(self.pieces_on(space, b)?.into_iter().map(|p| p.cod().clone()));
        }
        space.canonicalize(cods)
    }

    pub fn eval(&self, space: &Space, x: &Point) -> Result<Point> {
        let idx = self.entries.partition_point(|e| dom_le_point(e.dom(), x));
        let e = idx
            .checked_sub(1)
            .map(|i| &self.entries[i])
            .filter(|e| x.lies_in(e.dom()))
            .ok_or_else(|| Error::OutsideDomain(x.truncate(self.max_depth())))?;
        e.eval(space, x)
    }

    /// Merges full sibling families that are restrictions of one member of
    /// `s` until no merge applies. The result is the coarsest table
    /// (maximum regions) describing the same map.
    pub fn normalize(&self, space: &Space, s: &SimStructure) -> LocalMap {
        let mut entries = self.entries.clone();
        loop {
            let mut merged = false;
            let mut out = Vec::with_capacity(entries.len());
            let mut i = 0;
            while i < entries.len() {
                match merge_family(space, s, &entries[i..]) {
                    Some((parent, used)) => {
                        out.push(parent);
                        i += used;
                        merged = true;
                    }
                    None => {
                        out.push(entries[i].clone());
                        i += 1;
                    }
                }
            }
            entries = out;
            if !merged {
                return LocalMap { entries };
            }
        }
    }

    /// Checks that this is a local `s`-similarity from `y` onto `z`.
    pub fn validate(&self, s: &SimStructure, y: &ClopenSet, z: &ClopenSet) -> Result<()> {
        let space = s.space();
        let bad = |m: String| Error::WitnessInvalid(m);
        if self.entries.is_empty() {
            return Err(bad("empty table".into()));
        }
        LocalMap::new(space, self.entries.clone()).map_err(|e| bad(e.to_string()))?;
        if let Some(e) = self.entries.iter().find(|e| !s.contains(e)) {
            return Err(bad(format!("entry {e} is not in the structure")));
        }
        if self.domain(space)? != *y {
            return Err(bad(format!("domains do not partition {y}")));
        }
        if self.codomain(space)? != *z {
            return Err(bad(format!("codomains do not partition {z}")));
        }
        Ok(())
    }
}

/// Lexicographic comparison of a ball address with an infinite word.
fn dom_le_point(dom: &Ball, x: &Point) -> bool {
    for (i, &l) in dom.letters().iter().enumerate() {
        match x.letter(i) {
            None => return false,
            Some(xl) if xl != l => return l < xl,
            _ => {}
        }
    }
    true
}

/// If `entries` starts with a full sibling family that is the set of
/// restrictions of one member of `s`, returns that member and the family size.
fn merge_family(space: &Space, s: &SimStructure, entries: &[Similarity]) -> Option<(Similarity, usize)> {
    let e0 = &entries[0];
    if e0.dom().last() != Some(0) || e0.cod().is_root() {
        return None;
    }
    let p = e0.dom().parent()?;
    let k = space.child_count(&p);
    if entries.len() < k || (0..k).any(|j| *entries[j].dom() != p.child(j as u8)) {
        return None;
    }
    let family = &entries[..k];
    let q = e0.cod().parent()?;
    let candidate = match space {
        Space::Word { .. } => {
            let sigma = e0.map();
            let ok =
                family.iter().enumerate().all(|(j, e)| e.map() == sigma && *e.cod() == q.child(sigma.apply(j) as u8));
            if !ok {
                return None;
            }
            Similarity::from_parts_unchecked(p, q, sigma.clone())
        }
        Space::Finite(_) => {
            if space.child_count(&q) != k || family.iter().any(|e| e.cod().parent().as_ref() != Some(&q)) {
                return None;
            }
            let rp = space.leaf_range(&p)?;
            let rq = space.leaf_range(&q)?;
            let mut images = vec![0; rp.len()];
            for (j, e) in family.iter().enumerate() {
                let rj = space.leaf_range(&p.child(j as u8))?;
                let rc = space.leaf_range(e.cod())?;
                for l in 0..rj.len() {
                    images[rj.start - rp.start + l] = rc.start - rq.start + e.map().apply(l);
                }
            }
            let g = Similarity::new(space, p.clone(), q, Perm::from_images(images).ok()?).ok()?;
            let consistent =
                family.iter().enumerate().all(|(j, e)| g.restrict(space, &p.child(j as u8)).ok().as_ref() == Some(e));
            if !consistent {
                return None;
            }
            g
        }
    };
    s.contains(&candidate).then_some((candidate, k))
}

impl fmt::Display for LocalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(f, "{e}")?;
        }
        Ok(())
    }
}
