use std::collections::BTreeSet;
use std::sync::Arc;

use super::similarity::Similarity;
use crate::error::{Error, Result};
use crate::perm::{generate_group, Perm};
use crate::ultrametric::{Ball, ClopenSet, Space};

/// Largest tail subgroup we are willing to list explicitly.
pub const MAX_SUBGROUP_ORDER: usize = 5040;
/// Default cap on the size of a closed finite similarity set.
pub const DEFAULT_FINITE_CAP: usize = 10_000;

/// A finitely presented similarity structure.
#[derive(Debug, Clone)]
pub struct SimStructure {
    space: Space,
    rule: Rule,
    name: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    /// `Sim(B₁,B₂) = {γ_σ | σ ∈ H}` on a word space; `h` lists all of `H`, sorted.
    Permutational { h: Vec<Perm> },
    /// Binary word space; non-trivial maps are `xA^ω → x̄A^ω`, `x̄` being `x`
    /// with its first letter flipped.
    Mirror,
    /// Explicit finite set closed under identities, inverses, compositions
    /// and restrictions.
    FiniteEnumerated(BTreeSet<Similarity>),
    /// The base structure without maps between `X` and a proper subball.
    Minus(Arc<SimStructure>),
    /// Base maps whose domain and codomain lie in the carrier, plus identities.
    Restricted { base: Arc<SimStructure>, carrier: ClopenSet },
}

/// Which of the three presentable families a structure ultimately derives from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseKind {
    Permutational,
    Mirror,
    Finite,
}

impl PartialEq for SimStructure {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self, other) || (self.space == other.space && self.rule == other.rule)
    }
}

impl Eq for SimStructure {}

impl SimStructure {
    /// `V_d(H)` with `H` generated by `generators` (empty for `H = 1`).
    pub fn permutational(d: usize, generators: &[Perm]) -> Result<SimStructure> {
        let space = Space::word(d)?;
        let h = generate_group(d, generators, MAX_SUBGROUP_ORDER)?;
        Ok(SimStructure { space, rule: Rule::Permutational { h }, name: None })
    }

    /// `V_d(Σ_d)`.
    pub fn permutational_full(d: usize) -> Result<SimStructure> {
        let mut gens = Vec::new();
        if d >= 2 {
            let mut swap: Vec<usize> = (0..d).collect();
            swap.swap(0, 1);
            gens.push(Perm::from_images(swap)?);
            gens.push(Perm::from_images((0..d).map(|i| (i + 1) % d).collect())?);
        }
        SimStructure::permutational(d, &gens)
    }

    pub fn mirror() -> SimStructure {
        SimStructure { space: Space::Word { d: 2 }, rule: Rule::Mirror, name: None }
    }

    /// Smallest structure on a finite space containing `generators`.
    pub fn finite(space: Space, generators: Vec<Similarity>, cap: usize) -> Result<SimStructure> {
        let h = space.hierarchy().ok_or(Error::NotFiniteSpace)?.clone();
        for g in &generators {
            g.check(&space)?;
        }
        let nodes: Vec<Ball> = h.nodes().cloned().collect();
        let mut all: BTreeSet<Similarity> = BTreeSet::new();
        let mut work: Vec<Similarity> = nodes.iter().map(|n| Similarity::identity(&space, n)).collect();
        work.extend(generators);
        while let Some(s) = work.pop() {
            if !all.insert(s.clone()) {
                continue;
            }
            if all.len() > cap {
                return Err(Error::ClosureTooLarge(cap));
            }
            work.push(s.inverse());
            for n in nodes.iter().filter(|n| n.is_within(s.dom()) && *n != s.dom()) {
                work.push(s.restrict(&space, n)?);
            }
            for t in &all {
                if t.dom() == s.cod() {
                    work.push(t.after(&s)?);
                }
                if t.cod() == s.dom() {
                    work.push(s.after(t)?);
                }
            }
        }
        Ok(SimStructure { space, rule: Rule::FiniteEnumerated(all), name: None })
    }

    /// `Sim⁻`.
    pub fn minus(base: Arc<SimStructure>) -> SimStructure {
        SimStructure { space: base.space.clone(), rule: Rule::Minus(base), name: None }
    }

    /// `Sim|_Y`.
    pub fn restricted(base: Arc<SimStructure>, carrier: ClopenSet) -> Result<SimStructure> {
        for b in carrier.balls() {
            base.space.check_ball(b)?;
        }
        if !carrier.is_subset(&base.space, &base.carrier()) {
            return Err(Error::InvalidStructure(format!("carrier {carrier} leaves the base carrier")));
        }
        Ok(SimStructure { space: base.space.clone(), rule: Rule::Restricted { base, carrier }, name: None })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> SimStructure {
        self.name = Some(name.into());
        self
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn rule(&self) -> &Rule {
        &self.rule
    }

    /// The set on which group elements act: `X`, or the carrier of a restriction.
    pub fn carrier(&self) -> ClopenSet {
        match &self.rule {
            Rule::Restricted { carrier, .. } => carrier.clone(),
            Rule::Minus(base) => base.carrier(),
            _ => ClopenSet::whole(),
        }
    }

    pub fn base_kind(&self) -> BaseKind {
        match &self.rule {
            Rule::Permutational { .. } => BaseKind::Permutational,
            Rule::Mirror => BaseKind::Mirror,
            Rule::FiniteEnumerated(_) => BaseKind::Finite,
            Rule::Minus(base) | Rule::Restricted { base, .. } => base.base_kind(),
        }
    }

    /// `Sim(B₁,B₂) = ∅` whenever the depths differ.
    pub fn is_depth_preserving(&self) -> bool {
        match self.base_kind() {
            BaseKind::Mirror => true,
            BaseKind::Permutational => false,
            BaseKind::Finite => self.all_similarities().iter().all(|s| s.scale_shift() == 0),
        }
    }

    /// Identifier used in element headers.
    pub fn id(&self) -> String {
        if let Some(n) = &self.name {
            return n.clone();
        }
        match &self.rule {
            Rule::Permutational { h } => {
                let d = match self.space {
                    Space::Word { d } => d,
                    Space::Finite(_) => unreachable!(),
                };
                let full: usize = (1..=d).product();
                if h.len() == 1 {
                    format!("vd{d}")
                } else if h.len() == full {
                    format!("vd{d}-full")
                } else {
                    let parts: Vec<String> = h.iter().filter(|p| !p.is_identity()).map(Perm::image_string).collect();
                    format!("vd{d}-H{}", parts.join("."))
                }
            }
            Rule::Mirror => "mirror".to_string(),
            Rule::FiniteEnumerated(all) => {
                let text = self.space.hierarchy().map(|h| h.text().to_string()).unwrap_or_default();
                format!("finite{text}#{}", all.len())
            }
            Rule::Minus(base) => format!("minus-{}", base.id()),
            Rule::Restricted { base, carrier } => format!("{}|{carrier}", base.id()),
        }
    }

    /// Membership test for a single similarity.
    pub fn contains(&self, g: &Similarity) -> bool {
        if g.check(&self.space).is_err() {
            return false;
        }
        match &self.rule {
            Rule::Permutational { h } => h.binary_search(g.map()).is_ok(),
            Rule::Mirror => {
                g.map().is_identity() && (g.dom() == g.cod() || (!g.dom().is_root() && *g.cod() == flip_first(g.dom())))
            }
            Rule::FiniteEnumerated(all) => all.contains(g),
            Rule::Minus(base) => base.contains(g) && (g.dom().is_root() == g.cod().is_root()),
            Rule::Restricted { base, carrier } => {
                let inside = carrier.contains_ball(g.dom()) && carrier.contains_ball(g.cod());
                inside && (base.contains(g) || g.is_identity())
            }
        }
    }

    /// The finite set `Sim(B₁,B₂)`, sorted.
    pub fn sim_set(&self, b1: &Ball, b2: &Ball) -> Result<Vec<Similarity>> {
        self.space.check_ball(b1)?;
        self.space.check_ball(b2)?;
        let out = match &self.rule {
            Rule::Permutational { h } => {
                h.iter().map(|sigma| Similarity::from_parts_unchecked(b1.clone(), b2.clone(), sigma.clone())).collect()
            }
            Rule::Mirror => {
                if b1 == b2 || (!b1.is_root() && *b2 == flip_first(b1)) {
                    vec![Similarity::from_parts_unchecked(b1.clone(), b2.clone(), Perm::identity(2))]
                } else {
                    Vec::new()
                }
            }
            Rule::FiniteEnumerated(all) => all.iter().filter(|s| s.dom() == b1 && s.cod() == b2).cloned().collect(),
            Rule::Minus(base) => {
                if b1.is_root() != b2.is_root() {
                    Vec::new()
                } else {
                    base.sim_set(b1, b2)?
                }
            }
            Rule::Restricted { base, carrier } => {
                if !carrier.contains_ball(b1) || !carrier.contains_ball(b2) {
                    Vec::new()
                } else {
                    let mut v = base.sim_set(b1, b2)?;
                    if b1 == b2 && !v.iter().any(Similarity::is_identity) {
                        v.push(Similarity::identity(&self.space, b1));
                        v.sort();
                    }
                    v
                }
            }
        };
        Ok(out)
    }

    /// Every similarity of a structure on a finite space.
    pub fn all_similarities(&self) -> Vec<Similarity> {
        match (&self.rule, &self.space) {
            (Rule::FiniteEnumerated(all), _) => all.iter().cloned().collect(),
            (_, Space::Finite(h)) => {
                let nodes: Vec<Ball> = h.nodes().cloned().collect();
                let mut out = Vec::new();
                for a in &nodes {
                    for b in &nodes {
                        out.extend(self.sim_set(a, b).unwrap_or_default());
                    }
                }
                out
            }
            _ => Vec::new(),
        }
    }
}

/// `x̄`: the address with its first letter flipped (binary alphabet).
pub fn flip_first(b: &Ball) -> Ball {
    let mut letters = b.letters().to_vec();
    if let Some(first) = letters.first_mut() {
        *first = 1 - *first;
    }
    Ball::from_letters(letters)
}
