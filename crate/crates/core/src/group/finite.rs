use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use super::element::GroupElement;
use crate::error::{Error, Result};
use crate::simstruct::{LocalMap, SimStructure, Similarity, SimilarityClass};
use crate::ultrametric::{Ball, Point, Space};

/// Exhaustive analysis of `Γ(Sim)` over a finite space.
#[derive(Debug, Clone)]
pub struct FiniteReport {
    pub order: usize,
    /// Sizes of the classes of points `x ~ y` with `Sim({x},{y}) ≠ ∅`,
    /// in order of first leaf.
    pub class_sizes: Vec<usize>,
    pub factorial_product: u128,
    pub separating: usize,
    pub non_identity: usize,
    pub contracting: usize,
    /// Finite group, finitely many separating, finitely many non-identity.
    pub conditions: [bool; 3],
}

impl FiniteReport {
    pub fn product_matches(&self) -> bool {
        self.order as u128 == self.factorial_product
    }

    pub fn conditions_agree(&self) -> bool {
        self.conditions.iter().all(|&c| c == self.conditions[0])
    }
}

impl fmt::Display for FiniteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sizes: Vec<String> = self.class_sizes.iter().map(usize::to_string).collect();
        writeln!(f, "order {}", self.order)?;
        writeln!(f, "classes {}", sizes.join(" "))?;
        writeln!(f, "product {}", self.factorial_product)?;
        writeln!(f, "product-matches {}", self.product_matches())?;
        writeln!(f, "separating {}", self.separating)?;
        writeln!(f, "non-identity {}", self.non_identity)?;
        writeln!(f, "contracting {}", self.contracting)?;
        write!(f, "conditions-agree {}", self.conditions_agree())
    }
}

/// Every element of `Γ(Sim)`: all tables over all partitions of the carrier
/// into hierarchy nodes, deduplicated by normal form.
pub fn enumerate_group(s: &Arc<SimStructure>) -> Result<Vec<GroupElement>> {
    let space = s.space();
    if !space.is_finite() {
        return Err(Error::NotFiniteSpace);
    }
    let mut by_dom: BTreeMap<Ball, Vec<Similarity>> = BTreeMap::new();
    for g in s.all_similarities() {
        by_dom.entry(g.dom().clone()).or_default().push(g);
    }
    let mut partitions: Vec<Vec<Ball>> = vec![Vec::new()];
    for b in s.carrier().balls() {
        let options = node_partitions(space, b);
        partitions =
            partitions.iter().flat_map(|p| options.iter().map(move |q| p.iter().chain(q).cloned().collect())).collect();
    }
    let mut found: BTreeSet<LocalMap> = BTreeSet::new();
    for doms in &partitions {
        let mut chosen = Vec::with_capacity(doms.len());
        assign(space, doms, &by_dom, &mut chosen, &mut found, s);
    }
    Ok(found.into_iter().map(|m| GroupElement::from_valid_map(s, m)).collect())
}

fn node_partitions(space: &Space, b: &Ball) -> Vec<Vec<Ball>> {
    let mut out = vec![vec![b.clone()]];
    if space.is_singleton(b) {
        return out;
    }
    let mut acc: Vec<Vec<Ball>> = vec![Vec::new()];
    for c in space.maximal_proper_subballs(b).expect("internal node") {
        let sub = node_partitions(space, &c);
        acc = acc.iter().flat_map(|p| sub.iter().map(move |q| p.iter().chain(q).cloned().collect())).collect();
    }
    out.extend(acc);
    out
}

fn assign(
    space: &Space,
    doms: &[Ball],
    by_dom: &BTreeMap<Ball, Vec<Similarity>>,
    chosen: &mut Vec<Similarity>,
    found: &mut BTreeSet<LocalMap>,
    s: &SimStructure,
) {
    let Some(dom) = doms.get(chosen.len()) else {
        // Codomains are disjoint with the right total size, so they cover.
        let map = LocalMap::new(space, chosen.clone()).expect("disjoint table");
        found.insert(map.normalize(space, s));
        return;
    };
    for g in by_dom.get(dom).into_iter().flatten() {
        if chosen.iter().all(|c| c.cod().is_disjoint(g.cod())) {
            chosen.push(g.clone());
            assign(space, doms, by_dom, chosen, found, s);
            chosen.pop();
        }
    }
}

pub fn finite_analyze(s: &Arc<SimStructure>) -> Result<FiniteReport> {
    let space = s.space();
    let h = space.hierarchy().ok_or(Error::NotFiniteSpace)?;
    let elements = enumerate_group(s)?;
    let carrier = s.carrier();
    let points: Vec<Ball> =
        h.leaves().iter().filter(|l| carrier.contains_point(&Point::Leaf((*l).clone()))).cloned().collect();
    let mut classes: Vec<Vec<Ball>> = Vec::new();
    for p in points {
        let home = classes.iter_mut().find(|c| !s.sim_set(&c[0], &p).unwrap_or_default().is_empty());
        match home {
            Some(c) => c.push(p),
            None => classes.push(vec![p]),
        }
    }
    let class_sizes: Vec<usize> = classes.iter().map(Vec::len).collect();
    let factorial_product = class_sizes.iter().map(|&n| (1..=n as u128).product::<u128>()).product();
    let sims = s.all_similarities();
    let count = |c: SimilarityClass| sims.iter().filter(|g| g.classify() == c).count();
    let non_identity = sims.iter().filter(|g| !g.is_identity()).count();
    Ok(FiniteReport {
        order: elements.len(),
        class_sizes,
        factorial_product,
        separating: count(SimilarityClass::Separating),
        non_identity,
        contracting: count(SimilarityClass::Contracting),
        // Everything above is an exhaustive finite enumeration.
        conditions: [true, true, true],
    })
}
