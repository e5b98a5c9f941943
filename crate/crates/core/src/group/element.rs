use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::simstruct::{parse_similarity, LocalMap, Rule, SimStructure, Similarity};
use crate::ultrametric::{check_disjoint, Ball, ClopenSet, Point, Space};

/// Default element budget for subgroup closures.
pub const DEFAULT_CLOSURE_BUDGET: usize = 10_000;

/// An element of `Γ(Sim)`, stored in maximum-region normal form.
#[derive(Clone)]
pub struct GroupElement {
    structure: Arc<SimStructure>,
    map: LocalMap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderResult {
    Finite(usize),
    ExceedsBound(usize),
}

#[derive(Debug, Clone)]
pub enum ClosureResult {
    Finite(Vec<GroupElement>),
    SizeBudgetExceeded(usize),
}

fn same_structure(a: &Arc<SimStructure>, b: &Arc<SimStructure>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl GroupElement {
    pub fn identity(s: &Arc<SimStructure>) -> GroupElement {
        let map = LocalMap::identity_on(s.space(), &s.carrier());
        GroupElement { structure: s.clone(), map }
    }

    /// Validates a table and brings it to normal form.
    pub fn from_table(s: &Arc<SimStructure>, entries: Vec<Similarity>) -> Result<GroupElement> {
        let space = s.space();
        let carrier = s.carrier();
        for e in &entries {
            e.check(space)?;
        }
        let partitions = |balls: Vec<Ball>| -> bool {
            !balls.is_empty()
                && check_disjoint(&balls).is_ok()
                && space.canonicalize(balls).ok().as_ref() == Some(&carrier)
        };
        if !partitions(entries.iter().map(|e| e.dom().clone()).collect()) {
            return Err(Error::DomainsNotPartition);
        }
        if !partitions(entries.iter().map(|e| e.cod().clone()).collect()) {
            return Err(Error::CodomainsNotPartition);
        }
        if let Some(bad) = entries.iter().find(|e| !s.contains(e)) {
            return Err(Error::EntryNotInSim(bad.to_string()));
        }
        let map = LocalMap::new(space, entries)?;
        Ok(GroupElement::from_valid_map(s, map))
    }

    pub(crate) fn from_valid_map(s: &Arc<SimStructure>, map: LocalMap) -> GroupElement {
        let map = map.normalize(s.space(), s);
        GroupElement { structure: s.clone(), map }
    }

    pub fn structure(&self) -> &Arc<SimStructure> {
        &self.structure
    }

    pub fn space(&self) -> &Space {
        self.structure.space()
    }

    pub fn map(&self) -> &LocalMap {
        &self.map
    }

    pub fn table(&self) -> &[Similarity] {
        self.map.entries()
    }

    pub fn is_identity(&self) -> bool {
        self.map.entries().iter().all(Similarity::is_identity)
    }

    /// `self ∘ a`.
    pub fn compose(&self, a: &GroupElement) -> Result<GroupElement> {
        if !same_structure(&self.structure, &a.structure) {
            return Err(Error::SpaceMismatch);
        }
        let map = self.map.after(self.space(), &a.map)?;
        Ok(GroupElement::from_valid_map(&self.structure, map))
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement::from_valid_map(&self.structure, self.map.inverse())
    }

    pub fn pow(&self, k: usize) -> GroupElement {
        let mut out = GroupElement::identity(&self.structure);
        for _ in 0..k {
            out = self.compose(&out).expect("same structure");
        }
        out
    }

    /// Largest depth of a maximum region.
    pub fn depth(&self) -> usize {
        self.map.max_depth()
    }

    pub fn order(&self, bound: usize) -> OrderResult {
        let mut p = self.clone();
        for k in 1..=bound {
            if p.is_identity() {
                return OrderResult::Finite(k);
            }
            p = self.compose(&p).expect("same structure");
        }
        OrderResult::ExceedsBound(bound)
    }

    pub fn evaluate(&self, x: &Point) -> Result<Point> {
        self.space().check_point(x)?;
        self.map.eval(self.space(), x)
    }

    /// Image of a clopen subset of the carrier.
    pub fn image(&self, set: &ClopenSet) -> Result<ClopenSet> {
        self.map.image(self.space(), set)
    }

    /// Parses the `elem <id>` text format; the header must name `s`.
    pub fn parse(s: &Arc<SimStructure>, text: &str) -> Result<GroupElement> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
        let (n, header) = lines.next().ok_or(Error::Syntax { line: 1, message: "empty element text".into() })?;
        let id = header
            .strip_prefix("elem ")
            .ok_or_else(|| Error::Syntax { line: n, message: format!("expected `elem <id>`, found {header:?}") })?;
        if id.trim() != s.id() {
            return Err(Error::Syntax {
                line: n,
                message: format!("element of {:?}, expected {:?}", id.trim(), s.id()),
            });
        }
        let entries = lines.map(|(n, l)| parse_similarity(s.space(), l, n)).collect::<Result<Vec<_>>>()?;
        GroupElement::from_table(s, entries)
    }
}

impl PartialEq for GroupElement {
    fn eq(&self, other: &Self) -> bool {
        same_structure(&self.structure, &other.structure) && self.map == other.map
    }
}

impl Eq for GroupElement {}

impl Hash for GroupElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.map.hash(state);
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "elem {}", self.structure.id())?;
        write!(f, "{}", self.map)
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let entries: Vec<String> = self.table().iter().map(Similarity::to_string).collect();
        write!(f, "[{}]", entries.join(", "))
    }
}

/// Breadth-first closure of `generators` under products and inverses.
pub fn closure(s: &Arc<SimStructure>, generators: &[GroupElement], budget: usize) -> Result<ClosureResult> {
    if generators.iter().any(|g| !same_structure(g.structure(), s)) {
        return Err(Error::SpaceMismatch);
    }
    let mut steps: Vec<GroupElement> = generators.to_vec();
    steps.extend(generators.iter().map(GroupElement::inverse));
    let id = GroupElement::identity(s);
    let mut seen: HashSet<LocalMap> = HashSet::from([id.map.clone()]);
    let mut order = vec![id.clone()];
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in &steps {
            let y = g.compose(&x)?;
            if seen.insert(y.map.clone()) {
                if seen.len() > budget {
                    return Ok(ClosureResult::SizeBudgetExceeded(budget));
                }
                order.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    Ok(ClosureResult::Finite(order))
}

/// Extends an element of `Γ(Sim|_Y)` by the identity off `Y`.
pub fn embed_restricted(s: &Arc<SimStructure>, y: &ClopenSet, inner: &GroupElement) -> Result<GroupElement> {
    check_restricted_over(inner, s, y)?;
    let space = s.space();
    let mut entries = inner.table().to_vec();
    if let Some(rest) = s.carrier().difference(space, y) {
        entries.extend(rest.balls().iter().map(|b| Similarity::identity(space, b)));
    }
    GroupElement::from_table(s, entries)
}

/// The isomorphism `Γ(Sim|_Y) → Γ(Sim|_Z)`, `a ↦ w ∘ a ∘ w⁻¹`.
pub fn restricted_iso(
    s: &Arc<SimStructure>,
    y: &ClopenSet,
    z: &ClopenSet,
    w: &LocalMap,
    a: &GroupElement,
) -> Result<GroupElement> {
    w.validate(s, y, z)?;
    check_restricted_over(a, s, y)?;
    let space = s.space();
    let target = Arc::new(SimStructure::restricted(s.clone(), z.clone())?);
    let conj = w.after(space, &a.map.after(space, &w.inverse())?)?;
    GroupElement::from_table(&target, conj.entries().to_vec())
}

fn check_restricted_over(a: &GroupElement, s: &Arc<SimStructure>, y: &ClopenSet) -> Result<()> {
    match a.structure().rule() {
        Rule::Restricted { base, carrier } if **base == **s && carrier == y => Ok(()),
        _ => Err(Error::CarrierMismatch),
    }
}
