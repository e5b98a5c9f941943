//! Partitions with enough blocks locally equivalent to the whole space,
//! refinement chains, the action of `Γ`, and isotropy data of chains.

use std::fmt;
use std::sync::Arc;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::freeness::split_inside;
use crate::group::GroupElement;
use crate::perm::Perm;
use crate::simstruct::{locally_sim_equivalent, LocalEquivalence, LocalMap, SimStructure};
use crate::ultrametric::{Ball, ClopenSet, Partition, Space};

/// Default cap on the number of finest blocks for brute-force permutation searches.
pub const DEFAULT_BLOCK_CAP: usize = 8;
/// Default cap on the number of enumerated partitions.
pub const DEFAULT_ENUMERATION_BUDGET: usize = 100_000;

/// A partition together with the blocks certified locally equivalent to
/// the carrier; each mark stores its witness `block → carrier`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PosetVertex {
    pub partition: Partition,
    pub marked: Vec<(usize, LocalMap)>,
}

impl PosetVertex {
    pub fn marked_count(&self) -> usize {
        self.marked.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Membership {
    Member(PosetVertex),
    NotMember(PosetVertex),
}

impl Membership {
    pub fn vertex(&self) -> &PosetVertex {
        match self {
            Membership::Member(v) | Membership::NotMember(v) => v,
        }
    }

    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member(_))
    }
}

pub fn mark_blocks(s: &SimStructure, p: &Partition, depth_budget: usize) -> PosetVertex {
    let carrier = s.carrier();
    let marked = p
        .blocks()
        .iter()
        .enumerate()
        .filter_map(|(i, blk)| match locally_sim_equivalent(s, blk, &carrier, depth_budget) {
            LocalEquivalence::Witness(w) => Some((i, w)),
            _ => None,
        })
        .collect();
    PosetVertex { partition: p.clone(), marked }
}

pub fn is_member(s: &SimStructure, p: &Partition, n: usize, depth_budget: usize) -> Membership {
    let v = mark_blocks(s, p, depth_budget);
    if v.marked_count() >= n {
        Membership::Member(v)
    } else {
        Membership::NotMember(v)
    }
}

/// Re-checks every stored witness of a vertex.
pub fn verify_vertex(s: &SimStructure, v: &PosetVertex, n: usize) -> Result<()> {
    if v.marked_count() < n {
        return Err(Error::WitnessInvalid(format!("{} marked blocks, {n} required", v.marked_count())));
    }
    let carrier = s.carrier();
    for (i, w) in &v.marked {
        let blk = v.partition.blocks().get(*i).ok_or_else(|| Error::WitnessInvalid(format!("no block {i}")))?;
        w.validate(s, blk, &carrier)?;
    }
    Ok(())
}

/// `p ≤ q`: every block of `q` lies in a block of `p`.
pub fn refines(space: &Space, p: &Partition, q: &Partition) -> bool {
    q.blocks().iter().all(|qb| p.blocks().iter().any(|pb| qb.is_subset(space, pb)))
}

/// An upper bound of two vertices in `P_n`: blockwise intersections, then
/// carving out ball sequence levels if fewer than `n` blocks are marked.
pub fn common_refinement(
    s: &SimStructure,
    p: &Partition,
    q: &Partition,
    n: usize,
    depth_budget: usize,
) -> Result<PosetVertex> {
    let space = s.space();
    let blocks: Vec<ClopenSet> =
        p.blocks().iter().cartesian_product(q.blocks()).filter_map(|(a, b)| a.intersection(space, b)).collect();
    let r = Partition::of_carrier(space, &s.carrier(), blocks)?;
    let v = mark_blocks(s, &r, depth_budget);
    if v.marked_count() >= n {
        return Ok(v);
    }
    let r = split_inside(s, &r, n)?;
    let v = mark_blocks(s, &r, depth_budget);
    if v.marked_count() < n {
        return Err(Error::BudgetExceeded(depth_budget));
    }
    Ok(v)
}

/// `g·{P₁,…,P_k} = {g(P₁),…,g(P_k)}`.
pub fn act(g: &GroupElement, p: &Partition) -> Result<Partition> {
    let blocks = p.blocks().iter().map(|b| g.image(b)).collect::<Result<Vec<_>>>()?;
    Partition::of_carrier(g.space(), &g.structure().carrier(), blocks)
}

/// For `p ≤ q`, the index of the `p`-block containing each `q`-block.
pub fn refinement_function(space: &Space, p: &Partition, q: &Partition) -> Result<Vec<usize>> {
    q.blocks()
        .iter()
        .map(|qb| p.blocks().iter().position(|pb| qb.is_subset(space, pb)).ok_or(Error::NotRefinement))
        .collect()
}

/// A strictly increasing chain `𝒫₁ < … < 𝒫_k` under refinement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionChain {
    space: Space,
    vertices: Vec<Partition>,
}

impl PartitionChain {
    pub fn new(space: &Space, vertices: Vec<Partition>) -> Result<PartitionChain> {
        if vertices.is_empty() {
            return Err(Error::NotStrictChain);
        }
        for w in vertices.windows(2) {
            if w[0] == w[1] || !refines(space, &w[0], &w[1]) {
                return Err(Error::NotStrictChain);
            }
        }
        Ok(PartitionChain { space: space.clone(), vertices })
    }

    pub fn vertices(&self) -> &[Partition] {
        &self.vertices
    }

    pub fn finest(&self) -> &Partition {
        self.vertices.last().expect("non-empty chain")
    }

    /// Refinement functions from the finest vertex to each coarser one.
    fn fibers(&self) -> Vec<Vec<usize>> {
        let finest = self.finest();
        self.vertices[..self.vertices.len() - 1]
            .iter()
            .map(|v| refinement_function(&self.space, v, finest).expect("chain refines"))
            .collect()
    }

    /// Whether a permutation of the finest blocks descends to every vertex.
    pub fn is_admissible(&self, pi: &Perm) -> bool {
        self.fibers().iter().all(|f| descends(f, pi))
    }
}

/// `ρ(f(Q)) := f(π(Q))` is a well-defined bijection.
fn descends(f: &[usize], pi: &Perm) -> bool {
    (0..f.len()).all(|a| (0..f.len()).all(|b| (f[a] == f[b]) == (f[pi.apply(a)] == f[pi.apply(b)])))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissibleGroup {
    pub blocks: usize,
    pub elements: Vec<Perm>,
}

impl AdmissibleGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

/// `Σ_σ` by filtering all permutations of the finest blocks.
pub fn admissible_group(chain: &PartitionChain, cap: usize) -> Result<AdmissibleGroup> {
    let k = chain.finest().len();
    if k > cap {
        return Err(Error::TooManyBlocks { blocks: k, cap });
    }
    let fibers = chain.fibers();
    let elements = (0..k)
        .permutations(k)
        .map(|images| Perm::from_images(images).expect("permutation"))
        .filter(|pi| fibers.iter().all(|f| descends(f, pi)))
        .collect();
    Ok(AdmissibleGroup { blocks: k, elements })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Isotropy {
    InIsotropy(Perm),
    NotIn,
}

/// `g ∈ Γ_σ` iff `g` permutes the finest blocks by an admissible `π`.
pub fn isotropy_membership(g: &GroupElement, chain: &PartitionChain) -> Result<Isotropy> {
    let blocks = chain.finest().blocks();
    let mut images = Vec::with_capacity(blocks.len());
    for b in blocks {
        let img = g.image(b)?;
        match blocks.iter().position(|c| *c == img) {
            Some(j) => images.push(j),
            None => return Ok(Isotropy::NotIn),
        }
    }
    let pi = Perm::from_images(images)?;
    Ok(if chain.is_admissible(&pi) { Isotropy::InIsotropy(pi) } else { Isotropy::NotIn })
}

/// `Λ_σ ≅ ∏ Γ(Sim|_P)` over the finest blocks, and `|Σ_σ|` bounding `[Γ_σ : Λ_σ]`.
#[derive(Debug, Clone)]
pub struct IsotropySummary {
    pub factors: Vec<Arc<SimStructure>>,
    pub admissible: AdmissibleGroup,
}

impl IsotropySummary {
    pub fn index_bound(&self) -> usize {
        self.admissible.order()
    }
}

impl fmt::Display for IsotropySummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "factors {}", self.factors.len())?;
        for s in &self.factors {
            writeln!(f, "factor {}", s.id())?;
        }
        write!(f, "index-bound {}", self.index_bound())
    }
}

pub fn lambda_summary(s: &Arc<SimStructure>, chain: &PartitionChain, cap: usize) -> Result<IsotropySummary> {
    let admissible = admissible_group(chain, cap)?;
    let factors = chain
        .finest()
        .blocks()
        .iter()
        .map(|b| SimStructure::restricted(s.clone(), b.clone()).map(Arc::new))
        .collect::<Result<Vec<_>>>()?;
    Ok(IsotropySummary { factors, admissible })
}

/// All partitions of the space into balls of depth at most `depth_bound`.
pub fn enumerate_partitions(space: &Space, depth_bound: usize, budget: usize) -> Result<Vec<Partition>> {
    let mut count: u128 = 1;
    if let Space::Word { d } = space {
        for _ in 0..depth_bound {
            count = count.saturating_pow(*d as u32).saturating_add(1);
        }
    }
    if count > budget as u128 {
        return Err(Error::BudgetExceeded(budget));
    }
    let mut out = ball_partitions(space, &Ball::root(), depth_bound, budget)?
        .into_iter()
        .map(|balls| Partition::from_balls(space, balls))
        .collect::<Result<Vec<_>>>()?;
    out.sort();
    Ok(out)
}

fn ball_partitions(space: &Space, b: &Ball, remaining: usize, budget: usize) -> Result<Vec<Vec<Ball>>> {
    let mut out = vec![vec![b.clone()]];
    if remaining == 0 || space.is_singleton(b) {
        return Ok(out);
    }
    let mut acc: Vec<Vec<Ball>> = vec![Vec::new()];
    for c in space.maximal_proper_subballs(b)? {
        let sub = ball_partitions(space, &c, remaining - 1, budget)?;
        acc = acc.iter().flat_map(|p| sub.iter().map(move |q| p.iter().chain(q).cloned().collect())).collect();
        if acc.len() > budget {
            return Err(Error::BudgetExceeded(budget));
        }
    }
    out.extend(acc);
    Ok(out)
}
