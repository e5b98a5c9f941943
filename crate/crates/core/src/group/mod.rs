//! Elements of `Γ(Sim)`: tables of structure similarities whose domains and
//! codomains partition the carrier.

mod element;
mod finite;

pub use element::{
    closure, embed_restricted, restricted_iso, ClosureResult, GroupElement, OrderResult, DEFAULT_CLOSURE_BUDGET,
};
pub use finite::{enumerate_group, finite_analyze, FiniteReport};
