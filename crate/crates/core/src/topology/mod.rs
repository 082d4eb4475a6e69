//! Topological data types.
//!
//! A [`Space`] is a finite set of elements with a bounded-by relation `R`.
//! The relation generates the Alexandrov topology whose open sets are the
//! subsets `A` with `b ∈ A ⇒ a ∈ A` for every pair `(a, b)`. The space is T0
//! exactly when `R` is acyclic; only irreflexive pairs are stored, the
//! reflexive part lives in the derived [`Preorder`].

mod dimension;
mod element;
mod iso;
mod open_sets;
mod preorder;
mod shape;
mod space;

pub use element::{BoundedByPair, Element, ElementId, Scalar};
pub use iso::{homeomorphism, is_homeomorphic};
pub use open_sets::Limits;
pub use preorder::Preorder;
pub use shape::CellKind;
pub use space::{Space, SpaceBuilder};

pub(crate) use shape::components_by_reach;
pub(crate) use space::Indexed;
