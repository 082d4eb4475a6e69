//! Topological counterparts of the relational operators.
//!
//! Selection and pullback build *initial* spaces (the result maps back into
//! the inputs); union, quotient and image build *final* spaces (the inputs map
//! onto the result). Either way the output is again a [`Space`](crate::Space).

mod map;
mod ops;
mod reduce;

pub use map::{check_map, check_map_within, MapReport, Monotonicity, SpaceMap};
pub use ops::{
    disjoint_union, image_space, product, product_key, product_with, pullback, pullback_with, quotient,
    quotient_detailed, select_subspace, AttributeClash, Quotient, PRODUCT_SEPARATOR,
};
pub use reduce::open_reduction;
