//! Elder-rule staircodes for augmented metric spaces.
//!
//! Given points with a filter function `f` and pairwise distances, the
//! sublevel Rips bifiltration has a zeroth homology module whose rank at
//! every grade `(σ, ε)` equals the number of staircases containing it. This
//! crate computes those staircases, their graded Betti numbers, and the
//! barcodes and treegrams they induce on lines of positive slope.
//!
//! ```
//! use staircode_core::{compute_staircode, AugmentedMetricSpace, Grade, Mode};
//!
//! let space = AugmentedMetricSpace::from_lower_triangular(
//!     vec!["a".into(), "b".into()],
//!     vec![0.0, 1.0],
//!     vec![vec![2.0]],
//! )
//! .unwrap();
//! let code = compute_staircode(&space, Mode::Generic).unwrap();
//! assert_eq!(code.count_containing(Grade::new(1.0, 1.0)), 2);
//! assert_eq!(code.count_containing(Grade::new(1.0, 2.0)), 1);
//! ```

pub mod betti;
pub mod error;
pub mod io;
pub mod mst;
pub mod oracle;
pub mod query;
pub mod space;
pub mod staircase;
pub mod staircode;
pub mod treegram;
pub mod union_find;

pub use betti::{
    check_constant_conqueror, check_ultrametric, decomposability_necessary_test, dimension_from_betti,
    dimension_function, graded_betti, graded_betti_ranked, ConquerorCheck, Decomposability, GradedBetti,
};
pub use error::{Error, Result};
pub use io::StaircodeDocument;
pub use query::{query_barcode_linear, IndexOptions, QueryIndex};
pub use space::{AugmentedMetricSpace, GenericOrdering, Pair};
pub use staircase::{staircase_contains, Bar, Corner, CornerType, Extended, Grade, Line, Staircase, Step};
pub use staircode::{compute_staircode, compute_staircode_ordered, DecoratedStaircase, Mode, Staircode};
pub use treegram::{build_treegram, decorate, elder_rule_barcode, Treegram};

/// Compute a staircode and its rank-accounted Betti numbers in one call.
pub fn analyze(space: &AugmentedMetricSpace, order: Option<&[usize]>, mode: Mode) -> Result<StaircodeDocument> {
    let code = match order {
        Some(o) => compute_staircode_ordered(space, o, mode)?,
        None => compute_staircode(space, mode)?,
    };
    let betti = graded_betti_ranked(&code, space)?;
    Ok(StaircodeDocument { staircode: code, betti })
}
