//! Stokes stratified spaces built from irregular values and from sign data.

mod circle;
mod elementary;
mod exponential;
mod level;
mod polyhedral;

pub use circle::{build_circle_space, direction_json, CircleSpace};
pub use elementary::{
    cover_strategies, elementarity_defects, elementary_cover, elementary_cover_with, is_elementary_arc,
    is_elementary_window, restrict_fibration, restrict_functor, stratum, window_between, window_functor,
    CoverFailure, CoverOutcome, CoverStrategy, ElementarityDefect, UniformCover, Window, WindowSearchCover,
};
pub use exponential::{
    integer_leading_data, kummer_pullback, leading_data, order_at, stokes_directions, ExponentialData,
    IrregularValue, PairOrder, Term,
};
pub use level::{level_structure_of, pole_level_structure, LevelStructure};
pub use polyhedral::{
    build_polyhedral_space, check_polyhedral_elementarity, line_example, sign_vector_name,
    sign_vectors_from_points, square_example, AffineForm, PairForm, PolyhedralInput, PolyhedralSpace,
    PolyhedralVerdict,
};
