//! Constructors for the classical multiplier symbols and the dyadic
//! Littlewood-Paley machinery.

mod divided;
mod dyadic;
mod gh;
mod mikhlin;
mod triangular;

pub use divided::{arazy_sqrt_symbol, beta_divided_symbol, FunctionTable};
pub use dyadic::{assemble_from_blocks, block_square_function, dyadic_index, DyadicBlocks};
pub use gh::{corner_embed, gh_symbol, hilbert_divided_symbol, GhFamilies};
pub use mikhlin::{mikhlin_condition, MikhlinCondition, UniformGrid};
pub use triangular::{
    dyadic_variation, marcinkiewicz_decompose, marcinkiewicz_decompose_columns, triangular_symbol,
    DyadicVariation, MarcinkiewiczDecomposition, RowDecomposition, TriangularData,
};
