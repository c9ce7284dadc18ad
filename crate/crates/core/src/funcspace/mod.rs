//! Function algebra on discretized compact spaces.

pub mod cantor;
pub mod function;
pub mod random;
pub mod space;
pub mod supnorm;

pub use cantor::CantorPoint;
pub use function::{
    assemble_block_function, eval_function, sup_norm, sup_norm_detail, BlockFunction, BlockPart, BlockTable,
    SupNorm,
};
pub use random::random_function;
pub use space::{
    fiber_distance, BlockDescriptor, BlockShape, BlockSpace, Fiber, LimitPoint, PointRef, DEFAULT_CANTOR_DEPTH,
    DEFAULT_DEGREE, DEFAULT_RESOLUTION, DEFAULT_SEQUENCE_LEN,
};
