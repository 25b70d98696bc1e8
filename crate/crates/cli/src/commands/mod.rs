pub mod annotate;
pub mod evaluate;
pub mod extract;
pub mod gen_synthetic;
pub mod predict;
pub mod train;
