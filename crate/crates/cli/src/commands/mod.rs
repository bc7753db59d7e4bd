pub mod eval;
pub mod interactive;
pub mod learn_ops;
pub mod replay;
pub mod train;
