pub mod cli;
pub mod coincidence;
pub mod corpus;
pub mod format;
pub mod lattice;
pub mod mfs;
pub mod patch;
pub mod render;
pub mod sequence;
