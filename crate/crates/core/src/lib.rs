pub mod cli;
pub mod corpus;
pub mod error;
pub mod neural;
pub mod query;
pub mod ranker;
pub mod scoring;
pub mod training;
