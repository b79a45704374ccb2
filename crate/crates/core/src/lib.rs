pub mod chunking;
pub mod corpus;
pub mod eval;
pub mod generate;
pub mod pipeline;
pub mod promptfmt;
pub mod retrieval;
pub mod stats;
pub mod synth;
pub mod text;
