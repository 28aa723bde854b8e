pub mod cli;
pub mod extension;
pub mod fixtures;
pub mod graphs;
pub mod ktheory;
pub mod sixterm;
pub mod synth;
pub mod zlin;
