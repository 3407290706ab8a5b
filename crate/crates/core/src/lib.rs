pub mod error;
pub mod evolution;
pub mod experiment;
pub mod graph_states;
pub mod hamiltonian;
pub mod linalg;
pub mod metrics;
pub mod register;
