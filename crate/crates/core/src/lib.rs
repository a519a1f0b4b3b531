pub mod characterize;
pub mod enumerate;
pub mod exec;
pub mod golden;
pub mod io;
pub mod morphism;
pub mod order;
pub mod partition;
pub mod pipeline;
pub mod relabel;
pub mod semimodule;
pub mod semiring;
