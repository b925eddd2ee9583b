pub mod channel;
pub mod config;
pub mod harness;
pub mod numerics;
pub mod optimizer;
pub mod system;
