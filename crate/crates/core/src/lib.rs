pub mod config;
pub mod error;
pub mod fock;
pub mod kraus;
pub mod loss;
pub mod numeric;
pub mod probe;
pub mod qfim;
pub mod sweep;
pub mod tensor;
pub mod verify;
