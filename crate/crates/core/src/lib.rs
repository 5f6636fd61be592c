pub mod certificate;
pub mod checker;
pub mod data;
pub mod diagram;
pub mod dot;
pub mod engine;
pub mod error;
pub mod gadgets;
pub mod linalg;
pub mod localizer;
pub mod scalar;
