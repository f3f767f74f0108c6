//! Diagonal and σ-diagonal Einstein metrics on nice nilpotent Lie algebras.

pub mod algebra;
pub mod catalog;
pub mod curvature;
pub mod diagram;
pub mod einstein;
pub mod error;
pub mod linalg;
pub mod record;
