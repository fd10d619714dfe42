//! Integer-graded, action-filtered cochain complexes over Z/2.

pub mod chain_maps;
pub mod cli;
pub mod cohomology;
pub mod complex;
pub mod gf2;
pub mod maslov;
pub mod morse;
pub mod obstruction;
pub mod spectral;
