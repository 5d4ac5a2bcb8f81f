pub mod analysis;
pub mod astro;
pub mod cli;
pub mod contacts;
pub mod exec;
pub mod formulation;
pub mod model;
pub mod solver;
pub mod toy;
