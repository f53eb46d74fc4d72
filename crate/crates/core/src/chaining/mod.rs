//! Generic chaining: schedules, admissible sequences, decompositions,
//! Bernoulli suprema, tail functionals and good events.

pub mod admissible;
pub mod ball;
pub mod bernoulli;
pub mod decomposition;
pub mod eta;
pub mod exponential;
pub mod omega;
pub mod phi;
pub mod tail;
