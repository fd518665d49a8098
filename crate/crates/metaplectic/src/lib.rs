pub mod coeff;
pub mod error;
pub mod laurent;
pub mod metagroup;
pub mod chars;
pub mod galois;
pub mod phigamma;
pub mod classify;
pub mod meta;
pub mod checks;
pub mod cli;
