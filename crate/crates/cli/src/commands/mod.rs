pub mod check;
pub mod region;
pub mod search;
pub mod simulate;
