//! Finite-window computations around Schreier graphs of free-product actions:
//! reduced words, evaluable actions, labeled graphs, ball censuses,
//! hyperfinite partitions and amoeba towers.

pub mod actions;
pub mod amoeba;
pub mod graphs;
pub mod hyperfinite;
pub mod localstats;
pub mod rational;
pub mod words;
