//! Building blocks of the `entangle` command: tensor files, classification
//! reports and the catalog self-test.

pub mod io;
pub mod report;
pub mod selftest;
