// exact rationals make error payloads large; they are rare and cheap to move
#![allow(clippy::result_large_err)]

pub mod acceptance;
pub mod cli;
pub mod coding;
pub mod corpus;
pub mod dlo;
pub mod formula;
pub mod interior;
pub mod rational;
pub mod rnf;
pub mod semantics;
pub mod wmso;
