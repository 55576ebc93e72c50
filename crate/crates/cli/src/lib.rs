//! Command-line front end for the (a,b)-module / theme engine: a small
//! declaration language for generators and changes of variable, analysis
//! commands, and the built-in verification suite.

pub mod ast;
pub mod parser;
pub mod runner;
pub mod suite;
