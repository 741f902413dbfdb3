//! Planar diagram rewriting for Coxeter groups and dihedral braid groups.
//!
//! A diagram whose boundary reads a word `w` certifies that `w` is trivial in the
//! group. The engine rewrites closed diagrams to the empty diagram with local moves
//! and records every move in a replayable trace.

pub mod coxeter;
pub mod generate;
pub mod io;
pub mod map;
pub mod reduce;
pub mod rules;
pub mod trace;
