//! Variable names used by the encodings. Every name starts with `@` so it
//! cannot clash with a user formula written without that prefix.

use crate::machines::Op;

pub const S: &str = "@S";
pub const N: &str = "@N";
pub const END: &str = "@end";
pub const START: &str = "@start";
pub const TICK: &str = "@Tick";
pub const R: &str = "@R";
pub const Q: &str = "@Q";
pub const SSTAR: &str = "@Sstar";
pub const D: &str = "@D";

pub fn state(q: &str) -> String {
    format!("@S_{q}")
}

pub fn c(i: usize) -> String {
    format!("@C{i}")
}

pub fn c_plus(i: usize) -> String {
    format!("@C{i}p")
}

pub fn c_minus(i: usize) -> String {
    format!("@C{i}m")
}

pub fn instr(op: Op) -> String {
    format!("@I_{}", op.tag())
}

pub fn primed(p: &str) -> String {
    format!("{p}'")
}
