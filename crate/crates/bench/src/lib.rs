//! Fixtures shared by the benchmarks.

use skewcode::central::{default_tuple, DEFAULT_ENUM_CAP};
use skewcode::codes::{build_code, Ambient, CodeParams, Family};
use skewcode::{build_tower, Code, Elem, FieldSpec, Result};

/// An S code over the default tuple.
pub fn s_code(q: u32, n: u32, s: u32, t: usize, k: usize, eta: Elem) -> Result<Code> {
    let tower = build_tower(&FieldSpec::from_q(q, n, s)?)?;
    let tuple = default_tuple(tower.k(), s as usize, t, DEFAULT_ENUM_CAP)?;
    build_code(Ambient::quotient(tower, tuple)?, CodeParams::new(Family::S, k, eta))
}
