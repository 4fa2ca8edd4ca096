//! Bundled example models.

use crate::model::{load, ModelDocument};

/// The KWIC architecture-style selection model: a goal, four quality
/// criteria with inner dependence and four architecture styles with
/// feedback to the criteria.
pub const KWIC_JSON: &str = include_str!("../fixtures/kwic.anp.json");

pub fn kwic() -> ModelDocument {
    load(KWIC_JSON.as_bytes()).expect("bundled fixture is valid")
}
