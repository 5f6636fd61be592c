//! Bundled vector sets.

use crate::diagram::{build_labeled, BuildOptions, Diagram, LabeledVector, VectorsFile};
use crate::error::Result;

/// The 37-vector set with labels `P_a`, `P_b`, `P_1` … `P_35`, in exact form.
pub const TABLE1_JSON: &str = include_str!("../data/table1.json");

/// An 18-vector Kochen-Specker set in dimension 4 (9 contexts of size 4).
/// `P_a = (0,0,0,1)` and `P_b = (1,−1,−1,1)` are designated for seeding.
pub const CABELLO18_JSON: &str = include_str!("../data/cabello18.json");

fn entries(text: &str) -> Vec<LabeledVector> {
    VectorsFile::parse(text).expect("bundled vector file parses").entries()
}

pub fn table1_entries() -> Vec<LabeledVector> {
    entries(TABLE1_JSON)
}

pub fn cabello18_entries() -> Vec<LabeledVector> {
    entries(CABELLO18_JSON)
}

pub fn table1_diagram() -> Result<Diagram> {
    Ok(build_labeled(&table1_entries(), BuildOptions::default())?.0)
}

pub fn cabello18_diagram() -> Result<Diagram> {
    Ok(build_labeled(&cabello18_entries(), BuildOptions::default())?.0)
}
