//! The bundled example codes.

use crate::code::{parse_code_file, CodeDefinition};

/// (name, file text) for every bundled code. The first seven are the reference
/// codes; `zz-links` is the standard example of a group without independent
/// local generators.
pub const FIXTURES: &[(&str, &str)] = &[
    ("empty", include_str!("../../../fixtures/empty.code")),
    ("trivial", include_str!("../../../fixtures/trivial.code")),
    ("subsystem-trivial", include_str!("../../../fixtures/subsystem-trivial.code")),
    ("toric", include_str!("../../../fixtures/toric.code")),
    ("subsystem-toric", include_str!("../../../fixtures/subsystem-toric.code")),
    ("honeycomb", include_str!("../../../fixtures/honeycomb.code")),
    ("subsystem-color", include_str!("../../../fixtures/subsystem-color.code")),
    ("zz-links", include_str!("../../../fixtures/zz-links.code")),
];

/// Names of the seven reference codes.
pub const REFERENCE: &[&str] =
    &["empty", "trivial", "subsystem-trivial", "toric", "subsystem-toric", "honeycomb", "subsystem-color"];

pub fn fixture_text(name: &str) -> Option<&'static str> {
    FIXTURES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// Parses a bundled code by name.
pub fn fixture(name: &str) -> Option<CodeDefinition> {
    fixture_text(name).map(|t| parse_code_file(t).expect("bundled fixtures parse"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_parse() {
        for (name, _) in FIXTURES {
            assert_eq!(&fixture(name).unwrap().name, name);
        }
    }

    #[test]
    fn color_code_shape() {
        let c = fixture("subsystem-color").unwrap();
        assert_eq!(c.qubits_per_site, 6);
        assert_eq!(c.stabilizer_recipes[1].terms.len(), 18);
        assert_eq!(c.gauge_recipes.as_ref().unwrap().len(), 10);
    }
}
