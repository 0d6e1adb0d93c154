//! The example systems shipped with the crate, as `.lss` text.

use crate::format::SystemFile;
use crate::mfs::MatrixFunctionSystem;

pub const THUE_MORSE: &str = include_str!("../corpus/thue_morse.lss");
pub const TABLE: &str = include_str!("../corpus/table.lss");
pub const PERIOD_DOUBLING: &str = include_str!("../corpus/period_doubling.lss");
pub const ABA: &str = include_str!("../corpus/aba.lss");
pub const SINGLE: &str = include_str!("../corpus/single.lss");
pub const FLIP: &str = include_str!("../corpus/flip.lss");
/// Partial: only columns 1, 2, 5 and 11 are present, so it fails validation.
pub const BOX_FRAGMENT: &str = include_str!("../corpus/box_fragment.lss");

pub const FILES: [(&str, &str); 7] = [
    ("thue_morse", THUE_MORSE),
    ("table", TABLE),
    ("period_doubling", PERIOD_DOUBLING),
    ("aba", ABA),
    ("single", SINGLE),
    ("flip", FLIP),
    ("box_fragment", BOX_FRAGMENT),
];

fn load(text: &str) -> MatrixFunctionSystem {
    SystemFile::parse(text)
        .expect("corpus file parses")
        .to_system()
}

pub fn thue_morse() -> MatrixFunctionSystem {
    load(THUE_MORSE)
}

pub fn table() -> MatrixFunctionSystem {
    load(TABLE)
}

pub fn period_doubling() -> MatrixFunctionSystem {
    load(PERIOD_DOUBLING)
}

pub fn aba() -> MatrixFunctionSystem {
    load(ABA)
}

pub fn single() -> MatrixFunctionSystem {
    load(SINGLE)
}

pub fn flip() -> MatrixFunctionSystem {
    load(FLIP)
}

pub fn box_fragment() -> MatrixFunctionSystem {
    load(BOX_FRAGMENT)
}

/// Every corpus system that passes block validation.
pub fn valid_systems() -> Vec<MatrixFunctionSystem> {
    vec![
        thue_morse(),
        table(),
        period_doubling(),
        aba(),
        single(),
        flip(),
    ]
}
