//! Fixed instances shared by the benchmarks in `benches/`.

use threshold_lab_core::family::{SetFamily, UpperSetFamily};
use threshold_lab_core::forge::{random_nested_pair, random_upper_set_with_generators, worked_example, BVariant};

/// A seeded upper set on `n` points with `generators` minimal-element candidates.
pub fn upper_set(n: usize, generators: usize) -> UpperSetFamily {
    random_upper_set_with_generators(n, generators, 0xbe_7c).expect("valid instance parameters")
}

/// The three-element worked example `(A, B)`.
pub fn example_pair() -> (SetFamily, SetFamily) {
    let ex = worked_example(BVariant::Formula);
    (ex.a, ex.b)
}

/// A seeded nested pair on `n` points.
pub fn nested_pair(n: usize) -> (SetFamily, SetFamily) {
    random_nested_pair(n, 6, 0xbe_7c).expect("valid instance parameters")
}
