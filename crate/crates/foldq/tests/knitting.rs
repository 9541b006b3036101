mod common;

use common::compare;
use foldq::chebrings::FoldingType;

#[test]
fn a3_matches_knitting() {
    compare(FoldingType::A(2));
}

#[test]
fn d4_matches_knitting() {
    compare(FoldingType::D(3));
}

#[test]
fn larger_types_match_knitting() {
    for ty in [FoldingType::A(4), FoldingType::D(5), FoldingType::E6] {
        compare(ty);
    }
}
