use proptest::prelude::*;
use ssrt::analysis::{builtin, BuiltinKind};
use ssrt::factored::{factor, factor_eval, BlockKind, Cuts, FactoredItem, Mask, Region};
use ssrt::words::{alphabet, DataValue, Symbol};
use ssrt::{DataWord, Transduction};

fn oracle_word() -> impl Strategy<Value = (usize, DataWord)> {
    let ab = alphabet("a b");
    (
        0..BuiltinKind::ALL.len(),
        prop::collection::vec((0usize..2, 1u64..=3), 0..=6),
    )
        .prop_map(move |(k, v)| {
            (
                k,
                DataWord(
                    v.into_iter()
                        .map(|(l, d)| Symbol::new(ab[l], DataValue(d)))
                        .collect(),
                ),
            )
        })
}

proptest! {
    #[test]
    fn empty_mask_keeps_every_triple((k, w) in oracle_word()) {
        let f = builtin(BuiltinKind::ALL[k].name()).unwrap();
        let out = f.apply(&w).unwrap();
        let fo = factor(&out, w.len(), Cuts::two(0), Mask::parse("-").unwrap(), 0).unwrap();
        prop_assert_eq!(fo.items().len(), out.len());
    }

    #[test]
    fn offsets_shift_concrete_origins((k, w) in oracle_word(), z in -3i64..=3) {
        let f = builtin(BuiltinKind::ALL[k].name()).unwrap();
        let cut = w.len() / 2;
        let a = factor_eval(&f, &w, Cuts::two(cut), Mask::LEFT, 0).unwrap();
        let b = factor_eval(&f, &w, Cuts::two(cut), Mask::LEFT, z).unwrap();
        prop_assert_eq!(a.items().len(), b.items().len());
        for (x, y) in a.items().iter().zip(b.items()) {
            match (x, y) {
                (FactoredItem::Concrete { origin: o1, .. }, FactoredItem::Concrete { origin: o2, .. }) => {
                    prop_assert_eq!(*o1 + z, *o2)
                }
                _ => prop_assert_eq!(x, y),
            }
        }
    }

    #[test]
    fn markers_never_repeat((k, w) in oracle_word()) {
        let f = builtin(BuiltinKind::ALL[k].name()).unwrap();
        if w.len() >= 2 {
            let fo = factor_eval(&f, &w, Cuts::three(1, w.len() - 1), Mask::ALL, 0).unwrap();
            prop_assert!(fo.is_normalized());
            for pair in fo.items().windows(2) {
                prop_assert!(!(matches!(pair[0], FactoredItem::Abstract(_)) && pair[0] == pair[1]));
            }
        }
    }

    #[test]
    fn left_blocks_cover_left_origins((k, w) in oracle_word()) {
        let f = builtin(BuiltinKind::ALL[k].name()).unwrap();
        let cut = w.len() / 2;
        let fo = factor_eval(&f, &w, Cuts::two(cut), Mask::RIGHT, 0).unwrap();
        let total: usize = fo.blocks(BlockKind::Left).unwrap().iter().map(|b| b.items.len()).sum();
        let out = f.apply(&w).unwrap();
        prop_assert_eq!(total, out.triples().iter().filter(|t| t.origin <= cut).count());
    }
}

#[test]
fn regions_follow_cuts() {
    let c = Cuts::three(2, 3);
    assert_eq!(c.region_of(1), Region::Left);
    assert_eq!(c.region_of(3), Region::Middle);
    assert_eq!(c.region_of(4), Region::Right);
}
