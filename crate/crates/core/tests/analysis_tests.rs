use proptest::prelude::*;
use ssrt::analysis::{
    builtin, canonical_words, check_forward_properties, BuiltinKind, FnOracle, InfluenceKind,
    PropertyViolation,
};
use ssrt::words::{alphabet, DataValue, OriginTriple, OriginWord, Permutation, Symbol};
use ssrt::{Analyzer, Bounds, DataWord, Transduction};

fn w(s: &str) -> DataWord {
    DataWord::parse(s).unwrap()
}

fn small() -> Bounds {
    Bounds::new(2, 2, 1).unwrap()
}

#[test]
fn builtins_pass_forward_checks() {
    for kind in BuiltinKind::ALL {
        let f = builtin(kind.name()).unwrap();
        let r = check_forward_properties(&f, Bounds::default());
        assert!(r.passes(), "{}: {}", kind.name(), r.render());
        let copies = if kind == BuiltinKind::DoubleGate {
            2
        } else {
            1
        };
        assert!(r.blowup_constant <= copies, "{}", kind.name());
    }
}

#[test]
fn peeking_oracle_is_caught() {
    // Emits the last value at origin 1.
    let f = FnOracle::new("peek", alphabet("a b"), |u: &DataWord| {
        Some(OriginWord(
            u.symbols()
                .last()
                .map(|s| vec![OriginTriple::new(s.letter, s.value, 1)])
                .unwrap_or_default(),
        ))
    });
    let r = check_forward_properties(&f, Bounds::default());
    assert!(matches!(
        r.no_data_peeking,
        Some(PropertyViolation::DataPeeking { .. })
    ));
}

#[test]
fn non_invariant_oracle_is_caught() {
    // Treats the value d1 specially.
    let f = FnOracle::new("biased", alphabet("a"), |u: &DataWord| {
        let special = u.symbols().iter().any(|s| s.value == DataValue(1));
        Some(if special {
            OriginWord::empty()
        } else {
            OriginWord::parse("a:d0@1")
                .ok()
                .filter(|_| !u.is_empty())
                .unwrap_or_default()
        })
    });
    let r = check_forward_properties(&f, Bounds::new(2, 2, 1).unwrap());
    assert!(r.perm_invariant.is_some());
}

#[test]
fn influencing_values_of_examples() {
    let b = Bounds::default();
    let kinds = |name: &str, u: &str| {
        let f = builtin(name).unwrap();
        Analyzer::new(&f, b)
            .aifl(&w(u))
            .iter()
            .map(|t| t.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    assert_eq!(kinds("identity", "a:d1 a:d2"), "");
    assert_eq!(kinds("reverse", "a:d1 b:d2 a:d1"), "");
    assert_eq!(kinds("identity_or_reverse", "a:d1 a:d2"), "d1:vm");
    assert_eq!(kinds("double_gate", "a:d1 a:d2 a:d3"), "d2:vm d1:vm");
    let f = builtin("third_or_fourth").unwrap();
    let an = Analyzer::new(&f, b);
    let t = an.aifl(&w("a:d1 a:d2 a:d3 a:d4"));
    assert_eq!(t.len(), 1);
    assert_eq!((t[0].value, t[0].kind), (DataValue(1), InfluenceKind::V));
}

#[test]
fn equalizing_sends_influencing_values_to_deltas() {
    let f = builtin("double_gate").unwrap();
    let an = Analyzer::new(&f, Bounds::default());
    let u = w("a:d1 a:d2 a:d3");
    assert_eq!(an.equalize(&u).apply_word(&u).to_string(), "a:D2 a:D1 a:F1");
}

#[test]
fn prefix_equivalence_examples() {
    let f = builtin("identity_or_reverse").unwrap();
    let an = Analyzer::new(&f, small());
    assert!(an.f_equiv(&w("a:d1 a:d2"), &w("a:d5 a:d7")).is_equivalent());
    assert!(an
        .f_equiv(&w("a:d1 a:d2"), &w("a:d5 a:d7 a:d5 a:d8"))
        .is_equivalent());
    // Letters of an abstracted prefix never matter here.
    assert!(an.f_equiv(&w("a:d1"), &w("b:d1")).is_equivalent());
    assert!(!an.f_equiv(&w("a:d1"), &DataWord::empty()).is_equivalent());
    // Two classes: the empty word and everything else.
    for x in canonical_words(f.alphabet(), 3).iter().skip(1) {
        assert!(an.f_equiv(x, &w("a:d1")).is_equivalent(), "[{x}]");
    }
    let g = builtin("double_gate").unwrap();
    let an = Analyzer::new(&g, small());
    assert!(!an.f_equiv(&w("a:d1"), &w("a:d1 a:d2")).is_equivalent());
}

#[test]
fn f_equiv_is_reflexive_and_symmetric_on_short_words() {
    let f = builtin("identity_or_reverse").unwrap();
    let an = Analyzer::new(&f, small());
    let words = canonical_words(f.alphabet(), 2);
    for x in &words {
        assert!(an.f_equiv(x, x).is_equivalent(), "[{x}]");
        for y in &words {
            assert_eq!(
                an.f_equiv(x, y).is_equivalent(),
                an.f_equiv(y, x).is_equivalent(),
                "[{x}] [{y}]"
            );
        }
    }
}

fn word_and_perm() -> impl Strategy<Value = (usize, DataWord, Permutation)> {
    let ab = alphabet("a b");
    (
        0..BuiltinKind::ALL.len(),
        prop::collection::vec((0usize..2, 1u64..=3), 0..=3),
        Just(vec![1u64, 2, 3, 7]).prop_shuffle(),
    )
        .prop_map(move |(k, syms, img)| {
            let u = DataWord(
                syms.into_iter()
                    .map(|(l, d)| Symbol::new(ab[l], DataValue(d)))
                    .collect(),
            );
            let p = Permutation::complete(
                [1u64, 2, 3]
                    .iter()
                    .zip(&img)
                    .map(|(&a, &b)| (DataValue(a), DataValue(b))),
            )
            .unwrap();
            (k, u, p)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn influence_commutes_with_renaming((k, u, p) in word_and_perm()) {
        let f = builtin(BuiltinKind::ALL[k].name()).unwrap();
        let an = Analyzer::new(&f, small());
        let a: Vec<_> = an.aifl(&u).iter().map(|t| (p.apply(t.value), t.kind)).collect();
        let b: Vec<_> = an.aifl(&p.apply_word(&u)).iter().map(|t| (t.value, t.kind)).collect();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn witnesses_replay((k, u, _p) in word_and_perm()) {
        let f = builtin(BuiltinKind::ALL[k].name()).unwrap();
        let an = Analyzer::new(&f, small());
        let inf = an.influence(&u);
        for m in &inf.memorable {
            prop_assert!(an.replay_memorable(&u, m));
        }
        for v in &inf.vulnerable {
            prop_assert!(an.replay_vulnerable(&u, v));
        }
    }
}
