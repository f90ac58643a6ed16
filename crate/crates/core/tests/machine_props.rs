use proptest::prelude::*;
use ssrt::fixtures::{load_fixture, machine_fixtures};
use ssrt::machine::{parse_machine_unchecked, transduce, Violation};
use ssrt::words::{DataValue, Permutation, Symbol};
use ssrt::{parse_machine, validate, write_machine, DataWord};

const COPYING: &str = "\
[alphabets]
input = a
output = a

[states]
q initial

[vars]
x

[output]
q = {x}

[transitions]
q a [true] -> q do x := {x} {x}
";

const OVERLAPPING: &str = "\
[alphabets]
input = a
output = a

[states]
q initial

[registers]
r

[output]
q = EPS

[transitions]
q a [true] -> q store r
q a [r=] -> q
";

#[test]
fn fixtures_roundtrip_through_text() {
    for fx in machine_fixtures() {
        let m = fx.machine.unwrap();
        let again = parse_machine(&write_machine(&m)).unwrap();
        assert_eq!(again.transitions, m.transitions, "{}", fx.name);
        assert_eq!(again.output, m.output, "{}", fx.name);
        assert!(validate(&m).is_valid(), "{}", fx.name);
    }
}

#[test]
fn copying_update_is_rejected() {
    let err = parse_machine(COPYING).unwrap_err();
    assert_eq!(err.line, 15);
    let m = parse_machine_unchecked(COPYING).unwrap().machine;
    assert!(matches!(
        validate(&m).violations[..],
        [Violation::Copyless { .. }]
    ));
}

#[test]
fn overlapping_guards_are_rejected() {
    assert!(parse_machine(OVERLAPPING).is_err());
    let m = parse_machine_unchecked(OVERLAPPING).unwrap().machine;
    assert!(validate(&m)
        .violations
        .iter()
        .any(|v| matches!(v, Violation::Nondeterministic { .. })));
}

#[test]
fn empty_word_uses_initial_output() {
    let m = load_fixture("identity_or_reverse")
        .unwrap()
        .machine
        .unwrap();
    assert_eq!(
        transduce(&m, &DataWord::empty())
            .unwrap()
            .output()
            .unwrap()
            .to_string(),
        "EPS"
    );
}

fn fixture_word() -> impl Strategy<Value = (usize, Vec<(usize, u64)>, Vec<u64>)> {
    let n = machine_fixtures().len();
    (
        0..n,
        prop::collection::vec((0usize..8, 1u64..=5), 0..=6),
        Just((1..=5).collect::<Vec<u64>>()).prop_shuffle(),
    )
}

proptest! {
    #[test]
    fn runs_commute_with_permutations((k, syms, img) in fixture_word()) {
        let m = machine_fixtures()[k].machine.clone().unwrap();
        let letters = &m.input_alphabet;
        let w = DataWord(syms.iter().map(|&(l, d)| Symbol::new(letters[l % letters.len()], DataValue(d))).collect());
        let p = Permutation::from_pairs((1..=5).zip(img).map(|(a, b)| (DataValue(a), DataValue(b)))).unwrap();
        let lhs = transduce(&m, &p.apply_word(&w)).unwrap().output();
        let rhs = transduce(&m, &w).unwrap().output().map(|o| p.apply_origin_word(&o));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn origins_stay_within_the_input((k, syms, _img) in fixture_word()) {
        let m = machine_fixtures()[k].machine.clone().unwrap();
        let letters = &m.input_alphabet;
        let w = DataWord(syms.iter().map(|&(l, d)| Symbol::new(letters[l % letters.len()], DataValue(d))).collect());
        if let Some(o) = transduce(&m, &w).unwrap().output() {
            for t in o.triples() {
                prop_assert!(t.origin >= 1 && t.origin <= w.len());
                prop_assert!(w.symbols()[..t.origin].iter().any(|s| s.value == t.value));
            }
        }
    }
}
