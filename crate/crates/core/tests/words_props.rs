use proptest::prelude::*;
use ssrt::words::{
    alphabet, canonical_form, isomorphic, substitute, DataValue, OriginWord, Permutation, Symbol,
};
use ssrt::DataWord;

fn word(max_len: usize, values: u64) -> impl Strategy<Value = DataWord> {
    let letters = alphabet("a b c");
    prop::collection::vec((0..letters.len(), 1..=values), 0..=max_len).prop_map(move |v| {
        DataWord(
            v.into_iter()
                .map(|(l, d)| Symbol::new(letters[l], DataValue(d)))
                .collect(),
        )
    })
}

fn permutation(values: u64) -> impl Strategy<Value = Permutation> {
    Just((1..=values).collect::<Vec<u64>>())
        .prop_shuffle()
        .prop_map(move |img| {
            Permutation::from_pairs(
                (1..=values)
                    .zip(img)
                    .map(|(a, b)| (DataValue(a), DataValue(b))),
            )
            .unwrap()
        })
}

proptest! {
    #[test]
    fn text_roundtrip(w in word(6, 5)) {
        prop_assert_eq!(DataWord::parse(&w.to_string()).unwrap(), w);
    }

    #[test]
    fn canonical_form_is_idempotent_and_isomorphic(w in word(6, 5)) {
        let c = canonical_form(&w);
        prop_assert_eq!(canonical_form(&c), c.clone());
        prop_assert!(isomorphic(&w, &c));
    }

    #[test]
    fn permutations_preserve_isomorphism_class(w in word(6, 5), p in permutation(5)) {
        let pw = p.apply_word(&w);
        prop_assert!(isomorphic(&w, &pw));
        prop_assert_eq!(canonical_form(&pw), canonical_form(&w));
        prop_assert_eq!(p.inverse().apply_word(&pw), w);
    }

    #[test]
    fn composition_applies_right_first(w in word(5, 4), p in permutation(4), q in permutation(4)) {
        prop_assert_eq!(p.compose(&q).apply_word(&w), p.apply_word(&q.apply_word(&w)));
    }

    #[test]
    fn fresh_substitution_is_safe(w in word(6, 4), d in 1u64..=4) {
        let s = substitute(&w, DataValue(d), DataValue::witness(0));
        prop_assert!(isomorphic(&w, &s));
    }
}

#[test]
fn origin_word_text() {
    let o = OriginWord::parse("c:d4@4 b:d3@3").unwrap();
    assert_eq!(o.to_string(), "c:d4@4 b:d3@3");
    assert_eq!(OriginWord::parse("EPS").unwrap().to_string(), "EPS");
    assert!(OriginWord::parse("c:d4@0").is_err());
}

#[test]
fn reserved_values_rejected_for_users() {
    assert!(DataWord::parse_user("a:D1").is_err());
    assert!(DataWord::parse_user("a:d1").is_ok());
}
