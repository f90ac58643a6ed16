use ssrt::analysis::{builtin, canonical_words};
use ssrt::deptree::{evaluate, TreeContext};
use ssrt::words::OriginWord;
use ssrt::{Bounds, Transduction};

#[test]
fn shortening_and_trimming_keep_leaf_outputs() {
    for name in ["identity_or_reverse", "reverse"] {
        let f = builtin(name).unwrap();
        let ctx = TreeContext::new(&f, Bounds::default()).unwrap();
        let classes = ctx.suffixes().len();
        for x in canonical_words(f.alphabet(), 3) {
            for st in ctx.pipeline(&x).unwrap() {
                for s in 0..classes {
                    let out = |t: &ssrt::deptree::DependencyTree, val| -> Vec<OriginWord> {
                        let leaf = t.leaf_ending_in(s).unwrap();
                        t.unrolled_blocks(&leaf)
                            .unwrap()
                            .iter()
                            .map(|b| evaluate(val, b))
                            .collect()
                    };
                    let before = out(&st.extended, &st.extended_val);
                    assert_eq!(
                        before,
                        out(&st.shortened, &st.extended_val),
                        "{name} [{}] class {s}",
                        st.read
                    );
                    assert_eq!(
                        before,
                        out(&st.trimmed, &st.trimmed_val),
                        "{name} [{}] class {s}",
                        st.read
                    );
                }
                let (again, v2) = st.trimmed.trim(&st.trimmed_val);
                assert_eq!(again, st.trimmed);
                assert_eq!(v2, st.trimmed_val);
            }
        }
    }
}

#[test]
fn extension_needs_completeness() {
    let f = builtin("identity_or_reverse").unwrap();
    let ctx = TreeContext::new(&f, Bounds::default()).unwrap();
    let u = ssrt::DataWord::parse("a:d1").unwrap();
    let sym = u.at(1);
    // The bottom tree is complete only for the empty word.
    assert!(ctx
        .is_complete(&ctx.bottom(), &Default::default(), &u)
        .unwrap()
        .is_some());
    assert!(ctx
        .extend(&ctx.bottom(), &Default::default(), &u, sym)
        .is_err());
    assert!(ctx
        .extend(
            &ctx.bottom(),
            &Default::default(),
            &ssrt::DataWord::empty(),
            sym
        )
        .is_ok());
}

#[test]
fn context_sizes() {
    let f = builtin("identity").unwrap();
    let ctx = TreeContext::new(&f, Bounds::default()).unwrap();
    assert_eq!(ctx.influence_bound(), 0);
    assert_eq!(ctx.block_bound(), 1);
    assert!(f.alphabet().len() == 2);
}
