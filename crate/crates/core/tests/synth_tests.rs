use ssrt::analysis::{builtin, canonical_words, FnOracle};
use ssrt::deptree::TreeContext;
use ssrt::machine::{run, RunOutcome};
use ssrt::synth::{synth_ifl_tracker, synth_transducer, verify_against_oracle, SynthError};
use ssrt::words::{alphabet, OriginTriple, OriginWord};
use ssrt::{validate, Bounds, DataWord, Transduction};

#[test]
fn identity_tracker_needs_no_registers() {
    let s = synth_ifl_tracker(&builtin("identity").unwrap(), Bounds::default()).unwrap();
    assert!(s.machine.registers.is_empty());
    assert!(s.machine.variables.is_empty());
    assert!(s.report.closed);
}

#[test]
fn reverse_transducer_agrees() {
    let f = builtin("reverse").unwrap();
    let b = Bounds::default();
    let s = synth_transducer(&f, b).unwrap();
    assert!(validate(&s.machine).is_valid());
    let r = verify_against_oracle(&s.machine, &f, b);
    assert!(r.agrees(), "{}", r.render());
}

#[test]
fn configurations_hold_complete_trees() {
    let f = builtin("identity_or_reverse").unwrap();
    let b = Bounds::default();
    let s = synth_transducer(&f, b).unwrap();
    let ctx = TreeContext::new(&f, b).unwrap();
    for u in canonical_words(f.alphabet(), 3) {
        let RunOutcome::Reached(c) = run(&s.machine, &u).unwrap() else {
            panic!("stuck on [{u}]")
        };
        let tree = s.states[c.state].tree.as_ref().unwrap();
        let val = s.tree_valuation(&c);
        assert_eq!(ctx.is_complete(tree, &val, &u).unwrap(), None, "[{u}]");
    }
}

#[test]
fn peeking_oracles_are_refused() {
    let f = FnOracle::new("peek", alphabet("a"), |u: &DataWord| {
        Some(OriginWord(
            u.symbols()
                .last()
                .map(|s| vec![OriginTriple::new(s.letter, s.value, 1)])
                .unwrap_or_default(),
        ))
    });
    assert!(matches!(
        synth_transducer(&f, Bounds::default()),
        Err(SynthError::Properties(_))
    ));
}

#[test]
fn mismatches_come_with_a_trace() {
    let f = builtin("identity").unwrap();
    let m = ssrt::fixtures::load_fixture("reverse")
        .unwrap()
        .machine
        .unwrap();
    let r = verify_against_oracle(&m, &f, Bounds::default());
    let mm = r.mismatch.clone().expect("reverse is not the identity");
    assert_eq!(mm.word.len(), 2);
    assert_eq!(f.apply(&mm.word), mm.expected);
    assert!(r.render().starts_with("MISMATCH"));
    assert_eq!(mm.trace.len(), 3);
}
