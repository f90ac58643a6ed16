//! Synthesizes a machine from the identity-or-reverse oracle and prints it.

use ssrt::analysis::builtin;
use ssrt::synth::{synth_ifl_tracker, synth_transducer};
use ssrt::{write_machine, Bounds};

fn main() {
    let f = builtin("identity_or_reverse").unwrap();
    let b = Bounds::default();
    let tracker = synth_ifl_tracker(&f, b).unwrap();
    println!("tracker: {}", tracker.report);
    let s = synth_transducer(&f, b).unwrap();
    println!("transducer: {}\n", s.report);
    print!("{}", write_machine(&s.machine));
}
