//! The extend, shorten and trim pipeline on every prefix of a word.

use ssrt::analysis::builtin;
use ssrt::deptree::{TreeContext, TreeValuationDisplay};
use ssrt::{Bounds, DataWord};

fn main() {
    let f = builtin("identity_or_reverse").unwrap();
    let ctx = TreeContext::new(&f, Bounds::default()).unwrap();
    let w = DataWord::parse("a:d1 b:d2 a:d1").unwrap();
    for step in ctx.pipeline(&w).unwrap() {
        println!("after [{}]", step.read);
        print!("{}", step.trimmed.dump());
        print!("{}", TreeValuationDisplay(step.trimmed_val.clone()));
        let complete = ctx
            .is_complete(&step.trimmed, &step.trimmed_val, &step.read)
            .unwrap();
        println!("complete: {}\n", complete.is_none());
    }
}
