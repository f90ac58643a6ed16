//! Runs the identity-or-reverse fixture on a few words.

use ssrt::fixtures::load_fixture;
use ssrt::machine::{transduce, TransduceOutcome};
use ssrt::DataWord;

fn main() {
    let m = load_fixture("identity_or_reverse")
        .unwrap()
        .machine
        .unwrap();
    for text in ["a:d1 a:d2 b:d3 c:d4", "a:d1 a:d2 b:d3 c:d1", "EPS"] {
        let w = DataWord::parse(text).unwrap();
        match transduce(&m, &w).unwrap() {
            TransduceOutcome::Output(o) => println!("[{w}] -> {o}"),
            other => println!("[{w}] -> {other:?}"),
        }
    }
}
