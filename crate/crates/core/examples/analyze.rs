//! Memorable, vulnerable and influencing values with their witnesses.

use ssrt::analysis::{builtin, influence_report};
use ssrt::{Analyzer, Bounds, DataWord};

fn main() {
    for (name, word) in [
        ("identity_or_reverse", "a:d1 a:d2 a:d3"),
        ("third_or_fourth", "a:d1 a:d2"),
        ("third_or_fourth", "a:d1 a:d2 a:d3 a:d4"),
    ] {
        let f = builtin(name).unwrap();
        let an = Analyzer::new(&f, Bounds::default());
        let u = DataWord::parse(word).unwrap();
        println!("{name} on [{u}]");
        print!("{}", influence_report(&an, &u));
        println!("equalized: [{}]\n", an.equalize(&u).apply_word(&u));
    }
}
