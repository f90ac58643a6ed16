//! Factored outputs: abstracting parts of the input and shifting origins.

use ssrt::analysis::builtin;
use ssrt::factored::{factor_eval, Cuts, Mask};
use ssrt::DataWord;

fn main() {
    let f = builtin("identity_or_reverse").unwrap();
    let w = DataWord::parse("a:d1 a:d2 b:d3 b:d4").unwrap();
    println!("f([{w}]) = {}", ssrt::Transduction::apply(&f, &w).unwrap());
    for (label, cuts, mask, z) in [
        ("f(u_ | v) with |u|=2", Cuts::two(2), Mask::LEFT, 0),
        ("f(u | v_) with |u|=2", Cuts::two(2), Mask::RIGHT, 0),
        (
            "f(u_ | m | v_) with |u|=1 |m|=2",
            Cuts::three(1, 3),
            Mask::LEFT_RIGHT,
            0,
        ),
        ("f_-2(u_ | v) with |u|=2", Cuts::two(2), Mask::LEFT, -2),
    ] {
        let fo = factor_eval(&f, &w, cuts, mask, z).unwrap();
        println!("{label}: {fo}");
    }
}
