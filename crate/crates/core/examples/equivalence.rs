//! Prefix equivalence of an oracle and the machine relation on a fixture.

use ssrt::analysis::{builtin, machine_equiv};
use ssrt::fixtures::load_fixture;
use ssrt::{Analyzer, Bounds, DataWord};

fn main() {
    let f = builtin("identity_or_reverse").unwrap();
    let an = Analyzer::new(&f, Bounds::default());
    let pairs = [("a:d1 a:d2", "b:d5 a:d7"), ("a:d1 a:d1", "a:d1 a:d2")];
    for (x, y) in pairs {
        let (x, y) = (DataWord::parse(x).unwrap(), DataWord::parse(y).unwrap());
        let r = an.f_equiv(&x, &y);
        println!("{}", r.render(&x, &y));
    }
    let m = load_fixture("identity_or_reverse")
        .unwrap()
        .machine
        .unwrap();
    let b = Bounds::new(3, 3, 1).unwrap();
    for (x, y) in pairs {
        let (x, y) = (DataWord::parse(x).unwrap(), DataWord::parse(y).unwrap());
        println!(
            "[{x}] machine-equivalent to [{y}]: {}",
            machine_equiv(&m, &x, &y, b).unwrap()
        );
    }
}
