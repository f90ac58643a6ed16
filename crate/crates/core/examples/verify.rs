//! Checks every fixture machine against its oracle, then a broken one.

use ssrt::fixtures::machine_fixtures;
use ssrt::synth::verify_against_oracle;
use ssrt::{builtin, Bounds};

fn main() {
    let b = Bounds::default();
    for fx in machine_fixtures() {
        if let (Some(m), Some(o)) = (&fx.machine, &fx.oracle) {
            print!("{}: {}", fx.name, verify_against_oracle(m, o, b).render());
        }
    }
    // The reverse machine is not the identity.
    let m = ssrt::fixtures::load_fixture("reverse")
        .unwrap()
        .machine
        .unwrap();
    print!(
        "reverse vs identity: {}",
        verify_against_oracle(&m, &builtin("identity").unwrap(), b).render()
    );
}
