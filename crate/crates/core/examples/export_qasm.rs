//! Print every named circuit as OpenQASM 2.0 and parse it back.

use qbroadcast::circuit::CircuitId;
use qbroadcast::qasm::{parse_qasm, to_qasm};

fn main() -> qbroadcast::Result<()> {
    for id in CircuitId::ALL {
        let text = to_qasm(&id.circuit());
        assert_eq!(parse_qasm(&text)?, id.circuit());
        println!("// {}\n{text}", id.name());
    }
    Ok(())
}
