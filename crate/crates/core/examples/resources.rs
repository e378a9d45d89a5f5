//! Bell pairs needed to broadcast an m-coefficient state to n receivers.

use qbroadcast::metrics::resource_count;

fn main() -> qbroadcast::Result<()> {
    for (m, n) in [(2, 1), (2, 2), (4, 1), (3, 5), (2, 10), (1000, 64)] {
        let c = resource_count(m, n)?;
        println!("m = {m:>4}, n = {n:>2}: {} Bell pairs", c.bell_pairs);
    }
    Ok(())
}
