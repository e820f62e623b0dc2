//! The large-N correlation assembly against the exact two-excitation sum for
//! small ensembles with random pair amplitudes. The gap closes like 1/N.
//!
//! `cargo run --release --example oracle_check`

use ryddephase::correlation::oracle_case;

fn main() -> ryddephase::Result<()> {
    println!("{:>3} {:>10} {:>10} {:>8} {:>5}", "N", "mean_dev", "max_dev", "3/N", "ok");
    for n in [2, 4, 6, 8, 10] {
        let case = oracle_case(n, 100, 7, 20.0)?;
        println!("{n:>3} {:>10.4} {:>10.4} {:>8.4} {:>5}", case.mean_rel_dev, case.max_rel_dev, case.bound, case.passed());
    }
    Ok(())
}
