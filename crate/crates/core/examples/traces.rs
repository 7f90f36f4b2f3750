// Enumerate and count legal command traces of a fixed depth.

use std::error::Error;

use dram_petri::{count_traces, enumerate_traces, render_trace, DramNet, ProtocolConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let dnet = DramNet::from_config(&ProtocolConfig::functional(1, 2))?;
    for k in 1..=5 {
        println!("k={k}: {} traces", count_traces(&dnet, k)?);
    }

    let set = enumerate_traces(&dnet, 3)?;
    for trace in set.traces().iter().take(5) {
        println!("  {}", render_trace(trace));
    }
    println!("  ... {} in total", set.len());
    assert_eq!(set.len() as u128, count_traces(&dnet, 3)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
