// Coverage stimulus and the timing probe suite.

use std::error::Error;

use dram_petri::verify::{coverage_feed, run_probe_suite};
use dram_petri::{replay, DramNet, ProtocolConfig, ReplayOptions};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/ddr3-like.cfg");
    let dnet = DramNet::from_config(&ProtocolConfig::from_file(path)?)?;
    let (name, spacing) = dnet.largest_timing_value().expect("timed config");
    println!("spacing stimulus by {name} = {spacing}");

    let mut clean = 0;
    for trace in coverage_feed(&dnet, 2, spacing)? {
        if replay(&dnet, &trace, ReplayOptions::default()).is_clean() {
            clean += 1;
        }
    }
    println!("{clean} depth-2 stimulus traces replay clean");

    let results = run_probe_suite(&dnet);
    let passed = results.iter().filter(|r| r.passed()).count();
    for r in results.iter().take(3) {
        println!("  {r}");
    }
    println!("probes: {passed}/{} pass", results.len());
    assert_eq!(passed, results.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
