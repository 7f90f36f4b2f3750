// Replay a timed command trace and report every violation.

use std::error::Error;

use dram_petri::{parse_trace, replay, DramNet, ProtocolConfig, ReplayOptions};

const TRACE: &str = "\
0   ACT RA0BA0
5   ACT RA0BA1
10  RD  RA0BA0   # too early for tRCD
11  RD  RA0BA0
20  RD  RA0BA2   # bank 2 is closed
30  PRE RA0BA0
";

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/ddr3-like.cfg");
    let dnet = DramNet::from_config(&ProtocolConfig::from_file(path)?)?;
    let trace = parse_trace(TRACE)?;

    let report = replay(&dnet, &trace, ReplayOptions::collect_all());
    print!("{}", report.render_text());
    println!("{}", report.render_json(&dnet));
    assert_eq!(report.violations.len(), 2);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
