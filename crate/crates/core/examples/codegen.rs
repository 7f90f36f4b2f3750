// Emit DOT, the constraint table and assertion text.

use std::error::Error;

use dram_petri::{emit, DramNet, EmissionTarget, ProtocolConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/two-bank.cfg");
    let dnet = DramNet::from_config(&ProtocolConfig::from_file(path)?)?;
    for target in EmissionTarget::ALL {
        let text = emit(&dnet, target)?;
        println!("== {target} ({} lines)", text.lines().count());
        for line in text.lines().take(4) {
            println!("{line}");
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
