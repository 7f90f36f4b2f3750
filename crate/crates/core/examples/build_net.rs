// Build the command net for a config file and inspect it.

use std::error::Error;

use dram_petri::{DramNet, ProtocolConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/two-bank.cfg");
    let config = ProtocolConfig::from_file(path)?;
    let dnet = DramNet::from_config(&config)?;
    let net = dnet.net();
    println!(
        "{}: {} places, {} transitions, {} timing arcs",
        config.name,
        net.places().len(),
        net.transitions().len(),
        dnet.timing_arcs().len()
    );

    let idle = dnet.idle_marking();
    let enabled: Vec<String> = net
        .enabled_set(&idle)
        .into_iter()
        .map(|t| dnet.label(t).to_string())
        .collect();
    println!("enabled at idle: {}", enabled.join(", "));
    assert_eq!(enabled.len(), 8);

    for info in dnet.timing_arcs().iter().take(4) {
        println!(
            "  {} -> {}  {}={} ({})",
            dnet.label(info.from),
            dnet.label(info.to),
            info.name(),
            info.delay,
            info.scope
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
