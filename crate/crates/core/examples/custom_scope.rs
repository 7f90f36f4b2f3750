// Register a custom scope predicate and use it from a config.

use std::error::Error;

use dram_petri::{DramNet, ProtocolConfig, ScopeRegistry};

const CONFIG: &str = "\
[hierarchy]
ranks = 2
banks_per_rank = 2

[constraints]
# switching ranks on the same bank index costs two cycles
same_bank_index, [RD], [RD], 2
";

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mut scopes = ScopeRegistry::new();
    scopes.register("same_bank_index", |a, b| {
        a.rank != b.rank && a.bank.is_some() && a.bank == b.bank
    });
    let config = ProtocolConfig::parse_with(CONFIG, &scopes)?;
    let dnet = DramNet::from_config(&config)?;
    for info in dnet.timing_arcs() {
        println!(
            "{} -> {} ({})",
            dnet.label(info.from),
            dnet.label(info.to),
            info.scope
        );
    }
    assert_eq!(dnet.timing_arcs().len(), 4);

    // Unregistered scope names are rejected.
    assert!(ProtocolConfig::parse(CONFIG).is_err());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
