// Reachability graphs and the shortest depth covering every state.

use std::error::Error;

use dram_petri::{k_min, state_count_formula, unroll, DramNet, ProtocolConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    for banks in [1, 2, 4, 8] {
        let dnet = DramNet::from_config(&ProtocolConfig::functional(1, banks))?;
        let sg = unroll(&dnet)?;
        let expected = state_count_formula(banks, 1);
        println!(
            "1 rank x {banks} banks: {} states (formula {expected}), {} edges, k_min {}",
            sg.state_count(),
            sg.edges().len(),
            k_min(&sg)
        );
        assert_eq!(expected, sg.state_count().into());
    }
    println!(
        "8 ranks x 8 banks would have {} states",
        state_count_formula(8, 8)
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
