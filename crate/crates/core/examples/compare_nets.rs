// Bounded trace equivalence between two nets.

use std::error::Error;

use dram_petri::analysis::Side;
use dram_petri::{
    equivalent, render_trace, ArcKind, CommandKind, CommandLabel, Coordinate, DramNet, Equivalence,
    PlaceKind, ProtocolConfig,
};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let config = ProtocolConfig::functional(1, 2);
    let reference = DramNet::from_config(&config)?;

    // Same vocabulary, but self refresh can never be entered.
    let mut b = reference.net().to_builder();
    let lock = b.add_place(PlaceKind::Aux("LOCK".into()), None, 1)?;
    let sre = reference
        .transition(CommandLabel::new(CommandKind::SRE, Coordinate::rank(0)))
        .expect("SRE exists");
    b.add_arc(lock, sre, ArcKind::inhibitor())?;
    let locked = DramNet::from_net(b.freeze(), config)?;

    assert_eq!(equivalent(&reference, &reference, 3)?, Equivalence::Equal);
    match equivalent(&reference, &locked, 3)? {
        Equivalence::Equal => println!("equal up to depth 3"),
        Equivalence::Divergent { witness, only_in } => {
            let side = match only_in {
                Side::First => "reference",
                Side::Second => "locked",
            };
            println!(
                "diverge: `{}` only legal in the {side} net",
                render_trace(&witness)
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
