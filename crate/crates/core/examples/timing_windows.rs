// Timing registers and the four-activate window.

use std::error::Error;

use dram_petri::{CommandKind, CommandLabel, Coordinate, DramNet, ProtocolConfig, TimingState};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/ddr3-like.cfg");
    let dnet = DramNet::from_config(&ProtocolConfig::from_file(path)?)?;
    let net = dnet.net();
    let act = |bank| {
        dnet.transition(CommandLabel::new(
            CommandKind::ACT,
            Coordinate::bank(0, bank),
        ))
        .expect("bank exists")
    };

    let mut marking = dnet.idle_marking();
    let mut timing = TimingState::new(net, dnet.window_rules());
    // Four activates spaced by tRRD.
    for (bank, now) in [(0, 0), (1, 5), (2, 10), (3, 15)] {
        timing
            .check(net, act(bank), now)
            .map_err(|b| format!("{b:?}"))?;
        marking = net.fire(&marking, act(bank))?;
        timing.record_firing(net, act(bank), now)?;
        println!("ACT bank {bank} at {now}");
    }

    let blocked = timing.check(net, act(4), 20);
    println!("fifth ACT at 20: {blocked:?}");
    assert!(blocked.is_err());
    let earliest = timing.earliest_fire_time(net, act(4), 20);
    println!("earliest fifth ACT: {earliest:?}");
    assert_eq!(earliest, Some(24));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
