// Firing rules on a hand-built net: 2 O2 + 2 H2 react once into 2 H2O.

use std::error::Error;

use dram_petri::{ArcKind, NetBuilder, PlaceKind};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mut b = NetBuilder::new();
    let o2 = b.add_place(PlaceKind::Aux("O2".into()), None, 2)?;
    let h2 = b.add_place(PlaceKind::Aux("H2".into()), None, 2)?;
    let h2o = b.add_place(PlaceKind::Aux("H2O".into()), None, 0)?;
    let react = b.add_custom_transition("react", None)?;
    b.add_arc(o2, react, ArcKind::Normal { weight: 1 })?;
    b.add_arc(h2, react, ArcKind::Normal { weight: 2 })?;
    b.add_arc(react, h2o, ArcKind::Normal { weight: 2 })?;
    let net = b.freeze();

    let m0 = net.initial_marking();
    let m1 = net.fire(&m0, react)?;
    println!("before: {:?}", m0.counts());
    println!("after:  {:?}", m1.counts());
    assert_eq!((m1[o2], m1[h2], m1[h2o]), (1, 0, 2));

    // Not enough hydrogen left for a second reaction.
    let err = net.fire(&m1, react).unwrap_err();
    println!("second firing: {err}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
