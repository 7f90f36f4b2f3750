use dram_petri::analysis::Side;
use dram_petri::petri::{NodeRef, PlaceId, TransitionId, TransitionKind};
use dram_petri::{
    count_traces, equivalent, replay, unroll, ArcKind, CommandKind, CommandLabel, Coordinate,
    DramNet, Equivalence, NetBuilder, PetriNet, PlaceKind, ProtocolConfig, ReplayMode,
    ReplayOptions, TimedCommand,
};

/// Rebuilds `net` with places, transitions and arcs inserted in reverse
/// order, dropping arcs rejected by `keep`.
fn rebuild_reversed(net: &PetriNet, keep: impl Fn(usize) -> bool) -> PetriNet {
    let mut b = NetBuilder::new();
    let np = net.places().len();
    let nt = net.transitions().len();
    let mut place_map = vec![PlaceId(0); np];
    for i in (0..np).rev() {
        let p = &net.places()[i];
        place_map[i] = b.add_place(p.kind.clone(), p.coord, p.initial).unwrap();
    }
    let mut trans_map = vec![TransitionId(0); nt];
    for i in (0..nt).rev() {
        let t = &net.transitions()[i];
        trans_map[i] = match &t.kind {
            TransitionKind::Command(cmd) => b.add_transition(*cmd, t.coord.unwrap()).unwrap(),
            TransitionKind::Custom(name) => b.add_custom_transition(name.clone(), t.coord).unwrap(),
        };
    }
    let map = |n: NodeRef| match n {
        NodeRef::Place(p) => NodeRef::Place(place_map[p.index()]),
        NodeRef::Transition(t) => NodeRef::Transition(trans_map[t.index()]),
    };
    for (i, arc) in net.arcs().iter().enumerate().rev() {
        if keep(i) {
            b.add_arc(map(arc.from), map(arc.to), arc.kind).unwrap();
        }
    }
    b.freeze()
}

fn label(cmd: CommandKind, coord: Coordinate) -> CommandLabel {
    CommandLabel::new(cmd, coord)
}

#[test]
fn construction_order_does_not_change_behaviour() {
    let config = ProtocolConfig::functional(1, 2);
    let canonical = DramNet::from_config(&config).unwrap();
    let reversed = DramNet::from_net(rebuild_reversed(canonical.net(), |_| true), config).unwrap();
    assert_eq!(
        equivalent(&canonical, &reversed, 3).unwrap(),
        Equivalence::Equal
    );
    assert_eq!(unroll(&reversed).unwrap().state_count(), 9);
    for k in 1..=4 {
        assert_eq!(
            count_traces(&canonical, k).unwrap(),
            count_traces(&reversed, k).unwrap()
        );
    }
}

#[test]
fn blocked_self_refresh_is_detected() {
    let config = ProtocolConfig::functional(1, 2);
    let reference = DramNet::from_config(&config).unwrap();
    let mut b = reference.net().to_builder();
    let lock = b.add_place(PlaceKind::Aux("LOCK".into()), None, 1).unwrap();
    let sre = reference
        .transition(label(CommandKind::SRE, Coordinate::rank(0)))
        .unwrap();
    b.add_arc(lock, sre, ArcKind::inhibitor()).unwrap();
    let locked = DramNet::from_net(b.freeze(), config).unwrap();

    // Depth 1 already differs: SRE is legal from idle.
    let Equivalence::Divergent { witness, only_in } = equivalent(&reference, &locked, 1).unwrap()
    else {
        panic!("expected divergence");
    };
    assert_eq!(only_in, Side::First);
    assert_eq!(witness, vec![label(CommandKind::SRE, Coordinate::rank(0))]);

    let Equivalence::Divergent { witness, only_in } = equivalent(&reference, &locked, 3).unwrap()
    else {
        panic!("expected divergence");
    };
    assert_eq!(only_in, Side::First);
    assert!(witness.iter().any(|l| l.command == CommandKind::SRE));
    let timed: Vec<_> = witness
        .iter()
        .enumerate()
        .map(|(i, &l)| TimedCommand::new(i as u64, l))
        .collect();
    let untimed = ReplayOptions::untimed(ReplayMode::StopAtFirst);
    assert!(replay(&reference, &timed, untimed).is_clean());
    assert!(!replay(&locked, &timed, untimed).is_clean());
}

#[test]
fn missing_activate_guard_shows_up_in_second_net() {
    let config = ProtocolConfig::functional(1, 2);
    let reference = DramNet::from_config(&config).unwrap();
    let net = reference.net();
    let act = reference
        .transition(label(CommandKind::ACT, Coordinate::bank(0, 0)))
        .unwrap();
    let active = reference
        .place(PlaceKind::Active, Some(Coordinate::bank(0, 0)))
        .unwrap();
    let guard = net
        .arcs()
        .iter()
        .position(|a| {
            a.from == NodeRef::Place(active)
                && a.to == NodeRef::Transition(act)
                && matches!(a.kind, ArcKind::Inhibitor { .. })
        })
        .expect("ACT is guarded by its ACTIVE place");
    let loose = DramNet::from_net(rebuild_reversed(net, |i| i != guard), config).unwrap();

    let Equivalence::Divergent { witness, only_in } = equivalent(&reference, &loose, 2).unwrap()
    else {
        panic!("expected divergence");
    };
    assert_eq!(only_in, Side::Second);
    let act00 = label(CommandKind::ACT, Coordinate::bank(0, 0));
    assert_eq!(witness, vec![act00, act00]);
}

#[test]
fn from_net_rejects_custom_transitions() {
    let config = ProtocolConfig::functional(1, 1);
    let reference = DramNet::from_config(&config).unwrap();
    let mut b = reference.net().to_builder();
    b.add_custom_transition("NOP", None).unwrap();
    assert!(DramNet::from_net(b.freeze(), config).is_err());
}
