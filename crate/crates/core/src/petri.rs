//! Untimed Petri net structure and firing semantics.
//!
//! A net is assembled with a [`NetBuilder`] and frozen into an immutable
//! [`PetriNet`]. Freezing compiles the arc table into per-transition flow
//! lists so that [`PetriNet::enabled`] and [`PetriNet::fire`] only touch the
//! arcs that matter for a given transition.
//!
//! Supported arc kinds are normal (weighted, either direction), inhibitor,
//! reset, timed inhibitor (evaluated by the timing layer only) and
//! transition-to-transition timing arcs.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::timing::TimeStamp;

/// Position of a node in the rank/bank hierarchy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Coordinate {
    pub rank: u32,
    pub bank: Option<u32>,
}

impl Coordinate {
    pub const fn rank(rank: u32) -> Self {
        Self { rank, bank: None }
    }

    pub const fn bank(rank: u32, bank: u32) -> Self {
        Self {
            rank,
            bank: Some(bank),
        }
    }

    pub fn is_bank_level(&self) -> bool {
        self.bank.is_some()
    }
}

impl fmt::Display for Coordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.bank {
            Some(bank) => write!(f, "RA{}BA{}", self.rank, bank),
            None => write!(f, "RA{}", self.rank),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed coordinate `{0}` (expected RA<r> or RA<r>BA<b>)")]
pub struct CoordinateParseError(pub String);

impl FromStr for Coordinate {
    type Err = CoordinateParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || CoordinateParseError(s.to_string());
        let rest = s.strip_prefix("RA").ok_or_else(err)?;
        let (rank, bank) = match rest.find("BA") {
            Some(pos) => (&rest[..pos], Some(&rest[pos + 2..])),
            None => (rest, None),
        };
        let parse = |digits: &str| -> Result<u32, CoordinateParseError> {
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err());
            }
            digits.parse().map_err(|_| err())
        };
        Ok(Coordinate {
            rank: parse(rank)?,
            bank: bank.map(parse).transpose()?,
        })
    }
}

/// JEDEC command vocabulary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CommandKind {
    ACT,
    PRE,
    RD,
    RDA,
    WR,
    WRA,
    PREA,
    REFA,
    PDE,
    PDX,
    SRE,
    SRX,
}

impl CommandKind {
    pub const ALL: [CommandKind; 12] = [
        CommandKind::ACT,
        CommandKind::PRE,
        CommandKind::RD,
        CommandKind::RDA,
        CommandKind::WR,
        CommandKind::WRA,
        CommandKind::PREA,
        CommandKind::REFA,
        CommandKind::PDE,
        CommandKind::PDX,
        CommandKind::SRE,
        CommandKind::SRX,
    ];

    /// Bank-level commands address a single bank; the rest address a whole rank.
    pub fn is_bank_level(self) -> bool {
        matches!(
            self,
            CommandKind::ACT
                | CommandKind::PRE
                | CommandKind::RD
                | CommandKind::RDA
                | CommandKind::WR
                | CommandKind::WRA
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            CommandKind::ACT => "ACT",
            CommandKind::PRE => "PRE",
            CommandKind::RD => "RD",
            CommandKind::RDA => "RDA",
            CommandKind::WR => "WR",
            CommandKind::WRA => "WRA",
            CommandKind::PREA => "PREA",
            CommandKind::REFA => "REFA",
            CommandKind::PDE => "PDE",
            CommandKind::PDX => "PDX",
            CommandKind::SRE => "SRE",
            CommandKind::SRX => "SRX",
        }
    }
}

impl fmt::Display for CommandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown command `{0}`")]
pub struct UnknownCommand(pub String);

impl FromStr for CommandKind {
    type Err = UnknownCommand;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CommandKind::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| UnknownCommand(s.to_string()))
    }
}

/// A command applied at a coordinate, e.g. `ACT (RA0BA0)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CommandLabel {
    pub command: CommandKind,
    pub coord: Coordinate,
}

impl CommandLabel {
    pub fn new(command: CommandKind, coord: Coordinate) -> Self {
        Self { command, coord }
    }
}

impl fmt::Display for CommandLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.command, self.coord)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PlaceKind {
    /// Bank holds an open row.
    Active,
    /// Rank is in power-down.
    PowerDown,
    /// Rank is in self-refresh.
    SelfRefresh,
    Aux(String),
}

impl fmt::Display for PlaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlaceKind::Active => f.write_str("ACTIVE"),
            PlaceKind::PowerDown => f.write_str("PDN"),
            PlaceKind::SelfRefresh => f.write_str("SREF"),
            PlaceKind::Aux(label) => f.write_str(label),
        }
    }
}

/// What a transition stands for. DRAM nets only use commands; `Custom` exists
/// for generic nets and auxiliary constructions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TransitionKind {
    Command(CommandKind),
    Custom(String),
}

impl fmt::Display for TransitionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransitionKind::Command(c) => c.fmt(f),
            TransitionKind::Custom(name) => f.write_str(name),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PlaceId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TransitionId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ArcId(pub u32);

impl PlaceId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl TransitionId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl ArcId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Either endpoint of an arc.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeRef {
    Place(PlaceId),
    Transition(TransitionId),
}

impl From<PlaceId> for NodeRef {
    fn from(id: PlaceId) -> Self {
        NodeRef::Place(id)
    }
}

impl From<TransitionId> for NodeRef {
    fn from(id: TransitionId) -> Self {
        NodeRef::Transition(id)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArcKind {
    /// Place→transition consumes `weight` tokens; transition→place produces them.
    Normal { weight: u32 },
    /// Blocks the transition while the place holds `weight` or more tokens.
    Inhibitor { weight: u32 },
    /// Empties the place when the transition fires.
    Reset,
    /// Blocks the transition while `threshold` or more tokens have an age in
    /// `[from, to]`. Only the timing layer evaluates it.
    TimedInhibitor {
        from: TimeStamp,
        to: TimeStamp,
        threshold: u32,
    },
    /// Firing the source blocks the target for `delay` ticks.
    Timing { delay: TimeStamp },
}

impl ArcKind {
    pub fn normal() -> Self {
        ArcKind::Normal { weight: 1 }
    }

    pub fn inhibitor() -> Self {
        ArcKind::Inhibitor { weight: 1 }
    }

    fn name(&self) -> &'static str {
        match self {
            ArcKind::Normal { .. } => "normal",
            ArcKind::Inhibitor { .. } => "inhibitor",
            ArcKind::Reset => "reset",
            ArcKind::TimedInhibitor { .. } => "timed inhibitor",
            ArcKind::Timing { .. } => "timing",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Place {
    pub kind: PlaceKind,
    pub coord: Option<Coordinate>,
    pub initial: u32,
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.coord {
            Some(coord) => write!(f, "{}({})", self.kind, coord),
            None => write!(f, "{}", self.kind),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub kind: TransitionKind,
    pub coord: Option<Coordinate>,
}

impl Transition {
    /// The command label, if this transition is a DRAM command.
    pub fn label(&self) -> Option<CommandLabel> {
        match (&self.kind, self.coord) {
            (TransitionKind::Command(cmd), Some(coord)) => Some(CommandLabel::new(*cmd, coord)),
            _ => None,
        }
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.coord {
            Some(coord) => write!(f, "{} ({})", self.kind, coord),
            None => write!(f, "{}", self.kind),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NetArc {
    pub from: NodeRef,
    pub to: NodeRef,
    pub kind: ArcKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetError {
    #[error("duplicate place {0}")]
    DuplicatePlace(String),
    #[error("duplicate transition {0}")]
    DuplicateTransition(String),
    #[error("{command} is a {expected}-level command but got coordinate {coord}")]
    LevelMismatch {
        command: CommandKind,
        coord: String,
        expected: &'static str,
    },
    #[error("{kind} arc cannot connect {from} to {to}")]
    IllegalArc {
        kind: &'static str,
        from: &'static str,
        to: &'static str,
    },
    #[error("arc weight must be at least 1")]
    ZeroWeight,
    #[error("timed inhibitor window [{from}, {to}] is empty")]
    EmptyWindow { from: TimeStamp, to: TimeStamp },
    #[error("unknown node {0:?}")]
    UnknownNode(NodeRef),
}

/// Why a transition is not enabled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Blocker {
    Insufficient {
        place: PlaceId,
        have: u32,
        need: u32,
    },
    Inhibited {
        place: PlaceId,
        have: u32,
        weight: u32,
    },
}

impl Blocker {
    pub fn describe(&self, net: &PetriNet) -> String {
        match *self {
            Blocker::Insufficient { place, have, need } => format!(
                "{} holds {} token(s), needs {}",
                net.place(place),
                have,
                need
            ),
            Blocker::Inhibited {
                place,
                have,
                weight,
            } => format!(
                "inhibited by {} ({} token(s) >= {})",
                net.place(place),
                have,
                weight
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("transition {transition} is not enabled: {reason}")]
pub struct FireError {
    pub transition: String,
    pub reason: String,
    pub blocker: Blocker,
}

/// Token counts per place. Equality and hashing cover counts only.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Marking(Box<[u32]>);

impl Marking {
    pub fn from_counts(counts: Vec<u32>) -> Self {
        Marking(counts.into_boxed_slice())
    }

    pub fn tokens(&self, place: PlaceId) -> u32 {
        self.0[place.index()]
    }

    pub fn set(&mut self, place: PlaceId, count: u32) {
        self.0[place.index()] = count;
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&c| u64::from(c)).sum()
    }
}

impl std::ops::Index<PlaceId> for Marking {
    type Output = u32;

    fn index(&self, place: PlaceId) -> &u32 {
        &self.0[place.index()]
    }
}

/// Compiled per-transition view of the arc table.
#[derive(Clone, Debug, Default)]
pub(crate) struct Flow {
    pub consume: Vec<(PlaceId, u32)>,
    pub produce: Vec<(PlaceId, u32)>,
    pub inhibit: Vec<(PlaceId, u32)>,
    pub reset: Vec<PlaceId>,
    pub timed_inhibit: Vec<(ArcId, PlaceId, TimeStamp, TimeStamp, u32)>,
    pub timing_out: Vec<(ArcId, TransitionId, TimeStamp)>,
}

/// Mutable net under construction.
#[derive(Clone, Debug, Default)]
pub struct NetBuilder {
    places: Vec<Place>,
    transitions: Vec<Transition>,
    arcs: Vec<NetArc>,
    place_keys: HashSet<(PlaceKind, Option<Coordinate>)>,
    transition_keys: HashSet<(TransitionKind, Option<Coordinate>)>,
}

impl NetBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_place(
        &mut self,
        kind: PlaceKind,
        coord: Option<Coordinate>,
        initial: u32,
    ) -> Result<PlaceId, NetError> {
        if !self.place_keys.insert((kind.clone(), coord)) {
            let place = Place {
                kind,
                coord,
                initial,
            };
            return Err(NetError::DuplicatePlace(place.to_string()));
        }
        let id = PlaceId(self.places.len() as u32);
        self.places.push(Place {
            kind,
            coord,
            initial,
        });
        Ok(id)
    }

    /// Adds a command transition. Bank-level commands need a bank coordinate,
    /// rank-level commands a rank-only one.
    pub fn add_transition(
        &mut self,
        command: CommandKind,
        coord: Coordinate,
    ) -> Result<TransitionId, NetError> {
        if command.is_bank_level() != coord.is_bank_level() {
            return Err(NetError::LevelMismatch {
                command,
                coord: coord.to_string(),
                expected: if command.is_bank_level() {
                    "bank"
                } else {
                    "rank"
                },
            });
        }
        self.push_transition(TransitionKind::Command(command), Some(coord))
    }

    pub fn add_custom_transition(
        &mut self,
        name: impl Into<String>,
        coord: Option<Coordinate>,
    ) -> Result<TransitionId, NetError> {
        self.push_transition(TransitionKind::Custom(name.into()), coord)
    }

    fn push_transition(
        &mut self,
        kind: TransitionKind,
        coord: Option<Coordinate>,
    ) -> Result<TransitionId, NetError> {
        if !self.transition_keys.insert((kind.clone(), coord)) {
            let t = Transition { kind, coord };
            return Err(NetError::DuplicateTransition(t.to_string()));
        }
        let id = TransitionId(self.transitions.len() as u32);
        self.transitions.push(Transition { kind, coord });
        Ok(id)
    }

    pub fn add_arc(
        &mut self,
        from: impl Into<NodeRef>,
        to: impl Into<NodeRef>,
        kind: ArcKind,
    ) -> Result<ArcId, NetError> {
        let (from, to) = (from.into(), to.into());
        for node in [from, to] {
            let known = match node {
                NodeRef::Place(p) => p.index() < self.places.len(),
                NodeRef::Transition(t) => t.index() < self.transitions.len(),
            };
            if !known {
                return Err(NetError::UnknownNode(node));
            }
        }
        let endpoint = |n: NodeRef| match n {
            NodeRef::Place(_) => "place",
            NodeRef::Transition(_) => "transition",
        };
        let legal = matches!(
            (kind, from, to),
            (
                ArcKind::Normal { .. },
                NodeRef::Place(_),
                NodeRef::Transition(_)
            ) | (
                ArcKind::Normal { .. },
                NodeRef::Transition(_),
                NodeRef::Place(_)
            ) | (
                ArcKind::Inhibitor { .. } | ArcKind::Reset | ArcKind::TimedInhibitor { .. },
                NodeRef::Place(_),
                NodeRef::Transition(_),
            ) | (
                ArcKind::Timing { .. },
                NodeRef::Transition(_),
                NodeRef::Transition(_)
            )
        );
        if !legal {
            return Err(NetError::IllegalArc {
                kind: kind.name(),
                from: endpoint(from),
                to: endpoint(to),
            });
        }
        match kind {
            ArcKind::Normal { weight: 0 } | ArcKind::Inhibitor { weight: 0 } => {
                return Err(NetError::ZeroWeight)
            }
            ArcKind::TimedInhibitor { threshold: 0, .. } => return Err(NetError::ZeroWeight),
            ArcKind::TimedInhibitor { from, to, .. } if from > to => {
                return Err(NetError::EmptyWindow { from, to })
            }
            _ => {}
        }
        let id = ArcId(self.arcs.len() as u32);
        self.arcs.push(NetArc { from, to, kind });
        Ok(id)
    }

    pub fn place_count(&self) -> usize {
        self.places.len()
    }

    pub fn transition_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn has_arc(&self, from: impl Into<NodeRef>, to: impl Into<NodeRef>, kind: ArcKind) -> bool {
        let (from, to) = (from.into(), to.into());
        self.arcs
            .iter()
            .any(|a| a.from == from && a.to == to && a.kind == kind)
    }

    pub fn freeze(self) -> PetriNet {
        let mut flows = vec![Flow::default(); self.transitions.len()];
        for (i, arc) in self.arcs.iter().enumerate() {
            let id = ArcId(i as u32);
            match (arc.kind, arc.from, arc.to) {
                (ArcKind::Normal { weight }, NodeRef::Place(p), NodeRef::Transition(t)) => {
                    flows[t.index()].consume.push((p, weight))
                }
                (ArcKind::Normal { weight }, NodeRef::Transition(t), NodeRef::Place(p)) => {
                    flows[t.index()].produce.push((p, weight))
                }
                (ArcKind::Inhibitor { weight }, NodeRef::Place(p), NodeRef::Transition(t)) => {
                    flows[t.index()].inhibit.push((p, weight))
                }
                (ArcKind::Reset, NodeRef::Place(p), NodeRef::Transition(t)) => {
                    flows[t.index()].reset.push(p)
                }
                (
                    ArcKind::TimedInhibitor {
                        from,
                        to,
                        threshold,
                    },
                    NodeRef::Place(p),
                    NodeRef::Transition(t),
                ) => flows[t.index()]
                    .timed_inhibit
                    .push((id, p, from, to, threshold)),
                (ArcKind::Timing { delay }, NodeRef::Transition(a), NodeRef::Transition(b)) => {
                    flows[a.index()].timing_out.push((id, b, delay))
                }
                _ => unreachable!("arc endpoints validated in add_arc"),
            }
        }
        // Parallel arcs act as one: normal weights add up, the smallest
        // inhibitor weight binds.
        for flow in &mut flows {
            merge(&mut flow.consume, |a, b| a + b);
            merge(&mut flow.produce, |a, b| a + b);
            merge(&mut flow.inhibit, u32::min);
        }
        PetriNet {
            places: self.places,
            transitions: self.transitions,
            arcs: self.arcs,
            flows,
        }
    }
}

fn merge(list: &mut Vec<(PlaceId, u32)>, combine: impl Fn(u32, u32) -> u32) {
    let mut merged: Vec<(PlaceId, u32)> = Vec::with_capacity(list.len());
    for &(p, w) in list.iter() {
        match merged.iter_mut().find(|(q, _)| *q == p) {
            Some(entry) => entry.1 = combine(entry.1, w),
            None => merged.push((p, w)),
        }
    }
    *list = merged;
}

/// Frozen Petri net. Ids are dense and follow construction order.
#[derive(Clone, Debug)]
pub struct PetriNet {
    places: Vec<Place>,
    transitions: Vec<Transition>,
    arcs: Vec<NetArc>,
    flows: Vec<Flow>,
}

impl PetriNet {
    /// Reopens the net for further construction; ids are preserved.
    pub fn to_builder(&self) -> NetBuilder {
        NetBuilder {
            places: self.places.clone(),
            transitions: self.transitions.clone(),
            arcs: self.arcs.clone(),
            place_keys: self
                .places
                .iter()
                .map(|p| (p.kind.clone(), p.coord))
                .collect(),
            transition_keys: self
                .transitions
                .iter()
                .map(|t| (t.kind.clone(), t.coord))
                .collect(),
        }
    }

    pub fn places(&self) -> &[Place] {
        &self.places
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn arcs(&self) -> &[NetArc] {
        &self.arcs
    }

    pub fn place(&self, id: PlaceId) -> &Place {
        &self.places[id.index()]
    }

    pub fn transition(&self, id: TransitionId) -> &Transition {
        &self.transitions[id.index()]
    }

    pub fn arc(&self, id: ArcId) -> &NetArc {
        &self.arcs[id.index()]
    }

    pub fn place_ids(&self) -> impl Iterator<Item = PlaceId> + '_ {
        (0..self.places.len() as u32).map(PlaceId)
    }

    pub fn transition_ids(&self) -> impl Iterator<Item = TransitionId> + '_ {
        (0..self.transitions.len() as u32).map(TransitionId)
    }

    pub(crate) fn flow(&self, t: TransitionId) -> &Flow {
        &self.flows[t.index()]
    }

    pub fn initial_marking(&self) -> Marking {
        Marking::from_counts(self.places.iter().map(|p| p.initial).collect())
    }

    /// First unmet enabling condition of `t`, if any. Timed inhibitor arcs are
    /// ignored here.
    pub fn blocker(&self, marking: &Marking, t: TransitionId) -> Option<Blocker> {
        let flow = self.flow(t);
        for &(place, need) in &flow.consume {
            let have = marking[place];
            if have < need {
                return Some(Blocker::Insufficient { place, have, need });
            }
        }
        for &(place, weight) in &flow.inhibit {
            let have = marking[place];
            if have >= weight {
                return Some(Blocker::Inhibited {
                    place,
                    have,
                    weight,
                });
            }
        }
        None
    }

    pub fn enabled(&self, marking: &Marking, t: TransitionId) -> bool {
        let flow = self.flow(t);
        flow.consume.iter().all(|&(p, w)| marking[p] >= w)
            && flow.inhibit.iter().all(|&(p, w)| marking[p] < w)
    }

    /// Enabled transitions in construction order.
    pub fn enabled_set(&self, marking: &Marking) -> Vec<TransitionId> {
        self.transition_ids()
            .filter(|&t| self.enabled(marking, t))
            .collect()
    }

    /// Fires `t` and returns the successor marking. Consumption and
    /// production are applied first, then reset arcs empty their places.
    pub fn fire(&self, marking: &Marking, t: TransitionId) -> Result<Marking, FireError> {
        if let Some(blocker) = self.blocker(marking, t) {
            return Err(FireError {
                transition: self.transition(t).to_string(),
                reason: blocker.describe(self),
                blocker,
            });
        }
        Ok(self.fire_unchecked(marking, t))
    }

    /// Fires without checking enabledness. Callers must have checked
    /// [`PetriNet::enabled`].
    pub(crate) fn fire_unchecked(&self, marking: &Marking, t: TransitionId) -> Marking {
        let flow = self.flow(t);
        let mut next = marking.clone();
        for &(p, w) in &flow.consume {
            next.0[p.index()] -= w;
        }
        for &(p, w) in &flow.produce {
            next.0[p.index()] += w;
        }
        for &p in &flow.reset {
            next.0[p.index()] = 0;
        }
        next
    }

    /// Looks up a command transition by label. Linear; use the index on
    /// `DramNet` for hot paths.
    pub fn find_transition(&self, label: CommandLabel) -> Option<TransitionId> {
        self.transition_ids()
            .find(|&t| self.transition(t).label() == Some(label))
    }

    pub fn find_place(&self, kind: &PlaceKind, coord: Option<Coordinate>) -> Option<PlaceId> {
        self.place_ids().find(|&p| {
            let place = self.place(p);
            &place.kind == kind && place.coord == coord
        })
    }
}
