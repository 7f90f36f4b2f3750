//! Canonical DRAM net construction and timing-arc instantiation.
//!
//! Per rank the net has a `PDN` and a `SREF` place and the rank-level
//! transitions `PREA REFA PDE PDX SRE SRX`; per bank an `ACTIVE` place and
//! the transitions `ACT PRE RD RDA WR WRA`. All arcs have weight 1:
//!
//! * `ACT` produces into `ACTIVE` and is inhibited by it.
//! * `RD`/`WR` consume and re-produce the `ACTIVE` token; `RDA`/`WRA` only
//!   consume it (auto-precharge).
//! * `PRE` resets its bank's `ACTIVE`, `PREA` resets every `ACTIVE` of the rank.
//! * `REFA` and `SRE` are inhibited by every `ACTIVE` of the rank. `SRE`
//!   produces into `SREF`, `PDE` into `PDN`; `SRX`/`PDX` consume them.
//! * A marked `PDN` inhibits every transition of its rank except `PDX`, a
//!   marked `SREF` every transition except `SRX`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use thiserror::Error;

use crate::config::{
    CommandTimingConstraint, ConfigError, ProtocolConfig, TimingValue, WindowGroup, WindowSpec,
};
use crate::petri::{
    ArcId, ArcKind, CommandKind, CommandLabel, Coordinate, Marking, NetBuilder, NetError, PetriNet,
    PlaceId, PlaceKind, TransitionId,
};
use crate::timing::{TimeStamp, TimingError, WindowRule};

#[derive(Debug, Error)]
pub enum BuildError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Timing(#[from] TimingError),
    #[error("transition `{0}` is not a DRAM command")]
    NotACommand(String),
    #[error("coordinate {coord} lies outside a {ranks}x{banks} hierarchy")]
    CoordinateOutOfRange {
        coord: Coordinate,
        ranks: u32,
        banks: u32,
    },
}

/// A timing arc together with the constraint it came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimingArcInfo {
    pub arc: ArcId,
    pub from: TransitionId,
    pub to: TransitionId,
    pub delay: TimeStamp,
    pub value: TimingValue,
    pub scope: String,
    /// Position of the originating constraint in the applied list.
    pub constraint: usize,
}

impl TimingArcInfo {
    /// Name used in reports: the timing name, or the literal value.
    pub fn name(&self) -> String {
        self.value.to_string()
    }
}

/// A frozen DRAM net with lookup tables and its timing metadata.
#[derive(Clone, Debug)]
pub struct DramNet {
    net: Arc<PetriNet>,
    config: ProtocolConfig,
    transitions: HashMap<CommandLabel, TransitionId>,
    by_command: BTreeMap<CommandKind, Vec<TransitionId>>,
    places: HashMap<(PlaceKind, Option<Coordinate>), PlaceId>,
    timing_arcs: Vec<TimingArcInfo>,
    window_rules: Vec<WindowRule>,
}

/// Builds the functional net for `config` (no timing arcs, no windows).
pub fn build_net(config: &ProtocolConfig) -> Result<DramNet, BuildError> {
    if config.ranks == 0 {
        return Err(ConfigError::ZeroCount("ranks").into());
    }
    if config.banks_per_rank == 0 {
        return Err(ConfigError::ZeroCount("banks_per_rank").into());
    }
    let mut b = NetBuilder::new();
    for rank in 0..config.ranks {
        build_rank(&mut b, rank, config.banks_per_rank)?;
    }
    DramNet::from_net(b.freeze(), config.clone())
}

fn build_rank(b: &mut NetBuilder, rank: u32, banks: u32) -> Result<(), NetError> {
    use CommandKind::*;

    let rc = Coordinate::rank(rank);
    let pdn = b.add_place(PlaceKind::PowerDown, Some(rc), 0)?;
    let sref = b.add_place(PlaceKind::SelfRefresh, Some(rc), 0)?;
    let prea = b.add_transition(PREA, rc)?;
    let refa = b.add_transition(REFA, rc)?;
    let pde = b.add_transition(PDE, rc)?;
    let pdx = b.add_transition(PDX, rc)?;
    let sre = b.add_transition(SRE, rc)?;
    let srx = b.add_transition(SRX, rc)?;
    let mut rank_transitions = vec![prea, refa, pde, pdx, sre, srx];
    let mut actives = Vec::with_capacity(banks as usize);

    for bank in 0..banks {
        let bc = Coordinate::bank(rank, bank);
        let active = b.add_place(PlaceKind::Active, Some(bc), 0)?;
        let act = b.add_transition(ACT, bc)?;
        let pre = b.add_transition(PRE, bc)?;
        let rd = b.add_transition(RD, bc)?;
        let rda = b.add_transition(RDA, bc)?;
        let wr = b.add_transition(WR, bc)?;
        let wra = b.add_transition(WRA, bc)?;

        b.add_arc(act, active, ArcKind::normal())?;
        b.add_arc(active, act, ArcKind::inhibitor())?;
        for column in [rd, wr] {
            b.add_arc(active, column, ArcKind::normal())?;
            b.add_arc(column, active, ArcKind::normal())?;
        }
        for column in [rda, wra] {
            b.add_arc(active, column, ArcKind::normal())?;
        }
        b.add_arc(active, pre, ArcKind::Reset)?;

        actives.push(active);
        rank_transitions.extend([act, pre, rd, rda, wr, wra]);
    }

    for &active in &actives {
        b.add_arc(active, prea, ArcKind::Reset)?;
        b.add_arc(active, refa, ArcKind::inhibitor())?;
        b.add_arc(active, sre, ArcKind::inhibitor())?;
    }
    b.add_arc(sre, sref, ArcKind::normal())?;
    b.add_arc(pde, pdn, ArcKind::normal())?;
    b.add_arc(pdn, pdx, ArcKind::normal())?;
    b.add_arc(sref, srx, ArcKind::normal())?;

    // power-down and self-refresh freeze the rank
    for &t in &rank_transitions {
        if t != pdx {
            b.add_arc(pdn, t, ArcKind::inhibitor())?;
        }
        if t != srx {
            b.add_arc(sref, t, ArcKind::inhibitor())?;
        }
    }
    Ok(())
}

/// Instantiates timing arcs for every `(from, to)` command pair of each
/// constraint and every coordinate pair accepted by its scope.
pub fn apply_timing_constraints(
    dnet: DramNet,
    constraints: &[CommandTimingConstraint],
) -> Result<DramNet, BuildError> {
    let mut resolved = Vec::with_capacity(constraints.len());
    for (i, c) in constraints.iter().enumerate() {
        if c.from.is_empty() || c.to.is_empty() {
            return Err(ConfigError::EmptyCommandList(i).into());
        }
        resolved.push(dnet.config.resolve(&c.value)?);
    }

    let DramNet {
        net,
        config,
        transitions,
        by_command,
        places,
        mut timing_arcs,
        window_rules,
    } = dnet;
    let mut builder = net.to_builder();
    let empty = Vec::new();
    for (i, (c, &delay)) in constraints.iter().zip(&resolved).enumerate() {
        for from_cmd in &c.from {
            for to_cmd in &c.to {
                for &from in by_command.get(from_cmd).unwrap_or(&empty) {
                    for &to in by_command.get(to_cmd).unwrap_or(&empty) {
                        let (Some(fc), Some(tc)) =
                            (net.transition(from).coord, net.transition(to).coord)
                        else {
                            continue;
                        };
                        if !c.scope.eval(&fc, &tc) {
                            continue;
                        }
                        let arc = builder.add_arc(from, to, ArcKind::Timing { delay })?;
                        timing_arcs.push(TimingArcInfo {
                            arc,
                            from,
                            to,
                            delay,
                            value: c.value.clone(),
                            scope: c.scope.name().to_string(),
                            constraint: i,
                        });
                    }
                }
            }
        }
    }
    Ok(DramNet {
        net: Arc::new(builder.freeze()),
        config,
        transitions,
        by_command,
        places,
        timing_arcs,
        window_rules,
    })
}

/// Turns window specs into concrete rules over this net's transitions.
pub fn apply_window_rules(mut dnet: DramNet, specs: &[WindowSpec]) -> Result<DramNet, BuildError> {
    for spec in specs {
        let length = dnet.config.resolve(&spec.length)?;
        let watches = |label: &CommandLabel| {
            spec.commands
                .as_ref()
                .is_none_or(|cmds| cmds.contains(&label.command))
        };
        let groups: Vec<(String, Option<u32>)> = match spec.group {
            WindowGroup::Channel => vec![(spec.name.clone(), None)],
            WindowGroup::Rank => (0..dnet.config.ranks)
                .map(|r| (format!("{} ({})", spec.name, Coordinate::rank(r)), Some(r)))
                .collect(),
        };
        for (name, rank) in groups {
            let watched: Vec<TransitionId> = dnet
                .net
                .transition_ids()
                .filter(|&t| {
                    let label = dnet.label(t);
                    watches(&label) && rank.is_none_or(|r| label.coord.rank == r)
                })
                .collect();
            dnet.window_rules
                .push(WindowRule::new(name, watched, length, spec.threshold)?);
        }
    }
    Ok(dnet)
}

impl DramNet {
    /// Functional net plus all timing arcs and windows declared in `config`.
    pub fn from_config(config: &ProtocolConfig) -> Result<Self, BuildError> {
        config.validate()?;
        let dnet = build_net(config)?;
        let dnet = apply_timing_constraints(dnet, &config.constraints)?;
        apply_window_rules(dnet, &config.windows)
    }

    /// Wraps an arbitrary net whose command transitions follow the DRAM
    /// vocabulary, e.g. an alternative topology to compare against.
    pub fn from_net(net: PetriNet, config: ProtocolConfig) -> Result<Self, BuildError> {
        let mut transitions = HashMap::new();
        let mut by_command: BTreeMap<CommandKind, Vec<TransitionId>> = BTreeMap::new();
        let in_range = |c: Coordinate| {
            c.rank < config.ranks && c.bank.is_none_or(|b| b < config.banks_per_rank)
        };
        let out_of_range = |coord| BuildError::CoordinateOutOfRange {
            coord,
            ranks: config.ranks,
            banks: config.banks_per_rank,
        };
        for t in net.transition_ids() {
            let label = net
                .transition(t)
                .label()
                .ok_or_else(|| BuildError::NotACommand(net.transition(t).to_string()))?;
            if !in_range(label.coord) {
                return Err(out_of_range(label.coord));
            }
            transitions.insert(label, t);
            by_command.entry(label.command).or_default().push(t);
        }
        let mut places = HashMap::new();
        for p in net.place_ids() {
            let place = net.place(p);
            if let Some(coord) = place.coord {
                if !in_range(coord) {
                    return Err(out_of_range(coord));
                }
            }
            places.insert((place.kind.clone(), place.coord), p);
        }
        Ok(Self {
            net: Arc::new(net),
            config,
            transitions,
            by_command,
            places,
            timing_arcs: Vec::new(),
            window_rules: Vec::new(),
        })
    }

    pub fn net(&self) -> &PetriNet {
        &self.net
    }

    pub fn shared_net(&self) -> &Arc<PetriNet> {
        &self.net
    }

    pub fn config(&self) -> &ProtocolConfig {
        &self.config
    }

    pub fn transition(&self, label: CommandLabel) -> Option<TransitionId> {
        self.transitions.get(&label).copied()
    }

    pub fn place(&self, kind: PlaceKind, coord: Option<Coordinate>) -> Option<PlaceId> {
        self.places.get(&(kind, coord)).copied()
    }

    /// Command label of `t`. Every transition of a `DramNet` has one.
    pub fn label(&self, t: TransitionId) -> CommandLabel {
        self.net
            .transition(t)
            .label()
            .expect("DramNet transitions are commands")
    }

    /// All command labels of the net, in construction order.
    pub fn labels(&self) -> Vec<CommandLabel> {
        self.net.transition_ids().map(|t| self.label(t)).collect()
    }

    pub fn idle_marking(&self) -> Marking {
        self.net.initial_marking()
    }

    pub fn timing_arcs(&self) -> &[TimingArcInfo] {
        &self.timing_arcs
    }

    pub fn timing_arc(&self, arc: ArcId) -> Option<&TimingArcInfo> {
        self.timing_arcs.iter().find(|info| info.arc == arc)
    }

    pub fn window_rules(&self) -> &[WindowRule] {
        &self.window_rules
    }

    /// Largest instantiated delay or window length, with its name.
    pub fn largest_timing_value(&self) -> Option<(String, TimeStamp)> {
        let arcs = self.timing_arcs.iter().map(|a| (a.name(), a.delay));
        let windows = self.window_rules.iter().map(|w| (w.name.clone(), w.length));
        arcs.chain(windows).fold(
            None,
            |best: Option<(String, TimeStamp)>, (name, value)| match best {
                Some((_, v)) if v >= value => best,
                _ => Some((name, value)),
            },
        )
    }
}
