//! Trace parsing and scoreboard replay.
//!
//! Trace text accepts two styles, one per line:
//!
//! ```text
//! # timed: <time> <CMD> <coordinate>
//! 0 ACT RA0BA0
//! 11 RD (RA0BA0)
//! # untimed, commands joined by ';', times are sequence numbers
//! ACT (RA0BA0) ; ACT (RA0BA1) ; WR (RA0BA0)
//! ```

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::analysis::{enumerate_traces, AnalysisError};
use crate::dram::{DramNet, TimingArcInfo};
use crate::petri::{ArcId, CommandLabel, Marking, TransitionId};
use crate::timing::{TimeStamp, TimingBlock, TimingState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TimedCommand {
    pub time: TimeStamp,
    pub label: CommandLabel,
}

impl TimedCommand {
    pub fn new(time: TimeStamp, label: CommandLabel) -> Self {
        Self { time, label }
    }
}

impl fmt::Display for TimedCommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {}",
            self.time, self.label.command, self.label.coord
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn parse_label(text: &str) -> Result<CommandLabel, String> {
    let mut parts = text.split_whitespace();
    let (Some(cmd), Some(coord), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err(format!(
            "expected `<CMD> <coordinate>`, got `{}`",
            text.trim()
        ));
    };
    let command = cmd
        .parse()
        .map_err(|e: crate::petri::UnknownCommand| e.to_string())?;
    let coord = coord
        .strip_prefix('(')
        .and_then(|c| c.strip_suffix(')'))
        .unwrap_or(coord);
    let coord = coord
        .parse()
        .map_err(|e: crate::petri::CoordinateParseError| e.to_string())?;
    Ok(CommandLabel::new(command, coord))
}

pub fn parse_trace(text: &str) -> Result<Vec<TimedCommand>, ParseError> {
    let mut out: Vec<TimedCommand> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |message: String| ParseError {
            line: line_no,
            message,
        };
        let mut line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        line = line.strip_suffix(',').unwrap_or(line).trim();
        if let Some(inner) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            line = inner.trim();
        }
        if line.is_empty() {
            continue;
        }

        let first = line.split_whitespace().next().unwrap_or_default();
        let mut parsed = Vec::new();
        if first.bytes().all(|b| b.is_ascii_digit()) {
            let time: TimeStamp = first
                .parse()
                .map_err(|_| err(format!("time `{first}` out of range")))?;
            let label = parse_label(line[first.len()..].trim()).map_err(err)?;
            parsed.push(TimedCommand::new(time, label));
        } else {
            for piece in line.split(';') {
                let label = parse_label(piece).map_err(err)?;
                parsed.push(TimedCommand::new(
                    out.len() as TimeStamp + parsed.len() as TimeStamp,
                    label,
                ));
            }
        }
        for cmd in parsed {
            if let Some(prev) = out.last() {
                if cmd.time < prev.time {
                    return Err(err(format!(
                        "time regression: {} after {}",
                        cmd.time, prev.time
                    )));
                }
            }
            out.push(cmd);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReplayMode {
    #[default]
    StopAtFirst,
    CollectAll,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReplayOptions {
    pub mode: ReplayMode,
    /// With `false` only functional legality is checked.
    pub check_timing: bool,
}

impl Default for ReplayOptions {
    fn default() -> Self {
        Self {
            mode: ReplayMode::StopAtFirst,
            check_timing: true,
        }
    }
}

impl ReplayOptions {
    pub fn collect_all() -> Self {
        Self {
            mode: ReplayMode::CollectAll,
            ..Self::default()
        }
    }

    pub fn untimed(mode: ReplayMode) -> Self {
        Self {
            mode,
            check_timing: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ViolationKind {
    NotEnabled,
    TimingViolation,
    WindowViolation,
    ParseError,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationKind::NotEnabled => "NotEnabled",
            ViolationKind::TimingViolation => "TimingViolation",
            ViolationKind::WindowViolation => "WindowViolation",
            ViolationKind::ParseError => "ParseError",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// Position in the trace (line number for parse errors).
    pub index: usize,
    pub kind: ViolationKind,
    pub command: Option<TimedCommand>,
    pub detail: String,
    /// For timing kinds: the first time the command would have been legal.
    pub earliest_legal_time: Option<TimeStamp>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.index, self.kind)?;
        if let Some(cmd) = &self.command {
            write!(f, " {} @{}", cmd.label, cmd.time)?;
        }
        write!(f, ": {}", self.detail)?;
        if let Some(t) = self.earliest_legal_time {
            write!(f, " (earliest legal time {t})")?;
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct ViolationRecord<'a> {
    index: usize,
    kind: ViolationKind,
    command: Option<String>,
    time: Option<TimeStamp>,
    detail: &'a str,
    earliest_legal_time: Option<TimeStamp>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReplayReport {
    pub mode: ReplayMode,
    pub violations: Vec<Violation>,
    pub final_marking: Marking,
    pub accepted: usize,
    pub total: usize,
}

impl ReplayReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    /// A report for a trace that failed to parse.
    pub fn from_parse_error(dnet: &DramNet, err: &ParseError) -> Self {
        Self {
            mode: ReplayMode::StopAtFirst,
            violations: vec![Violation {
                index: err.line,
                kind: ViolationKind::ParseError,
                command: None,
                detail: err.message.clone(),
                earliest_legal_time: None,
            }],
            final_marking: dnet.idle_marking(),
            accepted: 0,
            total: 0,
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for v in &self.violations {
            out.push_str(&v.to_string());
            out.push('\n');
        }
        out.push_str(&format!(
            "accepted {} of {} command(s), {} violation(s)\n",
            self.accepted,
            self.total,
            self.violations.len()
        ));
        out
    }

    /// JSON object with `mode`, `accepted`, `total`, `violations` and the
    /// non-empty places of the final marking.
    pub fn render_json(&self, dnet: &DramNet) -> String {
        #[derive(Serialize)]
        struct Report<'a> {
            mode: ReplayMode,
            accepted: usize,
            total: usize,
            violations: Vec<ViolationRecord<'a>>,
            final_marking: BTreeMap<String, u32>,
        }
        let net = dnet.net();
        let report = Report {
            mode: self.mode,
            accepted: self.accepted,
            total: self.total,
            violations: self
                .violations
                .iter()
                .map(|v| ViolationRecord {
                    index: v.index,
                    kind: v.kind,
                    command: v.command.map(|c| c.label.to_string()),
                    time: v.command.map(|c| c.time),
                    detail: &v.detail,
                    earliest_legal_time: v.earliest_legal_time,
                })
                .collect(),
            final_marking: net
                .place_ids()
                .filter(|&p| self.final_marking[p] > 0)
                .map(|p| (net.place(p).to_string(), self.final_marking[p]))
                .collect(),
        };
        serde_json::to_string_pretty(&report).expect("report serializes")
    }
}

fn describe_arc(dnet: &DramNet, arc: Option<ArcId>) -> String {
    let Some(arc) = arc else {
        return "timing register".into();
    };
    match dnet.timing_arc(arc) {
        Some(info) => format!(
            "{} -> {} {}={}",
            dnet.label(info.from),
            dnet.label(info.to),
            info.name(),
            info.delay
        ),
        None => {
            let a = dnet.net().arc(arc);
            format!("timing arc {:?} -> {:?}", a.from, a.to)
        }
    }
}

/// Replays `trace` from the idle marking with fresh timing registers.
/// Rejected commands are reported and skipped; in stop-at-first mode the
/// replay ends at the first one.
pub fn replay(dnet: &DramNet, trace: &[TimedCommand], opts: ReplayOptions) -> ReplayReport {
    let net = dnet.net();
    let mut marking = dnet.idle_marking();
    let mut timing = TimingState::new(net, dnet.window_rules());
    let mut violations = Vec::new();
    let mut accepted = 0;

    for (index, &cmd) in trace.iter().enumerate() {
        let violation = |kind, detail: String, earliest| Violation {
            index,
            kind,
            command: Some(cmd),
            detail,
            earliest_legal_time: earliest,
        };
        let outcome = match dnet.transition(cmd.label) {
            None => Err(violation(
                ViolationKind::NotEnabled,
                format!("no transition {} in this net", cmd.label),
                None,
            )),
            Some(t) => check(dnet, &marking, &timing, t, cmd, opts.check_timing)
                .map(|()| t)
                .map_err(|(kind, detail, earliest)| violation(kind, detail, earliest)),
        };
        match outcome {
            Ok(t) => {
                marking = net.fire(&marking, t).expect("checked enabled");
                timing
                    .record_firing(net, t, cmd.time)
                    .expect("checked monotone");
                accepted += 1;
            }
            Err(v) => {
                violations.push(v);
                if opts.mode == ReplayMode::StopAtFirst {
                    break;
                }
            }
        }
    }

    ReplayReport {
        mode: opts.mode,
        violations,
        final_marking: marking,
        accepted,
        total: trace.len(),
    }
}

type Rejection = (ViolationKind, String, Option<TimeStamp>);

fn check(
    dnet: &DramNet,
    marking: &Marking,
    timing: &TimingState,
    t: TransitionId,
    cmd: TimedCommand,
    check_timing: bool,
) -> Result<(), Rejection> {
    let net = dnet.net();
    if let Some(last) = timing.last_firing() {
        if cmd.time < last {
            return Err((
                ViolationKind::ParseError,
                format!("time regression: {} after {}", cmd.time, last),
                None,
            ));
        }
    }
    if let Some(blocker) = net.blocker(marking, t) {
        return Err((ViolationKind::NotEnabled, blocker.describe(net), None));
    }
    if !check_timing {
        return Ok(());
    }
    let Err(block) = timing.check(net, t, cmd.time) else {
        return Ok(());
    };
    let earliest = timing.earliest_fire_time(net, t, cmd.time);
    Err(match block {
        TimingBlock::Separation { arc, next_allowed } => (
            ViolationKind::TimingViolation,
            format!(
                "blocked by {} until {}",
                describe_arc(dnet, arc),
                next_allowed
            ),
            earliest,
        ),
        TimingBlock::Window { rule, count } => {
            let rule = timing.rule(rule);
            (
                ViolationKind::WindowViolation,
                format!(
                    "window {} already holds {} firing(s) within {} (limit {})",
                    rule.name, count, rule.length, rule.threshold
                ),
                earliest,
            )
        }
        TimingBlock::TimedInhibitor { arc, count } => {
            let a = net.arc(arc);
            (
                ViolationKind::WindowViolation,
                format!(
                    "timed inhibitor {:?} sees {} token(s) in range",
                    a.from, count
                ),
                earliest,
            )
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeedError {
    #[error("spacing {spacing} is smaller than {name} = {value}")]
    SpacingTooSmall {
        spacing: TimeStamp,
        name: String,
        value: TimeStamp,
    },
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

/// Every legal depth-`k` trace, timestamped `0, spacing, 2*spacing, ...`.
/// With `spacing` at least the largest timing value each one replays clean.
pub fn coverage_feed(
    dnet: &DramNet,
    k: usize,
    spacing: TimeStamp,
) -> Result<impl Iterator<Item = Vec<TimedCommand>>, FeedError> {
    if let Some((name, value)) = dnet.largest_timing_value() {
        if spacing < value {
            return Err(FeedError::SpacingTooSmall {
                spacing,
                name,
                value,
            });
        }
    }
    let traces = enumerate_traces(dnet, k)?;
    Ok(traces.traces().to_vec().into_iter().map(move |trace| {
        trace
            .into_iter()
            .enumerate()
            .map(|(i, label)| TimedCommand::new(i as TimeStamp * spacing, label))
            .collect()
    }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProbeOutcome {
    Pass,
    Fail(String),
    /// No reachable state lets `to` fire directly after `from`.
    Unreachable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeResult {
    pub arc: ArcId,
    pub from: CommandLabel,
    pub to: CommandLabel,
    pub name: String,
    /// Delay actually probed: the largest over parallel arcs between the pair.
    pub delay: TimeStamp,
    pub outcome: ProbeOutcome,
}

impl ProbeResult {
    pub fn passed(&self) -> bool {
        self.outcome == ProbeOutcome::Pass
    }
}

impl fmt::Display for ProbeResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match &self.outcome {
            ProbeOutcome::Pass => "PASS".to_string(),
            ProbeOutcome::Fail(why) => format!("FAIL {why}"),
            ProbeOutcome::Unreachable => "FAIL unreachable".to_string(),
        };
        write!(
            f,
            "{} -> {} {}={}: {}",
            self.from, self.to, self.name, self.delay, status
        )
    }
}

/// The probe trace pair for one pair `(from, to)`: a functional prefix
/// reaching a state where `from` and then `to` may fire, then `from`, then
/// `to` one tick early (negative) or exactly on time (positive).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Probe {
    pub negative: Option<Vec<TimedCommand>>,
    pub positive: Vec<TimedCommand>,
}

/// Shortest functional prefix after which `a` and then `b` are enabled.
fn probe_prefix(dnet: &DramNet, a: TransitionId, b: TransitionId) -> Option<Vec<TransitionId>> {
    let net = dnet.net();
    let start = dnet.idle_marking();
    let mut parent: HashMap<Marking, Option<(Marking, TransitionId)>> = HashMap::new();
    let mut seen = HashSet::from([start.clone()]);
    parent.insert(start.clone(), None);
    let mut queue = VecDeque::from([start]);
    while let Some(m) = queue.pop_front() {
        if net.enabled(&m, a) && net.enabled(&net.fire(&m, a).ok()?, b) {
            let mut path = Vec::new();
            let mut cur = m;
            while let Some(Some((prev, t))) = parent.get(&cur).cloned() {
                path.push(t);
                cur = prev;
            }
            path.reverse();
            return Some(path);
        }
        for t in net.enabled_set(&m) {
            let next = net.fire(&m, t).ok()?;
            if seen.insert(next.clone()) {
                parent.insert(next.clone(), Some((m.clone(), t)));
                queue.push_back(next);
            }
        }
    }
    None
}

pub fn build_probe(
    dnet: &DramNet,
    from: TransitionId,
    to: TransitionId,
    delay: TimeStamp,
) -> Option<Probe> {
    let prefix = probe_prefix(dnet, from, to)?;
    let spacing = dnet.largest_timing_value().map_or(1, |(_, v)| v.max(1));
    let mut head: Vec<TimedCommand> = prefix
        .iter()
        .enumerate()
        .map(|(i, &t)| TimedCommand::new(i as TimeStamp * spacing, dnet.label(t)))
        .collect();
    let a_time = prefix.len() as TimeStamp * spacing;
    head.push(TimedCommand::new(a_time, dnet.label(from)));
    let with_b = |time| {
        let mut trace = head.clone();
        trace.push(TimedCommand::new(time, dnet.label(to)));
        trace
    };
    Some(Probe {
        negative: delay.checked_sub(1).map(|d| with_b(a_time + d)),
        positive: with_b(a_time + delay),
    })
}

/// Probes every timing arc: `to` one tick early must produce exactly one
/// timing violation, `to` exactly on time none.
pub fn run_probe_suite(dnet: &DramNet) -> Vec<ProbeResult> {
    let mut effective: HashMap<(TransitionId, TransitionId), TimeStamp> = HashMap::new();
    for info in dnet.timing_arcs() {
        let slot = effective.entry((info.from, info.to)).or_default();
        *slot = (*slot).max(info.delay);
    }
    let mut probes: HashMap<(TransitionId, TransitionId), Option<Probe>> = HashMap::new();
    dnet.timing_arcs()
        .iter()
        .map(|info| {
            let key = (info.from, info.to);
            let delay = effective[&key];
            let probe = probes
                .entry(key)
                .or_insert_with(|| build_probe(dnet, info.from, info.to, delay));
            ProbeResult {
                arc: info.arc,
                from: dnet.label(info.from),
                to: dnet.label(info.to),
                name: info.name(),
                delay,
                outcome: match probe {
                    None => ProbeOutcome::Unreachable,
                    Some(probe) => evaluate_probe(dnet, info, probe, delay),
                },
            }
        })
        .collect()
}

fn evaluate_probe(
    dnet: &DramNet,
    info: &TimingArcInfo,
    probe: &Probe,
    delay: TimeStamp,
) -> ProbeOutcome {
    let b_index = probe.positive.len() - 1;
    let a_time = probe.positive[b_index - 1].time;
    if let Some(negative) = &probe.negative {
        let report = replay(dnet, negative, ReplayOptions::collect_all());
        match report.violations.as_slice() {
            [v] if v.kind == ViolationKind::TimingViolation
                && v.index == b_index
                && v.earliest_legal_time == Some(a_time + delay) => {}
            other => {
                return ProbeOutcome::Fail(format!(
                    "early probe for {} gave {:?}",
                    info.name(),
                    other.iter().map(ToString::to_string).collect::<Vec<_>>()
                ))
            }
        }
    }
    let report = replay(dnet, &probe.positive, ReplayOptions::collect_all());
    if !report.is_clean() {
        return ProbeOutcome::Fail(format!(
            "on-time probe gave {:?}",
            report
                .violations
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
        ));
    }
    ProbeOutcome::Pass
}
