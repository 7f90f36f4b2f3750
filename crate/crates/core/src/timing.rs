//! Timed layer on top of the untimed net.
//!
//! Timing arcs are kept as "next allowed time" registers, one per
//! transition: firing `a` with an outgoing timing arc `a -> b` of delay `d`
//! raises `next_allowed[b]` to at least `now + d`. A command issued exactly
//! at its register value is legal.
//!
//! Sliding-window rules (N-activate windows, command-bus occupancy) count
//! the firings of a watched transition set inside `(now - length, now]`.
//! Timed inhibitor arcs use token birth times tracked per place and count
//! tokens whose age lies in the closed interval `[from, to]`.

use std::collections::VecDeque;

use thiserror::Error;

use crate::petri::{ArcId, PetriNet, TransitionId};

/// Integer clock ticks. The unit is whatever the protocol config declares.
pub type TimeStamp = u64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TimingError {
    #[error("time went backwards: {now} < {last}")]
    TimeRegression { last: TimeStamp, now: TimeStamp },
    #[error("window rule `{0}` needs a threshold of at least 1")]
    ZeroThreshold(String),
    #[error("window rule `{0}` needs a positive length")]
    ZeroLength(String),
}

/// A watched transition is blocked while `threshold` watched firings already
/// lie in the trailing window `(now - length, now]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowRule {
    pub name: String,
    pub watched: Vec<TransitionId>,
    pub length: TimeStamp,
    pub threshold: u32,
}

impl WindowRule {
    pub fn new(
        name: impl Into<String>,
        watched: impl IntoIterator<Item = TransitionId>,
        length: TimeStamp,
        threshold: u32,
    ) -> Result<Self, TimingError> {
        let name = name.into();
        if threshold == 0 {
            return Err(TimingError::ZeroThreshold(name));
        }
        if length == 0 {
            return Err(TimingError::ZeroLength(name));
        }
        let mut watched: Vec<_> = watched.into_iter().collect();
        watched.sort();
        watched.dedup();
        Ok(Self {
            name,
            watched,
            length,
            threshold,
        })
    }
}

/// The timing constraint currently keeping a transition from firing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TimingBlock {
    /// A timing arc register is still in the future. `arc` is the arc that
    /// last raised the register.
    Separation {
        arc: Option<ArcId>,
        next_allowed: TimeStamp,
    },
    Window {
        rule: usize,
        count: u32,
    },
    TimedInhibitor {
        arc: ArcId,
        count: u32,
    },
}

#[derive(Clone, Debug)]
struct WindowTrack {
    rule: WindowRule,
    births: VecDeque<TimeStamp>,
}

/// Per-session timing registers. Cheap to clone.
#[derive(Clone, Debug)]
pub struct TimingState {
    next_allowed: Vec<TimeStamp>,
    raised_by: Vec<Option<ArcId>>,
    windows: Vec<WindowTrack>,
    watchers: Vec<Vec<usize>>,
    ages: Vec<VecDeque<TimeStamp>>,
    last: Option<TimeStamp>,
}

impl TimingState {
    /// Fresh state at time 0. Initial tokens are born at 0.
    pub fn new(net: &PetriNet, rules: &[WindowRule]) -> Self {
        let transitions = net.transitions().len();
        let mut watchers = vec![Vec::new(); transitions];
        for (i, rule) in rules.iter().enumerate() {
            for t in &rule.watched {
                watchers[t.index()].push(i);
            }
        }
        Self {
            next_allowed: vec![0; transitions],
            raised_by: vec![None; transitions],
            windows: rules
                .iter()
                .cloned()
                .map(|rule| WindowTrack {
                    rule,
                    births: VecDeque::new(),
                })
                .collect(),
            watchers,
            ages: net
                .places()
                .iter()
                .map(|p| std::iter::repeat_n(0, p.initial as usize).collect())
                .collect(),
            last: None,
        }
    }

    pub fn next_allowed(&self, t: TransitionId) -> TimeStamp {
        self.next_allowed[t.index()]
    }

    pub fn last_firing(&self) -> Option<TimeStamp> {
        self.last
    }

    pub fn rules(&self) -> impl Iterator<Item = &WindowRule> {
        self.windows.iter().map(|w| &w.rule)
    }

    pub fn rule(&self, index: usize) -> &WindowRule {
        &self.windows[index].rule
    }

    /// Birth times of the tokens currently in `place`, oldest first.
    pub fn token_ages(&self, place: crate::petri::PlaceId) -> Vec<TimeStamp> {
        self.ages[place.index()].iter().copied().collect()
    }

    /// Number of watched firings of rule `rule` inside `(now - length, now]`.
    pub fn window_count(&self, rule: usize, now: TimeStamp) -> u32 {
        let track = &self.windows[rule];
        track
            .births
            .iter()
            .rev()
            .filter(|&&b| b <= now)
            .take_while(|&&b| now - b < track.rule.length)
            .count() as u32
    }

    /// Registers that `t` fired at `now`. The caller is responsible for the
    /// functional firing; token ages follow the same consume/produce/reset
    /// order as [`PetriNet::fire`].
    pub fn record_firing(
        &mut self,
        net: &PetriNet,
        t: TransitionId,
        now: TimeStamp,
    ) -> Result<(), TimingError> {
        if let Some(last) = self.last {
            if now < last {
                return Err(TimingError::TimeRegression { last, now });
            }
        }
        self.last = Some(now);

        let flow = net.flow(t);
        for &(arc, target, delay) in &flow.timing_out {
            let candidate = now.saturating_add(delay);
            let slot = &mut self.next_allowed[target.index()];
            if candidate > *slot {
                *slot = candidate;
                self.raised_by[target.index()] = Some(arc);
            }
        }

        for &rule in &self.watchers[t.index()] {
            let track = &mut self.windows[rule];
            track.births.push_back(now);
            // anything at or before now - length can never be inside a later window
            if let Some(horizon) = now.checked_sub(track.rule.length) {
                while track.births.front().is_some_and(|&b| b <= horizon) {
                    track.births.pop_front();
                }
            }
        }

        for &(place, weight) in &flow.consume {
            let ages = &mut self.ages[place.index()];
            for _ in 0..weight {
                ages.pop_front();
            }
        }
        for &(place, weight) in &flow.produce {
            let ages = &mut self.ages[place.index()];
            ages.extend(std::iter::repeat_n(now, weight as usize));
        }
        for &place in &flow.reset {
            self.ages[place.index()].clear();
        }
        Ok(())
    }

    /// First timing constraint that blocks `t` at `now`, checking
    /// separation registers, then window rules, then timed inhibitor arcs.
    pub fn check(
        &self,
        net: &PetriNet,
        t: TransitionId,
        now: TimeStamp,
    ) -> Result<(), TimingBlock> {
        let next_allowed = self.next_allowed[t.index()];
        if now < next_allowed {
            return Err(TimingBlock::Separation {
                arc: self.raised_by[t.index()],
                next_allowed,
            });
        }
        for &rule in &self.watchers[t.index()] {
            let count = self.window_count(rule, now);
            if count >= self.windows[rule].rule.threshold {
                return Err(TimingBlock::Window { rule, count });
            }
        }
        for &(arc, place, from, to, threshold) in &net.flow(t).timed_inhibit {
            let count = self.ages[place.index()]
                .iter()
                .filter(|&&b| b <= now && (from..=to).contains(&(now - b)))
                .count() as u32;
            if count >= threshold {
                return Err(TimingBlock::TimedInhibitor { arc, count });
            }
        }
        Ok(())
    }

    pub fn timing_enabled(&self, net: &PetriNet, t: TransitionId, now: TimeStamp) -> bool {
        self.check(net, t, now).is_ok()
    }

    /// Smallest time `>= now` at which `t` passes every timing check,
    /// assuming nothing else fires. `None` if no such time exists.
    pub fn earliest_fire_time(
        &self,
        net: &PetriNet,
        t: TransitionId,
        now: TimeStamp,
    ) -> Option<TimeStamp> {
        // The checks are piecewise constant in time; they can only change at
        // register values and at the moments a birth enters or leaves a window.
        let mut candidates = vec![now, self.next_allowed[t.index()]];
        for &rule in &self.watchers[t.index()] {
            let track = &self.windows[rule];
            candidates.extend(
                track
                    .births
                    .iter()
                    .map(|&b| b.saturating_add(track.rule.length)),
            );
        }
        for &(_, place, from, to, _) in &net.flow(t).timed_inhibit {
            for &b in &self.ages[place.index()] {
                candidates.push(b.saturating_add(from));
                candidates.push(b.saturating_add(to).saturating_add(1));
            }
        }
        candidates.retain(|&c| c >= now);
        candidates.sort_unstable();
        candidates.dedup();
        candidates
            .into_iter()
            .find(|&c| self.timing_enabled(net, t, c))
    }
}
